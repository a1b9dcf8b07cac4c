//! Pearson indicator, stable/metastable/robust classification and the
//! sufficient-condition checklists for synchronization between two sites.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{spectral_gap, ObservableSeries, SPECTRAL_CONDITION_LIMIT};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, C64};
use crate::liouvillian::{is_unital, EigenSystem, LindbladModel, Superoperator};
use crate::operator::{embed_site_operator, gell_mann_basis, DensityMatrix, HilbertSpace, Operator};
use crate::random::{random_density, random_pure_density};
use crate::spectral::{DynamicalSymmetry, StationaryStates, SymmetryKind, SymmetrySearch};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PearsonParams {
    /// Window length `Δt`.
    pub window: f64,
    /// Grid points per window for helpers that sample signals.
    pub resolution: usize,
}

impl PearsonParams {
    pub fn new(window: f64, resolution: usize) -> Result<Self> {
        if !(window > 0.0 && window.is_finite()) {
            return Err(Error::Invalid("Pearson window must be positive".into()));
        }
        Ok(PearsonParams { window, resolution: resolution.max(8) })
    }
}

/// Trapezoid average of `x` over the samples `i0..=i1`.
fn window_mean(ts: &[f64], x: &[f64], i0: usize, i1: usize) -> f64 {
    let mut acc = 0.0;
    for i in i0..i1 {
        acc += 0.5 * (x[i] + x[i + 1]) * (ts[i + 1] - ts[i]);
    }
    acc / (ts[i1] - ts[i0])
}

/// Pearson correlation of two real signals on a shared grid over
/// `[t, t + window]`. `Ok(None)` when either signal has zero variance there.
pub fn pearson_slices(ts: &[f64], f: &[f64], g: &[f64], t: f64, window: f64) -> Result<Option<f64>> {
    if ts.len() != f.len() || ts.len() != g.len() {
        return Err(Error::Dimension("signals and grid differ in length".into()));
    }
    let span = 1e-12 * window.max(1.0);
    let i0 = ts.iter().position(|&x| x >= t - span);
    let i1 = ts.iter().rposition(|&x| x <= t + window + span);
    let (i0, i1) = match (i0, i1) {
        (Some(a), Some(b)) if b > a => (a, b),
        _ => return Err(Error::Invalid("grid does not cover the Pearson window".into())),
    };
    if ts[i0] - t > span + 1e-9 * window || t + window - ts[i1] > span + 1e-9 * window {
        return Err(Error::Invalid("grid does not cover the Pearson window".into()));
    }
    let fm = window_mean(ts, f, i0, i1);
    let gm = window_mean(ts, g, i0, i1);
    let df: Vec<f64> = f.iter().map(|x| x - fm).collect();
    let dg: Vec<f64> = g.iter().map(|x| x - gm).collect();
    let prod: Vec<f64> = df.iter().zip(&dg).map(|(a, b)| a * b).collect();
    let f2: Vec<f64> = df.iter().map(|a| a * a).collect();
    let g2: Vec<f64> = dg.iter().map(|a| a * a).collect();
    let cov = window_mean(ts, &prod, i0, i1);
    let vf = window_mean(ts, &f2, i0, i1);
    let vg = window_mean(ts, &g2, i0, i1);
    let floor = 1e-28 * (fm * fm + gm * gm + 1e-300);
    if vf <= floor || vg <= floor {
        return Ok(None);
    }
    Ok(Some((cov / (vf * vg).sqrt()).clamp(-1.0, 1.0)))
}

/// Pearson indicator `C_{f,g}(t, Δt)` of the real parts of two series.
pub fn pearson(f: &ObservableSeries, g: &ObservableSeries, t: f64, params: &PearsonParams) -> Result<Option<f64>> {
    if f.times != g.times {
        return Err(Error::Invalid("series must share a time grid".into()));
    }
    pearson_slices(&f.times, &f.real(), &g.real(), t, params.window)
}

/// `C(t)` for every grid time whose window fits in the series.
pub fn pearson_series(f: &ObservableSeries, g: &ObservableSeries, params: &PearsonParams) -> Result<Vec<(f64, Option<f64>)>> {
    let end = match f.times.last() {
        Some(&e) => e,
        None => return Ok(Vec::new()),
    };
    let (fr, gr) = (f.real(), g.real());
    f.times
        .iter()
        .filter(|&&t| t + params.window <= end * (1.0 + 1e-12))
        .map(|&t| Ok((t, pearson_slices(&f.times, &fr, &gr, t, params.window)?)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Metastable,
    None,
}

#[derive(Clone, Debug, Serialize)]
pub struct SyncEvidence {
    /// Pearson indicator of the asymptotic signals for the first non-stationary sample.
    pub pearson: Option<f64>,
    pub pearson_window: f64,
    /// Imaginary parts of the oscillating modes used.
    pub frequencies: Vec<f64>,
    pub transient_tau: f64,
    /// `1/|Re λ|` of the slowest oscillating excited mode, metastable verdicts only.
    pub lifetime: Option<f64>,
    /// `T/τ < 10`.
    pub marginal: bool,
    /// Metastable verdict without a parameter family establishing control of `T`.
    pub uncontrolled: bool,
    pub samples_total: usize,
    pub samples_nonstationary: usize,
    /// Largest `max_t |f_j - s f_k| / amplitude` over non-stationary samples.
    pub signal_residual: f64,
    /// `Σ_k |⟪ρ_k|O_j - s O_k⟫| ‖σ_k‖ / Σ_k |⟪ρ_k|O_j⟫| ‖σ_k‖` over the asymptotic modes.
    pub operator_residual: f64,
    /// Largest oscillating operator-level content of `O_j`.
    pub operator_oscillation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SyncReport {
    pub pair: (usize, usize),
    pub observable: String,
    pub verdict: Verdict,
    pub robust: bool,
    pub anti: bool,
    pub complete: Option<bool>,
    pub evidence: SyncEvidence,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassifyOptions {
    /// Relative equality tolerance for signals and operators.
    pub tol: f64,
    /// Eigenvalues with `|Re λ| ≤ peripheral_tol·scale` count as peripheral.
    pub peripheral_tol: f64,
    /// Overrides `τ = 10/γ_gap`.
    pub tau: Option<f64>,
    /// Overrides the comparison window (two periods of the slowest frequency).
    pub window: Option<f64>,
    pub resolution: usize,
    /// Fast/slow decay-rate ratio that delimits a metastable manifold.
    pub separation: f64,
    /// Name of the parameter controlling the metastable lifetime, when a family is known.
    pub controlled_by: Option<String>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            tol: 1e-6,
            peripheral_tol: 1e-11,
            tau: None,
            window: None,
            resolution: 400,
            separation: 10.0,
            controlled_by: None,
        }
    }
}

/// 20 Haar-random pure states and 5 random full-rank mixed states.
pub fn default_samples(space: &HilbertSpace, seed: u64) -> Vec<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = space.total_dim();
    let mut out = Vec::with_capacity(25);
    for i in 0..25 {
        let m = if i < 20 { random_pure_density(d, &mut rng) } else { random_density(d, &mut rng) };
        out.push(DensityMatrix::new_unchecked(Operator::new(space.clone(), m).expect("dimension")));
    }
    out
}

struct Manifold {
    modes: Vec<usize>,
    tau: f64,
    lifetime: Option<f64>,
    stable: bool,
}

fn is_oscillating(z: C64, eig: &EigenSystem, tol: f64) -> bool {
    z.im.abs() > tol * eig.scale
}

fn peripheral_manifold(eig: &EigenSystem, opts: &ClassifyOptions) -> Manifold {
    let cut = opts.peripheral_tol * eig.scale;
    let modes = (0..eig.len()).filter(|&k| eig.eigenvalues[k].re.abs() <= cut).collect();
    let tau = opts.tau.unwrap_or_else(|| spectral_gap(eig, opts.peripheral_tol).map_or(0.0, |g| 10.0 / g));
    Manifold { modes, tau, lifetime: None, stable: true }
}

/// Modes below the first decay-rate jump of at least `separation`, when that
/// set contains a decaying oscillation.
fn metastable_manifold(eig: &EigenSystem, opts: &ClassifyOptions) -> Option<Manifold> {
    let cut = opts.peripheral_tol * eig.scale;
    let mut rates: Vec<(f64, usize)> = (0..eig.len()).map(|k| (-eig.eigenvalues[k].re, k)).collect();
    rates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let first_decaying = rates.iter().position(|r| r.0 > cut)?;
    let mut split = None;
    for i in first_decaying..rates.len() - 1 {
        if rates[i + 1].0 >= opts.separation * rates[i].0 {
            split = Some(i + 1);
            break;
        }
    }
    let split = split?;
    let modes: Vec<usize> = rates[..split].iter().map(|r| r.1).collect();
    let lifetime = modes
        .iter()
        .filter(|&&k| eig.eigenvalues[k].re.abs() > cut && is_oscillating(eig.eigenvalues[k], eig, opts.peripheral_tol))
        .map(|&k| 1.0 / eig.eigenvalues[k].re.abs())
        .max_by(f64::total_cmp)?;
    let tau = opts.tau.unwrap_or(10.0 / rates[split].0);
    Some(Manifold { modes, tau, lifetime: Some(lifetime), stable: false })
}

fn ensure_conditioned(eig: &EigenSystem, man: &Manifold) -> Result<()> {
    let cond = eig.modes_condition(&man.modes);
    if cond > SPECTRAL_CONDITION_LIMIT {
        return Err(Error::Numerical(format!("asymptotic modes have overlap condition {cond:.3e}")));
    }
    Ok(())
}

struct PairOps {
    oj: CMat,
    ok: CMat,
}

fn pair_ops(model: &LindbladModel, o_local: &CMat, j: usize, k: usize) -> Result<PairOps> {
    let dims = model.space.site_dims();
    if j >= dims.len() || k >= dims.len() || j == k {
        return Err(Error::Dimension(format!("invalid site pair ({j}, {k})")));
    }
    if dims[j] != dims[k] || o_local.nrows() != dims[j] {
        return Err(Error::Dimension("sites and observable must share one local dimension".into()));
    }
    Ok(PairOps {
        oj: embed_site_operator(o_local, j, &model.space)?.into_matrix(),
        ok: embed_site_operator(o_local, k, &model.space)?.into_matrix(),
    })
}

/// Mode-wise Heisenberg content: `(⟪ρ_m|O_j⟫, ⟪ρ_m|O_k⟫, ‖σ_m‖)` per mode.
fn operator_content(eig: &EigenSystem, ops: &PairOps, modes: &[usize]) -> Vec<(C64, C64, f64)> {
    let (vj, vk) = (linalg::vectorize(&ops.oj), linalg::vectorize(&ops.ok));
    modes
        .iter()
        .map(|&m| {
            let r = eig.right_columns().column(m);
            (r.dotc(&vj), r.dotc(&vk), eig.left_columns().column(m).norm())
        })
        .collect()
}

fn operator_residual(content: &[(C64, C64, f64)], sign: f64) -> f64 {
    let num: f64 = content.iter().map(|(a, b, s)| (a - b * sign).norm() * s).sum();
    let den: f64 = content.iter().map(|(a, _, s)| a.norm() * s).sum();
    // no asymptotic content: report the absolute mismatch instead of a ratio of round-off
    if den <= 1e-12 {
        num
    } else {
        num / den
    }
}

struct SampleSignals {
    fj: Vec<f64>,
    fk: Vec<f64>,
    oscillating: f64,
}

fn sample_signals(eig: &EigenSystem, ops: &PairOps, modes: &[usize], rho0: &CMat, ts: &[f64], tol: f64) -> SampleSignals {
    let v0 = linalg::vectorize(rho0);
    let (oj_t, ok_t) = (ops.oj.transpose(), ops.ok.transpose());
    let mut terms = Vec::with_capacity(modes.len());
    let mut oscillating: f64 = 0.0;
    for &m in modes {
        let cm = eig.left_columns().column(m).dotc(&v0);
        let rho_m = eig.right_matrix(m);
        // tr(O ρ) = Σ_ab O_ab ρ_ba
        let aj: C64 = oj_t.iter().zip(rho_m.iter()).map(|(x, y)| x * y).sum();
        let ak: C64 = ok_t.iter().zip(rho_m.iter()).map(|(x, y)| x * y).sum();
        let lam = eig.eigenvalues[m];
        if is_oscillating(lam, eig, tol) {
            oscillating = oscillating.max((cm * aj).norm());
        }
        terms.push((cm * aj, cm * ak, lam));
    }
    let eval = |t: f64, pick: fn(&(C64, C64, C64)) -> C64| -> f64 {
        terms.iter().map(|term| (pick(term) * (term.2 * t).exp()).re).sum()
    };
    SampleSignals {
        fj: ts.iter().map(|&t| eval(t, |x| x.0)).collect(),
        fk: ts.iter().map(|&t| eval(t, |x| x.1)).collect(),
        oscillating,
    }
}

fn signal_residual(s: &SampleSignals, sign: f64) -> f64 {
    let amp = s.fj.iter().chain(&s.fk).map(|x| x.abs()).fold(0.0, f64::max);
    let diff = s.fj.iter().zip(&s.fk).map(|(a, b)| (a - sign * b).abs()).fold(0.0, f64::max);
    if amp == 0.0 {
        0.0
    } else {
        diff / amp
    }
}

struct ManifoldOutcome {
    synced: Option<f64>,
    signal_residual: f64,
    operator_residual: f64,
    operator_oscillation: f64,
    nonstationary: usize,
    pearson: Option<f64>,
    window: f64,
    frequencies: Vec<f64>,
}

fn evaluate_manifold(
    eig: &EigenSystem,
    ops: &PairOps,
    man: &Manifold,
    samples: &[DensityMatrix],
    opts: &ClassifyOptions,
) -> Result<ManifoldOutcome> {
    let mut frequencies: Vec<f64> = man
        .modes
        .iter()
        .map(|&m| eig.eigenvalues[m].im)
        .filter(|w| w.abs() > opts.peripheral_tol * eig.scale)
        .collect();
    frequencies.sort_by(f64::total_cmp);
    frequencies.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * eig.scale);
    let slowest = frequencies.iter().map(|w| w.abs()).fold(f64::INFINITY, f64::min);
    let window = opts.window.unwrap_or(if slowest.is_finite() { 4.0 * std::f64::consts::PI / slowest } else { 1.0 });
    let n = opts.resolution.max(16);
    let ts: Vec<f64> = (0..n).map(|i| man.tau + window * i as f64 / (n - 1) as f64).collect();

    let content = operator_content(eig, ops, &man.modes);
    let operator_oscillation = man
        .modes
        .iter()
        .zip(&content)
        .filter(|(&m, _)| is_oscillating(eig.eigenvalues[m], eig, opts.peripheral_tol))
        .map(|(_, (a, _, s))| a.norm() * s)
        .fold(0.0, f64::max);

    let signals: Vec<SampleSignals> =
        samples.iter().map(|s| sample_signals(eig, ops, &man.modes, s.matrix(), &ts, opts.peripheral_tol)).collect();
    let active: Vec<&SampleSignals> = signals.iter().filter(|s| s.oscillating > 1e-8).collect();
    let mut synced = None;
    let mut best_res = f64::INFINITY;
    if !active.is_empty() {
        for sign in [1.0, -1.0] {
            let res = active.iter().map(|s| signal_residual(s, sign)).fold(0.0, f64::max);
            if res < best_res {
                best_res = res;
            }
            if res <= opts.tol && synced.is_none() {
                synced = Some(sign);
            }
        }
    } else {
        best_res = 0.0;
    }
    let sign = synced.unwrap_or(1.0);
    let pearson = match active.first() {
        Some(s) => pearson_slices(&ts, &s.fj, &s.fk, man.tau, window)?,
        None => None,
    };
    Ok(ManifoldOutcome {
        synced,
        signal_residual: best_res,
        operator_residual: operator_residual(&content, sign),
        operator_oscillation,
        nonstationary: active.len(),
        pearson,
        window,
        frequencies,
    })
}

/// Classifies synchronization of the local observable `o_local` between sites `j` and `k`.
pub fn classify_pair(
    model: &LindbladModel,
    o_local: &CMat,
    label: &str,
    j: usize,
    k: usize,
    eig: &EigenSystem,
    samples: &[DensityMatrix],
    opts: &ClassifyOptions,
) -> Result<SyncReport> {
    if samples.is_empty() {
        return Err(Error::Invalid("sample set is empty".into()));
    }
    let ops = pair_ops(model, o_local, j, k)?;
    let periph = peripheral_manifold(eig, opts);
    ensure_conditioned(eig, &periph)?;
    let stable = evaluate_manifold(eig, &ops, &periph, samples, opts)?;

    let (verdict, man, out) = if stable.synced.is_some() && stable.nonstationary > 0 {
        (Verdict::Stable, periph, stable)
    } else {
        match metastable_manifold(eig, opts) {
            Some(meta) if ensure_conditioned(eig, &meta).is_ok() => {
                let out = evaluate_manifold(eig, &ops, &meta, samples, opts)?;
                if out.synced.is_some() && out.nonstationary > 0 {
                    (Verdict::Metastable, meta, out)
                } else {
                    (Verdict::None, periph, stable)
                }
            }
            _ => (Verdict::None, periph, stable),
        }
    };
    let anti = out.synced == Some(-1.0);
    let robust = verdict != Verdict::None && out.operator_residual <= opts.tol && out.operator_oscillation > 1e-8;
    let lifetime = if man.stable { None } else { man.lifetime };
    let marginal = lifetime.is_some_and(|t| t / man.tau.max(1e-300) < 10.0);
    Ok(SyncReport {
        pair: (j, k),
        observable: label.to_string(),
        verdict,
        robust,
        anti,
        complete: None,
        evidence: SyncEvidence {
            pearson: out.pearson,
            pearson_window: out.window,
            frequencies: out.frequencies,
            transient_tau: man.tau,
            lifetime,
            marginal,
            uncontrolled: verdict == Verdict::Metastable && opts.controlled_by.is_none(),
            samples_total: samples.len(),
            samples_nonstationary: out.nonstationary,
            signal_residual: out.signal_residual,
            operator_residual: out.operator_residual,
            operator_oscillation: out.operator_oscillation,
        },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryCheck {
    pub omega: f64,
    /// `|tr(O_j A ρ∞)|`.
    pub overlap: f64,
    /// `‖[P, A]‖ / ‖A‖`.
    pub commutator: f64,
    /// `‖PAP + A‖ / ‖A‖`; zero when `A` is exchange-antisymmetric.
    pub anticommutator: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionChecklist {
    /// Slot (i): `‖[L, P·P]‖_F` (weak symmetry) or `‖L[1]‖_F` (unitality).
    pub slot1_residual: f64,
    pub slot1: bool,
    pub symmetries_found: usize,
    pub slot2: bool,
    pub slot3: bool,
    pub slot4: bool,
    /// Slot (iv) with the anti-synchronizing sign, `PAP = -A` for every `A`.
    pub slot4_anti: bool,
    pub per_symmetry: Vec<SymmetryCheck>,
    /// Largest `‖[A, P_{i,i+1}]‖ / ‖A‖` over adjacent pairs and symmetries (unital check only).
    pub translation_residual: Option<f64>,
    pub translation_invariant: Option<bool>,
    pub pass: bool,
    pub anti_pass: bool,
}

/// `‖[L, P(·)P]‖_F`, summed over matrix units.
pub fn weak_symmetry_residual(model: &LindbladModel, p: &Operator) -> f64 {
    let d = model.dim();
    let pm = p.matrix();
    let mut acc = 0.0;
    for b in 0..d {
        for a in 0..d {
            let mut e = CMat::zeros(d, d);
            e[(a, b)] = c(1.0, 0.0);
            let lhs = model.apply(&(pm * &e * pm.adjoint()));
            let rhs = pm * model.apply(&e) * pm.adjoint();
            acc += linalg::frob(&(lhs - rhs)).powi(2);
        }
    }
    acc.sqrt()
}

/// `P` as a superoperator, for callers that already hold assembled matrices.
pub fn exchange_superoperator(p: &Operator) -> Superoperator {
    Superoperator::conjugation(p.matrix())
}

fn paired_state(sym: &DynamicalSymmetry, stationary: &StationaryStates) -> Option<CMat> {
    match &sym.kind {
        SymmetryKind::Coherence { stationary, .. } => Some(stationary.matrix().clone()),
        SymmetryKind::Strong => stationary.mixture().map(|m| m.matrix().clone()),
    }
}

fn symmetry_checks(
    model: &LindbladModel,
    oj: &CMat,
    p: &Operator,
    search: &SymmetrySearch,
    stationary: &StationaryStates,
    tol: f64,
) -> Vec<SymmetryCheck> {
    let pm = p.matrix();
    search
        .nonzero(tol * model.scale())
        .map(|sym| {
            let a = sym.a.matrix();
            let na = linalg::frob(a).max(1e-300);
            let overlap = paired_state(sym, stationary).map_or(0.0, |r| (oj * a * r).trace().norm());
            let pap = pm * a * pm.adjoint();
            SymmetryCheck {
                omega: sym.omega,
                overlap,
                commutator: linalg::frob(&(&pap - a)) / na,
                anticommutator: linalg::frob(&(&pap + a)) / na,
            }
        })
        .collect()
}

fn finish_checklist(
    slot1_residual: f64,
    slot1: bool,
    per: Vec<SymmetryCheck>,
    tol: f64,
    translation_residual: Option<f64>,
) -> ConditionChecklist {
    let slot2 = !per.is_empty();
    let slot3 = per.iter().any(|s| s.overlap > tol);
    let slot4 = slot2 && per.iter().all(|s| s.commutator <= tol);
    let slot4_anti = slot2 && per.iter().all(|s| s.anticommutator <= tol);
    let translation_invariant = translation_residual.map(|r| r <= tol);
    ConditionChecklist {
        slot1_residual,
        slot1,
        symmetries_found: per.len(),
        slot2,
        slot3,
        slot4,
        slot4_anti,
        per_symmetry: per,
        translation_residual,
        translation_invariant,
        pass: slot1 && slot2 && slot3 && slot4,
        anti_pass: slot1 && slot2 && slot3 && slot4_anti,
    }
}

/// Weak-symmetry route: exchange symmetry of `L`, existence and overlap of
/// oscillating `A`, and exchange symmetry of every `A`.
pub fn check_weak_symmetry_conditions(
    model: &LindbladModel,
    o_local: &CMat,
    j: usize,
    k: usize,
    search: &SymmetrySearch,
    stationary: &StationaryStates,
    tol: f64,
) -> Result<ConditionChecklist> {
    let ops = pair_ops(model, o_local, j, k)?;
    let p = model.exchange_operator(j, k)?;
    let r = weak_symmetry_residual(model, &p);
    let scale = model.scale();
    let per = symmetry_checks(model, &ops.oj, &p, search, stationary, tol);
    Ok(finish_checklist(r, r <= tol * scale, per, tol, None))
}

/// Unital route, plus a translation-invariance scan over adjacent exchanges.
pub fn check_unital_conditions(
    model: &LindbladModel,
    o_local: &CMat,
    j: usize,
    k: usize,
    search: &SymmetrySearch,
    stationary: &StationaryStates,
    tol: f64,
) -> Result<ConditionChecklist> {
    let ops = pair_ops(model, o_local, j, k)?;
    let p = model.exchange_operator(j, k)?;
    let scale = model.scale();
    let unital = is_unital(model, tol * scale);
    let per = symmetry_checks(model, &ops.oj, &p, search, stationary, tol);
    let mut worst: f64 = 0.0;
    let n = model.space.n_sites();
    let dims = model.space.site_dims();
    for s in 0..n.saturating_sub(1) {
        if dims[s] != dims[s + 1] {
            worst = f64::INFINITY;
            continue;
        }
        let ps = model.exchange_operator(s, s + 1)?;
        for sym in search.nonzero(tol * scale) {
            let a = sym.a.matrix();
            worst = worst.max(linalg::frob(&linalg::commutator(a, ps.matrix())) / linalg::frob(a).max(1e-300));
        }
    }
    Ok(finish_checklist(unital.residual, unital.unital, per, tol, Some(worst)))
}

#[derive(Clone, Debug, Serialize)]
pub struct CompleteScan {
    pub complete: bool,
    pub nonstationary: usize,
    /// Indices into the generalized Gell-Mann basis that are non-stationary but not robustly synchronized.
    pub witnesses: Vec<usize>,
    pub residuals: Vec<f64>,
}

/// Robust synchronization of every non-stationary element of a Hermitian site basis.
pub fn complete_sync_scan(model: &LindbladModel, j: usize, k: usize, eig: &EigenSystem, tol: f64) -> Result<CompleteScan> {
    let dims = model.space.site_dims();
    if j >= dims.len() || k >= dims.len() || dims[j] != dims[k] {
        return Err(Error::Dimension(format!("invalid site pair ({j}, {k})")));
    }
    let opts = ClassifyOptions::default();
    let man = peripheral_manifold(eig, &opts);
    ensure_conditioned(eig, &man)?;
    let mut witnesses = Vec::new();
    let mut residuals = Vec::new();
    let mut nonstationary = 0;
    for (i, o) in gell_mann_basis(dims[j]).iter().enumerate() {
        let ops = pair_ops(model, o, j, k)?;
        let content = operator_content(eig, &ops, &man.modes);
        let osc = man
            .modes
            .iter()
            .zip(&content)
            .filter(|(&m, _)| is_oscillating(eig.eigenvalues[m], eig, opts.peripheral_tol))
            .map(|(_, (a, _, s))| a.norm() * s)
            .fold(0.0, f64::max);
        let res = operator_residual(&content, 1.0);
        residuals.push(res);
        if osc > 1e-8 {
            nonstationary += 1;
            if res > tol {
                witnesses.push(i);
            }
        }
    }
    Ok(CompleteScan { complete: nonstationary > 0 && witnesses.is_empty(), nonstationary, witnesses, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::model_eigensystem;
    use crate::models::{hubbard_model, spin1_pair_model, xxz_loss_model, HubbardParams, Spin1Params};
    use crate::operator::{fermion_operators, pauli_x, pauli_z, spin_matrices};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn grid(t1: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| t1 * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn pearson_trivial_signals() {
        let ts = grid(2.0 * PI, 2001);
        let s: Vec<f64> = ts.iter().map(|t| t.sin()).collect();
        let ms: Vec<f64> = s.iter().map(|x| -x).collect();
        let co: Vec<f64> = ts.iter().map(|t| t.cos()).collect();
        let one = vec![1.0; ts.len()];
        let w = 2.0 * PI;
        assert!((pearson_slices(&ts, &s, &s, 0.0, w).unwrap().unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson_slices(&ts, &s, &ms, 0.0, w).unwrap().unwrap() + 1.0).abs() < 1e-12);
        assert!(pearson_slices(&ts, &s, &co, 0.0, w).unwrap().unwrap().abs() < 1e-6);
        assert!(pearson_slices(&ts, &s, &one, 0.0, w).unwrap().is_none());
        assert!(pearson_slices(&ts, &s, &s, 1.0, w).is_err());
    }

    proptest! {
        #[test]
        fn pearson_is_affine_invariant(a in 0.1f64..5.0, b in -3.0f64..3.0, c in -5.0f64..-0.1, phase in 0.0f64..6.0) {
            let ts = grid(10.0, 801);
            let f: Vec<f64> = ts.iter().map(|t| (1.3 * t + phase).sin() + 0.4 * (0.7 * t).cos()).collect();
            let g: Vec<f64> = ts.iter().map(|t| (0.9 * t).cos() + 0.2 * t).collect();
            let base = pearson_slices(&ts, &f, &g, 1.0, 6.0).unwrap().unwrap();
            let fa: Vec<f64> = f.iter().map(|x| a * x + b).collect();
            let fc: Vec<f64> = f.iter().map(|x| c * x + b).collect();
            let r1 = pearson_slices(&ts, &fa, &g, 1.0, 6.0).unwrap().unwrap();
            let r2 = pearson_slices(&ts, &fc, &g, 1.0, 6.0).unwrap().unwrap();
            prop_assert!((r1 - base).abs() < 1e-10);
            prop_assert!((r2 + base).abs() < 1e-10);
            prop_assert!(base.abs() <= 1.0);
        }
    }

    #[test]
    fn xxz_sigma_x_is_robust_anti_sync() {
        let (m, _) = xxz_loss_model(1.0, 0.5, 2.0).unwrap();
        let eig = model_eigensystem(&m).unwrap();
        let samples = default_samples(&m.space, 1);
        let opts = ClassifyOptions::default();
        let r = classify_pair(&m, &pauli_x(), "sx", 1, 2, &eig, &samples, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Stable);
        assert!(r.robust && r.anti);
        assert!((r.evidence.pearson.unwrap() + 1.0).abs() < 1e-6);
        let z = classify_pair(&m, &pauli_z(), "sz", 1, 2, &eig, &samples, &opts).unwrap();
        assert_eq!(z.verdict, Verdict::None);
        // the lossy site never locks to the others
        let x01 = classify_pair(&m, &pauli_x(), "sx", 0, 1, &eig, &samples, &opts).unwrap();
        assert_eq!(x01.verdict, Verdict::None);
        let scan = complete_sync_scan(&m, 1, 2, &eig, 1e-6).unwrap();
        assert!(!scan.complete);
    }

    #[test]
    fn hubbard_spin_pair_is_complete() {
        let (m, _) = hubbard_model(&HubbardParams::uniform(2, 1.0, 0.3, 0.7, 0.4, 0.4, 0.3)).unwrap();
        let eig = model_eigensystem(&m).unwrap();
        let f = fermion_operators(2).unwrap();
        let hop = &f.c_dag(0) * f.c(1);
        let sx = (&hop + &hop.dagger()).into_matrix();
        let opts = ClassifyOptions::default();
        let r = classify_pair(&m, &sx, "sx", 0, 1, &eig, &default_samples(&m.space, 2), &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Stable);
        assert!(r.robust && !r.anti);
        let search = crate::spectral::find_dynamical_symmetries(&m, Some(&eig), 1e-8).unwrap();
        let st = crate::spectral::stationary_states(&eig, 1e-9).unwrap();
        assert!(check_weak_symmetry_conditions(&m, &sx, 0, 1, &search, &st, 1e-8).unwrap().pass);
        assert!(check_unital_conditions(&m, &sx, 0, 1, &search, &st, 1e-8).unwrap().pass);
        assert!(complete_sync_scan(&m, 0, 1, &eig, 1e-6).unwrap().complete);
    }

    #[test]
    fn pure_gain_is_not_robust() {
        let (m, _) = spin1_pair_model(&Spin1Params::pure_gain(1.0, 2.0, 0.3, 1.0, 2.0)).unwrap();
        let eig = model_eigensystem(&m).unwrap();
        let s = spin_matrices(1.0).unwrap();
        let r = classify_pair(&m, &s.z, "sz", 0, 1, &eig, &default_samples(&m.space, 1), &ClassifyOptions::default()).unwrap();
        assert!(!r.robust);
        assert_eq!(r.verdict, Verdict::None);
    }

    #[test]
    fn zeno_pair_is_metastable_only() {
        let (m, _) = spin1_pair_model(&Spin1Params::zeno(0.5, 1.5, 100.0, 0.0, 2.0)).unwrap();
        let eig = model_eigensystem(&m).unwrap();
        let s = spin_matrices(1.0).unwrap();
        let rho0 = DensityMatrix::basis_state(&m.space, &[1, 1]).unwrap();
        let r = classify_pair(&m, &s.z, "sz", 0, 1, &eig, &[rho0], &ClassifyOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Metastable);
        assert!(!r.robust);
        assert!(r.evidence.lifetime.unwrap() > 1e3);
        assert!(r.evidence.frequencies.iter().any(|w| (w.abs() - 17f64.sqrt()).abs() < 1e-6));
    }

    #[test]
    fn exchange_superoperator_is_an_involution() {
        let (m, _) = xxz_loss_model(1.0, 0.5, 2.0).unwrap();
        let p = m.exchange_operator(1, 2).unwrap();
        assert!(weak_symmetry_residual(&m, &p) < 1e-12);
        let p01 = m.exchange_operator(0, 1).unwrap();
        assert!(weak_symmetry_residual(&m, &p01) > 1e-3);
        let e = exchange_superoperator(&p);
        let sq = &e.matrix * &e.matrix;
        assert!((sq - CMat::identity(64, 64)).norm() < 1e-12);
    }
}
