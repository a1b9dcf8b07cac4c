//! Eigenvalue branches of parameterized Liouvillian families, expansion fits
//! `λ(s) = iω + iλ₁s + λ₂s^{1+1/p}` and strong-dissipation frequency fits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, CMat, C64};
use crate::liouvillian::{model_eigensystem, EigenSystem, LindbladModel};

/// Consecutive eigenvector overlaps below this break the branch.
pub const OVERLAP_FLOOR: f64 = 0.7;
/// Largest `p` on the exponent lattice `1 + 1/p`.
pub const MAX_P: u32 = 6;
/// Continuous exponents further than this from the lattice are not snapped.
pub const SNAP_WINDOW: f64 = 0.15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassHint {
    UltraLow,
    Zeno,
    Dynamical,
    Unknown,
}

type Generator<'a> = Box<dyn Fn(f64) -> Result<LindbladModel> + Send + Sync + 'a>;

/// `s ↦ L(s)`.
pub struct LiouvillianFamily<'a> {
    pub parameter: String,
    pub hint: ClassHint,
    generator: Generator<'a>,
}

impl<'a> LiouvillianFamily<'a> {
    pub fn new(
        parameter: impl Into<String>,
        hint: ClassHint,
        generator: impl Fn(f64) -> Result<LindbladModel> + Send + Sync + 'a,
    ) -> Self {
        LiouvillianFamily { parameter: parameter.into(), hint, generator: Box::new(generator) }
    }

    pub fn model(&self, s: f64) -> Result<LindbladModel> {
        (self.generator)(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpansionFit {
    pub omega: f64,
    pub lambda1: f64,
    pub lambda2: C64,
    /// Fitted exponent of the decay, snapped to `1 + 1/p` when close.
    pub exponent: Option<f64>,
    /// Log-log slope before snapping.
    pub raw_exponent: Option<f64>,
    pub p: Option<u32>,
    pub residual: f64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenTrack {
    pub parameter: String,
    pub s: Vec<f64>,
    pub lambda: Vec<C64>,
    /// `overlaps[i]` links grid points `i` and `i + 1`.
    pub overlaps: Vec<f64>,
    /// Eigenvalue scale of each grid point's generator.
    pub scales: Vec<f64>,
    /// Size of the degenerate cluster the branch started in.
    pub cluster_size: usize,
    pub fit: Option<ExpansionFit>,
}

/// `[0, s_min, ..., s_min·10^decades]` with `per_decade` points per decade.
pub fn geometric_grid(s_min: f64, decades: usize, per_decade: usize) -> Vec<f64> {
    let n = decades * per_decade;
    std::iter::once(0.0)
        .chain((0..=n).map(|i| s_min * 10f64.powf(i as f64 / per_decade as f64)))
        .collect()
}

/// Default grid: 12 points per decade over two decades.
pub fn default_grid(s_min: f64) -> Vec<f64> {
    geometric_grid(s_min, 2, 12)
}

fn eigensystems(family: &LiouvillianFamily, grid: &[f64]) -> Result<Vec<EigenSystem>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        grid.par_iter().map(|&s| model_eigensystem(&family.model(s)?)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        grid.iter().map(|&s| model_eigensystem(&family.model(s)?)).collect()
    }
}

/// Orthonormal basis of the given columns.
fn orthonormal(cols: &[nalgebra::DVector<C64>]) -> CMat {
    let m = CMat::from_columns(cols);
    m.qr().q()
}

/// Picks the mode of `eig` best aligned with the subspace `q`; ties go to the
/// eigenvalue closest to `prev`.
fn best_match(eig: &EigenSystem, q: &CMat, prev: C64) -> (usize, f64) {
    let mut scored: Vec<(usize, f64)> = (0..eig.len())
        .map(|k| {
            let r = eig.right_columns().column(k);
            (k, (q.adjoint() * r).norm() / r.norm())
        })
        .collect();
    let best = scored.iter().map(|x| x.1).fold(0.0, f64::max);
    scored.retain(|x| x.1 >= best - 1e-3);
    let (k, ov) = scored
        .into_iter()
        .min_by(|a, b| (eig.eigenvalues[a.0] - prev).norm().total_cmp(&(eig.eigenvalues[b.0] - prev).norm()))
        .expect("nonempty spectrum");
    (k, ov)
}

fn follow(family: &LiouvillianFamily, lambda0: C64, grid: &[f64], cluster_tol: f64) -> Result<EigenTrack> {
    if grid.is_empty() {
        return Err(Error::Invalid("empty parameter grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Invalid("parameter grid must be strictly increasing".into()));
    }
    let systems = eigensystems(family, grid)?;
    let first = &systems[0];
    let (k0, d0) = first
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, l)| (k, (l - lambda0).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Invalid("empty spectrum".into()))?;
    if d0 > cluster_tol * first.scale {
        return Err(Error::Invalid(format!("{lambda0} is not an eigenvalue at s = {} (nearest at distance {d0:.3e})", grid[0])));
    }
    let start = first.eigenvalues[k0];
    let members: Vec<_> = (0..first.len())
        .filter(|&k| (first.eigenvalues[k] - start).norm() <= cluster_tol * first.scale)
        .map(|k| first.right_vec(k))
        .collect();
    let cluster_size = members.len();
    let mut q = orthonormal(&members);
    let mut track = EigenTrack {
        parameter: family.parameter.clone(),
        s: vec![grid[0]],
        lambda: vec![start],
        overlaps: Vec::new(),
        scales: vec![first.scale],
        cluster_size,
        fit: None,
    };
    for (i, eig) in systems.iter().enumerate().skip(1) {
        let prev = *track.lambda.last().expect("nonempty");
        let (k, ov) = best_match(eig, &q, prev);
        if ov < OVERLAP_FLOOR {
            return Err(Error::BranchBroken { s: grid[i], overlap: ov });
        }
        track.s.push(grid[i]);
        track.lambda.push(eig.eigenvalues[k]);
        track.overlaps.push(ov);
        track.scales.push(eig.scale);
        q = CMat::from_columns(&[eig.right_vec(k).normalize()]);
    }
    Ok(track)
}

/// Follows the branch through `lambda0` across a grid starting at `s = 0`.
/// A degenerate cluster at `s = 0` is matched as a subspace on the first step.
pub fn track_eigenvalue(family: &LiouvillianFamily, lambda0: C64, s_grid: &[f64]) -> Result<EigenTrack> {
    if s_grid.first() != Some(&0.0) {
        return Err(Error::Invalid("parameter grid must start at s = 0".into()));
    }
    let mut track = follow(family, lambda0, s_grid, 1e-7)?;
    track.fit = fit_expansion(&track).ok();
    Ok(track)
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

/// Least squares `y ≈ a·u + b·v`.
fn two_term_fit(u: &[f64], v: &[f64], y: &[f64]) -> (f64, f64) {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let (uu, uv, vv) = (dot(u, u), dot(u, v), dot(v, v));
    let (uy, vy) = (dot(u, y), dot(v, y));
    let det = uu * vv - uv * uv;
    if det.abs() <= 1e-14 * uu * vv {
        return (uy / uu, 0.0);
    }
    ((vv * uy - uv * vy) / det, (uu * vy - uv * uy) / det)
}

fn snap_exponent(e: f64) -> (f64, u32) {
    (1..=MAX_P)
        .map(|p| (1.0 + 1.0 / p as f64, p))
        .min_by(|a, b| (a.0 - e).abs().total_cmp(&(b.0 - e).abs()))
        .expect("nonempty lattice")
}

/// Fits `λ(s) = iω + iλ₁s + λ₂s^{1+1/p}` on the smallest decade of the track.
pub fn fit_expansion(track: &EigenTrack) -> Result<ExpansionFit> {
    if track.s.first() != Some(&0.0) || track.s.len() < 2 {
        return Err(Error::FitRefused("track must start at s = 0".into()));
    }
    let lam0 = track.lambda[0];
    let s_min = track.s[1];
    let idx: Vec<usize> = (1..track.s.len()).filter(|&i| track.s[i] <= 10.0 * s_min * (1.0 + 1e-9)).collect();
    if idx.len() < 8 {
        return Err(Error::FitRefused(format!("{} points in the smallest decade, need 8", idx.len())));
    }
    let s: Vec<f64> = idx.iter().map(|&i| track.s[i]).collect();
    let d: Vec<C64> = idx.iter().map(|&i| track.lambda[i] - lam0).collect();
    let scale = idx.iter().map(|&i| track.scales[i]).fold(1.0, f64::max);
    let mut warnings = Vec::new();

    let floor = 1e-13 * scale;
    let decay: Vec<f64> = d.iter().map(|z| -z.re).collect();
    if decay.iter().any(|&x| x < -floor) {
        return Err(Error::FitRefused("branch moves into the right half-plane (Re λ₂ > 0)".into()));
    }
    let mut raw_exponent = None;
    let (exponent, p) = if decay.iter().all(|&x| x <= floor) {
        warnings.push("branch stays undamped; no decay exponent".into());
        (None, None)
    } else if decay.iter().any(|&x| x <= floor) {
        return Err(Error::FitRefused("decay not resolved over the whole decade".into()));
    } else {
        let ls: Vec<f64> = s.iter().map(|x| x.ln()).collect();
        let ld: Vec<f64> = decay.iter().map(|x| x.ln()).collect();
        let (_, e) = linear_fit(&ls, &ld);
        let h = ls.len() / 2;
        let (_, e_lo) = linear_fit(&ls[..=h], &ld[..=h]);
        let (_, e_hi) = linear_fit(&ls[h..], &ld[h..]);
        if (e_lo - e_hi).abs() > 0.2 {
            return Err(Error::FitRefused(format!("log-log slope drifts from {e_lo:.3} to {e_hi:.3}; data not asymptotic")));
        }
        raw_exponent = Some(e);
        let (lattice, p) = snap_exponent(e);
        if (lattice - e).abs() <= SNAP_WINDOW {
            (Some(lattice), Some(p))
        } else {
            warnings.push(format!("exponent {e:.3} not within {SNAP_WINDOW} of 1 + 1/p"));
            (Some(e), None)
        }
    };

    let e = exponent.unwrap_or(2.0);
    let se: Vec<f64> = s.iter().map(|x| x.powf(e)).collect();
    let im: Vec<f64> = d.iter().map(|z| z.im).collect();
    let (lambda1, l2_im) = two_term_fit(&s, &se, &im);
    let re: Vec<f64> = d.iter().map(|z| z.re).collect();
    let l2_re = re.iter().zip(&se).map(|(a, b)| a * b).sum::<f64>() / se.iter().map(|b| b * b).sum::<f64>();
    if l2_re > floor {
        return Err(Error::FitRefused(format!("Re λ₂ = {l2_re:.3e} > 0")));
    }
    let lambda2 = c(l2_re, l2_im);
    let span = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let rms = (s
        .iter()
        .zip(&se)
        .zip(&d)
        .map(|((x, xe), z)| (c(0.0, lambda1 * x) + lambda2 * xe - z).norm_sqr())
        .sum::<f64>()
        / s.len() as f64)
        .sqrt();
    let residual = if span > 0.0 { rms / span } else { rms };
    Ok(ExpansionFit { omega: lam0.im, lambda1, lambda2, exponent, raw_exponent, p, residual, warnings })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZenoAxis {
    /// Grid values are the dissipation strength `γ`.
    Gamma,
    /// Grid values are a lattice depth `V₀`, mapped through `γ = exp(√V₀)`.
    Depth,
}

pub fn depth_to_gamma(v0: f64) -> f64 {
    v0.sqrt().exp()
}

#[derive(Clone, Debug, Serialize)]
pub struct ZenoFit {
    pub gammas: Vec<f64>,
    pub frequencies: Vec<f64>,
    /// Intercept `ω₀` of `ω(γ) = ω₀ + λ/γ`.
    pub omega0: f64,
    pub lambda: f64,
    pub residual: f64,
    /// Complex slope of `λ(γ) = iω₀ + λ₂/γ`, when eigenvalues are known.
    pub lambda2: Option<C64>,
    /// Log-log slope of `|λ(γ) - iω₀|` against `γ`.
    pub drift_exponent: Option<f64>,
    /// Log-log slope of `|ω(γ) - ω₀|` against `γ`, `ω₀` from a quadratic fit in `1/γ`.
    pub frequency_exponent: Option<f64>,
}

fn check_gamma_grid(gammas: &[f64]) -> Result<()> {
    if gammas.len() < 3 {
        return Err(Error::Invalid("need at least three dissipation strengths".into()));
    }
    if gammas.iter().any(|g| !(*g > 0.0 && g.is_finite())) || gammas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Invalid("dissipation grid must be positive and strictly increasing".into()));
    }
    if gammas[gammas.len() - 1] < 10.0 * gammas[0] * (1.0 - 1e-12) {
        return Err(Error::Invalid("dissipation grid must span at least one decade".into()));
    }
    Ok(())
}

/// Fits `ω(γ) = ω₀ + λ/γ` to measured frequencies.
pub fn fit_zeno_series(grid: &[f64], frequencies: &[f64], axis: ZenoAxis) -> Result<ZenoFit> {
    if grid.len() != frequencies.len() {
        return Err(Error::Dimension("grid and frequencies differ in length".into()));
    }
    if axis == ZenoAxis::Depth && grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Invalid("depth grid must be strictly increasing".into()));
    }
    let gammas: Vec<f64> = match axis {
        ZenoAxis::Gamma => grid.to_vec(),
        ZenoAxis::Depth => grid.iter().map(|&v| depth_to_gamma(v)).collect(),
    };
    check_gamma_grid(&gammas)?;
    let x: Vec<f64> = gammas.iter().map(|g| 1.0 / g).collect();
    let (omega0, lambda) = linear_fit(&x, frequencies);
    let rms = (x.iter().zip(frequencies).map(|(a, w)| (omega0 + lambda * a - w).powi(2)).sum::<f64>() / x.len() as f64).sqrt();

    let ones = vec![1.0; x.len()];
    let x2: Vec<f64> = x.iter().map(|a| a * a).collect();
    let frequency_exponent = quadratic_intercept(&ones, &x, &x2, frequencies).and_then(|w0| {
        let drift: Vec<f64> = frequencies.iter().map(|w| (w - w0).abs()).collect();
        loglog_slope(&gammas, &drift, 1e-13 * w0.abs().max(1.0))
    });
    Ok(ZenoFit {
        gammas,
        frequencies: frequencies.to_vec(),
        omega0,
        lambda,
        residual: rms,
        lambda2: None,
        drift_exponent: None,
        frequency_exponent,
    })
}

fn quadratic_intercept(a: &[f64], b: &[f64], cc: &[f64], y: &[f64]) -> Option<f64> {
    if y.len() < 4 {
        return None;
    }
    let m = nalgebra::DMatrix::from_fn(y.len(), 3, |i, j| [a[i], b[i], cc[i]][j]);
    let sol = m.svd(true, true).solve(&nalgebra::DVector::from_column_slice(y), 1e-14).ok()?;
    Some(sol[0])
}

fn loglog_slope(x: &[f64], y: &[f64], floor: f64) -> Option<f64> {
    if y.iter().any(|&v| v <= floor) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    Some(linear_fit(&lx, &ly).1)
}

/// Tracks the slow mode nearest `i·target_frequency` across a dissipation
/// grid and fits its frequency against `1/γ`.
pub fn zeno_analyze(family: &LiouvillianFamily, grid: &[f64], axis: ZenoAxis, target_frequency: f64) -> Result<ZenoFit> {
    let gammas: Vec<f64> = match axis {
        ZenoAxis::Gamma => grid.to_vec(),
        ZenoAxis::Depth => grid.iter().map(|&v| depth_to_gamma(v)).collect(),
    };
    check_gamma_grid(&gammas)?;
    let first = model_eigensystem(&family.model(gammas[0])?)?;
    let start = first
        .eigenvalues
        .iter()
        .copied()
        .min_by(|a, b| (a - c(0.0, target_frequency)).norm().total_cmp(&(b - c(0.0, target_frequency)).norm()))
        .ok_or_else(|| Error::Invalid("empty spectrum".into()))?;
    let track = follow(family, start, &gammas, 1e-12)?;
    let freqs: Vec<f64> = track.lambda.iter().map(|l| l.im).collect();
    let mut fit = fit_zeno_series(&gammas, &freqs, ZenoAxis::Gamma)?;

    let x: Vec<f64> = gammas.iter().map(|g| 1.0 / g).collect();
    let re: Vec<f64> = track.lambda.iter().map(|l| l.re).collect();
    let (re0, re_slope) = linear_fit(&x, &re);
    let _ = re0;
    fit.lambda2 = Some(c(re_slope, fit.lambda));
    let drift: Vec<f64> = track.lambda.iter().map(|l| (l - c(0.0, fit.omega0)).norm()).collect();
    let scale = track.scales.iter().fold(1.0, |a: f64, b| a.max(*b));
    fit.drift_exponent = loglog_slope(&gammas, &drift, 1e-15 * scale);
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{hubbard_model, spin1_pair_model, xxz_loss_model, HubbardParams, Spin1Params};
    use crate::operator::{embed_site_operator, pauli_x, pauli_z, HilbertSpace, Operator};

    fn qubit_family() -> LiouvillianFamily<'static> {
        LiouvillianFamily::new("s", ClassHint::Unknown, |s| {
            let space = HilbertSpace::qubits(1);
            let h = Operator::new(space, pauli_z() * c(0.5 * (1.0 + s), 0.0))?;
            LindbladModel::new(h, vec![], "qubit")
        })
    }

    #[test]
    fn unitary_scaling_branch() {
        // [σz/2, |0⟩⟨1|] = |0⟩⟨1|, so λ = -i(1+s) in the L[Aρ] = -iωAρ convention
        let grid = default_grid(1e-3);
        let t = track_eigenvalue(&qubit_family(), c(0.0, -1.0), &grid).unwrap();
        for (s, l) in t.s.iter().zip(&t.lambda) {
            assert!((l - c(0.0, -(1.0 + s))).norm() < 1e-12);
        }
        assert!(t.overlaps.iter().all(|&o| o > 1.0 - 1e-12));
        let fit = t.fit.unwrap();
        assert!((fit.omega + 1.0).abs() < 1e-12);
        assert!((fit.lambda1 + 1.0).abs() < 1e-9);
        assert!(fit.exponent.is_none() && fit.lambda2.norm() < 1e-6);
    }

    #[test]
    fn constant_family_is_flat() {
        let (m, _) = xxz_loss_model(1.0, 0.5, 2.0).unwrap();
        let fam = LiouvillianFamily::new("s", ClassHint::Unknown, move |_| Ok(m.clone()));
        let t = track_eigenvalue(&fam, c(0.0, 4.0), &default_grid(1e-2)).unwrap();
        assert!(t.lambda.iter().all(|l| (l - t.lambda[0]).norm() < 1e-9));
    }

    #[test]
    fn track_rejects_bad_input() {
        let fam = qubit_family();
        assert!(track_eigenvalue(&fam, c(0.0, 1.0), &[0.1, 0.2]).is_err());
        assert!(track_eigenvalue(&fam, c(0.0, 0.5), &default_grid(1e-3)).is_err());
        assert!(track_eigenvalue(&fam, c(0.0, 1.0), &[0.0, 0.2, 0.1]).is_err());
    }

    fn hubbard_detuning() -> LiouvillianFamily<'static> {
        LiouvillianFamily::new("s", ClassHint::Dynamical, |s| {
            let mut p = HubbardParams::uniform(2, 1.0, 0.3, 0.7, 0.4, 0.4, 0.3);
            p.b = vec![0.7 + s, 0.7 - s];
            Ok(hubbard_model(&p)?.0)
        })
    }

    #[test]
    fn antisymmetric_detuning_keeps_frequency() {
        let t = track_eigenvalue(&hubbard_detuning(), c(0.0, 0.7), &default_grid(1e-3)).unwrap();
        assert_eq!(t.cluster_size, 3);
        let fit = fit_expansion(&t).unwrap();
        assert!(fit.lambda1.abs() < 1e-6 * 0.7, "{fit:?}");
        assert_eq!(fit.p, Some(1));
        assert!(fit.lambda2.re < 0.0);
        assert!(t.lambda.iter().zip(&t.scales).all(|(l, sc)| l.re <= 1e-9 * sc));
    }

    #[test]
    fn conjugate_branch_gives_conjugate_fit() {
        let fam = hubbard_detuning();
        let grid = geometric_grid(1e-3, 1, 12);
        let a = fit_expansion(&track_eigenvalue(&fam, c(0.0, 0.7), &grid).unwrap()).unwrap();
        let b = fit_expansion(&track_eigenvalue(&fam, c(0.0, -0.7), &grid).unwrap()).unwrap();
        assert!((a.omega + b.omega).abs() < 1e-10);
        assert!((a.lambda1 + b.lambda1).abs() < 1e-6);
        assert_eq!(a.p, b.p);
        assert!((a.lambda2.re - b.lambda2.re).abs() < 1e-6 * a.lambda2.re.abs().max(1e-12));
    }

    #[test]
    fn hamiltonian_perturbation_decays_quadratically() {
        let fam = LiouvillianFamily::new("s", ClassHint::Dynamical, |s| {
            let (m, _) = xxz_loss_model(1.0, 0.5, 2.0)?;
            let space = m.space.clone();
            let v = embed_site_operator(&pauli_x(), 1, &space)?.into_matrix() + embed_site_operator(&pauli_x(), 2, &space)?.into_matrix();
            let h = Operator::new(space, m.hamiltonian.matrix() + v * c(s, 0.0))?;
            LindbladModel::new(h, m.jumps.clone(), "xxz+field")
        });
        let t = track_eigenvalue(&fam, c(0.0, 4.0), &default_grid(1e-3)).unwrap();
        let fit = fit_expansion(&t).unwrap();
        assert_eq!(fit.p, Some(1), "{fit:?}");
    }

    #[test]
    fn expansion_fit_refuses_short_tracks() {
        let t = EigenTrack {
            parameter: "s".into(),
            s: vec![0.0, 0.1, 0.2],
            lambda: vec![c(0.0, 1.0); 3],
            overlaps: vec![1.0; 2],
            scales: vec![1.0; 3],
            cluster_size: 1,
            fit: None,
        };
        assert!(matches!(fit_expansion(&t), Err(Error::FitRefused(_))));
    }

    #[test]
    fn synthetic_expansion_recovers_coefficients() {
        for p in 1..=MAX_P {
            let e = 1.0 + 1.0 / p as f64;
            let s = default_grid(1e-4);
            let lambda: Vec<C64> = s.iter().map(|&x| c(0.0, 2.0) + c(0.0, 0.3 * x) + c(-0.5, 0.2) * x.powf(e)).collect();
            let t = EigenTrack {
                parameter: "s".into(),
                overlaps: vec![1.0; s.len() - 1],
                scales: vec![1.0; s.len()],
                s,
                lambda,
                cluster_size: 1,
                fit: None,
            };
            let fit = fit_expansion(&t).unwrap();
            assert_eq!(fit.p, Some(p));
            assert!((fit.lambda1 - 0.3).abs() < 1e-8);
            assert!((fit.lambda2 - c(-0.5, 0.2)).norm() < 1e-6);
        }
    }

    #[test]
    fn depth_round_trip() {
        let v0: Vec<f64> = (0..12).map(|i| 4.0 + 2.0 * i as f64).collect();
        let w: Vec<f64> = v0.iter().map(|v| 1.0 + 0.5 * (-v.sqrt()).exp()).collect();
        let fit = fit_zeno_series(&v0, &w, ZenoAxis::Depth).unwrap();
        assert!((fit.omega0 - 1.0).abs() < 1e-2);
        assert!((fit.lambda - 0.5).abs() < 5e-3);
        assert!(fit_zeno_series(&[1.0, 2.0, 3.0], &[1.0; 3], ZenoAxis::Gamma).is_err());
    }

    fn zeno_family() -> LiouvillianFamily<'static> {
        LiouvillianFamily::new("gamma", ClassHint::Zeno, |g: f64| Ok(spin1_pair_model(&Spin1Params::zeno(0.5, 1.5, g.sqrt(), 0.0, 2.0))?.0))
    }

    #[test]
    fn zeno_drift_scales_inversely() {
        let grid: Vec<f64> = (0..7).map(|i| 50.0 * 2f64.powf(i as f64 * 4.0 / 6.0)).collect();
        let fit = zeno_analyze(&zeno_family(), &grid, ZenoAxis::Gamma, 17f64.sqrt()).unwrap();
        assert!((fit.omega0 - 17f64.sqrt()).abs() < 1e-4);
        let e = fit.drift_exponent.unwrap();
        assert!((e + 1.0).abs() < 0.1, "{e}");
    }

    #[test]
    fn pure_zeno_limit_has_no_drift() {
        // jumps commute with H: the slow frequencies are exactly those of H
        let fam = LiouvillianFamily::new("gamma", ClassHint::Zeno, |g: f64| {
            let space = HilbertSpace::qubits(2);
            let h = embed_site_operator(&pauli_z(), 0, &space)?.scale(c(0.5, 0.0));
            let l = embed_site_operator(&pauli_z(), 1, &space)?.scale(c(g.sqrt(), 0.0));
            LindbladModel::new(h, vec![l], "zeno-trivial")
        });
        let fit = zeno_analyze(&fam, &[10.0, 30.0, 100.0, 300.0], ZenoAxis::Gamma, 1.0).unwrap();
        assert!((fit.omega0.abs() - 1.0).abs() < 1e-10);
        assert!(fit.lambda.abs() < 1e-8);
    }
}
