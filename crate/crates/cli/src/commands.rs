use std::fs;
use std::path::{Path, PathBuf};

use liouville_sync::dynamics::{bloch_trajectory, expectation_series, propagate, uniform_grid, PropagateOptions};
use liouville_sync::liouvillian::{is_unital, model_eigensystem};
use liouville_sync::perturbation::{fit_expansion, geometric_grid, track_eigenvalue, zeno_analyze, ClassHint, LiouvillianFamily};
use liouville_sync::random::{random_density, random_pure_density};
use liouville_sync::spectral::{
    commutant, find_dynamical_symmetries, peripheral_spectrum, stationary_states, no_sync_certificate, SymmetryKind,
};
use liouville_sync::sync::{check_weak_symmetry_conditions, check_unital_conditions, classify_pair, complete_sync_scan, default_samples, ClassifyOptions};
use liouville_sync::{linalg, CMat, DensityMatrix, EigenSystem, LindbladModel, Operator, Tolerances, C64};
use log::info;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{local_operator, perturbed, Config, InitialState, ModelSpec, SweepSpec};
use crate::CliError;

const DEFAULT_SYMMETRY_TOL: f64 = 1e-8;
const STATIONARY_TOL: f64 = 1e-9;
const COMPLETE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Symmetries,
    Evolve,
    SyncReport,
    Sweep,
}

pub struct RunContext {
    pub out: PathBuf,
    pub seed: u64,
    /// Structural tolerance; `--tol` beats the config value.
    pub tol: f64,
}

impl RunContext {
    pub fn new(cfg: &Config, out: PathBuf, tol: Option<f64>, seed: Option<u64>) -> Result<Self, CliError> {
        let tol = tol.or(cfg.tol).unwrap_or(DEFAULT_SYMMETRY_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Schema(format!("tolerance must be positive, got {tol}")));
        }
        Ok(RunContext { out, seed: seed.unwrap_or(cfg.seed), tol })
    }
}

/// Runs one subcommand and returns the files it wrote.
pub fn run(cmd: Command, cfg: &Config, ctx: &RunContext) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(&ctx.out)?;
    let model = cfg.model.build(ctx.seed)?;
    info!("model {} on sites {:?}", model.label, model.space.site_dims());
    match cmd {
        Command::Spectrum => spectrum(&model, ctx),
        Command::Symmetries => symmetries(&model, ctx),
        Command::Evolve => evolve(&model, cfg, ctx),
        Command::SyncReport => sync_report(&model, cfg, ctx),
        Command::Sweep => sweep(&model, cfg, ctx),
    }
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn matrix_json(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect()).collect()
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<PathBuf, CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(path.to_path_buf())
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn eigensystem(model: &LindbladModel) -> Result<EigenSystem, CliError> {
    info!("diagonalizing a {0}x{0} generator", model.dim() * model.dim());
    Ok(model_eigensystem(model)?)
}

fn sorted_eigenvalues(eig: &EigenSystem) -> Vec<C64> {
    let mut vals = eig.algebraic_spectrum();
    vals.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    vals
}

fn spectrum(model: &LindbladModel, ctx: &RunContext) -> Result<Vec<PathBuf>, CliError> {
    let eig = eigensystem(model)?;
    let tols = Tolerances::default();
    let periph = peripheral_spectrum(&eig, tols.eigenvalue);
    let freq_tol = tols.eigenvalue * eig.scale;
    let mut peripheral = periph.eigenvalues();
    peripheral.sort_by(|a, b| a.im.total_cmp(&b.im));
    let stationary = stationary_states(&eig, STATIONARY_TOL)?;
    let unital = is_unital(model, ctx.tol * model.scale());
    let out = json!({
        "model": model.label,
        "site_dims": model.space.site_dims(),
        "liouville_dim": eig.dim() * eig.dim(),
        "scale": eig.scale,
        "overlap_condition": finite(eig.overlap_condition),
        "eigenvalues": sorted_eigenvalues(&eig).into_iter().map(pair).collect::<Vec<_>>(),
        "jordan_clusters": eig
            .clusters
            .iter()
            .filter(|cl| cl.defective)
            .map(|cl| json!({ "center": pair(cl.center), "algebraic": cl.algebraic_multiplicity, "geometric": cl.geometric_multiplicity }))
            .collect::<Vec<_>>(),
        "peripheral": peripheral.into_iter().map(pair).collect::<Vec<_>>(),
        "frequencies": periph.nonzero_frequencies(freq_tol),
        "commensurability": periph.commensurability,
        "unital": { "unital": unital.unital, "residual": unital.residual },
        "stationary": {
            "dimension": stationary.dimension(),
            "max_rank": stationary.max_rank,
            "faithful": stationary.is_faithful(model.dim()),
        },
        "tolerances": { "structural": ctx.tol, "eigenvalue": tols.eigenvalue, "rank": tols.rank, "stationary": STATIONARY_TOL },
    });
    Ok(vec![write_json(&ctx.out.join("spectrum.json"), &out)?])
}

fn symmetries(model: &LindbladModel, ctx: &RunContext) -> Result<Vec<PathBuf>, CliError> {
    let eig = eigensystem(model)?;
    let search = find_dynamical_symmetries(model, Some(&eig), ctx.tol)?;
    let comm = commutant(model, ctx.tol);
    let verdict = no_sync_certificate(model, Some(&eig), STATIONARY_TOL)?;
    let mut syms: Vec<Value> = search
        .symmetries
        .iter()
        .map(|s| {
            let kind = match &s.kind {
                SymmetryKind::Strong => "strong",
                SymmetryKind::Coherence { .. } => "coherence",
            };
            json!({
                "omega": s.omega,
                "kind": kind,
                "residual_h": s.residual_h,
                "residual_jumps": s.residual_jumps,
                "a": matrix_json(s.a.matrix()),
            })
        })
        .collect();
    syms.sort_by(|a, b| a["omega"].as_f64().unwrap_or(0.0).total_cmp(&b["omega"].as_f64().unwrap_or(0.0)));
    let mut warnings = Vec::new();
    if model.jumps.is_empty() {
        warnings.push(format!(
            "no jump operators: every operator commutes with the dissipator, the search covers a {}-dimensional commutant",
            search.jump_commutant_dim
        ));
    }
    let out = json!({
        "model": model.label,
        "tolerance": ctx.tol,
        "symmetries": syms,
        "jump_commutant_dim": search.jump_commutant_dim,
        "invariant_dim": search.invariant_dim,
        "invariance_defect": search.invariance_defect,
        "commutant_dim": comm.basis.len(),
        "commutant_trivial": comm.is_trivial,
        "no_sync_certificate": verdict,
        "warnings": warnings,
    });
    Ok(vec![write_json(&ctx.out.join("symmetries.json"), &out)?])
}

fn initial_state(model: &LindbladModel, init: &InitialState, seed: u64) -> Result<DensityMatrix, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = model.dim();
    let space = &model.space;
    match init {
        InitialState::RandomMixed => Ok(DensityMatrix::new(Operator::new(space.clone(), random_density(d, &mut rng))?, 1e-10)?),
        InitialState::RandomPure => Ok(DensityMatrix::new(Operator::new(space.clone(), random_pure_density(d, &mut rng))?, 1e-10)?),
        InitialState::Basis { digits } => Ok(DensityMatrix::basis_state(space, digits)?),
        InitialState::MaximallyMixed => Ok(DensityMatrix::maximally_mixed(space)),
        InitialState::Stationary => stationary_states(&eigensystem(model)?, STATIONARY_TOL)?
            .mixture()
            .ok_or_else(|| CliError::Numerical("no stationary density matrix found".into())),
    }
}

fn evolve(model: &LindbladModel, cfg: &Config, ctx: &RunContext) -> Result<Vec<PathBuf>, CliError> {
    let spec = cfg.evolve.as_ref().ok_or_else(|| CliError::Schema("evolve needs an [evolve] table".into()))?;
    if !(spec.t_end > 0.0 && spec.t_end.is_finite()) || spec.n_times < 2 {
        return Err(CliError::Schema("evolve needs t_end > 0 and n_times ≥ 2".into()));
    }
    let rho0 = initial_state(model, &spec.initial, ctx.seed)?;
    let times = uniform_grid(0.0, spec.t_end, spec.n_times);
    let opts = PropagateOptions { method: spec.method, ..PropagateOptions::default() };
    let traj = propagate(model, &rho0, &times, &opts)?;
    info!("propagated with {:?}", traj.method);

    let dims = model.space.site_dims();
    let mut header = vec!["t".to_string()];
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for obs in &spec.observables {
        let label = obs.label.clone().unwrap_or_else(|| obs.op.clone());
        for &site in &obs.sites {
            let d = *dims.get(site).ok_or_else(|| CliError::Schema(format!("observable site {site} out of range")))?;
            let local = local_operator(&obs.op, d)?;
            let hermitian = linalg::frob(&(&local - local.adjoint())) <= 1e-14;
            let op = liouville_sync::operator::embed_site_operator(&local, site, &model.space)?;
            let series = expectation_series(&traj, &op, label.clone(), Some(site))?;
            header.push(format!("{label}_{site}"));
            columns.push(series.values.iter().map(|z| z.re).collect());
            if !hermitian {
                header.push(format!("{label}_{site}_im"));
                columns.push(series.values.iter().map(|z| z.im).collect());
            }
        }
    }
    let mut written = Vec::new();
    let path = ctx.out.join("evolve.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(&header)?;
    for (i, t) in traj.times.iter().enumerate() {
        let mut row = vec![num(*t)];
        row.extend(columns.iter().map(|col| num(col[i])));
        w.write_record(&row)?;
    }
    w.flush()?;
    written.push(path);

    if !spec.bloch_sites.is_empty() {
        let path = ctx.out.join("bloch.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["site", "t", "ax", "ay", "az"])?;
        for &site in &spec.bloch_sites {
            let orbit = bloch_trajectory(&traj, site)?;
            for (t, a) in traj.times.iter().zip(&orbit) {
                w.write_record([site.to_string(), num(*t), num(a[0]), num(a[1]), num(a[2])])?;
            }
        }
        w.flush()?;
        written.push(path);
    }

    let meta = json!({
        "model": model.label,
        "seed": ctx.seed,
        "method": traj.method,
        "error_estimate": traj.error_estimate,
        "warnings": traj.warnings,
        "columns": header,
    });
    written.push(write_json(&ctx.out.join("evolve_meta.json"), &meta)?);
    Ok(written)
}

fn sync_report(model: &LindbladModel, cfg: &Config, ctx: &RunContext) -> Result<Vec<PathBuf>, CliError> {
    let spec = cfg.sync.as_ref().ok_or_else(|| CliError::Schema("sync-report needs a [sync] table".into()))?;
    let dims = model.space.site_dims().to_vec();
    let pairs: Vec<[usize; 2]> = match &spec.pairs {
        Some(p) => p.clone(),
        None => (0..dims.len())
            .flat_map(|j| ((j + 1)..dims.len()).map(move |k| [j, k]))
            .filter(|[j, k]| dims[*j] == dims[*k])
            .collect(),
    };
    if pairs.is_empty() {
        return Err(CliError::Schema("no site pairs of equal dimension to compare".into()));
    }
    let mut local: Option<CMat> = None;
    for &[j, k] in &pairs {
        if j == k || j >= dims.len() || k >= dims.len() || dims[j] != dims[k] {
            return Err(CliError::Schema(format!("invalid pair ({j}, {k}) for site dimensions {dims:?}")));
        }
        local.get_or_insert(local_operator(&spec.op, dims[j])?);
    }
    let local = local.expect("at least one pair");

    let eig = eigensystem(model)?;
    let search = find_dynamical_symmetries(model, Some(&eig), ctx.tol)?;
    let stationary = stationary_states(&eig, STATIONARY_TOL)?;
    let samples = default_samples(&model.space, ctx.seed);
    let opts = ClassifyOptions {
        tol: spec.tol.unwrap_or(ClassifyOptions::default().tol),
        tau: spec.tau,
        window: spec.window,
        controlled_by: spec.controlled_by.clone(),
        ..ClassifyOptions::default()
    };
    let mut entries = Vec::new();
    for &[j, k] in &pairs {
        info!("classifying pair ({j}, {k})");
        let report = classify_pair(model, &local, &spec.op, j, k, &eig, &samples, &opts)?;
        let weak = check_weak_symmetry_conditions(model, &local, j, k, &search, &stationary, ctx.tol)?;
        let unital_check = check_unital_conditions(model, &local, j, k, &search, &stationary, ctx.tol)?;
        let complete = complete_sync_scan(model, j, k, &eig, COMPLETE_TOL)?;
        entries.push(json!({
            "pair": [j, k],
            "report": report,
            "weak_symmetry_conditions": weak,
            "unital_conditions": unital_check,
            "complete_scan": complete,
        }));
    }
    let out = json!({
        "model": model.label,
        "observable": spec.op,
        "seed": ctx.seed,
        "options": opts,
        "pairs": entries,
    });
    Ok(vec![write_json(&ctx.out.join("sync_report.json"), &out)?])
}

fn family_model(spec: &ModelSpec, vary: &[crate::config::Vary], seed: u64, s: f64) -> liouville_sync::Result<LindbladModel> {
    let to_core = |e: CliError| match e {
        CliError::Numerical(m) => liouville_sync::Error::Numerical(m),
        other => liouville_sync::Error::Invalid(other.to_string()),
    };
    let varied = if vary.is_empty() { spec.clone() } else { spec.varied(vary, s).map_err(to_core)? };
    varied.build(seed).map_err(to_core)
}

fn sweep(model: &LindbladModel, cfg: &Config, ctx: &RunContext) -> Result<Vec<PathBuf>, CliError> {
    let spec = cfg.sweep.as_ref().ok_or_else(|| CliError::Schema("sweep needs a [sweep] table".into()))?;
    let seed = ctx.seed;
    match spec {
        SweepSpec::Track { lambda0, s_min, decades, per_decade, vary, perturbation } => {
            // surface config mistakes before the sweep starts
            if !vary.is_empty() {
                cfg.model.varied(vary, *s_min)?.build(seed)?;
            }
            perturbed(model, perturbation, 0.0)?;
            if !(*s_min > 0.0) || *decades == 0 || *per_decade == 0 {
                return Err(CliError::Schema("track needs s_min > 0, decades ≥ 1, per_decade ≥ 1".into()));
            }
            let (mspec, vary, pert) = (cfg.model.clone(), vary.clone(), perturbation.clone());
            let family = LiouvillianFamily::new("s", ClassHint::Unknown, move |s| {
                let m = family_model(&mspec, &vary, seed, s)?;
                perturbed(&m, &pert, s).map_err(|e| liouville_sync::Error::Invalid(e.to_string()))
            });
            let grid = geometric_grid(*s_min, *decades, *per_decade);
            let track = track_eigenvalue(&family, C64::new(lambda0[0], lambda0[1]), &grid)?;
            let path = ctx.out.join("track.csv");
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["s", "re", "im", "overlap_next", "scale"])?;
            for i in 0..track.s.len() {
                let ov = track.overlaps.get(i).map(|x| num(*x)).unwrap_or_default();
                w.write_record([num(track.s[i]), num(track.lambda[i].re), num(track.lambda[i].im), ov, num(track.scales[i])])?;
            }
            w.flush()?;
            let fit = fit_expansion(&track);
            let out = match &fit {
                Ok(f) => json!({ "cluster_size": track.cluster_size, "fit": f, "refused": Value::Null }),
                Err(e) => json!({ "cluster_size": track.cluster_size, "fit": Value::Null, "refused": e.to_string() }),
            };
            let written = vec![path, write_json(&ctx.out.join("fit.json"), &out)?];
            fit?;
            Ok(written)
        }
        SweepSpec::Zeno { grid, axis, target_frequency, vary } => {
            if vary.is_empty() {
                return Err(CliError::Schema("zeno sweep needs at least one varied parameter".into()));
            }
            cfg.model.varied(vary, grid.first().copied().unwrap_or(1.0))?.build(seed)?;
            let (mspec, vary) = (cfg.model.clone(), vary.clone());
            let family = LiouvillianFamily::new("gamma", ClassHint::Zeno, move |g| family_model(&mspec, &vary, seed, g));
            let fit = zeno_analyze(&family, grid, *axis, *target_frequency)?;
            let path = ctx.out.join("zeno.csv");
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["grid", "gamma", "frequency"])?;
            for ((x, g), f) in grid.iter().zip(&fit.gammas).zip(&fit.frequencies) {
                w.write_record([num(*x), num(*g), num(*f)])?;
            }
            w.flush()?;
            Ok(vec![path, write_json(&ctx.out.join("fit.json"), &fit)?])
        }
    }
}
