//! Schrödinger- and Heisenberg-picture time evolution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, C64};
use crate::liouvillian::{assemble, model_eigensystem, EigenSystem, LindbladModel};
use crate::operator::{bloch_vector, partial_trace, DensityMatrix, Operator};

/// Eigenbases with a larger `overlap_condition` are not used for propagation.
pub const SPECTRAL_CONDITION_LIMIT: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Spectral,
    Integrator,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    #[default]
    Auto,
    Spectral,
    Integrator,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PropagateOptions {
    pub method: MethodChoice,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        PropagateOptions { method: MethodChoice::Auto, rtol: 1e-10, atol: 1e-12 }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub method: Method,
    /// Spectral: reconstruction error of `ρ0` in the eigenbasis. Integrator: largest accepted local error estimate.
    pub error_estimate: f64,
    pub warnings: Vec<String>,
}

impl Trajectory {
    /// Largest `|Tr ρ(t) - 1|` along the trajectory.
    pub fn trace_drift(&self) -> f64 {
        self.states.iter().map(|s| (s.matrix().trace() - c(1.0, 0.0)).norm()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.states.iter().map(|s| s.min_eigenvalue()).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    pub values: Vec<C64>,
    pub label: String,
    pub site: Option<usize>,
}

impl ObservableSeries {
    pub fn real(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn max_imaginary(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::Invalid("times must be finite and non-negative".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("times must be strictly increasing".into()));
    }
    Ok(())
}

fn to_state(model_space: &crate::HilbertSpace, v: &CVec, d: usize) -> DensityMatrix {
    let m = linalg::unvectorize(v, d);
    let herm = (&m + m.adjoint()) * c(0.5, 0.0);
    DensityMatrix::new_unchecked(Operator::new(model_space.clone(), herm).expect("dimension"))
}

/// `vec ρ(t)` from the eigen-expansion `Σ_k e^{tλ_k} ⟪σ_k|ρ0⟫ ρ_k`.
pub fn spectral_evolve(eig: &EigenSystem, v0: &CVec, t: f64) -> CVec {
    let coeffs = eig.left_columns().adjoint() * v0;
    let weighted = CVec::from_iterator(
        coeffs.len(),
        coeffs.iter().zip(&eig.eigenvalues).map(|(ck, lk)| ck * (lk * t).exp()),
    );
    eig.right_columns() * weighted
}

fn reconstruction_error(eig: &EigenSystem, v0: &CVec) -> f64 {
    (eig.right_columns() * (eig.left_columns().adjoint() * v0) - v0).norm()
}

/// Evolves `rho0` to every time in `times` (which must be increasing and start at or after zero).
pub fn propagate(model: &LindbladModel, rho0: &DensityMatrix, times: &[f64], opts: &PropagateOptions) -> Result<Trajectory> {
    check_times(times)?;
    if rho0.space() != &model.space {
        return Err(Error::Dimension("initial state lives on a different space".into()));
    }
    let mut warnings = Vec::new();
    let eig = match opts.method {
        MethodChoice::Integrator => None,
        _ => Some(model_eigensystem(model)?),
    };
    if let Some(eig) = eig {
        if eig.overlap_condition <= SPECTRAL_CONDITION_LIMIT {
            return Ok(propagate_spectral(&eig, rho0, times));
        }
        let msg = format!(
            "eigenbasis overlap condition {:.3e} exceeds {:.0e}; using the integrator",
            eig.overlap_condition, SPECTRAL_CONDITION_LIMIT
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let mut traj = propagate_integrator(model, rho0, times, opts)?;
    traj.warnings.extend(warnings);
    Ok(traj)
}

/// Spectral propagation with a precomputed eigensystem.
pub fn propagate_spectral(eig: &EigenSystem, rho0: &DensityMatrix, times: &[f64]) -> Trajectory {
    let d = eig.dim();
    let v0 = linalg::vectorize(rho0.matrix());
    let states = times.iter().map(|&t| to_state(&eig.space, &spectral_evolve(eig, &v0, t), d)).collect();
    Trajectory {
        times: times.to_vec(),
        states,
        method: Method::Spectral,
        error_estimate: reconstruction_error(eig, &v0),
        warnings: Vec::new(),
    }
}

pub fn propagate_integrator(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &PropagateOptions,
) -> Result<Trajectory> {
    check_times(times)?;
    let d = model.dim();
    let sup = assemble(model)?;
    let v0 = linalg::vectorize(rho0.matrix());
    let (vs, err) = integrate_linear(&sup.matrix, &v0, times, opts.rtol, opts.atol)?;
    let states = vs.iter().map(|v| to_state(&model.space, v, d)).collect();
    Ok(Trajectory { times: times.to_vec(), states, method: Method::Integrator, error_estimate: err, warnings: Vec::new() })
}

// Dormand-Prince 5(4) tableau.
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 5_000_000;

/// Adaptive Dormand-Prince integration of `dv/dt = M v` from `t = 0`, with
/// cubic Hermite interpolation onto the requested output times.
/// Returns the states and the largest accepted local error estimate.
pub fn integrate_linear(m: &CMat, v0: &CVec, times: &[f64], rtol: f64, atol: f64) -> Result<(Vec<CVec>, f64)> {
    check_times(times)?;
    if !(rtol > 0.0 && atol > 0.0) {
        return Err(Error::Invalid("integrator tolerances must be positive".into()));
    }
    let t_end = times.last().copied().unwrap_or(0.0);
    let mut out = Vec::with_capacity(times.len());
    let mut next = 0;
    while next < times.len() && times[next] == 0.0 {
        out.push(v0.clone());
        next += 1;
    }
    let mnorm = linalg::frob(m).max(1e-12);
    let mut h = (0.01 / mnorm).min(t_end.max(1e-300));
    let mut t = 0.0;
    let mut y = v0.clone();
    let mut f = m * &y;
    let mut worst: f64 = 0.0;
    let mut steps = 0;
    while next < times.len() {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::Numerical(format!("integrator exceeded {MAX_STEPS} steps at t = {t}")));
        }
        h = h.min(t_end - t);
        let mut k: Vec<CVec> = Vec::with_capacity(7);
        k.push(f.clone());
        for s in 1..7 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = DP_A[s][j];
                if a != 0.0 {
                    ys.axpy(c(h * a, 0.0), kj, c(1.0, 0.0));
                }
            }
            k.push(m * ys);
        }
        let mut y_new = y.clone();
        let mut err = CVec::zeros(y.len());
        for s in 0..7 {
            if DP_B[s] != 0.0 {
                y_new.axpy(c(h * DP_B[s], 0.0), &k[s], c(1.0, 0.0));
            }
            if DP_E[s] != 0.0 {
                err.axpy(c(h * DP_E[s], 0.0), &k[s], c(1.0, 0.0));
            }
        }
        let n = y.len() as f64;
        let en = (err
            .iter()
            .zip(y.iter().zip(y_new.iter()))
            .map(|(e, (a, b))| {
                let sc = atol + rtol * a.norm().max(b.norm());
                (e.norm() / sc).powi(2)
            })
            .sum::<f64>()
            / n)
            .sqrt();
        if en <= 1.0 || h <= 1e-14 * t.max(1.0) {
            let f_new = k[6].clone();
            let t_new = t + h;
            while next < times.len() && times[next] <= t_new * (1.0 + 1e-15) {
                let theta = ((times[next] - t) / h).clamp(0.0, 1.0);
                out.push(hermite(&y, &f, &y_new, &f_new, h, theta));
                next += 1;
            }
            worst = worst.max(err.norm());
            t = t_new;
            y = y_new;
            f = f_new;
            let grow = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            h *= grow;
        } else {
            h *= (0.9 * en.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
    Ok((out, worst))
}

fn hermite(y0: &CVec, f0: &CVec, y1: &CVec, f1: &CVec, h: f64, s: f64) -> CVec {
    let h00 = 2.0 * s.powi(3) - 3.0 * s * s + 1.0;
    let h10 = s.powi(3) - 2.0 * s * s + s;
    let h01 = -2.0 * s.powi(3) + 3.0 * s * s;
    let h11 = s.powi(3) - s * s;
    y0 * c(h00, 0.0) + f0 * c(h10 * h, 0.0) + y1 * c(h01, 0.0) + f1 * c(h11 * h, 0.0)
}

/// Heisenberg-picture observables `O(t) = e^{tL†}[O]`.
pub fn heisenberg_evolve(model: &LindbladModel, o: &Operator, times: &[f64], opts: &PropagateOptions) -> Result<Vec<Operator>> {
    check_times(times)?;
    if o.space() != &model.space {
        return Err(Error::Dimension("observable lives on a different space".into()));
    }
    let d = model.dim();
    let v0 = linalg::vectorize(o.matrix());
    let wrap = |v: &CVec| Operator::new(model.space.clone(), linalg::unvectorize(v, d)).expect("dimension");
    if opts.method != MethodChoice::Integrator {
        let eig = model_eigensystem(model)?;
        if eig.overlap_condition <= SPECTRAL_CONDITION_LIMIT {
            return Ok(times.iter().map(|&t| wrap(&heisenberg_spectral(&eig, &v0, t))).collect());
        }
        log::warn!("eigenbasis overlap condition {:.3e}; Heisenberg evolution uses the integrator", eig.overlap_condition);
    }
    let adj = assemble(model)?.dagger();
    let (vs, _) = integrate_linear(&adj.matrix, &v0, times, opts.rtol, opts.atol)?;
    Ok(vs.iter().map(wrap).collect())
}

/// `vec O(t) = Σ_k e^{tλ_k*} ⟪ρ_k|O⟫ σ_k`.
pub fn heisenberg_spectral(eig: &EigenSystem, v0: &CVec, t: f64) -> CVec {
    let coeffs = eig.right_columns().adjoint() * v0;
    let weighted = CVec::from_iterator(
        coeffs.len(),
        coeffs.iter().zip(&eig.eigenvalues).map(|(ck, lk)| ck * (lk.conj() * t).exp()),
    );
    eig.left_columns() * weighted
}

/// `Tr(O ρ(t))` along a trajectory.
pub fn expectation_series(traj: &Trajectory, o: &Operator, label: impl Into<String>, site: Option<usize>) -> Result<ObservableSeries> {
    if let Some(s) = traj.states.first() {
        if s.space() != o.space() {
            return Err(Error::Dimension("observable and trajectory spaces differ".into()));
        }
    }
    let values = traj.states.iter().map(|s| s.expectation(o)).collect();
    Ok(ObservableSeries { times: traj.times.clone(), values, label: label.into(), site })
}

/// Peripheral part of the evolved state, `Σ_{Re λ_k ≈ 0} e^{tλ_k} ⟪σ_k|ρ0⟫ ρ_k`.
pub fn asymptotic_state(eig: &EigenSystem, rho0: &DensityMatrix, tol: f64, t: f64) -> Result<DensityMatrix> {
    let modes: Vec<usize> = (0..eig.len()).filter(|&k| eig.eigenvalues[k].re.abs() <= tol * eig.scale).collect();
    let cond = eig.modes_condition(&modes);
    if cond > SPECTRAL_CONDITION_LIMIT {
        return Err(Error::Numerical(format!("peripheral modes have overlap condition {cond:.3e}")));
    }
    let v0 = linalg::vectorize(rho0.matrix());
    let mut v = CVec::zeros(v0.len());
    for k in modes {
        let ck = eig.left_columns().column(k).dotc(&v0);
        v.axpy(ck * (eig.eigenvalues[k] * t).exp(), &eig.right_columns().column(k), c(1.0, 0.0));
    }
    Ok(to_state(&eig.space, &v, eig.dim()))
}

/// Smallest `|Re λ|` among non-peripheral eigenvalues; `None` when every mode is peripheral.
pub fn spectral_gap(eig: &EigenSystem, tol: f64) -> Option<f64> {
    eig.eigenvalues
        .iter()
        .map(|z| -z.re)
        .filter(|&r| r > tol * eig.scale)
        .min_by(f64::total_cmp)
}

/// Default transient cutoff `τ = 10 / γ_gap` (zero without decaying modes).
pub fn transient_time(eig: &EigenSystem, tol: f64) -> f64 {
    spectral_gap(eig, tol).map_or(0.0, |g| 10.0 / g)
}

/// Bloch vectors of the reduced state of a qubit site.
pub fn bloch_trajectory(traj: &Trajectory, site: usize) -> Result<Vec<[f64; 3]>> {
    traj.states
        .iter()
        .map(|s| {
            let dims = s.space().site_dims();
            if site >= dims.len() || dims[site] != 2 {
                return Err(Error::Dimension(format!("site {site} is not a qubit")));
            }
            bloch_vector(&partial_trace(s, &[site])?)
        })
        .collect()
}

/// Evenly spaced grid `t0, t0+dt, …` with `n` points.
pub fn uniform_grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![t0];
    }
    (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{embed_site_operator, pauli_x, pauli_z, sigma_minus, HilbertSpace};
    use crate::random::{random_density, random_hermitian, random_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dephasing(g: f64) -> LindbladModel {
        let s = HilbertSpace::qubits(1);
        let l = Operator::new(s.clone(), pauli_z() * c(g, 0.0)).unwrap();
        LindbladModel::new(Operator::zeros(&s), vec![l], "dephasing").unwrap()
    }

    fn plus_state() -> DensityMatrix {
        let s = HilbertSpace::qubits(1);
        DensityMatrix::new(Operator::new(s, CMat::from_element(2, 2, c(0.5, 0.0))).unwrap(), 1e-12).unwrap()
    }

    fn random_model(rng: &mut ChaCha8Rng, dims: Vec<usize>, n_jumps: usize) -> LindbladModel {
        let space = HilbertSpace::new(dims).unwrap();
        let d = space.total_dim();
        let h = Operator::new(space.clone(), random_hermitian(d, rng)).unwrap();
        let jumps = (0..n_jumps)
            .map(|_| Operator::new(space.clone(), random_matrix(d, rng) * c(0.4, 0.0)).unwrap())
            .collect();
        LindbladModel::new(h, jumps, "random").unwrap()
    }

    #[test]
    fn zero_generator_is_constant() {
        let s = HilbertSpace::qubits(1);
        let m = LindbladModel::new(Operator::zeros(&s), vec![], "zero").unwrap();
        for method in [MethodChoice::Auto, MethodChoice::Integrator] {
            let opts = PropagateOptions { method, ..Default::default() };
            let tr = propagate(&m, &plus_state(), &[0.0, 1.0, 5.0], &opts).unwrap();
            for st in &tr.states {
                assert!(linalg::frob(&(st.matrix() - plus_state().matrix())) < 1e-12);
            }
        }
    }

    #[test]
    fn dephasing_coherence_decays_as_exp_minus_4t() {
        let m = dephasing(1.0);
        let times = uniform_grid(0.0, 2.0, 9);
        for method in [MethodChoice::Spectral, MethodChoice::Integrator] {
            let opts = PropagateOptions { method, ..Default::default() };
            let tr = propagate(&m, &plus_state(), &times, &opts).unwrap();
            for (t, st) in times.iter().zip(&tr.states) {
                let want = 0.5 * (-4.0 * t).exp();
                assert!((st.matrix()[(0, 1)].re - want).abs() < 1e-9, "{method:?} t={t}");
            }
            let sx = Operator::new(HilbertSpace::qubits(1), pauli_x()).unwrap();
            let series = expectation_series(&tr, &sx, "sx", Some(0)).unwrap();
            assert!((series.values[4].re - (-4.0 * times[4]).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn spectral_and_integrator_agree_on_random_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let times = uniform_grid(0.0, 3.0, 7);
        for dims in [vec![2, 2], vec![3], vec![2, 3]] {
            let m = random_model(&mut rng, dims, 2);
            let rho0 = DensityMatrix::new_unchecked(Operator::new(m.space.clone(), random_density(m.dim(), &mut rng)).unwrap());
            let a = propagate(&m, &rho0, &times, &PropagateOptions { method: MethodChoice::Spectral, ..Default::default() }).unwrap();
            let b = propagate(&m, &rho0, &times, &PropagateOptions { method: MethodChoice::Integrator, ..Default::default() }).unwrap();
            assert_eq!(a.method, Method::Spectral);
            for (x, y) in a.states.iter().zip(&b.states) {
                assert!(linalg::frob(&(x.matrix() - y.matrix())) < 1e-8);
            }
            assert!(a.trace_drift() < 1e-10 && b.trace_drift() < 1e-10);
            assert!(b.min_eigenvalue() > -1e-7);
        }
    }

    #[test]
    fn semigroup_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = random_model(&mut rng, vec![2, 2], 2);
        let rho0 = DensityMatrix::new_unchecked(Operator::new(m.space.clone(), random_density(4, &mut rng)).unwrap());
        let opts = PropagateOptions::default();
        let direct = propagate(&m, &rho0, &[1.7], &opts).unwrap();
        let half = propagate(&m, &rho0, &[0.6], &opts).unwrap();
        let rest = propagate(&m, &half.states[0], &[1.1], &opts).unwrap();
        assert!(linalg::frob(&(direct.states[0].matrix() - rest.states[0].matrix())) < 1e-8);
    }

    #[test]
    fn heisenberg_duality() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let m = random_model(&mut rng, vec![2, 2], 2);
        let o = Operator::new(m.space.clone(), random_hermitian(4, &mut rng)).unwrap();
        let rho0 = DensityMatrix::new_unchecked(Operator::new(m.space.clone(), random_density(4, &mut rng)).unwrap());
        let times = [0.0, 0.5, 2.0];
        for method in [MethodChoice::Spectral, MethodChoice::Integrator] {
            let opts = PropagateOptions { method, ..Default::default() };
            let ot = heisenberg_evolve(&m, &o, &times, &opts).unwrap();
            let tr = propagate(&m, &rho0, &times, &opts).unwrap();
            for (otk, st) in ot.iter().zip(&tr.states) {
                let lhs = rho0.expectation(otk);
                let rhs = st.expectation(&o);
                assert!((lhs - rhs).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn closed_system_heisenberg_is_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let s = HilbertSpace::qubits(2);
        let h = random_hermitian(4, &mut rng);
        let m = LindbladModel::new(Operator::new(s.clone(), h.clone()).unwrap(), vec![], "closed").unwrap();
        let o = Operator::new(s.clone(), random_hermitian(4, &mut rng)).unwrap();
        let t = 0.7;
        let ot = heisenberg_evolve(&m, &o, &[t], &PropagateOptions::default()).unwrap();
        let (ev, v) = linalg::hermitian_eigen(&h);
        let u = &v * CMat::from_diagonal(&CVec::from_iterator(4, ev.iter().map(|e| c(0.0, e * t).exp()))) * v.adjoint();
        let want = &u * o.matrix() * u.adjoint();
        assert!(linalg::frob(&(ot[0].matrix() - want)) < 1e-9);
    }

    #[test]
    fn asymptotic_state_of_unique_ness_is_constant() {
        let s = HilbertSpace::qubits(1);
        let l = Operator::new(s.clone(), sigma_minus()).unwrap();
        let h = Operator::new(s.clone(), pauli_x() * c(0.3, 0.0)).unwrap();
        let m = LindbladModel::new(h, vec![l], "driven decay").unwrap();
        let eig = model_eigensystem(&m).unwrap();
        let a = asymptotic_state(&eig, &plus_state(), 1e-9, 0.0).unwrap();
        let b = asymptotic_state(&eig, &plus_state(), 1e-9, 10.0).unwrap();
        assert!(linalg::frob(&(a.matrix() - b.matrix())) < 1e-12);
        assert!(linalg::frob(&m.apply(a.matrix())) < 1e-10);
        let tau = transient_time(&eig, 1e-9);
        let late = propagate(&m, &plus_state(), &[tau], &PropagateOptions::default()).unwrap();
        assert!(linalg::frob(&(late.states[0].matrix() - a.matrix())) < 1e-4);
    }

    #[test]
    fn bloch_trajectory_of_product_steady_state() {
        let s = HilbertSpace::qubits(2);
        let l = embed_site_operator(&sigma_minus(), 0, &s).unwrap();
        let h = embed_site_operator(&pauli_z(), 1, &s).unwrap();
        let m = LindbladModel::new(h, vec![l], "decay").unwrap();
        let rho0 = DensityMatrix::basis_state(&s, &[1, 1]).unwrap();
        let tr = propagate(&m, &rho0, &[0.0, 1.0, 2.0], &PropagateOptions::default()).unwrap();
        for a in bloch_trajectory(&tr, 0).unwrap() {
            assert!((a[2] + 1.0).abs() < 1e-12 && a[0].abs() < 1e-12);
        }
        let qutrit = HilbertSpace::new(vec![3]).unwrap();
        let m3 = LindbladModel::new(Operator::zeros(&qutrit), vec![], "q").unwrap();
        let tr3 = propagate(&m3, &DensityMatrix::maximally_mixed(&qutrit), &[0.0], &PropagateOptions::default()).unwrap();
        assert!(bloch_trajectory(&tr3, 0).is_err());
    }

    #[test]
    fn rejects_bad_grids() {
        let m = dephasing(1.0);
        let opts = PropagateOptions::default();
        assert!(propagate(&m, &plus_state(), &[1.0, 0.5], &opts).is_err());
        assert!(propagate(&m, &plus_state(), &[f64::NAN], &opts).is_err());
    }
}
