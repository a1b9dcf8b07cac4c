#![allow(dead_code)]

use liouville_sync::dynamics::{heisenberg_evolve, propagate_integrator, propagate_spectral, MethodChoice, PropagateOptions};
use liouville_sync::liouvillian::{assemble, eigensystem};
use liouville_sync::random::{random_density, random_hermitian, random_model};
use liouville_sync::{DensityMatrix, LindbladModel, Operator, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SITE_LAYOUTS: [&[usize]; 5] = [&[2], &[3], &[2, 2], &[2, 3], &[3, 3]];

/// Worst-case defects of the structural invariants for one model.
#[derive(Debug, Clone, Copy)]
pub struct Invariants {
    pub trace: f64,
    /// `max Re λ / scale`.
    pub left_half_plane: f64,
    pub biorthonormality: f64,
    pub duality: f64,
    pub spectral_vs_integrator: f64,
    /// Largest distance from `λ̄` to its matched partner, over scale.
    pub conjugation: f64,
}

pub fn seeded_model(seed: u64) -> Result<LindbladModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = SITE_LAYOUTS[rng.random_range(0..SITE_LAYOUTS.len())];
    let n_jumps = rng.random_range(1..=3);
    random_model(dims, n_jumps, &mut rng)
}

fn conjugation_mismatch(vals: &[liouville_sync::C64]) -> f64 {
    let mut used = vec![false; vals.len()];
    let mut worst = 0.0f64;
    for v in vals {
        let target = v.conj();
        let (j, d) = vals
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, w)| (j, (w - target).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("unmatched eigenvalue");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

pub fn invariants(model: &LindbladModel, seed: u64) -> Result<Invariants> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let d = model.dim();
    let sup = assemble(model)?;
    let eig = eigensystem(&sup, &model.space)?;

    let rho0 = DensityMatrix::new(Operator::new(model.space.clone(), random_density(d, &mut rng))?, 1e-10)?;
    let o = Operator::new(model.space.clone(), random_hermitian(d, &mut rng))?;
    let times: Vec<f64> = (0..=8).map(|i| 0.25 * i as f64).collect();

    let mut trace = 0.0f64;
    for _ in 0..3 {
        let x = liouville_sync::random::random_matrix(d, &mut rng);
        trace = trace.max(sup.apply(&x).trace().norm() / x.norm());
    }

    let spec = propagate_spectral(&eig, &rho0, &times);
    let tight = PropagateOptions { method: MethodChoice::Integrator, rtol: 1e-12, atol: 1e-14 };
    let integ = propagate_integrator(model, &rho0, &times, &tight)?;
    trace = trace.max(spec.trace_drift()).max(integ.trace_drift());
    let spectral_vs_integrator = spec
        .states
        .iter()
        .zip(&integ.states)
        .map(|(a, b)| (a.matrix() - b.matrix()).norm())
        .fold(0.0, f64::max);

    let heis = heisenberg_evolve(model, &o, &times, &tight)?;
    let duality = spec
        .states
        .iter()
        .zip(&heis)
        .map(|(r, ot)| ((o.matrix() * r.matrix()).trace() - (ot.matrix() * rho0.matrix()).trace()).norm())
        .fold(0.0, f64::max);

    let left_half_plane = eig.eigenvalues.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max) / eig.scale;
    Ok(Invariants {
        trace,
        left_half_plane,
        biorthonormality: eig.biorthonormality_defect(),
        duality,
        spectral_vs_integrator,
        conjugation: conjugation_mismatch(&eig.eigenvalues) / eig.scale,
    })
}
