//! Seeded random matrices and states. Callers supply the generator so that
//! every sampled quantity is reproducible from an explicit seed.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::{c, CMat, CVec, C64};
use crate::liouvillian::LindbladModel;
use crate::operator::{HilbertSpace, Operator};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Ginibre matrix with standard complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    CMat::from_fn(d, d, |_, _| gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let g = random_matrix(d, rng);
    (&g + g.adjoint()) * c(0.5, 0.0)
}

/// Haar-random unit vector.
pub fn random_state_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVec {
    let v = CVec::from_fn(d, |_, _| gaussian(rng));
    let n = v.norm();
    v / c(n, 0.0)
}

/// Haar-random pure state `|ψ⟩⟨ψ|`.
pub fn random_pure_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let v = random_state_vector(d, rng);
    &v * v.adjoint()
}

/// Full-rank mixed state `G G† / Tr(G G†)` (Hilbert-Schmidt measure).
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let g = random_matrix(d, rng);
    let m = &g * g.adjoint();
    let tr = m.trace();
    m / tr
}

/// Generic model on `site_dims`: GUE-like Hamiltonian and `n_jumps` Ginibre
/// jump operators, both normalized by `√d`.
pub fn random_model<R: Rng + ?Sized>(site_dims: &[usize], n_jumps: usize, rng: &mut R) -> Result<LindbladModel> {
    let space = HilbertSpace::new(site_dims.to_vec())?;
    let d = space.total_dim();
    let norm = c(1.0 / (d as f64).sqrt(), 0.0);
    let h = Operator::new(space.clone(), random_hermitian(d, rng) * norm)?;
    let jumps = (0..n_jumps)
        .map(|_| Operator::new(space.clone(), random_matrix(d, rng) * norm))
        .collect::<Result<Vec<_>>>()?;
    LindbladModel::new(h, jumps, "random")
}
