//! wasm-bindgen exports for the static demo page. Results are flat `f64`
//! arrays so they cross the boundary as `Float64Array`s.

use liouville_sync::dynamics::{bloch_trajectory, expectation_series, propagate, uniform_grid, PropagateOptions};
use liouville_sync::liouvillian::model_eigensystem;
use liouville_sync::models::xxz_loss_model;
use liouville_sync::operator::{embed_site_operator, pauli_x};
use liouville_sync::random::random_density;
use liouville_sync::{DensityMatrix, LindbladModel, Operator, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

fn js_err(e: liouville_sync::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn random_start(model: &LindbladModel, seed: u64) -> Result<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = random_density(model.dim(), &mut rng);
    DensityMatrix::new(Operator::new(model.space.clone(), m)?, 1e-10)
}

fn trajectory(delta: f64, b: f64, gamma: f64, t_end: f64, n: usize, seed: u64) -> Result<(LindbladModel, liouville_sync::dynamics::Trajectory)> {
    let (model, _) = xxz_loss_model(delta, b, gamma)?;
    let rho0 = random_start(&model, seed)?;
    let times = uniform_grid(0.0, t_end, n.max(2));
    let traj = propagate(&model, &rho0, &times, &PropagateOptions::default())?;
    Ok((model, traj))
}

/// `[t..., ⟨σx⟩ on site 0..., site 1..., site 2...]`, each block of length `n`.
pub fn sigma_x_signals(delta: f64, b: f64, gamma: f64, t_end: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    let (model, traj) = trajectory(delta, b, gamma, t_end, n, seed)?;
    let mut out = traj.times.clone();
    for site in 0..3 {
        let op = embed_site_operator(&pauli_x(), site, &model.space)?;
        out.extend(expectation_series(&traj, &op, "sx", Some(site))?.real());
    }
    Ok(out)
}

/// `[re, im, re, im, ...]` over all Liouvillian eigenvalues, algebraic multiplicity.
pub fn spectrum(delta: f64, b: f64, gamma: f64) -> Result<Vec<f64>> {
    let (model, _) = xxz_loss_model(delta, b, gamma)?;
    let eig = model_eigensystem(&model)?;
    Ok(eig.algebraic_spectrum().iter().flat_map(|z| [z.re, z.im]).collect())
}

/// `[x, y, z]` per time point for site 0, then site 1, then site 2.
pub fn bloch_orbits(delta: f64, b: f64, gamma: f64, t_end: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    let (_, traj) = trajectory(delta, b, gamma, t_end, n, seed)?;
    let mut out = Vec::with_capacity(9 * traj.times.len());
    for site in 0..3 {
        out.extend(bloch_trajectory(&traj, site)?.into_iter().flatten());
    }
    Ok(out)
}

#[wasm_bindgen(js_name = sigmaXSignals)]
pub fn sigma_x_signals_js(delta: f64, b: f64, gamma: f64, t_end: f64, n: usize, seed: u32) -> std::result::Result<Vec<f64>, JsError> {
    sigma_x_signals(delta, b, gamma, t_end, n, seed as u64).map_err(js_err)
}

#[wasm_bindgen(js_name = liouvillianSpectrum)]
pub fn spectrum_js(delta: f64, b: f64, gamma: f64) -> std::result::Result<Vec<f64>, JsError> {
    spectrum(delta, b, gamma).map_err(js_err)
}

#[wasm_bindgen(js_name = blochOrbits)]
pub fn bloch_orbits_js(delta: f64, b: f64, gamma: f64, t_end: f64, n: usize, seed: u32) -> std::result::Result<Vec<f64>, JsError> {
    bloch_orbits(delta, b, gamma, t_end, n, seed as u64).map_err(js_err)
}
