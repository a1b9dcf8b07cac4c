//! Peripheral spectrum, stationary states, dynamical symmetries and the
//! algebraic criteria for purely imaginary Liouvillian eigenvalues.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, C64, I, ZERO};
use crate::liouvillian::{is_unital, model_eigensystem, EigenSystem, LindbladModel};
use crate::operator::{DensityMatrix, Operator};

#[derive(Clone, Debug)]
pub struct PeripheralEntry {
    pub lambda: C64,
    /// Index into the eigensystem.
    pub index: usize,
    pub right: Operator,
    pub left: Operator,
}

#[derive(Clone, Debug, Serialize)]
pub struct FrequencyLattice {
    pub base: f64,
    /// `(frequency, integer multiple of base)`.
    pub members: Vec<(f64, i64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Commensurability {
    /// Groups of mutually commensurate nonzero frequencies.
    pub lattices: Vec<FrequencyLattice>,
    /// All nonzero frequencies lie on a single lattice.
    pub commensurate: bool,
}

#[derive(Clone, Debug)]
pub struct PeripheralSpectrum {
    pub entries: Vec<PeripheralEntry>,
    pub tol: f64,
    pub commensurability: Commensurability,
}

impl PeripheralSpectrum {
    /// Distinct imaginary parts with `|Im λ| > tol`, sorted.
    pub fn nonzero_frequencies(&self, tol: f64) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for e in &self.entries {
            let w = e.lambda.im;
            if w.abs() > tol && !out.iter().any(|x| (x - w).abs() <= tol) {
                out.push(w);
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        self.entries.iter().map(|e| e.lambda).collect()
    }
}

const MAX_DENOMINATOR: i64 = 12;
const RATIO_TOL: f64 = 1e-6;

/// Best rational approximation `p/q` with `q ≤ max_q` from continued-fraction
/// convergents, if one lies within `tol` of `x`.
pub fn rational_approximation(x: f64, max_q: i64, tol: f64) -> Option<(i64, i64)> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e12 {
            break;
        }
        let a = a as i64;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_q {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if ((h1 as f64) / (k1 as f64) - x).abs() <= tol {
            return Some((h1, k1));
        }
        let frac = r - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Groups frequencies into integer lattices `n * base`.
pub fn commensurability(freqs: &[f64], tol: f64) -> Commensurability {
    let mut remaining: Vec<f64> = freqs.iter().cloned().filter(|w| w.abs() > tol).collect();
    remaining.sort_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.total_cmp(b)));
    let mut lattices = Vec::new();
    while let Some(&first) = remaining.first() {
        let reference = first.abs();
        let mut members: Vec<(f64, i64, i64)> = Vec::new();
        let mut rest = Vec::new();
        for &w in &remaining {
            match rational_approximation(w / reference, MAX_DENOMINATOR, RATIO_TOL) {
                Some((p, q)) => members.push((w, p, q)),
                None => rest.push(w),
            }
        }
        let lcm = members.iter().fold(1i64, |acc, &(_, _, q)| acc / gcd(acc, q) * q);
        let base = reference / lcm as f64;
        lattices.push(FrequencyLattice {
            base,
            members: members.iter().map(|&(w, p, q)| (w, p * (lcm / q))).collect(),
        });
        remaining = rest;
    }
    let commensurate = lattices.len() <= 1;
    Commensurability { lattices, commensurate }
}

/// Eigenmodes with `|Re λ| ≤ tol * scale`, sorted by imaginary part.
pub fn peripheral_spectrum(eig: &EigenSystem, tol: f64) -> PeripheralSpectrum {
    let cut = tol * eig.scale;
    let mut idx: Vec<usize> = (0..eig.len()).filter(|&k| eig.eigenvalues[k].re.abs() <= cut).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].im.total_cmp(&eig.eigenvalues[b].im));
    let entries: Vec<PeripheralEntry> = idx
        .iter()
        .map(|&k| PeripheralEntry { lambda: eig.eigenvalues[k], index: k, right: eig.right(k), left: eig.left(k) })
        .collect();
    let freqs: Vec<f64> = entries.iter().map(|e| e.lambda.im).collect();
    let mut distinct: Vec<f64> = Vec::new();
    for w in freqs {
        if !distinct.iter().any(|x| (x - w).abs() <= 1e-9 * eig.scale) {
            distinct.push(w);
        }
    }
    PeripheralSpectrum { entries, tol, commensurability: commensurability(&distinct, 1e-9 * eig.scale) }
}

#[derive(Clone, Debug)]
pub struct StationaryStates {
    /// Hermitian basis of the null space, orthonormal in the Hilbert-Schmidt product.
    pub basis: Vec<Operator>,
    pub proper_ness: Vec<DensityMatrix>,
    /// Negative weight removed from each proper state before renormalization.
    pub clipping: Vec<f64>,
    pub max_rank: usize,
}

impl StationaryStates {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn is_faithful(&self, d: usize) -> bool {
        self.max_rank == d
    }

    /// Equal mixture of all proper states; it has the largest support.
    pub fn mixture(&self) -> Option<DensityMatrix> {
        let first = self.proper_ness.first()?;
        let mut acc = CMat::zeros(first.matrix().nrows(), first.matrix().ncols());
        for s in &self.proper_ness {
            acc += s.matrix();
        }
        acc /= c(self.proper_ness.len() as f64, 0.0);
        Some(DensityMatrix::new_unchecked(Operator::new(first.space().clone(), acc).ok()?))
    }
}

fn hermitian_real_basis(mats: &[CMat], drop_tol: f64) -> Vec<CMat> {
    // Gram-Schmidt over the reals on Hermitian parts, HS inner product Re Tr(A†B)
    let mut out: Vec<CMat> = Vec::new();
    let candidates = mats.iter().flat_map(|x| {
        let h1 = (x + x.adjoint()) * c(0.5, 0.0);
        let h2 = (x - x.adjoint()) * c(0.0, -0.5);
        [h1, h2]
    });
    for mut h in candidates {
        let n0 = linalg::frob(&h);
        if n0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in &out {
                let p = (q.adjoint() * &h).trace().re;
                h -= q * c(p, 0.0);
            }
        }
        let n1 = linalg::frob(&h);
        if n1 > drop_tol * n0.max(1.0) {
            out.push(h / c(n1, 0.0));
        }
    }
    out
}

/// Projector residual of `x` against the null modes of `eig`.
fn null_residual(eig: &EigenSystem, null: &[usize], x: &CMat) -> f64 {
    let v = linalg::vectorize(x);
    let mut proj = CVec::zeros(v.len());
    for &k in null {
        proj += eig.right_vec(k) * eig.left_vec(k).dotc(&v);
    }
    (v - proj).norm()
}

pub fn stationary_states(eig: &EigenSystem, tol: f64) -> Result<StationaryStates> {
    let d = eig.dim();
    let cut = tol.max(1e-9) * eig.scale;
    let null: Vec<usize> = (0..eig.len()).filter(|&k| eig.eigenvalues[k].norm() <= cut).collect();
    if null.is_empty() {
        return Err(Error::Numerical("the generator has no stationary state".into()));
    }
    let mats: Vec<CMat> = null.iter().map(|&k| eig.right_matrix(k)).collect();
    let basis = hermitian_real_basis(&mats, 1e-8);

    let accept = 1e-7;
    let mut proper: Vec<CMat> = Vec::new();
    let mut clipping = Vec::new();
    let push = |m: CMat, proper: &mut Vec<CMat>, clipping: &mut Vec<f64>| {
        let (ev, vecs) = linalg::hermitian_eigen(&m);
        let neg: f64 = ev.iter().filter(|&&x| x < 0.0).map(|x| -x).sum();
        let clipped: Vec<C64> = ev.iter().map(|&x| c(x.max(0.0), 0.0)).collect();
        let mut r = &vecs * CMat::from_diagonal(&CVec::from_vec(clipped)) * vecs.adjoint();
        let tr = r.trace().re;
        if tr <= 0.0 || neg > 1e-6 * tr {
            return;
        }
        r /= c(tr, 0.0);
        if null_residual(eig, &null, &r) > accept {
            return;
        }
        if proper.iter().any(|p| linalg::frob(&(p - &r)) < 1e-6) {
            return;
        }
        proper.push(r);
        clipping.push(neg / tr);
    };
    for x in &basis {
        let (ev, vecs) = linalg::hermitian_eigen(x);
        for sign in [1.0, -1.0] {
            let part: Vec<C64> = ev.iter().map(|&e| c((sign * e).max(0.0), 0.0)).collect();
            let m = &vecs * CMat::from_diagonal(&CVec::from_vec(part)) * vecs.adjoint();
            if m.trace().re > 1e-9 {
                push(m, &mut proper, &mut clipping);
            }
        }
    }
    if proper.is_empty() {
        return Err(Error::Numerical("no positive stationary state found in the null space".into()));
    }
    let mut mean = CMat::zeros(d, d);
    for p in &proper {
        mean += p;
    }
    let sv = linalg::singular_values(&(mean / c(proper.len() as f64, 0.0)));
    let rank_cut = 1e-10 * d as f64;
    let max_rank = sv.iter().filter(|&&s| s > rank_cut).count();
    let space = eig.space.clone();
    Ok(StationaryStates {
        basis: basis.into_iter().map(|m| Operator::new(space.clone(), m).expect("dim")).collect(),
        proper_ness: proper
            .into_iter()
            .map(|m| DensityMatrix::new_unchecked(Operator::new(space.clone(), m).expect("dim")))
            .collect(),
        clipping,
        max_rank,
    })
}

/// Completes a partial isometry (after normalizing its nonzero singular
/// values to one) to a unitary, using the unitary closest to the identity on
/// the orthogonal complements.
pub fn complete_to_unitary(a: &CMat, tol: f64) -> CMat {
    let d = a.nrows();
    let svd = nalgebra::SVD::new(a.clone(), true, true);
    let u = svd.u.expect("U");
    let v = svd.v_t.expect("V^T").adjoint();
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..d).filter(|&i| svd.singular_values[i] > tol * smax.max(1e-300)).collect();
    let rest: Vec<usize> = (0..d).filter(|i| !keep.contains(i)).collect();
    let pick = |m: &CMat, cols: &[usize]| {
        let mut out = CMat::zeros(d, cols.len());
        for (j, &i) in cols.iter().enumerate() {
            out.set_column(j, &m.column(i));
        }
        out
    };
    let (ur, vr) = (pick(&u, &keep), pick(&v, &keep));
    let mut out = &ur * vr.adjoint();
    if !rest.is_empty() {
        let (up, vp) = (pick(&u, &rest), pick(&v, &rest));
        let x = linalg::polar_unitary(&(up.adjoint() * &vp));
        out += &up * x * vp.adjoint();
    }
    out
}

/// `A` rescaled so its nonzero singular values are one.
pub fn partial_isometry(a: &CMat, tol: f64) -> CMat {
    let d = a.nrows();
    let svd = nalgebra::SVD::new(a.clone(), true, true);
    let u = svd.u.expect("U");
    let vt = svd.v_t.expect("V^T");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let mut out = CMat::zeros(d, d);
    for i in 0..svd.singular_values.len() {
        if svd.singular_values[i] > tol * smax {
            out += u.column(i) * vt.row(i);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct CoherenceModeReport {
    /// `‖[L_μ, A] ρ∞‖` per jump.
    pub jump_residuals: Vec<f64>,
    /// `‖(-i[H,A] - Σ[L_μ†,A]L_μ) ρ∞ - iλ A ρ∞‖`.
    pub eigen_residual: f64,
    pub unitarity_defect: f64,
    pub pass: bool,
}

pub fn check_coherence_mode(a: &Operator, rho_inf: &DensityMatrix, model: &LindbladModel, lambda: f64, tol: f64) -> CoherenceModeReport {
    let (a, r, h) = (a.matrix(), rho_inf.matrix(), model.hamiltonian.matrix());
    let scale = model.scale();
    let mut lhs = linalg::commutator(h, a) * (-I);
    let mut jump_residuals = Vec::new();
    for l in &model.jumps {
        let l = l.matrix();
        jump_residuals.push(linalg::frob(&(linalg::commutator(l, a) * r)));
        lhs -= linalg::commutator(&l.adjoint(), a) * l;
    }
    let eigen_residual = linalg::frob(&(lhs * r - a * r * c(0.0, lambda)));
    let d = a.nrows();
    let unitarity_defect = linalg::frob(&(a.adjoint() * a - CMat::identity(d, d)));
    let pass = jump_residuals.iter().all(|&x| x <= tol * scale) && eigen_residual <= tol * scale && unitarity_defect <= tol;
    CoherenceModeReport { jump_residuals, eigen_residual, unitarity_defect, pass }
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutationReport {
    /// `‖-i ρ∞ A†[H,A] ρ∞ - iλ ρ∞²‖`.
    pub hamiltonian_residual: f64,
    /// `‖ρ∞ A†[L_μ†,A] L_μ ρ∞‖` per jump.
    pub jump_residuals: Vec<f64>,
    /// `‖ρ∞ [L_μ†,A†] L_μ ρ∞‖` per jump.
    pub adjoint_jump_residuals: Vec<f64>,
    pub unitarity_defect: f64,
    pub pass: bool,
}

pub fn check_commutation_conditions(a: &Operator, rho_inf: &DensityMatrix, model: &LindbladModel, lambda: f64, tol: f64) -> CommutationReport {
    let (a, r, h) = (a.matrix(), rho_inf.matrix(), model.hamiltonian.matrix());
    let ad = a.adjoint();
    let scale = model.scale();
    let hamiltonian_residual =
        linalg::frob(&((r * &ad * linalg::commutator(h, a) * r) * (-I) - r * r * c(0.0, lambda)));
    let mut jump_residuals = Vec::new();
    let mut adjoint_jump_residuals = Vec::new();
    for l in &model.jumps {
        let l = l.matrix();
        let ld = l.adjoint();
        jump_residuals.push(linalg::frob(&(r * &ad * linalg::commutator(&ld, a) * l * r)));
        adjoint_jump_residuals.push(linalg::frob(&(r * linalg::commutator(&ld, &ad) * l * r)));
    }
    let d = a.nrows();
    let unitarity_defect = linalg::frob(&(&ad * a - CMat::identity(d, d)));
    let pass = hamiltonian_residual <= tol * scale
        && jump_residuals.iter().chain(&adjoint_jump_residuals).all(|&x| x <= tol * scale)
        && unitarity_defect <= tol;
    CommutationReport { hamiltonian_residual, jump_residuals, adjoint_jump_residuals, unitarity_defect, pass }
}

/// Rows computing `X ↦ [X, O]` for each `O`, stacked.
fn stacked_commutator_map(ops: &[CMat], d: usize) -> CMat {
    let id = CMat::identity(d, d);
    let mut out = CMat::zeros(ops.len() * d * d, d * d);
    for (i, o) in ops.iter().enumerate() {
        let block = linalg::kron(&o.transpose(), &id) - linalg::kron(&id, o);
        out.rows_mut(i * d * d, d * d).copy_from(&block);
    }
    out
}

fn ad_matrix(h: &CMat) -> CMat {
    let d = h.nrows();
    let id = CMat::identity(d, d);
    linalg::kron(&id, h) - linalg::kron(&h.transpose(), &id)
}

fn jump_ops(model: &LindbladModel) -> Vec<CMat> {
    model
        .jumps
        .iter()
        .flat_map(|l| [l.matrix().clone(), l.matrix().adjoint()])
        .collect()
}

#[derive(Clone, Debug)]
pub struct CommutantBasis {
    pub basis: Vec<Operator>,
    pub is_trivial: bool,
}

pub fn commutant(model: &LindbladModel, tol: f64) -> CommutantBasis {
    let d = model.dim();
    let mut ops = vec![model.hamiltonian.matrix().clone()];
    ops.extend(jump_ops(model));
    let ns = linalg::null_space(&stacked_commutator_map(&ops, d), tol * model.scale());
    let basis: Vec<Operator> = (0..ns.ncols())
        .map(|j| Operator::new(model.space.clone(), linalg::unvectorize(&ns.column(j).into_owned(), d)).expect("dim"))
        .collect();
    let is_trivial = basis.len() == 1;
    CommutantBasis { basis, is_trivial }
}

#[derive(Clone, Debug)]
pub enum SymmetryKind {
    /// `[H,A] = ωA` and `A` commutes with every jump operator and its adjoint.
    Strong,
    /// Unitary `A` with `L[Aρ∞] = -iω Aρ∞` for the given stationary state;
    /// `a` holds the partial isometry, `unitary` its completion.
    Coherence { stationary: DensityMatrix, unitary: Operator },
}

#[derive(Clone, Debug)]
pub struct DynamicalSymmetry {
    pub a: Operator,
    pub omega: f64,
    /// Strong: `‖[H,A] - ωA‖`. Coherence: the eigen-equation residual on `ρ∞`.
    pub residual_h: f64,
    /// Strong: `max ‖[L,A]‖, ‖[L†,A]‖`. Coherence: `max ‖[L,A]ρ∞‖`.
    pub residual_jumps: f64,
    pub kind: SymmetryKind,
}

impl DynamicalSymmetry {
    pub fn is_strong(&self) -> bool {
        matches!(self.kind, SymmetryKind::Strong)
    }
}

#[derive(Clone, Debug)]
pub struct SymmetrySearch {
    pub symmetries: Vec<DynamicalSymmetry>,
    /// Dimension of the joint commutant of the jump operators.
    pub jump_commutant_dim: usize,
    /// Dimension of its largest `ad_H`-invariant subspace.
    pub invariant_dim: usize,
    /// `‖(1 - P) ad_H P‖` on the raw jump commutant; zero when it is already invariant.
    pub invariance_defect: f64,
}

impl SymmetrySearch {
    pub fn nonzero(&self, tol: f64) -> impl Iterator<Item = &DynamicalSymmetry> {
        self.symmetries.iter().filter(move |s| s.omega.abs() > tol)
    }

    /// Largest fraction of `a`'s Hilbert-Schmidt weight captured by the span
    /// of found symmetries with frequency within `tol` of `omega`.
    pub fn captured_weight(&self, a: &CMat, omega: f64, tol: f64) -> f64 {
        let cols: Vec<CVec> = self
            .symmetries
            .iter()
            .filter(|s| (s.omega - omega).abs() <= tol)
            .map(|s| linalg::vectorize(s.a.matrix()))
            .collect();
        if cols.is_empty() {
            return 0.0;
        }
        let mut m = CMat::zeros(cols[0].len(), cols.len());
        for (j, v) in cols.iter().enumerate() {
            m.set_column(j, v);
        }
        let q = linalg::orthonormalize_columns(&m, 1e-10);
        let v = linalg::vectorize(a);
        let p = q.adjoint() * &v;
        p.norm_squared() / v.norm_squared()
    }
}

/// Strong dynamical symmetries from the `ad_H`-invariant part of the jump
/// commutant, plus oscillating coherences `Aρ∞` read off peripheral modes when
/// no faithful stationary state exists.
pub fn find_dynamical_symmetries(model: &LindbladModel, eig: Option<&EigenSystem>, tol: f64) -> Result<SymmetrySearch> {
    let d = model.dim();
    let scale = model.scale();
    let space = &model.space;
    let h = model.hamiltonian.matrix();
    let jumps = jump_ops(model);
    let ad_h = ad_matrix(h);

    let mut w = if jumps.is_empty() {
        CMat::identity(d * d, d * d)
    } else {
        linalg::null_space(&stacked_commutator_map(&jumps, d), tol * scale)
    };
    let jump_commutant_dim = w.ncols();
    let proj_defect = |w: &CMat| -> CMat {
        let img = &ad_h * w;
        &img - w * (w.adjoint() * &img)
    };
    let invariance_defect = if w.ncols() > 0 { linalg::spectral_norm(&proj_defect(&w)) } else { 0.0 };
    // shrink to the largest ad_H-invariant subspace
    for _ in 0..d * d {
        if w.ncols() == 0 {
            break;
        }
        let defect = proj_defect(&w);
        if linalg::spectral_norm(&defect) <= tol * scale {
            break;
        }
        let coeffs = linalg::null_space(&defect, tol * scale);
        if coeffs.ncols() == w.ncols() {
            break;
        }
        w = linalg::orthonormalize_columns(&(&w * coeffs), 1e-10);
    }
    let invariant_dim = w.ncols();

    let mut symmetries = Vec::new();
    if invariant_dim > 0 {
        let restricted = w.adjoint() * &ad_h * &w;
        let (omegas, vecs) = linalg::hermitian_eigen(&restricted);
        for (k, &omega) in omegas.iter().enumerate() {
            let av = &w * vecs.column(k);
            let a = linalg::unvectorize(&av, d);
            let residual_h = linalg::frob(&(linalg::commutator(h, &a) - &a * c(omega, 0.0)));
            let residual_jumps = jumps
                .iter()
                .map(|l| linalg::frob(&linalg::commutator(l, &a)))
                .fold(0.0, f64::max);
            if residual_h > 10.0 * tol * scale || residual_jumps > 10.0 * tol * scale {
                continue;
            }
            let omega = if omega.abs() <= tol * scale { 0.0 } else { omega };
            symmetries.push(DynamicalSymmetry {
                a: Operator::new(space.clone(), a)?,
                omega,
                residual_h,
                residual_jumps,
                kind: SymmetryKind::Strong,
            });
        }
    }

    // oscillating coherences when no faithful state exists
    let owned;
    let eig = match eig {
        Some(e) => e,
        None => {
            owned = model_eigensystem(model)?;
            &owned
        }
    };
    let stationary = stationary_states(eig, 1e-9)?;
    if !stationary.is_faithful(d) {
        let periph = peripheral_spectrum(eig, 1e-9);
        for entry in periph.entries.iter().filter(|e| e.lambda.im.abs() > 1e-9 * eig.scale) {
            if let Some(sym) = coherence_from_mode(model, entry.right.matrix(), entry.lambda, tol)? {
                let dup = symmetries.iter().any(|s: &DynamicalSymmetry| {
                    !s.is_strong()
                        && (s.omega - sym.omega).abs() <= 1e-8 * scale
                        && (s.a.matrix().adjoint() * sym.a.matrix()).trace().norm() > 1.0 - 1e-8
                });
                if !dup {
                    symmetries.push(sym);
                }
            }
        }
    }
    Ok(SymmetrySearch { symmetries, jump_commutant_dim, invariant_dim, invariance_defect })
}

fn coherence_from_mode(model: &LindbladModel, rho: &CMat, lambda: C64, tol: f64) -> Result<Option<DynamicalSymmetry>> {
    let scale = model.scale();
    let svd = nalgebra::SVD::new(rho.clone(), false, true);
    let vt = svd.v_t.expect("V^T");
    let sv = CVec::from_iterator(svd.singular_values.len(), svd.singular_values.iter().map(|&x| c(x, 0.0)));
    let modulus = vt.adjoint() * CMat::from_diagonal(&sv) * &vt;
    let tr = modulus.trace().re;
    if tr <= 0.0 {
        return Ok(None);
    }
    let rho_inf = &modulus / c(tr, 0.0);
    let stat_res = linalg::frob(&model.apply(&rho_inf));
    if stat_res > 1e-8 * scale {
        return Ok(None);
    }
    let a_iso = partial_isometry(rho, 1e-8);
    let unitary = complete_to_unitary(&a_iso, 1e-8);
    let omega = -lambda.im;
    let state = DensityMatrix::new_unchecked(Operator::new(model.space.clone(), rho_inf)?);
    let u_op = Operator::new(model.space.clone(), unitary)?;
    let report = check_coherence_mode(&u_op, &state, model, -omega, tol.max(1e-10));
    let residual_jumps = report.jump_residuals.iter().cloned().fold(0.0, f64::max);
    if report.eigen_residual > 1e-8 * scale || residual_jumps > 1e-8 * scale {
        return Ok(None);
    }
    // fix the global phase so the largest entry is real positive
    let mut a = a_iso;
    if let Some(big) = a.iter().cloned().max_by(|x, y| x.norm().total_cmp(&y.norm())) {
        if big.norm() > 0.0 {
            a *= big.conj() / big.norm();
        }
    }
    Ok(Some(DynamicalSymmetry {
        a: Operator::new(model.space.clone(), a)?,
        omega,
        residual_h: report.eigen_residual,
        residual_jumps,
        kind: SymmetryKind::Coherence { stationary: state, unitary: u_op },
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderResult {
    pub n: u32,
    pub m: u32,
    /// The ladder state `A^n ρ∞ (A†)^m` vanished.
    pub annihilated: bool,
    /// Rayleigh quotient `⟪ρ|L ρ⟫ / ⟪ρ|ρ⟫`.
    pub lambda: C64,
    /// `‖L ρ - λ ρ‖ / ‖ρ‖`.
    pub residual: f64,
    /// `-iω(n - m)`.
    pub predicted: C64,
    /// Measured `Im λ` has the sign of the prediction (true when both vanish).
    pub sign_matches: bool,
}

pub fn ladder_check(sym: &DynamicalSymmetry, rho_inf: &DensityMatrix, model: &LindbladModel, n: u32, m: u32) -> LadderResult {
    let a = sym.a.matrix();
    let mut state = rho_inf.matrix().clone();
    for _ in 0..n {
        state = a * state;
    }
    let ad = a.adjoint();
    for _ in 0..m {
        state = state * &ad;
    }
    let predicted = c(0.0, -sym.omega * (n as f64 - m as f64));
    let norm = linalg::frob(&state);
    let a_norm = linalg::spectral_norm(a).max(1.0);
    if norm <= 1e-12 * a_norm.powi((n + m) as i32) {
        return LadderResult { n, m, annihilated: true, lambda: ZERO, residual: 0.0, predicted, sign_matches: true };
    }
    let image = model.apply(&state);
    let lambda = (state.adjoint() * &image).trace() / c(norm * norm, 0.0);
    let residual = linalg::frob(&(image - &state * lambda)) / norm;
    let tiny = 1e-9 * model.scale();
    let sign_matches = if predicted.im.abs() <= tiny {
        lambda.im.abs() <= tiny
    } else {
        lambda.im.signum() == predicted.im.signum()
    };
    LadderResult { n, m, annihilated: false, lambda, residual, predicted, sign_matches }
}

/// `A' = ρ ρ̃∞⁻¹` for an eigenmode `ρ` and faithful stationary state `ρ̃∞`,
/// with the condition number of `ρ̃∞` (large values make the result unreliable).
pub fn extract_ladder_operator(rho: &CMat, faithful: &DensityMatrix) -> Result<(CMat, f64)> {
    let sv = linalg::singular_values(faithful.matrix());
    let cond = sv.first().copied().unwrap_or(0.0) / sv.last().copied().unwrap_or(0.0);
    let inv = faithful
        .matrix()
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("stationary state is not invertible".into()))?;
    Ok((rho * inv, cond))
}

#[derive(Clone, Debug, Serialize)]
pub struct NoSyncCertificate {
    pub no_sync_certified: bool,
    pub faithful_state: bool,
    pub unital: bool,
    pub commutant_dim: usize,
    /// Nonzero peripheral frequencies found in the spectrum, when it was checked.
    pub peripheral_frequencies: Option<Vec<f64>>,
    /// Spectrum agrees with the certificate (no certificate, or no nonzero frequencies).
    pub consistent: Option<bool>,
    pub witness: String,
}

pub fn no_sync_certificate(model: &LindbladModel, eig: Option<&EigenSystem>, tol: f64) -> Result<NoSyncCertificate> {
    let d = model.dim();
    let unital = is_unital(model, tol * model.scale()).unital;
    let comm = commutant(model, tol);
    let faithful = if unital {
        true
    } else {
        match eig {
            Some(e) => stationary_states(e, 1e-9)?.is_faithful(d),
            None => stationary_states(&model_eigensystem(model)?, 1e-9)?.is_faithful(d),
        }
    };
    let certified = faithful && comm.is_trivial;
    let witness = if certified {
        "faithful stationary state and commutant spanned by the identity".to_string()
    } else if !faithful {
        "no full-rank stationary state".to_string()
    } else {
        format!("commutant has dimension {}", comm.basis.len())
    };
    let (peripheral_frequencies, consistent) = match eig {
        Some(e) => {
            let f = peripheral_spectrum(e, 1e-9).nonzero_frequencies(1e-8 * e.scale.max(1.0));
            let ok = !certified || f.is_empty();
            (Some(f), Some(ok))
        }
        None => (None, None),
    };
    Ok(NoSyncCertificate {
        no_sync_certified: certified,
        faithful_state: faithful,
        unital,
        commutant_dim: comm.basis.len(),
        peripheral_frequencies,
        consistent,
        witness,
    })
}
