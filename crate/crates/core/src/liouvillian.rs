//! Lindblad generators as matrices on column-stacked operator space.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, C64, I};
use crate::operator::{fermionic_swap, HilbertSpace, Operator, SitePermutation};

/// Largest Hilbert dimension for which a dense superoperator is formed.
pub const MAX_HILBERT_DIM: usize = 64;

/// How two sites are exchanged when testing synchronization between them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExchangeKind {
    /// Plain tensor-factor swap.
    Tensor,
    /// Jordan-Wigner fermions, `modes_per_site` modes per site.
    Fermionic { modes_per_site: usize },
}

#[derive(Clone, Debug)]
pub struct LindbladModel {
    pub space: HilbertSpace,
    pub hamiltonian: Operator,
    pub jumps: Vec<Operator>,
    pub label: String,
    pub exchange: ExchangeKind,
}

impl LindbladModel {
    pub fn new(hamiltonian: Operator, jumps: Vec<Operator>, label: impl Into<String>) -> Result<Self> {
        let space = hamiltonian.space().clone();
        let hn = hamiltonian.norm().max(1.0);
        let defect = hamiltonian.hermiticity_defect();
        if defect > 1e-12 * hn {
            return Err(Error::Invalid(format!("Hamiltonian is not Hermitian (defect {defect:.3e})")));
        }
        if let Some(bad) = jumps.iter().position(|l| l.space() != &space) {
            return Err(Error::Dimension(format!("jump operator {bad} lives on a different space")));
        }
        Ok(LindbladModel {
            space,
            hamiltonian: hamiltonian.checked(1e-12 * hn),
            jumps,
            label: label.into(),
            exchange: ExchangeKind::Tensor,
        })
    }

    pub fn with_exchange(mut self, exchange: ExchangeKind) -> Self {
        self.exchange = exchange;
        self
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    /// `max(‖H‖₂, max ‖L‖₂², 1)`; the unit for relative tolerances.
    pub fn scale(&self) -> f64 {
        let h = linalg::spectral_norm(self.hamiltonian.matrix());
        let l = self
            .jumps
            .iter()
            .map(|j| linalg::spectral_norm(j.matrix()).powi(2))
            .fold(0.0, f64::max);
        h.max(l).max(1.0)
    }

    /// Direct evaluation of `L[ρ]`.
    pub fn apply(&self, rho: &CMat) -> CMat {
        let h = self.hamiltonian.matrix();
        let mut out = (h * rho - rho * h) * (-I);
        for l in &self.jumps {
            let l = l.matrix();
            let ld = l.adjoint();
            let k = &ld * l;
            out += (l * rho * &ld) * c(2.0, 0.0) - &k * rho - rho * &k;
        }
        out
    }

    /// Direct evaluation of the Heisenberg generator `L†[O]`.
    pub fn apply_adjoint(&self, o: &CMat) -> CMat {
        let h = self.hamiltonian.matrix();
        let mut out = (h * o - o * h) * I;
        for l in &self.jumps {
            let l = l.matrix();
            let ld = l.adjoint();
            let k = &ld * l;
            out += (&ld * o * l) * c(2.0, 0.0) - &k * o - o * &k;
        }
        out
    }

    /// Operator realizing the exchange of sites `j` and `k` for this model.
    pub fn exchange_operator(&self, j: usize, k: usize) -> Result<Operator> {
        match self.exchange {
            ExchangeKind::Tensor => Ok(SitePermutation::new(&self.space, j, k)?.operator()),
            ExchangeKind::Fermionic { modes_per_site } => fermionic_swap(&self.space, modes_per_site, j, k),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Vectorization {
    ColumnStacking,
}

#[derive(Clone, Debug)]
pub struct Superoperator {
    pub hilbert_dim: usize,
    pub matrix: CMat,
    pub vectorization: Vectorization,
}

impl Superoperator {
    pub fn apply(&self, x: &CMat) -> CMat {
        assert_eq!(self.vectorization, Vectorization::ColumnStacking);
        let v = &self.matrix * linalg::vectorize(x);
        linalg::unvectorize(&v, self.hilbert_dim)
    }

    /// Conjugate transpose, i.e. the adjoint under the trace pairing.
    pub fn dagger(&self) -> Superoperator {
        Superoperator { hilbert_dim: self.hilbert_dim, matrix: self.matrix.adjoint(), vectorization: self.vectorization }
    }

    /// `X ↦ U X U†` for a unitary `U`.
    pub fn conjugation(u: &CMat) -> Superoperator {
        Superoperator {
            hilbert_dim: u.nrows(),
            matrix: linalg::kron(&u.conjugate(), u),
            vectorization: Vectorization::ColumnStacking,
        }
    }
}

fn check_size(model: &LindbladModel) -> Result<usize> {
    let d = model.dim();
    if d > MAX_HILBERT_DIM {
        return Err(Error::Invalid(format!(
            "Hilbert dimension {d} exceeds the dense superoperator cap {MAX_HILBERT_DIM}"
        )));
    }
    if d > 16 {
        log::warn!("forming a dense {0}x{0} superoperator", d * d);
    }
    Ok(d)
}

pub fn assemble(model: &LindbladModel) -> Result<Superoperator> {
    let d = check_size(model)?;
    let id = CMat::identity(d, d);
    let h = model.hamiltonian.matrix();
    let mut m = (linalg::kron(&id, h) - linalg::kron(&h.transpose(), &id)) * (-I);
    for l in &model.jumps {
        let l = l.matrix();
        let k = l.adjoint() * l;
        m += linalg::kron(&l.conjugate(), l) * c(2.0, 0.0);
        m -= linalg::kron(&id, &k);
        m -= linalg::kron(&k.transpose(), &id);
    }
    Ok(Superoperator { hilbert_dim: d, matrix: m, vectorization: Vectorization::ColumnStacking })
}

pub fn adjoint(model: &LindbladModel) -> Result<Superoperator> {
    Ok(assemble(model)?.dagger())
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitalityReport {
    pub unital: bool,
    /// `‖L[1]‖_F`.
    pub residual: f64,
}

pub fn is_unital(model: &LindbladModel, tol: f64) -> UnitalityReport {
    let d = model.dim();
    let residual = linalg::frob(&model.apply(&CMat::identity(d, d)));
    UnitalityReport { unital: residual <= tol, residual }
}

pub use crate::linalg::ClusterInfo;

/// Biorthonormal eigensystem `L[ρ_k] = λ_k ρ_k`, `L†[σ_k] = λ_k* σ_k`,
/// `Tr(σ_k† ρ_l) = δ_kl`. Right vectors have unit Frobenius norm.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub space: HilbertSpace,
    pub eigenvalues: Vec<C64>,
    right: CMat,
    left: CMat,
    /// `max_k ‖ρ_k‖‖σ_k‖`; infinite when some cluster is defective.
    pub overlap_condition: f64,
    pub cluster_of: Vec<usize>,
    pub clusters: Vec<ClusterInfo>,
    /// Largest eigenvalue modulus (at least 1).
    pub scale: f64,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    /// All eigenvalues counted with algebraic multiplicity. `eigenvalues` only
    /// holds one entry per eigenvector, so Jordan blocks are padded with their center.
    pub fn algebraic_spectrum(&self) -> Vec<C64> {
        let mut out = self.eigenvalues.clone();
        for cl in self.clusters.iter().filter(|cl| cl.defective) {
            out.extend(std::iter::repeat_n(cl.center, cl.algebraic_multiplicity - cl.geometric_multiplicity));
        }
        out
    }

    pub fn right_vec(&self, k: usize) -> CVec {
        self.right.column(k).into_owned()
    }

    pub fn left_vec(&self, k: usize) -> CVec {
        self.left.column(k).into_owned()
    }

    pub fn right_matrix(&self, k: usize) -> CMat {
        linalg::unvectorize(&self.right_vec(k), self.dim())
    }

    pub fn left_matrix(&self, k: usize) -> CMat {
        linalg::unvectorize(&self.left_vec(k), self.dim())
    }

    pub fn right(&self, k: usize) -> Operator {
        Operator::new(self.space.clone(), self.right_matrix(k)).expect("dimension")
    }

    pub fn left(&self, k: usize) -> Operator {
        Operator::new(self.space.clone(), self.left_matrix(k)).expect("dimension")
    }

    pub fn right_columns(&self) -> &CMat {
        &self.right
    }

    pub fn left_columns(&self) -> &CMat {
        &self.left
    }

    pub fn is_complete(&self) -> bool {
        self.len() == self.dim() * self.dim() && self.clusters.iter().all(|c| !c.defective)
    }

    /// `max |Tr(σ_k† ρ_l) - δ_kl|`.
    pub fn biorthonormality_defect(&self) -> f64 {
        let ov = self.left.adjoint() * &self.right;
        let mut worst = 0.0f64;
        for i in 0..ov.nrows() {
            for j in 0..ov.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ov[(i, j)] - c(target, 0.0)).norm());
            }
        }
        worst
    }

    /// `‖ρ_k‖‖σ_k‖`, infinite when mode `k` sits in a defective cluster.
    pub fn mode_condition(&self, k: usize) -> f64 {
        if self.clusters[self.cluster_of[k]].defective {
            f64::INFINITY
        } else {
            self.right.column(k).norm() * self.left.column(k).norm()
        }
    }

    /// Largest `mode_condition` over `modes`.
    pub fn modes_condition(&self, modes: &[usize]) -> f64 {
        modes.iter().map(|&k| self.mode_condition(k)).fold(0.0, f64::max)
    }

    /// Coefficient `⟪σ_k|ρ⟫` of `ρ` along mode `k`.
    pub fn coefficient(&self, k: usize, rho: &CMat) -> C64 {
        self.left.column(k).dotc(&linalg::vectorize(rho))
    }
}

pub fn eigensystem(superop: &Superoperator, space: &HilbertSpace) -> Result<EigenSystem> {
    if superop.vectorization != Vectorization::ColumnStacking {
        return Err(Error::Invalid("unsupported vectorization".into()));
    }
    if space.total_dim() != superop.hilbert_dim {
        return Err(Error::Dimension("superoperator and space disagree".into()));
    }
    let dec = linalg::eigen(&superop.matrix, &linalg::EigOptions::default())?;
    let scale = dec.values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut cond = 0.0f64;
    for k in 0..dec.values.len() {
        cond = cond.max(dec.right.column(k).norm() * dec.left.column(k).norm());
    }
    for cl in &dec.clusters {
        if cl.defective {
            cond = f64::INFINITY;
            log::debug!(
                "defective eigenvalue cluster at {} (algebraic {}, geometric {}, residual {:.2e})",
                cl.center,
                cl.algebraic_multiplicity,
                cl.geometric_multiplicity,
                cl.jordan_residual
            );
        }
    }
    Ok(EigenSystem {
        space: space.clone(),
        eigenvalues: dec.values,
        right: dec.right,
        left: dec.left,
        overlap_condition: cond,
        cluster_of: dec.cluster_of,
        clusters: dec.clusters,
        scale,
    })
}

/// Assembles and diagonalizes in one step.
pub fn model_eigensystem(model: &LindbladModel) -> Result<EigenSystem> {
    eigensystem(&assemble(model)?, &model.space)
}
