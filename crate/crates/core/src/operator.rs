//! Operators on finite tensor-product Hilbert spaces.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec, C64, I, ONE, ZERO};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct HilbertSpace {
    site_dims: Vec<usize>,
}

impl TryFrom<Vec<usize>> for HilbertSpace {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        HilbertSpace::new(v)
    }
}

impl From<HilbertSpace> for Vec<usize> {
    fn from(h: HilbertSpace) -> Self {
        h.site_dims
    }
}

impl HilbertSpace {
    pub fn new(site_dims: Vec<usize>) -> Result<Self> {
        if site_dims.is_empty() {
            return Err(Error::Invalid("a Hilbert space needs at least one site".into()));
        }
        if let Some(d) = site_dims.iter().find(|&&d| d < 2) {
            return Err(Error::Invalid(format!("site dimension {d} is below 2")));
        }
        let mut total: usize = 1;
        for &d in &site_dims {
            total = total
                .checked_mul(d)
                .ok_or_else(|| Error::Invalid("total dimension overflows".into()))?;
        }
        Ok(HilbertSpace { site_dims })
    }

    pub fn qubits(n: usize) -> Self {
        HilbertSpace::new(vec![2; n]).expect("n >= 1 qubits")
    }

    pub fn uniform(n: usize, d: usize) -> Result<Self> {
        HilbertSpace::new(vec![d; n])
    }

    pub fn site_dims(&self) -> &[usize] {
        &self.site_dims
    }

    pub fn n_sites(&self) -> usize {
        self.site_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.site_dims.iter().product()
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_sites() {
            return Err(Error::Invalid(format!(
                "site {site} out of range for {} sites",
                self.n_sites()
            )));
        }
        Ok(())
    }

    /// Row-major strides: the index of a product basis state is `Σ digit_s * stride_s`.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.n_sites()];
        for i in (0..self.n_sites().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.site_dims[i + 1];
        }
        s
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.n_sites()];
        for i in (0..self.n_sites()).rev() {
            out[i] = index % self.site_dims[i];
            index /= self.site_dims[i];
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(self.strides())
            .map(|(d, s)| d * s)
            .sum()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Flag {
    pub value: bool,
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OperatorFlags {
    pub hermitian: Option<Flag>,
    pub unitary: Option<Flag>,
}

/// A dense matrix bound to a Hilbert space.
///
/// Flags are only set by explicit checks and are dropped by every arithmetic operation.
#[derive(Clone, Debug)]
pub struct Operator {
    space: HilbertSpace,
    matrix: CMat,
    flags: OperatorFlags,
}

impl PartialEq for Operator {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.matrix == other.matrix
    }
}

impl Operator {
    pub fn new(space: HilbertSpace, matrix: CMat) -> Result<Self> {
        let d = space.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, space has dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Operator { space, matrix, flags: OperatorFlags::default() })
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        let d = space.total_dim();
        Operator { space: space.clone(), matrix: CMat::identity(d, d), flags: OperatorFlags::default() }
    }

    pub fn zeros(space: &HilbertSpace) -> Self {
        let d = space.total_dim();
        Operator { space: space.clone(), matrix: CMat::zeros(d, d), flags: OperatorFlags::default() }
    }

    /// `|a⟩⟨b|` for product basis states given by site digits.
    pub fn ket_bra(space: &HilbertSpace, ket: &[usize], bra: &[usize]) -> Result<Self> {
        for digits in [ket, bra] {
            if digits.len() != space.n_sites()
                || digits.iter().zip(space.site_dims()).any(|(a, d)| a >= d)
            {
                return Err(Error::Invalid(format!("basis label {digits:?} does not fit the space")));
            }
        }
        let mut op = Operator::zeros(space);
        op.matrix[(space.index(ket), space.index(bra))] = ONE;
        Ok(op)
    }

    /// `|u⟩⟨v|` for arbitrary vectors.
    pub fn outer(space: &HilbertSpace, u: &CVec, v: &CVec) -> Result<Self> {
        Operator::new(space.clone(), u * v.adjoint())
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn flags(&self) -> OperatorFlags {
        self.flags
    }

    pub fn dagger(&self) -> Self {
        Operator { space: self.space.clone(), matrix: self.matrix.adjoint(), flags: OperatorFlags::default() }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn norm(&self) -> f64 {
        linalg::frob(&self.matrix)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::frob(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim();
        linalg::frob(&(self.matrix.adjoint() * &self.matrix - CMat::identity(d, d)))
    }

    /// Runs the Hermiticity and unitarity tests and caches them with `tol`.
    pub fn checked(mut self, tol: f64) -> Self {
        self.flags.hermitian = Some(Flag { value: self.hermiticity_defect() <= tol, tol });
        self.flags.unitary = Some(Flag { value: self.unitarity_defect() <= tol, tol });
        self
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn hermitian_part(&self) -> Self {
        let m = (&self.matrix + self.matrix.adjoint()) * c(0.5, 0.0);
        Operator { space: self.space.clone(), matrix: m, flags: OperatorFlags::default() }
    }

    pub fn commutator(&self, other: &Operator) -> Self {
        self.same_space(other);
        Operator {
            space: self.space.clone(),
            matrix: linalg::commutator(&self.matrix, &other.matrix),
            flags: OperatorFlags::default(),
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        Operator { space: self.space.clone(), matrix: &self.matrix * z, flags: OperatorFlags::default() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Operator::identity(&self.space);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    fn same_space(&self, other: &Operator) {
        assert_eq!(self.space, other.space, "operators live on different Hilbert spaces");
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.same_space(rhs);
        Operator { space: self.space.clone(), matrix: &self.matrix + &rhs.matrix, flags: OperatorFlags::default() }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.same_space(rhs);
        Operator { space: self.space.clone(), matrix: &self.matrix - &rhs.matrix, flags: OperatorFlags::default() }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.same_space(rhs);
        Operator { space: self.space.clone(), matrix: &self.matrix * &rhs.matrix, flags: OperatorFlags::default() }
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, z: C64) -> Operator {
        self.scale(z)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, x: f64) -> Operator {
        self.scale(c(x, 0.0))
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale(c(-1.0, 0.0))
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    pub fn new(op: Operator, tol: f64) -> Result<Self> {
        let herm = op.hermiticity_defect();
        if herm > tol {
            return Err(Error::Invalid(format!("density matrix not Hermitian (defect {herm:.3e})")));
        }
        let tr = op.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::Invalid(format!("density matrix trace is {tr}")));
        }
        let (ev, _) = linalg::hermitian_eigen(op.matrix());
        let min = ev.first().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(Error::Invalid(format!("density matrix has eigenvalue {min:.3e}")));
        }
        Ok(DensityMatrix { op })
    }

    /// Wraps without validation; for states produced by trusted propagation
    /// whose invariants are monitored separately.
    pub fn new_unchecked(op: Operator) -> Self {
        DensityMatrix { op }
    }

    pub fn pure(space: &HilbertSpace, psi: &CVec) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 {
            return Err(Error::Invalid("zero state vector".into()));
        }
        let v = psi / c(n, 0.0);
        DensityMatrix::new(Operator::outer(space, &v, &v)?, 1e-12)
    }

    pub fn basis_state(space: &HilbertSpace, digits: &[usize]) -> Result<Self> {
        Ok(DensityMatrix { op: Operator::ket_bra(space, digits, digits)? })
    }

    pub fn maximally_mixed(space: &HilbertSpace) -> Self {
        let d = space.total_dim();
        DensityMatrix { op: Operator::identity(space).scale(c(1.0 / d as f64, 0.0)) }
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn matrix(&self) -> &CMat {
        self.op.matrix()
    }

    pub fn space(&self) -> &HilbertSpace {
        self.op.space()
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_eigen(self.op.matrix()).0.first().copied().unwrap_or(0.0)
    }

    pub fn expectation(&self, o: &Operator) -> C64 {
        (o.matrix() * self.op.matrix()).trace()
    }
}

/// Exchange of two sites of equal dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SitePermutation {
    pub space: HilbertSpace,
    pub j: usize,
    pub k: usize,
}

impl SitePermutation {
    pub fn new(space: &HilbertSpace, j: usize, k: usize) -> Result<Self> {
        space.check_site(j)?;
        space.check_site(k)?;
        if space.site_dims()[j] != space.site_dims()[k] {
            return Err(Error::Dimension(format!(
                "sites {j} and {k} have dimensions {} and {}",
                space.site_dims()[j],
                space.site_dims()[k]
            )));
        }
        Ok(SitePermutation { space: space.clone(), j, k })
    }

    pub fn operator(&self) -> Operator {
        permutation_operator(self)
    }
}

pub fn permutation_operator(perm: &SitePermutation) -> Operator {
    let space = &perm.space;
    let d = space.total_dim();
    let mut m = CMat::zeros(d, d);
    for i in 0..d {
        let mut digits = space.digits(i);
        digits.swap(perm.j, perm.k);
        m[(space.index(&digits), i)] = ONE;
    }
    Operator::new(space.clone(), m).expect("dimension matches")
}

/// `1 ⊗ … ⊗ local ⊗ … ⊗ 1` with `local` acting on `site`.
pub fn embed_site_operator(local: &CMat, site: usize, space: &HilbertSpace) -> Result<Operator> {
    space.check_site(site)?;
    let ds = space.site_dims()[site];
    if local.nrows() != ds || local.ncols() != ds {
        return Err(Error::Dimension(format!(
            "local operator is {}x{}, site {site} has dimension {ds}",
            local.nrows(),
            local.ncols()
        )));
    }
    let left: usize = space.site_dims()[..site].iter().product();
    let right: usize = space.site_dims()[site + 1..].iter().product();
    let m = linalg::kron(&linalg::kron(&CMat::identity(left, left), local), &CMat::identity(right, right));
    Operator::new(space.clone(), m)
}

/// Product of local operators on distinct sites, `[(site, local)]`.
pub fn embed_product(factors: &[(usize, &CMat)], space: &HilbertSpace) -> Result<Operator> {
    let mut out = Operator::identity(space);
    for (site, local) in factors {
        out = &out * &embed_site_operator(local, *site, space)?;
    }
    Ok(out)
}

/// Partial trace keeping `keep` (returned in ascending site order).
pub fn partial_trace_operator(op: &Operator, keep: &[usize]) -> Result<Operator> {
    let space = op.space();
    if keep.is_empty() {
        return Err(Error::Invalid("partial trace must keep at least one site".into()));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::Invalid(format!("repeated site in {keep:?}")));
    }
    for &s in &kept {
        space.check_site(s)?;
    }
    let traced: Vec<usize> = (0..space.n_sites()).filter(|s| !kept.contains(s)).collect();
    let strides = space.strides();
    let dims = space.site_dims();
    let offsets = |sites: &[usize]| -> Vec<usize> {
        let sub_dims: Vec<usize> = sites.iter().map(|&s| dims[s]).collect();
        let n: usize = sub_dims.iter().product();
        (0..n)
            .map(|mut idx| {
                let mut off = 0;
                for (pos, &s) in sites.iter().enumerate().rev() {
                    off += (idx % sub_dims[pos]) * strides[s];
                    idx /= sub_dims[pos];
                }
                off
            })
            .collect()
    };
    let keep_off = offsets(&kept);
    let trace_off = if traced.is_empty() { vec![0] } else { offsets(&traced) };
    let dk = keep_off.len();
    let m = op.matrix();
    let mut red = CMat::zeros(dk, dk);
    for b in 0..dk {
        for a in 0..dk {
            let mut acc = ZERO;
            for &t in &trace_off {
                acc += m[(keep_off[a] + t, keep_off[b] + t)];
            }
            red[(a, b)] = acc;
        }
    }
    let sub = HilbertSpace::new(kept.iter().map(|&s| dims[s]).collect())?;
    Operator::new(sub, red)
}

pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    Ok(DensityMatrix::new_unchecked(partial_trace_operator(rho.operator(), keep)?))
}

/// `Tr(a† b)`.
pub fn hs_inner(a: &Operator, b: &Operator) -> Result<C64> {
    if a.space() != b.space() {
        return Err(Error::Dimension("operators live on different Hilbert spaces".into()));
    }
    Ok(a.matrix().iter().zip(b.matrix().iter()).map(|(x, y)| x.conj() * y).sum())
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// `|↑⟩⟨↓|`, raising index 1 to index 0.
pub fn sigma_plus() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
}

/// `|↓⟩⟨↑|`; annihilates the down state (index 1).
pub fn sigma_minus() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO])
}

pub fn bloch_vector(rho: &DensityMatrix) -> Result<[f64; 3]> {
    if rho.matrix().nrows() != 2 {
        return Err(Error::Dimension(format!(
            "Bloch vector needs a qubit, got dimension {}",
            rho.matrix().nrows()
        )));
    }
    let m = rho.matrix();
    let e = |p: CMat| (p * m).trace().re;
    Ok([e(pauli_x()), e(pauli_y()), e(pauli_z())])
}

#[derive(Clone, Debug)]
pub struct SpinMatrices {
    pub plus: CMat,
    pub minus: CMat,
    pub z: CMat,
}

impl SpinMatrices {
    pub fn x(&self) -> CMat {
        (&self.plus + &self.minus) * c(0.5, 0.0)
    }

    pub fn y(&self) -> CMat {
        (&self.plus - &self.minus) * c(0.0, -0.5)
    }
}

/// Spin-`s` matrices in the basis `m = s, s-1, …, -s` (index 0 is `m = s`).
pub fn spin_matrices(s: f64) -> Result<SpinMatrices> {
    let two_s = 2.0 * s;
    if !(two_s >= 1.0) || (two_s - two_s.round()).abs() > 1e-12 {
        return Err(Error::Invalid(format!("spin {s} is not a positive half-integer")));
    }
    let d = two_s.round() as usize + 1;
    let m_of = |i: usize| s - i as f64;
    let mut plus = CMat::zeros(d, d);
    let mut z = CMat::zeros(d, d);
    for i in 0..d {
        let m = m_of(i);
        z[(i, i)] = c(m, 0.0);
        if i > 0 {
            plus[(i - 1, i)] = c((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
    }
    let minus = plus.adjoint();
    Ok(SpinMatrices { plus, minus, z })
}

/// Jordan-Wigner fermions on `n` two-level modes. Mode `j` is site `j`; the
/// occupied state is index 0, so a single mode has `c = σ⁻`.
#[derive(Clone, Debug)]
pub struct FermionOperators {
    pub space: HilbertSpace,
    pub annihilators: Vec<Operator>,
}

impl FermionOperators {
    pub fn c(&self, j: usize) -> &Operator {
        &self.annihilators[j]
    }

    pub fn c_dag(&self, j: usize) -> Operator {
        self.annihilators[j].dagger()
    }

    pub fn number(&self, j: usize) -> Operator {
        &self.c_dag(j) * self.c(j)
    }

    /// Same matrices regrouped onto a coarser tensor structure of equal total dimension.
    pub fn regroup(&self, space: &HilbertSpace) -> Result<Vec<Operator>> {
        self.annihilators
            .iter()
            .map(|op| Operator::new(space.clone(), op.matrix().clone()))
            .collect()
    }
}

pub fn fermion_operators(n_modes: usize) -> Result<FermionOperators> {
    if n_modes == 0 {
        return Err(Error::Invalid("need at least one fermionic mode".into()));
    }
    let space = HilbertSpace::qubits(n_modes);
    let parity = -pauli_z();
    let annihilators = (0..n_modes)
        .map(|j| {
            let mut factors: Vec<(usize, &CMat)> = (0..j).map(|l| (l, &parity)).collect();
            let sm = sigma_minus();
            factors.push((j, &sm));
            embed_product(&factors, &space)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FermionOperators { space, annihilators })
}

/// Fermionic exchange of sites `j` and `k` for Jordan-Wigner modes grouped
/// `modes_per_site` to a site (site-major order, occupied = bit value 0).
///
/// Maps `c_(j,r) ↔ c_(k,r)` including the reordering sign, unlike the plain
/// tensor swap which fails to commute with hopping terms in odd-parity sectors.
pub fn fermionic_swap(space: &HilbertSpace, modes_per_site: usize, j: usize, k: usize) -> Result<Operator> {
    SitePermutation::new(space, j, k)?;
    let per = 1usize
        .checked_shl(modes_per_site as u32)
        .ok_or_else(|| Error::Invalid("too many modes per site".into()))?;
    if space.site_dims().iter().any(|&d| d != per) {
        return Err(Error::Dimension(format!(
            "fermionic swap needs every site of dimension {per}"
        )));
    }
    let m = modes_per_site;
    let total_modes = space.n_sites() * m;
    let d = space.total_dim();
    let mode_of = |q: usize| -> usize {
        let (s, r) = (q / m, q % m);
        let s2 = if s == j { k } else if s == k { j } else { s };
        s2 * m + r
    };
    let mut out = CMat::zeros(d, d);
    for i in 0..d {
        let occupied: Vec<usize> = (0..total_modes)
            .filter(|&q| (i >> (total_modes - 1 - q)) & 1 == 0)
            .collect();
        let mapped: Vec<usize> = occupied.iter().map(|&q| mode_of(q)).collect();
        let mut inversions = 0usize;
        for a in 0..mapped.len() {
            for b in a + 1..mapped.len() {
                if mapped[a] > mapped[b] {
                    inversions += 1;
                }
            }
        }
        let mut target = d - 1;
        for &q in &mapped {
            target &= !(1usize << (total_modes - 1 - q));
        }
        out[(target, i)] = if inversions % 2 == 0 { ONE } else { -ONE };
    }
    Operator::new(space.clone(), out)
}

/// Hermitian orthogonal basis of `d×d` matrices: the identity scaled to
/// `Tr(X²) = 2` followed by the `d²-1` generalized Gell-Mann matrices.
pub fn gell_mann_basis(d: usize) -> Vec<CMat> {
    let mut out = vec![CMat::identity(d, d) * c((2.0 / d as f64).sqrt(), 0.0)];
    for j in 0..d {
        for k in j + 1..d {
            let mut sym = CMat::zeros(d, d);
            sym[(j, k)] = ONE;
            sym[(k, j)] = ONE;
            out.push(sym);
            let mut anti = CMat::zeros(d, d);
            anti[(j, k)] = -I;
            anti[(k, j)] = I;
            out.push(anti);
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = CMat::zeros(d, d);
        for j in 0..l {
            diag[(j, j)] = c(norm, 0.0);
        }
        diag[(l, l)] = c(-(l as f64) * norm, 0.0);
        out.push(diag);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, random_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
        linalg::frob(&(a - b)) <= tol
    }

    #[test]
    fn embedding_matches_nested_loop_kronecker() {
        let space = HilbertSpace::new(vec![2, 3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_matrix(2, &mut rng);
        let op = embed_site_operator(&m, 0, &space).unwrap();
        let mut oracle = CMat::zeros(6, 6);
        for a in 0..2 {
            for b in 0..2 {
                for x in 0..3 {
                    oracle[(3 * a + x, 3 * b + x)] = m[(a, b)];
                }
            }
        }
        assert!(close(op.matrix(), &oracle, 0.0));
    }

    #[test]
    fn embedding_identity_and_sigma_z() {
        let space = HilbertSpace::qubits(3);
        let id = embed_site_operator(&CMat::identity(2, 2), 1, &space).unwrap();
        assert_eq!(id, Operator::identity(&space));
        let z = embed_site_operator(&pauli_z(), 1, &space).unwrap();
        for i in 0..8 {
            let expected = if space.digits(i)[1] == 0 { 1.0 } else { -1.0 };
            assert_eq!(z.matrix()[(i, i)], c(expected, 0.0));
        }
        assert!(embed_site_operator(&pauli_z(), 3, &space).is_err());
        assert!(embed_site_operator(&CMat::identity(3, 3), 0, &space).is_err());
    }

    #[test]
    fn partial_trace_of_product_and_bell_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ra = random_density(2, &mut rng);
        let rb = random_density(3, &mut rng);
        let space = HilbertSpace::new(vec![2, 3]).unwrap();
        let rho = DensityMatrix::new(Operator::new(space, linalg::kron(&ra, &rb)).unwrap(), 1e-12).unwrap();
        assert!(close(partial_trace(&rho, &[0]).unwrap().matrix(), &ra, 1e-14));
        assert!(close(partial_trace(&rho, &[1]).unwrap().matrix(), &rb, 1e-14));

        let q2 = HilbertSpace::qubits(2);
        let mut psi = CVec::zeros(4);
        psi[0] = ONE;
        psi[3] = ONE;
        let bell = DensityMatrix::pure(&q2, &psi).unwrap();
        let red = partial_trace(&bell, &[0]).unwrap();
        assert!(close(red.matrix(), &(CMat::identity(2, 2) * c(0.5, 0.0)), 1e-15));
    }

    #[test]
    fn partial_trace_matches_index_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let space = HilbertSpace::qubits(3);
        let rho = DensityMatrix::new(Operator::new(space, random_density(8, &mut rng)).unwrap(), 1e-12).unwrap();
        let red = partial_trace(&rho, &[2, 0]).unwrap();
        assert!((red.operator().trace() - ONE).norm() < 1e-14);
        let m = rho.matrix();
        for a0 in 0..2 {
            for a2 in 0..2 {
                for b0 in 0..2 {
                    for b2 in 0..2 {
                        let mut acc = ZERO;
                        for t in 0..2 {
                            acc += m[(4 * a0 + 2 * t + a2, 4 * b0 + 2 * t + b2)];
                        }
                        assert!((red.matrix()[(2 * a0 + a2, 2 * b0 + b2)] - acc).norm() < 1e-15);
                    }
                }
            }
        }
        assert!(partial_trace(&rho, &[]).is_err());
        assert!(partial_trace(&rho, &[1, 1]).is_err());
        assert!(partial_trace(&rho, &[3]).is_err());
    }

    #[test]
    fn hilbert_schmidt_inner_product() {
        let q = HilbertSpace::qubits(1);
        let x = Operator::new(q.clone(), pauli_x()).unwrap();
        let y = Operator::new(q.clone(), pauli_y()).unwrap();
        assert_eq!(hs_inner(&x, &y).unwrap(), ZERO);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = Operator::new(q.clone(), random_density(2, &mut rng)).unwrap();
        assert!((hs_inner(&Operator::identity(&q), &rho).unwrap() - ONE).norm() < 1e-15);
        let a = Operator::new(q.clone(), random_matrix(2, &mut rng)).unwrap();
        let b = Operator::new(q.clone(), random_matrix(2, &mut rng)).unwrap();
        let mut oracle = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                oracle += a.matrix()[(i, j)].conj() * b.matrix()[(i, j)];
            }
        }
        assert!((hs_inner(&a, &b).unwrap() - oracle).norm() < 1e-15);
    }

    #[test]
    fn bloch_vectors() {
        let q = HilbertSpace::qubits(1);
        assert_eq!(bloch_vector(&DensityMatrix::maximally_mixed(&q)).unwrap(), [0.0, 0.0, 0.0]);
        assert_eq!(bloch_vector(&DensityMatrix::basis_state(&q, &[0]).unwrap()).unwrap(), [0.0, 0.0, 1.0]);
        let m = (CMat::identity(2, 2) + pauli_x() * c(0.3, 0.0)) * c(0.5, 0.0);
        let v = bloch_vector(&DensityMatrix::new(Operator::new(q, m).unwrap(), 1e-12).unwrap()).unwrap();
        assert!((v[0] - 0.3).abs() < 1e-15 && v[1].abs() < 1e-15 && v[2].abs() < 1e-15);
        let q2 = HilbertSpace::qubits(2);
        assert!(bloch_vector(&DensityMatrix::maximally_mixed(&q2)).is_err());
    }

    #[test]
    fn spin_algebra() {
        let half = spin_matrices(0.5).unwrap();
        assert_eq!(half.plus, sigma_plus());
        assert_eq!(half.minus, sigma_minus());
        assert!(close(&half.z, &(pauli_z() * c(0.5, 0.0)), 0.0));
        for s in [1.0, 1.5, 2.0] {
            let sm = spin_matrices(s).unwrap();
            assert!(close(&linalg::commutator(&sm.z, &sm.plus), &sm.plus, 1e-14));
            assert!(close(&linalg::commutator(&sm.z, &sm.minus), &(-&sm.minus), 1e-14));
            assert!(close(&linalg::commutator(&sm.plus, &sm.minus), &(&sm.z * c(2.0, 0.0)), 1e-14));
        }
        assert!(spin_matrices(0.3).is_err());
        assert!(spin_matrices(0.0).is_err());
    }

    #[test]
    fn canonical_anticommutation() {
        let one = fermion_operators(1).unwrap();
        assert_eq!(one.c(0).matrix(), &sigma_minus());
        for n in 1..=4 {
            let f = fermion_operators(n).unwrap();
            let d = f.space.total_dim();
            for i in 0..n {
                for j in 0..n {
                    let ci = f.c(i).matrix();
                    let cj = f.c(j).matrix();
                    let cjd = cj.adjoint();
                    let expect = if i == j { CMat::identity(d, d) } else { CMat::zeros(d, d) };
                    assert!(close(&linalg::anticommutator(ci, &cjd), &expect, 1e-14));
                    assert!(close(&linalg::anticommutator(ci, cj), &CMat::zeros(d, d), 1e-14));
                }
            }
        }
    }

    #[test]
    fn permutations() {
        let q2 = HilbertSpace::qubits(2);
        let p = SitePermutation::new(&q2, 0, 1).unwrap().operator();
        let ket01 = q2.index(&[0, 1]);
        let ket10 = q2.index(&[1, 0]);
        assert_eq!(p.matrix()[(ket10, ket01)], ONE);
        assert_eq!(SitePermutation::new(&q2, 1, 1).unwrap().operator(), Operator::identity(&q2));

        let q3 = HilbertSpace::qubits(3);
        let p12 = SitePermutation::new(&q3, 1, 2).unwrap().operator();
        let x1 = embed_site_operator(&pauli_x(), 1, &q3).unwrap();
        let x2 = embed_site_operator(&pauli_x(), 2, &q3).unwrap();
        assert_eq!((&(&p12 * &x1) * &p12).matrix(), x2.matrix());
        assert!(p12.is_unitary(0.0) && p12.is_hermitian(0.0));

        let mixed = HilbertSpace::new(vec![2, 3]).unwrap();
        assert!(SitePermutation::new(&mixed, 0, 1).is_err());
    }

    #[test]
    fn fermionic_swap_exchanges_modes() {
        let f = fermion_operators(4).unwrap();
        let space = HilbertSpace::new(vec![4, 4]).unwrap();
        let c = f.regroup(&space).unwrap();
        let u = fermionic_swap(&space, 2, 0, 1).unwrap();
        assert!(u.is_unitary(1e-14) && u.is_hermitian(1e-14));
        for r in 0..2 {
            let mapped = &(&u * &c[r]) * &u;
            assert!(close(mapped.matrix(), c[2 + r].matrix(), 1e-14));
        }
        // even site-local operators map like the tensor swap
        let s_plus = &c[0].dagger() * &c[1];
        let s_plus_k = &c[2].dagger() * &c[3];
        assert!(close((&(&u * &s_plus) * &u).matrix(), s_plus_k.matrix(), 1e-14));
        let t = SitePermutation::new(&space, 0, 1).unwrap().operator();
        assert!(close((&(&t * &s_plus) * &t).matrix(), s_plus_k.matrix(), 1e-14));
    }

    #[test]
    fn gell_mann_is_orthogonal_hermitian_basis() {
        for d in 2..=4 {
            let b = gell_mann_basis(d);
            assert_eq!(b.len(), d * d);
            for (i, x) in b.iter().enumerate() {
                assert!(close(x, &x.adjoint(), 0.0));
                for (j, y) in b.iter().enumerate() {
                    let ip = (x.adjoint() * y).trace();
                    let expect = if i == j { 2.0 } else { 0.0 };
                    assert!((ip - c(expect, 0.0)).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn density_matrix_validation() {
        let q = HilbertSpace::qubits(1);
        assert!(DensityMatrix::new(Operator::new(q.clone(), pauli_x()).unwrap(), 1e-12).is_err());
        assert!(DensityMatrix::new(Operator::new(q.clone(), pauli_z()).unwrap(), 1e-12).is_err());
        let neg = CMat::from_row_slice(2, 2, &[c(1.5, 0.0), ZERO, ZERO, c(-0.5, 0.0)]);
        assert!(DensityMatrix::new(Operator::new(q, neg).unwrap(), 1e-12).is_err());
        assert!(HilbertSpace::new(vec![]).is_err());
        assert!(HilbertSpace::new(vec![2, 1]).is_err());
    }
}
