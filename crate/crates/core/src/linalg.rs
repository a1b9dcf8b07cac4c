//! Dense complex linear algebra used throughout the crate.
//!
//! nalgebra supplies storage, products, QR, SVD and the Hermitian eigensolver.
//! The non-Hermitian eigenproblem is solved here: a complex Schur form by
//! Householder reduction and single-shift QR, followed by cluster-wise inverse
//! iteration on the triangular factor for right and left eigenvectors.

use nalgebra::{DMatrix, DVector, SymmetricEigen, QR, SVD};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
fn abs1(z: C64) -> f64 {
    z.re.abs() + z.im.abs()
}

pub fn frob(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Largest singular value.
pub fn spectral_norm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    SVD::new(a.clone(), false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Column-stacking vectorization; nalgebra storage is already column-major.
pub fn vectorize(a: &CMat) -> CVec {
    CVec::from_column_slice(a.as_slice())
}

pub fn unvectorize(v: &CVec, d: usize) -> CMat {
    CMat::from_column_slice(d, d, v.as_slice())
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let herm = (a + a.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(a.nrows(), n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// Singular values in descending order.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = SVD::new(a.clone(), false, false)
        .singular_values
        .iter()
        .cloned()
        .collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Orthonormal basis (columns) of the null space of `a`, keeping right
/// singular vectors whose singular value is at most `tol`.
///
/// Tall inputs are compressed with a QR factorization first.
pub fn null_space(a: &CMat, tol: f64) -> CMat {
    let n = a.ncols();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let square = if a.nrows() > n {
        QR::new(a.clone()).r()
    } else if a.nrows() < n {
        let mut padded = CMat::zeros(n, n);
        padded.rows_mut(0, a.nrows()).copy_from(a);
        padded
    } else {
        a.clone()
    };
    let svd = SVD::new(square, false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= tol)
        .collect();
    let mut out = CMat::zeros(n, keep.len());
    for (col, &i) in keep.iter().enumerate() {
        for r in 0..n {
            out[(r, col)] = v_t[(i, r)].conj();
        }
    }
    out
}

/// Modified Gram-Schmidt (applied twice) on the columns of `z`; columns that
/// collapse below `drop_tol` relative to their input norm are dropped.
pub fn orthonormalize_columns(z: &CMat, drop_tol: f64) -> CMat {
    let mut cols: Vec<CVec> = Vec::with_capacity(z.ncols());
    for j in 0..z.ncols() {
        let mut v: CVec = z.column(j).into_owned();
        let n0 = v.norm();
        if n0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in &cols {
                let p = q.dotc(&v);
                v -= q * p;
            }
        }
        let n1 = v.norm();
        if n1 > drop_tol * n0 {
            cols.push(v / c(n1, 0.0));
        }
    }
    let mut out = CMat::zeros(z.nrows(), cols.len());
    for (j, v) in cols.iter().enumerate() {
        out.set_column(j, v);
    }
    out
}

/// Unitary factor of the polar decomposition of a square matrix.
pub fn polar_unitary(a: &CMat) -> CMat {
    let svd = SVD::new(a.clone(), true, true);
    svd.u.expect("U") * svd.v_t.expect("V^T")
}

/// Complex Schur form `A = Q T Q†` with `T` upper triangular.
#[derive(Clone, Debug)]
pub struct Schur {
    pub q: CMat,
    pub t: CMat,
}

fn householder_hessenberg(a: &mut CMat, q: &mut CMat) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let mut v: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let xnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // A <- (I - 2vv†) A on rows k+1..n
        for j in 0..n {
            let mut dot = ZERO;
            for (i, vi) in v.iter().enumerate() {
                dot += vi.conj() * a[(k + 1 + i, j)];
            }
            let dot2 = dot * 2.0;
            for (i, vi) in v.iter().enumerate() {
                a[(k + 1 + i, j)] -= vi * dot2;
            }
        }
        // A <- A (I - 2vv†) and Q <- Q (I - 2vv†) on columns k+1..n
        for m in [&mut *a, &mut *q] {
            for r in 0..n {
                let mut dot = ZERO;
                for (i, vi) in v.iter().enumerate() {
                    dot += m[(r, k + 1 + i)] * vi;
                }
                let dot2 = dot * 2.0;
                for (i, vi) in v.iter().enumerate() {
                    m[(r, k + 1 + i)] -= dot2 * vi.conj();
                }
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

fn givens(x: C64, y: C64) -> (f64, C64) {
    if y == ZERO {
        return (1.0, ZERO);
    }
    if x == ZERO {
        return (0.0, y.conj() / y.norm());
    }
    let r = x.norm().hypot(y.norm());
    let cval = x.norm() / r;
    let s = (x / x.norm()) * y.conj() / r;
    (cval, s)
}

impl Schur {
    pub fn new(a: &CMat) -> Result<Self> {
        let n = a.nrows();
        if n != a.ncols() {
            return Err(Error::Numerical("Schur form of a non-square matrix".into()));
        }
        let mut q = CMat::identity(n, n);
        if n == 0 {
            return Ok(Schur { q, t: a.clone() });
        }
        let amax = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if amax == 0.0 {
            return Ok(Schur { q, t: a.clone() });
        }
        let mut h = a / c(amax, 0.0);
        householder_hessenberg(&mut h, &mut q);

        let ulp = f64::EPSILON;
        let smlnum = f64::MIN_POSITIVE * (n as f64 / ulp);
        let max_iter = 60 * n.max(10);
        let mut hi = n - 1;
        let mut its = 0usize;
        let mut total = 0usize;
        while hi > 0 {
            // locate the start of the unreduced block ending at `hi`
            let mut l = hi;
            while l > 0 {
                let sub = abs1(h[(l, l - 1)]);
                if sub <= smlnum {
                    h[(l, l - 1)] = ZERO;
                    break;
                }
                let mut tst = abs1(h[(l - 1, l - 1)]) + abs1(h[(l, l)]);
                if tst == 0.0 {
                    if l >= 2 {
                        tst += abs1(h[(l - 1, l - 2)]);
                    }
                    if l + 1 <= hi {
                        tst += abs1(h[(l + 1, l)]);
                    }
                }
                if sub <= ulp * tst {
                    let ab = sub.max(abs1(h[(l - 1, l)]));
                    let ba = sub.min(abs1(h[(l - 1, l)]));
                    let aa = abs1(h[(l, l)]).max(abs1(h[(l - 1, l - 1)] - h[(l, l)]));
                    let bb = abs1(h[(l, l)]).min(abs1(h[(l - 1, l - 1)] - h[(l, l)]));
                    let s = aa + ab;
                    if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                        h[(l, l - 1)] = ZERO;
                        break;
                    }
                }
                l -= 1;
            }
            if l == hi {
                hi -= 1;
                its = 0;
                continue;
            }
            its += 1;
            total += 1;
            if total > max_iter {
                return Err(Error::Numerical(format!(
                    "complex QR iteration failed to converge (n = {n})"
                )));
            }

            let mu = if its % 20 == 10 {
                h[(l, l)] + 0.75 * h[(l + 1, l)].re.abs()
            } else if its % 20 == 0 {
                h[(hi, hi)] + 0.75 * h[(hi, hi - 1)].re.abs()
            } else {
                let a11 = h[(hi - 1, hi - 1)];
                let a12 = h[(hi - 1, hi)];
                let a21 = h[(hi, hi - 1)];
                let a22 = h[(hi, hi)];
                let half_tr = (a11 + a22) * 0.5;
                let half_diff = (a11 - a22) * 0.5;
                let disc = (half_diff * half_diff + a12 * a21).sqrt();
                let m1 = half_tr + disc;
                let m2 = half_tr - disc;
                if (m1 - a22).norm() <= (m2 - a22).norm() {
                    m1
                } else {
                    m2
                }
            };

            let mut x = h[(l, l)] - mu;
            let mut y = h[(l + 1, l)];
            for k in l..hi {
                if k > l {
                    x = h[(k, k - 1)];
                    y = h[(k + 1, k - 1)];
                }
                let (cg, sg) = givens(x, y);
                let jstart = if k > l { k - 1 } else { k };
                for j in jstart..n {
                    let a0 = h[(k, j)];
                    let b0 = h[(k + 1, j)];
                    h[(k, j)] = a0 * cg + sg * b0;
                    h[(k + 1, j)] = -sg.conj() * a0 + b0 * cg;
                }
                if k > l {
                    h[(k + 1, k - 1)] = ZERO;
                }
                let rmax = (k + 2).min(hi);
                for r in 0..=rmax {
                    let a0 = h[(r, k)];
                    let b0 = h[(r, k + 1)];
                    h[(r, k)] = a0 * cg + b0 * sg.conj();
                    h[(r, k + 1)] = -a0 * sg + b0 * cg;
                }
                for r in 0..n {
                    let a0 = q[(r, k)];
                    let b0 = q[(r, k + 1)];
                    q[(r, k)] = a0 * cg + b0 * sg.conj();
                    q[(r, k + 1)] = -a0 * sg + b0 * cg;
                }
            }
        }
        for j in 0..n {
            for i in j + 1..n {
                h[(i, j)] = ZERO;
            }
        }
        Ok(Schur { q, t: h * c(amax, 0.0) })
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }
}

/// Solves `(T - sigma) z = b` for upper-triangular `T`, in place.
fn upper_solve(t: &CMat, sigma: C64, b: &mut [C64], tiny: f64) {
    let n = t.nrows();
    for j in (0..n).rev() {
        let mut acc = b[j];
        for l in j + 1..n {
            acc -= t[(j, l)] * b[l];
        }
        let mut den = t[(j, j)] - sigma;
        if den.norm() < tiny {
            den = c(tiny, 0.0);
        }
        b[j] = acc / den;
    }
}

/// Solves `(T† - conj(sigma)) w = b` for upper-triangular `T`, in place.
fn lower_adjoint_solve(t: &CMat, sigma: C64, b: &mut [C64], tiny: f64) {
    let n = t.nrows();
    for j in 0..n {
        let mut acc = b[j];
        for l in 0..j {
            acc -= t[(l, j)].conj() * b[l];
        }
        let mut den = (t[(j, j)] - sigma).conj();
        if den.norm() < tiny {
            den = c(tiny, 0.0);
        }
        b[j] = acc / den;
    }
}

/// Diagnostics for one group of numerically coincident eigenvalues.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ClusterInfo {
    pub center: C64,
    pub algebraic_multiplicity: usize,
    pub geometric_multiplicity: usize,
    /// Condition number of the left/right overlap matrix before biorthonormalization.
    pub overlap_condition: f64,
    /// Largest residual `‖(A - center) z‖` over an orthonormal basis of the
    /// inverse-iteration subspace; large values signal a Jordan block.
    pub jordan_residual: f64,
    pub defective: bool,
}

/// Right/left eigenvectors with `w_k† z_l = δ_kl` inside every semisimple cluster.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    pub right: CMat,
    pub left: CMat,
    /// Index of the cluster each eigenvector belongs to.
    pub cluster_of: Vec<usize>,
    pub clusters: Vec<ClusterInfo>,
}

pub struct EigOptions {
    /// Eigenvalues closer than `cluster_radius * scale` are grouped.
    pub cluster_radius: f64,
    /// Residual (relative to scale) above which a cluster is declared defective.
    pub defect_tol: f64,
}

impl Default for EigOptions {
    fn default() -> Self {
        EigOptions { cluster_radius: 1e-7, defect_tol: 1e-6 }
    }
}

fn cluster_indices(vals: &[C64], radius: f64) -> Vec<Vec<usize>> {
    let n = vals.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut k = i;
        while p[k] != r {
            let next = p[k];
            p[k] = r;
            k = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (vals[i] - vals[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(i);
    }
    groups
}

/// Eigenvectors of a small matrix whose eigenvalues are distinct; used to
/// split near-degenerate clusters.
fn small_distinct_eigen(b: &CMat) -> Result<(Vec<C64>, CMat)> {
    let m = b.nrows();
    let schur = Schur::new(b)?;
    let t = &schur.t;
    let scale = t.iter().map(|z| z.norm()).fold(1e-300, f64::max);
    let tiny = f64::EPSILON * scale;
    let mut z = CMat::zeros(m, m);
    for k in 0..m {
        z[(k, k)] = ONE;
        for j in (0..k).rev() {
            let mut acc = ZERO;
            for l in j + 1..=k {
                acc += t[(j, l)] * z[(l, k)];
            }
            let mut den = t[(j, j)] - t[(k, k)];
            if den.norm() < tiny {
                den = c(tiny, 0.0);
            }
            z[(j, k)] = -acc / den;
        }
    }
    let v = &schur.q * z;
    Ok((schur.eigenvalues(), v))
}

/// Full eigen-decomposition of a general complex matrix.
pub fn eigen(a: &CMat, opts: &EigOptions) -> Result<EigenDecomposition> {
    let n = a.nrows();
    let schur = Schur::new(a)?;
    let t = &schur.t;
    let vals = schur.eigenvalues();
    let scale = vals.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let radius = opts.cluster_radius * scale;
    let groups = cluster_indices(&vals, radius);

    let tiny = f64::EPSILON * scale * 1e-3;
    let shift_offset = c(1.0, 0.5) * (1e-11 * scale);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_e16e);

    let mut values = Vec::with_capacity(n);
    let mut right_cols: Vec<CVec> = Vec::with_capacity(n);
    let mut left_cols: Vec<CVec> = Vec::with_capacity(n);
    let mut cluster_of = Vec::with_capacity(n);
    let mut clusters = Vec::with_capacity(groups.len());

    for group in &groups {
        let m = group.len();
        let center = group.iter().map(|&i| vals[i]).sum::<C64>() / (m as f64);
        let sigma = center + shift_offset;

        let random_block = |rng: &mut ChaCha8Rng| {
            CMat::from_fn(n, m, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        };
        let mut z = random_block(&mut rng);
        let mut w = random_block(&mut rng);
        for _ in 0..3 {
            for j in 0..z.ncols() {
                let mut col: Vec<C64> = z.column(j).iter().cloned().collect();
                upper_solve(t, sigma, &mut col, tiny);
                z.set_column(j, &CVec::from_vec(col));
            }
            z = orthonormalize_columns(&z, 1e-12);
            for j in 0..w.ncols() {
                let mut col: Vec<C64> = w.column(j).iter().cloned().collect();
                lower_adjoint_solve(t, sigma, &mut col, tiny);
                w.set_column(j, &CVec::from_vec(col));
            }
            w = orthonormalize_columns(&w, 1e-12);
        }

        // geometric eigenspace inside the converged invariant subspace
        let geometric = |basis: &CMat, op: &dyn Fn(&CMat) -> CMat| -> (CMat, f64) {
            let resid = op(basis);
            let gram = resid.adjoint() * &resid;
            let (ev, vecs) = hermitian_eigen(&gram);
            let worst = ev.last().map(|x| x.max(0.0).sqrt()).unwrap_or(0.0);
            let keep: Vec<usize> = (0..ev.len())
                .filter(|&i| ev[i].max(0.0).sqrt() <= opts.defect_tol * scale)
                .collect();
            let mut sel = CMat::zeros(vecs.nrows(), keep.len());
            for (col, &i) in keep.iter().enumerate() {
                sel.set_column(col, &vecs.column(i));
            }
            (basis * sel, worst)
        };
        let shifted_t = |x: &CMat| t * x - x * center;
        let shifted_th = |x: &CMat| t.adjoint() * x - x * center.conj();
        let (zg, res_r) = geometric(&z, &shifted_t);
        let (wg, res_l) = geometric(&w, &shifted_th);
        let jordan_residual = res_r.max(res_l);
        let g = zg.ncols().min(wg.ncols());
        let defective = g < m || zg.ncols() != wg.ncols();

        let cluster_idx = clusters.len();
        if defective {
            let zg = orthonormalize_columns(&zg, 1e-12);
            for j in 0..zg.ncols() {
                let zj: CVec = zg.column(j).into_owned();
                let wj: CVec = if j < wg.ncols() { wg.column(j).into_owned() } else { zj.clone() };
                let lam = zj.dotc(&(t * &zj));
                values.push(lam);
                right_cols.push(&schur.q * zj);
                left_cols.push(&schur.q * wj);
                cluster_of.push(cluster_idx);
            }
            clusters.push(ClusterInfo {
                center,
                algebraic_multiplicity: m,
                geometric_multiplicity: zg.ncols(),
                overlap_condition: f64::INFINITY,
                jordan_residual,
                defective: true,
            });
            continue;
        }

        let overlap = wg.adjoint() * &zg;
        let sv = singular_values(&overlap);
        let cond = if sv.last().copied().unwrap_or(0.0) > 0.0 {
            sv[0] / sv[sv.len() - 1]
        } else {
            f64::INFINITY
        };
        let inv = overlap.clone().try_inverse().ok_or_else(|| {
            Error::Numerical(format!("singular overlap in eigenvalue cluster at {center}"))
        })?;
        let mut zb = &zg * inv;
        let mut wb = wg;

        let proj = wb.adjoint() * (t * &zb);
        let mut lambdas: Vec<C64> = (0..m).map(|i| proj[(i, i)]).collect();
        if m > 1 {
            let mut off = 0.0f64;
            for i in 0..m {
                for j in 0..m {
                    if i != j {
                        off = off.max(proj[(i, j)].norm());
                    }
                }
            }
            if off > 1e-10 * scale {
                let (ev, v) = small_distinct_eigen(&proj)?;
                if let Some(vinv) = v.clone().try_inverse() {
                    zb = &zb * &v;
                    wb = &wb * vinv.adjoint();
                    lambdas = ev;
                }
            }
        }
        for j in 0..m {
            let zj: CVec = zb.column(j).into_owned();
            let wj: CVec = wb.column(j).into_owned();
            let nz = zj.norm();
            let rho = &schur.q * (zj / c(nz, 0.0));
            let sig = &schur.q * (wj * c(nz, 0.0));
            values.push(lambdas[j]);
            right_cols.push(rho);
            left_cols.push(sig);
            cluster_of.push(cluster_idx);
        }
        clusters.push(ClusterInfo {
            center,
            algebraic_multiplicity: m,
            geometric_multiplicity: m,
            overlap_condition: cond,
            jordan_residual,
            defective: false,
        });
    }

    let k = values.len();
    let mut right = CMat::zeros(n, k);
    let mut left = CMat::zeros(n, k);
    for j in 0..k {
        right.set_column(j, &right_cols[j]);
        left.set_column(j, &left_cols[j]);
    }
    Ok(EigenDecomposition { values, right, left, cluster_of, clusters })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_matrix(n: usize, seed: u64) -> CMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMat::from_fn(n, n, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    #[test]
    fn schur_reconstructs_random_matrices() {
        for (n, seed) in [(1, 1), (2, 2), (5, 3), (17, 4), (40, 5)] {
            let a = random_matrix(n, seed);
            let s = Schur::new(&a).unwrap();
            let back = &s.q * &s.t * s.q.adjoint();
            assert!(frob(&(back - &a)) < 1e-12 * frob(&a).max(1.0), "n = {n}");
            let unit = s.q.adjoint() * &s.q - CMat::identity(n, n);
            assert!(frob(&unit) < 1e-12);
            for j in 0..n {
                for i in j + 1..n {
                    assert_eq!(s.t[(i, j)], ZERO);
                }
            }
        }
    }

    #[test]
    fn eigenvectors_are_biorthonormal() {
        let a = random_matrix(30, 9);
        let e = eigen(&a, &EigOptions::default()).unwrap();
        assert_eq!(e.values.len(), 30);
        let ov = e.left.adjoint() * &e.right;
        assert!(frob(&(ov - CMat::identity(30, 30))) < 1e-9);
        for k in 0..30 {
            let r = e.right.column(k).into_owned();
            let res = &a * &r - &r * e.values[k];
            assert!(res.norm() < 1e-10);
        }
    }

    #[test]
    fn degenerate_semisimple_cluster() {
        // similarity transform of diag(1,1,1,2,3)
        let d = CMat::from_diagonal(&CVec::from_vec(vec![ONE, ONE, ONE, c(2.0, 0.0), c(3.0, 0.0)]));
        let s = random_matrix(5, 11) + CMat::identity(5, 5) * c(2.0, 0.0);
        let a = &s * d * s.clone().try_inverse().unwrap();
        let e = eigen(&a, &EigOptions::default()).unwrap();
        assert_eq!(e.values.len(), 5);
        assert!(e.clusters.iter().all(|c| !c.defective));
        let ov = e.left.adjoint() * &e.right;
        assert!(frob(&(ov - CMat::identity(5, 5))) < 1e-8);
        let ones = e.values.iter().filter(|v| (**v - ONE).norm() < 1e-9).count();
        assert_eq!(ones, 3);
    }

    #[test]
    fn jordan_block_is_flagged() {
        let mut a = CMat::zeros(3, 3);
        a[(0, 0)] = ONE;
        a[(1, 1)] = ONE;
        a[(0, 1)] = ONE;
        a[(2, 2)] = c(-1.0, 0.0);
        let e = eigen(&a, &EigOptions::default()).unwrap();
        assert!(e.clusters.iter().any(|c| c.defective && c.algebraic_multiplicity == 2));
    }

    #[test]
    fn null_space_of_rank_deficient_matrix() {
        let mut a = CMat::zeros(4, 3);
        a[(0, 0)] = ONE;
        a[(1, 1)] = ONE;
        a[(2, 0)] = ONE;
        let ns = null_space(&a, 1e-12);
        assert_eq!(ns.ncols(), 1);
        assert!((&a * &ns).norm() < 1e-12);
        let wide = CMat::from_row_slice(1, 3, &[ONE, ONE, ZERO]);
        assert_eq!(null_space(&wide, 1e-12).ncols(), 2);
    }
}
