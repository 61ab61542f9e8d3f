use nalgebra::linalg::SymmetricEigen;

use super::{CMatrix, CMatrix2, CVector, C64};
use crate::{Error, Result};

/// Kronecker product `A ⊗ B`; the left factor indexes the more significant
/// sites.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Bit mask selecting `site` in an `n`-site basis index.
#[inline]
pub fn site_mask(n: usize, site: usize) -> usize {
    1 << (n - 1 - site)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation from Hermiticity, or `None` if not square.
fn hermitian_defect(m: &CMatrix) -> Option<f64> {
    if !m.is_square() {
        return None;
    }
    let d = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in i..d {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    Some(worst)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    hermitian_defect(m).is_some_and(|d| d <= tol)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

impl HermEig {
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.values.len();
        let mut scaled = self.vectors.clone();
        for k in 0..d {
            let lambda = self.values[k];
            scaled.column_mut(k).scale_mut(lambda);
        }
        &scaled * self.vectors.adjoint()
    }
}

/// Hermitian eigendecomposition; rejects inputs more than `1e-10` away from
/// Hermitian.
pub fn herm_eig(h: &CMatrix) -> Result<HermEig> {
    let defect = hermitian_defect(h).ok_or(Error::DimensionMismatch {
        expected: h.nrows(),
        got: h.ncols(),
    })?;
    if defect > 1e-10 {
        return Err(Error::NotHermitian(defect));
    }
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(h.nrows(), h.ncols(), |i, k| eig.eigenvectors[(i, order[k])]);
    Ok(HermEig { values, vectors })
}

/// Eigenvalues of a normal matrix.
///
/// The Hermitian and anti-Hermitian parts of a normal matrix commute, so the
/// eigenvectors of a generic real combination `A + κB` diagonalize both; each
/// eigenvalue is then the Rayleigh quotient `v†Mv`. A combination is accepted
/// once every residual `‖Mv − λv‖` is below `1e-9‖M‖`.
pub fn normal_eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let a = (m + m.adjoint()).scale(0.5);
    let b = (m - m.adjoint()) * C64::new(0.0, -0.5);
    let scale = m.norm().max(1.0);
    let mut worst = f64::INFINITY;
    for kappa in [0.577_215_664_901_532_9, 1.324_717_957_244_746, 0.236_067_977_499_789_7] {
        let eig = herm_eig(&(&a + b.scale(kappa)))?;
        let mv = m * &eig.vectors;
        let mut values = Vec::with_capacity(m.nrows());
        worst = 0.0;
        for k in 0..m.ncols() {
            let v = eig.vectors.column(k);
            let lambda = v.dotc(&mv.column(k));
            worst = worst.max((mv.column(k) - v * lambda).norm());
            values.push(lambda);
        }
        if worst <= 1e-9 * scale {
            return Ok(values);
        }
    }
    Err(Error::InvalidArgument(format!(
        "matrix is not normal (eigen residual {worst:e})"
    )))
}

/// Applies a single-site operator to a state vector: `(op at site) · v`.
pub fn apply_site_op(v: &CVector, n: usize, site: usize, op: &CMatrix2) -> CVector {
    let mask = site_mask(n, site);
    let mut out = v.clone();
    for i0 in (0..v.len()).filter(|i| i & mask == 0) {
        let i1 = i0 | mask;
        let (a0, a1) = (v[i0], v[i1]);
        out[i0] = op[(0, 0)] * a0 + op[(0, 1)] * a1;
        out[i1] = op[(1, 0)] * a0 + op[(1, 1)] * a1;
    }
    out
}

/// Conjugates a register matrix by a single-site operator:
/// `(u at site) · m · (u at site)†`.
pub fn conjugate_site(m: &CMatrix, n: usize, site: usize, u: &CMatrix2) -> CMatrix {
    let mask = site_mask(n, site);
    let d = m.nrows();
    let mut left = m.clone();
    for i0 in (0..d).filter(|i| i & mask == 0) {
        let i1 = i0 | mask;
        for col in 0..d {
            let (a0, a1) = (m[(i0, col)], m[(i1, col)]);
            left[(i0, col)] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
            left[(i1, col)] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
        }
    }
    let mut out = left.clone();
    for j0 in (0..d).filter(|j| j & mask == 0) {
        let j1 = j0 | mask;
        for row in 0..d {
            let (a0, a1) = (left[(row, j0)], left[(row, j1)]);
            out[(row, j0)] = a0 * u[(0, 0)].conj() + a1 * u[(0, 1)].conj();
            out[(row, j1)] = a0 * u[(1, 0)].conj() + a1 * u[(1, 1)].conj();
        }
    }
    out
}

fn permute_index(x: usize, n: usize, perm: &[usize]) -> usize {
    perm.iter().enumerate().fold(0, |acc, (i, &src)| {
        if x & site_mask(n, src) != 0 {
            acc | site_mask(n, i)
        } else {
            acc
        }
    })
}

/// Reorders the sites of a register matrix: output site `i` carries input
/// site `perm[i]`.
pub fn permute_sites(m: &CMatrix, n: usize, perm: &[usize]) -> Result<CMatrix> {
    if perm.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: perm.len(),
        });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n {
            return Err(Error::SiteOutOfRange { site: p, n });
        }
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::DuplicateSite(p));
        }
    }
    let d = 1usize << n;
    let map: Vec<usize> = (0..d).map(|x| permute_index(x, n, perm)).collect();
    let mut out = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            out[(map[i], map[j])] = m[(i, j)];
        }
    }
    Ok(out)
}
