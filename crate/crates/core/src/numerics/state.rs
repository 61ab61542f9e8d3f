use nalgebra::linalg::Cholesky;
use nalgebra::DMatrix;

use super::{check_sites, is_hermitian, site_mask, CMatrix, CVector, C64, MAX_MATRIX_SITES, MAX_SITES};
use crate::{Error, Result};

/// Basis index of a spin string such as `"uudd"` or `"↑↑↓↓"`; site 0 first.
pub fn basis_index(spins: &str) -> Result<usize> {
    let chars: Vec<char> = spins.chars().collect();
    let n = chars.len();
    let mut index = 0;
    for (site, ch) in chars.iter().enumerate() {
        match ch {
            'u' | 'U' | '↑' | '0' => {}
            'd' | 'D' | '↓' | '1' => index |= site_mask(n, site),
            other => return Err(Error::InvalidArgument(format!("bad spin symbol {other:?}"))),
        }
    }
    Ok(index)
}

/// A normalized state vector over an `n`-site spin-½ register.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amps: CVector,
}

impl PureState {
    /// Wraps an amplitude vector; its norm must be 1 within `1e-12`.
    pub fn new(n: usize, amps: CVector) -> Result<Self> {
        check_sites(n, MAX_SITES)?;
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                got: amps.len(),
            });
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { n, amps })
    }

    /// Normalizes `amps` and wraps it.
    pub fn normalized(n: usize, amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        Self::new(n, amps.unscale(norm))
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_sites(n, MAX_SITES)?;
        let mut amps = CVector::zeros(1 << n);
        if index >= amps.len() {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range")));
        }
        amps[index] = C64::new(1.0, 0.0);
        Self::new(n, amps)
    }

    /// Builds a state from `(spin string, amplitude)` terms, then normalizes.
    pub fn from_terms(terms: &[(&str, C64)]) -> Result<Self> {
        let n = terms
            .first()
            .map(|(s, _)| s.chars().count())
            .ok_or_else(|| Error::InvalidArgument("no terms".into()))?;
        check_sites(n, MAX_SITES)?;
        let mut amps = CVector::zeros(1 << n);
        for (spins, amp) in terms {
            if spins.chars().count() != n {
                return Err(Error::InvalidArgument(format!("term {spins:?} has wrong length")));
            }
            amps[basis_index(spins)?] += *amp;
        }
        Self::normalized(n, amps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        check_sites(self.n, MAX_MATRIX_SITES)?;
        Ok(DensityMatrix::from_matrix_unchecked(
            self.n,
            &self.amps * self.amps.adjoint(),
        ))
    }
}

/// A Hermitian, unit-trace, positive semidefinite matrix over an `n`-site
/// register.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity and trace within `1e-12` and the smallest
    /// eigenvalue against `-1e-10`.
    pub fn new(n: usize, mat: CMatrix) -> Result<Self> {
        check_sites(n, MAX_MATRIX_SITES)?;
        let d = 1 << n;
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: mat.nrows(),
            });
        }
        if !is_hermitian(&mat, 1e-12) {
            let defect = super::max_abs_diff(&mat, &mat.adjoint());
            return Err(Error::NotHermitian(defect));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::BadTrace(tr.re));
        }
        // ρ + 1e-10·I is positive definite iff min eigenvalue > −1e-10; the
        // test runs on the real symmetric embedding [[Re, −Im], [Im, Re]].
        let embed = DMatrix::from_fn(2 * d, 2 * d, |i, j| {
            let z = 0.5 * (mat[(i % d, j % d)] + mat[(j % d, i % d)].conj());
            let v = match (i < d, j < d) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            };
            if i == j {
                v + 1e-10
            } else {
                v
            }
        });
        if Cholesky::new(embed).is_none() {
            return Err(Error::NotPositive);
        }
        Ok(Self { n, mat })
    }

    /// Wraps a matrix known to be a valid state by construction.
    pub(crate) fn from_matrix_unchecked(n: usize, mat: CMatrix) -> Self {
        debug_assert_eq!(mat.nrows(), 1 << n);
        Self { n, mat }
    }

    pub fn from_pure(state: &PureState) -> Result<Self> {
        state.to_density()
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_sites(n, MAX_MATRIX_SITES)?;
        let d = 1 << n;
        Ok(Self {
            n,
            mat: CMatrix::identity(d, d).unscale(d as f64),
        })
    }

    /// Convex combination `Σ w_i ρ_i`; weights must be nonnegative and sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::BadWeights("empty mixture".into()))?;
        let n = first.1.n;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0 || !w.is_finite()) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::BadWeights(format!("weights sum to {total}")));
        }
        let d = 1 << n;
        let mut mat = CMatrix::zeros(d, d);
        for (w, rho) in parts {
            if rho.n != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: rho.n,
                });
            }
            mat += rho.mat.scale(*w);
        }
        Ok(Self { n, mat })
    }

    /// Equal mixture of pure states.
    pub fn uniform_mixture(states: &[PureState]) -> Result<Self> {
        let n = states
            .first()
            .map(PureState::n)
            .ok_or_else(|| Error::BadWeights("empty mixture".into()))?;
        check_sites(n, MAX_MATRIX_SITES)?;
        let d = 1 << n;
        let mut mat = CMatrix::zeros(d, d);
        for s in states {
            if s.n != n {
                return Err(Error::DimensionMismatch { expected: n, got: s.n });
            }
            mat += s.amps.clone() * s.amps.adjoint();
        }
        Ok(Self {
            n,
            mat: mat.unscale(states.len() as f64),
        })
    }

    /// Tensor product; `self` occupies the leading sites.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        check_sites(self.n + other.n, MAX_MATRIX_SITES)?;
        Ok(Self {
            n: self.n + other.n,
            mat: self.mat.kronecker(&other.mat),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    /// `Tr(ρ · op)`.
    pub fn expectation(&self, op: &CMatrix) -> C64 {
        // Σ_ij ρ_ij op_ji without forming the product
        self.mat
            .row_iter()
            .zip(op.column_iter())
            .map(|(r, c)| r.transpose().dot(&c))
            .sum()
    }

    /// `U ρ U†` for a full-register unitary.
    pub fn conjugated(&self, u: &CMatrix) -> Self {
        Self {
            n: self.n,
            mat: u * &self.mat * u.adjoint(),
        }
    }

    /// Reorders sites: output site `i` carries input site `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Ok(Self {
            n: self.n,
            mat: super::permute_sites(&self.mat, self.n, perm)?,
        })
    }

    /// Cyclic translation by one site: site `j` moves to site `j + 1`.
    pub fn translated(&self) -> Self {
        let n = self.n;
        let perm: Vec<usize> = (0..n).map(|i| (i + n - 1) % n).collect();
        self.permuted(&perm).expect("cyclic permutation is valid")
    }
}

fn validate_keep(n: usize, keep: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &s in keep {
        if s >= n {
            return Err(Error::SiteOutOfRange { site: s, n });
        }
        if std::mem::replace(&mut seen[s], true) {
            return Err(Error::DuplicateSite(s));
        }
    }
    if keep.is_empty() {
        return Err(Error::InvalidArgument("keep list is empty".into()));
    }
    Ok(())
}

/// Index offsets for the kept sites (in listed order) and the traced sites.
fn split_offsets(n: usize, keep: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let k = keep.len();
    let traced: Vec<usize> = (0..n).filter(|s| !keep.contains(s)).collect();
    let place = |sites: &[usize], x: usize| {
        let m = sites.len();
        sites
            .iter()
            .enumerate()
            .filter(|(i, _)| x & (1 << (m - 1 - i)) != 0)
            .fold(0, |acc, (_, &s)| acc | site_mask(n, s))
    };
    let kept = (0..1 << k).map(|x| place(keep, x)).collect();
    let rest = (0..1 << traced.len()).map(|x| place(&traced, x)).collect();
    (kept, rest)
}

/// Reduced density matrices of a register.
pub trait Marginal {
    fn sites(&self) -> usize;

    /// Reduced state on `keep`, in the listed order.
    fn marginal(&self, keep: &[usize]) -> Result<DensityMatrix>;
}

impl Marginal for DensityMatrix {
    fn sites(&self) -> usize {
        self.n
    }

    fn marginal(&self, keep: &[usize]) -> Result<DensityMatrix> {
        validate_keep(self.n, keep)?;
        let (kept, rest) = split_offsets(self.n, keep);
        let dk = kept.len();
        let out = CMatrix::from_fn(dk, dk, |r, c| {
            rest.iter().map(|&t| self.mat[(kept[r] | t, kept[c] | t)]).sum()
        });
        Ok(DensityMatrix::from_matrix_unchecked(keep.len(), out))
    }
}

impl Marginal for PureState {
    fn sites(&self) -> usize {
        self.n
    }

    fn marginal(&self, keep: &[usize]) -> Result<DensityMatrix> {
        validate_keep(self.n, keep)?;
        check_sites(keep.len(), MAX_MATRIX_SITES)?;
        let (kept, rest) = split_offsets(self.n, keep);
        let dk = kept.len();
        let out = CMatrix::from_fn(dk, dk, |r, c| {
            rest.iter()
                .map(|&t| self.amps[kept[r] | t] * self.amps[kept[c] | t].conj())
                .sum()
        });
        Ok(DensityMatrix::from_matrix_unchecked(keep.len(), out))
    }
}

/// Functional form of [`Marginal::marginal`].
pub fn partial_trace<S: Marginal>(state: &S, keep: &[usize]) -> Result<DensityMatrix> {
    state.marginal(keep)
}
