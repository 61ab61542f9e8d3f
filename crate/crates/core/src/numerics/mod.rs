//! Dense complex linear-algebra substrate.
//!
//! Basis convention for an `n`-site register: site 0 is the most significant
//! bit of the basis index, and bit value 0 is spin up. For two sites the basis
//! order is `{↑↑, ↑↓, ↓↑, ↓↓}`.

mod io;
mod linalg;
mod random;
mod state;

pub use io::{read_state, write_state, LoadedState, StateFile};
pub use linalg::{
    apply_site_op, conjugate_site, herm_eig, is_hermitian, max_abs_diff, normal_eigenvalues, permute_sites, site_mask,
    tensor, HermEig,
};
pub use random::{random_pure, Sampler};
pub use state::{basis_index, partial_trace, DensityMatrix, Marginal, PureState};

use nalgebra::{DMatrix, DVector, Matrix2};

pub type C64 = num_complex::Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;
pub type CMatrix2 = Matrix2<C64>;

/// Default absolute tolerance for predicates and checks.
pub const TOL: f64 = 1e-9;

/// Largest register held as a dense state vector.
pub const MAX_SITES: usize = 14;

/// Largest register held as a dense density matrix (`4^12` entries).
pub const MAX_MATRIX_SITES: usize = 12;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn check_sites(n: usize, max: usize) -> crate::Result<()> {
    if n == 0 || n > max {
        return Err(crate::Error::TooManySites { n, max });
    }
    Ok(())
}

/// Pauli matrices in the standard basis.
pub mod pauli {
    use super::{c, CMatrix2};

    pub fn identity() -> CMatrix2 {
        CMatrix2::identity()
    }

    pub fn x() -> CMatrix2 {
        CMatrix2::new(c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.))
    }

    pub fn y() -> CMatrix2 {
        CMatrix2::new(c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.))
    }

    pub fn z() -> CMatrix2 {
        CMatrix2::new(c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.))
    }
}
