//! Rebit representations, validity predicates and rotations.
//!
//! States are held in the horizontal representation: a rebit is a qubit whose
//! Bloch vector lies in the x–y plane, and a rebit rotation by `ξ` is
//! `diag(1, e^{iξ})`. The real-number representation is reached by
//! conjugating every site with `U = e^{-i(π/4)σ_x}`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use crate::numerics::{c, conjugate_site, site_mask, CMatrix, CMatrix2, DensityMatrix, PureState, C64};
use crate::{Error, Result};

/// Tolerance of the rebit predicates.
pub const REBIT_TOL: f64 = 1e-10;

/// Maps an angle into `[0, 2π)`.
pub fn normalize_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Maps an angle into `(-π, π]`.
pub fn wrap_to_pi(x: f64) -> f64 {
    let r = normalize_angle(x);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// `U = e^{-i(π/4)σ_x}`, the per-site map from horizontal to real form.
pub fn horizontal_to_real_unitary() -> CMatrix2 {
    let s = FRAC_1_SQRT_2;
    CMatrix2::new(c(s, 0.), c(0., -s), c(0., -s), c(s, 0.))
}

fn conjugate_all(rho: &DensityMatrix, u: &CMatrix2) -> DensityMatrix {
    let n = rho.n();
    let mut m = rho.matrix().clone();
    for site in 0..n {
        m = conjugate_site(&m, n, site, u);
    }
    DensityMatrix::from_matrix_unchecked(n, m)
}

/// Re-expresses a horizontal-representation rebit state as a real density
/// matrix.
pub fn horizontal_to_real(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if !is_rebit_mixed(rho) {
        return Err(Error::NotRebit("input fails the mixed rebit condition".into()));
    }
    let mut out = conjugate_all(rho, &horizontal_to_real_unitary());
    // imaginary parts are rounding residue at this point
    let real = out.matrix().map(|z| c(z.re, 0.0));
    out = DensityMatrix::from_matrix_unchecked(rho.n(), real);
    Ok(out)
}

/// Inverse of [`horizontal_to_real`]: conjugation by `U†` on every site.
pub fn real_to_horizontal(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let worst = rho.matrix().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if worst > REBIT_TOL {
        return Err(Error::NotRebit(format!("matrix has imaginary part {worst:.3e}")));
    }
    Ok(conjugate_all(rho, &horizontal_to_real_unitary().adjoint()))
}

fn flip_mask(n: usize) -> usize {
    (1 << n) - 1
}

/// Fits the phase `β` of `σ_x^{⊗n}|Ψ⟩ = e^{iβ}|Ψ*⟩` and verifies it on every
/// amplitude. Returns `None` when no single phase works.
pub fn rebit_phase(psi: &PureState, tol: f64) -> Option<f64> {
    let amps = psi.amplitudes();
    let flip = flip_mask(psi.n());
    let mut order: Vec<usize> = (0..amps.len()).collect();
    order.sort_by(|&a, &b| amps[b].norm().total_cmp(&amps[a].norm()));
    let k0 = order.into_iter().find(|&k| amps[k] != C64::new(0.0, 0.0))?;
    let beta = (amps[k0 ^ flip] / amps[k0].conj()).arg();
    let phase = C64::from_polar(1.0, beta);
    let holds = (0..amps.len()).all(|k| (amps[k ^ flip] - phase * amps[k].conj()).norm() <= tol);
    holds.then(|| normalize_angle(beta))
}

/// The pure-state rebit condition `σ_x^{⊗n}|Ψ⟩ = e^{iβ}|Ψ*⟩`.
pub fn is_rebit_pure(psi: &PureState) -> bool {
    rebit_phase(psi, REBIT_TOL).is_some()
}

pub fn is_rebit_mixed_with_tol(rho: &DensityMatrix, tol: f64) -> bool {
    let m = rho.matrix();
    let flip = flip_mask(rho.n());
    let d = m.nrows();
    (0..d).all(|i| (0..d).all(|j| (m[(i ^ flip, j ^ flip)] - m[(i, j)].conj()).norm() <= tol))
}

/// The mixed-state rebit condition `σ_x^{⊗n} ρ σ_x^{⊗n} = ρ*`.
pub fn is_rebit_mixed(rho: &DensityMatrix) -> bool {
    is_rebit_mixed_with_tol(rho, REBIT_TOL)
}

/// Rotation about the z axis, represented canonically as `diag(1, e^{iξ})`
/// with `ξ ∈ [0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RebitRotation {
    xi: f64,
}

impl RebitRotation {
    pub fn new(xi: f64) -> Self {
        Self {
            xi: normalize_angle(xi),
        }
    }

    pub fn identity() -> Self {
        Self { xi: 0.0 }
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn matrix(&self) -> CMatrix2 {
        CMatrix2::new(c(1., 0.), c(0., 0.), c(0., 0.), C64::from_polar(1.0, self.xi))
    }

    pub fn inverse(&self) -> Self {
        Self::new(-self.xi)
    }

    pub fn compose(&self, other: &RebitRotation) -> Self {
        Self::new(self.xi + other.xi)
    }
}

pub fn rebit_rotation(xi: f64) -> RebitRotation {
    RebitRotation::new(xi)
}

/// Local z rotations acting on states.
pub trait LocalRotation: Sized {
    /// Applies `diag(1, e^{iξ_j})` on every site `j` (`angles.len()` must
    /// equal the site count).
    fn rotate_sites(&self, angles: &[f64]) -> Result<Self>;

    fn rotate_site(&self, site: usize, rotation: RebitRotation) -> Result<Self>;
}

/// Phase picked up by basis state `i`: Σ of `ξ_j` over its down spins.
fn basis_phases(n: usize, angles: &[f64]) -> Vec<f64> {
    (0..1usize << n)
        .map(|i| (0..n).filter(|&s| i & site_mask(n, s) != 0).map(|s| angles[s]).sum())
        .collect()
}

fn single_site_angles(n: usize, site: usize, r: RebitRotation) -> Result<Vec<f64>> {
    if site >= n {
        return Err(Error::SiteOutOfRange { site, n });
    }
    let mut angles = vec![0.0; n];
    angles[site] = r.xi();
    Ok(angles)
}

impl LocalRotation for PureState {
    fn rotate_sites(&self, angles: &[f64]) -> Result<Self> {
        if angles.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: angles.len(),
            });
        }
        let phases = basis_phases(self.n(), angles);
        let amps = self
            .amplitudes()
            .iter()
            .zip(&phases)
            .map(|(a, &p)| a * C64::from_polar(1.0, p))
            .collect::<Vec<_>>();
        PureState::new(self.n(), amps.into())
    }

    fn rotate_site(&self, site: usize, rotation: RebitRotation) -> Result<Self> {
        self.rotate_sites(&single_site_angles(self.n(), site, rotation)?)
    }
}

impl LocalRotation for DensityMatrix {
    fn rotate_sites(&self, angles: &[f64]) -> Result<Self> {
        if angles.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: angles.len(),
            });
        }
        let phases = basis_phases(self.n(), angles);
        let m = self.matrix();
        let out = CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
            m[(i, j)] * C64::from_polar(1.0, phases[i] - phases[j])
        });
        Ok(DensityMatrix::from_matrix_unchecked(self.n(), out))
    }

    fn rotate_site(&self, site: usize, rotation: RebitRotation) -> Result<Self> {
        self.rotate_sites(&single_site_angles(self.n(), site, rotation)?)
    }
}

/// Applies a rebit rotation to one site of a state.
pub fn apply_rotation<S: LocalRotation>(state: &S, site: usize, r: RebitRotation) -> Result<S> {
    state.rotate_site(site, r)
}
