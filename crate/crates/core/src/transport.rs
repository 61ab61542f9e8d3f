//! Parallel transporter and correlation strength of a rebit link.
//!
//! A two-rebit reduced state in the horizontal representation has the form
//!
//! ```text
//!     ⎡ a    x1   x2   x3 ⎤
//!     ⎢ x1*  b    c    x2 ⎥
//!     ⎢ x2*  c*   b    x1 ⎥
//!     ⎣ x3*  x2*  x1*  a  ⎦
//! ```
//!
//! in the basis `{↑↑, ↑↓, ↓↑, ↓↓}`. The transporter of the link is the
//! rotation by `arg c` and the correlation strength is `2|c|`.

use std::f64::consts::TAU;

use crate::numerics::Sampler;
use crate::numerics::{c, CMatrix, CMatrix2, CVector, DensityMatrix, Marginal, PureState, C64};
use crate::rebit::{is_rebit_mixed_with_tol, real_to_horizontal, RebitRotation};
use crate::{Error, Result};

/// Below this `|c|` a link carries no correlation and no transporter.
pub const NO_CORRELATION: f64 = 1e-12;

/// Tolerance for accepting a two-site marginal as a rebit pair.
pub const PAIR_TOL: f64 = 1e-9;

/// Default node count for [`fidelity_quadrature`].
pub const DEFAULT_NODES: usize = 512;

/// Matrix elements of a two-rebit reduced state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairReduced {
    pub a: f64,
    pub b: f64,
    pub c: C64,
    pub x1: C64,
    pub x2: C64,
    pub x3: C64,
}

impl PairReduced {
    /// Reads the elements from a 4×4 matrix, checking the rebit pattern.
    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        if m.nrows() != 4 || m.ncols() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: m.nrows(),
            });
        }
        let rho = DensityMatrix::from_matrix_unchecked(2, m.clone());
        if !crate::numerics::is_hermitian(m, PAIR_TOL) || !is_rebit_mixed_with_tol(&rho, PAIR_TOL) {
            return Err(Error::NotRebit("two-site marginal violates the rebit pattern".into()));
        }
        Ok(Self {
            a: m[(0, 0)].re,
            b: m[(1, 1)].re,
            c: m[(1, 2)],
            x1: m[(0, 1)],
            x2: m[(0, 2)],
            x3: m[(0, 3)],
        })
    }

    /// A pair with all `x_i = 0`: `a = (1 − 2b)/2`.
    pub fn rotation_invariant(b: f64, c: C64) -> Self {
        Self {
            a: 0.5 - b,
            b,
            c,
            x1: C64::new(0.0, 0.0),
            x2: C64::new(0.0, 0.0),
            x3: C64::new(0.0, 0.0),
        }
    }

    /// Assembles the 4×4 matrix.
    pub fn matrix(&self) -> CMatrix {
        let (a, b) = (c(self.a, 0.0), c(self.b, 0.0));
        let (x1, x2, x3, cc) = (self.x1, self.x2, self.x3, self.c);
        CMatrix::from_row_slice(
            4,
            4,
            &[
                a,
                x1,
                x2,
                x3, //
                x1.conj(),
                b,
                cc,
                x2, //
                x2.conj(),
                cc.conj(),
                b,
                x1, //
                x3.conj(),
                x2.conj(),
                x1.conj(),
                a,
            ],
        )
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(2, self.matrix())
    }

    /// Phase of `c` in `[0, 2π)`.
    pub fn phase(&self) -> f64 {
        crate::rebit::normalize_angle(self.c.arg())
    }

    pub fn correlation(&self) -> f64 {
        2.0 * self.c.norm()
    }
}

/// Raw `|↑↓⟩⟨↓↑|` coefficient of the `(j, k)` marginal, without validation.
pub fn link_coefficient<S: Marginal>(state: &S, j: usize, k: usize) -> Result<C64> {
    if j == k {
        return Err(Error::DuplicateSite(j));
    }
    Ok(state.marginal(&[j, k])?.entry(1, 2))
}

/// Reduced pair elements of the link `(j, k)`, site `j` first.
pub fn pair_reduced<S: Marginal>(state: &S, j: usize, k: usize) -> Result<PairReduced> {
    if j == k {
        return Err(Error::DuplicateSite(j));
    }
    PairReduced::from_matrix(state.marginal(&[j, k])?.matrix())
}

/// Conditional state of particle `k` after particle `j` is found in `psi`,
/// and the probability of that outcome.
pub fn measurement_map(pair: &PairReduced, psi: &PureState) -> Result<(DensityMatrix, f64)> {
    if psi.n() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: psi.n(),
        });
    }
    let m = pair.matrix();
    let v = psi.amplitudes();
    // ω_ss' = Σ_rr' ψ_r* ρ_{rs,r's'} ψ_r'
    let omega = CMatrix::from_fn(2, 2, |s, sp| {
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..2 {
            for rp in 0..2 {
                acc += v[r].conj() * m[(2 * r + s, 2 * rp + sp)] * v[rp];
            }
        }
        acc
    });
    let p = omega.trace().re;
    if p < 1e-14 {
        return Ok((pair.to_density()?.marginal(&[1])?, p));
    }
    Ok((DensityMatrix::from_matrix_unchecked(1, omega.unscale(p)), p))
}

/// Equatorial pure state `(|↑⟩ + e^{iγ}|↓⟩)/√2`.
pub fn equatorial_state(gamma: f64) -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PureState::new(1, CVector::from_vec(vec![c(s, 0.0), C64::from_polar(s, gamma)]))
        .expect("equatorial state is normalized")
}

/// Average fidelity `F(R) = ½[1 + 2|c| cos(ξ − φ)]`, `φ = arg c`.
pub fn fidelity_closed(pair: &PairReduced, xi: f64) -> f64 {
    0.5 * (1.0 + 2.0 * pair.c.norm() * (xi - pair.c.arg()).cos())
}

/// Numerator and denominator of the fidelity functional, each averaged over
/// `nodes` equally spaced equatorial states (trapezoidal rule on the circle).
pub fn fidelity_quadrature_terms(pair: &PairReduced, xi: f64, nodes: usize) -> (f64, f64) {
    assert!(nodes > 0, "quadrature needs at least one node");
    let m = pair.matrix();
    let r = RebitRotation::new(xi).matrix();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..nodes {
        let gamma = TAU * i as f64 / nodes as f64;
        let psi = equatorial_state(gamma);
        let v = nalgebra::Vector2::new(psi.amplitude(0), psi.amplitude(1));
        let rv = r * v;
        let prod = CVector::from_vec(vec![v[0] * rv[0], v[0] * rv[1], v[1] * rv[0], v[1] * rv[1]]);
        num += prod.dotc(&(&m * &prod)).re;
        // ⟨ψ|Tr_k ρ|ψ⟩
        let mut p = C64::new(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                let reduced = m[(2 * a, 2 * b)] + m[(2 * a + 1, 2 * b + 1)];
                p += v[a].conj() * reduced * v[b];
            }
        }
        den += p.re;
    }
    (num / nodes as f64, den / nodes as f64)
}

/// Fidelity functional by direct quadrature over the circle of rebit states.
pub fn fidelity_quadrature(pair: &PairReduced, xi: f64, nodes: usize) -> f64 {
    let (num, den) = fidelity_quadrature_terms(pair, xi, nodes);
    num / den
}

/// Transporter and correlation strength of one link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransportResult {
    /// `None` when `|c|` is below [`NO_CORRELATION`].
    pub transporter: Option<RebitRotation>,
    pub correlation: f64,
}

pub fn transporter(pair: &PairReduced) -> TransportResult {
    let magnitude = pair.c.norm();
    TransportResult {
        transporter: (magnitude >= NO_CORRELATION).then(|| RebitRotation::new(pair.c.arg())),
        correlation: 2.0 * magnitude,
    }
}

/// `(2|c|)²` from the x/y block of the correlation matrix
/// `τ_μν = Tr[ρ (σ_μ ⊗ σ_ν)]`.
pub fn correlation_tau(pair: &PairReduced) -> f64 {
    let rho = pair.matrix();
    let tau = |a: &CMatrix2, b: &CMatrix2| {
        let op = CMatrix::from_fn(4, 4, |i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)]);
        DensityMatrix::from_matrix_unchecked(2, rho.clone()).expectation(&op).re
    };
    let (x, y) = (crate::numerics::pauli::x(), crate::numerics::pauli::y());
    let (txx, tyy, txy, tyx) = (tau(&x, &x), tau(&y, &y), tau(&x, &y), tau(&y, &x));
    ((txx + tyy).powi(2) + (txy - tyx).powi(2)) / 4.0
}

/// Random two-rebit state: a mixture of up to four real pure states, mapped
/// to the horizontal representation.
pub fn random_rebit_pair(s: &mut Sampler) -> PairReduced {
    let rank = 1 + s.index(4);
    let w = s.simplex(rank);
    let mut m = CMatrix::zeros(4, 4);
    for wi in w {
        let v = s.real_unit(4);
        m += (&v * v.adjoint()).scale(wi);
    }
    let h = real_to_horizontal(&DensityMatrix::from_matrix_unchecked(2, m)).expect("two sites");
    PairReduced::from_matrix(h.matrix()).expect("real states map to rebit pairs")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::max_abs_diff;
    use crate::rebit::{wrap_to_pi, LocalRotation};
    use std::f64::consts::PI;

    fn psi_plus_pair() -> PairReduced {
        PairReduced::rotation_invariant(0.5, c(0.5, 0.0))
    }

    #[test]
    fn readout_examples() {
        let plus = PureState::from_terms(&[("ud", c(1., 0.)), ("du", c(1., 0.))]).unwrap();
        let p = pair_reduced(&plus, 0, 1).unwrap();
        assert!(p.a.abs() < 1e-15 && (p.b - 0.5).abs() < 1e-15);
        assert!((p.c - c(0.5, 0.)).norm() < 1e-15);
        assert_eq!([p.x1, p.x2, p.x3], [c(0., 0.); 3]);

        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let q = pair_reduced(&mixed, 0, 1).unwrap();
        assert!((q.a - 0.25).abs() < 1e-15 && (q.b - 0.25).abs() < 1e-15);
        assert_eq!(q.c, c(0., 0.));
    }

    #[test]
    fn readout_rejects_non_rebit_marginals() {
        let up = PureState::from_terms(&[("uuu", c(1., 0.))]).unwrap();
        assert!(matches!(pair_reduced(&up, 0, 2), Err(Error::NotRebit(_))));
        assert!(matches!(pair_reduced(&up, 1, 1), Err(Error::DuplicateSite(1))));
    }

    #[test]
    fn measurement_map_examples() {
        let (omega, p) = measurement_map(&psi_plus_pair(), &equatorial_state(0.0)).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        let target = equatorial_state(0.0).to_density().unwrap();
        assert!(max_abs_diff(omega.matrix(), target.matrix()) < 1e-15);

        let flat = PairReduced::rotation_invariant(0.25, c(0., 0.));
        let (omega, p) = measurement_map(&flat, &equatorial_state(1.1)).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!(max_abs_diff(omega.matrix(), &CMatrix::identity(2, 2).unscale(2.0)) < 1e-15);
    }

    #[test]
    fn measurement_map_is_rotate_and_depolarize() {
        let cval = C64::from_polar(0.3, 1.2);
        let pair = PairReduced::rotation_invariant(0.4, cval);
        let weight = 2.0 * cval.norm();
        for gamma in [0.0, 0.4, 2.0, 5.5] {
            let (omega, _) = measurement_map(&pair, &equatorial_state(gamma)).unwrap();
            let rotated = equatorial_state(gamma + cval.arg()).to_density().unwrap();
            let want = rotated.matrix().scale(weight) + CMatrix::identity(2, 2).scale((1.0 - weight) / 2.0);
            assert!(max_abs_diff(omega.matrix(), &want) < 1e-14);
        }
    }

    #[test]
    fn measurement_map_output_is_a_state() {
        let mut s = Sampler::new(12);
        for _ in 0..50 {
            let pair = random_rebit_pair(&mut s);
            let psi = equatorial_state(s.angle());
            let (omega, p) = measurement_map(&pair, &psi).unwrap();
            assert!(p >= 1e-14);
            assert!(DensityMatrix::new(1, omega.matrix().clone()).is_ok());
        }
    }

    #[test]
    fn fidelity_closed_examples() {
        assert!((fidelity_closed(&psi_plus_pair(), 0.0) - 1.0).abs() < 1e-15);
        let flat = PairReduced::rotation_invariant(0.25, c(0., 0.));
        for xi in [0.0, 1.0, 4.0] {
            assert_eq!(fidelity_closed(&flat, xi), 0.5);
        }
        let p = PairReduced::rotation_invariant(0.3, C64::from_polar(0.3, PI / 3.0));
        assert!((fidelity_closed(&p, PI / 3.0) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let mut s = Sampler::new(5);
        for _ in 0..100 {
            let pair = random_rebit_pair(&mut s);
            let xi = s.angle();
            let (num, den) = fidelity_quadrature_terms(&pair, xi, DEFAULT_NODES);
            assert!((den - 0.5).abs() < 1e-12);
            assert!((num / den - fidelity_closed(&pair, xi)).abs() < 1e-10);
        }
        let flat = PairReduced::rotation_invariant(0.25, c(0., 0.));
        assert!((fidelity_quadrature(&flat, 0.3, 2) - 0.5).abs() < 1e-15);
        assert!((fidelity_quadrature(&psi_plus_pair(), 0.0, 8) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fidelity_maximized_at_phase_of_c() {
        let mut s = Sampler::new(31);
        for _ in 0..10 {
            let pair = random_rebit_pair(&mut s);
            let f = |xi: f64| fidelity_quadrature(&pair, xi, 64);
            let grid = 4096;
            let best = (0..grid)
                .map(|i| TAU * i as f64 / grid as f64)
                .max_by(|a, b| f(*a).total_cmp(&f(*b)))
                .unwrap();
            // golden-section refinement around the grid maximum
            let (mut lo, mut hi) = (best - TAU / grid as f64, best + TAU / grid as f64);
            let g = (5f64.sqrt() - 1.0) / 2.0;
            for _ in 0..60 {
                let m1 = hi - g * (hi - lo);
                let m2 = lo + g * (hi - lo);
                if f(m1) < f(m2) {
                    lo = m1;
                } else {
                    hi = m2;
                }
            }
            let argmax = 0.5 * (lo + hi);
            assert!(wrap_to_pi(argmax - pair.c.arg()).abs() < 1e-6);
            let spread = f(pair.c.arg()) - f(pair.c.arg() + PI);
            assert!((spread - pair.correlation()).abs() < 1e-12);
        }
    }

    #[test]
    fn transporter_examples() {
        let t = transporter(&psi_plus_pair());
        assert_eq!(t.transporter.unwrap().xi(), 0.0);
        assert!((t.correlation - 1.0).abs() < 1e-15);
        let none = transporter(&PairReduced::rotation_invariant(0.25, c(0., 0.)));
        assert!(none.transporter.is_none());
        assert_eq!(none.correlation, 0.0);
    }

    #[test]
    fn tau_identity() {
        assert!((correlation_tau(&psi_plus_pair()) - 1.0).abs() < 1e-14);
        assert!(correlation_tau(&PairReduced::rotation_invariant(0.25, c(0., 0.))).abs() < 1e-15);
        let mut s = Sampler::new(77);
        for _ in 0..200 {
            let pair = random_rebit_pair(&mut s);
            assert!((correlation_tau(&pair) - pair.correlation().powi(2)).abs() < 1e-10);
        }
    }

    #[test]
    fn gauge_covariance_of_links() {
        let mut s = Sampler::new(2);
        for _ in 0..20 {
            let real = PureState::new(3, s.real_unit(8)).unwrap().to_density().unwrap();
            let rho = real_to_horizontal(&real).unwrap();
            let angles = [s.angle(), s.angle(), s.angle()];
            let rotated = rho.rotate_sites(&angles).unwrap();
            let before = pair_reduced(&rho, 0, 2).unwrap();
            let after = pair_reduced(&rotated, 0, 2).unwrap();
            assert!((before.correlation() - after.correlation()).abs() < 1e-14);
            let shift = wrap_to_pi(after.c.arg() - before.c.arg() - (angles[2] - angles[0]));
            assert!(shift.abs() < 1e-10);
        }
    }
}
