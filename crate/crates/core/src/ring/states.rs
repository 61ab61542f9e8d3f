//! Γ eigenstates, the vertex states `ρ_r`, ring observables and gauge fixing.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::spectrum::{block_basis, ModeParity};
use crate::numerics::{
    c, check_sites, site_mask, CVector, DensityMatrix, Marginal, PureState, C64, MAX_MATRIX_SITES, MAX_SITES,
};
use crate::rebit::{normalize_angle, wrap_to_pi, LocalRotation};
use crate::transport::{link_coefficient, NO_CORRELATION};
use crate::{Error, Result};

/// Link phases must agree to this tolerance for `K` and `θ` to be read off `⟨Γ⟩`.
pub const PHASE_TOL: f64 = 1e-8;

/// `|Ω_{r,u}⟩ = d†_{m0} ⋯ d†_{m0+u−1} |0⟩` with `m0 = r − ⌊u/2⌋ mod n`.
///
/// The amplitude on a configuration with up spins at `j_1 < ⋯ < j_u` is
/// `det[φ_{m_a}(j_b)]`, `φ_m(j) = e^{−i k_m j}/√n`. Creating in ascending site
/// order makes every Jordan–Wigner string trivial.
pub fn omega_state(n: usize, r: usize, u: usize) -> Result<PureState> {
    check_sites(n, MAX_SITES)?;
    if n < 2 {
        return Err(Error::InvalidRingSize {
            n,
            reason: "a ring needs at least two sites",
        });
    }
    if r >= n || u > n {
        return Err(Error::InvalidArgument(format!(
            "need r < n and u ≤ n, got r = {r}, u = {u}, n = {n}"
        )));
    }
    let parity = ModeParity::of(u);
    let m0 = (r + n - (u / 2) % n) % n;
    let k: Vec<f64> = (0..u).map(|a| parity.wave_number(n, (m0 + a) % n)).collect();
    let norm = (n as f64).sqrt();
    let mut amps = CVector::zeros(1 << n);
    for x in block_basis(n, u) {
        let ups: Vec<usize> = (0..n).filter(|&j| x & site_mask(n, j) == 0).collect();
        let slater = DMatrix::from_fn(u, u, |a, b| C64::from_polar(1.0 / norm, -k[a] * ups[b] as f64));
        amps[x] = if u == 0 { c(1.0, 0.0) } else { slater.determinant() };
    }
    PureState::normalized(n, amps)
}

/// Vertex state `ρ_r`: the pure `Ω_{r,n/2}` for even `n`, the equal mixture of
/// `Ω_{r,(n±1)/2}` for odd `n`.
pub fn rho_r(n: usize, r: usize) -> Result<DensityMatrix> {
    check_sites(n, MAX_MATRIX_SITES)?;
    if n.is_multiple_of(2) {
        omega_state(n, r, n / 2)?.to_density()
    } else {
        DensityMatrix::uniform_mixture(&[omega_state(n, r, n.div_ceil(2))?, omega_state(n, r, (n - 1) / 2)?])
    }
}

/// Link coefficients `c_j = Tr(ρ a†_{j+1} a_j)`, `j = 0..n`.
pub fn link_coefficients<S: Marginal>(state: &S) -> Result<Vec<C64>> {
    let n = state.sites();
    if n < 2 {
        return Err(Error::InvalidRingSize {
            n,
            reason: "a ring needs at least two sites",
        });
    }
    (0..n).map(|j| link_coefficient(state, j, (j + 1) % n)).collect()
}

/// `⟨Γ⟩ = (1/n) Σ_j c_j`.
pub fn gamma_expectation<S: Marginal>(state: &S) -> Result<C64> {
    let cs = link_coefficients(state)?;
    Ok(cs.iter().sum::<C64>() / cs.len() as f64)
}

/// `⟨Γ⟩` with the correlation `K = 2|⟨Γ⟩|` and holonomy `θ = n arg⟨Γ⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RingObservables {
    pub gamma_expect: C64,
    pub k: f64,
    /// In `[0, 2π)`; `None` when `K` vanishes.
    pub theta: Option<f64>,
}

impl RingObservables {
    pub fn from_gamma(n: usize, gamma_expect: C64) -> Self {
        let k = 2.0 * gamma_expect.norm();
        let theta = (k > 2.0 * NO_CORRELATION).then(|| normalize_angle(n as f64 * gamma_expect.arg()));
        Self { gamma_expect, k, theta }
    }
}

/// Largest pairwise deviation among the phases of the non-vanishing `c_j`.
pub fn phase_spread(cs: &[C64]) -> f64 {
    let phases: Vec<f64> = cs
        .iter()
        .filter(|z| z.norm() > NO_CORRELATION)
        .map(|z| z.arg())
        .collect();
    let mut worst = 0.0f64;
    for (i, a) in phases.iter().enumerate() {
        for b in &phases[i + 1..] {
            worst = worst.max(wrap_to_pi(a - b).abs());
        }
    }
    worst
}

/// Ring observables of a state whose link phases are already equal.
pub fn ring_observables<S: Marginal>(state: &S) -> Result<RingObservables> {
    let cs = link_coefficients(state)?;
    let spread = phase_spread(&cs);
    if spread > PHASE_TOL {
        return Err(Error::UnequalLinkPhases { spread });
    }
    let n = cs.len();
    Ok(RingObservables::from_gamma(n, cs.iter().sum::<C64>() / n as f64))
}

/// Local rotations making every link phase equal to the mean phase
/// `ψ = (1/n) Σ φ_j`; returns the rotated state and the site angles.
pub fn equalize_phases(state: &DensityMatrix) -> Result<(DensityMatrix, Vec<f64>)> {
    let angles = equalizing_angles(&link_coefficients(state)?)?;
    Ok((state.rotate_sites(&angles)?, angles))
}

/// Site angles `ξ_0 = 0`, `ξ_{j+1} = ξ_j + ψ − φ_j`.
pub fn equalizing_angles(cs: &[C64]) -> Result<Vec<f64>> {
    let n = cs.len();
    if let Some(j) = cs.iter().position(|z| z.norm() <= NO_CORRELATION) {
        return Err(Error::BrokenLink(j, (j + 1) % n));
    }
    let phi: Vec<f64> = cs.iter().map(|z| wrap_to_pi(z.arg())).collect();
    let psi = phi.iter().sum::<f64>() / n as f64;
    let mut xi = vec![0.0; n];
    for j in 0..n - 1 {
        xi[j + 1] = xi[j] + psi - phi[j];
    }
    Ok(xi)
}

fn orbit(pattern: &str) -> Vec<usize> {
    let chars: Vec<char> = pattern.chars().collect();
    let n = chars.len();
    let mut out: Vec<usize> = (0..n)
        .map(|t| {
            let s: String = (0..n).map(|i| chars[(i + t) % n]).collect();
            crate::numerics::basis_index(&s).expect("valid spin pattern")
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Translation-invariant six-rebit state with link coefficients `e^{iφ}/6`:
/// `(i/√12)[e^{iφ/2}(↑↑↓↑↓↓ + translations) + e^{−iφ/2}(↑↑↓↓↑↓ + translations)]`.
pub fn six_rebit_state(phi: f64) -> PureState {
    let mut amps = CVector::zeros(64);
    let pre = c(0.0, 1.0 / 12f64.sqrt());
    for x in orbit("uududd") {
        amps[x] += pre * C64::from_polar(1.0, phi / 2.0);
    }
    for x in orbit("uuddud") {
        amps[x] += pre * C64::from_polar(1.0, -phi / 2.0);
    }
    PureState::new(6, amps).expect("twelve orthogonal terms of weight 1/12")
}

/// Site angles taking `ρ_0` to `ρ_r`: `2πrj/n` at site `j`.
pub fn vertex_gauge(n: usize, r: usize) -> Vec<f64> {
    (0..n).map(|j| 2.0 * PI * (r * j) as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{max_abs_diff, Sampler};
    use crate::rebit::{is_rebit_mixed, is_rebit_pure};
    use crate::ring::{extreme_eigenvalues, gamma_apply, kmax_closed};

    #[test]
    fn two_site_omega() {
        let s = omega_state(2, 0, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = PureState::from_terms(&[("ud", c(h, 0.)), ("du", c(h, 0.))]).unwrap();
        assert!((s.inner(&want).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn omega_states_are_gamma_eigenvectors() {
        for n in 2..=10 {
            let g = extreme_eigenvalues(n);
            let us: Vec<usize> = if n % 2 == 0 {
                vec![n / 2]
            } else {
                vec![(n - 1) / 2, n.div_ceil(2)]
            };
            for u in us {
                for (r, &gr) in g.iter().enumerate() {
                    let psi = omega_state(n, r, u).unwrap();
                    let v = psi.amplitudes();
                    let residual = (gamma_apply(v, n).unwrap() - v * gr).norm();
                    assert!(residual < 1e-10, "n={n} r={r} u={u}: {residual}");
                    if n % 2 == 0 && n <= 8 {
                        assert!(is_rebit_pure(&psi), "n={n} r={r}");
                    }
                }
            }
        }
    }

    #[test]
    fn large_ring_omega() {
        let psi = omega_state(14, 3, 7).unwrap();
        let v = psi.amplitudes();
        let g = extreme_eigenvalues(14)[3];
        assert!((gamma_apply(v, 14).unwrap() - v * g).norm() < 1e-10);
    }

    #[test]
    fn omega_argument_errors() {
        assert!(omega_state(4, 4, 2).is_err());
        assert!(omega_state(4, 0, 5).is_err());
        assert!(omega_state(1, 0, 0).is_err());
    }

    #[test]
    fn rho_r_examples() {
        let g4 = gamma_expectation(&rho_r(4, 0).unwrap()).unwrap();
        assert!((g4 - c(0.353_553_390_593_273_8, 0.0)).norm() < 1e-10);
        let g5 = gamma_expectation(&rho_r(5, 2).unwrap()).unwrap();
        let want = C64::from_polar((PI / 10.0).cos() / (5.0 * (PI / 5.0).sin()), 4.0 * PI / 5.0);
        assert!((g5 - want).norm() < 1e-10);
    }

    #[test]
    fn rho_r_invariants() {
        for n in 2..=8 {
            let g = extreme_eigenvalues(n);
            let base = rho_r(n, 0).unwrap();
            for (r, &gr) in g.iter().enumerate() {
                let rho = rho_r(n, r).unwrap();
                assert!((gamma_expectation(&rho).unwrap() - gr).norm() < 1e-10);
                assert!(is_rebit_mixed(&rho), "n={n} r={r}");
                assert!(max_abs_diff(rho.translated().matrix(), rho.matrix()) < 1e-10);
                let gauged = base.rotate_sites(&vertex_gauge(n, r)).unwrap();
                assert!(max_abs_diff(gauged.matrix(), rho.matrix()) < 1e-10, "n={n} r={r}");
            }
        }
    }

    #[test]
    fn observables_examples() {
        let obs = ring_observables(&rho_r(6, 0).unwrap()).unwrap();
        assert!((obs.k - 2.0 / 3.0).abs() < 1e-12);
        assert!(obs.theta.unwrap().abs() < 1e-10);
        let flat = ring_observables(&DensityMatrix::maximally_mixed(4).unwrap()).unwrap();
        assert_eq!(flat.k, 0.0);
        assert_eq!(flat.theta, None);
    }

    #[test]
    fn observables_reject_unequal_phases() {
        let rho = rho_r(4, 0)
            .unwrap()
            .rotate_site(1, crate::rebit::RebitRotation::new(0.3))
            .unwrap();
        assert!(matches!(ring_observables(&rho), Err(Error::UnequalLinkPhases { .. })));
    }

    #[test]
    fn equalize_examples() {
        let rho = rho_r(4, 0).unwrap();
        let (same, angles) = equalize_phases(&rho).unwrap();
        assert!(angles.iter().all(|a| a.abs() < 1e-12));
        assert!(max_abs_diff(same.matrix(), rho.matrix()) < 1e-12);

        let twisted = rho.rotate_site(1, crate::rebit::RebitRotation::new(0.3)).unwrap();
        let (fixed, _) = equalize_phases(&twisted).unwrap();
        let obs = ring_observables(&fixed).unwrap();
        assert!(wrap_to_pi(obs.theta.unwrap()).abs() < 1e-10);
        assert!((obs.k - ring_observables(&rho).unwrap().k).abs() < 1e-12);
    }

    #[test]
    fn equalize_preserves_gauge_invariants() {
        let mut s = Sampler::new(9);
        let rho = rho_r(5, 2).unwrap();
        for _ in 0..5 {
            let angles: Vec<f64> = (0..5).map(|_| s.angle()).collect();
            let scrambled = rho.rotate_sites(&angles).unwrap();
            let before = link_coefficients(&scrambled).unwrap();
            let (fixed, _) = equalize_phases(&scrambled).unwrap();
            let after = link_coefficients(&fixed).unwrap();
            assert!(phase_spread(&after) < 1e-10);
            for (a, b) in before.iter().zip(&after) {
                assert!((a.norm() - b.norm()).abs() < 1e-12);
            }
            let holonomy = |cs: &[C64]| cs.iter().map(|z| z / z.norm()).product::<C64>();
            assert!((holonomy(&before) - holonomy(&after)).norm() < 1e-10);
            let theta = ring_observables(&fixed).unwrap().theta.unwrap();
            assert!(wrap_to_pi(theta).abs() < 1e-9);
        }
    }

    #[test]
    fn equalize_rejects_broken_links() {
        let up = PureState::from_terms(&[("uuuu", c(1., 0.))])
            .unwrap()
            .to_density()
            .unwrap();
        assert!(matches!(equalize_phases(&up), Err(Error::BrokenLink(0, 1))));
    }

    #[test]
    fn six_rebit_links() {
        for phi in [0.0, 0.3, PI / 6.0, 2.0, -1.1] {
            let psi = six_rebit_state(phi);
            assert!(is_rebit_pure(&psi));
            let rho = psi.to_density().unwrap();
            assert!(max_abs_diff(rho.translated().matrix(), rho.matrix()) < 1e-12);
            for z in link_coefficients(&psi).unwrap() {
                assert!((z - C64::from_polar(1.0 / 6.0, phi)).norm() < 1e-12, "phi={phi}: {z}");
            }
            let obs = ring_observables(&psi).unwrap();
            assert!((obs.k - 1.0 / 3.0).abs() < 1e-12);
            assert!(wrap_to_pi(obs.theta.unwrap() - 6.0 * phi).abs() < 1e-10);
            assert!(obs.k < kmax_closed(6, obs.theta.unwrap()).unwrap());
        }
        let theta = ring_observables(&six_rebit_state(PI / 6.0)).unwrap().theta.unwrap();
        assert!((theta - PI).abs() < 1e-10);
    }

    #[test]
    fn six_rebit_pair_marginal() {
        let m = six_rebit_state(0.0).marginal(&[0, 1]).unwrap();
        assert!((m.entry(1, 2) - c(1.0 / 6.0, 0.0)).norm() < 1e-12);
        assert!((m.entry(0, 0).re - 1.0 / 6.0).abs() < 1e-12);
        assert!((m.entry(1, 1).re - 1.0 / 3.0).abs() < 1e-12);
    }
}
