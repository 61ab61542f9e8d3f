//! Qubit links: fully entangled fraction, qubit fidelity, twisted Werner
//! states and a six-qubit ring family.
//!
//! For qubits the reference state of a link is the singlet
//! `|Ψ⁻⟩ = (|↑↓⟩ − |↓↑⟩)/√2`, whose transporter is the identity.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::numerics::{c, pauli, CMatrix, CMatrix2, CVector, DensityMatrix, Marginal, PureState, Sampler, C64};
use crate::optimize::nelder_mead;
use crate::rebit::wrap_to_pi;
use crate::{Error, Result};

/// Top-two spectral gap below which the maximizing rotation is not unique.
pub const UNIQUE_GAP: f64 = 1e-8;

/// Largest tolerated difference between the spectral and optimizer values of
/// the fully entangled fraction.
pub const METHOD_TOL: f64 = 1e-6;

fn check_pair(rho: &DensityMatrix) -> Result<()> {
    if rho.n() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: rho.n(),
        });
    }
    Ok(())
}

pub fn singlet() -> CVector {
    CVector::from_vec(vec![c(0., 0.), c(FRAC_1_SQRT_2, 0.), c(-FRAC_1_SQRT_2, 0.), c(0., 0.)])
}

/// `(I ⊗ R)|Ψ⁻⟩`.
pub fn rotated_singlet(r: &CMatrix2) -> CVector {
    let s = singlet();
    let mut out = CVector::zeros(4);
    for a in 0..2 {
        for b in 0..2 {
            for bp in 0..2 {
                out[2 * a + b] += r[(b, bp)] * s[2 * a + bp];
            }
        }
    }
    out
}

/// `⟨Ψ⁻|(I⊗R†) ρ (I⊗R)|Ψ⁻⟩`.
pub fn singlet_overlap(rho: &DensityMatrix, r: &CMatrix2) -> f64 {
    let w = rotated_singlet(r);
    w.dotc(&(rho.matrix() * &w)).re
}

/// Qubit fidelity functional `F(R) = 1/3 + (2/3)⟨Ψ⁻|(I⊗R†)ρ(I⊗R)|Ψ⁻⟩`.
pub fn qubit_fidelity(rho: &DensityMatrix, r: &CMatrix2) -> Result<f64> {
    check_pair(rho)?;
    Ok(1.0 / 3.0 + 2.0 / 3.0 * singlet_overlap(rho, r))
}

/// The fidelity functional integrated directly over the Bloch sphere:
/// Gauss–Legendre in `cos ϑ` times the trapezoidal rule in the azimuth.
/// Measuring `ψ` on the first site is compared with `R` applied to the flipped
/// state `ψ̃ = σ_y ψ*`.
pub fn qubit_fidelity_quadrature(rho: &DensityMatrix, r: &CMatrix2, polar: usize, azimuth: usize) -> Result<f64> {
    check_pair(rho)?;
    let polar =
        NonZeroUsize::new(polar).ok_or_else(|| Error::InvalidArgument("need at least one polar node".into()))?;
    if azimuth == 0 {
        return Err(Error::InvalidArgument("need at least one azimuthal node".into()));
    }
    let m = rho.matrix();
    let sy = pauli::y();
    let rule = GaussLegendre::new(polar);
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..azimuth {
        let phi = TAU * k as f64 / azimuth as f64;
        let ring = |x: f64| -> (f64, f64) {
            let half = x.clamp(-1.0, 1.0).acos() / 2.0;
            let psi = nalgebra::Vector2::new(c(half.cos(), 0.), C64::from_polar(half.sin(), phi));
            let chi = r * (sy * psi.map(|z| z.conj()));
            let prod = CVector::from_vec(vec![psi[0] * chi[0], psi[0] * chi[1], psi[1] * chi[0], psi[1] * chi[1]]);
            let overlap = prod.dotc(&(m * &prod)).re;
            let mut p = C64::new(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    p += psi[a].conj() * (m[(2 * a, 2 * b)] + m[(2 * a + 1, 2 * b + 1)]) * psi[b];
                }
            }
            (overlap, p.re)
        };
        num += rule.integrate(-1.0, 1.0, |x| ring(x).0);
        den += rule.integrate(-1.0, 1.0, |x| ring(x).1);
    }
    Ok(num / den)
}

/// Magic basis: `(↑↑+↓↓)/√2, i(↑↑−↓↓)/√2, i(↑↓+↓↑)/√2, (↑↓−↓↑)/√2` as columns.
/// Maximally entangled states are exactly the real combinations of these,
/// up to a global phase.
pub fn magic_basis() -> CMatrix {
    let h = FRAC_1_SQRT_2;
    let (o, r, i) = (c(0., 0.), c(h, 0.), c(0., h));
    CMatrix::from_row_slice(
        4,
        4,
        &[
            r, i, o, o, //
            o, o, i, r, //
            o, o, i, -r, //
            r, -i, o, o,
        ],
    )
}

/// Multiplies by the phase making the first non-negligible entry (row-major)
/// real and positive.
pub fn canonical_phase(u: &CMatrix2) -> CMatrix2 {
    let first = [u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]]
        .into_iter()
        .find(|z| z.norm() > 1e-12);
    match first {
        Some(z) => u * (z.conj() / z.norm()),
        None => *u,
    }
}

/// The rotation `R` with `(I⊗R)|Ψ⁻⟩ = ψ` for a maximally entangled `ψ`.
pub fn rotation_from_entangled(psi: &CVector) -> CMatrix2 {
    // ψ has coefficient matrix E = C Rᵀ with C = [[0, 1], [−1, 0]]/√2.
    let e = CMatrix2::new(psi[0], psi[1], psi[2], psi[3]);
    let s = std::f64::consts::SQRT_2;
    let c_inv = CMatrix2::new(c(0., 0.), c(-s, 0.), c(s, 0.), c(0., 0.));
    canonical_phase(&(c_inv * e).transpose())
}

/// Fully entangled fraction from the spectrum of `Re(ρ)` in the magic basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralFef {
    pub f: f64,
    pub rotation: CMatrix2,
    /// Gap between the two largest eigenvalues.
    pub gap: f64,
}

pub fn fef_spectral(rho: &DensityMatrix) -> Result<SpectralFef> {
    check_pair(rho)?;
    let mb = magic_basis();
    let in_magic = mb.adjoint() * rho.matrix() * &mb;
    let real = DMatrix::from_fn(4, 4, |i, j| 0.5 * (in_magic[(i, j)].re + in_magic[(j, i)].re));
    let eig = SymmetricEigen::new(real);
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let top = order[0];
    let x: DVector<f64> = eig.eigenvectors.column(top).into_owned();
    let psi = &mb * x.map(|v| c(v, 0.0));
    Ok(SpectralFef {
        f: eig.eigenvalues[top],
        rotation: rotation_from_entangled(&psi),
        gap: eig.eigenvalues[top] - eig.eigenvalues[order[1]],
    })
}

/// `R = R_z(a) R_y(b) R_z(c)`.
pub fn euler_zyz(a: f64, b: f64, cc: f64) -> CMatrix2 {
    let rz = |t: f64| {
        CMatrix2::new(
            C64::from_polar(1.0, -t / 2.0),
            c(0., 0.),
            c(0., 0.),
            C64::from_polar(1.0, t / 2.0),
        )
    };
    let (cb, sb) = ((b / 2.0).cos(), (b / 2.0).sin());
    let ry = CMatrix2::new(c(cb, 0.), c(-sb, 0.), c(sb, 0.), c(cb, 0.));
    rz(a) * ry * rz(cc)
}

/// Fully entangled fraction by multi-start Nelder–Mead over Euler angles.
pub fn fef_optimizer(rho: &DensityMatrix) -> Result<(f64, CMatrix2)> {
    check_pair(rho)?;
    let objective = |x: &[f64]| -singlet_overlap(rho, &euler_zyz(x[0], x[1], x[2]));
    let mut best: Option<(f64, Vec<f64>)> = None;
    for a in [0.0, PI / 2.0, PI, 1.5 * PI] {
        for b in [PI / 4.0, 3.0 * PI / 4.0] {
            for cc in [0.0, PI] {
                let mut run = nelder_mead(objective, &[a, b, cc], 0.5, 1e-14, 4000);
                // restart from the converged point to escape a collapsed simplex
                run = nelder_mead(objective, &run.x, 0.05, 1e-15, 4000);
                if best.as_ref().is_none_or(|(v, _)| run.value < *v) {
                    best = Some((run.value, run.x));
                }
            }
        }
    }
    let (value, x) = best.expect("at least one start");
    Ok((-value, canonical_phase(&euler_zyz(x[0], x[1], x[2]))))
}

/// Fully entangled fraction with its maximizing rotation.
#[derive(Clone, Debug, PartialEq)]
pub struct FullyEntangledFraction {
    pub f: f64,
    pub rotation: CMatrix2,
    pub unique: bool,
    /// The optimizer's value, kept as a cross-check.
    pub f_optimizer: f64,
}

/// `f = max_R ⟨Ψ⁻|(I⊗R†)ρ(I⊗R)|Ψ⁻⟩`, computed spectrally and confirmed by a
/// direct search over rotations.
pub fn fully_entangled_fraction(rho: &DensityMatrix) -> Result<FullyEntangledFraction> {
    let spectral = fef_spectral(rho)?;
    let (f_opt, _) = fef_optimizer(rho)?;
    if (spectral.f - f_opt).abs() > METHOD_TOL {
        return Err(Error::MethodDisagreement {
            spectral: spectral.f,
            optimizer: f_opt,
        });
    }
    Ok(FullyEntangledFraction {
        f: spectral.f,
        rotation: spectral.rotation,
        unique: spectral.gap >= UNIQUE_GAP,
        f_optimizer: f_opt,
    })
}

/// Transporter and correlation `(4f − 1)/3` of a qubit link.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitTransport {
    /// Present only when the maximizing rotation is unique.
    pub rotation: Option<CMatrix2>,
    pub correlation: f64,
    pub unique: bool,
    pub f: f64,
}

pub fn qubit_transporter(rho: &DensityMatrix) -> Result<QubitTransport> {
    let fef = fully_entangled_fraction(rho)?;
    Ok(QubitTransport {
        rotation: fef.unique.then_some(fef.rotation),
        correlation: (4.0 * fef.f - 1.0) / 3.0,
        unique: fef.unique,
        f: fef.f,
    })
}

/// Whether two 2×2 unitaries agree up to a global phase.
pub fn same_up_to_phase(a: &CMatrix2, b: &CMatrix2, tol: f64) -> bool {
    let overlap = (a.adjoint() * b).trace();
    (overlap.norm() - 2.0).abs() <= tol && (a * (overlap / overlap.norm()) - b).norm() <= tol
}

fn check_unitary(v: &CMatrix2) -> Result<()> {
    if (v.adjoint() * v - CMatrix2::identity()).norm() > 1e-10 {
        return Err(Error::InvalidArgument("V is not unitary".into()));
    }
    Ok(())
}

/// `p (I⊗V)|Ψ⁻⟩⟨Ψ⁻|(I⊗V†) + (1−p) I/4`.
pub fn twisted_werner(p: f64, v: &CMatrix2) -> Result<DensityMatrix> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidArgument(format!("weight p = {p} outside (0, 1]")));
    }
    check_unitary(v)?;
    let w = rotated_singlet(v);
    let m = (&w * w.adjoint()).scale(p) + CMatrix::identity(4, 4).scale((1.0 - p) / 4.0);
    Ok(DensityMatrix::from_matrix_unchecked(2, m))
}

/// Coefficients of the six-qubit family
/// `α(↑↑↑↓↓↓ − ⋯) + β[e^{−iξ}(↑↓↑↓↓↑ − ⋯) + e^{iξ}(↑↑↓↓↑↓ − ⋯)] + γ(↓↑↓↑↓↑ − ↑↓↑↓↑↓)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SixQubitParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub xi: f64,
}

impl SixQubitParams {
    pub fn norm_sqr(&self) -> f64 {
        6.0 * self.alpha.powi(2) + 12.0 * self.beta.powi(2) + 2.0 * self.gamma.powi(2)
    }

    pub fn with_xi(self, xi: f64) -> Self {
        Self { xi, ..self }
    }

    /// Pair elements `(a, b, c)`; the pair matrix is `diag(a, b, b, a)` with
    /// `−c` in the `↑↓, ↓↑` slot.
    pub fn pair_elements(&self) -> (f64, f64, C64) {
        let (al, be, ga) = (self.alpha, self.beta, self.gamma);
        let a = 2.0 * al * al + 2.0 * be * be;
        let b = al * al + 4.0 * be * be + ga * ga;
        let cc = (C64::from_polar(al + ga, self.xi) + C64::from_polar(be, -2.0 * self.xi)) * (2.0 * be);
        (a, b, cc)
    }

    /// `(α + γ − 2β)/(α + γ + β)`, the small-`ξ` slope of the link phase.
    pub fn phase_slope(&self) -> f64 {
        let s = self.alpha + self.gamma;
        (s - 2.0 * self.beta) / (s + self.beta)
    }

    /// `12β²(α+γ)/(α+γ+β)`, the small-`ξ` loss `K_q⁰ − K_q` per `ξ²`.
    pub fn xi_curvature(&self) -> f64 {
        let s = self.alpha + self.gamma;
        12.0 * self.beta.powi(2) * s / (s + self.beta)
    }

    /// `β²(α+γ)(α+γ+β) / (3(α+γ−2β)²)`, the loss per `θ²`.
    pub fn theta_curvature(&self) -> f64 {
        let s = self.alpha + self.gamma;
        self.beta.powi(2) * s * (s + self.beta) / (3.0 * (s - 2.0 * self.beta).powi(2))
    }
}

/// `α = (130 + 34√13)^{−1/2}`, `β = (3 + √13)α/2`, `γ = (4 + √13)α`, `ξ = 0`.
pub fn optimal_coefficients() -> SixQubitParams {
    let s13 = 13f64.sqrt();
    let alpha = (130.0 + 34.0 * s13).powf(-0.5);
    SixQubitParams {
        alpha,
        beta: 0.5 * (3.0 + s13) * alpha,
        gamma: (4.0 + s13) * alpha,
        xi: 0.0,
    }
}

/// `K_q⁰ = (2 + √13)/9`.
pub fn kq_zero() -> f64 {
    (2.0 + 13f64.sqrt()) / 9.0
}

fn add_orbit(amps: &mut CVector, pattern: &str, weight: C64) {
    let chars: Vec<char> = pattern.chars().collect();
    let n = chars.len();
    for t in 0..n {
        let s: String = (0..n).map(|i| chars[(i + t) % n]).collect();
        let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
        amps[crate::numerics::basis_index(&s).expect("valid pattern")] += weight * sign;
    }
}

pub fn six_qubit_state(params: &SixQubitParams) -> Result<PureState> {
    let norm = params.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(norm));
    }
    let mut amps = CVector::zeros(64);
    add_orbit(&mut amps, "uuuddd", c(params.alpha, 0.0));
    add_orbit(&mut amps, "ududdu", C64::from_polar(params.beta, -params.xi));
    add_orbit(&mut amps, "uuddud", C64::from_polar(params.beta, params.xi));
    amps[crate::numerics::basis_index("dududu")?] += params.gamma;
    amps[crate::numerics::basis_index("ududud")?] -= params.gamma;
    PureState::new(6, amps)
}

/// Pair elements `(b, c)` read from the traced nearest-neighbour marginal.
pub fn traced_pair(state: &PureState) -> Result<(f64, C64)> {
    let m = state.marginal(&[0, 1])?;
    Ok((m.entry(1, 1).re, -m.entry(1, 2)))
}

/// `K_q = (4f − 1)/3` with `f = b + |c|`.
pub fn kq_from_pair(b: f64, cc: C64) -> f64 {
    (4.0 * (b + cc.norm()) - 1.0) / 3.0
}

/// One row of a `K_q(ξ)` scan at the optimal coefficients.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct KqRow {
    pub xi: f64,
    /// Link phase `arg c` in `(−π, π]`.
    pub phi: f64,
    /// `6φ`, unwrapped.
    pub theta: f64,
    pub kq_exact: f64,
    /// `K_q⁰ − [12β²(α+γ)/(α+γ+β)] ξ²`.
    pub kq_perturbative: f64,
}

pub fn kq_scan(xi_values: &[f64]) -> Result<Vec<KqRow>> {
    let opt = optimal_coefficients();
    xi_values
        .iter()
        .map(|&xi| {
            let (b, cc) = traced_pair(&six_qubit_state(&opt.with_xi(xi))?)?;
            let phi = wrap_to_pi(cc.arg());
            Ok(KqRow {
                xi,
                phi,
                theta: 6.0 * phi,
                kq_exact: kq_from_pair(b, cc),
                kq_perturbative: kq_zero() - opt.xi_curvature() * xi * xi,
            })
        })
        .collect()
}

/// Least-squares coefficients `[c0, c1, c2]` of `y ≈ c0 + c1 x + c2 x²`.
pub fn quadratic_fit(xs: &[f64], ys: &[f64]) -> Result<[f64; 3]> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::InvalidArgument(
            "quadratic fit needs at least three paired points".into(),
        ));
    }
    let a = DMatrix::from_fn(xs.len(), 3, |i, k| xs[i].powi(k as i32));
    let y = DVector::from_column_slice(ys);
    let sol = a
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok([sol[0], sol[1], sol[2]])
}

/// Fit of exact `K_q` against `θ` for `ξ` evenly spaced on `[−ξ_max, ξ_max]`.
pub fn kq_theta_fit(xi_max: f64, points: usize) -> Result<[f64; 3]> {
    let xs: Vec<f64> = (0..points)
        .map(|i| -xi_max + 2.0 * xi_max * i as f64 / (points - 1).max(1) as f64)
        .collect();
    let rows = kq_scan(&xs)?;
    let theta: Vec<f64> = rows.iter().map(|r| r.theta).collect();
    let kq: Vec<f64> = rows.iter().map(|r| r.kq_exact).collect();
    quadratic_fit(&theta, &kq)
}

/// Central-difference `dφ/dξ` at `ξ = 0` from the traced states.
pub fn measured_phase_slope(h: f64) -> Result<f64> {
    let rows = kq_scan(&[-h, h])?;
    Ok((rows[1].phi - rows[0].phi) / (2.0 * h))
}

fn params_from_angles(u: f64, v: f64) -> SixQubitParams {
    let (x, y, z) = ((u.sin() * v.cos()).abs(), (u.sin() * v.sin()).abs(), u.cos().abs());
    SixQubitParams {
        alpha: x / 6f64.sqrt(),
        beta: y / 12f64.sqrt(),
        gamma: z / 2f64.sqrt(),
        xi: 0.0,
    }
}

/// Maximizes the traced `K_q` at `ξ = 0` over normalized `(α, β, γ)` with
/// Nelder–Mead from `starts` random points on the sphere of
/// `(√6α, √12β, √2γ)`.
pub fn reoptimize_coefficients(seed: u64, starts: usize) -> Result<(SixQubitParams, f64)> {
    let mut sampler = Sampler::new(seed);
    let objective = |x: &[f64]| {
        let p = params_from_angles(x[0], x[1]);
        let state = six_qubit_state(&p).expect("angles give a normalized state");
        let (b, cc) = traced_pair(&state).expect("six sites");
        -kq_from_pair(b, cc)
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..starts {
        let x0 = [sampler.uniform(0.0, PI), sampler.uniform(0.0, PI)];
        let mut run = nelder_mead(objective, &x0, 0.3, 1e-15, 2000);
        run = nelder_mead(objective, &run.x, 0.01, 1e-16, 2000);
        if best.as_ref().is_none_or(|(v, _)| run.value < *v) {
            best = Some((run.value, run.x));
        }
    }
    let (value, x) = best.ok_or_else(|| Error::InvalidArgument("need at least one start".into()))?;
    Ok((params_from_angles(x[0], x[1]), -value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::max_abs_diff;

    fn diag_phase(phi: f64) -> CMatrix2 {
        CMatrix2::new(c(1., 0.), c(0., 0.), c(0., 0.), C64::from_polar(1.0, phi))
    }

    fn projector(v: &CVector) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(2, v * v.adjoint())
    }

    #[test]
    fn fidelity_examples() {
        let id = CMatrix2::identity();
        assert!((qubit_fidelity(&projector(&singlet()), &id).unwrap() - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let mut s = Sampler::new(3);
        assert!((qubit_fidelity(&mixed, &s.unitary2()).unwrap() - 0.5).abs() < 1e-15);
        let v = diag_phase(0.4);
        let w = twisted_werner(0.6, &v).unwrap();
        let want = 1.0 / 3.0 + 2.0 / 3.0 * (0.6 + 0.4 / 4.0);
        assert!((qubit_fidelity(&w, &v).unwrap() - want).abs() < 1e-14);
        assert!(qubit_fidelity(&DensityMatrix::maximally_mixed(3).unwrap(), &id).is_err());
    }

    #[test]
    fn fidelity_quadrature_agrees() {
        let mut s = Sampler::new(8);
        for _ in 0..100 {
            let rank = 1 + s.index(4);
            let rho = s.mixed(2, rank).unwrap();
            let r = s.unitary2();
            let closed = qubit_fidelity(&rho, &r).unwrap();
            let quad = qubit_fidelity_quadrature(&rho, &r, 8, 8).unwrap();
            assert!((closed - quad).abs() < 1e-6, "{closed} vs {quad}");
        }
        let singlet_quad = qubit_fidelity_quadrature(&projector(&singlet()), &CMatrix2::identity(), 4, 4).unwrap();
        assert!((singlet_quad - 1.0).abs() < 1e-12);
    }

    #[test]
    fn magic_basis_is_unitary_and_contains_singlet() {
        let mb = magic_basis();
        assert!(max_abs_diff(&(mb.adjoint() * &mb), &CMatrix::identity(4, 4)) < 1e-15);
        assert!((mb.column(3) - singlet()).norm() < 1e-15);
    }

    #[test]
    fn fef_examples() {
        let s = fully_entangled_fraction(&projector(&singlet())).unwrap();
        assert!((s.f - 1.0).abs() < 1e-12 && s.unique);
        assert!(max_abs_diff(&dyn2(&s.rotation), &dyn2(&CMatrix2::identity())) < 1e-10);

        let m = fully_entangled_fraction(&DensityMatrix::maximally_mixed(2).unwrap()).unwrap();
        assert!((m.f - 0.25).abs() < 1e-12 && !m.unique);

        let mut flat = CMatrix::zeros(4, 4);
        flat[(1, 1)] = c(0.5, 0.);
        flat[(2, 2)] = c(0.5, 0.);
        let z = fully_entangled_fraction(&DensityMatrix::new(2, flat).unwrap()).unwrap();
        assert!((z.f - 0.5).abs() < 1e-12 && !z.unique);
    }

    fn dyn2(m: &CMatrix2) -> CMatrix {
        CMatrix::from_fn(2, 2, |i, j| m[(i, j)])
    }

    #[test]
    fn spectral_rotation_realizes_the_maximum() {
        let mut s = Sampler::new(21);
        for _ in 0..50 {
            let rank = 1 + s.index(4);
            let rho = s.mixed(2, rank).unwrap();
            let spec = fef_spectral(&rho).unwrap();
            let r = spec.rotation;
            assert!((r.adjoint() * r - CMatrix2::identity()).norm() < 1e-12);
            assert!((singlet_overlap(&rho, &r) - spec.f).abs() < 1e-12);
            assert!((0.25 - 1e-12..=1.0 + 1e-12).contains(&spec.f));
        }
    }

    #[test]
    fn optimizer_agrees_with_spectrum() {
        let mut s = Sampler::new(4);
        for _ in 0..20 {
            let rank = 1 + s.index(4);
            let rho = s.mixed(2, rank).unwrap();
            let fef = fully_entangled_fraction(&rho).unwrap();
            assert!((fef.f - fef.f_optimizer).abs() < 1e-8);
        }
    }

    #[test]
    fn fef_is_locally_covariant() {
        let mut s = Sampler::new(15);
        for _ in 0..20 {
            let rho = s.mixed(2, 2).unwrap();
            let (u, v) = (s.unitary2(), s.unitary2());
            let uv = CMatrix::from_fn(4, 4, |i, j| u[(i / 2, j / 2)] * v[(i % 2, j % 2)]);
            let moved = rho.conjugated(&uv);
            assert!((fef_spectral(&rho).unwrap().f - fef_spectral(&moved).unwrap().f).abs() < 1e-9);
        }
    }

    #[test]
    fn twisted_werner_transporter() {
        let v = diag_phase(PI / 5.0);
        let rho = twisted_werner(0.7, &v).unwrap();
        assert!(DensityMatrix::new(2, rho.matrix().clone()).is_ok());
        let t = qubit_transporter(&rho).unwrap();
        assert!((t.correlation - 0.7).abs() < 1e-12);
        assert!(same_up_to_phase(&t.rotation.unwrap(), &v, 1e-6));

        let id = qubit_transporter(&projector(&singlet())).unwrap();
        assert!((id.correlation - 1.0).abs() < 1e-12);
        assert!(same_up_to_phase(&id.rotation.unwrap(), &CMatrix2::identity(), 1e-9));

        let flat = qubit_transporter(&DensityMatrix::maximally_mixed(2).unwrap()).unwrap();
        assert!(flat.correlation.abs() < 1e-12 && flat.rotation.is_none());

        for p in [1e-3, 0.1, 0.5] {
            let f = fef_spectral(&twisted_werner(p, &v).unwrap()).unwrap().f;
            assert!((f - (p + (1.0 - p) / 4.0)).abs() < 1e-12);
        }
        assert!(twisted_werner(0.0, &v).is_err());
        assert!(twisted_werner(1.2, &v).is_err());
    }

    #[test]
    fn six_rebit_pairs_are_twisted_werner() {
        let phi = 0.7;
        let pair = crate::ring::six_rebit_state(phi).marginal(&[2, 3]).unwrap();
        let v = diag_phase(phi + PI);
        let want = twisted_werner(1.0 / 3.0, &v).unwrap();
        assert!(max_abs_diff(pair.matrix(), want.matrix()) < 1e-12);
    }

    #[test]
    fn optimal_coefficient_values() {
        let p = optimal_coefficients();
        assert!((p.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((p.alpha - 0.062_920_6).abs() < 1e-7);
        assert!((p.beta - 0.207_812_7).abs() < 1e-7);
        assert!((p.gamma - 0.478_546_0).abs() < 1e-7);
        assert!((p.phase_slope() - 0.167_949_7).abs() < 1e-7);
        let (_, b, cc) = p.pair_elements();
        assert!((kq_from_pair(b, cc) - kq_zero()).abs() < 1e-10);
        assert!((kq_zero() - 0.622_839_0).abs() < 1e-7);
        assert!((b + cc.norm() - 0.717_12).abs() < 1e-5);
        assert!((p.theta_curvature() - 0.369).abs() < 1e-3);
    }

    #[test]
    fn six_qubit_pairs_match_element_formulas() {
        let mut s = Sampler::new(50);
        for _ in 0..50 {
            let v = s.real_unit(3);
            let p = SixQubitParams {
                alpha: v[0].re.abs() / 6f64.sqrt(),
                beta: v[1].re.abs() / 12f64.sqrt(),
                gamma: v[2].re.abs() / 2f64.sqrt(),
                xi: s.uniform(-PI, PI),
            };
            let state = six_qubit_state(&p).unwrap();
            let (a, b, cc) = p.pair_elements();
            let mut want = CMatrix::zeros(4, 4);
            want[(0, 0)] = c(a, 0.);
            want[(3, 3)] = c(a, 0.);
            want[(1, 1)] = c(b, 0.);
            want[(2, 2)] = c(b, 0.);
            want[(1, 2)] = -cc;
            want[(2, 1)] = -cc.conj();
            for j in 0..6 {
                let pair = state.marginal(&[j, (j + 1) % 6]).unwrap();
                assert!(max_abs_diff(pair.matrix(), &want) < 1e-12);
            }
        }
    }

    #[test]
    fn six_qubit_special_cases() {
        let p = SixQubitParams {
            alpha: 0.0,
            beta: 1.0 / 12f64.sqrt(),
            gamma: 0.0,
            xi: 0.4,
        };
        let (_, b, cc) = p.pair_elements();
        assert!((b - 4.0 / 12.0).abs() < 1e-15);
        assert!((cc - C64::from_polar(2.0 / 12.0, -0.8)).norm() < 1e-15);

        let opt = six_qubit_state(&optimal_coefficients()).unwrap();
        let pair = opt.marginal(&[0, 1]).unwrap();
        let f = fef_spectral(&pair).unwrap().f;
        let werner = twisted_werner((4.0 * f - 1.0) / 3.0, &CMatrix2::identity()).unwrap();
        assert!(max_abs_diff(pair.matrix(), werner.matrix()) < 1e-12);
        // S_z = 0 sector only
        for (x, z) in opt.amplitudes().iter().enumerate() {
            if z.norm() > 0.0 {
                assert_eq!(x.count_ones(), 3);
            }
        }
        let bad = SixQubitParams {
            alpha: 1.0,
            ..optimal_coefficients()
        };
        assert!(matches!(six_qubit_state(&bad), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn scan_and_perturbative_law() {
        let rows = kq_scan(&[0.0, 0.01, -0.01]).unwrap();
        assert!(rows[0].phi.abs() < 1e-15);
        assert!((rows[0].kq_exact - kq_zero()).abs() < 1e-12);
        for r in &rows[1..] {
            assert!((r.kq_exact - r.kq_perturbative).abs() < 1e-6);
        }
        let slope = measured_phase_slope(1e-4).unwrap();
        assert!((slope - optimal_coefficients().phase_slope()).abs() < 1e-6);
        let fit = kq_theta_fit(0.02, 41).unwrap();
        assert!((fit[2] + 0.369).abs() < 2e-3, "{fit:?}");
        // the traced f agrees with the spectral fully entangled fraction
        let state = six_qubit_state(&optimal_coefficients().with_xi(0.3)).unwrap();
        let (b, cc) = traced_pair(&state).unwrap();
        let spectral = fef_spectral(&state.marginal(&[0, 1]).unwrap()).unwrap();
        assert!((b + cc.norm() - spectral.f).abs() < 1e-12);
    }

    #[test]
    fn fit_recovers_polynomial() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 - 2.0 * x + 0.5 * x * x).collect();
        let fit = quadratic_fit(&xs, &ys).unwrap();
        assert!((fit[0] - 1.0).abs() < 1e-12 && (fit[1] + 2.0).abs() < 1e-12 && (fit[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn reoptimization_recovers_coefficients() {
        let (p, kq) = reoptimize_coefficients(1, 20).unwrap();
        let opt = optimal_coefficients();
        assert!((kq - kq_zero()).abs() < 1e-6);
        assert!((p.alpha - opt.alpha).abs() < 1e-6);
        assert!((p.beta - opt.beta).abs() < 1e-6);
        assert!((p.gamma - opt.gamma).abs() < 1e-6);
    }
}
