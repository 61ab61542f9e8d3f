//! Largest achievable mean correlation `K_max(θ)` on a ring.

use std::f64::consts::{PI, TAU};

use super::states::rho_r;
use crate::numerics::DensityMatrix;
use crate::rebit::normalize_angle;
use crate::{Error, Result};

/// Holonomy angle mapped to `[0, 2π]`; values already in range, including
/// `2π`, are kept.
pub fn theta_in_range(theta: f64) -> f64 {
    if (0.0..=TAU).contains(&theta) {
        theta
    } else {
        normalize_angle(theta)
    }
}

fn is_trivial_holonomy(theta: f64) -> bool {
    let t = normalize_angle(theta);
    t.min(TAU - t) < 1e-12
}

/// `K_max(θ) = 2cos(π/n) / (n sin(π/n) cos[(π−θ)/n])`, times `cos(π/2n)` for
/// odd `n`. A two-site ring only admits `θ = 0`, where `K_max = 1`.
pub fn kmax_closed(n: usize, theta: f64) -> Result<f64> {
    match n {
        0 | 1 => Err(Error::InvalidRingSize {
            n,
            reason: "a ring needs at least two sites",
        }),
        2 if is_trivial_holonomy(theta) => Ok(1.0),
        2 => Err(Error::InvalidArgument("a two-site ring only supports θ = 0".into())),
        _ => {
            let nf = n as f64;
            let t = theta_in_range(theta);
            let even = 2.0 * (PI / nf).cos() / (nf * (PI / nf).sin() * ((PI - t) / nf).cos());
            Ok(if n.is_multiple_of(2) {
                even
            } else {
                even * (PI / (2.0 * nf)).cos()
            })
        }
    }
}

/// Large-`n` expansion `(2/π)[1 + (c − πθ + θ²/2)/n²]` with `c = π²/6` for
/// even `n` and `π²/24` for odd `n`.
pub fn kmax_asymptotic(n: usize, theta: f64) -> f64 {
    let t = theta_in_range(theta);
    let c = if n.is_multiple_of(2) {
        PI * PI / 6.0
    } else {
        PI * PI / 24.0
    };
    let nf = n as f64;
    2.0 / PI * (1.0 + (c - PI * t + t * t / 2.0) / (nf * nf))
}

/// Weight `q` of `ρ_0` in `q ρ_0 + (1−q) ρ_1` whose `⟨Γ⟩` has phase `θ/n`.
pub fn mixture_weight(n: usize, theta: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidRingSize {
            n,
            reason: "the mixture construction needs at least three sites",
        });
    }
    let t = theta_in_range(theta);
    let alpha = TAU / n as f64;
    let beta = t / n as f64;
    Ok(((alpha - beta).sin() / (beta.sin() + (alpha - beta).sin())).clamp(0.0, 1.0))
}

/// State on the polygon edge `[G_0, G_1]` attaining `K_max(θ)`.
pub fn optimal_mixture(n: usize, theta: f64) -> Result<DensityMatrix> {
    let q = mixture_weight(n, theta)?;
    if q == 1.0 {
        return rho_r(n, 0);
    }
    if q == 0.0 {
        return rho_r(n, 1);
    }
    DensityMatrix::mixture(&[(q, &rho_r(n, 0)?), (1.0 - q, &rho_r(n, 1)?)])
}
