//! The ring operator `Γ = (1/n) Σ_j a†_{j+1} a_j` and its fermionic spectrum.

use std::f64::consts::PI;

use crate::numerics::{check_sites, normal_eigenvalues, site_mask, CMatrix, CVector, C64, MAX_MATRIX_SITES, MAX_SITES};
use crate::{Error, Result};

/// Which single-fermion modes apply: they depend on the parity of the number
/// `u` of up spins.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeParity {
    Odd,
    Even,
}

impl ModeParity {
    pub fn of(u: usize) -> Self {
        if u % 2 == 1 {
            ModeParity::Odd
        } else {
            ModeParity::Even
        }
    }

    /// Wave number `k_m`: `2πm/n` for odd `u`, `(2m+1)π/n` for even `u`.
    pub fn wave_number(self, n: usize, m: usize) -> f64 {
        match self {
            ModeParity::Odd => 2.0 * PI * m as f64 / n as f64,
            ModeParity::Even => (2 * m + 1) as f64 * PI / n as f64,
        }
    }
}

fn check_ring(n: usize, max: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidRingSize {
            n,
            reason: "a ring needs at least two sites",
        });
    }
    check_sites(n, max)
}

/// Basis indices with site `j` up (bit clear) and site `j+1` down that
/// `a†_{j+1} a_j` maps to a new index, together with that index.
fn hops(n: usize, x: usize) -> impl Iterator<Item = usize> {
    (0..n).filter_map(move |j| {
        let (from, to) = (site_mask(n, j), site_mask(n, (j + 1) % n));
        (x & from == 0 && x & to != 0).then_some(x ^ from ^ to)
    })
}

/// Dense `Γ` on the full `2^n`-dimensional register.
pub fn gamma_matrix(n: usize) -> Result<CMatrix> {
    check_ring(n, MAX_MATRIX_SITES)?;
    let d = 1usize << n;
    let w = 1.0 / n as f64;
    let mut g = CMatrix::zeros(d, d);
    for x in 0..d {
        for y in hops(n, x) {
            g[(y, x)] += C64::new(w, 0.0);
        }
    }
    Ok(g)
}

/// `Γ v` without materializing the matrix.
pub fn gamma_apply(v: &CVector, n: usize) -> Result<CVector> {
    check_ring(n, MAX_SITES)?;
    if v.len() != 1 << n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            got: v.len(),
        });
    }
    let w = 1.0 / n as f64;
    let mut out = CVector::zeros(v.len());
    for x in 0..v.len() {
        for y in hops(n, x) {
            out[y] += v[x] * w;
        }
    }
    Ok(out)
}

/// Number of up spins in a basis index.
pub fn up_count(n: usize, x: usize) -> usize {
    n - x.count_ones() as usize
}

/// Basis indices with exactly `u` up spins, ascending.
pub fn block_basis(n: usize, u: usize) -> Vec<usize> {
    (0..1usize << n).filter(|&x| up_count(n, x) == u).collect()
}

/// `Γ` restricted to the sector with `u` up spins.
pub fn gamma_block(n: usize, u: usize) -> Result<CMatrix> {
    check_ring(n, MAX_SITES)?;
    if u > n {
        return Err(Error::InvalidArgument(format!("u = {u} exceeds ring size {n}")));
    }
    let basis = block_basis(n, u);
    let pos = |x: usize| basis.binary_search(&x).expect("hop preserves up count");
    let w = 1.0 / n as f64;
    let mut g = CMatrix::zeros(basis.len(), basis.len());
    for (col, &x) in basis.iter().enumerate() {
        for y in hops(n, x) {
            g[(pos(y), col)] += C64::new(w, 0.0);
        }
    }
    Ok(g)
}

/// Single-fermion eigenvalues `g_m`, `m = 0..n`.
pub fn single_fermion_modes(n: usize, parity: ModeParity) -> Vec<C64> {
    (0..n)
        .map(|m| C64::from_polar(1.0 / n as f64, parity.wave_number(n, m)))
        .collect()
}

/// `G(M) = Σ_{m∈M} g_m`.
pub fn multi_fermion_eigenvalue(n: usize, modes: &[usize], parity: ModeParity) -> Result<C64> {
    let g = single_fermion_modes(n, parity);
    let mut seen = vec![false; n];
    let mut total = C64::new(0.0, 0.0);
    for &m in modes {
        if m >= n {
            return Err(Error::InvalidArgument(format!("mode {m} out of range for n = {n}")));
        }
        if std::mem::replace(&mut seen[m], true) {
            return Err(Error::InvalidArgument(format!("mode {m} repeated")));
        }
        total += g[m];
    }
    Ok(total)
}

/// Modulus of the extreme eigenvalues `G_r`.
pub fn extreme_modulus(n: usize) -> f64 {
    let base = 1.0 / (n as f64 * (PI / n as f64).sin());
    if n.is_multiple_of(2) {
        base
    } else {
        base * (PI / (2.0 * n as f64)).cos()
    }
}

/// The vertices `G_r = |G| e^{2rπi/n}` of the eigenvalue polygon.
pub fn extreme_eigenvalues(n: usize) -> Vec<C64> {
    let rho = extreme_modulus(n);
    (0..n)
        .map(|r| C64::from_polar(rho, 2.0 * PI * r as f64 / n as f64))
        .collect()
}

/// Mode and extreme-eigenvalue data of a ring.
#[derive(Clone, Debug, PartialEq)]
pub struct RingSpectrum {
    pub n: usize,
    pub g_odd: Vec<C64>,
    pub g_even: Vec<C64>,
    pub g_extreme: Vec<C64>,
}

impl RingSpectrum {
    pub fn new(n: usize) -> Result<Self> {
        check_ring(n, usize::MAX)?;
        Ok(Self {
            n,
            g_odd: single_fermion_modes(n, ModeParity::Odd),
            g_even: single_fermion_modes(n, ModeParity::Even),
            g_extreme: extreme_eigenvalues(n),
        })
    }

    pub fn contains(&self, z: C64, slack: f64) -> bool {
        polygon_contains(&self.g_extreme, z, slack)
    }

    pub fn kmax(&self, theta: f64) -> Result<f64> {
        super::kmax_closed(self.n, theta)
    }
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Whether `z` lies in the convex polygon with counter-clockwise vertices
/// `poly`, allowing `slack` distance outside. Two vertices form a segment.
pub fn polygon_contains(poly: &[C64], z: C64, slack: f64) -> bool {
    match poly.len() {
        0 => false,
        1 => (z - poly[0]).norm() <= slack,
        2 => segment_distance(poly[0], poly[1], z) <= slack,
        k => (0..k).all(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % k]);
            cross(q - p, z - p) / (q - p).norm() >= -slack
        }),
    }
}

fn segment_distance(p: C64, q: C64, z: C64) -> f64 {
    let d = q - p;
    let t = ((z - p).re * d.re + (z - p).im * d.im) / d.norm_sqr();
    (z - (p + d * t.clamp(0.0, 1.0))).norm()
}

/// Eigenvalues of the `u` sector by dense diagonalization.
pub fn numeric_block_spectrum(n: usize, u: usize) -> Result<Vec<C64>> {
    normal_eigenvalues(&gamma_block(n, u)?)
}

/// `G(M)` over every `u`-subset `M` of the modes.
pub fn analytic_block_spectrum(n: usize, u: usize) -> Vec<C64> {
    let g = single_fermion_modes(n, ModeParity::of(u));
    (0usize..1 << n)
        .filter(|s| s.count_ones() as usize == u)
        .map(|s| (0..n).filter(|m| s & (1 << m) != 0).map(|m| g[m]).sum())
        .collect()
}

/// Largest distance in a greedy nearest-neighbour pairing of two multisets;
/// infinite when the sizes differ.
pub fn match_spectra(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (best, dist) = b
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("sizes match");
        used[best] = true;
        worst = worst.max(dist);
    }
    worst
}
