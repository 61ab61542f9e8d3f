use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::{c, check_sites, CMatrix2, CVector, DensityMatrix, PureState, MAX_SITES};
use crate::Result;

/// Seeded sampler backed by ChaCha20, a counter-based generator whose stream
/// is identical on every platform for a given seed.
#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha20Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    pub fn index(&mut self, upper: usize) -> usize {
        self.rng.random_range(0..upper)
    }

    pub fn angle(&mut self) -> f64 {
        self.uniform(0.0, std::f64::consts::TAU)
    }

    /// Uniform point on the unit sphere of `C^dim` (normalized complex
    /// Gaussian components).
    pub fn complex_unit(&mut self, dim: usize) -> CVector {
        let v = CVector::from_fn(dim, |_, _| c(self.gaussian(), self.gaussian()));
        let norm = v.norm();
        v.unscale(norm)
    }

    /// Uniform point on the unit sphere of `R^dim`, as a complex vector.
    pub fn real_unit(&mut self, dim: usize) -> CVector {
        let v = CVector::from_fn(dim, |_, _| c(self.gaussian(), 0.0));
        let norm = v.norm();
        v.unscale(norm)
    }

    pub fn pure(&mut self, n: usize) -> Result<PureState> {
        check_sites(n, MAX_SITES)?;
        PureState::new(n, self.complex_unit(1 << n))
    }

    /// Flat Dirichlet weights over `k` components.
    pub fn simplex(&mut self, k: usize) -> Vec<f64> {
        let e: Vec<f64> = (0..k).map(|_| -(1.0 - self.rng.random::<f64>()).ln()).collect();
        let total: f64 = e.iter().sum();
        e.into_iter().map(|x| x / total).collect()
    }

    /// Haar-random 2×2 unitary (SU(2) from a uniform unit quaternion).
    pub fn unitary2(&mut self) -> CMatrix2 {
        let q = self.real_unit(4);
        let (a, b) = (c(q[0].re, q[1].re), c(q[2].re, q[3].re));
        CMatrix2::new(a, -b.conj(), b, a.conj())
    }

    /// Random mixed state: a Dirichlet-weighted mixture of `rank` Haar pure
    /// states.
    pub fn mixed(&mut self, n: usize, rank: usize) -> Result<DensityMatrix> {
        let states: Vec<DensityMatrix> = (0..rank).map(|_| self.pure(n)?.to_density()).collect::<Result<_>>()?;
        let w = self.simplex(rank);
        let parts: Vec<(f64, &DensityMatrix)> = w.iter().copied().zip(states.iter()).collect();
        DensityMatrix::mixture(&parts)
    }
}

/// Haar-random pure state of `n` sites; deterministic in `seed`.
pub fn random_pure(n: usize, seed: u64) -> Result<PureState> {
    Sampler::new(seed).pure(n)
}
