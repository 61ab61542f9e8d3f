//! The verification suite: every acceptance criterion as a list of named
//! checks with measured value, expectation and tolerance.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::lattice2d::{
    lattice_k, lattice_links, row_column_mixture, single_link_twist, twist_predictions, verify_config, xy_ground_state,
    LatticeGraph, PhaseConfig,
};
use crate::numerics::{DensityMatrix, Sampler};
use crate::qubitext::{
    fef_optimizer, fef_spectral, kq_from_pair, kq_theta_fit, measured_phase_slope, optimal_coefficients,
    qubit_fidelity, qubit_fidelity_quadrature, qubit_transporter, reoptimize_coefficients, same_up_to_phase,
    six_qubit_state, traced_pair, twisted_werner,
};
use crate::rebit::{wrap_to_pi, LocalRotation};
use crate::ring::{
    analytic_block_spectrum, equalizing_angles, extreme_eigenvalues, kmax_asymptotic, kmax_closed, link_coefficients,
    match_spectra, numeric_block_spectrum, optimal_mixture, ring_observables, six_rebit_state,
};
use crate::transport::{fidelity_closed, fidelity_quadrature, random_rebit_pair, DEFAULT_NODES, NO_CORRELATION};
use crate::{Result, C64};

/// How a measured value is compared with its expectation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|measured − expected| ≤ tolerance`
    Equal,
    /// `measured ≤ expected + tolerance`
    AtMost,
    /// `measured ≥ expected − tolerance`
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Check {
    pub fn new(
        criterion: u8,
        name: &str,
        measured: f64,
        expected: f64,
        tolerance: f64,
        comparison: Comparison,
    ) -> Self {
        let mut check = Self {
            criterion,
            name: name.to_string(),
            measured,
            expected,
            tolerance,
            comparison,
            pass: false,
        };
        check.evaluate();
        check
    }

    pub fn equal(criterion: u8, name: &str, measured: f64, expected: f64, tolerance: f64) -> Self {
        Self::new(criterion, name, measured, expected, tolerance, Comparison::Equal)
    }

    pub fn at_most(criterion: u8, name: &str, measured: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(criterion, name, measured, bound, tolerance, Comparison::AtMost)
    }

    pub fn at_least(criterion: u8, name: &str, measured: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(criterion, name, measured, bound, tolerance, Comparison::AtLeast)
    }

    fn evaluate(&mut self) {
        let (m, e, t) = (self.measured, self.expected, self.tolerance);
        self.pass = match self.comparison {
            Comparison::Equal => (m - e).abs() <= t,
            Comparison::AtMost => m <= e + t,
            Comparison::AtLeast => m >= e - t,
        };
    }

    /// Replaces the tolerance and re-evaluates.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.evaluate();
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl RunReport {
    pub fn new(suite: &str, seed: u64, checks: Vec<Check>, notes: Vec<String>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            suite: suite.to_string(),
            seed,
            checks,
            notes,
            pass,
        }
    }

    /// Applies a global tolerance override to every check.
    pub fn with_tolerance(self, tolerance: Option<f64>) -> Self {
        match tolerance {
            None => self,
            Some(t) => {
                let checks = self.checks.into_iter().map(|c| c.with_tolerance(t)).collect();
                Self::new(&self.suite, self.seed, checks, self.notes)
            }
        }
    }
}

/// Parameters of a full run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteOptions {
    /// Largest ring in the spectrum, polygon and `K_max` sweeps.
    pub n_max: usize,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { n_max: 8, seed: 1 }
    }
}

/// Independent random stream per criterion.
fn sampler(seed: u64, criterion: u8) -> Sampler {
    Sampler::new(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(criterion as u64))
}

/// Points `0, 2π/(m−1), …, 2π`.
pub fn theta_grid(m: usize) -> Vec<f64> {
    match m {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..m).map(|i| TAU * i as f64 / (m - 1) as f64).collect(),
    }
}

/// Criterion 1: dense Γ spectra per up-spin sector against sums of
/// single-fermion modes.
pub fn spectrum_checks(n_max: usize) -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for n in 2..=n_max {
        for u in 0..=n {
            worst = worst.max(match_spectra(
                &numeric_block_spectrum(n, u)?,
                &analytic_block_spectrum(n, u),
            ));
        }
    }
    Ok(vec![Check::at_most(
        1,
        "spectrum_sectors_match_mode_sums",
        worst,
        0.0,
        1e-10,
    )])
}

/// Distance by which `z` lies outside the convex polygon `poly`
/// (counter-clockwise); non-positive inside.
fn polygon_excess(poly: &[C64], z: C64) -> f64 {
    let k = poly.len();
    if k == 2 {
        let (p, d) = (poly[0], poly[1] - poly[0]);
        let t = (((z - p) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
        return (z - (p + d * t)).norm();
    }
    (0..k)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % k]);
            let e = q - p;
            -((e.re * (z - p).im - e.im * (z - p).re) / e.norm())
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Criterion 2: every eigenvalue lies in the polygon of extreme eigenvalues.
pub fn polygon_checks(n_max: usize) -> Result<Vec<Check>> {
    let mut worst = f64::NEG_INFINITY;
    for n in 2..=n_max {
        let poly = extreme_eigenvalues(n);
        for u in 0..=n {
            for z in numeric_block_spectrum(n, u)? {
                worst = worst.max(polygon_excess(&poly, z));
            }
        }
    }
    Ok(vec![Check::at_most(2, "eigenvalues_inside_polygon", worst, 0.0, 1e-10)])
}

/// Ring observables after rotating every link onto the mean phase.
fn equalized_k_theta(state: &DensityMatrix) -> Result<(f64, f64)> {
    let angles = equalizing_angles(&link_coefficients(state)?)?;
    let obs = ring_observables(&state.rotate_sites(&angles)?)?;
    Ok((obs.k, obs.theta.unwrap_or(0.0)))
}

/// Criterion 3: the mixture attains `K_max(θ)` and random states stay below.
pub fn kmax_checks(n_max: usize, seed: u64) -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for n in 3..=n_max {
        for theta in theta_grid(32) {
            let obs = ring_observables(&optimal_mixture(n, theta)?)?;
            worst = worst.max((obs.k - kmax_closed(n, theta)?).abs());
        }
    }
    let mut checks = vec![Check::at_most(3, "optimal_mixture_attains_kmax", worst, 0.0, 1e-9)];
    let mut s = sampler(seed, 3);
    for n in [4, 6] {
        let mut excess = f64::NEG_INFINITY;
        for i in 0..1000 {
            let state = s.mixed(n, 1 + i % 3)?;
            let (k, theta) = equalized_k_theta(&state)?;
            excess = excess.max(k - kmax_closed(n, theta)?);
        }
        checks.push(Check::at_most(
            3,
            &format!("random_states_within_kmax_n{n}"),
            excess,
            0.0,
            1e-9,
        ));
    }
    Ok(checks)
}

/// Criterion 4: six-rebit example, `2/π` limit and large-`n` expansion.
pub fn constants_checks() -> Result<Vec<Check>> {
    let (mut dk, mut dtheta) = (0.0f64, 0.0f64);
    for i in 0..16 {
        let phi = -PI + TAU * i as f64 / 16.0 + 0.1;
        let obs = ring_observables(&six_rebit_state(phi))?;
        dk = dk.max((obs.k - 1.0 / 3.0).abs());
        dtheta = dtheta.max(wrap_to_pi(obs.theta.unwrap_or(f64::NAN) - 6.0 * phi).abs());
    }
    let mut asym = 0.0f64;
    for n in [200, 201] {
        for theta in theta_grid(64) {
            asym = asym.max((kmax_asymptotic(n, theta) - kmax_closed(n, theta)?).abs());
        }
    }
    Ok(vec![
        Check::equal(4, "six_rebit_k", 1.0 / 3.0 + dk, 1.0 / 3.0, 1e-12),
        Check::at_most(4, "six_rebit_theta_is_6phi", dtheta, 0.0, 1e-10),
        Check::equal(4, "kmax_n4000_near_2_over_pi", kmax_closed(4000, 0.0)?, 2.0 / PI, 1e-4),
        Check::at_most(4, "asymptotic_matches_closed_n200", asym, 0.0, 1e-5),
    ])
}

/// Criterion 5: both fidelity functionals against their quadratures.
pub fn fidelity_checks(seed: u64) -> Result<Vec<Check>> {
    let mut s = sampler(seed, 5);
    let mut rebit = 0.0f64;
    for _ in 0..100 {
        let pair = random_rebit_pair(&mut s);
        let xi = s.angle();
        rebit = rebit.max((fidelity_quadrature(&pair, xi, DEFAULT_NODES) - fidelity_closed(&pair, xi)).abs());
    }
    let mut qubit = 0.0f64;
    for i in 0..100 {
        let rho = s.mixed(2, 1 + i % 4)?;
        let r = s.unitary2();
        qubit = qubit.max((qubit_fidelity_quadrature(&rho, &r, 16, 16)? - qubit_fidelity(&rho, &r)?).abs());
    }
    Ok(vec![
        Check::at_most(5, "rebit_fidelity_quadrature", rebit, 0.0, 1e-10),
        Check::at_most(5, "qubit_fidelity_quadrature", qubit, 0.0, 1e-6),
    ])
}

/// Criterion 6: spectral fully entangled fraction against the optimizer, and
/// recovery of twisted Werner parameters.
pub fn fef_checks(seed: u64) -> Result<Vec<Check>> {
    let mut s = sampler(seed, 6);
    let mut gap = 0.0f64;
    for i in 0..200 {
        let rho = s.mixed(2, 1 + i % 4)?;
        gap = gap.max((fef_optimizer(&rho)?.0 - fef_spectral(&rho)?.f).abs());
    }
    let (mut dp, mut rotation_misses) = (0.0f64, 0usize);
    for _ in 0..50 {
        let p = s.uniform(0.05, 1.0);
        let v = s.unitary2();
        let t = qubit_transporter(&twisted_werner(p, &v)?)?;
        dp = dp.max((t.correlation - p).abs());
        if !t.rotation.as_ref().is_some_and(|r| same_up_to_phase(r, &v, 1e-6)) {
            rotation_misses += 1;
        }
    }
    Ok(vec![
        Check::at_most(6, "fef_optimizer_matches_spectral", gap, 0.0, 1e-8),
        Check::at_most(6, "twisted_werner_correlation", dp, 0.0, 1e-9),
        Check::equal(6, "twisted_werner_rotation_misses", rotation_misses as f64, 0.0, 0.0),
    ])
}

/// Criterion 7: the six-qubit ring at and near `ξ = 0`.
pub fn six_qubit_checks(seed: u64) -> Result<Vec<Check>> {
    let target = (2.0 + 13f64.sqrt()) / 9.0;
    let opt = optimal_coefficients();
    let (b, c) = traced_pair(&six_qubit_state(&opt)?)?;
    let (_, reopt) = reoptimize_coefficients(seed, 8)?;
    let fit = kq_theta_fit(0.02, 41)?;
    Ok(vec![
        Check::equal(7, "kq_closed_coefficients", kq_from_pair(b, c), target, 1e-10),
        Check::equal(7, "kq_reoptimized", reopt, target, 1e-6),
        Check::equal(7, "kq_theta_curvature_fit", fit[2], -0.369, 0.002),
        Check::equal(7, "phase_slope", measured_phase_slope(1e-4)?, opt.phase_slope(), 1e-6),
    ])
}

/// Criterion 8: single-link twist predictions and the row/column mixture.
pub fn lattice_checks(seed: u64) -> Result<Vec<Check>> {
    let torus = LatticeGraph::torus(2, 3)?;
    let rho0 = xy_ground_state(&torus)?;
    let base = lattice_links(&rho0, &torus)?;
    let mut twist = 0.0f64;
    for k in 0..32 {
        let xi = 0.1 * k as f64;
        let got = lattice_links(&single_link_twist(&rho0, &torus, 0, 1, xi)?, &torus)?;
        let want = twist_predictions(&torus, 0, 1, xi)?;
        for i in 0..got.len() {
            twist = twist.max((got[i] - want[i] * base[i]).norm());
        }
    }

    let mut s = sampler(seed, 8);
    let (mut phase_error, mut min_link, mut identity) = (0.0f64, f64::INFINITY, 0.0f64);
    for (rows, cols) in [(2, 2), (2, 3), (3, 3)] {
        let graph = LatticeGraph::torus(rows, cols)?;
        let phases = (0..graph.links().len()).map(|_| s.angle()).collect();
        let config = PhaseConfig::new(&graph, phases)?;
        let mix = row_column_mixture(&graph, &config)?;
        let report = verify_config(&mix.mixture, &graph, &config, 1e-9)?;
        for link in &report.links {
            phase_error = phase_error.max(link.error);
            min_link = min_link.min(link.magnitude);
        }
        let halves = 0.5 * (lattice_k(&mix.rows_state, &graph)? + lattice_k(&mix.columns_state, &graph)?);
        identity = identity.max((report.k - halves).abs());
    }

    let square = LatticeGraph::torus(3, 3)?;
    let zero = row_column_mixture(&square, &PhaseConfig::zero(&square))?;
    Ok(vec![
        Check::at_most(8, "single_link_twist_predictions", twist, 0.0, 1e-10),
        Check::at_most(8, "row_column_phases_realized", phase_error, 0.0, 1e-9),
        Check::at_least(8, "row_column_links_correlated", min_link, NO_CORRELATION, 0.0),
        Check::at_most(8, "row_column_k_is_mean_of_halves", identity, 0.0, 1e-12),
        Check::equal(
            8,
            "row_column_k_half_of_row",
            lattice_k(&zero.mixture, &square)?,
            0.5 * kmax_closed(3, 0.0)?,
            1e-12,
        ),
    ])
}

/// Gap that the finite suite does not close.
pub const INFINITE_LATTICE_NOTE: &str = "the infinite-lattice value K_max = 0.549 and the 1/π mixture value are \
     thermodynamic-limit results and are not reproduced; the finite-torus identities of criterion 8 stand in for them";

/// Criteria 1–3.
pub fn ring_report(n_max: usize, seed: u64) -> Result<RunReport> {
    let mut checks = spectrum_checks(n_max)?;
    checks.extend(polygon_checks(n_max)?);
    checks.extend(kmax_checks(n_max, seed)?);
    Ok(RunReport::new("ring-verify", seed, checks, Vec::new()))
}

/// Every criterion.
pub fn run_all(options: SuiteOptions) -> Result<RunReport> {
    let SuiteOptions { n_max, seed } = options;
    let mut checks = ring_report(n_max, seed)?.checks;
    checks.extend(constants_checks()?);
    checks.extend(fidelity_checks(seed)?);
    checks.extend(fef_checks(seed)?);
    checks.extend(six_qubit_checks(seed)?);
    checks.extend(lattice_checks(seed)?);
    Ok(RunReport::new(
        "verify-all",
        seed,
        checks,
        vec![format!("criterion 9: {INFINITE_LATTICE_NOTE}")],
    ))
}
