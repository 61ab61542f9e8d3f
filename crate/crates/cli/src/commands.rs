use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rebit_ring::lattice2d::{
    lattice_k, lattice_links, parse_link, row_column_mixture, single_link_twist, solve_twist, twist_link_scale,
    twist_neighbor_scale, twist_predictions, verify_config, xy_ground, ConfigReport, LatticeGraph, PhaseConfig,
};
use rebit_ring::numerics::{read_state, LoadedState};
use rebit_ring::qubitext::{fully_entangled_fraction, kq_scan};
use rebit_ring::rebit::normalize_angle;
use rebit_ring::ring::{
    kmax_asymptotic, kmax_closed, optimal_mixture, ring_observables, six_rebit_state, RingSpectrum,
};
use rebit_ring::transport::{pair_reduced, transporter, PairReduced};
use rebit_ring::verify::{ring_report, run_all, theta_grid, RunReport, SuiteOptions};
use rebit_ring::Error;
use serde::Serialize;

use crate::table::{cell, sig, Table};
use crate::{Cli, Command, LatticeCommand};

pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;

/// Largest ring for which the `kmax_mixture` column is computed.
const MIXTURE_MAX_SITES: usize = 10;

/// Default tolerance for the phase checks of the lattice commands.
const LINK_TOL: f64 = 1e-9;

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::StateFile(_) => EXIT_INPUT,
            Error::InvalidArgument(_)
            | Error::InvalidRingSize { .. }
            | Error::NotALink(..)
            | Error::TooManySites { .. }
            | Error::SiteOutOfRange { .. }
            | Error::DuplicateSite(_)
            | Error::DimensionMismatch { .. } => EXIT_USAGE,
            _ => EXIT_FAILED,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub struct Outcome {
    pub output: String,
    pub pass: bool,
}

impl Outcome {
    fn data(output: String) -> Self {
        Self { output, pass: true }
    }
}

pub fn emit(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    text
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Kmax {
            n,
            theta_grid,
            asymptotic,
        } => kmax(*n, *theta_grid, *asymptotic),
        Command::Polygon { n } => polygon(*n),
        Command::Transport { state, link } => transport(state, link),
        Command::RingVerify { n_max, seed } => report(ring_report(*n_max, *seed)?, cli.tolerance),
        Command::SixRebit { phi } => six_rebit(*phi),
        Command::QubitRing { xi_grid, xi_max } => qubit_ring(*xi_grid, *xi_max),
        Command::Fef { state } => fef(state),
        Command::Lattice2d { command } => match command {
            LatticeCommand::Twist { torus, link, xi, phi } => twist(
                torus.rows,
                torus.cols,
                link,
                *xi,
                *phi,
                cli.tolerance.unwrap_or(LINK_TOL),
            ),
            LatticeCommand::Mixture { torus, config } => {
                mixture(torus.rows, torus.cols, config, cli.tolerance.unwrap_or(LINK_TOL))
            }
        },
        Command::VerifyAll { n_max, seed } => report(
            run_all(SuiteOptions {
                n_max: *n_max,
                seed: *seed,
            })?,
            cli.tolerance,
        ),
    }
}

fn kmax(n: usize, points: usize, asymptotic: bool) -> Result<Outcome> {
    RingSpectrum::new(n)?;
    let mut table = Table::new(&["n", "theta", "kmax_closed", "kmax_mixture", "kmax_asymptotic"]);
    for theta in theta_grid(points) {
        let closed = kmax_closed(n, theta).ok();
        let mixture = if (3..=MIXTURE_MAX_SITES).contains(&n) {
            Some(ring_observables(&optimal_mixture(n, theta)?)?.k)
        } else {
            None
        };
        let asym = asymptotic.then(|| kmax_asymptotic(n, theta));
        table.row(&[n.to_string(), sig(theta), cell(closed), cell(mixture), cell(asym)]);
    }
    Ok(Outcome::data(table.finish()))
}

fn polygon(n: usize) -> Result<Outcome> {
    let spectrum = RingSpectrum::new(n)?;
    let mut table = Table::new(&["r", "re", "im"]);
    for (r, g) in spectrum.g_extreme.iter().enumerate() {
        table.row(&[r.to_string(), sig(g.re), sig(g.im)]);
    }
    Ok(Outcome::data(table.finish()))
}

fn load(path: &Path) -> Result<LoadedState> {
    Ok(read_state(path)?)
}

#[derive(Serialize)]
struct TransportOutput {
    j: usize,
    k: usize,
    /// `None` when the link carries no correlation.
    xi: Option<f64>,
    correlation: f64,
    c_re: f64,
    c_im: f64,
}

fn transport(path: &Path, link: &str) -> Result<Outcome> {
    let state = load(path)?;
    let (j, k) = parse_link(link)?;
    let pair: PairReduced = match &state {
        LoadedState::Pure(p) => pair_reduced(p, j, k)?,
        LoadedState::Mixed(m) => pair_reduced(m, j, k)?,
    };
    let t = transporter(&pair);
    Ok(Outcome::data(to_json(&TransportOutput {
        j,
        k,
        xi: t.transporter.map(|r| r.xi()),
        correlation: t.correlation,
        c_re: pair.c.re,
        c_im: pair.c.im,
    })))
}

fn report(report: RunReport, tolerance: Option<f64>) -> Result<Outcome> {
    let report = report.with_tolerance(tolerance);
    for c in &report.checks {
        eprintln!(
            "[{}] criterion {} {}: measured {:e}, expected {:e}, tolerance {:e}",
            if c.pass { "pass" } else { "FAIL" },
            c.criterion,
            c.name,
            c.measured,
            c.expected,
            c.tolerance
        );
    }
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    Ok(Outcome {
        pass: report.pass,
        output: to_json(&report),
    })
}

#[derive(Serialize)]
struct SixRebitOutput {
    phi: f64,
    k: f64,
    /// Holonomy angle in `[0, 2π)`.
    theta: f64,
    gamma_re: f64,
    gamma_im: f64,
}

fn six_rebit(phi: f64) -> Result<Outcome> {
    let obs = ring_observables(&six_rebit_state(phi))?;
    Ok(Outcome::data(to_json(&SixRebitOutput {
        phi,
        k: obs.k,
        theta: obs.theta.unwrap_or(0.0),
        gamma_re: obs.gamma_expect.re,
        gamma_im: obs.gamma_expect.im,
    })))
}

fn qubit_ring(points: usize, xi_max: f64) -> Result<Outcome> {
    let xs: Vec<f64> = match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points)
            .map(|i| -xi_max + 2.0 * xi_max * i as f64 / (points - 1) as f64)
            .collect(),
    };
    let mut table = Table::new(&["xi", "phi", "theta", "kq_exact", "kq_perturbative"]);
    for row in kq_scan(&xs)? {
        table.row(&[
            sig(row.xi),
            sig(row.phi),
            sig(row.theta),
            sig(row.kq_exact),
            sig(row.kq_perturbative),
        ]);
    }
    Ok(Outcome::data(table.finish()))
}

#[derive(Serialize)]
struct FefOutput {
    f: f64,
    correlation: f64,
    /// Row-major `[re, im]` entries of the maximizing rotation.
    rotation: [[[f64; 2]; 2]; 2],
    unique: bool,
}

fn fef(path: &Path) -> Result<Outcome> {
    let rho = load(path)?.to_density()?;
    let fef = fully_entangled_fraction(&rho)?;
    let r = &fef.rotation;
    let entry = |i: usize, j: usize| [r[(i, j)].re, r[(i, j)].im];
    Ok(Outcome::data(to_json(&FefOutput {
        f: fef.f,
        correlation: (4.0 * fef.f - 1.0) / 3.0,
        rotation: [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]],
        unique: fef.unique,
    })))
}

#[derive(Serialize)]
struct TwistOutput {
    rows: usize,
    cols: usize,
    link: [usize; 2],
    xi: f64,
    link_scale: [f64; 2],
    neighbor_scale: f64,
    ground_energy: f64,
    ground_degeneracy: usize,
    report: ConfigReport,
}

fn twist(rows: usize, cols: usize, link: &str, xi: Option<f64>, phi: Option<f64>, tol: f64) -> Result<Outcome> {
    let graph = LatticeGraph::torus(rows, cols)?;
    let (j, k) = parse_link(link)?;
    let xi = match (xi, phi) {
        (Some(x), _) => x,
        (None, Some(p)) => solve_twist(p).xi,
        (None, None) => return Err(Error::InvalidArgument("give --xi or --phi".into()).into()),
    };
    let ground = xy_ground(&graph)?;
    let twisted = single_link_twist(&ground.state, &graph, j, k, xi)?;
    // expected configuration: ground-state links times the predicted factors
    let base = lattice_links(&ground.state, &graph)?;
    let predicted = twist_predictions(&graph, j, k, xi)?;
    let phases = base
        .iter()
        .zip(&predicted)
        .map(|(c, f)| normalize_angle((c * f).arg()))
        .collect();
    let config = PhaseConfig::new(&graph, phases)?;
    let report = verify_config(&twisted, &graph, &config, tol)?;
    let scale = twist_link_scale(xi);
    Ok(Outcome {
        pass: report.pass,
        output: to_json(&TwistOutput {
            rows,
            cols,
            link: [j, k],
            xi,
            link_scale: [scale.re, scale.im],
            neighbor_scale: twist_neighbor_scale(xi),
            ground_energy: ground.energy,
            ground_degeneracy: ground.degeneracy,
            report,
        }),
    })
}

#[derive(Serialize)]
struct MixtureOutput {
    rows: usize,
    cols: usize,
    k: f64,
    k_rows_state: f64,
    k_columns_state: f64,
    report: ConfigReport,
}

fn mixture(rows: usize, cols: usize, path: &Path, tol: f64) -> Result<Outcome> {
    let graph = LatticeGraph::torus(rows, cols)?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let map: BTreeMap<String, f64> =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let config =
        PhaseConfig::from_map(&graph, &map).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mix = row_column_mixture(&graph, &config)?;
    let report = verify_config(&mix.mixture, &graph, &config, tol)?;
    Ok(Outcome {
        pass: report.pass && report.fully_connected,
        output: to_json(&MixtureOutput {
            rows,
            cols,
            k: report.k,
            k_rows_state: lattice_k(&mix.rows_state, &graph)?,
            k_columns_state: lattice_k(&mix.columns_state, &graph)?,
            report,
        }),
    })
}
