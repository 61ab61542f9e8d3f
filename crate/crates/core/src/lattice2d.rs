//! Link phase configurations on general lattices: XY ground states, the
//! single-link twist, and the row/column mixture realizing any configuration.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::numerics::{check_sites, site_mask, CMatrix, DensityMatrix, C64, MAX_MATRIX_SITES};
use crate::rebit::{normalize_angle, wrap_to_pi, LocalRotation};
use crate::ring::{block_basis, optimal_mixture, theta_in_range};
use crate::transport::{link_coefficient, NO_CORRELATION};
use crate::{Error, Result};

/// Energies within this window of the minimum count as ground level.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Ring(usize),
    Chain(usize),
    Torus { rows: usize, cols: usize },
}

/// Sites and undirected links; each link is stored once with an orientation
/// `(j, k)` that fixes the sign convention of its phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeGraph {
    sites: usize,
    links: Vec<(usize, usize)>,
    geometry: Geometry,
}

impl LatticeGraph {
    fn from_links(sites: usize, candidates: impl IntoIterator<Item = (usize, usize)>, geometry: Geometry) -> Self {
        let mut links: Vec<(usize, usize)> = Vec::new();
        for (j, k) in candidates {
            if j != k && !links.iter().any(|&(a, b)| (a, b) == (j, k) || (a, b) == (k, j)) {
                links.push((j, k));
            }
        }
        Self { sites, links, geometry }
    }

    /// Periodic ring `j → j+1 mod n`.
    pub fn ring(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("a ring needs at least two sites".into()));
        }
        Ok(Self::from_links(n, (0..n).map(|j| (j, (j + 1) % n)), Geometry::Ring(n)))
    }

    /// Open chain `j → j+1`.
    pub fn chain(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("a chain needs at least two sites".into()));
        }
        Ok(Self::from_links(n, (0..n - 1).map(|j| (j, j + 1)), Geometry::Chain(n)))
    }

    /// Periodic `rows × cols` square lattice with site `r·cols + c`.
    /// Horizontal links `(r, c) → (r, c+1)` come first, then vertical links
    /// `(r, c) → (r+1, c)`. A period-2 direction carries a single link.
    pub fn torus(rows: usize, cols: usize) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(Error::InvalidArgument(
                "a torus needs at least two rows and two columns".into(),
            ));
        }
        let site = |r: usize, c: usize| (r % rows) * cols + c % cols;
        let horizontal = (0..rows).flat_map(move |r| (0..cols).map(move |c| (site(r, c), site(r, c + 1))));
        let vertical = (0..rows).flat_map(move |r| (0..cols).map(move |c| (site(r, c), site(r + 1, c))));
        Ok(Self::from_links(
            rows * cols,
            horizontal.chain(vertical),
            Geometry::Torus { rows, cols },
        ))
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn links(&self) -> &[(usize, usize)] {
        &self.links
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    /// Index of the link joining `j` and `k` and whether it is stored as
    /// `(k, j)`.
    pub fn find_link(&self, j: usize, k: usize) -> Option<(usize, bool)> {
        self.links.iter().enumerate().find_map(|(i, &(a, b))| match (a, b) {
            _ if (a, b) == (j, k) => Some((i, false)),
            _ if (a, b) == (k, j) => Some((i, true)),
            _ => None,
        })
    }
}

/// A target phase for every link, aligned with [`LatticeGraph::links`].
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseConfig {
    pub phases: Vec<f64>,
}

impl PhaseConfig {
    pub fn zero(graph: &LatticeGraph) -> Self {
        Self {
            phases: vec![0.0; graph.links.len()],
        }
    }

    pub fn new(graph: &LatticeGraph, phases: Vec<f64>) -> Result<Self> {
        if phases.len() != graph.links.len() {
            return Err(Error::DimensionMismatch {
                expected: graph.links.len(),
                got: phases.len(),
            });
        }
        Ok(Self {
            phases: phases.into_iter().map(normalize_angle).collect(),
        })
    }

    /// Builds a configuration from `"j,k" → phase` entries; a reversed link
    /// takes the negated phase. Every link must be covered.
    pub fn from_map(graph: &LatticeGraph, map: &BTreeMap<String, f64>) -> Result<Self> {
        let mut phases = vec![None; graph.links.len()];
        for (key, &phase) in map {
            let (j, k) = parse_link(key)?;
            let (i, reversed) = graph.find_link(j, k).ok_or(Error::NotALink(j, k))?;
            phases[i] = Some(normalize_angle(if reversed { -phase } else { phase }));
        }
        let phases = phases
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                let (j, k) = graph.links[i];
                p.ok_or_else(|| Error::InvalidArgument(format!("no phase given for link {j},{k}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self { phases })
    }

    pub fn phase(&self, graph: &LatticeGraph, j: usize, k: usize) -> Result<f64> {
        let (i, reversed) = graph.find_link(j, k).ok_or(Error::NotALink(j, k))?;
        Ok(if reversed {
            normalize_angle(-self.phases[i])
        } else {
            self.phases[i]
        })
    }
}

/// Parses `"j,k"`.
pub fn parse_link(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidArgument(format!("expected a link \"j,k\", got {text:?}"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

/// Ground level of `H = −Σ_{⟨j,k⟩} (a†_k a_j + a†_j a_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct XyGround {
    pub energy: f64,
    pub degeneracy: usize,
    /// Equal mixture over an orthonormal basis of the ground level.
    pub state: DensityMatrix,
}

fn xy_block(graph: &LatticeGraph, basis: &[usize]) -> DMatrix<f64> {
    let n = graph.sites;
    let mut h = DMatrix::zeros(basis.len(), basis.len());
    for (col, &x) in basis.iter().enumerate() {
        for &(j, k) in &graph.links {
            let (mj, mk) = (site_mask(n, j), site_mask(n, k));
            if (x & mj == 0) != (x & mk == 0) {
                let y = x ^ mj ^ mk;
                let row = basis.binary_search(&y).expect("hopping conserves the up count");
                h[(row, col)] -= 1.0;
            }
        }
    }
    h
}

/// Dense diagonalization sector by sector in the number of up spins.
pub fn xy_ground(graph: &LatticeGraph) -> Result<XyGround> {
    let n = graph.sites;
    check_sites(n, MAX_MATRIX_SITES)?;
    let mut levels: Vec<(f64, usize, Vec<f64>, Vec<usize>)> = Vec::new();
    for u in 0..=n {
        let basis = block_basis(n, u);
        let eig = SymmetricEigen::new(xy_block(graph, &basis));
        for (i, &e) in eig.eigenvalues.iter().enumerate() {
            levels.push((
                e,
                u,
                eig.eigenvectors.column(i).iter().copied().collect(),
                basis.clone(),
            ));
        }
    }
    let energy = levels.iter().map(|l| l.0).fold(f64::INFINITY, f64::min);
    let ground: Vec<_> = levels.into_iter().filter(|l| l.0 <= energy + DEGENERACY_TOL).collect();
    let d = 1usize << n;
    let mut m = CMatrix::zeros(d, d);
    for (_, _, v, basis) in &ground {
        for (a, &x) in basis.iter().enumerate() {
            for (b, &y) in basis.iter().enumerate() {
                m[(x, y)] += C64::new(v[a] * v[b], 0.0);
            }
        }
    }
    let degeneracy = ground.len();
    Ok(XyGround {
        energy,
        degeneracy,
        state: DensityMatrix::from_matrix_unchecked(n, m.unscale(degeneracy as f64)),
    })
}

pub fn xy_ground_state(graph: &LatticeGraph) -> Result<DensityMatrix> {
    Ok(xy_ground(graph)?.state)
}

/// Link coefficients `c_{j,k}` in link order.
pub fn lattice_links(state: &DensityMatrix, graph: &LatticeGraph) -> Result<Vec<C64>> {
    graph
        .links
        .iter()
        .map(|&(j, k)| link_coefficient(state, j, k))
        .collect()
}

/// `K = (2/L) Σ |c_{j,k}|`.
pub fn lattice_k(state: &DensityMatrix, graph: &LatticeGraph) -> Result<f64> {
    let cs = lattice_links(state, graph)?;
    Ok(2.0 * cs.iter().map(|z| z.norm()).sum::<f64>() / cs.len() as f64)
}

/// Factor multiplying `c_{j,k}` of the twisted link: `(2e^{−iξ} + e^{2iξ})/3`.
pub fn twist_link_scale(xi: f64) -> C64 {
    (C64::from_polar(2.0, -xi) + C64::from_polar(1.0, 2.0 * xi)) / 3.0
}

/// Factor multiplying links that touch exactly one end: `(1 + 2cos ξ)/3`.
pub fn twist_neighbor_scale(xi: f64) -> f64 {
    (1.0 + 2.0 * xi.cos()) / 3.0
}

/// `(1/3)[V_j ρ V_j† + V_k† ρ V_k + (V_j† ⊗ V_k) ρ (V_j ⊗ V_k†)]` with
/// `V = diag(1, e^{iξ})`.
pub fn single_link_twist(
    rho: &DensityMatrix,
    graph: &LatticeGraph,
    j: usize,
    k: usize,
    xi: f64,
) -> Result<DensityMatrix> {
    graph.find_link(j, k).ok_or(Error::NotALink(j, k))?;
    let n = rho.n();
    let angles = |pairs: &[(usize, f64)]| {
        let mut a = vec![0.0; n];
        for &(site, x) in pairs {
            a[site] = x;
        }
        a
    };
    let t1 = rho.rotate_sites(&angles(&[(j, xi)]))?;
    let t2 = rho.rotate_sites(&angles(&[(k, -xi)]))?;
    let t3 = rho.rotate_sites(&angles(&[(j, -xi), (k, xi)]))?;
    let third = 1.0 / 3.0;
    DensityMatrix::mixture(&[(third, &t1), (third, &t2), (1.0 - 2.0 * third, &t3)])
}

/// Predicted factor on each link after twisting `(j, k)`.
pub fn twist_predictions(graph: &LatticeGraph, j: usize, k: usize, xi: f64) -> Result<Vec<C64>> {
    graph.find_link(j, k).ok_or(Error::NotALink(j, k))?;
    Ok(graph
        .links
        .iter()
        .map(|&(a, b)| {
            if (a, b) == (j, k) {
                twist_link_scale(xi)
            } else if (a, b) == (k, j) {
                twist_link_scale(xi).conj()
            } else if [a, b].iter().any(|s| *s == j || *s == k) {
                C64::new(twist_neighbor_scale(xi), 0.0)
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect())
}

/// Twist angle realizing a target phase on the twisted link.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwistSolution {
    pub xi: f64,
    /// `|(2e^{−iξ} + e^{2iξ})/3|`, the magnitude kept on the twisted link.
    pub link_magnitude: f64,
    /// `(1 + 2cos ξ)/3`, the factor on neighbouring links.
    pub neighbor_scale: f64,
}

/// Continuous phase of the twisted-link factor for `ξ ∈ [0, π]`, running
/// from 0 down to −π.
fn twist_phase_branch(xi: f64) -> f64 {
    let p = twist_link_scale(xi).arg();
    if xi > 0.0 && p > 0.0 {
        p - 2.0 * PI
    } else {
        p
    }
}

/// Solves `arg[(2e^{−iξ} + e^{2iξ})/3] = φ` for the `ξ` nearest zero.
///
/// The phase decreases strictly from 0 to −π on `ξ ∈ [0, π]`, so bisection
/// there handles `φ ∈ (−π, 0]`; positive targets use the mirror `ξ → −ξ`.
pub fn solve_twist(phi: f64) -> TwistSolution {
    let target = wrap_to_pi(phi);
    let (goal, sign) = if target > 0.0 { (-target, -1.0) } else { (target, 1.0) };
    let (mut lo, mut hi) = (0.0f64, PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if twist_phase_branch(mid) > goal {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    let xi = sign * 0.5 * (lo + hi);
    TwistSolution {
        xi,
        link_magnitude: twist_link_scale(xi).norm(),
        neighbor_scale: twist_neighbor_scale(xi),
    }
}

/// Line state of length `m` whose consecutive links carry `targets`.
fn line_state(targets: &[f64]) -> Result<DensityMatrix> {
    let m = targets.len();
    if m == 1 {
        // a period-2 line is a single link: |Ψ⁺⟩ rotated at its second site
        let plus = crate::ring::rho_r(2, 0)?;
        return plus.rotate_sites(&[0.0, targets[0]]);
    }
    let theta = theta_in_range(normalize_angle(targets.iter().sum()));
    let base = optimal_mixture(m, theta)?;
    let each = theta / m as f64;
    let mut xi = vec![0.0; m];
    for i in 0..m - 1 {
        xi[i + 1] = xi[i] + targets[i] - each;
    }
    base.rotate_sites(&xi)
}

/// Sites of each row (or column) in traversal order, with the target phase
/// of each consecutive link.
fn lines(
    graph: &LatticeGraph,
    config: &PhaseConfig,
    rows: usize,
    cols: usize,
    vertical: bool,
) -> Result<Vec<(Vec<usize>, Vec<f64>)>> {
    let (count, len) = if vertical { (cols, rows) } else { (rows, cols) };
    (0..count)
        .map(|line| {
            let site = |t: usize| {
                if vertical {
                    (t % len) * cols + line
                } else {
                    line * cols + t % len
                }
            };
            let sites: Vec<usize> = (0..len).map(site).collect();
            let link_count = if len == 2 { 1 } else { len };
            let targets = (0..link_count)
                .map(|t| config.phase(graph, site(t), site(t + 1)))
                .collect::<Result<Vec<f64>>>()?;
            Ok((sites, targets))
        })
        .collect()
}

/// Product over lines of line states, arranged in lattice site order.
fn lines_product(lines: &[(Vec<usize>, Vec<f64>)], n: usize) -> Result<DensityMatrix> {
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut state: Option<DensityMatrix> = None;
    for (sites, targets) in lines {
        let piece = line_state(targets)?;
        state = Some(match state {
            None => piece,
            Some(s) => s.tensor(&piece)?,
        });
        order.extend(sites);
    }
    let perm: Vec<usize> = (0..n)
        .map(|site| {
            order
                .iter()
                .position(|&s| s == site)
                .expect("every site lies on one line")
        })
        .collect();
    state.expect("at least one line").permuted(&perm)
}

/// Both halves of the row/column construction and their equal mixture.
#[derive(Clone, Debug, PartialEq)]
pub struct RowColumnMixture {
    /// Rows in line states with horizontal targets realized.
    pub rows_state: DensityMatrix,
    /// Columns in line states with vertical targets realized.
    pub columns_state: DensityMatrix,
    pub mixture: DensityMatrix,
}

/// `½(ρ'_H + ρ'_V)`: each row (resp. column) of the torus is put in the
/// optimal ring state for its holonomy and rotated onto the target phases.
pub fn row_column_mixture(graph: &LatticeGraph, config: &PhaseConfig) -> Result<RowColumnMixture> {
    let Geometry::Torus { rows, cols } = graph.geometry else {
        return Err(Error::InvalidArgument("the row/column mixture needs a torus".into()));
    };
    if config.phases.len() != graph.links.len() {
        return Err(Error::DimensionMismatch {
            expected: graph.links.len(),
            got: config.phases.len(),
        });
    }
    check_sites(graph.sites, MAX_MATRIX_SITES)?;
    let rows_state = lines_product(&lines(graph, config, rows, cols, false)?, graph.sites)?;
    let columns_state = lines_product(&lines(graph, config, rows, cols, true)?, graph.sites)?;
    let mixture = DensityMatrix::mixture(&[(0.5, &rows_state), (0.5, &columns_state)])?;
    Ok(RowColumnMixture {
        rows_state,
        columns_state,
        mixture,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkStatus {
    Consistent,
    Inconsistent,
    /// `|c|` is too small for the phase to mean anything.
    AnyPhase,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinkCheck {
    pub j: usize,
    pub k: usize,
    pub magnitude: f64,
    pub phase: f64,
    pub target: f64,
    pub error: f64,
    pub status: LinkStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigReport {
    pub links: Vec<LinkCheck>,
    pub k: f64,
    pub fully_connected: bool,
    pub pass: bool,
}

/// Compares every link phase of `state` with `config`.
pub fn verify_config(
    state: &DensityMatrix,
    graph: &LatticeGraph,
    config: &PhaseConfig,
    tol: f64,
) -> Result<ConfigReport> {
    let cs = lattice_links(state, graph)?;
    let links: Vec<LinkCheck> = graph
        .links
        .iter()
        .zip(&cs)
        .zip(&config.phases)
        .map(|((&(j, k), z), &target)| {
            let magnitude = z.norm();
            let phase = normalize_angle(z.arg());
            let error = wrap_to_pi(phase - target).abs();
            let status = if magnitude < NO_CORRELATION {
                LinkStatus::AnyPhase
            } else if error <= tol {
                LinkStatus::Consistent
            } else {
                LinkStatus::Inconsistent
            };
            LinkCheck {
                j,
                k,
                magnitude,
                phase,
                target,
                error,
                status,
            }
        })
        .collect();
    let k = 2.0 * links.iter().map(|l| l.magnitude).sum::<f64>() / links.len() as f64;
    Ok(ConfigReport {
        fully_connected: links.iter().all(|l| l.status != LinkStatus::AnyPhase),
        pass: links.iter().all(|l| l.status != LinkStatus::Inconsistent),
        links,
        k,
    })
}
