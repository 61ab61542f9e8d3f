//! Parallel transport and nearest-neighbour correlation in lattices of
//! entangled rebits and qubits.
//!
//! Every link of a lattice carries a transporter read off the two-site
//! reduced density matrix, together with a correlation strength. The crate
//! provides:
//!
//! - [`numerics`]: dense complex linear algebra, pure/mixed states, partial
//!   traces, seeded sampling and the JSON state-file format;
//! - [`rebit`]: the horizontal representation, rebit validity predicates and
//!   rebit rotations;
//! - [`transport`]: transporter and correlation extraction for a link, with
//!   closed-form and quadrature fidelity functionals;
//! - [`ring`]: exact analysis of the rebit ring (Γ operator, fermionic
//!   spectrum, the eigenvalue polygon, optimal states and `K_max(θ)`);
//! - [`qubitext`]: fully entangled fraction, twisted Werner states and the
//!   six-qubit ring family;
//! - [`lattice2d`]: phase configurations on general graphs, the single-link
//!   twist and the row/column mixture;
//! - [`verify`]: the self-checking suite behind `verify-all`.

pub mod error;
pub mod lattice2d;
pub mod numerics;
pub mod optimize;
pub mod qubitext;
pub mod rebit;
pub mod ring;
pub mod transport;
pub mod verify;

pub use error::{Error, Result};
pub use numerics::{CMatrix, CVector, DensityMatrix, Marginal, PureState, C64, TOL};
