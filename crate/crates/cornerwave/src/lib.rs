//! cornerwave — a finite-difference laboratory for wave-type initial-boundary
//! value problems on a corner domain (a half-slab `x¹ ≤ 0` with a timelike
//! boundary wall at `x¹ = 0` meeting the initial slice in a corner).
//!
//! The crate evolves, with second-order stencils and classical RK4:
//!
//! * a scalar wave equation with Dirichlet / Sommerfeld / Neumann wall
//!   closures and a full energy ledger ([`scalar`]),
//! * the ten-component linearized metric perturbation in wave gauge together
//!   with a four-component boundary gauge map, closed on the wall by a
//!   per-transverse-mode least-squares projection onto the boundary rows
//!   (data rows plus discretized gauge constraints) around an
//!   interior-extrapolated seed ([`gravity`]),
//! * corner compatibility algebra: the λ/ℓ corner-angle identities, conformal
//!   class comparison, and the zeroth-to-third order matching conditions for
//!   the boundary gauge map ([`compat`]).
//!
//! The [`harness`] module turns JSON configs into runs, sweeps and reports;
//! the thin `cornerwave` binary exposes it as `run`, `sweep`, `check-corner`
//! and `selftest` subcommands.
//!
//! The examples directory is the guided tour — each file exercises one
//! capability end to end:
//!
//! ```text
//! cargo run --release --example scalar_traveling_wave   # convergence study
//! cargo run --release --example scalar_energy_ledger    # flux identity + estimate ratio
//! cargo run --release --example dirichlet_neumann       # Dirichlet-to-Neumann report
//! cargo run --release --example gravity_pure_gauge      # constraint propagation, set B
//! cargo run --release --example gravity_tt_wave         # TT wave, angle-parameter closures
//! cargo run --release --example gauge_map               # boundary gauge-map system
//! cargo run --release --example bootstrap_identities    # wall identity chain
//! cargo run --release --example corner_algebra          # corner-angle + compatibility checks
//! ```

pub mod compat;
pub mod error;
pub mod gravity;
pub mod grid;
pub mod harness;
pub mod scalar;

pub use error::{Error, Result};
pub use grid::{Axis, BoundaryField, CornerGrid, Region, ScalarField, Scheme};
