//! Numerical workbench for finite-time input-to-state stability (FTISS).
//!
//! The crate is organised bottom-up:
//!
//! * [`comparison`]: class-K / K∞ functions and the explicit GKL decay envelope
//!   built from a Lyapunov dissipation rate `V̇ ≤ −M V^σ₀`.
//! * [`certificate`]: turns a dissipation certificate into gains, decay moduli
//!   and settling-time bounds, including the certificate of the sublinear
//!   parabolic PDE.
//! * [`field`]: uniform grids on `[0, 1]`, sampled fields and quadrature norms.
//! * [`pde`]: Strang-split integrator for
//!   `w_t = w_yy − k|w|^{r−1}w + f` with `w(0,t) = 0`, `w_y(1,t) = 0`.
//! * [`analysis`]: trajectory audits (dissipation, envelope, extinction).
//! * [`inequality`]: oracles for the `L^∞` interpolation inequality and its
//!   `L²` corollary.
//! * [`greens`]: the Green's function of `λ²u − u″ = g` and the resolvent
//!   sector scan.
//! * [`presets`]: the pinned experiment configurations used by the CLI.

pub mod analysis;
pub mod certificate;
pub mod comparison;
pub mod error;
pub mod field;
pub mod greens;
pub mod inequality;
pub mod pde;
pub mod presets;
mod tridiag;

pub use analysis::{dissipation_audit, envelope_audit, extinction_time, AuditReport};
pub use certificate::{DissipationCert, PdeParams};
pub use comparison::{GklEnvelope, KFun};
pub use error::{Error, Result};
pub use field::{Field, Grid1D};
pub use pde::{simulate, DisturbanceSpec, InitSpec, SimConfig, TrajectoryRecord};

/// Formats a float with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
