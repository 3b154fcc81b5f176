//! Simulation of model-reference adaptive control for a uniaxial shake table.
//!
//! The crate is organised bottom-up:
//!
//! * [`signals`]: sampled signals, PEER AT2 ingestion, NRMSE scoring and CSV persistence.
//! * [`lti`]: transfer functions, state-space realizations, root finding, Butterworth
//!   design, Lyapunov and pole-placement solvers, fixed-step RK4.
//! * [`structure`]: two-story shear-frame specimen integrated with average-acceleration Newmark.
//! * [`mrac`]: augmented system, reference model, regressor, adaptive law and Lyapunov diagnostics.
//! * [`plant`]: the ideal force-driven table and the identified hydraulic table behind an inner loop.
//! * [`sim`]: scenario configuration, the closed-loop runner, Bode export and batch execution.

// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod lti;
pub mod mrac;
pub mod plant;
pub mod signals;
pub mod sim;
pub mod structure;

mod error;

pub use error::{Error, ExitCode};
