//! Single-input single-output LTI toolbox.

mod butterworth;
mod lyapunov;
mod ode;
mod place;
pub mod poly;
mod ss;
mod tf;

pub use butterworth::{butterworth2_discrete, butterworth2_lowpass, discretize_bilinear, DiscreteFilter};
pub use lyapunov::solve_lyapunov;
pub use ode::rk4_step;
pub use place::place_poles;
pub use poly::{charpoly, roots};
pub use ss::{to_state_space, StateSpace};
pub use tf::{poles, tf_shake_table_acceleration, tf_shake_table_displacement, TransferFunction};

pub use nalgebra::Complex;

use thiserror::Error;

pub type C64 = Complex<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LtiError {
    #[error("transfer function is improper (numerator degree {num} > denominator degree {den})")]
    ImproperSystem { num: usize, den: usize },
    #[error("leading denominator coefficient is zero")]
    ZeroLeadingCoefficient,
    #[error("system is singular at omega = {0} rad/s")]
    SingularAtFrequency(f64),
    #[error("root finder did not converge in {0} iterations")]
    ConvergenceFailure(usize),
    #[error("dt = {dt} s violates the Nyquist limit for fc = {fc} Hz")]
    NyquistViolation { dt: f64, fc: f64 },
    #[error("matrix is not Hurwitz (max real eigenvalue part {0})")]
    NotHurwitz(f64),
    #[error("linear system is singular")]
    SingularSystem,
    #[error("pair (A, B) is not controllable: rank {rank} < {n}")]
    Uncontrollable { rank: usize, n: usize },
    #[error("desired pole set is not closed under conjugation")]
    NotConjugateSymmetric,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Frequency response `H(jω)`.
pub trait FrequencyResponse {
    fn freq_response(&self, omega: f64) -> Result<C64, LtiError>;
}

/// Free-function form of [`FrequencyResponse::freq_response`].
pub fn freq_response<S: FrequencyResponse + ?Sized>(sys: &S, omega: f64) -> Result<C64, LtiError> {
    sys.freq_response(omega)
}
