//! Model-reference adaptive control on the augmented table state `X = [d_t, v_t, x_c]`.

use nalgebra::{DMatrix, DVector, Matrix3, RowVector3, Vector3};
use thiserror::Error;

use crate::lti::{self, LtiError, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MracError {
    #[error("table mass must be positive and finite, got {0}")]
    InvalidMass(f64),
    #[error("adaptation rate must be positive and finite, got {0}")]
    InvalidGain(f64),
    #[error("reference model poles must lie strictly in the left half-plane")]
    UnstablePoles,
    #[error(transparent)]
    Lti(#[from] LtiError),
}

/// Augmented plant `Ẋ = AX + BΛ(F − m1σ1 − m2σ2) + B_r c`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedSystem {
    pub a: Matrix3<f64>,
    pub b: Vector3<f64>,
    pub b_r: Vector3<f64>,
    /// `1 / m_t`.
    pub lambda: f64,
    /// `[−m1/m_t, −m2/m_t]`.
    pub wp: [f64; 2],
    pub ep: [f64; 2],
    pub er: f64,
}

/// Assembles the augmented matrices for a table of mass `m_t` carrying floor
/// masses `specimen` (zeros for the bare table).
pub fn build_augmented(m_t: f64, specimen: [f64; 2], ep: [f64; 2], er: f64) -> Result<AugmentedSystem, MracError> {
    if !(m_t > 0.0 && m_t.is_finite()) {
        return Err(MracError::InvalidMass(m_t));
    }
    if specimen.iter().any(|m| !(*m >= 0.0 && m.is_finite())) {
        return Err(MracError::InvalidMass(specimen[0].min(specimen[1])));
    }
    #[rustfmt::skip]
    let a = Matrix3::new(
        0.0,   1.0,   0.0,
        0.0,   0.0,   0.0,
        ep[0], ep[1], er,
    );
    Ok(AugmentedSystem {
        a,
        b: Vector3::new(0.0, 1.0, 0.0),
        b_r: Vector3::new(0.0, 0.0, -1.0),
        lambda: 1.0 / m_t,
        wp: [-specimen[0] / m_t, -specimen[1] / m_t],
        ep,
        er,
    })
}

/// Feedback gain, closed-loop reference matrix and its Lyapunov certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct GainAndCertificate {
    pub k: RowVector3<f64>,
    pub a_r: Matrix3<f64>,
    pub p: Matrix3<f64>,
}

impl GainAndCertificate {
    /// `PB`, the column that turns the tracking error into the adaptation signal.
    pub fn pb(&self, b: &Vector3<f64>) -> Vector3<f64> {
        self.p * b
    }
}

pub fn design_reference(aug: &AugmentedSystem, desired: &[C64]) -> Result<GainAndCertificate, MracError> {
    if desired.iter().any(|p| !(p.re < 0.0)) {
        return Err(MracError::UnstablePoles);
    }
    let a = DMatrix::from_iterator(3, 3, aug.a.iter().copied());
    let b = DVector::from_iterator(3, aug.b.iter().copied());
    let k_dyn = lti::place_poles(&a, &b, desired)?;
    let k = RowVector3::new(k_dyn[0], k_dyn[1], k_dyn[2]);
    let a_r = aug.a - aug.b * k;
    let p_dyn = lti::solve_lyapunov(&DMatrix::from_iterator(3, 3, a_r.iter().copied()))?;
    let p = Matrix3::from_iterator(p_dyn.iter().copied());
    Ok(GainAndCertificate { k, a_r, p })
}

/// `c = E_r·r − ṙ`.
pub fn command_signal(r: f64, r_dot: f64, er: f64) -> f64 {
    er * r - r_dot
}

/// One RK4 step of `Ẋ_r = A_r X_r + B_r c` with `c` held over the step.
pub fn reference_step(
    gc: &GainAndCertificate,
    b_r: &Vector3<f64>,
    x_r: &Vector3<f64>,
    c: f64,
    dt: f64,
) -> Vector3<f64> {
    let forcing = b_r * c;
    lti::rk4_step(|_, x: &Vector3<f64>| gc.a_r * x + forcing, 0.0, x_r, dt)
}

/// `Φ = [σ1, σ2, −K·X]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regressor {
    pub phi: Vector3<f64>,
}

pub fn build_regressor(sigma_p: [f64; 2], k: &RowVector3<f64>, x: &Vector3<f64>) -> Regressor {
    Regressor { phi: Vector3::new(sigma_p[0], sigma_p[1], -(k * x)[0]) }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingError {
    pub e: Vector3<f64>,
}

impl TrackingError {
    pub fn new(x: &Vector3<f64>, x_r: &Vector3<f64>) -> Self {
        Self { e: x - x_r }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveState {
    pub w_hat: Vector3<f64>,
    pub gamma: f64,
}

impl AdaptiveState {
    pub fn new(w_hat: Vector3<f64>, gamma: f64) -> Result<Self, MracError> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(MracError::InvalidGain(gamma));
        }
        Ok(Self { w_hat, gamma })
    }

    /// `F = −Ŵᵀ·Φ`.
    pub fn control_force(&self, phi: &Regressor) -> f64 {
        -self.w_hat.dot(&phi.phi)
    }

    /// Weight increment `dt·γ·Φ·(eᵀPB)` without applying it.
    pub fn weight_increment(&self, phi: &Regressor, e: &TrackingError, pb: &Vector3<f64>, dt: f64) -> Vector3<f64> {
        phi.phi * (dt * self.gamma * e.e.dot(pb))
    }

    /// Explicit Euler step of the adaptation integral.
    pub fn update_weights(&self, phi: &Regressor, e: &TrackingError, p: &Matrix3<f64>, b: &Vector3<f64>, dt: f64) -> Self {
        let pb = p * b;
        Self { w_hat: self.w_hat + self.weight_increment(phi, e, &pb, dt), gamma: self.gamma }
    }
}

/// Free-function form of [`AdaptiveState::control_force`].
pub fn control_force(adaptive: &AdaptiveState, phi: &Regressor) -> f64 {
    adaptive.control_force(phi)
}

/// Free-function form of [`AdaptiveState::update_weights`].
pub fn update_weights(
    adaptive: &AdaptiveState,
    phi: &Regressor,
    e: &TrackingError,
    p: &Matrix3<f64>,
    b: &Vector3<f64>,
    dt: f64,
) -> AdaptiveState {
    adaptive.update_weights(phi, e, p, b, dt)
}

/// Weights for which `F = −WᵀΦ` makes the plant match the reference model exactly.
pub fn true_weights(m_t: f64, specimen: [f64; 2]) -> Vector3<f64> {
    Vector3::new(-specimen[0], -specimen[1], -m_t)
}

/// `V = eᵀPe + γ⁻¹·Λ·‖Ŵ − W‖²`.
pub fn lyapunov_value(
    e: &TrackingError,
    p: &Matrix3<f64>,
    w_hat: &Vector3<f64>,
    w_true: &Vector3<f64>,
    lambda: f64,
    gamma: f64,
) -> f64 {
    let w_err = w_hat - w_true;
    e.e.dot(&(p * e.e)) + lambda * w_err.norm_squared() / gamma
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poles() -> Vec<C64> {
        [-10.0, -12.0, -14.0].iter().map(|&p| C64::new(p, 0.0)).collect()
    }

    #[test]
    fn augmented_blocks() {
        let aug = build_augmented(1.0, [0.0, 0.0], [0.0, 0.0], 1.0).unwrap();
        assert_eq!(aug.lambda, 1.0);
        assert_eq!(aug.a, Matrix3::new(0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0));
        assert_eq!(aug.b, Vector3::new(0.0, 1.0, 0.0));
        assert_eq!(aug.b_r, Vector3::new(0.0, 0.0, -1.0));
        assert_eq!(aug.wp, [0.0, 0.0]);

        let two = build_augmented(2.0, [0.0, 0.0], [0.0, 0.0], 1.0).unwrap();
        assert_eq!(two.lambda, 0.5);
        assert_eq!(two.a, aug.a);

        let loaded = build_augmented(100.0, [50.0, 25.0], [1.0, 0.0], 1.0).unwrap();
        assert_eq!(loaded.wp, [-0.5, -0.25]);
        assert!(matches!(build_augmented(0.0, [0.0; 2], [0.0; 2], 1.0), Err(MracError::InvalidMass(_))));
    }

    #[test]
    fn zero_coupling_row_is_uncontrollable() {
        let aug = build_augmented(1.0, [0.0, 0.0], [0.0, 0.0], 1.0).unwrap();
        assert!(matches!(
            design_reference(&aug, &poles()),
            Err(MracError::Lti(LtiError::Uncontrollable { .. }))
        ));
    }

    #[test]
    fn reference_design() {
        let aug = build_augmented(100.0, [0.0, 0.0], [1.0, 0.0], 1.0).unwrap();
        let gc = design_reference(&aug, &poles()).unwrap();
        let a_r = DMatrix::from_iterator(3, 3, gc.a_r.iter().copied());
        let cp = lti::charpoly(&a_r);
        // (s+10)(s+12)(s+14) = s³ + 36s² + 428s + 1680
        for (got, want) in cp.iter().zip([1.0, 36.0, 428.0, 1680.0]) {
            assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        }
        let res = gc.a_r.transpose() * gc.p + gc.p * gc.a_r + Matrix3::identity();
        assert!(res.amax() <= 1e-10 * gc.p.amax());
        assert!(gc.p.cholesky().is_some());
        assert_eq!(design_reference(&aug, &poles()).unwrap(), gc);
    }

    #[test]
    fn command_cases() {
        assert_eq!(command_signal(0.0, 0.0, 1.0), 0.0);
        assert!((command_signal(0.02, 0.1, 1.0) + 0.08).abs() < 1e-15);
        assert_eq!(command_signal(0.3, 0.0, 1.0), 0.3);
    }

    #[test]
    fn reference_steady_state() {
        let aug = build_augmented(100.0, [0.0, 0.0], [1.0, 0.0], 1.0).unwrap();
        let gc = design_reference(&aug, &poles()).unwrap();
        let zero = reference_step(&gc, &aug.b_r, &Vector3::zeros(), 0.0, 1e-3);
        assert_eq!(zero, Vector3::zeros());
        let c = 0.5;
        let mut x = Vector3::zeros();
        let expected = -(gc.a_r.try_inverse().unwrap() * aug.b_r * c);
        // the closely spaced real poles give large modal coefficients, so allow 20 slowest time constants
        for _ in 0..2000 {
            x = reference_step(&gc, &aug.b_r, &x, c, 1e-3);
        }
        assert!((x - expected).amax() < 1e-6);
    }

    #[test]
    fn regressor_and_force() {
        let k = RowVector3::new(1.0, 1.0, 1.0);
        assert_eq!(build_regressor([0.0, 0.0], &k, &Vector3::zeros()).phi, Vector3::zeros());
        let phi = build_regressor([1.0, 2.0], &k, &Vector3::new(1.0, 1.0, 1.0));
        assert_eq!(phi.phi, Vector3::new(1.0, 2.0, -3.0));

        let zero = AdaptiveState::new(Vector3::zeros(), 1.0).unwrap();
        assert_eq!(zero.control_force(&phi), 0.0);
        let w = AdaptiveState::new(Vector3::new(1.0, 2.0, 3.0), 1.0).unwrap();
        let phi = Regressor { phi: Vector3::new(1.0, 0.0, 1.0) };
        assert_eq!(control_force(&w, &phi), -4.0);
    }

    #[test]
    fn euler_weight_update() {
        let s = AdaptiveState::new(Vector3::zeros(), 1.0).unwrap();
        let phi = Regressor { phi: Vector3::new(1.0, 0.0, 0.0) };
        let b = Vector3::new(0.0, 1.0, 0.0);
        // P = 2I gives eᵀPB = 2 e₂
        let p = Matrix3::identity() * 2.0;
        let e = TrackingError { e: Vector3::new(0.0, 1.0, 0.0) };
        let next = s.update_weights(&phi, &e, &p, &b, 0.01);
        assert!((next.w_hat - Vector3::new(0.02, 0.0, 0.0)).amax() < 1e-16);

        let none = s.update_weights(&phi, &TrackingError { e: Vector3::zeros() }, &p, &b, 0.01);
        assert_eq!(none.w_hat, s.w_hat);

        let mixed = Regressor { phi: Vector3::new(1.0, -2.0, 0.5) };
        let neg = TrackingError { e: Vector3::new(0.0, -1.0, 0.0) };
        let inc = s.weight_increment(&mixed, &neg, &(p * b), 0.01);
        for i in 0..3 {
            assert_eq!(inc[i].signum(), (mixed.phi[i] * -2.0).signum());
        }
        assert!(AdaptiveState::new(Vector3::zeros(), 0.0).is_err());
    }

    #[test]
    fn lyapunov_cases() {
        let p = Matrix3::identity();
        let w = true_weights(4.0, [1.0, 2.0]);
        assert_eq!(w, Vector3::new(-1.0, -2.0, -4.0));
        let e0 = TrackingError { e: Vector3::zeros() };
        assert_eq!(lyapunov_value(&e0, &p, &w, &w, 0.25, 2.0), 0.0);
        let w_hat = w + Vector3::new(1.0, 0.0, 0.0);
        assert!((lyapunov_value(&e0, &p, &w_hat, &w, 0.25, 2.0) - 0.125).abs() < 1e-15);
    }
}
