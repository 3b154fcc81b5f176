//! Two-story shear-frame specimen on a moving base.

use nalgebra::{Matrix2, Vector2};
use thiserror::Error;

const GAMMA: f64 = 0.5;
const BETA: f64 = 0.25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructureError {
    #[error("invalid frame parameter: {0}")]
    InvalidFrame(String),
    #[error("time step must be positive and finite, got {0}")]
    InvalidStep(f64),
}

/// How the damping matrix is assembled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Damping {
    /// Story dashpot coefficients in N·s/m, assembled like the stiffness matrix.
    Story { c1: f64, c2: f64 },
    /// `C = alpha·M + beta·K`.
    Rayleigh { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoDofFrame {
    pub m1: f64,
    pub m2: f64,
    pub k1: f64,
    pub k2: f64,
    pub damping: Damping,
}

impl TwoDofFrame {
    pub fn new(m1: f64, m2: f64, k1: f64, k2: f64, c1: f64, c2: f64) -> Result<Self, StructureError> {
        Self::with_damping(m1, m2, k1, k2, Damping::Story { c1, c2 })
    }

    pub fn with_damping(m1: f64, m2: f64, k1: f64, k2: f64, damping: Damping) -> Result<Self, StructureError> {
        for (name, v) in [("m1", m1), ("m2", m2), ("k1", k1), ("k2", k2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(StructureError::InvalidFrame(format!("{name} = {v} must be positive")));
            }
        }
        let (a, b, an, bn) = match damping {
            Damping::Story { c1, c2 } => (c1, c2, "c1", "c2"),
            Damping::Rayleigh { alpha, beta } => (alpha, beta, "alpha", "beta"),
        };
        for (name, v) in [(an, a), (bn, b)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(StructureError::InvalidFrame(format!("{name} = {v} must be non-negative")));
            }
        }
        Ok(Self { m1, m2, k1, k2, damping })
    }

    /// Rayleigh damping fitted so both modes carry the requested damping ratios.
    pub fn with_modal_damping(
        m1: f64,
        m2: f64,
        k1: f64,
        k2: f64,
        zeta1: f64,
        zeta2: f64,
    ) -> Result<Self, StructureError> {
        let undamped = Self::with_damping(m1, m2, k1, k2, Damping::Story { c1: 0.0, c2: 0.0 })?;
        let (w1, w2) = modal_frequencies(&undamped);
        let (alpha, beta) = rayleigh_coefficients(w1, w2, zeta1, zeta2)?;
        Self::with_damping(m1, m2, k1, k2, Damping::Rayleigh { alpha, beta })
    }

    pub fn mass(&self) -> Matrix2<f64> {
        Matrix2::new(self.m1, 0.0, 0.0, self.m2)
    }

    pub fn stiffness(&self) -> Matrix2<f64> {
        story_matrix(self.k1, self.k2)
    }

    pub fn damping_matrix(&self) -> Matrix2<f64> {
        match self.damping {
            Damping::Story { c1, c2 } => story_matrix(c1, c2),
            Damping::Rayleigh { alpha, beta } => self.mass() * alpha + self.stiffness() * beta,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.m1 + self.m2
    }
}

fn story_matrix(a1: f64, a2: f64) -> Matrix2<f64> {
    Matrix2::new(a1 + a2, -a2, -a2, a2)
}

/// `(alpha, beta)` with `ζᵢ = alpha/(2ωᵢ) + beta·ωᵢ/2` at both frequencies.
pub fn rayleigh_coefficients(w1: f64, w2: f64, zeta1: f64, zeta2: f64) -> Result<(f64, f64), StructureError> {
    if !(w1 > 0.0 && w2 > w1) {
        return Err(StructureError::InvalidFrame(format!("modal frequencies {w1}, {w2} not distinct")));
    }
    if !(zeta1 >= 0.0 && zeta2 >= 0.0) {
        return Err(StructureError::InvalidFrame("damping ratios must be non-negative".into()));
    }
    let beta = 2.0 * (zeta2 * w2 - zeta1 * w1) / (w2 * w2 - w1 * w1);
    let alpha = 2.0 * zeta1 * w1 - beta * w1 * w1;
    if alpha < 0.0 || beta < 0.0 {
        return Err(StructureError::InvalidFrame(format!(
            "damping ratios {zeta1}, {zeta2} give negative Rayleigh coefficients"
        )));
    }
    Ok((alpha, beta))
}

/// Undamped natural frequencies in rad/s, ascending.
pub fn modal_frequencies(frame: &TwoDofFrame) -> (f64, f64) {
    let (m1, m2, k1, k2) = (frame.m1, frame.m2, frame.k1, frame.k2);
    // m1 m2 λ² − (m1 k2 + m2 (k1 + k2)) λ + k1 k2 = 0
    let a = m1 * m2;
    let b = m1 * k2 + m2 * (k1 + k2);
    let c = k1 * k2;
    let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
    let hi = (b + disc) / (2.0 * a);
    let lo = c / (a * hi);
    (lo.sqrt(), hi.sqrt())
}

/// Relative displacements, velocities and accelerations of both floors,
/// plus the absolute floor accelerations from the last step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StructureState {
    pub x1: f64,
    pub x2: f64,
    pub v1: f64,
    pub v2: f64,
    pub a1_abs: f64,
    pub a2_abs: f64,
    /// Base acceleration the cached absolute accelerations refer to.
    pub base_accel: f64,
}

impl StructureState {
    pub fn at_rest() -> Self {
        Self::default()
    }

    /// State with accelerations consistent with the equation of motion.
    pub fn initial(frame: &TwoDofFrame, x: [f64; 2], v: [f64; 2], base_accel: f64) -> Self {
        let xv = Vector2::new(x[0], x[1]);
        let vv = Vector2::new(v[0], v[1]);
        let m = frame.mass();
        let rhs = -(m * Vector2::repeat(base_accel)) - frame.damping_matrix() * vv - frame.stiffness() * xv;
        let a_rel = Vector2::new(rhs[0] / frame.m1, rhs[1] / frame.m2);
        Self {
            x1: x[0],
            x2: x[1],
            v1: v[0],
            v2: v[1],
            a1_abs: a_rel[0] + base_accel,
            a2_abs: a_rel[1] + base_accel,
            base_accel,
        }
    }

    pub fn displacement(&self) -> Vector2<f64> {
        Vector2::new(self.x1, self.x2)
    }

    pub fn velocity(&self) -> Vector2<f64> {
        Vector2::new(self.v1, self.v2)
    }

    pub fn relative_acceleration(&self) -> Vector2<f64> {
        Vector2::new(self.a1_abs - self.base_accel, self.a2_abs - self.base_accel)
    }

    pub fn is_finite(&self) -> bool {
        [self.x1, self.x2, self.v1, self.v2, self.a1_abs, self.a2_abs, self.base_accel]
            .iter()
            .all(|v| v.is_finite())
    }

    /// `½vᵀMv + ½xᵀKx`.
    pub fn energy(&self, frame: &TwoDofFrame) -> f64 {
        let x = self.displacement();
        let v = self.velocity();
        0.5 * (v.dot(&(frame.mass() * v)) + x.dot(&(frame.stiffness() * x)))
    }
}

/// Average-acceleration Newmark integrator for one frame at a fixed step.
#[derive(Debug, Clone, PartialEq)]
pub struct Newmark {
    frame: TwoDofFrame,
    dt: f64,
    m: Matrix2<f64>,
    c: Matrix2<f64>,
    k_eff_inv: Matrix2<f64>,
}

impl Newmark {
    pub fn new(frame: TwoDofFrame, dt: f64) -> Result<Self, StructureError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(StructureError::InvalidStep(dt));
        }
        let m = frame.mass();
        let c = frame.damping_matrix();
        let k_eff = frame.stiffness() + c * (GAMMA / (BETA * dt)) + m * (1.0 / (BETA * dt * dt));
        let k_eff_inv = k_eff
            .try_inverse()
            .ok_or_else(|| StructureError::InvalidFrame("singular effective stiffness".into()))?;
        Ok(Self { frame, dt, m, c, k_eff_inv })
    }

    pub fn frame(&self) -> &TwoDofFrame {
        &self.frame
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Next relative displacement for zero base input, and its sensitivity to the base acceleration.
    fn displacement_affine(&self, s: &StructureState) -> (Vector2<f64>, Vector2<f64>) {
        let dt = self.dt;
        let x = s.displacement();
        let v = s.velocity();
        let a = s.relative_acceleration();
        let from_m = x / (BETA * dt * dt) + v / (BETA * dt) + a * (0.5 / BETA - 1.0);
        let from_c = x * (GAMMA / (BETA * dt)) + v * (GAMMA / BETA - 1.0) + a * (dt * (GAMMA / (2.0 * BETA) - 1.0));
        let p0 = self.m * from_m + self.c * from_c;
        let p1 = -(self.m * Vector2::repeat(1.0));
        (self.k_eff_inv * p0, self.k_eff_inv * p1)
    }

    pub fn step(&self, s: &StructureState, base_accel: f64) -> StructureState {
        let dt = self.dt;
        let (x0, x1) = self.displacement_affine(s);
        let x_new = x0 + x1 * base_accel;
        let x = s.displacement();
        let v = s.velocity();
        let a = s.relative_acceleration();
        let a_new = (x_new - x) / (BETA * dt * dt) - v / (BETA * dt) - a * (0.5 / BETA - 1.0);
        let v_new = v + (a * (1.0 - GAMMA) + a_new * GAMMA) * dt;
        StructureState {
            x1: x_new[0],
            x2: x_new[1],
            v1: v_new[0],
            v2: v_new[1],
            a1_abs: a_new[0] + base_accel,
            a2_abs: a_new[1] + base_accel,
            base_accel,
        }
    }

    /// The inertial feedback after one step is affine in the base
    /// acceleration of that step: `f0 + f1·base_accel`.
    pub fn feedback_affine(&self, s: &StructureState) -> (f64, f64) {
        let dt = self.dt;
        let (x0, x1) = self.displacement_affine(s);
        let x = s.displacement();
        let v = s.velocity();
        let a = s.relative_acceleration();
        let a0 = (x0 - x) / (BETA * dt * dt) - v / (BETA * dt) - a * (0.5 / BETA - 1.0);
        let a1 = x1 / (BETA * dt * dt);
        let f0 = self.frame.m1 * a0[0] + self.frame.m2 * a0[1];
        let f1 = self.frame.m1 * (a1[0] + 1.0) + self.frame.m2 * (a1[1] + 1.0);
        (f0, f1)
    }
}

/// One Newmark step for `M ẍ + C ẋ + K x = −M ι ẍ_g`.
pub fn newmark_step(
    frame: &TwoDofFrame,
    state: &StructureState,
    base_accel: f64,
    dt: f64,
) -> Result<StructureState, StructureError> {
    Ok(Newmark::new(*frame, dt)?.step(state, base_accel))
}

/// `m1·a1_abs + m2·a2_abs`, the specimen reaction on the table.
pub fn inertial_feedback(state: &StructureState, frame: &TwoDofFrame) -> f64 {
    frame.m1 * state.a1_abs + frame.m2 * state.a2_abs
}
