//! Table models: the ideal rigid table driven by force, and the identified
//! hydraulic table behind a proportional inner displacement loop.

use nalgebra::{DVector, RowDVector, Vector2};
use thiserror::Error;

use crate::lti::{self, DiscreteFilter, LtiError, StateSpace};

/// Longest step accepted by the identified table realization.
pub const MAX_IDENTIFIED_DT: f64 = 1e-4;
/// Scale from the identified model's output (mm) to metres.
pub const IDENTIFIED_OUTPUT_SCALE: f64 = 1e-3;
pub const DEFAULT_LEAK_POLE: f64 = 0.05;
pub const DEFAULT_INNER_GAIN: f64 = 200.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlantError {
    #[error("time step {dt} s exceeds the {max} s limit of the identified table model")]
    StepTooLarge { dt: f64, max: f64 },
    #[error("table mass must be positive and finite, got {0}")]
    InvalidMass(f64),
    #[error("invalid plant parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Lti(#[from] LtiError),
}

/// Rigid table of mass `m_t` pushed by the actuator force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealTable {
    pub m_t: f64,
    pub d_t: f64,
    pub v_t: f64,
    pub a_t: f64,
}

impl IdealTable {
    pub fn new(m_t: f64) -> Result<Self, PlantError> {
        if !(m_t > 0.0 && m_t.is_finite()) {
            return Err(PlantError::InvalidMass(m_t));
        }
        Ok(Self { m_t, d_t: 0.0, v_t: 0.0, a_t: 0.0 })
    }
}

/// One RK4 step of `d̈_t = (F − specimen_feedback) / m_t` with both forces held.
pub fn ideal_step(table: &IdealTable, force: f64, specimen_feedback: f64, dt: f64) -> IdealTable {
    let a = (force - specimen_feedback) / table.m_t;
    let x0 = Vector2::new(table.d_t, table.v_t);
    let x = lti::rk4_step(|_, x: &Vector2<f64>| Vector2::new(x[1], a), 0.0, &x0, dt);
    IdealTable { m_t: table.m_t, d_t: x[0], v_t: x[1], a_t: a }
}

/// Two cascaded leaky integrators turning force into a displacement
/// command: `d_cmd / F = 1 / (m̂_t (s + p)²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakyDoubleIntegrator {
    pub m_nominal: f64,
    pub leak: f64,
    /// `[velocity-like, displacement]` states.
    pub state: [f64; 2],
}

impl LeakyDoubleIntegrator {
    pub fn new(m_nominal: f64, leak: f64) -> Result<Self, PlantError> {
        if !(m_nominal > 0.0 && m_nominal.is_finite()) {
            return Err(PlantError::InvalidMass(m_nominal));
        }
        if !(leak >= 0.0 && leak.is_finite()) {
            return Err(PlantError::InvalidParameter(format!("leak pole {leak}")));
        }
        Ok(Self { m_nominal, leak, state: [0.0; 2] })
    }

    pub fn command(&self) -> f64 {
        self.state[1]
    }
}

/// Advances the integrator one RK4 step with `F` held and returns the new command.
pub fn force_to_command(integ: &mut LeakyDoubleIntegrator, force: f64, dt: f64) -> f64 {
    let p = integ.leak;
    let u = force / integ.m_nominal;
    let x0 = Vector2::new(integ.state[0], integ.state[1]);
    let x = lti::rk4_step(|_, x: &Vector2<f64>| Vector2::new(-p * x[0] + u, -p * x[1] + x[0]), 0.0, &x0, dt);
    integ.state = [x[0], x[1]];
    integ.command()
}

/// Identified table behind the inner loop `v = LP(k_v (d_cmd − d_t))`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentifiedTable {
    pub ss_d: StateSpace,
    x: DVector<f64>,
    c_vel: RowDVector<f64>,
    c_acc: RowDVector<f64>,
    lowpass: DiscreteFilter,
    pub inner_gain: f64,
    pub dt: f64,
    pub d_t: f64,
    pub v_t: f64,
    pub a_t: f64,
    pub voltage: f64,
}

impl IdentifiedTable {
    pub fn new(inner_gain: f64, cutoff_hz: f64, dt: f64) -> Result<Self, PlantError> {
        if dt > MAX_IDENTIFIED_DT * (1.0 + 1e-12) {
            return Err(PlantError::StepTooLarge { dt, max: MAX_IDENTIFIED_DT });
        }
        if !(dt > 0.0) {
            return Err(PlantError::InvalidParameter(format!("time step {dt}")));
        }
        if !(inner_gain > 0.0 && inner_gain.is_finite()) {
            return Err(PlantError::InvalidParameter(format!("inner gain {inner_gain}")));
        }
        let mut ss_d = lti::to_state_space(&lti::tf_shake_table_displacement())?;
        ss_d.c *= IDENTIFIED_OUTPUT_SCALE;
        // relative degree three, so CB = CAB = 0 and the rate outputs are pure state maps
        let c_vel = &ss_d.c * &ss_d.a;
        let c_acc = &c_vel * &ss_d.a;
        let lowpass = lti::butterworth2_discrete(cutoff_hz, dt)?;
        let n = ss_d.n();
        Ok(Self {
            ss_d,
            x: DVector::zeros(n),
            c_vel,
            c_acc,
            lowpass,
            inner_gain,
            dt,
            d_t: 0.0,
            v_t: 0.0,
            a_t: 0.0,
            voltage: 0.0,
        })
    }

    pub fn state(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().all(|v| v.is_finite()) && self.voltage.is_finite()
    }
}

/// One step of the inner loop and the identified table. `disturbance_v` is
/// added to the valve voltage after the filter.
pub fn identified_step(table: &mut IdentifiedTable, d_cmd: f64, disturbance_v: f64, dt: f64) -> Result<(), PlantError> {
    if (dt - table.dt).abs() > 1e-12 * table.dt {
        if dt > MAX_IDENTIFIED_DT * (1.0 + 1e-12) {
            return Err(PlantError::StepTooLarge { dt, max: MAX_IDENTIFIED_DT });
        }
        return Err(PlantError::InvalidParameter(format!(
            "step {dt} differs from the filter design step {}",
            table.dt
        )));
    }
    let v = table.lowpass.filter(table.inner_gain * (d_cmd - table.d_t)) + disturbance_v;
    table.voltage = v;
    table.x = table.ss_d.step_rk4(&table.x, |_| v, 0.0, dt);
    table.d_t = (&table.ss_d.c * &table.x)[0];
    table.v_t = (&table.c_vel * &table.x)[0];
    table.a_t = (&table.c_acc * &table.x)[0];
    Ok(())
}

/// Closed inner-loop characteristic polynomial with the continuous low-pass
/// prototype, `den_G·den_H + k_v·num_G·num_H` after cancelling the common
/// factor `s` of the identified model (its unobservable origin mode).
pub fn inner_loop_characteristic(inner_gain: f64, cutoff_hz: f64) -> Result<Vec<f64>, PlantError> {
    let g = lti::tf_shake_table_displacement();
    let h = lti::butterworth2_lowpass(cutoff_hz)?;
    let (mut g_num, mut g_den) = (lti::poly::trim(g.num()).to_vec(), g.den().to_vec());
    while g_num.len() > 1 && g_den.len() > 1 && g_num.last() == Some(&0.0) && g_den.last() == Some(&0.0) {
        g_num.pop();
        g_den.pop();
    }
    let open_num = lti::poly::scale(&lti::poly::mul(&g_num, h.num()), inner_gain * IDENTIFIED_OUTPUT_SCALE);
    let open_den = lti::poly::mul(&g_den, h.den());
    Ok(lti::poly::add(&open_den, &open_num))
}

/// `m̂_t·|d_cmd / F|` at `omega` rad/s.
pub fn leaky_gain(leak: f64, omega: f64) -> f64 {
    1.0 / (omega * omega + leak * leak)
}
