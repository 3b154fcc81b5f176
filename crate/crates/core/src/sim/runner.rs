use std::path::Path;

use log::{debug, info};
use nalgebra::Vector3;

use crate::mrac::{self, AdaptiveState, AugmentedSystem, GainAndCertificate, TrackingError};
use crate::plant::{self, IdentifiedTable, LeakyDoubleIntegrator};
use crate::signals::{self, Columns, SignalError, TimeSeries, Unit, RECORD_COLUMNS};
use crate::structure::{inertial_feedback, Newmark, StructureState, TwoDofFrame};
use crate::Error;

use super::config::{PlantKind, ScenarioConfig};
use super::reference::{build_reference, ReferenceTrajectory};

/// Post-transient NRMSE of the table response against the reference model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NrmseSummary {
    pub displacement: f64,
    pub velocity: f64,
    pub acceleration: f64,
}

/// Time-aligned log of one closed-loop run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimulationRecord {
    pub dt: f64,
    pub t: Vec<f64>,
    pub r: Vec<f64>,
    /// Reference-model displacement, the trajectory the table is driven to follow.
    pub dt_cmd: Vec<f64>,
    pub d_table: Vec<f64>,
    pub v_table: Vec<f64>,
    pub a_table: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub a1_abs: Vec<f64>,
    pub a2_abs: Vec<f64>,
    pub force: Vec<f64>,
    pub v_lyap: Vec<f64>,
    pub ref_velocity: Vec<f64>,
    pub ref_acceleration: Vec<f64>,
    /// Full augmented state and its reference, `[d_t, v_t, x_c]`.
    pub x: Vec<[f64; 3]>,
    pub x_r: Vec<[f64; 3]>,
    pub w_hat: Vec<[f64; 3]>,
}

impl SimulationRecord {
    fn with_capacity(dt: f64, n: usize) -> Self {
        let v = || Vec::with_capacity(n);
        Self {
            dt,
            t: v(),
            r: v(),
            dt_cmd: v(),
            d_table: v(),
            v_table: v(),
            a_table: v(),
            d1: v(),
            d2: v(),
            a1_abs: v(),
            a2_abs: v(),
            force: v(),
            v_lyap: v(),
            ref_velocity: v(),
            ref_acceleration: v(),
            x: Vec::with_capacity(n),
            x_r: Vec::with_capacity(n),
            w_hat: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// The persisted columns in schema order.
    pub fn to_columns(&self) -> Columns {
        let mut c = Columns::new();
        let cols = [
            &self.t,
            &self.r,
            &self.dt_cmd,
            &self.d_table,
            &self.v_table,
            &self.a_table,
            &self.d1,
            &self.d2,
            &self.a1_abs,
            &self.a2_abs,
            &self.force,
            &self.v_lyap,
        ];
        for (name, values) in RECORD_COLUMNS.iter().zip(cols) {
            c.push(*name, values.clone()).expect("record columns share one length");
        }
        c
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), SignalError> {
        signals::write_csv(&self.to_columns(), path)
    }

    /// NRMSE of displacement, velocity and acceleration after `skip_s` seconds.
    pub fn nrmse_summary(&self, skip_s: f64) -> Result<NrmseSummary, SignalError> {
        let pair = |reference: &[f64], measured: &[f64], unit: Unit| -> Result<f64, SignalError> {
            let r = TimeSeries::new(self.dt, reference.to_vec(), unit)?.skip_time(skip_s)?;
            let m = TimeSeries::new(self.dt, measured.to_vec(), unit)?.skip_time(skip_s)?;
            signals::nrmse(&r, &m)
        };
        Ok(NrmseSummary {
            displacement: pair(&self.dt_cmd, &self.d_table, Unit::Meter)?,
            velocity: pair(&self.ref_velocity, &self.v_table, Unit::MeterPerSecond)?,
            acceleration: pair(&self.ref_acceleration, &self.a_table, Unit::MeterPerSecond2)?,
        })
    }

    /// Largest `|F − (m_t a_t + m1 a1 + m2 a2)|` over the run.
    pub fn equilibrium_residual(&self, m_t: f64, specimen: [f64; 2]) -> f64 {
        (0..self.len())
            .map(|k| {
                let inertia = m_t * self.a_table[k] + specimen[0] * self.a1_abs[k] + specimen[1] * self.a2_abs[k];
                (self.force[k] - inertia).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Everything the loop needs that does not change during a run.
struct Loop<'a> {
    cfg: &'a ScenarioConfig,
    aug: AugmentedSystem,
    gc: GainAndCertificate,
    pb: Vector3<f64>,
    w_true: Vector3<f64>,
    lambda_true: f64,
    specimen: [f64; 2],
    frame: Option<TwoDofFrame>,
    reference: ReferenceTrajectory,
}

impl Loop<'_> {
    fn command(&self, k: usize) -> f64 {
        mrac::command_signal(self.reference.r[k], self.reference.r_dot[k], self.aug.er)
    }

    fn xc_rate(&self, d: f64, v: f64, xc: f64, c: f64) -> f64 {
        self.aug.ep[0] * d + self.aug.ep[1] * v + self.aug.er * xc - c
    }

    #[allow(clippy::too_many_arguments)]
    fn log(
        &self,
        rec: &mut SimulationRecord,
        k: usize,
        x: &Vector3<f64>,
        x_r: &Vector3<f64>,
        a_t: f64,
        s: &StructureState,
        force: f64,
        adapt: &AdaptiveState,
    ) -> Result<(), Error> {
        let t = k as f64 * self.cfg.dt;
        let c = self.command(k);
        let ref_rate = self.gc.a_r * x_r + self.aug.b_r * c;
        let e = TrackingError::new(x, x_r);
        let v = mrac::lyapunov_value(&e, &self.gc.p, &adapt.w_hat, &self.w_true, self.lambda_true, adapt.gamma);
        let finite = x.iter().chain(x_r.iter()).chain(adapt.w_hat.iter()).all(|z| z.is_finite())
            && a_t.is_finite()
            && force.is_finite()
            && s.is_finite();
        if !finite {
            return Err(Error::NonFiniteState { t });
        }
        rec.t.push(t);
        rec.r.push(self.reference.r[k]);
        rec.dt_cmd.push(x_r[0]);
        rec.d_table.push(x[0]);
        rec.v_table.push(x[1]);
        rec.a_table.push(a_t);
        rec.d1.push(s.x1);
        rec.d2.push(s.x2);
        rec.a1_abs.push(s.a1_abs);
        rec.a2_abs.push(s.a2_abs);
        rec.force.push(force);
        rec.v_lyap.push(v);
        rec.ref_velocity.push(ref_rate[0]);
        rec.ref_acceleration.push(ref_rate[1]);
        rec.x.push([x[0], x[1], x[2]]);
        rec.x_r.push([x_r[0], x_r[1], x_r[2]]);
        rec.w_hat.push([adapt.w_hat[0], adapt.w_hat[1], adapt.w_hat[2]]);
        Ok(())
    }

    /// Table, controller and reference model share one RK4 step; the
    /// specimen is solved together with the table acceleration at each sample
    /// so the force balance holds exactly there.
    fn run_ideal(&self, mut adapt: AdaptiveState) -> Result<SimulationRecord, Error> {
        let cfg = self.cfg;
        let dt = cfg.dt;
        let n = self.reference.len();
        let m_t = cfg.m_t;
        let newmark = self.frame.map(|f| Newmark::new(f, dt)).transpose()?;
        let mut rec = SimulationRecord::with_capacity(dt, n);

        let mut x = Vector3::zeros();
        let mut x_r = Vector3::zeros();
        let mut s = StructureState::at_rest();
        // σ used by the regressor over the current step: absolute floor
        // accelerations from the previous sample
        let mut sigma = [0.0; 2];
        let mut force = adapt.control_force(&mrac::build_regressor(sigma, &self.gc.k, &x));
        let mut a_t = force / (m_t + self.specimen[0] + self.specimen[1]);
        if let Some(nm) = &newmark {
            s = StructureState::initial(nm.frame(), [0.0; 2], [0.0; 2], a_t);
        }
        self.log(&mut rec, 0, &x, &x_r, a_t, &s, force, &adapt)?;

        for k in 0..n - 1 {
            let c = self.command(k);
            let x_r_next = mrac::reference_step(&self.gc, &self.aug.b_r, &x_r, c, dt);

            let phi = mrac::build_regressor(sigma, &self.gc.k, &x);
            let e = TrackingError::new(&x, &x_r);
            let dw = adapt.weight_increment(&phi, &e, &self.pb, dt);

            let held_feedback = self.specimen[0] * sigma[0] + self.specimen[1] * sigma[1];
            let w_hat = adapt.w_hat;
            let k_row = self.gc.k;
            let x_next = crate::lti::rk4_step(
                |_, z: &Vector3<f64>| {
                    let phi = Vector3::new(sigma[0], sigma[1], -(k_row * z)[0]);
                    let f = -w_hat.dot(&phi);
                    Vector3::new(z[1], (f - held_feedback) / m_t, self.xc_rate(z[0], z[1], z[2], c))
                },
                0.0,
                &x,
                dt,
            );
            if !cfg.freeze_adaptation {
                adapt.w_hat += dw;
            }
            x = x_next;
            x_r = x_r_next;
            sigma = [s.a1_abs, s.a2_abs];
            force = adapt.control_force(&mrac::build_regressor(sigma, &self.gc.k, &x));
            match &newmark {
                Some(nm) => {
                    let (f0, f1) = nm.feedback_affine(&s);
                    a_t = (force - f0) / (m_t + f1);
                    s = nm.step(&s, a_t);
                }
                None => a_t = force / m_t,
            }
            self.log(&mut rec, k + 1, &x, &x_r, a_t, &s, force, &adapt)?;
        }
        Ok(rec)
    }

    /// Zero-order-hold force through the leaky double integrator into the
    /// inner loop; the specimen, when enabled, follows the measured table
    /// acceleration one step behind.
    fn run_identified(&self, mut adapt: AdaptiveState) -> Result<SimulationRecord, Error> {
        let cfg = self.cfg;
        let dt = cfg.dt;
        let n = self.reference.len();
        let mut table = IdentifiedTable::new(cfg.inner_gain, cfg.filter_cutoff_hz, dt)?;
        let mut integ = LeakyDoubleIntegrator::new(cfg.m_t_nominal, cfg.leak_pole)?;
        let newmark = self.frame.map(|f| Newmark::new(f, dt)).transpose()?;
        let mut rec = SimulationRecord::with_capacity(dt, n);

        let mut xc = 0.0;
        let mut x_r = Vector3::zeros();
        let mut s = StructureState::at_rest();
        for k in 0..n {
            let x = Vector3::new(table.d_t, table.v_t, xc);
            let sigma = [s.a1_abs, s.a2_abs];
            let phi = mrac::build_regressor(sigma, &self.gc.k, &x);
            let force = adapt.control_force(&phi);
            self.log(&mut rec, k, &x, &x_r, table.a_t, &s, force, &adapt)?;
            if k == n - 1 {
                break;
            }
            let c = self.command(k);
            let x_r_next = mrac::reference_step(&self.gc, &self.aug.b_r, &x_r, c, dt);
            let e = TrackingError::new(&x, &x_r);
            let dw = adapt.weight_increment(&phi, &e, &self.pb, dt);

            let d_cmd = plant::force_to_command(&mut integ, force, dt);
            let disturbance = match &newmark {
                Some(nm) => cfg.disturbance_gain * inertial_feedback(&s, nm.frame()) / cfg.m_t_nominal,
                None => 0.0,
            };
            let (d0, v0) = (table.d_t, table.v_t);
            plant::identified_step(&mut table, d_cmd, -disturbance, dt)?;
            xc = crate::lti::rk4_step(|_, z: &f64| self.xc_rate(d0, v0, *z, c), 0.0, &xc, dt);
            if let Some(nm) = &newmark {
                s = nm.step(&s, table.a_t);
            }
            if !cfg.freeze_adaptation {
                adapt.w_hat += dw;
            }
            x_r = x_r_next;
            if !table.is_finite() {
                return Err(Error::NonFiniteState { t: (k + 1) as f64 * dt });
            }
        }
        Ok(rec)
    }
}

/// Runs one scenario. Output is not written; see [`run_and_write`].
pub fn run_simulate(cfg: &ScenarioConfig) -> Result<SimulationRecord, Error> {
    cfg.validate()?;
    let frame = cfg.frame.as_ref().map(|f| f.build()).transpose()?;
    let specimen = frame.map_or([0.0; 2], |f| [f.m1, f.m2]);
    // the controller design only uses A, B, B_r; the mass enters through Λ and W
    let aug = mrac::build_augmented(cfg.m_t, specimen, cfg.ep, cfg.er)?;
    let gc = mrac::design_reference(&aug, &cfg.reference_poles)?;
    let reference = build_reference(&cfg.reference, cfg.dt, cfg.duration, cfg.filter_cutoff_hz)?;
    if reference.len() < 2 {
        return Err(SignalError::TooShort(reference.len(), 2).into());
    }
    info!(
        "simulating {} samples at dt = {} s, plant {:?}, K = [{:.6e}, {:.6e}, {:.6e}]",
        reference.len(),
        cfg.dt,
        cfg.plant,
        gc.k[0],
        gc.k[1],
        gc.k[2]
    );
    let adapt = AdaptiveState::new(Vector3::from(cfg.w_hat0), cfg.gamma)?;
    let lp = Loop {
        cfg,
        pb: gc.pb(&aug.b),
        w_true: mrac::true_weights(cfg.m_t, specimen),
        lambda_true: 1.0 / cfg.m_t,
        specimen,
        frame,
        reference,
        aug,
        gc,
    };
    let rec = match cfg.plant {
        PlantKind::Ideal => lp.run_ideal(adapt)?,
        PlantKind::Identified => lp.run_identified(adapt)?,
    };
    debug!("final weights {:?}", rec.w_hat.last());
    Ok(rec)
}

/// Runs a scenario, writes the CSV when an output path is configured and
/// returns the record with its NRMSE summary.
pub fn run_and_write(cfg: &ScenarioConfig) -> Result<(SimulationRecord, NrmseSummary), Error> {
    let rec = run_simulate(cfg)?;
    if let Some(path) = &cfg.output_path {
        rec.write_csv(path)?;
        info!("wrote {}", path.display());
    }
    let summary = rec.nrmse_summary(cfg.nrmse_skip_s)?;
    Ok((rec, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::config::{FrameConfig, FrameDamping, ReferenceSource};

    fn short(plant: PlantKind) -> ScenarioConfig {
        ScenarioConfig { plant, duration: 0.5, ..ScenarioConfig::default() }
    }

    #[test]
    fn zero_reference_gives_zero_trajectories() {
        let cfg = ScenarioConfig {
            reference: ReferenceSource::Sine { amplitude: 0.0, frequency_hz: 1.0 },
            ..short(PlantKind::Ideal)
        };
        let rec = run_simulate(&cfg).unwrap();
        assert!(rec.d_table.iter().chain(&rec.force).all(|&v| v == 0.0));
        assert_eq!(rec.nrmse_summary(0.0), Err(SignalError::ZeroReference));
    }

    #[test]
    fn record_columns_follow_the_schema() {
        let rec = run_simulate(&short(PlantKind::Ideal)).unwrap();
        let cols = rec.to_columns();
        assert_eq!(cols.names(), RECORD_COLUMNS.map(String::from));
        assert_eq!(cols.rows(), 5001);
        assert!((cols.uniform_dt().unwrap() - 1e-4).abs() < 1e-15);
    }

    #[test]
    fn identified_plant_runs() {
        let cfg = ScenarioConfig { gamma: 1e3, ..short(PlantKind::Identified) };
        let rec = run_simulate(&cfg).unwrap();
        assert_eq!(rec.len(), 5001);
        assert!(rec.d_table.iter().any(|&d| d != 0.0));
    }

    #[test]
    fn divergence_reports_the_time() {
        // fast adaptation does not tolerate the inner-loop lag of the identified table
        let cfg = ScenarioConfig { gamma: 1e5, duration: 2.0, ..short(PlantKind::Identified) };
        match run_simulate(&cfg) {
            Err(Error::NonFiniteState { t }) => assert!(t > 0.0 && t < 2.0),
            other => panic!("expected a non-finite abort, got {other:?}"),
        }
    }

    #[test]
    fn ideal_with_frame_balances_forces() {
        let cfg = ScenarioConfig {
            frame: Some(FrameConfig {
                m1: 100.0,
                m2: 100.0,
                k1: 4.1e4,
                k2: 4.1e4,
                damping: FrameDamping::Modal { zeta1: 0.02, zeta2: 0.02 },
            }),
            ..short(PlantKind::Ideal)
        };
        let rec = run_simulate(&cfg).unwrap();
        let peak = rec.force.iter().fold(0.0_f64, |m, f| m.max(f.abs()));
        assert!(peak > 0.0);
        assert!(rec.equilibrium_residual(cfg.m_t, [100.0, 100.0]) < 1e-8 * peak);
    }
}
