use std::f64::consts::{PI, SQRT_2};

use super::{poly, LtiError, TransferFunction, C64};

/// Continuous second-order Butterworth low-pass `ωc² / (s² + √2 ωc s + ωc²)`.
pub fn butterworth2_lowpass(fc_hz: f64) -> Result<TransferFunction, LtiError> {
    if !(fc_hz > 0.0 && fc_hz.is_finite()) {
        return Err(LtiError::InvalidParameter(format!("cut-off frequency {fc_hz} Hz")));
    }
    let wc = 2.0 * PI * fc_hz;
    TransferFunction::new(vec![wc * wc], vec![1.0, SQRT_2 * wc, wc * wc])
}

/// Bilinear (Tustin) discretization. With `prewarp_rad_s` the map is scaled
/// so the discrete response matches the continuous one exactly at that frequency.
pub fn discretize_bilinear(
    tf: &TransferFunction,
    dt: f64,
    prewarp_rad_s: Option<f64>,
) -> Result<DiscreteFilter, LtiError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(LtiError::InvalidParameter(format!("sample interval {dt}")));
    }
    if !tf.is_proper() {
        return Err(LtiError::ImproperSystem { num: poly::degree(tf.num()), den: tf.order() });
    }
    let k = match prewarp_rad_s {
        Some(wp) => {
            let half_angle = wp * dt / 2.0;
            if !(half_angle > 0.0 && half_angle < PI / 2.0) {
                return Err(LtiError::NyquistViolation { dt, fc: wp / (2.0 * PI) });
            }
            wp / half_angle.tan()
        }
        None => 2.0 / dt,
    };
    let n = tf.order();
    // Σ c_p K^p (z-1)^p (z+1)^(n-p) for a polynomial with ascending coefficients c_p
    let map = |coeffs: &[f64]| -> Vec<f64> {
        let mut acc = vec![0.0; n + 1];
        for (p, &c) in coeffs.iter().rev().enumerate() {
            if c == 0.0 {
                continue;
            }
            let mut term = vec![c * k.powi(p as i32)];
            for _ in 0..p {
                term = poly::mul(&term, &[1.0, -1.0]);
            }
            for _ in 0..(n - p) {
                term = poly::mul(&term, &[1.0, 1.0]);
            }
            acc = poly::add(&acc, &term);
        }
        acc
    };
    let b = map(poly::trim(tf.num()));
    let a = map(tf.den());
    let a0 = a[0];
    Ok(DiscreteFilter::from_coefficients(
        b.iter().map(|v| v / a0).collect(),
        a.iter().map(|v| v / a0).collect(),
    ))
}

/// The second-order Butterworth low-pass at `fc_hz`, discretized at `dt`
/// with pre-warping at the cut-off.
pub fn butterworth2_discrete(fc_hz: f64, dt: f64) -> Result<DiscreteFilter, LtiError> {
    if !(dt > 0.0 && dt < 1.0 / (2.0 * fc_hz)) {
        return Err(LtiError::NyquistViolation { dt, fc: fc_hz });
    }
    let tf = butterworth2_lowpass(fc_hz)?;
    discretize_bilinear(&tf, dt, Some(2.0 * PI * fc_hz))
}

/// Causal IIR filter in transposed direct form II, zero initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFilter {
    b: Vec<f64>,
    a: Vec<f64>,
    state: Vec<f64>,
}

impl DiscreteFilter {
    /// `b`, `a` in powers of `z^-1`, `a[0] == 1`.
    pub fn from_coefficients(b: Vec<f64>, a: Vec<f64>) -> Self {
        let order = a.len().max(b.len()) - 1;
        let mut b = b;
        let mut a = a;
        b.resize(order + 1, 0.0);
        a.resize(order + 1, 0.0);
        Self { b, a, state: vec![0.0; order] }
    }

    pub fn numerator(&self) -> &[f64] {
        &self.b
    }

    pub fn denominator(&self) -> &[f64] {
        &self.a
    }

    pub fn reset(&mut self) {
        self.state.iter_mut().for_each(|s| *s = 0.0);
    }

    pub fn filter(&mut self, x: f64) -> f64 {
        let y = self.b[0] * x + self.state.first().copied().unwrap_or(0.0);
        let n = self.state.len();
        for i in 0..n {
            let next = if i + 1 < n { self.state[i + 1] } else { 0.0 };
            self.state[i] = self.b[i + 1] * x - self.a[i + 1] * y + next;
        }
        y
    }

    /// Filters a whole signal from zero initial state.
    pub fn apply(&self, input: &[f64]) -> Vec<f64> {
        let mut f = self.clone();
        f.reset();
        input.iter().map(|&x| f.filter(x)).collect()
    }

    /// `H(e^{jωT})`.
    pub fn freq_response(&self, omega: f64, dt: f64) -> C64 {
        let zinv = C64::new(0.0, -omega * dt).exp();
        let eval = |c: &[f64]| c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &v| acc * zinv + v);
        eval(&self.b) / eval(&self.a)
    }

    /// Poles in the z-plane.
    pub fn poles(&self) -> Result<Vec<C64>, LtiError> {
        poly::roots(&self.a)
    }
}
