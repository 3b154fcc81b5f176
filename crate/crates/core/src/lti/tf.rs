use super::{poly, FrequencyResponse, LtiError, C64};

/// Rational transfer function `num(s) / den(s)`, coefficients in descending powers of `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    num: Vec<f64>,
    den: Vec<f64>,
}

impl TransferFunction {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self, LtiError> {
        if num.is_empty() || den.is_empty() {
            return Err(LtiError::InvalidParameter("empty coefficient list".into()));
        }
        if num.iter().chain(&den).any(|c| !c.is_finite()) {
            return Err(LtiError::InvalidParameter("non-finite coefficient".into()));
        }
        if den[0] == 0.0 {
            return Err(LtiError::ZeroLeadingCoefficient);
        }
        Ok(Self { num, den })
    }

    pub fn gain(k: f64) -> Self {
        Self { num: vec![k], den: vec![1.0] }
    }

    pub fn num(&self) -> &[f64] {
        &self.num
    }

    pub fn den(&self) -> &[f64] {
        &self.den
    }

    /// Degree of the denominator.
    pub fn order(&self) -> usize {
        self.den.len() - 1
    }

    pub fn is_proper(&self) -> bool {
        poly::degree(&self.num) <= self.order()
    }

    /// `num(s) / den(s)` at an arbitrary complex point.
    pub fn eval(&self, s: C64) -> Result<C64, LtiError> {
        let d = poly::eval(&self.den, s);
        if d.norm() <= 4.0 * f64::EPSILON * poly::eval_scale(&self.den, s) {
            return Err(LtiError::SingularAtFrequency(s.im));
        }
        Ok(poly::eval(&self.num, s) / d)
    }

    pub fn poles(&self) -> Result<Vec<C64>, LtiError> {
        poly::roots(&self.den)
    }

    pub fn zeros(&self) -> Result<Vec<C64>, LtiError> {
        poly::roots(&self.num)
    }

    /// Series connection.
    pub fn series(&self, other: &TransferFunction) -> TransferFunction {
        TransferFunction {
            num: poly::mul(&self.num, &other.num),
            den: poly::mul(&self.den, &other.den),
        }
    }

    /// Unity negative feedback around `self`: `G / (1 + G)`.
    pub fn feedback_unity(&self) -> TransferFunction {
        TransferFunction {
            num: self.num.clone(),
            den: poly::add(&self.den, &self.num),
        }
    }
}

impl FrequencyResponse for TransferFunction {
    fn freq_response(&self, omega: f64) -> Result<C64, LtiError> {
        self.eval(C64::new(0.0, omega)).map_err(|_| LtiError::SingularAtFrequency(omega))
    }
}

/// Roots of the denominator.
pub fn poles(tf: &TransferFunction) -> Result<Vec<C64>, LtiError> {
    tf.poles()
}

const SHARED_NUMERATOR: [f64; 6] = [719.0, 3.13e6, 6.73e9, 7.83e13, 3.95e15, 0.0];
const ACCEL_DENOMINATOR: [f64; 7] = [1.0, 309.0, 1.67e5, 3.2e7, 6.77e9, 7.5e11, 5.98e13];

/// Identified servo-valve voltage to table displacement model.
pub fn tf_shake_table_displacement() -> TransferFunction {
    let mut den = ACCEL_DENOMINATOR.to_vec();
    den.extend([0.0, 0.0]);
    TransferFunction { num: SHARED_NUMERATOR.to_vec(), den }
}

/// Identified servo-valve voltage to table acceleration model.
pub fn tf_shake_table_acceleration() -> TransferFunction {
    TransferFunction { num: SHARED_NUMERATOR.to_vec(), den: ACCEL_DENOMINATOR.to_vec() }
}
