use nalgebra::{DMatrix, DVector, RowDVector};

use super::{ode::rk4_step, poly, FrequencyResponse, LtiError, TransferFunction, C64};

/// Single-input single-output state-space model `ẋ = Ax + Bu`, `y = Cx + Du`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: RowDVector<f64>,
    pub d: f64,
}

impl StateSpace {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: RowDVector<f64>, d: f64) -> Result<Self, LtiError> {
        let n = a.nrows();
        if a.ncols() != n || b.len() != n || c.len() != n {
            return Err(LtiError::DimensionMismatch(format!(
                "A is {}x{}, B has {} rows, C has {} columns",
                a.nrows(),
                a.ncols(),
                b.len(),
                c.len()
            )));
        }
        Ok(Self { a, b, c, d })
    }

    /// State dimension.
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn derivative(&self, x: &DVector<f64>, u: f64) -> DVector<f64> {
        &self.a * x + &self.b * u
    }

    pub fn output(&self, x: &DVector<f64>, u: f64) -> f64 {
        (&self.c * x)[0] + self.d * u
    }

    /// One classical RK4 step with the input sampled at `t`, `t + dt/2` and `t + dt`.
    pub fn step_rk4(&self, x: &DVector<f64>, u: impl Fn(f64) -> f64, t: f64, dt: f64) -> DVector<f64> {
        rk4_step(|tau, xs: &DVector<f64>| self.derivative(xs, u(tau)), t, x, dt)
    }
}

impl FrequencyResponse for StateSpace {
    fn freq_response(&self, omega: f64) -> Result<C64, LtiError> {
        let n = self.n();
        if n == 0 {
            return Ok(C64::new(self.d, 0.0));
        }
        let s = C64::new(0.0, omega);
        let m = DMatrix::<C64>::from_fn(n, n, |i, j| {
            let diag = if i == j { s } else { C64::new(0.0, 0.0) };
            diag - C64::new(self.a[(i, j)], 0.0)
        });
        let rhs = DVector::<C64>::from_fn(n, |i, _| C64::new(self.b[i], 0.0));
        let lu = m.lu();
        let x = lu.solve(&rhs).ok_or(LtiError::SingularAtFrequency(omega))?;
        let y: C64 = (0..n).map(|i| x[i] * self.c[i]).sum::<C64>() + self.d;
        if !(y.re.is_finite() && y.im.is_finite()) {
            return Err(LtiError::SingularAtFrequency(omega));
        }
        Ok(y)
    }
}

/// Controllable canonical realization after dividing through by the leading
/// denominator coefficient.
pub fn to_state_space(tf: &TransferFunction) -> Result<StateSpace, LtiError> {
    let den = tf.den();
    let n = tf.order();
    let num = poly::trim(tf.num());
    if num.len() > n + 1 && num.iter().any(|&c| c != 0.0) {
        return Err(LtiError::ImproperSystem { num: num.len() - 1, den: n });
    }
    let lead = den[0];
    let a_coef: Vec<f64> = den.iter().map(|v| v / lead).collect();
    let mut b_coef = vec![0.0; n + 1];
    for (i, v) in num.iter().rev().enumerate() {
        b_coef[n - i] = v / lead;
    }
    let d = b_coef[0];

    let mut a = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        a[(0, j)] = -a_coef[j + 1];
    }
    for i in 1..n {
        a[(i, i - 1)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    if n > 0 {
        b[0] = 1.0;
    }
    let c = RowDVector::<f64>::from_fn(n, |_, j| b_coef[j + 1] - a_coef[j + 1] * d);
    StateSpace::new(a, b, c, d)
}
