//! Real polynomials stored with descending powers.

use nalgebra::DMatrix;

use super::{LtiError, C64};

const MAX_ITERATIONS: usize = 500;
const MOVEMENT_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 64.0 * f64::EPSILON;

/// Strips leading zero coefficients; keeps at least one entry.
pub fn trim(coeffs: &[f64]) -> &[f64] {
    let first = coeffs.iter().position(|&c| c != 0.0).unwrap_or(coeffs.len().saturating_sub(1));
    &coeffs[first..]
}

pub fn degree(coeffs: &[f64]) -> usize {
    trim(coeffs).len().saturating_sub(1)
}

/// Horner evaluation at a complex point.
pub fn eval(coeffs: &[f64], s: C64) -> C64 {
    coeffs.iter().fold(C64::new(0.0, 0.0), |acc, &c| acc * s + c)
}

pub fn eval_complex(coeffs: &[C64], s: C64) -> C64 {
    coeffs.iter().fold(C64::new(0.0, 0.0), |acc, &c| acc * s + c)
}

/// `Σ |a_k| |s|^k`, the magnitude scale used for relative residuals.
pub fn eval_scale(coeffs: &[f64], s: C64) -> f64 {
    let r = s.norm();
    coeffs.iter().fold(0.0, |acc, &c| acc * r + c.abs())
}

pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Sum aligned at the constant term.
pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    let mut out = vec![0.0; n];
    for (i, &x) in a.iter().rev().enumerate() {
        out[n - 1 - i] += x;
    }
    for (i, &x) in b.iter().rev().enumerate() {
        out[n - 1 - i] += x;
    }
    out
}

pub fn scale(a: &[f64], k: f64) -> Vec<f64> {
    a.iter().map(|x| x * k).collect()
}

/// Monic polynomial with the given roots, complex coefficients.
pub fn from_roots(roots: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![C64::new(0.0, 0.0); out.len() + 1];
        for (i, &c) in out.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * r;
        }
        out = next;
    }
    out
}

/// All roots of the polynomial, multiplicities included, by Durand-Kerner
/// iteration on the monic, magnitude-scaled polynomial. Exact zero roots are
/// deflated first. Iteration stops when the relative root movement drops
/// below 1e-12 or every residual is at rounding level.
pub fn roots(coeffs: &[f64]) -> Result<Vec<C64>, LtiError> {
    let c = trim(coeffs);
    if c.len() <= 1 {
        return Ok(Vec::new());
    }
    let zero_roots = c.iter().rev().take_while(|&&v| v == 0.0).count();
    let c = &c[..c.len() - zero_roots];
    let mut out = vec![C64::new(0.0, 0.0); zero_roots];

    let n = c.len() - 1;
    if n == 0 {
        return Ok(out);
    }
    let lead = c[0];
    let monic: Vec<f64> = c.iter().map(|v| v / lead).collect();
    let radius = (1..=n)
        .map(|k| monic[k].abs().powf(1.0 / k as f64))
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let scaled: Vec<f64> = monic
        .iter()
        .enumerate()
        .map(|(k, v)| v / radius.powi(k as i32))
        .collect();

    let seed = C64::new(0.4, 0.9);
    let mut z: Vec<C64> = (0..n).map(|i| seed.powu(i as u32)).collect();
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let mut max_move = 0.0_f64;
        for i in 0..n {
            let zi = z[i];
            let mut denom = C64::new(1.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    denom *= zi - zj;
                }
            }
            let step = eval(&scaled, zi) / denom;
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[i] = zi - step;
            max_move = max_move.max(step.norm() / z[i].norm().max(1e-300));
        }
        // repeated roots stall at a movement of ~eps^(1/m); accept those once the
        // residual has reached rounding level
        let at_rounding = z
            .iter()
            .all(|&zi| eval(&scaled, zi).norm() <= RESIDUAL_TOL * eval_scale(&scaled, zi));
        if max_move < MOVEMENT_TOL || at_rounding {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LtiError::ConvergenceFailure(MAX_ITERATIONS));
    }
    out.extend(z.into_iter().map(|zi| zi * radius));
    Ok(out)
}

/// Characteristic polynomial `det(sI - A)` by the Faddeev-LeVerrier recursion.
pub fn charpoly(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[0] = 1.0;
    let identity = DMatrix::<f64>::identity(n, n);
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        m = a * &m + &identity * coeffs[k - 1];
        coeffs[k] = -(a * &m).trace() / k as f64;
    }
    coeffs
}
