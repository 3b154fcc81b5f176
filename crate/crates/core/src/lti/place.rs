use nalgebra::{DMatrix, DVector, RowDVector};

use super::{poly, LtiError, C64};

/// State-feedback gain `K` with `eig(A - BK)` equal to `desired`, by
/// Ackermann's formula.
pub fn place_poles(a: &DMatrix<f64>, b: &DVector<f64>, desired: &[C64]) -> Result<RowDVector<f64>, LtiError> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(LtiError::DimensionMismatch(format!(
            "A is {}x{}, B has {} rows",
            n,
            a.ncols(),
            b.len()
        )));
    }
    if desired.len() != n {
        return Err(LtiError::DimensionMismatch(format!("{} poles requested for order {n}", desired.len())));
    }
    if desired.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
        return Err(LtiError::InvalidParameter("non-finite pole".into()));
    }
    let desired_scale = desired.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let mut unmatched: Vec<C64> = desired.to_vec();
    while let Some(p) = unmatched.pop() {
        if p.im.abs() <= 1e-12 * desired_scale {
            continue;
        }
        let partner = unmatched
            .iter()
            .position(|q| (q - p.conj()).norm() <= 1e-12 * desired_scale)
            .ok_or(LtiError::NotConjugateSymmetric)?;
        unmatched.swap_remove(partner);
    }

    let mut ctrb = DMatrix::<f64>::zeros(n, n);
    let mut col = b.clone();
    for j in 0..n {
        ctrb.set_column(j, &col);
        col = a * col;
    }
    let sv = ctrb.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let tol = n as f64 * f64::EPSILON * smax;
    let rank = sv.iter().filter(|&&s| s > tol).count();
    if rank < n {
        return Err(LtiError::Uncontrollable { rank, n });
    }

    let coeffs = poly::from_roots(desired);
    // α(A) by Horner with the real parts (imaginary parts cancel for conjugate sets)
    let mut alpha = DMatrix::<f64>::zeros(n, n);
    for c in &coeffs {
        alpha = a * alpha + DMatrix::identity(n, n) * c.re;
    }
    let mut en = RowDVector::<f64>::zeros(n);
    en[n - 1] = 1.0;
    // eₙᵀ C⁻¹ as the solution of Cᵀ y = eₙ
    let y = ctrb
        .transpose()
        .lu()
        .solve(&en.transpose())
        .ok_or(LtiError::Uncontrollable { rank, n })?;
    Ok(y.transpose() * alpha)
}
