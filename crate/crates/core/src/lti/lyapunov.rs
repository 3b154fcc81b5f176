use nalgebra::{DMatrix, DVector};

use super::{poly, LtiError};

/// Solves `AᵀP + PA = -I` for a Hurwitz `A`.
///
/// The Sylvester form is vectorised column-major as
/// `(I ⊗ Aᵀ + Aᵀ ⊗ I) vec(P) = -vec(I)` and solved by LU; the result is
/// symmetrised.
pub fn solve_lyapunov(a: &DMatrix<f64>) -> Result<DMatrix<f64>, LtiError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(LtiError::DimensionMismatch(format!("A is {}x{}", n, a.ncols())));
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(LtiError::InvalidParameter("non-finite entry in A".into()));
    }
    let eig = poly::roots(&poly::charpoly(a))?;
    let max_re = eig.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if max_re >= 0.0 {
        return Err(LtiError::NotHurwitz(max_re));
    }

    let at = a.transpose();
    let eye = DMatrix::<f64>::identity(n, n);
    let kron = eye.kronecker(&at) + at.kronecker(&eye);
    let rhs = DVector::<f64>::from_fn(n * n, |k, _| if k % (n + 1) == 0 { -1.0 } else { 0.0 });
    let vec_p = kron.lu().solve(&rhs).ok_or(LtiError::SingularSystem)?;
    if vec_p.iter().any(|v| !v.is_finite()) {
        return Err(LtiError::SingularSystem);
    }
    let p = DMatrix::from_column_slice(n, n, vec_p.as_slice());
    Ok((&p + p.transpose()) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar() {
        let p = solve_lyapunov(&DMatrix::from_element(1, 1, -2.0)).unwrap();
        assert!((p[(0, 0)] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn diagonal_cases() {
        let a = DMatrix::from_diagonal(&DVector::from_column_slice(&[-1.0, -2.0, -3.0]));
        let p = solve_lyapunov(&a).unwrap();
        let expected = DMatrix::from_diagonal(&DVector::from_column_slice(&[0.5, 0.25, 1.0 / 6.0]));
        assert!((&p - expected).amax() < 1e-14);

        let p = solve_lyapunov(&(DMatrix::identity(3, 3) * -0.5)).unwrap();
        assert!((p - DMatrix::<f64>::identity(3, 3)).amax() < 1e-14);
    }

    #[test]
    fn companion_closed_form() {
        // A = [[0,1],[-2,-3]] gives P = [[5/4, 1/4], [1/4, 1/4]]
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -2.0, -3.0]);
        let p = solve_lyapunov(&a).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[1.25, 0.25, 0.25, 0.25]);
        assert!((&p - expected).amax() < 1e-12);
    }

    #[test]
    fn residual_and_definiteness() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -4.0, -2.0, 1.0, 1.0, 0.0, -3.0]);
        let p = solve_lyapunov(&a).unwrap();
        let res = a.transpose() * &p + &p * &a + DMatrix::identity(3, 3);
        assert!(res.amax() < 1e-12);
        assert!(p.clone().symmetric_eigen().eigenvalues.iter().all(|&l| l > 0.0));
    }

    #[test]
    fn rejects_unstable() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(solve_lyapunov(&a), Err(LtiError::NotHurwitz(_))));
        let a = DMatrix::from_element(1, 1, 0.5);
        assert!(matches!(solve_lyapunov(&a), Err(LtiError::NotHurwitz(_))));
    }
}
