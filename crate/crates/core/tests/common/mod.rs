#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, Matrix2, Vector2};
use shaketab::structure::TwoDofFrame;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("data")
}

pub fn record_path() -> PathBuf {
    data_dir().join("RSN9001_SYNTHETIC_090.AT2")
}

/// Two-story frame with modes near 2 Hz and 5.3 Hz and 2% modal damping.
pub fn test_frame() -> TwoDofFrame {
    TwoDofFrame::with_modal_damping(100.0, 100.0, 4.1e4, 4.1e4, 0.02, 0.02).unwrap()
}

/// Double-double number `hi + lo`.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

impl Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let v = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(v.hi, v.lo + t.lo)
    }
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }
    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::from(q2)));
        let q3 = r.hi / o.hi;
        quick_two_sum(q1, q2).add(Dd::from(q3))
    }
    fn abs(self) -> f64 {
        self.hi.abs()
    }
}

/// Independent solution of `AᵀP + PA = −I`: the vectorised system is
/// assembled entry by entry and solved by Gaussian elimination with partial
/// pivoting in double-double arithmetic.
pub fn lyapunov_oracle(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let m = n * n;
    let idx = |i: usize, j: usize| i + j * n;
    let mut mat = vec![vec![Dd::from(0.0); m + 1]; m];
    for i in 0..n {
        for j in 0..n {
            let row = idx(i, j);
            for k in 0..n {
                // (AᵀP)_ij = Σ_k A_ki P_kj, (PA)_ij = Σ_k P_ik A_kj
                let c1 = &mut mat[row][idx(k, j)];
                *c1 = c1.add(Dd::from(a[(k, i)]));
                let c2 = &mut mat[row][idx(i, k)];
                *c2 = c2.add(Dd::from(a[(k, j)]));
            }
            mat[row][m] = Dd::from(if i == j { -1.0 } else { 0.0 });
        }
    }
    for col in 0..m {
        let pivot = (col..m).max_by(|&x, &y| mat[x][col].abs().total_cmp(&mat[y][col].abs())).unwrap();
        mat.swap(col, pivot);
        let pivot_row = mat[col].clone();
        for row in mat.iter_mut().skip(col + 1) {
            let f = row[col].div(pivot_row[col]);
            if f.hi == 0.0 {
                continue;
            }
            for (dst, src) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *dst = dst.sub(src.mul(f));
            }
        }
    }
    let mut x = vec![Dd::from(0.0); m];
    for row in (0..m).rev() {
        let mut acc = mat[row][m];
        for c in (row + 1)..m {
            acc = acc.sub(mat[row][c].mul(x[c]));
        }
        x[row] = acc.div(mat[row][row]);
    }
    DMatrix::from_fn(n, n, |i, j| x[idx(i, j)].hi)
}

/// Relative floor displacements from classical RK4 on the first-order form
/// of `M ẍ + C ẋ + K x = −M ι a_g`, with the base acceleration interpolated
/// linearly at the half step.
pub fn rk4_frame_response(frame: &TwoDofFrame, base_accel: &[f64], dt: f64) -> Vec<[f64; 2]> {
    let m_inv = frame.mass().try_inverse().unwrap();
    let c: Matrix2<f64> = frame.damping_matrix();
    let k: Matrix2<f64> = frame.stiffness();
    let rhs = |x: &Vector2<f64>, v: &Vector2<f64>, ag: f64| -> (Vector2<f64>, Vector2<f64>) {
        (*v, m_inv * (-(c * v) - k * x) - Vector2::repeat(ag))
    };
    let mut x = Vector2::zeros();
    let mut v = Vector2::zeros();
    let mut out = Vec::with_capacity(base_accel.len());
    out.push([0.0, 0.0]);
    for w in base_accel.windows(2) {
        let (a0, a1) = (w[0], w[1]);
        let am = 0.5 * (a0 + a1);
        let (k1x, k1v) = rhs(&x, &v, a0);
        let (k2x, k2v) = rhs(&(x + k1x * (dt / 2.0)), &(v + k1v * (dt / 2.0)), am);
        let (k3x, k3v) = rhs(&(x + k2x * (dt / 2.0)), &(v + k2v * (dt / 2.0)), am);
        let (k4x, k4v) = rhs(&(x + k3x * dt), &(v + k3v * dt), a1);
        x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (dt / 6.0);
        v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (dt / 6.0);
        out.push([x[0], x[1]]);
    }
    out
}
