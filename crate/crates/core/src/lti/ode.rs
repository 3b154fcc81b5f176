use std::ops::{Add, Mul};

/// One classical fourth-order Runge-Kutta step of `ẋ = f(t, x)`.
pub fn rk4_step<V, F>(mut f: F, t: f64, x: &V, dt: f64) -> V
where
    V: Clone + Add<V, Output = V> + Mul<f64, Output = V>,
    F: FnMut(f64, &V) -> V,
{
    let half = 0.5 * dt;
    let k1 = f(t, x);
    let k2 = f(t + half, &(x.clone() + k1.clone() * half));
    let k3 = f(t + half, &(x.clone() + k2.clone() * half));
    let k4 = f(t + dt, &(x.clone() + k3.clone() * dt));
    x.clone() + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}
