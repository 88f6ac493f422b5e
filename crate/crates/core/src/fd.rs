//! Finite-difference stencils and coordinate curvature of a metric given as a
//! function of parameters.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, Vector3};
use num_complex::Complex64;

/// Fourth-order central first-derivative stencil: (offset, weight).
pub const D1: [(f64, f64); 4] = [
    (-2.0, 1.0 / 12.0),
    (-1.0, -8.0 / 12.0),
    (1.0, 8.0 / 12.0),
    (2.0, -1.0 / 12.0),
];

/// Fourth-order central second-derivative stencil.
pub const D2: [(f64, f64); 5] = [
    (-2.0, -1.0 / 12.0),
    (-1.0, 16.0 / 12.0),
    (0.0, -30.0 / 12.0),
    (1.0, 16.0 / 12.0),
    (2.0, -1.0 / 12.0),
];

/// Values that can be linearly combined by a stencil.
pub trait Linear: Sized {
    fn zero_like(&self) -> Self;
    fn add_scaled(&mut self, other: &Self, k: f64);
}

impl Linear for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add_scaled(&mut self, other: &Self, k: f64) {
        *self += k * other;
    }
}

macro_rules! impl_linear_real {
    ($t:ty) => {
        impl Linear for $t {
            fn zero_like(&self) -> Self {
                self * 0.0
            }
            fn add_scaled(&mut self, other: &Self, k: f64) {
                *self += other * k;
            }
        }
    };
}

impl_linear_real!(Vector3<f64>);
impl_linear_real!(Matrix2<f64>);
impl_linear_real!(Matrix3<f64>);
impl_linear_real!(DVector<f64>);
impl_linear_real!(DMatrix<f64>);

impl Linear for Vector3<Complex64> {
    fn zero_like(&self) -> Self {
        Vector3::zeros()
    }
    fn add_scaled(&mut self, other: &Self, k: f64) {
        *self += other.map(|z| z * k);
    }
}

impl<T: Linear> Linear for Vec<T> {
    fn zero_like(&self) -> Self {
        self.iter().map(Linear::zero_like).collect()
    }
    fn add_scaled(&mut self, other: &Self, k: f64) {
        for (a, b) in self.iter_mut().zip(other) {
            a.add_scaled(b, k);
        }
    }
}

/// Fourth-order first derivative of `f` at 0.
pub fn d1<T: Linear>(f: impl Fn(f64) -> T, h: f64) -> T {
    let samples: Vec<T> = D1.iter().map(|(o, _)| f(o * h)).collect();
    let mut acc = samples[0].zero_like();
    for ((_, w), s) in D1.iter().zip(&samples) {
        acc.add_scaled(s, w / h);
    }
    acc
}

/// Fourth-order second derivative of `f` at 0.
pub fn d2<T: Linear>(f: impl Fn(f64) -> T, h: f64) -> T {
    let samples: Vec<T> = D2.iter().map(|(o, _)| f(o * h)).collect();
    let mut acc = samples[0].zero_like();
    for ((_, w), s) in D2.iter().zip(&samples) {
        acc.add_scaled(s, w / (h * h));
    }
    acc
}

/// Second-order central first derivative.
pub fn central<T: Linear>(f: impl Fn(f64) -> T, h: f64) -> T {
    let mut acc = f(h);
    acc.add_scaled(&f(-h), -1.0);
    let mut out = acc.zero_like();
    out.add_scaled(&acc, 0.5 / h);
    out
}

/// Partial derivatives of `f` along every coordinate axis at `x`.
pub fn gradient<T: Linear>(f: &dyn Fn(&[f64]) -> T, x: &[f64], h: f64) -> Vec<T> {
    (0..x.len())
        .map(|i| {
            d1(
                |e| {
                    let mut y = x.to_vec();
                    y[i] += e;
                    f(&y)
                },
                h,
            )
        })
        .collect()
}

/// Christoffel symbols `gamma[m][(j, k)]` of a coordinate metric.
pub fn christoffel(metric: &dyn Fn(&[f64]) -> DMatrix<f64>, x: &[f64], h: f64) -> Vec<DMatrix<f64>> {
    let n = x.len();
    let g = metric(x);
    let ginv = g.clone().try_inverse().unwrap_or_else(|| DMatrix::zeros(n, n));
    let dg = gradient(metric, x, h);
    // first kind: Γ_{l j k} = ½(∂_j g_lk + ∂_k g_lj − ∂_l g_jk)
    let mut out = vec![DMatrix::zeros(n, n); n];
    for j in 0..n {
        for k in 0..n {
            for m in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    let first = 0.5 * (dg[j][(l, k)] + dg[k][(l, j)] - dg[l][(j, k)]);
                    s += ginv[(m, l)] * first;
                }
                out[m][(j, k)] = s;
            }
        }
    }
    out
}

/// Fully covariant Riemann tensor `R[i][j][k][l] = <R(∂i,∂j)∂k, ∂l>` with the
/// convention `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z`.
pub fn riemann(metric: &dyn Fn(&[f64]) -> DMatrix<f64>, x: &[f64], h: f64) -> Vec<f64> {
    let n = x.len();
    let g = metric(x);
    let gamma = christoffel(metric, x, h);
    let gamma_fn = |y: &[f64]| -> Vec<DMatrix<f64>> { christoffel(metric, y, h) };
    let dgamma = gradient(&gamma_fn, x, h);
    let mut r = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                // R(∂i,∂j)∂k = (∂iΓ^m_jk − ∂jΓ^m_ik + Γ^p_jk Γ^m_ip − Γ^p_ik Γ^m_jp) ∂m
                let mut up = vec![0.0; n];
                for (m, slot) in up.iter_mut().enumerate() {
                    let mut s = dgamma[i][m][(j, k)] - dgamma[j][m][(i, k)];
                    for p in 0..n {
                        s += gamma[p][(j, k)] * gamma[m][(i, p)] - gamma[p][(i, k)] * gamma[m][(j, p)];
                    }
                    *slot = s;
                }
                for l in 0..n {
                    let low: f64 = (0..n).map(|m| up[m] * g[(m, l)]).sum();
                    r[((i * n + j) * n + k) * n + l] = low;
                }
            }
        }
    }
    r
}

/// Evaluates a covariant 4-tensor stored as by [`riemann`] on coordinate vectors.
pub fn eval4(r: &[f64], n: usize, a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    s += r[((i * n + j) * n + k) * n + l] * a[i] * b[j] * c[k] * d[l];
                }
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_are_fourth_order() {
        let f = |x: f64| (1.3 * x).sin() + x.powi(3);
        let e1 = (d1(|e| f(0.4 + e), 1e-2) - (1.3 * (1.3f64 * 0.4).cos() + 3.0 * 0.16)).abs();
        let e2 = (d2(|e| f(0.4 + e), 1e-2) - (-1.69 * (1.3f64 * 0.4).sin() + 6.0 * 0.4)).abs();
        assert!(e1 < 5e-9, "{e1}");
        assert!(e2 < 1e-8, "{e2}");
    }

    #[test]
    fn round_sphere_has_unit_curvature() {
        // polar chart (θ, φ) of the unit sphere
        let metric = |x: &[f64]| DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, x[0].sin().powi(2)]);
        let r = riemann(&metric, &[0.9, 0.3], 1e-2);
        let e1 = [1.0, 0.0];
        let e2 = [0.0, 1.0 / 0.9f64.sin()];
        let k = eval4(&r, 2, &e1, &e2, &e2, &e1);
        assert!((k - 1.0).abs() < 1e-7, "{k}");
    }

    #[test]
    fn hyperbolic_plane_has_negative_curvature() {
        // upper half plane scaled to curvature −1/4: g = 4 (dx² + dy²) / y²
        let metric = |x: &[f64]| {
            let s = 4.0 / (x[1] * x[1]);
            DMatrix::from_row_slice(2, 2, &[s, 0.0, 0.0, s])
        };
        let x = [0.2, 1.5];
        let r = riemann(&metric, &x, 1e-2);
        let norm = 1.5 / 2.0;
        let k = eval4(&r, 2, &[norm, 0.0], &[0.0, norm], &[0.0, norm], &[norm, 0.0]);
        assert!((k + 0.25).abs() < 1e-7, "{k}");
    }
}
