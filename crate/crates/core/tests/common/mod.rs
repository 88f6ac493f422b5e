//! Closed-form oracles written against raw coordinates, independent of the
//! library's own geometry code.

#![allow(dead_code)]

use hopflab::ambient::RealVec;
use hopflab::C3;
use num_complex::Complex64;

/// Signature of the hermitian form for curvature `c`.
pub fn eps(c: f64) -> [f64; 3] {
    if c > 0.0 {
        [1.0, 1.0, 1.0]
    } else {
        [-1.0, 1.0, 1.0]
    }
}

pub fn herm(c: f64, z: &C3, w: &C3) -> Complex64 {
    let e = eps(c);
    (0..3).map(|k| z[k] * w[k].conj() * e[k]).sum()
}

/// Distance in `CP²(c)` / `CH²(c)` from the cross ratio of two representatives.
pub fn distance(c: f64, z: &C3, w: &C3) -> f64 {
    let r = 2.0 / c.abs().sqrt();
    let x = herm(c, z, w).norm() / (herm(c, z, z).re * herm(c, w, w).re).abs().sqrt();
    if c > 0.0 {
        r * x.min(1.0).acos()
    } else {
        r * x.max(1.0).acosh()
    }
}

/// Geodesic of the totally geodesic real slice through `y0` with unit velocity `v0`,
/// in the coordinates where `yᵀεy = 4/c` (a sphere or hyperboloid of radius `2/√|c|`).
pub fn slice_geodesic(c: f64, y0: &RealVec, v0: &RealVec, t: f64) -> RealVec {
    let r = 2.0 / c.abs().sqrt();
    let s = t / r;
    if c > 0.0 {
        y0 * s.cos() + v0 * (r * s.sin())
    } else {
        y0 * s.cosh() + v0 * (r * s.sinh())
    }
}

/// Principal curvatures of the distance sphere of radius `r` (outward-pointing
/// radial field, Jacobi-field formula): `(Hopf, other, other)`.
pub fn sphere_spectrum(c: f64, r: f64) -> [f64; 3] {
    let k = c.abs().sqrt();
    if c > 0.0 {
        [k / (k * r).tan(), k / (2.0 * (k * r / 2.0).tan()), k / (2.0 * (k * r / 2.0).tan())]
    } else {
        [k / (k * r).tanh(), k / (2.0 * (k * r / 2.0).tanh()), k / (2.0 * (k * r / 2.0).tanh())]
    }
}

/// Ascending copy.
pub fn sorted(mut v: [f64; 3]) -> [f64; 3] {
    v.sort_by(f64::total_cmp);
    v
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
