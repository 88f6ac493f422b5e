//! Totally geodesic totally real surfaces.
//!
//! A chart carries a complex frame `F = [f0 | e1 | e2]` with `⟨fᵢ,fⱼ⟩ = εᵢδᵢⱼ`.
//! The surface is `{F y : y ∈ R³, yᵀεy = κ}`, a real projective or real
//! hyperbolic plane of curvature `c/4`, and the section computations run on
//! these real coordinates `y`.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{cscale, AmbientPoint, AmbientTangent, CMat3, SpaceForm, C3};
use crate::error::{GeometryError, Result};

/// Real 3-vector (section coordinates).
pub type RealVec = Vector3<f64>;

const FRAME_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionChart {
    pub space: SpaceForm,
    /// Columns `f0 = origin/√|κ|`, `e1`, `e2`, stored row-major as complex numbers.
    #[serde(with = "frame_serde")]
    pub frame: CMat3,
}

mod frame_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &CMat3, s: S) -> std::result::Result<S::Ok, S::Error> {
        let cols: [[f64; 6]; 3] = [0, 1, 2].map(|j| crate::serde_c3::to_reals(&m.column(j).into_owned()));
        cols.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMat3, D::Error> {
        let cols = <[[f64; 6]; 3]>::deserialize(d)?;
        let c: Vec<C3> = cols.iter().map(crate::serde_c3::from_reals).collect();
        Ok(CMat3::from_columns(&c))
    }
}

impl SectionChart {
    pub(super) fn new(space: SpaceForm, p: &AmbientPoint, e1: &AmbientTangent, e2: &AmbientTangent) -> Result<Self> {
        let v1 = space.vec_at(p, e1)?;
        let v2 = space.vec_at(p, e2)?;
        for v in [&v1, &v2] {
            let h = space.herm(v, &p.rep).norm() / space.kappa().abs().sqrt();
            if h > FRAME_TOL {
                return Err(GeometryError::NotHorizontal(h));
            }
        }
        let h12 = space.herm(&v1, &v2);
        let ortho = (space.g(&v1, &v1) - 1.0).abs().max((space.g(&v2, &v2) - 1.0).abs()).max(h12.re.abs());
        if ortho > FRAME_TOL {
            return Err(GeometryError::NotOrthonormal(ortho));
        }
        // Re⟨J e1, e2⟩ = −Im⟨e1, e2⟩
        if h12.im.abs() > FRAME_TOL {
            return Err(GeometryError::NotTotallyReal(h12.im.abs()));
        }
        let f0 = p.rep * Complex64::from(1.0 / space.kappa().abs().sqrt());
        Ok(SectionChart { space, frame: CMat3::from_columns(&[f0, v1, v2]) })
    }

    pub(super) fn real_slice(space: SpaceForm) -> Self {
        SectionChart { space, frame: CMat3::identity() }
    }

    /// Same surface with a frame moved by the isometry `m`.
    pub fn transformed(&self, m: &CMat3) -> Self {
        SectionChart { space: self.space, frame: m * self.frame }
    }

    pub fn signature(&self) -> [f64; 3] {
        self.space.signature()
    }

    /// Real bilinear form `yᵀεw` (the intrinsic metric on tangent vectors).
    pub fn dot(&self, y: &RealVec, w: &RealVec) -> f64 {
        let e = self.signature();
        e[0] * y[0] * w[0] + e[1] * y[1] * w[1] + e[2] * y[2] * w[2]
    }

    /// Chart origin `y0 = (R, 0, 0)`.
    pub fn y0(&self) -> RealVec {
        RealVec::new(self.space.radius(), 0.0, 0.0)
    }

    pub fn origin(&self) -> AmbientPoint {
        self.lift(&self.y0())
    }

    /// Rescales `y` onto `yᵀεy = κ`; `None` outside the model domain.
    pub fn normalize(&self, y: &RealVec) -> Option<RealVec> {
        let q = self.dot(y, y);
        let k = self.space.kappa();
        if !(q * k > 0.0) {
            return None;
        }
        let mut out = y * (k / q).sqrt();
        if !self.space.is_projective() && out[0] < 0.0 {
            out = -out;
        }
        Some(out)
    }

    /// Projects `w` to the tangent space at `y`.
    pub fn tangent_part(&self, y: &RealVec, w: &RealVec) -> RealVec {
        w - y * (self.dot(w, y) / self.space.kappa())
    }

    pub fn unit(&self, w: &RealVec) -> RealVec {
        w / self.dot(w, w).sqrt()
    }

    /// Ambient point `F y`.
    pub fn lift(&self, y: &RealVec) -> AmbientPoint {
        AmbientPoint { rep: self.frame * y.map(Complex64::from) }
    }

    /// Ambient tangent vector `F w` at `F y`.
    pub fn lift_tangent(&self, y: &RealVec, w: &RealVec) -> AmbientTangent {
        AmbientTangent { base: self.lift(y), vec: self.frame * w.map(Complex64::from) }
    }

    /// Section tangent vector of an ambient vector at `F y` (the `TΣ` component).
    pub fn pull_tangent(&self, y: &RealVec, v: &C3) -> RealVec {
        let e = self.signature();
        let mut out = RealVec::zeros();
        for k in 0..3 {
            let col: C3 = self.frame.column(k).into_owned();
            out[k] = e[k] * self.space.herm(v, &col).re;
        }
        self.tangent_part(y, &out)
    }

    /// Rotation by +90° in the oriented tangent plane at `y` (`e1 ↦ e2` at the origin).
    pub fn rot(&self, y: &RealVec, w: &RealVec) -> RealVec {
        let e = self.signature();
        let cr = y.cross(w);
        RealVec::new(e[0] * cr[0], e[1] * cr[1], e[2] * cr[2]) / self.space.kappa().abs().sqrt()
    }

    /// Geodesic of the section from `y` with unit velocity `w`: (point, velocity).
    pub fn geodesic(&self, y: &RealVec, w: &RealVec, t: f64) -> (RealVec, RealVec) {
        let r = self.space.radius();
        let sgn = if self.space.is_projective() { -1.0 } else { 1.0 };
        let (co, si) = (self.space.co(t / r), self.space.si(t / r));
        (y * co + w * (r * si), y * (sgn * si / r) + w * co)
    }

    /// Section coordinates (normal coordinates at the origin) to `y`.
    pub fn coords_to_y(&self, u: [f64; 2]) -> RealVec {
        let rho = (u[0] * u[0] + u[1] * u[1]).sqrt();
        if rho == 0.0 {
            return self.y0();
        }
        let w = RealVec::new(0.0, u[0] / rho, u[1] / rho);
        self.geodesic(&self.y0(), &w, rho).0
    }

    /// Inverse of [`Self::coords_to_y`].
    pub fn y_to_coords(&self, y: &RealVec) -> [f64; 2] {
        let y = match self.normalize(y) {
            Some(v) => v,
            None => return [f64::NAN; 2],
        };
        let r = self.space.radius();
        let mut yy = y;
        if self.space.is_projective() && yy[0] < 0.0 {
            yy = -yy;
        }
        let x = (yy[0] / r).clamp(-1.0, f64::INFINITY);
        let rho = if self.space.is_projective() { r * x.min(1.0).acos() } else { r * x.max(1.0).acosh() };
        let n = (yy[1] * yy[1] + yy[2] * yy[2]).sqrt();
        if n == 0.0 {
            return [0.0, 0.0];
        }
        [rho * yy[1] / n, rho * yy[2] / n]
    }

    pub fn point(&self, u: [f64; 2]) -> AmbientPoint {
        self.lift(&self.coords_to_y(u))
    }

    /// Frame at `y` obtained by radial parallel transport of `(e1, e2)`.
    pub fn frame_at(&self, y: &RealVec) -> [RealVec; 2] {
        let y0 = self.y0();
        let u = self.y_to_coords(y);
        let rho = (u[0] * u[0] + u[1] * u[1]).sqrt();
        let e1 = RealVec::new(0.0, 1.0, 0.0);
        let e2 = RealVec::new(0.0, 0.0, 1.0);
        if rho == 0.0 {
            return [e1, e2];
        }
        let d = RealVec::new(0.0, u[0] / rho, u[1] / rho);
        let (_, d_end) = self.geodesic(&y0, &d, rho);
        let move_vec = |e: &RealVec| {
            let a = self.dot(e, &d);
            e - d * a + d_end * a
        };
        [move_vec(&e1), move_vec(&e2)]
    }

    /// Unit section tangent at `y` making angle `theta` with the transported `e1`.
    pub fn direction(&self, y: &RealVec, theta: f64) -> RealVec {
        let [f1, f2] = self.frame_at(y);
        f1 * theta.cos() + f2 * theta.sin()
    }

    /// Angle of the tangent `w` at `y`; inverse of [`Self::direction`].
    pub fn angle(&self, y: &RealVec, w: &RealVec) -> f64 {
        let [f1, f2] = self.frame_at(y);
        self.dot(w, &f2).atan2(self.dot(w, &f1))
    }

    /// Orthonormality and total-reality defect of the lifted frame at `y`.
    pub fn frame_defect(&self, y: &RealVec) -> (f64, f64) {
        let [f1, f2] = self.frame_at(y);
        let a = self.lift_tangent(y, &f1).vec;
        let b = self.lift_tangent(y, &f2).vec;
        let s = &self.space;
        let ortho = (s.g(&a, &a) - 1.0).abs().max((s.g(&b, &b) - 1.0).abs()).max(s.g(&a, &b).abs());
        let ia = cscale(&a, Complex64::i());
        let real = s.g(&ia, &b).abs().max(s.g(&ia, &a).abs()).max(s.g(&cscale(&b, Complex64::i()), &b).abs());
        (ortho, real)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_slice_is_valid_chart() {
        for c in [4.0, -4.0, 1.3] {
            let sf = SpaceForm::new(c).unwrap();
            let ch = sf.real_section();
            let p = ch.origin();
            let e1 = sf.tangent(&p, C3::new(0.0.into(), 1.0.into(), 0.0.into())).unwrap();
            let e2 = sf.tangent(&p, C3::new(0.0.into(), 0.0.into(), 1.0.into())).unwrap();
            let built = sf.section_chart(&p, &e1, &e2).unwrap();
            assert!((built.frame - CMat3::identity()).norm() < 1e-12);
            let y = ch.coords_to_y([0.3, -0.2]);
            let (o, r) = ch.frame_defect(&y);
            assert!(o < 1e-12 && r < 1e-12);
        }
    }

    #[test]
    fn complex_span_rejected() {
        let sf = SpaceForm::new(4.0).unwrap();
        let p = sf.origin();
        let e1 = sf.tangent(&p, C3::new(0.0.into(), 1.0.into(), 0.0.into())).unwrap();
        let je1 = sf.complex_structure(&e1);
        assert!(matches!(sf.section_chart(&p, &e1, &je1), Err(GeometryError::NotTotallyReal(_))));
        let half = e1.scaled(0.5);
        let e2 = sf.tangent(&p, C3::new(0.0.into(), 0.0.into(), 1.0.into())).unwrap();
        assert!(matches!(sf.section_chart(&p, &half, &e2), Err(GeometryError::NotOrthonormal(_))));
    }

    #[test]
    fn coordinates_round_trip() {
        for c in [4.0, -4.0] {
            let sf = SpaceForm::new(c).unwrap();
            let ch = sf.real_section();
            let u = [0.4, -0.7];
            let back = ch.y_to_coords(&ch.coords_to_y(u));
            assert!((back[0] - u[0]).abs() < 1e-12 && (back[1] - u[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn chart_points_match_exp_map() {
        for c in [4.0, -4.0] {
            let sf = SpaceForm::new(c).unwrap();
            let ch = sf.real_section();
            let p = ch.origin();
            let v = sf.tangent(&p, C3::new(0.0.into(), 0.3.into(), 0.4.into())).unwrap();
            let q = sf.exp_map(&p, &v, 1.0);
            let y = ch.coords_to_y([0.3, 0.4]);
            assert!((ch.lift(&y).rep - q.rep).norm() < 1e-12);
        }
    }

    #[test]
    fn rotation_is_orthonormal() {
        let sf = SpaceForm::new(-4.0).unwrap();
        let ch = sf.real_section();
        let y = ch.coords_to_y([0.5, 0.2]);
        let w = ch.direction(&y, 0.7);
        let r = ch.rot(&y, &w);
        assert!((ch.dot(&r, &r) - 1.0).abs() < 1e-12);
        assert!(ch.dot(&r, &w).abs() < 1e-12);
        assert!(ch.dot(&r, &y).abs() < 1e-12);
        let y0 = ch.y0();
        let r0 = ch.rot(&y0, &RealVec::new(0.0, 1.0, 0.0));
        assert!((r0 - RealVec::new(0.0, 0.0, 1.0)).norm() < 1e-12);
    }
}
