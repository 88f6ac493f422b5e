//! The nonflat complex space forms `CP²(c)` and `CH²(c)` in homogeneous
//! coordinates.
//!
//! A point is a vector `z ∈ C³` with `⟨z,z⟩ = κ = 4/c`, taken up to a unit
//! phase, where `⟨z,w⟩ = Σ εᵢ zᵢ conj(wᵢ)` with signature `(+,+,+)` for
//! `c > 0` and `(−,+,+)` for `c < 0`. Tangent vectors at `z` are horizontal
//! vectors (`⟨v,z⟩ = 0`); the metric is `g(v,w) = μ·Re⟨v,w⟩` with `μ = 1` and
//! the complex structure is multiplication by `i`.

mod section;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::fd;

pub use section::{RealVec, SectionChart};

/// Complex 3-vector.
pub type C3 = Vector3<Complex64>;
/// Complex 3×3 matrix.
pub type CMat3 = Matrix3<Complex64>;

/// Metric scale `μ` in `g = μ·Re⟨·,·⟩`.
pub const METRIC_SCALE: f64 = 1.0;
/// Tolerance on `|⟨z,z⟩ − κ|` and on horizontality, relative to `|κ|`.
pub const NORMALIZATION_TOL: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    ProjectivePlane,
    HyperbolicPlane,
}

/// `CP²(c)` or `CH²(c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceFormRepr", into = "SpaceFormRepr")]
pub struct SpaceForm {
    c: f64,
    kind: SpaceKind,
}

#[derive(Serialize, Deserialize)]
struct SpaceFormRepr {
    c: f64,
}

impl TryFrom<SpaceFormRepr> for SpaceForm {
    type Error = GeometryError;
    fn try_from(r: SpaceFormRepr) -> Result<Self> {
        SpaceForm::new(r.c)
    }
}

impl From<SpaceForm> for SpaceFormRepr {
    fn from(s: SpaceForm) -> Self {
        SpaceFormRepr { c: s.c }
    }
}

/// Point of the space form, stored through a normalized representative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbientPoint {
    #[serde(with = "crate::serde_c3")]
    pub rep: C3,
}

/// Horizontal tangent vector at `base`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbientTangent {
    pub base: AmbientPoint,
    #[serde(with = "crate::serde_c3")]
    pub vec: C3,
}

impl AmbientTangent {
    pub fn scaled(&self, k: f64) -> Self {
        AmbientTangent { base: self.base, vec: self.vec * Complex64::from(k) }
    }

    /// Sum of two vectors sharing the same representative.
    pub fn plus(&self, other: &Self) -> Self {
        AmbientTangent { base: self.base, vec: self.vec + other.vec }
    }
}

/// Hermitian form with the given signature.
pub fn herm_sig(eps: &[f64; 3], z: &C3, w: &C3) -> Complex64 {
    (0..3).map(|i| z[i] * w[i].conj() * eps[i]).sum()
}

/// `z ↦ λz` for a complex scalar.
pub fn cscale(z: &C3, k: Complex64) -> C3 {
    z.map(|x| x * k)
}

impl SpaceForm {
    pub fn new(c: f64) -> Result<Self> {
        if !c.is_finite() || c == 0.0 {
            return Err(GeometryError::InvalidCurvature(c));
        }
        let kind = if c > 0.0 { SpaceKind::ProjectivePlane } else { SpaceKind::HyperbolicPlane };
        Ok(SpaceForm { c, kind })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn is_projective(&self) -> bool {
        self.kind == SpaceKind::ProjectivePlane
    }

    /// Sign pattern of the Hermitian form.
    pub fn signature(&self) -> [f64; 3] {
        match self.kind {
            SpaceKind::ProjectivePlane => [1.0, 1.0, 1.0],
            SpaceKind::HyperbolicPlane => [-1.0, 1.0, 1.0],
        }
    }

    /// Hermitian form matrix `H = diag(ε)`.
    pub fn hermitian_matrix(&self) -> CMat3 {
        let e = self.signature();
        CMat3::from_diagonal(&Vector3::new(e[0].into(), e[1].into(), e[2].into()))
    }

    /// `κ = 4/c`.
    pub fn kappa(&self) -> f64 {
        4.0 / self.c
    }

    /// `R = 2/√|c|`, the curvature radius of the geodesic formulas.
    pub fn radius(&self) -> f64 {
        2.0 / self.c.abs().sqrt()
    }

    pub fn herm(&self, z: &C3, w: &C3) -> Complex64 {
        herm_sig(&self.signature(), z, w)
    }

    /// `cos` or `cosh` of `x`.
    pub fn co(&self, x: f64) -> f64 {
        if self.is_projective() {
            x.cos()
        } else {
            x.cosh()
        }
    }

    /// `sin` or `sinh` of `x`.
    pub fn si(&self, x: f64) -> f64 {
        if self.is_projective() {
            x.sin()
        } else {
            x.sinh()
        }
    }

    /// Rescales `z` onto `⟨z,z⟩ = κ`.
    pub fn point(&self, z: C3) -> Result<AmbientPoint> {
        let q = self.herm(&z, &z).re;
        if !(q.is_finite()) || q * self.kappa() <= 0.0 || q.abs() < 1e-300 {
            return Err(GeometryError::Normalization(q));
        }
        let s = (self.kappa() / q).sqrt();
        Ok(AmbientPoint { rep: z * Complex64::from(s) })
    }

    /// Normalization defect `|⟨z,z⟩ − κ| / |κ|`.
    pub fn normalization_defect(&self, p: &AmbientPoint) -> f64 {
        (self.herm(&p.rep, &p.rep).re - self.kappa()).abs() / self.kappa().abs()
    }

    /// Projection onto the horizontal space at `z`.
    pub fn horizontal(&self, z: &C3, v: &C3) -> C3 {
        v - cscale(z, self.herm(v, z) / self.kappa())
    }

    /// Checked tangent vector.
    pub fn tangent(&self, p: &AmbientPoint, vec: C3) -> Result<AmbientTangent> {
        let d = self.herm(&vec, &p.rep).norm() / self.kappa().abs().sqrt();
        let scale = 1.0 + vec.norm();
        if d > NORMALIZATION_TOL * scale {
            return Err(GeometryError::NotHorizontal(d));
        }
        Ok(AmbientTangent { base: *p, vec })
    }

    /// Tangent vector obtained by projecting `vec` to the horizontal space.
    pub fn project(&self, p: &AmbientPoint, vec: &C3) -> AmbientTangent {
        AmbientTangent { base: *p, vec: self.horizontal(&p.rep, vec) }
    }

    /// Unit phase `λ` with `q ≈ λ p` when both represent the same point.
    pub fn phase_between(&self, p: &AmbientPoint, q: &AmbientPoint) -> Option<Complex64> {
        let h = self.herm(&q.rep, &p.rep) / self.kappa();
        let n = h.norm();
        if (n - 1.0).abs() > 1e-8 {
            return None;
        }
        let lam = h / n;
        let diff = (q.rep - cscale(&p.rep, lam)).norm() / (1.0 + p.rep.norm());
        (diff < 1e-7).then_some(lam)
    }

    /// Unit phase `λ` making `⟨λz, z0⟩/κ` real and positive (1 when undefined).
    pub fn align_phase(&self, z: &C3, z0: &C3) -> Complex64 {
        let h = self.herm(z, z0) / self.kappa();
        if h.norm() > 0.0 {
            h.conj() / h.norm()
        } else {
            Complex64::from(1.0)
        }
    }

    pub fn same_point(&self, p: &AmbientPoint, q: &AmbientPoint) -> bool {
        self.phase_between(p, q).is_some()
    }

    /// Representative of `v` relative to the representative of `p`.
    pub fn vec_at(&self, p: &AmbientPoint, v: &AmbientTangent) -> Result<C3> {
        if v.base.rep == p.rep {
            return Ok(v.vec);
        }
        let lam = self.phase_between(p, &v.base).ok_or(GeometryError::BaseMismatch)?;
        Ok(cscale(&v.vec, lam.conj()))
    }

    /// `g(v,w)`.
    pub fn metric(&self, v: &AmbientTangent, w: &AmbientTangent) -> Result<f64> {
        let wv = self.vec_at(&v.base, w)?;
        Ok(self.g(&v.vec, &wv))
    }

    /// Unchecked metric on horizontal vectors at a common representative.
    pub fn g(&self, v: &C3, w: &C3) -> f64 {
        METRIC_SCALE * self.herm(v, w).re
    }

    /// Horizontal norm.
    pub fn norm(&self, v: &C3) -> f64 {
        self.g(v, v).max(0.0).sqrt()
    }

    /// `J v`.
    pub fn complex_structure(&self, v: &AmbientTangent) -> AmbientTangent {
        AmbientTangent { base: v.base, vec: cscale(&v.vec, I) }
    }

    /// `⟨R̄(X,Y)Z,W⟩` on horizontal vectors at a common representative.
    pub fn curvature_form(&self, x: &C3, y: &C3, z: &C3, w: &C3) -> f64 {
        let g = |a: &C3, b: &C3| self.g(a, b);
        let j = |a: &C3| cscale(a, I);
        let (jx, jy, jz) = (j(x), j(y), j(z));
        self.c / 4.0
            * (g(y, z) * g(x, w) - g(x, z) * g(y, w) + g(&jy, z) * g(&jx, w) - g(&jx, z) * g(&jy, w)
                - 2.0 * g(&jx, y) * g(&jz, w))
    }

    /// Orthonormal real basis `(u, iu, w, iw)` of the horizontal space at `p`.
    pub fn horizontal_basis(&self, p: &AmbientPoint) -> [C3; 4] {
        let z = &p.rep;
        let mut cands: Vec<C3> = (0..3)
            .map(|k| {
                let mut e = C3::zeros();
                e[k] = Complex64::from(1.0);
                self.horizontal(z, &e)
            })
            .collect();
        cands.sort_by(|a, b| self.norm(b).total_cmp(&self.norm(a)));
        let u = cscale(&cands[0], (1.0 / self.norm(&cands[0])).into());
        let mut best = C3::zeros();
        for c in &cands[1..] {
            let w = c - cscale(&u, self.herm(c, &u));
            if self.norm(&w) > self.norm(&best) {
                best = w;
            }
        }
        let w = cscale(&best, (1.0 / self.norm(&best)).into());
        [u, cscale(&u, I), w, cscale(&w, I)]
    }

    /// `R̄(x,y)z`, reconstructed from its components in an orthonormal basis.
    pub fn curvature_tensor(
        &self,
        x: &AmbientTangent,
        y: &AmbientTangent,
        z: &AmbientTangent,
    ) -> Result<AmbientTangent> {
        let p = x.base;
        let (xv, yv, zv) = (x.vec, self.vec_at(&p, y)?, self.vec_at(&p, z)?);
        let basis = self.horizontal_basis(&p);
        let mut out = C3::zeros();
        for b in &basis {
            out += b * Complex64::from(self.curvature_form(&xv, &yv, &zv, b) / METRIC_SCALE);
        }
        Ok(AmbientTangent { base: p, vec: out })
    }

    /// `exp_p(t v)`.
    pub fn exp_map(&self, p: &AmbientPoint, v: &AmbientTangent, t: f64) -> AmbientPoint {
        let vv = self.vec_at(p, v).unwrap_or(v.vec);
        self.exp_vec(p, &vv, t)
    }

    /// `exp_p(t v)` for a horizontal representative `v` at `p.rep`.
    pub fn exp_vec(&self, p: &AmbientPoint, v: &C3, t: f64) -> AmbientPoint {
        let n = self.norm(v);
        if n * t.abs() == 0.0 {
            return *p;
        }
        let r = self.radius();
        let l = n * t / r;
        let rep = cscale(&p.rep, self.co(l).into()) + cscale(v, (r * self.si(l) / n).into());
        AmbientPoint { rep }
    }

    /// Velocity of `t ↦ exp_p(t v)` on the representative returned by [`Self::exp_vec`].
    pub fn geodesic_velocity(&self, p: &AmbientPoint, v: &C3, t: f64) -> AmbientTangent {
        let n = self.norm(v);
        let base = self.exp_vec(p, v, t);
        if n == 0.0 {
            return AmbientTangent { base, vec: C3::zeros() };
        }
        let r = self.radius();
        let l = n * t / r;
        let sgn = if self.is_projective() { -1.0 } else { 1.0 };
        let vec = cscale(&p.rep, (sgn * n * self.si(l) / r).into()) + cscale(v, self.co(l).into());
        AmbientTangent { base, vec }
    }

    /// Riemannian distance.
    pub fn distance(&self, p: &AmbientPoint, q: &AmbientPoint) -> f64 {
        let x = self.herm(&p.rep, &q.rep).norm() / self.kappa().abs();
        let r = self.radius();
        if self.is_projective() {
            r * x.min(1.0).acos()
        } else {
            r * x.max(1.0).acosh()
        }
    }

    /// Initial velocity of the minimizing geodesic from `p` reaching `q` at time 1.
    pub fn log_map(&self, p: &AmbientPoint, q: &AmbientPoint) -> AmbientTangent {
        let h = self.herm(&q.rep, &p.rep) / self.kappa();
        let d = self.distance(p, q);
        if h.norm() == 0.0 || d < 1e-300 {
            return AmbientTangent { base: *p, vec: C3::zeros() };
        }
        let qa = cscale(&q.rep, h.conj() / h.norm());
        let r = self.radius();
        let u = (qa - cscale(&p.rep, self.co(d / r).into())) * Complex64::from(1.0 / (r * self.si(d / r)));
        let u = self.horizontal(&p.rep, &u);
        let u = cscale(&u, (1.0 / self.norm(&u)).into());
        AmbientTangent { base: *p, vec: cscale(&u, d.into()) }
    }

    /// Parallel transport of `w` along `s ↦ exp_p(s v)` from `s = 0` to `s = t`.
    pub fn parallel_transport(
        &self,
        p: &AmbientPoint,
        v: &AmbientTangent,
        w: &AmbientTangent,
        t: f64,
    ) -> Result<AmbientTangent> {
        let vv = self.vec_at(p, v)?;
        let wv = self.vec_at(p, w)?;
        let n = self.norm(&vv);
        if n == 0.0 {
            return Ok(AmbientTangent { base: *p, vec: wv });
        }
        let u = cscale(&vv, (1.0 / n).into());
        let iu = cscale(&u, I);
        let a = self.g(&wv, &u);
        let b = self.g(&wv, &iu);
        let perp = wv - cscale(&u, a.into()) - cscale(&iu, b.into());
        let vel = self.geodesic_velocity(p, &u, n * t);
        let vec = cscale(&vel.vec, Complex64::new(a, b)) + perp;
        Ok(AmbientTangent { base: vel.base, vec })
    }

    /// Covariant derivative `∇̄_{ċ} W` at `t0` by central differences.
    ///
    /// Samples are phase-aligned to the representative at `t0`, which removes
    /// the vertical part of the curve velocity, so the derivative reduces to the
    /// horizontal projection of the difference quotient.
    pub fn covariant_derivative(
        &self,
        curve: &dyn Fn(f64) -> AmbientPoint,
        field: &dyn Fn(f64) -> AmbientTangent,
        t0: f64,
        step: f64,
    ) -> AmbientTangent {
        let p0 = curve(t0);
        let aligned = |t: f64| -> C3 {
            let f = field(t0 + t);
            let z = self.point(f.base.rep).map(|p| p.rep).unwrap_or(f.base.rep);
            cscale(&f.vec, self.align_phase(&z, &p0.rep))
        };
        let d = fd::central(aligned, step);
        // field at t0 may carry a different phase than the curve
        self.project(&p0, &d)
    }

    /// Isometry `z ↦ M z`.
    pub fn apply(&self, m: &CMat3, p: &AmbientPoint) -> AmbientPoint {
        AmbientPoint { rep: m * p.rep }
    }

    /// Whether `m` preserves the Hermitian form.
    pub fn isometry_defect(&self, m: &CMat3) -> f64 {
        let h = self.hermitian_matrix();
        (m.adjoint() * h * m - h).norm()
    }

    /// Builds a section chart through `p` with tangent frame `(e1, e2)`.
    pub fn section_chart(&self, p: &AmbientPoint, e1: &AmbientTangent, e2: &AmbientTangent) -> Result<SectionChart> {
        SectionChart::new(*self, p, e1, e2)
    }

    /// Chart of the real slice `{[x] : x ∈ R³}` through `[1:0:0]`.
    pub fn real_section(&self) -> SectionChart {
        SectionChart::real_slice(*self)
    }

    /// Base point `[1:0:0]`.
    pub fn origin(&self) -> AmbientPoint {
        let r = self.radius();
        AmbientPoint { rep: C3::new(r.into(), 0.0.into(), 0.0.into()) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_c3(rng: &mut ChaCha8Rng, s: f64) -> C3 {
        C3::from_fn(|_, _| Complex64::new(rng.random_range(-s..s), rng.random_range(-s..s)))
    }

    fn random_point(sf: &SpaceForm, rng: &mut ChaCha8Rng) -> AmbientPoint {
        let mut z = random_c3(rng, 0.5);
        z[0] += if sf.is_projective() { 0.3 } else { 1.5 };
        sf.point(z).unwrap()
    }

    fn random_tangent(sf: &SpaceForm, p: &AmbientPoint, rng: &mut ChaCha8Rng) -> AmbientTangent {
        sf.project(p, &random_c3(rng, 1.0))
    }

    fn forms() -> [SpaceForm; 2] {
        [SpaceForm::new(4.0).unwrap(), SpaceForm::new(-4.0).unwrap()]
    }

    #[test]
    fn rejects_zero_curvature() {
        assert!(SpaceForm::new(0.0).is_err());
        assert!(SpaceForm::new(f64::NAN).is_err());
    }

    #[test]
    fn metric_symmetric_and_j_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for sf in forms() {
            for _ in 0..20 {
                let p = random_point(&sf, &mut rng);
                let v = random_tangent(&sf, &p, &mut rng);
                let w = random_tangent(&sf, &p, &mut rng);
                let jv = sf.complex_structure(&v);
                assert!((sf.metric(&v, &w).unwrap() - sf.metric(&w, &v).unwrap()).abs() < 1e-12);
                assert!(sf.metric(&v, &jv).unwrap().abs() < 1e-12);
                assert!(sf.metric(&v, &v).unwrap() > 0.0);
                let jjv = sf.complex_structure(&jv);
                assert!((jjv.vec + v.vec).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn base_mismatch_detected_and_phase_tolerated() {
        let sf = SpaceForm::new(4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = random_point(&sf, &mut rng);
        let q = random_point(&sf, &mut rng);
        let v = random_tangent(&sf, &p, &mut rng);
        let w = random_tangent(&sf, &q, &mut rng);
        assert_eq!(sf.metric(&v, &w), Err(GeometryError::BaseMismatch));
        let lam = Complex64::from_polar(1.0, 0.7);
        let p2 = AmbientPoint { rep: cscale(&p.rep, lam) };
        let v2 = AmbientTangent { base: p2, vec: cscale(&v.vec, lam) };
        assert!((sf.metric(&v, &v2).unwrap() - sf.metric(&v, &v).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn holomorphic_and_totally_real_curvature() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for sf in forms() {
            let p = random_point(&sf, &mut rng);
            let [u, iu, w, _] = sf.horizontal_basis(&p);
            assert!((sf.curvature_form(&u, &iu, &iu, &u) - sf.c()).abs() < 1e-12);
            assert!((sf.curvature_form(&u, &w, &w, &u) - sf.c() / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn curvature_tensor_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for sf in forms() {
            for _ in 0..10 {
                let p = random_point(&sf, &mut rng);
                let [x, y, z, w] = [0; 4].map(|_| random_tangent(&sf, &p, &mut rng));
                let rxy = sf.curvature_tensor(&x, &y, &z).unwrap();
                let ryx = sf.curvature_tensor(&y, &x, &z).unwrap();
                assert!((rxy.vec + ryx.vec).norm() < 1e-10);
                let a = sf.metric(&rxy, &w).unwrap();
                let b = sf.metric(&sf.curvature_tensor(&x, &y, &w).unwrap(), &z).unwrap();
                assert!((a + b).abs() < 1e-10);
                let bianchi = rxy.vec
                    + sf.curvature_tensor(&y, &z, &x).unwrap().vec
                    + sf.curvature_tensor(&z, &x, &y).unwrap().vec;
                assert!(bianchi.norm() < 1e-10);
                assert!(sf.curvature_tensor(&x, &x, &z).unwrap().vec.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn exp_log_distance_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for sf in forms() {
            for _ in 0..10 {
                let p = random_point(&sf, &mut rng);
                let v = random_tangent(&sf, &p, &mut rng);
                let v = v.scaled(0.8 / sf.norm(&v.vec));
                let q = sf.exp_map(&p, &v, 1.0);
                assert!(sf.normalization_defect(&q) < 1e-12);
                assert!((sf.distance(&p, &q) - 0.8).abs() < 1e-10);
                let back = sf.log_map(&p, &q);
                assert!((back.vec - v.vec).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn exp_velocity_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for sf in forms() {
            let p = random_point(&sf, &mut rng);
            let v = random_tangent(&sf, &p, &mut rng);
            let d = fd::d1(|t| sf.exp_vec(&p, &v.vec, t).rep, 1e-3);
            assert!((d - v.vec).norm() < 1e-9);
        }
    }

    #[test]
    fn transport_preserves_metric_and_commutes_with_j() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for sf in forms() {
            let p = random_point(&sf, &mut rng);
            let v = random_tangent(&sf, &p, &mut rng);
            let w = random_tangent(&sf, &p, &mut rng);
            let x = random_tangent(&sf, &p, &mut rng);
            let tw = sf.parallel_transport(&p, &v, &w, 0.9).unwrap();
            let tx = sf.parallel_transport(&p, &v, &x, 0.9).unwrap();
            assert!((sf.metric(&tw, &tx).unwrap() - sf.metric(&w, &x).unwrap()).abs() < 1e-12);
            let tjw = sf.parallel_transport(&p, &v, &sf.complex_structure(&w), 0.9).unwrap();
            assert!((tjw.vec - sf.complex_structure(&tw).vec).norm() < 1e-12);
        }
    }

    #[test]
    fn covariant_derivative_of_parallel_field_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for sf in forms() {
            let p = random_point(&sf, &mut rng);
            let v = random_tangent(&sf, &p, &mut rng);
            let w = random_tangent(&sf, &p, &mut rng);
            let curve = |t: f64| sf.exp_map(&p, &v, t);
            let field = |t: f64| sf.parallel_transport(&p, &v, &w, t).unwrap();
            let d = sf.covariant_derivative(&curve, &field, 0.4, 1e-3);
            assert!(sf.norm(&d.vec) < 1e-6);
            let vel = |t: f64| sf.geodesic_velocity(&p, &v.vec, t);
            let acc = sf.covariant_derivative(&curve, &vel, 0.4, 1e-3);
            assert!(sf.norm(&acc.vec) < 1e-6);
        }
    }

    #[test]
    fn covariant_derivative_ignores_phase_of_representatives() {
        let sf = SpaceForm::new(-4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = random_point(&sf, &mut rng);
        let v = random_tangent(&sf, &p, &mut rng);
        let w = random_tangent(&sf, &p, &mut rng);
        let twist = |t: f64| Complex64::from_polar(1.0, 3.0 * t);
        let curve = |t: f64| {
            let q = sf.exp_map(&p, &v, t);
            AmbientPoint { rep: cscale(&q.rep, twist(t)) }
        };
        let field = |t: f64| {
            let f = sf.parallel_transport(&p, &v, &w, t).unwrap();
            AmbientTangent { base: curve(t), vec: cscale(&f.vec, twist(t)) }
        };
        let d = sf.covariant_derivative(&curve, &field, 0.3, 1e-3);
        assert!(sf.norm(&d.vec) < 1e-6);
    }
}
