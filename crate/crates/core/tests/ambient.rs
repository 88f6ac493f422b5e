mod common;

use hopflab::actions::{ActionLabel, PolarActionSpec};
use hopflab::ambient::cscale;
use hopflab::{AmbientPoint, SpaceForm, C3};
use num_complex::Complex64;
use proptest::prelude::*;

fn c3(v: &[f64; 6]) -> C3 {
    C3::new(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]), Complex64::new(v[4], v[5]))
}

/// Random point: `CP²` anywhere, `CH²` with a dominant first coordinate
/// (|z₀|² ≥ 2.25 > 1 ≥ |z₁|² + |z₂|², so always timelike).
fn point(space: &SpaceForm, v: &[f64; 6]) -> AmbientPoint {
    let mut z = c3(v);
    if !space.is_projective() {
        z[1] *= 0.5;
        z[2] *= 0.5;
        z[0] += Complex64::new(2.5, 0.0);
    } else {
        z[0] += Complex64::new(0.5, 0.0);
    }
    space.point(z).unwrap()
}

fn coords() -> impl Strategy<Value = [f64; 6]> {
    prop::array::uniform6(-1.0..1.0f64)
}

fn curvature() -> impl Strategy<Value = f64> {
    prop_oneof![0.5..6.0f64, -6.0..-0.5f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_matches_cross_ratio(c in curvature(), a in coords(), b in coords()) {
        let s = SpaceForm::new(c).unwrap();
        let (p, q) = (point(&s, &a), point(&s, &b));
        let d = s.distance(&p, &q);
        prop_assert!((d - common::distance(c, &p.rep, &q.rep)).abs() < 1e-7 * (1.0 + d));
        // phase of the representative is irrelevant
        let q2 = AmbientPoint { rep: cscale(&q.rep, Complex64::from_polar(1.0, 0.7)) };
        prop_assert!((s.distance(&p, &q2) - d).abs() < 1e-9 * (1.0 + d));
    }

    #[test]
    fn exp_map_has_unit_speed(c in curvature(), a in coords(), b in coords(), t in 0.01..0.6f64) {
        let s = SpaceForm::new(c).unwrap();
        let p = point(&s, &a);
        let v = s.horizontal(&p.rep, &c3(&b));
        prop_assume!(s.norm(&v) > 1e-3);
        let v = cscale(&v, (1.0 / s.norm(&v)).into());
        // stay inside the injectivity radius of CP²
        let t = t * s.radius();
        let q = s.exp_vec(&p, &v, t);
        prop_assert!(s.normalization_defect(&q) < 1e-10);
        prop_assert!((common::distance(c, &p.rep, &q.rep) - t).abs() < 1e-7);
        let back = s.log_map(&p, &q);
        let lv = s.vec_at(&p, &back).unwrap();
        prop_assert!(s.norm(&(lv - cscale(&v, t.into()))) < 1e-6);
    }

    #[test]
    fn curvature_form_matches_constant_holomorphic_curvature(c in curvature(), a in coords(), b in coords(), e in coords()) {
        let s = SpaceForm::new(c).unwrap();
        let p = point(&s, &a);
        let x = s.horizontal(&p.rep, &c3(&b));
        let y = s.horizontal(&p.rep, &c3(&e));
        prop_assume!(s.norm(&x) > 1e-2 && s.norm(&y) > 1e-2);
        let x = cscale(&x, (1.0 / s.norm(&x)).into());
        // K(X, Y) = c/4 (1 + 3 cos² ∠(JX, Y)) for unit X
        let yo = y - cscale(&x, s.g(&y, &x).into());
        prop_assume!(s.norm(&yo) > 1e-2);
        let yo = cscale(&yo, (1.0 / s.norm(&yo)).into());
        let cosj = s.g(&cscale(&x, Complex64::i()), &yo);
        let want = c / 4.0 * (1.0 + 3.0 * cosj * cosj);
        prop_assert!((s.curvature_form(&x, &yo, &yo, &x) - want).abs() < 1e-9);
    }

    #[test]
    fn action_elements_are_isometries(i in 0usize..5, s1 in -2.0..2.0f64, s2 in -2.0..2.0f64, a in coords(), b in coords()) {
        let spec = PolarActionSpec::standard(ActionLabel::ALL[i]);
        let s = spec.ambient;
        let m = spec.group_element([s1, s2]);
        prop_assert!(s.isometry_defect(&m) < 1e-9);
        let (p, q) = (point(&s, &a), point(&s, &b));
        let d = s.distance(&p, &q);
        let d2 = s.distance(&s.apply(&m, &p), &s.apply(&m, &q));
        prop_assert!((d - d2).abs() < 1e-7 * (1.0 + d));
    }
}

#[test]
fn scaling_the_curvature_scales_distances() {
    let (a, b) = ([0.1, 0.2, -0.3, 0.05, 0.4, -0.1], [-0.2, 0.1, 0.3, 0.3, -0.1, 0.2]);
    for sign in [1.0, -1.0] {
        let s1 = SpaceForm::new(4.0 * sign).unwrap();
        let s2 = SpaceForm::new(sign).unwrap();
        let d1 = s1.distance(&point(&s1, &a), &point(&s1, &b));
        let d2 = s2.distance(&point(&s2, &a), &point(&s2, &b));
        assert!((d2 - 2.0 * d1).abs() < 1e-10, "{d1} {d2}");
    }
}
