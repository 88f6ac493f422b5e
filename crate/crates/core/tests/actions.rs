use hopflab::actions::{ActionLabel, PolarActionSpec};
use proptest::prelude::*;

fn regular(spec: &PolarActionSpec, u: [f64; 2]) -> bool {
    let p = spec.section.lift(&spec.section.coords_to_y(u));
    spec.is_regular(&p) && spec.killing_gram(&p).determinant().abs() > 1e-4
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn phi_is_odd_and_nonzero(a in 0usize..5, u in prop::array::uniform2(-0.7..0.7f64), th in 0.0..3.14f64) {
        let spec = PolarActionSpec::standard(ActionLabel::ALL[a]);
        prop_assume!(regular(&spec, u));
        let y = spec.section.coords_to_y(u);
        let w = spec.section.direction(&y, th);
        let f = spec.phi_at(&y, &w).unwrap();
        let g = spec.phi_at(&y, &spec.section.direction(&y, th + std::f64::consts::PI)).unwrap();
        prop_assert!((f + g).abs() < 1e-10 * (1.0 + f.abs()));
        let max = spec.phi_profile(&y, 360).unwrap().iter().map(|p| p.1.abs()).fold(0.0, f64::max);
        prop_assert!(max > 1e-6);
    }

    #[test]
    fn hopf_directions_are_zeros_in_antipodal_pairs(a in 0usize..5, u in prop::array::uniform2(-0.7..0.7f64)) {
        let spec = PolarActionSpec::standard(ActionLabel::ALL[a]);
        prop_assume!(regular(&spec, u));
        let y = spec.section.coords_to_y(u);
        let d = spec.hopf_directions(&y, 720, 1e-6).unwrap();
        prop_assert!(d.len() % 2 == 0);
        for z in &d {
            prop_assert!(z.phi.abs() < 1e-6);
            let anti = (z.theta + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU);
            let diff = |t: f64| { let x = (t - anti).rem_euclid(std::f64::consts::TAU); x.min(std::f64::consts::TAU - x) };
            prop_assert!(d.iter().any(|o| diff(o.theta) < 1e-7));
        }
        prop_assert_eq!(spec.hopf_directions(&y, 1440, 1e-6).unwrap().len(), d.len());
    }

    #[test]
    fn killing_fields_are_normal_to_the_section(a in 0usize..5, u in prop::array::uniform2(-0.7..0.7f64), th in 0.0..6.28f64) {
        let spec = PolarActionSpec::standard(ActionLabel::ALL[a]);
        prop_assume!(regular(&spec, u));
        let y = spec.section.coords_to_y(u);
        let p = spec.section.lift(&y);
        let t = spec.section.lift_tangent(&y, &spec.section.direction(&y, th));
        for g in 0..2 {
            let k = spec.killing_field(g, &p).unwrap();
            prop_assert!(spec.ambient.metric(&k, &t).unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn section_coordinates_invert_the_lift(a in 0usize..5, u in prop::array::uniform2(-0.7..0.7f64), ph in 0.0..6.28f64) {
        let spec = PolarActionSpec::standard(ActionLabel::ALL[a]);
        let y = spec.section.coords_to_y(u);
        let mut p = spec.section.lift(&y);
        p.rep *= num_complex::Complex64::from_polar(1.0, ph);
        let y2 = spec.section_coords_of(&p).unwrap();
        prop_assert!((y2 - y).norm() < 1e-9 || (y2 + y).norm() < 1e-9, "{y:?} {y2:?}");
    }
}

#[test]
fn labels_parse_from_both_spellings() {
    for l in ActionLabel::ALL {
        assert_eq!(l.cli_name().parse::<ActionLabel>().unwrap(), l);
        assert_eq!(l.table_name().parse::<ActionLabel>().unwrap(), l);
    }
    assert!("ch3-torus".parse::<ActionLabel>().is_err());
}

#[test]
fn wrong_curvature_sign_is_rejected() {
    assert!(PolarActionSpec::new(ActionLabel::Cp2Torus, -4.0).is_err());
    assert!(PolarActionSpec::new(ActionLabel::Ch2G0, 4.0).is_err());
    assert!(PolarActionSpec::new(ActionLabel::Ch2G0, -1.0).is_ok());
}
