use std::sync::Arc;

use proptest::prelude::*;
use symcartan::actions::{random_connection, Couplings, Residual};
use symcartan::algebra::{build_algebra, invariant_form, AlgebraDescriptor, AlgebraElement, AlgebraName, StarKind};
use symcartan::calculus::{random_form, FieldFile, Support};
use symcartan::cartan::{bianchi_residuals, holonomy, PathSpec, RollingModel};
use symcartan::suite::{calculus_checks, star_checks_random, SeedRange};
use symcartan::Q;

fn alg(i: usize) -> Arc<AlgebraDescriptor> {
    build_algebra(AlgebraName::ALL[i % AlgebraName::ALL.len()].as_str()).unwrap()
}

fn small_q() -> impl Strategy<Value = Q> {
    (-9i128..=9, 1i128..=6).prop_map(|(n, d)| Q::new(n, d))
}

fn element(a: &Arc<AlgebraDescriptor>, coeffs: &[Q]) -> AlgebraElement {
    AlgebraElement::new(a.clone(), coeffs[..a.dim()].to_vec()).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<Q>> {
    proptest::collection::vec(small_q(), 10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bracket_is_antisymmetric_and_jacobi(i in 0usize..8, x in coeffs(), y in coeffs(), z in coeffs()) {
        let a = alg(i);
        let (x, y, z) = (element(&a, &x), element(&a, &y), element(&a, &z));
        let xy = x.bracket(&y).unwrap();
        prop_assert!(xy.add(&y.bracket(&x).unwrap()).unwrap().is_zero());
        let jac = x.bracket(&y.bracket(&z).unwrap()).unwrap()
            .add(&y.bracket(&z.bracket(&x).unwrap()).unwrap()).unwrap()
            .add(&z.bracket(&xy).unwrap()).unwrap();
        prop_assert!(jac.is_zero());
    }

    #[test]
    fn symmetric_split_is_a_grading(i in 0usize..8, x in coeffs(), y in coeffs()) {
        let a = alg(i);
        let (x, y) = (element(&a, &x), element(&a, &y));
        let s = |v: &AlgebraElement| v.involution();
        prop_assert_eq!(s(&x.bracket(&y).unwrap()), s(&x).bracket(&s(&y)).unwrap());
        prop_assert_eq!(x.h_part().add(&x.p_part()).unwrap(), x);
    }

    #[test]
    fn star_commutes_with_the_stabilizer_action(i in 0usize..8, x in coeffs(), y in coeffs()) {
        let a = alg(i);
        let (x, y) = (element(&a, &x), element(&a, &y));
        let h = x.h_part();
        let y = if matches!(a.star_kind(), StarKind::Stabilizer { .. }) { y.h_part() } else { y };
        prop_assert_eq!(h.bracket(&y).unwrap().star().unwrap(), h.bracket(&y.star().unwrap()).unwrap());
    }

    #[test]
    fn invariant_forms_are_ad_invariant(
        i in 0usize..3, c0 in small_q(), c1 in small_q(), x in coeffs(), y in coeffs(), z in coeffs()
    ) {
        let a = build_algebra(AlgebraName::GRAVITY_3D[i].as_str()).unwrap();
        let b = invariant_form(&a, c0, c1).unwrap();
        let (x, y, z) = (element(&a, &x), element(&a, &y), element(&a, &z));
        let lhs = b.eval_elements(&z.bracket(&x).unwrap(), &y) + b.eval_elements(&x, &z.bracket(&y).unwrap());
        prop_assert!(lhs.is_zero());
        prop_assert_eq!(b.eval_elements(&x, &y), b.eval_elements(&y, &x));
    }

    #[test]
    fn rationals_round_trip_as_strings(n in any::<i64>(), d in 1i64..i64::MAX) {
        let q = Q::new(n as i128, d as i128);
        let s = serde_json::to_string(&q).unwrap();
        prop_assert_eq!(serde_json::from_str::<Q>(&s).unwrap(), q);
        prop_assert_eq!(q.to_string().parse::<Q>().unwrap(), q);
    }

    #[test]
    fn seed_ranges_round_trip(a in 0u64..1000, len in 0u64..1000) {
        let r = SeedRange { start: a, end: a + len };
        let s = String::from(r);
        prop_assert_eq!(s.parse::<SeedRange>().unwrap(), r);
        prop_assert_eq!(r.len() as u64, len);
    }

    #[test]
    fn couplings_round_trip(c0 in small_q(), c1 in small_q(), mu in proptest::option::of(small_q())) {
        let c = Couplings { c0, c1, mu, gamma: None };
        let back: Couplings = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn sphere_holonomy_is_enclosed_area(x in -0.3f64..0.3, y in -0.3f64..0.3, side in 0.05f64..0.3) {
        let sq = PathSpec::square([x, y], side);
        let h = holonomy(&RollingModel::Sphere, &sq, 4000).unwrap();
        let area = side * side;
        prop_assert!((h.rotation_angle().unwrap() - area).abs() < 1e-5 * area.max(1e-2));
        prop_assert!(h.group_defect < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn calculus_identities_hold_exactly(i in 0usize..8, seed in any::<u64>()) {
        let a = alg(i);
        let cutoff = if a.spacetime_dim() == 3 { 2 } else { 1 };
        for (name, d) in calculus_checks(&a, seed, cutoff).unwrap() {
            prop_assert!(d.is_zero(), "{} on {}: {}", name, a.name(), d);
        }
    }

    #[test]
    fn star_identities_hold_exactly(i in 0usize..8, seed in any::<u64>()) {
        let a = alg(i);
        for (name, d) in star_checks_random(&a, seed).unwrap() {
            prop_assert!(d.is_zero(), "{} on {}: {}", name, a.name(), d);
        }
    }

    #[test]
    fn bianchi_identities_hold_exactly(i in 0usize..8, seed in any::<u64>()) {
        let a = alg(i);
        let n = a.spacetime_dim();
        let conn = random_connection(&a, seed, n, 1).unwrap();
        let (x, y, z) = bianchi_residuals(&conn).unwrap();
        prop_assert!(x.is_zero() && y.is_zero() && z.is_zero());
    }

    #[test]
    fn field_files_round_trip(i in 0usize..8, seed in any::<u64>(), degree in 0usize..=3) {
        let a = alg(i);
        let n = a.spacetime_dim();
        let f = random_form(seed, degree, a.clone(), n, 1, Support::Full).unwrap();
        let mut file = FieldFile::new(a.name().as_str(), n);
        file.push("f", &f, Support::Full).unwrap();
        let back: FieldFile = file.to_json_string().parse().unwrap();
        prop_assert_eq!(back.form("f", &a).unwrap(), f);
    }
}

#[test]
fn residual_strings() {
    assert_eq!(serde_json::to_string(&Residual::Exact(Q::ZERO)).unwrap(), "\"0\"");
    assert_eq!(serde_json::to_string(&Residual::Exact(Q::new(-3, 4))).unwrap(), "\"-3/4\"");
}
