use std::sync::Arc;

use symcartan::algebra::{build_algebra, invariant_form, killing_form, AlgebraDescriptor};
use symcartan::calculus::*;
use symcartan::{Error, Q};

fn alg(name: &str) -> Arc<AlgebraDescriptor> {
    build_algebra(name).unwrap()
}

fn sign(k: usize) -> Q {
    if k % 2 == 0 {
        Q::ONE
    } else {
        -Q::ONE
    }
}

fn dx(n: usize, i: usize) -> ScalarForm {
    ScalarForm::monomial(n, &[i], TrigPoly::constant(n, Q::ONE)).unwrap()
}

#[test]
fn wedge_of_coordinate_differentials() {
    let (x, y) = (dx(3, 0), dx(3, 1));
    assert_eq!(wedge(&x, &y).unwrap(), wedge(&y, &x).unwrap().scale(-Q::ONE));
    let cx = ScalarForm::monomial(3, &[0], TrigPoly::cos_sin(3, &[1, 0, 0], Q::ONE, Q::ZERO)).unwrap();
    let cy = ScalarForm::monomial(3, &[1], TrigPoly::cos_sin(3, &[1, 0, 0], Q::ONE, Q::ZERO)).unwrap();
    let w = wedge(&cx, &cy).unwrap();
    let expect = TrigPoly::constant(3, Q::new(1, 2)).add(&TrigPoly::cos_sin(3, &[2, 0, 0], Q::new(1, 2), Q::ZERO));
    assert_eq!(w.component(&[0, 1]), &expect);
}

#[test]
fn odd_scalar_square_vanishes() {
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
    let comps: Vec<TrigPoly> = (0..3).map(|_| random_trigpoly(&mut rng, 3, 2, 2)).collect();
    let mut w = ScalarForm::zero(3, 1).unwrap();
    for (i, c) in comps.into_iter().enumerate() {
        w = w.add(&ScalarForm::monomial(3, &[i], c).unwrap()).unwrap();
    }
    assert!(wedge(&w, &w).unwrap().is_zero());
}

#[test]
fn degree_overflow_errors() {
    let a = alg("so31");
    let two = random_form(1, 2, a.clone(), 3, 1, Support::Full).unwrap();
    assert!(matches!(two.lie_bracket(&two), Err(Error::DegreeOverflow { degree: 4, dim: 3 })));
    let three = random_form(1, 3, a, 3, 1, Support::Full).unwrap();
    assert!(matches!(three.exterior_d(), Err(Error::DegreeOverflow { .. })));
}

#[test]
fn torus_mismatch_errors() {
    let a = alg("so31");
    let f3 = random_form(1, 1, a.clone(), 3, 1, Support::Full).unwrap();
    let f2 = random_form(1, 1, a, 2, 1, Support::Full).unwrap();
    assert!(matches!(f3.lie_bracket(&f2), Err(Error::DimensionMismatch(_))));
}

#[test]
fn derivative_examples() {
    let a = alg("so31");
    let c = LieForm::monomial(a.clone(), 3, 2, &[1], TrigPoly::constant(3, Q::new(5, 2))).unwrap();
    assert!(exterior_d(&c).unwrap().is_zero());
    let s = LieForm::monomial(a.clone(), 3, 0, &[1], TrigPoly::cos_sin(3, &[1, 0, 0], Q::ZERO, Q::ONE)).unwrap();
    let ds = exterior_d(&s).unwrap();
    let expect = LieForm::monomial(a, 3, 0, &[0, 1], TrigPoly::cos_sin(3, &[1, 0, 0], Q::ONE, Q::ZERO)).unwrap();
    assert_eq!(ds, expect);
}

#[test]
fn integration_examples() {
    let top = ScalarForm::monomial(3, &[0, 1, 2], TrigPoly::constant(3, Q::new(7, 3))).unwrap();
    assert_eq!(integrate(&top).unwrap(), Q::new(7, 3));
    let s = TrigPoly::cos_sin(3, &[1, 0, 0], Q::ZERO, Q::ONE);
    let sq = ScalarForm::monomial(3, &[0, 1, 2], s.mul(&s)).unwrap();
    assert_eq!(integrate(&sq).unwrap(), Q::new(1, 2));
    assert!(integrate(&dx(3, 0)).is_err());
}

#[test]
fn constant_brackets_reduce_to_algebra_bracket() {
    let a = alg("so22");
    let one = TrigPoly::constant(3, Q::ONE);
    let x = LieForm::monomial(a.clone(), 3, 0, &[0], one.clone()).unwrap();
    let y = LieForm::monomial(a.clone(), 3, 1, &[1], one.clone()).unwrap();
    let b = x.lie_bracket(&y).unwrap();
    for g in 0..a.dim() {
        assert_eq!(b.component(g, &[0, 1]).mean(), a.c(0, 1, g));
    }
}

#[test]
fn killing_pair_of_constant_basis_forms() {
    let a = alg("so31");
    let k = killing_form(&a);
    let one = TrigPoly::constant(3, Q::ONE);
    let x = LieForm::monomial(a.clone(), 3, 1, &[0], one.clone()).unwrap();
    let y = LieForm::monomial(a.clone(), 3, 1, &[2], one).unwrap();
    let p = x.beta_pair(&k, &y).unwrap();
    assert_eq!(p.component(&[0, 2]).mean(), a.killing()[(1, 1)]);
}

#[test]
fn random_form_contracts() {
    let a = alg("so41");
    let f = random_form(9, 1, a.clone(), 4, 1, Support::P).unwrap();
    assert_eq!(f, random_form(9, 1, a.clone(), 4, 1, Support::P).unwrap());
    assert_ne!(f, random_form(10, 1, a.clone(), 4, 1, Support::P).unwrap());
    assert!(f.is_p_valued());
    let g = random_form(11, 2, a.clone(), 4, 2, Support::Full).unwrap();
    assert!(g.components().iter().all(|c| c.max_freq() <= 2 && c.is_hermitian()));
    assert!(random_form(1, 1, a, 4, 0, Support::Full).is_err());
}

#[test]
fn calculus_identities_on_t3() {
    for seed in 0..12u64 {
        let a = alg(["so31", "iso21", "so22", "so4"][seed as usize % 4]);
        let beta = killing_form(&a);
        let r = |s: u64, p: usize| random_form(seed * 1000 + s, p, a.clone(), 3, 2, Support::Full).unwrap();
        let (l, w, m) = (r(1, 1), r(2, 1), r(3, 1));
        let conn = r(4, 1);
        // graded commutativity and Jacobi, 1-forms
        assert_eq!(w.lie_bracket(&m).unwrap(), m.lie_bracket(&w).unwrap());
        let lhs = l.lie_bracket(&w.lie_bracket(&m).unwrap()).unwrap();
        let rhs = l
            .lie_bracket(&w)
            .unwrap()
            .lie_bracket(&m)
            .unwrap()
            .add(&w.lie_bracket(&l.lie_bracket(&m).unwrap()).unwrap().scale(-Q::ONE))
            .unwrap();
        assert_eq!(lhs, rhs);
        // d as graded derivation, p = 1
        let d_lhs = w.lie_bracket(&m).unwrap().exterior_d().unwrap();
        let d_rhs = w
            .exterior_d()
            .unwrap()
            .lie_bracket(&m)
            .unwrap()
            .sub(&w.lie_bracket(&m.exterior_d().unwrap()).unwrap())
            .unwrap();
        assert_eq!(d_lhs, d_rhs);
        // d_A derivation
        let da_lhs = w.lie_bracket(&m).unwrap().covariant_d(&conn).unwrap();
        let da_rhs = w
            .covariant_d(&conn)
            .unwrap()
            .lie_bracket(&m)
            .unwrap()
            .sub(&w.lie_bracket(&m.covariant_d(&conn).unwrap()).unwrap())
            .unwrap();
        assert_eq!(da_lhs, da_rhs);
        // d² = 0
        assert!(w.exterior_d().unwrap().exterior_d().unwrap().is_zero());
        // β invariance: β([λ,ω]∧μ) = (−1)^{pr+1} β(ω∧[λ,μ]), p = r = 1
        let z = r(5, 0);
        let inv_l = z.lie_bracket(&w).unwrap().beta_pair(&beta, &m).unwrap();
        let inv_r = w.beta_pair(&beta, &z.lie_bracket(&m).unwrap()).unwrap().scale(-Q::ONE);
        assert_eq!(inv_l, inv_r);
        // covariant integration by parts on a 1-form and a 1-form
        let lhs = w.beta_pair(&beta, &m).unwrap().exterior_d().unwrap();
        let rhs = w
            .covariant_d(&conn)
            .unwrap()
            .beta_pair(&beta, &m)
            .unwrap()
            .add(&w.beta_pair(&beta, &m.covariant_d(&conn).unwrap()).unwrap().scale(sign(1)))
            .unwrap();
        assert_eq!(lhs, rhs);
        // Stokes
        let two = r(6, 2);
        let d2 = two.exterior_d().unwrap();
        for c in d2.components() {
            assert!(c.mean().is_zero());
        }
    }
}

#[test]
fn star_commutes_with_covariant_derivative() {
    let a = alg("so31");
    for seed in 0..10 {
        let w = random_form(seed, 1, a.clone(), 3, 2, Support::H).unwrap();
        let x = random_form(seed + 100, 1, a.clone(), 3, 2, Support::Full).unwrap();
        assert_eq!(x.star().unwrap().covariant_d(&w).unwrap(), x.covariant_d(&w).unwrap().star().unwrap());
    }
}

#[test]
fn grid_pipeline_matches_exact_on_band_limited_fields() {
    let a = alg("so22");
    let beta = invariant_form(&a, Q::new(1, 2), Q::int(3)).unwrap();
    let w = random_form(5, 1, a.clone(), 3, 1, Support::Full).unwrap();
    let m = random_form(6, 2, a.clone(), 3, 1, Support::Full).unwrap();
    let exact = w.exterior_d().unwrap().lie_bracket(&LieForm::zero(a.clone(), 3, 0).unwrap()).unwrap();
    assert!(exact.is_zero());
    let grid = Grid::new(3, 8);
    let wg = w.map_coeffs(grid, |c| c.sample(grid));
    let mg = m.map_coeffs(grid, |c| c.sample(grid));
    let ex = w.beta_integral(&beta, &m).unwrap().to_f64();
    let num = wg.beta_integral(&beta, &mg).unwrap();
    assert!((ex - num).abs() < 1e-12 * (1.0 + ex.abs()));
    let dex = w.exterior_d().unwrap().map_coeffs(grid, |c| c.sample(grid));
    let dnum = wg.exterior_d().unwrap();
    for (x, y) in dex.components().iter().zip(dnum.components()) {
        for (u, v) in x.values().iter().zip(y.values()) {
            assert!((u - v).abs() < 1e-12);
        }
    }
}

#[test]
fn pointwise_evaluation_matches_rational_points() {
    let a = alg("iso21");
    let f = random_form(77, 1, a, 3, 2, Support::Full).unwrap();
    let pi = std::f64::consts::PI;
    for c in f.components() {
        let x = [pi / 3.0, pi * 5.0 / 4.0, pi / 6.0];
        let direct: f64 = c
            .terms()
            .iter()
            .map(|(k, v)| {
                let ph = k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2];
                v.re.to_f64() * ph.cos() - v.im.to_f64() * ph.sin()
            })
            .sum();
        assert!((c.eval(&x) - direct).abs() < 1e-12);
    }
}

#[test]
fn field_file_round_trip() {
    let a = alg("so22");
    let w = random_form(1, 1, a.clone(), 3, 2, Support::H).unwrap();
    let e = random_form(2, 1, a.clone(), 3, 2, Support::P).unwrap();
    let mut file = FieldFile::new("so22", 3);
    file.push("omega", &w, Support::H).unwrap();
    file.push("e", &e, Support::P).unwrap();
    let text = file.to_json_string();
    let back: FieldFile = text.parse().unwrap();
    assert_eq!(back.form("omega", &a).unwrap(), w);
    assert_eq!(back.form("e", &a).unwrap(), e);
    assert!(back.form("missing", &a).is_err());
    let mut bad = back.clone();
    bad.forms[0].support = Support::P;
    assert!(bad.form("omega", &a).is_err());
}
