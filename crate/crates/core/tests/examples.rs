//! Worked examples for each module, checked exactly.

mod common;

use std::collections::BTreeMap;

use syzkit::calculus::{d_lambda, del, delbar, dual_lefschetz, exterior_d, polarization_switch};
use syzkit::exterior::{GenClass, Generator};
use syzkit::fourier::{complex_monomial, fm_backward, fm_forward, fm_monomial, SemiflatPair};
use syzkit::linalg::poly_det;
use syzkit::nilmanifold::{iwasawa_omega_check, NilData};
use syzkit::sustruct::{check_hermitian_at, conformal_factor, flat_omega_check, mirror_transform, mu_matrix};
use syzkit::{q, qi, Form, FrameSpec, Poly, Q};

use common::{cofactor_det, perm_sign};

fn r(i: usize) -> Poly {
    Poly::var(&format!("r_{i}"))
}

#[test]
fn polynomial_arithmetic() {
    assert!((&r(1) + &(-&r(1))).is_zero());
    let rr = &r(1) * &r(2);
    assert_eq!(&rr + &rr, rr.scale(&q(2, 1)));
    let one_plus = &Poly::one() + &r(1).pow(2);
    assert_eq!(&one_plus - &r(1).pow(2), Poly::one());
    assert_eq!(&(&one_plus * &Poly::one()) - &(&r(1) * &r(1)), Poly::one());
    assert_eq!(Poly::constant(qi(0, 1)).mul_poly(&Poly::constant(qi(0, 1))), Poly::from_int(-1));
    assert_eq!(r(1).pow(2).diff("r_1"), r(1).scale(&q(2, 1)));
    assert!((&r(1) * &r(2)).diff("r_3").is_zero());

    let shift: BTreeMap<String, Poly> = [("r_1".to_string(), &r(1) + &Poly::one())].into();
    assert_eq!(r(1).pow(2).subst(&shift), &(&r(1).pow(2) + &r(1).scale(&q(2, 1))) + &Poly::one());
    assert_eq!(r(1).pow(2).subst(&BTreeMap::new()), r(1).pow(2));
}

#[test]
fn lattice_shift_fixes_e13_coefficient() {
    // r_13 − r_12 r_23 under r_12 ↦ r_12 + 1, r_13 ↦ r_13 + r_23.
    let v = |s: &str| Poly::var(s);
    let p = &v("r_{1,3}") - &(&v("r_{1,2}") * &v("r_{2,3}"));
    let map: BTreeMap<String, Poly> = [
        ("r_{1,2}".to_string(), &v("r_{1,2}") + &Poly::one()),
        ("r_{1,3}".to_string(), &v("r_{1,3}") + &v("r_{2,3}")),
    ]
    .into();
    assert_eq!(p.subst(&map), p);
}

#[test]
fn wedge_examples() {
    let pair = SemiflatPair::<Q>::standard(2).unwrap();
    let x = pair.x();
    let g = |l| Form::gen(x, l).unwrap();
    assert_eq!(g("dr_1").wedge(&g("dθ_1")).unwrap(), g("dθ_1").wedge(&g("dr_1")).unwrap().neg_form());
    let a = Form::gens(x, &["dθ_1", "dr_1"]).unwrap();
    let b = Form::gens(x, &["dθ_2", "dr_2"]).unwrap();
    assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap());
    assert!(g("dr_2").wedge(&g("dr_2")).unwrap().is_zero());

    let split = (GenClass::SymplecticFiber, GenClass::Base);
    let mixed = &a + &Form::gens(x, &["dθ_1", "dθ_2"]).unwrap();
    assert_eq!(mixed.bidegree_project(1, 1, split), a);
}

#[test]
fn exponential_examples() {
    let pair = SemiflatPair::<Q>::standard(3).unwrap();
    let c = pair.correspondence();
    assert_eq!(Form::zero(c).exp_nilpotent().unwrap(), Form::one(c));
    let t = |i: usize| Form::gens(c, &[&format!("dθ̌_{i}"), &format!("dθ_{i}")]).unwrap();
    let two = &t(1) + &t(2);
    let expected = &(&Form::one(c) + &two) + &t(1).wedge(&t(2)).unwrap();
    assert_eq!(two.exp_nilpotent().unwrap(), expected);

    let three = &two + &t(3);
    let top = three.exp_nilpotent().unwrap().homogeneous_part(6);
    let sorted = Form::gens(c, &["dθ̌_1", "dθ̌_2", "dθ̌_3", "dθ_1", "dθ_2", "dθ_3"]).unwrap();
    // (θ̌1 θ1 θ̌2 θ2 θ̌3 θ3) against (θ̌1 θ̌2 θ̌3 θ1 θ2 θ3).
    let odd = perm_sign(&[0, 3, 1, 4, 2, 5]);
    assert_eq!(top, if odd { sorted.neg_form() } else { sorted });
    assert!(odd);
}

#[test]
fn pushforward_examples() {
    let frame = FrameSpec::coordinates(
        "pf",
        vec![
            Generator::new("dθ_1", GenClass::SymplecticFiber, 0),
            Generator::new("dθ̌_1", GenClass::ComplexFiber, 0),
            Generator::new("dr_1", GenClass::Base, 0),
            Generator::new("dr_2", GenClass::Base, 1),
        ],
    )
    .unwrap();
    let g = Poly::var("r_2");
    let a = Form::gens(&frame, &["dθ̌_1", "dr_1"]).unwrap().mul_poly(&g);
    assert_eq!(a.pushforward(GenClass::ComplexFiber).unwrap(), Form::gen(&frame, "dr_1").unwrap().mul_poly(&g));
    assert!(Form::gen(&frame, "dr_1").unwrap().pushforward(GenClass::ComplexFiber).unwrap().is_zero());
    let b = Form::gens(&frame, &["dθ_1", "dθ̌_1", "dr_2"]).unwrap();
    assert_eq!(b.pushforward(GenClass::ComplexFiber).unwrap(), Form::gens(&frame, &["dθ_1", "dr_2"]).unwrap().neg_form());
}

#[test]
fn contraction_examples() {
    let pair = SemiflatPair::<Q>::standard(2).unwrap();
    let x = pair.x();
    let t1 = x.index_of("dθ_1").unwrap();
    let r1 = x.index_of("dr_1").unwrap();
    let a = Form::gens(x, &["dθ_1", "dr_1"]).unwrap();
    assert_eq!(a.contract(t1), Form::gen(x, "dr_1").unwrap());
    assert!(Form::gen(x, "dr_2").unwrap().contract(t1).is_zero());
    assert_eq!(a.contract(t1).contract(r1), Form::one(x));
}

#[test]
fn frame_examples() {
    let nd = NilData::build(3).unwrap();
    assert_eq!(nd.e(1, 3).expand_fully().to_string(), "(-r_{1,2})·dr_{2,3} + dr_{1,3}");
    let fc = nd.fcheck(2, 3).expand_fully();
    let xa = fc.frame().clone();
    let expected = &Form::gen(&xa, "dθ̌_{2,3}").unwrap() + &Form::gen(&xa, "dθ̌_{1,3}").unwrap().mul_poly(&Poly::var("r_{1,2}"));
    assert_eq!(fc, expected);
    assert_eq!(NilData::build(4).unwrap().n(), 6);
}

#[test]
fn calculus_examples() {
    let pair = SemiflatPair::<Q>::standard(2).unwrap();
    let x = pair.x();
    let a = Form::gen(x, "dθ_2").unwrap().mul_poly(&r(1));
    assert_eq!(exterior_d(&a), Form::gens(x, &["dr_1", "dθ_2"]).unwrap());

    let sd = pair.darboux();
    assert_eq!(dual_lefschetz(sd.omega(), sd).unwrap(), Form::constant(x, q(2, 1)));
    assert!(dual_lefschetz(&Form::gens(x, &["dθ_1", "dθ_2"]).unwrap(), sd).unwrap().is_zero());
    assert!(dual_lefschetz(&Form::gen(x, "dr_1").unwrap(), sd).unwrap().is_zero());
    let g = Form::scalar(x, &r(1).pow(2) * &r(2));
    assert!(d_lambda(&g, sd).unwrap().is_zero());
    assert!(d_lambda(sd.omega(), sd).unwrap().is_zero());

    let basis = pair.complex();
    let z = basis.frame();
    let gz = Form::scalar(z, &r(1).pow(2) * &r(2));
    let dg = |v: &str| (&r(1).pow(2) * &r(2)).diff(v);
    let mut dbar = Form::zero(z);
    let mut d = Form::zero(z);
    for i in 1..=2 {
        let v = format!("r_{i}");
        dbar = &dbar + &Form::gen(z, &format!("dz̄_{i}")).unwrap().mul_poly(&dg(&v)).scale(&(qi(0, 1) * q(1, 2)));
        d = &d + &Form::gen(z, &format!("dz_{i}")).unwrap().mul_poly(&dg(&v)).scale(&(qi(0, -1) * q(1, 2)));
    }
    assert_eq!(delbar(&gz, basis).unwrap(), dbar);
    assert_eq!(del(&gz, basis).unwrap(), d);
    assert!(delbar(&Form::gen(z, "dz_1").unwrap(), basis).unwrap().is_zero());

    let p = polarization_switch(&Form::gens(z, &["dz_1", "dz̄_2"]).unwrap(), basis, pair.xcheck()).unwrap();
    assert_eq!(p, Form::gens(pair.xcheck(), &["dθ̌_1", "dr_2"]).unwrap());
    assert_eq!(polarization_switch(&Form::one(z), basis, pair.xcheck()).unwrap(), Form::one(pair.xcheck()));
}

#[test]
fn transform_examples() {
    let pair = SemiflatPair::<Q>::standard(3).unwrap();
    let x = pair.x();
    let minus_top = Form::gens(x, &["dθ_1", "dθ_2", "dθ_3"]).unwrap().neg_form();
    assert_eq!(fm_forward(&Form::one(pair.complex().frame()), &pair).unwrap(), minus_top);
    // Consistent with the involution sign (−1)^{n(n−1)/2} = −1 for n = 3.
    assert_eq!(fm_backward(&minus_top, &pair).unwrap(), Form::one(pair.complex().frame()).neg_form());
    assert_eq!(fm_monomial::<Q>(&[0, 1, 2], &[], &pair).unwrap(), Form::one(x));
    assert_eq!(
        fm_monomial::<Q>(&[], &[0], &pair).unwrap(),
        Form::gens(x, &["dθ_1", "dθ_2", "dθ_3", "dr_1"]).unwrap().neg_form()
    );
    let two = SemiflatPair::<Q>::standard(2).unwrap();
    let a = complex_monomial(&[0], &[1], &two);
    assert_eq!(fm_forward(&a, &two).unwrap(), fm_monomial::<Q>(&[0], &[1], &two).unwrap());
}

#[test]
fn conformal_factor_examples() {
    let pair = SemiflatPair::standard(2).unwrap();
    let w = flat_omega_check(&pair);
    let m = mirror_transform(&w, &pair).unwrap();
    let f = conformal_factor(&m.structure).unwrap().constant().unwrap();
    assert_eq!(f, q(-4, 1));
    let b = syzkit::sustruct::complex_side_structure(&w, &pair).unwrap();
    let fb = conformal_factor(&b).unwrap().constant().unwrap();
    assert_eq!(f * fb, q(16, 1));

    let three = SemiflatPair::standard(3).unwrap();
    let mu = mu_matrix(&iwasawa_omega_check(&three).unwrap(), &three).unwrap();
    assert_eq!(poly_det(&mu), Poly::one());
    assert_eq!(cofactor_det(&mu), Poly::one());
}

#[test]
fn hermitian_examples() {
    let pair = SemiflatPair::standard(3).unwrap();
    let mu = mu_matrix(&iwasawa_omega_check(&pair).unwrap(), &pair).unwrap();
    let at = |v: i64| -> BTreeMap<String, Q> { [("r_1".into(), q(v, 1)), ("r_2".into(), q(0, 1)), ("r_3".into(), q(0, 1))].into() };
    let rep = check_hermitian_at(&mu, &[at(0), at(5)]);
    assert!(rep.all_pass());
    assert_eq!(rep.checks[1].detail, "leading minors 1, 26, 1");
    let diag = vec![vec![Poly::one(), Poly::zero()], vec![Poly::zero(), Poly::from_int(-1)]];
    let bad = check_hermitian_at(&diag, &[BTreeMap::new()]);
    assert!(!bad.all_pass());
    assert_eq!(bad.checks[0].witness.as_deref(), Some("minor 2 = -1"));
}
