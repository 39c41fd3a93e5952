//! Randomized property campaigns.
//!
//! A campaign runs `trials` independent trials of one suite. Trial `t` draws
//! from its own stream (see [`random::trial_rng`]) and cycles through the
//! suite's sizes by `t`, so the assembled report depends only on the suite,
//! the trial count and the seed.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::calculus::{d_lambda, del, delbar, exterior_d, polarization_switch, polarization_unswitch};
use crate::coeffring::Poly as P;
use crate::error::{Error, Result};
use crate::exterior::{bits, GenClass};
use crate::fourier::{
    check_intertwining, fm_backward, fm_forward, fm_forward_naive, fm_monomial, involution_sign, leg_counts, SemiflatPair,
};
use crate::nilmanifold::{real_part, NilData};
use crate::random::{self, Shape};
use crate::report::Report;
use crate::sustruct::{check_iia, check_iib, complex_side_structure, mirror_transform, OmegaSpec, Phase, Polarization};
use crate::{Form, Poly, Q, Scalar};

/// Suites accepted by [`run`].
pub const SUITES: &[&str] =
    &["ring", "exterior", "operators", "ft-involution", "closed-form", "intertwining", "real-part", "mirror-systems"];

/// One invariant evaluated on one trial: `None` when it holds, else a witness.
type Outcome = (&'static str, Option<String>);

struct Ctx {
    pairs: Vec<SemiflatPair<Q>>,
    nil: NilData,
}

impl Ctx {
    fn pair(&self, n: usize) -> &SemiflatPair<Q> {
        &self.pairs[n - 1]
    }
}

fn expect(id: &'static str, ok: bool, witness: impl FnOnce() -> String) -> Outcome {
    (id, if ok { None } else { Some(witness()) })
}

fn expect_eq(id: &'static str, lhs: &Form, rhs: &Form) -> Outcome {
    expect(id, lhs == rhs, || format!("{lhs}  ≠  {rhs}"))
}

fn expect_zero(id: &'static str, f: &Form) -> Outcome {
    expect(id, f.is_zero(), || f.to_string())
}

fn graded_sign(k: usize) -> Q {
    if k % 2 == 0 {
        Q::from_int(1)
    } else {
        Q::from_int(-1)
    }
}

fn ring_trial(rng: &mut impl Rng, ctx: &Ctx) -> Result<Vec<Outcome>> {
    let vars = ctx.pair(3).base_vars();
    let shape = Shape::default();
    let (a, b, c): (Poly, Poly, Poly) = (random::poly(rng, vars, shape), random::poly(rng, vars, shape), random::poly(rng, vars, shape));
    let v = &vars[rng.gen_range(0..vars.len())];
    let map = random::shift_substitution(rng, vars, shape);
    let poly_eq = |id, l: P<Q>, r: P<Q>| expect(id, l == r, || format!("{l}  ≠  {r}"));
    Ok(vec![
        poly_eq("ring.add_commutative", &a + &b, &b + &a),
        poly_eq("ring.mul_commutative", &a * &b, &b * &a),
        poly_eq("ring.add_associative", &(&a + &b) + &c, &a + &(&b + &c)),
        poly_eq("ring.mul_associative", &(&a * &b) * &c, &a * &(&b * &c)),
        poly_eq("ring.distributive", &a * &(&b + &c), &(&a * &b) + &(&a * &c)),
        poly_eq("ring.additive_inverse", &a - &a, P::zero()),
        poly_eq("ring.leibniz", (&a * &b).diff(v), &(&a.diff(v) * &b) + &(&a * &b.diff(v))),
        poly_eq("ring.subst_homomorphism", (&a * &b).subst(&map), &a.subst(&map) * &b.subst(&map)),
        poly_eq("ring.subst_additive", (&a + &b).subst(&map), &a.subst(&map) + &b.subst(&map)),
    ])
}

fn exterior_trial(rng: &mut impl Rng, ctx: &Ctx, n: usize) -> Result<Vec<Outcome>> {
    let pair = ctx.pair(n);
    let frame = pair.correspondence();
    let vars = pair.base_vars();
    let shape = Shape { form_terms: 2, poly_terms: 2, ..Shape::default() };
    let size = frame.len();
    let (ka, kb) = (rng.gen_range(0..=size), rng.gen_range(0..=size));
    let a = random::homogeneous(rng, frame, ka, vars, shape);
    let b = random::homogeneous(rng, frame, kb, vars, shape);
    let c = random::form(rng, frame, vars, shape);
    let mut out = Vec::new();
    let ab = a.wedge(&b)?;
    out.push(expect_eq("exterior.graded_commutative", &ab, &b.wedge(&a)?.scale(&graded_sign(ka * kb))));
    out.push(expect_eq("exterior.associative", &ab.wedge(&c)?, &a.wedge(&b.wedge(&c)?)?));

    let e1 = random::homogeneous(rng, frame, 2, vars, shape);
    let e2 = random::homogeneous(rng, frame, 2, vars, shape);
    let sum = &e1 + &e2;
    if !sum.is_zero() && !e1.is_zero() && !e2.is_zero() {
        out.push(expect_eq("exterior.exp_additive", &sum.exp_nilpotent()?, &e1.exp_nilpotent()?.wedge(&e2.exp_nilpotent()?)?));
    }

    let fiber = frame.class_mask(GenClass::ComplexFiber);
    let rest = frame.full_mask() & !fiber;
    let base_only = random::form_from(rng, frame, vars, shape, |r| Some(random::any_sub_mask(r, rest)));
    out.push(expect_eq(
        "exterior.projection_formula",
        &a.wedge(&base_only)?.pushforward(GenClass::ComplexFiber)?,
        &a.pushforward(GenClass::ComplexFiber)?.wedge(&base_only)?,
    ));

    let split = (GenClass::SymplecticFiber, GenClass::Base);
    let x = pair.x();
    let k = rng.gen_range(0..=2 * n);
    let h = random::homogeneous(rng, x, k, vars, shape);
    let mut total = Form::zero(x);
    for p in 0..=k {
        total = &total + &h.bidegree_project(p, k - p, split);
    }
    out.push(expect_eq("exterior.bidegree_decomposition", &total, &h));

    let i = rng.gen_range(0..size);
    let lhs = ab.contract(i);
    let rhs = &a.contract(i).wedge(&b)? + &a.wedge(&b.contract(i))?.scale(&graded_sign(ka));
    out.push(expect_eq("exterior.contract_antiderivation", &lhs, &rhs));
    Ok(out)
}

fn operators_trial(rng: &mut impl Rng, ctx: &Ctx, n: usize) -> Result<Vec<Outcome>> {
    let pair = ctx.pair(n);
    let vars = pair.base_vars();
    let shape = Shape::default();
    let x = pair.x();
    let (ka, kb) = (rng.gen_range(0..=2 * n), rng.gen_range(0..=2 * n));
    let a = random::homogeneous(rng, x, ka, vars, shape);
    let b = random::homogeneous(rng, x, kb, vars, shape);
    let da = exterior_d(&a);
    let mut out = vec![expect_zero("operators.d_squared", &exterior_d(&da))];
    let lhs = exterior_d(&a.wedge(&b)?);
    let rhs = &da.wedge(&b)? + &a.wedge(&exterior_d(&b))?.scale(&graded_sign(ka));
    out.push(expect_eq("operators.leibniz", &lhs, &rhs));

    let sd = pair.darboux();
    let dl = d_lambda(&a, sd)?;
    out.push(expect_zero("operators.dlambda_squared", &d_lambda(&dl, sd)?));
    out.push(expect_eq("operators.d_dlambda_anticommute", &exterior_d(&dl), &d_lambda(&da, sd)?.neg_form()));

    let basis = pair.complex();
    let z = random::form(rng, basis.frame(), vars, shape);
    let (dz, dbz) = (del(&z, basis)?, delbar(&z, basis)?);
    out.push(expect_eq("operators.del_plus_delbar", &(&dz + &dbz), &exterior_d(&z)));
    out.push(expect_zero("operators.del_squared", &del(&dz, basis)?));
    out.push(expect_zero("operators.delbar_squared", &delbar(&dbz, basis)?));
    out.push(expect_eq("operators.del_delbar_anticommute", &del(&dbz, basis)?, &delbar(&dz, basis)?.neg_form()));

    let switched = polarization_switch(&z, basis, pair.xcheck())?;
    out.push(expect_eq("operators.switch_roundtrip", &polarization_unswitch(&switched, basis)?, &z));
    out.push(expect("operators.switch_degree", switched.degrees() == z.degrees(), || format!("{z} ↦ {switched}")));
    let w = random::form(rng, pair.xcheck(), vars, shape);
    let back = polarization_unswitch(&w, basis)?;
    out.push(expect_eq("operators.switch_surjective", &polarization_switch(&back, basis, pair.xcheck())?, &w));

    // Frame forms with structure equations on the K = 3 nilmanifold.
    let nd = &ctx.nil;
    let fb = nd.frame_b();
    let ndvars = nd.pair().base_vars();
    let k = rng.gen_range(0..=fb.len());
    let f = random::homogeneous(rng, fb, k, ndvars, Shape { degree: 1, ..shape });
    let df = exterior_d(&f);
    out.push(expect_zero("operators.frame_d_squared", &exterior_d(&df)));
    let direct = exterior_d(&f.expand_fully());
    out.push(expect_eq("operators.frame_d_matches_coordinates", &df.expand_fully(), &direct));
    Ok(out)
}

fn involution_trial(rng: &mut impl Rng, ctx: &Ctx, n: usize) -> Result<Vec<Outcome>> {
    let pair = ctx.pair(n);
    let vars = pair.base_vars();
    let shape = Shape::default();
    let sign = involution_sign::<Q>(n);
    let z = random::form(rng, pair.complex().frame(), vars, shape);
    let fz = fm_forward(&z, pair)?;
    let mut out = vec![expect_eq("ft.involution_complex_side", &fm_backward(&fz, pair)?, &z.scale(&sign))];
    let w = random::form(rng, pair.x(), vars, shape);
    let bw = fm_backward(&w, pair)?;
    out.push(expect_eq("ft.involution_symplectic_side", &fm_forward(&bw, pair)?, &w.scale(&sign)));
    let (p, q) = (rng.gen_range(0..=n), rng.gen_range(0..=n));
    let h = random::bihomogeneous(rng, pair.complex().frame(), crate::calculus::ComplexBasis::<Q>::split(), (p, q), vars, shape);
    let legs = leg_counts(&fm_forward(&h, pair)?);
    out.push(expect("ft.leg_count", legs.iter().all(|l| *l == (n - p, q)), || format!("({p},{q}) ↦ {legs:?}")));
    Ok(out)
}

fn closed_form_trial(rng: &mut impl Rng, ctx: &Ctx, n: usize) -> Result<Vec<Outcome>> {
    let pair = ctx.pair(n);
    let vars = pair.base_vars();
    let z = random::form(rng, pair.complex().frame(), vars, Shape::default());
    let frame = z.frame().clone();
    let hol = frame.class_mask(GenClass::Holomorphic);
    let anti = frame.class_mask(GenClass::AntiHolomorphic);
    let slots = |m| bits(m).map(|b| frame.generator(b).slot).collect::<Vec<_>>();
    let mut expected = Form::zero(pair.x());
    for (m, c) in z.terms() {
        let mut i = slots(m & hol);
        let mut j = slots(m & anti);
        i.sort_unstable();
        j.sort_unstable();
        // `complex_monomial` orders dz before dz̄; frame order may differ.
        let reordered = crate::fourier::complex_monomial::<Q>(&i, &j, pair);
        let sign = Form::monomial(&frame, *m, P::one()).scalar_ratio(&reordered).ok_or(Error::Degenerate("monomial".into()))?;
        expected = &expected + &fm_monomial::<Q>(&i, &j, pair)?.mul_poly(c).scale(&sign);
    }
    let fz = fm_forward(&z, pair)?;
    Ok(vec![
        expect_eq("ft.closed_form", &fz, &expected),
        expect_eq("ft.fused_matches_naive", &fz, &fm_forward_naive(&z, pair)?),
    ])
}

fn intertwining_trial(rng: &mut impl Rng, ctx: &Ctx, n: usize) -> Result<Vec<Outcome>> {
    let pair = ctx.pair(n);
    let z = random::form(rng, pair.complex().frame(), pair.base_vars(), Shape::default());
    let it = check_intertwining(&z, pair)?;
    Ok(vec![
        expect_zero("ft.intertwines_delbar_d", &it.dbar_defect),
        expect_zero("ft.intertwines_del_dlambda", &it.del_defect),
    ])
}

/// `ω̌ = Σ μ_ij dθ̌_i∧dr_j` from a Hessian (closed) or an arbitrary symmetric `μ`.
fn random_omega_check(rng: &mut impl Rng, pair: &SemiflatPair<Q>, hessian: bool) -> Form {
    let n = pair.n();
    let vars = pair.base_vars();
    let mu: Vec<Vec<Poly>> = if hessian {
        let phi: Poly = random::poly(rng, vars, Shape { degree: 3, poly_terms: 4, ..Shape::default() }.real());
        let quad: Poly = vars.iter().map(|v| P::var(v).pow(2)).fold(P::zero(), |acc, t| &acc + &t);
        let phi = &phi + &quad.scale(&Q::from_ratio(1, 2));
        vars.iter().map(|a| vars.iter().map(|b| phi.diff(a).diff(b)).collect()).collect()
    } else {
        let mut m = random::symmetric_matrix(rng, n, vars, Shape { degree: 1, poly_terms: 2, ..Shape::default() });
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = &row[i] + &P::from_int(n as i64 + 1);
        }
        m
    };
    let xc = pair.xcheck();
    let mut w = Form::zero(xc);
    for (i, row) in mu.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            let a = Form::gen_at(xc, xc.slot_index(GenClass::ComplexFiber, i).unwrap());
            let b = Form::gen_at(xc, xc.slot_index(GenClass::Base, j).unwrap());
            w = &w + &a.wedge(&b).unwrap().mul_poly(c);
        }
    }
    w
}

fn real_part_trial(rng: &mut impl Rng, ctx: &Ctx, t: usize) -> Result<Vec<Outcome>> {
    let pair = ctx.pair(3);
    let wc = random_omega_check(rng, pair, t % 2 == 0);
    let mut s = match mirror_transform(&wc, pair) {
        Ok(m) => m.structure,
        Err(Error::Degenerate(_)) => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    // Rotate to phase 0: the transform has phase π for n = 3.
    if let OmegaSpec::Factored(f) = &mut s.big_omega {
        f[0] = f[0].neg_form();
    }
    s.polarization = Some(Polarization { fiber_class: GenClass::SymplecticFiber, phase: Phase::Zero });
    let om = s.omega_form()?;
    let split = (GenClass::SymplecticFiber, GenClass::Base);
    let p30 = om.bidegree_project(3, 0, split);
    let p12 = om.bidegree_project(1, 2, split);
    let re = real_part(&om)?;
    let closed_re = exterior_d(&re).is_zero();
    let closed_parts = exterior_d(&p30).is_zero() && exterior_d(&p12).is_zero();
    let iia = check_iia(&s)?;
    Ok(vec![
        expect_eq("real_part.projection_identity", &re, &(&p30 + &p12)),
        expect("real_part.equivalence", closed_re == closed_parts, || format!("d(Re Ω) = 0: {closed_re}; projections closed: {closed_parts}")),
        expect("real_part.special_phase", iia.status_of("iia.special_polarization") == Some(crate::report::Status::Pass), || {
            format!("{}", iia)
        }),
    ])
}

fn mirror_systems_trial(rng: &mut impl Rng, ctx: &Ctx, t: usize) -> Result<Vec<Outcome>> {
    let n = 2 + (t / 2) % 2;
    let pair = ctx.pair(n);
    let wc = random_omega_check(rng, pair, t % 2 == 0);
    let m = match mirror_transform(&wc, pair) {
        Ok(m) => m,
        Err(Error::Degenerate(_)) => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    let b = check_iib(&complex_side_structure(&wc, pair)?)?;
    let a = check_iia(&m.structure)?;
    let pass = |r: &Report, id: &str| r.status_of(id) == Some(crate::report::Status::Pass);
    let iib = pass(&b, "iib.holomorphic") && pass(&b, "iib.balanced");
    let iia = pass(&a, "iia.symplectic") && pass(&a, "iia.fiber_part_closed") && pass(&a, "iia.mixed_part_closed");
    Ok(vec![
        expect("mirror.factored_formula", m.factored_agrees, || m.transformed.to_string()),
        expect("mirror.iia_iff_iib", iia == iib, || format!("IIA {iia}, IIB {iib}\n{a}{b}")),
    ])
}

fn trial(suite: &str, ctx: &Ctx, seed: u64, t: usize) -> Result<Vec<Outcome>> {
    let mut rng = random::trial_rng(seed, t as u64);
    let rng = &mut rng;
    match suite {
        "ring" => ring_trial(rng, ctx),
        "exterior" => exterior_trial(rng, ctx, 1 + t % 3),
        "operators" => operators_trial(rng, ctx, 1 + t % 3),
        "ft-involution" => involution_trial(rng, ctx, 1 + t % 4),
        "closed-form" => closed_form_trial(rng, ctx, 1 + t % 4),
        "intertwining" => intertwining_trial(rng, ctx, 1 + t % 3),
        "real-part" => real_part_trial(rng, ctx, t),
        "mirror-systems" => mirror_systems_trial(rng, ctx, t),
        other => Err(Error::InvalidInput(format!("unknown suite `{other}` (known: {})", SUITES.join(", ")))),
    }
}

/// Run `trials` trials of `suite` from `seed`.
pub fn run(suite: &str, trials: usize, seed: u64) -> Result<Report> {
    if !SUITES.contains(&suite) {
        return Err(Error::InvalidInput(format!("unknown suite `{suite}` (known: {})", SUITES.join(", "))));
    }
    let ctx = Ctx { pairs: (1..=4).map(SemiflatPair::standard).collect::<Result<_>>()?, nil: NilData::build(3)? };
    let outcomes: Vec<Result<Vec<Outcome>>> = (0..trials).into_par_iter().map(|t| trial(suite, &ctx, seed, t)).collect();

    let mut order: Vec<&'static str> = Vec::new();
    let mut tally: BTreeMap<&'static str, (usize, usize, Option<String>)> = BTreeMap::new();
    for (t, res) in outcomes.into_iter().enumerate() {
        for (id, witness) in res.map_err(|e| Error::InvalidInput(format!("trial {t}: {e}")))? {
            let entry = tally.entry(id).or_insert_with(|| {
                order.push(id);
                (0, 0, None)
            });
            entry.0 += 1;
            if let Some(w) = witness {
                entry.1 += 1;
                entry.2.get_or_insert_with(|| format!("trial {t}: {w}"));
            }
        }
    }
    let mut r = Report::new(format!("campaign {suite}"));
    r.config("suite", suite);
    r.config("trials", trials);
    r.config("seed", seed);
    for id in order {
        let (count, failed, witness) = tally.remove(id).unwrap();
        if failed == 0 {
            r.pass(id, format!("holds on {count} trials"));
        } else {
            r.fail(id, format!("fails on {failed} of {count} trials"), witness);
        }
    }
    if r.checks.is_empty() {
        r.fail("campaign.nonempty", "no trial produced a check", None);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_small() {
        for suite in SUITES {
            let r = run(suite, 8, 11).unwrap();
            assert!(r.all_pass(), "{r}");
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run("ft-involution", 12, 5).unwrap().to_json();
        let b = run("ft-involution", 12, 5).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_suite() {
        assert!(run("nope", 1, 0).is_err());
    }
}
