//! Fourier-Mukai transform of torus-invariant forms between the symplectic
//! side `X` (fiber angles `θ`) and the complex side `X̌` (fiber angles `θ̌`,
//! complex coordinates `z = θ̌ + i r`).
//!
//! Forward: `FT(φ̌) = π_*(π̌^*(P φ̌) ∧ exp(Σ dθ̌_i∧dθ_i))`, integrating over
//! the `θ̌` fibers. Backward: `FT(φ) = P⁻¹ π̌_*(π^*φ ∧ exp(−Σ dθ̌_i∧dθ_i))`.
//! Both live on a correspondence frame holding all three generator classes.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::calculus::{
    d_lambda, del, delbar, exterior_d, polarization_switch, polarization_unswitch, ComplexBasis, SymplecticData,
};
use crate::error::{Error, Result};
use crate::exterior::{add_signed, bit, degree, wedge_sign, Form, FrameSpec, GenClass, Generator, Terms};
use crate::scalar::{sign_scalar, Scalar};

/// Labels for the coordinate generators of a semi-flat pair.
#[derive(Clone, Debug)]
pub struct PairLabels {
    /// Fiber differentials on the symplectic side.
    pub symplectic_fiber: Vec<String>,
    /// Fiber differentials on the complex side.
    pub complex_fiber: Vec<String>,
    /// Base differentials (`d` + coordinate name).
    pub base: Vec<String>,
    /// Holomorphic differentials on the complex side.
    pub holomorphic: Vec<String>,
}

impl PairLabels {
    pub fn standard(n: usize) -> Self {
        PairLabels {
            symplectic_fiber: (1..=n).map(|i| format!("dθ_{i}")).collect(),
            complex_fiber: (1..=n).map(|i| format!("dθ̌_{i}")).collect(),
            base: (1..=n).map(|i| format!("dr_{i}")).collect(),
            holomorphic: (1..=n).map(|i| format!("dz_{i}")).collect(),
        }
    }
}

/// The two dual torus bundles over a common base, plus the correspondence
/// space and the exponentiated universal curvature.
#[derive(Clone, Debug)]
pub struct SemiflatPair<S: Scalar> {
    n: usize,
    x: Arc<FrameSpec<S>>,
    xcheck: Arc<FrameSpec<S>>,
    complex: ComplexBasis<S>,
    corr: Arc<FrameSpec<S>>,
    curvature: Form<S>,
    exp_plus: Form<S>,
    exp_minus: Form<S>,
    darboux: SymplecticData<S>,
}

fn gens(labels: &[String], class: GenClass) -> Vec<Generator> {
    labels.iter().enumerate().map(|(i, l)| Generator::new(l.clone(), class, i)).collect()
}

impl<S: Scalar> SemiflatPair<S> {
    pub fn standard(n: usize) -> Result<Self> {
        Self::with_labels(&PairLabels::standard(n))
    }

    pub fn with_labels(labels: &PairLabels) -> Result<Self> {
        let n = labels.base.len();
        if n == 0 || labels.symplectic_fiber.len() != n || labels.complex_fiber.len() != n || labels.holomorphic.len() != n {
            return Err(Error::InvalidInput("pair needs n ≥ 1 labels of every kind".into()));
        }
        if 3 * n > crate::exterior::MAX_GENERATORS {
            return Err(Error::TooManyGenerators(3 * n));
        }
        let sy = gens(&labels.symplectic_fiber, GenClass::SymplecticFiber);
        let cx = gens(&labels.complex_fiber, GenClass::ComplexFiber);
        let base = gens(&labels.base, GenClass::Base);
        let x = FrameSpec::coordinates("X", sy.iter().chain(&base).cloned().collect())?;
        let xcheck = FrameSpec::coordinates("Xcheck", cx.iter().chain(&base).cloned().collect())?;
        let corr = FrameSpec::coordinates("XxX", sy.iter().chain(&cx).chain(&base).cloned().collect())?;
        let mut factors = Vec::new();
        for i in 0..n {
            let t = Form::gen_at(&xcheck, i);
            let r = Form::gen_at(&xcheck, n + i).scale(&S::imag_unit());
            factors.push(&t + &r);
        }
        let complex = ComplexBasis::from_factors(&xcheck, &factors, &labels.holomorphic)?;
        let mut half_curv = Form::zero(&corr);
        for i in 0..n {
            let t = Form::gen_at(&corr, n + i).wedge(&Form::gen_at(&corr, i))?;
            half_curv = &half_curv + &t;
        }
        let curvature = half_curv.scale(&(S::from_int(2) * S::imag_unit()));
        let exp_plus = half_curv.exp_nilpotent()?;
        let exp_minus = half_curv.neg_form().exp_nilpotent()?;
        let mut omega = Form::zero(&x);
        for i in 0..n {
            omega = &omega + &Form::gen_at(&x, i).wedge(&Form::gen_at(&x, n + i))?;
        }
        let darboux = SymplecticData::new(&omega)?;
        Ok(SemiflatPair { n, x, xcheck, complex, corr, curvature, exp_plus, exp_minus, darboux })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Symplectic side coordinates `[dθ…, dr…]`.
    pub fn x(&self) -> &Arc<FrameSpec<S>> {
        &self.x
    }

    /// Complex side real coordinates `[dθ̌…, dr…]`.
    pub fn xcheck(&self) -> &Arc<FrameSpec<S>> {
        &self.xcheck
    }

    /// Complex side `[dz…, dz̄…]`.
    pub fn complex(&self) -> &ComplexBasis<S> {
        &self.complex
    }

    pub fn correspondence(&self) -> &Arc<FrameSpec<S>> {
        &self.corr
    }

    /// `𝐅 = 2i Σ dθ̌_i∧dθ_i` on the correspondence space.
    pub fn curvature(&self) -> &Form<S> {
        &self.curvature
    }

    /// Darboux form `Σ dθ_i∧dr_i` on `X` with its Poisson data.
    pub fn darboux(&self) -> &SymplecticData<S> {
        &self.darboux
    }

    /// Base coordinate names.
    pub fn base_vars(&self) -> &[String] {
        self.x.base_vars()
    }

    fn check_invariant(&self, a: &Form<S>) -> Result<()> {
        let fiber: BTreeSet<String> = self.corr.fiber_vars().into_iter().collect();
        for v in a.used_vars() {
            if fiber.contains(&v) {
                return Err(Error::FiberDependent(v));
            }
        }
        Ok(())
    }

    fn complex_side_input(&self, a: &Form<S>) -> Result<Form<S>> {
        let f = a.frame();
        if f.root().same_as(&self.xcheck) {
            return self.complex.to_complex(a);
        }
        Err(Error::WrongFrame(format!(
            "forward transform expects a form on the complex side, got frame `{}`",
            f.name()
        )))
    }
}

/// Wedge with `b` and integrate along all generators of `class`, without
/// building the intermediate product.
fn wedge_pushforward<S: Scalar>(a: &Form<S>, b: &Form<S>, class: GenClass) -> Form<S> {
    let fiber = a.frame().class_mask(class);
    let mut acc = Terms::new();
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            if ma & mb != 0 || (ma | mb) & fiber != fiber {
                continue;
            }
            let m = ma | mb;
            let rest = m ^ fiber;
            let neg = wedge_sign(*ma, *mb) ^ wedge_sign(fiber, rest);
            add_signed(&mut acc, rest, &(ca * cb), neg);
        }
    }
    Form::from_terms(a.frame(), acc)
}

/// Forward transform of a complex-side form (given in `dz` or real
/// coordinates) to a form on `X`.
pub fn fm_forward<S: Scalar>(a: &Form<S>, pair: &SemiflatPair<S>) -> Result<Form<S>> {
    pair.check_invariant(a)?;
    let z = pair.complex_side_input(a)?;
    let lifted = polarization_switch(&z, &pair.complex, &pair.xcheck)?.transfer(&pair.corr)?;
    wedge_pushforward(&lifted, &pair.exp_plus, GenClass::ComplexFiber).transfer(&pair.x)
}

/// Same as [`fm_forward`] but forming the full product before integrating.
pub fn fm_forward_naive<S: Scalar>(a: &Form<S>, pair: &SemiflatPair<S>) -> Result<Form<S>> {
    pair.check_invariant(a)?;
    let z = pair.complex_side_input(a)?;
    let lifted = polarization_switch(&z, &pair.complex, &pair.xcheck)?.transfer(&pair.corr)?;
    lifted.wedge(&pair.exp_plus)?.pushforward(GenClass::ComplexFiber)?.transfer(&pair.x)
}

/// Backward transform of a form on `X`, returned in the `dz` frame.
pub fn fm_backward<S: Scalar>(a: &Form<S>, pair: &SemiflatPair<S>) -> Result<Form<S>> {
    pair.check_invariant(a)?;
    if !a.frame().root().same_as(&pair.x) {
        return Err(Error::WrongFrame(format!(
            "backward transform expects a form on X, got frame `{}`",
            a.frame().name()
        )));
    }
    let lifted = a.to_frame(&pair.x)?.transfer(&pair.corr)?;
    let pushed = wedge_pushforward(&lifted, &pair.exp_minus, GenClass::SymplecticFiber).transfer(&pair.xcheck)?;
    polarization_unswitch(&pushed, &pair.complex)
}

/// Sign of the permutation sorting the concatenation `(I, I^c)`.
pub fn shuffle_sign(i: &[usize], n: usize) -> bool {
    let set: BTreeSet<usize> = i.iter().copied().collect();
    let mut inversions = 0;
    for &a in i {
        inversions += (0..n).filter(|b| !set.contains(b) && *b < a).count();
    }
    inversions % 2 == 1
}

/// Closed-form image of `dz_I∧dz̄_J` (0-based index sets, ascending):
/// `(−1)^{(n−p)(n−p−1)/2} sign(I, I^c) dθ_{I^c}∧dr_J`.
pub fn fm_monomial<S: Scalar>(i: &[usize], j: &[usize], pair: &SemiflatPair<S>) -> Result<Form<S>> {
    let n = pair.n;
    if i.iter().chain(j).any(|k| *k >= n) {
        return Err(Error::InvalidInput("index out of range".into()));
    }
    let p = i.len() as i64;
    let k = n as i64 - p;
    let mut sign: S = sign_scalar(k * (k - 1) / 2);
    if shuffle_sign(i, n) {
        sign = -sign;
    }
    let set: BTreeSet<usize> = i.iter().copied().collect();
    let mut factors = Vec::new();
    for c in (0..n).filter(|c| !set.contains(c)) {
        factors.push(Form::gen_at(&pair.x, pair.x.slot_index(GenClass::SymplecticFiber, c).unwrap()));
    }
    for &c in j {
        factors.push(Form::gen_at(&pair.x, pair.x.slot_index(GenClass::Base, c).unwrap()));
    }
    Ok(Form::wedge_all(&pair.x, &factors)?.scale(&sign))
}

/// The basis monomial `dz_I∧dz̄_J` in the complex frame.
pub fn complex_monomial<S: Scalar>(i: &[usize], j: &[usize], pair: &SemiflatPair<S>) -> Form<S> {
    let f = pair.complex.frame();
    let mut m = 0;
    for &a in i {
        m |= bit(f.slot_index(GenClass::Holomorphic, a).unwrap());
    }
    for &b in j {
        m |= bit(f.slot_index(GenClass::AntiHolomorphic, b).unwrap());
    }
    Form::monomial(f, m, crate::coeffring::Poly::one())
}

/// `(−1)^{n(n−1)/2}`.
pub fn involution_sign<S: Scalar>(n: usize) -> S {
    let n = n as i64;
    sign_scalar(n * (n - 1) / 2)
}

/// Fiber and base leg counts `(θ-legs, r-legs)` of every term of a form on `X`.
pub fn leg_counts<S: Scalar>(a: &Form<S>) -> BTreeSet<(usize, usize)> {
    let f = a.frame().class_mask(GenClass::SymplecticFiber);
    let b = a.frame().class_mask(GenClass::Base);
    a.terms().keys().map(|m| (degree(m & f), degree(m & b))).collect()
}

/// Outcome of comparing both sides of the two intertwining identities.
#[derive(Clone, Debug)]
pub struct Intertwining<S: Scalar> {
    /// `FT(∂̄a) − (−1)^n (i/2) d FT(a)`.
    pub dbar_defect: Form<S>,
    /// `FT(∂a) − (−1)^n (i/2) d^Λ FT(a)`.
    pub del_defect: Form<S>,
}

impl<S: Scalar> Intertwining<S> {
    pub fn holds(&self) -> bool {
        self.dbar_defect.is_zero() && self.del_defect.is_zero()
    }
}

pub fn check_intertwining<S: Scalar>(a: &Form<S>, pair: &SemiflatPair<S>) -> Result<Intertwining<S>> {
    let n = pair.n as i64;
    let c = sign_scalar::<S>(n) * S::imag_unit() * S::from_ratio(1, 2);
    let fa = fm_forward(a, pair)?;
    let lhs1 = fm_forward(&delbar(a, &pair.complex)?, pair)?;
    let rhs1 = exterior_d(&fa).scale(&c);
    let lhs2 = fm_forward(&del(a, &pair.complex)?, pair)?;
    let rhs2 = d_lambda(&fa, &pair.darboux)?.scale(&c);
    Ok(Intertwining { dbar_defect: &lhs1 - &rhs1, del_defect: &lhs2 - &rhs2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::Poly;
    use crate::scalar::{q, qi, GaussianRational};

    type Pair = SemiflatPair<GaussianRational>;
    type F = Form<GaussianRational>;

    #[test]
    fn transform_of_one() {
        let pair = Pair::standard(3).unwrap();
        let one = F::one(pair.complex().frame());
        let t = fm_forward(&one, &pair).unwrap();
        let expected = F::gens(pair.x(), &["dθ_1", "dθ_2", "dθ_3"]).unwrap().neg_form();
        assert_eq!(t, expected);
        // Involution sign for n = 3 is −1.
        assert_eq!(fm_backward(&expected, &pair).unwrap(), one.neg_form());
    }

    #[test]
    fn transform_of_dz1() {
        let pair = Pair::standard(3).unwrap();
        let a = F::gen(pair.complex().frame(), "dz_1").unwrap();
        let expected = F::gens(pair.x(), &["dθ_2", "dθ_3"]).unwrap().neg_form();
        assert_eq!(fm_forward(&a, &pair).unwrap(), expected);
        assert_eq!(fm_monomial(&[0], &[], &pair).unwrap(), expected);
    }

    #[test]
    fn closed_form_base_leg() {
        let pair = Pair::standard(3).unwrap();
        let expected = F::gens(pair.x(), &["dθ_1", "dθ_2", "dθ_3", "dr_1"]).unwrap().neg_form();
        assert_eq!(fm_monomial(&[], &[0], &pair).unwrap(), expected);
        let a = complex_monomial(&[], &[0], &pair);
        assert_eq!(fm_forward(&a, &pair).unwrap(), expected);
    }

    #[test]
    fn flat_omega_transform() {
        let pair = Pair::standard(2).unwrap();
        let xc = pair.xcheck();
        let w = &F::gens(xc, &["dθ̌_1", "dr_1"]).unwrap() + &F::gens(xc, &["dθ̌_2", "dr_2"]).unwrap();
        let e = w.scale(&q(2, 1)).exp_nilpotent().unwrap();
        let x = pair.x();
        let eta1 = &F::gen(x, "dθ_1").unwrap() + &F::gen(x, "dr_1").unwrap().scale(&qi(0, 1));
        let eta2 = &F::gen(x, "dθ_2").unwrap() + &F::gen(x, "dr_2").unwrap().scale(&qi(0, 1));
        let expected = eta1.wedge(&eta2).unwrap().neg_form();
        assert_eq!(fm_forward(&e, &pair).unwrap(), expected);
    }

    #[test]
    fn fused_matches_naive() {
        let pair = Pair::standard(2).unwrap();
        let r1 = Poly::<GaussianRational>::var("r_1");
        let a = F::gens(pair.complex().frame(), &["dz_2", "dz̄_1"]).unwrap().mul_poly(&r1);
        assert_eq!(fm_forward(&a, &pair).unwrap(), fm_forward_naive(&a, &pair).unwrap());
    }

    #[test]
    fn rejects_fiber_dependence() {
        let pair = Pair::standard(1).unwrap();
        let a = F::scalar(pair.xcheck(), Poly::var("θ̌_1"));
        assert!(matches!(fm_forward(&a, &pair), Err(Error::FiberDependent(_))));
        let b = F::one(pair.x());
        assert!(matches!(fm_forward(&b, &pair), Err(Error::WrongFrame(_))));
    }

    #[test]
    fn intertwining_n1() {
        let pair = Pair::standard(1).unwrap();
        let r1 = Poly::<GaussianRational>::var("r_1");
        let a = F::gen(pair.complex().frame(), "dz̄_1").unwrap().mul_poly(&r1.pow(3));
        assert!(check_intertwining(&a, &pair).unwrap().holds());
        let b = F::scalar(pair.xcheck(), &r1.pow(2) + &r1);
        assert!(check_intertwining(&b, &pair).unwrap().holds());
    }

    #[test]
    fn shuffle_signs() {
        assert!(!shuffle_sign(&[0, 1, 2], 3));
        assert!(shuffle_sign(&[1], 3));
        assert!(!shuffle_sign(&[2], 3));
        assert!(!shuffle_sign(&[], 3));
    }
}
