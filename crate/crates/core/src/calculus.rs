//! Differential operators: `d`, Lefschetz operators, `d^Λ`, and Dolbeault
//! operators, plus the polarization switch between the complex frame and
//! the real coordinate frame of the complex side.

use std::sync::Arc;

use crate::coeffring::Poly;
use crate::error::{Error, Result};
use crate::exterior::{bit, d_terms, Form, FrameSpec, GenClass, Generator};
use crate::linalg::invert_poly_matrix;
use crate::scalar::Scalar;

/// Exterior derivative in the form's own frame.
pub fn exterior_d<S: Scalar>(a: &Form<S>) -> Form<S> {
    Form::from_terms(a.frame(), d_terms(a.frame(), a.terms()))
}

/// A nondegenerate 2-form `ω` together with its Poisson bivector.
///
/// With `ω = Σ_{i<j} W_ij g_i∧g_j` and `P = W⁻¹`, the dual Lefschetz
/// operator is `Λ = ½ Σ P^{ij} ι_i ι_j`. For Darboux forms this is
/// `Σ ι_{r_i} ι_{θ_i}`.
#[derive(Clone, Debug)]
pub struct SymplecticData<S: Scalar> {
    omega: Form<S>,
    poisson: Vec<Vec<Poly<S>>>,
}

impl<S: Scalar> SymplecticData<S> {
    pub fn new(omega: &Form<S>) -> Result<Self> {
        if !omega.is_homogeneous(2) || omega.is_zero() {
            return Err(Error::Degenerate("symplectic form must be a nonzero 2-form".into()));
        }
        let n = omega.frame().len();
        let mut w = vec![vec![Poly::zero(); n]; n];
        for (m, c) in omega.terms() {
            let i = m.trailing_zeros() as usize;
            let j = 63 - m.leading_zeros() as usize;
            w[i][j] = c.clone();
            w[j][i] = -c;
        }
        let poisson = invert_poly_matrix(&w)
            .ok_or_else(|| Error::Degenerate("ω is not invertible with constant pivots".into()))?;
        Ok(SymplecticData { omega: omega.clone(), poisson })
    }

    pub fn omega(&self) -> &Form<S> {
        &self.omega
    }

    pub fn poisson(&self) -> &[Vec<Poly<S>>] {
        &self.poisson
    }
}

/// `L(a) = ω ∧ a`.
pub fn lefschetz<S: Scalar>(a: &Form<S>, sd: &SymplecticData<S>) -> Result<Form<S>> {
    sd.omega.wedge(a)
}

/// Adjoint Lefschetz operator, lowering degree by two.
pub fn dual_lefschetz<S: Scalar>(a: &Form<S>, sd: &SymplecticData<S>) -> Result<Form<S>> {
    if !a.same_frame(&sd.omega) {
        return Err(Error::FrameMismatch {
            left: a.frame().name().to_string(),
            right: sd.omega.frame().name().to_string(),
        });
    }
    let n = a.frame().len();
    let mut acc = Form::zero(a.frame());
    let half = S::from_ratio(1, 2);
    for i in 0..n {
        let ai = a.contract(i);
        if ai.is_zero() {
            continue;
        }
        for j in 0..n {
            let p = &sd.poisson[i][j];
            if p.is_zero() {
                continue;
            }
            // ι_i ι_j a, with ι_j applied first.
            let t = a.contract(j).contract(i);
            if t.is_zero() {
                continue;
            }
            acc = &acc + &t.mul_poly(&p.scale(&half));
        }
    }
    Ok(acc)
}

/// `d^Λ = dΛ − Λd`.
pub fn d_lambda<S: Scalar>(a: &Form<S>, sd: &SymplecticData<S>) -> Result<Form<S>> {
    let x = exterior_d(&dual_lefschetz(a, sd)?);
    let y = dual_lefschetz(&exterior_d(a), sd)?;
    Ok(&x - &y)
}

/// A frame of holomorphic and antiholomorphic 1-forms over a real frame.
#[derive(Clone, Debug)]
pub struct ComplexBasis<S: Scalar> {
    frame: Arc<FrameSpec<S>>,
}

impl<S: Scalar> ComplexBasis<S> {
    /// Standard complex frame `dz_i = dθ_i + i dr_i` over a real frame
    /// whose fiber and base generators share slots.
    pub fn flat(real: &Arc<FrameSpec<S>>, fiber: GenClass) -> Result<Self> {
        let mut factors = Vec::new();
        let mut slot = 0;
        while let Some(t) = real.slot_index(fiber, slot) {
            let r = real
                .slot_index(GenClass::Base, slot)
                .ok_or_else(|| Error::WrongFrame(format!("no base generator for slot {slot}")))?;
            let theta = Form::gen_at(real, t);
            let dr = Form::gen_at(real, r).scale(&S::imag_unit());
            factors.push(&theta + &dr);
            slot += 1;
        }
        let labels: Vec<String> = (1..=factors.len()).map(|i| format!("dz_{i}")).collect();
        Self::from_factors(real, &factors, &labels)
    }

    /// Complex frame spanned by given `(1,0)`-forms and their conjugates.
    /// Holomorphic generators are labelled from `labels`, antiholomorphic
    /// ones get a combining bar (`dz_1` -> `dz̄_1`).
    pub fn from_factors(real: &Arc<FrameSpec<S>>, factors: &[Form<S>], labels: &[String]) -> Result<Self> {
        if factors.len() != labels.len() {
            return Err(Error::InvalidInput("one label per factor".into()));
        }
        let mut gens = Vec::new();
        let mut exps = Vec::new();
        for (i, (f, l)) in factors.iter().zip(labels).enumerate() {
            gens.push(Generator::new(l.clone(), GenClass::Holomorphic, i));
            exps.push(f.to_frame(real)?);
        }
        for (i, (f, l)) in factors.iter().zip(labels).enumerate() {
            gens.push(Generator::new(bar_label(l), GenClass::AntiHolomorphic, i));
            exps.push(f.to_frame(real)?.conj()?);
        }
        let frame = FrameSpec::framed(&format!("{}.complex", real.name()), real, gens, exps)?;
        Ok(ComplexBasis { frame })
    }

    pub fn frame(&self) -> &Arc<FrameSpec<S>> {
        &self.frame
    }

    pub fn split() -> (GenClass, GenClass) {
        (GenClass::Holomorphic, GenClass::AntiHolomorphic)
    }

    pub fn to_complex(&self, a: &Form<S>) -> Result<Form<S>> {
        a.to_frame(&self.frame)
    }

    pub fn project(&self, a: &Form<S>, p: usize, q: usize) -> Result<Form<S>> {
        Ok(self.to_complex(a)?.bidegree_project(p, q, Self::split()))
    }
}

/// Insert a combining macron after the first letter following `d`.
pub fn bar_label(l: &str) -> String {
    let mut chars: Vec<char> = l.chars().collect();
    let pos = if chars.first() == Some(&'d') && chars.len() > 1 { 2 } else { 1.min(chars.len()) };
    chars.insert(pos, '\u{304}');
    chars.into_iter().collect()
}

/// Which Dolbeault operator to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dolbeault {
    Del,
    DelBar,
}

/// `∂a` or `∂̄a`, returned in the complex frame. Inputs are converted into
/// the complex frame first; mixed-bidegree inputs are handled termwise.
pub fn dolbeault<S: Scalar>(a: &Form<S>, basis: &ComplexBasis<S>, which: Dolbeault) -> Result<Form<S>> {
    let z = basis.to_complex(a)?;
    let split = ComplexBasis::<S>::split();
    let bidegrees: std::collections::BTreeSet<(usize, usize)> =
        z.terms().keys().map(|m| z.bidegree_of(*m, split)).collect();
    let mut acc = Form::zero(basis.frame());
    for (p, q) in bidegrees {
        let d = exterior_d(&z.bidegree_project(p, q, split));
        let part = match which {
            Dolbeault::Del => d.bidegree_project(p + 1, q, split),
            Dolbeault::DelBar => d.bidegree_project(p, q + 1, split),
        };
        acc = &acc + &part;
    }
    Ok(acc)
}

pub fn del<S: Scalar>(a: &Form<S>, basis: &ComplexBasis<S>) -> Result<Form<S>> {
    dolbeault(a, basis, Dolbeault::Del)
}

pub fn delbar<S: Scalar>(a: &Form<S>, basis: &ComplexBasis<S>) -> Result<Form<S>> {
    dolbeault(a, basis, Dolbeault::DelBar)
}

/// Polarization switch `P`: the relabeling homomorphism sending `dz_i` to
/// the complex-side fiber generator of slot `i` and `dz̄_j` to the base
/// generator of slot `j`, landing in the real coordinate frame `real`.
pub fn polarization_switch<S: Scalar>(a: &Form<S>, basis: &ComplexBasis<S>, real: &Arc<FrameSpec<S>>) -> Result<Form<S>> {
    let z = basis.to_complex(a)?;
    let cf = z.frame().clone();
    let map: Vec<Option<usize>> = cf
        .generators()
        .iter()
        .map(|g| match g.class {
            GenClass::Holomorphic => real.slot_index(GenClass::ComplexFiber, g.slot),
            GenClass::AntiHolomorphic => real.slot_index(GenClass::Base, g.slot),
            _ => None,
        })
        .collect();
    z.map_generators(real, |i| map[i])
}

/// Inverse of [`polarization_switch`].
pub fn polarization_unswitch<S: Scalar>(a: &Form<S>, basis: &ComplexBasis<S>) -> Result<Form<S>> {
    let cf = basis.frame();
    let map: Vec<Option<usize>> = a
        .frame()
        .generators()
        .iter()
        .map(|g| match g.class {
            GenClass::ComplexFiber => cf.slot_index(GenClass::Holomorphic, g.slot),
            GenClass::Base => cf.slot_index(GenClass::AntiHolomorphic, g.slot),
            _ => None,
        })
        .collect();
    a.map_generators(cf, |i| map[i])
}

/// Pointwise monomial helper used by tests and callers building forms.
pub fn monomial_mask<S: Scalar>(frame: &FrameSpec<S>, labels: &[&str]) -> Result<u64> {
    let mut m = 0;
    for l in labels {
        let i = frame.index_of(l).ok_or_else(|| Error::UnknownGenerator(l.to_string()))?;
        m |= bit(i);
    }
    Ok(m)
}
