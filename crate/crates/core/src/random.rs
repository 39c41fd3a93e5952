//! Seeded random generators for polynomials and forms.
//!
//! Every trial of a campaign gets its own ChaCha stream derived from the
//! campaign seed and the trial index, so results do not depend on thread
//! scheduling.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeffring::Poly;
use crate::exterior::{bit, bits, Form, FrameSpec, GenClass, Mask};
use crate::scalar::Scalar;

/// The generator for trial `stream` of a campaign seeded with `seed`.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Size limits for generated objects.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    /// Maximal total degree of coefficient polynomials.
    pub degree: u32,
    pub poly_terms: usize,
    pub form_terms: usize,
    /// Allow non-real scalars.
    pub complex: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { degree: 2, poly_terms: 3, form_terms: 3, complex: true }
    }
}

impl Shape {
    pub fn real(self) -> Self {
        Shape { complex: false, ..self }
    }

    pub fn constant(self) -> Self {
        Shape { degree: 0, poly_terms: 1, ..self }
    }
}

fn small_rational<S: Scalar, R: Rng>(rng: &mut R) -> S {
    let num = loop {
        let v = rng.gen_range(-5i64..=5);
        if v != 0 {
            break v;
        }
    };
    S::from_ratio(num, rng.gen_range(1i64..=3))
}

/// A nonzero scalar with small numerator and denominator.
pub fn scalar<S: Scalar, R: Rng>(rng: &mut R, complex: bool) -> S {
    let re = small_rational::<S, R>(rng);
    if complex && rng.gen_bool(0.5) {
        let im = small_rational::<S, R>(rng);
        if rng.gen_bool(0.3) {
            return im * S::imag_unit();
        }
        return re + im * S::imag_unit();
    }
    re
}

/// A random polynomial in `vars` of total degree at most `shape.degree`.
pub fn poly<S: Scalar, R: Rng>(rng: &mut R, vars: &[String], shape: Shape) -> Poly<S> {
    let mut p = Poly::zero();
    let terms = rng.gen_range(1..=shape.poly_terms.max(1));
    for _ in 0..terms {
        let deg = if vars.is_empty() { 0 } else { rng.gen_range(0..=shape.degree) };
        let mut m = Poly::constant(scalar(rng, shape.complex));
        for _ in 0..deg {
            m = m.mul_poly(&Poly::var(vars.choose(rng).unwrap()));
        }
        p = p.add_poly(&m);
    }
    p
}

/// A random subset of the generators in `mask` of the given size.
pub fn sub_mask<R: Rng>(rng: &mut R, mask: Mask, k: usize) -> Option<Mask> {
    let idx: Vec<usize> = bits(mask).collect();
    if k > idx.len() {
        return None;
    }
    Some(idx.choose_multiple(rng, k).fold(0, |m, i| m | bit(*i)))
}

/// A random subset of the generators in `mask`, each included with probability 1/2.
pub fn any_sub_mask<R: Rng>(rng: &mut R, mask: Mask) -> Mask {
    bits(mask).filter(|_| rng.gen_bool(0.5)).fold(0, |m, i| m | bit(i))
}

/// A form whose monomials are drawn by `pick`.
pub fn form_from<S: Scalar, R: Rng>(
    rng: &mut R,
    frame: &Arc<FrameSpec<S>>,
    vars: &[String],
    shape: Shape,
    mut pick: impl FnMut(&mut R) -> Option<Mask>,
) -> Form<S> {
    let mut acc = Form::zero(frame);
    let terms = rng.gen_range(1..=shape.form_terms.max(1));
    for _ in 0..terms {
        if let Some(m) = pick(rng) {
            let c = poly(rng, vars, shape);
            acc = &acc + &Form::monomial(frame, m, c);
        }
    }
    acc
}

/// A form of mixed degree.
pub fn form<S: Scalar, R: Rng>(rng: &mut R, frame: &Arc<FrameSpec<S>>, vars: &[String], shape: Shape) -> Form<S> {
    let full = frame.full_mask();
    form_from(rng, frame, vars, shape, |r| Some(any_sub_mask(r, full)))
}

/// A homogeneous form of degree `k` (zero if `k` exceeds the frame size).
pub fn homogeneous<S: Scalar, R: Rng>(rng: &mut R, frame: &Arc<FrameSpec<S>>, k: usize, vars: &[String], shape: Shape) -> Form<S> {
    let full = frame.full_mask();
    form_from(rng, frame, vars, shape, |r| sub_mask(r, full, k))
}

/// A form of bidegree `(p, q)` with respect to `split`.
pub fn bihomogeneous<S: Scalar, R: Rng>(
    rng: &mut R,
    frame: &Arc<FrameSpec<S>>,
    split: (GenClass, GenClass),
    (p, q): (usize, usize),
    vars: &[String],
    shape: Shape,
) -> Form<S> {
    let a = frame.class_mask(split.0);
    let b = frame.class_mask(split.1);
    form_from(rng, frame, vars, shape, |r| Some(sub_mask(r, a, p)? | sub_mask(r, b, q)?))
}

/// A symmetric matrix of polynomials with real coefficients.
pub fn symmetric_matrix<S: Scalar, R: Rng>(rng: &mut R, n: usize, vars: &[String], shape: Shape) -> Vec<Vec<Poly<S>>> {
    let mut m = vec![vec![Poly::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let p = poly(rng, vars, shape.real());
            m[i][j] = p.clone();
            m[j][i] = p;
        }
    }
    m
}

/// A random substitution `v ↦ v + p_v` for a subset of `vars`.
pub fn shift_substitution<S: Scalar, R: Rng>(rng: &mut R, vars: &[String], shape: Shape) -> BTreeMap<String, Poly<S>> {
    let mut map = BTreeMap::new();
    for v in vars {
        if rng.gen_bool(0.5) {
            map.insert(v.clone(), Poly::var(v).add_poly(&poly(rng, vars, shape)));
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::SemiflatPair;
    use crate::Q;

    #[test]
    fn streams_are_reproducible() {
        let pair = SemiflatPair::<Q>::standard(2).unwrap();
        let draw = |s| {
            let mut rng = trial_rng(7, s);
            form::<Q, _>(&mut rng, pair.x(), pair.base_vars(), Shape::default()).to_string()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }

    #[test]
    fn bidegrees_are_respected() {
        let pair = SemiflatPair::<Q>::standard(3).unwrap();
        let split = (GenClass::SymplecticFiber, GenClass::Base);
        let mut rng = trial_rng(1, 0);
        for _ in 0..20 {
            let f = bihomogeneous::<Q, _>(&mut rng, pair.x(), split, (2, 1), pair.base_vars(), Shape::default());
            assert_eq!(f.bidegree_project(2, 1, split), f);
            assert!(!f.is_zero());
        }
        let mut rng = trial_rng(1, 1);
        assert!(homogeneous::<Q, _>(&mut rng, pair.x(), 7, pair.base_vars(), Shape::default()).is_zero());
    }
}
