//! Differential forms with polynomial coefficients over ordered frames.
//!
//! A [`FrameSpec`] is an ordered list of 1-form generators. A coordinate
//! frame has generators that are differentials of coordinates (base
//! coordinates `r` and fiber angles); a derived frame carries expansions of
//! its generators in a parent frame together with the induced structure
//! equations, so exterior derivatives and frame changes stay exact.
//!
//! Monomials are `u64` bitmasks over generator positions; the sign of a
//! wedge product is the parity of the inversions needed to sort the
//! concatenated generator list.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coeffring::Poly;
use crate::error::{Error, Result};
use crate::linalg::invert_poly_matrix;
use crate::scalar::Scalar;

pub type Mask = u64;
pub type Terms<S> = BTreeMap<Mask, Poly<S>>;

pub const MAX_GENERATORS: usize = 64;

/// Role of a generator in a torus fibration over a base.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GenClass {
    /// Fiber angles on the symplectic side.
    SymplecticFiber,
    /// Fiber angles on the complex side.
    ComplexFiber,
    /// Base coordinate differentials.
    Base,
    /// Holomorphic 1-forms.
    Holomorphic,
    /// Antiholomorphic 1-forms.
    AntiHolomorphic,
}

impl GenClass {
    pub fn as_str(self) -> &'static str {
        match self {
            GenClass::SymplecticFiber => "symplectic_fiber",
            GenClass::ComplexFiber => "complex_fiber",
            GenClass::Base => "base",
            GenClass::Holomorphic => "holomorphic",
            GenClass::AntiHolomorphic => "antiholomorphic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "symplectic_fiber" => GenClass::SymplecticFiber,
            "complex_fiber" => GenClass::ComplexFiber,
            "base" => GenClass::Base,
            "holomorphic" => GenClass::Holomorphic,
            "antiholomorphic" => GenClass::AntiHolomorphic,
            _ => return None,
        })
    }

    pub fn is_fiber(self) -> bool {
        matches!(self, GenClass::SymplecticFiber | GenClass::ComplexFiber)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    pub class: GenClass,
    /// Index pairing generators across classes (`dθ_i`, `dr_i`, `dz_i` share slot `i`).
    pub slot: usize,
}

impl Generator {
    pub fn new(label: impl Into<String>, class: GenClass, slot: usize) -> Self {
        Generator { label: label.into(), class, slot }
    }

    /// Coordinate name for a coordinate differential (`dr_1` -> `r_1`).
    pub fn coordinate(&self) -> Option<String> {
        self.label.strip_prefix('d').map(str::to_string)
    }
}

#[derive(Clone, Debug)]
struct FrameLink<S: Scalar> {
    parent: Arc<FrameSpec<S>>,
    /// Each generator of this frame as terms in the parent.
    expansion: Vec<Terms<S>>,
    /// Each parent generator as terms in this frame.
    inverse: Vec<Terms<S>>,
}

#[derive(Clone, Debug)]
pub struct FrameSpec<S: Scalar> {
    name: String,
    generators: Vec<Generator>,
    base_vars: Vec<String>,
    link: Option<FrameLink<S>>,
    /// `d` of each generator, in this frame.
    structure: Vec<Terms<S>>,
    /// `d` of each base coordinate, in this frame.
    base_diff: Vec<Terms<S>>,
    conj_closed: bool,
}

pub fn bit(i: usize) -> Mask {
    1u64 << i
}

pub fn bits(mut m: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

pub fn degree(m: Mask) -> usize {
    m.count_ones() as usize
}

/// Whether `a ∧ b` (as sorted monomials, disjoint) picks up a minus sign
/// when sorted into a single monomial.
pub fn wedge_sign(a: Mask, b: Mask) -> bool {
    let mut count = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        count += if j >= 63 { 0 } else { (a >> (j + 1)).count_ones() };
    }
    count % 2 == 1
}

/// Product of two monomials: `None` if they share a generator.
pub fn mono_wedge(a: Mask, b: Mask) -> Option<(Mask, bool)> {
    if a & b != 0 {
        return None;
    }
    Some((a | b, wedge_sign(a, b)))
}

pub(crate) fn add_term<S: Scalar>(acc: &mut Terms<S>, m: Mask, c: Poly<S>) {
    if c.is_zero() {
        return;
    }
    match acc.entry(m) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let sum = o.get() + &c;
            if sum.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = sum;
            }
        }
    }
}

pub(crate) fn add_signed<S: Scalar>(acc: &mut Terms<S>, m: Mask, c: &Poly<S>, negative: bool) {
    add_term(acc, m, if negative { -c } else { c.clone() });
}

pub fn terms_wedge<S: Scalar>(a: &Terms<S>, b: &Terms<S>) -> Terms<S> {
    let mut acc = Terms::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            if let Some((m, neg)) = mono_wedge(*ma, *mb) {
                add_signed(&mut acc, m, &(ca * cb), neg);
            }
        }
    }
    acc
}

fn terms_scale<S: Scalar>(a: &Terms<S>, p: &Poly<S>) -> Terms<S> {
    if p.is_zero() {
        return Terms::new();
    }
    a.iter().map(|(m, c)| (*m, c * p)).filter(|(_, c)| !c.is_zero()).collect()
}

fn terms_add<S: Scalar>(a: &Terms<S>, b: &Terms<S>) -> Terms<S> {
    let mut acc = a.clone();
    for (m, c) in b {
        add_term(&mut acc, *m, c.clone());
    }
    acc
}

/// Image of a monomial under an algebra map given by generator images,
/// with memoization on the mask.
struct ImageCache<'a, S: Scalar> {
    images: &'a [Terms<S>],
    memo: HashMap<Mask, Terms<S>>,
}

impl<'a, S: Scalar> ImageCache<'a, S> {
    fn new(images: &'a [Terms<S>]) -> Self {
        ImageCache { images, memo: HashMap::new() }
    }

    fn image(&mut self, m: Mask) -> Terms<S> {
        if m == 0 {
            let mut t = Terms::new();
            t.insert(0, Poly::one());
            return t;
        }
        if let Some(t) = self.memo.get(&m) {
            return t.clone();
        }
        let top = 63 - m.leading_zeros() as usize;
        let rest = self.image(m & !bit(top));
        let t = terms_wedge(&rest, &self.images[top]);
        self.memo.insert(m, t.clone());
        t
    }
}

fn substitute_terms<S: Scalar>(
    terms: &Terms<S>,
    images: &[Terms<S>],
    coeff: &dyn Fn(&Poly<S>) -> Poly<S>,
) -> Terms<S> {
    let mut cache = ImageCache::new(images);
    let mut acc = Terms::new();
    for (m, c) in terms {
        let c2 = coeff(c);
        if c2.is_zero() {
            continue;
        }
        for (m2, c3) in cache.image(*m) {
            add_term(&mut acc, m2, &c3 * &c2);
        }
    }
    acc
}

/// Exterior derivative of raw terms over a frame.
///
/// Variables that are not base coordinates of the frame are treated as
/// constant parameters.
pub(crate) fn d_terms<S: Scalar>(frame: &FrameSpec<S>, terms: &Terms<S>) -> Terms<S> {
    let mut acc = Terms::new();
    let has_structure = frame.structure.iter().any(|s| !s.is_empty());
    for (m, g) in terms {
        for (j, var) in frame.base_vars.iter().enumerate() {
            let dg = g.diff(var);
            if dg.is_zero() {
                continue;
            }
            for (bm, bc) in &frame.base_diff[j] {
                if let Some((mm, neg)) = mono_wedge(*bm, *m) {
                    add_signed(&mut acc, mm, &(&dg * bc), neg);
                }
            }
        }
        if !has_structure {
            continue;
        }
        for k in bits(*m) {
            let s = &frame.structure[k];
            if s.is_empty() {
                continue;
            }
            let before = *m & (bit(k) - 1);
            let after = *m & !(bit(k) | (bit(k) - 1));
            let pos_neg = degree(before) % 2 == 1;
            for (sm, sc) in s {
                if sm & (before | after) != 0 {
                    continue;
                }
                let s1 = wedge_sign(before, *sm);
                let s2 = wedge_sign(before | sm, after);
                add_signed(&mut acc, before | sm | after, &(g * sc), pos_neg ^ s1 ^ s2);
            }
        }
    }
    acc
}

impl<S: Scalar> FrameSpec<S> {
    /// A frame of coordinate differentials. Base generators must be labelled
    /// `d<coordinate>`; their slots index the base coordinates.
    pub fn coordinates(name: &str, generators: Vec<Generator>) -> Result<Arc<Self>> {
        validate_generators(&generators)?;
        let mut base: Vec<(usize, usize, String)> = Vec::new();
        for (i, g) in generators.iter().enumerate() {
            if g.class == GenClass::Base {
                let var = g
                    .coordinate()
                    .ok_or_else(|| Error::InvalidInput(format!("base generator `{}` must start with d", g.label)))?;
                base.push((g.slot, i, var));
            }
        }
        base.sort();
        let base_vars = base.iter().map(|(_, _, v)| v.clone()).collect();
        let base_diff = base
            .iter()
            .map(|(_, i, _)| {
                let mut t = Terms::new();
                t.insert(bit(*i), Poly::one());
                t
            })
            .collect();
        let n = generators.len();
        Ok(Arc::new(FrameSpec {
            name: name.to_string(),
            generators,
            base_vars,
            link: None,
            structure: vec![Terms::new(); n],
            base_diff,
            conj_closed: true,
        }))
    }

    /// A frame whose generators are given 1-forms in `parent`.
    pub fn framed(name: &str, parent: &Arc<Self>, generators: Vec<Generator>, expansions: Vec<Form<S>>) -> Result<Arc<Self>> {
        validate_generators(&generators)?;
        if expansions.len() != generators.len() || generators.len() != parent.len() {
            return Err(Error::InvalidInput(format!(
                "frame `{name}` needs {} expansions, got {} generators and {} expansions",
                parent.len(),
                generators.len(),
                expansions.len()
            )));
        }
        let n = generators.len();
        let mut expansion = Vec::with_capacity(n);
        for (g, e) in generators.iter().zip(&expansions) {
            let e = e.to_frame(parent)?;
            if e.terms.keys().any(|m| degree(*m) != 1) {
                return Err(Error::ExpansionNotOneForm(g.label.clone()));
            }
            expansion.push(e.terms);
        }
        let matrix: Vec<Vec<Poly<S>>> = expansion
            .iter()
            .map(|t| (0..n).map(|k| t.get(&bit(k)).cloned().unwrap_or_else(Poly::zero)).collect())
            .collect();
        let inv = invert_poly_matrix(&matrix).ok_or(Error::NotPolynomiallyInvertible)?;
        let inverse: Vec<Terms<S>> = (0..n)
            .map(|k| {
                (0..n)
                    .filter(|i| !inv[k][*i].is_zero())
                    .map(|i| (bit(i), inv[k][i].clone()))
                    .collect()
            })
            .collect();
        let ident = |p: &Poly<S>| p.clone();
        let structure = expansion
            .iter()
            .map(|t| substitute_terms(&d_terms(parent, t), &inverse, &ident))
            .collect();
        let base_diff = parent
            .base_diff
            .iter()
            .map(|t| substitute_terms(t, &inverse, &ident))
            .collect();
        let conj_closed = parent.conj_closed && conj_consistent(&generators, &expansions)?;
        Ok(Arc::new(FrameSpec {
            name: name.to_string(),
            generators,
            base_vars: parent.base_vars.clone(),
            link: Some(FrameLink { parent: parent.clone(), expansion, inverse }),
            structure,
            base_diff,
            conj_closed,
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.generators[i]
    }

    pub fn labels(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.label.clone()).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.label == label)
    }

    pub fn class_mask(&self, class: GenClass) -> Mask {
        self.generators
            .iter()
            .enumerate()
            .filter(|(_, g)| g.class == class)
            .fold(0, |m, (i, _)| m | bit(i))
    }

    pub fn full_mask(&self) -> Mask {
        if self.len() == 64 {
            u64::MAX
        } else {
            bit(self.len()) - 1
        }
    }

    /// Position of the generator of `class` with the given slot.
    pub fn slot_index(&self, class: GenClass, slot: usize) -> Option<usize> {
        self.generators.iter().position(|g| g.class == class && g.slot == slot)
    }

    pub fn base_vars(&self) -> &[String] {
        &self.base_vars
    }

    /// Coordinate names of fiber generators in this frame's coordinate root.
    pub fn fiber_vars(&self) -> Vec<String> {
        self.root()
            .generators
            .iter()
            .filter(|g| g.class.is_fiber())
            .filter_map(Generator::coordinate)
            .collect()
    }

    pub fn parent(&self) -> Option<&Arc<FrameSpec<S>>> {
        self.link.as_ref().map(|l| &l.parent)
    }

    pub fn is_coordinate(&self) -> bool {
        self.link.is_none()
    }

    pub fn root(&self) -> &FrameSpec<S> {
        match &self.link {
            Some(l) => l.parent.root(),
            None => self,
        }
    }

    pub fn is_conj_closed(&self) -> bool {
        self.conj_closed
    }

    pub fn has_structure(&self) -> bool {
        self.structure.iter().any(|s| !s.is_empty())
    }

    /// `d` of generator `i` expressed in this frame.
    pub fn structure_equation(self: &Arc<Self>, i: usize) -> Form<S> {
        Form { frame: self.clone(), terms: self.structure[i].clone() }
    }

    /// Expansion of generator `i` in the parent frame.
    pub fn expansion(&self, i: usize) -> Option<Form<S>> {
        self.link.as_ref().map(|l| Form { frame: l.parent.clone(), terms: l.expansion[i].clone() })
    }

    /// Structural equality: same labels, classes, and expansions.
    pub fn same_as(&self, other: &Self) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        if self.generators != other.generators {
            return false;
        }
        match (&self.link, &other.link) {
            (None, None) => true,
            (Some(a), Some(b)) => a.parent.same_as(&b.parent) && a.expansion == b.expansion,
            _ => false,
        }
    }

    fn describe(&self) -> String {
        format!("{} [{}]", self.name, self.labels().join(", "))
    }
}

fn validate_generators(generators: &[Generator]) -> Result<()> {
    if generators.len() > MAX_GENERATORS {
        return Err(Error::TooManyGenerators(generators.len()));
    }
    let mut seen = BTreeSet::new();
    for g in generators {
        if !seen.insert(g.label.as_str()) {
            return Err(Error::DuplicateLabel(g.label.clone()));
        }
    }
    Ok(())
}

/// Real generators must have real expansions; holomorphic and
/// antiholomorphic generators with equal slot must be conjugate.
fn conj_consistent<S: Scalar>(generators: &[Generator], expansions: &[Form<S>]) -> Result<bool> {
    for (i, g) in generators.iter().enumerate() {
        match g.class {
            GenClass::Holomorphic => {
                let Some(j) = generators
                    .iter()
                    .position(|h| h.class == GenClass::AntiHolomorphic && h.slot == g.slot)
                else {
                    return Ok(false);
                };
                let Ok(c) = expansions[i].conj() else {
                    return Ok(false);
                };
                if c != expansions[j] {
                    return Ok(false);
                }
            }
            GenClass::AntiHolomorphic => {}
            _ => {
                if !expansions[i].terms.values().all(Poly::is_real) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// A (possibly mixed-degree) differential form.
#[derive(Clone)]
pub struct Form<S: Scalar> {
    frame: Arc<FrameSpec<S>>,
    terms: Terms<S>,
}

impl<S: Scalar> Form<S> {
    pub fn zero(frame: &Arc<FrameSpec<S>>) -> Self {
        Form { frame: frame.clone(), terms: Terms::new() }
    }

    pub fn one(frame: &Arc<FrameSpec<S>>) -> Self {
        Self::scalar(frame, Poly::one())
    }

    pub fn constant(frame: &Arc<FrameSpec<S>>, c: S) -> Self {
        Self::scalar(frame, Poly::constant(c))
    }

    pub fn scalar(frame: &Arc<FrameSpec<S>>, p: Poly<S>) -> Self {
        Self::monomial(frame, 0, p)
    }

    pub fn monomial(frame: &Arc<FrameSpec<S>>, m: Mask, p: Poly<S>) -> Self {
        let mut terms = Terms::new();
        if !p.is_zero() {
            terms.insert(m, p);
        }
        Form { frame: frame.clone(), terms }
    }

    pub fn from_terms(frame: &Arc<FrameSpec<S>>, terms: Terms<S>) -> Self {
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Form { frame: frame.clone(), terms }
    }

    pub fn gen_at(frame: &Arc<FrameSpec<S>>, i: usize) -> Self {
        Self::monomial(frame, bit(i), Poly::one())
    }

    pub fn gen(frame: &Arc<FrameSpec<S>>, label: &str) -> Result<Self> {
        let i = frame.index_of(label).ok_or_else(|| Error::UnknownGenerator(label.to_string()))?;
        Ok(Self::gen_at(frame, i))
    }

    /// Wedge of the named generators, in the given order.
    pub fn gens(frame: &Arc<FrameSpec<S>>, labels: &[&str]) -> Result<Self> {
        let mut acc = Self::one(frame);
        for l in labels {
            acc = acc.wedge(&Self::gen(frame, l)?)?;
        }
        Ok(acc)
    }

    pub fn frame(&self) -> &Arc<FrameSpec<S>> {
        &self.frame
    }

    pub fn terms(&self) -> &Terms<S> {
        &self.terms
    }

    pub fn into_terms(self) -> Terms<S> {
        self.terms
    }

    pub fn coefficient(&self, m: Mask) -> Poly<S> {
        self.terms.get(&m).cloned().unwrap_or_else(Poly::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn same_frame(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.frame, &other.frame) || self.frame.same_as(&other.frame)
    }

    fn check_frame(&self, other: &Self) -> Result<()> {
        if self.same_frame(other) {
            Ok(())
        } else {
            Err(Error::FrameMismatch { left: self.frame.describe(), right: other.frame.describe() })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_frame(other)?;
        Ok(Form { frame: self.frame.clone(), terms: terms_add(&self.terms, &other.terms) })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg_form())
    }

    pub fn neg_form(&self) -> Self {
        Form { frame: self.frame.clone(), terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }

    pub fn scale(&self, s: &S) -> Self {
        self.mul_poly(&Poly::constant(s.clone()))
    }

    pub fn mul_poly(&self, p: &Poly<S>) -> Self {
        Form { frame: self.frame.clone(), terms: terms_scale(&self.terms, p) }
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_frame(other)?;
        Ok(Form { frame: self.frame.clone(), terms: terms_wedge(&self.terms, &other.terms) })
    }

    /// Wedge of a list of forms in order; the empty product is `1`.
    pub fn wedge_all(frame: &Arc<FrameSpec<S>>, factors: &[Self]) -> Result<Self> {
        let mut acc = Self::one(frame);
        for f in factors {
            acc = acc.wedge(f)?;
        }
        Ok(acc)
    }

    pub fn degrees(&self) -> BTreeSet<usize> {
        self.terms.keys().map(|m| degree(*m)).collect()
    }

    pub fn is_homogeneous(&self, k: usize) -> bool {
        self.terms.keys().all(|m| degree(*m) == k)
    }

    pub fn homogeneous_part(&self, k: usize) -> Self {
        self.filter(|m| degree(m) == k)
    }

    pub fn filter(&self, keep: impl Fn(Mask) -> bool) -> Self {
        Form {
            frame: self.frame.clone(),
            terms: self.terms.iter().filter(|(m, _)| keep(**m)).map(|(m, c)| (*m, c.clone())).collect(),
        }
    }

    /// Bidegree of a monomial: counts of generators in each class of `split`.
    pub fn bidegree_of(&self, m: Mask, split: (GenClass, GenClass)) -> (usize, usize) {
        let a = self.frame.class_mask(split.0);
        let b = self.frame.class_mask(split.1);
        (degree(m & a), degree(m & b))
    }

    /// Terms with exactly `p` generators of `split.0` and `q` of `split.1`
    /// and no generators of any other class.
    pub fn bidegree_project(&self, p: usize, q: usize, split: (GenClass, GenClass)) -> Self {
        let a = self.frame.class_mask(split.0);
        let b = self.frame.class_mask(split.1);
        self.filter(|m| m & !(a | b) == 0 && degree(m & a) == p && degree(m & b) == q)
    }

    /// `exp(self)` for a form whose components all have even positive degree.
    pub fn exp_nilpotent(&self) -> Result<Self> {
        if self.terms.keys().any(|m| *m == 0 || degree(*m) % 2 == 1) {
            return Err(Error::NotNilpotent);
        }
        let mut acc = Self::one(&self.frame);
        let mut term = Self::one(&self.frame);
        let mut k = 1i64;
        loop {
            term = term.wedge(self)?.scale(&S::from_ratio(1, k));
            if term.is_zero() {
                break;
            }
            acc = acc.try_add(&term)?;
            k += 1;
        }
        Ok(acc)
    }

    /// Integrate over the fiber spanned by all generators of `class`, with
    /// unit fiber volume: the top fiber monomial is moved to the front and
    /// removed; terms without the full fiber monomial vanish.
    pub fn pushforward(&self, class: GenClass) -> Result<Self> {
        let fiber = self.frame.class_mask(class);
        if fiber == 0 {
            return Err(Error::WrongFrame(format!("frame has no {} generators", class.as_str())));
        }
        let mut acc = Terms::new();
        for (m, c) in &self.terms {
            if m & fiber == fiber {
                let rest = m ^ fiber;
                add_signed(&mut acc, rest, c, wedge_sign(fiber, rest));
            }
        }
        Ok(Form { frame: self.frame.clone(), terms: acc })
    }

    /// Interior product with the dual vector of generator `i`.
    pub fn contract(&self, i: usize) -> Self {
        let mut acc = Terms::new();
        for (m, c) in &self.terms {
            if m & bit(i) != 0 {
                let before = degree(m & (bit(i) - 1));
                add_signed(&mut acc, m ^ bit(i), c, before % 2 == 1);
            }
        }
        Form { frame: self.frame.clone(), terms: acc }
    }

    /// Re-express in another frame by matching labels (and classes).
    pub fn transfer(&self, target: &Arc<FrameSpec<S>>) -> Result<Self> {
        let mut map = vec![usize::MAX; self.frame.len()];
        for (i, g) in self.frame.generators.iter().enumerate() {
            if let Some(j) = target.index_of(&g.label) {
                if target.generators[j].class == g.class {
                    map[i] = j;
                }
            }
        }
        self.map_generators(target, |i| (map[i] != usize::MAX).then_some(map[i]))
    }

    /// Relabel generators through an injective index map. Any used
    /// generator without an image is an error.
    pub fn map_generators(&self, target: &Arc<FrameSpec<S>>, f: impl Fn(usize) -> Option<usize>) -> Result<Self> {
        let mut acc = Terms::new();
        for (m, c) in &self.terms {
            let mut out: Mask = 0;
            let mut neg = false;
            for i in bits(*m) {
                let j = f(i).ok_or_else(|| Error::MissingGenerator { label: self.frame.generators[i].label.clone() })?;
                let (nm, s) = mono_wedge(out, bit(j))
                    .ok_or_else(|| Error::InvalidInput("generator map is not injective".into()))?;
                out = nm;
                neg ^= s;
            }
            add_signed(&mut acc, out, c, neg);
        }
        Ok(Form { frame: target.clone(), terms: acc })
    }

    /// Algebra homomorphism into `target` sending generator `i` to
    /// `images[i]` and applying `coeff` to every coefficient.
    pub fn substitute(&self, target: &Arc<FrameSpec<S>>, images: &[Form<S>], coeff: &dyn Fn(&Poly<S>) -> Poly<S>) -> Result<Self> {
        if images.len() != self.frame.len() {
            return Err(Error::InvalidInput("one image per generator is required".into()));
        }
        let mut raw = Vec::with_capacity(images.len());
        for im in images {
            if !(Arc::ptr_eq(im.frame(), target) || im.frame.same_as(target)) {
                return Err(Error::FrameMismatch { left: im.frame.describe(), right: target.describe() });
            }
            raw.push(im.terms.clone());
        }
        Ok(Form { frame: target.clone(), terms: substitute_terms(&self.terms, &raw, coeff) })
    }

    /// Apply a ring homomorphism to the coefficients only.
    pub fn subst_coeffs(&self, map: &BTreeMap<String, Poly<S>>) -> Self {
        Form::from_terms(&self.frame, self.terms.iter().map(|(m, c)| (*m, c.subst(map))).collect())
    }

    pub fn map_coeffs(&self, f: impl Fn(&Poly<S>) -> Poly<S>) -> Self {
        Form::from_terms(&self.frame, self.terms.iter().map(|(m, c)| (*m, f(c))).collect())
    }

    /// Complex conjugate. Holomorphic and antiholomorphic generators of the
    /// same slot are exchanged.
    pub fn conj(&self) -> Result<Self> {
        if !self.frame.conj_closed {
            return Err(Error::NotConjugationClosed);
        }
        let gens = &self.frame.generators;
        let partner: Vec<usize> = gens
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let other = match g.class {
                    GenClass::Holomorphic => GenClass::AntiHolomorphic,
                    GenClass::AntiHolomorphic => GenClass::Holomorphic,
                    _ => return Some(i),
                };
                self.frame.slot_index(other, g.slot)
            })
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::NotConjugationClosed)?;
        let conj = self.map_coeffs(Poly::conj);
        conj.map_generators(&self.frame, |i| Some(partner[i]))
    }

    /// Whether every coefficient is real (meaningful in real frames).
    pub fn has_real_coeffs(&self) -> bool {
        self.terms.values().all(Poly::is_real)
    }

    /// Variables occurring in any coefficient.
    pub fn used_vars(&self) -> BTreeSet<String> {
        self.terms.values().flat_map(Poly::used_vars).collect()
    }

    /// Whether `self == c * other` for a scalar `c`.
    pub fn scalar_ratio(&self, other: &Self) -> Option<S> {
        if !self.same_frame(other) || other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(S::zero());
        }
        if self.terms.len() != other.terms.len() {
            return None;
        }
        let (m0, c0) = other.terms.iter().next().unwrap();
        let ratio = self.terms.get(m0)?.scalar_ratio(c0)?;
        for (m, c) in &other.terms {
            if *self.terms.get(m)? != c.scale(&ratio) {
                return None;
            }
        }
        Some(ratio)
    }

    /// Expand one level into the parent frame.
    pub fn expand(&self) -> Result<Self> {
        let link = self.frame.link.as_ref().ok_or_else(|| Error::WrongFrame("already a coordinate frame".into()))?;
        let ident = |p: &Poly<S>| p.clone();
        Ok(Form { frame: link.parent.clone(), terms: substitute_terms(&self.terms, &link.expansion, &ident) })
    }

    /// Expand all the way into the coordinate frame.
    pub fn expand_fully(&self) -> Self {
        let mut f = self.clone();
        while f.frame.link.is_some() {
            f = f.expand().expect("linked frame");
        }
        f
    }

    /// Re-express a form given in `frame`'s parent in `frame`.
    pub fn collect_into(&self, frame: &Arc<FrameSpec<S>>) -> Result<Self> {
        let link = frame.link.as_ref().ok_or_else(|| Error::WrongFrame("target is a coordinate frame".into()))?;
        if !self.frame.same_as(&link.parent) {
            return Err(Error::FrameMismatch { left: self.frame.describe(), right: link.parent.describe() });
        }
        let ident = |p: &Poly<S>| p.clone();
        Ok(Form { frame: frame.clone(), terms: substitute_terms(&self.terms, &link.inverse, &ident) })
    }

    /// Re-express in any frame sharing an ancestor with this one.
    pub fn to_frame(&self, target: &Arc<FrameSpec<S>>) -> Result<Self> {
        if self.frame.same_as(target) {
            return Ok(Form { frame: target.clone(), terms: self.terms.clone() });
        }
        let mut down: Vec<Arc<FrameSpec<S>>> = vec![target.clone()];
        while let Some(p) = down.last().unwrap().parent().cloned() {
            down.push(p);
        }
        let mut cur = self.clone();
        loop {
            if let Some(pos) = down.iter().position(|f| f.same_as(&cur.frame)) {
                for f in down[..pos].iter().rev() {
                    cur = cur.collect_into(f)?;
                }
                return Ok(cur);
            }
            if cur.frame.link.is_none() {
                return Err(Error::NoCommonFrame(self.frame.name.clone(), target.name.clone()));
            }
            cur = cur.expand()?;
        }
    }

    pub fn labels_of(&self, m: Mask) -> Vec<&str> {
        bits(m).map(|i| self.frame.generators[i].label.as_str()).collect()
    }
}

impl<S: Scalar> PartialEq for Form<S> {
    fn eq(&self, other: &Self) -> bool {
        self.same_frame(other) && self.terms == other.terms
    }
}

impl<S: Scalar> fmt::Debug for Form<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form<{}>({self})", self.frame.name)
    }
}

impl<S: Scalar> fmt::Display for Form<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<Mask> = self.terms.keys().copied().collect();
        keys.sort_by_key(|m| (degree(*m), m.reverse_bits()));
        let parts: Vec<String> = keys
            .iter()
            .map(|m| {
                let c = &self.terms[m];
                let mono = self.labels_of(*m).join("∧");
                if *m == 0 {
                    format!("({c})")
                } else if c.is_one() {
                    mono
                } else {
                    format!("({c})·{mono}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<S: Scalar> Add for &Form<S> {
    type Output = Form<S>;
    /// Panics if the frames differ; use [`Form::try_add`] to get an error.
    fn add(self, rhs: Self) -> Form<S> {
        self.try_add(rhs).expect("adding forms on different frames")
    }
}

impl<S: Scalar> Sub for &Form<S> {
    type Output = Form<S>;
    fn sub(self, rhs: Self) -> Form<S> {
        self.try_sub(rhs).expect("subtracting forms on different frames")
    }
}

impl<S: Scalar> Neg for &Form<S> {
    type Output = Form<S>;
    fn neg(self) -> Form<S> {
        self.neg_form()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi, GaussianRational};

    type P = Poly<GaussianRational>;
    type F = Form<GaussianRational>;

    fn coords() -> Arc<FrameSpec<GaussianRational>> {
        FrameSpec::coordinates(
            "x",
            vec![
                Generator::new("dθ_1", GenClass::SymplecticFiber, 0),
                Generator::new("dθ_2", GenClass::SymplecticFiber, 1),
                Generator::new("dr_1", GenClass::Base, 0),
                Generator::new("dr_2", GenClass::Base, 1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn wedge_signs() {
        let fr = coords();
        let a = F::gen(&fr, "dθ_1").unwrap();
        let b = F::gen(&fr, "dr_1").unwrap();
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        assert_eq!(ab, ba.neg_form());
        assert!(a.wedge(&a).unwrap().is_zero());
        assert!(wedge_sign(0b10, 0b01));
        assert!(!wedge_sign(0b01, 0b10));
    }

    #[test]
    fn pushforward_moves_fiber_to_front() {
        let fr = coords();
        // dθ_1∧dr_1∧dθ_2 = -dθ_1∧dθ_2∧dr_1
        let f = F::gens(&fr, &["dθ_1", "dr_1", "dθ_2"]).unwrap();
        let p = f.pushforward(GenClass::SymplecticFiber).unwrap();
        assert_eq!(p, F::gen(&fr, "dr_1").unwrap().neg_form());
        assert!(F::gen(&fr, "dθ_1").unwrap().pushforward(GenClass::SymplecticFiber).unwrap().is_zero());
    }

    #[test]
    fn contraction_is_antiderivation_on_generators() {
        let fr = coords();
        let f = F::gens(&fr, &["dθ_1", "dr_2"]).unwrap();
        let i = fr.index_of("dr_2").unwrap();
        assert_eq!(f.contract(i), F::gen(&fr, "dθ_1").unwrap().neg_form());
    }

    #[test]
    fn exponential_of_symplectic_form() {
        let fr = coords();
        let w = &F::gens(&fr, &["dθ_1", "dr_1"]).unwrap() + &F::gens(&fr, &["dθ_2", "dr_2"]).unwrap();
        let e = w.exp_nilpotent().unwrap();
        let top = w.wedge(&w).unwrap().scale(&q(1, 2));
        assert_eq!(e.homogeneous_part(4), top);
        assert_eq!(e.homogeneous_part(0), F::one(&fr));
        assert!(F::gen(&fr, "dθ_1").unwrap().exp_nilpotent().is_err());
    }

    #[test]
    fn framed_frame_roundtrip_and_structure() {
        let fr = coords();
        let r1 = P::var("r_1");
        let dr1 = F::gen(&fr, "dr_1").unwrap();
        let dr2 = F::gen(&fr, "dr_2").unwrap();
        let dt1 = F::gen(&fr, "dθ_1").unwrap();
        let dt2 = F::gen(&fr, "dθ_2").unwrap();
        // f_2 = dθ_2 - r_1 dθ_1
        let f2 = &dt2 - &dt1.mul_poly(&r1);
        let framed = FrameSpec::framed(
            "f",
            &fr,
            vec![
                Generator::new("f_1", GenClass::SymplecticFiber, 0),
                Generator::new("f_2", GenClass::SymplecticFiber, 1),
                Generator::new("dr_1", GenClass::Base, 0),
                Generator::new("dr_2", GenClass::Base, 1),
            ],
            vec![dt1.clone(), f2, dr1.clone(), dr2],
        )
        .unwrap();
        // d f_2 = -dr_1 ∧ dθ_1 = -dr_1 ∧ f_1
        let s = framed.structure_equation(1);
        let expected = F::gens(&framed, &["dr_1", "f_1"]).unwrap().neg_form();
        assert_eq!(s, expected);
        let x = dt2.wedge(&dr1).unwrap().mul_poly(&P::var("r_2"));
        let y = x.to_frame(&framed).unwrap();
        assert_eq!(y.to_frame(&fr).unwrap(), x);
        assert!(framed.is_conj_closed());
    }

    #[test]
    fn conjugation_swaps_holomorphic() {
        let fr = coords();
        let dt1 = F::gen(&fr, "dθ_1").unwrap();
        let dt2 = F::gen(&fr, "dθ_2").unwrap();
        let dr1 = F::gen(&fr, "dr_1").unwrap();
        let dr2 = F::gen(&fr, "dr_2").unwrap();
        let i = qi(0, 1);
        let c = FrameSpec::framed(
            "c",
            &fr,
            vec![
                Generator::new("dz_1", GenClass::Holomorphic, 0),
                Generator::new("dz_2", GenClass::Holomorphic, 1),
                Generator::new("dz̄_1", GenClass::AntiHolomorphic, 0),
                Generator::new("dz̄_2", GenClass::AntiHolomorphic, 1),
            ],
            vec![
                &dt1 + &dr1.scale(&i),
                &dt2 + &dr2.scale(&i),
                &dt1 - &dr1.scale(&i),
                &dt2 - &dr2.scale(&i),
            ],
        )
        .unwrap();
        assert!(c.is_conj_closed());
        let dz1 = F::gen(&c, "dz_1").unwrap().scale(&qi(1, 1));
        let conj = dz1.conj().unwrap();
        assert_eq!(conj, F::gen(&c, "dz̄_1").unwrap().scale(&qi(1, -1)));
        let expanded = conj.to_frame(&fr).unwrap();
        assert_eq!(expanded, dz1.to_frame(&fr).unwrap().conj().unwrap());
    }
}
