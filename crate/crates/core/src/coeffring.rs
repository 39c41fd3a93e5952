//! Sparse multivariate polynomials over a [`Scalar`] field.
//!
//! Each polynomial carries its own ordered variable universe. Binary
//! operations merge universes, so polynomials built from different
//! variable sets combine freely; the universe is always kept in natural
//! order (`r_2` before `r_10`), which makes the canonical text form
//! independent of construction order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::scalar::Scalar;

/// Exponent vector aligned with the owning polynomial's universe.
pub type Exponents = Vec<u32>;

#[derive(Clone)]
pub struct Poly<S> {
    vars: Arc<[String]>,
    terms: BTreeMap<Exponents, S>,
}

/// Compare strings treating embedded digit runs as numbers.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let mut ai = a.chars().peekable();
    let mut bi = b.chars().peekable();
    loop {
        match (ai.peek().copied(), bi.peek().copied()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) if x.is_ascii_digit() && y.is_ascii_digit() => {
                let mut na = String::new();
                while let Some(c) = ai.peek().copied().filter(char::is_ascii_digit) {
                    na.push(c);
                    ai.next();
                }
                let mut nb = String::new();
                while let Some(c) = bi.peek().copied().filter(char::is_ascii_digit) {
                    nb.push(c);
                    bi.next();
                }
                let ta = na.trim_start_matches('0');
                let tb = nb.trim_start_matches('0');
                let ord = ta.len().cmp(&tb.len()).then_with(|| ta.cmp(tb));
                if ord != Ordering::Equal {
                    return ord;
                }
                let ord = na.len().cmp(&nb.len());
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            (Some(x), Some(y)) => {
                if x != y {
                    return x.cmp(&y);
                }
                ai.next();
                bi.next();
            }
        }
    }
}

fn sorted_universe<I: IntoIterator<Item = String>>(names: I) -> Vec<String> {
    let mut v: Vec<String> = names.into_iter().collect();
    v.sort_by(|a, b| natural_cmp(a, b));
    v.dedup();
    v
}

fn merge_universes(a: &[String], b: &[String]) -> Arc<[String]> {
    sorted_universe(a.iter().chain(b.iter()).cloned()).into()
}

fn remap(exp: &[u32], from: &[String], to: &[String]) -> Exponents {
    let mut out = vec![0u32; to.len()];
    let mut j = 0;
    for (i, name) in from.iter().enumerate() {
        while to[j] != *name {
            j += 1;
        }
        out[j] = exp[i];
    }
    out
}

impl<S: Scalar> Poly<S> {
    pub fn zero() -> Self {
        Poly { vars: Arc::from(Vec::<String>::new()), terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    pub fn constant(c: S) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Poly { vars: Arc::from(Vec::<String>::new()), terms }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(S::from_int(n))
    }

    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![1], S::one());
        Poly { vars: Arc::from(vec![name.to_string()]), terms }
    }

    /// Build from `(variable powers, coefficient)` pairs; variables may be
    /// listed in any order and repeated.
    pub fn from_terms<'a, I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<(&'a str, u32)>, S)>,
    {
        let mut acc = Self::zero();
        for (powers, c) in terms {
            let mut t = Self::constant(c);
            for (name, e) in powers {
                t = &t * &Self::var(name).pow(e);
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &S)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().map(|c| c.is_one()).unwrap_or(false)
    }

    /// The value if this polynomial has no non-constant terms.
    pub fn constant_value(&self) -> Option<S> {
        match self.terms.len() {
            0 => Some(S::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    /// Names of variables that actually occur with positive exponent.
    pub fn used_vars(&self) -> Vec<String> {
        let mut used = vec![false; self.vars.len()];
        for e in self.terms.keys() {
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    used[i] = true;
                }
            }
        }
        self.vars.iter().zip(used).filter(|(_, u)| *u).map(|(v, _)| v.clone()).collect()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        match self.vars.iter().position(|v| v == var) {
            Some(i) => self.terms.keys().map(|e| e[i]).max().unwrap_or(0),
            None => 0,
        }
    }

    /// Coefficient of the monomial given by `(var, power)` pairs.
    pub fn coefficient(&self, powers: &[(&str, u32)]) -> S {
        let mut target = vec![0u32; self.vars.len()];
        for (name, e) in powers {
            match self.vars.iter().position(|v| v == name) {
                Some(i) => target[i] += e,
                None if *e == 0 => {}
                None => return S::zero(),
            }
        }
        self.terms.get(&target).cloned().unwrap_or_else(S::zero)
    }

    fn with_universe(&self, universe: &Arc<[String]>) -> BTreeMap<Exponents, S> {
        if Arc::ptr_eq(&self.vars, universe) || self.vars[..] == universe[..] {
            return self.terms.clone();
        }
        self.terms
            .iter()
            .map(|(e, c)| (remap(e, &self.vars, universe), c.clone()))
            .collect()
    }

    fn common_universe(&self, other: &Self) -> Arc<[String]> {
        if Arc::ptr_eq(&self.vars, &other.vars) || self.vars[..] == other.vars[..] {
            return self.vars.clone();
        }
        if other.vars.iter().all(|v| self.vars.contains(v)) {
            return self.vars.clone();
        }
        if self.vars.iter().all(|v| other.vars.contains(v)) {
            return other.vars.clone();
        }
        merge_universes(&self.vars, &other.vars)
    }

    /// Re-express over a larger universe (must contain the current one).
    pub fn extend_universe(&self, names: &[String]) -> Self {
        let universe = merge_universes(&self.vars, names);
        Poly { terms: self.with_universe(&universe), vars: universe }
    }

    /// Drop universe variables that do not occur.
    pub fn trimmed(&self) -> Self {
        let used = self.used_vars();
        if used.len() == self.vars.len() {
            return self.clone();
        }
        let keep: Vec<usize> =
            self.vars.iter().enumerate().filter(|(_, v)| used.contains(v)).map(|(i, _)| i).collect();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (keep.iter().map(|&i| e[i]).collect(), c.clone()))
            .collect();
        Poly { vars: used.into(), terms }
    }

    pub fn add_poly(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let universe = self.common_universe(other);
        let mut terms = self.with_universe(&universe);
        let same = Arc::ptr_eq(&other.vars, &universe) || other.vars[..] == universe[..];
        for (e, c) in other.terms.iter() {
            let key = if same { e.clone() } else { remap(e, &other.vars, &universe) };
            accumulate(&mut terms, key, c.clone());
        }
        Poly { vars: universe, terms }
    }

    pub fn sub_poly(&self, other: &Self) -> Self {
        self.add_poly(&other.neg_poly())
    }

    pub fn neg_poly(&self) -> Self {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.mul_ref(s))).collect(),
        }
    }

    pub fn mul_poly(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        let universe = self.common_universe(other);
        let a = self.with_universe(&universe);
        let b = other.with_universe(&universe);
        let mut terms = BTreeMap::new();
        for (ea, ca) in a.iter() {
            for (eb, cb) in b.iter() {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                accumulate(&mut terms, e, ca.mul_ref(cb));
            }
        }
        Poly { vars: universe, terms }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul_poly(self);
        }
        acc
    }

    /// Partial derivative with respect to a named variable.
    pub fn diff(&self, var: &str) -> Self {
        let Some(i) = self.vars.iter().position(|v| v == var) else {
            return Self::zero();
        };
        let mut terms = BTreeMap::new();
        for (e, c) in self.terms.iter() {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            accumulate(&mut terms, e2, c.mul_ref(&S::from_int(e[i] as i64)));
        }
        Poly { vars: self.vars.clone(), terms }
    }

    /// Complex conjugate of every coefficient (variables are real).
    pub fn conj(&self) -> Self {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.conj())).collect(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(Scalar::is_real)
    }

    /// Ring homomorphism sending each named variable to a polynomial.
    /// Variables missing from `map` are left alone.
    pub fn subst(&self, map: &BTreeMap<String, Poly<S>>) -> Self {
        let images: Vec<Poly<S>> = self
            .vars
            .iter()
            .map(|v| map.get(v).cloned().unwrap_or_else(|| Self::var(v)))
            .collect();
        if self.vars.iter().all(|v| !map.contains_key(v)) {
            return self.clone();
        }
        let mut power_cache: Vec<Vec<Poly<S>>> = images.iter().map(|p| vec![Self::one(), p.clone()]).collect();
        let mut acc = Self::zero();
        for (e, c) in self.terms.iter() {
            let mut t = Self::constant(c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while power_cache[i].len() <= k as usize {
                    let next = power_cache[i].last().unwrap().mul_poly(&images[i]);
                    power_cache[i].push(next);
                }
                t = t.mul_poly(&power_cache[i][k as usize]);
            }
            acc = acc.add_poly(&t);
        }
        acc
    }

    /// Evaluate at a point; variables not in `point` make this fail.
    pub fn eval(&self, point: &BTreeMap<String, S>) -> Option<S> {
        let mut acc = S::zero();
        for (e, c) in self.terms.iter() {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let v = point.get(&self.vars[i])?;
                for _ in 0..k {
                    t = t.mul_ref(v);
                }
            }
            acc = acc.add_ref(&t);
        }
        Some(acc)
    }

    /// Whether `self` is `c * other` for a scalar `c`, returning `c`.
    pub fn scalar_ratio(&self, other: &Self) -> Option<S> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(S::zero());
        }
        let universe = self.common_universe(other);
        let a = self.with_universe(&universe);
        let b = other.with_universe(&universe);
        if a.len() != b.len() {
            return None;
        }
        let (e0, c0) = b.iter().next().unwrap();
        let ratio = a.get(e0)?.clone() / c0.clone();
        for (e, c) in b.iter() {
            match a.get(e) {
                Some(x) if *x == c.mul_ref(&ratio) => {}
                _ => return None,
            }
        }
        Some(ratio)
    }

    /// Terms in canonical order: descending total degree, then
    /// lexicographically descending exponents in universe order.
    pub fn sorted_terms(&self) -> Vec<(Vec<(String, u32)>, S)> {
        let mut items: Vec<(&Exponents, &S)> = self.terms.iter().collect();
        items.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        items
            .into_iter()
            .map(|(e, c)| {
                let powers = e
                    .iter()
                    .enumerate()
                    .filter(|(_, k)| **k > 0)
                    .map(|(i, k)| (self.vars[i].clone(), *k))
                    .collect();
                (powers, c.clone())
            })
            .collect()
    }
}

fn accumulate<S: Scalar>(terms: &mut BTreeMap<Exponents, S>, key: Exponents, c: S) {
    if c.is_zero() {
        return;
    }
    match terms.entry(key) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let sum = o.get().add_ref(&c);
            if sum.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = sum;
            }
        }
    }
}

impl<S: Scalar> PartialEq for Poly<S> {
    fn eq(&self, other: &Self) -> bool {
        if self.terms.len() != other.terms.len() {
            return false;
        }
        let universe = self.common_universe(other);
        self.with_universe(&universe) == other.with_universe(&universe)
    }
}

impl<S: Scalar> fmt::Debug for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl<S: Scalar> fmt::Display for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (powers, c) in self.sorted_terms() {
            let mono: Vec<String> = powers
                .iter()
                .map(|(v, k)| if *k == 1 { v.clone() } else { format!("{v}^{k}") })
                .collect();
            let mut coeff = c.render();
            let negative = coeff.starts_with('-');
            if negative {
                coeff.remove(0);
            }
            if !first {
                write!(f, "{}", if negative { " - " } else { " + " })?;
            } else if negative {
                write!(f, "-")?;
            }
            first = false;
            if mono.is_empty() {
                write!(f, "{coeff}")?;
            } else if coeff == "1" {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{coeff}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<S: Scalar> Add for &Poly<S> {
    type Output = Poly<S>;
    fn add(self, rhs: Self) -> Poly<S> {
        self.add_poly(rhs)
    }
}

impl<S: Scalar> Sub for &Poly<S> {
    type Output = Poly<S>;
    fn sub(self, rhs: Self) -> Poly<S> {
        self.sub_poly(rhs)
    }
}

impl<S: Scalar> Mul for &Poly<S> {
    type Output = Poly<S>;
    fn mul(self, rhs: Self) -> Poly<S> {
        self.mul_poly(rhs)
    }
}

impl<S: Scalar> Neg for &Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        self.neg_poly()
    }
}

impl<S: Scalar> Add for Poly<S> {
    type Output = Poly<S>;
    fn add(self, rhs: Self) -> Poly<S> {
        self.add_poly(&rhs)
    }
}

impl<S: Scalar> Sub for Poly<S> {
    type Output = Poly<S>;
    fn sub(self, rhs: Self) -> Poly<S> {
        self.sub_poly(&rhs)
    }
}

impl<S: Scalar> Mul for Poly<S> {
    type Output = Poly<S>;
    fn mul(self, rhs: Self) -> Poly<S> {
        self.mul_poly(&rhs)
    }
}

impl<S: Scalar> Neg for Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        self.neg_poly()
    }
}

impl<S: Scalar> Default for Poly<S> {
    fn default() -> Self {
        Self::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi, GaussianRational};

    type P = Poly<GaussianRational>;

    #[test]
    fn natural_order() {
        let mut v = vec!["r_10", "r_2", "r_1", "a", "r_{1,3}", "r_{1,2}"];
        v.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(v, vec!["a", "r_1", "r_2", "r_10", "r_{1,2}", "r_{1,3}"]);
    }

    #[test]
    fn universes_merge() {
        let a = P::var("r_2");
        let b = P::var("r_1");
        let s = &a + &b;
        assert_eq!(s.vars(), &["r_1".to_string(), "r_2".to_string()]);
        assert_eq!(&s - &a, b);
        assert_eq!(s.to_string(), "r_1 + r_2");
    }

    #[test]
    fn multiplication_and_display() {
        let r1 = P::var("r_1");
        let r2 = P::var("r_2");
        let p = &(&r1 + &P::from_int(1)) * &(&r1 - &r2);
        assert_eq!(p.to_string(), "r_1^2 - r_1*r_2 + r_1 - r_2");
        let c = P::constant(qi(0, 2));
        assert_eq!((&c * &r1).to_string(), "2i*r_1");
        assert_eq!(P::constant(q(-1, 2)).to_string(), "-1/2");
    }

    #[test]
    fn derivative() {
        let r1 = P::var("r_1");
        let r2 = P::var("r_2");
        let p = &(&r1.pow(3) * &r2) + &r2;
        assert_eq!(p.diff("r_1"), &P::from_int(3) * &(&r1.pow(2) * &r2));
        assert_eq!(p.diff("r_2"), &r1.pow(3) + &P::one());
        assert!(p.diff("x").is_zero());
    }

    #[test]
    fn substitution_and_eval() {
        let r1 = P::var("r_1");
        let r2 = P::var("r_2");
        let p = &r1.pow(2) + &r2;
        let mut m = BTreeMap::new();
        m.insert("r_1".to_string(), &r2 + &P::one());
        let s = p.subst(&m);
        assert_eq!(s, &(&r2.pow(2) + &(&P::from_int(3) * &r2)) + &P::one());
        let mut pt = BTreeMap::new();
        pt.insert("r_1".to_string(), q(2, 1));
        pt.insert("r_2".to_string(), q(1, 3));
        assert_eq!(p.eval(&pt), Some(q(13, 3)));
    }

    #[test]
    fn equality_ignores_universe() {
        let a = P::var("r_1").extend_universe(&["r_5".to_string()]);
        assert_eq!(a, P::var("r_1"));
        assert_eq!(a.trimmed().vars().len(), 1);
    }

    #[test]
    fn ratio_detection() {
        let r1 = P::var("r_1");
        let p = &r1 + &P::one();
        let q3 = p.scale(&q(-3, 1));
        assert_eq!(q3.scalar_ratio(&p), Some(q(-3, 1)));
        assert_eq!(r1.scalar_ratio(&p), None);
    }
}
