//! Finite-dimensional cohomology of torus-invariant forms: Bott-Chern on
//! the complex side, Tseng-Yau `d + d^Λ` on the symplectic side, and the
//! comparison of the two through the transform.
//!
//! Coefficients are polynomials in the base coordinates of total degree at
//! most `D`. Every operator lowers that degree, so each truncation is a
//! subcomplex. Frames with constant structure equations can instead be
//! used with constant coefficients only.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::calculus::{d_lambda, del, delbar, exterior_d, ComplexBasis, SymplecticData};
use crate::error::{Error, Result};
use crate::exterior::{bits, GenClass, Mask};
use crate::fourier::{fm_backward, fm_forward, involution_sign, SemiflatPair};
use crate::json::form_to_value;
use crate::linalg::{complement_indices, nullspace, rank};
use crate::nilmanifold::{a_var, GammaAction, NilData};
use crate::report::Report;
use crate::{Form, Frame, Poly, Q, Scalar};

#[derive(Clone, Debug)]
pub enum Operators {
    /// `d`, `∂`, `∂̄` in a complex frame.
    Dolbeault(ComplexBasis<Q>),
    /// `d`, `d^Λ` for a symplectic form.
    Symplectic(SymplecticData<Q>),
}

/// Lattice generators acting on forms through a coordinate frame.
#[derive(Clone, Debug)]
pub struct Invariance {
    actions: Vec<GammaAction>,
    coords: Frame,
}

/// Elementary generators `a_{i,i+1} = 1` of the integer unitriangular group.
pub fn elementary_actions(nd: &NilData) -> Result<Vec<GammaAction>> {
    let mut out = Vec::new();
    for i in 1..nd.k() {
        let values: BTreeMap<String, Q> = nd
            .pairs()
            .iter()
            .map(|(a, b)| (a_var(*a, *b), if (*a, *b) == (i, i + 1) { Q::one() } else { Q::from_int(0) }))
            .collect();
        out.push(GammaAction::with_values(nd, &values)?);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct FiniteComplex {
    frame: Frame,
    split: (GenClass, GenClass),
    ops: Operators,
    degree: u32,
    vars: Vec<String>,
    constant_frame: bool,
    invariance: Option<Invariance>,
}

/// Dimension data for one bidegree.
#[derive(Clone, Debug)]
pub struct CohomologyReport {
    pub kind: &'static str,
    pub degree: u32,
    pub bidegree: (usize, usize),
    pub dim: usize,
    pub kernel_dim: usize,
    pub image_rank: usize,
    pub representatives: Vec<Form>,
    /// Images of the preimage space, spanning the exact part.
    pub exact: Vec<Form>,
    pub operator_ranks: BTreeMap<String, usize>,
}

impl CohomologyReport {
    pub fn to_value(&self) -> Value {
        json!({
            "kind": self.kind,
            "D": self.degree,
            "bidegree": [self.bidegree.0, self.bidegree.1],
            "dim": self.dim,
            "representatives": self.representatives.iter().map(form_to_value).collect::<Vec<_>>(),
            "operator_ranks": self.operator_ranks,
        })
    }
}

type Key = (usize, Mask, Vec<(String, u32)>);

/// Sparse coordinates of a list of forms over a shared dictionary of
/// `(slot, monomial, coefficient monomial)` keys; returns matrix rows.
fn columns_to_rows(columns: &[Vec<(usize, &Form)>]) -> Vec<Vec<Q>> {
    let mut index: BTreeMap<Key, usize> = BTreeMap::new();
    let mut entries: Vec<Vec<(usize, Q)>> = Vec::with_capacity(columns.len());
    for col in columns {
        let mut e = Vec::new();
        for (slot, f) in col {
            for (m, c) in f.terms() {
                for (powers, v) in c.sorted_terms() {
                    let next = index.len();
                    let row = *index.entry((*slot, *m, powers)).or_insert(next);
                    e.push((row, v));
                }
            }
        }
        entries.push(e);
    }
    let mut rows = vec![vec![Q::from_int(0); columns.len()]; index.len()];
    for (j, e) in entries.into_iter().enumerate() {
        for (row, v) in e {
            rows[row][j] = rows[row][j].add_ref(&v);
        }
    }
    rows
}

/// Coordinate vectors (one per form) over a shared dictionary of
/// `(monomial, coefficient monomial)` keys.
pub fn forms_as_vectors(forms: &[Form]) -> Vec<Vec<Q>> {
    let cols: Vec<Vec<(usize, &Form)>> = forms.iter().map(|f| vec![(0, f)]).collect();
    let rows = columns_to_rows(&cols);
    (0..forms.len()).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect()
}

fn combine(basis: &[Form], coeffs: &[Q], frame: &Frame) -> Form {
    let mut acc = Form::zero(frame);
    for (b, c) in basis.iter().zip(coeffs) {
        if !c.is_zero() {
            acc = &acc + &b.scale(c);
        }
    }
    acc
}

/// Monomials of total degree at most `d`, by degree then exponent order.
pub fn coefficient_monomials(vars: &[String], d: u32) -> Vec<Poly> {
    let mut out = vec![Poly::one()];
    let mut layer: Vec<(usize, Poly)> = vec![(0, Poly::one())];
    for _ in 0..d {
        let mut next = Vec::new();
        for (start, p) in &layer {
            for (i, v) in vars.iter().enumerate().skip(*start) {
                next.push((i, p * &Poly::var(v)));
            }
        }
        out.extend(next.iter().map(|(_, p)| p.clone()));
        layer = next;
    }
    out
}

fn choose(mask: Mask, k: usize) -> Vec<Mask> {
    let idx: Vec<usize> = bits(mask).collect();
    let mut out = Vec::new();
    let total = idx.len();
    if k > total {
        return out;
    }
    let mut sel: Vec<usize> = (0..k).collect();
    loop {
        out.push(sel.iter().fold(0, |m, &i| m | (1u64 << idx[i])));
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if sel[i] != i + total - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        if sel[i] == i + total - k {
            return out;
        }
        sel[i] += 1;
        for j in i + 1..k {
            sel[j] = sel[j - 1] + 1;
        }
    }
}

impl FiniteComplex {
    /// Forms on the complex side in the `dz` frame with coefficients of degree `≤ D`.
    pub fn complex_side(pair: &SemiflatPair<Q>, degree: u32) -> Self {
        FiniteComplex {
            frame: pair.complex().frame().clone(),
            split: ComplexBasis::<Q>::split(),
            ops: Operators::Dolbeault(pair.complex().clone()),
            degree,
            vars: pair.base_vars().to_vec(),
            constant_frame: false,
            invariance: None,
        }
    }

    /// Forms on the symplectic side in coordinates with coefficients of degree `≤ D`.
    pub fn symplectic_side(pair: &SemiflatPair<Q>, degree: u32) -> Self {
        FiniteComplex {
            frame: pair.x().clone(),
            split: (GenClass::SymplecticFiber, GenClass::Base),
            ops: Operators::Symplectic(pair.darboux().clone()),
            degree,
            vars: pair.base_vars().to_vec(),
            constant_frame: false,
            invariance: None,
        }
    }

    /// Restrict to forms fixed by the lattice of a nilmanifold member.
    pub fn with_invariance(mut self, nd: &NilData) -> Result<Self> {
        let coords = match &self.ops {
            Operators::Dolbeault(_) => nd.pair().xcheck().clone(),
            Operators::Symplectic(_) => nd.pair().x().clone(),
        };
        if !self.frame.root().same_as(&coords) {
            return Err(Error::WrongFrame(format!("complex frame `{}` is not on this nilmanifold", self.frame.name())));
        }
        self.invariance = Some(Invariance { actions: elementary_actions(nd)?, coords });
        Ok(self)
    }

    /// Constant-coefficient forms in the invariant frames of a nilmanifold.
    /// Complex side: `ζ = f + i e`; symplectic side: `(f̌, e)` with `ω = Σ f̌∧e`.
    pub fn nil_invariant(nd: &NilData, complex_side: bool) -> Result<Self> {
        let (frame, split, ops) = if complex_side {
            let i = Q::imag_unit();
            let factors: Vec<Form> = nd.pairs().iter().map(|(a, b)| &nd.f(*a, *b) + &nd.e(*a, *b).scale(&i)).collect();
            let labels: Vec<String> = nd.pairs().iter().map(|(a, b)| format!("ζ_{{{a},{b}}}")).collect();
            let basis = ComplexBasis::from_factors(nd.frame_b(), &factors, &labels)?;
            (basis.frame().clone(), ComplexBasis::<Q>::split(), Operators::Dolbeault(basis))
        } else {
            let mut w = Form::zero(nd.frame_a());
            for (a, b) in nd.pairs() {
                w = &w + &nd.fcheck(*a, *b).wedge(&nd.e_a(*a, *b))?;
            }
            let sd = SymplecticData::new(&w)?;
            (nd.frame_a().clone(), (GenClass::SymplecticFiber, GenClass::Base), Operators::Symplectic(sd))
        };
        Ok(FiniteComplex {
            frame,
            split,
            ops,
            degree: 0,
            vars: nd.pair().base_vars().to_vec(),
            constant_frame: true,
            invariance: None,
        })
    }

    /// Restrict to constant coefficients, i.e. invariant forms on the flat
    /// torus quotient of the base. Polynomial classes on the open base differ:
    /// `∂∂̄ r²` already kills constant `(1,1)` classes there.
    pub fn constant_coefficients(mut self) -> Self {
        self.constant_frame = true;
        self.degree = 0;
        self
    }

    /// Allow polynomial coefficients of degree `≤ D` in the complex's own
    /// frame. In a non-coordinate frame the operators can raise the degree,
    /// which is reported as [`Error::LimitExceeded`].
    pub fn polynomial_coefficients(mut self, degree: u32) -> Self {
        self.constant_frame = false;
        self.degree = degree;
        self
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn symplectic_data(&self) -> Option<&SymplecticData<Q>> {
        match &self.ops {
            Operators::Symplectic(sd) => Some(sd),
            Operators::Dolbeault(_) => None,
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn n(&self) -> usize {
        self.frame.class_mask(self.split.0).count_ones() as usize
    }

    pub fn is_constant_frame(&self) -> bool {
        self.constant_frame
    }

    /// Basis of `(p, q)` forms with coefficients of degree `≤ d`.
    pub fn space(&self, p: usize, q: usize, d: u32) -> Result<Vec<Form>> {
        let monos = if self.constant_frame { vec![Poly::one()] } else { coefficient_monomials(&self.vars, d) };
        let mut basis = Vec::new();
        for a in choose(self.frame.class_mask(self.split.0), p) {
            for b in choose(self.frame.class_mask(self.split.1), q) {
                for mono in &monos {
                    basis.push(Form::monomial(&self.frame, a | b, mono.clone()));
                }
            }
        }
        match &self.invariance {
            Some(inv) if !basis.is_empty() => self.invariant_subspace(&basis, inv),
            _ => Ok(basis),
        }
    }

    fn invariant_subspace(&self, basis: &[Form], inv: &Invariance) -> Result<Vec<Form>> {
        let mut moved: Vec<Vec<Form>> = Vec::with_capacity(basis.len());
        for b in basis {
            let real = b.to_frame(&inv.coords)?;
            let mut per = Vec::with_capacity(inv.actions.len());
            for g in &inv.actions {
                per.push((&g.apply(&real)? - &real).to_frame(&self.frame)?);
            }
            moved.push(per);
        }
        let cols: Vec<Vec<(usize, &Form)>> = moved.iter().map(|per| per.iter().enumerate().collect()).collect();
        let rows = columns_to_rows(&cols);
        Ok(nullspace(&rows, basis.len()).iter().map(|v| combine(basis, v, &self.frame)).collect())
    }

    fn kernel_ops(&self, a: &Form) -> Result<Vec<Form>> {
        Ok(match &self.ops {
            Operators::Dolbeault(_) => vec![exterior_d(a)],
            Operators::Symplectic(sd) => vec![exterior_d(a), d_lambda(a, sd)?],
        })
    }

    fn image_op(&self, a: &Form) -> Result<Form> {
        match &self.ops {
            Operators::Dolbeault(basis) => del(&delbar(a, basis)?, basis),
            Operators::Symplectic(sd) => Ok(exterior_d(&d_lambda(a, sd)?)),
        }
    }

    fn preimage_bidegree(&self, p: usize, q: usize) -> Option<(usize, usize)> {
        let n = self.n();
        match &self.ops {
            Operators::Dolbeault(_) => (p >= 1 && q >= 1).then(|| (p - 1, q - 1)),
            Operators::Symplectic(_) => (q >= 1 && p < n).then(|| (p + 1, q - 1)),
        }
    }

    fn kind(&self) -> &'static str {
        match &self.ops {
            Operators::Dolbeault(_) => "bott_chern",
            Operators::Symplectic(_) => "tseng_yau",
        }
    }

    /// Every image stays inside the truncated span.
    fn check_span(&self, images: &[Form], what: &str) -> Result<()> {
        for f in images {
            for (m, c) in f.terms() {
                let bad = if self.constant_frame { !c.is_constant() } else { c.total_degree() > self.degree };
                if bad {
                    let term = Form::monomial(&self.frame, *m, c.clone());
                    return Err(Error::LimitExceeded(if self.constant_frame {
                        format!("{what} leaves the constant-coefficient span (witness {term})")
                    } else {
                        format!("{what} leaves the degree ≤ {} span (witness {term})", self.degree)
                    }));
                }
            }
        }
        Ok(())
    }

    /// Closed `(p, q)` forms modulo the exact ones: Bott-Chern on the
    /// complex side, `(p, q)^Λ` Tseng-Yau on the symplectic side.
    pub fn cohomology(&self, p: usize, q: usize) -> Result<CohomologyReport> {
        let n = self.n();
        if p > n || q > n {
            return Err(Error::InvalidInput(format!("bidegree ({p},{q}) out of range for n = {n}")));
        }
        let basis = self.space(p, q, self.degree)?;
        let mut images = Vec::with_capacity(basis.len());
        for b in &basis {
            images.push(self.kernel_ops(b)?);
        }
        let cols: Vec<Vec<(usize, &Form)>> = images.iter().map(|ims| ims.iter().enumerate().collect()).collect();
        let rows = columns_to_rows(&cols);
        let kernel: Vec<Form> = nullspace(&rows, basis.len()).iter().map(|v| combine(&basis, v, &self.frame)).collect();

        let exact: Vec<Form> = match self.preimage_bidegree(p, q) {
            Some((pp, qq)) => {
                let pre = self.space(pp, qq, self.degree + 2)?;
                pre.iter().map(|a| self.image_op(a)).collect::<Result<Vec<_>>>()?.into_iter().filter(|f| !f.is_zero()).collect()
            }
            None => Vec::new(),
        };
        self.check_span(&exact, "the exact operator")?;
        let mut all = exact.clone();
        all.extend(kernel.iter().cloned());
        let vecs = forms_as_vectors(&all);
        let (img_vecs, ker_vecs) = vecs.split_at(exact.len());
        let image_rank = rank(img_vecs);
        if rank(&vecs) != kernel.len() {
            return Err(Error::Degenerate("exact forms are not all closed".into()));
        }
        let reps: Vec<Form> = complement_indices(img_vecs, ker_vecs).into_iter().map(|i| kernel[i].clone()).collect();
        let mut operator_ranks = BTreeMap::new();
        operator_ranks.insert("space".to_string(), basis.len());
        operator_ranks.insert("kernel".to_string(), kernel.len());
        operator_ranks.insert("image".to_string(), image_rank);
        Ok(CohomologyReport {
            kind: self.kind(),
            degree: self.degree,
            bidegree: (p, q),
            dim: kernel.len() - image_rank,
            kernel_dim: kernel.len(),
            image_rank,
            representatives: reps,
            exact,
            operator_ranks,
        })
    }

    /// Operator relations on every basis form of every bidegree.
    pub fn check_relations(&self) -> Result<Report> {
        let mut r = Report::new(format!("{} operator relations", self.kind()));
        r.config("D", self.degree);
        let n = self.n();
        let mut failures: BTreeMap<&'static str, String> = BTreeMap::new();
        let mut count = 0usize;
        for p in 0..=n {
            for q in 0..=n {
                for a in self.space(p, q, self.degree)? {
                    count += 1;
                    let da = exterior_d(&a);
                    let mut rel: Vec<(&'static str, Form)> = vec![("d_squared", exterior_d(&da))];
                    match &self.ops {
                        Operators::Dolbeault(basis) => {
                            let d1 = del(&a, basis)?;
                            let d2 = delbar(&a, basis)?;
                            rel.push(("del_squared", del(&d1, basis)?));
                            rel.push(("delbar_squared", delbar(&d2, basis)?));
                            rel.push(("del_delbar_anticommute", &del(&d2, basis)? + &delbar(&d1, basis)?));
                            rel.push(("del_plus_delbar", &(&d1 + &d2) - &da));
                            let dd = del(&d2, basis)?;
                            rel.push(("ddbar_squared", del(&delbar(&dd, basis)?, basis)?));
                        }
                        Operators::Symplectic(sd) => {
                            let dl = d_lambda(&a, sd)?;
                            rel.push(("dlambda_squared", d_lambda(&dl, sd)?));
                            rel.push(("d_dlambda_anticommute", &exterior_d(&dl) + &d_lambda(&da, sd)?));
                            let ddl = exterior_d(&dl);
                            rel.push(("d_of_ddlambda", exterior_d(&ddl)));
                            rel.push(("dlambda_of_ddlambda", d_lambda(&ddl, sd)?));
                        }
                    }
                    for (id, f) in rel {
                        if !f.is_zero() {
                            failures.entry(id).or_insert_with(|| format!("on {a}: {f}"));
                        } else {
                            failures.entry(id).or_default();
                        }
                    }
                }
            }
        }
        for (id, w) in failures {
            r.check(&format!("relation.{id}"), w.is_empty(), format!("holds on all {count} basis forms"), || w);
        }
        Ok(r)
    }
}

/// `H^{p,q}_{BC}(X̌)` against `H^{(n−p,q)^Λ}_{d+d^Λ}(X)`: dimensions, the
/// transform of representatives, and the involution on them.
pub fn mirror_compare(cx: &FiniteComplex, cxc: &FiniteComplex, pair: &SemiflatPair<Q>, p: usize, q: usize) -> Result<Report> {
    let n = pair.n();
    let mut r = Report::new(format!("cohomology mirror ({p},{q})"));
    r.config("p", p);
    r.config("q", q);
    r.config("D", cxc.degree());
    if p > n || q > n {
        return Err(Error::InvalidInput(format!("bidegree ({p},{q}) out of range for n = {n}")));
    }
    let bc = cxc.cohomology(p, q)?;
    let ty = cx.cohomology(n - p, q)?;
    r.data("bott_chern", bc.to_value());
    r.data("tseng_yau", ty.to_value());
    r.check(
        "mirror.dimensions",
        bc.dim == ty.dim,
        format!("dim H^{{{p},{q}}}_BC = dim H^({},{})_TY = {}", n - p, q, bc.dim),
        || format!("{} vs {}", bc.dim, ty.dim),
    );
    let mut mapped = Vec::with_capacity(bc.representatives.len());
    for rep in &bc.representatives {
        mapped.push(fm_forward(rep, pair)?.to_frame(cx.frame())?);
    }
    let mut closed = true;
    let mut witness = String::new();
    for m in &mapped {
        for f in cx.kernel_ops(m)? {
            if !f.is_zero() && closed {
                closed = false;
                witness = format!("{m} ↦ {f}");
            }
        }
    }
    r.check("mirror.representatives_closed", closed, "transformed representatives are d- and d^Λ-closed", || witness.clone());
    let split = cx.split;
    let wrong: Vec<&Form> = mapped.iter().filter(|m| !m.bidegree_project(n - p, q, split).eq(m)).collect();
    r.check("mirror.representatives_bidegree", wrong.is_empty(), format!("transformed representatives have bidegree ({},{q})", n - p), || {
        wrong[0].to_string()
    });
    let mut all = ty.exact.clone();
    all.extend(mapped.iter().cloned());
    let vecs = forms_as_vectors(&all);
    let (img, ext) = vecs.split_at(ty.exact.len());
    let independent = complement_indices(img, ext).len();
    r.check(
        "mirror.representatives_independent",
        independent == mapped.len(),
        "transformed representatives stay independent modulo exact forms",
        || format!("{independent} of {} independent", mapped.len()),
    );
    let sign = involution_sign::<Q>(n);
    let mut twice_ok = true;
    let mut twice_witness = String::new();
    for (rep, m) in bc.representatives.iter().zip(&mapped) {
        let back = fm_backward(m, pair)?.to_frame(cxc.frame())?;
        let expected = rep.scale(&sign);
        if back != expected && twice_ok {
            twice_ok = false;
            twice_witness = format!("{rep} ↦ {back}");
        }
    }
    r.check("mirror.involution", twice_ok, format!("transforming twice multiplies representatives by {}", sign.render()), || {
        twice_witness.clone()
    });
    Ok(r)
}

/// The table `dim H^{p,q}` over all bidegrees.
pub fn dimension_table(c: &FiniteComplex) -> Result<Vec<Vec<usize>>> {
    let n = c.n();
    (0..=n).map(|p| (0..=n).map(|q| c.cohomology(p, q).map(|h| h.dim)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn monomial_counts() {
        let vars: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        assert_eq!(coefficient_monomials(&vars, 2).len(), 10);
        assert_eq!(choose(0b1111, 2).len(), 6);
        assert_eq!(choose(0b1010, 0), vec![0]);
        assert!(choose(0b1, 2).is_empty());
    }

    #[test]
    fn flat_tables_are_binomial() {
        for n in 1..=2 {
            let pair = SemiflatPair::standard(n).unwrap();
            let bc = dimension_table(&FiniteComplex::complex_side(&pair, 0).constant_coefficients()).unwrap();
            let ty = dimension_table(&FiniteComplex::symplectic_side(&pair, 0).constant_coefficients()).unwrap();
            for p in 0..=n {
                for q in 0..=n {
                    assert_eq!(bc[p][q], binom(n, p) * binom(n, q));
                    assert_eq!(ty[n - p][q], bc[p][q]);
                }
            }
        }
    }

    #[test]
    fn polynomial_coefficients_kill_constant_classes() {
        let pair = SemiflatPair::standard(1).unwrap();
        let h = FiniteComplex::complex_side(&pair, 0).cohomology(1, 1).unwrap();
        assert_eq!((h.kernel_dim, h.image_rank, h.dim), (1, 1, 0));
    }

    #[test]
    fn flat_mirror_with_polynomials() {
        let pair = SemiflatPair::standard(2).unwrap();
        let cx = FiniteComplex::symplectic_side(&pair, 1);
        let cxc = FiniteComplex::complex_side(&pair, 1);
        for (p, q) in [(0, 0), (1, 1), (1, 0), (2, 1)] {
            let r = mirror_compare(&cx, &cxc, &pair, p, q).unwrap();
            assert!(r.all_pass(), "{r}");
        }
        assert!(cxc.check_relations().unwrap().all_pass());
        assert!(cx.check_relations().unwrap().all_pass());
    }

    #[test]
    fn invariant_one_forms_contain_e13() {
        let nd = NilData::build(3).unwrap();
        let pair = nd.pair();
        let c = FiniteComplex::symplectic_side(pair, 1).with_invariance(&nd).unwrap();
        let basis = c.space(0, 1, 1).unwrap();
        let e13 = nd.e(1, 3).expand_fully().transfer(pair.x()).unwrap();
        let dr13 = Form::gen(pair.x(), "dr_{1,3}").unwrap();
        let mut with_e = basis.clone();
        with_e.push(e13);
        assert_eq!(rank(&forms_as_vectors(&with_e)), basis.len());
        let mut with_dr = basis.clone();
        with_dr.push(dr13);
        assert_eq!(rank(&forms_as_vectors(&with_dr)), basis.len() + 1);
    }

    #[test]
    fn nil_invariant_complexes_mirror() {
        let nd = NilData::build(3).unwrap();
        let cx = FiniteComplex::nil_invariant(&nd, false).unwrap();
        let cxc = FiniteComplex::nil_invariant(&nd, true).unwrap();
        let r = mirror_compare(&cx, &cxc, nd.pair(), 1, 1).unwrap();
        assert!(r.all_pass(), "{r}");
    }

    #[test]
    fn escape_is_reported() {
        // In the invariant frame `dr` has polynomial coefficients, so
        // polynomial preimages escape any degree bound.
        let nd = NilData::build(3).unwrap();
        let c = FiniteComplex::nil_invariant(&nd, true).unwrap().polynomial_coefficients(0);
        let err = c.cohomology(1, 1).unwrap_err();
        assert!(matches!(err, Error::LimitExceeded(_)), "{err}");
        assert!(FiniteComplex::complex_side(nd.pair(), 0).cohomology(1, 1).is_ok());
    }
}
