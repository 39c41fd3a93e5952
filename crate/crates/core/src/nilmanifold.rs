//! The upper-unitriangular nilmanifold family: invariant frames, the
//! lattice action, and the SU(n) systems on both sides of the mirror.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::calculus::exterior_d;
use crate::error::{Error, Result};
use crate::exterior::{bit, GenClass, Generator};
use crate::fourier::{fm_backward, involution_sign, PairLabels, SemiflatPair};
use crate::linalg::{invert_poly_matrix, poly_identity, poly_mat_mul, poly_transpose, PolyMatrix};
use crate::report::Report;
use crate::sustruct::{
    check_iia, check_iib, computed_phase, conformal_factor, flux_constant, flux_iia, flux_iib, mirror_transform,
    pure_fiber_coefficient, OmegaSpec, Polarization, SUStructure,
};
use crate::{Form, Frame, FrameSpec, Poly, Q, Scalar};

/// Frames and coordinates of the size-`K` family.
#[derive(Clone, Debug)]
pub struct NilData {
    k: usize,
    pairs: Vec<(usize, usize)>,
    pair: SemiflatPair<Q>,
    /// `(f, e)` over the tangent-fiber side.
    frame_b: Frame,
    /// `(f̌, e)` over the cotangent-fiber side.
    frame_a: Frame,
}

fn idx(i: usize, j: usize) -> String {
    format!("{{{i},{j}}}")
}

pub fn r_var(i: usize, j: usize) -> String {
    format!("r_{}", idx(i, j))
}

pub fn a_var(i: usize, j: usize) -> String {
    format!("a_{}", idx(i, j))
}

/// Labels used by the family: `dθ_{i,j}` on the tangent side, `dθ̌_{i,j}`
/// on the cotangent side.
pub fn nil_labels(k: usize) -> PairLabels {
    let pairs = index_pairs(k);
    let map = |p: &str| pairs.iter().map(|(i, j)| format!("{p}_{}", idx(*i, *j))).collect();
    PairLabels {
        symplectic_fiber: map("dθ̌"),
        complex_fiber: map("dθ"),
        base: map("dr"),
        holomorphic: map("dz"),
    }
}

/// `{(i, j) : 1 ≤ i < j ≤ K}` in dictionary order.
pub fn index_pairs(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 1..=k {
        for j in i + 1..=k {
            out.push((i, j));
        }
    }
    out
}

impl NilData {
    pub fn build(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidInput(format!("K must be at least 2, got {k}")));
        }
        let pairs = index_pairs(k);
        let n = pairs.len();
        let pair = SemiflatPair::with_labels(&nil_labels(k))?;
        let slot: BTreeMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(s, p)| (*p, s)).collect();
        let xc = pair.xcheck().clone();
        let x = pair.x().clone();
        let gen_in = |frame: &Frame, class: GenClass, s: usize| Form::gen_at(frame, frame.slot_index(class, s).unwrap());
        let rv = |i: usize, j: usize| Poly::var(&r_var(i, j));

        // e_{ik} = dr_{ik} − Σ_j r_{ij} e_{jk}, built by increasing k − i.
        let recurse_down = |frame: &Frame, class: GenClass| -> Vec<Form> {
            let mut out: Vec<Option<Form>> = vec![None; n];
            for span in 1..k {
                for i in 1..=k - span {
                    let kk = i + span;
                    let mut form = gen_in(frame, class, slot[&(i, kk)]);
                    for j in i + 1..kk {
                        let inner = out[slot[&(j, kk)]].as_ref().unwrap();
                        form = &form - &inner.mul_poly(&rv(i, j));
                    }
                    out[slot[&(i, kk)]] = Some(form);
                }
            }
            out.into_iter().map(Option::unwrap).collect()
        };
        let f_exp = recurse_down(&xc, GenClass::ComplexFiber);
        let e_exp = recurse_down(&xc, GenClass::Base);

        let fc_exp = dual_fiber_forms(&x, &pairs, false);
        let e_exp_a: Vec<Form> = e_exp.iter().map(|e| e.transfer(&x)).collect::<Result<_>>()?;

        let mut gens_b = Vec::new();
        let mut gens_a = Vec::new();
        for (s, (i, j)) in pairs.iter().enumerate() {
            gens_b.push(Generator::new(format!("f_{}", idx(*i, *j)), GenClass::ComplexFiber, s));
            gens_a.push(Generator::new(format!("f̌_{}", idx(*i, *j)), GenClass::SymplecticFiber, s));
        }
        for (s, (i, j)) in pairs.iter().enumerate() {
            gens_b.push(Generator::new(format!("e_{}", idx(*i, *j)), GenClass::Base, s));
            gens_a.push(Generator::new(format!("e_{}", idx(*i, *j)), GenClass::Base, s));
        }
        let frame_b = FrameSpec::framed("nil.fe", &xc, gens_b, f_exp.into_iter().chain(e_exp).collect())?;
        let frame_a = FrameSpec::framed("nil.f̌e", &x, gens_a, fc_exp.into_iter().chain(e_exp_a).collect())?;
        Ok(NilData { k, pairs, pair, frame_b, frame_a })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair(&self) -> &SemiflatPair<Q> {
        &self.pair
    }

    pub fn frame_b(&self) -> &Frame {
        &self.frame_b
    }

    pub fn frame_a(&self) -> &Frame {
        &self.frame_a
    }

    pub fn slot(&self, i: usize, j: usize) -> Option<usize> {
        self.pairs.iter().position(|p| *p == (i, j))
    }

    fn frame_gen(&self, frame: &Frame, class: GenClass, i: usize, j: usize) -> Form {
        let s = self.slot(i, j).expect("index pair in range");
        Form::gen_at(frame, frame.slot_index(class, s).unwrap())
    }

    /// `e_{ij}` in the `(f, e)` frame.
    pub fn e(&self, i: usize, j: usize) -> Form {
        self.frame_gen(&self.frame_b, GenClass::Base, i, j)
    }

    /// `f_{ij}` in the `(f, e)` frame.
    pub fn f(&self, i: usize, j: usize) -> Form {
        self.frame_gen(&self.frame_b, GenClass::ComplexFiber, i, j)
    }

    /// `f̌_{ij}` in the `(f̌, e)` frame.
    pub fn fcheck(&self, i: usize, j: usize) -> Form {
        self.frame_gen(&self.frame_a, GenClass::SymplecticFiber, i, j)
    }

    /// `e_{ij}` in the `(f̌, e)` frame.
    pub fn e_a(&self, i: usize, j: usize) -> Form {
        self.frame_gen(&self.frame_a, GenClass::Base, i, j)
    }

    /// `ω = Σ f_{ij}∧e_{ij}` in the `(f, e)` frame.
    pub fn omega_b(&self) -> Form {
        let mut w = Form::zero(&self.frame_b);
        for (i, j) in &self.pairs {
            w = &w + &self.f(*i, *j).wedge(&self.e(*i, *j)).unwrap();
        }
        w
    }

    /// Every frame 1-form with its coordinate expansion, labelled.
    pub fn frame_expansions(&self) -> Vec<(String, Form)> {
        let mut out = Vec::new();
        for frame in [&self.frame_b, &self.frame_a] {
            for (i, g) in frame.generators().iter().enumerate() {
                if frame.same_as(&self.frame_a) && g.class == GenClass::Base {
                    continue;
                }
                out.push((g.label.clone(), frame.expansion(i).expect("framed")));
            }
        }
        out
    }
}

/// Cotangent-fiber forms dual to `f`: `f̌_{jk} = dθ̌_{jk} + Σ_{i<j} r_{ij} dθ̌_{ik}`.
///
/// With `recursive` set, uses `dθ̌_{jk} + Σ_{i<j} r_{ij} f̌_{ik}` instead. The two
/// agree for `K ≤ 3`; from `K = 4` on the recursive forms are neither dual
/// to `f` nor lattice invariant, which [`dual_pairing`] records.
pub fn dual_fiber_forms(x: &Frame, pairs: &[(usize, usize)], recursive: bool) -> Vec<Form> {
    let slot: BTreeMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(s, p)| (*p, s)).collect();
    let dtc = |j: usize, k: usize| Form::gen_at(x, x.slot_index(GenClass::SymplecticFiber, slot[&(j, k)]).unwrap());
    let mut out: Vec<Option<Form>> = vec![None; pairs.len()];
    for &(j, k) in pairs.iter() {
        let mut form = dtc(j, k);
        for i in 1..j {
            let inner = if recursive { out[slot[&(i, k)]].clone().unwrap() } else { dtc(i, k) };
            form = &form + &inner.mul_poly(&Poly::var(&r_var(i, j)));
        }
        out[slot[&(j, k)]] = Some(form);
    }
    out.into_iter().map(Option::unwrap).collect()
}

/// The lattice action on coordinates, with symbolic or specialised `a`.
#[derive(Clone, Debug)]
pub struct GammaAction {
    r_images: BTreeMap<String, Poly>,
    jacobian: PolyMatrix<Q>,
    dual: PolyMatrix<Q>,
}

impl GammaAction {
    /// `r'_{ik} = r_{ik} + Σ_{j=i+1}^{k−1} a_{ij} r_{jk} + a_{ik}` with every `a_{ij}` symbolic.
    pub fn symbolic(nd: &NilData) -> Result<Self> {
        Self::with_values(nd, &BTreeMap::new())
    }

    /// The action with some `a_{ij}` fixed to rational values.
    pub fn with_values(nd: &NilData, values: &BTreeMap<String, Q>) -> Result<Self> {
        let av = |i: usize, j: usize| match values.get(&a_var(i, j)) {
            Some(v) => Poly::constant(v.clone()),
            None => Poly::var(&a_var(i, j)),
        };
        let mut r_images = BTreeMap::new();
        for &(i, kk) in &nd.pairs {
            let mut img = &Poly::var(&r_var(i, kk)) + &av(i, kk);
            for j in i + 1..kk {
                img = &img + &(&av(i, j) * &Poly::var(&r_var(j, kk)));
            }
            r_images.insert(r_var(i, kk), img);
        }
        let names: Vec<String> = nd.pairs.iter().map(|(i, j)| r_var(*i, *j)).collect();
        let jacobian: PolyMatrix<Q> =
            names.iter().map(|row| names.iter().map(|col| r_images[row].diff(col)).collect()).collect();
        let inv = invert_poly_matrix(&jacobian).ok_or(Error::NotPolynomiallyInvertible)?;
        Ok(GammaAction { r_images, jacobian, dual: poly_transpose(&inv) })
    }

    pub fn r_images(&self) -> &BTreeMap<String, Poly> {
        &self.r_images
    }

    /// Pull back a form given in one of the pair's coordinate frames.
    pub fn apply(&self, a: &Form) -> Result<Form> {
        let frame = a.frame();
        if !frame.is_coordinate() {
            return Err(Error::WrongFrame(format!("lattice action needs coordinates, got `{}`", frame.name())));
        }
        let mut images = Vec::with_capacity(frame.len());
        for g in frame.generators() {
            let matrix = match g.class {
                GenClass::Base | GenClass::ComplexFiber => &self.jacobian,
                GenClass::SymplecticFiber => &self.dual,
                other => return Err(Error::WrongFrame(format!("no lattice action on {} generators", other.as_str()))),
            };
            let mut img = Form::zero(frame);
            for (t, c) in matrix[g.slot].iter().enumerate() {
                if !c.is_zero() {
                    img = &img + &Form::gen_at(frame, frame.slot_index(g.class, t).unwrap()).mul_poly(c);
                }
            }
            images.push(img);
        }
        let map = &self.r_images;
        a.substitute(frame, &images, &|p: &Poly| p.subst(map))
    }
}

/// Every frame form is fixed by the symbolic lattice action, and the bare
/// coordinate form `dr_{1,3}` is not (when `K ≥ 3`).
pub fn check_gamma_invariance(nd: &NilData) -> Result<Report> {
    let mut r = Report::new("lattice invariance of frame forms");
    r.config("K", nd.k);
    let action = GammaAction::symbolic(nd)?;
    for (label, form) in nd.frame_expansions() {
        let moved = action.apply(&form)?;
        let diff = &moved - &form;
        r.check(&format!("gamma.{label}"), diff.is_zero(), format!("{label} is invariant"), || diff.to_string());
    }
    if nd.k >= 3 {
        let xc = nd.pair.xcheck();
        let dr13 = Form::gen(xc, &format!("dr_{}", idx(1, 3)))?;
        let residue = &action.apply(&dr13)? - &dr13;
        r.check("gamma.control_dr13", !residue.is_zero(), "dr_{1,3} alone is not invariant", || {
            "dr_{1,3} unexpectedly invariant".into()
        });
        r.data("control_residue", residue.to_string());
    }
    Ok(r)
}

/// Structure equations `de_{ij} = −Σ e_{ik}∧e_{kj}`, `df_{ij} = −Σ e_{ik}∧f_{kj}`,
/// checked through the frame's own structure data and through a direct
/// coordinate computation. The `df̌` equations are recorded as data.
pub fn structure_equations(nd: &NilData) -> Result<Report> {
    let mut r = Report::new("structure equations");
    r.config("K", nd.k);
    for &(i, j) in &nd.pairs {
        let mut de = Form::zero(&nd.frame_b);
        let mut df = Form::zero(&nd.frame_b);
        for k in i + 1..j {
            de = &de - &nd.e(i, k).wedge(&nd.e(k, j))?;
            df = &df - &nd.e(i, k).wedge(&nd.f(k, j))?;
        }
        for (name, gen, expected) in [("e", nd.e(i, j), de), ("f", nd.f(i, j), df)] {
            let label = format!("{name}_{}", idx(i, j));
            let via_frame = exterior_d(&gen);
            let direct = exterior_d(&gen.expand_fully()).to_frame(&nd.frame_b)?;
            let ok = via_frame == expected && direct == expected;
            r.check(&format!("structure.d{label}"), ok, format!("d{label} = {expected}"), || {
                format!("frame gives {via_frame}, coordinates give {direct}")
            });
        }
    }
    let mut dfc = serde_json::Map::new();
    for &(i, j) in &nd.pairs {
        dfc.insert(format!("df̌_{}", idx(i, j)), exterior_d(&nd.fcheck(i, j)).to_string().into());
    }
    r.data("dfcheck", serde_json::Value::Object(dfc));
    let top = |frame: &Frame, class: GenClass| -> Result<(Form, Form)> {
        let m = frame.class_mask(class);
        let framed = Form::monomial(frame, m, Poly::one()).expand_fully();
        let parent = framed.frame().clone();
        Ok((framed, Form::monomial(&parent, parent.class_mask(class), Poly::one())))
    };
    for (id, class) in [("structure.top_e", GenClass::Base), ("structure.top_f", GenClass::ComplexFiber)] {
        let (lhs, rhs) = top(&nd.frame_b, class)?;
        r.check(id, lhs == rhs, format!("top wedge of {} frame forms equals the coordinate volume", class.as_str()), || {
            lhs.to_string()
        });
    }
    Ok(r)
}

/// Coefficient matrix of a frame's fiber generators in coordinate differentials.
fn fiber_matrix(frame: &Frame, class: GenClass) -> PolyMatrix<Q> {
    let parent = frame.parent().expect("framed").clone();
    let n = frame.class_mask(class).count_ones() as usize;
    (0..n)
        .map(|s| {
            let e = frame.expansion(frame.slot_index(class, s).unwrap()).unwrap();
            (0..n).map(|t| e.coefficient(bit(parent.slot_index(class, t).unwrap()))).collect()
        })
        .collect()
}

/// `⟨f_{ij}, f̌_{ab}⟩ = δ_{ia}δ_{jb}` for the natural pairing of `dθ` with `dθ̌`.
pub fn dual_pairing(nd: &NilData) -> Report {
    let mut r = Report::new("dual pairing");
    r.config("K", nd.k);
    let f = fiber_matrix(&nd.frame_b, GenClass::ComplexFiber);
    let fc = fiber_matrix(&nd.frame_a, GenClass::SymplecticFiber);
    let m = poly_mat_mul(&f, &poly_transpose(&fc));
    let ok = m == poly_identity(nd.n());
    r.check("pairing.identity", ok, "pairing matrix is the identity", || format!("{m:?}"));
    let x = nd.pair.x();
    let rec = dual_fiber_forms(x, &nd.pairs, true);
    let rec_matrix: PolyMatrix<Q> = rec
        .iter()
        .map(|e| (0..nd.n()).map(|t| e.coefficient(bit(x.slot_index(GenClass::SymplecticFiber, t).unwrap()))).collect())
        .collect();
    let rec_dual = poly_mat_mul(&f, &poly_transpose(&rec_matrix)) == poly_identity(nd.n());
    r.data("recursive_formula_is_dual", rec_dual);
    r
}

/// The complex side `(ω = Σ f∧e, Ω = ⋀(f + i e))` in the `(f, e)` frame.
/// `⋀(f + i e) = ⋀ dz` because the frame change is unitriangular.
pub fn build_iib_side(nd: &NilData) -> SUStructure {
    let i = Q::imag_unit();
    let factors = nd.pairs.iter().map(|(a, b)| &nd.f(*a, *b) + &nd.e(*a, *b).scale(&i)).collect();
    SUStructure { n: nd.n(), omega: nd.omega_b(), big_omega: OmegaSpec::Factored(factors), polarization: None }
}

/// The symplectic side `(ω̌ = Σ dθ̌∧dr, Ω̌ = ⋀(f̌ + i e))` in coordinates,
/// polarized by the cotangent fibers with the computed phase.
pub fn build_iia_side(nd: &NilData) -> Result<SUStructure> {
    let i = Q::imag_unit();
    let x = nd.pair.x();
    let factors: Vec<Form> = nd
        .pairs
        .iter()
        .map(|(a, b)| (&nd.fcheck(*a, *b) + &nd.e_a(*a, *b).scale(&i)).to_frame(x))
        .collect::<Result<_>>()?;
    let mut s = SUStructure {
        n: nd.n(),
        omega: nd.pair.darboux().omega().clone(),
        big_omega: OmegaSpec::Factored(factors),
        polarization: None,
    };
    let c = pure_fiber_coefficient(&s, GenClass::SymplecticFiber)?;
    let phase = computed_phase(&c).ok_or_else(|| Error::Degenerate(format!("pure fiber coefficient {c} has no fixed phase")))?;
    s.polarization = Some(Polarization { fiber_class: GenClass::SymplecticFiber, phase });
    Ok(s)
}

/// Balanced but not Kähler-like: `d(ω^{n−1}) = 0` and, for `n ≥ 3`, `d(ω^{n−2}) ≠ 0`.
pub fn check_balanced(s: &SUStructure) -> Result<Report> {
    let mut r = Report::new("balanced metric");
    r.config("n", s.n);
    let d1 = exterior_d(&s.omega_power(s.n - 1)?);
    r.check("balanced.closed_power", d1.is_zero(), "d(ω^{n-1}) = 0", || d1.to_string());
    if s.n >= 3 {
        let d2 = exterior_d(&s.omega_power(s.n - 2)?);
        r.check("balanced.lower_power_not_closed", !d2.is_zero(), "d(ω^{n-2}) ≠ 0", || "d(ω^{n-2}) = 0".into());
    }
    Ok(r)
}

/// Everything about one member of the family in a single report.
pub fn check_family(nd: &NilData) -> Result<Report> {
    let mut r = Report::new(format!("nilmanifold K={}", nd.k));
    r.config("K", nd.k);
    r.config("n", nd.n());
    r.absorb("", structure_equations(nd)?);
    r.absorb("", check_gamma_invariance(nd)?);
    r.absorb("", dual_pairing(nd));
    r.absorb("", check_balanced(&build_iib_side(nd))?);
    r.absorb("", check_mirror_pair(nd)?);
    Ok(r)
}

/// Both systems, the mirror relation between them, conformal factors and fluxes.
pub fn check_mirror_pair(nd: &NilData) -> Result<Report> {
    let n = nd.n();
    let pair = &nd.pair;
    let mut r = Report::new("mirror pair");
    r.config("K", nd.k);
    let b_side = build_iib_side(nd);
    r.absorb("iib.", check_iib(&b_side)?);
    let a_side = build_iia_side(nd)?;
    r.absorb("iia.", check_iia(&a_side)?);

    let omega_check = b_side.omega.to_frame(pair.xcheck())?;
    let mirror = mirror_transform(&omega_check, pair)?;
    r.check("mirror.factored_formula", mirror.factored_agrees, "FT(e^{2ω}) matches the factored formula", || {
        mirror.transformed.to_string()
    });
    r.absorb("mirror.", check_iia(&mirror.structure)?);
    let ratio = mirror.transformed.scalar_ratio(&a_side.omega_form()?);
    let expected = involution_sign::<Q>(n);
    r.check(
        "mirror.omega_match",
        ratio.as_ref() == Some(&expected),
        format!("FT(e^{{2ω}}) = {} Ω̌", expected.render()),
        || format!("ratio {:?}", ratio.as_ref().map(Scalar::render)),
    );

    let fb = conformal_factor(&b_side)?;
    let fa = conformal_factor(&mirror.structure)?;
    r.data("conformal_factor_iib", fb.to_string());
    r.data("conformal_factor_iia", fa.to_string());
    let four_n = crate::scalar::powi(&Q::from_int(4), n as i32);
    match (fa.constant(), fb.constant()) {
        (Some(a), Some(b)) => {
            let prod = a * b;
            r.check("mirror.conformal_product", prod == four_n, format!("F·F̌ = {}", four_n.render()), || prod.render());
        }
        _ => r.fail("mirror.conformal_product", "conformal factors are not constant", Some(format!("{fa}; {fb}"))),
    }

    let rho_b = flux_iib(&b_side)?.form.to_frame(pair.xcheck())?;
    let rho_a = flux_iia(&mirror.structure)?.form;
    let db = exterior_d(&rho_b);
    r.check("flux.rho_b_closed", db.is_zero(), "dρ_B = 0", || db.to_string());
    let da = exterior_d(&rho_a);
    r.check("flux.rho_a_closed", da.is_zero(), "dρ_A = 0", || da.to_string());
    r.data("rho_b", rho_b.to_string());
    r.data("rho_a", rho_a.to_string());
    let transformed = fm_backward(&rho_a, pair)?.to_frame(pair.xcheck())?;
    let c = flux_constant(n);
    let defect = &transformed - &rho_b.scale(&c);
    r.check("flux.correspondence", defect.is_zero(), format!("FT(ρ_A) = {} ρ_B", c.render()), || defect.to_string());
    Ok(r)
}

/// `ω̌` of the three-dimensional Iwasawa example on a standard `n = 3` pair:
/// `Σ μ_ij dθ̌_i∧dr_j` with `μ = [[1,0,0],[0,1+r_1²,−r_1],[0,−r_1,1]]`.
pub fn iwasawa_omega_check(pair: &SemiflatPair<Q>) -> Result<Form> {
    if pair.n() != 3 {
        return Err(Error::InvalidInput("the Iwasawa example needs n = 3".into()));
    }
    let xc = pair.xcheck();
    let r1 = Poly::var(&pair.base_vars()[0]);
    let mu = [
        [Poly::one(), Poly::zero(), Poly::zero()],
        [Poly::zero(), &Poly::one() + &r1.pow(2), -&r1],
        [Poly::zero(), -&r1, Poly::one()],
    ];
    let mut w = Form::zero(xc);
    for (i, row) in mu.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = Form::gen_at(xc, xc.slot_index(GenClass::ComplexFiber, i).unwrap());
            let b = Form::gen_at(xc, xc.slot_index(GenClass::Base, j).unwrap());
            w = &w + &t.wedge(&b)?.mul_poly(c);
        }
    }
    Ok(w)
}

/// The displayed Iwasawa holomorphic form
/// `(dθ_1 + i dr_1)∧((dθ_2 + r_1 dθ_3) + i dr_2)∧(dθ_3 + i(dr_3 − r_1 dr_2))`.
pub fn iwasawa_displayed_omega(pair: &SemiflatPair<Q>) -> Result<Form> {
    let x = pair.x();
    let g = |l: &str| Form::gen(x, l);
    let i = Q::imag_unit();
    let r1 = Poly::var(&pair.base_vars()[0]);
    let f1 = &g("dθ_1")? + &g("dr_1")?.scale(&i);
    let f2 = &(&g("dθ_2")? + &g("dθ_3")?.mul_poly(&r1)) + &g("dr_2")?.scale(&i);
    let f3 = &g("dθ_3")? + &(&g("dr_3")? - &g("dr_2")?.mul_poly(&r1)).scale(&i);
    Form::wedge_all(x, &[f1, f2, f3])
}

/// Send a `K = 3` form to the standard `n = 3` pair via
/// `(12, 23, 13) ↦ (1, 2, 3)`.
pub fn relabel_k3(a: &Form, standard: &SemiflatPair<Q>) -> Result<Form> {
    let frame = a.frame();
    let order = [(1, 2), (2, 3), (1, 3)];
    let (target, fiber_src, fiber_dst) = if frame.class_mask(GenClass::SymplecticFiber) != 0 {
        (standard.x(), "dθ̌", "dθ")
    } else {
        (standard.xcheck(), "dθ", "dθ̌")
    };
    let mut images = Vec::with_capacity(frame.len());
    for g in frame.generators() {
        let pos = order
            .iter()
            .position(|(i, j)| g.label == format!("{fiber_src}_{}", idx(*i, *j)) || g.label == format!("dr_{}", idx(*i, *j)))
            .ok_or_else(|| Error::UnknownGenerator(g.label.clone()))?;
        let label = if g.class == GenClass::Base {
            format!("dr_{}", pos + 1)
        } else {
            format!("{fiber_dst}_{}", pos + 1)
        };
        images.push(Form::gen(target, &label)?);
    }
    let map: BTreeMap<String, Poly> =
        order.iter().enumerate().map(|(p, (i, j))| (r_var(*i, *j), Poly::var(&format!("r_{}", p + 1)))).collect();
    a.substitute(target, &images, &|p: &Poly| p.subst(&map))
}

/// The `K = 3` member reproduces the Iwasawa data after relabelling.
pub fn check_k3_relabel(nd: &NilData) -> Result<Report> {
    if nd.k != 3 {
        return Err(Error::InvalidInput("relabel check needs K = 3".into()));
    }
    let std = SemiflatPair::standard(3)?;
    let mut r = Report::new("K=3 against the Iwasawa example");
    let w = relabel_k3(&nd.omega_b().to_frame(nd.pair.xcheck())?, &std)?;
    let expected = iwasawa_omega_check(&std)?;
    r.check("relabel.omega", w == expected, "Σ f∧e becomes the Iwasawa ω̌", || w.to_string());
    let om = relabel_k3(&build_iia_side(nd)?.omega_form()?, &std)?;
    let shown = iwasawa_displayed_omega(&std)?;
    // Dictionary order (12, 13, 23) differs from (12, 23, 13) by one transposition.
    let ok = om == shown.neg_form();
    r.check("relabel.big_omega", ok, "⋀(f̌ + i e) becomes minus the displayed Iwasawa Ω", || om.to_string());
    Ok(r)
}

/// `Re Ω = (Ω + Ω̄)/2` for a form in a conjugation-closed frame.
pub fn real_part(a: &Form) -> Result<Form> {
    Ok((a + &a.conj()?).scale(&crate::q(1, 2)))
}

/// The three-dimensional Iwasawa pair on the standard `n = 3` pair: both
/// systems, the displayed data, flux monomials and their correspondence.
pub fn check_iwasawa() -> Result<Report> {
    let pair = SemiflatPair::standard(3)?;
    let mut r = Report::new("Iwasawa example");
    r.config("n", 3);
    let wc = iwasawa_omega_check(&pair)?;
    let b_side = crate::sustruct::complex_side_structure(&wc, &pair)?;
    r.absorb("iib.", check_iib(&b_side)?);
    let dw = exterior_d(&wc);
    r.check("iwasawa.not_kahler", !dw.is_zero(), "dω̌ ≠ 0", || "dω̌ = 0".into());
    let dw2 = exterior_d(&wc.wedge(&wc)?);
    r.check("iwasawa.balanced", dw2.is_zero(), "dω̌² = 0", || dw2.to_string());

    let mirror = mirror_transform(&wc, &pair)?;
    r.absorb("iia.", check_iia(&mirror.structure)?);
    let om = mirror.structure.omega_form()?;
    let shown = iwasawa_displayed_omega(&pair)?;
    let sign = involution_sign::<Q>(3);
    r.check("iwasawa.omega_display", om == shown.scale(&sign), "FT(e^{2ω̌}) = −(displayed Ω)", || om.to_string());
    let dre = exterior_d(&real_part(&om)?);
    r.check("iwasawa.real_part_closed", dre.is_zero(), "d(Re Ω) = 0", || dre.to_string());
    r.data("det_mu", mirror.det_mu.to_string());
    let mut pt = BTreeMap::new();
    pt.insert(pair.base_vars()[0].clone(), crate::q(5, 1));
    let mut points = crate::sustruct::default_points(pair.base_vars());
    points.push(pt);
    r.absorb("", crate::sustruct::check_hermitian_at(&mirror.mu, &points));

    let fb = conformal_factor(&b_side)?;
    let fa = conformal_factor(&mirror.structure)?;
    r.data("conformal_factor_iib", fb.to_string());
    r.data("conformal_factor_iia", fa.to_string());
    let prod = fa.constant().zip(fb.constant()).map(|(a, b)| a * b);
    r.check("iwasawa.conformal_product", prod == Some(Q::from_int(64)), "F·F̌ = 64", || format!("{fa}; {fb}"));

    let rho_b = flux_iib(&b_side)?.form.to_frame(pair.xcheck())?;
    let rho_a = flux_iia(&mirror.structure)?.form;
    let labels_b = ["dr_1", "dθ̌_1", "dr_2", "dθ̌_2"];
    let labels_a = ["dr_1", "dr_2", "dθ_3"];
    let checks = [
        ("flux.rho_b_monomial", &rho_b, Form::gens(pair.xcheck(), &labels_b)?, labels_b.join("∧"), "ρ_B"),
        ("flux.rho_a_monomial", &rho_a, Form::gens(pair.x(), &labels_a)?, labels_a.join("∧"), "ρ_A"),
    ];
    for (id, rho, mono, shown, name) in checks {
        match rho.scalar_ratio(&mono).filter(|c| !c.is_zero()) {
            Some(c) => {
                r.pass(id, format!("{name} = ({}) {shown}", c.render()));
                r.data(&format!("{id}_constant"), c.render());
            }
            None => r.fail(id, format!("{name} is not a multiple of {shown}"), Some(rho.to_string())),
        }
    }
    let transformed = fm_backward(&rho_a, &pair)?.to_frame(pair.xcheck())?;
    let c = flux_constant(3);
    let defect = &transformed - &rho_b.scale(&c);
    r.check("flux.correspondence", defect.is_zero(), format!("FT(ρ_A) = {} ρ̌_B", c.render()), || defect.to_string());
    Ok(r)
}
