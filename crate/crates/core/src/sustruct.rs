//! SU(n) structures, the Type IIA and Type IIB systems, conformal factors,
//! flux currents and the mirror transform `ω̌ ↦ (ω, FT(e^{2ω̌}))`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::calculus::{d_lambda, del, delbar, exterior_d, lefschetz, ComplexBasis, SymplecticData};
use crate::error::{Error, Result};
use crate::exterior::{bit, degree, GenClass};
use crate::fourier::{fm_forward, involution_sign, SemiflatPair};
use crate::linalg::{poly_det, scalar_det, solve_columns, PolyMatrix};
use crate::report::Report;
use crate::scalar::{powi, sign_scalar, Scalar};
use crate::{Form, Frame, Poly, Q};

/// The holomorphic volume form, either as an ordered list of `(1,0)`
/// factors or as a general form.
#[derive(Clone, Debug, PartialEq)]
pub enum OmegaSpec {
    Factored(Vec<Form>),
    General(Form),
}

/// Constant phase `e^{iθ}` of the pure fiber component of `Ω`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Zero,
    HalfPi,
    Pi,
    ThreeHalfPi,
}

impl Phase {
    pub fn unit(self) -> Q {
        match self {
            Phase::Zero => crate::q(1, 1),
            Phase::HalfPi => crate::qi(0, 1),
            Phase::Pi => crate::q(-1, 1),
            Phase::ThreeHalfPi => crate::qi(0, -1),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Zero => "0",
            Phase::HalfPi => "pi/2",
            Phase::Pi => "pi",
            Phase::ThreeHalfPi => "3pi/2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "0" => Phase::Zero,
            "pi/2" => Phase::HalfPi,
            "pi" => Phase::Pi,
            "3pi/2" => Phase::ThreeHalfPi,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Polarization {
    pub fiber_class: GenClass,
    pub phase: Phase,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SUStructure {
    pub n: usize,
    pub omega: Form,
    pub big_omega: OmegaSpec,
    pub polarization: Option<Polarization>,
}

/// `F = num / den` as an exact rational function.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalFactor {
    pub num: Poly,
    pub den: Poly,
}

impl ConformalFactor {
    fn normalized(num: Poly, den: Poly) -> Self {
        if let Some(c) = den.constant_value() {
            return ConformalFactor { num: num.scale(&(Q::one() / c)), den: Poly::one() };
        }
        if let Some(c) = num.scalar_ratio(&den) {
            return ConformalFactor { num: Poly::constant(c), den: Poly::one() };
        }
        ConformalFactor { num, den }
    }

    pub fn constant(&self) -> Option<Q> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    /// `F` as a polynomial, when the denominator is constant.
    pub fn as_poly(&self) -> Option<Poly> {
        self.den.is_one().then(|| self.num.clone())
    }

    /// `Some(true)` when `F` is provably nowhere zero, `None` if undecided.
    pub fn nowhere_vanishing(&self) -> Option<bool> {
        if let Some(c) = self.constant() {
            return Some(!c.is_zero());
        }
        let signed = |p: &Poly| obviously_positive(p) || obviously_positive(&-p);
        if signed(&self.num) && signed(&self.den) {
            Some(true)
        } else {
            None
        }
    }
}

impl fmt::Display for ConformalFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Real coefficients, positive constant term, all other terms positive
/// with even exponents.
pub fn obviously_positive(p: &Poly) -> bool {
    if p.is_zero() {
        return false;
    }
    let mut has_constant = false;
    for (e, c) in p.terms() {
        if c.real_sign() != Some(std::cmp::Ordering::Greater) {
            return false;
        }
        if e.iter().any(|k| k % 2 == 1) {
            return false;
        }
        if e.iter().all(|k| *k == 0) {
            has_constant = true;
        }
    }
    has_constant
}

impl SUStructure {
    pub fn frame(&self) -> &Frame {
        self.omega.frame()
    }

    /// `Ω` as a single form.
    pub fn omega_form(&self) -> Result<Form> {
        match &self.big_omega {
            OmegaSpec::Factored(fs) => Form::wedge_all(self.frame(), fs),
            OmegaSpec::General(f) => Ok(f.clone()),
        }
    }

    pub fn omega_power(&self, k: usize) -> Result<Form> {
        let mut acc = Form::one(self.frame());
        for _ in 0..k {
            acc = acc.wedge(&self.omega)?;
        }
        Ok(acc)
    }

    /// Complex frame spanned by the factors of `Ω` and their conjugates.
    pub fn complex_basis(&self) -> Result<ComplexBasis<Q>> {
        let OmegaSpec::Factored(fs) = &self.big_omega else {
            return Err(Error::NotSupported("complex structure needs a factored Ω".into()));
        };
        let labels: Vec<String> = (1..=fs.len()).map(|i| format!("ζ_{i}")).collect();
        ComplexBasis::from_factors(self.frame(), fs, &labels)
    }

    /// Re-express every form in another frame.
    pub fn to_frame(&self, target: &Frame) -> Result<Self> {
        let big_omega = match &self.big_omega {
            OmegaSpec::Factored(fs) => {
                OmegaSpec::Factored(fs.iter().map(|f| f.to_frame(target)).collect::<Result<_>>()?)
            }
            OmegaSpec::General(f) => OmegaSpec::General(f.to_frame(target)?),
        };
        Ok(SUStructure { n: self.n, omega: self.omega.to_frame(target)?, big_omega, polarization: self.polarization })
    }

    fn validate(&self) -> Result<()> {
        let check_frame = |f: &Form| {
            if f.same_frame(&self.omega) {
                Ok(())
            } else {
                Err(Error::FrameMismatch {
                    left: self.omega.frame().name().into(),
                    right: f.frame().name().into(),
                })
            }
        };
        match &self.big_omega {
            OmegaSpec::Factored(fs) => {
                if fs.len() != self.n {
                    return Err(Error::InvalidInput(format!("Ω needs {} factors, got {}", self.n, fs.len())));
                }
                for f in fs {
                    check_frame(f)?;
                }
            }
            OmegaSpec::General(f) => check_frame(f)?,
        }
        if self.frame().len() != 2 * self.n {
            return Err(Error::InvalidInput(format!(
                "frame has {} generators, expected {}",
                self.frame().len(),
                2 * self.n
            )));
        }
        Ok(())
    }
}

/// `Ω∧Ω̄ = i^n F ω^n/n!`.
pub fn conformal_factor(s: &SUStructure) -> Result<ConformalFactor> {
    s.validate()?;
    let om = s.omega_form()?;
    let top = om.wedge(&om.conj()?)?;
    let mut nfact = Q::one();
    for k in 1..=s.n as i64 {
        nfact = nfact * Q::from_int(k);
    }
    let vol = s.omega_power(s.n)?.scale(&(Q::one() / nfact));
    let full = s.frame().full_mask();
    let den = vol.coefficient(full);
    if den.is_zero() {
        return Err(Error::Degenerate("ω^n vanishes".into()));
    }
    let i_n = powi(&Q::imag_unit(), s.n as i32);
    let num = top.coefficient(full).scale(&(Q::one() / i_n));
    Ok(ConformalFactor::normalized(num, den))
}

fn push_su_checks(s: &SUStructure, r: &mut Report) -> Result<Option<ConformalFactor>> {
    s.validate()?;
    let om = s.omega_form()?;
    let top = s.omega_power(s.n)?;
    r.check("su.nondegenerate", !top.is_zero(), "ω^n ≠ 0", || "ω^n = 0".into());
    let wo = om.wedge(&s.omega)?;
    r.check("su.compatible", wo.is_zero(), "Ω∧ω = 0", || wo.to_string());
    if top.is_zero() {
        return Ok(None);
    }
    let f = conformal_factor(s)?;
    r.data("conformal_factor", f.to_string());
    match f.nowhere_vanishing() {
        Some(true) => r.pass("su.conformal_factor", format!("F = {f} is nowhere zero")),
        Some(false) => r.fail("su.conformal_factor", "F vanishes identically", Some(f.to_string())),
        None => r.undetermined("su.conformal_factor", format!("F = {f}, vanishing not decided")),
    }
    match s.complex_basis() {
        Ok(basis) => {
            let w = basis.to_complex(&s.omega)?;
            let split = ComplexBasis::<Q>::split();
            let bad = &w.bidegree_project(2, 0, split) + &w.bidegree_project(0, 2, split);
            r.check("su.omega_type_11", bad.is_zero(), "ω is of type (1,1)", || bad.to_string());
        }
        Err(Error::NotSupported(msg)) => r.undetermined("su.omega_type_11", msg),
        Err(Error::NotPolynomiallyInvertible) => {
            r.undetermined("su.omega_type_11", "Ω factors do not give a polynomial frame")
        }
        Err(e) => return Err(e),
    }
    Ok(Some(f))
}

/// Type IIB: `dΩ = 0` and `d(ω^{n−1}) = 0`.
pub fn check_iib(s: &SUStructure) -> Result<Report> {
    let mut r = Report::new("type IIB system");
    r.config("n", s.n);
    push_su_checks(s, &mut r)?;
    let d_om = exterior_d(&s.omega_form()?);
    r.check("iib.holomorphic", d_om.is_zero(), "dΩ = 0", || d_om.to_string());
    let d_bal = exterior_d(&s.omega_power(s.n.saturating_sub(1))?);
    r.check("iib.balanced", d_bal.is_zero(), "d(ω^{n-1}) = 0", || d_bal.to_string());
    r.data("kahler", exterior_d(&s.omega).is_zero());
    Ok(r)
}

/// Coefficient of the top fiber monomial of `Ω`.
pub fn pure_fiber_coefficient(s: &SUStructure, fiber: GenClass) -> Result<Poly> {
    let om = s.omega_form()?;
    let m = s.frame().class_mask(fiber);
    if degree(m) != s.n {
        return Err(Error::WrongFrame(format!("frame needs {} {} generators", s.n, fiber.as_str())));
    }
    Ok(om.coefficient(m))
}

/// Phase of the pure fiber component when it is decidable.
pub fn computed_phase(c: &Poly) -> Option<Phase> {
    for p in [Phase::Zero, Phase::HalfPi, Phase::Pi, Phase::ThreeHalfPi] {
        let rotated = c.scale(&p.unit().conj());
        if let Some(v) = rotated.constant_value() {
            if v.real_sign() == Some(std::cmp::Ordering::Greater) {
                return Some(p);
            }
        } else if obviously_positive(&rotated) {
            return Some(p);
        }
    }
    None
}

fn split_for(pol: &Polarization) -> (GenClass, GenClass) {
    (pol.fiber_class, GenClass::Base)
}

/// Type IIA: `dω = 0`, `d(π^{n,0}Ω) = 0`, `d(π^{1,n−1}Ω) = 0`, with a
/// Lagrangian fiber polarization on which `Ω` has the stated phase.
pub fn check_iia(s: &SUStructure) -> Result<Report> {
    let pol = s.polarization.ok_or(Error::MissingPolarization)?;
    let mut r = Report::new("type IIA system");
    r.config("n", s.n);
    r.config("phase", pol.phase.as_str());
    push_su_checks(s, &mut r)?;
    let split = split_for(&pol);
    let lag = s.omega.bidegree_project(2, 0, split);
    r.check("iia.lagrangian", lag.is_zero(), "fibers are Lagrangian", || lag.to_string());
    let c = pure_fiber_coefficient(s, pol.fiber_class)?;
    let phase = computed_phase(&c);
    r.data("computed_phase", phase.map(Phase::as_str).unwrap_or("undetermined"));
    let rotated = c.scale(&pol.phase.unit().conj());
    match rotated.constant_value() {
        Some(v) => {
            let ok = v.real_sign() == Some(std::cmp::Ordering::Greater);
            r.check("iia.special_polarization", ok, "pure fiber part of Ω has the stated phase", || {
                format!("coefficient {}", c)
            });
        }
        None if obviously_positive(&rotated) => r.pass("iia.special_polarization", "pure fiber part of Ω has the stated phase"),
        None if rotated.is_real() => r.undetermined("iia.special_polarization", format!("sign of {rotated} not decided")),
        None => r.fail("iia.special_polarization", "pure fiber part of Ω is not of the stated phase", Some(c.to_string())),
    }
    let dw = exterior_d(&s.omega);
    r.check("iia.symplectic", dw.is_zero(), "dω = 0", || dw.to_string());
    let om = s.omega_form()?;
    let n = s.n;
    let d0 = exterior_d(&om.bidegree_project(n, 0, split));
    r.check("iia.fiber_part_closed", d0.is_zero(), "d(π^{n,0}Ω) = 0", || d0.to_string());
    let d1 = exterior_d(&om.bidegree_project(1, n - 1, split));
    r.check("iia.mixed_part_closed", d1.is_zero(), "d(π^{1,n-1}Ω) = 0", || d1.to_string());
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    IIA,
    IIB,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FluxCurrent {
    pub form: Form,
    pub side: Side,
}

/// `ρ_B = 2i ∂∂̄(F^{-1} ω)`, returned in the structure's frame.
pub fn flux_iib(s: &SUStructure) -> Result<FluxCurrent> {
    let f = conformal_factor(s)?;
    let inv = match f.num.constant_value() {
        Some(c) if !c.is_zero() => f.den.scale(&(Q::one() / c)),
        _ => return Err(Error::NotSupported(format!("F^-1 = 1/({f}) is not polynomial"))),
    };
    let basis = s.complex_basis()?;
    let a = s.omega.mul_poly(&inv);
    let rho = del(&delbar(&a, &basis)?, &basis)?.scale(&(Q::from_int(2) * Q::imag_unit()));
    Ok(FluxCurrent { form: rho.to_frame(s.frame())?, side: Side::IIB })
}

/// `ρ_A = −i d d^Λ(F (π^{n−1,1}Ω + π^{0,n}Ω))`.
pub fn flux_iia(s: &SUStructure) -> Result<FluxCurrent> {
    let pol = s.polarization.ok_or(Error::MissingPolarization)?;
    let f = conformal_factor(s)?;
    let fp = f.as_poly().ok_or_else(|| Error::NotSupported(format!("F = {f} is not polynomial")))?;
    let split = split_for(&pol);
    let om = s.omega_form()?;
    let n = s.n;
    let part = &om.bidegree_project(n - 1, 1, split) + &om.bidegree_project(0, n, split);
    let sd = SymplecticData::new(&s.omega)?;
    let rho = exterior_d(&d_lambda(&part.mul_poly(&fp), &sd)?).scale(&-Q::imag_unit());
    Ok(FluxCurrent { form: rho, side: Side::IIA })
}

/// Expected constant `c` in `FT(ρ_A) = c ρ̌_B`.
pub fn flux_constant(n: usize) -> Q {
    let n64 = n as i64;
    let sign: Q = sign_scalar(n64 * (n64 - 1) / 2 + 1);
    sign * powi(&Q::from_int(2), 2 * n as i32 + 2)
}

/// Output of [`mirror_transform`].
#[derive(Clone, Debug)]
pub struct MirrorTransform {
    /// `(X, Σ dθ_i∧dr_i, Ω)` with `Ω` factored.
    pub structure: SUStructure,
    /// `μ_ij`, the coefficient of `dθ̌_i∧dr_j` in `ω̌`.
    pub mu: PolyMatrix<Q>,
    pub det_mu: Poly,
    /// `FT(e^{2ω̌})` computed through the integral transform.
    pub transformed: Form,
    /// Whether the factored formula agrees with the integral transform.
    pub factored_agrees: bool,
}

/// Extract the symmetric matrix `μ` from `ω̌ = Σ μ_ij dθ̌_i∧dr_j`.
pub fn mu_matrix(omega_check: &Form, pair: &SemiflatPair<Q>) -> Result<PolyMatrix<Q>> {
    let w = omega_check.to_frame(pair.xcheck())?;
    let n = pair.n();
    let xc = pair.xcheck();
    let mut mu = vec![vec![Poly::zero(); n]; n];
    let mut rebuilt = Form::zero(xc);
    for i in 0..n {
        for j in 0..n {
            let a = xc.slot_index(GenClass::ComplexFiber, i).unwrap();
            let b = xc.slot_index(GenClass::Base, j).unwrap();
            let c = w.coefficient(bit(a) | bit(b));
            let c = if a < b { c } else { -&c };
            rebuilt = &rebuilt + &Form::gen_at(xc, a).wedge(&Form::gen_at(xc, b))?.mul_poly(&c);
            mu[i][j] = c;
        }
    }
    if rebuilt != w {
        return Err(Error::InvalidInput("ω̌ is not of the form Σ μ_ij dθ̌_i∧dr_j".into()));
    }
    for i in 0..n {
        for j in 0..i {
            if mu[i][j] != mu[j][i] {
                return Err(Error::InvalidInput("μ is not symmetric".into()));
            }
        }
    }
    Ok(mu)
}

/// `Ω = FT(e^{2ω̌}) = (−1)^{n(n−1)/2} ⋀(dθ_i + i μ_i)` with `μ_i = Σ_j μ_ij dr_j`.
pub fn mirror_transform(omega_check: &Form, pair: &SemiflatPair<Q>) -> Result<MirrorTransform> {
    let mu = mu_matrix(omega_check, pair)?;
    let det_mu = poly_det(&mu);
    if det_mu.is_zero() {
        return Err(Error::Degenerate("det μ = 0".into()));
    }
    let n = pair.n();
    let x = pair.x();
    let wz = pair.complex().to_complex(omega_check)?;
    let e = wz.scale(&Q::from_int(2)).exp_nilpotent()?;
    let transformed = fm_forward(&e, pair)?;
    let sign = involution_sign::<Q>(n);
    let mut factors = Vec::with_capacity(n);
    for i in 0..n {
        let mut eta = Form::gen_at(x, x.slot_index(GenClass::SymplecticFiber, i).unwrap());
        for j in 0..n {
            let dr = Form::gen_at(x, x.slot_index(GenClass::Base, j).unwrap());
            eta = &eta + &dr.mul_poly(&mu[i][j].scale(&Q::imag_unit()));
        }
        factors.push(if i == 0 { eta.scale(&sign) } else { eta });
    }
    let factored = Form::wedge_all(x, &factors)?;
    let factored_agrees = factored == transformed;
    let phase = if sign.is_one() { Phase::Zero } else { Phase::Pi };
    let structure = SUStructure {
        n,
        omega: pair.darboux().omega().clone(),
        big_omega: OmegaSpec::Factored(factors),
        polarization: Some(Polarization { fiber_class: GenClass::SymplecticFiber, phase }),
    };
    Ok(MirrorTransform { structure, mu, det_mu, transformed, factored_agrees })
}

/// The complex-side structure `(X̌, ω̌, ⋀ dz_i)` in real coordinates.
pub fn complex_side_structure(omega_check: &Form, pair: &SemiflatPair<Q>) -> Result<SUStructure> {
    let xc = pair.xcheck();
    let mut factors = Vec::new();
    for i in 0..pair.n() {
        let t = Form::gen_at(xc, xc.slot_index(GenClass::ComplexFiber, i).unwrap());
        let r = Form::gen_at(xc, xc.slot_index(GenClass::Base, i).unwrap()).scale(&Q::imag_unit());
        factors.push(&t + &r);
    }
    Ok(SUStructure {
        n: pair.n(),
        omega: omega_check.to_frame(xc)?,
        big_omega: OmegaSpec::Factored(factors),
        polarization: None,
    })
}

/// Flat Kähler structure `ω̌ = Σ dθ̌_i∧dr_i` on the complex side.
pub fn flat_omega_check(pair: &SemiflatPair<Q>) -> Form {
    let xc = pair.xcheck();
    let mut w = Form::zero(xc);
    for i in 0..pair.n() {
        let a = xc.slot_index(GenClass::ComplexFiber, i).unwrap();
        let b = xc.slot_index(GenClass::Base, i).unwrap();
        w = &w + &Form::gen_at(xc, a).wedge(&Form::gen_at(xc, b)).unwrap();
    }
    w
}

/// Positive definiteness of `μ` at rational points via leading principal minors.
pub fn check_hermitian_at(mu: &PolyMatrix<Q>, points: &[BTreeMap<String, Q>]) -> Report {
    let mut r = Report::new("hermitian at points");
    let n = mu.len();
    for (k, pt) in points.iter().enumerate() {
        let mut vals = Vec::with_capacity(n);
        let mut ok = true;
        for row in mu {
            let mut v = Vec::with_capacity(n);
            for e in row {
                match e.eval(pt) {
                    Some(x) => v.push(x),
                    None => {
                        ok = false;
                        v.push(Q::zero());
                    }
                }
            }
            vals.push(v);
        }
        let id = format!("hermitian.point_{k}");
        if !ok {
            r.fail(&id, "point does not assign every base coordinate", None);
            continue;
        }
        let minors: Vec<Q> = (1..=n)
            .map(|m| scalar_det(&vals[..m].iter().map(|row| row[..m].to_vec()).collect::<Vec<_>>()))
            .collect();
        let rendered: Vec<String> = minors.iter().map(Scalar::render).collect();
        let bad = minors.iter().position(|m| m.real_sign() != Some(std::cmp::Ordering::Greater));
        r.check(&id, bad.is_none(), format!("leading minors {}", rendered.join(", ")), || {
            format!("minor {} = {}", bad.unwrap() + 1, rendered[bad.unwrap()])
        });
    }
    r
}

/// Default sample points: the origin and each unit coordinate point.
pub fn default_points(vars: &[String]) -> Vec<BTreeMap<String, Q>> {
    let origin: BTreeMap<String, Q> = vars.iter().map(|v| (v.clone(), Q::zero())).collect();
    let mut pts = vec![origin.clone()];
    for v in vars {
        let mut p = origin.clone();
        p.insert(v.clone(), Q::one());
        pts.push(p);
    }
    pts
}

/// Group a form's terms by coefficient monomial: `x^α ↦ constant form`.
fn split_by_monomial(a: &Form) -> BTreeMap<Vec<(String, u32)>, BTreeMap<u64, Q>> {
    let mut out: BTreeMap<Vec<(String, u32)>, BTreeMap<u64, Q>> = BTreeMap::new();
    for (m, c) in a.terms() {
        for (powers, v) in c.sorted_terms() {
            out.entry(powers).or_default().insert(*m, v);
        }
    }
    out
}

fn monomial_poly(powers: &[(String, u32)]) -> Poly {
    let mut p = Poly::one();
    for (v, k) in powers {
        p = &p * &Poly::var(v).pow(*k);
    }
    p
}

/// Whether an infinitesimal deformation represents a class of the right type.
///
/// IIB: `dδ = 0` and `δ = ω^{n−2}∧β` with `β` a primitive `(1,1)`-form.
/// IIA: `d(π^{1,n−1}δ) = 0`, `d^Λ δ = 0` and `ω∧δ = 0`.
pub fn check_deformation_class(s: &SUStructure, delta: &Form, side: Side) -> Result<Report> {
    let n = s.n;
    let delta = delta.to_frame(s.frame())?;
    let mut r = Report::new("deformation class");
    r.config("n", n);
    match side {
        Side::IIB => {
            if n < 2 || !delta.is_homogeneous(2 * n - 2) {
                return Err(Error::InvalidInput(format!("δ must be a {}-form", 2 * n - 2)));
            }
            let dd = exterior_d(&delta);
            r.check("deform.closed", dd.is_zero(), "dδ = 0", || dd.to_string());
            let basis = s.complex_basis()?;
            let wz = basis.to_complex(&s.omega)?;
            if wz.terms().values().any(|c| !c.is_constant()) {
                return Err(Error::NotSupported("ω must have constant coefficients in the Ω frame".into()));
            }
            let cf = basis.frame().clone();
            let hol = cf.class_mask(GenClass::Holomorphic);
            let anti = cf.class_mask(GenClass::AntiHolomorphic);
            let mut pow = Form::one(&cf);
            for _ in 0..n - 2 {
                pow = pow.wedge(&wz)?;
            }
            let betas: Vec<u64> = crate::exterior::bits(hol)
                .flat_map(|a| crate::exterior::bits(anti).map(move |b| bit(a) | bit(b)))
                .collect();
            let images: Vec<Form> = betas
                .iter()
                .map(|b| pow.wedge(&Form::monomial(&cf, *b, Poly::one())))
                .collect::<Result<_>>()?;
            let dz = basis.to_complex(&delta)?;
            let mut rows: Vec<u64> = images.iter().flat_map(|f| f.terms().keys().copied()).collect();
            rows.extend(dz.terms().keys().copied());
            rows.sort_unstable();
            rows.dedup();
            let columns: Vec<Vec<Q>> = images
                .iter()
                .map(|f| rows.iter().map(|m| f.coefficient(*m).constant_value().unwrap()).collect())
                .collect();
            let mut beta = Form::zero(&cf);
            let mut solvable = true;
            for (powers, coeffs) in split_by_monomial(&dz) {
                let y: Vec<Q> = rows.iter().map(|m| coeffs.get(m).cloned().unwrap_or_else(Q::zero)).collect();
                match solve_columns(&columns, &y) {
                    Some(x) => {
                        let mono = monomial_poly(&powers);
                        for (b, c) in betas.iter().zip(x) {
                            beta = &beta + &Form::monomial(&cf, *b, mono.scale(&c));
                        }
                    }
                    None => solvable = false,
                }
            }
            r.check("deform.lefschetz_image", solvable, "δ = ω^{n-2}∧β for a (1,1)-form β", || dz.to_string());
            if solvable {
                let prim = basis.to_complex(&s.omega_power(n - 1)?)?.wedge(&beta)?;
                r.check("deform.primitive", prim.is_zero(), "ω^{n-1}∧β = 0", || prim.to_string());
                r.data("beta", beta.to_string());
            }
        }
        Side::IIA => {
            let pol = s.polarization.ok_or(Error::MissingPolarization)?;
            if !delta.is_homogeneous(n) {
                return Err(Error::InvalidInput(format!("δ must be a {n}-form")));
            }
            let split = split_for(&pol);
            let d1 = exterior_d(&delta.bidegree_project(1, n - 1, split));
            r.check("deform.mixed_part_closed", d1.is_zero(), "d(π^{1,n-1}δ) = 0", || d1.to_string());
            let sd = SymplecticData::new(&s.omega)?;
            let dl = d_lambda(&delta, &sd)?;
            r.check("deform.dlambda_closed", dl.is_zero(), "d^Λ δ = 0", || dl.to_string());
            let wd = lefschetz(&delta, &sd)?;
            r.check("deform.primitive", wd.is_zero(), "ω∧δ = 0", || wd.to_string());
        }
    }
    Ok(r)
}
