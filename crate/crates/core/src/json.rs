//! JSON encodings of polynomials, forms and SU(n) structure fixtures.
//!
//! Polynomials: `{vars, terms: [{exp, re: [num, den], im: [num, den]}]}`.
//! Forms: `{frame: [labels], terms: [{gens: [labels], coeff: <poly>}]}`.
//! Integers that fit in `i64` are written as numbers, larger ones as
//! decimal strings; both are accepted on input.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exterior::{bit, bits, GenClass};
use crate::fourier::{PairLabels, SemiflatPair};
use crate::sustruct::{OmegaSpec, Phase, Polarization, SUStructure};
use crate::{Form, Frame, Poly, Q};

pub const FIXTURE_SCHEMA: &str = "syzkit-fixture-v1";

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn int_to_value(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(n.to_string()),
    }
}

fn int_from_value(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| parse_err(format!("not an integer: {n}"))),
        Value::String(s) => s.parse().map_err(|_| parse_err(format!("not an integer: {s}"))),
        other => Err(parse_err(format!("expected integer, got {other}"))),
    }
}

fn ratio_to_value(r: &BigRational) -> Value {
    json!([int_to_value(r.numer()), int_to_value(r.denom())])
}

fn ratio_from_value(v: &Value) -> Result<BigRational> {
    let a = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| parse_err("rational must be [num, den]"))?;
    let den = int_from_value(&a[1])?;
    if den.is_zero() {
        return Err(parse_err("zero denominator"));
    }
    Ok(BigRational::new(int_from_value(&a[0])?, den))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| parse_err(format!("missing field `{key}`")))
}

fn array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    field(v, key)?.as_array().ok_or_else(|| parse_err(format!("`{key}` must be an array")))
}

fn strings(v: &Value, key: &str) -> Result<Vec<String>> {
    array(v, key)?
        .iter()
        .map(|s| s.as_str().map(str::to_string).ok_or_else(|| parse_err(format!("`{key}` must hold strings"))))
        .collect()
}

pub fn poly_to_value(p: &Poly) -> Value {
    let p = p.trimmed();
    let terms: Vec<Value> = p
        .terms()
        .map(|(e, c)| json!({"exp": e, "re": ratio_to_value(&c.re), "im": ratio_to_value(&c.im)}))
        .collect();
    json!({"vars": p.vars(), "terms": terms})
}

pub fn poly_from_value(v: &Value) -> Result<Poly> {
    let vars = strings(v, "vars")?;
    let mut acc = Poly::zero();
    for t in array(v, "terms")? {
        let exp = array(t, "exp")?;
        if exp.len() != vars.len() {
            return Err(parse_err("exponent length differs from vars"));
        }
        let mut mono = Poly::constant(Q::new(ratio_from_value(field(t, "re")?)?, ratio_from_value(field(t, "im")?)?));
        for (name, e) in vars.iter().zip(exp) {
            let k = e.as_u64().ok_or_else(|| parse_err("exponents must be non-negative integers"))?;
            mono = &mono * &Poly::var(name).pow(k as u32);
        }
        acc = &acc + &mono;
    }
    Ok(acc)
}

pub fn form_to_value(a: &Form) -> Value {
    let frame = a.frame();
    let terms: Vec<Value> = a
        .terms()
        .iter()
        .map(|(m, c)| {
            let gens: Vec<&str> = bits(*m).map(|i| frame.generator(i).label.as_str()).collect();
            json!({"gens": gens, "coeff": poly_to_value(c)})
        })
        .collect();
    json!({"frame": frame.labels(), "terms": terms})
}

/// Decode a form whose frame labels match one of `frames`.
pub fn form_from_value(v: &Value, frames: &[&Frame]) -> Result<Form> {
    let labels = strings(v, "frame")?;
    let frame = frames
        .iter()
        .find(|f| f.labels() == labels)
        .ok_or_else(|| Error::WrongFrame(format!("no known frame has labels {labels:?}")))?;
    let mut acc = Form::zero(frame);
    for t in array(v, "terms")? {
        let gens = strings(t, "gens")?;
        let mut idx = Vec::with_capacity(gens.len());
        for g in &gens {
            idx.push(frame.index_of(g).ok_or_else(|| Error::UnknownGenerator(g.clone()))?);
        }
        if idx.windows(2).any(|w| w[0] >= w[1]) {
            return Err(parse_err(format!("generators {gens:?} must be distinct and in frame order")));
        }
        let m = idx.iter().fold(0, |m, i| m | bit(*i));
        acc = &acc + &Form::monomial(frame, m, poly_from_value(field(t, "coeff")?)?);
    }
    Ok(acc)
}

pub fn labels_to_value(l: &PairLabels) -> Value {
    json!({
        "symplectic_fiber": l.symplectic_fiber,
        "complex_fiber": l.complex_fiber,
        "base": l.base,
        "holomorphic": l.holomorphic,
    })
}

pub fn labels_from_value(v: &Value) -> Result<PairLabels> {
    Ok(PairLabels {
        symplectic_fiber: strings(v, "symplectic_fiber")?,
        complex_fiber: strings(v, "complex_fiber")?,
        base: strings(v, "base")?,
        holomorphic: strings(v, "holomorphic")?,
    })
}

/// Labels of a pair, read back from its frames.
pub fn pair_labels(pair: &SemiflatPair<Q>) -> PairLabels {
    let of = |frame: &Frame, class: GenClass| -> Vec<String> {
        bits(frame.class_mask(class)).map(|i| frame.generator(i).label.clone()).collect()
    };
    PairLabels {
        symplectic_fiber: of(pair.x(), GenClass::SymplecticFiber),
        complex_fiber: of(pair.xcheck(), GenClass::ComplexFiber),
        base: of(pair.x(), GenClass::Base),
        holomorphic: of(pair.complex().frame(), GenClass::Holomorphic),
    }
}

/// A structure on one side of `pair`, with every form written in that
/// side's coordinates.
pub fn su_to_fixture(s: &SUStructure, pair: &SemiflatPair<Q>) -> Result<Value> {
    let root = s.frame().root();
    let (side, coords) = if root.same_as(pair.x()) {
        ("x", pair.x())
    } else if root.same_as(pair.xcheck()) {
        ("xcheck", pair.xcheck())
    } else {
        return Err(Error::WrongFrame(format!("structure frame `{}` is not on either side of the pair", s.frame().name())));
    };
    let mut obj = Map::new();
    obj.insert("schema".into(), FIXTURE_SCHEMA.into());
    obj.insert("n".into(), s.n.into());
    obj.insert("pair_labels".into(), labels_to_value(&pair_labels(pair)));
    obj.insert("side".into(), side.into());
    obj.insert("omega".into(), form_to_value(&s.omega.to_frame(coords)?));
    match &s.big_omega {
        OmegaSpec::Factored(fs) => {
            let vals: Vec<Value> = fs.iter().map(|f| f.to_frame(coords).map(|f| form_to_value(&f))).collect::<Result<_>>()?;
            obj.insert("Omega_factors".into(), vals.into());
        }
        OmegaSpec::General(f) => {
            obj.insert("Omega".into(), form_to_value(&f.to_frame(coords)?));
        }
    }
    let pol = match s.polarization {
        Some(p) => json!({"fiber_class": p.fiber_class.as_str(), "phase": p.phase.as_str()}),
        None => Value::Null,
    };
    obj.insert("polarization".into(), pol);
    Ok(Value::Object(obj))
}

pub fn su_from_fixture(v: &Value) -> Result<(SUStructure, SemiflatPair<Q>)> {
    match field(v, "schema")?.as_str() {
        Some(FIXTURE_SCHEMA) => {}
        other => return Err(parse_err(format!("unsupported schema {other:?}"))),
    }
    let n = field(v, "n")?.as_u64().ok_or_else(|| parse_err("`n` must be a positive integer"))? as usize;
    let pair = SemiflatPair::with_labels(&labels_from_value(field(v, "pair_labels")?)?)?;
    if pair.n() != n {
        return Err(parse_err(format!("n = {n} but the pair has {} base coordinates", pair.n())));
    }
    let frames = [pair.x(), pair.xcheck()];
    let omega = form_from_value(field(v, "omega")?, &frames)?;
    let big_omega = match (v.get("Omega_factors"), v.get("Omega")) {
        (Some(fs), None) => OmegaSpec::Factored(
            fs.as_array()
                .ok_or_else(|| parse_err("`Omega_factors` must be an array"))?
                .iter()
                .map(|f| form_from_value(f, &frames))
                .collect::<Result<_>>()?,
        ),
        (None, Some(f)) => OmegaSpec::General(form_from_value(f, &frames)?),
        _ => return Err(parse_err("exactly one of `Omega_factors` and `Omega` is required")),
    };
    let polarization = match v.get("polarization") {
        None | Some(Value::Null) => None,
        Some(p) => {
            let class = field(p, "fiber_class")?.as_str().and_then(GenClass::parse);
            let phase = field(p, "phase")?.as_str().and_then(Phase::parse);
            match (class, phase) {
                (Some(fiber_class), Some(phase)) if fiber_class.is_fiber() => Some(Polarization { fiber_class, phase }),
                _ => return Err(parse_err("polarization needs a fiber class and one of 0, pi/2, pi, 3pi/2")),
            }
        }
    };
    Ok((SUStructure { n, omega, big_omega, polarization }, pair))
}

/// Deterministic pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON value serializes");
    s.push('\n');
    s
}

/// Map of named forms, used for report attachments.
pub fn forms_to_value(forms: &BTreeMap<String, Form>) -> Value {
    Value::Object(forms.iter().map(|(k, f)| (k.clone(), form_to_value(f))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sustruct::{complex_side_structure, flat_omega_check, mirror_transform};
    use crate::{q, qi};

    #[test]
    fn poly_roundtrip() {
        let r = Poly::var("r_1");
        let p = &(&r.pow(3).scale(&qi(2, -7)) + &Poly::var("r_2").scale(&q(1, 3))) + &Poly::constant(q(-5, 2));
        let v = poly_to_value(&p);
        assert_eq!(poly_from_value(&v).unwrap(), p);
        let big = Poly::constant(crate::Q::new(BigRational::from_integer(BigInt::from(10).pow(30)), BigRational::zero()));
        assert_eq!(poly_from_value(&poly_to_value(&big)).unwrap(), big);
    }

    #[test]
    fn form_roundtrip_and_order() {
        let pair = SemiflatPair::<Q>::standard(2).unwrap();
        let a = Form::gens(pair.x(), &["dθ_1", "dr_2"]).unwrap().mul_poly(&Poly::var("r_1"));
        let v = form_to_value(&a);
        assert_eq!(form_from_value(&v, &[pair.x()]).unwrap(), a);
        let mut bad = v.clone();
        bad["terms"][0]["gens"] = json!(["dr_2", "dθ_1"]);
        assert!(form_from_value(&bad, &[pair.x()]).is_err());
        assert!(form_from_value(&v, &[pair.xcheck()]).is_err());
    }

    #[test]
    fn fixture_roundtrip() {
        let pair = SemiflatPair::<Q>::standard(2).unwrap();
        let w = flat_omega_check(&pair);
        for s in [complex_side_structure(&w, &pair).unwrap(), mirror_transform(&w, &pair).unwrap().structure] {
            let v = su_to_fixture(&s, &pair).unwrap();
            let (back, _) = su_from_fixture(&v).unwrap();
            assert_eq!(su_to_fixture(&back, &pair).unwrap(), v);
            assert_eq!(back.polarization, s.polarization);
        }
    }
}
