//! JSON renderings. Exact integers and rationals are always strings.

use cmray::arith::{Int, Rat};
use cmray::fgab::{AbGroup, Subgroup};
use cmray::ideals::Ideal;
use cmray::mp::{Complex, Real};
use cmray::nfield::{Elem, NumberField};
use serde_json::{json, Value};

pub const VAR: &str = "alpha";

pub fn int(v: &Int) -> Value {
    Value::String(v.to_string())
}

pub fn ints(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn rat(q: &Rat) -> Value {
    Value::String(q.to_string())
}

pub fn group(g: &AbGroup) -> Value {
    json!({
        "invariants": ints(g.invariants()),
        "order": g.order().map(|o| int(&o)).unwrap_or(Value::Null),
    })
}

pub fn subgroup(s: &Subgroup) -> Value {
    let g = s.as_group();
    json!({
        "order": s.order().map(|o| int(&o)).unwrap_or(Value::Null),
        "invariants": ints(g.group().invariants()),
        "generators": g.gens.iter().map(|c| ints(c)).collect::<Vec<_>>(),
    })
}

pub fn elem(k: &NumberField, x: &Elem) -> Value {
    let p = k.to_power(x);
    json!({
        "text": k.format_elem(x, VAR),
        "power_basis": p.iter().map(rat).collect::<Vec<_>>(),
    })
}

pub fn ideal(k: &NumberField, a: &Ideal) -> Value {
    let (n, b) = match a.two_element(k) {
        Some((n, b)) => (rat(&n), json!(k.format_elem(&b, VAR))),
        None => (Value::Null, Value::Null),
    };
    json!({
        "text": a.format(k, VAR),
        "two_element": [n, b],
        "norm": rat(&a.norm()),
    })
}

pub fn polynomial(k: &NumberField) -> Value {
    ints(k.poly())
}

/// Significant decimal digits carried by `bits` bits, less a margin.
pub fn digits_for(bits: u32) -> usize {
    ((bits as f64 * std::f64::consts::LOG10_2) as usize).saturating_sub(3).max(1)
}

pub fn real(x: &Real, bits: u32) -> Value {
    Value::String(x.to_scientific(digits_for(bits)))
}

pub fn complex(z: &Complex, bits: u32) -> Value {
    json!({ "re": real(&z.re, bits), "im": real(&z.im, bits), "precision_bits": bits })
}
