use cmray::analytic::{self, PeriodMatrix, ThetaIndex};
use cmray::arith::{Int, Rat};
use cmray::cm::{CmField, CmType, ReflexPair};
use cmray::ideals::{Ideal, RayClassGroup};
use cmray::mp::{Complex, Real};
use cmray::nfield::units::real_quadratic_unit;
use cmray::nfield::{parse_power, NumberField};
use cmray::shimura::ShimuraGroup;
use cmray::star::{find_m_s, verify_theorem_main1, StarContext, StarVerdict};
use cmray::{Config, Error, Result};
use serde_json::{json, Value};

use crate::render::{self, VAR};
use crate::{AnalyticArgs, ClassgroupArgs, FieldArg, ShimuraArgs, StarArgs, TypeArg};

/// Inputs echo, result, human summary.
pub type Outcome = Result<(Value, Value, String)>;

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn parse_int(s: &str, what: &str) -> Result<Int> {
    s.trim().parse::<Int>().map_err(|_| bad(format!("{what}: `{s}` is not an integer")))
}

fn parse_modulus(s: &str) -> Result<Int> {
    let m = parse_int(s, "modulus")?;
    if m < Int::from(1) {
        return Err(bad("modulus must be a positive integer"));
    }
    Ok(m)
}

fn parse_pair(s: &str, what: &str) -> Result<(String, String)> {
    let (a, b) = s.split_once(',').ok_or_else(|| bad(format!("{what}: expected two comma separated values")))?;
    Ok((a.trim().to_string(), b.trim().to_string()))
}

/// Exact rational value of a decimal such as `-0.16036` or `1.5e-3`.
fn parse_decimal(s: &str) -> Result<Rat> {
    let err = || bad(format!("`{s}` is not a decimal number"));
    let s = s.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() || !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits: Int = format!("{ip}{fp}0").parse::<Int>().map_err(|_| err())? / Int::from(10);
    let scale = exp - fp.len() as i32;
    let ten = Int::from(10);
    let mut q = if scale >= 0 { Rat::from(digits * ten.pow(scale as u32)) } else { Rat::new(digits, ten.pow((-scale) as u32)) };
    if neg {
        q = -q;
    }
    Ok(q)
}

fn cm_type(t: TypeArg) -> CmType {
    match t {
        TypeArg::Positive => CmType::POSITIVE,
        TypeArg::Mixed => CmType::MIXED,
    }
}

fn type_name(t: TypeArg) -> &'static str {
    match t {
        TypeArg::Positive => "positive",
        TypeArg::Mixed => "mixed",
    }
}

fn cm_field(f: &FieldArg) -> Result<CmField> {
    let text = f.field.as_deref().ok_or_else(|| bad("--field A,B is required"))?;
    let (a, b) = parse_pair(text, "--field")?;
    CmField::new(&parse_int(&a, "A")?, &parse_int(&b, "B")?)
}

fn field_json(f: &CmField) -> Value {
    json!({
        "A": render::int(&f.a),
        "B": render::int(&f.b),
        "polynomial": render::polynomial(&f.field),
        "discriminant": render::int(f.field.disc()),
        "galois": f.galois.name(),
    })
}

fn field_inputs(f: &FieldArg) -> Value {
    json!({ "field": f.field, "cm_type": type_name(f.cm_type) })
}

fn ray_json(k: &NumberField, g: &RayClassGroup) -> Result<Value> {
    let mut gens = Vec::new();
    for (i, rep) in g.reps.iter().enumerate() {
        let mut e = g.group().zero();
        e[i] = Int::from(1);
        gens.push(json!({ "coordinates": render::ints(&e), "ideal": render::ideal(k, rep) }));
    }
    let mut v = render::group(g.group());
    v["generators"] = Value::Array(gens);
    Ok(v)
}

pub fn classgroup(a: &ClassgroupArgs, cfg: &Config) -> Outcome {
    let m = parse_modulus(&a.m)?;
    let (k, fj) = match (&a.quadratic, &a.field.field) {
        (Some(d), None) => {
            let d = parse_int(d, "D")?;
            let k = NumberField::new(&[-d.clone(), Int::from(0), Int::from(1)])?;
            if !k.is_totally_real() {
                return Err(bad("x^2 - D must define a real quadratic field"));
            }
            let fj = json!({ "D": render::int(&d), "polynomial": render::polynomial(&k), "discriminant": render::int(k.disc()) });
            (k, fj)
        }
        (None, Some(_)) => {
            let f = cm_field(&a.field)?;
            (f.field.clone(), field_json(&f))
        }
        _ => return Err(bad("exactly one of --field and --quadratic is required")),
    };
    let g = RayClassGroup::compute(&k, &m, a.narrow, cfg)?;
    let inputs = json!({ "field": a.field.field, "quadratic": a.quadratic, "m": render::int(&m), "narrow": a.narrow });
    let result = json!({
        "field": fj,
        "class_group": render::group(g.cl.group()),
        "residue_group": render::group(g.residue_sign_group()),
        "ray_class_group": ray_json(&k, &g)?,
    });
    let summary = format!("Cl{}({m}) = {:?}", if a.narrow { "+" } else { "" }, inv_text(g.group().invariants()));
    Ok((inputs, result, summary))
}

fn inv_text(v: &[Int]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

pub fn shimura(a: &ShimuraArgs, cfg: &Config) -> Outcome {
    let m = parse_modulus(&a.m)?;
    let f = cm_field(&a.field)?;
    if !f.is_primitive() {
        return Err(Error::NotCm("biquadratic fields are not supported".into()));
    }
    let g = ShimuraGroup::compute(&f, &m, cfg)?;
    let k = &f.field;
    let eps0 = real_quadratic_unit(&g.k0)?;
    let reps: Vec<Value> = g
        .reps
        .iter()
        .map(|r| json!({ "ideal": render::ideal(k, &r.ideal), "scalar": render::elem(&g.k0, &r.scalar) }))
        .collect();
    let ker_n2 = render::group(g.ker_n2.group());
    let order = g.order();
    let seq = g.sequence_order();
    let result = json!({
        "field": field_json(&f),
        "real_subfield": { "polynomial": render::polynomial(&g.k0), "fundamental_unit": render::elem(&g.k0, &eps0), "totally_positive_unit": render::elem(&g.k0, &g.eps_plus) },
        "ray_class_group": ray_json(k, &g.ray)?,
        "narrow_class_group_k0": render::group(g.narrow0.group()),
        "coker_n1_order": render::int(&g.coker_order),
        "ker_n2": ker_n2,
        "group": render::group(g.group()),
        "order_identity": { "order": render::int(&order), "coker_times_ker": render::int(&seq), "holds": order == seq },
        "representatives": reps,
    });
    let inputs = json!({ "field": a.field.field, "cm_type": type_name(a.field.cm_type), "m": render::int(&m) });
    let summary = format!("C_K({m}) = {:?}, |coker N1| = {}", inv_text(g.group().invariants()), g.coker_order);
    Ok((inputs, result, summary))
}

fn verdict_json(v: &StarVerdict) -> Value {
    json!({
        "m1": render::int(&v.m1),
        "m2": render::int(&v.m2),
        "modulus": render::int(&v.modulus),
        "holds": v.holds,
        "ray_class_group_reflex": render::group(&v.group),
        "ker_f0": render::subgroup(&v.ker_f0),
        "ker_f1": render::subgroup(&v.ker_f1),
        "ker_f2": render::subgroup(&v.ker_f2),
        "intersection": render::subgroup(&v.intersection),
        "intersection_exponent_two": v.intersection_has_exponent_two(),
    })
}

pub fn star(a: &StarArgs, cfg: &Config) -> Outcome {
    let f = cm_field(&a.field)?;
    let rp = ReflexPair::new(f, cm_type(a.field.cm_type))?;
    let ctx = StarContext::new(rp, cfg)?;
    let mut inputs = field_inputs(&a.field);
    let mut result = json!({
        "field": field_json(&ctx.rp.base),
        "reflex": field_json(&ctx.rp.reflex),
        "class_group_reflex": render::group(ctx.cl_kr.group()),
    });
    let summary;
    if let Some(m) = &a.m {
        let m = parse_modulus(m)?;
        let v = ctx.does_star_hold(&m)?;
        inputs["m"] = render::int(&m);
        summary = format!("star({m}): {}", v.holds);
        result["mode"] = json!("m");
        result["verdict"] = verdict_json(&v);
    } else if let Some(mm) = &a.mixed {
        let (m1, m2) = parse_pair(mm, "--mixed")?;
        let (m1, m2) = (parse_modulus(&m1)?, parse_modulus(&m2)?);
        let v = ctx.mixed_containment(&m1, &m2)?;
        inputs["mixed"] = json!([render::int(&m1), render::int(&m2)]);
        summary = format!("mixed({m1}, {m2}): {}", v.holds);
        result["mode"] = json!("mixed");
        result["verdict"] = verdict_json(&v);
    } else if a.minimal {
        let bound = a.bound.ok_or_else(|| bad("--minimal needs --bound"))?;
        let found = ctx.minimal_star_m(bound)?;
        inputs["bound"] = json!(bound.to_string());
        summary = format!("minimal m <= {bound}: {found:?}");
        result["mode"] = json!("minimal");
        result["minimal_m"] = found.map(|m| json!(m.to_string())).unwrap_or(Value::Null);
    } else {
        let kr = &ctx.rp.reflex.field;
        let sel = find_m_s(kr, &ctx.cl_kr, cfg)?;
        let check = verify_theorem_main1(&ctx, &sel)?;
        let primes: Vec<Value> = sel
            .primes
            .iter()
            .map(|q| {
                Ok(json!({
                    "p": q.p.to_string(),
                    "e": q.e,
                    "f": q.f,
                    "ideal": render::ideal(kr, &q.ideal),
                    "class": render::ints(&ctx.cl_kr.dlog(kr, &q.ideal)?),
                }))
            })
            .collect::<Result<_>>()?;
        summary = format!("m_S = {}, 2-torsion check: {check}", sel.m_s);
        result["mode"] = json!("find_ms");
        result["selection"] = json!({
            "primes": primes,
            "rational_primes": sel.p_s.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "m_s": render::int(&sel.m_s),
            "two_torsion_in_ker_f0": check,
        });
    }
    Ok((inputs, result, summary))
}

fn parse_omega(s: &str, precision: u32) -> Result<PeriodMatrix> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 6 {
        return Err(bad("--omega takes six comma separated decimals"));
    }
    let w = precision + analytic::GUARD;
    let v: Vec<Real> = parts.iter().map(|p| parse_decimal(p).map(|q| Real::from_rat(&q, w))).collect::<Result<_>>()?;
    let c = |i: usize| Complex::new(v[i].clone(), v[i + 1].clone());
    PeriodMatrix::new([[c(0), c(2)], [c(2), c(4)]], precision)
}

fn parse_ideal(k: &NumberField, s: &str) -> Result<Ideal> {
    let (n, p) = parse_pair(s, "--ideal")?;
    let n = parse_int(&n, "ideal norm generator")?;
    let x = k.from_power(&parse_power(&p, VAR, k.degree())?);
    Ideal::from_gens(k, &[k.from_int(&n), x])
}

fn omega_json(om: &PeriodMatrix) -> Value {
    let p = om.precision;
    Value::Array(om.entries.iter().map(|row| Value::Array(row.iter().map(|z| render::complex(z, p)).collect())).collect())
}

pub fn analytic(a: &AnalyticArgs, _cfg: &Config) -> Outcome {
    let precision = a.precision;
    if !(64..=4096).contains(&precision) {
        return Err(bad("--precision must lie in 64..=4096"));
    }
    let mut inputs = json!({ "precision": precision.to_string(), "theta_table": a.theta_table });
    let mut result = json!({ "precision_bits": precision });
    let om = if let Some(s) = &a.omega {
        inputs["omega"] = json!(s);
        parse_omega(s, precision)?
    } else {
        let f = cm_field(&a.field)?;
        let text = a.ideal.as_deref().ok_or_else(|| bad("--ideal N,poly is required without --omega"))?;
        let k = &f.field;
        let ideal = parse_ideal(k, text)?;
        inputs["field"] = json!(a.field.field);
        inputs["cm_type"] = json!(type_name(a.field.cm_type));
        inputs["ideal"] = json!(text);
        let cm = analytic::period_matrix(&f, &cm_type(a.field.cm_type), &ideal, precision)?;
        result["field"] = field_json(&f);
        result["ideal"] = render::ideal(k, &ideal);
        result["xi"] = render::elem(k, &cm.xi);
        result["symplectic_basis"] = Value::Array(cm.basis.iter().map(|b| render::elem(k, b)).collect());
        cm.omega
    };
    result["omega"] = omega_json(&om);
    result["imag_min_eigenvalue"] = json!(om.imag_min_eigenvalue());
    let r = analytic::rosenhain(&om)?;
    result["rosenhain"] = Value::Array(r.lambda.iter().map(|z| render::complex(z, precision)).collect());
    let ig = analytic::igusa_invariants(&om)?;
    let ic = &ig.igusa_clebsch;
    result["igusa"] = json!({
        "j1": render::complex(&ig.j[0], precision),
        "j2": render::complex(&ig.j[1], precision),
        "j3": render::complex(&ig.j[2], precision),
        "I2": render::complex(&ic[0], precision),
        "I4": render::complex(&ic[1], precision),
        "I6": render::complex(&ic[2], precision),
        "I10": render::complex(&ic[3], precision),
    });
    let mut summary = format!("j = ({}, {}, {})", fmt(&ig.j[0]), fmt(&ig.j[1]), fmt(&ig.j[2]));
    if a.theta_table {
        let series = analytic::theta_series_all(&om)?;
        let thetas = analytic::theta_constants(&om)?;
        let mut rows = Vec::new();
        let mut odd_max = Real::zero(om.working_precision());
        for idx in ThetaIndex::all() {
            let i = idx.index() as usize;
            if !idx.is_even() && series[i].abs() > odd_max {
                odd_max = series[i].abs();
            }
            rows.push(json!({
                "index": i,
                "characteristic": idx.bits(),
                "even": idx.is_even(),
                "value": render::complex(&thetas[i], precision),
                "exact_zero": thetas[i].re.is_zero() && thetas[i].im.is_zero(),
            }));
        }
        let zeros = rows.iter().filter(|r| r["exact_zero"] == json!(true)).count();
        summary.push_str(&format!("; {zeros} odd theta constants, series max {:e}", odd_max.to_f64()));
        result["theta"] = json!({ "constants": rows, "odd_series_max_abs": render::real(&odd_max, precision) });
    }
    Ok((inputs, result, summary))
}

fn fmt(z: &Complex) -> String {
    analytic::format_complex(z, 6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_decimal("-0.16036").unwrap(), Rat::new(Int::from(-16036), Int::from(100000)));
        assert_eq!(parse_decimal("1.5852").unwrap(), Rat::new(Int::from(15852), Int::from(10000)));
        assert_eq!(parse_decimal("2").unwrap(), Rat::from(Int::from(2)));
        assert_eq!(parse_decimal(".5").unwrap(), Rat::new(Int::from(1), Int::from(2)));
        assert_eq!(parse_decimal("1.5e-3").unwrap(), Rat::new(Int::from(3), Int::from(2000)));
        assert_eq!(parse_decimal("-2E2").unwrap(), Rat::from(Int::from(-200)));
        for s in ["", "-", ".", "1..2", "1e", "a", "1.2.3", "--1"] {
            assert!(parse_decimal(s).is_err(), "{s}");
        }
    }

    #[test]
    fn moduli_and_pairs() {
        assert!(parse_modulus("0").is_err());
        assert!(parse_modulus("-3").is_err());
        assert_eq!(parse_modulus(" 8 ").unwrap(), Int::from(8));
        assert_eq!(parse_pair("53, 500", "f").unwrap(), ("53".into(), "500".into()));
        assert!(parse_pair("53", "f").is_err());
    }
}
