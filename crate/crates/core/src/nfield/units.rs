//! Unit groups of quadratic fields and quartic CM fields.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Elem, NumberField};
use crate::arith::{int, isqrt, Int, Rat};
use crate::fgab::AbGroup;
use crate::lattice::{fincke_pohst, lll_gram};
use crate::mp::Complex;
use crate::{Error, Result};

/// `O^× = <zeta> x <eps>` (no `eps` for fields of unit rank 0).
#[derive(Clone, Debug)]
pub struct UnitGroup {
    pub torsion_gen: Elem,
    pub torsion_order: u64,
    pub fundamental: Option<Elem>,
    /// Fundamental unit of the real quadratic subfield, viewed in this
    /// field (the field's own unit for real quadratic fields).
    pub eps0: Option<Elem>,
    /// `[O^× : mu O_{K0}^×]` for CM quartics.
    pub unit_index: u32,
}

impl UnitGroup {
    pub fn compute(k: &NumberField) -> Result<Self> {
        let (r1, r2) = k.signature();
        match (k.degree(), r1, r2) {
            (1, _, _) => Ok(UnitGroup { torsion_gen: k.from_i64(-1), torsion_order: 2, fundamental: None, eps0: None, unit_index: 1 }),
            (2, 2, 0) => {
                let e = real_quadratic_unit(k)?;
                Ok(UnitGroup { torsion_gen: k.from_i64(-1), torsion_order: 2, fundamental: Some(e.clone()), eps0: Some(e), unit_index: 1 })
            }
            (2, 0, 1) => {
                let (z, w) = torsion(k)?;
                Ok(UnitGroup { torsion_gen: z, torsion_order: w, fundamental: None, eps0: None, unit_index: 1 })
            }
            (4, 0, 2) if k.involution_matrix().is_some() => cm_quartic_units(k),
            _ => Err(Error::InvalidInput("unit groups are implemented for quadratic and quartic CM fields only".into())),
        }
    }

    /// Generators in the coordinate order of [`Self::exponent_group`]:
    /// the fundamental unit if any, then the torsion generator.
    pub fn generators(&self) -> Vec<Elem> {
        let mut v = Vec::new();
        if let Some(e) = &self.fundamental {
            v.push(e.clone());
        }
        v.push(self.torsion_gen.clone());
        v
    }

    /// The abstract group `Z^r x C_w`.
    pub fn exponent_group(&self) -> AbGroup {
        let mut f = vec![Int::from(self.torsion_order)];
        if self.fundamental.is_some() {
            f.push(Int::zero());
        }
        AbGroup::new(&f).expect("valid invariants")
    }

    pub fn rank(&self) -> usize {
        usize::from(self.fundamental.is_some())
    }

    /// Exponents `(b, a)` with `u = eps^b zeta^a` (`(a)` for rank 0).
    pub fn dlog(&self, k: &NumberField, u: &Elem) -> Result<Vec<Int>> {
        let mut b = 0i64;
        let mut v = u.clone();
        if let Some(e) = &self.fundamental {
            // the place where |u| is largest has no cancellation
            let lus = k.log_embedding(u);
            let i = (0..lus.len()).max_by(|&a, &b| lus[a].total_cmp(&lus[b])).unwrap_or(0);
            let lu = lus[i];
            let le = k.log_embedding(e)[i];
            let q = lu / le;
            b = libm::round(q) as i64;
            if (q - b as f64).abs() > 1e-6 {
                return Err(Error::InvalidInput("element is not a unit".into()));
            }
            v = k.mul(u, &k.pow(e, -b)?);
        }
        let mut z = k.one();
        for a in 0..self.torsion_order {
            if z == v {
                let mut out = Vec::new();
                if self.fundamental.is_some() {
                    out.push(int(b));
                }
                out.push(Int::from(a));
                return Ok(out);
            }
            z = k.mul(&z, &self.torsion_gen);
        }
        Err(Error::InvalidInput("element is not a unit".into()))
    }

    pub fn element(&self, k: &NumberField, exps: &[Int]) -> Result<Elem> {
        let r = self.rank();
        let a = exps[r].mod_floor(&Int::from(self.torsion_order)).to_u64().unwrap();
        let mut x = k.pow_u(&self.torsion_gen, a);
        if let Some(e) = &self.fundamental {
            let b = exps[0].to_i64().ok_or_else(|| Error::Resource("unit exponent too large".into()))?;
            x = k.mul(&x, &k.pow(e, b)?);
        }
        Ok(x)
    }
}

/// Fundamental unit of a real quadratic field from the continued
/// fraction of the integral basis generator, normalized so that its
/// second coordinate is positive and the first is smallest in absolute
/// value among `±eps^{±1}`.
pub fn real_quadratic_unit(k: &NumberField) -> Result<Elem> {
    let w = Elem::integral(vec![Int::zero(), Int::one()]);
    let t = k.trace(&w).to_integer();
    let nn = k.norm(&w).to_integer();
    let d = &t * &t - &nn * 4;
    // choose omega in {w, t - w} with embedding 0 equal to (t + sqrt d)/2
    let w0 = k.embed_f64(&w, 0).0;
    let tw = k.sub(&k.from_int(&t), &w);
    let upper = w0 >= k.embed_f64(&tw, 0).0;
    let r = isqrt(&d);
    let (mut pp, mut qq) = (t.clone(), int(2));
    let (mut p1, mut p2) = (Int::one(), Int::zero());
    let (mut q1, mut q2) = (Int::zero(), Int::one());
    for _ in 0..200_000 {
        let a = if qq.is_positive() { (&pp + &r).div_floor(&qq) } else { (&pp + &r + Int::one()).div_floor(&qq) };
        let p = &a * &p1 + &p2;
        let q = &a * &q1 + &q2;
        let norm = &p * &p - &p * &q * &t + &q * &q * &nn;
        if norm.abs().is_one() && !q.is_zero() {
            // eps = p - q omega
            let e = if upper {
                Elem::integral(vec![p.clone(), -q.clone()])
            } else {
                Elem::integral(vec![&p - &q * &t, q.clone()])
            };
            return Ok(normalize_unit(k, &e));
        }
        p2 = core::mem::replace(&mut p1, p);
        q2 = core::mem::replace(&mut q1, q);
        pp = &a * &qq - &pp;
        qq = (&d - &pp * &pp) / &qq;
    }
    Err(Error::Resource("continued fraction period too long".into()))
}

fn normalize_unit(k: &NumberField, e: &Elem) -> Elem {
    let inv = k.inv(e).expect("unit");
    let mut cands = vec![e.clone(), k.neg(e), inv.clone(), k.neg(&inv)];
    cands.retain(|c| c.num[1].is_positive());
    cands.sort_by(|a, b| a.num[0].abs().cmp(&b.num[0].abs()).then(a.num[0].cmp(&b.num[0])));
    cands.swap_remove(0)
}

/// Generator of the totally positive units of a real quadratic field:
/// `eps0` if totally positive, `-eps0` if totally negative, else `eps0^2`.
pub fn totally_positive_unit(k: &NumberField, eps0: &Elem) -> Result<Elem> {
    let s = k.real_signs(eps0)?;
    Ok(if s.iter().all(|&v| v > 0) {
        eps0.clone()
    } else if s.iter().all(|&v| v < 0) {
        k.neg(eps0)
    } else {
        k.mul(eps0, eps0)
    })
}

/// Roots of unity of a field with complex conjugation: the integral
/// elements with `T_2(x) = n`. Returns a generator and the order.
pub fn torsion(k: &NumberField) -> Result<(Elem, u64)> {
    let n = k.degree();
    if k.signature().0 > 0 {
        return Ok((k.from_i64(-1), 2));
    }
    let basis: Vec<Vec<Int>> = (0..n)
        .map(|i| {
            let mut e = vec![Int::zero(); n];
            e[i] = Int::one();
            e
        })
        .collect();
    let g = k.t2_gram(&basis).ok_or_else(|| Error::Inconsistent("no complex conjugation".into()))?;
    let (t, red) = lll_gram(&g);
    let a: Vec<Vec<f64>> = red.iter().map(|row| row.iter().map(|v| v.to_f64().unwrap()).collect()).collect();
    let found = fincke_pohst(&a, n as f64 + 0.5, 10_000).ok_or_else(|| Error::Inconsistent("torsion enumeration overflow".into()))?;
    let mut roots: Vec<Elem> = Vec::new();
    for (x, _) in found {
        let mut c = vec![Int::zero(); n];
        for (i, xi) in x.iter().enumerate() {
            for j in 0..n {
                c[j] += &t[i][j] * *xi;
            }
        }
        let e = Elem::integral(c);
        if k.t2(&e).unwrap() == Rat::from(int(n as i64)) {
            roots.push(k.neg(&e));
            roots.push(e);
        }
    }
    let w = roots.len() as u64;
    for z in &roots {
        let mut y = z.clone();
        let mut ord = 1u64;
        while y != k.one() {
            y = k.mul(&y, z);
            ord += 1;
        }
        if ord == w {
            return Ok((z.clone(), w));
        }
    }
    Err(Error::Inconsistent(format!("roots of unity do not form a cyclic group of order {}", w)))
}

/// The real quadratic subfield `Q(alpha^2)` of an even quartic and the
/// map from its power coordinates into the quartic.
pub fn even_quartic_subfield(k: &NumberField) -> Result<NumberField> {
    let f = k.poly();
    NumberField::new(&[f[0].clone(), f[2].clone(), Int::one()])
}

/// Image of an element of `Q(alpha0)` in `K`, `alpha0 -> alpha^2`.
pub fn embed_subfield(k: &NumberField, k0: &NumberField, x: &Elem) -> Elem {
    let p = k0.to_power(x);
    k.from_power(&[p[0].clone(), Rat::zero(), p[1].clone(), Rat::zero()])
}

/// Power coordinates of an element of `K` fixed by `alpha -> -alpha`
/// as an element of `Q(alpha0)`; `None` if it is not fixed.
pub fn restrict_to_subfield(k: &NumberField, k0: &NumberField, x: &Elem) -> Option<Elem> {
    let p = k.to_power(x);
    if !p[1].is_zero() || !p[3].is_zero() {
        return None;
    }
    Some(k0.from_power(&[p[0].clone(), p[2].clone()]))
}

fn cm_quartic_units(k: &NumberField) -> Result<UnitGroup> {
    let k0 = even_quartic_subfield(k)?;
    let e0 = real_quadratic_unit(&k0)?;
    let eps0 = embed_subfield(k, &k0, &e0);
    let (zeta, w) = torsion(k)?;
    let mut z = k.one();
    for _ in 0..w {
        let x = k.mul(&z, &eps0);
        if let Some(y) = square_root(k, &x) {
            return Ok(UnitGroup { torsion_gen: zeta, torsion_order: w, fundamental: Some(y), eps0: Some(eps0), unit_index: 2 });
        }
        z = k.mul(&z, &zeta);
    }
    Ok(UnitGroup { torsion_gen: zeta, torsion_order: w, fundamental: Some(eps0.clone()), eps0: Some(eps0), unit_index: 1 })
}

/// Exact square root of an algebraic integer in a CM quartic, if one
/// exists in `O_K`.
pub fn square_root(k: &NumberField, x: &Elem) -> Option<Elem> {
    if !x.is_integral() {
        return None;
    }
    let v: Vec<Complex> = (0..4).map(|j| k.embed(x, j)).collect();
    let s0 = v[0].sqrt();
    let s1 = v[1].sqrt();
    for flip in [false, true] {
        let t1 = if flip { s1.neg() } else { s1.clone() };
        let vals = [s0.clone(), t1.clone(), s0.conj(), t1.conj()];
        if let Some(y) = k.elem_from_embeddings(&vals, &Int::one()) {
            if &k.mul(&y, &y) == x {
                return Some(y);
            }
        }
    }
    None
}
