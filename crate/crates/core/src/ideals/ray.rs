//! Ray class groups `Cl(m)` for rational integer moduli, optionally with
//! sign conditions at every real place.
//!
//! With `R = (O/m)^× x {±1}^{r1}` (signs only in the narrow case) and
//! `psi : K^×_m -> R`, the group is generated by classes `g_i` of
//! ideals coprime to `m` lifting the class group generators, together
//! with `R`, subject to:
//!
//! * `c_i g_i = psi(alpha_i)` where `g_i^{c_i} = (alpha_i)`,
//! * the invariants of `R`,
//! * `psi(u) = 0` for the unit generators.

use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::classgroup::ClassGroup;
use super::residue::ResidueGroup;
use super::search::{principal_generator, reduced_basis};
use super::Ideal;
use crate::arith::Int;
use crate::fgab::matrix::IntMatrix;
use crate::fgab::{group_from_relations, AbGroup, Morphism, Presentation};
use crate::nfield::{Elem, NumberField};
use crate::{Config, Error, Result};

#[derive(Clone, Debug)]
pub struct RayClassGroup {
    pub m: Int,
    pub narrow: bool,
    pub cl: ClassGroup,
    pub res: ResidueGroup,
    r1: usize,
    /// Orders of the residue generators followed by a 2 per sign.
    rinv: Vec<Int>,
    rpres: Presentation,
    /// Ideals coprime to `m` in the class group generator classes.
    lifts: Vec<Ideal>,
    pres: Presentation,
    /// Integral ideal coprime to `m` in each standard generator class.
    pub reps: Vec<Ideal>,
}

/// An ideal `J' = y J` in the class of the integral ideal `J`, integral,
/// coprime to `m` and of small norm. Returns `(J', y)`.
pub fn reduce_coprime(k: &NumberField, j: &Ideal, m: &Int) -> Result<(Ideal, Elem)> {
    let inv = j.inv(k);
    let vecs = reduced_basis(k, &inv.num.columns())?;
    let nj = j.norm();
    let mut best: Option<(Int, Elem)> = None;
    let n = vecs.len();
    // reduced basis vectors and small combinations
    let mut cands: Vec<Vec<Int>> = vecs.clone();
    for a in 0..n {
        for b in 0..n {
            if a != b {
                for s in [1i64, -1] {
                    cands.push(vecs[a].iter().zip(&vecs[b]).map(|(x, y)| x + y * Int::from(s)).collect());
                }
            }
        }
    }
    let mut lcg = 0x2545_f491_4f6c_dd1du64;
    for round in 0..4000usize {
        let v: Vec<Int> = if round < cands.len() {
            cands[round].clone()
        } else {
            let mut v = vec![Int::zero(); vecs[0].len()];
            let w = 2 + (round / 400) as u64;
            for b in &vecs {
                lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let c = Int::from(((lcg >> 33) % (2 * w + 1)) as i64 - w as i64);
                for (x, y) in v.iter_mut().zip(b) {
                    *x += &c * y;
                }
            }
            v
        };
        let y = Elem::new(v, inv.den.clone());
        if y.is_zero() {
            continue;
        }
        let nn = (k.norm(&y).abs() * &nj).to_integer();
        if !nn.gcd(m).is_one() {
            continue;
        }
        if best.as_ref().is_none_or(|(b, _)| &nn < b) {
            best = Some((nn, y));
        }
        if round >= cands.len() && best.is_some() {
            break;
        }
    }
    let (_, y) = best.ok_or_else(|| Error::Resource("no element coprime to the modulus found".into()))?;
    Ok((j.mul_elem(k, &y)?, y))
}

impl RayClassGroup {
    pub fn compute(k: &NumberField, m: &Int, narrow: bool, cfg: &Config) -> Result<Self> {
        let cl = ClassGroup::compute(k, cfg)?;
        Self::from_class_group(k, cl, m, narrow, cfg)
    }

    pub fn from_class_group(k: &NumberField, cl: ClassGroup, m: &Int, narrow: bool, cfg: &Config) -> Result<Self> {
        if !m.is_positive() {
            return Err(Error::InvalidInput("modulus must be positive".into()));
        }
        let res = ResidueGroup::new(k, m, cfg)?;
        let r1 = if narrow { k.signature().0 } else { 0 };
        let mut rinv: Vec<Int> = res.group().invariants().to_vec();
        rinv.extend(core::iter::repeat_n(Int::from(2), r1));
        let rpres = group_from_relations(rinv.len(), &IntMatrix::diagonal(&rinv));
        let mut lifts = Vec::new();
        for rep in &cl.reps {
            lifts.push(reduce_coprime(k, rep, m)?.0);
        }
        let mut g = RayClassGroup {
            m: m.clone(),
            narrow,
            cl,
            res,
            r1,
            rinv,
            rpres,
            lifts,
            pres: group_from_relations(0, &IntMatrix::zeros(0, 0)),
            reps: Vec::new(),
        };
        let nc = g.lifts.len();
        let nr = g.rgroup_gens();
        let n = nc + nr;
        let mut cols: Vec<Vec<Int>> = Vec::new();
        for i in 0..nc {
            let c = g.cl.group().invariants()[i].clone();
            let psi = g.principal_psi(k, &[(i, c.clone())], None)?;
            let mut v = vec![Int::zero(); n];
            v[i] = c;
            for (j, x) in psi.iter().enumerate() {
                v[nc + j] = -x;
            }
            cols.push(v);
        }
        for (j, d) in g.rinv.iter().enumerate() {
            let mut v = vec![Int::zero(); n];
            v[nc + j] = d.clone();
            cols.push(v);
        }
        for u in g.cl.units.generators() {
            let psi = g.psi(k, &u)?;
            let mut v = vec![Int::zero(); n];
            for (j, x) in psi.iter().enumerate() {
                v[nc + j] = x.clone();
            }
            cols.push(v);
        }
        let rel = IntMatrix::from_cols(n, &cols);
        g.pres = group_from_relations(n, &rel);
        g.reps = (0..g.pres.group.rank()).map(|i| g.generator_ideal(k, i)).collect::<Result<Vec<_>>>()?;
        Ok(g)
    }

    fn rgroup_gens(&self) -> usize {
        self.rinv.len()
    }

    fn radd(&self, a: &[Int], b: &[Int]) -> Vec<Int> {
        a.iter().zip(b).zip(&self.rinv).map(|((x, y), d)| (x + y).mod_floor(d)).collect()
    }

    fn rscale(&self, t: &Int, a: &[Int]) -> Vec<Int> {
        a.iter().zip(&self.rinv).map(|(x, d)| (x * t).mod_floor(d)).collect()
    }

    pub fn group(&self) -> &AbGroup {
        &self.pres.group
    }

    pub fn order(&self) -> Int {
        self.pres.group.order().expect("ray class groups are finite")
    }

    /// The group `R` of residues and signs.
    pub fn residue_sign_group(&self) -> &AbGroup {
        &self.rpres.group
    }

    /// `psi(x)` for `x` coprime to `m`, as residue coordinates followed by
    /// sign bits.
    pub fn psi(&self, k: &NumberField, x: &Elem) -> Result<Vec<Int>> {
        let mut v = self.res.dlog(k, x)?;
        if self.r1 > 0 {
            for s in k.real_signs(x)? {
                v.push(Int::from(i64::from(s < 0)));
            }
        }
        Ok(v.iter().zip(&self.rinv).map(|(x, d)| x.mod_floor(d)).collect())
    }

    /// Reduction of units into `R` as a morphism from `C_w x Z`.
    pub fn unit_map(&self, k: &NumberField) -> Result<Morphism> {
        let mut imgs = Vec::new();
        for u in self.cl.units.generators() {
            imgs.push(self.rpres.dlog(&self.psi(k, &u)?));
        }
        Morphism::from_images(self.cl.units.exponent_group(), self.rpres.group.clone(), &imgs)
    }

    /// `psi(gamma)` where `(gamma) = extra * prod lifts_i^{e_i}` is known
    /// to be principal. `extra` must be coprime to `m`.
    fn principal_psi(&self, k: &NumberField, powers: &[(usize, Int)], extra: Option<&Ideal>) -> Result<Vec<Int>> {
        let mut acc = Ideal::unit(k);
        let mut shift = vec![Int::zero(); self.rinv.len()];
        if let Some(a) = extra {
            // acc = den * a, so gamma for a is gamma for acc over den
            acc = Ideal { num: a.num.clone(), den: Int::one() };
            shift = self.psi(k, &k.from_int(&a.den))?;
        }
        for (i, e) in powers {
            let mut e = e.clone();
            while e.is_positive() {
                acc = acc.mul(k, &self.lifts[*i]);
                let (j, y) = reduce_coprime(k, &acc, &self.m)?;
                acc = j;
                // acc_new = y * acc_old, so gamma_old = gamma_new / y
                shift = self.radd(&shift, &self.psi(k, &y)?);
                e -= 1;
            }
        }
        let gen = principal_generator(k, &self.cl.units, &acc)?.ok_or_else(|| Error::Inconsistent("expected a principal ideal".into()))?;
        let pg = self.psi(k, &gen)?;
        Ok(self.radd(&pg, &self.rscale(&-Int::one(), &shift)))
    }

    /// Coordinates of the ray class of a fractional ideal coprime to `m`.
    pub fn dlog(&self, k: &NumberField, a: &Ideal) -> Result<Vec<Int>> {
        if !a.is_coprime_to(&self.m) {
            return Err(Error::InvalidInput("ideal not coprime to the modulus".into()));
        }
        let c = self.cl.dlog(k, a)?;
        let nc = self.lifts.len();
        let e: Vec<Int> = (0..nc).map(|i| (-&c[i]).mod_floor(&self.cl.group().invariants()[i])).collect();
        let powers: Vec<(usize, Int)> = e.iter().cloned().enumerate().collect();
        let psi = self.principal_psi(k, &powers, Some(a))?;
        let mut w: Vec<Int> = e.iter().map(|x| -x).collect();
        w.extend(psi);
        Ok(self.pres.dlog(&w))
    }

    /// Integral ideal coprime to `m` in the class of standard generator `i`.
    fn generator_ideal(&self, k: &NumberField, i: usize) -> Result<Ideal> {
        let mut c = vec![Int::zero(); self.pres.group.rank()];
        c[i] = Int::one();
        self.class_ideal(k, &c)
    }

    /// Integral ideal coprime to `m` in the ray class with coordinates `c`.
    pub fn class_ideal(&self, k: &NumberField, coords: &[Int]) -> Result<Ideal> {
        let nc = self.lifts.len();
        let mut w = vec![Int::zero(); nc + self.rinv.len()];
        for (i, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (x, g) in w.iter_mut().zip(self.pres.generator_word(i)) {
                *x += c * g;
            }
        }
        let mut r: Vec<Int> = w[nc..].to_vec();
        let mut acc = Ideal::unit(k);
        for j in 0..nc {
            let c = &self.cl.group().invariants()[j];
            let e = w[j].mod_floor(c);
            let t = (&e - &w[j]) / c;
            // w g_j = e g_j - t c_j g_j = e g_j - t psi(alpha_j)
            if !t.is_zero() {
                let pa = self.principal_psi(k, &[(j, c.clone())], None)?;
                r = self.radd(&r, &self.rscale(&-t, &pa));
            }
            for _ in 0..e.to_u64().unwrap_or(0) {
                acc = acc.mul(k, &self.lifts[j]);
            }
        }
        let r = self.rscale(&Int::one(), &r);
        let y = self.element_with_psi(k, &r)?;
        let id = acc.mul_elem(k, &y)?;
        Ok(id)
    }

    /// A generator `x` of the fractional ideal `b` with `x = 1 mod* m`,
    /// for `b` coprime to `m` in the trivial ray class.
    pub fn trivial_class_generator(&self, k: &NumberField, b: &Ideal) -> Result<Elem> {
        let lat = Ideal { num: b.num.clone(), den: Int::one() };
        let (j, y) = reduce_coprime(k, &lat, &self.m)?;
        let g = principal_generator(k, &self.cl.units, &j)?.ok_or_else(|| Error::InvalidInput("ideal is not principal".into()))?;
        // j = y lat, lat = den b
        let x0 = k.div(&g, &k.mul_int(&y, &b.den))?;
        let target = self.rscale(&-Int::one(), &self.psi(k, &x0)?);
        let units = &self.cl.units;
        let exp = self.rinv.iter().fold(Int::one(), |a, d| a.lcm(d)).to_u64().unwrap_or(1);
        let steps = if units.fundamental.is_some() { exp } else { 1 };
        let mut zi = k.one();
        for _ in 0..units.torsion_order {
            let mut u = zi.clone();
            for _ in 0..steps {
                if self.psi(k, &u)? == target {
                    return Ok(k.mul(&u, &x0));
                }
                if let Some(e) = &units.fundamental {
                    u = k.mul(&u, e);
                }
            }
            zi = k.mul(&zi, &units.torsion_gen);
        }
        Err(Error::InvalidInput("ideal is not in the trivial ray class".into()))
    }

    /// An integral element `y` coprime to `m` with `psi(y) = r`.
    fn element_with_psi(&self, k: &NumberField, r: &[Int]) -> Result<Elem> {
        let nres = self.res.group().rank();
        let base = self.res.lift(k, &r[..nres]);
        if self.r1 == 0 {
            return Ok(base);
        }
        let want: Vec<Int> = r[nres..].to_vec();
        let n = k.degree();
        for t in 0i64..200 {
            for s in 0..(2 * t + 1).pow(n as u32 - 1).max(1) {
                let mut z = vec![Int::zero(); n];
                let mut c = s;
                for slot in z.iter_mut().skip(1) {
                    *slot = Int::from(c % (2 * t + 1) - t);
                    c /= 2 * t + 1;
                }
                z[0] = Int::from(t);
                for sign0 in [1i64, -1] {
                    let mut zz = z.clone();
                    zz[0] *= Int::from(sign0);
                    let y = k.add(&base, &k.mul_int(&Elem::integral(zz), &self.m));
                    if y.is_zero() {
                        continue;
                    }
                    let p = self.psi(k, &y)?;
                    if p[nres..] == want[..] {
                        return Ok(y);
                    }
                }
            }
        }
        Err(Error::Inconsistent("no element with the requested signs".into()))
    }
}
