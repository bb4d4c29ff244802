//! The Shimura class group `C_K(m)` of a quartic CM field: pairs
//! `(a, alpha)` with `a conj(a) = alpha O_K` and `alpha` totally positive in
//! `K0`, modulo `(x O_K, x conj(x))` for `x = 1 mod* m`.
//!
//! It sits in the exact sequence
//!
//! ```text
//! O^×_{K,m,1} --N1--> O^{×+}_{K0} --f--> C_K(m) --g--> Cl_K(m) --N2--> Cl+_{K0}(1)
//! ```
//!
//! and is assembled as an extension of `ker N2` by `coker N1`.

use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{int, Int};
use crate::cm::{relative_norm, relative_norm_elem, CmField, ReflexPair};
use crate::fgab::{extension_group, AbGroup, Extension, Morphism, SubgroupGroup};
use crate::ideals::search::principal_generator;
use crate::ideals::{Ideal, RayClassGroup};
use crate::nfield::units::{embed_subfield, real_quadratic_unit, totally_positive_unit, UnitGroup};
use crate::nfield::{Elem, NumberField};
use crate::{Config, Error, Result};

/// `(ideal, scalar)` with the scalar in the real subfield.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShimuraElement {
    pub ideal: Ideal,
    pub scalar: Elem,
}

#[derive(Clone, Debug)]
pub struct ShimuraGroup {
    pub field: CmField,
    pub k0: NumberField,
    pub m: Int,
    pub ray: RayClassGroup,
    pub narrow0: RayClassGroup,
    units0: UnitGroup,
    /// Generator of the totally positive units of `K0`.
    pub eps_plus: Elem,
    /// `N1(O^×_{K,m,1}) = <eps_plus^k>`; `coker N1` is cyclic of order `k`.
    pub coker_order: Int,
    pub n2: Morphism,
    pub ker_n2: SubgroupGroup,
    lifts: Vec<ShimuraElement>,
    ext: Extension,
    pub reps: Vec<ShimuraElement>,
}

/// `b` with `u = eps^b` for units of a real quadratic field.
fn unit_exponent(k0: &NumberField, eps: &Elem, u: &Elem) -> Result<Int> {
    // the larger embedding has no cancellation
    let lu = k0.log_embedding(u);
    let le = k0.log_embedding(eps);
    let i = if lu[0] >= lu[1] { 0 } else { 1 };
    let q = lu[i] / le[i];
    let b = libm::round(q);
    if (q - b).abs() > 1e-6 {
        return Err(Error::Inconsistent("not a power of the unit".into()));
    }
    let b = b as i64;
    if &k0.pow(eps, b)? != u {
        return Err(Error::Inconsistent("not a power of the unit".into()));
    }
    Ok(int(b))
}

impl ShimuraGroup {
    pub fn compute(field: &CmField, m: &Int, cfg: &Config) -> Result<Self> {
        let k = &field.field;
        let k0 = field.real_subfield()?;
        let ray = RayClassGroup::compute(k, m, false, cfg)?;
        let narrow0 = RayClassGroup::compute(&k0, &Int::one(), true, cfg)?;
        Self::from_groups(field, ray, narrow0)
    }

    /// Build from precomputed `Cl_K(m)` and `Cl+_{K0}(1)`.
    pub fn from_groups(field: &CmField, ray: RayClassGroup, narrow0: RayClassGroup) -> Result<Self> {
        let k = &field.field;
        let k0 = field.real_subfield()?;
        let m = ray.m.clone();
        let units0 = UnitGroup::compute(&k0)?;
        let eps0 = real_quadratic_unit(&k0)?;
        let eps_plus = totally_positive_unit(&k0, &eps0)?;

        // N1 on the kernel of the reduction of units
        let s = ray.unit_map(k)?;
        let units = &ray.cl.units;
        let mut coker = Int::zero();
        if let Some(e) = &units.fundamental {
            let ne = relative_norm_elem(k, &k0, e)?;
            let te = unit_exponent(&k0, &eps_plus, &ne)?;
            for g in s.kernel().generators() {
                coker = coker.gcd(&(&te * &g[0]));
            }
        }
        if coker.is_zero() {
            return Err(Error::Inconsistent("unit norms have infinite index".into()));
        }

        // N2 on generators of Cl_K(m)
        let mut imgs = Vec::new();
        for r in &ray.reps {
            imgs.push(narrow0.dlog(&k0, &relative_norm(k, &k0, r)?)?);
        }
        let n2 = Morphism::from_images(ray.group().clone(), narrow0.group().clone(), &imgs)?;
        let ker_n2 = n2.kernel().as_group();

        let mut g = ShimuraGroup {
            field: field.clone(),
            k0,
            m,
            ray,
            narrow0,
            units0,
            eps_plus,
            coker_order: coker,
            n2,
            ker_n2,
            lifts: Vec::new(),
            ext: extension_group(&AbGroup::trivial(), &AbGroup::trivial(), &[])?,
            reps: Vec::new(),
        };
        for c in g.ker_n2.gens.clone() {
            let ideal = g.ray.class_ideal(k, &c)?;
            let scalar = g.positive_generator(&ideal)?;
            g.lifts.push(ShimuraElement { ideal, scalar });
        }
        let a = g.coker_group();
        let c = g.ker_n2.group().clone();
        let mut powers = Vec::new();
        for (j, ord) in c.invariants().iter().enumerate() {
            let p = g.pow(&g.lifts[j], ord)?;
            powers.push(g.preimage_f(&p)?);
        }
        g.ext = extension_group(&a, &c, &powers)?;
        g.reps = (0..g.group().rank()).map(|i| g.standard_rep(i)).collect::<Result<Vec<_>>>()?;
        Ok(g)
    }

    /// `coker N1` as an abstract group.
    pub fn coker_group(&self) -> AbGroup {
        AbGroup::new(core::slice::from_ref(&self.coker_order)).expect("cyclic")
    }

    pub fn group(&self) -> &AbGroup {
        self.ext.group()
    }

    pub fn order(&self) -> Int {
        self.group().order().expect("finite")
    }

    pub fn identity(&self) -> ShimuraElement {
        ShimuraElement { ideal: Ideal::unit(&self.field.field), scalar: self.k0.one() }
    }

    pub fn mul(&self, a: &ShimuraElement, b: &ShimuraElement) -> ShimuraElement {
        let k = &self.field.field;
        ShimuraElement { ideal: a.ideal.mul(k, &b.ideal), scalar: self.k0.mul(&a.scalar, &b.scalar) }
    }

    pub fn pow(&self, a: &ShimuraElement, e: &Int) -> Result<ShimuraElement> {
        let k = &self.field.field;
        let e = e.to_i64().ok_or_else(|| Error::Resource("exponent too large".into()))?;
        Ok(ShimuraElement { ideal: a.ideal.pow(k, e), scalar: self.k0.pow(&a.scalar, e)? })
    }

    /// `a conj(a) = alpha O_K`, `alpha >> 0`, and `a` coprime to `m`.
    pub fn is_valid(&self, x: &ShimuraElement) -> Result<bool> {
        let k = &self.field.field;
        if !x.ideal.is_coprime_to(&self.m) || !self.k0.is_totally_positive(&x.scalar)? {
            return Ok(false);
        }
        let lhs = x.ideal.mul(k, &x.ideal.conj(k));
        let rhs = Ideal::principal(k, &embed_subfield(k, &self.k0, &x.scalar))?;
        Ok(lhs == rhs)
    }

    /// A totally positive `alpha` with `a conj(a) = alpha O_K`, for `[a]`
    /// in the kernel of `N2`.
    pub fn positive_generator(&self, ideal: &Ideal) -> Result<Elem> {
        let k = &self.field.field;
        let k0 = &self.k0;
        let a0 = relative_norm(k, k0, ideal)?;
        let g = principal_generator(k0, &self.units0, &a0)?.ok_or_else(|| Error::Inconsistent("relative norm is not principal".into()))?;
        let eps = self.units0.fundamental.as_ref().expect("real quadratic");
        for t in 0..=8i64 {
            for e in [t, -t] {
                for s in [1i64, -1] {
                    let c = k0.mul(&k0.mul_int(&g, &int(s)), &k0.pow(eps, e)?);
                    if k0.is_totally_positive(&c)? {
                        return Ok(c);
                    }
                }
            }
        }
        Err(Error::Inconsistent("no totally positive generator in the unit window".into()))
    }

    /// The element `(O_K, u)` of `C_K(m)`.
    pub fn f(&self, u: &Elem) -> ShimuraElement {
        ShimuraElement { ideal: Ideal::unit(&self.field.field), scalar: u.clone() }
    }

    /// Coordinates in `coker N1` of an element of the image of `f`.
    pub fn preimage_f(&self, x: &ShimuraElement) -> Result<Vec<Int>> {
        let k = &self.field.field;
        let gen = self.ray.trivial_class_generator(k, &x.ideal)?;
        let nx = relative_norm_elem(k, &self.k0, &gen)?;
        let alpha = self.k0.div(&x.scalar, &nx)?;
        let t = unit_exponent(&self.k0, &self.eps_plus, &alpha)?;
        if self.coker_order.is_one() {
            return Ok(Vec::new());
        }
        Ok(vec![t.mod_floor(&self.coker_order)])
    }

    /// Coordinates of the class of `x`.
    pub fn dlog(&self, x: &ShimuraElement) -> Result<Vec<Int>> {
        let k = &self.field.field;
        let c = self.ray.dlog(k, &x.ideal)?;
        let gamma = self.ker_n2.dlog(&c).ok_or_else(|| Error::InvalidInput("ideal class is not in the kernel of N2".into()))?;
        let mut y = x.clone();
        for (l, gj) in self.lifts.iter().zip(&gamma) {
            if !gj.is_zero() {
                y = self.mul(&y, &self.pow(l, &-gj)?);
            }
        }
        let a = self.preimage_f(&y)?;
        Ok(self.ext.dlog(&a, &gamma))
    }

    /// A small representative of standard generator `i`: the ideal is a
    /// ray class representative and the scalar is adjusted by a power of
    /// `eps_plus` to hit the generator exactly.
    fn standard_rep(&self, i: usize) -> Result<ShimuraElement> {
        let (_, cw) = self.ext.generator_word(i);
        let amb = self.ker_n2.inclusion().apply(&cw);
        let ideal = self.ray.class_ideal(&self.field.field, &amb)?;
        let scalar = self.positive_generator(&ideal)?;
        let mut x = ShimuraElement { ideal, scalar };
        let mut target = vec![Int::zero(); self.group().rank()];
        target[i] = Int::one();
        let order = self.coker_order.to_u64().unwrap_or(1);
        for _ in 0..order {
            if self.group().reduce(&self.dlog(&x)?) == target {
                return Ok(x);
            }
            x.scalar = self.k0.mul(&x.scalar, &self.eps_plus);
        }
        Err(Error::Inconsistent("representative adjustment failed".into()))
    }

    /// `f2: Cl_{K^r}(M) -> C_K(m)`, `[b] -> [(N_{Phi^r}(b), N(b))]`, for
    /// `m | M`.
    pub fn map_f2(&self, rp: &ReflexPair, rayr: &RayClassGroup) -> Result<Morphism> {
        if !rayr.m.is_multiple_of(&self.m) {
            return Err(Error::InvalidInput("modulus of the reflex ray class group must be a multiple".into()));
        }
        let mut imgs = Vec::new();
        for b in &rayr.reps {
            let x = ShimuraElement { ideal: rp.type_norm_ideal(b)?, scalar: self.k0.from_rat(&b.norm()) };
            imgs.push(self.dlog(&x)?);
        }
        Morphism::from_images(rayr.group().clone(), self.group().clone(), &imgs)
    }

    /// `g: C_K(m) -> Cl_K(m)`, the class of the ideal part.
    pub fn g(&self, x: &ShimuraElement) -> Result<Vec<Int>> {
        self.ray.dlog(&self.field.field, &x.ideal)
    }

    /// Order of `coker N1` times order of `ker N2`.
    pub fn sequence_order(&self) -> Int {
        &self.coker_order * self.ker_n2.group().order().expect("finite")
    }
}
