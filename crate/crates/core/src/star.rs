//! The containment test `(*_m)`: `H_{K^r}(1) ⊆ H_{K0^r}(m) CM_{K^r,Phi^r}(m)`,
//! decided inside `Cl_{K^r}(m)` as
//! `ker f1 ∩ ker f2 ⊆ ker f0` with
//!
//! * `f0 : Cl_{K^r}(m) -> Cl_{K^r}(1)`,
//! * `f1 : Cl_{K^r}(m) -> Cl_{K0^r}(m)`, the relative norm,
//! * `f2 : Cl_{K^r}(m) -> C_K(m)`, `[b] -> [(N_{Phi^r}(b), N(b))]`.
//!
//! Also the choice of `S` and `m_S = 4 prod_{p in P_S} p`.

use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{primes_up_to, Int};
use crate::cm::{relative_norm, ReflexPair};
use crate::fgab::{AbGroup, Morphism, Subgroup};
use crate::ideals::{decompose, ClassGroup, PrimeIdeal, RayClassGroup};
use crate::nfield::NumberField;
use crate::shimura::ShimuraGroup;
use crate::{Config, Error, Result};

#[derive(Clone, Debug)]
pub struct StarVerdict {
    pub m1: Int,
    pub m2: Int,
    /// The working modulus `lcm(m1, m2)`.
    pub modulus: Int,
    pub holds: bool,
    pub group: AbGroup,
    pub ker_f0: Subgroup,
    pub ker_f1: Subgroup,
    pub ker_f2: Subgroup,
    pub intersection: Subgroup,
}

impl StarVerdict {
    /// Every element of `ker f1 ∩ ker f2` has order at most 2.
    pub fn intersection_has_exponent_two(&self) -> bool {
        self.intersection.is_subgroup_of(&self.group.torsion(&Int::from(2)))
    }
}

/// Class groups shared by all moduli for one reflex pair.
#[derive(Clone, Debug)]
pub struct StarContext {
    pub rp: ReflexPair,
    pub cfg: Config,
    pub k0r: NumberField,
    pub cl_k: ClassGroup,
    pub cl_kr: ClassGroup,
    pub cl_k0r: ClassGroup,
    pub narrow_k0: RayClassGroup,
}

impl StarContext {
    pub fn new(rp: ReflexPair, cfg: &Config) -> Result<Self> {
        let k0r = rp.reflex.real_subfield()?;
        let cl_k = ClassGroup::compute(&rp.base.field, cfg)?;
        let cl_kr = ClassGroup::compute(&rp.reflex.field, cfg)?;
        let cl_k0r = ClassGroup::compute(&k0r, cfg)?;
        let narrow_k0 = RayClassGroup::compute(&rp.base.real_subfield()?, &Int::one(), true, cfg)?;
        Ok(StarContext { rp, cfg: *cfg, k0r, cl_k, cl_kr, cl_k0r, narrow_k0 })
    }

    pub fn ray_kr(&self, m: &Int) -> Result<RayClassGroup> {
        RayClassGroup::from_class_group(&self.rp.reflex.field, self.cl_kr.clone(), m, false, &self.cfg)
    }

    pub fn ray_k0r(&self, m: &Int) -> Result<RayClassGroup> {
        RayClassGroup::from_class_group(&self.k0r, self.cl_k0r.clone(), m, false, &self.cfg)
    }

    pub fn shimura(&self, m: &Int) -> Result<ShimuraGroup> {
        let ray = RayClassGroup::from_class_group(&self.rp.base.field, self.cl_k.clone(), m, false, &self.cfg)?;
        ShimuraGroup::from_groups(&self.rp.base, ray, self.narrow_k0.clone())
    }

    /// `Cl_{K^r}(M) -> Cl_{K^r}(1)`.
    pub fn f0(&self, rayr: &RayClassGroup) -> Result<Morphism> {
        let kr = &self.rp.reflex.field;
        let imgs = rayr.reps.iter().map(|r| rayr.cl.dlog(kr, r)).collect::<Result<Vec<_>>>()?;
        Morphism::from_images(rayr.group().clone(), rayr.cl.group().clone(), &imgs)
    }

    /// `Cl_{K^r}(M) -> Cl_{K0^r}(m)` for `m | M`.
    pub fn f1(&self, rayr: &RayClassGroup, ray0: &RayClassGroup) -> Result<Morphism> {
        if !rayr.m.is_multiple_of(&ray0.m) {
            return Err(Error::InvalidInput("modulus must divide the working modulus".into()));
        }
        let kr = &self.rp.reflex.field;
        let mut imgs = Vec::new();
        for r in &rayr.reps {
            imgs.push(ray0.dlog(&self.k0r, &relative_norm(kr, &self.k0r, r)?)?);
        }
        Morphism::from_images(rayr.group().clone(), ray0.group().clone(), &imgs)
    }

    /// `Cl_{K^r}(M) -> C_K(m)` for `m | M`.
    pub fn f2(&self, rayr: &RayClassGroup, sg: &ShimuraGroup) -> Result<Morphism> {
        sg.map_f2(&self.rp, rayr)
    }

    /// Is `H_{K^r}(1)` contained in `H_{K0^r}(m1) CM_{K^r,Phi^r}(m2)`?
    pub fn mixed_containment(&self, m1: &Int, m2: &Int) -> Result<StarVerdict> {
        let modulus = m1.lcm(m2);
        let rayr = self.ray_kr(&modulus)?;
        let ray0 = self.ray_k0r(m1)?;
        let sg = self.shimura(m2)?;
        let f0 = self.f0(&rayr)?;
        let f1 = self.f1(&rayr, &ray0)?;
        let f2 = self.f2(&rayr, &sg)?;
        let (ker_f0, ker_f1, ker_f2) = (f0.kernel(), f1.kernel(), f2.kernel());
        let intersection = ker_f1.intersect(&ker_f2);
        let holds = intersection.is_subgroup_of(&ker_f0);
        Ok(StarVerdict { m1: m1.clone(), m2: m2.clone(), modulus, holds, group: rayr.group().clone(), ker_f0, ker_f1, ker_f2, intersection })
    }

    pub fn does_star_hold(&self, m: &Int) -> Result<StarVerdict> {
        self.mixed_containment(m, m)
    }

    /// Smallest `m <= bound` for which `(*_m)` holds.
    pub fn minimal_star_m(&self, bound: u64) -> Result<Option<u64>> {
        for m in 1..=bound {
            if self.does_star_hold(&Int::from(m))?.holds {
                return Ok(Some(m));
            }
        }
        Ok(None)
    }

    /// Verdicts for `m = 1..=bound`, checking that a verdict never goes
    /// from yes at `d` to no at a multiple of `d`.
    pub fn scan(&self, bound: u64) -> Result<Vec<(u64, bool)>> {
        let mut out: Vec<(u64, bool)> = Vec::new();
        for m in 1..=bound {
            let holds = self.does_star_hold(&Int::from(m))?.holds;
            if !holds {
                if let Some((d, _)) = out.iter().find(|(d, h)| *h && m % d == 0) {
                    return Err(Error::Inconsistent(alloc::format!("star holds at {d} but not at {m}")));
                }
            }
            out.push((m, holds));
        }
        Ok(out)
    }
}

/// A set `S` of primes of `K^r` and the modulus `m_S`.
#[derive(Clone, Debug)]
pub struct SSelection {
    pub primes: Vec<PrimeIdeal>,
    /// Rational primes below `S`, ascending.
    pub p_s: Vec<u64>,
    pub m_s: Int,
}

fn quotient_order(cl: &ClassGroup, classes: &[Vec<Int>]) -> Int {
    cl.group().subgroup(classes).index().expect("finite class group")
}

/// `S` = primes above 2, enlarged greedily by primes of smallest norm
/// until `Cl/<S>` has odd order, then padded to at least three primes.
pub fn find_m_s(kr: &NumberField, cl: &ClassGroup, cfg: &Config) -> Result<SSelection> {
    let mut s: Vec<PrimeIdeal> = decompose(kr, 2, cfg.seed)?;
    let mut classes: Vec<Vec<Int>> = s.iter().map(|q| cl.dlog(kr, &q.ideal)).collect::<Result<_>>()?;
    // candidates ordered by norm, then characteristic, then decomposition order
    let mut cands: Vec<(Int, u64, usize, PrimeIdeal)> = Vec::new();
    let bound = 2000u64;
    for p in primes_up_to(bound).into_iter().filter(|&p| p > 2) {
        for (i, q) in decompose(kr, p, cfg.seed)?.into_iter().enumerate() {
            if q.norm() <= Int::from(bound) {
                cands.push((q.norm(), p, i, q));
            }
        }
    }
    cands.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let two_part = |n: &Int| n.trailing_zeros().unwrap_or(0);
    let mut idx = quotient_order(cl, &classes);
    let mut used = vec![false; cands.len()];
    while idx.is_even() {
        let mut progressed = false;
        for (ci, (_, _, _, q)) in cands.iter().enumerate() {
            if used[ci] {
                continue;
            }
            let c = cl.dlog(kr, &q.ideal)?;
            let mut trial = classes.clone();
            trial.push(c.clone());
            let ni = quotient_order(cl, &trial);
            if two_part(&ni) < two_part(&idx) {
                used[ci] = true;
                s.push(q.clone());
                classes = trial;
                idx = ni;
                progressed = true;
                break;
            }
        }
        if !progressed {
            return Err(Error::Resource("no prime of small norm reduces the 2-part".into()));
        }
    }
    for (ci, (_, _, _, q)) in cands.iter().enumerate() {
        if s.len() >= 3 {
            break;
        }
        if !used[ci] {
            used[ci] = true;
            s.push(q.clone());
        }
    }
    let mut p_s: Vec<u64> = s.iter().map(|q| q.p).collect();
    p_s.sort_unstable();
    p_s.dedup();
    let m_s = p_s.iter().fold(Int::from(4), |acc, &p| acc * Int::from(p));
    Ok(SSelection { primes: s, p_s, m_s })
}

/// `Cl_{K^r}(m_S)[2] ⊆ ker(Cl_{K^r}(m_S) -> Cl_{K^r}(1))`.
pub fn verify_theorem_main1(ctx: &StarContext, sel: &SSelection) -> Result<bool> {
    let rayr = ctx.ray_kr(&sel.m_s)?;
    let f0 = ctx.f0(&rayr)?;
    Ok(rayr.group().torsion(&Int::from(2)).is_subgroup_of(&f0.kernel()))
}

/// Order of a subgroup as a `u64`, for reporting.
pub fn subgroup_order(s: &Subgroup) -> u64 {
    s.order().and_then(|o| o.to_u64()).unwrap_or(0)
}

/// `|Cl(m)| / |Cl(1)|`, which must equal `|ker f0|`.
pub fn expected_ker_f0_order(v: &StarVerdict, cl: &ClassGroup) -> Int {
    let total = v.group.order().expect("finite");
    let h = cl.order();
    if h.is_zero() {
        return Int::zero();
    }
    total / h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn ctx(a: i64, b: i64) -> StarContext {
        StarContext::new(ReflexPair::from_params(a, b).unwrap(), &Config::default()).unwrap()
    }

    /// Oracle for `|Cl/<S>|`: enumerate the subgroup generated by the
    /// chosen classes by closure.
    fn closure_size(g: &AbGroup, gens: &[Vec<Int>]) -> usize {
        let mut seen: Vec<Vec<Int>> = alloc::vec![g.zero()];
        let mut i = 0;
        while i < seen.len() {
            for x in gens {
                let y = g.add(&seen[i], x);
                if !seen.contains(&y) {
                    seen.push(y);
                }
            }
            i += 1;
        }
        seen.len()
    }

    #[test]
    fn running_example_star_two() {
        let c = ctx(53, 500);
        let v1 = c.does_star_hold(&int(1)).unwrap();
        assert_eq!(c.minimal_star_m(2).unwrap(), Some(if v1.holds { 1 } else { 2 }));
        let v = c.does_star_hold(&int(2)).unwrap();
        assert_eq!(v.group.invariants(), &[int(16), int(2)]);
        assert_eq!(v.ker_f0.order(), Some(int(4)));
        assert_eq!(v.ker_f0, v.group.torsion(&int(2)));
        assert_eq!(v.ker_f1.order(), Some(int(32)));
        assert_eq!(v.ker_f2.order(), Some(int(2)));
        // ker f2 = <b1^8>: the squares-of-order-16 element
        assert!(v.ker_f2.contains(&[int(8), int(0)]));
        assert!(v.holds);
        assert!(v.intersection_has_exponent_two());
        assert_eq!(expected_ker_f0_order(&v, &c.cl_kr), v.ker_f0.order().unwrap());
    }

    #[test]
    fn m_s_for_the_reflex_example() {
        let c = ctx(65, 425);
        let kr = &c.rp.reflex.field;
        let sel = find_m_s(kr, &c.cl_kr, &c.cfg).unwrap();
        assert_eq!(sel.primes.len(), 3);
        assert!(sel.primes.iter().all(|q| q.p == 2));
        assert_eq!(sel.m_s, int(8));
        let classes: Vec<Vec<Int>> = sel.primes.iter().map(|q| c.cl_kr.dlog(kr, &q.ideal).unwrap()).collect();
        let h = c.cl_kr.order().to_usize().unwrap();
        assert_eq!(h / closure_size(c.cl_kr.group(), &classes), 1);
    }

    #[test]
    fn m_s_for_the_running_reflex() {
        let c = ctx(53, 500);
        let kr = &c.rp.reflex.field;
        let sel = find_m_s(kr, &c.cl_kr, &c.cfg).unwrap();
        assert!(sel.primes.len() >= 3);
        let classes: Vec<Vec<Int>> = sel.primes.iter().map(|q| c.cl_kr.dlog(kr, &q.ideal).unwrap()).collect();
        let h = c.cl_kr.order().to_usize().unwrap();
        assert_eq!((h / closure_size(c.cl_kr.group(), &classes)) % 2, 1);
        assert_eq!(sel.m_s.mod_floor(&int(8)), int(0));
        assert!(verify_theorem_main1(&c, &sel).unwrap());
    }

    #[test]
    fn reflex_example_moduli() {
        let c = ctx(65, 425);
        let v8 = c.does_star_hold(&int(8)).unwrap();
        assert_eq!(v8.group.invariants(), &[int(48), int(4), int(2), int(2), int(2)]);
        assert_eq!(v8.ker_f0.order(), Some(int(192)));
        assert_eq!(v8.ker_f0.as_group().group().invariants(), &[int(12), int(2), int(2), int(2), int(2)]);
        assert_eq!(v8.ker_f1.as_group().group().invariants(), &[int(48), int(4), int(2)]);
        assert_eq!(v8.ker_f2.as_group().group().invariants(), &[int(4)]);
        assert_eq!(v8.ker_f1.order(), Some(int(384)));
        assert_eq!(v8.ker_f2.order(), Some(int(4)));
        assert_eq!(v8.intersection.order(), Some(int(2)));
        assert!(v8.holds);
        assert!(v8.intersection_has_exponent_two());
        assert_eq!(expected_ker_f0_order(&v8, &c.cl_kr), int(192));
        for m in [1, 2, 4] {
            let v = c.does_star_hold(&int(m)).unwrap();
            assert!(!v.holds, "m = {m}");
            assert!(v.intersection_has_exponent_two());
        }
        let v48 = c.mixed_containment(&int(4), &int(8)).unwrap();
        assert!(!v48.holds);
        assert_eq!(v48.ker_f1, v48.group.whole());
        let v84 = c.mixed_containment(&int(8), &int(4)).unwrap();
        assert!(!v84.holds);
        assert_eq!(v84.ker_f2.as_group().group().invariants(), &[int(4), int(2), int(2), int(2)]);
        assert_eq!(c.minimal_star_m(8).unwrap(), Some(5));
        let scan = c.scan(10).unwrap();
        assert!(scan[4].1 && scan[9].1);
        assert_eq!(scan.iter().find(|(_, h)| *h).map(|(m, _)| *m), Some(5));
        assert_eq!(c.minimal_star_m(0).unwrap(), None);
    }

    #[test]
    fn degree_32_reflex_class_group() {
        let rp = ReflexPair::from_params(52, 477).unwrap();
        assert_eq!((rp.reflex.a.clone(), rp.reflex.b.clone()), (int(104), int(796)));
        let c = StarContext::new(rp, &Config::default()).unwrap();
        assert_eq!(c.cl_kr.group().invariants(), &[int(32)]);
        let v = c.does_star_hold(&int(2)).unwrap();
        assert!(v.holds);
        assert!(v.intersection_has_exponent_two());
    }
}
