//! Class groups from a factor base of all primes up to the Minkowski
//! bound.
//!
//! Every class contains an integral ideal of norm at most the Minkowski
//! bound, so the factor base primes generate. Each factor base prime is
//! either eliminated (written in terms of earlier primes by one smooth
//! element) or kept as a generator. Relations among the generators come
//! from smooth elements of random products. The resulting group `G'`
//! surjects onto the class group; it is certified by checking that no
//! nonzero element of prime order in `G'` is principal, which forces the
//! kernel to be trivial. Principal ones found there are new relations.

use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::prime::{decompose, PrimeIdeal};
use super::search::{principal_generator, reduce, short_elements, unit_period};
use super::Ideal;
use crate::arith::{primes_up_to, Int};
use crate::fgab::matrix::IntMatrix;
use crate::fgab::{group_from_relations, AbGroup, Presentation};
use crate::nfield::units::UnitGroup;
use crate::nfield::{Elem, NumberField};
use crate::{Config, Error, Result};

#[derive(Clone, Debug)]
pub struct ClassGroup {
    pub units: UnitGroup,
    /// Primes of norm at most the Minkowski bound, by increasing norm.
    pub fb: Vec<PrimeIdeal>,
    /// Indices into `fb` of the primes used as generators.
    pub s: Vec<usize>,
    /// Coordinates of each factor base prime in `Z^s`.
    fb_coords: Vec<Vec<Int>>,
    pres: Presentation,
    /// Relations (columns in `Z^s`).
    rels: Vec<Vec<Int>>,
    /// Integral ideal in the class of each standard generator.
    pub reps: Vec<Ideal>,
    seed: u64,
}

struct Builder<'a> {
    k: &'a NumberField,
    fb: Vec<PrimeIdeal>,
    chars: Vec<u64>,
}

/// Twist `(s, -s)` with `s` uniform over one unit period.
fn random_twist(rng: &mut ChaCha8Rng, period: Option<f64>, places: usize) -> Vec<f64> {
    match period {
        Some(l) if places == 2 => {
            let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            let s = (u - 0.5) * l;
            vec![s, -s]
        }
        _ => vec![0.0; places],
    }
}

impl<'a> Builder<'a> {
    /// Valuations of the cofactor `(x) / J` at factor base primes when
    /// it is smooth. `vj` gives `v_q(J)` for each factor base prime.
    fn smooth_cofactor(&self, x: &Elem, jnorm: &Int, vj: &dyn Fn(usize) -> i64) -> Option<Vec<(usize, i64)>> {
        let nx = self.k.norm(x).abs();
        if !nx.is_integer() {
            return None;
        }
        let nx = nx.to_integer();
        if nx.is_zero() || !nx.is_multiple_of(jnorm) {
            return None;
        }
        let mut c = nx / jnorm;
        let target = c.clone();
        let mut ps = Vec::new();
        for &p in &self.chars {
            let pb = Int::from(p);
            if c.is_multiple_of(&pb) {
                ps.push(p);
                while c.is_multiple_of(&pb) {
                    c /= &pb;
                }
            }
            if c.is_one() {
                break;
            }
        }
        if !c.is_one() {
            return None;
        }
        let mut out = Vec::new();
        let mut prod = Int::one();
        for (i, q) in self.fb.iter().enumerate() {
            if !ps.contains(&q.p) {
                continue;
            }
            let v = q.valuation(self.k, x) - vj(i);
            if v < 0 {
                return None;
            }
            if v > 0 {
                prod *= num_traits::pow(q.norm(), v as usize);
                out.push((i, v));
            }
        }
        if prod == target {
            Some(out)
        } else {
            None
        }
    }
}

fn add_scaled(acc: &mut [Int], v: &[Int], c: i64) {
    let c = Int::from(c);
    for (a, b) in acc.iter_mut().zip(v) {
        *a += &c * b;
    }
}

impl ClassGroup {
    pub fn compute(k: &NumberField, cfg: &Config) -> Result<Self> {
        let units = UnitGroup::compute(k)?;
        let bound = k.minkowski_bound();
        if bound > cfg.max_class_bound as f64 {
            return Err(Error::Resource("Minkowski bound above the configured ceiling".into()));
        }
        let b = libm::floor(bound) as u64;
        let mut fb: Vec<PrimeIdeal> = Vec::new();
        for p in primes_up_to(b.max(1)) {
            for q in decompose(k, p, cfg.seed)? {
                if q.norm() <= Int::from(b) {
                    fb.push(q);
                }
            }
        }
        fb.sort_by(|x, y| x.norm().cmp(&y.norm()).then(x.p.cmp(&y.p)));
        let mut chars: Vec<u64> = fb.iter().map(|q| q.p).collect();
        chars.sort_unstable();
        chars.dedup();
        let period = unit_period(k, &units)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let bld = Builder { k, fb, chars };
        let nfb = bld.fb.len();

        // elimination pass: prime i expressed through primes j < i, else kept
        let mut s: Vec<usize> = Vec::new();
        let mut elim: Vec<Option<Vec<(usize, i64)>>> = vec![None; nfb];
        for i in 0..nfb {
            let mut found = None;
            'tries: for t in 0..6 {
                let twist = if t == 0 { vec![0.0; k.places()] } else { random_twist(&mut rng, period, k.places()) };
                let cands = short_elements(k, &bld.fb[i].ideal, &twist, 3.0 + t as f64, 400)?;
                let nq = bld.fb[i].norm();
                for x in cands {
                    let vj = |j: usize| i64::from(j == i);
                    if let Some(f) = bld.smooth_cofactor(&x, &nq, &vj) {
                        if f.iter().all(|&(j, _)| j < i) {
                            found = Some(f);
                            break 'tries;
                        }
                    }
                }
            }
            match found {
                Some(f) => elim[i] = Some(f),
                None => s.push(i),
            }
        }
        let ns = s.len();
        let mut fb_coords: Vec<Vec<Int>> = vec![Vec::new(); nfb];
        for i in 0..nfb {
            let mut v = vec![Int::zero(); ns];
            match &elim[i] {
                None => {
                    let pos = s.iter().position(|&j| j == i).unwrap();
                    v[pos] = Int::one();
                }
                Some(f) => {
                    // (x) = p_i * prod q^v  =>  [p_i] = -sum v [q]
                    for &(j, e) in f {
                        let c = fb_coords[j].clone();
                        add_scaled(&mut v, &c, -e);
                    }
                }
            }
            fb_coords[i] = v;
        }

        let mut cg = ClassGroup {
            units: units.clone(),
            fb: bld.fb.clone(),
            s,
            fb_coords,
            pres: group_from_relations(0, &IntMatrix::zeros(0, 0)),
            rels: Vec::new(),
            reps: Vec::new(),
            seed: cfg.seed,
        };
        if ns == 0 {
            cg.finish(k)?;
            return Ok(cg);
        }

        // relations among the generators
        let mut rels: Vec<Vec<Int>> = Vec::new();
        let mut rank = 0usize;
        let mut rounds = 0usize;
        while rank < ns || rels.len() < ns + 4 {
            rounds += 1;
            if rounds > 4000 {
                return Err(Error::Resource("class group relation search did not converge".into()));
            }
            // random product of a few generators
            let mut ex = vec![0i64; ns];
            let picks = 1 + (rng.next_u64() % 3) as usize;
            for _ in 0..picks {
                let j = (rng.next_u64() % ns as u64) as usize;
                ex[j] += 1;
            }
            let mut r = Ideal::unit(k);
            for (j, &e) in ex.iter().enumerate() {
                if e != 0 {
                    r = r.mul(k, &bld.fb[cg.s[j]].ideal.pow(k, e));
                }
            }
            let nr = r.num_norm();
            let sidx = cg.s.clone();
            let vr = |i: usize| sidx.iter().position(|&j| j == i).map_or(0, |p| ex[p]);
            let twist = random_twist(&mut rng, period, k.places());
            for x in short_elements(k, &r, &twist, 2.5, 60)? {
                if let Some(f) = bld.smooth_cofactor(&x, &nr, &vr) {
                    let mut v: Vec<Int> = ex.iter().map(|&e| Int::from(e)).collect();
                    for (j, e) in f {
                        add_scaled(&mut v, &cg.fb_coords[j], e);
                    }
                    if v.iter().all(|c| c.is_zero()) {
                        continue;
                    }
                    rels.push(v);
                }
            }
            if !rels.is_empty() {
                rank = IntMatrix::from_cols(ns, &rels).rank();
            }
        }
        cg.rels = rels;
        cg.certify(k)?;
        cg.finish(k)?;
        Ok(cg)
    }

    fn rebuild(&mut self) {
        let ns = self.s.len();
        let rel = if self.rels.is_empty() { IntMatrix::zeros(ns, 0) } else { IntMatrix::from_cols(ns, &self.rels) };
        self.pres = group_from_relations(ns, &rel);
    }

    /// Integral ideal in the class of the word `w` over the generators.
    fn class_of_word(&self, k: &NumberField, w: &[Int]) -> Result<Ideal> {
        let mut acc = Ideal::unit(k);
        for (j, e) in w.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            let base = &self.fb[self.s[j]].ideal;
            let mut b = if e.is_negative() { reduce(k, &base.inv(k))?.0 } else { base.clone() };
            let mut e = e.abs();
            let mut pw = Ideal::unit(k);
            while !e.is_zero() {
                if e.is_odd() {
                    pw = reduce(k, &pw.mul(k, &b))?.0;
                }
                e >>= 1;
                if !e.is_zero() {
                    b = reduce(k, &b.mul(k, &b))?.0;
                }
            }
            acc = reduce(k, &acc.mul(k, &pw))?.0;
        }
        Ok(acc)
    }

    fn certify(&mut self, k: &NumberField) -> Result<()> {
        'outer: for _ in 0..64 {
            self.rebuild();
            let g = self.pres.group.clone();
            if !g.is_finite() {
                return Err(Error::Inconsistent("relation lattice lost full rank".into()));
            }
            let order = g.order().unwrap();
            let primes = crate::arith::factor(&order)?;
            for (l, _) in primes {
                let l64 = l.to_u64().ok_or_else(|| Error::Resource("class number too large".into()))?;
                // G'[l] = sum over l | d_i of (d_i / l) Z / d_i
                let idx: Vec<usize> = (0..g.rank()).filter(|&i| g.invariants()[i].is_multiple_of(&l)).collect();
                let count = l64.checked_pow(idx.len() as u32).ok_or_else(|| Error::Resource("torsion too large".into()))?;
                if count > 1 << 16 {
                    return Err(Error::Resource("torsion too large to certify".into()));
                }
                for code in 1..count {
                    let mut c = code;
                    let mut el = g.zero();
                    for &i in &idx {
                        let d = &g.invariants()[i];
                        el[i] = (d / &l) * Int::from(c % l64);
                        c /= l64;
                    }
                    let word = self.element_word(&el);
                    let id = self.class_of_word(k, &word)?;
                    if principal_generator(k, &self.units, &id)?.is_some() {
                        self.rels.push(word);
                        continue 'outer;
                    }
                }
            }
            return Ok(());
        }
        Err(Error::Resource("class group certification did not converge".into()))
    }

    /// Word over the generators naming the group element `el`.
    fn element_word(&self, el: &[Int]) -> Vec<Int> {
        let ns = self.s.len();
        let mut w = vec![Int::zero(); ns];
        for (i, c) in el.iter().enumerate() {
            let gw = self.pres.generator_word(i);
            for (a, b) in w.iter_mut().zip(&gw) {
                *a += c * b;
            }
        }
        w
    }

    fn finish(&mut self, k: &NumberField) -> Result<()> {
        self.rebuild();
        let mut reps = Vec::new();
        for i in 0..self.pres.group.rank() {
            let w = self.pres.generator_word(i);
            reps.push(self.class_of_word(k, &w)?);
        }
        self.reps = reps;
        Ok(())
    }

    pub fn group(&self) -> &AbGroup {
        &self.pres.group
    }

    pub fn order(&self) -> Int {
        self.pres.group.order().expect("class groups are finite")
    }

    /// Coordinates of the class of a nonzero fractional ideal.
    pub fn dlog(&self, k: &NumberField, ideal: &Ideal) -> Result<Vec<Int>> {
        let w = self.word(k, ideal)?;
        Ok(self.pres.dlog(&w))
    }

    /// Class of an ideal written as a word over the generator primes.
    fn word(&self, k: &NumberField, ideal: &Ideal) -> Result<Vec<Int>> {
        let ns = self.s.len();
        if ns == 0 {
            return Ok(Vec::new());
        }
        let l = Ideal { num: ideal.num.clone(), den: Int::one() };
        if let Some(w) = self.factor_over_fb(k, &l) {
            return Ok(w);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0xd1_0c);
        let (l, _) = reduce(k, &l)?;
        if let Some(w) = self.factor_over_fb(k, &l) {
            return Ok(w);
        }
        let mut chars: Vec<u64> = self.fb.iter().map(|q| q.p).collect();
        chars.sort_unstable();
        chars.dedup();
        let period = unit_period(k, &self.units)?;
        let bld = Builder { k, fb: self.fb.clone(), chars };
        for round in 0..2000 {
            let mut ex = vec![0i64; ns];
            if round > 0 {
                for _ in 0..1 + (rng.next_u64() % 3) {
                    ex[(rng.next_u64() % ns as u64) as usize] += 1;
                }
            }
            let mut r = Ideal::unit(k);
            for (j, &e) in ex.iter().enumerate() {
                if e != 0 {
                    r = r.mul(k, &self.fb[self.s[j]].ideal.pow(k, e));
                }
            }
            let cur = l.mul(k, &r);
            let ncur = cur.num_norm();
            let sidx = &self.s;
            let vcur = |i: usize| {
                let vr = sidx.iter().position(|&j| j == i).map_or(0, |p| ex[p]);
                vr + self.fb[i].ideal_valuation(k, &l)
            };
            let twist = if round == 0 { vec![0.0; k.places()] } else { random_twist(&mut rng, period, k.places()) };
            for x in short_elements(k, &cur, &twist, 2.5, 40)? {
                if let Some(f) = bld.smooth_cofactor(&x, &ncur, &vcur) {
                    // (x) = L r c  =>  [L] = -[r] - [c]
                    let mut w: Vec<Int> = ex.iter().map(|&e| Int::from(-e)).collect();
                    for (j, e) in f {
                        add_scaled(&mut w, &self.fb_coords[j], -e);
                    }
                    return Ok(w);
                }
            }
        }
        Err(Error::Resource("could not smooth ideal for the class group discrete log".into()))
    }

    /// Word of an integral ideal all of whose prime factors lie in the
    /// factor base.
    fn factor_over_fb(&self, k: &NumberField, l: &Ideal) -> Option<Vec<Int>> {
        let mut n = l.num_norm();
        let ns = self.s.len();
        let mut w = vec![Int::zero(); ns];
        let mut ps: Vec<u64> = Vec::new();
        for q in &self.fb {
            let pb = Int::from(q.p);
            if !ps.contains(&q.p) && n.is_multiple_of(&pb) {
                ps.push(q.p);
            }
        }
        for (i, q) in self.fb.iter().enumerate() {
            if !ps.contains(&q.p) {
                continue;
            }
            let v = q.ideal_valuation(k, l);
            if v > 0 {
                let qn = num_traits::pow(q.norm(), v as usize);
                if !n.is_multiple_of(&qn) {
                    return None;
                }
                n /= qn;
                add_scaled(&mut w, &self.fb_coords[i], v);
            }
        }
        if n.is_one() {
            Some(w)
        } else {
            None
        }
    }

    /// Whether the ideal is principal, by its class.
    pub fn is_principal(&self, k: &NumberField, ideal: &Ideal) -> Result<bool> {
        let d = self.dlog(k, ideal)?;
        Ok(self.group().is_zero(&d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    /// Number of reduced positive definite forms of discriminant `d < 0`.
    fn reduced_forms(d: i64) -> usize {
        let mut h = 0;
        let mut a = 1i64;
        while 3 * a * a <= -d {
            for b in -a + 1..=a {
                let num = b * b - d;
                if num % (4 * a) != 0 {
                    continue;
                }
                let c = num / (4 * a);
                if c < a {
                    continue;
                }
                if b < 0 && a == c {
                    continue;
                }
                h += 1;
            }
            a += 1;
        }
        h
    }

    #[test]
    fn imaginary_quadratic_class_numbers() {
        for (f, d) in [(vec![5i64, 0, 1], -20), (vec![26, 0, 1], -104), (vec![6, -1, 1], -23), (vec![14, 0, 1], -56), (vec![18, 1, 1], -71), (vec![65, 0, 1], -260)] {
            let k = NumberField::from_coeffs(&f).unwrap();
            assert_eq!(*k.disc(), int(d));
            let cg = ClassGroup::compute(&k, &Config::default()).unwrap();
            assert_eq!(cg.order(), Int::from(reduced_forms(d)), "disc {}", d);
        }
        let k = NumberField::from_coeffs(&[5, 0, 1]).unwrap();
        let cg = ClassGroup::compute(&k, &Config::default()).unwrap();
        assert_eq!(cg.group().invariants(), &[int(2)]);
        // Q(sqrt(-65)) has class group C4 x C2
        let k = NumberField::from_coeffs(&[65, 0, 1]).unwrap();
        let cg = ClassGroup::compute(&k, &Config::default()).unwrap();
        assert_eq!(cg.group().invariants(), &[int(4), int(2)]);
        for (i, r) in cg.reps.iter().enumerate() {
            let mut e = cg.group().zero();
            e[i] = Int::one();
            assert_eq!(cg.dlog(&k, r).unwrap(), e);
        }
    }

    #[test]
    fn dlog_matches_principality() {
        let k = NumberField::from_coeffs(&[65, 0, 1]).unwrap();
        let cg = ClassGroup::compute(&k, &Config::default()).unwrap();
        let mut ids = Vec::new();
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71] {
            for q in decompose(&k, p, 0).unwrap() {
                ids.push(q.ideal);
            }
        }
        for a in ids.iter().take(12) {
            for b in ids.iter().skip(5).take(12) {
                let ab = a.mul(&k, b);
                let da = cg.dlog(&k, a).unwrap();
                let db = cg.dlog(&k, b).unwrap();
                let dab = cg.dlog(&k, &ab).unwrap();
                assert_eq!(dab, cg.group().add(&da, &db));
                let principal = principal_generator(&k, &cg.units, &ab).unwrap().is_some();
                assert_eq!(principal, cg.group().is_zero(&dab));
            }
        }
    }

    #[test]
    fn real_quadratic_class_numbers() {
        // h(Q(sqrt 79)) = 3, h(Q(sqrt 10)) = 2, h(Q(sqrt 5)) = 1
        for (f, h) in [(vec![-79i64, 0, 1], 3), (vec![-10, 0, 1], 2), (vec![-1, -1, 1], 1), (vec![-223, 0, 1], 3)] {
            let k = NumberField::from_coeffs(&f).unwrap();
            let cg = ClassGroup::compute(&k, &Config::default()).unwrap();
            assert_eq!(cg.order(), int(h));
        }
    }
}

#[cfg(test)]
mod quartic_tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn running_example_class_group() {
        let k = NumberField::from_coeffs(&[500, 0, 53, 0, 1]).unwrap();
        let cg = ClassGroup::compute(&k, &Config::default()).unwrap();
        assert_eq!(cg.order(), int(8));
        assert_eq!(cg.group().invariants(), &[int(4), int(2)]);
    }

    #[test]
    fn other_fields() {
        let cases: [(i64, i64, &[i64]); 4] = [(106, 809, &[8]), (130, 2525, &[8]), (65, 425, &[4, 2]), (52, 477, &[32])];
        for (a, b, inv) in cases {
            let k = NumberField::from_coeffs(&[b, 0, a, 0, 1]).unwrap();
            let cg = ClassGroup::compute(&k, &Config::default()).unwrap();
            let want: Vec<Int> = inv.iter().map(|&x| Int::from(x)).collect();
            assert_eq!(cg.group().invariants(), &want[..], "x^4 + {a}x^2 + {b}");
        }
    }
}
