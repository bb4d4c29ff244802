//! Decomposition of rational primes by splitting `O/pO`.
//!
//! The radical of `O/pO` is the kernel of a large Frobenius power. The
//! semisimple quotient is split into fields using idempotents built from
//! random Frobenius-fixed elements, whose minimal polynomials have
//! distinct roots in `F_p`.

use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::Ideal;
use crate::arith::{is_prime_u64, Int};
use crate::fgab::matrix::IntMatrix;
use crate::fp;
use crate::nfield::order::mul_coords;
use crate::nfield::{Elem, NumberField};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub p: u64,
    pub e: u32,
    pub f: u32,
    pub ideal: Ideal,
    /// `ideal = p O + pi O`
    pub pi: Elem,
    /// `tau O_p`-multiplier with `tau * ideal ⊆ pO`, `tau ∉ pO`
    tau: Vec<Int>,
}

struct ModP<'a> {
    mt: Vec<Vec<Vec<u64>>>,
    p: u64,
    n: usize,
    _k: &'a NumberField,
}

impl<'a> ModP<'a> {
    fn new(k: &'a NumberField, p: u64) -> Self {
        let n = k.degree();
        let pb = Int::from(p);
        let mt = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|r| k.mult_table()[i][j][r].mod_floor(&pb).to_u64().unwrap()).collect()).collect())
            .collect();
        ModP { mt, p, n, _k: k }
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut r = vec![0u64; self.n];
        for i in 0..self.n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..self.n {
                if b[j] == 0 {
                    continue;
                }
                let ab = fp::mulm(a[i], b[j], self.p);
                for (k, &m) in self.mt[i][j].iter().enumerate() {
                    if m != 0 {
                        r[k] = (r[k] + fp::mulm(ab, m, self.p)) % self.p;
                    }
                }
            }
        }
        r
    }

    fn pow(&self, a: &[u64], mut e: u64) -> Vec<u64> {
        let mut acc = self.unit();
        let mut b = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }

    fn unit(&self) -> Vec<u64> {
        let mut v = vec![0u64; self.n];
        v[0] = 1 % self.p;
        v
    }

    fn basis(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0u64; self.n];
        v[i] = 1;
        v
    }

    fn lin(&self, a: &[u64], ca: u64, b: &[u64], cb: u64) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| (fp::mulm(x, ca, self.p) + fp::mulm(y, cb, self.p)) % self.p).collect()
    }
}

fn rows_from_cols(cols: &[Vec<u64>], n: usize) -> Vec<Vec<u64>> {
    (0..n).map(|r| cols.iter().map(|c| c[r]).collect()).collect()
}

/// All primes above `p` with ramification and residue degrees. The
/// order is deterministic: by residue degree, then Hermite form.
pub fn decompose(k: &NumberField, p: u64, seed: u64) -> Result<Vec<PrimeIdeal>> {
    if !is_prime_u64(p) {
        return Err(Error::InvalidInput("not a prime".into()));
    }
    if p >= 1 << 31 {
        return Err(Error::Resource("prime too large for decomposition".into()));
    }
    let n = k.degree();
    let a = ModP::new(k, p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    // radical
    let mut q = p;
    while (q as usize) < n {
        q *= p;
    }
    let fro: Vec<Vec<u64>> = (0..n).map(|i| a.pow(&a.basis(i), q)).collect();
    let rad = fp::kernel(&rows_from_cols(&fro, n), n, p);
    let radb = fp::span_basis(&rad, p);
    // Frobenius-fixed modulo the radical
    let fix_cols: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let x = a.pow(&a.basis(i), p);
            let d = a.lin(&x, 1, &a.basis(i), p - 1);
            fp::reduce(&d, &radb, p)
        })
        .collect();
    let fixed = fp::kernel(&rows_from_cols(&fix_cols, n), n, p);
    let count = |e: &[u64]| -> usize {
        let vs: Vec<Vec<u64>> = fixed.iter().map(|b| fp::reduce(&a.mul(e, b), &radb, p)).filter(|v| v.iter().any(|&x| x != 0)).collect();
        fp::span_basis(&vs, p).len()
    };
    let mut done: Vec<Vec<u64>> = Vec::new();
    let mut todo: Vec<Vec<u64>> = vec![a.unit()];
    while let Some(e) = todo.pop() {
        let c = count(&e);
        if c <= 1 {
            done.push(e);
            continue;
        }
        let mut split = None;
        for _ in 0..200 {
            let mut b = vec![0u64; n];
            for v in &fixed {
                let r = rng.next_u64() % p;
                b = a.lin(&b, 1, v, r);
            }
            let y = a.mul(&e, &b);
            // minimal polynomial of y in the piece with unit e
            let mut powers: Vec<Vec<u64>> = vec![e.clone()];
            let mut mp: Option<Vec<u64>> = None;
            for d in 1..=c {
                let next = fp::reduce(&a.mul(powers.last().unwrap(), &y), &radb, p);
                powers.push(next);
                // solve sum_{i<d} c_i y^i = -y^d modulo the radical
                let cols: Vec<Vec<u64>> = powers.iter().map(|v| fp::reduce(v, &radb, p)).collect();
                let ker = fp::kernel(&rows_from_cols(&cols, n), d + 1, p);
                if let Some(v) = ker.iter().find(|v| v[d] != 0) {
                    let inv = fp::invm(v[d], p);
                    mp = Some(v.iter().map(|&x| fp::mulm(x, inv, p)).collect());
                    break;
                }
            }
            let Some(mp) = mp else { continue };
            if mp.len() <= 2 {
                continue;
            }
            if p > 1 << 22 {
                return Err(Error::Resource("root finding modulo a large prime".into()));
            }
            let roots: Vec<u64> = (0..p)
                .filter(|&t| {
                    let mut acc = 0u64;
                    for c in mp.iter().rev() {
                        acc = (fp::mulm(acc, t, p) + c) % p;
                    }
                    acc == 0
                })
                .collect();
            if roots.len() < 2 {
                continue;
            }
            let mut pieces = Vec::new();
            for &l in &roots {
                let mut idem = e.clone();
                for &m in &roots {
                    if m == l {
                        continue;
                    }
                    let ymm = a.lin(&y, 1, &e, (p - m) % p);
                    let s = fp::invm((l + p - m) % p, p);
                    idem = a.mul(&idem, &ymm);
                    idem = idem.iter().map(|&x| fp::mulm(x, s, p)).collect();
                }
                pieces.push(idem);
            }
            split = Some(pieces);
            break;
        }
        match split {
            Some(ps) => todo.extend(ps),
            None => return Err(Error::Inconsistent("failed to split residue algebra".into())),
        }
    }
    let pb = Int::from(p);
    let mut out = Vec::new();
    for e in &done {
        let one = a.unit();
        let ce = a.lin(&one, 1, e, p - 1);
        let mut cols: Vec<Vec<Int>> = (0..n)
            .map(|i| {
                let mut v = vec![Int::zero(); n];
                v[i] = pb.clone();
                v
            })
            .collect();
        for r in &rad {
            cols.push(r.iter().map(|&x| Int::from(x)).collect());
        }
        for i in 0..n {
            let v = a.mul(&ce, &a.basis(i));
            cols.push(v.iter().map(|&x| Int::from(x)).collect());
        }
        let ideal = Ideal::from_lattice(&cols, Int::one(), n)?;
        out.push(finish_prime(k, p, ideal, &mut rng)?);
    }
    out.sort_by(|x, y| x.f.cmp(&y.f).then_with(|| cmp_hnf(&x.ideal.num, &y.ideal.num)));
    let total: u32 = out.iter().map(|q| q.e * q.f).sum();
    if total as usize != n {
        return Err(Error::Inconsistent("sum of e f differs from the degree".into()));
    }
    Ok(out)
}

fn cmp_hnf(a: &IntMatrix, b: &IntMatrix) -> core::cmp::Ordering {
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let c = a[(i, j)].cmp(&b[(i, j)]);
            if c != core::cmp::Ordering::Equal {
                return c;
            }
        }
    }
    core::cmp::Ordering::Equal
}

fn finish_prime(k: &NumberField, p: u64, ideal: Ideal, rng: &mut ChaCha8Rng) -> Result<PrimeIdeal> {
    let n = k.degree();
    let pb = Int::from(p);
    let mut norm = ideal.num_norm();
    let mut f = 0u32;
    while norm > Int::one() {
        norm /= &pb;
        f += 1;
    }
    // anti-uniformizer: y with y * ideal ⊆ pO, y ∉ pO
    let basis = ideal.num.columns();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for b in &basis {
        let imgs: Vec<Vec<Int>> = (0..n)
            .map(|i| {
                let mut e = vec![Int::zero(); n];
                e[i] = Int::one();
                mul_coords(k.mult_table(), &e, b)
            })
            .collect();
        for r in 0..n {
            rows.push((0..n).map(|i| imgs[i][r].mod_floor(&pb).to_u64().unwrap()).collect());
        }
    }
    let ker = fp::kernel(&rows, n, p);
    let tau: Vec<Int> = ker.first().ok_or_else(|| Error::Inconsistent("no anti-uniformizer".into()))?.iter().map(|&x| Int::from(x)).collect();
    let mut pr = PrimeIdeal { p, e: 0, f, ideal, pi: k.zero(), tau };
    pr.e = pr.valuation_int(k, &k.from_int(&pb).num) as u32;
    // two-element form
    let pe = k.from_int(&pb);
    let mut cands: Vec<Elem> = pr.ideal.basis();
    for _ in 0..400 {
        let mut c = k.zero();
        for b in pr.ideal.basis() {
            let r = (rng.next_u64() % (2 * p + 1)) as i64 - p as i64;
            c = k.add(&c, &k.mul_int(&b, &Int::from(r)));
        }
        cands.push(c);
    }
    for c in cands {
        if c.is_zero() {
            continue;
        }
        if Ideal::from_gens(k, &[pe.clone(), c.clone()])? == pr.ideal {
            pr.pi = c;
            return Ok(pr);
        }
    }
    Err(Error::Inconsistent("no two-element form found".into()))
}

impl PrimeIdeal {
    pub fn norm(&self) -> Int {
        num_traits::pow(Int::from(self.p), self.f as usize)
    }

    fn valuation_int(&self, k: &NumberField, y: &[Int]) -> i64 {
        let pb = Int::from(self.p);
        let mut y = y.to_vec();
        if y.iter().all(|v| v.is_zero()) {
            return i64::MAX;
        }
        let mut v = 0;
        loop {
            let z = mul_coords(k.mult_table(), &y, &self.tau);
            if z.iter().all(|c| c.is_multiple_of(&pb)) {
                y = z.iter().map(|c| c / &pb).collect();
                v += 1;
            } else {
                return v;
            }
        }
    }

    /// `v_P(x)` for nonzero `x`.
    pub fn valuation(&self, k: &NumberField, x: &Elem) -> i64 {
        let v = self.valuation_int(k, &x.num);
        let mut d = x.den.clone();
        let pb = Int::from(self.p);
        let mut vd = 0i64;
        while d.is_multiple_of(&pb) {
            d /= &pb;
            vd += 1;
        }
        v - vd * self.e as i64
    }

    /// `v_P(I)` for a nonzero fractional ideal.
    pub fn ideal_valuation(&self, k: &NumberField, i: &Ideal) -> i64 {
        let m = i.num.columns().iter().filter(|c| c.iter().any(|v| !v.is_zero())).map(|c| self.valuation_int(k, c)).min().unwrap();
        let mut d = i.den.clone();
        let pb = Int::from(self.p);
        let mut vd = 0i64;
        while d.is_multiple_of(&pb) {
            d /= &pb;
            vd += 1;
        }
        m - vd * self.e as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn check_product(k: &NumberField, p: u64) -> Vec<PrimeIdeal> {
        let ps = decompose(k, p, 1).unwrap();
        let mut prod = Ideal::unit(k);
        for q in &ps {
            prod = prod.mul(k, &q.ideal.pow(k, q.e as i64));
            assert_eq!(q.valuation(k, &k.from_i64(p as i64)), q.e as i64);
            assert_eq!(q.ideal_valuation(k, &q.ideal), 1);
        }
        assert_eq!(prod, Ideal::from_int(k, &int(p as i64)).unwrap(), "p = {}", p);
        ps
    }

    #[test]
    fn products_recover_p() {
        for (a, b) in [(53, 500), (130, 2525), (65, 425), (106, 809)] {
            let k = NumberField::from_coeffs(&[b, 0, a, 0, 1]).unwrap();
            for p in crate::arith::primes_up_to(50) {
                check_product(&k, p);
            }
        }
    }

    #[test]
    fn three_primes_over_two_in_reflex() {
        let k = NumberField::from_coeffs(&[2525, 0, 130, 0, 1]).unwrap();
        let ps = check_product(&k, 2);
        assert_eq!(ps.len(), 3);
        let mut ef: Vec<(u32, u32)> = ps.iter().map(|q| (q.e, q.f)).collect();
        ef.sort();
        assert_eq!(ef, vec![(1, 1), (1, 1), (1, 2)]);
    }

    #[test]
    fn inert_three_in_q_sqrt5() {
        let k = NumberField::from_coeffs(&[-5, 0, 1]).unwrap();
        let ps = check_product(&k, 3);
        assert_eq!(ps.len(), 1);
        assert_eq!((ps[0].e, ps[0].f), (1, 2));
    }

    #[test]
    fn seven_in_running_example() {
        let k = NumberField::from_coeffs(&[500, 0, 53, 0, 1]).unwrap();
        let ps = check_product(&k, 7);
        let a = k.gen();
        let target = Ideal::from_gens(&k, &[k.from_i64(7), k.sub(&a, &k.from_i64(2))]).unwrap();
        assert!(ps.iter().any(|q| q.ideal == target));
    }
}
