//! The unit group `(O/mO)^×` for a rational integer `m`, by enumeration
//! of each prime power component.

use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{factor_u64, int, Int};
use crate::fgab::matrix::IntMatrix;
use crate::fgab::{group_from_relations, AbGroup, Presentation};
use crate::nfield::{Elem, NumberField};
use crate::{Config, Error, Result};

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Component {
    q: u64,
    p: u64,
    n: usize,
    mt: Vec<Vec<Vec<u64>>>,
    /// encoded element -> index into `words`, or NONE
    table: Vec<u32>,
    words: Vec<Vec<i64>>,
    gens: Vec<Vec<u64>>,
    rels: Vec<Vec<i64>>,
}

impl Component {
    fn encode(&self, x: &[u64]) -> usize {
        x.iter().rev().fold(0usize, |acc, &c| acc * self.q as usize + c as usize)
    }

    fn decode(&self, mut e: usize) -> Vec<u64> {
        let mut v = vec![0u64; self.n];
        for c in v.iter_mut() {
            *c = (e % self.q as usize) as u64;
            e /= self.q as usize;
        }
        v
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let q = self.q as u128;
        let mut r = vec![0u128; self.n];
        for i in 0..self.n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..self.n {
                if b[j] == 0 {
                    continue;
                }
                let ab = a[i] as u128 * b[j] as u128 % q;
                for (t, &m) in self.mt[i][j].iter().enumerate() {
                    r[t] = (r[t] + ab * m as u128) % q;
                }
            }
        }
        r.into_iter().map(|v| v as u64).collect()
    }

    fn one(&self) -> Vec<u64> {
        let mut v = vec![0u64; self.n];
        v[0] = 1 % self.q;
        v
    }

    fn is_unit(&self, x: &[u64]) -> bool {
        // x is a unit iff multiplication by x is invertible mod p
        let p = self.p;
        let mut rows: Vec<Vec<u64>> = vec![vec![0; self.n]; self.n];
        for j in 0..self.n {
            let mut e = vec![0u64; self.n];
            e[j] = 1;
            let col = self.mul(x, &e);
            for i in 0..self.n {
                rows[i][j] = col[i] % p;
            }
        }
        crate::fp::rref(&mut rows, p).len() == self.n
    }

    fn build(k: &NumberField, p: u64, e: u32) -> Self {
        let n = k.degree();
        let q = p.pow(e);
        let qb = Int::from(q);
        let mt = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|r| k.mult_table()[i][j][r].mod_floor(&qb).to_u64().unwrap()).collect()).collect())
            .collect();
        let size = (q as usize).pow(n as u32);
        let mut c = Component { q, p, n, mt, table: vec![NONE; size], words: Vec::new(), gens: Vec::new(), rels: Vec::new() };
        let one = c.one();
        let i1 = c.encode(&one);
        c.table[i1] = 0;
        c.words.push(Vec::new());
        let mut members: Vec<usize> = vec![i1];
        let mut rels: Vec<Vec<i64>> = Vec::new();
        for idx in 0..size {
            if c.table[idx] != NONE {
                continue;
            }
            let g = c.decode(idx);
            if !c.is_unit(&g) {
                continue;
            }
            let gi = c.gens.len();
            c.gens.push(g.clone());
            for w in c.words.iter_mut() {
                w.push(0);
            }
            // order of g modulo the current subgroup
            let mut pw = g.clone();
            let mut ord = 1i64;
            let mut cosets: Vec<Vec<u64>> = vec![c.one()];
            while c.table[c.encode(&pw)] == NONE {
                cosets.push(pw.clone());
                pw = c.mul(&pw, &g);
                ord += 1;
            }
            let hw = c.words[c.table[c.encode(&pw)] as usize].clone();
            let mut rel: Vec<i64> = hw.iter().map(|v| -v).collect();
            rel[gi] += ord;
            rels.push(rel);
            let base = members.clone();
            for (j, gj) in cosets.iter().enumerate().skip(1) {
                for &m in &base {
                    let x = c.mul(&c.decode(m), gj);
                    let xi = c.encode(&x);
                    let mut w = c.words[c.table[m] as usize].clone();
                    w[gi] += j as i64;
                    c.table[xi] = c.words.len() as u32;
                    c.words.push(w);
                    members.push(xi);
                }
            }
        }
        let ng = c.gens.len();
        for r in rels.iter_mut() {
            r.resize(ng, 0);
        }
        c.rels = rels;
        c
    }
}

#[derive(Clone, Debug)]
pub struct ResidueGroup {
    pub m: Int,
    comps: Vec<Component>,
    pres: Presentation,
}

impl ResidueGroup {
    pub fn new(k: &NumberField, m: &Int, cfg: &Config) -> Result<Self> {
        let mu = m.to_u64().filter(|&v| v >= 1).ok_or_else(|| Error::InvalidInput("modulus must be a positive integer".into()))?;
        let n = k.degree() as u32;
        let mut comps = Vec::new();
        for (p, e) in factor_u64(mu) {
            let size = (p.pow(e) as u128).pow(n);
            if size > cfg.max_residue_group as u128 {
                return Err(Error::Resource("residue ring too large for enumeration".into()));
            }
            comps.push(Component::build(k, p, e));
        }
        let total: usize = comps.iter().map(|c| c.gens.len()).sum();
        let mut cols: Vec<Vec<Int>> = Vec::new();
        let mut off = 0;
        for c in &comps {
            for r in &c.rels {
                let mut v = vec![Int::zero(); total];
                for (i, x) in r.iter().enumerate() {
                    v[off + i] = int(*x);
                }
                cols.push(v);
            }
            off += c.gens.len();
        }
        let rel = if cols.is_empty() { IntMatrix::zeros(total, 0) } else { IntMatrix::from_cols(total, &cols) };
        let pres = group_from_relations(total, &rel);
        Ok(ResidueGroup { m: m.clone(), comps, pres })
    }

    pub fn group(&self) -> &AbGroup {
        &self.pres.group
    }

    fn word_integral(&self, x: &[Int]) -> Result<Vec<Int>> {
        let mut w = Vec::new();
        for c in &self.comps {
            let qb = Int::from(c.q);
            let v: Vec<u64> = x.iter().map(|a| a.mod_floor(&qb).to_u64().unwrap()).collect();
            let idx = c.table[c.encode(&v)];
            if idx == NONE {
                return Err(Error::InvalidInput("element not coprime to the modulus".into()));
            }
            w.extend(c.words[idx as usize].iter().map(|&e| int(e)));
        }
        Ok(w)
    }

    /// Coordinates of `x mod m` for `x` with numerator and denominator
    /// coprime to `m`.
    pub fn dlog(&self, _k: &NumberField, x: &Elem) -> Result<Vec<Int>> {
        let a = self.word_integral(&x.num)?;
        if x.den.is_one() {
            return Ok(self.pres.dlog(&a));
        }
        let mut d = vec![Int::zero(); x.num.len()];
        d[0] = x.den.clone();
        let b = self.word_integral(&d)?;
        let w: Vec<Int> = a.iter().zip(&b).map(|(u, v)| u - v).collect();
        Ok(self.pres.dlog(&w))
    }

    /// An integral element (coordinates reduced mod `m`) with the given
    /// coordinates.
    pub fn lift(&self, k: &NumberField, coords: &[Int]) -> Elem {
        let n = k.degree();
        if self.comps.is_empty() {
            return k.one();
        }
        let mut word = vec![Int::zero(); self.pres.n_gens()];
        for (i, c) in coords.iter().enumerate() {
            let gw = self.pres.generator_word(i);
            for (w, g) in word.iter_mut().zip(&gw) {
                *w += c * g;
            }
        }
        let mut acc = vec![Int::zero(); n];
        let mut modulus = Int::one();
        let mut off = 0;
        for c in &self.comps {
            let mut x = c.one();
            for (i, g) in c.gens.iter().enumerate() {
                let order = Int::from(c.words.len());
                let e = word[off + i].mod_floor(&order).to_u64().unwrap();
                let mut b = g.clone();
                let mut e = e;
                while e > 0 {
                    if e & 1 == 1 {
                        x = c.mul(&x, &b);
                    }
                    b = c.mul(&b, &b);
                    e >>= 1;
                }
            }
            off += c.gens.len();
            // CRT combine
            let qb = Int::from(c.q);
            let inv = crate::arith::mod_inv(&modulus, &qb).unwrap_or_else(Int::one);
            for i in 0..n {
                let t = ((Int::from(x[i]) - &acc[i]) * &inv).mod_floor(&qb);
                acc[i] += &modulus * t;
            }
            modulus *= qb;
        }
        Elem::integral(acc)
    }
}
