//! Fractional ideals of maximal orders, prime decomposition, principal
//! ideal search, class groups, residue unit groups and ray class groups.
//!
//! An ideal is `(1/den) * L` with `L` an integer column lattice in the
//! coordinates of the integral basis, kept in Hermite form with
//! `gcd(den, content(L)) = 1`, so structural equality is ideal equality.

pub mod classgroup;
pub mod prime;
pub mod ray;
pub mod residue;
pub mod search;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{Int, Rat};
use crate::fgab::matrix::{hnf, solve_hnf, IntMatrix};
use crate::nfield::order::mul_coords;
use crate::nfield::{rat_inverse, Elem, NumberField};
use crate::{Error, Result};

pub use classgroup::ClassGroup;
pub use prime::{decompose, PrimeIdeal};
pub use ray::RayClassGroup;
pub use residue::ResidueGroup;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ideal {
    pub num: IntMatrix,
    pub den: Int,
}

impl Ideal {
    /// Canonical ideal from a full-rank set of generating columns.
    pub fn from_lattice(cols: &[Vec<Int>], den: Int, n: usize) -> Result<Self> {
        let nz: Vec<Vec<Int>> = cols.iter().filter(|c| c.iter().any(|v| !v.is_zero())).cloned().collect();
        if nz.is_empty() {
            return Err(Error::InvalidInput("zero ideal".into()));
        }
        let h = hnf(&IntMatrix::from_cols(n, &nz));
        if h.cols() != n {
            return Err(Error::InvalidInput("zero ideal".into()));
        }
        Ok(Self::canonical(h, den))
    }

    fn canonical(h: IntMatrix, den: Int) -> Self {
        let n = h.rows();
        let mut g = den.clone();
        for i in 0..n {
            for j in 0..n {
                if !h[(i, j)].is_zero() {
                    g = g.gcd(&h[(i, j)]);
                }
            }
        }
        if g.is_one() {
            return Ideal { num: h, den };
        }
        let mut h2 = h.clone();
        for i in 0..n {
            for j in 0..n {
                h2[(i, j)] = &h[(i, j)] / &g;
            }
        }
        Ideal { num: h2, den: den / g }
    }

    pub fn unit(k: &NumberField) -> Self {
        Ideal { num: IntMatrix::identity(k.degree()), den: Int::one() }
    }

    pub fn from_int(k: &NumberField, a: &Int) -> Result<Self> {
        Self::principal(k, &k.from_int(a))
    }

    /// Ideal generated by the given elements.
    pub fn from_gens(k: &NumberField, gens: &[Elem]) -> Result<Self> {
        let n = k.degree();
        let mut den = Int::one();
        for g in gens {
            den = den.lcm(&g.den);
        }
        let mut cols = Vec::new();
        for g in gens {
            let s = &den / &g.den;
            let num: Vec<Int> = g.num.iter().map(|v| v * &s).collect();
            cols.extend(k.mul_matrix(&Elem::integral(num)).columns());
        }
        Self::from_lattice(&cols, den, n)
    }

    pub fn principal(k: &NumberField, x: &Elem) -> Result<Self> {
        Self::from_gens(k, core::slice::from_ref(x))
    }

    pub fn is_unit(&self) -> bool {
        self.den.is_one() && self.num == IntMatrix::identity(self.num.rows())
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// Basis elements (columns divided by `den`).
    pub fn basis(&self) -> Vec<Elem> {
        self.num.columns().into_iter().map(|c| Elem::new(c, self.den.clone())).collect()
    }

    pub fn norm(&self) -> Rat {
        let n = self.num.rows();
        let d: Int = (0..n).map(|i| self.num[(i, i)].clone()).product();
        Rat::new(d, num_traits::pow(self.den.clone(), n))
    }

    /// Norm of the numerator lattice (an integer).
    pub fn num_norm(&self) -> Int {
        (0..self.num.rows()).map(|i| self.num[(i, i)].clone()).product()
    }

    /// Smallest positive rational in the ideal.
    pub fn min_rational(&self) -> Rat {
        Rat::new(self.num[(0, 0)].clone(), self.den.clone())
    }

    pub fn contains(&self, x: &Elem) -> bool {
        // x = a/b in I = L/den  <=>  a * den / b in L
        let v: Vec<Rat> = x.num.iter().map(|a| Rat::new(a * &self.den, x.den.clone())).collect();
        if v.iter().any(|r| !r.is_integer()) {
            return false;
        }
        let iv: Vec<Int> = v.into_iter().map(|r| r.to_integer()).collect();
        solve_hnf(&self.num, &iv).is_some()
    }

    pub fn mul(&self, k: &NumberField, o: &Ideal) -> Ideal {
        let n = k.degree();
        let a = self.num.columns();
        let b = o.num.columns();
        let mut cols = Vec::with_capacity(n * n);
        for x in &a {
            for y in &b {
                cols.push(mul_coords(k.mult_table(), x, y));
            }
        }
        Self::from_lattice(&cols, &self.den * &o.den, n).expect("product of nonzero ideals")
    }

    pub fn mul_elem(&self, k: &NumberField, x: &Elem) -> Result<Ideal> {
        if x.is_zero() {
            return Err(Error::InvalidInput("zero element".into()));
        }
        let n = k.degree();
        let cols: Vec<Vec<Int>> = self.num.columns().iter().map(|c| mul_coords(k.mult_table(), c, &x.num)).collect();
        Self::from_lattice(&cols, &self.den * &x.den, n)
    }

    pub fn mul_rat(&self, q: &Rat) -> Ideal {
        let n = self.num.rows();
        let mut h = self.num.clone();
        let a = q.numer().abs();
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] = &h[(i, j)] * &a;
            }
        }
        Self::canonical(h, &self.den * q.denom())
    }

    pub fn add(&self, k: &NumberField, o: &Ideal) -> Ideal {
        let den = self.den.lcm(&o.den);
        let sa = &den / &self.den;
        let sb = &den / &o.den;
        let mut cols: Vec<Vec<Int>> = self.num.columns().into_iter().map(|c| c.iter().map(|v| v * &sa).collect()).collect();
        cols.extend(o.num.columns().into_iter().map(|c| c.iter().map(|v| v * &sb).collect::<Vec<Int>>()));
        Self::from_lattice(&cols, den, k.degree()).expect("nonzero")
    }

    /// Trace dual `{x : Tr(x I) in Z}`.
    pub fn dual(&self, k: &NumberField) -> Ideal {
        let n = k.degree();
        let t = k.trace_form();
        // M = B^T T (integer), dual basis = den * M^{-1}
        let mut m = vec![vec![Int::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Int::zero();
                for r in 0..n {
                    s += &self.num[(r, i)] * &t[r][j];
                }
                m[i][j] = s;
            }
        }
        let mi = rat_inverse(&m);
        let mut den = Int::one();
        for row in &mi {
            for v in row {
                den = den.lcm(v.denom());
            }
        }
        let cols: Vec<Vec<Int>> = (0..n)
            .map(|j| (0..n).map(|i| (&mi[i][j] * Rat::from(&den * &self.den)).to_integer()).collect())
            .collect();
        Self::from_lattice(&cols, den, n).expect("dual of a lattice")
    }

    pub fn inv(&self, k: &NumberField) -> Ideal {
        let codiff = Ideal::unit(k).dual(k);
        self.mul(k, &codiff).dual(k)
    }

    pub fn div(&self, k: &NumberField, o: &Ideal) -> Ideal {
        self.mul(k, &o.inv(k))
    }

    pub fn pow(&self, k: &NumberField, e: i64) -> Ideal {
        let base = if e < 0 { self.inv(k) } else { self.clone() };
        let mut acc = Ideal::unit(k);
        let mut b = base;
        let mut e = e.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(k, &b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(k, &b);
            }
        }
        acc
    }

    /// Image under an automorphism given by its matrix on integral
    /// coordinates.
    pub fn apply_matrix(&self, k: &NumberField, m: &IntMatrix) -> Ideal {
        let cols: Vec<Vec<Int>> = self.num.columns().iter().map(|c| m.mul_vec(c)).collect();
        Self::from_lattice(&cols, self.den.clone(), k.degree()).expect("nonzero")
    }

    pub fn conj(&self, k: &NumberField) -> Ideal {
        let m = k.conj_matrix().expect("complex conjugation").clone();
        self.apply_matrix(k, &m)
    }

    /// Integral ideal coprime to the integer `m`.
    pub fn is_coprime_to(&self, m: &Int) -> bool {
        self.num_norm().gcd(m).is_one() && self.den.gcd(m).is_one()
    }

    /// A pair `(a, b)` with `I = a O + b O`, `a` the smallest positive
    /// rational in `I`.
    pub fn two_element(&self, k: &NumberField) -> Option<(Rat, Elem)> {
        let a = self.min_rational();
        let ae = k.from_rat(&a);
        let basis = self.basis();
        for b in &basis {
            if let Ok(j) = Ideal::from_gens(k, &[ae.clone(), b.clone()]) {
                if &j == self {
                    return Some((a, b.clone()));
                }
            }
        }
        // small combinations of the basis
        let n = basis.len();
        let mut coeffs = vec![0i64; n];
        let mut s = 0x9e37_79b9_7f4a_7c15u64;
        for round in 1..2000u64 {
            let width = 3 + 2 * (round / 100);
            for c in coeffs.iter_mut() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                *c = ((s >> 33) % width) as i64 - (width / 2) as i64;
            }
            let mut b = k.zero();
            for (c, e) in coeffs.iter().zip(&basis) {
                b = k.add(&b, &k.mul_int(e, &Int::from(*c)));
            }
            if b.is_zero() {
                continue;
            }
            if let Ok(j) = Ideal::from_gens(k, &[ae.clone(), b.clone()]) {
                if &j == self {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Human readable two-element form, e.g. `(7, alpha - 2)`.
    pub fn format(&self, k: &NumberField, var: &str) -> String {
        if self.is_unit() {
            return String::from("(1)");
        }
        let Some((a, b)) = self.two_element(k) else {
            let gens: Vec<String> = self.basis().iter().map(|b| k.format_elem(b, var)).collect();
            return format!("({})", gens.join(", "));
        };
        let astr = if a.is_integer() { format!("{}", a.numer()) } else { format!("{}/{}", a.numer(), a.denom()) };
        format!("({}, {})", astr, k.format_elem(&b, var))
    }
}
