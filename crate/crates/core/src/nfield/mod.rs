//! Number fields `Q[x]/(f)` of degree at most 4 with their maximal orders.
//!
//! Elements are stored on the integral basis `w_0 = 1, w_1, ...` with a
//! common denominator. Arithmetic goes through the field object, which
//! owns the multiplication table. Embeddings are kept at a fixed binary
//! precision: real embeddings first (descending), then one embedding from
//! each complex pair ordered by decreasing imaginary part of `alpha`,
//! then the conjugates in the same order.

pub mod order;
pub mod units;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{factor, int, Int, Rat};
use crate::fgab::matrix::IntMatrix;
use crate::mp::{poly_roots, Complex, Real};
use crate::{Error, Result};
use order::{maximal_order, mul_coords, polmulmod, poly_discriminant, OrderBasis};

pub const EMBED_PREC: u32 = 320;

/// Field element: `num / den` on the integral basis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Elem {
    pub num: Vec<Int>,
    pub den: Int,
}

impl Elem {
    pub fn new(num: Vec<Int>, den: Int) -> Self {
        assert!(!den.is_zero());
        let mut g = den.clone();
        for v in &num {
            g = g.gcd(v);
        }
        if den.is_negative() {
            g = -g;
        }
        if g.is_one() {
            return Elem { num, den };
        }
        Elem { num: num.iter().map(|v| v / &g).collect(), den: den / g }
    }

    pub fn integral(num: Vec<Int>) -> Self {
        Elem { num, den: Int::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|v| v.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }
}

#[derive(Clone, Debug)]
pub struct NumberField {
    poly: Vec<Int>,
    n: usize,
    basis: OrderBasis,
    binv: Vec<Vec<Rat>>,
    mult: Vec<Vec<Vec<Int>>>,
    traces: Vec<Int>,
    disc: Int,
    poly_disc: Int,
    r1: usize,
    r2: usize,
    /// emb[k][i] = sigma_k(w_i) for all n complex embeddings
    emb: Vec<Vec<Complex>>,
    emb_f64: Vec<Vec<(f64, f64)>>,
    /// complex conjugation as an automorphism, on integral coordinates
    cc: Option<IntMatrix>,
    /// the involution alpha -> -b - alpha (quadratic) or alpha -> -alpha
    /// (even quartic)
    inv: Option<IntMatrix>,
    trace_form: Vec<Vec<Int>>,
    trace_form_inv: Vec<Vec<Rat>>,
}

fn is_irreducible(f: &[Int]) -> Result<bool> {
    let n = f.len() - 1;
    if n <= 1 {
        return Ok(true);
    }
    if f[0].is_zero() {
        return Ok(false);
    }
    let (roots, _) = poly_roots(f, 128);
    let roots: Vec<(f64, f64)> = roots.iter().map(|z| z.to_f64()).collect();
    // try every monic factor of degree k <= n/2 built from subsets of roots
    for mask in 1u32..(1 << n) {
        let k = mask.count_ones() as usize;
        if k > n / 2 {
            continue;
        }
        let mut c: Vec<(f64, f64)> = vec![(1.0, 0.0)];
        for (i, r) in roots.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            let mut nc = vec![(0.0, 0.0); c.len() + 1];
            for (j, a) in c.iter().enumerate() {
                nc[j + 1].0 += a.0;
                nc[j + 1].1 += a.1;
                nc[j].0 -= a.0 * r.0 - a.1 * r.1;
                nc[j].1 -= a.0 * r.1 + a.1 * r.0;
            }
            c = nc;
        }
        // c is high-to-low reversed: c[j] is coefficient of x^j
        if c.iter().any(|v| v.1.abs() > 1e-6 || (v.0 - libm::round(v.0)).abs() > 1e-6) {
            continue;
        }
        let g: Vec<Int> = c.iter().map(|v| int(libm::round(v.0) as i64)).collect();
        if poly_divides(&g, f) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn poly_divides(g: &[Int], f: &[Int]) -> bool {
    // g monic
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = r.last().unwrap().clone();
        let shift = r.len() - 1 - dg;
        for (j, c) in g.iter().enumerate() {
            r[shift + j] -= &lead * c;
        }
        r.pop();
    }
    r.iter().all(|v| v.is_zero())
}

impl NumberField {
    /// The field `Q[x]/(f)` for a monic irreducible integer polynomial of
    /// degree 1 to 4, coefficients listed from the constant term up.
    pub fn new(f: &[Int]) -> Result<Self> {
        let n = f.len().checked_sub(1).ok_or_else(|| Error::InvalidInput("empty polynomial".into()))?;
        if n == 0 || n > 4 {
            return Err(Error::InvalidInput(format!("degree {} not supported", n)));
        }
        if !f[n].is_one() {
            return Err(Error::InvalidInput("polynomial must be monic".into()));
        }
        if !is_irreducible(f)? {
            return Err(Error::Reducible);
        }
        let basis = if n == 1 {
            OrderBasis { num: IntMatrix::identity(1), den: Int::one() }
        } else {
            maximal_order(f)?
        };
        let binv = basis.inverse();
        let mult = basis.mult_table(f)?;
        let poly_disc = if n == 1 { Int::one() } else { poly_discriminant(f) };
        let mut index = Int::one();
        for i in 0..n {
            index *= &basis.den;
            index /= &basis.num[(i, i)];
        }
        let disc = &poly_disc / (&index * &index);
        let traces: Vec<Int> = (0..n).map(|i| (0..n).map(|k| mult[i][k][k].clone()).sum()).collect();
        let mut k = NumberField {
            poly: f.to_vec(),
            n,
            basis,
            binv,
            mult,
            traces,
            disc,
            poly_disc,
            r1: 0,
            r2: 0,
            emb: Vec::new(),
            emb_f64: Vec::new(),
            cc: None,
            inv: None,
            trace_form: Vec::new(),
            trace_form_inv: Vec::new(),
        };
        k.init_embeddings();
        k.init_automorphisms();
        let tf: Vec<Vec<Int>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut e = vec![Int::zero(); n];
                        e[i] = Int::one();
                        let mut g = vec![Int::zero(); n];
                        g[j] = Int::one();
                        k.trace_int(&mul_coords(&k.mult, &e, &g))
                    })
                    .collect()
            })
            .collect();
        k.trace_form_inv = rat_inverse(&tf);
        k.trace_form = tf;
        Ok(k)
    }

    pub fn from_coeffs(coeffs: &[i64]) -> Result<Self> {
        let v: Vec<Int> = coeffs.iter().map(|&c| int(c)).collect();
        Self::new(&v)
    }

    fn init_embeddings(&mut self) {
        let n = self.n;
        let prec = EMBED_PREC;
        let (roots, _) = if n == 1 {
            (vec![Complex::from_real(Real::from_int(&-&self.poly[0], prec))], vec![0.0])
        } else {
            poly_roots(&self.poly, prec)
        };
        let tiny = 1e-40;
        let mut reals: Vec<Complex> = roots.iter().filter(|z| z.im.to_f64().abs() < tiny).cloned().collect();
        let mut uppers: Vec<Complex> = roots.iter().filter(|z| z.im.to_f64() >= tiny).cloned().collect();
        for z in reals.iter_mut() {
            z.im = Real::zero(prec);
        }
        reals.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap());
        uppers.sort_by(|a, b| b.im.partial_cmp(&a.im).unwrap());
        self.r1 = reals.len();
        self.r2 = uppers.len();
        let mut ordered = reals;
        ordered.extend(uppers.iter().cloned());
        ordered.extend(uppers.iter().map(|z| z.conj()));
        let den = Real::from_int(&self.basis.den, prec);
        self.emb = ordered
            .iter()
            .map(|z| {
                let mut pw = vec![Complex::one(prec)];
                for _ in 1..n {
                    let last = pw.last().unwrap().mul(z);
                    pw.push(last);
                }
                (0..n)
                    .map(|i| {
                        let mut acc = Complex::zero(prec);
                        for j in 0..n {
                            let c = &self.basis.num[(j, i)];
                            if !c.is_zero() {
                                acc = acc.add(&pw[j].mul_int(c));
                            }
                        }
                        Complex { re: acc.re.div(&den), im: acc.im.div(&den) }
                    })
                    .collect()
            })
            .collect();
        self.emb_f64 = self.emb.iter().map(|row| row.iter().map(|z| z.to_f64()).collect()).collect();
    }

    fn aut_matrix(&self, image_of_alpha: &[Rat]) -> Option<IntMatrix> {
        let n = self.n;
        let mut cols = Vec::with_capacity(n);
        for i in 0..n {
            // w_i = sum_j num[j][i] alpha^j / den ; apply alpha -> image
            let mut acc = vec![Rat::zero(); n];
            let mut pw: Vec<Rat> = vec![Rat::zero(); n];
            pw[0] = Rat::one();
            for j in 0..n {
                let c = &self.basis.num[(j, i)];
                if !c.is_zero() {
                    for k in 0..n {
                        acc[k] += &pw[k] * Rat::from(c.clone());
                    }
                }
                pw = polmulmod(&pw, image_of_alpha, &self.poly);
            }
            let acc: Vec<Rat> = acc.iter().map(|v| v / Rat::from(self.basis.den.clone())).collect();
            let e = self.from_power(&acc);
            if !e.is_integral() {
                return None;
            }
            cols.push(e.num);
        }
        Some(IntMatrix::from_cols(n, &cols))
    }

    fn init_automorphisms(&mut self) {
        let n = self.n;
        let candidate: Option<Vec<Rat>> = match n {
            2 => Some(vec![Rat::from(-&self.poly[1]), Rat::from(int(-1))]),
            4 if self.poly[1].is_zero() && self.poly[3].is_zero() => Some(vec![Rat::zero(), Rat::from(int(-1)), Rat::zero(), Rat::zero()]),
            _ => None,
        };
        if let Some(img) = candidate {
            self.inv = self.aut_matrix(&img);
        }
        if self.r2 == 0 {
            self.cc = Some(IntMatrix::identity(n));
        } else if self.r1 == 0 {
            if let Some(m) = &self.inv {
                // the involution is complex conjugation iff it conjugates every embedding of alpha
                let ok = (0..n).all(|k| {
                    let a = self.embed_power(&[Rat::zero(), Rat::one()], k);
                    let img = self.embed_elem_coords(&m.col(1), k);
                    let _ = img;
                    let mut col = vec![Rat::zero(); n];
                    if n > 1 {
                        col[1] = Rat::one();
                    }
                    let x = self.from_power(&col);
                    let y = self.apply_matrix(m, &x);
                    let ey = self.embed(&y, k);
                    let d = ey.sub(&a.conj());
                    d.abs().to_f64() < 1e-30
                });
                if ok {
                    self.cc = Some(m.clone());
                }
            }
        }
    }

    fn embed_power(&self, coords: &[Rat], k: usize) -> Complex {
        let e = self.from_power(&{
            let mut v = coords.to_vec();
            v.resize(self.n, Rat::zero());
            v
        });
        self.embed(&e, k)
    }

    fn embed_elem_coords(&self, c: &[Int], k: usize) -> Complex {
        self.embed(&Elem::integral(c.to_vec()), k)
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn poly(&self) -> &[Int] {
        &self.poly
    }

    pub fn disc(&self) -> &Int {
        &self.disc
    }

    pub fn poly_disc(&self) -> &Int {
        &self.poly_disc
    }

    /// `[O_K : Z[alpha]]`.
    pub fn index(&self) -> Int {
        let mut index = Int::one();
        for i in 0..self.n {
            index *= &self.basis.den;
            index /= &self.basis.num[(i, i)];
        }
        index
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.r1, self.r2)
    }

    pub fn basis(&self) -> &OrderBasis {
        &self.basis
    }

    pub fn mult_table(&self) -> &[Vec<Vec<Int>>] {
        &self.mult
    }

    /// Gram matrix `Tr(w_i w_j)` of the integral basis.
    pub fn trace_form(&self) -> &[Vec<Int>] {
        &self.trace_form
    }

    pub fn trace_form_inverse(&self) -> &[Vec<Rat>] {
        &self.trace_form_inv
    }

    pub fn has_complex_conjugation(&self) -> bool {
        self.cc.is_some()
    }

    pub fn is_totally_real(&self) -> bool {
        self.r2 == 0
    }

    /// Number of infinite places.
    pub fn places(&self) -> usize {
        self.r1 + self.r2
    }

    // ---- element construction ----

    pub fn zero(&self) -> Elem {
        Elem::integral(vec![Int::zero(); self.n])
    }

    pub fn one(&self) -> Elem {
        self.from_int(&Int::one())
    }

    pub fn from_int(&self, v: &Int) -> Elem {
        let mut c = vec![Int::zero(); self.n];
        c[0] = v.clone();
        Elem::integral(c)
    }

    pub fn from_i64(&self, v: i64) -> Elem {
        self.from_int(&int(v))
    }

    pub fn from_rat(&self, q: &Rat) -> Elem {
        let mut c = vec![Int::zero(); self.n];
        c[0] = q.numer().clone();
        Elem::new(c, q.denom().clone())
    }

    /// The generator `alpha` (root of the defining polynomial).
    pub fn gen(&self) -> Elem {
        let mut c = vec![Rat::zero(); self.n];
        if self.n > 1 {
            c[1] = Rat::one();
            self.from_power(&c)
        } else {
            self.from_int(&-&self.poly[0])
        }
    }

    pub fn from_power(&self, p: &[Rat]) -> Elem {
        assert_eq!(p.len(), self.n);
        let c: Vec<Rat> = (0..self.n).map(|r| (0..self.n).map(|k| &self.binv[r][k] * &p[k]).sum()).collect();
        rat_vec_to_elem(&c)
    }

    pub fn from_power_i64(&self, p: &[i64]) -> Elem {
        let v: Vec<Rat> = p.iter().map(|&x| Rat::from(int(x))).collect();
        self.from_power(&v)
    }

    pub fn to_power(&self, x: &Elem) -> Vec<Rat> {
        let n = self.n;
        (0..n)
            .map(|k| {
                let s: Int = (0..n).map(|i| &self.basis.num[(k, i)] * &x.num[i]).sum();
                Rat::new(s, &self.basis.den * &x.den)
            })
            .collect()
    }

    // ---- arithmetic ----

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        let l = a.den.lcm(&b.den);
        let fa = &l / &a.den;
        let fb = &l / &b.den;
        Elem::new(a.num.iter().zip(&b.num).map(|(x, y)| x * &fa + y * &fb).collect(), l)
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        Elem { num: a.num.iter().map(|v| -v).collect(), den: a.den.clone() }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        Elem::new(mul_coords(&self.mult, &a.num, &b.num), &a.den * &b.den)
    }

    pub fn mul_int(&self, a: &Elem, k: &Int) -> Elem {
        Elem::new(a.num.iter().map(|v| v * k).collect(), a.den.clone())
    }

    pub fn div_int(&self, a: &Elem, k: &Int) -> Elem {
        Elem::new(a.num.clone(), &a.den * k)
    }

    pub fn mul_rat(&self, a: &Elem, q: &Rat) -> Elem {
        Elem::new(a.num.iter().map(|v| v * q.numer()).collect(), &a.den * q.denom())
    }

    /// Integer matrix of multiplication by the numerator of `a` (columns
    /// are images of basis elements).
    pub fn mul_matrix(&self, a: &Elem) -> IntMatrix {
        let n = self.n;
        let cols: Vec<Vec<Int>> = (0..n)
            .map(|j| {
                let mut e = vec![Int::zero(); n];
                e[j] = Int::one();
                mul_coords(&self.mult, &a.num, &e)
            })
            .collect();
        IntMatrix::from_cols(n, &cols)
    }

    pub fn norm(&self, a: &Elem) -> Rat {
        let d = self.mul_matrix(a).det();
        Rat::new(d, num_traits::pow(a.den.clone(), self.n))
    }

    fn trace_int(&self, c: &[Int]) -> Int {
        c.iter().zip(&self.traces).map(|(x, t)| x * t).sum()
    }

    pub fn trace(&self, a: &Elem) -> Rat {
        Rat::new(self.trace_int(&a.num), a.den.clone())
    }

    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::InvalidInput("inverse of zero".into()));
        }
        let n = self.n;
        let m = self.mul_matrix(a);
        let mut rhs = vec![Int::zero(); n];
        rhs[0] = Int::one();
        let x = solve_rational(&m, &rhs);
        // a = num/den, so a^{-1} = den * (num)^{-1}
        let e = rat_vec_to_elem(&x);
        Ok(self.mul_int(&e, &a.den))
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Elem, e: i64) -> Result<Elem> {
        let base = if e < 0 { self.inv(a)? } else { a.clone() };
        Ok(self.pow_u(&base, e.unsigned_abs()))
    }

    pub fn pow_u(&self, a: &Elem, mut e: u64) -> Elem {
        let mut acc = self.one();
        let mut b = a.clone();
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

    pub fn apply_matrix(&self, m: &IntMatrix, a: &Elem) -> Elem {
        Elem::new(m.mul_vec(&a.num), a.den.clone())
    }

    /// Complex conjugation (identity on totally real fields).
    pub fn conj(&self, a: &Elem) -> Elem {
        let m = self.cc.as_ref().expect("field has no complex conjugation automorphism");
        self.apply_matrix(m, a)
    }

    pub fn conj_matrix(&self) -> Option<&IntMatrix> {
        self.cc.as_ref()
    }

    /// The involution `alpha -> -b - alpha` of a quadratic field or
    /// `alpha -> -alpha` of an even quartic.
    pub fn involution(&self, a: &Elem) -> Elem {
        let m = self.inv.as_ref().expect("field has no distinguished involution");
        self.apply_matrix(m, a)
    }

    pub fn involution_matrix(&self) -> Option<&IntMatrix> {
        self.inv.as_ref()
    }

    // ---- embeddings ----

    pub fn embed(&self, a: &Elem, k: usize) -> Complex {
        let prec = EMBED_PREC;
        let mut acc = Complex::zero(prec);
        for i in 0..self.n {
            if !a.num[i].is_zero() {
                acc = acc.add(&self.emb[k][i].mul_int(&a.num[i]));
            }
        }
        if a.den.is_one() {
            acc
        } else {
            let d = Real::from_int(&a.den, prec);
            Complex { re: acc.re.div(&d), im: acc.im.div(&d) }
        }
    }

    pub fn embed_f64(&self, a: &Elem, k: usize) -> (f64, f64) {
        self.embed(a, k).to_f64()
    }

    /// Embedding values of the basis at embedding `k`, in double precision.
    pub fn basis_embeddings_f64(&self, k: usize) -> &[(f64, f64)] {
        &self.emb_f64[k]
    }

    pub fn basis_embeddings(&self, k: usize) -> &[Complex] {
        &self.emb[k]
    }

    /// `ln |sigma_v(a)|` for each place `v`.
    pub fn log_embedding(&self, a: &Elem) -> Vec<f64> {
        (0..self.places())
            .map(|v| {
                let z = self.embed(a, v);
                z.norm_sqr().ln_abs_f64() / 2.0
            })
            .collect()
    }

    /// Recover an element from numerical traces `Tr(x w_j)` (rounded to
    /// integers after multiplying by `den`).
    pub fn elem_from_traces(&self, traces: &[Real], den: &Int) -> Option<Elem> {
        let n = self.n;
        let mut c = Vec::with_capacity(n);
        for r in 0..n {
            let mut acc = Rat::zero();
            let mut approx = Real::zero(traces[0].prec());
            for j in 0..n {
                let t = &self.trace_form_inv[r][j];
                approx = approx.add(&traces[j].mul_int(t.numer()).div_int(t.denom()));
            }
            let scaled = approx.mul_int(den);
            let rv = scaled.round();
            let err = scaled.sub(&Real::from_int(&rv, scaled.prec())).abs().to_f64();
            if err > 1e-6 {
                return None;
            }
            acc += Rat::new(rv, den.clone());
            c.push(acc);
        }
        Some(rat_vec_to_elem(&c))
    }

    /// Recover an element from its values at all `n` embeddings.
    pub fn elem_from_embeddings(&self, vals: &[Complex], den: &Int) -> Option<Elem> {
        let n = self.n;
        let traces: Vec<Real> = (0..n)
            .map(|j| {
                let mut acc = Real::zero(vals[0].prec());
                for k in 0..n {
                    let p = vals[k].mul(&self.emb[k][j].with_prec(vals[0].prec()));
                    acc = acc.add(&p.re);
                }
                acc
            })
            .collect();
        self.elem_from_traces(&traces, den)
    }

    /// Exact Gram matrix of `Tr(x conj(y))` on integral coordinate vectors.
    pub fn t2_gram(&self, vecs: &[Vec<Int>]) -> Option<Vec<Vec<Int>>> {
        let cc = self.cc.as_ref()?;
        let conj: Vec<Vec<Int>> = vecs.iter().map(|v| cc.mul_vec(v)).collect();
        Some(
            (0..vecs.len())
                .map(|i| (0..vecs.len()).map(|j| self.trace_int(&mul_coords(&self.mult, &vecs[i], &conj[j]))).collect())
                .collect(),
        )
    }

    /// Exact `T_2(a) = sum |sigma(a)|^2`.
    pub fn t2(&self, a: &Elem) -> Option<Rat> {
        let g = self.t2_gram(core::slice::from_ref(&a.num))?;
        Some(Rat::new(g[0][0].clone(), &a.den * &a.den))
    }

    /// Signs of an element at the real embeddings, exactly. Supported for
    /// quadratic fields (and trivially for fields without real places).
    pub fn real_signs(&self, a: &Elem) -> Result<Vec<i8>> {
        if self.r1 == 0 {
            return Ok(Vec::new());
        }
        match self.n {
            1 => Ok(vec![if a.num[0].is_negative() { -1 } else { 1 }]),
            2 => {
                // a = u + v sqrt(D)/2 form: use the power basis c0 + c1 alpha,
                // alpha = (-b + s sqrt(disc))/2 with s = +1 for the first embedding.
                let p = self.to_power(a);
                let b = Rat::from(self.poly[1].clone());
                let dp: Int = &self.poly[1] * &self.poly[1] - &self.poly[0] * 4;
                // sigma(a) = c0 - c1 b/2 + s c1 sqrt(dp)/2
                let u: Rat = &p[0] - &p[1] * &b / Rat::from(int(2));
                let v: Rat = &p[1] / Rat::from(int(2));
                let sign_of = |s: i64| -> i8 {
                    // sign of u + s v sqrt(dp)
                    let vs = &v * Rat::from(int(s));
                    let su = u.signum();
                    let sv = vs.signum();
                    if sv.is_zero() {
                        return if su.is_positive() { 1 } else if su.is_negative() { -1 } else { 0 };
                    }
                    if su.is_zero() || su == sv {
                        return if sv.is_positive() { 1 } else { -1 };
                    }
                    // opposite signs: compare u^2 with v^2 dp
                    let lhs = &u * &u;
                    let rhs = &vs * &vs * Rat::from(dp.clone());
                    if lhs > rhs {
                        if su.is_positive() { 1 } else { -1 }
                    } else if sv.is_positive() {
                        1
                    } else {
                        -1
                    }
                };
                Ok(vec![sign_of(1), sign_of(-1)])
            }
            _ => Err(Error::InvalidInput("exact signs only for quadratic fields".into())),
        }
    }

    pub fn is_totally_positive(&self, a: &Elem) -> Result<bool> {
        Ok(self.real_signs(a)?.iter().all(|&s| s > 0))
    }

    /// Minkowski bound for the class group.
    pub fn minkowski_bound(&self) -> f64 {
        let n = self.n as f64;
        let mut fact = 1.0;
        for k in 1..=self.n {
            fact *= k as f64;
        }
        let d = self.disc.to_f64().unwrap().abs();
        fact / libm::pow(n, n) * libm::pow(4.0 / core::f64::consts::PI, self.r2 as f64) * libm::sqrt(d)
    }

    pub fn format_elem(&self, a: &Elem, var: &str) -> String {
        format_power(&self.to_power(a), var)
    }

    pub fn ramified_primes(&self) -> Result<Vec<Int>> {
        Ok(factor(&self.disc)?.into_iter().map(|(p, _)| p).collect())
    }
}

pub fn format_power(p: &[Rat], var: &str) -> String {
    let mut s = String::new();
    for k in (0..p.len()).rev() {
        let c = &p[k];
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let coeff = if a.is_integer() { format!("{}", a.numer()) } else { format!("{}/{}", a.numer(), a.denom()) };
        match k {
            0 => s.push_str(&coeff),
            _ => {
                if !a.is_one() {
                    s.push_str(&coeff);
                    s.push('*');
                }
                s.push_str(var);
                if k > 1 {
                    s.push_str(&format!("^{}", k));
                }
            }
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

/// Parse a polynomial in `var` with rational coefficients, the format
/// written by [`format_power`] (`1/2*alpha^2 - 3*alpha + 7`). Spaces and
/// an optional `*` are accepted; powers of `var` must be below `n` after
/// no reduction.
pub fn parse_power(s: &str, var: &str, n: usize) -> Result<Vec<Rat>> {
    let bad = |why: &str| Error::InvalidInput(format!("cannot parse `{s}`: {why}"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad("empty"));
    }
    let mut out = vec![Rat::zero(); n];
    let bytes = t.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let mut sign = 1i64;
        if bytes[i] == b'+' || bytes[i] == b'-' {
            if bytes[i] == b'-' {
                sign = -1;
            }
            i += 1;
        } else if i > 0 {
            return Err(bad("expected + or -"));
        }
        let start = i;
        while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
            i += 1;
        }
        let term = &t[start..i];
        if term.is_empty() {
            return Err(bad("empty term"));
        }
        let (coef, power) = match term.find(var) {
            None => (term, 0usize),
            Some(pos) => {
                if pos + var.len() < term.len() && !term[pos + var.len()..].starts_with('^') {
                    return Err(bad("unexpected text after the variable"));
                }
                let e = if pos + var.len() < term.len() {
                    term[pos + var.len() + 1..].parse::<usize>().map_err(|_| bad("bad exponent"))?
                } else {
                    1
                };
                let c = term[..pos].strip_suffix('*').unwrap_or(&term[..pos]);
                (if c.is_empty() { "1" } else { c }, e)
            }
        };
        let q = match coef.split_once('/') {
            None => Rat::from(coef.parse::<Int>().map_err(|_| bad("bad coefficient"))?),
            Some((a, b)) => {
                let a = a.parse::<Int>().map_err(|_| bad("bad numerator"))?;
                let b = b.parse::<Int>().map_err(|_| bad("bad denominator"))?;
                if b.is_zero() {
                    return Err(bad("zero denominator"));
                }
                Rat::new(a, b)
            }
        };
        if power >= n {
            return Err(bad("power too large for the field degree"));
        }
        out[power] += q * Rat::from(Int::from(sign));
    }
    Ok(out)
}

pub fn rat_vec_to_elem(c: &[Rat]) -> Elem {
    let mut den = Int::one();
    for v in c {
        den = den.lcm(v.denom());
    }
    Elem::new(c.iter().map(|v| v.numer() * (&den / v.denom())).collect(), den)
}

pub fn rat_inverse(m: &[Vec<Int>]) -> Vec<Vec<Rat>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = m[i].iter().map(|v| Rat::from(v.clone())).collect();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).expect("singular matrix");
        a.swap(c, p);
        let inv = a[c][c].recip();
        for v in a[c].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in 0..2 * n {
                    let t = &a[c][j] * &f;
                    a[r][j] -= t;
                }
            }
        }
    }
    a.into_iter().map(|row| row[n..].to_vec()).collect()
}

/// Solve `m x = b` over Q for an invertible integer matrix.
pub fn solve_rational(m: &IntMatrix, b: &[Int]) -> Vec<Rat> {
    let n = m.rows();
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = (0..n).map(|j| Rat::from(m[(i, j)].clone())).collect();
            row.push(Rat::from(b[i].clone()));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).expect("singular system");
        a.swap(c, p);
        let inv = a[c][c].recip();
        for v in a[c].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in 0..=n {
                    let t = &a[c][j] * &f;
                    a[r][j] -= t;
                }
            }
        }
    }
    a.into_iter().map(|row| row[n].clone()).collect()
}

impl Elem {
    pub fn to_u64_den(&self) -> Option<u64> {
        self.den.to_u64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trips_format() {
        for p in [vec![int(5), int(1), int(0), int(0)], vec![int(-1), int(0), int(-3), int(7)], vec![int(0), int(0), int(0), int(0)]] {
            let q: Vec<Rat> = p.iter().map(|v| Rat::from(v.clone())).collect();
            assert_eq!(parse_power(&format_power(&q, "alpha"), "alpha", 4).unwrap(), q);
        }
        let q = vec![Rat::new(int(7), int(4)), Rat::zero(), Rat::new(int(1), int(20))];
        assert_eq!(parse_power("1/20*alpha^2 + 7/4", "alpha", 3).unwrap(), q);
        assert_eq!(parse_power(&format_power(&q, "a"), "a", 3).unwrap(), q);
        assert_eq!(parse_power("alpha+5", "alpha", 4).unwrap()[0], Rat::from(int(5)));
        for bad in ["", "alpha^9", "3x", "1/0", "alpha^", "+-2", "alpha2"] {
            assert!(parse_power(bad, "alpha", 4).is_err(), "{bad}");
        }
    }

    #[test]
    fn running_example_basics() {
        let k = NumberField::from_coeffs(&[500, 0, 53, 0, 1]).unwrap();
        assert_eq!(k.disc(), &int(52358480));
        assert_eq!(k.signature(), (0, 2));
        assert!(k.has_complex_conjugation());
        let a = k.gen();
        let x = k.add(&k.mul(&a, &a), &k.from_i64(3));
        let y = k.inv(&x).unwrap();
        assert_eq!(k.mul(&x, &y), k.one());
        // N(alpha) = 500, Tr(alpha^2) = -106
        assert_eq!(k.norm(&a), Rat::from(int(500)));
        assert_eq!(k.trace(&k.mul(&a, &a)), Rat::from(int(-106)));
        let ca = k.conj(&a);
        assert_eq!(ca, k.neg(&a));
    }

    #[test]
    fn reducible_rejected() {
        assert_eq!(NumberField::from_coeffs(&[1, 0, 1, 0, 1]).unwrap_err(), Error::Reducible);
        assert_eq!(NumberField::from_coeffs(&[4, 0, 5, 0, 1]).unwrap_err(), Error::Reducible);
        assert!(NumberField::from_coeffs(&[1, 0, 4, 0, 1]).is_ok());
    }

    #[test]
    fn quadratic_signs() {
        let k = NumberField::from_coeffs(&[500, 53, 1]).unwrap();
        assert_eq!(k.signature(), (2, 0));
        // a = -18 alpha0 - 733 has norm 7 and is totally negative
        let a = k.from_power_i64(&[-733, -18]);
        assert_eq!(k.norm(&a), Rat::from(int(7)));
        assert_eq!(k.real_signs(&a).unwrap(), vec![-1, -1]);
        let b = k.from_power_i64(&[-600723, -14752]);
        assert_eq!(k.norm(&b), Rat::from(int(-7159)));
        let s = k.real_signs(&b).unwrap();
        assert!(s.contains(&1) && s.contains(&-1));
    }

    #[test]
    fn recover_from_embeddings() {
        let k = NumberField::from_coeffs(&[500, 0, 53, 0, 1]).unwrap();
        let x = k.from_power(&[Rat::new(int(3), int(10)), Rat::from(int(-7)), Rat::new(int(1), int(10)), Rat::from(int(2))]);
        let vals: Vec<Complex> = (0..4).map(|j| k.embed(&x, j)).collect();
        let y = k.elem_from_embeddings(&vals, &int(10)).unwrap();
        assert_eq!(x, y);
    }
}
