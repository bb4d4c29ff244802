//! Fixed point multiprecision reals and complex numbers.
//!
//! A [`Real`] is an integer mantissa scaled by `2^-prec`. Every operand of
//! a binary operation must carry the same `prec`; mixing precisions is a
//! programming error and panics. Absolute error per operation is a few
//! units in the last place, which is what the theta sums, embeddings and
//! period lattices here need.

use alloc::vec::Vec;
use core::cmp::Ordering;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{Int, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Real {
    m: BigInt,
    prec: u32,
}

impl Real {
    pub fn zero(prec: u32) -> Self {
        Real { m: BigInt::zero(), prec }
    }

    pub fn one(prec: u32) -> Self {
        Real { m: BigInt::one() << prec as usize, prec }
    }

    pub fn from_int(v: &Int, prec: u32) -> Self {
        Real { m: v << prec as usize, prec }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_int(&BigInt::from(v), prec)
    }

    pub fn from_rat(q: &Rat, prec: u32) -> Self {
        Real { m: (q.numer() << prec as usize) / q.denom(), prec }
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        assert!(x.is_finite());
        if x == 0.0 {
            return Self::zero(prec);
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        let mut m = BigInt::from(mant) * sign;
        let sh = e + prec as i64;
        if sh >= 0 {
            m <<= sh as usize;
        } else {
            m >>= (-sh) as usize;
        }
        Real { m, prec }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.m
    }

    /// Decimal string with `digits` digits after the point, truncated
    /// towards zero.
    pub fn to_decimal(&self, digits: usize) -> alloc::string::String {
        let scaled = (self.m.abs() * BigInt::from(10u32).pow(digits as u32)) >> self.prec as usize;
        let s = alloc::format!("{:0>width$}", scaled.to_str_radix(10), width = digits + 1);
        let (int_part, frac) = s.split_at(s.len() - digits);
        let sign = if self.m.is_negative() && !scaled.is_zero() { "-" } else { "" };
        if digits == 0 {
            alloc::format!("{sign}{int_part}")
        } else {
            alloc::format!("{sign}{int_part}.{frac}")
        }
    }

    /// `d.ddd...e<exp>` with `sig` significant digits, rounded to nearest.
    /// Digits beyond the precision of `self` are not meaningful.
    pub fn to_scientific(&self, sig: usize) -> alloc::string::String {
        let sig = sig.max(1);
        if self.m.is_zero() {
            return "0".into();
        }
        let ten = BigInt::from(10u32);
        let mut e = libm::floor(self.ln_abs_f64() / core::f64::consts::LN_10) as i64;
        let digits = loop {
            let shift = sig as i64 - 1 - e;
            let scaled = if shift >= 0 { self.abs().mul_int(&ten.pow(shift as u32)) } else { self.abs().div_int(&ten.pow((-shift) as u32)) };
            let n = scaled.round();
            if n >= ten.pow(sig as u32) {
                e += 1;
            } else if n < ten.pow(sig as u32 - 1) {
                e -= 1;
            } else {
                break n.to_str_radix(10);
            }
        };
        let sign = if self.m.is_negative() { "-" } else { "" };
        let (head, tail) = digits.split_at(1);
        if tail.is_empty() {
            alloc::format!("{sign}{head}e{e}")
        } else {
            alloc::format!("{sign}{head}.{tail}e{e}")
        }
    }

    pub fn to_f64(&self) -> f64 {
        let b = self.m.bits() as i64;
        let s = (b - 62).max(0);
        let top = (&self.m >> s as usize).to_f64().unwrap_or(0.0);
        libm::ldexp(top, (s - self.prec as i64) as i32)
    }

    /// `ln |x|` in double precision, valid for any magnitude.
    pub fn ln_abs_f64(&self) -> f64 {
        let b = self.m.bits() as i64;
        let s = (b - 62).max(0);
        let top = (&self.m >> s as usize).to_f64().unwrap_or(0.0).abs();
        libm::log(top) + (s - self.prec as i64) as f64 * core::f64::consts::LN_2
    }

    /// Nearest integer.
    pub fn round(&self) -> Int {
        let half = BigInt::one() << (self.prec as usize).saturating_sub(1);
        if self.prec == 0 {
            return self.m.clone();
        }
        (&self.m + half) >> self.prec as usize
    }

    pub fn floor(&self) -> Int {
        &self.m >> self.prec as usize
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        let m = match prec.cmp(&self.prec) {
            Ordering::Equal => self.m.clone(),
            Ordering::Greater => &self.m << (prec - self.prec) as usize,
            Ordering::Less => &self.m >> (self.prec - prec) as usize,
        };
        Real { m, prec }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    pub fn abs(&self) -> Self {
        Real { m: self.m.abs(), prec: self.prec }
    }

    pub fn neg(&self) -> Self {
        Real { m: -&self.m, prec: self.prec }
    }

    fn check(&self, o: &Real) {
        assert_eq!(self.prec, o.prec, "precision mismatch");
    }

    pub fn add(&self, o: &Real) -> Self {
        self.check(o);
        Real { m: &self.m + &o.m, prec: self.prec }
    }

    pub fn sub(&self, o: &Real) -> Self {
        self.check(o);
        Real { m: &self.m - &o.m, prec: self.prec }
    }

    pub fn mul(&self, o: &Real) -> Self {
        self.check(o);
        Real { m: (&self.m * &o.m) >> self.prec as usize, prec: self.prec }
    }

    pub fn mul_int(&self, k: &Int) -> Self {
        Real { m: &self.m * k, prec: self.prec }
    }

    pub fn div(&self, o: &Real) -> Self {
        self.check(o);
        assert!(!o.m.is_zero(), "division by zero");
        Real { m: (&self.m << self.prec as usize) / &o.m, prec: self.prec }
    }

    pub fn div_int(&self, k: &Int) -> Self {
        Real { m: &self.m / k, prec: self.prec }
    }

    pub fn shl(&self, k: i64) -> Self {
        let m = if k >= 0 { &self.m << k as usize } else { &self.m >> (-k) as usize };
        Real { m, prec: self.prec }
    }

    pub fn sqr(&self) -> Self {
        self.mul(self)
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.m.is_negative(), "sqrt of negative");
        Real { m: (&self.m << self.prec as usize).sqrt(), prec: self.prec }
    }

    pub fn cmp_abs_bits(&self) -> i64 {
        self.m.bits() as i64 - self.prec as i64
    }

    /// `2^-k` as a real at this precision.
    pub fn ulp_pow(&self, k: u32) -> Self {
        if k > self.prec {
            return Self::zero(self.prec);
        }
        Real { m: BigInt::one() << (self.prec - k) as usize, prec: self.prec }
    }

    pub fn pi(prec: u32) -> Self {
        let w = prec + 16;
        let atan_inv = |n: i64| -> BigInt {
            // atan(1/n) * 2^w
            let n2 = BigInt::from(n * n);
            let mut term = (BigInt::one() << w as usize) / n;
            let mut sum = term.clone();
            let mut k = 1i64;
            loop {
                term = &term / &n2;
                if term.is_zero() {
                    break;
                }
                let t = &term / (2 * k + 1);
                if k % 2 == 1 {
                    sum -= t;
                } else {
                    sum += t;
                }
                k += 1;
            }
            sum
        };
        let m = atan_inv(5) * 16 - atan_inv(239) * 4;
        Real { m: m >> 16usize, prec }
    }

    pub fn ln2(prec: u32) -> Self {
        // ln 2 = sum_{k>=1} 1/(k 2^k)
        let w = prec + 16;
        let mut sum = BigInt::zero();
        let mut p = BigInt::one() << w as usize;
        let mut k = 1i64;
        loop {
            p >>= 1usize;
            if p.is_zero() {
                break;
            }
            sum += &p / k;
            k += 1;
        }
        Real { m: sum >> 16usize, prec }
    }

    pub fn exp(&self) -> Self {
        let prec = self.prec;
        let g = prec + 32;
        let x = self.with_prec(g);
        let ln2 = Real::ln2(g);
        let k = x.div(&ln2).round();
        let kf = k.to_i64().expect("exponent out of range");
        if kf < -(prec as i64) - 8 {
            return Self::zero(prec);
        }
        let r = x.sub(&ln2.mul_int(&k));
        let s = 8u32;
        let r = r.shl(-(s as i64));
        let one = Real::one(g);
        let mut term = one.clone();
        let mut sum = one.clone();
        let mut n = 1i64;
        loop {
            term = term.mul(&r).div_int(&BigInt::from(n));
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term);
            n += 1;
        }
        for _ in 0..s {
            sum = sum.sqr();
        }
        sum.shl(kf).with_prec(prec)
    }

    /// `(cos x, sin x)`.
    pub fn cos_sin(&self) -> (Self, Self) {
        let prec = self.prec;
        let g = prec + 32 + (self.cmp_abs_bits().max(0) as u32);
        let x = self.with_prec(g);
        let two_pi = Real::pi(g).shl(1);
        let k = x.div(&two_pi).round();
        let r = x.sub(&two_pi.mul_int(&k));
        let s = 10u32;
        let r = r.shl(-(s as i64));
        let one = Real::one(g);
        let mut c = one.clone();
        let mut sn = r.clone();
        let r2 = r.sqr();
        let mut tc = one.clone();
        let mut ts = r.clone();
        let mut n = 1i64;
        loop {
            tc = tc.mul(&r2).div_int(&BigInt::from((2 * n - 1) * (2 * n))).neg();
            ts = ts.mul(&r2).div_int(&BigInt::from((2 * n) * (2 * n + 1))).neg();
            if tc.is_zero() && ts.is_zero() {
                break;
            }
            c = c.add(&tc);
            sn = sn.add(&ts);
            n += 1;
        }
        for _ in 0..s {
            let c2 = c.sqr().shl(1).sub(&one);
            let s2 = sn.mul(&c).shl(1);
            c = c2;
            sn = s2;
        }
        (c.with_prec(prec), sn.with_prec(prec))
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.check(other);
        Some(self.m.cmp(&other.m))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Complex { re: Real::zero(prec), im: Real::zero(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Complex { re: Real::one(prec), im: Real::zero(prec) }
    }

    pub fn i(prec: u32) -> Self {
        Complex { re: Real::zero(prec), im: Real::one(prec) }
    }

    pub fn from_real(re: Real) -> Self {
        let p = re.prec();
        Complex { re, im: Real::zero(p) }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        Complex { re: Real::from_f64(re, prec), im: Real::from_f64(im, prec) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Complex { re: self.re.with_prec(prec), im: self.im.with_prec(prec) }
    }

    pub fn add(&self, o: &Complex) -> Self {
        Complex { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Complex) -> Self {
        Complex { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn neg(&self) -> Self {
        Complex { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> Self {
        Complex { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &Complex) -> Self {
        Complex {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn mul_real(&self, r: &Real) -> Self {
        Complex { re: self.re.mul(r), im: self.im.mul(r) }
    }

    pub fn mul_int(&self, k: &Int) -> Self {
        Complex { re: self.re.mul_int(k), im: self.im.mul_int(k) }
    }

    pub fn sqr(&self) -> Self {
        self.mul(self)
    }

    pub fn norm_sqr(&self) -> Real {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        Complex { re: self.re.div(&n), im: self.im.neg().div(&n) }
    }

    pub fn div(&self, o: &Complex) -> Self {
        // Scale to keep the fixed point denominators away from underflow.
        let n = o.norm_sqr();
        let num = self.mul(&o.conj());
        Complex { re: num.re.div(&n), im: num.im.div(&n) }
    }

    pub fn sqrt(&self) -> Self {
        let r = self.abs();
        let clamp = |x: Real| if x.is_negative() { Real::zero(x.prec) } else { x };
        let re = clamp(r.add(&self.re).shl(-1)).sqrt();
        let im = clamp(r.sub(&self.re).shl(-1)).sqrt();
        let im = if self.im.is_negative() { im.neg() } else { im };
        Complex { re, im }
    }

    pub fn exp(&self) -> Self {
        let e = self.re.exp();
        let (c, s) = self.im.cos_sin();
        Complex { re: e.mul(&c), im: e.mul(&s) }
    }

    pub fn powi(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Complex::one(self.prec());
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.sqr();
            n >>= 1;
        }
        acc
    }
}

/// Evaluate an integer polynomial (coefficients low to high) at `z`.
pub fn eval_poly(coeffs: &[Int], z: &Complex) -> Complex {
    let prec = z.prec();
    let mut acc = Complex::zero(prec);
    for c in coeffs.iter().rev() {
        acc = acc.mul(z).add(&Complex::from_real(Real::from_int(c, prec)));
    }
    acc
}

fn eval_deriv(coeffs: &[Int], z: &Complex) -> Complex {
    let prec = z.prec();
    let mut acc = Complex::zero(prec);
    for (k, c) in coeffs.iter().enumerate().skip(1).rev() {
        acc = acc.mul(z).add(&Complex::from_real(Real::from_int(&(c * k), prec)));
    }
    acc
}

#[derive(Clone, Copy, Debug)]
struct C64(f64, f64);

impl C64 {
    fn add(self, o: C64) -> C64 {
        C64(self.0 + o.0, self.1 + o.1)
    }
    fn sub(self, o: C64) -> C64 {
        C64(self.0 - o.0, self.1 - o.1)
    }
    fn mul(self, o: C64) -> C64 {
        C64(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
    fn div(self, o: C64) -> C64 {
        let n = o.0 * o.0 + o.1 * o.1;
        C64((self.0 * o.0 + self.1 * o.1) / n, (self.1 * o.0 - self.0 * o.1) / n)
    }
    fn abs(self) -> f64 {
        libm::hypot(self.0, self.1)
    }
}

fn roots_f64(coeffs: &[f64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let c: Vec<f64> = coeffs.iter().map(|v| v / lead).collect();
    let radius = 1.0 + c[..n].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let t = 0.4 + 2.0 * core::f64::consts::PI * k as f64 / n as f64;
            C64(radius * libm::cos(t), radius * libm::sin(t))
        })
        .collect();
    let eval = |x: C64| {
        let mut a = C64(1.0, 0.0);
        for k in (0..n).rev() {
            a = a.mul(x).add(C64(c[k], 0.0));
        }
        a
    };
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = C64(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den = den.mul(z[i].sub(z[j]));
                }
            }
            let step = eval(z[i]).div(den);
            z[i] = z[i].sub(step);
            delta = delta.max(step.abs() / (1.0 + z[i].abs()));
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

/// Complex roots of a squarefree integer polynomial, refined by Newton's
/// method to `prec` bits. Returns the roots and a bound on the distance
/// from each approximation to a true root (as `n |f/f'|`).
pub fn poly_roots(coeffs: &[Int], prec: u32) -> (Vec<Complex>, Vec<f64>) {
    let n = coeffs.len() - 1;
    let cf: Vec<f64> = coeffs.iter().map(|c| c.to_f64().unwrap()).collect();
    let approx = roots_f64(&cf);
    let g = prec + 32;
    let mut roots = Vec::with_capacity(n);
    let mut errs = Vec::with_capacity(n);
    for a in approx {
        let mut z = Complex::from_f64(a.0, a.1, g);
        let mut p = 64u32;
        loop {
            let p_now = p.min(g);
            let zz = z.with_prec(p_now);
            let f = eval_poly(coeffs, &zz);
            let d = eval_deriv(coeffs, &zz);
            z = zz.sub(&f.div(&d)).with_prec(g);
            if p_now == g {
                break;
            }
            p *= 2;
        }
        for _ in 0..2 {
            let f = eval_poly(coeffs, &z);
            let d = eval_deriv(coeffs, &z);
            z = z.sub(&f.div(&d));
        }
        let f = eval_poly(coeffs, &z);
        let d = eval_deriv(coeffs, &z);
        let bound = n as f64 * f.abs().to_f64() / d.abs().to_f64();
        roots.push(z.with_prec(prec));
        errs.push(bound + libm::ldexp(1.0, -(prec as i32)));
    }
    (roots, errs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rendering() {
        let x = Real::from_rat(&Rat::new(Int::from(-22), Int::from(7)), 80);
        assert_eq!(x.to_decimal(6), "-3.142857");
        assert_eq!(Real::from_i64(12, 40).to_decimal(2), "12.00");
        assert_eq!(Real::from_f64(0.015625, 40).to_decimal(3), "0.015");
        assert_eq!(Real::pi(200).to_decimal(30), "3.141592653589793238462643383279");
        assert_eq!(Real::from_f64(-1e-9, 64).to_decimal(3), "0.000");
        assert_eq!(x.to_scientific(4), "-3.143e0");
        assert_eq!(Real::pi(200).mul_int(&Int::from(10).pow(40)).to_scientific(6), "3.14159e40");
        assert_eq!(Real::from_rat(&Rat::new(Int::from(1), Int::from(800)), 80).to_scientific(3), "1.25e-3");
        assert_eq!(Real::from_i64(999_999, 64).to_scientific(3), "1.00e6");
        assert_eq!(Real::from_i64(7, 64).to_scientific(1), "7e0");
        assert_eq!(Real::zero(64).to_scientific(5), "0");
    }
    use crate::arith::int;

    #[test]
    fn constants() {
        let pi = Real::pi(200);
        assert!((pi.to_f64() - core::f64::consts::PI).abs() < 1e-15);
        let l = Real::ln2(200);
        assert!((l.to_f64() - core::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn exp_and_trig() {
        for &x in &[-30.5, -1.0, 0.0, 0.3, 2.0, 17.25] {
            let r = Real::from_f64(x, 150);
            let e = r.exp().to_f64();
            assert!((e - libm::exp(x)).abs() <= 1e-14 * libm::exp(x).max(1e-300));
            let (c, s) = r.cos_sin();
            assert!((c.to_f64() - libm::cos(x)).abs() < 1e-14);
            assert!((s.to_f64() - libm::sin(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn high_precision_identity() {
        // cos^2 + sin^2 = 1 to ~prec bits.
        let r = Real::from_f64(1.2345, 300);
        let (c, s) = r.cos_sin();
        let one = c.sqr().add(&s.sqr());
        let err = one.sub(&Real::one(300)).abs();
        assert!(err.cmp_abs_bits() < -280);
    }

    #[test]
    fn quartic_roots() {
        // x^4 + 53 x^2 + 500
        let c = [int(500), int(0), int(53), int(0), int(1)];
        let (roots, errs) = poly_roots(&c, 200);
        for (z, e) in roots.iter().zip(errs.iter()) {
            assert!(*e < 1e-50);
            let v = eval_poly(&c, z);
            assert!(v.abs().cmp_abs_bits() < -150);
            assert!(z.re.to_f64().abs() < 1e-30);
        }
        let mut ims: Vec<f64> = roots.iter().map(|z| z.im.to_f64()).collect();
        ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ims[3] - 6.3813).abs() < 1e-4);
        assert!((ims[2] - 3.5041).abs() < 1e-4);
    }
}
