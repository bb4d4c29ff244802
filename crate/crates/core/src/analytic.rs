//! Genus 2 theta constants with half-integer characteristics, Rosenhain
//! triples, absolute Igusa invariants and period matrices of principally
//! polarized CM abelian surfaces.
//!
//! All numerics are fixed point ([`crate::mp`]). A [`PeriodMatrix`] keeps
//! `GUARD` extra bits over its nominal precision, and tolerances are
//! derived from the nominal precision.
//!
//! Invariants of a curve: the Rosenhain model
//! `y^2 = x (x - 1) (x - l1) (x - l2) (x - l3)` is moved by
//! `x -> 1 / (x - t)` to a sextic with six finite roots, whose
//! Igusa-Clebsch invariants `I2, I4, I6, I10` are the classical root sums
//!
//! ```text
//! I2  = sum_15 (12)^2 (34)^2 (56)^2
//! I4  = sum_10 (12)^2 (23)^2 (31)^2 (45)^2 (56)^2 (64)^2
//! I6  = sum_60 (12)^2 (23)^2 (31)^2 (45)^2 (56)^2 (64)^2 (14)^2 (25)^2 (36)^2
//! I10 = prod_{i<j} (ij)^2
//! ```
//!
//! with `(ij) = r_i - r_j`. The absolute invariants returned are
//! `j1 = I4 I6 / I10`, `j2 = I2 I4^2 / I10`, `j3 = I4^5 / I10^2`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{Int, Rat};
use crate::cm::{CmField, CmType};
use crate::fgab::matrix::{hnf, IntMatrix};
use crate::ideals::search::principal_generator;
use crate::ideals::Ideal;
use crate::mp::{poly_roots, Complex, Real};
use crate::nfield::units::UnitGroup;
use crate::nfield::{Elem, NumberField};
use crate::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 212;
/// Extra working bits carried by every [`PeriodMatrix`].
pub const GUARD: u32 = 32;
/// Cap on the number of lattice points in one theta summation.
const MAX_TERMS: usize = 2_000_000;

pub type CMat = [[Complex; 2]; 2];

fn working(precision: u32) -> u32 {
    precision + GUARD
}

fn cmat_mul(a: &CMat, b: &CMat) -> CMat {
    let e = |i: usize, j: usize| a[i][0].mul(&b[0][j]).add(&a[i][1].mul(&b[1][j]));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn cmat_add(a: &CMat, b: &CMat) -> CMat {
    [[a[0][0].add(&b[0][0]), a[0][1].add(&b[0][1])], [a[1][0].add(&b[1][0]), a[1][1].add(&b[1][1])]]
}

fn cmat_det(a: &CMat) -> Complex {
    a[0][0].mul(&a[1][1]).sub(&a[0][1].mul(&a[1][0]))
}

fn cmat_inv(a: &CMat) -> Result<CMat> {
    let d = cmat_det(a);
    if d.abs().to_f64() < 1e-30 {
        return Err(Error::Precision("singular 2x2 matrix".into()));
    }
    let di = d.inv();
    Ok([[a[1][1].mul(&di), a[0][1].neg().mul(&di)], [a[1][0].neg().mul(&di), a[0][0].mul(&di)]])
}

fn int_cmat(m: &[[i64; 2]; 2], prec: u32) -> CMat {
    let c = |v: i64| Complex::from_real(Real::from_i64(v, prec));
    [[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]]
}

/// A point of the Siegel upper half space `H_2`.
#[derive(Clone, Debug)]
pub struct PeriodMatrix {
    /// Entries at `precision + GUARD` bits.
    pub entries: CMat,
    /// Nominal precision in bits.
    pub precision: u32,
}

impl PeriodMatrix {
    /// Validate symmetry to `2^(4 - precision)` and positive definiteness
    /// of the imaginary part. The entries are symmetrized.
    pub fn new(entries: CMat, precision: u32) -> Result<Self> {
        let w = working(precision);
        let e: CMat = [
            [entries[0][0].with_prec(w), entries[0][1].with_prec(w)],
            [entries[1][0].with_prec(w), entries[1][1].with_prec(w)],
        ];
        let tol = Real::one(w).shl(4 - precision as i64);
        if e[0][1].sub(&e[1][0]).abs() > tol {
            return Err(Error::InvalidInput("period matrix is not symmetric".into()));
        }
        let off = Complex { re: e[0][1].re.add(&e[1][0].re).shl(-1), im: e[0][1].im.add(&e[1][0].im).shl(-1) };
        let pm = PeriodMatrix { entries: [[e[0][0].clone(), off.clone()], [off, e[1][1].clone()]], precision };
        let y = pm.imag();
        let det = y[0][0].mul(&y[1][1]).sub(&y[0][1].sqr());
        if !(y[0][0] > tol && det > tol) {
            return Err(Error::InvalidInput("imaginary part is not positive definite".into()));
        }
        Ok(pm)
    }

    pub fn from_f64(e: [[(f64, f64); 2]; 2], precision: u32) -> Result<Self> {
        let w = working(precision);
        let c = |z: (f64, f64)| Complex::from_f64(z.0, z.1, w);
        Self::new([[c(e[0][0]), c(e[0][1])], [c(e[1][0]), c(e[1][1])]], precision)
    }

    pub fn working_precision(&self) -> u32 {
        working(self.precision)
    }

    pub fn imag(&self) -> [[Real; 2]; 2] {
        let e = &self.entries;
        [[e[0][0].im.clone(), e[0][1].im.clone()], [e[1][0].im.clone(), e[1][1].im.clone()]]
    }

    pub fn to_f64(&self) -> [[(f64, f64); 2]; 2] {
        let e = &self.entries;
        [[e[0][0].to_f64(), e[0][1].to_f64()], [e[1][0].to_f64(), e[1][1].to_f64()]]
    }

    /// Smallest eigenvalue of `Im Omega`, in double precision.
    pub fn imag_min_eigenvalue(&self) -> f64 {
        let y = self.imag();
        let (a, b, d) = (y[0][0].to_f64(), y[0][1].to_f64(), y[1][1].to_f64());
        ((a + d) - libm::sqrt((a - d) * (a - d) + 4.0 * b * b)) / 2.0
    }

    /// `(A Omega + B)(C Omega + D)^-1` for a symplectic integer matrix
    /// `[[A, B], [C, D]]`.
    pub fn act(&self, m: &[[i64; 4]; 4]) -> Result<Self> {
        if !is_symplectic(m) {
            return Err(Error::InvalidInput("matrix is not symplectic".into()));
        }
        let w = self.working_precision();
        let blk = |r: usize, c: usize| [[m[r][c], m[r][c + 1]], [m[r + 1][c], m[r + 1][c + 1]]];
        let (a, b, c, d) = (int_cmat(&blk(0, 0), w), int_cmat(&blk(0, 2), w), int_cmat(&blk(2, 0), w), int_cmat(&blk(2, 2), w));
        let num = cmat_add(&cmat_mul(&a, &self.entries), &b);
        let den = cmat_add(&cmat_mul(&c, &self.entries), &d);
        Self::new(cmat_mul(&num, &cmat_inv(&den)?), self.precision)
    }

    /// `Omega + B` for a symmetric integer `B`.
    pub fn translate(&self, b: [[i64; 2]; 2]) -> Result<Self> {
        self.act(&[[1, 0, b[0][0], b[0][1]], [0, 1, b[1][0], b[1][1]], [0, 0, 1, 0], [0, 0, 0, 1]])
    }

    /// `-Omega^-1`.
    pub fn invert(&self) -> Result<Self> {
        self.act(&[[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]])
    }

    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        Self::new(self.entries.clone(), precision)
    }

    /// `U Omega U^T` for `U` in `GL_2(Z)`.
    pub fn conjugate(&self, u: [[i64; 2]; 2]) -> Result<Self> {
        let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
        if det.abs() != 1 {
            return Err(Error::InvalidInput("matrix is not in GL_2(Z)".into()));
        }
        // U^-T = det * [[d, -c], [-b, a]]
        let it = [[det * u[1][1], -det * u[1][0]], [-det * u[0][1], det * u[0][0]]];
        self.act(&[[u[0][0], u[0][1], 0, 0], [u[1][0], u[1][1], 0, 0], [0, 0, it[0][0], it[0][1]], [0, 0, it[1][0], it[1][1]]])
    }

    /// Reduction towards the Siegel fundamental domain: Gauss reduction of
    /// `Im Omega`, translation of `Re Omega` into `[-1/2, 1/2]`, and the
    /// inversion of the first coordinate while `|Omega_11| < 1`.
    pub fn siegel_reduce(&self) -> Result<Self> {
        let mut om = self.clone();
        for _ in 0..500 {
            loop {
                let y = om.imag();
                let (a, b, d) = (y[0][0].to_f64(), y[0][1].to_f64(), y[1][1].to_f64());
                if a > d * (1.0 + 1e-12) {
                    om = om.conjugate([[0, 1], [1, 0]])?;
                    continue;
                }
                let q = libm::round(b / a) as i64;
                if q == 0 {
                    break;
                }
                om = om.conjugate([[1, 0], [-q, 1]])?;
            }
            let r = |i: usize, j: usize| -om.entries[i][j].re.round().to_i64().unwrap_or(0);
            om = om.translate([[r(0, 0), r(0, 1)], [r(0, 1), r(1, 1)]])?;
            if om.entries[0][0].abs().to_f64() >= 1.0 - 1e-12 {
                return Ok(om);
            }
            om = om.act(&[[0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1]])?;
        }
        Err(Error::Resource("period matrix reduction did not terminate".into()))
    }

    /// Translate `Re Omega` into `[-1/2, 1/2]` and invert while the
    /// smallest eigenvalue of `Im Omega` is below `0.3`.
    pub fn light_reduce(&self) -> Result<Self> {
        let mut om = self.clone();
        for _ in 0..16 {
            let r = |i: usize, j: usize| -om.entries[i][j].re.round().to_i64().unwrap_or(0);
            om = om.translate([[r(0, 0), r(0, 1)], [r(0, 1), r(1, 1)]])?;
            if om.imag_min_eigenvalue() >= 0.3 {
                break;
            }
            om = om.invert()?;
        }
        Ok(om)
    }
}

pub fn is_symplectic(m: &[[i64; 4]; 4]) -> bool {
    let j = [[0i64, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]];
    (0..4).all(|r| {
        (0..4).all(|c| {
            let mut s = 0i128;
            for a in 0..4 {
                for b in 0..4 {
                    s += m[a][r] as i128 * j[a][b] as i128 * m[b][c] as i128;
                }
            }
            s == j[r][c] as i128
        })
    })
}

/// A characteristic `(a1, a2, b1, b2)` in `{0, 1/2}^4`, indexed by
/// `i = 16 a2 + 8 a1 + 4 b2 + 2 b1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThetaIndex(u8);

impl ThetaIndex {
    pub fn new(i: u8) -> Result<Self> {
        if i < 16 {
            Ok(ThetaIndex(i))
        } else {
            Err(Error::InvalidInput(alloc::format!("theta index {i} is not in 0..16")))
        }
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// Doubled characteristic `(2a1, 2a2, 2b1, 2b2)`.
    pub fn bits(self) -> [u8; 4] {
        let i = self.0;
        [(i >> 2) & 1, (i >> 3) & 1, i & 1, (i >> 1) & 1]
    }

    pub fn is_even(self) -> bool {
        let [a1, a2, b1, b2] = self.bits();
        (a1 * b1 + a2 * b2) % 2 == 0
    }

    pub fn all() -> impl Iterator<Item = ThetaIndex> {
        (0..16).map(ThetaIndex)
    }

    pub fn even() -> Vec<ThetaIndex> {
        Self::all().filter(|t| t.is_even()).collect()
    }

    pub fn odd() -> Vec<ThetaIndex> {
        Self::all().filter(|t| !t.is_even()).collect()
    }
}

/// Radius `r0` such that the terms with `|n + a| >= r0` sum to less than
/// `2^-bits`, for `Im Omega >= lambda`.
fn truncation_radius(lambda: f64, bits: u32) -> u64 {
    // a shifted unit lattice has at most 16 (k + 1) points with |v| in [k, k + 1)
    let target = -(bits as f64) - 1.0;
    let log2_term = |k: f64| libm::log2(16.0 * (k + 1.0)) - core::f64::consts::PI * lambda * k * k / core::f64::consts::LN_2;
    let mut k0 = 1u64;
    loop {
        // terms are decreasing past the first few shells; bound the tail
        // by a geometric series once the ratio drops below 1/2
        let mut total = f64::NEG_INFINITY;
        let mut k = k0 as f64;
        loop {
            let t = log2_term(k);
            total = if total == f64::NEG_INFINITY { t } else { total.max(t) + libm::log2(1.0 + libm::exp2(-(total - t).abs())) };
            if log2_term(k + 1.0) - t < -1.0 && t < total - 1.0 {
                total += 1.0;
                break;
            }
            if t < target - 64.0 {
                break;
            }
            k += 1.0;
        }
        if total < target {
            return k0;
        }
        k0 += 1;
    }
}

/// All sixteen theta constants `theta[a, b](0, Omega)` by direct
/// summation of the series, odd characteristics included.
pub fn theta_series_all(om: &PeriodMatrix) -> Result<Vec<Complex>> {
    let lambda = om.imag_min_eigenvalue();
    if lambda <= 0.0 {
        return Err(Error::InvalidInput("imaginary part is not positive definite".into()));
    }
    let w = om.working_precision();
    let r0 = truncation_radius(lambda, w);
    let ru = 2 * r0 as i64;
    let count = ((2 * ru + 1) * (2 * ru + 1)) as usize;
    if count > MAX_TERMS {
        return Err(Error::Resource("theta series needs too many terms; reduce the period matrix".into()));
    }
    let pi_4 = Real::pi(w).shl(-2);
    let e = &om.entries;
    let mut sums = vec![Complex::zero(w); 16];
    for u1 in -ru..=ru {
        for u2 in -ru..=ru {
            if u1 * u1 + u2 * u2 > ru * ru {
                continue;
            }
            // x = u^T Omega u; term = exp(pi i x / 4)
            let x = e[0][0]
                .mul_int(&Int::from(u1 * u1))
                .add(&e[0][1].mul_int(&Int::from(2 * u1 * u2)))
                .add(&e[1][1].mul_int(&Int::from(u2 * u2)));
            let modulus = x.im.mul(&pi_4).neg().exp();
            if modulus.is_zero() {
                continue;
            }
            let (c, s) = x.re.mul(&pi_4).cos_sin();
            let t = Complex { re: modulus.mul(&c), im: modulus.mul(&s) };
            let a1 = u1.rem_euclid(2) as usize;
            let a2 = u2.rem_euclid(2) as usize;
            for b1 in 0..2usize {
                for b2 in 0..2usize {
                    let idx = 8 * a2 + 4 * a1 + 2 * b2 + b1;
                    let phase = (u1 * b1 as i64 + u2 * b2 as i64).rem_euclid(4);
                    let term = match phase {
                        0 => t.clone(),
                        1 => Complex { re: t.im.neg(), im: t.re.clone() },
                        2 => t.neg(),
                        _ => Complex { re: t.im.clone(), im: t.re.neg() },
                    };
                    sums[idx] = sums[idx].add(&term);
                }
            }
        }
    }
    Ok(sums)
}

/// `theta_i(Omega)`; odd characteristics give exactly zero.
pub fn theta_constant(idx: ThetaIndex, om: &PeriodMatrix) -> Result<Complex> {
    if !idx.is_even() {
        return Ok(Complex::zero(om.working_precision()));
    }
    Ok(theta_series_all(om)?.swap_remove(idx.0 as usize))
}

/// The sixteen theta constants with odd ones set to zero.
pub fn theta_constants(om: &PeriodMatrix) -> Result<Vec<Complex>> {
    let mut t = theta_series_all(om)?;
    for i in ThetaIndex::odd() {
        t[i.0 as usize] = Complex::zero(om.working_precision());
    }
    Ok(t)
}

#[derive(Clone, Debug)]
pub struct RosenhainTriple {
    pub lambda: [Complex; 3],
}

fn nonvanishing(z: &Complex, prec: u32) -> Result<()> {
    if z.abs() < Real::one(z.prec()).shl(-((prec / 2) as i64)) {
        return Err(Error::InvalidInput("a theta constant in the Rosenhain quotients vanishes".into()));
    }
    Ok(())
}

/// `l1 = (t0 t1 / t2 t3)^2`, `l2 = (t1 t12 / t2 t15)^2`,
/// `l3 = (t0 t12 / t3 t15)^2` from precomputed theta constants.
pub fn rosenhain_from_thetas(t: &[Complex], precision: u32) -> Result<RosenhainTriple> {
    for i in [0usize, 1, 2, 3, 12, 15] {
        nonvanishing(&t[i], precision)?;
    }
    let q = |a: usize, b: usize, c: usize, d: usize| t[a].mul(&t[b]).div(&t[c].mul(&t[d])).sqr();
    let lambda = [q(0, 1, 2, 3), q(1, 12, 2, 15), q(0, 12, 3, 15)];
    let one = Complex::one(t[0].prec());
    let zero = Complex::zero(t[0].prec());
    let tol = Real::one(t[0].prec()).shl(-((precision / 2) as i64));
    let pts = [&zero, &one, &lambda[0], &lambda[1], &lambda[2]];
    for i in 0..5 {
        for j in i + 1..5 {
            if pts[i].sub(pts[j]).abs() < tol {
                return Err(Error::InvalidInput("Rosenhain branch points collide".into()));
            }
        }
    }
    Ok(RosenhainTriple { lambda })
}

pub fn rosenhain(om: &PeriodMatrix) -> Result<RosenhainTriple> {
    rosenhain_from_thetas(&theta_constants(om)?, om.precision)
}

/// `l3` recomputed as `l1 l2 (t2 / t1)^4`, an identity between the three
/// quotients.
pub fn rosenhain_l3_check(t: &[Complex], r: &RosenhainTriple) -> Complex {
    let q = t[2].div(&t[1]).sqr().sqr();
    r.lambda[0].mul(&r.lambda[1]).mul(&q)
}

/// Classical Igusa-Clebsch invariants `[I2, I4, I6, I10]` of the sextic
/// with the six given roots and leading coefficient 1.
pub fn igusa_clebsch_from_roots(r: &[Complex; 6]) -> [Complex; 4] {
    let p = r[0].prec();
    let sq = |i: usize, j: usize| r[i].sub(&r[j]).sqr();
    let mut s = vec![vec![Complex::zero(p); 6]; 6];
    for i in 0..6 {
        for j in 0..6 {
            if i != j {
                s[i][j] = sq(i, j);
            }
        }
    }
    // I2: 15 perfect matchings
    let mut i2 = Complex::zero(p);
    for b in 1..6 {
        let rest: Vec<usize> = (1..6).filter(|&x| x != b).collect();
        for c in 1..4 {
            let others: Vec<usize> = rest[1..].iter().copied().filter(|&x| x != rest[c]).collect();
            i2 = i2.add(&s[0][b].mul(&s[rest[0]][rest[c]]).mul(&s[others[0]][others[1]]));
        }
    }
    // I4 and I6: 10 splits into two triangles containing 0 on one side
    let mut i4 = Complex::zero(p);
    let mut i6 = Complex::zero(p);
    for x in 1..6 {
        for y in x + 1..6 {
            let t1 = [0usize, x, y];
            let t2: Vec<usize> = (1..6).filter(|&z| z != x && z != y).collect();
            let tri = |t: &[usize]| s[t[0]][t[1]].mul(&s[t[1]][t[2]]).mul(&s[t[2]][t[0]]);
            let both = tri(&t1).mul(&tri(&t2));
            i4 = i4.add(&both);
            for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                let m = s[t1[0]][t2[perm[0]]].mul(&s[t1[1]][t2[perm[1]]]).mul(&s[t1[2]][t2[perm[2]]]);
                i6 = i6.add(&both.mul(&m));
            }
        }
    }
    let mut i10 = Complex::one(p);
    for i in 0..6 {
        for j in i + 1..6 {
            i10 = i10.mul(&s[i][j]);
        }
    }
    [i2, i4, i6, i10]
}

/// The six finite roots of the Rosenhain sextic after `x -> 1 / (x - t)`.
fn rosenhain_sextic_roots(r: &RosenhainTriple) -> [Complex; 6] {
    let p = r.lambda[0].prec();
    let zero = Complex::zero(p);
    let one = Complex::one(p);
    let finite = [zero.clone(), one, r.lambda[0].clone(), r.lambda[1].clone(), r.lambda[2].clone()];
    // pick t well away from the five finite branch points
    let cands = [(-1.0, 0.5), (2.0, -0.5), (0.5, 1.5), (-0.5, -1.5), (3.0, 2.0), (-2.5, 2.5)];
    let best = cands
        .iter()
        .map(|&(x, y)| {
            let t = Complex::from_f64(x, y, p);
            let d = finite.iter().map(|z| z.sub(&t).abs().to_f64()).fold(f64::INFINITY, f64::min);
            (d, t)
        })
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .unwrap()
        .1;
    let mv = |z: &Complex| z.sub(&best).inv();
    let r = [mv(&finite[0]), mv(&finite[1]), mv(&finite[2]), mv(&finite[3]), mv(&finite[4]), zero];
    // scale so the closest pair is at distance 1; keeps I10 clear of the
    // fixed point floor and leaves the absolute invariants alone
    let mut dmin = r[0].sub(&r[1]).abs();
    for i in 0..6 {
        for j in i + 1..6 {
            let d = r[i].sub(&r[j]).abs();
            if d < dmin {
                dmin = d;
            }
        }
    }
    let s = Complex::from_real(dmin).inv();
    core::array::from_fn(|i| r[i].mul(&s))
}

/// Absolute invariants `(I4 I6 / I10, I2 I4^2 / I10, I4^5 / I10^2)`.
#[derive(Clone, Debug)]
pub struct IgusaInvariants {
    pub j: [Complex; 3],
    /// `[I2, I4, I6, I10]` of the normalized sextic.
    pub igusa_clebsch: [Complex; 4],
}

impl IgusaInvariants {
    /// Largest relative difference `|j_i - j'_i| / max(1, |j_i|)`.
    pub fn max_rel_diff(&self, o: &IgusaInvariants) -> f64 {
        (0..3)
            .map(|i| {
                let (a, b) = (self.j[i].to_f64(), o.j[i].to_f64());
                let d = libm::hypot(a.0 - b.0, a.1 - b.1);
                d / libm::hypot(a.0, a.1).max(1.0)
            })
            .fold(0.0, f64::max)
    }
}

pub fn igusa_from_rosenhain(r: &RosenhainTriple) -> Result<IgusaInvariants> {
    let ic = igusa_clebsch_from_roots(&rosenhain_sextic_roots(r));
    let [i2, i4, i6, i10] = &ic;
    if i10.abs().to_f64() == 0.0 {
        return Err(Error::InvalidInput("degenerate curve: I10 vanishes".into()));
    }
    let j1 = i4.mul(i6).div(i10);
    let j2 = i2.mul(&i4.sqr()).div(i10);
    let j3 = i4.powi(5).div(&i10.sqr());
    Ok(IgusaInvariants { j: [j1, j2, j3], igusa_clebsch: ic.clone() })
}

/// Absolute Igusa invariants of `Omega`, evaluated after
/// [`PeriodMatrix::siegel_reduce`].
pub fn igusa_invariants(om: &PeriodMatrix) -> Result<IgusaInvariants> {
    let red = om.siegel_reduce()?;
    igusa_from_rosenhain(&rosenhain(&red)?)
}

/// Symbolic level 2 basis `B1 = [Q1 + Q2 - 2 inf]`, `B2 = [P0 + P1 - 2 inf]`,
/// `B3 = [Q2 + Q3 - 2 inf]`, `B4 = [P0 - inf]` of the Rosenhain curve.
#[derive(Clone, Copy, Debug, Default)]
pub struct Level2Basis;

impl Level2Basis {
    pub fn labels(&self) -> [&'static str; 4] {
        ["[Q1+Q2-2inf]", "[P0+P1-2inf]", "[Q2+Q3-2inf]", "[P0-inf]"]
    }
}

/// A period matrix with the data that produced it.
#[derive(Clone, Debug)]
pub struct CmPeriodMatrix {
    pub omega: PeriodMatrix,
    /// The polarization element: `xi conj(xi)^-1 = -1`, `Im phi(xi) > 0`
    /// on the CM type and `(xi) = (a conj(a) D)^-1`.
    pub xi: Elem,
    /// Symplectic basis `(e1, e2, f1, f2)` of the ideal.
    pub basis: Vec<Elem>,
    /// `Tr(xi conj(x) y)` on `basis`; always the standard form.
    pub form: IntMatrix,
}

/// High precision values of the embeddings named by `phi`.
fn type_embeddings(k: &NumberField, phi: &CmType, prec: u32) -> Result<[Complex; 2]> {
    let (roots, _) = poly_roots(k.poly(), prec);
    let mut out = Vec::new();
    for &e in &phi.emb {
        let target = k.embed_f64(&k.gen(), e);
        let r = roots
            .iter()
            .min_by(|a, b| {
                let d = |z: &Complex| {
                    let (x, y) = z.to_f64();
                    libm::hypot(x - target.0, y - target.1)
                };
                d(a).partial_cmp(&d(b)).unwrap()
            })
            .ok_or_else(|| Error::Inconsistent("no roots".into()))?;
        out.push(r.clone());
    }
    Ok([out[0].clone(), out[1].clone()])
}

fn embed_at(k: &NumberField, x: &Elem, root: &Complex) -> Complex {
    let p = root.prec();
    let coeffs = k.to_power(x);
    let mut acc = Complex::zero(p);
    for c in coeffs.iter().rev() {
        acc = acc.mul(root).add(&Complex::from_real(Real::from_rat(c, p)));
    }
    acc
}

fn pairing(k: &NumberField, xi: &Elem, x: &Elem, y: &Elem) -> Rat {
    k.trace(&k.mul(&k.mul(xi, &k.conj(x)), y))
}

/// Symplectic basis for an integral alternating unimodular form given on
/// the standard basis of `Z^n`: columns `(e_1..e_g, f_1..f_g)` with
/// `E(e_i, f_j) = delta_ij` and all other pairings zero.
pub fn symplectic_basis(e: &IntMatrix) -> Result<IntMatrix> {
    let n = e.rows();
    let ev = |x: &[Int], y: &[Int]| -> Int {
        let mut s = Int::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                s += &x[i] * &e[(i, j)] * &y[j];
            }
        }
        s
    };
    let mut rest: Vec<Vec<Int>> = (0..n)
        .map(|i| {
            let mut v = vec![Int::zero(); n];
            v[i] = Int::one();
            v
        })
        .collect();
    let mut es = Vec::new();
    let mut fs = Vec::new();
    while !rest.is_empty() {
        let x = rest[0].clone();
        // y in span(rest) with E(x, y) = 1 by an extended gcd over the pairings
        let vals: Vec<Int> = rest.iter().map(|r| ev(&x, r)).collect();
        let mut g = Int::zero();
        let mut coef = vec![Int::zero(); rest.len()];
        for (i, v) in vals.iter().enumerate() {
            let eg = g.extended_gcd(v);
            for c in coef.iter_mut() {
                *c *= &eg.x;
            }
            coef[i] = eg.y.clone();
            g = eg.gcd;
        }
        if !g.is_one() {
            return Err(Error::InvalidInput("form is not unimodular".into()));
        }
        let mut y = vec![Int::zero(); n];
        for (c, r) in coef.iter().zip(&rest) {
            for i in 0..n {
                y[i] += c * &r[i];
            }
        }
        let proj: Vec<Vec<Int>> = rest
            .iter()
            .map(|z| {
                let (zy, zx) = (ev(z, &y), ev(z, &x));
                (0..n).map(|i| &z[i] - &zy * &x[i] + &zx * &y[i]).collect()
            })
            .collect();
        es.push(x);
        fs.push(y);
        let h = hnf(&IntMatrix::from_cols(n, &proj));
        rest = h.columns().into_iter().filter(|c| c.iter().any(|v| !v.is_zero())).collect();
    }
    let mut cols = es;
    cols.extend(fs);
    let b = IntMatrix::from_cols(n, &cols);
    let g = n / 2;
    let got = b.transpose().mul(e).mul(&b);
    for i in 0..n {
        for j in 0..n {
            let want = if j == i + g { 1 } else if i == j + g { -1 } else { 0 };
            if got[(i, j)] != Int::from(want) {
                return Err(Error::Inconsistent("symplectic reduction failed".into()));
            }
        }
    }
    Ok(b)
}

/// Period matrix of `C^2 / Phi(a)` with the principal polarization
/// `E(x, y) = Tr(xi conj(x) y)`.
pub fn period_matrix(field: &CmField, phi: &CmType, a: &Ideal, precision: u32) -> Result<CmPeriodMatrix> {
    let k = &field.field;
    let units = UnitGroup::compute(k)?;
    let codiff = Ideal::unit(k).dual(k);
    let target = a.mul(k, &a.conj(k)).inv(k).mul(k, &codiff);
    let xi0 = principal_generator(k, &units, &target)?
        .ok_or_else(|| Error::InvalidInput("(a conj(a) D)^-1 is not principal: no principal polarization".into()))?;
    // raw period matrices can be far from reduced; reduce with 64 spare bits
    let w = working(precision + 64);
    let roots = type_embeddings(k, phi, w + 32)?;
    let mut xi = None;
    let eps = units.fundamental.clone();
    'search: for j in [0i64, 1, -1, 2, -2, 3, -3] {
        let ej = match &eps {
            Some(e) => k.pow(e, j)?,
            None if j == 0 => k.one(),
            None => continue,
        };
        for i in 0..units.torsion_order {
            let c = k.mul(&k.mul(&xi0, &ej), &k.pow_u(&units.torsion_gen, i));
            if k.conj(&c) != k.neg(&c) {
                continue;
            }
            if roots.iter().all(|r| embed_at(k, &c, r).im.to_f64() > 0.0) {
                xi = Some(c);
                break 'search;
            }
        }
    }
    let xi = xi.ok_or_else(|| Error::InvalidInput("no polarization element is positive on the CM type".into()))?;
    let zb = a.basis();
    let n = zb.len();
    let mut rows = Vec::with_capacity(n);
    for x in &zb {
        let mut r = Vec::with_capacity(n);
        for y in &zb {
            let v = pairing(k, &xi, x, y);
            if !v.is_integer() {
                return Err(Error::Inconsistent("polarization is not integral on the ideal".into()));
            }
            r.push(v.to_integer());
        }
        rows.push(r);
    }
    let form = IntMatrix::from_rows(&rows);
    if form.det().abs() != Int::one() {
        return Err(Error::Inconsistent("polarization is not unimodular".into()));
    }
    let b = symplectic_basis(&form)?;
    let basis: Vec<Elem> = (0..n)
        .map(|c| {
            let mut acc = k.zero();
            for (i, x) in zb.iter().enumerate() {
                acc = k.add(&acc, &k.mul_int(x, &b[(i, c)]));
            }
            acc
        })
        .collect();
    let per = |x: &Elem| -> [Complex; 2] { [embed_at(k, x, &roots[0]).with_prec(w), embed_at(k, x, &roots[1]).with_prec(w)] };
    let pe: Vec<[Complex; 2]> = basis[..2].iter().map(per).collect();
    let pf: Vec<[Complex; 2]> = basis[2..].iter().map(per).collect();
    let pi_e: CMat = [[pe[0][0].clone(), pe[1][0].clone()], [pe[0][1].clone(), pe[1][1].clone()]];
    let pi_f: CMat = [[pf[0][0].clone(), pf[1][0].clone()], [pf[0][1].clone(), pf[1][1].clone()]];
    let raw = PeriodMatrix::new(cmat_mul(&cmat_inv(&pi_f)?, &pi_e), precision + 64)?;
    let omega = raw.siegel_reduce()?.with_precision(precision)?;
    let form = IntMatrix::from_rows(
        &basis.iter().map(|x| basis.iter().map(|y| pairing(k, &xi, x, y).to_integer()).collect()).collect::<Vec<Vec<Int>>>(),
    );
    Ok(CmPeriodMatrix { omega, xi, basis, form })
}

/// Decimal rendering `re+imi` at `digits` significant places.
pub fn format_complex(z: &Complex, digits: usize) -> String {
    let (re, im) = z.to_f64();
    alloc::format!("{:.*e}{}{:.*e}i", digits, re, if im < 0.0 { "-" } else { "+" }, digits, im.abs())
}
