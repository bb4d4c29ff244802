//! Quartic CM fields `Q[x]/(x^4 + A x^2 + B)`, their CM types, reflex
//! pairs and type norms.
//!
//! Write `u = i y1` and `v = i y2` for the roots of the defining
//! polynomial in the upper half plane, `y1 > y2 > 0`. The embeddings of
//! the field are ordered `u, v, -u, -v` (see [`NumberField`]). For the
//! type `{u, v}` the reflex field is `Q(u + v)`, with minimal polynomial
//! `x^4 + 2A x^2 + (A^2 - 4B)`, and the reflex type sends the generator
//! `beta` to `u + v` and `u - v`. Hence for `x = f(beta)`
//!
//! ```text
//! N_{Phi^r}(x) = f(alpha + w) f(alpha - w),   w^2 = -A - alpha^2,
//! ```
//!
//! which is symmetric in `w` and therefore an element of `K`. The mixed
//! type `{u, -v}` gives the same map after relabelling `beta`, so both
//! types share one reflex pair up to conjugation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::arith::{exact_sqrt, int, Int, Rat};
use crate::fgab::matrix::{kernel, IntMatrix};
use crate::ideals::search::reduced_basis;
use crate::ideals::Ideal;
use crate::mp::Complex;
use crate::nfield::units::{even_quartic_subfield, restrict_to_subfield};
use crate::nfield::{Elem, NumberField};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaloisClass {
    Cyclic,
    Dihedral,
    Biquadratic,
}

impl GaloisClass {
    pub fn name(&self) -> &'static str {
        match self {
            GaloisClass::Cyclic => "cyclic",
            GaloisClass::Dihedral => "dihedral",
            GaloisClass::Biquadratic => "biquadratic",
        }
    }
}

fn is_square(n: &Int) -> bool {
    !n.is_negative() && exact_sqrt(n).is_some()
}

/// Galois group of the normal closure of `Q[x]/(x^4 + A x^2 + B)`.
pub fn galois_class(a: &Int, b: &Int) -> GaloisClass {
    let d: Int = a * a - b * 4;
    if is_square(b) {
        GaloisClass::Biquadratic
    } else if is_square(&(b * d)) {
        GaloisClass::Cyclic
    } else {
        GaloisClass::Dihedral
    }
}

/// `(2A, A^2 - 4B)`, the parameters of the reflex field.
pub fn reflex_params(a: &Int, b: &Int) -> (Int, Int) {
    (a * 2, a * a - b * 4)
}

/// Remove the scaling `x -> 2x`, which maps `(A, B)` to `(4A, 16B)`.
pub fn normalize_params(a: &Int, b: &Int) -> (Int, Int) {
    let (mut a, mut b) = (a.clone(), b.clone());
    let (four, sixteen) = (int(4), int(16));
    while !a.is_zero() && a.is_multiple_of(&four) && b.is_multiple_of(&sixteen) {
        a /= &four;
        b /= &sixteen;
    }
    (a, b)
}

/// A quartic CM field `K = Q(alpha)`, `alpha^4 + A alpha^2 + B = 0`.
#[derive(Clone, Debug)]
pub struct CmField {
    pub a: Int,
    pub b: Int,
    pub field: NumberField,
    pub galois: GaloisClass,
}

impl CmField {
    /// Requires `A > 0`, `B > 0` and `A^2 - 4B` a positive non-square,
    /// which makes every root purely imaginary and the polynomial
    /// irreducible.
    pub fn new(a: &Int, b: &Int) -> Result<Self> {
        if !a.is_positive() || !b.is_positive() {
            return Err(Error::NotCm(format!("x^4 + {}x^2 + {} needs A > 0 and B > 0", a, b)));
        }
        let d: Int = a * a - b * 4;
        if !d.is_positive() {
            return Err(Error::NotCm(format!("A^2 - 4B = {} is not positive", d)));
        }
        if is_square(&d) {
            return Err(Error::Reducible);
        }
        let field = NumberField::new(&[b.clone(), Int::zero(), a.clone(), Int::zero(), Int::one()])?;
        if field.conj_matrix().is_none() {
            return Err(Error::NotCm("no complex conjugation".into()));
        }
        Ok(CmField { a: a.clone(), b: b.clone(), field, galois: galois_class(a, b) })
    }

    pub fn from_i64(a: i64, b: i64) -> Result<Self> {
        Self::new(&int(a), &int(b))
    }

    /// The real quadratic subfield `Q(alpha^2)`.
    pub fn real_subfield(&self) -> Result<NumberField> {
        even_quartic_subfield(&self.field)
    }

    pub fn is_primitive(&self) -> bool {
        self.galois != GaloisClass::Biquadratic
    }

    pub fn name(&self) -> alloc::string::String {
        format!("x^4 + {}x^2 + {}", self.a, self.b)
    }
}

/// A CM type, as two embedding indices (one per conjugate pair).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CmType {
    pub emb: [usize; 2],
}

impl CmType {
    /// `{u, v}`: both images of `alpha` on the positive imaginary axis.
    pub const POSITIVE: CmType = CmType { emb: [0, 1] };
    /// `{u, -v}`.
    pub const MIXED: CmType = CmType { emb: [0, 3] };

    pub fn images(&self, k: &NumberField) -> [Complex; 2] {
        let a = k.gen();
        [k.embed(&a, self.emb[0]), k.embed(&a, self.emb[1])]
    }

    /// Two embeddings are never complex conjugates of each other.
    pub fn is_valid(&self) -> bool {
        self.emb[0] < 4 && self.emb[1] < 4 && self.emb[0] % 2 != self.emb[1] % 2
    }
}

/// Representatives of the CM types up to the action of `Aut(K)`.
/// Biquadratic fields also have two classes, neither primitive.
pub fn cm_types(_f: &CmField) -> Vec<CmType> {
    vec![CmType::POSITIVE, CmType::MIXED]
}

/// A primitive CM pair with its reflex pair.
#[derive(Clone, Debug)]
pub struct ReflexPair {
    pub base: CmField,
    pub phi: CmType,
    pub reflex: CmField,
    pub phi_r: CmType,
    /// `w^2 = -A - alpha^2` as an element of `K`.
    w2: Elem,
}

impl ReflexPair {
    pub fn new(base: CmField, phi: CmType) -> Result<Self> {
        if !phi.is_valid() {
            return Err(Error::InvalidInput("not a CM type".into()));
        }
        if !base.is_primitive() {
            return Err(Error::NotCm("biquadratic fields have no primitive CM types".into()));
        }
        let (ar, br) = reflex_params(&base.a, &base.b);
        let reflex = CmField::new(&ar, &br)?;
        let k = &base.field;
        let a = k.gen();
        let w2 = k.neg(&k.add(&k.from_int(&base.a), &k.mul(&a, &a)));
        Ok(ReflexPair { base, phi, reflex, phi_r: CmType::POSITIVE, w2 })
    }

    pub fn from_params(a: i64, b: i64) -> Result<Self> {
        Self::new(CmField::from_i64(a, b)?, CmType::POSITIVE)
    }

    /// `N_{Phi^r}(x)` for `x` in the reflex field, exactly.
    pub fn type_norm_elem(&self, x: &Elem) -> Elem {
        let k = &self.base.field;
        let c = self.reflex.field.to_power(x);
        let a = k.gen();
        // (alpha + w)^j = p + q w
        let (mut p, mut q) = (k.one(), k.zero());
        let (mut sp, mut sq) = (k.zero(), k.zero());
        for cj in &c {
            if !cj.is_zero() {
                sp = k.add(&sp, &k.mul_rat(&p, cj));
                sq = k.add(&sq, &k.mul_rat(&q, cj));
            }
            let np = k.add(&k.mul(&p, &a), &k.mul(&q, &self.w2));
            let nq = k.add(&p, &k.mul(&q, &a));
            p = np;
            q = nq;
        }
        k.sub(&k.mul(&sp, &sp), &k.mul(&self.w2, &k.mul(&sq, &sq)))
    }

    /// `prod_{psi in Phi^r} psi(x)` numerically, to compare with the
    /// first embedding of [`Self::type_norm_elem`].
    pub fn type_norm_numeric(&self, x: &Elem) -> Complex {
        let kr = &self.reflex.field;
        kr.embed(x, self.phi_r.emb[0]).mul(&kr.embed(x, self.phi_r.emb[1]))
    }

    /// `N_{Phi^r}(b)` for a nonzero fractional ideal of the reflex field.
    ///
    /// The ideal generated by the type norms of elements of `b` lies in
    /// `N_{Phi^r}(b)`; it is accepted once its norm reaches `N(b)^2` and
    /// it satisfies `J conj(J) = N(b) O_K`.
    pub fn type_norm_ideal(&self, b: &Ideal) -> Result<Ideal> {
        let k = &self.base.field;
        let kr = &self.reflex.field;
        let lat = Ideal { num: b.num.clone(), den: Int::one() };
        let nb = lat.norm();
        let target = &nb * &nb;
        let mut cands: Vec<Elem> = lat.basis();
        let red: Vec<Elem> = reduced_basis(kr, &lat.num.columns())?.into_iter().map(Elem::integral).collect();
        for i in 0..red.len() {
            cands.push(red[i].clone());
            for j in 0..i {
                cands.push(kr.add(&red[i], &red[j]));
                cands.push(kr.sub(&red[i], &red[j]));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x7e9a_11c3);
        let mut j: Option<Ideal> = None;
        let mut idx = 0usize;
        for _ in 0..400 {
            let x = if idx < cands.len() {
                idx += 1;
                cands[idx - 1].clone()
            } else {
                let mut s = kr.zero();
                for r in &red {
                    let c = (rng.next_u32() % 7) as i64 - 3;
                    s = kr.add(&s, &kr.mul_int(r, &int(c)));
                }
                s
            };
            if x.is_zero() {
                continue;
            }
            let t = Ideal::principal(k, &self.type_norm_elem(&x))?;
            let nj = match &j {
                None => t,
                Some(prev) => prev.add(k, &t),
            };
            let done = nj.norm() == target;
            j = Some(nj);
            if done {
                break;
            }
        }
        let j = j.ok_or_else(|| Error::Inconsistent("no elements in ideal".into()))?;
        if j.norm() != target {
            return Err(Error::Inconsistent("type norm certificate not reached".into()));
        }
        if j.mul(k, &j.conj(k)) != Ideal::from_gens(k, &[k.from_rat(&nb)])? {
            return Err(Error::Inconsistent("type norm fails J conj(J) = N(b)".into()));
        }
        let d = Rat::from(b.den.clone());
        Ok(j.mul_rat(&(Rat::one() / (&d * &d))))
    }
}

/// `N_{K/K0}(x) = x conj(x)` as an element of `K0 = Q(alpha^2)`.
pub fn relative_norm_elem(k: &NumberField, k0: &NumberField, x: &Elem) -> Result<Elem> {
    let y = k.mul(x, &k.conj(x));
    restrict_to_subfield(k, k0, &y).ok_or_else(|| Error::Inconsistent("relative norm not in the real subfield".into()))
}

/// `N_{K/K0}(I) = I conj(I) ∩ K0` for an even quartic CM field `K`.
pub fn relative_norm(k: &NumberField, k0: &NumberField, ideal: &Ideal) -> Result<Ideal> {
    let j = ideal.mul(k, &ideal.conj(k));
    let basis: Vec<Elem> = j.num.columns().into_iter().map(Elem::integral).collect();
    let pw: Vec<Vec<Rat>> = basis.iter().map(|e| k.to_power(e)).collect();
    let mut d = Int::one();
    for p in &pw {
        for c in p {
            d = d.lcm(c.denom());
        }
    }
    let rows: Vec<Vec<Int>> = [1usize, 3]
        .iter()
        .map(|&r| pw.iter().map(|p| (&p[r] * Rat::from(d.clone())).to_integer()).collect())
        .collect();
    let ker = kernel(&IntMatrix::from_rows(&rows));
    let mut gens = Vec::new();
    for c in ker.columns() {
        let mut x = k.zero();
        for (ci, e) in c.iter().zip(&basis) {
            x = k.add(&x, &k.mul_int(e, ci));
        }
        let y = restrict_to_subfield(k, k0, &x).ok_or_else(|| Error::Inconsistent("descent failed".into()))?;
        gens.push(Elem::new(y.num, &y.den * &j.den));
    }
    let out = Ideal::from_gens(k0, &gens)?;
    // out O_K = I conj(I), so N_{K0/Q}(out) = N_{K/Q}(I)
    if out.norm() != ideal.norm() {
        return Err(Error::Inconsistent("relative norm has the wrong absolute norm".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::decompose;

    #[test]
    fn galois_classes() {
        assert_eq!(galois_class(&int(53), &int(500)), GaloisClass::Dihedral);
        assert_eq!(galois_class(&int(65), &int(425)), GaloisClass::Dihedral);
        assert_eq!(galois_class(&int(106), &int(809)), GaloisClass::Dihedral);
        assert_eq!(galois_class(&int(5), &int(5)), GaloisClass::Cyclic);
        assert_eq!(galois_class(&int(4), &int(1)), GaloisClass::Biquadratic);
    }

    /// Oracle: the roots `±i y1, ±i y2` generate a field with three
    /// quadratic subfields iff `y1 y2` is rational, with a cyclic group
    /// iff `y1 y2 (y1^2 - y2^2)` is rational.
    #[test]
    fn galois_class_matches_roots() {
        for (a, b) in [(53i64, 500i64), (5, 5), (4, 1), (13, 41), (6, 4), (10, 20), (65, 425)] {
            let f = CmField::from_i64(a, b).unwrap();
            let [u, v] = CmType::POSITIVE.images(&f.field);
            let (y1, y2) = (u.im.to_f64(), v.im.to_f64());
            let near_int = |x: f64| (x - libm::round(x)).abs() < 1e-9;
            let expect = if near_int(y1 * y2) {
                GaloisClass::Biquadratic
            } else if near_int(y1 * y2 * (y1 * y1 - y2 * y2)) {
                GaloisClass::Cyclic
            } else {
                GaloisClass::Dihedral
            };
            assert_eq!(f.galois, expect, "{} {}", a, b);
        }
    }

    #[test]
    fn rejects_non_cm_inputs() {
        assert_eq!(CmField::from_i64(10, 25).unwrap_err(), Error::NotCm("A^2 - 4B = 0 is not positive".into()));
        assert_eq!(CmField::from_i64(5, 4).unwrap_err(), Error::Reducible);
        assert!(matches!(CmField::from_i64(-3, 1), Err(Error::NotCm(_))));
        let biq = CmField::from_i64(4, 1).unwrap();
        assert!(matches!(ReflexPair::new(biq, CmType::POSITIVE), Err(Error::NotCm(_))));
    }

    #[test]
    fn cm_type_images() {
        let f = CmField::from_i64(53, 500).unwrap();
        let ts = cm_types(&f);
        assert_eq!(ts.len(), 2);
        let [a, b] = ts[0].images(&f.field);
        let [c, d] = ts[1].images(&f.field);
        let r = |z: &Complex| (libm::round(z.re.to_f64() * 1e4) / 1e4, libm::round(z.im.to_f64() * 1e4) / 1e4);
        assert_eq!(r(&a), (0.0, 6.3813));
        assert_eq!(r(&b), (0.0, 3.5041));
        assert_eq!(r(&c), (0.0, 6.3813));
        assert_eq!(r(&d), (0.0, -3.5041));
    }

    #[test]
    fn reflex_fields() {
        let rp = ReflexPair::from_params(53, 500).unwrap();
        assert_eq!((rp.reflex.a.clone(), rp.reflex.b.clone()), (int(106), int(809)));
        let rp = ReflexPair::from_params(65, 425).unwrap();
        assert_eq!((rp.reflex.a.clone(), rp.reflex.b.clone()), (int(130), int(2525)));
        for (a, b) in [(53i64, 500i64), (65, 425), (5, 5), (13, 41)] {
            let (ar, br) = reflex_params(&int(a), &int(b));
            let (aa, bb) = reflex_params(&ar, &br);
            assert_eq!(normalize_params(&aa, &bb), (int(a), int(b)));
        }
    }

    /// Reflex of the reflex, by root matching: the sums of the reflex
    /// type images of `beta` are `2u` and `2v`.
    #[test]
    fn reflex_involution_numeric() {
        let rp = ReflexPair::from_params(65, 425).unwrap();
        let kr = &rp.reflex.field;
        let [r0, r1] = rp.phi_r.images(kr);
        let [u, v] = CmType::POSITIVE.images(&rp.base.field);
        let two = int(2);
        assert!(r0.add(&r1).sub(&u.mul_int(&two)).abs().to_f64() < 1e-40);
        assert!(r0.sub(&r1).sub(&v.mul_int(&two)).abs().to_f64() < 1e-40);
    }

    fn sample(kr: &NumberField, seed: u64) -> Elem {
        let mut s = seed;
        let c: Vec<i64> = (0..4)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 33) % 11) as i64 - 5
            })
            .collect();
        let e = Elem::integral(c.into_iter().map(int).collect());
        if e.is_zero() {
            kr.one()
        } else {
            e
        }
    }

    #[test]
    fn type_norm_elements() {
        for (a, b) in [(53i64, 500i64), (65, 425), (5, 5)] {
            let rp = ReflexPair::from_params(a, b).unwrap();
            let (k, kr) = (&rp.base.field, &rp.reflex.field);
            assert_eq!(rp.type_norm_elem(&kr.one()), k.one());
            assert_eq!(rp.type_norm_elem(&kr.from_rat(&crate::arith::rat(3, 7))), k.from_rat(&crate::arith::rat(9, 49)));
            for i in 0..25u64 {
                let x = sample(kr, 2 * i + 1);
                let y = sample(kr, 2 * i + 2);
                let tx = rp.type_norm_elem(&x);
                let ty = rp.type_norm_elem(&y);
                assert_eq!(rp.type_norm_elem(&kr.mul(&x, &y)), k.mul(&tx, &ty));
                let nx = kr.norm(&x);
                assert_eq!(k.mul(&tx, &k.conj(&tx)), k.from_rat(&nx));
                assert_eq!(k.norm(&tx), &nx * &nx);
                let num = rp.type_norm_numeric(&x);
                let ex = k.embed(&tx, 0);
                let scale = 1.0 + ex.abs().to_f64();
                assert!(num.sub(&ex).abs().to_f64() / scale < 1e-30);
            }
        }
    }

    #[test]
    fn type_norm_ideals() {
        let rp = ReflexPair::from_params(53, 500).unwrap();
        let (k, kr) = (&rp.base.field, &rp.reflex.field);
        assert_eq!(rp.type_norm_ideal(&Ideal::unit(kr)).unwrap(), Ideal::unit(k));
        let mut primes = Vec::new();
        for p in [2u64, 3, 5, 7, 11] {
            primes.extend(decompose(kr, p, 1).unwrap());
        }
        let tns: Vec<Ideal> = primes.iter().map(|q| rp.type_norm_ideal(&q.ideal).unwrap()).collect();
        for (q, t) in primes.iter().zip(&tns) {
            let nq = q.ideal.norm();
            assert_eq!(t.mul(k, &t.conj(k)), Ideal::from_gens(k, &[k.from_rat(&nq)]).unwrap());
        }
        for i in 0..primes.len() {
            let j = (i * 3 + 1) % primes.len();
            let prod = primes[i].ideal.mul(kr, &primes[j].ideal);
            assert_eq!(rp.type_norm_ideal(&prod).unwrap(), tns[i].mul(k, &tns[j]));
        }
        let x = kr.from_power_i64(&[3, 1, 0, 1]);
        let px = Ideal::principal(kr, &x).unwrap();
        assert_eq!(rp.type_norm_ideal(&px).unwrap(), Ideal::principal(k, &rp.type_norm_elem(&x)).unwrap());
        let inv = primes[0].ideal.inv(kr);
        assert_eq!(rp.type_norm_ideal(&inv).unwrap(), tns[0].inv(k));
    }

    #[test]
    fn relative_norms() {
        let f = CmField::from_i64(53, 500).unwrap();
        let k = &f.field;
        let k0 = f.real_subfield().unwrap();
        for p in [2u64, 3, 7, 13] {
            for q in decompose(k, p, 0).unwrap() {
                let n = relative_norm(k, &k0, &q.ideal).unwrap();
                let up = Ideal::from_gens(k, &n.basis().iter().map(|e| crate::nfield::units::embed_subfield(k, &k0, e)).collect::<Vec<_>>()).unwrap();
                assert_eq!(up, q.ideal.mul(k, &q.ideal.conj(k)));
            }
        }
        let x = k.from_power_i64(&[1, 2, 0, 1]);
        let n = relative_norm(k, &k0, &Ideal::principal(k, &x).unwrap()).unwrap();
        assert_eq!(n, Ideal::principal(&k0, &relative_norm_elem(k, &k0, &x).unwrap()).unwrap());
    }
}
