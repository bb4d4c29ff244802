//! Short elements of ideals and principal ideal testing.
//!
//! For unit rank one the search twists the Minkowski embedding by
//! `(s, -s)` over a grid covering one period of the log unit lattice, so
//! that some twist makes a generator nearly balanced and therefore one of
//! the few shortest twisted vectors.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Ideal;
use crate::arith::{Int, Rat};
use crate::lattice::{fincke_pohst, lll_f64, lll_gram};
use crate::nfield::units::UnitGroup;
use crate::nfield::{Elem, NumberField};
use crate::{Error, Result};

const GRID_STEP: f64 = 0.5;

fn combine(coeffs: &[Int], vecs: &[Vec<Int>]) -> Vec<Int> {
    let n = vecs[0].len();
    let mut out = vec![Int::zero(); n];
    for (c, v) in coeffs.iter().zip(vecs) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    out
}

/// T2-LLL reduced basis of an integral lattice given by columns.
pub fn reduced_basis(k: &NumberField, cols: &[Vec<Int>]) -> Result<Vec<Vec<Int>>> {
    let g = k.t2_gram(cols).ok_or_else(|| Error::InvalidInput("field has no positive definite T2 form".into()))?;
    let (t, _) = lll_gram(&g);
    Ok(t.iter().map(|row| combine(row, cols)).collect())
}

fn twisted_coords(k: &NumberField, v: &[Int], twist: &[f64]) -> Vec<f64> {
    let (r1, r2) = k.signature();
    let x = Elem::integral(v.to_vec());
    let mut out = Vec::with_capacity(k.degree());
    for p in 0..r1 + r2 {
        let (re, im) = k.embed_f64(&x, p);
        let s = libm::exp(twist[p]);
        if p < r1 {
            out.push(s * re);
        } else {
            out.push(core::f64::consts::SQRT_2 * s * re);
            out.push(core::f64::consts::SQRT_2 * s * im);
        }
    }
    out
}

/// Reduce the integral lattice `cols` for the twisted T2 form, returning
/// exact basis vectors and the float Gram matrix.
fn twisted_reduce(k: &NumberField, cols: &[Vec<Int>], twist: &[f64]) -> (Vec<Vec<Int>>, Vec<Vec<f64>>) {
    let n = cols.len();
    let mut vecs = cols.to_vec();
    for _ in 0..3 {
        let mut tw: Vec<Vec<f64>> = vecs.iter().map(|v| twisted_coords(k, v, twist)).collect();
        let mut u: Vec<Vec<Int>> = (0..n)
            .map(|i| {
                let mut e = vec![Int::zero(); n];
                e[i] = Int::one();
                e
            })
            .collect();
        lll_f64(&mut tw, &mut u);
        let unchanged = u.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, c)| if i == j { c.is_one() } else { c.is_zero() }));
        vecs = u.iter().map(|r| combine(r, &vecs)).collect();
        if unchanged {
            break;
        }
    }
    let tw: Vec<Vec<f64>> = vecs.iter().map(|v| twisted_coords(k, v, twist)).collect();
    let gram = (0..n).map(|i| (0..n).map(|j| tw[i].iter().zip(&tw[j]).map(|(a, b)| a * b).sum()).collect()).collect();
    (vecs, gram)
}

/// Elements of `I` (as exact elements) whose twisted T2 value is at
/// most `bound`. `None` when more than `cap` qualify.
pub fn twisted_short_elements(k: &NumberField, ideal: &Ideal, twist: &[f64], bound: f64, cap: usize) -> Result<Option<Vec<Elem>>> {
    let base = reduced_basis(k, &ideal.num.columns())?;
    let (vecs, gram) = twisted_reduce(k, &base, twist);
    let Some(found) = fincke_pohst(&gram, bound, cap) else { return Ok(None) };
    Ok(Some(
        found
            .into_iter()
            .map(|(x, _)| {
                let c: Vec<Int> = x.iter().map(|&v| Int::from(v)).collect();
                Elem::new(combine(&c, &vecs), ideal.den.clone())
            })
            .collect(),
    ))
}

/// Elements of the integral ideal `I` with twisted T2 value at most
/// `factor` times the smallest reduced basis vector. Falls back to the
/// reduced basis when more than `cap` qualify.
pub fn short_elements(k: &NumberField, ideal: &Ideal, twist: &[f64], factor: f64, cap: usize) -> Result<Vec<Elem>> {
    let base = reduced_basis(k, &ideal.num.columns())?;
    let (vecs, gram) = twisted_reduce(k, &base, twist);
    let m0 = (0..gram.len()).map(|i| gram[i][i]).fold(f64::INFINITY, f64::min);
    let to_elem = |c: &[Int]| Elem::new(combine(c, &vecs), ideal.den.clone());
    match fincke_pohst(&gram, factor * m0, cap) {
        Some(found) => Ok(found
            .into_iter()
            .map(|(x, _)| to_elem(&x.iter().map(|&v| Int::from(v)).collect::<Vec<_>>()))
            .collect()),
        None => Ok(vecs.iter().map(|v| Elem::new(v.clone(), ideal.den.clone())).collect()),
    }
}

/// `|log |sigma_0(eps)||` for the fundamental unit, or `None`
/// for unit rank zero.
pub fn unit_period(k: &NumberField, units: &UnitGroup) -> Result<Option<f64>> {
    rank_one_lambda(k, units)
}

fn rank_one_lambda(k: &NumberField, units: &UnitGroup) -> Result<Option<f64>> {
    match &units.fundamental {
        None => Ok(None),
        Some(e) => {
            if k.places() != 2 {
                return Err(Error::InvalidInput("unsupported unit rank".into()));
            }
            Ok(Some(k.log_embedding(e)[0].abs()))
        }
    }
}

/// A generator of `I` if it is principal.
pub fn principal_generator(k: &NumberField, units: &UnitGroup, ideal: &Ideal) -> Result<Option<Elem>> {
    let n = k.degree();
    if n == 1 {
        return Ok(Some(k.from_rat(&ideal.min_rational())));
    }
    let lat = Ideal { num: ideal.num.clone(), den: Int::one() };
    let nn = lat.num_norm();
    let nf = nn.to_f64().ok_or_else(|| Error::Resource("ideal norm too large".into()))?;
    let base = n as f64 * libm::pow(nf, 2.0 / n as f64);
    let target = Rat::from(nn.clone());
    let check = |cands: Vec<Elem>| -> Option<Elem> {
        cands.into_iter().find(|x| k.norm(x).abs() == target)
    };
    let finish = |x: Elem| Elem::new(x.num, ideal.den.clone());
    match rank_one_lambda(k, units)? {
        None => {
            let found = twisted_short_elements(k, &lat, &vec![0.0; k.places()], base * (1.0 + 1e-9), 10_000)?
                .ok_or_else(|| Error::Resource("too many short vectors".into()))?;
            Ok(check(found).map(finish))
        }
        Some(lambda) => {
            let half = GRID_STEP / 2.0;
            let bound = base * libm::cosh(half) * (1.0 + 1e-9);
            let steps = libm::ceil(2.0 * lambda / GRID_STEP) as i64;
            // s ranges over [-lambda/2, lambda/2] in steps of GRID_STEP / 2
            let reduced = reduced_basis(k, &lat.num.columns())?;
            for j in 0..=steps {
                let s = -lambda / 2.0 + j as f64 * GRID_STEP / 2.0;
                let (vecs, gram) = twisted_reduce(k, &reduced, &[s, -s]);
                let found = fincke_pohst(&gram, bound, 10_000).ok_or_else(|| Error::Resource("too many short vectors".into()))?;
                let els: Vec<Elem> = found
                    .into_iter()
                    .map(|(x, _)| {
                        let c: Vec<Int> = x.iter().map(|&v| Int::from(v)).collect();
                        Elem::integral(combine(&c, &vecs))
                    })
                    .collect();
                if let Some(x) = check(els) {
                    return Ok(Some(finish(x)));
                }
            }
            Ok(None)
        }
    }
}

pub fn is_principal(k: &NumberField, units: &UnitGroup, ideal: &Ideal) -> Result<bool> {
    Ok(principal_generator(k, units, ideal)?.is_some())
}

/// An integral ideal `J = y I` of small norm in the class of `I`.
pub fn reduce(k: &NumberField, ideal: &Ideal) -> Result<(Ideal, Elem)> {
    let inv = ideal.inv(k);
    let vecs = reduced_basis(k, &inv.num.columns())?;
    let mut best: Option<(Ideal, Elem)> = None;
    for v in vecs {
        let y = Elem::new(v, inv.den.clone());
        if y.is_zero() {
            continue;
        }
        let j = ideal.mul_elem(k, &y)?;
        if best.as_ref().is_none_or(|(b, _)| j.norm() < b.norm()) {
            best = Some((j, y));
        }
    }
    best.ok_or_else(|| Error::Inconsistent("empty lattice".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::decompose;

    #[test]
    fn principal_detection_imaginary_quadratic() {
        // Q(sqrt(-5)): primes over 2 and 3 are not principal, over 29 they are
        let k = NumberField::from_coeffs(&[5, 0, 1]).unwrap();
        let u = UnitGroup::compute(&k).unwrap();
        let p2 = &decompose(&k, 2, 0).unwrap()[0];
        assert!(!is_principal(&k, &u, &p2.ideal).unwrap());
        let sq = p2.ideal.pow(&k, 2);
        let g = principal_generator(&k, &u, &sq).unwrap().unwrap();
        assert_eq!(Ideal::principal(&k, &g).unwrap(), sq);
        for q in decompose(&k, 29, 0).unwrap() {
            let g = principal_generator(&k, &u, &q.ideal).unwrap().unwrap();
            assert_eq!(Ideal::principal(&k, &g).unwrap(), q.ideal);
        }
    }

    #[test]
    fn principal_detection_cm_quartic() {
        let k = NumberField::from_coeffs(&[500, 0, 53, 0, 1]).unwrap();
        let u = UnitGroup::compute(&k).unwrap();
        // a large principal ideal built from a product of units and a small element
        let a = k.gen();
        let x = k.add(&k.mul(&a, &a), &k.sub(&a, &k.from_i64(3)));
        let e = u.fundamental.clone().unwrap();
        let y = k.mul(&x, &k.pow(&e, 3).unwrap());
        let i = Ideal::principal(&k, &y).unwrap();
        let g = principal_generator(&k, &u, &i).unwrap().unwrap();
        assert_eq!(Ideal::principal(&k, &g).unwrap(), i);
        let p7 = Ideal::from_gens(&k, &[k.from_i64(7), k.sub(&a, &k.from_i64(2))]).unwrap();
        assert!(!is_principal(&k, &u, &p7).unwrap());
    }

    #[test]
    fn reduction_keeps_class() {
        let k = NumberField::from_coeffs(&[500, 0, 53, 0, 1]).unwrap();
        let a = k.gen();
        let p7 = Ideal::from_gens(&k, &[k.from_i64(7), k.sub(&a, &k.from_i64(2))]).unwrap();
        let big = p7.pow(&k, 5);
        let (j, y) = reduce(&k, &big).unwrap();
        assert!(j.is_integral());
        assert_eq!(big.mul_elem(&k, &y).unwrap(), j);
        assert!(j.norm() < big.norm());
    }
}
