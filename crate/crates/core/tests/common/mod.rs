//! Strategies, oracles and property bodies shared by the property
//! suites and the acceptance run.
#![allow(dead_code)]

use std::collections::HashSet;

use cmray::arith::Int;
use cmray::cm::ReflexPair;
use cmray::fgab::matrix::{hnf, pivot_rows, smith, solve_hnf, IntMatrix};
use cmray::fgab::{group_from_relations, AbGroup, Morphism};
use cmray::ideals::{decompose, ClassGroup, Ideal, RayClassGroup};
use cmray::nfield::units::UnitGroup;
use cmray::nfield::{Elem, NumberField};
use cmray::Config;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

pub type CaseResult = Result<(), TestCaseError>;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn matrix(rows: usize, cols: usize, vals: &[i64]) -> IntMatrix {
    let r: Vec<Vec<Int>> = (0..rows).map(|i| (0..cols).map(|j| int(vals[i * cols + j])).collect()).collect();
    IntMatrix::from_rows(&r)
}

pub fn arb_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| prop::collection::vec(-40i64..=40, r * c).prop_map(move |v| matrix(r, c, &v)))
}

pub fn hnf_case(a: &IntMatrix) -> CaseResult {
    let h = hnf(a);
    // echelon shape with strictly increasing pivot rows
    let piv = pivot_rows(&h);
    prop_assert!(piv.windows(2).all(|w| w[0] < w[1]));
    for (j, &r) in piv.iter().enumerate() {
        prop_assert!(h[(r, j)].is_positive());
    }
    // same lattice: columns of a lie in h, and h is the HNF of a | h
    for c in a.columns() {
        prop_assert!(solve_hnf(&h, &c).is_some());
    }
    prop_assert_eq!(hnf(&a.hcat(&h)), h.clone());
    prop_assert_eq!(hnf(&h), h);
    Ok(())
}

pub fn smith_case(a: &IntMatrix) -> CaseResult {
    let s = smith(a);
    let n = a.rows();
    prop_assert_eq!(s.u.mul(&s.u_inv), IntMatrix::identity(n));
    let nz: Vec<&Int> = s.diag.iter().filter(|d| !d.is_zero()).collect();
    prop_assert!(nz.iter().all(|d| d.is_positive()));
    prop_assert!(nz.windows(2).all(|w| w[1].is_multiple_of(w[0])));
    prop_assert!(s.diag.iter().skip_while(|d| !d.is_zero()).all(|d| d.is_zero()));
    // u a spans the lattice of diag(d)
    let ua = s.u.mul(a);
    let dcols: Vec<Vec<Int>> = (0..n).filter(|&i| !s.diag[i].is_zero()).map(|i| {
        let mut v = vec![Int::zero(); n];
        v[i] = s.diag[i].clone();
        v
    }).collect();
    let dm = if dcols.is_empty() { IntMatrix::zeros(n, 0) } else { IntMatrix::from_cols(n, &dcols) };
    if ua.is_zero() {
        prop_assert!(dcols.is_empty());
    } else {
        prop_assert_eq!(hnf(&ua), hnf(&dm));
    }
    // determinant check on square nonsingular inputs
    if a.rows() == a.cols() && !a.det().is_zero() {
        let prod: Int = s.diag.iter().product();
        prop_assert_eq!(prod, a.det().abs());
    }
    Ok(())
}

pub fn arb_group() -> impl Strategy<Value = AbGroup> {
    prop::collection::vec(1i64..=12, 1..=4)
        .prop_filter("order at most 512", |f| f.iter().product::<i64>() <= 512)
        .prop_map(|f| {
            let d: Vec<Int> = f.iter().map(|&x| int(x)).collect();
            group_from_relations(d.len(), &IntMatrix::diagonal(&d)).group
        })
}

/// A well defined morphism: generator `i` of order `d_i` goes to a
/// multiple of `e / gcd(e, d_i)` for `e` the exponent of the target.
pub fn arb_morphism() -> impl Strategy<Value = Morphism> {
    (arb_group(), arb_group()).prop_flat_map(|(g, h)| {
        let n = g.invariants().len() * h.invariants().len().max(1);
        prop::collection::vec(0i64..1000, n).prop_map(move |raw| {
            let e = h.exponent().unwrap();
            let m = h.invariants().len();
            let imgs: Vec<Vec<Int>> = g
                .invariants()
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    let x: Vec<Int> = (0..m).map(|j| int(raw[i * m.max(1) + j])).collect();
                    let scale = &e / e.gcd(d);
                    h.scale(&scale, &h.reduce(&x))
                })
                .collect();
            Morphism::from_images(g.clone(), h.clone(), &imgs).unwrap()
        })
    })
}

pub fn first_isomorphism_case(f: &Morphism) -> CaseResult {
    let dom = f.domain.clone();
    let elems = dom.elements();
    let ker = f.kernel();
    let mut images = HashSet::new();
    let mut kcount = 0usize;
    for x in &elems {
        let y = f.apply(x);
        let is_zero = f.codomain.is_zero(&y);
        prop_assert_eq!(ker.contains(x), is_zero);
        if is_zero {
            kcount += 1;
        }
        images.insert(y);
    }
    prop_assert_eq!(ker.order().unwrap(), Int::from(kcount));
    let im = f.image();
    prop_assert_eq!(im.order().unwrap(), Int::from(images.len()));
    prop_assert_eq!(Int::from(elems.len()), Int::from(kcount) * Int::from(images.len()));
    let q = ker.quotient();
    let img = im.as_group();
    prop_assert_eq!(q.group.invariants(), img.group().invariants());
    Ok(())
}

pub fn arb_relations() -> impl Strategy<Value = (usize, Vec<i64>, Vec<i64>, Vec<i64>)> {
    (1usize..=3, prop::collection::vec(-6i64..=6, 9), prop::collection::vec(-20i64..=20, 3), prop::collection::vec(-20i64..=20, 3))
}

pub fn presentation_case(n: usize, vals: &[i64], w1: &[i64], w2: &[i64]) -> CaseResult {
    let rel = matrix(n, n, &vals[..n * n]);
    let det = rel.det().abs();
    prop_assume!(!det.is_zero() && det <= int(512));
    let p = group_from_relations(n, &rel);
    let g = p.group.clone();
    prop_assert_eq!(g.order().unwrap(), det.clone());
    let a: Vec<Int> = w1[..n].iter().map(|&x| int(x)).collect();
    let b: Vec<Int> = w2[..n].iter().map(|&x| int(x)).collect();
    let ab: Vec<Int> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    prop_assert_eq!(p.dlog(&ab), g.add(&p.dlog(&a), &p.dlog(&b)));
    for c in rel.columns() {
        prop_assert!(g.is_zero(&p.dlog(&c)));
    }
    // every element is named by the word built from generator words
    let mut seen = HashSet::new();
    for x in g.elements() {
        let mut w = vec![Int::zero(); n];
        for (i, xi) in x.iter().enumerate() {
            for (wj, gj) in w.iter_mut().zip(p.generator_word(i)) {
                *wj += xi * gj;
            }
        }
        prop_assert_eq!(p.dlog(&w), x.clone());
        seen.insert(x);
    }
    prop_assert_eq!(Int::from(seen.len()), det);
    Ok(())
}

// ---- number fields ----

pub struct FieldData {
    pub k: NumberField,
    pub cl: ClassGroup,
    pub units: UnitGroup,
}

pub fn field(a: i64, b: i64) -> FieldData {
    let k = NumberField::from_coeffs(&[b, 0, a, 0, 1]).unwrap();
    let cl = ClassGroup::compute(&k, &Config::default()).unwrap();
    let units = UnitGroup::compute(&k).unwrap();
    FieldData { k, cl, units }
}

fn reduce_mod(x: &Elem, m: &Int) -> Vec<Int> {
    assert!(x.den.is_one());
    x.num.iter().map(|c| c.mod_floor(m)).collect()
}

/// `|(O/m)^x|` by enumeration of all residues, a residue being a unit
/// exactly when its norm is prime to `m`.
pub fn brute_phi(k: &NumberField, m: i64) -> usize {
    let n = k.degree();
    let total = (m as usize).pow(n as u32);
    let mut count = 0;
    for idx in 0..total {
        let mut c = Vec::with_capacity(n);
        let mut t = idx;
        for _ in 0..n {
            c.push(int((t % m as usize) as i64));
            t /= m as usize;
        }
        let x = Elem::integral(c);
        let nm = k.norm(&x);
        if nm.numer().gcd(&int(m)).is_one() {
            count += 1;
        }
    }
    count
}

/// Size of the image of `O^x` in `(O/m)^x` by closure under the
/// generators.
pub fn brute_unit_image(k: &NumberField, units: &UnitGroup, m: i64) -> usize {
    let mm = int(m);
    let gens: Vec<Elem> = units.generators().into_iter().chain(units.generators().into_iter().filter_map(|u| k.inv(&u).ok())).collect();
    let one = reduce_mod(&k.one(), &mm);
    let mut seen: Vec<Vec<Int>> = vec![one.clone()];
    let mut set: HashSet<Vec<Int>> = HashSet::from([one]);
    let mut i = 0;
    while i < seen.len() {
        for g in &gens {
            let y = k.mul(&Elem::integral(seen[i].clone()), g);
            let r = reduce_mod(&y, &mm);
            if set.insert(r.clone()) {
                seen.push(r);
            }
        }
        i += 1;
    }
    seen.len()
}

/// `|Cl(m)| = h |(O/m)^x| / |image of O^x|` on the example fields.
pub fn ray_class_orders_case() {
    for (a, b) in [(53i64, 500i64), (106, 809), (65, 425), (130, 2525)] {
        let f = field(a, b);
        for m in [1i64, 2, 3, 4, 5, 6, 8] {
            let ray = RayClassGroup::from_class_group(&f.k, f.cl.clone(), &int(m), false, &Config::default()).unwrap();
            let phi = if m == 1 { 1 } else { brute_phi(&f.k, m) };
            let img = if m == 1 { 1 } else { brute_unit_image(&f.k, &f.units, m) };
            assert_eq!(phi % img, 0);
            let want = f.cl.order() * Int::from(phi / img);
            assert_eq!(ray.order(), want, "x^4 + {a}x^2 + {b}, m = {m}");
        }
    }
}

pub fn narrow_ray_orders_case() {
    // for a real quadratic field the sign vector doubles the count twice
    for (a, b) in [(53i64, 500i64), (106, 809)] {
        let k0 = NumberField::from_coeffs(&[b, a, 1]).unwrap();
        let cl = ClassGroup::compute(&k0, &Config::default()).unwrap();
        let units = UnitGroup::compute(&k0).unwrap();
        for m in [1i64, 2, 3, 4, 5] {
            let ray = RayClassGroup::from_class_group(&k0, cl.clone(), &int(m), true, &Config::default()).unwrap();
            let mm = int(m);
            let phi = if m == 1 { 1 } else { brute_phi(&k0, m) };
            // closure of unit images in (O/m)^x x {+-1}^2
            let gens: Vec<Elem> = units.generators().into_iter().flat_map(|u| [k0.inv(&u).unwrap(), u]).collect();
            let key = |x: &Elem| -> (Vec<Int>, Vec<i8>) { (if m == 1 { vec![] } else { reduce_mod(x, &mm) }, k0.real_signs(x).unwrap()) };
            let mut seen = vec![k0.one()];
            let mut set = HashSet::from([key(&k0.one())]);
            let mut i = 0;
            while i < seen.len() && seen.len() < 100_000 {
                for g in &gens {
                    let y = k0.mul(&seen[i], g);
                    if set.insert(key(&y)) {
                        seen.push(y);
                    }
                }
                i += 1;
            }
            let want = cl.order() * Int::from(phi * 4) / Int::from(set.len());
            assert_eq!(ray.order(), want, "real field of x^4 + {a}x^2 + {b}, m = {m}");
        }
    }
}

pub const SMALL_PRIMES: [u64; 25] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];

pub fn type_norm_case(rp: &ReflexPair, p: u64, j: usize, q: u64, l: usize) -> CaseResult {
    let kr = &rp.reflex.field;
    let k = &rp.base.field;
    let ps = decompose(kr, p, 0).unwrap();
    let b = &ps[j % ps.len()].ideal;
    let t = rp.type_norm_ideal(b).unwrap();
    let nb = b.norm();
    prop_assert_eq!(t.norm(), &nb * &nb);
    let nbo = Ideal::from_int(k, nb.numer()).unwrap();
    prop_assert_eq!(t.mul(k, &t.conj(k)), nbo);
    let qs = decompose(kr, q, 0).unwrap();
    let c = &qs[l % qs.len()].ideal;
    let tc = rp.type_norm_ideal(c).unwrap();
    prop_assert_eq!(rp.type_norm_ideal(&b.mul(kr, c)).unwrap(), t.mul(k, &tc));
    Ok(())
}

