//! Finitely generated abelian groups in Smith form, their morphisms and
//! subgroups, and extensions.
//!
//! A group `Z/d_1 x ... x Z/d_r` is stored by its invariant factors in
//! descending order under divisibility (`d_r | ... | d_1`), with `0`
//! standing for an infinite cyclic factor. Factors equal to 1 are never
//! stored. Elements are coordinate vectors reduced modulo the factors.
//!
//! Subgroups are full sublattices of `Z^r` containing the relation lattice
//! `diag(d) Z^r`, kept in Hermite form; every subgroup computation is a
//! lattice computation on these.

pub mod matrix;

use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use matrix::IntMatrix;
use matrix::{hnf, kernel, smith, solve_hnf};

use crate::arith::Int;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbGroup {
    cyc: Vec<Int>,
}

impl AbGroup {
    /// Group with the given invariant factors. Factors equal to 1 are
    /// dropped; the rest must form a divisibility chain after sorting.
    pub fn new(factors: &[Int]) -> Result<Self> {
        let mut c: Vec<Int> = factors.iter().filter(|d| !d.is_one()).cloned().collect();
        if c.iter().any(|d| d.is_negative()) {
            return Err(Error::InvalidInput("negative invariant factor".into()));
        }
        c.sort_by(|a, b| match (a.is_zero(), b.is_zero()) {
            (true, true) => core::cmp::Ordering::Equal,
            (true, false) => core::cmp::Ordering::Less,
            (false, true) => core::cmp::Ordering::Greater,
            _ => b.cmp(a),
        });
        for w in c.windows(2) {
            if !w[1].is_zero() && !w[0].is_multiple_of(&w[1]) {
                return Err(Error::InvalidInput("invariant factors do not form a divisibility chain".into()));
            }
        }
        Ok(AbGroup { cyc: c })
    }

    pub fn trivial() -> Self {
        AbGroup { cyc: Vec::new() }
    }

    pub fn cyclic(n: i64) -> Self {
        AbGroup::new(&[Int::from(n)]).unwrap()
    }

    pub fn invariants(&self) -> &[Int] {
        &self.cyc
    }

    pub fn rank(&self) -> usize {
        self.cyc.len()
    }

    pub fn is_finite(&self) -> bool {
        self.cyc.iter().all(|d| !d.is_zero())
    }

    pub fn is_trivial(&self) -> bool {
        self.cyc.is_empty()
    }

    /// Order, or `None` for an infinite group.
    pub fn order(&self) -> Option<Int> {
        if self.is_finite() {
            Some(self.cyc.iter().product())
        } else {
            None
        }
    }

    pub fn exponent(&self) -> Option<Int> {
        if self.is_finite() {
            Some(self.cyc.first().cloned().unwrap_or_else(Int::one))
        } else {
            None
        }
    }

    pub fn zero(&self) -> Vec<Int> {
        vec![Int::zero(); self.rank()]
    }

    pub fn reduce(&self, x: &[Int]) -> Vec<Int> {
        assert_eq!(x.len(), self.rank());
        x.iter()
            .zip(self.cyc.iter())
            .map(|(v, d)| if d.is_zero() { v.clone() } else { v.mod_floor(d) })
            .collect()
    }

    pub fn add(&self, a: &[Int], b: &[Int]) -> Vec<Int> {
        let s: Vec<Int> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.reduce(&s)
    }

    pub fn neg(&self, a: &[Int]) -> Vec<Int> {
        let s: Vec<Int> = a.iter().map(|x| -x).collect();
        self.reduce(&s)
    }

    pub fn scale(&self, k: &Int, a: &[Int]) -> Vec<Int> {
        let s: Vec<Int> = a.iter().map(|x| x * k).collect();
        self.reduce(&s)
    }

    pub fn is_zero(&self, a: &[Int]) -> bool {
        self.reduce(a).iter().all(|v| v.is_zero())
    }

    /// Order of an element (`None` if infinite).
    pub fn element_order(&self, a: &[Int]) -> Option<Int> {
        let a = self.reduce(a);
        let mut o = Int::one();
        for (v, d) in a.iter().zip(self.cyc.iter()) {
            if d.is_zero() {
                if !v.is_zero() {
                    return None;
                }
                continue;
            }
            let ord = d / v.gcd(d);
            o = o.lcm(&ord);
        }
        Some(o)
    }

    /// All elements of a finite group (for small groups only).
    pub fn elements(&self) -> Vec<Vec<Int>> {
        assert!(self.is_finite());
        let mut out = vec![self.zero()];
        for (i, d) in self.cyc.iter().enumerate() {
            let d = d.to_usize().expect("group too large to enumerate");
            let mut next = Vec::with_capacity(out.len() * d);
            for e in &out {
                for k in 0..d {
                    let mut f = e.clone();
                    f[i] = Int::from(k);
                    next.push(f);
                }
            }
            out = next;
        }
        out
    }

    /// Relation lattice `diag(d)` as a matrix (zero columns for free factors).
    pub fn relation_matrix(&self) -> IntMatrix {
        IntMatrix::diagonal(&self.cyc)
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup::from_lattice(self.clone(), &IntMatrix::identity(self.rank()))
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup::from_lattice(self.clone(), &self.relation_matrix())
    }

    /// Subgroup generated by the given elements.
    pub fn subgroup(&self, gens: &[Vec<Int>]) -> Subgroup {
        let mut m = self.relation_matrix();
        if !gens.is_empty() {
            m = m.hcat(&IntMatrix::from_cols(self.rank(), gens));
        }
        Subgroup::from_lattice(self.clone(), &m)
    }

    /// `G[n] = {x : n x = 0}`.
    pub fn torsion(&self, n: &Int) -> Subgroup {
        let gens: Vec<Vec<Int>> = self
            .cyc
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero())
            .map(|(i, d)| {
                let mut e = self.zero();
                e[i] = d / d.gcd(n);
                e
            })
            .collect();
        self.subgroup(&gens)
    }

    pub fn structure_string(&self) -> alloc::string::String {
        use core::fmt::Write;
        let mut s = alloc::string::String::new();
        if self.cyc.is_empty() {
            s.push('1');
        }
        for (i, d) in self.cyc.iter().enumerate() {
            if i > 0 {
                s.push_str(" x ");
            }
            if d.is_zero() {
                s.push('Z');
            } else {
                write!(s, "C{}", d).unwrap();
            }
        }
        s
    }
}

/// Presentation `Z^n / R` reduced to Smith form: a concrete group plus the
/// maps between words in the `n` input generators and group coordinates.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub group: AbGroup,
    n_gens: usize,
    /// rank x n: word to coordinates (before reduction)
    to_group: IntMatrix,
    /// n x rank: column i is the word of standard generator i
    words: IntMatrix,
}

impl Presentation {
    pub fn n_gens(&self) -> usize {
        self.n_gens
    }

    /// Coordinates of the element named by `word`.
    pub fn dlog(&self, word: &[Int]) -> Vec<Int> {
        assert_eq!(word.len(), self.n_gens);
        self.group.reduce(&self.to_group.mul_vec(word))
    }

    /// Word in the input generators for standard generator `i`.
    pub fn generator_word(&self, i: usize) -> Vec<Int> {
        self.words.col(i)
    }

    /// Matrix (rank x n) sending words to coordinates.
    pub fn word_map(&self) -> &IntMatrix {
        &self.to_group
    }

    /// Matrix (n x rank) of generator words.
    pub fn words(&self) -> &IntMatrix {
        &self.words
    }
}

/// `Z^n` modulo the column span of `rel` (`n` rows).
pub fn group_from_relations(n: usize, rel: &IntMatrix) -> Presentation {
    assert_eq!(rel.rows(), n);
    let s = smith(rel);
    // keep rows with diagonal != 1, ordered: free first, then descending
    let mut keep: Vec<usize> = (0..n).filter(|&i| !s.diag[i].is_one()).collect();
    keep.sort_by(|&a, &b| {
        let (x, y) = (&s.diag[a], &s.diag[b]);
        match (x.is_zero(), y.is_zero()) {
            (true, true) => a.cmp(&b),
            (true, false) => core::cmp::Ordering::Less,
            (false, true) => core::cmp::Ordering::Greater,
            _ => y.cmp(x).then(b.cmp(&a)),
        }
    });
    let cyc: Vec<Int> = keep.iter().map(|&i| s.diag[i].clone()).collect();
    let mut to_group = s.u.select_rows(&keep);
    for (r, d) in cyc.iter().enumerate() {
        if !d.is_zero() {
            for j in 0..n {
                let v = to_group[(r, j)].mod_floor(d);
                to_group[(r, j)] = v;
            }
        }
    }
    let mut words = s.u_inv.select_cols(&keep);
    // shorten generator words modulo the relation lattice when it is full rank
    if rel.cols() > 0 {
        let h = hnf(rel);
        if h.cols() == n {
            for c in 0..words.cols() {
                let w = matrix::reduce_mod_hnf(&h, &words.col(c));
                for i in 0..n {
                    words[(i, c)] = w[i].clone();
                }
            }
        }
    }
    Presentation {
        group: AbGroup { cyc },
        n_gens: n,
        to_group: if keep.is_empty() { IntMatrix::zeros(0, n) } else { to_group },
        words,
    }
}

#[derive(Clone, Debug)]
pub struct Morphism {
    pub domain: AbGroup,
    pub codomain: AbGroup,
    /// codomain.rank x domain.rank
    pub matrix: IntMatrix,
}

impl Morphism {
    pub fn new(domain: AbGroup, codomain: AbGroup, matrix: IntMatrix) -> Result<Self> {
        if matrix.rows() != codomain.rank() || matrix.cols() != domain.rank() {
            return Err(Error::InvalidInput("morphism matrix has wrong shape".into()));
        }
        let f = Morphism { domain, codomain, matrix };
        // well defined: d_i e_i must map to zero
        for (i, d) in f.domain.cyc.iter().enumerate() {
            let mut e = f.domain.zero();
            e[i] = d.clone();
            if !f.codomain.is_zero(&f.matrix.mul_vec(&e)) {
                return Err(Error::Inconsistent("matrix does not define a homomorphism".into()));
            }
        }
        Ok(f)
    }

    /// Build from the images of the standard generators.
    pub fn from_images(domain: AbGroup, codomain: AbGroup, images: &[Vec<Int>]) -> Result<Self> {
        let m = if images.is_empty() {
            IntMatrix::zeros(codomain.rank(), 0)
        } else {
            IntMatrix::from_cols(codomain.rank(), images)
        };
        Self::new(domain, codomain, m)
    }

    pub fn apply(&self, x: &[Int]) -> Vec<Int> {
        self.codomain.reduce(&self.matrix.mul_vec(x))
    }

    pub fn compose(&self, first: &Morphism) -> Result<Morphism> {
        Morphism::new(first.domain.clone(), self.codomain.clone(), self.matrix.mul(&first.matrix))
    }

    pub fn kernel(&self) -> Subgroup {
        self.inverse_image(&self.codomain.trivial_subgroup())
    }

    pub fn image(&self) -> Subgroup {
        let gens = self.matrix.columns();
        self.codomain.subgroup(&gens)
    }

    /// `{x : f(x) in s}`.
    pub fn inverse_image(&self, s: &Subgroup) -> Subgroup {
        assert_eq!(s.ambient, self.codomain);
        let n = self.domain.rank();
        let m = self.codomain.rank();
        if m == 0 {
            return self.domain.whole();
        }
        let b = &s.lattice;
        let mut a = self.matrix.clone();
        let mut negb = b.clone();
        for i in 0..negb.rows() {
            for j in 0..negb.cols() {
                let v = -&negb[(i, j)];
                negb[(i, j)] = v;
            }
        }
        a = a.hcat(&negb);
        let k = kernel(&a);
        let mut gens: Vec<Vec<Int>> = k.columns().into_iter().map(|c| c[..n].to_vec()).collect();
        for (i, d) in self.domain.cyc.iter().enumerate() {
            let mut e = vec![Int::zero(); n];
            e[i] = d.clone();
            gens.push(e);
        }
        gens.retain(|g| g.iter().any(|v| !v.is_zero()));
        Subgroup::from_lattice(self.domain.clone(), &IntMatrix::from_cols(n, &gens))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    pub ambient: AbGroup,
    /// Hermite form of the lattice (contains `diag(d)`)
    lattice: IntMatrix,
}

impl Subgroup {
    pub fn from_lattice(ambient: AbGroup, gens: &IntMatrix) -> Self {
        let r = ambient.rank();
        let mut m = ambient.relation_matrix().hcat(gens);
        // drop zero columns before the normal form
        let cols: Vec<Vec<Int>> = m.columns().into_iter().filter(|c| c.iter().any(|v| !v.is_zero())).collect();
        m = if cols.is_empty() { IntMatrix::zeros(r, 0) } else { IntMatrix::from_cols(r, &cols) };
        let lattice = if m.cols() == 0 { m } else { hnf(&m) };
        Subgroup { ambient, lattice }
    }

    pub fn lattice(&self) -> &IntMatrix {
        &self.lattice
    }

    pub fn contains(&self, x: &[Int]) -> bool {
        if self.lattice.cols() == 0 {
            return x.iter().all(|v| v.is_zero());
        }
        solve_hnf(&self.lattice, x).is_some()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        assert_eq!(self.ambient, other.ambient);
        self.lattice.columns().iter().all(|c| other.contains(c))
    }

    /// Order of the subgroup (`None` if infinite).
    pub fn order(&self) -> Option<Int> {
        let amb = self.ambient.order()?;
        let det: Int = (0..self.lattice.cols()).map(|j| self.lattice[(j, j)].clone()).product();
        Some(amb / det)
    }

    pub fn index(&self) -> Option<Int> {
        if self.lattice.cols() < self.ambient.rank() {
            return None;
        }
        Some((0..self.lattice.cols()).map(|j| self.lattice[(j, j)].clone()).product())
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        assert_eq!(self.ambient, other.ambient);
        let r = self.ambient.rank();
        if r == 0 {
            return self.clone();
        }
        // L1 ∩ L2 = B1 { y : B1 y in L2 }
        let b1 = &self.lattice;
        let mut a = b1.clone();
        let mut negb = other.lattice.clone();
        for i in 0..negb.rows() {
            for j in 0..negb.cols() {
                let v = -&negb[(i, j)];
                negb[(i, j)] = v;
            }
        }
        a = a.hcat(&negb);
        let k = kernel(&a);
        let gens: Vec<Vec<Int>> = k.columns().into_iter().map(|c| b1.mul_vec(&c[..b1.cols()])).collect();
        let m = if gens.is_empty() { IntMatrix::zeros(r, 0) } else { IntMatrix::from_cols(r, &gens) };
        Subgroup::from_lattice(self.ambient.clone(), &m)
    }

    pub fn sum(&self, other: &Subgroup) -> Subgroup {
        Subgroup::from_lattice(self.ambient.clone(), &self.lattice.hcat(&other.lattice))
    }

    /// Generators (as ambient elements) of the subgroup.
    pub fn generators(&self) -> Vec<Vec<Int>> {
        self.lattice
            .columns()
            .into_iter()
            .map(|c| self.ambient.reduce(&c))
            .filter(|c| c.iter().any(|v| !v.is_zero()))
            .collect()
    }

    /// The quotient `ambient / self`; its `dlog` takes ambient coordinates.
    pub fn quotient(&self) -> Presentation {
        group_from_relations(self.ambient.rank(), &self.lattice)
    }

    /// The subgroup as an abstract group with an embedding into the ambient.
    pub fn as_group(&self) -> SubgroupGroup {
        let r = self.ambient.rank();
        let b = self.lattice.clone();
        let k = b.cols();
        // relations among the columns of b: c with b c in diag(d) Z^r
        let rel_gens = if r == 0 {
            Vec::new()
        } else {
            let mut a = b.clone();
            let mut nd = self.ambient.relation_matrix();
            for i in 0..r {
                let v = -&nd[(i, i)];
                nd[(i, i)] = v;
            }
            a = a.hcat(&nd);
            kernel(&a).columns().into_iter().map(|c| c[..k].to_vec()).collect::<Vec<_>>()
        };
        let rel = if rel_gens.is_empty() { IntMatrix::zeros(k, 0) } else { IntMatrix::from_cols(k, &rel_gens) };
        let pres = group_from_relations(k, &rel);
        let gens: Vec<Vec<Int>> = (0..pres.group.rank())
            .map(|i| self.ambient.reduce(&b.mul_vec(&pres.generator_word(i))))
            .collect();
        SubgroupGroup { sub: self.clone(), pres, gens }
    }
}

/// A subgroup viewed as a group in its own Smith form.
#[derive(Clone, Debug)]
pub struct SubgroupGroup {
    pub sub: Subgroup,
    pres: Presentation,
    /// ambient coordinates of the standard generators
    pub gens: Vec<Vec<Int>>,
}

impl SubgroupGroup {
    pub fn group(&self) -> &AbGroup {
        &self.pres.group
    }

    /// Coordinates of an ambient element lying in the subgroup.
    pub fn dlog(&self, x: &[Int]) -> Option<Vec<Int>> {
        let c = solve_hnf(self.sub.lattice(), x)?;
        Some(self.pres.dlog(&c))
    }

    /// Inclusion into the ambient group.
    pub fn inclusion(&self) -> Morphism {
        Morphism::from_images(self.group().clone(), self.sub.ambient.clone(), &self.gens).unwrap()
    }
}

/// Extension `1 -> A -> B -> C -> 1` assembled from the coordinates (in
/// `A`) of `order(c_j) * lift(c_j)` for each standard generator `c_j`.
#[derive(Clone, Debug)]
pub struct Extension {
    pub pres: Presentation,
    na: usize,
    nc: usize,
}

impl Extension {
    pub fn group(&self) -> &AbGroup {
        &self.pres.group
    }

    /// Coordinates in `B` of `iota(a) + sum_j c_j lift(c_j)`.
    pub fn dlog(&self, a_coords: &[Int], c_coords: &[Int]) -> Vec<Int> {
        assert_eq!(a_coords.len(), self.na);
        assert_eq!(c_coords.len(), self.nc);
        let mut w = a_coords.to_vec();
        w.extend_from_slice(c_coords);
        self.pres.dlog(&w)
    }

    pub fn generator_word(&self, i: usize) -> (Vec<Int>, Vec<Int>) {
        let w = self.pres.generator_word(i);
        (w[..self.na].to_vec(), w[self.na..].to_vec())
    }
}

pub fn extension_group(a: &AbGroup, c: &AbGroup, powers_in_a: &[Vec<Int>]) -> Result<Extension> {
    let na = a.rank();
    let nc = c.rank();
    if powers_in_a.len() != nc {
        return Err(Error::InvalidInput("one lifted power per generator of C is required".into()));
    }
    let n = na + nc;
    let mut rels: Vec<Vec<Int>> = Vec::new();
    for (i, d) in a.invariants().iter().enumerate() {
        if !d.is_zero() {
            let mut e = vec![Int::zero(); n];
            e[i] = d.clone();
            rels.push(e);
        }
    }
    for (j, g) in c.invariants().iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let p = &powers_in_a[j];
        if p.len() != na {
            return Err(Error::InvalidInput("lifted power has wrong length".into()));
        }
        let mut e = vec![Int::zero(); n];
        for i in 0..na {
            e[i] = -&p[i];
        }
        e[na + j] = g.clone();
        rels.push(e);
    }
    let rel = if rels.is_empty() { IntMatrix::zeros(n, 0) } else { IntMatrix::from_cols(n, &rels) };
    Ok(Extension { pres: group_from_relations(n, &rel), na, nc })
}

/// Generic form: `lift(j)` lifts generator `j` of `C` into `B`, `pow`
/// raises an element of `B` to a power, `act` returns the `A`-coordinates
/// of an element of `B` lying in the image of `A` (or fails).
pub fn extension_group_with<E>(
    a: &AbGroup,
    c: &AbGroup,
    lift: impl Fn(usize) -> Result<E>,
    pow: impl Fn(&E, &Int) -> Result<E>,
    act: impl Fn(&E) -> Result<Vec<Int>>,
) -> Result<Extension> {
    let mut powers = Vec::with_capacity(c.rank());
    for (j, g) in c.invariants().iter().enumerate() {
        if g.is_zero() {
            powers.push(a.zero());
            continue;
        }
        let e = lift(j)?;
        let p = pow(&e, g)?;
        powers.push(act(&p)?);
    }
    extension_group(a, c, &powers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn relations_to_cyclic_eight() {
        let rel = IntMatrix::from_i64_rows(&[&[2, 0], &[1, 4]]);
        let p = group_from_relations(2, &rel);
        assert_eq!(p.group.invariants(), &[int(8)]);
        // generator words map back to the standard generator
        let w = p.generator_word(0);
        assert_eq!(p.dlog(&w), vec![int(1)]);
    }

    #[test]
    fn kernel_of_doubling() {
        let g = AbGroup::new(&[int(8), int(4)]).unwrap();
        let f = Morphism::new(g.clone(), g.clone(), IntMatrix::from_i64_rows(&[&[2, 0], &[0, 2]])).unwrap();
        let k = f.kernel();
        assert_eq!(k.order(), Some(int(4)));
        assert_eq!(k, g.torsion(&int(2)));
        let im = f.image();
        assert_eq!(im.order(), Some(int(8)));
    }

    #[test]
    fn extension_of_z2_by_z2() {
        // B = Z/4 from A = Z/2, C = Z/2 with 2*lift = generator of A
        let a = AbGroup::cyclic(2);
        let c = AbGroup::cyclic(2);
        let e = extension_group(&a, &c, &[vec![int(1)]]).unwrap();
        assert_eq!(e.group().invariants(), &[int(4)]);
        let split = extension_group(&a, &c, &[vec![int(0)]]).unwrap();
        assert_eq!(split.group().invariants(), &[int(2), int(2)]);
    }

    #[test]
    fn structure_sorting() {
        let g = AbGroup::new(&[int(2), int(0), int(6), int(1)]).unwrap();
        assert_eq!(g.invariants(), &[int(0), int(6), int(2)]);
        assert_eq!(g.structure_string(), "Z x C6 x C2");
    }
}
