//! Dense integer matrices with Hermite and Smith normal forms.
//!
//! Lattices are spanned by columns. The Hermite form follows the column
//! convention: column `j` has its last nonzero entry (the pivot, positive)
//! at row `f(j)` with `f` strictly increasing, and every entry in a pivot
//! row to the right of its pivot is reduced into `[0, pivot)`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{int, Int, Rat};

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl core::ops::Index<(usize, usize)> for IntMatrix {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    pub fn diagonal(d: &[Int]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Int>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let v: Vec<Vec<Int>> = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Self::from_rows(&v)
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_cols(rows: usize, cols: &[Vec<Int>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Int> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn columns(&self) -> Vec<Vec<Int>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows);
        let mut r = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        r[(i, j)] += a * b;
                    }
                }
            }
        }
        r
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = Int::zero();
                for j in 0..self.cols {
                    if !v[j].is_zero() {
                        s += &self[(i, j)] * &v[j];
                    }
                }
                s
            })
            .collect()
    }

    pub fn hcat(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, o.rows);
        let mut cols = self.columns();
        cols.extend(o.columns());
        Self::from_cols(self.rows, &cols)
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        let rows: Vec<Vec<Int>> = idx.iter().map(|&i| self.row(i)).collect();
        if rows.is_empty() {
            return Self::zeros(0, self.cols);
        }
        Self::from_rows(&rows)
    }

    pub fn select_cols(&self, idx: &[usize]) -> IntMatrix {
        let cols: Vec<Vec<Int>> = idx.iter().map(|&j| self.col(j)).collect();
        Self::from_cols(self.rows, &cols)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    /// Determinant of a square matrix (Bareiss).
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut a = self.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return Int::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[dst] += q * row[src]`
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self[(src, j)] * q;
            self[(dst, j)] += v;
        }
    }

    /// `col[dst] += q * col[src]`
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self[(i, src)] * q;
            self[(i, dst)] += v;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    /// Rank over Q.
    pub fn rank(&self) -> usize {
        independent_columns(self).len()
    }
}

/// Indices of a maximal set of Q-linearly independent columns, chosen
/// greedily from the left.
pub fn independent_columns(a: &IntMatrix) -> Vec<usize> {
    let mut basis: Vec<(usize, Vec<Rat>)> = Vec::new();
    let mut chosen = Vec::new();
    for j in 0..a.cols() {
        let mut v: Vec<Rat> = a.col(j).into_iter().map(Rat::from).collect();
        for (p, b) in &basis {
            if !v[*p].is_zero() {
                let f = v[*p].clone() / &b[*p];
                for i in 0..v.len() {
                    let t = &b[i] * &f;
                    v[i] -= t;
                }
            }
        }
        if let Some(p) = v.iter().position(|x| !x.is_zero()) {
            basis.push((p, v));
            chosen.push(j);
            if chosen.len() == a.rows() {
                break;
            }
        }
    }
    chosen
}

fn euclid_on_row(cols: &mut [Vec<Int>], active: &mut Vec<usize>, row: usize, modulus: Option<&Int>) -> Option<usize> {
    loop {
        let nz: Vec<usize> = active.iter().copied().filter(|&c| !cols[c][row].is_zero()).collect();
        if nz.is_empty() {
            return None;
        }
        let piv = *nz.iter().min_by(|&&a, &&b| cols[a][row].abs().cmp(&cols[b][row].abs())).unwrap();
        if nz.len() == 1 {
            if cols[piv][row].is_negative() {
                for v in cols[piv].iter_mut() {
                    *v = -&*v;
                }
            }
            active.retain(|&c| c != piv);
            return Some(piv);
        }
        let pv = cols[piv].clone();
        for &c in &nz {
            if c == piv {
                continue;
            }
            let q = cols[c][row].div_floor(&pv[row]);
            for i in 0..=row {
                let t = &pv[i] * &q;
                cols[c][i] -= t;
                if let Some(m) = modulus {
                    if i < row {
                        cols[c][i] = cols[c][i].mod_floor(m);
                    }
                }
            }
        }
    }
}

fn reduce_echelon(cols: &mut [Vec<Int>], piv_rows: &[usize]) {
    for j in 0..cols.len() {
        for k in (0..j).rev() {
            let r = piv_rows[k];
            let q = cols[j][r].div_floor(&cols[k][r]);
            if !q.is_zero() {
                let ck = cols[k].clone();
                for i in 0..=r {
                    let t = &ck[i] * &q;
                    cols[j][i] -= t;
                }
            }
        }
    }
}

fn hnf_core(a: &IntMatrix, modulus: Option<&Int>) -> IntMatrix {
    let m = a.rows();
    let mut cols: Vec<Vec<Int>> = a.columns();
    if let Some(d) = modulus {
        for c in cols.iter_mut() {
            for v in c.iter_mut() {
                *v = v.mod_floor(d);
            }
        }
    }
    let mut active: Vec<usize> = (0..cols.len()).collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for row in (0..m).rev() {
        if let Some(d) = modulus {
            let mut e = vec![Int::zero(); m];
            e[row] = d.clone();
            cols.push(e);
            active.push(cols.len() - 1);
        }
        if let Some(p) = euclid_on_row(&mut cols, &mut active, row, modulus) {
            pivots.push((row, p));
        }
    }
    pivots.reverse();
    let piv_rows: Vec<usize> = pivots.iter().map(|p| p.0).collect();
    let mut out: Vec<Vec<Int>> = pivots.iter().map(|&(_, c)| cols[c].clone()).collect();
    if let Some(d) = modulus {
        for c in out.iter_mut() {
            let r = c.iter().rposition(|v| !v.is_zero()).unwrap();
            for v in c[..r].iter_mut() {
                *v = v.mod_floor(d);
            }
        }
    }
    reduce_echelon(&mut out, &piv_rows);
    IntMatrix::from_cols(m, &out)
}

/// Hermite normal form of the column lattice of `a`.
pub fn hnf(a: &IntMatrix) -> IntMatrix {
    let m = a.rows();
    let ind = independent_columns(a);
    if ind.len() == m && m > 0 {
        let d = a.select_cols(&ind).det().abs();
        hnf_core(a, Some(&d))
    } else {
        hnf_core(a, None)
    }
}

/// Hermite normal form when `d` is known to be a multiple of the lattice
/// determinant (so `d Z^m` lies inside the lattice).
pub fn hnf_mod(a: &IntMatrix, d: &Int) -> IntMatrix {
    hnf_core(a, Some(&d.abs()))
}

/// Pivot rows of a matrix in Hermite form.
pub fn pivot_rows(h: &IntMatrix) -> Vec<usize> {
    (0..h.cols())
        .map(|j| (0..h.rows()).rev().find(|&i| !h[(i, j)].is_zero()).expect("zero column in HNF"))
        .collect()
}

/// Coefficients `c` with `h c = x` for `h` in Hermite form, if they exist.
pub fn solve_hnf(h: &IntMatrix, x: &[Int]) -> Option<Vec<Int>> {
    let piv = pivot_rows(h);
    let mut x = x.to_vec();
    let mut c = vec![Int::zero(); h.cols()];
    for j in (0..h.cols()).rev() {
        let r = piv[j];
        if x[r + 1..].iter().any(|v| !v.is_zero()) {
            return None;
        }
        let (q, rem) = x[r].div_rem(&h[(r, j)]);
        if !rem.is_zero() {
            return None;
        }
        for i in 0..=r {
            let t = &h[(i, j)] * &q;
            x[i] -= t;
        }
        c[j] = q;
    }
    if x.iter().all(|v| v.is_zero()) {
        Some(c)
    } else {
        None
    }
}

/// Reduce `x` modulo the lattice of a full-rank square Hermite form, giving
/// the canonical representative with `0 <= x_r < h_rr` in pivot rows.
pub fn reduce_mod_hnf(h: &IntMatrix, x: &[Int]) -> Vec<Int> {
    let piv = pivot_rows(h);
    let mut x = x.to_vec();
    for j in (0..h.cols()).rev() {
        let r = piv[j];
        let q = x[r].div_floor(&h[(r, j)]);
        if !q.is_zero() {
            for i in 0..=r {
                let t = &h[(i, j)] * &q;
                x[i] -= t;
            }
        }
    }
    x
}

/// Z-basis (as columns) of the integer kernel `{y : a y = 0}`.
pub fn kernel(a: &IntMatrix) -> IntMatrix {
    let m = a.rows();
    let k = a.cols();
    let mut cols: Vec<Vec<Int>> = a.columns();
    let mut tr: Vec<Vec<Int>> = (0..k)
        .map(|j| {
            let mut e = vec![Int::zero(); k];
            e[j] = Int::one();
            e
        })
        .collect();
    let mut active: Vec<usize> = (0..k).collect();
    for row in (0..m).rev() {
        loop {
            let nz: Vec<usize> = active.iter().copied().filter(|&c| !cols[c][row].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let piv = *nz.iter().min_by(|&&x, &&y| cols[x][row].abs().cmp(&cols[y][row].abs())).unwrap();
            if nz.len() == 1 {
                active.retain(|&c| c != piv);
                break;
            }
            let pv = cols[piv].clone();
            let pt = tr[piv].clone();
            for &c in &nz {
                if c == piv {
                    continue;
                }
                let q = cols[c][row].div_floor(&pv[row]);
                for i in 0..m {
                    let t = &pv[i] * &q;
                    cols[c][i] -= t;
                }
                for i in 0..k {
                    let t = &pt[i] * &q;
                    tr[c][i] -= t;
                }
            }
        }
    }
    let basis: Vec<Vec<Int>> = active.iter().map(|&c| tr[c].clone()).collect();
    let km = IntMatrix::from_cols(k, &basis);
    if km.cols() == 0 {
        return km;
    }
    lll_columns(&km)
}

/// LLL reduction (exact, rational Gram-Schmidt) of the columns of `b`,
/// which must be linearly independent. Used to keep kernel bases small.
pub fn lll_columns(b: &IntMatrix) -> IntMatrix {
    let cols = b.columns();
    let red = crate::lattice::lll_integer(&cols);
    IntMatrix::from_cols(b.rows(), &red)
}

/// Smith normal form data for `Z^n / (columns of r)`.
pub struct Smith {
    /// Diagonal entries, ascending under divisibility, followed by zeros
    /// for the free part; length `n`.
    pub diag: Vec<Int>,
    /// Unimodular `u` with `u r v = diag`.
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
}

/// Smith normal form of `r` (`n x k`), tracking the row transform.
pub fn smith(r: &IntMatrix) -> Smith {
    let n = r.rows();
    let h = if r.cols() == 0 { IntMatrix::zeros(n, 0) } else { hnf(r) };
    let mut m = h;
    let k = m.cols();
    let mut u = IntMatrix::identity(n);
    let mut ui = IntMatrix::identity(n);
    let mut t = 0;
    while t < n.min(k) {
        // pick smallest nonzero in the lower right block
        let mut best: Option<(usize, usize)> = None;
        for i in t..n {
            for j in t..k {
                if !m[(i, j)].is_zero() {
                    match best {
                        Some((bi, bj)) if m[(bi, bj)].abs() <= m[(i, j)].abs() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        row_swap(&mut m, &mut u, &mut ui, t, bi);
        m.swap_cols(t, bj);
        loop {
            let mut changed = false;
            for i in t + 1..n {
                if !m[(i, t)].is_zero() {
                    let q = -(m[(i, t)].div_floor(&m[(t, t)]));
                    row_add(&mut m, &mut u, &mut ui, i, t, &q);
                    if !m[(i, t)].is_zero() {
                        changed = true;
                    }
                }
            }
            for j in t + 1..k {
                if !m[(t, j)].is_zero() {
                    let q = -(m[(t, j)].div_floor(&m[(t, t)]));
                    m.add_col_multiple(j, t, &q);
                    if !m[(t, j)].is_zero() {
                        changed = true;
                    }
                }
            }
            if changed {
                let mut bi = t;
                let mut bj = t;
                let mut bv = m[(t, t)].abs();
                for i in t + 1..n {
                    if !m[(i, t)].is_zero() && m[(i, t)].abs() < bv {
                        bv = m[(i, t)].abs();
                        bi = i;
                        bj = t;
                    }
                }
                for j in t + 1..k {
                    if !m[(t, j)].is_zero() && m[(t, j)].abs() < bv {
                        bv = m[(t, j)].abs();
                        bi = t;
                        bj = j;
                    }
                }
                row_swap(&mut m, &mut u, &mut ui, t, bi);
                m.swap_cols(t, bj);
                continue;
            }
            // divisibility of the remaining block
            let p = m[(t, t)].clone();
            let mut bad = None;
            'o: for i in t + 1..n {
                for j in t + 1..k {
                    if !m[(i, j)].is_multiple_of(&p) {
                        bad = Some(i);
                        break 'o;
                    }
                }
            }
            match bad {
                Some(i) => row_add(&mut m, &mut u, &mut ui, t, i, &Int::one()),
                None => break,
            }
        }
        if m[(t, t)].is_negative() {
            m.negate_row(t);
            u.negate_row(t);
            ui.negate_col(t);
        }
        t += 1;
    }
    let mut diag: Vec<Int> = (0..n).map(|i| if i < k { m[(i, i)].clone() } else { Int::zero() }).collect();
    for i in t..n {
        diag[i] = Int::zero();
    }
    Smith { diag, u, u_inv: ui }
}

fn row_swap(m: &mut IntMatrix, u: &mut IntMatrix, ui: &mut IntMatrix, a: usize, b: usize) {
    m.swap_rows(a, b);
    u.swap_rows(a, b);
    ui.swap_cols(a, b);
}

/// `row[dst] += q row[src]` on `m` and `u`; inverse update on `ui`.
fn row_add(m: &mut IntMatrix, u: &mut IntMatrix, ui: &mut IntMatrix, dst: usize, src: usize, q: &Int) {
    m.add_row_multiple(dst, src, q);
    u.add_row_multiple(dst, src, q);
    ui.add_col_multiple(src, dst, &-q);
}

#[cfg(test)]
mod tests {
    use super::*;
    extern crate std;
    use std::collections::BTreeSet;

    fn span_box(a: &IntMatrix, r: i64, bound: i64) -> BTreeSet<Vec<i64>> {
        // all lattice points with coordinates in [-bound, bound] reachable with
        // coefficients in [-r, r]
        let k = a.cols();
        let mut out = BTreeSet::new();
        let mut c = vec![-r; k];
        loop {
            let v = a.mul_vec(&c.iter().map(|&x| int(x)).collect::<Vec<_>>());
            let vi: Vec<i64> = v.iter().map(|x| i64::try_from(x.clone()).unwrap()).collect();
            if vi.iter().all(|x| x.abs() <= bound) {
                out.insert(vi);
            }
            let mut i = 0;
            while i < k {
                c[i] += 1;
                if c[i] <= r {
                    break;
                }
                c[i] = -r;
                i += 1;
            }
            if i == k {
                break;
            }
        }
        out
    }

    #[test]
    fn hnf_two_by_two_span() {
        let a = IntMatrix::from_i64_rows(&[&[2, 1], &[0, 2]]);
        let h = hnf(&a);
        assert_eq!(h, IntMatrix::from_i64_rows(&[&[2, 1], &[0, 2]]));
        assert_eq!(span_box(&a, 6, 4), span_box(&h, 6, 4));
        // the lattice {(a, 4b)} is a different lattice
        let other = IntMatrix::from_i64_rows(&[&[1, 0], &[0, 4]]);
        assert_ne!(span_box(&other, 6, 4), span_box(&a, 6, 4));
    }

    #[test]
    fn smith_small() {
        let a = IntMatrix::from_i64_rows(&[&[2, 1], &[0, 2]]);
        let s = smith(&a);
        assert_eq!(s.diag, vec![int(1), int(4)]);
        let r = IntMatrix::from_i64_rows(&[&[2, 0], &[1, 4]]);
        let s = smith(&r);
        assert_eq!(s.diag, vec![int(1), int(8)]);
        assert_eq!(s.u.mul(&s.u_inv), IntMatrix::identity(2));
    }

    #[test]
    fn kernel_basic() {
        let a = IntMatrix::from_i64_rows(&[&[1, 2, 3], &[4, 5, 6]]);
        let k = kernel(&a);
        assert_eq!(k.cols(), 1);
        assert!(a.mul(&k).is_zero());
        let v = k.col(0);
        assert_eq!(v.iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![int(1), int(2), int(1)]);
    }

    #[test]
    fn det_bareiss() {
        let a = IntMatrix::from_i64_rows(&[&[2, -1, 0], &[1, 3, 4], &[0, 5, -2]]);
        assert_eq!(a.det(), int(2 * (-6 - 20) + (-2)));
    }
}
