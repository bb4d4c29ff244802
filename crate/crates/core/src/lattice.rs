//! Lattice reduction and short vector enumeration.
//!
//! `lll_gram` is the exact integral LLL working from an integer Gram
//! matrix; `lll_f64` is a floating point variant for well conditioned
//! inputs; `fincke_pohst` enumerates all vectors under a quadratic form
//! bound.

use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::Int;

fn round_div(a: &Int, b: &Int) -> Int {
    // nearest integer to a/b, b > 0
    let two = Int::from(2);
    (a * &two + b).div_floor(&(b * &two))
}

/// Exact LLL (delta = 3/4) for the integer Gram matrix `g` of a basis.
/// Returns the unimodular transform `t` (row `i` gives the coefficients
/// of the `i`-th reduced vector in the input basis) and the reduced Gram.
/// The Gram matrix must be positive definite.
pub fn lll_gram(g: &[Vec<Int>]) -> (Vec<Vec<Int>>, Vec<Vec<Int>>) {
    let n = g.len();
    let mut g: Vec<Vec<Int>> = g.to_vec();
    let mut t: Vec<Vec<Int>> = (0..n)
        .map(|i| {
            let mut e = vec![Int::zero(); n];
            e[i] = Int::from(1);
            e
        })
        .collect();
    if n <= 1 {
        return (t, g);
    }
    // 1-indexed d and lambda as in the classical integral algorithm
    let mut d: Vec<Int> = vec![Int::zero(); n + 1];
    let mut lam: Vec<Vec<Int>> = vec![vec![Int::zero(); n + 1]; n + 1];
    d[0] = Int::from(1);
    d[1] = g[0][0].clone();
    let mut k = 2usize;
    let mut kmax = 1usize;

    let red = |k: usize, l: usize, g: &mut Vec<Vec<Int>>, t: &mut Vec<Vec<Int>>, lam: &mut Vec<Vec<Int>>, d: &Vec<Int>| {
        let two_l: Int = &lam[k][l] * 2;
        if two_l.abs() > d[l] {
            let q = round_div(&lam[k][l], &d[l]);
            let (kk, ll) = (k - 1, l - 1);
            // basis update b_k -= q b_l
            for j in 0..t[kk].len() {
                let v = &t[ll][j] * &q;
                t[kk][j] -= v;
            }
            let gkl = g[kk][ll].clone();
            let gll = g[ll][ll].clone();
            let nn = g.len();
            for j in 0..nn {
                if j == kk {
                    continue;
                }
                let v = &g[ll][j] * &q;
                g[kk][j] -= v;
                g[j][kk] = g[kk][j].clone();
            }
            let gkk = &g[kk][kk] - &gkl * &q * 2 + &q * &q * &gll;
            g[kk][kk] = gkk;
            let v = &q * &d[l];
            lam[k][l] -= v;
            for i in 1..l {
                let v = &q * &lam[l][i];
                lam[k][i] -= v;
            }
        }
    };

    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = g[k - 1][j - 1].clone();
                for i in 1..j {
                    u = (&d[i] * &u - &lam[k][i] * &lam[j][i]) / &d[i - 1];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    assert!(!u.is_zero(), "lll_gram: dependent vectors");
                    d[k] = u;
                }
            }
        }
        loop {
            red(k, k - 1, &mut g, &mut t, &mut lam, &d);
            let lhs = &d[k] * &d[k - 2] * 4;
            let rhs = &d[k - 1] * &d[k - 1] * 3 - &lam[k][k - 1] * &lam[k][k - 1] * 4;
            if lhs < rhs {
                // swap b_k and b_{k-1}
                t.swap(k - 1, k - 2);
                g.swap(k - 1, k - 2);
                for row in g.iter_mut() {
                    row.swap(k - 1, k - 2);
                }
                for j in 1..k - 1 {
                    let tmp = lam[k][j].clone();
                    lam[k][j] = lam[k - 1][j].clone();
                    lam[k - 1][j] = tmp;
                }
                let l = lam[k][k - 1].clone();
                let b = (&d[k - 2] * &d[k] + &l * &l) / &d[k - 1];
                for i in k + 1..=kmax {
                    let tt = lam[i][k].clone();
                    lam[i][k] = (&d[k] * &lam[i][k - 1] - &l * &tt) / &d[k - 1];
                    lam[i][k - 1] = (&b * &tt + &l * &lam[i][k]) / &d[k];
                }
                d[k - 1] = b;
                if k > 2 {
                    k -= 1;
                }
            } else {
                for l in (1..k - 1).rev() {
                    red(k, l, &mut g, &mut t, &mut lam, &d);
                }
                k += 1;
                break;
            }
        }
    }
    (t, g)
}

/// LLL-reduce integer column vectors under the standard inner product.
pub fn lll_integer(cols: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let n = cols.len();
    let g: Vec<Vec<Int>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| cols[i].iter().zip(cols[j].iter()).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    let (t, _) = lll_gram(&g);
    t.iter()
        .map(|row| {
            let mut v = vec![Int::zero(); cols[0].len()];
            for (c, b) in row.iter().zip(cols.iter()) {
                if c.is_zero() {
                    continue;
                }
                for (x, y) in v.iter_mut().zip(b.iter()) {
                    *x += c * y;
                }
            }
            v
        })
        .collect()
}

/// Floating point LLL on real vectors `v` (rows), applying the same
/// integer operations to `coords`. Intended for bases that are already
/// close to reduced.
pub fn lll_f64(v: &mut [Vec<f64>], coords: &mut [Vec<Int>]) {
    let n = v.len();
    if n <= 1 {
        return;
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut k = 1;
    let mut iter = 0;
    while k < n && iter < 100_000 {
        iter += 1;
        // Gram-Schmidt of the first k+1 vectors
        let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(k + 1);
        let mut bn: Vec<f64> = Vec::with_capacity(k + 1);
        let mut mu = vec![vec![0.0f64; n]; n];
        for i in 0..=k {
            let mut w = v[i].clone();
            for j in 0..i {
                mu[i][j] = dot(&v[i], &bstar[j]) / bn[j];
                for (x, y) in w.iter_mut().zip(bstar[j].iter()) {
                    *x -= mu[i][j] * y;
                }
            }
            bn.push(dot(&w, &w));
            bstar.push(w);
        }
        for j in (0..k).rev() {
            let q = libm::round(mu[k][j]);
            if q != 0.0 {
                let qi = Int::from(q as i64);
                for c in 0..v[k].len() {
                    v[k][c] -= q * v[j][c];
                }
                for c in 0..coords[k].len() {
                    let t = &coords[j][c] * &qi;
                    coords[k][c] -= t;
                }
                for i in 0..j {
                    mu[k][i] -= q * mu[j][i];
                }
                mu[k][j] -= q;
            }
        }
        let bk = {
            let mut w = v[k].clone();
            for j in 0..k {
                let m = dot(&v[k], &bstar[j]) / bn[j];
                for (x, y) in w.iter_mut().zip(bstar[j].iter()) {
                    *x -= m * y;
                }
            }
            dot(&w, &w)
        };
        let m = dot(&v[k], &bstar[k - 1]) / bn[k - 1];
        if bk < (0.99 - m * m) * bn[k - 1] {
            v.swap(k, k - 1);
            coords.swap(k, k - 1);
            k = if k > 1 { k - 1 } else { 1 };
        } else {
            k += 1;
        }
    }
}

/// Cholesky data in the form used by Fincke-Pohst: `Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2`.
pub fn quadratic_decomposition(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut q = a.to_vec();
    for i in 0..n {
        for j in i..n {
            q[i][j] = a[i][j];
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
        // also rejects NaN
        if q[i][i].partial_cmp(&0.0) != Some(core::cmp::Ordering::Greater) {
            return None;
        }
    }
    Some(q)
}

/// All nonzero integer vectors `x` (one of each `±x` pair) with
/// `x^T a x <= bound`, together with the form value. Returns `None` if
/// the form is not positive definite or more than `cap` vectors qualify.
pub fn fincke_pohst(a: &[Vec<f64>], bound: f64, cap: usize) -> Option<Vec<(Vec<i64>, f64)>> {
    let n = a.len();
    let q = quadratic_decomposition(a)?;
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    let mut t = vec![0.0f64; n];
    let mut u = vec![0.0f64; n];
    let mut ub = vec![0.0f64; n];
    let mut i = n - 1;
    t[i] = bound;
    u[i] = 0.0;
    let slack = 1e-9 * bound.max(1.0);
    // initial bounds at level i
    let set_level = |i: usize, t: &[f64], u: &[f64], x: &mut [i64], ub: &mut [f64]| {
        let z = libm::sqrt(((t[i] + slack) / q[i][i]).max(0.0));
        ub[i] = libm::floor(z - u[i]);
        x[i] = libm::ceil(-z - u[i]) as i64 - 1;
    };
    set_level(i, &t, &u, &mut x, &mut ub);
    loop {
        x[i] += 1;
        if (x[i] as f64) > ub[i] {
            if i == n - 1 {
                break;
            }
            i += 1;
            continue;
        }
        if i > 0 {
            let d = x[i] as f64 + u[i];
            t[i - 1] = t[i] - q[i][i] * d * d;
            i -= 1;
            u[i] = (i + 1..n).map(|j| q[i][j] * x[j] as f64).sum();
            set_level(i, &t, &u, &mut x, &mut ub);
        } else {
            if x.iter().all(|&v| v == 0) {
                // reached the origin: everything after is the mirror image
                break;
            }
            let d = x[0] as f64 + u[0];
            let val = bound - (t[0] - q[0][0] * d * d);
            out.push((x.clone(), val));
            if out.len() > cap {
                return None;
            }
        }
    }
    Some(out)
}

/// Convert a small exact integer to f64 (panics if huge).
pub fn to_f64(x: &Int) -> f64 {
    x.to_f64().expect("integer too large for f64")
}
