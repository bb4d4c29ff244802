//! Linear algebra over a prime field `F_p` with `p < 2^62`.

use alloc::vec;
use alloc::vec::Vec;

#[inline]
pub fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn powm(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, a, p);
        }
        a = mulm(a, a, p);
        e >>= 1;
    }
    r
}

pub fn invm(a: u64, p: u64) -> u64 {
    powm(a, p - 2, p)
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [Vec<u64>], p: u64) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_multiple_of(p)) else { continue };
        m.swap(r, pr);
        let inv = invm(m[r][c], p);
        for v in m[r].iter_mut() {
            *v = mulm(*v, inv, p);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    let t = mulm(f, m[r][j], p);
                    m[i][j] = (m[i][j] + p - t) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{x : A x = 0}` for `A` given by rows.
pub fn kernel(a: &[Vec<u64>], ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut m: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|v| v % p).collect()).collect();
    let piv = rref(&mut m, p);
    let free: Vec<usize> = (0..ncols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![0u64; ncols];
            x[f] = 1;
            for (r, &pc) in piv.iter().enumerate() {
                x[pc] = (p - m[r][f] % p) % p;
            }
            x
        })
        .collect()
}

/// Echelon basis of the span of the given vectors.
pub fn span_basis(vs: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let mut m = vs.to_vec();
    let piv = rref(&mut m, p);
    m.truncate(piv.len());
    m
}

/// Reduce `v` modulo the row space of an rref basis `b` (with pivots).
pub fn reduce(v: &[u64], b: &[Vec<u64>], p: u64) -> Vec<u64> {
    let mut v = v.to_vec();
    for row in b {
        let Some(pc) = row.iter().position(|&x| x != 0) else { continue };
        if v[pc] != 0 {
            let f = v[pc];
            for j in 0..v.len() {
                let t = mulm(f, row[j], p);
                v[j] = (v[j] + p - t) % p;
            }
        }
    }
    v
}
