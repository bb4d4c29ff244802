//! Maximal order by the Round 2 algorithm.

use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{factor, Int, Rat};
use crate::fgab::matrix::{hnf, solve_hnf, IntMatrix};
use crate::fp;
use crate::{Error, Result};

/// Discriminant of a monic polynomial (coefficients low to high), via
/// the resultant with its derivative.
pub fn poly_discriminant(f: &[Int]) -> Int {
    let n = f.len() - 1;
    let df: Vec<Int> = (1..=n).map(|k| &f[k] * k).collect();
    let r = resultant(f, &df);
    // disc = (-1)^{n(n-1)/2} res(f, f') / lc(f)
    if (n * (n - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

/// Resultant via the Sylvester matrix determinant.
pub fn resultant(f: &[Int], g: &[Int]) -> Int {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    let mut s = IntMatrix::zeros(size, size);
    for i in 0..n {
        for (k, c) in f.iter().rev().enumerate() {
            s[(i, i + k)] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in g.iter().rev().enumerate() {
            s[(n + i, i + k)] = c.clone();
        }
    }
    s.det()
}

/// Multiply two power basis vectors modulo the monic `f`.
pub fn polmulmod<T>(a: &[T], b: &[T], f: &[Int]) -> Vec<T>
where
    T: Clone + Zero + for<'x> core::ops::AddAssign<&'x T> + for<'x> core::ops::SubAssign<&'x T> + core::ops::Mul<Output = T> + From<Int>,
    for<'x> &'x T: core::ops::Mul<&'x T, Output = T>,
{
    let n = f.len() - 1;
    let mut prod = vec![T::zero(); 2 * n - 1];
    for i in 0..n {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if b[j].is_zero() {
                continue;
            }
            let t = &a[i] * &b[j];
            prod[i + j] += &t;
        }
    }
    for k in (n..2 * n - 1).rev() {
        if prod[k].is_zero() {
            continue;
        }
        let c = prod[k].clone();
        for j in 0..n {
            let t = c.clone() * T::from(f[j].clone());
            prod[k - n + j] -= &t;
        }
        prod[k] = T::zero();
    }
    prod.truncate(n);
    prod
}

/// Basis data of an order: column `i` of `num` divided by `den` gives the
/// power coordinates of the `i`-th basis element.
#[derive(Clone, Debug)]
pub struct OrderBasis {
    pub num: IntMatrix,
    pub den: Int,
}

impl OrderBasis {
    fn normalize(num: IntMatrix, den: Int) -> Self {
        let h = hnf(&num);
        let mut g = den.clone();
        for i in 0..h.rows() {
            for j in 0..h.cols() {
                g = g.gcd(&h[(i, j)]);
            }
        }
        let mut h2 = h.clone();
        for i in 0..h.rows() {
            for j in 0..h.cols() {
                h2[(i, j)] = &h[(i, j)] / &g;
            }
        }
        OrderBasis { num: h2, den: den / g }
    }

    /// Power coordinates to basis coordinates (rational).
    pub fn inverse(&self) -> Vec<Vec<Rat>> {
        let n = self.num.rows();
        let mut a: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                let mut row: Vec<Rat> = (0..n).map(|j| Rat::from(self.num[(i, j)].clone())).collect();
                row.extend((0..n).map(|j| if i == j { Rat::from(self.den.clone()) } else { Rat::zero() }));
                row
            })
            .collect();
        // Gauss-Jordan
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero()).unwrap();
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

    /// Multiplication table: `mt[i][j]` = coordinates of `w_i w_j`.
    pub fn mult_table(&self, f: &[Int]) -> Result<Vec<Vec<Vec<Int>>>> {
        let n = self.num.rows();
        let inv = self.inverse();
        let cols: Vec<Vec<Rat>> = (0..n)
            .map(|i| (0..n).map(|k| Rat::new(self.num[(k, i)].clone(), self.den.clone())).collect())
            .collect();
        let mut mt = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in i..n {
                let p = polmulmod(&cols[i], &cols[j], f);
                let c: Vec<Int> = (0..n)
                    .map(|r| {
                        let v: Rat = (0..n).map(|k| &inv[r][k] * &p[k]).sum();
                        if v.is_integer() {
                            Ok(v.to_integer())
                        } else {
                            Err(Error::Inconsistent("basis is not closed under multiplication".into()))
                        }
                    })
                    .collect::<Result<_>>()?;
                mt[i][j] = c.clone();
                mt[j][i] = c;
            }
        }
        Ok(mt)
    }
}

pub fn mul_coords(mt: &[Vec<Vec<Int>>], a: &[Int], b: &[Int]) -> Vec<Int> {
    let n = a.len();
    let mut r = vec![Int::zero(); n];
    for i in 0..n {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if b[j].is_zero() {
                continue;
            }
            let ab = &a[i] * &b[j];
            for k in 0..n {
                if !mt[i][j][k].is_zero() {
                    r[k] += &ab * &mt[i][j][k];
                }
            }
        }
    }
    r
}

pub fn mul_coords_mod(mt: &[Vec<Vec<Int>>], a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len();
    let mut r = vec![0u64; n];
    for i in 0..n {
        if a[i] == 0 {
            continue;
        }
        for j in 0..n {
            if b[j] == 0 {
                continue;
            }
            let ab = fp::mulm(a[i], b[j], p);
            for k in 0..n {
                let m = mt[i][j][k].mod_floor(&Int::from(p)).to_u64().unwrap();
                if m != 0 {
                    r[k] = (r[k] + fp::mulm(ab, m, p)) % p;
                }
            }
        }
    }
    r
}

pub fn pow_coords_mod(mt: &[Vec<Vec<Int>>], a: &[u64], mut e: u64, p: u64) -> Vec<u64> {
    let n = a.len();
    let mut one = vec![0u64; n];
    one[0] = 1 % p;
    let mut acc = one;
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_coords_mod(mt, &acc, &base, p);
        }
        base = mul_coords_mod(mt, &base, &base, p);
        e >>= 1;
    }
    acc
}

fn enlarge_at(basis: &OrderBasis, f: &[Int], p: u64) -> Result<Option<OrderBasis>> {
    let n = basis.num.rows();
    let mt = basis.mult_table(f)?;
    let pb = Int::from(p);
    let mut q = p;
    while (q as usize) < n {
        q *= p;
    }
    // radical of pO: kernel of x -> x^q on O/pO
    let mut fro = vec![vec![0u64; n]; n];
    for i in 0..n {
        let mut e = vec![0u64; n];
        e[i] = 1;
        let img = pow_coords_mod(&mt, &e, q, p);
        for r in 0..n {
            fro[r][i] = img[r];
        }
    }
    let ker = fp::kernel(&fro, n, p);
    let mut gens: Vec<Vec<Int>> = (0..n)
        .map(|i| {
            let mut e = vec![Int::zero(); n];
            e[i] = pb.clone();
            e
        })
        .collect();
    gens.extend(ker.iter().map(|v| v.iter().map(|&x| Int::from(x)).collect::<Vec<Int>>()));
    let ip = hnf(&IntMatrix::from_cols(n, &gens));
    // U = { u : u I_p ⊆ p I_p }
    let mut rows: Vec<Vec<u64>> = vec![vec![0u64; n]; n * n];
    for i in 0..n {
        let mut e = vec![Int::zero(); n];
        e[i] = Int::one();
        for k in 0..n {
            let g = ip.col(k);
            let prod = mul_coords(&mt, &e, &g);
            let y = solve_hnf(&ip, &prod).ok_or_else(|| Error::Inconsistent("radical is not an ideal".into()))?;
            for (r, v) in y.iter().enumerate() {
                rows[k * n + r][i] = v.mod_floor(&pb).to_u64().unwrap();
            }
        }
    }
    let uker = fp::kernel(&rows, n, p);
    if uker.is_empty() {
        return Ok(None);
    }
    let mut gens: Vec<Vec<Int>> = (0..n)
        .map(|i| {
            let mut e = vec![Int::zero(); n];
            e[i] = pb.clone();
            e
        })
        .collect();
    gens.extend(uker.iter().map(|v| v.iter().map(|&x| Int::from(x)).collect::<Vec<Int>>()));
    let h2 = hnf(&IntMatrix::from_cols(n, &gens));
    let new_num = basis.num.mul(&h2);
    Ok(Some(OrderBasis::normalize(new_num, &basis.den * &pb)))
}

/// Integral basis of the maximal order of `Q[x]/(f)` for monic irreducible `f`.
pub fn maximal_order(f: &[Int]) -> Result<OrderBasis> {
    let n = f.len() - 1;
    let mut basis = OrderBasis { num: IntMatrix::identity(n), den: Int::one() };
    let d = poly_discriminant(f);
    if d.is_zero() {
        return Err(Error::Reducible);
    }
    for (p, e) in factor(&d)? {
        if e < 2 {
            continue;
        }
        let p = p.to_u64().ok_or_else(|| Error::Resource("prime too large".into()))?;
        while let Some(b) = enlarge_at(&basis, f, p)? {
            basis = b;
        }
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn discriminant_even_quartic() {
        let f = [int(500), int(0), int(53), int(0), int(1)];
        assert_eq!(poly_discriminant(&f), int(16 * 500 * 809 * 809));
    }

    #[test]
    fn quadratic_orders() {
        // x^2 - 5: O = Z[(1+sqrt5)/2]
        let b = maximal_order(&[int(-5), int(0), int(1)]).unwrap();
        assert_eq!(b.den, int(2));
        // x^2 + 53x + 500: disc 809 squarefree, monogenic
        let b = maximal_order(&[int(500), int(53), int(1)]).unwrap();
        assert_eq!(b.den, int(1));
    }
}
