//! Exact rational and modular linear algebra, Krylov minimal polynomials,
//! and floating-point LLL.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::matrix::IntMatrix;
use crate::poly::IntPolynomial;

/// Rational matrix as rows.
pub type QMatrix = Vec<Vec<BigRational>>;

pub fn to_q(m: &IntMatrix) -> QMatrix {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(BigRational::from_integer).collect())
        .collect()
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(a: &mut QMatrix) -> Vec<usize> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(k) = (r..rows).find(|&k| !a[k][c].is_zero()) else {
            continue;
        };
        a.swap(r, k);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let v = &a[r][j] * &f;
                    a[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// `A^{-1}` for a square nonsingular integer matrix, as `(N, d)` with `A^{-1} = N/d`, `d > 0` minimal.
pub fn inverse(a: &IntMatrix) -> Option<(IntMatrix, BigInt)> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut aug: QMatrix = to_q(a)
        .into_iter()
        .enumerate()
        .map(|(i, mut r)| {
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() < n || piv[n - 1] >= n {
        return None;
    }
    let inv: QMatrix = aug.into_iter().map(|r| r[n..].to_vec()).collect();
    Some(clear_denominators(&inv))
}

/// Integer inverse of a unimodular matrix.
pub fn unimodular_inverse(a: &IntMatrix) -> Option<IntMatrix> {
    let (n, d) = inverse(a)?;
    d.is_one().then_some(n)
}

/// `(N, d)` with `q = N/d`.
pub fn clear_denominators(q: &QMatrix) -> (IntMatrix, BigInt) {
    let mut d = BigInt::one();
    for r in q {
        for x in r {
            d = d.lcm(x.denom());
        }
    }
    let rows: Vec<Vec<BigInt>> = q
        .iter()
        .map(|r| r.iter().map(|x| (x * BigRational::from_integer(d.clone())).to_integer()).collect())
        .collect();
    let cols = q.first().map_or(0, |r| r.len());
    let m = if rows.is_empty() { IntMatrix::zeros(0, cols) } else { IntMatrix::from_rows(&rows).unwrap() };
    (m, d)
}

/// Solves `A x = b` for square nonsingular `A`.
pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigRational>> {
    let n = a.rows();
    let mut aug: QMatrix = to_q(a)
        .into_iter()
        .zip(b)
        .map(|(mut r, x)| {
            r.push(BigRational::from_integer(x.clone()));
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() < n || piv[n - 1] >= n {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n].clone()).collect())
}

/// Right kernel of `a` (rows × cols) over F_p, as a basis of column vectors.
pub fn kernel_mod_p(a: &[Vec<u64>], cols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut m: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(k) = (r..rows).find(|&k| m[k][c] != 0) else {
            continue;
        };
        m.swap(r, k);
        let inv = mod_inv(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = mulmod(*x, inv, p);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    let v = mulmod(m[r][j], f, p);
                    m[i][j] = (m[i][j] + p - v) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u64; cols];
            v[fc] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[i][fc]) % p;
            }
            v
        })
        .collect()
}

pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

pub fn mod_inv(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

pub fn bigint_mod(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// Minimal polynomial of a square integer matrix: the first linear relation
/// among `I, M, M², …`, found by incremental rational elimination.
pub fn min_poly(m: &IntMatrix) -> IntPolynomial {
    let n = m.rows();
    let flat = |a: &IntMatrix| -> Vec<BigRational> {
        a.to_rows().into_iter().flatten().map(BigRational::from_integer).collect()
    };
    // Echelon rows with their expression in terms of the powers.
    let mut basis: Vec<(Vec<BigRational>, Vec<BigRational>, usize)> = Vec::new();
    let mut power = IntMatrix::identity(n);
    for k in 0..=n {
        let mut v = flat(&power);
        let mut comb = vec![BigRational::zero(); n + 1];
        comb[k] = BigRational::one();
        for (row, rc, pc) in &basis {
            if !v[*pc].is_zero() {
                let f = v[*pc].clone() / &row[*pc];
                for j in 0..v.len() {
                    let d = &row[j] * &f;
                    v[j] -= d;
                }
                for j in 0..=n {
                    let d = &rc[j] * &f;
                    comb[j] -= d;
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            Some(pc) => basis.push((v, comb, pc)),
            None => {
                // comb · (I, M, …, M^k) = 0 with comb[k] = 1.
                let coeffs: Vec<BigInt> = comb[..=k].iter().map(|x| x.to_integer()).collect();
                debug_assert!(comb[..=k].iter().all(|x| x.is_integer()));
                return IntPolynomial::new(coeffs);
            }
        }
        power = power.mul(m);
    }
    unreachable!("Cayley-Hamilton bounds the degree by n")
}

/// LLL reduction (δ = 0.99) of real row vectors; returns the integer transform `U`
/// with `reduced = U · basis`.
pub fn lll_f64(basis: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<i64>>) {
    let k = basis.len();
    let mut b: Vec<Vec<f64>> = basis.to_vec();
    let mut u: Vec<Vec<i64>> =
        (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect();
    if k == 0 {
        return (b, u);
    }
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let gso = |b: &[Vec<f64>]| {
        let mut bs: Vec<Vec<f64>> = Vec::with_capacity(k);
        let mut mu = vec![vec![0.0; k]; k];
        let mut nrm = vec![0.0; k];
        for i in 0..k {
            let mut v = b[i].clone();
            for j in 0..i {
                mu[i][j] = if nrm[j] > 0.0 { dot(&b[i], &bs[j]) / nrm[j] } else { 0.0 };
                for (x, y) in v.iter_mut().zip(&bs[j]) {
                    *x -= mu[i][j] * y;
                }
            }
            nrm[i] = dot(&v, &v);
            bs.push(v);
        }
        (mu, nrm)
    };
    let mut i = 1;
    let mut guard = 0;
    while i < k && guard < 100_000 {
        guard += 1;
        for j in (0..i).rev() {
            let q = gso(&b).0[i][j].round();
            if q != 0.0 {
                let qi = q as i64;
                let bj = b[j].clone();
                for (x, y) in b[i].iter_mut().zip(&bj) {
                    *x -= q * y;
                }
                let uj = u[j].clone();
                for (x, y) in u[i].iter_mut().zip(&uj) {
                    *x -= qi * y;
                }
            }
        }
        let (mu, nrm) = gso(&b);
        if nrm[i] >= (0.99 - mu[i][i - 1] * mu[i][i - 1]) * nrm[i - 1] {
            i += 1;
        } else {
            b.swap(i, i - 1);
            u.swap(i, i - 1);
            i = i.max(2) - 1;
        }
    }
    (b, u)
}

/// Sign of a rational.
pub fn qsign(x: &BigRational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let a = IntMatrix::from_i64_rows(&[&[2, 1], &[1, 1]]);
        let inv = unimodular_inverse(&a).unwrap();
        assert_eq!(a.mul(&inv), IntMatrix::identity(2));
        let b = IntMatrix::from_i64_rows(&[&[2, 0], &[0, 3]]);
        let (n, d) = inverse(&b).unwrap();
        assert_eq!(d, BigInt::from(6));
        assert_eq!(b.mul(&n), IntMatrix::identity(2).scale(&d));
        assert!(inverse(&IntMatrix::zeros(2, 2)).is_none());
    }

    #[test]
    fn kernel_over_fp() {
        let a = vec![vec![1, 2, 3], vec![2, 4, 6]];
        let k = kernel_mod_p(&a, 3, 7);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s = (v[0] + 2 * v[1] + 3 * v[2]) % 7;
            assert_eq!(s, 0);
        }
    }

    #[test]
    fn minimal_polynomials() {
        let c = IntMatrix::from_i64_rows(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, -1]]);
        assert_eq!(min_poly(&c), "T^3 + T^2 - 1".parse().unwrap());
        assert_eq!(min_poly(&IntMatrix::identity(3)), "T - 1".parse().unwrap());
        let d = IntMatrix::from_i64_rows(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 3]]);
        assert_eq!(min_poly(&d), "T^2 - 5*T + 6".parse().unwrap());
    }

    #[test]
    fn lll_shortens() {
        let b = vec![vec![1.0, 0.0], vec![1000.0, 1.0]];
        let (r, u) = lll_f64(&b);
        assert!(r.iter().all(|v| v.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-9));
        assert_eq!(u[0].len(), 2);
    }
}

/// All nonzero integer vectors `x` (up to sign: first nonzero entry positive)
/// with `xᵀ G x ≤ bound` for a positive definite Gram matrix `G` (Fincke-Pohst).
pub fn short_vectors(gram: &[Vec<f64>], bound: f64) -> Vec<Vec<i64>> {
    let n = gram.len();
    // Q(x) = Σ q[i][i] (x_i + Σ_{j>i} q[i][j] x_j)²
    let mut q = gram.to_vec();
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
    }
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    fn rec(i: usize, rem: f64, q: &[Vec<f64>], x: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let n = q.len();
        let center: f64 = -(i + 1..n).map(|j| q[i][j] * x[j] as f64).sum::<f64>();
        let half = (rem.max(0.0) / q[i][i]).sqrt();
        let lo = (center - half).ceil() as i64;
        let hi = (center + half).floor() as i64;
        for v in lo..=hi {
            x[i] = v;
            let d = v as f64 - center;
            let r = rem - q[i][i] * d * d;
            if r < 0.0 {
                continue;
            }
            if i == 0 {
                if let Some(&f) = x.iter().find(|&&c| c != 0) {
                    if f > 0 {
                        out.push(x.clone());
                    }
                }
            } else {
                rec(i - 1, r, q, x, out);
            }
        }
        x[i] = 0;
    }
    if n > 0 {
        rec(n - 1, bound, &q, &mut x, &mut out);
    }
    out
}

#[cfg(test)]
mod fp_tests {
    use super::*;

    #[test]
    fn short_vectors_of_z2() {
        let g = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let v = short_vectors(&g, 1.0);
        assert_eq!(v.len(), 2);
        let v = short_vectors(&g, 2.0);
        assert_eq!(v.len(), 4);
        let g = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        assert_eq!(short_vectors(&g, 2.0).len(), 3);
    }
}
