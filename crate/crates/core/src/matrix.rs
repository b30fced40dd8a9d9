//! Integer matrices with Hermite and Smith normal forms.
//!
//! Column convention: a matrix `M` presents the lattice spanned by its
//! columns, and `Z^rows / M·Z^cols` is its cokernel.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<BigInt>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(IntMatrix { rows: r, cols: c, data: rows.iter().flatten().cloned().collect() })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let v: Vec<Vec<BigInt>> =
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::from_rows(&v).expect("rectangular")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<BigInt>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
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

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    fn at(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        let mut r = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        *r.at(i, j) += a * b;
                    }
                }
            }
        }
        r
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * k).collect() }
    }

    /// Horizontal concatenation.
    pub fn hstack(blocks: &[IntMatrix]) -> Self {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, rows);
            for i in 0..rows {
                for j in 0..b.cols {
                    m.set(i, off + j, b.get(i, j).clone());
                }
            }
            off += b.cols;
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn trace(&self) -> BigInt {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn pow(&self, mut e: u64) -> Self {
        assert_eq!(self.rows, self.cols);
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = 1;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a.get(i, k).is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        let d = a.get(n - 1, n - 1).clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    /// Kronecker product; `(A ⊗ B)[(i,k),(j,l)] = A[i,j]·B[k,l]`.
    pub fn kronecker(&self, o: &Self) -> Self {
        let mut m = Self::zeros(self.rows * o.rows, self.cols * o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..o.rows {
                    for l in 0..o.cols {
                        m.set(i * o.rows + k, j * o.cols + l, a * o.get(k, l));
                    }
                }
            }
        }
        m
    }

    /// Characteristic polynomial `det(x·I - M)` by Faddeev-LeVerrier over Z.
    pub fn char_poly(&self) -> crate::poly::IntPolynomial {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut c = vec![BigInt::zero(); n + 1];
        c[n] = BigInt::one();
        let mut m = Self::zeros(n, n);
        let id = Self::identity(n);
        for k in 1..=n {
            m = self.mul(&m).add(&id.scale(&c[n - k + 1]));
            let am = self.mul(&m);
            let t = am.trace();
            let (q, r) = (-t).div_rem(&BigInt::from(k));
            debug_assert!(r.is_zero());
            c[n - k] = q;
        }
        crate::poly::IntPolynomial::new(c)
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

    /// `col[dst] += q·col[src]`
    fn col_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, src) * q;
            *self.at(i, dst) += v;
        }
    }

    /// `row[dst] += q·row[src]`
    fn row_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(src, j) * q;
            *self.at(dst, j) += v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    /// Column Hermite normal form with unimodular transform.
    pub fn hnf_with_transform(&self) -> HnfResult {
        let (n, k) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut u = Self::identity(k);
        let mut ui = Self::identity(k);
        // Column op col_j += q col_i is U <- U E, U^-1 <- E^-1 U^-1 (row_i -= q row_j).
        let col_op = |a: &mut IntMatrix, u: &mut IntMatrix, ui: &mut IntMatrix, dst: usize, src: usize, q: &BigInt| {
            a.col_axpy(dst, src, q);
            u.col_axpy(dst, src, q);
            ui.row_axpy(src, dst, &-q);
        };
        let mut piv = k;
        let mut pivot_rows = Vec::new();
        for i in (0..n).rev() {
            if piv == 0 {
                break;
            }
            loop {
                let nz: Vec<usize> = (0..piv).filter(|&j| !a.get(i, j).is_zero()).collect();
                if nz.is_empty() {
                    break;
                }
                let jmin = *nz.iter().min_by_key(|&&j| a.get(i, j).abs()).unwrap();
                if nz.len() == 1 {
                    let p = piv - 1;
                    a.swap_cols(jmin, p);
                    u.swap_cols(jmin, p);
                    ui.swap_rows(jmin, p);
                    if a.get(i, p).is_negative() {
                        a.negate_col(p);
                        u.negate_col(p);
                        ui.negate_row(p);
                    }
                    let d = a.get(i, p).clone();
                    for j in p + 1..k {
                        let q = a.get(i, j).div_floor(&d);
                        col_op(&mut a, &mut u, &mut ui, j, p, &-q);
                    }
                    piv = p;
                    pivot_rows.push(i);
                    break;
                }
                let d = a.get(i, jmin).clone();
                for &j in &nz {
                    if j != jmin {
                        let q = a.get(i, j).div_floor(&d);
                        col_op(&mut a, &mut u, &mut ui, j, jmin, &-q);
                    }
                }
            }
        }
        let r = k - piv;
        // Reorder so that M·U = [H | 0].
        let perm: Vec<usize> = (piv..k).chain(0..piv).collect();
        let mut h = Self::zeros(n, r);
        for (jj, &j) in perm.iter().take(r).enumerate() {
            for i in 0..n {
                h.set(i, jj, a.get(i, j).clone());
            }
        }
        let mut up = Self::zeros(k, k);
        let mut uip = Self::zeros(k, k);
        for (jj, &j) in perm.iter().enumerate() {
            for i in 0..k {
                up.set(i, jj, u.get(i, j).clone());
                uip.set(jj, i, ui.get(j, i).clone());
            }
        }
        pivot_rows.reverse();
        HnfResult { h, u: up, u_inv: uip, rank: r, pivot_rows }
    }

    /// Column Hermite normal form (basis of the column lattice).
    pub fn hnf(&self) -> IntMatrix {
        self.hnf_with_transform().h
    }

    /// Smith normal form `U·M·V = D` with unimodular `U`, `V`.
    pub fn snf_with_transform(&self) -> SnfResult {
        let (n, k) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut u = Self::identity(n);
        let mut v = Self::identity(k);
        let m = n.min(k);
        for t in 0..m {
            loop {
                let mut best: Option<(usize, usize)> = None;
                for i in t..n {
                    for j in t..k {
                        let x = a.get(i, j);
                        if !x.is_zero()
                            && best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs())
                        {
                            best = Some((i, j));
                        }
                    }
                }
                let Some((bi, bj)) = best else {
                    return finish_snf(a, u, v);
                };
                a.swap_rows(t, bi);
                u.swap_rows(t, bi);
                a.swap_cols(t, bj);
                v.swap_cols(t, bj);
                let mut clean = true;
                let d = a.get(t, t).clone();
                for i in t + 1..n {
                    let q = a.get(i, t).div_floor(&d);
                    a.row_axpy(i, t, &-&q);
                    u.row_axpy(i, t, &-&q);
                    if !a.get(i, t).is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..k {
                    let q = a.get(t, j).div_floor(&d);
                    a.col_axpy(j, t, &-&q);
                    v.col_axpy(j, t, &-&q);
                    if !a.get(t, j).is_zero() {
                        clean = false;
                    }
                }
                if !clean {
                    continue;
                }
                let bad = (t + 1..n)
                    .flat_map(|i| (t + 1..k).map(move |j| (i, j)))
                    .find(|&(i, j)| !a.get(i, j).is_multiple_of(&d));
                match bad {
                    Some((i, _)) => {
                        a.row_axpy(t, i, &BigInt::one());
                        u.row_axpy(t, i, &BigInt::one());
                    }
                    None => break,
                }
            }
            if a.get(t, t).is_negative() {
                a.negate_row(t);
                u.negate_row(t);
            }
        }
        finish_snf(a, u, v)
    }

    /// Invariant factors (all positive, including 1s) and the free-rank defect of the cokernel.
    pub fn snf(&self) -> (Vec<BigInt>, usize) {
        let s = self.snf_with_transform();
        let nz: Vec<BigInt> = s.diagonal.iter().filter(|d| !d.is_zero()).cloned().collect();
        let defect = self.rows - nz.len();
        (nz, defect)
    }

    /// Solves `H·c = v` for square upper-triangular `H`; `None` if not integral.
    pub fn solve_upper_integral(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let n = self.rows;
        assert_eq!(self.cols, n);
        let mut c = vec![BigInt::zero(); n];
        for i in (0..n).rev() {
            let mut r = v[i].clone();
            for j in i + 1..n {
                r -= self.get(i, j) * &c[j];
            }
            let d = self.get(i, i);
            if d.is_zero() {
                if !r.is_zero() {
                    return None;
                }
                continue;
            }
            let (q, rem) = r.div_rem(d);
            if !rem.is_zero() {
                return None;
            }
            c[i] = q;
        }
        Some(c)
    }

    /// Largest absolute entry bit length.
    pub fn max_bits(&self) -> u64 {
        self.data.iter().map(|x| x.bits()).max().unwrap_or(0)
    }
}

fn finish_snf(a: IntMatrix, u: IntMatrix, v: IntMatrix) -> SnfResult {
    let m = a.rows.min(a.cols);
    let diagonal = (0..m).map(|i| a.get(i, i).abs()).collect();
    SnfResult { diagonal, u, v, d: a }
}

#[derive(Clone, Debug)]
pub struct HnfResult {
    /// `rows × rank`, upper echelon with positive pivots and reduced entries right of each pivot.
    pub h: IntMatrix,
    /// `M·u = [h | 0]`
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub rank: usize,
    /// Row index of each pivot, by column.
    pub pivot_rows: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct SnfResult {
    /// `|d_i|` along the diagonal, with divisibility `d_i | d_{i+1}` among the nonzero ones.
    pub diagonal: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub d: IntMatrix,
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let r: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", r.join(", "))?;
        }
        Ok(())
    }
}

/// JSON form: list of rows of decimal strings.
impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            self.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        matrix_from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// Accepts rows of integers or decimal strings.
pub fn matrix_from_json(v: &serde_json::Value) -> Result<IntMatrix> {
    let rows = v.as_array().ok_or_else(|| Error::Malformed("matrix must be an array".into()))?;
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        let r = r.as_array().ok_or_else(|| Error::Malformed("row must be an array".into()))?;
        let mut row = Vec::with_capacity(r.len());
        for x in r {
            row.push(bigint_from_json(x)?);
        }
        out.push(row);
    }
    IntMatrix::from_rows(&out)
}

pub fn bigint_from_json(x: &serde_json::Value) -> Result<BigInt> {
    match x {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Malformed(format!("non-integer entry {n}"))),
        serde_json::Value::String(s) => {
            s.parse::<BigInt>().map_err(|_| Error::Malformed(format!("bad integer `{s}`")))
        }
        _ => Err(Error::Malformed("matrix entry must be an integer".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows)
    }

    #[test]
    fn hnf_identity_and_triangular() {
        assert_eq!(IntMatrix::identity(3).hnf(), IntMatrix::identity(3));
        let h = m(&[&[2, 4], &[0, 2]]).hnf();
        assert_eq!(h, m(&[&[2, 0], &[0, 2]]));
        let h = m(&[&[-3, 5], &[0, 7]]).hnf();
        assert_eq!(h, m(&[&[3, 2], &[0, 7]]));
    }

    #[test]
    fn hnf_transform_reconstructs() {
        let a = m(&[&[4, 6, 2, 7], &[1, -3, 5, 0], &[2, 2, 2, 2]]);
        let r = a.hnf_with_transform();
        assert_eq!(r.rank, 3);
        let prod = a.mul(&r.u);
        for i in 0..3 {
            for j in 0..4 {
                let want = if j < 3 { r.h.get(i, j).clone() } else { BigInt::zero() };
                assert_eq!(prod.get(i, j), &want);
            }
        }
        assert_eq!(r.u.mul(&r.u_inv), IntMatrix::identity(4));
    }

    #[test]
    fn snf_small() {
        let (f, d) = IntMatrix::identity(3).snf();
        assert_eq!((f, d), (vec![BigInt::one(); 3], 0));
        let (f, d) = IntMatrix::zeros(3, 3).snf();
        assert_eq!((f.len(), d), (0, 3));
        let (f, _) = m(&[&[2, 0], &[0, 3]]).snf();
        assert_eq!(f, vec![BigInt::from(1), BigInt::from(6)]);
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = a.snf_with_transform();
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
    }

    #[test]
    fn det_and_char_poly() {
        let a = m(&[&[2, 1], &[1, 2]]);
        assert_eq!(a.det(), BigInt::from(3));
        let c = m(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, -1]]);
        assert_eq!(c.char_poly().to_string(), "T^3 + T^2 - 1");
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), BigInt::from(-1));
    }

    #[test]
    fn upper_solve() {
        let h = m(&[&[2, 1], &[0, 3]]);
        assert_eq!(h.solve_upper_integral(&[BigInt::from(5), BigInt::from(3)]), Some(vec![BigInt::from(2), BigInt::from(1)]));
        assert_eq!(h.solve_upper_integral(&[BigInt::from(1), BigInt::from(0)]), None);
    }
}
