//! Orders in a number field `Q[T]/(f)`: the power-basis order `Z[T̄]`,
//! finite-index enlargements, element arithmetic, and Round-2 maximalization.
//!
//! A [`SubOrder`] basis element `ω_j` is `(1/den) Σ_k basis_num[k][j] T̄^k`;
//! `basis_num` is a column HNF, so it is upper triangular and `ω_0 = 1`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{is_probable_prime, trial_factor, CofactorStatus, DEFAULT_TRIAL_BOUND};
use crate::interval::{BigFloatInterval, ComplexInterval};
use crate::linalg::{bigint_mod, kernel_mod_p, mulmod};
use crate::fpoly as fp;
use crate::matrix::IntMatrix;
use crate::poly::IntPolynomial;
use crate::roots::{isolate_roots, EmbeddingSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub s: usize,
    pub t: usize,
}

/// `(s, t)` from the Sturm count of real roots.
pub fn signature(f: &IntPolynomial) -> Signature {
    let s = f.count_real_roots();
    Signature { s, t: (f.degree() - s) / 2 }
}

/// `Z[T]/(f)` for a monic irreducible `f`.
#[derive(Clone, Debug)]
pub struct MonogenicOrder {
    f: IntPolynomial,
    disc_f: BigInt,
}

impl MonogenicOrder {
    /// Checks that `f` is monic of degree at least 2 and irreducible.
    pub fn build(f: &IntPolynomial) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if !f.is_monic() {
            return Err(Error::NotMonic);
        }
        if f.degree() < 2 {
            return Err(Error::DegreeTooSmall(f.degree()));
        }
        if let Some(g) = find_factor(f)? {
            return Err(Error::Reducible { factor: Some(g.to_string()) });
        }
        Ok(MonogenicOrder { disc_f: f.discriminant()?, f: f.clone() })
    }

    pub fn poly(&self) -> &IntPolynomial {
        &self.f
    }

    pub fn degree(&self) -> usize {
        self.f.degree()
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc_f
    }

    pub fn signature(&self) -> Signature {
        signature(&self.f)
    }

    pub fn power_basis(&self) -> SubOrder {
        let n = self.degree();
        SubOrder::from_basis(&self.f, IntMatrix::identity(n), BigInt::one(), true)
            .expect("power basis is an order")
    }

    /// Maximal order, with `certified = false` when the square part of the
    /// discriminant could not be fully determined.
    pub fn maximalize(&self) -> SubOrder {
        maximalize(&self.power_basis())
    }
}

/// Element coordinates in the basis of the owning order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrderElement {
    pub coords: Vec<BigInt>,
}

impl OrderElement {
    pub fn new(coords: Vec<BigInt>) -> Self {
        OrderElement { coords }
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        OrderElement { coords: c.iter().map(|&x| BigInt::from(x)).collect() }
    }

    pub fn neg(&self) -> Self {
        OrderElement { coords: self.coords.iter().map(|x| -x).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }
}

#[derive(Clone, Debug)]
pub struct SubOrder {
    f: IntPolynomial,
    n: usize,
    disc_f: BigInt,
    basis_num: IntMatrix,
    den: BigInt,
    disc: BigInt,
    index: BigInt,
    certified: bool,
    /// `mult[i]`: matrix of `y ↦ ω_i·y`.
    mult: Vec<IntMatrix>,
}

impl SubOrder {
    /// Order with basis columns `basis_num / den`; fails if the lattice is not
    /// a ring containing `Z[T̄]`.
    pub fn from_basis(f: &IntPolynomial, basis_num: IntMatrix, den: BigInt, certified: bool) -> Result<Self> {
        let n = f.degree();
        if basis_num.rows() != n || basis_num.cols() != n {
            return Err(Error::Dimension(format!("basis must be {n}×{n}")));
        }
        let mut g = den.clone();
        for r in basis_num.to_rows() {
            for x in r {
                g = g.gcd(&x);
            }
        }
        let (num, den) = if g.is_one() || g.is_zero() {
            (basis_num, den)
        } else {
            let rows: Vec<Vec<BigInt>> =
                basis_num.to_rows().iter().map(|r| r.iter().map(|x| x / &g).collect()).collect();
            (IntMatrix::from_rows(&rows)?, &den / &g)
        };
        let h = num.hnf();
        if h.cols() != n {
            return Err(Error::Degenerate("basis is rank deficient".into()));
        }
        let disc_f = f.discriminant()?;
        let det: BigInt = (0..n).map(|i| h.get(i, i).clone()).product();
        let idx = BigRational::new(den.pow(n as u32), det.clone());
        if !idx.is_integer() {
            return Err(Error::Malformed("lattice does not contain Z[T]".into()));
        }
        let index = idx.to_integer();
        let (disc, r) = disc_f.div_rem(&(&index * &index));
        if !r.is_zero() {
            return Err(Error::Malformed("index squared does not divide disc".into()));
        }
        let scaled = h.scale(&den);
        let cols: Vec<IntPolynomial> = (0..n).map(|j| IntPolynomial::new(h.column(j))).collect();
        let mut mult = vec![IntMatrix::zeros(n, n); n];
        for i in 0..n {
            for j in i..n {
                let prod = (&cols[i] * &cols[j]).div_rem_monic(f).1;
                let v: Vec<BigInt> = (0..n).map(|k| prod.coeff(k)).collect();
                let c = scaled
                    .solve_upper_integral(&v)
                    .ok_or_else(|| Error::Malformed("basis is not closed under multiplication".into()))?;
                for (k, x) in c.into_iter().enumerate() {
                    mult[i].set(k, j, x.clone());
                    mult[j].set(k, i, x);
                }
            }
        }
        Ok(SubOrder { f: f.clone(), n, disc_f, basis_num: h, den, disc, index, certified, mult })
    }

    pub fn poly(&self) -> &IntPolynomial {
        &self.f
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn disc_f(&self) -> &BigInt {
        &self.disc_f
    }

    /// `[O : Z[T̄]]`
    pub fn index(&self) -> &BigInt {
        &self.index
    }

    pub fn certified(&self) -> bool {
        self.certified
    }

    pub fn basis_num(&self) -> &IntMatrix {
        &self.basis_num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn signature(&self) -> Signature {
        signature(&self.f)
    }

    pub fn structure(&self) -> &[IntMatrix] {
        &self.mult
    }

    pub fn one(&self) -> OrderElement {
        let mut c = vec![BigInt::zero(); self.n];
        c[0] = BigInt::one();
        OrderElement { coords: c }
    }

    pub fn basis_element(&self, i: usize) -> OrderElement {
        let mut c = vec![BigInt::zero(); self.n];
        c[i] = BigInt::one();
        OrderElement { coords: c }
    }

    pub fn from_int(&self, k: i64) -> OrderElement {
        let mut c = vec![BigInt::zero(); self.n];
        c[0] = BigInt::from(k);
        OrderElement { coords: c }
    }

    /// Element `num(T̄)/d`, if it lies in the order.
    pub fn from_poly_over(&self, num: &IntPolynomial, d: &BigInt) -> Option<OrderElement> {
        let r = num.div_rem_monic(&self.f).1;
        // B c = den·num/d, solved as (d·B) c = den·num.
        let v: Vec<BigInt> = (0..self.n).map(|k| r.coeff(k) * &self.den).collect();
        self.basis_num.scale(d).solve_upper_integral(&v).map(OrderElement::new)
    }

    pub fn from_poly(&self, p: &IntPolynomial) -> Option<OrderElement> {
        self.from_poly_over(p, &BigInt::one())
    }

    /// `T̄`
    pub fn generator(&self) -> OrderElement {
        self.from_poly(&IntPolynomial::x()).expect("T lies in every order")
    }

    /// `(num, d)` with `x = num(T̄)/d` in lowest terms.
    pub fn to_poly(&self, x: &OrderElement) -> (IntPolynomial, BigInt) {
        let v = self.basis_num.mul_vec(&x.coords);
        let mut g = self.den.clone();
        for c in &v {
            g = g.gcd(c);
        }
        if g.is_zero() {
            return (IntPolynomial::zero(), BigInt::one());
        }
        (IntPolynomial::new(v.iter().map(|c| c / &g).collect()), &self.den / &g)
    }

    /// `x = Σ c_i ω_i` rendered in the power basis.
    pub fn display_element(&self, x: &OrderElement) -> String {
        let (p, d) = self.to_poly(x);
        if d.is_one() {
            p.to_string()
        } else {
            format!("({p})/{d}")
        }
    }

    pub fn mult_matrix(&self, x: &OrderElement) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.n, self.n);
        for (i, c) in x.coords.iter().enumerate() {
            if !c.is_zero() {
                m = m.add(&self.mult[i].scale(c));
            }
        }
        m
    }

    pub fn add(&self, x: &OrderElement, y: &OrderElement) -> OrderElement {
        OrderElement::new(x.coords.iter().zip(&y.coords).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, x: &OrderElement, y: &OrderElement) -> OrderElement {
        OrderElement::new(x.coords.iter().zip(&y.coords).map(|(a, b)| a - b).collect())
    }

    pub fn mul(&self, x: &OrderElement, y: &OrderElement) -> OrderElement {
        OrderElement::new(self.mult_matrix(x).mul_vec(&y.coords))
    }

    pub fn pow(&self, x: &OrderElement, e: i64) -> Result<OrderElement> {
        let base = if e < 0 { self.unit_inverse(x)? } else { x.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        Ok(acc)
    }

    /// `x^{-1}` for a unit, via `M_x^{-1} e_0`.
    pub fn unit_inverse(&self, x: &OrderElement) -> Result<OrderElement> {
        let m = self.mult_matrix(x);
        let inv = crate::linalg::unimodular_inverse(&m).ok_or(Error::NotAUnit)?;
        Ok(OrderElement::new(inv.column(0)))
    }

    /// `x / y` if it lies in the order.
    pub fn exact_div(&self, x: &OrderElement, y: &OrderElement) -> Option<OrderElement> {
        let m = self.mult_matrix(y);
        let q = crate::linalg::solve(&m, &x.coords)?;
        q.iter().all(|c| c.is_integer()).then(|| OrderElement::new(q.iter().map(|c| c.to_integer()).collect()))
    }

    pub fn norm(&self, x: &OrderElement) -> BigInt {
        self.mult_matrix(x).det()
    }

    pub fn trace(&self, x: &OrderElement) -> BigInt {
        self.mult_matrix(x).trace()
    }

    pub fn char_poly(&self, x: &OrderElement) -> IntPolynomial {
        self.mult_matrix(x).char_poly()
    }

    pub fn is_unit(&self, x: &OrderElement) -> bool {
        self.norm(x).abs().is_one()
    }

    /// Discriminant recomputed from the trace form `det(Tr(ω_i ω_j))`.
    pub fn trace_form_disc(&self) -> BigInt {
        let n = self.n;
        let tr: Vec<BigInt> = (0..n).map(|i| self.mult[i].trace()).collect();
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                // Tr(ω_i ω_j) = Σ_k c_ijk Tr(ω_k)
                let col = self.mult[i].column(j);
                let v: BigInt = col.iter().zip(&tr).map(|(a, b)| a * b).sum();
                m.set(i, j, v);
            }
        }
        m.det()
    }

    /// Whether `num(T̄)/d` is integral (its characteristic polynomial is in `Z[x]`).
    pub fn is_integral(&self, num: &IntPolynomial, d: &BigInt) -> bool {
        let pb = MonogenicOrder { f: self.f.clone(), disc_f: self.disc_f.clone() }.power_basis();
        let x = pb.from_poly(num).expect("power basis contains integer polynomials");
        let cp = pb.char_poly(&x);
        (0..self.n).all(|k| (cp.coeff(k) % d.pow((self.n - k) as u32)).is_zero())
    }

    /// Re-expresses an element of `from` in this order's basis.
    pub fn coerce(&self, from: &SubOrder, x: &OrderElement) -> Result<OrderElement> {
        if from.f != self.f {
            return Err(Error::Malformed("orders belong to different polynomials".into()));
        }
        let (p, d) = from.to_poly(x);
        self.from_poly_over(&p, &d).ok_or(Error::NotIntegral)
    }

    pub fn embeddings(&self, precision: usize) -> Result<EmbeddingSet> {
        isolate_roots(&self.f, precision)
    }

    /// Real embeddings `σ_1(x), …, σ_s(x)`.
    pub fn embed_real(&self, x: &OrderElement, emb: &EmbeddingSet) -> Vec<BigFloatInterval> {
        let (p, d) = self.to_poly(x);
        let prec = emb.precision + 64;
        let dd = BigFloatInterval::from_int(&d, prec);
        emb.real_roots
            .iter()
            .map(|r| crate::roots::eval_real_interval(&p, &r.with_precision(prec)).div(&dd))
            .collect()
    }

    /// Complex embeddings (one per conjugate pair).
    pub fn embed_complex(&self, x: &OrderElement, emb: &EmbeddingSet) -> Vec<ComplexInterval> {
        let (p, d) = self.to_poly(x);
        let prec = emb.precision + 64;
        let dd = BigFloatInterval::from_int(&d, prec);
        emb.complex_roots
            .iter()
            .map(|z| {
                let z = ComplexInterval::new(z.re.with_precision(prec), z.im.with_precision(prec));
                let mut acc = ComplexInterval::from_i64(0, prec);
                for c in p.coeffs().iter().rev() {
                    acc = acc.mul(&z).add(&ComplexInterval::real(BigFloatInterval::from_int(c, prec)));
                }
                ComplexInterval::new(acc.re.div(&dd), acc.im.div(&dd))
            })
            .collect()
    }

    /// Embeddings of the basis elements in f64: `real[j][i] = σ_j(ω_i)`,
    /// `complex[j][i] = σ_{s+j}(ω_i)`.
    pub fn basis_embeddings_f64(&self, emb: &EmbeddingSet) -> BasisEmbeddings {
        let reals = emb.real_f64();
        let cplx = emb.complex_f64();
        let d = self.den.to_f64().unwrap();
        let polys: Vec<Vec<f64>> =
            (0..self.n).map(|j| self.basis_num.column(j).iter().map(|c| c.to_f64().unwrap() / d).collect()).collect();
        let ev_r = |p: &[f64], x: f64| p.iter().rev().fold(0.0, |a, c| a * x + c);
        let ev_c = |p: &[f64], z: num_complex::Complex64| {
            p.iter().rev().fold(num_complex::Complex64::new(0.0, 0.0), |a, c| a * z + c)
        };
        BasisEmbeddings {
            real: reals.iter().map(|&r| polys.iter().map(|p| ev_r(p, r)).collect()).collect(),
            complex: cplx.iter().map(|&z| polys.iter().map(|p| ev_c(p, z)).collect()).collect(),
        }
    }

    /// Bases stay in HNF; this is the LLL transform `U` (rows are coordinate
    /// vectors) making `U·ω` reduced for the `T_2` form.
    pub fn reduced_basis_transform(&self, emb: &EmbeddingSet) -> Vec<Vec<i64>> {
        let be = self.basis_embeddings_f64(emb);
        let vecs: Vec<Vec<f64>> = (0..self.n)
            .map(|i| {
                let mut v: Vec<f64> = be.real.iter().map(|r| r[i]).collect();
                for c in &be.complex {
                    v.push(c[i].re * std::f64::consts::SQRT_2);
                    v.push(c[i].im * std::f64::consts::SQRT_2);
                }
                v
            })
            .collect();
        crate::linalg::lll_f64(&vecs).1
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "f": self.f.to_string(),
            "basis_num": self.basis_num,
            "den": self.den.to_string(),
            "disc": self.disc.to_string(),
            "index": self.index.to_string(),
            "certified": self.certified,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let f: IntPolynomial = v["f"].as_str().ok_or_else(|| Error::Malformed("missing f".into()))?.parse()?;
        let b = crate::matrix::matrix_from_json(&v["basis_num"])?;
        let den = crate::matrix::bigint_from_json(&v["den"])?;
        let certified = v["certified"].as_bool().unwrap_or(false);
        SubOrder::from_basis(&f, b, den, certified)
    }
}

#[derive(Clone, Debug)]
pub struct BasisEmbeddings {
    pub real: Vec<Vec<f64>>,
    pub complex: Vec<Vec<num_complex::Complex64>>,
}

impl BasisEmbeddings {
    pub fn real_of(&self, c: &[f64]) -> Vec<f64> {
        self.real.iter().map(|r| r.iter().zip(c).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn complex_of(&self, c: &[f64]) -> Vec<num_complex::Complex64> {
        self.complex.iter().map(|r| r.iter().zip(c).map(|(a, b)| a * b).sum()).collect()
    }
}

// ---------------------------------------------------------------------------
// Irreducibility

/// Degrees `d` for which a factor of degree `d` is consistent with the
/// factorization pattern modulo several primes.
pub fn possible_factor_degrees(f: &IntPolynomial) -> BTreeSet<usize> {
    let n = f.degree();
    let disc = f.discriminant().unwrap_or_default();
    let mut allowed: BTreeSet<usize> = (0..=n).collect();
    let mut used = 0;
    for p in crate::factor::primes_up_to(400) {
        if used >= 24 || allowed.len() <= 2 {
            break;
        }
        if (&disc % p).is_zero() {
            continue;
        }
        used += 1;
        let fp: Vec<u64> = fp::trim(f.coeffs().iter().map(|c| bigint_mod(c, p)).collect());
        let degs = fp::factor_degrees(&fp, p);
        let mut sums = BTreeSet::from([0usize]);
        for d in degs {
            let add: Vec<usize> = sums.iter().map(|s| s + d).collect();
            sums.extend(add);
        }
        allowed = allowed.intersection(&sums).copied().collect();
    }
    allowed
}

/// A nontrivial monic factor of `f`, or `None` if `f` is irreducible (certified).
pub fn find_factor(f: &IntPolynomial) -> Result<Option<IntPolynomial>> {
    let n = f.degree();
    if n <= 1 {
        return Ok(None);
    }
    if !f.is_squarefree() {
        let g = f.gcd(&f.derivative());
        let g = if g.lead().is_negative() { -&g } else { g };
        return Ok(Some(g));
    }
    let allowed = possible_factor_degrees(f);
    let degs: Vec<usize> = allowed.iter().copied().filter(|&d| d >= 1 && 2 * d <= n).collect();
    if degs.is_empty() {
        return Ok(None);
    }
    // Every monic integer factor is ∏(x - r) over a conjugation-closed root subset.
    let emb = isolate_roots(f, 128)?;
    let roots = emb.all_roots();
    let s = emb.s();
    let t = emb.t();
    for &d in &degs {
        for k in 0..=t.min(d / 2) {
            let nr = d - 2 * k;
            if nr > s {
                continue;
            }
            for rs in combinations(s, nr) {
                for cs in combinations(t, k) {
                    let mut sel: Vec<ComplexInterval> = rs.iter().map(|&i| roots[i].clone()).collect();
                    for &j in &cs {
                        sel.push(roots[s + j].clone());
                        sel.push(roots[s + t + j].clone());
                    }
                    if let Some(g) = integer_product(&sel) {
                        if f.div_exact(&g).is_some() {
                            return Ok(Some(g));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

fn integer_product(roots: &[ComplexInterval]) -> Option<IntPolynomial> {
    let p = 128;
    let mut c = vec![ComplexInterval::from_i64(1, p)];
    for r in roots {
        let mut next = vec![ComplexInterval::from_i64(0, p); c.len() + 1];
        for (i, x) in c.iter().enumerate() {
            next[i + 1] = next[i + 1].add(x);
            next[i] = next[i].sub(&x.mul(r));
        }
        c = next;
    }
    let mut out = Vec::with_capacity(c.len());
    for z in &c {
        if !z.im.contains_zero() {
            return None;
        }
        out.push(z.re.unique_integer()?);
    }
    Some(IntPolynomial::new(out))
}

/// `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub fn is_irreducible(f: &IntPolynomial) -> bool {
    f.degree() >= 1 && matches!(find_factor(f), Ok(None))
}

// ---------------------------------------------------------------------------
// Round 2

/// Primes whose square divides `disc_f`, and whether that list is complete.
pub fn square_divisor_primes(disc: &BigInt) -> (Vec<BigInt>, bool) {
    let fac = trial_factor(disc, DEFAULT_TRIAL_BOUND);
    let mut primes = fac.square_divisor_primes();
    let mut complete = fac.squarefree_certified;
    if fac.cofactor_status == CofactorStatus::Composite && !fac.squarefree_certified {
        let r = fac.cofactor.sqrt();
        if &r * &r == fac.cofactor && is_probable_prime(&r) {
            complete = true;
            if !primes.contains(&r) {
                primes.push(r);
            }
        }
    }
    primes.sort();
    primes.dedup();
    (primes, complete)
}

/// Maximal order containing `o`, by Round 2 at every prime `p` with `p² | disc`.
pub fn maximalize(o: &SubOrder) -> SubOrder {
    let (primes, complete) = square_divisor_primes(o.disc());
    let mut cur = o.clone();
    for p in primes {
        let Some(pu) = p.to_u64() else { continue };
        while (cur.disc() % (&p * &p)).is_zero() {
            match enlarge_at(&cur, pu) {
                Some(next) => cur = next,
                None => break,
            }
        }
    }
    cur.certified = complete && o.certified;
    cur
}

/// `p`-maximal check and one Round-2 enlargement step; `None` if `o` is `p`-maximal.
pub fn enlarge_at(o: &SubOrder, p: u64) -> Option<SubOrder> {
    let n = o.n;
    let mp: Vec<Vec<Vec<u64>>> = o
        .mult
        .iter()
        .map(|m| m.to_rows().iter().map(|r| r.iter().map(|x| bigint_mod(x, p)).collect()).collect())
        .collect();
    let mul = |x: &[u64], y: &[u64]| -> Vec<u64> {
        let mut out = vec![0u64; n];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for k in 0..n {
                let mut s = 0u64;
                for j in 0..n {
                    s = (s + mulmod(mp[i][k][j], y[j], p)) % p;
                }
                out[k] = (out[k] + mulmod(xi, s, p)) % p;
            }
        }
        out
    };
    let pow = |x: &[u64], mut e: u128| -> Vec<u64> {
        let mut acc = vec![0u64; n];
        acc[0] = 1;
        let mut b = x.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(&acc, &b);
            }
            b = mul(&b, &b);
            e >>= 1;
        }
        acc
    };
    // Radical of pO: kernel of x ↦ x^{p^j} with p^j ≥ n.
    let mut q: u128 = p as u128;
    while q < n as u128 {
        q *= p as u128;
    }
    let frob_cols: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut e = vec![0u64; n];
            e[i] = 1;
            pow(&e, q)
        })
        .collect();
    let frob_rows: Vec<Vec<u64>> = (0..n).map(|r| (0..n).map(|c| frob_cols[c][r]).collect()).collect();
    let rad = kernel_mod_p(&frob_rows, n, p);
    let pb = BigInt::from(p);
    let mut gens: Vec<Vec<BigInt>> = rad.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
    for i in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[i] = pb.clone();
        gens.push(e);
    }
    let ip = IntMatrix::from_columns(&gens, n).hnf();
    // Multipliers: x with x·I_p ⊆ p·I_p, tested mod p in the I_p basis.
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(n * n);
    let mut blocks = vec![vec![vec![0u64; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            let prod = o.mult[i].mul_vec(&ip.column(j));
            let c = ip.solve_upper_integral(&prod).expect("I_p is an ideal");
            for l in 0..n {
                blocks[j][l][i] = bigint_mod(&c[l], p);
            }
        }
    }
    for j in 0..n {
        for l in 0..n {
            rows.push(blocks[j][l].clone());
        }
    }
    let ker = kernel_mod_p(&rows, n, p);
    if ker.is_empty() {
        return None;
    }
    let mut ug: Vec<Vec<BigInt>> = ker.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
    for i in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[i] = pb.clone();
        ug.push(e);
    }
    let u = IntMatrix::from_columns(&ug, n).hnf();
    let new_num = o.basis_num.mul(&u);
    let new_den = &o.den * &pb;
    SubOrder::from_basis(&o.f, new_num, new_den, o.certified).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> IntPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn builds_and_rejects() {
        let e = MonogenicOrder::build(&p("T^3 - T + 6")).unwrap_err();
        assert!(matches!(e, Error::Reducible { factor: Some(_) }));
        assert_eq!(MonogenicOrder::build(&p("T^3 - T + 1")).unwrap().disc(), &BigInt::from(-23));
        assert_eq!(MonogenicOrder::build(&p("T^4 - T - 1")).unwrap().disc(), &BigInt::from(-283));
        assert!(is_irreducible(&p("T^4 + 1")));
        assert!(!is_irreducible(&p("T^4 + 4")));
        assert!(!is_irreducible(&(&p("T^4 - 10*T^2 + 1") * &p("T^2 + 1"))));
    }

    #[test]
    fn signatures() {
        assert_eq!(signature(&p("T^3 - T + 1")), Signature { s: 1, t: 1 });
        assert_eq!(signature(&p("T^4 - T - 1")), Signature { s: 2, t: 1 });
    }

    #[test]
    fn power_basis_arithmetic() {
        let o = MonogenicOrder::build(&p("T^3 + T^2 - 1")).unwrap().power_basis();
        let t = o.generator();
        assert_eq!(o.char_poly(&t), p("T^3 + T^2 - 1"));
        assert_eq!(o.mult_matrix(&o.one()), IntMatrix::identity(3));
        assert_eq!(o.trace(&t), BigInt::from(-1));
        assert!(o.is_unit(&t));
        let ti = o.unit_inverse(&t).unwrap();
        assert_eq!(o.mul(&t, &ti), o.one());
        assert_eq!(o.trace_form_disc(), BigInt::from(-23));
    }

    #[test]
    fn prop5_indexes() {
        let expect = [(8, 5), (16, 1), (24, 1), (56, 31), (72, 33)];
        for (m, idx) in expect {
            let f = IntPolynomial::from_i64s(&[-1, m, 0, 1]);
            let o = MonogenicOrder::build(&f).unwrap().maximalize();
            assert_eq!(o.index(), &BigInt::from(idx), "m={m}");
            assert!(o.certified());
            assert_eq!(o.trace_form_disc(), *o.disc());
        }
    }

    #[test]
    fn integral_element_when_27_divides_m() {
        let f = IntPolynomial::from_i64s(&[-1, 27, 0, 1]);
        let o = MonogenicOrder::build(&f).unwrap().power_basis();
        assert!(o.is_integral(&p("T^2 + T + 1"), &BigInt::from(3)));
        let g = IntPolynomial::from_i64s(&[-1, 8, 0, 1]);
        let o = MonogenicOrder::build(&g).unwrap().power_basis();
        assert!(!o.is_integral(&p("T^2 + T + 1"), &BigInt::from(3)));
    }

    #[test]
    fn json_roundtrip() {
        let o = MonogenicOrder::build(&p("T^3 + 8*T - 1")).unwrap().maximalize();
        let j = o.to_json();
        let back = SubOrder::from_json(&j).unwrap();
        assert_eq!(back.disc(), o.disc());
        assert_eq!(back.index(), o.index());
    }
}
