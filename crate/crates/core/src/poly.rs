//! Dense univariate polynomials over Z.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// Coefficients in ascending degree order; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `x^k`
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn x() -> Self {
        Self::monomial(BigInt::one(), 1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// `den^deg · f(num/den)`, whose sign equals the sign of `f(num/den)` for `den > 0`.
    pub fn eval_homogeneous(&self, num: &BigInt, den: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        let mut dpow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * num + c * &dpow;
            dpow *= den;
        }
        acc
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Exact division of every coefficient; panics if not exact.
    pub fn div_scalar(&self, k: &BigInt) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|c| {
                    let (q, r) = c.div_rem(k);
                    assert!(r.is_zero(), "inexact scalar division");
                    q
                })
                .collect(),
        )
    }

    /// Nonnegative gcd of the coefficients.
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.lead().is_negative() {
            c = -c;
        }
        self.div_scalar(&c)
    }

    /// `f(x + k)`
    pub fn shift(&self, k: &BigInt) -> Self {
        let lin = Self::new(vec![k.clone(), BigInt::one()]);
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Self::constant(c.clone());
        }
        acc
    }

    /// `f(-x)`
    pub fn negate_var(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// `x^deg · f(1/x)`
    pub fn reverse(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    /// Monic associate of the reversal, when the constant term is a unit.
    pub fn reciprocal_monic(&self) -> Option<Self> {
        let r = self.reverse();
        let l = r.lead();
        if l.is_one() {
            Some(r)
        } else if l == -BigInt::one() {
            Some(-&r)
        } else {
            None
        }
    }

    /// Pseudo-remainder: `lc(b)^(deg a - deg b + 1) · a = q·b + r`.
    pub fn pseudo_rem(&self, b: &Self) -> Self {
        assert!(!b.is_zero());
        if self.degree() < b.degree() || self.is_zero() {
            return self.clone();
        }
        let d = b.lead();
        let db = b.degree();
        let mut e = self.degree() - db + 1;
        let mut r = self.clone();
        while !r.is_zero() && r.degree() >= db {
            let s = Self::monomial(r.lead(), r.degree() - db);
            r = &r.scale(&d) - &(&s * b);
            e -= 1;
        }
        r.scale(&num_traits::pow(d, e))
    }

    /// Division by a divisor with unit leading coefficient.
    pub fn div_rem_monic(&self, b: &Self) -> (Self, Self) {
        let l = b.lead();
        assert!(l.is_one() || l == -BigInt::one(), "divisor must have unit leading coefficient");
        let db = b.degree();
        let mut r = self.coeffs.clone();
        if r.len() < b.coeffs.len() {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![BigInt::zero(); r.len() - db];
        for i in (db..r.len()).rev() {
            let c = &r[i] * &l;
            if c.is_zero() {
                continue;
            }
            for (j, bc) in b.coeffs.iter().enumerate() {
                r[i - db + j] -= &c * bc;
            }
            q[i - db] = c;
        }
        r.truncate(db);
        (Self::new(q), Self::new(r))
    }

    /// Exact quotient over Z, if `b` divides `self`.
    pub fn div_exact(&self, b: &Self) -> Option<Self> {
        if b.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.degree() < b.degree() {
            return None;
        }
        let db = b.degree();
        let lb = b.lead();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); r.len() - db];
        for i in (db..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let (c, rem) = r[i].div_rem(&lb);
            if !rem.is_zero() {
                return None;
            }
            for (j, bc) in b.coeffs.iter().enumerate() {
                r[i - db + j] -= &c * bc;
            }
            q[i - db] = c;
        }
        if r.iter().take(db).all(|c| c.is_zero()) {
            Some(Self::new(q))
        } else {
            None
        }
    }

    /// Gcd over Z via the primitive remainder sequence; positive leading coefficient.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.primitive_part().scale(&other.content());
        }
        if other.is_zero() {
            return self.primitive_part().scale(&self.content());
        }
        let c = self.content().gcd(&other.content());
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = if r.is_zero() { r } else { r.primitive_part() };
        }
        a.primitive_part().scale(&c)
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == 0
    }

    /// Resultant by the subresultant algorithm.
    pub fn resultant(&self, other: &Self) -> Result<BigInt> {
        if self.is_zero() || other.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        let mut s = 1i32;
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
            if a.degree() % 2 == 1 && b.degree() % 2 == 1 {
                s = -1;
            }
        }
        if b.degree() == 0 {
            let r = num_traits::pow(b.lead(), a.degree());
            return Ok(if s < 0 { -r } else { r });
        }
        let (ca, cb) = (a.content(), b.content());
        let t = num_traits::pow(ca.clone(), b.degree()) * num_traits::pow(cb.clone(), a.degree());
        a = a.div_scalar(&ca);
        b = b.div_scalar(&cb);
        let mut g = BigInt::one();
        let mut h = BigInt::one();
        loop {
            let delta = a.degree() - b.degree();
            if a.degree() % 2 == 1 && b.degree() % 2 == 1 {
                s = -s;
            }
            let r = a.pseudo_rem(&b);
            if r.is_zero() {
                return Ok(BigInt::zero());
            }
            a = b;
            b = r.div_scalar(&(&g * num_traits::pow(h.clone(), delta)));
            g = a.lead();
            h = if delta == 0 {
                h
            } else {
                num_traits::pow(g.clone(), delta) / num_traits::pow(h.clone(), delta - 1)
            };
            if b.degree() == 0 {
                break;
            }
        }
        let da = a.degree();
        let hh = num_traits::pow(b.lead(), da) / num_traits::pow(h, da - 1);
        let r = t * hh;
        Ok(if s < 0 { -r } else { r })
    }

    /// Resultant as the determinant of the Sylvester matrix.
    pub fn resultant_sylvester(&self, other: &Self) -> Result<BigInt> {
        if self.is_zero() || other.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let (m, n) = (self.degree(), other.degree());
        if m + n == 0 {
            return Ok(BigInt::one());
        }
        let size = m + n;
        let mut s = IntMatrix::zeros(size, size);
        for i in 0..n {
            for (j, c) in self.coeffs.iter().rev().enumerate() {
                s.set(i, i + j, c.clone());
            }
        }
        for i in 0..m {
            for (j, c) in other.coeffs.iter().rev().enumerate() {
                s.set(n + i, i + j, c.clone());
            }
        }
        Ok(s.det())
    }

    /// `(-1)^(n(n-1)/2) · Res(f, f') / lc(f)` for monic `f` of degree at least 2.
    pub fn discriminant(&self) -> Result<BigInt> {
        if !self.is_monic() {
            return Err(Error::NotMonic);
        }
        let n = self.degree();
        if n < 2 {
            return Err(Error::DegreeTooSmall(n));
        }
        let r = self.resultant(&self.derivative())?;
        Ok(if (n * (n - 1) / 2) % 2 == 1 { -r } else { r })
    }

    /// Sturm sequence with positive rescaling; requires a squarefree input.
    pub fn sturm_sequence(&self) -> Vec<Self> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let k = seq.len();
            let (a, b) = (&seq[k - 2], &seq[k - 1]);
            if b.degree() == 0 {
                break;
            }
            let mut r = a.pseudo_rem(b);
            let e = a.degree() - b.degree() + 1;
            if b.lead().is_negative() && e % 2 == 1 {
                r = -&r;
            }
            if r.is_zero() {
                break;
            }
            let c = r.content();
            seq.push(-&r.div_scalar(&c));
        }
        seq
    }

    /// Number of distinct real roots.
    pub fn count_real_roots(&self) -> usize {
        let seq = self.sturm_sequence();
        let at = |sign_x: i32| -> usize {
            let signs: Vec<i32> = seq
                .iter()
                .map(|p| {
                    let l = if p.lead().is_positive() { 1 } else { -1 };
                    if sign_x < 0 && p.degree() % 2 == 1 {
                        -l
                    } else {
                        l
                    }
                })
                .collect();
            sign_changes(&signs)
        };
        at(-1) - at(1)
    }

    /// Real roots in the half-open interval `(a, b]` for rational endpoints.
    pub fn count_roots_in(seq: &[Self], a: &BigRational, b: &BigRational) -> usize {
        let v = |x: &BigRational| -> usize {
            let signs: Vec<i32> = seq
                .iter()
                .map(|p| sign_of(&p.eval_homogeneous(x.numer(), x.denom())))
                .collect();
            sign_changes(&signs)
        };
        v(a) - v(b)
    }

    /// Cauchy bound: every complex root has modulus below the returned integer.
    pub fn root_bound(&self) -> BigInt {
        let l = self.lead().abs();
        let m = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default();
        BigInt::one() + m.div_ceil(&l)
    }

    pub fn display_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if i == 0 {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{a}*{mono}"));
            }
        }
        out
    }

    /// Parses `T^3 - T + 1` style text; any single-letter variable.
    pub fn parse(text: &str) -> Result<Self> {
        let err = || Error::Parse(text.to_string());
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err());
        }
        let mut var: Option<char> = None;
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (i, ch) in s.chars().enumerate() {
            if (ch == '+' || ch == '-') && !(i > 0 && cur.ends_with('^')) {
                if !cur.is_empty() {
                    terms.push((neg, std::mem::take(&mut cur)));
                } else if i > 0 {
                    return Err(err());
                }
                neg = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(err());
        }
        terms.push((neg, cur));
        let mut coeffs: Vec<BigInt> = Vec::new();
        for (neg, t) in terms {
            let letter = t.chars().find(|c| c.is_ascii_alphabetic());
            let (coef, exp) = match letter {
                None => (t.parse::<BigInt>().map_err(|_| err())?, 0usize),
                Some(v) => {
                    if var.is_some_and(|w| w != v) {
                        return Err(err());
                    }
                    var = Some(v);
                    let pos = t.find(v).ok_or_else(err)?;
                    let (head, tail) = t.split_at(pos);
                    let head = head.strip_suffix('*').unwrap_or(head);
                    let coef = if head.is_empty() {
                        BigInt::one()
                    } else {
                        head.parse::<BigInt>().map_err(|_| err())?
                    };
                    let tail = &tail[1..];
                    let exp = if tail.is_empty() {
                        1
                    } else {
                        let e = tail.strip_prefix('^').ok_or_else(err)?;
                        e.parse::<usize>().map_err(|_| err())?
                    };
                    (coef, exp)
                }
            };
            if exp > 4096 {
                return Err(err());
            }
            if coeffs.len() <= exp {
                coeffs.resize(exp + 1, BigInt::zero());
            }
            coeffs[exp] += if neg { -coef } else { coef };
        }
        Ok(Self::new(coeffs))
    }
}

fn sign_of(x: &BigInt) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn sign_changes(signs: &[i32]) -> usize {
    let mut last = 0;
    let mut n = 0;
    for &s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("T"))
    }
}

impl FromStr for IntPolynomial {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, o: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPolynomial::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, o: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPolynomial::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, o: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || o.is_zero() {
            return IntPolynomial::zero();
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        IntPolynomial::new(c)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl serde::Serialize for IntPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for IntPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Polynomial with the given integer roots, `∏ (x - r)`.
pub fn from_roots(roots: &[BigInt]) -> IntPolynomial {
    roots.iter().fold(IntPolynomial::one(), |acc, r| {
        &acc * &IntPolynomial::new(vec![-r, BigInt::one()])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> IntPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print_round_trip() {
        for s in ["T^3 - T + 1", "T^4 - T^3 + 2*T - 1", "-T^2", "T", "7", "T^3 + 2*T + 2000"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("x^3+x^2-1"), IntPolynomial::from_i64s(&[-1, 0, 1, 1]));
        assert_eq!(p("2T^2 - 3 T"), IntPolynomial::from_i64s(&[0, -3, 2]));
        assert!(IntPolynomial::parse("T^2 + S").is_err());
        assert!(IntPolynomial::parse("T^^2").is_err());
        assert!(IntPolynomial::parse("").is_err());
    }

    #[test]
    fn discriminants() {
        assert_eq!(p("T^3 - T + 1").discriminant().unwrap(), BigInt::from(-23));
        assert_eq!(p("T^3 + T^2 - 1").discriminant().unwrap(), BigInt::from(-23));
        for m in 1..=10i64 {
            let f = IntPolynomial::from_i64s(&[-1, m, 0, 1]);
            assert_eq!(f.discriminant().unwrap(), BigInt::from(-4 * m * m * m - 27));
        }
        assert_eq!(p("T^4 - T - 1").discriminant().unwrap(), BigInt::from(-283));
        assert_eq!(p("T^3 + 2*T + 2000").discriminant().unwrap(), BigInt::from(-108000032i64));
        assert_eq!(p("2*T^2 + 1").discriminant(), Err(Error::NotMonic));
        assert_eq!(p("T + 1").discriminant(), Err(Error::DegreeTooSmall(1)));
    }

    #[test]
    fn resultants() {
        for m in 1..=10i64 {
            let f = IntPolynomial::from_i64s(&[-1, m, 0, 1]);
            let r = f.resultant(&p("1 - T")).unwrap();
            assert_eq!(r.abs(), BigInt::from(m));
        }
        assert_eq!(p("T^3 - T + 1").resultant(&IntPolynomial::one()).unwrap(), BigInt::one());
        assert_eq!(p("T^2 + 1").resultant(&p("T - 1")).unwrap(), BigInt::from(2));
        assert!(p("T").resultant(&IntPolynomial::zero()).is_err());
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(p("T^3 - T + 1").count_real_roots(), 1);
        assert_eq!(p("T^4 - T - 1").count_real_roots(), 2);
        assert_eq!(p("T^3 - 3*T - 1").count_real_roots(), 3);
        assert_eq!(p("T^2 + 1").count_real_roots(), 0);
        let seq = p("T^2 - 2").sturm_sequence();
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(IntPolynomial::count_roots_in(&seq, &r(0, 1), &r(2, 1)), 1);
        assert_eq!(IntPolynomial::count_roots_in(&seq, &r(-2, 1), &r(2, 1)), 2);
    }

    #[test]
    fn gcd_and_division() {
        let a = &p("T - 1") * &p("T + 2");
        let b = &p("T - 1") * &p("T^2 + 1");
        assert_eq!(a.gcd(&b), p("T - 1"));
        assert!(!(&a * &p("T + 2")).is_squarefree());
        assert_eq!(b.div_exact(&p("T - 1")), Some(p("T^2 + 1")));
        assert_eq!(b.div_exact(&p("2*T - 1")), None);
        let (q, r) = p("T^3 + 2").div_rem_monic(&p("T - 1"));
        assert_eq!((q, r), (p("T^2 + T + 1"), p("3")));
    }

    #[test]
    fn shift_matches_eisenstein_example() {
        // (T+1)^3 + 3k(T+1) - 1 = T^3 + 3T^2 + (3k+3)T + 3k
        let k = 2;
        let f = IntPolynomial::from_i64s(&[-1, 3 * k, 0, 1]);
        assert_eq!(f.shift(&BigInt::one()), IntPolynomial::from_i64s(&[3 * k, 3 * k + 3, 3, 1]));
    }
}
