//! Outward-rounded interval arithmetic over arbitrary-precision floats.
//!
//! Every operation returns an interval containing the exact result for all
//! inputs drawn from the operand intervals. The backing float library rounds
//! to nearest, so each computed endpoint is pushed outward by a few ulps.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

const RM: RoundingMode = RoundingMode::ToEven;
/// Extra working bits for transcendental functions.
const GUARD: usize = 64;

static DEFAULT_PRECISION: AtomicUsize = AtomicUsize::new(192);

/// Global default precision in bits (at least 64).
pub fn default_precision() -> usize {
    DEFAULT_PRECISION.load(AtomicOrdering::Relaxed)
}

pub fn set_default_precision(bits: usize) {
    DEFAULT_PRECISION.store(bits.max(64), AtomicOrdering::Relaxed);
}

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Nearest f64 to a float; 0 for NaN.
pub fn bf_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let Some((words, _, sign, e, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let top = *words.last().unwrap_or(&0);
    let v = (top as f64) * 2f64.powi(e.saturating_sub(64).max(-1100));
    let v = if e > 1100 { f64::INFINITY } else { v };
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

/// Exact conversion of an integer.
pub fn bf_from_bigint(n: &BigInt) -> BigFloat {
    let bits = (n.bits() as usize).max(64).div_ceil(64) * 64;
    let (sign, digits) = n.to_u64_digits();
    let base = BigFloat::from_u64(1, 64);
    let mut shift = base.clone();
    shift.set_exponent(65);
    let mut acc = BigFloat::from_u64(0, bits);
    for d in digits.iter().rev() {
        acc = acc.mul(&shift, bits, RM).add(&BigFloat::from_u64(*d, 64), bits, RM);
    }
    if sign == num_bigint::Sign::Minus {
        acc.inv_sign();
    }
    acc
}

/// Push `x` outward by roughly four ulps at `p` bits; zero stays put.
fn nudge(x: &BigFloat, p: usize, up: bool) -> BigFloat {
    if x.is_zero() || x.is_inf() {
        return x.clone();
    }
    let mut d = x.abs();
    let e = d.exponent().unwrap_or(0);
    d.set_exponent(e - (p as i32 - 2));
    if up {
        x.add(&d, p, RM)
    } else {
        x.sub(&d, p, RM)
    }
}

fn min_bf(a: &BigFloat, b: &BigFloat) -> BigFloat {
    if a.cmp(b).is_some_and(|c| c <= 0) {
        a.clone()
    } else {
        b.clone()
    }
}

fn max_bf(a: &BigFloat, b: &BigFloat) -> BigFloat {
    if a.cmp(b).is_some_and(|c| c >= 0) {
        a.clone()
    } else {
        b.clone()
    }
}

fn bf_lt(a: &BigFloat, b: &BigFloat) -> bool {
    a.cmp(b).is_some_and(|c| c < 0)
}

fn bf_le(a: &BigFloat, b: &BigFloat) -> bool {
    a.cmp(b).is_some_and(|c| c <= 0)
}

/// Closed interval `[lo, hi]` with a working precision.
#[derive(Clone)]
pub struct BigFloatInterval {
    lo: BigFloat,
    hi: BigFloat,
    prec: usize,
}

impl BigFloatInterval {
    pub fn from_bounds(lo: BigFloat, hi: BigFloat, prec: usize) -> Self {
        debug_assert!(bf_le(&lo, &hi), "inverted interval");
        BigFloatInterval { lo, hi, prec }
    }

    pub fn point(x: BigFloat, prec: usize) -> Self {
        BigFloatInterval { lo: x.clone(), hi: x, prec }
    }

    pub fn from_int(n: &BigInt, prec: usize) -> Self {
        Self::point(bf_from_bigint(n), prec)
    }

    pub fn from_i64(n: i64, prec: usize) -> Self {
        Self::point(BigFloat::from_i64(n, 64), prec)
    }

    pub fn from_f64(x: f64, prec: usize) -> Self {
        Self::point(BigFloat::from_f64(x, 64), prec)
    }

    pub fn from_rational(q: &BigRational, prec: usize) -> Self {
        Self::from_int(q.numer(), prec).div(&Self::from_int(q.denom(), prec))
    }

    /// `[m - r, m + r]`
    pub fn from_mid_rad(m: &BigFloat, r: &BigFloat, prec: usize) -> Self {
        let lo = nudge(&m.sub(r, prec, RM), prec, false);
        let hi = nudge(&m.add(r, prec, RM), prec, true);
        BigFloatInterval { lo, hi, prec }
    }

    /// `[x - 2^e, x + 2^e]` for a float center.
    pub fn around_f64(x: f64, err_exp: i32, prec: usize) -> Self {
        let mut r = BigFloat::from_u64(1, 64);
        r.set_exponent(err_exp + 1);
        Self::from_mid_rad(&BigFloat::from_f64(x, 64), &r, prec)
    }

    /// Exact constant π enclosure.
    pub fn pi(prec: usize) -> Self {
        let p = prec + GUARD;
        let v = with_consts(|c| c.pi(p, RM));
        Self::widen_transcendental(v, prec)
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn with_precision(&self, prec: usize) -> Self {
        BigFloatInterval { lo: self.lo.clone(), hi: self.hi.clone(), prec }
    }

    pub fn lo(&self) -> &BigFloat {
        &self.lo
    }

    pub fn hi(&self) -> &BigFloat {
        &self.hi
    }

    pub fn mid(&self) -> BigFloat {
        let mut s = self.lo.add(&self.hi, self.prec + 2, RM);
        if !s.is_zero() {
            let e = s.exponent().unwrap_or(0);
            s.set_exponent(e - 1);
        }
        s
    }

    /// Upper bound on the half-width.
    pub fn rad(&self) -> BigFloat {
        let m = self.mid();
        let a = nudge(&self.hi.sub(&m, self.prec, RM), self.prec, true);
        let b = nudge(&m.sub(&self.lo, self.prec, RM), self.prec, true);
        max_bf(&a.abs(), &b.abs())
    }

    pub fn mid_f64(&self) -> f64 {
        bf_to_f64(&self.mid())
    }

    pub fn lo_f64(&self) -> f64 {
        bf_to_f64(&self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        bf_to_f64(&self.hi)
    }

    pub fn rad_f64(&self) -> f64 {
        bf_to_f64(&self.rad())
    }

    pub fn width_f64(&self) -> f64 {
        bf_to_f64(&self.hi.sub(&self.lo, 64, RM))
    }

    /// `log2` of the width, or `None` for a point.
    pub fn width_log2(&self) -> Option<i64> {
        let w = self.hi.sub(&self.lo, 64, RM);
        if w.is_zero() {
            None
        } else {
            w.exponent().map(|e| e as i64)
        }
    }

    fn p2(&self, o: &Self) -> usize {
        self.prec.max(o.prec)
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.p2(o);
        BigFloatInterval {
            lo: nudge(&self.lo.add(&o.lo, p, RM), p, false),
            hi: nudge(&self.hi.add(&o.hi, p, RM), p, true),
            prec: p,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.p2(o);
        BigFloatInterval {
            lo: nudge(&self.lo.sub(&o.hi, p, RM), p, false),
            hi: nudge(&self.hi.sub(&o.lo, p, RM), p, true),
            prec: p,
        }
    }

    pub fn neg(&self) -> Self {
        BigFloatInterval { lo: self.hi.neg(), hi: self.lo.neg(), prec: self.prec }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.p2(o);
        let c = [
            self.lo.mul(&o.lo, p, RM),
            self.lo.mul(&o.hi, p, RM),
            self.hi.mul(&o.lo, p, RM),
            self.hi.mul(&o.hi, p, RM),
        ];
        let lo = c.iter().skip(1).fold(c[0].clone(), |m, x| min_bf(&m, x));
        let hi = c.iter().skip(1).fold(c[0].clone(), |m, x| max_bf(&m, x));
        BigFloatInterval { lo: nudge(&lo, p, false), hi: nudge(&hi, p, true), prec: p }
    }

    pub fn mul_int(&self, k: i64) -> Self {
        self.mul(&Self::from_i64(k, self.prec))
    }

    pub fn sqr(&self) -> Self {
        if self.contains_zero() {
            let a = self.abs();
            let hi = nudge(&a.hi.mul(&a.hi, self.prec, RM), self.prec, true);
            BigFloatInterval { lo: BigFloat::from_u64(0, 64), hi, prec: self.prec }
        } else {
            let a = self.abs();
            BigFloatInterval {
                lo: nudge(&a.lo.mul(&a.lo, self.prec, RM), self.prec, false),
                hi: nudge(&a.hi.mul(&a.hi, self.prec, RM), self.prec, true),
                prec: self.prec,
            }
        }
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut acc = Self::from_i64(1, self.prec);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Division; `None` when the divisor contains zero.
    pub fn checked_div(&self, o: &Self) -> Option<Self> {
        if o.contains_zero() {
            return None;
        }
        let p = self.p2(o);
        let c = [
            self.lo.div(&o.lo, p, RM),
            self.lo.div(&o.hi, p, RM),
            self.hi.div(&o.lo, p, RM),
            self.hi.div(&o.hi, p, RM),
        ];
        let lo = c.iter().skip(1).fold(c[0].clone(), |m, x| min_bf(&m, x));
        let hi = c.iter().skip(1).fold(c[0].clone(), |m, x| max_bf(&m, x));
        Some(BigFloatInterval { lo: nudge(&lo, p, false), hi: nudge(&hi, p, true), prec: p })
    }

    /// Division; panics when the divisor contains zero.
    pub fn div(&self, o: &Self) -> Self {
        self.checked_div(o).expect("interval division by an interval containing zero")
    }

    pub fn recip(&self) -> Option<Self> {
        Self::from_i64(1, self.prec).checked_div(self)
    }

    pub fn abs(&self) -> Self {
        if self.lo.is_positive() || self.lo.is_zero() {
            self.clone()
        } else if self.hi.is_negative() || self.hi.is_zero() {
            self.neg()
        } else {
            let hi = max_bf(&self.lo.abs(), &self.hi.abs());
            BigFloatInterval { lo: BigFloat::from_u64(0, 64), hi, prec: self.prec }
        }
    }

    fn widen_transcendental(v: BigFloat, prec: usize) -> Self {
        // Library error is assumed below 2^-(prec+GUARD-8) relative; pad to 2^-prec.
        let mut d = v.abs();
        if d.is_zero() {
            return Self::point(v, prec);
        }
        let e = d.exponent().unwrap_or(0);
        d.set_exponent(e - prec as i32);
        BigFloatInterval {
            lo: v.sub(&d, prec + GUARD, RM),
            hi: v.add(&d, prec + GUARD, RM),
            prec,
        }
    }

    fn monotone(&self, f: impl Fn(&BigFloat, usize, &mut Consts) -> BigFloat) -> Self {
        let p = self.prec + GUARD;
        let (a, b) = with_consts(|c| (f(&self.lo, p, c), f(&self.hi, p, c)));
        let a = Self::widen_transcendental(a, self.prec);
        let b = Self::widen_transcendental(b, self.prec);
        BigFloatInterval { lo: a.lo, hi: b.hi, prec: self.prec }
    }

    /// Natural logarithm; `None` unless the interval is positive.
    pub fn ln(&self) -> Option<Self> {
        if !self.is_positive() {
            return None;
        }
        Some(self.monotone(|x, p, c| x.ln(p, RM, c)))
    }

    pub fn exp(&self) -> Self {
        self.monotone(|x, p, c| x.exp(p, RM, c))
    }

    /// Square root; `None` if the interval has negative points.
    pub fn sqrt(&self) -> Option<Self> {
        if self.lo.is_negative() {
            return None;
        }
        Some(self.monotone(|x, p, _| if x.is_zero() { x.clone() } else { x.sqrt(p, RM) }))
    }

    pub fn cbrt(&self) -> Self {
        self.monotone(|x, p, _| if x.is_zero() { x.clone() } else { x.cbrt(p, RM) })
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive() && !self.lo.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative() && !self.hi.is_zero()
    }

    /// `-1`, `0` (undecided) or `1`.
    pub fn sign(&self) -> i32 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    pub fn contains(&self, x: &BigFloat) -> bool {
        bf_le(&self.lo, x) && bf_le(x, &self.hi)
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.contains(&BigFloat::from_f64(x, 64))
    }

    pub fn contains_int(&self, n: &BigInt) -> bool {
        self.contains(&bf_from_bigint(n))
    }

    pub fn contains_interval(&self, o: &Self) -> bool {
        bf_le(&self.lo, &o.lo) && bf_le(&o.hi, &self.hi)
    }

    pub fn overlaps(&self, o: &Self) -> bool {
        bf_le(&self.lo, &o.hi) && bf_le(&o.lo, &self.hi)
    }

    /// Certainly `self < o`.
    pub fn lt(&self, o: &Self) -> bool {
        bf_lt(&self.hi, &o.lo)
    }

    pub fn intersect(&self, o: &Self) -> Option<Self> {
        let lo = max_bf(&self.lo, &o.lo);
        let hi = min_bf(&self.hi, &o.hi);
        if bf_le(&lo, &hi) {
            Some(BigFloatInterval { lo, hi, prec: self.p2(o) })
        } else {
            None
        }
    }

    pub fn hull(&self, o: &Self) -> Self {
        BigFloatInterval { lo: min_bf(&self.lo, &o.lo), hi: max_bf(&self.hi, &o.hi), prec: self.p2(o) }
    }

    /// Integers inside the interval, if there are at most `limit` of them.
    pub fn integers_inside(&self, limit: usize) -> Option<Vec<BigInt>> {
        let a = self.lo.ceil();
        let b = self.hi.floor();
        let ai = bf_to_bigint(&a)?;
        let bi = bf_to_bigint(&b)?;
        if ai > bi {
            return Some(vec![]);
        }
        let count = (&bi - &ai).to_usize()? + 1;
        if count > limit {
            return None;
        }
        let mut v = Vec::with_capacity(count);
        let mut x = ai;
        while x <= bi {
            v.push(x.clone());
            x += 1;
        }
        Some(v)
    }

    /// The unique integer inside, if exactly one.
    pub fn unique_integer(&self) -> Option<BigInt> {
        let v = self.integers_inside(2)?;
        if v.len() == 1 {
            v.into_iter().next()
        } else {
            None
        }
    }

    /// Relative agreement: `|a - b| <= tol · max(|a|, |b|)` certainly holds.
    pub fn rel_close(&self, o: &Self, tol: f64) -> bool {
        let d = self.sub(o).abs();
        let m = self.abs().hull(&o.abs());
        bf_to_f64(d.hi()) <= tol * bf_to_f64(m.lo())
    }
}

/// Exact integer value of an integral float.
pub fn bf_to_bigint(x: &BigFloat) -> Option<BigInt> {
    if x.is_zero() {
        return Some(BigInt::zero());
    }
    if x.is_nan() || x.is_inf() {
        return None;
    }
    let (words, nbits, sign, e, _) = x.as_raw_parts()?;
    // value = 0.m × 2^e with m occupying `nbits` bits.
    let mut m = BigInt::zero();
    for w in words.iter().rev() {
        m = (m << 64) + BigInt::from(*w);
    }
    let total = (words.len() * 64) as i64;
    let _ = nbits;
    let shift = e as i64 - total;
    let v = if shift >= 0 {
        m << (shift as usize)
    } else {
        let s = (-shift) as usize;
        let q = &m >> s;
        if (&q << s) != m {
            return None;
        }
        q
    };
    Some(if sign == Sign::Neg { -v } else { v })
}

impl fmt::Debug for BigFloatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo_f64(), self.hi_f64())
    }
}

impl fmt::Display for BigFloatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:.1e}", self.mid_f64(), self.rad_f64())
    }
}

impl PartialEq for BigFloatInterval {
    fn eq(&self, o: &Self) -> bool {
        self.lo.cmp(&o.lo) == Some(0) && self.hi.cmp(&o.hi) == Some(0)
    }
}

impl serde::Serialize for BigFloatInterval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Interval", 2)?;
        st.serialize_field("mid", &self.mid_f64())?;
        st.serialize_field("rad", &self.rad_f64())?;
        st.end()
    }
}

/// Rectangular complex interval.
#[derive(Clone, Debug)]
pub struct ComplexInterval {
    pub re: BigFloatInterval,
    pub im: BigFloatInterval,
}

impl ComplexInterval {
    pub fn new(re: BigFloatInterval, im: BigFloatInterval) -> Self {
        ComplexInterval { re, im }
    }

    pub fn real(re: BigFloatInterval) -> Self {
        let p = re.precision();
        ComplexInterval { re, im: BigFloatInterval::from_i64(0, p) }
    }

    pub fn from_i64(n: i64, prec: usize) -> Self {
        Self::real(BigFloatInterval::from_i64(n, prec))
    }

    pub fn add(&self, o: &Self) -> Self {
        ComplexInterval { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        ComplexInterval { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        ComplexInterval {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn scale(&self, k: &BigFloatInterval) -> Self {
        ComplexInterval { re: self.re.mul(k), im: self.im.mul(k) }
    }

    pub fn conj(&self) -> Self {
        ComplexInterval { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn norm_sqr(&self) -> BigFloatInterval {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn abs(&self) -> BigFloatInterval {
        self.norm_sqr().sqrt().expect("nonnegative")
    }

    pub fn checked_div(&self, o: &Self) -> Option<Self> {
        let d = o.norm_sqr();
        let n = self.mul(&o.conj());
        Some(ComplexInterval { re: n.re.checked_div(&d)?, im: n.im.checked_div(&d)? })
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.mid_f64(), self.im.mid_f64())
    }
}

/// Total order on floats used for sorting mids.
pub fn cmp_f64(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

/// Interval for `n·2^-k` style values built from a rational.
pub fn rational_to_interval(q: &BigRational, prec: usize) -> BigFloatInterval {
    if q.is_zero() {
        return BigFloatInterval::from_i64(0, prec);
    }
    let v = BigFloatInterval::from_rational(q, prec);
    if q.is_negative() {
        debug_assert!(!v.is_positive());
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: usize = 192;

    #[test]
    fn conversions() {
        for x in [1.0, -2.5, 0.1, 1e300, -3e-200, 123456789.0] {
            assert_eq!(bf_to_f64(&BigFloat::from_f64(x, 64)), x);
        }
        let n: BigInt = "1649120827309715616889".parse().unwrap();
        let b = bf_from_bigint(&n);
        assert_eq!(bf_to_bigint(&b), Some(n.clone()));
        assert_eq!(bf_to_bigint(&bf_from_bigint(&-n.clone())), Some(-n));
        assert!(BigFloatInterval::from_i64(7, P).contains_int(&BigInt::from(7)));
    }

    #[test]
    fn enclosures_contain_known_values() {
        let two = BigFloatInterval::from_i64(2, P);
        let ln2 = two.ln().unwrap();
        assert!(ln2.contains_f64(std::f64::consts::LN_2) || ln2.rad_f64() < 1e-50);
        assert!((ln2.mid_f64() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(ln2.width_log2().unwrap() < -150);
        let s = two.sqrt().unwrap();
        let back = s.sqr();
        assert!(back.contains(&BigFloat::from_i64(2, 64)));
        let third = BigFloatInterval::from_i64(1, P).div(&BigFloatInterval::from_i64(3, P));
        assert!(third.mul_int(3).contains(&BigFloat::from_i64(1, 64)));
        let e = BigFloatInterval::from_i64(1, P).exp();
        assert!(e.ln().unwrap().contains(&BigFloat::from_i64(1, 64)));
        let c = BigFloatInterval::from_i64(27, P).cbrt();
        assert!(c.contains(&BigFloat::from_i64(3, 64)));
    }

    #[test]
    fn signs_and_division() {
        let a = BigFloatInterval::from_f64(-1.0, P).hull(&BigFloatInterval::from_f64(1.0, P));
        assert_eq!(a.sign(), 0);
        assert!(BigFloatInterval::from_i64(1, P).checked_div(&a).is_none());
        assert_eq!(BigFloatInterval::from_i64(-3, P).sign(), -1);
        assert_eq!(a.sqr().lo_f64(), 0.0);
    }

    #[test]
    fn integers_inside() {
        let x = BigFloatInterval::around_f64(41.9999999, -10, P);
        assert_eq!(x.unique_integer(), Some(BigInt::from(42)));
        let y = BigFloatInterval::around_f64(41.5, -10, P);
        assert_eq!(y.unique_integer(), None);
    }
}
