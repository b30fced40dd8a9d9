//! Certified enclosures of all complex roots of a squarefree integer
//! polynomial.
//!
//! Approximations come from Aberth iteration (f64 first, then at working
//! precision). Certification uses Weierstrass corrections: with
//! `W_i = f(z_i) / (a_n ∏_{j≠i} (z_i - z_j))`, every connected component of
//! the discs `D(z_i, n|W_i|)` holds as many roots as discs. Pairwise disjoint
//! discs therefore hold one root each. A disc centred on the real axis holds a
//! real root (its conjugate is in the same disc); a disc clear of the axis
//! holds a non-real one. Real enclosures are also checked by a sign change,
//! and the real count is compared against Sturm's theorem.

use astro_float::{BigFloat, RoundingMode};
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{bf_from_bigint, bf_to_f64, BigFloatInterval, ComplexInterval};
use crate::poly::IntPolynomial;

const RM: RoundingMode = RoundingMode::ToEven;

/// Certified root enclosures of a polynomial.
#[derive(Clone, Debug)]
pub struct EmbeddingSet {
    /// Ascending.
    pub real_roots: Vec<BigFloatInterval>,
    /// One per conjugate pair, `im > 0`; sorted by real part.
    pub complex_roots: Vec<ComplexInterval>,
    pub source_poly: IntPolynomial,
    pub precision: usize,
}

impl EmbeddingSet {
    pub fn s(&self) -> usize {
        self.real_roots.len()
    }

    pub fn t(&self) -> usize {
        self.complex_roots.len()
    }

    pub fn real_f64(&self) -> Vec<f64> {
        self.real_roots.iter().map(|r| r.mid_f64()).collect()
    }

    pub fn complex_f64(&self) -> Vec<Complex64> {
        self.complex_roots.iter().map(|c| Complex64::new(c.re.mid_f64(), c.im.mid_f64())).collect()
    }

    /// All roots as complex intervals: reals first, then upper, then lower half-plane.
    pub fn all_roots(&self) -> Vec<ComplexInterval> {
        let mut v: Vec<ComplexInterval> =
            self.real_roots.iter().cloned().map(ComplexInterval::real).collect();
        v.extend(self.complex_roots.iter().cloned());
        v.extend(self.complex_roots.iter().map(|c| c.conj()));
        v
    }

    /// Recompute at a higher precision.
    pub fn refine(&self, precision: usize) -> Result<EmbeddingSet> {
        isolate_roots(&self.source_poly, precision)
    }
}

impl Serialize for EmbeddingSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("EmbeddingSet", 3)?;
        st.serialize_field("poly", &self.source_poly.to_string())?;
        st.serialize_field("real", &self.real_roots)?;
        let c: Vec<(&BigFloatInterval, &BigFloatInterval)> =
            self.complex_roots.iter().map(|c| (&c.re, &c.im)).collect();
        st.serialize_field("complex", &c)?;
        st.end()
    }
}

/// Aberth iteration in double precision.
pub fn aberth_f64(f: &IntPolynomial, max_iter: usize) -> Vec<Complex64> {
    let n = f.degree();
    if n == 0 {
        return vec![];
    }
    let c: Vec<f64> = f.coeffs().iter().map(|x| x.to_f64().unwrap_or(f64::MAX)).collect();
    let d: Vec<f64> = (1..=n).map(|k| c[k] * k as f64).collect();
    let eval = |p: &[f64], z: Complex64| p.iter().rev().fold(Complex64::zero(), |a, &x| a * z + x);
    let lead = c[n].abs();
    let r = 1.0 + c[..n].iter().map(|x| x.abs() / lead).fold(0.0, f64::max).powf(1.0 / n as f64);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r * 0.9, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    for _ in 0..max_iter {
        let mut moved = 0.0f64;
        for i in 0..n {
            let fz = eval(&c, z[i]);
            let dz = eval(&d, z[i]);
            if fz.norm() == 0.0 {
                continue;
            }
            let ratio = fz / dz;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Complex number over plain (non-interval) floats, for iteration only.
#[derive(Clone)]
struct Bc {
    re: BigFloat,
    im: BigFloat,
}

impl Bc {
    fn from_c64(z: Complex64, p: usize) -> Bc {
        Bc { re: BigFloat::from_f64(z.re, p), im: BigFloat::from_f64(z.im, p) }
    }
    fn zero(p: usize) -> Bc {
        Bc { re: BigFloat::from_u64(0, p), im: BigFloat::from_u64(0, p) }
    }
    fn add(&self, o: &Bc, p: usize) -> Bc {
        Bc { re: self.re.add(&o.re, p, RM), im: self.im.add(&o.im, p, RM) }
    }
    fn sub(&self, o: &Bc, p: usize) -> Bc {
        Bc { re: self.re.sub(&o.re, p, RM), im: self.im.sub(&o.im, p, RM) }
    }
    fn mul(&self, o: &Bc, p: usize) -> Bc {
        Bc {
            re: self.re.mul(&o.re, p, RM).sub(&self.im.mul(&o.im, p, RM), p, RM),
            im: self.re.mul(&o.im, p, RM).add(&self.im.mul(&o.re, p, RM), p, RM),
        }
    }
    fn div(&self, o: &Bc, p: usize) -> Bc {
        let d = o.re.mul(&o.re, p, RM).add(&o.im.mul(&o.im, p, RM), p, RM);
        let n = self.mul(&Bc { re: o.re.clone(), im: o.im.neg() }, p);
        Bc { re: n.re.div(&d, p, RM), im: n.im.div(&d, p, RM) }
    }
    fn add_real(&self, k: &BigFloat, p: usize) -> Bc {
        Bc { re: self.re.add(k, p, RM), im: self.im.clone() }
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(bf_to_f64(&self.re), bf_to_f64(&self.im))
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

/// Aberth iteration at `p` bits starting from `z`.
fn aberth_big(f: &IntPolynomial, z: &mut [Bc], p: usize, max_iter: usize) {
    let n = f.degree();
    let c: Vec<BigFloat> = f.coeffs().iter().map(bf_from_bigint).collect();
    let d: Vec<BigFloat> =
        (1..=n).map(|k| c[k].mul(&BigFloat::from_u64(k as u64, 64), p, RM)).collect();
    let eval = |cs: &[BigFloat], x: &Bc| {
        cs.iter().rev().fold(Bc::zero(p), |a, k| a.mul(x, p).add_real(k, p))
    };
    let one = Bc { re: BigFloat::from_u64(1, 64), im: BigFloat::from_u64(0, 64) };
    for _ in 0..max_iter {
        let mut worst = i64::MAX;
        for i in 0..n {
            let fz = eval(&c, &z[i]);
            if fz.is_zero() {
                continue;
            }
            let dz = eval(&d, &z[i]);
            let ratio = fz.div(&dz, p);
            let mut s = Bc::zero(p);
            for j in 0..n {
                if j != i {
                    s = s.add(&one.div(&z[i].sub(&z[j], p), p), p);
                }
            }
            let w = ratio.div(&one.sub(&ratio.mul(&s, p), p), p);
            z[i] = z[i].sub(&w, p);
            // Relative step size exponent.
            let mag = |x: &BigFloat| if x.is_zero() { i64::MIN } else { x.exponent().unwrap_or(0) as i64 };
            let we = mag(&w.re).max(mag(&w.im));
            let ze = mag(&z[i].re).max(mag(&z[i].im)).max(0);
            worst = worst.min(ze.saturating_sub(we));
        }
        if worst > p as i64 - 4 {
            break;
        }
    }
}

fn cpoint(z: &Bc, p: usize) -> ComplexInterval {
    ComplexInterval::new(
        BigFloatInterval::point(z.re.clone(), p),
        BigFloatInterval::point(z.im.clone(), p),
    )
}

fn eval_interval(f: &IntPolynomial, x: &ComplexInterval, p: usize) -> ComplexInterval {
    let mut acc = ComplexInterval::from_i64(0, p);
    for c in f.coeffs().iter().rev() {
        acc = acc.mul(x).add(&ComplexInterval::real(BigFloatInterval::from_int(c, p)));
    }
    acc
}

/// Evaluate at a real interval.
pub fn eval_real_interval(f: &IntPolynomial, x: &BigFloatInterval) -> BigFloatInterval {
    let p = x.precision();
    let mut acc = BigFloatInterval::from_i64(0, p);
    for c in f.coeffs().iter().rev() {
        acc = acc.mul(x).add(&BigFloatInterval::from_int(c, p));
    }
    acc
}

/// Certified enclosures of all roots of `f` with radius about `2^-precision`.
pub fn isolate_roots(f: &IntPolynomial, precision: usize) -> Result<EmbeddingSet> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    let n = f.degree();
    if n >= 1 && !f.is_squarefree() {
        return Err(Error::NotSquarefree);
    }
    let s_count = f.count_real_roots();
    let start = aberth_f64(f, 500);
    let mut p = precision.max(64);
    for _attempt in 0..4 {
        if let Some(e) = try_certify(f, &start, p, precision, s_count) {
            return Ok(e);
        }
        p *= 2;
    }
    Err(Error::PrecisionExhausted(p))
}

fn try_certify(
    f: &IntPolynomial,
    start: &[Complex64],
    work: usize,
    precision: usize,
    s_count: usize,
) -> Option<EmbeddingSet> {
    let n = f.degree();
    let wp = work + 64;
    let mut z: Vec<Bc> = start.iter().map(|&c| Bc::from_c64(c, wp)).collect();
    aberth_big(f, &mut z, wp, 200);
    // The s_count approximations closest to the axis are the real roots.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let ia = bf_to_f64(&z[a].im).abs();
        let ib = bf_to_f64(&z[b].im).abs();
        ia.partial_cmp(&ib).unwrap()
    });
    let is_real: Vec<bool> = {
        let mut v = vec![false; n];
        for &i in order.iter().take(s_count) {
            v[i] = true;
        }
        v
    };
    for i in 0..n {
        if is_real[i] {
            z[i].im = BigFloat::from_u64(0, 64);
        }
    }
    // Weierstrass radii.
    let pts: Vec<ComplexInterval> = z.iter().map(|x| cpoint(x, wp)).collect();
    let nn = BigFloatInterval::from_i64(n as i64, wp);
    let mut radius = Vec::with_capacity(n);
    for i in 0..n {
        let mut den = ComplexInterval::from_i64(1, wp);
        for j in 0..n {
            if j != i {
                den = den.mul(&pts[i].sub(&pts[j]));
            }
        }
        let w = eval_interval(f, &pts[i], wp).checked_div(&den)?;
        let r = w.abs().mul(&nn);
        // Floor the radius at 2^-precision relative so endpoint signs stay decidable.
        let scale = 1.0 + z[i].to_c64().norm();
        let floor = BigFloatInterval::around_f64(0.0, -(precision as i32) + scale.log2().ceil() as i32, wp);
        radius.push(max_bf(r.hi(), floor.hi()));
    }
    // Disjointness.
    for i in 0..n {
        for j in i + 1..n {
            let d = pts[i].sub(&pts[j]).abs();
            let rr = BigFloatInterval::point(radius[i].add(&radius[j], wp, RM), wp);
            if !rr.lt(&d) {
                return None;
            }
        }
    }
    let mut reals = Vec::new();
    let mut uppers = Vec::new();
    let mut lowers = 0usize;
    for i in 0..n {
        let r = BigFloatInterval::point(radius[i].clone(), wp);
        if is_real[i] {
            let iv = BigFloatInterval::from_mid_rad(&z[i].re, &radius[i], wp).with_precision(precision);
            let lo = eval_real_interval(f, &BigFloatInterval::point(iv.lo().clone(), wp));
            let hi = eval_real_interval(f, &BigFloatInterval::point(iv.hi().clone(), wp));
            if lo.sign() * hi.sign() != -1 {
                return None;
            }
            reals.push(iv);
        } else {
            let im = BigFloatInterval::point(z[i].im.clone(), wp);
            if !r.lt(&im.abs()) {
                return None;
            }
            if im.is_positive() {
                uppers.push(ComplexInterval::new(
                    BigFloatInterval::from_mid_rad(&z[i].re, &radius[i], wp).with_precision(precision),
                    BigFloatInterval::from_mid_rad(&z[i].im, &radius[i], wp).with_precision(precision),
                ));
            } else {
                lowers += 1;
            }
        }
    }
    if reals.len() != s_count || uppers.len() != lowers || s_count + 2 * uppers.len() != n {
        return None;
    }
    reals.sort_by(|a, b| a.mid_f64().partial_cmp(&b.mid_f64()).unwrap());
    uppers.sort_by(|a, b| {
        (a.re.mid_f64(), a.im.mid_f64()).partial_cmp(&(b.re.mid_f64(), b.im.mid_f64())).unwrap()
    });
    Some(EmbeddingSet { real_roots: reals, complex_roots: uppers, source_poly: f.clone(), precision })
}

fn max_bf(a: &BigFloat, b: &BigFloat) -> BigFloat {
    if a.cmp(b).is_some_and(|c| c >= 0) {
        a.clone()
    } else {
        b.clone()
    }
}

/// Uncertified real roots in f64, for quick filters.
pub fn real_roots_f64(f: &IntPolynomial) -> Vec<f64> {
    let mut v: Vec<f64> = aberth_f64(f, 300)
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-9 * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn p(s: &str) -> IntPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn cubic_real_root() {
        let e = isolate_roots(&p("T^3 + T^2 - 1"), 192).unwrap();
        assert_eq!((e.s(), e.t()), (1, 1));
        assert!((e.real_f64()[0] - 0.754877666246693).abs() < 1e-14);
        assert!(e.real_roots[0].width_log2().unwrap() < -180);
        let e = isolate_roots(&p("T^3 + T + 1"), 128).unwrap();
        assert!((e.real_f64()[0] + 0.682327803828019).abs() < 1e-14);
    }

    #[test]
    fn rational_roots() {
        let e = isolate_roots(&p("T^2 - 1"), 192).unwrap();
        assert!(e.real_roots[0].contains_int(&BigInt::from(-1)));
        assert!(e.real_roots[1].contains_int(&BigInt::from(1)));
    }

    #[test]
    fn rejects_repeated_roots() {
        assert_eq!(isolate_roots(&p("T^3 - T^2"), 64).unwrap_err(), Error::NotSquarefree);
    }

    #[test]
    fn vieta_enclosures() {
        for s in ["T^4 - T - 1", "T^5 - T^3 - 2*T^2 + 1", "T^3 + 2*T + 2000", "T^6 - 3*T^2 + 1"] {
            let f = p(s);
            let e = isolate_roots(&f, 192).unwrap();
            let roots = e.all_roots();
            assert_eq!(roots.len(), f.degree());
            let mut sum = ComplexInterval::from_i64(0, 192);
            let mut prod = ComplexInterval::from_i64(1, 192);
            for r in &roots {
                sum = sum.add(r);
                prod = prod.mul(r);
            }
            let n = f.degree();
            assert!(sum.re.contains_int(&-f.coeff(n - 1)), "{s}");
            let c0 = if n.is_multiple_of(2) { f.coeff(0) } else { -f.coeff(0) };
            assert!(prod.re.contains_int(&c0), "{s}");
            assert!(sum.im.contains_int(&BigInt::zero()));
        }
    }

    #[test]
    fn refinement_narrows() {
        let e = isolate_roots(&p("T^4 - T - 1"), 96).unwrap();
        let w0 = e.real_roots[0].width_log2().unwrap();
        let e2 = e.refine(192).unwrap();
        let w1 = e2.real_roots[0].width_log2().unwrap();
        assert!(w1 <= w0 - 90);
        assert!(e.real_roots[0].overlaps(&e2.real_roots[0]));
    }
}
