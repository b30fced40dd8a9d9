//! Volumes of OT manifolds `X(K; U)` for fields with exactly one complex
//! place: the closed formula, the determinant path through raw embedding
//! matrices, Monte Carlo over an explicit fundamental domain, and the
//! prescribed-torsion family `T³ + mT - 1`.
//!
//! The invariant volume form is `c_s/(y_1⋯y_s) dx_1 dy_1 ⋯ dx_{s+1} dy_{s+1}`
//! with `c_s = (s+1)/2^{2s+s²-1}`. In `ℓ_j = log y_j` it is Euclidean, so the
//! volume of a fundamental domain is `c_s · covol(Minkowski lattice) · covol(unit lattice)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::interval::{rational_to_interval, BigFloatInterval, ComplexInterval};
use crate::order::{is_irreducible, OrderElement, SubOrder};
use crate::poly::IntPolynomial;
use crate::roots::EmbeddingSet;
use crate::units::{interval_det, unit_product};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    ClosedForm,
    DeterminantPath,
    MonteCarlo,
    InoueClosedForm,
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeResult {
    pub value: BigFloatInterval,
    pub s: usize,
    #[serde(serialize_with = "ser_display")]
    pub disc_abs: BigInt,
    pub regulator: Option<BigFloatInterval>,
    #[serde(serialize_with = "ser_display")]
    pub prefactor: BigRational,
    pub method: VolumeMethod,
    /// Monte Carlo standard error.
    pub stderr: Option<f64>,
}

fn ser_display<T: std::fmt::Display, S: serde::Serializer>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}

/// `(s+1)/(4^s·2^{s²})`.
pub fn volume_prefactor(s: usize) -> BigRational {
    BigRational::new(BigInt::from(s + 1), pow2(2 * s + s * s))
}

/// `(s+1)/2^{2s+s²-1}`, the density of the invariant volume form.
pub fn density_prefactor(s: usize) -> BigRational {
    BigRational::new(BigInt::from(s + 1), pow2(2 * s + s * s - 1))
}

/// `(s+1)/(4^s·2^{s²}) · √|Δ| · R`.
pub fn ot_volume(s: usize, disc_abs: &BigInt, regulator: &BigFloatInterval) -> Result<VolumeResult> {
    if s == 0 || !disc_abs.is_positive() || !regulator.is_positive() {
        return Err(Error::Degenerate("volume needs s >= 1, |disc| > 0, R > 0".into()));
    }
    let p = regulator.precision();
    let pre = volume_prefactor(s);
    let root = BigFloatInterval::from_int(disc_abs, p).sqrt().expect("positive");
    let value = rational_to_interval(&pre, p).mul(&root).mul(regulator);
    Ok(VolumeResult {
        value,
        s,
        disc_abs: disc_abs.clone(),
        regulator: Some(regulator.clone()),
        prefactor: pre,
        method: VolumeMethod::ClosedForm,
        stderr: None,
    })
}

// ---------------------------------------------------------------------------
// Fundamental domain

/// Inverse of a small interval matrix by cofactors.
pub fn interval_inverse(m: &[Vec<BigFloatInterval>]) -> Option<Vec<Vec<BigFloatInterval>>> {
    let n = m.len();
    let d = interval_det(m);
    if d.contains_zero() {
        return None;
    }
    let mut inv = vec![Vec::with_capacity(n); n];
    for (i, row) in inv.iter_mut().enumerate() {
        for j in 0..n {
            // (i, j) entry: cofactor of (j, i).
            let minor: Vec<Vec<BigFloatInterval>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&c| c != i).map(|c| m[r][c].clone()).collect())
                .collect();
            let c = interval_det(&minor);
            let c = if (i + j) % 2 == 1 { c.neg() } else { c };
            row.push(c.checked_div(&d)?);
        }
    }
    Some(inv)
}

fn mat_vec(m: &[Vec<BigFloatInterval>], v: &[BigFloatInterval]) -> Vec<BigFloatInterval> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(BigFloatInterval::from_i64(0, v[0].precision()), |acc, (a, b)| acc.add(&a.mul(b))))
        .collect()
}

fn to_f64(m: &[Vec<BigFloatInterval>]) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.iter().map(|x| x.mid_f64()).collect()).collect()
}

/// `Λ × Φ_Mink` for `O ⋊ (O^{×,+})²`: `log y ∈ {Σ β_i B_i : 0 ≤ β_i < 1}` with
/// `B_i = (log σ_j(ε_i²))_j`, and `(x_1, …, x_s, x_{s+1}, y_{s+1}) ∈ {Σ α_i Ã*_i}`
/// with `Ã*_i` the Minkowski vector of the `i`-th order basis element.
#[derive(Clone, Debug)]
pub struct FundamentalDomainData {
    pub s: usize,
    /// `b[j][i] = log σ_j(ε_i²)`.
    pub b: Vec<Vec<BigFloatInterval>>,
    /// `a[k][i]`: coordinate `k` of `Ã*_i`.
    pub a: Vec<Vec<BigFloatInterval>>,
    pub b_inv: Vec<Vec<BigFloatInterval>>,
    pub a_inv: Vec<Vec<BigFloatInterval>>,
    pub density_prefactor: BigRational,
    /// Generators `ε_i²` of `(O^{×,+})²`.
    pub square_gens: Vec<OrderElement>,
    pub emb: EmbeddingSet,
}

/// Rows: `σ_1 … σ_s`, `Re σ_{s+1}`, `Im σ_{s+1}`; columns: order basis.
pub fn minkowski_matrix(o: &SubOrder, emb: &EmbeddingSet) -> Vec<Vec<BigFloatInterval>> {
    let n = o.degree();
    let cols: Vec<(Vec<BigFloatInterval>, Vec<ComplexInterval>)> = (0..n)
        .map(|i| {
            let e = o.basis_element(i);
            (o.embed_real(&e, emb), o.embed_complex(&e, emb))
        })
        .collect();
    let mut rows: Vec<Vec<BigFloatInterval>> = Vec::with_capacity(n);
    for j in 0..emb.s() {
        rows.push(cols.iter().map(|c| c.0[j].clone()).collect());
    }
    for j in 0..emb.t() {
        rows.push(cols.iter().map(|c| c.1[j].re.clone()).collect());
        rows.push(cols.iter().map(|c| c.1[j].im.clone()).collect());
    }
    rows
}

fn require_one_complex_place(emb: &EmbeddingSet) -> Result<()> {
    if emb.t() != 1 || emb.s() == 0 {
        return Err(Error::Degenerate(format!(
            "OT volumes need s >= 1 and exactly one complex place, got (s, t) = ({}, {})",
            emb.s(),
            emb.t()
        )));
    }
    Ok(())
}

impl FundamentalDomainData {
    /// Built from generators of a totally positive unit group `U` (the domain
    /// is for `O ⋊ U²`).
    pub fn new(o: &SubOrder, positive_gens: &[OrderElement], precision: usize) -> Result<Self> {
        let emb = o.embeddings(precision)?;
        require_one_complex_place(&emb)?;
        let s = emb.s();
        if positive_gens.len() != s {
            return Err(Error::InsufficientUnits { found: positive_gens.len(), needed: s });
        }
        let square_gens: Vec<OrderElement> = positive_gens.iter().map(|g| o.mul(g, g)).collect();
        let mut b = vec![Vec::with_capacity(s); s];
        for g in &square_gens {
            let re = o.embed_real(g, &emb);
            for j in 0..s {
                if !re[j].is_positive() {
                    return Err(Error::Degenerate("generator is not totally positive".into()));
                }
                b[j].push(re[j].ln().ok_or(Error::PrecisionExhausted(precision))?);
            }
        }
        let a = minkowski_matrix(o, &emb);
        let b_inv = interval_inverse(&b).ok_or_else(|| Error::Degenerate("dependent units".into()))?;
        let a_inv = interval_inverse(&a).ok_or(Error::PrecisionExhausted(precision))?;
        Ok(FundamentalDomainData { s, b, a, b_inv, a_inv, density_prefactor: density_prefactor(s), square_gens, emb })
    }

    pub fn precision(&self) -> usize {
        self.emb.precision
    }

    pub fn det_a(&self) -> BigFloatInterval {
        interval_det(&self.a).abs()
    }

    pub fn det_b(&self) -> BigFloatInterval {
        interval_det(&self.b).abs()
    }
}

/// `(1/2^s) · c_s · |det Ã*| · |det B|` from the raw embedding matrices.
pub fn volume_determinant_path(o: &SubOrder, positive_gens: &[OrderElement], precision: usize) -> Result<VolumeResult> {
    let d = FundamentalDomainData::new(o, positive_gens, precision)?;
    let s = d.s;
    let c = rational_to_interval(&(d.density_prefactor.clone() / BigRational::from_integer(pow2(s))), precision);
    let value = c.mul(&d.det_a()).mul(&d.det_b());
    Ok(VolumeResult {
        value,
        s,
        disc_abs: o.disc().abs(),
        regulator: None,
        prefactor: volume_prefactor(s),
        method: VolumeMethod::DeterminantPath,
        stderr: None,
    })
}

/// A point of `H^s × C`.
pub type Point = Vec<ComplexInterval>;

pub fn point_from_f64(z: &[(f64, f64)], precision: usize) -> Point {
    z.iter()
        .map(|&(x, y)| ComplexInterval::new(BigFloatInterval::from_f64(x, precision), BigFloatInterval::from_f64(y, precision)))
        .collect()
}

pub fn point_to_f64(p: &Point) -> Vec<(f64, f64)> {
    p.iter().map(|z| z.to_f64()).collect()
}

/// `z ↦ σ(v)·z + σ(u)` on all `s + 1` coordinates.
pub fn act(o: &SubOrder, emb: &EmbeddingSet, u: &OrderElement, v: &OrderElement, p: &Point) -> Point {
    let su = o.embed_real(u, emb);
    let sv = o.embed_real(v, emb);
    let cu = o.embed_complex(u, emb);
    let cv = o.embed_complex(v, emb);
    let s = su.len();
    let mut out = Vec::with_capacity(p.len());
    for j in 0..s {
        out.push(p[j].scale(&sv[j]).add(&ComplexInterval::real(su[j].clone())));
    }
    out.push(cv[0].mul(&p[s]).add(&cu[0]));
    out
}

fn floor_unique(x: &BigFloatInterval) -> Option<i64> {
    let lo = x.lo_f64().floor();
    let hi = x.hi_f64().floor();
    // f64 rounding of the endpoints can only hide ambiguity when the
    // interval sits within 2^-50 of an integer.
    let near = (x.mid_f64() - x.mid_f64().round()).abs() < 1e-12;
    (lo == hi && !near).then_some(lo as i64)
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub point: Point,
    /// Translation part `u ∈ O`.
    pub u: OrderElement,
    /// Exponents of `v = ∏ (ε_i²)^{e_i}`.
    pub v_exponents: Vec<i64>,
    pub v: OrderElement,
}

impl Reduction {
    pub fn is_identity(&self) -> bool {
        self.u.is_zero() && self.v_exponents.iter().all(|&e| e == 0)
    }
}

/// The representative of `point` in the fundamental domain and the group
/// element `g = (u, v)` with `g·point = v·point + u` equal to it.
pub fn reduce_to_domain(point: &Point, d: &FundamentalDomainData, o: &SubOrder) -> Result<Reduction> {
    let s = d.s;
    if point.len() != s + 1 {
        return Err(Error::Dimension(format!("point needs {} coordinates", s + 1)));
    }
    let prec = d.precision();
    let mut logs = Vec::with_capacity(s);
    for z in &point[..s] {
        if !z.im.is_positive() {
            return Err(Error::Degenerate("point is not in the upper half plane".into()));
        }
        logs.push(z.im.ln().ok_or(Error::PrecisionExhausted(prec))?);
    }
    let beta = mat_vec(&d.b_inv, &logs);
    let n: Vec<i64> = beta.iter().map(floor_unique).collect::<Option<_>>().ok_or(Error::PrecisionExhausted(prec))?;
    let v_exponents: Vec<i64> = n.iter().map(|x| -x).collect();
    let v = unit_product(o, &d.square_gens, &v_exponents)?;
    let zero = OrderElement::new(vec![BigInt::zero(); o.degree()]);
    let scaled = act(o, &d.emb, &zero, &v, point);
    let mut x: Vec<BigFloatInterval> = scaled[..s].iter().map(|z| z.re.clone()).collect();
    x.push(scaled[s].re.clone());
    x.push(scaled[s].im.clone());
    let alpha = mat_vec(&d.a_inv, &x);
    let m: Vec<i64> = alpha.iter().map(floor_unique).collect::<Option<_>>().ok_or(Error::PrecisionExhausted(prec))?;
    let u = OrderElement::new(m.iter().map(|&k| BigInt::from(-k)).collect());
    let reduced = act(o, &d.emb, &u, &v, point);
    // Independent recomputation through the composite action.
    let direct = act(o, &d.emb, &u, &o.one(), &scaled);
    for (a, b) in reduced.iter().zip(&direct) {
        if !a.re.overlaps(&b.re) || !a.im.overlaps(&b.im) {
            return Err(Error::PrecisionExhausted(prec));
        }
    }
    Ok(Reduction { point: reduced, u, v_exponents, v })
}

/// Domain coordinates `(β, α)` of a point, for membership tests.
pub fn domain_coordinates(point: &Point, d: &FundamentalDomainData) -> Option<(Vec<f64>, Vec<f64>)> {
    let s = d.s;
    let logs: Vec<BigFloatInterval> = point[..s].iter().map(|z| z.im.ln()).collect::<Option<_>>()?;
    let mut x: Vec<BigFloatInterval> = point[..s].iter().map(|z| z.re.clone()).collect();
    x.push(point[s].re.clone());
    x.push(point[s].im.clone());
    Some((
        mat_vec(&d.b_inv, &logs).iter().map(|v| v.mid_f64()).collect(),
        mat_vec(&d.a_inv, &x).iter().map(|v| v.mid_f64()).collect(),
    ))
}

// ---------------------------------------------------------------------------
// Monte Carlo

const MC_BLOCK: usize = 4096;

/// Integrates the invariant density over `Λ × Φ_Mink` by uniform sampling in
/// a bounding box in `(x, y)` coordinates and divides by `[U : U²] = 2^s`.
/// Block `k` draws from ChaCha8 stream `k`, so results do not depend on the
/// thread count.
pub fn mc_volume(d: &FundamentalDomainData, samples: usize, seed: u64, exec: Exec) -> Result<VolumeResult> {
    if samples < 1000 {
        return Err(Error::Degenerate("Monte Carlo needs at least 1000 samples".into()));
    }
    let s = d.s;
    let b = to_f64(&d.b);
    let a = to_f64(&d.a);
    let b_inv = to_f64(&d.b_inv);
    let a_inv = to_f64(&d.a_inv);
    // Bounding boxes of the two parallelotopes.
    let span = |m: &[Vec<f64>]| -> Vec<(f64, f64)> {
        m.iter()
            .map(|row| {
                let lo: f64 = row.iter().map(|x| x.min(0.0)).sum();
                let hi: f64 = row.iter().map(|x| x.max(0.0)).sum();
                (lo, hi)
            })
            .collect()
    };
    let lbox = span(&b);
    let xbox = span(&a);
    let ybox: Vec<(f64, f64)> = lbox.iter().map(|&(lo, hi)| (lo.exp(), hi.exp())).collect();
    let box_vol: f64 =
        ybox.iter().map(|(lo, hi)| hi - lo).product::<f64>() * xbox.iter().map(|(lo, hi)| hi - lo).product::<f64>();
    let c = d.density_prefactor.to_f64().unwrap();
    let blocks = samples.div_ceil(MC_BLOCK);
    let inside = |m: &[Vec<f64>], v: &[f64]| {
        m.iter().all(|row| {
            let t: f64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
            (0.0..1.0).contains(&t)
        })
    };
    let sums = exec.map_range(blocks, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let count = MC_BLOCK.min(samples - k * MC_BLOCK);
        let (mut s1, mut s2) = (0.0f64, 0.0f64);
        let mut y = vec![0.0; s];
        let mut ly = vec![0.0; s];
        let mut x = vec![0.0; s + 2];
        for _ in 0..count {
            for j in 0..s {
                y[j] = rng.gen_range(ybox[j].0..ybox[j].1);
                ly[j] = y[j].ln();
            }
            for (k, xi) in x.iter_mut().enumerate() {
                *xi = rng.gen_range(xbox[k].0..xbox[k].1);
            }
            if inside(&b_inv, &ly) && inside(&a_inv, &x) {
                let f = c / y.iter().product::<f64>();
                s1 += f;
                s2 += f * f;
            }
        }
        (s1, s2)
    });
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
    let nf = samples as f64;
    let mean = s1 / nf;
    let var = (s2 / nf - mean * mean).max(0.0);
    let scale = box_vol / 2f64.powi(s as i32);
    let est = scale * mean;
    let err = scale * (var / nf).sqrt();
    let p = d.precision();
    Ok(VolumeResult {
        value: BigFloatInterval::from_f64(est, p),
        s,
        disc_abs: BigInt::zero(),
        regulator: None,
        prefactor: volume_prefactor(s),
        method: VolumeMethod::MonteCarlo,
        stderr: Some(err),
    })
}

// ---------------------------------------------------------------------------
// Identities

#[derive(Clone, Debug, Serialize)]
pub struct MetricDetReport {
    pub s: usize,
    pub det: f64,
    pub expected: f64,
    pub rel_dev: f64,
    pub overlaps: bool,
}

impl MetricDetReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.overlaps && self.rel_dev < tol
    }
}

/// Builds `(g_kl)` from the Kähler potential `φ_1 + |z_{s+1}|²` with
/// `φ_1 = 1/(2^s ∏ y_j)` and compares `det(g_kl)` with `c_s ∏ y_j^{-(s+2)}`.
pub fn metric_det_check(s: usize, y: &[f64], precision: usize) -> Result<MetricDetReport> {
    if y.len() != s || y.iter().any(|&v| v <= 0.0) {
        return Err(Error::Degenerate("need s positive y values".into()));
    }
    let yi: Vec<BigFloatInterval> = y.iter().map(|&v| BigFloatInterval::from_f64(v, precision)).collect();
    let prod = yi.iter().fold(BigFloatInterval::from_i64(1, precision), |a, b| a.mul(b));
    let phi = BigFloatInterval::from_int(&pow2(s), precision).mul(&prod).recip().expect("positive");
    let mut g = vec![vec![BigFloatInterval::from_i64(0, precision); s + 1]; s + 1];
    for k in 0..s {
        for l in 0..s {
            let den = if k == l { 2 } else { 4 };
            g[k][l] = phi.div(&yi[k].mul(&yi[l]).mul_int(den));
        }
    }
    g[s][s] = BigFloatInterval::from_i64(2, precision);
    let det = interval_det(&g);
    let expected = rational_to_interval(&density_prefactor(s), precision).div(&prod.powi((s + 2) as u32));
    let rel = det.sub(&expected).abs().div(&expected);
    Ok(MetricDetReport {
        s,
        det: det.mid_f64(),
        expected: expected.mid_f64(),
        rel_dev: rel.mid_f64(),
        overlaps: det.overlaps(&expected),
    })
}

/// `det` of the `s × s` matrix with 2 on the diagonal and 1 elsewhere (`= s + 1`).
pub fn inner_bracket(s: usize) -> BigInt {
    let mut m = crate::matrix::IntMatrix::zeros(s, s);
    for i in 0..s {
        for j in 0..s {
            m.set(i, j, BigInt::from(if i == j { 2 } else { 1 }));
        }
    }
    m.det()
}

// ---------------------------------------------------------------------------
// Closed forms and bounds

/// `¼·√(4m³+27)·log|z - m/(3z)|` with `z = ∛(½ + (√3/18)·√(4m³+27))`: the
/// volume of `(H × C)/(Z[T̄] ⋊ ⟨T̄⟩)` for `T³ + mT - 1`.
pub fn inoue_closed_form(m: u64, precision: usize) -> Result<VolumeResult> {
    let f = IntPolynomial::from_i64s(&[-1, m as i64, 0, 1]);
    if m == 0 || !is_irreducible(&f) {
        return Err(Error::Reducible { factor: None });
    }
    let p = precision;
    let d = BigInt::from(4) * BigInt::from(m).pow(3) + 27;
    let rd = BigFloatInterval::from_int(&d, p).sqrt().expect("positive");
    let r3 = BigFloatInterval::from_i64(3, p).sqrt().expect("positive");
    let half = BigFloatInterval::from_rational(&BigRational::new(1.into(), 2.into()), p);
    let z = half.add(&r3.mul(&rd).div(&BigFloatInterval::from_i64(18, p))).cbrt();
    let t = z.sub(&BigFloatInterval::from_i64(m as i64, p).div(&z.mul_int(3)));
    let reg = t.abs().ln().ok_or(Error::PrecisionExhausted(p))?.abs();
    let value = rd.mul(&reg).div(&BigFloatInterval::from_i64(4, p));
    Ok(VolumeResult {
        value,
        s: 1,
        disc_abs: d,
        regulator: Some(reg),
        prefactor: volume_prefactor(1),
        method: VolumeMethod::InoueClosedForm,
        stderr: None,
    })
}

/// Real root `z - m/(3z)` of `T³ + mT - 1` from the Vieta substitution.
pub fn vieta_root(m: u64, precision: usize) -> BigFloatInterval {
    let p = precision;
    let d = BigInt::from(4) * BigInt::from(m).pow(3) + 27;
    let rd = BigFloatInterval::from_int(&d, p).sqrt().expect("positive");
    let r3 = BigFloatInterval::from_i64(3, p).sqrt().expect("positive");
    let half = BigFloatInterval::from_rational(&BigRational::new(1.into(), 2.into()), p);
    let z = half.add(&r3.mul(&rd).div(&BigFloatInterval::from_i64(18, p))).cbrt();
    z.sub(&BigFloatInterval::from_i64(m as i64, p).div(&z.mul_int(3)))
}

fn bound_from_z(z: &BigFloatInterval) -> BigFloatInterval {
    z.add(&z.sqr()).mul_int(3)
}

/// `3(z + z²)` with `z = max(w, √(1/w))`, `w = exp(4·vol/√|Δ|)`, bounding
/// `#H₁(X, Z)_tors` for `s = t = 1`.
pub fn torsion_upper_bound(vol: &BigFloatInterval, disc_abs: &BigInt) -> BigFloatInterval {
    let p = vol.precision();
    let w = vol.mul_int(4).div(&BigFloatInterval::from_int(disc_abs, p).sqrt().expect("positive")).exp();
    let inv_root = w.recip().expect("positive").sqrt().expect("positive");
    bound_from_z(&w.hull(&w).max_with(&inv_root))
}

/// The same bound with `z = max(√w, 1/√w)`. It is also valid: with
/// `σ_1(u) = a²` and `|σ_2(u)| = 1/a`, `|N(1-u)| ≤ a² + 2a + 2/a + 1/a² ≤ 2z² + 4z ≤ 3(z + z²)`
/// since `z ≥ 1`.
pub fn torsion_upper_bound_sharp(vol: &BigFloatInterval, disc_abs: &BigInt) -> BigFloatInterval {
    let p = vol.precision();
    let w = vol.mul_int(4).div(&BigFloatInterval::from_int(disc_abs, p).sqrt().expect("positive")).exp();
    let a = w.sqrt().expect("positive");
    bound_from_z(&a.max_with(&a.recip().expect("positive")))
}

/// `π·(s+2)^{s+1}/(4^{s+2}·2^{s²}·s!)`.
pub fn volume_lower_bound(s: usize, precision: usize) -> BigFloatInterval {
    let q = volume_lower_bound_rational(s);
    BigFloatInterval::pi(precision).mul(&rational_to_interval(&q, precision))
}

/// The rational factor of [`volume_lower_bound`].
pub fn volume_lower_bound_rational(s: usize) -> BigRational {
    let fact: BigInt = (1..=s).map(BigInt::from).product();
    BigRational::new(BigInt::from(s + 2).pow(s as u32 + 1), pow2(2 * (s + 2) + s * s) * fact)
}

/// `(s+1)(s+2)^{s+2}/(4^{s+2}·2^{s²}·(s+2)!)`, the same quantity before cancelling.
pub fn volume_lower_bound_rational_unreduced(s: usize) -> BigRational {
    let fact: BigInt = (1..=s + 2).map(BigInt::from).product();
    BigRational::new(BigInt::from(s + 1) * BigInt::from(s + 2).pow(s as u32 + 2), pow2(2 * (s + 2) + s * s) * fact)
}

trait MaxWith {
    fn max_with(&self, o: &Self) -> Self;
}

impl MaxWith for BigFloatInterval {
    /// Interval enclosure of `max(x, y)`.
    fn max_with(&self, o: &Self) -> Self {
        if o.lt(self) {
            self.clone()
        } else if self.lt(o) {
            o.clone()
        } else {
            let lo = if self.lo_f64() > o.lo_f64() { self } else { o };
            let hi = if self.hi_f64() > o.hi_f64() { self } else { o };
            lo.hull(hi)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::MonogenicOrder;
    use crate::units::{unit_group, UnitConfig};

    fn maximal(s: &str) -> SubOrder {
        MonogenicOrder::build(&s.parse().unwrap()).unwrap().maximalize()
    }

    #[test]
    fn closed_form_disc_23() {
        let r = BigFloatInterval::from_f64(0.28119957432296183, 128);
        let v = ot_volume(1, &BigInt::from(23), &r).unwrap();
        assert!((v.value.mid_f64() - 0.337146).abs() < 1e-6);
        assert_eq!(v.prefactor, BigRational::new(1.into(), 4.into()));
    }

    #[test]
    fn determinant_path_disc_23() {
        let o = maximal("T^3 + T^2 - 1");
        let v = volume_determinant_path(&o, &[o.generator()], 192).unwrap();
        assert!((v.value.mid_f64() - 0.3371463).abs() < 1e-6, "{}", v.value);
        let d = FundamentalDomainData::new(&o, &[o.generator()], 192).unwrap();
        let da = d.det_a();
        assert!((da.mid_f64() - 23f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((d.det_b().mid_f64() - 2.0 * 0.28119957432296183).abs() < 1e-12);
    }

    #[test]
    fn inoue_matches_vieta_root() {
        let t = vieta_root(1, 128);
        assert!((t.mid_f64() - 0.6823278038280193).abs() < 1e-12);
        for m in [1u64, 2, 3, 8] {
            let o = MonogenicOrder::build(&IntPolynomial::from_i64s(&[-1, m as i64, 0, 1])).unwrap().power_basis();
            let a = inoue_closed_form(m, 192).unwrap();
            let b = volume_determinant_path(&o, &[o.generator()], 192).unwrap();
            assert!(a.value.rel_close(&b.value, 1e-20), "m={m}: {} vs {}", a.value, b.value);
        }
    }

    #[test]
    fn metric_determinant() {
        let r = metric_det_check(1, &[1.0], 192).unwrap();
        assert!((r.det - 0.5).abs() < 1e-15);
        assert_eq!(inner_bracket(2), BigInt::from(3));
        for s in 1..=4 {
            let y: Vec<f64> = (0..s).map(|j| 0.3 + j as f64 * 0.7).collect();
            assert!(metric_det_check(s, &y, 192).unwrap().passes(2f64.powi(-64)));
        }
    }

    #[test]
    fn lower_bound_forms_agree() {
        for s in 1..=8 {
            assert_eq!(volume_lower_bound_rational(s), volume_lower_bound_rational_unreduced(s));
            assert!(volume_lower_bound(s, 64).is_positive());
        }
        assert!((volume_lower_bound(1, 64).mid_f64() - 9.0 * std::f64::consts::PI / 128.0).abs() < 1e-15);
    }

    #[test]
    fn reduction_is_idempotent() {
        let o = maximal("T^3 + T^2 - 1");
        let d = FundamentalDomainData::new(&o, &[o.generator()], 128).unwrap();
        let p = point_from_f64(&[(3.7, 11.2), (-5.1, 2.25)], 128);
        let r = reduce_to_domain(&p, &d, &o).unwrap();
        let (beta, alpha) = domain_coordinates(&r.point, &d).unwrap();
        assert!(beta.iter().chain(&alpha).all(|x| (0.0..1.0).contains(x)));
        let again = reduce_to_domain(&r.point, &d, &o).unwrap();
        assert!(again.is_identity());
    }

    #[test]
    fn monte_carlo_disc_23() {
        let o = maximal("T^3 + T^2 - 1");
        let d = FundamentalDomainData::new(&o, &[o.generator()], 128).unwrap();
        let v = mc_volume(&d, 200_000, 42, Exec::default()).unwrap();
        let err = v.stderr.unwrap();
        assert!((v.value.mid_f64() - 0.337146).abs() < 4.0 * err, "{} ± {err}", v.value.mid_f64());
    }

    #[test]
    fn torsion_bounds() {
        let o = maximal("T^3 + 8*T - 1");
        let ud = unit_group(&o, &UnitConfig::default()).unwrap();
        let v = ot_volume(1, &o.disc().abs(), &ud.regulator).unwrap();
        assert!((v.value.mid_f64() - 2.3702).abs() < 1e-3);
        let sharp = torsion_upper_bound_sharp(&v.value, &o.disc().abs());
        assert!((sharp.mid_f64() - 13.54).abs() < 0.01, "{}", sharp);
        assert!(torsion_upper_bound(&v.value, &o.disc().abs()).mid_f64() >= sharp.mid_f64());
    }
}
