//! Unit groups: search, certification, totally positive generators,
//! regulators, and the ideal `J(U)` with the torsion group `O/J(U)`.
//!
//! Rank-one fields with one real and one complex place get their
//! fundamental unit from the chain of relative minima of `O` (one period of
//! Voronoi's algorithm). Other fields use a box search in an LLL-reduced
//! basis plus a collision search among elements of equal small norm.
//! Either way the result is certified against a regulator lower bound: the
//! index of the found group is at most `R_found / R_min`, and each prime `k`
//! up to that bound is excluded with power-residue characters modulo split
//! primes `q ≡ 1 (mod k)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::factor::{is_probable_prime, primes_up_to};
use crate::fpoly;
use crate::interval::{default_precision, BigFloatInterval, ComplexInterval};
use crate::linalg::{bigint_mod, kernel_mod_p, lll_f64, mod_inv, mulmod, powmod, short_vectors};
use crate::matrix::IntMatrix;
use crate::order::{OrderElement, Signature, SubOrder};
use crate::roots::EmbeddingSet;

/// Certified (or best-effort) unit data for an order.
#[derive(Clone, Debug)]
pub struct UnitGroupData {
    /// Fundamental system modulo `±1`.
    pub generators: Vec<OrderElement>,
    pub regulator: BigFloatInterval,
    /// `1`: fundamental; `k > 1`: index at most `k`; `0`: uncertified.
    pub certified_index_bound: u64,
    pub totally_positive_generators: Vec<OrderElement>,
    /// `[O^× / ±1 : O^{×,+}]`
    pub sign_index: u64,
    pub torsion_sign_present: bool,
    pub regulator_floor: Option<f64>,
    pub signature: Signature,
}

impl UnitGroupData {
    pub fn is_certified(&self) -> bool {
        self.certified_index_bound == 1
    }

    /// Regulator of `O^{×,+}`.
    pub fn positive_regulator(&self) -> BigFloatInterval {
        self.regulator.mul_int(self.sign_index as i64)
    }

    pub fn to_json(&self, o: &SubOrder) -> serde_json::Value {
        serde_json::json!({
            "generators": self.generators.iter().map(|g| o.display_element(g)).collect::<Vec<_>>(),
            "totally_positive_generators":
                self.totally_positive_generators.iter().map(|g| o.display_element(g)).collect::<Vec<_>>(),
            "regulator": {"mid": self.regulator.mid_f64(), "rad": self.regulator.rad_f64()},
            "certified_index_bound": self.certified_index_bound,
            "sign_index": self.sign_index,
        })
    }
}

#[derive(Clone, Debug)]
pub struct UnitConfig {
    /// Box search bound; `None` picks 12 for cubics and 6 otherwise.
    pub coord_bound: Option<u64>,
    pub precision: usize,
    pub exec: Exec,
    /// Doublings of the box bound when the search is rank deficient.
    pub escalations: usize,
}

impl Default for UnitConfig {
    fn default() -> Self {
        UnitConfig { coord_bound: None, precision: default_precision(), exec: Exec::default(), escalations: 2 }
    }
}

/// Regulator lower bounds for fields with `t = 1`, with the discriminant
/// range on which each is valid; otherwise the universal `R > 1/4`.
pub fn friedman_floor(sig: Signature, disc_abs: &BigInt) -> Option<f64> {
    let d = disc_abs.to_f64().unwrap_or(f64::INFINITY);
    if sig.t == 1 {
        let table: Option<(f64, f64)> = match sig.s {
            1 => Some((0.28, 18.7f64.powi(3))),
            2 => Some((0.367, 36f64.powi(4))),
            3 => Some((0.6218, 4903.0)),
            4 => Some((1.2376, 94363.0)),
            5 => Some((2.7822, 2369207.0)),
            _ => None,
        };
        if let Some((floor, ceiling)) = table {
            if d <= ceiling {
                return Some(floor);
            }
        }
    }
    // Three sextic fields violate the universal bound.
    if sig.s + 2 * sig.t == 6 {
        None
    } else {
        Some(0.25)
    }
}

// ---------------------------------------------------------------------------
// Embedding helpers

/// Root enclosures refined on demand.
pub struct EmbeddingCache {
    emb: EmbeddingSet,
}

impl EmbeddingCache {
    pub fn new(o: &SubOrder, precision: usize) -> Result<Self> {
        Ok(EmbeddingCache { emb: o.embeddings(precision)? })
    }

    pub fn get(&self) -> &EmbeddingSet {
        &self.emb
    }

    pub fn at_least(&mut self, precision: usize) -> Result<&EmbeddingSet> {
        if self.emb.precision < precision {
            let mut p = self.emb.precision;
            while p < precision {
                p *= 2;
            }
            self.emb = self.emb.refine(p)?;
        }
        Ok(&self.emb)
    }
}

fn coord_bits(x: &OrderElement) -> u64 {
    x.coords.iter().map(|c| c.bits()).max().unwrap_or(0)
}

/// `log|σ_j(x)|` at the first `s + t - 1` places (complex places doubled).
pub fn log_vector(o: &SubOrder, x: &OrderElement, emb: &EmbeddingSet) -> Option<Vec<BigFloatInterval>> {
    let r = emb.s() + emb.t() - 1;
    let mut v: Vec<BigFloatInterval> = Vec::with_capacity(r);
    for s in o.embed_real(x, emb) {
        v.push(s.abs().ln()?);
    }
    for c in o.embed_complex(x, emb) {
        v.push(c.norm_sqr().ln()?);
    }
    v.truncate(r);
    Some(v)
}

pub fn log_vector_f64(be: &crate::order::BasisEmbeddings, x: &OrderElement, r: usize) -> Vec<f64> {
    let c: Vec<f64> = x.coords.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
    let mut v: Vec<f64> = be.real_of(&c).iter().map(|y| y.abs().ln()).collect();
    v.extend(be.complex_of(&c).iter().map(|z| 2.0 * z.norm().ln()));
    v.truncate(r);
    v
}

/// Determinant of a small interval matrix by Laplace expansion.
pub fn interval_det(m: &[Vec<BigFloatInterval>]) -> BigFloatInterval {
    let n = m.len();
    let p = m.first().and_then(|r| r.first()).map_or(128, |x| x.precision());
    match n {
        0 => BigFloatInterval::from_i64(1, p),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = BigFloatInterval::from_i64(0, p);
            for j in 0..n {
                let minor: Vec<Vec<BigFloatInterval>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = m[0][j].mul(&interval_det(&minor));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

/// `|det(log|σ_j(ε_i)|)|` over `r = s + t - 1` places.
pub fn regulator(o: &SubOrder, gens: &[OrderElement], emb: &EmbeddingSet) -> Result<BigFloatInterval> {
    let r = emb.s() + emb.t() - 1;
    if gens.len() != r {
        return Err(Error::InsufficientUnits { found: gens.len(), needed: r });
    }
    if r == 0 {
        return Ok(BigFloatInterval::from_i64(1, emb.precision));
    }
    let rows: Vec<Vec<BigFloatInterval>> = gens
        .iter()
        .map(|g| log_vector(o, g, emb).ok_or(Error::NotAUnit))
        .collect::<Result<_>>()?;
    let d = interval_det(&rows).abs();
    if d.contains_zero() {
        return Err(Error::Degenerate("units are dependent".into()));
    }
    Ok(d)
}

// ---------------------------------------------------------------------------
// Search

fn canonical_sign(c: &mut [BigInt]) {
    if c.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        c.iter_mut().for_each(|x| *x = -&*x);
    }
}

fn canonical_sort(v: &mut Vec<OrderElement>) {
    v.sort_by(|a, b| {
        let ha = a.coords.iter().map(|c| c.abs()).max();
        let hb = b.coords.iter().map(|c| c.abs()).max();
        ha.cmp(&hb).then_with(|| a.cmp(b))
    });
    v.dedup();
}

/// All units with order-basis coordinates in `[-B, B]`, up to sign, canonically sorted.
pub fn find_units(o: &SubOrder, coord_bound: u64) -> Result<Vec<OrderElement>> {
    let n = o.degree();
    let ident: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    find_units_in(o, &ident, coord_bound, Exec::default())
}

/// Units `Σ c_i b_i` with `|c_i| ≤ B`, where row `i` of `transform` gives `b_i`
/// in order coordinates.
pub fn find_units_in(o: &SubOrder, transform: &[Vec<i64>], coord_bound: u64, exec: Exec) -> Result<Vec<OrderElement>> {
    let emb = o.embeddings(64)?;
    let be = o.basis_embeddings_f64(&emb);
    let n = o.degree();
    let b = coord_bound as i64;
    let side = (2 * b + 1) as usize;
    // Embeddings of the transformed basis.
    let tr: Vec<Vec<f64>> = transform.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    let re: Vec<Vec<f64>> = be.real.iter().map(|row| tr.iter().map(|t| dotf(row, t)).collect()).collect();
    let cx: Vec<Vec<Complex64>> = be
        .complex
        .iter()
        .map(|row| tr.iter().map(|t| row.iter().zip(t).map(|(a, b)| a * b).sum()).collect())
        .collect();
    let to_coords = |c: &[i64]| -> Vec<BigInt> {
        (0..n).map(|j| BigInt::from((0..n).map(|i| c[i] as i128 * transform[i][j] as i128).sum::<i128>())).collect()
    };
    // Block over the last coordinate, which is nonnegative up to sign.
    let blocks = exec.map_range(b as usize + 1, |last| {
        let mut found = Vec::new();
        let mut c = vec![-b; n];
        c[n - 1] = last as i64;
        let total = side.pow((n - 1) as u32);
        for idx in 0..total {
            let mut k = idx;
            for item in c.iter_mut().take(n - 1) {
                *item = (k % side) as i64 - b;
                k /= side;
            }
            if c.iter().all(|&x| x == 0) {
                continue;
            }
            if c.iter().rev().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                continue;
            }
            let mut nm = 1.0f64;
            for row in &re {
                nm *= row.iter().zip(&c).map(|(a, &x)| a * x as f64).sum::<f64>();
            }
            for row in &cx {
                nm *= row.iter().zip(&c).map(|(a, &x)| a * x as f64).sum::<Complex64>().norm_sqr();
            }
            if (nm.abs() - 1.0).abs() < 0.25 {
                let x = OrderElement::new(to_coords(&c));
                if o.is_unit(&x) {
                    found.push(x);
                }
            }
        }
        found
    });
    let mut out: Vec<OrderElement> = blocks
        .into_iter()
        .flatten()
        .map(|mut x| {
            canonical_sign(&mut x.coords);
            x
        })
        .collect();
    canonical_sort(&mut out);
    Ok(out)
}

fn dotf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Units `α/β` from pairs of elements generating the same principal ideal.
pub fn collision_units(o: &SubOrder, transform: &[Vec<i64>], coord_bound: u64, max_norm: u64) -> Result<Vec<OrderElement>> {
    let emb = o.embeddings(64)?;
    let be = o.basis_embeddings_f64(&emb);
    let n = o.degree();
    let b = coord_bound as i64;
    let side = (2 * b + 1) as usize;
    let mut groups: BTreeMap<(u64, Vec<Vec<BigInt>>), Vec<OrderElement>> = BTreeMap::new();
    let mut c = vec![0i64; n];
    for idx in 0..side.pow(n as u32) {
        let mut k = idx;
        for item in c.iter_mut() {
            *item = (k % side) as i64 - b;
            k /= side;
        }
        if c.iter().rev().find(|&&x| x != 0).is_none_or(|&x| x < 0) {
            continue;
        }
        let coords: Vec<f64> =
            (0..n).map(|j| (0..n).map(|i| (c[i] * transform[i][j]) as f64).sum()).collect();
        let mut nm = 1.0f64;
        for z in be.real_of(&coords) {
            nm *= z;
        }
        for z in be.complex_of(&coords) {
            nm *= z.norm_sqr();
        }
        let a = nm.abs();
        if a < 1.5 || a > max_norm as f64 + 0.5 || (a - a.round()).abs() > 1e-6 {
            continue;
        }
        let x = OrderElement::new(
            (0..n).map(|j| BigInt::from((0..n).map(|i| c[i] * transform[i][j]).sum::<i64>())).collect(),
        );
        let m = o.mult_matrix(&x);
        let nn = m.det().abs();
        let Some(nu) = nn.to_u64() else { continue };
        let key = (nu, m.hnf().to_rows());
        let g = groups.entry(key).or_default();
        if g.len() < 4 {
            g.push(x);
        }
    }
    let mut out = Vec::new();
    for g in groups.values() {
        for y in &g[1..] {
            if let Some(u) = o.exact_div(y, &g[0]) {
                if o.is_unit(&u) && u != o.one() && u != o.one().neg() {
                    let mut u = u;
                    canonical_sign(&mut u.coords);
                    out.push(u);
                }
            }
        }
    }
    canonical_sort(&mut out);
    Ok(out)
}

/// Fundamental unit `ε > 1` of an order with one real and one complex place,
/// from one period of the chain of relative minima.
pub fn relative_minima_unit(o: &SubOrder, max_steps: usize) -> Result<OrderElement> {
    let sig = o.signature();
    if sig != (Signature { s: 1, t: 1 }) {
        return Err(Error::Dimension("relative minima need s = t = 1".into()));
    }
    let mut cache = EmbeddingCache::new(o, 192)?;
    let mut theta = o.one();
    let mut beta: Vec<OrderElement> = (0..3).map(|i| o.basis_element(i)).collect();
    for _ in 0..max_steps {
        let bits = beta.iter().chain(std::iter::once(&theta)).map(coord_bits).max().unwrap_or(0);
        let prec = 192 + 2 * bits as usize + 4 * o.den().bits() as usize;
        let emb = cache.at_least(prec)?.clone();
        let t1 = o.embed_real(&theta, &emb).remove(0);
        let t2 = o.embed_complex(&theta, &emb).remove(0);
        let norm_emb = |x: &OrderElement| -> (BigFloatInterval, ComplexInterval) {
            let a = o.embed_real(x, &emb).remove(0).div(&t1);
            let b = o.embed_complex(x, &emb).remove(0).checked_div(&t2).expect("θ ≠ 0");
            (a, b)
        };
        // Reduce the basis of θ^{-1}O.
        let vecs: Vec<Vec<f64>> = beta
            .iter()
            .map(|x| {
                let (a, b) = norm_emb(x);
                vec![a.mid_f64(), b.re.mid_f64(), b.im.mid_f64()]
            })
            .collect();
        let (_, u) = lll_f64(&vecs);
        beta = combine(&beta, &u);
        let w: Vec<(f64, Complex64)> = beta
            .iter()
            .map(|x| {
                let (a, b) = norm_emb(x);
                (a.mid_f64(), Complex64::new(b.re.mid_f64(), b.im.mid_f64()))
            })
            .collect();
        let mut xs = 2.0f64;
        let next = loop {
            let rows: Vec<[f64; 3]> = w.iter().map(|(a, b)| [a / xs, b.re, b.im]).collect();
            let gram: Vec<Vec<f64>> =
                (0..3).map(|i| (0..3).map(|j| (0..3).map(|k| rows[i][k] * rows[j][k]).sum()).collect()).collect();
            let mut best: Option<(OrderElement, BigFloatInterval)> = None;
            for c in short_vectors(&gram, 2.0 * (1.0 + 1e-6)) {
                let a: f64 = c.iter().zip(&w).map(|(&ci, (a, _))| ci as f64 * a).sum();
                let b: Complex64 = c.iter().zip(&w).map(|(&ci, (_, b))| *b * ci as f64).sum();
                if a.abs() < 1.0 - 1e-9 || b.norm() > 1.0 + 1e-9 {
                    continue;
                }
                let gamma = combine_one(&beta, &c);
                let (ia, ib) = norm_emb(&gamma);
                let one = BigFloatInterval::from_i64(1, ia.precision());
                let abs_a = ia.abs();
                let nb = ib.norm_sqr();
                if gamma == theta || gamma.neg() == theta {
                    continue;
                }
                let decided = (one.lt(&abs_a) || abs_a.lt(&one)) && (one.lt(&nb) || nb.lt(&one));
                if !decided {
                    return Err(Error::PrecisionExhausted(prec));
                }
                if one.lt(&abs_a) && nb.lt(&one) {
                    let gamma = if ia.is_negative() { gamma.neg() } else { gamma };
                    match &best {
                        Some((_, ba)) if !abs_a.lt(ba) => {
                            if abs_a.overlaps(ba) {
                                return Err(Error::PrecisionExhausted(prec));
                            }
                        }
                        _ => best = Some((gamma, abs_a)),
                    }
                }
            }
            // Minimality holds only inside the box |x1| <= X.
            if let Some((g, ba)) = best {
                if ba.hi_f64() < xs {
                    break g;
                }
            }
            xs *= 2.0;
            if xs > 1e300 {
                return Err(Error::Degenerate("no relative minimum found".into()));
            }
        };
        theta = next;
        if o.is_unit(&theta) {
            return Ok(theta);
        }
    }
    Err(Error::Degenerate(format!("no unit within {max_steps} relative minima")))
}

fn combine(basis: &[OrderElement], u: &[Vec<i64>]) -> Vec<OrderElement> {
    u.iter().map(|row| combine_one(basis, row)).collect()
}

fn combine_one(basis: &[OrderElement], c: &[i64]) -> OrderElement {
    let n = basis[0].coords.len();
    let mut v = vec![BigInt::zero(); n];
    for (b, &ci) in basis.iter().zip(c) {
        if ci != 0 {
            let k = BigInt::from(ci);
            for (x, y) in v.iter_mut().zip(&b.coords) {
                *x += y * &k;
            }
        }
    }
    OrderElement::new(v)
}

// ---------------------------------------------------------------------------
// Basis extraction

/// `∏ b_i^{e_i}` exactly.
pub fn unit_product(o: &SubOrder, basis: &[OrderElement], e: &[i64]) -> Result<OrderElement> {
    let mut acc = o.one();
    for (b, &k) in basis.iter().zip(e) {
        if k != 0 {
            acc = o.mul(&acc, &o.pow(b, k)?);
        }
    }
    Ok(acc)
}

/// Basis (modulo torsion) of the group generated by `units`.
pub fn basis_from_units(o: &SubOrder, units: &[OrderElement], emb: &EmbeddingSet) -> Result<Vec<OrderElement>> {
    let r = emb.s() + emb.t() - 1;
    let be = o.basis_embeddings_f64(emb);
    let mut cands: Vec<(f64, OrderElement, Vec<f64>)> = units
        .iter()
        .map(|u| {
            let v = log_vector_f64(&be, u, r);
            (v.iter().map(|x| x * x).sum::<f64>(), u.clone(), v)
        })
        .filter(|(h, _, _)| *h > 1e-12)
        .collect();
    cands.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| a.1.cmp(&b.1)));
    // Greedy independent set.
    let mut basis: Vec<OrderElement> = Vec::new();
    let mut logs: Vec<Vec<f64>> = Vec::new();
    for (_, u, v) in &cands {
        if basis.len() == r {
            break;
        }
        let mut trial = logs.clone();
        trial.push(v.clone());
        if rank_f64(&trial) == trial.len() {
            basis.push(u.clone());
            logs.push(v.clone());
        }
    }
    if basis.len() < r {
        return Err(Error::InsufficientUnits { found: basis.len(), needed: r });
    }
    // Enlarge by every unit whose coordinates are not integral.
    for (_, u, v) in &cands {
        let q = solve_f64(&logs, v);
        let Some((den, num)) = rationalize(&q, 720) else { continue };
        if den == 1 {
            continue;
        }
        let mut m = IntMatrix::zeros(r, r + 1);
        for i in 0..r {
            m.set(i, i, BigInt::from(den));
            m.set(i, r, BigInt::from(num[i]));
        }
        let h = m.hnf_with_transform();
        let mut gens = basis.clone();
        gens.push(u.clone());
        let mut next = Vec::with_capacity(r);
        for j in 0..r {
            let e: Vec<i64> = (0..=r).map(|i| h.u.get(i, j).to_i64().expect("small exponents")).collect();
            next.push(unit_product(o, &gens, &e)?);
        }
        basis = next;
        logs = basis.iter().map(|b| log_vector_f64(&be, b, r)).collect();
    }
    // Size-reduce the log basis.
    let (_, t) = lll_f64(&logs);
    let mut out = Vec::with_capacity(r);
    for row in &t {
        let mut x = unit_product(o, &basis, row)?;
        canonical_sign(&mut x.coords);
        out.push(x);
    }
    Ok(out)
}

fn rank_f64(rows: &[Vec<f64>]) -> usize {
    let mut a = rows.to_vec();
    let m = a.first().map_or(0, |r| r.len());
    let scale = a.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs())).max(1e-300);
    let mut rank = 0;
    for c in 0..m {
        let Some(p) = (rank..a.len()).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap()) else {
            break;
        };
        if a[p][c].abs() < 1e-9 * scale {
            continue;
        }
        a.swap(rank, p);
        for i in rank + 1..a.len() {
            let f = a[i][c] / a[rank][c];
            for j in c..m {
                a[i][j] -= f * a[rank][j];
            }
        }
        rank += 1;
    }
    rank
}

/// Coordinates `q` with `v = Σ q_i rows_i`.
fn solve_f64(rows: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let r = rows.len();
    // Solve Aᵀ q = v with A having `rows` as rows.
    let mut a: Vec<Vec<f64>> = (0..r).map(|i| (0..r).map(|j| rows[j][i]).chain([v[i]]).collect()).collect();
    for c in 0..r {
        let p = (c..r).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap()).unwrap();
        a.swap(c, p);
        for i in 0..r {
            if i != c {
                let f = a[i][c] / a[c][c];
                for j in c..=r {
                    a[i][j] -= f * a[c][j];
                }
            }
        }
    }
    (0..r).map(|i| a[i][r] / a[i][i]).collect()
}

/// Smallest `d ≤ max_den` with `d·q` integral to 1e-6.
fn rationalize(q: &[f64], max_den: i64) -> Option<(i64, Vec<i64>)> {
    (1..=max_den).find_map(|d| {
        let v: Vec<f64> = q.iter().map(|x| x * d as f64).collect();
        v.iter().all(|x| (x - x.round()).abs() < 1e-6).then(|| (d, v.iter().map(|x| x.round() as i64).collect()))
    })
}

// ---------------------------------------------------------------------------
// Power-residue sieve

/// Ring homomorphisms `O → F_q` given by roots of `f` mod `q`.
fn residue_maps(o: &SubOrder, q: u64) -> Vec<Vec<u64>> {
    if (o.den() % q).is_zero() {
        return vec![];
    }
    let f: Vec<u64> = o.poly().coeffs().iter().map(|c| bigint_mod(c, q)).collect();
    let dinv = mod_inv(bigint_mod(o.den(), q), q);
    let n = o.degree();
    fpoly::roots(&f, q)
        .into_iter()
        .map(|r| {
            (0..n)
                .map(|j| {
                    let col: Vec<u64> = o.basis_num().column(j).iter().map(|c| bigint_mod(c, q)).collect();
                    mulmod(fpoly::eval(&col, r, q), dinv, q)
                })
                .collect()
        })
        .collect()
}

fn reduce(x: &OrderElement, map: &[u64], q: u64) -> u64 {
    x.coords.iter().zip(map).fold(0, |acc, (c, &w)| (acc + mulmod(bigint_mod(c, q), w, q)) % q)
}

/// Classes in `⟨±1, gens⟩ / k-th powers` that survive every character
/// `x ↦ x^{(q-1)/k}` tried, as exponent vectors over F_k (first entry: `-1`,
/// only for `k = 2`). An empty result proves that no nontrivial product is a
/// `k`-th power in `O`.
pub fn kth_power_candidates(o: &SubOrder, gens: &[OrderElement], k: u64, max_chars: usize) -> Vec<Vec<u64>> {
    let with_sign = k == 2;
    let cols = gens.len() + usize::from(with_sign);
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut kernel = kernel_mod_p(&[], cols, k);
    let mut stale = 0;
    let mut q = k + 1;
    let mut tried = 0;
    while !kernel.is_empty() && stale < max_chars && tried < 20 * max_chars {
        if !is_probable_prime(&BigInt::from(q)) {
            q += k;
            continue;
        }
        tried += 1;
        // A primitive k-th root of unity mod q.
        let e = (q - 1) / k;
        let zeta = (2..q).map(|g| powmod(g, e, q)).find(|&z| z != 1).unwrap_or(1);
        let dlog = |z: u64| -> Option<u64> {
            let mut acc = 1;
            for j in 0..k {
                if acc == z {
                    return Some(j);
                }
                acc = mulmod(acc, zeta, q);
            }
            None
        };
        for map in residue_maps(o, q) {
            let mut row = Vec::with_capacity(cols);
            if with_sign {
                row.push(dlog(powmod(q - 1, e, q)).unwrap_or(0));
            }
            let mut ok = true;
            for g in gens {
                let v = reduce(g, &map, q);
                match dlog(powmod(v, e, q)) {
                    Some(l) if v != 0 => row.push(l),
                    _ => ok = false,
                }
            }
            if !ok {
                continue;
            }
            rows.push(row);
            let next = kernel_mod_p(&rows, cols, k);
            if next.len() < kernel.len() {
                stale = 0;
            } else {
                stale += 1;
            }
            kernel = next;
        }
        q += k;
    }
    kernel
}

/// A `k`-th root of `u` in `O` found numerically and verified exactly.
pub fn kth_root(o: &SubOrder, u: &OrderElement, k: u64, emb: &EmbeddingSet) -> Option<OrderElement> {
    let be = o.basis_embeddings_f64(emb);
    let n = o.degree();
    let c: Vec<f64> = u.coords.iter().map(|c| c.to_f64().unwrap()).collect();
    let re = be.real_of(&c);
    let cx = be.complex_of(&c);
    let kf = k as f64;
    let mut real_choices: Vec<Vec<f64>> = vec![vec![]];
    for &y in &re {
        let opts: Vec<f64> = if k % 2 == 1 {
            vec![y.signum() * y.abs().powf(1.0 / kf)]
        } else if y > 0.0 {
            let r = y.powf(1.0 / kf);
            vec![r, -r]
        } else {
            return None;
        };
        real_choices = real_choices
            .into_iter()
            .flat_map(|p| opts.iter().map(move |&o| [p.clone(), vec![o]].concat()))
            .collect();
    }
    let mut cx_choices: Vec<Vec<Complex64>> = vec![vec![]];
    for z in &cx {
        let (r, th) = z.to_polar();
        let opts: Vec<Complex64> = (0..k)
            .map(|j| Complex64::from_polar(r.powf(1.0 / kf), (th + 2.0 * std::f64::consts::PI * j as f64) / kf))
            .collect();
        cx_choices = cx_choices
            .into_iter()
            .flat_map(|p| opts.iter().map(move |&o| [p.clone(), vec![o]].concat()))
            .collect();
    }
    // Rows of the real Minkowski system.
    let mut rows: Vec<Vec<f64>> = be.real.clone();
    for row in &be.complex {
        rows.push(row.iter().map(|z| z.re).collect());
        rows.push(row.iter().map(|z| z.im).collect());
    }
    for rc in &real_choices {
        if rc.first().is_some_and(|&x| x < 0.0) && k.is_multiple_of(2) {
            continue;
        }
        for cc in &cx_choices {
            let mut rhs = rc.clone();
            for z in cc {
                rhs.push(z.re);
                rhs.push(z.im);
            }
            let mut a: Vec<Vec<f64>> = rows.iter().zip(&rhs).map(|(r, &b)| [r.clone(), vec![b]].concat()).collect();
            let x = gauss(&mut a, n)?;
            if x.iter().any(|v| (v - v.round()).abs() > 1e-3) {
                continue;
            }
            let cand = OrderElement::new(x.iter().map(|v| BigInt::from(v.round() as i64)).collect());
            if let Ok(p) = o.pow(&cand, k as i64) {
                if &p == u {
                    return Some(cand);
                }
            }
        }
    }
    None
}

fn gauss(a: &mut [Vec<f64>], n: usize) -> Option<Vec<f64>> {
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())?;
        if a[p][c] == 0.0 {
            return None;
        }
        a.swap(c, p);
        for i in 0..n {
            if i != c {
                let f = a[i][c] / a[c][c];
                for j in c..=n {
                    a[i][j] -= f * a[c][j];
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

// ---------------------------------------------------------------------------
// Certification

/// Regulator, index bound and positive generators for an independent system.
pub fn certify_units(o: &SubOrder, candidates: &[OrderElement], floor: Option<f64>, precision: usize) -> Result<UnitGroupData> {
    let emb = o.embeddings(precision)?;
    let sig = Signature { s: emb.s(), t: emb.t() };
    let r = sig.s + sig.t - 1;
    let mut gens = basis_from_units(o, candidates, &emb)?;
    let mut reg = regulator(o, &gens, &emb)?;
    let mut bound = match floor {
        Some(fl) if r <= 3 => (reg.hi_f64() / fl).floor().max(1.0) as u64,
        _ => 0,
    };
    if bound > 1 && bound <= 200_000 {
        let mut k_primes = primes_up_to(bound);
        let mut i = 0;
        while i < k_primes.len() {
            let k = k_primes[i];
            let ker = kth_power_candidates(o, &gens, k, 24);
            if ker.is_empty() {
                i += 1;
                continue;
            }
            // Try to extract a root for each surviving class.
            let mut extended = None;
            for v in &ker {
                let (sign, exps): (bool, Vec<i64>) = if k == 2 {
                    (v[0] == 1, v[1..].iter().map(|&x| x as i64).collect())
                } else {
                    (false, v.iter().map(|&x| x as i64).collect())
                };
                let mut u = unit_product(o, &gens, &exps)?;
                if sign {
                    u = u.neg();
                }
                if let Some(x) = kth_root(o, &u, k, &emb) {
                    extended = Some(x);
                    break;
                }
            }
            match extended {
                Some(x) => {
                    let mut all = gens.clone();
                    all.push(x);
                    gens = basis_from_units(o, &all, &emb)?;
                    reg = regulator(o, &gens, &emb)?;
                    let nb = (reg.hi_f64() / floor.unwrap()).floor().max(1.0) as u64;
                    k_primes = primes_up_to(nb);
                    bound = nb;
                    i = 0;
                }
                None => break,
            }
        }
        if i >= k_primes.len() {
            bound = 1;
        }
    }
    let (tp, sign_index) = totally_positive_generators(o, &gens, &emb)?;
    Ok(UnitGroupData {
        generators: gens,
        regulator: reg,
        certified_index_bound: bound,
        totally_positive_generators: tp,
        sign_index,
        torsion_sign_present: true,
        regulator_floor: floor,
        signature: sig,
    })
}

/// Unit group of `o` with the default search strategy.
pub fn unit_group(o: &SubOrder, cfg: &UnitConfig) -> Result<UnitGroupData> {
    let sig = o.signature();
    let r = sig.s + sig.t - 1;
    let floor = friedman_floor(sig, &o.disc().abs());
    if r == 0 {
        return Err(Error::Degenerate("unit rank 0".into()));
    }
    if sig.s == 1 && sig.t == 1 {
        let eps = relative_minima_unit(o, 1_000_000)?;
        return certify_units(o, &[eps], floor, cfg.precision);
    }
    let emb = o.embeddings(cfg.precision)?;
    let transform = o.reduced_basis_transform(&emb);
    let n = o.degree();
    let mut b = cfg.coord_bound.unwrap_or(if n == 3 { 12 } else if n <= 5 { 6 } else { 2 });
    let mut units = Vec::new();
    for attempt in 0..=cfg.escalations {
        units = find_units_in(o, &transform, b, cfg.exec)?;
        if n <= 5 {
            let cb = if n <= 4 { b.min(5) } else { b.min(3) };
            units.extend(collision_units(o, &transform, cb, 40)?);
        }
        let be = o.basis_embeddings_f64(&emb);
        let logs: Vec<Vec<f64>> = units.iter().map(|u| log_vector_f64(&be, u, r)).collect();
        if rank_f64(&logs) == r || attempt == cfg.escalations {
            break;
        }
        b *= 2;
    }
    certify_units(o, &units, floor, cfg.precision)
}

// ---------------------------------------------------------------------------
// Signs

/// Certified sign of every real embedding; refines precision when undecided.
pub fn real_signs(o: &SubOrder, x: &OrderElement, emb: &EmbeddingSet) -> Result<Vec<i32>> {
    let mut e = emb.clone();
    for _ in 0..6 {
        let signs: Vec<i32> = o.embed_real(x, &e).iter().map(|v| v.sign()).collect();
        if signs.iter().all(|&s| s != 0) {
            return Ok(signs);
        }
        e = e.refine(e.precision * 2)?;
    }
    Err(Error::PrecisionExhausted(e.precision))
}

/// Generators of `O^{×,+}` (kernel of the sign map) and `[O^×/±1 : O^{×,+}]`.
pub fn totally_positive_generators(o: &SubOrder, gens: &[OrderElement], emb: &EmbeddingSet) -> Result<(Vec<OrderElement>, u64)> {
    let s = emb.s();
    let r = gens.len();
    let mut cols: Vec<Vec<u64>> = vec![vec![1; s]];
    for g in gens {
        cols.push(real_signs(o, g, emb)?.iter().map(|&v| u64::from(v < 0)).collect());
    }
    let rows: Vec<Vec<u64>> = (0..s).map(|j| cols.iter().map(|c| c[j]).collect()).collect();
    let ker = kernel_mod_p(&rows, r + 1, 2);
    let mut lat: Vec<Vec<BigInt>> = ker.iter().map(|v| v[1..].iter().map(|&x| BigInt::from(x)).collect()).collect();
    for i in 0..r {
        let mut e = vec![BigInt::zero(); r];
        e[i] = BigInt::from(2);
        lat.push(e);
    }
    let h = IntMatrix::from_columns(&lat, r).hnf();
    let index: BigInt = (0..r).map(|i| h.get(i, i).clone()).product();
    let mut out = Vec::with_capacity(r);
    for j in 0..r {
        let e: Vec<i64> = h.column(j).iter().map(|x| x.to_i64().unwrap()).collect();
        let mut u = unit_product(o, gens, &e)?;
        let sg = real_signs(o, &u, emb)?;
        if sg[0] < 0 {
            u = u.neg();
        }
        debug_assert!(real_signs(o, &u, emb)?.iter().all(|&v| v > 0));
        out.push(u);
    }
    Ok((out, index.to_u64().unwrap()))
}

/// Exponent `a` with `x = ±ε^a` for a rank-one unit group.
pub fn rank_one_exponent(o: &SubOrder, eps: &OrderElement, x: &OrderElement, emb: &EmbeddingSet) -> Option<i64> {
    let be = o.basis_embeddings_f64(emb);
    let lx = log_vector_f64(&be, x, 1)[0];
    let le = log_vector_f64(&be, eps, 1)[0];
    let a = (lx / le).round() as i64;
    let p = o.pow(eps, a).ok()?;
    (p == *x || p.neg() == *x).then_some(a)
}

// ---------------------------------------------------------------------------
// J(U) and O/J(U)

/// A full-rank ideal of an order, by a column HNF basis in order coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealHNF {
    pub basis: IntMatrix,
    pub norm: BigInt,
}

impl IdealHNF {
    pub fn from_generators(cols: &IntMatrix) -> Result<Self> {
        let h = cols.hnf();
        if h.cols() != cols.rows() {
            return Err(Error::Degenerate("ideal is not of full rank".into()));
        }
        let norm: BigInt = (0..h.cols()).map(|i| h.get(i, i).clone()).product::<BigInt>().abs();
        Ok(IdealHNF { basis: h, norm })
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.basis.solve_upper_integral(v).is_some()
    }

    /// Closed under multiplication by every basis element of `o`.
    pub fn is_o_module(&self, o: &SubOrder) -> bool {
        o.structure().iter().all(|m| (0..self.basis.cols()).all(|j| self.contains(&m.mul_vec(&self.basis.column(j)))))
    }

    pub fn sum(&self, other: &IdealHNF) -> Result<IdealHNF> {
        IdealHNF::from_generators(&IntMatrix::hstack(&[self.basis.clone(), other.basis.clone()]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianGroupInvariants {
    pub free_rank: usize,
    /// `d_1 | d_2 | …`, all `> 1`.
    pub factors: Vec<BigInt>,
    pub order_of_torsion: BigInt,
}

impl AbelianGroupInvariants {
    /// Cokernel of an integer matrix.
    pub fn cokernel(m: &IntMatrix) -> Self {
        let (factors, defect) = m.snf();
        let factors: Vec<BigInt> = factors.into_iter().filter(|d| !d.is_one()).collect();
        let order = factors.iter().product();
        AbelianGroupInvariants { free_rank: defect, factors, order_of_torsion: order }
    }

    pub fn factor_strings(&self) -> Vec<String> {
        self.factors.iter().map(|d| d.to_string()).collect()
    }
}

/// Columns of all `I - M_ε`.
pub fn stacked_relations(o: &SubOrder, gens: &[OrderElement]) -> IntMatrix {
    let n = o.degree();
    let id = IntMatrix::identity(n);
    let blocks: Vec<IntMatrix> = gens.iter().map(|g| id.sub(&o.mult_matrix(g))).collect();
    IntMatrix::hstack(&blocks)
}

/// `J(U)`: the ideal generated by all `1 - ε`.
pub fn j_ideal(o: &SubOrder, gens: &[OrderElement]) -> Result<IdealHNF> {
    if gens.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    for g in gens {
        if !o.is_unit(g) {
            return Err(Error::NotAUnit);
        }
    }
    IdealHNF::from_generators(&stacked_relations(o, gens))
}

/// `O / J(U)` as an abelian group.
pub fn torsion_group(o: &SubOrder, gens: &[OrderElement]) -> Result<AbelianGroupInvariants> {
    j_ideal(o, gens)?;
    Ok(AbelianGroupInvariants::cokernel(&stacked_relations(o, gens)))
}

/// Decimal rendering `p1^e1 · p2^e2 · …` of a positive integer.
pub fn factor_string(n: &BigInt) -> String {
    crate::factor::trial_factor(n, crate::factor::DEFAULT_TRIAL_BOUND).display()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::MonogenicOrder;
    use crate::poly::IntPolynomial;

    fn order(s: &str) -> SubOrder {
        MonogenicOrder::build(&s.parse::<IntPolynomial>().unwrap()).unwrap().maximalize()
    }

    #[test]
    fn search_finds_generator() {
        let o = order("T^3 + T^2 - 1");
        let u = find_units(&o, 2).unwrap();
        assert!(u.contains(&o.generator()));
        assert!(find_units(&o, 1).unwrap().contains(&o.one()));
    }

    #[test]
    fn disc_23_regulator() {
        let o = order("T^3 - T + 1");
        let ud = unit_group(&o, &UnitConfig::default()).unwrap();
        assert!(ud.is_certified());
        assert!((ud.regulator.mid_f64() - 0.28119957432).abs() < 1e-10);
        assert_eq!(ud.sign_index, 1);
    }

    #[test]
    fn chain_agrees_with_search() {
        for f in ["T^3 - T + 3", "T^3 - 2*T - 2", "T^3 + T + 3"] {
            let o = order(f);
            let eps = relative_minima_unit(&o, 10_000).unwrap();
            let emb = o.embeddings(192).unwrap();
            let found = find_units(&o, 6).unwrap();
            let b = basis_from_units(&o, &found, &emb).unwrap();
            let r1 = regulator(&o, &[eps], &emb).unwrap();
            let r2 = regulator(&o, &b, &emb).unwrap();
            assert!(r1.overlaps(&r2), "{f}: {r1} vs {r2}");
        }
    }

    #[test]
    fn squared_unit_is_refined() {
        let o = order("T^3 - T + 1");
        let t = o.generator();
        let t2 = o.mul(&t, &t);
        let ud = certify_units(&o, &[t2], Some(0.28), 192).unwrap();
        assert_eq!(ud.certified_index_bound, 1);
        assert!((ud.regulator.mid_f64() - 0.28119957432).abs() < 1e-10);
    }

    #[test]
    fn j_ideal_examples() {
        let o = order("T^3 + T^2 - 1");
        let j = j_ideal(&o, &[o.generator()]).unwrap();
        assert!(j.norm.is_one());
        let o = order("T^3 - T + 5");
        let ud = unit_group(&o, &UnitConfig::default()).unwrap();
        let eps = &ud.totally_positive_generators[0];
        let j = j_ideal(&o, &ud.totally_positive_generators).unwrap();
        assert_eq!(j.norm, BigInt::from(5));
        assert!(j.is_o_module(&o));
        // The negative generator -ε gives the other sign.
        assert_eq!(j_ideal(&o, &[eps.neg()]).unwrap().norm, BigInt::from(19));
        assert_eq!(j_ideal(&o, &[]).unwrap_err(), Error::EmptyGenerators);
    }

    #[test]
    fn torsion_examples() {
        let o = order("T^3 - 2*T - 7");
        let ud = unit_group(&o, &UnitConfig::default()).unwrap();
        let g = torsion_group(&o, &ud.totally_positive_generators).unwrap();
        assert_eq!(g.order_of_torsion, BigInt::from(1526));
        assert_eq!(g.free_rank, 0);
        let o = order("T^3 - T + 1");
        let ud = unit_group(&o, &UnitConfig::default()).unwrap();
        assert!(torsion_group(&o, &ud.totally_positive_generators).unwrap().factors.is_empty());
    }

    #[test]
    fn negative_generator_flipped() {
        let o = order("T^3 + T + 1");
        let ud = unit_group(&o, &UnitConfig::default()).unwrap();
        let s = o.generator();
        let tp = &ud.totally_positive_generators[0];
        assert!(*tp == s.neg() || *tp == o.unit_inverse(&s).unwrap().neg());
    }

    #[test]
    fn quartic_units() {
        let o = order("T^4 - T - 1");
        let ud = unit_group(&o, &UnitConfig::default()).unwrap();
        assert_eq!(ud.generators.len(), 2);
        assert!(ud.is_certified(), "bound {}", ud.certified_index_bound);
    }
}
