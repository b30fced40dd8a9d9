//! Fundamental groups `O ⋊ U` of OT manifolds as integer data: the
//! semidirect product law, `H₁` from the action matrices, the commutator
//! lattice by sampling, and recovery of the field from the action.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{BigFloatInterval, ComplexInterval};
use crate::linalg::{min_poly, unimodular_inverse};
use crate::matrix::IntMatrix;
use crate::order::{is_irreducible, signature, OrderElement, Signature, SubOrder};
use crate::poly::IntPolynomial;
use crate::units::AbelianGroupInvariants;

/// `Z^n ⋊ Z^k` with `Z^k` acting through commuting unimodular matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    pub lattice_rank: usize,
    pub action_matrices: Vec<IntMatrix>,
    inverses: Vec<IntMatrix>,
}

impl GroupPresentation {
    pub fn new(action_matrices: Vec<IntMatrix>) -> Result<Self> {
        let n = action_matrices.first().ok_or(Error::EmptyGenerators)?.rows();
        let mut inverses = Vec::with_capacity(action_matrices.len());
        for m in &action_matrices {
            if m.rows() != n || m.cols() != n {
                return Err(Error::Dimension(format!("action matrices must be {n}x{n}")));
            }
            inverses.push(unimodular_inverse(m).ok_or_else(|| Error::Malformed("action matrix has |det| != 1".into()))?);
        }
        for (i, a) in action_matrices.iter().enumerate() {
            for b in &action_matrices[i + 1..] {
                if a.mul(b) != b.mul(a) {
                    return Err(Error::Malformed("action matrices do not commute".into()));
                }
            }
        }
        Ok(GroupPresentation { lattice_rank: n, action_matrices, inverses })
    }

    pub fn generators(&self) -> usize {
        self.action_matrices.len()
    }

    /// `∏ M_i^{v_i}`.
    pub fn action(&self, v: &[i64]) -> IntMatrix {
        let mut acc = IntMatrix::identity(self.lattice_rank);
        for (i, &e) in v.iter().enumerate() {
            let base = if e >= 0 { &self.action_matrices[i] } else { &self.inverses[i] };
            acc = acc.mul(&base.pow(e.unsigned_abs()));
        }
        acc
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.lattice_rank,
            "matrices": self.action_matrices.iter()
                .map(|m| m.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let mats = v
            .get("matrices")
            .and_then(|m| m.as_array())
            .ok_or_else(|| Error::Malformed("missing `matrices`".into()))?;
        let mats: Vec<IntMatrix> = mats.iter().map(crate::matrix::matrix_from_json).collect::<Result<_>>()?;
        let p = GroupPresentation::new(mats)?;
        if let Some(n) = v.get("n").and_then(|n| n.as_u64()) {
            if n as usize != p.lattice_rank {
                return Err(Error::Dimension(format!("`n` is {n} but matrices are {}x{}", p.lattice_rank, p.lattice_rank)));
            }
        }
        Ok(p)
    }
}

/// Presentation of `O ⋊ ⟨gens⟩` with `O` acting on itself by multiplication.
pub fn presentation_from_field(o: &SubOrder, gens: &[OrderElement]) -> Result<GroupPresentation> {
    if gens.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    for g in gens {
        if !o.is_unit(g) {
            return Err(Error::NotAUnit);
        }
    }
    GroupPresentation::new(gens.iter().map(|g| o.mult_matrix(g)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SemidirectElement {
    pub u: Vec<BigInt>,
    pub v: Vec<i64>,
}

impl SemidirectElement {
    pub fn identity(p: &GroupPresentation) -> Self {
        SemidirectElement { u: vec![BigInt::zero(); p.lattice_rank], v: vec![0; p.generators()] }
    }

    pub fn random(p: &GroupPresentation, rng: &mut impl Rng, ub: i64, vb: i64) -> Self {
        SemidirectElement {
            u: (0..p.lattice_rank).map(|_| BigInt::from(rng.gen_range(-ub..=ub))).collect(),
            v: (0..p.generators()).map(|_| rng.gen_range(-vb..=vb)).collect(),
        }
    }
}

/// `(u, v)(ũ, ṽ) = (u + v·ũ, v·ṽ)`.
pub fn group_multiply(a: &SemidirectElement, b: &SemidirectElement, p: &GroupPresentation) -> SemidirectElement {
    let moved = p.action(&a.v).mul_vec(&b.u);
    SemidirectElement {
        u: a.u.iter().zip(&moved).map(|(x, y)| x + y).collect(),
        v: a.v.iter().zip(&b.v).map(|(x, y)| x + y).collect(),
    }
}

/// `(u, v)⁻¹ = (-v⁻¹·u, v⁻¹)`.
pub fn group_inverse(a: &SemidirectElement, p: &GroupPresentation) -> SemidirectElement {
    let v: Vec<i64> = a.v.iter().map(|x| -x).collect();
    let u = p.action(&v).mul_vec(&a.u).into_iter().map(|x| -x).collect();
    SemidirectElement { u, v }
}

pub fn commutator(a: &SemidirectElement, b: &SemidirectElement, p: &GroupPresentation) -> SemidirectElement {
    let ab = group_multiply(a, b, p);
    let ai = group_inverse(a, p);
    let bi = group_inverse(b, p);
    group_multiply(&group_multiply(&ab, &ai, p), &bi, p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct H1 {
    pub free_rank: usize,
    pub torsion: AbelianGroupInvariants,
    /// Rank of the coinvariants `Z^n / Σ (I - M_i)`, zero for field data.
    pub lattice_defect: usize,
}

impl H1 {
    pub fn is_degenerate(&self) -> bool {
        self.lattice_defect > 0
    }

    /// `Z^r ⊕ Z/d_1 ⊕ …`.
    pub fn display(&self) -> String {
        let mut parts = Vec::new();
        match self.free_rank + self.lattice_defect {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.factors.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Abelianization: `Z^k ⊕ Z^n / Σ_i (I - M_i) Z^n`.
pub fn h1(p: &GroupPresentation) -> H1 {
    let id = IntMatrix::identity(p.lattice_rank);
    let blocks: Vec<IntMatrix> = p.action_matrices.iter().map(|m| id.sub(m)).collect();
    let coker = AbelianGroupInvariants::cokernel(&IntMatrix::hstack(&blocks));
    H1 { free_rank: p.generators(), lattice_defect: coker.free_rank, torsion: coker }
}

/// A sublattice of `Z^n` in column HNF.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    pub basis: IntMatrix,
}

impl Sublattice {
    pub fn from_vectors(n: usize, vecs: &[Vec<BigInt>]) -> Self {
        if vecs.is_empty() {
            return Sublattice { basis: IntMatrix::zeros(n, 0) };
        }
        Sublattice { basis: IntMatrix::from_columns(vecs, n).hnf() }
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    /// `[Z^n : L]` for full-rank lattices.
    pub fn index(&self) -> Option<BigInt> {
        (self.rank() == self.basis.rows())
            .then(|| (0..self.rank()).map(|i| self.basis.get(i, i).clone()).product::<BigInt>().abs())
    }
}

/// Lattice parts of sampled commutators, closed under the action until
/// stable. The commutator subgroup of `O ⋊ U` is `J(U) ⋊ 1`, so this
/// converges to `J(U)` from below.
pub fn commutator_sample_closure(p: &GroupPresentation, sample_count: usize, seed: u64) -> Sublattice {
    let n = p.lattice_rank;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vecs: Vec<Vec<BigInt>> = Vec::new();
    for _ in 0..sample_count.max(1) {
        let a = SemidirectElement::random(p, &mut rng, 3, 2);
        let b = SemidirectElement::random(p, &mut rng, 3, 2);
        let c = commutator(&a, &b, p);
        debug_assert!(c.v.iter().all(|&x| x == 0));
        if c.u.iter().any(|x| !x.is_zero()) {
            vecs.push(c.u);
        }
    }
    let mut lat = Sublattice::from_vectors(n, &vecs);
    loop {
        let mut cols: Vec<Vec<BigInt>> = (0..lat.rank()).map(|j| lat.basis.column(j)).collect();
        for j in 0..lat.rank() {
            let c = lat.basis.column(j);
            for (m, mi) in p.action_matrices.iter().zip(&p.inverses) {
                cols.push(m.mul_vec(&c));
                cols.push(mi.mul_vec(&c));
            }
        }
        let next = Sublattice::from_vectors(n, &cols);
        if next == lat {
            return lat;
        }
        lat = next;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reconstruction {
    pub poly: IntPolynomial,
    /// Exponents of the word `∏ M_i^{e_i}` whose minimal polynomial this is.
    pub word: Vec<i64>,
    /// Whether `poly` has full degree `n`.
    pub primitive: bool,
}

/// Minimal polynomial of a generic element of the algebra generated by the
/// action, over the generators, their inverses and seeded random words
/// (length ≤ 8, exponents in `[-3, 3]`).
pub fn reconstruct_minpoly(p: &GroupPresentation, trials: usize, seed: u64) -> Reconstruction {
    let k = p.generators();
    let n = p.lattice_rank;
    let mut words: Vec<Vec<i64>> = Vec::new();
    for i in 0..k {
        let mut w = vec![0; k];
        w[i] = 1;
        words.push(w.clone());
        w[i] = -1;
        words.push(w);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials.max(1) {
        let mut w = vec![0i64; k];
        for _ in 0..rng.gen_range(1..=8) {
            w[rng.gen_range(0..k)] += rng.gen_range(-3..=3);
        }
        words.push(w);
    }
    // Among primitive words keep the first of least height: small
    // coefficients keep the discriminant factorable downstream.
    let height = |f: &IntPolynomial| f.coeffs().iter().map(|c| c.abs()).max().unwrap_or_default();
    let mut best: Option<Reconstruction> = None;
    for w in words {
        let mp = min_poly(&p.action(&w));
        let d = mp.degree();
        let better = match &best {
            None => true,
            Some(b) if b.primitive => d == n && height(&mp) < height(&b.poly),
            Some(b) => d == n || b.poly.degree() < d,
        };
        if better {
            best = Some(Reconstruction { primitive: d == n, poly: mp, word: w });
        }
    }
    best.expect("at least one word")
}

/// Degree of the Galois closure of an irreducible cubic: 3 iff the
/// discriminant is a square.
pub fn cubic_galois_closure_degree(f: &IntPolynomial) -> Result<u32> {
    if f.degree() != 3 {
        return Err(Error::NotCubic);
    }
    if !is_irreducible(f) {
        return Err(Error::Reducible { factor: None });
    }
    let d = f.discriminant()?;
    if d.is_negative() {
        return Ok(6);
    }
    let r = d.sqrt();
    Ok(if &r * &r == d { 3 } else { 6 })
}

/// Companion matrix of a monic polynomial: multiplication by `x` on `1, x, …`.
pub fn companion(f: &IntPolynomial) -> IntMatrix {
    let n = f.degree();
    let mut m = IntMatrix::zeros(n, n);
    for i in 1..n {
        m.set(i, i - 1, BigInt::one());
    }
    for i in 0..n {
        m.set(i, n - 1, -f.coeff(i));
    }
    m
}

/// Minimal polynomial of `x + c·y` generating `Q(x, y)` for roots `x` of
/// `f` and `y` of `g`, for the first shift `c ≥ 1` giving a squarefree
/// characteristic polynomial on `Q[x]/f ⊗ Q[y]/g`.
pub fn compositum(f: &IntPolynomial, g: &IntPolynomial) -> Result<(IntPolynomial, Signature, i64)> {
    for h in [f, g] {
        if !h.is_monic() {
            return Err(Error::NotMonic);
        }
        if !is_irreducible(h) {
            return Err(Error::Reducible { factor: Some(h.to_string()) });
        }
    }
    let a = companion(f);
    let b = companion(g);
    let ia = IntMatrix::identity(f.degree());
    let ib = IntMatrix::identity(g.degree());
    for c in 1..=64i64 {
        let m = a.kronecker(&ib).add(&ia.kronecker(&b).scale(&BigInt::from(c)));
        let h = m.char_poly();
        if !h.is_squarefree() {
            continue;
        }
        // Squarefree: the tensor product is étale and `h` describes it; it is a
        // field exactly when `h` is irreducible.
        if !is_irreducible(&h) {
            return Err(Error::Degenerate(format!(
                "compositum has degree below {}: {h} is reducible",
                f.degree() * g.degree()
            )));
        }
        return Ok((h.clone(), signature(&h), c));
    }
    Err(Error::Degenerate("no squarefree primitive element x + c·y with c <= 64".into()))
}

/// `Z[x]/f ⊗ Z[y]/g` with basis `x^a y^b` at index `a·deg g + b`.
#[derive(Clone, Debug)]
pub struct TensorOrder {
    pub f: IntPolynomial,
    pub g: IntPolynomial,
}

impl TensorOrder {
    pub fn new(f: IntPolynomial, g: IntPolynomial) -> Self {
        TensorOrder { f, g }
    }

    pub fn rank(&self) -> usize {
        self.f.degree() * self.g.degree()
    }

    /// Multiplication by `x^a y^b`.
    pub fn monomial_matrix(&self, a: u64, b: u64) -> IntMatrix {
        companion(&self.f).pow(a).kronecker(&companion(&self.g).pow(b))
    }

    /// Discriminant of the trace form on the monomial basis.
    pub fn discriminant(&self) -> BigInt {
        let (m, k) = (self.f.degree(), self.g.degree());
        let basis: Vec<(u64, u64)> = (0..m as u64).flat_map(|a| (0..k as u64).map(move |b| (a, b))).collect();
        let n = basis.len();
        let mut t = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                t.set(i, j, self.monomial_matrix(basis[i].0 + basis[j].0, basis[i].1 + basis[j].1).trace());
            }
        }
        t.det()
    }
}

/// Basis `1, S, S², T, T², ST, S²T, ST², S²T²` of the compositum order in
/// the example with a cubic in `S` and a cubic in `T`, as tensor indices.
pub const EXAMPLE_BASIS: [(u64, u64); 9] = [(0, 0), (1, 0), (2, 0), (0, 1), (0, 2), (1, 1), (2, 1), (1, 2), (2, 2)];

/// Multiplication by `S` on `EXAMPLE_BASIS` for `S³ + S + 1`, transcribed from
/// the table `S·S² = -S - 1`, `S·S²T = (-S - 1)T`, … (column `j` is `S·e_j`).
pub fn example_s_action_from_table() -> IntMatrix {
    // Images as coefficient lists on EXAMPLE_BASIS.
    let images: [[i64; 9]; 9] = [
        [0, 1, 0, 0, 0, 0, 0, 0, 0],   // S·1 = S
        [0, 0, 1, 0, 0, 0, 0, 0, 0],   // S·S = S²
        [-1, -1, 0, 0, 0, 0, 0, 0, 0], // S·S² = -S - 1
        [0, 0, 0, 0, 0, 1, 0, 0, 0],   // S·T = ST
        [0, 0, 0, 0, 0, 0, 0, 1, 0],   // S·T² = ST²
        [0, 0, 0, 0, 0, 0, 1, 0, 0],   // S·ST = S²T
        [0, 0, 0, -1, 0, -1, 0, 0, 0], // S·S²T = -ST - T
        [0, 0, 0, 0, 0, 0, 0, 0, 1],   // S·ST² = S²T²
        [0, 0, 0, 0, -1, 0, 0, -1, 0], // S·S²T² = -ST² - T²
    ];
    let cols: Vec<Vec<BigInt>> = images.iter().map(|c| c.iter().map(|&x| BigInt::from(x)).collect()).collect();
    IntMatrix::from_columns(&cols, 9)
}

/// The same action computed from the tensor structure, expressed on `EXAMPLE_BASIS`.
pub fn example_s_action_from_tensor(t: &TensorOrder) -> IntMatrix {
    let k = t.g.degree() as u64;
    let idx = |(a, b): (u64, u64)| (a * k + b) as usize;
    let m = t.monomial_matrix(1, 0);
    let mut out = IntMatrix::zeros(9, 9);
    for (j, &bj) in EXAMPLE_BASIS.iter().enumerate() {
        for (i, &bi) in EXAMPLE_BASIS.iter().enumerate() {
            out.set(i, j, m.get(idx(bi), idx(bj)).clone());
        }
    }
    out
}

/// Maximum deviation found when comparing the upper-triangular Möbius action
/// with the OT action `z ↦ v·z + u` at the real places.
#[derive(Clone, Debug, Serialize)]
pub struct MobiusReport {
    pub samples: usize,
    pub max_deviation: f64,
    pub homomorphism_exact: bool,
}

/// Checks `(√v, u/√v; 0, 1/√v)·z = v·z + u` at every real place for sampled
/// `u ∈ O`, totally positive `v` and `z ∈ H`, and verifies exactly that the
/// map is a homomorphism through its inverse `(a, b; 0, a⁻¹) ↦ (ab, a²)`.
pub fn mobius_action_check(
    o: &SubOrder,
    positive_gens: &[OrderElement],
    samples: usize,
    precision: usize,
    seed: u64,
) -> Result<MobiusReport> {
    let emb = o.embeddings(precision)?;
    if emb.s() == 0 {
        return Err(Error::Degenerate("no real place".into()));
    }
    let p = presentation_from_field(o, positive_gens)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_dev = 0.0f64;
    let mut exact = true;
    let elem = |e: &SemidirectElement| -> Result<(OrderElement, OrderElement)> {
        let v = crate::units::unit_product(o, positive_gens, &e.v)?;
        Ok((OrderElement::new(e.u.clone()), v))
    };
    for _ in 0..samples {
        let a = SemidirectElement::random(&p, &mut rng, 4, 2);
        let b = SemidirectElement::random(&p, &mut rng, 4, 2);
        let (u, v) = elem(&a)?;
        let (u2, v2) = elem(&b)?;
        let su = o.embed_real(&u, &emb);
        let sv = o.embed_real(&v, &emb);
        for j in 0..emb.s() {
            if !sv[j].is_positive() {
                return Err(Error::Degenerate("generator is not totally positive".into()));
            }
            let z = ComplexInterval::new(
                BigFloatInterval::from_f64(rng.gen_range(-3.0..3.0), precision),
                BigFloatInterval::from_f64(rng.gen_range(0.1..3.0), precision),
            );
            let r = sv[j].sqrt().expect("positive");
            let a11 = ComplexInterval::real(r.clone());
            let a12 = ComplexInterval::real(su[j].div(&r));
            let a22 = ComplexInterval::real(r.recip().expect("nonzero"));
            let num = a11.mul(&z).add(&a12);
            let mobius = num.checked_div(&a22).ok_or(Error::PrecisionExhausted(precision))?;
            let direct = z.scale(&sv[j]).add(&ComplexInterval::real(su[j].clone()));
            let d = mobius.sub(&direct);
            let dev = d.re.abs().hi_f64().max(d.im.abs().hi_f64());
            max_dev = max_dev.max(dev);
        }
        // Exact check in K: with A = a², P = ab, Q = b/a, the product of two
        // such matrices has A'' = A·A', P'' = A·P' + P, Q'' = Q' + Q/A'.
        let q = o.mul(&u, &o.unit_inverse(&v)?);
        let q2 = o.mul(&u2, &o.unit_inverse(&v2)?);
        let a_pp = o.mul(&v, &v2);
        let p_pp = o.add(&o.mul(&v, &u2), &u);
        let q_pp = o.add(&q2, &o.mul(&q, &o.unit_inverse(&v2)?));
        let prod = group_multiply(&a, &b, &p);
        let (pu, pv) = elem(&prod)?;
        exact &= pu == p_pp && pv == a_pp && o.mul(&q_pp, &a_pp) == p_pp;
    }
    Ok(MobiusReport { samples, max_deviation: max_dev, homomorphism_exact: exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::MonogenicOrder;

    fn poly(s: &str) -> IntPolynomial {
        s.parse().unwrap()
    }

    fn power_order(s: &str) -> SubOrder {
        MonogenicOrder::build(&poly(s)).unwrap().power_basis()
    }

    #[test]
    fn h1_of_disc_23() {
        let o = power_order("T^3 + T^2 - 1");
        let p = presentation_from_field(&o, &[o.generator()]).unwrap();
        let h = h1(&p);
        assert_eq!(h.display(), "Z");
        assert_eq!(p.action_matrices[0].det(), BigInt::one());
    }

    #[test]
    fn prescribed_torsion_family() {
        for m in [2, 3, 5, 7, 12] {
            let o = power_order(&format!("T^3 + {m}*T - 1"));
            let p = presentation_from_field(&o, &[o.generator()]).unwrap();
            assert_eq!(h1(&p).display(), format!("Z + Z/{m}"));
        }
    }

    #[test]
    fn identity_action_is_degenerate() {
        let p = GroupPresentation::new(vec![IntMatrix::identity(3)]).unwrap();
        let h = h1(&p);
        assert!(h.is_degenerate());
        assert_eq!(h.lattice_defect, 3);
        assert!(h.torsion.factors.is_empty());
        assert_eq!(presentation_from_field(&power_order("T^3 - T + 1"), &[]).unwrap_err(), Error::EmptyGenerators);
    }

    #[test]
    fn semidirect_law() {
        let o = power_order("T^3 - T + 1");
        let p = presentation_from_field(&o, &[o.generator()]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let a = SemidirectElement::random(&p, &mut rng, 5, 3);
            let b = SemidirectElement::random(&p, &mut rng, 5, 3);
            let id = SemidirectElement::identity(&p);
            assert_eq!(group_multiply(&id, &a, &p), a);
            assert_eq!(group_multiply(&a, &group_inverse(&a, &p), &p), id);
            // [a, b] = ((1 - ṽ)u - (1 - v)ũ, 1)
            let c = commutator(&a, &b, &p);
            let n = p.lattice_rank;
            let i = IntMatrix::identity(n);
            let x = i.sub(&p.action(&b.v)).mul_vec(&a.u);
            let y = i.sub(&p.action(&a.v)).mul_vec(&b.u);
            let expect: Vec<BigInt> = x.iter().zip(&y).map(|(x, y)| x - y).collect();
            assert_eq!(c.u, expect);
            assert!(c.v.iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn closure_reaches_index_four() {
        let o = MonogenicOrder::build(&poly("T^3 - T + 2")).unwrap().maximalize();
        let eps = o.from_poly(&poly("T^2 - T + 1")).unwrap();
        let p = presentation_from_field(&o, &[eps]).unwrap();
        let lat = commutator_sample_closure(&p, 8, 7);
        assert_eq!(lat.index(), Some(BigInt::from(4)));
    }

    #[test]
    fn reconstruct_disc_23() {
        let o = power_order("T^3 + T^2 - 1");
        let p = presentation_from_field(&o, &[o.generator()]).unwrap();
        let r = reconstruct_minpoly(&p, 4, 0);
        assert!(r.primitive);
        assert_eq!(r.poly, poly("x^3 + x^2 - 1"));
        let inv = o.unit_inverse(&o.generator()).unwrap();
        let p = presentation_from_field(&o, &[inv]).unwrap();
        assert_eq!(reconstruct_minpoly(&p, 4, 0).poly, poly("x^3 - x - 1"));
        let p = GroupPresentation::new(vec![IntMatrix::identity(3)]).unwrap();
        let r = reconstruct_minpoly(&p, 4, 0);
        assert!(!r.primitive);
        assert_eq!(r.poly.degree(), 1);
    }

    #[test]
    fn galois_closure_of_cubics() {
        assert_eq!(cubic_galois_closure_degree(&poly("T^3 + T^2 - 1")).unwrap(), 6);
        assert_eq!(cubic_galois_closure_degree(&poly("T^3 - 3*T - 1")).unwrap(), 3);
        assert_eq!(cubic_galois_closure_degree(&poly("T^3 - T + 1")).unwrap(), 6);
        assert_eq!(cubic_galois_closure_degree(&poly("T^2 + 1")).unwrap_err(), Error::NotCubic);
    }

    #[test]
    fn compositum_examples() {
        let f = poly("S^3 + S + 1");
        for g in ["T^3 - T + 2", "T^3 - T + 1"] {
            let (h, sig, _) = compositum(&f, &poly(g)).unwrap();
            assert_eq!(h.degree(), 9);
            assert_eq!(sig, Signature { s: 1, t: 4 });
        }
        assert!(matches!(compositum(&poly("T^2 + 1"), &poly("T^2 + 1")), Err(Error::Degenerate(_))));
    }

    #[test]
    fn example_table_matches_tensor() {
        let table = example_s_action_from_table();
        for g in ["T^3 - T + 2", "T^3 - T + 1"] {
            let t = TensorOrder::new(poly("S^3 + S + 1"), poly(g));
            assert_eq!(example_s_action_from_tensor(&t), table);
        }
        let d2 = TensorOrder::new(poly("S^3 + S + 1"), poly("T^3 - T + 2")).discriminant();
        assert_eq!(d2, BigInt::from(-31i64 * 31 * 31) * BigInt::from(-104i64 * 104 * 104));
    }

    #[test]
    fn mobius_matches_ot_action() {
        let o = MonogenicOrder::build(&poly("T^3 + T^2 - 1")).unwrap().maximalize();
        let r = mobius_action_check(&o, &[o.generator()], 20, 128, 3).unwrap();
        assert!(r.homomorphism_exact);
        assert!(r.max_deviation < 1e-30);
    }

    #[test]
    fn presentation_json_round_trip() {
        let o = power_order("T^3 - T + 1");
        let p = presentation_from_field(&o, &[o.generator()]).unwrap();
        assert_eq!(GroupPresentation::from_json(&p.to_json()).unwrap(), p);
    }
}
