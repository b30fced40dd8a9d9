//! Whole-field reports and minimal-volume scans.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{
    mc_volume, ot_volume, torsion_upper_bound, torsion_upper_bound_sharp, volume_determinant_path,
    FundamentalDomainData,
};
use crate::interval::BigFloatInterval;
use crate::order::{is_irreducible, signature, MonogenicOrder, Signature, SubOrder};
use crate::poly::IntPolynomial;
use crate::topology::{h1, presentation_from_field};
use crate::units::{factor_string, j_ideal, torsion_group, unit_group, AbelianGroupInvariants, UnitConfig, UnitGroupData};

#[derive(Clone, Debug)]
pub struct ReportConfig {
    pub units: UnitConfig,
    /// Monte Carlo samples; `0` skips the Monte Carlo volume.
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig { units: UnitConfig::default(), mc_samples: 0, seed: 42 }
    }
}

/// Everything computed for `X(K; O_K^{×,+})`.
#[derive(Clone, Debug)]
pub struct FieldReport {
    pub poly: IntPolynomial,
    pub poly_disc: BigInt,
    pub order: SubOrder,
    pub signature: Signature,
    pub units: UnitGroupData,
    /// `N(J(O^{×,+}))`.
    pub j_norm: BigInt,
    pub torsion: AbelianGroupInvariants,
    pub h1: String,
    /// `(s+1)/2^{2s+s²}·√|Δ|·R_K`, present when `t = 1`.
    pub volume: Option<BigFloatInterval>,
    /// The same with the regulator of `O^{×,+}`: the measure of the
    /// fundamental domain, which the determinant path and Monte Carlo see.
    pub geometric_volume: Option<BigFloatInterval>,
    pub volume_det: Option<BigFloatInterval>,
    pub volume_mc: Option<(f64, f64)>,
    /// Plain and sharp torsion bounds, `s = t = 1` only.
    pub torsion_bounds: Option<(BigFloatInterval, BigFloatInterval)>,
}

fn interval_json(x: &BigFloatInterval) -> serde_json::Value {
    serde_json::json!({"mid": x.mid_f64(), "rad": x.rad_f64()})
}

impl FieldReport {
    /// `N(J) = #O/J` and the volume paths overlap.
    pub fn is_consistent(&self) -> bool {
        let norm_ok = self.j_norm == self.torsion.order_of_torsion;
        let vol_ok = match (&self.geometric_volume, &self.volume_det) {
            (Some(a), Some(b)) => a.overlaps(b),
            (None, None) => true,
            _ => false,
        };
        let mc_ok = match (&self.geometric_volume, self.volume_mc) {
            (Some(a), Some((m, e))) => (a.mid_f64() - m).abs() <= 4.0 * e + 1e-12,
            _ => true,
        };
        norm_ok && vol_ok && mc_ok
    }

    pub fn to_json(&self) -> serde_json::Value {
        let o = &self.order;
        serde_json::json!({
            "poly": self.poly.to_string(),
            "poly_disc": self.poly_disc.to_string(),
            "disc": o.disc().to_string(),
            "index": o.index().to_string(),
            "signature": [self.signature.s, self.signature.t],
            "units": self.units.to_json(o),
            "J_norm": self.j_norm.to_string(),
            "J_norm_factored": factor_string(&self.j_norm),
            "torsion_factors": self.torsion.factor_strings(),
            "h1": self.h1,
            "volume": self.volume.as_ref().map(interval_json),
            "geometric_volume": self.geometric_volume.as_ref().map(interval_json),
            "volume_determinant_path": self.volume_det.as_ref().map(interval_json),
            "volume_monte_carlo": self.volume_mc.map(|(m, e)| serde_json::json!({"mean": m, "stderr": e})),
            "torsion_bound": self.torsion_bounds.as_ref().map(|b| interval_json(&b.0)),
            "torsion_bound_sharp": self.torsion_bounds.as_ref().map(|b| interval_json(&b.1)),
            "consistent": self.is_consistent(),
        })
    }

    pub fn to_text(&self) -> String {
        let o = &self.order;
        let mut out = format!(
            "field     {}\nsignature ({}, {})\ndisc      {}  (index {})\nregulator {}{}\nunits+    {}\nJ norm    {} = {}\nH1        {}\n",
            self.poly,
            self.signature.s,
            self.signature.t,
            o.disc(),
            o.index(),
            self.units.regulator,
            if self.units.is_certified() { "" } else { "  (uncertified)" },
            self.units.totally_positive_generators.iter().map(|g| o.display_element(g)).collect::<Vec<_>>().join(", "),
            self.j_norm,
            factor_string(&self.j_norm),
            self.h1,
        );
        if let Some(v) = &self.volume {
            out += &format!("volume    {:.10}\n", v.mid_f64());
        }
        if let Some(v) = self.geometric_volume.as_ref().filter(|_| self.units.sign_index > 1) {
            out += &format!("vol (U+)  {:.10}  (sign index {})\n", v.mid_f64(), self.units.sign_index);
        }
        if let Some((m, e)) = self.volume_mc {
            out += &format!("mc volume {m:.6} ± {e:.6}\n");
        }
        if let Some((b, sb)) = &self.torsion_bounds {
            out += &format!("tors bnd  {:.4} (sharp {:.4})\n", b.mid_f64(), sb.mid_f64());
        }
        out
    }
}

/// Validates `f` and returns its maximal order.
pub fn maximal_order(f: &IntPolynomial) -> Result<SubOrder> {
    if f.degree() < 2 {
        return Err(Error::DegreeTooSmall(f.degree()));
    }
    if !is_irreducible(f) {
        return Err(Error::Reducible { factor: crate::order::find_factor(f)?.map(|g| g.to_string()) });
    }
    Ok(MonogenicOrder::build(f)?.maximalize())
}

/// Full report for the field `Q[T]/(f)` with `U = O_K^{×,+}`.
pub fn field_report(f: &IntPolynomial, cfg: &ReportConfig) -> Result<FieldReport> {
    let o = maximal_order(f)?;
    report_for_order(f, o, cfg)
}

pub fn report_for_order(f: &IntPolynomial, o: SubOrder, cfg: &ReportConfig) -> Result<FieldReport> {
    let sig = o.signature();
    let units = unit_group(&o, &cfg.units)?;
    let tp = &units.totally_positive_generators;
    let j = j_ideal(&o, tp)?;
    let torsion = torsion_group(&o, tp)?;
    let pres = presentation_from_field(&o, tp)?;
    let h = h1(&pres).display();
    let (mut volume, mut geometric_volume, mut volume_det, mut volume_mc, mut torsion_bounds) =
        (None, None, None, None, None);
    if sig.t == 1 {
        let disc_abs = o.disc().abs();
        let v = ot_volume(sig.s, &disc_abs, &units.regulator)?.value;
        geometric_volume = Some(ot_volume(sig.s, &disc_abs, &units.positive_regulator())?.value);
        volume_det = Some(volume_determinant_path(&o, tp, cfg.units.precision)?.value);
        if cfg.mc_samples > 0 {
            let d = FundamentalDomainData::new(&o, tp, cfg.units.precision)?;
            let r = mc_volume(&d, cfg.mc_samples, cfg.seed, cfg.units.exec)?;
            volume_mc = Some((r.value.mid_f64(), r.stderr.unwrap_or(0.0)));
        }
        if sig.s == 1 {
            torsion_bounds = Some((torsion_upper_bound(&v, &disc_abs), torsion_upper_bound_sharp(&v, &disc_abs)));
        }
        volume = Some(v);
    }
    Ok(FieldReport {
        poly: f.clone(),
        poly_disc: o.disc_f().clone(),
        signature: sig,
        units,
        j_norm: j.norm.clone(),
        torsion,
        h1: h,
        volume,
        geometric_volume,
        volume_det,
        volume_mc,
        torsion_bounds,
        order: o,
    })
}

// ---------------------------------------------------------------------------
// Scans

#[derive(Clone, Debug, Serialize)]
pub struct ScanRecord {
    pub poly: String,
    pub disc: String,
    pub index: String,
    pub regulator: f64,
    pub certified: bool,
    pub volume: f64,
    pub sign_index: u64,
    /// `;`-separated invariant factors of `H₁` torsion.
    pub torsion_factors: String,
    #[serde(skip)]
    pub regulator_interval: BigFloatInterval,
    #[serde(skip)]
    pub disc_int: BigInt,
}

/// Monic polynomials of degree `n` with lower coefficients in `[-b, b]`, in
/// lexicographic order of `(a_0, …, a_{n-1})`.
pub fn enumerate_monic(n: usize, b: i64) -> Vec<IntPolynomial> {
    let width = (2 * b + 1) as u64;
    let total = width.pow(n as u32);
    (0..total)
        .map(|mut k| {
            let mut c = Vec::with_capacity(n + 1);
            for _ in 0..n {
                c.push((k % width) as i64 - b);
                k /= width;
            }
            c.reverse();
            c.push(1);
            IntPolynomial::from_i64s(&c)
        })
        .collect()
}

fn size(f: &IntPolynomial) -> (BigInt, Vec<BigInt>) {
    let l1: BigInt = f.coeffs().iter().map(|c| c.abs()).sum();
    (l1, f.coeffs().iter().rev().cloned().collect())
}

fn scan_one(f: &IntPolynomial, s: usize, disc_bound: &BigInt, cfg: &UnitConfig) -> Option<ScanRecord> {
    let n = s + 2;
    if f.coeff(0).is_zero() {
        return None;
    }
    let pd = f.discriminant().ok()?;
    if pd.is_zero() || signature(f) != (Signature { s, t: 1 }) || !is_irreducible(f) {
        return None;
    }
    let o = MonogenicOrder::build(f).ok()?.maximalize();
    debug_assert_eq!(o.degree(), n);
    if o.disc().abs() > *disc_bound {
        return None;
    }
    let rec = match unit_group(&o, cfg) {
        Ok(u) => {
            let reg = u.regulator.clone();
            let vol = ot_volume(s, &o.disc().abs(), &reg).ok()?.value;
            let tors = torsion_group(&o, &u.totally_positive_generators).ok()?;
            ScanRecord {
                poly: f.to_string(),
                disc: o.disc().to_string(),
                index: o.index().to_string(),
                regulator: reg.mid_f64(),
                certified: u.is_certified(),
                volume: vol.mid_f64(),
                sign_index: u.sign_index,
                torsion_factors: tors.factor_strings().join(";"),
                regulator_interval: reg,
                disc_int: o.disc().clone(),
            }
        }
        Err(_) => ScanRecord {
            poly: f.to_string(),
            disc: o.disc().to_string(),
            index: o.index().to_string(),
            regulator: f64::NAN,
            certified: false,
            volume: f64::NAN,
            sign_index: 0,
            torsion_factors: String::new(),
            regulator_interval: BigFloatInterval::from_i64(0, 64),
            disc_int: o.disc().clone(),
        },
    };
    Some(rec)
}

/// Fields of signature `(s, 1)` with `|Δ_K| ≤ disc_bound` generated by a
/// monic polynomial with lower coefficients in `[-coeff_bound, coeff_bound]`,
/// one record per field, certified records ascending by volume followed by
/// uncertified ones.
pub fn min_volume_scan(s: usize, coeff_bound: i64, disc_bound: &BigInt, cfg: &UnitConfig) -> Result<Vec<ScanRecord>> {
    if s == 0 || coeff_bound < 1 {
        return Err(Error::Degenerate("scan needs s >= 1 and a positive coefficient bound".into()));
    }
    let n = s + 2;
    let mut polys = enumerate_monic(n, coeff_bound);
    // Smaller polynomials first so each field is represented by its simplest
    // defining polynomial; the order is fixed before any parallel work.
    polys.sort_by_cached_key(size);
    let inner = UnitConfig { exec: Exec::Sequential, ..cfg.clone() };
    let found: Vec<Option<ScanRecord>> = cfg.exec.map(&polys, |f| scan_one(f, s, disc_bound, &inner));
    let mut records: Vec<ScanRecord> = Vec::new();
    for r in found.into_iter().flatten() {
        let dup = records.iter().any(|q| {
            q.disc_int == r.disc_int
                && (q.regulator_interval.overlaps(&r.regulator_interval) || (!q.certified && !r.certified))
        });
        if !dup {
            records.push(r);
        }
    }
    records.sort_by(|a, b| {
        b.certified.cmp(&a.certified).then(a.volume.partial_cmp(&b.volume).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(records)
}

pub const SCAN_CSV_HEADER: [&str; 7] = ["poly", "disc", "index", "regulator", "certified", "volume", "torsion_factors"];

impl ScanRecord {
    pub fn csv_fields(&self) -> [String; 7] {
        [
            self.poly.clone(),
            self.disc.clone(),
            self.index.clone(),
            format!("{:.12}", self.regulator),
            self.certified.to_string(),
            format!("{:.8}", self.volume),
            self.torsion_factors.clone(),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_is_complete() {
        let v = enumerate_monic(3, 1);
        assert_eq!(v.len(), 27);
        assert_eq!(v[0].to_string(), IntPolynomial::from_i64s(&[-1, -1, -1, 1]).to_string());
    }

    #[test]
    fn report_disc_23() {
        let f: IntPolynomial = "T^3 + T^2 - 1".parse().unwrap();
        let cfg = ReportConfig { mc_samples: 20_000, ..Default::default() };
        let r = field_report(&f, &cfg).unwrap();
        assert_eq!(r.j_norm, BigInt::from(1));
        assert_eq!(r.h1, "Z");
        assert!((r.volume.as_ref().unwrap().mid_f64() - 0.337146).abs() < 1e-6);
        assert!(r.is_consistent());
    }

    #[test]
    fn reducible_is_rejected() {
        let f: IntPolynomial = "T^3 - T + 6".parse().unwrap();
        assert!(matches!(field_report(&f, &ReportConfig::default()), Err(Error::Reducible { .. })));
    }

    #[test]
    fn small_cubic_scan() {
        let r = min_volume_scan(1, 2, &BigInt::from(60), &UnitConfig::default()).unwrap();
        assert_eq!(r[0].disc, "-23");
        assert!((r[0].volume - 0.337146).abs() < 1e-6);
        // -23, -31, -44, -59
        assert_eq!(r.len(), 4);
    }
}
