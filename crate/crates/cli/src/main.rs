//! `otkit`: arithmetic invariants of Oeljeklaus-Toma manifolds from the command line.
//!
//! Exit codes: 0 success, 1 malformed input or failed table comparison,
//! 2 reducible polynomial, 3 uncertified unit system under `--certified-only`,
//! 4 reconstruction without a primitive witness.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::Signed;
use serde_json::{json, Value};

use otkit::analysis::{field_report, maximal_order, min_volume_scan, ReportConfig, SCAN_CSV_HEADER};
use otkit::error::Error;
use otkit::exec::Exec;
use otkit::geometry::{
    inoue_closed_form, mc_volume, ot_volume, torsion_upper_bound, torsion_upper_bound_sharp, volume_determinant_path,
    volume_lower_bound, FundamentalDomainData,
};
use otkit::order::MonogenicOrder;
use otkit::poly::IntPolynomial;
use otkit::tables::{regenerate, TABLE_NAMES};
use otkit::topology::{cubic_galois_closure_degree, h1, presentation_from_field, reconstruct_minpoly, GroupPresentation};
use otkit::units::{factor_string, j_ideal, torsion_group, unit_group, UnitConfig};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "otkit", version, about = "Arithmetic invariants of Oeljeklaus-Toma manifolds")]
struct Cli {
    /// Working precision in bits (at least 64).
    #[arg(long, global = true, env = "OTKIT_PRECISION", default_value_t = 192)]
    precision: usize,
    /// Coordinate bound for the unit search.
    #[arg(long, global = true)]
    bound: Option<u64>,
    /// Monte Carlo sample count (at least 1000 when used).
    #[arg(long, global = true, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Fail with exit code 3 unless the unit system is certified fundamental.
    #[arg(long, global = true)]
    certified_only: bool,
    /// Run kernels on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full report for Q[T]/(f).
    Field {
        poly: String,
        /// Include the Monte Carlo volume.
        #[arg(long)]
        mc: bool,
    },
    /// Fundamental units, regulator and J(O^{×,+}).
    Units { poly: String },
    /// The ideal J(O^{×,+}) and O/J.
    Jideal { poly: String },
    /// H1 of X(K; O^{×,+}) from a polynomial or a presentation file.
    H1 {
        poly: Option<String>,
        #[arg(long, conflicts_with = "poly")]
        presentation: Option<PathBuf>,
        /// Write the presentation of the field's group to this file.
        #[arg(long, requires = "poly")]
        write_presentation: Option<PathBuf>,
    },
    /// Volume by the closed formula and the determinant path.
    Volume { poly: String },
    /// Monte Carlo volume over the explicit fundamental domain.
    Mcvol { poly: String },
    /// Volume of the Inoue surface for T^3 + mT - 1.
    Inoue { m: u64 },
    /// Torsion bounds for s = t = 1, or the volume lower bound with --s.
    Bound {
        poly: Option<String>,
        #[arg(long, conflicts_with = "poly")]
        s: Option<usize>,
    },
    /// Minimal-volume scan over monic polynomials of degree s + 2.
    Scan {
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 2)]
        coeff_bound: i64,
        #[arg(long)]
        disc_max: u64,
    },
    /// Recover a defining polynomial from a presentation file.
    Reconstruct {
        file: PathBuf,
        /// Source polynomial for a round-trip comparison.
        #[arg(long)]
        source: Option<String>,
    },
    /// Regenerate a reference table and diff it against the embedded values.
    PaperTables {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(TABLE_NAMES))]
        which: String,
    },
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Reducible { .. } => (2, "reducible"),
            Error::InsufficientUnits { .. } => (3, "uncertified"),
            Error::PrecisionExhausted(_) => (1, "precision"),
            _ => (1, "invalid_input"),
        };
        Failure { code, kind, message: e.to_string() }
    }
}

fn fail(code: u8, kind: &'static str, message: impl Into<String>) -> Failure {
    Failure { code, kind, message: message.into() }
}

type Outcome = std::result::Result<(), Failure>;

struct Ctx {
    cfg: ReportConfig,
    format: Format,
    certified_only: bool,
}

impl Ctx {
    fn units(&self) -> &UnitConfig {
        &self.cfg.units
    }

    fn emit(&self, value: &Value, text: impl FnOnce() -> String) {
        let mut out = std::io::stdout().lock();
        let _ = match self.format {
            Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(value).expect("serializable")),
            _ => write!(out, "{}", text()),
        };
    }

    fn check_certified(&self, certified: bool) -> Outcome {
        if self.certified_only && !certified {
            return Err(fail(3, "uncertified", "unit system could not be certified fundamental"));
        }
        Ok(())
    }
}

fn parse_poly(s: &str) -> std::result::Result<IntPolynomial, Failure> {
    let f: IntPolynomial = s.parse()?;
    if !f.is_monic() {
        return Err(Error::NotMonic.into());
    }
    Ok(f)
}

fn interval_json(x: &otkit::interval::BigFloatInterval) -> Value {
    json!({"mid": x.mid_f64(), "rad": x.rad_f64()})
}

fn cmd_field(ctx: &Ctx, poly: &str, mc: bool) -> Outcome {
    let f = parse_poly(poly)?;
    let cfg = ReportConfig { mc_samples: if mc { ctx.cfg.mc_samples } else { 0 }, ..ctx.cfg.clone() };
    let r = field_report(&f, &cfg)?;
    ctx.check_certified(r.units.is_certified())?;
    ctx.emit(&r.to_json(), || r.to_text());
    Ok(())
}

fn cmd_units(ctx: &Ctx, poly: &str) -> Outcome {
    let f = parse_poly(poly)?;
    let o = maximal_order(&f)?;
    let u = unit_group(&o, ctx.units())?;
    ctx.check_certified(u.is_certified())?;
    let tp = &u.totally_positive_generators;
    let j = j_ideal(&o, tp)?;
    let t = torsion_group(&o, tp)?;
    let mut v = u.to_json(&o);
    v["J_norm"] = json!(j.norm.to_string());
    v["torsion_factors"] = json!(t.factor_strings());
    ctx.emit(&v, || {
        format!(
            "units     {}\nunits+    {}\nregulator {}\nindex bnd {}\nJ norm    {}\ntorsion   {:?}\n",
            u.generators.iter().map(|g| o.display_element(g)).collect::<Vec<_>>().join(", "),
            tp.iter().map(|g| o.display_element(g)).collect::<Vec<_>>().join(", "),
            u.regulator,
            u.certified_index_bound,
            j.norm,
            t.factor_strings(),
        )
    });
    Ok(())
}

fn cmd_jideal(ctx: &Ctx, poly: &str) -> Outcome {
    let f = parse_poly(poly)?;
    let o = maximal_order(&f)?;
    let u = unit_group(&o, ctx.units())?;
    ctx.check_certified(u.is_certified())?;
    let j = j_ideal(&o, &u.totally_positive_generators)?;
    let t = torsion_group(&o, &u.totally_positive_generators)?;
    let basis: Vec<Vec<String>> =
        j.basis.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
    let v = json!({
        "J_norm": j.norm.to_string(),
        "J_norm_factored": factor_string(&j.norm),
        "hnf_basis": basis,
        "quotient_factors": t.factor_strings(),
    });
    ctx.emit(&v, || format!("N(J) = {} = {}\nO/J  = {:?}\n", j.norm, factor_string(&j.norm), t.factor_strings()));
    Ok(())
}

fn read_presentation(path: &PathBuf) -> std::result::Result<GroupPresentation, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| fail(1, "io", format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| fail(1, "invalid_input", format!("bad JSON: {e}")))?;
    Ok(GroupPresentation::from_json(&v)?)
}

fn cmd_h1(ctx: &Ctx, poly: Option<&str>, pres: Option<&PathBuf>, write: Option<&PathBuf>) -> Outcome {
    let p = match (poly, pres) {
        (Some(s), _) => {
            let f = parse_poly(s)?;
            let o = maximal_order(&f)?;
            let u = unit_group(&o, ctx.units())?;
            ctx.check_certified(u.is_certified())?;
            presentation_from_field(&o, &u.totally_positive_generators)?
        }
        (None, Some(path)) => read_presentation(path)?,
        (None, None) => return Err(fail(1, "invalid_input", "give a polynomial or --presentation FILE")),
    };
    if let Some(path) = write {
        let text = serde_json::to_string_pretty(&p.to_json()).expect("serializable");
        std::fs::write(path, text).map_err(|e| fail(1, "io", format!("{}: {e}", path.display())))?;
    }
    let h = h1(&p);
    let v = json!({
        "h1": h.display(),
        "free_rank": h.free_rank,
        "torsion_factors": h.torsion.factor_strings(),
        "torsion_order": h.torsion.order_of_torsion.to_string(),
        "lattice_defect": h.lattice_defect,
    });
    ctx.emit(&v, || format!("H1 = {}\n", h.display()));
    Ok(())
}

fn cmd_volume(ctx: &Ctx, poly: &str) -> Outcome {
    let f = parse_poly(poly)?;
    let o = maximal_order(&f)?;
    let sig = o.signature();
    if sig.t != 1 {
        return Err(fail(1, "invalid_input", "volumes need exactly one complex place"));
    }
    let u = unit_group(&o, ctx.units())?;
    ctx.check_certified(u.is_certified())?;
    let d = o.disc().abs();
    let closed = ot_volume(sig.s, &d, &u.regulator)?;
    let geo = ot_volume(sig.s, &d, &u.positive_regulator())?;
    let det = volume_determinant_path(&o, &u.totally_positive_generators, ctx.units().precision)?;
    let v = json!({
        "poly": f.to_string(),
        "disc": o.disc().to_string(),
        "regulator": interval_json(&u.regulator),
        "sign_index": u.sign_index,
        "prefactor": closed.prefactor.to_string(),
        "volume": interval_json(&closed.value),
        "geometric_volume": interval_json(&geo.value),
        "determinant_path": interval_json(&det.value),
        "paths_agree": geo.value.overlaps(&det.value),
        "lower_bound": interval_json(&volume_lower_bound(sig.s, ctx.units().precision)),
    });
    ctx.emit(&v, || {
        format!(
            "volume            {:.12}\ngeometric volume  {:.12}  (sign index {})\ndeterminant path  {:.12}\n",
            closed.value.mid_f64(),
            geo.value.mid_f64(),
            u.sign_index,
            det.value.mid_f64()
        )
    });
    Ok(())
}

fn cmd_mcvol(ctx: &Ctx, poly: &str) -> Outcome {
    let f = parse_poly(poly)?;
    let o = maximal_order(&f)?;
    let u = unit_group(&o, ctx.units())?;
    ctx.check_certified(u.is_certified())?;
    let d = FundamentalDomainData::new(&o, &u.totally_positive_generators, ctx.units().precision)?;
    let r = mc_volume(&d, ctx.cfg.mc_samples, ctx.cfg.seed, ctx.units().exec)?;
    let geo = ot_volume(o.signature().s, &o.disc().abs(), &u.positive_regulator())?;
    let (m, e) = (r.value.mid_f64(), r.stderr.unwrap_or(0.0));
    let z = (m - geo.value.mid_f64()) / e;
    let v = json!({
        "poly": f.to_string(),
        "seed": ctx.cfg.seed,
        "samples": ctx.cfg.mc_samples,
        "estimate": m,
        "stderr": e,
        "closed_form": geo.value.mid_f64(),
        "z_score": z,
    });
    ctx.emit(&v, || format!("mc volume {m:.8} ± {e:.8}  (closed form {:.8}, z = {z:.2})\n", geo.value.mid_f64()));
    Ok(())
}

fn cmd_inoue(ctx: &Ctx, m: u64) -> Outcome {
    let r = inoue_closed_form(m, ctx.units().precision)?;
    let f = IntPolynomial::from_i64s(&[-1, m as i64, 0, 1]);
    let o = MonogenicOrder::build(&f)?.power_basis();
    let det = volume_determinant_path(&o, &[o.generator()], ctx.units().precision)?;
    let v = json!({
        "m": m,
        "volume": interval_json(&r.value),
        "determinant_path": interval_json(&det.value),
        "h1": format!("Z + Z/{m}"),
    });
    ctx.emit(&v, || format!("volume {:.15}\ndet    {:.15}\n", r.value.mid_f64(), det.value.mid_f64()));
    Ok(())
}

fn cmd_bound(ctx: &Ctx, poly: Option<&str>, s: Option<usize>) -> Outcome {
    if let Some(s) = s {
        if s == 0 {
            return Err(fail(1, "invalid_input", "s must be at least 1"));
        }
        let b = volume_lower_bound(s, ctx.units().precision);
        ctx.emit(&json!({"s": s, "volume_lower_bound": interval_json(&b)}), || format!("{:.12}\n", b.mid_f64()));
        return Ok(());
    }
    let f = parse_poly(poly.ok_or_else(|| fail(1, "invalid_input", "give a polynomial or --s"))?)?;
    let o = maximal_order(&f)?;
    let sig = o.signature();
    if (sig.s, sig.t) != (1, 1) {
        return Err(fail(1, "invalid_input", "torsion bounds need s = t = 1"));
    }
    let u = unit_group(&o, ctx.units())?;
    ctx.check_certified(u.is_certified())?;
    let d = o.disc().abs();
    let vol = ot_volume(1, &d, &u.regulator)?.value;
    let t = torsion_group(&o, &u.totally_positive_generators)?;
    let plain = torsion_upper_bound(&vol, &d);
    let sharp = torsion_upper_bound_sharp(&vol, &d);
    let v = json!({
        "torsion_order": t.order_of_torsion.to_string(),
        "bound": interval_json(&plain),
        "bound_sharp": interval_json(&sharp),
        "volume": interval_json(&vol),
    });
    ctx.emit(&v, || {
        format!("torsion {}\nbound   {:.4}\nsharp   {:.4}\n", t.order_of_torsion, plain.mid_f64(), sharp.mid_f64())
    });
    Ok(())
}

fn cmd_scan(ctx: &Ctx, s: usize, coeff_bound: i64, disc_max: u64) -> Outcome {
    if !(1..=3).contains(&s) {
        return Err(fail(1, "invalid_input", "certified scans support s in 1..=3"));
    }
    let mut recs = min_volume_scan(s, coeff_bound, &BigInt::from(disc_max), ctx.units())?;
    if ctx.certified_only {
        recs.retain(|r| r.certified);
    }
    match ctx.format {
        Format::Json => ctx.emit(&serde_json::to_value(&recs).expect("serializable"), String::new),
        _ => {
            let mut w = csv::Writer::from_writer(std::io::stdout().lock());
            let io = |e: csv::Error| fail(1, "io", e.to_string());
            w.write_record(SCAN_CSV_HEADER).map_err(io)?;
            for r in &recs {
                w.write_record(r.csv_fields()).map_err(io)?;
            }
            w.flush().map_err(|e| fail(1, "io", e.to_string()))?;
        }
    }
    Ok(())
}

fn cmd_reconstruct(ctx: &Ctx, file: &PathBuf, source: Option<&str>) -> Outcome {
    let p = read_presentation(file)?;
    let r = reconstruct_minpoly(&p, 64, ctx.cfg.seed);
    let h = h1(&p);
    let mut v = json!({
        "poly": r.poly.to_string(),
        "word": r.word,
        "primitive": r.primitive,
        "h1": h.display(),
    });
    let mut text = format!("poly {}\nH1   {}\n", r.poly, h.display());
    if r.primitive {
        let f = &r.poly;
        let sig = otkit::order::signature(f);
        v["signature"] = json!([sig.s, sig.t]);
        if sig.t > 1 {
            let note = "more than one complex place: the field is not determined by the group";
            v["note"] = json!(note);
            text += &format!("note {note}\n");
        }
        if f.degree() == 3 {
            let g = cubic_galois_closure_degree(f)?;
            v["galois_closure_degree"] = json!(g);
            text += &format!("closure degree {g}\n");
        }
        if let Some(src) = source {
            let g = parse_poly(src)?;
            let (oa, ob) = (maximal_order(f)?, maximal_order(&g)?);
            let (ua, ub) = (unit_group(&oa, ctx.units())?, unit_group(&ob, ctx.units())?);
            let same = oa.disc() == ob.disc() && ua.regulator.overlaps(&ub.regulator);
            v["round_trip"] = json!({
                "disc": [oa.disc().to_string(), ob.disc().to_string()],
                "regulator": [interval_json(&ua.regulator), interval_json(&ub.regulator)],
                "agree": same,
            });
            text += &format!("round trip {}\n", if same { "agrees" } else { "DIFFERS" });
        }
    }
    ctx.emit(&v, || text);
    if !r.primitive {
        return Err(fail(4, "non_primitive", format!("no primitive witness; best polynomial {}", r.poly)));
    }
    Ok(())
}

fn cmd_tables(ctx: &Ctx, which: &str) -> Outcome {
    let t = regenerate(which, ctx.units())?;
    match ctx.format {
        Format::Json => ctx.emit(&serde_json::to_value(&t).expect("serializable"), String::new),
        _ => print!("{}", t.to_csv()),
    }
    let bad = t.mismatches();
    let missing = t.missing();
    if bad.is_empty() && missing.is_empty() {
        return Ok(());
    }
    let mut msg: Vec<String> =
        bad.iter().map(|c| format!("{}/{}: computed {} expected {}", c.row, c.column, c.computed, c.expected.as_deref().unwrap_or(""))).collect();
    msg.extend(missing.iter().map(|(r, c)| format!("{r}/{c}: missing")));
    Err(fail(1, "table_mismatch", msg.join("; ")))
}

fn run(cli: Cli) -> Outcome {
    if cli.precision < 64 {
        return Err(fail(1, "invalid_input", "--precision must be at least 64"));
    }
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    let units = UnitConfig { coord_bound: cli.bound, precision: cli.precision, exec, ..UnitConfig::default() };
    let ctx = Ctx {
        cfg: ReportConfig { units, mc_samples: cli.samples, seed: cli.seed },
        format: cli.format,
        certified_only: cli.certified_only,
    };
    if cli.samples < 1000 && matches!(cli.command, Command::Mcvol { .. } | Command::Field { mc: true, .. }) {
        return Err(fail(1, "invalid_input", "--samples must be at least 1000"));
    }
    match &cli.command {
        Command::Field { poly, mc } => cmd_field(&ctx, poly, *mc),
        Command::Units { poly } => cmd_units(&ctx, poly),
        Command::Jideal { poly } => cmd_jideal(&ctx, poly),
        Command::H1 { poly, presentation, write_presentation } => {
            cmd_h1(&ctx, poly.as_deref(), presentation.as_ref(), write_presentation.as_ref())
        }
        Command::Volume { poly } => cmd_volume(&ctx, poly),
        Command::Mcvol { poly } => cmd_mcvol(&ctx, poly),
        Command::Inoue { m } => cmd_inoue(&ctx, *m),
        Command::Bound { poly, s } => cmd_bound(&ctx, poly.as_deref(), *s),
        Command::Scan { s, coeff_bound, disc_max } => cmd_scan(&ctx, *s, *coeff_bound, *disc_max),
        Command::Reconstruct { file, source } => cmd_reconstruct(&ctx, file, source.as_deref()),
        Command::PaperTables { which } => cmd_tables(&ctx, which),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let e = json!({"error": f.kind, "message": f.message, "exit_code": f.code});
            eprintln!("{e}");
            ExitCode::from(f.code)
        }
    }
}
