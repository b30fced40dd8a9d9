//! Acceptance run: one line per criterion with the measured runtime against
//! its limit. Criteria whose only failures are reference cells known to
//! deviate (see `data/expected_tables.json` notes) print FAIL with the
//! reason but do not fail the run; any other failure exits nonzero.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use otkit::analysis::{maximal_order, min_volume_scan, ScanRecord};
use otkit::exec::Exec;
use otkit::factor::{primality_is_proven, trial_factor, DEFAULT_TRIAL_BOUND};
use otkit::geometry::{
    act, inoue_closed_form, mc_volume, metric_det_check, ot_volume, point_from_f64, reduce_to_domain,
    torsion_upper_bound, torsion_upper_bound_sharp, volume_determinant_path, volume_lower_bound,
    FundamentalDomainData,
};
use otkit::order::{is_irreducible, signature, MonogenicOrder, OrderElement, Signature, SubOrder};
use otkit::poly::IntPolynomial;
use otkit::tables::{regenerate, scan_bounds};
use otkit::topology::{
    commutator_sample_closure, compositum, example_s_action_from_table, example_s_action_from_tensor, h1,
    presentation_from_field, reconstruct_minpoly, TensorOrder,
};
use otkit::units::{j_ideal, torsion_group, unit_group, unit_product, AbelianGroupInvariants, UnitConfig};

enum Status {
    Pass,
    /// Only reference cells with a recorded explanation disagree.
    KnownDeviation(String),
    Fail(String),
}

struct Check {
    problems: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check { problems: Vec::new() }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.problems.push(what());
        }
    }

    fn status(self, deviations: Vec<String>) -> Status {
        if !self.problems.is_empty() {
            Status::Fail(self.problems.join("; "))
        } else if !deviations.is_empty() {
            Status::KnownDeviation(deviations.join("; "))
        } else {
            Status::Pass
        }
    }
}

fn poly(s: &str) -> IntPolynomial {
    s.parse().unwrap()
}

fn cfg() -> UnitConfig {
    UnitConfig::default()
}

/// Irreducible monic cubics with coefficients in `[-b, b]` and the requested
/// signature, drawn from a seeded stream.
fn random_cubics(seed: u64, count: usize, b: i64, sig: Option<Signature>) -> Vec<IntPolynomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<IntPolynomial> = Vec::new();
    while out.len() < count {
        let c: Vec<i64> = (0..3).map(|_| rng.gen_range(-b..=b)).collect();
        let f = IntPolynomial::from_i64s(&[c[0], c[1], c[2], 1]);
        if c[0] == 0 || !is_irreducible(&f) || out.contains(&f) {
            continue;
        }
        if sig.is_some_and(|s| signature(&f) != s) {
            continue;
        }
        out.push(f);
    }
    out
}

const S1T1: Signature = Signature { s: 1, t: 1 };

// ---------------------------------------------------------------------------

fn c1_torsion_tables() -> Status {
    let mut c = Check::new();
    let mut dev = Vec::new();
    let t = regenerate("computeJ", &cfg()).unwrap();
    c.expect(t.missing().is_empty(), || format!("missing cells {:?}", t.missing()));
    for cell in t.mismatches() {
        let alt = t.cell(&cell.row, &format!("{}_norm_1_plus_unit", cell.column));
        let explained = cell.note.is_some() && alt.is_some_and(|a| Some(&a.computed) == cell.expected.as_ref());
        if explained {
            dev.push(format!(
                "{}{}: N(J(O^x+)) = {}, reference {} = N(1+e) for the totally positive unit e",
                cell.column, cell.row, cell.computed, cell.expected.as_deref().unwrap()
            ));
        } else {
            c.expect(false, || format!("{}{}: computed {} expected {:?}", cell.column, cell.row, cell.computed, cell.expected));
        }
    }
    c.status(dev)
}

fn c2_large_torsion() -> Status {
    let mut c = Check::new();
    let o = maximal_order(&poly("T^3 + 2*T + 2000")).unwrap();
    let u = unit_group(&o, &cfg()).unwrap();
    c.expect(u.is_certified(), || "unit not certified".into());
    let n = j_ideal(&o, &u.totally_positive_generators).unwrap().norm;
    let f = trial_factor(&n, DEFAULT_TRIAL_BOUND);
    let primes: Vec<(String, u32)> = f.primes.iter().map(|(p, e)| (p.to_string(), *e)).collect();
    let want = [("2", 2), ("5", 2), ("7", 1), ("967", 1)];
    c.expect(primes.iter().map(|(p, e)| (p.as_str(), *e)).eq(want.iter().copied()), || format!("small primes {primes:?}"));
    let big: BigInt = "1649120827309715616889".parse().unwrap();
    c.expect(f.cofactor == big && primality_is_proven(&big), || format!("cofactor {}", f.cofactor));
    c.expect(f.value() == n, || "factorization does not multiply back".into());
    c.status(vec![])
}

fn c3_disc23() -> Status {
    let mut c = Check::new();
    let o = maximal_order(&poly("T^3 + T^2 - 1")).unwrap();
    let u = unit_group(&o, &cfg()).unwrap();
    let r = u.regulator.mid_f64();
    c.expect((r - 0.28119957432).abs() <= 1e-9, || format!("regulator {r}"));
    let v = ot_volume(1, &o.disc().abs(), &u.regulator).unwrap().value.mid_f64();
    c.expect((v - 0.337146).abs() <= 1e-5, || format!("volume {v}"));
    c.expect(o.disc() == &BigInt::from(-23), || format!("disc {}", o.disc()));
    c.status(vec![])
}

fn c4_two_path_h1() -> Status {
    let mut c = Check::new();
    for (k, f) in random_cubics(20240, 20, 12, Some(S1T1)).iter().enumerate() {
        let o = maximal_order(f).unwrap();
        let u = unit_group(&o, &cfg()).unwrap();
        let tp = &u.totally_positive_generators;
        let module = torsion_group(&o, tp).unwrap();
        let p = presentation_from_field(&o, tp).unwrap();
        let group = h1(&p);
        let closure = commutator_sample_closure(&p, 12, k as u64);
        let closure_inv = AbelianGroupInvariants::cokernel(&closure.basis);
        c.expect(group.torsion == module && group.free_rank == 1 && !group.is_degenerate(), || {
            format!("{f}: H1 {} vs O/J {:?}", group.display(), module.factors)
        });
        c.expect(closure_inv == module, || format!("{f}: closure {:?} vs O/J {:?}", closure_inv.factors, module.factors));
    }
    c.status(vec![])
}

fn c5_prop5() -> Status {
    let mut c = Check::new();
    let prec = 192;
    for m in 1..=50u64 {
        let f = IntPolynomial::from_i64s(&[-1, m as i64, 0, 1]);
        if !is_irreducible(&f) {
            continue;
        }
        let o = MonogenicOrder::build(&f).unwrap().power_basis();
        let p = presentation_from_field(&o, &[o.generator()]).unwrap();
        let want = if m == 1 { "Z".to_string() } else { format!("Z + Z/{m}") };
        let got = h1(&p).display();
        c.expect(got == want, || format!("m={m}: H1 {got}"));
        let a = inoue_closed_form(m, prec).unwrap().value;
        let b = volume_determinant_path(&o, &[o.generator()], prec).unwrap().value;
        c.expect(a.rel_close(&b, 1e-9), || format!("m={m}: {a} vs {b}"));
    }
    let t = regenerate("prop5index", &cfg()).unwrap();
    c.expect(t.mismatches().is_empty() && t.missing().is_empty(), || format!("index table {:?}", t.mismatches()));
    c.status(vec![])
}

fn c6_volume_bounds() -> Status {
    let mut c = Check::new();
    let mut dev = Vec::new();
    let published: [(i64, &str, f64, f64); 9] = [
        (1, "4", 13.54, 2.3702),
        (2, "2", 9.58, 1.0105),
        (3, "2856582", 8575220.0, 177.8782),
        (4, "32", 122.47, 22.1167),
        (5, "5146", 15731.73, 111.5530),
        (6, "288", 1022.58, 79.3724),
        (7, "1288", 4175.28, 104.6757),
        (8, "2", 11.07, 1.5189),
        (10, "14", 43.89, 41.7309),
    ];
    for (m, tors, bound, vol) in published {
        let o = maximal_order(&IntPolynomial::from_i64s(&[-m, 8, 0, 1])).unwrap();
        let u = unit_group(&o, &cfg()).unwrap();
        let t = torsion_group(&o, &u.totally_positive_generators).unwrap().order_of_torsion;
        c.expect(t.to_string() == tors, || format!("m={m}: torsion {t}"));
        let d = o.disc().abs();
        let v = ot_volume(1, &d, &u.regulator).unwrap().value;
        let sharp = torsion_upper_bound_sharp(&v, &d).mid_f64();
        let plain = torsion_upper_bound(&v, &d).mid_f64();
        let tf: f64 = tors.parse().unwrap();
        c.expect(sharp >= tf && plain >= tf, || format!("m={m}: bound below torsion"));
        c.expect((v.mid_f64() - vol).abs() <= 0.01, || format!("m={m}: volume {}", v.mid_f64()));
        if (sharp - bound).abs() > 0.01 {
            if m == 3 && (sharp - bound).abs() / bound < 1e-6 {
                dev.push(format!(
                    "m=3 bound computed {sharp:.4}, reference {bound}: relative gap {:.1e} (exp-sensitive, confirmed at 50 digits)",
                    (sharp - bound).abs() / bound
                ));
            } else {
                c.expect(false, || format!("m={m}: bound {sharp} vs {bound}"));
            }
        }
    }
    c.status(dev)
}

fn c7_monte_carlo() -> Status {
    let mut c = Check::new();
    let o = maximal_order(&poly("T^3 + T^2 - 1")).unwrap();
    let u = unit_group(&o, &cfg()).unwrap();
    let d = FundamentalDomainData::new(&o, &u.totally_positive_generators, 128).unwrap();
    let r = mc_volume(&d, 1_000_000, 42, Exec::default()).unwrap();
    let exact = ot_volume(1, &o.disc().abs(), &u.positive_regulator()).unwrap().value.mid_f64();
    let (m, e) = (r.value.mid_f64(), r.stderr.unwrap());
    c.expect((m - exact).abs() <= 3.0 * e, || format!("estimate {m} ± {e} vs {exact}"));
    c.expect(e <= 0.01 * exact, || format!("stderr {e}"));
    println!("    mc: {m:.6} ± {e:.6} (closed form {exact:.6})");
    c.status(vec![])
}

fn certified(recs: &[ScanRecord]) -> Vec<&ScanRecord> {
    recs.iter().filter(|r| r.certified).collect()
}

fn c8_scans(store: &mut Vec<(usize, Vec<ScanRecord>)>) -> Status {
    let mut c = Check::new();
    let mut notes = Vec::new();
    for s in 1..=3 {
        let (cb, db) = scan_bounds(s);
        let recs = min_volume_scan(s, cb, &BigInt::from(db), &cfg()).unwrap();
        c.expect(recs.iter().all(|r| r.certified), || format!("s={s}: uncertified records"));
        store.push((s, recs));
    }
    let r1 = certified(&store[0].1);
    c.expect(r1[0].disc == "-23" && (r1[0].volume - 0.337146).abs() < 1e-6, || format!("s=1 min {:?}", r1[0].csv_fields()));
    c.expect(r1.iter().filter(|r| r.disc == "-23").count() == 1 && r1[1].volume > r1[0].volume + 1e-3, || {
        "s=1 minimum not unique".into()
    });
    let r2 = certified(&store[1].1);
    let published = [("-275", 0.0717), ("-283", 0.0745), ("-331", 0.0921), ("-400", 0.1196), ("-475", 0.1473)];
    for (disc, vol) in published {
        let hit = r2.iter().find(|r| r.disc == disc);
        c.expect(hit.is_some_and(|r| (r.volume - vol).abs() <= 1e-3), || format!("s=2 disc {disc}: {:?}", hit.map(|r| r.volume)));
    }
    let extra: Vec<String> = r2
        .iter()
        .filter(|r| !published.iter().any(|(d, _)| *d == r.disc))
        .map(|r| format!("{} ({:.4})", r.disc, r.volume))
        .collect();
    notes.push(format!("s=2 extra fields {}", extra.join(", ")));
    let r3 = certified(&store[2].1);
    c.expect(r3[0].disc == "-4511" && (r3[0].volume - 0.00515).abs() <= 1e-4, || format!("s=3 min {:?}", r3[0].csv_fields()));
    println!("    {}", notes.join("; "));
    c.status(vec![])
}

fn c9_reconstruction() -> Status {
    let mut c = Check::new();
    let o = MonogenicOrder::build(&poly("T^3 + T^2 - 1")).unwrap().maximalize();
    let u = unit_group(&o, &cfg()).unwrap();
    let p = presentation_from_field(&o, &u.totally_positive_generators).unwrap();
    let r = reconstruct_minpoly(&p, 16, 0);
    c.expect(r.poly == poly("x^3 + x^2 - 1") || r.poly == poly("x^3 - x - 1"), || format!("disc -23: {}", r.poly));
    let mut fields = random_cubics(99, 7, 6, Some(S1T1));
    fields.extend(random_cubics(7, 3, 6, Some(Signature { s: 3, t: 0 })));
    for f in &fields {
        let o = maximal_order(f).unwrap();
        let u = unit_group(&o, &cfg()).unwrap();
        let p = presentation_from_field(&o, &u.totally_positive_generators).unwrap();
        let r = reconstruct_minpoly(&p, 32, 1);
        c.expect(r.primitive, || format!("{f}: no primitive witness"));
        let o2 = maximal_order(&r.poly).unwrap();
        let u2 = unit_group(&o2, &cfg()).unwrap();
        c.expect(o2.disc() == o.disc() && u2.regulator.overlaps(&u.regulator), || {
            format!("{f} -> {}: disc {} vs {}", r.poly, o2.disc(), o.disc())
        });
    }
    c.status(vec![])
}

fn c10_example6() -> Status {
    let mut c = Check::new();
    let l1 = poly("S^3 + S + 1");
    let (l2, l3) = (poly("T^3 - T + 2"), poly("T^3 - T + 1"));
    let (h2, sig2, _) = compositum(&l1, &l2).unwrap();
    let (h3, sig3, _) = compositum(&l1, &l3).unwrap();
    let want = Signature { s: 1, t: 4 };
    c.expect(h2.degree() == 9 && h3.degree() == 9 && sig2 == want && sig3 == want, || {
        format!("compositum degrees/signatures {sig2:?} {sig3:?}")
    });
    let table = example_s_action_from_table();
    let sq = table.mul(&table);
    for g in [&l2, &l3] {
        let a = example_s_action_from_tensor(&TensorOrder::new(l1.clone(), g.clone()));
        c.expect(a.mul(&a) == sq, || format!("S^2 action differs for {g}"));
    }
    let (d2, d3) = (h2.discriminant().unwrap(), h3.discriminant().unwrap());
    c.expect(d2 != d3, || "degree-9 discriminants coincide".into());
    c.status(vec![])
}

fn random_point(rng: &mut ChaCha8Rng, s: usize, prec: usize) -> Vec<otkit::interval::ComplexInterval> {
    let mut z: Vec<(f64, f64)> = (0..s).map(|_| (rng.gen_range(-20.0..20.0), rng.gen_range(-3.0f64..3.0).exp())).collect();
    z.push((rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0)));
    point_from_f64(&z, prec)
}

fn points_close(a: &[otkit::interval::ComplexInterval], b: &[otkit::interval::ComplexInterval]) -> bool {
    let near = |x: f64, y: f64| (x - y).abs() <= 1e-20 * x.abs().max(1.0);
    a.iter().zip(b).all(|(x, y)| {
        let (p, q) = (x.to_f64(), y.to_f64());
        near(p.0, q.0) && near(p.1, q.1)
    })
}

fn c11_identities(scans: &[(usize, Vec<ScanRecord>)]) -> Status {
    let mut c = Check::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    // Metric determinant.
    for s in 1..=4 {
        for _ in 0..100 {
            let y: Vec<f64> = (0..s).map(|_| rng.gen_range(-4.0f64..4.0).exp()).collect();
            let r = metric_det_check(s, &y, 192).unwrap();
            c.expect(r.passes(2f64.powi(-64)), || format!("metric det s={s} y={y:?}: rel {}", r.rel_dev));
        }
    }
    // J(U) + J(V) = J(UV).
    let fields: Vec<SubOrder> = ["T^4 - T - 1", "T^3 - 3*T - 1", "T^3 + T^2 - 1", "T^3 - T + 7"]
        .iter()
        .map(|f| maximal_order(&poly(f)).unwrap())
        .collect();
    let mut pairs = 0;
    while pairs < 50 {
        let o = &fields[pairs % fields.len()];
        let u = unit_group(o, &cfg()).unwrap();
        let g = &u.totally_positive_generators;
        let draw = |rng: &mut ChaCha8Rng| -> OrderElement {
            loop {
                let e: Vec<i64> = g.iter().map(|_| rng.gen_range(-3..=3)).collect();
                if e.iter().any(|&x| x != 0) {
                    return unit_product(o, g, &e).unwrap();
                }
            }
        };
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        let lhs = j_ideal(o, std::slice::from_ref(&a)).unwrap().sum(&j_ideal(o, std::slice::from_ref(&b)).unwrap()).unwrap();
        let rhs = j_ideal(o, &[a, b]).unwrap();
        c.expect(lhs.basis == rhs.basis, || format!("J sum differs in {}", o.poly()));
        pairs += 1;
    }
    // Fundamental-domain reduction.
    let prec = 160;
    for (f, count) in [("T^3 + T^2 - 1", 500), ("T^4 - T - 1", 500)] {
        let o = maximal_order(&poly(f)).unwrap();
        let u = unit_group(&o, &cfg()).unwrap();
        let d = FundamentalDomainData::new(&o, &u.totally_positive_generators, prec).unwrap();
        let s = d.s;
        for _ in 0..count {
            let p = random_point(&mut rng, s, prec);
            let r = reduce_to_domain(&p, &d, &o).unwrap();
            let again = reduce_to_domain(&r.point, &d, &o).unwrap();
            c.expect(again.is_identity(), || format!("{f}: reduction not idempotent"));
            let shift = OrderElement::new((0..o.degree()).map(|_| BigInt::from(rng.gen_range(-6..=6))).collect());
            let ex: Vec<i64> = (0..s).map(|_| rng.gen_range(-2..=2)).collect();
            let v = unit_product(&o, &d.square_gens, &ex).unwrap();
            let moved = act(&o, &d.emb, &shift, &v, &p);
            let r2 = reduce_to_domain(&moved, &d, &o).unwrap();
            c.expect(points_close(&r.point, &r2.point), || format!("{f}: orbit representatives differ"));
        }
    }
    // Lower bound below every scanned volume.
    for (s, recs) in scans {
        let lb = volume_lower_bound(*s, 128).mid_f64();
        c.expect(recs.iter().filter(|r| r.certified).all(|r| r.volume > lb), || format!("s={s}: volume below {lb}"));
    }
    c.status(vec![])
}

fn main() {
    let mut scans = Vec::new();
    let criteria: Vec<(&str, Duration, Box<dyn FnMut() -> Status>)> = vec![
        ("1 torsion tables F/H", Duration::from_secs(10), Box::new(c1_torsion_tables)),
        ("2 large torsion T^3+2T+2000", Duration::from_secs(30), Box::new(c2_large_torsion)),
        ("3 disc -23 regulator and volume", Duration::from_secs(1), Box::new(c3_disc23)),
        ("4 two-path H1 on 20 cubics", Duration::from_secs(60), Box::new(c4_two_path_h1)),
        ("5 prescribed torsion family m<=50", Duration::from_secs(60), Box::new(c5_prop5)),
        ("6 torsion-bound table T^3+8T-m", Duration::from_secs(120), Box::new(c6_volume_bounds)),
        ("7 Monte Carlo volume, 10^6 samples", Duration::from_secs(60), Box::new(c7_monte_carlo)),
        ("8 minimal-volume scans s=1,2,3", Duration::from_secs(600), Box::new(|| c8_scans(&mut scans))),
        ("9 reconstruction round trip", Duration::from_secs(30), Box::new(c9_reconstruction)),
        ("10 compositum example", Duration::from_secs(30), Box::new(c10_example6)),
    ];
    let mut hard = 0;
    let mut known = 0;
    let mut report = |name: &str, limit: Duration, status: Status, took: Duration| {
        let over = took > limit;
        let (tag, detail) = match (&status, over) {
            (_, true) => ("FAIL", format!("over time limit {:.0?}", limit)),
            (Status::Pass, _) => ("PASS", String::new()),
            (Status::KnownDeviation(d), _) => ("FAIL", format!("reference deviation: {d}")),
            (Status::Fail(d), _) => ("FAIL", d.clone()),
        };
        match (&status, over) {
            (Status::Fail(_), _) | (_, true) => hard += 1,
            (Status::KnownDeviation(_), _) => known += 1,
            _ => {}
        }
        println!("[{tag}] {name} ({:.2?} / limit {:.0?}){}{}", took, limit, if detail.is_empty() { "" } else { ": " }, detail);
    };
    for (name, limit, mut f) in criteria {
        let t = Instant::now();
        let st = f();
        report(name, limit, st, t.elapsed());
    }
    let t = Instant::now();
    let st = c11_identities(&scans);
    report("11 identity suites", Duration::from_secs(120), st, t.elapsed());
    println!("acceptance: {} pass, {known} fail on reference deviations, {hard} fail", 11 - known - hard);
    if hard > 0 {
        std::process::exit(1);
    }
}
