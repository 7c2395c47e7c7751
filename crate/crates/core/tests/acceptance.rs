//! Acceptance run: one PASS/FAIL line per criterion, then a nonzero exit if
//! any hard criterion failed.
//!
//! Reference values live in `tests/data/*.csv`, one row per prime or
//! codebook with the same columns as `metrics_csv_row`.
//! `cargo test -p cyclocode --test acceptance` runs the desk-scale rows;
//! pass `-- --ignored` to add the Table 3/4 rows for k = 21..25, which need
//! minutes and several GB of memory each.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use cyclocode::baseline::{gps_ca_codebook_with, wh_comparison_codebook, DEFAULT_PRNS, FALLBACK_PRNS};
use cyclocode::correlation::{acorr_direct, acorr_fft, pcdf, pcorr, Aggregate, MetricsOptions, MetricsSummary};
use cyclocode::experiments::{
    compare_gps_with, sweep, table, table1_primes, table3_primes, CompareRow, TableRow, TableSpec,
};
use cyclocode::numtheory::{cyclotomic_numbers, divisors, is_prime, FieldContext};
use cyclocode::plans::{walsh_plan, CyclotomicPattern, CyclotomicPlan};
use cyclocode::sequences::{
    derive_periodic, derive_via_characters, instantiate, periodic_sequences, rotate, AperiodicSeq, Codebook, Entries,
    PeriodicSeq, Provenance, RotationSpec,
};
use cyclocode::theory::{cdf_decomposition_residual, peak_bounds};
use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 5e-5;
const INTEGER_COLUMNS: [&str; 4] = ["psl_min", "psl_max", "pcc_min", "pcc_max"];

type Outcome = Result<String, String>;

struct Fixture {
    columns: Vec<String>,
    rows: Vec<(String, Vec<String>)>,
}

impl Fixture {
    fn load(name: &str) -> Fixture {
        let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
        let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().expect("header");
        let columns = header.split(',').skip(1).map(String::from).collect();
        let rows = lines
            .map(|l| {
                let mut cells = l.split(',').map(String::from);
                let key = cells.next().unwrap();
                (key, cells.collect())
            })
            .collect();
        Fixture { columns, rows }
    }

    fn row(&self, key: &str) -> Option<&[String]> {
        self.rows.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_slice())
    }
}

fn cells_of(
    psl: Option<Aggregate>,
    pcc: Option<Aggregate>,
    adf: Option<Aggregate>,
    cdf: Option<Aggregate>,
    ratio: Option<f64>,
    adj: Option<f64>,
) -> BTreeMap<&'static str, Option<f64>> {
    let mut m = BTreeMap::new();
    m.insert("guc_over_sqrt_sdc", ratio);
    m.insert("adjusted_df", adj);
    for (name, agg) in [("psl", psl), ("pcc", pcc), ("adf", adf), ("cdf", cdf)] {
        let [a, lo, hi] = match name {
            "psl" => ["psl_avg", "psl_min", "psl_max"],
            "pcc" => ["pcc_avg", "pcc_min", "pcc_max"],
            "adf" => ["adf_avg", "adf_min", "adf_max"],
            _ => ["cdf_avg", "cdf_min", "cdf_max"],
        };
        m.insert(a, agg.map(|g| g.avg));
        m.insert(lo, agg.map(|g| g.min));
        m.insert(hi, agg.map(|g| g.max));
    }
    m
}

fn summary_cells(s: &MetricsSummary) -> BTreeMap<&'static str, Option<f64>> {
    cells_of(Some(s.psl), s.pcc, Some(s.adf), s.cdf, Some(s.guc_over_sqrt_sdc), Some(s.adjusted_df))
}

fn compare_cells(r: &CompareRow) -> BTreeMap<&'static str, Option<f64>> {
    cells_of(r.psl, r.pcc, r.adf, r.cdf, r.guc_over_sqrt_sdc, r.adjusted_df)
}

/// Mismatches between computed cells and one reference row; also returns the
/// largest deviation seen in a non-integer column.
fn check_row(
    fixture: &Fixture,
    key: &str,
    cells: &BTreeMap<&'static str, Option<f64>>,
    only: Option<&[&str]>,
) -> (Vec<String>, f64) {
    let Some(reference) = fixture.row(key) else {
        return (vec![format!("{key}: no reference row")], 0.0);
    };
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for (col, text) in fixture.columns.iter().zip(reference) {
        if only.is_some_and(|o| !o.contains(&col.as_str())) {
            continue;
        }
        let ours = cells.get(col.as_str()).copied().flatten();
        match (text.is_empty(), ours) {
            (true, None) => {}
            (true, Some(_)) | (false, None) => bad.push(format!("{key}/{col}: presence differs")),
            (false, Some(v)) => {
                let want: f64 = text.parse().expect("numeric cell");
                if INTEGER_COLUMNS.contains(&col.as_str()) {
                    if v.round() != want {
                        bad.push(format!("{key}/{col}: {v} vs {want}"));
                    }
                } else {
                    let d = (v - want).abs();
                    worst = worst.max(d);
                    if d > TOL + 1e-12 {
                        bad.push(format!("{key}/{col}: {v:.6} vs {text}"));
                    }
                }
            }
        }
    }
    (bad, worst)
}

fn check_table_rows(fixture: &Fixture, rows: &[TableRow], only: Option<&[&str]>) -> Outcome {
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for r in rows {
        let (b, w) = check_row(fixture, &r.p.to_string(), &summary_cells(&r.summary), only);
        bad.extend(b);
        worst = worst.max(w);
    }
    if bad.is_empty() {
        Ok(format!("{} rows, max deviation {worst:.1e}", rows.len()))
    } else {
        Err(format!("{} mismatches: {}", bad.len(), bad.iter().take(6).cloned().collect::<Vec<_>>().join("; ")))
    }
}

fn quarter_rows(plan: &CyclotomicPlan, primes: &[u64]) -> Vec<TableRow> {
    let (rows, skipped) = table(&TableSpec::quarter_rotation(plan), primes).expect("table rows");
    assert!(skipped.is_empty(), "{skipped:?}");
    rows
}

// ---------------------------------------------------------------- C4

fn c4_sweep(plan: &CyclotomicPlan) -> Outcome {
    let res = sweep(plan, 1009, 1, true, &MetricsOptions::default()).map_err(|e| e.to_string())?;
    let mut bad = Vec::new();
    if (res.min - 0.166092).abs() > TOL || res.argmin != [278, 732] {
        bad.push(format!("min {:.6} at {:?}", res.min, res.argmin));
    }
    if (res.max - 0.722886).abs() > TOL || res.argmax != [501, 509] {
        bad.push(format!("max {:.6} at {:?}", res.max, res.argmax));
    }
    let note = if res.max_overlay_gap < 0.12 { "within" } else { "outside (diagnostic only)" };
    if bad.is_empty() {
        Ok(format!(
            "min {:.6} at {:?}, max {:.6} at {:?}, overlay gap {:.4} {note} 0.12",
            res.min, res.argmin, res.max, res.argmax, res.max_overlay_gap
        ))
    } else {
        Err(bad.join("; "))
    }
}

// ---------------------------------------------------------------- C5

fn c5_cyclotomic_numbers() -> std::result::Result<usize, String> {
    let mut count = 0;
    for p in (3..=200u64).filter(|&p| is_prime(p)) {
        let ctx = FieldContext::new(p).map_err(|e| e.to_string())?;
        for n in divisors(p - 1) {
            let t = cyclotomic_numbers(&ctx, n as usize).map_err(|e| e.to_string())?;
            let q = (p - 1) / n;
            let n = n as i64;
            for k in 0..n {
                let col: u64 = (0..n).map(|j| t.get(j, k)).sum();
                let want = if k == 0 { q - 1 } else { q };
                if col != want {
                    return Err(format!("p={p} n={n}: column {k} sums to {col}"));
                }
                for j in 0..n {
                    if t.get(j, k) != t.get(-j, k - j) {
                        return Err(format!("p={p} n={n}: ({j},{k}) symmetry"));
                    }
                }
            }
            let diag: u64 = (0..n).map(|j| t.get(j, j)).sum();
            if diag != q - 1 || t.total() != p - 2 {
                return Err(format!("p={p} n={n}: diagonal {diag}, total {}", t.total()));
            }
            count += 1;
        }
    }
    Ok(count)
}

fn primes_one_mod(n: u64, count: usize) -> Vec<u64> {
    (2..).filter(|&p| is_prime(p) && (p - 1) % n == 0).take(count).collect()
}

fn c5_hadamard_sums() -> std::result::Result<usize, String> {
    let mut count = 0;
    for k in 1..=4 {
        let plan = walsh_plan(k).unwrap();
        let n = plan.n() as i64;
        for p in primes_one_mod(n as u64, 10) {
            let ctx = FieldContext::new(p).unwrap();
            let seqs = periodic_sequences(&ctx, &plan).unwrap();
            let spectra: Vec<_> = seqs.iter().map(|f| pcorr(f, f).unwrap()).collect();
            for s in 0..p as i64 {
                let sum: i64 = spectra.iter().map(|c| c.exact(s).unwrap()).sum();
                let want = if s == 0 { (n - 1) * (p as i64 - 1) } else { 1 - n };
                if sum != want {
                    return Err(format!("walsh:{k} p={p} s={s}: sum {sum}"));
                }
            }
            let got = pcdf(&seqs).unwrap().exact.ok_or("inexact PCDF")?;
            if got != Ratio::new(p as i128, p as i128 - 1) {
                return Err(format!("walsh:{k} p={p}: PCDF {got}"));
            }
            count += 1;
        }
    }
    Ok(count)
}

fn random_binary(rng: &mut ChaCha8Rng, len: usize) -> Vec<i8> {
    (0..len).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()
}

fn periodic(v: Vec<i8>) -> PeriodicSeq {
    PeriodicSeq::new(Entries::Int(v), Provenance::External).unwrap()
}

fn c5_autocorrelation_route(rng: &mut ChaCha8Rng) -> std::result::Result<usize, String> {
    for trial in 0..100 {
        let len = rng.gen_range(1..=64);
        let size = rng.gen_range(1..=6);
        let book: Vec<PeriodicSeq> = (0..size).map(|_| periodic(random_binary(rng, len))).collect();
        let mut lhs: i128 = 0;
        for f in &book {
            for g in &book {
                let c = pcorr(f, g).unwrap();
                lhs += (0..len as i64).map(|s| (c.exact(s).unwrap() as i128).pow(2)).sum::<i128>();
            }
        }
        let autos: Vec<_> = book.iter().map(|f| pcorr(f, f).unwrap()).collect();
        let rhs: i128 =
            (0..len as i64).map(|s| autos.iter().map(|c| c.exact(s).unwrap() as i128).sum::<i128>().pow(2)).sum();
        if lhs != rhs {
            return Err(format!("trial {trial}: {lhs} vs {rhs}"));
        }
    }
    Ok(100)
}

fn c5_folding(rng: &mut ChaCha8Rng) -> std::result::Result<usize, String> {
    for trial in 0..100 {
        let len = rng.gen_range(1..=64);
        let (a, b) = (random_binary(rng, len), random_binary(rng, len));
        let pc = pcorr(&periodic(a.clone()), &periodic(b.clone())).unwrap();
        let ac = acorr_direct(&AperiodicSeq::binary(a).unwrap(), &AperiodicSeq::binary(b).unwrap()).unwrap();
        let l = len as i64;
        for s in 0..l {
            let folded = ac.exact(s).unwrap() + if s == 0 { 0 } else { ac.exact(s - l).unwrap() };
            if pc.exact(s).unwrap() != folded {
                return Err(format!("trial {trial} s={s}"));
            }
        }
    }
    Ok(100)
}

fn c5_character_route(rng: &mut ChaCha8Rng) -> std::result::Result<usize, String> {
    let primes: Vec<u64> = (3..400).filter(|&p| is_prime(p)).collect();
    for trial in 0..50 {
        let p = primes[rng.gen_range(0..primes.len())];
        let ns: Vec<u64> = divisors(p - 1).into_iter().filter(|&n| n <= 24).collect();
        let n = ns[rng.gen_range(0..ns.len())] as usize;
        let d = if rng.gen::<bool>() {
            CyclotomicPattern::integer((0..n).map(|_| rng.gen_range(-1..=1)).collect()).unwrap()
        } else {
            let z = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            CyclotomicPattern::complex(z).unwrap()
        };
        let ctx = FieldContext::new(p).unwrap();
        let a = derive_periodic(&ctx, &d).unwrap();
        let b = derive_via_characters(&ctx, &d.character_pattern()).unwrap();
        if !a.entries().approx_eq(b.entries(), 1e-9) {
            return Err(format!("trial {trial}: p={p} n={n}"));
        }
    }
    Ok(50)
}

fn c5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_edc5);
    let tables = c5_cyclotomic_numbers()?;
    let hadamard = c5_hadamard_sums()?;
    let books = c5_autocorrelation_route(&mut rng)?;
    let folds = c5_folding(&mut rng)?;
    let chars = c5_character_route(&mut rng)?;
    Ok(format!(
        "{tables} cyclotomic tables, {hadamard} Walsh instances, {books} codebooks, {folds} folded pairs, {chars} character derivations"
    ))
}

// ---------------------------------------------------------------- C6

struct OracleTally {
    books: usize,
    pairs: usize,
    mismatches: Vec<String>,
    worst: f64,
}

impl OracleTally {
    fn new() -> Self {
        OracleTally { books: 0, pairs: 0, mismatches: Vec::new(), worst: 0.0 }
    }

    /// Every pair of `book` (including each sequence with itself) through
    /// both correlators.
    fn check(&mut self, label: &str, book: &Codebook) {
        if book.sequences().iter().any(|s| s.len() > 4096) {
            return;
        }
        self.books += 1;
        let seqs = book.sequences();
        for i in 0..seqs.len() {
            for j in i..seqs.len() {
                let direct = acorr_direct(&seqs[i], &seqs[j]).unwrap();
                let fast = acorr_fft(&seqs[i], &seqs[j], f64::INFINITY).unwrap();
                self.pairs += 1;
                self.worst = self.worst.max(fast.max_rounding_deviation());
                if direct.first_shift() != fast.first_shift() || direct.values() != fast.values() {
                    self.mismatches.push(format!("{label} ({i},{j})"));
                }
            }
        }
    }

    fn outcome(&self) -> Outcome {
        let detail = format!("{} codebooks, {} pairs, max deviation {:.1e}", self.books, self.pairs, self.worst);
        if self.mismatches.is_empty() && self.worst < 1e-5 {
            Ok(detail)
        } else {
            Err(format!("{detail}; mismatches: {:?}", &self.mismatches[..self.mismatches.len().min(5)]))
        }
    }
}

// ---------------------------------------------------------------- C7

fn c7(rows: &[&TableRow]) -> Outcome {
    let mut checked = 0;
    let mut worst_ratio: f64 = 0.0;
    for r in rows {
        let bound = r.guc_bound.ok_or(format!("p={}: no GUC bound", r.p))?;
        worst_ratio = worst_ratio.max(r.summary.guc / bound);
        if r.summary.guc > bound {
            return Err(format!("p={}: GUC {} > {bound:.3}", r.p, r.summary.guc));
        }
        checked += 1;
    }
    for k in 1..=4 {
        let plan = walsh_plan(k).unwrap();
        for p in primes_one_mod(plan.n() as u64, 10) {
            let ctx = FieldContext::new(p).unwrap();
            let inst = instantiate(&ctx, &plan, &RotationSpec::Fraction(0.25), true).unwrap();
            let m = cyclocode::correlation::metrics(&inst.codebook).unwrap();
            let reports = peak_bounds(&plan, p, true, Some(&m)).unwrap();
            for rep in &reports {
                if rep.satisfied == Some(false) {
                    return Err(format!("walsh:{k} p={p}: {} {:?} > {:.3}", rep.name, rep.measured, rep.bound));
                }
            }
            let guc = reports.iter().find(|b| b.name == "guc").ok_or("no GUC report")?;
            worst_ratio = worst_ratio.max(guc.measured.unwrap() / guc.bound);
            checked += 1;
        }
    }

    // decomposition residual for balanced pattern pairs
    let mut rng = ChaCha8Rng::seed_from_u64(0x000a_dac7);
    let plan = walsh_plan(3).unwrap();
    let mut residuals = 0;
    let mut worst_e: f64 = 0.0;
    for p in [97u64, 1009] {
        let ctx = FieldContext::new(p).unwrap();
        let seqs = periodic_sequences(&ctx, &plan).unwrap();
        let pats = plan.patterns();
        let shifts: Vec<(i64, i64)> = std::iter::once((p as i64 / 4, p as i64 / 4))
            .chain((0..3).map(|_| (rng.gen_range(0..p as i64), rng.gen_range(0..p as i64))))
            .collect();
        for a in 0..pats.len() {
            for b in a..pats.len() {
                let pc = pcorr(&seqs[a], &seqs[b]).unwrap();
                let e0 = |f: &PeriodicSeq| pcorr(f, f).unwrap().exact(0).unwrap() as f64;
                let energy = e0(&seqs[a]) * e0(&seqs[b]);
                let pair_pcdf = pc.sum_sq(None) / energy;
                for &(r, r2) in &shifts {
                    let (f, g) = (rotate(&seqs[a], r), rotate(&seqs[b], r2));
                    let ac = acorr_direct(&f, &g).unwrap();
                    let ef = acorr_direct(&f, &f).unwrap().get(0).re;
                    let eg = acorr_direct(&g, &g).unwrap().get(0).re;
                    let cdf = ac.sum_sq(None) / (ef * eg);
                    let res = cdf_decomposition_residual(&pats[a], &pats[b], p, r, r2, cdf, pair_pcdf)
                        .map_err(|e| e.to_string())?;
                    worst_e = worst_e.max(res.e.abs());
                    if !res.satisfied {
                        return Err(format!("p={p} pair ({a},{b}) r={r},{r2}: |E| {} > {}", res.e.abs(), res.bound));
                    }
                    residuals += 1;
                }
            }
        }
    }
    Ok(format!("{checked} instances (max GUC/bound {worst_ratio:.3}), {residuals} residuals (max |E| {worst_e:.4})"))
}

// ---------------------------------------------------------------- C8

fn c8(rows: &[&TableRow]) -> Outcome {
    let target = 1.0 / 6.0;
    let mut big = Vec::new();
    for r in rows {
        let gap = (r.summary.adjusted_df - target).abs();
        let envelope = 2.0 / (r.p as f64).sqrt();
        if gap > envelope {
            return Err(format!("p={}: |adjusted DF - 1/6| = {gap:.6} exceeds 2/sqrt(p) = {envelope:.6}", r.p));
        }
        if r.p >= 1 << 20 {
            if gap > 3e-3 {
                return Err(format!("p={}: adjusted DF {:.6} not within 3e-3 of 1/6", r.p, r.summary.adjusted_df));
            }
            big.push(format!("{}: {:.6}", r.p, r.summary.adjusted_df));
        }
    }
    if big.is_empty() {
        return Err("no row with p >= 2^20 was computed".into());
    }
    Ok(format!("{} rows inside 2/sqrt(p) of 1/6; {}", rows.len(), big.join(", ")))
}

// ---------------------------------------------------------------- C9

fn c9(fixture: &Fixture) -> Outcome {
    let options = MetricsOptions::default();
    let mut notes = Vec::new();
    for (name, prns) in [("standard PRNs 1-36", &DEFAULT_PRNS), ("fallback PRNs 1-37 without 34", &FALLBACK_PRNS)] {
        let cmp = compare_gps_with(prns, &options).map_err(|e| e.to_string())?;
        let mut bad = Vec::new();
        let mut worst: f64 = 0.0;
        for key in ["GPS", "WH", "GPS/WH", "GPS+WH"] {
            let row = cmp.row(key).ok_or(format!("missing row {key}"))?;
            let (b, w) = check_row(fixture, key, &compare_cells(row), None);
            bad.extend(b);
            worst = worst.max(w);
        }
        if bad.is_empty() {
            notes.push(format!("{name}: 4 rows, max deviation {worst:.1e}"));
            return Ok(notes.join("; "));
        }
        notes.push(format!("{name}: {}", bad.join("; ")));
    }
    Err(notes.join(" | "))
}

// ---------------------------------------------------------------- driver

struct Report {
    lines: Vec<String>,
    failed: usize,
}

impl Report {
    fn record(&mut self, id: &str, title: &str, started: Instant, outcome: Outcome) {
        let secs = started.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                self.failed += 1;
                ("FAIL", d)
            }
        };
        let line = format!("{id} {tag} {title}: {detail} [{secs:.1}s]");
        println!("{line}");
        self.lines.push(line);
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let long = args.iter().any(|a| a == "--ignored" || a == "--include-ignored");
    let mut report = Report { lines: Vec::new(), failed: 0 };
    let plan = walsh_plan(3).unwrap();
    let t12 = Fixture::load("table12.csv");
    let t34 = Fixture::load("table34.csv");
    let t56 = Fixture::load("table56.csv");
    let mut tally = OracleTally::new();

    let t = Instant::now();
    let rows1 = quarter_rows(&plan, &table1_primes());
    let first_columns = ["guc_over_sqrt_sdc", "psl_avg", "psl_min", "psl_max", "pcc_avg", "pcc_min", "pcc_max"];
    let rows1_ok = rows1.len() == 47;
    let c1 = check_table_rows(&t12, &rows1, Some(&first_columns)).and_then(|d| {
        if rows1_ok {
            Ok(d)
        } else {
            Err(format!("{} rows instead of 47", rows1.len()))
        }
    });
    report.record("C1", "Table 1 peak columns, 47 primes", t, c1);

    let t = Instant::now();
    let c2 = check_table_rows(
        &t12,
        &rows1,
        Some(&["adjusted_df", "adf_avg", "adf_min", "adf_max", "cdf_avg", "cdf_min", "cdf_max"]),
    );
    report.record("C2", "Table 2 demerit columns, 47 primes", t, c2);

    let t = Instant::now();
    let k_max = if long { 25 } else { 20 };
    let primes3 = table3_primes(4..=k_max).unwrap();
    let rows3 = quarter_rows(&plan, &primes3);
    let spot: Vec<TableRow> = rows3.iter().filter(|r| r.p <= 131113).cloned().collect();
    let c3 = check_table_rows(&t34, &spot, None);
    report.record("C3", "Table 3/4 rows k=4..17", t, c3);
    if long || rows3.len() > spot.len() {
        let t = Instant::now();
        let extra: Vec<TableRow> = rows3.iter().filter(|r| r.p > 131113).cloned().collect();
        let outcome = check_table_rows(&t34, &extra, None);
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => ("FAIL", d.clone()),
        };
        println!("C3+ {tag} Table 3/4 rows k=18..{k_max} (optional): {detail} [{:.1}s]", t.elapsed().as_secs_f64());
    }

    let t = Instant::now();
    report.record("C4", "rotation sweep at p=1009", t, c4_sweep(&plan));

    let t = Instant::now();
    report.record("C5", "exact identity suite", t, c5());

    let t = Instant::now();
    for p in table1_primes().into_iter().chain(primes3.iter().copied().filter(|&p| p <= 4096)) {
        let ctx = FieldContext::new(p).unwrap();
        for (rot, uni) in [(RotationSpec::Fraction(0.25), true), (RotationSpec::Uniform(0), false)] {
            let inst = instantiate(&ctx, &plan, &rot, uni).unwrap();
            tally.check(&format!("walsh:3@{p}"), &inst.codebook);
        }
    }
    for k in 1..=4 {
        let plan_k = walsh_plan(k).unwrap();
        for p in primes_one_mod(plan_k.n() as u64, 10) {
            let ctx = FieldContext::new(p).unwrap();
            let inst = instantiate(&ctx, &plan_k, &RotationSpec::Fraction(0.25), true).unwrap();
            tally.check(&format!("walsh:{k}@{p}"), &inst.codebook);
        }
    }
    let gps = gps_ca_codebook_with(&DEFAULT_PRNS).unwrap();
    tally.check("gps", &gps);
    tally.check("wh", &wh_comparison_codebook().unwrap());
    report.record("C6", "FFT against direct correlation", t, tally.outcome());

    let t = Instant::now();
    let hadamard: Vec<&TableRow> = rows1.iter().chain(&rows3).collect();
    report.record("C7", "peak and residual bounds", t, c7(&hadamard));

    let t = Instant::now();
    report.record("C8", "convergence of adjusted DF to 1/6", t, c8(&rows3.iter().collect::<Vec<_>>()));

    let t = Instant::now();
    report.record("C9", "GPS comparison (Tables 5/6)", t, c9(&t56));

    let mut summary = String::new();
    let _ = write!(summary, "{} criteria, {} failed", report.lines.len(), report.failed);
    println!("{summary}");
    if report.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
