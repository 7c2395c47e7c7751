//! Batch runs: multi-prime tables, rotation sweeps, and the GPS comparison.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::baseline::{gps_ca_codebook_with, wh_comparison_codebook, DEFAULT_PRNS};
use crate::correlation::{metrics_with, Aggregate, MetricsOptions, MetricsSummary};
use crate::error::{Error, Result};
use crate::io::{metrics_csv_header, metrics_csv_row};
use crate::numtheory::{is_prime, next_usable_prime, FieldContext};
use crate::plans::CyclotomicPlan;
use crate::sequences::{
    instantiate, periodic_sequences, rotate, unimodularize, Codebook, CodebookMeta, InstanceWarning, RotationSpec,
};
use crate::theory::{asymptotic_adjusted_df, peak_bounds};

/// Primes `p ≡ 1 (mod n)` in `lo..=hi`, ascending.
pub fn primes_in_range(lo: u64, hi: u64, n: u64) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    let mut start = lo;
    while start <= hi {
        let p = next_usable_prime(start, n)?;
        if p > hi {
            break;
        }
        out.push(p);
        start = p + 1;
    }
    Ok(out)
}

/// The 47 primes `p ≡ 1 (mod 8)` up to 1249.
pub fn table1_primes() -> Vec<u64> {
    primes_in_range(2, 1249, 8).expect("small range")
}

/// For each `k`, the least prime `p ≥ 2^k + 1` with `p ≡ 1 (mod 8)`.
pub fn table3_primes(ks: std::ops::RangeInclusive<u32>) -> Result<Vec<u64>> {
    ks.map(|k| next_usable_prime((1u64 << k) + 1, 8)).collect()
}

/// A metrics row for one prime, with optional theory columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub p: u64,
    pub summary: MetricsSummary,
    pub warnings: Vec<InstanceWarning>,
    /// Peak bound on `GUC` for the instance, when the plan admits one.
    pub guc_bound: Option<f64>,
    /// Limiting adjusted demerit factor for the rotation fraction `r/p`.
    pub limit_adjusted_df: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableSpec<'a> {
    pub plan: &'a CyclotomicPlan,
    pub rotation: RotationSpec,
    pub unimodularize: bool,
    pub options: MetricsOptions,
}

impl<'a> TableSpec<'a> {
    /// Unimodularized instances rotated by `⌊p/4⌋`, as in the tables.
    pub fn quarter_rotation(plan: &'a CyclotomicPlan) -> Self {
        TableSpec {
            plan,
            rotation: RotationSpec::Fraction(0.25),
            unimodularize: true,
            options: MetricsOptions::default(),
        }
    }
}

pub fn table_row(spec: &TableSpec<'_>, p: u64) -> Result<TableRow> {
    let ctx = FieldContext::new(p)?;
    let inst = instantiate(&ctx, spec.plan, &spec.rotation, spec.unimodularize)?;
    let summary = metrics_with(&inst.codebook, &spec.options)?;
    let guc_bound =
        peak_bounds(spec.plan, p, spec.unimodularize, None)?.into_iter().find(|b| b.name == "guc").map(|b| b.bound);
    let limit_adjusted_df = match &spec.rotation {
        RotationSpec::PerPattern(_) => None,
        rot if spec.plan.is_hadamard() => {
            Some(asymptotic_adjusted_df(spec.plan.n(), rot.advancement(p, 0)? as f64 / p as f64)?)
        }
        _ => None,
    };
    Ok(TableRow { p, summary, warnings: inst.warnings, guc_bound, limit_adjusted_df })
}

/// Rows for every prime that fits the plan; others are skipped with a note.
pub fn table(spec: &TableSpec<'_>, primes: &[u64]) -> Result<(Vec<TableRow>, Vec<String>)> {
    let n = spec.plan.n() as u64;
    let mut rows = Vec::with_capacity(primes.len());
    let mut skipped = Vec::new();
    for &p in primes {
        if !is_prime(p) {
            skipped.push(format!("{p} is not prime; skipped"));
        } else if (p - 1) % n != 0 {
            skipped.push(format!("{p} is not 1 mod {n}; skipped"));
        } else {
            rows.push(table_row(spec, p)?);
        }
    }
    Ok((rows, skipped))
}

pub fn table_csv(rows: &[TableRow], theory: bool) -> String {
    let mut out = metrics_csv_header("p");
    if theory {
        out.push_str(",guc_bound,limit_adjusted_df");
    }
    out.push('\n');
    for row in rows {
        out.push_str(&metrics_csv_row(&row.p.to_string(), &row.summary));
        if theory {
            let cell = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_default();
            write!(out, ",{},{}", cell(row.guc_bound), cell(row.limit_adjusted_df)).unwrap();
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub r: u64,
    pub adjusted_df: f64,
    /// `1/3 + Φ(2r/p)`.
    pub overlay: f64,
    #[serde(skip)]
    pub exact: Option<Ratio<i128>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub p: u64,
    pub points: Vec<SweepPoint>,
    pub min: f64,
    pub argmin: Vec<u64>,
    pub max: f64,
    pub argmax: Vec<u64>,
    /// Largest `|adjusted DF - overlay|` over the sweep.
    pub max_overlay_gap: f64,
}

fn compare_points(a: &SweepPoint, b: &SweepPoint) -> Ordering {
    match (&a.exact, &b.exact) {
        (Some(x), Some(y)) => x.cmp(y),
        _ => a.adjusted_df.partial_cmp(&b.adjusted_df).unwrap_or(Ordering::Equal),
    }
}

/// Adjusted demerit factor of the instance of `plan` at `p` for
/// `r = 0, stride, 2·stride, … < p`, all patterns advanced by the same `r`.
/// Ties for the extremes are decided exactly for integer sequences.
pub fn sweep(
    plan: &CyclotomicPlan,
    p: u64,
    stride: u64,
    unimodularized: bool,
    options: &MetricsOptions,
) -> Result<SweepResult> {
    if stride == 0 {
        return Err(Error::InvalidArgument("stride must be positive".into()));
    }
    let ctx = FieldContext::new(p)?;
    let mut periodic = periodic_sequences(&ctx, plan)?;
    if unimodularized {
        periodic = periodic.iter().map(|f| unimodularize(f, Complex64::new(1.0, 0.0))).collect::<Result<_>>()?;
    }
    let mut points = Vec::new();
    for r in (0..p).step_by(stride as usize) {
        let seqs = periodic.iter().map(|f| rotate(f, r as i64)).collect();
        let book = Codebook::new(seqs, CodebookMeta::external(format!("{}@{p}", plan.label())))?;
        let m = metrics_with(&book, options)?;
        points.push(SweepPoint {
            r,
            adjusted_df: m.adjusted_df,
            overlay: asymptotic_adjusted_df(2, r as f64 / p as f64)?,
            exact: m.exact_adjusted_df(),
        });
    }
    let lo = points.iter().min_by(|a, b| compare_points(a, b)).expect("nonempty sweep").clone();
    let hi = points.iter().max_by(|a, b| compare_points(a, b)).expect("nonempty sweep").clone();
    let argmin = points.iter().filter(|q| compare_points(q, &lo) == Ordering::Equal).map(|q| q.r).collect();
    let argmax = points.iter().filter(|q| compare_points(q, &hi) == Ordering::Equal).map(|q| q.r).collect();
    let max_overlay_gap = points.iter().map(|q| (q.adjusted_df - q.overlay).abs()).fold(0.0, f64::max);
    Ok(SweepResult { p, min: lo.adjusted_df, argmin, max: hi.adjusted_df, argmax, max_overlay_gap, points })
}

pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from("r,adjusted_df,overlay\n");
    for q in &result.points {
        writeln!(out, "{},{:.6},{:.6}", q.r, q.adjusted_df, q.overlay).unwrap();
    }
    out
}

/// One line of the comparison report; the cross block has pairwise columns only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub label: String,
    pub guc_over_sqrt_sdc: Option<f64>,
    pub psl: Option<Aggregate>,
    pub pcc: Option<Aggregate>,
    pub adjusted_df: Option<f64>,
    pub adf: Option<Aggregate>,
    pub cdf: Option<Aggregate>,
}

impl CompareRow {
    fn from_summary(label: &str, m: &MetricsSummary) -> Self {
        CompareRow {
            label: label.into(),
            guc_over_sqrt_sdc: Some(m.guc_over_sqrt_sdc),
            psl: Some(m.psl),
            pcc: m.pcc,
            adjusted_df: Some(m.adjusted_df),
            adf: Some(m.adf),
            cdf: m.cdf,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpsComparison {
    pub prns: Vec<u32>,
    pub rows: Vec<CompareRow>,
}

impl GpsComparison {
    pub fn row(&self, label: &str) -> Option<&CompareRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

/// GPS, WH, the GPS/WH cross block and the GPS+WH union.
pub fn compare_gps(options: &MetricsOptions) -> Result<GpsComparison> {
    compare_gps_with(&DEFAULT_PRNS, options)
}

pub fn compare_gps_with(prns: &[u32], options: &MetricsOptions) -> Result<GpsComparison> {
    let gps = gps_ca_codebook_with(prns)?;
    let wh = wh_comparison_codebook()?;
    let both = gps.union(&wh, "gps+wh");
    let split = gps.len();
    let m_gps = metrics_with(&gps, options)?;
    let m_wh = metrics_with(&wh, options)?;
    let m_both = metrics_with(&both, options)?;
    let (pcc, cdf) = m_both.pair_aggregates(|i, j| (i < split) != (j < split)).ok_or(Error::EmptyCodebook)?;
    let cross = CompareRow {
        label: "GPS/WH".into(),
        guc_over_sqrt_sdc: None,
        psl: None,
        pcc: Some(pcc),
        adjusted_df: None,
        adf: None,
        cdf: Some(cdf),
    };
    Ok(GpsComparison {
        prns: prns.to_vec(),
        rows: vec![
            CompareRow::from_summary("GPS", &m_gps),
            CompareRow::from_summary("WH", &m_wh),
            cross,
            CompareRow::from_summary("GPS+WH", &m_both),
        ],
    })
}

pub fn comparison_csv(cmp: &GpsComparison) -> String {
    let mut out = metrics_csv_header("codebook");
    out = out.trim_end_matches(",size").to_string();
    out.push('\n');
    let f6 = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_default();
    let peak = |a: Option<Aggregate>| match a {
        Some(a) => format!("{:.4},{:.0},{:.0}", a.avg, a.min, a.max),
        None => ",,".into(),
    };
    let df = |a: Option<Aggregate>| match a {
        Some(a) => format!("{:.6},{:.6},{:.6}", a.avg, a.min, a.max),
        None => ",,".into(),
    };
    for r in &cmp.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.label,
            f6(r.guc_over_sqrt_sdc),
            peak(r.psl),
            peak(r.pcc),
            f6(r.adjusted_df),
            df(r.adf),
            df(r.cdf)
        )
        .unwrap();
    }
    out
}
