//! File formats: plans and codebooks as JSON, codebooks as `+`/`-` text,
//! correlation spectra, metric summaries and bound reports as CSV.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlation::{Aggregate, CorrelationSpectrum, MetricsSummary, SpectrumValues};
use crate::error::{Error, Result};
use crate::plans::{CyclotomicPattern, CyclotomicPlan, PatternEntries};
use crate::sequences::{AperiodicSeq, Codebook, CodebookMeta, Entries, Provenance, RotationSpec};
use crate::theory::BoundReport;

/// One entry of a pattern or sequence: an integer (±1 value, small integer
/// or root-of-unity exponent) or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryJson {
    Int(i64),
    Pair([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanJson {
    pub n: usize,
    /// Alphabet size for root-of-unity exponents; absent or 2 for integer entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub patterns: Vec<Vec<EntryJson>>,
}

fn fmt_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn small_int(v: i64) -> Result<i8> {
    i8::try_from(v).map_err(|_| fmt_err(format!("entry {v} does not fit a small integer")))
}

fn pattern_from_json(entries: &[EntryJson], m: Option<u32>) -> Result<CyclotomicPattern> {
    if entries.iter().any(|e| matches!(e, EntryJson::Pair(_))) {
        let values = entries
            .iter()
            .map(|e| match *e {
                EntryJson::Int(v) => Complex64::new(v as f64, 0.0),
                EntryJson::Pair([re, im]) => Complex64::new(re, im),
            })
            .collect();
        return CyclotomicPattern::complex(values);
    }
    let ints = entries.iter().map(|e| match *e {
        EntryJson::Int(v) => v,
        EntryJson::Pair(_) => unreachable!(),
    });
    match m {
        Some(m) if m > 2 => {
            let exps = ints
                .map(|v| u32::try_from(v).map_err(|_| fmt_err(format!("exponent {v} must be nonnegative"))))
                .collect::<Result<Vec<_>>>()?;
            CyclotomicPattern::m_ary(m, exps)
        }
        Some(2) => CyclotomicPattern::binary(ints.map(small_int).collect::<Result<_>>()?),
        _ => CyclotomicPattern::integer(ints.map(small_int).collect::<Result<_>>()?),
    }
}

pub fn plan_from_json(text: &str) -> Result<CyclotomicPlan> {
    let raw: PlanJson = serde_json::from_str(text).map_err(|e| fmt_err(format!("plan JSON: {e}")))?;
    let patterns = raw.patterns.iter().map(|row| pattern_from_json(row, raw.m)).collect::<Result<Vec<_>>>()?;
    let plan = CyclotomicPlan::new(raw.n, patterns)?;
    Ok(match raw.label {
        Some(label) => plan.with_label(label),
        None => plan,
    })
}

pub fn plan_to_json(plan: &CyclotomicPlan) -> Result<String> {
    let m = plan.flags().m_ary;
    let as_exponents =
        m.is_some_and(|m| m > 2) && plan.patterns().iter().all(|d| matches!(d.entries(), PatternEntries::MAry { .. }));
    let patterns = plan
        .patterns()
        .iter()
        .map(|d| match d.entries() {
            PatternEntries::Integer(v) => v.iter().map(|&x| EntryJson::Int(x as i64)).collect(),
            PatternEntries::MAry { exponents, .. } if as_exponents => {
                exponents.iter().map(|&k| EntryJson::Int(k as i64)).collect()
            }
            _ => d.values().iter().map(|z| EntryJson::Pair([z.re, z.im])).collect(),
        })
        .collect();
    let out = PlanJson {
        n: plan.n(),
        m: if as_exponents {
            m
        } else if plan.patterns().iter().all(CyclotomicPattern::is_binary) {
            Some(2)
        } else {
            None
        },
        label: Some(plan.label().to_string()),
        patterns,
    };
    Ok(serde_json::to_string_pretty(&out).expect("plan serializes"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern_index: Option<usize>,
    #[serde(default)]
    pub advancement: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    pub entries: Vec<EntryJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookJson {
    #[serde(default)]
    pub label: String,
    #[serde(default)]
    pub p: Option<u64>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub unimodularized: bool,
    #[serde(default)]
    pub rotation: Option<RotationSpec>,
    pub sequences: Vec<SequenceJson>,
}

fn entries_to_json(e: &Entries) -> Vec<EntryJson> {
    match e {
        Entries::Int(v) => v.iter().map(|&x| EntryJson::Int(x as i64)).collect(),
        Entries::Complex(v) => v.iter().map(|z| EntryJson::Pair([z.re, z.im])).collect(),
    }
}

fn entries_from_json(v: &[EntryJson]) -> Result<Entries> {
    if v.iter().all(|e| matches!(e, EntryJson::Int(_))) {
        let ints = v
            .iter()
            .map(|e| match *e {
                EntryJson::Int(x) => small_int(x),
                EntryJson::Pair(_) => unreachable!(),
            })
            .collect::<Result<_>>()?;
        return Ok(Entries::Int(ints));
    }
    Ok(Entries::Complex(
        v.iter()
            .map(|e| match *e {
                EntryJson::Int(x) => Complex64::new(x as f64, 0.0),
                EntryJson::Pair([re, im]) => Complex64::new(re, im),
            })
            .collect(),
    ))
}

pub fn codebook_to_json(codebook: &Codebook) -> String {
    let meta = codebook.meta();
    let out = CodebookJson {
        label: meta.label.clone(),
        p: meta.p,
        n: meta.n,
        unimodularized: meta.unimodularized,
        rotation: meta.rotation.clone(),
        sequences: codebook
            .sequences()
            .iter()
            .map(|s| SequenceJson {
                pattern_index: s.pattern_index(),
                advancement: s.advancement(),
                provenance: Some(s.provenance().clone()),
                entries: entries_to_json(s.window()),
            })
            .collect(),
    };
    // metadata pretty-printed, each sequence compact on its own line
    let serde_json::Value::Object(mut fields) = serde_json::to_value(&out).expect("codebook serializes") else {
        unreachable!()
    };
    let seqs = fields.remove("sequences").expect("sequences field");
    let mut text = String::from("{\n");
    for (k, v) in &fields {
        writeln!(text, "  {}: {},", serde_json::Value::from(k.as_str()), v).unwrap();
    }
    text.push_str("  \"sequences\": [");
    let rows: Vec<String> = seqs.as_array().expect("array").iter().map(|s| format!("\n    {s}")).collect();
    text.push_str(&rows.join(","));
    text.push_str("\n  ]\n}");
    text
}

pub fn codebook_from_json(text: &str) -> Result<Codebook> {
    let raw: CodebookJson = serde_json::from_str(text).map_err(|e| fmt_err(format!("codebook JSON: {e}")))?;
    let seqs = raw
        .sequences
        .iter()
        .map(|s| {
            let provenance = match (&s.provenance, s.pattern_index) {
                (Some(p), _) => p.clone(),
                (None, Some(index)) => {
                    Provenance::Pattern { plan: raw.label.clone(), index, unimodularized: raw.unimodularized }
                }
                (None, None) => Provenance::External,
            };
            AperiodicSeq::new(entries_from_json(&s.entries)?, s.advancement, provenance)
        })
        .collect::<Result<Vec<_>>>()?;
    let meta = CodebookMeta {
        label: raw.label,
        p: raw.p,
        n: raw.n,
        rotation: raw.rotation,
        unimodularized: raw.unimodularized,
    };
    Ok(match Codebook::new(seqs.clone(), meta.clone()) {
        Ok(book) => book,
        Err(_) => Codebook::mixed(seqs, meta),
    })
}

/// One line per sequence with `+`, `-` and `0` for the entries 1, -1, 0;
/// lines starting with `#` are comments.
pub fn codebook_to_text(codebook: &Codebook) -> Result<String> {
    let mut out = format!("# {}\n", codebook.meta().label);
    for (i, s) in codebook.sequences().iter().enumerate() {
        let ints = s.window().as_int().ok_or_else(|| fmt_err(format!("sequence {i} is not integer valued")))?;
        for &x in ints {
            out.push(match x {
                1 => '+',
                -1 => '-',
                0 => '0',
                other => return Err(fmt_err(format!("sequence {i} has entry {other}"))),
            });
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn codebook_from_text(text: &str) -> Result<Codebook> {
    let mut label = String::from("text");
    let mut seqs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('#') {
            if seqs.is_empty() && lineno == 0 && !rest.trim().is_empty() {
                label = rest.trim().to_string();
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let values = line
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                '0' => Ok(0),
                other => Err(fmt_err(format!("line {}: unexpected character {other:?}", lineno + 1))),
            })
            .collect::<Result<Vec<i8>>>()?;
        seqs.push(AperiodicSeq::new(Entries::Int(values), 0, Provenance::External)?);
    }
    let meta = CodebookMeta::external(label);
    Ok(match Codebook::new(seqs.clone(), meta.clone()) {
        Ok(book) => book,
        Err(_) => Codebook::mixed(seqs, meta),
    })
}

/// `shift,re` for integer spectra, `shift,re,im` otherwise.
pub fn spectrum_csv(spectrum: &CorrelationSpectrum) -> String {
    let mut out = String::new();
    match spectrum.values() {
        SpectrumValues::Exact(v) => {
            out.push_str("shift,re\n");
            for (s, x) in spectrum.shifts().zip(v) {
                writeln!(out, "{s},{x}").unwrap();
            }
        }
        SpectrumValues::Complex(v) => {
            out.push_str("shift,re,im\n");
            for (s, z) in spectrum.shifts().zip(v) {
                writeln!(out, "{s},{},{}", z.re, z.im).unwrap();
            }
        }
    }
    out
}

/// Metric columns following the key column of a metrics CSV.
pub const METRICS_COLUMNS: [&str; 15] = [
    "guc_over_sqrt_sdc",
    "psl_avg",
    "psl_min",
    "psl_max",
    "pcc_avg",
    "pcc_min",
    "pcc_max",
    "adjusted_df",
    "adf_avg",
    "adf_min",
    "adf_max",
    "cdf_avg",
    "cdf_min",
    "cdf_max",
    "size",
];

pub fn metrics_csv_header(key: &str) -> String {
    format!("{key},{}", METRICS_COLUMNS.join(","))
}

fn peak_cells(a: Option<&Aggregate>) -> [String; 3] {
    match a {
        Some(a) => [format!("{:.4}", a.avg), format!("{:.0}", a.min), format!("{:.0}", a.max)],
        None => Default::default(),
    }
}

fn df_cells(a: Option<&Aggregate>) -> [String; 3] {
    match a {
        Some(a) => [format!("{:.6}", a.avg), format!("{:.6}", a.min), format!("{:.6}", a.max)],
        None => Default::default(),
    }
}

/// One CSV row: ratios and demerit factors to 6 places, averages of peak
/// values to 4 places, peak extrema as integers; pairwise cells are empty
/// for single-sequence codebooks.
pub fn metrics_csv_row(key: &str, m: &MetricsSummary) -> String {
    let mut cells = vec![key.to_string(), format!("{:.6}", m.guc_over_sqrt_sdc)];
    cells.extend(peak_cells(Some(&m.psl)));
    cells.extend(peak_cells(m.pcc.as_ref()));
    cells.push(format!("{:.6}", m.adjusted_df));
    cells.extend(df_cells(Some(&m.adf)));
    cells.extend(df_cells(m.cdf.as_ref()));
    cells.push(m.size.to_string());
    cells.join(",")
}

pub fn metrics_json(m: &MetricsSummary) -> String {
    serde_json::to_string_pretty(m).expect("metrics serialize")
}

pub const BOUND_COLUMNS: [&str; 9] =
    ["name", "p", "n", "patterns", "l1_norms", "l2_norms", "bound", "measured", "satisfied"];

pub fn bounds_csv(reports: &[BoundReport]) -> String {
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(";");
    let mut out = BOUND_COLUMNS.join(",");
    out.push('\n');
    for r in reports {
        let pats: Vec<String> = r.patterns.iter().map(ToString::to_string).collect();
        writeln!(
            out,
            "{},{},{},{},{},{},{:.6},{},{}",
            r.name,
            r.p,
            r.n,
            pats.join(";"),
            join(&r.l1_norms),
            join(&r.l2_norms),
            r.bound,
            r.measured.map(|m| format!("{m:.6}")).unwrap_or_default(),
            r.satisfied.map(|s| s.to_string()).unwrap_or_default(),
        )
        .unwrap();
    }
    out
}

pub fn bounds_json(reports: &[BoundReport]) -> String {
    serde_json::to_string_pretty(reports).expect("bounds serialize")
}
