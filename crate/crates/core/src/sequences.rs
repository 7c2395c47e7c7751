//! Periodic sequences derived from cyclotomic patterns, their rotated
//! aperiodic windows, and codebooks.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::FieldContext;
use crate::plans::{CharacterPattern, CyclotomicPattern, CyclotomicPlan, PatternEntries, FLOAT_TOLERANCE};

/// Sequence values: exact small integers when the source is binary (or
/// otherwise integral), complex doubles otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum Entries {
    Int(Vec<i8>),
    Complex(Vec<Complex64>),
}

impl Entries {
    pub fn len(&self) -> usize {
        match self {
            Entries::Int(v) => v.len(),
            Entries::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, j: usize) -> Complex64 {
        match self {
            Entries::Int(v) => Complex64::new(v[j] as f64, 0.0),
            Entries::Complex(v) => v[j],
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            Entries::Int(v) => v.iter().map(|&x| Complex64::new(x as f64, 0.0)).collect(),
            Entries::Complex(v) => v.clone(),
        }
    }

    pub fn as_int(&self) -> Option<&[i8]> {
        match self {
            Entries::Int(v) => Some(v),
            Entries::Complex(_) => None,
        }
    }

    /// True when every entry is ±1.
    pub fn is_binary(&self) -> bool {
        self.as_int().is_some_and(|v| v.iter().all(|&x| x == 1 || x == -1))
    }

    pub fn norm_sq(&self) -> f64 {
        match self {
            Entries::Int(v) => v.iter().map(|&x| (x as i64 * x as i64) as f64).sum(),
            Entries::Complex(v) => v.iter().map(Complex64::norm_sqr).sum(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Entries::Int(v) => v.iter().all(|&x| x == 0),
            Entries::Complex(v) => v.iter().all(|z| z.norm_sqr() == 0.0),
        }
    }

    /// Entrywise comparison; integer entries compare exactly.
    pub fn approx_eq(&self, other: &Entries, tol: f64) -> bool {
        if self.len() != other.len() {
            return false;
        }
        match (self, other) {
            (Entries::Int(a), Entries::Int(b)) => a == b,
            _ => (0..self.len()).all(|j| (self.get(j) - other.get(j)).norm() <= tol),
        }
    }

    fn rotated(&self, r: usize) -> Entries {
        fn rot<T: Copy>(v: &[T], r: usize) -> Vec<T> {
            v[r..].iter().chain(&v[..r]).copied().collect()
        }
        match self {
            Entries::Int(v) => Entries::Int(rot(v, r)),
            Entries::Complex(v) => Entries::Complex(rot(v, r)),
        }
    }
}

/// Where a sequence came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Pattern { plan: String, index: usize, unimodularized: bool },
    Characters,
    Gold { prn: u32 },
    MSequence { degree: u32, taps: u64 },
    External,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSeq {
    entries: Entries,
    provenance: Provenance,
}

impl PeriodicSeq {
    pub fn new(entries: Entries, provenance: Provenance) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("sequence must be nonempty".into()));
        }
        Ok(PeriodicSeq { entries, provenance })
    }

    /// The period (the prime `p` for derived sequences).
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &Entries {
        &self.entries
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn is_unimodularized(&self) -> bool {
        matches!(self.provenance, Provenance::Pattern { unimodularized: true, .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AperiodicSeq {
    window: Entries,
    advancement: u64,
    provenance: Provenance,
}

impl AperiodicSeq {
    pub fn new(window: Entries, advancement: u64, provenance: Provenance) -> Result<Self> {
        if window.is_empty() {
            return Err(Error::InvalidArgument("sequence must be nonempty".into()));
        }
        Ok(AperiodicSeq { window, advancement, provenance })
    }

    /// A ±1 sequence given as `i8` values.
    pub fn binary(values: Vec<i8>) -> Result<Self> {
        if values.iter().any(|&x| x != 1 && x != -1) {
            return Err(Error::InvalidArgument("binary entries must be ±1".into()));
        }
        Self::new(Entries::Int(values), 0, Provenance::External)
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }

    pub fn window(&self) -> &Entries {
        &self.window
    }

    pub fn advancement(&self) -> u64 {
        self.advancement
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn pattern_index(&self) -> Option<usize> {
        match self.provenance {
            Provenance::Pattern { index, .. } => Some(index),
            _ => None,
        }
    }

    pub fn is_binary(&self) -> bool {
        self.window.is_binary()
    }
}

fn check_index(ctx: &FieldContext, n: usize) -> Result<()> {
    let p = ctx.p();
    if n == 0 || !(p - 1).is_multiple_of(n as u64) {
        return Err(Error::IndexNotDivisor { n, p });
    }
    Ok(())
}

/// `f_0 = 0` and `f_h = d_k` for `h` in the `k`-th cyclotomic class, filled
/// in by walking the powers of the primitive root.
pub fn derive_periodic(ctx: &FieldContext, pattern: &CyclotomicPattern) -> Result<PeriodicSeq> {
    derive_with_label(ctx, pattern, "custom", 0)
}

fn derive_with_label(ctx: &FieldContext, pattern: &CyclotomicPattern, plan: &str, index: usize) -> Result<PeriodicSeq> {
    let n = pattern.n();
    check_index(ctx, n)?;
    let p = ctx.p() as usize;
    let entries = match pattern.entries() {
        PatternEntries::Integer(d) => {
            let mut f = vec![0i8; p];
            for (k, h) in ctx.generator_walk() {
                f[h as usize] = d[k as usize % n];
            }
            Entries::Int(f)
        }
        _ => {
            let d = pattern.values();
            let mut f = vec![Complex64::new(0.0, 0.0); p];
            for (k, h) in ctx.generator_walk() {
                f[h as usize] = d[k as usize % n];
            }
            Entries::Complex(f)
        }
    };
    PeriodicSeq::new(entries, Provenance::Pattern { plan: plan.to_string(), index, unimodularized: false })
}

/// `f_h = Σ_j e_j χ^j(h)` where `χ(α^k) = exp(2πik/n)`: the same sequence as
/// [`derive_periodic`] on the inverse transform of `e`, computed
/// independently by character evaluation.
pub fn derive_via_characters(ctx: &FieldContext, e: &CharacterPattern) -> Result<PeriodicSeq> {
    let n = e.n();
    check_index(ctx, n)?;
    let p = ctx.p();
    let roots: Vec<Complex64> = (0..n).map(|t| Complex64::from_polar(1.0, 2.0 * PI * t as f64 / n as f64)).collect();
    let mut f = vec![Complex64::new(0.0, 0.0); p as usize];
    for h in 1..p {
        let k = ctx.class_index(n, h)?;
        f[h as usize] = e.entries().iter().enumerate().map(|(j, &ej)| ej * roots[j * k % n]).sum();
    }
    PeriodicSeq::new(Entries::Complex(f), Provenance::Characters)
}

/// Replaces entry 0 with the unimodular `fill`, leaving the rest untouched.
pub fn unimodularize(seq: &PeriodicSeq, fill: Complex64) -> Result<PeriodicSeq> {
    if (fill.norm() - 1.0).abs() > FLOAT_TOLERANCE {
        return Err(Error::InvalidArgument(format!("fill value {fill} is not unimodular")));
    }
    for j in 1..seq.len() {
        let m = seq.entries.get(j).norm();
        if (m - 1.0).abs() > FLOAT_TOLERANCE {
            return Err(Error::NotUnimodularizable { index: j, magnitude: m });
        }
    }
    let integral_fill = fill.im == 0.0 && (fill.re == 1.0 || fill.re == -1.0);
    let entries = match &seq.entries {
        Entries::Int(v) if integral_fill => {
            let mut v = v.clone();
            v[0] = fill.re as i8;
            Entries::Int(v)
        }
        other => {
            let mut v = other.to_complex();
            v[0] = fill;
            Entries::Complex(v)
        }
    };
    let provenance = match &seq.provenance {
        Provenance::Pattern { plan, index, .. } => {
            Provenance::Pattern { plan: plan.clone(), index: *index, unimodularized: true }
        }
        other => other.clone(),
    };
    Ok(PeriodicSeq { entries, provenance })
}

/// The window `f_r, f_{r+1}, …, f_{r+p-1}`; `r` is reduced mod `p`.
pub fn rotate(seq: &PeriodicSeq, r: i64) -> AperiodicSeq {
    let r = r.rem_euclid(seq.len() as i64) as usize;
    AperiodicSeq { window: seq.entries.rotated(r), advancement: r as u64, provenance: seq.provenance.clone() }
}

/// How far each sequence of an instance is advanced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum RotationSpec {
    Uniform(i64),
    /// `⌊ρp⌋` for the given `ρ`.
    Fraction(f64),
    /// One advancement per pattern, in plan order.
    PerPattern(Vec<i64>),
}

impl RotationSpec {
    /// Advancement for pattern `index` at length `p`.
    pub fn advancement(&self, p: u64, index: usize) -> Result<i64> {
        match self {
            RotationSpec::Uniform(r) => Ok(*r),
            RotationSpec::Fraction(rho) => {
                if !rho.is_finite() {
                    return Err(Error::InvalidArgument("rotation fraction must be finite".into()));
                }
                // nudge so that e.g. 0.29 * 100 lands on 29 rather than 28.999…
                Ok((rho * p as f64 + 1e-9).floor() as i64)
            }
            RotationSpec::PerPattern(rs) => rs
                .get(index)
                .copied()
                .ok_or_else(|| Error::InvalidArgument(format!("no advancement given for pattern {index}"))),
        }
    }
}

impl fmt::Display for RotationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RotationSpec::Uniform(r) => write!(f, "r={r}"),
            RotationSpec::Fraction(rho) => write!(f, "rho={rho}"),
            RotationSpec::PerPattern(rs) => {
                let parts: Vec<String> = rs.iter().map(ToString::to_string).collect();
                write!(f, "r=[{}]", parts.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookMeta {
    pub label: String,
    pub p: Option<u64>,
    pub n: Option<usize>,
    pub rotation: Option<RotationSpec>,
    pub unimodularized: bool,
}

impl CodebookMeta {
    pub fn external(label: impl Into<String>) -> Self {
        CodebookMeta { label: label.into(), p: None, n: None, rotation: None, unimodularized: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    sequences: Vec<AperiodicSeq>,
    meta: CodebookMeta,
}

impl Codebook {
    /// A codebook whose sequences all have the same length.
    pub fn new(sequences: Vec<AperiodicSeq>, meta: CodebookMeta) -> Result<Self> {
        if let Some(first) = sequences.first() {
            if let Some(bad) = sequences.iter().find(|s| s.len() != first.len()) {
                return Err(Error::LengthMismatch { left: first.len(), right: bad.len() });
            }
        }
        Ok(Codebook { sequences, meta })
    }

    /// A codebook whose members may differ in length, such as the union of
    /// two codebooks built at different lengths.
    pub fn mixed(sequences: Vec<AperiodicSeq>, meta: CodebookMeta) -> Self {
        Codebook { sequences, meta }
    }

    /// Members of `self` followed by members of `other`.
    pub fn union(&self, other: &Codebook, label: impl Into<String>) -> Codebook {
        let sequences = self.sequences.iter().chain(&other.sequences).cloned().collect();
        Codebook::mixed(sequences, CodebookMeta::external(label))
    }

    pub fn sequences(&self) -> &[AperiodicSeq] {
        &self.sequences
    }

    pub fn meta(&self) -> &CodebookMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    /// Common length, or `None` for an empty or mixed-length codebook.
    pub fn uniform_length(&self) -> Option<usize> {
        let first = self.sequences.first()?.len();
        self.sequences.iter().all(|s| s.len() == first).then_some(first)
    }

    pub fn is_binary(&self) -> bool {
        self.sequences.iter().all(AperiodicSeq::is_binary)
    }
}

/// Distinct patterns whose instances coincide (possible only for small `p`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstanceWarning {
    Collision { kept: usize, dropped: usize },
}

impl fmt::Display for InstanceWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceWarning::Collision { kept, dropped } => {
                write!(f, "patterns {kept} and {dropped} yield identical sequences; pattern {dropped} dropped")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub codebook: Codebook,
    pub warnings: Vec<InstanceWarning>,
}

/// The periodic sequences of every pattern in `plan`, in plan order.
pub fn periodic_sequences(ctx: &FieldContext, plan: &CyclotomicPlan) -> Result<Vec<PeriodicSeq>> {
    check_index(ctx, plan.n())?;
    plan.patterns().iter().enumerate().map(|(i, d)| derive_with_label(ctx, d, plan.label(), i)).collect()
}

/// A `p`-instance of `plan`, unimodularized with `+1` when requested.
pub fn instantiate(
    ctx: &FieldContext,
    plan: &CyclotomicPlan,
    rotation: &RotationSpec,
    unimodularize: bool,
) -> Result<Instance> {
    let fill = unimodularize.then_some(Complex64::new(1.0, 0.0));
    instantiate_with_fill(ctx, plan, rotation, fill)
}

pub fn instantiate_with_fill(
    ctx: &FieldContext,
    plan: &CyclotomicPlan,
    rotation: &RotationSpec,
    fill: Option<Complex64>,
) -> Result<Instance> {
    let p = ctx.p();
    if let RotationSpec::PerPattern(rs) = rotation {
        if rs.len() != plan.len() {
            return Err(Error::LengthMismatch { left: plan.len(), right: rs.len() });
        }
    }
    let periodic = periodic_sequences(ctx, plan)?;
    let mut sequences: Vec<AperiodicSeq> = Vec::with_capacity(periodic.len());
    let mut warnings = Vec::new();
    for (i, f) in periodic.iter().enumerate() {
        let f = match fill {
            Some(z) => crate::sequences::unimodularize(f, z)?,
            None => f.clone(),
        };
        let seq = rotate(&f, rotation.advancement(p, i)?);
        match sequences.iter().find(|s| s.window.approx_eq(&seq.window, FLOAT_TOLERANCE)) {
            Some(kept) => {
                warnings.push(InstanceWarning::Collision { kept: kept.pattern_index().unwrap_or(0), dropped: i })
            }
            None => sequences.push(seq),
        }
    }
    let meta = CodebookMeta {
        label: format!("{}@{p}", plan.label()),
        p: Some(p),
        n: Some(plan.n()),
        rotation: Some(rotation.clone()),
        unimodularized: fill.is_some(),
    };
    Ok(Instance { codebook: Codebook::new(sequences, meta)?, warnings })
}
