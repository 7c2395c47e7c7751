//! Cyclotomic patterns and plans.
//!
//! A pattern of index `n` assigns one value to each of the `n` cyclotomic
//! classes; a plan is an ordered, duplicate-free list of patterns sharing an
//! index. Binary patterns are kept as `i8` so that balance and orthogonality
//! are decided exactly.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::Fft;

/// Tolerance for orthogonality, balance and unimodularity of floating-point
/// patterns.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// Largest Walsh-Hadamard order accepted.
pub const MAX_WALSH_ORDER: u32 = 16;

#[derive(Debug, Clone, PartialEq)]
pub enum PatternEntries {
    /// Small integer entries; binary patterns are the all-±1 case.
    Integer(Vec<i8>),
    /// Exponents `k` standing for `exp(2πik/m)`.
    MAry {
        m: u32,
        exponents: Vec<u32>,
    },
    Complex(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CyclotomicPattern {
    entries: PatternEntries,
}

fn root_of_unity(k: u64, m: u64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k % m) as f64 / m as f64)
}

impl CyclotomicPattern {
    pub fn integer(entries: Vec<i8>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidPattern("pattern must have at least one entry".into()));
        }
        Ok(CyclotomicPattern { entries: PatternEntries::Integer(entries) })
    }

    /// A ±1 pattern.
    pub fn binary(entries: Vec<i8>) -> Result<Self> {
        if let Some(bad) = entries.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::InvalidPattern(format!("binary entry {bad} is not ±1")));
        }
        Self::integer(entries)
    }

    /// An m-ary pattern; `m <= 2` is stored as an integer pattern.
    pub fn m_ary(m: u32, exponents: Vec<u32>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidPattern("alphabet size must be positive".into()));
        }
        if let Some(bad) = exponents.iter().find(|&&k| k >= m) {
            return Err(Error::InvalidPattern(format!("exponent {bad} not below m = {m}")));
        }
        if m <= 2 {
            return Self::integer(exponents.iter().map(|&k| if k == 0 { 1 } else { -1 }).collect());
        }
        if exponents.is_empty() {
            return Err(Error::InvalidPattern("pattern must have at least one entry".into()));
        }
        Ok(CyclotomicPattern { entries: PatternEntries::MAry { m, exponents } })
    }

    pub fn complex(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidPattern("pattern must have at least one entry".into()));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidPattern("non-finite entry".into()));
        }
        Ok(CyclotomicPattern { entries: PatternEntries::Complex(entries) })
    }

    pub fn entries(&self) -> &PatternEntries {
        &self.entries
    }

    /// The index `n`.
    pub fn n(&self) -> usize {
        match &self.entries {
            PatternEntries::Integer(v) => v.len(),
            PatternEntries::MAry { exponents, .. } => exponents.len(),
            PatternEntries::Complex(v) => v.len(),
        }
    }

    /// Entry `j`, read mod `n`.
    pub fn value(&self, j: i64) -> Complex64 {
        let j = j.rem_euclid(self.n() as i64) as usize;
        match &self.entries {
            PatternEntries::Integer(v) => Complex64::new(v[j] as f64, 0.0),
            PatternEntries::MAry { m, exponents } => root_of_unity(exponents[j] as u64, *m as u64),
            PatternEntries::Complex(v) => v[j],
        }
    }

    pub fn values(&self) -> Vec<Complex64> {
        (0..self.n() as i64).map(|j| self.value(j)).collect()
    }

    pub fn as_integer(&self) -> Option<&[i8]> {
        match &self.entries {
            PatternEntries::Integer(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_binary(&self) -> bool {
        self.as_integer().is_some_and(|v| v.iter().all(|&x| x == 1 || x == -1))
    }

    pub fn is_unimodular(&self) -> bool {
        match &self.entries {
            PatternEntries::Integer(v) => v.iter().all(|&x| x == 1 || x == -1),
            PatternEntries::MAry { .. } => true,
            PatternEntries::Complex(v) => v.iter().all(|z| (z.norm() - 1.0).abs() <= FLOAT_TOLERANCE),
        }
    }

    /// Alphabet size when every entry is an exact root of unity.
    pub fn m_arity(&self) -> Option<u32> {
        match &self.entries {
            PatternEntries::Integer(v) if v.iter().all(|&x| x == 1) => Some(1),
            PatternEntries::Integer(_) if self.is_binary() => Some(2),
            PatternEntries::MAry { m, .. } => Some(*m),
            _ => None,
        }
    }

    pub fn is_balanced(&self) -> bool {
        match &self.entries {
            PatternEntries::Integer(v) => v.iter().map(|&x| x as i64).sum::<i64>() == 0,
            _ => self.values().iter().sum::<Complex64>().norm() <= FLOAT_TOLERANCE,
        }
    }

    /// `⟨d, d'⟩ = Σ d_j conj(d'_j)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        if let (Some(a), Some(b)) = (self.as_integer(), other.as_integer()) {
            return Complex64::new(exact_inner(a, b) as f64, 0.0);
        }
        self.values().iter().zip(other.values()).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        match &self.entries {
            PatternEntries::Integer(v) => v.iter().map(|&x| (x as i64 * x as i64) as f64).sum(),
            PatternEntries::MAry { exponents, .. } => exponents.len() as f64,
            PatternEntries::Complex(v) => v.iter().map(Complex64::norm_sqr).sum(),
        }
    }

    pub fn is_orthogonal_to(&self, other: &Self) -> bool {
        if let (Some(a), Some(b)) = (self.as_integer(), other.as_integer()) {
            return exact_inner(a, b) == 0;
        }
        self.inner(other).norm() <= FLOAT_TOLERANCE
    }

    /// The character pattern `e = d̂`.
    pub fn character_pattern(&self) -> CharacterPattern {
        CharacterPattern { entries: dft(&self.values()) }
    }

    pub fn is_zero(&self) -> bool {
        self.values().iter().all(|z| z.norm() == 0.0)
    }
}

fn exact_inner(a: &[i8], b: &[i8]) -> i64 {
    a.iter().zip(b).map(|(&x, &y)| x as i64 * y as i64).sum()
}

/// A linear combination of multiplicative characters, indexed like a pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterPattern {
    entries: Vec<Complex64>,
}

impl CharacterPattern {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidPattern("character pattern must be nonempty".into()));
        }
        Ok(CharacterPattern { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// The cyclotomic pattern `ě` this character pattern corresponds to.
    pub fn cyclotomic_pattern(&self) -> CyclotomicPattern {
        CyclotomicPattern { entries: PatternEntries::Complex(idft(&self.entries)) }
    }

    pub fn norm_l1(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).sum()
    }

    pub fn norm_l2(&self) -> f64 {
        self.entries.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }
}

/// Forward transform with `1/ℓ` normalization:
/// `f̂_j = ℓ⁻¹ Σ_k exp(-2πijk/ℓ) f_k`.
pub fn dft(f: &[Complex64]) -> Vec<Complex64> {
    let mut buf = f.to_vec();
    Fft::new(buf.len()).forward(&mut buf);
    let scale = 1.0 / f.len().max(1) as f64;
    buf.iter_mut().for_each(|z| *z *= scale);
    buf
}

/// Unnormalized inverse: `f̌_j = Σ_k exp(2πijk/ℓ) f_k`.
pub fn idft(f: &[Complex64]) -> Vec<Complex64> {
    let mut buf = f.to_vec();
    Fft::new(buf.len()).inverse(&mut buf);
    buf
}

/// `H_k` by the Sylvester recursion `H_{k+1} = [H H; H -H]`.
pub fn walsh_hadamard_matrix(k: u32) -> Result<Vec<Vec<i8>>> {
    if k > MAX_WALSH_ORDER {
        return Err(Error::InvalidArgument(format!("Walsh-Hadamard order {k} exceeds {MAX_WALSH_ORDER}")));
    }
    let mut h = vec![vec![1i8]];
    for _ in 0..k {
        let size = h.len();
        let mut next = Vec::with_capacity(2 * size);
        for row in &h {
            next.push(row.iter().chain(row).copied().collect::<Vec<_>>());
        }
        for row in &h {
            next.push(row.iter().copied().chain(row.iter().map(|&x| -x)).collect());
        }
        debug_assert_eq!(next.len(), 2 * size);
        h = next;
    }
    Ok(h)
}

/// Row `i` of `H_k` without materializing the matrix:
/// `H_k[i][j] = (-1)^popcount(i & j)`.
pub fn walsh_row(k: u32, i: usize) -> Vec<i8> {
    (0..1usize << k).map(|j| if (i & j).count_ones().is_multiple_of(2) { 1 } else { -1 }).collect()
}

/// Structural properties of a plan, always computed from its patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanFlags {
    pub balanced: bool,
    pub orthogonal: bool,
    pub unimodular: bool,
    pub m_ary: Option<u32>,
    pub hadamard: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CyclotomicPlan {
    n: usize,
    patterns: Vec<CyclotomicPattern>,
    // Walsh row numbers, when the plan came from a Walsh-Hadamard matrix
    rows: Option<Vec<usize>>,
    label: String,
    flags: PlanFlags,
}

impl CyclotomicPlan {
    pub fn new(n: usize, patterns: Vec<CyclotomicPattern>) -> Result<Self> {
        Self::build(n, patterns, None, format!("custom:{n}"))
    }

    fn build(n: usize, patterns: Vec<CyclotomicPattern>, rows: Option<Vec<usize>>, label: String) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPlan("index must be positive".into()));
        }
        for (i, d) in patterns.iter().enumerate() {
            if d.n() != n {
                return Err(Error::InvalidPlan(format!("pattern {i} has index {} but the plan has index {n}", d.n())));
            }
            if let Some(j) = patterns[..i].iter().position(|e| e == d) {
                return Err(Error::InvalidPlan(format!("patterns {j} and {i} are identical")));
            }
        }
        let mut plan = CyclotomicPlan {
            n,
            patterns,
            rows,
            label,
            flags: PlanFlags { balanced: false, orthogonal: false, unimodular: false, m_ary: None, hadamard: false },
        };
        plan.flags = validate_plan(&plan);
        Ok(plan)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn patterns(&self) -> &[CyclotomicPattern] {
        &self.patterns
    }

    pub fn rows(&self) -> Option<&[usize]> {
        self.rows.as_deref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn flags(&self) -> PlanFlags {
        self.flags
    }

    pub fn is_hadamard(&self) -> bool {
        self.flags.hadamard
    }
}

/// The Walsh-Hadamard plan `D_k`: rows `1..2^k` of `H_k`, in row order.
pub fn walsh_plan(k: u32) -> Result<CyclotomicPlan> {
    if k == 0 || k > MAX_WALSH_ORDER {
        return Err(Error::InvalidArgument(format!("Walsh plan order must be in 1..={MAX_WALSH_ORDER}")));
    }
    let n = 1usize << k;
    let rows: Vec<usize> = (1..n).collect();
    let patterns = rows.iter().map(|&i| CyclotomicPattern::binary(walsh_row(k, i))).collect::<Result<Vec<_>>>()?;
    CyclotomicPlan::build(n, patterns, Some(rows), format!("walsh:{k}"))
}

/// Restricts a Walsh plan to the listed Walsh-Hadamard row numbers (row 0 is
/// the all-ones row, which no Walsh plan contains).
pub fn plan_subset(plan: &CyclotomicPlan, row_indices: &[usize]) -> Result<CyclotomicPlan> {
    let rows = plan.rows().ok_or_else(|| Error::InvalidPlan("plan has no Walsh row numbering".into()))?;
    let mut patterns = Vec::with_capacity(row_indices.len());
    for &r in row_indices {
        let pos = rows
            .iter()
            .position(|&x| x == r)
            .ok_or_else(|| Error::InvalidArgument(format!("row {r} is not part of plan {}", plan.label())))?;
        patterns.push(plan.patterns()[pos].clone());
    }
    let label =
        format!("{}[{}]", plan.label(), row_indices.iter().map(ToString::to_string).collect::<Vec<_>>().join(","));
    CyclotomicPlan::build(plan.n(), patterns, Some(row_indices.to_vec()), label)
}

pub fn validate_plan(plan: &CyclotomicPlan) -> PlanFlags {
    let patterns = plan.patterns();
    let balanced = patterns.iter().all(CyclotomicPattern::is_balanced);
    let unimodular = patterns.iter().all(CyclotomicPattern::is_unimodular);
    let orthogonal = patterns.iter().enumerate().all(|(i, d)| patterns[i + 1..].iter().all(|e| d.is_orthogonal_to(e)));
    let m_ary = patterns.iter().try_fold(1u32, |acc, d| {
        let m = d.m_arity()?;
        Some(lcm(acc, m))
    });
    let m_ary = if patterns.is_empty() { None } else { m_ary };
    let hadamard = unimodular && balanced && orthogonal && patterns.len() + 1 == plan.n();
    PlanFlags { balanced, orthogonal, unimodular, m_ary, hadamard }
}

fn lcm(a: u32, b: u32) -> u32 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

/// `Σ_{d ∈ D} d_j conj(d_k)`; for a Hadamard plan this is `n - 1` on the
/// diagonal and `-1` elsewhere.
pub fn hadamard_column_sums(plan: &CyclotomicPlan, j: i64, k: i64) -> Result<Complex64> {
    if !plan.is_hadamard() {
        return Err(Error::InvalidPlan(format!("{} is not a Hadamard plan", plan.label())));
    }
    Ok(plan.patterns().iter().map(|d| d.value(j) * d.value(k).conj()).sum())
}
