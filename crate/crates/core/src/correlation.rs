//! Aperiodic and periodic correlation spectra and codebook metrics.
//!
//! Integer-valued sequences correlate exactly: the direct kernels accumulate
//! in `i64`, and the FFT kernels round to the nearest integer while tracking
//! how far the floating-point result was from it.

use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::Fft;
use crate::numtheory::CyclotomicNumberTable;
use crate::plans::CyclotomicPattern;
use crate::sequences::{AperiodicSeq, Codebook, Entries, PeriodicSeq};

/// Largest tolerated distance between an FFT result and the nearest integer.
pub const DEFAULT_DEVIATION_THRESHOLD: f64 = 1e-5;

/// `Method::Auto` correlates directly up to this length and by FFT above it.
pub const AUTO_DIRECT_MAX_LEN: usize = 512;

pub const DEFAULT_TRANSFORM_CACHE_BYTES: usize = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    Aperiodic,
    Periodic,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumValues {
    Exact(Vec<i64>),
    Complex(Vec<Complex64>),
}

impl SpectrumValues {
    fn len(&self) -> usize {
        match self {
            SpectrumValues::Exact(v) => v.len(),
            SpectrumValues::Complex(v) => v.len(),
        }
    }

    fn at(&self, i: usize) -> Complex64 {
        match self {
            SpectrumValues::Exact(v) => Complex64::new(v[i] as f64, 0.0),
            SpectrumValues::Complex(v) => v[i],
        }
    }
}

/// Correlation values over a contiguous range of shifts starting at
/// `first_shift`; every other shift is zero (aperiodic) or wraps (periodic).
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSpectrum {
    kind: SpectrumKind,
    first_shift: i64,
    values: SpectrumValues,
    max_rounding_deviation: f64,
}

impl CorrelationSpectrum {
    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn first_shift(&self) -> i64 {
        self.first_shift
    }

    pub fn last_shift(&self) -> i64 {
        self.first_shift + self.values.len() as i64 - 1
    }

    pub fn shifts(&self) -> std::ops::RangeInclusive<i64> {
        self.first_shift..=self.last_shift()
    }

    pub fn values(&self) -> &SpectrumValues {
        &self.values
    }

    pub fn max_rounding_deviation(&self) -> f64 {
        self.max_rounding_deviation
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.values, SpectrumValues::Exact(_))
    }

    fn index(&self, s: i64) -> Option<usize> {
        let s = match self.kind {
            SpectrumKind::Aperiodic => s,
            SpectrumKind::Periodic => s.rem_euclid(self.values.len() as i64),
        };
        let i = s - self.first_shift;
        (0..self.values.len() as i64).contains(&i).then_some(i as usize)
    }

    pub fn get(&self, s: i64) -> Complex64 {
        self.index(s).map_or(Complex64::new(0.0, 0.0), |i| self.values.at(i))
    }

    /// Exact value at shift `s` for integer spectra.
    pub fn exact(&self, s: i64) -> Option<i64> {
        match &self.values {
            SpectrumValues::Exact(v) => Some(self.index(s).map_or(0, |i| v[i])),
            SpectrumValues::Complex(_) => None,
        }
    }

    /// Largest magnitude, optionally ignoring one shift.
    pub fn peak(&self, skip: Option<i64>) -> f64 {
        self.shifts().filter(|&s| Some(s) != skip).map(|s| self.get(s).norm()).fold(0.0, f64::max)
    }

    /// `Σ |value|²`, optionally ignoring one shift.
    pub fn sum_sq(&self, skip: Option<i64>) -> f64 {
        self.shifts().filter(|&s| Some(s) != skip).map(|s| self.get(s).norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Auto,
    Direct,
    Fft,
}

impl Method {
    fn use_fft(self, len: usize) -> bool {
        match self {
            Method::Auto => len > AUTO_DIRECT_MAX_LEN,
            Method::Direct => false,
            Method::Fft => true,
        }
    }
}

// Σ_j f_{j+s} conj(g_j) for s in -(lg-1)..=lf-1.
fn direct_aperiodic(f: &Entries, g: &Entries) -> SpectrumValues {
    let (lf, lg) = (f.len() as i64, g.len() as i64);
    let shifts = -(lg - 1)..=lf - 1;
    let range = |s: i64| (0.max(-s) as usize)..(lg.min(lf - s) as usize);
    match (f, g) {
        (Entries::Int(a), Entries::Int(b)) => SpectrumValues::Exact(
            shifts.map(|s| range(s).map(|j| a[(j as i64 + s) as usize] as i64 * b[j] as i64).sum()).collect(),
        ),
        _ => {
            let (a, b) = (f.to_complex(), g.to_complex());
            SpectrumValues::Complex(
                shifts.map(|s| range(s).map(|j| a[(j as i64 + s) as usize] * b[j].conj()).sum()).collect(),
            )
        }
    }
}

fn direct_periodic(f: &Entries, g: &Entries) -> SpectrumValues {
    let l = f.len();
    match (f, g) {
        (Entries::Int(a), Entries::Int(b)) => {
            SpectrumValues::Exact((0..l).map(|s| (0..l).map(|j| a[(j + s) % l] as i64 * b[j] as i64).sum()).collect())
        }
        _ => {
            let (a, b) = (f.to_complex(), g.to_complex());
            SpectrumValues::Complex((0..l).map(|s| (0..l).map(|j| a[(j + s) % l] * b[j].conj()).sum()).collect())
        }
    }
}

/// Zero-padded power-of-two transforms shared by every pair of a codebook.
struct Correlator {
    fft: Fft,
}

impl Correlator {
    fn for_lengths(max_len: usize) -> Self {
        Correlator { fft: Fft::new((2 * max_len - 1).next_power_of_two()) }
    }

    fn size(&self) -> usize {
        self.fft.len()
    }

    fn transform(&self, f: &Entries) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.size()];
        for (j, z) in buf.iter_mut().enumerate().take(f.len()) {
            *z = f.get(j);
        }
        self.fft.forward(&mut buf);
        buf
    }

    // AC_{f,g} from the transforms of f and g; negative shifts sit at L + s
    fn correlate(
        &self,
        fh: &[Complex64],
        gh: &[Complex64],
        lf: usize,
        lg: usize,
        integral: bool,
    ) -> (SpectrumValues, f64) {
        let l = self.size();
        let mut work: Vec<Complex64> = fh.iter().zip(gh).map(|(a, b)| a * b.conj()).collect();
        self.fft.inverse(&mut work);
        let scale = 1.0 / l as f64;
        let first = -(lg as i64 - 1);
        let count = lf + lg - 1;
        let value = |k: usize| work[(first + k as i64).rem_euclid(l as i64) as usize] * scale;
        round_values((0..count).map(value), count, integral)
    }
}

fn round_values(values: impl Iterator<Item = Complex64>, count: usize, integral: bool) -> (SpectrumValues, f64) {
    if integral {
        let mut dev: f64 = 0.0;
        let mut out = Vec::with_capacity(count);
        for z in values {
            let r = z.re.round();
            dev = dev.max((z.re - r).abs()).max(z.im.abs());
            out.push(r as i64);
        }
        (SpectrumValues::Exact(out), dev)
    } else {
        (SpectrumValues::Complex(values.collect()), 0.0)
    }
}

fn integral(f: &Entries) -> bool {
    matches!(f, Entries::Int(_))
}

fn check_threshold(deviation: f64, threshold: f64) -> Result<()> {
    if deviation > threshold {
        return Err(Error::Precision { deviation, threshold });
    }
    Ok(())
}

fn check_equal(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { left: a, right: b });
    }
    Ok(())
}

/// Aperiodic correlation of two sequences of any lengths, with shifts
/// `-(ℓ_g - 1)..=ℓ_f - 1`.
pub fn acorr(f: &AperiodicSeq, g: &AperiodicSeq, method: Method, threshold: f64) -> Result<CorrelationSpectrum> {
    let (a, b) = (f.window(), g.window());
    let first_shift = -(b.len() as i64 - 1);
    let (values, max_rounding_deviation) = if method.use_fft(a.len().max(b.len())) {
        let c = Correlator::for_lengths(a.len().max(b.len()));
        let out = c.correlate(&c.transform(a), &c.transform(b), a.len(), b.len(), integral(a) && integral(b));
        check_threshold(out.1, threshold)?;
        out
    } else {
        (direct_aperiodic(a, b), 0.0)
    };
    Ok(CorrelationSpectrum { kind: SpectrumKind::Aperiodic, first_shift, values, max_rounding_deviation })
}

/// `AC_{f,g}(s) = Σ_j f_{j+s} conj(g_j)` by the quadratic-time sum.
pub fn acorr_direct(f: &AperiodicSeq, g: &AperiodicSeq) -> Result<CorrelationSpectrum> {
    check_equal(f.len(), g.len())?;
    acorr(f, g, Method::Direct, f64::INFINITY)
}

/// Same spectrum as [`acorr_direct`] by zero-padded FFT.
pub fn acorr_fft(f: &AperiodicSeq, g: &AperiodicSeq, threshold: f64) -> Result<CorrelationSpectrum> {
    check_equal(f.len(), g.len())?;
    acorr(f, g, Method::Fft, threshold)
}

/// `PC_{f,g}(s) = Σ_{j mod ℓ} f_{j+s} conj(g_j)` for `s = 0..ℓ`.
pub fn pcorr(f: &PeriodicSeq, g: &PeriodicSeq) -> Result<CorrelationSpectrum> {
    check_equal(f.len(), g.len())?;
    Ok(CorrelationSpectrum {
        kind: SpectrumKind::Periodic,
        first_shift: 0,
        values: direct_periodic(f.entries(), g.entries()),
        max_rounding_deviation: 0.0,
    })
}

/// Same spectrum as [`pcorr`] by a length-ℓ transform.
pub fn pcorr_fft(f: &PeriodicSeq, g: &PeriodicSeq, threshold: f64) -> Result<CorrelationSpectrum> {
    check_equal(f.len(), g.len())?;
    let l = f.len();
    let fft = Fft::new(l);
    let mut fh = f.entries().to_complex();
    let mut gh = g.entries().to_complex();
    fft.forward(&mut fh);
    fft.forward(&mut gh);
    let mut work: Vec<Complex64> = fh.iter().zip(&gh).map(|(a, b)| a * b.conj()).collect();
    fft.inverse(&mut work);
    let scale = 1.0 / l as f64;
    let (values, dev) =
        round_values(work.into_iter().map(|z| z * scale), l, integral(f.entries()) && integral(g.entries()));
    check_threshold(dev, threshold)?;
    Ok(CorrelationSpectrum { kind: SpectrumKind::Periodic, first_shift: 0, values, max_rounding_deviation: dev })
}

fn pcorr_auto(f: &PeriodicSeq, g: &PeriodicSeq, method: Method, threshold: f64) -> Result<CorrelationSpectrum> {
    if method.use_fft(f.len()) {
        pcorr_fft(f, g, threshold)
    } else {
        pcorr(f, g)
    }
}

/// `PC_{f,g}(α^u) = Σ_{j,k} (k,j) d_{j+u} conj(d'_{k+u})` for the sequences
/// derived from `d` and `d'`, computed from cyclotomic numbers alone.
pub fn pcorr_via_cyclotomy(
    table: &CyclotomicNumberTable,
    d: &CyclotomicPattern,
    d_prime: &CyclotomicPattern,
    u: i64,
) -> Result<Complex64> {
    let n = table.n();
    for pat in [d, d_prime] {
        if pat.n() != n {
            return Err(Error::IndexNotDivisor { n: pat.n(), p: table.p() });
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n as i64 {
        for k in 0..n as i64 {
            let c = table.get(k, j);
            if c != 0 {
                acc += d.value(j + u) * d_prime.value(k + u).conj() * c as f64;
            }
        }
    }
    Ok(acc)
}

/// Periodic crosscorrelation demerit factor of a periodic codebook.
#[derive(Debug, Clone, PartialEq)]
pub struct Pcdf {
    pub value: f64,
    /// Exact value for integer-valued codebooks.
    pub exact: Option<Ratio<i128>>,
}

/// `PCDF(F) = |F|⁻² Σ_{f,g} Σ_s |PC_{f,g}(s)|² / (PC_{f,f}(0) PC_{g,g}(0))`.
///
/// When every `PC_{f,f}(0)` equals the same `C`, only autocorrelations are
/// needed: `PCDF(F) = 1 + |F|⁻² C⁻² Σ_{s≠0} |Σ_f PC_{f,f}(s)|²`.
pub fn pcdf(codebook: &[PeriodicSeq]) -> Result<Pcdf> {
    pcdf_with(codebook, Method::Auto, DEFAULT_DEVIATION_THRESHOLD)
}

pub fn pcdf_with(codebook: &[PeriodicSeq], method: Method, threshold: f64) -> Result<Pcdf> {
    let first = codebook.first().ok_or(Error::EmptyCodebook)?;
    for f in codebook {
        check_equal(first.len(), f.len())?;
        if f.entries().is_zero() {
            return Err(Error::ZeroSequence);
        }
    }
    let autos = codebook.iter().map(|f| pcorr_auto(f, f, method, threshold)).collect::<Result<Vec<_>>>()?;
    let exact = autos.iter().all(CorrelationSpectrum::is_exact);
    let n = codebook.len() as i128;
    let l = first.len() as i64;
    let energy0 = autos[0].get(0).re;
    if autos.iter().all(|a| a.get(0).re == energy0) {
        // autocorrelation-only route
        if exact {
            let c = autos[0].exact(0).unwrap_or(0) as i128;
            let tail: i128 = (1..l)
                .map(|s| {
                    let t: i128 = autos.iter().map(|a| a.exact(s).unwrap_or(0) as i128).sum();
                    t * t
                })
                .sum();
            let r = Ratio::from_integer(1) + Ratio::new(tail, n * n * c * c);
            return Ok(Pcdf { value: ratio_to_f64(&r), exact: Some(r) });
        }
        let tail: f64 = (1..l).map(|s| autos.iter().map(|a| a.get(s)).sum::<Complex64>().norm_sqr()).sum();
        return Ok(Pcdf { value: 1.0 + tail / ((n * n) as f64 * energy0 * energy0), exact: None });
    }
    let mut total = 0.0;
    let mut total_exact = Ratio::from_integer(0i128);
    for (i, f) in codebook.iter().enumerate() {
        for (j, g) in codebook.iter().enumerate() {
            let pc = if i == j { autos[i].clone() } else { pcorr_auto(f, g, method, threshold)? };
            let denom = autos[i].get(0).re * autos[j].get(0).re;
            total += pc.sum_sq(None) / denom;
            if exact {
                let s: i128 = (0..l).map(|s| (pc.exact(s).unwrap_or(0) as i128).pow(2)).sum();
                let d = autos[i].exact(0).unwrap_or(0) as i128 * autos[j].exact(0).unwrap_or(0) as i128;
                total_exact += Ratio::new(s, d);
            }
        }
    }
    let scale = (n * n) as f64;
    let exact = exact.then(|| total_exact / Ratio::from_integer(n * n));
    let value = exact.as_ref().map_or(total / scale, ratio_to_f64);
    Ok(Pcdf { value, exact })
}

/// `a / b` as a float without overflowing on large terms.
pub fn ratio_to_f64(r: &Ratio<i128>) -> f64 {
    let (n, d) = (*r.numer(), *r.denom());
    let q = n / d;
    q as f64 + (n - q * d) as f64 / d as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub avg: f64,
    pub min: f64,
    pub max: f64,
}

impl Aggregate {
    /// Summary of the values in iteration order; `None` when there are none.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let mut count = 0usize;
        let (mut sum, mut min, mut max) = (0.0, f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            count += 1;
            sum += v;
            min = min.min(v);
            max = max.max(v);
        }
        (count > 0).then(|| Aggregate { avg: sum / count as f64, min, max })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceMetrics {
    pub index: usize,
    /// Plan position of the generating pattern, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern_index: Option<usize>,
    pub length: usize,
    /// `AC_{f,f}(0)`.
    pub energy: f64,
    pub psl: f64,
    pub adf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairMetrics {
    pub first: usize,
    pub second: usize,
    pub pcc: f64,
    pub cdf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub label: String,
    pub size: usize,
    pub sequences: Vec<SequenceMetrics>,
    /// Distinct unordered pairs `(i, j)`, `i < j`, in lexicographic order.
    pub pairs: Vec<PairMetrics>,
    pub psl: Aggregate,
    pub adf: Aggregate,
    pub pcc: Option<Aggregate>,
    pub cdf: Option<Aggregate>,
    pub guc: f64,
    pub sdc: f64,
    pub guc_over_sqrt_sdc: f64,
    /// `CDF(F)`, averaged over all ordered pairs including `f = g`.
    pub codebook_cdf: f64,
    /// `|F| (CDF(F) - 1)`.
    pub adjusted_df: f64,
    /// `PCDF` of the underlying periodic codebook, for uniform-length codebooks.
    pub pcdf: Option<f64>,
    pub max_rounding_deviation: f64,
    pub method: Method,
    #[serde(skip)]
    pub exact_cdf: Option<Ratio<i128>>,
    #[serde(skip)]
    pub exact_pcdf: Option<Ratio<i128>>,
}

impl MetricsSummary {
    /// Exact `|F| (CDF(F) - 1)` for integer-valued codebooks.
    pub fn exact_adjusted_df(&self) -> Option<Ratio<i128>> {
        self.exact_cdf.map(|c| (c - Ratio::from_integer(1)) * Ratio::from_integer(self.size as i128))
    }

    /// PCC and CDF aggregates over the pairs accepted by `keep`.
    pub fn pair_aggregates(&self, keep: impl Fn(usize, usize) -> bool) -> Option<(Aggregate, Aggregate)> {
        let chosen: Vec<&PairMetrics> = self.pairs.iter().filter(|q| keep(q.first, q.second)).collect();
        Some((Aggregate::of(chosen.iter().map(|q| q.pcc))?, Aggregate::of(chosen.iter().map(|q| q.cdf))?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsOptions {
    pub method: Method,
    pub threshold: f64,
    pub parallel: bool,
    /// Bytes allowed for keeping every padded transform in memory; above
    /// this, transforms are recomputed per pair and pairs run one at a time.
    pub transform_cache_bytes: usize,
}

impl Default for MetricsOptions {
    fn default() -> Self {
        MetricsOptions {
            method: Method::Auto,
            threshold: DEFAULT_DEVIATION_THRESHOLD,
            parallel: true,
            transform_cache_bytes: DEFAULT_TRANSFORM_CACHE_BYTES,
        }
    }
}

// What a single (ordered) pair contributes.
#[derive(Debug, Clone)]
struct PairAccum {
    // peak over all shifts, except shift 0 for autocorrelations
    peak: f64,
    at_zero: f64,
    sum_sq: f64,
    exact_sum_sq: Option<i128>,
    periodic_sum_sq: Option<f64>,
    exact_periodic_sum_sq: Option<i128>,
    deviation: f64,
}

fn accumulate(
    values: &SpectrumValues,
    first_shift: i64,
    auto: bool,
    periodic_len: Option<usize>,
    deviation: f64,
) -> PairAccum {
    let zero = (-first_shift) as usize;
    let mut acc = PairAccum {
        peak: 0.0,
        at_zero: 0.0,
        sum_sq: 0.0,
        exact_sum_sq: None,
        periodic_sum_sq: None,
        exact_periodic_sum_sq: None,
        deviation,
    };
    // PC(s) = AC(s) + AC(s - ℓ) for s = 0..ℓ; index of AC(s) is zero + s
    let folded = |s: usize| -> Option<usize> {
        let l = periodic_len.unwrap_or(0);
        (s >= 1 && zero + s >= l).then(|| zero + s - l)
    };
    match values {
        SpectrumValues::Exact(v) => {
            let mut total: i128 = 0;
            let mut peak: i64 = 0;
            for (i, &x) in v.iter().enumerate() {
                total += x as i128 * x as i128;
                if !(auto && i == zero) {
                    peak = peak.max(x.abs());
                }
            }
            acc.peak = peak as f64;
            acc.at_zero = v.get(zero).copied().unwrap_or(0) as f64;
            acc.exact_sum_sq = Some(total);
            acc.sum_sq = total as f64;
            if let Some(l) = periodic_len {
                let mut ptotal: i128 = 0;
                for s in 0..l {
                    let a = v.get(zero + s).copied().unwrap_or(0) as i128;
                    let b = folded(s).and_then(|i| v.get(i)).copied().unwrap_or(0) as i128;
                    ptotal += (a + b) * (a + b);
                }
                acc.exact_periodic_sum_sq = Some(ptotal);
                acc.periodic_sum_sq = Some(ptotal as f64);
            }
        }
        SpectrumValues::Complex(v) => {
            for (i, z) in v.iter().enumerate() {
                acc.sum_sq += z.norm_sqr();
                if !(auto && i == zero) {
                    acc.peak = acc.peak.max(z.norm());
                }
            }
            acc.at_zero = v.get(zero).map_or(0.0, |z| z.re);
            if let Some(l) = periodic_len {
                let zero_c = Complex64::new(0.0, 0.0);
                let total = (0..l)
                    .map(|s| {
                        let a = v.get(zero + s).copied().unwrap_or(zero_c);
                        let b = folded(s).and_then(|i| v.get(i)).copied().unwrap_or(zero_c);
                        (a + b).norm_sqr()
                    })
                    .sum();
                acc.periodic_sum_sq = Some(total);
            }
        }
    }
    acc
}

/// Every peak and mean-square measure of a codebook.
pub fn metrics(codebook: &Codebook) -> Result<MetricsSummary> {
    metrics_with(codebook, &MetricsOptions::default())
}

pub fn metrics_with(codebook: &Codebook, options: &MetricsOptions) -> Result<MetricsSummary> {
    let seqs = codebook.sequences();
    if seqs.is_empty() {
        return Err(Error::EmptyCodebook);
    }
    if seqs.iter().any(|s| s.window().is_zero()) {
        return Err(Error::ZeroSequence);
    }
    let n = seqs.len();
    let max_len = seqs.iter().map(AperiodicSeq::len).max().unwrap_or(1);
    let uniform = codebook.uniform_length();
    let use_fft = options.method.use_fft(max_len);
    let correlator = use_fft.then(|| Correlator::for_lengths(max_len));
    let cached = correlator
        .as_ref()
        .is_some_and(|c| n.saturating_mul(c.size()).saturating_mul(16) <= options.transform_cache_bytes);
    let parallel = options.parallel && (cached || correlator.is_none());

    let transforms: Vec<Vec<Complex64>> = match &correlator {
        Some(c) if cached && parallel => seqs.par_iter().map(|s| c.transform(s.window())).collect(),
        Some(c) if cached => seqs.iter().map(|s| c.transform(s.window())).collect(),
        _ => Vec::new(),
    };

    // (i, j) with i <= j, autocorrelations first in each row
    let index_pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let compute = |&(i, j): &(usize, usize)| -> PairAccum {
        let (f, g) = (seqs[i].window(), seqs[j].window());
        let (values, dev) = match &correlator {
            Some(c) if cached => {
                c.correlate(&transforms[i], &transforms[j], f.len(), g.len(), integral(f) && integral(g))
            }
            Some(c) => {
                let fh = c.transform(f);
                let gh = if i == j { fh.clone() } else { c.transform(g) };
                c.correlate(&fh, &gh, f.len(), g.len(), integral(f) && integral(g))
            }
            None => (direct_aperiodic(f, g), 0.0),
        };
        accumulate(&values, -(g.len() as i64 - 1), i == j, uniform, dev)
    };
    let accums: Vec<PairAccum> = if parallel {
        index_pairs.par_iter().map(compute).collect()
    } else {
        index_pairs.iter().map(compute).collect()
    };

    let max_rounding_deviation = accums.iter().map(|a| a.deviation).fold(0.0, f64::max);
    check_threshold(max_rounding_deviation, options.threshold)?;

    let pos = |i: usize, j: usize| index_pairs.binary_search(&(i, j)).expect("pair index");
    let energy: Vec<f64> = (0..n).map(|i| accums[pos(i, i)].at_zero).collect();
    let exact_energy: Option<Vec<i128>> =
        accums.iter().all(|a| a.exact_sum_sq.is_some()).then(|| energy.iter().map(|&e| e as i128).collect());

    let sequences: Vec<SequenceMetrics> = (0..n)
        .map(|i| {
            let a = &accums[pos(i, i)];
            SequenceMetrics {
                index: i,
                pattern_index: seqs[i].pattern_index(),
                length: seqs[i].len(),
                energy: energy[i],
                psl: a.peak,
                adf: (a.sum_sq - energy[i] * energy[i]) / (energy[i] * energy[i]),
            }
        })
        .collect();
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for (k, &(i, j)) in index_pairs.iter().enumerate() {
        if i != j {
            let a = &accums[k];
            pairs.push(PairMetrics { first: i, second: j, pcc: a.peak, cdf: a.sum_sq / (energy[i] * energy[j]) });
        }
    }

    // CDF(F) over ordered pairs: diagonal once, each unordered pair twice
    let mut codebook_cdf = 0.0;
    let mut exact_cdf = exact_energy.as_ref().map(|_| Ratio::from_integer(0i128));
    let mut pcdf_total = uniform.map(|_| 0.0);
    let mut exact_pcdf = exact_energy.as_ref().and(uniform).map(|_| Ratio::from_integer(0i128));
    for (k, &(i, j)) in index_pairs.iter().enumerate() {
        let a = &accums[k];
        let weight = if i == j { 1.0 } else { 2.0 };
        codebook_cdf += weight * a.sum_sq / (energy[i] * energy[j]);
        if let (Some(total), Some(e)) = (exact_cdf.as_mut(), exact_energy.as_ref()) {
            *total += Ratio::new(weight as i128 * a.exact_sum_sq.unwrap_or(0), e[i] * e[j]);
        }
        if let (Some(total), Some(ps)) = (pcdf_total.as_mut(), a.periodic_sum_sq) {
            *total += weight * ps / (energy[i] * energy[j]);
        }
        if let (Some(total), Some(e), Some(ps)) = (exact_pcdf.as_mut(), exact_energy.as_ref(), a.exact_periodic_sum_sq)
        {
            *total += Ratio::new(weight as i128 * ps, e[i] * e[j]);
        }
    }
    let nn = (n * n) as f64;
    let exact_cdf = exact_cdf.map(|c| c / Ratio::from_integer((n * n) as i128));
    let exact_pcdf = exact_pcdf.map(|c| c / Ratio::from_integer((n * n) as i128));
    let codebook_cdf = exact_cdf.as_ref().map_or(codebook_cdf / nn, ratio_to_f64);
    let pcdf = exact_pcdf.as_ref().map(ratio_to_f64).or(pcdf_total.map(|t| t / nn));

    let psl = Aggregate::of(sequences.iter().map(|s| s.psl)).expect("nonempty");
    let adf = Aggregate::of(sequences.iter().map(|s| s.adf)).expect("nonempty");
    let pcc = Aggregate::of(pairs.iter().map(|q| q.pcc));
    let cdf = Aggregate::of(pairs.iter().map(|q| q.cdf));
    let guc = psl.max.max(pcc.map_or(0.0, |a| a.max));
    let sdc = energy.iter().copied().fold(f64::INFINITY, f64::min);
    let adjusted_df = match &exact_cdf {
        Some(c) => ratio_to_f64(&((c - Ratio::from_integer(1)) * Ratio::from_integer(n as i128))),
        None => n as f64 * (codebook_cdf - 1.0),
    };

    Ok(MetricsSummary {
        label: codebook.meta().label.clone(),
        size: n,
        sequences,
        pairs,
        psl,
        adf,
        pcc,
        cdf,
        guc,
        sdc,
        guc_over_sqrt_sdc: guc / sdc.sqrt(),
        codebook_cdf,
        adjusted_df,
        pcdf,
        max_rounding_deviation,
        method: if use_fft { Method::Fft } else { Method::Direct },
        exact_cdf,
        exact_pcdf,
    })
}
