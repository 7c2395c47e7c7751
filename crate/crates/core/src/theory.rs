//! Closed-form reference quantities: `Φ`, `Ξ`, limiting demerit factors, the
//! pair parameters `U` and `V`, and the character-sum peak bounds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::correlation::MetricsSummary;
use crate::error::{Error, Result};
use crate::plans::{CyclotomicPattern, CyclotomicPlan};

/// `Φ(x) = 2(x - 1/2)² - 1/6` on `[0, 1]`, extended with period 1.
pub fn phi(x: f64) -> f64 {
    let t = x - x.floor();
    2.0 * (t - 0.5) * (t - 0.5) - 1.0 / 6.0
}

/// `Ξ(x) = Φ(x) + 2/3`.
pub fn xi(x: f64) -> f64 {
    phi(x) + 2.0 / 3.0
}

fn check_index(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("plan index must be at least 2, got {n}")));
    }
    Ok(())
}

/// Limit of `CDF` for coherently `ρ`-rotated instances of a Hadamard plan of
/// index `n`: `1 + 1/(3(n-1)) + Φ(2ρ)/(n-1)`.
pub fn asymptotic_cdf(n: usize, rho: f64) -> Result<f64> {
    check_index(n)?;
    let m = (n - 1) as f64;
    Ok(1.0 + 1.0 / (3.0 * m) + phi(2.0 * rho) / m)
}

/// `(n - 1)(CDF - 1)` in the same limit, i.e. `1/3 + Φ(2ρ)`.
pub fn asymptotic_adjusted_df(n: usize, rho: f64) -> Result<f64> {
    check_index(n)?;
    Ok(1.0 / 3.0 + phi(2.0 * rho))
}

/// The smallest limiting `CDF`, `1 + 1/(6(n-1))`, reached at `ρ ∈ 1/4 + Z/2`.
pub fn minimum_asymptotic_cdf(n: usize) -> Result<f64> {
    check_index(n)?;
    Ok(1.0 + 1.0 / (6.0 * (n - 1) as f64))
}

/// Limit of `CDF` when pattern `d` is rotated by `ρ(d) p`, for primes with
/// `(p-1)/n ≡ σ (mod 2)`:
/// `1 + 1/(3(n-1)) + (n-1)⁻² Σ_{d,d'} V^{(σ)}_{d,d'} Φ(ρ(d) + ρ(d'))`.
pub fn asymptotic_cdf_per_pattern(plan: &CyclotomicPlan, rho: &[f64], sigma: u8) -> Result<f64> {
    if !plan.is_hadamard() {
        return Err(Error::InvalidPlan(format!("{} is not a Hadamard plan", plan.label())));
    }
    if rho.len() != plan.len() {
        return Err(Error::LengthMismatch { left: plan.len(), right: rho.len() });
    }
    let n = plan.n();
    check_index(n)?;
    let m = (n - 1) as f64;
    let mut total = 0.0;
    for (a, d) in plan.patterns().iter().enumerate() {
        for (b, e) in plan.patterns().iter().enumerate() {
            total += v_sigma(d, e, sigma)? * phi(rho[a] + rho[b]);
        }
    }
    Ok(1.0 + 1.0 / (3.0 * m) + total / (m * m))
}

/// The parity `σ = (p-1)/n mod 2` selecting `V^{(σ)}` at prime `p`.
pub fn sigma_for(p: u64, n: usize) -> Result<u8> {
    if n == 0 || !(p - 1).is_multiple_of(n as u64) {
        return Err(Error::IndexNotDivisor { n, p });
    }
    Ok((((p - 1) / n as u64) % 2) as u8)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairParams {
    pub u: f64,
    pub v: f64,
}

fn nonzero_pair(d: &CyclotomicPattern, e: &CyclotomicPattern) -> Result<()> {
    if d.n() != e.n() {
        return Err(Error::LengthMismatch { left: d.n(), right: e.n() });
    }
    if d.is_zero() || e.is_zero() {
        return Err(Error::InvalidPattern("pattern must be nonzero".into()));
    }
    Ok(())
}

/// `U = |⟨d, d'⟩|² / (‖d‖² ‖d'‖²)`.
pub fn u_param(d: &CyclotomicPattern, e: &CyclotomicPattern) -> Result<f64> {
    nonzero_pair(d, e)?;
    Ok(d.inner(e).norm_sqr() / (d.norm_sq() * e.norm_sq()))
}

/// `V^{(σ)} = |Σ_j d_j d'_{j+σn/2}|² / (‖d‖² ‖d'‖²)`; the half-period shift
/// is 0 when `n` is odd.
pub fn v_sigma(d: &CyclotomicPattern, e: &CyclotomicPattern, sigma: u8) -> Result<f64> {
    nonzero_pair(d, e)?;
    let n = d.n();
    let shift = if sigma % 2 == 1 && n.is_multiple_of(2) { n / 2 } else { 0 } as i64;
    let sum: num_complex::Complex64 = (0..n as i64).map(|j| d.value(j) * e.value(j + shift)).sum();
    Ok(sum.norm_sqr() / (d.norm_sq() * e.norm_sq()))
}

pub fn pair_params(d: &CyclotomicPattern, e: &CyclotomicPattern, sigma: u8) -> Result<PairParams> {
    Ok(PairParams { u: u_param(d, e)?, v: v_sigma(d, e, sigma)? })
}

/// `2√p + (4/π)√p ln(4p/π)`.
pub fn weil_term(p: u64) -> f64 {
    let p = p as f64;
    2.0 * p.sqrt() + 4.0 / PI * p.sqrt() * (4.0 * p / PI).ln()
}

/// Peak sidelobe bound for any rotation of the unimodularized Legendre
/// sequence of length `p`.
pub fn legendre_psl_bound(p: u64) -> f64 {
    2.0 + weil_term(p)
}

/// `‖d̂‖₁` and `‖d̂‖₂` of the character pattern of `d`.
pub fn character_norms(d: &CyclotomicPattern) -> (f64, f64) {
    let e = d.character_pattern();
    (e.norm_l1(), e.norm_l2())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub p: u64,
    pub n: usize,
    /// Patterns (plan positions) the bound refers to; empty for plan-wide bounds.
    pub patterns: Vec<usize>,
    /// `‖d̂‖₁` of each listed pattern (or the maximum, for plan-wide bounds).
    pub l1_norms: Vec<f64>,
    pub l2_norms: Vec<f64>,
    pub bound: f64,
    pub measured: Option<f64>,
    pub satisfied: Option<bool>,
}

impl BoundReport {
    fn with_measurement(mut self, measured: Option<f64>) -> Self {
        self.satisfied = measured.map(|m| m <= self.bound);
        self.measured = measured;
        self
    }
}

/// Every applicable peak bound for instances of `plan` at `p`: `PSL` for each
/// balanced pattern, `PCC` for each orthogonal pair with a balanced member,
/// and `GUC` when the whole plan is balanced and orthogonal. Unimodularized
/// instances add 2 to each bound. When `measured` is given (metrics of such
/// an instance), each report carries the measured value.
pub fn peak_bounds(
    plan: &CyclotomicPlan,
    p: u64,
    unimodularized: bool,
    measured: Option<&MetricsSummary>,
) -> Result<Vec<BoundReport>> {
    if !(p - 1).is_multiple_of(plan.n() as u64) {
        return Err(Error::IndexNotDivisor { n: plan.n(), p });
    }
    if unimodularized && !plan.flags().unimodular {
        return Err(Error::InvalidPlan("only unimodular plans can be unimodularized".into()));
    }
    let w = weil_term(p);
    let extra = if unimodularized { 2.0 } else { 0.0 };
    let norms: Vec<(f64, f64)> = plan.patterns().iter().map(character_norms).collect();
    let n = plan.n();

    // measured values keyed by plan position
    let position_of =
        |k: usize| -> Option<usize> { measured?.sequences.iter().position(|s| s.pattern_index == Some(k)) };
    let psl_of = |k: usize| position_of(k).map(|i| measured.unwrap().sequences[i].psl);
    let pcc_of = |a: usize, b: usize| -> Option<f64> {
        let (i, j) = (position_of(a)?, position_of(b)?);
        let (i, j) = (i.min(j), i.max(j));
        measured?.pairs.iter().find(|q| q.first == i && q.second == j).map(|q| q.pcc)
    };

    let mut out = Vec::new();
    for (k, d) in plan.patterns().iter().enumerate() {
        if d.is_balanced() {
            let (l1, l2) = norms[k];
            out.push(
                BoundReport {
                    name: "psl".into(),
                    p,
                    n,
                    patterns: vec![k],
                    l1_norms: vec![l1],
                    l2_norms: vec![l2],
                    bound: l1 * l1 * w + extra,
                    measured: None,
                    satisfied: None,
                }
                .with_measurement(psl_of(k)),
            );
        }
    }
    let pats = plan.patterns();
    for a in 0..pats.len() {
        for b in a + 1..pats.len() {
            if pats[a].is_orthogonal_to(&pats[b]) && (pats[a].is_balanced() || pats[b].is_balanced()) {
                out.push(
                    BoundReport {
                        name: "pcc".into(),
                        p,
                        n,
                        patterns: vec![a, b],
                        l1_norms: vec![norms[a].0, norms[b].0],
                        l2_norms: vec![norms[a].1, norms[b].1],
                        bound: norms[a].0 * norms[b].0 * w + extra,
                        measured: None,
                        satisfied: None,
                    }
                    .with_measurement(pcc_of(a, b)),
                );
            }
        }
    }
    let flags = plan.flags();
    if flags.balanced && flags.orthogonal && !plan.is_empty() {
        let (l1, l2) = norms.iter().copied().fold((0.0, 0.0), |acc, x| if x.0 > acc.0 { x } else { acc });
        out.push(
            BoundReport {
                name: "guc".into(),
                p,
                n,
                patterns: vec![],
                l1_norms: vec![l1],
                l2_norms: vec![l2],
                bound: l1 * l1 * w + extra,
                measured: None,
                satisfied: None,
            }
            .with_measurement(measured.map(|m| m.guc)),
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub u: f64,
    pub v: f64,
    /// `((p-1)/p) CDF - 1/3 - (2/3) PCDF - U Φ((r-r')/p) - V Φ((r+r')/p)`.
    pub e: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// Residual of the pair decomposition of `CDF(f°^{(r)}, g°^{(r')})`, where
/// `f°` and `g°` are the (not unimodularized) periodic sequences of length
/// `p` from balanced patterns `d` and `d'`, together with its bound
/// `192 W² √p (1 + ln p)³/(p-1) + (22p-4)/(3p(p-1))`,
/// `W = ‖d̂‖₁‖d̂'‖₁ / (‖d̂‖₂‖d̂'‖₂)`.
pub fn cdf_decomposition_residual(
    d: &CyclotomicPattern,
    e: &CyclotomicPattern,
    p: u64,
    r: i64,
    r_prime: i64,
    cdf: f64,
    pcdf: f64,
) -> Result<Residual> {
    if !d.is_balanced() || !e.is_balanced() {
        return Err(Error::InvalidPattern("decomposition needs balanced patterns".into()));
    }
    let sigma = sigma_for(p, d.n())?;
    let PairParams { u, v } = pair_params(d, e, sigma)?;
    let pf = p as f64;
    let value = (pf - 1.0) / pf * cdf
        - 1.0 / 3.0
        - 2.0 / 3.0 * pcdf
        - u * phi((r - r_prime) as f64 / pf)
        - v * phi((r + r_prime) as f64 / pf);
    let bound = residual_bound(d, e, p);
    Ok(Residual { u, v, e: value, bound, satisfied: value.abs() <= bound })
}

/// The bound on the residual of [`cdf_decomposition_residual`].
pub fn residual_bound(d: &CyclotomicPattern, e: &CyclotomicPattern, p: u64) -> f64 {
    let (a1, a2) = character_norms(d);
    let (b1, b2) = character_norms(e);
    let w = a1 * b1 / (a2 * b2);
    let pf = p as f64;
    192.0 * w * w * pf.sqrt() * (1.0 + pf.ln()).powi(3) / (pf - 1.0) + (22.0 * pf - 4.0) / (3.0 * pf * (pf - 1.0))
}
