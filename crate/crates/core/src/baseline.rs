//! Reference codebooks for comparison: m-sequences, the GPS C/A Gold family,
//! and the Walsh–Hadamard codebook it is compared against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::FieldContext;
use crate::plans::{plan_subset, walsh_plan};
use crate::sequences::{instantiate, AperiodicSeq, Codebook, CodebookMeta, Entries, Provenance, RotationSpec};

/// Linear feedback shift register producing `s_{t+m} = Σ_{i<m} c_i s_{t+i}`
/// over GF(2), where `taps` is the feedback polynomial `x^m + Σ c_i x^i` as a
/// bitmask (bit `i` is the coefficient of `x^i`) and bit `i` of `seed` is `s_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LfsrSpec {
    pub degree: u32,
    pub taps: u64,
    pub seed: u64,
}

impl LfsrSpec {
    pub fn new(degree: u32, taps: u64, seed: u64) -> Result<Self> {
        if degree == 0 || degree > 32 {
            return Err(Error::InvalidArgument(format!("degree must be in 1..=32, got {degree}")));
        }
        if taps >> degree != 1 {
            return Err(Error::InvalidArgument(format!("taps {taps:#b} do not describe a degree-{degree} polynomial")));
        }
        if taps & 1 == 0 {
            return Err(Error::InvalidArgument("feedback polynomial needs a constant term".into()));
        }
        if seed == 0 || seed >> degree != 0 {
            return Err(Error::InvalidArgument(format!("seed must be a nonzero {degree}-bit state")));
        }
        Ok(LfsrSpec { degree, taps, seed })
    }

    /// One full period of output bits, or `NotPrimitive` if the state walk
    /// does not have maximal length.
    pub fn bits(&self) -> Result<Vec<u8>> {
        let m = self.degree;
        let expected = (1u64 << m) - 1;
        let mask = expected;
        let feedback = self.taps & mask;
        let mut state = self.seed;
        let mut out = Vec::with_capacity(expected as usize);
        loop {
            out.push((state & 1) as u8);
            let next = ((state & feedback).count_ones() & 1) as u64;
            state = (state >> 1) | (next << (m - 1));
            if state == self.seed {
                break;
            }
            if out.len() as u64 > expected {
                break;
            }
        }
        let period = out.len() as u64;
        if period != expected {
            return Err(Error::NotPrimitive { period, expected });
        }
        Ok(out)
    }
}

/// Bit `b` becomes `(-1)^b`.
pub fn bits_to_chips(bits: &[u8]) -> Vec<i8> {
    bits.iter().map(|&b| if b & 1 == 0 { 1 } else { -1 }).collect()
}

/// The ±1 m-sequence of `spec`, of length `2^degree - 1`.
pub fn m_sequence(spec: &LfsrSpec) -> Result<AperiodicSeq> {
    let chips = bits_to_chips(&spec.bits()?);
    AperiodicSeq::new(Entries::Int(chips), 0, Provenance::MSequence { degree: spec.degree, taps: spec.taps })
}

pub const CA_LENGTH: usize = 1023;

/// G2 phase-select cells for PRN 1..=37.
pub const CA_PHASE_TAPS: [(u8, u8); 37] = [
    (2, 6),
    (3, 7),
    (4, 8),
    (5, 9),
    (1, 9),
    (2, 10),
    (1, 8),
    (2, 9),
    (3, 10),
    (2, 3),
    (3, 4),
    (5, 6),
    (6, 7),
    (7, 8),
    (8, 9),
    (9, 10),
    (1, 4),
    (2, 5),
    (3, 6),
    (4, 7),
    (5, 8),
    (6, 9),
    (1, 3),
    (4, 6),
    (5, 7),
    (6, 8),
    (7, 9),
    (8, 10),
    (1, 6),
    (2, 7),
    (3, 8),
    (4, 9),
    (5, 10),
    (4, 10),
    (1, 7),
    (2, 8),
    (4, 10),
];

/// PRNs making up the comparison codebook.
pub const DEFAULT_PRNS: [u32; 36] = [
    1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30, 31,
    32, 33, 34, 35, 36,
];

/// Alternate selection: PRN 1..=37 without 34 (its code repeats as PRN 37).
pub const FALLBACK_PRNS: [u32; 36] = [
    1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30, 31,
    32, 33, 35, 36, 37,
];

/// C/A code bits of one PRN: G1 = 1 + x³ + x¹⁰, G2 = 1 + x² + x³ + x⁶ + x⁸ +
/// C/A chips of `prn` as bits. G1 is `1 + x³ + x¹⁰`, G2 is
/// `1 + x² + x³ + x⁶ + x⁸ + x⁹ + x¹⁰`, both start all ones, and the G2 output
/// is the XOR of two phase-select cells.
pub fn ca_code_bits(prn: u32) -> Result<Vec<u8>> {
    if !(1..=37).contains(&prn) {
        return Err(Error::InvalidArgument(format!("PRN must be in 1..=37, got {prn}")));
    }
    let (s1, s2) = CA_PHASE_TAPS[prn as usize - 1];
    // cell i lives at index i-1
    let mut g1 = [1u8; 10];
    let mut g2 = [1u8; 10];
    let mut out = Vec::with_capacity(CA_LENGTH);
    for _ in 0..CA_LENGTH {
        let g2_out = g2[s1 as usize - 1] ^ g2[s2 as usize - 1];
        out.push(g1[9] ^ g2_out);
        let f1 = g1[2] ^ g1[9];
        let f2 = g2[1] ^ g2[2] ^ g2[5] ^ g2[7] ^ g2[8] ^ g2[9];
        g1.rotate_right(1);
        g2.rotate_right(1);
        g1[0] = f1;
        g2[0] = f2;
    }
    Ok(out)
}

pub fn ca_code(prn: u32) -> Result<AperiodicSeq> {
    AperiodicSeq::new(Entries::Int(bits_to_chips(&ca_code_bits(prn)?)), 0, Provenance::Gold { prn })
}

/// The 36-member C/A codebook over [`DEFAULT_PRNS`], unrotated.
pub fn gps_ca_codebook() -> Codebook {
    gps_ca_codebook_with(&DEFAULT_PRNS).expect("default PRNs are valid")
}

pub fn gps_ca_codebook_with(prns: &[u32]) -> Result<Codebook> {
    let seqs = prns.iter().map(|&prn| ca_code(prn)).collect::<Result<Vec<_>>>()?;
    Codebook::new(seqs, CodebookMeta::external("gps-ca"))
}

pub const WH_PRIME: u64 = 1153;
pub const WH_ROTATION: i64 = 288;

/// Walsh rows of `D_6` kept in the comparison codebook.
pub const WH_ROWS: [usize; 36] = [
    1, 2, 3, 4, 6, 8, 9, 12, 13, 16, 17, 18, 19, 21, 23, 24, 25, 27, 29, 31, 32, 34, 35, 36, 42, 43, 44, 46, 48, 50,
    51, 52, 58, 59, 60, 62,
];

/// 36 members of the unimodularized `D_6` instance at `p = 1153` rotated by 288.
pub fn wh_comparison_codebook() -> Result<Codebook> {
    let plan = plan_subset(&walsh_plan(6)?, &WH_ROWS)?;
    let ctx = FieldContext::new(WH_PRIME)?;
    let mut inst = instantiate(&ctx, &plan, &RotationSpec::Uniform(WH_ROTATION), true)?;
    debug_assert!(inst.warnings.is_empty());
    inst.codebook = Codebook::new(
        inst.codebook.sequences().to_vec(),
        CodebookMeta { label: "wh".into(), ..inst.codebook.meta().clone() },
    )?;
    Ok(inst.codebook)
}
