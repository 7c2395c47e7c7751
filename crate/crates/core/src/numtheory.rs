//! Prime-field arithmetic: primality, primitive roots, cyclotomic classes and
//! cyclotomic numbers.
//!
//! All residues are carried as `u64`. Products go through `u128`, so every
//! modulus below 2^63 is safe; the public surface is limited to
//! [`MAX_MODULUS`].

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest modulus accepted by [`FieldContext`].
pub const MAX_MODULUS: u64 = 1 << 40;

/// Primes at or below this bound get a full discrete-log table on demand.
pub const DEFAULT_LOG_TABLE_CAP: u64 = 1 << 26;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin. The first twelve primes as witnesses are a
/// proven witness set for every 64-bit input.
pub fn is_prime(m: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if m < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if m.is_multiple_of(w) {
            return m == w;
        }
    }
    let s = (m - 1).trailing_zeros();
    let d = (m - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, m);
        if x == 1 || x == m - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, m);
            if x == m - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Least prime `p >= start` with `p ≡ 1 (mod n)`.
pub fn next_usable_prime(start: u64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidArgument("congruence modulus must be positive".into()));
    }
    let mut candidate = start.max(2);
    let rem = (candidate + n - 1) % n; // candidate - 1 mod n, without underflow
    if rem != 0 {
        candidate = candidate.checked_add(n - rem).ok_or(Error::Unsupported(start))?;
    }
    while candidate <= MAX_MODULUS {
        if is_prime(candidate) {
            return Ok(candidate);
        }
        candidate = candidate.checked_add(n).ok_or(Error::Unsupported(start))?;
    }
    Err(Error::Unsupported(start))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Brent's variant of Pollard's rho; returns a nontrivial factor of the odd
/// composite `m`.
fn pollard_rho(m: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, m) + c) % m;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), m);
        }
        if d != m {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization as `(prime, exponent)` pairs in increasing order.
pub fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    let mut primes = Vec::new();
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        while m.is_multiple_of(q) {
            primes.push(q);
            m /= q;
        }
    }
    let mut stack = vec![m];
    while let Some(x) = stack.pop() {
        if x == 1 {
            continue;
        }
        if is_prime(x) {
            primes.push(x);
            continue;
        }
        let d = pollard_rho(x);
        stack.push(d);
        stack.push(x / d);
    }
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    out
}

/// Smallest positive integer that generates the multiplicative group mod `p`.
pub fn least_primitive_root(p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Ok(1);
    }
    let factors = factorize(p - 1);
    (2..p).find(|&g| factors.iter().all(|&(q, _)| pow_mod(g, (p - 1) / q, p) != 1)).ok_or(Error::NotPrime(p))
}

/// An odd prime together with its least primitive root.
///
/// The discrete-log table is built lazily on first use and only when `p` is
/// at or below the configured cap; above it, class indices are found through
/// the order-`n` subgroup instead.
#[derive(Debug)]
pub struct FieldContext {
    p: u64,
    alpha: u64,
    log_table_cap: u64,
    log_table: OnceLock<Vec<u32>>,
}

impl Clone for FieldContext {
    fn clone(&self) -> Self {
        let log_table = OnceLock::new();
        if let Some(t) = self.log_table.get() {
            let _ = log_table.set(t.clone());
        }
        FieldContext { p: self.p, alpha: self.alpha, log_table_cap: self.log_table_cap, log_table }
    }
}

impl PartialEq for FieldContext {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl FieldContext {
    pub fn new(p: u64) -> Result<Self> {
        Self::with_log_table_cap(p, DEFAULT_LOG_TABLE_CAP)
    }

    pub fn with_log_table_cap(p: u64, cap: u64) -> Result<Self> {
        if p > MAX_MODULUS {
            return Err(Error::Unsupported(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p == 2 {
            return Err(Error::Unsupported(p));
        }
        let alpha = least_primitive_root(p)?;
        Ok(FieldContext { p, alpha, log_table_cap: cap, log_table: OnceLock::new() })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// The least primitive root.
    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    /// `alpha^k mod p`.
    pub fn power(&self, k: u64) -> u64 {
        pow_mod(self.alpha, k, self.p)
    }

    /// Iterates `(k, alpha^k)` for `k = 0..p-1`.
    pub fn generator_walk(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        let (p, alpha) = (self.p, self.alpha);
        (0..p - 1).scan(1u64, move |h, k| {
            let cur = *h;
            *h = mul_mod(cur, alpha, p);
            Some((k, cur))
        })
    }

    pub fn has_log_table(&self) -> bool {
        self.p <= self.log_table_cap
    }

    fn log_table(&self) -> Option<&[u32]> {
        if !self.has_log_table() {
            return None;
        }
        Some(self.log_table.get_or_init(|| {
            let mut table = vec![0u32; self.p as usize];
            for (k, h) in self.generator_walk() {
                table[h as usize] = k as u32;
            }
            table
        }))
    }

    /// Exponent `k` in `[0, p-1)` with `alpha^k = h`; `None` when the table is
    /// unavailable (p above the cap) or `h ≡ 0`.
    pub fn discrete_log(&self, h: u64) -> Option<u64> {
        let h = h % self.p;
        if h == 0 {
            return None;
        }
        self.log_table().map(|t| t[h as usize] as u64)
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n == 0 || !(self.p - 1).is_multiple_of(n as u64) {
            return Err(Error::IndexNotDivisor { n, p: self.p });
        }
        Ok(())
    }

    /// Cyclotomic class of `h` for index `n`, i.e. `log_alpha(h) mod n`.
    pub fn class_index(&self, n: usize, h: u64) -> Result<usize> {
        self.check_index(n)?;
        let h = h % self.p;
        if h == 0 {
            return Err(Error::ZeroResidue(h));
        }
        if let Some(k) = self.discrete_log(h) {
            return Ok((k % n as u64) as usize);
        }
        // h^((p-1)/n) lies in the order-n subgroup generated by
        // zeta = alpha^((p-1)/n); its exponent there is log(h) mod n.
        let m = (self.p - 1) / n as u64;
        let target = pow_mod(h, m, self.p);
        let zeta = pow_mod(self.alpha, m, self.p);
        let mut cur = 1u64;
        for j in 0..n {
            if cur == target {
                return Ok(j);
            }
            cur = mul_mod(cur, zeta, self.p);
        }
        unreachable!("alpha is primitive, so h^((p-1)/n) is a power of zeta")
    }

    /// Class index of every residue (entry 0 is unused and set to `u32::MAX`),
    /// in one generator walk.
    pub fn class_table(&self, n: usize) -> Result<Vec<u32>> {
        self.check_index(n)?;
        let mut table = vec![u32::MAX; self.p as usize];
        for (k, h) in self.generator_walk() {
            table[h as usize] = (k % n as u64) as u32;
        }
        Ok(table)
    }
}

/// Builds the context for the odd prime `p`.
pub fn field_context(p: u64) -> Result<FieldContext> {
    FieldContext::new(p)
}

pub fn cyclotomic_class_index(ctx: &FieldContext, n: usize, h: u64) -> Result<usize> {
    ctx.class_index(n, h)
}

/// The `n × n` table of cyclotomic numbers `(j, k)`: how many `b` in class
/// `j` have `1 + b` in class `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicNumberTable {
    p: u64,
    n: usize,
    entries: Vec<u64>,
}

impl CyclotomicNumberTable {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `(j, k)` with both indices read mod `n`.
    pub fn get(&self, j: i64, k: i64) -> u64 {
        let n = self.n as i64;
        let (j, k) = (j.rem_euclid(n) as usize, k.rem_euclid(n) as usize);
        self.entries[j * self.n + k]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.entries.chunks(self.n).map(<[u64]>::to_vec).collect()
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().sum()
    }
}

/// Cyclotomic numbers in O(p): classify every residue once, then count the
/// class pair of each `(h, h + 1)`.
pub fn cyclotomic_numbers(ctx: &FieldContext, n: usize) -> Result<CyclotomicNumberTable> {
    let classes = ctx.class_table(n)?;
    let mut entries = vec![0u64; n * n];
    // h runs over F_p^* minus {p - 1}, so that h + 1 stays nonzero.
    for h in 1..(ctx.p() - 1) as usize {
        let j = classes[h] as usize;
        let k = classes[h + 1] as usize;
        entries[j * n + k] += 1;
    }
    Ok(CyclotomicNumberTable { p: ctx.p(), n, entries })
}

/// Divisors of `m` in increasing order.
pub fn divisors(m: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (q, e) in factorize(m) {
        let len = out.len();
        let mut pw = 1;
        for _ in 0..e {
            pw *= q;
            for i in 0..len {
                out.push(out[i] * pw);
            }
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_is_prime(m: u64) -> bool {
        m >= 2 && (2..).take_while(|d| d * d <= m).all(|d| !m.is_multiple_of(d))
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(1009));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        assert!(is_prime(33554473));
        assert!(!is_prime(15));
        assert!(!is_prime(3215031751)); // strong pseudoprime to bases 2,3,5,7
        assert!(is_prime((1 << 61) - 1));
    }

    #[test]
    fn primality_matches_trial_division() {
        for m in 0..20_000 {
            assert_eq!(is_prime(m), trial_division_is_prime(m), "m = {m}");
        }
    }

    #[test]
    fn usable_primes() {
        assert_eq!(next_usable_prime(17, 8).unwrap(), 17);
        assert_eq!(next_usable_prime((1 << 20) + 1, 8).unwrap(), 1048601);
        assert_eq!(next_usable_prime(2, 1).unwrap(), 2);
        assert_eq!(next_usable_prime(18, 8).unwrap(), 41);
        assert!(next_usable_prime(MAX_MODULUS, 8).is_err());
    }

    #[test]
    fn factorization_roundtrip() {
        for m in [2u64, 12, 1008, 33554472, 1 << 40, 999_999_000_001 * 3] {
            let f = factorize(m);
            assert_eq!(f.iter().map(|&(q, e)| q.pow(e)).product::<u64>(), m);
            assert!(f.iter().all(|&(q, _)| is_prime(q)));
        }
    }

    fn order(g: u64, p: u64) -> u64 {
        let mut x = g % p;
        let mut k = 1;
        while x != 1 {
            x = x * g % p;
            k += 1;
        }
        k
    }

    #[test]
    fn least_primitive_roots_by_exhaustive_order() {
        assert_eq!(field_context(5).unwrap().alpha(), 2);
        assert_eq!(field_context(7).unwrap().alpha(), 3);
        assert_eq!(field_context(17).unwrap().alpha(), 3);
        for p in (3..2000).filter(|&p| trial_division_is_prime(p)) {
            let expected = (2..p).find(|&g| order(g, p) == p - 1).unwrap();
            assert_eq!(least_primitive_root(p).unwrap(), expected, "p = {p}");
        }
    }

    #[test]
    fn field_context_rejects_bad_moduli() {
        assert_eq!(field_context(15).unwrap_err(), Error::NotPrime(15));
        assert!(field_context(2).is_err());
    }

    #[test]
    fn class_index_examples() {
        let ctx = field_context(5).unwrap();
        assert_eq!(cyclotomic_class_index(&ctx, 2, 4).unwrap(), 0);
        assert_eq!(cyclotomic_class_index(&ctx, 2, 3).unwrap(), 1);
        for h in 1..5 {
            assert_eq!(cyclotomic_class_index(&ctx, 1, h).unwrap(), 0);
        }
        assert_eq!(cyclotomic_class_index(&ctx, 2, 0).unwrap_err(), Error::ZeroResidue(0));
        assert!(cyclotomic_class_index(&ctx, 3, 1).is_err());
    }

    #[test]
    fn subgroup_route_agrees_with_log_table() {
        for p in [17u64, 97, 1009, 7681] {
            let with = FieldContext::new(p).unwrap();
            let without = FieldContext::with_log_table_cap(p, 0).unwrap();
            assert!(!without.has_log_table());
            for n in divisors(p - 1).into_iter().filter(|&n| n <= 64) {
                for h in 1..p.min(400) {
                    assert_eq!(with.class_index(n as usize, h).unwrap(), without.class_index(n as usize, h).unwrap());
                }
            }
        }
    }

    #[test]
    fn discrete_log_inverts_power() {
        let ctx = field_context(1009).unwrap();
        for k in 0..1008 {
            assert_eq!(ctx.discrete_log(ctx.power(k)), Some(k));
        }
        assert_eq!(ctx.discrete_log(0), None);
    }

    /// Independent oracle: classify by repeated multiplication, then count
    /// every h in F_p^* \ {p-1}.
    fn brute_force_table(p: u64, n: usize) -> Vec<Vec<u64>> {
        let alpha = (2..p).find(|&g| order(g, p) == p - 1).unwrap();
        let class = |h: u64| -> usize {
            let mut x = 1;
            for k in 0..p - 1 {
                if x == h {
                    return (k % n as u64) as usize;
                }
                x = x * alpha % p;
            }
            unreachable!()
        };
        let mut t = vec![vec![0u64; n]; n];
        for h in 1..p - 1 {
            t[class(h)][class(h + 1)] += 1;
        }
        t
    }

    #[test]
    fn cyclotomic_number_examples() {
        let t = cyclotomic_numbers(&field_context(5).unwrap(), 2).unwrap();
        assert_eq!(t.rows(), vec![vec![0, 1], vec![1, 1]]);
        assert_eq!(t.total(), 3);
        let t = cyclotomic_numbers(&field_context(13).unwrap(), 1).unwrap();
        assert_eq!(t.rows(), vec![vec![11]]);
        assert!(cyclotomic_numbers(&field_context(13).unwrap(), 5).is_err());
    }

    #[test]
    fn cyclotomic_numbers_match_brute_force() {
        for p in (3..=200).filter(|&p| trial_division_is_prime(p)) {
            let ctx = field_context(p).unwrap();
            for n in divisors(p - 1) {
                let t = cyclotomic_numbers(&ctx, n as usize).unwrap();
                assert_eq!(t.rows(), brute_force_table(p, n as usize), "p = {p}, n = {n}");
            }
        }
    }
}
