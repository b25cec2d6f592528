//! Elementary multiplicative number theory over `u64`.
//!
//! Pointwise functions factor by trial division. [`SieveTable`] tabulates
//! φ, μ and smallest prime factors in bulk, and [`primes_in_window`] produces
//! the exact list of primes in `[q, 2q]` with a segmented sieve.

use crate::error::{domain, Error, Result};
use std::f64::consts::E;

/// Largest sieve limit accepted by [`SieveTable::new`].
pub const DEFAULT_SIEVE_CAP: u64 = 20_000_000;

/// Largest window base accepted by [`primes_in_window`].
pub const DEFAULT_WINDOW_CAP: u64 = 1_000_000_000;

const SEGMENT: u64 = 1 << 16;

/// Greatest common divisor. `gcd(0, 0)` is rejected.
pub fn gcd(a: u64, b: u64) -> Result<u64> {
    if a == 0 && b == 0 {
        return domain("gcd(0, 0) is undefined");
    }
    Ok(gcd_raw(a, b))
}

/// Greatest common divisor with the convention `gcd(0, 0) = 0`, for hot loops.
#[inline]
pub fn gcd_raw(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[inline]
pub(crate) fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Deterministic primality test by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Inverse of `v` modulo the prime `p`, in `[1, p - 1]`.
pub fn mod_inverse(v: i64, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return domain(format!("modulus {p} is not prime"));
    }
    mod_inverse_unchecked(v, p)
}

/// Inverse modulo `p` without the primality check; `gcd(v, p)` must be 1.
pub(crate) fn mod_inverse_unchecked(v: i64, p: u64) -> Result<u64> {
    let m = p as i128;
    let r = (v as i128).rem_euclid(m);
    if r == 0 {
        return domain(format!("{v} is divisible by {p}, no inverse"));
    }
    let (mut old_r, mut cur_r) = (r, m);
    let (mut old_s, mut cur_s) = (1i128, 0i128);
    while cur_r != 0 {
        let q = old_r / cur_r;
        (old_r, cur_r) = (cur_r, old_r - q * cur_r);
        (old_s, cur_s) = (cur_s, old_s - q * cur_s);
    }
    if old_r != 1 {
        return domain(format!("{v} is not invertible modulo {p}"));
    }
    Ok(old_s.rem_euclid(m) as u64)
}

/// Prime factorization `[(prime, exponent)]` in ascending prime order.
pub fn factorize(mut m: u64) -> Result<Vec<(u64, u32)>> {
    if m == 0 {
        return domain("cannot factor 0");
    }
    let mut out = Vec::new();
    let mut push = |p: u64, m: &mut u64| {
        let mut e = 0;
        while (*m).is_multiple_of(p) {
            *m /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut m);
    push(3, &mut m);
    let mut d = 5u64;
    while d.saturating_mul(d) <= m {
        push(d, &mut m);
        push(d + 2, &mut m);
        d += 6;
    }
    if m > 1 {
        out.push((m, 1));
    }
    Ok(out)
}

/// Euler's totient φ(r).
pub fn euler_phi(r: u64) -> Result<u64> {
    if r == 0 {
        return domain("phi(0) is undefined");
    }
    Ok(phi_from(&factorize(r)?))
}

fn phi_from(factors: &[(u64, u32)]) -> u64 {
    factors
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// Möbius function μ(d).
pub fn mobius(d: u64) -> Result<i8> {
    if d == 0 {
        return domain("mu(0) is undefined");
    }
    Ok(mobius_from(&factorize(d)?))
}

fn mobius_from(factors: &[(u64, u32)]) -> i8 {
    if factors.iter().any(|&(_, e)| e > 1) {
        0
    } else if factors.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Number of positive divisors τ(m).
pub fn tau(m: u64) -> Result<u64> {
    if m == 0 {
        return domain("tau(0) is undefined");
    }
    Ok(factorize(m)?.iter().map(|&(_, e)| e as u64 + 1).product())
}

/// Number of distinct prime divisors ω(m).
pub fn omega(m: u64) -> Result<u32> {
    if m == 0 {
        return domain("omega(0) is undefined");
    }
    Ok(factorize(m)?.len() as u32)
}

/// All positive divisors of `m`, ascending.
pub fn divisors(m: u64) -> Result<Vec<u64>> {
    if m == 0 {
        return domain("divisors(0) is undefined");
    }
    Ok(divisors_from(&factorize(m)?))
}

fn divisors_from(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut divs = vec![1u64];
    for &(p, e) in factors {
        let base = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..base {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// Hooley's Δ(m): the largest number of divisors of `m` in any interval `(u, e·u]`.
///
/// The maximum is attained with `u` just below a divisor `d` (window `[d, e·d)`)
/// or with `u = d` itself (window `(d, e·d]`); both are scanned.
pub fn hooley_delta(m: u64) -> Result<u64> {
    if m == 0 {
        return domain("Delta(0) is undefined");
    }
    Ok(hooley_from_divisors(&divisors(m)?))
}

fn hooley_from_divisors(divs: &[u64]) -> u64 {
    let below_e = |lo: u64, d: u64| (d as f64) < E * (lo as f64);
    let mut best = 0usize;
    let mut hi = 0usize;
    for (i, &d) in divs.iter().enumerate() {
        if hi < i {
            hi = i;
        }
        while hi < divs.len() && below_e(d, divs[hi]) {
            hi += 1;
        }
        // [d, e·d) holds divs[i..hi]; (d, e·d] holds divs[i+1..hi] (e·d is never an integer).
        best = best.max(hi - i).max(hi - i - 1);
    }
    best as u64
}

/// Bulk tables of φ, μ and smallest prime factors for `1 ≤ r ≤ limit`.
#[derive(Debug, Clone)]
pub struct SieveTable {
    limit: u64,
    phi: Vec<u64>,
    mu: Vec<i8>,
    spf: Vec<u32>,
    primes: Vec<u64>,
}

impl SieveTable {
    pub fn new(limit: u64) -> Result<SieveTable> {
        Self::with_cap(limit, DEFAULT_SIEVE_CAP)
    }

    /// Linear sieve up to `limit`, refusing limits above `cap`.
    pub fn with_cap(limit: u64, cap: u64) -> Result<SieveTable> {
        if limit == 0 {
            return domain("sieve limit must be positive");
        }
        if limit > cap || limit > u32::MAX as u64 {
            return Err(Error::Resource(format!(
                "sieve limit {limit} exceeds memory cap {cap}"
            )));
        }
        let n = limit as usize;
        let mut phi = vec![0u64; n + 1];
        let mut mu = vec![0i8; n + 1];
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u64> = Vec::new();
        phi[1] = 1;
        mu[1] = 1;
        spf[1] = 1;
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                phi[i] = i as u64 - 1;
                mu[i] = -1;
                primes.push(i as u64);
            }
            for &p in &primes {
                let p = p as usize;
                if p > spf[i] as usize || i * p > n {
                    break;
                }
                let ip = i * p;
                spf[ip] = p as u32;
                if i % p == 0 {
                    phi[ip] = phi[i] * p as u64;
                    mu[ip] = 0;
                } else {
                    phi[ip] = phi[i] * (p as u64 - 1);
                    mu[ip] = -mu[i];
                }
            }
        }
        Ok(SieveTable {
            limit,
            phi,
            mu,
            spf,
            primes,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn index(&self, r: u64) -> usize {
        assert!(
            r >= 1 && r <= self.limit,
            "index {r} outside sieve range 1..={}",
            self.limit
        );
        r as usize
    }

    pub fn phi(&self, r: u64) -> u64 {
        self.phi[self.index(r)]
    }

    pub fn mu(&self, r: u64) -> i8 {
        self.mu[self.index(r)]
    }

    pub fn smallest_prime_factor(&self, r: u64) -> u64 {
        self.spf[self.index(r)] as u64
    }

    /// φ(1), …, φ(limit).
    pub fn phi_values(&self) -> &[u64] {
        &self.phi[1..]
    }

    /// μ(1), …, μ(limit).
    pub fn mu_values(&self) -> &[i8] {
        &self.mu[1..]
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Factorization through the smallest-prime-factor table when `m ≤ limit`,
    /// otherwise trial division by the sieved primes.
    pub fn factorize(&self, mut m: u64) -> Result<Vec<(u64, u32)>> {
        if m == 0 {
            return domain("cannot factor 0");
        }
        let mut out: Vec<(u64, u32)> = Vec::new();
        if m > self.limit {
            for &p in &self.primes {
                if p.saturating_mul(p) > m {
                    break;
                }
                let mut e = 0;
                while m.is_multiple_of(p) {
                    m /= p;
                    e += 1;
                }
                if e > 0 {
                    out.push((p, e));
                }
                if m <= self.limit {
                    break;
                }
            }
            if m > self.limit {
                // Remaining cofactor has no prime factor below sqrt(m) among the sieved
                // primes; finish by plain trial division.
                out.extend(factorize(m)?);
                return Ok(out);
            }
        }
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            match out.last_mut() {
                Some(last) if last.0 == p => last.1 += e,
                _ => out.push((p, e)),
            }
        }
        Ok(out)
    }

    pub fn tau(&self, m: u64) -> Result<u64> {
        Ok(self.factorize(m)?.iter().map(|&(_, e)| e as u64 + 1).product())
    }

    pub fn hooley_delta(&self, m: u64) -> Result<u64> {
        Ok(hooley_from_divisors(&divisors_from(&self.factorize(m)?)))
    }

    /// Σ_{r ≤ h} φ(r)^k as an exact `u128`.
    pub fn totient_moment(&self, h: u64, k: u32) -> Result<u128> {
        let mut total: u128 = 0;
        for r in 1..=h {
            let term = (self.phi(r) as u128)
                .checked_pow(k)
                .ok_or_else(|| crate::error::overflow("totient moment"))?;
            total = total
                .checked_add(term)
                .ok_or_else(|| crate::error::overflow("totient moment"))?;
        }
        Ok(total)
    }
}

/// All primes `p` with `q ≤ p ≤ 2q`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeWindow {
    pub q: u64,
    pub primes: Vec<u64>,
}

pub fn primes_in_window(q: u64) -> Result<PrimeWindow> {
    primes_in_window_with_cap(q, DEFAULT_WINDOW_CAP)
}

/// Segmented sieve of Eratosthenes over `[q, 2q]`.
pub fn primes_in_window_with_cap(q: u64, cap: u64) -> Result<PrimeWindow> {
    if q < 2 {
        return domain("prime window base must be at least 2");
    }
    if q > cap {
        return Err(Error::Resource(format!(
            "prime window base {q} exceeds capacity {cap}"
        )));
    }
    let hi = 2 * q;
    let base = simple_sieve(isqrt(hi));
    let mut primes = Vec::new();
    let mut lo = q;
    while lo <= hi {
        let seg_hi = (lo + SEGMENT - 1).min(hi);
        let mut composite = vec![false; (seg_hi - lo + 1) as usize];
        for &p in &base {
            let start = (lo.div_ceil(p) * p).max(p * p);
            let mut x = start;
            while x <= seg_hi {
                composite[(x - lo) as usize] = true;
                x += p;
            }
        }
        primes.extend(
            composite
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| lo + i as u64)
                .filter(|&x| x >= 2),
        );
        lo = seg_hi + 1;
    }
    Ok(PrimeWindow { q, primes })
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut is_comp = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !is_comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                is_comp[j] = true;
                j += i;
            }
        }
    }
    out
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}
