//! Ratio exponential sums `Σ e_p(a v / u)` over convex lattice domains, their
//! moments over prime windows, and the modular congruence count `M_n` with
//! its orthogonality expansion.
//!
//! All floating-point sums run in a fixed order (primes ascending, then `u`,
//! then `v`), so results are reproducible to the bit for a given input.

use crate::arith::{is_prime, mod_inverse_unchecked, primes_in_window};
use crate::counting::{box_points, validate_instance, CoefficientVector, IntegerBox};
use crate::error::{domain, Result};
use crate::parallel;
use crate::RunOptions;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use std::f64::consts::TAU;

fn require_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return domain(format!("modulus {p} is not prime"));
    }
    Ok(())
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn residue(x: i64, p: u64) -> u64 {
    (x as i128).rem_euclid(p as i128) as u64
}

fn big_residue(x: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    (((x % &m) + &m) % &m).to_u64().expect("residue below p")
}

/// `e(k/p)`.
fn root(k: u64, p: u64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * k as f64 / p as f64)
}

fn root_table(p: u64) -> Vec<Complex64> {
    (0..p).map(|k| root(k, p)).collect()
}

/// `ρ_p(v/u)`: the representative `w ≡ v u^{-1} (mod p)` with `|w| < p/2`.
pub fn balanced_residue(v: i64, u: i64, p: u64) -> Result<i64> {
    if p == 2 || !is_prime(p) {
        return domain(format!("modulus {p} is not an odd prime"));
    }
    let w = mul_mod(residue(v, p), mod_inverse_unchecked(u, p)?, p);
    Ok(if w > p / 2 { w as i64 - p as i64 } else { w as i64 })
}

/// A convex set of lattice points `(u, v)` with `1 ≤ u ≤ U`, `0 ≤ v ≤ V`,
/// stored as one `v`-range per column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnDomain {
    u_max: u64,
    v_max: u64,
    columns: Vec<Option<(u64, u64)>>,
}

impl ColumnDomain {
    /// `[1, U] × [0, V]`.
    pub fn rectangle(u_max: u64, v_max: u64) -> Result<ColumnDomain> {
        ColumnDomain::from_columns(u_max, v_max, vec![Some((0, v_max)); u_max as usize])
    }

    /// Points on or below the segment from `(0, V)` to `(U, 0)`.
    pub fn right_triangle(u_max: u64, v_max: u64) -> Result<ColumnDomain> {
        if u_max == 0 {
            return domain("U must be positive");
        }
        let columns = (1..=u_max)
            .map(|u| Some((0, v_max * (u_max - u) / u_max)))
            .collect();
        ColumnDomain::from_columns(u_max, v_max, columns)
    }

    /// Intersection of `[1, U] × [0, V]` with half-planes `α u + β v ≤ γ`.
    pub fn half_planes(u_max: u64, v_max: u64, constraints: &[(i64, i64, i64)]) -> Result<ColumnDomain> {
        let mut columns = Vec::with_capacity(u_max as usize);
        for u in 1..=u_max as i128 {
            let (mut lo, mut hi) = (0i128, v_max as i128);
            for &(alpha, beta, gamma) in constraints {
                let rhs = gamma as i128 - alpha as i128 * u;
                let beta = beta as i128;
                match beta.signum() {
                    1 => hi = hi.min(rhs.div_euclid(beta)),
                    -1 => lo = lo.max(-(rhs.div_euclid(-beta))),
                    _ if rhs < 0 => hi = -1,
                    _ => {}
                }
            }
            columns.push((lo <= hi).then_some((lo as u64, hi as u64)));
        }
        ColumnDomain::from_columns(u_max, v_max, columns)
    }

    /// Validates explicit column ranges. Nonempty columns must be
    /// consecutive, the lower ends must fall then rise, and the upper ends
    /// must rise then fall.
    pub fn from_columns(u_max: u64, v_max: u64, columns: Vec<Option<(u64, u64)>>) -> Result<ColumnDomain> {
        if u_max == 0 {
            return domain("U must be positive");
        }
        if columns.len() as u64 != u_max {
            return domain(format!("expected {u_max} columns, got {}", columns.len()));
        }
        for (i, c) in columns.iter().enumerate() {
            if let Some((lo, hi)) = *c {
                if lo > hi || hi > v_max {
                    return domain(format!("column {} has invalid range [{lo}, {hi}]", i + 1));
                }
            }
        }
        let first = columns.iter().position(Option::is_some);
        let last = columns.iter().rposition(Option::is_some);
        if let (Some(first), Some(last)) = (first, last) {
            let run = &columns[first..=last];
            if run.iter().any(Option::is_none) {
                return domain("nonempty columns must be consecutive");
            }
            let lo: Vec<i64> = run.iter().map(|c| -(c.unwrap().0 as i64)).collect();
            let hi: Vec<i64> = run.iter().map(|c| c.unwrap().1 as i64).collect();
            if !rises_then_falls(&lo) || !rises_then_falls(&hi) {
                return domain("column ranges do not form a convex domain");
            }
        }
        Ok(ColumnDomain { u_max, v_max, columns })
    }

    pub fn u_max(&self) -> u64 {
        self.u_max
    }

    pub fn v_max(&self) -> u64 {
        self.v_max
    }

    /// The `v`-range of column `u` (`1 ≤ u ≤ U`).
    pub fn column(&self, u: u64) -> Option<(u64, u64)> {
        self.columns[(u - 1) as usize]
    }

    pub fn point_count(&self) -> u64 {
        self.columns.iter().flatten().map(|(lo, hi)| hi - lo + 1).sum()
    }

    /// Lattice points, `u` ascending then `v` ascending.
    pub fn points(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (1..=self.u_max).flat_map(move |u| {
            self.column(u)
                .into_iter()
                .flat_map(move |(lo, hi)| (lo..=hi).map(move |v| (u, v)))
        })
    }
}

fn rises_then_falls(xs: &[i64]) -> bool {
    let mut falling = false;
    for w in xs.windows(2) {
        if w[1] < w[0] {
            falling = true;
        } else if w[1] > w[0] && falling {
            return false;
        }
    }
    true
}

/// `Σ_{(u,v) ∈ C} e_p(a v / u)`.
pub fn ratio_sum(a: i64, p: u64, domain: &ColumnDomain) -> Result<Complex64> {
    require_prime(p)?;
    if p <= domain.u_max {
        return Err(crate::Error::Domain(format!(
            "p = {p} must exceed U = {}",
            domain.u_max
        )));
    }
    let a = residue(a, p);
    let table = (domain.point_count() > p).then(|| root_table(p));
    let mut total = Complex64::new(0.0, 0.0);
    for u in 1..=domain.u_max {
        let Some((lo, hi)) = domain.column(u) else { continue };
        let step = mul_mod(a, mod_inverse_unchecked(u as i64, p)?, p);
        let mut k = mul_mod(step, lo, p);
        for _ in lo..=hi {
            total += match &table {
                Some(t) => t[k as usize],
                None => root(k, p),
            };
            k = (k + step) % p;
        }
    }
    Ok(total)
}

/// Frozen ceilings for `total / bound_reference` with `a = 1`,
/// `U = V = ⌊√Q⌋`, `Q ∈ {500, 1000, 2000, 4000}`, indexed by `n - 1` for
/// `n ∈ {1, 2}`. The observed maxima (both at `Q = 500`) were 0.12158 and
/// 0.0026498.
pub const MOMENT_RATIO_CAPS: [f64; 2] = [0.1216, 0.002650];

#[derive(Debug, Clone, PartialEq)]
pub struct MomentStats {
    pub q: u64,
    pub a: i64,
    pub n: u32,
    pub u_max: u64,
    pub v_max: u64,
    /// `Σ_p |S_p|^n`.
    pub total: f64,
    /// `(p, |S_p|)` for each prime used, ascending.
    pub per_prime: Vec<(u64, f64)>,
    /// `(U + V)^n Q (log Q)^{2^n - 2}`.
    pub bound_reference: f64,
    pub ratio: f64,
}

impl MomentStats {
    pub const CSV_HEADER: [&'static str; 8] = ["q", "a", "n", "U", "V", "total", "bound_reference", "ratio"];

    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.q.to_string(),
            self.a.to_string(),
            self.n.to_string(),
            self.u_max.to_string(),
            self.v_max.to_string(),
            self.total.to_string(),
            self.bound_reference.to_string(),
            self.ratio.to_string(),
        ]
    }
}

pub fn bound_reference(u_max: u64, v_max: u64, q: u64, n: u32) -> f64 {
    let log_q = (q as f64).ln();
    ((u_max + v_max) as f64).powi(n as i32) * q as f64 * log_q.powi((1i32 << n) - 2)
}

/// `Σ_{Q ≤ p ≤ 2Q, p ∤ a} |Σ_{(u,v) ∈ C} e_p(av/u)|^n`.
pub fn moment_over_primes(
    a: i64,
    q: u64,
    n: u32,
    domain: &ColumnDomain,
    options: &RunOptions,
) -> Result<MomentStats> {
    if n == 0 || n > 16 {
        return crate::error::domain("moment order must be in 1..=16");
    }
    if a < 1 || a as u64 > 2 * q {
        return crate::error::domain(format!("a = {a} must lie in [1, 2Q] = [1, {}]", 2 * q));
    }
    if q <= domain.u_max || q <= domain.v_max {
        return crate::error::domain(format!(
            "Q = {q} must exceed U = {} and V = {}",
            domain.u_max, domain.v_max
        ));
    }
    options.check(
        "prime-window moment",
        (q + 1).checked_mul(domain.point_count().max(1)),
    )?;
    let primes: Vec<u64> = primes_in_window(q)?
        .primes
        .into_iter()
        .filter(|&p| !(a as u64).is_multiple_of(p))
        .collect();
    let magnitudes = parallel::try_map_indexed(primes.len(), options.workers, |i| {
        ratio_sum(a, primes[i], domain).map(|s| s.norm())
    })?;
    let total = magnitudes.iter().fold(0.0, |acc, m| acc + m.powi(n as i32));
    let reference = bound_reference(domain.u_max, domain.v_max, q, n);
    Ok(MomentStats {
        q,
        a,
        n,
        u_max: domain.u_max,
        v_max: domain.v_max,
        total,
        per_prime: primes.into_iter().zip(magnitudes).collect(),
        bound_reference: reference,
        ratio: total / reference,
    })
}

/// Classification of `u ≤ U` by the size of `|ρ_p(a/u)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProofStatistics {
    pub p: u64,
    pub q: u64,
    /// `⌊log(2Q/V)⌋`.
    pub i: i64,
    /// `⌊log 2Q⌋`.
    pub j: i64,
    /// `#{u : |ρ_p(a/u)| < e^I}`.
    pub r_p: u64,
    /// `(j, T_{j,p})` for `j = I+1, …, J`, where `T_{j,p} = #{u : e^j ≤ |ρ_p(a/u)| < e^{j+1}}`.
    pub t: Vec<(i64, u64)>,
    /// `(j, K_j)` with `K_j = ⌊e^{j+1} U / Q⌋ + 1`.
    pub k: Vec<(i64, u64)>,
}

pub fn proof_statistics(a: i64, p: u64, u_max: u64, v_max: u64, q: u64) -> Result<ProofStatistics> {
    if u_max == 0 || v_max == 0 || q == 0 {
        return domain("U, V and Q must be positive");
    }
    if p <= u_max {
        return domain(format!("p = {p} must exceed U = {u_max}"));
    }
    if residue(a, p) == 0 {
        return domain(format!("a = {a} is divisible by p = {p}"));
    }
    let i = (2.0 * q as f64 / v_max as f64).ln().floor() as i64;
    let j_max = (2.0 * q as f64).ln().floor() as i64;
    let e_i = (i as f64).exp();
    let mut r_p = 0;
    let mut t: Vec<(i64, u64)> = ((i + 1)..=j_max).map(|j| (j, 0)).collect();
    for u in 1..=u_max {
        let w = balanced_residue(a, u as i64, p)?.unsigned_abs() as f64;
        if w < e_i {
            r_p += 1;
        }
        for (j, count) in t.iter_mut() {
            if (*j as f64).exp() <= w && w < ((*j + 1) as f64).exp() {
                *count += 1;
            }
        }
    }
    let k = ((i + 1)..=j_max)
        .map(|j| (j, (((j + 1) as f64).exp() * u_max as f64 / q as f64).floor() as u64 + 1))
        .collect();
    Ok(ProofStatistics { p, q, i, j: j_max, r_p, t, k })
}

fn validate_modular(coeffs: &CoefficientVector, p: u64, box0: &IntegerBox, bx: &IntegerBox) -> Result<()> {
    validate_instance(coeffs, box0, bx)?;
    require_prime(p)?;
    let p = p as i64;
    for j in 0..box0.dim() {
        if (box0.lower(j) - 1).div_euclid(p) != box0.upper(j).div_euclid(p) {
            return domain(format!("denominator range {j} contains a multiple of {p}"));
        }
    }
    Ok(())
}

/// Residues `a_j s r^{-1} mod p` over `(r, s)` in coordinate `j`, `r` ascending then `s`.
fn coordinate_residues(a: u64, p: u64, bx: &IntegerBox, j: usize, r: i64) -> Result<Vec<u64>> {
    let c = mul_mod(a, mod_inverse_unchecked(r, p)?, p);
    Ok((bx.lower(j)..=bx.upper(j))
        .map(|s| mul_mod(c, residue(s, p), p))
        .collect())
}

/// `M_n(a; p, B_0, B)`: tuples with `Σ a_j s_j r_j^{-1} ≡ a_0 (mod p)`.
pub fn congruence_count(
    coeffs: &CoefficientVector,
    p: u64,
    box0: &IntegerBox,
    bx: &IntegerBox,
    options: &RunOptions,
) -> Result<u128> {
    validate_modular(coeffs, p, box0, bx)?;
    let n = coeffs.dim();
    let predicted = (0..n).try_fold(0u64, |acc, j| {
        (box0.lengths()[j].checked_mul(bx.lengths()[j])).and_then(|v| acc.checked_add(v))
    });
    let predicted = predicted.and_then(|v| v.checked_add((n as u64).checked_mul(p.checked_mul(p)?)?));
    options.check("congruence count", predicted)?;
    let a: Vec<u64> = coeffs.coefficients().iter().map(|x| big_residue(x, p)).collect();
    let mut conv: Option<Vec<u128>> = None;
    for j in 0..n {
        let leads: Vec<i64> = (box0.lower(j)..=box0.upper(j)).collect();
        let partial = parallel::try_map_indexed(leads.len(), options.workers, |i| {
            let mut hist = vec![0u128; p as usize];
            for c in coordinate_residues(a[j], p, bx, j, leads[i])? {
                hist[c as usize] += 1;
            }
            Ok(hist)
        })?;
        let mut hist = vec![0u128; p as usize];
        for h in partial {
            for (x, y) in hist.iter_mut().zip(h) {
                *x += y;
            }
        }
        conv = Some(match conv {
            None => hist,
            Some(prev) => {
                let mut next = vec![0u128; p as usize];
                for (x, &cx) in prev.iter().enumerate().filter(|(_, c)| **c != 0) {
                    for (y, &cy) in hist.iter().enumerate().filter(|(_, c)| **c != 0) {
                        next[(x + y) % p as usize] += cx * cy;
                    }
                }
                next
            }
        });
    }
    let target = big_residue(coeffs.a0(), p) as usize;
    Ok(conv.expect("at least one coordinate")[target])
}

/// Both sides of `M_n = (1/p) Σ_{λ=0}^{p-1} e_p(-λ a_0) Π_j Σ_{r_j, s_j} e_p(λ a_j s_j / r_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalityReport {
    pub p: u64,
    pub m: u128,
    pub rhs: Complex64,
    /// The `λ = 0` contribution `Π_j |B_{0,j}| |B_j| / p`.
    pub main_term: f64,
    pub residual: f64,
}

impl OrthogonalityReport {
    /// `residual < 10^{-6} max(1, M)`.
    pub fn passes(&self) -> bool {
        self.residual < 1e-6 * (self.m as f64).max(1.0)
    }
}

pub fn orthogonality_check(
    coeffs: &CoefficientVector,
    p: u64,
    box0: &IntegerBox,
    bx: &IntegerBox,
    options: &RunOptions,
) -> Result<OrthogonalityReport> {
    let m = congruence_count(coeffs, p, box0, bx, options)?;
    let n = coeffs.dim();
    let table = root_table(p);
    let a: Vec<u64> = coeffs.coefficients().iter().map(|x| big_residue(x, p)).collect();
    let a0 = big_residue(coeffs.a0(), p);
    let mut residues: Vec<Vec<u64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut all = Vec::new();
        for r in box0.lower(j)..=box0.upper(j) {
            all.extend(coordinate_residues(a[j], p, bx, j, r)?);
        }
        residues.push(all);
    }
    let mut rhs = Complex64::new(0.0, 0.0);
    for lambda in 0..p {
        let mut term = table[((p - mul_mod(lambda, a0, p)) % p) as usize];
        for res in &residues {
            let inner = res
                .iter()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc + table[mul_mod(lambda, c, p) as usize]);
            term *= inner;
        }
        rhs += term;
    }
    rhs /= p as f64;
    let main_term = residues.iter().map(|r| r.len() as f64).product::<f64>() / p as f64;
    let residual = (rhs - Complex64::new(m as f64, 0.0)).norm();
    Ok(OrthogonalityReport { p, m, rhs, main_term, residual })
}

/// Direct scan of every tuple, reducing `Σ a_j s_j r_j^{-1}` modulo `p`.
pub fn congruence_count_brute(
    coeffs: &CoefficientVector,
    p: u64,
    box0: &IntegerBox,
    bx: &IntegerBox,
) -> Result<u128> {
    validate_modular(coeffs, p, box0, bx)?;
    let a: Vec<u64> = coeffs.coefficients().iter().map(|x| big_residue(x, p)).collect();
    let a0 = big_residue(coeffs.a0(), p);
    let mut hits = 0u128;
    for r in box_points(box0, None) {
        let inv: Vec<u64> = r
            .iter()
            .map(|&x| mod_inverse_unchecked(x, p))
            .collect::<Result<_>>()?;
        for s in box_points(bx, None) {
            let sum = (0..r.len()).fold(0u64, |acc, j| {
                (acc + mul_mod(mul_mod(a[j], residue(s[j], p), p), inv[j], p)) % p
            });
            hits += (sum == a0) as u128;
        }
    }
    Ok(hits)
}
