//! Bundled property suites run by `verify`, at fixed desk-scale parameters.

use crate::error::{HarnessError, Result};
use fareycount::arith::{euler_phi, is_prime, primes_in_window};
use fareycount::counting::{
    count_doubly_brute, count_l_brute, count_l_fast, count_l_naive, count_n_brute, count_s,
    doubly_lower_matrices, doubly_stochastic_matrices_brute, lower_bound_construction, lower_bound_solutions,
    CoefficientVector, IntegerBox, Method, SolutionTuple,
};
use fareycount::expsum::{
    balanced_residue, congruence_count, congruence_count_brute, moment_over_primes, orthogonality_check,
    ratio_sum, ColumnDomain, MOMENT_RATIO_CAPS,
};
use fareycount::RunOptions;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;
use std::collections::HashSet;

pub const SUITES: [&str; 4] = ["oracle", "identity", "construction", "expsum"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub observed: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn first_failure(&self) -> Option<String> {
        self.checks
            .iter()
            .find(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.observed))
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("reports serialize")
    }
}

fn check(name: &str, passed: bool, observed: impl Into<String>) -> Check {
    Check { name: name.to_string(), passed, observed: observed.into() }
}

pub fn run_suite(name: &str, opts: &RunOptions) -> Result<SuiteReport> {
    let checks = match name {
        "oracle" => oracle(opts)?,
        "identity" => identity(opts)?,
        "construction" => construction(opts)?,
        "expsum" => expsum(opts)?,
        other => {
            return Err(HarnessError::Usage(format!(
                "unknown suite {other:?}, expected one of {}",
                SUITES.join(", ")
            )))
        }
    };
    Ok(SuiteReport { suite: name.to_string(), passed: checks.iter().all(|c| c.passed), checks })
}

fn oracle(opts: &RunOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut grid: Vec<(usize, u64)> = (1..=40).map(|h| (2, h)).collect();
    grid.extend((1..=12).map(|h| (3, h)));
    let mut mismatches = Vec::new();
    let mut fast = Vec::new();
    for &(n, h) in &grid {
        let b = count_l_brute(n, h, opts)?.count;
        let s = count_l_naive(n, h, opts)?.count;
        let f = count_l_fast(n, h, opts)?.count;
        if b != s || s != f {
            mismatches.push(format!("n={n} H={h}: {b}/{s}/{f}"));
        }
        fast.push(f);
    }
    out.push(check(
        "three-method L agreement",
        mismatches.is_empty(),
        if mismatches.is_empty() { format!("{} pairs equal", grid.len()) } else { mismatches.join("; ") },
    ));
    let monotone = grid
        .windows(2)
        .zip(fast.windows(2))
        .all(|(g, c)| g[0].0 != g[1].0 || c[0] <= c[1]);
    out.push(check("L monotone in H", monotone, format!("{} values", fast.len())));
    let mut phi_sum = 0u128;
    let mut bad = None;
    for h in 1..=100u64 {
        phi_sum += euler_phi(h)? as u128;
        let l = count_l_fast(2, h, opts)?.count;
        if l != 1 + phi_sum && bad.is_none() {
            bad = Some(format!("H={h}: {l} vs {}", 1 + phi_sum));
        }
    }
    out.push(check("L_2 = 1 + sum of phi, H <= 100", bad.is_none(), bad.unwrap_or_else(|| "100 values".into())));
    let mut bad = Vec::new();
    for (n, h) in [(2usize, 10u64), (2, 40), (3, 6), (3, 12)] {
        let l = count_l_fast(n, h, opts)?.count;
        let s = count_s(n, h, Method::Fast, opts)?.count;
        if s != l.pow(n as u32) {
            bad.push(format!("n={n} H={h}: {s} vs {l}^{n}"));
        }
    }
    out.push(check("S = L^n", bad.is_empty(), if bad.is_empty() { "4 pairs".into() } else { bad.join("; ") }));
    Ok(out)
}

/// Summary of a seeded batch of orthogonality checks.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalityBatch {
    pub instances: usize,
    pub failures: usize,
    pub max_relative_residual: f64,
}

/// A random instance with `n ≤ 2`, box lengths `≤ 6`, and a prime `p ≤ 101`.
pub fn random_instance(rng: &mut ChaCha8Rng) -> (CoefficientVector, u64, IntegerBox, IntegerBox) {
    let primes: Vec<u64> = (7..=101).filter(|&p| is_prime(p)).collect();
    let n = rng.gen_range(1..=2);
    let a: Vec<i64> = (0..n)
        .map(|_| rng.gen_range(1..=20) * if rng.gen_bool(0.5) { 1 } else { -1 })
        .collect();
    let coeffs = CoefficientVector::from_i64(rng.gen_range(-20..=20), &a).expect("nonzero coefficients");
    let len0: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=6)).collect();
    let len: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=6)).collect();
    let offsets: Vec<i64> = (0..n).map(|_| rng.gen_range(-10..=10)).collect();
    let p = primes[rng.gen_range(0..primes.len())];
    (
        coeffs,
        p,
        IntegerBox::at_origin(len0).expect("valid box"),
        IntegerBox::new(offsets, len).expect("valid box"),
    )
}

/// Each instance must satisfy the residual contract and agree with a direct scan.
pub fn orthogonality_batch(samples: usize, seed: u64, opts: &RunOptions) -> Result<OrthogonalityBatch> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (c, p, b0, b) = random_instance(&mut rng);
        let rep = orthogonality_check(&c, p, &b0, &b, opts)?;
        let brute = congruence_count_brute(&c, p, &b0, &b)?;
        worst = worst.max(rep.residual / (rep.m as f64).max(1.0));
        if !rep.passes() || rep.m != brute {
            failures += 1;
        }
    }
    Ok(OrthogonalityBatch { instances: samples, failures, max_relative_residual: worst })
}

fn identity(opts: &RunOptions) -> Result<Vec<Check>> {
    let batch = orthogonality_batch(100, 1, opts)?;
    let mut out = vec![check(
        "orthogonality residual < 1e-6 max(1, M)",
        batch.failures == 0,
        format!("{} instances, max relative residual {:e}", batch.instances, batch.max_relative_residual),
    )];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0;
    for _ in 0..100 {
        let (c, _, b0, b) = random_instance(&mut rng);
        let m = congruence_count(&c, 101, &b0, &b, opts)?;
        if count_n_brute(&c, &b0, &b, opts)?.count > m {
            violations += 1;
        }
    }
    out.push(check("N <= M for p above all heights", violations == 0, format!("{violations} violations in 100")));
    Ok(out)
}

fn construction(opts: &RunOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut problems = Vec::new();
    let mut emitted = 0usize;
    for n in [2usize, 3] {
        for h in 1..=12 {
            let tuples: Vec<SolutionTuple> = lower_bound_solutions(n, h)?.collect();
            emitted += tuples.len();
            let distinct: HashSet<&SolutionTuple> = tuples.iter().collect();
            let count = lower_bound_construction(n, h, opts)?.count;
            let l = count_l_fast(n, h, opts)?.count;
            if distinct.len() != tuples.len()
                || tuples.len() as u128 != count
                || count > l
                || !tuples.iter().all(|t| t.is_unit_solution(h))
            {
                problems.push(format!("n={n} H={h}"));
            }
        }
    }
    out.push(check(
        "lower-bound tuples valid and distinct",
        problems.is_empty(),
        if problems.is_empty() { format!("{emitted} tuples") } else { problems.join("; ") },
    ));
    let mut problems = Vec::new();
    for (n, h) in [(2usize, 3u64), (2, 10), (3, 2), (3, 3), (3, 4)] {
        let (ms, _) = doubly_lower_matrices(n, h, opts)?;
        let valid = ms.iter().all(|m| {
            (0..n).all(|i| {
                SolutionTuple(m[i].clone()).is_unit_solution(h)
                    && SolutionTuple((0..n).map(|k| m[k][i]).collect()).is_unit_solution(h)
            })
        });
        let brute = count_doubly_brute(n, h, opts)?.count;
        if !valid || ms.len() as u128 > brute {
            problems.push(format!("n={n} H={h}"));
        }
    }
    out.push(check(
        "doubly stochastic construction valid and below brute force",
        problems.is_empty(),
        if problems.is_empty() { "5 cases".into() } else { problems.join("; ") },
    ));
    let mut closed = true;
    for (n, h) in [(2usize, 8u64), (3, 2), (3, 3)] {
        let all: HashSet<Vec<Vec<_>>> = doubly_stochastic_matrices_brute(n, h, opts)?.into_iter().collect();
        closed &= all
            .iter()
            .all(|m| all.contains(&(0..n).map(|j| (0..n).map(|i| m[i][j]).collect()).collect::<Vec<Vec<_>>>()));
    }
    out.push(check("doubly stochastic set closed under transpose", closed, "3 cases"));
    Ok(out)
}

fn expsum(opts: &RunOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut bijective = true;
    for p in (3..=101u64).filter(|&p| is_prime(p)) {
        for a in [1i64, 2, (p - 1) as i64] {
            let mut seen = HashSet::new();
            for u in 1..p as i64 {
                bijective &= seen.insert(balanced_residue(a, u, p)?);
            }
        }
    }
    out.push(check("balanced residue bijection, p <= 101", bijective, "odd primes up to 101"));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_conj: f64 = 0.0;
    let mut magnitude_ok = true;
    for _ in 0..200 {
        let p = [101u64, 103, 211, 307][rng.gen_range(0..4)];
        let d = ColumnDomain::right_triangle(rng.gen_range(1..=40), rng.gen_range(0..=60))?;
        let a = rng.gen_range(1..p as i64);
        let s = ratio_sum(a, p, &d)?;
        let t = ratio_sum(p as i64 - a, p, &d)?;
        worst_conj = worst_conj.max((s - t.conj()).norm());
        magnitude_ok &= s.norm() <= d.point_count() as f64 + 1e-9;
    }
    out.push(check("conjugate symmetry", worst_conj < 1e-9, format!("max deviation {worst_conj:e}")));
    out.push(check("magnitude at most the point count", magnitude_ok, "200 instances"));
    let rect = ColumnDomain::rectangle(10, 10)?;
    let m = moment_over_primes(1, 200, 1, &rect, opts)?;
    let direct: f64 = primes_in_window(200)?
        .primes
        .iter()
        .map(|&p| ratio_sum(1, p, &rect).map(|s| s.norm()))
        .sum::<fareycount::Result<f64>>()?;
    let dev = (m.total - direct).abs();
    out.push(check("first moment equals termwise sum", dev < 1e-9, format!("deviation {dev:e}")));
    let mut worst = String::new();
    let mut within = true;
    for n in [1u32, 2] {
        for q in [500u64, 1000] {
            let side = (q as f64).sqrt() as u64;
            let s = moment_over_primes(1, q, n, &ColumnDomain::rectangle(side, side)?, opts)?;
            within &= s.ratio <= MOMENT_RATIO_CAPS[n as usize - 1];
            worst.push_str(&format!("n={n} Q={q}: {:.6} ", s.ratio));
        }
    }
    out.push(check("moment ratio below frozen cap", within, worst.trim_end().to_string()));
    Ok(out)
}
