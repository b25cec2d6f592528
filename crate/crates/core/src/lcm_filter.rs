//! Denominator admissibility: `r_1⋯r_n ≡ 0 (mod lcm[r_1², …, r_n²])`.
//!
//! Any solution of `Σ s_j/r_j = 1` in reduced fractions has an admissible
//! denominator vector, because `gcd(s_j, r_j) = 1` forces `r_j² | r_1⋯r_n`.
//! The stream below enumerates admissible vectors in a box lexicographically,
//! pruning prefixes that cannot be completed.

use crate::arith::{gcd_raw, gcd_u128};
use crate::counting::{CountRecord, Method};
use crate::error::{domain, overflow, Result};
use crate::parallel;
use crate::RunOptions;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

/// An ordered tuple of positive denominators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DenominatorVector(Vec<u64>);

impl DenominatorVector {
    pub fn new(r: Vec<u64>) -> Result<DenominatorVector> {
        if r.is_empty() {
            return domain("denominator vector must be nonempty");
        }
        if r.contains(&0) {
            return domain("denominators must be positive");
        }
        Ok(DenominatorVector(r))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for DenominatorVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for DenominatorVector {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<DenominatorVector> {
        let r = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|e| crate::Error::Domain(format!("bad component {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        DenominatorVector::new(r)
    }
}

/// `lcm[r_1², …, r_n²]`, built incrementally through gcds.
pub fn lcm_of_squares(v: &DenominatorVector) -> Result<u128> {
    v.0.iter().try_fold(1u128, |acc, &r| {
        let sq = (r as u128)
            .checked_mul(r as u128)
            .ok_or_else(|| overflow("square"))?;
        let g = gcd_u128(acc, sq);
        (acc / g).checked_mul(sq).ok_or_else(|| overflow("lcm of squares"))
    })
}

/// True iff `lcm[r_1², …, r_n²]` divides `r_1⋯r_n`.
pub fn is_admissible(v: &DenominatorVector) -> Result<bool> {
    let l = lcm_of_squares(v)?;
    let mut product: u128 = 1;
    for &r in &v.0 {
        product = product
            .checked_mul(r as u128)
            .ok_or_else(|| overflow("denominator product"))?;
    }
    Ok(product.is_multiple_of(l))
}

/// Overflow-free equivalent of [`is_admissible`]: `r_j | Π_{i≠j} r_i` for all `j`,
/// evaluated with residues modulo `r_j`.
pub fn is_admissible_modular(r: &[u64]) -> bool {
    (0..r.len()).all(|j| cofactor_residue(r, j) == 0)
}

/// `Π_{i≠j} r_i mod r_j`.
fn cofactor_residue(r: &[u64], j: usize) -> u64 {
    let m = r[j] as u128;
    let mut acc = 1u128 % m;
    for (i, &x) in r.iter().enumerate() {
        if i != j {
            acc = acc * (x as u128 % m) % m;
        }
    }
    acc as u64
}

/// The part of `r_j` not yet covered by the other prefix entries:
/// `r_j / gcd(r_j, Π_{i≠j} r_i)`.
fn uncovered(r: &[u64], j: usize) -> u64 {
    r[j] / gcd_raw(r[j], cofactor_residue(r, j))
}

/// Lexicographic stream of admissible vectors in `[1, R_1] × ⋯ × [1, R_n]`.
///
/// A prefix `(r_1, …, r_k)` is abandoned when the lcm of the uncovered parts
/// of its entries exceeds the largest possible product of the remaining
/// coordinates. At the last coordinate only multiples of that lcm are probed.
#[derive(Debug, Clone)]
pub struct AdmissibleStream {
    bounds: Vec<u64>,
    lead_start: u64,
    lead_step: u64,
    /// `tail_capacity[k] = Π_{i ≥ k} R_i`, saturating.
    tail_capacity: Vec<u128>,
    cur: Vec<u64>,
    /// Step of the odometer at each level.
    steps: Vec<u64>,
    started: bool,
    candidates: u64,
}

impl AdmissibleStream {
    fn new(bounds: &[u64], lead_start: u64, lead_step: u64) -> AdmissibleStream {
        let n = bounds.len();
        let mut tail_capacity = vec![1u128; n + 1];
        for k in (0..n).rev() {
            tail_capacity[k] = tail_capacity[k + 1].saturating_mul(bounds[k] as u128);
        }
        AdmissibleStream {
            bounds: bounds.to_vec(),
            lead_start,
            lead_step,
            tail_capacity,
            cur: Vec::with_capacity(n),
            steps: Vec::with_capacity(n),
            started: false,
            candidates: 0,
        }
    }

    /// Number of vectors and prefixes probed so far.
    pub fn candidates_examined(&self) -> u64 {
        self.candidates
    }

    pub fn bounds(&self) -> &[u64] {
        &self.bounds
    }

    /// First value and step for the level about to be pushed, or `None` if the
    /// current prefix cannot be completed.
    fn level_start(&self) -> Option<(u64, u64)> {
        let k = self.cur.len();
        let n = self.bounds.len();
        if k + 1 < n {
            return Some(if k == 0 {
                (self.lead_start, self.lead_step)
            } else {
                (1, 1)
            });
        }
        // Last coordinate: it must be a multiple of every uncovered part.
        let mut l: u128 = 1;
        for j in 0..k {
            let g = uncovered(&self.cur, j) as u128;
            l = l / gcd_u128(l, g) * g;
            if l > self.bounds[k] as u128 {
                return None;
            }
        }
        let l = l as u64;
        if k == 0 {
            // n = 1 and the lead coordinate is also the last one.
            let first = self.lead_start.div_ceil(l) * l;
            let mut v = first;
            while !(v - self.lead_start).is_multiple_of(self.lead_step) {
                v += l;
            }
            return Some((v, l * self.lead_step / gcd_raw(l, self.lead_step)));
        }
        Some((l, l))
    }

    /// Whether a nonfinal prefix can still be completed.
    fn prefix_viable(&self) -> bool {
        let k = self.cur.len();
        let capacity = self.tail_capacity[k];
        let mut l: u128 = 1;
        for j in 0..k {
            let g = uncovered(&self.cur, j) as u128;
            l = l / gcd_u128(l, g) * g;
            if l > capacity {
                return false;
            }
        }
        true
    }

    fn push_level(&mut self) -> bool {
        match self.level_start() {
            Some((start, step)) if start <= self.bounds[self.cur.len()] => {
                self.cur.push(start);
                self.steps.push(step);
                true
            }
            _ => false,
        }
    }

    /// Moves to the next sibling, popping exhausted levels. Returns false when done.
    fn advance(&mut self) -> bool {
        while let Some(&last) = self.cur.last() {
            let level = self.cur.len() - 1;
            let next = last + self.steps[level];
            if next <= self.bounds[level] {
                self.cur[level] = next;
                return true;
            }
            self.cur.pop();
            self.steps.pop();
        }
        false
    }
}

impl Iterator for AdmissibleStream {
    type Item = DenominatorVector;

    fn next(&mut self) -> Option<DenominatorVector> {
        let n = self.bounds.len();
        if !self.started {
            self.started = true;
            if !self.push_level() {
                return None;
            }
        } else if !self.advance() {
            return None;
        }
        loop {
            self.candidates += 1;
            let k = self.cur.len();
            if k == n {
                // Earlier coordinates are covered by construction of the last level;
                // the last one must divide the product of the others.
                if cofactor_residue(&self.cur, n - 1) == 0 {
                    return Some(DenominatorVector(self.cur.clone()));
                }
            } else if self.prefix_viable() && self.push_level() {
                continue;
            }
            if !self.advance() {
                return None;
            }
        }
    }
}

fn validate_bounds(bounds: &[u64]) -> Result<()> {
    if bounds.is_empty() {
        return domain("bounds must be nonempty");
    }
    if bounds.contains(&0) {
        return domain("bounds must be positive");
    }
    Ok(())
}

fn box_size(bounds: &[u64]) -> Option<u64> {
    bounds.iter().try_fold(1u64, |acc, &b| acc.checked_mul(b))
}

/// Streams all admissible vectors with `r_j ≤ R_j`, failing fast when the box
/// is larger than the work budget.
pub fn enumerate_admissible(bounds: &[u64], options: &RunOptions) -> Result<AdmissibleStream> {
    validate_bounds(bounds)?;
    options.check("admissible enumeration", box_size(bounds))?;
    Ok(AdmissibleStream::new(bounds, 1, 1))
}

/// The sub-stream whose leading coordinate is `≡ start (mod step)`, `1 ≤ start ≤ step`.
pub fn enumerate_admissible_partition(
    bounds: &[u64],
    start: u64,
    step: u64,
) -> Result<AdmissibleStream> {
    validate_bounds(bounds)?;
    if start == 0 || step == 0 {
        return domain("partition start and step must be positive");
    }
    Ok(AdmissibleStream::new(bounds, start, step))
}

/// Plain filter over the whole box, with no pruning. Reference for the stream.
pub fn enumerate_admissible_unpruned(bounds: &[u64]) -> Result<Vec<DenominatorVector>> {
    validate_bounds(bounds)?;
    let mut out = Vec::new();
    let mut cur: Vec<u64> = vec![1; bounds.len()];
    loop {
        let v = DenominatorVector(cur.clone());
        if is_admissible(&v)? {
            out.push(v);
        }
        let mut k = bounds.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if cur[k] < bounds[k] {
                cur[k] += 1;
                break;
            }
            cur[k] = 1;
        }
    }
}

/// Exact `J_n(R_1, …, R_n)` with the number of probes performed.
pub fn count_j(bounds: &[u64], options: &RunOptions) -> Result<CountRecord> {
    let started = Instant::now();
    validate_bounds(bounds)?;
    options.check("J_n", box_size(bounds))?;
    let workers = options.workers.max(1);
    let lead = bounds[0].min(workers as u64) as usize;
    let parts = parallel::try_map_indexed(lead, workers, |w| -> Result<(u64, u64)> {
        let mut stream = enumerate_admissible_partition(bounds, w as u64 + 1, lead as u64)?;
        let count = stream.by_ref().count() as u64;
        Ok((count, stream.candidates_examined()))
    })?;
    let count: u64 = parts.iter().map(|p| p.0).sum();
    let candidates: u64 = parts.iter().map(|p| p.1).sum();
    let mut record = CountRecord::new(Method::Filter, count as u128, started);
    record.param("bounds", DenominatorVector(bounds.to_vec()));
    record.filter_candidates = candidates;
    record.candidates_examined = candidates;
    Ok(record)
}
