use super::record::{CountRecord, Method, SolutionTuple};
use crate::arith::gcd_raw;
use crate::error::{domain, overflow, Result};
use crate::lcm_filter::{enumerate_admissible_partition, DenominatorVector};
use crate::parallel;
use crate::rationals::{farey_unit_fractions, Fraction};
use crate::RunOptions;
use std::time::Instant;

fn validate(n: usize, h: u64) -> Result<()> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    if h == 0 {
        return domain("H must be at least 1");
    }
    Ok(())
}

/// Numerators `s` with `s/r` canonical and in `[0, 1]`: `{0, 1}` for `r = 1`,
/// otherwise `1 ≤ s < r` coprime to `r`.
pub(super) fn unit_numerators(h: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new(), vec![0, 1]];
    for r in 2..=h {
        out.push((1..r).filter(|&s| gcd_raw(s, r) == 1).collect());
    }
    out
}

/// Candidate count a method will examine, computed before running.
/// For `fast` this is the admissibility-phase bound `H^n`.
pub fn predicted_candidates(n: usize, h: u64, method: Method) -> Result<Option<u64>> {
    validate(n, h)?;
    let f = farey_unit_fractions(h).len() as u64;
    Ok(match method {
        Method::Brute => f.checked_pow(n as u32),
        Method::Naive => f.checked_pow(n as u32 - 1),
        Method::Fast => h.checked_pow(n as u32),
        other => return domain(format!("method {other} does not compute L_n")),
    })
}

/// Exact test `Σ f_j = 1` over a common denominator.
pub(super) fn sums_to_one(tuple: &[Fraction]) -> Result<bool> {
    let mut den: u128 = 1;
    for f in tuple {
        den = den
            .checked_mul(f.denominator() as u128)
            .ok_or_else(|| overflow("tuple denominator"))?;
    }
    let mut num: u128 = 0;
    for f in tuple {
        let term = (den / f.denominator() as u128)
            .checked_mul(f.numerator() as u128)
            .ok_or_else(|| overflow("tuple numerator"))?;
        num = num.checked_add(term).ok_or_else(|| overflow("tuple numerator"))?;
    }
    Ok(num == den)
}

/// Visits every tuple over `items^len` whose first entry is `items[lead]`.
fn for_each_tuple_with_lead<F>(items: &[Fraction], len: usize, lead: usize, mut f: F) -> Result<()>
where
    F: FnMut(&[Fraction]) -> Result<()>,
{
    let mut idx = vec![0usize; len];
    idx[0] = lead;
    let mut tuple: Vec<Fraction> = idx.iter().map(|&i| items[i]).collect();
    loop {
        f(&tuple)?;
        let mut k = len;
        loop {
            k -= 1;
            if k == 0 {
                return Ok(());
            }
            if idx[k] + 1 < items.len() {
                idx[k] += 1;
                tuple[k] = items[idx[k]];
                break;
            }
            idx[k] = 0;
            tuple[k] = items[0];
        }
    }
}

/// `L_n(H)` by testing every n-tuple over `F(H) ∩ [0, 1]`.
pub fn count_l_brute(n: usize, h: u64, options: &RunOptions) -> Result<CountRecord> {
    let started = Instant::now();
    options.check("brute L_n", predicted_candidates(n, h, Method::Brute)?)?;
    let items = farey_unit_fractions(h);
    let per_lead = parallel::try_map_indexed(items.len(), options.workers, |lead| {
        let mut hits = 0u64;
        let mut seen = 0u64;
        for_each_tuple_with_lead(&items, n, lead, |t| {
            seen += 1;
            hits += sums_to_one(t)? as u64;
            Ok(())
        })?;
        Ok((hits, seen))
    })?;
    let count: u64 = per_lead.iter().map(|p| p.0).sum();
    let seen: u64 = per_lead.iter().map(|p| p.1).sum();
    let mut record = CountRecord::new(Method::Brute, count as u128, started).single_phase(seen);
    record.param("n", n).param("h", h);
    Ok(record)
}

/// All solutions found by the brute oracle, lexicographic in `F(H)` order.
pub fn solutions_brute(n: usize, h: u64, options: &RunOptions) -> Result<Vec<SolutionTuple>> {
    options.check("brute L_n", predicted_candidates(n, h, Method::Brute)?)?;
    let items = farey_unit_fractions(h);
    let per_lead = parallel::try_map_indexed(items.len(), options.workers, |lead| {
        let mut found = Vec::new();
        for_each_tuple_with_lead(&items, n, lead, |t| {
            if sums_to_one(t)? {
                found.push(SolutionTuple(t.to_vec()));
            }
            Ok(())
        })?;
        Ok(found)
    })?;
    Ok(per_lead.into_iter().flatten().collect())
}

/// Reduced `num/den` with `den ≥ 1`.
#[derive(Clone, Copy)]
struct Residual {
    num: i128,
    den: i128,
}

impl Residual {
    const ONE: Residual = Residual { num: 1, den: 1 };

    fn minus(self, s: u64, r: u64) -> Result<Residual> {
        let (s, r) = (s as i128, r as i128);
        let g = gcd_i128(self.den, r);
        let num = self
            .num
            .checked_mul(r / g)
            .and_then(|a| s.checked_mul(self.den / g).and_then(|b| a.checked_sub(b)))
            .ok_or_else(|| overflow("residual numerator"))?;
        let den = (self.den / g)
            .checked_mul(r)
            .ok_or_else(|| overflow("residual denominator"))?;
        let g = gcd_i128(num.abs(), den);
        Ok(Residual {
            num: num / g,
            den: den / g,
        })
    }
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.abs().max(1)
}

struct NaiveWalk<'a> {
    h: u64,
    numerators: &'a [Vec<u64>],
    hits: u64,
    seen: u64,
}

impl NaiveWalk<'_> {
    /// Chooses the remaining `depth` prefix fractions, then tests the residual.
    fn walk(&mut self, depth: usize, t: Residual) -> Result<()> {
        if depth == 0 {
            self.seen += 1;
            if t.num >= 0 && t.den as u64 <= self.h {
                self.hits += 1;
            }
            return Ok(());
        }
        for r in 1..=self.h {
            self.walk_denominator(depth, r, t)?;
        }
        Ok(())
    }

    fn walk_denominator(&mut self, depth: usize, r: u64, t: Residual) -> Result<()> {
        for &s in &self.numerators[r as usize] {
            self.walk(depth - 1, t.minus(s, r)?)?;
        }
        Ok(())
    }
}

/// `L_n(H)` by choosing `n - 1` fractions and checking that the residual
/// `1 - Σ` lies in `F(H)`.
pub fn count_l_naive(n: usize, h: u64, options: &RunOptions) -> Result<CountRecord> {
    let started = Instant::now();
    options.check("naive L_n", predicted_candidates(n, h, Method::Naive)?)?;
    let numerators = unit_numerators(h);
    let (hits, seen) = if n == 1 {
        let mut w = NaiveWalk { h, numerators: &numerators, hits: 0, seen: 0 };
        w.walk(0, Residual::ONE)?;
        (w.hits, w.seen)
    } else {
        let parts = parallel::try_map_indexed(h as usize, options.workers, |i| {
            let mut w = NaiveWalk { h, numerators: &numerators, hits: 0, seen: 0 };
            w.walk_denominator(n - 1, i as u64 + 1, Residual::ONE)?;
            Ok((w.hits, w.seen))
        })?;
        (parts.iter().map(|p| p.0).sum(), parts.iter().map(|p| p.1).sum())
    };
    let mut record = CountRecord::new(Method::Naive, hits as u128, started).single_phase(seen);
    record.param("n", n).param("h", h);
    Ok(record)
}

/// Numerator phase for one admissible vector: canonical numerators for
/// `r_1, …, r_{n-1}` chosen in order, abandoning a prefix as soon as its
/// residual `1 - Σ` turns negative, and accepting a full prefix when the
/// residual has reduced denominator exactly `r_n`. Every prefix is one probe.
fn numerator_phase(
    r: &[u64],
    numerators: &[Vec<u64>],
    depth: usize,
    t: Residual,
    hits: &mut u64,
    seen: &mut u64,
) -> Result<()> {
    let last = r.len() - 1;
    if last == 0 {
        *seen += 1;
        *hits += (t.den == r[0] as i128) as u64;
        return Ok(());
    }
    let rj = r[depth];
    for &s in &numerators[rj as usize] {
        *seen += 1;
        let next = t.minus(s, rj)?;
        if next.num < 0 {
            continue;
        }
        if depth + 1 == last {
            *hits += (next.den == r[last] as i128) as u64;
        } else {
            numerator_phase(r, numerators, depth + 1, next, hits, seen)?;
        }
    }
    Ok(())
}

/// `L_n(H)` through the admissible denominator vectors.
pub fn count_l_fast(n: usize, h: u64, options: &RunOptions) -> Result<CountRecord> {
    let started = Instant::now();
    options.check("fast L_n (admissibility phase)", predicted_candidates(n, h, Method::Fast)?)?;
    let bounds = vec![h; n];
    let parts = (h as usize).min(options.workers.max(1));
    let filtered = parallel::try_map_indexed(parts, options.workers, |w| {
        let mut stream = enumerate_admissible_partition(&bounds, w as u64 + 1, parts as u64)?;
        let vectors: Vec<DenominatorVector> = stream.by_ref().collect();
        Ok((vectors, stream.candidates_examined()))
    })?;
    let filter_candidates: u64 = filtered.iter().map(|p| p.1).sum();
    let vectors: Vec<DenominatorVector> = filtered.into_iter().flat_map(|p| p.0).collect();

    let numerators = unit_numerators(h);
    let predicted = vectors.iter().try_fold(0u64, |acc, v| {
        let prefix = v.as_slice()[..n - 1]
            .iter()
            .try_fold(1u64, |p, &r| p.checked_mul(numerators[r as usize].len() as u64))?;
        acc.checked_add(prefix)
    });
    options.check("fast L_n (numerator phase)", predicted)?;

    let counted = parallel::try_map_indexed(vectors.len(), options.workers, |i| {
        let (mut hits, mut seen) = (0u64, 0u64);
        numerator_phase(vectors[i].as_slice(), &numerators, 0, Residual::ONE, &mut hits, &mut seen)?;
        Ok((hits, seen))
    })?;
    let count: u64 = counted.iter().map(|p| p.0).sum();
    let numerator_candidates: u64 = counted.iter().map(|p| p.1).sum();

    let mut record = CountRecord::new(Method::Fast, count as u128, started);
    record.param("n", n).param("h", h).param("admissible", vectors.len());
    record.filter_candidates = filter_candidates;
    record.numerator_candidates = numerator_candidates;
    record.candidates_examined = filter_candidates + numerator_candidates;
    Ok(record)
}

/// Dispatches to the chosen `L_n` algorithm.
pub fn count_l(n: usize, h: u64, method: Method, options: &RunOptions) -> Result<CountRecord> {
    validate(n, h)?;
    match method {
        Method::Brute => count_l_brute(n, h, options),
        Method::Naive => count_l_naive(n, h, options),
        Method::Fast => count_l_fast(n, h, options),
        other => domain(format!("method {other} does not compute L_n")),
    }
}

/// `S_n(H) = L_n(H)^n`.
pub fn count_s(n: usize, h: u64, method: Method, options: &RunOptions) -> Result<CountRecord> {
    let mut record = count_l(n, h, method, options)?;
    let l = record.count;
    record.count = l.checked_pow(n as u32).ok_or_else(|| overflow("S_n = L_n^n"))?;
    record.param("l", l);
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> RunOptions {
        RunOptions::default()
    }

    #[test]
    fn brute_examples() {
        for h in 1..=6 {
            assert_eq!(count_l_brute(1, h, &opts()).unwrap().count, 1);
        }
        assert_eq!(count_l_brute(2, 2, &opts()).unwrap().count, 3);
        assert_eq!(count_l_brute(3, 2, &opts()).unwrap().count, 6);
        let sols = solutions_brute(3, 2, &opts()).unwrap();
        assert_eq!(sols.len(), 6);
        assert!(sols.iter().all(|s| s.is_unit_solution(2)));
    }

    #[test]
    fn naive_examples() {
        assert_eq!(count_l_naive(2, 10, &opts()).unwrap().count, 33);
        assert_eq!(count_l_naive(2, 2, &opts()).unwrap().count, 3);
        assert_eq!(count_l_naive(1, 7, &opts()).unwrap().count, 1);
        assert_eq!(
            count_l_naive(3, 4, &opts()).unwrap().count,
            count_l_brute(3, 4, &opts()).unwrap().count
        );
    }

    #[test]
    fn fast_examples() {
        assert_eq!(count_l_fast(2, 2, &opts()).unwrap().count, 3);
        assert_eq!(count_l_fast(1, 9, &opts()).unwrap().count, 1);
        assert_eq!(
            count_l_fast(3, 12, &opts()).unwrap().count,
            count_l_naive(3, 12, &opts()).unwrap().count
        );
    }

    #[test]
    fn s_examples() {
        assert_eq!(count_s(1, 5, Method::Brute, &opts()).unwrap().count, 1);
        assert_eq!(count_s(2, 2, Method::Naive, &opts()).unwrap().count, 9);
        assert_eq!(count_s(3, 2, Method::Fast, &opts()).unwrap().count, 216);
    }

    #[test]
    fn s_overflow_is_a_capacity_error() {
        // L_n(1) = n, and 27^27 exceeds u128.
        assert_eq!(count_l_fast(27, 1, &opts()).unwrap().count, 27);
        let r = count_s(27, 1, Method::Fast, &opts());
        assert!(matches!(r, Err(crate::Error::Capacity(_))), "{r:?}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(count_l(0, 3, Method::Fast, &opts()).is_err());
        assert!(count_l(2, 0, Method::Naive, &opts()).is_err());
        assert!(count_l(2, 3, Method::Construction, &opts()).is_err());
        let tiny = opts().with_budget(10);
        for m in [Method::Brute, Method::Naive, Method::Fast] {
            assert!(matches!(count_l(3, 10, m, &tiny), Err(crate::Error::Resource(_))));
        }
    }

    #[test]
    fn residual_arithmetic() {
        let t = Residual::ONE.minus(1, 2).unwrap().minus(1, 3).unwrap();
        assert_eq!((t.num, t.den), (1, 6));
        let t = t.minus(1, 3).unwrap();
        assert_eq!((t.num, t.den), (-1, 6));
        let t = Residual::ONE.minus(1, 1).unwrap();
        assert_eq!((t.num, t.den), (0, 1));
    }

    #[test]
    fn worker_count_does_not_change_records() {
        for m in [Method::Brute, Method::Naive, Method::Fast] {
            let one = count_l(3, 9, m, &opts()).unwrap();
            for w in [2, 4, 9, 16] {
                let many = count_l(3, 9, m, &opts().with_workers(w)).unwrap();
                assert_eq!(many.count, one.count);
                assert_eq!(many.candidates_examined, one.candidates_examined);
                assert_eq!(many.filter_candidates, one.filter_candidates);
            }
        }
    }
}
