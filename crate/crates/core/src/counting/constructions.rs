//! Explicit families of solutions at a fixed common denominator, and the
//! doubly stochastic counts they are compared against.

use super::record::{CountRecord, Method, SolutionTuple};
use super::unit_sum::{predicted_candidates, solutions_brute, sums_to_one};
use crate::arith::gcd_raw;
use crate::error::{domain, overflow, Result};
use crate::parallel;
use crate::rationals::Fraction;
use crate::RunOptions;
use std::time::Instant;

/// An `n × n` matrix of canonical fractions, row-major.
pub type Matrix = Vec<Vec<Fraction>>;

/// `{1 ≤ s ≤ ⌊r/(n-1)⌋ : gcd(s, r) = 1}` for `n ≥ 2`.
pub fn row_choices(n: usize, r: u64) -> Vec<u64> {
    let ell = r / (n as u64 - 1);
    (1..=ell).filter(|&s| gcd_raw(s, r) == 1).collect()
}

fn validate(n: usize, h: u64) -> Result<()> {
    if n < 2 {
        return domain("constructions need n ≥ 2");
    }
    if h == 0 {
        return domain("H must be at least 1");
    }
    Ok(())
}

fn power_sum(n: usize, h: u64, exponent: u32) -> Result<u128> {
    (1..=h).try_fold(0u128, |acc, r| {
        let k = row_choices(n, r).len() as u128;
        k.checked_pow(exponent)
            .and_then(|t| acc.checked_add(t))
            .ok_or_else(|| overflow("construction count"))
    })
}

/// Count of the fixed-denominator family: for each `r ≤ H` choose
/// `s_1, …, s_{n-1}` from [`row_choices`] and set `s_n = r - Σ s_j`.
/// The count is `Σ_{r ≤ H} |row_choices(n, r)|^{n-1}`.
pub fn lower_bound_construction(n: usize, h: u64, options: &RunOptions) -> Result<CountRecord> {
    let started = Instant::now();
    validate(n, h)?;
    let count = power_sum(n, h, n as u32 - 1)?;
    options.check("lower-bound construction", u64::try_from(count).ok())?;
    let mut record = CountRecord::new(Method::Construction, count, started).single_phase(count as u64);
    record.param("n", n).param("h", h);
    Ok(record)
}

/// The tuples `(s_1/r, …, s_n/r)` of the fixed-denominator family, in order of
/// `r` and then lexicographically in `(s_1, …, s_{n-1})`.
pub fn lower_bound_solutions(n: usize, h: u64) -> Result<impl Iterator<Item = SolutionTuple>> {
    validate(n, h)?;
    Ok((1..=h).flat_map(move |r| {
        let choices = row_choices(n, r);
        tuples(&choices, n - 1)
            .into_iter()
            .map(move |prefix| complete_row(&prefix, r))
    }))
}

fn complete_row(prefix: &[u64], r: u64) -> SolutionTuple {
    let last = r - prefix.iter().sum::<u64>();
    let mut row: Vec<Fraction> = prefix
        .iter()
        .map(|&s| Fraction::reduce(s, r).expect("r ≥ 1"))
        .collect();
    row.push(Fraction::reduce(last, r).expect("r ≥ 1"));
    SolutionTuple(row)
}

/// All `len`-tuples over `items`, lexicographic.
fn tuples(items: &[u64], len: usize) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                items.iter().map(move |&x| {
                    let mut next = t.clone();
                    next.push(x);
                    next
                })
            })
            .collect();
    }
    out
}

fn columns_sum_to_one(rows: &[&SolutionTuple]) -> Result<bool> {
    let n = rows[0].0.len();
    let mut column = Vec::with_capacity(rows.len());
    for j in 0..n {
        column.clear();
        column.extend(rows.iter().map(|row| row.0[j]));
        if !sums_to_one(&column)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every `n × n` matrix over `F(H)` with all row and column sums equal to 1:
/// `n`-tuples of unit-sum rows, filtered on the column sums.
pub fn doubly_stochastic_matrices_brute(n: usize, h: u64, options: &RunOptions) -> Result<Vec<Matrix>> {
    let (matrices, _) = doubly_brute_impl(n, h, options, true)?;
    Ok(matrices)
}

fn doubly_brute_impl(n: usize, h: u64, options: &RunOptions, keep: bool) -> Result<(Vec<Matrix>, (u64, u64))> {
    if n == 0 || h == 0 {
        return domain("n and H must be positive");
    }
    let rows = solutions_brute(n, h, options)?;
    let row_phase = predicted_candidates(n, h, Method::Brute)?.unwrap_or(u64::MAX);
    let combos = (rows.len() as u64).checked_pow(n as u32);
    options.check("doubly stochastic brute force", combos)?;
    let per_lead = parallel::try_map_indexed(rows.len(), options.workers, |lead| {
        let mut found = Vec::new();
        let mut hits = 0u64;
        let mut idx = vec![0usize; n];
        idx[0] = lead;
        loop {
            let chosen: Vec<&SolutionTuple> = idx.iter().map(|&i| &rows[i]).collect();
            if columns_sum_to_one(&chosen)? {
                hits += 1;
                if keep {
                    found.push(chosen.iter().map(|r| r.0.clone()).collect::<Matrix>());
                }
            }
            let mut k = n;
            loop {
                k -= 1;
                if k == 0 {
                    return Ok((found, hits));
                }
                if idx[k] + 1 < rows.len() {
                    idx[k] += 1;
                    break;
                }
                idx[k] = 0;
            }
        }
    })?;
    let hits = per_lead.iter().map(|p| p.1).sum();
    let matrices = per_lead.into_iter().flat_map(|p| p.0).collect();
    Ok((matrices, (hits, row_phase + combos.unwrap_or(u64::MAX))))
}

/// Number of doubly stochastic `n × n` matrices over `F(H)`.
pub fn count_doubly_brute(n: usize, h: u64, options: &RunOptions) -> Result<CountRecord> {
    let started = Instant::now();
    let (_, (hits, candidates)) = doubly_brute_impl(n, h, options, false)?;
    let mut record = CountRecord::new(Method::Brute, hits as u128, started).single_phase(candidates);
    record.param("n", n).param("h", h);
    Ok(record)
}

/// Matrices built at a common denominator `r ≤ H`: the first `n - 1` rows are
/// taken from the fixed-denominator family for `r`, and the last row is
/// `α_{n,j} = 1 - Σ_{i<n} α_{i,j}`. Candidates whose last row has a negative
/// entry are discarded. Returns the valid matrices and the number generated.
pub fn doubly_lower_matrices(n: usize, h: u64, options: &RunOptions) -> Result<(Vec<Matrix>, u64)> {
    validate(n, h)?;
    let generated = power_sum(n, h, ((n - 1) * (n - 1)) as u32)?;
    let generated = u64::try_from(generated).ok();
    options.check("doubly stochastic construction", generated)?;
    let mut out = Vec::new();
    for r in 1..=h {
        let rows: Vec<Vec<u64>> = tuples(&row_choices(n, r), n - 1)
            .into_iter()
            .map(|mut p| {
                p.push(r - p.iter().sum::<u64>());
                p
            })
            .collect();
        let row_ids: Vec<u64> = (0..rows.len() as u64).collect();
        for pick in tuples(&row_ids, n - 1) {
            let chosen: Vec<&Vec<u64>> = pick.iter().map(|&i| &rows[i as usize]).collect();
            let column_sums: Vec<u64> = (0..n).map(|j| chosen.iter().map(|row| row[j]).sum()).collect();
            if column_sums.iter().any(|&c| c > r) {
                continue;
            }
            let mut matrix: Matrix = chosen
                .iter()
                .map(|row| row.iter().map(|&s| Fraction::reduce(s, r).unwrap()).collect())
                .collect();
            matrix.push(column_sums.iter().map(|&c| Fraction::reduce(r - c, r).unwrap()).collect());
            out.push(matrix);
        }
    }
    Ok((out, generated.unwrap_or(u64::MAX)))
}

pub fn doubly_lower_construction(n: usize, h: u64, options: &RunOptions) -> Result<CountRecord> {
    let started = Instant::now();
    let (matrices, generated) = doubly_lower_matrices(n, h, options)?;
    let mut record =
        CountRecord::new(Method::Construction, matrices.len() as u128, started).single_phase(generated);
    record.param("n", n).param("h", h);
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::count_l_brute;
    use std::collections::HashSet;

    fn opts() -> RunOptions {
        RunOptions::default()
    }

    /// The construction's count by direct generation, independent of `power_sum`.
    fn brute_construction_count(n: usize, h: u64) -> u128 {
        let mut total = 0;
        for r in 1..=h {
            let ell = r / (n as u64 - 1);
            for prefix in tuples(&(1..=ell).collect::<Vec<_>>(), n - 1) {
                let prod: u64 = prefix.iter().product();
                if gcd_raw(prod, r) == 1 {
                    total += 1;
                }
            }
        }
        total
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(lower_bound_construction(2, 3, &opts()).unwrap().count, 4);
        assert_eq!(lower_bound_construction(2, 10, &opts()).unwrap().count, 32);
        assert_eq!(brute_construction_count(3, 2), 1);
        assert_eq!(lower_bound_construction(3, 2, &opts()).unwrap().count, 1);
        assert!(lower_bound_construction(1, 5, &opts()).is_err());
    }

    #[test]
    fn construction_count_matches_generation() {
        for n in 2..=4 {
            for h in 1..=20 {
                let formula = lower_bound_construction(n, h, &opts()).unwrap().count;
                assert_eq!(formula, brute_construction_count(n, h));
                assert_eq!(lower_bound_solutions(n, h).unwrap().count() as u128, formula);
            }
        }
    }

    #[test]
    fn emitted_tuples_are_distinct_valid_solutions() {
        for n in 2..=3 {
            for h in 1..=12 {
                let tuples: Vec<SolutionTuple> = lower_bound_solutions(n, h).unwrap().collect();
                let distinct: HashSet<&SolutionTuple> = tuples.iter().collect();
                assert_eq!(distinct.len(), tuples.len());
                assert!(tuples.iter().all(|t| t.is_unit_solution(h)));
                let l = count_l_brute(n, h, &opts()).unwrap().count;
                assert!(tuples.len() as u128 <= l);
            }
        }
    }

    #[test]
    fn doubly_brute_examples() {
        assert_eq!(count_doubly_brute(2, 1, &opts()).unwrap().count, 2);
        assert_eq!(count_doubly_brute(2, 2, &opts()).unwrap().count, 3);
        assert_eq!(count_doubly_brute(2, 10, &opts()).unwrap().count, 33);
        assert_eq!(count_doubly_brute(1, 4, &opts()).unwrap().count, 1);
    }

    #[test]
    fn doubly_set_closed_under_transpose() {
        for (n, h) in [(2, 6), (3, 1), (3, 2), (3, 3)] {
            let all: HashSet<Matrix> = doubly_stochastic_matrices_brute(n, h, &opts())
                .unwrap()
                .into_iter()
                .collect();
            for m in &all {
                let t: Matrix = (0..n).map(|j| (0..n).map(|i| m[i][j]).collect()).collect();
                assert!(all.contains(&t));
            }
        }
    }

    #[test]
    fn doubly_construction_examples() {
        assert_eq!(doubly_lower_construction(2, 3, &opts()).unwrap().count, 4);
        assert_eq!(doubly_lower_construction(2, 1, &opts()).unwrap().count, 1);
        let c = doubly_lower_construction(3, 3, &opts()).unwrap().count;
        assert!(c <= count_doubly_brute(3, 3, &opts()).unwrap().count);
    }

    #[test]
    fn doubly_construction_matrices_are_valid() {
        for (n, h) in [(2, 12), (3, 4), (3, 8), (4, 6)] {
            let (ms, generated) = doubly_lower_matrices(n, h, &opts()).unwrap();
            assert!(ms.len() as u64 <= generated);
            let distinct: HashSet<&Matrix> = ms.iter().collect();
            assert_eq!(distinct.len(), ms.len());
            for m in &ms {
                for i in 0..n {
                    assert!(SolutionTuple(m[i].clone()).is_unit_solution(h));
                    let col: Vec<Fraction> = (0..n).map(|k| m[k][i]).collect();
                    assert!(SolutionTuple(col).is_unit_solution(h));
                }
            }
        }
    }
}
