use super::record::{CountRecord, Method};
use crate::error::{domain, Error, Result};
use crate::parallel;
use crate::rationals::{Accumulator, Fraction};
use crate::RunOptions;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

/// Ceiling for the largest observed `N / (H_1⋯H_n · log(H+2)^{2^n-1})` in the
/// seeded bound-check batch (n = 2, 200 instances, H_j ≤ 40, seed [`BOUND_SEED`]).
/// Calibrated once from that batch and frozen.
pub const BOUND_RATIO_CAP: f64 = 0.05554;

/// Seed of the calibrated batch.
pub const BOUND_SEED: u64 = 0x5eed_0001;

/// The box `[B_1 + 1, B_1 + H_1] × ⋯ × [B_n + 1, B_n + H_n]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegerBox {
    offsets: Vec<i64>,
    lengths: Vec<u64>,
}

impl IntegerBox {
    pub fn new(offsets: Vec<i64>, lengths: Vec<u64>) -> Result<IntegerBox> {
        if offsets.is_empty() || offsets.len() != lengths.len() {
            return domain("box offsets and lengths must be nonempty and of equal dimension");
        }
        if lengths.contains(&0) {
            return domain("box lengths must be positive");
        }
        for (&o, &l) in offsets.iter().zip(&lengths) {
            if o.checked_add(l as i64).is_none() || l > i64::MAX as u64 {
                return domain("box extends beyond i64");
            }
        }
        Ok(IntegerBox { offsets, lengths })
    }

    /// `[1, H_1] × ⋯ × [1, H_n]`.
    pub fn at_origin(lengths: Vec<u64>) -> Result<IntegerBox> {
        IntegerBox::new(vec![0; lengths.len()], lengths)
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn lengths(&self) -> &[u64] {
        &self.lengths
    }

    pub fn lower(&self, j: usize) -> i64 {
        self.offsets[j] + 1
    }

    pub fn upper(&self, j: usize) -> i64 {
        self.offsets[j] + self.lengths[j] as i64
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.dim() && (0..self.dim()).all(|j| self.lower(j) <= x[j] && x[j] <= self.upper(j))
    }

    pub fn volume(&self) -> Option<u64> {
        self.lengths.iter().try_fold(1u64, |a, &l| a.checked_mul(l))
    }

    /// Largest `|x_j|` over the box in coordinate `j`.
    fn max_abs(&self, j: usize) -> u64 {
        self.lower(j).unsigned_abs().max(self.upper(j).unsigned_abs())
    }

    #[cfg(test)]
    fn permuted(&self, perm: &[usize]) -> IntegerBox {
        IntegerBox {
            offsets: perm.iter().map(|&i| self.offsets[i]).collect(),
            lengths: perm.iter().map(|&i| self.lengths[i]).collect(),
        }
    }
}

impl fmt::Display for IntegerBox {
    /// `off:len,off:len,…`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .offsets
            .iter()
            .zip(&self.lengths)
            .map(|(o, l)| format!("{o}:{l}"))
            .collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for IntegerBox {
    type Err = Error;

    fn from_str(s: &str) -> Result<IntegerBox> {
        let mut offsets = Vec::new();
        let mut lengths = Vec::new();
        for part in s.split(',') {
            let (o, l) = part
                .split_once(':')
                .ok_or_else(|| Error::Domain(format!("box component {part:?} is not off:len")))?;
            offsets.push(
                o.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Domain(format!("bad offset {o:?}: {e}")))?,
            );
            lengths.push(
                l.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Domain(format!("bad length {l:?}: {e}")))?,
            );
        }
        IntegerBox::new(offsets, lengths)
    }
}

/// `(a_0, a_1, …, a_n)` with every `a_j`, `j ≥ 1`, nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoefficientVector {
    a0: BigInt,
    a: Vec<BigInt>,
}

impl CoefficientVector {
    pub fn new(a0: BigInt, a: Vec<BigInt>) -> Result<CoefficientVector> {
        if a.is_empty() {
            return domain("at least one coefficient a_1 is required");
        }
        if a.iter().any(Zero::is_zero) {
            return domain("coefficients a_1..a_n must be nonzero");
        }
        Ok(CoefficientVector { a0, a })
    }

    pub fn from_i64(a0: i64, a: &[i64]) -> Result<CoefficientVector> {
        CoefficientVector::new(a0.into(), a.iter().map(|&x| x.into()).collect())
    }

    pub fn a0(&self) -> &BigInt {
        &self.a0
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    #[cfg(test)]
    fn permuted(&self, perm: &[usize]) -> CoefficientVector {
        CoefficientVector {
            a0: self.a0.clone(),
            a: perm.iter().map(|&i| self.a[i].clone()).collect(),
        }
    }
}

impl fmt::Display for CoefficientVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.a0)?;
        for a in &self.a {
            write!(f, ",{a}")?;
        }
        Ok(())
    }
}

impl FromStr for CoefficientVector {
    type Err = Error;

    /// `a0,a1,…,an`.
    fn from_str(s: &str) -> Result<CoefficientVector> {
        let values = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|e| Error::Domain(format!("bad coefficient {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let (a0, rest) = values
            .split_first()
            .ok_or_else(|| Error::Domain("empty coefficient list".into()))?;
        CoefficientVector::new(a0.clone(), rest.to_vec())
    }
}

pub(crate) fn validate_instance(coeffs: &CoefficientVector, box0: &IntegerBox, bx: &IntegerBox) -> Result<()> {
    let n = coeffs.dim();
    if box0.dim() != n || bx.dim() != n {
        return domain(format!(
            "dimension mismatch: {n} coefficients, box0 of dim {}, box of dim {}",
            box0.dim(),
            bx.dim()
        ));
    }
    for j in 0..n {
        if box0.lower(j) <= 0 && box0.upper(j) >= 0 {
            return domain(format!("denominator range {j} contains 0"));
        }
    }
    Ok(())
}

/// Odometer over the integer points of a box, optionally pinning coordinate 0.
pub(crate) fn box_points(bx: &IntegerBox, lead: Option<i64>) -> impl Iterator<Item = Vec<i64>> + '_ {
    let n = bx.dim();
    let mut cur: Option<Vec<i64>> = Some((0..n).map(|j| bx.lower(j)).collect());
    if let (Some(c), Some(v)) = (cur.as_mut(), lead) {
        c[0] = v;
    }
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let next = cur.as_mut().unwrap();
        let stop = if lead.is_some() { 1 } else { 0 };
        let mut k = n;
        let exhausted = loop {
            if k == stop {
                break true;
            }
            k -= 1;
            if next[k] < bx.upper(k) {
                next[k] += 1;
                break false;
            }
            next[k] = bx.lower(k);
        };
        if exhausted {
            cur = None;
        }
        Some(out)
    })
}

/// Whether `Σ |a_j|·max|s_j|·Π max|r_i| + |a_0|·Π max|r_i|` fits comfortably in `i128`.
fn fits_i128(coeffs: &CoefficientVector, box0: &IntegerBox, bx: &IntegerBox) -> bool {
    let limit = BigInt::from(1u128 << 120);
    let p: BigInt = (0..box0.dim()).map(|j| BigInt::from(box0.max_abs(j))).product();
    let mut total = coeffs.a0.abs() * &p;
    for j in 0..coeffs.dim() {
        total += coeffs.a[j].abs() * BigInt::from(bx.max_abs(j)) * &p;
    }
    total < limit
}

/// Exact `N_n(a; B_0, B)`: assignments with `Σ a_j s_j / r_j = a_0`,
/// `r ∈ B_0`, `s ∈ B`, no coprimality required.
pub fn count_n_brute(
    coeffs: &CoefficientVector,
    box0: &IntegerBox,
    bx: &IntegerBox,
    options: &RunOptions,
) -> Result<CountRecord> {
    let started = Instant::now();
    validate_instance(coeffs, box0, bx)?;
    let predicted = box0
        .volume()
        .and_then(|v| bx.volume().and_then(|w| v.checked_mul(w)));
    options.check("N_n brute force", predicted)?;
    let leads: Vec<i64> = (box0.lower(0)..=box0.upper(0)).collect();
    let counts = if fits_i128(coeffs, box0, bx) {
        let a0 = coeffs.a0.to_i128().expect("checked by fits_i128");
        let a: Vec<i128> = coeffs.a.iter().map(|x| x.to_i128().unwrap()).collect();
        parallel::map_indexed(leads.len(), options.workers, |i| {
            count_for_lead_i128(a0, &a, box0, bx, leads[i])
        })
    } else {
        parallel::map_indexed(leads.len(), options.workers, |i| {
            count_for_lead_exact(coeffs, box0, bx, leads[i])
        })
    };
    let mut record = CountRecord::new(Method::Brute, counts.iter().sum::<u64>() as u128, started)
        .single_phase(predicted.unwrap_or(u64::MAX));
    record
        .param("coeffs", coeffs)
        .param("box0", box0)
        .param("box", bx);
    Ok(record)
}

/// Clears denominators: `Σ a_j s_j (P / r_j) = a_0 P` with `P = Π r_j`.
fn count_for_lead_i128(a0: i128, a: &[i128], box0: &IntegerBox, bx: &IntegerBox, lead: i64) -> u64 {
    let mut hits = 0u64;
    for r in box_points(box0, Some(lead)) {
        let p: i128 = r.iter().map(|&x| x as i128).product();
        let weights: Vec<i128> = r.iter().zip(a).map(|(&rj, &aj)| aj * (p / rj as i128)).collect();
        let target = a0 * p;
        for s in box_points(bx, None) {
            let lhs: i128 = s.iter().zip(&weights).map(|(&sj, &w)| w * sj as i128).sum();
            hits += (lhs == target) as u64;
        }
    }
    hits
}

fn count_for_lead_exact(coeffs: &CoefficientVector, box0: &IntegerBox, bx: &IntegerBox, lead: i64) -> u64 {
    let mut hits = 0u64;
    let target = Accumulator::from_integer(coeffs.a0.clone());
    for r in box_points(box0, Some(lead)) {
        for s in box_points(bx, None) {
            let mut acc = Accumulator::zero();
            for j in 0..r.len() {
                // Carry signs on the coefficient so the fraction stays nonnegative.
                let negative = (r[j] < 0) != (s[j] < 0);
                let f = Fraction::reduce(s[j].unsigned_abs(), r[j].unsigned_abs())
                    .expect("denominator ranges exclude 0");
                let c = if negative { -&coeffs.a[j] } else { coeffs.a[j].clone() };
                acc = acc.accumulate(&c, &f);
            }
            hits += (acc == target) as u64;
        }
    }
    hits
}

/// Permutes coordinates `1..n` of an instance simultaneously.
#[cfg(test)]
pub(crate) fn permute_instance(
    coeffs: &CoefficientVector,
    box0: &IntegerBox,
    bx: &IntegerBox,
    perm: &[usize],
) -> (CoefficientVector, IntegerBox, IntegerBox) {
    (coeffs.permuted(perm), box0.permuted(perm), bx.permuted(perm))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundSample {
    pub coeffs: CoefficientVector,
    pub box0: IntegerBox,
    pub bx: IntegerBox,
    pub count: u128,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub seed: u64,
    pub samples: Vec<BoundSample>,
    pub max_ratio: f64,
    pub cap: f64,
    /// Set when `max_ratio` exceeds `cap`.
    pub regression: bool,
}

/// `N / (H_1⋯H_n · log(H + 2)^{2^n - 1})` with `H = max H_j`.
pub fn bound_ratio(count: u128, lengths: &[u64]) -> f64 {
    if count == 0 {
        return 0.0;
    }
    let h = *lengths.iter().max().unwrap_or(&1) as f64;
    let volume: f64 = lengths.iter().map(|&l| l as f64).product();
    let exponent = (1u64 << lengths.len()) as f64 - 1.0;
    count as f64 / (volume * (h + 2.0).ln().powf(exponent))
}

/// Random instances with `H_j ≤ h_max`, `1 ≤ |a_j| ≤ 10`, `|a_0| ≤ 10`,
/// offsets `|B_j| ≤ 100`, denominators in the box at the origin.
pub fn check_count_bound(
    n: usize,
    samples: usize,
    h_max: u64,
    seed: u64,
    options: &RunOptions,
) -> Result<BoundReport> {
    if n == 0 || h_max == 0 {
        return domain("n and h_max must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let lengths: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=h_max)).collect();
        let a: Vec<i64> = (0..n)
            .map(|_| {
                let m = rng.gen_range(1..=10i64);
                if rng.gen_bool(0.5) { -m } else { m }
            })
            .collect();
        let a0 = rng.gen_range(-10..=10i64);
        let offsets: Vec<i64> = (0..n).map(|_| rng.gen_range(-100..=100i64)).collect();
        let coeffs = CoefficientVector::from_i64(a0, &a)?;
        let box0 = IntegerBox::at_origin(lengths.clone())?;
        let bx = IntegerBox::new(offsets, lengths.clone())?;
        let count = count_n_brute(&coeffs, &box0, &bx, options)?.count;
        out.push(BoundSample {
            ratio: bound_ratio(count, &lengths),
            coeffs,
            box0,
            bx,
            count,
        });
    }
    let max_ratio = out.iter().map(|s| s.ratio).fold(0.0, f64::max);
    Ok(BoundReport {
        n,
        seed,
        samples: out,
        max_ratio,
        cap: BOUND_RATIO_CAP,
        regression: max_ratio > BOUND_RATIO_CAP,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> RunOptions {
        RunOptions::default()
    }

    fn n_count(c: &str, b0: &str, b: &str) -> u128 {
        count_n_brute(&c.parse().unwrap(), &b0.parse().unwrap(), &b.parse().unwrap(), &opts())
            .unwrap()
            .count
    }

    #[test]
    fn n_examples() {
        for h in 1..=12 {
            let bx = format!("0:{h}");
            assert_eq!(n_count("1,1", &bx, &bx), h as u128);
        }
        assert_eq!(n_count("-1,1", "0:9", "0:9"), 0);
        assert_eq!(n_count("0,1,-1", "0:2,0:2", "0:2,0:2"), 6);
    }

    /// Direct oracle over big rationals, independent of both counting paths.
    fn oracle(coeffs: &CoefficientVector, box0: &IntegerBox, bx: &IntegerBox) -> u128 {
        use num_rational::BigRational;
        let target = BigRational::from_integer(coeffs.a0().clone());
        let mut hits = 0;
        for r in box_points(box0, None) {
            for s in box_points(bx, None) {
                let sum: BigRational = (0..r.len())
                    .map(|j| {
                        BigRational::new(coeffs.coefficients()[j].clone() * s[j], r[j].into())
                    })
                    .sum();
                hits += (sum == target) as u128;
            }
        }
        hits
    }

    #[test]
    fn both_paths_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.gen_range(1..=2usize);
            let lengths: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=5)).collect();
            let a: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=4) * [-1, 1][rng.gen_range(0..2)]).collect();
            let coeffs = CoefficientVector::from_i64(rng.gen_range(-3..=3), &a).unwrap();
            let off0: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=3)).collect();
            let box0 = IntegerBox::new(off0, lengths.clone()).unwrap();
            let bx = IntegerBox::new((0..n).map(|_| rng.gen_range(-6..=6)).collect(), lengths).unwrap();
            let expected = oracle(&coeffs, &box0, &bx);
            let fast = count_n_brute(&coeffs, &box0, &bx, &opts()).unwrap().count;
            let lead = box0.lower(0);
            let exact: u64 = (lead..=box0.upper(0))
                .map(|l| count_for_lead_exact(&coeffs, &box0, &bx, l))
                .sum();
            assert_eq!(fast, expected);
            assert_eq!(exact as u128, expected);
        }
    }

    #[test]
    fn huge_coefficients_use_exact_path() {
        let big = BigInt::from(10u8).pow(50);
        let coeffs = CoefficientVector::new(BigInt::zero(), vec![big.clone(), -big]).unwrap();
        let b: IntegerBox = "0:3,0:3".parse().unwrap();
        assert!(!fits_i128(&coeffs, &b, &b));
        // s1/r1 = s2/r2 over [1,3]^4.
        let small = CoefficientVector::from_i64(0, &[1, -1]).unwrap();
        let expected = count_n_brute(&small, &b, &b, &opts()).unwrap().count;
        assert_eq!(count_n_brute(&coeffs, &b, &b, &opts()).unwrap().count, expected);
    }

    #[test]
    fn permutation_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let n = 3;
            let lengths: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
            let a: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=3) * [-1, 1][rng.gen_range(0..2)]).collect();
            let coeffs = CoefficientVector::from_i64(rng.gen_range(-2..=2), &a).unwrap();
            let box0 = IntegerBox::at_origin(lengths.clone()).unwrap();
            let bx = IntegerBox::new((0..n).map(|_| rng.gen_range(-4..=4)).collect(), lengths).unwrap();
            let base = count_n_brute(&coeffs, &box0, &bx, &opts()).unwrap().count;
            for perm in [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                let (c, b0, b) = permute_instance(&coeffs, &box0, &bx, &perm);
                assert_eq!(count_n_brute(&c, &b0, &b, &opts()).unwrap().count, base);
            }
        }
    }

    #[test]
    fn validation() {
        assert!(CoefficientVector::from_i64(1, &[0]).is_err());
        assert!(CoefficientVector::from_i64(1, &[]).is_err());
        assert!("3".parse::<CoefficientVector>().is_err());
        assert!(IntegerBox::new(vec![0], vec![0]).is_err());
        assert!(IntegerBox::new(vec![0, 1], vec![1]).is_err());
        let c = CoefficientVector::from_i64(1, &[1]).unwrap();
        let zero_den: IntegerBox = "-1:3".parse().unwrap();
        let ok: IntegerBox = "0:3".parse().unwrap();
        assert!(count_n_brute(&c, &zero_den, &ok, &opts()).is_err());
        let two: IntegerBox = "0:3,0:3".parse().unwrap();
        assert!(count_n_brute(&c, &ok, &two, &opts()).is_err());
        let tiny = opts().with_budget(8);
        assert!(matches!(
            count_n_brute(&c, &ok, &ok, &tiny),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn box_text_round_trip() {
        let b: IntegerBox = "-3:4, 10:2".parse().unwrap();
        assert_eq!(b.to_string(), "-3:4,10:2");
        assert!(b.contains(&[-2, 11]));
        assert!(!b.contains(&[-3, 11]));
        assert!(b.contains(&[1, 12]));
        let c: CoefficientVector = "0,1,-1".parse().unwrap();
        assert_eq!(c.to_string(), "0,1,-1");
    }

    #[test]
    fn bound_ratio_examples() {
        let r = bound_ratio(10, &[10]);
        assert!((r - 10.0 / (10.0 * 12f64.ln())).abs() < 1e-12);
        assert!((r - 0.4024).abs() < 1e-3);
        assert_eq!(bound_ratio(0, &[5, 7]), 0.0);
    }

    #[test]
    fn theorem1_report_is_reproducible() {
        let a = check_count_bound(2, 10, 12, 99, &opts()).unwrap();
        let b = check_count_bound(2, 10, 12, 99, &opts().with_workers(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.samples.len(), 10);
        for s in &a.samples {
            assert!(s.coeffs.coefficients().iter().all(|x| x.abs() <= 10.into()));
            assert!(s.bx.offsets().iter().all(|o| o.abs() <= 100));
            assert!(s.box0.offsets().iter().all(|&o| o == 0));
        }
    }
}
