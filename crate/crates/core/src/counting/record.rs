use crate::error::{Error, Result};
use crate::rationals::{Accumulator, Fraction};
use num_bigint::BigInt;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Brute,
    Naive,
    Fast,
    Construction,
    /// Admissible-vector enumeration (`J_n`).
    Filter,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Naive => "naive",
            Method::Fast => "fast",
            Method::Construction => "construction",
            Method::Filter => "filter",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "brute" => Ok(Method::Brute),
            "naive" => Ok(Method::Naive),
            "fast" => Ok(Method::Fast),
            "construction" => Ok(Method::Construction),
            "filter" => Ok(Method::Filter),
            other => Err(Error::Domain(format!("unknown method {other:?}"))),
        }
    }
}

/// Outcome of one counting run.
#[derive(Debug, Clone, PartialEq)]
pub struct CountRecord {
    pub method: Method,
    pub parameters: BTreeMap<String, String>,
    pub count: u128,
    /// All probes, `filter_candidates + numerator_candidates`.
    pub candidates_examined: u64,
    /// Denominator-vector probes (admissibility phase).
    pub filter_candidates: u64,
    /// Numerator-prefix probes (or whole tuples for single-phase methods).
    pub numerator_candidates: u64,
    pub elapsed: Duration,
}

impl CountRecord {
    pub(crate) fn new(method: Method, count: u128, started: Instant) -> CountRecord {
        CountRecord {
            method,
            parameters: BTreeMap::new(),
            count,
            candidates_examined: 0,
            filter_candidates: 0,
            numerator_candidates: 0,
            elapsed: started.elapsed(),
        }
    }

    pub(crate) fn param(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub(crate) fn single_phase(mut self, candidates: u64) -> Self {
        self.numerator_candidates = candidates;
        self.candidates_examined = candidates;
        self
    }
}

/// An n-tuple of canonical fractions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SolutionTuple(pub Vec<Fraction>);

impl SolutionTuple {
    /// Independent check: every entry in `F(h)` and the entries sum exactly to 1.
    pub fn is_unit_solution(&self, h: u64) -> bool {
        let one = BigInt::from(1);
        let sum = self
            .0
            .iter()
            .fold(Accumulator::zero(), |acc, f| acc.accumulate(&one, f));
        self.0.iter().all(|f| f.in_farey(h)) && sum.to_fraction() == Some(Fraction::ONE)
    }

    /// The CSV row of canonical `s/r` strings.
    pub fn csv_fields(&self) -> Vec<String> {
        self.0.iter().map(Fraction::to_string).collect()
    }
}

impl fmt::Display for SolutionTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.csv_fields().join(","))
    }
}
