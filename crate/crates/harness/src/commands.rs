//! Subcommand dispatch: parameters in, one result line (and optional CSV) out.

use crate::config::RunConfig;
use crate::error::{HarnessError, Result};
use crate::record::{append_line, cache_lookup, ResultLine};
use crate::scaling::{parse_grid, write_csv, GrowthFit, ScalingRow};
use crate::suites;
use fareycount::counting::{
    check_count_bound, count_doubly_brute, count_l, count_n_brute, count_s, doubly_lower_construction,
    lower_bound_construction, lower_bound_solutions, CoefficientVector, CountRecord, IntegerBox, Method,
    BOUND_SEED,
};
use fareycount::expsum::{moment_over_primes, orthogonality_check, ColumnDomain, MomentStats};
use fareycount::lcm_filter::{count_j, DenominatorVector};
use serde_json::{json, Map, Value};
use std::time::Instant;

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// The JSON result line, exactly as written to the cache.
    pub line: String,
    pub from_cache: bool,
    /// Set when a checked property failed; the line is still reported.
    pub failure: Option<String>,
}

struct Computed {
    outputs: Value,
    candidates: u64,
    table: Option<Vec<u8>>,
    failure: Option<String>,
}

impl Computed {
    fn plain(outputs: Value, candidates: u64) -> Computed {
        Computed { outputs, candidates, table: None, failure: None }
    }
}

/// JSON number when it fits in `u64`, decimal string otherwise.
pub fn count_json(c: u128) -> Value {
    match u64::try_from(c) {
        Ok(v) => json!(v),
        Err(_) => json!(c.to_string()),
    }
}

fn record_outputs(r: &CountRecord) -> Value {
    let mut m = Map::new();
    m.insert("method".into(), json!(r.method.as_str()));
    m.insert("count".into(), count_json(r.count));
    m.insert("filter_candidates".into(), json!(r.filter_candidates));
    m.insert("numerator_candidates".into(), json!(r.numerator_candidates));
    for (k, v) in &r.parameters {
        if !matches!(k.as_str(), "n" | "h" | "bounds" | "coeffs" | "box0" | "box") {
            m.insert(k.clone(), json!(v));
        }
    }
    Value::Object(m)
}

fn from_record(r: CountRecord) -> Computed {
    Computed::plain(record_outputs(&r), r.candidates_examined)
}

fn method(config: &RunConfig, allowed: &[Method]) -> Result<Method> {
    let m: Method = config.optional("method", Method::Fast)?;
    if !allowed.contains(&m) {
        return Err(HarnessError::Usage(format!("method {m} is not available for {}", config.subcommand)));
    }
    Ok(m)
}

fn writes_table(config: &RunConfig) -> Result<bool> {
    Ok(match config.subcommand.as_str() {
        "scaling" | "expsum-moment" => true,
        "lower-bound" => config.flag("emit-solutions")?,
        _ => false,
    })
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    let table = writes_table(config)? && config.output_path.is_some();
    if let (Some(cache), false) = (&config.cache_path, table) {
        if let Some(line) = cache_lookup(cache, config)? {
            return Ok(Outcome { line, from_cache: true, failure: None });
        }
    }
    let started = Instant::now();
    let computed = compute(config)?;
    let elapsed = started.elapsed().as_millis() as u64;
    let line = ResultLine::new(config, computed.outputs, computed.candidates, elapsed).to_json();
    if let Some(out) = &config.output_path {
        match &computed.table {
            Some(bytes) => std::fs::write(out, bytes)?,
            None => append_line(out, &line)?,
        }
    }
    if let (Some(cache), None) = (&config.cache_path, &computed.failure) {
        append_line(cache, &line)?;
    }
    Ok(Outcome { line, from_cache: false, failure: computed.failure })
}

fn compute(config: &RunConfig) -> Result<Computed> {
    let opts = config.options();
    match config.subcommand.as_str() {
        "count-l" => {
            let m = method(config, &[Method::Brute, Method::Naive, Method::Fast])?;
            Ok(from_record(count_l(config.require("n")?, config.require("h")?, m, &opts)?))
        }
        "count-s" => {
            let m = method(config, &[Method::Brute, Method::Naive, Method::Fast])?;
            Ok(from_record(count_s(config.require("n")?, config.require("h")?, m, &opts)?))
        }
        "count-n" => count_n(config),
        "jn" => {
            let bounds: DenominatorVector = config.require("bounds")?;
            Ok(from_record(count_j(bounds.as_slice(), &opts)?))
        }
        "lower-bound" => lower_bound(config),
        "doubly" => {
            let (n, h) = (config.require("n")?, config.require("h")?);
            match method(config, &[Method::Brute, Method::Construction])? {
                Method::Brute => Ok(from_record(count_doubly_brute(n, h, &opts)?)),
                _ => {
                    let r = doubly_lower_construction(n, h, &opts)?;
                    let mut c = from_record(r.clone());
                    c.outputs["generated"] = json!(r.candidates_examined);
                    Ok(c)
                }
            }
        }
        "expsum-moment" => expsum_moment(config),
        "expsum-verify" => expsum_verify(config),
        "scaling" => scaling(config),
        "verify" => {
            let suite: String = config.require("suite")?;
            let report = suites::run_suite(&suite, &opts)?;
            let failure = report.first_failure();
            Ok(Computed { outputs: report.to_json(), candidates: 0, table: None, failure })
        }
        other => Err(HarnessError::Usage(format!("unknown subcommand {other:?}"))),
    }
}

fn count_n(config: &RunConfig) -> Result<Computed> {
    let opts = config.options();
    if config.get("samples").is_some() {
        if config.get("coeffs").is_some() {
            return Err(HarnessError::Usage("--samples and --coeffs are exclusive".into()));
        }
        let report = check_count_bound(
            config.optional("n", 2)?,
            config.require("samples")?,
            config.optional("h", 40)?,
            config.optional("seed", BOUND_SEED)?,
            &opts,
        )?;
        let worst = report.samples.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio));
        let outputs = json!({
            "samples": report.samples.len(),
            "max_ratio": report.max_ratio,
            "cap": report.cap,
            "regression": report.regression,
            "worst": worst.map(|s| json!({
                "coeffs": s.coeffs.to_string(),
                "box0": s.box0.to_string(),
                "box": s.bx.to_string(),
                "count": count_json(s.count),
            })),
        });
        let failure = report
            .regression
            .then(|| format!("max ratio {} exceeds frozen cap {}", report.max_ratio, report.cap));
        let candidates = report
            .samples
            .iter()
            .map(|s| s.box0.volume().unwrap_or(0).saturating_mul(s.bx.volume().unwrap_or(0)))
            .sum();
        return Ok(Computed { outputs, candidates, table: None, failure });
    }
    let coeffs: CoefficientVector = config.require("coeffs")?;
    let box0: IntegerBox = config.require("box0")?;
    let bx: IntegerBox = config.require("box")?;
    Ok(from_record(count_n_brute(&coeffs, &box0, &bx, &opts)?))
}

fn lower_bound(config: &RunConfig) -> Result<Computed> {
    let (n, h): (usize, u64) = (config.require("n")?, config.require("h")?);
    let record = lower_bound_construction(n, h, &config.options())?;
    let mut c = from_record(record);
    if config.flag("emit-solutions")? {
        if config.output_path.is_none() {
            return Err(HarnessError::Usage("--emit-solutions needs --out".into()));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record((1..=n).map(|j| format!("alpha_{j}")))?;
        for t in lower_bound_solutions(n, h)? {
            w.write_record(t.csv_fields())?;
        }
        c.table = Some(w.into_inner().map_err(|e| HarnessError::Usage(e.to_string()))?);
    }
    Ok(c)
}

fn moment_json(m: &MomentStats) -> Value {
    json!({
        "q": m.q,
        "a": m.a,
        "n": m.n,
        "U": m.u_max,
        "V": m.v_max,
        "total": m.total,
        "bound_reference": m.bound_reference,
        "ratio": m.ratio,
        "primes": m.per_prime.len(),
    })
}

fn expsum_moment(config: &RunConfig) -> Result<Computed> {
    let q: u64 = config.require("q")?;
    let side = (q as f64).sqrt() as u64;
    let domain = ColumnDomain::rectangle(config.optional("u", side)?, config.optional("v", side)?)?;
    let stats = moment_over_primes(config.optional("a", 1)?, q, config.optional("moment", 1)?, &domain, &config.options())?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(MomentStats::CSV_HEADER)?;
    w.write_record(stats.csv_fields())?;
    let table = w.into_inner().map_err(|e| HarnessError::Usage(e.to_string()))?;
    let candidates = stats.per_prime.len() as u64 * domain.point_count();
    Ok(Computed { outputs: moment_json(&stats), candidates, table: Some(table), failure: None })
}

fn expsum_verify(config: &RunConfig) -> Result<Computed> {
    let opts = config.options();
    if let Some(p) = config.get("p") {
        let p = crate::config::parse_value::<u64>("p", p)?;
        let coeffs: CoefficientVector = config.require("coeffs")?;
        let box0: IntegerBox = config.require("box0")?;
        let bx: IntegerBox = config.require("box")?;
        let rep = orthogonality_check(&coeffs, p, &box0, &bx, &opts)?;
        let failure = (!rep.passes()).then(|| format!("residual {} for M = {}", rep.residual, rep.m));
        let outputs = json!({
            "p": p,
            "m": count_json(rep.m),
            "rhs_re": rep.rhs.re,
            "rhs_im": rep.rhs.im,
            "main_term": rep.main_term,
            "residual": rep.residual,
            "passed": rep.passes(),
        });
        return Ok(Computed { outputs, candidates: 0, table: None, failure });
    }
    let batch = suites::orthogonality_batch(config.optional("samples", 100)?, config.optional("seed", 1)?, &opts)?;
    let failure = (batch.failures > 0).then(|| format!("{} of {} instances failed", batch.failures, batch.instances));
    let outputs = json!({
        "instances": batch.instances,
        "failures": batch.failures,
        "max_relative_residual": batch.max_relative_residual,
    });
    Ok(Computed { outputs, candidates: 0, table: None, failure })
}

/// One point of a scaling experiment.
pub fn scaling_point(quantity: &str, n: usize, h: u64, method: Method, opts: &fareycount::RunOptions) -> Result<CountRecord> {
    Ok(match quantity {
        "L" => count_l(n, h, method, opts)?,
        "S" => count_s(n, h, method, opts)?,
        "J" => count_j(&vec![h; n], opts)?,
        other => return Err(HarnessError::Usage(format!("unknown quantity {other:?}, expected L, S or J"))),
    })
}

fn scaling(config: &RunConfig) -> Result<Computed> {
    let quantity: String = config.require("quantity")?;
    let n: usize = config.require("n")?;
    let grid = parse_grid(&config.require::<String>("h-grid")?)?;
    let m = method(config, &[Method::Brute, Method::Naive, Method::Fast])?;
    let opts = config.options();
    let mut rows = Vec::with_capacity(grid.len());
    for &h in &grid {
        let r = scaling_point(&quantity, n, h, m, &opts)?;
        rows.push(ScalingRow {
            n,
            h,
            count: r.count,
            candidates_examined: r.candidates_examined,
            elapsed_ms: r.elapsed.as_millis() as u64,
        });
    }
    let fit_of = |f: &dyn Fn(&ScalingRow) -> f64| -> Value {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.h as f64, f(r))).filter(|p| p.1 > 0.0).collect();
        match GrowthFit::power_law(&pts) {
            Ok(fit) => json!({"slope": fit.slope, "intercept": fit.intercept, "residual": fit.residual}),
            Err(_) => Value::Null,
        }
    };
    let outputs = json!({
        "quantity": quantity,
        "points": rows.len(),
        "counts": rows.iter().map(|r| count_json(r.count)).collect::<Vec<_>>(),
        "fit": fit_of(&|r| r.count as f64),
        "candidates_fit": fit_of(&|r| r.candidates_examined as f64),
    });
    let mut table = Vec::new();
    write_csv(&rows, &mut table)?;
    let candidates = rows.iter().map(|r| r.candidates_examined).sum();
    Ok(Computed { outputs, candidates, table: Some(table), failure: None })
}
