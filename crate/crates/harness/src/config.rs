//! Run configuration: flags, an optional `key=value` file, and environment.

use crate::error::{HarnessError, Result};
use fareycount::RunOptions;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

pub const WORKERS_ENV: &str = "FAREYCOUNT_WORKERS";

/// Keys that control execution but do not identify a computation.
pub const META_KEYS: [&str; 4] = ["workers", "budget", "out", "cache"];

/// Subcommands and the parameter keys each accepts.
pub const SUBCOMMANDS: [(&str, &[&str]); 10] = [
    ("count-l", &["n", "h", "method"]),
    ("count-s", &["n", "h", "method"]),
    ("count-n", &["coeffs", "box0", "box", "n", "h", "samples", "seed"]),
    ("jn", &["bounds"]),
    ("lower-bound", &["n", "h", "emit-solutions"]),
    ("doubly", &["n", "h", "method"]),
    ("expsum-moment", &["a", "q", "moment", "u", "v"]),
    ("expsum-verify", &["coeffs", "box0", "box", "p", "samples", "seed"]),
    ("scaling", &["quantity", "n", "h-grid", "method"]),
    ("verify", &["suite"]),
];

pub fn allowed_keys(subcommand: &str) -> Option<&'static [&'static str]> {
    SUBCOMMANDS.iter().find(|(s, _)| *s == subcommand).map(|(_, k)| *k)
}

/// A validated run: the subcommand, its parameters, and execution settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub subcommand: String,
    pub parameters: BTreeMap<String, String>,
    pub work_budget: u64,
    pub workers: usize,
    pub output_path: Option<PathBuf>,
    pub cache_path: Option<PathBuf>,
}

/// Parses a flat `key=value` file; blank lines and `#` comments are skipped.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        out.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(out)
}

impl RunConfig {
    /// Merges sources with precedence flags > config file > environment
    /// (the environment supplies only the worker count).
    pub fn resolve(
        subcommand: &str,
        flags: BTreeMap<String, String>,
        file: Option<BTreeMap<String, String>>,
        env_workers: Option<String>,
    ) -> Result<RunConfig> {
        let allowed = allowed_keys(subcommand)
            .ok_or_else(|| HarnessError::Usage(format!("unknown subcommand {subcommand:?}")))?;
        let mut merged = file.unwrap_or_default();
        merged.extend(flags);
        for key in merged.keys() {
            if !allowed.contains(&key.as_str()) && !META_KEYS.contains(&key.as_str()) {
                return Err(HarnessError::Usage(format!("unknown key {key:?} for {subcommand}")));
            }
        }
        let workers = match merged.remove("workers").or(env_workers) {
            Some(w) => parse_value::<usize>("workers", &w)?,
            None => 1,
        };
        if workers == 0 {
            return Err(HarnessError::Usage("workers must be positive".into()));
        }
        let work_budget = match merged.remove("budget") {
            Some(b) => parse_value::<u64>("budget", &b)?,
            None => RunOptions::default().work_budget,
        };
        let output_path = merged.remove("out").map(PathBuf::from);
        let cache_path = merged.remove("cache").map(PathBuf::from);
        Ok(RunConfig {
            subcommand: subcommand.to_string(),
            parameters: merged,
            work_budget,
            workers,
            output_path,
            cache_path,
        })
    }

    pub fn options(&self) -> RunOptions {
        RunOptions::default()
            .with_workers(self.workers)
            .with_budget(self.work_budget)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.parameters.get(key).map(String::as_str)
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        let v = self
            .get(key)
            .ok_or_else(|| HarnessError::Usage(format!("{} requires --{key}", self.subcommand)))?;
        parse_value(key, v)
    }

    pub fn optional<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            Some(v) => parse_value(key, v),
            None => Ok(default),
        }
    }

    pub fn flag(&self, key: &str) -> Result<bool> {
        self.optional(key, false)
    }

    /// Cache key: subcommand and identifying parameters, in key order.
    pub fn cache_key(&self) -> String {
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{} {}", self.subcommand, params.join(" "))
    }
}

pub fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| HarnessError::Usage(format!("invalid value {v:?} for {key}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn precedence() {
        let file = map(&[("n", "3"), ("h", "5"), ("workers", "2")]);
        let c = RunConfig::resolve("count-l", map(&[("h", "7")]), Some(file.clone()), Some("9".into())).unwrap();
        assert_eq!(c.get("n"), Some("3"));
        assert_eq!(c.get("h"), Some("7"));
        assert_eq!(c.workers, 2);
        let c = RunConfig::resolve("count-l", map(&[("workers", "4")]), Some(file), Some("9".into())).unwrap();
        assert_eq!(c.workers, 4);
        let c = RunConfig::resolve("count-l", map(&[]), None, Some("9".into())).unwrap();
        assert_eq!(c.workers, 9);
        let c = RunConfig::resolve("count-l", map(&[]), None, None).unwrap();
        assert_eq!(c.workers, 1);
    }

    #[test]
    fn rejects_unknown_keys() {
        let e = RunConfig::resolve("jn", map(&[("h", "3")]), None, None).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = RunConfig::resolve("jn", map(&[]), Some(map(&[("colour", "red")])), None).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(RunConfig::resolve("nope", map(&[]), None, None).is_err());
        assert!(RunConfig::resolve("jn", map(&[]), None, Some("x".into())).is_err());
    }

    #[test]
    fn config_file_syntax() {
        let m = parse_config_file("# comment\n\nn = 3\nh_grid=2:8:2\n").unwrap();
        assert_eq!(m, map(&[("n", "3"), ("h-grid", "2:8:2")]));
        assert!(parse_config_file("n 3").is_err());
    }

    #[test]
    fn cache_key_ignores_execution_settings() {
        let a = RunConfig::resolve("count-l", map(&[("n", "2"), ("h", "5"), ("workers", "1")]), None, None).unwrap();
        let b = RunConfig::resolve("count-l", map(&[("h", "5"), ("n", "2"), ("workers", "4"), ("budget", "99")]), None, None)
            .unwrap();
        assert_eq!(a.cache_key(), b.cache_key());
    }
}
