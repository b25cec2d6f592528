//! Command-line surface.

use crate::commands::{run, Outcome};
use crate::config::{parse_config_file, RunConfig, WORKERS_ENV};
use crate::error::{HarnessError, Result};
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "fareycount", version, about = "Exact counts of unit-sum equations in Farey fractions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// L_n(H): n-tuples of Farey fractions of order H summing to 1.
    CountL(Flags),
    /// S_n(H): n x n stochastic matrices over F(H).
    CountS(Flags),
    /// N_n(a; B0, B) for one instance, or a seeded batch with --samples.
    CountN(Flags),
    /// J_n: admissible denominator vectors below --bounds.
    Jn(Flags),
    /// Fixed-denominator lower-bound family (--emit-solutions writes CSV).
    LowerBound(Flags),
    /// Doubly stochastic matrices (--method brute|construction).
    Doubly(Flags),
    /// Moment of ratio exponential sums over primes in [Q, 2Q].
    ExpsumMoment(Flags),
    /// Orthogonality identity for one instance (--p) or a random batch.
    ExpsumVerify(Flags),
    /// Growth of L, S or J over an H grid with a log-log fit.
    Scaling(Flags),
    /// Run a bundled property suite: oracle, identity, construction, expsum.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub suite: String,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long = "h")]
    pub h: Option<String>,
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub bounds: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub box0: Option<String>,
    #[arg(long = "box", allow_hyphen_values = true)]
    pub bx: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub u: Option<String>,
    #[arg(long)]
    pub v: Option<String>,
    #[arg(long)]
    pub moment: Option<String>,
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub quantity: Option<String>,
    #[arg(long = "h-grid")]
    pub h_grid: Option<String>,
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub emit_solutions: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<String>,
    #[arg(long)]
    pub budget: Option<String>,
}

impl Flags {
    fn to_map(&self) -> BTreeMap<String, String> {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let pairs = [
            ("n", self.n.clone()),
            ("h", self.h.clone()),
            ("method", self.method.clone()),
            ("bounds", self.bounds.clone()),
            ("coeffs", self.coeffs.clone()),
            ("box0", self.box0.clone()),
            ("box", self.bx.clone()),
            ("q", self.q.clone()),
            ("a", self.a.clone()),
            ("u", self.u.clone()),
            ("v", self.v.clone()),
            ("moment", self.moment.clone()),
            ("p", self.p.clone()),
            ("quantity", self.quantity.clone()),
            ("h-grid", self.h_grid.clone()),
            ("samples", self.samples.clone()),
            ("seed", self.seed.clone()),
            ("emit-solutions", self.emit_solutions.then(|| "true".to_string())),
            ("out", path(&self.out)),
            ("cache", path(&self.cache)),
            ("workers", self.workers.clone()),
            ("budget", self.budget.clone()),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
            .collect()
    }
}

impl Command {
    fn parts(&self) -> (&'static str, &Flags, Option<&str>) {
        match self {
            Command::CountL(f) => ("count-l", f, None),
            Command::CountS(f) => ("count-s", f, None),
            Command::CountN(f) => ("count-n", f, None),
            Command::Jn(f) => ("jn", f, None),
            Command::LowerBound(f) => ("lower-bound", f, None),
            Command::Doubly(f) => ("doubly", f, None),
            Command::ExpsumMoment(f) => ("expsum-moment", f, None),
            Command::ExpsumVerify(f) => ("expsum-verify", f, None),
            Command::Scaling(f) => ("scaling", f, None),
            Command::Verify(v) => ("verify", &v.flags, Some(v.suite.as_str())),
        }
    }

    /// Builds the run configuration from flags, the config file, and the environment.
    pub fn config(&self) -> Result<RunConfig> {
        let (name, flags, suite) = self.parts();
        let mut map = flags.to_map();
        if let Some(s) = suite {
            map.insert("suite".into(), s.to_string());
        }
        let file = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| HarnessError::Usage(format!("cannot read config {}: {e}", path.display())))?;
                Some(parse_config_file(&text)?)
            }
            None => None,
        };
        RunConfig::resolve(name, map, file, std::env::var(WORKERS_ENV).ok())
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    run(&cli.command.config()?)
}
