use crate::error::{Error, Result};

/// Limits and parallelism shared by all counting operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Maximum number of candidates an operation may examine.
    pub work_budget: u64,
    /// Number of worker threads; results never depend on it.
    pub workers: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            work_budget: 2_000_000_000,
            workers: 1,
        }
    }
}

impl RunOptions {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn with_budget(mut self, work_budget: u64) -> Self {
        self.work_budget = work_budget;
        self
    }

    /// Fails fast when a predicted candidate count is above the budget.
    /// `None` means the prediction itself overflowed `u64`.
    pub fn check(&self, what: &str, predicted: Option<u64>) -> Result<()> {
        match predicted {
            Some(p) if p <= self.work_budget => Ok(()),
            Some(p) => Err(Error::Resource(format!(
                "{what}: predicted {p} candidates exceeds work budget {}",
                self.work_budget
            ))),
            None => Err(Error::Resource(format!(
                "{what}: predicted candidate count overflows u64 (budget {})",
                self.work_budget
            ))),
        }
    }
}
