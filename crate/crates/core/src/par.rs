//! Execution mode and leaf budgets shared by the exhaustive checks.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Default cap on explored leaves.
pub const DEFAULT_BUDGET: u64 = 1 << 26;

/// How per-input work is scheduled. Without the `parallel` feature both
/// modes run on the calling thread.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// Maps `f` over `0..count`, keeping results in index order.
pub fn map_range<T, F>(exec: Exec, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..count).into_par_iter().map(f).collect()
        }
        _ => (0..count).map(f).collect(),
    }
}

/// A shared, thread-safe leaf counter.
#[derive(Debug)]
pub struct Budget {
    limit: u64,
    used: AtomicU64,
    what: String,
    required: String,
}

impl Budget {
    /// `required` names the naive worst case, reported on overflow.
    pub fn new(limit: u64, what: impl Into<String>, required: impl Into<String>) -> Self {
        Self {
            limit,
            used: AtomicU64::new(0),
            what: what.into(),
            required: required.into(),
        }
    }

    pub fn charge(&self, amount: u64) -> Result<()> {
        let before = self.used.fetch_add(amount, Ordering::Relaxed);
        if before + amount > self.limit {
            return Err(Error::Budget {
                what: self.what.clone(),
                required: self.required.clone(),
                budget: self.limit,
            });
        }
        Ok(())
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed).min(self.limit)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }
}

/// Options for every exhaustive check.
#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub budget: u64,
    pub exec: Exec,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            exec: Exec::default(),
        }
    }
}

impl CheckOptions {
    pub fn sequential(self) -> Self {
        Self {
            exec: Exec::Sequential,
            ..self
        }
    }

    pub fn with_budget(self, budget: u64) -> Self {
        Self { budget, ..self }
    }
}

/// Folds the first error out of per-item results, preserving order.
pub fn collect_results<T>(items: Vec<Result<T>>) -> Result<Vec<T>> {
    items.into_iter().collect()
}

/// `2^e` rendered for budget messages.
pub fn pow2_label(e: usize) -> String {
    format!("2^{e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_keeps_order() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            assert_eq!(map_range(exec, 5, |i| i * i), vec![0, 1, 4, 9, 16]);
        }
    }

    #[test]
    fn budget_overflow_names_requirement() {
        let b = Budget::new(3, "test", "2^5");
        b.charge(3).unwrap();
        let e = b.charge(1).unwrap_err();
        assert!(e.to_string().contains("2^5"), "{e}");
    }
}
