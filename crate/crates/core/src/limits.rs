use std::env;

use serde::Serialize;
use thiserror::Error;

use crate::exec::Execution;

/// Default cap on explicit or symbolic graph nodes.
pub const DEFAULT_NODE_CAP: usize = 5_000_000;
/// Default cap on basis elements during backward coverability.
pub const DEFAULT_BASIS_CAP: usize = 1_000_000;
/// Default cap on unknowns in the exact linear solve.
pub const DEFAULT_SOLVE_CAP: usize = 4_000;

/// Environment variables overriding the defaults above.
pub const NODE_CAP_ENV: &str = "REGCUT_NODE_CAP";
pub const BASIS_CAP_ENV: &str = "REGCUT_BASIS_CAP";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize)]
#[error("{what} exceeded the cap of {cap}")]
pub struct ResourceLimit {
    pub what: &'static str,
    pub cap: usize,
}

/// Resource caps and execution mode shared by every analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub node_cap: usize,
    pub basis_cap: usize,
    pub solve_cap: usize,
    pub exec: Execution,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            node_cap: DEFAULT_NODE_CAP,
            basis_cap: DEFAULT_BASIS_CAP,
            solve_cap: DEFAULT_SOLVE_CAP,
            exec: Execution::default(),
        }
    }
}

impl Limits {
    /// Defaults, overridden by [`NODE_CAP_ENV`] and [`BASIS_CAP_ENV`] when set
    /// to a valid integer.
    pub fn from_env() -> Self {
        let read = |key: &str| env::var(key).ok().and_then(|v| v.trim().parse().ok());
        let mut l = Limits::default();
        if let Some(n) = read(NODE_CAP_ENV) {
            l.node_cap = n;
        }
        if let Some(n) = read(BASIS_CAP_ENV) {
            l.basis_cap = n;
        }
        l
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_node_cap(mut self, cap: usize) -> Self {
        self.node_cap = cap;
        self
    }
}
