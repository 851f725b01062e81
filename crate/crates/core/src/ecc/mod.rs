//! Edge clique cover solvers.
//!
//! - [`exact_min_ecc`]: branch and bound over maximal cliques, optionally
//!   enumerating every minimum cover (a single one certifies that the MCM
//!   graph is identifiable).
//! - [`heuristic_ecc`]: greedy clique growing plus a redundancy pass, for
//!   graphs past the exact solver's cap.
//! - [`pure_child_ecc`]: exact when every latent has a pure child, detected
//!   through simplicial vertices; signals a precondition violation otherwise.
//! - [`solve`]: mode dispatch with fallbacks recorded in the solution.

mod cliques;
mod exact;
mod heuristic;
mod pure_child;

pub use cliques::maximal_cliques;
pub use exact::exact_min_ecc;
pub use heuristic::heuristic_ecc;
pub use pure_child::pure_child_ecc;

use serde::{Deserialize, Serialize};

use crate::graphs::{CliqueCover, UndirectedGraph};
use crate::{NcfaError, Result};

pub const DEFAULT_EXACT_CAP: usize = 14;

/// Hard limit of the bitmask representation used by the exact solver.
pub const EXACT_HARD_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Exact,
    Heuristic,
    PureChild,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    #[default]
    Auto,
    Exact,
    Heuristic,
    PureChild,
}

impl std::str::FromStr for SolveMode {
    type Err = NcfaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SolveMode::Auto),
            "exact" => Ok(SolveMode::Exact),
            "heuristic" => Ok(SolveMode::Heuristic),
            "pure-child" => Ok(SolveMode::PureChild),
            other => Err(NcfaError::InvalidInput(format!(
                "unknown solver {other:?} (expected auto, exact, heuristic or pure-child)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EccConfig {
    pub exact_cap: usize,
    /// Enumerate every minimum cover when the exact solver runs.
    pub enumerate_all: bool,
}

impl Default for EccConfig {
    fn default() -> Self {
        EccConfig {
            exact_cap: DEFAULT_EXACT_CAP,
            enumerate_all: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EccSolution {
    pub cover: CliqueCover,
    pub is_certified_minimum: bool,
    /// Number of distinct minimum covers, when enumeration ran.
    pub minimum_covers_found: Option<usize>,
    /// Every minimum cover in canonical form, when enumeration ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimum_covers: Option<Vec<Vec<Vec<usize>>>>,
    pub solver: SolverKind,
    /// Why the requested solver was not the one that produced the cover.
    pub fallback: Option<String>,
    pub nodes_expanded: u64,
}

impl EccSolution {
    /// The minimum cover is unique, which identifies the MCM graph.
    pub fn is_identifiable(&self) -> Option<bool> {
        self.minimum_covers_found.map(|c| c == 1)
    }
}

/// Runs the solver selected by `mode`. `Auto` picks exact up to the cap and
/// the heuristic beyond it. `PureChild` falls back the same way when the
/// graph lacks the pure-child structure.
pub fn solve(
    graph: &UndirectedGraph,
    mode: SolveMode,
    seed: u64,
    config: &EccConfig,
) -> Result<EccSolution> {
    let cap = config.exact_cap.min(EXACT_HARD_LIMIT);
    match mode {
        SolveMode::Exact => exact_min_ecc(graph, config.enumerate_all, config.exact_cap),
        SolveMode::Heuristic => Ok(heuristic_ecc(graph, seed)),
        SolveMode::Auto => {
            if graph.n() <= cap {
                exact_min_ecc(graph, config.enumerate_all, config.exact_cap)
            } else {
                Ok(heuristic_ecc(graph, seed))
            }
        }
        SolveMode::PureChild => match pure_child_ecc(graph) {
            Ok(sol) => Ok(sol),
            Err(NcfaError::PreconditionViolated(why)) => {
                let mut sol = solve(graph, SolveMode::Auto, seed, config)?;
                sol.fallback = Some(format!("pure-child precondition violated: {why}"));
                Ok(sol)
            }
            Err(other) => Err(other),
        },
    }
}
