//! Solver reports, limits and options shared by all solvers.

use serde::{Deserialize, Serialize};

use crate::first_order::FoKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Solved,
    NoConverge,
    InfeasibleDetected,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Solved => "solved",
            SolveStatus::NoConverge => "no_converge",
            SolveStatus::InfeasibleDetected => "infeasible_detected",
        }
    }
}

/// A counter compared against a theoretical bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub bound: f64,
    pub observed: f64,
    pub pass: bool,
}

impl BoundCheck {
    pub fn at_most(name: &str, bound: f64, observed: f64) -> Self {
        BoundCheck { name: name.to_string(), bound, observed, pass: observed <= bound }
    }

    pub fn at_least(name: &str, bound: f64, observed: f64) -> Self {
        BoundCheck { name: name.to_string(), bound, observed, pass: observed >= bound }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub fo_iters: u64,
    pub rescalings: u64,
    pub removals: u64,
    pub residual: f64,
    pub margin: f64,
    pub wall_ms: f64,
    pub bound_checks: Vec<BoundCheck>,
}

impl SolveReport {
    pub fn new(status: SolveStatus) -> Self {
        SolveReport {
            status,
            fo_iters: 0,
            rescalings: 0,
            removals: 0,
            residual: 0.0,
            margin: 0.0,
            wall_ms: 0.0,
            bound_checks: Vec::new(),
        }
    }

    pub fn bounds_hold(&self) -> bool {
        self.bound_checks.iter().all(|b| b.pass)
    }
}

/// Caller-controlled limits and knobs. `None` selects the solver default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub max_rescalings: Option<u64>,
    pub max_iterations: Option<u64>,
    /// Overrides `ε = 1/(11m)`.
    pub epsilon: Option<f64>,
    /// Goffin measure known from generation; enables the bound checks.
    pub known_rho: Option<f64>,
    pub first_order: FoKind,
}

impl SolveOptions {
    pub fn with_known_rho(mut self, rho: f64) -> Self {
        self.known_rho = Some(rho);
        self
    }

    pub fn epsilon_for(&self, m: usize) -> f64 {
        let default = default_epsilon(m);
        match self.epsilon {
            Some(e) => {
                if e > default {
                    log::warn!("epsilon {e} exceeds 1/(11m) = {default}; the rescaling guarantees no longer hold");
                }
                e
            }
            None => default,
        }
    }
}

pub fn default_epsilon(m: usize) -> f64 {
    1.0 / (11.0 * m as f64)
}

/// Wall-clock timer that reads zero where no clock is available.
pub(crate) struct Stopwatch {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Stopwatch {
    pub(crate) fn start() -> Self {
        Stopwatch {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    pub(crate) fn elapsed_ms(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        {
            self.start.elapsed().as_secs_f64() * 1e3
        }
        #[cfg(target_arch = "wasm32")]
        {
            0.0
        }
    }
}
