//! Instances: generation with controlled condition, exact small-scale oracles,
//! text I/O and the LP feasibility front end.

pub mod exact;
pub mod generate;
pub mod io;
pub mod lp;

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;

pub use exact::{exact_support_oracle, lp_feasible_exact, SupportSplit};
pub use generate::{gen_degenerate, gen_image_feasible, gen_kernel_feasible};
pub use io::{parse_certificate, parse_instance, write_certificate, write_instance, CertificateFile, CertificateKind};
pub use lp::{recover_lp_solution, reduce_lp_feasibility, solve_lp_feasibility, LpFeasibilityProblem, LpVerdict};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Generated { family: String, seed: u64 },
    Parsed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConicInstance {
    pub a: Matrix,
    pub is_integer: bool,
    pub provenance: Provenance,
    /// Goffin measure, or a lower bound for image-feasible families.
    pub known_rho: Option<f64>,
    /// `(S*, T*)`, 0-based.
    pub known_supports: Option<(Vec<usize>, Vec<usize>)>,
}

impl ConicInstance {
    pub fn new(a: Matrix, provenance: Provenance) -> Self {
        ConicInstance { is_integer: a.is_integral(), a, provenance, known_rho: None, known_supports: None }
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    pub fn column_norms(&self) -> Vec<f64> {
        self.a.column_norms()
    }

    pub fn encoding_length(&self) -> Option<u64> {
        crate::conditioning::encoding_length(&self.a).ok()
    }
}
