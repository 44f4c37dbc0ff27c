//! Geometric rescaling algorithms for linear conic feasibility.
//!
//! The kernel problem asks for `x > 0` with `Ax = 0`, the image problem for
//! `y` with `Aᵀy > 0`. Both have maximum support versions: find solutions
//! whose supports `S*` and `T*` are as large as possible. The solvers pair
//! a first-order method with a rescaling of the space that grows a volume or
//! determinant potential whenever the first-order method is slow.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod conditioning;
pub mod error;
pub mod first_order;
pub mod image;
pub mod instance;
pub mod kernel;
pub mod linalg;
pub mod oracle;
pub mod report;

pub use certify::{check_complementary_pair, check_image_certificate, check_kernel_certificate, CertReport};
pub use conditioning::{condition_report, goffin_oracle, hadamard_delta, omega_oracle, theta, ConditionReport};
pub use error::{Error, Result};
pub use first_order::{FirstOrderMethod, FoKind};
pub use image::{full_support_image, max_support_image, ImageCertificate, ImageSolver};
pub use instance::{ConicInstance, Provenance};
pub use kernel::{full_support_kernel, max_support_kernel, KernelCertificate, KernelSolver, SolveOutcome};
pub use linalg::{Matrix, SymPosDef};
pub use oracle::{strict_conic_feasibility, PolyhedralOracle, SeparationOracle, SubprocessOracle};
pub use report::{SolveOptions, SolveReport, SolveStatus};
