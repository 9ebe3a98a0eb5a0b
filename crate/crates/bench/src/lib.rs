//! Shared fixtures for the criterion benches.

use qfem_core::fem::FemProblem1D;
use qfem_core::oracle::OracleConfig;

/// The 8-node chain the end-to-end benches run on.
pub fn bench_problem() -> FemProblem1D {
    FemProblem1D::new(8, 1.0, 1.0, (0.0, 1.0), vec![(1, 1)], None).unwrap()
}

pub fn bench_config() -> OracleConfig {
    OracleConfig::new(12, 10, 3, 3)
}
