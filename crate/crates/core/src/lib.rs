//! Matrix Lipschitz seminorms on concrete operator systems, the matrix
//! distances they induce on matrix states, and the recovery of seminorms from
//! those distances.

pub mod audit;
pub mod error;
pub mod group;
pub mod linalg;
pub mod lp;
pub mod metric;
pub mod oracle;
pub mod seminorm;
pub mod state;
pub mod system;

pub use audit::{AuditCheck, AuditReport};
pub use error::{Error, Result};
pub use group::FiniteGroup;
pub use linalg::{CMatrix, C64};
pub use metric::{
    cb_norm, convexity_audit, distance, dual_gauge, metric_axiom_audit, norm_from_metric, recovered_seminorm,
    DistanceOptions, DistanceResult, InnerSolver, MetricOracleTable, RecoveryBudget,
};
pub use seminorm::{seminorm_axiom_audit, Seminorm};
pub use state::{decompose_selfadjoint, MatrixState};
pub use system::{MatrixElement, MatrixFunctional, OperatorSystem};
