//! Matrix distances induced by a seminorm, the dual gauge, cb-norms, the
//! recovered seminorm, metric audits and the norm built from a metric.

mod axioms;
mod barrier;
mod distance;
mod maximizer;
mod norm;
mod recovery;

pub use axioms::{convexity_audit, metric_axiom_audit, midpoint_quadruple, CONVEXITY_TOL, METRIC_AXIOM_TOL};
pub use distance::{
    cb_norm, complex_basis, distance, dual_gauge, hermitian_basis, random_unit_ball_element, DistanceOptions,
    DistanceResult, LEVEL_CONVERGENCE_TOL, REDUCED_TOL,
};
pub use maximizer::InnerSolver;
pub use norm::{norm_from_metric, NormFromMetric, DECOMPOSITION_MARGIN};
pub use recovery::{recovered_seminorm, MetricOracleTable, Recovery, RecoveryBudget};
