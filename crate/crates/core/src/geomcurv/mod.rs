//! Scalar curvature of metric families, warped products and suspensions,
//! the pre-gauge isometry and the angle chart of a planar curve.
//!
//! Curvature follows `R(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y]`, so round spheres
//! have positive scalar curvature. Exact values come from hyper-dual jets of
//! the metric entries; finite differences serve as the independent oracle.

mod angle;
mod checks;
mod family;
mod pregauge;
mod tensor;
mod warped;

use thiserror::Error;

use crate::exprparse::EvalError;

pub use angle::{angle_chart_check, AngleChart, AngleReport, AngleSample};
pub use checks::{
    check_sample, curvature_check, error_term_check, fitted_exponent, rescaling_check, suspension_check,
    CurvatureReport, CurvatureSample, ErrorTermReport, ErrorTermSample, ParameterTraces, RescaleEntry,
    RescaleReport, SlownessMode, SuspensionReport, SuspensionSample, DECAY_WINDOW, ORACLE_TOL,
    SUSPENSION_RESIDUAL_TOL,
};
pub use family::{ExprMetric, MetricFamily, SliceMetric, SuspensionMetric, WarpedMetric};
pub use pregauge::{
    gram, jacobi_eigen, pre_gauge, pre_gauge_check, pre_gauge_residuals, random_spd, PreGaugeReport, PreGaugeResiduals,
    PreGaugeSample,
};
pub use tensor::{
    curvature_fd, curvature_jet, inverse_pd, scal_direct, Christoffel, Curvature, FdSteps, MetricField, MetricJet,
};
pub use warped::{scal_warped, warped_components, warped_terms, warped_terms_of, Compared, ComponentReport, WarpedTerms};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurvError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("metric is not positive definite at {at:?}")]
    NotPositiveDefinite { at: Vec<f64> },
    #[error("warping function is not positive at {at:?}")]
    NonPositiveWarp { at: Vec<f64> },
    #[error("{line}:{col}: {message}")]
    Format { line: usize, col: usize, message: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
}
