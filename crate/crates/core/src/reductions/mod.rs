//! Reduction bookkeeping: dimension tables for the subgroups of GL(n),
//! degree-of-freedom counts for their preserving connections, a residual
//! based connection classifier, and the time-gauge split of a tetrad.

mod classify;
mod table;
mod time_gauge;

use thiserror::Error;

use crate::expr::EvalError;
use crate::geometry::GeometryError;

pub use classify::{classify_connection, ClassificationReport, Context, FlagResult};
pub use table::{connection_dof, dof_table, ConnectionKind, DofReport, DofStage, Group, ReductionSpec};
pub use time_gauge::{time_gauge_from_legs, time_gauge_split, validate_triad, TimeGaugeSplit, TriadResidual};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error("unsupported reduction: {0}")]
    UnsupportedSpec(String),
    #[error("classification needs a metric, frame or volume form")]
    MissingContext,
    #[error("fields live on different charts")]
    ChartMismatch,
    #[error("u is not timelike on the domain box (g(u,u) = {value} at a sample)")]
    NotTimelike { value: f64 },
    #[error("u is not unit: g(u,u) + 1 has max residual {max_residual:e}")]
    NotUnit { max_residual: f64 },
    #[error("frame is not orthonormal for g (max residual {max_residual:e})")]
    NotOrthonormal { max_residual: f64 },
    #[error("spatial leg {leg} degenerates after projection orthogonal to u")]
    SingularProjection { leg: usize },
    #[error("expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
