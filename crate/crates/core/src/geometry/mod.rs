//! Chart-local field geometry: metric fields, moving frames, linear
//! connections, and the preserving connections of each reduction together
//! with the residuals that certify them.
//!
//! Index conventions, fixed once for the whole crate:
//!
//! * connection coefficients `Γ^α_{μβ}` are stored as `[α, μ, β]`, with `μ`
//!   the differentiation direction and `β` the input slot, so
//!   `∇_μ V^α = ∂_μ V^α + Γ^α_{μβ} V^β`;
//! * torsion `T^α_{μν} = Γ^α_{μν} - Γ^α_{νμ}`;
//! * curvature `R^ρ_{σμν} = ∂_μ Γ^ρ_{νσ} - ∂_ν Γ^ρ_{μσ} + Γ^ρ_{μλ} Γ^λ_{νσ} - Γ^ρ_{νλ} Γ^λ_{μσ}`,
//!   stored as `[ρ, σ, μ, ν]`;
//! * a moving frame is the matrix `e[μ][I] = e_I^μ` (column `I` is the
//!   frame vector `e_I`) and its co-frame is `θ[I][μ] = θ^I_μ`.

mod connection;
pub mod dof;
mod fields;
mod matrix;
mod tensor;
mod weyl;

use thiserror::Error;

use crate::expr::EvalError;

pub use connection::{
    coframe_torsion_residual, curvature, first_bianchi, frame_gradient, levi_civita, metric_gradient, ricci_scalar,
    torsion, volume_gradient, weitzenbock,
};
pub use fields::{
    ap_metric, conformal_rescale, volume_form, ConnectionField, CovectorField, FrameField, MetricField, VolumeForm,
};
pub use matrix::ExprMatrix;
pub use tensor::Tensor;
pub use weyl::{exterior_derivative, is_closed, weyl_form_extract, weyl_residual};

/// Constant `c₀` in `∇g = c₀ dλ ⊗ g` for the Levi-Civita connection of
/// `e^{2λ} g` applied to `g`. Fixed by a finite-difference oracle run.
pub const WEYL_SIGN: f64 = -2.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("metric is singular on the domain box")]
    SingularMetric,
    #[error("frame is singular on the domain box")]
    SingularFrame,
    #[error("fields live on different charts")]
    ChartMismatch,
    #[error("matrix must be {expected}x{expected}")]
    DimensionMismatch { expected: usize },
    #[error("metric is not symmetric at ({0},{1})")]
    Asymmetric(usize, usize),
    #[error("signature does not match chart dimension {0}")]
    SignatureMismatch(usize),
    #[error("∇g is not proportional to g (max residual {max_residual:e})")]
    NotProportional { max_residual: f64 },
    #[error("conformal factor must be nonzero on the domain box")]
    NonPositiveFactor,
    #[error("volume density must be positive on the domain box")]
    NonPositiveDensity,
    #[error(transparent)]
    Eval(#[from] EvalError),
}
