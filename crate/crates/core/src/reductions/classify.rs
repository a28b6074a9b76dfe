use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::ReductionError;
use crate::expr::{Chart, Residual, ZeroTest};
use crate::geometry::{
    curvature, exterior_derivative, frame_gradient, metric_gradient, torsion, volume_gradient, weyl_form_extract,
    weyl_residual, ConnectionField, CovectorField, FrameField, GeometryError, MetricField, VolumeForm,
};

/// Outcome of one residual check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlagResult {
    pub holds: bool,
    pub max_residual: f64,
    pub samples: usize,
}

impl From<Residual> for FlagResult {
    fn from(r: Residual) -> FlagResult {
        FlagResult {
            holds: r.pass,
            max_residual: r.max_abs,
            samples: r.samples,
        }
    }
}

/// Structures a connection is tested against.
#[derive(Clone, Copy, Debug, Default)]
pub struct Context<'a> {
    pub metric: Option<&'a MetricField>,
    pub frame: Option<&'a FrameField>,
    pub volume: Option<&'a VolumeForm>,
}

/// Independent residual flags for a connection. Flags needing a context
/// object are `None` when it was not supplied.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationReport {
    pub symmetric: FlagResult,
    pub flat: FlagResult,
    pub metric: Option<FlagResult>,
    pub weyl: Option<FlagResult>,
    /// The extracted Weyl form, when `∇g` is proportional to `g`.
    pub weyl_form: Option<CovectorField>,
    /// Whether the Weyl form is closed, hence locally integrable.
    pub weyl_closed: Option<FlagResult>,
    pub frame_preserving: Option<FlagResult>,
    pub volume_preserving: Option<FlagResult>,
}

impl ClassificationReport {
    /// Flag name to result, for serialization.
    pub fn flags(&self) -> BTreeMap<String, FlagResult> {
        let mut out = BTreeMap::new();
        out.insert("symmetric".to_string(), self.symmetric);
        out.insert("flat".to_string(), self.flat);
        let optional = [
            ("metric", self.metric),
            ("weyl", self.weyl),
            ("weyl_closed", self.weyl_closed),
            ("frame_preserving", self.frame_preserving),
            ("volume_preserving", self.volume_preserving),
        ];
        for (name, flag) in optional {
            if let Some(f) = flag {
                out.insert(name.to_string(), f);
            }
        }
        out
    }

    /// Reduced structures the connection preserves.
    pub fn preserved(&self) -> Vec<&'static str> {
        let holds = |f: Option<FlagResult>| f.is_some_and(|f| f.holds);
        let mut out = Vec::new();
        if holds(self.metric) {
            out.push("metric");
        }
        if holds(self.weyl) {
            out.push("conformal class");
        }
        if holds(self.volume_preserving) {
            out.push("volume form");
        }
        if holds(self.frame_preserving) {
            out.push("frame");
        }
        out
    }
}

fn check_chart(c: &Arc<Chart>, other: &Arc<Chart>) -> Result<(), ReductionError> {
    if Arc::ptr_eq(c, other) || **c == **other {
        Ok(())
    } else {
        Err(ReductionError::ChartMismatch)
    }
}

pub fn classify_connection(
    c: &ConnectionField,
    context: &Context<'_>,
    zt: &ZeroTest,
) -> Result<ClassificationReport, ReductionError> {
    if context.metric.is_none() && context.frame.is_none() && context.volume.is_none() {
        return Err(ReductionError::MissingContext);
    }
    let chart = c.chart();
    for other in [
        context.metric.map(|g| g.chart()),
        context.frame.map(|f| f.chart()),
        context.volume.map(|v| v.chart()),
    ]
    .into_iter()
    .flatten()
    {
        check_chart(chart, other)?;
    }

    let symmetric = zt.residual_all(torsion(c).entries(), chart)?.into();
    let flat = zt.residual_all(curvature(c).entries(), chart)?.into();

    let mut report = ClassificationReport {
        symmetric,
        flat,
        metric: None,
        weyl: None,
        weyl_form: None,
        weyl_closed: None,
        frame_preserving: None,
        volume_preserving: None,
    };

    if let Some(g) = context.metric {
        let grad = metric_gradient(c, g)?;
        report.metric = Some(zt.residual_all(grad.entries(), chart)?.into());
        match weyl_form_extract(c, g, zt) {
            Ok(a) => {
                let residual = zt.residual_all(weyl_residual(&grad, &a, g).entries(), chart)?;
                let closed = zt.residual_all(&exterior_derivative(&a), chart)?;
                report.weyl = Some(residual.into());
                report.weyl_closed = Some(closed.into());
                report.weyl_form = Some(a);
            }
            Err(GeometryError::NotProportional { max_residual }) => {
                report.weyl = Some(FlagResult {
                    holds: false,
                    max_residual,
                    samples: zt.samples,
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    if let Some(f) = context.frame {
        let grad = frame_gradient(c, f)?;
        report.frame_preserving = Some(zt.residual_all(grad.entries(), chart)?.into());
    }
    if let Some(vol) = context.volume {
        let grad = volume_gradient(c, vol)?;
        report.volume_preserving = Some(zt.residual_all(&grad, chart)?.into());
    }
    Ok(report)
}
