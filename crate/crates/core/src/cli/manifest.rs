//! Scene manifests: a JSON document naming a chart and the fields on it.
//!
//! ```json
//! {
//!   "chart": { "coords": ["r", "phi"], "domain": [[0.5, 3.0], [0.1, 6.0]] },
//!   "signature": [0, 2],
//!   "frame": [["1", "0"], ["0", "1/r"]]
//! }
//! ```
//!
//! Matrices are row-major. For `frame`, column `I` holds the coordinate
//! components of frame vector `e_I`, so entry `[μ][I]` is `e_I^μ`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::expr::{parse, Chart, Expr, DEFAULT_SAMPLES, DEFAULT_TOL};
use crate::frames::Signature;
use crate::geometry::{ExprMatrix, Tensor};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub coords: Vec<String>,
    pub domain: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

impl Default for Options {
    fn default() -> Options {
        Options {
            samples: DEFAULT_SAMPLES,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneManifest {
    pub chart: ChartSpec,
    pub signature: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<Vec<Vec<String>>>,
    /// `n³` coefficients `Γ^α_{μβ}` in `[α, μ, β]` order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weyl_factor: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_volume: Option<String>,
    #[serde(default)]
    pub options: Options,
}

/// A validated manifest with every expression parsed.
#[derive(Clone, Debug)]
pub struct Scene {
    pub chart: Arc<Chart>,
    pub signature: Signature,
    pub metric: Option<ExprMatrix>,
    pub frame: Option<ExprMatrix>,
    pub connection: Option<Tensor<3>>,
    pub weyl_factor: Option<Expr>,
    pub u: Option<Vec<Expr>>,
    pub reference_volume: Option<Expr>,
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Manifest(msg.into())
}

impl SceneManifest {
    pub fn from_json(text: &str) -> Result<SceneManifest, CliError> {
        serde_json::from_str(text).map_err(|e| schema(e.to_string()))
    }

    /// Checks shapes and exclusivity, then parses every expression.
    pub fn build(&self) -> Result<Scene, CliError> {
        let n = self.chart.coords.len();
        if let Some(dim) = self.chart.dim {
            if dim != n {
                return Err(schema(format!("chart.dim is {dim} but {n} coordinates are named")));
            }
        }
        let domain: Vec<(f64, f64)> = self.chart.domain.iter().map(|[lo, hi]| (*lo, *hi)).collect();
        let mut chart = Chart::new(&self.chart.coords, &domain).map_err(|e| schema(e.to_string()))?;
        for (name, value) in &self.chart.constants {
            chart = chart.with_constant(name, *value).map_err(|e| schema(e.to_string()))?;
        }
        let [p, q] = self.signature;
        if p + q != n {
            return Err(schema(format!("signature ({p},{q}) does not fit dimension {n}")));
        }
        if self.metric.is_some() && self.frame.is_some() {
            return Err(schema("give either `metric` or `frame`, not both"));
        }
        if self.metric.is_none() && self.frame.is_none() {
            return Err(schema("one of `metric` or `frame` is required"));
        }
        if self.options.samples == 0 || !(self.options.tol > 0.0) {
            return Err(schema("options.samples must be positive and options.tol > 0"));
        }
        if self.weyl_factor.is_some() && self.metric.is_none() {
            return Err(schema("`weyl_factor` needs a `metric`"));
        }
        if self.reference_volume.is_some() && self.metric.is_none() {
            return Err(schema("`reference_volume` needs a `metric`"));
        }

        let matrix = |name: &str, rows: &Option<Vec<Vec<String>>>| -> Result<Option<ExprMatrix>, CliError> {
            let Some(rows) = rows else { return Ok(None) };
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(schema(format!("`{name}` must be {n}x{n}")));
            }
            let parsed = rows
                .iter()
                .map(|r| r.iter().map(|s| expr(s, &chart)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ExprMatrix::from_rows(parsed))
        };
        let metric = matrix("metric", &self.metric)?;
        let frame = matrix("frame", &self.frame)?;
        let connection = match &self.connection {
            None => None,
            Some(list) => {
                if list.len() != n * n * n {
                    return Err(schema(format!("`connection` needs {} entries", n * n * n)));
                }
                let parsed = list.iter().map(|s| expr(s, &chart)).collect::<Result<Vec<_>, _>>()?;
                Tensor::from_vec(n, parsed)
            }
        };
        let u = match &self.u {
            None => None,
            Some(list) => {
                if list.len() != n {
                    return Err(schema(format!("`u` needs {n} components")));
                }
                Some(list.iter().map(|s| expr(s, &chart)).collect::<Result<Vec<_>, _>>()?)
            }
        };
        let scalar = |s: &Option<String>| s.as_deref().map(|s| expr(s, &chart)).transpose();
        Ok(Scene {
            signature: Signature::new(p, q),
            metric,
            frame,
            connection,
            weyl_factor: scalar(&self.weyl_factor)?,
            u,
            reference_volume: scalar(&self.reference_volume)?,
            chart: Arc::new(chart),
        })
    }
}

fn expr(source: &str, chart: &Chart) -> Result<Expr, CliError> {
    parse(source, chart).map_err(|error| CliError::Expression {
        text: source.to_string(),
        error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const POLAR: &str = r#"{
        "chart": {"coords": ["r", "phi"], "domain": [[0.5, 3.0], [0.1, 6.0]]},
        "signature": [0, 2],
        "frame": [["1", "0"], ["0", "1/r"]]
    }"#;

    #[test]
    fn parses_and_builds() {
        let m = SceneManifest::from_json(POLAR).unwrap();
        assert_eq!(m.options, Options::default());
        let scene = m.build().unwrap();
        assert_eq!(scene.chart.dim(), 2);
        assert!(scene.metric.is_none() && scene.frame.is_some());
    }

    #[test]
    fn schema_errors() {
        let both = POLAR.replace(r#""frame""#, r#""metric": [["1","0"],["0","1"]], "frame""#);
        assert!(matches!(
            SceneManifest::from_json(&both).unwrap().build(),
            Err(CliError::Manifest(_))
        ));
        let unknown = POLAR.replace(r#""signature""#, r#""colour": 1, "signature""#);
        assert!(matches!(SceneManifest::from_json(&unknown), Err(CliError::Manifest(_))));
        let shape = POLAR.replace(r#"["0", "1/r"]"#, r#"["0"]"#);
        assert!(matches!(
            SceneManifest::from_json(&shape).unwrap().build(),
            Err(CliError::Manifest(_))
        ));
        let sig = POLAR.replace("[0, 2]", "[1, 2]");
        assert!(matches!(
            SceneManifest::from_json(&sig).unwrap().build(),
            Err(CliError::Manifest(_))
        ));
    }

    #[test]
    fn expression_errors() {
        let bad = POLAR.replace("1/r", "1/(r");
        assert!(matches!(
            SceneManifest::from_json(&bad).unwrap().build(),
            Err(CliError::Expression { .. })
        ));
        let unknown = POLAR.replace("1/r", "1/s");
        assert!(matches!(
            SceneManifest::from_json(&unknown).unwrap().build(),
            Err(CliError::Expression { .. })
        ));
    }
}
