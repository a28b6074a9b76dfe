use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::manifest::{Scene, SceneManifest};
use super::{AnalyzeOptions, CliError};
use crate::expr::{Chart, Expr, Point, ZeroTest};
use crate::frames::Signature;
use crate::geometry::{
    ap_metric, coframe_torsion_residual, conformal_rescale, curvature, exterior_derivative, first_bianchi,
    frame_gradient, levi_civita, metric_gradient, ricci_scalar, torsion, volume_form, volume_gradient, weitzenbock,
    weyl_form_extract, weyl_residual, ConnectionField, CovectorField, FrameField, GeometryError, MetricField,
    VolumeForm, WEYL_SIGN,
};
use crate::reductions::{
    classify_connection, connection_dof, dof_table, time_gauge_from_legs, time_gauge_split, validate_triad,
    ClassificationReport, ConnectionKind, Context, DofReport, FlagResult, ReductionError, ReductionSpec,
};

/// One residual check. `max_residual` is `null` when the check failed
/// before a residual could be formed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub max_residual: f64,
    pub sample_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectionCounts {
    pub all: usize,
    pub preserving: usize,
    pub symmetric: usize,
    pub symmetric_preserving: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DofEntry {
    #[serde(flatten)]
    pub table: DofReport,
    pub connections: ConnectionCounts,
}

/// Informational classification of one connection.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub flags: BTreeMap<String, FlagResult>,
    pub preserved: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weyl_form: Option<Vec<f64>>,
}

/// Numeric values of derived objects at `sample_point`, plus the Ricci
/// scalar at every sample.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Extracted {
    pub sample_point: Vec<f64>,
    /// `Γ^α_{μβ}` flattened in `[α, μ, β]` order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levi_civita: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ricci_scalar: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weitzenbock: Option<Vec<f64>>,
    /// Row-major.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ap_metric: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weyl_form: Option<Vec<f64>>,
    /// `triad[i][μ]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triad: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Settings {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub manifest: SceneManifest,
    pub settings: Settings,
    pub all_pass: bool,
    /// Sorted by name.
    pub checks: Vec<Check>,
    pub classification: BTreeMap<String, Classification>,
    pub dof: Vec<DofEntry>,
    pub extracted: Extracted,
}

/// Dimension ledger plus connection counts for a tag in dimension `n`.
pub fn dof_entry(tag: &str, n: usize) -> Result<DofEntry, CliError> {
    let spec = ReductionSpec::parse(tag, n)?;
    let count = |kind| connection_dof(&spec, kind);
    Ok(DofEntry {
        table: dof_table(&spec)?,
        connections: ConnectionCounts {
            all: count(ConnectionKind::All)?,
            preserving: count(ConnectionKind::Preserving)?,
            symmetric: count(ConnectionKind::Symmetric)?,
            symmetric_preserving: count(ConnectionKind::SymmetricPreserving)?,
        },
    })
}

/// Parses, validates and analyzes a manifest.
pub fn analyze_manifest(text: &str, options: &AnalyzeOptions) -> Result<Report, CliError> {
    let manifest = SceneManifest::from_json(text)?;
    let mut effective = manifest.clone();
    if let Some(samples) = options.samples {
        effective.options.samples = samples;
    }
    if let Some(tol) = options.tol {
        effective.options.tol = tol;
    }
    let scene = effective.build()?;
    let zt = ZeroTest::new(effective.options.samples, effective.options.tol).with_seed(options.seed);
    let mut run = Run::new(&scene.chart, zt);
    run.scene(&scene)?;
    run.checks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(Report {
        manifest,
        settings: Settings {
            samples: zt.samples,
            tol: zt.tol,
            seed: zt.seed,
        },
        all_pass: run.checks.iter().all(|c| c.pass),
        checks: run.checks,
        classification: run.classification,
        dof: dof_entries(scene.signature)?,
        extracted: run.extracted,
    })
}

fn dof_entries(sig: Signature) -> Result<Vec<DofEntry>, CliError> {
    let n = sig.dim();
    // reductions of GL(1) carry no structure worth tabulating
    if n < 2 {
        return Ok(Vec::new());
    }
    let mut tags = vec![
        format!("O{sig}"),
        format!("W{sig}"),
        "SL".to_string(),
        "Id".to_string(),
        "Unimodular".to_string(),
    ];
    if sig.p == 1 {
        tags.push("TimeGauge".to_string());
    }
    tags.iter().map(|t| dof_entry(t, n)).collect()
}

struct Run<'a> {
    chart: &'a Arc<Chart>,
    zt: ZeroTest,
    point: Point,
    checks: Vec<Check>,
    classification: BTreeMap<String, Classification>,
    extracted: Extracted,
}

impl<'a> Run<'a> {
    fn new(chart: &'a Arc<Chart>, zt: ZeroTest) -> Run<'a> {
        let first = zt.points(chart).swap_remove(0);
        Run {
            chart,
            zt,
            point: chart.point(&first),
            checks: Vec::new(),
            classification: BTreeMap::new(),
            extracted: Extracted {
                sample_point: first,
                ..Extracted::default()
            },
        }
    }

    fn check<'e>(&mut self, name: &str, exprs: impl IntoIterator<Item = &'e Expr>) -> Result<(), CliError> {
        let r = self.zt.residual_all(exprs, self.chart)?;
        self.checks.push(Check {
            name: name.to_string(),
            pass: r.pass,
            max_residual: r.max_abs,
            sample_count: r.samples,
            detail: None,
        });
        Ok(())
    }

    fn failed(&mut self, name: &str, max_residual: f64, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            pass: false,
            max_residual,
            sample_count: self.zt.samples,
            detail: Some(detail),
        });
    }

    fn values<'e>(&self, exprs: impl IntoIterator<Item = &'e Expr>) -> Result<Vec<f64>, CliError> {
        Ok(exprs
            .into_iter()
            .map(|e| e.eval(&self.point))
            .collect::<Result<Vec<f64>, _>>()?)
    }

    fn classify(&mut self, key: &str, c: &ConnectionField, ctx: &Context<'_>) -> Result<(), CliError> {
        let report: ClassificationReport = classify_connection(c, ctx, &self.zt)?;
        let weyl_form = report
            .weyl_form
            .as_ref()
            .map(|a| self.values(a.components()))
            .transpose()?;
        self.classification.insert(
            key.to_string(),
            Classification {
                flags: report.flags(),
                preserved: report.preserved().into_iter().map(String::from).collect(),
                weyl_form,
            },
        );
        Ok(())
    }

    fn scene(&mut self, scene: &Scene) -> Result<(), CliError> {
        let chart = scene.chart.clone();
        let sig = scene.signature;

        let mut metric = None;
        let mut lc = None;
        if let Some(m) = &scene.metric {
            let g = MetricField::new(chart.clone(), m.clone(), sig)?;
            for p in self.zt.points(&chart) {
                g.at(&chart.point(&p))?;
            }
            let c = levi_civita(&g, &self.zt)?;
            let riemann = curvature(&c);
            self.check("levi_civita.torsion", torsion(&c).entries())?;
            self.check("levi_civita.metric_gradient", metric_gradient(&c, &g)?.entries())?;
            self.check("levi_civita.first_bianchi", first_bianchi(&riemann).entries())?;
            self.extracted.levi_civita = Some(c.coefficients().eval(&self.point)?);
            let r = ricci_scalar(&c, &g, &self.zt)?;
            let values = self
                .zt
                .points(&chart)
                .iter()
                .map(|p| r.eval(&chart.point(p)))
                .collect::<Result<Vec<f64>, _>>()?;
            self.extracted.ricci_scalar = Some(values);
            metric = Some(g);
            lc = Some(c);
        }

        let mut frame = None;
        if let Some(e) = &scene.frame {
            let f = FrameField::new(chart.clone(), e.clone(), &self.zt)?;
            let g = ap_metric(&f, sig)?;
            let w = weitzenbock(&f);
            self.check("frame.consistency", &f.consistency_residual())?;
            self.check("weitzenbock.frame_gradient", frame_gradient(&w, &f)?.entries())?;
            self.check("weitzenbock.curvature", curvature(&w).entries())?;
            self.check(
                "weitzenbock.coframe_torsion",
                coframe_torsion_residual(&w, &f)?.entries(),
            )?;
            self.check("weitzenbock.metric_gradient", metric_gradient(&w, &g)?.entries())?;
            self.extracted.weitzenbock = Some(w.coefficients().eval(&self.point)?);
            self.extracted.ap_metric = Some(g.components().eval(&self.point)?.transpose().iter().copied().collect());
            let ctx = Context {
                metric: Some(&g),
                frame: Some(&f),
                volume: None,
            };
            self.classify("weitzenbock", &w, &ctx)?;
            metric = Some(g);
            frame = Some(f);
        }
        let g = metric.expect("manifest validation requires a metric or a frame");

        let mut volume = None;
        if let Some(rho) = &scene.reference_volume {
            let vol = VolumeForm::new(chart.clone(), rho.clone(), &self.zt)?;
            let own = volume_form(&g, &self.zt)?;
            let lc = lc.as_ref().expect("reference_volume requires a metric");
            self.check("unimodular.density_match", [&(own.density().clone() - rho.clone())])?;
            self.check("unimodular.levi_civita_volume", &volume_gradient(lc, &vol)?)?;
            volume = Some(vol);
        }

        if let Some(gamma) = &scene.connection {
            let c = ConnectionField::new(chart.clone(), gamma.clone())?;
            c.check_finite(&self.zt)?;
            let ctx = Context {
                metric: Some(&g),
                frame: frame.as_ref(),
                volume: volume.as_ref(),
            };
            self.classify("connection", &c, &ctx)?;
        }

        if let Some(omega) = &scene.weyl_factor {
            self.weyl(&g, omega)?;
        }

        if let Some(u) = &scene.u {
            self.time_gauge(&g, frame.as_ref(), u)?;
        }
        Ok(())
    }

    fn weyl(&mut self, g: &MetricField, omega: &Expr) -> Result<(), CliError> {
        let big = conformal_rescale(g, omega, &self.zt)?;
        let c = levi_civita(&big, &self.zt)?;
        match weyl_form_extract(&c, g, &self.zt) {
            Ok(a) => {
                let grad = metric_gradient(&c, g)?;
                self.check("weyl.proportional", weyl_residual(&grad, &a, g).entries())?;
                let d_omega = CovectorField::gradient(self.chart.clone(), omega);
                let expected: Vec<Expr> = (0..g.dim())
                    .map(|m| a.get(m).clone() - Expr::int(WEYL_SIGN as i64) * d_omega.get(m).clone() / omega.clone())
                    .collect();
                self.check("weyl.matches_factor", &expected)?;
                self.check("weyl.closed", &exterior_derivative(&a))?;
                self.extracted.weyl_form = Some(self.values(a.components())?);
                Ok(())
            }
            Err(GeometryError::NotProportional { max_residual }) => {
                self.failed(
                    "weyl.proportional",
                    max_residual,
                    "metric gradient is not proportional to the metric".to_string(),
                );
                Ok(())
            }
            Err(e) => Err(e.into()),
        }
    }

    fn time_gauge(&mut self, g: &MetricField, frame: Option<&FrameField>, u: &[Expr]) -> Result<(), CliError> {
        let n = g.dim();
        if g.signature().p != 1 {
            return Err(CliError::Manifest(format!(
                "`u` needs signature (1,{}), got {}",
                n - 1,
                g.signature()
            )));
        }
        let split = match frame {
            Some(f) => time_gauge_split(f, g, u, &self.zt),
            None => {
                let legs: Vec<Vec<Expr>> = (1..n)
                    .map(|i| {
                        (0..n)
                            .map(|k| if k == i { Expr::one() } else { Expr::zero() })
                            .collect()
                    })
                    .collect();
                time_gauge_from_legs(g, u, &legs, &self.zt)
            }
        };
        let split = match split {
            Ok(split) => split,
            Err(e) => {
                let residual = match &e {
                    ReductionError::NotTimelike { value } => *value,
                    ReductionError::NotUnit { max_residual } | ReductionError::NotOrthonormal { max_residual } => {
                        *max_residual
                    }
                    ReductionError::SingularProjection { .. } => f64::NAN,
                    _ => return Err(e.into()),
                };
                self.failed("time_gauge.split", residual, e.to_string());
                return Ok(());
            }
        };
        let r = validate_triad(g, u, &split.triad, &self.zt)?;
        for (name, residual) in [
            ("time_gauge.gram", r.gram),
            ("time_gauge.orthogonality", r.orthogonality),
        ] {
            self.checks.push(Check {
                name: name.to_string(),
                pass: residual.pass,
                max_residual: residual.max_abs,
                sample_count: residual.samples,
                detail: None,
            });
        }
        let triad = split
            .triad
            .iter()
            .map(|leg| self.values(leg))
            .collect::<Result<Vec<_>, _>>()?;
        self.extracted.triad = Some(triad);
        Ok(())
    }
}
