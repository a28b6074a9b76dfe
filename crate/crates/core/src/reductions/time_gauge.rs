use std::sync::Arc;

use super::ReductionError;
use crate::expr::{Chart, Expr, Residual, ZeroTest};
use crate::geometry::{FrameField, MetricField};

/// A tetrad of the time-gauge class: the unit timelike field `u` and a
/// spatial frame orthonormal and orthogonal to it.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGaugeSplit {
    pub u: Vec<Expr>,
    /// `triad[i][μ]`: component `μ` of spatial leg `i`.
    pub triad: Vec<Vec<Expr>>,
}

/// Residuals certifying a triad: `g(e_i, e_j) - δ_ij` and `g(u, e_i)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriadResidual {
    pub gram: Residual,
    pub orthogonality: Residual,
}

impl TriadResidual {
    pub fn pass(&self) -> bool {
        self.gram.pass && self.orthogonality.pass
    }
}

fn scaled(v: &[Expr], s: &Expr) -> Vec<Expr> {
    v.iter().map(|x| x.clone() * s.clone()).collect()
}

fn axpy(a: &Expr, x: &[Expr], y: &[Expr]) -> Vec<Expr> {
    x.iter()
        .zip(y)
        .map(|(x, y)| a.clone() * x.clone() + y.clone())
        .collect()
}

fn check_len(v: &[Expr], n: usize) -> Result<(), ReductionError> {
    if v.len() == n {
        Ok(())
    } else {
        Err(ReductionError::DimensionMismatch {
            expected: n,
            got: v.len(),
        })
    }
}

/// Checks that `u` is unit timelike for `g`: `g(u,u) < 0` at every sample
/// and `g(u,u) + 1` vanishes.
fn check_unit_timelike(g: &MetricField, u: &[Expr], zt: &ZeroTest) -> Result<(), ReductionError> {
    let chart = g.chart();
    let norm = g.inner(u, u);
    for p in zt.points(chart) {
        let value = norm.eval(&chart.point(&p))?;
        if value >= 0.0 {
            return Err(ReductionError::NotTimelike { value });
        }
    }
    let unit = zt.residual(&(norm + Expr::one()), chart)?;
    if !unit.pass {
        return Err(ReductionError::NotUnit {
            max_residual: unit.max_abs,
        });
    }
    Ok(())
}

/// Builds the triad from arbitrary spatial legs: each leg is projected
/// orthogonally to `u` with `v ↦ v + g(u,v) u` and the results are
/// Gram–Schmidt orthonormalized in order.
pub fn time_gauge_from_legs(
    g: &MetricField,
    u: &[Expr],
    legs: &[Vec<Expr>],
    zt: &ZeroTest,
) -> Result<TimeGaugeSplit, ReductionError> {
    let n = g.dim();
    if g.signature().p != 1 {
        return Err(ReductionError::UnsupportedSpec(format!(
            "time gauge needs signature (1,{}), got {}",
            n - 1,
            g.signature()
        )));
    }
    check_len(u, n)?;
    if legs.len() != n - 1 {
        return Err(ReductionError::DimensionMismatch {
            expected: n - 1,
            got: legs.len(),
        });
    }
    check_unit_timelike(g, u, zt)?;
    let chart = g.chart();
    let mut triad: Vec<Vec<Expr>> = Vec::with_capacity(n - 1);
    for (leg, v) in legs.iter().enumerate() {
        check_len(v, n)?;
        let mut w = axpy(&g.inner(u, v), u, v);
        for e in &triad {
            w = axpy(&Expr::neg(g.inner(e, &w)), e, &w);
        }
        let norm2 = g.inner(&w, &w);
        if degenerate(&norm2, chart, zt)? {
            return Err(ReductionError::SingularProjection { leg });
        }
        triad.push(scaled(&w, &(Expr::one() / Expr::sqrt(norm2))));
    }
    Ok(TimeGaugeSplit { u: u.to_vec(), triad })
}

// A projected spatial leg must have strictly positive norm everywhere.
fn degenerate(norm2: &Expr, chart: &Arc<Chart>, zt: &ZeroTest) -> Result<bool, ReductionError> {
    if zt.is_zero(norm2, chart)? {
        return Ok(true);
    }
    for p in zt.points(chart) {
        if norm2.eval(&chart.point(&p))? <= 0.0 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Splits an orthonormal tetrad `f` of a Lorentzian `g` along the unit
/// timelike field `u`, using the frame's spatial legs `e_1 … e_{n-1}`.
pub fn time_gauge_split(
    f: &FrameField,
    g: &MetricField,
    u: &[Expr],
    zt: &ZeroTest,
) -> Result<TimeGaugeSplit, ReductionError> {
    if !(Arc::ptr_eq(f.chart(), g.chart()) || **f.chart() == **g.chart()) {
        return Err(ReductionError::ChartMismatch);
    }
    let n = g.dim();
    check_len(u, n)?;
    check_unit_timelike(g, u, zt)?;
    let eta = g.signature().eta_diagonal();
    let vectors: Vec<Vec<Expr>> = (0..n).map(|i| f.vector(i)).collect();
    let mut gram = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { Expr::int(eta[i] as i64) } else { Expr::zero() };
            gram.push(g.inner(&vectors[i], &vectors[j]) - target);
        }
    }
    let check = zt.residual_all(&gram, g.chart())?;
    if !check.pass {
        return Err(ReductionError::NotOrthonormal {
            max_residual: check.max_abs,
        });
    }
    time_gauge_from_legs(g, u, &vectors[1..], zt)
}

/// Residuals of a candidate triad for `u`.
pub fn validate_triad(
    g: &MetricField,
    u: &[Expr],
    triad: &[Vec<Expr>],
    zt: &ZeroTest,
) -> Result<TriadResidual, ReductionError> {
    let chart = g.chart();
    let mut gram = Vec::new();
    let mut orth = Vec::new();
    for (i, a) in triad.iter().enumerate() {
        check_len(a, g.dim())?;
        orth.push(g.inner(u, a));
        for (j, b) in triad.iter().enumerate() {
            let delta = if i == j { Expr::one() } else { Expr::zero() };
            gram.push(g.inner(a, b) - delta);
        }
    }
    Ok(TriadResidual {
        gram: zt.residual_all(&gram, chart)?,
        orthogonality: zt.residual_all(&orth, chart)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::frames::Signature;

    fn minkowski() -> MetricField {
        let c = Chart::new(&["t", "x", "y", "z"], &[(-1.0, 1.0); 4])
            .unwrap()
            .with_constant("beta", 0.7)
            .unwrap();
        MetricField::flat(Arc::new(c), Signature::lorentzian(4)).unwrap()
    }

    fn vector(g: &MetricField, parts: &[&str]) -> Vec<Expr> {
        parts.iter().map(|s| parse(s, g.chart()).unwrap()).collect()
    }

    #[test]
    fn coordinate_tetrad_is_already_split() {
        let zt = ZeroTest::default();
        let g = minkowski();
        let f = FrameField::coordinate(g.chart().clone());
        let split = time_gauge_split(&f, &g, &vector(&g, &["1", "0", "0", "0"]), &zt).unwrap();
        for (i, leg) in split.triad.iter().enumerate() {
            let expected: Vec<Expr> = (0..4)
                .map(|k| if k == i + 1 { Expr::one() } else { Expr::zero() })
                .collect();
            assert_eq!(leg, &expected);
        }
    }

    #[test]
    fn boosted_u_gives_orthonormal_triad() {
        let zt = ZeroTest::default();
        let g = minkowski();
        let f = FrameField::coordinate(g.chart().clone());
        let u = vector(&g, &["(exp(beta)+exp(-beta))/2", "(exp(beta)-exp(-beta))/2", "0", "0"]);
        let split = time_gauge_split(&f, &g, &u, &zt).unwrap();
        let r = validate_triad(&g, &u, &split.triad, &zt).unwrap();
        assert!(r.pass(), "{r:?}");
        assert!(r.gram.max_abs < 1e-9 && r.orthogonality.max_abs < 1e-9);
    }

    #[test]
    fn rejections() {
        let zt = ZeroTest::default();
        let g = minkowski();
        let f = FrameField::coordinate(g.chart().clone());
        assert!(matches!(
            time_gauge_split(&f, &g, &vector(&g, &["0", "1", "0", "0"]), &zt),
            Err(ReductionError::NotTimelike { .. })
        ));
        assert!(matches!(
            time_gauge_split(&f, &g, &vector(&g, &["2", "0", "0", "0"]), &zt),
            Err(ReductionError::NotUnit { .. })
        ));
        let legs = vec![
            vector(&g, &["1", "0", "0", "0"]),
            vector(&g, &["0", "0", "1", "0"]),
            vector(&g, &["0", "0", "0", "1"]),
        ];
        assert_eq!(
            time_gauge_from_legs(&g, &vector(&g, &["1", "0", "0", "0"]), &legs, &zt),
            Err(ReductionError::SingularProjection { leg: 0 })
        );
    }
}
