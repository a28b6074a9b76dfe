use std::sync::Arc;

use super::{ConnectionField, FrameField, GeometryError, MetricField, Tensor, VolumeForm};
use crate::expr::{Chart, Expr, ZeroTest};

fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> Result<(), GeometryError> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(GeometryError::ChartMismatch)
    }
}

fn partial(e: &Expr, chart: &Chart, mu: usize) -> Expr {
    e.differentiate(chart.coord(mu))
}

/// The torsion-free metric-compatible connection of `g`.
pub fn levi_civita(g: &MetricField, zt: &ZeroTest) -> Result<ConnectionField, GeometryError> {
    let chart = g.chart();
    let n = g.dim();
    let ginv = g.inverse(zt)?;
    // dg[l][i][j] = ∂_l g_ij
    let dg: Vec<Vec<Vec<Expr>>> = (0..n)
        .map(|l| {
            (0..n)
                .map(|i| (0..n).map(|j| partial(g.get(i, j), chart, l)).collect())
                .collect()
        })
        .collect();
    // lowered[l][m][b] = ½(∂_m g_lb + ∂_b g_lm - ∂_l g_mb), symmetric in m, b
    let mut lowered = vec![vec![vec![Expr::zero(); n]; n]; n];
    for l in 0..n {
        for m in 0..n {
            for b in m..n {
                let sum = dg[m][l][b].clone() + dg[b][l][m].clone() - dg[l][m][b].clone();
                let v = if sum.is_literal_zero() {
                    sum
                } else {
                    Expr::ratio(1, 2) * sum
                };
                lowered[l][m][b] = v.clone();
                lowered[l][b][m] = v;
            }
        }
    }
    let mut upper = vec![Expr::zero(); n * n * n];
    for a in 0..n {
        for m in 0..n {
            for b in m..n {
                let v = Expr::sum(
                    (0..n)
                        .filter(|&l| !ginv.get(a, l).is_literal_zero())
                        .map(|l| ginv.get(a, l).clone() * lowered[l][m][b].clone()),
                );
                upper[(a * n + m) * n + b] = v.clone();
                upper[(a * n + b) * n + m] = v;
            }
        }
    }
    ConnectionField::new(chart.clone(), Tensor::from_vec(n, upper).expect("n^3 entries"))
}

/// The flat connection in which the frame is parallel,
/// `Γ^α_{μβ} = e_I^α ∂_μ θ^I_β`.
pub fn weitzenbock(f: &FrameField) -> ConnectionField {
    let chart = f.chart();
    let n = f.dim();
    let e = f.frame();
    let theta = f.coframe();
    let gamma = Tensor::from_fn(n, |[a, m, b]| {
        Expr::sum((0..n).map(|i| e.get(a, i).clone() * partial(theta.get(i, b), chart, m)))
    });
    ConnectionField::new(chart.clone(), gamma).expect("frame and chart agree")
}

/// `T^α_{μν} = Γ^α_{μν} - Γ^α_{νμ}`, stored as `[α, μ, ν]`.
pub fn torsion(c: &ConnectionField) -> Tensor<3> {
    Tensor::from_fn(c.dim(), |[a, m, v]| c.get(a, m, v).clone() - c.get(a, v, m).clone())
}

/// Riemann tensor `R^ρ_{σμν}`, stored as `[ρ, σ, μ, ν]`.
pub fn curvature(c: &ConnectionField) -> Tensor<4> {
    let chart = c.chart();
    let n = c.dim();
    let mut data = vec![Expr::zero(); n.pow(4)];
    for r in 0..n {
        for s in 0..n {
            for m in 0..n {
                for v in (m + 1)..n {
                    let quad = Expr::sum((0..n).map(|l| {
                        c.get(r, m, l).clone() * c.get(l, v, s).clone()
                            - c.get(r, v, l).clone() * c.get(l, m, s).clone()
                    }));
                    let value = partial(c.get(r, v, s), chart, m) - partial(c.get(r, m, s), chart, v) + quad;
                    let base = (r * n + s) * n;
                    data[(base + m) * n + v] = value.clone();
                    data[(base + v) * n + m] = Expr::neg(value);
                }
            }
        }
    }
    Tensor::from_vec(n, data).expect("n^4 entries")
}

/// Cyclic sum `R^ρ_{σμν} + R^ρ_{μνσ} + R^ρ_{νσμ}`, which vanishes for a
/// torsion-free connection.
pub fn first_bianchi(riemann: &Tensor<4>) -> Tensor<4> {
    Tensor::from_fn(riemann.dim(), |[r, s, m, v]| {
        riemann.get([r, s, m, v]).clone() + riemann.get([r, m, v, s]).clone() + riemann.get([r, v, s, m]).clone()
    })
}

/// `R = g^{σν} R^μ_{σμν}`.
pub fn ricci_scalar(c: &ConnectionField, g: &MetricField, zt: &ZeroTest) -> Result<Expr, GeometryError> {
    same_chart(c.chart(), g.chart())?;
    let n = c.dim();
    let ginv = g.inverse(zt)?;
    let riemann = curvature(c);
    let mut terms = Vec::new();
    for s in 0..n {
        for v in 0..n {
            if ginv.get(s, v).is_literal_zero() {
                continue;
            }
            let ricci = Expr::sum((0..n).map(|m| riemann.get([m, s, m, v]).clone()));
            terms.push(ginv.get(s, v).clone() * ricci);
        }
    }
    Ok(Expr::sum(terms))
}

/// `(∇_μ g)_{αβ} = ∂_μ g_{αβ} - Γ^λ_{μα} g_{λβ} - Γ^λ_{μβ} g_{αλ}`, stored as `[μ, α, β]`.
pub fn metric_gradient(c: &ConnectionField, g: &MetricField) -> Result<Tensor<3>, GeometryError> {
    same_chart(c.chart(), g.chart())?;
    let chart = c.chart();
    let n = c.dim();
    Ok(Tensor::from_fn(n, |[m, a, b]| {
        let correction = Expr::sum(
            (0..n).map(|l| c.get(l, m, a).clone() * g.get(l, b).clone() + c.get(l, m, b).clone() * g.get(a, l).clone()),
        );
        partial(g.get(a, b), chart, m) - correction
    }))
}

/// `∇_μ e_I^α = ∂_μ e_I^α + Γ^α_{μβ} e_I^β`, stored as `[I, μ, α]`.
pub fn frame_gradient(c: &ConnectionField, f: &FrameField) -> Result<Tensor<3>, GeometryError> {
    same_chart(c.chart(), f.chart())?;
    let chart = c.chart();
    let n = c.dim();
    let e = f.frame();
    Ok(Tensor::from_fn(n, |[i, m, a]| {
        partial(e.get(a, i), chart, m) + Expr::sum((0..n).map(|b| c.get(a, m, b).clone() * e.get(b, i).clone()))
    }))
}

/// `θ^I_α T^α_{μν} - (∂_μ θ^I_ν - ∂_ν θ^I_μ)`, stored as `[I, μ, ν]`.
/// Vanishes when `c` is the Weitzenböck connection of `f`.
pub fn coframe_torsion_residual(c: &ConnectionField, f: &FrameField) -> Result<Tensor<3>, GeometryError> {
    same_chart(c.chart(), f.chart())?;
    let chart = c.chart();
    let n = c.dim();
    let t = torsion(c);
    let theta = f.coframe();
    Ok(Tensor::from_fn(n, |[i, m, v]| {
        let contracted = Expr::sum((0..n).map(|a| theta.get(i, a).clone() * t.get([a, m, v]).clone()));
        let d_theta = partial(theta.get(i, v), chart, m) - partial(theta.get(i, m), chart, v);
        contracted - d_theta
    }))
}

/// `Γ^λ_{μλ} - ∂_μ ρ / ρ`, the failure of `c` to preserve the volume form.
pub fn volume_gradient(c: &ConnectionField, vol: &VolumeForm) -> Result<Vec<Expr>, GeometryError> {
    same_chart(c.chart(), vol.chart())?;
    let chart = c.chart();
    let n = c.dim();
    let rho = vol.density();
    Ok((0..n)
        .map(|m| {
            let trace = Expr::sum((0..n).map(|l| c.get(l, m, l).clone()));
            trace - partial(rho, chart, m) / rho.clone()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::frames::Signature;
    use crate::geometry::ExprMatrix;

    fn metric(chart: &Arc<Chart>, rows: &[&[&str]], sig: Signature) -> MetricField {
        let g = ExprMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| parse(s, chart).unwrap()).collect())
                .collect(),
        )
        .unwrap();
        MetricField::new(chart.clone(), g, sig).unwrap()
    }

    fn assert_zero(e: &Expr, chart: &Chart) {
        assert!(ZeroTest::default().is_zero(e, chart).unwrap(), "not zero: {e}");
    }

    fn assert_eq_expr(e: &Expr, expected: &str, chart: &Chart) {
        let diff = e.clone() - parse(expected, chart).unwrap();
        assert_zero(&diff, chart);
    }

    fn polar() -> Arc<Chart> {
        Arc::new(Chart::new(&["r", "phi"], &[(0.5, 3.0), (0.1, 6.0)]).unwrap())
    }

    fn sphere() -> Arc<Chart> {
        Arc::new(Chart::new(&["theta", "phi"], &[(0.2, 2.9), (0.0, 6.0)]).unwrap())
    }

    #[test]
    fn polar_christoffels() {
        let c = polar();
        let g = metric(&c, &[&["1", "0"], &["0", "r^2"]], Signature::euclidean(2));
        let gamma = levi_civita(&g, &ZeroTest::default()).unwrap();
        assert_eq_expr(gamma.get(0, 1, 1), "-r", &c);
        assert_eq_expr(gamma.get(1, 0, 1), "1/r", &c);
        assert_eq_expr(gamma.get(1, 1, 0), "1/r", &c);
        assert!(gamma.get(0, 0, 0).is_literal_zero());
        assert!(gamma.get(1, 1, 1).is_literal_zero());
    }

    #[test]
    fn sphere_christoffels_and_scalar() {
        let c = sphere();
        let zt = ZeroTest::default();
        let g = metric(&c, &[&["1", "0"], &["0", "sin(theta)^2"]], Signature::euclidean(2));
        let gamma = levi_civita(&g, &zt).unwrap();
        assert_eq_expr(gamma.get(0, 1, 1), "-sin(theta)*cos(theta)", &c);
        assert_eq_expr(gamma.get(1, 0, 1), "cos(theta)/sin(theta)", &c);
        assert_eq_expr(&ricci_scalar(&gamma, &g, &zt).unwrap(), "2", &c);
        let grad = metric_gradient(&gamma, &g).unwrap();
        assert!(zt.all_zero(grad.entries(), &c).unwrap());
        assert!(zt.all_zero(torsion(&gamma).entries(), &c).unwrap());
        assert!(zt.all_zero(first_bianchi(&curvature(&gamma)).entries(), &c).unwrap());
    }

    #[test]
    fn flat_metric_has_zero_curvature() {
        let c = polar();
        let zt = ZeroTest::default();
        let g = metric(&c, &[&["1", "0"], &["0", "r^2"]], Signature::euclidean(2));
        let gamma = levi_civita(&g, &zt).unwrap();
        assert!(zt.all_zero(curvature(&gamma).entries(), &c).unwrap());
        assert_zero(&ricci_scalar(&gamma, &g, &zt).unwrap(), &c);
    }

    #[test]
    fn singular_metric_is_rejected() {
        let c = polar();
        let g = metric(&c, &[&["1", "r"], &["r", "r^2"]], Signature::euclidean(2));
        assert_eq!(
            levi_civita(&g, &ZeroTest::default()),
            Err(GeometryError::SingularMetric)
        );
    }

    #[test]
    fn weitzenbock_of_polar_frame() {
        let c = polar();
        let zt = ZeroTest::default();
        let e = ExprMatrix::from_rows(vec![
            vec![Expr::one(), Expr::zero()],
            vec![Expr::zero(), parse("1/r", &c).unwrap()],
        ])
        .unwrap();
        let f = FrameField::new(c.clone(), e, &zt).unwrap();
        let w = weitzenbock(&f);
        assert_eq_expr(w.get(1, 0, 1), "1/r", &c);
        for (idx, v) in w.coefficients().indexed() {
            if idx != [1, 0, 1] {
                assert_zero(v, &c);
            }
        }
        let t = torsion(&w);
        assert_eq_expr(t.get([1, 0, 1]), "1/r", &c);
        assert_eq_expr(t.get([1, 1, 0]), "-1/r", &c);
        assert!(zt.all_zero(frame_gradient(&w, &f).unwrap().entries(), &c).unwrap());
        assert!(zt
            .all_zero(coframe_torsion_residual(&w, &f).unwrap().entries(), &c)
            .unwrap());
        assert!(zt.all_zero(curvature(&w).entries(), &c).unwrap());
    }

    #[test]
    fn torsion_of_toy_connection() {
        let c = Arc::new(Chart::new(&["x", "y"], &[(0.0, 1.0), (0.0, 1.0)]).unwrap());
        let gamma = Tensor::from_fn(2, |idx| if idx == [0, 0, 1] { Expr::var("x") } else { Expr::zero() });
        let conn = ConnectionField::new(c, gamma).unwrap();
        let t = torsion(&conn);
        assert_eq!(t.get([0, 0, 1]), &Expr::var("x"));
        assert_eq!(t.get([0, 1, 0]), &Expr::neg(Expr::var("x")));
        assert!(t.get([1, 0, 1]).is_literal_zero());
    }

    #[test]
    fn volume_gradient_of_levi_civita_vanishes() {
        let c = sphere();
        let zt = ZeroTest::default();
        let g = metric(&c, &[&["1", "0"], &["0", "sin(theta)^2"]], Signature::euclidean(2));
        let gamma = levi_civita(&g, &zt).unwrap();
        let vol = crate::geometry::volume_form(&g, &zt).unwrap();
        assert!(zt.all_zero(&volume_gradient(&gamma, &vol).unwrap(), &c).unwrap());
    }

    #[test]
    fn chart_mismatch_is_reported() {
        let g = metric(&polar(), &[&["1", "0"], &["0", "r^2"]], Signature::euclidean(2));
        let other = ConnectionField::zero(sphere());
        assert_eq!(
            metric_gradient(&other, &g).map(|_| ()),
            Err(GeometryError::ChartMismatch)
        );
    }
}
