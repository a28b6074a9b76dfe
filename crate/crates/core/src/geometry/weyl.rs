use super::{metric_gradient, ConnectionField, CovectorField, GeometryError, MetricField, Tensor};
use crate::expr::{EvalError, Expr, ZeroTest};

/// The covector `A` with `∇g = A ⊗ g`, read off as `A_μ = (∇g)_{μαβ} g^{αβ} / n`
/// and then checked entry by entry.
pub fn weyl_form_extract(c: &ConnectionField, g: &MetricField, zt: &ZeroTest) -> Result<CovectorField, GeometryError> {
    let grad = metric_gradient(c, g)?;
    let ginv = g.inverse(zt)?;
    let n = g.dim();
    let inv_n = Expr::ratio(1, n as i64);
    let a: Vec<Expr> = (0..n)
        .map(|m| {
            let trace = Expr::sum(
                (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| !ginv.get(i, j).is_literal_zero())
                    .map(|(i, j)| grad.get([m, i, j]).clone() * ginv.get(i, j).clone()),
            );
            inv_n.clone() * trace
        })
        .collect();
    let form = CovectorField::new(g.chart().clone(), a)?;
    let residual = weyl_residual(&grad, &form, g);
    let check = zt.residual_all(residual.entries(), g.chart())?;
    if !check.pass {
        return Err(GeometryError::NotProportional {
            max_residual: check.max_abs,
        });
    }
    Ok(form)
}

/// `(∇g)_{μαβ} - A_μ g_{αβ}` for a precomputed metric gradient.
pub fn weyl_residual(grad: &Tensor<3>, a: &CovectorField, g: &MetricField) -> Tensor<3> {
    Tensor::from_fn(g.dim(), |[m, i, j]| {
        grad.get([m, i, j]).clone() - a.get(m).clone() * g.get(i, j).clone()
    })
}

/// `(dA)_{μν} = ∂_μ A_ν - ∂_ν A_μ` for `μ < ν`, in lexicographic order.
pub fn exterior_derivative(a: &CovectorField) -> Vec<Expr> {
    let chart = a.chart();
    let n = chart.dim();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for m in 0..n {
        for v in (m + 1)..n {
            out.push(a.get(v).differentiate(chart.coord(m)) - a.get(m).differentiate(chart.coord(v)));
        }
    }
    out
}

/// Whether `dA` vanishes on the box, so `A` is locally exact.
pub fn is_closed(a: &CovectorField, zt: &ZeroTest) -> Result<bool, EvalError> {
    zt.all_zero(&exterior_derivative(a), a.chart())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::expr::{parse, Chart};
    use crate::frames::Signature;
    use crate::geometry::{conformal_rescale, levi_civita, ExprMatrix};

    fn flat() -> Arc<Chart> {
        Arc::new(Chart::new(&["x", "y"], &[(0.1, 1.0), (0.1, 1.0)]).unwrap())
    }

    fn covector(chart: &Arc<Chart>, parts: &[&str]) -> CovectorField {
        CovectorField::new(chart.clone(), parts.iter().map(|s| parse(s, chart).unwrap()).collect()).unwrap()
    }

    #[test]
    fn closedness_examples() {
        let c = flat();
        let zt = ZeroTest::default();
        let lambda = parse("x^2*y", &c).unwrap();
        assert!(is_closed(&CovectorField::gradient(c.clone(), &lambda), &zt).unwrap());
        assert!(!is_closed(&covector(&c, &["-y", "x"]), &zt).unwrap());
        assert!(is_closed(&covector(&c, &["0", "0"]), &zt).unwrap());
        assert_eq!(exterior_derivative(&covector(&c, &["-y", "x"])), vec![Expr::int(2)]);
    }

    #[test]
    fn metric_connection_has_zero_weyl_form() {
        let c = flat();
        let zt = ZeroTest::default();
        let g = MetricField::new(
            c.clone(),
            ExprMatrix::diagonal(vec![Expr::one(), parse("x^2+1", &c).unwrap()]),
            Signature::euclidean(2),
        )
        .unwrap();
        let a = weyl_form_extract(&levi_civita(&g, &zt).unwrap(), &g, &zt).unwrap();
        assert!(zt.all_zero(a.components(), &c).unwrap());
    }

    #[test]
    fn rescaled_levi_civita_gives_gradient_form() {
        let c = flat();
        let zt = ZeroTest::default();
        let g = MetricField::flat(c.clone(), Signature::euclidean(2)).unwrap();
        let lambda = parse("x^2*y", &c).unwrap();
        let big = conformal_rescale(&g, &Expr::exp(lambda.clone()), &zt).unwrap();
        let a = weyl_form_extract(&levi_civita(&big, &zt).unwrap(), &g, &zt).unwrap();
        let dl = CovectorField::gradient(c.clone(), &lambda);
        let diff: Vec<Expr> = (0..2)
            .map(|m| a.get(m).clone() - Expr::int(super::super::WEYL_SIGN as i64) * dl.get(m).clone())
            .collect();
        assert!(zt.all_zero(&diff, &c).unwrap());
    }

    #[test]
    fn non_proportional_gradient_is_rejected() {
        let c = flat();
        let zt = ZeroTest::default();
        let g = MetricField::flat(c.clone(), Signature::euclidean(2)).unwrap();
        let gamma = crate::geometry::Tensor::from_fn(2, |idx| match idx {
            [0, 0, 0] => Expr::var("y"),
            _ => Expr::zero(),
        });
        let conn = ConnectionField::new(c, gamma).unwrap();
        assert!(matches!(
            weyl_form_extract(&conn, &g, &zt),
            Err(GeometryError::NotProportional { .. })
        ));
    }
}
