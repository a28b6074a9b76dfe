use std::sync::Arc;

use nalgebra::DMatrix;

use super::{ExprMatrix, GeometryError, Tensor};
use crate::expr::{Chart, EvalError, Expr, Point, ZeroTest};
use crate::frames::Signature;

/// A metric `g_{μν}` on a chart with its declared signature.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricField {
    chart: Arc<Chart>,
    g: ExprMatrix,
    signature: Signature,
}

impl MetricField {
    /// Checks shape, structural symmetry and that the signature fits the chart.
    pub fn new(chart: Arc<Chart>, g: ExprMatrix, signature: Signature) -> Result<MetricField, GeometryError> {
        let n = chart.dim();
        if g.dim() != n {
            return Err(GeometryError::DimensionMismatch { expected: n });
        }
        if signature.dim() != n {
            return Err(GeometryError::SignatureMismatch(n));
        }
        for i in 0..n {
            for j in 0..i {
                if g.get(i, j) != g.get(j, i) {
                    return Err(GeometryError::Asymmetric(i, j));
                }
            }
        }
        Ok(MetricField { chart, g, signature })
    }

    /// The constant metric η of the given signature.
    pub fn flat(chart: Arc<Chart>, signature: Signature) -> Result<MetricField, GeometryError> {
        let diag = signature
            .eta_diagonal()
            .into_iter()
            .map(|v| Expr::int(v as i64))
            .collect();
        MetricField::new(chart, ExprMatrix::diagonal(diag), signature)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn components(&self) -> &ExprMatrix {
        &self.g
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        self.g.get(i, j)
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn determinant(&self) -> Expr {
        self.g.determinant()
    }

    /// `g^{μν}`; fails when `det g` vanishes on the box.
    pub fn inverse(&self, zt: &ZeroTest) -> Result<ExprMatrix, GeometryError> {
        let (inv, det) = self.g.inverse();
        if zt.is_zero(&det, &self.chart)? {
            return Err(GeometryError::SingularMetric);
        }
        Ok(inv)
    }

    /// Numeric `g` at a chart point.
    pub fn at(&self, point: &Point) -> Result<DMatrix<f64>, EvalError> {
        self.g.eval(point)
    }

    /// `g(u, v)` for vectors given by their coordinate components.
    pub fn inner(&self, u: &[Expr], v: &[Expr]) -> Expr {
        let n = self.dim();
        Expr::sum(
            (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| self.g.get(i, j).clone() * u[i].clone() * v[j].clone()),
        )
    }
}

/// A moving frame with its co-frame.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameField {
    chart: Arc<Chart>,
    e: ExprMatrix,
    theta: ExprMatrix,
}

impl FrameField {
    /// `e[μ][I]` holds component `μ` of frame vector `e_I`. The co-frame is
    /// computed symbolically; fails when `det e` vanishes on the box.
    pub fn new(chart: Arc<Chart>, e: ExprMatrix, zt: &ZeroTest) -> Result<FrameField, GeometryError> {
        let n = chart.dim();
        if e.dim() != n {
            return Err(GeometryError::DimensionMismatch { expected: n });
        }
        let (theta, det) = e.inverse();
        if zt.is_zero(&det, &chart)? {
            return Err(GeometryError::SingularFrame);
        }
        Ok(FrameField { chart, e, theta })
    }

    /// Builds the frame from its vectors, `vectors[I][μ] = e_I^μ`.
    pub fn from_vectors(
        chart: Arc<Chart>,
        vectors: Vec<Vec<Expr>>,
        zt: &ZeroTest,
    ) -> Result<FrameField, GeometryError> {
        let n = chart.dim();
        if vectors.len() != n || vectors.iter().any(|v| v.len() != n) {
            return Err(GeometryError::DimensionMismatch { expected: n });
        }
        let e = ExprMatrix::from_fn(n, |mu, i| vectors[i][mu].clone());
        FrameField::new(chart, e, zt)
    }

    /// The coordinate frame `∂_μ`.
    pub fn coordinate(chart: Arc<Chart>) -> FrameField {
        let n = chart.dim();
        FrameField {
            chart,
            e: ExprMatrix::identity(n),
            theta: ExprMatrix::identity(n),
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.e.dim()
    }

    pub fn frame(&self) -> &ExprMatrix {
        &self.e
    }

    pub fn coframe(&self) -> &ExprMatrix {
        &self.theta
    }

    /// Components of frame vector `e_I`.
    pub fn vector(&self, i: usize) -> Vec<Expr> {
        self.e.column(i)
    }

    /// Entries of `e θ - 1`, which vanish for a consistent frame.
    pub fn consistency_residual(&self) -> Vec<Expr> {
        let prod = self.e.mul(&self.theta);
        let id = ExprMatrix::identity(self.dim());
        prod.entries()
            .iter()
            .zip(id.entries())
            .map(|(a, b)| a.clone() - b.clone())
            .collect()
    }
}

/// Linear connection coefficients `Γ^α_{μβ}` stored as `[α, μ, β]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionField {
    chart: Arc<Chart>,
    gamma: Tensor<3>,
}

impl ConnectionField {
    pub fn new(chart: Arc<Chart>, gamma: Tensor<3>) -> Result<ConnectionField, GeometryError> {
        if gamma.dim() != chart.dim() {
            return Err(GeometryError::DimensionMismatch { expected: chart.dim() });
        }
        Ok(ConnectionField { chart, gamma })
    }

    pub fn zero(chart: Arc<Chart>) -> ConnectionField {
        let n = chart.dim();
        ConnectionField {
            chart,
            gamma: Tensor::zeros(n),
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.gamma.dim()
    }

    /// `Γ^α_{μβ}`.
    pub fn get(&self, alpha: usize, mu: usize, beta: usize) -> &Expr {
        self.gamma.get([alpha, mu, beta])
    }

    pub fn coefficients(&self) -> &Tensor<3> {
        &self.gamma
    }

    /// Checks that every coefficient evaluates to a finite value on the box.
    pub fn check_finite(&self, zt: &ZeroTest) -> Result<(), EvalError> {
        for p in zt.points(&self.chart) {
            self.gamma.eval(&self.chart.point(&p))?;
        }
        Ok(())
    }
}

/// A covector field `A_μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct CovectorField {
    chart: Arc<Chart>,
    components: Vec<Expr>,
}

impl CovectorField {
    pub fn new(chart: Arc<Chart>, components: Vec<Expr>) -> Result<CovectorField, GeometryError> {
        if components.len() != chart.dim() {
            return Err(GeometryError::DimensionMismatch { expected: chart.dim() });
        }
        Ok(CovectorField { chart, components })
    }

    /// The differential `dλ` of a scalar.
    pub fn gradient(chart: Arc<Chart>, scalar: &Expr) -> CovectorField {
        let components = chart.coords().iter().map(|c| scalar.differentiate(c)).collect();
        CovectorField { chart, components }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn get(&self, mu: usize) -> &Expr {
        &self.components[mu]
    }
}

/// A volume form `ρ dx¹∧…∧dxⁿ` with positive density.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeForm {
    chart: Arc<Chart>,
    density: Expr,
}

impl VolumeForm {
    pub fn new(chart: Arc<Chart>, density: Expr, zt: &ZeroTest) -> Result<VolumeForm, GeometryError> {
        if zt.is_zero(&density, &chart)? {
            return Err(GeometryError::NonPositiveDensity);
        }
        for p in zt.points(&chart) {
            if density.eval(&chart.point(&p))? <= 0.0 {
                return Err(GeometryError::NonPositiveDensity);
            }
        }
        Ok(VolumeForm { chart, density })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn density(&self) -> &Expr {
        &self.density
    }
}

/// The metric `g_{μν} = η_{IJ} θ^I_μ θ^J_ν` for which the frame is orthonormal.
pub fn ap_metric(f: &FrameField, signature: Signature) -> Result<MetricField, GeometryError> {
    let n = f.dim();
    if signature.dim() != n {
        return Err(GeometryError::SignatureMismatch(n));
    }
    let eta = signature.eta_diagonal();
    let theta = f.coframe();
    let entry = |mu: usize, nu: usize| {
        Expr::sum((0..n).map(|i| {
            let term = theta.get(i, mu).clone() * theta.get(i, nu).clone();
            if eta[i] < 0.0 {
                Expr::neg(term)
            } else {
                term
            }
        }))
    };
    // build the upper triangle once so the result is structurally symmetric
    let mut upper = vec![Expr::zero(); n * n];
    for mu in 0..n {
        for nu in mu..n {
            upper[mu * n + nu] = entry(mu, nu);
        }
    }
    let g = ExprMatrix::from_fn(n, |i, j| upper[i.min(j) * n + i.max(j)].clone());
    MetricField::new(f.chart().clone(), g, signature)
}

/// `Ω² g`; fails unless `Ω` is nonzero and of one sign at every sample point.
pub fn conformal_rescale(g: &MetricField, omega: &Expr, zt: &ZeroTest) -> Result<MetricField, GeometryError> {
    let chart = g.chart();
    if omega.is_literal_zero() || zt.is_zero(omega, chart)? {
        return Err(GeometryError::NonPositiveFactor);
    }
    // a sign change between samples means Ω crosses zero somewhere on the box
    let mut signs = (false, false);
    for p in zt.points(chart) {
        let w = omega.eval(&chart.point(&p))?;
        if !(w * w > 0.0) {
            return Err(GeometryError::NonPositiveFactor);
        }
        if w > 0.0 {
            signs.0 = true;
        } else {
            signs.1 = true;
        }
    }
    if signs.0 && signs.1 {
        return Err(GeometryError::NonPositiveFactor);
    }
    let factor = Expr::powi(omega.clone(), 2);
    let n = g.dim();
    let scaled = ExprMatrix::from_fn(n, |i, j| {
        if g.get(i, j).is_literal_zero() {
            Expr::zero()
        } else {
            factor.clone() * g.get(i, j).clone()
        }
    });
    MetricField::new(chart.clone(), scaled, g.signature())
}

/// The metric volume form, density `sqrt(|det g|)`.
pub fn volume_form(g: &MetricField, zt: &ZeroTest) -> Result<VolumeForm, GeometryError> {
    let det = g.determinant();
    if zt.is_zero(&det, g.chart())? {
        return Err(GeometryError::SingularMetric);
    }
    // |det g| = (-1)^p det g for a metric of signature (p, q)
    let abs_det = if g.signature().det_sign() < 0.0 {
        Expr::neg(det)
    } else {
        det
    };
    VolumeForm::new(g.chart().clone(), Expr::sqrt(abs_det), zt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn polar() -> Arc<Chart> {
        Arc::new(Chart::new(&["r", "phi"], &[(0.5, 3.0), (0.1, 6.0)]).unwrap())
    }

    fn exprs(chart: &Chart, rows: &[&[&str]]) -> ExprMatrix {
        ExprMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| parse(s, chart).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn metric_must_be_symmetric_and_fit_chart() {
        let c = polar();
        let asym = exprs(&c, &[&["1", "r"], &["0", "1"]]);
        assert_eq!(
            MetricField::new(c.clone(), asym, Signature::euclidean(2)),
            Err(GeometryError::Asymmetric(1, 0))
        );
        let ok = exprs(&c, &[&["1", "0"], &["0", "r^2"]]);
        assert!(matches!(
            MetricField::new(c, ok, Signature::euclidean(3)),
            Err(GeometryError::SignatureMismatch(2))
        ));
    }

    #[test]
    fn frame_and_coframe_are_consistent() {
        let c = polar();
        let zt = ZeroTest::default();
        let f = FrameField::new(
            c.clone(),
            exprs(&c, &[&["cos(phi)", "-r*sin(phi)"], &["sin(phi)", "r*cos(phi)"]]),
            &zt,
        )
        .unwrap();
        assert!(zt.all_zero(&f.consistency_residual(), &c).unwrap());
        let singular = exprs(&c, &[&["r", "r"], &["1", "1"]]);
        assert_eq!(FrameField::new(c, singular, &zt), Err(GeometryError::SingularFrame));
    }

    #[test]
    fn ap_metric_examples() {
        let c = polar();
        let zt = ZeroTest::default();
        let cart = FrameField::coordinate(c.clone());
        let g = ap_metric(&cart, Signature::euclidean(2)).unwrap();
        assert_eq!(g.components(), &ExprMatrix::identity(2));
        let polar_frame = FrameField::new(c.clone(), exprs(&c, &[&["1", "0"], &["0", "1/r"]]), &zt).unwrap();
        let g = ap_metric(&polar_frame, Signature::euclidean(2)).unwrap();
        let expected = exprs(&c, &[&["1", "0"], &["0", "r^2"]]);
        for p in zt.points(&c) {
            let pt = c.point(&p);
            let diff = g.at(&pt).unwrap() - expected.eval(&pt).unwrap();
            assert!(diff.amax() < 1e-12);
        }
    }

    #[test]
    fn conformal_rescale_examples() {
        let c = polar();
        let zt = ZeroTest::default();
        let g = MetricField::new(
            c.clone(),
            exprs(&c, &[&["1", "0"], &["0", "r^2"]]),
            Signature::euclidean(2),
        )
        .unwrap();
        assert_eq!(conformal_rescale(&g, &Expr::one(), &zt).unwrap(), g);
        assert_eq!(
            conformal_rescale(&g, &Expr::zero(), &zt),
            Err(GeometryError::NonPositiveFactor)
        );
        let through_zero = parse("r - 1", &c).unwrap();
        assert_eq!(
            conformal_rescale(&g, &through_zero, &zt).map(|_| ()),
            Err(GeometryError::NonPositiveFactor)
        );
    }

    #[test]
    fn volume_form_examples() {
        let c = polar();
        let zt = ZeroTest::default();
        let id = MetricField::flat(c.clone(), Signature::euclidean(2)).unwrap();
        assert_eq!(volume_form(&id, &zt).unwrap().density(), &Expr::one());
        let g = MetricField::new(
            c.clone(),
            exprs(&c, &[&["1", "0"], &["0", "r^2"]]),
            Signature::euclidean(2),
        )
        .unwrap();
        let vol = volume_form(&g, &zt).unwrap();
        let diff = vol.density().clone() - Expr::var("r");
        assert!(zt.is_zero(&diff, &c).unwrap());
        let mink = Arc::new(Chart::new(&["t", "x", "y", "z"], &[(-1.0, 1.0); 4]).unwrap());
        let eta = MetricField::flat(mink, Signature::lorentzian(4)).unwrap();
        assert_eq!(volume_form(&eta, &zt).unwrap().density(), &Expr::one());
    }
}
