//! Numeric oracles shared by the integration tests. Everything here works on
//! plain `f64` evaluations of the input fields, never on symbolic results.
#![allow(dead_code)]

use std::sync::Arc;

use geored::expr::{Chart, Expr, ZeroTest};
use geored::frames::Signature;
use geored::geometry::{ExprMatrix, FrameField, MetricField};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-5;

pub fn metric_at(g: &MetricField, x: &[f64]) -> DMatrix<f64> {
    g.at(&g.chart().point(x)).unwrap()
}

fn shifted(x: &[f64], k: usize, h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[k] += h;
    y
}

/// Central-difference `∂_k g_{ij}` at `x`, as `[k][i][j]`.
pub fn fd_metric_derivative(g: &MetricField, x: &[f64], h: f64) -> Vec<DMatrix<f64>> {
    (0..x.len())
        .map(|k| (metric_at(g, &shifted(x, k, h)) - metric_at(g, &shifted(x, k, -h))) / (2.0 * h))
        .collect()
}

/// Christoffel symbols `[α, μ, β]` from numeric metric values only.
pub fn fd_christoffel(g: &MetricField, x: &[f64], h: f64) -> Vec<f64> {
    let n = x.len();
    let dg = fd_metric_derivative(g, x, h);
    let ginv = metric_at(g, x).try_inverse().unwrap();
    let mut out = vec![0.0; n * n * n];
    for a in 0..n {
        for m in 0..n {
            for b in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += ginv[(a, l)] * (dg[m][(l, b)] + dg[b][(l, m)] - dg[l][(m, b)]);
                }
                out[(a * n + m) * n + b] = 0.5 * s;
            }
        }
    }
    out
}

/// Ricci scalar from nested finite differences of `fd_christoffel`.
pub fn fd_ricci_scalar(g: &MetricField, x: &[f64], h: f64) -> f64 {
    let n = x.len();
    let inner = h * 1e-2;
    let gam = |y: &[f64]| fd_christoffel(g, y, inner);
    let at = |t: &[f64], a: usize, m: usize, b: usize| t[(a * n + m) * n + b];
    let g0 = gam(x);
    let dgam: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let p = gam(&shifted(x, k, h));
            let q = gam(&shifted(x, k, -h));
            p.iter().zip(&q).map(|(a, b)| (a - b) / (2.0 * h)).collect()
        })
        .collect();
    let ginv = metric_at(g, x).try_inverse().unwrap();
    let mut scalar = 0.0;
    for s in 0..n {
        for v in 0..n {
            let mut ricci = 0.0;
            for m in 0..n {
                ricci += at(&dgam[m], m, v, s) - at(&dgam[v], m, m, s);
                for l in 0..n {
                    ricci += at(&g0, m, m, l) * at(&g0, l, v, s) - at(&g0, m, v, l) * at(&g0, l, m, s);
                }
            }
            scalar += ginv[(s, v)] * ricci;
        }
    }
    scalar
}

/// Central-difference `(dθ^I)_{μν} = ∂_μ θ^I_ν - ∂_ν θ^I_μ` as `[I, μ, ν]`.
pub fn fd_coframe_exterior(f: &FrameField, x: &[f64], h: f64) -> Vec<f64> {
    let n = x.len();
    let chart = f.chart();
    let theta = |y: &[f64]| f.coframe().eval(&chart.point(y)).unwrap();
    let d: Vec<DMatrix<f64>> = (0..n)
        .map(|k| (theta(&shifted(x, k, h)) - theta(&shifted(x, k, -h))) / (2.0 * h))
        .collect();
    let mut out = vec![0.0; n * n * n];
    for i in 0..n {
        for m in 0..n {
            for v in 0..n {
                out[(i * n + m) * n + v] = d[m][(i, v)] - d[v][(i, m)];
            }
        }
    }
    out
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

pub fn polar_chart() -> Arc<Chart> {
    Arc::new(Chart::new(&["r", "phi"], &[(0.5, 3.0), (0.1, 6.0)]).unwrap())
}

pub fn sphere_chart() -> Arc<Chart> {
    Arc::new(Chart::new(&["theta", "phi"], &[(0.2, 2.9), (0.0, 6.0)]).unwrap())
}

pub fn diag_metric(chart: &Arc<Chart>, entries: &[&str], sig: Signature) -> MetricField {
    let diag = entries.iter().map(|s| geored::expr::parse(s, chart).unwrap()).collect();
    MetricField::new(chart.clone(), ExprMatrix::diagonal(diag), sig).unwrap()
}

pub fn polar_frame(chart: &Arc<Chart>) -> FrameField {
    let e = ExprMatrix::diagonal(vec![Expr::one(), geored::expr::parse("1/r", chart).unwrap()]);
    FrameField::new(chart.clone(), e, &ZeroTest::default()).unwrap()
}

/// A frame `I + ε·(smooth entries)` on `[0.2, 1]^n`, diagonally dominant so
/// it is invertible on the whole box.
pub fn random_frame(n: usize, seed: u64) -> FrameField {
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let chart = Arc::new(Chart::new(&names, &vec![(0.2, 1.0); n]).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 0.8 / n as f64;
    let e = ExprMatrix::from_fn(n, |i, j| {
        let a = rng.gen_range(-1.0..1.0) * scale;
        let b = rng.gen_range(0.5..2.0);
        let k = rng.gen_range(0..n);
        let l = rng.gen_range(0..n);
        let wave = match rng.gen_range(0..3) {
            0 => Expr::sin(Expr::real(b) * Expr::var(&names[k])),
            1 => Expr::cos(Expr::var(&names[k]) * Expr::var(&names[l])),
            _ => Expr::exp(Expr::neg(Expr::real(b) * Expr::var(&names[k]))),
        };
        let off = Expr::real(a) * wave;
        if i == j {
            Expr::one() + off
        } else {
            off
        }
    });
    FrameField::new(chart, e, &ZeroTest::default()).unwrap()
}

/// Well-conditioned random basis `I + 0.3·U(-1,1)`.
pub fn random_basis(n: usize, rng: &mut impl Rng) -> geored::frames::Frame {
    let m = DMatrix::from_fn(n, n, |i, j| {
        let noise = rng.gen_range(-0.3..0.3);
        if i == j {
            1.0 + noise
        } else {
            noise
        }
    });
    geored::frames::Frame::new(m).unwrap()
}

/// Uniformly distributed rotation in SO(n) from the QR factorization of a
/// Gaussian-like matrix.
pub fn random_rotation(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let qr = m.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Boost with rapidity `rapidity` along the unit spatial direction `dir`,
/// acting on `(t, x_1, …)` with η = diag(-1, 1, …).
pub fn boost(dir: &[f64], rapidity: f64) -> DMatrix<f64> {
    let n = dir.len() + 1;
    let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
    let mut m = DMatrix::identity(n, n);
    m[(0, 0)] = ch;
    for i in 0..dir.len() {
        m[(0, i + 1)] = sh * dir[i];
        m[(i + 1, 0)] = sh * dir[i];
        for j in 0..dir.len() {
            m[(i + 1, j + 1)] += (ch - 1.0) * dir[i] * dir[j];
        }
    }
    m
}

pub fn random_direction(k: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.1 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

/// Random element of the orthochronous-or-not group O(p,q) for p ≤ 1.
pub fn random_orthogonal(sig: Signature, special: bool, rng: &mut impl Rng) -> DMatrix<f64> {
    let n = sig.dim();
    let mut h = if sig.p == 0 {
        random_rotation(n, rng)
    } else {
        assert_eq!(sig.p, 1, "generator covers p <= 1");
        let mut spatial = DMatrix::identity(n, n);
        spatial
            .view_mut((1, 1), (n - 1, n - 1))
            .copy_from(&random_rotation(n - 1, rng));
        boost(&random_direction(n - 1, rng), rng.gen_range(-1.5..1.5)) * spatial
    };
    if !special && rng.gen_bool(0.5) {
        // reflect the last axis
        h.column_mut(n - 1).neg_mut();
    }
    h
}

/// Random element of the subgroup named by `spec` in dimension `n`.
pub fn random_subgroup_element(spec: &geored::frames::SubgroupSpec, n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    use geored::frames::SubgroupTag;
    let sig = spec.signature_for(n).unwrap();
    match spec.tag {
        SubgroupTag::O => random_orthogonal(sig, false, rng),
        SubgroupTag::SO => random_orthogonal(sig, true, rng),
        SubgroupTag::Weyl => random_orthogonal(sig, false, rng) * rng.gen_range(0.2..5.0),
        SubgroupTag::SL => {
            let mut m = random_basis(n, rng).matrix().clone();
            if m.determinant() < 0.0 {
                m.column_mut(0).neg_mut();
            }
            let det = m.determinant();
            m / det.powf(1.0 / n as f64)
        }
        SubgroupTag::Identity => DMatrix::identity(n, n),
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
