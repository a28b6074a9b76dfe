//! Probabilistic zero testing by sampling on the chart's domain box.
//!
//! Points come from a Halton sequence with a Cranley–Patterson shift drawn
//! from a seeded ChaCha stream, so a given `(chart, samples, seed)` always
//! produces the same points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BinOp, Chart, EvalError, Expr, Func, Tape};

pub const DEFAULT_SAMPLES: usize = 32;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 0x6765_6f72_6564;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Sampling configuration for zero tests and residual evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroTest {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for ZeroTest {
    fn default() -> ZeroTest {
        ZeroTest {
            samples: DEFAULT_SAMPLES,
            tol: DEFAULT_TOL,
            seed: DEFAULT_SEED,
        }
    }
}

/// Aggregated outcome of evaluating residual expressions at the sample points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    /// Largest `|value|` seen.
    pub max_abs: f64,
    /// Whether every value satisfied `|value| <= tol * (1 + scale)`.
    pub pass: bool,
    pub samples: usize,
}

impl Residual {
    pub fn merge(self, other: Residual) -> Residual {
        Residual {
            max_abs: self.max_abs.max(other.max_abs),
            pass: self.pass && other.pass,
            samples: self.samples.max(other.samples),
        }
    }
}

fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let base = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

// Top-level summands with their signs; the largest one sets the
// cancellation scale for the tolerance.
fn summands<'a>(e: &'a Expr, sign: f64, out: &mut Vec<(f64, &'a Expr)>) {
    match e {
        Expr::Binary(BinOp::Add, a, b) => {
            summands(a, sign, out);
            summands(b, sign, out);
        }
        Expr::Binary(BinOp::Sub, a, b) => {
            summands(a, sign, out);
            summands(b, -sign, out);
        }
        Expr::Unary(Func::Neg, a) => summands(a, -sign, out),
        _ => out.push((sign, e)),
    }
}

impl ZeroTest {
    pub fn new(samples: usize, tol: f64) -> ZeroTest {
        ZeroTest {
            samples,
            tol,
            ..ZeroTest::default()
        }
    }

    pub fn with_seed(self, seed: u64) -> ZeroTest {
        ZeroTest { seed, ..self }
    }

    /// Quasi-random points strictly inside the domain box.
    pub fn points(&self, chart: &Chart) -> Vec<Vec<f64>> {
        let n = chart.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let shift: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        (1..=self.samples as u64)
            .map(|i| {
                chart
                    .domain()
                    .iter()
                    .enumerate()
                    .map(|(k, iv)| {
                        let base = PRIMES[k % PRIMES.len()];
                        // dimensions beyond the prime table reuse bases with an offset index
                        let idx = i + (k / PRIMES.len()) as u64 * 7919;
                        let mut u = (radical_inverse(idx, base) + shift[k]).fract();
                        u = u.clamp(1e-6, 1.0 - 1e-6);
                        iv.at(u)
                    })
                    .collect()
            })
            .collect()
    }

    /// Evaluates `e` at every sample point and reports the worst value.
    pub fn residual(&self, e: &Expr, chart: &Chart) -> Result<Residual, EvalError> {
        self.residual_all(std::iter::once(e), chart)
    }

    /// Residual over a family of expressions that should all vanish.
    pub fn residual_all<'a, I>(&self, exprs: I, chart: &Chart) -> Result<Residual, EvalError>
    where
        I: IntoIterator<Item = &'a Expr>,
    {
        let exprs: Vec<&Expr> = exprs.into_iter().filter(|e| !e.is_literal_zero()).collect();
        let mut result = Residual {
            max_abs: 0.0,
            pass: true,
            samples: self.samples,
        };
        if exprs.is_empty() {
            return Ok(result);
        }
        let points: Vec<_> = self.points(chart).into_iter().map(|p| chart.point(&p)).collect();
        // one tape for every summand of every expression
        let mut parts = Vec::new();
        let mut ranges = Vec::with_capacity(exprs.len());
        for e in exprs {
            let start = parts.len();
            summands(e, 1.0, &mut parts);
            ranges.push(start..parts.len());
        }
        let tape = Tape::compile(parts.iter().map(|(_, t)| *t));
        let mut scratch = Vec::new();
        for p in &points {
            tape.eval_with(p, &mut scratch)?;
            for range in &ranges {
                let mut value = 0.0;
                let mut scale: f64 = 0.0;
                for k in range.clone() {
                    let v = scratch[tape.root(k)];
                    scale = scale.max(v.abs());
                    value += parts[k].0 * v;
                }
                let abs = value.abs();
                result.max_abs = result.max_abs.max(abs);
                if abs > self.tol * (1.0 + scale) {
                    result.pass = false;
                }
            }
        }
        Ok(result)
    }

    pub fn is_zero(&self, e: &Expr, chart: &Chart) -> Result<bool, EvalError> {
        Ok(self.residual(e, chart)?.pass)
    }

    pub fn all_zero<'a, I>(&self, exprs: I, chart: &Chart) -> Result<bool, EvalError>
    where
        I: IntoIterator<Item = &'a Expr>,
    {
        Ok(self.residual_all(exprs, chart)?.pass)
    }
}

/// Sampled zero test with the default seed: true iff `|e(p)| <= tol (1 + scale)`
/// at `samples` quasi-random points of the chart's box.
pub fn is_zero(e: &Expr, chart: &Chart, samples: usize, tol: f64) -> Result<bool, EvalError> {
    assert!(samples >= 1, "at least one sample is required");
    assert!(tol > 0.0, "tolerance must be positive");
    ZeroTest::new(samples, tol).is_zero(e, chart)
}
