//! Pointwise constraint matrices on connection perturbations `δΓ^α_{μβ}`.
//!
//! Each constraint is linear in `δΓ` at a fixed point, so the dimension of the
//! admissible perturbation space is the number of unknowns minus the rank of
//! the stacked constraint rows.

use nalgebra::DMatrix;

/// Relative singular-value cutoff for numeric rank.
pub const RANK_TOL: f64 = 1e-8;

/// A linear condition on `δΓ` at one point, with numeric field values.
#[derive(Clone, Debug)]
pub enum Constraint {
    /// `δΓ^α_{μβ} = δΓ^α_{βμ}`.
    Symmetric,
    /// `δΓ^λ_{μα} g_{λβ} + δΓ^λ_{μβ} g_{αλ} = 0`.
    Metric(DMatrix<f64>),
    /// Metric condition relaxed by a free covector: `… = δA_μ g_{αβ}`.
    /// Adds `n` auxiliary unknowns, which the condition determines from `δΓ`.
    Weyl(DMatrix<f64>),
    /// `δΓ^α_{μβ} e_I^β = 0` for every column `e_I` of `e[β][I]`; a single
    /// column fixes one parallel vector field.
    Frame(DMatrix<f64>),
    /// `δΓ^λ_{μλ} = 0`.
    Volume,
}

fn gamma_index(n: usize, a: usize, m: usize, b: usize) -> usize {
    (a * n + m) * n + b
}

/// Stacked constraint rows. Columns are the `n³` entries of `δΓ` in
/// `[α, μ, β]` order followed by `n` entries of `δA` when any Weyl
/// constraint is present.
pub fn constraint_matrix(n: usize, constraints: &[Constraint]) -> DMatrix<f64> {
    let weyl = constraints.iter().any(|c| matches!(c, Constraint::Weyl(_)));
    let cols = n.pow(3) + if weyl { n } else { 0 };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for c in constraints {
        match c {
            Constraint::Symmetric => {
                for a in 0..n {
                    for m in 0..n {
                        for b in (m + 1)..n {
                            let mut row = vec![0.0; cols];
                            row[gamma_index(n, a, m, b)] = 1.0;
                            row[gamma_index(n, a, b, m)] = -1.0;
                            rows.push(row);
                        }
                    }
                }
            }
            Constraint::Metric(g) | Constraint::Weyl(g) => {
                for m in 0..n {
                    for a in 0..n {
                        for b in a..n {
                            let mut row = vec![0.0; cols];
                            for l in 0..n {
                                row[gamma_index(n, l, m, a)] += g[(l, b)];
                                row[gamma_index(n, l, m, b)] += g[(a, l)];
                            }
                            if matches!(c, Constraint::Weyl(_)) {
                                row[n.pow(3) + m] -= g[(a, b)];
                            }
                            rows.push(row);
                        }
                    }
                }
            }
            Constraint::Frame(e) => {
                for a in 0..n {
                    for m in 0..n {
                        for i in 0..e.ncols() {
                            let mut row = vec![0.0; cols];
                            for b in 0..n {
                                row[gamma_index(n, a, m, b)] = e[(b, i)];
                            }
                            rows.push(row);
                        }
                    }
                }
            }
            Constraint::Volume => {
                for m in 0..n {
                    let mut row = vec![0.0; cols];
                    for l in 0..n {
                        row[gamma_index(n, l, m, l)] = 1.0;
                    }
                    rows.push(row);
                }
            }
        }
    }
    DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
}

/// Numeric rank with a cutoff relative to the largest singular value.
pub fn numeric_rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * top).count()
}

/// Dimension of the space of `δΓ` satisfying every constraint.
pub fn solution_dim(n: usize, constraints: &[Constraint]) -> usize {
    let m = constraint_matrix(n, constraints);
    m.ncols() - numeric_rank(&m)
}
