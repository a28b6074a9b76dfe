//! Point-level frame algebra: bases of R^n, change-of-basis matrices,
//! membership in the subgroups O, SO, Weyl, SL and {1}, H-orbits, and the
//! invariant object each reduction defines.
//!
//! Signature convention: `(p, q)` means `η = diag(-1 (p times), +1 (q times))`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Determinant threshold under which a matrix is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-12;
/// Default absolute tolerance on matrix residuals.
pub const MATRIX_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("frame is singular (|det| = {det:e})")]
    SingularFrame { det: f64 },
    #[error("matrix is singular (|det| = {det:e})")]
    SingularMatrix { det: f64 },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("signature ({p},{q}) does not match dimension {n}")]
    SignatureMismatch { p: usize, q: usize, n: usize },
    #[error("invalid subgroup tag `{0}`")]
    InvalidTag(String),
}

/// Metric signature `(p, q)`: `p` negative and `q` positive directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Signature {
        Signature { p, q }
    }

    pub fn euclidean(n: usize) -> Signature {
        Signature { p: 0, q: n }
    }

    pub fn lorentzian(n: usize) -> Signature {
        Signature { p: 1, q: n - 1 }
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    /// Diagonal entries of η.
    pub fn eta_diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| if i < self.p { -1.0 } else { 1.0 }).collect()
    }

    pub fn eta(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.eta_diagonal()))
    }

    /// `(-1)^p`, the sign of `det η`.
    pub fn det_sign(&self) -> f64 {
        if self.p.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn check_dim(&self, n: usize) -> Result<(), FrameError> {
        if self.dim() == n {
            Ok(())
        } else {
            Err(FrameError::SignatureMismatch {
                p: self.p,
                q: self.q,
                n,
            })
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// A basis of R^n; column `i` is the `i`-th basis vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    matrix: DMatrix<f64>,
}

impl Frame {
    pub fn new(matrix: DMatrix<f64>) -> Result<Frame, FrameError> {
        if !matrix.is_square() {
            return Err(FrameError::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let det = matrix.determinant();
        if !(det.abs() > SINGULAR_TOL) {
            return Err(FrameError::SingularFrame { det: det.abs() });
        }
        Ok(Frame { matrix })
    }

    /// Builds a frame from `n*n` numbers in row-major order.
    pub fn from_row_major(n: usize, values: &[f64]) -> Result<Frame, FrameError> {
        if values.len() != n * n {
            return Err(FrameError::NotSquare {
                rows: n,
                cols: values.len() / n.max(1),
            });
        }
        Frame::new(DMatrix::from_row_slice(n, n, values))
    }

    pub fn identity(n: usize) -> Frame {
        Frame {
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    /// The frame `b h`, whose `j`-th vector is `Σ_i h_ij b_i`. This is the
    /// action under which the orbit invariants are constant.
    pub fn transformed(&self, h: &DMatrix<f64>) -> Result<Frame, FrameError> {
        if h.nrows() != self.dim() || h.ncols() != self.dim() {
            return Err(FrameError::DimensionMismatch(h.nrows(), self.dim()));
        }
        Frame::new(&self.matrix * h)
    }

    fn inverse(&self) -> DMatrix<f64> {
        self.matrix
            .clone()
            .try_inverse()
            .expect("frames are invertible by construction")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubgroupTag {
    O,
    SO,
    Weyl,
    SL,
    Identity,
}

/// Subgroup of GL(n) with the signature it is defined against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubgroupSpec {
    pub tag: SubgroupTag,
    pub signature: Option<Signature>,
    pub tol: f64,
}

impl SubgroupSpec {
    pub fn new(tag: SubgroupTag, signature: Option<Signature>) -> SubgroupSpec {
        SubgroupSpec {
            tag,
            signature,
            tol: MATRIX_TOL,
        }
    }

    pub fn orthogonal(p: usize, q: usize) -> SubgroupSpec {
        SubgroupSpec::new(SubgroupTag::O, Some(Signature::new(p, q)))
    }

    pub fn special_orthogonal(p: usize, q: usize) -> SubgroupSpec {
        SubgroupSpec::new(SubgroupTag::SO, Some(Signature::new(p, q)))
    }

    pub fn weyl(p: usize, q: usize) -> SubgroupSpec {
        SubgroupSpec::new(SubgroupTag::Weyl, Some(Signature::new(p, q)))
    }

    pub fn special_linear() -> SubgroupSpec {
        SubgroupSpec::new(SubgroupTag::SL, None)
    }

    pub fn identity() -> SubgroupSpec {
        SubgroupSpec::new(SubgroupTag::Identity, None)
    }

    pub fn with_tol(self, tol: f64) -> SubgroupSpec {
        SubgroupSpec { tol, ..self }
    }

    /// Signature for an `n`-dimensional check; Euclidean when none was given.
    pub fn signature_for(&self, n: usize) -> Result<Signature, FrameError> {
        let sig = self.signature.unwrap_or(Signature::euclidean(n));
        sig.check_dim(n)?;
        Ok(sig)
    }
}

impl fmt::Display for SubgroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.tag {
            SubgroupTag::O => "O",
            SubgroupTag::SO => "SO",
            SubgroupTag::Weyl => "W",
            SubgroupTag::SL => "SL",
            SubgroupTag::Identity => "Id",
        };
        match self.signature {
            Some(s) => write!(f, "{name}{s}"),
            None => f.write_str(name),
        }
    }
}

/// Parses a group name with an optional signature: `NAME` or `NAME(q)` or
/// `NAME(p,q)`. `NAME(q)` means the Euclidean signature `(0,q)`.
pub(crate) fn split_tag(s: &str) -> Result<(String, Option<Signature>), String> {
    let s = s.trim();
    let Some(open) = s.find('(') else {
        return Ok((s.to_string(), None));
    };
    let name = s[..open].trim().to_string();
    let inner = s[open + 1..].strip_suffix(')').ok_or_else(|| s.to_string())?;
    let nums: Vec<usize> = inner
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| s.to_string())?;
    let sig = match nums.as_slice() {
        [q] => Signature::new(0, *q),
        [p, q] => Signature::new(*p, *q),
        _ => return Err(s.to_string()),
    };
    Ok((name, Some(sig)))
}

impl FromStr for SubgroupSpec {
    type Err = FrameError;

    fn from_str(s: &str) -> Result<SubgroupSpec, FrameError> {
        let bad = || FrameError::InvalidTag(s.to_string());
        let (name, sig) = split_tag(s).map_err(|_| bad())?;
        let tag = match name.as_str() {
            "O" => SubgroupTag::O,
            "SO" => SubgroupTag::SO,
            "W" | "Weyl" => SubgroupTag::Weyl,
            "SL" => SubgroupTag::SL,
            "Id" | "I" | "Identity" => SubgroupTag::Identity,
            _ => return Err(bad()),
        };
        if sig.is_some() && matches!(tag, SubgroupTag::SL | SubgroupTag::Identity) {
            return Err(bad());
        }
        Ok(SubgroupSpec::new(tag, sig))
    }
}

/// Invariant object of an H-orbit of frames.
#[derive(Clone, Debug, PartialEq)]
pub enum OrbitInvariant {
    InnerProduct(DMatrix<f64>),
    /// Representative normalized to `|det| = 1`.
    ConformalClass(DMatrix<f64>),
    DeterminantClass(f64),
    TheFrameItself(Frame),
}

impl OrbitInvariant {
    /// Number of free parameters of the invariant in dimension `n`.
    pub fn parameter_count(tag: SubgroupTag, n: usize) -> usize {
        match tag {
            SubgroupTag::O | SubgroupTag::SO => n * (n + 1) / 2,
            SubgroupTag::Weyl => n * (n + 1) / 2 - 1,
            SubgroupTag::SL => 1,
            SubgroupTag::Identity => n * n,
        }
    }

    /// Entrywise comparison within an absolute tolerance.
    pub fn approx_eq(&self, other: &OrbitInvariant, tol: f64) -> bool {
        match (self, other) {
            (OrbitInvariant::InnerProduct(a), OrbitInvariant::InnerProduct(b))
            | (OrbitInvariant::ConformalClass(a), OrbitInvariant::ConformalClass(b)) => {
                a.shape() == b.shape() && max_abs(&(a - b)) <= tol
            }
            (OrbitInvariant::DeterminantClass(a), OrbitInvariant::DeterminantClass(b)) => (a - b).abs() <= tol,
            (OrbitInvariant::TheFrameItself(a), OrbitInvariant::TheFrameItself(b)) => {
                a.dim() == b.dim() && max_abs(&(a.matrix() - b.matrix())) <= tol
            }
            _ => false,
        }
    }
}

impl fmt::Display for OrbitInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = |m: &DMatrix<f64>| {
            (0..m.nrows())
                .map(|i| {
                    let row: Vec<String> = m.row(i).iter().map(|v| format!("{v}")).collect();
                    format!("[{}]", row.join(", "))
                })
                .collect::<Vec<_>>()
                .join(", ")
        };
        match self {
            OrbitInvariant::InnerProduct(m) => write!(f, "inner product [{}]", rows(m)),
            OrbitInvariant::ConformalClass(m) => write!(f, "conformal class [{}]", rows(m)),
            OrbitInvariant::DeterminantClass(a) => write!(f, "determinant class {a}"),
            OrbitInvariant::TheFrameItself(b) => write!(f, "frame [{}]", rows(b.matrix())),
        }
    }
}

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// The matrix `h` with `b2 = b1 h`.
pub fn change_of_basis(b1: &Frame, b2: &Frame) -> Result<DMatrix<f64>, FrameError> {
    if b1.dim() != b2.dim() {
        return Err(FrameError::DimensionMismatch(b1.dim(), b2.dim()));
    }
    Ok(b1.inverse() * b2.matrix())
}

/// Membership of `h` in the subgroup `spec`, within `spec.tol`.
pub fn in_subgroup(h: &DMatrix<f64>, spec: &SubgroupSpec) -> Result<bool, FrameError> {
    if !h.is_square() {
        return Err(FrameError::NotSquare {
            rows: h.nrows(),
            cols: h.ncols(),
        });
    }
    let n = h.nrows();
    let det = h.determinant();
    if !(det.abs() > SINGULAR_TOL) {
        return Err(FrameError::SingularMatrix { det: det.abs() });
    }
    let tol = spec.tol;
    Ok(match spec.tag {
        SubgroupTag::O | SubgroupTag::SO => {
            let eta = spec.signature_for(n)?.eta();
            let preserved = max_abs(&(h.transpose() * &eta * h - &eta)) <= tol;
            preserved && (spec.tag == SubgroupTag::O || (det - 1.0).abs() <= tol)
        }
        SubgroupTag::Weyl => {
            // h = c O  <=>  h^T η h = c^2 η with c > 0
            let eta = spec.signature_for(n)?.eta();
            let gram = h.transpose() * &eta * h;
            let c2 = (&eta * &gram).trace() / n as f64;
            c2 > 0.0 && max_abs(&(gram - &eta * c2)) <= tol * c2.max(1.0)
        }
        SubgroupTag::SL => (det - 1.0).abs() <= tol,
        SubgroupTag::Identity => max_abs(&(h - DMatrix::identity(n, n))) <= tol,
    })
}

/// True iff `b2` lies in the H-orbit of `b1`.
pub fn same_orbit(b1: &Frame, b2: &Frame, spec: &SubgroupSpec) -> Result<bool, FrameError> {
    let h = change_of_basis(b1, b2)?;
    in_subgroup(&h, spec)
}

/// The inner product `P = b^{-T} η b^{-1}` for which the columns of `b`
/// are orthonormal with Gram matrix η.
pub fn induced_inner_product(b: &Frame, signature: Signature) -> Result<DMatrix<f64>, FrameError> {
    signature.check_dim(b.dim())?;
    let inv = b.inverse();
    let p = inv.transpose() * signature.eta() * &inv;
    // symmetrize away round-off
    Ok((&p + p.transpose()) * 0.5)
}

/// Number of negative and positive eigenvalues of a symmetric matrix.
pub fn symmetric_signature(m: &DMatrix<f64>) -> Signature {
    let eig = SymmetricEigen::new(m.clone());
    let p = eig.eigenvalues.iter().filter(|v| **v < 0.0).count();
    Signature::new(p, m.nrows() - p)
}

/// The invariant object of the H-orbit of `b`.
pub fn orbit_invariant(b: &Frame, spec: &SubgroupSpec) -> Result<OrbitInvariant, FrameError> {
    let n = b.dim();
    Ok(match spec.tag {
        SubgroupTag::O | SubgroupTag::SO => {
            OrbitInvariant::InnerProduct(induced_inner_product(b, spec.signature_for(n)?)?)
        }
        SubgroupTag::Weyl => {
            let p = induced_inner_product(b, spec.signature_for(n)?)?;
            OrbitInvariant::ConformalClass(conformal_representative(&p))
        }
        SubgroupTag::SL => OrbitInvariant::DeterminantClass(b.determinant()),
        SubgroupTag::Identity => OrbitInvariant::TheFrameItself(b.clone()),
    })
}

/// `P / |det P|^{1/n}`, keeping the sign pattern.
pub fn conformal_representative(p: &DMatrix<f64>) -> DMatrix<f64> {
    let n = p.nrows() as f64;
    p / p.determinant().abs().powf(1.0 / n)
}

/// Determinant class and inner product of the SL-then-SO double reduction
/// defined by `b`.
pub fn unimodular_pair(b: &Frame, signature: Signature) -> Result<(f64, DMatrix<f64>), FrameError> {
    Ok((b.determinant(), induced_inner_product(b, signature)?))
}

/// Checks `det P = ε / A²` with `ε = (-1)^p`, the relation forced on the
/// inner product induced by any frame of determinant `A`.
pub fn unimodular_consistent(a: f64, p: &DMatrix<f64>, signature: Signature, tol: f64) -> bool {
    let expected = signature.det_sign() / (a * a);
    (p.determinant() - expected).abs() <= tol * expected.abs().max(1.0)
}
