use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::ReductionError;
use crate::frames::{split_tag, Signature, SubgroupSpec, SubgroupTag};

/// Structure group of a reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Group {
    Subgroup(SubgroupTag),
    /// SL followed by SO inside SL: a volume form, then a metric reproducing it.
    Unimodular,
    /// SO(1,n-1) reduced further to the spatial rotations SO(n-1) fixing a
    /// unit timelike field.
    TimeGauge,
}

/// A reduction of the frame bundle in dimension `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReductionSpec {
    pub group: Group,
    pub signature: Option<Signature>,
    pub n: usize,
}

impl ReductionSpec {
    pub fn new(group: Group, signature: Option<Signature>, n: usize) -> Result<ReductionSpec, ReductionError> {
        let spec = ReductionSpec { group, signature, n };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_subgroup(spec: &SubgroupSpec, n: usize) -> Result<ReductionSpec, ReductionError> {
        ReductionSpec::new(Group::Subgroup(spec.tag), spec.signature, n)
    }

    /// Parses a tag such as `O(1,3)`, `W`, `SL`, `Id`, `Unimodular` or `TimeGauge`.
    pub fn parse(tag: &str, n: usize) -> Result<ReductionSpec, ReductionError> {
        let unsupported = || ReductionError::UnsupportedSpec(tag.to_string());
        let (name, sig) = split_tag(tag).map_err(|_| unsupported())?;
        match name.as_str() {
            "Unimodular" | "U" => ReductionSpec::new(Group::Unimodular, sig, n),
            "TimeGauge" | "TG" => ReductionSpec::new(Group::TimeGauge, sig, n),
            _ => {
                let spec = SubgroupSpec::from_str(tag).map_err(|_| unsupported())?;
                ReductionSpec::from_subgroup(&spec, n)
            }
        }
    }

    fn validate(&self) -> Result<(), ReductionError> {
        if self.n < 2 {
            return Err(ReductionError::UnsupportedSpec(format!("dimension {} < 2", self.n)));
        }
        if let Some(sig) = self.signature {
            if sig.dim() != self.n {
                return Err(ReductionError::UnsupportedSpec(format!(
                    "signature {sig} in dimension {}",
                    self.n
                )));
            }
            if self.group == Group::TimeGauge && sig.p != 1 {
                return Err(ReductionError::UnsupportedSpec(format!(
                    "time gauge needs one timelike direction, got {sig}"
                )));
            }
        }
        Ok(())
    }

    /// `dim H`.
    pub fn subgroup_dim(&self) -> usize {
        let n = self.n;
        match self.group {
            Group::Subgroup(SubgroupTag::O | SubgroupTag::SO) | Group::Unimodular => n * (n - 1) / 2,
            Group::Subgroup(SubgroupTag::Weyl) => n * (n - 1) / 2 + 1,
            Group::Subgroup(SubgroupTag::SL) => n * n - 1,
            Group::Subgroup(SubgroupTag::Identity) => 0,
            Group::TimeGauge => (n - 1) * (n - 2) / 2,
        }
    }
}

impl fmt::Display for ReductionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.group {
            Group::Subgroup(tag) => {
                return write!(f, "{}", SubgroupSpec::new(tag, self.signature));
            }
            Group::Unimodular => "Unimodular",
            Group::TimeGauge => "TimeGauge",
        };
        match self.signature {
            Some(s) => write!(f, "{name}{s}"),
            None => f.write_str(name),
        }
    }
}

/// One step `from → to` of a staged reduction, with `dim(from/to)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DofStage {
    pub from: String,
    pub to: String,
    pub dim_quotient: usize,
}

/// Fibre dimensions for a reduction `GL(n) → H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DofReport {
    pub group: String,
    pub n: usize,
    /// `d = dim H`.
    pub dim_h: usize,
    /// `D - d = dim GL/H`.
    pub dim_quotient: usize,
    /// `n D`: all linear connections.
    pub connection_space: usize,
    /// `n d`: connections preserving the reduced structure.
    pub preserving_space: usize,
    pub stages: Vec<DofStage>,
    pub notes: String,
}

pub fn dof_table(spec: &ReductionSpec) -> Result<DofReport, ReductionError> {
    spec.validate()?;
    let n = spec.n;
    let d = spec.subgroup_dim();
    let big = n * n;
    let stage = |from: &str, to: &str, dim_quotient| DofStage {
        from: from.to_string(),
        to: to.to_string(),
        dim_quotient,
    };
    let (stages, notes) = match spec.group {
        Group::Subgroup(tag) => {
            let note = match tag {
                SubgroupTag::O | SubgroupTag::SO => "reduction object: an inner product",
                SubgroupTag::Weyl => "reduction object: a conformal class of inner products",
                SubgroupTag::SL => "reduction object: a nonzero determinant A",
                SubgroupTag::Identity => "reduction object: a single frame",
            };
            (vec![stage("GL", &spec.to_string(), big - d)], note.to_string())
        }
        Group::Unimodular => (
            vec![stage("GL", "SL", 1), stage("SL", "SO", n * (n + 1) / 2 - 1)],
            "double reduction: a volume form, then a metric with that volume".to_string(),
        ),
        Group::TimeGauge => (
            vec![
                stage("GL", &format!("SO(1,{})", n - 1), n * (n + 1) / 2),
                stage(&format!("SO(1,{})", n - 1), &format!("SO({})", n - 1), n - 1),
            ],
            format!("time gauge: a unit timelike field adds {} per fibre", n - 1),
        ),
    };
    Ok(DofReport {
        group: spec.to_string(),
        n,
        dim_h: d,
        dim_quotient: big - d,
        connection_space: n * big,
        preserving_space: n * d,
        stages,
        notes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConnectionKind {
    All,
    Preserving,
    Symmetric,
    SymmetricPreserving,
}

impl FromStr for ConnectionKind {
    type Err = ReductionError;

    fn from_str(s: &str) -> Result<ConnectionKind, ReductionError> {
        match s {
            "all" => Ok(ConnectionKind::All),
            "preserving" => Ok(ConnectionKind::Preserving),
            "symmetric" => Ok(ConnectionKind::Symmetric),
            "symmetric_preserving" => Ok(ConnectionKind::SymmetricPreserving),
            _ => Err(ReductionError::UnsupportedSpec(format!("connection kind {s}"))),
        }
    }
}

/// Pointwise dimension of a space of connections.
///
/// For `SymmetricPreserving` this is the freedom left once torsion is set to
/// zero: none for a metric or a frame, the `n` components of the Weyl form
/// for a conformal class, and `n·n(n+1)/2 - n` for a bare volume form.
pub fn connection_dof(spec: &ReductionSpec, kind: ConnectionKind) -> Result<usize, ReductionError> {
    let report = dof_table(spec)?;
    let n = spec.n;
    let symmetric = n * n * (n + 1) / 2;
    Ok(match kind {
        ConnectionKind::All => report.connection_space,
        ConnectionKind::Preserving => report.preserving_space,
        ConnectionKind::Symmetric => symmetric,
        ConnectionKind::SymmetricPreserving => match spec.group {
            Group::Subgroup(SubgroupTag::Weyl) => n,
            Group::Subgroup(SubgroupTag::SL) => symmetric - n,
            _ => 0,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(tag: &str) -> (usize, usize) {
        let r = dof_table(&ReductionSpec::parse(tag, 4).unwrap()).unwrap();
        (r.dim_h, r.dim_quotient)
    }

    #[test]
    fn four_dimensional_table() {
        assert_eq!(row("O(1,3)"), (6, 10));
        assert_eq!(row("W(1,3)"), (7, 9));
        assert_eq!(row("SL"), (15, 1));
        assert_eq!(row("Id"), (0, 16));
        let uni = dof_table(&ReductionSpec::parse("Unimodular", 4).unwrap()).unwrap();
        let stages: Vec<usize> = uni.stages.iter().map(|s| s.dim_quotient).collect();
        assert_eq!(stages, vec![1, 9]);
        let tg = dof_table(&ReductionSpec::parse("TimeGauge", 4).unwrap()).unwrap();
        assert_eq!((tg.dim_h, tg.stages[1].dim_quotient), (3, 3));
    }

    #[test]
    fn connection_counts() {
        let o = ReductionSpec::parse("O(1,3)", 4).unwrap();
        let w = ReductionSpec::parse("W(1,3)", 4).unwrap();
        assert_eq!(connection_dof(&o, ConnectionKind::All).unwrap(), 64);
        assert_eq!(connection_dof(&o, ConnectionKind::Preserving).unwrap(), 24);
        assert_eq!(connection_dof(&w, ConnectionKind::Preserving).unwrap(), 28);
        assert_eq!(connection_dof(&o, ConnectionKind::Symmetric).unwrap(), 40);
        assert_eq!(connection_dof(&o, ConnectionKind::SymmetricPreserving).unwrap(), 0);
        assert_eq!(connection_dof(&w, ConnectionKind::SymmetricPreserving).unwrap(), 4);
    }

    #[test]
    fn invalid_specs() {
        assert!(ReductionSpec::parse("O(1,3)", 3).is_err());
        assert!(ReductionSpec::parse("Q", 3).is_err());
        assert!(ReductionSpec::parse("Id", 1).is_err());
        assert!(ReductionSpec::parse("TimeGauge(0,4)", 4).is_err());
        assert_eq!(ReductionSpec::parse("SO(3)", 3).unwrap().to_string(), "SO(0,3)");
    }
}
