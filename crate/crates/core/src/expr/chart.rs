use std::collections::BTreeMap;
use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use super::Func;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChartError {
    #[error("chart must have at least one coordinate")]
    Empty,
    #[error("expected {expected} domain intervals, got {got}")]
    DomainArity { expected: usize, got: usize },
    #[error("duplicate coordinate name `{0}`")]
    DuplicateName(String),
    #[error("`{0}` is not a valid identifier")]
    InvalidName(String),
    #[error("`{0}` is reserved")]
    Reserved(String),
    #[error("empty domain interval for `{name}`: ({lo}, {hi})")]
    EmptyInterval { name: String, lo: f64, hi: f64 },
    #[error("constant `{0}` must have a finite value")]
    NonFiniteConstant(String),
}

/// Open sampling interval `(lo, hi)` for one coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Interval {
        Interval { lo, hi }
    }

    pub fn at(&self, unit: f64) -> f64 {
        self.lo + unit * (self.hi - self.lo)
    }
}

/// A coordinate chart: named coordinates, the box the chart is sampled on,
/// and optional named parameters usable as constants in expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    coords: Vec<Arc<str>>,
    domain: Vec<Interval>,
    constants: BTreeMap<String, f64>,
}

pub(crate) const BUILTIN_CONSTANTS: [(&str, f64); 2] = [("pi", std::f64::consts::PI), ("e", std::f64::consts::E)];

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_reserved(name: &str) -> bool {
    Func::from_name(name).is_some() || BUILTIN_CONSTANTS.iter().any(|(c, _)| *c == name)
}

impl Chart {
    pub fn new<S: AsRef<str>>(coords: &[S], domain: &[(f64, f64)]) -> Result<Chart, ChartError> {
        if coords.is_empty() {
            return Err(ChartError::Empty);
        }
        if coords.len() != domain.len() {
            return Err(ChartError::DomainArity {
                expected: coords.len(),
                got: domain.len(),
            });
        }
        let mut names: Vec<Arc<str>> = Vec::with_capacity(coords.len());
        for (name, &(lo, hi)) in coords.iter().map(AsRef::as_ref).zip(domain) {
            if !is_identifier(name) {
                return Err(ChartError::InvalidName(name.to_string()));
            }
            if is_reserved(name) {
                return Err(ChartError::Reserved(name.to_string()));
            }
            if names.iter().any(|n| &**n == name) {
                return Err(ChartError::DuplicateName(name.to_string()));
            }
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(ChartError::EmptyInterval {
                    name: name.to_string(),
                    lo,
                    hi,
                });
            }
            names.push(Arc::from(name));
        }
        Ok(Chart {
            coords: names,
            domain: domain.iter().map(|&(lo, hi)| Interval::new(lo, hi)).collect(),
            constants: BTreeMap::new(),
        })
    }

    /// Declares a named parameter that expressions may use as a constant.
    pub fn with_constant(mut self, name: &str, value: f64) -> Result<Chart, ChartError> {
        if !is_identifier(name) {
            return Err(ChartError::InvalidName(name.to_string()));
        }
        if is_reserved(name) {
            return Err(ChartError::Reserved(name.to_string()));
        }
        if self.coords.iter().any(|c| &**c == name) || self.constants.contains_key(name) {
            return Err(ChartError::DuplicateName(name.to_string()));
        }
        if !value.is_finite() {
            return Err(ChartError::NonFiniteConstant(name.to_string()));
        }
        self.constants.insert(name.to_string(), value);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Arc<str>] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &str {
        &self.coords[i]
    }

    pub fn domain(&self) -> &[Interval] {
        &self.domain
    }

    pub fn constants(&self) -> &BTreeMap<String, f64> {
        &self.constants
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| &**c == name)
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.constants.contains_key(name) || BUILTIN_CONSTANTS.iter().any(|(c, _)| *c == name)
    }

    /// Binds coordinate values (in chart order) plus the declared constants.
    pub fn point(&self, values: &[f64]) -> Point {
        assert_eq!(values.len(), self.dim(), "point arity must match chart");
        let mut bindings: Vec<(Arc<str>, f64)> = self.coords.iter().cloned().zip(values.iter().copied()).collect();
        bindings.extend(self.constants.iter().map(|(k, v)| (Arc::from(k.as_str()), *v)));
        Point { bindings }
    }

    pub fn contains(&self, values: &[f64]) -> bool {
        values.len() == self.dim() && values.iter().zip(&self.domain).all(|(v, iv)| *v > iv.lo && *v < iv.hi)
    }
}

/// Values for the free symbols of an expression.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Point {
    bindings: Vec<(Arc<str>, f64)>,
}

impl Point {
    pub fn new() -> Point {
        Point::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> Point {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        match self.bindings.iter_mut().find(|(n, _)| &**n == name) {
            Some(slot) => slot.1 = value,
            None => self.bindings.push((Arc::from(name), value)),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.bindings.iter().find(|(n, _)| &**n == name).map(|(_, v)| *v)
    }
}

impl From<&HashMap<String, f64>> for Point {
    fn from(map: &HashMap<String, f64>) -> Point {
        let mut p = Point::new();
        for (k, v) in map {
            p.set(k, *v);
        }
        p
    }
}

impl From<&BTreeMap<String, f64>> for Point {
    fn from(map: &BTreeMap<String, f64>) -> Point {
        let mut p = Point::new();
        for (k, v) in map {
            p.set(k, *v);
        }
        p
    }
}
