//! Number fields, single-system state spaces and bipartite shapes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar field of the matrix entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumberField {
    Complex,
    Real,
}

impl NumberField {
    /// Dyson index: 2 for complex Hermitian matrices, 1 for real symmetric ones.
    pub fn beta(self) -> f64 {
        match self {
            NumberField::Complex => 2.0,
            NumberField::Real => 1.0,
        }
    }
}

impl fmt::Display for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumberField::Complex => f.write_str("complex"),
            NumberField::Real => f.write_str("real"),
        }
    }
}

impl FromStr for NumberField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "complex" => Ok(NumberField::Complex),
            "real" => Ok(NumberField::Real),
            other => Err(Error::InvalidArgument(format!(
                "unknown number field {other:?} (expected complex or real)"
            ))),
        }
    }
}

/// The set of N×N density matrices over a field, seen as a convex body in
/// its affine hull of dimension `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateSpace {
    pub n: usize,
    pub field: NumberField,
}

impl StateSpace {
    pub fn new(n: usize, field: NumberField) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidShape(format!(
                "state space needs N >= 2, got {n}"
            )));
        }
        Ok(Self { n, field })
    }

    /// Real dimension of the traceless Hermitian (or real symmetric) matrices:
    /// N²−1 over the complex numbers, N(N+1)/2−1 over the reals.
    pub fn ambient_dim(&self) -> usize {
        match self.field {
            NumberField::Complex => self.n * self.n - 1,
            NumberField::Real => self.n * (self.n + 1) / 2 - 1,
        }
    }
}

/// Factor dimensions of a bipartite system, K × M with N = K·M.
///
/// Row index of a product basis vector `|i⟩⊗|a⟩` is `i·M + a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteShape {
    k: usize,
    m: usize,
    field: NumberField,
}

impl BipartiteShape {
    pub fn new(k: usize, m: usize, field: NumberField) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidShape(format!("K must be >= 1, got {k}")));
        }
        if m < 2 {
            return Err(Error::InvalidShape(format!("M must be >= 2, got {m}")));
        }
        Ok(Self { k, m, field })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.k * self.m
    }

    pub fn field(&self) -> NumberField {
        self.field
    }

    pub fn space(&self) -> StateSpace {
        StateSpace {
            n: self.n(),
            field: self.field,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.space().ambient_dim()
    }

    pub fn with_field(self, field: NumberField) -> Self {
        Self { field, ..self }
    }
}

impl fmt::Display for BipartiteShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.k, self.m)
    }
}

/// Parses `"KxM"` into factor dimensions.
pub fn parse_shape(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidShape(format!("expected KxM, got {s:?}"));
    let (k, m) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
    let k = k.trim().parse().map_err(|_| bad())?;
    let m = m.trim().parse().map_err(|_| bad())?;
    Ok((k, m))
}
