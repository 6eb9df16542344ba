//! Unit directions in the space of traceless Hermitian matrices and the
//! generalized Gell-Mann basis that coordinatizes it.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::field::{BipartiteShape, NumberField, StateSpace};
use crate::hermitian::{hs_inner, partial_transpose, CMatrix, DensityMatrix, HermitianMatrix};

const DIRECTION_TOL: f64 = 1e-12;

/// One element of the HS-orthonormal generalized Gell-Mann basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisElement {
    /// `diag(1,…,1,−l,0,…,0)/√(l(l+1))` with `l` leading ones, `1 ≤ l < N`.
    Diagonal { l: usize },
    /// `(E_jk + E_kj)/√2`, `j < k`.
    Symmetric { j: usize, k: usize },
    /// `i(E_kj − E_jk)/√2`, `j < k`. Complex field only.
    Antisymmetric { j: usize, k: usize },
}

/// Generalized Gell-Mann basis of the traceless Hermitian matrices.
///
/// Ordering: diagonal elements, then symmetric pairs, then (complex field)
/// antisymmetric pairs; pairs in lexicographic `(j, k)` order.
#[derive(Debug, Clone)]
pub struct GellMannBasis {
    space: StateSpace,
    elements: Vec<BasisElement>,
}

impl GellMannBasis {
    pub fn new(space: StateSpace) -> Self {
        let n = space.n;
        let mut elements: Vec<BasisElement> = (1..n).map(|l| BasisElement::Diagonal { l }).collect();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|j| (j + 1..n).map(move |k| (j, k)))
            .collect();
        elements.extend(pairs.iter().map(|&(j, k)| BasisElement::Symmetric { j, k }));
        if space.field == NumberField::Complex {
            elements.extend(pairs.iter().map(|&(j, k)| BasisElement::Antisymmetric { j, k }));
        }
        debug_assert_eq!(elements.len(), space.ambient_dim());
        Self { space, elements }
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn element(&self, idx: usize) -> HermitianMatrix {
        let mut coeffs = vec![0.0; self.len()];
        coeffs[idx] = 1.0;
        self.combine(&coeffs).expect("coefficient length matches basis")
    }

    /// `Σ cᵢ·bᵢ`, written entrywise.
    pub fn combine(&self, coeffs: &[f64]) -> Result<HermitianMatrix> {
        if coeffs.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: coeffs.len(),
            });
        }
        let n = self.space.n;
        let mut m = CMatrix::zeros(n, n);
        for (el, &c) in self.elements.iter().zip(coeffs) {
            match *el {
                BasisElement::Diagonal { l } => {
                    let s = c / ((l * (l + 1)) as f64).sqrt();
                    for d in 0..l {
                        m[(d, d)].re += s;
                    }
                    m[(l, l)].re -= l as f64 * s;
                }
                BasisElement::Symmetric { j, k } => {
                    m[(j, k)].re += c * FRAC_1_SQRT_2;
                    m[(k, j)].re += c * FRAC_1_SQRT_2;
                }
                BasisElement::Antisymmetric { j, k } => {
                    m[(j, k)].im -= c * FRAC_1_SQRT_2;
                    m[(k, j)].im += c * FRAC_1_SQRT_2;
                }
            }
        }
        Ok(HermitianMatrix::hermitize(m, self.space.field))
    }

    /// Coordinates `⟨h, bᵢ⟩_HS`; the traceless part of `h` is recovered by
    /// [`GellMannBasis::combine`].
    pub fn coordinates(&self, h: &HermitianMatrix) -> Result<Vec<f64>> {
        if h.dim() != self.space.n {
            return Err(Error::DimensionMismatch {
                expected: self.space.n,
                found: h.dim(),
            });
        }
        let m = h.matrix();
        Ok(self
            .elements
            .iter()
            .map(|el| match *el {
                BasisElement::Diagonal { l } => {
                    let head: f64 = (0..l).map(|d| m[(d, d)].re).sum();
                    (head - l as f64 * m[(l, l)].re) / ((l * (l + 1)) as f64).sqrt()
                }
                BasisElement::Symmetric { j, k } => 2.0 * FRAC_1_SQRT_2 * m[(j, k)].re,
                BasisElement::Antisymmetric { j, k } => -2.0 * FRAC_1_SQRT_2 * m[(j, k)].im,
            })
            .collect())
    }
}

/// A traceless Hermitian matrix of unit HS norm: a point of the unit sphere
/// `S^{D−1}` around the maximally mixed state.
#[derive(Debug, Clone, PartialEq)]
pub struct TracelessDirection(HermitianMatrix);

impl TracelessDirection {
    /// Validates `|Tr ω| ≤ 1e−12` and `|‖ω‖ − 1| ≤ 1e−12`.
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        let tr = matrix.trace();
        if tr.abs() > DIRECTION_TOL {
            return Err(Error::NotTraceless(tr));
        }
        let norm = matrix.hs_norm();
        if (norm - 1.0).abs() > DIRECTION_TOL {
            return Err(Error::NotUnitNorm(norm));
        }
        Ok(Self(matrix))
    }

    /// Projects onto the traceless subspace and normalizes.
    pub fn normalize(matrix: &HermitianMatrix) -> Result<Self> {
        let t = matrix.traceless_part();
        let norm = t.hs_norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotUnitNorm(norm));
        }
        Ok(Self(t.scale(1.0 / norm)))
    }

    /// Unit direction from `I/N` toward `target`.
    pub fn toward(target: &DensityMatrix) -> Result<Self> {
        Self::normalize(target.as_hermitian())
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn field(&self) -> NumberField {
        self.0.field()
    }

    /// The image under partial transposition; an isometry, so still a unit
    /// traceless direction.
    pub fn partial_transpose(&self, shape: &BipartiteShape) -> Result<Self> {
        Ok(Self(partial_transpose(&self.0, shape)?))
    }

    pub fn negate(&self) -> Self {
        Self(self.0.scale(-1.0))
    }

    pub fn dot(&self, other: &HermitianMatrix) -> Result<f64> {
        hs_inner(&self.0, other)
    }
}

impl AsRef<HermitianMatrix> for TracelessDirection {
    fn as_ref(&self) -> &HermitianMatrix {
        &self.0
    }
}
