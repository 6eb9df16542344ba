//! Hermitian matrices under the Hilbert–Schmidt inner product, density
//! matrices, partial transposition and the PPT predicates.
//!
//! Every matrix is stored as a dense complex `DMatrix`. Real-field matrices
//! carry identically zero imaginary parts and are diagonalized with the real
//! symmetric solver.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::field::{BipartiteShape, NumberField, StateSpace};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Default PSD slack used when constructing a [`DensityMatrix`].
pub const DEFAULT_PSD_TOL: f64 = 1e-10;

/// Default slack of the PPT test (relative to unit trace).
pub const DEFAULT_PPT_TOL: f64 = 1e-12;

const EIGEN_MAX_ITER: usize = 100_000;

/// A Hermitian (real symmetric, for the real field) matrix.
///
/// Construction stores `(A + A†)/2`, so the stored entries are exactly
/// Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    field: NumberField,
    data: CMatrix,
}

/// Eigendecomposition with eigenvalues in ascending order; column `k` of
/// `vectors` belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianMatrix {
    pub fn new(data: CMatrix, field: NumberField) -> Result<Self> {
        if !data.is_square() {
            return Err(Error::InvalidShape(format!(
                "matrix is {}x{}, expected square",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.nrows() == 0 {
            return Err(Error::InvalidShape("empty matrix".into()));
        }
        Ok(Self::hermitize(data, field))
    }

    pub fn from_real(data: DMatrix<f64>) -> Result<Self> {
        Self::new(data.map(|x| C64::new(x, 0.0)), NumberField::Real)
    }

    pub(crate) fn hermitize(data: CMatrix, field: NumberField) -> Self {
        let n = data.nrows();
        let mut out = CMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                let v = (data[(i, j)] + data[(j, i)].conj()) * 0.5;
                out[(i, j)] = match field {
                    NumberField::Complex => v,
                    NumberField::Real => C64::new(v.re, 0.0),
                };
            }
        }
        for i in 0..n {
            out[(i, i)].im = 0.0;
        }
        Self { field, data: out }
    }

    pub fn identity(n: usize, field: NumberField) -> Self {
        Self {
            field,
            data: CMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize, field: NumberField) -> Self {
        Self {
            field,
            data: CMatrix::zeros(n, n),
        }
    }

    /// Rank-one projector `|ψ⟩⟨ψ|/⟨ψ|ψ⟩`.
    pub fn projector(psi: &CVector, field: NumberField) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument(
                "projector onto a zero vector".into(),
            ));
        }
        let unit = psi.unscale(norm);
        Ok(Self::hermitize(&unit * unit.adjoint(), field))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn field(&self) -> NumberField {
        self.field
    }

    pub fn space(&self) -> StateSpace {
        StateSpace {
            n: self.dim(),
            field: self.field,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.data[(i, i)].re).sum()
    }

    /// Frobenius norm, `√Tr A²`.
    pub fn hs_norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            field: self.field,
            data: self.data.scale(s),
        }
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, other: &HermitianMatrix, s: f64) -> Result<Self> {
        check_same(self, other)?;
        Ok(Self {
            field: self.field,
            data: &self.data + other.data.scale(s),
        })
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Result<Self> {
        self.add_scaled(other, -1.0)
    }

    /// `A − (Tr A / N)·I`.
    pub fn traceless_part(&self) -> Self {
        let shift = self.trace() / self.dim() as f64;
        let mut data = self.data.clone();
        for i in 0..self.dim() {
            data[(i, i)].re -= shift;
        }
        Self {
            field: self.field,
            data,
        }
    }

    /// `⟨v|A|v⟩` for a (not necessarily normalized) vector.
    pub fn expectation(&self, v: &CVector) -> Result<f64> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(v.dotc(&(&self.data * v)).re)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigh()?.values)
    }

    pub fn eigh(&self) -> Result<Eigh> {
        let n = self.dim();
        let failed = || Error::EigenNonConvergence {
            dim: n,
            max_iter: EIGEN_MAX_ITER,
            norm: self.hs_norm(),
        };
        let (values, vectors) = match self.field {
            NumberField::Complex => {
                let eig = SymmetricEigen::try_new(self.data.clone(), f64::EPSILON, EIGEN_MAX_ITER)
                    .ok_or_else(failed)?;
                (eig.eigenvalues, eig.eigenvectors)
            }
            NumberField::Real => {
                let re = self.data.map(|z| z.re);
                let eig =
                    SymmetricEigen::try_new(re, f64::EPSILON, EIGEN_MAX_ITER).ok_or_else(failed)?;
                (eig.eigenvalues, eig.eigenvectors.map(|x| C64::new(x, 0.0)))
            }
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let sorted_values = order.iter().map(|&k| values[k]).collect();
        let sorted_vectors = CMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
        Ok(Eigh {
            values: sorted_values,
            vectors: sorted_vectors,
        })
    }
}

fn check_same(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    if a.field != b.field {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

/// Hilbert–Schmidt inner product `Tr(A·B)`.
pub fn hs_inner(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    check_same(a, b)?;
    // Tr(AB) = Σ A_ij B_ji = Σ A_ij conj(B_ij) for Hermitian B.
    Ok(a
        .data
        .iter()
        .zip(b.data.iter())
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum())
}

/// Transpose on the first tensor factor.
///
/// Entry `((i,a),(j,b))` of the output is entry `((j,a),(i,b))` of the input,
/// with row index `i·M + a`.
pub fn partial_transpose(a: &HermitianMatrix, shape: &BipartiteShape) -> Result<HermitianMatrix> {
    if a.dim() != shape.n() {
        return Err(Error::DimensionMismatch {
            expected: shape.n(),
            found: a.dim(),
        });
    }
    let (k, m) = (shape.k(), shape.m());
    let n = a.dim();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..k {
        for j in 0..k {
            for x in 0..m {
                for y in 0..m {
                    out[(i * m + x, j * m + y)] = a.data[(j * m + x, i * m + y)];
                }
            }
        }
    }
    Ok(HermitianMatrix {
        field: a.field,
        data: out,
    })
}

pub fn min_eigenvalue(a: &HermitianMatrix) -> Result<f64> {
    Ok(a.eigenvalues()?[0])
}

/// Trace-one positive-semidefinite Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(HermitianMatrix);

impl DensityMatrix {
    /// Renormalizes to unit trace and checks `λ_min ≥ −DEFAULT_PSD_TOL`.
    pub fn new(h: HermitianMatrix) -> Result<Self> {
        Self::with_tolerance(h, DEFAULT_PSD_TOL)
    }

    pub fn with_tolerance(h: HermitianMatrix, tol_psd: f64) -> Result<Self> {
        let tr = h.trace();
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cannot normalize a matrix with trace {tr}"
            )));
        }
        let h = h.scale(1.0 / tr);
        let lmin = min_eigenvalue(&h)?;
        if lmin < -tol_psd {
            return Err(Error::NotPositive(lmin));
        }
        Ok(Self(h))
    }

    /// `W·W†/Tr(W·W†)`, positive by construction.
    pub fn from_gram(w: &CMatrix, field: NumberField) -> Result<Self> {
        let g = w * w.adjoint();
        let h = HermitianMatrix::new(g, field)?;
        let tr = h.trace();
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "Gram matrix has trace {tr}"
            )));
        }
        Ok(Self(h.scale(1.0 / tr)))
    }

    /// Wraps a matrix already known to be a unit-trace PSD matrix.
    pub(crate) fn from_trusted(h: HermitianMatrix) -> Self {
        Self(h)
    }

    /// The maximally mixed state `I/N`.
    pub fn maximally_mixed(space: StateSpace) -> Self {
        Self(HermitianMatrix::identity(space.n, space.field).scale(1.0 / space.n as f64))
    }

    pub fn pure(psi: &CVector, field: NumberField) -> Result<Self> {
        Ok(Self(HermitianMatrix::projector(psi, field)?))
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn field(&self) -> NumberField {
        self.0.field
    }

    pub fn purity(&self) -> f64 {
        self.0.hs_norm().powi(2)
    }
}

impl AsRef<HermitianMatrix> for DensityMatrix {
    fn as_ref(&self) -> &HermitianMatrix {
        &self.0
    }
}

/// `√Tr(ρ−σ)²`.
pub fn hs_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(rho.0.sub(&sigma.0)?.hs_norm())
}

/// `λ_min(T_A ρ) ≥ −tol`.
pub fn is_ppt(rho: &DensityMatrix, shape: &BipartiteShape, tol: f64) -> Result<bool> {
    Ok(min_eigenvalue(&partial_transpose(&rho.0, shape)?)? >= -tol)
}

/// Sum of the absolute values of the negative eigenvalues of `T_A ρ`.
pub fn negativity(rho: &DensityMatrix, shape: &BipartiteShape) -> Result<f64> {
    let spectrum = partial_transpose(&rho.0, shape)?.eigenvalues()?;
    Ok(spectrum.iter().filter(|&&l| l < 0.0).map(|l| -l).sum())
}
