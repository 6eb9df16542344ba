//! Random matrices and random states.
//!
//! * interior states: `ρ = GG†/Tr GG†` with a Ginibre `G` whose shape makes
//!   the induced measure flat (Hilbert–Schmidt): N×N complex, N×(N+1) real;
//! * boundary states: eigenvalues `(λ₁,…,λ_{N−1}, 0)` with density
//!   `∝ ∏|λᵢ−λⱼ|^β ∏λᵢ^β` (β = 2 complex, 1 real) and an independent Haar
//!   eigenbasis;
//! * directions: Gaussian coefficients on the Gell-Mann basis, normalized.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::direction::{GellMannBasis, TracelessDirection};
use crate::error::{Error, Result};
use crate::field::{NumberField, StateSpace};
use crate::hermitian::{CMatrix, CVector, DensityMatrix, C64};

/// Matrix with i.i.d. standard Gaussian entries. Complex entries have
/// `E|z|² = 1` (independent real and imaginary parts of variance 1/2).
pub fn sample_ginibre<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    field: NumberField,
    rng: &mut R,
) -> CMatrix {
    match field {
        NumberField::Complex => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            CMatrix::from_fn(rows, cols, |_, _| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(s * re, s * im)
            })
        }
        NumberField::Real => CMatrix::from_fn(rows, cols, |_, _| {
            C64::new(rng.sample(StandardNormal), 0.0)
        }),
    }
}

/// Haar-distributed unitary (complex) or orthogonal (real) matrix.
///
/// QR of a square Ginibre matrix, with the columns of `Q` rephased so that
/// the diagonal of `R` is positive; without this correction `Q` is not Haar.
pub fn sample_haar_unitary<R: Rng + ?Sized>(
    n: usize,
    field: NumberField,
    rng: &mut R,
) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("Haar matrix of size 0".into()));
    }
    let qr = sample_ginibre(n, n, field, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let modulus = d.norm();
        // Zero diagonal has probability zero; leave the column as is.
        if modulus > 0.0 {
            let phase = d / modulus;
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    if field == NumberField::Real {
        q.apply(|z| z.im = 0.0);
    }
    Ok(q)
}

/// Density matrix distributed per the Hilbert–Schmidt (flat) measure.
pub fn sample_state_hs<R: Rng + ?Sized>(space: StateSpace, rng: &mut R) -> DensityMatrix {
    let cols = match space.field {
        NumberField::Complex => space.n,
        NumberField::Real => space.n + 1,
    };
    let g = sample_ginibre(space.n, cols, space.field, rng);
    DensityMatrix::from_gram(&g, space.field).expect("Ginibre Gram matrix has positive trace")
}

/// A boundary state together with a unit vector spanning its kernel.
#[derive(Debug, Clone)]
pub struct BoundaryState {
    pub state: DensityMatrix,
    pub zero_eigvec: CVector,
}

/// Column count of the (N−1)-row Ginibre factor whose Wishart spectrum has
/// the boundary eigenvalue density.
pub fn boundary_ginibre_cols(space: StateSpace) -> usize {
    match space.field {
        NumberField::Complex => space.n + 1,
        NumberField::Real => space.n + 2,
    }
}

/// Boundary state distributed per the HS surface measure on `∂M^(N)`.
///
/// With `U` Haar and `G` an (N−1)×K Ginibre matrix, `ρ ∝ V·GG†·V†` where
/// `V` is the first N−1 columns of `U`. The spectrum of `GG†/Tr` is the
/// boundary eigenvalue density and its eigenvectors are Haar in `U(N−1)`, so
/// `ρ`'s eigenbasis is Haar in `U(N)`; the last column of `U` spans the kernel.
pub fn sample_boundary_state_hs<R: Rng + ?Sized>(
    space: StateSpace,
    rng: &mut R,
) -> Result<BoundaryState> {
    let n = space.n;
    let u = sample_haar_unitary(n, space.field, rng)?;
    let g = sample_ginibre(n - 1, boundary_ginibre_cols(space), space.field, rng);
    let w = u.columns(0, n - 1) * g;
    let state = DensityMatrix::from_gram(&w, space.field)?;
    let zero_eigvec = u.column(n - 1).into_owned();
    Ok(BoundaryState { state, zero_eigvec })
}

/// Uniform direction on the unit sphere of traceless matrices.
#[derive(Debug, Clone)]
pub struct DirectionSampler {
    basis: GellMannBasis,
}

impl DirectionSampler {
    pub fn new(space: StateSpace) -> Self {
        Self {
            basis: GellMannBasis::new(space),
        }
    }

    pub fn basis(&self) -> &GellMannBasis {
        &self.basis
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TracelessDirection {
        let coeffs: Vec<f64> = (0..self.basis.len())
            .map(|_| rng.sample(StandardNormal))
            .collect();
        let norm = DVector::from_column_slice(&coeffs).norm();
        let unit: Vec<f64> = coeffs.iter().map(|c| c / norm).collect();
        let m = self.basis.combine(&unit).expect("basis length");
        TracelessDirection::new(m).expect("Gell-Mann combination of a unit vector")
    }
}

pub fn sample_direction<R: Rng + ?Sized>(space: StateSpace, rng: &mut R) -> TracelessDirection {
    DirectionSampler::new(space).sample(rng)
}
