//! Exact geometry of the state body `M^(N)` and of the PPT body
//! `M^(N) ∩ T_A(M^(N))`, both centred at `ρ* = I/N`.
//!
//! Along a unit traceless direction `ω`, `ρ* + tω` stays positive exactly
//! while `1/N + t·λ_min(ω) ≥ 0`, so the radial function is a closed form in
//! the smallest eigenvalue; no bisection is involved. At a generic boundary
//! point the kernel vector `φ` of the binding matrix gives the outward normal
//! `∝ −(P_φ − I/N)` (or its partial transpose for the PPT constraint).

use serde::{Deserialize, Serialize};

use crate::direction::TracelessDirection;
use crate::error::{Error, Result};
use crate::field::{BipartiteShape, NumberField, StateSpace};
use crate::hermitian::{partial_transpose, CVector, DensityMatrix, Eigh, HermitianMatrix};

/// Eigenvalue gap below which a binding constraint counts as degenerate.
pub const GENERICITY_GAP: f64 = 1e-10;

/// Relative difference of the two PPT radii below which both constraints
/// bind (a corner of the PPT body).
pub const CORNER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BodyKind {
    FullStateBody,
    PptBody,
}

/// One of the two convex bodies, with its bipartite structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BodySpec {
    kind: BodyKind,
    shape: BipartiteShape,
}

impl BodySpec {
    pub fn new(kind: BodyKind, shape: BipartiteShape) -> Result<Self> {
        if kind == BodyKind::PptBody && shape.k() < 2 {
            return Err(Error::InvalidShape(format!(
                "the PPT body needs K >= 2 and M >= 2, got {shape}"
            )));
        }
        Ok(Self { kind, shape })
    }

    /// The full state body of an N-level system (shape 1×N).
    pub fn full(space: StateSpace) -> Self {
        Self {
            kind: BodyKind::FullStateBody,
            shape: BipartiteShape::new(1, space.n, space.field).expect("N >= 2"),
        }
    }

    pub fn ppt(shape: BipartiteShape) -> Result<Self> {
        Self::new(BodyKind::PptBody, shape)
    }

    pub fn kind(&self) -> BodyKind {
        self.kind
    }

    pub fn shape(&self) -> BipartiteShape {
        self.shape
    }

    pub fn space(&self) -> StateSpace {
        self.shape.space()
    }

    pub fn ambient_dim(&self) -> usize {
        self.shape.ambient_dim()
    }

    pub fn center(&self) -> DensityMatrix {
        DensityMatrix::maximally_mixed(self.space())
    }

    pub fn inscribed_radius(&self) -> f64 {
        inscribed_radius(self.shape.n()).expect("N >= 2")
    }
}

/// Radius `1/√((N−1)N)` of the ball centred at `I/N` inscribed in both bodies.
pub fn inscribed_radius(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "inscribed radius needs N >= 2, got {n}"
        )));
    }
    let n = n as f64;
    Ok(1.0 / ((n - 1.0) * n).sqrt())
}

/// `A/V = √(N(N−1))·(N²−1)` for the complex state body.
pub fn analytic_area_volume_ratio(n: usize, field: NumberField) -> Result<f64> {
    if field != NumberField::Complex {
        return Err(Error::Unsupported(
            "closed-form A/V is only available for complex density matrices".into(),
        ));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("A/V needs N >= 2, got {n}")));
    }
    let nf = n as f64;
    Ok((nf * (nf - 1.0)).sqrt() * (nf * nf - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Binding {
    /// `ρ ≥ 0` is the active constraint.
    Direct,
    /// `T_A(ρ) ≥ 0` is the active constraint.
    PartialTranspose,
}

/// Where the ray `ρ* + tω` leaves the body.
#[derive(Debug, Clone)]
pub struct BoundaryContact {
    pub point: DensityMatrix,
    /// Outward unit normal of the supporting hyperplane.
    pub normal: TracelessDirection,
    pub binding: Binding,
    /// Kernel vector of the binding matrix (`point` or `T_A(point)`).
    pub zero_eigvec: CVector,
    /// `r(ω)`.
    pub radius: f64,
    /// Radius allowed by `ρ ≥ 0` alone.
    pub direct_radius: f64,
    /// Radius allowed by `T_A(ρ) ≥ 0` alone (PPT body only).
    pub transposed_radius: Option<f64>,
    /// Gap between the two lowest eigenvalues of the binding matrix.
    pub gap: f64,
}

impl BoundaryContact {
    /// Distance from the centre to the supporting hyperplane,
    /// `⟨point − ρ*, n⟩`, evaluated as `r·⟨ω, n⟩`.
    pub fn height(&self, omega: &TracelessDirection) -> f64 {
        self.radius * omega.dot(self.normal.matrix()).expect("same space")
    }
}

fn check_direction(body: &BodySpec, omega: &TracelessDirection) -> Result<()> {
    if omega.dim() != body.shape.n() {
        return Err(Error::DimensionMismatch {
            expected: body.shape.n(),
            found: omega.dim(),
        });
    }
    if omega.field() != body.shape.field() {
        return Err(Error::FieldMismatch);
    }
    let norm = omega.matrix().hs_norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnitNorm(norm));
    }
    Ok(())
}

/// Largest `t` with `I/N + t·A ≥ 0`, for traceless nonzero `A`.
fn exit_time(lambda_min: f64, n: usize) -> f64 {
    1.0 / (n as f64 * lambda_min.abs())
}

/// `r(ω)`: the largest `t ≥ 0` with `ρ* + tω` in the body.
pub fn radial_function(body: &BodySpec, omega: &TracelessDirection) -> Result<f64> {
    check_direction(body, omega)?;
    let n = body.shape.n();
    let direct = exit_time(omega.matrix().eigenvalues()?[0], n);
    Ok(match body.kind {
        BodyKind::FullStateBody => direct,
        BodyKind::PptBody => {
            let pt = partial_transpose(omega.matrix(), &body.shape)?;
            direct.min(exit_time(pt.eigenvalues()?[0], n))
        }
    })
}

/// Boundary point, outward normal and binding constraint along `ω`.
///
/// Fails with [`Error::NonGeneric`] when the binding zero eigenvalue is not
/// simple or when both PPT constraints bind at once.
pub fn boundary_contact(body: &BodySpec, omega: &TracelessDirection) -> Result<BoundaryContact> {
    check_direction(body, omega)?;
    let n = body.shape.n();
    let field = body.shape.field();
    let direct_eig = omega.matrix().eigh()?;
    let direct_radius = exit_time(direct_eig.values[0], n);

    let (binding, eig, radius, transposed_radius): (Binding, Eigh, f64, Option<f64>) =
        match body.kind {
            BodyKind::FullStateBody => (Binding::Direct, direct_eig, direct_radius, None),
            BodyKind::PptBody => {
                let pt_eig = partial_transpose(omega.matrix(), &body.shape)?.eigh()?;
                let pt_radius = exit_time(pt_eig.values[0], n);
                let r = direct_radius.min(pt_radius);
                let diff = (direct_radius - pt_radius).abs();
                if diff <= CORNER_TOL * r {
                    return Err(Error::NonGeneric { gap: diff });
                }
                if direct_radius < pt_radius {
                    (Binding::Direct, direct_eig, r, Some(pt_radius))
                } else {
                    (Binding::PartialTranspose, pt_eig, r, Some(pt_radius))
                }
            }
        };

    let gap = radius * (eig.values[1] - eig.values[0]);
    if gap < GENERICITY_GAP {
        return Err(Error::NonGeneric { gap });
    }
    let phi = eig.vectors.column(0).into_owned();
    let projector = HermitianMatrix::projector(&phi, field)?;
    let constraint = match binding {
        Binding::Direct => projector,
        Binding::PartialTranspose => partial_transpose(&projector, &body.shape)?,
    };
    let mut normal = TracelessDirection::normalize(&constraint.scale(-1.0))?;
    if omega.dot(normal.matrix())? < 0.0 {
        normal = normal.negate();
    }
    let center = body.center();
    let point = center.as_hermitian().add_scaled(omega.matrix(), radius)?;
    Ok(BoundaryContact {
        point: DensityMatrix::from_trusted(point),
        normal,
        binding,
        zero_eigvec: phi,
        radius,
        direct_radius,
        transposed_radius,
        gap,
    })
}

/// Distance from `ρ*` to the supporting hyperplane at the boundary point in
/// direction `ω`. Equals the inscribed radius for bodies of constant height.
pub fn support_height(body: &BodySpec, omega: &TracelessDirection) -> Result<f64> {
    Ok(boundary_contact(body, omega)?.height(omega))
}

/// `σ = (I − P_ψ)/(N−1)`: the point where the face `{τ : ⟨ψ|τ|ψ⟩ = 0}`
/// touches the inscribed ball.
pub fn tangency_state(psi: &CVector, field: NumberField) -> Result<DensityMatrix> {
    let n = psi.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "tangency state needs N >= 2, got {n}"
        )));
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "tangency vector must be a unit vector (norm {norm})"
        )));
    }
    let p = HermitianMatrix::projector(psi, field)?;
    let sigma = HermitianMatrix::identity(n, field)
        .sub(&p)?
        .scale(1.0 / (n as f64 - 1.0));
    Ok(DensityMatrix::from_trusted(sigma))
}
