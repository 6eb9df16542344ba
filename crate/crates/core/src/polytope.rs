//! Bodies in `R^D` given as polars of finite generator sets,
//! `X = {x : ⟨x, y⟩ ≤ 1 for all y ∈ Y}` with `0 < ‖y‖ ≤ 1`.
//!
//! A body whose generators are all unit vectors has every face tangent to
//! the unit ball and satisfies `γ = D`. Sub-unit generators push their face
//! outward and break this, provided the face is actually exposed.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{McRun, SeedInfo};
use crate::rng::{RngStream, StreamRng, ALGORITHM_ID};
use crate::stats::PairedMoments;

/// Relative gap between the two largest `⟨ω, y⟩` below which the
/// maximizing generator is ambiguous.
pub const TIE_TOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-12;
const LP_TOL: f64 = 1e-9;
const PURPOSE_POLYTOPE: u32 = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct TangentBody {
    dim: usize,
    generators: Vec<DVector<f64>>,
}

impl TryFrom<Vec<Vec<f64>>> for TangentBody {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows.into_iter().map(DVector::from_vec).collect())
    }
}

impl From<TangentBody> for Vec<Vec<f64>> {
    fn from(b: TangentBody) -> Self {
        b.generators.iter().map(|g| g.iter().copied().collect()).collect()
    }
}

impl TangentBody {
    /// Validates the generators: common dimension `D ≥ 2`, `0 < ‖y‖ ≤ 1`,
    /// and the origin strictly inside their convex hull (so the polar is
    /// bounded).
    pub fn new(generators: Vec<DVector<f64>>) -> Result<Self> {
        let dim = generators
            .first()
            .map(|g| g.len())
            .ok_or_else(|| Error::InvalidArgument("no generators".into()))?;
        if dim < 2 {
            return Err(Error::InvalidArgument(format!("dimension must be >= 2, got {dim}")));
        }
        for g in &generators {
            if g.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: g.len() });
            }
            let norm = g.norm();
            if !norm.is_finite() || norm == 0.0 {
                return Err(Error::InvalidArgument("generators must be finite and nonzero".into()));
            }
            if norm > 1.0 + NORM_TOL {
                return Err(Error::InvalidArgument(format!(
                    "generator norm {norm} exceeds 1"
                )));
            }
        }
        let body = Self { dim, generators };
        if !body.origin_is_interior()? {
            return Err(Error::InvalidArgument(
                "origin is not interior to the generator hull; the body is unbounded".into(),
            ));
        }
        Ok(body)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[DVector<f64>] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn all_unit(&self) -> bool {
        self.generators.iter().all(|g| (g.norm() - 1.0).abs() <= NORM_TOL)
    }

    /// Returns a copy with generator `index` scaled by `factor ∈ (0, 1]`.
    pub fn with_scaled_generator(&self, index: usize, factor: f64) -> Result<Self> {
        if index >= self.len() || !(factor > 0.0 && factor <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "cannot scale generator {index} by {factor}"
            )));
        }
        let mut generators = self.generators.clone();
        generators[index] *= factor;
        Self::new(generators)
    }

    /// Maximizes `t` subject to `Σλᵢyᵢ = 0`, `Σλᵢ = 1`, `λᵢ ≥ t`. The origin
    /// is interior iff `t > 0` and the generators span `R^D`.
    fn origin_is_interior(&self) -> Result<bool> {
        let rank = DMatrix::from_columns(&self.generators).rank(1e-10);
        if rank < self.dim {
            return Ok(false);
        }
        let mut lp = Problem::new(OptimizationDirection::Maximize);
        let t = lp.add_var(1.0, (f64::NEG_INFINITY, 1.0));
        let lambda: Vec<_> = self.generators.iter().map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
        for k in 0..self.dim {
            let row: Vec<_> = lambda.iter().zip(&self.generators).map(|(&v, g)| (v, g[k])).collect();
            lp.add_constraint(row.as_slice(), ComparisonOp::Eq, 0.0);
        }
        let sum: Vec<_> = lambda.iter().map(|&v| (v, 1.0)).collect();
        lp.add_constraint(sum.as_slice(), ComparisonOp::Eq, 1.0);
        for &v in &lambda {
            lp.add_constraint([(v, 1.0), (t, -1.0)], ComparisonOp::Ge, 0.0);
        }
        match lp.solve() {
            Ok(sol) => Ok(sol.objective() > LP_TOL / self.len() as f64),
            Err(minilp::Error::Infeasible) => Ok(false),
            Err(e) => Err(Error::LinearProgram(e.to_string())),
        }
    }

    fn check_direction(&self, omega: &DVector<f64>) -> Result<()> {
        if omega.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: omega.len() });
        }
        let norm = omega.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnitNorm(norm));
        }
        Ok(())
    }

    /// Largest and second largest `⟨ω, y⟩` with the index of the largest.
    fn top_two(&self, omega: &DVector<f64>) -> (usize, f64, f64) {
        let mut best = (usize::MAX, f64::NEG_INFINITY);
        let mut second = f64::NEG_INFINITY;
        for (i, g) in self.generators.iter().enumerate() {
            let v = omega.dot(g);
            if v > best.1 {
                second = best.1;
                best = (i, v);
            } else if v > second {
                second = v;
            }
        }
        (best.0, best.1, second)
    }

    /// Witness direction in which generator `index` is the unique maximizer,
    /// if any. Solves `max s` subject to `⟨ω, y_index − y⟩ ≥ s` for all other
    /// `y`, with `ω ∈ [−1, 1]^D`.
    pub fn binding_witness(&self, index: usize) -> Result<Option<DVector<f64>>> {
        let target = self
            .generators
            .get(index)
            .ok_or_else(|| Error::InvalidArgument(format!("no generator {index}")))?;
        let mut lp = Problem::new(OptimizationDirection::Maximize);
        let s = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
        let omega: Vec<_> = (0..self.dim).map(|_| lp.add_var(0.0, (-1.0, 1.0))).collect();
        for (j, g) in self.generators.iter().enumerate() {
            if j == index {
                continue;
            }
            let mut row: Vec<_> = omega.iter().enumerate().map(|(k, &v)| (v, target[k] - g[k])).collect();
            row.push((s, -1.0));
            lp.add_constraint(row.as_slice(), ComparisonOp::Ge, 0.0);
        }
        let sol = lp.solve().map_err(|e| Error::LinearProgram(e.to_string()))?;
        if sol.objective() <= LP_TOL {
            return Ok(None);
        }
        let w = DVector::from_iterator(self.dim, omega.iter().map(|&v| *sol.var_value(v)));
        Ok(Some(w.normalize()))
    }

    /// Whether the face of generator `index` is exposed, i.e. the generator
    /// is a vertex of the hull of `Y`.
    pub fn generator_is_vertex(&self, index: usize) -> Result<bool> {
        Ok(self.binding_witness(index)?.is_some())
    }
}

/// `r(ω) = 1/max_y⟨ω, y⟩`.
pub fn polar_radial(body: &TangentBody, omega: &DVector<f64>) -> Result<f64> {
    body.check_direction(omega)?;
    let (_, max, _) = body.top_two(omega);
    if max <= 0.0 {
        return Err(Error::UnboundedDirection(omega.iter().copied().collect()));
    }
    Ok(1.0 / max)
}

/// Boundary point along a generic direction and its supporting face.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarContact {
    pub point: DVector<f64>,
    pub normal: DVector<f64>,
    /// Distance from the origin to the supporting hyperplane, `1/‖y*‖`.
    pub support_distance: f64,
    pub generator: usize,
    pub radius: f64,
}

pub fn polar_contact(body: &TangentBody, omega: &DVector<f64>) -> Result<PolarContact> {
    body.check_direction(omega)?;
    let (i, max, second) = body.top_two(omega);
    if max <= 0.0 {
        return Err(Error::UnboundedDirection(omega.iter().copied().collect()));
    }
    let gap = (max - second) / max;
    if gap < TIE_TOL {
        return Err(Error::NonGeneric { gap });
    }
    let y = &body.generators[i];
    let norm = y.norm();
    let radius = 1.0 / max;
    Ok(PolarContact {
        point: omega * radius,
        normal: y / norm,
        support_distance: 1.0 / norm,
        generator: i,
        radius,
    })
}

/// `X₁ ∩ X₂ = (Y₁ ∪ Y₂)°`.
pub fn intersect_bodies(b1: &TangentBody, b2: &TangentBody) -> Result<TangentBody> {
    if b1.dim != b2.dim {
        return Err(Error::DimensionMismatch { expected: b1.dim, found: b2.dim });
    }
    let mut generators = b1.generators.clone();
    generators.extend(b2.generators.iter().cloned());
    TangentBody::new(generators)
}

pub fn uniform_direction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal)).normalize()
}

/// γ estimate of a polytope together with its empirical inscribed radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeGamma {
    pub gamma: crate::estimators::Estimate,
    /// Smallest support distance over the faces hit by the sample.
    pub inscribed_radius: f64,
    pub dim: usize,
}

/// `γ = r_in·A/V = r_in·D·E[r^D/h]/E[r^D]` from shared radial samples, with
/// `h` the support distance of the binding face.
pub fn polytope_gamma_mc(body: &TangentBody, run: &McRun) -> Result<PolytopeGamma> {
    if run.samples < crate::estimators::MIN_SAMPLES || run.shards == 0 {
        return Err(Error::InvalidArgument(format!(
            "need at least {} samples and one shard",
            crate::estimators::MIN_SAMPLES
        )));
    }
    let d = body.dim;
    let root = RngStream::new(run.seed, 0);
    let shards: Vec<Result<(PairedMoments, f64, u64)>> = (0..run.shards)
        .into_par_iter()
        .map(|i| {
            let mut rng: StreamRng = root.substream(PURPOSE_POLYTOPE, i).rng();
            let count = run.samples / run.shards as u64 + ((i as u64) < run.samples % run.shards as u64) as u64;
            let mut m = PairedMoments::default();
            let mut r_in = f64::INFINITY;
            let mut skipped = 0;
            for _ in 0..count {
                let omega = uniform_direction(d, &mut rng);
                match polar_contact(body, &omega) {
                    Ok(c) => {
                        let x = (d as f64 * c.radius.ln()).exp();
                        m.push(x, x / c.support_distance);
                        r_in = r_in.min(c.support_distance);
                    }
                    Err(Error::NonGeneric { .. }) => skipped += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok((m, r_in, skipped))
        })
        .collect();
    let mut moments = PairedMoments::default();
    let mut r_in = f64::INFINITY;
    let mut skipped = 0;
    for s in shards {
        let (m, r, k) = s?;
        moments.merge(&m);
        r_in = r_in.min(r);
        skipped += k;
    }
    let (ratio, se) = moments.ratio_y_over_x();
    let scale = r_in * d as f64;
    let value = scale * ratio;
    Ok(PolytopeGamma {
        gamma: crate::estimators::Estimate {
            value,
            stderr: (scale * se).hypot(crate::estimators::ROUNDING_FLOOR_REL * value.abs()),
            n_samples: moments.n,
            seed: SeedInfo {
                seed: run.seed,
                shards: run.shards,
                algorithm: ALGORITHM_ID.to_string(),
            },
            estimator_id: format!("polytope_gamma/D{d}/{}", body.len()),
            skipped,
            warning: None,
        },
        inscribed_radius: r_in,
        dim: d,
    })
}

/// Outcome of [`constant_height_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightReport {
    pub n_directions: u64,
    /// `max |support_distance − 1|` over the faces met by random directions.
    pub sampled_max_deviation: f64,
    /// Same, including the witness directions of exposed sub-unit generators.
    pub max_deviation: f64,
    /// Sub-unit generators whose face is exposed.
    pub exposed_short_generators: Vec<usize>,
    pub tol: f64,
    pub pass: bool,
}

/// Checks that every face met is tangent to the unit ball.
///
/// Random directions can miss a small face, so each generator of norm
/// below `1 − tol` is also tested exactly: if it is a vertex of the
/// generator hull, its witness direction is added to the probe set.
pub fn constant_height_check<R: Rng + ?Sized>(
    body: &TangentBody,
    n: u64,
    tol: f64,
    rng: &mut R,
) -> Result<HeightReport> {
    if n < crate::estimators::MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "need at least {} directions",
            crate::estimators::MIN_SAMPLES
        )));
    }
    let mut sampled: f64 = 0.0;
    for _ in 0..n {
        let omega = uniform_direction(body.dim, rng);
        match polar_contact(body, &omega) {
            Ok(c) => sampled = sampled.max((c.support_distance - 1.0).abs()),
            Err(Error::NonGeneric { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let mut max_deviation = sampled;
    let mut exposed = Vec::new();
    for (i, g) in body.generators.iter().enumerate() {
        if (g.norm() - 1.0).abs() <= tol {
            continue;
        }
        if let Some(w) = body.binding_witness(i)? {
            exposed.push(i);
            max_deviation = max_deviation.max((1.0 / g.norm() - 1.0).abs());
            debug_assert_eq!(polar_contact(body, &w).map(|c| c.generator).ok(), Some(i));
        }
    }
    Ok(HeightReport {
        n_directions: n,
        sampled_max_deviation: sampled,
        max_deviation,
        exposed_short_generators: exposed,
        tol,
        pass: max_deviation <= tol,
    })
}

/// Polar of `{±e_i}`: the cube `[−1, 1]^D`.
pub fn cube(dim: usize) -> Result<TangentBody> {
    let mut g = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut v = DVector::zeros(dim);
            v[i] = s;
            g.push(v);
        }
    }
    TangentBody::new(g)
}

/// Simplex circumscribed about the unit ball: polar of `D+1` unit vectors
/// summing to zero (the centred standard basis of `R^{D+1}` in Helmert
/// coordinates).
pub fn regular_simplex(dim: usize) -> Result<TangentBody> {
    let helmert = |i: usize, k: usize| -> f64 {
        // Row k (1-based) is (1, …, 1, −k, 0, …)/√(k(k+1)).
        let kf = k as f64;
        let norm = (kf * (kf + 1.0)).sqrt();
        match i.cmp(&k) {
            std::cmp::Ordering::Less => 1.0 / norm,
            std::cmp::Ordering::Equal => -kf / norm,
            std::cmp::Ordering::Greater => 0.0,
        }
    };
    let g = (0..=dim)
        .map(|i| DVector::from_fn(dim, |k, _| helmert(i, k + 1)).normalize())
        .collect();
    TangentBody::new(g)
}

pub fn square() -> Result<TangentBody> {
    cube(2)
}

pub fn rotated_square(angle: f64) -> Result<TangentBody> {
    let (s, c) = angle.sin_cos();
    let g = (0..4)
        .map(|k| {
            let (sk, ck) = (k as f64 * std::f64::consts::FRAC_PI_2).sin_cos();
            DVector::from_vec(vec![c * ck - s * sk, s * ck + c * sk])
        })
        .collect();
    TangentBody::new(g)
}

/// `[−1, 1] × [−1, 1.5]`: the top face sits at distance 1.5.
pub fn rectangle() -> Result<TangentBody> {
    TangentBody::new(vec![
        DVector::from_vec(vec![1.0, 0.0]),
        DVector::from_vec(vec![-1.0, 0.0]),
        DVector::from_vec(vec![0.0, -1.0]),
        DVector::from_vec(vec![0.0, 1.0 / 1.5]),
    ])
}

/// Polar of `count` uniform random unit vectors.
pub fn random_unit_body<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Result<TangentBody> {
    TangentBody::new((0..count).map(|_| uniform_direction(dim, rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(dim: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(dim);
        v[i] = 1.0;
        v
    }

    #[test]
    fn square_radial_function() {
        let sq = square().unwrap();
        assert!((polar_radial(&sq, &e(2, 0)).unwrap() - 1.0).abs() < 1e-15);
        let diag = DVector::from_vec(vec![1.0, 1.0]).normalize();
        assert!((polar_radial(&sq, &diag).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(polar_contact(&sq, &diag), Err(Error::NonGeneric { .. })));
    }

    #[test]
    fn rectangle_top_face() {
        let r = rectangle().unwrap();
        assert!((polar_radial(&r, &e(2, 1)).unwrap() - 1.5).abs() < 1e-15);
        let c = polar_contact(&r, &e(2, 1)).unwrap();
        assert!((c.support_distance - 1.5).abs() < 1e-15);
        assert!((c.normal - e(2, 1)).norm() < 1e-15);
    }

    #[test]
    fn unbounded_generators_rejected() {
        let half_plane = vec![e(2, 0), e(2, 1), DVector::from_vec(vec![-1.0, 0.0])];
        assert!(TangentBody::new(half_plane).is_err());
        let long = vec![DVector::from_vec(vec![1.5, 0.0]), DVector::from_vec(vec![-1.0, 0.0])];
        assert!(TangentBody::new(long).is_err());
        assert!(TangentBody::new(vec![]).is_err());
    }

    #[test]
    fn simplex_generators_are_unit_and_balanced() {
        for d in 2..=5 {
            let s = regular_simplex(d).unwrap();
            assert_eq!(s.len(), d + 1);
            let sum: DVector<f64> = s.generators().iter().fold(DVector::zeros(d), |a, g| a + g);
            assert!(sum.norm() < 1e-14);
            assert!(s.all_unit());
            let dot = s.generators()[0].dot(&s.generators()[1]);
            assert!((dot + 1.0 / d as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn vertex_test() {
        let sq = square().unwrap();
        for i in 0..4 {
            assert!(sq.generator_is_vertex(i).unwrap());
        }
        let with_inner = TangentBody::new(vec![
            e(2, 0),
            -e(2, 0),
            e(2, 1),
            -e(2, 1),
            DVector::from_vec(vec![0.3, 0.3]),
        ])
        .unwrap();
        assert!(!with_inner.generator_is_vertex(4).unwrap());
    }

    #[test]
    fn intersection_radial_is_minimum() {
        let a = square().unwrap();
        let b = rotated_square(std::f64::consts::FRAC_PI_4).unwrap();
        let ab = intersect_bodies(&a, &b).unwrap();
        let mut rng = RngStream::new(1, 0).rng();
        for _ in 0..100 {
            let w = uniform_direction(2, &mut rng);
            let r = polar_radial(&ab, &w).unwrap();
            let m = polar_radial(&a, &w).unwrap().min(polar_radial(&b, &w).unwrap());
            assert_eq!(r, m);
        }
    }
}
