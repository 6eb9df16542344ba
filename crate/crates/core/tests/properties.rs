use proptest::prelude::*;

use ppt_geometry::body::{radial_function, BodySpec};
use ppt_geometry::hermitian::{hs_distance, hs_inner, partial_transpose, DensityMatrix};
use ppt_geometry::rng::RngStream;
use ppt_geometry::sampling::{sample_direction, sample_state_hs};
use ppt_geometry::{BipartiteShape, NumberField};

fn field(real: bool) -> NumberField {
    if real { NumberField::Real } else { NumberField::Complex }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_transpose_is_an_isometric_involution(seed in any::<u64>(), k in 2usize..4, m in 2usize..4, real in any::<bool>()) {
        let shape = BipartiteShape::new(k, m, field(real)).unwrap();
        let mut rng = RngStream::new(seed, 0).rng();
        let a = sample_state_hs(shape.space(), &mut rng);
        let b = sample_state_hs(shape.space(), &mut rng);
        let ta = partial_transpose(a.as_hermitian(), &shape).unwrap();
        let tb = partial_transpose(b.as_hermitian(), &shape).unwrap();
        let back = partial_transpose(&ta, &shape).unwrap();
        prop_assert!(back.sub(a.as_hermitian()).unwrap().hs_norm() < 1e-14);
        let lhs = hs_inner(&ta, &tb).unwrap();
        let rhs = hs_inner(a.as_hermitian(), b.as_hermitian()).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-14);
        prop_assert!((ta.trace() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn hs_distance_is_a_metric(seed in any::<u64>(), n in 2usize..6, real in any::<bool>()) {
        let sp = ppt_geometry::StateSpace::new(n, field(real)).unwrap();
        let mut rng = RngStream::new(seed, 1).rng();
        let s: Vec<DensityMatrix> = (0..3).map(|_| sample_state_hs(sp, &mut rng)).collect();
        let d = |i: usize, j: usize| hs_distance(&s[i], &s[j]).unwrap();
        prop_assert_eq!(d(0, 0), 0.0);
        prop_assert!((d(0, 1) - d(1, 0)).abs() < 1e-15);
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-14);
    }

    #[test]
    fn radial_function_brackets_the_boundary(seed in any::<u64>(), n in 2usize..6, real in any::<bool>()) {
        let sp = ppt_geometry::StateSpace::new(n, field(real)).unwrap();
        let body = BodySpec::full(sp);
        let mut rng = RngStream::new(seed, 2).rng();
        let w = sample_direction(sp, &mut rng);
        let r = radial_function(&body, &w).unwrap();
        prop_assert!(r >= body.inscribed_radius() - 1e-14);
        prop_assert!(r <= ((n as f64 - 1.0) / n as f64).sqrt() + 1e-14);
        let at = |t: f64| body.center().as_hermitian().add_scaled(w.matrix(), t).unwrap();
        prop_assert!(DensityMatrix::new(at(r * (1.0 - 1e-9))).is_ok());
        prop_assert!(at(r * (1.0 + 1e-6)).eigenvalues().unwrap()[0] < 0.0);
    }
}
