use nalgebra::DVector;
use ppt_geometry::estimators::{sigma_deviation, McRun};
use ppt_geometry::polytope::*;
use ppt_geometry::rng::RngStream;

fn run(seed: u64) -> McRun {
    McRun::new(100_000, seed, 4)
}

#[test]
fn circumscribed_polytopes_have_gamma_d() {
    for d in 2..=4 {
        for (name, body) in [("cube", cube(d).unwrap()), ("simplex", regular_simplex(d).unwrap())] {
            let g = polytope_gamma_mc(&body, &run(d as u64)).unwrap();
            assert!((g.inscribed_radius - 1.0).abs() < 1e-12);
            assert!(g.gamma.sigma_deviation(d as f64) <= 3.0, "{name} D={d}: {g:?}");
        }
    }
}

#[test]
fn rectangle_counterexample() {
    let g = polytope_gamma_mc(&rectangle().unwrap(), &run(5)).unwrap();
    assert!((g.inscribed_radius - 1.0).abs() < 1e-12);
    assert!(g.gamma.sigma_deviation(1.8) <= 3.0, "{g:?}");
    assert!(g.gamma.sigma_deviation(2.0) > 3.0);
}

#[test]
fn octagon_from_two_squares() {
    let oct = intersect_bodies(&square().unwrap(), &rotated_square(std::f64::consts::FRAC_PI_4).unwrap()).unwrap();
    assert_eq!(oct.len(), 8);
    let g = polytope_gamma_mc(&oct, &run(6)).unwrap();
    assert!(g.gamma.sigma_deviation(2.0) <= 3.0, "{g:?}");
}

#[test]
fn cube_meets_simplex() {
    let body = intersect_bodies(&cube(3).unwrap(), &regular_simplex(3).unwrap()).unwrap();
    let g = polytope_gamma_mc(&body, &run(7)).unwrap();
    assert!(g.gamma.sigma_deviation(3.0) <= 3.0, "{g:?}");
    let mut rng = RngStream::new(8, 0).rng();
    assert!(constant_height_check(&body, 10_000, 1e-12, &mut rng).unwrap().pass);
}

#[test]
fn intersection_is_idempotent_and_commutative() {
    let c = cube(3).unwrap();
    let s = regular_simplex(3).unwrap();
    let cc = intersect_bodies(&c, &c).unwrap();
    let cs = intersect_bodies(&c, &s).unwrap();
    let sc = intersect_bodies(&s, &c).unwrap();
    let mut rng = RngStream::new(9, 0).rng();
    for _ in 0..1000 {
        let w = uniform_direction(3, &mut rng);
        assert_eq!(polar_radial(&cc, &w).unwrap(), polar_radial(&c, &w).unwrap());
        assert_eq!(polar_radial(&cs, &w).unwrap(), polar_radial(&sc, &w).unwrap());
        let expect = polar_radial(&c, &w).unwrap().min(polar_radial(&s, &w).unwrap());
        assert_eq!(polar_radial(&cs, &w).unwrap(), expect);
    }
    assert!(intersect_bodies(&c, &square().unwrap()).is_err());
}

#[test]
fn pushed_out_face() {
    let body = TangentBody::new(vec![
        DVector::from_vec(vec![1.0, 0.0]),
        DVector::from_vec(vec![-1.0, 0.0]),
        DVector::from_vec(vec![0.0, -1.0]),
        DVector::from_vec(vec![0.0, 1.0 / 1.5]),
    ])
    .unwrap();
    let up = DVector::from_vec(vec![0.0, 1.0]);
    assert!((polar_radial(&body, &up).unwrap() - 1.5).abs() < 1e-15);
    let mut rng = RngStream::new(10, 0).rng();
    let rep = constant_height_check(&body, 1_000, 1e-12, &mut rng).unwrap();
    assert!(!rep.pass);
    assert!((rep.max_deviation - 0.5).abs() < 1e-12);
    assert_eq!(rep.exposed_short_generators, vec![3]);
}

#[test]
fn unit_generator_faces_are_tangent() {
    let mut rng = RngStream::new(11, 0).rng();
    let body = random_unit_body(4, 200, &mut rng).unwrap();
    for _ in 0..2_000 {
        let w = uniform_direction(4, &mut rng);
        let c = polar_contact(&body, &w).unwrap();
        assert!((c.support_distance - 1.0).abs() < 1e-12);
        assert!((c.point.dot(&c.normal) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn random_bodies_and_shrunk_generators() {
    let mut rng = RngStream::new(12, 0).rng();
    let mut binding = 0;
    for _ in 0..5 {
        let body = random_unit_body(4, 500, &mut rng).unwrap();
        let ok = constant_height_check(&body, 2_000, 1e-12, &mut rng).unwrap();
        assert!(ok.pass && ok.max_deviation < 1e-12);
        let shrunk = body.with_scaled_generator(0, 0.8).unwrap();
        let exposed = shrunk.generator_is_vertex(0).unwrap();
        binding += exposed as usize;
        let rep = constant_height_check(&shrunk, 2_000, 1e-12, &mut rng).unwrap();
        assert_eq!(rep.pass, !exposed);
    }
    println!("shrunk generator exposed in {binding}/5 bodies");
}

#[test]
fn shrunk_cross_polytope_vertex_is_detected() {
    let body = cube(4).unwrap().with_scaled_generator(0, 0.8).unwrap();
    assert!(body.generator_is_vertex(0).unwrap());
    let mut rng = RngStream::new(13, 0).rng();
    let rep = constant_height_check(&body, 1_000, 1e-12, &mut rng).unwrap();
    assert!(!rep.pass);
    assert!((rep.max_deviation - 0.25).abs() < 1e-12);
    let g = polytope_gamma_mc(&body, &run(14)).unwrap();
    assert!(g.gamma.value < 4.0 && sigma_deviation(g.gamma.value, g.gamma.stderr, 4.0) > 3.0, "{g:?}");
}

#[test]
fn json_roundtrip_validates() {
    let body = cube(2).unwrap();
    let text = serde_json::to_string(&body).unwrap();
    assert_eq!(text, "[[1.0,0.0],[-1.0,0.0],[0.0,1.0],[0.0,-1.0]]");
    let back: TangentBody = serde_json::from_str(&text).unwrap();
    assert_eq!(back, body);
    assert!(serde_json::from_str::<TangentBody>("[[1.0,0.0],[0.0,1.0]]").is_err());
}
