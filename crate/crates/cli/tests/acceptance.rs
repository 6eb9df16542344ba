//! Acceptance suite: one PASS/FAIL line per criterion, full sample sizes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use ppt_geometry::body::BodyKind;
use ppt_geometry::polytope::{constant_height_check, cube};
use ppt_geometry::rng::RngStream;
use ppt_geometry::NumberField;
use ppt_runner::config::PolytopeSpec;
use ppt_runner::experiments::build_polytope;
use ppt_runner::{execute, ExperimentConfig, ExperimentKind, ResultRecord};

type Outcome = Result<Vec<String>, Vec<String>>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn config(kind: ExperimentKind, shape: Option<&str>, field: NumberField, n: u64) -> ExperimentConfig {
    ExperimentConfig {
        experiment: kind,
        shape: shape.map(str::to_string),
        body: None,
        field,
        n_samples: n,
        seed: 42,
        shards: 4,
        tolerances: BTreeMap::new(),
        output_path: PathBuf::from("unused.json"),
        deltas: None,
        polytope: None,
        target: None,
    }
}

fn describe(rec: &ResultRecord) -> String {
    let shape = match (&rec.config.shape, &rec.config.polytope) {
        (Some(s), _) => s.clone(),
        (None, Some(p)) => serde_json::to_string(p).unwrap_or_default(),
        (None, None) => "-".into(),
    };
    let body = match rec.config.body {
        Some(BodyKind::PptBody) => " ppt",
        _ => "",
    };
    let checks: Vec<String> = rec
        .checks
        .iter()
        .map(|c| {
            let mut s = format!("{}={:.6}", c.name, c.value);
            if let Some(se) = c.stderr {
                s += &format!("±{se:.1e}");
            }
            if let Some(d) = c.sigma_deviation {
                s += &format!(" ({d:.2}σ)");
            }
            if !c.pass {
                s += " FAIL";
            }
            s
        })
        .collect();
    match rec.config.polytope {
        Some(_) => format!("{shape}: {}", checks.join(", ")),
        None => format!("{shape}{body} {}: {}", rec.config.field, checks.join(", ")),
    }
}

/// Runs every config; passes iff every record passes.
fn run_all(configs: Vec<ExperimentConfig>) -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for cfg in configs {
        match execute(&cfg) {
            Ok(rec) => {
                ok &= rec.pass;
                lines.push(format!("{} [{:.1}s]", describe(&rec), rec.wall_time_s));
            }
            Err(e) => {
                ok = false;
                lines.push(format!("{:?}: error {e}", cfg.shape));
            }
        }
    }
    if ok { Ok(lines) } else { Err(lines) }
}

fn omega_two() -> Outcome {
    use NumberField::*;
    run_all(
        [("2x2", Complex), ("2x3", Complex), ("2x2", Real)]
            .into_iter()
            .map(|(s, f)| config(ExperimentKind::Omega, Some(s), f, 1_000_000))
            .collect(),
    )
}

fn gamma_equals_d() -> Outcome {
    let mut configs = Vec::new();
    for field in [NumberField::Complex, NumberField::Real] {
        for n in [2, 3, 4] {
            configs.push(config(ExperimentKind::Gamma, Some(&format!("1x{n}")), field, 1_000_000));
        }
    }
    run_all(configs)
}

fn constant_height() -> Outcome {
    let mut configs = Vec::new();
    for field in [NumberField::Complex, NumberField::Real] {
        for n in [2, 3, 4, 6] {
            configs.push(config(ExperimentKind::HeightCheck, Some(&format!("1x{n}")), field, 100_000));
        }
        for shape in ["2x2", "2x3"] {
            let mut c = config(ExperimentKind::HeightCheck, Some(shape), field, 100_000);
            c.body = Some(BodyKind::PptBody);
            configs.push(c);
        }
    }
    run_all(configs)
}

fn corner_probe() -> Outcome {
    let mut probe = config(ExperimentKind::CornerProbe, Some("2x2"), NumberField::Complex, 1_000_000);
    probe.deltas = Some(vec![1e-1, 1e-2, 1e-3, 1e-4]);
    let configs = vec![
        probe,
        config(ExperimentKind::AreaCrosscheck, Some("2x2"), NumberField::Complex, 1_000_000),
        config(ExperimentKind::AreaCrosscheck, Some("2x3"), NumberField::Complex, 1_000_000),
    ];
    let mut out = run_all(configs.clone());
    if let Ok(rec) = execute(&configs[0]) {
        let fractions: Vec<String> = rec.details["rows"]
            .as_array()
            .into_iter()
            .flatten()
            .map(|r| format!("{}:{}", r["delta"], r["fraction"]))
            .collect();
        let line = format!("fractions {}", fractions.join(" "));
        match &mut out {
            Ok(l) | Err(l) => l.push(line),
        }
    }
    out
}

fn sampler_validation() -> Outcome {
    let rec = execute(&config(ExperimentKind::SamplerValidate, None, NumberField::Complex, 100_000))
        .map_err(|e| vec![e.to_string()])?;
    let failed: Vec<String> = rec.checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect();
    let line = format!("{}/{} checks pass [{:.1}s]", rec.checks.len() - failed.len(), rec.checks.len(), rec.wall_time_s);
    if failed.is_empty() {
        Ok(vec![line])
    } else {
        Err(vec![line, format!("failed: {}", failed.join("; "))])
    }
}

fn polytope_config(spec: PolytopeSpec) -> ExperimentConfig {
    let mut c = config(ExperimentKind::PolytopeGamma, None, NumberField::Real, 100_000);
    c.polytope = Some(spec);
    c
}

fn polytope_lab() -> Outcome {
    let mut configs = Vec::new();
    for dim in [2, 3, 4] {
        configs.push(polytope_config(PolytopeSpec::Cube { dim }));
        configs.push(polytope_config(PolytopeSpec::Simplex { dim }));
    }
    configs.push(polytope_config(PolytopeSpec::Rectangle));
    configs.push(polytope_config(PolytopeSpec::Octagon));
    let mut out = run_all(configs);

    // 20 polars of 500 random unit vectors in R⁴, each also with its first
    // generator shrunk to norm 0.8.
    let mut ok = true;
    let (mut exposed, mut unit_pass) = (0, 0);
    for seed in 0..20u64 {
        let spec = |shrink| PolytopeSpec::RandomUnit { dim: 4, count: 500, shrink };
        let (body, _) = build_polytope(&spec(None), seed).expect("random body");
        let (shrunk, _) = build_polytope(&spec(Some(0.8)), seed).expect("shrunk body");
        let mut rng = RngStream::new(seed, 1).rng();
        let unit = constant_height_check(&body, 10_000, 1e-12, &mut rng).expect("check");
        let short = constant_height_check(&shrunk, 10_000, 1e-12, &mut rng).expect("check");
        let binding = shrunk.generator_is_vertex(0).expect("lp");
        unit_pass += unit.pass as usize;
        exposed += binding as usize;
        ok &= unit.pass && short.pass == !binding;
    }
    // Companion with a guaranteed exposed face: the 4-cube with one face
    // generator shrunk.
    let shrunk_cube = cube(4).and_then(|c| c.with_scaled_generator(0, 0.8)).expect("cube");
    let mut rng = RngStream::new(99, 0).rng();
    let cube_rep = constant_height_check(&shrunk_cube, 10_000, 1e-12, &mut rng).expect("check");
    ok &= !cube_rep.pass && shrunk_cube.generator_is_vertex(0).expect("lp");
    let line = format!(
        "random D=4 bodies: {unit_pass}/20 unit bodies pass; shrunk generator binding in {exposed}/20; \
         verdicts {}; shrunk 4-cube fails with deviation {:.3}",
        if ok { "all consistent" } else { "INCONSISTENT" },
        cube_rep.max_deviation
    );
    match &mut out {
        Ok(l) => {
            l.push(line);
            if !ok {
                return Err(l.clone());
            }
        }
        Err(l) => l.push(line),
    }
    out
}

fn run_binary(config_path: &Path) -> (i32, ResultRecord) {
    let status = Command::new(env!("CARGO_BIN_EXE_ppt-geometry"))
        .arg("run")
        .arg(config_path)
        .output()
        .expect("spawn runner");
    let cfg = ExperimentConfig::load(config_path).expect("config");
    let text = std::fs::read_to_string(&cfg.output_path).expect("record written");
    (status.status.code().unwrap_or(-1), serde_json::from_str(&text).expect("record parses"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| vec![e.to_string()])?;
    let mut lines = Vec::new();
    let mut ok = true;
    let experiments = [
        config(ExperimentKind::Omega, Some("2x2"), NumberField::Complex, 20_000),
        config(ExperimentKind::Gamma, Some("2x3"), NumberField::Real, 20_000),
        polytope_config(PolytopeSpec::RandomUnit { dim: 4, count: 100, shrink: Some(0.9) }),
    ];
    for (i, base) in experiments.into_iter().enumerate() {
        let mut cfg = base.clone();
        cfg.output_path = dir.path().join(format!("record{i}.json"));
        let path = dir.path().join(format!("config{i}.json"));
        std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
        let mut payloads = Vec::new();
        for _ in 0..2 {
            let (code, rec) = run_binary(&path);
            ok &= code == 0 || code == 1;
            payloads.push(rec.numeric_payload());
        }
        let same = payloads[0] == payloads[1];
        ok &= same;
        lines.push(format!(
            "{} rerun: {} ({} bytes)",
            base.experiment,
            if same { "byte-identical" } else { "DIFFERENT" },
            payloads[0].len()
        ));
    }
    if ok { Ok(lines) } else { Err(lines) }
}

fn main() {
    let criteria: [Criterion; 7] = [
        (1, "omega = 2 for 2x2, 2x3 complex and 2x2 real", omega_two),
        (2, "gamma = D for full bodies, N = 2..4, both fields", gamma_equals_d),
        (3, "constant-height certificates", constant_height),
        (4, "corner probe and A_PPT cross-check", corner_probe),
        (5, "sampler validation", sampler_validation),
        (6, "polytope lab", polytope_lab),
        (7, "determinism of re-runs", determinism),
    ];
    let mut failures = 0;
    for (id, name, f) in criteria {
        let start = Instant::now();
        let result = f();
        let secs = start.elapsed().as_secs_f64();
        let (verdict, lines) = match result {
            Ok(l) => ("PASS", l),
            Err(l) => {
                failures += 1;
                ("FAIL", l)
            }
        };
        println!("criterion {id}: {verdict} {name} [{secs:.1}s]");
        for l in lines {
            println!("    {l}");
        }
    }
    println!("acceptance: {} of 7 criteria pass", 7 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
