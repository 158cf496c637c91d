use hexsub::admissibility::CandidateMatrix;
use hexsub::config::{DomainFile, PerronSection, ProblemConfig};
use hexsub::frame::reduce_frame;
use hexsub::perron::{BoundaryData, DomainSpec, PerronOptions};
use hexsub::pipeline::{self, run_pipeline, EXIT_NOT_ADMISSIBLE};
use hexsub::spectral::SymMatrix;
use hexsub::OperatorSpec;

/// `R diag(d) Rᵀ` for the rotation by `angle` in the (0,1) plane followed by
/// one in the (1,2) plane.
fn rotated(d: &[f64], angle: f64) -> (SymMatrix, Vec<Vec<f64>>) {
    let (c, s) = (angle.cos(), angle.sin());
    let r1 = [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]];
    let r2 = [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]];
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = (0..3).map(|k| r1[i][k] * r2[k][j]).sum();
        }
    }
    let mut m = SymMatrix::zeros(3);
    for i in 0..3 {
        for j in i..3 {
            m.set(i, j, (0..3).map(|k| r[i][k] * d[k] * r[j][k]).sum());
        }
    }
    (m, (0..3).map(|j| (0..3).map(|i| r[i][j]).collect()).collect())
}

#[test]
fn rotated_diagonal_recovered() {
    let (m, _) = rotated(&[1.0, 2.0, 3.0], 0.7);
    let f = reduce_frame(&m, &[0.0; 3]).unwrap();
    for (got, want) in f.lambda.iter().zip([1.0, 2.0, 3.0]) {
        assert!((got - want).abs() < 1e-10);
    }
}

#[test]
fn frame_reproduces_quadratic() {
    let (m, _) = rotated(&[0.5, 1.2, 2.5], 1.1);
    let b = [0.3, -0.7, 0.2];
    let c = 1.25;
    let f = reduce_frame(&m, &b).unwrap();
    let cp = f.reduced_constant(c);
    for k in 0..50 {
        let t = k as f64;
        let x = [(0.37 * t).sin() * 3.0, (0.11 * t).cos() * 2.0, 0.05 * t - 1.0];
        let orig = 0.5 * m.quad_form(&x) + b.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() + c;
        let y = f.to_reduced(&x);
        let red = 0.5 * f.lambda.iter().zip(&y).map(|(l, v)| l * v * v).sum::<f64>() + cp;
        assert!((orig - red).abs() < 1e-10, "{orig} vs {red}");
    }
}

fn radial_config() -> ProblemConfig {
    let mut cfg = ProblemConfig::new(OperatorSpec::SigmaK { n: 3, k: 3 }, CandidateMatrix::Diagonal(vec![1.0; 3]));
    cfg.delta = 0.0;
    cfg
}

#[test]
fn radial_pipeline_passes_every_stage() {
    let mut cfg = radial_config();
    cfg.perron = Some(PerronSection {
        domain: DomainFile {
            domain: DomainSpec::unit_ball(3),
            phi: Some(BoundaryData::zero(3)),
        },
        c: None,
    });
    let dir = tempfile::tempdir().unwrap();
    let out = run_pipeline(&cfg, dir.path(), &PerronOptions::default()).unwrap();
    assert_eq!(out.exit_code, 0, "{:?}", out.stages);
    assert_eq!(out.stages.len(), 4);
    assert!(out.stages.iter().all(|s| s.ok));
    for name in ["check.json", "profile.csv", "subsolve.json", "verify.json", "glue_report.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn outside_admissible_set_stops_at_check() {
    let cfg = ProblemConfig::new(OperatorSpec::SigmaK { n: 3, k: 3 }, CandidateMatrix::Diagonal(vec![0.5, 1.0, 2.5]));
    let dir = tempfile::tempdir().unwrap();
    let out = run_pipeline(&cfg, dir.path(), &PerronOptions::default()).unwrap();
    assert_eq!(out.exit_code, EXIT_NOT_ADMISSIBLE);
    assert_eq!(out.stages.len(), 1);
}

#[test]
fn delta_too_large_reports_range() {
    let mut cfg = radial_config();
    cfg.delta = 1.5;
    let chk = pipeline::check(&cfg).unwrap();
    assert_eq!(chk.exit_code(), EXIT_NOT_ADMISSIBLE);
    assert!(chk.failure.unwrap().contains("delta_max = 1"));
}

#[test]
fn outputs_are_deterministic() {
    let cfg = radial_config();
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_pipeline(&cfg, d1.path(), &PerronOptions::default()).unwrap();
    run_pipeline(&cfg, d2.path(), &PerronOptions::default()).unwrap();
    for name in ["check.json", "profile.csv", "subsolve.json", "verify.json"] {
        let a = std::fs::read(d1.path().join(name)).unwrap();
        let b = std::fs::read(d2.path().join(name)).unwrap();
        assert!(a == b, "{name} differs");
    }
}

#[test]
fn profile_csv_round_trip() {
    let cfg = radial_config();
    let ctx = pipeline::context(&cfg).unwrap();
    let (u, _) = pipeline::subsolve(&cfg, &ctx).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    pipeline::write_profile_csv(&u, &path).unwrap();
    let rows = pipeline::read_profile_csv(&path).unwrap();
    assert_eq!(rows, u.table());
    assert!(pipeline::compare_profile(&rows, &u) < 1e-12);
}

#[test]
fn rotated_problem_reports_in_original_frame() {
    // σ_2 at a* = 1/√3 rotated and shifted
    let a = 1.0 / 3f64.sqrt();
    let (m, _) = rotated(&[a * 0.98, a, a * 1.02], 0.4);
    let spectrum = hexsub::spectral::eigen_sym(&m);
    let op = OperatorSpec::SigmaK { n: 3, k: 2 };
    let first = op.solve_first_coordinate(&spectrum[1..], 1.0, spectrum[0]).unwrap();
    let (m, _) = rotated(&[first, spectrum[1], spectrum[2]], 0.4);
    let mut cfg = ProblemConfig::new(op, CandidateMatrix::Full(m));
    cfg.b = Some(vec![0.1, 0.0, -0.2]);
    cfg.delta = 0.01;
    cfg.perron = Some(PerronSection {
        domain: DomainFile {
            domain: DomainSpec::unit_ball(3),
            phi: None,
        },
        c: Some(10.0),
    });
    let chk = pipeline::check(&cfg).unwrap();
    assert!(chk.admissible, "{:?}", chk.failure);
    let ctx = pipeline::context(&cfg).unwrap();
    let p = cfg.perron.as_ref().unwrap();
    let out = pipeline::perron(&cfg, &ctx, &chk.frame, &p.domain, p.c, &PerronOptions::default()).unwrap();
    assert!((out.c_original - 10.0).abs() < 1e-12);
    assert!(out.passes, "{:?}", out.sandwich);
}
