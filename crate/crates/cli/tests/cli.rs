use std::path::PathBuf;
use std::process::Command;

use mvfield::mvf::{validate, MultivectorField};
use mvfield::SimplicialComplex;
use mvfield_cli::{render_svg, run_pipeline, PipelineConfig, PipelineError, View};

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn small(model: u8) -> PipelineConfig {
    PipelineConfig { n_samples: 300, n_clusters: 20, model, seed: 5, ..PipelineConfig::default() }
}

fn mvfield() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mvfield"))
}

#[test]
fn artifacts_reload_and_validate() {
    for model in [1, 2] {
        let dir = scratch(&format!("artifacts_{model}"));
        let cfg = PipelineConfig { output: Some(dir.clone()), ..small(model) };
        let run = run_pipeline(&cfg).unwrap();
        for f in ["report.json", "field.json", "complex.json", "clusters.csv", "condensation.dot", "field.svg"] {
            assert!(dir.join(f).exists(), "{f} missing");
        }
        let k = SimplicialComplex::from_json(&std::fs::read_to_string(dir.join("complex.json")).unwrap()).unwrap();
        let (field, kind) =
            MultivectorField::from_json(&k, &std::fs::read_to_string(dir.join("field.json")).unwrap()).unwrap();
        assert_eq!(kind.number(), model);
        assert!(validate(&k, &field).is_valid());
        assert_eq!(field.len(), run.report.counts.multivectors);
        if model == 2 {
            assert_eq!(run.report.counts.multivectors, run.report.counts.toplexes);
        }
        assert!(run.report.counts.critical_multivectors <= run.report.counts.multivectors);
    }
}

#[test]
fn staged_commands_match_the_pipeline() {
    let dir = scratch("staged");
    let p = |f: &str| dir.join(f).display().to_string();
    let steps: Vec<Vec<String>> = vec![
        vec!["sample", "--n", "300", "--seed", "3", "--out", &p("samples.csv")],
        vec!["cluster", "--input", &p("samples.csv"), "--clusters", "15", "--out", &p("clusters.csv")],
        vec!["triangulate", "--input", &p("clusters.csv"), "--out", &p("complex.json")],
        vec![
            "build",
            "--complex",
            &p("complex.json"),
            "--data",
            &p("clusters.csv"),
            "--out",
            &p("inst.json"),
            "--lp",
            &p("inst.lp"),
        ],
        vec!["solve", "--instance", &p("inst.json"), "--out", &p("sol.json")],
        vec![
            "extract",
            "--complex",
            &p("complex.json"),
            "--instance",
            &p("inst.json"),
            "--solution",
            &p("sol.json"),
            "--out",
            &p("field.json"),
        ],
        vec!["analyze", "--complex", &p("complex.json"), "--field", &p("field.json"), "--out", &p("morse.json")],
        vec![
            "render",
            "--complex",
            &p("complex.json"),
            "--data",
            &p("clusters.csv"),
            "--field",
            &p("field.json"),
            "--view",
            "morse",
            "--out",
            &p("morse.svg"),
        ],
        vec!["check-integrality", "--instance", &p("inst.json"), "--reps", "3", "--out", &p("integrality.json")],
    ]
    .into_iter()
    .map(|s| s.into_iter().map(String::from).collect())
    .collect();
    for args in steps {
        let out = mvfield().args(&args).output().unwrap();
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let lp = std::fs::read_to_string(dir.join("inst.lp")).unwrap();
    assert!(lp.contains("Minimize") && lp.contains("Binary"));
    let svg = std::fs::read_to_string(dir.join("morse.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn exit_codes() {
    let out = mvfield().args(["pipeline", "--preset", "lorenz-literal"]).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
    let out = mvfield().args(["pipeline", "--preset", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let dir = scratch("exit_codes");
    // a field that leaves a simplex uncovered fails validation
    std::fs::write(dir.join("k.json"), r#"{"simplices":[[0],[1],[0,1]]}"#).unwrap();
    std::fs::write(dir.join("f.json"), r#"{"parts":[[[0],[0,1]]],"model":2}"#).unwrap();
    let out = mvfield()
        .args(["analyze", "--complex"])
        .arg(dir.join("k.json"))
        .arg("--field")
        .arg(dir.join("f.json"))
        .arg("--out")
        .arg(dir.join("r.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn flag_overrides_apply() {
    let out = mvfield()
        .args(["pipeline", "--system", "vanderpol", "--clusters", "12", "--seed", "9", "--model", "1"])
        .args(["--alpha", "0.25", "--beta", "0.75"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["system"], "vanderpol");
    assert_eq!(report["model"], 1);
    assert_eq!(report["seed"], 9);
    assert_eq!(report["counts"]["clusters"], 12);
}

#[test]
fn rendering_is_deterministic_and_planar_only() {
    let run = run_pipeline(&small(2)).unwrap();
    for view in View::ALL {
        let a = render_svg(&run.complex, &run.assignment, &run.field, &run.matching, &run.morse, view).unwrap();
        let b = render_svg(&run.complex, &run.assignment, &run.field, &run.matching, &run.morse, view).unwrap();
        assert_eq!(a, b);
    }
    let empty_k = SimplicialComplex::build(&[]).unwrap();
    let empty_f = MultivectorField::from_parts(&empty_k, Vec::new());
    let empty_a = mvfield::geometry::assign_vectors(&empty_k, &[], &[]).unwrap();
    let morse = mvfield::dynamics::morse_decomposition(&empty_k, &empty_f, &[], 2);
    let svg = render_svg(&empty_k, &empty_a, &empty_f, &[], &morse, View::Field).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));

    let lorenz = PipelineConfig { n_clusters: 15, ..PipelineConfig::preset("lorenz").unwrap() };
    let run = run_pipeline(&lorenz).unwrap();
    let err = render_svg(&run.complex, &run.assignment, &run.field, &run.matching, &run.morse, View::Field);
    assert!(err.is_err());
}

#[test]
fn config_errors_are_reported() {
    let bad = PipelineConfig { n_clusters: 5000, ..PipelineConfig::default() };
    assert!(matches!(run_pipeline(&bad), Err(PipelineError::Config(_))));
    let err = run_pipeline(&PipelineConfig::preset("lorenz-literal").unwrap()).err().unwrap();
    assert_eq!(err.exit_code(), 4);
}
