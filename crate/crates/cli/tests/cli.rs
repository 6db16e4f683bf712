use std::path::PathBuf;
use std::process::{Command, Output};

use proptest::prelude::*;
use pvidim::{fixtures, Polynomial};
use pvidim_cli::document::{PolyText, ProblemDocument};
use pvidim_cli::infix::parse_polynomial;
use pvidim_cli::CliError;

fn pvidim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pvidim")).args(args).env_remove("PVIDIM_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

#[test]
fn fixture_reports_match_golden_files() {
    for (name, _) in fixtures::all() {
        for (format, ext) in [("text", "txt"), ("machine", "json")] {
            let out = pvidim(&["analyze", "--fixture", name, "--format", format]);
            assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
            let path = golden_dir().join(format!("{name}.{ext}"));
            if std::env::var_os("UPDATE_GOLDEN").is_some() {
                std::fs::write(&path, stdout(&out)).unwrap();
            }
            let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
            assert_eq!(stdout(&out), want, "{name} ({format}) differs from its golden file");
        }
    }
}

#[test]
fn analyze_reports_the_worked_problems() {
    let t = stdout(&pvidim(&["analyze", "--fixture", "cubic-half-plane"]));
    assert!(t.contains("dim Sol ≤ 1 (CERTIFIED)"));
    assert!(t.contains("estimate 1"));
    assert!(t.contains("cross-check: SHARP"));
    let t = stdout(&pvidim(&["analyze", "--fixture", "cubic-pcp"]));
    assert!(t.contains("finiteness: finite"));
    assert!(t.contains("solution near (1.000000, 0.000000)"));
    let t = stdout(&pvidim(&["analyze", "--fixture", "rational-bump"]));
    assert!(t.contains("dim Sol ≤ 1"));
    assert!(t.contains("Stat(K, p/q)"));
}

#[test]
fn check_examples() {
    let t = stdout(&pvidim(&["check", "--fixture", "cubic-pcp", "--point", "1,0"]));
    assert!(t.contains("SOLUTION (exact)"));
    let t = stdout(&pvidim(&["check", "--fixture", "cubic-pcp", "--point", "1,1"]));
    assert!(t.contains("NOT A SOLUTION"));
    let t = stdout(&pvidim(&["check", "--fixture", "zero-field-box", "--point", "0.3,2/3"]));
    assert!(t.contains("SOLUTION (exact)"));
    let out = pvidim(&["check", "--fixture", "cubic-pcp", "--point", "1,0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(pvidim(&["fixtures"]).status.code(), Some(0));
    assert_eq!(pvidim(&["analyze", "/nonexistent/problem.json"]).status.code(), Some(2));
    assert_eq!(pvidim(&["analyze", "--fixture", "no-such-fixture"]).status.code(), Some(2));
    assert_eq!(pvidim(&["analyze", "--fixture", "cubic-pcp", "--face-budget", "1"]).status.code(), Some(3));
    assert_eq!(pvidim(&["classify", "--n", "9", "--d", "1", "--count", "1"]).status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"schema_version": 1, "kind": "pvi", "n": 1, "m": 0, "l": 0, "d": 1, "field": ["x2"]}"#).unwrap();
    assert_eq!(pvidim(&["analyze", bad.to_str().unwrap()]).status.code(), Some(2));

    assert_eq!(CliError::Soundness("estimate above bound".into()).exit_code(), 4);
    assert_eq!(CliError::Core(pvidim::Error::Internal("x".into())).exit_code(), 4);
}

#[test]
fn problem_files_are_read() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cubic.json");
    let doc = r#"{
        "schema_version": 1, "kind": "pvi", "n": 2, "m": 1, "l": 0, "d": 3,
        "field": ["x1^3 + x1 - x2", "x1^3 + x1 - x2"],
        "g": [[[1, 1, [1, 0]], [1, 1, [0, 1]]]]
    }"#;
    std::fs::write(&path, doc).unwrap();
    let from_file = stdout(&pvidim(&["analyze", path.to_str().unwrap()]));
    let from_fixture = stdout(&pvidim(&["analyze", "--fixture", "cubic-half-plane"]));
    let body = |s: &str| s.lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&from_file), body(&from_fixture));
}

#[test]
fn seed_precedence() {
    let seed_of = |args: &[&str], env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_pvidim"));
        c.args(args).env_remove("PVIDIM_SEED");
        if let Some(v) = env {
            c.env("PVIDIM_SEED", v);
        }
        let t = String::from_utf8(c.output().unwrap().stdout).unwrap();
        t.lines().find_map(|l| l.strip_prefix("seed ").map(str::to_string)).unwrap()
    };
    let base = ["analyze", "--fixture", "cubic-pcp"];
    assert_eq!(seed_of(&base, None), "42");
    assert_eq!(seed_of(&base, Some("9")), "9");
    assert_eq!(seed_of(&["analyze", "--fixture", "cubic-pcp", "--seed", "3"], Some("9")), "3");
}

#[test]
fn classify_is_reproducible() {
    let args = ["classify", "--n", "2", "--d", "1", "--count", "12", "--seed", "7", "--starts", "30", "--format", "machine"];
    let a = pvidim(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&pvidim(&args)));
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    let class0 = v["classes"].as_array().unwrap().iter().find(|c| c["k"] == 0).unwrap()["count"].as_u64().unwrap();
    assert!(class0 >= 10, "{v}");
    assert_eq!(v["classes"][0]["k"], "-inf");
    assert_eq!(v["classes"][0]["count"], 0);

    let z = pvidim(&["classify", "--n", "2", "--d", "1", "--count", "0", "--inject-zero", "--format", "machine"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&z)).unwrap();
    assert_eq!(v["per_record"][0]["class"], 2);

    let b = pvidim(&["classify", "--n", "2", "--d", "1", "--count", "8", "--block", "1", "--starts", "30", "--format", "machine"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&b)).unwrap();
    let class1 = v["classes"].as_array().unwrap().iter().find(|c| c["k"] == 1).unwrap()["count"].as_u64().unwrap();
    assert!(class1 >= 7, "{v}");
}

#[test]
fn fixtures_print_parseable_documents() {
    for (name, spec) in fixtures::all() {
        let out = stdout(&pvidim(&["fixtures", name]));
        let doc = ProblemDocument::parse(&out).unwrap();
        assert_eq!(doc.to_spec().unwrap(), spec);
    }
}

#[test]
fn rank_and_faces_commands() {
    let t = stdout(&pvidim(&["rank", "--fixture", "cubic-half-plane", "--face", "1"]));
    assert!(t.contains("rank 2 of 3 CERTIFIED"));
    let t = stdout(&pvidim(&["faces", "--fixture", "cubic-pcp"]));
    assert!(t.contains("4 pseudo-faces"));
    assert_eq!(pvidim(&["rank", "--fixture", "cubic-half-plane", "--face", "0"]).status.code(), Some(2));
}

fn poly_strategy(n: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0u32..=3, n), -20i64..=20, 1i64..=6), 0..=5)
        .prop_map(move |ts| Polynomial::from_terms(n, ts.into_iter().map(|(e, p, q)| (e, pvidim::rat(p, q)))).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn infix_round_trip(p in poly_strategy(3)) {
        prop_assert_eq!(parse_polynomial(&p.to_string(), 3).unwrap(), p);
    }

    #[test]
    fn document_round_trip(field in prop::collection::vec(poly_strategy(2), 2), infix in any::<bool>()) {
        let text = |p: &Polynomial| if infix { PolyText::Infix(p.to_string()) } else { PolyText::from_polynomial(p).unwrap() };
        let doc = ProblemDocument {
            schema_version: 1,
            kind: pvidim_cli::document::KindText::Pvi,
            n: 2,
            m: 1,
            l: 0,
            d: 6,
            field: field.iter().map(text).collect(),
            p: None,
            q: None,
            g: vec![PolyText::Infix("x1 + x2 - 1".into())],
            h: vec![],
            box_width: None,
            assertions: Default::default(),
            config: Default::default(),
        };
        let again = ProblemDocument::parse(&doc.to_json()).unwrap();
        prop_assert_eq!(&again, &doc);
        prop_assert_eq!(again.to_spec().unwrap().field, field);
    }
}
