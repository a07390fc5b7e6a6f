use std::path::PathBuf;
use std::process::Command;

use ncfilt::cli::{run, Outcome};
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .display()
        .to_string()
}

fn ncfilt(args: &[&str]) -> Outcome {
    run(std::iter::once("ncfilt").chain(args.iter().copied()))
}

fn report(out: &Outcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

#[test]
fn quantum_weyl_pertinency_certifies_and_reverifies() {
    let file = fixture("weyl_q3.alg");
    let out = ncfilt(&["pertinency", &file, "--group", "G", "--cap", "3", "--bound", "6"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let r = report(&out);
    assert_eq!(r["status"], "certified");
    assert_eq!(r["group_order"], 3);
    let exps: Vec<u64> = r["exponents"].as_array().unwrap().iter().map(|e| e.as_u64().unwrap()).collect();
    assert_eq!(exps.len(), 2);
    assert!(exps.iter().all(|&e| (1..=3).contains(&e)));

    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    std::fs::write(&cert, &out.stdout).unwrap();
    let cert = cert.display().to_string();
    let ok = ncfilt(&["verify-cert", &file, &cert]);
    assert_eq!(ok.code, 0, "{}", ok.stdout);
    assert_eq!(report(&ok)["status"], "verified");

    let mut tampered = r.clone();
    let coeff = &mut tampered["certificate"]["entries"][0]["witness"][0][4];
    *coeff = Value::String(format!("{} + 1", coeff.as_str().unwrap()));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&tampered).unwrap()).unwrap();
    let out = ncfilt(&["verify-cert", &file, &bad.display().to_string()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("re-expand"), "{}", out.stderr);
}

#[test]
fn verify_cert_accepts_every_emitted_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("kxy.alg", "G", "3"),
        ("weyl.alg", "G", "4"),
        ("weyl_q3.alg", "G", "6"),
        ("pl11.alg", "G", "4"),
        ("quantum_plane.alg", "G", "4"),
        ("kxy.alg", "R", "4"),
    ];
    let mut certified = 0;
    for (i, (name, group, bound)) in cases.iter().enumerate() {
        let file = fixture(name);
        let out = ncfilt(&["pertinency", &file, "--group", group, "--cap", "3", "--bound", bound]);
        assert!(out.code == 0 || out.code == 1, "{name}: {}", out.stderr);
        let r = report(&out);
        if r.get("certificate").is_none() {
            assert_eq!(r["status"], "inconclusive");
            continue;
        }
        let cert = dir.path().join(format!("c{i}.json"));
        std::fs::write(&cert, &out.stdout).unwrap();
        let v = ncfilt(&["verify-cert", &file, &cert.display().to_string()]);
        assert_eq!(v.code, 0, "{name}: {}", v.stdout);
        certified += 1;
    }
    assert!(certified >= 3);
}

#[test]
fn congenial_marks_the_noetherian_condition_as_proxy() {
    let out = ncfilt(&["congenial", &fixture("qweyl1.alg"), "--primes", "7,13", "--bound", "6"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let r = report(&out);
    assert_eq!(r["report"]["noetherian_proxy"]["status"], "proxy");
    assert!(r["report"]["noetherian_proxy"]["detail"].as_str().unwrap().contains("proxy"));
    assert_eq!(r["report"]["order_generators"], serde_json::json!(["zeta(3)"]));
}

#[test]
fn exit_codes() {
    let out = ncfilt(&["frobnicate"]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());

    let out = ncfilt(&["dims", "/nonexistent/file.alg", "--upto", "2"]);
    assert_eq!(out.code, 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.alg");
    std::fs::write(&bad, "[algebra]\nfield = Q\ngenerators = x, y\n[relations]\nx*y - z\n").unwrap();
    let out = ncfilt(&["check-pbw", &bad.display().to_string()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 5, column 7"), "{}", out.stderr);

    let out = ncfilt(&["pertinency", &fixture("kxy.alg"), "--group", "R", "--cap", "3", "--bound", "4"]);
    assert_eq!(out.code, 1);
    assert_eq!(report(&out)["status"], "inconclusive");

    let out = ncfilt(&["auto-verify", &fixture("pl11.alg"), "--auto", "missing"]);
    assert_eq!(out.code, 2);
}

#[test]
fn reports_carry_schema_version() {
    let cases: Vec<Vec<String>> = vec![
        vec!["check-pbw".into(), fixture("weyl.alg")],
        vec!["dims".into(), fixture("weyl.alg"), "--upto".into(), "4".into()],
        vec!["gr".into(), fixture("downup.alg")],
        vec!["auto-verify".into(), fixture("pl11.alg"), "--auto".into(), "phi".into()],
        vec!["group".into(), fixture("pl11.alg"), "--group".into(), "G".into()],
        vec!["modp".into(), fixture("qweyl1.alg"), "--prime".into(), "7".into()],
        vec!["selftest".into(), "--seed".into(), "1".into(), "--samples".into(), "20".into()],
    ];
    for args in cases {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = ncfilt(&refs);
        assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
        let r = report(&out);
        assert_eq!(r["schema_version"], 1);
        assert_eq!(r["command"], args[0].as_str());
    }
}

#[test]
fn skew_mul_multiplies_in_the_smash_product() {
    let out = ncfilt(&["skew-mul", &fixture("kxy.alg"), "--group", "G", "--lhs", "x # neg", "--rhs", "x + y # e"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    // (x # g)(x # e) = x g(x) # g = -x^2 # g; (x # g)(y # e) = -xy # g
    assert_eq!(report(&out)["product"], "(-x*y - x*x) # g1");
}

#[test]
fn central_witness_and_injectivity_commands() {
    let out = ncfilt(&["central-witness", &fixture("weyl.alg"), "--prime", "3", "--gen", "x"]);
    assert_eq!(out.code, 0);
    assert_eq!(report(&out)["witness"]["element"], "x*x*x");
    let out = ncfilt(&["auslander-inj", &fixture("kxy.alg"), "--group", "G", "-N", "2", "-M", "2"]);
    assert_eq!(out.code, 0);
    assert_eq!(report(&out)["kernel_dim"], 0);
    let out = ncfilt(&["auslander-inj", &fixture("kxy.alg"), "--group", "G", "-N", "1", "-M", "0"]);
    assert_eq!(out.code, 1);
}

#[test]
fn binary_matches_in_process_run() {
    let file = fixture("kxy.alg");
    let args = ["growth", file.as_str(), "--group", "R", "--bound", "4"];
    let bin = Command::new(env!("CARGO_BIN_EXE_ncfilt")).args(args).output().unwrap();
    let inproc = ncfilt(&args);
    assert_eq!(bin.status.code(), Some(inproc.code));
    assert_eq!(String::from_utf8(bin.stdout).unwrap(), inproc.stdout);
}
