use std::process::{Command, Output};
use std::str::FromStr;

use besselprod::products::product_expansion;
use besselprod::{ExactRational, OrderSpec, ScaleSpec};
use serde_json::Value;

fn besselprod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_besselprod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn coeffs(v: &Value) -> Vec<String> {
    v["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap().to_string())
        .collect()
}

fn q(n: i64, d: i64) -> ExactRational {
    ExactRational::new(n.into(), d.into())
}

#[test]
fn expand_square_of_j0() {
    let out = besselprod(&["expand", "--orders", "0,0", "--scales", "1,1", "--trunc", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(coeffs(&v), ["1", "-2", "3/2"]);
    assert_eq!(v["exact"], Value::Bool(true));
    let text = String::from_utf8(out.stdout).unwrap();
    let positions: Vec<usize> = ["orders", "scales", "trunc", "prefactor_exponent", "scalar", "exact", "coeffs"]
        .iter()
        .map(|k| text.find(&format!("\"{k}\":")).unwrap())
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{text}");
}

#[test]
fn expand_single_j0_pattern() {
    let out = besselprod(&["expand", "--orders", "0", "--scales", "1", "--trunc", "6"]);
    let got: Vec<ExactRational> = coeffs(&json(&out)).iter().map(|s| ExactRational::from_str(s).unwrap()).collect();
    let mut fact = 1i64;
    for (r, c) in got.iter().enumerate() {
        if r > 0 {
            fact *= r as i64;
        }
        let sign = if r % 2 == 0 { 1 } else { -1 };
        assert_eq!(*c, q(sign, fact * fact), "r = {r}");
    }
}

#[test]
fn expand_order_zero_truncation() {
    let out = besselprod(&["expand", "--orders", "1,2", "--scales", "1,3", "--trunc", "0"]);
    assert_eq!(coeffs(&json(&out)), ["1/2"]);
}

#[test]
fn fractions_round_trip() {
    let out = besselprod(&["expand", "--orders", "0,1,2", "--scales", "1/2,3,0.2", "--trunc", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let strings = coeffs(&json(&out));
    let scales = ScaleSpec::new(
        [q(1, 2), q(3, 1), q(1, 5)]
            .into_iter()
            .map(|a| besselprod::Scale::exact(a).unwrap())
            .collect(),
    );
    let series = product_expansion(&OrderSpec(vec![0.0, 1.0, 2.0]), &scales, 12).unwrap();
    let exact = series.coeffs.as_exact().unwrap();
    assert_eq!(strings.len(), exact.len());
    for (s, c) in strings.iter().zip(exact) {
        assert_eq!(&ExactRational::from_str(s).unwrap(), c);
        assert_eq!(&c.to_string(), s);
    }
}

#[test]
fn expand_csv() {
    let out = besselprod(&["expand", "--scales", "1,1", "--trunc", "2", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "r,coefficient,exact\n0,1,true\n1,-2,true\n2,3/2,true\n");
}

#[test]
fn output_is_deterministic() {
    let args = ["expand", "--orders", "1/2,0", "--scales", "1,2", "--trunc", "20"];
    assert_eq!(besselprod(&args).stdout, besselprod(&args).stdout);
    let args = ["integrate", "--scales", "1,1,3"];
    assert_eq!(besselprod(&args).stdout, besselprod(&args).stdout);
    let args = ["verify", "--suite", "integrals"];
    assert_eq!(besselprod(&args).stdout, besselprod(&args).stdout);
}

#[test]
fn integrate_two_factors() {
    let out = besselprod(&["integrate", "--scales", "1,0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let value = v["closed_form"]["value"].as_f64().unwrap();
    assert!((value - 2.14636).abs() < 1e-5);
    assert!(v["residual"].as_f64().unwrap() < 1e-5);
}

#[test]
fn integrate_rejects_equal_scales() {
    let out = besselprod(&["integrate", "--scales", "1,1"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("|a| > |b|"), "{err}");
    assert!(err.contains("ρ = 1"), "{err}");
}

#[test]
fn integrate_three_factors() {
    let out = besselprod(&["integrate", "--scales", "1,1,3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["closed_form"]["value"].as_f64().unwrap().is_finite());
    assert!(v["residual"].as_f64().unwrap() < 1e-5);
    assert_eq!(besselprod(&["integrate", "--scales", "1,2,3"]).status.code(), Some(3));
}

#[test]
fn bad_arguments_exit_2() {
    for args in [
        vec!["expand", "--scales", "1", "--trunc", "65"],
        vec!["expand", "--orders", "0,0", "--scales", "1"],
        vec!["expand", "--scales", "abc"],
        vec!["expand", "--scales", "0"],
        vec!["expand", "--orders", "-1", "--scales", "1"],
        vec!["integrate", "--scales", "1"],
        vec!["integrate", "--scales", "1,1/2", "--tol", "0"],
        vec!["verify", "--suite", "nope"],
        vec!["derive", "--scales", "1"],
    ] {
        let out = besselprod(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn derive_and_eval() {
    let v = json(&besselprod(&["derive", "--scales", "2,3", "--n", "2", "--x", "0"]));
    assert_eq!(v["value"].as_f64().unwrap(), -6.5);
    let v = json(&besselprod(&["eval", "--orders", "0,1", "--scales", "1,2", "--x", "0.7"]));
    assert!(v["difference"].as_f64().unwrap() < 1e-14);
}

#[test]
fn verify_lpoly() {
    let out = besselprod(&["verify", "--suite", "lpoly"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["failures"], 0);
    let ids: Vec<_> = v["details"].as_array().unwrap().iter().map(|d| d["id"].as_str().unwrap().to_string()).collect();
    assert!(ids.iter().any(|id| id == "B_r(2)=binom(2r,r), r≤20"));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("verify lpoly:"), "{err}");
}

#[test]
fn verify_all() {
    let out = besselprod(&["verify", "--suite", "all"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["failures"], 0);
    assert!(v["worst_residual"].as_f64().unwrap() <= v["tolerance"].as_f64().unwrap());
    let details = v["details"].as_array().unwrap();
    assert!(details.iter().any(|d| d["id"].as_str().unwrap().starts_with("products/oracle-equivalence grid n=4")));
}
