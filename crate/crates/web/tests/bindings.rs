use grouprg_web::{build_prg, evaluate_prg, group_info};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn group_info_reports_q8() {
    let v = parse(&group_info("Q8"));
    assert_eq!(v["order"], 8);
    assert_eq!(v["dedekind"], true);
    assert_eq!(v["mixing"], true);
    assert!(parse(&group_info("nope"))["error"].is_string());
}

#[test]
fn build_and_evaluate_round_trip() {
    let spec = build_prg("pgroup", "Q8", 10, 0.1);
    assert!(parse(&spec)["error"].is_null(), "{spec}");
    let report = parse(&evaluate_prg(&spec, 5, 0));
    assert_eq!(report["schema"], "grouprg-report/1");
    assert_eq!(report["instances"].as_array().unwrap().len(), 5);
    assert!(report["worst_delta"].as_f64().unwrap() <= 0.1);
    assert!(parse(&build_prg("what", "Q8", 10, 0.1))["error"].is_string());
    assert!(parse(&evaluate_prg("{}", 5, 0))["error"].is_string());
}
