use nekolab_web::{complete, envelope_curve, reference_drift};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn completion_export() {
    let v = parse(complete("2,3"));
    assert_eq!(v["matrix"][0], serde_json::json!([2, 3]));
    assert!(v["det"] == "1" || v["det"] == "-1");
    assert!(parse(complete("2,4"))["error"].is_string());
    assert!(parse(complete("x"))["error"].is_string());
}

#[test]
fn envelope_export() {
    let v = parse(envelope_curve(3, 1.0 / 12.0, -6.0, -1.0, 11));
    let r = v["radius"].as_array().unwrap();
    assert_eq!(r.len(), 11);
    assert!(r.windows(2).all(|w| w[0].as_f64() < w[1].as_f64()));
    assert!(parse(envelope_curve(3, 1.0, -6.0, -1.0, 11))["error"].is_string());
}

#[test]
fn drift_export() {
    let v = parse(reference_drift(1e-2, 200.0, 0.1, 1));
    assert_eq!(
        v["t"].as_array().unwrap().len(),
        v["drift"].as_array().unwrap().len()
    );
    assert!(v["energy_deviation"].as_f64() <= v["energy_bound"].as_f64());
}
