//! The JSON the page consumes, exercised natively.

use codiv_wasm_demo::{code_json, rate_json, ser_json, MAX_TRIALS};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn code_builder_reports_distance_and_bounds() {
    let v = parse(code_json("scrs", 10, 2, 1).unwrap());
    assert_eq!(v["d_min"], 6);
    assert_eq!(v["generator"].as_array().unwrap().len(), 2);
    assert_eq!(v["bounds"]["griesmer_equality"], false);
    assert_eq!(v["bounds"]["attains_griesmer_max"], true);
    assert_eq!(v["scrs"]["n_out"], 3);
    let v = parse(code_json("simplex", 0, 3, 1).unwrap());
    assert_eq!((v["n"].as_u64(), v["d_min"].as_u64()), (Some(7), Some(4)));
    assert!(code_json("custom", 3, 2, 1).is_err());
    assert!(code_json("scrs", 1, 2, 1).is_err());
}

#[test]
fn sweep_returns_rows_and_fits() {
    let v = parse(ser_json("qpsk", 1, 6, "scrs", "ml, hamming", 0.0, 10.0, 5.0, 4000, 3).unwrap());
    assert_eq!(v["rows"].as_array().unwrap().len(), 6);
    assert_eq!(v["fits"].as_array().unwrap().len(), 2);
    let again = parse(ser_json("qpsk", 1, 6, "scrs", "ml, hamming", 0.0, 10.0, 5.0, 4000, 3).unwrap());
    assert_eq!(v["rows"], again["rows"]);
    assert!(ser_json("qpsk", 1, 6, "scrs", "ml", 0.0, 10.0, 5.0, MAX_TRIALS + 1, 3).is_err());
    assert!(ser_json("qpsk", 1, 6, "scrs", "fast", 0.0, 10.0, 5.0, 10, 3).is_err());
    assert!(ser_json("qpsk", 1, 6, "scrs", "ml", 0.0, 10.0, 0.0, 10, 3).is_err());
}

#[test]
fn rate_curves_cover_three_receivers() {
    let v = parse(rate_json("1.5, 0.3, 1.5", 0.0, 20.0, 10.0, 100, 1).unwrap());
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| (0.0..=2.0).contains(&r["rate"].as_f64().unwrap())));
    assert!(rate_json("", 0.0, 10.0, 10.0, 50, 1).is_ok());
    assert!(rate_json("1, x, 1", 0.0, 10.0, 10.0, 50, 1).is_err());
}
