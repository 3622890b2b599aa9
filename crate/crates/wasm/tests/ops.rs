use probalg_wasm::{atom_report, evaluate, forking_report};

const XYZ: &str = include_str!("../../../data/xyz.json");
const COIN: &str = include_str!("../../../data/coin.json");
const FORK4: &str = include_str!("../../../data/fork4.json");

#[test]
fn atom_report_matches_the_weights() {
    let v = atom_report(XYZ, "ALL").unwrap();
    assert_eq!(v["Phi"], serde_json::json!(["1/2", "1/4", "1/4"]));
    assert_eq!(v["mu"], "1/1");
    assert_eq!(v["predicates"][0]["phi_n"], "1/2");
    assert_eq!(v["predicates"][2]["phi_n"], "0/1");
    assert_eq!(v["chi"], "0/1");
    let v = atom_report(XYZ, "A").unwrap();
    assert_eq!(v["mu"], "3/4");
    assert_eq!(v["event"], "{x,y}");
}

#[test]
fn evaluate_with_bindings() {
    let v = evaluate(COIN, "chi(x)", "x=ALL").unwrap();
    assert_eq!(v["value"], "0/1");
    let v = evaluate(XYZ, "mu(x /\\ ~X)", " x = A ; ").unwrap();
    assert_eq!(v["value"], "1/4");
    assert_eq!(v["approx"], 0.25);
    let v = evaluate(COIN, "sup y . mu(y)", "").unwrap();
    assert_eq!(v["value"], "1/1");
    assert_eq!(v["witnesses"]["y"], "{h,t}");
}

#[test]
fn errors_are_messages() {
    assert!(evaluate(COIN, "mu(x)", "").unwrap_err().contains('x'));
    assert!(evaluate(COIN, "mu(", "").is_err());
    assert!(evaluate(COIN, "mu(x)", "x").unwrap_err().contains("VAR=EVENT"));
    assert!(atom_report("{", "ALL").is_err());
    assert!(atom_report(XYZ, "nope").is_err());
}

#[test]
fn forking_report_on_four_atoms() {
    let v = forking_report(FORK4, "a1,a2", "trivial", "C", "1/8").unwrap();
    assert_eq!(v["distance"], "1/4");
    assert_eq!(v["forks"], true);
    assert_eq!(v["threshold"], "1/128");
    assert_eq!(v["holds"], true);
    assert!((v["entropy_gap"].as_f64().unwrap() - 0.1308).abs() < 1e-3);
    let v = forking_report(FORK4, "a1,a2", "trivial", "C", "1/4").unwrap();
    assert_eq!(v["forks"], false);
    assert!(forking_report(FORK4, "a1", "trivial", "C", "1/4").is_err());
}
