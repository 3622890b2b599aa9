//! Browser bindings. Each operation takes a structure file as JSON text and
//! returns a JSON report; the plain functions are what the tests exercise.

use probalg::atoms::{at_n, chi, phi_invariant, phi_n_closed};
use probalg::document::Structure;
use probalg::entropy::entropy_forking_gap;
use probalg::logic::{parse, Evaluator, Valuation};
use probalg::rational::{fmt_ratio, parse_rational, to_f64};
use probalg::types::forking_distance;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// chi is only computed up to this many atoms; it is exponential.
const CHI_ATOMS: usize = 12;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Phi, mu, at_n and phi_n of `event`.
pub fn atom_report(structure: &str, event: &str) -> Result<Value, String> {
    let s = Structure::from_json(structure).map_err(err)?;
    let alg = &s.algebra;
    let e = s.event(event).map_err(err)?;
    let rows = (1..=alg.atom_count())
        .map(|n| {
            Ok(json!({
                "n": n,
                "at_n": fmt_ratio(&at_n(alg, &e, n)?),
                "phi_n": fmt_ratio(&phi_n_closed(alg, &e, n)?),
            }))
        })
        .collect::<Result<Vec<_>, probalg::Error>>()
        .map_err(err)?;
    let chi = if alg.atom_count() <= CHI_ATOMS { Some(fmt_ratio(&chi(alg, &e).map_err(err)?)) } else { None };
    Ok(json!({
        "event": s.show(&e),
        "mu": fmt_ratio(&alg.mu(&e).map_err(err)?),
        "Phi": phi_invariant(alg).sorted_weights.iter().map(fmt_ratio).collect::<Vec<_>>(),
        "predicates": rows,
        "chi": chi,
    }))
}

/// Evaluates `formula` with bindings such as `x=ALL; y={h}`.
pub fn evaluate(structure: &str, formula: &str, bindings: &str) -> Result<Value, String> {
    let s = Structure::from_json(structure).map_err(err)?;
    let phi = parse(formula.trim()).map_err(err)?;
    let mut v = Valuation::new();
    for b in bindings.split(';').map(str::trim).filter(|b| !b.is_empty()) {
        let (var, reference) = b.split_once('=').ok_or_else(|| format!("binding `{b}` is not VAR=EVENT"))?;
        v.insert(var.trim().to_string(), s.event(reference).map_err(err)?);
    }
    let r = Evaluator::new(&s.algebra).with_named(&s.events).eval(&phi, &v).map_err(err)?;
    let witnesses: serde_json::Map<String, Value> =
        r.witnesses.iter().map(|(var, e)| (var.clone(), Value::String(s.show(e)))).collect();
    Ok(json!({
        "formula": phi.to_string(),
        "value": fmt_ratio(&r.value),
        "approx": to_f64(&r.value),
        "witnesses": witnesses,
    }))
}

/// Forking distance of the partition `tuple` from `base` to `sub`, and the
/// entropy gap it forces.
pub fn forking_report(structure: &str, tuple: &str, base: &str, sub: &str, eps: &str) -> Result<Value, String> {
    let s = Structure::from_json(structure).map_err(err)?;
    let alg = &s.algebra;
    let t = s.events_list(tuple).map_err(err)?;
    let (e, c) = (s.subalgebra(base).map_err(err)?, s.subalgebra(sub).map_err(err)?);
    let eps = parse_rational(eps).map_err(err)?;
    let d = forking_distance(alg, &t, &e, &c).map_err(err)?;
    let g = entropy_forking_gap(alg, &t, &e, &c, &eps).map_err(err)?;
    Ok(json!({
        "distance": fmt_ratio(&d),
        "eps": fmt_ratio(&eps),
        "forks": d > eps,
        "entropy_gap": g.gap(),
        "threshold": fmt_ratio(&g.threshold),
        "holds": g.holds(),
    }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = atomReport)]
pub fn atom_report_js(structure: &str, event: &str) -> Result<String, JsValue> {
    to_js(atom_report(structure, event))
}

#[wasm_bindgen(js_name = evaluate)]
pub fn evaluate_js(structure: &str, formula: &str, bindings: &str) -> Result<String, JsValue> {
    to_js(evaluate(structure, formula, bindings))
}

#[wasm_bindgen(js_name = forkingReport)]
pub fn forking_report_js(structure: &str, tuple: &str, base: &str, sub: &str, eps: &str) -> Result<String, JsValue> {
    to_js(forking_report(structure, tuple, base, sub, eps))
}
