//! Browser bindings for the demo page in `www/`.
//!
//! Each export takes plain strings or numbers and returns a JSON string. The
//! `*_json` functions hold the logic so they can be tested natively.

use serde_json::{json, Value};
use solvfrag::io::{heisenberg_model, parse_qubit_hamiltonian, HeisenbergSpec};
use solvfrag::nc::{factor_noncontextual, fragment_spectrum, ground_energy};
use solvfrag::partition::partition;
use solvfrag::{Method, PauliSum, PauliWord};
use wasm_bindgen::prelude::*;

const METHODS: [Method; 4] = [Method::Ac, Method::Fc, Method::Nc, Method::Fnc];
const MAX_DEMO_QUBITS: usize = 64;

/// Reads either a qubit-hamiltonian JSON document or lines of the form
/// `coefficient word`, e.g. `-0.5 X0 Z3`. Blank lines and `#` comments are skipped.
pub fn parse_input(text: &str) -> Result<PauliSum, String> {
    if text.trim_start().starts_with('{') {
        return parse_qubit_hamiltonian(text)
            .map(|f| f.hamiltonian)
            .map_err(|e| e.to_string());
    }
    let mut rows = Vec::new();
    let mut n = 1;
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (c, word) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let c: f64 = c
            .parse()
            .map_err(|_| format!("line {}: bad coefficient `{c}`", i + 1))?;
        for tok in word.split_whitespace() {
            let q: usize = tok.get(1..).and_then(|s| s.parse().ok()).unwrap_or(0);
            n = n.max(q + 1);
        }
        rows.push((i + 1, c, word.trim().to_string()));
    }
    if n > MAX_DEMO_QUBITS {
        return Err(format!("at most {MAX_DEMO_QUBITS} qubits in the demo"));
    }
    let mut terms = Vec::with_capacity(rows.len());
    for (line, c, word) in rows {
        let w = PauliWord::parse(&word, n).map_err(|e| format!("line {line}: {e}"))?;
        terms.push((w, c));
    }
    PauliSum::from_terms(n, terms).map_err(|e| e.to_string())
}

fn fragments_json(h: &PauliSum, method: Method, sweeps: usize) -> Result<Value, String> {
    let p = partition(h, method, sweeps).map_err(|e| e.to_string())?;
    let frags: Vec<Vec<Value>> = p
        .fragments
        .iter()
        .map(|f| f.iter().map(|(w, c)| json!([w.to_string(), c])).collect())
        .collect();
    Ok(json!(frags))
}

/// Fragment counts for all four methods plus the fragments of `method`.
pub fn partition_json(text: &str, method: &str, sweeps: usize) -> Result<String, String> {
    let h = parse_input(text)?;
    let chosen: Method = method.parse().map_err(|e: solvfrag::Error| e.to_string())?;
    let mut counts = serde_json::Map::new();
    for m in METHODS {
        let p = partition(&h, m, sweeps.max(1)).map_err(|e| e.to_string())?;
        counts.insert(m.to_string(), json!(p.len()));
    }
    Ok(json!({
        "n_qubits": h.n_qubits(),
        "terms": h.len(),
        "counts": counts,
        "method": chosen.to_string(),
        "fragments": fragments_json(&h, chosen, sweeps.max(1))?,
    })
    .to_string())
}

/// Exact spectrum of a noncontextual Hamiltonian from its sector problems.
pub fn solve_json(text: &str) -> Result<String, String> {
    let h = parse_input(text)?;
    let s = factor_noncontextual(&h).map_err(|e| e.to_string())?;
    let spectrum = fragment_spectrum(&s).map_err(|e| e.to_string())?;
    let ground = ground_energy(&s).map_err(|e| e.to_string())?;
    let levels: Vec<Value> = spectrum
        .levels
        .iter()
        .map(|(e, m)| json!([e, m.to_string()]))
        .collect();
    Ok(json!({
        "n_qubits": h.n_qubits(),
        "terms": h.len(),
        "structure": s.summary(),
        "ground_energy": ground,
        "levels": levels,
    })
    .to_string())
}

/// Random spin chain on `2n` qubits and its FC and NC groupings.
pub fn heisenberg_json(n: usize, seed: u64, sweeps: usize) -> Result<String, String> {
    if n == 0 || 2 * n > MAX_DEMO_QUBITS {
        return Err(format!("n must be between 1 and {}", MAX_DEMO_QUBITS / 2));
    }
    let h = heisenberg_model(&HeisenbergSpec::random(n, seed)).map_err(|e| e.to_string())?;
    Ok(json!({
        "n_qubits": h.n_qubits(),
        "terms": h.len(),
        "fc": fragments_json(&h, Method::Fc, sweeps.max(1))?,
        "nc": fragments_json(&h, Method::Nc, sweeps.max(1))?,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn partition_hamiltonian(text: &str, method: &str, sweeps: u32) -> Result<String, JsError> {
    partition_json(text, method, sweeps as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn solve_noncontextual(text: &str) -> Result<String, JsError> {
    solve_json(text).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn heisenberg_chain(n: u32, seed: u32, sweeps: u32) -> Result<String, JsError> {
    heisenberg_json(n as usize, u64::from(seed), sweeps as usize).map_err(|e| JsError::new(&e))
}
