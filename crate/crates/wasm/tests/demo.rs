use serde_json::Value;
use solvfrag_wasm::{heisenberg_json, parse_input, partition_json, solve_json};

const H2: &str = include_str!("../../../fixtures/h2_qubit.json");

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn text_and_json_inputs_agree() {
    let from_json = parse_input(H2).unwrap();
    let lines: String = from_json
        .iter()
        .map(|(w, c)| format!("{c:e} {w}\n"))
        .collect();
    let from_text = parse_input(&format!("# h2\n{lines}\n")).unwrap();
    assert_eq!(from_text.len(), from_json.len());
    for ((a, x), (b, y)) in from_text.iter().zip(from_json.iter()) {
        assert_eq!(a, b);
        assert_eq!(x, y);
    }
}

#[test]
fn h2_counts() {
    let r = parse(partition_json(H2, "fc", 1).unwrap());
    assert_eq!(r["counts"]["ac"], 10);
    assert_eq!(r["counts"]["fc"], 2);
    assert_eq!(r["counts"]["nc"], 1);
    assert_eq!(r["counts"]["fnc"], 1);
    assert_eq!(r["fragments"].as_array().unwrap().len(), 2);
}

#[test]
fn h2_solved_as_one_fragment() {
    let r = parse(solve_json(H2).unwrap());
    let e = r["ground_energy"].as_f64().unwrap();
    assert!((e - r["levels"][0][0].as_f64().unwrap()).abs() < 1e-12);
    let dim: u64 = r["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l[1].as_str().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(dim, 16);
}

#[test]
fn heisenberg_two_sites() {
    let r = parse(heisenberg_json(2, 7, 256).unwrap());
    assert_eq!(r["terms"], 13);
    assert_eq!(r["nc"].as_array().unwrap().len(), 2);
}

#[test]
fn errors_are_messages() {
    assert!(parse_input("abc X0").unwrap_err().contains("line 1"));
    assert!(parse_input("1.0 Q0").is_err());
    assert!(partition_json("1.0 X0", "xx", 1).is_err());
    assert!(solve_json("1 X0\n1 Z0\n1 X1\n1 Z1\n1 X0 X1").is_err());
    assert!(heisenberg_json(0, 1, 1).is_err());
}
