use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context as _, Result};
use serde_json::{json, Value};
use solvfrag::fermion::{gfro_decompose, gmf_decompose, lr_decompose, table_count};
use solvfrag::io::{load_fermion_tensor, load_qubit_hamiltonian};
use solvfrag::partition::partition;
use solvfrag::Method;

use crate::commands::Context;
use crate::{BenchArgs, Report};

const QUBIT_SYSTEMS: [(&str, &str); 5] = [
    ("H2", "h2"),
    ("LiH", "lih"),
    ("BeH2", "beh2"),
    ("H2O", "h2o"),
    ("NH3", "nh3"),
];

const TENSOR_SYSTEMS: [(&str, &str); 6] = [
    ("H2", "h2"),
    ("H4", "h4"),
    ("LiH", "lih"),
    ("BeH2", "beh2"),
    ("H2O", "h2o"),
    ("NH3", "nh3"),
];

pub fn bench_table(ctx: &Context, a: &BenchArgs) -> Result<Report> {
    let dir = a
        .fixtures
        .clone()
        .or_else(|| ctx.cfg.fixtures.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("fixtures"));
    let keep = |name: &str| a.slow || name != "NH3";
    let mut rows = Vec::new();
    let mut text = String::new();
    if a.table == 1 {
        let sweeps = a.sweeps.or(ctx.cfg.sweeps).unwrap_or(1);
        let _ = writeln!(text, "{:<8}{:>7}{:>6}{:>6}{:>6}{:>6}{:>10}", "System", "Pauli", "AC", "FC", "NC", "FNC", "time");
        for (name, stem) in QUBIT_SYSTEMS.iter().filter(|s| keep(s.0)) {
            let path = dir.join(format!("{stem}_qubit.json"));
            let h = load_qubit_hamiltonian(&path)
                .with_context(|| format!("loading {}", path.display()))?
                .hamiltonian;
            let start = Instant::now();
            let mut counts = Vec::new();
            for m in [Method::Ac, Method::Fc, Method::Nc, Method::Fnc] {
                counts.push(partition(&h, m, sweeps)?.len());
            }
            let secs = start.elapsed().as_secs_f64();
            let _ = writeln!(
                text,
                "{name:<8}{:>7}{:>6}{:>6}{:>6}{:>6}{:>9.3}s",
                h.len(),
                counts[0],
                counts[1],
                counts[2],
                counts[3],
                secs
            );
            rows.push(json!({
                "system": name, "pauli": h.len(), "ac": counts[0], "fc": counts[1],
                "nc": counts[2], "fnc": counts[3], "seconds": secs,
            }));
        }
        return Ok(Report {
            json: json!({"run": {"command": "bench-table", "table": 1, "sweeps": sweeps, "slow": a.slow}, "rows": rows}),
            text,
            passed: None,
        });
    }
    let opts = ctx.cfg.mf_options(None, None);
    let _ = writeln!(text, "{:<8}{:>6}{:>6}{:>10}{:>10}", "System", "GFRO", "LR", "GMF(N/2)", "time");
    for (name, stem) in TENSOR_SYSTEMS.iter().filter(|s| keep(s.0)) {
        let path = dir.join(format!("{stem}_tensor.json"));
        let t = load_fermion_tensor(&path)
            .with_context(|| format!("loading {}", path.display()))?
            .tensor;
        let start = Instant::now();
        let gfro = gfro_decompose(&t, &opts)?;
        let lr = lr_decompose(&t, opts.tol)?;
        let gmf = gmf_decompose(&t, t.n() / 2, &opts)?;
        let secs = start.elapsed().as_secs_f64();
        let counts = [
            table_count(gfro.fragments.len(), &t),
            table_count(lr.len(), &t),
            table_count(gmf.fragments.len(), &t),
        ];
        let mark = |ok: bool| if ok { "" } else { "*" };
        let _ = writeln!(
            text,
            "{name:<8}{:>5}{}{:>6}{:>9}{}{:>9.1}s",
            counts[0],
            mark(gfro.converged),
            counts[1],
            counts[2],
            mark(gmf.converged),
            secs
        );
        rows.push(json!({
            "system": name, "n_spin_orbitals": t.n(), "gfro": counts[0], "lr": counts[1],
            "gmf": counts[2], "converged": gfro.converged && gmf.converged, "seconds": secs,
        }));
    }
    let _ = writeln!(text, "counts include the one-body term; * marks a run that hit the fragment cap");
    Ok(Report {
        json: json!({
            "run": {"command": "bench-table", "table": 2, "tol": opts.tol, "seed": opts.seed, "slow": a.slow},
            "rows": Value::Array(rows),
        }),
        text,
        passed: None,
    })
}
