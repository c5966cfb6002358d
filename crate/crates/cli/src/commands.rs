use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context as _, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use solvfrag::fermion::{
    gfro_decompose, gmf_decompose, lr_decompose, table_count,
};
use solvfrag::io::{
    digest_pauli_sum, digest_tensor, document_format, FermionFragmentRecord, heisenberg_model, load_fermion_tensor,
    parse_fermion_fragments, parse_fragment_set, parse_qubit_hamiltonian, read_text,
    write_fermion_fragments, write_fragment_set, write_qubit_hamiltonian, FermionFragmentFile,
    FragmentSetFile, HeisenbergSpec, Metadata, QubitHamiltonianFile,
    FERMION_FRAGMENT_SCHEMA_VERSION,
};
use solvfrag::nc::{
    evaluate_sector, factor_noncontextual, fragment_spectrum, fragment_spectrum_forced,
    ground_energy, sector_vectors, conditioned_diagonalizer, SECTOR_LIMIT,
};
use solvfrag::partition::partition;
use solvfrag::sim::{
    check_block_identity, check_nc_fragment, check_product_form, dynamic_measure,
    pauli_to_dense, random_construction, DenseLimits, MeasureMode, StateVector,
};
use solvfrag::{verify_partition, Method, PauliSum};

use crate::config::FileConfig;
use crate::{verdict, FermionMethod, FpartitionArgs, HeisenbergArgs, Report, StateChoice};

pub struct Context {
    pub cfg: FileConfig,
    pub limits: DenseLimits,
}

fn load_qubit(path: &Path) -> Result<PauliSum> {
    let text = read_text(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_qubit_hamiltonian(&text)
        .with_context(|| format!("parsing {}", path.display()))?
        .hamiltonian)
}

/// Fragments from a fragment set, or the whole Hamiltonian as one fragment.
fn load_fragments(path: &Path, only: Option<usize>) -> Result<(String, Vec<(usize, PauliSum)>)> {
    let text = read_text(path).with_context(|| format!("reading {}", path.display()))?;
    let ctx = || format!("parsing {}", path.display());
    let (digest, all): (String, Vec<PauliSum>) = match document_format(&text).with_context(ctx)?.as_str() {
        "fragment-set" => {
            let f = parse_fragment_set(&text).with_context(ctx)?;
            (f.source_hash, f.fragments)
        }
        "qubit-hamiltonian" => {
            let h = parse_qubit_hamiltonian(&text).with_context(ctx)?.hamiltonian;
            (digest_pauli_sum(&h), vec![h])
        }
        other => bail!("{}: unsupported format `{other}`", path.display()),
    };
    let picked: Vec<(usize, PauliSum)> = match only {
        Some(i) if i >= all.len() => bail!("fragment {i} out of range ({} fragments)", all.len()),
        Some(i) => vec![(i, all[i].clone())],
        None => all.into_iter().enumerate().collect(),
    };
    Ok((digest, picked))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn sizes(p: &[PauliSum]) -> Vec<usize> {
    p.iter().map(PauliSum::len).collect()
}

impl Context {
    fn sweeps(&self, flag: Option<usize>) -> usize {
        flag.or(self.cfg.sweeps).unwrap_or(1)
    }

    fn seed(&self, flag: Option<u64>) -> u64 {
        flag.or(self.cfg.seed).unwrap_or(0)
    }

    pub fn partition(
        &self,
        input: &Path,
        method: Method,
        sweeps: Option<usize>,
        output: Option<&Path>,
    ) -> Result<Report> {
        let h = load_qubit(input)?;
        let sweeps = self.sweeps(sweeps);
        let p = partition(&h, method, sweeps)?;
        if let Some(out) = output {
            write_file(out, &write_fragment_set(&FragmentSetFile::from(&p)))?;
        }
        let mut text = format!("method: {method}\nterms: {}\nfragments: {}\n", h.len(), p.len());
        let _ = writeln!(text, "sizes: {:?}", sizes(&p.fragments));
        let _ = writeln!(text, "input: {}", p.source_hash);
        Ok(Report {
            json: json!({
                "run": {"command": "partition", "input_digest": p.source_hash, "method": method, "sweeps": sweeps},
                "terms": h.len(),
                "fragments": p.len(),
                "sizes": sizes(&p.fragments),
            }),
            text,
            passed: None,
        })
    }

    pub fn fpartition(&self, a: &FpartitionArgs) -> Result<Report> {
        let file = load_fermion_tensor(&a.input)
            .with_context(|| format!("loading {}", a.input.display()))?;
        let t = &file.tensor;
        let n = t.n();
        let digest = digest_tensor(t, file.constant);
        let opts = self.cfg.mf_options(a.tol, a.seed);
        let (name, k, records, trace, converged): (&str, Option<usize>, Vec<FermionFragmentRecord>, Vec<f64>, bool) =
            match a.method {
                FermionMethod::Lr => {
                    let frags = lr_decompose(t, opts.tol)?;
                    let mut rest = t.supermatrix().clone();
                    let mut trace = vec![rest.norm_squared()];
                    for f in &frags {
                        rest -= f.tensor().supermatrix();
                        trace.push(rest.norm_squared());
                    }
                    ("lr", None, frags.iter().map(Into::into).collect(), trace, true)
                }
                FermionMethod::Gfro => {
                    let d = gfro_decompose(t, &opts)?;
                    ("gfro", None, d.fragments.iter().map(Into::into).collect(), d.residual_trace, d.converged)
                }
                FermionMethod::Gmf => {
                    let k = a.k.or(self.cfg.k).unwrap_or(n / 2);
                    let d = gmf_decompose(t, k, &opts)?;
                    ("gmf", Some(k), d.fragments.iter().map(Into::into).collect(), d.residual_trace, d.converged)
                }
            };
        let count = table_count(records.len(), t);
        let residual = *trace.last().unwrap_or(&0.0);
        let seeded = !matches!(a.method, FermionMethod::Lr);
        let out = FermionFragmentFile {
            format: "fermion-fragment-set".into(),
            schema_version: FERMION_FRAGMENT_SCHEMA_VERSION,
            method: name.into(),
            k,
            tol: opts.tol,
            seed: seeded.then_some(opts.seed),
            source_hash: digest.clone(),
            n_spin_orbitals: n,
            table_count: count,
            converged,
            residual_trace: trace,
            fragments: records,
        };
        if let Some(p) = &a.output {
            write_file(p, &write_fermion_fragments(&out))?;
        }
        let mut text = format!("method: {name}\nspin orbitals: {n}\n");
        if let Some(k) = k {
            let _ = writeln!(text, "K: {k}");
        }
        let _ = writeln!(
            text,
            "two-body fragments: {}\nfragments (with one-body term): {count}\nresidual: {residual:.3e}\nconverged: {converged}\ninput: {digest}",
            out.fragments.len()
        );
        Ok(Report {
            json: json!({
                "run": {"command": "fpartition", "input_digest": digest, "method": name, "k": k, "tol": opts.tol, "seed": out.seed},
                "two_body_fragments": out.fragments.len(),
                "table_count": count,
                "residual": residual,
                "converged": converged,
            }),
            text,
            passed: if converged { None } else { Some(false) },
        })
    }

    pub fn solve_fragment(&self, input: &Path, only: Option<usize>, force: bool) -> Result<Report> {
        let (digest, frags) = load_fragments(input, only)?;
        let mut reports = Vec::new();
        let mut text = String::new();
        let mut total_ground = 0.0;
        for (i, f) in &frags {
            let s = factor_noncontextual(f).with_context(|| format!("fragment {i}"))?;
            if s.k() > SECTOR_LIMIT && !force {
                bail!(
                    "fragment {i} has {} symmetry generators; sector enumeration is limited to {SECTOR_LIMIT} (use --force)",
                    s.k()
                );
            }
            let mut sectors = Vec::new();
            for v in sector_vectors(s.k()) {
                let sol = evaluate_sector(&s, &v)?;
                sectors.push(json!({
                    "v": sol.v,
                    "p0": sol.p_values[0],
                    "a": sol.a,
                    "thetas": sol.thetas,
                    "energies": [sol.energies.0, sol.energies.1],
                }));
            }
            let spectrum = if force { fragment_spectrum_forced(&s)? } else { fragment_spectrum(&s)? };
            let ground = ground_energy(&s)?;
            total_ground += ground;
            let _ = writeln!(
                text,
                "fragment {i}: terms {} K {} L {} sectors {} ground {ground:.12}",
                f.len(),
                s.k(),
                s.l(),
                sectors.len()
            );
            let levels: Vec<Value> = spectrum
                .levels
                .iter()
                .map(|(e, m)| json!({"energy": e, "multiplicity": m.to_string()}))
                .collect();
            reports.push(json!({
                "index": i,
                "structure": s.summary(),
                "ground_energy": ground,
                "sectors": sectors,
                "spectrum": levels,
            }));
        }
        if frags.len() > 1 {
            let _ = writeln!(text, "sum of fragment ground energies: {total_ground:.12}");
        }
        Ok(Report {
            json: json!({
                "run": {"command": "solve-fragment", "input_digest": digest, "fragment": only, "force": force},
                "fragments": reports,
            }),
            text,
            passed: None,
        })
    }

    pub fn verify_partition(
        &self,
        input: &Path,
        method: Method,
        sweeps: Option<usize>,
        dense: bool,
    ) -> Result<Report> {
        let h = load_qubit(input)?;
        let sweeps = self.sweeps(sweeps);
        let p = partition(&h, method, sweeps)?;
        let rep = verify_partition(&p, &h);
        let mut pass = rep.passed;
        let mut text = format!(
            "fragments: {}\nreassembly: {} (max discrepancy {:.3e})\ncriterion certificates: {}\ndisjoint: {}\n",
            p.len(),
            verdict(rep.sum_ok),
            rep.max_discrepancy,
            verdict(rep.fragments.iter().all(|f| f.criterion_ok)),
            rep.disjoint
        );
        let mut dense_json = Value::Null;
        if dense {
            let mut checks = Vec::new();
            for (i, f) in p.fragments.iter().enumerate() {
                let c = check_nc_fragment(f, &self.limits)?;
                let _ = writeln!(
                    text,
                    "fragment {i}: spectrum error {:.2e}, off-diagonal {:.2e} {}",
                    c.spectrum_max_error,
                    c.off_diagonal_norm,
                    verdict(c.passed)
                );
                pass &= c.passed;
                checks.push(c);
            }
            let full = pauli_to_dense(&h, &self.limits)?.eigenvalues();
            let re = pauli_to_dense(&p.reassemble()?, &self.limits)?.eigenvalues();
            let gap = (full[0] - re[0]).abs();
            let ok = gap < 1e-10;
            pass &= ok;
            let _ = writeln!(text, "reassembled ground energy {:.12} vs {:.12} {}", re[0], full[0], verdict(ok));
            dense_json = json!({"fragments": checks, "ground": full[0], "reassembled_ground": re[0]});
        }
        let _ = writeln!(text, "{}", verdict(pass));
        Ok(Report {
            json: json!({
                "run": {"command": "verify partition", "input_digest": p.source_hash, "method": method, "sweeps": sweeps, "dense": dense},
                "report": rep,
                "dense": dense_json,
                "passed": pass,
            }),
            text,
            passed: Some(pass),
        })
    }

    pub fn verify_fragment(&self, input: &Path, only: Option<usize>, dense: bool) -> Result<Report> {
        let (digest, frags) = load_fragments(input, only)?;
        let mut pass = true;
        let mut text = String::new();
        let mut out = Vec::new();
        for (i, f) in &frags {
            let s = factor_noncontextual(f).with_context(|| format!("fragment {i}"))?;
            let (diff, _) = s.expand()?.max_difference(f)?;
            let round_trip = diff < 1e-12;
            pass &= round_trip;
            let _ = write!(text, "fragment {i}: K {} L {} round trip {diff:.2e}", s.k(), s.l());
            let mut entry = json!({"index": i, "k": s.k(), "l": s.l(), "round_trip_error": diff});
            if dense {
                let c = check_nc_fragment(f, &self.limits)?;
                let _ = write!(
                    text,
                    ", spectrum error {:.2e}, off-diagonal {:.2e}",
                    c.spectrum_max_error, c.off_diagonal_norm
                );
                pass &= c.passed;
                entry["dense"] = serde_json::to_value(&c)?;
            }
            let _ = writeln!(text);
            out.push(entry);
        }
        let _ = writeln!(text, "{}", verdict(pass));
        Ok(Report {
            json: json!({
                "run": {"command": "verify fragment", "input_digest": digest, "fragment": only, "dense": dense},
                "fragments": out,
                "passed": pass,
            }),
            text,
            passed: Some(pass),
        })
    }

    pub fn verify_block_exp(&self, trials: usize, dim: usize, seed: Option<u64>) -> Result<Report> {
        if dim < 2 {
            bail!("--dim must be at least 2");
        }
        let seed = self.seed(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut block_ok, mut product_ok) = (0usize, 0usize);
        for t in 0..trials {
            let n_proj = 1 + t % 3.min(dim - 1);
            let (factors, ps) = random_construction(dim, n_proj, 1 + t % 3, t % 2 == 0, &mut rng);
            let xs: Vec<_> = factors.iter().map(|f| f[0].clone()).collect();
            block_ok += usize::from(check_block_identity(&xs, &ps)?);
            product_ok += usize::from(check_product_form(&factors, &ps)?);
        }
        let pass = block_ok == trials && product_ok == trials;
        Ok(Report {
            json: json!({
                "run": {"command": "verify appendix-a", "trials": trials, "dim": dim, "seed": seed},
                "block_identity_passed": block_ok,
                "product_form_passed": product_ok,
                "passed": pass,
            }),
            text: format!(
                "block identity: {block_ok}/{trials}\nproduct form: {product_ok}/{trials}\n{}\n",
                verdict(pass)
            ),
            passed: Some(pass),
        })
    }

    pub fn verify_measure(
        &self,
        input: &Path,
        method: Method,
        shots: usize,
        seed: Option<u64>,
        state: StateChoice,
    ) -> Result<Report> {
        let h = load_qubit(input)?;
        let seed = self.seed(seed);
        let p = partition(&h, method, self.sweeps(None))?;
        let hd = pauli_to_dense(&h, &self.limits)?;
        let psi = match state {
            StateChoice::Ground => StateVector::new(h.n_qubits(), hd.ground_state().1)?,
            StateChoice::Random => StateVector::random(h.n_qubits(), seed),
        };
        let mut pass = true;
        let mut total = 0.0;
        let mut text = String::new();
        let mut rows = Vec::new();
        for (i, f) in p.fragments.iter().enumerate() {
            let s = factor_noncontextual(f)?;
            let d = conditioned_diagonalizer(&s)?;
            let exact = dynamic_measure(&d, &psi, 0, 0, MeasureMode::Exact, &self.limits)?;
            let sampled = dynamic_measure(&d, &psi, shots, seed.wrapping_add(i as u64), MeasureMode::Sampled, &self.limits)?;
            let want = psi.expectation(&pauli_to_dense(f, &self.limits)?);
            let exact_ok = (exact.estimate - want).abs() < 1e-10;
            let dev = (sampled.estimate - exact.estimate).abs();
            let sampled_ok = dev <= 5.0 * sampled.std_error + 1e-10;
            pass &= exact_ok && sampled_ok;
            total += exact.estimate;
            let _ = writeln!(
                text,
                "fragment {i}: exact {:.12} dense {:.12} sampled {:.6} ± {:.1e} {}",
                exact.estimate,
                want,
                sampled.estimate,
                sampled.std_error,
                verdict(exact_ok && sampled_ok)
            );
            rows.push(json!({
                "index": i,
                "exact": exact.estimate,
                "dense": want,
                "sampled": sampled.estimate,
                "std_error": sampled.std_error,
            }));
        }
        let full = psi.expectation(&hd);
        let sum_ok = (total - full).abs() < 1e-9;
        pass &= sum_ok;
        let _ = writeln!(text, "sum {total:.12} vs dense {full:.12} {}\n{}", verdict(sum_ok), verdict(pass));
        Ok(Report {
            json: json!({
                "run": {"command": "verify measure", "input_digest": p.source_hash, "method": method, "shots": shots, "seed": seed},
                "fragments": rows,
                "sum": total,
                "dense": full,
                "passed": pass,
            }),
            text,
            passed: Some(pass),
        })
    }

    pub fn verify_fpartition(&self, input: &Path, tensor: &Path) -> Result<Report> {
        let text = read_text(input).with_context(|| format!("reading {}", input.display()))?;
        let f = parse_fermion_fragments(&text).with_context(|| format!("parsing {}", input.display()))?;
        let t = load_fermion_tensor(tensor).with_context(|| format!("loading {}", tensor.display()))?;
        let digest = digest_tensor(&t.tensor, t.constant);
        let digest_ok = digest == f.source_hash;
        if t.tensor.n() != f.n_spin_orbitals {
            return Ok(Report {
                json: json!({
                    "run": {"command": "verify fpartition", "input_digest": digest},
                    "digest_matches": false,
                    "size_mismatch": [f.n_spin_orbitals, t.tensor.n()],
                    "passed": false,
                }),
                text: format!(
                    "fragments cover {} spin orbitals, tensor has {}\n{}\n",
                    f.n_spin_orbitals,
                    t.tensor.n(),
                    verdict(false)
                ),
                passed: Some(false),
            });
        }
        let rest = t.tensor.supermatrix() - f.reassembled()?.supermatrix();
        let residual = rest.norm_squared();
        let ok = digest_ok && residual < f.tol;
        Ok(Report {
            json: json!({
                "run": {"command": "verify fpartition", "input_digest": digest},
                "digest_matches": digest_ok,
                "residual": residual,
                "tol": f.tol,
                "passed": ok,
            }),
            text: format!(
                "digest matches: {digest_ok}\nresidual: {residual:.3e} (tol {:.1e})\n{}\n",
                f.tol,
                verdict(ok)
            ),
            passed: Some(ok),
        })
    }

    pub fn heisenberg(&self, a: &HeisenbergArgs) -> Result<Report> {
        let seed = self.seed(a.seed);
        let spec = HeisenbergSpec::random(a.n, seed);
        let h = heisenberg_model(&spec)?;
        if let Some(path) = &a.write_model {
            let mut metadata = Metadata::new();
            metadata.insert("model".into(), json!("heisenberg"));
            metadata.insert("n".into(), json!(a.n));
            metadata.insert("seed".into(), json!(seed));
            write_file(path, &write_qubit_hamiltonian(&QubitHamiltonianFile { metadata, hamiltonian: h.clone() }))?;
        }
        let p = partition(&h, a.method, a.sweeps)?;
        if let Some(out) = &a.output {
            write_file(out, &write_fragment_set(&FragmentSetFile::from(&p)))?;
        }
        let mut text = format!(
            "qubits: {}\nterms: {}\nmethod: {}\nfragments: {}\n",
            h.n_qubits(),
            h.len(),
            a.method,
            p.len()
        );
        for (i, f) in p.fragments.iter().enumerate() {
            let words: Vec<String> = f.words().map(|w| w.to_string()).collect();
            let _ = writeln!(text, "  {i}: {}", words.join(", "));
        }
        Ok(Report {
            json: json!({
                "run": {"command": "heisenberg", "input_digest": p.source_hash, "n": a.n, "seed": seed, "method": a.method, "sweeps": a.sweeps},
                "spec": spec,
                "terms": h.len(),
                "fragments": p.len(),
                "sizes": sizes(&p.fragments),
            }),
            text,
            passed: None,
        })
    }

    pub fn inspect(&self, input: &Path) -> Result<Report> {
        let text = read_text(input).with_context(|| format!("reading {}", input.display()))?;
        let ctx = || format!("parsing {}", input.display());
        let format = document_format(&text).with_context(ctx)?;
        let json = match format.as_str() {
            "qubit-hamiltonian" => {
                let f = parse_qubit_hamiltonian(&text).with_context(ctx)?;
                json!({
                    "format": format,
                    "n_qubits": f.hamiltonian.n_qubits(),
                    "terms": f.hamiltonian.len(),
                    "one_norm": f.hamiltonian.one_norm(),
                    "digest": digest_pauli_sum(&f.hamiltonian),
                    "metadata": f.metadata,
                })
            }
            "fermion-tensor" => {
                let f = solvfrag::io::parse_fermion_tensor(&text).with_context(ctx)?;
                json!({
                    "format": format,
                    "n_spin_orbitals": f.tensor.n(),
                    "h_norm": f.tensor.h().norm(),
                    "g_norm_sq": f.tensor.g_norm_sq(),
                    "constant": f.constant,
                    "digest": digest_tensor(&f.tensor, f.constant),
                    "metadata": f.metadata,
                })
            }
            "fragment-set" => {
                let f = parse_fragment_set(&text).with_context(ctx)?;
                json!({
                    "format": format,
                    "method": f.method,
                    "fragments": f.fragments.len(),
                    "sizes": sizes(&f.fragments),
                    "source_hash": f.source_hash,
                })
            }
            "fermion-fragment-set" => {
                let f = parse_fermion_fragments(&text).with_context(ctx)?;
                json!({
                    "format": format,
                    "method": f.method,
                    "two_body_fragments": f.fragments.len(),
                    "table_count": f.table_count,
                    "residual": f.residual_trace.last(),
                    "source_hash": f.source_hash,
                })
            }
            other => bail!("{}: unsupported format `{other}`", input.display()),
        };
        let mut out = String::new();
        if let Value::Object(m) = &json {
            for (k, v) in m {
                if k != "metadata" {
                    let _ = writeln!(out, "{k}: {v}");
                }
            }
            if let Some(Value::Object(meta)) = m.get("metadata") {
                for (k, v) in meta {
                    let _ = writeln!(out, "metadata.{k}: {v}");
                }
            }
        }
        Ok(Report {
            json,
            text: out,
            passed: None,
        })
    }
}
