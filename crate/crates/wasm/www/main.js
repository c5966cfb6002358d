import init, { partition_hamiltonian, solve_noncontextual, heisenberg_chain } from "./pkg/solvfrag_wasm.js";

const $ = (id) => document.getElementById(id);

function show(id, f) {
  const out = $(id);
  out.classList.remove("err");
  try {
    out.textContent = f();
  } catch (e) {
    out.classList.add("err");
    out.textContent = String(e.message ?? e);
  }
}

function listFragments(frags) {
  return frags
    .map((f, i) => `${i}: ` + f.map(([w, c]) => `${c.toFixed(4)} ${w}`).join(", "))
    .join("\n");
}

await init();

$("run-partition").onclick = () =>
  show("out-partition", () => {
    const r = JSON.parse(partition_hamiltonian($("ham").value, $("method").value, +$("sweeps").value));
    const counts = Object.entries(r.counts).map(([m, k]) => `${m.toUpperCase()} ${k}`).join("  ");
    return `${r.terms} terms on ${r.n_qubits} qubits\n${counts}\n\n${r.method} fragments\n${listFragments(r.fragments)}`;
  });

$("run-solve").onclick = () =>
  show("out-partition", () => {
    const r = JSON.parse(solve_noncontextual($("ham").value));
    const s = r.structure;
    const levels = r.levels.map(([e, m]) => `${e.toFixed(10)}  x${m}`).join("\n");
    return `K = ${s.k}, L = ${s.l}\nground energy ${r.ground_energy.toFixed(12)}\n\nlevels\n${levels}`;
  });

$("run-heis").onclick = () =>
  show("out-heis", () => {
    const r = JSON.parse(heisenberg_chain(+$("hn").value, +$("hseed").value, +$("hsweeps").value));
    return `${r.terms} terms on ${r.n_qubits} qubits\n\nFC: ${r.fc.length} groups\n${listFragments(r.fc)}\n\nNC: ${r.nc.length} groups\n${listFragments(r.nc)}`;
  });
