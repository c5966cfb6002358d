#!/usr/bin/env python3
"""Out-of-band fixture generator.

Builds STO-3G molecular Hamiltonians with PySCF (RHF orbitals, interleaved
alpha/beta spin-orbital ordering, orbitals sorted by energy), then writes

  * <mol>_tensor.json : one/two-body tensors in the a+_p a_q a+_r a_s convention
  * <mol>_qubit.json  : the Bravyi-Kitaev qubit Hamiltonian (H4 excluded)

The toolkit itself never computes integrals; rerun this script only to
regenerate the committed data under fixtures/.

    python3 tools/fixtures/generate.py fixtures/
"""
import json
import math
import sys

import numpy as np
from pyscf import ao2mo, fci, gto, scf

PRUNE = 1e-8


def geometries():
    nh = math.radians(107.0)
    sin_beta = math.sqrt((1.0 - math.cos(nh)) / 1.5)
    cos_beta = math.sqrt(1.0 - sin_beta ** 2)
    nh3 = "N 0 0 0; " + "; ".join(
        "H {:.12f} {:.12f} {:.12f}".format(
            sin_beta * math.cos(2 * math.pi * k / 3),
            sin_beta * math.sin(2 * math.pi * k / 3),
            -cos_beta,
        )
        for k in range(3)
    )
    half = math.radians(107.6 / 2.0)
    h2o = "O 0 0 0; H {s:.12f} 0 {c:.12f}; H {ms:.12f} 0 {c:.12f}".format(
        s=math.sin(half), ms=-math.sin(half), c=math.cos(half)
    )
    return [
        ("H2", "H 0 0 0; H 0 0 1", "R(H-H) = 1 Å", True),
        ("H4", "H 0 0 0; H 0 0 1; H 0 0 2; H 0 0 3",
         "R(H-H) = 1 Å with colinear atomic arrangement", False),
        ("LiH", "Li 0 0 0; H 0 0 1", "R(Li-H) = 1 Å", True),
        ("BeH2", "H 0 0 -1; Be 0 0 0; H 0 0 1",
         "R(Be-H) = 1 Å with colinear atomic arrangement", True),
        ("H2O", h2o, "R(O-H) = 1 Å with angle HOH = 107.6°", True),
        ("NH3", nh3, "R(N-H) = 1 Å with angle HNH = 107°", True),
    ]


def spin_orbital_tensors(mol):
    mf = scf.RHF(mol).run(verbose=0)
    c = mf.mo_coeff
    n = c.shape[1]
    h1 = c.T @ mf.get_hcore() @ c
    eri = ao2mo.restore(1, ao2mo.kernel(mol, c), n)
    big = 2 * n
    h = np.zeros((big, big))
    g = np.zeros((big, big, big, big))
    for s in range(2):
        h[s::2, s::2] = h1
        for t in range(2):
            g[s::2, s::2, t::2, t::2] = 0.5 * eri
    # a+_p a+_r a_s a_q = a+_p a_q a+_r a_s - delta_qr a+_p a_s
    h = h - np.einsum("pqqs->ps", g)
    e_fci = fci.FCI(mf).kernel()[0]
    return h, g, mol.energy_nuc(), mf.e_tot, e_fci


# ---- Pauli algebra on (x, z) integer bitmasks; word(x,z) = prod i^{x z} X^x Z^z
def popcount(v):
    return bin(v).count("1")


def word_mul(a, b):
    (x1, z1), (x2, z2) = a, b
    x, z = x1 ^ x2, z1 ^ z2
    k = popcount(x1 & z1) + popcount(x2 & z2) + 2 * popcount(z1 & x2) - popcount(x & z)
    return (1j) ** (k % 4), (x, z)


def sum_mul(a, b):
    out = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            ph, w = word_mul(wa, wb)
            out[w] = out.get(w, 0) + ph * ca * cb
    return out


def gf2_inverse(m):
    n = m.shape[0]
    aug = np.concatenate([m.copy() % 2, np.eye(n, dtype=int)], axis=1)
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r, col])
        aug[[col, piv]] = aug[[piv, col]]
        for r in range(n):
            if r != col and aug[r, col]:
                aug[r] ^= aug[col]
    return aug[:, n:]


def bk_ladder(n):
    """Return (creation, annihilation) lists of Pauli sums for the BK encoding."""
    beta = np.zeros((n, n), dtype=int)
    for i in range(n):
        for j in range((i & (i + 1)), i + 1):
            beta[i, j] = 1
    inv = gf2_inverse(beta)

    def mask(bits):
        return sum(1 << q for q in range(n) if bits[q])

    create, annihilate = [], []
    for j in range(n):
        col = mask(beta[:, j])
        prefix = inv[:j].sum(axis=0) % 2 if j else np.zeros(n, dtype=int)
        par = mask(prefix)
        par2 = mask((prefix + inv[j]) % 2)
        # c_j = X^col Z^par, d_j = i X^col Z^par2 (as matrix products)
        c = {(col, par): (1j) ** (-popcount(col & par) % 4)}
        d = {(col, par2): 1j * (1j) ** (-popcount(col & par2) % 4)}
        create.append({w: 0.5 * v for w, v in c.items()} | {w: -0.5j * v for w, v in d.items()})
        annihilate.append({w: 0.5 * v for w, v in c.items()} | {w: 0.5j * v for w, v in d.items()})
    return create, annihilate


def qubit_hamiltonian(h, g, const):
    n = h.shape[0]
    cr, an = bk_ladder(n)
    ex = [[sum_mul(cr[p], an[q]) for q in range(n)] for p in range(n)]
    total = {(0, 0): complex(const)}

    def acc(src, coef):
        for w, v in src.items():
            total[w] = total.get(w, 0) + coef * v

    for p in range(n):
        for q in range(n):
            if abs(h[p, q]) > 0:
                acc(ex[p][q], h[p, q])
    idx = np.argwhere(np.abs(g) > 1e-14)
    for p, q, r, s in idx:
        acc(sum_mul(ex[p][q], ex[r][s]), g[p, q, r, s])
    out = {}
    for w, v in total.items():
        if abs(v.imag) > 1e-10:
            raise RuntimeError("non-Hermitian term {} {}".format(w, v))
        if abs(v.real) > PRUNE:
            out[w] = v.real
    return out


def word_text(w, n):
    x, z = w
    toks = []
    for q in range(n):
        bx, bz = (x >> q) & 1, (z >> q) & 1
        if bx or bz:
            toks.append(("Y" if bx and bz else "X" if bx else "Z") + str(q))
    return " ".join(toks)


def dense(pauli, n):
    mats = {"I": np.eye(2), "X": np.array([[0, 1], [1, 0]]),
            "Y": np.array([[0, -1j], [1j, 0]]), "Z": np.diag([1, -1])}
    out = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for w, c in pauli.items():
        letters = ["I"] * n
        for tok in word_text(w, n).split():
            letters[int(tok[1:])] = tok[0]
        m = np.array([[1.0]])
        for q in reversed(range(n)):  # qubit 0 least significant
            m = np.kron(m, mats[letters[q]])
        out += c * m
    return out


def main(outdir):
    for name, atoms, geom, qubit in geometries():
        mol = gto.M(atom=atoms, basis="sto-3g", unit="Angstrom", verbose=0)
        h, g, enuc, ehf, efci = spin_orbital_tensors(mol)
        n = h.shape[0]
        meta = {
            "molecule": name,
            "geometry": geom,
            "basis": "sto-3g",
            "orbital_order": "energy ascending, interleaved alpha/beta",
            "nuclear_repulsion": enuc,
            "hf_energy": ehf,
            "fci_energy": efci,
            "source": "pyscf RHF; tools/fixtures/generate.py",
        }
        with open("{}/{}_tensor.json".format(outdir, name.lower()), "w") as f:
            json.dump({"format": "fermion-tensor", "version": 1,
                       "n_spin_orbitals": n, "constant": enuc,
                       "metadata": meta, "h": h.tolist(), "g": g.tolist()}, f)
        if not qubit:
            print(name, n, "tensor only")
            continue
        ham = qubit_hamiltonian(h, g, enuc)
        if n <= 8:
            e0 = np.linalg.eigvalsh(dense(ham, n))[0]
            assert abs(e0 - efci) < 1e-8, (e0, efci)
        terms = [{"coefficient": c, "pauli": word_text(w, n)}
                 for w, c in sorted(ham.items(), key=lambda kv: (kv[0][1], kv[0][0]))]
        qmeta = dict(meta, encoding="bravyi-kitaev")
        with open("{}/{}_qubit.json".format(outdir, name.lower()), "w") as f:
            json.dump({"format": "qubit-hamiltonian", "version": 1,
                       "n_qubits": n, "metadata": qmeta, "terms": terms}, f)
        print(name, n, len(terms), "terms", "fci", efci)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "fixtures")
