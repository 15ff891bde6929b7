"""Acceptance gate: the nine primary criteria at their stated tolerances.

Each test prints one ``ACCEPTANCE <k> <name>: PASS|FAIL`` line (visible
even without ``-s``) before asserting.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from quditmbqc.circuit import CP, CX, CZ, SWAP, GateCircuit, U, X, Z
from quditmbqc.dense_sim import (
    StateVector,
    apply_circuit,
    circuit_unitary,
    clock_matrix,
    fidelity_up_to_phase,
    gate_matrix,
    matrices_equal_up_to_phase,
    random_state,
    shift_matrix,
    uc_matrix,
)
from quditmbqc.mbqc_compiler import (
    adaptive_depth,
    compile_circuit,
    corrected_distribution,
    enumerate_pattern,
    is_clifford_uc,
)
from quditmbqc.qudit_algebra import PauliWord, modulus
from quditmbqc.synthesis import derived_gate, sl2_decompose, synthesize_clifford
from quditmbqc.tableau import circuit_to_tableau, random_symplectic, tableau_from_unitary
from quditmbqc.teleport import cz_branch_state, teleport_cz, teleport_uc
from quditmbqc.universality import (
    diag_from_uc,
    hermitian_basis,
    mub_bases,
    numerical_rank,
    rotation_gate,
    rotation_matrix,
)
from quditmbqc.vbs_cluster import Lattice, build_vbs, project_sites, project_vbs_to_cluster

TOL = 1e-9
SEED = 20240611


@pytest.fixture
def report(capsys):
    def emit(k: int, name: str, ok: bool, detail: str = "") -> None:
        with capsys.disabled():
            print(f"\nACCEPTANCE {k} {name}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else ""))
        assert ok, f"criterion {k} failed: {detail}"

    return emit


def random_c(d, rng):
    return tuple(np.exp(2j * np.pi * rng.random(d)))


def test_1_clifford_round_trip(report):
    rng = np.random.default_rng(SEED)
    exact = total = 0
    dense_ok = dense_total = 0
    for d, n in [(3, 1), (3, 2), (5, 1), (5, 2), (3, 3)]:
        for i in range(200):
            target = random_symplectic(d, n, rng)
            circ = synthesize_clifford(target)
            exact += circuit_to_tableau(circ) == target
            total += 1
            if (d, n) == (3, 2) and i < 20:
                # images of Z1, X1, Z2, X2 must be clean w-powers times the target words
                got = tableau_from_unitary(circuit_unitary(circ), d, n, tol=TOL)
                dense_ok += got is not None and got[0] == target
                dense_total += 1
    ok = exact == total == 1000 and dense_ok == dense_total == 20
    report(1, "Clifford synthesis round trip", ok, f"{exact}/{total} exact, {dense_ok}/{dense_total} dense")


def test_2_sl2_completeness(report):
    counts = {}
    good = True
    for d in (3, 5):
        counts[d] = 0
        for a, b, c, e in itertools.product(range(d), repeat=4):
            if (a * e - b * c) % d != 1:
                continue
            m = np.array([[a, b], [c, e]])
            circ = sl2_decompose(m, d)
            good &= circ.kinds() <= {"F", "S"}
            good &= bool(np.array_equal(circuit_to_tableau(circ).matrix, m))
            counts[d] += 1
    ok = good and counts == {3: 24, 5: 120}
    report(2, "SL(2,Z_d) completeness", ok, f"{counts[3]} elements at d=3, {counts[5]} at d=5")


def test_3_derived_gates(report):
    checked = failed = 0

    def check(circ, target):
        nonlocal checked, failed
        checked += 1
        failed += not matrices_equal_up_to_phase(circuit_unitary(circ), target, TOL)

    for d in (3, 5):
        check(derived_gate("Z", d), gate_matrix(Z(0), d))
        check(derived_gate("X", d), gate_matrix(X(0), d))
        check(derived_gate("CZ", d), gate_matrix(CZ(0, 1), d))
        check(derived_gate("SWAP", d), gate_matrix(SWAP(0, 1), d))
        for s, t in itertools.product(range(d), repeat=2):
            # oracle: sum_a |a><a| (x) (X^s Z^t)^a
            p = shift_matrix(d, s) @ clock_matrix(d, t)
            target = np.zeros((d * d, d * d), dtype=complex)
            for a in range(d):
                target[a * d:(a + 1) * d, a * d:(a + 1) * d] = np.linalg.matrix_power(p, a)
            check(derived_gate("CP", d, s, t), target)
        # the library CX itself against its definition
        check(GateCircuit(d, 2, [CX(0, 1)]), gate_matrix(CP(1, 0, 0, 1), d))
    report(3, "Derived-gate identities", failed == 0, f"{checked - failed}/{checked} identities")


def test_4_vbs_projection(report):
    fids = {}
    for name, lat in [
        ("chain2", Lattice.chain(2)),
        ("chain3", Lattice.chain(3)),
        ("chain4", Lattice.chain(4)),
        ("grid2x2", Lattice.grid(2, 2)),
        ("plus", Lattice.plus()),
    ]:
        fids[name] = project_vbs_to_cluster(lat, 3)[1]
    vbs = build_vbs(Lattice.plus(), 3)
    seq_gap = float(np.max(np.abs(project_sites(vbs).amps - project_sites(vbs, sequential=True).amps)))
    worst = max(abs(f - 1) for f in fids.values())
    ok = worst < TOL and seq_gap < TOL
    report(4, "VBS projection to cluster", ok, f"max |F-1| {worst:.1e}, sequential gap {seq_gap:.1e}")


def test_5_uc_teleportation(report):
    rng = np.random.default_rng(SEED)
    worst_fid = worst_p = 0.0
    count = 0
    for d in (3, 5):
        for _ in range(20):
            psi, c = random_state(d, 1, rng), random_c(d, rng)
            for s, t in itertools.product(range(d), repeat=2):
                (b,) = teleport_uc(psi, c, mode="force", outcome=(s, t))
                expect = StateVector(d, 1, clock_matrix(d, -t) @ shift_matrix(d, -s) @ uc_matrix(c) @ psi.amps)
                worst_fid = max(worst_fid, abs(fidelity_up_to_phase(b.state, expect) - 1))
                worst_p = max(worst_p, abs(b.probability - 1 / d**2))
                count += 1
    ok = worst_fid < TOL and worst_p < TOL and count == 20 * (9 + 25)
    report(5, "U(c) teleportation", ok, f"{count} branches, max |F-1| {worst_fid:.1e}, max |p-1/d^2| {worst_p:.1e}")


def test_6_cz_teleport_branches(report):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    count = 0
    for _ in range(5):
        psi1, psi2 = random_state(3, 1, rng), random_state(3, 1, rng)
        for b in teleport_cz(psi1, psi2):
            worst = max(worst, abs(fidelity_up_to_phase(b.state, cz_branch_state(psi1, psi2, b.outcome)) - 1))
            count += 1
    ok = worst < TOL and count == 5 * 729
    report(6, "CZ teleportation on all branches", ok, f"{count} branches, max |F-1| {worst:.1e}")


def random_uc_cz_circuit(d, rng):
    n = int(rng.integers(1, 3))
    circ = GateCircuit(d, n)
    for _ in range(int(rng.integers(1, 6))):
        if n == 2 and rng.random() < 0.4:
            circ.append(CZ(0, 1))
        else:
            circ.append(U(int(rng.integers(n)), random_c(d, rng)))
    return circ


def test_7_compiler_contract(report):
    rng = np.random.default_rng(SEED)
    d = 3
    worst_fid = worst_dist = 0.0
    strings_ok = True
    for _ in range(50):
        circ = random_uc_cz_circuit(d, rng)
        psi = random_state(d, circ.n, rng)
        pat = compile_circuit(circ)
        ideal = apply_circuit(psi, circ)
        ideal_dist = np.abs(ideal.amps) ** 2
        results = enumerate_pattern(pat, psi)
        strings_ok &= sum(r.multiplicity for r in results) == d ** len(pat)
        strings_ok &= abs(sum(r.probability for r in results) - 1) < TOL
        for r in results:
            worst_fid = max(worst_fid, abs(fidelity_up_to_phase(r.corrected(), ideal) - 1))
            worst_dist = max(worst_dist, float(np.max(np.abs(corrected_distribution(r) - ideal_dist))))
    ok = strings_ok and worst_fid < TOL and worst_dist < TOL
    report(7, "Compiler contract", ok, f"max |F-1| {worst_fid:.1e}, max distribution gap {worst_dist:.1e}")


def random_clifford_c(d, rng):
    """``F diag(c)`` is Clifford for quadratic phases ``c_j = e^{i phi} w^{a j^2 / 2 + b j}``."""
    m = modulus(d)
    a, b = rng.integers(0, d, 2)
    j = np.arange(d)
    expo = (a * m.inv(2) * j * j + b * j) % d
    return tuple(np.exp(2j * np.pi * rng.random()) * m.omega**expo)


def test_8_clifford_depth(report):
    rng = np.random.default_rng(SEED)
    d = 3
    depths, appended = [], []
    for _ in range(20):
        n = int(rng.integers(1, 3))
        circ = GateCircuit(d, n)
        for _ in range(int(rng.integers(1, 11))):
            if n == 2 and rng.random() < 0.3:
                circ.append(CZ(0, 1))
            else:
                c = random_clifford_c(d, rng)
                assert is_clifford_uc(c, d)
                circ.append(U(int(rng.integers(n)), c))
        depths.append(adaptive_depth(compile_circuit(circ, fold_clifford=True)))
        # the non-Clifford gate goes on a wire that already carries sites
        circ.append(U(circ.atoms[-1].wires[0], random_c(d, rng)))
        appended.append(adaptive_depth(compile_circuit(circ, fold_clifford=True)))
    ok = set(depths) == {1} and set(appended) == {2}
    report(8, "Depth-1 Clifford claim", ok, f"depths {sorted(set(depths))}, after append {sorted(set(appended))}")


def test_9_universality(report):
    rng = np.random.default_rng(SEED)
    cross, ranks, diag_ok, rot_ok = 0.0, {}, True, True
    for d in (3, 5, 7):
        mubs = mub_bases(d)
        cross = max(cross, mubs.max_cross_deviation(), mubs.max_orthonormal_deviation())
        ranks[d] = numerical_rank(hermitian_basis(mubs))
        for _ in range(5):
            c = random_c(d, rng)
            diag_ok &= matrices_equal_up_to_phase(circuit_unitary(diag_from_uc(c)), np.diag(c), TOL)
        for a, b in itertools.product(range(d), repeat=2):
            if not (a or b):
                continue
            p = PauliWord(d, int(rng.integers(d)), (a, b))
            j, theta = int(rng.integers(d)), float(rng.uniform(-np.pi, np.pi))
            rot_ok &= matrices_equal_up_to_phase(circuit_unitary(rotation_gate(p, j, theta)), rotation_matrix(p, j, theta), TOL)
    ok = cross < TOL and ranks == {3: 9, 5: 25, 7: 49} and diag_ok and rot_ok
    report(9, "Universality certificates", ok, f"max overlap deviation {cross:.1e}, ranks {ranks}")
