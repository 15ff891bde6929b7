from __future__ import annotations

import itertools

import numpy as np
import pytest

from quditmbqc.circuit import CZ, F, GateCircuit, U
from quditmbqc.dense_sim import (
    StateVector,
    apply_circuit,
    fidelity_up_to_phase,
    random_state,
    s_diagonal,
    uc_matrix,
)
from quditmbqc.errors import DimensionError, ParseError
from quditmbqc.mbqc_compiler import (
    Entangle,
    LinearForm,
    MeasurementPattern,
    PauliFrame,
    Site,
    adaptive_depth,
    compile_circuit,
    corrected_distribution,
    enumerate_pattern,
    execute_pattern,
    format_pattern,
    is_clifford_uc,
    output_correction,
    parse_pattern,
    site_depths,
)

W3 = np.exp(2j * np.pi / 3)
ONES3 = (1.0,) * 3


def random_c(d, rng):
    return tuple(np.exp(2j * np.pi * rng.random(d)))


def clifford_cs(d):
    """A few phase vectors whose U(c) is Clifford."""
    w = np.exp(2j * np.pi / d)
    j = np.arange(d)
    return [
        tuple(np.ones(d)),
        tuple(w ** (j * (j + 1) // 2)),
        tuple(s_diagonal(d)),
        tuple(w**j),
        tuple(w ** (2 * j * j % d)),
    ]


def random_circuit(d, n, length, rng, clifford=False):
    circ = GateCircuit(d, n)
    pool = clifford_cs(d)
    for _ in range(length):
        if n > 1 and rng.random() < 0.35:
            a, b = rng.choice(n, 2, replace=False)
            circ.append(CZ(int(a), int(b)))
        else:
            c = pool[rng.integers(len(pool))] if clifford else random_c(d, rng)
            circ.append(U(int(rng.integers(n)), c))
    return circ


def assert_contract(circ, psi, results):
    ideal = apply_circuit(psi, circ)
    assert sum(r.probability for r in results) == pytest.approx(1, abs=1e-9)
    for r in results:
        assert fidelity_up_to_phase(r.corrected(), ideal) == pytest.approx(1, abs=1e-9)


# -- linear forms and frames

def test_linear_form_arithmetic():
    a, b = LinearForm.var(3, 1), LinearForm.var(3, 2)
    e = a - 2 * b + a
    assert e.support == (1, 2)
    assert e.evaluate({1: 1, 2: 1}) == 0
    assert (e - e).support == ()
    assert (-a).evaluate({1: 1}) == 2


def test_pauli_frame_correct(rng):
    psi = random_state(3, 2, rng)
    frame = PauliFrame(3, (1, 2), (2, 0))
    assert str(frame) == "w1:Z^1X^2 w2:Z^2X^0"
    assert PauliFrame.identity(3, 2).is_identity
    assert fidelity_up_to_phase(PauliFrame.identity(3, 2).correct(psi), psi) == pytest.approx(1)


# -- compile

def test_compile_single_uc(rng):
    c = random_c(3, rng)
    pat = compile_circuit(GateCircuit(3, 1, [U(0, c)]))
    (site,) = pat.sites
    assert site.basis == "Bprime" and site.deps == () and site.shiftrule == "xframe"


def test_compile_single_cz():
    pat = compile_circuit(GateCircuit(3, 2, [CZ(0, 1)]))
    kinds = [s.basis for s in pat.sites]
    assert kinds.count("X") == 2 and kinds.count("Bprime") == 6
    assert all(np.allclose(s.c, 1) for s in pat.sites if s.basis == "Bprime")
    assert isinstance(pat.commands[0], Entangle)
    # both X sites precede the fix-ups, lower wire first
    assert [s.wire for s in pat.sites] == [0, 1, 0, 0, 0, 1, 1, 1]


def test_compile_empty():
    pat = compile_circuit(GateCircuit(3, 2))
    assert len(pat) == 0 and adaptive_depth(pat) == 0


def test_compile_rejects_other_atoms():
    with pytest.raises(ValueError):
        compile_circuit(GateCircuit(3, 1, [F(0)]))


def test_fold_keeps_bases(rng):
    circ = random_circuit(3, 2, 5, rng, clifford=True)
    plain, folded = compile_circuit(circ), compile_circuit(circ, fold_clifford=True)
    assert [(s.id, s.wire, s.basis) for s in plain.sites] == [(s.id, s.wire, s.basis) for s in folded.sites]
    for a, b in zip(plain.sites, folded.sites):
        assert a.c == b.c


def test_pattern_validation():
    with pytest.raises(ValueError):
        MeasurementPattern(3, 1, [Site(1, 0, "Bprime", ONES3, deps=(2,))])
    with pytest.raises(ValueError):
        MeasurementPattern(3, 1, [Site(1, 0, "X"), Site(1, 0, "X")])
    with pytest.raises(DimensionError):
        MeasurementPattern(3, 1, [Site(1, 1, "X")])
    with pytest.raises(DimensionError):
        MeasurementPattern(3, 1, [Site(1, 0, "Bprime", (1, 1))])
    with pytest.raises(ValueError):
        Site(1, 0, "Y")
    with pytest.raises(ValueError):
        Site(1, 0, "X", shiftrule="xframe")


# -- execution

def test_single_uc_forced_zero(rng):
    psi, c = random_state(3, 1, rng), random_c(3, rng)
    pat = compile_circuit(GateCircuit(3, 1, [U(0, c)]))
    res = execute_pattern(pat, psi, outcomes=[0])
    assert res.frame.is_identity
    assert fidelity_up_to_phase(res.state, StateVector(3, 1, uc_matrix(c) @ psi.amps)) == pytest.approx(1, abs=1e-9)


def test_single_uc_enumerated(rng):
    psi, c = random_state(3, 1, rng), random_c(3, rng)
    circ = GateCircuit(3, 1, [U(0, c)])
    results = enumerate_pattern(compile_circuit(circ), psi, merge=False)
    assert len(results) == 3
    for r in results:
        assert r.probability == pytest.approx(1 / 3)
    assert_contract(circ, psi, results)


def test_single_cz_enumerated(rng):
    psi = random_state(3, 2, rng)
    circ = GateCircuit(3, 2, [CZ(0, 1)])
    assert_contract(circ, psi, enumerate_pattern(compile_circuit(circ), psi, merge=False))


def test_execute_outcome_errors(rng):
    pat = compile_circuit(GateCircuit(3, 1, [U(0, ONES3)]))
    with pytest.raises(ValueError):
        execute_pattern(pat, random_state(3, 1, rng), outcomes=[0, 1])
    with pytest.raises(DimensionError):
        execute_pattern(pat, random_state(3, 2, rng), outcomes=[0])


@pytest.mark.parametrize("fold", [False, True])
def test_random_circuits_contract(fold, rng):
    for _ in range(8):
        n = int(rng.integers(1, 3))
        circ = random_circuit(3, n, int(rng.integers(1, 6)), rng, clifford=rng.random() < 0.5)
        psi = random_state(3, n, rng)
        results = enumerate_pattern(compile_circuit(circ, fold_clifford=fold), psi)
        assert sum(r.multiplicity for r in results) == 3 ** len(compile_circuit(circ))
        assert_contract(circ, psi, results)


def test_merged_matches_unmerged(rng):
    circ = GateCircuit(3, 2, [U(0, random_c(3, rng)), CZ(0, 1)])
    psi = random_state(3, 2, rng)
    pat = compile_circuit(circ)
    full = enumerate_pattern(pat, psi, merge=False)
    merged = enumerate_pattern(pat, psi)
    assert len(full) == 3**9 and sum(r.multiplicity for r in merged) == 3**9
    assert_contract(circ, psi, merged)


def test_sampled_runs_seeded(rng):
    circ = random_circuit(3, 2, 4, rng)
    psi = random_state(3, 2, rng)
    pat = compile_circuit(circ)
    a = execute_pattern(pat, psi, seed=11)
    b = execute_pattern(pat, psi, seed=11)
    assert a.outcomes == b.outcomes
    assert fidelity_up_to_phase(a.corrected(), apply_circuit(psi, circ)) == pytest.approx(1, abs=1e-9)


def test_forced_by_id(rng):
    circ = GateCircuit(3, 1, [U(0, random_c(3, rng)), U(0, random_c(3, rng))])
    pat = compile_circuit(circ)
    psi = random_state(3, 1, rng)
    for s1, s2 in itertools.product(range(3), repeat=2):
        res = execute_pattern(pat, psi, outcomes={1: s1, 2: s2})
        assert fidelity_up_to_phase(res.corrected(), apply_circuit(psi, circ)) == pytest.approx(1, abs=1e-9)


# -- output correction

def test_output_correction_examples():
    assert output_correction(2, 0) == 2
    assert output_correction(1, 2, d=3) == 2


def test_corrected_distribution_branch_independent(rng):
    circ = random_circuit(3, 2, 4, rng)
    psi = random_state(3, 2, rng)
    ideal = np.abs(apply_circuit(psi, circ).amps) ** 2
    for r in enumerate_pattern(compile_circuit(circ), psi):
        np.testing.assert_allclose(corrected_distribution(r), ideal, atol=1e-9)


# -- Clifford detection and depth

def test_is_clifford_examples():
    assert is_clifford_uc(ONES3, 3)
    j = np.arange(3)
    assert is_clifford_uc(tuple(W3 ** (j * (j + 1) // 2)), 3)
    assert not is_clifford_uc((1, np.exp(0.7j), 1), 3)
    with pytest.raises(DimensionError):
        is_clifford_uc(ONES3, 5)


@pytest.mark.parametrize("d", [3, 5])
def test_clifford_pool_is_clifford(d):
    assert all(is_clifford_uc(c, d) for c in clifford_cs(d))


def test_depth_examples(rng):
    circ = random_circuit(3, 2, 10, rng, clifford=True)
    assert adaptive_depth(compile_circuit(circ, fold_clifford=True)) == 1
    two = GateCircuit(3, 1, [U(0, random_c(3, rng)), U(0, random_c(3, rng))])
    pat = compile_circuit(two)
    assert adaptive_depth(pat) == 2
    assert site_depths(pat) == {1: 1, 2: 2}


def test_depth_rule(rng):
    for _ in range(10):
        circ = random_circuit(3, 2, int(rng.integers(1, 8)), rng, clifford=True)
        assert adaptive_depth(compile_circuit(circ, fold_clifford=True)) == 1
        circ.append(U(int(rng.integers(2)), random_c(3, rng)))
        if len(compile_circuit(circ)) > 1:
            assert adaptive_depth(compile_circuit(circ, fold_clifford=True)) == 2


def test_unfolded_clifford_is_adaptive():
    circ = GateCircuit(3, 1, [U(0, ONES3)] * 3)
    assert adaptive_depth(compile_circuit(circ)) > 1


# -- file format

def test_pattern_round_trip(rng):
    circ = random_circuit(3, 2, 5, rng)
    pat = compile_circuit(circ)
    back = parse_pattern(format_pattern(pat))
    assert [(s.id, s.wire, s.basis, s.deps, s.shiftrule) for s in back.sites] == [
        (s.id, s.wire, s.basis, s.deps, s.shiftrule) for s in pat.sites
    ]
    for a, b in zip(pat.sites, back.sites):
        assert (a.c is None and b.c is None) or np.allclose(a.c, b.c, atol=1e-12)
    assert [type(c) for c in back.commands] == [type(c) for c in pat.commands]
    psi = random_state(3, 2, rng)
    res = execute_pattern(back, psi, seed=3)
    assert fidelity_up_to_phase(res.corrected(), apply_circuit(psi, circ)) > 1 - 1e-6


def test_pattern_text_example():
    text = (
        "d 3\nn 1\n"
        "site 1 wire 1 basis Bprime c=0,0,0 deps - shiftrule xframe\n"
        "site 2 wire 1 basis Bprime c=0,1/3,0 deps 1 shiftrule xframe\n"
        "correct wire 1 sub xframe\n"
    )
    pat = parse_pattern(text)
    assert len(pat) == 2 and pat.sites[1].deps == (1,)
    assert np.allclose(pat.sites[1].c, (1, W3, 1))
    assert format_pattern(pat) == text


@pytest.mark.parametrize(
    "text",
    [
        "n 1\n",
        "d 3\nn 1\nsite 1 wire 1 basis Bprime c=0,0 deps - shiftrule xframe\n",
        "d 3\nn 1\nsite 1 wire 2 basis X c=- deps - shiftrule none\n",
        "d 3\nn 1\nsite 1 wire 1 basis Bprime c=0,0,0 deps 4 shiftrule xframe\n",
        "d 3\nn 1\nmeasure 1\n",
    ],
)
def test_pattern_parse_errors(text):
    with pytest.raises(ParseError):
        parse_pattern(text)


def test_pattern_non_prime_d():
    with pytest.raises(DimensionError):
        parse_pattern("d 4\nn 1\n")
