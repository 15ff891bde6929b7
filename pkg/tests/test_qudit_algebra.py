from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quditmbqc.dense_sim import clock_matrix, pauli_matrix, shift_matrix
from quditmbqc.errors import DimensionError, ParseError
from quditmbqc.qudit_algebra import (
    Modulus,
    PauliWord,
    format_pauli,
    is_crp,
    is_odd_prime,
    parse_pauli,
    pauli_mul,
    symplectic_form,
)

Z3 = PauliWord(3, 0, (1, 0))
X3 = PauliWord(3, 0, (0, 1))


def words(d: int, n: int):
    return st.builds(
        lambda ph, ex: PauliWord(d, ph, tuple(ex)),
        st.integers(0, d - 1),
        st.lists(st.integers(0, d - 1), min_size=2 * n, max_size=2 * n),
    )


@pytest.mark.parametrize("d", [3, 5, 7, 11, 101])
def test_modulus_accepts_odd_primes(d):
    m = Modulus(d)
    assert abs(m.omega ** d - 1) < 1e-12
    assert all(m.inv(x) * x % d == 1 for x in range(1, d))


@pytest.mark.parametrize("d", [0, 1, 2, 4, 9, 15, -3])
def test_modulus_rejects(d):
    assert not is_odd_prime(d)
    with pytest.raises(DimensionError):
        Modulus(d)


def test_exponents_reduced():
    p = PauliWord(3, 5, (4, -1))
    assert p.phase == 2 and p.exps == (1, 2)
    assert PauliWord.identity(5, 2).is_identity


def test_x_times_z():
    prod = pauli_mul(X3, Z3)
    assert prod.phase == 2 and prod.exps == (1, 1)


def test_identity_is_neutral(rng):
    q = PauliWord(5, 3, tuple(rng.integers(0, 5, 4)))
    assert pauli_mul(PauliWord.identity(5, 2), q) == q


def test_two_wire_product():
    p = PauliWord(3, 0, (1, 0, 0, 1))  # Z1 X2
    q = PauliWord(3, 0, (0, 1, 1, 0))  # X1 Z2
    prod = pauli_mul(p, q)
    assert prod.phase == 2 and prod.exps == (1, 1, 1, 1)
    np.testing.assert_allclose(pauli_matrix(prod), pauli_matrix(p) @ pauli_matrix(q), atol=1e-12)


@pytest.mark.parametrize("d,n", [(3, 1), (3, 2), (5, 1), (5, 2), (3, 3)])
def test_product_matches_dense(d, n, rng):
    for _ in range(20):
        p = PauliWord(d, int(rng.integers(d)), tuple(rng.integers(0, d, 2 * n)))
        q = PauliWord(d, int(rng.integers(d)), tuple(rng.integers(0, d, 2 * n)))
        np.testing.assert_allclose(pauli_matrix(p * q), pauli_matrix(p) @ pauli_matrix(q), atol=1e-10)


def test_dense_rendering_is_kron_of_blocks():
    p = PauliWord(5, 2, (1, 3, 0, 4))
    w = np.exp(2j * np.pi / 5)
    expected = w**2 * np.kron(clock_matrix(5, 1) @ shift_matrix(5, 3), shift_matrix(5, 4))
    np.testing.assert_allclose(pauli_matrix(p), expected, atol=1e-12)


def test_symplectic_form_basics():
    assert symplectic_form(Z3, X3) == 1
    assert symplectic_form(X3, Z3) == 2
    assert symplectic_form(Z3, Z3) == 0


def test_form_matches_dense_commutator(rng):
    d = 5
    w = np.exp(2j * np.pi / d)
    for n in (1, 2):
        for _ in range(10):
            p = PauliWord(d, 0, tuple(rng.integers(0, d, 2 * n)))
            q = PauliWord(d, 0, tuple(rng.integers(0, d, 2 * n)))
            a, b = pauli_matrix(p), pauli_matrix(q)
            np.testing.assert_allclose(a @ b, w ** symplectic_form(p, q) * b @ a, atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(words(3, 2), words(3, 2))
def test_commutation_relation(p, q):
    assert pauli_mul(p, q) == pauli_mul(q, p).with_phase(pauli_mul(q, p).phase + symplectic_form(p, q))


@settings(max_examples=60, deadline=None)
@given(words(5, 2), words(5, 2), words(5, 2), st.integers(0, 4))
def test_form_bilinear_antisymmetric(p, q, r, k):
    d = 5
    assert (symplectic_form(p, q) + symplectic_form(q, p)) % d == 0
    assert symplectic_form(p * q, r) == (symplectic_form(p, r) + symplectic_form(q, r)) % d
    assert symplectic_form(p**k, q) == (k * symplectic_form(p, q)) % d


def test_is_crp():
    assert is_crp([(Z3, Z3), (X3, X3)])
    assert not is_crp([(Z3, X3), (X3, Z3)])
    assert is_crp([(X3, Z3), (Z3, X3**2)])


def test_mismatch_rejected():
    with pytest.raises(DimensionError):
        pauli_mul(Z3, PauliWord(5, 0, (1, 0)))
    with pytest.raises(DimensionError):
        symplectic_form(Z3, PauliWord(3, 0, (1, 0, 0, 0)))


def test_text_round_trip():
    p = PauliWord(3, 2, (1, 2, 0, 0, 1, 0))
    assert format_pauli(p) == "w^2 Z1 X1^2 Z3"
    assert parse_pauli("w^2 Z1 X1^2 Z3", 3, 3) == p
    assert format_pauli(PauliWord.identity(3, 2)) == "I"
    assert parse_pauli("I", 3, 2).is_identity


def test_parser_multiplies_in_order():
    # X Z = w^-1 Z X
    assert parse_pauli("X1 Z1", 3, 1) == PauliWord(3, 2, (1, 1))


@pytest.mark.parametrize("bad", ["Q1", "Z0", "Z4", "X1^a", ""])
def test_parser_rejects(bad):
    with pytest.raises(ParseError):
        parse_pauli(bad, 3, 3)
