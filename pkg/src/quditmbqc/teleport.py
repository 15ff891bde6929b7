"""Gate teleportation through ``|H>`` bonds and Pauli byproduct bookkeeping.

``U(c)`` is teleported with a twisted Bell measurement on the input qudit
and one half of a bond.  ``C_Z`` is teleported through the eight-qudit
layout below, measuring two GHZ-type triples::

    1 - 2 ~ 6 - 5        inputs on 1 and 5
        3 ~ 4            bonds (2,6), (3,4), (7,8)
        7 ~ 8            measured triples (1,2,3) and (5,6,7); output on (4,8)

Every byproduct is stored as ``Z^z X^x`` acting *after* the intended gate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .circuit import CZ
from .dense_sim import (
    StateVector,
    apply,
    bond_state,
    check_phases,
    clock_matrix,
    fourier_matrix,
    measure,
    shift_matrix,
    uc_matrix,
)
from .errors import DimensionError
from .qudit_algebra import PauliWord, modulus

__all__ = [
    "ByproductRecord",
    "TeleportBranch",
    "basis_B",
    "teleport_uc",
    "basis_B2",
    "teleport_cz",
    "cz_branch_state",
    "propagate_through_uc",
    "propagate_through_cz",
    "shift_phases",
]


@dataclass(frozen=True)
class ByproductRecord:
    """One-wire Pauli ``Z^z X^x`` applied after the intended gate."""

    d: int
    z: int = 0
    x: int = 0

    def __post_init__(self) -> None:
        d = modulus(self.d).d
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "z", int(self.z) % d)
        object.__setattr__(self, "x", int(self.x) % d)

    def matrix(self) -> np.ndarray:
        return clock_matrix(self.d, self.z) @ shift_matrix(self.d, self.x)

    def word(self) -> PauliWord:
        return PauliWord(self.d, 0, (self.z, self.x))

    def inverse(self) -> ByproductRecord:
        # (Z^z X^x)^-1 = X^-x Z^-z, equal to Z^-z X^-x up to a phase
        return ByproductRecord(self.d, -self.z, -self.x)

    @property
    def is_identity(self) -> bool:
        return self.z == 0 and self.x == 0

    def __str__(self) -> str:
        return f"Z^{self.z} X^{self.x}"


@dataclass(frozen=True, eq=False)
class TeleportBranch:
    outcome: tuple[int, ...]
    probability: float
    state: StateVector | None
    byproduct: tuple[ByproductRecord, ...]


def shift_phases(c: Sequence[complex], k: int) -> tuple[complex, ...]:
    """``c`` with entry ``j`` replaced by ``c_{j+k}`` (``k`` applications of ``c -> c_{++}``)."""
    d = len(c)
    return tuple(c[(j + k) % d] for j in range(d))


# -- one-qudit gate ---------------------------------------------------------------

def basis_B(c: Sequence[complex], d: int | None = None) -> np.ndarray:
    """Rows ``(U(c)^dagger X^s Z^t (x) I)|H>``, row index ``s d + t``."""
    c = check_phases(c, len(c) if d is None else d)
    d = len(c)
    u_dag = uc_matrix(c).conj().T
    h = bond_state(d).amps.reshape(d, d)
    rows = []
    for s in range(d):
        for t in range(d):
            op = u_dag @ shift_matrix(d, s) @ clock_matrix(d, t)
            rows.append((op @ h).reshape(-1))
    return np.array(rows)


def _outcome_pairs(d: int, mode: str, outcome: tuple[int, int] | None) -> list[int] | None:
    if mode == "force":
        if outcome is None:
            raise ValueError("forced mode needs an outcome")
        s, t = outcome
        return [(s % d) * d + t % d]
    return None


def teleport_uc(
    psi: StateVector,
    c: Sequence[complex],
    mode: str = "enumerate",
    outcome: tuple[int, int] | None = None,
    seed: int | np.random.Generator | None = None,
) -> list[TeleportBranch]:
    """Teleport ``U(c)|psi>`` from qudit 1 to qudit 3 through the bond (2, 3).

    Outcome ``(s, t)`` leaves ``Z^{-t} X^{-s} U(c)|psi>`` on qudit 3.
    """
    if psi.n != 1:
        raise DimensionError("teleport_uc takes a one-qudit input")
    d = psi.d
    basis = basis_B(c, d)
    full = psi.kron(bond_state(d))
    picks = _outcome_pairs(d, mode, outcome)
    if picks is not None:
        branches = measure(full, [0, 1], basis, mode="force", outcome=picks[0], check=False)
    else:
        branches = measure(full, [0, 1], basis, mode=mode, seed=seed, check=False)
    out = []
    for b in branches:
        s, t = divmod(b.outcome, d)
        out.append(TeleportBranch((s, t), b.probability, b.state, (ByproductRecord(d, -t, -s),)))
    return out


# -- controlled-Z -------------------------------------------------------------------

def basis_B2(d: int) -> np.ndarray:
    """Rows ``X^r (x) Z^s (x) X^t sum_m |m m m>`` (normalised), row index ``(r d + s) d + t``."""
    d = modulus(d).d
    ghz = np.zeros(d**3, dtype=complex)
    for m in range(d):
        ghz[m * (d * d + d + 1)] = 1 / np.sqrt(d)
    xm, zm = shift_matrix(d), clock_matrix(d)
    rows = []
    for r in range(d):
        for s in range(d):
            for t in range(d):
                op = np.kron(np.kron(np.linalg.matrix_power(xm, r), np.linalg.matrix_power(zm, s)), np.linalg.matrix_power(xm, t))
                rows.append(op @ ghz)
    return np.array(rows)


def _cz_resource(psi1: StateVector, psi2: StateVector) -> StateVector:
    """Eight-qudit state, wires 0..7 standing for qudits 1..8."""
    d = psi1.d
    h = bond_state(d).amps.reshape(d, d)
    t = np.einsum(
        "a,bf,cd,e,gh->abcdefgh",
        psi1.amps, h, h, psi2.amps, h,
    )
    return StateVector(d, 8, t.reshape(-1))


def cz_branch_state(psi1: StateVector, psi2: StateVector, outcome: Sequence[int]) -> StateVector:
    """``Z_4^{t-r} Z_8^{w-u} X_4^{s+u} X_8^{v+r} F_4 F_8 C_Z |psi1 psi2>`` for ``(r, s, t, u, v, w)``."""
    d = psi1.d
    r, s, t, u, v, w = outcome
    f = fourier_matrix(d)
    state = apply(psi1.kron(psi2), CZ(0, 1))
    p4 = clock_matrix(d, t - r) @ shift_matrix(d, s + u) @ f
    p8 = clock_matrix(d, w - u) @ shift_matrix(d, v + r) @ f
    return StateVector(d, 2, np.kron(p4, p8) @ state.amps)


def _digits3(k: int, d: int) -> tuple[int, int, int]:
    return (k // (d * d), (k // d) % d, k % d)


def teleport_cz(
    psi1: StateVector,
    psi2: StateVector,
    outcome: Sequence[int] | None = None,
) -> Iterator[TeleportBranch]:
    """Branches ``(r, s, t, u, v, w)`` of the two ``B2`` measurements.

    With ``outcome`` given only that branch is produced; otherwise all ``d^6``
    branches are generated in lexicographic order.  Each branch's byproduct is
    the Pauli pair on qudits 4 and 8 multiplying ``F_4 F_8 C_Z``.
    """
    if psi1.n != 1 or psi2.n != 1 or psi1.d != psi2.d:
        raise DimensionError("teleport_cz takes two one-qudit inputs of equal dimension")
    d = psi1.d
    basis = basis_B2(d)
    full = _cz_resource(psi1, psi2)
    if outcome is None:
        first = measure(full, [0, 1, 2], basis, check=False)
    else:
        r, s, t = (int(v) % d for v in outcome[:3])
        first = measure(full, [0, 1, 2], basis, mode="force", outcome=(r * d + s) * d + t, check=False)
    for b1 in first:
        r, s, t = _digits3(b1.outcome, d)
        if b1.state is None:
            raise ArithmeticError("first B2 outcome has zero probability")
        # remaining wires are qudits 4, 5, 6, 7, 8
        if outcome is None:
            second = measure(b1.state, [1, 2, 3], basis, check=False)
        else:
            u, v, w = (int(x) % d for x in outcome[3:])
            second = measure(b1.state, [1, 2, 3], basis, mode="force", outcome=(u * d + v) * d + w, check=False)
        for b2 in second:
            u, v, w = _digits3(b2.outcome, d)
            rec = (ByproductRecord(d, t - r, s + u), ByproductRecord(d, w - u, v + r))
            yield TeleportBranch((r, s, t, u, v, w), b1.probability * b2.probability, b2.state, rec)


# -- propagation ------------------------------------------------------------------------

def propagate_through_uc(err: ByproductRecord, c: Sequence[complex]) -> tuple[ByproductRecord, tuple[complex, ...]]:
    """Push ``Z^z X^x`` forward through ``U(c)``.

    ``U(c) Z^z X^x = Z^x X^{-z} U(c')`` up to a phase, with ``c'`` equal to
    ``c`` shifted ``x`` times.
    """
    c = tuple(check_phases(c, err.d))
    return ByproductRecord(err.d, err.x, -err.z), shift_phases(c, err.x)


def propagate_through_cz(err1: ByproductRecord, err2: ByproductRecord) -> tuple[ByproductRecord, ByproductRecord]:
    """``C_Z (P_1 (x) P_2) = (P_1' (x) P_2') C_Z`` up to a phase: each X picks up a Z on the partner."""
    if err1.d != err2.d:
        raise DimensionError("byproducts over different d")
    d = err1.d
    return ByproductRecord(d, err1.z + err2.x, err1.x), ByproductRecord(d, err2.z + err1.x, err2.x)
