"""Universality toolkit built from ``U(c)`` gates alone.

* mutually unbiased bases from the eigenvectors of ``Z, X, XZ, ..., XZ^{d-1}``
  and the ``d^2`` rank-one projectors drawn from them, which span all
  operators on one qudit;
* arbitrary diagonal gates as ``F^3 U(c)``;
* rotations ``exp(i theta |lambda><lambda|)`` about a Pauli eigenvector, as a
  Clifford conjugate of a diagonal gate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import GateCircuit, U
from .dense_sim import check_phases, circuit_unitary, pauli_matrix, s_diagonal
from .qudit_algebra import PauliWord, modulus
from .synthesis import synthesize_clifford
from .tableau import SymplecticTableau, pauli_image

__all__ = [
    "MubFamily",
    "mub_bases",
    "hermitian_basis",
    "numerical_rank",
    "diag_from_uc",
    "to_uc_circuit",
    "pauli_eigenvector",
    "rotation_gate",
    "rotation_matrix",
]


@dataclass(frozen=True, eq=False)
class MubFamily:
    """``d + 1`` bases; ``bases[k]`` has the basis vectors as rows.

    ``bases[k][m]`` is the eigenvector of ``labels[k]`` with eigenvalue ``w^m``.
    """

    d: int
    labels: tuple[PauliWord, ...]
    bases: tuple[np.ndarray, ...]

    def max_cross_deviation(self) -> float:
        """Largest ``| |<a|b>|^2 - 1/d |`` over vectors from different bases."""
        worst = 0.0
        for i in range(len(self.bases)):
            for j in range(i + 1, len(self.bases)):
                ov = np.abs(self.bases[i].conj() @ self.bases[j].T) ** 2
                worst = max(worst, float(np.max(np.abs(ov - 1 / self.d))))
        return worst

    def max_orthonormal_deviation(self) -> float:
        eye = np.eye(self.d)
        return max(float(np.max(np.abs(b.conj() @ b.T - eye))) for b in self.bases)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v) > 1e-9))
    return v * (abs(v[k]) / v[k]) / np.linalg.norm(v)


def pauli_eigenvector(p: PauliWord, j: int) -> np.ndarray:
    """Eigenvector of the single-qudit word ``p`` (phase included) for eigenvalue ``w^j``.

    Normalised with its first nonzero component real positive.
    """
    if p.n != 1 or p.is_identity:
        raise ValueError("need a non-identity one-qudit Pauli word")
    d = p.d
    vals, vecs = np.linalg.eig(pauli_matrix(p))
    idx = np.round(np.angle(vals) / (2 * np.pi / d)).astype(int) % d
    k = int(np.flatnonzero(idx == j % d)[0])
    return _fix_phase(vecs[:, k])


def mub_bases(d: int) -> MubFamily:
    d = modulus(d).d
    z, x = PauliWord.single(d, 1, 0, z=1), PauliWord.single(d, 1, 0, x=1)
    labels = [z, x] + [x * z**k for k in range(1, d)]
    bases = []
    for p in labels:
        vecs = np.array([pauli_eigenvector(p, m) for m in range(d)])
        bases.append(vecs)
    return MubFamily(d, tuple(labels), tuple(bases))


def hermitian_basis(mubs: MubFamily) -> list[np.ndarray]:
    """All ``d`` projectors of the first basis and vectors ``1..d-1`` of the others."""
    out = [np.outer(v, v.conj()) for v in mubs.bases[0]]
    for b in mubs.bases[1:]:
        out.extend(np.outer(v, v.conj()) for v in b[1:])
    return out


def numerical_rank(ops: Sequence[np.ndarray], tol: float = 1e-8) -> int:
    """Number of singular values above ``tol`` of the operators flattened into rows."""
    m = np.array([np.asarray(o).reshape(-1) for o in ops])
    return int(np.sum(np.linalg.svd(m, compute_uv=False) > tol))


def diag_from_uc(c: Sequence[complex], wire: int = 0, n: int = 1) -> GateCircuit:
    """``diag(c)`` as ``U(c)`` followed by three ``U(1, ..., 1) = F`` gates."""
    c = tuple(check_phases(c, len(c)))
    d = len(c)
    ones = (1.0 + 0j,) * d
    return GateCircuit(d, n, [U(wire, c)] + [U(wire, ones)] * 3)


def to_uc_circuit(circ: GateCircuit) -> GateCircuit:
    """Rewrite one-qudit ``F``/``S``/``X``/``Z``/``D`` atoms as ``U`` atoms."""
    d = circ.d
    ones = (1.0 + 0j,) * d
    w = modulus(d).omega
    out = GateCircuit(d, circ.n)
    for a in circ:
        wire = a.wires[0] if len(a.wires) == 1 else None
        if a.kind == "F":
            out.append(U(wire, ones))
        elif a.kind == "S":
            out.extend(diag_from_uc(tuple(s_diagonal(d)), wire, circ.n))
        elif a.kind == "Z":
            out.extend(diag_from_uc(tuple(w ** np.arange(d)), wire, circ.n))
        elif a.kind == "X":
            # X = F Z^-1 F^-1, with F^-1 = F^3
            zinv = tuple(w ** (-np.arange(d) % d))
            out.extend([U(wire, ones)] * 3)
            out.extend(diag_from_uc(zinv, wire, circ.n))
            out.append(U(wire, ones))
        elif a.kind == "D":
            out.extend(diag_from_uc(a.params, wire, circ.n))
        elif a.kind == "U":
            out.append(a)
        else:
            raise ValueError(f"{a.kind} is not a one-qudit gate")
    return out


def rotation_matrix(p: PauliWord, j: int, theta: float) -> np.ndarray:
    """Dense ``exp(i theta |lambda><lambda|)`` for the ``w^j`` eigenvector of ``p``."""
    v = pauli_eigenvector(p, j)
    return np.eye(p.d) + (np.exp(1j * theta) - 1) * np.outer(v, v.conj())


def rotation_gate(p: PauliWord, j: int, theta: float) -> GateCircuit:
    """``exp(i theta |lambda><lambda|)`` up to phase, over ``U`` atoms only.

    A Clifford ``C`` with ``C Z C^dagger`` proportional to ``p`` maps ``|m>``
    to an eigenvector of ``p``; the circuit is ``C^dagger``, then the
    diagonal with ``e^{i theta}`` at the matching ``m``, then ``C``.
    """
    if p.n != 1 or p.is_identity:
        raise ValueError("rotation target must be a non-identity one-qudit Pauli word")
    d = p.d
    a, b = p.block(0)
    inv = modulus(d).inv
    if a % d:
        t = np.array([[a, 0], [b, inv(a)]], dtype=np.int64)
    else:
        t = np.array([[a, -inv(b)], [b, 0]], dtype=np.int64)
    c_circ = synthesize_clifford(SymplecticTableau(d, 1, t))
    img = pauli_image(circuit_unitary(c_circ), PauliWord(d, 0, (1, 0)))
    # C Z C^dagger = w^k Z^a X^b and p = w^phase Z^a X^b, so C|m> has p-eigenvalue w^(m + phase - k)
    m = (j - p.phase + img.phase) % d
    diag = np.ones(d, dtype=complex)
    diag[m] = np.exp(1j * theta)
    out = to_uc_circuit(c_circ.inverse())
    out.extend(diag_from_uc(tuple(diag)))
    out.extend(to_uc_circuit(c_circ))
    return out
