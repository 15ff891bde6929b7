"""Phase-free Clifford actions as symplectic matrices over Z_d.

A tableau ``M`` acts on Pauli exponent column vectors
``(a_1, b_1, ..., a_n, b_n)`` (``Z`` exponent first on each wire).  Column
``2i`` is the image of ``Z_i`` and column ``2i + 1`` the image of ``X_i``
under conjugation ``P -> C P C^dagger``.  Phases are never tracked here;
phase-sensitive checks go through :mod:`quditmbqc.dense_sim`.

Text dump format::

    d 3
    n 1
    0 1
    2 0
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .circuit import CLIFFORD_KINDS, GateAtom, GateCircuit
from .errors import DimensionError, NotSymplecticError, ParseError
from .qudit_algebra import PauliWord, modulus

__all__ = [
    "SymplecticTableau",
    "symplectic_j",
    "tableau_of_gate",
    "compose",
    "conjugate_word",
    "circuit_to_tableau",
    "is_symplectic",
    "tableau_from_unitary",
    "random_symplectic",
    "format_tableau",
    "parse_tableau",
]


@dataclass(frozen=True, eq=False)
class SymplecticTableau:
    d: int
    n: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        d = modulus(self.d).d
        m = np.asarray(self.matrix, dtype=np.int64) % d
        if m.shape != (2 * self.n, 2 * self.n):
            raise DimensionError(f"tableau for n={self.n} must be {2 * self.n}x{2 * self.n}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, d: int, n: int) -> SymplecticTableau:
        return cls(d, n, np.eye(2 * n, dtype=np.int64))

    def z_image(self, wire: int) -> PauliWord:
        return PauliWord.from_vector(self.d, self.matrix[:, 2 * wire])

    def x_image(self, wire: int) -> PauliWord:
        return PauliWord.from_vector(self.d, self.matrix[:, 2 * wire + 1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymplecticTableau):
            return NotImplemented
        return (self.d, self.n) == (other.d, other.n) and np.array_equal(self.matrix, other.matrix)

    def __hash__(self) -> int:
        return hash((self.d, self.n, self.matrix.tobytes()))

    def inverse(self) -> SymplecticTableau:
        """Symplectic inverse ``J^{-1} M^T J``."""
        j = symplectic_j(self.n)
        return SymplecticTableau(self.d, self.n, -j @ self.matrix.T @ j)

    def __repr__(self) -> str:
        return f"SymplecticTableau(d={self.d}, n={self.n}, matrix={self.matrix.tolist()})"


def symplectic_j(n: int) -> np.ndarray:
    """Block-diagonal form with per-wire blocks ``[[0, 1], [-1, 0]]``."""
    j = np.zeros((2 * n, 2 * n), dtype=np.int64)
    for i in range(n):
        j[2 * i, 2 * i + 1] = 1
        j[2 * i + 1, 2 * i] = -1
    return j


def _local_tableau(atom: GateAtom, d: int) -> np.ndarray:
    k = atom.kind
    if k in ("X", "Z"):
        return np.eye(2, dtype=np.int64)
    if k == "F":
        return np.array([[0, 1], [-1, 0]], dtype=np.int64)
    if k == "S":
        return np.array([[1, 1], [0, 1]], dtype=np.int64)
    if k == "SWAP":
        m = np.zeros((4, 4), dtype=np.int64)
        m[2:, :2] = np.eye(2, dtype=np.int64)
        m[:2, 2:] = np.eye(2, dtype=np.int64)
        return m
    s, t = {"CX": (1, 0), "CZ": (0, 1)}.get(k, atom.params if k == "CP" else (None, None))
    if s is None:
        raise ValueError(f"{k} has no tableau")
    # columns: images of Z_c, X_c, Z_t, X_t under C_{X^s Z^t} (control c, target t)
    return np.array(
        [
            [1, 0, -s, t],
            [0, 1, 0, 0],
            [0, t, 1, 0],
            [0, s, 0, 1],
        ],
        dtype=np.int64,
    )


def tableau_of_gate(atom: GateAtom, d: int, n: int | None = None) -> SymplecticTableau:
    """Tableau of a library Clifford atom, embedded into ``n`` wires."""
    if atom.kind not in CLIFFORD_KINDS:
        raise ValueError(f"{atom.kind} atoms are not tableau-representable")
    if n is None:
        n = max(atom.wires) + 1
    if any(not 0 <= w < n for w in atom.wires):
        raise DimensionError(f"{atom!r} does not fit in n={n}")
    local = _local_tableau(atom, d)
    m = np.eye(2 * n, dtype=np.int64)
    idx = [i for w in atom.wires for i in (2 * w, 2 * w + 1)]
    m[np.ix_(idx, idx)] = local
    return SymplecticTableau(d, n, m)


def compose(*tableaux: SymplecticTableau) -> SymplecticTableau:
    """Composite action, arguments in circuit order (first applied first)."""
    if not tableaux:
        raise ValueError("compose needs at least one tableau")
    d, n = tableaux[0].d, tableaux[0].n
    m = np.eye(2 * n, dtype=np.int64)
    for t in tableaux:
        if (t.d, t.n) != (d, n):
            raise DimensionError("cannot compose tableaux over different (d, n)")
        m = (t.matrix @ m) % d
    return SymplecticTableau(d, n, m)


def conjugate_word(t: SymplecticTableau, p: PauliWord) -> PauliWord:
    """Image of ``p`` with the phase deliberately set to 0."""
    if (t.d, t.n) != (p.d, p.n):
        raise DimensionError("tableau and word live on different registers")
    return PauliWord.from_vector(t.d, t.matrix @ p.vector())


def _apply_local(m: np.ndarray, atom: GateAtom, d: int) -> np.ndarray:
    """Left-multiply ``m`` by the embedded gate tableau touching only its rows."""
    idx = [i for w in atom.wires for i in (2 * w, 2 * w + 1)]
    m = m.copy()
    m[idx, :] = (_local_tableau(atom, d) @ m[idx, :]) % d
    return m


def circuit_to_tableau(circ: GateCircuit | Iterable[GateAtom], d: int | None = None, n: int | None = None) -> SymplecticTableau:
    if isinstance(circ, GateCircuit):
        d, n = circ.d, circ.n
    if d is None or n is None:
        raise ValueError("d and n are required for a bare atom list")
    m = np.eye(2 * n, dtype=np.int64)
    for atom in circ:
        if atom.kind not in CLIFFORD_KINDS:
            raise ValueError(f"non-Clifford atom {atom!r} in circuit")
        if any(not 0 <= w < n for w in atom.wires):
            raise DimensionError(f"{atom!r} does not fit in n={n}")
        m = _apply_local(m, atom, d)
    return SymplecticTableau(d, n, m)


def is_symplectic(t: SymplecticTableau) -> bool:
    j = symplectic_j(t.n)
    return bool(np.all((t.matrix.T @ j @ t.matrix - j) % t.d == 0))


def random_symplectic(d: int, n: int, rng: np.random.Generator, length: int | None = None) -> SymplecticTableau:
    """Compose ``length`` random F, S and CX tableaux (default ``8 n^2 + 8``)."""
    if length is None:
        length = 8 * n * n + 8
    m = np.eye(2 * n, dtype=np.int64)
    for _ in range(length):
        choice = rng.integers(3) if n > 1 else rng.integers(2)
        if choice == 2:
            c, t = rng.choice(n, size=2, replace=False)
            atom = GateAtom("CX", (int(c), int(t)))
        else:
            atom = GateAtom("FS"[choice], (int(rng.integers(n)),))
        m = _apply_local(m, atom, d)
    return SymplecticTableau(d, n, m)


# -- dense oracle --------------------------------------------------------------

def pauli_image(u: np.ndarray, p: PauliWord, tol: float = 1e-9) -> PauliWord | None:
    """``U P U^dagger`` as a phased Pauli word, or ``None`` if it is not one.

    The X part is read off the column ``U P U^dagger |0>``, the Z part off the
    diagonal of ``U P U^dagger X^{-b}``; the phase must be a clean d-th root.
    """
    from .dense_sim import index_to_digits, pauli_matrix

    d, n = p.d, p.n
    a_mat = u @ pauli_matrix(p) @ u.conj().T
    col = a_mat[:, 0]
    k = int(np.argmax(np.abs(col)))
    if abs(abs(col[k]) - 1) > tol:
        return None
    b = index_to_digits(k, d, n)
    shift_inv = pauli_matrix(PauliWord(d, 0, tuple(v for bi in b for v in (0, -bi))))
    diag_part = a_mat @ shift_inv
    ref = diag_part[0, 0]
    a = []
    w = modulus(d).omega
    for i in range(n):
        unit = d ** (n - 1 - i)
        ratio = diag_part[unit, unit] / ref
        e = int(round(np.angle(ratio) / (2 * np.pi / d))) % d
        if abs(ratio - w**e) > tol:
            return None
        a.append(e)
    phase_f = np.angle(ref) / (2 * np.pi / d)
    phase = int(round(phase_f)) % d
    if abs(ref - w**phase) > tol:
        return None
    cand = PauliWord(d, phase, tuple(v for ai, bi in zip(a, b) for v in (ai, bi)))
    if np.max(np.abs(a_mat - pauli_matrix(cand))) > tol:
        return None
    return cand


def tableau_from_unitary(u: np.ndarray, d: int, n: int, tol: float = 1e-9) -> tuple[SymplecticTableau, list[int]] | None:
    """Tableau and generator phases of a dense Clifford, or ``None`` if not Clifford.

    Returned phases are the w-exponents of the images of ``Z_1, X_1, ..., Z_n, X_n``.
    """
    cols, phases = [], []
    for i in range(n):
        for gen in (PauliWord.single(d, n, i, z=1), PauliWord.single(d, n, i, x=1)):
            img = pauli_image(u, gen, tol)
            if img is None:
                return None
            cols.append(img.exps)
            phases.append(img.phase)
    return SymplecticTableau(d, n, np.array(cols, dtype=np.int64).T), phases


# -- text format -----------------------------------------------------------------

def format_tableau(t: SymplecticTableau) -> str:
    lines = [f"d {t.d}", f"n {t.n}"]
    lines.extend(" ".join(str(int(v)) for v in row) for row in t.matrix)
    return "\n".join(lines) + "\n"


def parse_tableau(text: str, check: bool = True) -> SymplecticTableau:
    """Parse a tableau dump; raises :class:`NotSymplecticError` if ``check`` fails."""
    d = n = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        try:
            if toks[0] in ("d", "n") and len(toks) == 2:
                if toks[0] == "d":
                    d = int(toks[1])
                else:
                    n = int(toks[1])
                continue
            rows.append([int(x) for x in toks])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: expected integers") from exc
    if d is None or n is None:
        raise ParseError("tableau file needs 'd' and 'n' header lines")
    if len(rows) != 2 * n or any(len(r) != 2 * n for r in rows):
        raise ParseError(f"tableau body must be {2 * n} rows of {2 * n} integers")
    t = SymplecticTableau(d, n, np.array(rows, dtype=np.int64))
    if check and not is_symplectic(t):
        raise NotSymplecticError("matrix does not preserve the symplectic form")
    return t
