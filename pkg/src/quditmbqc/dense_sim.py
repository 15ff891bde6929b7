"""Dense state-vector simulation of ``n`` qudits of dimension ``d``.

Amplitudes are indexed by base-``d`` digit strings with wire 0 (wire 1 in
files) as the most significant digit, i.e. the array reshaped to
``(d,) * n`` has axis ``i`` for wire ``i``.  This module is the numerical
ground truth for every symbolic routine in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .circuit import GateAtom, GateCircuit
from .errors import DimensionError, ParseError
from .qudit_algebra import PauliWord, modulus

TOL = 1e-9
ZERO_PROB = 1e-12
MAX_AMPLITUDES = 2_000_000


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalised pure state; ``amps`` has length ``d**n`` and is read-only."""

    d: int
    n: int
    amps: np.ndarray

    def __post_init__(self) -> None:
        d = modulus(self.d).d
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.size != d**self.n:
            raise DimensionError(f"expected {d ** self.n} amplitudes, got {amps.size}")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_amplitudes(cls, d: int, amps: Sequence[complex] | np.ndarray, n: int | None = None) -> StateVector:
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        if n is None:
            n = int(round(np.log(amps.size) / np.log(d))) if amps.size > 1 else 0
        norm = np.linalg.norm(amps)
        if norm < ZERO_PROB:
            raise ValueError("cannot normalise a zero vector")
        return cls(d, n, amps / norm)

    def tensor(self) -> np.ndarray:
        return self.amps.reshape((self.d,) * self.n)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def kron(self, other: StateVector) -> StateVector:
        if self.d != other.d:
            raise DimensionError("dimension mismatch")
        return StateVector(self.d, self.n + other.n, np.kron(self.amps, other.amps))

    def __matmul__(self, other: StateVector) -> StateVector:
        return self.kron(other)

    def __repr__(self) -> str:
        return f"StateVector(d={self.d}, n={self.n})"


def index_to_digits(index: int, d: int, n: int) -> tuple[int, ...]:
    """Base-d digits of ``index``, most significant (wire 0) first."""
    digits = []
    for _ in range(n):
        index, r = divmod(index, d)
        digits.append(r)
    return tuple(reversed(digits))


def digits_to_index(digits: Sequence[int], d: int) -> int:
    idx = 0
    for x in digits:
        idx = idx * d + int(x)
    return idx


# -- elementary states and matrices -------------------------------------------

def basis_state(d: int, digits: Sequence[int]) -> StateVector:
    d = modulus(d).d
    n = len(digits)
    amps = np.zeros(d**n, dtype=complex)
    amps[digits_to_index([x % d for x in digits], d)] = 1.0
    return StateVector(d, n, amps)


def plus_state(d: int, n: int = 1) -> StateVector:
    d = modulus(d).d
    return StateVector(d, n, np.full(d**n, d ** (-n / 2), dtype=complex))


def random_state(d: int, n: int, rng: np.random.Generator) -> StateVector:
    v = rng.normal(size=d**n) + 1j * rng.normal(size=d**n)
    return StateVector.from_amplitudes(d, v, n)


@lru_cache(maxsize=None)
def _pauli_mats(d: int) -> tuple[np.ndarray, np.ndarray]:
    w = modulus(d).omega
    xm = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    zm = np.diag(w ** np.arange(d))
    return xm, zm


def shift_matrix(d: int, power: int = 1) -> np.ndarray:
    """``X^power``: |j> -> |j + power>."""
    return np.roll(np.eye(d, dtype=complex), power % d, axis=0)


def clock_matrix(d: int, power: int = 1) -> np.ndarray:
    """``Z^power``: |j> -> w^{power j} |j>."""
    w = modulus(d).omega
    return np.diag(w ** ((power * np.arange(d)) % d))


@lru_cache(maxsize=None)
def fourier_matrix(d: int) -> np.ndarray:
    w = modulus(d).omega
    j = np.arange(d)
    m = w ** (np.outer(j, j) % d) / np.sqrt(d)
    m.setflags(write=False)
    return m


def s_diagonal(d: int) -> np.ndarray:
    """Entries ``w^{j(j+1)/2}`` of the phase gate S."""
    w = modulus(d).omega
    j = np.arange(d)
    return w ** ((j * (j + 1) // 2) % d)


def uc_matrix(c: Sequence[complex]) -> np.ndarray:
    """``U(c) = F diag(c)``."""
    c = np.asarray(c, dtype=complex)
    return fourier_matrix(len(c)) * c[np.newaxis, :]


def pauli_matrix(p: PauliWord) -> np.ndarray:
    """Dense ``w^k (Z^{a_1} X^{b_1}) (x) ... (x) (Z^{a_n} X^{b_n})``."""
    d = p.d
    out = np.array([[modulus(d).omega ** p.phase]], dtype=complex)
    for i in range(p.n):
        a, b = p.block(i)
        out = np.kron(out, clock_matrix(d, a) @ shift_matrix(d, b))
    return out


def check_phases(c: Sequence[complex], d: int) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    if c.shape != (d,):
        raise ValueError(f"phase vector must have length d={d}")
    if np.any(np.abs(np.abs(c) - 1.0) > TOL):
        raise ValueError("phase vector entries must have unit modulus")
    return c


def gate_matrix(atom: GateAtom, d: int) -> np.ndarray:
    """Exact local matrix of ``atom`` on its own wires (in ``atom.wires`` order)."""
    d = modulus(d).d
    k = atom.kind
    w = modulus(d).omega
    if k == "X":
        return shift_matrix(d)
    if k == "Z":
        return clock_matrix(d)
    if k == "F":
        return fourier_matrix(d).copy()
    if k == "S":
        return np.diag(s_diagonal(d))
    if k == "U":
        return uc_matrix(check_phases(atom.params, d))
    if k == "D":
        return np.diag(check_phases(atom.params, d))
    j = np.arange(d)[:, None]
    kk = np.arange(d)[None, :]
    if k == "CZ":
        return np.diag((w ** ((j * kk) % d)).reshape(-1))
    if k in ("CX", "CP"):
        s, t = (1, 0) if k == "CX" else atom.params
        m = np.zeros((d * d, d * d), dtype=complex)
        for a in range(d):
            for b in range(d):
                expo = (s * t * a * (a - 1) // 2 + t * a * b) % d
                m[a * d + (b + s * a) % d, a * d + b] = w**expo
        return m
    if k == "SWAP":
        m = np.zeros((d * d, d * d), dtype=complex)
        for a in range(d):
            for b in range(d):
                m[b * d + a, a * d + b] = 1.0
        return m
    raise ValueError(f"no matrix for {k}")


# -- applying operators --------------------------------------------------------

def _check_wires(n: int, wires: Sequence[int]) -> None:
    if len(set(wires)) != len(wires):
        raise DimensionError(f"repeated wire in {tuple(wires)}")
    for w in wires:
        if not 0 <= w < n:
            raise DimensionError(f"wire {w} out of range for n={n}")


def apply_matrix(state: StateVector, matrix: np.ndarray, wires: Sequence[int]) -> StateVector:
    """Apply a ``d^k x d^k`` operator to the listed wires and renormalise."""
    d, n = state.d, state.n
    wires = list(wires)
    _check_wires(n, wires)
    k = len(wires)
    op = np.asarray(matrix, dtype=complex).reshape((d,) * (2 * k))
    t = np.tensordot(op, state.tensor(), axes=(list(range(k, 2 * k)), wires))
    # tensordot puts the k output axes first; move them back into place
    t = np.moveaxis(t, list(range(k)), wires)
    amps = t.reshape(-1)
    norm = np.linalg.norm(amps)
    if norm < ZERO_PROB:
        raise ValueError("operator annihilated the state")
    return StateVector(d, n, amps / norm)


def apply(state: StateVector, atom: GateAtom) -> StateVector:
    return apply_matrix(state, gate_matrix(atom, state.d), atom.wires)


def apply_circuit(state: StateVector, circ: GateCircuit | Iterable[GateAtom]) -> StateVector:
    for atom in circ:
        state = apply(state, atom)
    return state


def embed(matrix: np.ndarray, wires: Sequence[int], n: int, d: int) -> np.ndarray:
    """Full ``d^n x d^n`` matrix of a local operator."""
    _check_wires(n, wires)
    k = len(wires)
    op = np.asarray(matrix, dtype=complex).reshape((d,) * (2 * k))
    eye = np.eye(d**n, dtype=complex).reshape((d,) * (2 * n))
    t = np.tensordot(op, eye, axes=(list(range(k, 2 * k)), list(wires)))
    t = np.moveaxis(t, list(range(k)), list(wires))
    return t.reshape(d**n, d**n)


def circuit_unitary(circ: GateCircuit) -> np.ndarray:
    d, n = circ.d, circ.n
    if d ** (2 * n) > MAX_AMPLITUDES * 8:
        raise DimensionError("register too large for a dense unitary")
    u = np.eye(d**n, dtype=complex)
    for atom in circ:
        u = embed(gate_matrix(atom, d), atom.wires, n, d) @ u
    return u


def permute_wires(state: StateVector, order: Sequence[int]) -> StateVector:
    """New state whose wire ``i`` is old wire ``order[i]``."""
    if sorted(order) != list(range(state.n)):
        raise DimensionError(f"{order} is not a permutation of range({state.n})")
    return StateVector(state.d, state.n, np.transpose(state.tensor(), order).reshape(-1))


def bond_state(d: int) -> StateVector:
    """Normalised ``|H> = sum_{j,k} w^{jk} |j>|k>`` (equal to ``C_Z |+>|+>``)."""
    d = modulus(d).d
    w = modulus(d).omega
    j = np.arange(d)
    return StateVector(d, 2, (w ** (np.outer(j, j) % d)).reshape(-1) / d)


def partial_trace(state: StateVector, keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on the ``keep`` wires (in the given order)."""
    keep = list(keep)
    _check_wires(state.n, keep)
    rest = [w for w in range(state.n) if w not in keep]
    t = np.transpose(state.tensor(), keep + rest).reshape(state.d ** len(keep), -1)
    return t @ t.conj().T


# -- measurement -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Branch:
    """One measurement outcome.

    ``state`` holds the unmeasured wires (original order, renormalised) or is
    ``None`` when the outcome has zero probability.
    """

    outcome: int
    probability: float
    state: StateVector | None

    @property
    def zero(self) -> bool:
        return self.state is None


def computational_basis(d: int, k: int = 1) -> np.ndarray:
    return np.eye(d**k, dtype=complex)


def check_orthonormal(basis: np.ndarray, tol: float = TOL) -> None:
    basis = np.asarray(basis, dtype=complex)
    if basis.ndim != 2 or basis.shape[0] != basis.shape[1]:
        raise ValueError("basis must be a square array of row vectors")
    gram = basis.conj() @ basis.T
    if np.max(np.abs(gram - np.eye(len(basis)))) > tol:
        raise ValueError("basis vectors are not orthonormal")


def measure(
    state: StateVector,
    wires: Sequence[int],
    basis: np.ndarray | None = None,
    mode: str = "enumerate",
    outcome: int | None = None,
    seed: int | np.random.Generator | None = None,
    check: bool = True,
) -> list[Branch]:
    """Projective measurement of ``wires`` in an orthonormal basis.

    ``basis`` rows are the basis vectors on the measured wires (flattened in
    the order ``wires`` is given); default is the computational basis.
    ``mode`` is ``"enumerate"`` (every outcome, zero-probability ones
    flagged), ``"force"`` (only ``outcome``) or ``"sample"`` (one outcome
    drawn with ``seed``).
    """
    d, n = state.d, state.n
    wires = list(wires)
    _check_wires(n, wires)
    k = len(wires)
    if basis is None:
        basis = computational_basis(d, k)
    basis = np.asarray(basis, dtype=complex)
    if basis.shape != (d**k, d**k):
        raise DimensionError(f"basis must be {d ** k} x {d ** k}")
    if check:
        check_orthonormal(basis)
    rest = [w for w in range(n) if w not in wires]
    t = np.transpose(state.tensor(), wires + rest).reshape(d**k, -1)
    proj = basis.conj() @ t  # row s: unnormalised post-state for outcome s
    probs = np.sum(np.abs(proj) ** 2, axis=1).real

    if mode == "enumerate":
        picks = range(d**k)
    elif mode == "force":
        if outcome is None or not 0 <= outcome < d**k:
            raise ValueError(f"forced outcome must lie in 0..{d ** k - 1}")
        picks = [outcome]
    elif mode == "sample":
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        p = np.clip(probs, 0, None)
        picks = [int(rng.choice(d**k, p=p / p.sum()))]
    else:
        raise ValueError(f"unknown mode {mode!r}")

    out = []
    for s in picks:
        p = float(probs[s])
        if p < ZERO_PROB:
            out.append(Branch(s, 0.0, None))
        else:
            out.append(Branch(s, p, StateVector(d, len(rest), proj[s] / np.sqrt(p))))
    return out


def fidelity_up_to_phase(a: StateVector, b: StateVector) -> float:
    """``|<a|b>|`` for normalised states."""
    if a.d != b.d or a.n != b.n:
        raise DimensionError("states live on different registers")
    return float(min(1.0, abs(np.vdot(a.amps, b.amps))))


def matrices_equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = TOL) -> bool:
    """True iff ``a = e^{i phi} b`` for some real ``phi`` (entrywise within ``tol``)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        return False
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[idx]) < tol:
        return bool(np.max(np.abs(a)) < tol)
    ph = a[idx] / b[idx]
    if abs(abs(ph) - 1) > tol:
        return False
    return bool(np.max(np.abs(a - ph * b)) < tol)


# -- state dump format ---------------------------------------------------------

DUMP_THRESHOLD = 1e-12


def _format_digits(digits: Sequence[int], d: int) -> str:
    if d <= 10:
        return "".join(str(x) for x in digits)
    return ",".join(str(x) for x in digits)


def dump_state(state: StateVector) -> str:
    """One line ``<digits> <re> <im>`` per amplitude above 1e-12, in index order."""
    lines = [f"d {state.d}", f"n {state.n}"]
    for idx, amp in enumerate(state.amps):
        if abs(amp) > DUMP_THRESHOLD:
            digits = _format_digits(index_to_digits(idx, state.d, state.n), state.d)
            lines.append(f"{digits} {float(amp.real)!r} {float(amp.imag)!r}")
    return "\n".join(lines) + "\n"


def parse_state(text: str, d: int | None = None, n: int | None = None) -> StateVector:
    """Inverse of :func:`dump_state`; unlisted amplitudes are zero.

    The ``d``/``n`` header lines are optional when both are passed in.
    """
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] in ("d", "n") and len(toks) == 2:
            val = int(toks[1])
            if toks[0] == "d":
                if d is not None and d != val:
                    raise ParseError(f"state file is for d={val}, expected d={d}")
                d = val
            else:
                if n is not None and n != val:
                    raise ParseError(f"state file has n={val}, expected n={n}")
                n = val
            continue
        if len(toks) != 3:
            raise ParseError(f"line {lineno}: expected '<digits> <re> <im>'")
        entries.append((lineno, toks))
    if d is None or n is None:
        raise ParseError("state file needs d and n")
    d = modulus(d).d
    amps = np.zeros(d**n, dtype=complex)
    for lineno, (dig, re_, im_) in entries:
        digits = [int(x) for x in dig.split(",")] if "," in dig or d > 10 else [int(x) for x in dig]
        if len(digits) != n or any(not 0 <= x < d for x in digits):
            raise ParseError(f"line {lineno}: bad index digits {dig!r}")
        try:
            amps[digits_to_index(digits, d)] = complex(float(re_), float(im_))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: bad amplitude") from exc
    try:
        return StateVector.from_amplitudes(d, amps, n)
    except ValueError as exc:
        raise ParseError("state file describes the zero vector") from exc
