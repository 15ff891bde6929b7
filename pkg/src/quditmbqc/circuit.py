"""Gate atoms, gate circuits and the circuit text format.

Wires are 0-indexed in memory and 1-indexed in files; the conversion
happens only in :func:`parse_circuit` and :func:`format_circuit`.

Circuit file grammar (one gate per line, ``#`` starts a comment)::

    d 3
    n 2
    F 1
    S 2
    X 1
    Z 1
    CX 1 2            # control, target
    CZ 1 2
    CP 1 2 1 2        # s t control target
    SWAP 1 2
    U 1 0 1/3 2/3     # U(c) on wire 1, c_j = exp(2 pi i turns_j)
    D 2 0 1/4 1/2     # diag(c)

Phases are given in rational turns ``p/q``; plain decimals are also
accepted, and with ``radians=True`` every phase is read as an angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DimensionError, ParseError
from .qudit_algebra import modulus

ONE_QUDIT = ("X", "Z", "F", "S", "U", "D")
TWO_QUDIT = ("CX", "CZ", "CP", "SWAP")
KINDS = ONE_QUDIT + TWO_QUDIT
CLIFFORD_KINDS = ("X", "Z", "F", "S", "CX", "CZ", "CP", "SWAP")
PHASE_TOL = 1e-9


@dataclass(frozen=True)
class GateAtom:
    """A single gate application.

    ``params`` is ``(s, t)`` for ``CP`` and the phase vector ``c`` (complex,
    unit modulus) for ``U`` and ``D``; empty otherwise.
    """

    kind: str
    wires: tuple[int, ...]
    params: tuple = ()

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        wires = tuple(int(w) for w in self.wires)
        arity = 1 if self.kind in ONE_QUDIT else 2
        if len(wires) != arity:
            raise DimensionError(f"{self.kind} acts on {arity} wire(s), got {wires}")
        if len(set(wires)) != arity:
            raise DimensionError(f"{self.kind} wires must be distinct, got {wires}")
        object.__setattr__(self, "wires", wires)
        if self.kind == "CP":
            if len(self.params) != 2:
                raise ValueError("CP needs (s, t)")
            object.__setattr__(self, "params", tuple(int(v) for v in self.params))
        elif self.kind in ("U", "D"):
            c = tuple(complex(v) for v in self.params)
            if not c:
                raise ValueError(f"{self.kind} needs a phase vector")
            if any(abs(abs(v) - 1.0) > PHASE_TOL for v in c):
                raise ValueError("phase vector entries must have unit modulus")
            object.__setattr__(self, "params", c)
        elif self.params:
            raise ValueError(f"{self.kind} takes no parameters")

    @property
    def is_clifford_atom(self) -> bool:
        return self.kind in CLIFFORD_KINDS

    def on(self, *wires: int) -> GateAtom:
        return GateAtom(self.kind, wires, self.params)

    def shifted(self, offset: int) -> GateAtom:
        return GateAtom(self.kind, tuple(w + offset for w in self.wires), self.params)

    def __repr__(self) -> str:
        w = ",".join(str(x) for x in self.wires)
        if self.kind == "CP":
            return f"CP{self.params}({w})"
        if self.kind in ("U", "D"):
            return f"{self.kind}[{len(self.params)}]({w})"
        return f"{self.kind}({w})"


# convenience constructors -------------------------------------------------

def F(w: int) -> GateAtom:
    return GateAtom("F", (w,))


def S(w: int) -> GateAtom:
    return GateAtom("S", (w,))


def X(w: int) -> GateAtom:
    return GateAtom("X", (w,))


def Z(w: int) -> GateAtom:
    return GateAtom("Z", (w,))


def CX(c: int, t: int) -> GateAtom:
    return GateAtom("CX", (c, t))


def CZ(a: int, b: int) -> GateAtom:
    return GateAtom("CZ", (a, b))


def CP(s: int, t: int, c: int, tg: int) -> GateAtom:
    return GateAtom("CP", (c, tg), (s, t))


def SWAP(a: int, b: int) -> GateAtom:
    return GateAtom("SWAP", (a, b))


def U(w: int, c: Sequence[complex]) -> GateAtom:
    return GateAtom("U", (w,), tuple(c))


def D(w: int, c: Sequence[complex]) -> GateAtom:
    return GateAtom("D", (w,), tuple(c))


def inverse_atoms(atom: GateAtom, d: int) -> list[GateAtom]:
    """Atoms whose product (in circuit order) is ``atom``'s inverse.

    Clifford atoms are inverted by positive powers so the alphabet never grows.
    """
    k = atom.kind
    if k == "F":
        return [atom] * 3
    if k == "SWAP":
        return [atom]
    if k in ("S", "X", "Z", "CX", "CZ", "CP"):
        return [atom] * (d - 1)
    w = atom.wires[0]
    conj = tuple(v.conjugate() for v in atom.params)
    if k == "D":
        return [D(w, conj)]
    # U(c)^-1 = diag(conj c) F^-1
    return [F(w)] * 3 + [D(w, conj)]


@dataclass
class GateCircuit:
    """Ordered gate list over a fixed ``(d, n)``; ``atoms[0]`` is applied first."""

    d: int
    n: int
    atoms: list[GateAtom] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.d = modulus(self.d).d
        if self.n < 0:
            raise DimensionError("wire count must be non-negative")
        self.atoms = list(self.atoms)
        for a in self.atoms:
            self._check(a)

    def _check(self, atom: GateAtom) -> None:
        if any(not 0 <= w < self.n for w in atom.wires):
            raise DimensionError(f"{atom!r} has a wire outside 0..{self.n - 1}")
        if atom.kind in ("U", "D") and len(atom.params) != self.d:
            raise DimensionError(f"{atom.kind} phase vector must have length d={self.d}")

    def append(self, atom: GateAtom) -> GateCircuit:
        self._check(atom)
        self.atoms.append(atom)
        return self

    def extend(self, atoms: Iterable[GateAtom]) -> GateCircuit:
        for a in atoms:
            self.append(a)
        return self

    def __iter__(self) -> Iterator[GateAtom]:
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __add__(self, other: GateCircuit) -> GateCircuit:
        if (self.d, self.n) != (other.d, other.n):
            raise DimensionError("cannot concatenate circuits over different (d, n)")
        return GateCircuit(self.d, self.n, self.atoms + other.atoms)

    def copy(self) -> GateCircuit:
        return GateCircuit(self.d, self.n, list(self.atoms))

    def inverse(self) -> GateCircuit:
        out: list[GateAtom] = []
        for a in reversed(self.atoms):
            out.extend(inverse_atoms(a, self.d))
        return GateCircuit(self.d, self.n, out)

    def widened(self, n: int, offset: int = 0) -> GateCircuit:
        """The same gates placed on a wider register, wires shifted by ``offset``."""
        return GateCircuit(self.d, n, [a.shifted(offset) for a in self.atoms])

    def kinds(self) -> set[str]:
        return {a.kind for a in self.atoms}

    @property
    def is_clifford(self) -> bool:
        return all(a.is_clifford_atom for a in self.atoms)


# -- text format -------------------------------------------------------------

def turns_to_phase(turn: float | Fraction) -> complex:
    if isinstance(turn, Fraction):
        # exact for the common denominators
        num, den = turn.numerator % turn.denominator, turn.denominator
        return complex(np.exp(2j * np.pi * num / den))
    return complex(np.exp(2j * np.pi * float(turn)))


def phase_to_turns(c: complex) -> Fraction | float:
    """Phase as turns in [0, 1); a small-denominator fraction when exact."""
    t = (math.atan2(c.imag, c.real) / (2 * math.pi)) % 1.0
    frac = Fraction(t).limit_denominator(10_000)
    if abs(turns_to_phase(frac) - c) < 1e-12:
        return frac % 1
    return t


def format_turn(t: Fraction | float) -> str:
    if isinstance(t, Fraction):
        return str(t.numerator) if t.denominator == 1 else f"{t.numerator}/{t.denominator}"
    return repr(float(t))


def parse_turn(tok: str, radians: bool = False) -> complex:
    try:
        if radians:
            return complex(np.exp(1j * float(tok)))
        if "/" in tok:
            return turns_to_phase(Fraction(tok))
        return turns_to_phase(float(tok))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad phase entry {tok!r}") from exc


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _int(tok: str, what: str) -> int:
    try:
        return int(tok)
    except ValueError as exc:
        raise ParseError(f"expected integer {what}, got {tok!r}") from exc


def parse_header(lines: Iterable[str]) -> tuple[dict[str, int], list[tuple[int, list[str]]]]:
    """Split ``d``/``n`` header lines from the tokenised body (with line numbers)."""
    header: dict[str, int] = {}
    body = []
    for lineno, raw in enumerate(lines, 1):
        line = _strip(raw)
        if not line:
            continue
        toks = line.split()
        if toks[0] in ("d", "n") and len(toks) == 2 and not body:
            header[toks[0]] = _int(toks[1], toks[0])
            continue
        body.append((lineno, toks))
    return header, body


def parse_circuit(text: str, radians: bool = False) -> GateCircuit:
    header, body = parse_header(text.splitlines())
    if "d" not in header or "n" not in header:
        raise ParseError("circuit file needs 'd <prime>' and 'n <wires>' header lines")
    # a non-prime d is a domain error, not a syntax error, so it propagates as DimensionError
    circ = GateCircuit(header["d"], header["n"])
    d, n = circ.d, circ.n

    def wire(tok: str) -> int:
        w = _int(tok, "wire")
        if not 1 <= w <= n:
            raise ParseError(f"wire {w} outside 1..{n}")
        return w - 1

    for lineno, toks in body:
        kind, args = toks[0].upper(), toks[1:]
        try:
            if kind in ("F", "S", "X", "Z"):
                if len(args) != 1:
                    raise ParseError(f"{kind} takes one wire")
                atom = GateAtom(kind, (wire(args[0]),))
            elif kind in ("CX", "CZ", "SWAP"):
                if len(args) != 2:
                    raise ParseError(f"{kind} takes two wires")
                atom = GateAtom(kind, (wire(args[0]), wire(args[1])))
            elif kind == "CP":
                if len(args) != 4:
                    raise ParseError("CP takes s t control target")
                atom = CP(_int(args[0], "s"), _int(args[1], "t"), wire(args[2]), wire(args[3]))
            elif kind in ("U", "D"):
                if len(args) != d + 1:
                    raise ParseError(f"{kind} needs a wire and exactly d={d} phases")
                atom = GateAtom(kind, (wire(args[0]),), tuple(parse_turn(t, radians) for t in args[1:]))
            else:
                raise ParseError(f"unknown gate {toks[0]!r}")
            circ.append(atom)
        except (ParseError, DimensionError, ValueError) as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    return circ


def format_atom(atom: GateAtom) -> str:
    w = [str(x + 1) for x in atom.wires]
    if atom.kind == "CP":
        s, t = atom.params
        return f"CP {s} {t} {w[0]} {w[1]}"
    if atom.kind in ("U", "D"):
        return " ".join([atom.kind, w[0]] + [format_turn(phase_to_turns(c)) for c in atom.params])
    return " ".join([atom.kind] + w)


def format_circuit(circ: GateCircuit) -> str:
    lines = [f"d {circ.d}", f"n {circ.n}"]
    lines.extend(format_atom(a) for a in circ)
    return "\n".join(lines) + "\n"
