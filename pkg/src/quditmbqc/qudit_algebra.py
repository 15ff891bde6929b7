"""Arithmetic over Z_d and the symbolic generalised Pauli group.

A Pauli word on ``n`` qudits is stored as a phase exponent ``k`` and an
exponent vector ``(a_1, b_1, ..., a_n, b_n)`` and stands for the operator

    w^k Z_1^{a_1} X_1^{b_1} ... Z_n^{a_n} X_n^{b_n},    w = exp(2 pi i / d).

Per wire the clock ``Z`` is always written before the shift ``X``; every
phase in the package is derived from that single ordering convention.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, ParseError


def is_odd_prime(d: int) -> bool:
    if d < 3 or d % 2 == 0:
        return False
    f = 3
    while f * f <= d:
        if d % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Modulus:
    """Qudit dimension ``d``; must be an odd prime."""

    d: int

    def __post_init__(self) -> None:
        if isinstance(self.d, bool) or not isinstance(self.d, (int, np.integer)):
            raise DimensionError(f"dimension must be an integer, got {self.d!r}")
        if not is_odd_prime(int(self.d)):
            raise DimensionError(f"dimension d={self.d} is not an odd prime")
        object.__setattr__(self, "d", int(self.d))

    @property
    def omega(self) -> complex:
        return _omega(self.d)

    def inv(self, x: int) -> int:
        """Multiplicative inverse mod d."""
        x %= self.d
        if x == 0:
            raise ZeroDivisionError("0 has no inverse mod d")
        return pow(x, -1, self.d)

    def __int__(self) -> int:
        return self.d


@lru_cache(maxsize=None)
def _omega(d: int) -> complex:
    return complex(np.exp(2j * np.pi / d))


@lru_cache(maxsize=None)
def modulus(d: int | Modulus) -> Modulus:
    """Coerce ``d`` into a validated :class:`Modulus` (cached)."""
    if isinstance(d, Modulus):
        return d
    return Modulus(d)


@dataclass(frozen=True)
class PauliWord:
    """``w^phase * prod_i Z_i^{a_i} X_i^{b_i}`` with exponents reduced mod ``d``."""

    d: int
    phase: int
    exps: tuple[int, ...]

    def __post_init__(self) -> None:
        d = modulus(self.d).d
        exps = tuple(int(e) % d for e in self.exps)
        if len(exps) == 0 or len(exps) % 2:
            raise DimensionError("exponent vector must have even length >= 2")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "phase", int(self.phase) % d)
        object.__setattr__(self, "exps", exps)

    @property
    def n(self) -> int:
        return len(self.exps) // 2

    def z_exp(self, wire: int) -> int:
        return self.exps[2 * wire]

    def x_exp(self, wire: int) -> int:
        return self.exps[2 * wire + 1]

    def block(self, wire: int) -> tuple[int, int]:
        return self.exps[2 * wire], self.exps[2 * wire + 1]

    @property
    def is_identity(self) -> bool:
        return self.phase == 0 and not any(self.exps)

    def without_phase(self) -> PauliWord:
        return PauliWord(self.d, 0, self.exps)

    def with_phase(self, phase: int) -> PauliWord:
        return PauliWord(self.d, phase, self.exps)

    def vector(self) -> np.ndarray:
        return np.array(self.exps, dtype=np.int64)

    @classmethod
    def identity(cls, d: int, n: int) -> PauliWord:
        return cls(d, 0, (0,) * (2 * n))

    @classmethod
    def from_vector(cls, d: int, vec: Iterable[int], phase: int = 0) -> PauliWord:
        return cls(d, phase, tuple(int(v) for v in vec))

    @classmethod
    def single(cls, d: int, n: int, wire: int, z: int = 0, x: int = 0) -> PauliWord:
        """``Z^z X^x`` on one wire (0-indexed), identity elsewhere."""
        if not 0 <= wire < n:
            raise DimensionError(f"wire {wire} out of range for n={n}")
        exps = [0] * (2 * n)
        exps[2 * wire] = z
        exps[2 * wire + 1] = x
        return cls(d, 0, tuple(exps))

    def __mul__(self, other: PauliWord) -> PauliWord:
        return pauli_mul(self, other)

    def __pow__(self, k: int) -> PauliWord:
        out = PauliWord.identity(self.d, self.n)
        base = self
        k %= self.d  # every word has order dividing d for odd d
        for _ in range(k):
            out = pauli_mul(out, base)
        return out

    def __str__(self) -> str:
        return format_pauli(self)


def _check_pair(p: PauliWord, q: PauliWord) -> None:
    if p.d != q.d or p.n != q.n:
        raise DimensionError(f"(d, n) mismatch: ({p.d}, {p.n}) vs ({q.d}, {q.n})")


def pauli_mul(p: PauliWord, q: PauliWord) -> PauliWord:
    """Normal-ordered product ``p * q``.

    Moving ``X^b`` past ``Z^c`` on a wire costs ``w^{-bc}``.
    """
    _check_pair(p, q)
    phase = p.phase + q.phase
    exps = []
    for i in range(p.n):
        a, b = p.block(i)
        c, e = q.block(i)
        phase -= b * c
        exps.extend((a + c, b + e))
    return PauliWord(p.d, phase, tuple(exps))


def symplectic_form(p: PauliWord, q: PauliWord) -> int:
    """Commutation exponent ``(P, Q) = sum_i a_i d_i - b_i c_i`` mod d.

    ``P Q = w^{(P,Q)} Q P``.
    """
    _check_pair(p, q)
    total = 0
    for i in range(p.n):
        a, b = p.block(i)
        c, e = q.block(i)
        total += a * e - b * c
    return total % p.d


def is_crp(pairs: Sequence[tuple[PauliWord, PauliWord]]) -> bool:
    """True iff the association ``source_i -> image_i`` preserves all pairwise forms."""
    for src, img in pairs:
        _check_pair(src, img)
    for i, (si, ii) in enumerate(pairs):
        for sj, ij in pairs[i:]:
            _check_pair(si, sj)
            if symplectic_form(si, sj) != symplectic_form(ii, ij):
                return False
    return True


# -- text rendering ---------------------------------------------------------

def _power(sym: str, k: int) -> str:
    return sym if k == 1 else f"{sym}^{k}"


def format_pauli(p: PauliWord) -> str:
    """Render as e.g. ``w^2 Z1 X1^2 Z3`` (1-indexed wires, ``w`` for omega)."""
    parts = []
    if p.phase:
        parts.append(_power("w", p.phase))
    for i in range(p.n):
        a, b = p.block(i)
        if a:
            parts.append(_power(f"Z{i + 1}", a))
        if b:
            parts.append(_power(f"X{i + 1}", b))
    return " ".join(parts) if parts else "I"


_TOKEN = re.compile(r"^(w|I|[ZX](\d+))(?:\^(-?\d+))?$")


def parse_pauli(text: str, d: int, n: int) -> PauliWord:
    """Parse the grammar produced by :func:`format_pauli`.

    Tokens are multiplied left to right, so ``"X1 Z1"`` parses to ``w^-1 Z1 X1``.
    """
    if not text.split():
        raise ParseError("empty Pauli word (write 'I' for the identity)")
    out = PauliWord.identity(d, n)
    for tok in text.split():
        m = _TOKEN.match(tok)
        if m is None:
            raise ParseError(f"bad Pauli token {tok!r}")
        head, wire, power = m.group(1), m.group(2), m.group(3)
        k = int(power) if power is not None else 1
        if head == "I":
            continue
        if head == "w":
            out = out.with_phase(out.phase + k)
            continue
        w = int(wire) - 1
        if not 0 <= w < n:
            raise ParseError(f"wire {wire} out of range 1..{n}")
        factor = PauliWord.single(d, n, w, z=k) if head[0] == "Z" else PauliWord.single(d, n, w, x=k)
        out = pauli_mul(out, factor)
    return out
