"""Compile ``{U(c), C_Z}`` circuits into one-qudit measurement patterns.

Execution model: each wire owns one live cluster qudit.  A measurement site
attaches a fresh ``|+>`` qudit to its wire, entangles it with ``C_Z`` and
measures the old qudit, so the logical state hops one qudit along the chain.

* ``Bprime`` site with phases ``c``: basis ``{U(c)^dagger |s>}``; outcome
  ``s`` applies ``X^{-s} U(c)``.
* ``X`` site: basis ``{F|s>}``; outcome ``s`` applies ``X^{s} F``.
* ``entangle a b``: ``C_Z`` between the live qudits of two wires.

The Pauli frame ``Z^z X^x`` per wire is the error carried by the live qudit,
``actual = frame . ideal``.  Frame exponents are linear in the outcomes, so
the compiler tracks them as :class:`LinearForm` objects and reads dependency
sets off their support; the executor evaluates the same update rules on
integers.

Pattern file::

    d 3
    n 2
    site 1 wire 1 basis Bprime c=0,1/3,0 deps - shiftrule xframe
    entangle 1 2
    site 2 wire 1 basis X c=- deps - shiftrule none
    correct wire 1 sub xframe
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from .circuit import CZ, GateCircuit, format_turn, parse_turn, phase_to_turns
from .dense_sim import (
    StateVector,
    apply,
    apply_matrix,
    check_phases,
    clock_matrix,
    fourier_matrix,
    measure,
    permute_wires,
    plus_state,
    shift_matrix,
    uc_matrix,
)
from .errors import DimensionError, ParseError
from .qudit_algebra import PauliWord, modulus
from .tableau import pauli_image
from .teleport import shift_phases

__all__ = [
    "LinearForm",
    "Site",
    "Entangle",
    "MeasurementPattern",
    "PauliFrame",
    "ExecutionResult",
    "compile_circuit",
    "execute_pattern",
    "enumerate_pattern",
    "output_correction",
    "corrected_distribution",
    "is_clifford_uc",
    "adaptive_depth",
    "site_depths",
    "format_pattern",
    "parse_pattern",
]


# -- linear forms over outcomes ------------------------------------------------------

@dataclass(frozen=True)
class LinearForm:
    """``sum_k coeff_k * s_k`` over Z_d, keyed by site id."""

    d: int
    terms: tuple[tuple[int, int], ...] = ()

    @classmethod
    def of(cls, d: int, coeffs: Mapping[int, int]) -> LinearForm:
        return cls(d, tuple(sorted((k, v % d) for k, v in coeffs.items() if v % d)))

    @classmethod
    def var(cls, d: int, site: int) -> LinearForm:
        return cls.of(d, {site: 1})

    def _combine(self, other: LinearForm | int, sign: int) -> LinearForm:
        if isinstance(other, int):
            if other % self.d:
                raise ValueError("linear forms carry no constant term")
            return self
        acc = dict(self.terms)
        for k, v in other.terms:
            acc[k] = acc.get(k, 0) + sign * v
        return LinearForm.of(self.d, acc)

    def __add__(self, other: LinearForm | int) -> LinearForm:
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other: LinearForm | int) -> LinearForm:
        return self._combine(other, -1)

    def __neg__(self) -> LinearForm:
        return LinearForm.of(self.d, {k: -v for k, v in self.terms})

    def __rmul__(self, k: int) -> LinearForm:
        return LinearForm.of(self.d, {s: int(k) * v for s, v in self.terms})

    __mul__ = __rmul__

    def __mod__(self, d: int) -> LinearForm:
        return self

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.terms)

    def evaluate(self, outcomes: Mapping[int, int]) -> int:
        return sum(v * outcomes[k] for k, v in self.terms) % self.d

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{v}*s{k}" for k, v in self.terms)


Expr = Union[int, LinearForm]


# -- frame update rules ---------------------------------------------------------------
# Each rule maps the incoming frame (z, x) of the measured wire and the outcome s
# to the outgoing frame; they work on ints and LinearForms alike.

def _bprime_update(z: Expr, x: Expr, s: Expr, d: int) -> tuple[Expr, Expr]:
    # X^-s U(c') Z^z X^x, with c' = c shifted by -x, equals Z^x X^{-z-s} U(c)
    return x % d, (-z - s) % d


def _xsite_update(z: Expr, x: Expr, s: Expr, d: int) -> tuple[Expr, Expr]:
    # X^s F Z^z X^x = Z^x X^{s-z} F
    return x % d, (s - z) % d


def _clifford_update(m: np.ndarray, z: Expr, x: Expr, s: Expr, d: int) -> tuple[Expr, Expr]:
    # X^-s U (Z^z X^x) U^dagger U with the conjugated Pauli read off the tableau
    nz = int(m[0, 0]) * z + int(m[0, 1]) * x
    nx = int(m[1, 0]) * z + int(m[1, 1]) * x - s
    return nz % d, nx % d


def _entangle_update(fa: tuple[Expr, Expr], fb: tuple[Expr, Expr], d: int) -> tuple[tuple[Expr, Expr], tuple[Expr, Expr]]:
    (za, xa), (zb, xb) = fa, fb
    return ((za + xb) % d, xa), ((zb + xa) % d, xb)


# -- Clifford detection -------------------------------------------------------------

def _uc_tableau(c: Sequence[complex], tol: float = 1e-9) -> np.ndarray | None:
    """2x2 action of ``U(c)`` on ``(z, x)`` exponents, or ``None`` if not Clifford."""
    c = check_phases(c, len(c))
    d = len(c)
    u = uc_matrix(c)
    cols = []
    for z, x in ((1, 0), (0, 1)):
        img = pauli_image(u, PauliWord(d, 0, (z, x)), tol)
        if img is None:
            return None
        cols.append(img.exps)
    return np.array(cols, dtype=np.int64).T


def is_clifford_uc(c: Sequence[complex], d: int | None = None, tol: float = 1e-9) -> bool:
    """True iff ``U(c)`` maps ``X`` and ``Z`` to phased Pauli words."""
    if d is not None and len(c) != modulus(d).d:
        raise DimensionError(f"phase vector must have length d={d}")
    return _uc_tableau(c, tol) is not None


# -- pattern types ---------------------------------------------------------------------

@dataclass(frozen=True)
class Site:
    """One measurement.  ``shiftrule`` is ``"xframe"`` (adaptive) or ``"none"``."""

    id: int
    wire: int
    basis: str
    c: tuple[complex, ...] | None = None
    deps: tuple[int, ...] = ()
    shiftrule: str = "none"

    def __post_init__(self) -> None:
        if self.basis not in ("Bprime", "X"):
            raise ValueError(f"unknown basis {self.basis!r}")
        if self.shiftrule not in ("xframe", "none"):
            raise ValueError(f"unknown shift rule {self.shiftrule!r}")
        if self.basis == "Bprime" and not self.c:
            raise ValueError("Bprime sites need a phase vector")
        if self.basis == "X" and (self.c or self.shiftrule != "none"):
            raise ValueError("X sites take no phases and never adapt")
        if self.c is not None:
            object.__setattr__(self, "c", tuple(complex(v) for v in self.c))
        object.__setattr__(self, "deps", tuple(sorted(set(self.deps))))


@dataclass(frozen=True)
class Entangle:
    wires: tuple[int, int]


Command = Union[Site, Entangle]


@dataclass
class MeasurementPattern:
    d: int
    n: int
    commands: list[Command] = field(default_factory=list)
    corrections: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        self.d = modulus(self.d).d
        if not self.corrections:
            self.corrections = tuple(range(self.n))
        seen: set[int] = set()
        for cmd in self.commands:
            wires = (cmd.wire,) if isinstance(cmd, Site) else cmd.wires
            if any(not 0 <= w < self.n for w in wires):
                raise DimensionError(f"{cmd} refers to a wire outside 0..{self.n - 1}")
            if isinstance(cmd, Entangle):
                if wires[0] == wires[1]:
                    raise DimensionError("entangle needs two distinct wires")
                continue
            if cmd.id in seen:
                raise ValueError(f"duplicate site id {cmd.id}")
            missing = [k for k in cmd.deps if k not in seen]
            if missing:
                raise ValueError(f"site {cmd.id} depends on later or unknown sites {missing}")
            if cmd.c is not None and len(cmd.c) != self.d:
                raise DimensionError(f"site {cmd.id} phase vector must have length d={self.d}")
            seen.add(cmd.id)

    @property
    def sites(self) -> list[Site]:
        return [c for c in self.commands if isinstance(c, Site)]

    def __len__(self) -> int:
        return len(self.sites)


@dataclass(frozen=True)
class PauliFrame:
    """Per-wire byproduct ``Z^z X^x`` carried by the output qudits."""

    d: int
    z: tuple[int, ...]
    x: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "z", tuple(int(v) % self.d for v in self.z))
        object.__setattr__(self, "x", tuple(int(v) % self.d for v in self.x))

    @classmethod
    def identity(cls, d: int, n: int) -> PauliFrame:
        return cls(d, (0,) * n, (0,) * n)

    @property
    def is_identity(self) -> bool:
        return not any(self.z) and not any(self.x)

    def correct(self, state: StateVector) -> StateVector:
        """Undo the frame: apply ``(Z^z X^x)^{-1}`` on every wire."""
        for w in range(state.n):
            inv = shift_matrix(self.d, -self.x[w]) @ clock_matrix(self.d, -self.z[w])
            state = apply_matrix(state, inv, [w])
        return state

    def __str__(self) -> str:
        return " ".join(f"w{w + 1}:Z^{z}X^{x}" for w, (z, x) in enumerate(zip(self.z, self.x)))


# -- compiler -----------------------------------------------------------------------------

def compile_circuit(circ: GateCircuit, fold_clifford: bool = False) -> MeasurementPattern:
    """Measurement pattern implementing ``circ`` up to the final Pauli frame.

    ``U`` atoms become one ``Bprime`` site.  ``CZ`` atoms become an entangle
    command, one ``X`` site per wire and three ``Bprime(1, ..., 1)`` sites per
    wire (``F^3 = F^dagger``), lower wire first.  With ``fold_clifford`` every
    site whose gate is Clifford keeps its basis fixed and pushes the frame
    through the gate classically, so it has no dependencies.
    """
    d, n = circ.d, circ.n
    zero = LinearForm(d)
    frame: list[tuple[Expr, Expr]] = [(zero, zero) for _ in range(n)]
    commands: list[Command] = []
    next_id = 1
    ones = (1.0 + 0j,) * d
    cache: dict[tuple[complex, ...], np.ndarray | None] = {}

    def tab(c: tuple[complex, ...]) -> np.ndarray | None:
        if c not in cache:
            cache[c] = _uc_tableau(c)
        return cache[c]

    def uc_site(w: int, c: tuple[complex, ...]) -> None:
        nonlocal next_id
        sid, s = next_id, LinearForm.var(d, next_id)
        next_id += 1
        z, x = frame[w]
        m = tab(c) if fold_clifford else None
        if m is not None:
            commands.append(Site(sid, w, "Bprime", c, (), "none"))
            frame[w] = _clifford_update(m, z, x, s, d)
        else:
            commands.append(Site(sid, w, "Bprime", c, x.support, "xframe"))
            frame[w] = _bprime_update(z, x, s, d)

    for atom in circ:
        if atom.kind == "U":
            uc_site(atom.wires[0], atom.params)
        elif atom.kind == "CZ":
            a, b = sorted(atom.wires)
            commands.append(Entangle((a, b)))
            frame[a], frame[b] = _entangle_update(frame[a], frame[b], d)
            for w in (a, b):
                sid, s = next_id, LinearForm.var(d, next_id)
                next_id += 1
                commands.append(Site(sid, w, "X"))
                frame[w] = _xsite_update(*frame[w], s, d)
            for w in (a, b):
                for _ in range(3):
                    uc_site(w, ones)
        else:
            raise ValueError(f"compile accepts U and CZ atoms only, got {atom!r}")
    return MeasurementPattern(d, n, commands, tuple(range(n)))


# -- depth ---------------------------------------------------------------------------------

def site_depths(pat: MeasurementPattern) -> dict[int, int]:
    """Measurement round of every site (sites without dependencies are round 1)."""
    depth: dict[int, int] = {}
    for site in pat.sites:
        depth[site.id] = 1 + max((depth[k] for k in site.deps), default=0)
    return depth


def adaptive_depth(pat: MeasurementPattern) -> int:
    return max(site_depths(pat).values(), default=0)


# -- execution -----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ExecutionResult:
    """Output state and frame of one outcome branch.

    ``outcomes`` is one representative outcome string; ``multiplicity`` counts
    the outcome strings merged into this branch and ``probability`` their total
    probability.
    """

    state: StateVector
    frame: PauliFrame
    outcomes: dict[int, int]
    probability: float
    multiplicity: int = 1

    def corrected(self) -> StateVector:
        return self.frame.correct(self.state)


@dataclass
class _Run:
    state: StateVector
    pos: list[int]  # register position of each wire's live qudit
    frame: list[tuple[int, int]]
    outcomes: dict[int, int]
    probability: float
    multiplicity: int = 1


def _site_basis(site: Site, x: int, d: int) -> np.ndarray:
    if site.basis == "X":
        return fourier_matrix(d).T
    c = site.c if site.shiftrule == "none" else shift_phases(site.c, -x)
    return uc_matrix(c).conj()


def _attach(run: _Run, w: int) -> tuple[StateVector, int]:
    """Add a ``|+>`` qudit entangled with wire ``w``'s live qudit; return state and old position."""
    state = run.state.kron(plus_state(run.state.d))
    old = run.pos[w]
    return apply(state, CZ(old, state.n - 1)), old


def _advance(run: _Run, site: Site, d: int, tabs: dict, mode: str, forced: int | None, rng) -> list[_Run]:
    w = site.wire
    z, x = run.frame[w]
    state, old = _attach(run, w)
    basis = _site_basis(site, x, d)
    branches = measure(state, [old], basis, mode=mode, outcome=forced, seed=rng, check=False)
    new_pos = [p - (p > old) for p in run.pos]
    new_pos[w] = state.n - 2
    out = []
    for b in branches:
        if b.state is None:
            continue
        s = b.outcome
        if site.basis == "X":
            nf = _xsite_update(z, x, s, d)
        elif site.shiftrule == "xframe":
            nf = _bprime_update(z, x, s, d)
        else:
            if site.c not in tabs:
                tabs[site.c] = _uc_tableau(site.c)
            if tabs[site.c] is None:
                raise ValueError(f"site {site.id} has no shift rule but its gate is not Clifford")
            nf = _clifford_update(tabs[site.c], z, x, s, d)
        frame = list(run.frame)
        frame[w] = nf
        outs = dict(run.outcomes)
        outs[site.id] = s
        out.append(_Run(b.state, new_pos, frame, outs, run.probability * b.probability, run.multiplicity))
    return out


def _entangle(run: _Run, cmd: Entangle, d: int) -> _Run:
    a, b = cmd.wires
    state = apply(run.state, CZ(run.pos[a], run.pos[b]))
    frame = list(run.frame)
    frame[a], frame[b] = _entangle_update(frame[a], frame[b], d)
    return _Run(state, run.pos, frame, run.outcomes, run.probability, run.multiplicity)


def _finish(run: _Run, d: int) -> ExecutionResult:
    state = permute_wires(run.state, run.pos)
    frame = PauliFrame(d, tuple(f[0] for f in run.frame), tuple(f[1] for f in run.frame))
    return ExecutionResult(state, frame, run.outcomes, run.probability, run.multiplicity)


def _start(pat: MeasurementPattern, inputs: StateVector) -> _Run:
    if inputs.d != pat.d or inputs.n != pat.n:
        raise DimensionError(f"inputs must be {pat.n} qudits of dimension {pat.d}")
    return _Run(inputs, list(range(pat.n)), [(0, 0)] * pat.n, {}, 1.0)


def execute_pattern(
    pat: MeasurementPattern,
    inputs: StateVector,
    outcomes: Sequence[int] | Mapping[int, int] | None = None,
    seed: int | np.random.Generator | None = None,
) -> ExecutionResult:
    """Run the pattern once, with forced ``outcomes`` (in site order or by id) or sampled ones."""
    d = pat.d
    sites = pat.sites
    if outcomes is not None and not isinstance(outcomes, Mapping):
        if len(outcomes) != len(sites):
            raise ValueError(f"pattern has {len(sites)} sites but {len(outcomes)} outcomes were given")
        outcomes = {s.id: int(v) % d for s, v in zip(sites, outcomes)}
    if outcomes is not None and set(outcomes) != {s.id for s in sites}:
        raise ValueError("forced outcomes must cover exactly the pattern's sites")
    rng = np.random.default_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    run = _start(pat, inputs)
    tabs: dict = {}
    for cmd in pat.commands:
        if isinstance(cmd, Entangle):
            run = _entangle(run, cmd, d)
            continue
        if outcomes is None:
            nxt = _advance(run, cmd, d, tabs, "sample", None, rng)
        else:
            nxt = _advance(run, cmd, d, tabs, "force", int(outcomes[cmd.id]) % d, rng)
        if not nxt:
            raise ArithmeticError(f"forced outcome at site {cmd.id} has zero probability")
        run = nxt[0]
    return _finish(run, d)


def _same_ray(a: StateVector, b: StateVector, tol: float = 1e-9) -> bool:
    return abs(abs(np.vdot(a.amps, b.amps)) - 1.0) < tol


def enumerate_pattern(pat: MeasurementPattern, inputs: StateVector, merge: bool = True) -> list[ExecutionResult]:
    """Every outcome branch of the pattern.

    With ``merge`` the branches reaching the same frame and the same state (up
    to phase) after a site are combined; later evolution depends on nothing
    else, so every one of the ``d^k`` outcome strings is still covered, with
    ``multiplicity`` recording how many each branch stands for.  Without it,
    all strings are walked one by one.
    """
    d = pat.d
    runs = [_start(pat, inputs)]
    tabs: dict = {}
    for cmd in pat.commands:
        if isinstance(cmd, Entangle):
            runs = [_entangle(r, cmd, d) for r in runs]
            continue
        nxt: list[_Run] = []
        for r in runs:
            nxt.extend(_advance(r, cmd, d, tabs, "enumerate", None, None))
        if merge:
            merged: list[_Run] = []
            by_frame: dict[tuple, list[_Run]] = {}
            for r in nxt:
                bucket = by_frame.setdefault(tuple(r.frame), [])
                for m in bucket:
                    if m.pos == r.pos and _same_ray(m.state, r.state):
                        m.probability += r.probability
                        m.multiplicity += r.multiplicity
                        break
                else:
                    bucket.append(r)
                    merged.append(r)
            nxt = merged
        runs = nxt
    return [_finish(r, d) for r in runs]


def output_correction(measured: int, x_exp: int, d: int | None = None) -> int:
    """Classical fix for a computational-basis readout: ``m - x`` (Z errors are invisible)."""
    v = int(measured) - int(x_exp)
    return v % d if d is not None else v


def corrected_distribution(result: ExecutionResult) -> np.ndarray:
    """Computational-basis distribution of the output after classical correction."""
    d, n = result.state.d, result.state.n
    probs = np.abs(result.state.tensor()) ** 2
    for w in range(n):
        # outcome m on wire w is relabelled m - x_w
        probs = np.roll(probs, -result.frame.x[w], axis=w)
    return probs.reshape(-1)


# -- pattern file --------------------------------------------------------------------------

def _fmt_phases(c: Sequence[complex] | None) -> str:
    if not c:
        return "-"
    return ",".join(format_turn(phase_to_turns(v)) for v in c)


def format_pattern(pat: MeasurementPattern) -> str:
    lines = [f"d {pat.d}", f"n {pat.n}"]
    for cmd in pat.commands:
        if isinstance(cmd, Entangle):
            lines.append(f"entangle {cmd.wires[0] + 1} {cmd.wires[1] + 1}")
            continue
        deps = ",".join(str(k) for k in cmd.deps) or "-"
        lines.append(
            f"site {cmd.id} wire {cmd.wire + 1} basis {cmd.basis} c={_fmt_phases(cmd.c)} "
            f"deps {deps} shiftrule {cmd.shiftrule}"
        )
    for w in pat.corrections:
        lines.append(f"correct wire {w + 1} sub xframe")
    return "\n".join(lines) + "\n"


def parse_pattern(text: str, radians: bool = False) -> MeasurementPattern:
    d = n = None
    commands: list[Command] = []
    corrections: list[int] = []
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
            elif toks[0] == "site":
                if len(toks) != 11 or toks[2] != "wire" or toks[4] != "basis" or not toks[6].startswith("c=") \
                        or toks[7] != "deps" or toks[9] != "shiftrule":
                    raise ParseError("expected 'site <id> wire <w> basis <B> c=<turns> deps <ids> shiftrule <rule>'")
                spec = toks[6][2:]
                c = None if spec == "-" else tuple(parse_turn(t, radians) for t in spec.split(","))
                deps = () if toks[8] == "-" else tuple(int(k) for k in toks[8].split(","))
                commands.append(Site(int(toks[1]), int(toks[3]) - 1, toks[5], c, deps, toks[10]))
            elif toks[0] == "entangle" and len(toks) == 3:
                commands.append(Entangle((int(toks[1]) - 1, int(toks[2]) - 1)))
            elif toks[0] == "correct" and toks[1:2] == ["wire"] and toks[3:] == ["sub", "xframe"] and len(toks) == 5:
                corrections.append(int(toks[2]) - 1)
            else:
                raise ParseError(f"unrecognised line {line!r}")
        except (ValueError, ParseError) as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    if d is None or n is None:
        raise ParseError("pattern file needs 'd' and 'n' header lines")
    modulus(d)
    try:
        return MeasurementPattern(d, n, commands, tuple(corrections))
    except (ValueError, DimensionError) as exc:
        raise ParseError(str(exc)) from exc
