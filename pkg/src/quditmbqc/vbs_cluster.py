"""Cluster states, valence-bond-solid states and the site projection between them.

A VBS state places one bond ``|H> = C_Z |+>|+>`` on every lattice edge; each
site owns one half-bond qudit per incident edge, plus an optional input leg
holding a supplied one-qudit state.  Projecting every site with
``sum_j |j~><j|...<j|`` and renormalising yields the cluster state built
from ``|+>`` (or the inputs) and one ``C_Z`` per edge.

Lattice description files::

    kind chain 4        # or: kind grid 2 2  /  kind plus
    input 1 psi.state   # optional, 1-indexed site and a state dump file
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .circuit import CZ
from .dense_sim import StateVector, apply, bond_state, fidelity_up_to_phase, parse_state, plus_state
from .errors import DimensionError, ParseError, ZeroProjectionError
from .qudit_algebra import modulus

MAX_DENSE = 3**12  # at most 12 qudits at d = 3


@dataclass(frozen=True)
class Lattice:
    """Sites ``0..n_sites-1`` and undirected edges (pairs of distinct sites)."""

    kind: str
    n_sites: int
    edges: tuple[tuple[int, int], ...]
    shape: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        seen = set()
        for a, b in self.edges:
            if a == b or not (0 <= a < self.n_sites and 0 <= b < self.n_sites):
                raise ValueError(f"bad edge {(a, b)}")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)

    @classmethod
    def chain(cls, length: int) -> Lattice:
        if length < 1:
            raise ValueError("chain needs at least one site")
        return cls("chain", length, tuple((i, i + 1) for i in range(length - 1)), (length,))

    @classmethod
    def grid(cls, rows: int, cols: int) -> Lattice:
        if rows < 1 or cols < 1:
            raise ValueError("grid needs positive dimensions")
        edges = []
        for r in range(rows):
            for c in range(cols):
                s = r * cols + c
                if c + 1 < cols:
                    edges.append((s, s + 1))
                if r + 1 < rows:
                    edges.append((s, s + cols))
        return cls("grid", rows * cols, tuple(edges), (rows, cols))

    @classmethod
    def plus(cls) -> Lattice:
        """A centre site 0 with four neighbours 1..4."""
        return cls("plus", 5, tuple((0, k) for k in range(1, 5)))

    def neighbours(self, site: int) -> list[int]:
        return [b if a == site else a for a, b in self.edges if site in (a, b)]

    def half_bonds(self) -> list[tuple[int, int]]:
        """``(site, edge_index)`` for every VBS qudit, bond by bond."""
        out = []
        for e, (a, b) in enumerate(self.edges):
            out.extend([(a, e), (b, e)])
        return out


def _check_size(n_qudits: int, d: int) -> None:
    if d**n_qudits > MAX_DENSE:
        raise DimensionError(f"{n_qudits} qudits at d={d} exceed the dense-simulation cap")


def _input_vector(inputs: Mapping[int, StateVector | np.ndarray] | None, site: int, d: int) -> np.ndarray | None:
    if not inputs or site not in inputs:
        return None
    v = inputs[site]
    amps = v.amps if isinstance(v, StateVector) else np.asarray(v, dtype=complex)
    if amps.shape != (d,):
        raise DimensionError(f"input for site {site} must be a one-qudit state")
    return amps / np.linalg.norm(amps)


def build_cluster(
    lat: Lattice,
    d: int,
    inputs: Mapping[int, StateVector | np.ndarray] | None = None,
    edge_order: Sequence[int] | None = None,
) -> StateVector:
    """``|+>`` (or the given input) on every site, then ``C_Z`` on every edge."""
    d = modulus(d).d
    _check_size(lat.n_sites, d)
    amps = np.ones(1, dtype=complex)
    for s in range(lat.n_sites):
        v = _input_vector(inputs, s, d)
        amps = np.kron(amps, plus_state(d).amps if v is None else v)
    state = StateVector(d, lat.n_sites, amps)
    order = range(len(lat.edges)) if edge_order is None else edge_order
    for e in order:
        state = apply(state, CZ(*lat.edges[e]))
    return state


@dataclass(frozen=True, eq=False)
class VBSState:
    """VBS state together with the site owning each of its qudits."""

    state: StateVector
    owners: tuple[int, ...]  # owners[q] = site of VBS qudit q


def build_vbs(
    lat: Lattice,
    d: int,
    inputs: Mapping[int, StateVector | np.ndarray] | None = None,
) -> VBSState:
    """Tensor product of ``|H>`` bonds (edge order) followed by input legs (site order).

    Sites without bonds or an input receive a ``|+>`` leg.
    """
    d = modulus(d).d
    inputs = dict(inputs or {})
    for s in range(lat.n_sites):
        # an isolated site still needs one qudit to project onto
        if s not in inputs and not lat.neighbours(s):
            inputs[s] = plus_state(d)
    legs = sorted(inputs)
    n_q = 2 * len(lat.edges) + len(legs)
    _check_size(n_q, d)
    amps = np.ones(1, dtype=complex)
    owners: list[int] = []
    h = bond_state(d).amps
    for a, b in lat.edges:
        amps = np.kron(amps, h)
        owners.extend([a, b])
    for s in legs:
        amps = np.kron(amps, _input_vector(inputs, s, d))
        owners.append(s)
    return VBSState(StateVector(d, n_q, amps), tuple(owners))


def site_projector(k: int, d: int) -> np.ndarray:
    """``d x d^k`` matrix of ``sum_j |j~><j|^{(x) k}``; the identity for ``k = 1``."""
    if k < 1:
        raise ValueError("a site needs at least one qudit")
    d = modulus(d).d
    m = np.zeros((d, d**k), dtype=complex)
    for j in range(d):
        m[j, j * sum(d**i for i in range(k))] = 1.0
    return m


def _merge_axes(t: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Diagonal over ``axes``; the merged axis replaces the first of them."""
    letters = string.ascii_letters
    if t.ndim > len(letters):
        raise DimensionError("too many axes")
    first = min(axes)
    src = []
    for i in range(t.ndim):
        src.append(letters[first] if i in axes else letters[i])
    dst = [letters[i] for i in range(t.ndim) if i not in axes or i == first]
    return np.einsum("".join(src) + "->" + "".join(dst), t)


def project_sites(
    vbs: VBSState,
    sequential: bool = False,
) -> StateVector:
    """Apply every site projector, renormalise and order qudits by site.

    With ``sequential`` a site with ``k`` qudits is contracted by ``k - 1``
    pairwise projections ``sum_j |j~><j|<j|`` instead of one shot.
    """
    d = vbs.state.d
    t = vbs.state.tensor()
    owners = list(vbs.owners)
    for site in sorted(set(owners)):
        while True:
            axes = [i for i, o in enumerate(owners) if o == site]
            if len(axes) < 2:
                break
            merge = axes[:2] if sequential else axes
            t = _merge_axes(t, merge)
            for a in sorted(merge[1:], reverse=True):
                owners.pop(a)
    order = sorted(range(len(owners)), key=lambda i: owners[i])
    t = np.transpose(t, order)
    amps = t.reshape(-1)
    norm = np.linalg.norm(amps)
    if norm < 1e-12:
        raise ZeroProjectionError("site projection annihilated the state")
    return StateVector(d, len(owners), amps / norm)


def project_vbs_to_cluster(
    lat: Lattice,
    d: int,
    inputs: Mapping[int, StateVector | np.ndarray] | None = None,
    sequential: bool = False,
) -> tuple[StateVector, float]:
    """Projected VBS state and its fidelity with the directly built cluster."""
    vbs = build_vbs(lat, d, inputs)
    projected = project_sites(vbs, sequential=sequential)
    cluster = build_cluster(lat, d, inputs)
    return projected, fidelity_up_to_phase(projected, cluster)


# -- lattice file ---------------------------------------------------------------------

def parse_lattice(text: str, d: int, base: Path | None = None) -> tuple[Lattice, dict[int, StateVector]]:
    lat = None
    inputs: dict[int, StateVector] = {}
    pending = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        try:
            if toks[0] == "kind":
                if toks[1:2] == ["chain"] and len(toks) == 3:
                    lat = Lattice.chain(int(toks[2]))
                elif toks[1:2] == ["grid"] and len(toks) == 4:
                    lat = Lattice.grid(int(toks[2]), int(toks[3]))
                elif toks[1:] == ["plus"]:
                    lat = Lattice.plus()
                else:
                    raise ParseError(f"unknown lattice {' '.join(toks[1:])!r}")
            elif toks[0] == "input" and len(toks) == 3:
                pending.append((lineno, int(toks[1]) - 1, toks[2]))
            else:
                raise ParseError(f"unrecognised line {line!r}")
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    if lat is None:
        raise ParseError("lattice file needs a 'kind' line")
    for lineno, site, fname in pending:
        if not 0 <= site < lat.n_sites:
            raise ParseError(f"line {lineno}: site {site + 1} outside 1..{lat.n_sites}")
        path = Path(fname) if base is None else base / fname
        try:
            inputs[site] = parse_state(path.read_text(), d=d, n=1)
        except OSError as exc:
            raise ParseError(f"line {lineno}: cannot read {fname}") from exc
    return lat, inputs
