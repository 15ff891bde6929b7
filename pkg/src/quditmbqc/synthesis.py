"""Constructive Clifford synthesis over the gate set {C_X, F, S}.

Given any symplectic tableau, :func:`synthesize_clifford` returns a circuit
whose phase-free action equals it exactly.  The construction is recursive on
the number of wires:

1. :func:`move_to_first_qudit` finds ``W`` sending the target images of
   ``Z_1`` and ``X_1`` to words acting as ``Z`` and ``X`` on wire 1,
2. :func:`build_u` realises ``X_1 -> X (x) P'`` and ``Z_1 -> Z (x) Q'`` with a
   fan of controlled Paulis sandwiched by ``F_1``,
3. what remains fixes wire 1 and is a symplectic map on wires 2..n.

Macros (``X``, ``Z``, ``CZ``, ``CP``, ``SWAP``) may appear in the output;
:func:`expand_macros` flattens them into F, S and CX only.
"""

from __future__ import annotations

import itertools

import numpy as np

from .circuit import CP, CX, SWAP, F, GateAtom, GateCircuit, S
from .errors import NotSymplecticError
from .qudit_algebra import PauliWord, modulus, symplectic_form
from .tableau import (
    SymplecticTableau,
    circuit_to_tableau,
    compose,
    conjugate_word,
    is_symplectic,
)

BASIC = ("F", "S", "CX")


# -- one qudit: SL(2, Z_d) ------------------------------------------------------

def _shear(k: int, d: int) -> np.ndarray:
    return np.array([[1, k % d], [0, 1]], dtype=np.int64)


_MF = np.array([[0, 1], [-1, 0]], dtype=np.int64)


def sl2_decompose(m: np.ndarray, d: int, wire: int = 0, n: int = 1) -> GateCircuit:
    """Word in F and S (single-wire atoms) whose tableau is ``m``.

    Reduction: make the lower-left entry non-zero (one F), shear the top-left
    entry to 1, clear the lower-left with a lower shear ``F^-1 S^-k F`` and
    finally clear the upper-right with a shear.  The word has at most
    ``3(d - 1)`` S atoms and 7 F atoms.
    """
    d = modulus(d).d
    m = np.asarray(m, dtype=np.int64) % d
    if m.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    if (m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]) % d != 1:
        raise NotSymplecticError(f"det of {m.tolist()} is not 1 mod {d}")

    # generators g applied on the left, in order, until the matrix is I
    left: list[tuple[str, int]] = []

    def push(kind: str, k: int = 1) -> None:
        nonlocal m
        if kind == "S":
            k %= d
            if k == 0:
                return
            m = (_shear(k, d) @ m) % d
        else:
            m = (_MF @ m) % d
        left.append((kind, k))

    if not np.array_equal(m, np.eye(2, dtype=np.int64)):
        if m[1, 0] == 0:
            push("F")
        # top-left -> 1
        push("S", (1 - m[0, 0]) * pow(int(m[1, 0]), -1, d))
        # lower shear by -c is F^-1 S^{c} F as a left factor: F first, then S^c, then F^3
        c = int(m[1, 0])
        push("F")
        push("S", c)
        push("F")
        push("F")
        push("F")
        push("S", -m[0, 1])
    assert np.array_equal(m, np.eye(2, dtype=np.int64))

    # g_r ... g_1 m0 = I  =>  m0 = g_1^-1 ... g_r^-1, so g_r^-1 acts first
    circ = GateCircuit(d, n)
    for kind, k in reversed(left):
        if kind == "F":
            circ.extend([F(wire)] * 3)
        else:
            circ.extend([S(wire)] * ((d - k) % d))
    return _cancel_f4(circ)


def _cancel_f4(circ: GateCircuit) -> GateCircuit:
    """Drop runs of four consecutive F on one wire (F^4 = I exactly)."""
    out: list[GateAtom] = []
    for a in circ:
        out.append(a)
        if len(out) >= 4 and all(x.kind == "F" and x.wires == a.wires for x in out[-4:]):
            del out[-4:]
    return GateCircuit(circ.d, circ.n, out)


# -- derived gates ------------------------------------------------------------------

def derived_gate(kind: str, d: int, s: int = 0, t: int = 0) -> GateCircuit:
    """Expansion of a library gate into F, S and CX on wires 0 (and 1).

    * ``Z = F^2 S^-1 F^2 S``
    * ``X = F Z^-1 F^-1``
    * ``C_Z(1,2) = F_2 C_X(1,2) F_2^-1``
    * ``C_{X^s Z^t} = C_X^s C_Z^t (S Z^-1)_1^{st}``
    * ``SWAP = C_X(1,2) C_X(2,1)^-1 C_X(1,2) F_2^2``

    (operator products, rightmost first; the returned circuits are in
    application order).
    """
    d = modulus(d).d
    if kind == "Z":
        atoms = [S(0), F(0), F(0)] + [S(0)] * (d - 1) + [F(0), F(0)]
        return GateCircuit(d, 1, atoms)
    if kind == "X":
        z_inv = derived_gate("Z", d).atoms * (d - 1)
        return GateCircuit(d, 1, [F(0)] * 3 + z_inv + [F(0)])
    if kind == "CZ":
        return GateCircuit(d, 2, [F(1)] * 3 + [CX(0, 1), F(1)])
    if kind == "CP":
        s, t = s % d, t % d
        z_inv = derived_gate("Z", d).atoms * (d - 1)
        sz_inv = z_inv + [S(0)]
        atoms = sz_inv * ((s * t) % d)
        atoms += derived_gate("CZ", d).atoms * t
        atoms += [CX(0, 1)] * s
        return GateCircuit(d, 2, atoms)
    if kind == "SWAP":
        atoms = [F(1), F(1), CX(0, 1)] + [CX(1, 0)] * (d - 1) + [CX(0, 1)]
        return GateCircuit(d, 2, atoms)
    raise ValueError(f"no derived expansion for {kind!r}")


def expand_atom(atom: GateAtom, d: int) -> list[GateAtom]:
    if atom.kind in BASIC:
        return [atom]
    if atom.kind in ("X", "Z"):
        w = atom.wires[0]
        return [a.on(w) for a in derived_gate(atom.kind, d)]
    if atom.kind in ("CZ", "CP", "SWAP"):
        s, t = atom.params if atom.kind == "CP" else (0, 0)
        ws = atom.wires
        return [a.on(*(ws[i] for i in a.wires)) for a in derived_gate(atom.kind, d, s, t)]
    raise ValueError(f"{atom.kind} is not a Clifford library gate")


def expand_macros(circ: GateCircuit) -> GateCircuit:
    """Flatten every macro so only F, S and CX remain."""
    out = GateCircuit(circ.d, circ.n)
    for a in circ:
        out.extend(expand_atom(a, circ.d))
    return out


# -- multi-qudit reduction steps --------------------------------------------------

def _wire_det(p: PauliWord, q: PauliWord, i: int) -> int:
    a, b = p.block(i)
    c, e = q.block(i)
    return (a * e - b * c) % p.d


def _conj(circ: GateCircuit, *words: PauliWord) -> list[PauliWord]:
    t = circuit_to_tableau(circ)
    return [conjugate_word(t, w) for w in words]


def normalize_det_one_row(p: PauliWord, q: PauliWord) -> tuple[GateCircuit, PauliWord, PauliWord, int]:
    """Make some wire ``j`` carry a determinant-one 2x2 block.

    Requires ``(p, q) = 1``.  Picks the smallest ``j`` with non-zero block
    determinant; if that determinant is not already 1, clears ``b_j`` with
    ``F S^g`` and applies ``C_{X^s Z^t}`` from ``j`` to the smallest other
    wire ``k`` with a non-zero determinant, ``(s, t)`` lexicographically
    smallest.  Returns the circuit, the transformed words and ``j``.
    """
    d, n = p.d, p.n
    if symplectic_form(p, q) != 1:
        raise NotSymplecticError("normalize_det_one_row needs (p, q) = 1")
    p, q = p.without_phase(), q.without_phase()
    dets = [_wire_det(p, q, i) for i in range(n)]
    j = next(i for i, v in enumerate(dets) if v)
    circ = GateCircuit(d, n)
    if dets[j] == 1:
        return circ, p, q, j
    k = next(i for i, v in enumerate(dets) if v and i != j)

    a_j, b_j = p.block(j)
    if b_j:
        g = (-a_j * pow(b_j, -1, d)) % d
        circ.extend([S(j)] * g + [F(j)])
        p, q = _conj(circ, p, q)
    a_j, b_j = p.block(j)
    d_j = q.x_exp(j)
    a_k, b_k = p.block(k)
    target = pow(d_j, -1, d)
    s, t = next(
        (s, t)
        for s, t in itertools.product(range(d), repeat=2)
        if (a_j - s * a_k + t * b_k) % d == target
    )
    step = GateCircuit(d, n, [CP(s, t, j, k)])
    p, q = _conj(step, p, q)
    circ.extend(step)
    assert _wire_det(p, q, j) == 1
    return circ, p, q, j


def move_to_first_qudit(p: PauliWord, q: PauliWord) -> tuple[GateCircuit, PauliWord, PauliWord]:
    """Find ``W`` with ``p -> Z (x) P'`` and ``q -> X (x) Q'`` on wire 0.

    Requires ``(p, q) = 1`` (the commutation exponent of ``(Z, X)``).  ``W``
    is the determinant-one normalisation, a SWAP of wires 0 and ``j``, then
    the one-qudit map ``[[d_j, -c_j], [-b_j, a_j]]`` on wire 0.
    """
    d, n = p.d, p.n
    p, q = p.without_phase(), q.without_phase()
    circ, _, _, j = normalize_det_one_row(p, q)
    if j != 0:
        circ.append(SWAP(0, j))
    p1, q1 = _conj(circ, p, q)
    a, b = p1.block(0)
    c, e = q1.block(0)
    local = np.array([[e, -c], [-b, a]], dtype=np.int64)
    circ.extend(sl2_decompose(local, d, wire=0, n=n))
    out_p, out_q = _conj(circ, p, q)
    return circ, out_p, out_q


def build_u(bar_x1: PauliWord, bar_z1: PauliWord) -> GateCircuit:
    """Circuit ``U`` with ``X_1 -> bar_x1`` and ``Z_1 -> bar_z1``.

    Requires wire-0 blocks ``X`` and ``Z`` and ``(bar_z1, bar_x1) = 1``.
    ``U = F_1 Q'_impl F_1^-1 P'_impl`` where ``P'_impl`` is the fan of
    ``C_{X^{b_i} Z^{a_i}}(1, i)`` built from the tail of ``bar_x1`` and
    ``Q'_impl`` the same for ``bar_z1``.
    """
    d, n = bar_x1.d, bar_x1.n
    if bar_x1.block(0) != (0, 1) or bar_z1.block(0) != (1, 0):
        raise ValueError("build_u needs X and Z on the first wire")
    if symplectic_form(bar_z1, bar_x1) != 1:
        raise NotSymplecticError("build_u needs (bar_z1, bar_x1) = 1")

    def fan(word: PauliWord) -> list[GateAtom]:
        out = []
        for i in range(1, n):
            a, b = word.block(i)
            if a or b:
                out.append(CP(b, a, 0, i))
        return out

    atoms = fan(bar_x1) + [F(0)] * 3 + fan(bar_z1) + [F(0)]
    return GateCircuit(d, n, atoms)


def synthesize_clifford(target: SymplecticTableau) -> GateCircuit:
    """Circuit (with macros) whose tableau equals ``target`` exactly."""
    if not is_symplectic(target):
        raise NotSymplecticError("target tableau is not symplectic")
    d, n = target.d, target.n
    if n == 1:
        return sl2_decompose(target.matrix, d)

    bar_z1, bar_x1 = target.z_image(0), target.x_image(0)
    w_circ, _, _ = move_to_first_qudit(bar_z1, bar_x1)
    w_tab = circuit_to_tableau(w_circ)
    moved = compose(target, w_tab)  # W T: the target followed by W
    u_circ = build_u(moved.x_image(0), moved.z_image(0))
    u_tab = circuit_to_tableau(u_circ)
    rest = compose(moved, u_tab.inverse())  # U^-1 W T fixes wire 0
    m = rest.matrix
    if not (np.array_equal(m[:2, :], np.eye(2 * n, dtype=np.int64)[:2, :]) and not m[2:, :2].any()):
        raise AssertionError("first-wire reduction failed")
    sub = SymplecticTableau(d, n - 1, m[2:, 2:])
    v_circ = synthesize_clifford(sub).widened(n, offset=1)
    return _cancel_periods(v_circ + u_circ + w_circ.inverse())


def _cancel_periods(circ: GateCircuit) -> GateCircuit:
    """Drop ``F^4`` and ``S^d`` runs on a wire, looking past gates on other wires."""
    period = {"F": 4, "S": circ.d}
    out: list[GateAtom | None] = []
    stacks: list[list[int]] = [[] for _ in range(circ.n)]
    for a in circ:
        if a.kind in period:
            stack = stacks[a.wires[0]]
            run = 0
            while run < len(stack) and out[stack[-1 - run]] == a:
                run += 1
            if run + 1 == period[a.kind]:
                for _ in range(run):
                    out[stack.pop()] = None
                continue
        for w in a.wires:
            stacks[w].append(len(out))
        out.append(a)
    return GateCircuit(circ.d, circ.n, [a for a in out if a is not None])
