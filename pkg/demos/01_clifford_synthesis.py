"""
Clifford synthesis over Z_d
===========================

A Clifford on n qudits is pinned down, up to a global phase and a Pauli,
by its symplectic tableau: where each Z_i and X_i goes under conjugation.
This script builds a tableau, synthesizes a circuit over {F, S, CX} for it
and checks the result two ways.
"""

# %%
import numpy as np

from quditmbqc import (
    circuit_to_tableau,
    circuit_unitary,
    expand_macros,
    format_circuit,
    format_tableau,
    random_symplectic,
    synthesize_clifford,
    tableau_from_unitary,
)

rng = np.random.default_rng(7)
d, n = 3, 2

# %%
# A random element of Sp(4, Z_3).  Column 2i is the image of Z_i, column
# 2i+1 the image of X_i.
target = random_symplectic(d, n, rng)
print(format_tableau(target))

# %%
# The synthesized circuit uses a few macro gates (CP, SWAP, ...) that are
# themselves short words in F, S and CX.
circ = synthesize_clifford(target)
print(format_circuit(circ))
flat = expand_macros(circ)
print(f"{len(circ)} atoms with macros, {len(flat)} atoms over {sorted(flat.kinds())}")

# %%
# Check 1: the tableau of the circuit, computed symbolically, is the target.
print("exact tableau match:", circuit_to_tableau(flat) == target)

# %%
# Check 2: conjugate every Pauli generator by the dense unitary.  Each image
# must be a Pauli word times a clean power of omega.
got, phases = tableau_from_unitary(circuit_unitary(flat), d, n)
print("dense tableau match:", got == target)
print("generator phases (powers of omega):", phases)
