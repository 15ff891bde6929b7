"""
Universality from U(c) alone
============================

Three ingredients: the d^2 projectors drawn from d + 1 mutually unbiased
bases span all Hermitian operators; any diagonal gate is F^3 U(c); and a
rotation about a Pauli eigenvector is a Clifford conjugate of a diagonal.
"""

# %%
import numpy as np

from quditmbqc import PauliWord, circuit_unitary, diag_from_uc, hermitian_basis, mub_bases, numerical_rank
from quditmbqc.dense_sim import matrices_equal_up_to_phase
from quditmbqc.universality import rotation_gate, rotation_matrix

# %%
for d in (3, 5, 7):
    m = mub_bases(d)
    print(f"d={d}: {len(m.bases)} bases, overlap deviation {m.max_cross_deviation():.1e}, "
          f"projector rank {numerical_rank(hermitian_basis(m))} of {d * d}")

# %%
d = 5
rng = np.random.default_rng(2)
c = np.exp(2j * np.pi * rng.random(d))
circ = diag_from_uc(tuple(c))
print([a.kind for a in circ], matrices_equal_up_to_phase(circuit_unitary(circ), np.diag(c)))

# %%
# exp(i theta |lambda><lambda|) for the omega^2-eigenvector of X Z^3.
p = PauliWord(d, 0, (3, 1))
circ = rotation_gate(p, 2, 0.4)
print(f"{len(circ)} U atoms; matches the dense rotation:",
      matrices_equal_up_to_phase(circuit_unitary(circ), rotation_matrix(p, 2, 0.4)))
