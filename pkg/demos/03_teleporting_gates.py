"""
Teleporting gates through bonds
===============================

Measuring an input qudit and one half of a bond in a twisted Bell basis
moves U(c)|psi> onto the other half, up to a Pauli byproduct that depends
on the outcome.  A two-qudit version built from GHZ-type measurements
teleports CZ.
"""

# %%
import numpy as np

from quditmbqc import StateVector, fidelity_up_to_phase, random_state, teleport_cz, teleport_uc, uc_matrix
from quditmbqc.teleport import ByproductRecord, cz_branch_state, propagate_through_uc, shift_phases

rng = np.random.default_rng(3)
d = 3
psi = random_state(d, 1, rng)
c = tuple(np.exp(2j * np.pi * rng.random(d)))
ideal = StateVector(d, 1, uc_matrix(c) @ psi.amps)

# %%
# Every outcome (s, t) is equally likely and leaves Z^-t X^-s U(c)|psi>.
for b in teleport_uc(psi, c):
    err = b.byproduct[0]
    fixed = StateVector(d, 1, err.inverse().matrix() @ b.state.amps)
    print(f"(s,t)={b.outcome}  p={b.probability:.4f}  byproduct {err}  fidelity after fix {fidelity_up_to_phase(fixed, ideal):.12f}")

# %%
# A byproduct does not have to be fixed immediately.  Pushed through the next
# gate U(c2), an X error turns into a Z error and a cyclic shift of c2, so
# the next measurement just uses the shifted phases.
err = ByproductRecord(d, z=0, x=1)
c2 = tuple(np.exp(2j * np.pi * rng.random(d)))
out, c2_shifted = propagate_through_uc(err, c2)
print(f"U(c2) {err} = {out} U(c2 shifted)", np.allclose(c2_shifted, shift_phases(c2, 1)))

# %%
# CZ through the eight-qudit layout: all 3^6 = 729 outcomes.
psi1, psi2 = random_state(d, 1, rng), random_state(d, 1, rng)
worst = min(fidelity_up_to_phase(b.state, cz_branch_state(psi1, psi2, b.outcome)) for b in teleport_cz(psi1, psi2))
print(f"CZ teleport: worst fidelity over 729 branches {worst:.12f}")
