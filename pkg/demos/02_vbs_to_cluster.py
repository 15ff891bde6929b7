"""
From valence bonds to a cluster state
=====================================

Place a bond |H> = CZ|+>|+> on every edge of a lattice, so each site owns
one qudit per incident edge.  Projecting every site onto its "all legs
agree" subspace, sum_j |j~><j|...<j|, leaves exactly the cluster state of
the lattice.
"""

# %%
import numpy as np

from quditmbqc import Lattice, build_cluster, build_vbs, fidelity_up_to_phase, project_sites, random_state
from quditmbqc.vbs_cluster import site_projector

d = 3

# %%
# A single site with two legs: the projector is a d x d^2 map that keeps the
# diagonal |jj> components.
print(np.round(site_projector(2, d).real, 3))

# %%
for lat in [Lattice.chain(2), Lattice.chain(4), Lattice.grid(2, 2), Lattice.plus()]:
    vbs = build_vbs(lat, d)
    projected = project_sites(vbs)
    fid = fidelity_up_to_phase(projected, build_cluster(lat, d))
    print(f"{lat.kind:5s} {lat.n_sites} sites, {vbs.state.n:2d} VBS qudits -> fidelity {fid:.12f}")

# %%
# The centre of the plus lattice has four legs.  Merging them pairwise, one
# at a time, gives the same state as the one-shot projector.
vbs = build_vbs(Lattice.plus(), d)
gap = np.max(np.abs(project_sites(vbs).amps - project_sites(vbs, sequential=True).amps))
print(f"sequential vs one-shot: max amplitude gap {gap:.1e}")

# %%
# Input legs carry arbitrary states into the cluster: one bond with inputs
# psi and phi projects to CZ|psi>|phi>.
rng = np.random.default_rng(1)
inputs = {0: random_state(d, 1, rng), 1: random_state(d, 1, rng)}
vbs = build_vbs(Lattice.chain(2), d, inputs)
cluster = build_cluster(Lattice.chain(2), d, inputs)
print("with inputs:", round(fidelity_up_to_phase(project_sites(vbs), cluster), 12))
