"""
Compiling circuits to one-qudit measurements
============================================

A circuit over {U(c), CZ} becomes a sequence of single-qudit measurements
on a cluster.  Each outcome leaves a Pauli byproduct; the compiler tracks
them in a Pauli frame and adapts later measurement bases to it.  When every
gate is Clifford the frame can be pushed through classically, so all
measurements can happen at once.
"""

# %%
import numpy as np

from quditmbqc import (
    CZ,
    GateCircuit,
    U,
    adaptive_depth,
    apply_circuit,
    compile_circuit,
    enumerate_pattern,
    execute_pattern,
    fidelity_up_to_phase,
    format_pattern,
    random_state,
)

rng = np.random.default_rng(5)
d = 3
w = np.exp(2j * np.pi / d)

# %%
circ = GateCircuit(d, 2, [U(0, tuple(np.exp(2j * np.pi * rng.random(d)))), CZ(0, 1), U(1, (1, w, 1))])
pat = compile_circuit(circ)
print(format_pattern(pat))

# %%
# One sampled run: undo the final frame and compare with the circuit.
psi = random_state(d, 2, rng)
res = execute_pattern(pat, psi, seed=0)
print("frame:", res.frame)
print("fidelity:", round(fidelity_up_to_phase(res.corrected(), apply_circuit(psi, circ)), 12))

# %%
# Every branch.  Branches that reach the same frame and state are merged,
# which keeps the 3^10 outcome strings manageable.
results = enumerate_pattern(pat, psi)
print(f"{sum(r.multiplicity for r in results)} outcome strings in {len(results)} distinct branches")
print("worst fidelity:", round(min(fidelity_up_to_phase(r.corrected(), apply_circuit(psi, circ)) for r in results), 12))

# %%
# Depth: without folding, each measurement waits for the outcomes feeding its
# frame.  Folding Clifford gates removes every dependency.
clifford = GateCircuit(d, 2, [U(0, (1, 1, 1)), CZ(0, 1), U(1, (1, w, 1)), U(0, (1, w, 1)), CZ(0, 1)])
print("depth, plain: ", adaptive_depth(compile_circuit(clifford)))
print("depth, folded:", adaptive_depth(compile_circuit(clifford, fold_clifford=True)))
clifford.append(U(0, (1, np.exp(0.7j), 1)))
print("depth, folded + one non-Clifford gate:", adaptive_depth(compile_circuit(clifford, fold_clifford=True)))
