"""Qudit one-way quantum computation: Clifford synthesis, VBS cluster states,
gate teleportation and measurement-pattern compilation for odd prime ``d``."""

from .circuit import CP, CX, CZ, SWAP, D, F, GateAtom, GateCircuit, S, U, X, Z, format_circuit, parse_circuit
from .dense_sim import (
    StateVector,
    apply_circuit,
    basis_state,
    circuit_unitary,
    dump_state,
    fidelity_up_to_phase,
    measure,
    parse_state,
    plus_state,
    random_state,
    uc_matrix,
)
from .errors import DimensionError, NotSymplecticError, ParseError, ZeroProjectionError
from .mbqc_compiler import (
    MeasurementPattern,
    PauliFrame,
    adaptive_depth,
    compile_circuit,
    corrected_distribution,
    enumerate_pattern,
    execute_pattern,
    format_pattern,
    is_clifford_uc,
    output_correction,
    parse_pattern,
)
from .qudit_algebra import Modulus, PauliWord, pauli_mul, symplectic_form
from .synthesis import derived_gate, expand_macros, sl2_decompose, synthesize_clifford
from .tableau import (
    SymplecticTableau,
    circuit_to_tableau,
    format_tableau,
    parse_tableau,
    random_symplectic,
    tableau_from_unitary,
)
from .teleport import ByproductRecord, propagate_through_cz, propagate_through_uc, teleport_cz, teleport_uc
from .universality import diag_from_uc, hermitian_basis, mub_bases, numerical_rank, rotation_gate
from .vbs_cluster import Lattice, build_cluster, build_vbs, project_sites, project_vbs_to_cluster

__version__ = "0.1.0"
