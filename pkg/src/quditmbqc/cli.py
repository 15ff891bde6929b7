"""Command-line front end.

Exit codes: 0 success, 1 parse or I/O error, 2 domain violation (non-prime
``d``, non-symplectic tableau, failed verification, ...).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .circuit import format_circuit, parse_circuit, parse_turn
from .dense_sim import (
    StateVector,
    apply_circuit,
    basis_state,
    circuit_unitary,
    dump_state,
    fidelity_up_to_phase,
    parse_state,
    random_state,
    uc_matrix,
)
from .errors import DimensionError, NotSymplecticError, ParseError, ZeroProjectionError
from .mbqc_compiler import (
    adaptive_depth,
    compile_circuit,
    corrected_distribution,
    enumerate_pattern,
    execute_pattern,
    format_pattern,
    parse_pattern,
)
from .qudit_algebra import modulus
from .synthesis import expand_macros, synthesize_clifford
from .tableau import circuit_to_tableau, parse_tableau, random_symplectic, tableau_from_unitary
from .teleport import cz_branch_state, teleport_cz, teleport_uc
from .vbs_cluster import parse_lattice, project_vbs_to_cluster

TOL = 1e-9
DENSE_CHECK_LIMIT = 3**5


class CheckFailed(Exception):
    """A verification ran to completion and reported FAIL."""


class _Parser(argparse.ArgumentParser):
    """Usage errors are parse errors: exit 1 instead of argparse's 2."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise ParseError(f"cannot write {out}: {exc.strerror}") from exc


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def _input_state(path: str | None, d: int, n: int) -> StateVector:
    if path is None:
        return basis_state(d, [0] * n)
    return parse_state(_read(path), d=d, n=n)


# -- subcommands ---------------------------------------------------------------------

def cmd_synth(args: argparse.Namespace) -> int:
    if args.tableau is not None:
        target = parse_tableau(_read(args.tableau))
    else:
        if args.d is None or args.n is None:
            raise ParseError("synth needs a tableau file or --d, --n and --seed")
        target = random_symplectic(modulus(args.d).d, args.n, np.random.default_rng(args.seed))
    circ = synthesize_clifford(target)
    if args.expand:
        circ = expand_macros(circ)
    exact = circuit_to_tableau(circ) == target
    lines = [f"tableau match: {_verdict(exact)}"]
    ok = exact
    if target.d**target.n <= DENSE_CHECK_LIMIT:
        got = tableau_from_unitary(circuit_unitary(circ), target.d, target.n)
        dense_ok = got is not None and got[0] == target
        lines.append(f"dense check: {_verdict(dense_ok)}")
        ok = ok and dense_ok
    else:
        lines.append("dense check: skipped")
    _write(format_circuit(circ), args.out)
    sys.stderr.write("\n".join(lines) + "\n")
    if not ok:
        raise CheckFailed("synthesis verification failed")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    circ = parse_circuit(_read(args.circuit), radians=args.radians)
    state = _input_state(args.input, circ.d, circ.n)
    _write(dump_state(apply_circuit(state, circ)), args.out)
    return 0


def cmd_cluster_check(args: argparse.Namespace) -> int:
    d = modulus(args.d).d
    path = Path(args.lattice)
    lat, inputs = parse_lattice(_read(args.lattice), d, base=path.parent)
    try:
        _, fid = project_vbs_to_cluster(lat, d, inputs, sequential=args.sequential)
    except ZeroProjectionError:
        fid = 0.0
    ok = abs(fid - 1) < TOL
    print(f"lattice {lat.kind} sites {lat.n_sites} edges {len(lat.edges)} d {d}")
    print(f"fidelity {fid:.9f} {_verdict(ok)}")
    if not ok:
        raise CheckFailed("projected VBS state differs from the cluster state")
    return 0


def cmd_compile(args: argparse.Namespace) -> int:
    circ = parse_circuit(_read(args.circuit), radians=args.radians)
    _write(format_pattern(compile_circuit(circ, fold_clifford=args.fold_clifford)), args.out)
    return 0


def cmd_exec(args: argparse.Namespace) -> int:
    pat = parse_pattern(_read(args.pattern), radians=args.radians)
    state = _input_state(args.input, pat.d, pat.n)
    ideal = None
    if args.circuit is not None:
        circ = parse_circuit(_read(args.circuit), radians=args.radians)
        if (circ.d, circ.n) != (pat.d, pat.n):
            raise DimensionError("circuit and pattern live on different registers")
        ideal = apply_circuit(state, circ)

    if args.enumerate:
        results = enumerate_pattern(pat, state)
        strings = sum(r.multiplicity for r in results)
        total = sum(r.probability for r in results)
        ref = ideal if ideal is not None else results[0].corrected()
        ref_dist = np.abs(ref.amps) ** 2
        worst_fid = min(fidelity_up_to_phase(r.corrected(), ref) for r in results)
        worst_dist = max(float(np.max(np.abs(corrected_distribution(r) - ref_dist))) for r in results)
        ok = abs(worst_fid - 1) < TOL and worst_dist < TOL and abs(total - 1) < TOL
        target = "circuit" if ideal is not None else "first branch"
        print(f"sites {len(pat)} outcome strings {strings} branches {len(results)}")
        print(f"total probability {total:.9f}")
        print(f"min corrected fidelity vs {target} {worst_fid:.9f}")
        print(f"max corrected distribution deviation {worst_dist:.3e}")
        print(f"contract {_verdict(ok)}")
        if not ok:
            raise CheckFailed("frame-corrected branches disagree")
        return 0

    if args.outcomes is not None:
        try:
            forced = [int(v) for v in args.outcomes.split(",")] if args.outcomes else []
        except ValueError as exc:
            raise ParseError(f"bad outcome list {args.outcomes!r}") from exc
        if len(forced) != len(pat):
            raise ParseError(f"pattern has {len(pat)} sites but {len(forced)} outcomes were given")
        res = execute_pattern(pat, state, outcomes=forced)
    else:
        res = execute_pattern(pat, state, seed=args.seed)
    print("outcomes " + (",".join(str(res.outcomes[s.id]) for s in pat.sites) or "-"))
    print(f"frame {res.frame}")
    if ideal is not None:
        fid = fidelity_up_to_phase(res.corrected(), ideal)
        print(f"corrected fidelity {fid:.9f} {_verdict(abs(fid - 1) < TOL)}")
        if abs(fid - 1) >= TOL:
            raise CheckFailed("frame-corrected output differs from the circuit")
    sys.stdout.write(dump_state(res.corrected()))
    return 0


def cmd_depth(args: argparse.Namespace) -> int:
    print(adaptive_depth(parse_pattern(_read(args.pattern), radians=args.radians)))
    return 0


def _phases(spec: str | None, d: int, rng: np.random.Generator, radians: bool) -> tuple[complex, ...]:
    if spec is None:
        return tuple(np.exp(2j * np.pi * rng.random(d)))
    toks = spec.split(",")
    if len(toks) != d:
        raise ParseError(f"--c needs exactly d={d} comma-separated phases")
    return tuple(parse_turn(t, radians) for t in toks)


def cmd_teleport_check(args: argparse.Namespace) -> int:
    d = modulus(args.d).d
    rng = np.random.default_rng(args.seed)
    psi = random_state(d, 1, rng)
    passed = total = 0
    if args.mode == "uc":
        c = _phases(args.c, d, rng, args.radians)
        u = uc_matrix(c)
        if args.outcome is not None:
            s, t = _pair(args.outcome, 2)
            branches = teleport_uc(psi, c, mode="force", outcome=(s, t))
        else:
            branches = teleport_uc(psi, c)
        for b in branches:
            expected = StateVector(d, 1, b.byproduct[0].matrix() @ u @ psi.amps)
            ok = b.state is not None and abs(fidelity_up_to_phase(b.state, expected) - 1) < TOL
            ok = ok and abs(b.probability - 1 / d**2) < TOL
            passed += ok
            total += 1
            if args.verbose or args.outcome is not None:
                print(f"outcome {b.outcome[0]},{b.outcome[1]} p {b.probability:.9f} byproduct {b.byproduct[0]} {_verdict(ok)}")
        if args.outcome is not None and b.state is not None:
            sys.stdout.write(dump_state(b.state))
    else:
        psi2 = random_state(d, 1, rng)
        outcome = _pair(args.outcome, 6) if args.outcome is not None else None
        for b in teleport_cz(psi, psi2, outcome):
            ok = b.state is not None and abs(fidelity_up_to_phase(b.state, cz_branch_state(psi, psi2, b.outcome)) - 1) < TOL
            passed += ok
            total += 1
            if args.verbose or outcome is not None:
                print(f"outcome {','.join(map(str, b.outcome))} p {b.probability:.3e} {_verdict(ok)}")
    print(f"{args.mode} d={d}: {passed}/{total} branches {_verdict(passed == total)}")
    if passed != total:
        raise CheckFailed("teleported state differs from the byproduct formula")
    return 0


def _pair(text: str, k: int) -> tuple[int, ...]:
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise ParseError(f"bad outcome {text!r}") from exc
    if len(vals) != k:
        raise ParseError(f"outcome needs {k} comma-separated integers")
    return vals


# -- parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="quditmbqc", description="Qudit Clifford synthesis, VBS cluster states and measurement patterns.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", help="synthesize a Clifford circuit from a tableau")
    s.add_argument("tableau", nargs="?", help="tableau file (omit with --d/--n/--seed for a random target)")
    s.add_argument("--d", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--expand", action="store_true", help="expand CP/SWAP/CZ/X/Z macros into F, S, CX")
    s.add_argument("--out", "-o")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("run", help="simulate a circuit on a state")
    s.add_argument("circuit")
    s.add_argument("--input", help="state file (default all |0>)")
    s.add_argument("--radians", action="store_true")
    s.add_argument("--out", "-o")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("cluster-check", help="project a VBS state and compare with the cluster state")
    s.add_argument("lattice")
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--sequential", action="store_true", help="contract each site pairwise")
    s.set_defaults(func=cmd_cluster_check)

    s = sub.add_parser("compile", help="compile a {U, CZ} circuit into a measurement pattern")
    s.add_argument("circuit")
    s.add_argument("--fold-clifford", action="store_true")
    s.add_argument("--radians", action="store_true")
    s.add_argument("--out", "-o")
    s.set_defaults(func=cmd_compile)

    s = sub.add_parser("exec", help="execute a measurement pattern")
    s.add_argument("pattern")
    s.add_argument("--input", help="state file (default all |0>)")
    s.add_argument("--circuit", help="circuit the pattern should implement")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--enumerate", action="store_true", help="check every outcome branch")
    mode.add_argument("--seed", type=int, default=0)
    mode.add_argument("--outcomes", help="comma-separated forced outcomes in site order")
    s.add_argument("--radians", action="store_true")
    s.set_defaults(func=cmd_exec)

    s = sub.add_parser("depth", help="adaptive measurement depth of a pattern")
    s.add_argument("pattern")
    s.add_argument("--radians", action="store_true")
    s.set_defaults(func=cmd_depth)

    s = sub.add_parser("teleport-check", help="enumerate teleportation branches")
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--mode", choices=("uc", "cz"), default="uc")
    s.add_argument("--c", help="comma-separated phases in turns (default random)")
    s.add_argument("--outcome", help="force one outcome: 's,t' for uc, 'r,s,t,u,v,w' for cz")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--radians", action="store_true")
    s.add_argument("--verbose", "-v", action="store_true")
    s.set_defaults(func=cmd_teleport_check)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 2
    except (DimensionError, NotSymplecticError, ZeroProjectionError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
