"""Command-line surface: inspection, verification suites and experiments.

Exit codes: 0 on success, 1 on usage or input errors, 2 when a verification
check fails (a fidelity off 1, an invalid channel, a missing witness).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .circuit import ParameterVector, circuit_from_json, pretty
from .costs import (
    CompileOverlap,
    Expectation,
    hamiltonian_from_text,
    w_state,
    xxx_hamiltonian,
)
from .errors import CapacityError
from .experiments import (
    EXPERIMENT_QAOA,
    EXPERIMENT_THEOREMS,
    EXPERIMENT_VQC_W,
    EXPERIMENT_VQE_XXX,
    GRAPHS,
    ExperimentConfig,
    random_transform_subset,
    run_qaoa_report,
    run_theorem_check,
    run_vqc_w,
    run_vqe_xxx,
    write_jsonl,
    write_records_csv,
)
from .noise import channel_from_json, commutator_norm, noise_model_from_json, validate_channel
from .optimize import (
    SCHEDULE_CONSTRAINED_SYMH,
    SCHEDULES,
    LocalOptimizerConfig,
    Problem,
    SweepConfig,
    run_schedule,
)
from .pauli import PauliWord
from .pulses import (
    apply_transform,
    enumerate_transforms,
    reduce_domain,
    transform_fidelity,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2

OUTPUT_DIR_ENV = "SIGMAPULSE_OUTPUT_DIR"

FIDELITY_TOL = 1e-10
SUBSET_ATTEMPTS = 20


class CliError(Exception):
    """A user-facing error carrying its exit code."""

    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits with code 1 on usage errors."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise CliError(f"{self.prog}: {message}")


def _load_json(path: str) -> dict:
    try:
        with open(path) as handle:
            return json.load(handle)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON: {exc}")


def _load_circuit(path: str):
    try:
        return circuit_from_json(_load_json(path))
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"{path}: bad circuit document: {exc}")


def _print_json(record: dict) -> None:
    print(json.dumps(record, sort_keys=True))


def _output_dir(flag_value: str | None) -> str | None:
    return flag_value or os.environ.get(OUTPUT_DIR_ENV) or None


def _transform_record(circuit, params, subset, moved, transform) -> dict:
    return {
        "generators": list(subset),
        "theta_bits": [list(b) for b in transform.theta_bits],
        "gamma_bits": [list(b) for b in transform.gamma_bits],
        "beta": list(transform.beta(params)),
        "phase_pow": transform.global_phase_pow,
        "theta": list(moved.theta),
        "gamma": list(moved.gamma),
        "fidelity": transform_fidelity(circuit, params, moved),
    }


def cmd_circuit_show(args: argparse.Namespace) -> int:
    circuit = _load_circuit(args.circuit)
    print(pretty(circuit))
    return EXIT_OK


def cmd_symmetry_verify(args: argparse.Namespace) -> int:
    circuit = _load_circuit(args.circuit)
    worst = 0.0
    produced = 0
    for seed in range(args.seeds):
        rng = np.random.default_rng(seed)
        params = ParameterVector.random(circuit, rng, gamma_mode="uniform")
        for _ in range(SUBSET_ATTEMPTS):
            subset = random_transform_subset(rng, circuit)
            try:
                moved, transform = apply_transform(circuit, params, subset)
            except ValueError:
                continue
            record = _transform_record(circuit, params, subset, moved, transform)
            record["seed"] = seed
            _print_json(record)
            produced += 1
            worst = max(worst, abs(record["fidelity"] - 1.0))
            break
    print(
        f"{produced} transforms verified, max |1 - fidelity| = {worst:.3e}",
        file=sys.stderr,
    )
    return EXIT_OK if produced and worst <= args.tol else EXIT_VERIFY


def cmd_symmetry_reduce(args: argparse.Namespace) -> int:
    circuit = _load_circuit(args.circuit)
    if args.theta is not None:
        theta = tuple(float(v) for v in args.theta.split(","))
        if len(theta) != circuit.num_theta_slots:
            raise CliError(
                f"expected {circuit.num_theta_slots} theta values, got {len(theta)}"
            )
        params = ParameterVector(
            theta=theta, gamma=(0.0,) * circuit.num_gamma_slots
        )
    else:
        rng = np.random.default_rng(args.seed)
        params = ParameterVector.random(circuit, rng, gamma_mode="uniform")
    reduced = reduce_domain(circuit, params)
    fidelity = transform_fidelity(circuit, params, reduced)
    in_domain = all(0.0 <= value < np.pi for value in reduced.theta)
    _print_json(
        {
            "theta_in": list(params.theta),
            "theta_out": list(reduced.theta),
            "gamma_out": list(reduced.gamma),
            "fidelity": fidelity,
            "in_domain": in_domain,
        }
    )
    ok = in_domain and abs(fidelity - 1.0) <= args.tol
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_symmetry_enumerate(args: argparse.Namespace) -> int:
    circuit = _load_circuit(args.circuit)
    num_slots = circuit.num_theta_slots
    if args.sample is None and num_slots > args.max_m:
        raise CliError(
            f"{num_slots} slots exceed --max-m {args.max_m};"
            " pass --sample to draw a subset sample"
        )
    rng = np.random.default_rng(args.seed)
    params = ParameterVector.random(circuit, rng, gamma_mode="uniform")
    worst = 0.0
    try:
        for subset, moved, transform in enumerate_transforms(
            circuit,
            params,
            cap=max(args.max_m, num_slots),
            sample=args.sample,
            rng=rng,
            skip_conflicts=True,
        ):
            record = _transform_record(circuit, params, subset, moved, transform)
            _print_json(record)
            worst = max(worst, abs(record["fidelity"] - 1.0))
    except CapacityError as exc:
        raise CliError(str(exc))
    return EXIT_OK if worst <= args.tol else EXIT_VERIFY


def cmd_noise_check(args: argparse.Namespace) -> int:
    channel = channel_from_json(_load_json(args.channel))
    try:
        validate_channel(channel)
        valid = True
    except ValueError:
        valid = False
    print(f"qubits:      {channel.num_qubits}")
    print(f"kraus terms: {len(channel.kraus())}")
    print(f"trace preserving: {'yes' if valid else 'NO'}")
    print(f"pauli mix:   {'yes' if channel.is_pauli_mix else 'no'}")
    if channel.num_qubits == 1:
        print("commutator norms against half-turn pulse words:")
        for letter in "XYZ":
            norm = commutator_norm(channel, PauliWord.from_letters(letter))
            print(f"  {letter}: {norm:.6e}")
    return EXIT_OK if valid else EXIT_VERIFY


def cmd_ham_diag(args: argparse.Namespace) -> int:
    if (args.n is None) == (args.file is None):
        raise CliError("pass exactly one of --n or --file")
    if args.n is not None:
        hamiltonian = xxx_hamiltonian(args.n)
        label = f"spin ring n={args.n}"
    else:
        try:
            text = Path(args.file).read_text()
        except OSError as exc:
            raise CliError(f"cannot read {args.file}: {exc}")
        hamiltonian = hamiltonian_from_text(text)
        label = args.file
    low, high = hamiltonian.eigen_extremes()
    print(f"hamiltonian: {label}")
    print(f"qubits:      {hamiltonian.n}")
    print(f"terms:       {len(hamiltonian.terms)}")
    print(f"E_min:       {low:.12g}")
    print(f"E_max:       {high:.12g}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    circuit = _load_circuit(args.circuit)
    if args.cost == "w-compile":
        cost = CompileOverlap(w_state(circuit.n))
    else:
        cost = Expectation(xxx_hamiltonian(circuit.n))
    noise_cfg = _load_json(args.noise) if args.noise else None
    noise = noise_model_from_json(noise_cfg, circuit)
    problem = Problem(circuit=circuit, cost=cost, noise=noise, name=args.cost)
    local = LocalOptimizerConfig(max_evals=args.max_evals)
    sweep = SweepConfig(num_sweeps=args.ns, hop_budget_evals=args.hop_budget)
    records = run_schedule(
        problem, args.schedule, range(args.seeds), local, sweep
    )
    for record in records:
        _print_json(record.to_json())
    out = _output_dir(args.out)
    if out:
        base = Path(out)
        base.mkdir(parents=True, exist_ok=True)
        write_jsonl(base / "sweep_records.jsonl", (r.to_json() for r in records))
        write_records_csv(
            base / "sweep_records.csv",
            "schedule",
            ((r.schedule, r) for r in records),
        )
    return EXIT_OK


def _experiment_config(args: argparse.Namespace, experiment: str) -> ExperimentConfig:
    base: dict = {}
    if args.config:
        base = _load_json(args.config)
        base.pop("experiment", None)
    if args.n is not None:
        base["n"] = args.n
    if args.layers is not None:
        base["layers"] = [int(v) for v in args.layers.split(",")]
    if args.seeds is not None:
        base["seeds"] = args.seeds
    if args.noise is not None:
        base["noise"] = _load_json(args.noise)
    if getattr(args, "graph", None) is not None:
        base["graph"] = args.graph
    if args.workers is not None:
        base["workers"] = args.workers
    if args.quick:
        base["quick"] = True
    out = _output_dir(args.out)
    if out:
        base["output_dir"] = out
    base["layers"] = tuple(base.get("layers", ()))
    known = {
        "n",
        "layers",
        "seeds",
        "noise",
        "graph",
        "output_dir",
        "workers",
        "quick",
        "reference",
    }
    unknown = set(base) - known
    if unknown:
        raise CliError(f"unknown config fields {sorted(unknown)}")
    try:
        return ExperimentConfig(experiment=experiment, **base)
    except ValueError as exc:
        raise CliError(str(exc))


def cmd_experiment(args: argparse.Namespace) -> int:
    experiment = {
        "vqc-w": EXPERIMENT_VQC_W,
        "vqe-xxx": EXPERIMENT_VQE_XXX,
        "qaoa": EXPERIMENT_QAOA,
        "theorems": EXPERIMENT_THEOREMS,
    }[args.which]
    cfg = _experiment_config(args, experiment)
    if experiment == EXPERIMENT_VQC_W:
        print(run_vqc_w(cfg))
        return EXIT_OK
    if experiment == EXPERIMENT_VQE_XXX:
        print(run_vqe_xxx(cfg))
        return EXIT_OK
    if experiment == EXPERIMENT_QAOA:
        reports = run_qaoa_report(cfg)
        for report in reports:
            print(report)
        dense_ok = all(
            r.max_fidelity_error is None or r.max_fidelity_error <= FIDELITY_TOL
            for r in reports
        )
        return EXIT_OK if dense_ok else EXIT_VERIFY
    report = run_theorem_check(cfg)
    print(report)
    return EXIT_OK if report.ok else EXIT_VERIFY


def _add_experiment_flags(parser: argparse.ArgumentParser, with_graph: bool) -> None:
    parser.add_argument("--config", help="JSON file with config fields")
    parser.add_argument("--n", type=int, help="qubit count")
    parser.add_argument("--layers", help="comma-separated layer counts")
    parser.add_argument("--seeds", type=int, help="number of random seeds")
    parser.add_argument("--noise", help="noise config JSON file")
    if with_graph:
        parser.add_argument("--graph", choices=GRAPHS, help="problem graph")
    parser.add_argument("--workers", type=int, help="parallel worker processes")
    parser.add_argument("--quick", action="store_true", help="cap seeds for CI")
    parser.add_argument("--out", help="output directory for records and CSVs")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sigmapulse", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    circuit = commands.add_parser("circuit", help="circuit file tools")
    circuit_sub = circuit.add_subparsers(dest="subcommand", required=True)
    show = circuit_sub.add_parser("show", help="pretty-print a circuit file")
    show.add_argument("--circuit", required=True, help="circuit JSON file")
    show.set_defaults(func=cmd_circuit_show)

    symmetry = commands.add_parser("symmetry", help="symmetry verification tools")
    symmetry_sub = symmetry.add_subparsers(dest="subcommand", required=True)
    verify = symmetry_sub.add_parser(
        "verify", help="check random transforms against the dense unitary"
    )
    verify.add_argument("--circuit", required=True)
    verify.add_argument("--seeds", type=int, default=20)
    verify.add_argument("--tol", type=float, default=FIDELITY_TOL)
    verify.set_defaults(func=cmd_symmetry_verify)
    reduce_cmd = symmetry_sub.add_parser(
        "reduce", help="map parameters into the half-turn domain"
    )
    reduce_cmd.add_argument("--circuit", required=True)
    reduce_cmd.add_argument("--seed", type=int, default=0)
    reduce_cmd.add_argument("--theta", help="comma-separated slot values")
    reduce_cmd.add_argument("--tol", type=float, default=FIDELITY_TOL)
    reduce_cmd.set_defaults(func=cmd_symmetry_reduce)
    enumerate_cmd = symmetry_sub.add_parser(
        "enumerate", help="list the transforms of every generator subset"
    )
    enumerate_cmd.add_argument("--circuit", required=True)
    enumerate_cmd.add_argument("--seed", type=int, default=0)
    enumerate_cmd.add_argument("--max-m", type=int, default=16)
    enumerate_cmd.add_argument("--sample", type=int)
    enumerate_cmd.add_argument("--tol", type=float, default=FIDELITY_TOL)
    enumerate_cmd.set_defaults(func=cmd_symmetry_enumerate)

    noise = commands.add_parser("noise", help="noise channel tools")
    noise_sub = noise.add_subparsers(dest="subcommand", required=True)
    check = noise_sub.add_parser("check", help="validate a channel config")
    check.add_argument("--channel", required=True, help="channel JSON file")
    check.set_defaults(func=cmd_noise_check)

    ham = commands.add_parser("ham", help="Hamiltonian tools")
    ham_sub = ham.add_subparsers(dest="subcommand", required=True)
    diag = ham_sub.add_parser("diag", help="print exact spectrum extremes")
    diag.add_argument("--n", type=int, help="spin-ring size")
    diag.add_argument("--file", help="Hamiltonian text file")
    diag.set_defaults(func=cmd_ham_diag)

    sweep = commands.add_parser("sweep", help="run one optimization schedule")
    sweep.add_argument("--circuit", required=True)
    sweep.add_argument("--cost", choices=("w-compile", "xxx"), required=True)
    sweep.add_argument("--noise", help="noise config JSON file")
    sweep.add_argument(
        "--schedule", choices=SCHEDULES, default=SCHEDULE_CONSTRAINED_SYMH
    )
    sweep.add_argument("--seeds", type=int, default=10)
    sweep.add_argument("--ns", type=int, default=4, help="hopping sweep rounds")
    sweep.add_argument("--hop-budget", type=int, default=40)
    sweep.add_argument("--max-evals", type=int, default=200)
    sweep.add_argument("--out", help="output directory for records and CSVs")
    sweep.set_defaults(func=cmd_sweep)

    experiment = commands.add_parser("experiment", help="full-scale studies")
    experiment_sub = experiment.add_subparsers(dest="which", required=True)
    for name in ("vqc-w", "vqe-xxx", "qaoa", "theorems"):
        sub = experiment_sub.add_parser(name)
        _add_experiment_flags(sub, with_graph=name == "qaoa")
        sub.set_defaults(func=cmd_experiment)
    return parser


def main(argv: "list[str] | None" = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
