"""Reproducible experiment harness: compile study, VQE schedules, batteries.

Each runner takes an ExperimentConfig, returns a summary object and, when an
output directory is configured, writes per-seed records (JSONL + CSV) and the
summary CSV.  Outputs carry no timestamps and format floats at full
precision, so reruns with the same config are byte-identical and every CSV
re-parses to the statistics it was built from.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .circuit import (
    BUFFER_RYRX,
    BufferedCircuit,
    Cnot,
    FixedClifford,
    Gate,
    ParameterVector,
    PauliRotation,
    SlotBinding,
    hardware_efficient_ansatz,
    hva_xxx_ansatz,
)
from .costs import (
    CompileOverlap,
    Expectation,
    improvement_pct,
    w_state,
    xxx_hamiltonian,
)
from .errors import BindingConflictError, CapacityError, UnabsorbablePulseError
from .noise import (
    AmplitudeDamping,
    CoherentDrift,
    Dephasing,
    Depolarizing,
    NoiseModel,
    UnitalPauli,
    commutator_norm,
    noise_model_from_json,
    relaxation_channel,
    run_noisy,
)
from .optimize import (
    SCHEDULE_CONSTRAINED,
    SCHEDULES,
    LocalOptimizerConfig,
    Problem,
    RunRecord,
    SweepConfig,
    run_schedule,
    sweep_optimize,
)
from .pauli import PauliWord
from .pulses import apply_transform, reduce_domain, transform_fidelity
from .qaoa import (
    complete_graph_terms,
    qaoa_symmetries,
    ring_graph_terms,
    star_graph_terms,
)

EXPERIMENT_VQC_W = "vqc_w"
EXPERIMENT_VQE_XXX = "vqe_xxx"
EXPERIMENT_QAOA = "qaoa_report"
EXPERIMENT_THEOREMS = "theorem_check"
EXPERIMENTS = (
    EXPERIMENT_VQC_W,
    EXPERIMENT_VQE_XXX,
    EXPERIMENT_QAOA,
    EXPERIMENT_THEOREMS,
)

QUICK_SEEDS = 10
MAX_VQE_QUBITS = 10

# Default relaxation profile for the noisy studies.  Chosen much noisier
# than typical hardware idle rates so that boundary noise visibly reshapes
# the cost landscape at desk scale; see README for the calibration.
DEFAULT_NOISE_CONFIG = {"type": "relaxation", "t1": 4e-6, "t2": 4e-6}

VQC_LOCAL = LocalOptimizerConfig(max_evals=300)
VQC_SWEEP = SweepConfig(num_sweeps=4, hop_budget_evals=40)
VQE_LOCAL = LocalOptimizerConfig(max_evals=250)
VQE_SWEEP = SweepConfig(num_sweeps=4, hop_budget_evals=40)

GRAPHS = ("ring", "complete", "star")


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment request: sizes, seeds, noise recipe and budgets."""

    experiment: str
    n: int = 0
    layers: tuple[int, ...] = ()
    seeds: int = 100
    noise: dict | None = None
    local: LocalOptimizerConfig | None = None
    sweep: SweepConfig | None = None
    graph: str | None = None
    output_dir: str | None = None
    workers: int = 1
    quick: bool = False
    reference: bool = True

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ValueError(
                f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}"
            )
        if self.n and self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        if self.seeds < 1:
            raise ValueError(f"need at least one seed, got {self.seeds}")
        if self.workers < 1:
            raise ValueError(f"workers must be positive, got {self.workers}")
        if any(l < 1 for l in self.layers):
            raise ValueError(f"layer counts must be positive, got {self.layers}")
        if self.graph is not None and self.graph not in GRAPHS:
            raise ValueError(f"graph must be one of {GRAPHS}, got {self.graph!r}")

    @property
    def effective_seeds(self) -> int:
        return min(self.seeds, QUICK_SEEDS) if self.quick else self.seeds


@dataclass(frozen=True)
class SummaryRow:
    """Statistics of the final costs for one experiment cell."""

    label: str
    best: float
    worst: float
    mean: float
    std: float
    pre_mean: float | None = None
    post_mean: float | None = None
    improvement: float | None = None
    reference: float | None = None

    def __post_init__(self) -> None:
        slack = 1e-9 * (1.0 + abs(self.mean))
        if not (self.best <= self.mean + slack and self.mean <= self.worst + slack):
            raise ValueError(
                f"need best <= mean <= worst, got {self.best}, {self.mean}, {self.worst}"
            )


_CSV_COLUMNS = (
    "best",
    "worst",
    "mean",
    "std",
    "pre_mean",
    "post_mean",
    "improvement_pct",
    "reference",
)


def _fmt(value: float | None) -> str:
    return "" if value is None else format(float(value), ".17g")


def _parse(text: str) -> float | None:
    return None if text == "" else float(text)


@dataclass(frozen=True)
class SummaryTable:
    """Per-cell summary rows keyed by layer count or schedule name."""

    title: str
    key: str
    rows: tuple[SummaryRow, ...]

    def row(self, label: str) -> SummaryRow:
        for row in self.rows:
            if row.label == label:
                return row
        raise KeyError(f"no row labelled {label!r}")

    def to_csv_text(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow((self.key,) + _CSV_COLUMNS)
        for row in self.rows:
            writer.writerow(
                (
                    row.label,
                    _fmt(row.best),
                    _fmt(row.worst),
                    _fmt(row.mean),
                    _fmt(row.std),
                    _fmt(row.pre_mean),
                    _fmt(row.post_mean),
                    _fmt(row.improvement),
                    _fmt(row.reference),
                )
            )
        return out.getvalue()

    @classmethod
    def from_csv_text(cls, text: str, title: str = "") -> "SummaryTable":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if tuple(header[1:]) != _CSV_COLUMNS:
            raise ValueError(f"unexpected summary columns {header!r}")
        rows = []
        for record in reader:
            label, best, worst, mean, std, pre, post, imp, ref = record
            rows.append(
                SummaryRow(
                    label=label,
                    best=float(best),
                    worst=float(worst),
                    mean=float(mean),
                    std=float(std),
                    pre_mean=_parse(pre),
                    post_mean=_parse(post),
                    improvement=_parse(imp),
                    reference=_parse(ref),
                )
            )
        return cls(title=title, key=header[0], rows=tuple(rows))

    def __str__(self) -> str:
        names = (self.key,) + _CSV_COLUMNS
        grid = [names]
        for row in self.rows:
            values = (
                row.label,
                row.best,
                row.worst,
                row.mean,
                row.std,
                row.pre_mean,
                row.post_mean,
                row.improvement,
                row.reference,
            )
            grid.append(
                tuple(
                    v if isinstance(v, str) else ("" if v is None else f"{v:.6g}")
                    for v in values
                )
            )
        widths = [max(len(line[c]) for line in grid) for c in range(len(names))]
        lines = [self.title] if self.title else []
        for line in grid:
            lines.append("  ".join(cell.rjust(w) for cell, w in zip(line, widths)))
        return "\n".join(lines)


def write_jsonl(path: "Path | str", records: Iterable[dict]) -> None:
    """Write one compact JSON document per line."""
    with open(path, "w") as handle:
        for record in records:
            handle.write(json.dumps(record, sort_keys=True, separators=(",", ":")))
            handle.write("\n")


def read_jsonl(path: "Path | str") -> list[dict]:
    """Read one JSON document per line."""
    with open(path) as handle:
        return [json.loads(line) for line in handle if line.strip()]


RECORD_CSV_COLUMNS = ("seed", "c_initial", "c_pre", "c_final", "hops", "evals")


def write_records_csv(
    path: "Path | str", key: str, records: Iterable[tuple[str, RunRecord]]
) -> None:
    """Write (cell label, record) pairs as one flat CSV."""
    with open(path, "w") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow((key,) + RECORD_CSV_COLUMNS)
        for label, record in records:
            writer.writerow(
                (
                    label,
                    record.seed,
                    _fmt(record.cost_trace[0]),
                    _fmt(record.cost_trace[1]),
                    _fmt(record.final_cost),
                    ";".join(str(s) for s in record.hops),
                    record.evals,
                )
            )


def _final_stats(records: Sequence[RunRecord]) -> tuple[float, float, float, float]:
    finals = np.array([r.final_cost for r in records], dtype=float)
    return (
        float(finals.min()),
        float(finals.max()),
        float(finals.mean()),
        float(finals.std()),
    )


def _pre_post(records: Sequence[RunRecord]) -> tuple[float, float]:
    pre = float(np.mean([r.cost_trace[1] for r in records]))
    post = float(np.mean([r.final_cost for r in records]))
    return pre, post


def _run_tasks(task: Callable, args: list, workers: int) -> list:
    if workers <= 1 or len(args) <= 1:
        return [task(a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, args))


def _seed_chunks(seeds: Sequence[int], workers: int) -> list[tuple[int, ...]]:
    if workers <= 1:
        return [tuple(seeds)]
    size = max(1, math.ceil(len(seeds) / (4 * workers)))
    return [tuple(seeds[i : i + size]) for i in range(0, len(seeds), size)]


def _vqc_task(args: tuple) -> list[dict]:
    n, num_layers, seeds, noise_cfg, local, sweep = args
    circuit = hardware_efficient_ansatz(
        n, num_layers, rotation_axis="y", buffer=BUFFER_RYRX
    )
    noise = noise_model_from_json(noise_cfg, circuit)
    bound = CompileOverlap(w_state(n)).bind(circuit, noise)
    out = []
    for seed in seeds:
        rng = np.random.default_rng(seed)
        start = ParameterVector.random(circuit, rng, gamma_mode="uniform")
        result = sweep_optimize(circuit, bound, start, local, sweep)
        out.append(
            RunRecord(
                schedule="local+symh",
                seed=seed,
                cost_trace=result.cost_trace,
                hops=result.hops,
                theta=result.params.theta,
                gamma=result.params.gamma,
                evals=result.evals,
                meta={"L": num_layers, "n": n, "noisy": noise is not None},
            ).to_json()
        )
    return out


def summarize_vqc(
    records_by_layer: dict[int, list[RunRecord]],
    reference_by_layer: dict[int, float] | None = None,
) -> SummaryTable:
    """Condense compile-study records into one row per layer count."""
    rows = []
    for num_layers in sorted(records_by_layer):
        records = records_by_layer[num_layers]
        best, worst, mean, std = _final_stats(records)
        pre, post = _pre_post(records)
        reference = (reference_by_layer or {}).get(num_layers)
        rows.append(
            SummaryRow(
                label=str(num_layers),
                best=best,
                worst=worst,
                mean=mean,
                std=std,
                pre_mean=pre,
                post_mean=post,
                reference=reference,
            )
        )
    return SummaryTable(title="w-compile", key="L", rows=tuple(rows))


def run_vqc_w(cfg: ExperimentConfig) -> SummaryTable:
    """Compile the target superposition state with layered ansatze.

    Per layer count and seed: random start, local descent, then the hopping
    sweep.  With a noisy config each cell also runs noiselessly over the
    same seeds and reports the best noiseless cost as ``reference``.
    """
    n = cfg.n or 3
    layer_counts = cfg.layers or (1, 2, 3)
    seeds = range(cfg.effective_seeds)
    local = cfg.local or VQC_LOCAL
    sweep = cfg.sweep or VQC_SWEEP
    noise_cfg = DEFAULT_NOISE_CONFIG if cfg.noise is None else cfg.noise
    want_reference = noise_cfg.get("type") != "none" and cfg.reference
    records: dict[int, list[RunRecord]] = {}
    reference: dict[int, float] = {}
    labelled: list[tuple[str, RunRecord]] = []
    for num_layers in layer_counts:
        args = [
            (n, num_layers, chunk, noise_cfg, local, sweep)
            for chunk in _seed_chunks(list(seeds), cfg.workers)
        ]
        cell = [
            RunRecord.from_json(data)
            for chunk in _run_tasks(_vqc_task, args, cfg.workers)
            for data in chunk
        ]
        records[num_layers] = cell
        labelled.extend((str(num_layers), record) for record in cell)
        if want_reference:
            quiet_args = [
                (n, num_layers, chunk, {"type": "none"}, local, sweep)
                for chunk in _seed_chunks(list(seeds), cfg.workers)
            ]
            quiet = [
                data["cost_trace"][-1]
                for chunk in _run_tasks(_vqc_task, quiet_args, cfg.workers)
                for data in chunk
            ]
            reference[num_layers] = min(quiet)
    table = summarize_vqc(records, reference if want_reference else None)
    if cfg.output_dir:
        base = Path(cfg.output_dir)
        base.mkdir(parents=True, exist_ok=True)
        write_jsonl(
            base / "vqc_w_records.jsonl",
            (dict(record.to_json(), L=int(label)) for label, record in labelled),
        )
        write_records_csv(base / "vqc_w_records.csv", "L", labelled)
        (base / "vqc_w_summary.csv").write_text(table.to_csv_text())
    return table


def _vqe_task(args: tuple) -> list[dict]:
    schedule, n, num_layers, seeds, noise_cfg, local, sweep = args
    circuit, input_state = hva_xxx_ansatz(n, num_layers)
    noise = noise_model_from_json(noise_cfg, circuit)
    problem = Problem(
        circuit=circuit,
        cost=Expectation(xxx_hamiltonian(n), input_state=input_state),
        noise=noise,
        name=f"xxx-n{n}",
    )
    return [r.to_json() for r in run_schedule(problem, schedule, seeds, local, sweep)]


def summarize_vqe(
    records_by_schedule: dict[str, list[RunRecord]], ground_energy: float
) -> SummaryTable:
    """Condense schedule-comparison records into one row per schedule.

    ``improvement_pct`` measures each schedule's best run against the
    restricted schedule's best run, as a percentage of the ground energy.
    """
    baseline = min(r.final_cost for r in records_by_schedule[SCHEDULE_CONSTRAINED])
    rows = []
    for schedule in SCHEDULES:
        records = records_by_schedule[schedule]
        best, worst, mean, std = _final_stats(records)
        pre, post = _pre_post(records)
        rows.append(
            SummaryRow(
                label=schedule,
                best=best,
                worst=worst,
                mean=mean,
                std=std,
                pre_mean=pre,
                post_mean=post,
                improvement=improvement_pct(best, baseline, ground_energy),
            )
        )
    return SummaryTable(title="xxx-vqe", key="schedule", rows=tuple(rows))


def run_vqe_xxx(cfg: ExperimentConfig) -> SummaryTable:
    """Compare the four optimization schedules on the spin-chain model."""
    n = cfg.n or 4
    if n % 2 or n < 4:
        raise ValueError(f"the spin-chain study needs even n >= 4, got {n}")
    if n > MAX_VQE_QUBITS:
        raise CapacityError(
            f"density-matrix simulation is supported up to n={MAX_VQE_QUBITS}, got {n}"
        )
    num_layers = cfg.layers[0] if cfg.layers else 1
    seeds = list(range(cfg.effective_seeds))
    local = cfg.local or VQE_LOCAL
    sweep = cfg.sweep or VQE_SWEEP
    noise_cfg = DEFAULT_NOISE_CONFIG if cfg.noise is None else cfg.noise
    records: dict[str, list[RunRecord]] = {}
    labelled: list[tuple[str, RunRecord]] = []
    for schedule in SCHEDULES:
        args = [
            (schedule, n, num_layers, chunk, noise_cfg, local, sweep)
            for chunk in _seed_chunks(seeds, cfg.workers)
        ]
        cell = [
            RunRecord.from_json(data)
            for chunk in _run_tasks(_vqe_task, args, cfg.workers)
            for data in chunk
        ]
        records[schedule] = cell
        labelled.extend((schedule, record) for record in cell)
    table = summarize_vqe(records, xxx_hamiltonian(n).ground_energy())
    if cfg.output_dir:
        base = Path(cfg.output_dir)
        base.mkdir(parents=True, exist_ok=True)
        write_jsonl(
            base / "vqe_xxx_records.jsonl", (r.to_json() for _, r in labelled)
        )
        write_records_csv(base / "vqe_xxx_records.csv", "schedule", labelled)
        (base / "vqe_xxx_summary.csv").write_text(table.to_csv_text())
    return table


_WEIGHT_TWO_PROB = 0.4
_CNOT_PROB = 0.5
_CLIFFORD_PROB = 0.15
_SECOND_GATE_PROB = 0.3


def _random_word(rng: np.random.Generator, n: int) -> PauliWord:
    letters = ["I"] * n
    first = int(rng.integers(n))
    letters[first] = "XYZ"[rng.integers(3)]
    if n > 1 and rng.random() < _WEIGHT_TWO_PROB:
        second = int(rng.integers(n - 1))
        if second >= first:
            second += 1
        letters[second] = "XYZ"[rng.integers(3)]
    return PauliWord.from_letters("".join(letters))


def random_buffered_circuit(
    rng: np.random.Generator,
    n: int = 3,
    num_slots: int = 4,
    multi_gate_prob: float = _SECOND_GATE_PROB,
    buffer: str = BUFFER_RYRX,
) -> BufferedCircuit:
    """Draw a random buffered circuit for certification batteries.

    Slots appear in time order; each binds one rotation (or two, with
    probability ``multi_gate_prob``) with multiplier +-1 and an offset
    drawn from multiples of pi/2, the offsets a sign flip can absorb.
    Random two-qubit blocks and fixed Clifford rotations are interleaved.
    """
    layers: list[tuple[Gate, ...]] = []

    def entangler() -> None:
        if n < 2:
            return
        control = int(rng.integers(n))
        target = int(rng.integers(n - 1))
        if target >= control:
            target += 1
        layers.append((Cnot(control, target),))

    def clifford() -> None:
        layers.append(
            (
                FixedClifford(
                    axis="xyz"[rng.integers(3)],
                    qubit=int(rng.integers(n)),
                    sign=1 if rng.random() < 0.5 else -1,
                ),
            )
        )

    def rotation(slot: int) -> None:
        layers.append(
            (
                PauliRotation(
                    axis=_random_word(rng, n),
                    binding=SlotBinding(
                        slot=slot,
                        multiplier=1 if rng.random() < 0.5 else -1,
                        offset=float(rng.integers(4)) * math.pi / 2.0,
                    ),
                ),
            )
        )

    for slot in range(num_slots):
        rotation(slot)
        if rng.random() < multi_gate_prob:
            rotation(slot)
        if rng.random() < _CNOT_PROB:
            entangler()
        if rng.random() < _CLIFFORD_PROB:
            clifford()
    return BufferedCircuit(n=n, layers=tuple(layers), buffer=buffer)


def random_transform_subset(
    rng: np.random.Generator, circuit: BufferedCircuit
) -> tuple[int, ...]:
    """Draw a nonempty generator subset of the circuit's slots."""
    num = circuit.num_theta_slots
    while True:
        subset = tuple(s for s in range(num) if rng.random() < 0.5)
        if subset:
            return subset


GENERATOR_ATTEMPTS = 20


def _foldable_subset(
    rng: np.random.Generator, circuit: BufferedCircuit, params: ParameterVector
) -> tuple[ParameterVector, tuple[int, ...]] | None:
    for _ in range(GENERATOR_ATTEMPTS):
        subset = random_transform_subset(rng, circuit)
        try:
            moved, _ = apply_transform(circuit, params, subset)
        except BindingConflictError:
            continue
        return moved, subset
    return None


@dataclass(frozen=True)
class TheoremReport:
    """Certification battery outcome: violation counts and witnesses."""

    symmetry_trials: int
    symmetry_violations: int
    reduction_trials: int
    reduction_violations: int
    unital_trials: int
    unital_violations: int
    damping_witnesses: tuple[tuple[int, float], ...]
    drift_witnesses: tuple[tuple[int, float], ...]
    commutator_table: tuple[tuple[str, float, float, float], ...]

    @property
    def ok(self) -> bool:
        """Whether every preservation check passed and breaking was seen."""
        unital_rows_clean = all(
            max(x, y, z) <= 1e-12
            for label, x, y, z in self.commutator_table
            if label.startswith("unital:")
        )
        return (
            self.symmetry_violations == 0
            and self.reduction_violations == 0
            and self.unital_violations == 0
            and len(self.damping_witnesses) > 0
            and len(self.drift_witnesses) > 0
            and unital_rows_clean
        )

    def to_json(self) -> dict:
        return {
            "symmetry_trials": self.symmetry_trials,
            "symmetry_violations": self.symmetry_violations,
            "reduction_trials": self.reduction_trials,
            "reduction_violations": self.reduction_violations,
            "unital_trials": self.unital_trials,
            "unital_violations": self.unital_violations,
            "damping_witnesses": [list(w) for w in self.damping_witnesses],
            "drift_witnesses": [list(w) for w in self.drift_witnesses],
            "commutator_table": [list(r) for r in self.commutator_table],
            "ok": self.ok,
        }

    def __str__(self) -> str:
        lines = [
            f"symmetry fidelity:  {self.symmetry_trials} trials, "
            f"{self.symmetry_violations} violations",
            f"domain reduction:   {self.reduction_trials} trials, "
            f"{self.reduction_violations} violations",
            f"unital invariance:  {self.unital_trials} trials, "
            f"{self.unital_violations} violations",
            f"damping witnesses:  {len(self.damping_witnesses)} "
            f"(largest |dC| {max((abs(d) for _, d in self.damping_witnesses), default=0.0):.3e})",
            f"drift witnesses:    {len(self.drift_witnesses)} "
            f"(largest |dC| {max((abs(d) for _, d in self.drift_witnesses), default=0.0):.3e})",
            "commutator norms (channel, X, Y, Z):",
        ]
        for label, x, y, z in self.commutator_table:
            lines.append(f"  {label:<24} {x:10.3e} {y:10.3e} {z:10.3e}")
        lines.append("overall: " + ("PASS" if self.ok else "FAIL"))
        return "\n".join(lines)


def _random_unital_model(
    rng: np.random.Generator, circuit: BufferedCircuit
) -> NoiseModel:
    boundaries = []
    for _ in range(circuit.num_layers + 2):
        entries = []
        for qubit in range(circuit.n):
            weights = rng.random(4)
            probs = weights / weights.sum()
            entries.append(
                (
                    (qubit,),
                    UnitalPauli(
                        probs=tuple(zip("IXYZ", (float(p) for p in probs)))
                    ),
                )
            )
        boundaries.append(tuple(entries))
    return NoiseModel(n=circuit.n, boundaries=tuple(boundaries))


def breaking_witnesses(
    circuit: BufferedCircuit,
    cost: Callable[[ParameterVector], float],
    params: ParameterVector,
    tol: float = 1e-4,
) -> list[tuple[int, float]]:
    """Scan all single-slot hops for cost changes beyond ``tol``.

    Nonempty output certifies that the configured noise breaks the
    parameter symmetries; under purely unital Pauli noise it is empty.
    """
    base = cost(params)
    out = []
    for slot in range(circuit.num_theta_slots):
        try:
            moved, _ = apply_transform(circuit, params, (slot,))
        except (UnabsorbablePulseError, BindingConflictError):
            continue
        delta = cost(moved) - base
        if abs(delta) > tol:
            out.append((slot, delta))
    return out


def _witness_problem() -> tuple[BufferedCircuit, ParameterVector, CompileOverlap]:
    circuit = hardware_efficient_ansatz(3, 2, rotation_axis="y", buffer=BUFFER_RYRX)
    rng = np.random.default_rng(7)
    params = ParameterVector.random(circuit, rng, gamma_mode="uniform")
    return circuit, params, CompileOverlap(w_state(3))


def _commutator_rows(
    rng: np.random.Generator,
) -> tuple[tuple[str, float, float, float], ...]:
    weights = rng.random(4)
    probs = weights / weights.sum()
    channels = [
        ("depolarizing q=0.05", Depolarizing(q=0.05)),
        ("depolarizing q=0.2", Depolarizing(q=0.2)),
        ("dephasing q=0.05", Dephasing(q=0.05)),
        ("dephasing q=0.2", Dephasing(q=0.2)),
        (
            "unital: random mix",
            UnitalPauli(probs=tuple(zip("IXYZ", (float(p) for p in probs)))),
        ),
        ("damping gamma=0.05", AmplitudeDamping(gamma=0.05)),
        ("damping gamma=0.5", AmplitudeDamping(gamma=0.5)),
        ("relaxation, defaults", relaxation_channel(duration=50e-9)),
        ("drift z 0.05", CoherentDrift(axis="z", angle=0.05)),
        ("drift x 0.1", CoherentDrift(axis="x", angle=0.1)),
    ]
    rows = []
    for label, channel in channels:
        norms = tuple(
            commutator_norm(channel, PauliWord.from_letters(letter))
            for letter in "XYZ"
        )
        rows.append((label,) + norms)
    return tuple(rows)


def run_theorem_check(cfg: ExperimentConfig) -> TheoremReport:
    """Certify symmetry soundness, reduction, invariance and breaking.

    Random-circuit batteries check transform fidelity, domain reduction and
    state equality under random unital Pauli noise; a fixed compile problem
    under amplitude damping and coherent drift must yield breaking
    witnesses.  ``TheoremReport.ok`` summarizes the verdict.
    """
    trials = cfg.effective_seeds
    sym_bad = 0
    for i in range(trials):
        rng = np.random.default_rng(1_000 + i)
        n = int(rng.integers(2, 5))
        circuit = random_buffered_circuit(rng, n=n, num_slots=int(rng.integers(2, 7)))
        params = ParameterVector.random(circuit, rng, gamma_mode="uniform")
        found = _foldable_subset(rng, circuit, params)
        if found is None:
            continue
        moved, _ = found
        if abs(transform_fidelity(circuit, params, moved) - 1.0) > 1e-10:
            sym_bad += 1
    red_bad = 0
    for i in range(trials):
        rng = np.random.default_rng(2_000 + i)
        n = int(rng.integers(2, 5))
        circuit = random_buffered_circuit(
            rng, n=n, num_slots=int(rng.integers(2, 7)), multi_gate_prob=0.0
        )
        params = ParameterVector.random(circuit, rng, gamma_mode="uniform")
        reduced = reduce_domain(circuit, params)
        in_range = all(0.0 <= t < math.pi for t in reduced.theta)
        fid_ok = abs(transform_fidelity(circuit, params, reduced) - 1.0) <= 1e-10
        if not (in_range and fid_ok):
            red_bad += 1
    unital_trials = max(1, trials // 2)
    unital_bad = 0
    for i in range(unital_trials):
        rng = np.random.default_rng(3_000 + i)
        n = int(rng.integers(2, 4))
        circuit = random_buffered_circuit(rng, n=n, num_slots=int(rng.integers(2, 5)))
        params = ParameterVector.random(circuit, rng, gamma_mode="uniform")
        found = _foldable_subset(rng, circuit, params)
        if found is None:
            continue
        moved, _ = found
        model = _random_unital_model(rng, circuit)
        rho_a = run_noisy(circuit, params, model).data
        rho_b = run_noisy(circuit, moved, model).data
        if np.linalg.norm(rho_a - rho_b) > 1e-10:
            unital_bad += 1
    circuit, params, overlap = _witness_problem()
    boundaries = circuit.num_layers + 2
    damping = NoiseModel.uniform(
        circuit.n, boundaries, AmplitudeDamping(gamma=0.05)
    )
    drift = NoiseModel.uniform(
        circuit.n, boundaries, CoherentDrift(axis="z", angle=0.1)
    )
    damping_hits = breaking_witnesses(
        circuit, overlap.bind(circuit, damping), params
    )
    drift_hits = breaking_witnesses(circuit, overlap.bind(circuit, drift), params)
    report = TheoremReport(
        symmetry_trials=trials,
        symmetry_violations=sym_bad,
        reduction_trials=trials,
        reduction_violations=red_bad,
        unital_trials=unital_trials,
        unital_violations=unital_bad,
        damping_witnesses=tuple(damping_hits),
        drift_witnesses=tuple(drift_hits),
        commutator_table=_commutator_rows(np.random.default_rng(4_000)),
    )
    if cfg.output_dir:
        base = Path(cfg.output_dir)
        base.mkdir(parents=True, exist_ok=True)
        (base / "theorem_report.json").write_text(
            json.dumps(report.to_json(), sort_keys=True, indent=2) + "\n"
        )
    return report


GRAPH_BUILDERS = {
    "ring": ring_graph_terms,
    "complete": complete_graph_terms,
    "star": star_graph_terms,
}


@dataclass(frozen=True)
class GraphReport:
    """Shift-rule verdict for one problem graph, with dense verification."""

    graph: str
    n: int
    num_layers: int
    z_degrees: tuple[int, ...]
    mixing_rule: str
    problem_rule: str
    verdict: str
    num_templates: int
    templates: tuple[str, ...]
    diagnostics: tuple[str, ...]
    max_fidelity_error: float | None

    def to_json(self) -> dict:
        return {
            "graph": self.graph,
            "n": self.n,
            "num_layers": self.num_layers,
            "z_degrees": list(self.z_degrees),
            "mixing_rule": self.mixing_rule,
            "problem_rule": self.problem_rule,
            "verdict": self.verdict,
            "num_templates": self.num_templates,
            "templates": list(self.templates),
            "diagnostics": list(self.diagnostics),
            "max_fidelity_error": self.max_fidelity_error,
        }

    def __str__(self) -> str:
        lines = [
            f"graph {self.graph} (n={self.n}, layers={self.num_layers})",
            f"  Z degrees:    {list(self.z_degrees)}",
            f"  mixing rule:  {self.mixing_rule}",
            f"  problem rule: {self.problem_rule}",
            f"  templates:    {', '.join(self.templates) if self.templates else 'none'}",
        ]
        if self.max_fidelity_error is not None:
            lines.append(f"  dense check:  max |1 - fidelity| = {self.max_fidelity_error:.3e}")
        for note in self.diagnostics:
            lines.append(f"  note: {note}")
        return "\n".join(lines)


_DENSE_CHECK_TRIALS = 3


def graph_symmetry_report(
    graph: str, n: int, num_layers: int, verify: bool = True
) -> GraphReport:
    """Run the shift-rule analysis for one named graph."""
    if graph not in GRAPH_BUILDERS:
        raise ValueError(f"graph must be one of {GRAPHS}, got {graph!r}")
    terms = GRAPH_BUILDERS[graph](n)
    report = qaoa_symmetries(terms, num_layers)
    error: float | None = None
    if verify and n <= 4:
        rng = np.random.default_rng(11)
        worst = 0.0
        circuit = report.circuit
        for template in report.templates:
            for _ in range(_DENSE_CHECK_TRIALS):
                params = ParameterVector.random(circuit, rng)
                worst = max(
                    worst,
                    abs(transform_fidelity(circuit, params, template.transform) - 1.0),
                )
        error = worst
    labels = tuple(
        f"{t.kind}@{','.join(str(l) for l in t.layers)}" for t in report.templates
    )
    return GraphReport(
        graph=graph,
        n=n,
        num_layers=num_layers,
        z_degrees=report.z_degrees,
        mixing_rule=report.mixing_rule,
        problem_rule=report.problem_rule,
        verdict=report.verdict,
        num_templates=len(report.templates),
        templates=labels,
        diagnostics=report.diagnostics,
        max_fidelity_error=error,
    )


def run_qaoa_report(cfg: ExperimentConfig) -> list[GraphReport]:
    """Report shift rules for the configured graph, or the standard three."""
    n = cfg.n or 4
    num_layers = cfg.layers[0] if cfg.layers else 2
    names = (cfg.graph,) if cfg.graph else GRAPHS
    reports = [graph_symmetry_report(name, n, num_layers) for name in names]
    if cfg.output_dir:
        base = Path(cfg.output_dir)
        base.mkdir(parents=True, exist_ok=True)
        (base / "qaoa_report.json").write_text(
            json.dumps([r.to_json() for r in reports], sort_keys=True, indent=2)
            + "\n"
        )
    return reports
