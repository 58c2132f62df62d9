"""Native local optimizers, the symmetry-hopping sweep and run schedules.

The hopping sweep wraps a derivative-free local optimizer: after an initial
descent it tries a half-turn pulse on every not-yet-pulsed slot, re-optimizes
briefly from each shifted point, and accepts the best strictly improving
slot, one per sweep.  Under exact circuit symmetry the shifted points have
identical cost, so hops are only accepted when something (noise, shared
slots, finite optimization) breaks the symmetry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .circuit import (
    BufferedCircuit,
    ParameterVector,
    expand_parameters,
    unbind,
)
from .costs import CostFunction
from .errors import BindingConflictError, UnabsorbablePulseError
from .noise import NoiseModel
from .pulses import SymmetryTransform, apply_transform

NELDER_MEAD = "nelder_mead"
COORDINATE = "coordinate"

SCHEDULE_CONSTRAINED = "constrained"
SCHEDULE_CONSTRAINED_FREE = "constrained+free"
SCHEDULE_CONSTRAINED_SYMH = "constrained+symh+free"
SCHEDULE_FREE = "free"
SCHEDULES = (
    SCHEDULE_CONSTRAINED,
    SCHEDULE_CONSTRAINED_FREE,
    SCHEDULE_CONSTRAINED_SYMH,
    SCHEDULE_FREE,
)


@dataclass(frozen=True)
class LocalOptimizerConfig:
    """Settings shared by the native derivative-free optimizers."""

    method: str = NELDER_MEAD
    max_evals: int = 200
    step: float = 0.5
    tol: float = 1e-8

    def __post_init__(self) -> None:
        if self.method not in (NELDER_MEAD, COORDINATE):
            raise ValueError(f"unknown method {self.method!r}")
        if self.max_evals < 1:
            raise ValueError("max_evals must be at least 1")
        if self.step <= 0 or self.tol < 0:
            raise ValueError("step must be positive and tol non-negative")


@dataclass(frozen=True)
class SweepConfig:
    """Settings for the hopping sweep."""

    num_sweeps: int = 4
    hop_budget_evals: int = 50
    improve_tol: float = 1e-9
    final_opt: bool = True

    def __post_init__(self) -> None:
        if self.num_sweeps < 0 or self.hop_budget_evals < 0:
            raise ValueError("sweep counts and budgets must be non-negative")
        if self.improve_tol < 0:
            raise ValueError("improve_tol must be non-negative")


@dataclass(frozen=True, eq=False)
class OptResult:
    """Best point found by a local optimizer run."""

    x: np.ndarray
    cost: float
    start_cost: float
    evals: int


def nelder_mead(
    f: Callable[[np.ndarray], float], x0: np.ndarray, config: LocalOptimizerConfig
) -> OptResult:
    """Downhill simplex descent with a hard evaluation budget.

    Deterministic: the initial simplex steps each coordinate by
    ``config.step``.  Always returns the best point seen, so the result is
    never worse than the start.
    """
    x0 = np.asarray(x0, dtype=float)
    dim = x0.size
    budget = config.max_evals
    state = {"evals": 0, "best_x": x0.copy(), "best_f": math.inf}

    def probe(x: np.ndarray) -> float:
        fx = float(f(x))
        state["evals"] += 1
        if fx < state["best_f"]:
            state["best_f"] = fx
            state["best_x"] = np.array(x)
        return fx

    f0 = probe(x0)
    if dim == 0 or budget <= 1:
        return OptResult(x=state["best_x"], cost=state["best_f"], start_cost=f0, evals=state["evals"])
    simplex: list[tuple[np.ndarray, float]] = [(x0.copy(), f0)]
    for i in range(dim):
        if state["evals"] >= budget:
            break
        xi = x0.copy()
        xi[i] += config.step
        simplex.append((xi, probe(xi)))
    while state["evals"] < budget and len(simplex) >= 2:
        simplex.sort(key=lambda entry: entry[1])
        if len(simplex) == dim + 1 and simplex[-1][1] - simplex[0][1] <= config.tol:
            break
        worst_x, worst_f = simplex[-1]
        centroid = np.mean([x for x, _ in simplex[:-1]], axis=0)
        reflected = centroid + (centroid - worst_x)
        f_reflected = probe(reflected)
        if f_reflected < simplex[0][1]:
            if state["evals"] < budget:
                expanded = centroid + 2.0 * (centroid - worst_x)
                f_expanded = probe(expanded)
                if f_expanded < f_reflected:
                    simplex[-1] = (expanded, f_expanded)
                else:
                    simplex[-1] = (reflected, f_reflected)
            else:
                simplex[-1] = (reflected, f_reflected)
        elif f_reflected < simplex[-2][1]:
            simplex[-1] = (reflected, f_reflected)
        else:
            if f_reflected < worst_f:
                contracted = centroid + 0.5 * (centroid - worst_x)
            else:
                contracted = centroid - 0.5 * (centroid - worst_x)
            if state["evals"] >= budget:
                break
            f_contracted = probe(contracted)
            if f_contracted < min(f_reflected, worst_f):
                simplex[-1] = (contracted, f_contracted)
            else:
                best_x = simplex[0][0]
                shrunk = [simplex[0]]
                for xi, _ in simplex[1:]:
                    if state["evals"] >= budget:
                        break
                    xs = best_x + 0.5 * (xi - best_x)
                    shrunk.append((xs, probe(xs)))
                simplex = shrunk
    return OptResult(
        x=state["best_x"], cost=state["best_f"], start_cost=f0, evals=state["evals"]
    )


def coordinate_descent(
    f: Callable[[np.ndarray], float], x0: np.ndarray, config: LocalOptimizerConfig
) -> OptResult:
    """Cyclic single-coordinate probing with step halving."""
    x0 = np.asarray(x0, dtype=float)
    dim = x0.size
    budget = config.max_evals
    evals = 0

    def probe(x: np.ndarray) -> float:
        nonlocal evals
        evals += 1
        return float(f(x))

    fx = probe(x0)
    f0 = fx
    x = x0.copy()
    step = config.step
    while evals < budget and dim > 0 and step > config.tol:
        improved = False
        for i in range(dim):
            for delta in (step, -step):
                if evals >= budget:
                    break
                candidate = x.copy()
                candidate[i] += delta
                fc = probe(candidate)
                if fc < fx:
                    x, fx = candidate, fc
                    improved = True
                    break
            if evals >= budget:
                break
        if not improved:
            step *= 0.5
    return OptResult(x=x, cost=fx, start_cost=f0, evals=evals)


def local_optimize(
    cost_fn: Callable, start, config: LocalOptimizerConfig
) -> OptResult:
    """Run the configured optimizer from a flat vector or ParameterVector.

    With a ParameterVector start, ``cost_fn`` receives ParameterVectors and
    the result's ``x`` holds the flat values (thetas then gammas).
    """
    if isinstance(start, ParameterVector):
        sizes = (len(start.theta), len(start.gamma))

        def flat_cost(vec: np.ndarray) -> float:
            return cost_fn(
                ParameterVector(
                    theta=tuple(vec[: sizes[0]]), gamma=tuple(vec[sizes[0] :])
                )
            )

        inner = flat_cost
        x0 = start.as_flat()
    else:
        inner = cost_fn
        x0 = np.asarray(start, dtype=float)
    if config.method == NELDER_MEAD:
        return nelder_mead(inner, x0, config)
    return coordinate_descent(inner, x0, config)


def symh_hop(
    circuit: BufferedCircuit, params: ParameterVector, slot: int
) -> tuple[ParameterVector, SymmetryTransform]:
    """Half-turn pulse one slot and fold the symmetry through the circuit."""
    if not 0 <= slot < circuit.num_theta_slots:
        raise ValueError(f"slot {slot} outside [0, {circuit.num_theta_slots})")
    return apply_transform(circuit, params, (slot,))


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Outcome of one hopping sweep run."""

    params: ParameterVector
    cost: float
    cost_trace: tuple[float, ...]
    hops: tuple[int, ...]
    evals: int


def sweep_optimize(
    circuit: BufferedCircuit,
    cost_fn: Callable[[ParameterVector], float],
    start: ParameterVector,
    local_config: LocalOptimizerConfig,
    sweep_config: SweepConfig,
) -> SweepResult:
    """Initial descent, then up to ``num_sweeps`` rounds of slot hopping.

    Each round tries every theta slot not yet pulsed; a hop is kept only if,
    after an optional short re-optimization, it beats the current cost by
    more than ``improve_tol``.  The trace records the start cost, the cost
    after the initial descent, after each accepted hop and after the final
    descent.
    """
    initial = local_optimize(cost_fn, start, local_config)
    current = ParameterVector.from_flat(circuit, initial.x)
    current_cost = initial.cost
    trace = [initial.start_cost, initial.cost]
    evals = initial.evals
    pulsed: list[int] = []
    hop_config = replace(
        local_config, max_evals=max(1, sweep_config.hop_budget_evals)
    )
    for _ in range(sweep_config.num_sweeps):
        best_slot = None
        best_params = None
        best_cost = current_cost
        for slot in range(circuit.num_theta_slots):
            if slot in pulsed:
                continue
            try:
                moved, _ = apply_transform(circuit, current, (slot,))
            except (UnabsorbablePulseError, BindingConflictError):
                continue
            if sweep_config.hop_budget_evals > 0:
                refined = local_optimize(cost_fn, moved, hop_config)
                candidate = ParameterVector.from_flat(circuit, refined.x)
                candidate_cost = refined.cost
                evals += refined.evals
            else:
                candidate = moved
                candidate_cost = float(cost_fn(moved))
                evals += 1
            if candidate_cost < best_cost - sweep_config.improve_tol:
                best_slot = slot
                best_params = candidate
                best_cost = candidate_cost
        if best_slot is None:
            break
        pulsed.append(best_slot)
        current = best_params
        current_cost = best_cost
        trace.append(current_cost)
    if sweep_config.final_opt:
        final = local_optimize(cost_fn, current, local_config)
        evals += final.evals
        if final.cost < current_cost:
            current = ParameterVector.from_flat(circuit, final.x)
            current_cost = final.cost
        trace.append(current_cost)
    return SweepResult(
        params=current,
        cost=current_cost,
        cost_trace=tuple(trace),
        hops=tuple(pulsed),
        evals=evals,
    )


@dataclass(frozen=True, eq=False)
class Problem:
    """A circuit, a cost and an optional noise model to optimize over."""

    circuit: BufferedCircuit
    cost: CostFunction
    noise: NoiseModel | None = None
    name: str = ""

    def bound_cost(
        self, circuit: BufferedCircuit | None = None
    ) -> Callable[[ParameterVector], float]:
        """Bind the cost to a circuit (default: the problem's own)."""
        return self.cost.bind(circuit if circuit is not None else self.circuit, self.noise)


@dataclass(frozen=True, eq=False)
class RunRecord:
    """One optimization run: trace, hops, final parameters and budget."""

    schedule: str
    seed: int
    cost_trace: tuple[float, ...]
    hops: tuple[int, ...]
    theta: tuple[float, ...]
    gamma: tuple[float, ...]
    evals: int
    meta: dict = field(default_factory=dict)

    @property
    def final_cost(self) -> float:
        return self.cost_trace[-1]

    def to_json(self) -> dict:
        return {
            "schedule": self.schedule,
            "seed": self.seed,
            "cost_trace": list(self.cost_trace),
            "hops": list(self.hops),
            "theta": list(self.theta),
            "gamma": list(self.gamma),
            "evals": self.evals,
            "meta": dict(self.meta),
        }

    @classmethod
    def from_json(cls, data: dict) -> "RunRecord":
        return cls(
            schedule=data["schedule"],
            seed=data["seed"],
            cost_trace=tuple(data["cost_trace"]),
            hops=tuple(data["hops"]),
            theta=tuple(data["theta"]),
            gamma=tuple(data["gamma"]),
            evals=data["evals"],
            meta=dict(data.get("meta", {})),
        )


def _constrained_phase(
    circuit: BufferedCircuit,
    cost: Callable[[ParameterVector], float],
    seed: int,
    local_config: LocalOptimizerConfig,
) -> tuple[ParameterVector, tuple[float, ...], int]:
    """Optimize the shared slots with buffer angles pinned at zero."""
    rng = np.random.default_rng(seed)
    start = ParameterVector.random(circuit, rng, gamma_mode="zero")
    gamma = start.gamma

    def theta_cost(vec: np.ndarray) -> float:
        return cost(ParameterVector(theta=tuple(vec), gamma=gamma))

    result = local_optimize(theta_cost, np.array(start.theta), local_config)
    best = ParameterVector(theta=tuple(result.x), gamma=gamma)
    return best, (result.start_cost, result.cost), result.evals


def run_schedule(
    problem: Problem,
    schedule: str,
    seeds: Sequence[int],
    local_config: LocalOptimizerConfig | None = None,
    sweep_config: SweepConfig | None = None,
) -> list[RunRecord]:
    """Run one optimization schedule over a list of seeds.

    Schedules:
      - ``constrained``: optimize the shared slots only, buffer pinned at 0.
      - ``constrained+free``: release every gate to its own slot after the
        constrained phase, then descend over all angles.
      - ``constrained+symh+free``: same release, then the hopping sweep
        (whose initial descent matches the ``constrained+free`` descent).
      - ``free``: release first and descend from a fresh random start with
        uniform random buffer angles.
    """
    if schedule not in SCHEDULES:
        raise ValueError(f"unknown schedule {schedule!r}; known: {SCHEDULES}")
    local_config = local_config or LocalOptimizerConfig()
    sweep_config = sweep_config or SweepConfig()
    free_circuit, mapping = unbind(problem.circuit)
    bound_cost = problem.bound_cost()
    free_cost = (
        problem.bound_cost(free_circuit) if schedule != SCHEDULE_CONSTRAINED else None
    )
    records = []
    for seed in seeds:
        meta = {
            "name": problem.name,
            "n": problem.circuit.n,
            "noisy": problem.noise is not None,
            "space": "bound" if schedule == SCHEDULE_CONSTRAINED else "free",
        }
        if schedule == SCHEDULE_CONSTRAINED:
            best, trace, evals = _constrained_phase(
                problem.circuit, bound_cost, seed, local_config
            )
            records.append(
                RunRecord(
                    schedule=schedule,
                    seed=seed,
                    cost_trace=trace,
                    hops=(),
                    theta=best.theta,
                    gamma=best.gamma,
                    evals=evals,
                    meta=meta,
                )
            )
            continue
        if schedule == SCHEDULE_FREE:
            rng = np.random.default_rng(seed)
            start = ParameterVector.random(free_circuit, rng, gamma_mode="uniform")
            result = local_optimize(free_cost, start, local_config)
            records.append(
                RunRecord(
                    schedule=schedule,
                    seed=seed,
                    cost_trace=(result.start_cost, result.cost),
                    hops=(),
                    theta=tuple(
                        result.x[: free_circuit.num_theta_slots]
                    ),
                    gamma=tuple(result.x[free_circuit.num_theta_slots :]),
                    evals=result.evals,
                    meta=meta,
                )
            )
            continue
        bound_best, bound_trace, bound_evals = _constrained_phase(
            problem.circuit, bound_cost, seed, local_config
        )
        start = expand_parameters(problem.circuit, bound_best, mapping)
        if schedule == SCHEDULE_CONSTRAINED_FREE:
            result = local_optimize(free_cost, start, local_config)
            records.append(
                RunRecord(
                    schedule=schedule,
                    seed=seed,
                    cost_trace=bound_trace + (result.cost,),
                    hops=(),
                    theta=tuple(result.x[: free_circuit.num_theta_slots]),
                    gamma=tuple(result.x[free_circuit.num_theta_slots :]),
                    evals=bound_evals + result.evals,
                    meta=meta,
                )
            )
            continue
        sweep = sweep_optimize(
            free_circuit, free_cost, start, local_config, sweep_config
        )
        records.append(
            RunRecord(
                schedule=schedule,
                seed=seed,
                cost_trace=bound_trace + sweep.cost_trace[1:],
                hops=sweep.hops,
                theta=sweep.params.theta,
                gamma=sweep.params.gamma,
                evals=bound_evals + sweep.evals,
                meta=meta,
            )
        )
    return records
