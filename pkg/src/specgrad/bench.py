"""Multi-trial benchmark tables and CSV serialisation of traces."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional, TextIO

from .core import DerivativeMode
from .errors import BadConfig
from .objectives import Objective, get_objective
from .optimizers import (RunConfig, RunTrace, StepSchedule, isgm_run, random_starts,
                         sgm_run, sm_run)

METHODS = ("sm_const", "sm_dimin", "isgm", "sgm_shor")

TRACE_COLUMNS = ("k", "x", "f_x", "subopt", "deriv", "step", "envelope",
                 "x_best", "f_best", "stop_reason")

#: default starting point per objective when --x0 is not given
DEFAULT_X0 = {
    "sum_abs": 0.995,
    "piecewise_power": 0.995,
    "huber": -1.995,
    "power_p": 2.995,
    "kink_counterexample": 0.995,
}


def run_method(f: Objective, method: str, x0: float, *, gamma: float = 0.005,
               eta: float = 1e-6, mesh: float = 1e-6, iters: int = 20,
               mode: DerivativeMode = DerivativeMode.FD) -> RunTrace:
    """One trace of a named method; ``sgm_shor`` starts its halving at ``t0 = b - a``."""
    if method == "sm_const":
        return sm_run(f, RunConfig(x0, eta, iters, mesh, StepSchedule.constant(gamma), mode))
    if method == "sm_dimin":
        return sm_run(f, RunConfig(x0, eta, iters, mesh, StepSchedule.diminishing(), mode))
    if method == "isgm":
        return isgm_run(f, RunConfig(x0, eta, iters, mesh, StepSchedule.diminishing(), mode))
    if method == "sgm_shor":
        if not f.bounded:
            raise BadConfig("sgm_shor picks t0 = b - a and needs a bounded domain")
        return sgm_run(f, RunConfig(x0, eta, iters, mesh, StepSchedule.shor(f.width), mode))
    raise BadConfig(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


def fmt(v) -> str:
    """Shortest round-trip text for reals; ``none`` for a missing value."""
    if v is None:
        return "none"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _writer(stream: TextIO):
    return csv.writer(stream, lineterminator="\n")


def write_trace_csv(trace: RunTrace, f: Objective, stream: TextIO) -> None:
    f_star = f.min_value if f.minimizers is not None else None
    w = _writer(stream)
    w.writerow(TRACE_COLUMNS)
    last = len(trace.records) - 1
    for i, r in enumerate(trace.records):
        subopt = r.fx - f_star if f_star is not None else None
        w.writerow([fmt(r.k), fmt(r.x), fmt(r.fx), fmt(subopt), fmt(r.deriv), fmt(r.step),
                    fmt(r.envelope), fmt(r.x_best), fmt(r.f_best),
                    trace.stop_reason.value if i == last else ""])


@dataclass(frozen=True)
class BenchSpec:
    objective_name: str
    methods: tuple[str, ...] = METHODS
    trials: int = 20
    iterations: int = 20
    seed: int = 0
    gamma_const: float = 0.005
    eta: float = 1e-6
    mesh: float = 1e-6
    derivative_mode: DerivativeMode = DerivativeMode.FD
    x0: Optional[float] = None

    def __post_init__(self):
        if self.trials < 1 or self.iterations < 1:
            raise BadConfig("trials and iterations must be positive")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise BadConfig(f"unknown methods {bad}; choose from {', '.join(METHODS)}")


@dataclass
class BenchTable:
    """Across-trial means of ``f(x_k)`` and ``f(x_k) - f(x*)`` for ``k = 0..iterations``."""

    objective: str
    methods: tuple[str, ...]
    iterations: int
    mean_f: dict[str, list[float]] = field(default_factory=dict)
    mean_subopt: dict[str, list[float]] = field(default_factory=dict)
    traces: dict[tuple[str, int], RunTrace] = field(default_factory=dict, repr=False)


def _padded_values(trace: RunTrace, n: int) -> list[float]:
    # a run that stopped early stays at its last iterate
    vals = [r.fx for r in trace.records]
    return vals + [vals[-1]] * (n + 1 - len(vals))


def bench(spec: BenchSpec) -> BenchTable:
    f = get_objective(spec.objective_name)
    if spec.x0 is not None:
        starts = [spec.x0] * spec.trials
    else:
        starts = random_starts(f.lo, f.hi, spec.trials, spec.seed)
    f_star = f.min_value
    table = BenchTable(f.name, tuple(spec.methods), spec.iterations)
    for method in spec.methods:
        sums = [0.0] * (spec.iterations + 1)
        sub_sums = [0.0] * (spec.iterations + 1)
        for trial, x0 in enumerate(starts):
            trace = run_method(f, method, x0, gamma=spec.gamma_const, eta=spec.eta,
                               mesh=spec.mesh, iters=spec.iterations,
                               mode=spec.derivative_mode)
            table.traces[(method, trial)] = trace
            for k, v in enumerate(_padded_values(trace, spec.iterations)):
                sums[k] += v
                sub_sums[k] += v - f_star
        table.mean_f[method] = [s / spec.trials for s in sums]
        table.mean_subopt[method] = [s / spec.trials for s in sub_sums]
    return table


def write_bench_csv(table: BenchTable, stream: TextIO) -> None:
    w = _writer(stream)
    w.writerow(["k"] + [f"{m}_mean_f" for m in table.methods]
               + [f"{m}_mean_subopt" for m in table.methods])
    for k in range(table.iterations + 1):
        w.writerow([str(k)] + [fmt(table.mean_f[m][k]) for m in table.methods]
                   + [fmt(table.mean_subopt[m][k]) for m in table.methods])
