"""Specular gradient method (SGM), its implicit variant (ISGM), and the plain
subgradient method (SM) with the symmetric derivative as subgradient.

All three share one loop: evaluate a derivative at ``x``, stop if it is within
tolerance or the iteration budget is spent, otherwise step and keep track of
the best point seen so far.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (DerivativeMode, pair_at, specular_from_pair, specular_sign,
                   symmetric_derivative)
from .errors import BadConfig
from .objectives import Objective


class Method(enum.Enum):
    SGM = "SGM"
    ISGM = "ISGM"
    SM = "SM"


class StopReason(enum.Enum):
    TOLERANCE_MET = "ToleranceMet"
    MAX_ITERS = "MaxIters"
    ZERO_DERIVATIVE = "ZeroDerivative"
    OUT_OF_DOMAIN = "OutOfDomain"


class ScheduleKind(enum.Enum):
    CONSTANT = "constant"
    DIMINISHING = "diminishing"
    SHOR_HALVING = "shor_halving"


def shor_t(t0: float, k: int) -> float:
    """``t0 * 2**-k``, computed exactly."""
    return math.ldexp(t0, -k)


@dataclass(frozen=True)
class StepSchedule:
    kind: ScheduleKind
    value: Optional[float] = None

    def __post_init__(self):
        if self.kind is not ScheduleKind.DIMINISHING:
            if self.value is None or not self.value > 0:
                raise BadConfig(f"{self.kind.value} schedule needs a positive parameter")

    @classmethod
    def constant(cls, gamma: float) -> "StepSchedule":
        return cls(ScheduleKind.CONSTANT, gamma)

    @classmethod
    def diminishing(cls) -> "StepSchedule":
        return cls(ScheduleKind.DIMINISHING)

    @classmethod
    def shor(cls, t0: float) -> "StepSchedule":
        return cls(ScheduleKind.SHOR_HALVING, t0)

    def __call__(self, k: int) -> float:
        """``gamma_k`` for constant/diminishing rules, ``t_k`` for Shor halving."""
        if self.kind is ScheduleKind.CONSTANT:
            return self.value
        if self.kind is ScheduleKind.DIMINISHING:
            return 1.0 / (k + 1)
        return shor_t(self.value, k)


@dataclass(frozen=True)
class RunConfig:
    x0: float
    eta: float = 1e-6
    max_iters: int = 20
    mesh: float = 1e-6
    schedule: StepSchedule = field(default_factory=lambda: StepSchedule.constant(0.005))
    derivative_mode: DerivativeMode = DerivativeMode.ANALYTIC

    def __post_init__(self):
        if not self.eta > 0:
            raise BadConfig("eta must be positive")
        if self.max_iters < 1:
            raise BadConfig("max_iters must be at least 1")
        if not self.mesh > 0:
            raise BadConfig("mesh must be positive")


@dataclass(frozen=True)
class IterationRecord:
    """State at iteration ``k``.

    ``step`` is the step size applied to leave ``x`` (0 on the final record);
    ``envelope`` is the theoretical bound on ``|x - x*|`` when the method has
    one, else ``None``.
    """

    k: int
    x: float
    fx: float
    deriv: float
    step: float
    envelope: Optional[float]
    x_best: float
    f_best: float


@dataclass
class RunTrace:
    method: Method
    config: RunConfig
    records: list[IterationRecord]
    stop_reason: StopReason
    objective: str
    domain: tuple[float, float]

    @property
    def final(self) -> IterationRecord:
        return self.records[-1]

    @property
    def x_best(self) -> float:
        return self.records[-1].x_best

    @property
    def iterations(self) -> int:
        return self.records[-1].k

    @property
    def schedule_kind(self) -> Optional[ScheduleKind]:
        if self.method is Method.ISGM:
            return None
        return self.config.schedule.kind


def random_starts(lo: float, hi: float, trials: int, seed: int) -> list[float]:
    """Uniform initial points on ``(lo, hi)``; trial ``i`` draws from a Philox
    stream keyed by ``seed + i`` so trials are independent of each other's count."""
    out = []
    for i in range(trials):
        rng = np.random.Generator(np.random.Philox(seed + i))
        x = float(rng.uniform(lo, hi))
        while not lo < x < hi:
            x = float(rng.uniform(lo, hi))
        out.append(x)
    return out


def best_update(current: tuple[float, float], candidate: tuple[float, float]) -> tuple[float, float]:
    """Keep whichever ``(x, f)`` has the smaller ``f``; ties keep ``current``."""
    return candidate if candidate[1] < current[1] else current


def _clamp_bounds(f: Objective) -> tuple[float, float]:
    if f.bounded:
        mu = 1e-9 * f.width
        return f.lo + mu, f.hi - mu
    lo = f.lo + 1e-9 * max(1.0, abs(f.lo)) if math.isfinite(f.lo) else f.lo
    hi = f.hi - 1e-9 * max(1.0, abs(f.hi)) if math.isfinite(f.hi) else f.hi
    return lo, hi


def _iterate(f: Objective, cfg: RunConfig, method: Method,
             derivative: Callable[[float], float],
             tolerance_measure: Callable[[float], float],
             step: Callable[[int, float], tuple[float, float]],
             envelope: Callable[[int], Optional[float]],
             exact_zero_stop: bool) -> RunTrace:
    if not f.contains(cfg.x0):
        raise BadConfig(f"x0={cfg.x0!r} outside {f.name} domain ({f.lo}, {f.hi})")
    c_lo, c_hi = _clamp_bounds(f)

    records = []
    x = cfg.x0
    fx = f(x)
    best = (x, fx)
    k = 0
    consecutive_clamps = 0
    while True:
        d = derivative(x)
        reason = None
        if tolerance_measure(d) <= cfg.eta:
            reason = StopReason.ZERO_DERIVATIVE if exact_zero_stop and d == 0 else StopReason.TOLERANCE_MET
        elif consecutive_clamps >= 2:
            reason = StopReason.OUT_OF_DOMAIN
        elif k >= cfg.max_iters:
            reason = StopReason.MAX_ITERS
        if reason is not None:
            records.append(IterationRecord(k, x, fx, d, 0.0, envelope(k), best[0], best[1]))
            break

        size, move = step(k, d)
        records.append(IterationRecord(k, x, fx, d, size, envelope(k), best[0], best[1]))
        x_new = x + move
        if x_new < c_lo or x_new > c_hi:
            x_new = min(max(x_new, c_lo), c_hi)
            consecutive_clamps += 1
        else:
            consecutive_clamps = 0
        x = x_new
        fx = f(x)
        best = best_update(best, (x, fx))
        k += 1

    return RunTrace(method, cfg, records, reason, f.name, (f.lo, f.hi))


def sgm_run(f: Objective, cfg: RunConfig) -> RunTrace:
    """Specular gradient method: ``x <- x - gamma * f_spd(x)``.

    With a Shor-halving schedule the step is ``gamma_k = t_k / |f_spd(x_k)|``,
    so each move has length exactly ``t_k``; an exactly zero specular
    derivative then stops the run as a certified minimiser.
    """
    sched = cfg.schedule

    def derivative(x):
        return specular_from_pair(pair_at(f, x, cfg.mesh, cfg.derivative_mode))

    if sched.kind is ScheduleKind.SHOR_HALVING:
        def step(k, d):
            gamma = sched(k) / abs(d)
            return gamma, -gamma * d

        def envelope(k):
            return sched(k)
    else:
        def step(k, d):
            gamma = sched(k)
            return gamma, -gamma * d

        def envelope(k):
            return None

    return _iterate(f, cfg, Method.SGM, derivative, abs, step, envelope,
                    exact_zero_stop=sched.kind is ScheduleKind.SHOR_HALVING)


def isgm_run(f: Objective, cfg: RunConfig) -> RunTrace:
    """Implicit specular gradient method.

    Moves by ``t`` against the sign of ``f'_+(x) + f'_-(x)`` and halves ``t``
    each iteration, starting from half the domain width. ``cfg.schedule`` is
    ignored. The recorded ``deriv`` is the sum ``f'_+ + f'_-`` and the stop
    test is ``|f'_+ + f'_-| <= eta``.
    """
    if not f.bounded:
        raise BadConfig(f"ISGM needs a bounded domain, {f.name} is ({f.lo}, {f.hi})")
    t0 = f.width / 2.0
    def derivative(x):
        pair = pair_at(f, x, cfg.mesh, cfg.derivative_mode)
        return 0.0 if specular_sign(pair) == 0 else pair.total

    def step(k, d):
        t = shor_t(t0, k)
        return t, -t * (1 if d > 0 else -1)

    def envelope(k):
        return shor_t(f.width, k)

    return _iterate(f, cfg, Method.ISGM, derivative, abs, step, envelope, exact_zero_stop=True)


def sm_run(f: Objective, cfg: RunConfig) -> RunTrace:
    """Subgradient method with the symmetric derivative as the subgradient."""
    sched = cfg.schedule
    if sched.kind is ScheduleKind.SHOR_HALVING:
        raise BadConfig("Shor-halving steps are reserved for SGM")

    def derivative(x):
        return symmetric_derivative(f, x, cfg.mesh, cfg.derivative_mode)

    def step(k, d):
        gamma = sched(k)
        return gamma, -gamma * d

    return _iterate(f, cfg, Method.SM, derivative, abs, step, lambda k: None,
                    exact_zero_stop=False)
