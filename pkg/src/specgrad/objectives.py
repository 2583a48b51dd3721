"""Benchmark objectives on open intervals, with exact one-sided derivatives."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Callable, Optional

from .core import DerivativeMode, OneSidedPair, pair_at
from .errors import BadParameter, OutOfDomain


@dataclass(frozen=True)
class Objective:
    """A real function on the open interval ``(lo, hi)``.

    Attributes
    ----------
    name : str
        Registry / display name.
    lo, hi : float
        Open domain bounds; may be infinite for user objectives.
    func : callable
        Scalar evaluation ``float -> float``.
    pair : callable, optional
        ``x -> OneSidedPair`` giving exact right/left derivatives.
    minimizers : (float, float), optional
        Closed interval ``[m_lo, m_hi]`` of known global minimizers
        (``m_lo == m_hi`` for a single point).
    convex : bool
        Whether the objective is asserted convex.
    thread_safe : bool
        Whether ``func`` may be called concurrently.
    junctions : tuple of float
        Points where the formula changes piece (for continuity checks).
    """

    name: str
    lo: float
    hi: float
    func: Callable[[float], float]
    pair: Optional[Callable[[float], OneSidedPair | tuple[float, float]]] = None
    minimizers: Optional[tuple[float, float]] = None
    convex: bool = True
    thread_safe: bool = True
    junctions: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BadParameter(f"empty domain ({self.lo}, {self.hi})")
        if self.minimizers is not None:
            m_lo, m_hi = self.minimizers
            if not (self.lo < m_lo <= m_hi < self.hi):
                raise BadParameter("minimizers must lie inside the domain")

    def contains(self, x: float) -> bool:
        return self.lo < x < self.hi

    def __call__(self, x: float) -> float:
        if not self.contains(x):
            raise OutOfDomain(f"x={x!r} outside {self.name} domain ({self.lo}, {self.hi})")
        v = self.func(x)
        if not math.isfinite(v):
            raise OutOfDomain(f"{self.name}({x!r}) = {v!r}")
        return v

    @property
    def has_analytic(self) -> bool:
        return self.pair is not None

    def analytic_pair(self, x: float) -> OneSidedPair:
        if self.pair is None:
            raise AttributeError(f"{self.name} has no analytic derivatives")
        p = self.pair(x)
        return p if isinstance(p, OneSidedPair) else OneSidedPair(*p)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def nearest_minimizer(self, x: float) -> float:
        if self.minimizers is None:
            raise ValueError(f"{self.name} declares no minimizer")
        m_lo, m_hi = self.minimizers
        return min(max(x, m_lo), m_hi)

    @property
    def min_value(self) -> float:
        if self.minimizers is None:
            raise ValueError(f"{self.name} declares no minimizer")
        return self(self.minimizers[0])


def _smooth(df: Callable[[float], float]) -> Callable[[float], OneSidedPair]:
    def pair(x):
        d = df(x)
        return OneSidedPair(d, d)
    return pair


# --- sum of absolute values -------------------------------------------------

_SUM_ABS_OFFSETS = tuple(i / 100 for i in range(100))
# every kink location, with multiplicity (0 appears twice)
_SUM_ABS_KINKS = tuple(sorted(_SUM_ABS_OFFSETS + tuple(-c for c in _SUM_ABS_OFFSETS)))


def _sum_abs(x):
    return math.fsum(abs(x - c) + abs(x + c) for c in _SUM_ABS_OFFSETS)


def _sum_abs_pair(x):
    # each |x - k| contributes +1 to the right slope when k <= x, else -1;
    # to the left slope +1 when k < x, else -1
    n = len(_SUM_ABS_KINKS)
    at_or_below = bisect.bisect_right(_SUM_ABS_KINKS, x)
    below = bisect.bisect_left(_SUM_ABS_KINKS, x)
    return OneSidedPair(float(2 * at_or_below - n), float(2 * below - n))


def builtin_sum_abs() -> Objective:
    """``sum_i |x - i/100| + |x + i/100|`` for ``i = 0..99`` on ``(-1, 1)``."""
    return Objective("sum_abs", -1.0, 1.0, _sum_abs, _sum_abs_pair,
                     minimizers=(0.0, 0.0), junctions=tuple(sorted(set(_SUM_ABS_KINKS))))


# --- three-piece power function ----------------------------------------------

def builtin_piecewise_power(p: float = 1.3, q: float = 1.2) -> Objective:
    """``|x|^p/p`` left of 0, ``x^q/q`` on ``[0, 1/2)``, slope-3 line on ``[1/2, 1)``."""
    if not (p > 1 and q > 1):
        raise BadParameter("exponents must exceed 1")
    join = 0.5 ** q / q
    knee = 0.5 ** (q - 1)
    if knee > 3.0:
        raise BadParameter("linear piece would break convexity")

    def func(x):
        if x < 0:
            return abs(x) ** p / p
        if x < 0.5:
            return x ** q / q
        return 3.0 * (x - 0.5) + join

    def pair(x):
        if x < 0:
            d = -abs(x) ** (p - 1)
            return OneSidedPair(d, d)
        if x == 0:
            return OneSidedPair(0.0, 0.0)
        if x < 0.5:
            d = x ** (q - 1)
            return OneSidedPair(d, d)
        if x == 0.5:
            return OneSidedPair(3.0, knee)
        return OneSidedPair(3.0, 3.0)

    return Objective("piecewise_power", -1.0, 1.0, func, pair,
                     minimizers=(0.0, 0.0), junctions=(0.0, 0.5))


# --- Huber ---------------------------------------------------------------------

def builtin_huber(delta: float = 0.5) -> Objective:
    if not delta > 0:
        raise BadParameter(f"Huber delta must be positive, got {delta!r}")

    def func(x):
        if abs(x) <= delta:
            return 0.5 * x * x
        return delta * (abs(x) - 0.5 * delta)

    def df(x):
        if abs(x) <= delta:
            return x
        return math.copysign(delta, x)

    return Objective("huber", -2.0, 2.0, func, _smooth(df),
                     minimizers=(0.0, 0.0), junctions=(-delta, delta))


# --- |x|^p / p -----------------------------------------------------------------

def builtin_power_p(p: float = 1.3) -> Objective:
    if not p > 1:
        raise BadParameter(f"power must exceed 1, got {p!r}")

    def func(x):
        return abs(x) ** p / p

    def df(x):
        if x == 0:
            return 0.0
        return math.copysign(abs(x) ** (p - 1), x)

    return Objective("power_p", -3.0, 3.0, func, _smooth(df), minimizers=(0.0, 0.0))


# --- x for x >= 0, x^2 for x < 0 ------------------------------------------------

def builtin_kink_counterexample() -> Objective:
    """Convex, minimised at 0, yet with nonzero specular derivative there."""

    def func(x):
        return x if x >= 0 else x * x

    def pair(x):
        if x > 0:
            return OneSidedPair(1.0, 1.0)
        if x < 0:
            return OneSidedPair(2 * x, 2 * x)
        return OneSidedPair(1.0, 0.0)

    return Objective("kink_counterexample", -10.0, 10.0, func, pair,
                     minimizers=(0.0, 0.0), junctions=(0.0,))


def absolute_value(lo: float = -1.0, hi: float = 1.0) -> Objective:
    """``|x|`` on ``(lo, hi)``; handy for hand-checkable runs. Not in the registry."""

    def pair(x):
        if x > 0:
            return OneSidedPair(1.0, 1.0)
        if x < 0:
            return OneSidedPair(-1.0, -1.0)
        return OneSidedPair(1.0, -1.0)

    return Objective("abs", lo, hi, abs, pair, minimizers=(0.0, 0.0), junctions=(0.0,))


REGISTRY: dict[str, Callable[[], Objective]] = {
    "sum_abs": builtin_sum_abs,
    "piecewise_power": builtin_piecewise_power,
    "huber": builtin_huber,
    "power_p": builtin_power_p,
    "kink_counterexample": builtin_kink_counterexample,
}

#: the four objectives of the benchmark tables
BENCHMARKS = ("sum_abs", "piecewise_power", "huber", "power_p")


def get_objective(name: str) -> Objective:
    try:
        factory = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown objective {name!r}; choose from {sorted(REGISTRY)}") from None
    return factory()


def builtins() -> list[Objective]:
    return [factory() for factory in REGISTRY.values()]


def lipschitz_bound(f: Objective, c: float, d: float, mesh: float = 1e-6,
                    mode: DerivativeMode = DerivativeMode.ANALYTIC) -> float:
    """Lipschitz constant of a convex ``f`` on ``[c, d]``: ``max(|f'_+(c)|, |f'_-(d)|)``."""
    if not (f.lo < c < d < f.hi):
        raise OutOfDomain(f"[{c}, {d}] not inside ({f.lo}, {f.hi})")
    return max(abs(pair_at(f, c, mesh, mode).right), abs(pair_at(f, d, mesh, mode).left))
