"""Derivative calculus for one-dimensional functions.

The specular derivative of ``f`` at ``x`` is built from the right- and
left-hand derivatives ``alpha = f'_+(x)`` and ``beta = f'_-(x)``::

    A(alpha, beta) = (alpha*beta - 1 + sqrt((alpha**2 + 1)*(beta**2 + 1))) / (alpha + beta)

with the value 0 when ``alpha + beta = 0``. Geometrically ``A`` is the slope
of the line bisecting the two one-sided tangent lines.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DegenerateSum, OutOfDomain

#: relative width of the band around ``alpha + beta = 0`` treated as the zero branch
ZERO_SUM_RTOL = 1e-12
#: smallest mesh tried when shrinking a finite-difference probe near a boundary
MIN_MESH = 1e-12


class Side(enum.Enum):
    RIGHT = "right"
    LEFT = "left"


class DerivativeMode(enum.Enum):
    ANALYTIC = "analytic"
    FD = "fd"


@dataclass(frozen=True)
class OneSidedPair:
    """Right- and left-hand derivative values at a single point."""

    right: float
    left: float

    def __post_init__(self):
        if not (math.isfinite(self.right) and math.isfinite(self.left)):
            raise ValueError(f"one-sided derivatives must be finite, got {self!r}")

    @property
    def total(self) -> float:
        return self.right + self.left


@dataclass(frozen=True)
class DerivativeEstimate:
    value: float
    method: DerivativeMode
    mesh: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("derivative estimate must be finite")
        if self.method is DerivativeMode.FD and not (self.mesh and self.mesh > 0):
            raise ValueError("finite-difference estimates need a positive mesh")


def a_formula(alpha: float, beta: float) -> float:
    """Closed-form specular value ``A(alpha, beta)``.

    Evaluated in one of two algebraically equal forms so that neither suffers
    cancellation: for ``alpha*beta >= 1`` the textbook quotient, otherwise the
    rationalised ``(alpha + beta) / (1 - alpha*beta + sqrt(...))``, whose
    denominator is always >= 1 there. Both forms are symmetric in the
    arguments and odd under ``(alpha, beta) -> (-beta, -alpha)`` bit for bit.

    Raises
    ------
    DegenerateSum
        If ``alpha + beta`` is exactly zero.
    """
    s = alpha + beta
    if s == 0.0:
        raise DegenerateSum(f"alpha + beta == 0 for alpha={alpha!r}, beta={beta!r}")
    if alpha == beta:
        return alpha
    p = alpha * beta
    root = math.sqrt((alpha * alpha + 1.0) * (beta * beta + 1.0))
    if p >= 1.0:
        return (p - 1.0 + root) / s
    return s / (1.0 - p + root)


def _is_zero_sum(pair: OneSidedPair) -> bool:
    scale = max(1.0, abs(pair.right), abs(pair.left))
    return abs(pair.total) <= ZERO_SUM_RTOL * scale


def specular_from_pair(pair: OneSidedPair) -> float:
    """Specular derivative from a one-sided pair; 0 on the (tolerant) zero branch."""
    if _is_zero_sum(pair):
        return 0.0
    return a_formula(pair.right, pair.left)


def symmetric_from_pair(pair: OneSidedPair) -> float:
    return (pair.right + pair.left) / 2.0


def specular_sign(pair: OneSidedPair) -> int:
    """Sign of ``right + left``, which is also the sign of the specular derivative.

    Uses the same zero band as :func:`specular_from_pair` so the two always agree.
    """
    if _is_zero_sum(pair):
        return 0
    return 1 if pair.total > 0 else -1


def _probe(f, x: float) -> float:
    v = f(x)
    if not math.isfinite(v):
        raise OutOfDomain(f"non-finite value {v!r} at x={x!r}")
    return v


def _shrunk_mesh(f, x: float, h: float, direction: int) -> float:
    while not f.contains(x + direction * h):
        h /= 2.0
        if h < MIN_MESH:
            raise OutOfDomain(f"no interior probe from x={x!r} on side {direction:+d}")
    return h


def one_sided_fd(f, x: float, h: float, side: Side) -> DerivativeEstimate:
    """Forward (``Side.RIGHT``) or backward (``Side.LEFT``) difference quotient.

    If the probe ``x +/- h`` would leave the open domain, ``h`` is halved until
    it fits, down to ``MIN_MESH``. The quotient divides by the representable
    step ``|(x +/- h) - x|`` so linear pieces give their slope exactly.
    """
    if not h > 0:
        raise ValueError("mesh must be positive")
    if not f.contains(x):
        raise OutOfDomain(f"x={x!r} outside {f.name} domain ({f.lo}, {f.hi})")
    direction = 1 if side is Side.RIGHT else -1
    h = _shrunk_mesh(f, x, h, direction)
    xp = x + direction * h
    step = abs(xp - x)
    fx = _probe(f, x)
    fp = _probe(f, xp)
    value = (fp - fx) / step if direction > 0 else (fx - fp) / step
    return DerivativeEstimate(value, DerivativeMode.FD, step)


def pair_at(f, x: float, mesh: float = 1e-6,
            mode: DerivativeMode = DerivativeMode.ANALYTIC) -> OneSidedPair:
    """One-sided derivatives of ``f`` at ``x``.

    Analytic mode uses ``f.analytic_pair`` when the objective has one and
    silently falls back to finite differences otherwise.
    """
    if mode is DerivativeMode.ANALYTIC and f.has_analytic:
        if not f.contains(x):
            raise OutOfDomain(f"x={x!r} outside {f.name} domain ({f.lo}, {f.hi})")
        return f.analytic_pair(x)
    right = one_sided_fd(f, x, mesh, Side.RIGHT).value
    left = one_sided_fd(f, x, mesh, Side.LEFT).value
    return OneSidedPair(right, left)


def specular_derivative(f, x: float, mesh: float = 1e-6,
                        mode: DerivativeMode = DerivativeMode.ANALYTIC) -> float:
    return specular_from_pair(pair_at(f, x, mesh, mode))


def symmetric_derivative(f, x: float, mesh: float = 1e-6,
                         mode: DerivativeMode = DerivativeMode.ANALYTIC) -> float:
    """Symmetric derivative; a central difference in FD mode."""
    if mode is DerivativeMode.ANALYTIC and f.has_analytic:
        return symmetric_from_pair(pair_at(f, x, mesh, mode))
    if not f.contains(x):
        raise OutOfDomain(f"x={x!r} outside {f.name} domain ({f.lo}, {f.hi})")
    h = min(_shrunk_mesh(f, x, mesh, 1), _shrunk_mesh(f, x, mesh, -1))
    xr, xl = x + h, x - h
    return (_probe(f, xr) - _probe(f, xl)) / (xr - xl)
