"""Grid and random-sample checks of the convex-analysis facts behind the solvers.

Every check returns a :class:`CheckReport`; ``passed`` is exactly
``worst_violation <= tolerance`` (plus, for a few checks, a count of strict
failures that must be zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import (DerivativeMode, OneSidedPair, a_formula, pair_at, specular_from_pair,
                   specular_sign)
from .errors import BadTrace
from .objectives import Objective
from .optimizers import Method, RunTrace, ScheduleKind

DEFAULT_GRID = 201


@dataclass
class CheckReport:
    check_name: str
    passed: bool
    worst_violation: float
    samples: int
    tolerance: float
    witness: Optional[list] = None

    def line(self) -> str:
        """``CHECK <name> PASS|FAIL worst=<v> samples=<n> [witness=<points>]``"""
        out = (f"CHECK {self.check_name} {'PASS' if self.passed else 'FAIL'} "
               f"worst={self.worst_violation!r} samples={self.samples}")
        if self.witness:
            out += " witness=" + ";".join(_fmt_witness(w) for w in self.witness)
        return out


def _fmt_witness(w) -> str:
    if isinstance(w, (tuple, list)):
        return "(" + ",".join(_fmt_witness(v) for v in w) + ")"
    if isinstance(w, float):
        return repr(w)
    return str(w)


def _report(name, worst, tol, samples, witness=None, strict_failures=0):
    worst = max(0.0, float(worst))
    return CheckReport(name, worst <= tol and strict_failures == 0, worst, samples, tol, witness)


@dataclass(frozen=True)
class Grid:
    """``n`` evenly spaced points from ``lo`` to ``hi`` inclusive."""

    lo: float
    hi: float
    n: int = DEFAULT_GRID

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("grid needs lo < hi")
        if self.n < 2:
            raise ValueError("grid needs at least two points")

    @classmethod
    def for_objective(cls, f: Objective, n: int = DEFAULT_GRID) -> "Grid":
        """Grid spanning the domain with endpoints pulled in by ``1e-9 * width``."""
        if not f.bounded:
            raise ValueError(f"{f.name} has an unbounded domain")
        mu = 1e-9 * f.width
        return cls(f.lo + mu, f.hi - mu, n)

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)


def _tol(mode, analytic, fd):
    return analytic if mode is DerivativeMode.ANALYTIC else fd


def _spd(f, xs, mode, mesh):
    return np.array([specular_from_pair(pair_at(f, float(x), mesh, mode)) for x in xs])


# ---------------------------------------------------------------------------
# pure-formula checks

def _random_pairs(samples: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Pairs with magnitudes log-uniform on ``[1e-6, 1e6]`` and random signs."""
    rng = np.random.default_rng(seed)
    mags = 10.0 ** rng.uniform(-6, 6, size=(samples, 2))
    signs = rng.choice([-1.0, 1.0], size=(samples, 2))
    v = mags * signs
    # a few exact ties exercise the differentiable case
    v[::97, 1] = v[::97, 0]
    return v[:, 0], v[:, 1]


def check_a_bounds(samples: int = 100_000, seed: int = 0) -> CheckReport:
    """``beta <= A(alpha, beta) <= alpha`` whenever ``beta <= alpha``.

    Violations are measured relative to ``max(|alpha|, |beta|)``.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    u, v = _random_pairs(samples, seed)
    worst, witness, used = 0.0, None, 0
    for a, b in zip(np.maximum(u, v).tolist(), np.minimum(u, v).tolist()):
        if abs(a + b) < 1e-9:
            continue
        used += 1
        val = a_formula(a, b)
        viol = max(b - val, val - a) / max(abs(a), abs(b))
        if viol > worst:
            worst, witness = viol, (a, b, val)
    return _report("a_bounds", worst, 1e-12, used, [witness] if witness else None)


def check_sign_identities(samples: int = 100_000, seed: int = 1) -> CheckReport:
    """``specular_sign == sign(f_spd)`` exactly and ``2|f_spd| <= |alpha + beta|``."""
    u, v = _random_pairs(samples, seed)
    worst, witness, mismatches = 0.0, [], 0
    for a, b in zip(u.tolist(), v.tolist()):
        pair = OneSidedPair(a, b)
        spd = specular_from_pair(pair)
        sign = (spd > 0) - (spd < 0)
        if specular_sign(pair) != sign:
            mismatches += 1
            witness.append((a, b))
        excess = 2 * abs(spd) - abs(a + b)
        if excess > worst:
            worst = excess
            witness.append((a, b))
    return _report("sign_identities", worst, 1e-12, samples, witness[:5] or None, mismatches)


# ---------------------------------------------------------------------------
# grid checks on an objective

def check_subgradient_inequality(f: Objective, grid: Grid,
                                 mode: DerivativeMode = DerivativeMode.ANALYTIC,
                                 mesh: float = 1e-6) -> CheckReport:
    """``f(x) >= f_spd(y) (x - y) + f(y)`` over all ordered grid pairs."""
    xs = grid.points()
    fx = np.array([f(float(x)) for x in xs])
    spd = _spd(f, xs, mode, mesh)
    # gap[i, j] = f(x_i) - f_spd(x_j) (x_i - x_j) - f(x_j)
    gap = fx[:, None] - spd[None, :] * (xs[:, None] - xs[None, :]) - fx[None, :]
    i, j = np.unravel_index(np.argmin(gap), gap.shape)
    worst = -gap[i, j]
    tol = _tol(mode, 1e-9, 1e-4)
    return _report(f"subgradient_inequality[{f.name}]", worst, tol, gap.size,
                   [(float(xs[i]), float(xs[j]))] if worst > 0 else None)


def check_specular_monotone(f: Objective, grid: Grid,
                            mode: DerivativeMode = DerivativeMode.ANALYTIC,
                            mesh: float = 1e-6) -> CheckReport:
    """The specular derivative of a convex function is nondecreasing."""
    xs = grid.points()
    spd = _spd(f, xs, mode, mesh)
    drops = spd[:-1] - spd[1:]
    i = int(np.argmax(drops))
    worst = drops[i]
    return _report(f"specular_monotone[{f.name}]", worst, _tol(mode, 1e-12, 1e-4), len(xs),
                   [(float(xs[i]), float(xs[i + 1]))] if worst > 0 else None)


def _runs(signs: Sequence[int]) -> Iterable[tuple[int, int, int]]:
    start = 0
    for i in range(1, len(signs) + 1):
        if i == len(signs) or signs[i] != signs[start]:
            yield signs[start], start, i
            start = i


def check_sign_monotonicity_props(f: Objective, grid: Grid,
                                  mode: DerivativeMode = DerivativeMode.ANALYTIC,
                                  mesh: float = 1e-6) -> CheckReport:
    """Positive specular derivative on a run means ``f`` strictly increases there,
    negative means strictly decreasing, zero means constant (within 1e-9)."""
    xs = grid.points()
    fx = np.array([f(float(x)) for x in xs])
    spd = _spd(f, xs, mode, mesh)
    signs = [0 if abs(s) <= 1e-12 else (1 if s > 0 else -1) for s in spd]
    worst, strict_failures, witness = 0.0, 0, []
    for sign, lo, hi in _runs(signs):
        if hi - lo < 2:
            continue
        diffs = np.diff(fx[lo:hi])
        if sign == 0:
            spread = float(fx[lo:hi].max() - fx[lo:hi].min())
            if spread > 1e-9:
                worst = max(worst, spread)
                witness.append((float(xs[lo]), float(xs[hi - 1])))
            continue
        bad = np.nonzero(sign * diffs <= 0)[0]
        if bad.size:
            strict_failures += bad.size
            worst = max(worst, float(np.max(-sign * diffs[bad])))
            witness.extend((float(xs[lo + b]), float(xs[lo + b + 1])) for b in bad[:3])
    return _report(f"sign_monotonicity[{f.name}]", worst, 1e-9, len(xs),
                   witness or None, strict_failures)


def check_alignment(f: Objective, grid: Grid,
                    mode: DerivativeMode = DerivativeMode.ANALYTIC,
                    mesh: float = 1e-6) -> CheckReport:
    """``f_spd(x) (x - x*) >= 0``, strictly positive away from ``x*`` where ``f_spd != 0``."""
    xs = grid.points()
    spd = _spd(f, xs, mode, mesh)
    x_star = np.array([f.nearest_minimizer(float(x)) for x in xs])
    prod = spd * (xs - x_star)
    i = int(np.argmin(prod))
    worst = -prod[i]
    strict = (np.abs(xs - x_star) >= 1e-3) & (spd != 0) & (prod < 1e-12)
    witness = [(float(xs[i]), float(prod[i]))] if worst > 0 else []
    witness.extend((float(x), float(p)) for x, p in zip(xs[strict][:3], prod[strict][:3]))
    return _report(f"alignment[{f.name}]", worst, 1e-12, len(xs), witness or None,
                   int(strict.sum()))


def check_kink_uniqueness(f: Objective, grid: Grid,
                          mode: DerivativeMode = DerivativeMode.ANALYTIC,
                          mesh: float = 1e-6) -> CheckReport:
    """At most one point where the one-sided derivatives have strictly opposite signs."""
    xs = grid.points()
    hits = []
    for x in xs:
        p = pair_at(f, float(x), mesh, mode)
        if p.right * p.left < -1e-12:
            hits.append(float(x))
    return _report(f"kink_uniqueness[{f.name}]", max(0, len(hits) - 1), 0, len(xs),
                   hits or None)


def quasi_mvt_witness(f: Objective, lo: float, hi: float, grid_n: int = 1001,
                      mode: DerivativeMode = DerivativeMode.ANALYTIC,
                      mesh: float = 1e-6) -> CheckReport:
    """Find interior grid points ``c1, c2`` with ``f_spd(c2) <= chord <= f_spd(c1)``."""
    if grid_n < 3:
        raise ValueError("grid_n must be at least 3")
    if not (f.lo < lo < hi < f.hi):
        raise ValueError(f"[{lo}, {hi}] not inside ({f.lo}, {f.hi})")
    slope = (f(hi) - f(lo)) / (hi - lo)
    xs = np.linspace(lo, hi, grid_n)[1:-1]
    spd = _spd(f, xs, mode, mesh)
    i1, i2 = int(np.argmax(spd)), int(np.argmin(spd))
    worst = max(slope - spd[i1], spd[i2] - slope)
    witness = [("c1", float(xs[i1])), ("c2", float(xs[i2])), ("chord", slope)]
    return _report(f"quasi_mvt[{f.name}]", worst, 1e-6, len(xs), witness)


def check_quasi_mvt_random(f: Objective, intervals: int = 100, grid_n: int = 1001,
                           seed: int = 0, mode: DerivativeMode = DerivativeMode.ANALYTIC,
                           mesh: float = 1e-6) -> CheckReport:
    """:func:`quasi_mvt_witness` on seeded random subintervals of the domain."""
    rng = np.random.default_rng(seed)
    g = Grid.for_objective(f)
    worst, witness = 0.0, None
    for _ in range(intervals):
        lo, hi = sorted(rng.uniform(g.lo, g.hi, size=2).tolist())
        if hi - lo < 1e-9:
            continue
        rep = quasi_mvt_witness(f, lo, hi, grid_n, mode, mesh)
        if rep.worst_violation > worst or (witness is None and not rep.passed):
            worst, witness = rep.worst_violation, [(lo, hi)]
    return _report(f"quasi_mvt_random[{f.name}]", worst, 1e-6, intervals, witness)


# ---------------------------------------------------------------------------
# trace checks

def _is_shor_family(trace: RunTrace) -> bool:
    return trace.method is Method.ISGM or (
        trace.method is Method.SGM and trace.schedule_kind is ScheduleKind.SHOR_HALVING)


def find_overshoots(trace: RunTrace, x_star: float) -> list[tuple[int, float, float]]:
    """Steps that jump across ``x*`` and land outside the next envelope.

    Returns ``(k, x_{k+1}, t_{k+1})`` for every such step ``k``.
    """
    if not _is_shor_family(trace):
        raise BadTrace(f"{trace.method.value} trace has no envelope")
    out = []
    recs = trace.records
    for prev, cur in zip(recs, recs[1:]):
        e0, e1 = prev.x - x_star, cur.x - x_star
        if e0 * e1 < 0 and abs(e1) > cur.envelope:
            out.append((prev.k, cur.x, cur.envelope))
    return out


def check_envelope(trace: RunTrace, x_star: float, lagged: bool = False) -> CheckReport:
    """Distance to ``x*`` against the halving envelope.

    ISGM: ``|x_k - x*| <= (b - a) 2**-k`` for ``k >= 1``.
    SGM with Shor halving: ``|x_k - x*| <= t_k``; with ``lagged=True`` the
    weaker ``|x_k - x*| <= t_{k-1}`` for ``k >= 1``, which holds whenever
    ``t0 >= |x0 - x*| / 2``. Overshoot steps are listed first among the witnesses.
    """
    if not _is_shor_family(trace):
        raise BadTrace(f"{trace.method.value} trace was not run with a halving schedule")
    start = 1 if (trace.method is Method.ISGM or lagged) else 0
    scale = 2.0 if (lagged and trace.method is Method.SGM) else 1.0
    witness = []
    if trace.method is Method.SGM:
        witness.extend(("overshoot",) + o for o in find_overshoots(trace, x_star))
    worst = 0.0
    for r in trace.records[start:]:
        excess = abs(r.x - x_star) - scale * r.envelope
        if excess > worst:
            worst = excess
        if excess > 1e-9:
            witness.append((r.k, r.x, scale * r.envelope))
    name = f"envelope[{trace.objective},{trace.method.value}{',lagged' if lagged else ''}]"
    return _report(name, worst, 1e-9, len(trace.records) - start, witness[:10] or None)


def fit_rlinear_constant(trace: RunTrace, x_star: float) -> tuple[float, int]:
    """Smallest ``c`` with ``|x_k - x*| <= c 2**-k`` on the trace, and the ``k`` attaining it."""
    best_c, best_k = 0.0, 0
    for r in trace.records:
        c = math.ldexp(abs(r.x - x_star), r.k)
        if c > best_c:
            best_c, best_k = c, r.k
    return best_c, best_k


def check_rlinear(trace: RunTrace, x_star: float) -> CheckReport:
    """R-linear convergence: ``|x_k - x*| <= c 2**-k`` with ``c <= 4 (b - a)``.

    ``worst_violation`` is how far the fitted ``c`` overshoots the cap.
    """
    if not trace.records:
        raise BadTrace("empty trace")
    lo, hi = trace.domain
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise BadTrace("R-linear cap needs a bounded domain")
    cap = 4.0 * (hi - lo)
    c, k = fit_rlinear_constant(trace, x_star)
    bounds = [math.ldexp(c, -r.k) for r in trace.records]
    ratio_exact = c == 0 or all(b1 / b0 == 0.5 for b0, b1 in zip(bounds, bounds[1:]))
    rep = _report(f"rlinear[{trace.objective},{trace.method.value}]", c - cap, 0.0,
                  len(trace.records), [("c", c), ("k", k)])
    rep.passed = rep.passed and ratio_exact
    return rep


def combine(name: str, reports: Sequence[CheckReport]) -> CheckReport:
    """Fold several reports of the same check into one (worst case, all must pass)."""
    worst = max(r.worst_violation for r in reports)
    witness = [w for r in reports if not r.passed for w in (r.witness or [])]
    return CheckReport(name, all(r.passed for r in reports), worst,
                       sum(r.samples for r in reports), max(r.tolerance for r in reports),
                       witness[:10] or None)


def run_suite(objectives: Sequence[Objective], grid_n: int = DEFAULT_GRID, seed: int = 0,
              samples: int = 100_000, mvt_intervals: int = 20, mvt_grid: int = 1001,
              isgm_starts: int = 20, isgm_iters: int = 30) -> list[CheckReport]:
    """Every check over every objective, sorted by check name.

    ``grid_n`` sets the domain grid; the quasi mean value search keeps its own
    ``mvt_grid`` resolution on each subinterval.
    """
    from .optimizers import RunConfig, isgm_run, random_starts

    reports = [check_a_bounds(samples, seed), check_sign_identities(samples, seed + 1)]
    for f in objectives:
        grid = Grid.for_objective(f, grid_n)
        reports.append(check_subgradient_inequality(f, grid))
        reports.append(check_specular_monotone(f, grid))
        reports.append(check_sign_monotonicity_props(f, grid))
        reports.append(check_kink_uniqueness(f, grid))
        if f.minimizers is None:
            continue
        reports.append(check_alignment(f, grid))
        reports.append(check_quasi_mvt_random(f, mvt_intervals, mvt_grid, seed))
        env, rate = [], []
        for x0 in random_starts(f.lo, f.hi, isgm_starts, seed):
            trace = isgm_run(f, RunConfig(x0, max_iters=isgm_iters))
            x_star = f.nearest_minimizer(x0)
            env.append(check_envelope(trace, x_star))
            rate.append(check_rlinear(trace, x_star))
        reports.append(combine(f"envelope[{f.name},ISGM]", env))
        reports.append(combine(f"rlinear[{f.name},ISGM]", rate))
    return sorted(reports, key=lambda r: r.check_name)
