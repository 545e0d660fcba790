"""Extremal copulas C_t / C_r, exact event probabilities under them, sampling,
and the achievability decision for the two bounds that can fail to be attained.

Both copulas make V a deterministic function of U ~ Uniform(0, 1):

* lower kind, threshold t:  v = u on (0, t],  v = 1 + t - u on (t, 1)
* upper kind, threshold r:  v = r - u on (0, r),  v = u on [r, 1)

so P(X + Y <= z) is the Lebesgue measure of a set of u, which is computed
exactly from the piecewise-linear quantile functions.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Literal

import numpy as np

from .bounds import Plateau, plateaus, scan_sum, _clamp
from .dist import CdfCurve, to_fraction

Kind = Literal["lower", "upper"]
Relation = Literal["<=", "<"]
BoundKind = Literal["lower_leq", "upper_lt"]


class ConsistencyError(RuntimeError):
    """The analytic and numeric achievability routes disagree."""


@dataclass(frozen=True)
class ExtremalCopula:
    kind: Kind
    threshold: Fraction

    def __post_init__(self) -> None:
        if self.kind not in ("lower", "upper"):
            raise ValueError(f"kind must be 'lower' or 'upper', got {self.kind!r}")
        t = to_fraction(self.threshold)
        if not 0 <= t <= 1:
            raise ValueError(f"threshold must lie in [0, 1], got {t}")
        object.__setattr__(self, "threshold", t)

    def branches(self) -> list[tuple[Fraction, Fraction, Fraction, Fraction]]:
        """``(lo, hi, a, b)`` such that ``v = a + b*u`` for ``u`` in ``(lo, hi)``."""
        t = self.threshold
        if self.kind == "lower":
            parts = [(Fraction(0), t, Fraction(0), Fraction(1)), (t, Fraction(1), 1 + t, Fraction(-1))]
        else:
            parts = [(Fraction(0), t, t, Fraction(-1)), (t, Fraction(1), Fraction(0), Fraction(1))]
        return [p for p in parts if p[1] > p[0]]


def eval_copula(c: ExtremalCopula, u: Any, v: Any) -> Fraction:
    u, v = to_fraction(u), to_fraction(v)
    if not (0 <= u <= 1 and 0 <= v <= 1):
        raise ValueError(f"copula arguments must lie in [0, 1], got ({u}, {v})")
    t = c.threshold
    if c.kind == "lower":
        if u >= t and v >= t:
            return max(u + v - 1, t)
        return min(u, v)
    if u <= t and v <= t:
        return max(u + v - t, Fraction(0))
    return min(u, v)


def sample(
    c: ExtremalCopula, F: CdfCurve, G: CdfCurve, n: int, seed: int | None = None
) -> np.ndarray:
    """Draw ``n`` pairs ``(x, y)`` from the joint law that ``c`` induces on F, G.

    Returns a float array of shape ``(n, 2)``; the same seed gives the same draws.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    # Keep u in the open unit interval so the quantile never sees 0.
    while True:
        bad = u == 0.0
        if not bad.any():
            break
        u[bad] = rng.random(int(bad.sum()))
    t = float(c.threshold)
    if c.kind == "lower":
        v = np.where(u <= t, u, 1.0 + t - u)
    else:
        v = np.where(u < t, t - u, u)
    return np.column_stack([F.quantile_array(u), G.quantile_array(v)])


def event_fraction(samples: np.ndarray, z: float, relation: Relation = "<=", tol: float = 1e-9) -> float:
    """Share of sampled pairs with x + y <= z (or < z).

    Sums within ``tol`` of ``z`` count as equal to ``z``; float quantiles can
    miss an exact tie by a few ulps.
    """
    if len(samples) == 0:
        return float("nan")
    s = samples[:, 0] + samples[:, 1]
    z = float(z)
    hit = s <= z + tol if relation == "<=" else s < z - tol
    return float(np.mean(hit))


def ks_distance(values: np.ndarray, curve: CdfCurve) -> float:
    """Kolmogorov-Smirnov distance between the empirical CDF of ``values`` and ``curve``.

    Handles atoms: the sup is taken over both sides of every sample point.
    """
    values = np.sort(np.asarray(values, dtype=float))
    n = len(values)
    uniq, counts = np.unique(values, return_counts=True)
    emp_right = np.cumsum(counts) / n
    emp_left = emp_right - counts / n
    d_right = np.abs(emp_right - curve.cdf_array(uniq))
    d_left = np.abs(emp_left - curve.cdf_array(uniq, left=True))
    return float(max(d_right.max(), d_left.max()))


def _piece_at(pieces, his, u: Fraction):
    return pieces[bisect_left(his, u)]


def exact_prob(c: ExtremalCopula, F: CdfCurve, G: CdfCurve, z: Any, relation: Relation = "<=") -> Fraction:
    """P(X + Y <= z) (or < z) under the coupling X = F^-1(U), Y = G^-1(v(U))."""
    if relation not in ("<=", "<"):
        raise ValueError(f"relation must be '<=' or '<', got {relation!r}")
    z = to_fraction(z)
    fp, gp = F.quantile_pieces(), G.quantile_pieces()
    f_his, g_his = [p[1] for p in fp], [p[1] for p in gp]
    f_cuts = [p[0] for p in fp] + f_his
    g_cuts = [p[0] for p in gp] + g_his
    total = Fraction(0)
    for lo, hi, va, vb in c.branches():
        cuts = {lo, hi}
        cuts.update(w for w in f_cuts if lo < w < hi)
        for w in g_cuts:
            u = (w - va) / vb
            if lo < u < hi:
                cuts.add(u)
        cuts = sorted(cuts)
        for p, q in zip(cuts, cuts[1:]):
            m = (p + q) / 2
            _, _, fa, fb = _piece_at(fp, f_his, m)
            _, _, ga, gb = _piece_at(gp, g_his, va + vb * m)
            # x + y = alpha + beta*u on (p, q)
            alpha = fa + ga + gb * va
            beta = fb + gb * vb
            total += _measure(p, q, alpha, beta, z, relation)
    return total


def _measure(p: Fraction, q: Fraction, alpha: Fraction, beta: Fraction, z: Fraction, relation: str) -> Fraction:
    if beta == 0:
        hit = alpha <= z if relation == "<=" else alpha < z
        return q - p if hit else Fraction(0)
    root = (z - alpha) / beta
    if beta > 0:
        return max(Fraction(0), min(q, root) - p)
    return max(Fraction(0), q - max(p, root))


@dataclass(frozen=True)
class AchievabilityReport:
    """Whether a bound is attained by some coupling, with the supporting numbers.

    ``achieved_value`` is the probability under the candidate extremal copula,
    which attains the bound whenever any coupling does.  ``witness_interval``
    is the u-space image of the first x-interval that blocks attainment.
    """

    bound_kind: BoundKind
    bound_value: Fraction
    achieved_value: Fraction
    achievable: bool
    witness_interval: tuple[Fraction, Fraction] | None = None
    plateaus: tuple[Plateau, ...] = ()


def achievability(
    F: CdfCurve, G: CdfCurve, z: Any, bound_kind: BoundKind, tol: float = 1e-9
) -> AchievabilityReport:
    """Decide whether the lower bound on P(X+Y <= z) or the upper bound on P(X+Y < z) is attained.

    Two routes are computed and must agree, otherwise ConsistencyError:

    * numeric: evaluate the bound's extremal copula exactly and compare
      with the bound within ``tol``;
    * analytic: a strict jump of the bound at z means it is attained;
      otherwise it fails exactly when the objective is flat at the bound's
      level on an interval where F strictly increases.
    """
    z = to_fraction(z)
    scan = scan_sum(F, G, z)
    if bound_kind == "lower_leq":
        bound = _clamp(scan.sup_closed - 1)
        jumped = bound > _clamp(scan.sup_open - 1)
        level = 1 + bound
        copula = ExtremalCopula("lower", bound)
        achieved = exact_prob(copula, F, G, z, "<=")
    elif bound_kind == "upper_lt":
        bound = _clamp(scan.inf_open)
        jumped = bound < _clamp(scan.inf_closed)
        level = bound
        copula = ExtremalCopula("upper", bound)
        achieved = exact_prob(copula, F, G, z, "<")
    else:
        raise ValueError(f"unknown bound kind {bound_kind!r}")

    numeric = abs(achieved - bound) <= tol
    flats = () if jumped else tuple(plateaus(F, G, z, level))
    analytic = jumped or not flats
    if numeric != analytic:
        raise ConsistencyError(
            f"{bound_kind} at z={z}: analytic verdict {analytic} but extremal copula "
            f"gives {float(achieved)!r} against bound {float(bound)!r} (tol={tol})"
        )
    witness = None if analytic else (flats[0].u_lo, flats[0].u_hi)
    return AchievabilityReport(bound_kind, bound, achieved, analytic, witness, flats)
