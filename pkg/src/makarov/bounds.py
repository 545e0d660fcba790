"""Makarov bounds on the CDF of X + Y and of X - Y for fixed marginals.

Every bound is the sup or inf over ``x`` of a piecewise-linear function with
jumps, such as ``x -> F(x) + G(z - x)``.  Between the breakpoints (knots of F
and ``z`` minus knots of G) that function is linear, so its sup and inf are
attained or approached at a breakpoint: either the value there or one of the
two one-sided limits.  Scanning those three numbers per breakpoint gives the
exact extremum with no iterative optimisation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, NamedTuple

from .dist import CdfCurve, to_fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def _clamp(p: Fraction) -> Fraction:
    return min(max(p, ZERO), ONE)


class Probe(NamedTuple):
    """Marginal values at breakpoint ``b`` paired with ``w = z - b``."""

    b: Fraction
    f_left: Fraction  # F(b-)
    f_right: Fraction  # F(b)
    g_left: Fraction  # G(w-)
    g_right: Fraction  # G(w)

    @property
    def closed(self) -> Fraction:
        """F(b) + G(z-b), the value of the right-continuous objective at b."""
        return self.f_right + self.g_right

    @property
    def open(self) -> Fraction:
        """F(b-) + G((z-b)-), the value of the left-limit objective at b."""
        return self.f_left + self.g_left

    @property
    def from_left(self) -> Fraction:
        """Limit of either objective as x increases to b."""
        return self.f_left + self.g_right

    @property
    def from_right(self) -> Fraction:
        """Limit of either objective as x decreases to b."""
        return self.f_right + self.g_left


def breakpoints(F: CdfCurve, G: CdfCurve, z: Fraction) -> list[Fraction]:
    return sorted(set(F.xs).union(z - c for c in G.xs))


def probes(F: CdfCurve, G: CdfCurve, z: Any) -> list[Probe]:
    z = to_fraction(z)
    out = []
    for b in breakpoints(F, G, z):
        w = z - b
        out.append(Probe(b, F.left(b), F(b), G.left(w), G(w)))
    return out


class SumScan(NamedTuple):
    """Extrema over x of ``F(x)+G(z-x)`` (closed) and ``F(x-)+G((z-x)-)`` (open)."""

    sup_closed: Fraction
    sup_open: Fraction
    inf_closed: Fraction
    inf_open: Fraction


def scan_sum(F: CdfCurve, G: CdfCurve, z: Any) -> SumScan:
    ps = probes(F, G, z)
    # The closed objective dominates its one-sided limits at every breakpoint and
    # the open objective is dominated by them, so only these combinations matter.
    return SumScan(
        sup_closed=max(p.closed for p in ps),
        sup_open=max(max(p.from_left, p.from_right) for p in ps),
        inf_closed=min(min(p.from_left, p.from_right) for p in ps),
        inf_open=min(p.open for p in ps),
    )


def tau_w(F: CdfCurve, G: CdfCurve, z: Any) -> Fraction:
    """Sharp lower bound on P(X+Y <= z): sup_x max(F(x) + G(z-x) - 1, 0)."""
    return _clamp(scan_sum(F, G, z).sup_closed - 1)


def tau_w_left(F: CdfCurve, G: CdfCurve, z: Any) -> Fraction:
    """Left limit tau_w(z-), the sharp lower bound on P(X+Y < z)."""
    return _clamp(scan_sum(F, G, z).sup_open - 1)


def rho_w(F: CdfCurve, G: CdfCurve, z: Any) -> Fraction:
    """Sharp upper bound on P(X+Y <= z): 1 + inf_x min(0, F(x) + G(z-x) - 1)."""
    return _clamp(scan_sum(F, G, z).inf_closed)


def rho_w_left(F: CdfCurve, G: CdfCurve, z: Any) -> Fraction:
    """Left limit rho_w(z-), the sharp upper bound on P(X+Y < z)."""
    return _clamp(scan_sum(F, G, z).inf_open)


class Plateau(NamedTuple):
    """Open x-interval on which ``F(x) + G(z-x)`` is constant while F increases.

    ``u_lo``/``u_hi`` are the F-values at its ends (the image in u-space).
    """

    x_lo: Fraction
    x_hi: Fraction
    u_lo: Fraction
    u_hi: Fraction


def plateaus(F: CdfCurve, G: CdfCurve, z: Any, level: Fraction) -> list[Plateau]:
    """All maximal x-intervals where ``F(x) + G(z-x) == level`` and F is strictly increasing.

    Adjacent segments are merged when F is continuous at the shared breakpoint.
    """
    ps = probes(F, G, z)
    found: list[Plateau] = []
    for a, b in zip(ps, ps[1:]):
        # Inside (a.b, b.b) both marginals are linear, so the sum is constant iff
        # its two end limits agree; F must rise for the image to have length.
        if a.from_right == level and b.from_left == level and b.f_left > a.f_right:
            seg = Plateau(a.b, b.b, a.f_right, b.f_left)
            if found and found[-1].x_hi == seg.x_lo and found[-1].u_hi == seg.u_lo:
                seg = found.pop()._replace(x_hi=seg.x_hi, u_hi=seg.u_hi)
            found.append(seg)
    return found


# -- differences --------------------------------------------------------------


class DiffScan(NamedTuple):
    """Extrema over x of ``F(x) - P(Y < x-delta)`` (sharp) and ``F(x) - G(x-delta)`` (historical)."""

    sup_sharp: Fraction
    inf_sharp: Fraction
    sup_hist: Fraction
    inf_hist: Fraction


def diff_probes(F: CdfCurve, G: CdfCurve, delta: Any) -> list[Probe]:
    """Probes along x - y = delta; ``g_left``/``g_right`` hold G((b-delta)-) and G(b-delta)."""
    delta = to_fraction(delta)
    bps = sorted(set(F.xs).union(delta + c for c in G.xs))
    out = []
    for b in bps:
        y = b - delta
        out.append(Probe(b, F.left(b), F(b), G.left(y), G(y)))
    return out


def scan_diff(F: CdfCurve, G: CdfCurve, delta: Any) -> DiffScan:
    sharp: list[Fraction] = []
    hist: list[Fraction] = []
    for p in diff_probes(F, G, delta):
        left_limit = p.f_left - p.g_left
        right_limit = p.f_right - p.g_right
        sharp += [p.f_right - p.g_left, left_limit, right_limit]
        hist += [right_limit, left_limit]
    return DiffScan(max(sharp), min(sharp), max(hist), min(hist))


def wd_diff_lower(F: CdfCurve, G: CdfCurve, delta: Any) -> Fraction:
    """Historical lower bound sup_x max(F(x) - G(x-delta), 0) on P(X-Y <= delta).

    It omits the point-mass term and is therefore not sharp when Y has atoms.
    """
    return _clamp(scan_diff(F, G, delta).sup_hist)


def wd_diff_upper(F: CdfCurve, G: CdfCurve, delta: Any) -> Fraction:
    """Historical upper bound 1 + inf_x min(F(x) - G(x-delta), 0)."""
    return _clamp(1 + scan_diff(F, G, delta).inf_hist)


def diff_scan_table(F: CdfCurve, G: CdfCurve, delta: Any) -> list[tuple[str, Fraction, Fraction]]:
    """Piecewise table of ``x -> F(x) - P(Y < x - delta)``.

    Rows are ``(where, lo_value, hi_value)``: ``where`` describes a point or an
    open interval; for intervals the two values are the limits at its ends.
    """
    ps = diff_probes(F, G, delta)
    rows: list[tuple[str, Fraction, Fraction]] = []
    first = ps[0]
    rows.append((f"x < {first.b}", ZERO, first.f_left - first.g_left))
    for i, p in enumerate(ps):
        v = p.f_right - p.g_left
        rows.append((f"x = {p.b}", v, v))
        if i + 1 < len(ps):
            q = ps[i + 1]
            rows.append((f"{p.b} < x < {q.b}", p.f_right - p.g_right, q.f_left - q.g_left))
    last = ps[-1]
    rows.append((f"x > {last.b}", last.f_right - last.g_right, ZERO))
    return rows


# -- reports ------------------------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    """All four pointwise bounds at ``z`` with achievability verdicts.

    ``lower_witness`` / ``upper_witness`` are u-space intervals reported when
    the lower bound on P(<= z) or the upper bound on P(< z) cannot be attained.
    """

    z: Fraction
    lower_leq: Fraction
    upper_leq: Fraction
    lower_lt: Fraction
    upper_lt: Fraction
    lower_leq_achievable: bool
    upper_lt_achievable: bool
    lower_witness: tuple[Fraction, Fraction] | None = None
    upper_witness: tuple[Fraction, Fraction] | None = None

    @property
    def witness(self) -> tuple[Fraction, Fraction] | None:
        return self.lower_witness if self.lower_witness is not None else self.upper_witness

    def check(self) -> None:
        """Raise AssertionError if the ordering or contrapositive invariants fail."""
        assert 0 <= self.lower_lt <= self.lower_leq <= self.upper_leq <= 1
        assert self.lower_lt <= self.upper_lt <= self.upper_leq
        if not self.lower_leq_achievable:
            assert self.lower_leq == self.lower_lt
        if not self.upper_lt_achievable:
            assert self.upper_leq == self.upper_lt


def sum_bounds(F: CdfCurve, G: CdfCurve, z: Any, tol: float = 1e-9) -> BoundReport:
    """Bounds on P(X+Y <= z) and P(X+Y < z) plus achievability of the two delicate ones."""
    from .copula import achievability

    z = to_fraction(z)
    scan = scan_sum(F, G, z)
    low = achievability(F, G, z, "lower_leq", tol=tol)
    up = achievability(F, G, z, "upper_lt", tol=tol)
    return BoundReport(
        z=z,
        lower_leq=_clamp(scan.sup_closed - 1),
        upper_leq=_clamp(scan.inf_closed),
        lower_lt=_clamp(scan.sup_open - 1),
        upper_lt=_clamp(scan.inf_open),
        lower_leq_achievable=low.achievable,
        upper_lt_achievable=up.achievable,
        lower_witness=low.witness_interval,
        upper_witness=up.witness_interval,
    )


def diff_bounds(F: CdfCurve, G: CdfCurve, delta: Any, tol: float = 1e-9) -> BoundReport:
    """Sharp bounds on P(X-Y <= delta) and P(X-Y < delta), with F the law of X and G of Y.

    Computed as the sum bounds of X and -Y, which carries the point-mass
    correction P(Y = y) automatically.
    """
    return sum_bounds(F, G.negate(), delta, tol=tol)


def sweep_grid(F: CdfCurve, G: CdfCurve, extra: Any = ()) -> list[Fraction]:
    """Evaluation points for a sweep: pairwise knot sums, extra points, and cell midpoints."""
    pts = {a + b for a in F.xs for b in G.xs}
    pts.update(to_fraction(e) for e in extra)
    pts = sorted(pts)
    mids = [(a + b) / 2 for a, b in zip(pts, pts[1:])]
    return sorted(set(pts).union(mids))
