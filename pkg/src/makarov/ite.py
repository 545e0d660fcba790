"""Bounds on the CDF of an individual treatment effect Y1 - Y0 from the two arm marginals.

The arms are taken as given; mapping observed arms to potential-outcome
marginals (randomisation, ignorability) is the caller's assumption.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, NamedTuple

from .bounds import BoundReport, diff_bounds, diff_scan_table, wd_diff_lower, wd_diff_upper
from .dist import CdfCurve, to_fraction


@dataclass(frozen=True)
class ArmPair:
    """Outcome CDFs of the treated arm (``f1``) and the control arm (``f0``)."""

    f1: CdfCurve
    f0: CdfCurve

    def __post_init__(self) -> None:
        for name in ("f1", "f0"):
            if not isinstance(getattr(self, name), CdfCurve):
                raise TypeError(f"{name} must be a CdfCurve")


class IteRow(NamedTuple):
    delta: Fraction
    sharp_lower: Fraction
    sharp_upper: Fraction
    historical_lower: Fraction

    @property
    def gap(self) -> Fraction:
        return self.sharp_lower - self.historical_lower


def ite_bounds(arms: ArmPair, delta: Any, tol: float = 1e-9) -> BoundReport:
    """Sharp bounds on P(Y1 - Y0 <= delta) and P(Y1 - Y0 < delta)."""
    return diff_bounds(arms.f1, arms.f0, delta, tol=tol)


def ite_bounds_historical(arms: ArmPair, delta: Any) -> Fraction:
    """Lower bound without the control-arm point-mass term; never above the sharp one."""
    return wd_diff_lower(arms.f1, arms.f0, delta)


def ite_upper_historical(arms: ArmPair, delta: Any) -> Fraction:
    return wd_diff_upper(arms.f1, arms.f0, delta)


def ite_row(arms: ArmPair, delta: Any, tol: float = 1e-9) -> IteRow:
    delta = to_fraction(delta)
    rep = ite_bounds(arms, delta, tol=tol)
    return IteRow(delta, rep.lower_leq, rep.upper_leq, ite_bounds_historical(arms, delta))


def frechet_cell_bounds(p: Any, q: Any) -> tuple[Fraction, Fraction]:
    """Range of P(A and B) given P(A) = p and P(B) = q."""
    p, q = to_fraction(p), to_fraction(q)
    for v in (p, q):
        if not 0 <= v <= 1:
            raise ValueError(f"probabilities must lie in [0, 1], got {v}")
    return max(p + q - 1, Fraction(0)), min(p, q)


def ite_scan(arms: ArmPair, delta: Any) -> list[tuple[str, Fraction, Fraction]]:
    """Piecewise values of ``y -> F1(y) - P(Y0 < y - delta)`` for line-by-line inspection."""
    return diff_scan_table(arms.f1, arms.f0, delta)
