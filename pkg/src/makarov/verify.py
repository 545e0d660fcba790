"""Cross-checks of the closed-form bounds against the LP oracle and against
each other, for the ``verify`` CLI command and the test-suite.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

from .bounds import (
    diff_bounds,
    rho_w,
    rho_w_left,
    scan_diff,
    sweep_grid,
    tau_w,
    tau_w_left,
    wd_diff_lower,
    wd_diff_upper,
)
from .dist import CdfCurve, SpecError, from_atoms
from .oracle import coupling_lp, solve_lp

LP_TOL = 1e-7


def random_discrete(rng: random.Random, n_atoms: int, lo: int = -5, hi: int = 5, denom: int = 1) -> CdfCurve:
    """Discrete law on ``n_atoms`` distinct points ``k/denom`` with random rational masses.

    Integer-spaced atoms make many pairwise sums coincide, which is where the
    ``<`` versus ``<=`` distinction bites.
    """
    xs = sorted(rng.sample(range(lo * denom, hi * denom + 1), n_atoms))
    weights = [rng.randint(1, 12) for _ in xs]
    total = sum(weights)
    return from_atoms([(Fraction(x, denom), Fraction(w, total)) for x, w in zip(xs, weights)])


@dataclass
class Identity:
    name: str
    checks: int = 0
    max_deviation: float = 0.0
    tolerance: float = 0.0
    failures: list[str] = field(default_factory=list)

    def record(self, got: Any, want: Any, context: str) -> None:
        if isinstance(got, float) or isinstance(want, float):
            dev = abs(float(got) - float(want))
        else:
            dev = float(abs(got - want))
        self.checks += 1
        self.max_deviation = max(self.max_deviation, dev)
        if dev > self.tolerance and len(self.failures) < 5:
            self.failures.append(f"{context}: got {float(got)!r}, expected {float(want)!r}")

    def holds(self, ok: bool, context: str) -> None:
        self.checks += 1
        if not ok and len(self.failures) < 5:
            self.failures.append(context)

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict[str, Any]:
        return {
            "identity": self.name,
            "checks": self.checks,
            "max_deviation": self.max_deviation,
            "pass": self.passed,
            "failures": self.failures,
        }


def _left_probe(points: list[Fraction]) -> Fraction:
    """A step smaller than any gap between consecutive grid points."""
    gaps = [b - a for a, b in zip(points, points[1:])]
    return min(gaps, default=Fraction(1)) / 4


class Verifier:
    def __init__(self) -> None:
        self.lp = Identity("closed form equals coupling LP optimum", tolerance=LP_TOL)
        self.chains = Identity("ordering chains of left and right bounds")
        self.left_limits = Identity("left-limit bounds equal limits from below")
        self.inf_equiv = Identity("left-limit candidates leave the infimum unchanged")
        self.coincide = Identity("difference upper bound ignores the point-mass term")
        self.ite_gap = Identity("sharp difference lower bound dominates the historical one")

    @property
    def identities(self) -> list[Identity]:
        return [self.lp, self.chains, self.left_limits, self.inf_equiv, self.coincide, self.ite_gap]

    def check_pair(
        self, F: CdfCurve, G: CdfCurve, zs: Iterable[Fraction], deltas: Iterable[Fraction], label: str
    ) -> None:
        if not (F.is_discrete and G.is_discrete):
            raise SpecError(f"{label}: the LP oracle needs discrete specs")
        zs = sorted(set(zs))
        eta = _left_probe(sweep_grid(F, G, zs))
        for z in zs:
            ctx = f"{label} z={z}"
            tl, t, rl, r = tau_w_left(F, G, z), tau_w(F, G, z), rho_w_left(F, G, z), rho_w(F, G, z)
            for rel, sense, bound in (("<=", "minimize", t), ("<=", "maximize", r),
                                      ("<", "minimize", tl), ("<", "maximize", rl)):
                sol = solve_lp(coupling_lp(F, G, z, rel, sense))
                self.lp.record(sol.value, bound, f"{ctx} {sense} P(X+Y{rel}z)")
            self.chains.holds(tl <= t <= r and tl <= rl <= r, f"{ctx}: chain violated")
            self.left_limits.record(tau_w(F, G, z - eta), tl, f"{ctx} lower")
            self.left_limits.record(rho_w(F, G, z - eta), rl, f"{ctx} upper")
            closed, mixed = _brute_infima(F, G, z)
            self.inf_equiv.record(mixed, closed, ctx)
            self.inf_equiv.record(r, closed, f"{ctx} scan vs brute force")
        for d in sorted(set(deltas)):
            ctx = f"{label} delta={d}"
            rep = diff_bounds(F, G, d)
            self.coincide.record(wd_diff_upper(F, G, d), rep.upper_leq, ctx)
            s = scan_diff(F, G, d)
            self.coincide.record(min(s.inf_sharp, 0), min(s.inf_hist, 0), f"{ctx} scan")
            self.ite_gap.holds(rep.lower_leq >= wd_diff_lower(F, G, d), f"{ctx}: sharp below historical")

    def report(self, **extra: Any) -> dict[str, Any]:
        out = dict(extra)
        out["identities"] = [i.as_dict() for i in self.identities]
        out["pass"] = all(i.passed for i in self.identities)
        return out


def _brute_infima(F: CdfCurve, G: CdfCurve, z: Fraction) -> tuple[Fraction, Fraction]:
    """inf of F(x)+G(z-x) and of F(x-)+G(z-x), by direct evaluation on a dense grid.

    For discrete marginals both objectives are step functions, so the grid of
    breakpoints plus midpoints and two outer points visits every step.
    """
    pts = sorted(set(F.xs).union(z - y for y in G.xs))
    grid = set(pts)
    grid.update((a + b) / 2 for a, b in zip(pts, pts[1:]))
    grid.update((pts[0] - 1, pts[-1] + 1))
    closed = min(F(x) + G(z - x) for x in grid)
    mixed = min(F.left(x) + G(z - x) for x in grid)
    return min(closed, Fraction(1)), min(mixed, Fraction(1))


def random_z(rng: random.Random, F: CdfCurve, G: CdfCurve, count: int) -> list[Fraction]:
    """Evaluation points: mostly exact atom sums (where ties matter), some in between."""
    sums = sorted({a + b for a in F.xs for b in G.xs})
    lo, hi = math.floor(sums[0]) - 1, math.ceil(sums[-1]) + 1
    out = []
    for _ in range(count):
        if rng.random() < 0.6:
            out.append(rng.choice(sums))
        else:
            out.append(Fraction(rng.randint(2 * lo, 2 * hi), 2))
    return out


def verify_random(seed: int = 1, instances: int = 50, n_atoms: int = 4, z_per_instance: int = 3) -> dict[str, Any]:
    rng = random.Random(seed)
    v = Verifier()
    for k in range(instances):
        F = random_discrete(rng, n_atoms)
        G = random_discrete(rng, n_atoms)
        zs = random_z(rng, F, G, z_per_instance)
        deltas = random_z(rng, F, G.negate(), z_per_instance)
        v.check_pair(F, G, zs, deltas, f"instance {k}")
    return v.report(mode="random", seed=seed, instances=instances, atoms_per_marginal=n_atoms)


def verify_pair(F: CdfCurve, G: CdfCurve, extra: Iterable[Any] = ()) -> dict[str, Any]:
    """Run every identity on a supplied pair over its full sweep grid, plus a difference gap table."""
    v = Verifier()
    grid = sweep_grid(F, G, extra)
    diff_grid = sweep_grid(F, G.negate(), extra)
    v.check_pair(F, G, grid, diff_grid, "supplied")
    gaps = []
    for d in diff_grid:
        rep = diff_bounds(F, G, d)
        hist = wd_diff_lower(F, G, d)
        gaps.append({
            "delta": float(d),
            "sharp_lower": float(rep.lower_leq),
            "sharp_upper": float(rep.upper_leq),
            "historical_lower": float(hist),
            "gap": float(rep.lower_leq - hist),
        })
    return v.report(mode="supplied", points=len(grid), difference_gaps=gaps)
