"""Random curve generators and brute-force reference computations for the tests.

The reference functions evaluate the marginals directly on dense point sets;
they share no code with the breakpoint scan in ``makarov.bounds``.
"""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

from makarov.dist import CdfCurve, Knot, from_atoms

DATA = Path(__file__).parent / "data"

ETA = Fraction(1, 10**9)


def random_curve(rng: random.Random, style: str | None = None, max_knots: int = 6) -> CdfCurve:
    """Random CDF on integer or half-integer knots.

    ``style`` is ``discrete``, ``continuous`` or ``mixed`` (random if None).
    Levels are multiples of 1/denominator, so repeated levels and flat
    stretches occur often.
    """
    style = style or rng.choice(["discrete", "continuous", "mixed"])
    n = rng.randint(2, max_knots)
    step = rng.choice([Fraction(1), Fraction(1, 2)])
    xs = sorted(rng.sample(range(-6, 7), n))
    xs = [x * step for x in xs]
    denom = rng.choice([4, 5, 10, 12])
    if style == "discrete":
        masses = [rng.randint(1, denom) for _ in xs]
        total = sum(masses)
        return from_atoms([(x, Fraction(m, total)) for x, m in zip(xs, masses)])
    levels = sorted(Fraction(rng.randint(0, denom), denom) for _ in range(2 * n - 2))
    levels = [Fraction(0)] + levels + [Fraction(1)]
    knots = []
    for i, x in enumerate(xs):
        left, right = levels[2 * i], levels[2 * i + 1]
        if style == "continuous":
            right = left
        knots.append((x, left, right))
    if style == "continuous":
        # the last knot must reach 1 without a jump
        knots[-1] = (knots[-1][0], Fraction(1), Fraction(1))
        fixed = []
        for i, (x, l, r) in enumerate(knots):
            lo = fixed[-1][2] if fixed else Fraction(0)
            fixed.append((x, max(l, lo), max(r, lo)))
        knots = fixed
    return CdfCurve(tuple(Knot(*k) for k in knots))


def reflected(F: CdfCurve, c) -> CdfCurve:
    """Law of c - X for X ~ F."""
    return F.negate().shift(c)


def random_pair(rng: random.Random, max_knots: int = 6) -> tuple[CdfCurve, CdfCurve]:
    """Independent random curves, or (with probability 1/3) an antithetic pair G = law of c - X."""
    F = random_curve(rng, max_knots=max_knots)
    if rng.random() < 1 / 3:
        return F, reflected(F, rng.randint(-2, 2))
    return F, random_curve(rng, max_knots=max_knots)


def random_points(rng: random.Random, F: CdfCurve, G: CdfCurve, count: int) -> list[Fraction]:
    sums = sorted({a + b for a in F.xs for b in G.xs})
    out = []
    for _ in range(count):
        r = rng.random()
        if r < 0.5:
            out.append(rng.choice(sums))
        elif r < 0.8:
            i = rng.randrange(len(sums) - 1) if len(sums) > 1 else 0
            out.append((sums[i] + sums[min(i + 1, len(sums) - 1)]) / 2)
        else:
            out.append(Fraction(rng.randint(4 * int(sums[0]) - 8, 4 * int(sums[-1]) + 8), 4))
    return out


def _dense_xs(F: CdfCurve, G: CdfCurve, z: Fraction, eta: Fraction) -> list[Fraction]:
    pts = sorted(set(F.xs) | {z - y for y in G.xs})
    grid = set(pts)
    for p in pts:
        grid.update((p - eta, p + eta))
    for a, b in zip(pts, pts[1:]):
        grid.update(a + (b - a) * Fraction(k, 8) for k in range(1, 8))
    grid.update((pts[0] - 1, pts[-1] + 1))
    return sorted(grid)


def brute_sum(F: CdfCurve, G: CdfCurve, z, eta: Fraction = ETA) -> dict[str, Fraction]:
    """Approximate sup/inf of x -> F(x)+G(z-x) and of the left-limit version by direct evaluation.

    Exact up to O(eta * slope) because every one-sided limit at a breakpoint
    is sampled at distance eta.
    """
    z = Fraction(z)
    xs = _dense_xs(F, G, z, eta)
    closed = [F(x) + G(z - x) for x in xs]
    opened = [F.left(x) + G.left(z - x) for x in xs]
    mixed = [F.left(x) + G(z - x) for x in xs]
    return {
        "tau": min(max(max(closed) - 1, Fraction(0)), Fraction(1)),
        "tau_left": min(max(max(opened) - 1, Fraction(0)), Fraction(1)),
        "rho": min(max(min(closed), Fraction(0)), Fraction(1)),
        "rho_left": min(max(min(opened), Fraction(0)), Fraction(1)),
        "inf_closed": min(closed),
        "inf_mixed": min(mixed),
    }


def brute_diff(F: CdfCurve, G: CdfCurve, delta, eta: Fraction = ETA) -> dict[str, Fraction]:
    """Sharp and historical difference objectives evaluated along x - y = delta."""
    delta = Fraction(delta)
    pts = sorted(set(F.xs) | {delta + y for y in G.xs})
    grid = set(pts)
    for p in pts:
        grid.update((p - eta, p + eta))
    for a, b in zip(pts, pts[1:]):
        grid.update(a + (b - a) * Fraction(k, 8) for k in range(1, 8))
    grid.update((pts[0] - 1, pts[-1] + 1))
    sharp = [F(x) - G.left(x - delta) for x in grid]
    hist = [F(x) - G(x - delta) for x in grid]
    clamp = lambda v: min(max(v, Fraction(0)), Fraction(1))  # noqa: E731
    return {
        "lower": clamp(max(sharp)),
        "upper": clamp(1 + min(sharp)),
        "hist_lower": clamp(max(hist)),
        "hist_upper": clamp(1 + min(hist)),
    }
