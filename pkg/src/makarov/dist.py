"""Univariate distribution functions with jumps, held in exact rational arithmetic.

A :class:`CdfCurve` is a right-continuous CDF made of knots ``(x, left, right)``
where ``left = F(x-)`` and ``right = F(x)``.  Between consecutive knots the curve
interpolates linearly from ``knots[i].right`` to ``knots[i+1].left``; below the
first knot it is 0 and above the last knot it is 1.  This covers discrete laws,
continuous piecewise-linear laws and mixtures without approximation.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from numbers import Rational
from typing import Any, Iterable, Mapping, NamedTuple

import numpy as np

PROB_TOL = 1e-9


class SpecError(ValueError):
    """Invalid distribution input; the message names the offending field."""


def to_fraction(value: Any) -> Fraction:
    """Convert a user-facing number to an exact rational.

    Floats are read through their shortest decimal repr, so ``0.3`` becomes
    ``3/10`` rather than the nearest binary double.
    """
    if type(value) is Fraction:
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, (str, Decimal)):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a number")


class Knot(NamedTuple):
    x: Fraction
    left: Fraction
    right: Fraction

    @property
    def mass(self) -> Fraction:
        return self.right - self.left


@dataclass(frozen=True)
class CdfCurve:
    """Exact piecewise-linear CDF with jump discontinuities.

    Instances are immutable and validated on construction.  Leading knots
    that sit on a flat zero stretch and trailing knots on a flat one stretch
    are dropped so that equal laws compare equal.
    """

    knots: tuple[Knot, ...]
    xs: tuple[Fraction, ...] = field(init=False, repr=False, compare=False)
    lefts: tuple[Fraction, ...] = field(init=False, repr=False, compare=False)
    rights: tuple[Fraction, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        knots = [
            Knot(to_fraction(k[0]), to_fraction(k[1]), to_fraction(k[2]))
            for k in self.knots
        ]
        if not knots:
            raise SpecError("knots: at least one knot is required")
        for i, k in enumerate(knots):
            if not 0 <= k.left <= k.right <= 1:
                raise SpecError(
                    f"knots[{i}]: need 0 <= left <= right <= 1, got "
                    f"left={k.left}, right={k.right}"
                )
            if i and k.x <= knots[i - 1].x:
                raise SpecError(f"knots[{i}].x: abscissae must be strictly increasing")
            if i and k.left < knots[i - 1].right:
                raise SpecError(f"knots[{i}].left: curve decreases after knots[{i - 1}]")
        if knots[0].left != 0:
            raise SpecError("knots[0].left: first left limit must be 0")
        if knots[-1].right != 1:
            raise SpecError(f"knots[{len(knots) - 1}].right: last value must be 1")

        while len(knots) > 1 and knots[1].left == 0:
            knots.pop(0)
        while len(knots) > 1 and knots[-2].right == 1:
            knots.pop()

        object.__setattr__(self, "knots", tuple(knots))
        object.__setattr__(self, "xs", tuple(k.x for k in knots))
        object.__setattr__(self, "lefts", tuple(k.left for k in knots))
        object.__setattr__(self, "rights", tuple(k.right for k in knots))

    # -- evaluation -------------------------------------------------------

    def __call__(self, x: Any) -> Fraction:
        """F(x) = P(X <= x)."""
        x = to_fraction(x)
        xs = self.xs
        i = bisect_right(xs, x)
        if i == 0:
            return Fraction(0)
        if xs[i - 1] == x:
            return self.rights[i - 1]
        if i == len(xs):
            return Fraction(1)
        return self._interp(i - 1, x)

    def left(self, x: Any) -> Fraction:
        """F(x-) = P(X < x)."""
        x = to_fraction(x)
        xs = self.xs
        i = bisect_left(xs, x)
        if i < len(xs) and xs[i] == x:
            return self.lefts[i]
        if i == 0:
            return Fraction(0)
        if i == len(xs):
            return Fraction(1)
        return self._interp(i - 1, x)

    def _interp(self, i: int, x: Fraction) -> Fraction:
        x0, x1 = self.xs[i], self.xs[i + 1]
        r0, l1 = self.rights[i], self.lefts[i + 1]
        if r0 == l1:
            return r0
        return r0 + (l1 - r0) * (x - x0) / (x1 - x0)

    def jump(self, x: Any) -> Fraction:
        """P(X = x)."""
        return self(x) - self.left(x)

    def quantile(self, u: Any) -> Fraction | float:
        """Generalized inverse inf{x : F(x) >= u}; ``-inf`` at ``u = 0``."""
        u = to_fraction(u)
        if not 0 <= u <= 1:
            raise ValueError(f"quantile level must lie in [0, 1], got {u}")
        if u == 0:
            return -math.inf
        i = bisect_left(self.rights, u)
        if i == 0 or self.lefts[i] < u:
            return self.xs[i]
        x0, x1 = self.xs[i - 1], self.xs[i]
        r0, l1 = self.rights[i - 1], self.lefts[i]
        return x0 + (u - r0) * (x1 - x0) / (l1 - r0)

    def quantile_pieces(self) -> list[tuple[Fraction, Fraction, Fraction, Fraction]]:
        """Pieces ``(lo, hi, a, b)`` with ``quantile(u) = a + b*u`` on ``(lo, hi]``.

        The pieces partition ``(0, 1]`` in increasing order.
        """
        pieces = []
        for i, k in enumerate(self.knots):
            if i:
                r0, l1 = self.rights[i - 1], k.left
                if l1 > r0:
                    x0 = self.xs[i - 1]
                    slope = (k.x - x0) / (l1 - r0)
                    pieces.append((r0, l1, x0 - slope * r0, slope))
            if k.right > k.left:
                pieces.append((k.left, k.right, k.x, Fraction(0)))
        return pieces

    # -- float views used by the sampler ------------------------------------

    def _float_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        cache = self.__dict__.get("_floats")
        if cache is None:
            cache = (
                np.array([float(v) for v in self.xs]),
                np.array([float(v) for v in self.lefts]),
                np.array([float(v) for v in self.rights]),
            )
            object.__setattr__(self, "_floats", cache)
        return cache

    def quantile_array(self, u: np.ndarray) -> np.ndarray:
        """Vectorised float quantile for ``u`` in ``(0, 1]``; ``u <= 0`` maps to ``-inf``."""
        xs, lefts, rights = self._float_arrays()
        u = np.asarray(u, dtype=float)
        i = np.minimum(np.searchsorted(rights, u, side="left"), len(xs) - 1)
        prev = np.maximum(i - 1, 0)
        on_knot = (i == 0) | (lefts[i] < u)
        denom = np.where(on_knot, 1.0, lefts[i] - rights[prev])
        frac = np.where(on_knot, 0.0, (u - rights[prev]) / denom)
        out = np.where(on_knot, xs[i], xs[prev] + frac * (xs[i] - xs[prev]))
        return np.where(u <= 0, -np.inf, out)

    def cdf_array(self, x: np.ndarray, left: bool = False) -> np.ndarray:
        """Vectorised float evaluation of F(x), or F(x-) when ``left``."""
        xs, lefts, rights = self._float_arrays()
        x = np.asarray(x, dtype=float)
        side = "left" if left else "right"
        i = np.searchsorted(xs, x, side=side)
        n = len(xs)
        lo = np.clip(i - 1, 0, n - 1)
        hi = np.clip(i, 0, n - 1)
        span = np.where(xs[hi] > xs[lo], xs[hi] - xs[lo], 1.0)
        out = rights[lo] + (lefts[hi] - rights[lo]) * (x - xs[lo]) / span
        if left:
            at = (i < n) & (xs[hi] == x)
            out = np.where(at, lefts[hi], out)
        out = np.where(i == 0, 0.0, out)
        return np.where(i >= n, 1.0, out)

    # -- transformations ----------------------------------------------------

    def negate(self) -> "CdfCurve":
        """CDF of -X: G'(y) = 1 - F((-y)-)."""
        return CdfCurve(
            tuple(Knot(-k.x, 1 - k.right, 1 - k.left) for k in reversed(self.knots))
        )

    def shift(self, c: Any) -> "CdfCurve":
        """CDF of X + c."""
        c = to_fraction(c)
        return CdfCurve(tuple(Knot(k.x + c, k.left, k.right) for k in self.knots))

    @property
    def is_discrete(self) -> bool:
        return all(
            self.rights[i] == self.lefts[i + 1] for i in range(len(self.knots) - 1)
        )

    def atoms(self) -> list[tuple[Fraction, Fraction]]:
        """Atoms ``(x, p)`` of a purely discrete curve."""
        if not self.is_discrete:
            raise SpecError("curve has continuous segments; atoms are undefined")
        return [(k.x, k.mass) for k in self.knots if k.mass > 0]

    def __str__(self) -> str:
        body = ", ".join(f"({k.x}, {k.left}, {k.right})" for k in self.knots)
        return f"CdfCurve[{body}]"


def from_atoms(
    atoms: Mapping[Any, Any] | Iterable[tuple[Any, Any]], tol: float = PROB_TOL
) -> CdfCurve:
    """Step CDF of a finite discrete law.

    ``atoms`` is a mapping or an iterable of ``(x, p)`` pairs.  Masses must be
    positive and sum to one within ``tol``; a residual inside the tolerance is
    absorbed by the last atom so the curve ends exactly at 1.
    """
    pairs = list(atoms.items()) if isinstance(atoms, Mapping) else list(atoms)
    if not pairs:
        raise SpecError("atoms: at least one atom is required")
    parsed = []
    for i, pair in enumerate(pairs):
        x, p = pair
        x, p = to_fraction(x), to_fraction(p)
        if p <= 0:
            raise SpecError(f"atoms[{i}].p: mass must be positive, got {p}")
        parsed.append((x, p))
    parsed.sort(key=lambda a: a[0])
    for i in range(1, len(parsed)):
        if parsed[i][0] == parsed[i - 1][0]:
            raise SpecError(f"atoms: duplicate location x={parsed[i][0]}")
    total = sum(p for _, p in parsed)
    if abs(total - 1) > tol:
        raise SpecError(f"atoms: masses sum to {float(total)!r}, expected 1")
    knots = []
    cum = Fraction(0)
    for x, p in parsed:
        knots.append(Knot(x, cum, cum + p))
        cum += p
    knots[-1] = knots[-1]._replace(right=Fraction(1))
    return CdfCurve(tuple(knots))


def point_mass(a: Any) -> CdfCurve:
    return from_atoms([(a, 1)])


def uniform(a: Any = 0, b: Any = 1) -> CdfCurve:
    a, b = to_fraction(a), to_fraction(b)
    if not a < b:
        raise SpecError("uniform: need a < b")
    return CdfCurve((Knot(a, Fraction(0), Fraction(0)), Knot(b, Fraction(1), Fraction(1))))


def _triangular_cdf(a: Fraction, b: Fraction, c: Fraction):
    def cdf(x: Fraction) -> Fraction:
        if x <= a:
            return Fraction(0)
        if x >= b:
            return Fraction(1)
        if x <= c:
            return (x - a) ** 2 / ((b - a) * (c - a))
        return 1 - (b - x) ** 2 / ((b - a) * (b - c))

    return cdf


def _beta_cdf(alpha: int, beta: int):
    # Regularised incomplete beta for integer shapes is a binomial tail.
    n = alpha + beta - 1

    def cdf(x: Fraction) -> Fraction:
        if x <= 0:
            return Fraction(0)
        if x >= 1:
            return Fraction(1)
        return sum(
            (math.comb(n, j) * x**j * (1 - x) ** (n - j) for j in range(alpha, n + 1)),
            Fraction(0),
        )

    return cdf


def discretize_family(family: str, n_knots: int = 101, **params: Any) -> CdfCurve:
    """Continuous piecewise-linear curve that matches a smooth family at its knots.

    Supported families: ``uniform(a, b)``, ``triangular(a, b, c)`` with mode
    ``c`` and support ``[a, b]``, and ``beta(alpha, beta)`` for integer shapes.
    Knots are equally spaced over the support (the triangular mode is added
    when it falls between grid points).
    """
    if n_knots < 2:
        raise SpecError(f"n_knots: need at least 2, got {n_knots}")
    if family == "uniform":
        a, b = to_fraction(params.get("a", 0)), to_fraction(params.get("b", 1))
        if not a < b:
            raise SpecError("uniform: need a < b")
        cdf = lambda x: min(max((x - a) / (b - a), Fraction(0)), Fraction(1))  # noqa: E731
        extra: list[Fraction] = []
    elif family == "triangular":
        try:
            a, b, c = (to_fraction(params[k]) for k in ("a", "b", "c"))
        except KeyError as exc:
            raise SpecError(f"triangular: missing parameter {exc.args[0]!r}") from None
        if not (a <= c <= b and a < b):
            raise SpecError("triangular: need a <= c <= b and a < b")
        cdf = _triangular_cdf(a, b, c)
        extra = [c]
    elif family == "beta":
        alpha, beta = params.get("alpha"), params.get("beta")
        if not (isinstance(alpha, int) and isinstance(beta, int) and alpha > 0 and beta > 0):
            raise SpecError("beta: alpha and beta must be positive integers")
        a, b = Fraction(0), Fraction(1)
        cdf = _beta_cdf(alpha, beta)
        extra = []
    else:
        raise SpecError(f"type: unsupported family {family!r}")

    grid = sorted({a + (b - a) * Fraction(i, n_knots - 1) for i in range(n_knots)} | set(extra))
    knots = tuple(Knot(x, cdf(x), cdf(x)) for x in grid)
    return CdfCurve(knots)


# -- DistributionSpec JSON ---------------------------------------------------


def _field(obj: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in obj:
        raise SpecError(f"{where}.{key}: missing")
    return obj[key]


def _num(value: Any, where: str) -> Fraction:
    try:
        return to_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise SpecError(f"{where}: not a number: {value!r}") from None


def parse_spec(obj: Mapping[str, Any]) -> CdfCurve:
    """Build a curve from a DistributionSpec object (already JSON-decoded)."""
    if not isinstance(obj, Mapping):
        raise SpecError("spec: expected a JSON object")
    kind = _field(obj, "type", "spec")
    if kind == "discrete":
        atoms = _field(obj, "atoms", "spec")
        if not isinstance(atoms, list):
            raise SpecError("spec.atoms: expected a list")
        pairs = []
        for i, a in enumerate(atoms):
            where = f"atoms[{i}]"
            pairs.append((_num(_field(a, "x", where), f"{where}.x"),
                          _num(_field(a, "p", where), f"{where}.p")))
        return from_atoms(pairs)
    if kind == "piecewise_linear":
        knots = _field(obj, "knots", "spec")
        if not isinstance(knots, list):
            raise SpecError("spec.knots: expected a list")
        parsed = []
        for i, k in enumerate(knots):
            where = f"knots[{i}]"
            parsed.append(Knot(*(_num(_field(k, f, where), f"{where}.{f}")
                                 for f in ("x", "left", "right"))))
        curve_knots = list(parsed)
        if curve_knots:
            for end, idx, attr, target in (("first", 0, "left", 0), ("last", -1, "right", 1)):
                val = getattr(curve_knots[idx], attr)
                if val != target and abs(val - target) <= PROB_TOL:
                    curve_knots[idx] = curve_knots[idx]._replace(**{attr: Fraction(target)})
        return CdfCurve(tuple(curve_knots))
    if kind == "uniform":
        return uniform(_num(_field(obj, "a", "spec"), "spec.a"),
                       _num(_field(obj, "b", "spec"), "spec.b"))
    if kind in ("triangular", "beta"):
        params = {k: v for k, v in obj.items() if k not in ("type", "n_knots")}
        n = obj.get("n_knots", 101)
        if not isinstance(n, int):
            raise SpecError("spec.n_knots: expected an integer")
        return discretize_family(kind, n, **params)
    raise SpecError(f"spec.type: unsupported type {kind!r}")


def load_spec(path: str) -> CdfCurve:
    with open(path) as fh:
        try:
            obj = json.load(fh, parse_float=Fraction)
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path}: invalid JSON ({exc.msg})") from None
    return parse_spec(obj)


def _json_number(v: Fraction) -> int | float | str:
    if v.denominator == 1:
        return int(v)
    f = float(v)
    if Fraction(repr(f)) == v:
        return f
    return f"{v.numerator}/{v.denominator}"


def spec_of(curve: CdfCurve) -> dict[str, Any]:
    """DistributionSpec object describing ``curve`` exactly.

    Values without a short decimal form are written as ``"p/q"`` strings,
    which :func:`parse_spec` accepts.
    """
    if curve.is_discrete:
        return {
            "type": "discrete",
            "atoms": [{"x": _json_number(x), "p": _json_number(p)} for x, p in curve.atoms()],
        }
    return {
        "type": "piecewise_linear",
        "knots": [
            {"x": _json_number(k.x), "left": _json_number(k.left), "right": _json_number(k.right)}
            for k in curve.knots
        ],
    }


def dump_spec(curve: CdfCurve, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(spec_of(curve), fh, indent=2)
        fh.write("\n")
