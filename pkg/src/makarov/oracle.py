"""Coupling LP oracle: min / max of P(X + Y in A) over all joint laws of two
discrete marginals, solved on the transportation polytope.

``solve_lp`` is a dense two-phase tableau simplex with Bland's rule.
``enumerate_tiny`` is an independent brute-force check for instances up to
3 x 3: it visits every spanning-tree basis of the transportation graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Iterable, Literal, Sequence

import numpy as np

from .dist import CdfCurve, to_fraction

Sense = Literal["minimize", "maximize"]

FEAS_TOL = 1e-9
MAX_CELLS = 10_000


class InfeasibleMarginals(ValueError):
    pass


@dataclass(frozen=True)
class CouplingLP:
    xs: tuple[Fraction, ...]
    px: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]
    py: tuple[Fraction, ...]
    objective_cells: frozenset[tuple[int, int]]
    sense: Sense = "minimize"

    def __post_init__(self) -> None:
        for name in ("xs", "px", "ys", "py"):
            object.__setattr__(self, name, tuple(to_fraction(v) for v in getattr(self, name)))
        object.__setattr__(self, "objective_cells", frozenset(self.objective_cells))
        n, m = len(self.xs), len(self.ys)
        if n < 1 or m < 1:
            raise ValueError("both marginals need at least one atom")
        if len(self.px) != n or len(self.py) != m:
            raise ValueError("atom and mass lists differ in length")
        if any(p <= 0 for p in self.px + self.py):
            raise ValueError("all masses must be positive")
        if self.sense not in ("minimize", "maximize"):
            raise ValueError(f"sense must be 'minimize' or 'maximize', got {self.sense!r}")
        sx, sy = sum(self.px), sum(self.py)
        if abs(sx - sy) > FEAS_TOL:
            raise InfeasibleMarginals(f"marginal totals differ: {float(sx)!r} vs {float(sy)!r}")
        if abs(sx - 1) > FEAS_TOL:
            raise InfeasibleMarginals(f"marginal masses sum to {float(sx)!r}, expected 1")
        for i, j in self.objective_cells:
            if not (0 <= i < n and 0 <= j < m):
                raise ValueError(f"objective cell {(i, j)} out of range")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.xs), len(self.ys)


@dataclass(frozen=True)
class CouplingSolution:
    value: Any
    coupling: np.ndarray = field(repr=False)


def coupling_lp(
    F: CdfCurve | Sequence[tuple[Any, Any]],
    G: CdfCurve | Sequence[tuple[Any, Any]],
    z: Any,
    relation: str = "<=",
    sense: Sense = "minimize",
) -> CouplingLP:
    """LP for the extreme of P(X + Y <= z) (or < z) over couplings of two discrete laws.

    Cells are selected by exact rational comparison of ``x_i + y_j`` with ``z``.
    """
    fa = F.atoms() if isinstance(F, CdfCurve) else [(to_fraction(x), to_fraction(p)) for x, p in F]
    ga = G.atoms() if isinstance(G, CdfCurve) else [(to_fraction(y), to_fraction(p)) for y, p in G]
    z = to_fraction(z)
    if relation == "<=":
        cells = {(i, j) for i, (x, _) in enumerate(fa) for j, (y, _) in enumerate(ga) if x + y <= z}
    elif relation == "<":
        cells = {(i, j) for i, (x, _) in enumerate(fa) for j, (y, _) in enumerate(ga) if x + y < z}
    else:
        raise ValueError(f"relation must be '<=' or '<', got {relation!r}")
    return CouplingLP(
        xs=tuple(x for x, _ in fa), px=tuple(p for _, p in fa),
        ys=tuple(y for y, _ in ga), py=tuple(p for _, p in ga),
        objective_cells=frozenset(cells), sense=sense,
    )


# -- dense tableau simplex ----------------------------------------------------


class _Tableau:
    """Equality-form tableau: rows are constraints, last column is the rhs, row -1 the costs."""

    def __init__(self, T: np.ndarray, basis: list[int], tol: float):
        self.T = T
        self.basis = basis
        self.tol = tol

    def pivot(self, r: int, e: int) -> None:
        T = self.T
        T[r] = T[r] / T[r, e]
        col = T[:, e].copy()
        col[r] = 0
        T -= np.outer(col, T[r])
        self.basis[r] = e

    def run(self, allowed: Sequence[int]) -> None:
        T, tol = self.T, self.tol
        while True:
            costs = T[-1]
            # Bland: smallest-index improving column, smallest-index basic variable on ratio ties.
            e = next((j for j in allowed if costs[j] < -tol), None)
            if e is None:
                return
            best = None
            for i in range(T.shape[0] - 1):
                a = T[i, e]
                if a > tol:
                    ratio = T[i, -1] / a
                    if best is None or ratio < best[0] - tol or (
                        abs(ratio - best[0]) <= tol and self.basis[i] < self.basis[best[1]]
                    ):
                        best = (ratio, i)
            if best is None:
                raise RuntimeError("LP unbounded; impossible for a transportation polytope")
            self.pivot(best[1], e)


def _simplex(A: np.ndarray, b: np.ndarray, c: np.ndarray, exact: bool) -> tuple[np.ndarray, Any]:
    """Minimise ``c @ x`` subject to ``A x = b``, ``x >= 0`` with ``b >= 0``."""
    m, n = A.shape
    tol = 0 if exact else FEAS_TOL
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)
    dtype = object if exact else float

    T = np.full((m + 1, n + m + 1), zero, dtype=dtype)
    T[:m, :n] = A
    for i in range(m):
        T[i, n + i] = one
    T[:m, -1] = b
    # phase I: minimise the sum of artificials
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    tab = _Tableau(T, [n + i for i in range(m)], tol)
    tab.run(range(n))
    if -T[-1, -1] > tol * max(1, m):
        raise InfeasibleMarginals("phase I could not reach a feasible coupling")

    # Drive zero-level artificials out of the basis; drop redundant rows.
    keep = []
    for i in range(m):
        if tab.basis[i] >= n:
            j = next((j for j in range(n) if abs(T[i, j]) > tol), None)
            if j is None:
                continue
            tab.pivot(i, j)
        keep.append(i)
    T = np.vstack([T[keep][:, list(range(n)) + [-1]], np.full((1, n + 1), zero, dtype=dtype)])
    basis = [tab.basis[i] for i in keep]

    # phase II
    T[-1, :n] = c
    for i, j in enumerate(basis):
        T[-1] = T[-1] - c[j] * T[i]
    tab = _Tableau(T, basis, tol)
    tab.run(range(n))
    x = np.full(n, zero, dtype=dtype)
    for i, j in enumerate(tab.basis):
        x[j] = T[i, -1]
    return x, -T[-1, -1]


def solve_lp(lp: CouplingLP, exact: bool = False) -> CouplingSolution:
    """Optimal vertex coupling of ``lp``.

    Arithmetic is float64 with a 1e-9 feasibility tolerance; ``exact=True``
    runs the same pivots on Fractions.
    """
    n, m = lp.shape
    if n * m > MAX_CELLS:
        raise ValueError(f"instance has {n * m} cells, limit is {MAX_CELLS}")
    conv = (lambda v: v) if exact else float
    dtype = object if exact else float
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)

    A = np.full((n + m, n * m), zero, dtype=dtype)
    for i in range(n):
        for j in range(m):
            A[i, i * m + j] = one
            A[n + j, i * m + j] = one
    b = np.array([conv(p) for p in lp.px + lp.py], dtype=dtype)
    sign = one if lp.sense == "minimize" else -one
    c = np.full(n * m, zero, dtype=dtype)
    for i, j in lp.objective_cells:
        c[i * m + j] = sign

    x, _ = _simplex(A, b, c, exact)
    pi = x.reshape(n, m)
    if not exact:
        pi = np.maximum(pi, 0.0)
    value = sum((pi[i, j] for i, j in lp.objective_cells), zero)
    return CouplingSolution(value, pi)


# -- exhaustive basis enumeration ---------------------------------------------


def _tree_solution(cells: Iterable[tuple[int, int]], px, py) -> dict[tuple[int, int], Fraction] | None:
    """Unique flow on a spanning tree of the bipartite graph, by peeling leaves."""
    cells = set(cells)
    row_left, col_left = list(px), list(py)
    flow: dict[tuple[int, int], Fraction] = {}
    while cells:
        leaf = None
        for i in range(len(px)):
            own = [c for c in cells if c[0] == i]
            if len(own) == 1:
                leaf = own[0]
                amount = row_left[i]
                break
        if leaf is None:
            for j in range(len(py)):
                own = [c for c in cells if c[1] == j]
                if len(own) == 1:
                    leaf = own[0]
                    amount = col_left[j]
                    break
        if leaf is None:
            return None
        i, j = leaf
        flow[leaf] = amount
        row_left[i] -= amount
        col_left[j] -= amount
        cells.discard(leaf)
    if any(r != 0 for r in row_left) or any(c != 0 for c in col_left):
        return None
    return flow


def _is_spanning_tree(cells: Sequence[tuple[int, int]], n: int, m: int) -> bool:
    parent = list(range(n + m))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in cells:
        ra, rb = find(i), find(n + j)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def enumerate_tiny(lp: CouplingLP) -> CouplingSolution:
    """Exact optimum over all basic feasible couplings (n, m <= 3), in rational arithmetic."""
    n, m = lp.shape
    if n > 3 or m > 3:
        raise ValueError(f"enumerate_tiny handles at most 3 x 3 instances, got {n} x {m}")
    all_cells = [(i, j) for i in range(n) for j in range(m)]
    best: tuple[Fraction, dict] | None = None
    for support in combinations(all_cells, n + m - 1):
        if not _is_spanning_tree(support, n, m):
            continue
        flow = _tree_solution(support, lp.px, lp.py)
        if flow is None or any(v < 0 for v in flow.values()):
            continue
        value = sum((v for c, v in flow.items() if c in lp.objective_cells), Fraction(0))
        if best is None or (value < best[0] if lp.sense == "minimize" else value > best[0]):
            best = (value, flow)
    if best is None:
        raise InfeasibleMarginals("no basic feasible coupling exists")
    pi = np.full((n, m), Fraction(0), dtype=object)
    for (i, j), v in best[1].items():
        pi[i, j] = v
    return CouplingSolution(best[0], pi)
