"""Upper bounds on the squared worst-case error of CBC-constructed lattices
with exclusions, and a checker that holds a construction against them."""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .korobov import Weights, _as_alpha, zeta
from .numtheory import ModulusContext

DEFAULT_GRID = 100
ZETA_CEILING = 1e8
VERIFY_TOL = 1e-10


class BoundViolation(Exception):
    def __init__(self, dimension: int, report: "BoundReport"):
        super().__init__(f"squared error exceeds the bound at dimension {dimension}")
        self.dimension = dimension
        self.report = report


def _check_lambda(lam: float, alpha: float) -> None:
    if not (1.0 / alpha < lam <= 1.0):
        raise ValueError(f"lambda must lie in (1/alpha, 1] = ({1.0 / alpha}, 1], got {lam}")


def _inflation(d: int, phi_N: int, excl_sizes: Sequence[int], e1_size: int) -> list[float]:
    if len(excl_sizes) < d - 1:
        raise ValueError(f"need |E_2|..|E_{d}|, got {len(excl_sizes)} sizes")
    sizes = [int(e1_size), *(int(x) for x in excl_sizes[: d - 1])]
    for j, e in enumerate(sizes, start=1):
        if not 0 <= e < phi_N:
            raise ValueError(f"|E_{j}| = {e} must lie in [0, phi(N)) = [0, {phi_N})")
    return [phi_N / (phi_N - e) for e in sizes]


def theorem_bound(d: int, w: Weights, a, phi_N: int, excl_sizes: Sequence[int], lam: float,
                  *, e1_size: int = 0) -> float:
    """Bound on e^2(g_1*, ..., g_d*) for exclusion sizes |E_2|..|E_d|.

    ((1/phi) sum_{u in [d]} gamma_u^lam (2 zeta(alpha lam))^|u| prod_{j in u} phi/(phi-|E_j|))^(1/lam)
    The first coordinate never has exclusions; ``e1_size`` exists only to
    compare against the uniform-delta form.
    """
    alpha = float(_as_alpha(a).alpha)
    _check_lambda(lam, alpha)
    infl = _inflation(d, phi_N, excl_sizes, e1_size)
    z2 = 2.0 * zeta(alpha * lam)
    if w.kind == "product":
        log_inner = -math.log(phi_N) + math.fsum(
            math.log1p(w.product_gammas[j] ** lam * z2 * infl[j]) for j in range(d)
        )
        return math.exp(log_inner / lam)
    return _subset_form(d, w, z2, infl, phi_N, lam)


def theorem_bound_subsets(d: int, w: Weights, a, phi_N: int, excl_sizes: Sequence[int],
                          lam: float, *, e1_size: int = 0) -> float:
    """:func:`theorem_bound` by explicit enumeration of all subsets of [d]."""
    alpha = float(_as_alpha(a).alpha)
    _check_lambda(lam, alpha)
    infl = _inflation(d, phi_N, excl_sizes, e1_size)
    return _subset_form(d, w, 2.0 * zeta(alpha * lam), infl, phi_N, lam)


def _subset_form(d, w, z2, infl, phi_N, lam) -> float:
    terms = [1.0]
    for r in range(1, d + 1):
        for u in itertools.combinations(range(d), r):
            gam = w.gamma(j + 1 for j in u)
            if gam == 0.0:
                continue
            terms.append(gam**lam * z2**r * math.prod(infl[j] for j in u))
    return (math.fsum(terms) / phi_N) ** (1.0 / lam)


def corollary_bound(s: int, w: Weights, a, phi_N: int, delta: float, lam: float) -> float:
    """Uniform-delta bound: every inflation factor replaced by 1/(1-delta)."""
    alpha = float(_as_alpha(a).alpha)
    _check_lambda(lam, alpha)
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    z2 = 2.0 * zeta(alpha * lam) / (1.0 - delta)
    if w.kind == "product":
        log_inner = -math.log(phi_N) + math.fsum(
            math.log1p(w.product_gammas[j] ** lam * z2) for j in range(s)
        )
        return math.exp(log_inner / lam)
    return _subset_form(s, w, z2, [1.0] * s, phi_N, lam)


def lambda_grid(alpha: float, grid_size: int = DEFAULT_GRID,
                zeta_ceiling: float = ZETA_CEILING) -> np.ndarray:
    """``grid_size`` equispaced points in (1/alpha, 1] ending at 1, minus the
    guard band where zeta(alpha lam) exceeds ``zeta_ceiling``."""
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    alpha = float(alpha)
    grid = np.linspace(1.0 / alpha, 1.0, grid_size + 1)[1:]
    grid[-1] = 1.0
    keep = [lam for lam in grid if alpha * lam > 1.0 and zeta(alpha * lam) <= zeta_ceiling]
    return np.asarray(keep)


def optimize_lambda(d: int, w: Weights, a, phi_N: int, excl_sizes: Sequence[int],
                    grid_size: int = DEFAULT_GRID) -> tuple[float, float]:
    """Grid minimizer (lambda*, bound) of :func:`theorem_bound`; the first
    grid point wins on exact ties."""
    alpha = float(_as_alpha(a).alpha)
    best = (math.nan, math.inf)
    for lam in lambda_grid(alpha, grid_size):
        b = theorem_bound(d, w, alpha, phi_N, excl_sizes, float(lam))
        if b < best[1]:
            best = (float(lam), b)
    return best


@dataclass
class BoundRow:
    d: int
    lambda_star: float
    bound: float
    e2: float | None = None
    margin: float | None = None


@dataclass
class BoundReport:
    rows: list[BoundRow]
    lambda_grid: list[float]
    corollary_value: float | None = None
    corollary_lambda: float | None = None

    @property
    def per_dimension(self) -> list[tuple[float, float]]:
        return [(r.lambda_star, r.bound) for r in self.rows]

    @property
    def ok(self) -> bool:
        return all(r.margin is None or r.margin >= -VERIFY_TOL for r in self.rows)

    def to_dict(self) -> dict:
        out = {
            "rows": [asdict(r) for r in self.rows],
            "lambda_grid": list(self.lambda_grid),
            "ok": self.ok,
        }
        if self.corollary_value is not None:
            out["corollary"] = {"value": self.corollary_value, "lambda": self.corollary_lambda}
        return out


def bound_report(s: int, w: Weights, a, phi_N: int, excl_sizes: Sequence[int],
                 grid_size: int = DEFAULT_GRID, e2_trace: Sequence[float] | None = None,
                 delta: float | None = None) -> BoundReport:
    alpha = float(_as_alpha(a).alpha)
    rows = []
    for d in range(1, s + 1):
        lam, b = optimize_lambda(d, w, alpha, phi_N, excl_sizes, grid_size)
        row = BoundRow(d, lam, b)
        if e2_trace is not None:
            row.e2 = float(e2_trace[d - 1])
            row.margin = b - row.e2
        rows.append(row)
    grid = lambda_grid(alpha, grid_size).tolist()
    report = BoundReport(rows, grid)
    if delta is not None:
        vals = [(corollary_bound(s, w, alpha, phi_N, delta, lam), lam) for lam in grid]
        report.corollary_value, report.corollary_lambda = min(vals)
    return report


def verify_construction(g: Sequence[int], e2_trace: Sequence[float], excl_sizes: Sequence[int],
                        w: Weights, a, ctx: ModulusContext,
                        grid_size: int = DEFAULT_GRID) -> BoundReport:
    """Check e2_trace[d] <= bound(d) + 1e-10 for every prefix; raises
    :class:`BoundViolation` naming the first failing dimension."""
    s = len(g)
    if len(e2_trace) != s:
        raise ValueError("e2_trace must have one entry per component")
    report = bound_report(s, w, a, ctx.phi, excl_sizes, grid_size, e2_trace)
    for row in report.rows:
        if row.margin < -VERIFY_TOL:
            raise BoundViolation(row.d, report)
    return report
