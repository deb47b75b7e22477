"""Squared worst-case error of rank-1 lattice rules in weighted Korobov spaces.

Two independent evaluation routes are provided:

* :func:`error_sq` uses the closed-form kernel (Bernoulli polynomials, even
  smoothness only) and costs O(N d).
* :func:`error_sq_bruteforce` sums the weight function directly over the
  truncated dual lattice and serves as an oracle for the first.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .numtheory import ModulusContext

CLOSED_FORM_ALPHAS = (2, 4, 6)
GENERAL_WEIGHTS_MAX_DIM = 12
BRUTEFORCE_MAX_POINTS = 50_000_000

# B_2, B_4, ..., B_26
_BERNOULLI_EVEN = (
    1 / 6,
    -1 / 30,
    1 / 42,
    -1 / 30,
    5 / 66,
    -691 / 2730,
    7 / 6,
    -3617 / 510,
    43867 / 798,
    -174611 / 330,
    854513 / 138,
    -236364091 / 2730,
    8553103 / 6,
)


def zeta(sigma: float, *, return_bound: bool = False):
    """Riemann zeta function for real ``sigma > 1`` by Euler-Maclaurin summation.

    The head sum runs to ``M - 1`` with ``M = 16``; correction terms are added
    until the next one is negligible.  For real arguments the remainder is
    bounded by the magnitude of the first omitted correction term, which is
    returned as well when ``return_bound`` is set.
    """
    sigma = float(sigma)
    if not sigma > 1.0:
        raise ValueError(f"zeta diverges for sigma <= 1, got {sigma}")
    M = 16
    head = math.fsum(k ** -sigma for k in range(M - 1, 0, -1))
    tail = [M ** (1.0 - sigma) / (sigma - 1.0), 0.5 * M ** -sigma]
    rising = sigma  # sigma (sigma+1) ... (sigma+2j-2)
    fact = 2.0  # (2j)!
    bound = math.inf
    for j, b2j in enumerate(_BERNOULLI_EVEN, start=1):
        if j > 1:
            rising *= (sigma + 2 * j - 3) * (sigma + 2 * j - 2)
            fact *= (2 * j - 1) * (2 * j)
        term = b2j / fact * rising * M ** (-sigma - 2 * j + 1)
        if abs(term) < 1e-18 * head:
            bound = abs(term)
            break
        tail.append(term)
    value = head + math.fsum(tail)
    return (value, bound) if return_bound else value


@dataclass(frozen=True)
class SmoothnessAlpha:
    alpha: float

    def __post_init__(self):
        if not float(self.alpha) > 1.0:
            raise ValueError(f"alpha must exceed 1, got {self.alpha}")

    @property
    def closed_form_available(self) -> bool:
        return float(self.alpha) in CLOSED_FORM_ALPHAS

    @property
    def even(self) -> int:
        if not self.closed_form_available:
            raise ValueError(
                f"no closed-form kernel for alpha={self.alpha}; supported: {CLOSED_FORM_ALPHAS}"
            )
        return int(self.alpha)


def _as_alpha(a) -> SmoothnessAlpha:
    return a if isinstance(a, SmoothnessAlpha) else SmoothnessAlpha(a)


@dataclass(frozen=True)
class Weights:
    """Coordinate weights.  ``product`` stores one gamma per coordinate,
    ``general`` stores gamma_u for nonempty subsets u of {1..s} (1-based)."""

    kind: str
    s: int
    product_gammas: tuple[float, ...] | None = None
    general_map: Mapping[frozenset, float] | None = None

    @classmethod
    def product(cls, gammas: Iterable[float]) -> "Weights":
        g = tuple(float(x) for x in gammas)
        if not g:
            raise ValueError("need at least one weight")
        if any(not (x >= 0.0) or math.isinf(x) for x in g):
            raise ValueError(f"weights must be finite and nonnegative: {g}")
        return cls("product", len(g), product_gammas=g)

    @classmethod
    def general(cls, mapping: Mapping, s: int) -> "Weights":
        if not 1 <= s <= GENERAL_WEIGHTS_MAX_DIM:
            raise ValueError(f"general weights support 1 <= s <= {GENERAL_WEIGHTS_MAX_DIM}")
        m: dict[frozenset, float] = {}
        for u, val in mapping.items():
            key = frozenset(int(j) for j in u)
            if not key:
                raise ValueError("gamma of the empty set is fixed at 1 and must not be given")
            if not key <= set(range(1, s + 1)):
                raise ValueError(f"subset {sorted(key)} not contained in [1..{s}]")
            if not float(val) >= 0.0:
                raise ValueError(f"negative weight for {sorted(key)}")
            m[key] = float(val)
        return cls("general", s, general_map=m)

    def gamma(self, u: Iterable[int]) -> float:
        """gamma_u for a subset of 1-based coordinate indices."""
        key = frozenset(u)
        if not key:
            return 1.0
        if self.kind == "product":
            return math.prod(self.product_gammas[j - 1] for j in sorted(key))
        return self.general_map.get(key, 0.0)

    def subset_table(self, d: int) -> np.ndarray:
        """gamma_u indexed by bitmask over coordinates 1..d (bit j-1), with entry 0 set to 0."""
        if d > self.s:
            raise ValueError(f"dimension {d} exceeds weight dimension {self.s}")
        table = np.zeros(1 << d)
        for mask in range(1, 1 << d):
            table[mask] = self.gamma(j + 1 for j in range(d) if mask >> j & 1)
        return table


def _bernoulli_even_in_t(t, alpha: int):
    # B_alpha(x) written in t = x (1 - x); symmetric in x <-> 1 - x by construction
    if alpha == 2:
        return 1.0 / 6.0 - t
    if alpha == 4:
        return t * t - 1.0 / 30.0
    return (-t - 0.5) * t * t + 1.0 / 42.0


def _omega_scale(alpha: int) -> float:
    # (-1)^(alpha/2 + 1) (2 pi)^alpha / alpha!
    return (-1) ** (alpha // 2 + 1) * (2 * math.pi) ** alpha / math.factorial(alpha)


def omega(x, alpha):
    """sum_{h != 0} exp(2 pi i h x) / |h|^alpha for x in [0, 1), alpha in {2, 4, 6}."""
    a = _as_alpha(alpha).even
    x = np.asarray(x, dtype=float)
    if np.any((x < 0.0) | (x >= 1.0)):
        raise ValueError("omega expects x in [0, 1)")
    out = _omega_scale(a) * _bernoulli_even_in_t(x * (1.0 - x), a)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=32)
def _omega_table_cached(N: int, alpha: int) -> np.ndarray:
    k = np.arange(N, dtype=np.int64)
    # k (N - k) is exact in int64 for N < 3e9, so t is correctly rounded and table[k] == table[N-k]
    t = (k * (N - k)).astype(float) / float(N * N)
    tab = _omega_scale(alpha) * _bernoulli_even_in_t(t, alpha)
    tab.flags.writeable = False
    return tab


def omega_table(N: int, alpha) -> np.ndarray:
    """Read-only array with ``omega(k / N)`` at index k = 0..N-1."""
    return _omega_table_cached(int(N), _as_alpha(alpha).even)


def unit_mean(N: int, alpha) -> float:
    """Exact mean of omega(k/N) over k = 0..N-1, namely 2 zeta(alpha) N^-alpha.

    The mean of omega({n g / N}) over n is the same for every unit g.
    """
    a = float(_as_alpha(alpha).alpha)
    return 2.0 * zeta(a) * float(N) ** -a


def _check_vector(g: Sequence[int], ctx: ModulusContext, w: Weights) -> np.ndarray:
    g = np.asarray(g, dtype=np.int64).ravel()
    if g.size == 0:
        raise ValueError("generating vector is empty")
    bad = [int(x) for x in g if not ctx.is_unit(int(x))]
    if bad:
        raise ValueError(f"components {bad} are not units modulo {ctx.N}")
    if g.size > w.s:
        raise ValueError(f"vector has {g.size} components but weights only cover {w.s}")
    return g


def error_sq(g: Sequence[int], ctx: ModulusContext, w: Weights, a) -> float:
    """Squared worst-case error e^2(g) via the closed-form kernel.

    With q_j(n) = gamma_j omega({n g_j / N}) the error is
    mean_n prod_j (1 + q_j(n)) - 1.  The linear part of the product has the
    known mean gamma_j 2 zeta(alpha) N^-alpha for each unit g_j and is added
    exactly; only the part of order >= 2 is averaged numerically, which avoids
    cancelling a mean close to 1 against the constant.
    """
    a = _as_alpha(a)
    g = _check_vector(g, ctx, w)
    N = ctx.N
    tab = omega_table(N, a)
    m = unit_mean(N, a)
    n = np.arange(N, dtype=np.int64)
    if w.kind == "product":
        gam = w.product_gammas
        lin = np.zeros(N)
        higher = np.zeros(N)
        for j, gj in enumerate(g):
            q = gam[j] * tab[(n * gj) % N]
            higher += q * (lin + higher)
            lin += q
        return math.fsum(gam[: g.size]) * m + float(np.mean(higher))
    d = g.size
    cols = [tab[(n * gj) % N] for gj in g]
    total = []
    for mask in range(1, 1 << d):
        members = [j for j in range(d) if mask >> j & 1]
        gam = w.gamma(j + 1 for j in members)
        if gam == 0.0:
            continue
        if len(members) == 1:
            total.append(gam * m)
        else:
            total.append(gam * float(np.mean(np.prod([cols[j] for j in members], axis=0))))
    return math.fsum(total)


def error_sq_bruteforce(
    g: Sequence[int], ctx: ModulusContext, w: Weights, a, H: int
) -> float:
    """Sum of r_alpha(gamma, h) over nonzero h in {-H..H}^d with g . h = 0 mod N.

    Converges to :func:`error_sq` from below as H grows.  Works for any
    alpha > 1.
    """
    a = _as_alpha(a)
    H = int(H)
    if H < 1:
        raise ValueError("truncation bound H must be >= 1")
    g = _check_vector(g, ctx, w)
    d = g.size
    side = 2 * H + 1
    if side**d > BRUTEFORCE_MAX_POINTS:
        raise ValueError(
            f"enumeration of {side}^{d} points exceeds the limit {BRUTEFORCE_MAX_POINTS}"
        )
    N = ctx.N
    alpha = float(a.alpha)
    hs = np.arange(-H, H + 1, dtype=np.int64)
    decay = np.ones(side)
    nz = hs != 0
    decay[nz] = np.abs(hs[nz]).astype(float) ** -alpha
    gamma_by_mask = w.subset_table(d)

    # grid over coordinates 2..d, flattened
    inner_dot = np.zeros(1, dtype=np.int64)
    inner_decay = np.ones(1)
    inner_mask = np.zeros(1, dtype=np.int64)
    for j in range(1, d):
        inner_dot = ((inner_dot[:, None] + g[j] * hs[None, :]) % N).ravel()
        inner_decay = (inner_decay[:, None] * decay[None, :]).ravel()
        inner_mask = (inner_mask[:, None] | (nz.astype(np.int64) << j)[None, :]).ravel()

    # per residue class of the inner dot product, the summed weights of all
    # inner points, once with coordinate 1 zero and once with it nonzero
    with_zero = np.bincount(inner_dot, weights=gamma_by_mask[inner_mask] * inner_decay,
                            minlength=N)
    with_nonzero = np.bincount(inner_dot, weights=gamma_by_mask[inner_mask | 1] * inner_decay,
                               minlength=N)
    # h . g = 0 mod N  <=>  inner_dot = -g_1 h_1 mod N
    need = (-g[0] * hs) % N
    terms = np.where(nz, with_nonzero[need], with_zero[need]) * decay
    return math.fsum(terms)
