"""Component-by-component construction of rank-1 lattice generating vectors
with per-dimension exclusion sets.

The state keeps ``excess[n] = prod_j (1 + gamma_j omega({n g_j / N})) - 1``
for the chosen prefix.  Appending a candidate g changes the squared error by

    theta(g) = gamma_{d+1} * (2 zeta(alpha) N^-alpha + mean_n excess[n] omega({n g / N}))

which is a sum of nonnegative dual-lattice terms, so every sweep value is the
previous error plus a well-conditioned increment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .exclusions import ExclusionPolicy, build_exclusions
from .korobov import SmoothnessAlpha, Weights, _as_alpha, omega_table, unit_mean
from .numtheory import ModulusContext, primitive_root

# sweep values closer than this (relative) count as ties; smallest g wins
TIE_RTOL = 1e-11
FFT_AUTO_MIN_N = 2000


class EmptySearchSpace(Exception):
    pass


class FastPathUnavailable(Exception):
    pass


@dataclass
class CbcState:
    ctx: ModulusContext
    alpha: SmoothnessAlpha
    chosen: list[int] = field(default_factory=list)
    excess: np.ndarray | None = None
    e2_trace: list[float] = field(default_factory=list)
    exclusion_sizes: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.alpha = _as_alpha(self.alpha)
        if self.excess is None:
            self.excess = np.zeros(self.ctx.N)

    @property
    def d(self) -> int:
        return len(self.chosen)

    @property
    def e2(self) -> float:
        return self.e2_trace[-1] if self.e2_trace else 0.0

    @property
    def products(self) -> np.ndarray:
        return 1.0 + self.excess

    @classmethod
    def from_prefix(cls, prefix: Sequence[int], ctx: ModulusContext, w: Weights, a) -> "CbcState":
        """Rebuild a state for an arbitrary prefix (no exclusions recorded)."""
        state = cls(ctx, a)
        for g in prefix:
            if not ctx.is_unit(int(g)):
                raise ValueError(f"{g} is not a unit modulo {ctx.N}")
            gamma = _gamma(w, state.d)
            e2 = state.e2 + _theta_from_raw(state, gamma, float(_raw_sums(state, [int(g)])[0]))
            state.accept(int(g), e2, gamma)
        return state

    def accept(self, g: int, e2: float, gamma: float, exclusion_size: int | None = None) -> None:
        N = self.ctx.N
        tab = omega_table(N, self.alpha)
        q = gamma * tab[(np.arange(N, dtype=np.int64) * g) % N]
        self.excess += q * (1.0 + self.excess)
        self.chosen.append(int(g))
        self.e2_trace.append(float(e2))
        if exclusion_size is not None:
            self.exclusion_sizes.append(int(exclusion_size))


def _gamma(w: Weights, index: int) -> float:
    if w.kind != "product":
        raise ValueError("the CBC engine supports product weights only")
    if index >= w.s:
        raise ValueError(f"weights cover {w.s} coordinates, need coordinate {index + 1}")
    return w.product_gammas[index]


def _raw_sums(state: CbcState, cands, backend=None) -> np.ndarray:
    tab = omega_table(state.ctx.N, state.alpha)
    fn = {"numba": kernels.sweep_numba, "numpy": kernels.sweep_numpy}.get(backend, kernels.sweep)
    return fn(state.excess, tab, np.asarray(cands, dtype=np.int64))


def _theta_from_raw(state: CbcState, gamma, raw):
    N = state.ctx.N
    return gamma * (unit_mean(N, state.alpha) + raw / N)


def sweep_values(state: CbcState, w: Weights, cands=None, method: str = "naive",
                 backend: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Candidates and their squared errors e^2(prefix, g) as arrays."""
    gamma = _gamma(w, state.d)
    if cands is None:
        cands = state.ctx.units_array
    cands = np.asarray(cands, dtype=np.int64)
    if method == "naive":
        raw = _raw_sums(state, cands, backend)
    elif method in ("fft", "direct"):
        raw = _prime_raw_sums(state, method)[cands]
    else:
        raise ValueError(f"unknown sweep method {method!r}")
    return cands, state.e2 + _theta_from_raw(state, gamma, raw)


def candidate_error_sweep(state: CbcState, w: Weights, a=None) -> dict[int, float]:
    """Map each unit g to e^2(g_1*, ..., g_d*, g)."""
    _check_alpha(state, a)
    cands, vals = sweep_values(state, w)
    return dict(zip(cands.tolist(), vals.tolist()))


def _check_alpha(state: CbcState, a) -> None:
    if a is not None and float(_as_alpha(a).alpha) != float(state.alpha.alpha):
        raise ValueError("alpha does not match the state")


def _prime_raw_sums(state: CbcState, method: str) -> np.ndarray:
    """Raw sums indexed by candidate value (entry 0 unused), via a circular
    correlation over the cyclic group generated by a primitive root."""
    ctx = state.ctx
    N = ctx.N
    if not ctx.is_prime or N < 3:
        raise FastPathUnavailable(f"fast sweep needs a prime modulus >= 3, got {N}")
    tab = omega_table(N, state.alpha)
    perm = _power_permutation(N)
    x = state.excess[perm]
    y = tab[perm]
    if method == "fft":
        corr = kernels.correlate_fft(x, y)
    else:
        corr = kernels.correlate_direct(x, y)
    out = np.empty(N)
    out[0] = np.nan
    # candidate r^k collects excess[0] * omega(0) plus the correlation at lag k
    out[perm] = state.excess[0] * tab[0] + corr
    return out


_PERM_CACHE: dict[int, np.ndarray] = {}


def _power_permutation(N: int) -> np.ndarray:
    perm = _PERM_CACHE.get(N)
    if perm is None:
        r = primitive_root(N)
        perm = np.empty(N - 1, dtype=np.int64)
        v = 1
        for i in range(N - 1):
            perm[i] = v
            v = v * r % N
        _PERM_CACHE[N] = perm
    return perm


def fast_sweep_prime(state: CbcState, w: Weights, a=None, method: str = "fft") -> dict[int, float]:
    """Same result as :func:`candidate_error_sweep` for prime N, computed as a
    length N-1 circular correlation.  ``method="direct"`` evaluates the
    correlation in O(N^2) instead of by FFT."""
    _check_alpha(state, a)
    if method not in ("fft", "direct"):
        raise ValueError(f"unknown fast-path method {method!r}")
    cands, vals = sweep_values(state, w, method=method)
    return dict(zip(cands.tolist(), vals.tolist()))


def select_component(sweep: Mapping[int, float], excluded=frozenset()) -> tuple[int, float]:
    """Minimizer of the sweep outside ``excluded``; near-ties go to the smallest g."""
    allowed = sorted(g for g in sweep if g not in excluded)
    if not allowed:
        raise EmptySearchSpace("every candidate is excluded")
    cands = np.asarray(allowed, dtype=np.int64)
    vals = np.asarray([sweep[g] for g in allowed], dtype=float)
    i = _argmin_smallest(cands, vals)
    return int(cands[i]), float(vals[i])


def _argmin_smallest(cands: np.ndarray, vals: np.ndarray) -> int:
    vmin = vals.min()
    close = np.flatnonzero(vals <= vmin + TIE_RTOL * abs(vmin))
    return int(close[np.argmin(cands[close])])


@dataclass
class CbcResult:
    N: int
    alpha: float
    g: list[int]
    e2_trace: list[float]
    exclusion_sizes: list[int]
    state: CbcState = field(repr=False)


def cbc_construct(N: int, s: int, w: Weights, a, policy: ExclusionPolicy | None = None,
                  method: str = "auto") -> CbcResult:
    """Greedy construction: g_1 = 1, then each g_{d+1} minimizes the squared
    error over units outside E_{d+1}.

    ``method`` selects the sweep: ``naive`` (O(N phi(N)) per dimension),
    ``fft`` (prime N only), or ``auto`` (FFT for large prime N).
    """
    ctx = N if isinstance(N, ModulusContext) else ModulusContext(N)
    a = _as_alpha(a)
    a.even  # raises for alpha without closed form
    policy = policy or ExclusionPolicy()
    policy.validate_for(ctx)
    if s < 1:
        raise ValueError("dimension s must be >= 1")
    if w.s < s:
        raise ValueError(f"weights cover {w.s} coordinates, need {s}")
    if method == "auto":
        method = "fft" if ctx.is_prime and ctx.N >= FFT_AUTO_MIN_N else "naive"

    state = CbcState(ctx, a)
    g1_gamma = _gamma(w, 0)
    # every first component gives the same point set, so no search in d = 1
    state.accept(1, g1_gamma * unit_mean(ctx.N, a), g1_gamma)
    units = ctx.units_array
    for d in range(1, s):
        excl = build_exclusions(policy, d + 1, state.chosen, ctx)
        cands, vals = sweep_values(state, w, units, method=method)
        if excl:
            keep = ~np.isin(cands, np.fromiter(excl, dtype=np.int64))
            cands, vals = cands[keep], vals[keep]
        if cands.size == 0:
            raise EmptySearchSpace(f"dimension {d + 1}: no admissible candidate")
        i = _argmin_smallest(cands, vals)
        state.accept(int(cands[i]), float(vals[i]), _gamma(w, d), len(excl))
    return CbcResult(ctx.N, float(a.alpha), list(state.chosen), list(state.e2_trace),
                     list(state.exclusion_sizes), state)
