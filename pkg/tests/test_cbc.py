import math

import numpy as np
import pytest

from latcbc.cbc import (
    CbcState,
    EmptySearchSpace,
    FastPathUnavailable,
    candidate_error_sweep,
    cbc_construct,
    fast_sweep_prime,
    select_component,
    sweep_values,
)
from latcbc.exclusions import ExclusionPolicy, build_exclusions
from latcbc.korobov import Weights, error_sq, error_sq_bruteforce, zeta
from latcbc.numtheory import ModulusContext

from oracles import exhaustive_cbc

PI = math.pi


def test_sweep_from_empty_prefix():
    state = CbcState(ModulusContext(2), 2)
    sweep = candidate_error_sweep(state, Weights.product([1.0]))
    assert sweep == {1: pytest.approx(PI**2 / 12, rel=1e-14)}


def test_zero_weight_sweep_is_flat():
    ctx = ModulusContext(9)
    w = Weights.product([1.0, 0.5, 0.0])
    state = CbcState.from_prefix([1, 4], ctx, w, 2)
    sweep = candidate_error_sweep(state, w)
    assert set(sweep) == set(ctx.units)
    assert all(v == state.e2_trace[-1] for v in sweep.values())


def test_sweep_mirror_and_oracle_n5():
    ctx = ModulusContext(5)
    w = Weights.product([1.0, 1.0])
    state = CbcState.from_prefix([1], ctx, w, 2)
    sweep = candidate_error_sweep(state, w)
    assert sweep[2] == sweep[3]
    assert sweep[1] == sweep[4]
    for g, v in sweep.items():
        assert v == pytest.approx(error_sq([1, g], ctx, w, 2), rel=1e-13)
        # alpha = 2 tail of the truncated dual sum shrinks like 1/H
        t1 = v - error_sq_bruteforce([1, g], ctx, w, 2, 200)
        t2 = v - error_sq_bruteforce([1, g], ctx, w, 2, 400)
        assert 0 < t2 < t1 and 1.7 < t1 / t2 < 2.3


def test_select_component_examples():
    sweep = {1: 0.5, 3: 0.2, 5: 0.2, 7: 0.9}
    assert select_component(sweep) == (3, 0.2)
    assert select_component(sweep, {3, 5}) == (1, 0.5)
    with pytest.raises(EmptySearchSpace):
        select_component(sweep, {1, 3, 5, 7})


def test_select_matches_exhaustive_n5():
    ctx = ModulusContext(5)
    w = Weights.product([1.0, 1.0])
    state = CbcState.from_prefix([1], ctx, w, 2)
    g, e2 = select_component(candidate_error_sweep(state, w))
    brute = {c: error_sq([1, c], ctx, w, 2) for c in ctx.units}
    assert g == 2
    assert e2 == pytest.approx(min(brute.values()), rel=1e-13)


def test_construct_examples():
    w = Weights.product([1.0, 1.0, 1.0])
    assert cbc_construct(8, 1, w, 2).g == [1]
    assert cbc_construct(5, 2, w, 2).g == [1, 2]
    r = cbc_construct(5, 3, w, 2, ExclusionPolicy("no_repeat"))
    assert len(set(r.g)) == 3
    assert r.g == exhaustive_cbc(5, 3, w, 2, ExclusionPolicy("no_repeat"))


def test_construct_rejects_general_weights_and_bad_alpha():
    wg = Weights.general({(1,): 1.0, (2,): 1.0}, 2)
    with pytest.raises(ValueError):
        cbc_construct(7, 2, wg, 2)
    with pytest.raises(ValueError):
        cbc_construct(7, 2, Weights.product([1, 1]), 3)
    with pytest.raises(ValueError):
        cbc_construct(7, 3, Weights.product([1, 1]), 2)


@pytest.mark.parametrize("N", [5, 7, 8, 9, 16])
@pytest.mark.parametrize("alpha", [2, 4])
@pytest.mark.parametrize("kind", ["none", "no_repeat"])
def test_matches_exhaustive_oracle(N, alpha, kind):
    w = Weights.product([0.5**j for j in range(1, 4)])
    pol = ExclusionPolicy(kind, delta=0.9)
    assert cbc_construct(N, 3, w, alpha, pol).g == exhaustive_cbc(N, 3, w, alpha, pol)


CONFIGS = [
    (31, 6, 2, [0.9**j for j in range(1, 7)], "none"),
    (64, 6, 4, [1 / j**2 for j in range(1, 7)], "no_repeat"),
    (101, 5, 6, [0.5] * 5, "no_diagonal"),
    (45, 5, 2, [1.0] * 5, "no_diagonal_capped"),
]


@pytest.mark.parametrize("N, s, alpha, gam, kind", CONFIGS)
def test_state_invariants(N, s, alpha, gam, kind):
    ctx = ModulusContext(N)
    w = Weights.product(gam)
    pol = ExclusionPolicy(kind, s_star=3 if kind == "no_diagonal_capped" else None)
    r = cbc_construct(N, s, w, alpha, pol)
    assert r.g[0] == 1
    st = r.state
    p0 = math.prod(1 + gam[j] * 2 * zeta(alpha) for j in range(s))
    assert st.products[0] == pytest.approx(p0, rel=1e-12)
    assert float(np.mean(st.excess)) == pytest.approx(r.e2_trace[-1], rel=1e-12)
    for d in range(1, s + 1):
        assert r.e2_trace[d - 1] == pytest.approx(error_sq(r.g[:d], ctx, w, alpha), rel=1e-10)
    for d in range(2, s + 1):
        E = build_exclusions(pol, d, r.g[: d - 1], ctx)
        assert r.g[d - 1] not in E
        assert r.exclusion_sizes[d - 2] == len(E)


@pytest.mark.parametrize("N, s, alpha, gam, kind", CONFIGS)
def test_theta_nonnegative(N, s, alpha, gam, kind):
    ctx = ModulusContext(N)
    w = Weights.product(gam)
    r = cbc_construct(N, s, w, alpha)
    for d in range(1, s):
        state = CbcState.from_prefix(r.g[:d], ctx, w, alpha)
        _, vals = sweep_values(state, w)
        assert np.all(vals >= state.e2 - 1e-12)


@pytest.mark.parametrize("N", [5, 7, 11, 13, 101])
def test_sweep_mirror_prime(N):
    ctx = ModulusContext(N)
    w = Weights.product([1.0, 0.7])
    sweep = candidate_error_sweep(CbcState.from_prefix([1], ctx, w, 2), w)
    for g in ctx.units:
        assert sweep[g] == sweep[N - g]


def test_deterministic():
    w = Weights.product([0.8**j for j in range(1, 9)])
    a = cbc_construct(127, 8, w, 2, ExclusionPolicy("no_repeat"))
    b = cbc_construct(127, 8, w, 2, ExclusionPolicy("no_repeat"))
    assert a.g == b.g and a.e2_trace == b.e2_trace


@pytest.mark.parametrize("N, d", [(7, 1), (13, 3), (3, 1), (3, 2), (101, 4)])
def test_fast_sweep_matches_naive(N, d):
    ctx = ModulusContext(N)
    rng = np.random.default_rng(N)
    w = Weights.product([1.0] * (d + 1))
    prefix = [1] + rng.choice(ctx.units, size=d - 1).tolist()
    state = CbcState.from_prefix(prefix, ctx, w, 2)
    naive = candidate_error_sweep(state, w)
    for method in ("fft", "direct"):
        fast = fast_sweep_prime(state, w, method=method)
        assert fast.keys() == naive.keys()
        for g in naive:
            assert fast[g] == pytest.approx(naive[g], rel=1e-10)


def test_fast_sweep_rejects_composite():
    ctx = ModulusContext(12)
    w = Weights.product([1.0, 1.0])
    with pytest.raises(FastPathUnavailable):
        fast_sweep_prime(CbcState.from_prefix([1], ctx, w, 2), w)


def test_fft_construction_matches_naive():
    w = Weights.product([0.6**j for j in range(1, 7)])
    for N in (127, 251, 1009):
        naive = cbc_construct(N, 6, w, 2, method="naive")
        fast = cbc_construct(N, 6, w, 2, method="fft")
        assert fast.g == naive.g
        np.testing.assert_allclose(fast.e2_trace, naive.e2_trace, rtol=1e-10)


def test_fft_requires_prime():
    with pytest.raises(FastPathUnavailable):
        cbc_construct(64, 3, Weights.product([1, 1, 1]), 2, method="fft")
