import pytest

from latcbc.cbc import cbc_construct
from latcbc.exclusions import (
    BudgetExceeded,
    ExclusionPolicy,
    Exhausted,
    build_exclusions,
    raw_exclusions,
)
from latcbc.korobov import Weights
from latcbc.numtheory import ModulusContext


def test_no_repeat_example():
    assert build_exclusions(ExclusionPolicy("no_repeat"), 3, [1, 5], ModulusContext(8)) == {1, 5}


def test_no_diagonal_example():
    ctx = ModulusContext(8)
    pol = ExclusionPolicy("no_diagonal")
    assert raw_exclusions(pol, 3, [1, 3], ctx) == {1, 7, 3, 5}
    # that is all of the units of Z/8Z, so it cannot be used as E_3
    with pytest.raises(Exhausted):
        build_exclusions(pol, 3, [1, 3], ctx)
    assert build_exclusions(ExclusionPolicy("no_diagonal"), 3, [1, 3], ModulusContext(16)) == {
        1, 15, 3, 13}


def test_none_is_empty():
    assert build_exclusions(ExclusionPolicy("none"), 5, [1, 3, 5, 7], ModulusContext(32)) == set()


def test_capped_switches_off_after_s_star():
    ctx = ModulusContext(64)
    pol = ExclusionPolicy("no_diagonal_capped", s_star=3)
    assert build_exclusions(pol, 3, [1, 19], ctx) == {1, 63, 19, 45}
    assert build_exclusions(pol, 4, [1, 19, 29], ctx) == set()


def test_explicit_sets():
    ctx = ModulusContext(13)
    pol = ExclusionPolicy.from_explicit_list([[2, 3], [4]])
    assert build_exclusions(pol, 2, [1], ctx) == {2, 3}
    assert build_exclusions(pol, 3, [1, 5], ctx) == {4}
    assert build_exclusions(pol, 4, [1, 5, 6], ctx) == set()
    with pytest.raises(ValueError):
        ExclusionPolicy.from_explicit_list([[2, 4]]).validate_for(ModulusContext(8))


def test_dimension_one_has_no_exclusions():
    with pytest.raises(ValueError):
        build_exclusions(ExclusionPolicy("no_repeat"), 1, [], ModulusContext(8))


def test_budget_and_exhaustion():
    ctx = ModulusContext(8)
    with pytest.raises(Exhausted) as info:
        build_exclusions(ExclusionPolicy("no_diagonal", delta=0.9), 3, [1, 3], ctx)
    assert info.value.dimension == 3
    with pytest.raises(BudgetExceeded) as info:
        build_exclusions(ExclusionPolicy("no_repeat", delta=0.25), 3, [1, 3], ctx)
    assert info.value.dimension == 3
    # exactly at the budget is allowed
    assert build_exclusions(ExclusionPolicy("no_repeat", delta=0.5), 3, [1, 3], ctx) == {1, 3}


def test_policy_validation():
    with pytest.raises(ValueError):
        ExclusionPolicy("no_diagonal", delta=1.0)
    with pytest.raises(ValueError):
        ExclusionPolicy("bogus")
    with pytest.raises(ValueError):
        ExclusionPolicy("no_diagonal_capped")


def test_policy_dict_roundtrip():
    for pol in (
        ExclusionPolicy("no_repeat", delta=0.3),
        ExclusionPolicy("no_diagonal_capped", s_star=4),
        ExclusionPolicy.from_explicit_list([[2], [3, 4]]),
    ):
        assert ExclusionPolicy.from_dict(pol.to_dict()) == pol


@pytest.mark.parametrize("N", [16, 31, 64, 101, 128])
@pytest.mark.parametrize("s", [3, 5, 8, 12])
def test_no_diagonal_feasibility_boundary(N, s):
    ctx = ModulusContext(N)
    w = Weights.product([0.8**j for j in range(1, s + 1)])
    pol = ExclusionPolicy("no_diagonal", delta=0.5)
    # with N - g != g for every unit, |E_d| = 2 (d - 1) exactly
    feasible = 2 * (s - 1) <= 0.5 * ctx.phi
    if feasible:
        r = cbc_construct(N, s, w, 2, pol)
        assert r.exclusion_sizes == [2 * (d - 1) for d in range(2, s + 1)]
    else:
        with pytest.raises((BudgetExceeded, Exhausted)):
            cbc_construct(N, s, w, 2, pol)
