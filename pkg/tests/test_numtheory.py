import math

import pytest
from hypothesis import given, strategies as st

from latcbc.numtheory import ModulusContext, euler_phi, is_prime, primitive_root, units


@pytest.mark.parametrize("n, expected", [(1, 1), (8, 4), (7, 6), (12, 4), (100, 40)])
def test_euler_phi(n, expected):
    assert euler_phi(n) == expected


def test_euler_phi_rejects_zero():
    with pytest.raises(ValueError):
        euler_phi(0)


@pytest.mark.parametrize(
    "n, expected", [(8, [1, 3, 5, 7]), (5, [1, 2, 3, 4]), (12, [1, 5, 7, 11]), (2, [1])]
)
def test_units(n, expected):
    assert units(n) == expected


def test_units_rejects_small():
    with pytest.raises(ValueError):
        units(1)


@pytest.mark.parametrize("n, root", [(7, 3), (5, 2), (3, 2), (13, 2), (23, 5), (41, 6)])
def test_primitive_root(n, root):
    assert primitive_root(n) == root
    assert sorted(pow(root, k, n) for k in range(n - 1)) == list(range(1, n))


@pytest.mark.parametrize("n", [2, 4, 9, 15])
def test_primitive_root_rejects(n):
    with pytest.raises(ValueError):
        primitive_root(n)


def test_phi_matches_unit_count_up_to_10k():
    for n in range(2, 10_001):
        assert euler_phi(n) == sum(1 for k in range(1, n) if math.gcd(k, n) == 1), n


@given(st.integers(1, 3000), st.integers(1, 3000))
def test_phi_multiplicative(m, n):
    if math.gcd(m, n) == 1:
        assert euler_phi(m * n) == euler_phi(m) * euler_phi(n)


def test_primitive_root_bijection_all_primes_below_10k():
    for p in range(3, 10_001):
        if not is_prime(p):
            continue
        r = primitive_root(p)
        seen = set()
        v = 1
        for _ in range(p - 1):
            seen.add(v)
            v = v * r % p
        assert len(seen) == p - 1 and v == 1, p


def test_modulus_context():
    ctx = ModulusContext(12)
    assert ctx.phi == 4 and ctx.units == (1, 5, 7, 11) and not ctx.is_prime
    assert ModulusContext(13).is_prime
    with pytest.raises(ValueError):
        ModulusContext(1)
