"""Integer helpers: Euler's totient, the unit group of Z/NZ, primitive roots."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, isqrt

import numpy as np


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization ``{prime: exponent}``; fine for n up to ~1e12."""
    if n < 1:
        raise ValueError(f"cannot factorize {n}")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for p in range(3, isqrt(n) + 1, 2):
        if n % p == 0:
            return False
    return True


def euler_phi(n: int) -> int:
    """Number of k in 1..n with gcd(k, n) == 1."""
    if n < 1:
        raise ValueError(f"euler_phi needs n >= 1, got {n}")
    result = n
    for p in factorize(n):
        result -= result // p
    return result


def units(n: int) -> list[int]:
    """Sorted units of Z/nZ, i.e. k in 1..n-1 coprime to n."""
    if n < 2:
        raise ValueError(f"units needs n >= 2, got {n}")
    return [k for k in range(1, n) if gcd(k, n) == 1]


def primitive_root(n: int) -> int:
    """Smallest generator of the cyclic group (Z/nZ)^* for prime n >= 3."""
    if n < 3 or not is_prime(n):
        raise ValueError(f"primitive_root needs a prime >= 3, got {n}")
    order = n - 1
    cofactors = [order // q for q in factorize(order)]
    for g in range(2, n):
        if all(pow(g, c, n) != 1 for c in cofactors):
            return g
    raise AssertionError("unreachable: every prime has a primitive root")


@dataclass(frozen=True)
class ModulusContext:
    """Everything about the modulus N the construction needs repeatedly."""

    N: int
    phi: int = field(init=False)
    units: tuple[int, ...] = field(init=False, repr=False)
    is_prime: bool = field(init=False)

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"modulus must be an integer >= 2, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        u = tuple(units(self.N))
        object.__setattr__(self, "units", u)
        object.__setattr__(self, "phi", len(u))
        object.__setattr__(self, "is_prime", is_prime(self.N))

    @property
    def units_array(self) -> np.ndarray:
        return np.asarray(self.units, dtype=np.int64)

    def is_unit(self, k: int) -> bool:
        return 1 <= k < self.N and gcd(k, self.N) == 1
