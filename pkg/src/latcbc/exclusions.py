"""Per-dimension exclusion sets for the CBC search."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .numtheory import ModulusContext

KINDS = ("none", "no_repeat", "no_diagonal", "no_diagonal_capped", "explicit")
DEFAULT_DELTA = 0.5


class ExclusionError(Exception):
    """Base class for infeasible exclusion sets; ``dimension`` names the coordinate."""

    def __init__(self, message: str, dimension: int):
        super().__init__(message)
        self.dimension = dimension


class BudgetExceeded(ExclusionError):
    pass


class Exhausted(ExclusionError):
    pass


@dataclass(frozen=True)
class ExclusionPolicy:
    kind: str = "none"
    delta: float = DEFAULT_DELTA
    s_star: int | None = None
    # dimension (>= 2) -> excluded values
    explicit: Mapping[int, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown exclusion policy {self.kind!r}; choose from {KINDS}")
        if not 0.0 <= float(self.delta) < 1.0:
            raise ValueError(f"delta must lie in [0, 1), got {self.delta}")
        if self.kind == "no_diagonal_capped":
            if self.s_star is None or int(self.s_star) < 1:
                raise ValueError("no_diagonal_capped needs a positive s_star")
        if self.kind == "explicit":
            cleaned = {}
            for d, values in dict(self.explicit).items():
                if int(d) < 2:
                    raise ValueError("explicit exclusions start at dimension 2")
                cleaned[int(d)] = frozenset(int(v) for v in values)
            object.__setattr__(self, "explicit", cleaned)

    @classmethod
    def from_explicit_list(cls, sets: Sequence[Sequence[int]], delta: float = DEFAULT_DELTA):
        """Build an explicit policy where ``sets[i]`` applies to dimension i + 2."""
        return cls("explicit", delta=delta, explicit={i + 2: frozenset(v) for i, v in enumerate(sets)})

    def validate_for(self, ctx: ModulusContext) -> None:
        for d, values in self.explicit.items():
            bad = sorted(v for v in values if not ctx.is_unit(v))
            if bad:
                raise ValueError(f"explicit exclusions for dimension {d} contain non-units {bad}")

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "delta": self.delta}
        if self.kind == "no_diagonal_capped":
            out["s_star"] = self.s_star
        if self.kind == "explicit":
            out["explicit"] = {str(d): sorted(v) for d, v in sorted(self.explicit.items())}
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "ExclusionPolicy":
        explicit = data.get("explicit") or {}
        if isinstance(explicit, (list, tuple)):
            explicit = {i + 2: v for i, v in enumerate(explicit)}
        return cls(
            kind=data.get("kind", "none"),
            delta=float(data.get("delta", DEFAULT_DELTA)),
            s_star=data.get("s_star"),
            explicit={int(k): v for k, v in explicit.items()},
        )


def _mirrored(prefix: Sequence[int], N: int) -> set[int]:
    out = set()
    for g in prefix:
        out.add(int(g))
        out.add(N - int(g))
    return out


def raw_exclusions(
    policy: ExclusionPolicy, d: int, prefix: Sequence[int], ctx: ModulusContext
) -> frozenset:
    """The set a policy prescribes for dimension d, before feasibility checks."""
    if d < 2:
        raise ValueError("no exclusions are used in dimension 1")
    if len(prefix) != d - 1:
        raise ValueError(f"dimension {d} needs a prefix of length {d - 1}, got {len(prefix)}")
    kind = policy.kind
    if kind == "none":
        excl: set[int] = set()
    elif kind == "no_repeat":
        excl = {int(g) for g in prefix}
    elif kind == "no_diagonal":
        excl = _mirrored(prefix, ctx.N)
    elif kind == "no_diagonal_capped":
        excl = _mirrored(prefix, ctx.N) if d <= policy.s_star else set()
    else:
        excl = set(policy.explicit.get(d, ()))
    return frozenset(k for k in excl if ctx.is_unit(k))


def build_exclusions(
    policy: ExclusionPolicy, d: int, prefix: Sequence[int], ctx: ModulusContext
) -> frozenset:
    """Exclusion set E_d for choosing the d-th component (d >= 2, 1-based).

    Raises :class:`Exhausted` if it would cover every unit and
    :class:`BudgetExceeded` if it holds more than ``delta * phi(N)`` values.
    """
    excl = raw_exclusions(policy, d, prefix, ctx)
    if len(excl) >= ctx.phi:
        raise Exhausted(
            f"dimension {d}: exclusions cover all {ctx.phi} units modulo {ctx.N}", d
        )
    if len(excl) > policy.delta * ctx.phi:
        raise BudgetExceeded(
            f"dimension {d}: |E_{d}| = {len(excl)} exceeds delta * phi(N) = "
            f"{policy.delta} * {ctx.phi}",
            d,
        )
    return excl
