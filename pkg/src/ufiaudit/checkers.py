"""One-scan count checkers and inclusion-exclusion claim combinators.

Every verification equation has two sides: an owner value computed in a
single pass over the database (`checker_scan`, `all_zero_probability`) and a
signed combination of the prover's claimed values (`incl_excl_combine`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .datamodel import (
    GuardExceeded,
    Itemset,
    UncertainDatabase,
    WeightAssignment,
    format_itemset,
    nonempty_subsets,
)

MAX_CHECKSET = 20  # subset enumeration cap: 2^20 terms


class Scheme(Enum):
    DET_BASIC = "det-basic"
    DET_WEIGHTED = "det-weighted"
    EXP_BASIC = "exp-basic"
    EXP_SCHEME1 = "exp-w1"
    EXP_SCHEME2 = "exp-w2"
    PWS_PAPER = "pws-paper"
    PWS_EXACT = "pws-exact"
    APPROX = "approx"


_SCAN_SCHEMES = (
    Scheme.DET_BASIC,
    Scheme.DET_WEIGHTED,
    Scheme.EXP_BASIC,
    Scheme.EXP_SCHEME1,
    Scheme.EXP_SCHEME2,
)

_WEIGHTED = (Scheme.DET_WEIGHTED, Scheme.EXP_SCHEME1, Scheme.EXP_SCHEME2)


class _Kahan:
    """Compensated accumulator; keeps identities tight up to n ~ 1e6."""

    __slots__ = ("total", "_c")

    def __init__(self) -> None:
        self.total = 0.0
        self._c = 0.0

    def add(self, v: float) -> None:
        y = v - self._c
        t = self.total + y
        self._c = (t - self.total) - y
        self.total = t


@dataclass(frozen=True)
class CheckerReport:
    checkset: Itemset
    owner_value: float
    claim_value: float

    @property
    def residual(self) -> float:
        return self.claim_value - self.owner_value


def _require_weights(scheme: Scheme, w: WeightAssignment | None) -> WeightAssignment:
    if w is None:
        raise ValueError(f"scheme {scheme.value} requires a weight assignment")
    return w


def checker_scan(
    db: UncertainDatabase,
    x: Itemset,
    scheme: Scheme,
    w: WeightAssignment | None = None,
) -> float:
    """Owner-side checker value for checkset x, in one database scan."""
    if scheme not in _SCAN_SCHEMES:
        raise ValueError(f"no scan checker for scheme {scheme.value}")
    if scheme in _WEIGHTED:
        w = _require_weights(scheme, w)
    elif w is not None:
        raise ValueError(f"scheme {scheme.value} takes no weights")

    acc = _Kahan()
    if scheme is Scheme.DET_BASIC:
        for t in db.scan():
            if any(item in t for item in x):
                acc.add(1.0)
        return acc.total
    if scheme is Scheme.DET_WEIGHTED:
        for t in db.scan():
            hit = [item for item in x if item in t]
            if hit:
                acc.add(w.product(hit))
        return acc.total

    if scheme is Scheme.EXP_SCHEME1:
        m = w.global_product
        factor = lambda item: m
    elif scheme is Scheme.EXP_SCHEME2:
        factor = lambda item: w.weights[item]
    else:
        factor = lambda item: 1.0
    for t in db.scan():
        miss = 1.0
        for item in x:
            miss *= 1.0 - factor(item) * t.get(item, 0.0)
        acc.add(1.0 - miss)
    return acc.total


def all_zero_probability(db: UncertainDatabase, x: Itemset) -> float:
    """Pr[every item of x has support 0], in one database scan."""
    prob = 1.0
    for t in db.scan():
        for item in x:
            prob *= 1.0 - t.get(item, 0.0)
    return prob


def _weighted_det_coefficient(y: Itemset, w: WeightAssignment) -> float:
    acc = _Kahan()
    for z in nonempty_subsets(y):
        acc.add((-1.0) ** (len(y) - len(z)) * w.product(z))
    return acc.total


def incl_excl_combine(
    claims: Mapping[Itemset, float],
    x: Itemset,
    scheme: Scheme,
    w: WeightAssignment | None = None,
) -> float:
    """Claim-side combination over the non-empty subsets of checkset x."""
    if len(x) > MAX_CHECKSET:
        raise GuardExceeded(f"checkset size {len(x)} exceeds cap {MAX_CHECKSET}")
    if scheme in _WEIGHTED:
        w = _require_weights(scheme, w)
    acc = _Kahan()
    for y in nonempty_subsets(x):
        if y not in claims:
            raise ValueError(f"missing subset claim for {format_itemset(y)}")
        value = claims[y]
        sign = (-1.0) ** (len(y) + 1)
        if scheme is Scheme.EXP_SCHEME1:
            coeff = sign * w.global_product ** len(y)
        elif scheme is Scheme.EXP_SCHEME2:
            coeff = sign * w.product(y)
        elif scheme is Scheme.DET_WEIGHTED:
            coeff = _weighted_det_coefficient(y, w)
        else:
            coeff = sign
        acc.add(coeff * value)
    return acc.total


@dataclass(frozen=True)
class Violation:
    kind: str  # "monotonicity" or "range"
    subject: Itemset
    detail: str


def consistency_bounds(
    claims: Mapping[Itemset, float],
    x: Itemset,
    mode: str,
    n: int | None = None,
) -> list[Violation]:
    """Anti-monotonicity and range screen over the subset claims of x.

    mode "expected"/"det" bounds claims to [0, n] when n is given; mode "pws"
    bounds to [0, 1].
    """
    if mode not in ("expected", "pws", "det"):
        raise ValueError(f"unknown mode {mode!r}")
    violations: list[Violation] = []
    subs = [y for y in nonempty_subsets(x) if y in claims]
    upper = 1.0 if mode == "pws" else (float(n) if n is not None else math.inf)
    for y in subs:
        v = claims[y]
        if v < -1e-9 or v > upper + 1e-9:
            violations.append(
                Violation("range", y, f"claim {v} outside [0,{upper}]")
            )
    for y in subs:
        for z in subs:
            if len(y) < len(z) and set(y) < set(z):
                if claims[z] > claims[y] + 1e-9:
                    violations.append(
                        Violation(
                            "monotonicity",
                            z,
                            f"claim({format_itemset(z)})={claims[z]} exceeds "
                            f"claim({format_itemset(y)})={claims[y]}",
                        )
                    )
    return violations
