"""Simulated outsourced mining service: honest claims, PWS side data, and the
four abnormality models applied to them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable

import numpy as np

from . import kernels
from .datamodel import (
    GuardExceeded,
    Itemset,
    UncertainDatabase,
    nonempty_subsets,
)
from .mining import (
    ApproxStats,
    Mode,
    MiningQuery,
    NormalModel,
    deterministic_support,
    expected_support,
    frequentness_probability,
    normal_approx_frequentness,
    p_less_dp,
    variance,
)

JOINT_DP_GUARD = 4  # max checkset arity for the multi-counter DP

# cumulative (state x pattern) transition steps executed by box DPs; the cost
# profile experiment reads this instead of wall time
dp_transition_ops = 0


def reset_dp_ops() -> None:
    global dp_transition_ops
    dp_transition_ops = 0


def _box(db: UncertainDatabase, x: Itemset, delta: int) -> tuple[np.ndarray, float]:
    global dp_transition_ops
    if delta < 1:
        raise ValueError(f"delta {delta} must be >= 1")
    if len(x) > JOINT_DP_GUARD:
        raise GuardExceeded(
            f"checkset arity {len(x)} exceeds joint DP guard {JOINT_DP_GUARD}"
        )
    cols = np.column_stack([db.item_column(item) for item in x])
    live, dead, ops = kernels.box_dp(cols, delta)
    dp_transition_ops += ops
    return live, dead


def joint_box_dp(db: UncertainDatabase, x: Itemset, delta: int) -> float:
    """Pr[every singleton of x has support < delta]."""
    live, _dead = _box(db, x, delta)
    return float(min(1.0, live.sum()))


def lambda_value(db: UncertainDatabase, x: Itemset, delta: int) -> float:
    """Pr[every singleton of x has support strictly between 0 and delta].

    Exactly 0 at delta=1: no integer support lies strictly between 0 and 1.
    """
    live, _dead = _box(db, x, delta)
    if delta == 1:
        return 0.0
    interior = live[(slice(1, None),) * len(x)]
    return float(interior.sum())


def joint_tail(db: UncertainDatabase, s: Itemset, delta: int) -> float:
    """Pr[every singleton of s has support >= delta].

    Distinct-item supports are independent under the item-independence
    assumption, so the joint tail factorizes over the singletons.
    """
    if len(s) > JOINT_DP_GUARD:
        raise GuardExceeded(
            f"checkset arity {len(s)} exceeds joint DP guard {JOINT_DP_GUARD}"
        )
    prob = 1.0
    for item in s:
        prob *= frequentness_probability(db, (item,), delta)
    return prob


class Adversary(Enum):
    HONEST = "honest"
    RANDOM_FAULT = "random-fault"
    LAZY = "lazy"
    STUPID = "stupid"
    SMART = "smart"


@dataclass(frozen=True)
class AdversaryModel:
    kind: Adversary
    magnitude: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind is Adversary.LAZY and not 0.0 < self.magnitude <= 1.0:
            raise ValueError("lazy magnitude must be in (0,1]")
        if self.kind in (Adversary.RANDOM_FAULT, Adversary.STUPID, Adversary.SMART):
            if self.magnitude <= 0.0:
                raise ValueError(f"{self.kind.value} magnitude must be positive")


@dataclass(frozen=True)
class SideData:
    lambda_: float
    rho: float
    joint_tails: dict[Itemset, float]  # J(S) for S subset of X, |S| >= 2


@dataclass
class ProverResponse:
    mode: Mode
    min_sup_ratio: float
    pft: float | None
    delta: int
    claims: dict[Itemset, float | ApproxStats]
    side: dict[Itemset, SideData] = field(default_factory=dict)
    adversary: Adversary = Adversary.HONEST
    tampered: bool = False


def _claim_value(db: UncertainDatabase, y: Itemset, mode: Mode, delta: int):
    if mode is Mode.DETERMINISTIC:
        return float(deterministic_support(db, y))
    if mode is Mode.EXPECTED:
        return expected_support(db, y)
    if mode is Mode.PWS:
        return frequentness_probability(db, y, delta)
    esup = expected_support(db, y)
    var = variance(db, y)
    return ApproxStats(esup, var, normal_approx_frequentness(NormalModel(esup, var), delta))


def _all_zero(db: UncertainDatabase, x: Itemset) -> float:
    prob = 1.0
    for t in db.transactions:
        for item in x:
            prob *= 1.0 - t.get(item, 0.0)
    return prob


def _honest(
    db: UncertainDatabase,
    query: MiningQuery,
    checksets: list[Itemset],
    delta: int,
    with_side: bool = True,
) -> ProverResponse:
    claims: dict[Itemset, float | ApproxStats] = {}
    for x in checksets:
        for y in nonempty_subsets(x):
            if y not in claims:
                claims[y] = _claim_value(db, y, query.mode, delta)
    side: dict[Itemset, SideData] = {}
    if with_side and query.mode is Mode.PWS:
        for x in checksets:
            box = joint_box_dp(db, x, delta)
            lam = lambda_value(db, x, delta)
            rho = max(0.0, box - _all_zero(db, x))
            joints = {
                s: joint_tail(db, s, delta)
                for s in nonempty_subsets(x)
                if len(s) >= 2
            }
            side[x] = SideData(lam, rho, joints)
    return ProverResponse(
        mode=query.mode,
        min_sup_ratio=query.min_sup_ratio,
        pft=query.pft,
        delta=delta,
        claims=claims,
        side=side,
    )


def _iter_fields(claim) -> list[str]:
    return ["esup", "variance", "approx_pcnt"] if isinstance(claim, ApproxStats) else [""]


def _perturb_random_fault(resp: ProverResponse, magnitude: float, rng) -> None:
    # Each claim is flipped with probability 1/2 by a full +-magnitude
    # relative step (random sign); a uniform factor would allow arbitrarily
    # small, undetectable perturbations.
    for y in sorted(resp.claims, key=lambda x: (len(x), x)):
        claim = resp.claims[y]
        if isinstance(claim, ApproxStats):
            fields = {}
            for name in ("esup", "variance", "approx_pcnt"):
                v = getattr(claim, name)
                if rng.random() < 0.5:
                    sign = 1.0 if rng.random() < 0.5 else -1.0
                    v += sign * magnitude * v
                fields[name] = v
            resp.claims[y] = ApproxStats(**fields)
        else:
            if rng.random() < 0.5:
                sign = 1.0 if rng.random() < 0.5 else -1.0
                resp.claims[y] = claim + sign * magnitude * claim


def _perturb_stupid(resp: ProverResponse, checksets: list[Itemset], magnitude: float) -> None:
    target = sorted(checksets, key=lambda x: (-len(x), x))[0]
    for y in nonempty_subsets(target):
        claim = resp.claims[y]
        if isinstance(claim, ApproxStats):
            resp.claims[y] = replace(claim, esup=claim.esup + magnitude)
        else:
            resp.claims[y] = claim + magnitude


def _perturb_smart(
    resp: ProverResponse, checksets: list[Itemset], magnitude: float, rng
) -> None:
    """Perturbation vector in the kernel of the unweighted inclusion-exclusion
    combination: additive eps per singleton, eps(Y) = sum of eps over Y.  Over
    any checkset of size >= 2 the signed sum of such a vector cancels."""
    multi_items = sorted({item for x in checksets if len(x) >= 2 for item in x})
    eps = {item: magnitude * rng.uniform(0.5, 1.5) for item in multi_items}
    for y in sorted(resp.claims, key=lambda x: (len(x), x)):
        bump = sum(eps.get(item, 0.0) for item in y)
        if bump == 0.0 or not all(item in eps for item in y):
            continue
        claim = resp.claims[y]
        if isinstance(claim, ApproxStats):
            esup = claim.esup + bump
            apcnt = normal_approx_frequentness(
                NormalModel(esup, claim.variance), resp.delta
            )
            resp.claims[y] = ApproxStats(esup, claim.variance, apcnt)
        else:
            resp.claims[y] = claim + bump


def prove(
    db: UncertainDatabase,
    query: MiningQuery,
    checksets: Iterable[Itemset],
    adversary: AdversaryModel = AdversaryModel(Adversary.HONEST),
    with_side: bool = True,
) -> ProverResponse:
    """Produce a (possibly tampered) response claiming values for every
    non-empty subset of every checkset, plus PWS side data per checkset."""
    checksets = sorted(checksets, key=lambda x: (len(x), x))
    delta = query.delta(db.n)
    if adversary.kind is Adversary.LAZY:
        prefix = UncertainDatabase(
            db.transactions[: math.ceil(adversary.magnitude * db.n)]
        )
        resp = _honest(prefix, query, checksets, delta, with_side)
        scale = 1.0 / adversary.magnitude
        for y, claim in resp.claims.items():
            if isinstance(claim, ApproxStats):
                resp.claims[y] = ApproxStats(
                    claim.esup * scale, claim.variance * scale, claim.approx_pcnt * scale
                )
            else:
                resp.claims[y] = claim * scale
        resp.delta = delta
    else:
        resp = _honest(db, query, checksets, delta, with_side)

    baseline = dict(resp.claims)
    rng = np.random.default_rng(adversary.seed)
    if adversary.kind is Adversary.RANDOM_FAULT:
        _perturb_random_fault(resp, adversary.magnitude, rng)
    elif adversary.kind is Adversary.STUPID:
        _perturb_stupid(resp, checksets, adversary.magnitude)
    elif adversary.kind is Adversary.SMART:
        _perturb_smart(resp, checksets, adversary.magnitude, rng)

    resp.adversary = adversary.kind
    if adversary.kind is Adversary.LAZY:
        honest_full = _honest(db, query, checksets, delta, with_side=False)
        resp.tampered = resp.claims != honest_full.claims
    else:
        resp.tampered = resp.claims != baseline
    return resp
