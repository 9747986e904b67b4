"""Mining engines: Apriori under four frequency criteria, exact support
distributions, Normal-approximation frequentness, and the possible-world
enumeration oracle."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Iterable

import numpy as np

from . import kernels
from .datamodel import GuardExceeded, Itemset, UncertainDatabase, itemset, squared_transform

ENUMERATION_GUARD = 24  # max strictly-uncertain item instances for world enumeration


class Mode(Enum):
    DETERMINISTIC = "det"
    EXPECTED = "expected"
    PWS = "pws"
    APPROX = "approx"


@dataclass(frozen=True)
class MiningQuery:
    mode: Mode
    min_sup_ratio: float
    pft: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.min_sup_ratio <= 1.0:
            raise ValueError(f"min_sup_ratio {self.min_sup_ratio} outside (0,1]")
        needs_pft = self.mode in (Mode.PWS, Mode.APPROX)
        if needs_pft and (self.pft is None or not 0.0 < self.pft < 1.0):
            raise ValueError(f"{self.mode.value} mode requires pft in (0,1)")
        if not needs_pft and self.pft is not None:
            raise ValueError(f"{self.mode.value} mode takes no pft")

    def delta(self, n: int) -> int:
        """Support threshold, ceil(n * min_sup_ratio), at least 1."""
        return max(1, math.ceil(n * self.min_sup_ratio - 1e-9))


@dataclass(frozen=True)
class ApproxStats:
    esup: float
    variance: float
    approx_pcnt: float


@dataclass(frozen=True)
class NormalModel:
    mean: float
    variance: float

    def __post_init__(self) -> None:
        if self.variance < 0:
            raise ValueError(f"negative variance {self.variance}")


@dataclass
class MiningResult:
    mode: Mode
    delta: int
    pft: float | None
    records: dict[Itemset, float | ApproxStats] = field(default_factory=dict)

    @property
    def itemsets(self) -> list[Itemset]:
        return sorted(self.records, key=lambda x: (len(x), x))


@dataclass(frozen=True)
class PossibleWorld:
    inclusion: tuple[frozenset[str], ...]
    probability: float

    def support(self, x: Itemset) -> int:
        xs = set(x)
        return sum(1 for t in self.inclusion if xs <= t)


def expected_support(db: UncertainDatabase, x: Itemset) -> float:
    """esup(X) = sum over transactions of the itemset probability."""
    return math.fsum(db.itemset_column(x).tolist())


def support_distribution(db: UncertainDatabase, x: Itemset) -> np.ndarray:
    """Exact Poisson-binomial distribution of sup(X); index k = Pr[sup=k]."""
    return kernels.poisson_binomial(db.itemset_column(x))


def p_less_dp(db: UncertainDatabase, x: Itemset, delta: int) -> float:
    """Left-tail probability Pr[sup(X) < delta] by the O(delta*n) DP."""
    if delta < 1:
        raise ValueError(f"delta {delta} must be >= 1")
    live, _dead = kernels.left_tail(db.itemset_column(x), delta)
    return float(min(1.0, math.fsum(live.tolist())))


def frequentness_probability(db: UncertainDatabase, x: Itemset, delta: int) -> float:
    """Pr[sup(X) >= delta] = 1 - P_{<delta,n}(X)."""
    if delta > db.n:
        return 0.0
    return max(0.0, 1.0 - p_less_dp(db, x, delta))


def variance(db: UncertainDatabase, x: Itemset) -> float:
    """Poisson-binomial variance of sup(X): sum of q_i(1-q_i)."""
    q = db.itemset_column(x)
    return math.fsum((q * (1.0 - q)).tolist())


def normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def normal_approx_frequentness(model: NormalModel, delta: int) -> float:
    """Phi((esup - delta + 0.5)/sqrt(Var)): upper-tail Normal approximation of
    Pr[sup >= delta] with continuity correction."""
    shifted = model.mean - delta + 0.5
    if model.variance == 0.0:
        return 1.0 if shifted >= 0.0 else 0.0
    return normal_cdf(shifted / math.sqrt(model.variance))


def deterministic_support(db: UncertainDatabase, x: Itemset) -> int:
    """sup(X): transactions containing every item of X with certainty."""
    count = 0
    for t in db.transactions:
        if all(t.get(item, 0.0) == 1.0 for item in x):
            count += 1
    return count


def _measure(db: UncertainDatabase, x: Itemset, query: MiningQuery, delta: int):
    """(value to record, frequency criterion value) for one candidate."""
    if query.mode is Mode.DETERMINISTIC:
        sup = deterministic_support(db, x)
        return sup, float(sup)
    if query.mode is Mode.EXPECTED:
        esup = expected_support(db, x)
        return esup, esup
    if query.mode is Mode.PWS:
        pcnt = frequentness_probability(db, x, delta)
        return pcnt, pcnt
    esup = expected_support(db, x)
    var = variance(db, x)
    apcnt = normal_approx_frequentness(NormalModel(esup, var), delta)
    return ApproxStats(esup, var, apcnt), apcnt


def _frequent(query: MiningQuery, criterion: float, n: int, delta: int) -> bool:
    if query.mode in (Mode.PWS, Mode.APPROX):
        return criterion >= query.pft
    if query.mode is Mode.DETERMINISTIC:
        return criterion >= delta
    threshold = n * query.min_sup_ratio
    return criterion >= threshold - 1e-12 * max(1.0, threshold)


def _candidates(level: list[Itemset]) -> Iterable[Itemset]:
    """Apriori join: pairs sharing a (k-1)-prefix, pruned on subsets."""
    frequent = set(level)
    for a, b in combinations(sorted(level), 2):
        if a[:-1] != b[:-1]:
            continue
        cand = a + (b[-1],)
        if all(cand[:i] + cand[i + 1:] in frequent for i in range(len(cand))):
            yield cand


def mine(db: UncertainDatabase, query: MiningQuery) -> MiningResult:
    """Level-wise Apriori under the query's frequency criterion."""
    n = db.n
    delta = query.delta(n)
    result = MiningResult(mode=query.mode, delta=delta, pft=query.pft)
    level = []
    for item in db.item_universe:
        x = (item,)
        value, criterion = _measure(db, x, query, delta)
        if _frequent(query, criterion, n, delta):
            result.records[x] = value
            level.append(x)
    while level:
        next_level = []
        for cand in _candidates(level):
            value, criterion = _measure(db, cand, query, delta)
            if _frequent(query, criterion, n, delta):
                result.records[cand] = value
                next_level.append(cand)
        level = next_level
    return result


def enumerate_worlds(db: UncertainDatabase) -> list[PossibleWorld]:
    """Brute-force enumeration of all possible worlds (oracle only)."""
    uncertain: list[tuple[int, str, float]] = []
    certain: list[set[str]] = []
    for idx, t in enumerate(db.transactions):
        certain.append({item for item, p in t.items() if p == 1.0})
        for item, p in t.items():
            if p < 1.0:
                uncertain.append((idx, item, p))
    m = len(uncertain)
    if m > ENUMERATION_GUARD:
        raise GuardExceeded(
            f"{m} uncertain instances exceed enumeration guard {ENUMERATION_GUARD}"
        )
    worlds = []
    for bits in range(1 << m):
        prob = 1.0
        included: list[set[str]] = [set(c) for c in certain]
        for k, (idx, item, p) in enumerate(uncertain):
            if bits >> k & 1:
                prob *= p
                included[idx].add(item)
            else:
                prob *= 1.0 - p
        worlds.append(
            PossibleWorld(tuple(frozenset(s) for s in included), prob)
        )
    return worlds


def maximal_checksets(frequent: Iterable[Itemset] | MiningResult) -> list[Itemset]:
    """Frequent itemsets with no frequent proper superset."""
    if isinstance(frequent, MiningResult):
        sets = list(frequent.records)
    else:
        sets = [itemset(x) for x in frequent]
    pool = set(sets)
    out = [
        x
        for x in sets
        if not any(set(x) < set(y) for y in pool if len(y) > len(x))
    ]
    return sorted(out, key=lambda x: (len(x), x))
