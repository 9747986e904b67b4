"""Uncertain transaction databases, itemsets, and database transforms."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Iterable, Iterator, Mapping

import numpy as np

Itemset = tuple[str, ...]

_FORBIDDEN = set(":,")


class FormatError(ValueError):
    """Malformed UDB/CLAIMS text input."""


class GuardExceeded(Exception):
    """An operation guard (enumeration size, checkset size, DP arity) was hit."""


def check_item(item: str) -> str:
    if not item:
        raise ValueError("empty item id")
    if any(c.isspace() or c in _FORBIDDEN for c in item):
        raise ValueError(f"invalid item id {item!r}")
    return item


def itemset(items: Iterable[str]) -> Itemset:
    """Canonical itemset: strictly ascending, no duplicates."""
    seq = tuple(sorted(items))
    for it in seq:
        check_item(it)
    for a, b in zip(seq, seq[1:]):
        if a == b:
            raise ValueError(f"duplicate item {a!r} in itemset")
    return seq


def parse_itemset(text: str) -> Itemset:
    return itemset(tok for tok in text.split(",") if tok)


def format_itemset(x: Itemset) -> str:
    return ",".join(x)


def nonempty_subsets(x: Itemset) -> Iterator[Itemset]:
    """All non-empty subsets of x, by size then canonical order."""
    for k in range(1, len(x) + 1):
        for combo in combinations(x, k):
            yield combo


class UncertainDatabase:
    """Ordered transactions mapping items to existence probabilities in (0,1].

    Immutable after construction.  `scan_count` tracks how many full passes
    have been made through `scan()`, which every one-scan checker uses.
    """

    def __init__(self, transactions: Iterable[Mapping[str, float]]):
        txns: list[dict[str, float]] = []
        for lineno, txn in enumerate(transactions, start=1):
            clean: dict[str, float] = {}
            for item in sorted(txn):
                p = float(txn[item])
                check_item(item)
                if p == 0.0:
                    continue  # probability-0 entries are never stored
                if not 0.0 < p <= 1.0:
                    raise ValueError(
                        f"transaction {lineno}: probability {p} for {item!r} "
                        "outside (0,1]"
                    )
                clean[item] = p
            txns.append(clean)
        self._txns = tuple(txns)
        self._universe: Itemset = tuple(
            sorted({item for t in self._txns for item in t})
        )
        self._columns: dict[str, np.ndarray] = {}
        self.scan_count = 0

    @property
    def n(self) -> int:
        return len(self._txns)

    @property
    def transactions(self) -> tuple[dict[str, float], ...]:
        return self._txns

    @property
    def item_universe(self) -> Itemset:
        return self._universe

    @property
    def is_deterministic(self) -> bool:
        return all(p == 1.0 for t in self._txns for p in t.values())

    def scan(self) -> Iterator[dict[str, float]]:
        """One counted pass over the transactions."""
        self.scan_count += 1
        yield from self._txns

    def item_column(self, item: str) -> np.ndarray:
        """Length-n vector of p_i(item), 0.0 where absent."""
        col = self._columns.get(item)
        if col is None:
            col = np.array([t.get(item, 0.0) for t in self._txns])
            col.setflags(write=False)
            self._columns[item] = col
        return col

    def itemset_column(self, x: Itemset) -> np.ndarray:
        """Length-n vector of per-transaction itemset probabilities q_i."""
        if not x:
            raise ValueError("empty itemset")
        q = self.item_column(x[0]).copy()
        for item in x[1:]:
            q *= self.item_column(item)
        return q

    def txn_prob(self, i: int, x: Itemset) -> float:
        """Probability that transaction i (1-based) contains all of x."""
        if not 1 <= i <= self.n:
            raise IndexError(f"transaction index {i} out of range 1..{self.n}")
        t = self._txns[i - 1]
        prob = 1.0
        for item in x:
            prob *= t.get(item, 0.0)
        return prob

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, UncertainDatabase) and self._txns == other._txns
        )

    def __repr__(self) -> str:
        return f"UncertainDatabase(n={self.n}, items={len(self._universe)})"


def itemset_txn_prob(db: UncertainDatabase, i: int, x: Itemset) -> float:
    return db.txn_prob(i, x)


def parse_database(text: str | bytes) -> UncertainDatabase:
    """Parse the UDB v1 text format.

    Header line `#UDB v1` is written by `serialize_database` but any `#` line
    is skipped as a comment, so headerless fragments also parse.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    txns: list[dict[str, float]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        txn: dict[str, float] = {}
        for token in line.split():
            item, sep, prob_text = token.partition(":")
            if not sep or not prob_text:
                raise FormatError(f"line {lineno}: malformed pair {token!r}")
            try:
                check_item(item)
                p = float(prob_text)
            except ValueError as exc:
                raise FormatError(f"line {lineno}: {exc}") from exc
            if math.isnan(p) or p < 0.0 or p > 1.0:
                raise FormatError(
                    f"line {lineno}: probability {prob_text} outside (0,1]"
                )
            if item in txn:
                raise FormatError(f"line {lineno}: duplicate item {item!r}")
            txn[item] = p
        try:
            txns.append({k: v for k, v in txn.items()})
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
    try:
        return UncertainDatabase(txns)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def serialize_database(db: UncertainDatabase) -> str:
    """UDB v1 text; round-trips bit-exactly through parse_database."""
    lines = ["#UDB v1"]
    for t in db.transactions:
        lines.append(" ".join(f"{item}:{p:.17g}" for item, p in t.items()))
    return "\n".join(lines) + "\n"


def generate_synthetic(
    n_txns: int,
    n_items: int,
    density: float,
    prob_range: tuple[float, float],
    seed: int,
) -> UncertainDatabase:
    """Random database: each (txn, item) pair present w.p. `density`, with a
    uniform existence probability drawn from `prob_range`."""
    lo, hi = prob_range
    if not (0.0 < density <= 1.0):
        raise ValueError(f"density {density} outside (0,1]")
    if not (0.0 < lo <= hi <= 1.0):
        raise ValueError(f"probability range [{lo},{hi}] invalid")
    if n_items > 26 * 36:
        raise ValueError(f"n_items {n_items} too large for short item ids")
    rng = np.random.default_rng(seed)
    items = [f"I{k}" for k in range(n_items)]
    txns: list[dict[str, float]] = []
    for _ in range(n_txns):
        mask = rng.random(n_items) < density
        probs = rng.uniform(lo, hi, n_items)
        txns.append(
            {items[k]: float(probs[k]) for k in range(n_items) if mask[k]}
        )
    return UncertainDatabase(txns)


class WeightScheme(Enum):
    DET_REPLICATE = "det-replicate"
    SCALE_GLOBAL = "scale-global"
    SCALE_PER_ITEM = "scale-per-item"


@dataclass(frozen=True)
class WeightAssignment:
    """Private per-item random weights; secret to the data owner."""

    weights: Mapping[str, float]
    scheme: WeightScheme
    seed: int = 0

    def __post_init__(self) -> None:
        for item, w in self.weights.items():
            check_item(item)
            if w <= 0:
                raise ValueError(f"weight for {item!r} must be positive")
            if self.scheme is WeightScheme.DET_REPLICATE and w != int(w):
                raise ValueError("replication weights must be integers")

    @property
    def global_product(self) -> float:
        """M = product of the weights over the whole item universe."""
        return math.prod(self.weights.values())

    def product(self, x: Iterable[str]) -> float:
        return math.prod(self.weights[item] for item in x)


def squared_transform(db: UncertainDatabase) -> UncertainDatabase:
    """T -> T^2: every stored probability squared."""
    return UncertainDatabase({i: p * p for i, p in t.items()} for t in db.transactions)


def scale_transform(db: UncertainDatabase, w: WeightAssignment) -> UncertainDatabase:
    """Materialize the virtual weighted database T'.

    Only used by tests to validate the virtual-transform formulas; verification
    itself never materializes T'.  Raises if a scaled probability leaves (0,1].
    """
    if w.scheme is WeightScheme.SCALE_GLOBAL:
        m = w.global_product
        factor = lambda item: m
    elif w.scheme is WeightScheme.SCALE_PER_ITEM:
        factor = lambda item: w.weights[item]
    else:
        raise ValueError(f"scheme {w.scheme} is not a scaling scheme")
    txns = []
    for t in db.transactions:
        scaled = {item: p * factor(item) for item, p in t.items()}
        for item, p in scaled.items():
            if p > 1.0:
                raise ValueError(
                    f"scaled probability {p} for {item!r} exceeds 1; "
                    "weights unsuitable for materialization"
                )
        txns.append(scaled)
    return UncertainDatabase(txns)
