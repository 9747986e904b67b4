"""Detection-rate experiment harness: adversary grid x scheme grid over
seeded random databases."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .checkers import Scheme
from .datamodel import FormatError, generate_synthetic
from .mining import MiningQuery, Mode, maximal_checksets, mine
from .prover import Adversary, AdversaryModel, prove
from .verifier import (
    TOL_ABS,
    TOL_REL,
    generate_weights,
    verify_approx,
    verify_deterministic,
    verify_expected,
    verify_pws,
)

_SCHEME_TAGS = {s.value: s for s in Scheme}
_ADVERSARY_TAGS = {a.value: a for a in Adversary}


@dataclass
class ExperimentConfig:
    txns: int = 100
    items: int = 6
    density: float = 0.5
    plo: float = 0.3
    phi: float = 0.9
    mode: Mode = Mode.EXPECTED
    minsup: float = 0.2
    pft: float | None = None
    trials: int = 100
    seed: int = 0
    adversaries: list[AdversaryModel] = field(default_factory=list)
    schemes: list[Scheme] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


def parse_config(text: str) -> ExperimentConfig:
    """Flat `key = value` config file."""
    fields: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise FormatError(f"line {lineno}: expected key = value")
        fields[key.strip()] = value.strip()

    cfg = ExperimentConfig()
    for key in ("txns", "items", "trials", "seed"):
        if key in fields:
            setattr(cfg, key, int(fields[key]))
    for key in ("density", "plo", "phi", "minsup"):
        if key in fields:
            setattr(cfg, key, float(fields[key]))
    if "pft" in fields:
        cfg.pft = float(fields["pft"])
    if "mode" in fields:
        try:
            cfg.mode = Mode(fields["mode"])
        except ValueError as exc:
            raise FormatError(f"unknown mode {fields['mode']!r}") from exc
    for token in fields.get("adversaries", "honest").split(","):
        token = token.strip()
        if not token:
            continue
        kind_tag, sep, mag = token.partition(":")
        if kind_tag not in _ADVERSARY_TAGS:
            raise FormatError(f"unknown adversary {kind_tag!r}")
        kind = _ADVERSARY_TAGS[kind_tag]
        magnitude = float(mag) if sep else (0.5 if kind is Adversary.LAZY else 0.05)
        if kind is Adversary.HONEST:
            magnitude = 0.0
        cfg.adversaries.append(AdversaryModel(kind, magnitude))
    for token in fields.get("schemes", "").split(","):
        token = token.strip()
        if not token:
            continue
        if token == "basic":
            token = "det-basic" if cfg.mode is Mode.DETERMINISTIC else "exp-basic"
        if token not in _SCHEME_TAGS:
            raise FormatError(f"unknown scheme {token!r}")
        cfg.schemes.append(_SCHEME_TAGS[token])
    if not cfg.schemes:
        cfg.schemes = [
            Scheme.DET_BASIC if cfg.mode is Mode.DETERMINISTIC else Scheme.EXP_BASIC
        ]
    return cfg


@dataclass
class CellResult:
    adversary: AdversaryModel
    scheme: Scheme
    trials: int = 0
    tampered: int = 0
    detected: int = 0
    checker_seconds: float = 0.0
    prover_extra_seconds: float = 0.0

    @property
    def detection_rate(self) -> float:
        base = self.tampered if self.adversary.kind is not Adversary.HONEST else self.trials
        if base == 0:
            return float("nan")
        if self.adversary.kind is Adversary.HONEST:
            return self.detected / self.trials  # false-alarm rate
        return self.detected / base


def _effectively_tampered(resp, honest) -> bool:
    for y, claim in resp.claims.items():
        hv = honest.claims[y]
        pairs = (
            [(claim.esup, hv.esup), (claim.variance, hv.variance),
             (claim.approx_pcnt, hv.approx_pcnt)]
            if hasattr(claim, "esup")
            else [(claim, hv)]
        )
        for got, want in pairs:
            if abs(got - want) > 10 * max(TOL_ABS, TOL_REL * abs(want)):
                return True
    return False


def _run_scheme(db, resp, checksets, scheme, delta, seed):
    if scheme in (Scheme.DET_BASIC, Scheme.DET_WEIGHTED):
        w = generate_weights(db, scheme, seed) if scheme is Scheme.DET_WEIGHTED else None
        return verify_deterministic(db, resp, checksets, w)
    if scheme in (Scheme.EXP_BASIC, Scheme.EXP_SCHEME1, Scheme.EXP_SCHEME2):
        w = None
        if scheme is not Scheme.EXP_BASIC:
            w = generate_weights(db, scheme, seed)
        if resp.mode is Mode.APPROX:
            return verify_approx(db, resp, checksets, delta, scheme, seed)
        return verify_expected(db, resp, checksets, scheme, w)
    if scheme in (Scheme.PWS_PAPER, Scheme.PWS_EXACT):
        return verify_pws(db, resp, checksets, delta, scheme)
    return verify_approx(db, resp, checksets, delta, Scheme.EXP_SCHEME2, seed)


def run_experiment(cfg: ExperimentConfig) -> list[CellResult]:
    query = MiningQuery(cfg.mode, cfg.minsup, cfg.pft)
    cells = {
        (adv, scheme): CellResult(adv, scheme)
        for adv in cfg.adversaries
        for scheme in cfg.schemes
    }
    root = np.random.SeedSequence(cfg.seed)
    trial_seeds = root.generate_state(3 * cfg.trials)
    for trial in range(cfg.trials):
        db_seed = int(trial_seeds[3 * trial])
        adv_seed = int(trial_seeds[3 * trial + 1])
        weight_seed = int(trial_seeds[3 * trial + 2])
        db = generate_synthetic(
            cfg.txns, cfg.items, cfg.density, (cfg.plo, cfg.phi), db_seed
        )
        result = mine(db, query)
        checksets = [x for x in maximal_checksets(result) if len(x) <= 4]
        if not checksets:
            continue
        delta = query.delta(db.n)
        t0 = time.perf_counter()
        honest = prove(db, query, checksets)
        t1 = time.perf_counter()
        prove(db, query, checksets, with_side=False)
        t2 = time.perf_counter()
        side_cost = max(0.0, (t1 - t0) - (t2 - t1))
        for adv in cfg.adversaries:
            if adv.kind is Adversary.HONEST:
                resp = honest
            else:
                resp = prove(db, query, checksets, AdversaryModel(adv.kind, adv.magnitude, adv_seed))
            tampered = resp.tampered and _effectively_tampered(resp, honest)
            for scheme in cfg.schemes:
                cell = cells[(adv, scheme)]
                cell.trials += 1
                cell.prover_extra_seconds += side_cost
                if adv.kind is not Adversary.HONEST and not tampered:
                    continue
                cell.tampered += tampered
                t3 = time.perf_counter()
                verdict = _run_scheme(db, resp, checksets, scheme, delta, weight_seed)
                cell.checker_seconds += time.perf_counter() - t3
                cell.detected += not verdict.accepted
    return [cells[(adv, scheme)] for adv in cfg.adversaries for scheme in cfg.schemes]


def format_table(results: list[CellResult]) -> str:
    header = (
        f"{'adversary':<14}{'scheme':<12}{'trials':>8}{'tampered':>10}"
        f"{'detected':>10}{'rate':>8}{'checker_ms':>12}{'prover_extra_ms':>17}"
    )
    lines = [header, "-" * len(header)]
    for cell in results:
        audited = max(1, cell.tampered if cell.adversary.kind is not Adversary.HONEST else cell.trials)
        lines.append(
            f"{cell.adversary.kind.value:<14}{cell.scheme.value:<12}"
            f"{cell.trials:>8}{cell.tampered:>10}{cell.detected:>10}"
            f"{cell.detection_rate:>8.3f}"
            f"{1e3 * cell.checker_seconds / audited:>12.3f}"
            f"{1e3 * cell.prover_extra_seconds / max(1, cell.trials):>17.3f}"
        )
    return "\n".join(lines) + "\n"


def format_csv(results: list[CellResult]) -> str:
    lines = ["adversary,magnitude,scheme,trials,tampered,detected,rate,checker_ms,prover_extra_ms"]
    for cell in results:
        audited = max(1, cell.tampered if cell.adversary.kind is not Adversary.HONEST else cell.trials)
        lines.append(
            f"{cell.adversary.kind.value},{cell.adversary.magnitude},"
            f"{cell.scheme.value},{cell.trials},{cell.tampered},{cell.detected},"
            f"{cell.detection_rate:.6f},"
            f"{1e3 * cell.checker_seconds / audited:.6f},"
            f"{1e3 * cell.prover_extra_seconds / max(1, cell.trials):.6f}"
        )
    return "\n".join(lines) + "\n"
