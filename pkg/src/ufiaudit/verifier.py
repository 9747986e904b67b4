"""Data-owner side: private weight generation, verdicts for every scheme, and
the two-pass audit of approximate mining claims."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .checkers import (
    CheckerReport,
    Scheme,
    Violation,
    all_zero_probability,
    checker_scan,
    consistency_bounds,
    incl_excl_combine,
)
from .datamodel import (
    Itemset,
    UncertainDatabase,
    WeightAssignment,
    WeightScheme,
    nonempty_subsets,
    squared_transform,
)
from .mining import ApproxStats, NormalModel, normal_approx_frequentness
from .prover import ProverResponse

TOL_REL = 1e-9
TOL_ABS = 1e-12

_EXPECTED_SCHEMES = (Scheme.EXP_BASIC, Scheme.EXP_SCHEME1, Scheme.EXP_SCHEME2)

_WEIGHT_SCHEME = {
    Scheme.DET_WEIGHTED: WeightScheme.DET_REPLICATE,
    Scheme.EXP_SCHEME1: WeightScheme.SCALE_GLOBAL,
    Scheme.EXP_SCHEME2: WeightScheme.SCALE_PER_ITEM,
}


def tolerance_for(owner_value: float, rel: float = TOL_REL) -> float:
    return max(TOL_ABS, rel * abs(owner_value))


@dataclass
class Verdict:
    scheme: Scheme
    reports: list[CheckerReport] = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)
    rejected: list[Itemset] = field(default_factory=list)
    tolerance: float = TOL_REL

    @property
    def accepted(self) -> bool:
        return not self.rejected and not self.violations

    @property
    def decision(self) -> str:
        return "ACCEPT" if self.accepted else "REJECT"


def generate_weights(
    db: UncertainDatabase, scheme: Scheme, seed: int
) -> WeightAssignment:
    """One private weight per item in the database's universe."""
    wscheme = _WEIGHT_SCHEME.get(scheme)
    if wscheme is None:
        raise ValueError(f"scheme {scheme.value} takes no weights")
    rng = np.random.default_rng(seed)
    items = db.item_universe
    if wscheme is WeightScheme.DET_REPLICATE:
        draws = rng.integers(1, 2**20 + 1, size=len(items))
        weights = {item: float(w) for item, w in zip(items, draws)}
    elif wscheme is WeightScheme.SCALE_GLOBAL:
        # Only the product of the weights enters the global-scale checker,
        # so draw that product directly and keep it well away from 0: a tiny
        # product damps deep-lattice residuals below the relative tolerance,
        # while a product above 1 leaves the probability table illegal.
        m = rng.uniform(0.3, 0.9)
        per_item = m ** (1.0 / len(items)) if items else 1.0
        weights = {item: per_item for item in items}
    else:
        # Per-item weights stay in [0.5, 1]: legal to materialize and the
        # subset coefficients (products of up to four weights) keep tampered
        # residuals above the owner-relative tolerance.
        draws = rng.uniform(0.5, 1.0, size=len(items))
        weights = {item: float(w) for item, w in zip(items, draws)}
    return WeightAssignment(weights=weights, scheme=wscheme, seed=seed)


def _check(
    verdict: Verdict, x: Itemset, owner: float, claim: float, rel: float
) -> None:
    verdict.reports.append(CheckerReport(x, owner, claim))
    if abs(claim - owner) > tolerance_for(owner, rel):
        verdict.rejected.append(x)


def verify_deterministic(
    db: UncertainDatabase,
    resp: ProverResponse,
    checksets: list[Itemset],
    w: WeightAssignment | None = None,
) -> Verdict:
    """Exact checker comparison on a 0/1 database (basic or weighted)."""
    if not db.is_deterministic:
        raise ValueError("deterministic verification requires a 0/1 database")
    scheme = Scheme.DET_WEIGHTED if w is not None else Scheme.DET_BASIC
    verdict = Verdict(scheme=scheme, tolerance=0.0)
    for x in checksets:
        owner = checker_scan(db, x, scheme, w)
        claim = incl_excl_combine(resp.claims, x, scheme, w)
        verdict.reports.append(CheckerReport(x, owner, claim))
        if claim != owner:
            verdict.rejected.append(x)
    return verdict


def verify_expected(
    db: UncertainDatabase,
    resp: ProverResponse,
    checksets: list[Itemset],
    scheme: Scheme = Scheme.EXP_BASIC,
    w: WeightAssignment | None = None,
    rel: float = TOL_REL,
    claims=None,
) -> Verdict:
    """Expected-support verification: basic or private-weight schemes."""
    if scheme not in _EXPECTED_SCHEMES:
        raise ValueError(f"{scheme.value} is not an expected-support scheme")
    claims = resp.claims if claims is None else claims
    verdict = Verdict(scheme=scheme, tolerance=rel)
    for x in checksets:
        verdict.violations.extend(
            consistency_bounds(claims, x, "expected", n=db.n)
        )
        owner = checker_scan(db, x, scheme, w)
        claim = incl_excl_combine(claims, x, scheme, w)
        _check(verdict, x, owner, claim, rel)
    return verdict


def verify_pws(
    db: UncertainDatabase,
    resp: ProverResponse,
    checksets: list[Itemset],
    delta: int,
    variant: Scheme = Scheme.PWS_EXACT,
    rel: float = TOL_REL,
) -> Verdict:
    """Possible-world-semantics verification.

    PWS_PAPER: claim side sums pcnt over the subset lattice; owner side is
    1 - lambda - Pr[all supports zero], with lambda taken from the response.
    PWS_EXACT: claim side combines joint tails J(S) (singleton J = returned
    pcnt); owner side is 1 - rho - Pr[all zero], rho from side data, plus the
    anti-monotonicity screen over the returned pcnt values.
    """
    if variant not in (Scheme.PWS_PAPER, Scheme.PWS_EXACT):
        raise ValueError(f"{variant.value} is not a PWS variant")
    verdict = Verdict(scheme=variant, tolerance=rel)
    for x in checksets:
        side = resp.side.get(x)
        if side is None:
            raise ValueError(f"missing side data for checkset {x}")
        zero = all_zero_probability(db, x)
        if variant is Scheme.PWS_PAPER:
            claim = incl_excl_combine(resp.claims, x, Scheme.PWS_PAPER)
            owner = 1.0 - side.lambda_ - zero
            _check(verdict, x, owner, claim, rel)
        else:
            verdict.violations.extend(
                consistency_bounds(resp.claims, x, "pws")
            )
            joints: dict[Itemset, float] = {}
            for s in nonempty_subsets(x):
                if len(s) == 1:
                    joints[s] = resp.claims[s]
                else:
                    if s not in side.joint_tails:
                        raise ValueError(
                            f"missing joint tail for subset {s} of checkset {x}"
                        )
                    joints[s] = side.joint_tails[s]
            claim = incl_excl_combine(joints, x, Scheme.PWS_EXACT)
            owner = 1.0 - side.rho - zero
            _check(verdict, x, owner, claim, rel)
    return verdict


def verify_approx(
    db: UncertainDatabase,
    resp: ProverResponse,
    checksets: list[Itemset],
    delta: int,
    scheme: Scheme = Scheme.EXP_BASIC,
    seed: int = 0,
    rel: float = TOL_REL,
) -> Verdict:
    """Two-pass audit of approximate-mining claims.

    Pass 1 verifies the esup claims on T.  Pass 2 derives the squared-database
    expected supports esup_T2(Y) = esup(Y) - Var(Y) and verifies them on T^2
    with an independently seeded weight draw.  Returned approximate
    frequentness values are recomputed from the verified (esup, Var) pair.
    """
    esup_claims: dict[Itemset, float] = {}
    derived_claims: dict[Itemset, float] = {}
    for y, claim in resp.claims.items():
        if not isinstance(claim, ApproxStats):
            raise ValueError("approx verification requires (esup, var, apcnt) claims")
        esup_claims[y] = claim.esup
        derived_claims[y] = claim.esup - claim.variance

    seeds = np.random.SeedSequence(seed).generate_state(2)
    w1 = w2 = None
    if scheme in (Scheme.EXP_SCHEME1, Scheme.EXP_SCHEME2):
        w1 = generate_weights(db, scheme, int(seeds[0]))
        w2 = generate_weights(db, scheme, int(seeds[1]))

    pass1 = verify_expected(db, resp, checksets, scheme, w1, rel, claims=esup_claims)
    squared = squared_transform(db)
    pass2 = verify_expected(
        squared, resp, checksets, scheme, w2, rel, claims=derived_claims
    )

    verdict = Verdict(scheme=Scheme.APPROX, tolerance=rel)
    verdict.reports = pass1.reports + pass2.reports
    verdict.violations = pass1.violations + pass2.violations
    verdict.rejected = sorted(set(pass1.rejected + pass2.rejected))
    for y, claim in resp.claims.items():
        expected_apcnt = normal_approx_frequentness(
            NormalModel(claim.esup, max(0.0, claim.variance)), delta
        ) if claim.variance >= 0 else float("nan")
        if not abs(claim.approx_pcnt - expected_apcnt) <= 1e-9:
            verdict.violations.append(
                Violation("range", y, "approx_pcnt inconsistent with (esup, var)")
            )
    return verdict


def render_verdict(verdict: Verdict) -> str:
    lines = []
    rejected = set(verdict.rejected)
    for report in verdict.reports:
        decision = "REJECT" if report.checkset in rejected else "ACCEPT"
        lines.append(
            f"checkset={','.join(report.checkset)} scheme={verdict.scheme.value} "
            f"owner={report.owner_value:.17g} claim={report.claim_value:.17g} "
            f"residual={report.residual:.17g} decision={decision}"
        )
    for violation in verdict.violations:
        lines.append(
            f"violation kind={violation.kind} subject={','.join(violation.subject)} "
            f"detail={violation.detail!r}"
        )
    lines.append(
        f"RESULT {verdict.decision} checked={len(verdict.reports)} "
        f"rejected={len(rejected)}"
    )
    return "\n".join(lines) + "\n"
