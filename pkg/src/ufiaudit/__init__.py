"""Uncertain frequent itemset mining with result-integrity auditing.

A library and CLI that mines frequent itemsets over uncertain transaction
databases (expected-support and possible-world semantics), simulates an
untrusted prover returning mining claims, and verifies those claims with
one-scan count checkers, inclusion-exclusion combinations, and private
random-weight hardening.
"""
from .checkers import (
    CheckerReport,
    Scheme,
    all_zero_probability,
    checker_scan,
    consistency_bounds,
    incl_excl_combine,
)
from .datamodel import (
    FormatError,
    GuardExceeded,
    Itemset,
    UncertainDatabase,
    WeightAssignment,
    WeightScheme,
    format_itemset,
    generate_synthetic,
    itemset,
    itemset_txn_prob,
    parse_database,
    parse_itemset,
    scale_transform,
    serialize_database,
    squared_transform,
)
from .mining import (
    ApproxStats,
    MiningQuery,
    MiningResult,
    Mode,
    NormalModel,
    PossibleWorld,
    enumerate_worlds,
    expected_support,
    frequentness_probability,
    maximal_checksets,
    mine,
    normal_approx_frequentness,
    p_less_dp,
    support_distribution,
    variance,
)
from .prover import (
    Adversary,
    AdversaryModel,
    ProverResponse,
    SideData,
    joint_box_dp,
    joint_tail,
    lambda_value,
    prove,
)
from .verifier import (
    Verdict,
    generate_weights,
    render_verdict,
    verify_approx,
    verify_deterministic,
    verify_expected,
    verify_pws,
)
from .wire import parse_claims, write_claims

__version__ = "0.1.0"
