import math

import numpy as np
import pytest

import ufiaudit as u
from ufiaudit.datamodel import GuardExceeded
from ufiaudit.prover import (
    Adversary,
    AdversaryModel,
    joint_box_dp,
    joint_tail,
    lambda_value,
    prove,
    reset_dp_ops,
)

import oracle
from conftest import random_small_db


class TestJointGolden:
    def test_box_paper(self, paper_db):
        assert joint_box_dp(paper_db, ("A", "B"), 2) == pytest.approx(0.56)

    def test_lambda_paper(self, paper_db):
        assert lambda_value(paper_db, ("A", "B"), 2) == pytest.approx(0.25)

    def test_lambda_zero_at_delta_one(self, paper_db):
        assert lambda_value(paper_db, ("A", "B"), 1) == 0.0

    def test_joint_tail_paper(self, paper_db):
        # Pr[sup(A) >= 2] = 0.2, Pr[sup(B) >= 2] = 0.3, independent product.
        got = joint_tail(paper_db, ("A", "B"), 2)
        assert got == pytest.approx(0.06)

    def test_guard(self, paper_db):
        db = u.generate_synthetic(4, 6, 1.0, (0.3, 0.9), seed=7)
        with pytest.raises(GuardExceeded):
            joint_box_dp(db, tuple(db.item_universe[:5]), 2)


class TestJointInvariants:
    def test_box_factorizes(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            db = random_small_db(rng)
            items = db.item_universe
            if len(items) < 2:
                continue
            x = tuple(items[:2])
            for delta in (1, 2, 3):
                box = joint_box_dp(db, x, delta)
                prod = math.prod(u.p_less_dp(db, (i,), delta) for i in x)
                assert box == pytest.approx(prod, abs=1e-12)

    def test_against_oracle(self):
        rng = np.random.default_rng(12)
        for _ in range(25):
            db = random_small_db(rng)
            items = db.item_universe
            if len(items) < 2:
                continue
            x = tuple(items[:2])
            delta = int(rng.integers(1, db.n + 1))
            assert joint_box_dp(db, x, delta) == pytest.approx(
                oracle.joint_prob(db, x, 0, delta - 1), abs=1e-12
            )
            assert lambda_value(db, x, delta) == pytest.approx(
                oracle.joint_prob(db, x, 1, delta - 1), abs=1e-12
            )
            assert joint_tail(db, x, delta) == pytest.approx(
                oracle.joint_tail(db, x, delta), abs=1e-12
            )

    def test_rho_at_least_lambda(self, paper_db):
        box = joint_box_dp(paper_db, ("A", "B"), 2)
        lam = lambda_value(paper_db, ("A", "B"), 2)
        allzero = u.all_zero_probability(paper_db, ("A", "B"))
        rho = box - allzero
        assert rho >= lam >= 0.0
        assert lam + allzero <= box + 1e-12

    def test_ops_counter_moves(self, paper_db):
        import ufiaudit.prover as pv

        reset_dp_ops()
        assert pv.dp_transition_ops == 0
        joint_box_dp(paper_db, ("A", "B"), 2)
        assert pv.dp_transition_ops > 0


def _query(mode, ratio, pft=None):
    return u.MiningQuery(mode=mode, min_sup_ratio=ratio, pft=pft)


class TestProveHonest:
    def test_det_claims(self, det_db):
        q = _query(u.Mode.DETERMINISTIC, 0.4)
        resp = prove(det_db, q, [("B", "C")], AdversaryModel(Adversary.HONEST))
        assert resp.claims == {("B",): 3.0, ("C",): 2.0, ("B", "C"): 1.0}
        assert not resp.tampered
        assert resp.delta == 2

    def test_pws_side_data(self, paper_db):
        q = _query(u.Mode.PWS, 0.9, pft=0.05)  # delta = ceil(2 * 0.9) = 2
        resp = prove(paper_db, q, [("A", "B")], AdversaryModel(Adversary.HONEST))
        side = resp.side[("A", "B")]
        assert side.lambda_ == pytest.approx(0.25)
        assert side.rho == pytest.approx(0.56 - 0.06)
        assert side.joint_tails[("A", "B")] == pytest.approx(0.06)
        assert resp.claims[("A", "B")] == pytest.approx(0.06)

    def test_without_side(self, paper_db):
        q = _query(u.Mode.PWS, 0.5, pft=0.3)
        resp = prove(
            paper_db, q, [("A", "B")], AdversaryModel(Adversary.HONEST), with_side=False
        )
        assert resp.side == {}

    def test_deterministic_reproducible(self, paper_db):
        q = _query(u.Mode.EXPECTED, 0.25)
        adv = AdversaryModel(Adversary.RANDOM_FAULT, magnitude=0.2, seed=99)
        a = prove(paper_db, q, [("A", "B")], adv)
        b = prove(paper_db, q, [("A", "B")], adv)
        assert a.claims == b.claims


class TestAdversaries:
    def test_random_fault_flags_tamper(self, paper_db):
        q = _query(u.Mode.EXPECTED, 0.25)
        tampered_seen = False
        for seed in range(10):
            adv = AdversaryModel(Adversary.RANDOM_FAULT, magnitude=0.3, seed=seed)
            resp = prove(paper_db, q, [("A", "B")], adv)
            honest = prove(paper_db, q, [("A", "B")], AdversaryModel(Adversary.HONEST))
            changed = any(
                resp.claims[y] != honest.claims[y] for y in honest.claims
            )
            assert resp.tampered == changed
            tampered_seen = tampered_seen or changed
        assert tampered_seen

    def test_lazy_full_prefix_is_honest(self, paper_db):
        q = _query(u.Mode.EXPECTED, 0.25)
        resp = prove(
            paper_db, q, [("A", "B")], AdversaryModel(Adversary.LAZY, magnitude=1.0)
        )
        honest = prove(paper_db, q, [("A", "B")], AdversaryModel(Adversary.HONEST))
        for y, v in honest.claims.items():
            assert resp.claims[y] == pytest.approx(v)
        assert not resp.tampered

    def test_lazy_half(self):
        db = u.parse_database("A:0.5\nA:0.9\n")
        q = _query(u.Mode.EXPECTED, 0.1)
        resp = prove(db, q, [("A",)], AdversaryModel(Adversary.LAZY, magnitude=0.5))
        # first txn only, rescaled by 1/0.5
        assert resp.claims[("A",)] == pytest.approx(1.0)
        assert resp.tampered

    def test_stupid_hits_largest_checkset(self, det_db):
        q = _query(u.Mode.DETERMINISTIC, 0.4)
        adv = AdversaryModel(Adversary.STUPID, magnitude=1.0)
        resp = prove(det_db, q, [("B", "C"), ("A",)], adv)
        honest = prove(det_db, q, [("B", "C"), ("A",)], AdversaryModel(Adversary.HONEST))
        for y in (("B",), ("C",), ("B", "C")):
            assert resp.claims[y] == honest.claims[y] + 1.0
        assert resp.claims[("A",)] == honest.claims[("A",)]
        assert resp.tampered

    def test_smart_additive_structure(self, det_db):
        q = _query(u.Mode.DETERMINISTIC, 0.4)
        adv = AdversaryModel(Adversary.SMART, magnitude=0.5, seed=3)
        resp = prove(det_db, q, [("B", "C")], adv)
        honest = prove(det_db, q, [("B", "C")], AdversaryModel(Adversary.HONEST))
        eps = {
            i: resp.claims[(i,)] - honest.claims[(i,)] for i in ("B", "C")
        }
        assert all(e > 0 for e in eps.values())
        assert resp.claims[("B", "C")] - honest.claims[("B", "C")] == pytest.approx(
            eps["B"] + eps["C"]
        )
        assert resp.tampered

    def test_smart_cancels_in_basic_combination(self, det_db):
        from ufiaudit.checkers import Scheme

        q = _query(u.Mode.DETERMINISTIC, 0.4)
        adv = AdversaryModel(Adversary.SMART, magnitude=0.5, seed=4)
        resp = prove(det_db, q, [("B", "C")], adv)
        combined = u.incl_excl_combine(resp.claims, ("B", "C"), Scheme.DET_BASIC)
        owner = u.checker_scan(det_db, ("B", "C"), Scheme.DET_BASIC)
        assert combined == pytest.approx(owner)

    def test_magnitude_validation(self):
        with pytest.raises(ValueError):
            AdversaryModel(Adversary.LAZY, magnitude=0.0)
        with pytest.raises(ValueError):
            AdversaryModel(Adversary.LAZY, magnitude=1.5)


class TestApproxProver:
    def test_honest_claims_match_mining(self, paper_db):
        q = _query(u.Mode.APPROX, 0.5, pft=0.2)
        resp = prove(paper_db, q, [("A", "B")], AdversaryModel(Adversary.HONEST))
        for y, stats in resp.claims.items():
            assert stats.esup == pytest.approx(u.expected_support(paper_db, y))
            assert stats.variance == pytest.approx(u.variance(paper_db, y))
            assert stats.approx_pcnt == pytest.approx(
                u.normal_approx_frequentness(
                    u.NormalModel(stats.esup, stats.variance), resp.delta
                )
            )

    def test_smart_recomputes_apcnt(self, paper_db):
        q = _query(u.Mode.APPROX, 0.5, pft=0.2)
        adv = AdversaryModel(Adversary.SMART, magnitude=0.4, seed=8)
        resp = prove(paper_db, q, [("A", "B")], adv)
        honest = prove(paper_db, q, [("A", "B")], AdversaryModel(Adversary.HONEST))
        y = ("A",)
        assert resp.claims[y].esup != honest.claims[y].esup
        assert resp.claims[y].approx_pcnt == pytest.approx(
            u.normal_approx_frequentness(
                u.NormalModel(resp.claims[y].esup, resp.claims[y].variance),
                resp.delta,
            )
        )
