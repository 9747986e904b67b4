import subprocess
import sys

import pytest

import ufiaudit as u
from ufiaudit.datamodel import FormatError
from ufiaudit.prover import Adversary, AdversaryModel, prove
from ufiaudit.wire import parse_claims, write_claims


def _resp(db, mode, ratio, checksets, pft=None, adv=None):
    q = u.MiningQuery(mode=mode, min_sup_ratio=ratio, pft=pft)
    return prove(db, q, checksets, adv or AdversaryModel(Adversary.HONEST))


class TestWireRoundTrip:
    @pytest.mark.parametrize(
        "mode,ratio,pft",
        [
            (u.Mode.DETERMINISTIC, 0.4, None),
            (u.Mode.EXPECTED, 0.25, None),
            (u.Mode.APPROX, 0.5, 0.2),
        ],
    )
    def test_scalar_modes(self, paper_db, det_db, mode, ratio, pft):
        db = det_db if mode is u.Mode.DETERMINISTIC else paper_db
        checksets = [("B", "C")] if mode is u.Mode.DETERMINISTIC else [("A", "B")]
        resp = _resp(db, mode, ratio, checksets, pft=pft)
        back = parse_claims(write_claims(resp))
        assert back.mode is resp.mode
        assert back.min_sup_ratio == resp.min_sup_ratio
        assert back.pft == resp.pft
        assert back.delta == resp.delta
        assert back.claims == resp.claims

    def test_pws_with_side_data(self, paper_db):
        resp = _resp(paper_db, u.Mode.PWS, 0.9, [("A", "B")], pft=0.05)
        back = parse_claims(write_claims(resp))
        assert back.claims == resp.claims
        side, bside = resp.side[("A", "B")], back.side[("A", "B")]
        assert bside.lambda_ == side.lambda_
        assert bside.rho == side.rho
        assert bside.joint_tails == side.joint_tails

    def test_floats_bit_exact(self, paper_db):
        resp = _resp(paper_db, u.Mode.EXPECTED, 1.0 / 3.0, [("A", "B")])
        text = write_claims(resp)
        assert parse_claims(text).min_sup_ratio == 1.0 / 3.0
        assert write_claims(parse_claims(text)) == text

    def test_header_required(self):
        with pytest.raises(FormatError):
            parse_claims("A\tesup=1\n")

    def test_bad_record_line(self, paper_db):
        resp = _resp(paper_db, u.Mode.EXPECTED, 0.25, [("A",)])
        text = write_claims(resp) + "B;esup\n"
        with pytest.raises(FormatError, match="line"):
            parse_claims(text)


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "ufiaudit.cli", *args],
        capture_output=True,
        text=True,
    )


@pytest.fixture()
def workdir(tmp_path):
    gen = run_cli(
        "gen", "--txns", "20", "--items", "4", "--density", "0.6",
        "--plo", "0.2", "--phi", "0.95", "--seed", "11",
        "--out", str(tmp_path / "db.udb"),
    )
    assert gen.returncode == 0, gen.stderr
    return tmp_path


class TestCli:
    def test_gen_deterministic_bytes(self, tmp_path):
        args = (
            "gen", "--txns", "10", "--items", "3", "--density", "0.5",
            "--plo", "0.1", "--phi", "0.9", "--seed", "3",
        )
        run_cli(*args, "--out", str(tmp_path / "a.udb"))
        run_cli(*args, "--out", str(tmp_path / "b.udb"))
        assert (tmp_path / "a.udb").read_bytes() == (tmp_path / "b.udb").read_bytes()

    def test_mine_then_verify_accepts(self, workdir):
        claims = workdir / "claims.txt"
        mine = run_cli(
            "mine", "--db", str(workdir / "db.udb"), "--mode", "expected",
            "--minsup", "0.3", "--out", str(claims),
        )
        assert mine.returncode == 0, mine.stderr
        verify = run_cli(
            "verify", "--db", str(workdir / "db.udb"), "--claims", str(claims),
            "--scheme", "exp-w2", "--seed", "5",
        )
        assert verify.returncode == 0, verify.stdout + verify.stderr
        assert "RESULT ACCEPT" in verify.stdout

    def test_prove_tampered_verify_rejects(self, workdir):
        claims = workdir / "claims.txt"
        prove_run = run_cli(
            "prove", "--db", str(workdir / "db.udb"), "--mode", "expected",
            "--minsup", "0.3", "--adversary", "stupid", "--magnitude", "0.5",
            "--seed", "1", "--out", str(claims),
        )
        assert prove_run.returncode == 0, prove_run.stderr
        verify = run_cli(
            "verify", "--db", str(workdir / "db.udb"), "--claims", str(claims),
            "--scheme", "basic",
        )
        assert verify.returncode == 2
        assert "RESULT REJECT" in verify.stdout

    def test_usage_error_exit_1(self):
        assert run_cli("mine", "--mode", "expected").returncode == 1

    def test_parse_error_exit_1(self, tmp_path):
        bad = tmp_path / "bad.udb"
        bad.write_text("A:2.5\n")
        out = run_cli(
            "mine", "--db", str(bad), "--mode", "expected",
            "--minsup", "0.3", "--out", str(tmp_path / "c.txt"),
        )
        assert out.returncode == 1

    def test_pws_paper_regression_exit_2(self, tmp_path):
        db = tmp_path / "two.udb"
        db.write_text("A:0.5 B:0.6\nA:0.4 B:0.5\n")
        claims = tmp_path / "claims.txt"
        mine = run_cli(
            "mine", "--db", str(db), "--mode", "pws", "--minsup", "0.5",
            "--pft", "0.3", "--out", str(claims),
        )
        assert mine.returncode == 0, mine.stderr
        paper = run_cli(
            "verify", "--db", str(db), "--claims", str(claims),
            "--scheme", "pws-paper",
        )
        assert paper.returncode == 2
        exact = run_cli(
            "verify", "--db", str(db), "--claims", str(claims),
            "--scheme", "pws-exact",
        )
        assert exact.returncode == 0, exact.stdout + exact.stderr
