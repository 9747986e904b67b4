"""Command-line front end: gen / mine / prove / verify / experiment."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .checkers import Scheme
from .datamodel import (
    FormatError,
    GuardExceeded,
    generate_synthetic,
    parse_database,
    parse_itemset,
    serialize_database,
)
from .experiment import format_csv, format_table, parse_config, run_experiment
from .mining import MiningQuery, Mode, maximal_checksets, mine
from .prover import Adversary, AdversaryModel, prove
from .verifier import (
    TOL_REL,
    generate_weights,
    render_verdict,
    verify_approx,
    verify_deterministic,
    verify_expected,
    verify_pws,
)
from .wire import parse_claims, write_claims

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_REJECT = 2
EXIT_GUARD = 3

_MODES = {"det": Mode.DETERMINISTIC, "expected": Mode.EXPECTED, "pws": Mode.PWS, "approx": Mode.APPROX}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 1, not argparse's 2
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ufiaudit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic UDB v1 file")
    gen.add_argument("--txns", type=int, required=True)
    gen.add_argument("--items", type=int, required=True)
    gen.add_argument("--density", type=float, required=True)
    gen.add_argument("--plo", type=float, required=True)
    gen.add_argument("--phi", type=float, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True)

    def _mining_args(p, with_adversary: bool):
        p.add_argument("--db", required=True)
        p.add_argument("--mode", choices=sorted(_MODES), required=True)
        p.add_argument("--minsup", type=float, required=True)
        p.add_argument("--pft", type=float, default=None)
        p.add_argument("--out", required=True)
        if with_adversary:
            p.add_argument(
                "--adversary",
                choices=[a.value for a in Adversary],
                default="honest",
            )
            p.add_argument("--magnitude", type=float, default=0.05)
            p.add_argument("--seed", type=int, default=0)
        else:
            p.add_argument("--checksets", default="auto")

    mine_p = sub.add_parser("mine", help="honest local mining to a CLAIMS v1 file")
    _mining_args(mine_p, with_adversary=False)
    prove_p = sub.add_parser("prove", help="mining claims under a chosen adversary")
    _mining_args(prove_p, with_adversary=True)

    verify_p = sub.add_parser("verify", help="verify a CLAIMS v1 file against a database")
    verify_p.add_argument("--db", required=True)
    verify_p.add_argument("--claims", required=True)
    verify_p.add_argument(
        "--scheme",
        choices=["basic", "det-weighted", "exp-w1", "exp-w2", "pws-paper", "pws-exact", "approx"],
        required=True,
    )
    verify_p.add_argument("--seed", type=int, default=0)
    verify_p.add_argument("--tolerance", type=float, default=TOL_REL)

    exp_p = sub.add_parser("experiment", help="run the detection-rate trial grid")
    exp_p.add_argument("--config", required=True)
    return parser


def _query(args) -> MiningQuery:
    return MiningQuery(_MODES[args.mode], args.minsup, args.pft)


def _checksets_for(db, query, spec_text: str):
    if spec_text == "auto":
        return maximal_checksets(mine(db, query))
    return [parse_itemset(token) for token in spec_text.split(";") if token]


def _cmd_gen(args) -> int:
    db = generate_synthetic(args.txns, args.items, args.density, (args.plo, args.phi), args.seed)
    Path(args.out).write_text(serialize_database(db))
    return EXIT_OK


def _cmd_mine(args) -> int:
    db = parse_database(Path(args.db).read_text())
    query = _query(args)
    checksets = _checksets_for(db, query, args.checksets)
    resp = prove(db, query, checksets)
    Path(args.out).write_text(write_claims(resp))
    return EXIT_OK


def _cmd_prove(args) -> int:
    db = parse_database(Path(args.db).read_text())
    query = _query(args)
    checksets = maximal_checksets(mine(db, query))
    adversary = AdversaryModel(Adversary(args.adversary), args.magnitude, args.seed)
    resp = prove(db, query, checksets, adversary)
    Path(args.out).write_text(write_claims(resp))
    return EXIT_OK


def _cmd_verify(args) -> int:
    db = parse_database(Path(args.db).read_text())
    resp = parse_claims(Path(args.claims).read_text())
    checksets = maximal_checksets(list(resp.claims))
    rel = args.tolerance
    tag = args.scheme
    if tag == "basic":
        tag = "det-basic" if resp.mode is Mode.DETERMINISTIC else "exp-basic"
    scheme = Scheme(tag)
    if scheme in (Scheme.DET_BASIC, Scheme.DET_WEIGHTED):
        w = generate_weights(db, scheme, args.seed) if scheme is Scheme.DET_WEIGHTED else None
        verdict = verify_deterministic(db, resp, checksets, w)
    elif scheme in (Scheme.EXP_BASIC, Scheme.EXP_SCHEME1, Scheme.EXP_SCHEME2):
        if resp.mode is Mode.APPROX:
            verdict = verify_approx(db, resp, checksets, resp.delta, scheme, args.seed, rel)
        elif resp.mode is Mode.EXPECTED:
            w = None
            if scheme is not Scheme.EXP_BASIC:
                w = generate_weights(db, scheme, args.seed)
            verdict = verify_expected(db, resp, checksets, scheme, w, rel)
        else:
            raise _UsageError(f"scheme {args.scheme} incompatible with mode {resp.mode.value}")
    elif scheme in (Scheme.PWS_PAPER, Scheme.PWS_EXACT):
        if resp.mode is not Mode.PWS:
            raise _UsageError(f"scheme {args.scheme} requires pws claims")
        verdict = verify_pws(db, resp, checksets, resp.delta, scheme, rel)
    else:  # approx
        if resp.mode is not Mode.APPROX:
            raise _UsageError("scheme approx requires approx claims")
        verdict = verify_approx(db, resp, checksets, resp.delta, Scheme.EXP_SCHEME2, args.seed, rel)
    sys.stdout.write(render_verdict(verdict))
    return EXIT_OK if verdict.accepted else EXIT_REJECT


def _cmd_experiment(args) -> int:
    cfg = parse_config(Path(args.config).read_text())
    results = run_experiment(cfg)
    sys.stdout.write(format_table(results))
    csv_path = Path(args.config).with_suffix(".results.csv")
    csv_path.write_text(format_csv(results))
    sys.stdout.write(f"csv written to {csv_path}\n")
    return EXIT_OK


_COMMANDS = {
    "gen": _cmd_gen,
    "mine": _cmd_mine,
    "prove": _cmd_prove,
    "verify": _cmd_verify,
    "experiment": _cmd_experiment,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GuardExceeded as exc:
        print(f"guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    raise SystemExit(main())
