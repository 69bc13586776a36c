"""Command-line front end.

Verbs: verify-nash, solve-nash, verify-split, solve-split, audit, cdp-check,
kkm-probe, bertrand-enumerate. Reports go to stdout as text or JSON and
optionally to a file as JSON; identical command, flags, and seed produce
byte-identical JSON when --deterministic is set.

Exit codes: 0 success / verdict true / nonempty result; 1 verdict false,
empty result, or unexpected oracle mismatch; 2 input error; 3 a documented
source-claim discrepancy was confirmed (distinct from failure).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import bertrand as bt
from .game import Game, nash_regrets, solve_nash, verify_nash
from .kernel import Interval, SearchBudget
from .models import NamedInstance, get_instance
from .split import (
    LinearOperator,
    SplitProblem,
    cdp_sample_check,
    kkm_intersection_probe,
    solve_split,
    verify_split_equilibrium,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_DISCREPANCY = 3


class InputError(Exception):
    pass


def _budget(args) -> SearchBudget:
    return SearchBudget(
        grid_step=args.grid_step,
        max_iterations=args.budget_iters,
        truncation_cap=args.cap,
        tolerance=args.tol,
        seed=args.seed,
    )


def _parse_profile(text: str) -> np.ndarray:
    parts = [p.strip() for p in text.split(",")]
    try:
        vals = [float(p) for p in parts]
    except ValueError as exc:
        raise InputError(f"malformed profile {text!r}: {exc}") from None
    return np.array(vals)


def load_game_spec(data: dict) -> Game:
    try:
        players = data["players"]
        sets = data["strategy_sets"]
        utilities = data["utilities"]
    except KeyError as exc:
        raise InputError(f"game spec missing field {exc}") from None
    if not (len(players) == len(sets) == len(utilities)):
        raise InputError("players, strategy_sets, utilities must have equal length")
    intervals = []
    for s in sets:
        hi = s.get("hi")
        intervals.append(Interval(float(s["lo"]), math.inf if hi is None else float(hi)))
    try:
        return Game.from_expressions(players, intervals, utilities)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def load_split_spec(data: dict) -> SplitProblem:
    try:
        game_n = load_game_spec(data["game_n"])
        game_m = load_game_spec(data["game_m"])
        matrix = np.asarray(data["matrix"], dtype=float)
    except KeyError as exc:
        raise InputError(f"split spec missing field {exc}") from None
    try:
        return SplitProblem(game_n=game_n, game_m=game_m, operator=LinearOperator(matrix))
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _load_json(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise InputError(f"no such file: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc}") from None


def resolve_game(target: str) -> Game:
    try:
        inst = get_instance(target)
    except KeyError:
        data = _load_json(target)
        return load_game_spec(data)
    if inst.kind != "game":
        raise InputError(f"builtin {target!r} is not a plain game (kind={inst.kind})")
    return inst.problem


def resolve_split(target: str) -> SplitProblem:
    try:
        inst = get_instance(target)
    except KeyError:
        data = _load_json(target)
        return load_split_spec(data)
    if inst.kind != "split":
        raise InputError(f"builtin {target!r} is not a split problem (kind={inst.kind})")
    return inst.problem


def _json_default(value):
    """Coerce numpy scalars/arrays so reports always serialize."""
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


class Report:
    def __init__(self, command: str, instance: str | None, args):
        self.command = command
        self.instance = instance
        self.args = args
        self.verdict: bool | None = None
        self.results: dict = {}
        self.discrepancies: list[str] = []
        self._t0 = time.perf_counter()

    def to_dict(self) -> dict:
        d = {
            "schema_version": 1,
            "command": self.command,
            "instance": self.instance,
            "budget": {
                "tolerance": self.args.tol,
                "grid_step": self.args.grid_step,
                "max_iterations": self.args.budget_iters,
                "truncation_cap": self.args.cap,
                "seed": self.args.seed,
                "samples": self.args.samples,
                "range": self.args.range,
            },
            "verdict": self.verdict,
            "tolerance": self.args.tol,
            "results": self.results,
            "discrepancies": self.discrepancies,
        }
        if not self.args.deterministic:
            d["duration_sec"] = time.perf_counter() - self._t0
        return d

    def emit(self) -> None:
        doc = self.to_dict()
        text = json.dumps(doc, indent=2, sort_keys=True, default=_json_default)
        if self.args.out:
            Path(self.args.out).write_text(text + "\n")
        if self.args.format == "json":
            print(text)
        else:
            self._emit_text(doc)

    def _emit_text(self, doc: dict) -> None:
        print(f"command:  {doc['command']}")
        print(f"instance: {doc['instance']}")
        print(f"verdict:  {doc['verdict']} (tolerance {doc['tolerance']:g})")
        for key, value in doc["results"].items():
            print(f"{key}: {json.dumps(value, sort_keys=True, default=_json_default)}")
        for note in doc["discrepancies"]:
            print(f"discrepancy: {note}")


# --- verbs -------------------------------------------------------------------


def cmd_verify_nash(args) -> int:
    game = resolve_game(args.target)
    x = _parse_profile(args.profile)
    if not game.is_feasible(x, slack=1e-12):
        raise InputError(f"profile {x.tolist()} infeasible for {args.target}")
    rep = Report("verify-nash", args.target, args)
    vr = verify_nash(game, x, _budget(args))
    rep.verdict = vr.verdict
    rep.results = {"profile": list(map(float, x)), "verification": vr.to_dict()}
    rep.emit()
    return EXIT_OK if vr.verdict else EXIT_FAIL


def cmd_solve_nash(args) -> int:
    game = resolve_game(args.target)
    rep = Report("solve-nash", args.target, args)
    sols = solve_nash(game, _budget(args))
    rep.verdict = bool(sols)
    rep.results = {"equilibria": [list(map(float, s)) for s in sols]}
    rep.emit()
    return EXIT_OK if sols else EXIT_FAIL


def cmd_verify_split(args) -> int:
    problem = resolve_split(args.target)
    x = _parse_profile(args.profile)
    if not problem.game_n.is_feasible(x, slack=1e-12):
        raise InputError(f"profile {x.tolist()} infeasible for {args.target}")
    rep = Report("verify-split", args.target, args)
    vr = verify_split_equilibrium(problem, x, _budget(args))
    rep.verdict = vr.verdict
    rep.results = {
        "profile": list(map(float, x)),
        "verification": vr.to_dict(),
        "relatedness": problem.relatedness.to_dict(),
    }
    rep.emit()
    return EXIT_OK if vr.verdict else EXIT_FAIL


def cmd_solve_split(args) -> int:
    problem = resolve_split(args.target)
    rep = Report("solve-split", args.target, args)
    sols = solve_split(problem, _budget(args))
    rep.verdict = bool(sols)
    rep.results = {
        "split_equilibria": [list(map(float, s)) for s in sols],
        "relatedness": problem.relatedness.to_dict(),
    }
    rep.emit()
    return EXIT_OK if sols else EXIT_FAIL


def cmd_cdp_check(args) -> int:
    problem = resolve_split(args.target)
    rep = Report("cdp-check", args.target, args)
    report = cdp_sample_check(
        problem, args.samples, seed=args.seed, tolerance=args.tol, cap=args.cap
    )
    ok = not report.min_dominance_failures
    rep.verdict = ok
    rep.results = {"cdp": report.to_dict()}
    rep.emit()
    return EXIT_OK if ok else EXIT_FAIL


def cmd_kkm_probe(args) -> int:
    problem = resolve_split(args.target)
    rep = Report("kkm-probe", args.target, args)
    result = kkm_intersection_probe(
        problem, _budget(args), points_per_axis=args.points_per_axis
    )
    ok = bool(result.members) and all(result.verified)
    rep.verdict = ok
    rep.results = {"probe": result.to_dict()}
    rep.emit()
    return EXIT_OK if ok else EXIT_FAIL


def cmd_bertrand_enumerate(args) -> int:
    inst = get_instance(args.target) if not args.target.endswith(".json") else None
    if inst is None or inst.kind != "bertrand":
        raise InputError(f"{args.target!r} is not a builtin duopoly instance")
    model = inst.problem
    rep = Report("bertrand-enumerate", args.target, args)
    hi = args.range if args.range is not None else model.default_price_range()
    eqs = bt.enumerate_grid_equilibria(model, args.grid_step, hi, tolerance=args.tol)
    rep.verdict = bool(eqs)
    rep.results = {
        "grid_step": args.grid_step,
        "price_range": hi,
        "equilibria": [[p1, p2] for p1, p2 in eqs],
    }
    rep.emit()
    return EXIT_OK if eqs else EXIT_FAIL


# --- audits ------------------------------------------------------------------


def _audit_example_4_1(args, rep: Report) -> int:
    inst = get_instance("example-4.1")
    problem: SplitProblem = inst.problem
    budget = _budget(args)
    x = np.array([1.0, 2.0, 4.0])
    image = problem.image(x)
    regrets_n = nash_regrets(problem.game_n, x, budget)
    regrets_m = nash_regrets(problem.game_m, image, budget)
    c_expected = 3.0 - 2.0 * math.sqrt(2.0)

    rep.results = {
        "profile": list(x),
        "image": list(map(float, image)),
        "source_regrets": list(map(float, regrets_n)),
        "target_regrets": list(map(float, regrets_m)),
        "player_c_regret_oracle": c_expected,
        "relatedness": problem.relatedness.to_dict(),
    }
    if not np.allclose(image, [9.0, 12.0], atol=1e-12):
        rep.verdict = False
        rep.results["failure"] = "operator image of (1,2,4) is not (9,12)"
        return EXIT_FAIL
    if max(regrets_m) > args.tol or max(regrets_n[:2]) > args.tol:
        rep.verdict = False
        rep.results["failure"] = "unexpected regret where the oracle predicts zero"
        return EXIT_FAIL
    if abs(regrets_n[2] - c_expected) > 1e-4:
        rep.verdict = False
        rep.results["failure"] = "player c regret does not match the analytic oracle"
        return EXIT_FAIL
    rep.verdict = False  # the claimed profile is not a split equilibrium
    rep.discrepancies.append(
        "source claims (1,2,4) is an equilibrium, but player c improves by "
        f"deviating to z = x*y = 2 (regret {regrets_n[2]:.6f} = 3 - 2*sqrt(2))"
    )
    return EXIT_DISCREPANCY


def _audit_bertrand(args, rep: Report) -> int:
    model = get_instance("bertrand-1-2").problem
    hi = args.range if args.range is not None else 5.0
    eqs = bt.enumerate_grid_equilibria(model, args.grid_step, hi, tolerance=args.tol)
    cost_point = next(
        (e for e in eqs if abs(e[0] - model.c1) < 1e-9 and abs(e[1] - model.c2) < 1e-9), None
    )
    band = 3.0 * args.grid_step
    within = all(
        max(abs(p1 - model.c1), abs(p2 - model.c2)) <= band + 1e-12 for p1, p2 in eqs
    )
    rep.results = {
        "grid_step": args.grid_step,
        "price_range": hi,
        "equilibria": [[p1, p2] for p1, p2 in eqs],
        "contains_cost_point": cost_point is not None,
        "profits_at_costs": list(bt.profits(model, model.c1, model.c2)),
        "all_within_band": within,
        "band": band,
    }
    ok = cost_point is not None and within and bt.profits(model, model.c1, model.c2) == (0.0, 0.0)
    rep.verdict = ok
    return EXIT_OK if ok else EXIT_FAIL


def _audit_thm_6_2(args, rep: Report) -> int:
    if args.diagonal_only:
        pairs = [(t, t) for t in np.linspace(0.0, 1.0, 5)]
    else:
        axis = np.linspace(0.0, 1.0, 5)
        pairs = [(a, b) for a in axis for b in axis]
    out = {}
    any_claim_disagreement = False
    all_oracle = True
    for ident in ("bertrand-1-1", "bertrand-1-2"):
        model = get_instance(ident).problem
        report = bt.audit_theorem_6_2(
            model, pairs, grid_step=args.grid_step, price_range=args.range, tolerance=args.tol
        )
        out[ident] = report.to_dict()
        all_oracle = all_oracle and report.all_match_oracle
        for row in report.claim_discrepancies:
            any_claim_disagreement = True
            rep.discrepancies.append(
                f"{ident}: claim predicts {row.stated_claim} at alpha={row.alpha:g}, "
                f"beta={row.beta:g}, grid verdict is {row.verdict} "
                f"(transform fixes costs: {row.oracle})"
            )
    rep.results = {"audits": out, "all_match_oracle": all_oracle}
    rep.verdict = all_oracle
    if not all_oracle:
        return EXIT_FAIL
    return EXIT_DISCREPANCY if any_claim_disagreement else EXIT_OK


def _audit_cdp(args, rep: Report) -> int:
    out = {}
    ok = True
    for ident in ("quadratic-sanity", "example-4.1"):
        problem = get_instance(ident).problem
        report = cdp_sample_check(
            problem, args.samples, seed=args.seed, tolerance=args.tol, cap=args.cap
        )
        out[ident] = report.to_dict()
        ok = ok and not report.min_dominance_failures
    rep.results = {"cdp": out}
    rep.verdict = ok
    return EXIT_OK if ok else EXIT_FAIL


def _audit_kkm(args, rep: Report) -> int:
    problem = get_instance("quadratic-sanity").problem
    result = kkm_intersection_probe(
        problem, _budget(args), points_per_axis=args.points_per_axis
    )
    ok = bool(result.members) and all(result.verified)
    rep.results = {"probe": result.to_dict()}
    rep.verdict = ok
    return EXIT_OK if ok else EXIT_FAIL


AUDITS = {
    "example-4.1": _audit_example_4_1,
    "bertrand": _audit_bertrand,
    "thm-6.2": _audit_thm_6_2,
    "cdp": _audit_cdp,
    "kkm": _audit_kkm,
}


def cmd_audit(args) -> int:
    if args.target not in AUDITS:
        raise InputError(f"unknown audit {args.target!r}; known: {sorted(AUDITS)}")
    rep = Report("audit", args.target, args)
    code = AUDITS[args.target](args, rep)
    rep.emit()
    return code


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitnash",
        description="Verify, solve, and audit split Nash equilibrium problems.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--tol", type=float, default=1e-6)
        p.add_argument("--grid-step", type=float, default=1e-2, dest="grid_step")
        p.add_argument("--samples", type=int, default=1000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget-iters", type=int, default=500, dest="budget_iters")
        p.add_argument("--cap", type=float, default=1e3)
        p.add_argument("--range", type=float, default=None)
        p.add_argument("--points-per-axis", type=int, default=8, dest="points_per_axis")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--deterministic", action="store_true")

    p = sub.add_parser("verify-nash", help="check a profile for Nash equilibrium")
    p.add_argument("target", help="builtin game id or game spec JSON file")
    p.add_argument("--profile", required=True, help="comma-separated strategy values")
    common(p)
    p.set_defaults(func=cmd_verify_nash)

    p = sub.add_parser("solve-nash", help="multistart best-response search")
    p.add_argument("target")
    common(p)
    p.set_defaults(func=cmd_solve_nash)

    p = sub.add_parser("verify-split", help="check a profile and its operator image")
    p.add_argument("target", help="builtin split id or split spec JSON file")
    p.add_argument("--profile", required=True)
    common(p)
    p.set_defaults(func=cmd_verify_split)

    p = sub.add_parser("solve-split", help="solve the split equilibrium problem")
    p.add_argument("target")
    common(p)
    p.set_defaults(func=cmd_solve_split)

    p = sub.add_parser("audit", help="run a named source-claim audit")
    p.add_argument("target", help="|".join(sorted(AUDITS)))
    p.add_argument("--diagonal-only", action="store_true", dest="diagonal_only")
    common(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("cdp-check", help="sample the convexity-direction property")
    p.add_argument("target")
    common(p)
    p.set_defaults(func=cmd_cdp_check)

    p = sub.add_parser("kkm-probe", help="finite-grid intersection probe")
    p.add_argument("target")
    common(p)
    p.set_defaults(func=cmd_kkm_probe)

    p = sub.add_parser("bertrand-enumerate", help="grid equilibrium enumeration")
    p.add_argument("target", help="builtin duopoly id, e.g. bertrand-1-2")
    common(p)
    p.set_defaults(func=cmd_bertrand_enumerate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
