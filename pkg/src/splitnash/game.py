"""Continuous-strategy noncooperative games on box strategy sets.

A game holds an ordered player list, one box strategy set per player, and
one utility evaluator per player over the full flat profile vector. The
module provides the diagonal payoff map, the component-wise vector order,
regret-based Nash verification, best responses, and a multistart
best-response solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .expr import UtilityExpr, compile_utility, parse_utility, variables
from .kernel import (
    Box,
    Interval,
    SearchBudget,
    maximize_1d,
    project_box,
    projected_gradient_ascent,
)

UtilityFn = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class Game:
    """An n-person strategic game with per-player box strategy sets.

    Player order is fixed and shared by all profile and utility indexing.
    ``utilities[i]`` maps the full flat profile vector to player i's payoff.
    """

    players: tuple[str, ...]
    strategy_sets: tuple[Box, ...]
    utilities: tuple[UtilityFn, ...]
    strategy_dims: tuple[int, ...] = ()
    expressions: tuple[UtilityExpr | None, ...] = ()

    def __post_init__(self) -> None:
        if len(self.players) < 1:
            raise ValueError("game needs at least one player")
        if len(set(self.players)) != len(self.players):
            raise ValueError("duplicate player identifiers")
        dims = self.strategy_dims or tuple(1 for _ in self.players)
        object.__setattr__(self, "strategy_dims", dims)
        if not (len(self.strategy_sets) == len(self.utilities) == len(self.players) == len(dims)):
            raise ValueError("players, strategy_sets, utilities, dims must align")
        for box, d in zip(self.strategy_sets, dims):
            if box.dim != d:
                raise ValueError("strategy set dimension != declared strategy_dim")
        if not self.expressions:
            object.__setattr__(self, "expressions", tuple(None for _ in self.players))

    @staticmethod
    def from_expressions(
        players: Sequence[str],
        intervals: Sequence[Interval],
        sources: Sequence[str | UtilityExpr],
        variable_names: Sequence[str] | None = None,
    ) -> "Game":
        """Build a one-dimensional-per-player game from utility expressions.

        variable_names maps expression variables onto players positionally;
        by default the player identifiers themselves are the variables.
        """
        if not (len(players) == len(intervals) == len(sources)):
            raise ValueError("players, intervals, utilities must have equal length")
        var_names = tuple(variable_names) if variable_names is not None else tuple(players)
        if len(var_names) != len(players):
            raise ValueError("variable_names must align with players")
        exprs = tuple(
            parse_utility(s) if isinstance(s, str) else s for s in sources
        )
        declared = set(var_names)
        for p, e in zip(players, exprs):
            undeclared = variables(e) - declared
            if undeclared:
                raise ValueError(
                    f"utility of player {p!r} uses undeclared variables {sorted(undeclared)}"
                )
        fns = tuple(compile_utility(e, var_names) for e in exprs)
        boxes = tuple(Box((iv,)) for iv in intervals)
        return Game(tuple(players), boxes, fns, expressions=exprs)

    @property
    def n_players(self) -> int:
        return len(self.players)

    @property
    def profile_dim(self) -> int:
        return int(sum(self.strategy_dims))

    @property
    def profile_box(self) -> Box:
        box = self.strategy_sets[0]
        for b in self.strategy_sets[1:]:
            box = box.concat(b)
        return box

    def block_slice(self, i: int) -> slice:
        start = int(sum(self.strategy_dims[:i]))
        return slice(start, start + self.strategy_dims[i])

    def player_index(self, player: str) -> int:
        try:
            return self.players.index(player)
        except ValueError:
            raise KeyError(f"unknown player {player!r}") from None

    def is_feasible(self, x: np.ndarray, slack: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.profile_dim,):
            return False
        return all(
            self.strategy_sets[i].contains(x[self.block_slice(i)], slack)
            for i in range(self.n_players)
        )

    def payoff(self, i: int, x: np.ndarray) -> float:
        return float(self.utilities[i](np.asarray(x, dtype=float)))

    def payoff_vector(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.array([u(x) for u in self.utilities])

    def random_profile(self, rng: np.random.Generator, cap: float) -> np.ndarray:
        """A random feasible profile; unbounded coordinates sampled in [lo, lo+cap]."""
        vals = []
        for box in self.strategy_sets:
            for iv in box.intervals:
                t = iv.truncated(cap)
                vals.append(rng.uniform(t.lo, t.hi))
        return np.array(vals)


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of a regret-based equilibrium check at one profile."""

    verdict: bool
    players: tuple[str, ...]
    regrets: tuple[float, ...]
    tolerance: float
    witnesses: Mapping[str, tuple[tuple[float, ...], float]] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    @property
    def max_regret(self) -> float:
        return max(self.regrets)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "regrets": {p: r for p, r in zip(self.players, self.regrets)},
            "tolerance": self.tolerance,
            "witnesses": {
                p: {"strategy": list(s), "value": v} for p, (s, v) in self.witnesses.items()
            },
            "notes": list(self.notes),
        }


def order_leq(u: Sequence[float], v: Sequence[float]) -> bool:
    """Component-wise order: true iff u_i <= v_i for every i."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError("dimension mismatch")
    return bool(np.all(u <= v))


def diagonal_payoff(game: Game, z: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Vector whose i-th entry is f_i at (z's block for i, x's blocks elsewhere)."""
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    out = np.empty(game.n_players)
    for i in range(game.n_players):
        mixed = x.copy()
        s = game.block_slice(i)
        mixed[s] = z[s]
        out[i] = game.utilities[i](mixed)
    return out


def best_response(
    game: Game, player: str, x: np.ndarray, budget: SearchBudget, truncate: bool = False
) -> tuple[np.ndarray, float]:
    """Maximize player's own payoff against the opponents' blocks in x.

    With truncate=True, unbounded intervals are searched only up to the
    budget cap with no bracket expansion; solver iterations use this to keep
    divergent best-response dynamics bounded.
    """
    i = game.player_index(player)
    x = np.asarray(x, dtype=float)
    s = game.block_slice(i)
    box = game.strategy_sets[i]
    u = game.utilities[i]

    if game.strategy_dims[i] == 1:
        mixed = x.copy()

        def f(v: float) -> float:
            mixed[s.start] = v
            return u(mixed)

        iv = box.intervals[0]
        if truncate:
            iv = iv.truncated(budget.truncation_cap)
        arg, val = maximize_1d(f, iv, budget)
        return np.array([arg]), val

    def fblock(block: np.ndarray) -> float:
        mixed = x.copy()
        mixed[s] = block
        return u(mixed)

    rng = np.random.default_rng(budget.seed)
    starts = [x[s].copy()]
    starts.append(project_box(np.zeros(box.dim), box))
    starts.append(
        np.array([(iv.truncated(budget.truncation_cap).lo + iv.truncated(budget.truncation_cap).hi) / 2 for iv in box.intervals])
    )
    for _ in range(4):
        starts.append(
            np.array([rng.uniform(iv.truncated(budget.truncation_cap).lo, iv.truncated(budget.truncation_cap).hi) for iv in box.intervals])
        )
    best_pt, best_val = None, -math.inf
    for s0 in starts:
        pt, val = projected_gradient_ascent(fblock, box, s0, budget)
        if val > best_val:
            best_pt, best_val = pt, val
    return best_pt, best_val


def nash_regrets(game: Game, x: np.ndarray, budget: SearchBudget) -> np.ndarray:
    """Per-player regret: best-response value minus current value, clamped at 0."""
    x = np.asarray(x, dtype=float)
    regrets = np.empty(game.n_players)
    for i, p in enumerate(game.players):
        _, val = best_response(game, p, x, budget)
        eps = val - game.payoff(i, x)
        regrets[i] = max(eps, 0.0)
    return regrets


def verify_nash(game: Game, x: np.ndarray, budget: SearchBudget) -> VerificationReport:
    """Regret check at x; verdict true iff every regret is within tolerance."""
    x = np.asarray(x, dtype=float)
    if not game.is_feasible(x, slack=1e-12):
        raise ValueError("profile is not feasible for this game")
    regrets = []
    witnesses: dict[str, tuple[tuple[float, ...], float]] = {}
    for i, p in enumerate(game.players):
        arg, val = best_response(game, p, x, budget)
        eps = max(val - game.payoff(i, x), 0.0)
        regrets.append(eps)
        if eps > budget.tolerance:
            witnesses[p] = (tuple(float(a) for a in arg), float(val))
    verdict = max(regrets) <= budget.tolerance
    return VerificationReport(
        verdict=verdict,
        players=game.players,
        regrets=tuple(regrets),
        tolerance=budget.tolerance,
        witnesses=witnesses,
    )


N_STARTS = 32
DAMPING = 0.5


def solve_nash(game: Game, budget: SearchBudget) -> list[np.ndarray]:
    """Multistart damped simultaneous best-response iteration.

    Runs from N_STARTS seeded random feasible starts, deduplicates fixed
    points within 10x tolerance, and returns only profiles that pass
    verify_nash. May return an empty list; emptiness is a finding.
    """
    rng = np.random.default_rng(budget.seed)
    # golden-section refinement keeps best responses accurate, so the
    # iteration phase can scan coarsely; verification uses the full budget
    iter_budget = replace(budget, grid_step=budget.grid_step * 16)
    found: list[np.ndarray] = []
    for _ in range(N_STARTS):
        x = game.random_profile(rng, budget.truncation_cap)
        for _ in range(budget.max_iterations):
            br = x.copy()
            for i, p in enumerate(game.players):
                arg, _ = best_response(game, p, x, iter_budget, truncate=True)
                br[game.block_slice(i)] = arg
            nxt = x + DAMPING * (br - x)
            change = float(np.max(np.abs(nxt - x)))
            x = nxt
            if change < budget.tolerance:
                break
        if not any(np.max(np.abs(x - y)) <= 10 * budget.tolerance for y in found):
            found.append(x)
    return [x for x in found if verify_nash(game, x, budget).verdict]


def gamma_membership(
    game: Game, x: np.ndarray, z: np.ndarray, tolerance: float = 1e-6
) -> bool:
    """True iff f_i(x_i, z_{-i}) <= f_i(z) + tolerance for every player i."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    diag = diagonal_payoff(game, x, z)
    fz = game.payoff_vector(z)
    return order_leq(diag, fz + tolerance)


@dataclass(frozen=True)
class ConcavityReport:
    samples: int
    violations: tuple[tuple[str, tuple[float, ...], tuple[float, ...], float], ...]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "passed": self.passed,
            "violations": [
                {"player": p, "u": list(u), "v": list(v), "lam": lam}
                for p, u, v, lam in self.violations
            ],
        }


def concavity_sample_check(
    game: Game, samples: int, seed: int = 0, tolerance: float = 1e-6, cap: float = 1e3
) -> ConcavityReport:
    """Sample own-strategy concavity of each utility with opponents fixed."""
    rng = np.random.default_rng(seed)
    violations = []
    for _ in range(samples):
        x = game.random_profile(rng, cap)
        u_prof = game.random_profile(rng, cap)
        v_prof = game.random_profile(rng, cap)
        lam = rng.uniform(0.0, 1.0)
        for i, p in enumerate(game.players):
            s = game.block_slice(i)
            a, b = x.copy(), x.copy()
            a[s] = u_prof[s]
            b[s] = v_prof[s]
            mid = x.copy()
            mid[s] = lam * u_prof[s] + (1 - lam) * v_prof[s]
            lhs = game.payoff(i, mid)
            rhs = lam * game.payoff(i, a) + (1 - lam) * game.payoff(i, b)
            if lhs < rhs - tolerance:
                violations.append((p, tuple(a[s]), tuple(b[s]), float(lam)))
    return ConcavityReport(samples=samples, violations=tuple(violations))
