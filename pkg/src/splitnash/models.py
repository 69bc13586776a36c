"""Built-in problem instances with replayable reference claims.

Each instance packages a problem (game, split problem, or duopoly model)
together with the answers claimed for it, tagged by provenance so the audit
suite can re-derive DERIVED values and report on PAPER values instead of
asserting them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .bertrand import BertrandModel, linear_demand
from .game import Game
from .kernel import Box, Interval
from .split import LinearOperator, SplitProblem

PAPER = "PAPER"
DERIVED = "DERIVED"
TRIVIAL = "TRIVIAL"


@dataclass(frozen=True)
class Claim:
    description: str
    value: Any
    provenance: str
    citation: str = ""

    def __post_init__(self) -> None:
        if self.provenance not in (PAPER, DERIVED, TRIVIAL):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.provenance == PAPER and not self.citation:
            raise ValueError("PAPER claims require a citation")


@dataclass(frozen=True)
class NamedInstance:
    identifier: str
    kind: str  # "game" | "split" | "bertrand"
    problem: Any
    reference_claims: tuple[Claim, ...] = ()


# --- the two-economy example -------------------------------------------------

E1_UTILITIES = (
    "x*y*z - 4*x^2",
    "x^2*y*z - 0.125*y^4",
    "x^0.5*y^0.5*z^0.5 - 0.5*z",
)
E2_UTILITIES = (
    f"0.5*s*t - {1 / 3!r}*s^2",
    f"48*s^0.5*t - {1 / 48!r}*t^4",
)
TWO_ECONOMY_MATRIX = np.array([[1.0, 2.0, 1.0], [2.0, 1.0, 2.0]])


def e1_game() -> Game:
    """Three industries on [0, inf) with mixed polynomial/fractional utilities."""
    return Game.from_expressions(
        players=("a", "b", "c"),
        intervals=(Interval(0.0), Interval(0.0), Interval(0.0)),
        sources=E1_UTILITIES,
        variable_names=("x", "y", "z"),
    )


def e2_game() -> Game:
    """Two industries on [0, inf)."""
    return Game.from_expressions(
        players=("d", "e"),
        intervals=(Interval(0.0), Interval(0.0)),
        sources=E2_UTILITIES,
        variable_names=("s", "t"),
    )


def example_4_1() -> NamedInstance:
    """The two related three- and two-industry economies and their 2x3 operator."""
    problem = SplitProblem(
        game_n=e1_game(),
        game_m=e2_game(),
        operator=LinearOperator(TWO_ECONOMY_MATRIX),
    )
    claims = (
        Claim(
            "split equilibrium candidate in the source game",
            (1.0, 2.0, 4.0),
            PAPER,
            "claimed source-game equilibrium",
        ),
        Claim(
            "operator image of (1, 2, 4)",
            (9.0, 12.0),
            PAPER,
            "claimed image equilibrium",
        ),
        Claim(
            "target-game regrets at (9, 12)",
            (0.0, 0.0),
            PAPER,
            "claimed target-game equilibrium",
        ),
        Claim(
            "player c analytic best response against (x, y) is z* = x*y",
            "z_star = x*y",
            DERIVED,
        ),
        Claim(
            "player c regret at (1, 2, 4) is 3 - 2*sqrt(2)",
            3.0 - 2.0 * np.sqrt(2.0),
            DERIVED,
        ),
    )
    return NamedInstance("example-4.1", "split", problem, claims)


# --- quadratic sanity family -------------------------------------------------


def _quadratic_utility(i: int, target: float):
    def u(x: np.ndarray) -> float:
        d = x[i] - target
        return -d * d

    return u


def quadratic_game(targets: Sequence[float], hi: float) -> Game:
    """Dominant-strategy game: player i maximizes -(x_i - a_i)^2 on [0, hi]."""
    targets = tuple(float(t) for t in targets)
    players = tuple(f"p{i + 1}" for i in range(len(targets)))
    boxes = tuple(Box((Interval(0.0, hi),)) for _ in targets)
    utils = tuple(_quadratic_utility(i, t) for i, t in enumerate(targets))
    return Game(players, boxes, utils)


def quadratic_split_instance(
    a: Sequence[float], matrix, b: Sequence[float], identifier: str = "quadratic-sanity"
) -> NamedInstance:
    """Analytic sanity family: x_hat = a is a split equilibrium iff matrix @ a = b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m = np.asarray(matrix, dtype=float)
    if m.shape != (len(b), len(a)):
        raise ValueError(f"matrix shape {m.shape} does not match |a|={len(a)}, |b|={len(b)}")
    hi = 10.0 * max(float(np.max(np.abs(a))), float(np.max(np.abs(b))), 1.0)
    problem = SplitProblem(
        game_n=quadratic_game(a, hi),
        game_m=quadratic_game(b, hi),
        operator=LinearOperator(m),
    )
    maps_to_b = bool(np.allclose(m @ a, b, atol=1e-12))
    claims = (
        Claim("dominant strategies of the source game", tuple(map(float, a)), DERIVED),
        Claim("dominant strategies of the target game", tuple(map(float, b)), DERIVED),
        Claim("a is a split equilibrium iff the operator maps a to b", maps_to_b, DERIVED),
    )
    return NamedInstance(identifier, "split", problem, claims)


def default_quadratic_sanity() -> NamedInstance:
    return quadratic_split_instance(
        a=(1.0, 2.0), matrix=np.array([[0.0, 1.0], [1.0, 0.0]]), b=(2.0, 1.0)
    )


# --- duopoly instances -------------------------------------------------------


def bertrand_instance(
    c1: float, c2: float, d0: float = 10.0, a: float = 1.0, b: float = 1.0
) -> NamedInstance:
    model = BertrandModel(c1=c1, c2=c2, demand=linear_demand(d0, a, b))
    claims = (
        Claim(
            "unique price equilibrium is (c1, c2)",
            (float(c1), float(c2)),
            PAPER,
            "both firms price at cost",
        ),
        Claim("profits at the equilibrium are (0, 0)", (0.0, 0.0), PAPER, "zero profit at cost"),
        Claim(
            "Markov price modification fixes (c1, c2) iff the transform does",
            "transform(c1, c2) == (c1, c2)",
            DERIVED,
        ),
    )
    return NamedInstance(f"bertrand-{c1:g}-{c2:g}", "bertrand", model, claims)


# --- registry ----------------------------------------------------------------


def builtin_ids() -> list[str]:
    return [
        "example-4.1",
        "example-4.1:E1",
        "example-4.1:E2",
        "quadratic-sanity",
        "bertrand-1-2",
        "bertrand-1-1",
    ]


def get_instance(identifier: str) -> NamedInstance:
    """Look up a built-in instance by its CLI identifier."""
    if identifier == "example-4.1":
        return example_4_1()
    if identifier == "example-4.1:E1":
        return NamedInstance("example-4.1:E1", "game", e1_game())
    if identifier == "example-4.1:E2":
        return NamedInstance("example-4.1:E2", "game", e2_game())
    if identifier == "quadratic-sanity":
        return default_quadratic_sanity()
    if identifier == "bertrand-1-2":
        return bertrand_instance(1.0, 2.0)
    if identifier == "bertrand-1-1":
        return bertrand_instance(1.0, 1.0)
    raise KeyError(f"unknown builtin instance {identifier!r}; known: {builtin_ids()}")
