"""Extended Bertrand duopoly price competition with quality-weighted demand splits.

Two firms with unit costs c1 <= c2 name prices; the whole market goes to the
firm whose price wins the threshold comparison p1 vs lambda*p2 with
lambda = c1/c2, and splits in cost proportion on the tie line. Profit
functions are discontinuous on the tie line, so all equilibrium machinery
here is grid enumeration with the exact tie price injected into every
best-response grid; gradient methods are invalid for this model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

TIE_TOL = 1e-12


def linear_demand(d0: float = 10.0, a: float = 1.0, b: float = 1.0) -> Callable:
    """Truncated linear demand max(0, d0 - a*p1 - b*p2); numpy-broadcastable."""

    def demand(p1, p2):
        return np.maximum(0.0, d0 - a * p1 - b * p2)

    demand.caps = (d0 / a, d0 / b)  # price caps where own demand vanishes
    return demand


@dataclass(frozen=True)
class BertrandModel:
    """Costs, quality ratio, demand, and price caps for the duopoly."""

    c1: float
    c2: float
    demand: Callable = field(default_factory=linear_demand)
    price_caps: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if not (0 < self.c1 <= self.c2):
            raise ValueError(f"need 0 < c1 <= c2, got c1={self.c1}, c2={self.c2}")
        if self.price_caps is None:
            caps = getattr(self.demand, "caps", (math.inf, math.inf))
            object.__setattr__(self, "price_caps", tuple(float(c) for c in caps))
        d = float(self.demand(self.c1, self.c2))
        if not (0 < d < math.inf):
            raise ValueError(f"demand at costs must be positive and finite, got {d}")

    @property
    def lam(self) -> float:
        """Quality ratio c1/c2, in (0, 1]."""
        return self.c1 / self.c2

    def default_price_range(self) -> float:
        return min(min(self.price_caps), 5.0 * self.c2)


def sales_shares(model: BertrandModel, p1: float, p2: float) -> tuple[float, float]:
    """Market split: all-or-nothing by the p1 vs lambda*p2 threshold,
    cost-proportional on the tie (detected with absolute tolerance 1e-12).
    Returns (0, 0) when total demand is zero."""
    if p1 < 0 or p2 < 0:
        raise ValueError("prices must be nonnegative")
    if float(model.demand(p1, p2)) <= 0.0:
        return (0.0, 0.0)
    diff = p1 - model.lam * p2
    if abs(diff) <= TIE_TOL:
        total = model.c1 + model.c2
        return (model.c1 / total, model.c2 / total)
    if diff < 0:
        return (1.0, 0.0)
    return (0.0, 1.0)


def profits(model: BertrandModel, p1: float, p2: float) -> tuple[float, float]:
    """Per-firm profit (p_j - c_j) * share_j * demand."""
    s1, s2 = sales_shares(model, p1, p2)
    d = float(model.demand(p1, p2))
    if d <= 0.0:
        return (0.0, 0.0)
    return ((p1 - model.c1) * s1 * d, (p2 - model.c2) * s2 * d)


def tie_price(model: BertrandModel, firm: int, opponent_price: float) -> float:
    """The exact price putting the given firm on the demand-split tie line."""
    if firm == 1:
        return model.lam * opponent_price
    return opponent_price / model.lam


def grid_best_response(
    model: BertrandModel, firm: int, opponent_price: float, grid: Sequence[float]
) -> tuple[float, float]:
    """Exhaustive profit maximization over the grid plus the exact tie price.

    The tie line carries the only positive-profit region near equilibrium and
    would otherwise be missed. Ties in profit break toward the lower price.
    """
    if firm not in (1, 2):
        raise ValueError("firm must be 1 or 2")
    if len(grid) == 0:
        raise ValueError("grid must be nonempty")
    candidates = list(grid)
    tie = tie_price(model, firm, opponent_price)
    if math.isfinite(tie) and tie >= 0:
        candidates.append(tie)
    candidates.sort()
    best_p, best_u = None, -math.inf
    for p in candidates:
        u1, u2 = profits(model, p, opponent_price) if firm == 1 else profits(model, opponent_price, p)
        u = u1 if firm == 1 else u2
        if u > best_u:
            best_p, best_u = p, u
    return float(best_p), float(best_u)


def _price_grid(hi: float, step: float) -> np.ndarray:
    cells = int(round(hi / step))
    # snap to exact decimals so tie detection on grid pairs is exact
    return np.round(np.arange(cells + 1) * step, 9)


def enumerate_grid_equilibria(
    model: BertrandModel,
    grid_step: float,
    price_range: float | None = None,
    tolerance: float = 1e-6,
) -> list[tuple[float, float]]:
    """All grid points where no tie-augmented grid deviation improves either
    firm's profit by more than tolerance."""
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    hi = price_range if price_range is not None else model.default_price_range()
    g = _price_grid(hi, grid_step)
    lam = model.lam
    c1, c2 = model.c1, model.c2
    total = c1 + c2

    p1 = g[:, None]
    p2 = g[None, :]
    d = np.asarray(model.demand(p1, p2), dtype=float)
    diff = p1 - lam * p2
    tie = np.abs(diff) <= TIE_TOL
    share1 = np.where(tie, c1 / total, np.where(diff < 0, 1.0, 0.0))
    share2 = np.where(tie, c2 / total, np.where(diff > 0, 1.0, 0.0))
    pos = d > 0.0
    u1 = np.where(pos, (p1 - c1) * share1 * d, 0.0)
    u2 = np.where(pos, (p2 - c2) * share2 * d, 0.0)

    # firm 1 tie candidate per opponent price, firm 2 tie candidate per own row
    t1 = lam * g
    d_t1 = np.asarray(model.demand(t1, g), dtype=float)
    u1_tie = np.where(d_t1 > 0.0, (t1 - c1) * (c1 / total) * d_t1, 0.0)
    t2 = g / lam
    d_t2 = np.asarray(model.demand(g, t2), dtype=float)
    u2_tie = np.where(d_t2 > 0.0, (t2 - c2) * (c2 / total) * d_t2, 0.0)

    best1 = np.maximum(u1.max(axis=0), u1_tie)  # per column (opponent p2)
    best2 = np.maximum(u2.max(axis=1), u2_tie)  # per row (opponent p1)

    mask = (u1 >= best1[None, :] - tolerance) & (u2 >= best2[:, None] - tolerance)
    ii, jj = np.nonzero(mask)
    return [(float(g[i]), float(g[j])) for i, j in zip(ii, jj)]


@dataclass(frozen=True)
class MarkovPriceMatrix:
    """The 2x2 column-stochastic price modification [[a, 1-b], [1-a, b]]."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (0 <= self.alpha <= 1 and 0 <= self.beta <= 1):
            raise ValueError("alpha and beta must lie in [0, 1]")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.alpha, 1 - self.beta], [1 - self.alpha, self.beta]])

    @property
    def is_identity(self) -> bool:
        return self.alpha == 1.0 and self.beta == 1.0


def markov_price_transform(
    m: MarkovPriceMatrix, p1: float, p2: float
) -> tuple[float, float]:
    """Apply the price modification; preserves p1 + p2 (columns sum to 1)."""
    return (m.alpha * p1 + (1 - m.beta) * p2, (1 - m.alpha) * p1 + m.beta * p2)


def is_grid_equilibrium(
    model: BertrandModel,
    p1: float,
    p2: float,
    grid_step: float = 1e-2,
    price_range: float | None = None,
    tolerance: float = 1e-6,
) -> bool:
    """No tie-augmented grid deviation improves either firm beyond tolerance."""
    hi = price_range if price_range is not None else model.default_price_range()
    g = _price_grid(hi, grid_step)
    cur1, cur2 = profits(model, p1, p2)
    _, best1 = grid_best_response(model, 1, p2, g)
    if best1 > cur1 + tolerance:
        return False
    _, best2 = grid_best_response(model, 2, p1, g)
    return bool(best2 <= cur2 + tolerance)


@dataclass(frozen=True)
class MarkovAuditRow:
    alpha: float
    beta: float
    transformed: tuple[float, float]
    verdict: bool
    oracle: bool
    stated_claim: bool

    @property
    def agrees_with_oracle(self) -> bool:
        return self.verdict == self.oracle

    @property
    def agrees_with_claim(self) -> bool:
        return self.verdict == self.stated_claim

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "transformed": list(self.transformed),
            "verdict": self.verdict,
            "oracle": self.oracle,
            "stated_claim": self.stated_claim,
            "agrees_with_oracle": self.agrees_with_oracle,
            "agrees_with_claim": self.agrees_with_claim,
        }


@dataclass(frozen=True)
class MarkovAuditReport:
    rows: tuple[MarkovAuditRow, ...]

    @property
    def all_match_oracle(self) -> bool:
        return all(r.agrees_with_oracle for r in self.rows)

    @property
    def claim_discrepancies(self) -> tuple[MarkovAuditRow, ...]:
        return tuple(r for r in self.rows if not r.agrees_with_claim)

    def to_dict(self) -> dict:
        return {
            "rows": [r.to_dict() for r in self.rows],
            "all_match_oracle": self.all_match_oracle,
            "claim_discrepancy_count": len(self.claim_discrepancies),
        }


def audit_theorem_6_2(
    model: BertrandModel,
    alphas_betas: Sequence[tuple[float, float]],
    grid_step: float = 1e-2,
    price_range: float | None = None,
    tolerance: float = 1e-6,
) -> MarkovAuditReport:
    """Audit the Markov split claims for the repeated duopoly.

    For each sampled (alpha, beta) the transformed cost pair is tested for
    grid equilibrium and compared against two predictions: the analytic
    oracle "transform fixes (c1, c2)" and the literal source claims (with
    equal costs, every matrix works; with unequal costs, only the identity).
    Disagreements are tabulated, never overridden.
    """
    rows = []
    for alpha, beta in alphas_betas:
        m = MarkovPriceMatrix(alpha, beta)
        tp = markov_price_transform(m, model.c1, model.c2)
        verdict = is_grid_equilibrium(
            model, tp[0], tp[1], grid_step=grid_step, price_range=price_range, tolerance=tolerance
        )
        oracle = abs(tp[0] - model.c1) <= 1e-9 and abs(tp[1] - model.c2) <= 1e-9
        if model.c1 == model.c2:
            stated_claim = True
        else:
            stated_claim = m.is_identity
        rows.append(
            MarkovAuditRow(
                alpha=float(alpha),
                beta=float(beta),
                transformed=(float(tp[0]), float(tp[1])),
                verdict=verdict,
                oracle=oracle,
                stated_claim=stated_claim,
            )
        )
    return MarkovAuditReport(rows=tuple(rows))
