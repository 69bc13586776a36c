"""Split equilibrium problems for two games related by a linear operator.

A split problem couples a source game, a target game, and a dense matrix
mapping source profiles to target profiles. The module verifies and searches
for split equilibria, checks relatedness and sampled surjectivity of the
operator, samples the convexity-direction-preserved property, and probes the
finite-grid intersection of the deviation-dominance map.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import lsq_linear

from .game import (
    Game,
    VerificationReport,
    diagonal_payoff,
    order_leq,
    solve_nash,
    verify_nash,
)
from .kernel import Box, Interval, SearchBudget


@dataclass(frozen=True)
class LinearOperator:
    """Dense matrix from the source game's profile space to the target's."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2:
            raise ValueError("operator matrix must be two-dimensional")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator matrix entries must be finite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def apply_operator(op: LinearOperator, x: Sequence[float]) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (op.shape[1],):
        raise ValueError(
            f"operator expects dimension {op.shape[1]}, got {x.shape}"
        )
    return op.matrix @ x


@dataclass(frozen=True)
class RelatednessReport:
    """Exact interval-arithmetic containment of the source box's image."""

    holds: bool
    image_intervals: tuple[tuple[float, float], ...]
    failures: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "image_intervals": [list(iv) for iv in self.image_intervals],
            "failures": list(self.failures),
        }


def _image_interval(row: np.ndarray, box: Box) -> tuple[float, float]:
    lo_sum, hi_sum = 0.0, 0.0
    for a, iv in zip(row, box.intervals):
        if a == 0.0:
            continue  # avoid 0 * inf
        cands = [a * iv.lo, a * iv.hi]
        lo_sum += min(cands)
        hi_sum += max(cands)
    return lo_sum, hi_sum


def check_relatedness(game_n: Game, game_m: Game, op: LinearOperator) -> RelatednessReport:
    """Does the operator map the source profile box into the target box?"""
    src, dst = game_n.profile_box, game_m.profile_box
    image = tuple(_image_interval(row, src) for row in op.matrix)
    failures = []
    for k, ((lo, hi), iv) in enumerate(zip(image, dst.intervals)):
        if lo < iv.lo - 1e-12 or hi > iv.hi + 1e-12:
            failures.append(
                f"image coordinate {k} ranges over [{lo}, {hi}], "
                f"outside target interval [{iv.lo}, {iv.hi}]"
            )
    return RelatednessReport(
        holds=not failures, image_intervals=image, failures=tuple(failures)
    )


@dataclass(frozen=True)
class SplitProblem:
    """(source game, target game, operator) with relatedness metadata.

    A relatedness failure is recorded, not raised: the artifact also audits
    instances whose hypotheses fail.
    """

    game_n: Game
    game_m: Game
    operator: LinearOperator
    relatedness: RelatednessReport = field(init=False)

    def __post_init__(self) -> None:
        rows, cols = self.operator.shape
        if cols != self.game_n.profile_dim or rows != self.game_m.profile_dim:
            raise ValueError(
                f"operator shape {self.operator.shape} does not match games "
                f"({self.game_m.profile_dim} x {self.game_n.profile_dim} expected)"
            )
        object.__setattr__(
            self, "relatedness", check_relatedness(self.game_n, self.game_m, self.operator)
        )

    def image(self, x: np.ndarray) -> np.ndarray:
        return apply_operator(self.operator, x)


@dataclass(frozen=True)
class SurjectivityReport:
    surjective_on_samples: bool
    samples: int
    max_residual: float
    failures: tuple[tuple[tuple[float, ...], float], ...] = ()

    def to_dict(self) -> dict:
        return {
            "surjective_on_samples": self.surjective_on_samples,
            "samples": self.samples,
            "max_residual": self.max_residual,
            "failures": [
                {"target": list(y), "residual": r} for y, r in self.failures
            ],
        }


def check_surjectivity(
    problem: SplitProblem, samples: int, seed: int = 0, budget: SearchBudget | None = None
) -> SurjectivityReport:
    """Sampled surjectivity: can each sampled target profile be reached?

    Each sampled y in the target box (unbounded coordinates truncated at the
    cap) is tested by bounded least squares min ||Ax - y|| over the source
    box; surjective-on-samples iff every residual is within tolerance.
    """
    budget = budget or SearchBudget()
    rng = np.random.default_rng(seed)
    src, dst = problem.game_n.profile_box, problem.game_m.profile_box
    lo = np.array([iv.lo for iv in src.intervals])
    hi = np.array([iv.truncated(budget.truncation_cap).hi if not iv.bounded else iv.hi for iv in src.intervals])
    failures = []
    max_res = 0.0
    for _ in range(samples):
        y = np.array(
            [
                rng.uniform(iv.truncated(budget.truncation_cap).lo, iv.truncated(budget.truncation_cap).hi)
                for iv in dst.intervals
            ]
        )
        res = lsq_linear(problem.operator.matrix, y, bounds=(lo, hi), tol=1e-12)
        residual = float(np.linalg.norm(problem.operator.matrix @ res.x - y))
        max_res = max(max_res, residual)
        if residual > budget.tolerance:
            failures.append((tuple(float(v) for v in y), residual))
    return SurjectivityReport(
        surjective_on_samples=not failures,
        samples=samples,
        max_residual=max_res,
        failures=tuple(failures[:20]),
    )


@dataclass(frozen=True)
class SplitVerificationReport:
    verdict: bool
    report_n: VerificationReport
    report_m: VerificationReport
    image_profile: tuple[float, ...]
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "game_n": self.report_n.to_dict(),
            "game_m": self.report_m.to_dict(),
            "image_profile": list(self.image_profile),
            "notes": list(self.notes),
        }


def verify_split_equilibrium(
    problem: SplitProblem, x: np.ndarray, budget: SearchBudget
) -> SplitVerificationReport:
    """Verify x in game N and its operator image in game M."""
    x = np.asarray(x, dtype=float)
    y = problem.image(x)
    if not problem.game_m.is_feasible(y, slack=1e-9):
        raise ValueError(
            f"operator image {y.tolist()} is infeasible in the target game "
            "(relatedness violated at this profile)"
        )
    rep_n = verify_nash(problem.game_n, x, budget)
    rep_m = verify_nash(problem.game_m, y, budget)
    return SplitVerificationReport(
        verdict=rep_n.verdict and rep_m.verdict,
        report_n=rep_n,
        report_m=rep_m,
        image_profile=tuple(float(v) for v in y),
    )


def solve_split(problem: SplitProblem, budget: SearchBudget) -> list[np.ndarray]:
    """Nash candidates of game N filtered by the split verification."""
    out = []
    for x in solve_nash(problem.game_n, budget):
        y = problem.image(x)
        if not problem.game_m.is_feasible(y, slack=1e-9):
            continue
        if verify_split_equilibrium(problem, x, budget).verdict:
            out.append(x)
    return out


@dataclass(frozen=True)
class CdpReport:
    """Sampled audit of the convexity-direction-preserved property.

    Witness tuples are (u, v, lambda) triples that can be replayed to
    re-verify the recorded violation.
    """

    samples: int
    joint_cdp_failures: tuple[tuple[tuple[float, ...], tuple[float, ...], float], ...]
    vector_disjunction_failures: tuple[tuple[tuple[float, ...], tuple[float, ...], float], ...]
    min_dominance_failures: tuple[tuple[tuple[float, ...], tuple[float, ...], float], ...]

    def to_dict(self) -> dict:
        def w(items):
            return [{"u": list(u), "v": list(v), "lam": lam} for u, v, lam in items]

        return {
            "samples": self.samples,
            "joint_cdp_failures": w(self.joint_cdp_failures),
            "vector_disjunction_failures": w(self.vector_disjunction_failures),
            "min_dominance_failures": w(self.min_dominance_failures),
        }


def cdp_sample_check(
    problem: SplitProblem,
    samples: int,
    seed: int = 0,
    tolerance: float = 1e-6,
    cap: float = 1e3,
) -> CdpReport:
    """Sample (u, v, lambda) triples and record violations of three properties:

    (i) the joint disjunction coupling deviation dominance in both games,
    (ii) the per-game vector disjunctions, and (iii) the per-component
    min-dominance property, which is the only one provable from own-strategy
    concavity alone.
    """
    rng = np.random.default_rng(seed)
    gn, gm = problem.game_n, problem.game_m
    joint, vector, mindom = [], [], []
    for _ in range(samples):
        u = gn.random_profile(rng, cap)
        v = gn.random_profile(rng, cap)
        lam = float(rng.uniform(0.0, 1.0))
        w = lam * u + (1 - lam) * v
        au, av, aw = problem.image(u), problem.image(v), problem.image(w)

        fu = diagonal_payoff(gn, u, w)
        fv = diagonal_payoff(gn, v, w)
        fw = gn.payoff_vector(w)
        gu = diagonal_payoff(gm, au, aw)
        gv = diagonal_payoff(gm, av, aw)
        gw = gm.payoff_vector(aw)

        n_u = order_leq(fu, fw + tolerance)
        n_v = order_leq(fv, fw + tolerance)
        m_u = order_leq(gu, gw + tolerance)
        m_v = order_leq(gv, gw + tolerance)

        witness = (tuple(map(float, u)), tuple(map(float, v)), lam)
        if not ((n_u and m_u) or (n_v and m_v)):
            joint.append(witness)
        if not ((n_u or n_v) and (m_u or m_v)):
            vector.append(witness)
        if not bool(np.all(np.minimum(fu, fv) <= fw + tolerance)):
            mindom.append(witness)
    return CdpReport(
        samples=samples,
        joint_cdp_failures=tuple(joint[:50]),
        vector_disjunction_failures=tuple(vector[:50]),
        min_dominance_failures=tuple(mindom[:50]),
    )


def kkm_t_membership(
    problem: SplitProblem, x: np.ndarray, z: np.ndarray, tolerance: float = 1e-6
) -> bool:
    """Is (z, Az) dominated by no deviation to x's blocks, in both games?"""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    gn, gm = problem.game_n, problem.game_m
    ax, az = problem.image(x), problem.image(z)
    if not order_leq(diagonal_payoff(gn, x, z), gn.payoff_vector(z) + tolerance):
        return False
    return order_leq(diagonal_payoff(gm, ax, az), gm.payoff_vector(az) + tolerance)


@dataclass(frozen=True)
class KkmProbeResult:
    members: tuple[tuple[float, ...], ...]
    grid_points: int
    points_per_axis: int
    cell_diameter: float
    verified: tuple[bool, ...]

    def to_dict(self) -> dict:
        return {
            "members": [list(m) for m in self.members],
            "grid_points": self.grid_points,
            "points_per_axis": self.points_per_axis,
            "cell_diameter": self.cell_diameter,
            "verified": list(self.verified),
        }


def kkm_intersection_probe(
    problem: SplitProblem,
    budget: SearchBudget,
    points_per_axis: int = 8,
    probe_box: Box | None = None,
) -> KkmProbeResult:
    """Finite-grid probe of the intersection of all deviation-dominance sets.

    Returns every grid point z that stays a member against every grid point
    x. Each member is cross-checked with the split verifier under a regret
    slack of twice the grid cell diameter. Emptiness is a finding, reported
    with the grid resolution.
    """
    box = probe_box or problem.game_n.profile_box
    axes = [
        np.linspace(iv.truncated(budget.truncation_cap).lo, iv.truncated(budget.truncation_cap).hi, points_per_axis)
        for iv in box.intervals
    ]
    steps = [ax[1] - ax[0] if len(ax) > 1 else 0.0 for ax in axes]
    cell_diameter = float(math.sqrt(sum(s * s for s in steps)))
    grid = [np.array(pt) for pt in itertools.product(*axes)]

    members = []
    for z in grid:
        if all(kkm_t_membership(problem, x, z, budget.tolerance) for x in grid):
            members.append(z)

    slack_budget = SearchBudget(
        grid_step=budget.grid_step,
        max_iterations=budget.max_iterations,
        truncation_cap=budget.truncation_cap,
        tolerance=max(budget.tolerance, 2.0 * cell_diameter),
        seed=budget.seed,
    )
    verified = tuple(
        verify_split_equilibrium(problem, z, slack_budget).verdict for z in members
    )
    return KkmProbeResult(
        members=tuple(tuple(float(v) for v in z) for z in members),
        grid_points=len(grid),
        points_per_axis=points_per_axis,
        cell_diameter=cell_diameter,
        verified=verified,
    )
