"""Regime classification, attractor measure and dimension, and a truncated minimax solver."""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from game_engine import (
    ALICE,
    NotPlayable,
    Schmidt,
    merge_intervals,
    player_of,
    run_game,
)
from game_utils import format_rational
from metric_spaces import EuclideanPoint, FormalBall, RealMaxSpace
from strategies import min_radius, schmidt_avoid_point, target_chaser

_logger = logging.getLogger(__name__)

ALICE_WINS = "AliceWins"
BOB_WINS = "BobWins"
GAP = "Gap"

UNDETERMINED = "UndeterminedOnBernstein"
DETERMINED = "DeterminedForAllS"
UNCLASSIFIED = "Unclassified"


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class RegimeLabel:
    variant: str
    alpha: Fraction
    beta: Fraction
    c: Fraction
    label: str
    clause: str
    certificate: str

    def row(self):
        return {
            "variant": self.variant,
            "alpha": "" if self.alpha is None else format_rational(self.alpha),
            "beta": format_rational(self.beta),
            "c": format_rational(self.c),
            "label": self.label,
            "certificate": self.certificate,
        }


def _fmt(value):
    return format_rational(value)


def applicable_clauses(variant, alpha, beta, c, banach):
    """Every (label, clause, certificate) whose inequality holds."""
    clauses = []
    if variant in ("schmidt", "strong"):
        threshold = c / (1 + 2 * c)
        if alpha < threshold and beta < threshold:
            clauses.append(
                (
                    f"{UNDETERMINED}(i)",
                    "i",
                    f"alpha={_fmt(alpha)} < c/(1+2c)={_fmt(threshold)}; "
                    f"beta={_fmt(beta)} < c/(1+2c)={_fmt(threshold)}",
                )
            )
        lhs, rhs = 1 + alpha * beta, 2 * max(alpha, beta)
        if banach and lhs > rhs:
            clauses.append(
                (f"{UNDETERMINED}(ii)", "ii", f"1+alpha*beta={_fmt(lhs)} > 2max={_fmt(rhs)}")
            )
        if banach and lhs <= rhs:
            clauses.append((DETERMINED, "banach", f"1+alpha*beta={_fmt(lhs)} <= 2max={_fmt(rhs)}"))
    elif variant == "absolute":
        bound = (c / 5) ** 2
        if beta < bound:
            clauses.append((f"{UNDETERMINED}(iii)", "iii", f"beta={_fmt(beta)} < (c/5)^2={_fmt(bound)}"))
        if banach and beta < Fraction(1, 3):
            clauses.append((f"{UNDETERMINED}(iv)", "iv", f"beta={_fmt(beta)} < 1/3"))
    else:
        raise ValueError(f"Unknown variant {variant!r}")
    return clauses


def classify_parameters(variant, alpha, beta, c, banach):
    """Strongest applicable regime label with its exact inequality instance."""
    alpha = None if alpha is None else Fraction(alpha)
    beta, c = Fraction(beta), Fraction(c)
    if variant == "absolute" and not beta < c / 5 and not (banach and beta < Fraction(1, 3)):
        raise NotPlayable(f"Absolute game needs beta < c/5 = {_fmt(c / 5)}, got {_fmt(beta)}")
    clauses = applicable_clauses(variant, alpha, beta, c, banach)
    if not clauses:
        return RegimeLabel(variant, alpha, beta, c, UNCLASSIFIED, "", "no clause applies")
    label, clause, certificate = clauses[0]
    return RegimeLabel(variant, alpha, beta, c, label, clause, certificate)


def attractor_cover(beta, rho, M):
    """The 2^M intervals (lo, hi) of the depth-M cover of S_rho anchored at 0."""
    beta, rho = Fraction(beta), Fraction(rho)
    offsets = [Fraction(0)]
    for m in range(M):
        step = (1 - beta) * beta**m * rho
        offsets = [o + sign * step for o in offsets for sign in (1, -1)]
    tail = beta**M * rho
    return sorted((o - tail, o + tail) for o in offsets)


def measure_upper_bound(beta, rho, M):
    """(2 beta)^M * 2 rho together with the cover realizing it."""
    beta, rho = Fraction(beta), Fraction(rho)
    if not 0 < beta < Fraction(1, 2) or M < 0:
        raise ValueError(f"Need 0 < beta < 1/2 and M >= 0, got beta={beta}, M={M}")
    cover = attractor_cover(beta, rho, M)
    bound = (2 * beta) ** M * 2 * rho
    assert bound == sum(hi - lo for lo, hi in cover)
    return bound, cover


def dimension_formula(beta):
    return math.log(1 / 2) / math.log(float(beta))


def box_counting_estimate(beta, depth, rho=1):
    """Slope of log N(eps) against log(1/eps) over the depth-`depth` attractor points."""
    beta, rho = float(beta), float(rho)
    points = np.zeros(1)
    for m in range(depth):
        step = (1 - beta) * beta**m * rho
        points = np.concatenate([points + step, points - step])
    sizes = np.array([2 * beta**j * rho for j in range(1, depth + 1)])
    counts = np.array(
        [np.unique(np.floor((points + rho) / size)).size for size in sizes], dtype=float
    )
    slope, _ = np.polyfit(np.log(1 / sizes), np.log(counts), 1)
    _logger.debug(f"box counts for beta={beta}: {counts.tolist()}")
    return float(slope)


@dataclass(frozen=True)
class DiscreteGameSpec:
    variant: object
    step: Fraction
    initial: FormalBall
    target: tuple
    depth: int
    budget: int = 10**7


@dataclass(frozen=True)
class MinimaxResult:
    value: str
    optimistic: bool
    pessimistic: bool
    nodes: int


def _grid(center, reach, step):
    lo = math.ceil((center - reach) / step)
    hi = math.floor((center + reach) / step)
    points = {k * step for k in range(lo, hi + 1)}
    points.add(center)
    return sorted(points)


def truncated_minimax(spec):
    """Backward induction over grid centers; radii follow the exact schedule."""
    if spec.variant.name not in ("schmidt", "strong"):
        raise ValueError("truncated_minimax plays schmidt and strong games")
    step = Fraction(spec.step)
    target = merge_intervals(spec.target)
    radii = [spec.initial.radius]
    for n in range(2, spec.depth + 2):
        radii.append(spec.variant.factor(player_of(n)) * radii[-1])
    counter = {"nodes": 0}

    def final_values(x):
        r = radii[-1]
        optimistic = any(lo <= x + r and x - r <= hi for lo, hi in target)
        pessimistic = any(lo <= x - r and x + r <= hi for lo, hi in target)
        return optimistic, pessimistic

    memo = {}

    def solve(length, x):
        key = (length, x)
        if key in memo:
            return memo[key]
        counter["nodes"] += 1
        if counter["nodes"] > spec.budget:
            raise BudgetExceeded(f"more than {spec.budget} nodes")
        if length == spec.depth + 1:
            memo[key] = final_values(x)
            return memo[key]
        index = length + 1
        reach = radii[length - 1] - radii[length]
        children = [solve(length + 1, z) for z in _grid(x, reach, step)]
        pick = any if player_of(index) == ALICE else all
        value = tuple(pick(child[sense] for child in children) for sense in (0, 1))
        memo[key] = value
        return value

    optimistic, pessimistic = solve(1, spec.initial.center.coords[0])
    if optimistic and pessimistic:
        value = ALICE_WINS
    elif not optimistic and not pessimistic:
        value = BOB_WINS
    else:
        value = GAP
    _logger.info(f"minimax over {counter['nodes']} nodes: {value}")
    return MinimaxResult(value, optimistic, pessimistic, counter["nodes"])


def chaser_probe(alpha, beta, t, adversary, horizon, initial=None):
    """Alice chases t in Schmidt(alpha, beta) on R; returns the final distance to t."""
    space = RealMaxSpace(1)
    variant = Schmidt(alpha, beta)
    t = EuclideanPoint((t,))
    initial = initial or FormalBall(EuclideanPoint((0,)), Fraction(1))
    if adversary == "min-radius":
        bob = min_radius("Bob")
    elif adversary == "avoid-point":
        bob = schmidt_avoid_point(t, role="Bob")
    else:
        raise ValueError(f"Unknown adversary {adversary!r}")
    transcript = run_game(variant, space, target_chaser(t), bob, initial, horizon)
    enclosure = transcript.enclosure()
    distance = space.distance(enclosure.center, t)
    return {
        "alpha": _fmt(variant.alpha),
        "beta": _fmt(variant.beta),
        "adversary": adversary,
        "horizon": horizon,
        "distance": _fmt(distance),
        "radius": _fmt(enclosure.radius),
        "excluded": distance > enclosure.radius,
    }
