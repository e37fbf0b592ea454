"""Explicit strategies for the three games.

A strategy is a callable (variant, space, history) -> Move. Every strategy
here is positional: it reads only the current ball, the last deletion and
its own parameters, so it is a pure function of the history.
"""
import logging
import zlib
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from game_engine import (
    ALICE,
    BOB,
    CONSTANT,
    SHRINKS,
    IllegalMove,
    Move,
    minimal_radius,
    player_of,
    validate_move,
)
from game_utils import format_rational
from metric_spaces import (
    EuclideanPoint,
    FormalBall,
    NotFound,
    RealMaxSpace,
    ball_contains_point,
    cylinder_length,
    disjoint_ball_picker,
    find_ball_avoiding,
    line_distance,
    uniform_perfect_witness,
)

_logger = logging.getLogger(__name__)


class PreconditionViolated(ValueError):
    pass


class NoLegalCandidate(RuntimeError):
    pass


class TargetOutside(ValueError):
    pass


class Strategy:
    name = "strategy"
    variants = ("schmidt", "strong", "absolute")

    def __init__(self, role, **params):
        if role not in (ALICE, BOB):
            raise ValueError(f"Unknown role {role!r}")
        self.role = role
        self.params = params

    def __call__(self, variant, space, history):
        assert player_of(len(history) + 1) == self.role
        if variant.name not in self.variants:
            raise PreconditionViolated(f"{self.name} does not play the {variant.name} game")
        return self.move(variant, space, history)

    def move(self, variant, space, history):
        raise NotImplementedError

    def radius_law(self, variant):
        """Radius law this strategy commits to, if any."""
        return None

    def __repr__(self):
        args = ",".join(f"{key}={value}" for key, value in self.params.items())
        return f"{self.name}[{self.role}]({args})"


def _current(history):
    return history[-1].ball


class MinRadius(Strategy):
    name = "min-radius"

    def move(self, variant, space, history):
        if variant.name != "absolute":
            prev = _current(history)
            return Move(FormalBall(prev.center, variant.factor(self.role) * prev.radius))
        if self.role == ALICE:
            raise PreconditionViolated("min-radius plays Alice only in schmidt and strong games")
        outer, deleted = history[-2].ball, history[-1].ball
        radius = variant.beta * outer.radius
        try:
            return Move(
                find_ball_avoiding(space, outer, radius, deleted.center, deleted.radius + radius)
            )
        except NotFound as error:
            raise NoLegalCandidate(str(error))


def min_radius(role):
    return MinRadius(role)


class Copycat(Strategy):
    name = "copycat"
    variants = ("strong",)

    def move(self, variant, space, history):
        return Move(_current(history))

    def radius_law(self, variant):
        return CONSTANT


def copycat(role):
    return Copycat(role)


def schmidt_threshold(c):
    return c / (1 + 2 * c)


class SchmidtAvoidPoint(Strategy):
    name = "avoid-point"
    variants = ("schmidt", "strong")

    def __init__(self, role, y, c=None):
        super().__init__(role, y=y, c=c)
        self.y = y
        self.c = c

    def move(self, variant, space, history):
        c = space.c if self.c is None else Fraction(self.c)
        gamma = variant.factor(self.role)
        if gamma >= schmidt_threshold(c):
            raise PreconditionViolated(
                f"factor {gamma} is not below c/(1+2c) = {schmidt_threshold(c)}"
            )
        prev = _current(history)
        radius = gamma * prev.radius
        if space.distance(prev.center, self.y) > radius:
            return Move(FormalBall(prev.center, radius))
        z = uniform_perfect_witness(space, self.y, (1 - 2 * gamma) * prev.radius, c)
        return Move(FormalBall(z, radius))


def schmidt_avoid_point(y, c=None, role=ALICE):
    return SchmidtAvoidPoint(role, y, c)


class AbsoluteCenterDelete(Strategy):
    name = "center-delete"
    variants = ("absolute",)

    def move(self, variant, space, history):
        prev = _current(history)
        return Move(FormalBall(prev.center, variant.beta * prev.radius), delete=True)

    def radius_law(self, variant):
        # Bob answers a center deletion with radius < (1-beta)/2 of the previous one
        return SHRINKS


def absolute_center_delete():
    return AbsoluteCenterDelete(ALICE)


class AbsoluteAvoidPoint(Strategy):
    name = "absolute-avoid-point"
    variants = ("absolute",)

    def __init__(self, role, y):
        super().__init__(role, y=y)
        self.y = y

    def move(self, variant, space, history):
        prev = _current(history)
        center = self.y if ball_contains_point(space, prev, self.y) else prev.center
        return Move(FormalBall(center, variant.beta * prev.radius), delete=True)


def absolute_avoid_point(y):
    return AbsoluteAvoidPoint(ALICE, y)


class AbsoluteBobAvoidPoint(Strategy):
    """Two nested picks: clear of Alice's deletion, then clear of y."""

    name = "absolute-bob-avoid"
    variants = ("absolute",)

    def __init__(self, role, y):
        super().__init__(role, y=y)
        self.y = y

    def move(self, variant, space, history):
        c = space.c
        if not variant.beta < (c / 5) ** 2:
            raise PreconditionViolated(f"beta={variant.beta} is not below (c/5)^2 = {(c / 5) ** 2}")
        outer, deleted = history[-2].ball, history[-1].ball
        try:
            first = disjoint_ball_picker(space, outer, deleted, c)
            radius = c / 5 * first.radius
            second = find_ball_avoiding(space, first, radius, self.y, radius)
        except NotFound as error:
            raise NoLegalCandidate(str(error))
        return Move(second)


def absolute_bob_avoid_point(y):
    return AbsoluteBobAvoidPoint(BOB, y)


@dataclass(frozen=True)
class AttractorSpec:
    """S_rho = { anchor + sum_m e_m (1-beta) beta^m rho v : e_m = +-1 }."""

    anchor: EuclideanPoint
    direction: tuple
    beta: Fraction
    rho: Fraction

    def point(self, signs, tail_sign=1):
        """Attractor point with the given leading signs and a constant tail sign."""
        offset = Fraction(0)
        for m, sign in enumerate(signs):
            offset += sign * (1 - self.beta) * self.beta**m * self.rho
        offset += tail_sign * self.beta ** len(signs) * self.rho
        return self.anchor.shifted([offset * vi for vi in self.direction])


def _max_norm(a, b):
    return max(abs(x - y) for x, y in zip(a, b))


def attractor_distance_bounds(spec, q, depth):
    """Exact (lower, upper) bounds on dist(q, S_rho) from the 2^depth sign prefixes."""
    beta, rho = spec.beta, spec.rho
    v = [Fraction(vi) for vi in spec.direction]
    target = q.coords
    best = {"lower": None, "upper": None}

    def explore(offset, level):
        center = [a + offset * vi for a, vi in zip(spec.anchor.coords, v)]
        tail = beta**level * rho
        reach = _max_norm(target, center)
        bound = max(Fraction(0), reach - tail)
        if best["upper"] is not None and bound >= best["upper"]:
            return
        if level == depth:
            upper = _max_norm(target, [ci + tail * vi for ci, vi in zip(center, v)])
            if best["lower"] is None or bound < best["lower"]:
                best["lower"] = bound
            if best["upper"] is None or upper < best["upper"]:
                best["upper"] = upper
            return
        step = (1 - beta) * beta**level * rho
        children = [offset + step, offset - step]
        children.sort(
            key=lambda o: _max_norm(target, [a + o * vi for a, vi in zip(spec.anchor.coords, v)])
        )
        for child in children:
            explore(child, level + 1)

    explore(Fraction(0), 0)
    return best["lower"], best["upper"]


def unit_vector(dim, axis=0):
    return tuple(Fraction(1) if i == axis else Fraction(0) for i in range(dim))


class BanachBobAvoid(Strategy):
    """Bob keeps the outcome off x0 in the absolute game on R^d.

    Once the current center x lies off the attractor S_rho anchored at x0,
    Bob only plays B(x +- (1-beta) rho v, beta rho); every outcome is then
    x + (a point of S_rho - x0), which never equals x0.
    """

    name = "banach-avoid"
    variants = ("absolute",)
    max_depth = 12
    grid = 8

    def __init__(self, role, x0, v=None):
        super().__init__(role, x0=x0, v=v)
        self.x0 = x0
        self.v = v

    def direction(self, space):
        return unit_vector(space.dim) if self.v is None else tuple(Fraction(vi) for vi in self.v)

    def certified_off(self, variant, space, x, rho):
        """True when x is certified to lie outside S_rho."""
        v = self.direction(space)
        if space.dim > 1 and line_distance(x, self.x0, v) > 0:
            return True
        spec = AttractorSpec(self.x0, v, variant.beta, rho)
        for depth in range(self.max_depth + 1):
            lower, _ = attractor_distance_bounds(spec, x, depth)
            if lower > 0:
                return True
        return False

    def score(self, variant, space, z, rho):
        v = self.direction(space)
        if space.dim > 1:
            return line_distance(z, self.x0, v)
        spec = AttractorSpec(self.x0, v, variant.beta, rho)
        lower, _ = attractor_distance_bounds(spec, z, self.max_depth)
        return lower

    def move(self, variant, space, history):
        if not isinstance(space, RealMaxSpace):
            raise PreconditionViolated("banach-avoid plays only on realmax spaces")
        if not variant.beta < Fraction(1, 3):
            raise PreconditionViolated(f"beta={variant.beta} is not below 1/3")
        outer, deleted = history[-2].ball, history[-1].ball
        x, rho = outer.center, outer.radius
        radius = variant.beta * rho
        v = self.direction(space)
        if self.certified_off(variant, space, x, rho):
            for sign in (1, -1):
                z = x.shifted([sign * (1 - variant.beta) * rho * vi for vi in v])
                candidate = Move(FormalBall(z, radius))
                try:
                    validate_move(variant, space, history, candidate)
                except IllegalMove:
                    continue
                return candidate
            raise NoLegalCandidate(f"both candidate balls around {x} meet the deletion")
        return self.free_move(variant, space, history, x, rho, radius)

    def free_move(self, variant, space, history, x, rho, radius):
        reach = rho - radius
        steps = [Fraction(k, self.grid) * reach for k in range(-self.grid, self.grid + 1)]
        candidates = []
        for axis in range(space.dim):
            for step in steps:
                if step != 0:
                    candidates.append(x.shifted([step * ui for ui in unit_vector(space.dim, axis)]))
        best, best_score = None, None
        for z in sorted(candidates, key=lambda p: p.coords):
            move = Move(FormalBall(z, radius))
            try:
                validate_move(variant, space, history, move)
            except IllegalMove:
                continue
            score = self.score(variant, space, z, radius)
            if score > 0 and (best is None or score > best_score):
                best, best_score = move, score
        if best is None:
            raise NoLegalCandidate(f"no certified free move inside {history[-2].ball}")
        _logger.debug(f"banach-avoid free move to {best.ball} with margin {best_score}")
        return best


def banach_bob_avoid(x0, v=None):
    return BanachBobAvoid(BOB, x0, v)


def candidate_gap(space, x, beta, rho, v=None):
    """Exact gap between the two candidate balls B(x +- (1-beta) rho v, beta rho)."""
    v = unit_vector(space.dim) if v is None else v
    plus = x.shifted([(1 - beta) * rho * vi for vi in v])
    minus = x.shifted([-(1 - beta) * rho * vi for vi in v])
    return space.distance(plus, minus) - 2 * beta * rho


class TargetChaser(Strategy):
    name = "chaser"
    variants = ("schmidt", "strong")

    def __init__(self, role, t):
        super().__init__(role, t=t)
        self.t = t

    def move(self, variant, space, history):
        if not ball_contains_point(space, history[0].ball, self.t):
            raise TargetOutside(f"{self.t} lies outside the initial ball {history[0].ball}")
        prev = _current(history)
        radius = variant.factor(self.role) * prev.radius
        reach = prev.radius - radius
        return Move(FormalBall(self.project(space, prev.center, reach), radius))

    def project(self, space, x, reach):
        if isinstance(space, RealMaxSpace):
            gap = max(
                max(Fraction(0), abs(ti - xi) - reach) for ti, xi in zip(self.t.coords, x.coords)
            )
            # lexicographically smallest point of the box at max-norm distance gap from t
            return EuclideanPoint(
                tuple(max(xi - reach, ti - gap) for ti, xi in zip(self.t.coords, x.coords))
            )
        if space.distance(x, self.t) <= reach:
            return self.t
        candidates = [z for tier in space.center_tiers(x, reach) for z in tier]
        candidates = [z for z in candidates if space.distance(x, z) <= reach]
        return min(candidates, key=lambda z: space.distance(z, self.t))


def target_chaser(t, role=ALICE):
    return TargetChaser(role, t)


def crossable_threshold(radius):
    """Threshold index k with 4^-k <= radius, when a legal Strong(1/2,1/2) move can cross it."""
    k = cylinder_length(radius)
    if radius < 2 * Fraction(1, 4**k):
        return k
    return None


class ThresholdControl(Strategy):
    """Copy the ball unless a radius threshold 4^-k can be crossed; then cross it.

    Crossing fixes digit k of the limit to the previous center's digit k; the
    new center carries the desired digit from position k+1 on.
    """

    name = "threshold-control"
    variants = ("strong",)

    def __init__(self, role, digit="1"):
        super().__init__(role, digit=str(digit))
        if str(digit) not in ("0", "1"):
            raise ValueError(f"Desired digit must be 0 or 1, got {digit!r}")
        self.digit = str(digit)

    def move(self, variant, space, history):
        if variant.alpha != Fraction(1, 2) or variant.beta != Fraction(1, 2):
            raise PreconditionViolated("threshold-control plays Strong(1/2,1/2) only")
        prev = _current(history)
        k = crossable_threshold(prev.radius)
        if k is None:
            return Move(prev)
        center = space.with_tail(prev.center, k + 1, self.digit)
        return Move(FormalBall(center, prev.radius / 2))


def threshold_control(role, desired_tail_digit="1"):
    return ThresholdControl(role, desired_tail_digit)


def good_turns(transcript):
    """(index, k, player, fixed digit) for every move with rho_n < 4^-k <= rho_{n-1}."""
    turns = []
    moves = transcript.moves
    for index in range(2, len(moves) + 1):
        prev, ball = moves[index - 2].ball, moves[index - 1].ball
        k = cylinder_length(prev.radius)
        if ball.radius < Fraction(1, 4**k):
            turns.append((index, k, player_of(index), ball.center.digit(k)))
    return turns


class RandomLegal(Strategy):
    """Seeded random legal opponent; its randomness is a function of the history."""

    name = "random"

    def __init__(self, role, seed=0):
        super().__init__(role, seed=int(seed))
        self.seed = int(seed)
        self.tries = 16

    def rng(self, history):
        digest = zlib.crc32(repr(history[-1]).encode()) if history else 0
        return np.random.default_rng([self.seed, len(history), digest])

    def move(self, variant, space, history):
        rng = self.rng(history)
        prev = _current(history)
        if variant.name == "absolute" and self.role == ALICE:
            radius = variant.beta * prev.radius * Fraction(int(rng.integers(1, 5)), 4)
            center = space.random_point_near(rng, prev.center, prev.radius)
            return Move(FormalBall(center, radius), delete=True)
        base = minimal_radius(variant, history)
        outer = prev if variant.name != "absolute" else history[-2].ball
        for _ in range(self.tries):
            radius = base
            if variant.name != "schmidt":
                radius += (outer.radius - base) * Fraction(int(rng.integers(0, 4)), 8)
            reach = outer.radius - radius
            center = space.random_point_near(rng, outer.center, reach) if reach > 0 else outer.center
            move = Move(FormalBall(center, radius))
            try:
                validate_move(variant, space, history, move)
            except IllegalMove:
                continue
            return move
        return MinRadius(self.role).move(variant, space, history)


def random_legal(role, seed=0):
    return RandomLegal(role, seed)


def describe_strategy(strategy):
    parts = []
    for key, value in strategy.params.items():
        if value is None:
            continue
        if isinstance(value, Fraction):
            value = format_rational(value)
        parts.append(f"{key}={value}")
    return f"{strategy.name}({','.join(parts)})"
