"""Rulesets, legality checking, game execution and outcomes.

Moves are numbered from 1. Odd moves belong to Bob, even moves to Alice;
move 1 is the initial ball. A transcript's horizon counts the moves played
after the initial ball.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from game_utils import ConfigError, format_rational, parse_rational, read_jsonl, write_jsonl
from metric_spaces import (
    FormalBall,
    RealMaxSpace,
    ball_contains_point,
    balls_disjoint,
    format_ball,
    make_space,
    parse_ball,
)

_logger = logging.getLogger(__name__)

ALICE = "Alice"
BOB = "Bob"
UNDECIDED = "UndecidedAtHorizon"

# radius laws a strategy can commit to for the rest of a game
SHRINKS = "shrinks"
CONSTANT = "constant"


class IllegalMove(ValueError):
    def __init__(self, reason, certificate=None):
        super().__init__(reason)
        self.reason = reason
        self.certificate = certificate


class StrategyIllegalMove(RuntimeError):
    def __init__(self, strategy, index, error):
        super().__init__(f"Strategy {strategy} made an illegal move {index}: {error.reason}")
        self.strategy = strategy
        self.index = index
        self.certificate = error.certificate


class NotPlayable(ValueError):
    pass


def _check_unit(name, value):
    value = Fraction(value)
    if not 0 < value < 1:
        raise ValueError(f"{name} must lie in (0, 1), got {value}")
    return value


@dataclass(frozen=True)
class Schmidt:
    alpha: Fraction
    beta: Fraction
    name = "schmidt"

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_unit("alpha", self.alpha))
        object.__setattr__(self, "beta", _check_unit("beta", self.beta))

    def factor(self, player):
        return self.alpha if player == ALICE else self.beta


@dataclass(frozen=True)
class Strong(Schmidt):
    name = "strong"


@dataclass(frozen=True)
class Absolute:
    beta: Fraction
    name = "absolute"
    alpha = None

    def __post_init__(self):
        object.__setattr__(self, "beta", _check_unit("beta", self.beta))


def make_variant(name, alpha=None, beta=None):
    name = str(name).strip().lower()
    try:
        if name == "schmidt":
            return Schmidt(parse_rational(alpha), parse_rational(beta))
        if name == "strong":
            return Strong(parse_rational(alpha), parse_rational(beta))
        if name == "absolute":
            return Absolute(parse_rational(beta))
    except ValueError as error:
        if isinstance(error, ConfigError):
            raise
        raise ConfigError(str(error))
    raise ConfigError(f"Unknown variant {name!r}")


def check_playable(variant, space):
    """The absolute game needs beta < c/5, or beta < 1/3 in a Banach space."""
    if variant.name != "absolute":
        return
    if space.c is not None and variant.beta < space.c / 5:
        return
    if space.is_banach and variant.beta < Fraction(1, 3):
        return
    raise NotPlayable(
        f"Absolute game with beta={variant.beta} is not playable on {space.describe()} "
        f"(needs beta < c/5 = {space.c / 5})"
    )


def player_of(index):
    return BOB if index % 2 == 1 else ALICE


@dataclass(frozen=True)
class Move:
    ball: FormalBall
    delete: bool = False

    @property
    def kind(self):
        return "delete" if self.delete else "ball"


@dataclass(frozen=True)
class Inequality:
    label: str
    lhs: Fraction
    op: str
    rhs: Fraction

    def holds(self):
        if self.op == "=":
            return self.lhs == self.rhs
        if self.op == "<=":
            return self.lhs <= self.rhs
        if self.op == ">=":
            return self.lhs >= self.rhs
        if self.op == ">":
            return self.lhs > self.rhs
        raise AssertionError(self.op)

    def __str__(self):
        return f"{self.label}: {format_rational(self.lhs)} {self.op} {format_rational(self.rhs)}"


@dataclass(frozen=True)
class LegalityCertificate:
    index: int
    player: str
    inequalities: tuple = ()

    def strings(self):
        return [str(ineq) for ineq in self.inequalities]


def validate_move(variant, space, history, move, player=None):
    """Check `move` as the next move after `history`; returns the certificate or raises IllegalMove."""
    index = len(history) + 1
    expected = player_of(index)
    if player is not None and player != expected:
        raise IllegalMove(f"wrong player parity: move {index} belongs to {expected}")
    space.check_point(move.ball.center)
    if index == 1:
        if move.delete:
            raise IllegalMove("the initial ball cannot be a deletion")
        return LegalityCertificate(index, expected)

    radius = move.ball.radius
    if variant.name in ("schmidt", "strong"):
        if move.delete:
            raise IllegalMove(f"{variant.name} game has no deletions")
        prev = history[-1].ball
        op = "=" if variant.name == "schmidt" else ">="
        inequalities = (
            Inequality("radius", radius, op, variant.factor(expected) * prev.radius),
            Inequality(
                "nested", radius + space.distance(prev.center, move.ball.center), "<=", prev.radius
            ),
        )
    elif expected == ALICE:
        if not move.delete:
            raise IllegalMove("Alice must delete a ball in the absolute game")
        prev = history[-1].ball
        inequalities = (Inequality("deletion radius", radius, "<=", variant.beta * prev.radius),)
    else:
        if move.delete:
            raise IllegalMove("Bob cannot delete in the absolute game")
        prev = history[-2].ball
        deleted = history[-1].ball
        inequalities = (
            Inequality("radius", radius, ">=", variant.beta * prev.radius),
            Inequality(
                "nested", radius + space.distance(prev.center, move.ball.center), "<=", prev.radius
            ),
            Inequality(
                "disjoint",
                space.distance(deleted.center, move.ball.center),
                ">",
                radius + deleted.radius,
            ),
        )
    certificate = LegalityCertificate(index, expected, inequalities)
    for ineq in inequalities:
        if not ineq.holds():
            raise IllegalMove(f"{ineq.label} violated ({ineq})", certificate)
    return certificate


@dataclass(frozen=True)
class Transcript:
    variant: object
    space: object
    moves: tuple
    certificates: tuple
    horizon: int
    aborted: bool = False
    schedule: Optional[str] = None

    @property
    def initial(self):
        return self.moves[0].ball

    @property
    def rounds(self):
        return len(self.moves) - 1

    def balls(self):
        return [move.ball for move in self.moves if not move.delete]

    def bob_balls(self):
        return [move.ball for i, move in enumerate(self.moves) if i % 2 == 0]

    def enclosure(self):
        """Last ball played; in the absolute game, Bob's last ball."""
        return self.balls()[-1]


def declared_schedule(variant, alice, bob):
    """Radius law that the rules or both strategies guarantee from now on, or None."""
    if variant.name == "schmidt":
        return SHRINKS
    laws = [
        getattr(strategy, "radius_law", lambda v: None)(variant) for strategy in (alice, bob)
    ]
    if SHRINKS in laws:
        return SHRINKS
    if laws == [CONSTANT, CONSTANT]:
        return CONSTANT
    return None


def continue_game(variant, space, alice, bob, prefix, horizon):
    """Play from a legal prefix until `horizon` moves follow the initial ball."""
    if horizon < 0:
        raise ValueError(f"Horizon must be non-negative, got {horizon}")
    moves, certificates = [], []
    for move in prefix:
        certificates.append(validate_move(variant, space, tuple(moves), move))
        moves.append(move)
    aborted = False
    while len(moves) < horizon + 1:
        index = len(moves) + 1
        strategy = bob if player_of(index) == BOB else alice
        move = strategy(variant, space, tuple(moves))
        if move is None:
            _logger.info(f"{strategy} aborted at move {index}")
            aborted = True
            break
        try:
            certificates.append(validate_move(variant, space, tuple(moves), move))
        except IllegalMove as error:
            raise StrategyIllegalMove(strategy, index, error)
        moves.append(move)
        _logger.debug(f"move {index} by {player_of(index)}: {move}")
    schedule = declared_schedule(variant, alice, bob)
    return Transcript(
        variant, space, tuple(moves), tuple(certificates), horizon, aborted, schedule
    )


def run_game(variant, space, alice, bob, initial, horizon):
    check_playable(variant, space)
    for strategy, role in ((alice, ALICE), (bob, BOB)):
        if getattr(strategy, "role", role) != role:
            raise ValueError(f"{strategy} is declared for {strategy.role}, not {role}")
        variants = getattr(strategy, "variants", None)
        if variants is not None and variant.name not in variants:
            raise ValueError(f"{strategy} does not play the {variant.name} game")
    transcript = continue_game(variant, space, alice, bob, (Move(initial),), horizon)
    _logger.info(
        f"{variant.name} game on {space.describe()}: {transcript.rounds} moves, "
        f"final radius {transcript.enclosure().radius}"
    )
    return transcript


@dataclass(frozen=True)
class TargetSet:
    name: str
    contains: Callable
    dense: bool = False
    # (space, ball) -> "inside" | "disjoint" | None
    relation: Optional[Callable] = field(default=None, compare=False)

    def relation_to(self, space, ball):
        if self.relation is None:
            return None
        return self.relation(space, ball)


def everything_target():
    return TargetSet("everything", lambda p: True, True, lambda space, ball: "inside")


def empty_target():
    return TargetSet("empty", lambda p: False, False, lambda space, ball: "disjoint")


def point_complement_target(space, y):
    def relation(space_, ball):
        return None if ball_contains_point(space_, ball, y) else "inside"

    return TargetSet(f"complement of {space.format_point(y)}", lambda p: p != y, True, relation)


def point_target(space, y):
    def relation(space_, ball):
        return None if ball_contains_point(space_, ball, y) else "disjoint"

    return TargetSet(f"point {space.format_point(y)}", lambda p: p == y, False, relation)


def ball_complement_target(space, excluded):
    def relation(space_, ball):
        if space_.ball_subset(ball, excluded):
            return "disjoint"
        if balls_disjoint(space_, ball, excluded):
            return "inside"
        return None

    return TargetSet(
        f"complement of {format_ball(space, excluded)}",
        lambda p: space.distance(excluded.center, p) > excluded.radius,
        False,
        relation,
    )


def merge_intervals(intervals):
    merged = []
    for lo, hi in sorted((Fraction(a), Fraction(b)) for a, b in intervals):
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def interval_union_target(intervals):
    """Finite union of closed intervals in RealMax(1)."""
    merged = merge_intervals(intervals)

    def contains(p):
        return any(lo <= p.coords[0] <= hi for lo, hi in merged)

    def relation(space, ball):
        x, r = ball.center.coords[0], ball.radius
        if any(lo <= x - r and x + r <= hi for lo, hi in merged):
            return "inside"
        if all(x + r < lo or hi < x - r for lo, hi in merged):
            return "disjoint"
        return None

    name = " u ".join(f"[{format_rational(lo)},{format_rational(hi)}]" for lo, hi in merged)
    return TargetSet(name or "empty", contains, False, relation)


@dataclass(frozen=True)
class Outcome:
    enclosure: FormalBall
    rho_lower: Fraction
    rho_upper: Fraction
    shrinking: bool
    winner: str

    @property
    def limit_radius(self):
        """Exact limit radius when known, else None."""
        return self.rho_lower if self.rho_lower == self.rho_upper else None


def limit_radius_bounds(transcript):
    """Exact limit radius when the schedule is forced or declared, else [0, last]."""
    last = transcript.enclosure().radius
    if transcript.variant.name == "schmidt" or transcript.schedule == SHRINKS:
        return Fraction(0), Fraction(0)
    if transcript.schedule == CONSTANT:
        return last, last
    return Fraction(0), last


def outcome(transcript, target):
    enclosure = transcript.enclosure()
    rho_lower, rho_upper = limit_radius_bounds(transcript)
    shrinking = rho_upper == 0
    relation = target.relation_to(transcript.space, enclosure)
    if relation == "inside":
        winner = ALICE
    elif relation == "disjoint":
        winner = BOB
    elif shrinking:
        winner = ALICE if target.contains(enclosure.center) else BOB
    elif target.dense and rho_lower > 0:
        # a ball of positive radius meets every dense set
        winner = ALICE
    else:
        winner = UNDECIDED
    return Outcome(enclosure, rho_lower, rho_upper, shrinking, winner)


def compatible_plays(strategy, variant, space, prefix, menu, depth):
    """Yield every extension of `prefix` by `depth` moves where `strategy` plays its role.

    Opponent moves come from `menu`, a list of moves or a callable
    (variant, space, history) -> moves; illegal menu entries are skipped.
    """
    prefix = tuple(prefix)
    target_length = len(prefix) + depth

    def extend(history):
        if len(history) == target_length:
            yield history
            return
        index = len(history) + 1
        if player_of(index) == strategy.role:
            move = strategy(variant, space, history)
            if move is None:
                return
            validate_move(variant, space, history, move)
            yield from extend(history + (move,))
            return
        options = menu(variant, space, history) if callable(menu) else menu
        for option in options:
            try:
                validate_move(variant, space, history, option)
            except IllegalMove:
                continue
            yield from extend(history + (option,))

    yield from extend(prefix)


def minimal_radius(variant, history):
    """Smallest legal radius for the next move."""
    index = len(history) + 1
    player = player_of(index)
    if variant.name == "absolute":
        if player == ALICE:
            return variant.beta * history[-1].ball.radius
        return variant.beta * history[-2].ball.radius
    return variant.factor(player) * history[-1].ball.radius


def grid_menu(step):
    """Menu of moves with minimal radius and centers on multiples of `step` (RealMax only)."""
    step = Fraction(step)

    def menu(variant, space, history):
        assert isinstance(space, RealMaxSpace)
        index = len(history) + 1
        radius = minimal_radius(variant, history)
        delete = variant.name == "absolute" and player_of(index) == ALICE
        if delete:
            outer, reach = history[-1].ball, history[-1].ball.radius
        else:
            outer = history[-1].ball if variant.name != "absolute" else history[-2].ball
            reach = outer.radius - radius
        axes = []
        for x in outer.center.coords:
            lo = math.ceil((x - reach) / step)
            hi = math.floor((x + reach) / step)
            axes.append([k * step for k in range(lo, hi + 1)])
        return [
            Move(FormalBall(type(outer.center)(coords), radius), delete)
            for coords in itertools.product(*axes)
        ]

    return menu


def variant_record(variant):
    record = {"variant": variant.name, "beta": format_rational(variant.beta)}
    if variant.alpha is not None:
        record["alpha"] = format_rational(variant.alpha)
    return record


def transcript_records(transcript, extra=None):
    extra = extra or {}
    header = {
        "type": "game",
        **variant_record(transcript.variant),
        "space": transcript.space.describe(),
        "horizon": transcript.horizon,
        "aborted": transcript.aborted,
        "schedule": transcript.schedule,
        **extra,
    }
    yield header
    for index, (move, certificate) in enumerate(
        zip(transcript.moves, transcript.certificates), start=1
    ):
        yield {
            "type": "move",
            "index": index,
            "player": player_of(index),
            "kind": move.kind,
            "center": transcript.space.format_point(move.ball.center),
            "radius": format_rational(move.ball.radius),
            "certificate": certificate.strings(),
            **extra,
        }


def write_transcript(path, transcript, extra=None):
    write_jsonl(path, transcript_records(transcript, extra))


def transcripts_from_records(records):
    """Rebuild transcripts from header/move records; moves are re-validated."""
    header, moves = None, []

    def finish():
        variant = make_variant(header["variant"], header.get("alpha"), header["beta"])
        space = make_space(header["space"])
        prefix = [
            Move(parse_ball(space, f"{rec['center']}@{rec['radius']}"), rec["kind"] == "delete")
            for rec in moves
        ]
        played = continue_game(variant, space, None, None, prefix, len(prefix) - 1)
        return header, Transcript(
            variant,
            space,
            played.moves,
            played.certificates,
            header["horizon"],
            header["aborted"],
            header.get("schedule"),
        )

    for record in records:
        if record["type"] == "game":
            if header is not None:
                yield finish()
            header, moves = record, []
        else:
            moves.append(record)
    if header is not None:
        yield finish()


def read_transcript(path):
    results = list(transcripts_from_records(read_jsonl(path)))
    if len(results) != 1:
        raise ConfigError(f"{path} holds {len(results)} games, expected one")
    return results[0][1]
