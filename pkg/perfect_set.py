"""Finite-depth perfect-set construction: the split step and the binary tree of plays."""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from tqdm import tqdm

from game_engine import BOB, Move, continue_game, player_of, transcript_records
from game_utils import format_rational, write_csv, write_jsonl
from metric_spaces import RealMaxSpace, ball_contains_point, balls_disjoint
from strategies import (
    AbsoluteBobAvoidPoint,
    BanachBobAvoid,
    MinRadius,
    SchmidtAvoidPoint,
    schmidt_threshold,
)

_logger = logging.getLogger(__name__)


class RegimeUnsupported(ValueError):
    pass


class PrecisionExhausted(RuntimeError):
    pass


def avoid_strategy(variant, space):
    """Bob's point-avoiding strategy for a nondegenerate regime."""
    c = space.c
    if variant.name in ("schmidt", "strong"):
        if variant.alpha < schmidt_threshold(c) and variant.beta < schmidt_threshold(c):
            return lambda y: SchmidtAvoidPoint(BOB, y, c)
    elif variant.beta < (c / 5) ** 2:
        return lambda y: AbsoluteBobAvoidPoint(BOB, y)
    elif isinstance(space, RealMaxSpace) and variant.beta < Fraction(1, 3):
        return lambda y: BanachBobAvoid(BOB, y)
    raise RegimeUnsupported(
        f"{variant} on {space.describe()} is outside the implemented nondegenerate regimes"
    )


def shrink_ratio(variant):
    if variant.name == "absolute":
        return Fraction(1, 2)
    return variant.alpha * variant.beta


def default_move_cap(variant, levels):
    """Move cap 10 * ceil(log_{1/ratio} 2) * levels, counted in rounds of two moves."""
    ratio = shrink_ratio(variant)
    rounds = 10 * math.ceil(math.log(2) / math.log(1 / ratio)) * max(1, levels)
    return 2 * rounds


class AvoidThenShrink:
    """Bob avoids y until his ball excludes it, then plays min-radius."""

    def __init__(self, avoid, y):
        self.avoider = avoid(y)
        self.shrinker = MinRadius(BOB)
        self.y = y
        self.role = BOB

    def __call__(self, variant, space, history):
        current = history[-2] if variant.name == "absolute" else history[-1]
        if not ball_contains_point(space, current.ball, self.y):
            return self.shrinker(variant, space, history)
        return self.avoider(variant, space, history)

    def __repr__(self):
        return f"avoid-then-shrink({self.y})"


@dataclass(frozen=True)
class SplitPair:
    prefix: tuple
    first: object
    second: object
    gap: Fraction
    diameters: tuple


def _diameter(transcript):
    return 2 * transcript.enclosure().radius


def split(sigma_a, variant, space, prefix, r, max_moves=None):
    """Two sigma_a-compatible extensions of `prefix` with disjoint enclosures of diameter < r."""
    avoid = avoid_strategy(variant, space)
    r = Fraction(r)
    prefix = tuple(prefix)
    base = len(prefix) - 1
    if max_moves is None:
        max_moves = default_move_cap(variant, max(1, math.ceil(math.log2(1 / r)) + 1))
    bob = MinRadius(BOB)

    horizon_first = base
    first = continue_game(variant, space, sigma_a, bob, prefix, horizon_first)
    # locate the shrinking point of the min-radius continuation
    while first.enclosure().radius >= r / 4 or player_of(len(first.moves)) != BOB:
        if horizon_first - base >= max_moves:
            raise PrecisionExhausted(f"could not locate the limit point within {max_moves} moves")
        horizon_first += 1
        first = continue_game(variant, space, sigma_a, bob, prefix, horizon_first)
    x = first.enclosure().center

    avoider = AvoidThenShrink(avoid, x)
    horizon_second = base
    second = continue_game(variant, space, sigma_a, avoider, prefix, horizon_second)
    while True:
        e1, e2 = first.enclosure(), second.enclosure()
        done = (
            2 * e1.radius < r
            and 2 * e2.radius < r
            and balls_disjoint(space, e1, e2)
            and player_of(len(first.moves)) == BOB
            and player_of(len(second.moves)) == BOB
        )
        if done:
            break
        if max(horizon_first, horizon_second) - base >= max_moves:
            raise PrecisionExhausted(f"split did not separate within {max_moves} moves")
        # extend the play whose enclosure is larger
        if (e1.radius, -horizon_first) >= (e2.radius, -horizon_second):
            horizon_first += 1
            first = continue_game(variant, space, sigma_a, bob, prefix, horizon_first)
        else:
            horizon_second += 1
            second = continue_game(variant, space, sigma_a, avoider, prefix, horizon_second)
    e1, e2 = first.enclosure(), second.enclosure()
    gap = space.distance(e1.center, e2.center) - e1.radius - e2.radius
    _logger.debug(f"split at {len(prefix)} moves: gap {gap}, moves {first.rounds}/{second.rounds}")
    return SplitPair(prefix, first, second, gap, (_diameter(first), _diameter(second)))


@dataclass
class PerfectTree:
    variant: object
    space: object
    depth: int
    # binary path -> transcript
    nodes: dict = field(default_factory=dict)
    strategy: object = None

    def level(self, j):
        return sorted(path for path in self.nodes if len(path) == j)

    def leaves(self):
        return self.level(self.depth)


def build_perfect_tree(sigma_a, variant, space, initial, depth, max_moves=None):
    if depth < 0:
        raise ValueError(f"Depth must be non-negative, got {depth}")
    if max_moves is None:
        max_moves = default_move_cap(variant, depth)
    root = continue_game(variant, space, sigma_a, MinRadius(BOB), (Move(initial),), 0)
    tree = PerfectTree(variant, space, depth, {"": root}, sigma_a)
    for level in range(depth):
        r = Fraction(1, 2**level)
        for path in tqdm(tree.level(level), desc=f"Splitting level {level}"):
            pair = split(sigma_a, variant, space, tree.nodes[path].moves, r, max_moves)
            tree.nodes[path + "0"] = pair.first
            tree.nodes[path + "1"] = pair.second
    _logger.info(f"Built perfect tree of depth {depth} with {len(tree.leaves())} leaves")
    return tree


@dataclass
class TreeReport:
    checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    min_gap: Fraction = None
    rows: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def record(self, name, ok, detail=""):
        counts = self.checks.setdefault(name, [0, 0])
        counts[0] += 1
        if not ok:
            counts[1] += 1
            self.failures.append(f"{name}: {detail}")


def _gap(space, a, b):
    return space.distance(a.center, b.center) - a.radius - b.radius


def verify_tree(tree):
    """Audit monotonicity, sibling gaps, containment, diameters and leaf injectivity."""
    report = TreeReport()
    space = tree.space
    for j in range(tree.depth + 1):
        paths = tree.level(j)
        report.record("cardinality", len(paths) == 2**j, f"level {j} has {len(paths)} nodes")
        min_gap, max_diameter = None, Fraction(0)
        for path in paths:
            node = tree.nodes[path]
            max_diameter = max(max_diameter, _diameter(node))
            if tree.strategy is not None:
                report.record("compatible", _compatible(tree, node), path)
            if j == 0:
                continue
            parent = tree.nodes[path[:-1]]
            report.record(
                "monotone", node.moves[: len(parent.moves)] == parent.moves, path
            )
            report.record(
                "containment",
                space.ball_subset(node.enclosure(), parent.enclosure()),
                path,
            )
            report.record(
                "diameter", _diameter(node) < Fraction(1, 2 ** (j - 1)), path
            )
            if path.endswith("0"):
                sibling = tree.nodes.get(path[:-1] + "1")
                if sibling is None:
                    continue
                gap = _gap(space, node.enclosure(), sibling.enclosure())
                report.record("sibling gap", gap > 0, f"{path} gap {gap}")
                if min_gap is None or gap < min_gap:
                    min_gap = gap
        report.rows.append(
            {
                "level": j,
                "min_gap": "" if min_gap is None else format_rational(min_gap),
                "max_diameter": format_rational(max_diameter),
            }
        )
        if min_gap is not None and (report.min_gap is None or min_gap < report.min_gap):
            report.min_gap = min_gap
    leaves = [tree.nodes[path] for path in tree.leaves()]
    for i, a in enumerate(leaves):
        for b in leaves[i + 1 :]:
            report.record(
                "leaf injectivity",
                balls_disjoint(space, a.enclosure(), b.enclosure()),
                f"{a.enclosure()} meets {b.enclosure()}",
            )
    return report


def _compatible(tree, transcript):
    for index in range(2, len(transcript.moves) + 1, 2):
        history = transcript.moves[: index - 1]
        if tree.strategy(tree.variant, tree.space, history) != transcript.moves[index - 1]:
            return False
    return True


def write_tree(path, tree):
    records = []
    for node_path in sorted(tree.nodes, key=lambda p: (len(p), p)):
        records.extend(transcript_records(tree.nodes[node_path], {"path": node_path}))
    write_jsonl(path, records)


def write_tree_report(path, report):
    return write_csv(report.rows, ["level", "min_gap", "max_diameter"], path)
