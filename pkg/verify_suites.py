"""Property suites behind `main.py verify`.

Every suite returns a SuiteReport with one PropertyResult per property:
how many instances were checked and how many failed.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from tqdm import tqdm

import analysis_lab
from game_engine import (
    ALICE,
    BOB,
    Absolute,
    Schmidt,
    StrategyIllegalMove,
    Strong,
    continue_game,
    merge_intervals,
    player_of,
    run_game,
    transcript_records,
)
from game_utils import ConfigError
from metric_spaces import (
    BinarySeqSpace,
    BinarySeqPoint,
    CantorPoint,
    CantorTernarySpace,
    EuclideanPoint,
    FormalBall,
    RealMaxSpace,
    ball_subset,
    balls_disjoint,
    disjoint_ball_picker,
    formal_leq,
    uniform_perfect_witness,
)
from perfect_set import build_perfect_tree, verify_tree
from strategies import (
    AttractorSpec,
    NoLegalCandidate,
    absolute_avoid_point,
    absolute_bob_avoid_point,
    absolute_center_delete,
    attractor_distance_bounds,
    banach_bob_avoid,
    candidate_gap,
    copycat,
    good_turns,
    min_radius,
    random_legal,
    schmidt_avoid_point,
    schmidt_threshold,
    target_chaser,
    threshold_control,
)

_logger = logging.getLogger(__name__)

SUITES = ("geometry", "engine", "strategies", "tree", "lab")

# inner (c:02, 1/6) lies inside outer (c:, 1/3) as sets, but not formally
CANTOR_COUNTEREXAMPLE = (
    FormalBall(CantorPoint("02"), Fraction(1, 6)),
    FormalBall(CantorPoint(""), Fraction(1, 3)),
)


@dataclass
class PropertyResult:
    name: str
    checked: int = 0
    failed: int = 0
    detail: str = ""

    def check(self, ok, detail=""):
        self.checked += 1
        if not ok:
            self.failed += 1
            if not self.detail:
                self.detail = detail

    @property
    def passed(self):
        return self.failed == 0


@dataclass
class SuiteReport:
    name: str
    properties: dict = field(default_factory=dict)

    def prop(self, name):
        return self.properties.setdefault(name, PropertyResult(name))

    @property
    def passed(self):
        return all(p.passed for p in self.properties.values())

    def rows(self):
        return [
            {
                "property": p.name,
                "checked": p.checked,
                "failed": p.failed,
                "status": "pass" if p.passed else "FAIL",
                "detail": p.detail,
            }
            for p in self.properties.values()
        ]


def all_spaces():
    return [RealMaxSpace(1), RealMaxSpace(2), CantorTernarySpace(), BinarySeqSpace()]


def random_radius(rng, denominator=16):
    return Fraction(int(rng.integers(1, denominator + 1)), denominator)


def random_ball(rng, space):
    return FormalBall(space.random_point(rng), random_radius(rng))


def random_sub_ball(rng, space, outer):
    radius = outer.radius * random_radius(rng)
    center = space.random_point_near(rng, outer.center, outer.radius - radius)
    return FormalBall(center, radius)


def geometry_suite(trials=1000, seed=0):
    report = SuiteReport("geometry")
    rng = np.random.default_rng(seed)
    for space in all_spaces():
        tag = space.describe()
        for _ in tqdm(range(trials), desc=f"Geometry on {tag}"):
            b1 = random_ball(rng, space)
            b2 = random_sub_ball(rng, space, b1) if rng.integers(0, 2) else random_ball(rng, space)
            b3 = random_sub_ball(rng, space, b2)
            leq = formal_leq(space, b2, b1)
            subset = ball_subset(space, b2, b1)
            report.prop("formal_leq implies subset").check(not leq or subset, f"{tag}: {b2} {b1}")
            if space.is_banach:
                report.prop("subset iff formal_leq (realmax)").check(leq == subset, f"{b2} {b1}")
            report.prop("reflexive").check(formal_leq(space, b1, b1))
            if formal_leq(space, b3, b2) and leq:
                report.prop("transitive").check(formal_leq(space, b3, b1), f"{b3} {b2} {b1}")
            if leq and formal_leq(space, b1, b2):
                report.prop("antisymmetric").check(b1 == b2, f"{b1} {b2}")
            p, q, s = (space.random_point(rng) for _ in range(3))
            report.prop("triangle inequality").check(
                space.distance(p, s) <= space.distance(p, q) + space.distance(q, s),
                f"{tag}: {p} {q} {s}",
            )
            report.prop("distance symmetric").check(space.distance(p, q) == space.distance(q, p))
            rho = random_radius(rng)
            w = uniform_perfect_witness(space, p, rho)
            d = space.distance(p, w)
            report.prop("uniform perfect witness").check(
                space.c * rho < d <= rho, f"{tag}: x={p} rho={rho} d={d}"
            )
            deleted = FormalBall(
                space.random_point_near(rng, b1.center, b1.radius), b1.radius * space.c / 10
            )
            picked = disjoint_ball_picker(space, b1, deleted)
            report.prop("disjoint ball picker").check(
                picked.radius == space.c / 5 * b1.radius
                and formal_leq(space, picked, b1)
                and balls_disjoint(space, picked, deleted),
                f"{tag}: {b1} minus {deleted} gave {picked}",
            )
    inner, outer = CANTOR_COUNTEREXAMPLE
    cantor = CantorTernarySpace()
    report.prop("cantor subset without formal_leq").check(
        ball_subset(cantor, inner, outer) and not formal_leq(cantor, inner, outer)
    )
    return report


def cauchy_pairs_hold(transcript):
    space = transcript.space
    bob = transcript.bob_balls()
    for n, m in itertools.combinations(range(len(bob)), 2):
        if space.distance(bob[n].center, bob[m].center) > bob[n].radius - bob[m].radius:
            return False
    return True


def nested(transcript):
    balls = transcript.bob_balls() if transcript.variant.name == "absolute" else transcript.balls()
    return all(ball_subset(transcript.space, b, a) for a, b in zip(balls, balls[1:]))


def enclosure_radii(transcript):
    """Enclosure radius after each prefix of the transcript."""
    radii = []
    for length in range(1, len(transcript.moves) + 1):
        balls = [move.ball for move in transcript.moves[:length] if not move.delete]
        radii.append(balls[-1].radius)
    return radii


def prefix_enclosure(transcript, length):
    prefix = transcript.moves[:length]
    return continue_game(
        transcript.variant, transcript.space, None, None, prefix, len(prefix) - 1
    ).enclosure()


def enclosures_converge(transcript, other, length):
    """Plays sharing `length` moves end within the diameter bound of the shared enclosure."""
    shared = prefix_enclosure(transcript, length)
    first, second = transcript.enclosure(), other.enclosure()
    return transcript.space.distance(first.center, second.center) <= 2 * shared.radius


def random_game_setups():
    """(variant, space) pairs covering every game on every space."""
    setups = []
    for space in all_spaces():
        setups.append((Schmidt(Fraction(1, 2), Fraction(1, 3)), space))
        setups.append((Strong(Fraction(1, 2), Fraction(1, 2)), space))
        setups.append((Absolute(space.c / 10), space))
    return setups


def engine_suite(trials=100, seed=0, horizon=8):
    report = SuiteReport("engine")
    rng = np.random.default_rng(seed)
    for variant, space in random_game_setups():
        for trial in tqdm(range(trials), desc=f"Engine {variant.name} on {space.describe()}"):
            alice = random_legal(ALICE, seed=seed + trial)
            bob = random_legal(BOB, seed=seed + trial + 1)
            initial = FormalBall(space.random_point(rng), 1)
            transcript = run_game(variant, space, alice, bob, initial, horizon)
            report.prop("nested balls").check(nested(transcript), str(transcript.moves))
            report.prop("cauchy estimate").check(cauchy_pairs_hold(transcript))
            radii = enclosure_radii(transcript)
            report.prop("enclosure radius monotone").check(
                all(b <= a for a, b in zip(radii, radii[1:])), str(radii)
            )
            if horizon > 0:
                shorter = run_game(variant, space, alice, bob, initial, horizon - 1)
                report.prop("horizon extends the play").check(
                    shorter.moves == transcript.moves[:-1]
                    and shorter.enclosure().radius >= transcript.enclosure().radius
                )
            length = int(rng.integers(1, len(transcript.moves) + 1))
            other = continue_game(
                variant,
                space,
                random_legal(ALICE, seed=seed + trial + 2),
                random_legal(BOB, seed=seed + trial + 3),
                transcript.moves[:length],
                horizon,
            )
            report.prop("shared prefix bounds outcome distance").check(
                enclosures_converge(transcript, other, length), f"prefix of {length} moves"
            )
            if variant.name == "schmidt":
                radii = [b.radius for b in transcript.balls()]
                report.prop("schmidt radius law").check(
                    all(
                        radii[i] == variant.factor(player_of(i + 1)) * radii[i - 1]
                        for i in range(1, len(radii))
                    )
                )
            again = run_game(variant, space, alice, bob, initial, horizon)
            report.prop("deterministic").check(
                list(transcript_records(transcript)) == list(transcript_records(again))
            )
    return report


def _play_safely(report, name, *args):
    try:
        transcript = run_game(*args)
    except (StrategyIllegalMove, NoLegalCandidate) as error:
        variant, space = args[0], args[1]
        report.prop(f"legality: {name}").check(False, f"{variant} on {space}: {error}")
        return None
    report.prop(f"legality: {name}").check(True)
    return transcript


def legality_roster(variant, space, initial, rng):
    """(name, variant, strategy) for every named strategy that plays on `space`.

    Strategies with a parameter regime get a variant inside that regime.
    """
    near = space.random_point_near(rng, initial.center, initial.radius)
    if variant.name == "absolute":
        nondegenerate = (space.c / 5) ** 2 / 2
        roster = [
            ("center-delete", variant, absolute_center_delete()),
            ("absolute-avoid-point", variant, absolute_avoid_point(near)),
            ("min-radius Bob", variant, min_radius(BOB)),
            ("absolute-bob-avoid", Absolute(nondegenerate), absolute_bob_avoid_point(near)),
        ]
        if isinstance(space, RealMaxSpace):
            roster.append(("banach-avoid", variant, banach_bob_avoid(near)))
        return roster
    gamma = schmidt_threshold(space.c) / 2
    regime = type(variant)(gamma, gamma)
    halves = Strong(Fraction(1, 2), Fraction(1, 2))
    roster = []
    for role in (ALICE, BOB):
        roster.append((f"min-radius {role}", variant, min_radius(role)))
        roster.append((f"chaser {role}", variant, target_chaser(near, role)))
        roster.append((f"avoid-point {role}", regime, schmidt_avoid_point(near, None, role)))
        if variant.name == "strong":
            roster.append((f"copycat {role}", variant, copycat(role)))
        if isinstance(space, BinarySeqSpace) and variant == halves:
            roster.append((f"threshold-control {role}", variant, threshold_control(role, "1")))
    return roster


def legality_sweep(report, trials, seed, horizon):
    rng = np.random.default_rng(seed)
    for variant, space in random_game_setups():
        for trial in tqdm(range(trials), desc=f"Legality {variant.name} on {space.describe()}"):
            initial = FormalBall(space.random_point(rng), 1)
            for name, played, strategy in legality_roster(variant, space, initial, rng):
                opponent = random_legal(BOB if strategy.role == ALICE else ALICE, seed + trial)
                if strategy.role == ALICE:
                    alice, bob = strategy, opponent
                else:
                    alice, bob = opponent, strategy
                _play_safely(report, name, played, space, alice, bob, initial, horizon)


def strategies_suite(trials=100, seed=0, horizon=10, legality_trials=1000):
    report = SuiteReport("strategies")
    rng = np.random.default_rng(seed)
    legality_sweep(report, legality_trials, seed, horizon)
    line = RealMaxSpace(1)
    unit = FormalBall(line.origin(), 1)

    for trial in tqdm(range(trials), desc="Center deletion decay"):
        beta = (Fraction(1, 10), Fraction(1, 20), Fraction(2, 25))[trial % 3]
        transcript = _play_safely(
            report, "center-delete", Absolute(beta), line,
            absolute_center_delete(), random_legal(BOB, seed + trial), unit, horizon,
        )
        if transcript is None:
            continue
        radii = [b.radius for b in transcript.bob_balls()]
        report.prop("center deletion halves radii").check(
            all(b < a / 2 for a, b in zip(radii, radii[1:])), str(radii)
        )

    for _ in tqdm(range(trials), desc="Candidate gap identity"):
        beta = Fraction(int(rng.integers(1, 100)), 300)
        rho = random_radius(rng)
        gap = candidate_gap(line, line.random_point(rng), beta, rho)
        report.prop("candidate gap identity").check(
            gap == 2 * (1 - 2 * beta) * rho and gap > 2 * beta * rho, f"beta={beta} rho={rho}"
        )

    for trial in tqdm(range(trials), desc="Schmidt avoidance"):
        variant = (Schmidt, Strong)[trial % 2](Fraction(1, 5), Fraction(1, 5))
        y = line.random_point_near(rng, line.origin(), Fraction(1))
        transcript = _play_safely(
            report, "avoid-point", variant, line,
            schmidt_avoid_point(y), random_legal(BOB, seed + trial), unit, horizon,
        )
        if transcript is None:
            continue
        margins = [
            line.distance(move.ball.center, y) - move.ball.radius
            for index, move in enumerate(transcript.moves, start=1)
            if player_of(index) == ALICE
        ]
        report.prop("avoid-point margin").check(all(m > 0 for m in margins), str(margins))

    for trial in tqdm(range(trials), desc="Banach avoidance"):
        beta = (Fraction(1, 4), Fraction(1, 5), Fraction(3, 10))[trial % 3]
        x0 = line.origin()
        alice = (absolute_avoid_point(x0), absolute_center_delete(), random_legal(ALICE, trial))[
            trial % 3
        ]
        initial = FormalBall(line.random_point_near(rng, x0, Fraction(1, 2)), 1)
        transcript = _play_safely(
            report, "banach-avoid", Absolute(beta), line, alice, banach_bob_avoid(x0),
            initial, horizon,
        )
        if transcript is None:
            continue
        last = transcript.enclosure()
        spec = AttractorSpec(x0, (1,), beta, last.radius)
        lower, _ = attractor_distance_bounds(spec, last.center, max(horizon, 12))
        report.prop("banach-avoid certified margin").check(lower > 0, f"{transcript.moves}")

    binseq = BinarySeqSpace()
    strong = Strong(Fraction(1, 2), Fraction(1, 2))
    for trial in tqdm(range(trials), desc="Threshold control"):
        controller_role = (ALICE, BOB)[trial % 2]
        opponents = (copycat, min_radius, lambda role: random_legal(role, seed + trial))
        opponent = opponents[trial % 3]((BOB if controller_role == ALICE else ALICE))
        controller = threshold_control(controller_role, "1")
        alice, bob = (controller, opponent) if controller_role == ALICE else (opponent, controller)
        initial = FormalBall(binseq.random_point(rng), random_radius(rng))
        transcript = _play_safely(report, "threshold-control", strong, binseq, alice, bob, initial, 16)
        if transcript is None:
            continue
        first_turn = 2 if controller_role == ALICE else 3
        owned = all(
            player == controller_role for index, _, player, _ in good_turns(transcript)
            if index >= first_turn
        )
        report.prop("threshold control owns good turns").check(owned, str(good_turns(transcript)))
    copy = run_game(strong, binseq, copycat(ALICE), copycat(BOB), FormalBall(BinarySeqPoint(), 1), 16)
    report.prop("copy-only game keeps radii").check(
        len({b.radius for b in copy.balls()}) == 1
    )
    return report


def tree_suite(depth=6, seed=0):
    report = SuiteReport("tree")
    line = RealMaxSpace(1)
    variant = Schmidt(Fraction(1, 5), Fraction(1, 5))
    tree = build_perfect_tree(min_radius(ALICE), variant, line, FormalBall(line.origin(), 1), depth)
    audit = verify_tree(tree)
    for name, (checked, failed) in audit.checks.items():
        result = report.prop(name)
        result.checked += checked
        result.failed += failed
    leaves = tree.leaves()
    report.prop("leaf count").check(len(leaves) == 2**depth, f"{len(leaves)} leaves")
    if depth > 0:
        report.prop("leaf diameter").check(
            all(2 * tree.nodes[p].enclosure().radius < Fraction(1, 2 ** (depth - 1)) for p in leaves)
        )
    for failure in audit.failures:
        result = report.prop(failure.split(":", 1)[0])
        result.detail = result.detail or failure
    return report


def brute_force_minimax(spec):
    """Plain enumeration of every grid play; used to cross-check truncated_minimax."""
    radii = [spec.initial.radius]
    for n in range(2, spec.depth + 2):
        radii.append(spec.variant.factor(player_of(n)) * radii[-1])
    target = merge_intervals(spec.target)

    def options(x, n):
        reach = radii[n - 2] - radii[n - 1]
        lo = math.ceil((x - reach) / spec.step)
        hi = math.floor((x + reach) / spec.step)
        return sorted({k * spec.step for k in range(lo, hi + 1)} | {x})

    def value(x, n, sense):
        if n == spec.depth + 2:
            r = radii[-1]
            if sense == "optimistic":
                return any(lo <= x + r and x - r <= hi for lo, hi in target)
            return any(lo <= x - r and x + r <= hi for lo, hi in target)
        results = [value(z, n + 1, sense) for z in options(x, n)]
        return any(results) if player_of(n) == ALICE else all(results)

    x = spec.initial.center.coords[0]
    return value(x, 2, "optimistic"), value(x, 2, "pessimistic")


def lab_fixture_spec(target, depth=2):
    line = RealMaxSpace(1)
    return analysis_lab.DiscreteGameSpec(
        Schmidt(Fraction(1, 2), Fraction(1, 2)),
        Fraction(1, 8),
        FormalBall(line.origin(), 1),
        tuple(target),
        depth,
    )


def lab_suite(trials=1000, seed=0):
    report = SuiteReport("lab")
    rng = np.random.default_rng(seed)
    bound, cover = analysis_lab.measure_upper_bound(Fraction(1, 4), 1, 3)
    report.prop("measure bound fixture").check(bound == Fraction(1, 4), str(bound))
    bounds = [analysis_lab.measure_upper_bound(Fraction(1, 4), 1, M)[0] for M in range(8)]
    report.prop("measure bound halves").check(
        all(b == a / 2 for a, b in zip(bounds, bounds[1:]))
    )
    for M in range(5):
        beta = Fraction(1, 4)
        cover = analysis_lab.attractor_cover(beta, 1, M)
        spec = AttractorSpec(EuclideanPoint((0,)), (1,), beta, Fraction(1))
        for signs in itertools.product((1, -1), repeat=M + 5):
            t = spec.point(signs).coords[0]
            report.prop("cover contains samples").check(
                any(lo <= t <= hi for lo, hi in cover), f"M={M} t={t}"
            )
    report.prop("dimension formula").check(
        abs(analysis_lab.dimension_formula(Fraction(1, 4)) - 0.5) < 1e-12
    )
    estimate = analysis_lab.box_counting_estimate(Fraction(1, 3), 12)
    report.prop("box counting").check(
        abs(estimate - math.log(2) / math.log(3)) < 0.05, f"estimate {estimate}"
    )

    fixtures = [
        ("schmidt", Fraction(1, 5), Fraction(1, 5), Fraction(1, 2), False, "UndeterminedOnBernstein(i)"),
        ("schmidt", Fraction(99, 100), Fraction(1, 2), Fraction(1, 2), True, "DeterminedForAllS"),
        ("absolute", None, Fraction(1, 200), Fraction(1, 2), False, "UndeterminedOnBernstein(iii)"),
    ]
    for variant, alpha, beta, c, banach, expected in fixtures:
        label = analysis_lab.classify_parameters(variant, alpha, beta, c, banach)
        report.prop("classifier fixtures").check(label.label == expected, f"{label}")
    for _ in tqdm(range(trials), desc="Classifier consistency"):
        alpha, beta = (Fraction(int(rng.integers(1, 100)), 100) for _ in range(2))
        c = Fraction(int(rng.integers(1, 10)), 10)
        banach = bool(rng.integers(0, 2))
        labels = [
            label
            for label, _, _ in analysis_lab.applicable_clauses("schmidt", alpha, beta, c, banach)
        ]
        conflict = "DeterminedForAllS" in labels and any("Undetermined" in x for x in labels)
        report.prop("classifier never conflicts").check(not conflict, f"{alpha} {beta} {c}")

    full = analysis_lab.truncated_minimax(lab_fixture_spec([(-1, 1)]))
    empty = analysis_lab.truncated_minimax(lab_fixture_spec([]))
    report.prop("minimax full target").check(full.value == analysis_lab.ALICE_WINS)
    report.prop("minimax empty target").check(empty.value == analysis_lab.BOB_WINS)
    spec = lab_fixture_spec([(0, Fraction(1, 2))])
    result = analysis_lab.truncated_minimax(spec)
    report.prop("minimax matches brute force").check(
        (result.optimistic, result.pessimistic) == brute_force_minimax(spec),
        f"{result}",
    )
    return report


def run_suite(name, seed=0, depth=6, trials=None):
    if name == "geometry":
        return geometry_suite(trials or 1000, seed)
    elif name == "engine":
        return engine_suite(trials or 100, seed)
    elif name == "strategies":
        return strategies_suite(trials or 100, seed, legality_trials=trials or 1000)
    elif name == "tree":
        return tree_suite(depth, seed)
    elif name == "lab":
        return lab_suite(trials or 1000, seed)
    raise ConfigError(f"Unknown suite {name!r}; choose one of {', '.join(SUITES)}")
