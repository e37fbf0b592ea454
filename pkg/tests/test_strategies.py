from fractions import Fraction

import pytest

from conftest import ball, pt
from game_engine import (
    ALICE,
    BOB,
    Absolute,
    Move,
    Schmidt,
    Strong,
    outcome,
    point_complement_target,
    run_game,
    validate_move,
)
from metric_spaces import BinarySeqPoint, FormalBall, balls_disjoint
from strategies import (
    AttractorSpec,
    NoLegalCandidate,
    PreconditionViolated,
    TargetOutside,
    absolute_avoid_point,
    absolute_bob_avoid_point,
    absolute_center_delete,
    attractor_distance_bounds,
    banach_bob_avoid,
    candidate_gap,
    copycat,
    crossable_threshold,
    describe_strategy,
    good_turns,
    min_radius,
    random_legal,
    schmidt_avoid_point,
    target_chaser,
    threshold_control,
)
from verify_suites import SuiteReport, legality_sweep

HALF = Fraction(1, 2)


def test_min_radius_keeps_center(line):
    history = (Move(ball(0, 1)),)
    assert min_radius(ALICE)(Strong(HALF, HALF), line, history) == Move(ball(0, "1/2"))


def test_min_radius_bob_clears_deletion(line):
    variant = Absolute(Fraction(1, 10))
    history = (Move(ball(0, 1)), Move(ball(0, "1/10"), delete=True))
    move = min_radius(BOB)(variant, line, history)
    assert move.ball.radius == Fraction(1, 10)
    assert balls_disjoint(line, move.ball, history[-1].ball)
    validate_move(variant, line, history, move)


def test_min_radius_does_not_delete(line):
    with pytest.raises(PreconditionViolated):
        min_radius(ALICE)(Absolute(Fraction(1, 10)), line, (Move(ball(0, 1)),))


def test_schmidt_avoid_point_moves_off_y(line):
    variant = Schmidt(Fraction(1, 5), HALF)
    history = (Move(ball(0, 1)),)
    move = schmidt_avoid_point(pt(0))(variant, line, history)
    assert move == Move(ball("3/5", "1/5"))
    validate_move(variant, line, history, move)


def test_schmidt_avoid_point_keeps_center_when_clear(line):
    move = schmidt_avoid_point(pt("9/10"))(Schmidt(Fraction(1, 5), HALF), line, (Move(ball(0, 1)),))
    assert move == Move(ball(0, "1/5"))


def test_schmidt_avoid_point_needs_small_factor(line):
    with pytest.raises(PreconditionViolated):
        schmidt_avoid_point(pt(0))(Schmidt(Fraction(1, 3), HALF), line, (Move(ball(0, 1)),))


def test_schmidt_avoidance_holds_over_a_game(line, unit_ball):
    variant = Schmidt(Fraction(1, 5), Fraction(1, 5))
    y = pt(0)
    bob = random_legal(BOB, 3)
    transcript = run_game(variant, line, schmidt_avoid_point(y), bob, unit_ball, 20)
    for index in range(2, len(transcript.moves) + 1, 2):
        b = transcript.moves[index - 1].ball
        assert line.distance(b.center, y) > b.radius
    assert outcome(transcript, point_complement_target(line, y)).winner == ALICE


def test_center_delete(line):
    variant = Absolute(Fraction(1, 10))
    move = absolute_center_delete()(variant, line, (Move(ball(0, 1)),))
    assert move == Move(ball(0, "1/10"), delete=True)
    tiny = (Move(ball("1/3", Fraction(1, 10**9))),)
    assert absolute_center_delete()(variant, line, tiny).ball.radius == Fraction(1, 10**10)


def test_center_delete_halves_radii_against_random_bob(line, unit_ball):
    variant = Absolute(Fraction(1, 10))
    for seed in range(5):
        bob = random_legal(BOB, seed)
        transcript = run_game(variant, line, absolute_center_delete(), bob, unit_ball, 20)
        for k, b in enumerate(transcript.bob_balls()):
            assert b.radius <= Fraction(1, 2**k)


def test_absolute_avoid_point(line, unit_ball):
    variant = Absolute(Fraction(1, 10))
    history = (Move(ball(0, 1)),)
    assert absolute_avoid_point(pt(0))(variant, line, history) == absolute_center_delete()(
        variant, line, history
    )
    assert absolute_avoid_point(pt(5))(variant, line, history) == Move(ball(0, "1/10"), delete=True)
    y = pt("1/3")
    transcript = run_game(variant, line, absolute_avoid_point(y), min_radius(BOB), unit_ball, 16)
    final = transcript.enclosure()
    assert line.distance(final.center, y) > final.radius


def test_absolute_bob_avoid_point(cantor):
    variant = Absolute(Fraction(1, 5000))
    y = cantor.parse_point("c:0")
    start = FormalBall(y, Fraction(1))
    alice, bob = absolute_avoid_point(y), absolute_bob_avoid_point(y)
    transcript = run_game(variant, cantor, alice, bob, start, 4)
    final = transcript.enclosure()
    assert cantor.distance(final.center, y) > final.radius
    with pytest.raises(PreconditionViolated):
        run_game(Absolute(Fraction(1, 50)), cantor, absolute_center_delete(), bob, start, 2)


def test_attractor_bounds():
    spec = AttractorSpec(pt(0), (1,), Fraction(1, 4), Fraction(1))
    assert attractor_distance_bounds(spec, pt(0), 1) == (Fraction(1, 2), Fraction(1, 2))
    for depth in range(5):
        assert spec.point([1] * depth) == pt(1)
        assert attractor_distance_bounds(spec, pt(1), depth)[0] == 0
    lower, upper = attractor_distance_bounds(spec, pt("1/10"), 6)
    assert 0 <= lower <= upper


def test_candidate_gap(line, plane):
    beta, rho = Fraction(1, 4), Fraction(1)
    assert candidate_gap(line, pt(0), beta, rho) == 2 * (1 - beta) * rho - 2 * beta * rho
    assert candidate_gap(plane, pt(0, 0), beta, rho, (0, 1)) == 1


def test_banach_avoid_on_the_line(line, unit_ball):
    variant = Absolute(Fraction(1, 4))
    x0 = pt(0)
    alice, bob = absolute_avoid_point(x0), banach_bob_avoid(x0)
    transcript = run_game(variant, line, alice, bob, unit_ball, 12)
    final = transcript.enclosure()
    spec = AttractorSpec(final.center, (1,), variant.beta, final.radius)
    margin, _ = attractor_distance_bounds(spec, x0, 12)
    assert margin > 0
    assert line.distance(final.center, x0) > final.radius


def test_banach_avoid_in_the_plane(plane):
    variant = Absolute(Fraction(1, 5))
    x0 = pt(0, 0)
    start = FormalBall(pt(0, 0), Fraction(1))
    transcript = run_game(variant, plane, absolute_center_delete(), banach_bob_avoid(x0), start, 10)
    final = transcript.enclosure()
    assert plane.distance(final.center, x0) > final.radius


def test_banach_avoid_needs_small_beta(line, unit_ball):
    history = (Move(unit_ball), Move(ball(5, "1/100"), delete=True))
    with pytest.raises(PreconditionViolated):
        banach_bob_avoid(pt(0))(Absolute(HALF), line, history)


def test_target_chaser_fixed_point(line, unit_ball):
    alice = target_chaser(pt(0))
    transcript = run_game(Schmidt(HALF, HALF), line, alice, min_radius(BOB), unit_ball, 8)
    assert all(b.center == pt(0) for b in transcript.balls())


def test_target_chaser_large_alpha(line, unit_ball):
    t = pt("1/10")
    variant = Schmidt(Fraction(9, 10), HALF)
    transcript = run_game(variant, line, target_chaser(t), min_radius(BOB), unit_ball, 20)
    assert line.distance(transcript.enclosure().center, t) < Fraction(1, 1000)


def test_target_chaser_checks_initial_ball(line, unit_ball):
    with pytest.raises(TargetOutside):
        run_game(Schmidt(HALF, HALF), line, target_chaser(pt(3)), min_radius(BOB), unit_ball, 2)


def test_target_chaser_in_the_plane(plane):
    t = pt("1/2", "-1/2")
    start = FormalBall(pt(0, 0), Fraction(1))
    transcript = run_game(Schmidt(HALF, HALF), plane, target_chaser(t), min_radius(BOB), start, 2)
    assert transcript.moves[1].ball == FormalBall(t, HALF)


def test_crossable_threshold():
    assert crossable_threshold(Fraction(1)) == 0
    assert crossable_threshold(Fraction(1, 2)) is None
    assert crossable_threshold(Fraction(1, 4)) == 1
    assert crossable_threshold(Fraction(3, 8)) == 1
    assert crossable_threshold(Fraction(5, 8)) is None


def test_threshold_control_against_copycat(binseq):
    start = FormalBall(BinarySeqPoint("", "1"), Fraction(1))
    variant = Strong(HALF, HALF)
    controller = threshold_control(ALICE, "1")
    transcript = run_game(variant, binseq, controller, copycat(BOB), start, 16)
    assert good_turns(transcript) == [(2, 0, ALICE, "1")]
    assert transcript.enclosure() == FormalBall(BinarySeqPoint("", "1"), HALF)


def test_threshold_control_sets_tail(binseq):
    start = FormalBall(BinarySeqPoint("", "0"), Fraction(1))
    variant = Strong(HALF, HALF)
    controller = threshold_control(BOB, "1")
    transcript = run_game(variant, binseq, copycat(ALICE), controller, start, 6)
    turns = good_turns(transcript)
    assert [(index, player) for index, _, player, _ in turns] == [(3, BOB)]
    center = transcript.enclosure().center
    assert center.digit(0) == "0"
    assert all(center.digit(i) == "1" for i in range(1, 10))


def test_both_copying_never_crosses(binseq):
    start = FormalBall(BinarySeqPoint("01", "0"), Fraction(1))
    transcript = run_game(Strong(HALF, HALF), binseq, copycat(ALICE), copycat(BOB), start, 10)
    assert good_turns(transcript) == []
    assert outcome(transcript, point_complement_target(binseq, start.center)).limit_radius == 1


def test_random_legal_is_pure(line, cantor, binseq, rng):
    for space in (line, cantor, binseq):
        start = FormalBall(space.random_point(rng), Fraction(1))
        for variant in (Schmidt(HALF, Fraction(1, 3)), Strong(HALF, HALF)):
            alice, bob = random_legal(ALICE, 1), random_legal(BOB, 2)
            first = run_game(variant, space, alice, bob, start, 8)
            second = run_game(variant, space, alice, bob, start, 8)
            assert first.moves == second.moves


def test_describe_strategy(line):
    assert describe_strategy(schmidt_avoid_point(pt(0), Fraction(1, 2))).startswith("avoid-point(")
    assert describe_strategy(min_radius(BOB)) == "min-radius()"
    assert repr(copycat(ALICE)) == "copycat[Alice]()"


def test_no_candidate_is_reported(line):
    variant = Absolute(Fraction(1, 4))
    history = (Move(ball(0, 1)), Move(ball(0, 1), delete=True))
    with pytest.raises(NoLegalCandidate):
        min_radius(BOB)(variant, line, history)


def test_named_strategies_stay_legal_against_random_opponents():
    report = SuiteReport("legality")
    legality_sweep(report, trials=2, seed=0, horizon=6)
    for name in (
        "min-radius Alice",
        "min-radius Bob",
        "chaser Alice",
        "chaser Bob",
        "avoid-point Alice",
        "avoid-point Bob",
        "copycat Bob",
        "center-delete",
        "absolute-avoid-point",
        "absolute-bob-avoid",
        "banach-avoid",
        "threshold-control Alice",
    ):
        assert f"legality: {name}" in report.properties
    assert report.passed, report.rows()
    # every schmidt and strong setup on all four spaces
    assert report.properties["legality: avoid-point Alice"].checked == 16
    assert report.properties["legality: absolute-bob-avoid"].checked == 8
    assert report.properties["legality: banach-avoid"].checked == 4
