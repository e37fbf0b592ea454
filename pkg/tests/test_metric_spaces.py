from fractions import Fraction

import pytest

from conftest import ball, pt
from game_utils import ConfigError
from metric_spaces import (
    BinarySeqPoint,
    CantorPoint,
    FormalBall,
    NotFound,
    ball_contains_point,
    balls_disjoint,
    cantor_trace,
    cylinder_length,
    disjoint_ball_picker,
    find_ball_avoiding,
    format_ball,
    formal_leq,
    line_distance,
    make_space,
    parse_ball,
    uniform_perfect_witness,
)


def test_realmax_distance(line, plane):
    assert line.distance(pt("1/2"), pt("1/4")) == Fraction(1, 4)
    assert plane.distance(pt(0, 0), pt(1, -2)) == 2
    assert plane.distance(pt(3, 3), pt(3, 3)) == 0


def test_binary_sequence_distance(binseq):
    p = BinarySeqPoint("01", "1")
    q = BinarySeqPoint("010", "1")
    assert binseq.first_difference(p, q) == 2
    assert binseq.distance(p, q) == Fraction(1, 16)
    assert binseq.distance(p, p) == 0


def test_points_are_canonical():
    assert CantorPoint("0200") == CantorPoint("02")
    assert BinarySeqPoint("0111", "1") == BinarySeqPoint("0", "1")
    with pytest.raises(ValueError):
        CantorPoint("012")
    with pytest.raises(ValueError):
        BinarySeqPoint("01", "2")
    with pytest.raises(ValueError):
        FormalBall(pt(0), 0)


def test_formal_order(line):
    outer = ball(0, 1)
    assert formal_leq(line, ball("1/2", "1/2"), outer)
    assert not formal_leq(line, ball("1/2", "3/4"), outer)
    assert formal_leq(line, outer, outer)


def test_ball_membership(line, cantor):
    assert ball_contains_point(line, ball(0, 1), pt(1))
    assert not ball_contains_point(line, ball(0, "1/4"), pt("1/2"))
    third = FormalBall(CantorPoint(""), Fraction(1, 3))
    assert not ball_contains_point(cantor, third, CantorPoint("2"))


def test_realmax_subset_agrees_with_formal_order(line, rng):
    outer = ball(0, 1)
    assert line.ball_subset(ball("1/2", "1/2"), outer)
    assert not line.ball_subset(ball("1/2", "3/4"), outer)
    for _ in range(200):
        inner = FormalBall(line.random_point(rng), Fraction(int(rng.integers(1, 17)), 16))
        assert line.ball_subset(inner, outer) == formal_leq(line, inner, outer)


def test_cantor_subset_without_formal_order(cantor):
    inner = FormalBall(CantorPoint("02"), Fraction(1, 6))
    outer = FormalBall(CantorPoint(""), Fraction(1, 3))
    assert cantor_trace(inner) == (Fraction(2, 27), Fraction(1, 3))
    assert cantor.ball_subset(inner, outer)
    assert not formal_leq(cantor, inner, outer)


def test_binary_balls_are_cylinders(binseq):
    assert cylinder_length(Fraction(1)) == 0
    assert cylinder_length(Fraction(1, 4)) == 1
    assert cylinder_length(Fraction(1, 5)) == 2
    outer = FormalBall(BinarySeqPoint("0", "0"), Fraction(1, 4))
    assert binseq.ball_subset(FormalBall(BinarySeqPoint("01", "1"), Fraction(1, 16)), outer)
    assert not binseq.ball_subset(FormalBall(BinarySeqPoint("1", "0"), Fraction(1, 16)), outer)


@pytest.mark.parametrize(
    "space_name, center, rho, expected",
    [
        ("realmax:1", "0", "1", "1/1"),
        ("cantor", "c:0", "1/3", "c:02"),
        ("binseq", "b:|0", "1/4", "b:01|0"),
    ],
)
def test_uniform_perfect_witness_examples(space_name, center, rho, expected):
    space = make_space(space_name)
    x = space.parse_point(center)
    p = uniform_perfect_witness(space, x, Fraction(rho))
    assert space.format_point(p) == expected
    assert space.c * Fraction(rho) < space.distance(x, p) <= Fraction(rho)


def test_uniform_perfect_witness_on_random_points(line, cantor, binseq, rng):
    for space in (line, cantor, binseq):
        for _ in range(100):
            x = space.random_point(rng)
            rho = Fraction(int(rng.integers(1, 17)), 16)
            p = uniform_perfect_witness(space, x, rho)
            assert space.c * rho < space.distance(x, p) <= rho


def test_disjoint_ball_picker(line):
    outer = ball(0, 1)
    for deleted in (ball(0, "1/5"), ball("9/10", "1/10"), ball(0, "1/100")):
        picked = disjoint_ball_picker(line, outer, deleted)
        assert picked.radius == Fraction(1, 10)
        assert formal_leq(line, picked, outer)
        assert balls_disjoint(line, picked, deleted)
    assert disjoint_ball_picker(line, outer, ball("9/10", "1/10")).center.coords[0] < 0


def test_find_ball_avoiding_prefers_far_centers(line):
    found = find_ball_avoiding(line, ball(0, 1), Fraction(1, 4), pt(0), Fraction(1, 2))
    assert found == ball("3/4", "1/4")
    with pytest.raises(NotFound):
        find_ball_avoiding(line, ball(0, 1), Fraction(2), pt(0), Fraction(0))


def test_line_distance(plane):
    assert line_distance(pt(1, 0), pt(0, 0), (1, 1)) == Fraction(1, 2)
    assert line_distance(pt(2, 2), pt(0, 0), (1, 1)) == 0
    assert line_distance(pt(0, 3), pt(0, 0), (1, 0)) == 3


def test_ball_text_form(plane, binseq):
    b = parse_ball(plane, "1/2;-1@1/4")
    assert b == FormalBall(pt("1/2", -1), Fraction(1, 4))
    assert format_ball(plane, b) == "1/2;-1/1@1/4"
    assert format_ball(binseq, parse_ball(binseq, "b:0101|0@1/16")) == "b:0101|0@1/16"
    with pytest.raises(ConfigError):
        parse_ball(plane, "0;0")
    with pytest.raises(ConfigError):
        parse_ball(plane, "0;0@1/0")
    with pytest.raises(ConfigError):
        make_space("hilbert")
