import math
from fractions import Fraction

import pytest

from analysis_lab import (
    ALICE_WINS,
    BOB_WINS,
    DETERMINED,
    GAP,
    UNCLASSIFIED,
    BudgetExceeded,
    DiscreteGameSpec,
    applicable_clauses,
    attractor_cover,
    box_counting_estimate,
    chaser_probe,
    classify_parameters,
    dimension_formula,
    measure_upper_bound,
    truncated_minimax,
)
from game_engine import NotPlayable
from verify_suites import brute_force_minimax, lab_fixture_spec

HALF = Fraction(1, 2)
FIFTH = Fraction(1, 5)


def test_classify_clause_one():
    label = classify_parameters("schmidt", Fraction(1, 5), Fraction(1, 5), HALF, False)
    assert label.label == "UndeterminedOnBernstein(i)"
    assert "1/5 < c/(1+2c)=1/4" in label.certificate


def test_classify_determined_on_banach():
    label = classify_parameters("schmidt", Fraction(99, 100), HALF, HALF, True)
    assert label.label == DETERMINED
    assert "299/200" in label.certificate
    assert "99/50" in label.certificate


def test_classify_absolute():
    label = classify_parameters("absolute", None, Fraction(1, 200), HALF, False)
    assert label.label == "UndeterminedOnBernstein(iii)"
    assert label.row()["alpha"] == ""
    banach = classify_parameters("absolute", None, Fraction(1, 4), HALF, True)
    assert banach.clause == "iv"
    with pytest.raises(NotPlayable):
        classify_parameters("absolute", None, Fraction(1, 4), HALF, False)


def test_classify_clause_two_and_unclassified():
    label = classify_parameters("strong", Fraction(1, 3), Fraction(1, 3), HALF, True)
    assert label.clause == "ii"
    label = classify_parameters("schmidt", Fraction(1, 3), Fraction(1, 3), HALF, False)
    assert label.label == UNCLASSIFIED
    clauses = applicable_clauses("schmidt", Fraction(1, 5), Fraction(1, 5), HALF, True)
    assert [clause for _, clause, _ in clauses] == ["i", "ii"]


def test_measure_bound():
    bound, cover = measure_upper_bound(Fraction(1, 4), 1, 3)
    assert bound == Fraction(1, 4)
    assert len(cover) == 8
    assert measure_upper_bound(Fraction(1, 4), 1, 0)[0] == 2
    bounds = [measure_upper_bound(Fraction(1, 4), 1, m)[0] for m in range(6)]
    assert all(b == a / 2 for a, b in zip(bounds, bounds[1:]))
    with pytest.raises(ValueError):
        measure_upper_bound(HALF, 1, 2)


def test_cover_intervals_are_disjoint():
    cover = attractor_cover(Fraction(1, 4), 1, 4)
    assert all(a[1] < b[0] for a, b in zip(cover, cover[1:]))
    assert cover[0][0] == -1
    assert cover[-1][1] == 1


def test_dimension():
    assert dimension_formula(Fraction(1, 4)) == pytest.approx(0.5)
    assert dimension_formula(HALF) == pytest.approx(1.0)
    estimate = box_counting_estimate(Fraction(1, 3), 12)
    assert abs(estimate - math.log(2) / math.log(3)) < 0.05


def test_minimax_full_and_empty_targets():
    full = truncated_minimax(lab_fixture_spec([(-1, 1)]))
    assert full.value == ALICE_WINS
    empty = truncated_minimax(lab_fixture_spec([]))
    assert empty.value == BOB_WINS


def test_minimax_regression_fixture():
    spec = lab_fixture_spec([(0, HALF)])
    result = truncated_minimax(spec)
    assert result.value == GAP
    assert (result.optimistic, result.pessimistic) == (True, False)
    assert brute_force_minimax(spec) == (result.optimistic, result.pessimistic)


def test_minimax_agrees_with_brute_force_on_deeper_games():
    for target in ([(0, HALF)], [(Fraction(-1, 4), Fraction(1, 4))], [(-1, 0), (HALF, 1)]):
        spec = lab_fixture_spec(target, depth=3)
        result = truncated_minimax(spec)
        assert brute_force_minimax(spec) == (result.optimistic, result.pessimistic)


def test_minimax_budget():
    spec = lab_fixture_spec([(0, HALF)], depth=3)
    spec = DiscreteGameSpec(
        spec.variant, spec.step, spec.initial, spec.target, spec.depth, budget=3
    )
    with pytest.raises(BudgetExceeded):
        truncated_minimax(spec)


def test_chaser_probe_contrast():
    caught = chaser_probe(Fraction(9, 10), HALF, Fraction(1, 10), "min-radius", 20)
    assert caught["distance"] == "0/1"
    assert not caught["excluded"]
    escaped = chaser_probe(Fraction(1, 10), FIFTH, Fraction(9, 10), "avoid-point", 10)
    assert escaped["excluded"]

