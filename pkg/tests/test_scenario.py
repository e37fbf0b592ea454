from fractions import Fraction
from pathlib import Path

import pytest

from game_engine import ALICE, BOB, Strong
from game_utils import ConfigError
from metric_spaces import BinarySeqPoint
from scenario import (
    ScenarioConfig,
    build_scenario,
    build_strategy,
    build_target,
    format_scenario,
    load_scenario,
    parse_direction,
    parse_scenario,
    parse_spec,
    with_overrides,
)
from strategies import BanachBobAvoid, ThresholdControl

SCENARIO = """
# strong game on binary sequences
variant = strong
alpha = 1/2
beta = 1/2
space = binseq
initial = b:|1@1
alice = threshold-control(digit=1)
bob = copycat
horizon = 16
"""


def test_parse_scenario():
    config = parse_scenario(SCENARIO)
    assert config.variant == "strong"
    assert config.horizon == 16
    assert config.target == "everything"
    assert parse_scenario(format_scenario(config)) == config


def test_parse_scenario_errors():
    with pytest.raises(ConfigError):
        parse_scenario("speed = 3")
    with pytest.raises(ConfigError):
        parse_scenario("horizon = many")
    with pytest.raises(ConfigError):
        parse_scenario("beta = 1/0")
    with pytest.raises(ConfigError):
        parse_scenario("beta = 0.5")


def test_overrides_normalize_rationals(tmp_path):
    path = tmp_path / "game.cfg"
    path.write_text(SCENARIO)
    config = load_scenario(path, {"beta": "2/4", "horizon": "4", "alpha": None})
    assert config.beta == "1/2"
    assert config.alpha == "1/2"
    assert config.horizon == 4
    assert with_overrides(ScenarioConfig(), {"seed": "7"}).seed == 7


def test_parse_spec():
    assert parse_spec("min-radius") == ("min-radius", {})
    assert parse_spec("Avoid-Point(y=1/3, c=1/2)") == ("avoid-point", {"y": "1/3", "c": "1/2"})
    with pytest.raises(ConfigError):
        parse_spec("chaser(t)")
    with pytest.raises(ConfigError):
        parse_spec("two words")


def test_parse_direction():
    assert parse_direction("e2", 2) == (0, 1)
    assert parse_direction("1;-1", 2) == (Fraction(1), Fraction(-1))
    assert parse_direction(None, 2) is None
    with pytest.raises(ConfigError):
        parse_direction("e3", 2)
    with pytest.raises(ConfigError):
        parse_direction("1/2;1/2", 2)


def test_build_strategy(plane):
    avoid = build_strategy("banach-avoid(x0=0;0,v=e2)", BOB, plane)
    assert isinstance(avoid, BanachBobAvoid)
    assert avoid.direction(plane) == (0, 1)
    with pytest.raises(ConfigError):
        build_strategy("chaser", ALICE, plane)
    with pytest.raises(ConfigError):
        build_strategy("teleport", ALICE, plane)


def test_build_target(line):
    target = build_target("intervals(set=0:1/2;1/4:1)", line)
    assert target.name == "[0/1,1/1]"
    assert not build_target("point-complement(y=0)", line).contains(line.origin())
    assert build_target("ball-complement(ball=0@1/2)", line).contains(line.parse_point("1"))
    with pytest.raises(ConfigError):
        build_target("intervals(set=0-1)", line)


def test_interval_targets_need_the_real_line(plane, cantor, binseq):
    for space in (plane, cantor, binseq):
        with pytest.raises(ConfigError):
            build_target("intervals(set=0:1/2)", space)


def test_build_scenario():
    game = build_scenario(parse_scenario(SCENARIO))
    assert game.variant == Strong(Fraction(1, 2), Fraction(1, 2))
    assert isinstance(game.alice, ThresholdControl)
    assert game.initial.center == BinarySeqPoint("", "1")
    with pytest.raises(ConfigError):
        build_scenario(with_overrides(parse_scenario(SCENARIO), {"space": "hilbert"}))


def test_scenario_seed_reaches_random_strategies():
    config = with_overrides(parse_scenario(SCENARIO), {"bob": "random", "seed": "7"})
    assert build_scenario(config).bob.seed == 7
    config = with_overrides(config, {"bob": "random(seed=3)"})
    assert build_scenario(config).bob.seed == 3


@pytest.mark.parametrize("name", ["threshold.cfg", "center_delete.cfg", "banach_avoid.cfg"])
def test_shipped_scenarios_build(name):
    path = Path(__file__).resolve().parents[1] / "scenarios" / name
    game = build_scenario(load_scenario(path))
    assert game.alice.role == ALICE
    assert game.bob.role == BOB
