"""Scenario configs: `key=value` text, and the strategy and target registries."""
import logging
import re
from dataclasses import dataclass, fields, replace

from game_engine import (
    ALICE,
    BOB,
    ball_complement_target,
    empty_target,
    everything_target,
    interval_union_target,
    make_variant,
    point_complement_target,
    point_target,
)
from game_utils import ConfigError, format_rational, parse_rational
from metric_spaces import RealMaxSpace, format_ball, make_space, parse_ball
from strategies import (
    absolute_avoid_point,
    absolute_bob_avoid_point,
    absolute_center_delete,
    banach_bob_avoid,
    copycat,
    min_radius,
    random_legal,
    schmidt_avoid_point,
    target_chaser,
    threshold_control,
)

_logger = logging.getLogger(__name__)

SPEC_PATTERN = re.compile(r"^\s*([a-z0-9-]+)\s*(?:\((.*)\))?\s*$", re.IGNORECASE)


@dataclass(frozen=True)
class ScenarioConfig:
    variant: str = "schmidt"
    alpha: str = "1/2"
    beta: str = "1/2"
    space: str = "realmax:1"
    initial: str = "0/1@1/1"
    alice: str = "min-radius"
    bob: str = "min-radius"
    horizon: int = 8
    target: str = "everything"
    transcript: str = "transcript.jsonl"
    seed: int = 0


KEYS = [f.name for f in fields(ScenarioConfig)]


def parse_scenario(text, base=None):
    values = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in KEYS:
            raise ConfigError(f"line {number}: expected one of {KEYS} as key=value, got {line!r}")
        values[key] = value.strip()
    return with_overrides(base or ScenarioConfig(), values)


def with_overrides(config, values):
    values = {key: value for key, value in values.items() if value is not None}
    for key in ("horizon", "seed"):
        if key in values:
            try:
                values[key] = int(values[key])
            except ValueError:
                raise ConfigError(f"{key} must be an integer, got {values[key]!r}")
    for key in ("alpha", "beta"):
        if key in values:
            values[key] = format_rational(parse_rational(values[key]))
    return replace(config, **values)


def format_scenario(config):
    return "".join(f"{key}={getattr(config, key)}\n" for key in KEYS)


def load_scenario(path, overrides=None):
    with open(path, encoding="utf-8") as handle:
        config = parse_scenario(handle.read())
    return with_overrides(config, overrides or {})


def parse_spec(text):
    """`name(key=value,...)` -> (name, {key: value})."""
    match = SPEC_PATTERN.match(str(text))
    if match is None:
        raise ConfigError(f"Cannot parse {text!r} as name(key=value,...)")
    name, args = match.group(1).lower(), match.group(2)
    params = {}
    for item in (args or "").split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"Argument {item!r} of {name} must be key=value")
        params[key.strip()] = value.strip()
    return name, params


def parse_direction(text, dim):
    if text is None:
        return None
    text = text.strip().lower()
    if text.startswith("e") and text[1:].isdigit():
        axis = int(text[1:]) - 1
        if not 0 <= axis < dim:
            raise ConfigError(f"Direction {text} out of range for dimension {dim}")
        return tuple(1 if i == axis else 0 for i in range(dim))
    vector = tuple(parse_rational(part) for part in text.split(";"))
    if len(vector) != dim or max(abs(x) for x in vector) != 1:
        raise ConfigError(f"Direction {text} must be a max-norm unit vector of dimension {dim}")
    return vector


def build_strategy(text, role, space, seed=0):
    """`seed` is the default for randomized strategies that name none."""
    name, params = parse_spec(text)

    def point(key):
        return space.parse_point(_required(params, name, key))

    if name == "min-radius":
        return min_radius(role)
    elif name == "copycat":
        return copycat(role)
    elif name == "avoid-point":
        c = parse_rational(params["c"]) if "c" in params else None
        return schmidt_avoid_point(point("y"), c, role)
    elif name == "center-delete":
        return absolute_center_delete()
    elif name == "absolute-avoid-point":
        return absolute_avoid_point(point("y"))
    elif name == "absolute-bob-avoid":
        return absolute_bob_avoid_point(point("y"))
    elif name == "banach-avoid":
        direction = parse_direction(params.get("v"), getattr(space, "dim", 1))
        return banach_bob_avoid(point("x0"), direction)
    elif name == "chaser":
        return target_chaser(point("t"), role)
    elif name == "threshold-control":
        return threshold_control(role, params.get("digit", "1"))
    elif name == "random":
        return random_legal(role, params.get("seed", seed))
    raise ConfigError(f"Unknown strategy {name!r}")


def _required(params, name, key):
    if key not in params:
        raise ConfigError(f"{name} needs {key}=...")
    return params[key]


def build_target(text, space):
    name, params = parse_spec(text)
    if name == "everything":
        return everything_target()
    elif name == "empty":
        return empty_target()
    elif name == "point":
        return point_target(space, space.parse_point(_required(params, name, "y")))
    elif name == "point-complement":
        return point_complement_target(space, space.parse_point(_required(params, name, "y")))
    elif name == "ball-complement":
        return ball_complement_target(space, parse_ball(space, _required(params, name, "ball")))
    elif name == "intervals":
        if not (isinstance(space, RealMaxSpace) and space.dim == 1):
            raise ConfigError(f"intervals targets live on realmax:1, not {space.describe()}")
        intervals = []
        for item in params.get("set", "").split(";"):
            if not item.strip():
                continue
            lo, sep, hi = item.partition(":")
            if not sep:
                raise ConfigError(f"Interval {item!r} must look like lo:hi")
            intervals.append((parse_rational(lo), parse_rational(hi)))
        return interval_union_target(intervals)
    raise ConfigError(f"Unknown target {name!r}")


@dataclass
class Scenario:
    config: ScenarioConfig
    variant: object
    space: object
    initial: object
    alice: object
    bob: object
    target: object


def build_scenario(config):
    variant = make_variant(config.variant, config.alpha, config.beta)
    space = make_space(config.space)
    initial = parse_ball(space, config.initial)
    alice = build_strategy(config.alice, ALICE, space, config.seed)
    bob = build_strategy(config.bob, BOB, space, config.seed)
    if alice.role != ALICE:
        raise ConfigError(f"{config.alice} is a strategy for Bob")
    if bob.role != BOB:
        raise ConfigError(f"{config.bob} is a strategy for Alice")
    target = build_target(config.target, space)
    _logger.debug(f"Scenario {variant} on {space.describe()} from {format_ball(space, initial)}")
    return Scenario(config, variant, space, initial, alice, bob, target)
