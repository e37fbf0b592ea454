"""Complete metric spaces with exact rational geometry.

Three concrete spaces are provided: R^d under the max-norm, the Cantor
ternary set (points are finite {0,2} ternary strings, i.e. endpoints of the
construction intervals) and binary sequences with the metric
4^-(first index where they differ). All distances are exact Fractions.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction

from game_utils import ConfigError, format_rational, parse_rational

_logger = logging.getLogger(__name__)

Scalar = Fraction


class NoWitness(RuntimeError):
    pass


class NotFound(RuntimeError):
    pass


@dataclass(frozen=True)
class EuclideanPoint:
    coords: tuple

    def __post_init__(self):
        coords = tuple(Fraction(x) for x in self.coords)
        if len(coords) < 1:
            raise ValueError("EuclideanPoint needs at least one coordinate")
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self):
        return len(self.coords)

    def shifted(self, offsets):
        return EuclideanPoint(tuple(x + t for x, t in zip(self.coords, offsets)))


@dataclass(frozen=True)
class CantorPoint:
    """Left endpoint 0.t1t2...tk (base 3) of a Cantor construction interval."""

    digits: str = ""

    def __post_init__(self):
        if any(ch not in "02" for ch in self.digits):
            raise ValueError(f"Cantor digits must be 0 or 2, got {self.digits!r}")
        # trailing zeros do not change the value
        object.__setattr__(self, "digits", self.digits.rstrip("0"))

    @property
    def value(self):
        total = Fraction(0)
        scale = Fraction(1)
        for ch in self.digits:
            scale /= 3
            total += int(ch) * scale
        return total


@dataclass(frozen=True)
class BinarySeqPoint:
    """Binary sequence `prefix` followed by `tail` repeated forever."""

    prefix: str = ""
    tail: str = "0"

    def __post_init__(self):
        if any(ch not in "01" for ch in self.prefix):
            raise ValueError(f"Binary prefix must be over 0/1, got {self.prefix!r}")
        if self.tail not in ("0", "1"):
            raise ValueError(f"Tail digit must be 0 or 1, got {self.tail!r}")
        object.__setattr__(self, "prefix", self.prefix.rstrip(self.tail))

    def digit(self, index):
        if index < len(self.prefix):
            return self.prefix[index]
        return self.tail


@dataclass(frozen=True)
class FormalBall:
    center: object
    radius: Fraction

    def __post_init__(self):
        radius = Fraction(self.radius)
        if radius <= 0:
            raise ValueError(f"Formal ball radius must be positive, got {radius}")
        object.__setattr__(self, "radius", radius)


class MetricSpace:
    name = "abstract"
    point_type = object
    # declared uniform-perfectness constant
    c = None
    is_banach = False

    def check_point(self, p):
        if not isinstance(p, self.point_type):
            raise ValueError(f"{p!r} is not a point of {self.name}")

    def distance(self, p, q):
        raise NotImplementedError

    def ball_subset(self, inner, outer):
        raise NotImplementedError

    def witness_candidates(self, x, rho):
        """Points at distance <= rho from x, largest distance first."""
        raise NotImplementedError

    def center_tiers(self, x, reach):
        """Tiers of candidate centers within distance `reach` of x."""
        raise NotImplementedError

    def random_point(self, rng):
        raise NotImplementedError

    def random_point_near(self, rng, x, reach):
        raise NotImplementedError

    def parse_point(self, text):
        raise NotImplementedError

    def format_point(self, p):
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.describe() == other.describe()

    def __hash__(self):
        return hash(self.describe())

    def __repr__(self):
        return self.describe()

    def describe(self):
        return self.name


class RealMaxSpace(MetricSpace):
    """R^d with the max-norm, a Banach space."""

    point_type = EuclideanPoint
    c = Fraction(1, 2)
    is_banach = True

    def __init__(self, dim=1):
        if dim < 1:
            raise ValueError("Dimension must be at least 1")
        self.dim = int(dim)
        self.name = "realmax"

    def describe(self):
        return f"realmax:{self.dim}"

    def check_point(self, p):
        super().check_point(p)
        if p.dim != self.dim:
            raise ValueError(f"Dimension mismatch: point of dim {p.dim} in {self.describe()}")

    def origin(self):
        return EuclideanPoint((0,) * self.dim)

    def basis(self, axis, scale=1):
        offsets = [Fraction(0)] * self.dim
        offsets[axis] = Fraction(scale)
        return offsets

    def distance(self, p, q):
        self.check_point(p)
        self.check_point(q)
        return max(abs(a - b) for a, b in zip(p.coords, q.coords))

    def ball_subset(self, inner, outer):
        # containment and formal inclusion agree in a normed space
        return formal_leq(self, inner, outer)

    def witness_candidates(self, x, rho):
        yield x.shifted(self.basis(0, rho))
        yield x.shifted(self.basis(0, -rho))

    def center_tiers(self, x, reach):
        tiers = []
        steps = []
        half = reach / 2
        if half > 0:
            steps.append(half)
        if reach > 0:
            steps.append(reach)
        for step in steps:
            tier = []
            for axis in range(self.dim):
                tier.append(x.shifted(self.basis(axis, step)))
                tier.append(x.shifted(self.basis(axis, -step)))
            tiers.append(tier)
        tiers.append([x])
        return tiers

    def random_point(self, rng, denominator=16):
        return EuclideanPoint(
            tuple(
                Fraction(int(rng.integers(-denominator, denominator + 1)), denominator)
                for _ in range(self.dim)
            )
        )

    def random_point_near(self, rng, x, reach, denominator=16):
        offsets = [
            reach * Fraction(int(rng.integers(-denominator, denominator + 1)), denominator)
            for _ in range(self.dim)
        ]
        return x.shifted(offsets)

    def parse_point(self, text):
        parts = [part for part in str(text).split(";") if part.strip()]
        point = EuclideanPoint(tuple(parse_rational(part) for part in parts))
        self.check_point(point)
        return point

    def format_point(self, p):
        return ";".join(format_rational(x) for x in p.coords)


def _cantor_ceil(a):
    """Smallest point of the Cantor set that is >= a (a <= 1)."""
    offset, scale = Fraction(0), Fraction(1)
    seen = set()
    while True:
        if a <= 0:
            return offset
        if a in seen:
            # the ternary expansion of a cycles through digits 0/2 only
            return offset + scale * a
        seen.add(a)
        if a <= Fraction(1, 3):
            scale /= 3
            a = 3 * a
        elif a <= Fraction(2, 3):
            return offset + scale * Fraction(2, 3)
        else:
            offset += scale * Fraction(2, 3)
            scale /= 3
            a = 3 * a - 2


def cantor_trace(ball):
    """Interval hull [lo, hi] of B(center, radius) intersected with the Cantor set."""
    x = ball.center.value
    lo = _cantor_ceil(max(x - ball.radius, Fraction(0)))
    hi = 1 - _cantor_ceil(max(1 - (x + ball.radius), Fraction(0)))
    return lo, hi


class CantorTernarySpace(MetricSpace):
    point_type = CantorPoint
    c = Fraction(1, 9)
    name = "cantor"

    def distance(self, p, q):
        self.check_point(p)
        self.check_point(q)
        return abs(p.value - q.value)

    def ball_subset(self, inner, outer):
        lo, hi = cantor_trace(inner)
        x = outer.center.value
        return lo >= x - outer.radius and hi <= x + outer.radius

    @staticmethod
    def flip(x, position):
        digits = list(x.digits.ljust(position, "0"))
        digits[position - 1] = "2" if digits[position - 1] == "0" else "0"
        return CantorPoint("".join(digits))

    @staticmethod
    def first_position(reach):
        """Smallest position j >= 1 with 2*3^-j <= reach."""
        position = 1
        while 2 * Fraction(1, 3**position) > reach:
            position += 1
        return position

    def witness_candidates(self, x, rho):
        # flipping position j moves the point by exactly 2*3^-j
        position = self.first_position(rho)
        for j in range(position, position + 3):
            yield self.flip(x, j)

    def center_tiers(self, x, reach):
        if reach <= 0:
            return [[x]]
        position = self.first_position(reach)
        return [[self.flip(x, position), x]] + [
            [self.flip(x, j)] for j in range(position + 1, position + 4)
        ]

    def random_point(self, rng, max_len=6):
        length = int(rng.integers(0, max_len + 1))
        return CantorPoint("".join(rng.choice(["0", "2"], size=length)))

    def random_point_near(self, rng, x, reach):
        if reach <= 0:
            return x
        position = self.first_position(reach / 3)
        point = x
        for j in range(position, position + 4):
            if rng.integers(0, 2):
                point = self.flip(point, j)
        return point

    def parse_point(self, text):
        text = str(text).strip()
        if not text.startswith("c:"):
            raise ConfigError(f"Cantor point must look like c:0202, got {text!r}")
        try:
            return CantorPoint(text[2:])
        except ValueError as error:
            raise ConfigError(str(error))

    def format_point(self, p):
        return "c:" + (p.digits or "0")


def cylinder_length(radius):
    """Number of fixed digits of a binary-sequence ball: min m with 4^-m <= radius."""
    m = 0
    while Fraction(1, 4**m) > radius:
        m += 1
    return m


class BinarySeqSpace(MetricSpace):
    point_type = BinarySeqPoint
    c = Fraction(1, 4)
    name = "binseq"

    @staticmethod
    def first_difference(p, q):
        if p == q:
            return None
        for index in range(max(len(p.prefix), len(q.prefix)) + 1):
            if p.digit(index) != q.digit(index):
                return index
        raise AssertionError("distinct canonical points must differ early")

    def distance(self, p, q):
        self.check_point(p)
        self.check_point(q)
        index = self.first_difference(p, q)
        if index is None:
            return Fraction(0)
        return Fraction(1, 4**index)

    def ball_subset(self, inner, outer):
        # balls are cylinders; inner must fix at least as many digits
        m_inner = cylinder_length(inner.radius)
        m_outer = cylinder_length(outer.radius)
        if m_inner < m_outer:
            return False
        return all(
            inner.center.digit(i) == outer.center.digit(i) for i in range(m_outer)
        )

    @staticmethod
    def flip(x, index):
        digits = [x.digit(i) for i in range(index + 1)]
        digits[index] = "1" if digits[index] == "0" else "0"
        # keep the rest of the sequence unchanged
        rest = x.prefix[index + 1 :]
        return BinarySeqPoint("".join(digits) + rest, x.tail)

    @staticmethod
    def with_tail(x, keep, tail):
        return BinarySeqPoint("".join(x.digit(i) for i in range(keep)), tail)

    def witness_candidates(self, x, rho):
        index = cylinder_length(rho)
        for i in range(index, index + 3):
            yield self.flip(x, i)

    def center_tiers(self, x, reach):
        if reach <= 0:
            return [[x]]
        index = cylinder_length(reach)
        return [[self.flip(x, index), x]] + [
            [self.flip(x, i)] for i in range(index + 1, index + 4)
        ]

    def random_point(self, rng, max_len=6):
        length = int(rng.integers(0, max_len + 1))
        prefix = "".join(rng.choice(["0", "1"], size=length))
        return BinarySeqPoint(prefix, str(int(rng.integers(0, 2))))

    def random_point_near(self, rng, x, reach):
        if reach <= 0:
            return x
        index = cylinder_length(reach)
        point = x
        for i in range(index, index + 4):
            if rng.integers(0, 2):
                point = self.flip(point, i)
        if rng.integers(0, 2):
            point = self.with_tail(point, index + 4, str(int(rng.integers(0, 2))))
        return point

    def parse_point(self, text):
        text = str(text).strip()
        if not text.startswith("b:") or "|" not in text:
            raise ConfigError(f"Binary point must look like b:0101|0, got {text!r}")
        prefix, tail = text[2:].split("|", 1)
        try:
            return BinarySeqPoint(prefix, tail)
        except ValueError as error:
            raise ConfigError(str(error))

    def format_point(self, p):
        return f"b:{p.prefix}|{p.tail}"


def make_space(text):
    text = str(text).strip().lower()
    if text.startswith("realmax"):
        _, _, dim = text.partition(":")
        try:
            return RealMaxSpace(int(dim) if dim else 1)
        except ValueError:
            raise ConfigError(f"Bad dimension in space {text!r}")
    if text == "cantor":
        return CantorTernarySpace()
    if text == "binseq":
        return BinarySeqSpace()
    raise ConfigError(f"Unknown space {text!r}")


def distance(space, p, q):
    return space.distance(p, q)


def formal_leq(space, b2, b1):
    """(x2, r2) <=_s (x1, r1) iff r2 + d(x1, x2) <= r1."""
    return b2.radius + space.distance(b1.center, b2.center) <= b1.radius


def ball_contains_point(space, ball, p):
    return space.distance(ball.center, p) <= ball.radius


def ball_subset(space, inner, outer):
    return space.ball_subset(inner, outer)


def balls_disjoint(space, b1, b2):
    """Strict disjointness certificate: d(centers) > r1 + r2."""
    return space.distance(b1.center, b2.center) > b1.radius + b2.radius


def uniform_perfect_witness(space, x, rho, c=None):
    """Return p with c*rho < d(x, p) <= rho."""
    c = space.c if c is None else Fraction(c)
    rho = Fraction(rho)
    if rho <= 0 or not 0 < c < 1:
        raise ValueError(f"Need rho > 0 and 0 < c < 1, got rho={rho}, c={c}")
    for p in space.witness_candidates(x, rho):
        d = space.distance(x, p)
        if c * rho < d <= rho:
            return p
    raise NoWitness(f"No witness in {space.describe()} at rho={rho}, c={c}")


def find_ball_avoiding(space, outer, radius, away_from, clearance):
    """Ball of the given radius, formally inside `outer`, with d(center, away_from) > clearance.

    Within the first tier holding a valid center, the center farthest from
    `away_from` wins; ties keep the tier order.
    """
    radius = Fraction(radius)
    reach = outer.radius - radius
    if reach < 0:
        raise NotFound(f"Radius {radius} exceeds outer radius {outer.radius}")
    for tier in space.center_tiers(outer.center, reach):
        best, best_distance = None, None
        for z in tier:
            if space.distance(outer.center, z) > reach:
                continue
            d = space.distance(z, away_from)
            if d <= clearance:
                continue
            if best is None or d > best_distance:
                best, best_distance = z, d
        if best is not None:
            return FormalBall(best, radius)
    raise NotFound(
        f"No ball of radius {radius} inside {outer} clear of {away_from} by {clearance}"
    )


def disjoint_ball_picker(space, outer, deleted, c=None):
    """Ball of radius (c/5)*rho inside `outer` and strictly disjoint from `deleted`."""
    c = space.c if c is None else Fraction(c)
    radius = c / 5 * outer.radius
    return find_ball_avoiding(
        space, outer, radius, deleted.center, deleted.radius + radius
    )


def line_distance(q, x0, v):
    """Exact max-norm distance from q to the line x0 + R*v."""
    a = [qi - xi for qi, xi in zip(q.coords, x0.coords)]
    v = [Fraction(vi) for vi in v]
    candidates = {Fraction(0)}
    # the minimum of max_i |a_i - t v_i| sits where two terms meet
    for i, (ai, vi) in enumerate(zip(a, v)):
        if vi != 0:
            candidates.add(ai / vi)
        for aj, vj in zip(a[i + 1 :], v[i + 1 :]):
            if vi != vj:
                candidates.add((ai - aj) / (vi - vj))
            if vi != -vj:
                candidates.add((ai + aj) / (vi + vj))
    return min(max(abs(ai - t * vi) for ai, vi in zip(a, v)) for t in candidates)


def parse_ball(space, text):
    center, sep, radius = str(text).partition("@")
    if not sep:
        raise ConfigError(f"Ball must look like center@radius, got {text!r}")
    try:
        return FormalBall(space.parse_point(center), parse_rational(radius))
    except ValueError as error:
        if isinstance(error, ConfigError):
            raise
        raise ConfigError(str(error))


def format_ball(space, ball):
    return f"{space.format_point(ball.center)}@{format_rational(ball.radius)}"
