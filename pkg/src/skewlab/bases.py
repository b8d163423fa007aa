"""Base spaces driving the skew products.

Three variants: a finite orbit diagram (point set with a successor table),
a circle rotation, and the binary shift on eventually periodic words.  Shift
points are stored as (transient, repeating block) — one-sided — or as a
finite window flanked by repeating blocks with an integer origin — two-sided.
That keeps every represented forward orbit exactly computable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .errors import CapabilityError, ConfigError, DomainError


def _bits(s: str) -> tuple[int, ...]:
    if any(ch not in "01" for ch in s):
        raise ConfigError(f"word {s!r} contains symbols outside {{0,1}}")
    return tuple(int(ch) for ch in s)


def _primitive(cycle: tuple[int, ...]) -> tuple[int, ...]:
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle == cycle[:d] * (n // d):
            return cycle[:d]
    return cycle


@dataclass(frozen=True)
class OneSidedWord:
    """Eventually periodic one-sided binary word: transient then cycle forever."""

    transient: tuple[int, ...]
    cycle: tuple[int, ...]

    def __post_init__(self):
        if not self.cycle:
            raise DomainError("cycle must be nonempty")
        cyc = _primitive(tuple(self.cycle))
        tr = tuple(self.transient)
        while tr and tr[-1] == cyc[-1]:
            tr = tr[:-1]
            cyc = cyc[-1:] + cyc[:-1]
        object.__setattr__(self, "transient", tr)
        object.__setattr__(self, "cycle", cyc)

    def symbol(self, i: int) -> int:
        if i < 0:
            raise DomainError("one-sided words have no negative coordinates")
        if i < len(self.transient):
            return self.transient[i]
        return self.cycle[(i - len(self.transient)) % len(self.cycle)]

    def shifted(self) -> "OneSidedWord":
        if self.transient:
            return OneSidedWord(self.transient[1:], self.cycle)
        return OneSidedWord((), self.cycle[1:] + self.cycle[:1])

    def __str__(self) -> str:
        return "".join(map(str, self.transient)) + "|" + "".join(map(str, self.cycle))

    @staticmethod
    def parse(s: str) -> "OneSidedWord":
        if s.count("|") != 1:
            raise ConfigError(f"one-sided word {s!r} must look like 'transient|cycle'")
        t, c = s.split("|")
        if not c:
            raise ConfigError(f"one-sided word {s!r} has an empty cycle")
        return OneSidedWord(_bits(t), _bits(c))


@dataclass(frozen=True)
class TwoSidedWord:
    """Bi-infinite binary word, periodic in both tails.

    symbol(i) reads position origin+i of the window ``buf``; reads past either
    end fall through to the repeating blocks.  Shifting just moves the origin,
    so stepping and stepping back are exact inverses.
    """

    left_cycle: tuple[int, ...]
    buf: tuple[int, ...]
    right_cycle: tuple[int, ...]
    origin: int = 0

    def __post_init__(self):
        if not self.left_cycle or not self.right_cycle:
            raise DomainError("both cycles must be nonempty")
        object.__setattr__(self, "left_cycle", tuple(self.left_cycle))
        object.__setattr__(self, "buf", tuple(self.buf))
        object.__setattr__(self, "right_cycle", tuple(self.right_cycle))

    def symbol(self, i: int) -> int:
        j = i + self.origin
        if 0 <= j < len(self.buf):
            return self.buf[j]
        if j >= len(self.buf):
            return self.right_cycle[(j - len(self.buf)) % len(self.right_cycle)]
        return self.left_cycle[j % len(self.left_cycle)]

    def shifted(self) -> "TwoSidedWord":
        return TwoSidedWord(self.left_cycle, self.buf, self.right_cycle, self.origin + 1)

    def shifted_back(self) -> "TwoSidedWord":
        return TwoSidedWord(self.left_cycle, self.buf, self.right_cycle, self.origin - 1)

    def __str__(self) -> str:
        return "{}~{}~{}@{}".format(
            "".join(map(str, self.left_cycle)),
            "".join(map(str, self.buf)),
            "".join(map(str, self.right_cycle)),
            self.origin,
        )

    @staticmethod
    def parse(s: str) -> "TwoSidedWord":
        try:
            body, origin = s.rsplit("@", 1)
            lc, buf, rc = body.split("~")
            return TwoSidedWord(_bits(lc), _bits(buf), _bits(rc), int(origin))
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"bad two-sided word {s!r}: {exc}") from exc


class FiniteOrbitBase:
    """Finite point set with a total successor map.

    Predecessors exist only where the preimage is unique, so pullback along
    backward orbits works exactly as far as the representation allows.
    """

    def __init__(self, points: Sequence[float], successor: dict[float, float]):
        self.points = tuple(points)
        pts = set(self.points)
        for p in self.points:
            if p not in successor or successor[p] not in pts:
                raise ConfigError(f"successor map is not total at point {p!r}")
        self.succ = dict(successor)
        preimages: dict[float, list[float]] = {}
        for p, q in self.succ.items():
            preimages.setdefault(q, []).append(p)
        self.pred = {
            q: ps[0] for q, ps in preimages.items() if len(ps) == 1
        }
        self.invertible = len(self.pred) == len(self.points) and all(
            p in self.pred for p in self.points
        )

    def step(self, p: float) -> float:
        try:
            return self.succ[p]
        except KeyError:
            raise DomainError(f"point {p!r} is not in the base") from None

    def predecessor(self, p: float) -> float:
        q = self.pred.get(p)
        if q is None:
            raise CapabilityError(f"no unique predecessor for base point {p!r}")
        return q

    def sample_points(self, count: int, rng: random.Random) -> list[float]:
        if count >= len(self.points):
            return list(self.points)
        return rng.sample(list(self.points), count)

    def format_point(self, p: float) -> str:
        return repr(p)

    def parse_point(self, s: str) -> float:
        try:
            v = float(s)
        except ValueError:
            raise ConfigError(f"cannot parse {s!r} as a finite-base point") from None
        if v in self.succ:
            return v
        for p in self.points:
            if abs(p - v) <= 1e-12:
                return p
        raise ConfigError(f"{s!r} is not a point of this base")


class CircleRotation:
    """Rotation of [0, 1) by a fixed angle; invertible."""

    def __init__(self, omega: float):
        if not (0.0 < omega < 1.0):
            raise ConfigError(f"rotation number must lie in (0, 1), got {omega!r}")
        self.omega = omega
        self.invertible = True

    def step(self, theta: float) -> float:
        return (theta + self.omega) % 1.0

    def predecessor(self, theta: float) -> float:
        return (theta - self.omega) % 1.0

    def sample_points(self, count: int, rng: random.Random) -> list[float]:
        return [rng.random() for _ in range(count)]

    def format_point(self, theta: float) -> str:
        return repr(theta)

    def parse_point(self, s: str) -> float:
        try:
            v = float(s)
        except ValueError:
            raise ConfigError(f"cannot parse {s!r} as a circle point") from None
        return v % 1.0


class SymbolicShift:
    """Full binary shift on eventually periodic words, one- or two-sided."""

    def __init__(self, sided: str = "one"):
        if sided not in ("one", "two"):
            raise ConfigError(f"sided must be 'one' or 'two', got {sided!r}")
        self.sided = sided
        self.invertible = sided == "two"

    def step(self, w):
        return w.shifted()

    def predecessor(self, w):
        if self.sided == "one":
            raise CapabilityError("one-sided shift has no predecessor map")
        return w.shifted_back()

    def zero_word(self):
        if self.sided == "one":
            return OneSidedWord((), (0,))
        return TwoSidedWord((0,), (), (0,), 0)

    def sample_points(
        self, count: int, rng: random.Random, length: int = 20
    ) -> list:
        out = []
        for _ in range(count):
            bits = tuple(rng.randrange(2) for _ in range(length))
            if self.sided == "one":
                out.append(OneSidedWord(bits, (rng.randrange(2),)))
            else:
                out.append(
                    TwoSidedWord((rng.randrange(2),), bits, (rng.randrange(2),), 0)
                )
        return out

    def format_point(self, w) -> str:
        return str(w)

    def parse_point(self, s: str):
        if self.sided == "one":
            return OneSidedWord.parse(s)
        return TwoSidedWord.parse(s)


def orbit_walk(base, p, limit: int) -> tuple[list, list | None]:
    """Forward walk of a base point: (path, cycle-or-None).

    The path lists distinct points in visit order.  When the walk revisits a
    path point, the cycle (in orbit order, starting at its first entry) is
    returned; when ``limit`` distinct points pass without a revisit the orbit
    is reported cycle-free, i.e. not recognizably preperiodic.
    """
    path = []
    index = {}
    cur = p
    for _ in range(limit):
        if cur in index:
            k = index[cur]
            return path, path[k:]
        index[cur] = len(path)
        path.append(cur)
        cur = base.step(cur)
    return path, None
