"""Single-map analysis on an interval [0, a] anchored at 0.

Everything here treats a fiber map as a black-box evaluator: concavity is
certified through second differences on a uniform grid, one-sided derivatives
through backward difference quotients, and the two contraction-ratio
inequalities are evaluated directly so callers (and tests) can check them
against their closed-form bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

from .errors import DomainError, InvariantError, PreconditionError

# Grid values below this count as identically zero.
ZERO_TOL = 1e-12
# Allowed slack in the grid second-difference concavity test.
CONCAVITY_SLACK = 1e-9
# Tie-breaker for the strict inequality in the isoclinic predicate.
_ISO_TIE = 1e-12

# Backward-difference schedule for one-sided derivatives: start at a/1e4 and
# shrink geometrically; the quotient is monotone in h for concave maps, so the
# last value is the best bracket of the limit.
_H0_FRACTION = 1e-4
_H_SHRINK = 0.25
_H_STEPS = 6


def kappa(u: float, v: float) -> float:
    """Relative gap |v - u| / min(u, v) between two positive reals."""
    if u <= 0.0 or v <= 0.0:
        raise DomainError(f"kappa needs positive arguments, got ({u!r}, {v!r})")
    return abs(v - u) / min(u, v)


@dataclass(frozen=True)
class FiberMap:
    """A map of [0, a] into itself with f(0) = 0.

    ``form`` is a human-readable descriptor (registry name plus parameters)
    used in reports.  The optional analytic fields are populated by the
    closed-form registry when the family allows; grid certification never
    consults them, so they can always be cross-checked against `certify`.
    Maps with ``analyzable=False`` (e.g. the two-point coin fibers) opt out
    of all concavity machinery.
    """

    a: float
    f: Callable[[float], float]
    form: str = "blackbox"
    gamma: float | None = None
    alpha: float | None = None
    b: float | None = None
    monotone: bool | None = None
    analyzable: bool = True

    def __call__(self, x: float) -> float:
        return self.f(x)

    def scaled(self, c: float) -> "FiberMap":
        """The map x -> c * f(x); analytic data rescales along."""
        if c < 0.0:
            raise DomainError(f"scale factor must be nonnegative, got {c!r}")
        base = self.f
        if c == 0.0:
            return FiberMap(
                a=self.a, f=lambda x: 0.0, form="zero",
                gamma=0.0, alpha=0.0, b=None, monotone=True,
                analyzable=self.analyzable,
            )
        return replace(
            self,
            f=lambda x: c * base(x),
            form=f"{c!r}*({self.form})",
            gamma=None if self.gamma is None else c * self.gamma,
            alpha=None if self.alpha is None else c * self.alpha,
        )


@dataclass(frozen=True)
class ConcavityCertificate:
    """Grid-level concavity data for one fiber map.

    ``alpha_star`` is the largest curvature level for which f(x) + alpha*x^2
    still passes the grid second-difference test; ``gamma`` and ``c`` locate
    the grid maximum; ``b`` is the isoclinic point (None when undefined:
    identically-zero maps, or nonmonotone maps certified only at level 0).
    """

    alpha_star: float
    gamma: float
    c: float
    b: float | None
    grid_size: int
    monotone: bool

    def to_dict(self) -> dict:
        return {
            "alpha_star": self.alpha_star,
            "gamma": self.gamma,
            "c": self.c,
            "b": self.b,
            "grid_size": self.grid_size,
            "monotone": self.monotone,
        }


class RatioBound(NamedTuple):
    ratio: float
    bound: float


def _grid(a: float, n: int) -> list[float]:
    xs = [a * i / n for i in range(n + 1)]
    xs[-1] = a
    return xs


def grid_values(fm: FiberMap, grid_size: int) -> tuple[list[float], list[float]]:
    xs = _grid(fm.a, grid_size)
    return xs, [fm(x) for x in xs]


def grid_max(fm: FiberMap, grid_size: int) -> float:
    _, vals = grid_values(fm, grid_size)
    return max(vals)


def _check_map_invariants(fm: FiberMap, xs: list[float], vals: list[float]) -> None:
    if abs(vals[0]) > ZERO_TOL:
        raise InvariantError(f"f(0) = {vals[0]!r} is not 0 (map {fm.form})")
    for x, v in zip(xs, vals):
        if not (-ZERO_TOL <= v <= fm.a + ZERO_TOL):
            raise InvariantError(
                f"f({x!r}) = {v!r} leaves [0, {fm.a!r}] (map {fm.form})"
            )


def concavity_holds(
    fm: FiberMap, alpha: float, grid_size: int, slack: float = CONCAVITY_SLACK
) -> bool:
    """Grid test: are all second differences of f(x) + alpha*x^2 <= slack?"""
    xs, vals = grid_values(fm, grid_size)
    h = fm.a / grid_size
    bump = 2.0 * alpha * h * h
    return all(
        vals[i - 1] - 2.0 * vals[i] + vals[i + 1] + bump <= slack
        for i in range(1, grid_size)
    )


def certify(fm: FiberMap, grid_size: int) -> ConcavityCertificate:
    """Certify the largest grid-level concavity of a fiber map.

    alpha_star is the minimum over interior grid points of -D2/(2h^2), where
    D2 is the centered second difference, clamped below at 0.  The certified
    map f + alpha_star*x^2 must itself pass the grid concavity test; a map
    that fails it at alpha_star (i.e. is convex somewhere on the grid) is
    rejected.  The peak, supremum, monotonicity flag and isoclinic point are
    read off the same grid.
    """
    if grid_size < 8:
        raise PreconditionError(f"grid_size must be >= 8, got {grid_size}")
    if not fm.analyzable:
        raise PreconditionError(
            f"map {fm.form} opted out of interval concavity analysis"
        )
    xs, vals = grid_values(fm, grid_size)
    _check_map_invariants(fm, xs, vals)

    h = fm.a / grid_size
    denom = 2.0 * h * h
    alpha_star = min(
        -(vals[i - 1] - 2.0 * vals[i] + vals[i + 1]) / denom
        for i in range(1, grid_size)
    )
    alpha_star = max(0.0, alpha_star)

    bump = 2.0 * alpha_star * h * h
    for i in range(1, grid_size):
        if vals[i - 1] - 2.0 * vals[i] + vals[i + 1] + bump > CONCAVITY_SLACK:
            raise InvariantError(
                f"map {fm.form} is not concave on the grid near x = {xs[i]!r}"
            )

    i_max = max(range(len(vals)), key=vals.__getitem__)
    gamma = vals[i_max]
    c = xs[i_max]
    monotone = all(vals[i + 1] >= vals[i] - ZERO_TOL for i in range(grid_size))

    if gamma <= ZERO_TOL:
        b = None  # identically-zero map: f(b) > 0 has no witness
    elif monotone:
        b = fm.a
    elif alpha_star > 0.0:
        b = isoclinic_point(fm, tol=1e-9, scan=min(grid_size, 2048))
    else:
        b = None  # nonmonotone with no certified strict concavity

    return ConcavityCertificate(
        alpha_star=alpha_star, gamma=gamma, c=c, b=b,
        grid_size=grid_size, monotone=monotone,
    )


def left_derivative(fm: FiberMap, x: float, h: float) -> float:
    """Backward difference quotient (f(x) - f(x-h)) / h."""
    if not (0.0 < x <= fm.a):
        raise DomainError(f"x must lie in (0, {fm.a!r}], got {x!r}")
    if not (0.0 < h < x):
        raise DomainError(f"need 0 < h < x, got h = {h!r}, x = {x!r}")
    return (fm(x) - fm(x - h)) / h


def left_derivative_limit(fm: FiberMap, x: float) -> float:
    """Backward quotient refined along the shrinking-h schedule.

    For concave maps the quotient is monotone in h, so the last (smallest-h)
    value is the tightest available estimate of the left derivative.
    """
    h = min(fm.a * _H0_FRACTION, x / 2.0)
    val = left_derivative(fm, x, h)
    for _ in range(_H_STEPS - 1):
        h *= _H_SHRINK
        val = left_derivative(fm, x, h)
    return val


def isoclinic_point(fm: FiberMap, tol: float = 1e-9, scan: int = 2048) -> float:
    """Supremum of the points where |left derivative| < chord slope f(x)/x.

    Works by scanning the predicate on a coarse grid and bisecting its last
    sign change.  Returns a when the predicate holds up to the right endpoint
    (in particular for nondecreasing maps).  Undefined for the zero map.
    """
    if tol <= 0.0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    a = fm.a
    xs = _grid(a, scan)[1:]
    vals = [fm(x) for x in xs]
    if max(vals) <= ZERO_TOL:
        raise PreconditionError(
            "isoclinic point undefined: map is identically 0 on the scan grid"
        )

    def pred(x: float, fx: float) -> bool:
        if fx <= 0.0:
            return False
        return abs(left_derivative_limit(fm, x)) < fx / x - _ISO_TIE

    flags = [pred(x, v) for x, v in zip(xs, vals)]
    if flags[-1]:
        return a
    if not any(flags):
        # Exactly-linear initial segments defeat the strict predicate; the
        # monotone convention still applies.
        if all(vals[i + 1] >= vals[i] - ZERO_TOL for i in range(len(vals) - 1)):
            return a
        raise PreconditionError(
            "isoclinic predicate never holds on the scan grid; "
            "map does not look strictly concave"
        )

    last_true = max(i for i, fl in enumerate(flags) if fl)
    lo, hi = xs[last_true], xs[last_true + 1]
    for _ in range(60):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if pred(mid, fm(mid)):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ratio_bound_monotone(
    fm: FiberMap, alpha: float, x: float, y: float
) -> RatioBound:
    """Contraction-ratio check when the image pair keeps its order.

    Returns (ratio, bound) with ratio = kappa(f(x), f(y)) / kappa(x, y) and
    bound = f(y) / (f(y) + alpha*y^2).  For a map that is alpha-concave on
    [0, y] the ratio never exceeds the bound.
    """
    if alpha < 0.0:
        raise DomainError(f"alpha must be nonnegative, got {alpha!r}")
    if not (0.0 < x < y <= fm.a):
        raise PreconditionError(
            f"precondition 0 < x < y <= a failed: x = {x!r}, y = {y!r}, a = {fm.a!r}"
        )
    fx, fy = fm(x), fm(y)
    if not (0.0 < fx < fy):
        raise PreconditionError(
            f"precondition 0 < f(x) < f(y) failed: f(x) = {fx!r}, f(y) = {fy!r}"
        )
    ratio = kappa(fx, fy) / kappa(x, y)
    bound = fy / (fy + alpha * y * y)
    return RatioBound(ratio, bound)


def ratio_bound_nonmonotone(
    fm: FiberMap, alpha: float, b: float, x: float, y: float
) -> RatioBound:
    """Contraction-ratio check when the image pair flips its order.

    Requires both points below the isoclinic point b and a strictly positive
    concavity level.  Returns (ratio, bound) with
    bound = 1 - alpha*b*(b - x)/f(b); the ratio is strictly below the bound.
    """
    if alpha <= 0.0:
        raise PreconditionError(f"precondition alpha > 0 failed: alpha = {alpha!r}")
    if not (0.0 < x < y):
        raise PreconditionError(
            f"precondition 0 < x < y failed: x = {x!r}, y = {y!r}"
        )
    if not (y < b):
        raise PreconditionError(
            f"precondition x, y < b failed: y = {y!r}, b = {b!r}"
        )
    fx, fy = fm(x), fm(y)
    if not (0.0 < fy < fx):
        raise PreconditionError(
            f"precondition 0 < f(y) < f(x) failed: f(x) = {fx!r}, f(y) = {fy!r}"
        )
    fb = fm(b)
    if fb <= 0.0:
        raise PreconditionError(f"precondition f(b) > 0 failed: f(b) = {fb!r}")
    ratio = kappa(fx, fy) / kappa(x, y)
    bound = 1.0 - alpha * b * (b - x) / fb
    return RatioBound(ratio, bound)
