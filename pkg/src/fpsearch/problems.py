"""Continuous search problems and the built-in benchmark suite.

A point is an array whose last axis holds the coordinates, so every function
here works on a single point of shape ``(d,)`` or a batch ``(n, d)``.

The "himmelblan" benchmark is implemented exactly as it appears in the
reference table, ``(x1 + x2 - 11)^2 + (x1 + x2^2 - 7)^2``. That is *not* the
classical Himmelblau function (which has ``x1^2`` in the first bracket) and
it has no stationary point in ``[-2, 2]^2``. The classical form is available
as ``"himmelblau_classic"`` for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .expr import Expression, parse_inequality

DEFAULT_EPSILON = 0.1
# alpine02 points with any x_i below this are classified 0; sin(x)/(2 sqrt(x)) is 0/0 at x = 0
ALPINE_FLOOR = 1e-9


@dataclass(frozen=True)
class LinfBall:
    """Closed l-infinity ball ``{g : max_j |g_j - center_j| <= radius}``."""

    radius: float
    center: float = 0.0

    def __call__(self, g):
        g = np.asarray(g, dtype=float)
        with np.errstate(invalid="ignore"):
            return np.all(np.abs(g - self.center) <= self.radius, axis=-1)

    def may_intersect(self, lo, hi):
        """True where the axis-aligned box ``[lo, hi]`` in feature space may meet the ball."""
        lo = np.asarray(lo) - self.center
        hi = np.asarray(hi) - self.center
        with np.errstate(invalid="ignore"):
            return np.all((lo <= self.radius) & (hi >= -self.radius), axis=-1)

    def contains(self, lo, hi):
        """True where the box ``[lo, hi]`` lies entirely inside the ball."""
        lo = np.asarray(lo) - self.center
        hi = np.asarray(hi) - self.center
        with np.errstate(invalid="ignore"):
            return np.all((lo >= -self.radius) & (hi <= self.radius), axis=-1)


@dataclass
class SearchProblem:
    name: str
    bounding_box: np.ndarray
    region: Callable
    feature: Callable
    criterion: Callable

    def __post_init__(self):
        self.bounding_box = np.asarray(self.bounding_box, dtype=float)
        if self.bounding_box.ndim != 2 or self.bounding_box.shape[1] != 2:
            raise ValueError("bounding_box must have shape (d, 2)")

    @property
    def dimension(self) -> int:
        return self.bounding_box.shape[0]

    def in_box(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.bounding_box[:, 0], self.bounding_box[:, 1]
        return np.all((x >= lo) & (x <= hi), axis=-1)

    def in_region(self, x):
        return self.in_box(x) & np.asarray(self.region(x), dtype=bool)

    def indicator(self, x):
        """Classical oracle: 1 on the target region, 0 elsewhere."""
        x = np.asarray(x, dtype=float)
        inside = self.in_region(x)
        hit = np.asarray(self.criterion(self.feature(x)), dtype=bool)
        return (inside & hit).astype(np.int8)


@dataclass
class TestFunction:
    name: str
    objective: Callable
    gradient: Callable
    box: Sequence[tuple]
    constraints: list = field(default_factory=list)
    epsilon: float = DEFAULT_EPSILON
    description: str = ""

    # keep pytest from collecting this class
    __test__ = False

    @property
    def dimension(self) -> int:
        return len(self.box)

    def in_domain(self, x):
        x = np.asarray(x, dtype=float)
        box = np.asarray(self.box, dtype=float)
        ok = np.all((x >= box[:, 0]) & (x <= box[:, 1]), axis=-1)
        for c in self.constraints:
            ok = ok & np.asarray(c(x), dtype=bool)
        return ok


def gradient_indicator(fn: TestFunction, x):
    """1 where every ``|d_j h(x)| <= epsilon`` and ``x`` is in the domain.

    The unconstrained gradient is used even on the domain boundary.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        g = fn.gradient(x)
        small = np.all(np.abs(g) <= fn.epsilon, axis=-1)
    return (small & fn.in_domain(x)).astype(np.int8)


def to_search_problem(fn: TestFunction) -> SearchProblem:
    def region(x):
        return fn.in_domain(x)

    def feature(x):
        with np.errstate(all="ignore"):
            g = np.asarray(fn.gradient(np.asarray(x, dtype=float)), dtype=float)
        return np.where(np.isfinite(g), g, np.inf)

    return SearchProblem(
        name=fn.name,
        bounding_box=np.asarray(fn.box, dtype=float),
        region=region,
        feature=feature,
        criterion=LinfBall(fn.epsilon),
    )


def region_measure(fn: TestFunction) -> Optional[float]:
    """Closed-form area of the domain when it is known, else None."""
    if fn.name == "rosenbrock":
        return 2.0 * np.pi
    if fn.constraints:
        return None
    box = np.asarray(fn.box, dtype=float)
    return float(np.prod(box[:, 1] - box[:, 0]))


# --- benchmark definitions -------------------------------------------------

def rastrigin(x):
    x = np.asarray(x, dtype=float)
    return np.sum(x**2 - 10.0 * np.cos(2 * np.pi * x), axis=-1)


def rastrigin_grad(x):
    x = np.asarray(x, dtype=float)
    return 2.0 * x + 20.0 * np.pi * np.sin(2 * np.pi * x)


def styblinski_tang(x):
    x = np.asarray(x, dtype=float)
    return 0.5 * np.sum(x**4 - 16.0 * x**2 + 5.0 * x, axis=-1)


def styblinski_tang_grad(x):
    x = np.asarray(x, dtype=float)
    return 0.5 * (4.0 * x**3 - 32.0 * x + 5.0)


def alpine02(x):
    x = np.asarray(x, dtype=float)
    return -np.prod(np.sqrt(x) * np.sin(x), axis=-1)


def alpine02_grad(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        f = np.sqrt(x) * np.sin(x)
        df = np.sin(x) / (2.0 * np.sqrt(x)) + np.sqrt(x) * np.cos(x)
        g = np.empty_like(x)
        d = x.shape[-1]
        for i in range(d):
            others = np.prod(np.delete(f, i, axis=-1), axis=-1)
            g[..., i] = -df[..., i] * others
    return np.where(np.any(x < ALPINE_FLOOR, axis=-1)[..., None], np.inf, g)


def himmelblan(x):
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    return (x1 + x2 - 11.0) ** 2 + (x1 + x2**2 - 7.0) ** 2


def himmelblan_grad(x):
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    a = x1 + x2 - 11.0
    b = x1 + x2**2 - 7.0
    return np.stack([2 * a + 2 * b, 2 * a + 4 * x2 * b], axis=-1)


def himmelblau(x):
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    return (x1**2 + x2 - 11.0) ** 2 + (x1 + x2**2 - 7.0) ** 2


def himmelblau_grad(x):
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    a = x1**2 + x2 - 11.0
    b = x1 + x2**2 - 7.0
    return np.stack([4 * x1 * a + 2 * b, 2 * a + 4 * x2 * b], axis=-1)


def rosenbrock(x):
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    return (1.0 - x1) ** 2 + 100.0 * (x2 - x1**2) ** 2


def rosenbrock_grad(x):
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    return np.stack([-2.0 * (1.0 - x1) - 400.0 * x1 * (x2 - x1**2), 200.0 * (x2 - x1**2)], axis=-1)


def rosenbrock_disk(x):
    x = np.asarray(x, dtype=float)
    return np.sum(x**2, axis=-1) <= 2.0


def gomez_levy(x):
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    return 4 * x1**2 - 2.1 * x1**4 + x1**6 / 3.0 + x1 * x2 - 4 * x2**2 + 4 * x2**4


def gomez_levy_grad(x):
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    return np.stack([8 * x1 - 8.4 * x1**3 + 2 * x1**5 + x2, x1 - 8 * x2 + 16 * x2**3], axis=-1)


def gomez_levy_constraint(x):
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    return -np.sin(4 * np.pi * x1) + 2 * np.sin(2 * np.pi * x2) ** 2 <= 1.5


SQRT2 = float(np.sqrt(2.0))


def builtin_suite() -> list[TestFunction]:
    """The six benchmark rows, in table order."""
    return [
        TestFunction("rastrigin", rastrigin, rastrigin_grad, [(-2.0, 2.0)] * 2,
                     description="sum(x_i^2 - 10 cos(2 pi x_i))"),
        TestFunction("styblinski_tang", styblinski_tang, styblinski_tang_grad, [(-2.0, 2.0)] * 2,
                     description="0.5 sum(x_i^4 - 16 x_i^2 + 5 x_i)"),
        TestFunction("alpine02", alpine02, alpine02_grad, [(0.0, 10.0)] * 2,
                     description="-prod(sqrt(x_i) sin(x_i))"),
        TestFunction("himmelblan", himmelblan, himmelblan_grad, [(-2.0, 2.0)] * 2,
                     description="(x1 + x2 - 11)^2 + (x1 + x2^2 - 7)^2 (as printed, not Himmelblau)"),
        TestFunction("rosenbrock", rosenbrock, rosenbrock_grad, [(-SQRT2, SQRT2)] * 2,
                     constraints=[rosenbrock_disk],
                     description="(1 - x1)^2 + 100 (x2 - x1^2)^2, x1^2 + x2^2 <= 2"),
        TestFunction("gomez_levy", gomez_levy, gomez_levy_grad, [(-1.0, 0.75), (-1.0, 1.0)],
                     constraints=[gomez_levy_constraint],
                     description="4x1^2 - 2.1x1^4 + x1^6/3 + x1x2 - 4x2^2 + 4x2^4, "
                                 "-sin(4 pi x1) + 2 sin^2(2 pi x2) <= 1.5"),
    ]


def extra_functions() -> list[TestFunction]:
    return [
        TestFunction("himmelblau_classic", himmelblau, himmelblau_grad, [(-2.0, 2.0)] * 2,
                     description="(x1^2 + x2 - 11)^2 + (x1 + x2^2 - 7)^2"),
    ]


def get_function(name: str) -> TestFunction:
    key = name.lower().replace("-", "_").replace(" ", "_")
    aliases = {"styblinski": "styblinski_tang", "gomez_and_levy": "gomez_levy"}
    key = aliases.get(key, key)
    for fn in builtin_suite() + extra_functions():
        if fn.name == key:
            return fn
    raise KeyError(f"unknown test function {name!r}")


# --- user-defined problems -------------------------------------------------

def finite_difference_gradient(f: Callable, step: float = 1e-6) -> Callable:
    def grad(x):
        x = np.asarray(x, dtype=float)
        g = np.empty_like(x)
        for j in range(x.shape[-1]):
            e = np.zeros(x.shape[-1])
            e[j] = step
            g[..., j] = (f(x + e) - f(x - e)) / (2 * step)
        return g

    return grad


def custom_function(name: str, objective: str, box, constraints: Sequence[str] = (),
                    epsilon: float = DEFAULT_EPSILON, fd_step: float = 1e-6) -> TestFunction:
    """Build a test function from expression strings over ``x1 .. xd``.

    The gradient is a central finite difference of the parsed objective.
    """
    box = [tuple(map(float, b)) for b in box]
    d = len(box)
    h = Expression(objective, d)
    cons = [parse_inequality(c, d) for c in constraints]
    return TestFunction(name, h, finite_difference_gradient(h, fd_step), box, cons, epsilon,
                        description=objective)
