import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpsearch.expr import Expression, ExpressionError, parse_inequality
from fpsearch.problems import (LinfBall, builtin_suite, custom_function, extra_functions, finite_difference_gradient,
                               get_function, gradient_indicator, region_measure, to_search_problem)

SUITE = {fn.name: fn for fn in builtin_suite()}


def test_suite_has_six_rows_in_order():
    assert list(SUITE) == ["rastrigin", "styblinski_tang", "alpine02", "himmelblan", "rosenbrock", "gomez_levy"]


def test_rosenbrock_indicator_examples():
    fn = SUITE["rosenbrock"]
    assert gradient_indicator(fn, [1.0, 1.0]) == 1
    g = fn.gradient(np.array([1.2, 1.0]))
    assert abs(g[0]) > 0.1
    assert gradient_indicator(fn, [1.2, 1.0]) == 0


def test_himmelblan_outside_box():
    assert gradient_indicator(SUITE["himmelblan"], [2.5, 0.0]) == 0


def test_himmelblan_is_the_printed_form():
    fn = SUITE["himmelblan"]
    x1, x2 = 0.7, -1.3
    assert fn.objective(np.array([x1, x2])) == pytest.approx((x1 + x2 - 11) ** 2 + (x1 + x2**2 - 7) ** 2)
    classic = extra_functions()[0]
    assert classic.objective(np.array([3.0, 2.0])) == pytest.approx(0.0)


def test_alpine_value():
    assert SUITE["alpine02"].objective(np.array([math.pi / 2, math.pi / 2])) == pytest.approx(-math.pi / 2)


def test_alpine_floor_points_never_qualify():
    fn = SUITE["alpine02"]
    assert gradient_indicator(fn, [0.0, 5.0]) == 0
    assert gradient_indicator(fn, [1e-12, 1e-12]) == 0


def test_styblinski_stationary_coordinate():
    roots = np.roots([4, 0, -32, 5]).real
    for r in roots:
        g = SUITE["styblinski_tang"].gradient(np.array([r, 0.3]))
        assert g[0] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("name", list(SUITE))
def test_gradient_matches_finite_difference(name):
    fn = SUITE[name]
    rng = np.random.default_rng(list(SUITE).index(name))
    box = np.asarray(fn.box)
    x = box[:, 0] + (box[:, 1] - box[:, 0]) * rng.uniform(0.02, 0.98, size=(100, fn.dimension))
    fd = finite_difference_gradient(fn.objective, 1e-6)(x)
    an = fn.gradient(x)
    np.testing.assert_allclose(an, fd, rtol=1e-5, atol=1e-5)


def test_search_problem_shapes():
    rosen = to_search_problem(SUITE["rosenbrock"])
    assert rosen.in_region([1.0, 1.0]) and not rosen.in_region([1.2, 1.2])
    assert region_measure(SUITE["rosenbrock"]) == pytest.approx(2 * math.pi)
    assert region_measure(SUITE["rastrigin"]) == 16.0
    gl = to_search_problem(SUITE["gomez_levy"])
    np.testing.assert_array_equal(gl.bounding_box, [[-1.0, 0.75], [-1.0, 1.0]])
    x = np.array([0.125, 0.25])  # -sin(pi/2) + 2 sin^2(pi/2) = 1
    assert gl.in_region(x)
    assert not gl.in_region(np.array([-0.125, 0.25]))  # 1 + 2 = 3 > 1.5


def test_disk_region_measure_by_sampling():
    rng = np.random.default_rng(0)
    rosen = to_search_problem(SUITE["rosenbrock"])
    x = rng.uniform(-math.sqrt(2), math.sqrt(2), size=(400_000, 2))
    assert 8 * rosen.in_region(x).mean() == pytest.approx(2 * math.pi, rel=0.01)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(list(SUITE)), st.lists(st.floats(-3, 11), min_size=2, max_size=2))
def test_indicator_is_binary_and_inside_region(name, point):
    fn = SUITE[name]
    prob = to_search_problem(fn)
    x = np.array(point)
    f = prob.indicator(x)
    assert f in (0, 1)
    if f:
        assert prob.in_box(x) and prob.in_region(x)
    assert f == gradient_indicator(fn, x)


def test_linf_ball():
    ball = LinfBall(0.1)
    assert ball([0.1, -0.1]) and not ball([0.1, 0.11])
    assert ball.may_intersect([0.05, -1], [0.5, 1])
    assert not ball.may_intersect([0.2, 0.0], [0.3, 0.0])
    assert ball.contains([-0.1, 0.0], [0.1, 0.05])
    assert not ball.contains([-0.1, 0.0], [0.1, 0.2])


def test_get_function_aliases():
    assert get_function("Gomez-and-Levy").name == "gomez_levy"
    assert get_function("styblinski").name == "styblinski_tang"
    with pytest.raises(KeyError):
        get_function("nope")


def test_custom_function():
    fn = custom_function("bowl", "x1^2 + x2^2", [(-1, 1), (-1, 1)], ["x1 + x2 <= 1"], epsilon=0.2)
    assert gradient_indicator(fn, [0.05, 0.05]) == 1
    assert gradient_indicator(fn, [0.5, 0.5]) == 0
    assert not fn.in_domain(np.array([0.9, 0.9]))


# --- expression parser ----------------------------------------------------

@pytest.mark.parametrize("text, point, value", [
    ("1 + 2 * 3", [0.0], 7.0),
    ("2 ^ 3 ^ 2", [0.0], 512.0),
    ("-x1^2", [3.0], -9.0),
    ("x1 ** 2", [3.0], 9.0),
    ("(x1 - 1) * (x2 + 1)", [2.0, 3.0], 4.0),
    ("sin(pi / 2) + cos(0) + sqrt(4) + exp(0) + log(e) + abs(-2)", [0.0], 8.0),
    ("2.5e-1 * x1", [4.0], 1.0),
    ("-sin(4*pi*x1) + 2*sin(2*pi*x2)^2", [0.125, 0.25], 1.0),
])
def test_expression_values(text, point, value):
    assert Expression(text)(np.array(point)) == pytest.approx(value)


def test_expression_vectorized():
    e = Expression("x1 * x2")
    x = np.arange(6.0).reshape(3, 2)
    np.testing.assert_allclose(e(x), [0, 6, 20])


def test_constant_expression_broadcasts():
    e = Expression("0", 2)
    assert e(np.zeros((5, 2))).shape == (5,)


@pytest.mark.parametrize("text", ["1 +", "foo(1)", "x0", "(1", "1 2", "x3", "$"])
def test_expression_errors(text):
    with pytest.raises(ExpressionError):
        Expression(text, 2)


def test_inequality():
    c = parse_inequality("x1 >= x2")
    assert c(np.array([1.0, 0.5])) and not c(np.array([0.0, 0.5]))
    with pytest.raises(ExpressionError):
        parse_inequality("x1 = 2")
