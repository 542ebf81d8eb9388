import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from veech_lagrange.errors import PoleInsideInterval, ZeroVector
from veech_lagrange.projective import (
    INF,
    ROTATE_QUARTER,
    CirclePoint,
    Direction,
    Mat2,
    boundary_action,
    boundary_to_direction,
    cayley_image,
    direction_of_vector,
    direction_to_boundary,
    distortion_bounds,
    extended_precision,
    is_positive_projective,
    is_strictly_positive_projective,
    moebius_apply,
    unit_vector,
)

entries = st.integers(-6, 6)
mats = st.builds(Mat2, entries, entries, entries, entries).filter(lambda m: m.det() != 0)


def test_moebius_examples():
    assert moebius_apply(Mat2.identity(), 7.0) == 7.0
    assert moebius_apply(Mat2(1, 2, 0, 1), INF) == INF
    assert moebius_apply(Mat2(0, -1, 1, 0), 0.0) == INF
    assert moebius_apply(Mat2(2, 1, 3, 1), INF) == pytest.approx(2 / 3)


@given(mats, mats, st.floats(-50, 50))
def test_moebius_composition(m1, m2, x):
    inner = moebius_apply(m2, x)
    lhs = moebius_apply(m1 @ m2, x)
    rhs = moebius_apply(m1, inner)
    if math.isinf(lhs) or math.isinf(rhs):
        return
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


@given(mats)
def test_normal_form_is_idempotent(m):
    n = m.normalized()
    assert n.normalized() == n
    assert abs(abs(n.det()) - 1) < 1e-12
    first = next(x for x in n.entries() if x != 0)
    assert first > 0


def test_positivity_examples():
    assert is_positive_projective(Mat2(1, 1, 1, 2))
    assert is_strictly_positive_projective(Mat2(1, 1, 1, 2))
    assert is_positive_projective(Mat2(-1, -1, -1, -2))
    assert is_strictly_positive_projective(Mat2(-1, -1, -1, -2))
    assert not is_positive_projective(Mat2(1, -1, 1, 1))
    assert not is_strictly_positive_projective(Mat2(1, -1, 1, 1))
    assert is_positive_projective(Mat2(1, 0, 0, 1))
    assert not is_strictly_positive_projective(Mat2(1, 0, 0, 1))


@given(mats)
def test_positivity_is_scale_invariant(m):
    assert is_positive_projective(m) == is_positive_projective(m.scaled(-3))
    assert is_strictly_positive_projective(m) == is_strictly_positive_projective(m.scaled(-3))


def _ratio(m, x, t, y):
    g = lambda z: moebius_apply(m, z)
    return abs(g(x) - g(t)) / abs(g(y) - g(t))


def test_distortion_identity_collapses():
    lo, hi = distortion_bounds(Mat2.identity(), 0.0, 1.0, 3.0)
    assert lo == hi == pytest.approx(0.5)


def test_distortion_diagonal_example():
    m = Mat2(2, 0, 0, 0.5)
    lo, hi = distortion_bounds(m, 0.0, 1.0, 2.0)
    assert lo <= _ratio(m, 0.0, 1.0, 2.0) <= hi


def test_distortion_pole_inside_raises():
    with pytest.raises(PoleInsideInterval):
        distortion_bounds(Mat2(0, 1, 1, -1), 0.0, 0.5, 2.0)


@given(st.integers(1, 5), st.floats(0.1, 3), st.floats(0.01, 0.99), st.floats(0.1, 3))
def test_distortion_parabolic_pole_left(k, offset, frac, width):
    m = Mat2(1, 0, k, 1)  # pole at -1/k
    x = -1 / k + offset
    y = x + width
    t = x + frac * width
    lo, hi = distortion_bounds(m, x, t, y)
    assert lo <= _ratio(m, x, t, y) * (1 + 1e-12)
    assert _ratio(m, x, t, y) <= hi * (1 + 1e-12)


def test_direction_to_boundary_examples():
    assert direction_to_boundary(Direction(0.0)).angle == pytest.approx(math.pi / 2)
    assert direction_to_boundary(Direction(-math.pi / 2)).angle == pytest.approx(3 * math.pi / 2)


@given(st.floats(-math.pi / 2, math.pi / 2, exclude_max=True))
def test_direction_round_trip(theta):
    back = boundary_to_direction(direction_to_boundary(Direction(theta)))
    assert Direction(theta).close(back, 1e-12)


def test_direction_of_vector_examples():
    assert direction_of_vector((0, 1)).theta == 0
    assert direction_of_vector((1, 1)).theta == pytest.approx(math.pi / 4)
    assert direction_of_vector((-2, 0)).theta == pytest.approx(-math.pi / 2)
    assert direction_of_vector((0, -3)).theta == 0
    with pytest.raises(ZeroVector):
        direction_of_vector((0, 0))


def test_direction_range_is_half_open():
    assert Direction(math.pi / 2).theta == pytest.approx(-math.pi / 2)
    assert Direction(math.pi).theta == pytest.approx(0.0)


@given(st.sampled_from(["a", "b", "a_bar", "b_bar"]),
       st.floats(-math.pi / 2, math.pi / 2, exclude_max=True))
def test_generator_equivariance(letter, theta):
    from veech_lagrange import builtin_torus

    G = builtin_torus().G(letter)
    pushed = direction_to_boundary(direction_of_vector(G @ unit_vector(theta)))
    xi = direction_to_boundary(Direction(theta))
    assert pushed.close(cayley_image(G, xi), 1e-9)
    assert pushed.close(boundary_action(G, xi), 1e-9)


def test_cayley_rotation_is_a_quarter_turn():
    assert ROTATE_QUARTER.det() == 2


def test_circle_point_wraps():
    assert CirclePoint(2 * math.pi + 0.25).close(CirclePoint(0.25))
    assert CirclePoint(-0.1).angle == pytest.approx(2 * math.pi - 0.1)


def test_extended_precision_hook():
    import mpmath

    with extended_precision(50):
        m = Mat2(1, 1, 1, 2).promoted()
        v = moebius_apply(m, mpmath.mpf(1) / 3)
        assert isinstance(v, mpmath.mpf)
        assert abs(v - mpmath.mpf(4) / 7) < mpmath.mpf(10) ** -45


def test_integer_inverse_stays_exact():
    m = Mat2(3, 2, 4, 3)
    inv = m.inverse()
    assert inv == Mat2(3, -2, -4, 3)
    assert all(isinstance(x, int) for x in inv.entries())


def test_random_distortion_sandwich_sample():
    rng = random.Random(11)
    for _ in range(2000):
        m = Mat2(*(rng.uniform(-3, 3) for _ in range(4)))
        if abs(m.det()) < 1e-3:
            continue
        x, y = sorted(rng.uniform(-5, 5) for _ in range(2))
        if y - x < 1e-3:
            continue
        t = rng.uniform(x, y)
        try:
            lo, hi = distortion_bounds(m, x, t, y)
        except PoleInsideInterval:
            continue
        r = _ratio(m, x, t, y)
        assert lo * (1 - 1e-9) <= r <= hi * (1 + 1e-9)
