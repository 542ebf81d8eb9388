import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import TORUS, admissible_words, random_word
from veech_lagrange.classical import classical_lagrange, periodic
from veech_lagrange.coding import RIGHT, LEFT, Word, accelerated_times, itinerary
from veech_lagrange.errors import CuspidalDirection, NotAdmissible
from veech_lagrange.projective import Direction, direction_to_boundary
from veech_lagrange.surface import ConstantsTable, constants_table
from veech_lagrange.wedges import (
    area_lower_bound,
    area_theta,
    check_block_bounds,
    lagrange_estimate,
    wedge_angles,
    wedge_sequence,
    wedge_vectors,
)

GOLDEN = Word(("b", "a_bar", "b_bar", "a"))
SILVER = Word(("b", "a"))
CONSTS = constants_table(TORUS, 8)


def test_area_examples():
    assert area_theta((3, 4), 0.0) == pytest.approx(12)
    assert area_theta((0, 5), 0.0) == 0


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(-1.5, 1.5))
def test_area_is_rotation_invariant(x, y, theta):
    # rotating v clockwise by theta lines the direction up with the vertical
    c, s = math.cos(theta), math.sin(theta)
    rotated = (c * x - s * y, s * x + c * y)
    assert area_theta((x, y), theta) == pytest.approx(area_theta(rotated, 0.0), abs=1e-9)


def test_first_wedge_is_from_the_descriptor():
    w = wedge_vectors(TORUS, ("b", "a", "b"))[0]
    assert (w.v_r, w.v_l) == TORUS.wedges["b"]


@given(admissible_words(max_size=40))
def test_wedge_determinants_are_preserved(w):
    for n, wedge in enumerate(wedge_vectors(TORUS, w)):
        assert wedge.det() == TORUS.W(w[n]).det() > 0


@given(admissible_words(min_size=3, max_size=40))
def test_right_blocks_keep_v_r(w):
    wedges = wedge_vectors(TORUS, w)
    for start, end, side in accelerated_times(TORUS, w).blocks():
        fixed = {RIGHT: "v_r", LEFT: "v_l"}.get(side)
        if fixed is None:
            continue
        first = getattr(wedges[start], fixed)
        for n in range(start, end):
            # the same saddle connection, possibly with the opposite sign
            v = getattr(wedges[n], fixed)
            assert v in (first, (-first[0], -first[1]))


@given(admissible_words(min_size=4, max_size=30))
def test_shifted_word_is_the_pulled_back_tail(w):
    full = wedge_vectors(TORUS, w)
    tail = wedge_vectors(TORUS, w[1:])
    g = TORUS.G(w[0])
    for big, small in zip(full[1:], tail):
        assert g @ small.v_r == big.v_r
        assert g @ small.v_l == big.v_l


def test_wedge_sequence_rejects_backtracking():
    with pytest.raises(NotAdmissible):
        wedge_sequence(TORUS, ("a", "b", "b_bar"))


def test_golden_word_estimate():
    est = lagrange_estimate(TORUS, word=GOLDEN.repeated(15), depth=40)
    assert abs(est.estimate - math.sqrt(5)) < 1e-3
    assert est.window == (20, 40)


def test_silver_word_estimate():
    est = lagrange_estimate(TORUS, word=SILVER.repeated(30), depth=40)
    assert abs(est.estimate - 2 * math.sqrt(2)) < 1e-3


def test_estimate_from_direction_matches_word():
    theta = math.atan((math.sqrt(5) - 1) / 2)
    # a double only follows the golden word for about twenty letters
    est = lagrange_estimate(TORUS, theta=theta, depth=16)
    assert abs(est.estimate - math.sqrt(5)) < 1e-3


def test_eventually_cuspidal_word_is_rejected():
    w = SILVER.repeated(5) + Word(("a",)) * 1
    w = Word(tuple(w) + ("a",) * 40)
    with pytest.raises(CuspidalDirection):
        lagrange_estimate(TORUS, word=w, depth=40)


def test_short_word_is_rejected():
    with pytest.raises(ValueError):
        lagrange_estimate(TORUS, word=SILVER.repeated(5), depth=40)


def test_faithfulness_gate():
    est = lagrange_estimate(TORUS, word=SILVER.repeated(30), depth=40, consts=CONSTS)
    assert est.L0 == pytest.approx(CONSTS.L0)
    assert est.faithful == (est.estimate > CONSTS.L0)


def test_running_values_are_inverse_min_areas():
    est = lagrange_estimate(TORUS, word=GOLDEN.repeated(15), depth=40)
    seq = est.sequence
    for n in range(41):
        assert est.running_values[n] == pytest.approx(1 / min(seq.area_r[n], seq.area_l[n]))
    lo, hi = est.window
    proxy = 1 / est.estimate
    assert all(min(seq.area_r[n], seq.area_l[n]) >= proxy * (1 - 1e-12)
               for n in range(lo, hi + 1))


def test_transport_agrees_with_direct_areas():
    # direct areas use the rounded angle, which codes the word for about
    # twenty letters only
    rng = random.Random(4)
    for _ in range(20):
        w = random_word(rng, 60)
        fast = wedge_sequence(TORUS, w)
        slow = wedge_sequence(TORUS, w, theta=fast.theta)
        for n in range(10):
            assert fast.area_r[n] == pytest.approx(slow.area_r[n], rel=1e-8)
            assert fast.area_l[n] == pytest.approx(slow.area_l[n], rel=1e-8)


def test_wedges_csv():
    text = wedge_sequence(TORUS, SILVER.repeated(4)).to_csv()
    lines = text.splitlines()
    assert lines[0] == "n,area_r,area_l,min_area,inverse_min"
    assert len(lines) == 9


def test_area_lower_bound():
    assert area_lower_bound(CONSTS, 1) == pytest.approx(1 / CONSTS.L0)
    bounds = [area_lower_bound(CONSTS, n) for n in range(1, 8)]
    assert all(x >= y for x, y in zip(bounds, bounds[1:]))
    assert area_lower_bound(CONSTS, 3) == pytest.approx(
        CONSTS.c ** 2 / (4 * CONSTS.M[0] * CONSTS.M[3]))


def test_block_bounds_hold_on_random_words():
    consts = constants_table(TORUS, 12)
    rng = random.Random(9)
    for _ in range(50):
        w = random_word(rng, 61)
        seq = wedge_sequence(TORUS, w)
        report = check_block_bounds(TORUS, seq, accelerated_times(TORUS, w), consts)
        assert report.checks
        assert not report.violations


def test_block_bounds_catch_a_wrong_constant():
    wrong = ConstantsTable(CONSTS.M, 10 * CONSTS.c, "given")
    rng = random.Random(9)
    w = random_word(rng, 61)
    report = check_block_bounds(TORUS, wedge_sequence(TORUS, w), accelerated_times(TORUS, w),
                                wrong)
    assert report.failures


def _nesting_violation(theta, depth=60):
    w = itinerary(TORUS, direction_to_boundary(Direction(theta)), depth + 1)
    angles, t = wedge_angles(TORUS, w, Direction(theta))
    worst = -math.inf
    for n, (r, l) in enumerate(angles):
        # v_r lies clockwise of theta and v_l counterclockwise
        worst = max(worst, l - t, t - r)
        if n + 1 < len(angles):
            r2, l2 = angles[n + 1]
            worst = max(worst, r2 - r, l - l2)
    return worst, angles


def test_wedges_nest_around_the_direction():
    rng = random.Random(1)
    for _ in range(40):
        worst, angles = _nesting_violation(rng.uniform(-1.5, 1.5))
        assert worst <= 1e-9
        widths = [r - l for r, l in angles]
        assert all(x >= y - 1e-12 for x, y in zip(widths, widths[1:]))


def test_width_is_small_for_typical_words():
    # letters drawn uniformly: long cuspidal runs are rare
    rng = random.Random(5)
    for _ in range(200):
        w = random_word(rng, 61)
        wedge = wedge_vectors(TORUS, w)[60]
        cross = wedge.det()
        width = cross / (math.hypot(*wedge.v_r) * math.hypot(*wedge.v_l))
        assert width < 1e-6


def test_width_is_slow_near_a_cusp():
    # within about 1/60 of a cusp the expansion is cuspidal for 60 letters
    _, angles = _nesting_violation(0.005)
    r, l = angles[60]
    assert r - l > 1e-3
