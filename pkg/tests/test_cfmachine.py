import math
import random

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import TORUS, admissible_words, random_word
from veech_lagrange.cfmachine import (
    SWAP,
    _raw_A,
    _raw_B,
    area_via_cf,
    CFValue,
    backward_cf,
    build_context,
    forward_cf,
    parabolic_prefix_shift,
    ratio_transport,
    shear_product,
)
from veech_lagrange.coding import RIGHT, parabolic_word
from veech_lagrange.errors import FirstLetterClash, NotAdmissible
from veech_lagrange.projective import INF, Mat2, moebius_apply
from veech_lagrange.wedges import re_im, wedge_sequence, wedge_vectors

CONTEXTS = {a: build_context(TORUS, a) for a in TORUS.letters}


def _continuation(rng, alpha, n):
    first = rng.choice([c for c in TORUS.letters if c != TORUS.bar(alpha)])
    return random_word(rng, n, first=first)


@pytest.mark.parametrize("alpha", TORUS.letters)
def test_shear_shape(alpha):
    ctx = CONTEXTS[alpha]
    s = shear_product(ctx).normalized()
    assert (s.a, s.c, s.d) == pytest.approx((1, 0, 1), abs=1e-9)
    assert s.b == pytest.approx(ctx.mu) and ctx.mu > 0


@pytest.mark.parametrize("alpha", TORUS.letters)
def test_shear_is_the_conjugated_parabolic(alpha):
    period, prod = parabolic_word(TORUS, alpha, RIGHT)
    W = TORUS.W(alpha)
    conj = (W.inverse() @ prod @ W).normalized()
    assert conj.c == 0 and conj.a == conj.d == 1
    assert CONTEXTS[alpha].mu == conj.b == 2


@pytest.mark.parametrize("alpha", TORUS.letters)
def test_families_rebuild_from_raw_formulas(alpha):
    ctx = CONTEXTS[alpha]
    W, G = TORUS.W(alpha), TORUS.G(alpha)
    for beta in TORUS.letters:
        assert ctx.A[beta].normalized() == _raw_A(TORUS, alpha, beta).normalized()
        assert ctx.B[beta].normalized() == _raw_B(TORUS, alpha, beta).normalized()
        direct_A = W.inverse() @ G @ TORUS.G(beta) @ G.inverse() @ W
        direct_B = SWAP @ W.transpose() @ TORUS.G(beta).transpose() @ W.transpose().inverse() @ SWAP
        assert ctx.A[beta].projectively_close(direct_A, 1e-12)
        assert ctx.B[beta].projectively_close(direct_B, 1e-12)


@pytest.mark.parametrize("alpha", TORUS.letters)
def test_single_letter_values(alpha):
    ctx = CONTEXTS[alpha]
    for beta in TORUS.letters:
        if beta == TORUS.bar(alpha):
            with pytest.raises(FirstLetterClash):
                forward_cf(ctx, [beta])
            continue
        m = TORUS.W(alpha).inverse() @ TORUS.G(alpha) @ TORUS.W(beta)
        v = forward_cf(ctx, [beta])
        assert v.value == moebius_apply(m, INF) + 0.0
        assert 0 <= v.value <= INF


def test_backtracking_is_rejected():
    with pytest.raises(NotAdmissible):
        forward_cf(CONTEXTS["a"], ["a", "b", "b_bar"])


@given(st.sampled_from(TORUS.letters), st.integers(0, 2**32 - 1), st.booleans())
def test_enclosures_nest_and_stay_nonnegative(alpha, seed, backward):
    ctx = CONTEXTS[alpha]
    w = _continuation(random.Random(seed), alpha, 30)
    trace = []
    (backward_cf if backward else forward_cf)(ctx, w, tol=0.0, trace=trace)
    for prev, cur in zip(trace, trace[1:]):
        lo, hi = cur.enclosure
        assert 0 <= lo <= cur.value <= hi
        assert prev.enclosure[0] - 1e-12 * (1 + abs(lo)) <= lo
        assert hi <= prev.enclosure[1] + 1e-12 * (1 + abs(hi))


def test_thirty_letters_converge():
    rng = random.Random(3)
    for _ in range(50):
        alpha = rng.choice(TORUS.letters)
        w = _continuation(rng, alpha, 30)
        v = forward_cf(CONTEXTS[alpha], w, tol=1e-10)
        if any(w[i:i + 6] == (w[i],) * 6 for i in range(25)):
            continue
        assert v.converged and v.width < 1e-10


def test_shift_examples():
    ctx = CONTEXTS["a"]
    zero = CFValue(0.0, (0.0, 0.0), True)
    assert parabolic_prefix_shift(ctx, zero).value == ctx.mu
    v = forward_cf(ctx, ["b", "a", "b"])
    assert parabolic_prefix_shift(ctx, v, 2).value == pytest.approx(v.value + 2 * ctx.mu)


@given(st.sampled_from(TORUS.letters), st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_shift_matches_prefixed_word(alpha, seed, blocks):
    ctx = CONTEXTS[alpha]
    rest = _continuation(random.Random(seed), alpha, 40)
    block = ctx.parabolic[1:] + (alpha,)
    if rest[0] == TORUS.bar(block[-1]):
        return
    prefixed = forward_cf(ctx, block * blocks + tuple(rest), tol=1e-13)
    plain = forward_cf(ctx, rest, tol=1e-13)
    assert prefixed.value == pytest.approx(parabolic_prefix_shift(ctx, plain, blocks).value,
                                           abs=1e-9)


def test_ratio_transport_identity():
    assert ratio_transport(Mat2.identity(), 0.37, "im") == 0.37
    assert ratio_transport(Mat2.identity(), 0.37, "re") == 0.37


def test_ratio_transport_matches_columns():
    rng = random.Random(8)
    theta = 0.3
    for _ in range(100):
        W = Mat2(*(rng.uniform(-2, 2) for _ in range(4)))
        A = Mat2(*(rng.uniform(-2, 2) for _ in range(4)))
        if W.det() <= 0.1 or A.det() <= 0.1:
            continue
        W2 = W @ A

        def im_ratio(m):
            return re_im(m.col(1), theta)[1] / re_im(m.col(0), theta)[1]

        def re_ratio(m):
            return -re_im(m.col(1), theta)[0] / re_im(m.col(0), theta)[0]

        assert ratio_transport(A, im_ratio(W), "im") == pytest.approx(im_ratio(W2), rel=1e-10)
        assert ratio_transport(A, re_ratio(W2), "re") == pytest.approx(re_ratio(W), rel=1e-10)


def test_chained_transport_equals_product():
    A1, A2, A3 = Mat2(2, 1, 1, 1), Mat2(1, 1, 0, 1), Mat2(3, 1, 2, 1)
    step = 0.8
    for A in (A1, A2, A3):
        step = ratio_transport(A, step, "im")
    assert step == pytest.approx(ratio_transport(A1 @ A2 @ A3, 0.8, "im"), rel=1e-12)


@given(admissible_words(min_size=5, max_size=40))
def test_splitting_identity(w):
    seq = wedge_sequence(TORUS, w)
    with mpmath.workdps(80):
        theta = mpmath.mpf(seq.theta.theta)
        for n, wedge in enumerate(wedge_vectors(TORUS, w)):
            re_r, im_r = re_im(tuple(map(mpmath.mpf, wedge.v_r)), theta)
            re_l, im_l = re_im(tuple(map(mpmath.mpf, wedge.v_l)), theta)
            lhs = 1 / (re_r * im_r)
            rhs = (im_l / im_r - re_l / re_r) / TORUS.W(w[n]).det()
            assert abs(lhs - rhs) <= 1e-10 * abs(lhs)


def test_area_formula_duality_and_det_factor():
    rng = random.Random(12)
    w = random_word(rng, 80)
    out = area_via_cf(TORUS, w, 30)
    p, f = out["past"].value, out["future"].value
    det = float(TORUS.W(w[30]).det())
    assert out["inv_area_r"] == pytest.approx((p + f) / det)
    assert out["inv_area_l"] == pytest.approx((1 / p + 1 / f) / det)


def test_area_formula_gap_shrinks():
    rng = random.Random(5)
    gaps = {10: [], 30: []}
    for _ in range(50):
        w = random_word(rng, 120)
        seq = wedge_sequence(TORUS, w)
        for n in gaps:
            rhs = area_via_cf(TORUS, w, n)
            gaps[n].append(max(abs(1 / seq.area_r[n] - rhs["inv_area_r"]),
                               abs(1 / seq.area_l[n] - rhs["inv_area_l"])))
    assert max(gaps[30]) < 1e-6
    assert sum(gaps[10]) >= 10 * sum(gaps[30])


def test_area_formula_needs_both_sides():
    with pytest.raises(ValueError):
        area_via_cf(TORUS, ("a", "b", "a"), 0)
