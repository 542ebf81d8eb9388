"""Forward and backward continued fractions attached to a letter.

Fix a letter ``alpha`` and put

    A_b = W_alpha^{-1} G_alpha G_b G_alpha^{-1} W_alpha
    B_b = R W_alpha^T G_b^T (W_alpha^T)^{-1} R,        R = [[0, 1], [1, 0]].

The forward value of ``a_0 a_1 ...`` is the limit of
``A_{a_0} ... A_{a_{n-1}} (W_alpha^{-1} G_alpha W_{a_n}) * inf`` and the
backward value of ``b_0 b_1 ...`` the limit of
``B_{b_0} ... B_{b_k} (R W_alpha^T (W_{b_k}^T)^{-1} R) * inf``.  Each partial
product maps ``[0, inf]`` into itself, and the image interval is a
certificate that shrinks onto the limit.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import islice

from .coding import RIGHT, parabolic_word
from .errors import FirstLetterClash, NotAdmissible, ShearShapeViolation
from .projective import INF, Mat2, is_inf, moebius_apply, settings

SWAP = Mat2(0, 1, 1, 0)


@dataclass(frozen=True, eq=False)
class CFContext:
    alpha: str
    A: dict
    B: dict
    forward_tail: dict
    backward_tail: dict
    mu: float
    det_W_alpha: float
    parabolic: tuple
    bars: dict

    R = SWAP


def _raw_A(desc, alpha, beta):
    W, G = desc.W(alpha), desc.G(alpha)
    return W.inverse() @ G @ desc.G(beta) @ G.inverse() @ W


def _raw_B(desc, alpha, beta):
    Wt = desc.W(alpha).transpose()
    return SWAP @ Wt @ desc.G(beta).transpose() @ Wt.inverse() @ SWAP


@lru_cache(maxsize=64)
def build_context(desc, alpha):
    if alpha not in desc.bars:
        raise KeyError(alpha)
    W = desc.W(alpha)
    A = {b: _raw_A(desc, alpha, b) for b in desc.letters}
    B = {b: _raw_B(desc, alpha, b) for b in desc.letters}
    fwd = {b: W.inverse() @ desc.G(alpha) @ desc.W(b) for b in desc.letters}
    bwd = {b: SWAP @ W.transpose() @ desc.W(b).transpose().inverse() @ SWAP
           for b in desc.letters}
    word, _ = parabolic_word(desc, alpha, RIGHT)
    prod = Mat2.identity()
    for letter in word[1:] + (alpha,):
        prod = prod @ A[letter]
    shear = prod.normalized()
    dev = max(abs(shear.a - 1), abs(shear.c), abs(shear.d - 1))
    if dev > settings.shear_tol or not shear.b > 0:
        raise ShearShapeViolation(f"parabolic product {shear} is not [[1, mu], [0, 1]] with mu > 0")
    return CFContext(alpha, A, B, fwd, bwd, float(shear.b), float(W.det()),
                     tuple(word), dict(desc.bars))


def shear_product(ctx):
    prod = Mat2.identity()
    for letter in ctx.parabolic[1:] + (ctx.alpha,):
        prod = prod @ ctx.A[letter]
    return prod


@dataclass(frozen=True)
class CFValue:
    value: float
    enclosure: tuple
    converged: bool
    letters: int = 0

    @property
    def width(self):
        lo, hi = self.enclosure
        return INF if is_inf(hi) or is_inf(lo) else hi - lo

    def shifted(self, amount):
        lo, hi = self.enclosure
        return CFValue(self.value + amount, (lo + amount, hi + amount),
                       self.converged, self.letters)


def image_interval(m):
    """Image of ``[0, inf]`` under a positive matrix."""
    p, q = moebius_apply(m, 0.0) + 0.0, moebius_apply(m, INF) + 0.0
    return (p, q) if p <= q else (q, p)


def _rescale(m):
    s = m.max_abs()
    return m if s == 0 else Mat2(m.a / s, m.b / s, m.c / s, m.d / s)


def _run(ctx, letters, tol, backward, trace):
    prefix = Mat2.identity()
    last = None
    result = None
    for n, letter in enumerate(letters):
        if n == 0 and letter == ctx.bars[ctx.alpha]:
            raise FirstLetterClash(f"first letter {letter} is the bar of {ctx.alpha}")
        if last is not None and letter == ctx.bars[last]:
            raise NotAdmissible(f"backtracking at position {n - 1}: {last} {letter}")
        if backward:
            prefix = _rescale(prefix @ ctx.B[letter])
            partial = prefix @ ctx.backward_tail[letter]
        else:
            partial = prefix @ ctx.forward_tail[letter]
            prefix = _rescale(prefix @ ctx.A[letter])
        value = moebius_apply(partial, INF) + 0.0
        box = image_interval(partial)
        result = CFValue(value, box, False, n + 1)
        if trace is not None:
            trace.append(result)
        last = letter
        if result.width < tol:
            return CFValue(value, box, True, n + 1)
    if result is None:
        raise ValueError("empty word")
    return result


def forward_cf(ctx, word, tol=1e-10, max_letters=None, trace=None):
    """Forward value of ``word`` (a sequence or any iterable of letters)."""
    letters = iter(word) if max_letters is None else islice(word, max_letters)
    return _run(ctx, letters, tol, False, trace)


def backward_cf(ctx, word, tol=1e-10, max_letters=None, trace=None):
    letters = iter(word) if max_letters is None else islice(word, max_letters)
    return _run(ctx, letters, tol, True, trace)


def parabolic_prefix_shift(ctx, value, blocks=1):
    """Value after prepending ``blocks`` copies of the right parabolic block."""
    return value.shifted(blocks * ctx.mu)


def area_via_cf(desc, w, n, tol=1e-10):
    """Right-hand sides of the continued fraction area formula at index n.

    Returns ``1/Area`` predictions for ``v_r`` and ``v_l`` built from the past
    ``w[n-1], ..., w[0]`` and the future ``w[n+1], ...`` read in the frame of
    ``w[n]``.
    """
    if not 0 < n < len(w) - 1:
        raise ValueError("n must have letters on both sides")
    ctx = build_context(desc, w[n])
    past = backward_cf(ctx, [w[i] for i in range(n - 1, -1, -1)], tol)
    future = forward_cf(ctx, w[n + 1:], tol)
    det = ctx.det_W_alpha
    p, f = past.value, future.value
    inv_r = (p + f) / det
    inv_l = ((1 / p if p else INF) + (1 / f if f else INF)) / det
    return {"inv_area_r": inv_r, "inv_area_l": inv_l, "past": past, "future": future}


def ratio_transport(A, ratio, side):
    """Move a wedge ratio across ``W' = W A``.

    ``side="im"`` carries ``Im(v_l)/Im(v_r)`` of ``W`` to that of ``W'``.
    ``side="re"`` carries ``-Re(v_l)/Re(v_r)`` of ``W'`` back to that of ``W``.
    """
    if A.det() <= 0:
        raise ValueError("transport needs det A > 0")
    if side == "im":
        return moebius_apply(SWAP @ A.transpose() @ SWAP, ratio)
    if side == "re":
        return moebius_apply(A, ratio)
    raise ValueError(f"unknown side {side!r}")


def cf_value(ctx, word, backward=False, tol=1e-12):
    fn = backward_cf if backward else forward_cf
    return fn(ctx, word, tol).value
