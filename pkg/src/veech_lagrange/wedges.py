"""Wedge sequences, flat areas and the large-value Lagrange estimator.

For ``theta`` and a vector ``v`` write ``Re(v)`` and ``Im(v)`` for the real
and imaginary parts of ``e^{i theta} v``.  Inside a wedge ``(v_r, v_l)``
that contains ``theta`` the two ratios

    y = Im(v_l) / Im(v_r)      (the past ratio)
    x = -Re(v_l) / Re(v_r)     (the future ratio)

are positive and ``1/Area(v_r) = (x + y)/det``, ``1/Area(v_l) = (1/x + 1/y)/det``.
Passing from wedge n to wedge n+1 multiplies the wedge matrix on the right by
``H = W_{a_n}^{-1} G_{a_n} W_{a_{n+1}}``; ``y`` is carried forward by the
Moebius map of ``R H^T R`` and ``x`` backward by that of ``H``.  Both
transports are contractions, so the areas stay accurate at any depth where
direct products would overflow or cancel.
"""

import math
from dataclasses import dataclass, field

from .coding import (
    LEFT,
    RIGHT,
    accelerated_times,
    as_word,
    itinerary,
    push_vector,
    require_admissible,
)
from .errors import CuspidalDirection, CuspidalOrBoundary, MissingConstants
from .projective import (
    Direction,
    Mat2,
    boundary_to_direction,
    cross,
    direction_to_boundary,
    extended_precision,
    moebius_apply,
    scalar,
    unit_vector,
)

SWAP = Mat2(0, 1, 1, 0)


def re_im(v, theta):
    if isinstance(theta, Direction):
        theta = theta.theta
    s, c = unit_vector(theta)
    x, y = v
    return x * c - y * s, x * s + y * c


def area_theta(v, theta):
    re, im = re_im(v, theta)
    return abs(re) * abs(im)


def transfer(desc, x, y):
    """``W_x^{-1} G_x W_y`` up to the positive factor ``det W_x``."""
    return desc.W(x).adjugate() @ desc.G(x) @ desc.W(y)


def transport_past(h, ratio):
    return moebius_apply(SWAP @ h.transpose() @ SWAP, ratio)


def transport_future(h, ratio):
    return moebius_apply(h, ratio)


@dataclass(frozen=True)
class Wedge:
    v_r: tuple
    v_l: tuple

    def matrix(self):
        return Mat2.columns(self.v_r, self.v_l)

    def det(self):
        return self.matrix().det()


@dataclass
class WedgeSequence:
    word: tuple
    theta: Direction
    area_r: list
    area_l: list
    dets: list
    wedges: list = None
    method: str = "transport"

    @property
    def min_area(self):
        return [min(r, l) for r, l in zip(self.area_r, self.area_l)]

    @property
    def inverse_min(self):
        return [1 / a if a > 0 else math.inf for a in self.min_area]

    def rows(self):
        for n, (r, l) in enumerate(zip(self.area_r, self.area_l)):
            m = min(r, l)
            yield n, r, l, m, (1 / m if m > 0 else math.inf)

    def to_csv(self):
        lines = ["n,area_r,area_l,min_area,inverse_min"]
        lines += [f"{n},{r!r},{l!r},{m!r},{i!r}" for n, r, l, m, i in self.rows()]
        return "\n".join(lines) + "\n"


def wedge_vectors(desc, w):
    """Exact wedges ``G_{a0} ... G_{a_{n-1}} W_{a_n}`` for n < len(w)."""
    out = []
    prod = Mat2.identity()
    for n, letter in enumerate(w):
        v_r, v_l = desc.wedges[letter]
        out.append(Wedge(prod @ v_r, prod @ v_l))
        prod = prod @ desc.G(letter)
    return out


def theta_of_word(desc, w):
    """Direction through the bisector of the deepest wedge of ``w``."""
    v_r, v_l = desc.wedges[w[-1]]
    mid = (v_r[0] + v_l[0], v_r[1] + v_l[1])
    v = push_vector(desc, w[:-1], tuple(float(x) for x in mid))
    return Direction(math.atan2(v[0], v[1]))


def _sector_angle(v, v_r, v_l):
    """Angle of ``v`` with its sign chosen inside the cone of ``(v_r, v_l)``.

    Inside one cone the clockwise angle is continuous, so angle chains can be
    compared with ordinary inequalities.
    """
    a = cross(v_r, v) * 1.0
    b = cross(v, v_l) * 1.0
    if a + b < 0:
        v = (-v[0], -v[1])
    return math.atan2(v[0], v[1])


def wedge_angles(desc, w, theta):
    """Sector angles of ``(v_r^(n), v_l^(n))`` and of ``theta``."""
    base_r, base_l = desc.wedges[w[0]]
    out = []
    for n in range(len(w)):
        v_r, v_l = desc.wedges[w[n]]
        r = push_vector(desc, w[:n], tuple(float(x) for x in v_r))
        l = push_vector(desc, w[:n], tuple(float(x) for x in v_l))
        out.append((_sector_angle(r, base_r, base_l), _sector_angle(l, base_r, base_l)))
    t = _sector_angle(unit_vector(theta.theta), base_r, base_l)
    return out, t


def _transport_areas(desc, w, theta):
    m = len(w) - 1
    hs = [transfer(desc, w[n], w[n + 1]) for n in range(m)]
    x = [0.0] * (m + 1)
    x[m] = 1.0
    for n in range(m - 1, -1, -1):
        x[n] = transport_future(hs[n], x[n + 1])
    v_r, v_l = desc.wedges[w[0]]
    y = [0.0] * (m + 1)
    y[0] = re_im(v_l, theta)[1] / re_im(v_r, theta)[1]
    for n in range(m):
        y[n + 1] = transport_past(hs[n], y[n])
    dets = [float(desc.W(l).det()) for l in w]
    area_r = [d / abs(a + b) for d, a, b in zip(dets, x, y)]
    area_l = [d * a * b / abs(a + b) for d, a, b in zip(dets, x, y)]
    return area_r, area_l, dets


def _direct_areas(desc, w, theta):
    wedges = wedge_vectors(desc, w)
    big = max(max(abs(c) for c in wd.v_r + wd.v_l) for wd in wedges)
    digits = 30 + 2 * int(math.log10(float(big) + 1) + 1)
    with extended_precision(digits):
        t = scalar(theta.theta)
        area_r = [float(area_theta(tuple(map(scalar, wd.v_r)), t)) for wd in wedges]
        area_l = [float(area_theta(tuple(map(scalar, wd.v_l)), t)) for wd in wedges]
    dets = [float(desc.W(l).det()) for l in w]
    return area_r, area_l, dets, wedges


def wedge_sequence(desc, w, theta=None, keep_vectors=None):
    """Wedges and areas along ``w``.

    Without ``theta`` the direction is the one the word codes (see
    ``theta_of_word``) and areas come from the ratio transport.  With an
    independent ``theta`` the areas are computed from exact wedge vectors in
    extended precision.
    """
    w = as_word(w, desc)
    require_admissible(desc, w)
    if not w:
        raise ValueError("empty word")
    if keep_vectors is None:
        keep_vectors = len(w) <= 400
    if theta is None:
        theta = theta_of_word(desc, w)
        area_r, area_l, dets = _transport_areas(desc, w, theta)
        wedges = wedge_vectors(desc, w) if keep_vectors else None
        return WedgeSequence(w, theta, area_r, area_l, dets, wedges, "transport")
    if not isinstance(theta, Direction):
        theta = Direction(theta)
    area_r, area_l, dets, wedges = _direct_areas(desc, w, theta)
    return WedgeSequence(w, theta, area_r, area_l, dets,
                         wedges if keep_vectors else None, "direct")


@dataclass
class LagrangeEstimate:
    running_values: list
    estimate: float
    theta_used: Direction
    window: tuple
    L0: float = None
    faithful: bool = None
    sequence: WedgeSequence = field(default=None, repr=False)

    def as_dict(self):
        return {
            "estimate": self.estimate,
            "theta_used": float(self.theta_used.theta),
            "window": list(self.window),
            "L0": self.L0,
            "faithful": self.faithful,
            "running_values": list(self.running_values),
        }


def _eventually_cuspidal(desc, w, start):
    rec = accelerated_times(desc, w)
    last_start = rec.times[-1]
    return rec.lengths[-1] > 1 and last_start <= start


def lagrange_estimate(desc, word=None, theta=None, depth=40, window=None,
                      tail=40, consts=None):
    """Finite-depth proxy for ``1 / liminf Area(W^(n))``.

    ``running_values[n]`` is ``1/min area`` of wedge n for ``n <= depth`` and
    the estimate is the largest of them over the trailing window, by default
    the second half ``[depth // 2, depth]``.  A word must extend past
    ``depth``; the letters beyond it only pin down the direction.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    lo, hi = window if window is not None else (depth // 2, depth)
    if word is not None:
        w = as_word(word, desc)
        require_admissible(desc, w)
        if len(w) <= depth:
            raise ValueError(f"word of length {len(w)} does not reach depth {depth}")
        if _eventually_cuspidal(desc, w, lo):
            raise CuspidalDirection("word ends in a cuspidal block covering the window")
        seq = wedge_sequence(desc, w, keep_vectors=False)
    else:
        if not isinstance(theta, Direction):
            theta = Direction(theta)
        try:
            w = itinerary(desc, direction_to_boundary(theta), depth + tail)
        except CuspidalOrBoundary as exc:
            raise CuspidalDirection(str(exc)) from exc
        if _eventually_cuspidal(desc, w, lo):
            raise CuspidalDirection("expansion ends in a cuspidal block covering the window")
        seq = wedge_sequence(desc, w, theta=theta, keep_vectors=False)
    values = seq.inverse_min[: depth + 1]
    estimate = max(values[lo: hi + 1])
    out = LagrangeEstimate(values, estimate, seq.theta, (lo, hi), sequence=seq)
    if consts is not None:
        out.L0 = consts.L0
        out.faithful = estimate > consts.L0
    return out


def area_lower_bound(consts, N):
    """``c^2 / (4 M_0 M_N)``."""
    return consts.area_bound(N)


# -- block bounds -----------------------------------------------------------


@dataclass
class BoundCheck:
    block: int
    name: str
    n: int
    side: str
    area: float
    bound: float
    passed: bool


@dataclass
class BlockBoundsReport:
    c_flag: str
    checks: list = field(default_factory=list)
    unchecked: int = 0

    @property
    def violations(self):
        return [c for c in self.checks if not c.passed]

    @property
    def failures(self):
        return self.violations if self.c_flag == "given" else []

    @property
    def warnings(self):
        return self.violations if self.c_flag != "given" else []

    def as_dict(self):
        return {"c_flag": self.c_flag, "checked": len(self.checks),
                "violations": len(self.violations), "failures": len(self.failures),
                "unchecked": self.unchecked}


def check_block_bounds(desc, seq, rec, consts):
    """Check the block-by-block area bounds along a wedge sequence.

    For a block of length N_k on which ``v_r`` is constant:

    * ``Area(v_r^n) > B(N_k + 2)`` on the block,
    * ``Area(v_l^{n_k}) > B(N_{k-1} + 3)``,
    * ``Area(v_l^n) > B(2)`` strictly inside the block,
    * ``Area(v_l^{n_{k+1}-1}) > B(N_{k+1} + 2)``,

    with ``B(n) = c^2 / (4 M_0 M_n)``; blocks on which ``v_l`` is constant
    use the mirror statements.  A single-letter block satisfies both
    descriptions and is checked against both.  The last block is cut by the
    end of the word and is only used where its length does not enter.
    """
    report = BlockBoundsReport(consts.c_flag)
    areas = {RIGHT: seq.area_r, LEFT: seq.area_l}
    blocks = rec.blocks()
    last = len(blocks) - 1

    def check(k, name, n, side, m_index):
        try:
            bound = consts.area_bound(m_index)
        except MissingConstants:
            report.unchecked += 1
            return
        a = areas[side][n]
        report.checks.append(BoundCheck(k, name, n, side, a, bound, a > bound))

    for k, (start, end, side) in enumerate(blocks):
        size = end - start
        sides = (RIGHT, LEFT) if side == "both" else ((RIGHT,) if side == RIGHT else (LEFT,))
        for fixed in sides:
            other = LEFT if fixed == RIGHT else RIGHT
            if k < last:
                for n in range(start, end):
                    check(k, "fixed_side", n, fixed, size + 2)
            if k > 0:
                check(k, "first_moving", start, other, rec.lengths[k - 1] + 3)
            for n in range(start + 1, end - 1):
                check(k, "inner_moving", n, other, 2)
            if k + 1 < last:
                check(k, "last_moving", end - 1, other, rec.lengths[k + 1] + 2)
    return report
