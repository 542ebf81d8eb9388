"""Boundary expansions: arcs, the expanding map, cuspidal words, acceleration.

Points are pushed through the expanding map as direction vectors rather than
angles, so that arc membership is a sign test on two cross products and the
iteration can run in extended precision.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import CuspidalOrBoundary, NotAdmissible, WordParseError
from .projective import (
    CirclePoint,
    Mat2,
    boundary_action,
    boundary_vector,
    cross,
    extended_precision,
    line_angle,
    scalar,
    settings,
    vector_to_boundary,
)

LEFT, RIGHT = "left", "right"


class Word(tuple):
    """A finite sequence of letter names."""

    @classmethod
    def parse(cls, text, desc=None):
        text = text.strip()
        if not text:
            return cls()
        letters = [part.strip() for part in text.split(",")]
        if any(not l for l in letters):
            raise WordParseError(f"empty letter in word {text!r}")
        if desc is not None:
            unknown = [l for l in letters if l not in desc.bars]
            if unknown:
                raise WordParseError(f"unknown letter(s) {', '.join(unknown)}")
        return cls(letters)

    def __str__(self):
        return ",".join(self)

    def __add__(self, other):
        return Word(tuple(self) + tuple(other))

    def __getitem__(self, item):
        out = tuple.__getitem__(self, item)
        return Word(out) if isinstance(item, slice) else out

    def repeated(self, times):
        return Word(tuple(self) * times)


def as_word(w, desc=None):
    if isinstance(w, str):
        return Word.parse(w, desc)
    return w if isinstance(w, Word) else Word(w)


def is_admissible(desc, w):
    return all(w[i + 1] != desc.bar(w[i]) for i in range(len(w) - 1))


def require_admissible(desc, w):
    for l in w:
        if l not in desc.bars:
            raise NotAdmissible(f"unknown letter {l!r}")
    for i in range(len(w) - 1):
        if w[i + 1] == desc.bar(w[i]):
            raise NotAdmissible(f"backtracking at position {i}: {w[i]} {w[i + 1]}")


# -- cusp links -------------------------------------------------------------


@lru_cache(maxsize=64)
def cusp_links(desc, tol=None):
    """Pairs ``(x, y)`` with ``xi^side_x = G_x(xi^side_y)``, per side.

    A word is left (right) cuspidal exactly when each consecutive pair is a
    left (right) link.
    """
    tol = settings.endpoint_tol if tol is None else tol
    links = {LEFT: set(), RIGHT: set()}
    for x in desc.letters:
        g = desc.G(x)
        for y in desc.letters:
            if y == desc.bar(x):
                continue
            for k, side in enumerate((LEFT, RIGHT)):
                image = boundary_action(g, desc.vertices[y][k])
                if image.distance(desc.vertices[x][k]) <= tol:
                    links[side].add((x, y))
    return {side: frozenset(v) for side, v in links.items()}


def _cuspidal(desc, w, side):
    require_admissible(desc, w)
    links = cusp_links(desc)[side]
    return all((w[i], w[i + 1]) in links for i in range(len(w) - 1))


def is_left_cuspidal(desc, w):
    return _cuspidal(desc, w, LEFT)


def is_right_cuspidal(desc, w):
    return _cuspidal(desc, w, RIGHT)


def is_cuspidal(desc, w):
    return is_left_cuspidal(desc, w) or is_right_cuspidal(desc, w)


def unique_cuspidal_extension(desc, alpha, side, k):
    """The cuspidal word of length k on the given side starting with ``alpha``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    slot = 0 if side == LEFT else 1
    word = [alpha]
    while len(word) < k:
        x = word[-1]
        target = desc.vertices[x][slot]
        nxt = [y for y in desc.letters if y != desc.bar(x)
               and boundary_action(desc.G(x), desc.vertices[y][slot]).distance(target)
               <= settings.endpoint_tol]
        if len(nxt) != 1:
            raise ValueError(f"{len(nxt)} {side} continuations after {x}")
        word.append(nxt[0])
    return Word(word)


def parabolic_word(desc, alpha, side):
    """Period word of the cuspidal sequence from ``alpha`` and its product.

    The product is returned with determinant one and nonnegative trace, so it
    fixes the shared wedge vector itself and not its negative.
    """
    word = unique_cuspidal_extension(desc, alpha, side, 1)
    for k in range(2, 2 * len(desc.letters) + 2):
        word = unique_cuspidal_extension(desc, alpha, side, k)
        if word[-1] == alpha:
            period = word[:-1]
            prod = Mat2.identity()
            for l in period:
                prod = prod @ desc.G(l)
            return period, prod.sl2()
    raise ValueError(f"no period found for {alpha} on the {side}")


# -- acceleration -----------------------------------------------------------


@dataclass(frozen=True)
class AccelerationRecord:
    times: tuple
    lengths: tuple
    sides: tuple
    length: int

    def blocks(self):
        return [(n, n + k, s) for n, k, s in zip(self.times, self.lengths, self.sides)]

    def block_of(self, n):
        for i, (start, end, _) in enumerate(self.blocks()):
            if start <= n < end:
                return i
        raise IndexError(n)


def accelerated_times(desc, w):
    """Split ``w`` into maximal cuspidal blocks.

    The side flag is ``"left"`` or ``"right"`` for blocks of length two or
    more and ``"both"`` for single letters.  The last block is cut by the
    end of the word, so its maximality is not known.
    """
    w = as_word(w)
    require_admissible(desc, w)
    links = cusp_links(desc)
    times, lengths, sides = [], [], []
    n = 0
    while n < len(w):
        left = right = True
        j = n
        while j + 1 < len(w):
            pair = (w[j], w[j + 1])
            still_left = left and pair in links[LEFT]
            still_right = right and pair in links[RIGHT]
            if not (still_left or still_right):
                break
            left, right = still_left, still_right
            j += 1
        times.append(n)
        lengths.append(j - n + 1)
        sides.append("both" if j == n else (LEFT if left else RIGHT))
        n = j + 1
    return AccelerationRecord(tuple(times), tuple(lengths), tuple(sides), len(w))


# -- arcs and the expanding map ---------------------------------------------


@dataclass(frozen=True)
class Arc:
    """Closed arc running counterclockwise from ``left`` to ``right``."""

    left: CirclePoint
    right: CirclePoint
    full: bool = False

    @classmethod
    def whole_circle(cls):
        return cls(CirclePoint(0.0), CirclePoint(0.0), True)

    @property
    def length(self):
        if self.full:
            return 2 * math.pi
        return self.left.ccw_offset(self.right)

    def contains(self, xi, tol=None):
        if self.full:
            return True
        tol = settings.tol if tol is None else tol
        offset = self.left.ccw_offset(xi)
        return offset <= self.length + tol or offset >= 2 * math.pi - tol

    def contains_interior(self, xi, tol=None):
        tol = settings.tol if tol is None else tol
        offset = self.left.ccw_offset(xi)
        return tol < offset < self.length - tol

    def contains_arc(self, other, tol=None):
        if self.full:
            return True
        tol = settings.tol if tol is None else tol

        def offset(xi):
            # points just clockwise of ``left`` count as slightly negative
            off = self.left.ccw_offset(xi)
            return off - 2 * math.pi if off >= 2 * math.pi - tol else off

        lo, hi = offset(other.left), offset(other.right)
        return -tol <= lo <= hi + tol and hi <= self.length + tol

    def midpoint(self):
        return CirclePoint(self.left.angle + self.length / 2)


def _unit(v):
    m = max(abs(v[0]), abs(v[1]))
    return (v[0] / m, v[1] / m)


def push_vector(desc, w, v):
    """``G_{w0} ... G_{w_{k-1}} v``, rescaled at each step."""
    for l in reversed(w):
        v = _unit(desc.G(l).promoted() @ v)
    return v


def arc_of_word(desc, w):
    w = as_word(w)
    if not w:
        return Arc.whole_circle()
    require_admissible(desc, w)
    v_r, v_l = desc.wedges[w[-1]]
    left = push_vector(desc, w[:-1], tuple(map(scalar, v_l)))
    right = push_vector(desc, w[:-1], tuple(map(scalar, v_r)))
    return Arc(vector_to_boundary(left), vector_to_boundary(right))


def expand_vector(desc, u, tol=None):
    """One step of the expanding map on a direction vector."""
    tol = settings.tol if tol is None else tol
    for alpha in desc.letters:
        v_r, v_l = desc.wedges[alpha]
        # circle distance is twice the angle between lines
        if 2 * min(line_angle(u, v_r), line_angle(u, v_l)) <= tol:
            raise CuspidalOrBoundary(f"point within {tol} of a vertex of {alpha}")
        if cross(v_r, u) * cross(u, v_l) > 0:
            inv = desc.G(alpha).adjugate().promoted()
            return alpha, _unit(inv @ u)
    raise CuspidalOrBoundary("point not interior to any arc")


def expansion_map(desc, xi):
    alpha, u = expand_vector(desc, boundary_vector(xi))
    return alpha, vector_to_boundary(u)


def _digits_for(n):
    return max(30, 20 + 2 * n)


def itinerary(desc, xi, n):
    """First n letters of the boundary expansion of ``xi``.

    The orbit is computed with enough digits for the expansion to stay
    faithful to the given point over n steps.
    """
    letters = []
    with extended_precision(_digits_for(n)):
        angle = xi.angle if isinstance(xi, CirclePoint) else xi
        u = boundary_vector(CirclePoint(scalar(angle)))
        for _ in range(n):
            alpha, u = expand_vector(desc, u)
            letters.append(alpha)
    return Word(letters)


def word_midpoint(desc, w):
    """Midpoint of the arc of ``w``, as a high-precision circle point."""
    with extended_precision(_digits_for(len(w))):
        return arc_of_word(desc, w).midpoint()


def transition_matrix(desc, w):
    """``W_{w0}^{-1} G_{w0} ... G_{w_{k-1}} W_{wk}`` with exact entries when possible."""
    prod = desc.W(w[0]).adjugate()
    for l in w[:-1]:
        prod = prod @ desc.G(l)
    return prod @ desc.W(w[-1])
