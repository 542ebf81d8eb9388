"""Projective 2x2 linear algebra, Moebius actions and the direction dictionary.

Conventions
-----------
A direction is an unoriented line in the plane, stored as the clockwise angle
``theta`` from the vertical axis, taken in ``[-pi/2, pi/2)``.  Its unit
representative is ``u(theta) = (sin theta, cos theta)``.

A boundary point of the disk is an angle in ``[0, 2 pi)``.  Direction
``theta`` corresponds to the boundary point ``pi/2 + 2 theta``.  The
boundary coordinate of that point under the Cayley map is
``tan(theta - pi/4)``, while a matrix acts on the slope coordinate
``tan(theta) = x/y`` of the direction.  The boundary action of a matrix is
therefore defined through the direction, and ``cayley_image`` offers the
same map written as a Moebius action conjugated by the pi/4 rotation.

The point at infinity of the extended real line is ``math.inf``.
``-inf`` is accepted and folded onto it.

Scalars are floats.  Inside ``extended_precision(dps)`` the helpers promote
scalars to ``mpmath.mpf`` so that the same code runs with a wider mantissa.
"""

import contextvars
import math
from contextlib import contextmanager
from dataclasses import dataclass

import mpmath

from .errors import PoleInsideInterval, ZeroVector

INF = math.inf
HALF_PI = math.pi / 2
TWO_PI = 2 * math.pi


class Settings:
    """Global tolerances.  Mutate through ``set_tolerances``."""

    tol = 1e-9
    endpoint_tol = 1e-7
    shear_tol = 1e-8


settings = Settings()


def set_tolerances(tol=None, endpoint_tol=None, shear_tol=None):
    if tol is not None:
        settings.tol = float(tol)
    if endpoint_tol is not None:
        settings.endpoint_tol = float(endpoint_tol)
    if shear_tol is not None:
        settings.shear_tol = float(shear_tol)


# -- precision hook ---------------------------------------------------------

_extended = contextvars.ContextVar("extended_precision", default=False)


@contextmanager
def extended_precision(dps):
    """Run the enclosed block with ``dps`` decimal digits."""
    token = _extended.set(True)
    try:
        with mpmath.workdps(dps):
            yield
    finally:
        _extended.reset(token)


def precision_active():
    return _extended.get()


def scalar(x):
    """Promote ``x`` to the active scalar type."""
    if _extended.get() and not isinstance(x, mpmath.mpf):
        if x == INF or x == -INF:
            return x
        return mpmath.mpf(x)
    return x


def _is_mp(x):
    return isinstance(x, mpmath.mpf)


def _sin(x):
    return mpmath.sin(x) if _is_mp(x) else math.sin(x)


def _cos(x):
    return mpmath.cos(x) if _is_mp(x) else math.cos(x)


def _atan2(y, x):
    if _is_mp(y) or _is_mp(x):
        return mpmath.atan2(y, x)
    return math.atan2(y, x)


def _sqrt(x):
    return mpmath.sqrt(x) if _is_mp(x) else math.sqrt(x)


def _pi(x):
    return +mpmath.pi if _is_mp(x) else math.pi


def _eps(x):
    return mpmath.eps if _is_mp(x) else 2.0 ** -52


def is_inf(x):
    return x == INF or x == -INF


def ext(x):
    """Normalize an extended real: ``-inf`` and ``inf`` are the same point."""
    return INF if is_inf(x) else x


# -- matrices ---------------------------------------------------------------


@dataclass(frozen=True)
class Mat2:
    a: object
    b: object
    c: object
    d: object

    @classmethod
    def rows(cls, rows):
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    @classmethod
    def columns(cls, first, second):
        return cls(first[0], second[0], first[1], second[1])

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    def to_rows(self):
        return [[self.a, self.b], [self.c, self.d]]

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def col(self, j):
        return (self.a, self.c) if j == 0 else (self.b, self.d)

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def transpose(self):
        return Mat2(self.a, self.c, self.b, self.d)

    def adjugate(self):
        return Mat2(self.d, -self.b, -self.c, self.a)

    def inverse(self):
        det = self.det()
        if det == 0:
            raise ZeroDivisionError("singular matrix")
        if det in (1, -1) and all(isinstance(e, int) for e in self.entries()):
            return self.adjugate().scaled(det)  # stays integral
        return Mat2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def scaled(self, t):
        return Mat2(t * self.a, t * self.b, t * self.c, t * self.d)

    def __matmul__(self, other):
        if isinstance(other, Mat2):
            return Mat2(
                self.a * other.a + self.b * other.c,
                self.a * other.b + self.b * other.d,
                self.c * other.a + self.d * other.c,
                self.c * other.b + self.d * other.d,
            )
        x, y = other
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def map(self, fn):
        return Mat2(fn(self.a), fn(self.b), fn(self.c), fn(self.d))

    def promoted(self):
        """Copy with entries promoted to the active scalar type."""
        return self.map(scalar)

    def as_float(self):
        return self.map(float)

    def max_abs(self):
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))

    def rescaled(self):
        """Projectively equal copy with largest entry of size one."""
        m = self.max_abs()
        return self if m == 0 else self.scaled(1 / m)

    def normalized(self):
        """Projective normal form: ``|det| = 1``, first nonzero entry positive.

        A matrix whose determinant is already within a few ulps of one is not
        rescaled, which makes the operation idempotent bit for bit.
        """
        det = self.det()
        if det == 0:
            raise ZeroDivisionError("singular matrix has no normal form")
        size = abs(det)
        m = self
        if abs(size - 1) > 8 * _eps(size):
            m = m.scaled(1 / _sqrt(size))
        for e in m.entries():
            if e != 0:
                if e < 0:
                    m = m.scaled(-1)
                break
        return m

    def projectively_close(self, other, tol=None):
        tol = settings.tol if tol is None else tol
        p, q = self.normalized(), other.normalized()
        if p.det() * q.det() < 0:
            return False
        return all(abs(x - y) <= tol * max(1.0, abs(x))
                   for x, y in zip(p.entries(), q.entries()))

    def sl2(self):
        """Determinant-one representative with nonnegative trace."""
        det = self.det()
        if det <= 0:
            raise ValueError("needs positive determinant")
        m = self.scaled(1 / _sqrt(det))
        return m.scaled(-1) if m.trace() < 0 else m

    def pole(self):
        """The point sent to infinity by the Moebius action."""
        if self.c == 0:
            return INF
        return -self.d / self.c

    def __repr__(self):
        return f"Mat2([[{self.a}, {self.b}], [{self.c}, {self.d}]])"


def moebius_apply(m, x):
    """``(a x + b) / (c x + d)`` on the extended real line."""
    if is_inf(x):
        return m.a / m.c if m.c != 0 else INF
    den = m.c * x + m.d
    if den == 0:
        return INF
    return (m.a * x + m.b) / den


def _signs_agree(entries, strict, tol):
    scale = max(abs(e) for e in entries)
    if scale == 0:
        return False
    cut = tol * scale
    for sign in (1, -1):
        if strict:
            if all(sign * e > cut for e in entries):
                return True
        elif all(sign * e >= -cut for e in entries):
            return True
    return False


def is_positive_projective(m, tol=0.0):
    """Some multiple of ``m`` has all entries >= 0."""
    return _signs_agree(m.entries(), False, tol)


def is_strictly_positive_projective(m, tol=0.0):
    """Some multiple of ``m`` has all entries > 0."""
    return _signs_agree(m.entries(), True, tol)


def distortion_bounds(m, x, t, y):
    """Bounds on ``|g(x) - g(t)| / |g(y) - g(t)|`` for ``x < t < y``.

    ``g`` is the Moebius map of ``m``.  With ``q`` the pole of ``g`` and
    ``base = |x - t| / |y - t|`` the ratio lies in
    ``(base, base (y-q)^2/(x-q)^2)`` when ``q < x`` and in
    ``(base (y-q)^2/(x-q)^2, base)`` when ``q > y``.  Affine maps have no
    finite pole and the two bounds coincide with ``base``.
    Works with any ordered field type, so ``Fraction`` inputs give exact bounds.
    """
    if not x < t < y:
        raise ValueError("need x < t < y")
    base = abs(x - t) / abs(y - t)
    if m.c == 0:
        return base, base
    pole = -m.d / m.c
    if x <= pole <= y:
        raise PoleInsideInterval(f"pole {pole} lies in [{x}, {y}]")
    factor = (y - pole) ** 2 / (x - pole) ** 2
    if pole < x:
        return base, base * factor
    return base * factor, base


# -- directions and boundary points ----------------------------------------


def wrap_direction(theta):
    pi = _pi(theta)
    r = (theta + pi / 2) % pi - pi / 2
    if r >= pi / 2:
        r -= pi
    return r


def wrap_circle(angle):
    two_pi = 2 * _pi(angle)
    r = angle % two_pi
    if r >= two_pi:
        r -= two_pi
    return r


@dataclass(frozen=True)
class Direction:
    theta: object

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_direction(self.theta))

    def unit(self):
        return (_sin(self.theta), _cos(self.theta))

    def shifted(self, delta):
        return Direction(self.theta + delta)

    def distance(self, other):
        """Angle between the two lines, in ``[0, pi/2]``."""
        diff = abs(self.theta - other.theta) % _pi(self.theta)
        return min(diff, _pi(self.theta) - diff)

    def close(self, other, tol=None):
        return self.distance(other) <= (settings.tol if tol is None else tol)


@dataclass(frozen=True)
class CirclePoint:
    angle: object

    def __post_init__(self):
        object.__setattr__(self, "angle", wrap_circle(self.angle))

    def distance(self, other):
        two_pi = 2 * _pi(self.angle)
        diff = abs(self.angle - other.angle) % two_pi
        return min(diff, two_pi - diff)

    def close(self, other, tol=None):
        return self.distance(other) <= (settings.tol if tol is None else tol)

    def ccw_offset(self, other):
        """Counterclockwise angle travelled from ``self`` to ``other``."""
        return wrap_circle(other.angle - self.angle)


def unit_vector(theta):
    if isinstance(theta, Direction):
        theta = theta.theta
    return (_sin(theta), _cos(theta))


def direction_of_vector(v):
    x, y = v
    if x == 0 and y == 0:
        raise ZeroVector("the zero vector has no direction")
    return Direction(_atan2(x, y))


def direction_to_boundary(theta):
    if isinstance(theta, Direction):
        theta = theta.theta
    return CirclePoint(_pi(theta) / 2 + 2 * theta)


def boundary_to_direction(xi):
    angle = xi.angle if isinstance(xi, CirclePoint) else xi
    return Direction((angle - _pi(angle) / 2) / 2)


def boundary_vector(xi):
    """Unit representative of the direction attached to a boundary point."""
    return boundary_to_direction(xi).unit()


def vector_to_boundary(v):
    return direction_to_boundary(direction_of_vector(v))


def boundary_action(m, xi):
    """Image of the boundary point ``xi`` under the linear action of ``m``."""
    return vector_to_boundary(m @ boundary_vector(xi))


ROTATE_QUARTER = Mat2(1, -1, 1, 1)  # sqrt(2) times the pi/4 rotation


def cayley_to_circle(x):
    """Boundary point ``C(x) = (x - i)/(x + i)`` of the extended real ``x``."""
    if is_inf(x):
        return CirclePoint(0.0)
    return CirclePoint(2 * _atan2(1, -x))


def circle_to_cayley(xi):
    half = xi.angle / 2
    s = _sin(half)
    if s == 0:
        return INF
    return -_cos(half) / s


def cayley_image(m, xi):
    """Boundary action of ``m`` as a Moebius map in the Cayley coordinate."""
    conj = ROTATE_QUARTER @ m @ ROTATE_QUARTER.adjugate()
    return cayley_to_circle(moebius_apply(conj, circle_to_cayley(xi)))


def cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def line_angle(u, v):
    """Angle between the lines spanned by ``u`` and ``v``."""
    nu = _sqrt(u[0] * u[0] + u[1] * u[1])
    nv = _sqrt(v[0] * v[0] + v[1] * v[1])
    dot = abs(u[0] * v[0] + u[1] * v[1])
    return _atan2(abs(cross(u, v)), dot) if nu and nv else 0.0
