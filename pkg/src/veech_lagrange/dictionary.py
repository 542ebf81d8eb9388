"""Classical continued fraction digits of torus directions.

For the square torus the Lagrange value of a direction equals the
classical Lagrange value of its slope ``x / y``.  A word fixes the slope up
to its deepest wedge, whose two vectors are integral, so the digits the
word determines are those whose cylinder contains every slope between the
two wedge vectors.
"""

from fractions import Fraction

from .classical import CFDigits, cf_expand
from .coding import as_word, require_admissible
from .wedges import wedge_vectors

MAX_DIGITS = 10_000


def _slope(v):
    x, y = int(v[0]), int(v[1])
    return None if y == 0 else Fraction(x, y)


def common_digits(lo, hi):
    """Digits shared by every real in the open interval between lo and hi."""
    lo, hi = min(lo, hi), max(lo, hi)
    guide = cf_expand((lo + hi) / 2, MAX_DIGITS)
    a0 = guide.integer_part
    if not (a0 <= lo and hi <= a0 + 1):
        return None
    digits = []
    p0, q0, p1, q1 = 1, 0, a0, 1
    for d in guide.digits:
        p, q = d * p1 + p0, d * q1 + q0
        # the cylinder of the extended prefix runs from p/q to (p+p1)/(q+q1)
        ends = sorted((Fraction(p, q), Fraction(p + p1, q + q1)))
        if not (ends[0] <= lo and hi <= ends[1]):
            break
        digits.append(d)
        p0, q0, p1, q1 = p1, q1, p, q
    return CFDigits(a0, tuple(digits))


def digits_of_word(desc, w):
    """Partial quotients of the slope shared by every direction coded by ``w``."""
    w = as_word(w, desc)
    require_admissible(desc, w)
    wedge = wedge_vectors(desc, w)[-1]
    ends = [_slope(wedge.v_r), _slope(wedge.v_l)]
    if None in ends:
        return CFDigits(0, ())
    return common_digits(*ends) or CFDigits(0, ())
