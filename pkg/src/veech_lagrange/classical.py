"""Regular continued fractions and the classical Lagrange value.

Kept free of any import from the rest of the package so that it can serve
as an independent check.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import InsufficientDigits


@dataclass(frozen=True)
class CFDigits:
    integer_part: int
    digits: tuple
    period: tuple = ()
    terminated: bool = False

    def take(self, n):
        """First n partial quotients after the integer part."""
        out = list(self.digits[:n])
        if len(out) < n and self.period:
            i = 0
            while len(out) < n:
                out.append(self.period[i % len(self.period)])
                i += 1
        if len(out) < n:
            raise InsufficientDigits(f"only {len(out)} digits available, need {n}")
        return out

    @property
    def available(self):
        return math.inf if self.period else len(self.digits)


def _floor(x):
    if isinstance(x, mpmath.mpf):
        return int(mpmath.floor(x))
    return math.floor(x)


def cf_expand(x, n):
    """Integer part and first n partial quotients of x.

    Exact for ``int`` and ``Fraction`` input; floats and mpmath numbers are
    expanded in their own arithmetic.  A rational reached before n digits sets
    ``terminated`` instead of raising.
    """
    a0 = _floor(x)
    rest = x - a0
    digits = []
    while len(digits) < n:
        if rest == 0:
            return CFDigits(a0, tuple(digits), terminated=True)
        x = 1 / rest
        a = _floor(x)
        digits.append(a)
        rest = x - a
    return CFDigits(a0, tuple(digits))


def periodic(period, preperiod=(), integer_part=0):
    return CFDigits(integer_part, tuple(preperiod), tuple(period))


def evaluate(digits):
    """``[0; d_1, d_2, ...]`` for a finite digit list, by backward recursion."""
    value = 0.0
    for d in reversed(digits):
        value = 1.0 / (d + value)
    return value


def convergents(cf):
    p0, q0, p1, q1 = 1, 0, cf.integer_part, 1
    out = [Fraction(p1, q1)]
    for a in cf.digits:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append(Fraction(p1, q1))
    return out


def classical_lagrange(cf, depth, window=None, tail=60):
    """Largest of ``[0; a_{n-1},...,a_1] + a_n + [0; a_{n+1}, ...]`` over the window.

    Digits are numbered from 1.  The window defaults to the last quarter
    ``[depth - depth // 4, depth]`` so that the finite pasts are already
    long.  Each forward tail uses ``tail`` further digits, enough for double
    precision whenever the digits are bounded.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    lo, hi = window if window is not None else (max(1, depth - depth // 4), depth)
    if cf.available < hi + 1:
        raise InsufficientDigits(f"need at least {hi + 1} digits, have {cf.available}")
    need = hi + tail if cf.period else min(cf.available, hi + tail)
    a = [None] + cf.take(need)
    best = -math.inf
    for n in range(lo, hi + 1):
        past = evaluate(a[n - 1:0:-1]) if n > 1 else 0.0
        future = evaluate(a[n + 1:])
        best = max(best, past + a[n] + future)
    return best
