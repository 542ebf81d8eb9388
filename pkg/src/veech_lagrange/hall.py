"""Sum decomposition of two Cantor sets and directions with a prescribed value.

``hall_decompose`` writes a number ``x`` in ``[m+ + m-, M+ + M-]`` as
``k + f`` with ``k`` and ``f`` in the two Cantor sets.  It runs the slow
subdivision: the current hulls are cut at their largest remaining hole,
always on the side whose hole is bigger, keeping the half whose sum with
the other hull still contains ``x``.  When the recorded ledger has no hole
left inside a hull, the ledger is grown below the node carrying that hull.

``hall_direction_word`` turns such a decomposition into a word whose
Lagrange value is a given ``L``: blocks that surround ``K`` parabolic
excursions with longer and longer pieces of the two words.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .cantor import (
    DEFAULT_HOLE_BUDGET,
    cantor_pair,
    descend,
    subtree_approximation,
)
from .cfmachine import build_context
from .coding import LEFT, RIGHT, Word, cusp_links, is_admissible, parabolic_word
from .errors import BelowRay, IterationBudget, OutOfRange
from .surface import constants_table
from .wedges import wedge_sequence

GROW_STEP = 4


@dataclass
class Hull:
    """Current closed interval of one Cantor set during the decomposition."""

    approx: object
    lo: float
    hi: float
    ledger: object = None

    def __post_init__(self):
        if self.ledger is None:
            self.ledger = self.approx

    @property
    def length(self):
        return self.hi - self.lo

    def next_hole(self, grow_limit=40):
        """Largest hole inside the hull, growing the ledger when it runs dry."""
        for _ in range(grow_limit):
            h = self.ledger.largest_hole_in(self.lo, self.hi)
            if h is not None:
                return float(self.ledger.left[h]), float(self.ledger.right[h])
            if self.length <= 0:
                return None
            node = descend(self.approx.desc, self.approx.spec, 0.5 * (self.lo + self.hi),
                           self.ledger.depth)
            self.ledger = subtree_approximation(self.approx, node, GROW_STEP)
        return None


@dataclass
class SplitStep:
    sign: str
    before: tuple
    hole: tuple
    other: tuple
    kept: str

    def union_is_interval(self):
        """Endpoint check that the two halves still add up to the whole sum."""
        lo, hi = self.before
        blo, bhi = self.hole
        olo, ohi = self.other
        return blo + ohi >= bhi + olo and lo <= blo <= bhi <= hi


@dataclass
class Decomposition:
    x: float
    k: float
    f: float
    residual: float
    word_plus: Word
    word_minus: Word
    iterations: int
    hull_plus: tuple
    hull_minus: tuple
    steps: list = field(default_factory=list, repr=False)

    def as_dict(self):
        return {"x": self.x, "k": self.k, "f": self.f, "residual": self.residual,
                "word_plus": str(self.word_plus), "word_minus": str(self.word_minus),
                "iterations": self.iterations,
                "hull_plus": list(self.hull_plus), "hull_minus": list(self.hull_minus)}


def hall_decompose(a_plus, a_minus, x, max_iter=60, tol=1e-8, word_length=None):
    """Split ``x`` into a point of each Cantor set.

    Stops once the midpoints of the two hulls are within ``tol`` of ``x`` for
    certain, i.e. the half-sum of the hull lengths is at most ``tol``.  The
    returned ``k`` and ``f`` are those midpoints.
    """
    lo_sum, hi_sum = a_plus.m + a_minus.m, a_plus.M + a_minus.M
    slack = 1e-12 * max(1.0, abs(x))
    if not lo_sum - slack <= x <= hi_sum + slack:
        raise OutOfRange(f"{x} is outside [{lo_sum}, {hi_sum}]")
    hulls = {"+": Hull(a_plus, a_plus.m, a_plus.M), "-": Hull(a_minus, a_minus.m, a_minus.M)}
    steps = []
    it = 0
    while 0.5 * (hulls["+"].length + hulls["-"].length) > tol:
        if it >= max_iter:
            raise IterationBudget(f"no convergence to {tol} within {max_iter} splits")
        holes = {s: h.next_hole() for s, h in hulls.items()}
        sizes = {s: (b[1] - b[0]) if b else -1.0 for s, b in holes.items()}
        sign = "+" if sizes["+"] >= sizes["-"] else "-"
        if sizes[sign] < 0:
            break
        cur, other = hulls[sign], hulls["-" if sign == "+" else "+"]
        blo, bhi = holes[sign]
        before = (cur.lo, cur.hi)
        if cur.lo + other.lo - slack <= x <= blo + other.hi + slack:
            kept, cur.hi = "L", blo
        elif bhi + other.lo - slack <= x <= cur.hi + other.hi + slack:
            kept, cur.lo = "R", bhi
        else:
            raise OutOfRange(f"{x} falls between the halves at split {it}; gap or size condition fails")
        steps.append(SplitStep(sign, before, (blo, bhi), (other.lo, other.hi), kept))
        it += 1
    kp, km = hulls["+"], hulls["-"]
    k = 0.5 * (kp.lo + kp.hi)
    f = 0.5 * (km.lo + km.hi)
    length = word_length or max(kp.ledger.depth, km.ledger.depth)
    return Decomposition(x, k, f, k + f - x,
                         descend(a_plus.desc, a_plus.spec, k, length),
                         descend(a_minus.desc, a_minus.spec, f, length),
                         it, (kp.lo, kp.hi), (km.lo, km.hi), steps)


# -- Hall ray directions -------------------------------------------------------


@dataclass
class HallConstruction:
    L: float
    alpha: str
    N: int
    K: int
    l: float
    mu: float
    det_W: float
    r: float
    c: float
    c_flag: str
    decomposition: Decomposition
    deltas: list
    prefix: Word
    planted: Word
    passages: list
    block_starts: list
    planted_starts: list

    def as_dict(self):
        return {
            "L": self.L, "alpha": self.alpha, "N": self.N, "K": self.K, "l": self.l,
            "mu": self.mu, "det_W_alpha": self.det_W, "r": self.r,
            "c": self.c, "c_flag": self.c_flag,
            "words": {"plus": str(self.decomposition.word_plus),
                      "minus": str(self.decomposition.word_minus)},
            "k": self.decomposition.k, "f": self.decomposition.f,
            "residual": self.decomposition.residual,
            "deltas": [list(d) for d in self.deltas],
            "passages": list(self.passages),
            "prefix_length": len(self.prefix),
            "prefix": str(self.prefix),
        }

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


def _linked(desc, x, y):
    links = cusp_links(desc)
    return (x, y) in links[LEFT] or (x, y) in links[RIGHT]


def interpolation_letters(desc, left, right, N):
    """First pair ``(delta, delta')`` in alphabet order joining two blocks.

    ``left`` ends with ``a_j`` and ``right`` starts with ``b_{j+1}``.  Pairs
    with ``a_j delta`` and ``delta' b_{j+1}`` both non-cuspidal are preferred.
    When no such pair exists the first pair is taken that keeps the junction
    free of backtracking and of cuspidal factors of length ``N``.
    """
    a_j, b_next = left[-1], right[0]
    pairs = [(x, y) for x in desc.letters for y in desc.letters
             if x != desc.bar(a_j) and y != desc.bar(x) and y != desc.bar(b_next)]
    for x, y in pairs:
        if not _linked(desc, a_j, x) and not _linked(desc, y, b_next):
            return x, y
    for x, y in pairs:
        window = tuple(left[-N:]) + (x, y) + tuple(right[:N])
        if not long_cuspidal_runs(desc, window, N):
            return x, y
    raise ValueError(f"no interpolation letters between {a_j} and {b_next}")


def choose_K(target, lo_sum, hi_sum, mu):
    """Largest K >= 0 with ``target - K mu`` in ``[lo_sum, hi_sum]``, or None."""
    K = math.floor((target - lo_sum) / mu)
    if K < 0 or target - K * mu > hi_sum:
        return None
    return K


def _block_count(prefix_len, planted_len):
    total, j = 0, 0
    while total < prefix_len:
        total += 2 * (j + 1) + planted_len + 2
        j += 1
    return j


def hall_direction_word(desc, alpha, L, prefix_len, N=4, depth=10, consts=None,
                        pair=None, budget=DEFAULT_HOLE_BUDGET, tol=1e-8, max_iter=60):
    """Word of length ``prefix_len`` coding a direction with Lagrange value ``L``."""
    if consts is None:
        consts = constants_table(desc, N + 1)
    r = consts.hall_r(N)
    if L < r:
        raise BelowRay(f"L = {L} is below the ray threshold r = {r}")
    a_plus, a_minus = pair if pair is not None else cantor_pair(desc, alpha, N, depth, budget=budget)
    ctx = build_context(desc, alpha)
    lo_sum, hi_sum = a_plus.m + a_minus.m, a_plus.M + a_minus.M
    target = ctx.det_W_alpha * L
    K = choose_K(target, lo_sum, hi_sum, ctx.mu)
    if K is None:
        raise BelowRay(f"no K puts {target} - K*{ctx.mu} into [{lo_sum}, {hi_sum}]")
    l = target - K * ctx.mu

    period, _ = parabolic_word(desc, alpha, RIGHT)
    planted = Word(tuple(period) * K + (alpha,))
    blocks = _block_count(prefix_len, len(planted))
    dec = hall_decompose(a_plus, a_minus, l, max_iter=max_iter, tol=tol,
                         word_length=blocks + 1)
    a, b = dec.word_plus, dec.word_minus

    letters, deltas, passages, starts, planted_at = [], [], [], [], []
    for j in range(blocks):
        starts.append(len(letters))
        letters.extend(reversed(b[:j + 1]))
        passage = len(letters)
        planted_at.append(passage)
        letters.extend(planted)
        letters.extend(a[:j + 1])
        if len(letters) <= prefix_len:
            passages.append(passage)
        delta = interpolation_letters(desc, a[:j + 1], b[j + 1::-1], N)
        deltas.append(delta)
        letters.extend(delta)
    prefix = Word(tuple(letters[:prefix_len]))
    if not is_admissible(desc, prefix):
        raise AssertionError("constructed prefix backtracks")
    return HallConstruction(L, alpha, N, K, l, ctx.mu, ctx.det_W_alpha, r,
                            consts.c, consts.c_flag, dec, deltas, prefix, planted,
                            passages, starts, [p for p in planted_at if p < prefix_len])


def long_cuspidal_runs(desc, w, N):
    """Maximal cuspidal factors of length at least N, as ``(start, end, side)``."""
    links = cusp_links(desc)
    runs = []
    for side in (LEFT, RIGHT):
        start = 0
        for i in range(1, len(w) + 1):
            if i < len(w) and (w[i - 1], w[i]) in links[side]:
                continue
            if i - start >= N:
                runs.append((start, i, side))
            start = i
    return sorted(runs)


@dataclass
class HallReport:
    L: float
    passage_values: list
    last_errors: list
    max_relative_error: float
    off_max: float
    off_ratio: float
    off_argmax: int
    stray_runs: list
    c_flag: str
    passed_passages: bool
    passed_off: bool

    def as_dict(self):
        return dict(self.__dict__)


def verify_hall_direction(desc, hc, depth=None, last=10, slack=0.05, rel=0.02, guard=50):
    """Wedge values along the constructed prefix.

    The passage values are ``1/area`` of ``v_r`` at the first planted letter
    of each block.  Every other index counts as off the subsequence; the last
    ``guard`` indices are skipped because the future there is truncated.
    """
    w = hc.prefix if depth is None else hc.prefix[:depth]
    seq = wedge_sequence(desc, w, keep_vectors=False)
    inv_r = 1.0 / np.asarray(seq.area_r, dtype=float)
    inv_l = 1.0 / np.asarray(seq.area_l, dtype=float)
    usable = len(w) - guard
    passages = [p for p in hc.passages if p < usable]
    values = [float(inv_r[p]) for p in passages]
    tail = values[-last:]
    errors = [abs(v - hc.L) / hc.L for v in tail]
    off = np.maximum(inv_r, inv_l)[:usable].copy()
    off[passages] = -np.inf
    arg = int(np.argmax(off))
    off_max = float(off[arg])

    planted = {(p, p + len(hc.planted)) for p in hc.planted_starts}
    # runs touching a planted part may spill over its seams; only the ones
    # away from every planted part break the construction
    stray = [run for run in long_cuspidal_runs(desc, w, hc.N)
             if not any(run[0] < e and s < run[1] for s, e in planted)]
    return HallReport(hc.L, values, errors, max(errors) if errors else math.inf,
                      off_max, off_max / hc.L, arg, stray, hc.c_flag,
                      len(tail) == last and max(errors) < rel,
                      off_max <= (1 + slack) * hc.L)
