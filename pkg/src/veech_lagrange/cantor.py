"""Cantor sets of restricted continued fractions and their hole ledgers.

Fix a letter ``alpha``, an integer ``N >= 2`` and a sign.  The restricted
words are the admissible words whose first letter is not the bar of
``alpha`` and which contain no cuspidal word of length ``N``.  Their forward
(sign ``+``) or backward (sign ``-``) values form a Cantor set ``K``.

Every word ``w`` has a node matrix ``P(w)`` and an interval
``I(w) = P(w) * [0, inf]`` running from ``P(w) * 0`` to ``P(w) * inf``.
The children ``I(w c)`` tile ``I(w)`` in an order that depends only on the
last letter of ``w``.  Whether a child is allowed depends only on the
state ``(last letter, left cusp run, right cusp run)``.  So the smallest
and largest points of ``K`` below a node come from greedy continuations
that are computed once per state.

The holes of generation ``k`` are the gaps between consecutive allowed
children of the restricted words of length ``k``.  The empty word gives the
``2d - 2`` holes of the first generation.
"""

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .cfmachine import build_context
from .coding import LEFT, RIGHT, Word, cusp_links, require_admissible
from .errors import (
    BudgetExceeded,
    ChainAdjacencyViolation,
    FirstLetterClash,
    NonConvergence,
)
from .projective import INF, Mat2, is_inf, moebius_apply

FORWARD, BACKWARD = "+", "-"
DEFAULT_HOLE_BUDGET = 3_000_000


@dataclass(frozen=True)
class CantorSpec:
    alpha: str
    N: int
    sign: str = FORWARD

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if self.sign not in (FORWARD, BACKWARD):
            raise ValueError("sign must be '+' or '-'")


def _phi(x):
    """Angle coordinate ``2 atan(x)`` on the projective line."""
    return math.pi if is_inf(x) else 2 * math.atan(x)


def _arc_gap(x, y):
    d = abs(_phi(x) - _phi(y)) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def _rescale(m):
    s = m.max_abs()
    return Mat2(m.a / s, m.b / s, m.c / s, m.d / s)


class CodingTables:
    """Step matrices, child orders and the restriction automaton for a spec."""

    def __init__(self, desc, spec):
        self.desc = desc
        self.spec = spec
        ctx = build_context(desc, spec.alpha)
        self.ctx = ctx
        self.letters = desc.letters
        self.bar_alpha = desc.bar(spec.alpha)
        if spec.sign == FORWARD:
            self.step = {l: ctx.A[l] for l in self.letters}
            self.tail = {l: ctx.forward_tail[l] for l in self.letters}
        else:
            self.step = {l: ctx.B[l] for l in self.letters}
            self.tail = {l: ctx.B[l] @ ctx.backward_tail[l] for l in self.letters}
        links = cusp_links(desc)
        self.links = {LEFT: links[LEFT], RIGHT: links[RIGHT]}
        self.root_children = sorted(
            (l for l in self.letters if l != self.bar_alpha),
            key=lambda l: moebius_apply(self.tail[l], 0.0))
        self.child_order = {l: self._order(l) for l in self.letters}
        self._check_tiling()

    def node_matrix(self, w):
        m = Mat2.identity()
        for l in w[:-1]:
            m = m @ self.step[l]
        return m @ self.tail[w[-1]]

    def interval(self, w):
        m = self.node_matrix(w)
        return moebius_apply(m, 0.0) + 0.0, moebius_apply(m, INF) + 0.0

    def _order(self, l):
        start = _phi(moebius_apply(self.tail[l], 0.0))
        kids = [c for c in self.letters if c != self.desc.bar(l)]

        def offset(c):
            p = _phi(moebius_apply(self.step[l] @ self.tail[c], 0.0))
            off = (p - start) % (2 * math.pi)
            return 0.0 if off > 2 * math.pi - 1e-12 else off

        return tuple(sorted(kids, key=offset))

    def _check_tiling(self):
        eps = 1e-9
        for l in self.letters:
            parent = self.interval((l,))
            kids = [self.interval((l, c)) for c in self.child_order[l]]
            ok = _arc_gap(kids[0][0], parent[0]) < eps and _arc_gap(kids[-1][1], parent[1]) < eps
            ok = ok and all(_arc_gap(a[1], b[0]) < eps for a, b in zip(kids, kids[1:]))
            if not ok:
                raise ValueError(f"children of {l} do not tile its interval")

    def advance(self, state, c):
        """State after appending ``c``, or None when that creates a forbidden factor."""
        last, lrun, rrun = state
        if last is None:
            return None if c == self.bar_alpha else (c, 1, 1)
        if c == self.desc.bar(last):
            return None
        lrun = lrun + 1 if (last, c) in self.links[LEFT] else 1
        rrun = rrun + 1 if (last, c) in self.links[RIGHT] else 1
        if lrun >= self.spec.N or rrun >= self.spec.N:
            return None
        return (c, lrun, rrun)

    def children(self, state):
        order = self.root_children if state[0] is None else self.child_order[state[0]]
        return [(c, self.advance(state, c)) for c in order]

    def greedy(self, state, which):
        """Letters of the extremal restricted continuation from ``state``."""
        while True:
            kids = [(c, s) for c, s in self.children(state) if s is not None]
            c, state = kids[0] if which == "min" else kids[-1]
            yield c, state

    @lru_cache(maxsize=None)
    def extreme(self, state, which, tol=1e-15, max_letters=20000):
        """Value of the extremal continuation from ``state`` as a standalone word."""
        prefix = Mat2.identity()
        for n, (c, _) in enumerate(self.greedy(state, which)):
            node = prefix @ self.tail[c]
            lo, hi = moebius_apply(node, 0.0), moebius_apply(node, INF)
            if _arc_gap(lo, hi) < tol:
                return hi + 0.0
            if n >= max_letters:
                raise NonConvergence(f"greedy {which} from {state} did not converge")
            prefix = _rescale(prefix @ self.step[c])

    def subtree_extreme(self, matrix, state, which):
        """Extreme of K below a node with step product ``matrix`` and ``state``."""
        return moebius_apply(matrix, self.extreme(state, which)) + 0.0


def restricted_words(desc, spec, length):
    """All restricted words of the given length, in tree order."""
    if length < 1:
        raise ValueError("length must be >= 1")
    tables = tables_for(desc, spec)

    def walk(prefix, state):
        if len(prefix) == length:
            yield Word(prefix)
            return
        for c, s in tables.children(state):
            if s is not None:
                yield from walk(prefix + [c], s)

    yield from walk([], (None, 0, 0))


@lru_cache(maxsize=128)
def tables_for(desc, spec):
    return CodingTables(desc, spec)


def interval_of_word(desc, spec, w):
    w = tuple(w)
    if not w:
        return 0.0, INF
    if w[0] == desc.bar(spec.alpha):
        raise FirstLetterClash(f"first letter {w[0]} is the bar of {spec.alpha}")
    require_admissible(desc, w)
    return tables_for(desc, spec).interval(w)


# -- accumulation points ----------------------------------------------------


@dataclass
class Chain:
    intervals: list
    limit: float
    letters: Word


def _chain(tables, first, which, tol, max_steps=20000):
    """Deleted intervals met by the greedy descent from the one-letter word ``first``.

    Going right from the start of ``I(first)`` (``which="min"``) the forbidden
    children skipped by the descent are deleted intervals.  Consecutive ones
    share an endpoint, and their right ends converge to the smallest point of
    ``K`` in ``I(first)``.  ``which="max"`` walks leftwards from the end.
    """
    state = tables.advance((None, 0, 0), first)
    if state is None:
        raise ValueError(f"{first} cannot start a restricted word")
    matrix = tables.step[first]
    word = [first]
    chain = []
    for _ in range(max_steps):
        kids = tables.children(state)
        if which == "max":
            kids = kids[::-1]
        for c, s in kids:
            node = matrix @ tables.tail[c]
            lo, hi = moebius_apply(node, 0.0) + 0.0, moebius_apply(node, INF) + 0.0
            if s is None:
                chain.append((lo, hi))
                continue
            state, word = s, word + [c]
            matrix = _rescale(matrix @ tables.step[c])
            break
        if _arc_gap(lo, hi) < tol:
            limit = lo if which == "min" else hi
            return Chain(chain if which == "min" else chain[::-1], limit, Word(word))
    raise NonConvergence(f"chain from {first} did not reach width {tol}")


def _verify_chain(chain, anchor, which, tol):
    pieces = chain.intervals
    if not pieces:
        return
    if which == "min":
        ends = [anchor] + [p for iv in pieces for p in iv] + [chain.limit]
    else:
        ends = [chain.limit] + [p for iv in pieces for p in iv] + [anchor]
    for a, b in zip(ends[0::2], ends[1::2]):
        if _arc_gap(a, b) > tol:
            raise ChainAdjacencyViolation(f"chained intervals leave a gap between {a} and {b}")


@dataclass
class AccumulationTable:
    x: list
    lam: list
    rho: list
    l: list
    r: list
    chains: dict

    @property
    def m(self):
        return self.r[0]

    @property
    def M(self):
        return self.l[-1]


def accumulation_points(desc, spec, tol=1e-13):
    """Endpoints ``x_i``, neighbour letters and the accumulation points ``l_i, r_i``.

    ``x_0 = 0 < x_1 < ... < x_{2d-1} = inf`` are the endpoints of the
    one-letter intervals; ``lam[i]`` ends at ``x_i`` and ``rho[i]`` starts
    there (the bar of ``alpha`` on the outer sides).  ``l_i < x_i < r_i`` are
    the nearest points of ``K``-type sets on either side, limits of chains of
    adjacent deleted intervals.
    """
    tables = tables_for(desc, spec)
    kids = list(tables.root_children)
    bounds = [tables.interval((c,)) for c in kids]
    x = [0.0] + [b[1] for b in bounds[:-1]] + [INF]
    lam = [tables.bar_alpha] + kids
    rho = kids + [tables.bar_alpha]
    l, r, chains = [], [], {}
    for i in range(len(x)):
        if lam[i] == tables.bar_alpha:
            l.append(tables.subtree_extreme(tables.step[lam[i]], (lam[i], 1, 1), "max"))
        else:
            ch = _chain(tables, lam[i], "max", tol)
            _verify_chain(ch, x[i], "max", 1e-9)
            chains[("l", i)] = ch
            l.append(ch.limit)
        if rho[i] == tables.bar_alpha:
            r.append(tables.subtree_extreme(tables.step[rho[i]], (rho[i], 1, 1), "min"))
        else:
            ch = _chain(tables, rho[i], "min", tol)
            _verify_chain(ch, x[i], "min", 1e-9)
            chains[("r", i)] = ch
            r.append(ch.limit)
    return AccumulationTable(x, lam, rho, l, r, chains)


# -- hole ledger --------------------------------------------------------------


@dataclass
class CantorApprox:
    """Hole ledger of a Cantor set, optionally restricted to one subtree.

    ``root_word`` is empty for the whole set.  A ledger grown below a node
    carries that node's word, and its holes have generations from
    ``len(root_word)`` on.
    """

    spec: CantorSpec
    depth: int
    table: AccumulationTable
    left: np.ndarray
    right: np.ndarray
    generation: np.ndarray
    node_index: np.ndarray
    between: list
    parents: dict = field(repr=False)
    tol: float = 1e-13
    mu: float = None
    root_word: Word = Word(())
    desc: object = field(default=None, repr=False)
    order: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.order is None:
            self.order = np.argsort(self.left, kind="stable")
        self._sorted_left = self.left[self.order]
        self._sorted_right = self.right[self.order]

    @property
    def m(self):
        return self.table.m

    @property
    def M(self):
        return self.table.M

    @property
    def size(self):
        return self.M - self.m

    @property
    def lengths(self):
        return self.right - self.left

    def __len__(self):
        return len(self.left)

    def node_word(self, level, index):
        letters = []
        base = len(self.root_word)
        while level > base:
            parent, letter = self.parents[level]
            letters.append(letter[index])
            index = parent[index]
            level -= 1
        return Word(tuple(self.root_word) + tuple(letters[::-1]))

    def defining_word(self, h):
        prefix = self.node_word(int(self.generation[h]), int(self.node_index[h]))
        c1, c2 = self.between[h]
        return f"{prefix};{c1}|{c2}"

    def holes(self, generation=None):
        if generation is None:
            idx = self.order
        else:
            idx = [h for h in self.order if self.generation[h] == generation]
        return [(float(self.left[h]), float(self.right[h]), int(self.generation[h]),
                 self.defining_word(h)) for h in idx]

    def hole_containing(self, x):
        """Index of the recorded hole with x strictly inside, or None."""
        i = int(np.searchsorted(self._sorted_left, x, side="left")) - 1
        if i >= 0 and self._sorted_right[i] > x:
            return int(self.order[i])
        return None

    def in_hole(self, x):
        return self.hole_containing(x) is not None

    def largest_hole_in(self, lo, hi):
        """Largest recorded hole inside ``[lo, hi]``; ties go to the leftmost."""
        i = int(np.searchsorted(self._sorted_left, lo, side="left"))
        j = int(np.searchsorted(self._sorted_left, hi, side="left"))
        while j > i and self._sorted_right[j - 1] > hi:
            j -= 1
        if j <= i:
            return None
        lengths = self._sorted_right[i:j] - self._sorted_left[i:j]
        return int(self.order[i + int(np.argmax(lengths))])

    def to_csv(self):
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["generation", "left", "right", "length", "defining_word"])
        for h in self.order:
            out.writerow([int(self.generation[h]), repr(float(self.left[h])),
                          repr(float(self.right[h])),
                          repr(float(self.right[h] - self.left[h])), self.defining_word(h)])
        return buf.getvalue()


def read_hole_csv(text):
    """Parse a ledger exported by ``CantorApprox.to_csv``."""
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        prefix, pair = row["defining_word"].split(";")
        c1, c2 = pair.split("|")
        rows.append({"generation": int(row["generation"]), "left": float(row["left"]),
                     "right": float(row["right"]), "length": float(row["length"]),
                     "word": Word.parse(prefix) if prefix else Word(()), "between": (c1, c2)})
    return rows


def _apply_many(mats, value):
    """Moebius action of a stack of matrices on one extended real."""
    if is_inf(value):
        return mats[:, 0, 0] / mats[:, 1, 0]
    return (mats[:, 0, 0] * value + mats[:, 0, 1]) / (mats[:, 1, 0] * value + mats[:, 1, 1])


def _np(m):
    return np.array(m.as_float().to_rows(), dtype=float)


def _grow(tables, mats, states, first, last, budget):
    """Holes of generations ``first .. last-1`` below nodes of length ``first``.

    Nodes are processed a level at a time and grouped by automaton state so
    that the matrix work is vectorised.
    """
    step = {l: _np(tables.step[l]) for l in tables.letters}
    lefts, rights, gens, indices, between = [], [], [], [], []
    parents = {}
    total = 0
    for gen in range(first, last):
        groups = {}
        for i, s in enumerate(states):
            groups.setdefault(s, []).append(i)
        next_mats, next_states, next_parent, next_letter = [], [], [], []
        for state, members in groups.items():
            members = np.array(members)
            block = mats[members]
            allowed = [(c, s) for c, s in tables.children(state) if s is not None]
            for (c1, s1), (c2, s2) in zip(allowed, allowed[1:]):
                lefts.append(_apply_many(block @ step[c1], tables.extreme(s1, "max")))
                rights.append(_apply_many(block @ step[c2], tables.extreme(s2, "min")))
                gens.append(np.full(len(members), gen))
                indices.append(members)
                between.extend([(c1, c2)] * len(members))
                total += len(members)
            if gen < last - 1:
                for c, s in allowed:
                    child = block @ step[c]
                    child /= np.abs(child).max(axis=(1, 2), keepdims=True)
                    next_mats.append(child)
                    next_states.extend([s] * len(members))
                    next_parent.append(members)
                    next_letter.extend([c] * len(members))
        if total > budget:
            raise BudgetExceeded(f"{total} holes exceed the budget {budget}")
        if gen < last - 1:
            mats = np.concatenate(next_mats)
            states = next_states
            parents[gen + 1] = (np.concatenate(next_parent), np.array(next_letter, dtype=object))
    return lefts, rights, gens, indices, between, parents


def _pack(desc, spec, depth, table, tol, mu, root_word, parts):
    lefts, rights, gens, indices, between, parents = parts
    cat = lambda xs, dt: np.concatenate(xs) if xs else np.zeros(0, dtype=dt)
    return CantorApprox(spec, depth, table, cat(lefts, float), cat(rights, float),
                        cat(gens, np.int64), cat(indices, np.int64), between, parents,
                        tol, mu, Word(tuple(root_word)), desc)


def build_approximation(desc, spec, depth, tol=1e-13, budget=DEFAULT_HOLE_BUDGET):
    """Holes of generations ``0 .. depth-1`` with their defining words."""
    tables = tables_for(desc, spec)
    table = accumulation_points(desc, spec, tol)
    parts = _grow(tables, np.array([np.eye(2)]), [(None, 0, 0)], 0, depth, budget)
    return _pack(desc, spec, depth, table, tol, tables.ctx.mu, (), parts)


def node_state(tables, word):
    """Step product and automaton state of a restricted word."""
    matrix = Mat2.identity()
    state = (None, 0, 0)
    for c in word:
        state = tables.advance(state, c)
        if state is None:
            raise ValueError(f"{word} is not a restricted word")
        matrix = _rescale(matrix @ tables.step[c])
    return matrix, state


def node_hull(tables, word):
    """Smallest interval containing the part of the Cantor set below ``word``."""
    matrix, state = node_state(tables, word)
    if state[0] is None:
        lo = min(tables.subtree_extreme(tables.step[c], (c, 1, 1), "min") for c in tables.root_children)
        hi = max(tables.subtree_extreme(tables.step[c], (c, 1, 1), "max") for c in tables.root_children)
        return lo, hi
    return (tables.subtree_extreme(matrix, state, "min"),
            tables.subtree_extreme(matrix, state, "max"))


def subtree_approximation(approx, word, generations, budget=DEFAULT_HOLE_BUDGET):
    """Ledger of the holes below ``word`` for ``generations`` further generations."""
    desc = approx.desc
    tables = tables_for(desc, approx.spec)
    matrix, state = node_state(tables, word)
    first = len(word)
    parts = _grow(tables, np.array([_np(matrix)]), [state], first, first + generations, budget)
    return _pack(desc, approx.spec, first + generations, approx.table, approx.tol, approx.mu, word, parts)


def descend(desc, spec, x, length):
    """A restricted word of the given length whose hulls follow the point ``x``.

    At each step the child whose hull contains ``x`` is taken, or the nearest
    one when ``x`` sits in a gap.  Once the hulls are narrower than double
    precision can separate, the smallest continuation is used.
    """
    tables = tables_for(desc, spec)
    matrix = Mat2.identity()
    state = (None, 0, 0)
    word = []
    for _ in range(length):
        best = None
        for c, s in tables.children(state):
            if s is None:
                continue
            m = matrix @ tables.step[c]
            a, b = tables.subtree_extreme(m, s, "min"), tables.subtree_extreme(m, s, "max")
            dist = 0.0 if a <= x <= b else min(abs(x - a), abs(x - b))
            if best is None or dist < best[0]:
                best = (dist, c, s, m)
        _, c, state, matrix = best
        matrix = _rescale(matrix)
        word.append(c)
    return Word(word)


# -- gap and size conditions ------------------------------------------------


@dataclass
class GapReport:
    passed: bool
    worst_margin: float
    worst_hole: int
    flank_left: np.ndarray = field(repr=False, default=None)
    flank_right: np.ndarray = field(repr=False, default=None)
    removal_order: np.ndarray = field(repr=False, default=None)

    def as_dict(self):
        return {"passed": self.passed, "worst_margin": self.worst_margin}


def removal_order(approx):
    """Holes sorted by decreasing length, ties broken by position."""
    return np.lexsort((approx.left, -approx.lengths))


def _nearest_earlier(pos_order, rank):
    """For each position, the nearest position on its left removed earlier."""
    out = np.full(len(pos_order), -1)
    stack = []
    for i, h in enumerate(pos_order):
        while stack and rank[stack[-1]] > rank[h]:
            stack.pop()
        out[i] = stack[-1] if stack else -1
        stack.append(h)
    return out


def flanks(approx):
    """Lengths of the two intervals next to each hole at its removal step."""
    order = removal_order(approx)
    rank = np.empty(len(order), dtype=np.int64)
    rank[order] = np.arange(len(order))
    pos = approx.order
    left_nb = _nearest_earlier(pos, rank)
    right_nb = _nearest_earlier(pos[::-1], rank)[::-1]
    fl = np.empty(len(pos))
    fr = np.empty(len(pos))
    for i, h in enumerate(pos):
        a = approx.right[left_nb[i]] if left_nb[i] >= 0 else approx.m
        b = approx.left[right_nb[i]] if right_nb[i] >= 0 else approx.M
        fl[h] = approx.left[h] - a
        fr[h] = b - approx.right[h]
    return fl, fr, order


def check_gap_condition(approx):
    """Both flanks strictly longer than the hole, for every recorded hole.

    The margin of a hole is ``min(flanks) / length``; the condition holds
    when every margin exceeds one.
    """
    if len(approx) == 0:
        return GapReport(True, math.inf, -1)
    fl, fr, order = flanks(approx)
    margin = np.minimum(fl, fr) / approx.lengths
    worst = int(np.argmin(margin))
    return GapReport(bool(margin[worst] > 1), float(margin[worst]), worst, fl, fr, order)


@dataclass
class SizeReport:
    passed: bool
    margin: float
    size_plus: float
    size_minus: float
    largest_hole_plus: float
    largest_hole_minus: float

    def as_dict(self):
        return dict(self.__dict__)


def check_size_condition(a1, a2):
    """Each set's total length exceeds every hole of the other."""
    h1 = float(a1.lengths.max()) if len(a1) else 0.0
    h2 = float(a2.lengths.max()) if len(a2) else 0.0
    margin = min(a1.size / h2 if h2 else math.inf, a2.size / h1 if h1 else math.inf)
    return SizeReport(margin > 1, margin, a1.size, a2.size, h1, h2)


def hole_overlaps(approx):
    """Number of consecutive hole pairs (by position) that overlap."""
    pos = approx.order
    return int(np.sum(approx.right[pos[:-1]] > approx.left[pos[1:]]))


@dataclass
class ScanRow:
    N: int
    holes_plus: int
    holes_minus: int
    gap_plus: float
    gap_minus: float
    size: float
    interval_sum: float
    passed: bool

    def as_dict(self):
        return dict(self.__dict__)


def cantor_pair(desc, alpha, N, depth, tol=1e-13, budget=DEFAULT_HOLE_BUDGET):
    return (build_approximation(desc, CantorSpec(alpha, N, FORWARD), depth, tol, budget),
            build_approximation(desc, CantorSpec(alpha, N, BACKWARD), depth, tol, budget))


def scan_row(a_plus, a_minus):
    g1, g2 = check_gap_condition(a_plus), check_gap_condition(a_minus)
    size = check_size_condition(a_plus, a_minus)
    total = (a_plus.M + a_minus.M) - (a_plus.m + a_minus.m)
    return ScanRow(a_plus.spec.N, len(a_plus), len(a_minus), g1.worst_margin,
                   g2.worst_margin, size.margin, total,
                   g1.passed and g2.passed and size.passed)


def gap_scan(desc, alpha, Ns, depth, tol=1e-13, budget=DEFAULT_HOLE_BUDGET):
    """Gap and size reports for each N in ``Ns``."""
    return [scan_row(*cantor_pair(desc, alpha, N, depth, tol, budget)) for N in Ns]


def smallest_passing(rows):
    for row in rows:
        if row.passed:
            return row.N
    return None


def holes_of_generation(approx, k):
    """Holes of generation ``k`` as ``(left, right, defining_word)``."""
    if not 0 <= k < approx.depth:
        raise ValueError(f"generation {k} is not recorded (depth {approx.depth})")
    return [(lo, hi, word) for lo, hi, _, word in approx.holes(k)]


def context_free_holes(desc, spec, k, table=None):
    """Images ``(P * l_i, P * r_i)`` of the first-generation gaps.

    ``P`` runs over the step products of the restricted words of length
    ``k`` and ``i`` over the indices with ``lam[i]`` and ``rho[i]`` not the
    bar of the last letter.  These ignore cusp runs that continue across the
    end of the prefix; ``holes_of_generation`` accounts for them.
    """
    tables = tables_for(desc, spec)
    table = table or accumulation_points(desc, spec)
    if k == 0:
        return [(table.l[i], table.r[i]) for i in range(1, len(table.x) - 1)]
    out = []
    for w in restricted_words(desc, spec, k):
        P, _ = node_state(tables, w)
        bad = desc.bar(w[-1])
        for i in range(len(table.x)):
            if table.lam[i] == bad or table.rho[i] == bad:
                continue
            out.append((moebius_apply(P, table.l[i]) + 0.0, moebius_apply(P, table.r[i]) + 0.0))
    return out


@dataclass
class SlowSubdivision:
    """The holes removed one at a time, longest first.

    Removing hole ``B`` from the interval ``J`` containing it leaves
    ``K^L`` and ``K^R`` on either side.
    """

    approx: CantorApprox
    order: np.ndarray
    flank_left: np.ndarray
    flank_right: np.ndarray

    @classmethod
    def of(cls, approx):
        fl, fr, order = flanks(approx)
        return cls(approx, order, fl, fr)

    def __len__(self):
        return len(self.order)

    def step(self, n):
        """``(K^L, B, K^R)`` for the n-th removal."""
        h = self.order[n]
        lo, hi = float(self.approx.left[h]), float(self.approx.right[h])
        return ((lo - float(self.flank_left[h]), lo), (lo, hi), (hi, hi + float(self.flank_right[h])))

    def level(self, n):
        """Closed intervals left after the first ``n`` removals."""
        cuts = sorted((float(self.approx.left[h]), float(self.approx.right[h]))
                      for h in self.order[:n])
        out, start = [], self.approx.m
        for lo, hi in cuts:
            out.append((start, lo))
            start = hi
        out.append((start, self.approx.M))
        return out

    def lengths_nonincreasing(self):
        lengths = self.approx.lengths[self.order]
        return bool(np.all(np.diff(lengths) <= 0))
