"""Surface descriptors, their validation, and the derived constants.

A descriptor lists, for every letter of the alphabet, the side-pairing
generator and the wedge ``(v_r, v_l)`` of saddle connection vectors.  Each
wedge is a positively oriented cone, so ``v_r`` is the clockwise side.  The
boundary arc of a letter runs counterclockwise from the point of ``v_l`` to
the point of ``v_r``.
"""

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BudgetExceeded, DescriptorParseError, MissingConstants
from .projective import (
    CirclePoint,
    Mat2,
    boundary_action,
    cross,
    line_angle,
    settings,
    vector_to_boundary,
)

BAR_SUFFIX = "_bar"
DEFAULT_BUDGET = 2_000_000


@dataclass(frozen=True, eq=False)
class SurfaceDescriptor:
    name: str
    letters: tuple
    bars: dict
    generators: dict
    wedges: dict
    vertices: dict
    veech_constant_c: object = None
    notes: str = ""

    @property
    def d(self):
        return len(self.letters) // 2

    @property
    def base_letters(self):
        return self.letters[: self.d]

    def bar(self, letter):
        return self.bars[letter]

    def G(self, letter):
        return self.generators[letter]

    def W(self, letter):
        v_r, v_l = self.wedges[letter]
        return Mat2.columns(v_r, v_l)

    def v_r(self, letter):
        return self.wedges[letter][0]

    def v_l(self, letter):
        return self.wedges[letter][1]

    def index(self, letter):
        return self.letters.index(letter)

    def with_changes(self, **changes):
        return replace(self, **changes)


def _derive_vertices(wedges):
    return {
        letter: (vector_to_boundary(v_l), vector_to_boundary(v_r))
        for letter, (v_r, v_l) in wedges.items()
    }


def make_descriptor(name, base_letters, generators, wedges, vertices=None,
                    veech_constant_c=None, notes=""):
    """Materialize bars from base-letter generators and build a descriptor."""
    bars = {}
    gens = {}
    for letter in base_letters:
        bar = letter + BAR_SUFFIX
        bars[letter], bars[bar] = bar, letter
        g = generators[letter]
        gens[letter] = g
        gens[bar] = g.inverse()
    letters = tuple(base_letters) + tuple(l + BAR_SUFFIX for l in base_letters)
    wedges = {l: (tuple(wedges[l][0]), tuple(wedges[l][1])) for l in letters}
    if vertices is None:
        vertices = _derive_vertices(wedges)
    return SurfaceDescriptor(name, letters, bars, gens, wedges, dict(vertices),
                             veech_constant_c, notes)


def builtin_torus():
    """The square torus, coded by the level-two congruence subgroup.

    The generators are the parabolics fixing the horizontal and the vertical
    directions.  The four vertices of the ideal quadrilateral sit at slopes
    ``x/y`` equal to infinity, -1, 0 and 1.
    """
    generators = {
        "a": Mat2(1, 2, 0, 1),
        "b": Mat2(1, 0, 2, 1),
    }
    wedges = {
        "a": ((1, 0), (1, 1)),
        "a_bar": ((-1, 1), (-1, 0)),
        "b": ((1, 1), (0, 1)),
        "b_bar": ((0, 1), (-1, 1)),
    }
    return make_descriptor(
        "torus", ("a", "b"), generators, wedges,
        notes="square torus; horizontal vertex appears as (1,0) and (-1,0)",
    )


# -- validation -------------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    residual: float
    detail: str = ""

    def as_dict(self):
        return {"name": self.name, "passed": self.passed,
                "residual": self.residual, "detail": self.detail}


@dataclass
class ValidationReport:
    descriptor: str
    checks: list = field(default_factory=list)

    @property
    def valid(self):
        return all(c.passed for c in self.checks)

    def failed(self):
        return [c for c in self.checks if not c.passed]

    def as_dict(self):
        return {"descriptor": self.descriptor, "valid": self.valid,
                "checks": [c.as_dict() for c in self.checks]}


def _in_open_cone(w, v_r, v_l):
    return cross(v_r, w) * cross(w, v_l) > 0


def _norm(v):
    return math.hypot(v[0], v[1])


def validate_descriptor(desc, tol=None):
    tol = settings.tol if tol is None else tol
    checks = []
    letters = desc.letters

    ok = len(letters) % 2 == 0 and len(letters) >= 4 and len(set(letters)) == len(letters)
    for l in letters:
        bar = desc.bars.get(l)
        if bar is None or bar == l or desc.bars.get(bar) != l:
            ok = False
    checks.append(Check("alphabet", ok, 0.0 if ok else 1.0,
                        "2d letters, d >= 2, bar is a fixed-point-free involution"))
    if not ok:
        return ValidationReport(desc.name, checks)

    dets = [desc.W(l).det() for l in letters]
    checks.append(Check("wedge_orientation", min(dets) > tol, float(min(dets)),
                        "det W > 0 for every letter"))

    lowest = min(v[1] / _norm(v) if _norm(v) else -1.0
                 for l in letters for v in desc.wedges[l])
    checks.append(Check("upper_half_plane", lowest >= -tol, float(lowest),
                        "wedge vectors in the closed upper half-plane"))

    inv = 0.0
    for l in letters:
        prod = (desc.G(desc.bar(l)) @ desc.G(l)).normalized()
        inv = max(inv, max(abs(x - y) for x, y in zip(prod.entries(), (1, 0, 0, 1))))
    checks.append(Check("inverse_pairs", inv <= tol, float(inv),
                        "G of the bar letter inverts G"))

    uni = max(abs(abs(desc.G(l).det()) - 1) for l in letters)
    checks.append(Check("unimodular", uni <= tol, float(uni), "|det G| = 1"))

    pair = 0.0
    for l in letters:
        xi_l, xi_r = desc.vertices[l]
        bl, br = desc.vertices[desc.bar(l)]
        pair = max(pair,
                   boundary_action(desc.G(l), br).distance(xi_l),
                   boundary_action(desc.G(l), bl).distance(xi_r))
    checks.append(Check("vertex_pairing", pair <= tol, float(pair),
                        "G maps the bar letter's vertices onto the letter's, swapping sides"))

    vd = 0.0
    for l in letters:
        xi_l, xi_r = desc.vertices[l]
        vd = max(vd, vector_to_boundary(desc.v_l(l)).distance(xi_l),
                 vector_to_boundary(desc.v_r(l)).distance(xi_r))
    checks.append(Check("vertex_directions", vd <= tol, float(vd),
                        "vertices are the boundary points of the wedge vectors"))

    cone = 0.0
    inside = True
    for l in letters:
        g = desc.G(l)
        br, bl = desc.wedges[desc.bar(l)]
        cone = max(cone, line_angle(g @ br, desc.v_l(l)), line_angle(g @ bl, desc.v_r(l)))
        outside = (br[0] - bl[0], br[1] - bl[1])
        inside = inside and _in_open_cone(g @ outside, desc.v_r(l), desc.v_l(l))
    checks.append(Check("cone_identity", cone <= tol and inside, float(cone),
                        "G maps the complement of the bar cone onto the cone"))

    starts = sorted((desc.vertices[l][0].angle, l) for l in letters)
    gap = 0.0
    total = 0.0
    for i, (_, l) in enumerate(starts):
        xi_l, xi_r = desc.vertices[l]
        total += xi_l.ccw_offset(xi_r)
        nxt = starts[(i + 1) % len(starts)][1]
        gap = max(gap, xi_r.distance(desc.vertices[nxt][0]))
    gap = max(gap, abs(total - 2 * math.pi))
    checks.append(Check("arc_partition", gap <= tol, float(gap),
                        "arcs tile the circle without overlap"))
    return ValidationReport(desc.name, checks)


# -- descriptor files -------------------------------------------------------

_FIELDS = {"name", "d", "letters", "generators", "wedges", "vertices", "veech_constant_c"}


def _fail(path, msg):
    raise DescriptorParseError(f"{path}: {msg}")


def _vector(value, path):
    if (not isinstance(value, list) or len(value) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)):
        _fail(path, "expected [x, y] with two numbers")
    return tuple(value)


def _matrix(value, path):
    if not isinstance(value, list) or len(value) != 2:
        _fail(path, "expected a 2x2 row-major array")
    rows = [_vector(r, f"{path}[{i}]") for i, r in enumerate(value)]
    return Mat2.rows(rows)


def descriptor_from_dict(data, source="<descriptor>"):
    if not isinstance(data, dict):
        _fail(source, "top level must be an object")
    unknown = sorted(set(data) - _FIELDS)
    if unknown:
        _fail(source, f"unknown field(s) {', '.join(unknown)}")
    for key in ("name", "d", "letters", "generators", "wedges"):
        if key not in data:
            _fail(source, f"missing field '{key}'")
    name, d, base = data["name"], data["d"], data["letters"]
    if not isinstance(name, str):
        _fail(f"{source}.name", "expected a string")
    if not isinstance(d, int) or isinstance(d, bool) or d < 2:
        _fail(f"{source}.d", "expected an integer >= 2")
    if (not isinstance(base, list) or len(base) != d
            or not all(isinstance(x, str) and x for x in base) or len(set(base)) != d):
        _fail(f"{source}.letters", f"expected {d} distinct letter names")
    if any(x.endswith(BAR_SUFFIX) for x in base):
        _fail(f"{source}.letters", f"base letters may not end in '{BAR_SUFFIX}'")
    letters = list(base) + [x + BAR_SUFFIX for x in base]

    gens = data["generators"]
    if not isinstance(gens, dict) or set(gens) != set(base):
        _fail(f"{source}.generators", "expected one matrix per base letter")
    generators = {l: _matrix(gens[l], f"{source}.generators.{l}") for l in base}
    for l, g in generators.items():
        if g.det() == 0:
            _fail(f"{source}.generators.{l}", "singular matrix")

    raw = data["wedges"]
    if not isinstance(raw, dict) or set(raw) != set(letters):
        _fail(f"{source}.wedges", "expected one wedge per letter, bars included")
    wedges = {}
    for l in letters:
        entry = raw[l]
        if not isinstance(entry, dict) or set(entry) != {"v_r", "v_l"}:
            _fail(f"{source}.wedges.{l}", "expected an object with v_r and v_l")
        wedges[l] = (_vector(entry["v_r"], f"{source}.wedges.{l}.v_r"),
                     _vector(entry["v_l"], f"{source}.wedges.{l}.v_l"))

    vertices = None
    if data.get("vertices") is not None:
        rv = data["vertices"]
        if not isinstance(rv, dict) or set(rv) != set(letters):
            _fail(f"{source}.vertices", "expected one vertex pair per letter")
        vertices = {}
        for l in letters:
            entry = rv[l]
            if not isinstance(entry, dict) or set(entry) != {"xi_l", "xi_r"}:
                _fail(f"{source}.vertices.{l}", "expected an object with xi_l and xi_r")
            for key in ("xi_l", "xi_r"):
                if not isinstance(entry[key], (int, float)) or isinstance(entry[key], bool):
                    _fail(f"{source}.vertices.{l}.{key}", "expected an angle in radians")
            vertices[l] = (CirclePoint(float(entry["xi_l"])), CirclePoint(float(entry["xi_r"])))

    c = data.get("veech_constant_c")
    if c is not None and (not isinstance(c, (int, float)) or isinstance(c, bool) or c <= 0):
        _fail(f"{source}.veech_constant_c", "expected a positive number")
    return make_descriptor(name, base, generators, wedges, vertices,
                           None if c is None else float(c))


def parse_descriptor(text, source="<descriptor>"):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DescriptorParseError(
            f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return descriptor_from_dict(data, source)


def load_descriptor(path):
    if path in (None, "torus", "builtin:torus"):
        return builtin_torus()
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DescriptorParseError(f"{path}: {exc.strerror}") from exc
    return parse_descriptor(text, str(path))


def descriptor_to_dict(desc):
    def num(x):
        x = float(x)
        return int(x) if x.is_integer() else x

    out = {
        "name": desc.name,
        "d": desc.d,
        "letters": list(desc.base_letters),
        "generators": {l: [[num(x) for x in row] for row in desc.G(l).to_rows()]
                       for l in desc.base_letters},
        "wedges": {l: {"v_r": [num(x) for x in desc.v_r(l)],
                       "v_l": [num(x) for x in desc.v_l(l)]} for l in desc.letters},
        "vertices": {l: {"xi_l": float(desc.vertices[l][0].angle),
                         "xi_r": float(desc.vertices[l][1].angle)} for l in desc.letters},
    }
    if desc.veech_constant_c is not None:
        out["veech_constant_c"] = desc.veech_constant_c
    return out


# -- constants --------------------------------------------------------------


def base_vectors(desc):
    """The set of wedge vectors, without repetitions."""
    seen = []
    for l in desc.letters:
        for v in desc.wedges[l]:
            v = (float(v[0]), float(v[1]))
            if v not in seen:
                seen.append(v)
    return np.array(seen)


def _word_products(desc, n, budget):
    """Yield ``(products, last_letter_index)`` for admissible words of length n."""
    letters = desc.letters
    k = len(letters)
    count = k * (k - 1) ** max(n - 1, 0)
    if count > budget:
        raise BudgetExceeded(f"{count} words of length {n} exceed budget {budget}")
    gens = np.array([np.array(desc.G(l).as_float().to_rows()) for l in letters])
    bar_idx = np.array([letters.index(desc.bar(l)) for l in letters])
    if n == 0:
        return np.eye(2)[None], np.array([-1])
    prods, last = gens.copy(), np.arange(k)
    for _ in range(n - 1):
        new_p, new_l = [], []
        for j in range(k):
            keep = bar_idx[last] != j
            new_p.append(prods[keep] @ gens[j])
            new_l.append(np.full(keep.sum(), j))
        prods, last = np.concatenate(new_p), np.concatenate(new_l)
    return prods, last


def vectors_at_depth(desc, n, budget=DEFAULT_BUDGET):
    """All vectors ``G_{a1}...G_{an} v`` with v a wedge vector (the set D_n)."""
    prods, _ = _word_products(desc, n, budget)
    base = base_vectors(desc)
    return np.einsum("wij,vj->wvi", prods, base).reshape(-1, 2)


def compute_M(desc, n_max, budget=DEFAULT_BUDGET):
    """``[M_0, ..., M_{n_max}]``, the largest vector norms in D_n."""
    return [float(np.max(np.hypot(*vectors_at_depth(desc, n, budget).T)))
            for n in range(n_max + 1)]


def estimate_c(desc, depth, budget=DEFAULT_BUDGET):
    """Working value of the Veech constant and its provenance flag.

    Scans pairs of non-parallel vectors of D_0, ..., D_depth for the minimum
    of ``angle * |u| * |v|``, with the angle between the two lines.
    """
    if desc.veech_constant_c is not None:
        return float(desc.veech_constant_c), "given"
    if depth < 1:
        raise ValueError("depth must be >= 1")
    vecs = np.concatenate([vectors_at_depth(desc, n, budget) for n in range(depth + 1)])
    vecs = np.unique(np.round(vecs, 9), axis=0)
    # fold to one representative per line
    flip = (vecs[:, 1] < 0) | ((vecs[:, 1] == 0) & (vecs[:, 0] < 0))
    vecs[flip] *= -1
    vecs = np.unique(vecs, axis=0)
    if len(vecs) ** 2 > budget * 50:
        raise BudgetExceeded(f"{len(vecs)} vectors give too many pairs")
    theta = np.arctan2(vecs[:, 0], vecs[:, 1])
    norms = np.hypot(vecs[:, 0], vecs[:, 1])
    best = math.inf
    for i in range(len(vecs) - 1):
        diff = np.abs(theta[i + 1:] - theta[i]) % math.pi
        diff = np.minimum(diff, math.pi - diff)
        prod = diff * norms[i] * norms[i + 1:]
        prod = prod[diff > 1e-12]
        if prod.size:
            best = min(best, float(prod.min()))
    return best, "scanned"


@dataclass(frozen=True)
class ConstantsTable:
    M: tuple
    c: float
    c_flag: str

    @property
    def M0(self):
        return self.M[0]

    def M_at(self, n):
        if n < 0 or n >= len(self.M):
            raise MissingConstants(f"M_{n} not in table (have 0..{len(self.M) - 1})")
        return self.M[n]

    @property
    def L0(self):
        return 4 * self.M0 * self.M_at(1) / self.c ** 2

    def hall_r(self, N):
        return 4 * self.M0 * self.M_at(N + 1) / self.c ** 2

    def area_bound(self, n):
        return self.c ** 2 / (4 * self.M0 * self.M_at(n))

    def as_dict(self):
        return {"M": list(self.M), "c": self.c, "c_flag": self.c_flag, "L0": self.L0}


def constants_table(desc, n_max, c_depth=4, budget=DEFAULT_BUDGET):
    c, flag = estimate_c(desc, c_depth, budget)
    return ConstantsTable(tuple(compute_M(desc, n_max, budget)), c, flag)


def thresholds(consts, N):
    return {"L0": consts.L0, "r": consts.hall_r(N), "c": consts.c, "c_flag": consts.c_flag}
