"""Command line entry point: ``veech-lagrange <command> [options]``."""

import csv
import io
import json
import math
import random
import sys

import click

from .cantor import BACKWARD, FORWARD, cantor_pair, check_gap_condition, check_size_condition, scan_row
from .coding import Word, arc_of_word, itinerary
from . import __version__
from .errors import VeechError, WordParseError
from .hall import hall_direction_word, verify_hall_direction
from .projective import Direction, boundary_to_direction, direction_to_boundary
from .surface import constants_table, load_descriptor, thresholds, validate_descriptor
from .wedges import lagrange_estimate, wedge_sequence

SCHEMA_VERSION = 1


def _clean(obj):
    """Make values JSON-safe: infinities become strings, tuples become lists."""
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return obj


def _write(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _emit(command, payload, fmt, out, rows=None, header=None):
    if fmt == "csv":
        if rows is None:
            raise click.UsageError(f"{command} has no CSV form; use --format json")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
        _write(buf.getvalue(), out)
        return
    body = {"schema": f"veech-lagrange/{command}/{SCHEMA_VERSION}"}
    body.update(payload)
    _write(json.dumps(_clean(body), indent=2, sort_keys=True) + "\n", out)


def _word_option(desc, text, seed):
    """Parse ``--word``; ``random:LENGTH`` draws a seeded admissible word."""
    if text is None:
        return None
    if text.startswith("random:"):
        try:
            n = int(text.split(":", 1)[1])
        except ValueError as exc:
            raise WordParseError(f"bad random word length in {text!r}") from exc
        rng = random.Random(seed)
        letters = [rng.choice(desc.letters)]
        while len(letters) < n:
            letters.append(rng.choice([c for c in desc.letters if c != desc.bar(letters[-1])]))
        return Word(tuple(letters))
    return Word.parse(text, desc)


def _n_range(text):
    if "-" in text:
        lo, hi = text.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


class Runner(click.Group):
    """Map library errors to their exit codes."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except VeechError as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            ctx.exit(exc.exit_code)


common = [
    click.option("--descriptor", default="torus", show_default=True,
                 help="Descriptor JSON file, or 'torus' for the builtin square torus."),
    click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
                 show_default=True),
    click.option("--out", type=click.Path(dir_okay=False), default=None,
                 help="Write to a file instead of standard output."),
]


def with_common(fn):
    for opt in reversed(common):
        fn = opt(fn)
    return fn


@click.group(cls=Runner)
@click.version_option(__version__, prog_name="veech-lagrange")
def main():
    """Lagrange spectrum computations for Veech translation surfaces."""


@main.command()
@click.argument("path", required=False)
@with_common
def validate(path, descriptor, fmt, out):
    """Check a surface descriptor; exit status 1 when a check fails."""
    desc = load_descriptor(path or descriptor)
    report = validate_descriptor(desc)
    rows = [(c.name, c.passed, c.detail) for c in report.checks]
    _emit("validate", report.as_dict(), fmt, out, rows, ["check", "passed", "detail"])
    if not report.valid:
        sys.exit(1)


@main.command()
@with_common
@click.option("--theta", type=float, default=None, help="Direction, clockwise from vertical.")
@click.option("--word", default=None, help="Comma separated letters or random:LENGTH.")
@click.option("--depth", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def expand(descriptor, fmt, out, theta, word, depth, seed):
    """Boundary expansion of a direction, or the arc coded by a word."""
    desc = load_descriptor(descriptor)
    if (theta is None) == (word is None):
        raise click.UsageError("give exactly one of --theta and --word")
    if theta is not None:
        w = itinerary(desc, direction_to_boundary(Direction(theta)), depth)
        payload = {"theta": theta, "depth": depth, "letters": str(w)}
    else:
        w = _word_option(desc, word, seed)
        payload = {"word": str(w)}
    rows = []
    for n in range(1, len(w) + 1):
        arc = arc_of_word(desc, w[:n])
        rows.append((n, w[n - 1], float(arc.left.angle), float(arc.right.angle)))
    last = arc_of_word(desc, w)
    payload["arc"] = {"left": float(last.left.angle), "right": float(last.right.angle),
                      "length": float(last.length),
                      "midpoint_theta": float(boundary_to_direction(last.midpoint()).theta)}
    _emit("expand", payload, fmt, out, rows, ["n", "letter", "arc_left", "arc_right"])


def _sequence(desc, theta, word, depth, seed):
    if (theta is None) == (word is None):
        raise click.UsageError("give exactly one of --theta and --word")
    if word is not None:
        w = _word_option(desc, word, seed)
        return wedge_sequence(desc, w, keep_vectors=len(w) <= 400)
    w = itinerary(desc, direction_to_boundary(Direction(theta)), depth)
    return wedge_sequence(desc, w, theta=theta)


@main.command()
@with_common
@click.option("--theta", type=float, default=None)
@click.option("--word", default=None)
@click.option("--depth", type=int, default=40, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def wedges(descriptor, fmt, out, theta, word, depth, seed):
    """Wedge areas along a word or the expansion of a direction."""
    desc = load_descriptor(descriptor)
    seq = _sequence(desc, theta, word, depth, seed)
    rows = list(seq.rows())
    payload = {"word": str(Word(seq.word)), "theta": float(seq.theta.theta),
               "method": seq.method,
               "rows": [dict(zip(["n", "area_r", "area_l", "min_area", "inverse_min"], r))
                        for r in rows]}
    _emit("wedges", payload, fmt, out, rows,
          ["n", "area_r", "area_l", "min_area", "inverse_min"])


@main.command()
@with_common
@click.option("--theta", type=float, default=None)
@click.option("--word", default=None)
@click.option("--depth", type=int, default=40, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def lagrange(descriptor, fmt, out, theta, word, depth, seed):
    """Finite-depth Lagrange value; a cuspidal direction exits with status 1."""
    desc = load_descriptor(descriptor)
    if (theta is None) == (word is None):
        raise click.UsageError("give exactly one of --theta and --word")
    consts = constants_table(desc, 2)
    if word is not None:
        est = lagrange_estimate(desc, word=_word_option(desc, word, seed), depth=depth,
                                consts=consts)
    else:
        est = lagrange_estimate(desc, theta=theta, depth=depth, consts=consts)
    rows = list(enumerate(est.running_values))
    _emit("lagrange", est.as_dict(), fmt, out, rows, ["n", "inverse_min_area"])


@main.command()
@with_common
@click.option("--N", "N", type=int, default=4, show_default=True,
              help="Cusp run bound; the table reaches M_{N+1}.")
@click.option("--depth", type=int, default=4, show_default=True,
              help="Word length used to scan for the constant c.")
@click.option("--budget", type=int, default=2_000_000, show_default=True)
def constants(descriptor, fmt, out, N, depth, budget):
    """Growth constants M_n, the constant c and the two thresholds."""
    desc = load_descriptor(descriptor)
    table = constants_table(desc, N + 1, c_depth=depth, budget=budget)
    payload = {"table": table.as_dict(), "thresholds": thresholds(table, N), "N": N}
    rows = [(n, m) for n, m in enumerate(table.M)]
    _emit("constants", payload, fmt, out, rows, ["n", "M"])


@main.command()
@with_common
@click.option("--alpha", default="a", show_default=True)
@click.option("--N", "N", default="4", show_default=True, help="A value or a range such as 2-12.")
@click.option("--depth", type=int, default=10, show_default=True)
@click.option("--tol", type=float, default=1e-13, show_default=True)
@click.option("--budget", type=int, default=3_000_000, show_default=True)
@click.option("--sign", type=click.Choice([FORWARD, BACKWARD]), default=FORWARD,
              show_default=True, help="Which ledger the CSV output holds.")
def cantor(descriptor, fmt, out, alpha, N, depth, tol, budget, sign):
    """Hole ledgers with gap and size checks, or a scan over N."""
    desc = load_descriptor(descriptor)
    Ns = _n_range(N)
    if len(Ns) > 1:
        rows = [scan_row(*cantor_pair(desc, alpha, n, depth, tol, budget)) for n in Ns]
        passing = next((r.N for r in rows if r.passed), None)
        payload = {"alpha": alpha, "depth": depth, "smallest_passing_N": passing,
                   "scan": [r.as_dict() for r in rows]}
        header = list(rows[0].as_dict()) if rows else []
        _emit("cantor-scan", payload, fmt, out, [list(r.as_dict().values()) for r in rows], header)
        return
    plus, minus = cantor_pair(desc, alpha, Ns[0], depth, tol, budget)
    if fmt == "csv":
        _write((plus if sign == FORWARD else minus).to_csv(), out)
        return
    payload = {"alpha": alpha, "N": Ns[0], "depth": depth, "tol": tol, "mu": plus.mu}
    for name, approx in (("plus", plus), ("minus", minus)):
        t = approx.table
        gap = check_gap_condition(approx)
        payload[name] = {"m": approx.m, "M": approx.M, "holes": len(approx),
                         "x": t.x, "lambda": t.lam, "rho": t.rho, "l": t.l, "r": t.r,
                         "gap": gap.as_dict()}
    payload["size"] = check_size_condition(plus, minus).as_dict()
    _emit("cantor", payload, fmt, out)


@main.command()
@with_common
@click.option("--alpha", default="a", show_default=True)
@click.option("--N", "N", type=int, default=4, show_default=True)
@click.option("--L", "L", type=float, default=None, help="Target value; default 1.1 r.")
@click.option("--prefix-len", type=int, default=10_000, show_default=True)
@click.option("--verify-depth", type=int, default=None)
@click.option("--depth", type=int, default=10, show_default=True, help="Cantor ledger depth.")
@click.option("--tol", type=float, default=1e-8, show_default=True)
@click.option("--budget", type=int, default=3_000_000, show_default=True)
def hall(descriptor, fmt, out, alpha, N, L, prefix_len, verify_depth, depth, tol, budget):
    """Build a direction with Lagrange value L and check its wedge values."""
    desc = load_descriptor(descriptor)
    consts = constants_table(desc, N + 1)
    r = consts.hall_r(N)
    target = 1.1 * r if L is None else L
    hc = hall_direction_word(desc, alpha, target, prefix_len, N=N, depth=depth,
                             consts=consts, budget=budget, tol=tol)
    report = verify_hall_direction(desc, hc, verify_depth)
    rows = [(i, p, v) for i, (p, v) in enumerate(zip(hc.passages, report.passage_values))]
    _emit("hall", {"construction": hc.as_dict(), "report": report.as_dict()}, fmt, out,
          rows, ["block", "index", "inverse_area"])


if __name__ == "__main__":
    main()
