"""The graph of f as the attractor of q coordinate-wise affine contractions.

Map t sends (x, y) to (p_t x + beta_t, p[theta(t)] y + beta[theta(t)]):
it prepends digit t to x and digit theta(t) to the image stream, which is
exactly the functional equation read backwards.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence

import numpy as np

from .numerals import DomainError, digits_of
from .salem import SalemSystem, eval_f

DEFAULT_MAX_POINTS = 3 ** 13


@dataclass(frozen=True)
class AffineMap2D:
    x_scale: Fraction
    x_offset: Fraction
    y_scale: Fraction
    y_offset: Fraction

    def __post_init__(self):
        if not (0 < self.x_scale < 1 and 0 < self.y_scale < 1):
            raise DomainError("affine map is not a contraction")

    def __call__(self, pt):
        x, y = pt
        return (self.x_scale * x + self.x_offset, self.y_scale * y + self.y_offset)


@dataclass
class GraphPointSet:
    points: list
    exact: bool
    provenance: str

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def ifs_maps(sys: SalemSystem) -> list[AffineMap2D]:
    p, beta = sys.params.p, sys.params.beta
    return [AffineMap2D(p[t], beta[t], p[sys.perm(t)], beta[sys.perm(t)]) for t in range(sys.q)]


def deterministic_points(sys: SalemSystem, depth: int, seed_point=(0, 0),
                         max_points: int = DEFAULT_MAX_POINTS) -> GraphPointSet:
    """Images of ``seed_point`` under every composition of ``depth`` maps.

    The seed must lie on the graph; (0, 0) does whenever theta(0) = 0.
    Points come out ordered by address, which for the default seed is
    increasing x.
    """
    if depth < 0:
        raise DomainError("depth must be non-negative")
    if sys.q ** depth > max_points:
        raise DomainError(f"{sys.q}^{depth} points exceeds the limit {max_points}")
    maps = ifs_maps(sys)
    pts = [(Fraction(seed_point[0]), Fraction(seed_point[1]))]
    for _ in range(depth):
        pts = [m(pt) for m in maps for pt in pts]
    return GraphPointSet(pts, True, f"deterministic depth={depth}")


def _map_choices(sys: SalemSystem, count: int, seed: int, weighted: bool) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    if weighted:
        probs = np.array([float(v) for v in sys.params.p])
        return rng.choice(sys.q, size=count, p=probs / probs.sum())
    return rng.integers(0, sys.q, size=count)


def chaos_game(sys: SalemSystem, n: int, seed: int = 0, burn_in: int = 40,
               start=(0, 0), weighted: bool = False, exact: bool = False) -> GraphPointSet:
    """Random iteration of the maps; the first ``burn_in`` iterates are dropped.

    Map choice is uniform over t unless ``weighted`` (then P(t) = p_t, which
    samples the graph by Lebesgue measure on x).  After k steps the vertical
    distance to the graph has shrunk by the product of the y-scales used, at
    most ``max(p) ** k``.  ``exact`` keeps coordinates as fractions; the
    float run with the same seed follows the same maps.
    """
    if n < 1 or burn_in < 0:
        raise DomainError("need n >= 1 and burn_in >= 0")
    choices = _map_choices(sys, burn_in + n, seed, weighted)
    if exact:
        maps = ifs_maps(sys)
        pt = (Fraction(start[0]), Fraction(start[1]))
    else:
        maps = [(float(m.x_scale), float(m.x_offset), float(m.y_scale), float(m.y_offset))
                for m in ifs_maps(sys)]
        pt = (float(start[0]), float(start[1]))
    out = []
    for k, t in enumerate(choices):
        if exact:
            pt = maps[t](pt)
        else:
            a, b, c, d = maps[t]
            pt = (a * pt[0] + b, c * pt[1] + d)
        if k >= burn_in:
            out.append(pt)
    mode = "weighted" if weighted else "uniform"
    return GraphPointSet(out, exact, f"chaos seed={seed} burn_in={burn_in} {mode}")


def y_deviation_bound(sys: SalemSystem, steps: int) -> Fraction:
    return sys.max_weight ** steps


class ExportError(OSError):
    pass


def _decimal(v, precision: int) -> str:
    if isinstance(v, Fraction):
        with localcontext() as ctx:
            ctx.prec = precision
            d = Decimal(v.numerator) / Decimal(v.denominator)
        return format(d, f".{precision}g")
    return format(float(v), f".{precision}g")


def write_csv(pts: GraphPointSet, stream, precision: int = 17):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["x", "y"])
    for x, y in pts:
        w.writerow([_decimal(x, precision), _decimal(y, precision)])


def write_svg(pts: GraphPointSet, stream, radius: float = 0.6, size: int = 1000):
    """Scatter on the unit square, y up; coordinates in pixels."""
    stream.write(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n'
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white" stroke="black"/>\n'
        f'<g fill="black">\n')
    r = f"{radius:g}"
    for x, y in pts:
        px = float(x) * size
        py = (1.0 - float(y)) * size
        stream.write(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="{r}"/>\n')
    stream.write("</g>\n</svg>\n")


def export_points(pts: GraphPointSet, format: str, path, precision: int = 17, radius: float = 0.6):
    if format not in ("csv", "svg"):
        raise DomainError(f"unknown export format {format!r}")
    try:
        with open(os.fspath(path), "w", newline="") as fh:
            if format == "csv":
                write_csv(pts, fh, precision)
            else:
                write_svg(pts, fh, radius)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc.strerror or exc}") from exc


def off_graph(points: Sequence, sys: SalemSystem, max_digits: int = 64) -> list:
    """Exact points among ``points`` whose y differs from f(x); empty when all agree."""
    bad = []
    for x, y in points:
        e = digits_of(x, sys.params, max_digits)
        if e.truncated or eval_f(e, sys) != y:
            bad.append((x, y))
    return bad
