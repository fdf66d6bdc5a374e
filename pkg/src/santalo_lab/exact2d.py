"""Exact rational arithmetic for 2D hull, area, centroid and polar.

Coordinates are :class:`fractions.Fraction`; float inputs are converted
exactly (binary rationals), so every downstream quantity is exact for the
given vertex data.  Used by the ``--rational`` CLI mode and by tests that
anchor closed-form values.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DegenerateInput, NotInterior


def to_fractions(points) -> list[tuple[Fraction, Fraction]]:
    return [(Fraction(float(x)), Fraction(float(y))) for x, y in points]


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def hull(points) -> list[tuple[Fraction, Fraction]]:
    """Monotone-chain convex hull, counter-clockwise, exact predicates."""
    pts = sorted(set(points))
    if len(pts) < 3:
        raise DegenerateInput("need at least 3 distinct points")
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    ring = lower[:-1] + upper[:-1]
    if len(ring) < 3:
        raise DegenerateInput("points are collinear")
    return ring


def area(ring) -> Fraction:
    """Shoelace area of a CCW ring."""
    s = Fraction(0)
    m = len(ring)
    for i in range(m):
        x1, y1 = ring[i]
        x2, y2 = ring[(i + 1) % m]
        s += x1 * y2 - x2 * y1
    return s / 2


def centroid(ring) -> tuple[Fraction, Fraction]:
    a6 = area(ring) * 6
    cx = Fraction(0)
    cy = Fraction(0)
    m = len(ring)
    for i in range(m):
        x1, y1 = ring[i]
        x2, y2 = ring[(i + 1) % m]
        w = x1 * y2 - x2 * y1
        cx += (x1 + x2) * w
        cy += (y1 + y2) * w
    return cx / a6, cy / a6


def polar(ring, z) -> list[tuple[Fraction, Fraction]]:
    """Polar polygon about pole z: one vertex per edge of the input ring."""
    zx, zy = Fraction(z[0]) if not isinstance(z[0], Fraction) else z[0], \
        Fraction(z[1]) if not isinstance(z[1], Fraction) else z[1]
    out = []
    m = len(ring)
    for i in range(m):
        x1, y1 = ring[i]
        x2, y2 = ring[(i + 1) % m]
        # edge normal (unnormalized) and support value about z
        nx, ny = y2 - y1, x1 - x2
        c = nx * (x1 - zx) + ny * (y1 - zy)
        if c <= 0:
            raise NotInterior("pole not strictly interior")
        out.append((zx + nx / c, zy + ny / c))
    return hull(out)


def volume_product(points, z) -> Fraction:
    """Exact |K| * |K^z| for the hull of ``points`` about pole ``z``."""
    ring = hull(to_fractions(points))
    zf = (Fraction(float(z[0])), Fraction(float(z[1])))
    return area(ring) * area(polar(ring, zf))
