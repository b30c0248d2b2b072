"""Complex dimensions: zeros of det(I - A(s)) in a strip c_l <= Re(s) <= c, |Im(s)| <= T.

Two finders. The lattice path substitutes z = exp(-lam*s) and takes polynomial roots from
companion-matrix eigenvalues. The generic path isolates zeros with the argument principle
on recursively split rectangles and polishes them with Newton steps.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import structlog

from sprays.errors import BoundaryZero, IsolationFailure
from sprays.exppoly import (
    ExpPolynomial,
    LatticeStructure,
    NonLattice,
    lattice_structure,
    left_abscissa,
    right_abscissa,
)

log = structlog.get_logger()

CLUSTER_RADIUS = 1e-7
MAX_REFINE_ROUNDS = 64
MAX_EDGE_POINTS = 1 << 16
SPLIT_FRACTIONS = (0.5, 0.5731, 0.4387, 0.6437, 0.3211)
MULTIPLE_ZERO_BOX = 1e-2


@dataclass(frozen=True)
class Rectangle:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    @property
    def width(self) -> float:
        return self.re_max - self.re_min

    @property
    def height(self) -> float:
        return self.im_max - self.im_min

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    def corners(self) -> list[complex]:
        # counterclockwise
        return [
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        ]

    def contains(self, z: complex, margin: float = 0.0) -> bool:
        return (
            self.re_min - margin <= z.real <= self.re_max + margin
            and self.im_min - margin <= z.imag <= self.im_max + margin
        )

    def expanded(self, d: float) -> Rectangle:
        return Rectangle(self.re_min - d, self.re_max + d, self.im_min - d, self.im_max + d)

    def split(self, frac: float = 0.5) -> tuple[Rectangle, Rectangle]:
        """Two halves across the longer side, cut at the given fraction."""
        if self.width >= self.height:
            x = self.re_min + frac * self.width
            return (
                Rectangle(self.re_min, x, self.im_min, self.im_max),
                Rectangle(x, self.re_max, self.im_min, self.im_max),
            )
        y = self.im_min + frac * self.height
        return (
            Rectangle(self.re_min, self.re_max, self.im_min, y),
            Rectangle(self.re_min, self.re_max, y, self.im_max),
        )

    def __str__(self):
        return f"[{self.re_min:.6g}, {self.re_max:.6g}]x[{self.im_min:.6g}, {self.im_max:.6g}]"


@dataclass(frozen=True)
class ComplexDimension:
    location: complex
    multiplicity: int = 1


@dataclass(frozen=True)
class Strip:
    left: float
    right: float
    height: float


@dataclass(frozen=True)
class ComplexDimensionSet:
    zeros: tuple[ComplexDimension, ...]
    strip: Strip
    method: str
    lattice: LatticeStructure | None = None
    base_real_parts: tuple[float, ...] = ()

    def __len__(self):
        return len(self.zeros)

    def __iter__(self):
        return iter(self.zeros)

    @property
    def locations(self) -> np.ndarray:
        return np.array([z.location for z in self.zeros], dtype=complex)

    @property
    def cardinality(self) -> int:
        """Number of zeros counted with multiplicity."""
        return sum(z.multiplicity for z in self.zeros)

    @property
    def rightmost(self) -> ComplexDimension:
        return max(self.zeros, key=lambda z: (z.location.real, -abs(z.location.imag)))

    def within(self, height: float) -> list[ComplexDimension]:
        return [z for z in self.zeros if abs(z.location.imag) <= height]

    def to_dict(self) -> dict:
        out = {
            "method": self.method,
            "strip": {
                "left": self.strip.left,
                "right": self.strip.right,
                "height": self.strip.height,
            },
            "zeros": [
                {"re": z.location.real, "im": z.location.imag, "multiplicity": z.multiplicity}
                for z in self.zeros
            ],
        }
        if self.lattice is not None:
            out["lattice"] = {
                "lambda": self.lattice.lam,
                "period": self.lattice.period,
                "base_real_parts": list(self.base_real_parts),
            }
        return out


class _EdgeFailure(Exception):
    pass


def _edge_phase(det: ExpPolynomial, a: complex, b: complex, tol: float) -> float:
    """Total argument change of det along the segment a -> b, steps kept below pi/2."""
    freq = float(np.max(np.abs(det.log_bases))) if det.terms else 0.0
    n0 = max(16, int(math.ceil(abs(b - a) * freq / (math.pi / 8))) + 1)
    t = np.linspace(0.0, 1.0, n0)
    v = det.evaluate(a + (b - a) * t)
    for _ in range(MAX_REFINE_ROUNDS):
        if np.min(np.abs(v)) < tol:
            raise _EdgeFailure
        d = np.angle(v[1:] / v[:-1])
        bad = np.abs(d) >= math.pi / 2
        if not bad.any():
            return float(d.sum())
        if t.size > MAX_EDGE_POINTS:
            raise _EdgeFailure
        t_new = 0.5 * (t[:-1][bad] + t[1:][bad])
        v_new = det.evaluate(a + (b - a) * t_new)
        t = np.concatenate([t, t_new])
        v = np.concatenate([v, v_new])
        order = np.argsort(t, kind="stable")
        t, v = t[order], v[order]
    raise _EdgeFailure


def _winding_number(det: ExpPolynomial, rect: Rectangle, tol: float) -> int:
    corners = rect.corners()
    total = sum(_edge_phase(det, corners[k], corners[(k + 1) % 4], tol) for k in range(4))
    w = total / (2 * math.pi)
    k = round(w)
    if abs(w - k) > 1e-6:
        raise _EdgeFailure
    return int(k)


def _robust_count(
    det: ExpPolynomial, rect: Rectangle, tol: float, max_attempts: int = 8
) -> tuple[Rectangle, int]:
    for attempt in range(max_attempts + 1):
        trial = rect.expanded(attempt * 10 * tol)
        try:
            return trial, _winding_number(det, trial, tol)
        except _EdgeFailure:
            log.debug("rectangle_perturbed", rect=str(rect), attempt=attempt + 1)
    raise BoundaryZero(rect, max_attempts)


def count_zeros_in_rectangle(
    det: ExpPolynomial, rect: Rectangle, tol: float = 1e-9, max_attempts: int = 8
) -> int:
    """Zeros inside rect counted with multiplicity (argument principle).

    A boundary passing through a zero is pushed outward by 10*tol per attempt.
    """
    _, count = _robust_count(det, rect, tol, max_attempts)
    return count


def _newton(
    det: ExpPolynomial, deriv: ExpPolynomial, z0: complex, multiplicity: int, tol: float
) -> complex | None:
    z = z0
    best = (math.inf, z0)
    for _ in range(60):
        f = det.evaluate(z)
        best = min(best, (abs(f), z), key=lambda t: t[0])
        fp = deriv.evaluate(z)
        if fp == 0:
            break
        step = multiplicity * f / fp
        z -= step
        if not np.isfinite(z):
            return None
        if abs(step) <= 1e-3 * tol * max(1.0, abs(z)):
            return z
    # near a multiple zero the steps stall at rounding level
    if multiplicity > 1 and best[0] <= tol:
        return best[1]
    return None


def _isolate(
    det: ExpPolynomial,
    deriv: ExpPolynomial,
    rect: Rectangle,
    count: int,
    tol: float,
    depth: int,
    max_depth: int,
) -> list[tuple[complex, int]]:
    if count == 0:
        return []
    size = max(rect.width, rect.height)
    if count == 1 or size < CLUSTER_RADIUS:
        z = _newton(det, deriv, rect.center, count, tol)
        if z is not None and rect.contains(z, margin=10 * tol):
            return [(z, count)]
        if size < CLUSTER_RADIUS:
            return [(rect.center, count)]
    elif size < MULTIPLE_ZERO_BOX:
        z = _newton(det, deriv, rect.center, count, tol)
        if z is not None and rect.contains(z, margin=10 * tol):
            r = 1e-2 * MULTIPLE_ZERO_BOX
            box = Rectangle(z.real - r, z.real + r, z.imag - r, z.imag + r)
            try:
                if _winding_number(det, box, tol) == count:
                    return [(z, count)]
            except _EdgeFailure:
                pass
    if depth >= max_depth:
        raise IsolationFailure(rect, count)

    for frac in SPLIT_FRACTIONS:
        first, second = rect.split(frac)
        try:
            c1 = _winding_number(det, first, tol)
            c2 = _winding_number(det, second, tol)
        except _EdgeFailure:
            continue
        if c1 + c2 != count or c1 < 0 or c2 < 0:
            continue
        return _isolate(det, deriv, first, c1, tol, depth + 1, max_depth) + _isolate(
            det, deriv, second, c2, tol, depth + 1, max_depth
        )
    raise IsolationFailure(rect, count)


def _bands(det: ExpPolynomial, rect: Rectangle, pieces: int, tol: float) -> list[Rectangle]:
    """Horizontal bands tiling rect whose inner cuts keep clear of zeros."""
    if pieces <= 1:
        return [rect]
    h = rect.height / pieces
    cuts = [rect.im_min]
    for k in range(1, pieces):
        for nudge in (0.0, 0.0371, -0.0523, 0.1187, -0.1409):
            y = rect.im_min + (k + nudge) * h
            xs = np.linspace(rect.re_min, rect.re_max, 256)
            if np.min(np.abs(det.evaluate(xs + 1j * y))) > 1e3 * tol:
                cuts.append(y)
                break
    cuts.append(rect.im_max)
    return [
        Rectangle(rect.re_min, rect.re_max, lo, hi) for lo, hi in zip(cuts[:-1], cuts[1:])
    ]


def _generic_zeros(
    det: ExpPolynomial,
    strip: Strip,
    tol: float,
    workers: int,
    max_depth: int,
) -> list[tuple[complex, int]]:
    deriv = det.derivative()
    outer, total = _robust_count(
        det, Rectangle(strip.left, strip.right, -strip.height - 0.5, strip.height + 0.5), tol
    )
    bands = _bands(det, outer, max(1, workers), tol)

    def count(r):
        try:
            return _winding_number(det, r, tol)
        except _EdgeFailure:
            return None

    def run(job):
        r, c = job
        return _isolate(det, deriv, r, c, tol, 0, max_depth)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        counts = list(pool.map(count, bands))
        if any(c is None for c in counts) or sum(counts) != total:
            bands, counts = [outer], [total]
        found = [z for part in pool.map(run, zip(bands, counts)) for z in part]
    log.debug("zeros_isolated", method="generic", count=total, bands=len(bands))
    return found


def _lattice_zeros(
    det: ExpPolynomial, lat: LatticeStructure, height: float, tol: float
) -> tuple[list[tuple[complex, int]], tuple[float, ...]]:
    poly = lat.polynomial()
    nonzero = np.flatnonzero(poly)
    poly = poly[nonzero[0] : nonzero[-1] + 1]
    roots = np.roots(poly[::-1]) if poly.size > 1 else np.array([], dtype=complex)

    clusters: list[list[complex]] = []
    for z in roots:
        for group in clusters:
            if abs(group[0] - z) < CLUSTER_RADIUS:
                group.append(z)
                break
        else:
            clusters.append([z])

    deriv = det.derivative()
    p = lat.period
    found = []
    bases = []
    for group in clusters:
        z = complex(np.mean(group))
        mult = len(group)
        sigma = -math.log(abs(z)) / lat.lam
        t0 = -math.atan2(z.imag, z.real) / lat.lam
        bases.append(sigma)
        for k in range(math.ceil((-height - t0) / p), math.floor((height - t0) / p) + 1):
            s = complex(sigma, t0 + k * p)
            if mult == 1:
                polished = _newton(det, deriv, s, 1, tol)
                if polished is not None:
                    s = polished
            found.append((s, mult))
    return found, tuple(sorted(set(round(b, 12) for b in bases), reverse=True))


def _symmetrize(found: list[tuple[complex, int]], height: float, tol: float):
    merged: list[tuple[complex, int]] = []
    for z, m in sorted(found, key=lambda t: (t[0].imag, t[0].real)):
        if abs(z.imag) <= 10 * tol:
            z = complex(z.real, 0.0)
        if z.imag < 0:
            continue
        if any(abs(z - w) <= 10 * tol for w, _ in merged):
            continue
        merged.append((z, m))
    out = []
    for z, m in merged:
        if abs(z.imag) > height:
            continue
        out.append(ComplexDimension(z, m))
        if z.imag > 0:
            out.append(ComplexDimension(z.conjugate(), m))
    out.sort(key=lambda d: (d.location.imag, d.location.real))
    return tuple(out)


def find_complex_dimensions(
    det: ExpPolynomial,
    height: float,
    tol: float = 1e-9,
    *,
    method: str = "auto",
    delta: float = 1.0,
    right: float | None = None,
    max_denominator: int = 64,
    lattice_tol: float = 1e-9,
    workers: int = 1,
    max_depth: int = 80,
) -> ComplexDimensionSet:
    """Zeros of det with |Im| <= height, each with its multiplicity."""
    if height <= 0:
        raise ValueError(f"height must be > 0, got {height}")
    if method not in ("auto", "lattice", "generic"):
        raise ValueError(f"unknown method '{method}'")
    strip = Strip(
        left=left_abscissa(det, delta),
        right=right if right is not None else right_abscissa(det),
        height=height,
    )

    lat = None
    if method != "generic":
        lat = lattice_structure(det, lattice_tol, max_denominator)
        if isinstance(lat, NonLattice):
            if method == "lattice":
                raise ValueError(
                    "not a lattice exponential polynomial "
                    f"(best rational error {lat.worst_error:.3g})"
                )
            lat = None

    if lat is not None:
        found, bases = _lattice_zeros(det, lat, height, tol)
        log.debug("lattice_detected", lam=lat.lam, period=lat.period, degree=lat.degree)
        result = ComplexDimensionSet(
            _symmetrize(found, height, tol), strip, "lattice", lat, bases
        )
    else:
        found = _generic_zeros(det, strip, tol, workers, max_depth)
        result = ComplexDimensionSet(_symmetrize(found, height, tol), strip, "generic")
    log.info("zeros_found", method=result.method, count=len(result), height=height)
    return result


def hausdorff_distance(a: ComplexDimensionSet, b: ComplexDimensionSet) -> float:
    x, y = a.locations, b.locations
    if x.size == 0 or y.size == 0:
        return 0.0 if x.size == y.size else math.inf
    d = np.abs(x[:, None] - y[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
