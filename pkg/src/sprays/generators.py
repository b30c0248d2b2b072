"""Generator tube-volume profiles and their Mellin transforms.

A profile stores, per piece m, the breakpoint g_m and the coefficients kappa_0..kappa_n of
V(eps) = sum_i kappa_i * eps**(n - i) on [g_(m-1), g_m]. A monophase generator is the one-piece
case; both cases run through the same Mellin code, closed with the sentinel piece
kappa = (0, ..., 0, Vol) beyond the inradius.
"""

from __future__ import annotations

import bisect
import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from sprays.errors import PoleProximity
from sprays.validation import ValidationReport

POLE_RADIUS = 1e-9
MONOTONE_SAMPLES = 10_000


@dataclass(frozen=True)
class Piece:
    breakpoint: float
    coefficients: tuple[float, ...]

    def value(self, eps: float) -> float:
        acc = 0.0
        for c in self.coefficients:
            acc = acc * eps + c
        return acc


@dataclass(frozen=True)
class GeneratorProfile:
    space_dimension: int
    pieces: tuple[Piece, ...]
    volume: float

    def __post_init__(self):
        object.__setattr__(
            self,
            "pieces",
            tuple(
                Piece(float(p.breakpoint), tuple(map(float, p.coefficients))) for p in self.pieces
            ),
        )

    @classmethod
    def monophase(
        cls, space_dimension: int, coefficients, inradius: float, volume: float
    ) -> GeneratorProfile:
        """kappa_0..kappa_(n-1); kappa_n = 0 is appended when omitted."""
        coefs = tuple(coefficients)
        if len(coefs) == space_dimension:
            coefs += (0.0,)
        return cls(space_dimension, (Piece(inradius, coefs),), volume)

    @property
    def inradius(self) -> float:
        return self.pieces[-1].breakpoint

    @property
    def first_breakpoint(self) -> float:
        return self.pieces[0].breakpoint

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return tuple(p.breakpoint for p in self.pieces)

    @property
    def is_monophase(self) -> bool:
        return len(self.pieces) == 1

    def sentinel(self) -> tuple[float, ...]:
        return (0.0,) * self.space_dimension + (self.volume,)

    def scaled(self, factor: float) -> GeneratorProfile:
        """Same breakpoints, every coefficient and the volume multiplied by factor."""
        return GeneratorProfile(
            self.space_dimension,
            tuple(
                Piece(p.breakpoint, tuple(factor * c for c in p.coefficients))
                for p in self.pieces
            ),
            factor * self.volume,
        )


def tube_volume(p: GeneratorProfile, eps: float) -> float:
    if eps < 0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    if eps >= p.inradius:
        return p.volume
    m = bisect.bisect_left(p.breakpoints, eps)
    return p.pieces[m].value(eps)


def tube_volumes(p: GeneratorProfile, eps: np.ndarray) -> np.ndarray:
    eps = np.asarray(eps, dtype=float)
    out = np.full(eps.shape, p.volume)
    idx = np.searchsorted(p.breakpoints, eps, side="left")
    for m, piece in enumerate(p.pieces):
        mask = (idx == m) & (eps < p.inradius)
        out[mask] = np.polyval(piece.coefficients, eps[mask])
    return out


def _residue_weights(p: GeneratorProfile) -> list[tuple[float, tuple[float, ...]]]:
    # (g_m, kappa^m - kappa^(m+1)) for m = 1..M
    out = []
    for m, piece in enumerate(p.pieces):
        nxt = p.pieces[m + 1].coefficients if m + 1 < len(p.pieces) else p.sentinel()
        out.append((piece.breakpoint, tuple(a - b for a, b in zip(piece.coefficients, nxt))))
    return out


def check_pole(p: GeneratorProfile, s: complex, radius: float = POLE_RADIUS):
    for i in range(p.space_dimension + 1):
        if abs(s - i) < radius:
            raise PoleProximity(s, i)


def mellin_transform(p: GeneratorProfile, s: complex) -> complex:
    """Closed form of the Mellin transform of V(eps)/eps**n, continued to all s off 0..n."""
    check_pole(p, s)
    total = 0j
    for g, diffs in _residue_weights(p):
        log_g = math.log(g)
        for i, d in enumerate(diffs):
            if d:
                total += d * cmath.exp((s - i) * log_g) / (s - i)
    return total


def mellin_integer_residue(p: GeneratorProfile, i: int) -> float:
    if not 0 <= i <= p.space_dimension:
        raise ValueError(f"integer pole index must lie in 0..{p.space_dimension}, got {i}")
    return math.fsum(diffs[i] for _, diffs in _residue_weights(p))


def mellin_quadrature(p: GeneratorProfile, s: complex) -> complex:
    """Mellin transform of V(eps)/eps**n by adaptive quadrature, for n-1 < Re(s) < n.

    Integrates in x = log(eps) piece by piece; the saturated tail beyond the inradius is
    Vol * g**(s-n) / (n-s).
    """
    n = p.space_dimension
    if not n - 1 < s.real < n:
        raise ValueError(f"quadrature needs {n - 1} < Re(s) < {n}, got {s}")

    def integrand(x, terms, part):
        # kappa_i eps**(n-i) * eps**(s-n) = kappa_i * exp(x (s - i)); no factor overflows
        val = sum(k * cmath.exp(x * (s - i)) for i, k in terms)
        return val.real if part == "re" else val.imag

    total = 0j
    lo = -np.inf
    for piece in p.pieces:
        hi = math.log(piece.breakpoint)
        terms = [(i, k) for i, k in enumerate(piece.coefficients) if k]
        parts = [
            integrate.quad(
                integrand, lo, hi, args=(terms, part), epsabs=1e-14, epsrel=1e-12, limit=400
            )[0]
            for part in ("re", "im")
        ]
        total += complex(*parts)
        lo = hi
    g = p.inradius
    return total + p.volume * cmath.exp((s - n) * math.log(g)) / (n - s)


def validate_profile(p: GeneratorProfile, where: str | None = None) -> ValidationReport:
    report = ValidationReport()
    n = p.space_dimension
    tag = f"{where}: " if where else ""
    if n < 1:
        report.add("DimensionMismatch", f"space dimension must be >= 1, got {n}", where)
        return report
    if not p.pieces:
        report.add("CoefficientCount", "profile has no pieces", where)
        return report
    for m, piece in enumerate(p.pieces):
        if len(piece.coefficients) != n + 1:
            report.add(
                "CoefficientCount",
                f"piece {m + 1} has {len(piece.coefficients)} coefficients, expected {n + 1}",
                where,
            )
    if not p.volume > 0:
        report.add("NonPositiveVolume", f"volume must be > 0, got {p.volume}", where)
    prev = 0.0
    for piece in p.pieces:
        if not piece.breakpoint > prev:
            report.add(
                "BreakpointOrder",
                f"breakpoint {piece.breakpoint:.12g} does not exceed {prev:.12g}",
                f"{tag}g={piece.breakpoint:.12g}",
            )
        prev = piece.breakpoint
    if not report.ok:
        return report

    if abs(p.pieces[0].coefficients[n]) > 1e-12:
        report.add(
            "ZeroLimitViolation",
            f"kappa_n of the first piece is {p.pieces[0].coefficients[n]:.6g}, so V(0) != 0",
            where,
        )

    scale = max(1.0, abs(p.volume))
    for m, piece in enumerate(p.pieces):
        g = piece.breakpoint
        right = p.pieces[m + 1].value(g) if m + 1 < len(p.pieces) else p.volume
        if abs(piece.value(g) - right) > 1e-9 * scale:
            report.add(
                "ContinuityViolation",
                f"V jumps from {piece.value(g):.12g} to {right:.12g}",
                f"{tag}g={g:.12g}",
            )
    if not report.ok:
        return report

    grid = np.linspace(0.0, p.inradius, MONOTONE_SAMPLES)
    values = tube_volumes(p, grid)
    drops = np.flatnonzero(np.diff(values) < -1e-12 * scale)
    if drops.size:
        at = grid[drops[0]]
        report.add("MonotonicityViolation", f"V decreases near eps={at:.6g}", f"{tag}eps={at:.6g}")
    return report
