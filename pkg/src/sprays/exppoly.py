"""Exponential polynomials sum c_j * b_j**s with real c_j and bases in (0, 1].

det(I - A(s)) and every adjugate entry of I - A(s) are exponential polynomials, so
the complex dimensions and the residues can be computed from exact symbolic data.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from sprays.errors import DominanceUnavailable, MatrixTooLarge

BASE_MERGE_TOL = 1e-12
MAX_SYMBOLIC_DIM = 8


@dataclass(frozen=True)
class ExpPolynomial:
    """Canonical form: like bases merged, zero coefficients dropped, bases descending.

    Build through `from_terms` (or the arithmetic operators), which canonicalizes.
    `cancelled` records bases whose merged coefficient vanished.
    """

    terms: tuple[tuple[float, float], ...] = ()
    cancelled: tuple[float, ...] = field(default=(), compare=False)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, float]]) -> ExpPolynomial:
        items = []
        for coef, base in terms:
            coef, base = float(coef), float(base)
            if not base > 0 or base > 1.0 + BASE_MERGE_TOL:
                raise ValueError(f"base {base!r} is outside (0, 1]")
            items.append((coef, min(base, 1.0)))
        items.sort(key=lambda t: -t[1])

        merged: list[tuple[float, float]] = []
        cancelled: list[float] = []
        i = 0
        while i < len(items):
            base = items[i][1]
            log_base = math.log(base)
            group = []
            while i < len(items) and abs(math.log(items[i][1]) - log_base) <= BASE_MERGE_TOL:
                group.append(items[i][0])
                i += 1
            total = math.fsum(group)
            scale = max(abs(c) for c in group)
            if scale == 0.0:
                continue
            if abs(total) <= 1e-14 * scale:
                if len(group) > 1:
                    cancelled.append(base)
                continue
            merged.append((total, base))
        return cls(tuple(merged), tuple(cancelled))

    @classmethod
    def constant(cls, c: float) -> ExpPolynomial:
        return cls.from_terms([(c, 1.0)])

    @classmethod
    def monomial(cls, c: float, base: float) -> ExpPolynomial:
        return cls.from_terms([(c, base)])

    @cached_property
    def coefficients(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms], dtype=float)

    @cached_property
    def bases(self) -> np.ndarray:
        return np.array([b for _, b in self.terms], dtype=float)

    @cached_property
    def log_bases(self) -> np.ndarray:
        return np.log(self.bases)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def min_base(self) -> float:
        return min(b for _, b in self.terms)

    @property
    def constant_term(self) -> float:
        for c, b in self.terms:
            if b == 1.0:
                return c
        return 0.0

    def _carry(self, earlier: Iterable[float]) -> ExpPolynomial:
        """Copy that also remembers earlier cancelled bases still absent from the terms."""
        logs = [math.log(b) for _, b in self.terms]
        kept = list(self.cancelled)
        for base in sorted(set(earlier), reverse=True):
            log_base = math.log(base)
            if any(abs(log_base - x) <= BASE_MERGE_TOL for x in logs):
                continue
            if any(abs(log_base - math.log(c)) <= BASE_MERGE_TOL for c in kept):
                continue
            kept.append(base)
        if len(kept) == len(self.cancelled):
            return self
        return ExpPolynomial(self.terms, tuple(kept))

    def __add__(self, other: ExpPolynomial | float) -> ExpPolynomial:
        other = _coerce(other)
        out = ExpPolynomial.from_terms(self.terms + other.terms)
        return out._carry(self.cancelled + other.cancelled)

    __radd__ = __add__

    def __neg__(self) -> ExpPolynomial:
        return ExpPolynomial(tuple((-c, b) for c, b in self.terms), self.cancelled)

    def __sub__(self, other: ExpPolynomial | float) -> ExpPolynomial:
        return self + (-_coerce(other))

    def __rsub__(self, other: float) -> ExpPolynomial:
        return _coerce(other) - self

    def __mul__(self, other: ExpPolynomial | float) -> ExpPolynomial:
        other = _coerce(other)
        out = ExpPolynomial.from_terms(
            (c1 * c2, b1 * b2) for c1, b1 in self.terms for c2, b2 in other.terms
        )
        # a vanished base times a surviving one is a vanished product term
        carried = [c * b for c in self.cancelled for _, b in other.terms]
        carried += [c * b for c in other.cancelled for _, b in self.terms]
        return out._carry(tuple(carried))

    __rmul__ = __mul__

    def evaluate(self, s):
        """Value at a complex scalar or at every point of an array."""
        arr = np.asarray(s, dtype=complex)
        if not self.terms:
            out = np.zeros(arr.shape, dtype=complex)
        else:
            out = np.exp(np.multiply.outer(arr, self.log_bases)) @ self.coefficients
        return complex(out) if out.ndim == 0 else out

    __call__ = evaluate

    def derivative(self) -> ExpPolynomial:
        """d/ds b**s = ln(b) * b**s; the constant term drops out."""
        return ExpPolynomial.from_terms(
            (c * math.log(b), b) for c, b in self.terms if b != 1.0
        )

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for c, b in self.terms:
            parts.append(f"{c:+.6g}" if b == 1.0 else f"{c:+.6g}*{b:.6g}^s")
        return " ".join(parts)


ZERO = ExpPolynomial()
ONE = ExpPolynomial.constant(1.0)


def _coerce(x) -> ExpPolynomial:
    if isinstance(x, ExpPolynomial):
        return x
    return ExpPolynomial.constant(float(x)) if x else ZERO


def det_and_adjugate(
    m: Sequence[Sequence[ExpPolynomial]],
) -> tuple[ExpPolynomial, list[list[ExpPolynomial]]]:
    """Symbolic determinant and adjugate by cofactor expansion."""
    size = len(m)
    if any(len(row) != size for row in m):
        raise ValueError("matrix must be square")
    if size > MAX_SYMBOLIC_DIM:
        raise MatrixTooLarge(
            f"symbolic determinant capped at {MAX_SYMBOLIC_DIM}x{MAX_SYMBOLIC_DIM}, got {size}"
        )
    if size == 0:
        return ONE, []

    memo: dict[tuple[tuple[int, ...], tuple[int, ...]], ExpPolynomial] = {}

    def det(rows: tuple[int, ...], cols: tuple[int, ...]) -> ExpPolynomial:
        if not rows:
            return ONE
        key = (rows, cols)
        if key in memo:
            return memo[key]
        r0, rest = rows[0], rows[1:]
        total = ZERO
        for pos, c in enumerate(cols):
            entry = m[r0][c]
            if entry.is_zero:
                continue
            minor = det(rest, cols[:pos] + cols[pos + 1 :])
            term = entry * minor
            total = total + term if pos % 2 == 0 else total - term
        memo[key] = total
        return total

    everything = tuple(range(size))
    determinant = det(everything, everything)
    adj = [[ZERO] * size for _ in range(size)]
    for i in range(size):
        for j in range(size):
            rows = everything[:j] + everything[j + 1 :]
            cols = everything[:i] + everything[i + 1 :]
            cof = det(rows, cols)
            adj[i][j] = cof if (i + j) % 2 == 0 else -cof
    return determinant, adj


def identity_minus(a: Sequence[Sequence[ExpPolynomial]]) -> list[list[ExpPolynomial]]:
    size = len(a)
    return [
        [(ONE if i == j else ZERO) - a[i][j] for j in range(size)] for i in range(size)
    ]


@dataclass(frozen=True)
class LatticeStructure:
    """All log-bases are integer multiples k_j * lam of one lam > 0.

    With z = exp(-lam * s) the exponential polynomial becomes sum c_j z**k_j.
    """

    lam: float
    exponents: tuple[int, ...]
    coefficients: tuple[float, ...]

    @property
    def period(self) -> float:
        return 2 * math.pi / self.lam

    @property
    def degree(self) -> int:
        return max(self.exponents)

    def polynomial(self) -> np.ndarray:
        """Ascending coefficients of the polynomial in z."""
        poly = np.zeros(self.degree + 1)
        for k, c in zip(self.exponents, self.coefficients):
            poly[k] += c
        return poly

    def evaluate_polynomial(self, z):
        return np.polynomial.polynomial.polyval(z, self.polynomial())


@dataclass(frozen=True)
class NonLattice:
    worst_error: float
    max_denominator: int


def lattice_structure(
    ep: ExpPolynomial, tol: float = 1e-9, max_denominator: int = 64
) -> LatticeStructure | NonLattice:
    """Detect a common log-ratio by bounded rational reconstruction (continued fractions)."""
    logs = [-math.log(b) for _, b in ep.terms]
    positive = [x for x in logs if x > 0]
    if not positive:
        raise ValueError("lattice detection needs at least one base below 1")
    top = max(positive)

    fracs = []
    worst = 0.0
    for x in logs:
        ratio = x / top
        f = Fraction(ratio).limit_denominator(max_denominator)
        worst = max(worst, abs(ratio - float(f)))
        fracs.append(f)
    if worst > tol:
        return NonLattice(worst_error=worst, max_denominator=max_denominator)

    q = math.lcm(*(f.denominator for f in fracs))
    ks = [int(f * q) for f in fracs]
    g = math.gcd(*ks)
    ks = [k // g for k in ks]
    lam = math.fsum(k * x for k, x in zip(ks, logs)) / math.fsum(k * k for k in ks)

    if any(abs(x - k * lam) > tol * max(1.0, top) for k, x in zip(ks, logs)):
        return NonLattice(worst_error=worst, max_denominator=max_denominator)
    return LatticeStructure(
        lam=lam, exponents=tuple(ks), coefficients=tuple(c for c, _ in ep.terms)
    )


def dominance_margin(ep: ExpPolynomial, sigma: float, dominant: int) -> float:
    """|c_d| b_d**sigma minus the absolute sum of every other term at Re(s) = sigma."""
    mags = np.abs(ep.coefficients) * np.exp(sigma * ep.log_bases)
    return float(mags[dominant] - (mags.sum() - mags[dominant]))


def left_abscissa(
    ep: ExpPolynomial, delta: float, step: float = 0.25, limit: float = -1e4
) -> float:
    """A c_l < 0 left of which the minimal-base term keeps |ep| above delta."""
    if delta <= 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    if not ep.terms or ep.min_base == 1.0:
        raise DominanceUnavailable("no term with a base below 1 can dominate on the left")
    if ep.cancelled and min(ep.cancelled) < ep.min_base:
        raise DominanceUnavailable(
            f"the minimal base {min(ep.cancelled):.6g} cancelled after merging; "
            "dominance by the next base is not derived automatically"
        )
    dominant = len(ep.terms) - 1
    sigma = -step
    while dominance_margin(ep, sigma, dominant) <= delta:
        sigma -= step
        if sigma < limit:
            raise DominanceUnavailable(f"no dominance found down to Re(s) = {limit}")
    return sigma


def right_abscissa(
    ep: ExpPolynomial, delta: float = 0.5, step: float = 0.25, limit: float = 1e4
) -> float:
    """A c_r >= 0 right of which the constant term keeps |ep| above delta."""
    if abs(ep.constant_term) <= delta:
        raise DominanceUnavailable(
            f"constant term {ep.constant_term:.6g} cannot dominate with delta={delta}"
        )
    sigma = 0.0
    while dominance_margin(ep, sigma, 0) <= delta:
        sigma += step
        if sigma > limit:
            raise DominanceUnavailable(f"no dominance found up to Re(s) = {limit}")
    return sigma
