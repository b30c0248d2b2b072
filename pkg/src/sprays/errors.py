"""Exception hierarchy. Every solver failure derives from SprayError."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from sprays.dimensions import Rectangle
    from sprays.validation import ValidationReport


class SprayError(Exception):
    pass


class InvalidModel(SprayError):
    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__(f"invalid model: {len(report)} violation(s)\n{report}")


class InvalidRatioThreshold(SprayError):
    pass


class MatrixTooLarge(SprayError):
    pass


class PoleProximity(SprayError):
    def __init__(self, s: complex, pole: complex):
        self.s = s
        self.pole = pole
        super().__init__(f"s={s} is within the exclusion radius of the pole {pole}")


class HigherOrderPole(SprayError):
    def __init__(self, omega: complex, multiplicity: int):
        self.omega = omega
        self.multiplicity = multiplicity
        super().__init__(
            f"complex dimension {omega} has multiplicity {multiplicity}; "
            "only simple poles are supported"
        )


class PoleCollision(SprayError):
    def __init__(self, omega: complex, integer: int):
        self.omega = omega
        self.integer = integer
        super().__init__(f"complex dimension {omega} collides with the integer pole {integer}")


class DegeneratePole(SprayError):
    def __init__(self, integer: int, det_value: float):
        self.integer = integer
        self.det_value = det_value
        super().__init__(f"det(I - A({integer})) = {det_value:.3e} vanishes at an integer pole")


class InfiniteVolume(SprayError):
    def __init__(self, sim_value: float, dimension: int):
        self.sim_value = sim_value
        self.dimension = dimension
        super().__init__(
            f"sim-value D={sim_value:.12g} is not below n={dimension}; total volume is infinite"
        )


class DimensionOutOfRange(SprayError):
    def __init__(self, sim_value: float, dimension: int):
        self.sim_value = sim_value
        self.dimension = dimension
        super().__init__(
            f"tube formula needs n-1 < D < n, got D={sim_value:.12g}, n={dimension}"
        )


class DominanceUnavailable(SprayError):
    pass


class NonConvergence(SprayError):
    def __init__(self, what: str, iterations: int):
        self.iterations = iterations
        super().__init__(f"{what} did not converge after {iterations} iterations")


class BoundaryZero(SprayError):
    def __init__(self, rect: Rectangle, attempts: int):
        self.rect = rect
        self.attempts = attempts
        super().__init__(f"zero on or near the boundary of {rect} after {attempts} attempt(s)")


class IsolationFailure(SprayError):
    def __init__(self, rect: Rectangle, count: int):
        self.rect = rect
        self.count = count
        super().__init__(f"could not isolate {count} zero(s) inside {rect}")


class PathBudgetExceeded(SprayError):
    def __init__(self, eps: float, predicted: float, cap: int, unit: str = "paths"):
        self.eps = eps
        self.predicted = predicted
        self.cap = cap
        self.unit = unit
        super().__init__(
            f"oracle at eps={eps:.6g} needs ~{predicted:.3g} paths; "
            f"more than {cap} {unit} expanded"
        )


class NotIrreducible(SprayError):
    pass
