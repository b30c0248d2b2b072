"""Validation reports shared by the graph and generator checks."""

from __future__ import annotations

from dataclasses import dataclass, field

from sprays.errors import InvalidModel


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    where: str | None = None

    def __str__(self):
        loc = f" [{self.where}]" if self.where else ""
        return f"{self.kind}{loc}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, message: str, where: str | None = None):
        self.violations.append(Violation(kind, message, where))

    def extend(self, other: ValidationReport) -> ValidationReport:
        self.violations.extend(other.violations)
        return self

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def raise_for_violations(self):
        if self.violations:
            raise InvalidModel(self)

    def __len__(self):
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def __str__(self):
        if not self.violations:
            return "ok"
        return "\n".join(f"  - {v}" for v in self.violations)
