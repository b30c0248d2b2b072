"""Spray - main entry point. One model, its cached solver state, every computation."""

from __future__ import annotations

import math
import time
from collections.abc import Sequence

import numpy as np
import structlog

from sprays.config import Settings
from sprays.dimensions import ComplexDimensionSet, find_complex_dimensions
from sprays.loader import SprayModel, validate_model
from sprays.oracle import (
    OracleResult,
    normalized_scaling_profile,
    oracle_mellin,
    tube_volume_oracle,
)
from sprays.spectral import SimValue, VolumeVector, sim_value, total_volumes
from sprays.tube import TubeFormulaResult, ZetaSystem
from sprays.validation import ValidationReport

log = structlog.get_logger()


class _timed:
    def __init__(self, event: str, **context):
        self.event = event
        self.context = context

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        duration_ms = (time.perf_counter() - self.start) * 1000
        if exc_type is None:
            log.debug(self.event, duration_ms=round(duration_ms, 3), **self.context)
        else:
            log.error(self.event, error=str(exc), duration_ms=round(duration_ms, 3), **self.context)


class Spray:
    def __init__(self, model: SprayModel, settings: Settings | None = None):
        self.model = model
        self.settings = settings or Settings().merged(model.settings)
        self._report: ValidationReport | None = None
        self._sim: SimValue | None = None
        self._volumes: VolumeVector | None = None
        self._zeta: ZetaSystem | None = None
        self._dims: dict[tuple[float, str], ComplexDimensionSet] = {}

    @property
    def graph(self):
        return self.model.graph

    @property
    def profiles(self):
        return self.model.profiles

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.model.graph.vertices

    def validate(self) -> ValidationReport:
        if self._report is None:
            self._report = validate_model(self.model)
        return self._report

    def _checked(self):
        self.validate().raise_for_violations()

    def sim_value(self) -> SimValue:
        if self._sim is None:
            self._checked()
            with _timed("sim_value", model=self.model.name):
                self._sim = sim_value(self.graph, tol=self.settings.sim_tol)
        return self._sim

    def volumes(self) -> VolumeVector:
        if self._volumes is None:
            self._volumes = total_volumes(self.graph, self.profiles, self.sim_value())
        return self._volumes

    def zeta(self) -> ZetaSystem:
        if self._zeta is None:
            with _timed("zeta_system_built", model=self.model.name):
                self._zeta = ZetaSystem(self.graph, self.profiles, self.sim_value())
        return self._zeta

    def validity_bound(self) -> float:
        return self.zeta().validity_bound()

    def dimensions(
        self, height: float | None = None, method: str | None = None
    ) -> ComplexDimensionSet:
        s = self.settings
        height = s.height if height is None else height
        method = method or s.method
        key = (float(height), method)
        if key not in self._dims:
            zeta = self.zeta()
            with _timed("dimensions", height=height, method=method):
                self._dims[key] = find_complex_dimensions(
                    zeta.det,
                    height,
                    s.zero_tol,
                    method=method,
                    delta=s.delta,
                    right=(zeta.sim_value + self.graph.space_dimension) / 2,
                    max_denominator=s.max_denominator,
                    lattice_tol=s.lattice_tol,
                    workers=s.workers,
                )
        return self._dims[key]

    def tube(self, eps: float, height: float | None = None) -> TubeFormulaResult:
        height = self.settings.height if height is None else height
        dims = self.dimensions(height)
        with _timed("tube", eps=eps, height=height):
            return self.zeta().tube_volume_formula(dims, eps, height)

    def oracle(self, eps: float) -> OracleResult:
        self._checked()
        with _timed("oracle", eps=eps):
            return tube_volume_oracle(
                self.graph,
                self.profiles,
                eps,
                sim=self.sim_value(),
                volumes=self.volumes(),
                collapse=self.settings.collapse,
                path_cap=self.settings.path_cap,
            )

    def scaling_profile(
        self, grid: Sequence[float], detrend: bool = False
    ) -> list[tuple[float, dict[str, float]]]:
        """W_u(eps) on the grid; detrend subtracts the integer-pole residue terms first."""
        self._checked()
        trend = self.zeta().integer_terms if detrend else None
        with _timed("scaling_profile", points=len(grid), detrend=detrend):
            return normalized_scaling_profile(
                self.graph,
                self.profiles,
                grid,
                trend=trend,
                sim=self.sim_value(),
                volumes=self.volumes(),
                collapse=self.settings.collapse,
                path_cap=self.settings.path_cap,
            )

    def zeta_mellin_check(self, u: str, s: complex) -> tuple[complex, complex]:
        """(zeta_u(s), Mellin transform of the oracle's V_S_u / eps**n) for D < Re(s) < n."""
        zeta = self.zeta()
        dims = self.dimensions()
        with _timed("zeta_mellin_check", vertex=u, s=str(s)):
            numeric = oracle_mellin(
                self.graph,
                self.profiles,
                u,
                complex(s),
                lattice=dims.lattice,
                sim=self.sim_value(),
                volumes=self.volumes(),
            )
        return zeta.zeta_at(u, complex(s)), numeric

    def fractal_tube_volume(
        self,
        eps: float,
        hull: dict[str, Sequence[float]] | None = None,
        height: float | None = None,
    ) -> dict[str, float]:
        """Inner spray tube plus the outer tube of the convex hull, per vertex with a hull.

        hull maps vertex -> Steiner coefficients of eps**0..eps**n; defaults to the model's hulls.
        """
        hull = self.model.hulls if hull is None else hull
        if not hull:
            raise ValueError("no hull polynomial given and the model defines none")
        inner = self.tube(eps, height).per_vertex
        out = {}
        for v, coefs in hull.items():
            if v not in inner:
                raise KeyError(f"Vertex '{v}' not found")
            outer = np.polynomial.polynomial.polyval(eps, np.asarray(coefs, dtype=float))
            out[v] = math.fsum([inner[v], float(outer)])
        return out
