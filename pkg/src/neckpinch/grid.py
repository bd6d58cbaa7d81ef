"""Periodic grid, scalar fields, and differentiation in the z and arclength gauges.

The spatial domain is the circle z in [0, 2*pi) sampled on a uniform grid of n
points. Metric profiles phi, a, b, c live on this grid as immutable scalar
fields. Derivatives with respect to the base coordinate z use periodic central
finite differences (4th order by default). Derivatives with respect to the
arclength coordinate s, defined by ds = phi dz, are obtained through the chain
rule d/ds = (1/phi) d/dz; the grid itself never moves while phi evolves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NonFiniteFieldError(ValueError):
    """A field contains NaN or infinite entries."""


class GaugeDegeneracyError(ValueError):
    """The gauge profile phi is not strictly positive."""


class DegenerateFiberError(ValueError):
    """A fiber radius is zero, negative, or below the resolvable floor."""


#: Order of the default central-difference stencil.
STENCIL_ORDER = 4

# Antisymmetric one-sided halves of the central stencils, highest offset first.
# Full stencil: sum_m w_m * (f_{k+m} - f_{k-m}) / dz.
_STENCIL_WEIGHTS = {
    2: (1.0 / 2.0,),
    4: (-1.0 / 12.0, 8.0 / 12.0),
    6: (1.0 / 60.0, -9.0 / 60.0, 45.0 / 60.0),
}


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid z_k = k * 2*pi/n on the circle, n even and >= 8."""

    n: int

    def __post_init__(self):
        if self.n < 8 or self.n % 2 != 0:
            raise ValueError(f"grid size must be even and >= 8, got {self.n}")

    @property
    def dz(self) -> float:
        return 2.0 * np.pi / self.n

    @property
    def z(self) -> np.ndarray:
        return np.arange(self.n) * self.dz


@dataclass(frozen=True)
class ScalarField:
    """Immutable real-valued field over a periodic grid."""

    grid: PeriodicGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n,):
            raise ValueError(
                f"field length {values.shape} does not match grid n={self.grid.n}"
            )
        if not np.all(np.isfinite(values)):
            raise NonFiniteFieldError("field values must be finite everywhere")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.grid.n


def field(grid: PeriodicGrid, values) -> ScalarField:
    """Build a ScalarField, broadcasting scalars to the grid."""
    values = np.broadcast_to(np.asarray(values, dtype=float), (grid.n,))
    return ScalarField(grid, np.array(values))


@dataclass(frozen=True)
class MetricState:
    """The four metric profiles (phi, a, b, c) on a shared grid at one time.

    phi is the dimensionless gauge factor multiplying dz^2; a, b, c are the
    three fiber radii. All four must be strictly positive pointwise.
    """

    t: float
    phi: ScalarField
    a: ScalarField
    b: ScalarField
    c: ScalarField

    def __post_init__(self):
        grid = self.phi.grid
        for name in ("a", "b", "c"):
            if getattr(self, name).grid != grid:
                raise ValueError("all profiles must share one grid")
        if np.min(self.phi.values) <= 0.0:
            raise GaugeDegeneracyError("phi must be strictly positive")
        for name in ("a", "b", "c"):
            if np.min(getattr(self, name).values) <= 0.0:
                raise DegenerateFiberError(f"profile {name} must be strictly positive")

    @property
    def grid(self) -> PeriodicGrid:
        return self.phi.grid


def metric_state(grid: PeriodicGrid, t, phi, a, b, c) -> MetricState:
    """Convenience constructor accepting arrays or scalars for each profile."""
    return MetricState(
        t=float(t),
        phi=field(grid, phi),
        a=field(grid, a),
        b=field(grid, b),
        c=field(grid, c),
    )


def dz_values(values: np.ndarray, dz: float, order: int = STENCIL_ORDER) -> np.ndarray:
    """Periodic central difference along the last axis; exact zero on constants."""
    weights = _STENCIL_WEIGHTS[order]
    half = len(weights)
    out = np.zeros_like(values)
    for m, w in zip(range(half, 0, -1), weights):
        out += w * (np.roll(values, -m, axis=-1) - np.roll(values, m, axis=-1))
    return out / dz


def d_z(f: ScalarField, order: int = STENCIL_ORDER) -> ScalarField:
    """Derivative with respect to the base coordinate z."""
    return ScalarField(f.grid, dz_values(f.values, f.grid.dz, order))


def s_derivative(f: ScalarField, phi: ScalarField, order: int = STENCIL_ORDER) -> ScalarField:
    """Arclength derivative f' = (1/phi) df/dz."""
    if f.grid != phi.grid:
        raise ValueError("f and phi must share one grid")
    if np.min(phi.values) <= 0.0:
        raise GaugeDegeneracyError("phi must be strictly positive")
    return ScalarField(f.grid, dz_values(f.values, f.grid.dz, order) / phi.values)


def s_second_derivative(
    f: ScalarField, phi: ScalarField, order: int = STENCIL_ORDER
) -> ScalarField:
    """Second arclength derivative as two nested first derivatives.

    The nested form (1/phi) d/dz ((1/phi) df/dz) keeps the discrete product
    rule exact instead of expanding into df*dphi cross terms.
    """
    return s_derivative(s_derivative(f, phi, order), phi, order)


def arclength(phi: ScalarField) -> tuple[ScalarField, float]:
    """Cumulative arclength s(z_k) = int_0^{z_k} phi dz and the total length.

    Trapezoidal quadrature with s(0) = 0; the total circumference
    L = closed-loop integral of phi uses the periodic closing panel as well.
    """
    if np.min(phi.values) <= 0.0:
        raise GaugeDegeneracyError("phi must be strictly positive")
    dz = phi.grid.dz
    v = phi.values
    panels = 0.5 * (v[:-1] + v[1:]) * dz
    s = np.concatenate(([0.0], np.cumsum(panels)))
    total = s[-1] + 0.5 * (v[-1] + v[0]) * dz
    return ScalarField(phi.grid, s), float(total)


def extremum(f: ScalarField, kind: str) -> tuple[float, int]:
    """Global extremum over the grid and the first index attaining it."""
    if kind == "min":
        idx = int(np.argmin(f.values))
    elif kind == "max":
        idx = int(np.argmax(f.values))
    else:
        raise ValueError(f"kind must be 'min' or 'max', got {kind!r}")
    return float(f.values[idx]), idx
