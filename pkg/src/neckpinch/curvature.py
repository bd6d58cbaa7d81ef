"""Curvature of the triaxial warped-product metric on S1 x S3.

The metric is g = phi^2 dz^2 + a^2 w1*w1 + b^2 w2*w2 + c^2 w3*w3 with
{w_i} dual to a Milnor frame {E_i} on SU(2) normalized so that
[E_i, E_j] = -2 eps_ijk E_k.

Two independent evaluation paths are provided:

* the production path evaluates the closed arclength-gauge expressions
  (K_0i = -x''/x, K_ij = -x'y'/(xy) + Khat_ij, the Ricci diagonal, the
  scalar curvature, |Rm|^2) using chain-rule s-derivatives;
* the oracle path evaluates the z-gauge frame symbols Sigma^gamma_{alpha beta}
  and the z-gauge Riemann components Rm_0ii0 / Rm_ijji directly, including the
  g^00 terms that vanish in the arclength gauge.

The two paths discretize genuinely different formulas and must agree under
grid refinement at the stencil order; that comparison is the module's main
self-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .grid import (
    STENCIL_ORDER,
    DegenerateFiberError,
    MetricState,
    ScalarField,
    dz_values,
)

#: Radii below this are treated as a collapsed fiber: curvature ~ 1/a^2 would
#: overflow silently rather than fail loudly.
MIN_RADIUS = 1e-8

_EPS = np.zeros((3, 3, 3))
for _i, _j, _k in permutations(range(3)):
    _EPS[_i, _j, _k] = (_j - _i) * (_k - _i) * (_k - _j) / 2.0


def _levi_civita(i: int, j: int, k: int) -> float:
    """eps_ijk for fiber indices in {1, 2, 3}."""
    return float(_EPS[i - 1, j - 1, k - 1])


def _check_resolvable(state: MetricState) -> None:
    smallest = min(
        np.min(state.a.values), np.min(state.b.values), np.min(state.c.values)
    )
    if smallest < MIN_RADIUS:
        raise DegenerateFiberError(
            f"fiber radius {smallest:.3e} below resolvable floor {MIN_RADIUS:.0e}"
        )


@dataclass(frozen=True)
class CurvatureField:
    """Pointwise curvature data of one metric state.

    Sectional curvatures k01..k23 span the frame 2-planes; khat12..khat23 are
    the intrinsic sectional curvatures of the SU(2) fiber; ric00..ric33 are
    the diagonal Ricci components in the arclength frame; scal and rm_norm_sq
    are assembled from the sectional curvatures by their trace identities.
    """

    k01: ScalarField
    k02: ScalarField
    k03: ScalarField
    k12: ScalarField
    k13: ScalarField
    k23: ScalarField
    khat12: ScalarField
    khat13: ScalarField
    khat23: ScalarField
    ric00: ScalarField
    ric11: ScalarField
    ric22: ScalarField
    ric33: ScalarField
    scal: ScalarField
    rm_norm_sq: ScalarField

    def sectional(self) -> tuple[ScalarField, ...]:
        return (self.k01, self.k02, self.k03, self.k12, self.k13, self.k23)


@dataclass(frozen=True)
class FrameSymbols:
    """z-gauge frame symbols; sigma[alpha, beta, gamma, :] is Sigma^gamma_{alpha beta}."""

    grid_n: int
    sigma: np.ndarray

    def __post_init__(self):
        if self.sigma.shape != (4, 4, 4, self.grid_n):
            raise ValueError("sigma must have shape (4, 4, 4, n)")


@dataclass(frozen=True)
class RiemannOracle:
    """z-gauge Riemann components and the sectional curvatures they normalize to."""

    rm0110: ScalarField
    rm0220: ScalarField
    rm0330: ScalarField
    rm1221: ScalarField
    rm1331: ScalarField
    rm2332: ScalarField
    k01: ScalarField
    k02: ScalarField
    k03: ScalarField
    k12: ScalarField
    k13: ScalarField
    k23: ScalarField

    def sectional(self) -> tuple[ScalarField, ...]:
        return (self.k01, self.k02, self.k03, self.k12, self.k13, self.k23)


def _khat(x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Fiber sectional curvature of the plane spanned by the x- and y-directions."""
    return ((x**2 - y**2) ** 2 - 3.0 * z**4) / (x * y * z) ** 2 + 2.0 / x**2 + 2.0 / y**2


def fiber_sectional(state: MetricState) -> tuple[ScalarField, ScalarField, ScalarField]:
    """Intrinsic sectional curvatures (Khat12, Khat13, Khat23) of the SU(2) fiber."""
    _check_resolvable(state)
    a, b, c = state.a.values, state.b.values, state.c.values
    grid = state.grid
    return (
        ScalarField(grid, _khat(a, b, c)),
        ScalarField(grid, _khat(a, c, b)),
        ScalarField(grid, _khat(b, c, a)),
    )


def sectional_curvatures(state: MetricState, order: int = STENCIL_ORDER) -> CurvatureField:
    """All curvature data via the arclength-gauge closed forms.

    Primes are s-derivatives computed by the chain rule (1/phi) d/dz on the
    fixed z-grid.
    """
    _check_resolvable(state)
    grid = state.grid
    dz = grid.dz
    phi = state.phi.values
    a, b, c = state.a.values, state.b.values, state.c.values

    ap = dz_values(a, dz, order) / phi
    bp = dz_values(b, dz, order) / phi
    cp = dz_values(c, dz, order) / phi
    app = dz_values(ap, dz, order) / phi
    bpp = dz_values(bp, dz, order) / phi
    cpp = dz_values(cp, dz, order) / phi

    khat12 = _khat(a, b, c)
    khat13 = _khat(a, c, b)
    khat23 = _khat(b, c, a)

    k01 = -app / a
    k02 = -bpp / b
    k03 = -cpp / c
    k12 = -ap * bp / (a * b) + khat12
    k13 = -ap * cp / (a * c) + khat13
    k23 = -bp * cp / (b * c) + khat23

    ric00 = -(app / a + bpp / b + cpp / c)
    ric11 = -a * app - a * ap * (bp / b + cp / c) + a**2 * (khat12 + khat13)
    ric22 = -b * bpp - b * bp * (ap / a + cp / c) + b**2 * (khat12 + khat23)
    ric33 = -c * cpp - c * cp * (ap / a + bp / b) + c**2 * (khat13 + khat23)

    scal = 2.0 * (k01 + k02 + k03 + k12 + k13 + k23)
    rm_norm_sq = 2.0 * (k01**2 + k02**2 + k03**2 + k12**2 + k13**2 + k23**2)

    wrap = lambda v: ScalarField(grid, v)
    return CurvatureField(
        k01=wrap(k01),
        k02=wrap(k02),
        k03=wrap(k03),
        k12=wrap(k12),
        k13=wrap(k13),
        k23=wrap(k23),
        khat12=wrap(khat12),
        khat13=wrap(khat13),
        khat23=wrap(khat23),
        ric00=wrap(ric00),
        ric11=wrap(ric11),
        ric22=wrap(ric22),
        ric33=wrap(ric33),
        scal=wrap(scal),
        rm_norm_sq=wrap(rm_norm_sq),
    )


def scalar_curvature(state: MetricState, order: int = STENCIL_ORDER) -> ScalarField:
    """Scalar curvature from its displayed closed form (not the trace assembly)."""
    _check_resolvable(state)
    dz = state.grid.dz
    phi = state.phi.values
    a, b, c = state.a.values, state.b.values, state.c.values
    ap = dz_values(a, dz, order) / phi
    bp = dz_values(b, dz, order) / phi
    cp = dz_values(c, dz, order) / phi
    app = dz_values(ap, dz, order) / phi
    bpp = dz_values(bp, dz, order) / phi
    cpp = dz_values(cp, dz, order) / phi
    a2, b2, c2 = a**2, b**2, c**2
    algebraic = (2 * a2 * b2 + 2 * a2 * c2 + 2 * b2 * c2 - a2**2 - b2**2 - c2**2) / (
        a2 * b2 * c2
    )
    s = 2.0 * (
        -app / a
        - bpp / b
        - cpp / c
        - ap * bp / (a * b)
        - ap * cp / (a * c)
        - bp * cp / (b * c)
        + algebraic
    )
    return ScalarField(state.grid, s)


def frame_symbol_oracle(state: MetricState, order: int = STENCIL_ORDER) -> FrameSymbols:
    """z-gauge frame symbols Sigma^gamma_{alpha beta} from the Koszul formula.

    Nonzero entries: Sigma^0_00 = g^00 dz(g00)/2, Sigma^i_{i0} = Sigma^i_{0i}
    = g^ii dz(gii)/2, Sigma^0_{ii} = -g^00 dz(gii)/2, and for distinct fiber
    indices Sigma^k_{ij} = eps_ijk g^kk (g_ii - g_jj - g_kk). Everything with
    exactly two zero indices vanishes.
    """
    _check_resolvable(state)
    n = state.grid.n
    dz = state.grid.dz
    g = np.stack(
        [
            state.phi.values**2,
            state.a.values**2,
            state.b.values**2,
            state.c.values**2,
        ]
    )
    dg = dz_values(g, dz, order)
    sigma = np.zeros((4, 4, 4, n))
    sigma[0, 0, 0] = 0.5 * dg[0] / g[0]
    for i in (1, 2, 3):
        sigma[i, 0, i] = 0.5 * dg[i] / g[i]
        sigma[0, i, i] = sigma[i, 0, i]
        sigma[i, i, 0] = -0.5 * dg[i] / g[0]
    for i, j, k in permutations((1, 2, 3)):
        sigma[i, j, k] = _levi_civita(i, j, k) * (g[i] - g[j] - g[k]) / g[k]
    return FrameSymbols(grid_n=n, sigma=sigma)


def riemann_oracle(state: MetricState, order: int = STENCIL_ORDER) -> RiemannOracle:
    """z-gauge Riemann components Rm_0ii0 and Rm_ijji, and their sectional norms.

    Rm_0ii0 = (g^00 dz(g00) dz(gii) + g^ii (dz gii)^2 - 2 dzz(gii)) / 4 and
    Rm_ijji = -g^00 dz(gjj) dz(gii) / 4 - g^kk (g_kk^2 - (g_ii - g_jj)^2)
              - 2 (g_kk - g_jj - g_ii).
    Sectional curvatures follow by dividing by the plane's metric coefficients,
    K_0i = Rm_0ii0 / (g00 gii) and K_ij = Rm_ijji / (gii gjj). All z-derivatives
    use the same central stencil as the production path but act on different
    quantities (g_ii rather than the radii), so the two discretizations agree
    only in the refinement limit.
    """
    _check_resolvable(state)
    grid = state.grid
    dz = grid.dz
    g = np.stack(
        [
            state.phi.values**2,
            state.a.values**2,
            state.b.values**2,
            state.c.values**2,
        ]
    )
    dg = dz_values(g, dz, order)
    ddg = dz_values(dg, dz, order)

    rm0 = {}
    k0 = {}
    for i in (1, 2, 3):
        rm = 0.25 * (dg[0] * dg[i] / g[0] + dg[i] ** 2 / g[i] - 2.0 * ddg[i])
        rm0[i] = rm
        k0[i] = rm / (g[0] * g[i])

    rmf = {}
    kf = {}
    for i, j in ((1, 2), (1, 3), (2, 3)):
        k = 6 - i - j
        rm = (
            -0.25 * dg[j] * dg[i] / g[0]
            - (g[k] ** 2 - (g[i] - g[j]) ** 2) / g[k]
            - 2.0 * (g[k] - g[j] - g[i])
        )
        rmf[(i, j)] = rm
        kf[(i, j)] = rm / (g[i] * g[j])

    wrap = lambda v: ScalarField(grid, v)
    return RiemannOracle(
        rm0110=wrap(rm0[1]),
        rm0220=wrap(rm0[2]),
        rm0330=wrap(rm0[3]),
        rm1221=wrap(rmf[(1, 2)]),
        rm1331=wrap(rmf[(1, 3)]),
        rm2332=wrap(rmf[(2, 3)]),
        k01=wrap(k0[1]),
        k02=wrap(k0[2]),
        k03=wrap(k0[3]),
        k12=wrap(kf[(1, 2)]),
        k13=wrap(kf[(1, 3)]),
        k23=wrap(kf[(2, 3)]),
    )


def riemann_tensor_from_frame_symbols(
    state: MetricState, order: int = STENCIL_ORDER
) -> np.ndarray:
    """Full Rm_{alpha beta gamma delta} assembled numerically from frame symbols.

    R(E_a, E_b) E_c = grad_a grad_b E_c - grad_b grad_a E_c - grad_[E_a,E_b] E_c
    expanded through Sigma, with E_0 = d/dz acting on the z-dependent symbol
    coefficients and the fiber brackets [E_i, E_j] = -2 eps_ijk E_k. Returns an
    array of shape (4, 4, 4, 4, n). This is a third, formula-free evaluation
    path used to arbitrate between the closed forms and the z-gauge oracle.
    """
    syms = frame_symbol_oracle(state, order)
    sigma = syms.sigma
    n = state.grid.n
    dz = state.grid.dz
    dsigma = dz_values(sigma, dz, order)

    # structure[alpha, beta, u] = C^u_{alpha beta} of the frame bracket
    structure = np.zeros((4, 4, 4))
    for i, j, k in permutations((1, 2, 3)):
        structure[i, j, k] = -2.0 * _levi_civita(i, j, k)

    # coef[a, b, c, d] is the E_d component of R(E_a, E_b) E_c; only E_0 = d/dz
    # differentiates the z-dependent symbol coefficients.
    coef = np.zeros((4, 4, 4, 4, n))
    coef[0] += dsigma
    coef[:, 0] -= dsigma
    coef += np.einsum("bcun,audn->abcdn", sigma, sigma)
    coef -= np.einsum("acun,budn->abcdn", sigma, sigma)
    coef -= np.einsum("abu,ucdn->abcdn", structure, sigma)

    g = np.stack(
        [
            state.phi.values**2,
            state.a.values**2,
            state.b.values**2,
            state.c.values**2,
        ]
    )
    return coef * g[np.newaxis, np.newaxis, np.newaxis, :, :]
