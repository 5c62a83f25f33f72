"""Field pairs and the normalized coupled energy.

The objective is, for Dirichlet fields u, v on the ball,

    E(u, v) = (1/2) int a |grad u|^2 / |u|_q^2
            + (1/2) int b |grad v|^2 / |v|_q^2
            - lam * int u v / (|u|_q |v|_q),

with q = 2N/(N-2).  Gradient energies are computed from cell-face
differences, so that the quadratic form agrees exactly with the assembled
flux operator used by the spectral and descent modules.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DegeneratePair, NumericFault, ShapeMismatch
from .grid import RadialGrid, integrate
from .weights import WeightProfile


def critical_exponent(dim: int) -> float:
    return 2.0 * dim / (dim - 2.0)


@dataclass(frozen=True)
class FieldPair:
    """Discrete radial pair (u, v) with zero Dirichlet boundary value."""

    u: np.ndarray
    v: np.ndarray
    lam: float = 0.0
    generation: int = 0

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if u.shape != v.shape:
            raise ShapeMismatch("u and v must share the grid")
        if u[-1] != 0.0 or v[-1] != 0.0:
            raise ValueError("Dirichlet boundary requires u[-1] = v[-1] = 0")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    def with_fields(self, u, v, bump_generation: bool = True) -> "FieldPair":
        return replace(self, u=u, v=v,
                       generation=self.generation + int(bump_generation))

    def derivatives(self, grid: RadialGrid) -> tuple[np.ndarray, np.ndarray]:
        """Nodal derivative arrays (central differences, u'(0) = 0)."""
        du = np.gradient(self.u, grid.nodes, edge_order=2)
        dv = np.gradient(self.v, grid.nodes, edge_order=2)
        du[0] = 0.0
        dv[0] = 0.0
        return du, dv


def dirichlet_field(values, grid: RadialGrid) -> np.ndarray:
    """Clamp the boundary node to zero and validate shape."""
    f = grid.check_shape(values).copy()
    f[-1] = 0.0
    return f


def weighted_gradient_energy(u: np.ndarray, w: WeightProfile, grid: RadialGrid) -> float:
    """int w(r) |u'(r)|^2 r^(N-1) sigma dr by cell-face differences.

    The innermost cell (0, r_1) is skipped: its flux factor r^(N-1)
    vanishes at the order of the rule for radially smooth fields (u'(0)=0).
    """
    u = grid.check_shape(u)
    if not np.all(np.isfinite(u)):
        raise NumericFault("non-finite field samples")
    r = grid.nodes
    h = grid.spacings[1:]
    faces = grid.faces[1:]
    slopes = np.diff(u)[1:] / h
    wf = np.asarray(w(faces), dtype=float)
    return float(
        grid.surface_factor
        * np.sum(wf * faces ** (grid.dimension - 1) * slopes ** 2 * h)
    )


def lq_norm(u: np.ndarray, grid: RadialGrid) -> float:
    """(int |u|^q)^(1/q) with q = 2N/(N-2)."""
    q = critical_exponent(grid.dimension)
    return float(integrate(np.abs(u) ** q, grid) ** (1.0 / q))


@dataclass(frozen=True)
class EnergyReport:
    """The three normalized terms of the coupled energy."""

    grad_a: float
    grad_b: float
    coupling: float
    value: float
    norm_u: float
    norm_v: float
    q: float


def energy(
    pair: FieldPair,
    a: WeightProfile,
    b: WeightProfile,
    lam: float,
    grid: RadialGrid,
) -> EnergyReport:
    """Evaluate the normalized coupled energy; scale-invariant per component."""
    nu = lq_norm(pair.u, grid)
    nv = lq_norm(pair.v, grid)
    if nu == 0.0 or nv == 0.0:
        raise DegeneratePair("both components must be nonzero")
    grad_a = 0.5 * weighted_gradient_energy(pair.u, a, grid) / nu ** 2
    grad_b = 0.5 * weighted_gradient_energy(pair.v, b, grid) / nv ** 2
    coupling = lam * integrate(pair.u * pair.v, grid) / (nu * nv)
    value = grad_a + grad_b - coupling
    if not np.isfinite(value):
        raise NumericFault("non-finite energy")
    return EnergyReport(
        grad_a=grad_a,
        grad_b=grad_b,
        coupling=coupling,
        value=value,
        norm_u=nu,
        norm_v=nv,
        q=critical_exponent(grid.dimension),
    )
