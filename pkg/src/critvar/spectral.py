"""First Dirichlet eigenpair of the weighted radial operator -div(w grad).

In radial coordinates the operator reads -r^(1-N) (r^(N-1) w u')'.  It is
discretized in flux form on the interior nodes: the face between nodes i
and i+1 carries the conductance

    c_{i+1/2} = sigma * w(r_{i+1/2}) * r_{i+1/2}^(N-1) / h_i,

the weight evaluated at the arithmetic face midpoint.  The node mass is
the same cell mass the quadrature uses, so Rayleigh quotients of the
discrete operator coincide exactly with quadrature energy ratios.  The
origin carries zero flux (radial regularity); the boundary is Dirichlet.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded, solveh_banded

from .energy import lq_norm
from .errors import IndefiniteWeight, SpectralStall, ThresholdNotReached
from .grid import RadialGrid, integrate
from .weights import WeightProfile


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric positive-definite flux operator on interior nodes 1..n-1."""

    diag: np.ndarray       # K_ii
    off: np.ndarray        # K_{i,i+1} = K_{i+1,i}, length len(diag)-1
    mass: np.ndarray       # diagonal node masses (same as quadrature)

    @property
    def size(self) -> int:
        return self.diag.size

    def apply(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[:-1] += self.off * x[1:]
        y[1:] += self.off * x[:-1]
        return y

    def quadratic_form(self, x: np.ndarray) -> float:
        return float(np.dot(x, self.apply(x)))

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        ab = np.zeros((2, self.size))
        ab[0, 1:] = self.off
        ab[1] = self.diag
        return solveh_banded(ab, rhs)

    def solve_shifted(self, rhs: np.ndarray, shift: float) -> np.ndarray:
        """(K - shift * M) x = rhs, general banded solve (may be indefinite)."""
        ab = np.zeros((3, self.size))
        ab[0, 1:] = self.off
        ab[1] = self.diag - shift * self.mass
        ab[2, :-1] = self.off
        return solve_banded((1, 1), ab, rhs)


def assemble_operator(w: WeightProfile, grid: RadialGrid) -> TridiagonalOperator:
    """Flux-form stiffness for -div(w grad) with Dirichlet boundary.

    The quadratic form x.K.x equals the cell-face gradient energy of the
    field extended by zero at the boundary.
    """
    r = grid.nodes
    n = grid.n_cells
    nodes_w = np.asarray(w(r), dtype=float)
    if np.any(nodes_w <= 0.0):
        raise IndefiniteWeight("weight must be strictly positive on the grid")
    faces = grid.faces[1:]                        # r_{i+1/2}, i = 1..n-1
    h = grid.spacings[1:]
    wf = np.asarray(w(faces), dtype=float)
    if np.any(wf <= 0.0):
        raise IndefiniteWeight("weight must be strictly positive at cell faces")
    c = grid.surface_factor * wf * faces ** (grid.dimension - 1) / h
    diag = np.empty(n - 1)
    diag[0] = c[0]                                # zero flux through the origin face
    diag[1:] = c[:-1] + c[1:]
    off = -c[:-1]                                 # couples nodes i, i+1 for i < n-1
    mass = grid.masses[1:-1]
    return TridiagonalOperator(diag=diag, off=off, mass=mass)


@dataclass(frozen=True)
class SpectralResult:
    lambda1: float
    eigenfunction: np.ndarray   # full node array, positive, int phi^2 = 1
    iterations: int
    residual: float             # |K phi - lambda M phi| in the M^-1 norm


def _extrapolate_origin(phi: np.ndarray, grid: RadialGrid) -> float:
    """Quadratic regularity fit u = u0 + c r^2 through the two first nodes."""
    r1, r2 = grid.nodes[1], grid.nodes[2]
    return float((phi[1] * r2 ** 2 - phi[2] * r1 ** 2) / (r2 ** 2 - r1 ** 2))


def first_eigenpair(
    w: WeightProfile,
    grid: RadialGrid,
    tol: float = 1e-11,
    max_iters: int = 500,
) -> SpectralResult:
    """Smallest eigenvalue of K x = lambda M x by inverse iteration.

    Convergence is declared on the Rayleigh quotient together with the
    M^-1-norm eigen-residual; the eigenfunction is sign-fixed positive and
    L2-normalized.
    """
    op = assemble_operator(w, grid)
    m = op.mass
    x = np.ones(op.size)
    x /= np.sqrt(np.dot(m, x * x))
    rho_old = np.inf
    rho = op.quadratic_form(x)
    for it in range(1, max_iters + 1):
        y = op.solve(m * x)
        x = y / np.sqrt(np.dot(m, y * y))
        rho = op.quadratic_form(x)           # x is M-normalized
        res = op.apply(x) - rho * m * x
        res_norm = float(np.sqrt(np.dot(res * res, 1.0 / m)))
        if abs(rho - rho_old) <= tol * abs(rho) and res_norm <= 100.0 * tol * abs(rho):
            break
        rho_old = rho
    else:
        raise SpectralStall(
            f"inverse iteration did not converge in {max_iters} iterations",
            last_rayleigh=rho,
        )
    if np.sum(x) < 0.0:
        x = -x
    phi = np.zeros(grid.nodes.size)
    phi[1:-1] = x
    phi[0] = _extrapolate_origin(phi, grid)
    phi /= np.sqrt(integrate(phi * phi, grid))
    return SpectralResult(
        lambda1=float(rho), eigenfunction=phi, iterations=it, residual=res_norm
    )


@dataclass(frozen=True)
class WeightedSpectrum:
    """First eigenvalues of both weighted operators and their minimum."""

    value: float
    first_a: SpectralResult
    first_b: SpectralResult


def lambda_tilde(a: WeightProfile, b: WeightProfile, grid: RadialGrid,
                 tol: float = 1e-11) -> WeightedSpectrum:
    ra = first_eigenpair(a, grid, tol=tol)
    rb = first_eigenpair(b, grid, tol=tol)
    return WeightedSpectrum(value=min(ra.lambda1, rb.lambda1), first_a=ra, first_b=rb)


def coupling_threshold(spec: WeightedSpectrum, grid: RadialGrid) -> float:
    """The coupling strength above which the eigenfunction pair certifies a
    nonpositive energy: (|phi_a|_q |phi_b|_q / int phi_a phi_b)
    * |Omega|^(1 - 2/q) * max(lambda_a, lambda_b)."""
    phi_a = spec.first_a.eigenfunction
    phi_b = spec.first_b.eigenfunction
    q = 2.0 * grid.dimension / (grid.dimension - 2.0)
    overlap = integrate(phi_a * phi_b, grid)
    vol = grid.volume
    return (
        lq_norm(phi_a, grid) * lq_norm(phi_b, grid) / overlap
        * vol ** (1.0 - 2.0 / q)
        * max(spec.first_a.lambda1, spec.first_b.lambda1)
    )


def eigenfunction_pair_energy(
    a: WeightProfile,
    b: WeightProfile,
    lam: float,
    grid: RadialGrid,
    spec: WeightedSpectrum | None = None,
) -> float:
    """Energy of the q-normalized eigenfunction pair at coupling lam.

    Contract: once lam reaches the coupling threshold the returned value is
    nonpositive up to discretization tolerance.  Below the threshold the
    call raises (informative, not fatal): the certificate does not apply.
    """
    from .energy import FieldPair, energy  # local import to avoid cycles

    if spec is None:
        spec = lambda_tilde(a, b, grid)
    thr = coupling_threshold(spec, grid)
    if lam < thr * (1.0 - 1e-12):
        raise ThresholdNotReached(
            f"coupling {lam} below the eigenfunction-pair threshold {thr}",
            threshold=thr,
        )
    pair = FieldPair(u=spec.first_a.eigenfunction, v=spec.first_b.eigenfunction,
                     lam=lam)
    return energy(pair, a, b, lam, grid).value
