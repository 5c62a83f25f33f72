"""Estimation of the coupled infimum by a normalized descent flow.

The flow keeps both components on the unit critical-norm sphere: each
iteration takes a gradient step of the normalized energy simultaneously
in u and v (simultaneous rather than alternating so that a symmetric
configuration with equal weights stays exactly symmetric), renormalizes,
and backtracks on the joint energy.  The raw gradient is preconditioned
with the weighted stiffness operator; an unpreconditioned explicit step
would be CFL-limited by the smallest cell of a graded grid.

Stationary points of the discrete flow solve the discrete coupled system

    -div(a grad u) - lam v = L1 |u|^(q-2) u,
    -div(b grad v) - lam u = L2 |v|^(q-2) v,

with the multipliers L1 = int a|grad u|^2 - lam int uv (and the v-analog),
so the flow's convergence test and the system residual are the same norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL
from .constants import thresholds
from .energy import (FieldPair, critical_exponent, dirichlet_field, energy,
                     lq_norm, weighted_gradient_energy)
from .errors import BadSpectrum, DegeneratePair, NumericFault
from .grid import RadialGrid, integrate
from .spectral import TridiagonalOperator, assemble_operator, first_eigenpair
from .weights import WeightProfile


@dataclass(frozen=True)
class FlowParams:
    step: float = 0.5
    max_iters: int = 3000
    grad_tol: float = 1e-6
    stall_window: int = 250
    init: str = "bubble"            # bubble | eigenfunction | random | custom
    init_eps: float | None = None   # bubble width; default radius^2 / 100
    seed: int = 0
    init_pair: FieldPair | None = None
    conc_delta_fraction: float = 0.1   # delta = R / 10
    conc_mass_threshold: float = 0.99
    conc_sup_factor: float = 1e2

    def __post_init__(self):
        if self.step <= 0.0 or self.grad_tol <= 0.0:
            raise ValueError("step and grad_tol must be positive")


@dataclass(frozen=True)
class MinimizeResult:
    pair: FieldPair            # best pair seen, q-normalized components
    q_lambda: float            # lowest energy seen
    multiplier_u: float
    multiplier_v: float
    el_residual: float
    concentration: float
    status: str                # converged | concentrating | stalled
    iterations: int
    best_trace: np.ndarray = field(repr=False, default=None)


def sign_normalize(pair: FieldPair) -> FieldPair:
    """(|u|, |v|); never increases the energy for nonnegative coupling."""
    return pair.with_fields(np.abs(pair.u), np.abs(pair.v), bump_generation=False)


def concentration_diagnostic(u: np.ndarray, delta: float, grid: RadialGrid) -> float:
    """Fraction of the critical-norm mass inside radius delta."""
    if not 0.0 < delta < grid.radius:
        raise ValueError("need 0 < delta < R")
    q = critical_exponent(grid.dimension)
    dens = grid.masses * np.abs(u) ** q
    total = float(np.sum(dens))
    if total == 0.0:
        return 0.0
    return float(np.sum(dens[grid.nodes <= delta]) / total)


def lagrange_multipliers(
    pair: FieldPair,
    a: WeightProfile,
    b: WeightProfile,
    lam: float,
    grid: RadialGrid,
) -> tuple[float, float]:
    """Multipliers of the two unit-norm constraints for a normalized pair."""
    coupling = lam * integrate(pair.u * pair.v, grid)
    l1 = weighted_gradient_energy(pair.u, a, grid) - coupling
    l2 = weighted_gradient_energy(pair.v, b, grid) - coupling
    return l1, l2


def el_residual(
    pair: FieldPair,
    l1: float,
    l2: float,
    a: WeightProfile,
    b: WeightProfile,
    lam: float,
    grid: RadialGrid,
    ops: tuple[TridiagonalOperator, TridiagonalOperator] | None = None,
) -> float:
    """Discrete L2 norm of both coupled-system residuals, summed."""
    if not (np.any(pair.u) or np.any(pair.v)):
        return 0.0
    if ops is None:
        ops = (assemble_operator(a, grid), assemble_operator(b, grid))
    op_a, op_b = ops
    q = critical_exponent(grid.dimension)
    m = grid.masses[1:-1]
    u, v = pair.u[1:-1], pair.v[1:-1]
    ru = op_a.apply(u) / m - lam * v - l1 * np.abs(u) ** (q - 2.0) * u
    rv = op_b.apply(v) / m - lam * u - l2 * np.abs(v) ** (q - 2.0) * v
    return float(np.sqrt(np.dot(m, ru * ru) + np.dot(m, rv * rv)))


# ---------------------------------------------------------------------------
# descent flow
# ---------------------------------------------------------------------------


def _normalize(u: np.ndarray, grid: RadialGrid) -> np.ndarray:
    n = lq_norm(u, grid)
    if n == 0.0 or not np.isfinite(n):
        raise DegeneratePair("flow component collapsed to zero")
    return u / n


def _smooth_random_field(grid: RadialGrid, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    r = grid.nodes
    modes = np.arange(1, 9)
    coeffs = rng.standard_normal(modes.size) / modes
    u = np.zeros_like(r)
    for j, c in zip(modes, coeffs):
        u += c * np.sin(j * np.pi * r / grid.radius)
    u[-1] = 0.0
    return u


def _initial_pair(a: WeightProfile, b: WeightProfile, grid: RadialGrid,
                  params: FlowParams) -> FieldPair:
    from .asymptotics import BubbleParams, bubble_field  # deferred, no cycle at import

    if params.init == "custom":
        if params.init_pair is None:
            raise ValueError("custom init requires init_pair")
        return params.init_pair
    if params.init == "bubble":
        eps = params.init_eps if params.init_eps is not None else grid.radius ** 2 / 100.0
        u = bubble_field(BubbleParams(epsilon=eps, cutoff_radius=grid.radius / 2.0), grid)
        return FieldPair(u=u, v=u.copy())
    if params.init == "eigenfunction":
        ua = first_eigenpair(a, grid).eigenfunction
        ub = first_eigenpair(b, grid).eigenfunction
        return FieldPair(u=ua, v=ub)
    if params.init == "random":
        u = _smooth_random_field(grid, params.seed)
        v = _smooth_random_field(grid, params.seed + 1)
        return FieldPair(u=u, v=v)
    raise ValueError(f"unknown init {params.init!r}")


def descend(
    a: WeightProfile,
    b: WeightProfile,
    lam: float,
    grid: RadialGrid,
    params: FlowParams = FlowParams(),
    init_pair: FieldPair | None = None,
) -> MinimizeResult:
    """Minimize the normalized coupled energy at coupling lam.

    Terminates on the gradient tolerance, on the concentration detector
    (mass collapse onto the center with unbounded amplitude), on a stall,
    or on the iteration cap.  The reported value is the lowest energy seen.
    """
    if init_pair is None:
        init_pair = _initial_pair(a, b, grid, params)
    op_a = assemble_operator(a, grid)
    op_b = assemble_operator(b, grid)
    m = grid.masses
    m_dof = m[1:-1]
    q = critical_exponent(grid.dimension)
    delta = params.conc_delta_fraction * grid.radius

    u = _normalize(dirichlet_field(init_pair.u, grid), grid)
    v = _normalize(dirichlet_field(init_pair.v, grid), grid)
    sup0 = max(np.max(np.abs(u)), np.max(np.abs(v)))

    def total_energy(uu, vv):
        ga = weighted_gradient_energy(uu, a, grid)
        gb = weighted_gradient_energy(vv, b, grid)
        p = integrate(uu * vv, grid)
        return 0.5 * ga + 0.5 * gb - lam * p, ga, gb, p

    e_now, ga, gb, p = total_energy(u, v)
    best_e, best_u, best_v = e_now, u.copy(), v.copy()
    trace = [best_e]
    tau = params.step
    status = "stalled"
    residual = np.inf
    last_improve = 0
    it = 0

    for it in range(1, params.max_iters + 1):
        l1 = ga - lam * p
        l2 = gb - lam * p
        gu = m_dof * np.abs(u[1:-1]) ** (q - 2.0) * u[1:-1]
        gv = m_dof * np.abs(v[1:-1]) ** (q - 2.0) * v[1:-1]
        du = op_a.apply(u[1:-1]) - lam * m_dof * v[1:-1] - l1 * gu
        dv = op_b.apply(v[1:-1]) - lam * m_dof * u[1:-1] - l2 * gv
        residual = float(np.sqrt(np.dot(du * du, 1.0 / m_dof)
                                 + np.dot(dv * dv, 1.0 / m_dof)))
        if residual <= params.grad_tol:
            status = "converged"
            if e_now <= best_e + 1e-12 * abs(best_e):
                best_e, best_u, best_v = e_now, u.copy(), v.copy()
            break

        su = op_a.solve(du)
        sv = op_b.solve(dv)
        accepted = False
        for _ in range(40):
            u_try = u.copy()
            v_try = v.copy()
            u_try[1:-1] -= tau * su
            v_try[1:-1] -= tau * sv
            u_try[0] = u_try[1]
            v_try[0] = v_try[1]
            try:
                u_try = _normalize(u_try, grid)
                v_try = _normalize(v_try, grid)
                e_try, ga_t, gb_t, p_t = total_energy(u_try, v_try)
            except (DegeneratePair, FloatingPointError):
                tau *= 0.5
                continue
            if not np.isfinite(e_try):
                raise NumericFault("non-finite energy during descent")
            if e_try <= e_now + 1e-14 * abs(e_now):
                accepted = True
                break
            tau *= 0.5
        if not accepted:
            status = "stalled"
            break
        u, v, e_now, ga, gb, p = u_try, v_try, e_try, ga_t, gb_t, p_t
        tau = min(tau * 1.3, params.step)

        if e_now < best_e - 1e-14 * abs(best_e):
            best_e, best_u, best_v = e_now, u.copy(), v.copy()
            last_improve = it
        trace.append(best_e)

        if it % 10 == 0:
            conc = concentration_diagnostic(u, delta, grid)
            sup = max(np.max(np.abs(u)), np.max(np.abs(v)))
            if conc > params.conc_mass_threshold and sup > params.conc_sup_factor * sup0:
                status = "concentrating"
                break
        if it - last_improve > params.stall_window:
            status = "stalled"
            break
    else:
        status = "stalled"

    best = FieldPair(u=best_u, v=best_v, lam=lam, generation=it)
    if lam > 0.0:
        best = sign_normalize(best)
        best = best.with_fields(_normalize(best.u, grid), _normalize(best.v, grid),
                                bump_generation=False)
    report = energy(best, a, b, lam, grid)
    l1, l2 = lagrange_multipliers(best, a, b, lam, grid)
    res = el_residual(best, l1, l2, a, b, lam, grid, ops=(op_a, op_b))
    return MinimizeResult(
        pair=best,
        q_lambda=report.value,
        multiplier_u=l1,
        multiplier_v=l2,
        el_residual=res,
        concentration=concentration_diagnostic(best.u, delta, grid),
        status=status,
        iterations=it,
        best_trace=np.asarray(trace),
    )


def discrete_sobolev_constant(grid: RadialGrid,
                              params: FlowParams = FlowParams()) -> float:
    """Minimum of the discrete unweighted gradient quotient on this grid.

    Obtained from the decoupled flow (unit weights, zero coupling) with a
    symmetric start, whose energy is exactly the single-field quotient.
    """
    one = WeightProfile.constant(1.0)
    return descend(one, one, 0.0, grid, params).q_lambda


# ---------------------------------------------------------------------------
# coupling sweeps with a shared candidate pool
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    lam: float
    result: MinimizeResult


def sweep_minimize(
    lams,
    a: WeightProfile,
    b: WeightProfile,
    grid: RadialGrid,
    params: FlowParams = FlowParams(),
    jobs: int = 1,
) -> list[SweepRow]:
    """Run the flow for each coupling and cross-evaluate the found pairs.

    Every pair discovered anywhere in the sweep is an admissible candidate
    at every coupling; the reported value per coupling is the minimum over
    the pool.  With sign-normalized candidates the per-candidate energy is
    affine and nonincreasing in the coupling, so the pooled estimate is
    monotone by construction.

    With jobs > 1 the couplings run on a worker pool (each flow starting
    cold); sequentially each flow warm-starts from the previous pair.
    """
    lams = [float(x) for x in lams]
    flows: dict[float, MinimizeResult] = {}
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {lam: pool.submit(descend, a, b, lam, grid, params)
                       for lam in sorted(set(lams))}
            flows = {lam: fut.result() for lam, fut in futures.items()}
    else:
        warm = None
        for lam in sorted(set(lams)):
            res = descend(a, b, lam, grid, params, init_pair=warm)
            flows[lam] = res
            warm = res.pair

    # candidate pool: (grad_a_raw, grad_b_raw, coupling_raw) per pair
    pool = []
    for res in flows.values():
        pr = sign_normalize(res.pair)
        ga = 0.5 * weighted_gradient_energy(pr.u, a, grid)
        gb = 0.5 * weighted_gradient_energy(pr.v, b, grid)
        c = integrate(pr.u * pr.v, grid)
        pool.append((ga, gb, c, pr))

    rows = []
    for lam in lams:
        flow = flows[lam]
        vals = [ga + gb - lam * c for ga, gb, c, _ in pool]
        j = int(np.argmin(vals))
        if vals[j] < flow.q_lambda:
            _, _, _, pr = pool[j]
            pr = pr.with_fields(pr.u, pr.v, bump_generation=False)
            l1, l2 = lagrange_multipliers(pr, a, b, lam, grid)
            res = MinimizeResult(
                pair=pr,
                q_lambda=vals[j],
                multiplier_u=l1,
                multiplier_v=l2,
                el_residual=el_residual(pr, l1, l2, a, b, lam, grid),
                concentration=flow.concentration,
                status=flow.status,
                iterations=flow.iterations,
                best_trace=flow.best_trace,
            )
        else:
            res = flow
        rows.append(SweepRow(lam=lam, result=res))
    return rows


# ---------------------------------------------------------------------------
# classification against the existence / non-existence case table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExistenceVerdict:
    case_id: str
    verdict: str               # achieved_by_theorem | energy_gap_only |
    #                            no_minimizer_by_theorem | outside_theory
    thresholds_used: dict


def _gap_threshold(dim, k, l, a_k, b_l):
    """Coupling above which the concentration-test energy certifies a gap
    below gamma0 * S; None where the case table gives no such threshold."""
    if k > 2 and l > 2:
        return 0.0, "gap.supercritical-powers"
    if k < 2 or l < 2:
        return None, None
    thr = thresholds(dim, a_k if k == 2 else 0.0, b_l if l == 2 else 0.0)
    if k == 2 and l == 2:
        return thr.gamma_n, "gap.quadratic-both"
    if k == 2:
        return thr.gamma_tilde_a, "gap.quadratic-first"
    return thr.gamma_tilde_b, "gap.quadratic-second"


def existence_verdict(
    dim: int,
    k: float,
    l: float,
    a_k: float,
    b_l: float,
    lam: float,
    lam_tilde: float,
    omega_estimate: float | None = None,
) -> ExistenceVerdict:
    """Pure case dispatch of one parameter point against the case table.

    omega_estimate, when given, must be a certified lower bound on the
    quotient infimum (couplings at or below it admit no minimizer); an
    upper estimate here would over-claim non-existence.
    """
    if lam_tilde <= 0.0 or not np.isfinite(lam_tilde):
        raise BadSpectrum(f"first eigenvalue must be positive, got {lam_tilde}")
    gap_thr, gap_case = _gap_threshold(dim, k, l, a_k, b_l)
    used = {
        "lambda_tilde": lam_tilde,
        "gap_threshold": gap_thr,
        "omega": omega_estimate,
    }

    if omega_estimate is not None and lam <= omega_estimate:
        return ExistenceVerdict("nonexistence.coupling-below-omega",
                                "no_minimizer_by_theorem", used)

    achieved = None
    if k > 2 and l > 2 and 0.0 < lam < lam_tilde:
        achieved = "existence.supercritical-powers"
    elif dim >= 5 and k == 2 and l == 2 and gap_thr < lam < lam_tilde:
        achieved = "existence.quadratic-both"
    elif dim >= 5 and k == 2 and l > 2 and gap_thr < lam < lam_tilde:
        achieved = "existence.quadratic-first"
    elif dim >= 5 and k > 2 and l == 2 and gap_thr < lam < lam_tilde:
        achieved = "existence.quadratic-second"
    if achieved is not None:
        return ExistenceVerdict(achieved, "achieved_by_theorem", used)

    if gap_thr is not None and lam > gap_thr:
        return ExistenceVerdict(gap_case, "energy_gap_only", used)
    return ExistenceVerdict("outside", "outside_theory", used)
