"""Scenario configuration, orchestration, and CSV/plot emission.

A scenario is described by a flat-sectioned key/value config document
([domain], [weights.a], [weights.b], [flow], [sweep], [output]) with a
`schema = 1` version key.  Running a scenario executes the requested
analyses in dependency order — closed-form constants, first eigenpairs,
the coupling sweep of the descent flow, concentration-curve fits, the
scaling-quotient estimate, and dilation-identity reports for every
converged coupling — and emits one CSV per analysis plus optional SVG
plots.  Outputs are deterministic for a fixed (config, seed); the only
non-reproducible byte is the timestamp comment above each CSV header.
"""

from __future__ import annotations

import configparser
import hashlib
import io
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import (default_eps_ladder, energy_curve,
                          expansion_prediction, fit_expansion)
from .constants import bubble_constants, slope_factor, thresholds
from .errors import (ConfigError, EmptyReport, IoError, LogScaledRegime,
                     OutsideTable, UnderResolvedBubble)
from .grid import RadialGrid, build_grid
from .minimizer import FlowParams, existence_verdict, sweep_minimize
from .nonexistence import omega_estimate, pohozaev_report
from .spectral import lambda_tilde
from .weights import WeightProfile

ANALYSES = ("constants", "eig", "minimize", "asymptotics", "pohozaev", "omega")
SCHEMA_VERSION = 1

_DOMAIN_KEYS = {"schema", "dimension", "radius", "cells", "grading", "ratio", "mode"}
_WEIGHT_KEYS = {"gamma0", "exponent", "coefficient",
                "perturbation_r", "perturbation_theta"}
_FLOW_KEYS = {"step", "max_iters", "grad_tol", "stall_window", "init",
              "init_eps", "seed"}
_SWEEP_KEYS = {"lambdas", "start", "stop", "step"}
_OUTPUT_KEYS = {"directory", "analyses", "plots"}


@dataclass(frozen=True)
class Scenario:
    dimension: int
    radius: float
    cells: int
    grading: str
    grading_ratio: float | None
    mode: str                       # theorem | machinery
    weight_a: WeightProfile
    weight_b: WeightProfile
    lambdas: tuple
    flow: FlowParams
    out_dir: str
    analyses: tuple
    plots: bool

    def __post_init__(self):
        lo = 4 if self.mode == "theorem" else 2
        if not lo <= self.dimension <= 8:
            raise ConfigError(
                f"dimension {self.dimension} outside [{lo}, 8] for {self.mode} mode"
            )
        if self.weight_a.gamma0 != self.weight_b.gamma0:
            raise ConfigError(
                "the two weights must share the same center value gamma0"
            )
        bad = [x for x in self.analyses if x not in ANALYSES]
        if bad:
            raise ConfigError(f"unknown analyses {bad}")

    def build_grid(self) -> RadialGrid:
        return build_grid(self.dimension, self.radius, self.cells,
                          grading=self.grading, ratio=self.grading_ratio)


# ---------------------------------------------------------------------------
# config parsing and serialization
# ---------------------------------------------------------------------------


def _check_keys(parser, section: str, allowed: set):
    if not parser.has_section(section):
        return
    for key in parser[section]:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in section [{section}]")


def _parse_weight(parser, section: str) -> WeightProfile:
    if not parser.has_section(section):
        raise ConfigError(f"missing section [{section}]")
    _check_keys(parser, section, _WEIGHT_KEYS)
    sec = parser[section]
    try:
        gamma0 = sec.getfloat("gamma0")
        exponent = sec.getfloat("exponent", fallback=2.0)
        coefficient = sec.getfloat("coefficient", fallback=0.0)
    except ValueError as exc:
        raise ConfigError(f"bad numeric value in [{section}]: {exc}") from exc
    if gamma0 is None:
        raise ConfigError(f"missing key 'gamma0' in section [{section}]")
    perturbation = None
    if "perturbation_r" in sec or "perturbation_theta" in sec:
        if "perturbation_r" not in sec or "perturbation_theta" not in sec:
            raise ConfigError(
                f"[{section}] needs both perturbation_r and perturbation_theta"
            )
        r_tab = tuple(float(x) for x in sec["perturbation_r"].split())
        t_tab = tuple(float(x) for x in sec["perturbation_theta"].split())
        if len(r_tab) != len(t_tab):
            raise ConfigError(f"perturbation tables in [{section}] differ in length")
        perturbation = (r_tab, t_tab)
    return WeightProfile(gamma0=gamma0, exponent=exponent,
                         coefficient=coefficient, perturbation=perturbation)


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a config document; defaults are filled in."""
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    for section in parser.sections():
        if section not in ("domain", "weights.a", "weights.b", "flow",
                           "sweep", "output"):
            raise ConfigError(f"unknown section [{section}]")
    if not parser.has_section("domain"):
        raise ConfigError("missing section [domain]")
    _check_keys(parser, "domain", _DOMAIN_KEYS)
    _check_keys(parser, "flow", _FLOW_KEYS)
    _check_keys(parser, "sweep", _SWEEP_KEYS)
    _check_keys(parser, "output", _OUTPUT_KEYS)

    dom = parser["domain"]
    schema = dom.getint("schema", fallback=SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {schema}")
    dimension = dom.getint("dimension")
    if dimension is None:
        raise ConfigError("missing key 'dimension' in section [domain]")
    radius = dom.getfloat("radius", fallback=1.0)
    cells = dom.getint("cells", fallback=2000)
    grading = dom.get("grading", fallback="uniform")
    ratio = dom.getfloat("ratio", fallback=None)
    mode = dom.get("mode", fallback="theorem")
    if mode not in ("theorem", "machinery"):
        raise ConfigError(f"unknown mode {mode!r}")

    weight_a = _parse_weight(parser, "weights.a")
    weight_b = _parse_weight(parser, "weights.b")

    flow = FlowParams()
    if parser.has_section("flow"):
        sec = parser["flow"]
        flow = FlowParams(
            step=sec.getfloat("step", fallback=flow.step),
            max_iters=sec.getint("max_iters", fallback=flow.max_iters),
            grad_tol=sec.getfloat("grad_tol", fallback=flow.grad_tol),
            stall_window=sec.getint("stall_window", fallback=flow.stall_window),
            init=sec.get("init", fallback=flow.init),
            init_eps=sec.getfloat("init_eps", fallback=None),
            seed=sec.getint("seed", fallback=flow.seed),
        )

    lambdas: tuple = ()
    if parser.has_section("sweep"):
        sec = parser["sweep"]
        if "lambdas" in sec:
            if "start" in sec or "stop" in sec or "step" in sec:
                raise ConfigError("[sweep] takes either 'lambdas' or a range, not both")
            lambdas = tuple(float(x) for x in sec["lambdas"].split())
        elif "start" in sec:
            start = sec.getfloat("start")
            stop = sec.getfloat("stop")
            step = sec.getfloat("step")
            if stop is None or step is None or step <= 0.0:
                raise ConfigError("[sweep] range needs start, stop, and positive step")
            count = int(math.floor((stop - start) / step + 1e-12)) + 1
            lambdas = tuple(start + i * step for i in range(max(count, 0)))

    out_dir = "out"
    analyses = ANALYSES
    plots = False
    if parser.has_section("output"):
        sec = parser["output"]
        out_dir = sec.get("directory", fallback=out_dir)
        if "analyses" in sec:
            analyses = tuple(sec["analyses"].split())
        plots = sec.getboolean("plots", fallback=False)

    return Scenario(
        dimension=dimension, radius=radius, cells=cells, grading=grading,
        grading_ratio=ratio, mode=mode, weight_a=weight_a, weight_b=weight_b,
        lambdas=lambdas, flow=flow, out_dir=out_dir, analyses=analyses,
        plots=plots,
    )


def serialize_scenario(s: Scenario) -> str:
    """Config text that parses back to an identical Scenario."""
    parser = configparser.ConfigParser()
    parser["domain"] = {
        "schema": str(SCHEMA_VERSION),
        "dimension": str(s.dimension),
        "radius": repr(s.radius),
        "cells": str(s.cells),
        "grading": s.grading,
        "mode": s.mode,
    }
    if s.grading_ratio is not None:
        parser["domain"]["ratio"] = repr(s.grading_ratio)
    for name, w in (("weights.a", s.weight_a), ("weights.b", s.weight_b)):
        parser[name] = {
            "gamma0": repr(w.gamma0),
            "exponent": repr(w.exponent),
            "coefficient": repr(w.coefficient),
        }
        if w.perturbation is not None:
            r_tab, t_tab = w.perturbation
            parser[name]["perturbation_r"] = " ".join(repr(x) for x in r_tab)
            parser[name]["perturbation_theta"] = " ".join(repr(x) for x in t_tab)
    f = s.flow
    parser["flow"] = {
        "step": repr(f.step),
        "max_iters": str(f.max_iters),
        "grad_tol": repr(f.grad_tol),
        "stall_window": str(f.stall_window),
        "init": f.init,
        "seed": str(f.seed),
    }
    if f.init_eps is not None:
        parser["flow"]["init_eps"] = repr(f.init_eps)
    parser["sweep"] = {"lambdas": " ".join(repr(x) for x in s.lambdas)}
    parser["output"] = {
        "directory": s.out_dir,
        "analyses": " ".join(s.analyses),
        "plots": str(s.plots).lower(),
    }
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunReport:
    scenario: Scenario
    provenance: dict
    constants_rows: list
    eig_rows: list
    minimize_rows: list
    asymptotics_rows: list
    omega_rows: list
    pohozaev_rows: list
    failures: list
    minimize_results: dict          # lam -> MinimizeResult, for callers


def _exponent_regime(w: WeightProfile) -> tuple[float, float]:
    """(effective exponent, coefficient); a constant weight has no growth
    and behaves like an arbitrarily large exponent."""
    if w.coefficient == 0.0:
        return math.inf, 0.0
    return w.exponent, w.coefficient


def run(scenario: Scenario, jobs: int = 1) -> RunReport:
    """Execute the requested analyses in dependency order."""
    grid = scenario.build_grid()
    a, b = scenario.weight_a, scenario.weight_b
    k, a_k = _exponent_regime(a)
    l, b_l = _exponent_regime(b)
    wanted = set(scenario.analyses)
    failures: list[str] = []

    constants_rows = []
    if "constants" in wanted:
        const = bubble_constants(scenario.dimension)
        try:
            k3 = const.k3
        except LogScaledRegime:
            k3 = float("nan")
        thr = thresholds(scenario.dimension,
                         a_k if k == 2 else 0.0, b_l if l == 2 else 0.0)
        constants_rows.append({
            "dimension": scenario.dimension,
            "k1": const.k1, "k2": const.k2, "k3": k3,
            "sobolev_s": const.s, "sphere_area": const.sigma,
            "slope_factor": slope_factor(scenario.dimension),
            "threshold_both": thr.gamma_n,
            "threshold_first": thr.gamma_tilde_a,
            "threshold_second": thr.gamma_tilde_b,
        })

    # eigenpairs are needed by minimize verdicts even when not requested
    need_eig = bool({"eig", "minimize", "pohozaev"} & wanted)
    spec = lambda_tilde(a, b, grid) if need_eig else None
    eig_rows = []
    if "eig" in wanted:
        eig_rows.append({
            "lambda_tilde": spec.value,
            "lambda1_a": spec.first_a.lambda1,
            "lambda1_b": spec.first_b.lambda1,
            "iterations_a": spec.first_a.iterations,
            "iterations_b": spec.first_b.iterations,
            "residual_a": spec.first_a.residual,
            "residual_b": spec.first_b.residual,
        })

    omega_rows = []
    omega_value = None
    omega_certified = None        # only a certified lower bound may rule out
    #                               minimizers; the radial estimate is an
    #                               upper estimate of the quotient infimum
    if "omega" in wanted:
        est = omega_estimate(a, b, grid)
        omega_value = est.value
        if est.unbounded_below:
            omega_certified = -math.inf
        elif est.lower_bound is not None:
            omega_certified = est.lower_bound
        omega_rows.append({
            "value": est.value,
            "unbounded_below": est.unbounded_below,
            "lower_bound": math.nan if est.lower_bound is None else est.lower_bound,
            "upper_bound": math.nan if est.upper_bound is None else est.upper_bound,
            "family_points": 0 if est.family_values is None else len(est.family_values),
        })

    minimize_rows = []
    results: dict = {}
    if "minimize" in wanted and scenario.lambdas:
        rows = sweep_minimize(scenario.lambdas, a, b, grid,
                              scenario.flow, jobs=jobs)
        for row in rows:
            res = row.result
            results[row.lam] = res
            try:
                verdict = existence_verdict(
                    scenario.dimension, k, l, a_k, b_l, row.lam,
                    spec.value, omega_estimate=omega_certified,
                )
                case_id, verdict_name = verdict.case_id, verdict.verdict
                gap_thr = verdict.thresholds_used["gap_threshold"]
            except OutsideTable:
                case_id, verdict_name, gap_thr = "outside", "outside_theory", None
            minimize_rows.append({
                "lambda": row.lam,
                "q_lambda": res.q_lambda,
                "status": res.status,
                "iterations": res.iterations,
                "el_residual": res.el_residual,
                "multiplier_u": res.multiplier_u,
                "multiplier_v": res.multiplier_v,
                "concentration": res.concentration,
                "case_id": case_id,
                "verdict": verdict_name,
                "lambda_tilde": spec.value,
                "gap_threshold": math.nan if gap_thr is None else gap_thr,
                "omega": math.nan if omega_value is None else omega_value,
            })

    asymptotics_rows = []
    if "asymptotics" in wanted and scenario.lambdas:
        cutoff = grid.radius / 2.0
        try:
            ladder = default_eps_ladder(grid, cutoff)
        except UnderResolvedBubble as exc:
            failures.append(f"asymptotics: {exc}")
            ladder = None
        if ladder is not None:
            for lam in scenario.lambdas:
                try:
                    pred = expansion_prediction(
                        scenario.dimension, k, l, a_k, b_l, lam)
                except OutsideTable as exc:
                    asymptotics_rows.append({
                        "lambda": lam, "scale": "outside_table", "power": math.nan,
                        "predicted_coeff": math.nan, "fitted_coeff": math.nan,
                        "intercept": math.nan, "r_squared": math.nan,
                        "regime": str(exc),
                    })
                    continue
                curve = energy_curve(lam, a, b, ladder, grid, cutoff)
                fit = fit_expansion(curve, pred.scale, pred.power, pred.regime)
                asymptotics_rows.append({
                    "lambda": lam, "scale": pred.scale, "power": pred.power,
                    "predicted_coeff": math.nan if pred.coeff is None else pred.coeff,
                    "fitted_coeff": fit.leading_coeff,
                    "intercept": fit.intercept, "r_squared": fit.r_squared,
                    "regime": pred.regime,
                })

    pohozaev_rows = []
    if "pohozaev" in wanted:
        for lam, res in sorted(results.items()):
            if res.status != "converged":
                continue
            rep = pohozaev_report(res.pair, res.multiplier_u, res.multiplier_v,
                                  lam, a, b, grid)
            pohozaev_rows.append({
                "lambda": lam,
                "coupling_term": rep.coupling_term,
                "interior_a": rep.interior_a,
                "interior_b": rep.interior_b,
                "boundary_a": rep.boundary_a,
                "boundary_b": rep.boundary_b,
                "residual": rep.residual,
            })

    provenance = {
        "config_sha256": hashlib.sha256(
            serialize_scenario(scenario).encode()).hexdigest(),
        "cells": scenario.cells,
        "grading": scenario.grading,
        "version": __version__,
    }
    return RunReport(
        scenario=scenario, provenance=provenance,
        constants_rows=constants_rows, eig_rows=eig_rows,
        minimize_rows=minimize_rows, asymptotics_rows=asymptotics_rows,
        omega_rows=omega_rows, pohozaev_rows=pohozaev_rows,
        failures=failures, minimize_results=results,
    )


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------


def _format_value(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def emit_csv(rows: list, path, timestamp: bool = True) -> None:
    """Write rows (dicts sharing a key order) with 17-significant-digit,
    locale-independent numbers.  The only non-deterministic byte is the
    optional timestamp comment above the header."""
    if not rows:
        raise EmptyReport(f"no rows to write to {path}")
    header = list(rows[0].keys())
    lines = []
    if timestamp:
        lines.append(f"# generated {datetime.now(timezone.utc).isoformat()}")
    lines.append(",".join(header))
    for row in rows:
        if list(row.keys()) != header:
            raise EmptyReport("rows disagree on columns")
        lines.append(",".join(_format_value(row[k]) for k in header))
    try:
        Path(path).write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def emit_plot(series: list, path, xlabel: str, ylabel: str,
              verticals: dict | None = None) -> None:
    """Self-contained SVG line chart; series is a list of
    (label, x array, y array)."""
    try:
        import matplotlib
        matplotlib.use("svg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise IoError(f"plot emission needs matplotlib: {exc}") from exc
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, x, y in series:
        ax.plot(x, y, marker="o", markersize=3, label=label)
    if verticals:
        for label, x0 in verticals.items():
            ax.axvline(x0, linestyle="--", linewidth=1.0, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    fig.tight_layout()
    try:
        fig.savefig(path, format="svg")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    finally:
        plt.close(fig)


def write_report(report: RunReport, out_dir=None, plots: bool | None = None) -> list:
    """Write one CSV per populated analysis (plus provenance); returns the
    written paths."""
    out = Path(out_dir if out_dir is not None else report.scenario.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {out}: {exc}") from exc
    if plots is None:
        plots = report.scenario.plots
    written = []
    tables = {
        "constants": report.constants_rows,
        "eig": report.eig_rows,
        "minimize": report.minimize_rows,
        "asymptotics": report.asymptotics_rows,
        "omega": report.omega_rows,
        "pohozaev": report.pohozaev_rows,
    }
    for name, rows in tables.items():
        if rows:
            path = out / f"{name}.csv"
            emit_csv(rows, path)
            written.append(path)
    prow = dict(report.provenance)
    emit_csv([prow], out / "provenance.csv", timestamp=False)
    written.append(out / "provenance.csv")

    if plots and report.minimize_rows:
        lams = np.array([r["lambda"] for r in report.minimize_rows])
        qs = np.array([r["q_lambda"] for r in report.minimize_rows])
        verticals = {}
        gap = report.minimize_rows[0]["gap_threshold"]
        if math.isfinite(gap):
            verticals["gap threshold"] = gap
        verticals["lambda_tilde"] = report.minimize_rows[0]["lambda_tilde"]
        path = out / "minimize.svg"
        emit_plot([("Q(lambda)", lams, qs)], path,
                  xlabel="lambda", ylabel="Q", verticals=verticals)
        written.append(path)
    if plots and report.asymptotics_rows:
        pass  # per-lambda curves are summarized in the CSV
    return written
