"""
Command-line driver.

Every command writes its numeric result as CSV (stdout or --out) and a JSON
diagnostics block (stderr or --diagnostics) with the keys command, params,
max_residual and verdict. Exit codes: 0 success, 1 tolerance failure, 2 bad input.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import click
import numpy as np
import pandas as pd
import simplejson

from config.experiment import ExperimentConfig, load_config
from config.settings import get_float_format, get_log_level
from modules import catalog
from modules.errors import GreenKernelError, InputError
from modules.functions import as_points
from modules.hilbert import b_gram, check_membership, membership_kernels, orthonormalize
from modules.interp import convergence_study, fit, read_sites_csv
from modules.kernels import gram, pd_check, verify_reproducing
from modules.spectral import (
    eta_boundary_data,
    kernel_side_residual,
    mercer_compare,
    onb_check,
    operator_side_residual,
)
from modules.tps2d import CorrectorProblem, TpsGreenKernel, reference_linear_basis, solve_corrector

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_TOLERANCE, EXIT_INPUT = 0, 1, 2


@dataclass
class Report:
    table: pd.DataFrame
    max_residual: float
    verdict: str
    passed: bool = True
    details: dict = field(default_factory=dict)


def _tolerance(config: ExperimentConfig, default: float) -> float:
    return default if config.tolerance is None else config.tolerance


def _pass_fail(max_residual: float, tol: float) -> tuple:
    passed = bool(max_residual <= tol)
    return ("pass" if passed else "fail"), passed


def _kernel_eval(config: ExperimentConfig) -> Report:
    k = catalog.get_kernel(config.kernel, config.sigma, config.n)
    points = as_points(np.array(config.points), k.domain.dim)
    matrix = gram(k, points)
    verdict = pd_check(matrix)
    table = pd.DataFrame(matrix, columns=[f"k{j}" for j in range(len(points))])
    asymmetry = float(np.max(np.abs(k(points, points) - k(points, points).T)))
    return Report(table, asymmetry, verdict.value, details={"kernel": k.name})


def _compose_check(config: ExperimentConfig) -> Report:
    residuals = catalog.composition_residuals(config.family, config.sigma)
    table = pd.DataFrame({"identity": list(residuals), "max_residual": list(residuals.values())})
    worst = max(residuals.values())
    verdict, passed = _pass_fail(worst, _tolerance(config, 1e-10))
    return Report(table, worst, verdict, passed)


def _verify_reproducing(config: ExperimentConfig) -> Report:
    space = catalog.get_space(config.space, config.sigma)
    k = catalog.space_kernel(config.space, config.sigma)
    f = catalog.get_function(config.function)
    ys = [p[0] for p in config.points]
    residuals = [verify_reproducing(space, k, f, y) for y in ys]
    table = pd.DataFrame({"y": ys, "residual": residuals})
    worst = max(residuals)
    verdict, passed = _pass_fail(worst, _tolerance(config, 1e-8))
    return Report(table, worst, verdict, passed, {"kernel": k.name})


def _orthonormalize(config: ExperimentConfig) -> Report:
    space = catalog.get_space(config.space, config.sigma)
    system = space.system
    psis = orthonormalize(system.null_basis, system.B, space.rule)
    sets = {"computed": psis}
    if space.domain.dim == 2:
        sets["reference"] = reference_linear_basis()
    rows, details = [], {}
    for name, functions in sets.items():
        g = b_gram(functions, system.B, space.rule)
        details[f"{name}_deviation"] = float(np.max(np.abs(g - np.eye(len(functions)))))
        rows += [{"set": name, "k": i + 1, "l": j + 1, "gram": g[i, j]}
                 for i in range(len(functions)) for j in range(len(functions))]
    details["coefficients"] = [list(p.coefficients) for p in psis]
    worst = details["computed_deviation"]
    verdict, passed = _pass_fail(worst, _tolerance(config, 1e-10))
    return Report(pd.DataFrame(rows), worst, verdict, passed, details)


def _mercer_compare(config: ExperimentConfig) -> Report:
    _, kernel, pairs = catalog.eigen_family("bridge", 0.0, max(config.truncations))
    rows = mercer_compare(pairs, kernel, config.truncations)
    table = pd.DataFrame(rows, columns=["N", "sup_error"])
    final = rows[-1][1]
    verdict, passed = _pass_fail(final, _tolerance(config, 1e-4))
    return Report(table, final, verdict, passed)


def _eig_check(config: ExperimentConfig) -> Report:
    family = catalog.EIGEN_ALIASES.get(config.family, config.family)
    space, kernel, pairs = catalog.eigen_family(family, config.sigma, config.count)
    rows = []
    for pair in pairs:
        eta, trace = eta_boundary_data(space, pair)
        rows.append({
            "p": pair.index,
            "mu": pair.value,
            "kernel_residual": kernel_side_residual(kernel, pair),
            "operator_residual": operator_side_residual(space.L, pair),
            "boundary_residual": float(np.max(np.abs(eta - trace))),
        })
    table = pd.DataFrame(rows)
    worst = float(table[["kernel_residual", "operator_residual", "boundary_residual"]].max().max())
    onb = onb_check(space, pairs, min(config.onb_n, len(pairs)))
    passed = worst <= _tolerance(config, 1e-6) and onb <= 1e-8
    return Report(table, worst, "pass" if passed else "fail", passed,
                  {"family": family, "onb_deviation": onb})


def _interpolate(config: ExperimentConfig) -> Report:
    k = catalog.get_kernel(config.kernel, config.sigma, config.n)
    if config.sites is None:
        sites = np.arange(1, 9) / 9.0
        values = catalog.get_function(config.function)(sites)
    else:
        sites, values = read_sites_csv(config.sites, k.domain.dim)
    s = fit(k, sites, values)
    axis = np.linspace(0.0, 1.0, config.grid)
    if k.domain.dim == 1:
        table = pd.DataFrame({"x": axis, "s(x)": s(axis)})
    else:
        g1, g2 = np.meshgrid(axis, axis, indexing="ij")
        pts = np.column_stack([g1.ravel(), g2.ravel()])
        table = pd.DataFrame({"x1": pts[:, 0], "x2": pts[:, 1], "s(x)": s(pts)})
    tol = _tolerance(config, 1e-10) * (float(np.max(np.abs(values), initial=0.0)) + 1.0)
    verdict, passed = _pass_fail(s.residual, tol)
    return Report(table, s.residual, verdict, passed, {"sites": int(len(sites))})


def _convergence(config: ExperimentConfig) -> Report:
    k = catalog.get_kernel(config.kernel, config.sigma, config.n)
    f = catalog.get_function(config.function)
    table = convergence_study(k, f, config.site_counts)
    errors = table["sup_error"].to_numpy()
    decreasing = bool(np.all(np.diff(errors) < 0))
    passed = decreasing and errors[-1] <= errors[0] / 10.0
    return Report(table, float(errors[-1]), "pass" if passed else "fail", passed,
                  {"strictly_decreasing": decreasing})


def _tps_corrector(config: ExperimentConfig) -> Report:
    n = config.n
    solution = solve_corrector(CorrectorProblem(n, config.y))
    nodes = solution.nodes
    g1, g2 = np.meshgrid(nodes, nodes, indexing="ij")
    table = pd.DataFrame({"x1": g1.ravel(), "x2": g2.ravel(), "phi_y": solution.values.ravel()})
    # symmetry probe on grid nodes away from y
    G = TpsGreenKernel(n)
    y = np.array([config.y])
    probes = np.round(np.array([[0.25, 0.375], [0.625, 0.75], [0.75, 0.25]]) * n) / n
    forward = G(probes, y)[:, 0]
    backward = np.array([G(y, p.reshape(1, 2))[0, 0] for p in probes])
    details = {
        "normal_mismatch": solution.normal_mismatch,
        "tangential_mismatch": solution.tangential_mismatch,
        "symmetry_discrepancy": float(np.max(np.abs(forward - backward))),
        "green_at_y": float(G(y, y)[0, 0]),
    }
    verdict, passed = _pass_fail(solution.stencil_residual, _tolerance(config, 1e-9))
    return Report(table, solution.stencil_residual, verdict, passed, details)


def _membership(config: ExperimentConfig) -> Report:
    space = catalog.get_space(config.space, config.sigma)
    f = catalog.get_function(config.function)
    report = check_membership(space, f, space.system.null_basis)
    table = pd.DataFrame({"k": np.arange(1, len(report.coefficients) + 1),
                          "coefficient": report.coefficients})
    min_eig = min((float(np.linalg.eigvalsh(psi.gram()).min()) for psi in membership_kernels(space)),
                  default=0.0)
    details = {"in_space": report.in_space, "boundary_kernel_min_eigenvalue": min_eig}
    verdict = "in_space" if report.in_space else "not_in_space"
    return Report(table, report.boundary_residual, verdict, True, details)


COMMANDS: Dict[str, Callable[[ExperimentConfig], Report]] = {
    "kernel-eval": _kernel_eval,
    "compose-check": _compose_check,
    "verify-reproducing": _verify_reproducing,
    "orthonormalize": _orthonormalize,
    "mercer-compare": _mercer_compare,
    "eig-check": _eig_check,
    "interpolate": _interpolate,
    "convergence": _convergence,
    "tps-corrector": _tps_corrector,
    "membership": _membership,
}


def _write_text(path: str, text: str):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"Cannot write {path}: {exc}") from exc


def _write_diagnostics(payload: dict, path: Optional[str]):
    text = simplejson.dumps(payload, ignore_nan=True, sort_keys=True, default=str)
    if path:
        _write_text(path, text + "\n")
    else:
        click.echo(text, err=True)


def _report_error(command: str, payload: dict, config: ExperimentConfig, e: GreenKernelError) -> int:
    logger.error("%s failed: %s", command, e)
    payload.update(verdict="error", error=str(e))
    try:
        _write_diagnostics(payload, config.diagnostics)
    except InputError:
        # diagnostics path itself is unusable
        _write_diagnostics(payload, None)
    click.echo(f"Error: {e}", err=True)
    return EXIT_INPUT


def run(command: str, config: ExperimentConfig) -> int:
    """Run one command and write its artifacts; returns the exit code."""
    payload = {"command": command, "params": config.params(), "max_residual": None, "verdict": "error"}
    try:
        report = COMMANDS[command](config)
        csv = report.table.to_csv(index=False, float_format=get_float_format())
        if config.out:
            _write_text(config.out, csv)
        else:
            click.echo(csv, nl=False)
        max_residual = report.max_residual
        payload.update(
            max_residual=None if max_residual is None or math.isnan(max_residual) else max_residual,
            verdict=report.verdict,
            details=report.details,
        )
        _write_diagnostics(payload, config.diagnostics)
    except GreenKernelError as e:
        return _report_error(command, payload, config, e)

    if not report.passed:
        logger.warning("%s: tolerance check failed (max residual %.3e)", command, max_residual)
        return EXIT_TOLERANCE
    logger.info("%s finished, max residual %.3e", command, max_residual)
    return EXIT_OK


def _points(text: Optional[str]):
    """'0.1;0.5' or '0.25,0.5;0.75,0.5': points split by ';', coordinates by ','."""
    if text is None:
        return None
    try:
        return tuple(tuple(float(c) for c in chunk.split(",")) for chunk in text.split(";") if chunk.strip())
    except ValueError:
        raise click.BadParameter(f"cannot parse points {text!r}")


def _ints(text: Optional[str]):
    if text is None:
        return None
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise click.BadParameter(f"cannot parse integer list {text!r}")


def _invoke(ctx: click.Context, command: str, **flags):
    try:
        config = ctx.obj["config"].override(**flags)
    except GreenKernelError as e:
        base = ctx.obj["config"]
        payload = {"command": command, "params": base.params(), "max_residual": None}
        ctx.exit(_report_error(command, payload, base, e))
    ctx.exit(run(command, config))


@click.group()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="JSON file with ExperimentConfig values; flags override it.")
@click.option("--out", default=None, help="CSV output path (default: stdout).")
@click.option("--diagnostics", default=None, help="JSON diagnostics path (default: stderr).")
@click.option("-v", "--verbose", is_flag=True, help="Log debug messages.")
@click.pass_context
def cli(ctx, config_path, out, diagnostics, verbose):
    """Green kernels, reproducing kernels and their numerical verification."""
    try:
        level = logging.DEBUG if verbose else get_log_level()
        config = load_config(config_path).override(out=out, diagnostics=diagnostics)
    except GreenKernelError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(EXIT_INPUT)
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s: %(message)s")
    ctx.obj = {"config": config}


sigma_option = click.option("--sigma", type=float, default=None, help="Sobolev parameter sigma > 0.")
kernel_option = click.option("--kernel", default=None, help="Kernel name.")
tol_option = click.option("--tolerance", type=float, default=None, help="Override the pass threshold.")


@cli.command("kernel-eval")
@kernel_option
@sigma_option
@click.option("--n", type=int, default=None, help="Grid resolution for tps_G.")
@click.option("--points", default=None, help="Points as '0.2;0.5' or '0.25,0.5;0.75,0.5'.")
@click.pass_context
def kernel_eval(ctx, kernel, sigma, n, points):
    """Gram matrix of a catalog kernel and its positive-definiteness verdict."""
    _invoke(ctx, "kernel-eval", kernel=kernel, sigma=sigma, n=n, points=_points(points))


@cli.command("compose-check")
@click.option("--kernel", "family", default=None, help="Kernel family: min or sobolev.")
@sigma_option
@tol_option
@click.pass_context
def compose_check(ctx, family, sigma, tolerance):
    """Check G + R = K for the min-kernel or Sobolev family."""
    _invoke(ctx, "compose-check", family=family, sigma=sigma, tolerance=tolerance)


@cli.command("verify-reproducing")
@click.option("--space", default=None, help="Space name.")
@click.option("--function", default=None, help="Test function name.")
@sigma_option
@click.option("--points", default=None, help="Evaluation points y, ';'-separated.")
@tol_option
@click.pass_context
def verify_reproducing_cmd(ctx, space, function, sigma, points, tolerance):
    """Residual of the reproducing property at each y."""
    _invoke(ctx, "verify-reproducing", space=space, function=function, sigma=sigma,
            points=_points(points), tolerance=tolerance)


@cli.command("orthonormalize")
@click.option("--space", default=None, help="Space whose null basis is orthonormalized.")
@sigma_option
@tol_option
@click.pass_context
def orthonormalize_cmd(ctx, space, sigma, tolerance):
    """B-orthonormalize the null basis; report Gram matrices."""
    _invoke(ctx, "orthonormalize", space=space, sigma=sigma, tolerance=tolerance)


@cli.command("mercer-compare")
@click.option("--N", "truncations", default=None, help="Comma-separated truncations.")
@tol_option
@click.pass_context
def mercer_compare_cmd(ctx, truncations, tolerance):
    """Sup error of truncated Mercer sums of the Brownian bridge."""
    _invoke(ctx, "mercer-compare", truncations=_ints(truncations), tolerance=tolerance)


@cli.command("eig-check")
@click.option("--family", default=None, help="bridge, sobolev_dirichlet or brownian_motion.")
@sigma_option
@click.option("--count", type=int, default=None, help="Number of eigenpairs.")
@tol_option
@click.pass_context
def eig_check(ctx, family, sigma, count, tolerance):
    """Operator-side and kernel-side eigen residuals."""
    _invoke(ctx, "eig-check", family=family, sigma=sigma, count=count, tolerance=tolerance)


@cli.command("interpolate")
@kernel_option
@sigma_option
@click.option("--sites", type=click.Path(dir_okay=False), default=None, help="Sites CSV with header.")
@click.option("--grid", type=int, default=None, help="Output grid size per axis.")
@click.pass_context
def interpolate(ctx, kernel, sigma, sites, grid):
    """Fit a kernel interpolant and evaluate it on a grid."""
    _invoke(ctx, "interpolate", kernel=kernel, sigma=sigma, sites=sites, grid=grid)


@cli.command("convergence")
@kernel_option
@click.option("--function", default=None, help="Test function name.")
@click.option("--site-counts", default=None, help="Comma-separated site counts.")
@click.pass_context
def convergence(ctx, kernel, function, site_counts):
    """Sup interpolation error against the number of sites."""
    _invoke(ctx, "convergence", kernel=kernel, function=function, site_counts=_ints(site_counts))


@cli.command("tps-corrector")
@click.option("--y", default=None, help="Source point 'y1,y2'.")
@click.option("--n", type=int, default=None, help="Grid resolution.")
@tol_option
@click.pass_context
def tps_corrector(ctx, y, n, tolerance):
    """Solve the thin-plate corrector and emit it on the grid."""
    point = _points(y)
    _invoke(ctx, "tps-corrector", y=point[0] if point else None, n=n, tolerance=tolerance)


@cli.command("membership")
@click.option("--space", default=None, help="Space name.")
@click.option("--function", default=None, help="Test function name.")
@sigma_option
@click.pass_context
def membership(ctx, space, function, sigma):
    """Decide whether a function lies in the space."""
    _invoke(ctx, "membership", space=space, function=function, sigma=sigma)
