"""Command-line interface: ``bdsiw {fit,compare,simulate,tabulate,datasets}``.

Exit status is 0 on success, 2 for usage errors, 3 for unreadable input data
and 4 when a fit does not converge.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import warnings

import numpy as np

from . import __version__
from .bivmax import BivMaxParams, joint_cdf, joint_pmf_latent, joint_reliability, stress_strength
from .datasets import Dataset, embedded_names, load_embedded, resolve_dataset
from .errors import BdsiwError, DataError, NonConvergenceError
from .inference import MODELS, FitReport, fit_mle, fit_univariate, lrt
from .montecarlo import PARAM_NAMES, StudyConfig, run_study
from .report import ReportDocument, ReportParseError, render_table, serialize

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_NONCONVERGENCE = 4

QUANTITIES = ("pmf", "cdf", "bhrf", "reliability")
DEFAULT_MODELS = ("bdsiw", "bdsie", "bdsir")
# restricted model -> full model it is nested in (shape fixed, one df)
NESTED_IN = {"bdsie": "bdsiw", "bdsir": "bdsiw", "bdse": "bdsw", "bdsr": "bdsw"}
P_FLOOR = 0.01


class UsageError(BdsiwError):
    """Invalid combination of command-line arguments."""


def format_p(p: float) -> str:
    return f"<{P_FLOOR:g}" if p < P_FLOOR else f"{p:.4f}"


def _data_fields(ds: Dataset) -> dict:
    d = ds.pairs
    return {"dataset": ds.name, "source": ds.provenance, "n": d.n, "n1": d.n1, "n2": d.n2, "n3": d.n3}


def _fit_fields(fit: FitReport) -> dict:
    out = {"model": fit.model}
    out.update(fit.estimates())
    out.update(
        fixed_shape=fit.fixed_shape,
        neg_log_lik=fit.neg_log_lik,
        k=fit.k,
        aic=fit.aic,
        caic=fit.caic,
        bic=fit.bic,
        hqic=fit.hqic,
        converged=fit.converged,
        iterations=fit.iterations,
        n_starts=fit.n_starts,
    )
    return out


# ---------------------------------------------------------------------------
# commands (pure: arguments in, ReportDocument out)


def cmd_datasets() -> ReportDocument:
    doc = ReportDocument("datasets")
    rows = []
    for name in embedded_names():
        ds = load_embedded(name)
        d = ds.pairs
        rows.append([name, d.n, d.n1, d.n2, d.n3, ds.description])
    doc.add("datasets", columns=["name", "n", "n1", "n2", "n3", "description"], rows=rows)
    return doc


def cmd_fit(
    dataset: Dataset,
    family: str = "bdsiw",
    fixed_shape: float | None = None,
    starts: int = 8,
    seed: int = 0,
    marginals: bool = False,
    tol: float | None = None,
) -> ReportDocument:
    """Fit one bivariate model, optionally with univariate fits of X1, X2 and min(X1, X2)."""
    fit = fit_mle(dataset.pairs, family, fixed_shape=fixed_shape, n_starts=starts, seed=seed, tol=tol)
    doc = ReportDocument("fit")
    doc.add("data", _data_fields(dataset))
    fields = _fit_fields(fit)
    if fit.params.construction == "max":
        fields["p_x1_lt_x2"] = stress_strength(fit.params, tol=tol or 1e-9)
    doc.add("fit", fields)
    if marginals:
        tag = fit.params.family
        d = dataset.pairs
        rows = []
        for label, xs in (("x1", d.x1), ("x2", d.x2), ("min", d.minimum)):
            u = fit_univariate(xs, tag, seed=seed, tol=tol)
            rows.append([label, tag, u.params.theta, u.params.zeta, u.neg_log_lik, u.aic])
        doc.add("marginals", columns=["variable", "family", "theta", "zeta", "neg_log_lik", "aic"], rows=rows)
    return doc


def cmd_compare(
    dataset: Dataset,
    models=DEFAULT_MODELS,
    starts: int = 8,
    seed: int = 0,
    tol: float | None = None,
) -> ReportDocument:
    """Fit several models, rank them by AIC and test each nested pair."""
    models = [m.lower() for m in models]
    if len(set(models)) < 2:
        raise UsageError("compare needs at least two distinct models")
    unknown = [m for m in models if m not in MODELS]
    if unknown:
        raise UsageError(f"unknown model(s) {unknown}; choose from {sorted(MODELS)}")
    fits = {}
    for m in dict.fromkeys(models):
        fits[m] = fit_mle(dataset.pairs, m, n_starts=starts, seed=seed, tol=tol)

    doc = ReportDocument("compare")
    doc.add("data", _data_fields(dataset))
    cols = ["model", "theta1", "theta2", "theta3", "zeta", "neg_log_lik", "k", "aic", "caic", "bic", "hqic"]
    ranked = sorted(fits.values(), key=lambda f: f.aic)
    rows = [[f.model, *f.params.as_array(), f.neg_log_lik, f.k, f.aic, f.caic, f.bic, f.hqic] for f in ranked]
    doc.add("comparison", columns=cols, rows=rows)

    lrt_rows = []
    for m, f in fits.items():
        full = NESTED_IN.get(m)
        if full in fits:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                t = lrt(fits[full], f, df=1)
            lrt_rows.append([full, m, t.lam, t.df, t.p_value, format_p(t.p_value)])
    if lrt_rows:
        doc.add("lrt", columns=["full", "restricted", "lambda", "df", "p_value", "p_display"], rows=lrt_rows)
    return doc


def cmd_simulate(
    truth,
    sizes=(50, 100, 150, 250, 400),
    reps: int = 500,
    seed: int = 0,
    starts: int = 2,
    family: str = "dsiw",
    workers: int = 1,
) -> ReportDocument:
    """Replication study; one row of AvE and MSE per sample size."""
    if reps < 1:
        raise UsageError("--reps must be at least 1")
    try:
        params = BivMaxParams(*truth, family=family)
        cfg = StudyConfig(params, tuple(sizes), reps, seed=seed, n_starts=starts)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    study = run_study(cfg, workers=workers)
    doc = ReportDocument("simulate")
    doc.add(
        "study",
        {
            "family": params.family,
            "truth": list(params.as_array()),
            "sizes": list(cfg.sample_sizes),
            "replications": reps,
            "seed": seed,
            "starts": starts,
        },
    )
    cols = ["n"]
    for name in PARAM_NAMES:
        cols += [f"{name}_ave", f"{name}_mse"]
    cols += ["n_ok", "n_failed", "flagged"]
    rows = []
    for c in study.cells:
        row = [c.n]
        for a, m in zip(c.ave, c.mse):
            row += [a, m]
        rows.append(row + [c.n_ok, c.n_failed, c.flagged])
    doc.add("results", columns=cols, rows=rows)
    return doc


def tabulate_grid(params: BivMaxParams, grid_max: int, quantity: str) -> np.ndarray:
    """``quantity`` on ``[0, grid_max]^2``, indexed ``[x1, x2]``.

    Hazard entries where the joint reliability vanishes are NaN.
    """
    if quantity not in QUANTITIES:
        raise UsageError(f"quantity must be one of {QUANTITIES}")
    if grid_max < 0:
        raise UsageError("--grid-max must be nonnegative")
    x1, x2 = np.meshgrid(np.arange(grid_max + 1), np.arange(grid_max + 1), indexing="ij")
    if quantity == "pmf":
        return joint_pmf_latent(params, x1, x2)
    if quantity == "cdf":
        return joint_cdf(params, x1, x2)
    rel = joint_reliability(params, x1, x2)
    if quantity == "reliability":
        return rel
    pmf = joint_pmf_latent(params, x1, x2)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(rel > 0.0, pmf / np.where(rel > 0.0, rel, 1.0), np.nan)


def cmd_tabulate(params: BivMaxParams, grid_max: int = 10, quantity: str = "pmf", source: str | None = None):
    """``(x1, x2, value)`` triples for plotting."""
    grid = tabulate_grid(params, grid_max, quantity)
    doc = ReportDocument("tabulate")
    doc.add(
        "params",
        {
            "family": params.family,
            "theta1": params.theta1,
            "theta2": params.theta2,
            "theta3": params.theta3,
            "zeta": params.zeta,
            "source": source or "command line",
            "quantity": quantity,
            "grid_max": grid_max,
        },
    )
    rows = [[i, j, float(grid[i, j])] for i in range(grid_max + 1) for j in range(grid_max + 1)]
    doc.add("grid", columns=["x1", "x2", "value"], rows=rows)
    return doc


# ---------------------------------------------------------------------------
# argument parsing


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _column(text: str):
    return int(text) if text.lstrip("-").isdigit() else text


def _global_flags(parser, suppress: bool):
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=default(0), help="random seed (default 0)")
    parser.add_argument(
        "--format", choices=("table", "structured"), default=default("table"), help="output format"
    )
    parser.add_argument(
        "--tol", type=float, default=default(None), help="numerical tolerance for optimizers and series"
    )


def _data_args(p):
    p.add_argument("--data", required=True, help=f"embedded dataset ({', '.join(embedded_names())}) or CSV path")
    p.add_argument("--col1", type=_column, default=0, help="first column (index or header name)")
    p.add_argument("--col2", type=_column, default=1, help="second column (index or header name)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)

    parser = argparse.ArgumentParser(prog="bdsiw", description="Bivariate discrete inverse Weibull toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", parents=[common], help="fit one bivariate model")
    _data_args(p)
    p.add_argument("--family", default="bdsiw", help=f"model: {', '.join(MODELS)} (default bdsiw)")
    p.add_argument("--fix-shape", type=float, default=None, help="hold zeta at this value")
    p.add_argument("--starts", type=int, default=8, help="optimizer starting points (default 8)")
    p.add_argument("--marginals", action="store_true", help="also fit X1, X2 and min(X1, X2)")

    p = sub.add_parser("compare", parents=[common], help="compare models by information criteria and LRT")
    _data_args(p)
    p.add_argument("--models", type=lambda s: [m.strip() for m in s.split(",") if m.strip()],
                   default=list(DEFAULT_MODELS), help="comma-separated model list")  # fmt: skip
    p.add_argument("--starts", type=int, default=8)

    p = sub.add_parser("simulate", parents=[common], help="Monte-Carlo study of the estimator")
    p.add_argument("--truth", type=_float_list, required=True, help="theta1,theta2,theta3,zeta")
    p.add_argument("--sizes", type=_int_list, default=[50, 100, 150, 250, 400])
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--starts", type=int, default=2)
    p.add_argument("--family", default="dsiw", help="latent family tag (default dsiw)")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("tabulate", parents=[common], help="emit a quantity on a grid for plotting")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--params", type=_float_list, help="theta1,theta2,theta3,zeta")
    src.add_argument("--from-fit", action="store_true", help="fit --data first and tabulate the fit")
    p.add_argument("--data", help="dataset for --from-fit")
    p.add_argument("--col1", type=_column, default=0)
    p.add_argument("--col2", type=_column, default=1)
    p.add_argument("--family", default=None, help="latent family for --params, model for --from-fit")
    p.add_argument("--starts", type=int, default=8)
    p.add_argument("--grid-max", type=int, default=10)
    p.add_argument("--quantity", choices=QUANTITIES, default="pmf")

    sub.add_parser("datasets", parents=[common], help="list embedded datasets")
    return parser


def _dispatch(args) -> ReportDocument:
    if args.command == "datasets":
        return cmd_datasets()
    if args.command == "fit":
        ds = resolve_dataset(args.data, args.col1, args.col2)
        return cmd_fit(ds, args.family, args.fix_shape, args.starts, args.seed, args.marginals, args.tol)
    if args.command == "compare":
        ds = resolve_dataset(args.data, args.col1, args.col2)
        return cmd_compare(ds, args.models, args.starts, args.seed, args.tol)
    if args.command == "simulate":
        if len(args.truth) != 4:
            raise UsageError("--truth needs four values: theta1,theta2,theta3,zeta")
        return cmd_simulate(args.truth, args.sizes, args.reps, args.seed, args.starts, args.family, args.workers)
    if args.command == "tabulate":
        if args.from_fit:
            if not args.data:
                raise UsageError("--from-fit needs --data")
            ds = resolve_dataset(args.data, args.col1, args.col2)
            fit = fit_mle(ds.pairs, args.family or "bdsiw", n_starts=args.starts, seed=args.seed, tol=args.tol)
            return cmd_tabulate(fit.params, args.grid_max, args.quantity, source=f"{fit.model} fit to {ds.name}")
        if len(args.params) != 4:
            raise UsageError("--params needs four values: theta1,theta2,theta3,zeta")
        try:
            params = BivMaxParams(*args.params, family=args.family or "dsiw")
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return cmd_tabulate(params, args.grid_max, args.quantity)
    raise UsageError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        doc = _dispatch(args)
    except UsageError as exc:
        print(f"bdsiw: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ReportParseError) as exc:
        print(f"bdsiw: input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NonConvergenceError as exc:
        print(f"bdsiw: {exc}", file=sys.stderr)
        if exc.best is not None and math.isfinite(exc.best.neg_log_lik):
            print(f"bdsiw: best point found: {exc.best.estimates()}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except ValueError as exc:
        print(f"bdsiw: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = serialize(doc) if args.format == "structured" else render_table(doc)
    sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
