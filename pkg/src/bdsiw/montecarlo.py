"""Replication studies of the maximum-likelihood estimator.

For every sample size ``n`` and replication ``r`` a sample is drawn from the
true model, refitted, and the estimates are aggregated into average
estimates (AvE) and mean squared errors (MSE). Each replication gets its own
generator derived from ``(seed, n, r)``, so any cell can be recomputed on its
own and parallel runs reproduce serial ones exactly.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bivmax import BivMaxParams, sample_pairs
from .errors import NonConvergenceError
from .inference import PairedSample, fit_mle

PARAM_NAMES = ("theta1", "theta2", "theta3", "zeta")
FAILURE_FLAG_RATE = 0.2


@dataclass(frozen=True)
class StudyConfig:
    true_params: BivMaxParams
    sample_sizes: tuple[int, ...] = (50, 100, 150, 250, 400)
    replications: int = 500
    seed: int = 0
    n_starts: int = 2
    start_at_truth: bool = True

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sample_sizes)
        if not sizes:
            raise ValueError("need at least one sample size")
        if any(n < 1 for n in sizes):
            raise ValueError("sample sizes must be positive")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("sample sizes must be strictly increasing")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        object.__setattr__(self, "sample_sizes", sizes)


@dataclass
class CellResult:
    n: int
    ave: np.ndarray
    mse: np.ndarray
    n_ok: int
    n_failed: int

    @property
    def flagged(self) -> bool:
        total = self.n_ok + self.n_failed
        return total > 0 and self.n_failed / total > FAILURE_FLAG_RATE


@dataclass
class StudyReport:
    config: StudyConfig
    cells: list[CellResult] = field(default_factory=list)

    def cell(self, n: int) -> CellResult:
        for c in self.cells:
            if c.n == n:
                return c
        raise KeyError(n)

    def table(self) -> str:
        """AvE/MSE table laid out one row per sample size."""
        head = "n".rjust(6) + "".join(f"{name + ' AvE':>14}{name + ' MSE':>14}" for name in PARAM_NAMES)
        lines = [head + "   failed"]
        for c in self.cells:
            row = f"{c.n:6d}" + "".join(f"{a:14.4f}{m:14.5f}" for a, m in zip(c.ave, c.mse))
            row += f"   {c.n_failed:6d}" + ("  FLAGGED" if c.flagged else "")
            lines.append(row)
        return "\n".join(lines)


def replication_rng(seed: int, n: int, r: int) -> np.random.Generator:
    """Generator for replication ``r`` at sample size ``n``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(n, r)))


def run_replication(cfg: StudyConfig, n: int, r: int):
    """Estimates for one replication, or ``None`` when the fit does not converge."""
    rng = replication_rng(cfg.seed, n, r)
    x1, x2 = sample_pairs(cfg.true_params, n, rng)
    data = PairedSample(x1, x2)
    fit_seed = int(rng.integers(2**31))
    initial = (cfg.true_params,) if cfg.start_at_truth else ()
    try:
        fit = fit_mle(
            data,
            cfg.true_params.family,
            n_starts=cfg.n_starts,
            seed=fit_seed,
            initial=initial,
        )
    except NonConvergenceError:
        return None
    return fit.params.as_array()


def _run_cell(args):
    cfg, n = args
    return n, [run_replication(cfg, n, r) for r in range(cfg.replications)]


def _aggregate(n, estimates, truth) -> CellResult:
    ok = [e for e in estimates if e is not None]
    if ok:
        arr = np.vstack(ok)
        ave = arr.mean(axis=0)
        mse = ((arr - truth) ** 2).mean(axis=0)
    else:
        ave = mse = np.full(truth.size, math.nan)
    return CellResult(n, ave, mse, len(ok), len(estimates) - len(ok))


def run_study(cfg: StudyConfig, workers: int = 1) -> StudyReport:
    """Run the replication study; ``workers > 1`` spreads cells over processes."""
    truth = cfg.true_params.as_array()
    jobs = [(cfg, n) for n in cfg.sample_sizes]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = dict(pool.map(_run_cell, jobs))
    else:
        results = dict(map(_run_cell, jobs))
    cells = [_aggregate(n, results[n], truth) for n in cfg.sample_sizes]
    return StudyReport(cfg, cells)
