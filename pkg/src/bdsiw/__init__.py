"""Bivariate discrete inverse Weibull distribution: probabilities, fitting, simulation.

The likelihood kernels come from a compiled extension when it is available
and from a numpy implementation otherwise; ``bdsiw.BACKEND`` names the one in
use. Set ``BDSIW_BACKEND=python`` to force the fallback.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .bivmax import (
    BivMaxParams,
    GridCheck,
    PairObs,
    bhrf,
    cond_hazard,
    conditional_cdf,
    conditional_pmf,
    joint_cdf,
    joint_pmf,
    joint_pmf_closed_form,
    joint_pmf_latent,
    joint_reliability,
    joint_sf,
    marginal_cdf,
    marginal_family,
    marginal_pmf,
    max_marginal,
    median_correlation,
    pgf,
    pqd_check,
    sample_pair,
    sample_pairs,
    stress_strength,
    tp2_check,
    vector_hazard,
)
from .datasets import Dataset, load_csv, load_embedded
from .errors import BdsiwError, DataError, NonConvergenceError, UndefinedHazardError
from .families import DsE, DsIW, DsR, DsW, make_family
from .inference import (
    MODELS,
    FitReport,
    LrtReport,
    PairedSample,
    fit_mle,
    fit_univariate,
    info_criteria,
    log_likelihood,
    lrt,
    score_numeric,
)
from .montecarlo import StudyConfig, StudyReport, run_study
from .special import chi2_sf
