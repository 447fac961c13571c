"""Plug-in and one-step estimation of smooth statistical functionals.

Distributions live on a fixed support (a midpoint grid or a finite set of
atoms); functionals come with their influence functions, and the mixture
path between an initial estimate and the truth makes the one-step
correction and its second-order remainder directly computable.
"""
from .dist import (
    DiscreteDist,
    Grid,
    GridDensity,
    SampleSet,
    empirical_pmf,
    expectation,
    integrate,
    l2_distance,
    make_rng,
    mix,
    sample,
)
from .errors import (
    BandwidthError,
    ConfigError,
    DegeneratePathError,
    DomainError,
    OneStepError,
    ShapeError,
    SupportError,
    UnsupportedError,
)
from .estimators import (
    EstimateReport,
    KdeConfig,
    crossfit_one_step,
    efficiency_bound,
    kde_fit,
    one_step,
    plug_in,
    replicate,
    split_one_step,
)
from .functionals import ISD, MEAN, Functional, gateaux_fd, get_functional, influence_derivative
from .paths import (
    Path,
    VCurve,
    exact_r2,
    fd_derivative_at_one,
    one_step_intercept,
    pathwise_derivative_at_one,
    quadratic_fit,
    rescale,
    tangent,
    v_curve,
)
from .rates import RateStudyResult, direction_sweep, kde_rate_sweep, loglog_slope
from .scorepath import ScorePathCheck, discrete_chain_rule_derivative, score_identity_check

__version__ = "0.1.0"
