"""Fluid-induced seismicity modeling: an injection-driven Poisson rate model
with Bayesian online updating, residual-based validation, and short-window
count / maximum-magnitude forecasting.

Times are days since injection start, flow rates m3/day.  The activation
feedback a_fb absorbs the flow-rate unit, so fitted values are only
comparable between runs using the same unit convention.
"""

from .catalog import (
    CatalogFormatError,
    InjectionProfile,
    SeismicCatalog,
    SeismicEvent,
    catalog_to_csv,
    cumulative_volume,
    injection_to_csv,
    load_catalog,
    load_injection,
    parse_catalog,
    parse_injection,
)
from .rate import (
    ProcessExtinctionError,
    RateParams,
    cumulative_rate,
    inverse_cumulative,
    rate_at,
    total_mass,
)
from .magnitudes import DEFAULT_M_UPPER, MagnitudeModel
from .likelihood import (
    LikelihoodContext,
    log_likelihood_complete,
    log_likelihood_grid,
    log_likelihood_partial,
)
from .priors import (
    DegenerateMomentsError,
    GammaPrior,
    JointPrior,
    ScaledBeta,
    default_prior,
    fit_prior,
    load_prior_config,
    log_prior,
    sample_prior,
    save_prior_config,
)
from .inference import (
    EvidenceUnderflowError,
    FitFailureError,
    GridSpec,
    MleFit,
    PosteriorGrid,
    PosteriorSummary,
    bayes_average_cumulative,
    build_axes,
    compute_posterior,
    delta_posterior,
    mle_fit,
    posterior_to_dict,
    summarize,
)
from .forecast import (
    DEFAULT_H_DAYS,
    CountForecast,
    MaxMagForecast,
    forecast_counts,
    forecast_counts_ergodic,
    forecast_counts_plugin,
    forecast_max_magnitude,
    forecast_to_dict,
)
from .validation import (
    BermanResult,
    InsufficientSampleError,
    KsReport,
    LagScatter,
    RescaledTimes,
    berman_test,
    ks_test,
    lag_scatter,
    rescale,
    validate_model_suite,
    validation_to_dict,
)
from .simulate import SimulationSpec, simulate, simulate_thinning, simulate_window_max
from .session import (
    MonotonicityError,
    OnlineSession,
    Snapshot,
    replay,
    snapshots_to_jsonl,
)

__version__ = "0.1.0"
