"""Power-prior basket trial designs with exact operating characteristics.

A basket trial tests one treatment in K disease subgroups at once.  This
package implements information-sharing analysis designs built on the
power prior (pairwise Jensen-Shannon or calibrated-power-prior weights,
global heterogeneity discounts, marginal-likelihood weights) plus a
Bayesian model-averaging comparator, and evaluates them: exact or
simulated rejection rates, familywise error, expected correct decisions,
threshold calibration, and tuning-parameter grid search.
"""

from .bma import (
    BmaPosterior,
    PartitionModel,
    bma_basket_mean,
    bma_basket_tail,
    bma_posterior,
    enumerate_partitions,
)
from .calibrate import (
    CalibrationError,
    CalibrationResult,
    ExactEngine,
    SimulationEngine,
    TuningGrid,
    TuningRecord,
    TuningReport,
    calibrate_lambda,
    grid_search,
)
from .numerics import (
    BetaShape,
    QuadratureError,
    beta_log_pdf,
    beta_tail,
    integrate,
    kld_beta_to_mixture,
    log_beta_binomial_pmf,
    log_beta_fn,
)
from .oc import (
    CapacityError,
    OCResult,
    OCStandardErrors,
    Scenario,
    draw_responses,
    ecd,
    exact_oc,
    simulate_oc,
)
from .posterior import (
    PosteriorParams,
    decide,
    design_posterior,
    fujikawa_posterior,
    posterior_means,
    power_prior_posterior,
)
from .weights import (
    BmaDesign,
    CppDesign,
    CppGlobalDesign,
    CppNexDesign,
    DESIGN_FAMILIES,
    DesignSpec,
    FujikawaDesign,
    JsdGlobalDesign,
    MmlDesign,
    OptimizationError,
    TrialConfig,
    cpp_pairwise_weight,
    effective_weight_matrix,
    global_jsd_weight,
    heterogeneity_h,
    jsd_pairwise_weight,
    mml_weights,
    pairwise_weight_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # numerics
    "BetaShape",
    "QuadratureError",
    "log_beta_fn",
    "beta_tail",
    "beta_log_pdf",
    "log_beta_binomial_pmf",
    "integrate",
    "kld_beta_to_mixture",
    # trial and designs
    "TrialConfig",
    "DesignSpec",
    "FujikawaDesign",
    "CppDesign",
    "CppGlobalDesign",
    "CppNexDesign",
    "JsdGlobalDesign",
    "MmlDesign",
    "BmaDesign",
    "DESIGN_FAMILIES",
    # weights
    "jsd_pairwise_weight",
    "cpp_pairwise_weight",
    "pairwise_weight_matrix",
    "global_jsd_weight",
    "heterogeneity_h",
    "mml_weights",
    "effective_weight_matrix",
    "OptimizationError",
    # posteriors
    "PosteriorParams",
    "power_prior_posterior",
    "fujikawa_posterior",
    "design_posterior",
    "decide",
    "posterior_means",
    # model averaging
    "PartitionModel",
    "BmaPosterior",
    "enumerate_partitions",
    "bma_posterior",
    "bma_basket_tail",
    "bma_basket_mean",
    # operating characteristics
    "Scenario",
    "OCResult",
    "OCStandardErrors",
    "CapacityError",
    "ecd",
    "exact_oc",
    "simulate_oc",
    "draw_responses",
    # calibration and tuning
    "ExactEngine",
    "SimulationEngine",
    "CalibrationError",
    "CalibrationResult",
    "calibrate_lambda",
    "TuningGrid",
    "TuningRecord",
    "TuningReport",
    "grid_search",
]
