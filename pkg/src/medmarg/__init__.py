"""Median-based marginal distribution functions and their applications."""

__version__ = "0.1.0"

from .distributions import (  # noqa: E402
    ConditionalFamily,
    FamilyId,
    Monotonicity,
    PriorId,
    PriorSpec,
    cond_cdf,
    cond_pdf,
    prior_quantile,
    prior_sample,
)
from .errors import (  # noqa: E402
    CalibrationError,
    ConvergenceError,
    DomainError,
    EstimationError,
    InvalidParameterError,
    MedmargError,
    NumericalError,
    UnsupportedFamilyError,
)
from .marginal import (  # noqa: E402
    MarginalCdf,
    MarginalKind,
    Method,
    QuadratureConfig,
    VerificationReport,
    marginal_from_curve,
    marginal_pdf,
    mean_marginal,
    mean_marginal_cdf,
    median_marginal,
    median_marginal_cdf,
    verify_distribution_function,
)
from .montecarlo import (  # noqa: E402
    Algorithm,
    ApproxCurve,
    EmpiricalCdf,
    McConfig,
    algorithm_b1,
    algorithm_b2,
    algorithm_m1,
    algorithm_m2,
    isotonic_projection,
    sample_median,
)
from .power import (  # noqa: E402
    DominanceReport,
    PowerCurve,
    SimpleHypothesisTest,
    compare_power,
    mp_test,
    one_sided_test,
    power_curve,
    ump_known_sigma,
)
from .estimation import (  # noqa: E402
    EstimateResult,
    EstimationProblem,
    StudyTable,
    estimate,
    simulation_study,
)
