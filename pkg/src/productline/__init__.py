"""Optimal product lines for a two-period monopolist with and without price commitment."""
from .commitment import (
    commitment_price2,
    commitment_quality,
    commitment_revenue,
    commitment_schedule,
    first_best_quality,
    first_best_schedule,
    first_best_surplus,
)
from .errors import (
    CapTooSmallError,
    ConsistencyError,
    DomainError,
    InfeasibleError,
    NonPositiveError,
    NoRootError,
    OrderingError,
    ProductLineError,
    RegimeError,
    UnboundedError,
    ValidationError,
)
from .limited import (
    PoolingInterval,
    Regime,
    classify,
    l_threshold,
    limited_schedule,
    limited_transfers,
    monotonicity_check,
    solve_m_star_low,
    solve_pooling_interval,
    u_prime,
)
from .model import (
    DualCertificate,
    MeanDistribution,
    ModelParams,
    Prior,
    Schedule,
    ScheduleRegime,
    Segment,
    SegmentKind,
    TieBreak,
    VerificationReport,
    check_schedule,
    validate,
)
from .pricing import period2_price, period2_revenue
from .surplus import R, RFunction, quality_given_mean, revenue_of_distribution

__version__ = "0.1.0"
