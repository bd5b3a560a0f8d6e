"""Throughput-maximizing broadcast schedules with time sharing and hierarchical modulation."""

from .allocation import (
    Grouping,
    Plan,
    Receiver,
    ScheduleEntry,
    best_grouping,
    classical_plan,
    enumerate_groupings,
    equal_rate,
    evaluate_groupings,
    pair_equal_rate,
    pair_plan,
    time_fractions,
)
from .capacity import (
    DEFAULT_INTEGRATION,
    GAUSS_HERMITE,
    MONTE_CARLO,
    IntegrationSpec,
    StreamSelector,
    inverse_capacity,
    normalized_capacity,
    stream_capacity,
)
from .constellation import (
    Constellation,
    build_hierarchical_16qam,
    build_reference,
    energy_split,
)
from .errors import (
    CapacityRangeError,
    ConfigurationError,
    DegenerateReceiverError,
    GroupSizeError,
    InvalidParameterError,
    PlannerError,
    ReconstructionError,
)
from .rate_region import (
    EqualRateSolution,
    RatePoint,
    RateRegion,
    achievable_points,
    best_single_modcod,
    equal_rate_point,
    upper_hull,
)
from .scenario import Scenario, beam_receivers, beam_snrs, load_scenario, save_scenario
from .thresholds import (
    CODING_RATES,
    DEFAULT_ALPHAS,
    PUBLISHED_THRESHOLDS_DB,
    ModCod,
    ModCodTable,
    ReferencePoint,
    ThresholdAnomaly,
    build_modcod_table,
    derive_threshold,
    read_modcod_csv,
    read_reference_csv,
    reconstruct_references,
    shipped_references,
    write_reference_csv,
)

__version__ = "0.1.0"
