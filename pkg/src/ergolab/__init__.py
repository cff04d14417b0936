"""ergolab: numerical experiments for orbit averages and mixing statistics.

Exact-arithmetic orbits (fixed-point circle rotations, counter-based
Bernoulli shifts), deterministic chunked Cesaro reductions, correlation
profiles along subsequence schedules, block/adversarial sequence
constructions, and system-level mixing diagnostics with exact measure
oracles.
"""

from ergolab import backend  # noqa: F401  (sets backend env defaults early)

__version__ = "0.1.0"

from ergolab._common import DEFAULT_SEED  # noqa: F401,E402
from ergolab.classify import (  # noqa: F401,E402
    MixingReport,
    classify_system,
    converse_reconstruction,
    empirical_set_correlation,
    strong_mixing_defect,
    weak_mixing_defect,
)
from ergolab.correlation import (  # noqa: F401,E402
    CorrelationProfile,
    IntPolynomial,
    TwistParameter,
    cesaro_average,
    correlation_at,
    correlation_profile,
    polynomial_average,
    squares_cesaro,
    strong_mixing_statistic,
    twisted_average,
    weak_mixing_statistic,
)
from ergolab.fixedpoint import GOLDEN, SQRT2M1, CirclePoint  # noqa: F401,E402
from ergolab.sequences import (  # noqa: F401,E402
    BlockSeq,
    BlockSpec,
    ComplexSeq,
    OrbitSeq,
    SubsequenceSchedule,
    TrigPolynomial,
    adversarial_companion,
    besicovitch_distance,
    block_index,
    block_sequence,
    cantor_pair,
    cantor_unpair,
    compactness_statistic,
    geometric_schedule,
    greedy_schedule,
    orbit_eval,
    trig_poly_eval,
)
from ergolab.streams import SymbolStream, derive_seed, fair_binary  # noqa: F401,E402
from ergolab.systems import (  # noqa: F401,E402
    Bernoulli,
    CircleSet,
    CylinderObservable,
    CylinderSet,
    IncompatibleError,
    IndicatorObservable,
    Product,
    Rotation,
    TrigObservable,
    exact_measure,
    exact_set_correlation,
    iterate_point,
)
