"""degenex: turn tensor degenerations into probabilistic transformation
protocols and compute their success-probability exponents.

The package is organized as:

* core          - Laurent matrices, states, norms, tensor application
* degeneration  - validation, combinatorial/hypergraph constructions, fixtures
* finiten       - finite-copy protocol objectives, point search, simulator
* exponent      - single-letter exponents from planar measures
* tradeoff      - rate-below-one exponent curves
* potential     - weighted Fekete points and potential-theory checks
* cli           - the `degenex` command

Heavy kernels run on a compiled extension when available; set
DEGENEX_FORCE_PURE=1 to force the pure numpy backend (see degenex.backend).
"""

from ._kernels import BACKEND as backend
from .core import (
    LaurentMatrix,
    MultipartiteState,
    hermitian_sqrt,
    laurent_eval,
    operator_norm,
    product_norm,
    tensor_apply,
)
from .degeneration import (
    CombinatorialSpec,
    Degeneration,
    Hypergraph,
    ValidationReport,
    build_degeneration,
    combinatorial_exponent,
    edge_connectivity,
    from_combinatorial,
    ghz_w_combinatorial,
    ghz_w_generic,
    ghz_w_minimal,
    hypergraph_ghz_exponent,
    k3_network,
    validate,
)
from .exponent import (
    ExponentResult,
    PlanarMeasure,
    circle_average_bound,
    circle_log_integral,
    fourier_circle_exponent,
    is_centrally_symmetric,
    measure_objective,
    norm_min_lower_bound,
    symmetric_exponent,
    uniform_circle,
)
from .finiten import (
    PointConfiguration,
    WeightAssignment,
    canonical_gamma,
    closed_form_objective,
    extrapolate_exponent,
    finite_n_exponent_table,
    optimize_radius,
    prune_points,
    roots_of_unity_config,
    simulate_protocol,
    vandermonde_objective,
)
from .potential import (
    CompactDomain,
    WeightPair,
    discretize_measure,
    harmonicity_check,
    logarithmic_potential,
    supinf_objective,
    weighted_fekete,
)
from .tradeoff import (
    FlagDistribution,
    RateExponentPoint,
    best_exponent_over_R,
    binary_entropy,
    branch_norms,
    fixed_P_exponent,
    kl_divergence,
    symmetric_tradeoff_exponent,
    tradeoff_curve,
)

__version__ = "0.1.0"
