"""Certified homotopy continuation on the Bombieri-Weyl sphere.

Library layout:
  polynomials    dense homogeneous systems, BW inner product, kernels
  projective     projective points, Newton, condition numbers
  tracking       geodesic homotopies, certified and heuristic trackers
  start_systems  total-degree / good / random / Fekete pairs, radius optimizer
  search         solve-all, average-step estimation, search experiments
  oracle         companion-matrix and multistart validation roots
  sysio          system files and experiment reports
  cli            command-line entry point
"""

__version__ = "0.1.0"

from .errors import (
    DegeneratePairError,
    HomsearchError,
    RootCountError,
    SingularSystemError,
    SystemFormatError,
    ZeroSystemError,
)
from .oracle import OracleRootSet, multistart_roots, univariate_roots
from .polynomials import (
    HomoPoly,
    PolySystem,
    bezout_number,
    bw_inner,
    bw_inner_system,
    bw_norm,
    kernel_poly,
    monomial_exponents,
    multinomial,
    normalize_to_sphere,
)
from .projective import (
    NewtonCertificateTrace,
    ProjectivePoint,
    augmented_solve,
    condition_mu,
    mu_system,
    newton_refine,
    projective_newton_step,
    riemann_distance,
)
from .search import (
    AvgSteps,
    CandidateReport,
    ExperimentConfig,
    SearchReport,
    estimate_avg_steps,
    one_root_experiment,
    run_experiment,
    screen_by_avg_steps,
    screen_by_condition,
    solve_all,
)
from .start_systems import (
    InitialPair,
    fekete_quartic,
    good_initial_pair,
    optimize_r,
    random_initial_pair,
    sample_sphere,
    total_degree,
)
from .tracking import (
    STEP_RULE_CONSTANT,
    GeodesicHomotopy,
    HeuristicSettings,
    TrackResult,
    homotopy_at,
    homotopy_derivative_at,
    make_aligned_homotopy,
    make_linear_homotopy,
    path_length_c0,
    track_certified,
    track_heuristic,
)

__all__ = [name for name in dir() if not name.startswith("_")]
