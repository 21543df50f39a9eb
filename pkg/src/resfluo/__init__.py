"""Entanglement of resonance fluorescence from regular two-level-atom arrays.

Layered library: single-atom steady state and thresholds (:mod:`.atoms`),
scene geometry and phase sums (:mod:`.geometry`), the moment engine
(:mod:`.correlations`), the minor and companion witnesses (:mod:`.witness`),
a brute-force verification backend (:mod:`.oracle`), the ion-chain model
(:mod:`.trap`), and experiment campaigns plus CLI (:mod:`.experiments`,
:mod:`.cli`).
"""

from .atoms import (
    AtomParameters,
    AtomicSteadyState,
    bloch_integrate,
    coherence_ratio,
    entanglement_rabi_bound,
    rabi_for_ratio,
    steady_state,
)
from .config import ExperimentConfig
from .correlations import CovarianceTable, MomentSpec, covariance_table, moment
from .geometry import (
    EmissionVectors,
    PhaseSums,
    SceneGeometry,
    chain_scene,
    emission_pair,
    emission_vector,
    pattern_angle,
    phase_factors,
    positioned_scene,
)
from .oracle import JointState, build_joint_state, oracle_minor, oracle_moment
from .trap import (
    IonChain,
    build_chain,
    equilibrium_positions,
    max_scale,
    position_uncertainty,
    sample_jittered_positions,
)
from .witness import (
    MinorEvaluation,
    dephasing_scan,
    minor_mu,
    normalized_minor,
    ratio_condition,
    squeezing_witness,
    two_by_two_minors,
)
from .experiments import (
    AngleScan,
    EnsembleReport,
    McReport,
    ScaleOptimum,
    optimize_scale,
    run_angle_scan,
    run_monte_carlo,
    run_random_ensemble,
    run_threshold_map,
)

__version__ = "0.1.0"

__all__ = [
    "AtomParameters",
    "AtomicSteadyState",
    "bloch_integrate",
    "coherence_ratio",
    "entanglement_rabi_bound",
    "rabi_for_ratio",
    "steady_state",
    "ExperimentConfig",
    "CovarianceTable",
    "MomentSpec",
    "covariance_table",
    "moment",
    "EmissionVectors",
    "PhaseSums",
    "SceneGeometry",
    "chain_scene",
    "emission_pair",
    "emission_vector",
    "pattern_angle",
    "phase_factors",
    "positioned_scene",
    "JointState",
    "build_joint_state",
    "oracle_minor",
    "oracle_moment",
    "IonChain",
    "build_chain",
    "equilibrium_positions",
    "max_scale",
    "position_uncertainty",
    "sample_jittered_positions",
    "MinorEvaluation",
    "dephasing_scan",
    "minor_mu",
    "normalized_minor",
    "ratio_condition",
    "squeezing_witness",
    "two_by_two_minors",
    "AngleScan",
    "EnsembleReport",
    "McReport",
    "ScaleOptimum",
    "optimize_scale",
    "run_angle_scan",
    "run_monte_carlo",
    "run_random_ensemble",
    "run_threshold_map",
    "__version__",
]
