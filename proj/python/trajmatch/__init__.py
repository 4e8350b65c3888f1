"""Trajectory matching and reward shaping toolkit.

Demonstration matching (dynamic time warping, discrete path signatures),
imitation reward composition, a staged spawn-height curriculum and a
desk-scale narrow-passage insertion environment, all backed by the C++ core.
"""

from trajmatch._core import (
    Curriculum,
    CurriculumConfig,
    DemoSet,
    Rng,
    batch_dtw_reward,
    batch_signature_reward,
    batch_state_reward,
    chamfer_distance,
    compare_schemes,
    dtw_cost,
    dtw_cost_banded,
    dtw_imitation_reward,
    generate_demos,
    load_demos,
    make_curriculum,
    one_minus_tanh,
    run_episode,
    save_demos,
    signature,
    signature_distance,
    signature_imitation_reward,
    signature_length,
    soft_dtw_cost,
)

__version__ = "0.1.0"

__all__ = [
    "Curriculum",
    "CurriculumConfig",
    "DemoSet",
    "Rng",
    "batch_dtw_reward",
    "batch_signature_reward",
    "batch_state_reward",
    "chamfer_distance",
    "compare_schemes",
    "dtw_cost",
    "dtw_cost_banded",
    "dtw_imitation_reward",
    "generate_demos",
    "load_demos",
    "make_curriculum",
    "one_minus_tanh",
    "run_episode",
    "save_demos",
    "signature",
    "signature_distance",
    "signature_imitation_reward",
    "signature_length",
    "soft_dtw_cost",
]
