"""Reward machines for quadruped gait learning.

Thin Python layer over the C++ core: guard parsing, gait reward machines,
the toy contact-pattern environment with its wrappers, tabular training and
the command-line front end (``run_cli``).
"""

from ._gaitrm import (
    Guard,
    GuardParseError,
    LabelSet,
    LearnerConfig,
    Prop,
    RewardMachine,
    RewardParams,
    RmFormatError,
    ToyEnvConfig,
    ToyQuadrupedEnv,
    WrappedEnv,
    __version__,
    build_gait_rm,
    compute_reward,
    evaluate_builtin,
    load_rm,
    parse_guard,
    render_guard,
    run_cli,
    satisfying_sets,
    save_rm,
    train,
)

GAITS = ("trot", "pace", "bound")
WRAPPERS = ("cross_product", "no_gait", "naive", "stack3", "augmented")

__all__ = [name for name in dir() if not name.startswith("_")]
