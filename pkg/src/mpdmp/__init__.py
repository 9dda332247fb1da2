"""Evolutionary multiparty multiobjective optimisation on distance-minimisation benchmarks."""

__version__ = "0.1.0"

from .algorithms import (  # noqa: E402
    ALGORITHMS,
    AlgorithmConfig,
    opt_all,
    opt_mpnds,
    opt_mpnds2,
    opt_mpnds3,
    run_algorithm,
)
from .core import Dominance, PartyLayout, RunResult, compare, seeded_rng  # noqa: E402
from .estimators import OptAll, OptMPNDS, OptMPNDS2, OptMPNDS3  # noqa: E402
from .metrics import igd, summarize  # noqa: E402
from .problems import MpDmpProblem, PsRegion, ps_oracle, sample_reference_front, suite, true_ps  # noqa: E402
from .sorting import crowding_distance, crowding_entropy, mpnds2, mpnds_order, nds  # noqa: E402

__all__ = [
    "ALGORITHMS",
    "AlgorithmConfig",
    "Dominance",
    "MpDmpProblem",
    "OptAll",
    "OptMPNDS",
    "OptMPNDS2",
    "OptMPNDS3",
    "PartyLayout",
    "PsRegion",
    "RunResult",
    "compare",
    "crowding_distance",
    "crowding_entropy",
    "igd",
    "mpnds2",
    "mpnds_order",
    "nds",
    "opt_all",
    "opt_mpnds",
    "opt_mpnds2",
    "opt_mpnds3",
    "ps_oracle",
    "run_algorithm",
    "sample_reference_front",
    "seeded_rng",
    "suite",
    "summarize",
    "true_ps",
]
