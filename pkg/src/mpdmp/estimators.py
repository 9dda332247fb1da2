"""Estimator-style wrappers around the algorithm drivers.

Each wrapper takes its hyperparameters in ``__init__`` (so ``get_params`` and
``set_params`` work as in scikit-learn) and runs one optimisation in
``fit``. The fitted multiparty Pareto set is exposed as ``mps_x_`` and
``mps_f_``.

Example:
    >>> est = OptMPNDS3(pop_size=60, fe_budget=3000, fei_budget=600, seed=1).fit(6)
    >>> est.mps_x_.shape[1]
    2
"""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_problem
from .algorithms import AlgorithmConfig, run_algorithm
from .metrics import igd
from .problems import ps_oracle, sample_reference_front


class _MultipartyOptimizer(BaseEstimator):
    _algorithm = ""

    def __init__(self, pop_size=200, fe_budget=80000, fei_budget=10000, sbx_eta=15.0, sbx_pc=1.0,
                 pm=0.5, pm_eta=20.0, jade_p=0.05, jade_c=0.05, seed=0, track_history=False):
        self.pop_size = pop_size
        self.fe_budget = fe_budget
        self.fei_budget = fei_budget
        self.sbx_eta = sbx_eta
        self.sbx_pc = sbx_pc
        self.pm = pm
        self.pm_eta = pm_eta
        self.jade_p = jade_p
        self.jade_c = jade_c
        self.seed = seed
        self.track_history = track_history

    def _config(self) -> AlgorithmConfig:
        return AlgorithmConfig(**self.get_params())

    def fit(self, problem, y=None):
        """Run the optimiser on ``problem`` (an MpDmpProblem or a suite id)."""
        self.problem_ = check_problem(problem)
        self.result_ = run_algorithm(self._algorithm, self.problem_, self._config())
        self.mps_x_ = self.result_.X
        self.mps_f_ = self.result_.F
        self.fe_used_ = self.result_.fe_used
        self.degenerate_ = self.result_.degenerate
        return self

    def score(self, problem=None, y=None, reference_size=1000) -> float:
        """Negative multiparty IGD against the problem's exact Pareto set (higher is better)."""
        check_is_fitted(self, "result_")
        prob = self.problem_ if problem is None else check_problem(problem)
        reference = sample_reference_front(prob, ps_oracle(prob), reference_size)
        return -igd(reference, self.mps_f_, prob.layout).value


class OptAll(_MultipartyOptimizer):
    """NSGA-II over every objective, treating the parties as one."""

    _algorithm = "optall"


class OptMPNDS(_MultipartyOptimizer):
    """NSGA-II ranked by the worst party level."""

    _algorithm = "optmpnds"


class OptMPNDS2(_MultipartyOptimizer):
    """NSGA-II ranked by sorting party level rows."""

    _algorithm = "optmpnds2"


class OptMPNDS3(_MultipartyOptimizer):
    """Per-party initialisation, adaptive DE and crowding-entropy selection."""

    _algorithm = "optmpnds3"


ESTIMATORS = {cls._algorithm: cls for cls in (OptAll, OptMPNDS, OptMPNDS2, OptMPNDS3)}
