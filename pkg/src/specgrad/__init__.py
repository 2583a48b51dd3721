"""One-dimensional nonsmooth convex minimisation with specular derivatives."""

from .core import (DerivativeEstimate, DerivativeMode, OneSidedPair, Side, a_formula,
                   one_sided_fd, pair_at, specular_derivative, specular_from_pair,
                   specular_sign, symmetric_derivative, symmetric_from_pair)
from .errors import (BadConfig, BadParameter, BadTrace, DegenerateSum, OutOfDomain,
                     SpecgradError)
from .objectives import (Objective, absolute_value, builtin_huber, builtin_kink_counterexample,
                         builtin_piecewise_power, builtin_power_p, builtin_sum_abs,
                         get_objective, lipschitz_bound)
from .optimizers import (IterationRecord, Method, RunConfig, RunTrace, StepSchedule,
                         StopReason, best_update, isgm_run, sgm_run, shor_t, sm_run)

__version__ = "0.1.0"
