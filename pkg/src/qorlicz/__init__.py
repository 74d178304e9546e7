"""Quantum Orlicz spaces and dynamical maps at desk scale."""

from .channels import QuantumChannel, check_dbc, hat_map, make_dbc_fixture
from .linalg import ConvergenceError, Verdict
from .orlicz import fundamental_function, fundamental_indices, luxemburg_norm
from .rearrangement import StepFunction, WeightedTraceAlgebra, mu
from .standard_form import StandardForm
from .young import builtin, complementary, equivalent, from_spec

__version__ = "0.1.0"
