"""Multi-stage partial-oracle Grover search with Grover-Long stages and bitwise modelled states."""
from .errors import CapacityError, NormalizationError
from .grover_long import StageSchedule, analytic_2d, grover_iterate, run_stage, schedule_for
from .oracle import StageOracle, apply_oracle, apply_oracle_full_circuit, mask_oracle, stage_oracle
from .qsim import StateVector
from .scrambler import ScramblerSpec, enumerate_target_set, flags, make_spec, scram, stage_member
from .search import SearchResult, StageReport, run_baseline, run_search, stage_step
from .state_model import (
    ModelledState,
    entropy,
    estimate_from_counts,
    estimate_lambda,
    prepare,
    uniform_model,
)

__version__ = "0.1.0"
