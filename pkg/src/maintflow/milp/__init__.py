from .model import (BINARY, CONTINUOUS, FEASIBLE_AT_LIMIT, INFEASIBLE, LIMIT_NO_INCUMBENT, OPTIMAL, UNBOUNDED,
                    Constraint, MilpModel, MilpResult, ModelError, Snapshot, Variable)
from .simplex import solve_lp
from .bnb import WarmStart, WarmStartError, solve_milp, warm_start
from .export import export_model, to_lp, to_mps
