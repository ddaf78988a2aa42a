from .ctip import build_ctip, ctip_assignment, ctip_full_assignment, ctip_rounding, ctip_start
from .extensions import add_incompatibility, add_precedence, add_simultaneous, split_node
from .extract import ZVector, extract_schedule, extract_zvector
from .flow import FlowVars, add_flow_block, flow_lp, schedule_flow_lp
from .sets import IntervalSets, interval_sets
from .tdip import build_tdip, build_tdip_lb, tdip_start
