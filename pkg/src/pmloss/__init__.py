"""Assignment loss and interleaving bounds for persistence modules over finite posets."""

from .backend import FINSET, FinSet, FinSetMap, FinSetObj, VecF, VecMap, VecObj
from .errors import *  # noqa: F401,F403
from .flow import (GridFlow, StepFlow, Translation, floor_shift, grid_flow, is_archimedean,
                   is_line_preserving, validate_flow)
from .loss import (Assignment, LossReport, bound, deinterleave, diagram_loss, loss_par_left,
                   loss_par_left_fc, loss_par_left_vec, loss_par_right, loss_tri_down, loss_tri_up,
                   total_loss, translate_assignment, verify_interleaving)
from .metric import INF, merging_distance, morphism_distance, reducing_constants
from .pmodule import PersModule, critical_coordinates, critical_values, is_constant_on, validate_module
from .poset import FinitePoset, Interval, build_poset, chain, grid, interval_check
from .reduce import (decompose_grid, decompose_linear, extend_constructible, total_loss_grid,
                     total_loss_linear)

__version__ = "0.1.0"
