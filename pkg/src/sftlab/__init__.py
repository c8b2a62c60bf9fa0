"""Shifts of finite type, sliding block codes, effective subshifts over the
Cantor alphabet, and effective attractors."""

from .errors import (
    AlphabetMismatch, BudgetExhausted, DimensionMismatch, DomainViolation, EmptyOutputSupport,
    FormatError, InvalidPartition, SftLabError, SupportCapExceeded, SupportNotContained,
    TrapRejected,
)
from .patterns import (
    Alphabet, Box, Pattern, SftSpec, appears_at, count_admissible, enumerate_admissible,
    entropy_upper, is_admissible, parse_sft, write_sft,
)
from .onedim import decide_empty_1d, decide_empty_eds_1d, periodic_point_1d
from .multidim import ProvedEmpty, ProvedNonempty, TorusPattern, Unknown, semidecide_empty
from .blockcode import BlockCode, ca_image_language, search_factor, verify_factor_step
from .eds import CylinderPattern, GenCylinder, StageSet, guarded_stage, product_stage, universal_stage
from .attractor import ProvedDisjoint, TrapRegion, approx_image

__version__ = "0.1.0"
