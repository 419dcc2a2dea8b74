"""firmopt: read, verify, constant-fold and re-export GXL-encoded Firm
program graphs."""

from .gxl import (
    Diagnostic,
    GxlDocument,
    Severity,
    SourceLocation,
    find_attr,
    has_errors,
    parse_gxl,
    serialize_gxl,
)
from .firm import (
    ConstValue,
    FirmGraph,
    GraphError,
    Mode,
    Role,
    implements_role,
    isomorphic,
    nodes_in_block,
    visit_blocks_once,
)
from .bridge import DecodeResult, EncodeError, WireConstants, decode, encode
from .verify import check, check_index_set, is_valid_cond_selector
from .opt import (
    OptimizeOptions,
    PassReport,
    eliminate_dead_blocks,
    eliminate_dead_phis,
    eval_binary,
    eval_unary,
    fold_constants,
    normalize_predec_indices,
    optimize,
)
from .interp import STEP_LIMIT_EXCEEDED, UNSUPPORTED, EvalStatus, evaluate
from .dot import to_dot
from .cli import run

__all__ = [
    "Diagnostic",
    "GxlDocument",
    "Severity",
    "SourceLocation",
    "find_attr",
    "has_errors",
    "parse_gxl",
    "serialize_gxl",
    "ConstValue",
    "FirmGraph",
    "GraphError",
    "Mode",
    "Role",
    "implements_role",
    "isomorphic",
    "nodes_in_block",
    "visit_blocks_once",
    "DecodeResult",
    "EncodeError",
    "WireConstants",
    "decode",
    "encode",
    "check",
    "check_index_set",
    "is_valid_cond_selector",
    "OptimizeOptions",
    "PassReport",
    "eliminate_dead_blocks",
    "eliminate_dead_phis",
    "eval_binary",
    "eval_unary",
    "fold_constants",
    "normalize_predec_indices",
    "optimize",
    "STEP_LIMIT_EXCEEDED",
    "UNSUPPORTED",
    "EvalStatus",
    "evaluate",
    "to_dot",
    "run",
]

__version__ = "0.1.0"
