"""The Firm-style intermediate representation.

A program graph is an arena of nodes rooted at its unique End node.  Every
node references its predecessors directly (no reified edge objects); blocks
hold an indexed map of incoming control-flow predecessors and are the only
places where reference cycles may occur.  Nodes are immutable once added;
the optimizer mutates graphs only through the narrow facilities below
(``set_block_predecs`` / ``replace_kind``), and "deletion" is simply
becoming unreachable from End.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Union

from .gxl import SourceLocation

NodeId = int


class Mode(enum.Enum):
    """Value type of a numeric node ("mode"): pointer, sized ints, floats,
    boolean ``b``, or not yet computed."""

    p = "p"
    Iu = "Iu"
    Is = "Is"
    Su = "Su"
    Ss = "Ss"
    Bu = "Bu"
    Bs = "Bs"
    E = "E"
    F = "F"
    D = "D"
    C = "C"
    b = "b"
    NotYetComputed = "NotYetComputed"


INTEGER_MODES = frozenset({Mode.Iu, Mode.Is, Mode.Su, Mode.Ss, Mode.Bu, Mode.Bs})
SIGNED_MODES = frozenset({Mode.Is, Mode.Ss, Mode.Bs})
FLOAT_MODES = frozenset({Mode.F, Mode.D})

MODE_WIDTH = {Mode.Bu: 8, Mode.Bs: 8, Mode.Su: 16, Mode.Ss: 16, Mode.Iu: 32, Mode.Is: 32}


def mode_int_range(mode: Mode) -> tuple[int, int]:
    width = MODE_WIDTH[mode]
    if mode in SIGNED_MODES:
        return -(1 << (width - 1)), (1 << (width - 1)) - 1
    return 0, (1 << width) - 1


class Role(enum.Enum):
    NUMERIC = "Numeric"
    CONTROL_FLOW = "ControlFlow"
    MEMORY_STATE = "MemoryState"


# --------------------------------------------------------------------------
# Constant values
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class IntV:
    """Two's-complement integer constant; ``value`` is the interpreted value
    (signed for signed modes, non-negative for unsigned ones)."""

    mode: Mode
    value: int

    def __post_init__(self) -> None:
        if self.mode not in INTEGER_MODES:
            raise ValueError(f"IntV mode must be an integer mode, got {self.mode}")
        lo, hi = mode_int_range(self.mode)
        if not lo <= self.value <= hi:
            raise ValueError(f"value {self.value} does not fit mode {self.mode.value}")


@dataclass(frozen=True)
class FloatV:
    mode: Mode
    value: float

    def __post_init__(self) -> None:
        if self.mode not in FLOAT_MODES:
            raise ValueError(f"FloatV mode must be F or D, got {self.mode}")


@dataclass(frozen=True)
class BoolV:
    value: int  # 0 or 1

    def __post_init__(self) -> None:
        if self.value not in (0, 1):
            raise ValueError("BoolV value must be 0 or 1")


ConstValue = Union[IntV, FloatV, BoolV]


def const_mode(value: ConstValue) -> Mode:
    return Mode.b if isinstance(value, BoolV) else value.mode


def const_text(value: ConstValue) -> str:
    """Canonical decimal rendering, used as the unparsed form of folded
    constants."""
    if isinstance(value, FloatV):
        return repr(value.value)
    return str(value.value)


# --------------------------------------------------------------------------
# Node kinds
# --------------------------------------------------------------------------


class UnaryOp(enum.Enum):
    Conv = "Conv"
    Minus = "Minus"
    Not = "Not"
    Rotl = "Rotl"
    Shl = "Shl"
    Shr = "Shr"
    Shrs = "Shrs"


class BinaryOp(enum.Enum):
    Add = "Add"
    And = "And"
    Div = "Div"
    Eor = "Eor"
    Mod = "Mod"
    Mul = "Mul"
    Or = "Or"
    Sub = "Sub"
    Cmp = "Cmp"


@dataclass(frozen=True)
class Block:
    predecs: dict[int, NodeId] = field(default_factory=dict)


@dataclass(frozen=True)
class End:
    pass


@dataclass(frozen=True)
class Cond:
    selector: NodeId


@dataclass(frozen=True)
class Start:
    pass


@dataclass(frozen=True)
class Return:
    memstate: NodeId
    results: tuple[NodeId, ...] = ()


@dataclass(frozen=True)
class Jmp:
    pass


@dataclass(frozen=True)
class ProjX:
    """Control-flow projection selecting one successor of a Cond."""

    input: NodeId
    selection: int


@dataclass(frozen=True)
class NoMem:
    pass


@dataclass(frozen=True)
class Sync:
    predecs: tuple[NodeId, ...] = ()


@dataclass(frozen=True)
class Store:
    pre_state: NodeId
    position: NodeId
    value: NodeId


@dataclass(frozen=True)
class Free:
    pre_state: NodeId
    position: NodeId


@dataclass(frozen=True)
class Phi:
    """Value selection keyed by the containing block's predecessor indices."""

    alternatives: dict[int, NodeId] = field(default_factory=dict)


@dataclass(frozen=True)
class ProjN:
    """Numeric projection selecting one component of a tuple-producing node."""

    predec: NodeId
    pos: int


@dataclass(frozen=True)
class TupleN:
    combines: tuple[NodeId, ...] = ()


@dataclass(frozen=True)
class Call:
    combines: tuple[NodeId, ...]
    pre_state: NodeId


@dataclass(frozen=True)
class NumericConst:
    unparsed: str
    value: ConstValue | None = None


@dataclass(frozen=True)
class SymConst:
    unparsed: str


@dataclass(frozen=True)
class Unary:
    op: UnaryOp
    on: NodeId


@dataclass(frozen=True)
class Binary:
    op: BinaryOp
    left: NodeId
    right: NodeId


@dataclass(frozen=True)
class Mux:
    first: NodeId
    second: NodeId
    third: NodeId


@dataclass(frozen=True)
class Alloc:
    pre_state: NodeId
    size: NodeId


@dataclass(frozen=True)
class Load:
    pre_state: NodeId
    position: NodeId


@dataclass(frozen=True)
class Sel:
    pre_state: NodeId
    position: NodeId


@dataclass(frozen=True)
class Bad:
    pass


@dataclass(frozen=True)
class Unknown:
    pass


@dataclass(frozen=True)
class BadNumeric:
    pass


@dataclass(frozen=True)
class UnknownNumeric:
    pass


NodeKind = Union[
    Block, End, Cond, Start, Return, Jmp, ProjX,
    NoMem, Sync, Store, Free,
    Phi, ProjN, TupleN, Call, NumericConst, SymConst,
    Unary, Binary, Mux, Alloc, Load, Sel,
    Bad, Unknown, BadNumeric, UnknownNumeric,
]

_ALL_ROLES = frozenset({Role.NUMERIC, Role.CONTROL_FLOW, Role.MEMORY_STATE})
_N = frozenset({Role.NUMERIC})
_CF = frozenset({Role.CONTROL_FLOW})
_M = frozenset({Role.MEMORY_STATE})

_ROLES: dict[type, frozenset[Role]] = {
    Unknown: _ALL_ROLES,
    Bad: _ALL_ROLES,
    Block: frozenset(),
    End: frozenset(),
    Cond: frozenset(),
    Start: _CF | _M | _N,
    Return: _CF,
    Jmp: _CF,
    ProjX: _CF,
    NoMem: _M,
    Sync: _M,
    Store: _M,
    Free: _M,
    Phi: _N,
    ProjN: _N,
    TupleN: _N,
    Call: _N | _M,
    NumericConst: _N,
    SymConst: _N,
    Unary: _N,
    Binary: _N,
    Mux: _N,
    Alloc: _N | _M,
    Load: _N | _M,
    Sel: _N | _M,
    BadNumeric: _N,
    UnknownNumeric: _N,
}


def implements_role(kind: NodeKind | type) -> frozenset[Role]:
    """The fixed role set a node kind provides to its consumers."""
    key = kind if isinstance(kind, type) else type(kind)
    return _ROLES[key]


def kind_name(kind: NodeKind) -> str:
    if isinstance(kind, Unary):
        return kind.op.value
    if isinstance(kind, Binary):
        return kind.op.value
    return type(kind).__name__


# Per-kind reference fields: (label, target ids, requirement).  A requirement
# is either a Role the target must implement or a kind class the target must
# be an instance of.
def kind_ref_specs(kind: NodeKind) -> list[tuple[str, tuple[NodeId, ...], object]]:
    if isinstance(kind, Block):
        return [
            (f"predecs[{i}]", (kind.predecs[i],), Role.CONTROL_FLOW)
            for i in sorted(kind.predecs)
        ]
    if isinstance(kind, Cond):
        return [("selector", (kind.selector,), Role.NUMERIC)]
    if isinstance(kind, Return):
        return [
            ("memstate", (kind.memstate,), Role.MEMORY_STATE),
            ("results", kind.results, Role.NUMERIC),
        ]
    if isinstance(kind, ProjX):
        return [("input", (kind.input,), Cond)]
    if isinstance(kind, Sync):
        return [("predecs", kind.predecs, Role.MEMORY_STATE)]
    if isinstance(kind, Store):
        return [
            ("pre_state", (kind.pre_state,), Role.MEMORY_STATE),
            ("position", (kind.position,), Role.NUMERIC),
            ("value", (kind.value,), Role.NUMERIC),
        ]
    if isinstance(kind, Free):
        return [
            ("pre_state", (kind.pre_state,), Role.MEMORY_STATE),
            ("position", (kind.position,), Role.NUMERIC),
        ]
    if isinstance(kind, Phi):
        return [
            (f"alternatives[{i}]", (kind.alternatives[i],), Role.NUMERIC)
            for i in sorted(kind.alternatives)
        ]
    if isinstance(kind, ProjN):
        return [("predec", (kind.predec,), Role.NUMERIC)]
    if isinstance(kind, TupleN):
        return [("combines", kind.combines, Role.NUMERIC)]
    if isinstance(kind, Call):
        return [
            ("combines", kind.combines, Role.NUMERIC),
            ("pre_state", (kind.pre_state,), Role.MEMORY_STATE),
        ]
    if isinstance(kind, Unary):
        return [("on", (kind.on,), Role.NUMERIC)]
    if isinstance(kind, Binary):
        return [
            ("left", (kind.left,), Role.NUMERIC),
            ("right", (kind.right,), Role.NUMERIC),
        ]
    if isinstance(kind, Mux):
        return [
            ("first", (kind.first,), Role.NUMERIC),
            ("second", (kind.second,), Role.NUMERIC),
            ("third", (kind.third,), Role.NUMERIC),
        ]
    if isinstance(kind, Alloc):
        return [
            ("pre_state", (kind.pre_state,), Role.MEMORY_STATE),
            ("size", (kind.size,), Role.NUMERIC),
        ]
    if isinstance(kind, (Load, Sel)):
        return [
            ("pre_state", (kind.pre_state,), Role.MEMORY_STATE),
            ("position", (kind.position,), Role.NUMERIC),
        ]
    return []


def kind_refs(kind: NodeKind) -> list[NodeId]:
    """All predecessor references of a kind, in canonical field order."""
    refs: list[NodeId] = []
    for _, targets, _ in kind_ref_specs(kind):
        refs.extend(targets)
    return refs


# --------------------------------------------------------------------------
# Graph arena
# --------------------------------------------------------------------------


class GraphError(Exception):
    """Raised when a construction or mutation would violate the model."""


@dataclass
class FirmNode:
    kind: NodeKind
    block: NodeId | None
    mode: Mode
    location: SourceLocation | None = None
    gxl_id: str | None = None


class FirmGraph:
    """Append-only arena of Firm nodes; the graph is rooted at its End node."""

    def __init__(self) -> None:
        self._nodes: list[FirmNode] = []
        self.end: NodeId | None = None
        self.start: NodeId | None = None

    def __len__(self) -> int:
        return len(self._nodes)

    def node(self, nid: NodeId) -> FirmNode:
        return self._nodes[nid]

    def kind(self, nid: NodeId) -> NodeKind:
        return self._nodes[nid].kind

    def _check_refs(self, kind: NodeKind) -> None:
        for label, targets, requirement in kind_ref_specs(kind):
            for target in targets:
                if not 0 <= target < len(self._nodes):
                    raise GraphError(f"{kind_name(kind)}.{label}: unknown node id {target}")
                target_kind = self._nodes[target].kind
                if isinstance(requirement, Role):
                    if requirement not in implements_role(target_kind):
                        raise GraphError(
                            f"{kind_name(kind)}.{label} must implement "
                            f"{requirement.value}, got {kind_name(target_kind)}"
                        )
                elif not isinstance(target_kind, requirement):
                    raise GraphError(
                        f"{kind_name(kind)}.{label} must be a "
                        f"{requirement.__name__}, got {kind_name(target_kind)}"
                    )

    def add_node(
        self,
        kind: NodeKind,
        block: NodeId | None = None,
        *,
        mode: Mode = Mode.NotYetComputed,
        location: SourceLocation | None = None,
        gxl_id: str | None = None,
    ) -> NodeId:
        """Add a node and return its fresh id.

        ``block`` is required for every kind except Block itself and must
        reference a Block node; all predecessor references must satisfy
        their declared roles.  A graph holds at most one Start and one End.
        """
        if isinstance(kind, Block):
            if block is not None:
                raise GraphError("Block nodes carry no block reference")
        else:
            if block is None:
                raise GraphError(f"{kind_name(kind)} requires a containing block")
            if not 0 <= block < len(self._nodes):
                raise GraphError(f"unknown block id {block}")
            if not isinstance(self._nodes[block].kind, Block):
                raise GraphError(
                    f"block reference must point at a Block, got "
                    f"{kind_name(self._nodes[block].kind)}"
                )
        self._check_refs(kind)
        if isinstance(kind, End) and self.end is not None:
            raise GraphError("graph already has an End node")
        if isinstance(kind, Start) and self.start is not None:
            raise GraphError("graph already has a Start node")
        nid = len(self._nodes)
        self._nodes.append(FirmNode(kind, block, mode, location, gxl_id))
        if isinstance(kind, End):
            self.end = nid
        elif isinstance(kind, Start):
            self.start = nid
        return nid

    # -- sanctioned mutation (rewrite facilities and block back-patching)

    def set_block_predecs(self, bid: NodeId, predecs: dict[int, NodeId]) -> None:
        if not isinstance(self._nodes[bid].kind, Block):
            raise GraphError("set_block_predecs target is not a Block")
        new_kind = Block(dict(predecs))
        self._check_refs(new_kind)
        self._nodes[bid].kind = new_kind

    def replace_kind(self, nid: NodeId, kind: NodeKind) -> None:
        old = self._nodes[nid].kind
        if isinstance(old, Block) != isinstance(kind, Block):
            raise GraphError("cannot change a node between Block and non-Block")
        self._check_refs(kind)
        self._nodes[nid].kind = kind

    # -- traversal

    def children(self, nid: NodeId) -> list[NodeId]:
        """Referenced nodes in canonical order: containing block first, then
        the kind's predecessor fields (blocks: entries by ascending key)."""
        node = self._nodes[nid]
        refs = [] if node.block is None else [node.block]
        refs.extend(kind_refs(node.kind))
        return refs

    def reachable(self) -> list[NodeId]:
        """All nodes reachable from End, in deterministic preorder."""
        if self.end is None:
            return []
        seen: set[NodeId] = set()
        order: list[NodeId] = []
        stack = [self.end]
        while stack:
            nid = stack.pop()
            if nid in seen:
                continue
            seen.add(nid)
            order.append(nid)
            stack.extend(reversed(self.children(nid)))
        return order


def visit_blocks_once(
    graph: FirmGraph, visitor: Callable[[NodeId], None] | None = None
) -> set[NodeId]:
    """Depth-first traversal from End over all predecessor and block
    references, entering each node (and in particular each Block, the only
    cycle point) at most once.  Returns the set of visited Block ids."""
    blocks: set[NodeId] = set()
    for nid in graph.reachable():
        if isinstance(graph.kind(nid), Block):
            blocks.add(nid)
        if visitor is not None:
            visitor(nid)
    return blocks


def nodes_in_block(graph: FirmGraph, block: NodeId) -> set[NodeId]:
    """All reachable non-Block nodes whose containing block is ``block``."""
    if not isinstance(graph.kind(block), Block):
        raise GraphError("nodes_in_block target is not a Block")
    return {
        nid
        for nid in graph.reachable()
        if graph.node(nid).block == block
    }


# --------------------------------------------------------------------------
# Structural isomorphism (ignores locations and gxl ids)
# --------------------------------------------------------------------------


def _kind_signature(kind: NodeKind):
    if isinstance(kind, Block):
        return ("Block", tuple(sorted(kind.predecs)))
    if isinstance(kind, Phi):
        return ("Phi", tuple(sorted(kind.alternatives)))
    if isinstance(kind, ProjX):
        return ("ProjX", kind.selection)
    if isinstance(kind, ProjN):
        return ("ProjN", kind.pos)
    if isinstance(kind, NumericConst):
        return ("NumericConst", kind.value)
    if isinstance(kind, SymConst):
        return ("SymConst", kind.unparsed)
    if isinstance(kind, Unary):
        return ("Unary", kind.op)
    if isinstance(kind, Binary):
        return ("Binary", kind.op)
    if isinstance(kind, Return):
        return ("Return", len(kind.results))
    if isinstance(kind, (Sync, TupleN)):
        seq = kind.predecs if isinstance(kind, Sync) else kind.combines
        return (type(kind).__name__, len(seq))
    if isinstance(kind, Call):
        return ("Call", len(kind.combines))
    return (type(kind).__name__,)


def isomorphic(g1: FirmGraph, g2: FirmGraph) -> bool:
    """True iff a bijection of reachable nodes exists preserving kind, mode,
    constant values, predecessor fields with their index keys, and block
    assignment."""
    if (g1.end is None) != (g2.end is None):
        return False
    if g1.end is None:
        return True
    fwd: dict[NodeId, NodeId] = {}
    rev: dict[NodeId, NodeId] = {}
    stack: list[tuple[NodeId, NodeId]] = [(g1.end, g2.end)]
    while stack:
        a, b = stack.pop()
        if a in fwd or b in rev:
            if fwd.get(a) != b or rev.get(b) != a:
                return False
            continue
        fwd[a] = b
        rev[b] = a
        na, nb = g1.node(a), g2.node(b)
        if na.mode is not nb.mode:
            return False
        if _kind_signature(na.kind) != _kind_signature(nb.kind):
            return False
        ca, cb = g1.children(a), g2.children(b)
        if len(ca) != len(cb):
            return False
        stack.extend(zip(ca, cb))
    return True
