"""Constant folding and the resulting control-flow simplification.

Passes run over a copy-on-write rewrite of the graph arena: unchanged
subgraphs keep their node ids, rewritten nodes are fresh arena entries, and
blocks (the only cycle points) are updated in place so references through
them stay stable.  The driver iterates the pass pipeline to a fixed point;
a single trailing fold pass is not enough once one simplification round
exposes further constant conditions.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field, replace

from . import gxl
from .firm import (
    Bad,
    Binary,
    BinaryOp,
    Block,
    BoolV,
    Cond,
    ConstValue,
    FLOAT_MODES,
    FirmGraph,
    FloatV,
    INTEGER_MODES,
    IntV,
    Jmp,
    MODE_WIDTH,
    Mode,
    NodeId,
    NodeKind,
    NumericConst,
    Phi,
    ProjX,
    SIGNED_MODES,
    Start,
    Unary,
    UnaryOp,
    const_mode,
    const_text,
    kind_refs,
    kind_ref_specs,
)
from .verify import is_valid_cond_selector

PASS_FOLD = "fold"
PASS_DEAD_BLOCKS = "dead-blocks"
PASS_NORMALIZE = "normalize"
PASS_DEAD_PHIS = "dead-phis"
ALL_PASSES = (PASS_FOLD, PASS_DEAD_BLOCKS, PASS_NORMALIZE, PASS_DEAD_PHIS)


@dataclass
class PassReport:
    name: str
    nodes_replaced: int = 0
    edges_removed: int = 0
    blocks_removed: int = 0
    phis_removed: int = 0

    @property
    def changed(self) -> bool:
        return (
            self.nodes_replaced > 0
            or self.edges_removed > 0
            or self.blocks_removed > 0
            or self.phis_removed > 0
        )


@dataclass
class OptimizeOptions:
    max_iterations: int = 16
    enabled: frozenset[str] = frozenset(ALL_PASSES)
    fold_cmp: bool = True
    emit_dot_after_each_stage: bool = False


# --------------------------------------------------------------------------
# Constant arithmetic
# --------------------------------------------------------------------------


def _wrap(value: int, mode: Mode) -> int:
    width = MODE_WIDTH[mode]
    masked = value & ((1 << width) - 1)
    if mode in SIGNED_MODES and masked >= 1 << (width - 1):
        masked -= 1 << width
    return masked


def _trunc_div(a: int, b: int) -> int:
    quotient = abs(a) // abs(b)
    return quotient if (a < 0) == (b < 0) else -quotient


def _round_float(value: float, mode: Mode) -> float:
    if mode is Mode.F:
        try:
            return struct.unpack("<f", struct.pack("<f", value))[0]
        except OverflowError:
            return math.copysign(math.inf, value)
    return value


def eval_unary(op: UnaryOp, mode: Mode, value: ConstValue) -> ConstValue | None:
    """Fold a unary operation; ``None`` means no fold.

    Negation and complement wrap in the mode's two's-complement width (``Not``
    on booleans is logical).  ``Conv`` converts to ``mode``: integer widths by
    truncation or signedness-preserving extension, int/float crossings by
    rounding toward zero.  The single-operand shift and rotate kinds carry no
    shift amount and never fold.
    """
    if op in (UnaryOp.Rotl, UnaryOp.Shl, UnaryOp.Shr, UnaryOp.Shrs):
        return None
    if op is UnaryOp.Minus:
        if isinstance(value, IntV) and value.mode is mode:
            return IntV(mode, _wrap(-value.value, mode))
        if isinstance(value, FloatV) and value.mode is mode:
            return FloatV(mode, _round_float(-value.value, mode))
        return None
    if op is UnaryOp.Not:
        if isinstance(value, BoolV) and mode is Mode.b:
            return BoolV(1 - value.value)
        if isinstance(value, IntV) and value.mode is mode:
            return IntV(mode, _wrap(~value.value, mode))
        return None
    # Conv
    if mode in INTEGER_MODES:
        if isinstance(value, IntV):
            return IntV(mode, _wrap(value.value, mode))
        if isinstance(value, FloatV):
            if math.isnan(value.value) or math.isinf(value.value):
                return None
            return IntV(mode, _wrap(math.trunc(value.value), mode))
        return None
    if mode in FLOAT_MODES:
        if isinstance(value, IntV):
            return FloatV(mode, _round_float(float(value.value), mode))
        if isinstance(value, FloatV):
            return FloatV(mode, _round_float(value.value, mode))
        return None
    return None


def eval_binary(
    op: BinaryOp, mode: Mode, left: ConstValue, right: ConstValue
) -> ConstValue | None:
    """Fold a binary operation; ``None`` means no fold.

    Integer arithmetic wraps in the mode width; division and modulo truncate
    toward zero and never fold a zero divisor.  ``Cmp`` folds to a boolean
    equality result.  Float arithmetic is computed in 64 bits and rounded to
    the mode.
    """
    if op is BinaryOp.Cmp:
        if type(left) is not type(right):
            return None
        if not isinstance(left, BoolV) and left.mode is not right.mode:
            return None
        return BoolV(1 if left.value == right.value else 0)
    if isinstance(left, IntV) and isinstance(right, IntV):
        if not (left.mode is right.mode is mode):
            return None
        a, b = left.value, right.value
        width_mask = (1 << MODE_WIDTH[mode]) - 1
        if op is BinaryOp.Add:
            return IntV(mode, _wrap(a + b, mode))
        if op is BinaryOp.Sub:
            return IntV(mode, _wrap(a - b, mode))
        if op is BinaryOp.Mul:
            return IntV(mode, _wrap(a * b, mode))
        if op is BinaryOp.And:
            return IntV(mode, _wrap((a & width_mask) & (b & width_mask), mode))
        if op is BinaryOp.Or:
            return IntV(mode, _wrap((a & width_mask) | (b & width_mask), mode))
        if op is BinaryOp.Eor:
            return IntV(mode, _wrap((a & width_mask) ^ (b & width_mask), mode))
        if b == 0:
            return None
        if op is BinaryOp.Div:
            return IntV(mode, _wrap(_trunc_div(a, b), mode))
        return IntV(mode, _wrap(a - b * _trunc_div(a, b), mode))
    if isinstance(left, FloatV) and isinstance(right, FloatV):
        if not (left.mode is right.mode is mode):
            return None
        a, b = left.value, right.value
        if op is BinaryOp.Add:
            result = a + b
        elif op is BinaryOp.Sub:
            result = a - b
        elif op is BinaryOp.Mul:
            result = a * b
        elif op is BinaryOp.Div:
            result = math.inf * math.copysign(1.0, a) * math.copysign(1.0, b) if b == 0 else a / b
            if a == 0 and b == 0:
                return None
        else:
            return None
        if math.isnan(result):
            return None
        return FloatV(mode, _round_float(result, mode))
    if isinstance(left, BoolV) and isinstance(right, BoolV) and mode is Mode.b:
        if op is BinaryOp.And:
            return BoolV(left.value & right.value)
        if op is BinaryOp.Or:
            return BoolV(left.value | right.value)
        if op is BinaryOp.Eor:
            return BoolV(left.value ^ right.value)
        return None
    return None


def operation_mode(node_mode: Mode, operand: ConstValue) -> Mode:
    """Mode an operation is evaluated in: the node's own mode when concrete,
    otherwise the operand value's mode."""
    if node_mode is not Mode.NotYetComputed:
        return node_mode
    return const_mode(operand)


def _const_of(graph: FirmGraph, nid: NodeId) -> ConstValue | None:
    kind = graph.kind(nid)
    if isinstance(kind, NumericConst):
        return kind.value
    return None


# --------------------------------------------------------------------------
# Copy-on-write rewriting
# --------------------------------------------------------------------------


def _rebuild_kind(kind: NodeKind, mapping) -> NodeKind:
    """Clone a kind with every predecessor reference passed through
    ``mapping``; returns the original object when nothing changed."""
    changed = False

    def m(ref: NodeId) -> NodeId:
        nonlocal changed
        new = mapping(ref)
        if new != ref:
            changed = True
        return new

    if isinstance(kind, Block):
        new = Block({i: m(v) for i, v in sorted(kind.predecs.items())})
    elif isinstance(kind, Cond):
        new = Cond(m(kind.selector))
    elif isinstance(kind, Phi):
        new = Phi({i: m(v) for i, v in sorted(kind.alternatives.items())})
    elif isinstance(kind, ProjX):
        new = ProjX(m(kind.input), kind.selection)
    elif isinstance(kind, Binary):
        new = Binary(kind.op, m(kind.left), m(kind.right))
    else:
        spec = kind_ref_specs(kind)
        if not spec:
            return kind
        updates = {}
        for label, targets, _ in spec:
            name = label.split("[")[0]
            current = getattr(kind, name)
            if isinstance(current, tuple):
                updates[name] = tuple(m(t) for t in current)
            else:
                updates[name] = m(current)
        new = replace(kind, **updates)
    return new if changed else kind


class _Rewriter:
    """Bottom-up rewrite from End.

    Values and control-flow nodes are memoized and cloned only when a
    predecessor changed; blocks are visited once each and updated in place,
    which is what lets self-referential control flow converge.
    """

    def __init__(self, graph: FirmGraph, report: PassReport) -> None:
        self.graph = graph
        self.report = report
        self.memo: dict[NodeId, NodeId] = {}
        # block entries rewrite once even when shared (None = entry removed)
        self.entry_memo: dict[NodeId, NodeId | None] = {}
        self.blocks_seen: set[NodeId] = set()

    def run(self) -> None:
        if self.graph.end is not None:
            self.rewrite(self.graph.end)

    def rewrite(self, nid: NodeId) -> NodeId:
        known = self.memo.get(nid)
        if known is not None:
            return known
        node = self.graph.node(nid)
        if isinstance(node.kind, Block):
            self.ensure_block(nid)
            self.memo[nid] = nid
            return nid
        self.ensure_block(node.block)
        new_kind = _rebuild_kind(node.kind, self.rewrite)
        result = self.transform(nid, new_kind)
        if result is None:
            if new_kind is node.kind:
                result = nid
            else:
                result = self.graph.add_node(
                    new_kind,
                    node.block,
                    mode=node.mode,
                    location=node.location,
                    gxl_id=node.gxl_id,
                )
        self.memo[nid] = result
        return result

    def transform(self, nid: NodeId, new_kind: NodeKind) -> NodeId | None:
        """Hook: return a replacement id, or None to keep/clone as usual."""
        return None

    def ensure_block(self, bid: NodeId) -> None:
        if bid in self.blocks_seen:
            return
        self.blocks_seen.add(bid)
        kind = self.graph.kind(bid)
        entries: dict[int, NodeId] = {}
        changed = False
        for i in sorted(kind.predecs):
            cf = kind.predecs[i]
            if cf in self.entry_memo:
                outcome = self.entry_memo[cf]
            else:
                outcome = self.rewrite_entry(bid, cf)
                self.entry_memo[cf] = outcome
            if outcome is None:
                changed = True
                self.report.edges_removed += 1
                continue
            entries[i] = outcome
            if outcome != cf:
                changed = True
        if changed:
            self.graph.set_block_predecs(bid, entries)

    def rewrite_entry(self, bid: NodeId, cf: NodeId) -> NodeId | None:
        """Hook for block predecessor entries; None removes the entry."""
        return self.rewrite(cf)


class _FoldRewriter(_Rewriter):
    def __init__(
        self,
        graph: FirmGraph,
        report: PassReport,
        diagnostics: list[gxl.Diagnostic],
        fold_cmp: bool,
    ) -> None:
        super().__init__(graph, report)
        self.diagnostics = diagnostics
        self.fold_cmp = fold_cmp
        self._reported_conds: set[NodeId] = set()

    def _fold_to_const(self, nid: NodeId, value: ConstValue) -> NodeId:
        node = self.graph.node(nid)
        self.report.nodes_replaced += 1
        return self.graph.add_node(
            NumericConst(const_text(value), value),
            node.block,
            mode=const_mode(value),
            location=node.location,
        )

    def transform(self, nid: NodeId, new_kind: NodeKind) -> NodeId | None:
        node = self.graph.node(nid)
        if isinstance(new_kind, Binary):
            if new_kind.op is BinaryOp.Cmp and not self.fold_cmp:
                return None
            left = _const_of(self.graph, new_kind.left)
            right = _const_of(self.graph, new_kind.right)
            if left is None or right is None:
                return None
            mode = Mode.b if new_kind.op is BinaryOp.Cmp else operation_mode(node.mode, left)
            value = eval_binary(new_kind.op, mode, left, right)
            if value is None:
                return None
            return self._fold_to_const(nid, value)
        if isinstance(new_kind, Unary):
            operand = _const_of(self.graph, new_kind.on)
            if operand is None:
                return None
            if new_kind.op is UnaryOp.Conv:
                mode = node.mode
            else:
                mode = operation_mode(node.mode, operand)
            value = eval_unary(new_kind.op, mode, operand)
            if value is None:
                return None
            return self._fold_to_const(nid, value)
        return None

    def rewrite_entry(self, bid: NodeId, cf: NodeId) -> NodeId | None:
        kind = self.graph.kind(cf)
        if not isinstance(kind, ProjX):
            return self.rewrite(cf)
        cond = self.rewrite(kind.input)
        selector_id = self.graph.kind(cond).selector
        selector = self.graph.node(selector_id)
        const = selector.kind.value if isinstance(selector.kind, NumericConst) else None
        if const is not None:
            if not is_valid_cond_selector(selector.mode):
                if kind.input not in self._reported_conds:
                    self._reported_conds.add(kind.input)
                    self.diagnostics.append(
                        gxl.error(
                            self.graph.node(cf).location,
                            "type check error, argument to cond must be of integer type",
                        )
                    )
            else:
                if kind.selection == const.value:
                    proj = self.graph.node(cf)
                    self.report.nodes_replaced += 1
                    return self.graph.add_node(
                        Jmp(), proj.block, location=proj.location
                    )
                return None  # the untaken branch: drop this entry
        if cond == kind.input:
            return cf
        proj = self.graph.node(cf)
        return self.graph.add_node(
            ProjX(cond, kind.selection),
            proj.block,
            mode=proj.mode,
            location=proj.location,
        )


def fold_constants(
    graph: FirmGraph,
    diagnostics: list[gxl.Diagnostic] | None = None,
    *,
    fold_cmp: bool = True,
) -> tuple[FirmGraph, PassReport]:
    """Replace constant-operand arithmetic by fresh constants and resolve
    control-flow projections over constant conditions.

    A projection whose selection matches the constant becomes an
    unconditional jump in its block; a non-matching one is removed from the
    containing block's predecessor map.  A constant Cond selector of
    non-integer, non-boolean mode is reported once per Cond and left alone.
    """
    report = PassReport(PASS_FOLD)
    sink = diagnostics if diagnostics is not None else []
    _FoldRewriter(graph, report, sink, fold_cmp).run()
    return graph, report


# --------------------------------------------------------------------------
# Dead block elimination
# --------------------------------------------------------------------------


def eliminate_dead_blocks(graph: FirmGraph) -> PassReport:
    """Drop block predecessor entries that cannot originate from live control
    flow.

    A block is alive iff some predecessor is the Start node or originates in
    an alive block (least fixed point, so cyclic control flow that lost its
    entry edge dies).  Runs in place over the blocks backward-reachable from
    the end block.
    """
    report = PassReport(PASS_DEAD_BLOCKS)
    if graph.end is None:
        return report
    end_block = graph.node(graph.end).block
    start_block = graph.node(graph.start).block if graph.start is not None else None

    collected: list[NodeId] = []
    seen: set[NodeId] = set()
    stack = [end_block]
    while stack:
        bid = stack.pop()
        if bid in seen:
            continue
        seen.add(bid)
        collected.append(bid)
        for cf in graph.kind(bid).predecs.values():
            if isinstance(graph.kind(cf), Start):
                continue
            stack.append(graph.node(cf).block)

    # The start block is alive by definition (execution begins there even
    # though it has no predecessors); everything else needs a live entry.
    alive: set[NodeId] = set() if start_block is None else {start_block}
    changed = True
    while changed:
        changed = False
        for bid in collected:
            if bid in alive:
                continue
            for cf in graph.kind(bid).predecs.values():
                if isinstance(graph.kind(cf), Start) or graph.node(cf).block in alive:
                    alive.add(bid)
                    changed = True
                    break

    for bid in collected:
        predecs = graph.kind(bid).predecs
        kept = {
            i: cf
            for i, cf in predecs.items()
            if isinstance(graph.kind(cf), Start) or graph.node(cf).block in alive
        }
        if len(kept) != len(predecs):
            report.edges_removed += len(predecs) - len(kept)
            graph.set_block_predecs(bid, kept)
    report.blocks_removed = sum(1 for bid in collected if bid not in alive)
    return report


# --------------------------------------------------------------------------
# Predecessor index normalization
# --------------------------------------------------------------------------


def normalize_predec_indices(graph: FirmGraph) -> PassReport:
    """Renumber surviving block predecessor keys to ``0..n-1``, applying the
    same order-preserving map to every phi in the block so the key pairing
    between a block and its phis is preserved.  Phi alternatives whose edge
    is gone are dropped alongside."""
    report = PassReport(PASS_NORMALIZE)
    reachable = graph.reachable()
    phis_by_block: dict[NodeId, list[NodeId]] = {}
    blocks: list[NodeId] = []
    for nid in reachable:
        kind = graph.kind(nid)
        if isinstance(kind, Block):
            blocks.append(nid)
        elif isinstance(kind, Phi):
            phis_by_block.setdefault(graph.node(nid).block, []).append(nid)
    for bid in blocks:
        keys = sorted(graph.kind(bid).predecs)
        if keys == list(range(len(keys))):
            continue
        remap = {old: new for new, old in enumerate(keys)}
        predecs = graph.kind(bid).predecs
        graph.set_block_predecs(bid, {remap[i]: cf for i, cf in predecs.items()})
        report.nodes_replaced += 1
        for pid in phis_by_block.get(bid, ()):
            alternatives = graph.kind(pid).alternatives
            renumbered = {
                remap[i]: alt for i, alt in alternatives.items() if i in remap
            }
            if renumbered != alternatives:
                report.edges_removed += len(alternatives) - len(renumbered)
                graph.replace_kind(pid, Phi(renumbered))
                report.nodes_replaced += 1
    return report


# --------------------------------------------------------------------------
# Dead phi elimination
# --------------------------------------------------------------------------


class _DeadPhiRewriter(_Rewriter):
    def transform(self, nid: NodeId, new_kind: NodeKind) -> NodeId | None:
        if not isinstance(new_kind, Phi):
            return None
        node = self.graph.node(nid)
        keys = self.graph.kind(node.block).predecs.keys()
        surviving = {i: alt for i, alt in new_kind.alternatives.items() if i in keys}
        dropped = len(new_kind.alternatives) - len(surviving)
        if len(surviving) == 0:
            self.report.phis_removed += 1
            self.report.edges_removed += dropped
            return self.graph.add_node(Bad(), node.block, location=node.location)
        if len(surviving) == 1:
            self.report.phis_removed += 1
            self.report.edges_removed += dropped
            (only,) = surviving.values()
            return only
        if dropped:
            self.report.edges_removed += dropped
            return self.graph.add_node(
                Phi(surviving),
                node.block,
                mode=node.mode,
                location=node.location,
                gxl_id=node.gxl_id,
            )
        return None


def eliminate_dead_phis(graph: FirmGraph) -> tuple[FirmGraph, PassReport]:
    """Restrict phi alternatives to the keys surviving in the containing
    block; a phi left with one input is replaced by that input, one left
    with none becomes Bad."""
    report = PassReport(PASS_DEAD_PHIS)
    _DeadPhiRewriter(graph, report).run()
    return graph, report


# --------------------------------------------------------------------------
# Driver
# --------------------------------------------------------------------------


def optimize(
    graph: FirmGraph,
    options: OptimizeOptions | None = None,
    diagnostics: list[gxl.Diagnostic] | None = None,
    stage_hook=None,
) -> tuple[FirmGraph, list[PassReport]]:
    """Run the pass pipeline to a fixed point.

    One iteration is fold, dead-block elimination, index normalization, and
    dead-phi elimination; iteration stops when a whole round reports no
    change or after ``max_iterations`` rounds (the latter adds a warning
    diagnostic).  ``stage_hook(label, graph)`` is invoked after every pass
    when the options ask for stage dumps.
    """
    opts = options or OptimizeOptions()
    reports: list[PassReport] = []

    def hook(label: str) -> None:
        if stage_hook is not None and opts.emit_dot_after_each_stage:
            stage_hook(label, graph)

    for iteration in range(opts.max_iterations):
        round_reports: list[PassReport] = []
        if PASS_FOLD in opts.enabled:
            _, report = fold_constants(graph, diagnostics, fold_cmp=opts.fold_cmp)
            round_reports.append(report)
            hook(f"{iteration + 1:02d}-{PASS_FOLD}")
        if PASS_DEAD_BLOCKS in opts.enabled:
            round_reports.append(eliminate_dead_blocks(graph))
            hook(f"{iteration + 1:02d}-{PASS_DEAD_BLOCKS}")
        if PASS_NORMALIZE in opts.enabled:
            round_reports.append(normalize_predec_indices(graph))
            hook(f"{iteration + 1:02d}-{PASS_NORMALIZE}")
        if PASS_DEAD_PHIS in opts.enabled:
            _, report = eliminate_dead_phis(graph)
            round_reports.append(report)
            hook(f"{iteration + 1:02d}-{PASS_DEAD_PHIS}")
        reports.extend(round_reports)
        if not any(r.changed for r in round_reports):
            break
    else:
        if diagnostics is not None:
            diagnostics.append(
                gxl.warning(
                    None,
                    f"optimizer did not reach a fixed point within "
                    f"{opts.max_iterations} iterations",
                )
            )
    return graph, reports
