"""Reference evaluator for loop-free, memory-free graphs.

Execution starts in the Start node's block and follows control flow one
block at a time; within a block, the terminator's data dependencies are
evaluated on demand using the same constant arithmetic as the optimizer.
This is the semantics oracle the optimizer is tested against: anything the
evaluator cannot express is reported as unsupported rather than guessed.
"""

from __future__ import annotations

import enum

from .firm import (
    Binary,
    BinaryOp,
    Block,
    BoolV,
    Cond,
    ConstValue,
    FirmGraph,
    IntV,
    Jmp,
    Mode,
    Mux,
    NodeId,
    NumericConst,
    Phi,
    ProjN,
    ProjX,
    Return,
    Start,
    Unary,
    UnaryOp,
)
from .opt import eval_binary, eval_unary, operation_mode
from .bridge import WireConstants


class EvalStatus(enum.Enum):
    UNSUPPORTED = "unsupported"
    STEP_LIMIT_EXCEEDED = "step limit exceeded"


UNSUPPORTED = EvalStatus.UNSUPPORTED
STEP_LIMIT_EXCEEDED = EvalStatus.STEP_LIMIT_EXCEEDED


class _Unsupported(Exception):
    pass


class _StepLimit(Exception):
    pass


def evaluate(
    graph: FirmGraph, args: list[ConstValue], step_limit: int = 10_000
) -> list[ConstValue] | EvalStatus:
    """Run the graph on ``args`` and return the Return node's results.

    Supported are constants, unary/binary/mux arithmetic, the argument
    projection idiom reading ``args[k]``, phis reading the value for the
    control-flow edge just taken, and Jmp/Cond/Return control flow.  Memory
    operations, symbolic constants, tuples, other projections and the
    single-operand shift kinds yield :data:`UNSUPPORTED`; more than
    ``step_limit`` block transitions yield :data:`STEP_LIMIT_EXCEEDED`.
    """
    try:
        return _Machine(graph, args, step_limit).run()
    except _Unsupported:
        return UNSUPPORTED
    except _StepLimit:
        return STEP_LIMIT_EXCEEDED


class _Machine:
    def __init__(self, graph: FirmGraph, args: list[ConstValue], step_limit: int):
        self.graph = graph
        self.args = args
        self.step_limit = step_limit
        self.reachable = graph.reachable()
        self.phi_env: dict[NodeId, ConstValue] = {}
        # unique in-block terminator per block; the Start node acts as the
        # start block's terminator when no Jmp/Cond/Return lives there
        self.terminator: dict[NodeId, NodeId] = {}
        for nid in self.reachable:
            node = graph.node(nid)
            if isinstance(node.kind, (Jmp, Cond, Return)):
                if node.block in self.terminator:
                    raise _Unsupported
                self.terminator[node.block] = nid
        if graph.start is not None:
            start_block = graph.node(graph.start).block
            self.terminator.setdefault(start_block, graph.start)
        # consumers: plain control-flow entries and projection entries
        self.cf_consumers: dict[NodeId, list[tuple[NodeId, int]]] = {}
        self.proj_consumers: dict[NodeId, list[tuple[int, NodeId, int]]] = {}
        for bid in self.reachable:
            kind = graph.kind(bid)
            if not isinstance(kind, Block):
                continue
            for i, cf in kind.predecs.items():
                cf_kind = graph.kind(cf)
                if isinstance(cf_kind, ProjX):
                    self.proj_consumers.setdefault(cf_kind.input, []).append(
                        (cf_kind.selection, bid, i)
                    )
                else:
                    self.cf_consumers.setdefault(cf, []).append((bid, i))

    def run(self) -> list[ConstValue]:
        if self.graph.start is None or self.graph.end is None:
            raise _Unsupported
        current = self.graph.node(self.graph.start).block
        steps = 0
        while True:
            terminator = self.terminator.get(current)
            if terminator is None:
                raise _Unsupported
            memo: dict[NodeId, ConstValue] = {}
            kind = self.graph.kind(terminator)
            if isinstance(kind, Return):
                return [self.value(r, memo) for r in kind.results]
            if isinstance(kind, (Jmp, Start)):
                targets = self.cf_consumers.get(terminator, [])
                if len(targets) != 1:
                    raise _Unsupported
                destination, index = targets[0]
            else:  # Cond
                selector = self.value(kind.selector, memo)
                if not isinstance(selector, (IntV, BoolV)):
                    raise _Unsupported
                matches = [
                    (bid, i)
                    for selection, bid, i in self.proj_consumers.get(terminator, [])
                    if selection == selector.value
                ]
                if len(matches) != 1:
                    raise _Unsupported
                destination, index = matches[0]
            steps += 1
            if steps > self.step_limit:
                raise _StepLimit
            self.enter(destination, index)
            current = destination

    def enter(self, block: NodeId, index: int) -> None:
        """Compute all phi values for the taken edge before committing, so
        phis in the same block read the pre-transfer environment."""
        memo: dict[NodeId, ConstValue] = {}
        updates: list[tuple[NodeId, ConstValue]] = []
        for nid in self.reachable:
            node = self.graph.node(nid)
            if isinstance(node.kind, Phi) and node.block == block:
                alternative = node.kind.alternatives.get(index)
                if alternative is None:
                    raise _Unsupported
                updates.append((nid, self.value(alternative, memo)))
        self.phi_env.update(updates)

    def value(self, nid: NodeId, memo: dict[NodeId, ConstValue]) -> ConstValue:
        known = memo.get(nid)
        if known is not None:
            return known
        result = self._compute(nid, memo)
        memo[nid] = result
        return result

    def _compute(self, nid: NodeId, memo) -> ConstValue:
        node = self.graph.node(nid)
        kind = node.kind
        if isinstance(kind, NumericConst):
            if kind.value is None:
                raise _Unsupported
            return kind.value
        if isinstance(kind, Phi):
            try:
                return self.phi_env[nid]
            except KeyError:
                raise _Unsupported from None
        if isinstance(kind, Binary):
            left = self.value(kind.left, memo)
            right = self.value(kind.right, memo)
            mode = Mode.b if kind.op is BinaryOp.Cmp else operation_mode(node.mode, left)
            result = eval_binary(kind.op, mode, left, right)
            if result is None:
                raise _Unsupported
            return result
        if isinstance(kind, Unary):
            operand = self.value(kind.on, memo)
            mode = node.mode if kind.op is UnaryOp.Conv else operation_mode(node.mode, operand)
            result = eval_unary(kind.op, mode, operand)
            if result is None:
                raise _Unsupported
            return result
        if isinstance(kind, Mux):
            first = self.value(kind.first, memo)
            taken = kind.second if first.value != 0 else kind.third
            return self.value(taken, memo)
        if isinstance(kind, ProjN):
            inner = self.graph.kind(kind.predec)
            if (
                isinstance(inner, ProjN)
                and inner.pos == WireConstants.START_POS_ARGUMENTS
                and isinstance(self.graph.kind(inner.predec), Start)
            ):
                if 0 <= kind.pos < len(self.args):
                    return self.args[kind.pos]
            raise _Unsupported
        raise _Unsupported
