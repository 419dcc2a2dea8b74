"""Consistency checker for Firm graphs.

Runs over a blocks-once traversal from End, never mutates, and reports all
findings as diagnostics.  An empty result (no errors) means the graph is
valid.  Properties already guaranteed by construction (unique Start/End,
block containment, reachability from End) are not re-reported.
"""

from __future__ import annotations

from . import gxl
from .firm import (
    Block,
    Cond,
    FirmGraph,
    INTEGER_MODES,
    Jmp,
    Mode,
    NodeId,
    NumericConst,
    Phi,
    Return,
    kind_refs,
)


def check_index_set(keys) -> bool:
    """True iff ``keys`` is exactly ``{0, ..., len(keys) - 1}``."""
    count = len(keys)
    return all(0 <= key < count for key in keys)


def is_valid_cond_selector(mode: Mode) -> bool:
    """A Cond may select on booleans or any integer mode."""
    return mode is Mode.b or mode in INTEGER_MODES


def check(graph: FirmGraph) -> list[gxl.Diagnostic]:
    """Validate a graph and return all findings (errors and warnings)."""
    diags: list[gxl.Diagnostic] = []

    def err(nid: NodeId, text: str) -> None:
        diags.append(gxl.error(graph.node(nid).location, text))

    def warn(nid: NodeId, text: str) -> None:
        diags.append(gxl.warning(graph.node(nid).location, text))

    reachable = graph.reachable()
    blocks = [nid for nid in reachable if isinstance(graph.kind(nid), Block)]
    end_block = graph.node(graph.end).block if graph.end is not None else None
    start_block = graph.node(graph.start).block if graph.start is not None else None

    # Per-block terminator memo (Jmp/Cond/Return; the Start node stands in
    # as its own block's terminator).
    terminators: dict[NodeId, list[NodeId]] = {b: [] for b in blocks}
    phis: list[NodeId] = []
    consts: list[NodeId] = []
    members: dict[NodeId, list[NodeId]] = {b: [] for b in blocks}
    for nid in reachable:
        node = graph.node(nid)
        if node.block is not None and node.block in members:
            members[node.block].append(nid)
        if isinstance(node.kind, (Jmp, Cond, Return)) and node.block in terminators:
            terminators[node.block].append(nid)
        if isinstance(node.kind, Phi):
            phis.append(nid)
        elif isinstance(node.kind, NumericConst):
            consts.append(nid)

    # C1: every block except the end block has exactly one control flow node.
    # C2: the end block must not contain one that produces successors.
    for bid in blocks:
        terms = terminators[bid]
        if bid == end_block:
            if any(isinstance(graph.kind(t), (Jmp, Cond)) for t in terms):
                err(bid, "The block containing the end node does contain a jump/cond node")
            continue
        if len(terms) > 1:
            err(bid, "Block contains more than one control flow")
        elif not terms and bid != start_block:
            err(bid, "this block does not contain a jump/cond node")

    # C3/C4: phi alternatives match the containing block, numbered densely.
    for pid in phis:
        phi = graph.kind(pid)
        block_kind = graph.kind(graph.node(pid).block)
        if len(phi.alternatives) != len(block_kind.predecs):
            err(
                pid,
                "phi node has not the same count of outgoing edges(/input) "
                "as containing block.",
            )
        elif not check_index_set(phi.alternatives.keys()):
            err(pid, "phi node alternatives not numbered from zero, consecutively.")

    # C5: block predecessor keys are dense from zero.
    for bid in blocks:
        if not check_index_set(graph.kind(bid).predecs.keys()):
            err(
                bid,
                "block predecessors (/outgoing edges) not numbered from zero, "
                "consecutively.",
            )

    # E1: the start node reaches every block along inverted control flow.
    if start_block is not None:
        forward: dict[NodeId, set[NodeId]] = {b: set() for b in blocks}
        for bid in blocks:
            for cf in graph.kind(bid).predecs.values():
                src = graph.node(cf).block
                if src in forward:
                    forward[src].add(bid)
        seen = {start_block}
        stack = [start_block]
        while stack:
            for succ in forward.get(stack.pop(), ()):
                if succ not in seen:
                    seen.add(succ)
                    stack.append(succ)
        for bid in blocks:
            if bid not in seen:
                err(bid, "start node does not reach this block")

    # E2: per block, the data-dependence subgraph over non-Block, non-Phi
    # nodes is acyclic.
    for bid in blocks:
        scope = {n for n in members[bid] if not isinstance(graph.kind(n), Phi)}
        if _has_cycle_within(graph, scope):
            err(bid, "data dependences within this block are cyclic")

    # Advisory findings (never reject).
    if start_block is not None and len(members.get(start_block, [])) > 1:
        warn(start_block, "start node is not the only node in its block")
    if start_block is not None and graph.kind(start_block).predecs:
        warn(start_block, "start block has predecessors")
    if end_block is not None and len(members.get(end_block, [])) > 1:
        warn(end_block, "end node is not the only node in its block")
    for cid in consts:
        if graph.node(cid).block != start_block:
            warn(cid, "constant is not contained in the start block")
    return diags


def _has_cycle_within(graph: FirmGraph, scope: set[NodeId]) -> bool:
    WHITE, GRAY, BLACK = 0, 1, 2
    color = dict.fromkeys(scope, WHITE)
    for root in sorted(scope):
        if color[root] is not WHITE:
            continue
        stack = [(root, iter(kind_refs(graph.kind(root))))]
        color[root] = GRAY
        while stack:
            nid, refs = stack[-1]
            advanced = False
            for ref in refs:
                if ref not in scope:
                    continue
                if color[ref] == GRAY:
                    return True
                if color[ref] == WHITE:
                    color[ref] = GRAY
                    stack.append((ref, iter(kind_refs(graph.kind(ref)))))
                    advanced = True
                    break
            if not advanced:
                color[nid] = BLACK
                stack.pop()
    return False
