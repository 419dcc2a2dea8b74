"""GraphViz rendering of Firm graphs: one cluster per block, solid
predecessor edges annotated with their index, dashed containment edges."""

from __future__ import annotations

from .firm import (
    Binary,
    Block,
    FirmGraph,
    Mode,
    NodeId,
    NumericConst,
    ProjN,
    ProjX,
    SymConst,
    Unary,
    kind_name,
    kind_ref_specs,
)


def _label(graph: FirmGraph, nid: NodeId) -> str:
    node = graph.node(nid)
    kind = node.kind
    if isinstance(kind, NumericConst):
        text = f"Const {kind.unparsed}"
    elif isinstance(kind, SymConst):
        text = f"SymConst {kind.unparsed}"
    elif isinstance(kind, ProjX):
        text = f"Proj_X[{kind.selection}]"
    elif isinstance(kind, ProjN):
        text = f"Proj_N[{kind.pos}]"
    elif isinstance(kind, (Unary, Binary)):
        text = kind.op.value
    else:
        text = kind_name(kind)
    if node.mode is not Mode.NotYetComputed:
        text += f" [{node.mode.value}]"
    return text


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(graph: FirmGraph) -> str:
    """Deterministic DOT rendering of the reachable part of a graph."""
    reachable = graph.reachable()
    blocks = [nid for nid in reachable if isinstance(graph.kind(nid), Block)]
    by_block: dict[NodeId, list[NodeId]] = {bid: [] for bid in blocks}
    for nid in reachable:
        block = graph.node(nid).block
        if block is not None:
            by_block[block].append(nid)

    lines = ["digraph firm {", "  node [shape=box, fontname=monospace];"]
    for bid in sorted(blocks):
        node = graph.node(bid)
        name = node.gxl_id or f"#{bid}"
        lines.append(f"  subgraph cluster_{bid} {{")
        lines.append(f"    label={_quote(f'Block {name}')};")
        lines.append(f"    n{bid} [label={_quote(f'Block {name}')}, style=bold];")
        for nid in sorted(by_block[bid]):
            lines.append(f"    n{nid} [label={_quote(_label(graph, nid))}];")
        lines.append("  }")
    for nid in sorted(reachable):
        kind = graph.kind(nid)
        if isinstance(kind, Block):
            for i in sorted(kind.predecs):
                lines.append(f'  n{nid} -> n{kind.predecs[i]} [label="{i}"];')
            continue
        position = 0
        for _, targets, _ in kind_ref_specs(kind):
            for target in targets:
                lines.append(f'  n{nid} -> n{target} [label="{position}"];')
                position += 1
        block = graph.node(nid).block
        lines.append(f"  n{nid} -> n{block} [style=dashed, constraint=false];")
    lines.append("}")
    return "\n".join(lines) + "\n"
