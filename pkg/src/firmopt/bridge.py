"""Lossless translation between GXL documents and Firm graphs.

A case file carries two graphs: a metamodel graph describing the node
classes, and an object graph encoding the program.  Object nodes point at
their class via a local ``type`` href; edges carry an integer ``position``
attribute that selects the target field (``-1`` is block containment).
Conditional control flow is wired as ``#True``/``#False`` typed edges from a
block to a Cond and becomes an explicit control-flow projection in the IR;
the reverse direction flattens the projection back into a typed edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import gxl
from .firm import (
    Binary,
    BinaryOp,
    Block,
    BoolV,
    Cond,
    End,
    FirmGraph,
    FloatV,
    GraphError,
    IntV,
    Jmp,
    Mode,
    Mux,
    NodeId,
    NodeKind,
    NumericConst,
    Phi,
    ProjN,
    ProjX,
    Return,
    Role,
    Start,
    Sync,
    Unary,
    UnaryOp,
    implements_role,
    kind_name,
    mode_int_range,
)


class WireConstants:
    """Literal protocol constants of the case's wire format."""

    METAMODEL_HREF = "http://www.gupro.de/GXL/gxl-1.0.gxl#gxl-1.0"
    OBJECTMODEL_HREFS = ("#Firm", "#InstructionSelection")
    NODENAME_START = "Start"
    NODENAME_END = "End"
    ATTR_NAME = "name"
    ATTR_POSITION = "position"
    ATTR_VALUE = "value"
    BLOCK_TYPES = ("Block", "StartBlock", "EndBlock")
    BLOCK_CONTAINMENT_ORDER = -1
    EDGE_TRUE = "#True"
    EDGE_FALSE = "#False"
    START_POS_STACKFRAME = 0
    START_POS_HEAP = 1
    START_POS_ARGUMENTS = 2


_UNARY_CLASSES = {op.value: op for op in UnaryOp}
_BINARY_CLASSES = {op.value: op for op in BinaryOp}
_MEMORY_CLASSES = ("Store", "Load", "Alloc", "Sel", "Free", "Sync", "NoMem", "Call")


@dataclass
class DecodeResult:
    graph: FirmGraph | None
    metamodel: gxl.GxlGraph | None
    classname_to_meta_id: dict[str, str]
    diagnostics: list[gxl.Diagnostic] = field(default_factory=list)


class EncodeError(Exception):
    """A graph cannot be expressed in the wire format."""


def classify_graphs(
    doc: gxl.GxlDocument, diags: list[gxl.Diagnostic] | None = None
) -> tuple[gxl.GxlGraph | None, gxl.GxlGraph | None]:
    """Split a document into its metamodel and object graph by type href."""
    metamodel = objectmodel = None
    for graph in doc.graphs:
        if graph.type_ref is None:
            if diags is not None:
                diags.append(gxl.error(graph.location, "graph has no type reference"))
            continue
        if graph.type_ref == WireConstants.METAMODEL_HREF:
            if metamodel is not None:
                if diags is not None:
                    diags.append(gxl.error(graph.location, "more than one metamodel graph"))
                continue
            metamodel = graph
        elif graph.type_ref in WireConstants.OBJECTMODEL_HREFS:
            if objectmodel is not None:
                if diags is not None:
                    diags.append(gxl.error(graph.location, "more than one object model graph"))
                continue
            objectmodel = graph
    return metamodel, objectmodel


class _Sentinel:
    pass


_FAILED = _Sentinel()


class _Decoder:
    def __init__(self, doc: gxl.GxlDocument) -> None:
        self.doc = doc
        self.diags: list[gxl.Diagnostic] = []
        self.graph = FirmGraph()
        self.metamodel: gxl.GxlGraph | None = None
        self.objectmodel: gxl.GxlGraph | None = None
        self.meta_id_to_classname: dict[str, str] = {}
        self.classname_to_meta_id: dict[str, str] = {}
        self.all_nodes: list[gxl.GxlNode] = []
        self.node_by_id: dict[str, gxl.GxlNode] = {}
        self.node_class: dict[str, str] = {}
        self.outgoing: dict[str, dict[int, gxl.GxlEdge]] = {}
        self.start_node: gxl.GxlNode | None = None
        self.end_node: gxl.GxlNode | None = None
        # gxl node id -> firm node id, or _FAILED after an error
        self.correspondent: dict[str, NodeId | _Sentinel] = {}
        self.under_translation: set[str] = set()
        self.all_args: dict[NodeId, NodeId] = {}
        # blocks whose predecessor entries still need converting
        self.pending_blocks: list[tuple[gxl.GxlNode, NodeId]] = []

    def error(self, location: gxl.SourceLocation | None, text: str) -> None:
        self.diags.append(gxl.error(location, text))

    def run(self) -> DecodeResult:
        self.metamodel, self.objectmodel = classify_graphs(self.doc, self.diags)
        if self.metamodel is None:
            self.error(self.doc.location, "no metamodel graph found")
        else:
            self._collect_meta()
        if self.objectmodel is None:
            self.error(self.doc.location, "no object model graph found")
        else:
            self._collect_object()
        if not gxl.has_errors(self.diags):
            if not self.all_nodes:
                self.error(
                    self.objectmodel.location if self.objectmodel else None,
                    "no nodes found in the object model graph",
                )
            self._find_start_and_end()
        if not gxl.has_errors(self.diags):
            end_id = self.end_node.id
            self.under_translation.add(end_id)
            try:
                result = self.convert(self.end_node)
            except GraphError as exc:
                self.error(self.end_node.location, str(exc))
                result = None
            self.under_translation.discard(end_id)
            if result is not None:
                self.correspondent[end_id] = result
            self._drain_pending_blocks()
            start_firm = self.correspondent.get(self.start_node.id)
            if not isinstance(start_firm, int):
                self.error(
                    self.start_node.location, "start node is not reachable from the end node"
                )
        graph = None if gxl.has_errors(self.diags) else self.graph
        return DecodeResult(graph, self.metamodel, dict(self.classname_to_meta_id), self.diags)

    # -- collection passes

    def _collect_meta(self) -> None:
        for part in gxl.iter_parts(self.metamodel):
            if not isinstance(part, gxl.GxlNode):
                continue
            name = gxl.find_attr(part.attrs, WireConstants.ATTR_NAME)
            if name is None:
                continue
            if not isinstance(name, gxl.Str):
                self.error(part.location, "name attribute of a metamodel node must be a string")
                continue
            self.meta_id_to_classname[part.id] = name.value
            self.classname_to_meta_id[name.value] = part.id

    def _collect_object(self) -> None:
        for part in gxl.iter_parts(self.objectmodel):
            if isinstance(part, gxl.GxlNode):
                self.all_nodes.append(part)
                self.node_by_id[part.id] = part
        for part in gxl.iter_parts(self.objectmodel):
            if not isinstance(part, gxl.GxlEdge):
                continue
            position = gxl.find_attr(part.attrs, WireConstants.ATTR_POSITION)
            if not isinstance(position, gxl.Int):
                self.error(part.location, "edge has no integer 'position' attribute")
                continue
            if part.from_id not in self.node_by_id:
                self.error(part.location, "edge must start at a node of the object graph")
                continue
            per_node = self.outgoing.setdefault(part.from_id, {})
            if position.value in per_node:
                self.error(
                    part.location,
                    f"duplicate use of position {position.value} on node {part.from_id}",
                )
                continue
            per_node[position.value] = part

    def _find_start_and_end(self) -> None:
        for node in self.all_nodes:
            if node.type_ref is None:
                self.error(node.location, "object node has no type reference")
                continue
            if not node.type_ref.startswith("#"):
                self.error(node.location, f'unknown node type "{node.type_ref}"')
                continue
            classname = self.meta_id_to_classname.get(node.type_ref[1:])
            if classname is None:
                self.error(node.location, f'unknown node type "{node.type_ref}"')
                continue
            self.node_class[node.id] = classname
            if classname == WireConstants.NODENAME_END:
                if self.end_node is not None:
                    self.error(node.location, "A second end node found")
                else:
                    self.end_node = node
            elif classname == WireConstants.NODENAME_START:
                if self.start_node is not None:
                    self.error(node.location, "A second start node found")
                else:
                    self.start_node = node
        if self.end_node is None:
            self.error(None, "no end node in the object graph")
        if self.start_node is None:
            self.error(None, "no start node in the object graph")

    # -- conversion

    def _find_target(
        self, node: gxl.GxlNode, position: int, strict: bool
    ) -> gxl.GxlNode | None:
        edge = self.outgoing.get(node.id, {}).get(position)
        if edge is None:
            if strict:
                self.error(
                    node.location,
                    f"expected an edge at position {position} of node {node.id} "
                    f"({self.node_class.get(node.id, '?')})",
                )
            return None
        target = self.node_by_id.get(edge.to_id)
        if target is None:
            self.error(edge.location, "edge points to something that is not an object node")
            return None
        return target

    def _check_expectation(self, firm_id: NodeId, expect, location) -> NodeId | None:
        kind = self.graph.kind(firm_id)
        if isinstance(expect, Role):
            if expect not in implements_role(kind):
                self.error(
                    location,
                    f"target of {expect.value} field is a {kind_name(kind)}, "
                    f"which does not implement {expect.value}",
                )
                return None
        elif not isinstance(kind, expect):
            self.error(
                location,
                f"expected a {expect.__name__} here, got {kind_name(kind)}",
            )
            return None
        return firm_id

    def convert_target(
        self, node: gxl.GxlNode, position: int, expect, strict: bool = True
    ) -> NodeId | None:
        """Follow the outgoing edge at ``position`` and convert its target,
        requiring the result to satisfy ``expect`` (a Role or a kind class)."""
        target = self._find_target(node, position, strict)
        if target is None:
            return None
        known = self.correspondent.get(target.id)
        if known is _FAILED:
            return None
        if isinstance(known, int):
            return self._check_expectation(known, expect, target.location)
        if target.id in self.under_translation:
            # Blocks register themselves before recursing, so any id still
            # under translation closes a cycle through non-Block nodes.
            self.error(target.location, f"cyclic reference through non-block node {target.id}")
            return None
        self.under_translation.add(target.id)
        try:
            converted = self.convert(target)
        except GraphError as exc:
            self.error(target.location, str(exc))
            converted = None
        self.under_translation.discard(target.id)
        if converted is None:
            self.correspondent[target.id] = _FAILED
            return None
        self.correspondent[target.id] = converted
        return self._check_expectation(converted, expect, target.location)

    def convert(self, node: gxl.GxlNode) -> NodeId | None:
        classname = self.node_class[node.id]
        if classname in WireConstants.BLOCK_TYPES:
            return self.convert_block(node)

        block = self.convert_target(
            node, WireConstants.BLOCK_CONTAINMENT_ORDER, Block, strict=True
        )
        if block is None:
            return None
        loc = node.location

        def add(kind: NodeKind, mode: Mode = Mode.NotYetComputed) -> NodeId:
            return self.graph.add_node(kind, block, mode=mode, location=loc, gxl_id=node.id)

        if classname == "Return":
            memstate = self.convert_target(node, 0, Role.MEMORY_STATE)
            if memstate is None:
                return None
            positions = sorted(k for k in self.outgoing.get(node.id, {}) if k >= 1)
            if positions != list(range(1, len(positions) + 1)):
                self.error(loc, "return result positions must be 1..n without gaps")
                return None
            results = []
            for i in positions:
                result = self.convert_target(node, i, Role.NUMERIC)
                if result is None:
                    return None
                results.append(result)
            return add(Return(memstate, tuple(results)))
        if classname == "Start":
            return add(Start())
        if classname == "Jmp":
            return add(Jmp())
        if classname == "End":
            return add(End())
        if classname == "Phi":
            alternatives: dict[int, NodeId] = {}
            for i in sorted(self.outgoing.get(node.id, {})):
                if i == WireConstants.BLOCK_CONTAINMENT_ORDER:
                    continue
                alt = self.convert_target(node, i, Role.NUMERIC)
                if alt is None:
                    return None
                alternatives[i] = alt
            return add(Phi(alternatives))
        if classname == "Cond":
            selector = self.convert_target(node, 0, Role.NUMERIC)
            if selector is None:
                return None
            return add(Cond(selector))
        if classname == "Argument":
            # Function parameters arrive as projections out of the Start
            # node's argument tuple (position 2); the inner projection is
            # shared per Start node.
            start = self.convert_target(node, 0, Start)
            if start is None:
                return None
            position = gxl.find_attr(node.attrs, WireConstants.ATTR_POSITION)
            if not isinstance(position, gxl.Int):
                self.error(loc, "position attribute missing for Argument")
                return None
            return add(ProjN(self._all_args_of(start), position.value))
        if classname == "Const":
            return self._convert_const(node, add)
        if classname in _UNARY_CLASSES:
            on = self.convert_target(node, 0, Role.NUMERIC)
            if on is None:
                return None
            return add(Unary(_UNARY_CLASSES[classname], on))
        if classname in _BINARY_CLASSES:
            left = self.convert_target(node, 0, Role.NUMERIC)
            right = self.convert_target(node, 1, Role.NUMERIC)
            if left is None or right is None:
                return None
            return add(Binary(_BINARY_CLASSES[classname], left, right))
        if classname == "Mux":
            first = self.convert_target(node, 0, Role.NUMERIC)
            second = self.convert_target(node, 1, Role.NUMERIC)
            third = self.convert_target(node, 2, Role.NUMERIC)
            if first is None or second is None or third is None:
                return None
            return add(Mux(first, second, third))
        if classname in _MEMORY_CLASSES:
            self.error(loc, f"memory operation node class not supported: {classname}")
            return None
        self.error(loc, f"no decode rule for node class {classname}")
        return None

    def _all_args_of(self, start: NodeId) -> NodeId:
        proj = self.all_args.get(start)
        if proj is None:
            start_node = self.graph.node(start)
            proj = self.graph.add_node(
                ProjN(start, WireConstants.START_POS_ARGUMENTS),
                start_node.block,
                location=start_node.location,
            )
            self.all_args[start] = proj
        return proj

    def _convert_const(self, node: gxl.GxlNode, add) -> NodeId | None:
        value = gxl.find_attr(node.attrs, WireConstants.ATTR_VALUE)
        if value is None:
            self.error(node.location, "Const node has no value attribute")
            return None
        if isinstance(value, gxl.Int):
            lo, hi = mode_int_range(Mode.Is)
            if not lo <= value.value <= hi:
                self.error(
                    node.location,
                    f"integer constant does not fit mode Is: {value.value}",
                )
                return None
            const = IntV(Mode.Is, value.value)
            return add(NumericConst(str(value.value), const), mode=Mode.Is)
        if isinstance(value, gxl.Float):
            const = FloatV(Mode.F, value.value)
            return add(NumericConst(repr(value.value), const), mode=Mode.F)
        kind = {
            gxl.Bool: "boolean",
            gxl.Str: "string",
            gxl.Enum: "enum",
            gxl.Locator: "locator",
        }.get(type(value), "aggregate")
        self.error(node.location, f"constants of {kind} type should not appear")
        return None

    def convert_block(self, node: gxl.GxlNode) -> NodeId:
        # Register the block immediately and defer its predecessor entries:
        # control flow may legally cycle back through the block's own nodes,
        # which need the block to exist before they can be built.
        bid = self.graph.add_node(Block({}), location=node.location, gxl_id=node.id)
        self.correspondent[node.id] = bid
        self.pending_blocks.append((node, bid))
        return bid

    def _drain_pending_blocks(self) -> None:
        while self.pending_blocks:
            node, bid = self.pending_blocks.pop(0)
            predecs: dict[int, NodeId] = {}
            for i in sorted(self.outgoing.get(node.id, {})):
                edge = self.outgoing[node.id][i]
                href = edge.type_ref
                if href in (WireConstants.EDGE_TRUE, WireConstants.EDGE_FALSE):
                    cond = self.convert_target(node, i, Cond)
                    if cond is None:
                        continue
                    cond_node = self.graph.node(cond)
                    selection = 1 if href == WireConstants.EDGE_TRUE else 0
                    cf = self.graph.add_node(
                        ProjX(cond, selection), cond_node.block, location=cond_node.location
                    )
                else:
                    cf = self.convert_target(node, i, Role.CONTROL_FLOW)
                if cf is not None:
                    predecs[i] = cf
            try:
                self.graph.set_block_predecs(bid, predecs)
            except GraphError as exc:
                self.error(node.location, str(exc))


def decode(doc: gxl.GxlDocument) -> DecodeResult:
    """Decode a parsed case file into a Firm graph.

    The result carries the untouched metamodel graph and the class-name map
    needed to re-encode; ``graph`` is present iff there are no error
    diagnostics.
    """
    return _Decoder(doc).run()


# --------------------------------------------------------------------------
# Encoding
# --------------------------------------------------------------------------


def _argument_idiom(graph: FirmGraph, kind: NodeKind) -> NodeId | None:
    """Return the Start id if ``kind`` is the two-level argument projection."""
    if not isinstance(kind, ProjN):
        return None
    inner = graph.kind(kind.predec)
    if not isinstance(inner, ProjN) or inner.pos != WireConstants.START_POS_ARGUMENTS:
        return None
    if not isinstance(graph.kind(inner.predec), Start):
        return None
    return inner.predec


def _const_value_attr(kind: NumericConst) -> gxl.GxlValue:
    value = kind.value
    if isinstance(value, IntV):
        return gxl.Int(value.value)
    if isinstance(value, FloatV):
        return gxl.Float(value.value)
    if isinstance(value, BoolV):
        # The wire format has no boolean constants; emit the bit.
        return gxl.Int(value.value)
    text = kind.unparsed.strip()
    try:
        return gxl.Int(int(text, 10))
    except ValueError:
        pass
    try:
        return gxl.Float(float(text))
    except ValueError:
        raise EncodeError(f"constant has no encodable value: {kind.unparsed!r}")


class _Encoder:
    def __init__(
        self,
        graph: FirmGraph,
        metamodel: gxl.GxlGraph,
        classname_to_meta_id: dict[str, str],
        graph_id: str,
    ) -> None:
        self.graph = graph
        self.metamodel = metamodel
        self.class_ids = classname_to_meta_id
        self.model = gxl.GxlGraph(id=graph_id, type_ref=WireConstants.OBJECTMODEL_HREFS[0])
        self.node_map: dict[NodeId, gxl.GxlNode] = {}
        self.emitted: list[NodeId] = []

    def run(self) -> gxl.GxlDocument:
        if self.graph.end is None:
            raise EncodeError("graph has no end node")
        self._write_nodes()
        self._write_edges()
        return gxl.GxlDocument(graphs=[self.metamodel, self.model])

    def _classname(self, nid: NodeId) -> str:
        kind = self.graph.kind(nid)
        if isinstance(kind, Block):
            return "Block"
        if isinstance(kind, NumericConst):
            return "Const"
        if isinstance(kind, (Unary, Binary)):
            return kind.op.value
        if isinstance(kind, ProjN):
            if _argument_idiom(self.graph, kind) is not None:
                return "Argument"
            raise EncodeError(
                "numeric projection outside the Argument idiom cannot be encoded"
            )
        name = kind_name(kind)
        if name in ("Start", "Return", "End", "Jmp", "Cond", "Sync", "Phi", "Mux"):
            return name
        raise EncodeError(f"node kind {name} has no wire representation")

    def _emit_node(self, nid: NodeId) -> None:
        classname = self._classname(nid)
        meta_id = self.class_ids.get(classname)
        if meta_id is None:
            raise EncodeError(f"node class {classname} is not mapped in the metamodel")
        fresh = f"node{10000 + len(self.node_map)}"
        gnode = gxl.GxlNode(id=fresh, type_ref=f"#{meta_id}")
        kind = self.graph.kind(nid)
        if isinstance(kind, NumericConst):
            gnode.attrs.append(gxl.GxlAttr(WireConstants.ATTR_VALUE, _const_value_attr(kind)))
        elif classname == "Argument":
            gnode.attrs.append(gxl.GxlAttr(WireConstants.ATTR_POSITION, gxl.Int(kind.pos)))
        self.node_map[nid] = gnode
        self.model.parts.append(gnode)
        self.emitted.append(nid)

    def _children(self, nid: NodeId) -> list[NodeId]:
        kind = self.graph.kind(nid)
        start = _argument_idiom(self.graph, kind)
        if start is not None:
            return [self.graph.node(nid).block, start]
        return self.graph.children(nid)

    def _write_nodes(self) -> None:
        seen: set[NodeId] = set()
        stack = [self.graph.end]
        while stack:
            nid = stack.pop()
            if nid in seen:
                continue
            seen.add(nid)
            kind = self.graph.kind(nid)
            if not isinstance(kind, ProjX):
                self._emit_node(nid)
            stack.extend(reversed(self._children(nid)))

    def _write_edge(self, src: NodeId, dst: NodeId, position: int) -> gxl.GxlEdge:
        edge = gxl.GxlEdge(from_id=self.node_map[src].id, to_id=self.node_map[dst].id)
        edge.attrs.append(gxl.GxlAttr(WireConstants.ATTR_POSITION, gxl.Int(position)))
        self.model.parts.append(edge)
        return edge

    def _write_edges(self) -> None:
        for nid in self.emitted:
            node = self.graph.node(nid)
            kind = node.kind
            if node.block is not None:
                self._write_edge(nid, node.block, WireConstants.BLOCK_CONTAINMENT_ORDER)
            if isinstance(kind, Block):
                for i in sorted(kind.predecs):
                    target = kind.predecs[i]
                    target_kind = self.graph.kind(target)
                    if isinstance(target_kind, ProjX):
                        edge = self._write_edge(nid, target_kind.input, i)
                        edge.type_ref = (
                            WireConstants.EDGE_FALSE
                            if target_kind.selection == 0
                            else WireConstants.EDGE_TRUE
                        )
                    else:
                        self._write_edge(nid, target, i)
            elif isinstance(kind, Return):
                self._write_edge(nid, kind.memstate, 0)
                for i, result in enumerate(kind.results, start=1):
                    self._write_edge(nid, result, i)
            elif isinstance(kind, Cond):
                self._write_edge(nid, kind.selector, 0)
            elif isinstance(kind, Sync):
                for i, member in enumerate(sorted(kind.predecs)):
                    self._write_edge(nid, member, i)
            elif isinstance(kind, Phi):
                for i in sorted(kind.alternatives):
                    self._write_edge(nid, kind.alternatives[i], i)
            elif isinstance(kind, Unary):
                self._write_edge(nid, kind.on, 0)
            elif isinstance(kind, Binary):
                self._write_edge(nid, kind.left, 0)
                self._write_edge(nid, kind.right, 1)
            elif isinstance(kind, ProjN):
                self._write_edge(nid, _argument_idiom(self.graph, kind), 0)
            elif isinstance(kind, Mux):
                self._write_edge(nid, kind.first, 0)
                self._write_edge(nid, kind.second, 1)
                self._write_edge(nid, kind.third, 2)


def encode(
    graph: FirmGraph,
    metamodel: gxl.GxlGraph,
    classname_to_meta_id: dict[str, str],
    graph_id: str,
) -> gxl.GxlDocument:
    """Encode a Firm graph as a case file document.

    The metamodel graph is included verbatim first, followed by a fresh
    object graph named ``graph_id``.  Pass one writes a node per reachable
    Firm node (control-flow projections excepted) with fresh ids counting
    from ``node10000``; pass two writes the position-attributed edges.
    Raises :class:`EncodeError` for kinds the wire format cannot express.
    """
    return _Encoder(graph, metamodel, classname_to_meta_id, graph_id).run()
