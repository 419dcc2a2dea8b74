"""Typed in-memory model of GXL 1.0 documents plus a location-aware XML codec.

The dialect is the one used by graph interchange files for compiler IRs:
``gxl/graph/node/edge/rel/relend`` elements, ``type`` references via
``xlink:href``, and typed ``attr`` values (``locator``/``bool``/``int``/
``float``/``string``/``enum`` plus the aggregates ``seq``/``set``/``bag``/
``tup``).  No DTD validation is performed; all checks are structural.
"""

from __future__ import annotations

import enum
import xml.parsers.expat
from dataclasses import dataclass, field
from xml.sax.saxutils import escape, quoteattr

XLINK_NAMESPACE = "http://www.w3.org/1999/xlink"

# 64-bit signed range for <int> values; width interpretation happens downstream.
INT_MIN = -(2**63)
INT_MAX = 2**63 - 1


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"
    HINT = "hint"


@dataclass(frozen=True)
class SourceLocation:
    document_id: str
    line: int  # 1-based
    column: int  # 1-based

    def __str__(self) -> str:
        return f"{self.document_id}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    location: SourceLocation | None
    text: str

    def render(self) -> str:
        if self.location is None:
            return f"{self.severity.value}: {self.text}"
        return f"{self.severity.value}: {self.location}: {self.text}"


def error(location: SourceLocation | None, text: str) -> Diagnostic:
    return Diagnostic(Severity.ERROR, location, text)


def warning(location: SourceLocation | None, text: str) -> Diagnostic:
    return Diagnostic(Severity.WARNING, location, text)


def hint(location: SourceLocation | None, text: str) -> Diagnostic:
    return Diagnostic(Severity.HINT, location, text)


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)


class Edgemode(enum.Enum):
    directed = "directed"
    undirected = "undirected"
    defaultdirected = "defaultdirected"
    defaultundirected = "defaultundirected"


class Direction(enum.Enum):
    in_ = "in"
    out = "out"
    none = "none"


# --------------------------------------------------------------------------
# Attribute values
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Locator:
    href: str


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Float:
    value: float


@dataclass(frozen=True)
class Str:
    value: str


@dataclass(frozen=True)
class Enum:
    value: str


@dataclass(frozen=True)
class Seq:
    elems: tuple["GxlValue", ...]


@dataclass(frozen=True)
class Set:
    elems: tuple["GxlValue", ...]


@dataclass(frozen=True)
class Bag:
    elems: tuple["GxlValue", ...]


@dataclass(frozen=True)
class Tup:
    elems: tuple["GxlValue", ...]


GxlValue = Locator | Bool | Int | Float | Str | Enum | Seq | Set | Bag | Tup


# --------------------------------------------------------------------------
# Document structure
# --------------------------------------------------------------------------


@dataclass
class GxlAttr:
    name: str
    value: GxlValue
    id: str | None = None
    kind: str | None = None
    location: SourceLocation | None = field(default=None, compare=False, repr=False)


@dataclass
class GxlNode:
    id: str
    type_ref: str | None = None
    attrs: list[GxlAttr] = field(default_factory=list)
    subgraphs: list["GxlGraph"] = field(default_factory=list)
    location: SourceLocation | None = field(default=None, compare=False, repr=False)


@dataclass
class GxlEdge:
    from_id: str
    to_id: str
    id: str | None = None
    type_ref: str | None = None
    fromorder: int | None = None
    toorder: int | None = None
    isdirected: bool | None = None
    attrs: list[GxlAttr] = field(default_factory=list)
    subgraphs: list["GxlGraph"] = field(default_factory=list)
    location: SourceLocation | None = field(default=None, compare=False, repr=False)


@dataclass
class GxlRelend:
    target_id: str
    role: str | None = None
    direction: Direction | None = None
    startorder: int | None = None
    endorder: int | None = None
    attrs: list[GxlAttr] = field(default_factory=list)
    location: SourceLocation | None = field(default=None, compare=False, repr=False)


@dataclass
class GxlRel:
    id: str | None = None
    type_ref: str | None = None
    isdirected: bool | None = None
    attrs: list[GxlAttr] = field(default_factory=list)
    subgraphs: list["GxlGraph"] = field(default_factory=list)
    relends: list[GxlRelend] = field(default_factory=list)
    location: SourceLocation | None = field(default=None, compare=False, repr=False)


GxlPart = GxlNode | GxlEdge | GxlRel


@dataclass
class GxlGraph:
    id: str
    type_ref: str | None = None
    role: str | None = None
    edgeids: bool = False
    hypergraph: bool = False
    edgemode: Edgemode = Edgemode.directed
    attrs: list[GxlAttr] = field(default_factory=list)
    parts: list[GxlPart] = field(default_factory=list)
    location: SourceLocation | None = field(default=None, compare=False, repr=False)


@dataclass
class GxlDocument:
    graphs: list[GxlGraph] = field(default_factory=list)
    location: SourceLocation | None = field(default=None, compare=False, repr=False)


def find_attr(attrs: list[GxlAttr], name: str) -> GxlValue | None:
    """First-match lookup of an attribute value by name, in document order."""
    for attr in attrs:
        if attr.name == name:
            return attr.value
    return None


def iter_parts(graph: GxlGraph):
    """Yield all parts of a graph, descending into part subgraphs."""
    for part in graph.parts:
        yield part
        for sub in part.subgraphs:
            yield from iter_parts(sub)


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------


class _XmlElement:
    """Minimal raw element: tag, xml attributes, children, text, location."""

    __slots__ = ("tag", "attrs", "children", "text", "location")

    def __init__(self, tag: str, attrs: dict[str, str], location: SourceLocation):
        self.tag = tag
        self.attrs = attrs
        self.children: list[_XmlElement] = []
        self.text: list[str] = []
        self.location = location


def _read_xml_tree(
    data: bytes, document_id: str, diags: list[Diagnostic]
) -> _XmlElement | None:
    parser = xml.parsers.expat.ParserCreate()
    root: list[_XmlElement] = []
    stack: list[_XmlElement] = []

    def loc() -> SourceLocation:
        return SourceLocation(
            document_id, parser.CurrentLineNumber, parser.CurrentColumnNumber + 1
        )

    def start(tag: str, attrs: dict[str, str]) -> None:
        elem = _XmlElement(tag, attrs, loc())
        if stack:
            stack[-1].children.append(elem)
        else:
            root.append(elem)
        stack.append(elem)

    def end(tag: str) -> None:
        stack.pop()

    def chars(text: str) -> None:
        if stack:
            stack[-1].text.append(text)

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    try:
        parser.Parse(data, True)
    except xml.parsers.expat.ExpatError as exc:
        diags.append(
            error(
                SourceLocation(document_id, parser.ErrorLineNumber, parser.ErrorColumnNumber + 1),
                f"not well-formed XML: {xml.parsers.expat.errors.messages[exc.code]}",
            )
        )
        return None
    return root[0] if root else None


_VALUE_TAGS = {"locator", "bool", "int", "float", "string", "enum", "seq", "set", "bag", "tup"}


class _DocumentReader:
    """Converts the raw element tree into the typed model, collecting diagnostics."""

    def __init__(self, document_id: str, diags: list[Diagnostic]):
        self.document_id = document_id
        self.diags = diags
        # id -> location of first use, for the homonym check
        self._ids: dict[str, SourceLocation | None] = {}
        self._parts_by_id: dict[str, GxlPart] = {}
        self._edges: list[GxlEdge] = []
        self._rels: list[GxlRel] = []

    def error(self, location: SourceLocation | None, text: str) -> None:
        self.diags.append(error(location, text))

    # -- id handling

    def _register_id(self, ident: str | None, location: SourceLocation | None) -> None:
        if ident is None:
            return
        if ident in self._ids:
            self.error(location, f"illegal homonymous element ID: {ident}")
            if self._ids[ident] is not None:
                self.diags.append(hint(self._ids[ident], "previous use here"))
            return
        self._ids[ident] = location

    # -- attribute helpers on raw elements

    def _req(self, elem: _XmlElement, name: str) -> str | None:
        if name not in elem.attrs:
            self.error(elem.location, f"missing required attribute '{name}' on <{elem.tag}>")
            return None
        return elem.attrs[name]

    def _int_of(self, text: str, location: SourceLocation | None) -> int | None:
        stripped = text.strip()
        sign = stripped[1:] if stripped[:1] in "+-" else stripped
        if not sign.isdigit():
            self.error(location, f"illegal integer: {text}")
            return None
        value = int(stripped)
        if not INT_MIN <= value <= INT_MAX:
            self.error(location, f"illegal integer: {text}")
            return None
        return value

    def _bool_of(self, text: str, location: SourceLocation | None) -> bool | None:
        stripped = text.strip()
        if stripped == "true":
            return True
        if stripped == "false":
            return False
        self.error(location, f"illegal boolean: {text}")
        return None

    def _int_attr(self, elem: _XmlElement, name: str) -> int | None:
        if name not in elem.attrs:
            return None
        return self._int_of(elem.attrs[name], elem.location)

    def _bool_attr(self, elem: _XmlElement, name: str) -> bool | None:
        if name not in elem.attrs:
            return None
        return self._bool_of(elem.attrs[name], elem.location)

    def _text_of(self, elem: _XmlElement) -> str:
        return "".join(elem.text)

    def _no_stray_text(self, elem: _XmlElement) -> None:
        if self._text_of(elem).strip():
            self.error(elem.location, f"unexpected text content in <{elem.tag}>")

    # -- element readers

    def read(self, root: _XmlElement) -> GxlDocument:
        if root.tag != "gxl":
            self.error(root.location, f"expected root element <gxl>, found <{root.tag}>")
            return GxlDocument()
        doc = GxlDocument(location=root.location)
        self._no_stray_text(root)
        for child in root.children:
            if child.tag == "graph":
                doc.graphs.append(self._graph(child))
            else:
                self.error(child.location, f"unknown element <{child.tag}> in <gxl>")
        self._resolve_references()
        self._check_cycles()
        return doc

    def _graph(self, elem: _XmlElement) -> GxlGraph:
        ident = self._req(elem, "id") or ""
        self._register_id(elem.attrs.get("id"), elem.location)
        graph = GxlGraph(id=ident, location=elem.location)
        graph.role = elem.attrs.get("role")
        edgeids = self._bool_attr(elem, "edgeids")
        if edgeids is not None:
            graph.edgeids = edgeids
        hypergraph = self._bool_attr(elem, "hypergraph")
        if hypergraph is not None:
            graph.hypergraph = hypergraph
        if "edgemode" in elem.attrs:
            try:
                graph.edgemode = Edgemode(elem.attrs["edgemode"])
            except ValueError:
                self.error(elem.location, f"unknown edgemode value: {elem.attrs['edgemode']}")
        self._no_stray_text(elem)
        for child in elem.children:
            if child.tag == "type":
                self._set_type(graph, child)
            elif child.tag == "attr":
                attr = self._attr(child)
                if attr is not None:
                    graph.attrs.append(attr)
            elif child.tag == "node":
                graph.parts.append(self._node(child))
            elif child.tag == "edge":
                graph.parts.append(self._edge(child))
            elif child.tag == "rel":
                graph.parts.append(self._rel(child))
            else:
                self.error(child.location, f"unknown element <{child.tag}> in <graph>")
        return graph

    def _set_type(self, owner, elem: _XmlElement) -> None:
        href = self._req(elem, "xlink:href")
        if owner.type_ref is not None:
            self.error(elem.location, "duplicate <type> element")
            return
        owner.type_ref = href or ""

    def _node(self, elem: _XmlElement) -> GxlNode:
        ident = self._req(elem, "id") or ""
        self._register_id(elem.attrs.get("id"), elem.location)
        node = GxlNode(id=ident, location=elem.location)
        self._part_children(node, elem)
        if node.id:
            self._parts_by_id.setdefault(node.id, node)
        return node

    def _edge(self, elem: _XmlElement) -> GxlEdge:
        from_id = self._req(elem, "from") or ""
        to_id = self._req(elem, "to") or ""
        self._register_id(elem.attrs.get("id"), elem.location)
        edge = GxlEdge(from_id=from_id, to_id=to_id, id=elem.attrs.get("id"), location=elem.location)
        edge.fromorder = self._int_attr(elem, "fromorder")
        edge.toorder = self._int_attr(elem, "toorder")
        edge.isdirected = self._bool_attr(elem, "isdirected")
        self._part_children(edge, elem)
        if edge.id:
            self._parts_by_id.setdefault(edge.id, edge)
        self._edges.append(edge)
        return edge

    def _rel(self, elem: _XmlElement) -> GxlRel:
        self._register_id(elem.attrs.get("id"), elem.location)
        rel = GxlRel(id=elem.attrs.get("id"), location=elem.location)
        rel.isdirected = self._bool_attr(elem, "isdirected")
        self._no_stray_text(elem)
        for child in elem.children:
            if child.tag == "type":
                self._set_type(rel, child)
            elif child.tag == "attr":
                attr = self._attr(child)
                if attr is not None:
                    rel.attrs.append(attr)
            elif child.tag == "graph":
                rel.subgraphs.append(self._graph(child))
            elif child.tag == "relend":
                rel.relends.append(self._relend(child))
            else:
                self.error(child.location, f"unknown element <{child.tag}> in <rel>")
        if rel.id:
            self._parts_by_id.setdefault(rel.id, rel)
        self._rels.append(rel)
        return rel

    def _part_children(self, part, elem: _XmlElement) -> None:
        self._no_stray_text(elem)
        for child in elem.children:
            if child.tag == "type":
                self._set_type(part, child)
            elif child.tag == "attr":
                attr = self._attr(child)
                if attr is not None:
                    part.attrs.append(attr)
            elif child.tag == "graph":
                part.subgraphs.append(self._graph(child))
            else:
                self.error(child.location, f"unknown element <{child.tag}> in <{elem.tag}>")

    def _relend(self, elem: _XmlElement) -> GxlRelend:
        target = self._req(elem, "target") or ""
        relend = GxlRelend(target_id=target, location=elem.location)
        relend.role = elem.attrs.get("role")
        if "direction" in elem.attrs:
            try:
                relend.direction = Direction(elem.attrs["direction"])
            except ValueError:
                self.error(elem.location, f"unknown direction value: {elem.attrs['direction']}")
        relend.startorder = self._int_attr(elem, "startorder")
        relend.endorder = self._int_attr(elem, "endorder")
        self._no_stray_text(elem)
        for child in elem.children:
            if child.tag == "attr":
                attr = self._attr(child)
                if attr is not None:
                    relend.attrs.append(attr)
            else:
                self.error(child.location, f"unknown element <{child.tag}> in <relend>")
        return relend

    def _attr(self, elem: _XmlElement) -> GxlAttr | None:
        name = self._req(elem, "name")
        self._register_id(elem.attrs.get("id"), elem.location)
        self._no_stray_text(elem)
        values = []
        for child in elem.children:
            if child.tag in _VALUE_TAGS:
                value = self._value(child)
                if value is not None:
                    values.append(value)
            else:
                self.error(child.location, f"unknown element <{child.tag}> in <attr>")
        if name is None:
            return None
        if len(values) != 1:
            self.error(elem.location, f"attr '{name}' must carry exactly one value")
            return None
        return GxlAttr(
            name=name,
            value=values[0],
            id=elem.attrs.get("id"),
            kind=elem.attrs.get("kind"),
            location=elem.location,
        )

    def _value(self, elem: _XmlElement) -> GxlValue | None:
        tag = elem.tag
        if tag == "locator":
            href = self._req(elem, "xlink:href")
            return None if href is None else Locator(href)
        if tag == "bool":
            parsed = self._bool_of(self._text_of(elem), elem.location)
            return None if parsed is None else Bool(parsed)
        if tag == "int":
            parsed = self._int_of(self._text_of(elem), elem.location)
            return None if parsed is None else Int(parsed)
        if tag == "float":
            text = self._text_of(elem).strip()
            if "_" in text:
                self.error(elem.location, f"illegal float: {text}")
                return None
            try:
                return Float(float(text))
            except ValueError:
                self.error(elem.location, f"illegal float: {text}")
                return None
        if tag == "string":
            return Str(self._text_of(elem))
        if tag == "enum":
            return Enum(self._text_of(elem).strip())
        elems = []
        for child in elem.children:
            if child.tag in _VALUE_TAGS:
                value = self._value(child)
                if value is not None:
                    elems.append(value)
            else:
                self.error(child.location, f"unknown element <{child.tag}> in <{tag}>")
        aggregate = {"seq": Seq, "set": Set, "bag": Bag, "tup": Tup}[tag]
        return aggregate(tuple(elems))

    # -- post passes

    def _resolve_references(self) -> None:
        for edge in self._edges:
            for ref in (edge.from_id, edge.to_id):
                if ref not in self._parts_by_id:
                    self.error(edge.location, f"undefined IDREF: {ref}")
        for rel in self._rels:
            for relend in rel.relends:
                if relend.target_id not in self._parts_by_id:
                    self.error(relend.location, f"undefined IDREF: {relend.target_id}")

    def _check_cycles(self) -> None:
        """Reject cyclic cross-references among parts (edge chains referencing
        each other); construction order for such documents is undefined."""
        WHITE, GRAY, BLACK = 0, 1, 2
        color: dict[int, int] = {}

        def refs(part: GxlPart) -> list[GxlPart]:
            if isinstance(part, GxlEdge):
                ids = [part.from_id, part.to_id]
            elif isinstance(part, GxlRel):
                ids = [r.target_id for r in part.relends]
            else:
                return []
            return [self._parts_by_id[i] for i in ids if i in self._parts_by_id]

        for start_part in list(self._edges) + list(self._rels):
            if color.get(id(start_part), WHITE) is not WHITE:
                continue
            stack: list[tuple[GxlPart, int]] = [(start_part, 0)]
            color[id(start_part)] = GRAY
            while stack:
                part, next_child = stack[-1]
                children = refs(part)
                if next_child < len(children):
                    stack[-1] = (part, next_child + 1)
                    child = children[next_child]
                    state = color.get(id(child), WHITE)
                    if state == GRAY:
                        self.error(part.location, "cyclic cross-reference")
                        return
                    if state == WHITE:
                        color[id(child)] = GRAY
                        stack.append((child, 0))
                else:
                    color[id(part)] = BLACK
                    stack.pop()


def parse_gxl(
    data: bytes | str, document_id: str = "<gxl>"
) -> tuple[GxlDocument | None, list[Diagnostic]]:
    """Parse a GXL document.

    Returns the typed document and all diagnostics.  Any error diagnostic
    means no document is returned.  Parsing resolves forward ID references
    (two-pass per document), checks document-wide ID uniqueness and rejects
    cyclic cross-references among parts.
    """
    if isinstance(data, str):
        data = data.encode("utf-8")
    diags: list[Diagnostic] = []
    root = _read_xml_tree(data, document_id, diags)
    if root is None:
        return None, diags
    doc = _DocumentReader(document_id, diags).read(root)
    if has_errors(diags):
        return None, diags
    return doc, diags


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------


def _text(value: str) -> str:
    # expat would fold a bare CR into LF on re-parse; escape it.
    return escape(value).replace("\r", "&#13;")


def _float_text(value: float) -> str:
    return repr(value)


def _xml_attrs(pairs: list[tuple[str, str | None]]) -> str:
    chunks = []
    for name, value in pairs:
        if value is not None:
            chunks.append(f" {name}={quoteattr(value)}")
    return "".join(chunks)


def _bool_text(value: bool) -> str:
    return "true" if value else "false"


class _Writer:
    def __init__(self) -> None:
        self.lines: list[str] = []

    def line(self, depth: int, text: str) -> None:
        self.lines.append("  " * depth + text)

    def value(self, depth: int, value: GxlValue) -> None:
        if isinstance(value, Locator):
            self.line(depth, f"<locator{_xml_attrs([('xlink:href', value.href)])}/>")
        elif isinstance(value, Bool):
            self.line(depth, f"<bool>{_bool_text(value.value)}</bool>")
        elif isinstance(value, Int):
            self.line(depth, f"<int>{value.value}</int>")
        elif isinstance(value, Float):
            self.line(depth, f"<float>{_float_text(value.value)}</float>")
        elif isinstance(value, Str):
            self.line(depth, f"<string>{_text(value.value)}</string>")
        elif isinstance(value, Enum):
            self.line(depth, f"<enum>{_text(value.value)}</enum>")
        else:
            tag = {Seq: "seq", Set: "set", Bag: "bag", Tup: "tup"}[type(value)]
            if not value.elems:
                self.line(depth, f"<{tag}/>")
                return
            self.line(depth, f"<{tag}>")
            for elem in value.elems:
                self.value(depth + 1, elem)
            self.line(depth, f"</{tag}>")

    def type_ref(self, depth: int, href: str | None) -> None:
        if href is not None:
            self.line(depth, f"<type{_xml_attrs([('xlink:href', href)])}/>")

    def attr(self, depth: int, attr: GxlAttr) -> None:
        head = _xml_attrs([("id", attr.id), ("name", attr.name), ("kind", attr.kind)])
        self.line(depth, f"<attr{head}>")
        self.value(depth + 1, attr.value)
        self.line(depth, "</attr>")

    def _container(self, depth: int, tag: str, head: str, body) -> None:
        opening = f"<{tag}{head}"
        probe = len(self.lines)
        self.lines.append("")  # placeholder for the opening tag
        body(depth + 1)
        if len(self.lines) == probe + 1:
            self.lines[probe] = "  " * depth + opening + "/>"
        else:
            self.lines[probe] = "  " * depth + opening + ">"
            self.line(depth, f"</{tag}>")

    def graph(self, depth: int, graph: GxlGraph) -> None:
        head = _xml_attrs(
            [
                ("id", graph.id),
                ("role", graph.role),
                ("edgeids", _bool_text(graph.edgeids) if graph.edgeids else None),
                ("hypergraph", _bool_text(graph.hypergraph) if graph.hypergraph else None),
                (
                    "edgemode",
                    graph.edgemode.value if graph.edgemode is not Edgemode.directed else None,
                ),
            ]
        )

        def body(d: int) -> None:
            self.type_ref(d, graph.type_ref)
            for attr in graph.attrs:
                self.attr(d, attr)
            for part in graph.parts:
                self.part(d, part)

        self._container(depth, "graph", head, body)

    def part(self, depth: int, part: GxlPart) -> None:
        if isinstance(part, GxlNode):
            head = _xml_attrs([("id", part.id)])

            def body(d: int) -> None:
                self.type_ref(d, part.type_ref)
                for attr in part.attrs:
                    self.attr(d, attr)
                for sub in part.subgraphs:
                    self.graph(d, sub)

            self._container(depth, "node", head, body)
        elif isinstance(part, GxlEdge):
            head = _xml_attrs(
                [
                    ("id", part.id),
                    ("from", part.from_id),
                    ("to", part.to_id),
                    ("fromorder", None if part.fromorder is None else str(part.fromorder)),
                    ("toorder", None if part.toorder is None else str(part.toorder)),
                    ("isdirected", None if part.isdirected is None else _bool_text(part.isdirected)),
                ]
            )

            def body(d: int) -> None:
                self.type_ref(d, part.type_ref)
                for attr in part.attrs:
                    self.attr(d, attr)
                for sub in part.subgraphs:
                    self.graph(d, sub)

            self._container(depth, "edge", head, body)
        else:
            head = _xml_attrs(
                [
                    ("id", part.id),
                    ("isdirected", None if part.isdirected is None else _bool_text(part.isdirected)),
                ]
            )

            def body(d: int) -> None:
                self.type_ref(d, part.type_ref)
                for attr in part.attrs:
                    self.attr(d, attr)
                for sub in part.subgraphs:
                    self.graph(d, sub)
                for relend in part.relends:
                    self.relend(d, relend)

            self._container(depth, "rel", head, body)

    def relend(self, depth: int, relend: GxlRelend) -> None:
        head = _xml_attrs(
            [
                ("target", relend.target_id),
                ("role", relend.role),
                ("direction", None if relend.direction is None else relend.direction.value),
                ("startorder", None if relend.startorder is None else str(relend.startorder)),
                ("endorder", None if relend.endorder is None else str(relend.endorder)),
            ]
        )

        def body(d: int) -> None:
            for attr in relend.attrs:
                self.attr(d, attr)

        self._container(depth, "relend", head, body)


def serialize_gxl(doc: GxlDocument) -> bytes:
    """Serialize a document to canonical UTF-8 XML.

    Output is deterministic for equal inputs: 2-space indent, attributes in
    fixed model order, ``type`` first, then ``attr`` children, then parts and
    subgraphs.  Absent optional attributes and default-valued graph flags are
    omitted.  The ``xlink`` prefix is bound on the root element.
    """
    writer = _Writer()
    writer.lines.append('<?xml version="1.0" encoding="UTF-8"?>')
    head = _xml_attrs([("xmlns:xlink", XLINK_NAMESPACE)])

    def body(d: int) -> None:
        for graph in doc.graphs:
            writer.graph(d, graph)

    writer._container(0, "gxl", head, body)
    return ("\n".join(writer.lines) + "\n").encode("utf-8")
