"""Codec round-trip properties over randomized documents."""

from hypothesis import given, settings, strategies as st

from firmopt.gxl import (
    Bag,
    Bool,
    Direction,
    Edgemode,
    Enum,
    Float,
    GxlAttr,
    GxlDocument,
    GxlEdge,
    GxlGraph,
    GxlNode,
    GxlRel,
    GxlRelend,
    Int,
    Locator,
    Seq,
    Set,
    Str,
    Tup,
    parse_gxl,
    serialize_gxl,
)

_text = st.text(
    alphabet=st.characters(min_codepoint=0x20, max_codepoint=0xD7FF),
    max_size=12,
)
_name = st.text(
    alphabet=st.sampled_from("abcdefghijklmnopqrstuvwxyz_-."), min_size=1, max_size=8
)
_int64 = st.integers(min_value=-(2**63), max_value=2**63 - 1)
_float = st.floats(allow_nan=False)
_optional_bool = st.none() | st.booleans()
_order = st.none() | st.integers(min_value=-4, max_value=4)


def _values(depth: int):
    leaf = st.one_of(
        _int64.map(Int),
        st.booleans().map(Bool),
        _float.map(Float),
        _text.map(Str),
        _name.map(Enum),
        _name.map(Locator),
    )
    if depth == 0:
        return leaf
    inner = st.lists(_values(depth - 1), max_size=3).map(tuple)
    return leaf | st.one_of(
        inner.map(Seq), inner.map(Set), inner.map(Bag), inner.map(Tup)
    )


def _attrs(ids):
    return st.lists(
        st.builds(
            GxlAttr,
            name=_name,
            value=_values(2),
            kind=st.none() | _name,
            id=st.just(None),
        ),
        max_size=3,
    )


@st.composite
def _documents(draw):
    counter = [0]

    def fresh_id() -> str:
        counter[0] += 1
        return f"id{counter[0]}"

    def graph(depth: int) -> GxlGraph:
        g = GxlGraph(
            id=fresh_id(),
            type_ref=draw(st.none() | _name.map(lambda s: "#" + s)),
            role=draw(st.none() | _name),
            edgeids=draw(st.booleans()),
            hypergraph=draw(st.booleans()),
            edgemode=draw(st.sampled_from(list(Edgemode))),
            attrs=draw(_attrs(None)),
        )
        node_ids = []
        for _ in range(draw(st.integers(0, 3))):
            node = GxlNode(id=fresh_id(), type_ref=draw(st.none() | _name),
                           attrs=draw(_attrs(None)))
            if depth > 0 and draw(st.booleans()):
                node.subgraphs.append(graph(depth - 1))
            node_ids.append(node.id)
            g.parts.append(node)
        if node_ids:
            for _ in range(draw(st.integers(0, 2))):
                g.parts.append(
                    GxlEdge(
                        from_id=draw(st.sampled_from(node_ids)),
                        to_id=draw(st.sampled_from(node_ids)),
                        id=fresh_id() if draw(st.booleans()) else None,
                        type_ref=draw(st.none() | _name),
                        fromorder=draw(_order),
                        toorder=draw(_order),
                        isdirected=draw(_optional_bool),
                        attrs=draw(_attrs(None)),
                    )
                )
            if draw(st.booleans()):
                rel = GxlRel(
                    id=fresh_id() if draw(st.booleans()) else None,
                    isdirected=draw(_optional_bool),
                    attrs=draw(_attrs(None)),
                )
                for _ in range(draw(st.integers(0, 2))):
                    rel.relends.append(
                        GxlRelend(
                            target_id=draw(st.sampled_from(node_ids)),
                            role=draw(st.none() | _name),
                            direction=draw(st.none() | st.sampled_from(list(Direction))),
                            startorder=draw(_order),
                            endorder=draw(_order),
                            attrs=draw(_attrs(None)),
                        )
                    )
                g.parts.append(rel)
        return g

    return GxlDocument(graphs=[graph(1) for _ in range(draw(st.integers(0, 2)))])


@settings(max_examples=100, deadline=None)
@given(_documents())
def test_parse_serialize_round_trip(doc):
    data = serialize_gxl(doc)
    reparsed, diags = parse_gxl(data)
    assert diags == []
    assert reparsed == doc
    # serialize/parse is stable on its own output as well
    assert serialize_gxl(reparsed) == data


def test_reparse_of_handwritten_dialect():
    text = b"""<gxl xmlns:xlink="http://www.w3.org/1999/xlink">
      <graph id="m" edgemode="defaultundirected" edgeids="true">
        <type xlink:href="http://example.org/schema#top"/>
        <attr name="seq" kind="meta"><seq><int>1</int><string>two</string></seq></attr>
        <node id="n1"><type xlink:href="#Class"/></node>
        <node id="n2"/>
        <edge from="n1" to="n2" fromorder="0" toorder="1" isdirected="false"/>
        <rel id="r1"><relend target="n1" role="a" direction="in" startorder="2"/></rel>
      </graph>
    </gxl>"""
    doc, diags = parse_gxl(text)
    assert diags == []
    once = serialize_gxl(doc)
    again, diags2 = parse_gxl(once)
    assert diags2 == []
    assert again == doc
    assert serialize_gxl(again) == once
