"""Shared fixtures: hand-built graphs, a standard metamodel, and randomized
graph/program generators used by the property and acceptance suites."""

from __future__ import annotations

import random

from firmopt import gxl
from firmopt.bridge import WireConstants
from firmopt.firm import (
    Binary,
    BinaryOp,
    Block,
    Cond,
    End,
    FirmGraph,
    FirmNode,
    IntV,
    Jmp,
    Mode,
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

CLASS_NAMES = [
    "Firm", "Block", "StartBlock", "EndBlock",
    "Start", "End", "Jmp", "Cond", "Return", "Phi", "Const", "Argument",
    "Sync", "Mux",
    "Add", "And", "Div", "Eor", "Mod", "Mul", "Or", "Sub", "Cmp",
    "Conv", "Minus", "Not", "Rotl", "Shl", "Shr", "Shrs",
]


def standard_metamodel() -> tuple[gxl.GxlGraph, dict[str, str]]:
    graph = gxl.GxlGraph(id="SCE_Firm", type_ref=WireConstants.METAMODEL_HREF)
    mapping = {}
    for name in CLASS_NAMES:
        meta_id = f"m{name}"
        graph.parts.append(
            gxl.GxlNode(id=meta_id, attrs=[gxl.GxlAttr("name", gxl.Str(name))])
        )
        mapping[name] = meta_id
    return graph, mapping


def copy_graph(g: FirmGraph) -> FirmGraph:
    """Independent arena copy (kinds holding dicts are duplicated)."""
    out = FirmGraph()
    for node in g._nodes:
        kind = node.kind
        if isinstance(kind, Block):
            kind = Block(dict(kind.predecs))
        elif isinstance(kind, Phi):
            kind = Phi(dict(kind.alternatives))
        out._nodes.append(FirmNode(kind, node.block, node.mode, node.location, node.gxl_id))
    out.end = g.end
    out.start = g.start
    return out


def const(g: FirmGraph, block: NodeId, value: int) -> NodeId:
    return g.add_node(NumericConst(str(value), IntV(Mode.Is, value)), block, mode=Mode.Is)


def minimal_graph() -> FirmGraph:
    """Start block / return block / end block; no warnings, no errors."""
    g = FirmGraph()
    sb = g.add_node(Block({}))
    start = g.add_node(Start(), sb)
    rb = g.add_node(Block({0: start}))
    ret = g.add_node(Return(start, ()), rb)
    eb = g.add_node(Block({0: ret}))
    g.add_node(End(), eb)
    return g


def diamond_direct(selector: int = 1, values: tuple[int, int] = (7, 9)) -> FirmGraph:
    """Degenerate diamond: both conditional edges run from the start block
    (which hosts the Cond) straight into the return block's phi."""
    g = FirmGraph()
    sb = g.add_node(Block({}))
    start = g.add_node(Start(), sb)
    sel = const(g, sb, selector)
    v_true = const(g, sb, values[0])
    v_false = const(g, sb, values[1])
    cond = g.add_node(Cond(sel), sb)
    p_true = g.add_node(ProjX(cond, 1), sb)
    p_false = g.add_node(ProjX(cond, 0), sb)
    rb = g.add_node(Block({0: p_true, 1: p_false}))
    phi = g.add_node(Phi({0: v_true, 1: v_false}), rb)
    ret = g.add_node(Return(start, (phi,)), rb)
    eb = g.add_node(Block({0: ret}))
    g.add_node(End(), eb)
    return g


def diamond_arms(selector: int = 1, values: tuple[int, int] = (7, 9)) -> FirmGraph:
    """Full diamond with one block per arm and a separate condition block."""
    g = FirmGraph()
    sb = g.add_node(Block({}))
    start = g.add_node(Start(), sb)
    sel = const(g, sb, selector)
    v_true = const(g, sb, values[0])
    v_false = const(g, sb, values[1])
    cb = g.add_node(Block({0: start}))
    cond = g.add_node(Cond(sel), cb)
    tb = g.add_node(Block({0: g.add_node(ProjX(cond, 1), cb)}))
    jmp_t = g.add_node(Jmp(), tb)
    fb = g.add_node(Block({0: g.add_node(ProjX(cond, 0), cb)}))
    jmp_f = g.add_node(Jmp(), fb)
    jb = g.add_node(Block({0: jmp_t, 1: jmp_f}))
    phi = g.add_node(Phi({0: v_true, 1: v_false}), jb)
    ret = g.add_node(Return(start, (phi,)), jb)
    eb = g.add_node(Block({0: ret}))
    g.add_node(End(), eb)
    return g


def nested_diamond() -> FirmGraph:
    """Two stacked constant conditions; the inner selector only becomes
    constant once the outer phi has been eliminated."""
    g = FirmGraph()
    sb = g.add_node(Block({}))
    start = g.add_node(Start(), sb)
    sel1 = const(g, sb, 1)
    a = const(g, sb, 2)
    b = const(g, sb, 3)
    cmp_rhs = const(g, sb, 2)
    r_true = const(g, sb, 10)
    r_false = const(g, sb, 20)

    c1b = g.add_node(Block({0: start}))
    cond1 = g.add_node(Cond(sel1), c1b)
    p1t = g.add_node(ProjX(cond1, 1), c1b)
    p1f = g.add_node(ProjX(cond1, 0), c1b)

    j1 = g.add_node(Block({0: p1t, 1: p1f}))
    phi1 = g.add_node(Phi({0: a, 1: b}), j1)
    cmp = g.add_node(Binary(BinaryOp.Cmp, phi1, cmp_rhs), j1)
    cond2 = g.add_node(Cond(cmp), j1)
    p2t = g.add_node(ProjX(cond2, 1), j1)
    p2f = g.add_node(ProjX(cond2, 0), j1)

    j2 = g.add_node(Block({0: p2t, 1: p2f}))
    phi2 = g.add_node(Phi({0: r_true, 1: r_false}), j2)
    ret = g.add_node(Return(start, (phi2,)), j2)
    eb = g.add_node(Block({0: ret}))
    g.add_node(End(), eb)
    return g


def two_block_loop() -> tuple[FirmGraph, NodeId, NodeId]:
    """A reachable control-flow cycle between two blocks."""
    g = FirmGraph()
    sb = g.add_node(Block({}))
    start = g.add_node(Start(), sb)
    a = g.add_node(Block({}))
    jmp_a = g.add_node(Jmp(), a)
    b = g.add_node(Block({0: jmp_a}))
    jmp_b = g.add_node(Jmp(), b)
    g.set_block_predecs(a, {0: start, 1: jmp_b})
    eb = g.add_node(Block({0: jmp_a}))
    g.add_node(End(), eb)
    return g, a, b


def reachable_kinds(g: FirmGraph) -> dict[str, int]:
    census: dict[str, int] = {}
    for nid in g.reachable():
        name = type(g.kind(nid)).__name__
        census[name] = census.get(name, 0) + 1
    return census


def block_count(g: FirmGraph) -> int:
    return reachable_kinds(g).get("Block", 0)


# --------------------------------------------------------------------------
# Random generators
# --------------------------------------------------------------------------

_SAFE_BINOPS = [BinaryOp.Add, BinaryOp.Sub, BinaryOp.Mul, BinaryOp.And,
                BinaryOp.Or, BinaryOp.Eor]


class ProgramBuilder:
    """Random loop-free, memory-free program over integer constants and
    arguments.

    Two disciplines keep generated graphs inside the supported envelope:
    values computed in a conditional arm are consumed only by the join's
    phis (a folded-away arm must not leave dangling uses), and selectors
    only ever fold to 0 or 1 (a plain constant selector with any other
    value would cut off both branches).
    """

    def __init__(self, rng: random.Random, n_args: int = 3):
        self.rng = rng
        self.g = FirmGraph()
        self.sb = self.g.add_node(Block({}))
        self.start = self.g.add_node(Start(), self.sb)
        self.args: list[NodeId] = []
        self.scope: list[NodeId] = []
        if n_args:
            inner = self.g.add_node(
                ProjN(self.start, WireConstants.START_POS_ARGUMENTS), self.sb
            )
            for k in range(n_args):
                self.args.append(self.g.add_node(ProjN(inner, k), self.sb))
            self.scope.extend(self.args)
        for _ in range(rng.randint(1, 4)):
            self.scope.append(const(self.g, self.sb, rng.randint(-64, 64)))

    def expression(self, block: NodeId, depth: int = 0) -> NodeId:
        rng = self.rng
        if depth >= 3 or rng.random() < 0.45:
            return rng.choice(self.scope)
        roll = rng.random()
        if roll < 0.75:
            op = rng.choice(_SAFE_BINOPS)
            return self.g.add_node(
                Binary(op, self.expression(block, depth + 1), self.expression(block, depth + 1)),
                block,
            )
        if roll < 0.85:
            return self.g.add_node(
                Unary(UnaryOp.Minus, self.expression(block, depth + 1)), block
            )
        divisor = const(self.g, self.sb, rng.choice([1, 2, 3, 5, 7, -3]))
        op = rng.choice([BinaryOp.Div, BinaryOp.Mod])
        return self.g.add_node(
            Binary(op, self.expression(block, depth + 1), divisor), block
        )

    def selector(self, block: NodeId) -> NodeId:
        roll = self.rng.random()
        if roll < 0.30 or (roll >= 0.90 and not self.args):
            return const(self.g, self.sb, self.rng.choice([0, 1]))
        if roll < 0.90:
            return self.g.add_node(
                Binary(BinaryOp.Cmp, self.rng.choice(self.scope),
                       self.rng.choice(self.scope)),
                block,
            )
        return self.rng.choice(self.args)

    def build(self, plan: list[str]) -> FirmGraph:
        rng = self.rng
        g = self.g
        prev_term = self.start
        for region in plan:
            if region == "line":
                block = g.add_node(Block({0: prev_term}))
                for _ in range(rng.randint(0, 2)):
                    self.scope.append(self.expression(block))
                prev_term = g.add_node(Jmp(), block)
            else:
                cb = g.add_node(Block({0: prev_term}))
                cond = g.add_node(Cond(self.selector(cb)), cb)
                p_true = g.add_node(ProjX(cond, 1), cb)
                p_false = g.add_node(ProjX(cond, 0), cb)
                tb = g.add_node(Block({0: p_true}))
                fb = g.add_node(Block({0: p_false}))
                n_phis = rng.randint(1, 2)
                t_vals = [self.expression(tb) if rng.random() < 0.5 else rng.choice(self.scope)
                          for _ in range(n_phis)]
                f_vals = [self.expression(fb) if rng.random() < 0.5 else rng.choice(self.scope)
                          for _ in range(n_phis)]
                jmp_t = g.add_node(Jmp(), tb)
                jmp_f = g.add_node(Jmp(), fb)
                join = g.add_node(Block({0: jmp_t, 1: jmp_f}))
                for t_val, f_val in zip(t_vals, f_vals):
                    self.scope.append(g.add_node(Phi({0: t_val, 1: f_val}), join))
                prev_term = g.add_node(Jmp(), join)
        rb = g.add_node(Block({0: prev_term}))
        results = tuple(rng.choice(self.scope) for _ in range(rng.randint(1, 2)))
        ret = g.add_node(Return(self.start, results), rb)
        eb = g.add_node(Block({0: ret}))
        g.add_node(End(), eb)
        return g


def _random_plan(rng: random.Random, max_blocks: int = 12) -> list[str]:
    # sb + rb + eb = 3 blocks; a line adds 1, a diamond adds 4
    plan = ["diamond"]
    budget = max_blocks - 3 - 4
    while budget > 0 and rng.random() < 0.6:
        region = rng.choice(["line", "diamond"])
        cost = 1 if region == "line" else 4
        if cost > budget:
            break
        plan.append(region)
        budget -= cost
    rng.shuffle(plan)
    return plan


def random_program(seed: int, n_args: int = 3) -> FirmGraph:
    rng = random.Random(seed)
    return ProgramBuilder(rng, n_args=n_args).build(_random_plan(rng))


def random_wire_graph(seed: int) -> FirmGraph:
    """Random graph restricted to what the wire format can express
    (Is-mode constants, 0/1 projections, argument idiom)."""
    rng = random.Random(seed)
    return ProgramBuilder(rng, n_args=rng.randint(0, 3)).build(_random_plan(rng))


def random_args(seed: int, count: int = 3) -> list[IntV]:
    rng = random.Random(seed)
    return [IntV(Mode.Is, rng.randint(-8, 8)) for _ in range(count)]


# --------------------------------------------------------------------------
# Random GXL documents (plain RNG; fast enough for acceptance volume)
# --------------------------------------------------------------------------

_WORDS = ["alpha", "beta", "gamma", "delta", "kappa", "omega", "pos", "value", "name"]


def _random_value(rng: random.Random, depth: int):
    roll = rng.random()
    if depth > 0 and roll < 0.2:
        agg = rng.choice([gxl.Seq, gxl.Set, gxl.Bag, gxl.Tup])
        return agg(tuple(_random_value(rng, depth - 1) for _ in range(rng.randint(0, 3))))
    if roll < 0.4:
        return gxl.Int(rng.randint(-(2**62), 2**62))
    if roll < 0.55:
        return gxl.Bool(rng.random() < 0.5)
    if roll < 0.7:
        return gxl.Float(rng.choice([0.0, -1.5, 2.5, 3.14159, 1e300, float(rng.randint(-9, 9))]))
    if roll < 0.85:
        return gxl.Str("".join(rng.choice("ab <&>'\"\n\r\tμλ✓") for _ in range(rng.randint(0, 8))))
    if roll < 0.95:
        return gxl.Enum(rng.choice(_WORDS))
    return gxl.Locator("#" + rng.choice(_WORDS))


def _random_attrs(rng: random.Random) -> list[gxl.GxlAttr]:
    return [
        gxl.GxlAttr(
            rng.choice(_WORDS),
            _random_value(rng, 2),
            kind=rng.choice([None, "meta"]),
        )
        for _ in range(rng.randint(0, 3))
    ]


def random_document(seed: int) -> gxl.GxlDocument:
    rng = random.Random(seed)
    counter = [0]

    def fresh() -> str:
        counter[0] += 1
        return f"id{counter[0]}"

    def graph(depth: int) -> gxl.GxlGraph:
        g = gxl.GxlGraph(
            id=fresh(),
            type_ref=rng.choice([None, "#" + rng.choice(_WORDS)]),
            role=rng.choice([None, rng.choice(_WORDS)]),
            edgeids=rng.random() < 0.3,
            hypergraph=rng.random() < 0.2,
            edgemode=rng.choice(list(gxl.Edgemode)),
            attrs=_random_attrs(rng),
        )
        node_ids = []
        for _ in range(rng.randint(0, 4)):
            node = gxl.GxlNode(id=fresh(), type_ref=rng.choice([None, "#t"]),
                               attrs=_random_attrs(rng))
            if depth > 0 and rng.random() < 0.25:
                node.subgraphs.append(graph(depth - 1))
            node_ids.append(node.id)
            g.parts.append(node)
        if node_ids:
            for _ in range(rng.randint(0, 3)):
                g.parts.append(
                    gxl.GxlEdge(
                        from_id=rng.choice(node_ids),
                        to_id=rng.choice(node_ids),
                        id=fresh() if rng.random() < 0.5 else None,
                        type_ref=rng.choice([None, "#True", "#False"]),
                        fromorder=rng.choice([None, rng.randint(-2, 5)]),
                        toorder=rng.choice([None, rng.randint(-2, 5)]),
                        isdirected=rng.choice([None, True, False]),
                        attrs=_random_attrs(rng),
                    )
                )
            if rng.random() < 0.3:
                rel = gxl.GxlRel(id=fresh() if rng.random() < 0.5 else None,
                                 isdirected=rng.choice([None, True, False]),
                                 attrs=_random_attrs(rng))
                for _ in range(rng.randint(0, 2)):
                    rel.relends.append(
                        gxl.GxlRelend(
                            target_id=rng.choice(node_ids),
                            role=rng.choice([None, "r"]),
                            direction=rng.choice([None] + list(gxl.Direction)),
                            startorder=rng.choice([None, rng.randint(0, 3)]),
                            endorder=rng.choice([None, rng.randint(0, 3)]),
                            attrs=_random_attrs(rng),
                        )
                    )
                g.parts.append(rel)
        return g

    return gxl.GxlDocument(graphs=[graph(1) for _ in range(rng.randint(0, 3))])
