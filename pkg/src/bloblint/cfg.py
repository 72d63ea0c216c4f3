"""Intra-procedural control-flow graphs at statement granularity.

One node per executable statement (blocks are transparent), plus a single
entry and exit. Branch nodes carry one outgoing edge per branch, including
the implicit empty else and the implicit default of a switch, so that every
statement can be mapped to the chain of conditional branches that govern it
on every execution path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .nodes import (Block, If, Loop, MethodDeclaration, Return, Statement,
                    Switch, Try)

SEQ = "seq"
TRUE_BRANCH = "true-branch"
FALSE_BRANCH = "false-branch"
CASE_BRANCH = "case-branch"
EXCEPTION = "exception"

_BRANCH_KINDS = (TRUE_BRANCH, FALSE_BRANCH, CASE_BRANCH)


@dataclass(eq=False)
class CfgNode:
    kind: str  # entry | exit | stmt
    statement: Statement | None
    index: int
    unreachable: bool = False

    def label(self) -> str:
        if self.kind != "stmt":
            return self.kind
        stmt = self.statement
        return f"{type(stmt).__name__}@{stmt.span.start.line}"


@dataclass(frozen=True, eq=False)
class CfgEdge:
    src: CfgNode
    dst: CfgNode
    kind: str
    branch: str | None = None  # "true" | "false" | "case:<i>" | "case:default"


@dataclass(frozen=True)
class GoverningConditions:
    statement: Statement
    chain: tuple[tuple[Statement, str], ...]  # (conditional, branch taken)


@dataclass(eq=False)
class ControlFlowGraph:
    method: MethodDeclaration
    nodes: list[CfgNode]
    edges: list[CfgEdge]
    entry: CfgNode
    exit: CfgNode
    _node_of: dict[Statement, CfgNode] = field(default_factory=dict)
    _dominators: dict[CfgNode, set[CfgNode]] | None = None

    def node_of(self, stmt: Statement) -> CfgNode:
        return self._node_of[stmt]

    def has_node(self, stmt: Statement) -> bool:
        return stmt in self._node_of

    def successors(self, node: CfgNode) -> list[CfgNode]:
        return [e.dst for e in self.edges if e.src is node]

    def predecessors(self, node: CfgNode) -> list[CfgNode]:
        return [e.src for e in self.edges if e.dst is node]

    def branch_edges(self, node: CfgNode) -> list[CfgEdge]:
        return [e for e in self.edges if e.src is node and e.kind in _BRANCH_KINDS]

    def conditional_nodes(self) -> list[CfgNode]:
        return [n for n in self.nodes
                if n.kind == "stmt" and isinstance(n.statement, (If, Switch))]

    def dominators(self) -> dict[CfgNode, set[CfgNode]]:
        """Iterative dominator sets over nodes reachable from entry."""
        if self._dominators is not None:
            return self._dominators
        reachable = self._reachable_from_entry()
        preds: dict[CfgNode, list[CfgNode]] = {n: [] for n in reachable}
        for e in self.edges:
            if e.src in preds and e.dst in preds:
                preds[e.dst].append(e.src)
        dom: dict[CfgNode, set[CfgNode]] = {
            n: ({n} if n is self.entry else set(reachable)) for n in reachable}
        changed = True
        while changed:
            changed = False
            for n in self.nodes:
                if n not in preds or n is self.entry:
                    continue
                incoming = [dom[p] for p in preds[n] if p in dom]
                new = set.intersection(*incoming) if incoming else set()
                new = new | {n}
                if new != dom[n]:
                    dom[n] = new
                    changed = True
        self._dominators = dom
        return dom

    def _reachable_from_entry(self) -> set[CfgNode]:
        seen = {self.entry}
        stack = [self.entry]
        while stack:
            for succ in self.successors(stack.pop()):
                if succ not in seen:
                    seen.add(succ)
                    stack.append(succ)
        return seen

    def reaches(self, start: CfgNode, target: CfgNode,
                avoid: CfgNode | None = None) -> bool:
        """Is `target` reachable from `start` without passing through
        `avoid`? `start is target` counts as reaching."""
        if start is avoid:
            return False
        seen = {start}
        stack = [start]
        while stack:
            node = stack.pop()
            if node is target:
                return True
            for succ in self.successors(node):
                if succ is not avoid and succ not in seen:
                    seen.add(succ)
                    stack.append(succ)
        return False


class _Builder:
    def __init__(self, method: MethodDeclaration):
        self.method = method
        self.nodes: list[CfgNode] = []
        self.edges: list[CfgEdge] = []
        self.node_of: dict[Statement, CfgNode] = {}
        self.entry = self._raw_node("entry", None)
        self.returns: list[CfgNode] = []

    def _raw_node(self, kind: str, stmt: Statement | None) -> CfgNode:
        node = CfgNode(kind, stmt, len(self.nodes))
        self.nodes.append(node)
        return node

    def _stmt_node(self, stmt: Statement) -> CfgNode:
        node = self._raw_node("stmt", stmt)
        self.node_of[stmt] = node
        return node

    def _connect(self, preds, node: CfgNode) -> None:
        for src, kind, branch in preds:
            self.edges.append(CfgEdge(src, node, kind, branch))

    def _wire(self, statements, preds):
        for stmt in statements:
            preds = self._wire_one(stmt, preds)
        return preds

    def _wire_one(self, stmt: Statement, preds):
        if isinstance(stmt, Block):
            return self._wire(stmt.statements, preds)
        if isinstance(stmt, If):
            node = self._stmt_node(stmt)
            self._connect(preds, node)
            ends = self._wire((stmt.then_branch,), [(node, TRUE_BRANCH, "true")])
            if stmt.else_branch is not None:
                ends += self._wire((stmt.else_branch,), [(node, FALSE_BRANCH, "false")])
            else:
                ends += [(node, FALSE_BRANCH, "false")]
            return ends
        if isinstance(stmt, Switch):
            node = self._stmt_node(stmt)
            self._connect(preds, node)
            ends = []
            has_default = False
            for i, case in enumerate(stmt.cases):
                branch = "case:default" if case.is_default else f"case:{i}"
                has_default = has_default or case.is_default
                case_preds = [(node, CASE_BRANCH, branch)]
                if case.statements:
                    ends += self._wire(case.statements, case_preds)
                else:
                    ends += case_preds
            if not has_default:
                ends += [(node, CASE_BRANCH, "case:default")]
            return ends
        if isinstance(stmt, Loop):
            preds = self._wire(stmt.init, preds)
            node = self._stmt_node(stmt)
            self._connect(preds, node)
            body_ends = self._wire((stmt.body,), [(node, TRUE_BRANCH, "true")])
            for src, kind, branch in body_ends:  # back edges
                self.edges.append(CfgEdge(src, node, SEQ, None))
            return [(node, FALSE_BRANCH, "false")]
        if isinstance(stmt, Return):
            node = self._stmt_node(stmt)
            self._connect(preds, node)
            self.returns.append(node)
            return []
        if isinstance(stmt, Try):
            preds = self._wire(stmt.resources, preds)
            first_new = len(self.nodes)
            ends = self._wire(stmt.body.statements, preds)
            body_nodes = self.nodes[first_new:]
            for catch in stmt.catches:
                catch_preds = [(n, EXCEPTION, None) for n in body_nodes]
                if catch.body.statements:
                    ends += self._wire(catch.body.statements, catch_preds)
                else:
                    ends += catch_preds
            if stmt.finally_block is not None and stmt.finally_block.statements:
                ends = self._wire(stmt.finally_block.statements, ends)
            return ends
        node = self._stmt_node(stmt)
        self._connect(preds, node)
        return [(node, SEQ, None)]

    def build(self) -> ControlFlowGraph:
        body = self.method.body
        ends = self._wire(body.statements if body else (),
                          [(self.entry, SEQ, None)])
        exit_node = self._raw_node("exit", None)
        self._connect(ends, exit_node)
        for node in self.returns:
            self.edges.append(CfgEdge(node, exit_node, SEQ, None))
        cfg = ControlFlowGraph(self.method, self.nodes, self.edges,
                               self.entry, exit_node, self.node_of)
        for node in cfg.nodes:
            node.unreachable = False
        reachable = cfg._reachable_from_entry()
        for node in cfg.nodes:
            if node not in reachable and node is not exit_node:
                node.unreachable = True
        return cfg


def build_cfg(method: MethodDeclaration) -> ControlFlowGraph:
    """Build the statement-level CFG of a method body. Loops produce back
    edges, returns edge to exit, try bodies get exception edges to every
    catch."""
    return _Builder(method).build()


def governing_conditions(cfg: ControlFlowGraph, statement: Statement) -> GoverningConditions:
    """The chain of conditional branches that lie on every entry-to-statement
    path, outermost first. Loops never appear in the chain; unreachable
    statements get an empty chain."""
    node = cfg.node_of(statement)
    if node.unreachable:
        return GoverningConditions(statement, ())
    dom = cfg.dominators()
    node_doms = dom.get(node, set())
    chain: list[tuple[int, Statement, str]] = []
    for cand in cfg.conditional_nodes():
        if cand is node or cand not in node_doms:
            continue
        reaching = {e.branch for e in cfg.branch_edges(cand)
                    if cfg.reaches(e.dst, node, avoid=cand)}
        if len(reaching) == 1:
            chain.append((len(dom[cand]), cand.statement, reaching.pop()))
    chain.sort(key=lambda item: item[0])
    return GoverningConditions(statement,
                               tuple((stmt, branch) for _, stmt, branch in chain))


def to_dot(cfg: ControlFlowGraph, title: str = "cfg") -> str:
    """Render the CFG in DOT for debugging (`--cfg-dump`)."""
    lines = [f'digraph "{title}" {{']
    for node in cfg.nodes:
        shape = "oval" if node.kind != "stmt" else "box"
        extra = ", style=dotted" if node.unreachable else ""
        lines.append(f'  n{node.index} [label="{node.label()}", shape={shape}{extra}];')
    for edge in cfg.edges:
        label = edge.branch or edge.kind
        lines.append(f'  n{edge.src.index} -> n{edge.dst.index} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines)
