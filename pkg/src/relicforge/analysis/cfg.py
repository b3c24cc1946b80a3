"""Whole-program control-flow graph construction.

One CFG per program (P=1). Paragraphs chain by fall-through; plain PERFORM
of a paragraph is an opaque statement node so the E-N+2 identity with
decision counting stays exact, while every loop form (UNTIL, VARYING, and
both TIMES forms) is a Branch with a LoopBack edge — the counted paragraph
perform keeps its callee opaque but its loop test explicit, matching the
loop its translation unrolls into. GO TO adds a Seq edge to the target paragraph's
first statement; code left unreachable that way is pruned and counted.
STOP RUN is a plain statement node: halting is interpreter semantics, and
modeling it as fall-through keeps paragraphs after a mid-program stop
connected. Only Branch nodes fan out. An Evaluate branch carries one Case
edge per arm plus a False default edge.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from relicforge.cobol import nodes as n


class CfgNodeKind(enum.Enum):
    ENTRY = "Entry"
    EXIT = "Exit"
    STMT = "Stmt"
    BRANCH = "Branch"
    JOIN = "Join"


class EdgeKind(enum.Enum):
    SEQ = "Seq"
    TRUE = "True"
    FALSE = "False"
    LOOP_BACK = "LoopBack"
    CASE = "Case"


@dataclass(frozen=True)
class CfgNode:
    id: int
    kind: CfgNodeKind
    stmt_ref: int | None = None


@dataclass(frozen=True)
class CfgEdge:
    src: int
    dst: int
    kind: EdgeKind


@dataclass
class Cfg:
    nodes: list[CfgNode]
    edges: list[CfgEdge]
    entry: int
    exit: int
    pruned: int = 0

    def successors(self, node_id: int) -> list[int]:
        return [e.dst for e in self.edges if e.src == node_id]

    def branch_count(self) -> int:
        return sum(1 for node in self.nodes if node.kind is CfgNodeKind.BRANCH)

    def loop_back_count(self) -> int:
        return sum(1 for e in self.edges if e.kind is EdgeKind.LOOP_BACK)

    def to_json(self) -> dict:
        return {
            "nodes": [
                {"id": v.id, "kind": v.kind.value, "stmt_ref": v.stmt_ref}
                for v in self.nodes
            ],
            "edges": [[e.src, e.dst, e.kind.value] for e in self.edges],
            "entry": self.entry,
            "exit": self.exit,
            "pruned": self.pruned,
        }


# A dangling chain exit waiting to be wired to whatever comes next.
@dataclass(frozen=True)
class _Out:
    node: int
    kind: EdgeKind


class _Builder:
    def __init__(self, refs: dict[int, int]):
        self.refs = refs  # id(ast node) -> pre-order index
        self.nodes: list[CfgNode] = []
        self.edges: list[CfgEdge] = []
        self.goto_fixups: list[tuple[int, str]] = []

    def add(self, kind: CfgNodeKind, stmt: n.Stmt | None = None) -> int:
        ref = self.refs[id(stmt)] if stmt is not None else None
        node_id = len(self.nodes)
        self.nodes.append(CfgNode(node_id, kind, ref))
        return node_id

    def edge(self, src: int, dst: int, kind: EdgeKind) -> None:
        self.edges.append(CfgEdge(src, dst, kind))

    def connect(self, outs: list[_Out], dst: int, kind: EdgeKind | None = None) -> None:
        for out in outs:
            self.edge(out.node, dst, kind if kind is not None else out.kind)

    def build_seq(self, stmts) -> tuple[int | None, list[_Out]]:
        """Build a chain for a statement list: (head id, dangling outs)."""
        head: int | None = None
        outs: list[_Out] = []
        for stmt in stmts:
            s_head, s_outs = self.build_stmt(stmt)
            if head is None:
                head = s_head
            else:
                self.connect(outs, s_head)
            outs = s_outs
        return head, outs

    def build_stmt(self, stmt: n.Stmt) -> tuple[int, list[_Out]]:
        kind = stmt.kind
        if kind is n.NodeKind.IF:
            branch = self.add(CfgNodeKind.BRANCH, stmt)
            join = self.add(CfgNodeKind.JOIN)
            then_head, then_outs = self.build_seq(stmt.then_body)
            self.edge(branch, then_head if then_head is not None else join, EdgeKind.TRUE)
            self.connect(then_outs, join)
            else_head, else_outs = self.build_seq(stmt.else_body)
            self.edge(branch, else_head if else_head is not None else join, EdgeKind.FALSE)
            self.connect(else_outs, join)
            return branch, [_Out(join, EdgeKind.SEQ)]
        if kind is n.NodeKind.EVALUATE:
            branch = self.add(CfgNodeKind.BRANCH, stmt)
            join = self.add(CfgNodeKind.JOIN)
            for arm in stmt.arms:
                arm_head, arm_outs = self.build_seq(arm.body)
                self.edge(branch, arm_head if arm_head is not None else join, EdgeKind.CASE)
                self.connect(arm_outs, join)
            other_head, other_outs = self.build_seq(stmt.other or [])
            self.edge(branch, other_head if other_head is not None else join, EdgeKind.FALSE)
            self.connect(other_outs, join)
            return branch, [_Out(join, EdgeKind.SEQ)]
        if kind in (
            n.NodeKind.PERFORM_UNTIL,
            n.NodeKind.PERFORM_VARYING,
            n.NodeKind.PERFORM_TIMES,
        ):
            branch = self.add(CfgNodeKind.BRANCH, stmt)
            if kind is n.NodeKind.PERFORM_TIMES and stmt.body is None:
                # Counted paragraph perform: the loop test is explicit but
                # the callee stays one opaque call node, never inlined.
                call = self.add(CfgNodeKind.STMT)
                self.edge(branch, call, EdgeKind.TRUE)
                self.edge(call, branch, EdgeKind.LOOP_BACK)
                return branch, [_Out(branch, EdgeKind.FALSE)]
            body_head, body_outs = self.build_seq(stmt.body)
            self.edge(branch, body_head if body_head is not None else branch, EdgeKind.TRUE)
            self.connect(body_outs, branch, EdgeKind.LOOP_BACK)
            return branch, [_Out(branch, EdgeKind.FALSE)]
        if kind is n.NodeKind.GOTO:
            node = self.add(CfgNodeKind.STMT, stmt)
            self.goto_fixups.append((node, stmt.target))
            return node, []  # no fall-through
        node = self.add(CfgNodeKind.STMT, stmt)
        return node, [_Out(node, EdgeKind.SEQ)]


def build_cfg(ast: n.CobolAst) -> Cfg:
    refs = {id(node): i for i, node in enumerate(n.iter_preorder(ast.program))}
    b = _Builder(refs)
    entry = b.add(CfgNodeKind.ENTRY)

    chains: list[tuple[str, int | None, list[_Out]]] = []
    for para in ast.program.paragraphs:
        head, outs = b.build_seq(para.body)
        chains.append((para.name, head, outs))

    exit_id = b.add(CfgNodeKind.EXIT)

    # Fall-through anchor for each paragraph: its own first node, else the
    # next nonempty paragraph's, else Exit.
    anchors: dict[str, int] = {}
    next_anchor = exit_id
    for name, head, _ in reversed(chains):
        if head is not None:
            next_anchor = head
        anchors[name] = next_anchor

    heads = [head for _, head, _ in chains]
    b.edge(entry, next((h for h in heads if h is not None), exit_id), EdgeKind.SEQ)
    for i, (_, _, outs) in enumerate(chains):
        following = next((h for h in heads[i + 1 :] if h is not None), exit_id)
        b.connect(outs, following)
    for node_id, target in b.goto_fixups:
        b.edge(node_id, anchors[target], EdgeKind.SEQ)

    return _prune(b, entry, exit_id)


def _prune(b: _Builder, entry: int, exit_id: int) -> Cfg:
    adj: dict[int, list[int]] = {}
    for e in b.edges:
        adj.setdefault(e.src, []).append(e.dst)
    seen = {entry}
    stack = [entry]
    while stack:
        for dst in adj.get(stack.pop(), []):
            if dst not in seen:
                seen.add(dst)
                stack.append(dst)
    seen.add(exit_id)  # the Exit node survives even in pathological graphs
    pruned = len(b.nodes) - len(seen)
    nodes = [v for v in b.nodes if v.id in seen]
    edges = [e for e in b.edges if e.src in seen and e.dst in seen]
    return Cfg(nodes=nodes, edges=edges, entry=entry, exit=exit_id, pruned=pruned)


def validate(cfg: Cfg) -> list[str]:
    """Invariant check used by tests; returns human-readable violations."""
    problems: list[str] = []
    kinds = [v.kind for v in cfg.nodes]
    if kinds.count(CfgNodeKind.ENTRY) != 1 or kinds.count(CfgNodeKind.EXIT) != 1:
        problems.append("must have exactly one Entry and one Exit")
    ids = {v.id for v in cfg.nodes}
    forward: dict[int, list[int]] = {}
    backward: dict[int, list[int]] = {}
    for e in cfg.edges:
        forward.setdefault(e.src, []).append(e.dst)
        backward.setdefault(e.dst, []).append(e.src)

    def reach(start: int, adj: dict[int, list[int]]) -> set[int]:
        seen = {start}
        stack = [start]
        while stack:
            for nxt in adj.get(stack.pop(), []):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    from_entry = reach(cfg.entry, forward)
    if ids - from_entry:
        problems.append(f"{len(ids - from_entry)} nodes unreachable from Entry")
    to_exit = reach(cfg.exit, backward)
    if ids - to_exit:
        problems.append(f"{len(ids - to_exit)} nodes cannot reach Exit")
    for v in cfg.nodes:
        out = len(forward.get(v.id, []))
        if v.kind is CfgNodeKind.EXIT:
            if out != 0:
                problems.append("Exit must have no successors")
        elif out > 1 and v.kind is not CfgNodeKind.BRANCH:
            problems.append(f"non-Branch node {v.id} fans out")
    return problems


def cyclomatic(cfg: Cfg) -> int:
    """McCabe complexity V(G) = E - N + 2 with P=1."""
    return len(cfg.edges) - len(cfg.nodes) + 2
