"""Per-step node and edge features for the sequence model.

One step per AST node in pre-order. The edge vector describes how the
node is entered from its structural context: then/else bodies get
True/False, evaluate arms get Case, loop bodies get LoopBack, a statement
following its sibling gets Seq, and everything else (root included, by
convention) gets TreeChild.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from relicforge.analysis.cfg import Cfg
from relicforge.analysis.metrics import is_statement, nesting_levels
from relicforge.cobol import nodes as n

NODE_FEATURE_COUNT = 12
EDGE_FEATURE_COUNT = 6

EDGE_ORDER = ("Seq", "True", "False", "LoopBack", "Case", "TreeChild")
_EDGE_INDEX = {name: i for i, name in enumerate(EDGE_ORDER)}

_CALL_KINDS = (n.NodeKind.CALL, n.NodeKind.PERFORM_PARA)


@dataclass
class StepFeatures:
    node_feats: np.ndarray  # (steps, 12) float64
    edge_feats: np.ndarray  # (steps, 6) float64

    def __len__(self) -> int:
        return self.node_feats.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return np.concatenate([self.node_feats, self.edge_feats], axis=1)


def _arrival_kinds(program: n.Program) -> dict[int, str]:
    """id(node) -> incoming edge label."""
    kinds: dict[int, str] = {id(program): "TreeChild"}

    def mark_body(body, kind: str) -> None:
        prev_stmt = None
        for stmt in body:
            if prev_stmt is None:
                kinds[id(stmt)] = kind
            else:
                kinds[id(stmt)] = "Seq"
            prev_stmt = stmt

    def walk(node: n.Node) -> None:
        kind = node.kind
        if kind is n.NodeKind.PROGRAM:
            for child in n.child_nodes(node):
                kinds.setdefault(id(child), "TreeChild")
            _mark_siblings(node.data_items)
            _mark_siblings(node.paragraphs)
        elif kind is n.NodeKind.DATA_ITEM:
            for child in node.children:
                kinds.setdefault(id(child), "TreeChild")
            _mark_siblings(node.children)
        elif kind is n.NodeKind.PARAGRAPH:
            mark_body(node.body, "TreeChild")
        elif kind is n.NodeKind.IF:
            mark_body(node.then_body, "True")
            mark_body(node.else_body, "False")
        elif kind is n.NodeKind.EVALUATE:
            for arm in node.arms:
                mark_body(arm.body, "Case")
            if node.other:
                mark_body(node.other, "Case")
        elif kind in (
            n.NodeKind.PERFORM_UNTIL,
            n.NodeKind.PERFORM_VARYING,
        ) or (kind is n.NodeKind.PERFORM_TIMES and node.body is not None):
            mark_body(node.body, "LoopBack")
        for child in n.child_nodes(node):
            walk(child)

    def _mark_siblings(children) -> None:
        prev = None
        for child in children:
            if prev is not None:
                kinds[id(child)] = "Seq"
            prev = child

    walk(program)
    return kinds


def step_features(ast: n.CobolAst, cfg: Cfg) -> StepFeatures:
    program = ast.program
    order = list(n.iter_preorder(program))
    total = len(order)
    node_feats = np.zeros((total, NODE_FEATURE_COUNT))
    edge_feats = np.zeros((total, EDGE_FEATURE_COUNT))

    parents: dict[int, n.Node] = {}
    depths: dict[int, int] = {id(program): 0}
    sizes: dict[int, int] = {}
    siblings: dict[int, int] = {id(program): 0}

    def measure_subtree(node: n.Node) -> int:
        size = 1
        for i, child in enumerate(n.child_nodes(node)):
            parents[id(child)] = node
            depths[id(child)] = depths[id(node)] + 1
            siblings[id(child)] = i
            size += measure_subtree(child)
        sizes[id(node)] = size
        return size

    measure_subtree(program)
    nesting = nesting_levels(ast)
    arrivals = _arrival_kinds(program)

    para_of: dict[int, int] = {}
    for pi, para in enumerate(program.paragraphs):
        for node in n.iter_preorder(para):
            para_of[id(node)] = pi
    para_count = len(program.paragraphs)

    stmt_order = [i for i, node in enumerate(order) if is_statement(node)]
    stmt_pos = {i: k for k, i in enumerate(stmt_order)}
    stmt_count = len(stmt_order)

    lit_cache: dict[int, int] = {}

    def subtree_literals(node: n.Node) -> int:
        key = id(node)
        if key not in lit_cache:
            lit_cache[key] = n.node_literal_count(node) + sum(
                subtree_literals(c) for c in n.child_nodes(node)
            )
        return lit_cache[key]

    kind_count = len(n.NodeKind)
    for i, node in enumerate(order):
        key = id(node)
        kind = node.kind
        node_feats[i, 0] = n.KIND_IDS[kind] / kind_count
        node_feats[i, 1] = depths[key]
        node_feats[i, 2] = len(n.child_nodes(node))
        node_feats[i, 3] = siblings[key]
        node_feats[i, 4] = sizes[key]
        node_feats[i, 5] = nesting.get(i, 0)
        node_feats[i, 6] = 1.0 if kind in n.LOOP_KINDS else 0.0
        node_feats[i, 7] = 1.0 if kind in n.BRANCH_KINDS else 0.0
        node_feats[i, 8] = 1.0 if kind in _CALL_KINDS else 0.0
        node_feats[i, 9] = subtree_literals(node)
        if key in para_of and para_count:
            node_feats[i, 10] = para_of[key] / para_count
        if i in stmt_pos and stmt_count:
            node_feats[i, 11] = stmt_pos[i] / stmt_count
        edge_feats[i, _EDGE_INDEX[arrivals.get(key, "TreeChild")]] = 1.0

    return StepFeatures(node_feats=node_feats, edge_feats=edge_feats)


def statement_mask(ast: n.CobolAst) -> np.ndarray:
    """1.0 at statement steps, 0.0 at Program/DataItem/Paragraph steps."""
    order = list(n.iter_preorder(ast.program))
    return np.array([1.0 if is_statement(v) else 0.0 for v in order])
