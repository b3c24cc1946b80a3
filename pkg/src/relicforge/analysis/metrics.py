"""Static metrics: cyclomatic complexity, coupling, 30-dim file features."""

from __future__ import annotations

from dataclasses import dataclass

from relicforge.analysis.cfg import Cfg, CfgNodeKind, build_cfg, cyclomatic
from relicforge.cobol import nodes as n

FEATURE_NAMES = (
    "lines",
    "tokens",
    "ast_nodes",
    "cfg_edges",
    "cfg_cycles",
    "paragraphs",
    "statements",
    "calls_total",
    "calls_distinct",
    "performs",
    "ifs",
    "evaluates",
    "gotos",
    "moves",
    "computes",
    "arith_ops",
    "displays",
    "accepts",
    "max_nesting",
    "mean_nesting",
    "data_items",
    "numeric_items",
    "alnum_items",
    "group_items",
    "cyclomatic",
    "max_paragraph_len",
    "mean_paragraph_len",
    "branch_density",
    "literal_count",
    "string_literal_count",
)

_STRUCTURAL = (n.NodeKind.PROGRAM, n.NodeKind.DATA_ITEM, n.NodeKind.PARAGRAPH)

_PERFORM_KINDS = (
    n.NodeKind.PERFORM_PARA,
    n.NodeKind.PERFORM_TIMES,
    n.NodeKind.PERFORM_UNTIL,
    n.NodeKind.PERFORM_VARYING,
)


def is_statement(node: n.Node) -> bool:
    return node.kind not in _STRUCTURAL


def statement_nodes(ast: n.CobolAst) -> list[n.Stmt]:
    return [v for v in n.iter_preorder(ast.program) if is_statement(v)]


def coupling(ast: n.CobolAst) -> int:
    """Distinct CALL target program names (fan-out)."""
    return len({v.program for v in statement_nodes(ast) if v.kind is n.NodeKind.CALL})


def decision_complexity(ast: n.CobolAst) -> int:
    """Independent complexity count straight off the AST: one per binary
    decision, plus the arm count of each Evaluate, plus one.

    Plain PERFORM of a paragraph is opaque here exactly as it is in the
    CFG, and every loop form counts one decision (a counted paragraph
    perform tests its counter each pass), so this equals
    cyclomatic(build_cfg(ast)) whenever every statement is reachable.
    GO TO can strand statements; those are pruned from the CFG but still
    counted here, so the identity is asserted only over fully-reachable
    programs.
    """
    total = 1
    for node in statement_nodes(ast):
        kind = node.kind
        if kind in (
            n.NodeKind.IF,
            n.NodeKind.PERFORM_UNTIL,
            n.NodeKind.PERFORM_VARYING,
            n.NodeKind.PERFORM_TIMES,
        ):
            total += 1
        elif kind is n.NodeKind.EVALUATE:
            total += len(node.arms)
    return total


def _string_literal_count(ast: n.CobolAst) -> int:
    count = 0

    def visit_expr(e) -> None:
        nonlocal count
        if isinstance(e, n.StrLit):
            count += 1
        elif isinstance(e, n.BinOp):
            visit_expr(e.left)
            visit_expr(e.right)
        elif isinstance(e, n.Comparison):
            visit_expr(e.left)
            visit_expr(e.right)
        elif isinstance(e, n.NotCond):
            visit_expr(e.inner)
        elif isinstance(e, (n.AndCond, n.OrCond)):
            visit_expr(e.left)
            visit_expr(e.right)

    for node in n.iter_preorder(ast.program):
        kind = node.kind
        if kind is n.NodeKind.MOVE:
            visit_expr(node.src)
        elif kind is n.NodeKind.COMPUTE:
            visit_expr(node.expr)
        elif kind is n.NodeKind.ARITH:
            visit_expr(node.a)
            visit_expr(node.b)
        elif kind is n.NodeKind.IF:
            visit_expr(node.cond)
        elif kind is n.NodeKind.EVALUATE:
            visit_expr(node.subject)
            count += sum(1 for arm in node.arms if isinstance(arm.value, n.StrLit))
        elif kind is n.NodeKind.PERFORM_TIMES:
            visit_expr(node.count)
        elif kind is n.NodeKind.PERFORM_UNTIL:
            visit_expr(node.cond)
        elif kind is n.NodeKind.PERFORM_VARYING:
            visit_expr(node.from_)
            visit_expr(node.by)
            visit_expr(node.until)
        elif kind is n.NodeKind.DISPLAY:
            for a in node.args:
                visit_expr(a)
        elif kind is n.NodeKind.CALL:
            count += 1  # the program-name literal
        elif kind is n.NodeKind.DATA_ITEM and isinstance(node.value, str):
            count += 1
    return count


def nesting_levels(ast: n.CobolAst) -> dict[int, int]:
    """Pre-order index -> statement nesting level (top-level stmt = 0)."""
    levels: dict[int, int] = {}
    index = {id(v): i for i, v in enumerate(n.iter_preorder(ast.program))}

    def walk(node: n.Node, level: int) -> None:
        if is_statement(node):
            levels[index[id(node)]] = level
            child_level = level + 1
        else:
            child_level = 0
        for child in n.child_nodes(node):
            walk(child, child_level)

    walk(ast.program, 0)
    return levels


def file_features(ast: n.CobolAst, cfg: Cfg) -> list[float]:
    program = ast.program
    all_nodes = list(n.iter_preorder(program))
    stmts = [v for v in all_nodes if is_statement(v)]
    data = [v for v in all_nodes if v.kind is n.NodeKind.DATA_ITEM]
    kinds = [v.kind for v in stmts]

    def ratio(a: float, b: float) -> float:
        return a / b if b else 0.0

    calls = [v for v in stmts if v.kind is n.NodeKind.CALL]
    levels = list(nesting_levels(ast).values())
    para_lens = [
        sum(1 for v in n.iter_preorder(p) if is_statement(v))
        for p in program.paragraphs
    ]
    branches = sum(1 for v in cfg.nodes if v.kind is CfgNodeKind.BRANCH)
    literals = sum(n.node_literal_count(v) for v in all_nodes)

    features = [
        float(ast.source_lines),
        float(ast.token_count),
        float(len(all_nodes)),
        float(len(cfg.edges)),
        float(cfg.loop_back_count()),
        float(len(program.paragraphs)),
        float(len(stmts)),
        float(len(calls)),
        float(coupling(ast)),
        float(sum(1 for k in kinds if k in _PERFORM_KINDS)),
        float(kinds.count(n.NodeKind.IF)),
        float(kinds.count(n.NodeKind.EVALUATE)),
        float(kinds.count(n.NodeKind.GOTO)),
        float(kinds.count(n.NodeKind.MOVE)),
        float(kinds.count(n.NodeKind.COMPUTE)),
        float(kinds.count(n.NodeKind.ARITH)),
        float(kinds.count(n.NodeKind.DISPLAY)),
        float(kinds.count(n.NodeKind.ACCEPT)),
        float(max(levels, default=0)),
        ratio(sum(levels), len(levels)),
        float(len(data)),
        float(sum(1 for d in data if not d.is_group and d.is_numeric)),
        float(sum(1 for d in data if not d.is_group and not d.is_numeric)),
        float(sum(1 for d in data if d.is_group)),
        float(cyclomatic(cfg)),
        float(max(para_lens, default=0)),
        ratio(sum(para_lens), len(para_lens)),
        ratio(branches, len(stmts)),
        float(literals),
        float(_string_literal_count(ast)),
    ]
    assert len(features) == 30
    return features


@dataclass
class MetricsRecord:
    cyclomatic: int
    coupling: int
    lines: int
    features: list[float]

    def to_json(self) -> dict:
        return {
            "cyclomatic": self.cyclomatic,
            "coupling": self.coupling,
            "lines": self.lines,
            "features": list(self.features),
        }

    @classmethod
    def from_json(cls, data: dict) -> "MetricsRecord":
        return cls(
            cyclomatic=data["cyclomatic"],
            coupling=data["coupling"],
            lines=data["lines"],
            features=list(data["features"]),
        )


def measure(ast: n.CobolAst) -> MetricsRecord:
    cfg = build_cfg(ast)
    return MetricsRecord(
        cyclomatic=cyclomatic(cfg),
        coupling=coupling(ast),
        lines=ast.source_lines,
        features=file_features(ast, cfg),
    )
