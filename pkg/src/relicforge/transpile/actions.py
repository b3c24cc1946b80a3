"""Per-statement translation actions and their applicability rules.

An action tells the rule engine how to render one COBOL statement in Java.
Every statement kind has a fixed default; a model (or an oracle label file)
may override defaults with any *applicable* alternative. PassThrough means
"no choice to make": the engine's fixed structural mapping applies, which
for GO TO is omission (flagging the file as unstructured).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from relicforge.analysis.metrics import is_statement
from relicforge.cobol import nodes as n


class ActionKind(enum.Enum):
    PASS_THROUGH = "PassThrough"
    LOOP_TO_FOR = "LoopToFor"
    LOOP_TO_WHILE = "LoopToWhile"
    LOOP_TO_DO_WHILE = "LoopToDoWhile"
    IF_TO_IF = "IfToIf"
    IF_CHAIN_TO_SWITCH = "IfChainToSwitch"
    EVALUATE_TO_SWITCH = "EvaluateToSwitch"
    MOVE_TO_ASSIGN = "MoveToAssign"
    COMPUTE_TO_EXPR = "ComputeToExpr"
    CALL_TO_METHOD_CALL = "CallToMethodCall"
    DISPLAY_TO_PRINT = "DisplayToPrint"
    EXTRACT_METHOD = "ExtractMethodAt"


# Model output space: index in this tuple == class id.
CLASS_ORDER: tuple[ActionKind, ...] = (
    ActionKind.PASS_THROUGH,
    ActionKind.LOOP_TO_FOR,
    ActionKind.LOOP_TO_WHILE,
    ActionKind.LOOP_TO_DO_WHILE,
    ActionKind.IF_TO_IF,
    ActionKind.IF_CHAIN_TO_SWITCH,
    ActionKind.EVALUATE_TO_SWITCH,
    ActionKind.MOVE_TO_ASSIGN,
    ActionKind.COMPUTE_TO_EXPR,
    ActionKind.CALL_TO_METHOD_CALL,
    ActionKind.DISPLAY_TO_PRINT,
    ActionKind.EXTRACT_METHOD,
)

CLASS_IDS = {kind: i for i, kind in enumerate(CLASS_ORDER)}
NUM_CLASSES = len(CLASS_ORDER)


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    node_index: int | None = None  # ExtractMethodAt split point (pre-order)

    def to_json(self) -> dict:
        out: dict = {"action": self.kind.value}
        if self.node_index is not None:
            out["node_index"] = self.node_index
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Action":
        return cls(ActionKind(data["action"]), data.get("node_index"))


_LOOP_ACTIONS = frozenset(
    {ActionKind.LOOP_TO_FOR, ActionKind.LOOP_TO_WHILE, ActionKind.LOOP_TO_DO_WHILE}
)

_DEFAULTS = {
    n.NodeKind.MOVE: ActionKind.MOVE_TO_ASSIGN,
    n.NodeKind.COMPUTE: ActionKind.COMPUTE_TO_EXPR,
    n.NodeKind.ARITH: ActionKind.COMPUTE_TO_EXPR,
    n.NodeKind.IF: ActionKind.IF_TO_IF,
    n.NodeKind.EVALUATE: ActionKind.EVALUATE_TO_SWITCH,
    n.NodeKind.PERFORM_PARA: ActionKind.CALL_TO_METHOD_CALL,
    n.NodeKind.PERFORM_TIMES: ActionKind.LOOP_TO_FOR,
    n.NodeKind.PERFORM_UNTIL: ActionKind.LOOP_TO_WHILE,
    n.NodeKind.PERFORM_VARYING: ActionKind.LOOP_TO_FOR,
    n.NodeKind.DISPLAY: ActionKind.DISPLAY_TO_PRINT,
    n.NodeKind.CALL: ActionKind.CALL_TO_METHOD_CALL,
    n.NodeKind.ACCEPT: ActionKind.PASS_THROUGH,
    n.NodeKind.GOTO: ActionKind.PASS_THROUGH,
    n.NodeKind.STOP_RUN: ActionKind.PASS_THROUGH,
}


def default_action(stmt: n.Stmt) -> Action:
    return Action(_DEFAULTS[stmt.kind])


def default_actions(ast: n.CobolAst) -> list[tuple[int, Action]]:
    """(stmt_ref, action) for every statement node, in pre-order."""
    out = []
    for ref, node in enumerate(n.iter_preorder(ast.program)):
        if is_statement(node):
            out.append((ref, default_action(node)))
    return out


@dataclass(frozen=True)
class ChainShape:
    """An IF/ELSE-IF ladder comparing one variable against literals."""

    subject: str
    arms: tuple  # tuple of (If node, literal, then_body)
    default: tuple  # terminal else body (possibly empty)


def _chain_comparison(cond: n.Cond) -> tuple[str, n.NumLit | n.StrLit] | None:
    if (
        isinstance(cond, n.Comparison)
        and cond.op == "="
        and isinstance(cond.left, n.VarRef)
        and isinstance(cond.right, (n.NumLit, n.StrLit))
    ):
        return cond.left.name, cond.right
    return None


def chain_shape(stmt: n.If) -> ChainShape | None:
    head = _chain_comparison(stmt.cond)
    if head is None:
        return None
    subject = head[0]
    arms: list = []
    node: n.If = stmt
    while True:
        step = _chain_comparison(node.cond)
        if step is None or step[0] != subject:
            # A same-variable ladder ended at a foreign If: that If and
            # everything under it belongs to the default arm.
            return ChainShape(subject, tuple(arms), (node,))
        arms.append((node, step[1], tuple(node.then_body)))
        tail = node.else_body
        if len(tail) == 1 and tail[0].kind is n.NodeKind.IF:
            node = tail[0]
            continue
        return ChainShape(subject, tuple(arms), tuple(tail))


def applicable(stmt: n.Stmt, action: Action) -> bool:
    kind = action.kind
    if kind is ActionKind.EXTRACT_METHOD:
        # Bounds and split-point checks need paragraph context; the engine
        # validates them. Any statement may carry the label.
        return action.node_index is not None
    if kind is ActionKind.PASS_THROUGH:
        return stmt.kind in (n.NodeKind.ACCEPT, n.NodeKind.GOTO, n.NodeKind.STOP_RUN)
    if kind in _LOOP_ACTIONS:
        return stmt.kind in n.LOOP_KINDS
    if kind is ActionKind.IF_TO_IF:
        return stmt.kind is n.NodeKind.IF
    if kind is ActionKind.IF_CHAIN_TO_SWITCH:
        return stmt.kind is n.NodeKind.IF and chain_shape(stmt) is not None
    if kind is ActionKind.EVALUATE_TO_SWITCH:
        return stmt.kind is n.NodeKind.EVALUATE
    if kind is ActionKind.MOVE_TO_ASSIGN:
        return stmt.kind is n.NodeKind.MOVE
    if kind is ActionKind.COMPUTE_TO_EXPR:
        return stmt.kind in (n.NodeKind.COMPUTE, n.NodeKind.ARITH)
    if kind is ActionKind.CALL_TO_METHOD_CALL:
        return stmt.kind in (n.NodeKind.CALL, n.NodeKind.PERFORM_PARA)
    if kind is ActionKind.DISPLAY_TO_PRINT:
        return stmt.kind is n.NodeKind.DISPLAY
    return False
