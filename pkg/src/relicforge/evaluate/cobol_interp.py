"""Reference interpreter for the COBOL subset.

Paragraphs run in declaration order starting from the first; GO TO resets
the sequential cursor (abandoning any in-flight PERFORM frames, which is
the one COBOL behavior a structured translation cannot imitate). MOVE
applies the picture rule of its target, arithmetic is wrapping 64-bit,
CALL records an event without executing the callee, and STOP RUN halts.

Step accounting mirrors the statement structure a rule translation emits
(one step per statement, per loop test, per implicit follow-on call), so
a jump-free program and its translation exhaust the budget at the same
point and their truncated traces still compare equal.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable

from relicforge.cobol import nodes as n
from relicforge.evaluate.values import (
    MAX_CALL_DEPTH,
    Budget,
    Cell,
    ExecError,
    StepLimitExceeded,
    Trace,
    arith,
    compare,
    fit,
    num_cell,
    pop_input,
    runtime_error,
    store,
    str_cell,
    to_num,
    to_str,
    HALTED,
    STEP_LIMIT,
)

_ARITH_SYMBOL = {"ADD": "+", "SUBTRACT": "-", "MULTIPLY": "*", "DIVIDE": "/"}


class _Goto(Exception):
    def __init__(self, target: str):
        super().__init__(target)
        self.target = target


class _Stop(Exception):
    pass


def build_environment(items: Iterable[n.DataItem]) -> dict[str, Cell]:
    """Elementary items become cells; groups only contribute their leaves.
    The first declaration of a name wins, matching bare-name resolution."""
    env: dict[str, Cell] = {}

    def walk(item: n.DataItem) -> None:
        if item.is_group:
            for child in item.children:
                walk(child)
            return
        width = n.picture_width(item.picture)
        if item.is_numeric:
            cell = num_cell(item.value if isinstance(item.value, int) else 0)
        else:
            raw = item.value if isinstance(item.value, str) else ""
            cell = str_cell(width, fit(raw, width))
        env.setdefault(item.name, cell)

    for item in items:
        walk(item)
    return env


class _Machine:
    def __init__(self, ast: n.CobolAst, inputs):
        self.env = build_environment(ast.data_items)
        self.paragraphs = ast.paragraphs
        self.para_index = {p.name: i for i, p in enumerate(self.paragraphs)}
        self.inputs = deque(inputs)
        self.budget = Budget()
        self.trace = Trace()
        self.depth = 0

    # -- values --------------------------------------------------------------

    def read(self, name: str):
        cell = self.env.get(name)
        if cell is None:
            raise ExecError(f"undefined variable {name}")
        return cell.value

    def assign(self, name: str, value) -> None:
        cell = self.env.get(name)
        if cell is None:
            raise ExecError(f"undefined variable {name}")
        store(cell, value)

    def expr(self, e: n.Expr):
        if isinstance(e, (n.NumLit, n.StrLit)):
            return e.value
        if isinstance(e, n.VarRef):
            return self.read(e.name)
        return arith(e.op, self.expr(e.left), self.expr(e.right))

    def cond(self, c: n.Cond) -> bool:
        if isinstance(c, n.Comparison):
            return compare(c.op, self.expr(c.left), self.expr(c.right))
        if isinstance(c, n.NotCond):
            return not self.cond(c.inner)
        if isinstance(c, n.AndCond):
            return self.cond(c.left) and self.cond(c.right)
        return self.cond(c.left) or self.cond(c.right)

    # -- control -------------------------------------------------------------

    def perform(self, target: str) -> None:
        self.depth += 1
        if self.depth > MAX_CALL_DEPTH:
            raise ExecError("call depth exceeded")
        try:
            self.body(self.paragraphs[self.para_index[target]].body)
        finally:
            self.depth -= 1

    def body(self, stmts: list[n.Stmt]) -> None:
        for stmt in stmts:
            self.stmt(stmt)

    def stmt(self, s: n.Stmt) -> None:
        self.budget.tick()
        kind = s.kind
        if kind is n.NodeKind.MOVE:
            self.assign(s.dst, self.expr(s.src))
        elif kind is n.NodeKind.COMPUTE:
            self.assign(s.dst, self.expr(s.expr))
        elif kind is n.NodeKind.ARITH:
            value = arith(_ARITH_SYMBOL[s.op], self.expr(s.b), self.expr(s.a))
            self.assign(s.giving if s.giving else s.b.name, value)
        elif kind is n.NodeKind.IF:
            self.body(s.then_body if self.cond(s.cond) else s.else_body)
        elif kind is n.NodeKind.EVALUATE:
            self.evaluate(s)
        elif kind is n.NodeKind.PERFORM_PARA:
            self.perform(s.target)
        elif kind is n.NodeKind.PERFORM_TIMES:
            # Counted loops behave like a countdown for-loop, so the exit
            # test that fails on the way out costs a step too (checks run
            # count + 1 times, not count times).
            remaining = max(to_num(self.expr(s.count)), 0)
            while True:
                self.budget.tick()
                if remaining == 0:
                    break
                remaining -= 1
                if s.target is not None:
                    # A counted paragraph perform costs one extra step per
                    # pass: the call itself, same as a loop around a call.
                    self.budget.tick()
                    self.perform(s.target)
                else:
                    self.body(s.body)
        elif kind is n.NodeKind.PERFORM_UNTIL:
            while True:
                self.budget.tick()
                if self.cond(s.cond):
                    break
                self.body(s.body)
        elif kind is n.NodeKind.PERFORM_VARYING:
            self.assign(s.var, self.expr(s.from_))
            while True:
                self.budget.tick()
                if self.cond(s.until):
                    break
                self.body(s.body)
                self.assign(s.var, arith("+", self.read(s.var), self.expr(s.by)))
        elif kind is n.NodeKind.DISPLAY:
            line = "".join(to_str(self.expr(a)) for a in s.args)
            self.trace.display_lines.append(line)
        elif kind is n.NodeKind.ACCEPT:
            self.assign(s.target, pop_input(self.inputs))
        elif kind is n.NodeKind.CALL:
            values = tuple(self.read(name) for name in s.using)
            self.trace.call_events.append((s.program, values))
        elif kind is n.NodeKind.GOTO:
            if s.target not in self.para_index:
                raise ExecError(f"unknown paragraph {s.target}")
            raise _Goto(s.target)
        elif kind is n.NodeKind.STOP_RUN:
            raise _Stop()
        else:
            raise TypeError(f"unknown statement {s!r}")

    def evaluate(self, s: n.Evaluate) -> None:
        subject = self.expr(s.subject)
        for arm in s.arms:
            if compare("=", subject, arm.value.value):
                self.body(list(arm.body))
                return
        if s.other is not None:
            self.body(s.other)


def interpret_cobol(ast: n.CobolAst, inputs) -> Trace:
    """Run the program against an input queue; never raises."""
    machine = _Machine(ast, inputs)
    trace = machine.trace
    try:
        cursor = 0
        while cursor < len(machine.paragraphs):
            try:
                machine.body(machine.paragraphs[cursor].body)
            except _Goto as jump:
                cursor = machine.para_index[jump.target]
                continue
            cursor += 1
            if cursor < len(machine.paragraphs):
                # Falling through to the next paragraph costs one step, the
                # same as the explicit follow-on call a translation makes.
                machine.budget.tick()
        trace.outcome = HALTED
    except _Stop:
        trace.outcome = HALTED
    except StepLimitExceeded:
        trace.outcome = STEP_LIMIT
    except ExecError as exc:
        trace.outcome = runtime_error(exc.reason)
    return trace
