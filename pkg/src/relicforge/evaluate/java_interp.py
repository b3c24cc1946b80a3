"""Interpreter for the emitted Java subset.

Executes run() with the same value semantics as the COBOL interpreter.
`return` halts the whole program (it stands for STOP RUN in translated
code; paragraph fall-through is modeled by explicit calls, so a plain
method-end return never appears). External stub calls are recorded as
events under their original program names; builtins in/num/fit/str carry
the width and parse rules that the emitter baked into the source.
"""

from __future__ import annotations

from collections import deque

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
from relicforge.transpile import jnodes as j


class _Stop(Exception):
    pass


class _Break(Exception):
    pass


def _field_cell(field: j.JField) -> Cell:
    if field.jtype == "long":
        return num_cell(field.initial if isinstance(field.initial, int) else 0)
    raw = field.initial if isinstance(field.initial, str) else ""
    return str_cell(field.width, raw)


class _Machine:
    def __init__(self, jast: j.JavaAst, inputs):
        self.fields = {f.name: _field_cell(f) for f in jast.fields}
        self.methods = {m.name: m for m in jast.methods}
        self.inputs = deque(inputs)
        self.budget = Budget()
        self.trace = Trace()
        self.depth = 0

    # -- values --------------------------------------------------------------

    def _cell(self, name: str, frame: dict[str, Cell]) -> Cell:
        cell = frame.get(name) or self.fields.get(name)
        if cell is None:
            raise ExecError(f"undefined variable {name}")
        return cell

    def expr(self, e, frame: dict[str, Cell]):
        if isinstance(e, (n.NumLit, n.StrLit)):
            return e.value
        if isinstance(e, n.VarRef):
            return self._cell(e.name, frame).value
        if isinstance(e, n.BinOp):
            return arith(e.op, self.expr(e.left, frame), self.expr(e.right, frame))
        if isinstance(e, j.JCall):
            return self.builtin(e.name, [self.expr(a, frame) for a in e.args])
        raise TypeError(f"unknown expression {e!r}")

    def builtin(self, name: str, args: list):
        arity = {"in": 0, "num": 1, "fit": 2, "str": 1}.get(name)
        if arity is None:
            raise ExecError(f"{name} is not a value function")
        if len(args) != arity:
            raise ExecError(f"wrong number of arguments to {name}")
        if name == "in":
            return pop_input(self.inputs)
        if name == "num":
            return to_num(args[0])
        if name == "fit":
            return fit(to_str(args[0]), to_num(args[1]))
        return to_str(args[0])

    def cond(self, c: n.Cond, frame: dict[str, Cell]) -> bool:
        if isinstance(c, n.Comparison):
            return compare(c.op, self.expr(c.left, frame), self.expr(c.right, frame))
        if isinstance(c, n.NotCond):
            return not self.cond(c.inner, frame)
        if isinstance(c, n.AndCond):
            return self.cond(c.left, frame) and self.cond(c.right, frame)
        return self.cond(c.left, frame) or self.cond(c.right, frame)

    # -- control -------------------------------------------------------------

    def call(self, method: j.JMethod, args: list) -> None:
        self.depth += 1
        if self.depth > MAX_CALL_DEPTH:
            raise ExecError("call depth exceeded")
        if len(args) != len(method.params):
            raise ExecError(f"wrong number of arguments to {method.name}")
        frame: dict[str, Cell] = {}
        for param, value in zip(method.params, args):
            cell = num_cell()
            store(cell, value)
            frame[param] = cell
        try:
            self.body(method.body, frame)
        except _Break:
            raise ExecError("break outside loop or switch") from None
        finally:
            self.depth -= 1

    def body(self, stmts, frame: dict[str, Cell]) -> None:
        for stmt in stmts:
            self.stmt(stmt, frame)

    def run_assign(self, a: j.Assign, frame: dict[str, Cell]) -> None:
        store(self._cell(a.target, frame), self.expr(a.expr, frame))

    def stmt(self, s, frame: dict[str, Cell]) -> None:
        self.budget.tick()
        kind = s.kind
        if kind is j.JKind.ASSIGN:
            self.run_assign(s, frame)
        elif kind is j.JKind.EXPR_STMT:
            self.expr(s.expr, frame)
        elif kind is j.JKind.IF_ELSE:
            self.body(s.then_body if self.cond(s.cond, frame) else s.else_body, frame)
        elif kind is j.JKind.WHILE:
            while True:
                self.budget.tick()
                if not self.cond(s.cond, frame):
                    break
                try:
                    self.body(s.body, frame)
                except _Break:
                    break
        elif kind is j.JKind.DO_WHILE:
            while True:
                try:
                    self.body(s.body, frame)
                except _Break:
                    break
                self.budget.tick()
                if not self.cond(s.cond, frame):
                    break
        elif kind is j.JKind.FOR:
            if s.init is not None:
                self.run_assign(s.init, frame)
            while True:
                self.budget.tick()
                if s.cond is not None and not self.cond(s.cond, frame):
                    break
                try:
                    self.body(s.body, frame)
                except _Break:
                    break
                if s.update is not None:
                    self.run_assign(s.update, frame)
        elif kind is j.JKind.SWITCH:
            self.switch(s, frame)
        elif kind is j.JKind.METHOD_CALL:
            self.method_call(s, frame)
        elif kind is j.JKind.PRINT:
            line = "".join(to_str(self.expr(a, frame)) for a in s.args)
            self.trace.display_lines.append(line)
        elif kind is j.JKind.RETURN:
            raise _Stop()
        elif kind is j.JKind.BREAK:
            raise _Break()
        else:
            raise TypeError(f"unknown statement {s!r}")

    def switch(self, s: j.Switch, frame: dict[str, Cell]) -> None:
        subject = self.expr(s.subject, frame)
        body = list(s.default) if s.default is not None else []
        for case in s.cases:
            if compare("=", subject, case.value.value):
                body = list(case.body)
                break
        try:
            self.body(body, frame)
        except _Break:
            pass

    def method_call(self, s: j.MethodCall, frame: dict[str, Cell]) -> None:
        args = [self.expr(a, frame) for a in s.args]
        if s.external_name is not None:
            self.trace.call_events.append((s.external_name, tuple(args)))
        elif s.name in self.methods:
            self.call(self.methods[s.name], args)
        elif s.name in j.BUILTINS:
            self.builtin(s.name, args)
        else:
            raise ExecError(f"unknown method {s.name}")


def interpret_java(jast: j.JavaAst, inputs) -> Trace:
    """Run the class's run() against an input queue; never raises."""
    machine = _Machine(jast, inputs)
    trace = machine.trace
    try:
        entry = machine.methods.get("run")
        if entry is None:
            raise ExecError("no run method")
        machine.call(entry, [])
        trace.outcome = HALTED
    except _Stop:
        trace.outcome = HALTED
    except StepLimitExceeded:
        trace.outcome = STEP_LIMIT
    except ExecError as exc:
        trace.outcome = runtime_error(exc.reason)
    return trace
