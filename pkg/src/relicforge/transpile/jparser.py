"""Parser for the emitted Java subset.

Externally supplied translations (one class, long/String fields, void
methods) are read back into a JavaAst so they can be interpreted and
measured by the exact pipeline that scores generated translations. The
grammar is the emitter's output language: the main() wrapper and the
private static runtime helpers are recognized and skipped, and the
uniform trailing break of each switch case is stripped.
"""

from __future__ import annotations

import re

from relicforge.cobol.nodes import (
    AndCond,
    BinOp,
    Comparison,
    Cond,
    NotCond,
    NumLit,
    OrCond,
    StrLit,
    VarRef,
)
from relicforge.errors import ParseError, ParseFailure
from relicforge.transpile import jnodes as j

_TOKEN_RE = re.compile(
    r'"(?:\\.|[^"\\])*"'
    r"|'(?:\\.|[^'\\])'"
    r"|\d+"
    r"|[A-Za-z_][A-Za-z0-9_]*"
    r"|==|!=|<=|>=|&&|\|\|"
    r"|[-+*/<>=!(){};:,.\[\]]"
)

_CMP_FROM_JAVA = {"==": "=", "!=": "<>", "<": "<", "<=": "<=", ">": ">", ">=": ">="}


def _unquote(text: str) -> str:
    return re.sub(r"\\(.)", r"\1", text[1:-1])


def _lex(text: str) -> list[tuple[str, int]]:
    toks: list[tuple[str, int]] = []
    for line_no, line in enumerate(text.split("\n"), start=1):
        pos = 0
        for m in _TOKEN_RE.finditer(line):
            gap = line[pos : m.start()]
            if gap.strip():
                raise ParseFailure([ParseError(line_no, "Java token", gap.strip()[:1])])
            toks.append((m.group(), line_no))
            pos = m.end()
        if line[pos:].strip():
            raise ParseFailure([ParseError(line_no, "Java token", line[pos:].strip()[:1])])
    return toks


class _JParser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0

    # -- token plumbing ------------------------------------------------------

    def peek(self, k: int = 0) -> str | None:
        at = self.i + k
        return self.toks[at][0] if at < len(self.toks) else None

    def line(self) -> int:
        at = min(self.i, len(self.toks) - 1)
        return self.toks[at][1] if self.toks else 0

    def fail(self, expected: str) -> "ParseFailure":
        found = self.peek()
        return ParseFailure(
            [ParseError(self.line(), expected, found if found is not None else "end of file")]
        )

    def advance(self) -> str:
        if self.i >= len(self.toks):
            raise self.fail("more input")
        text = self.toks[self.i][0]
        self.i += 1
        return text

    def accept(self, text: str) -> bool:
        if self.peek() == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            raise self.fail(repr(text))

    def ident(self) -> str:
        got = self.peek()
        if got is None or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", got):
            raise self.fail("identifier")
        self.i += 1
        return got

    # -- skipping wrapper members ---------------------------------------------

    def skip_member(self) -> None:
        """Skip one member given its header has begun: stop after a top-level
        ';' (a field) or after the balanced '{...}' of a method body."""
        while True:
            tok = self.advance()
            if tok == ";":
                return
            if tok == "{":
                depth = 1
                while depth:
                    tok = self.advance()
                    if tok == "{":
                        depth += 1
                    elif tok == "}":
                        depth -= 1
                return

    # -- class structure -------------------------------------------------------

    def parse_class(self) -> j.JavaAst:
        self.expect("public")
        self.expect("class")
        jast = j.JavaAst(self.ident())
        self.expect("{")
        while not self.accept("}"):
            if self.peek() is None:
                raise self.fail("class member or '}'")
            self.member(jast)
        if self.peek() is not None:
            raise self.fail("end of file")
        return jast

    def member(self, jast: j.JavaAst) -> None:
        if self.peek() == "public" and self.peek(1) == "static":
            self.skip_member()  # main() wrapper
            return
        if self.peek() == "private" and self.peek(1) == "static":
            self.skip_member()  # runtime helpers and the input scanner
            return
        vis = self.peek()
        if vis not in ("public", "private"):
            raise self.fail("'public' or 'private'")
        self.advance()
        if self.peek() == "void":
            jast.methods.append(self.method())
        else:
            jast.fields.append(self.field())

    def field(self) -> j.JField:
        jtype = self.peek()
        if jtype not in ("long", "String"):
            raise self.fail("'long', 'String', or 'void'")
        self.advance()
        name = self.ident()
        self.expect("=")
        if jtype == "long":
            neg = self.accept("-")
            tok = self.advance()
            if not tok.isdigit():
                raise self.fail("integer literal")
            initial: int | str = -int(tok) if neg else int(tok)
            width = 0
        else:
            tok = self.advance()
            if not tok.startswith('"'):
                raise self.fail("string literal")
            initial = _unquote(tok)
            width = len(initial)
        self.expect(";")
        return j.JField(name, jtype, initial, width)

    def method(self) -> j.JMethod:
        self.expect("void")
        name = self.ident()
        self.expect("(")
        params: list[str] = []
        if not self.accept(")"):
            while True:
                self.expect("long")
                params.append(self.ident())
                if not self.accept(","):
                    break
            self.expect(")")
        self.expect("{")
        body = self.block()
        return j.JMethod(name, params, body)

    def block(self) -> list:
        out: list = []
        while not self.accept("}"):
            if self.peek() is None:
                raise self.fail("statement or '}'")
            out.append(self.statement())
        return out

    # -- statements -------------------------------------------------------------

    def statement(self) -> j.JStmt:
        tok = self.peek()
        if tok == "if":
            return self.if_else()
        if tok == "while":
            self.advance()
            self.expect("(")
            cond = self.cond()
            self.expect(")")
            self.expect("{")
            return j.While(cond, self.block())
        if tok == "do":
            self.advance()
            self.expect("{")
            body = self.block()
            self.expect("while")
            self.expect("(")
            cond = self.cond()
            self.expect(")")
            self.expect(";")
            return j.DoWhile(body, cond)
        if tok == "for":
            return self.for_stmt()
        if tok == "switch":
            return self.switch()
        if tok == "return":
            self.advance()
            self.expect(";")
            return j.Return()
        if tok == "break":
            self.advance()
            self.expect(";")
            return j.Break()
        if tok == "System":
            return self.println()
        name = self.ident()
        if self.accept("="):
            expr = self.expr()
            self.expect(";")
            return j.Assign(name, expr)
        self.expect("(")
        args: list = []
        if not self.accept(")"):
            while True:
                args.append(self.expr())
                if not self.accept(","):
                    break
            self.expect(")")
        self.expect(";")
        external = name[len("prog_") :] if name.startswith("prog_") else None
        return j.MethodCall(name, args, external)

    def if_else(self) -> j.IfElse:
        self.expect("if")
        self.expect("(")
        cond = self.cond()
        self.expect(")")
        self.expect("{")
        then_body = self.block()
        else_body: list = []
        if self.accept("else"):
            self.expect("{")
            else_body = self.block()
        return j.IfElse(cond, then_body, else_body)

    def for_stmt(self) -> j.For:
        self.expect("for")
        self.expect("(")
        init = None
        if self.peek() != ";":
            init = self.assign_clause()
        self.expect(";")
        cond = None
        if self.peek() != ";":
            cond = self.cond()
        self.expect(";")
        update = None
        if self.peek() != ")":
            update = self.assign_clause()
        self.expect(")")
        self.expect("{")
        return j.For(init, cond, update, self.block())

    def assign_clause(self) -> j.Assign:
        name = self.ident()
        self.expect("=")
        return j.Assign(name, self.expr())

    def switch(self) -> j.Switch:
        self.expect("switch")
        self.expect("(")
        subject = self.expr()
        self.expect(")")
        self.expect("{")
        cases: list[j.SwitchCase] = []
        default: list | None = None
        while not self.accept("}"):
            if self.accept("case"):
                value = self.case_value()
                self.expect(":")
                self.expect("{")
                cases.append(j.SwitchCase(value, tuple(self.case_body())))
            elif self.accept("default"):
                self.expect(":")
                self.expect("{")
                default = self.case_body()
            else:
                raise self.fail("'case', 'default', or '}'")
        return j.Switch(subject, cases, default)

    def case_value(self) -> NumLit | StrLit:
        neg = self.accept("-")
        tok = self.advance()
        if tok.isdigit():
            return NumLit(-int(tok) if neg else int(tok))
        if not neg and tok.startswith('"'):
            return StrLit(_unquote(tok))
        raise self.fail("case literal")

    def case_body(self) -> list:
        body = self.block()
        if body and body[-1].kind is j.JKind.BREAK:
            body.pop()  # the uniform case-trailing break is emission detail
        return body

    def println(self) -> j.Print:
        self.expect("System")
        self.expect(".")
        self.expect("out")
        self.expect(".")
        self.expect("println")
        self.expect("(")
        arg = self.expr()
        self.expect(")")
        self.expect(";")
        terms: list = []
        stack = [arg]
        while stack:
            e = stack.pop()
            if isinstance(e, BinOp) and e.op == "+":
                stack.append(e.right)
                stack.append(e.left)
            else:
                terms.append(e)
        args = [
            t.args[0] if isinstance(t, j.JCall) and t.name == "str" and len(t.args) == 1 else t
            for t in terms
        ]
        return j.Print(args)

    # -- expressions and conditions ----------------------------------------------

    def expr(self) -> j.JExpr:
        left = self.term()
        while self.peek() in ("+", "-"):
            op = self.advance()
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> j.JExpr:
        left = self.factor()
        while self.peek() in ("*", "/"):
            op = self.advance()
            left = BinOp(op, left, self.factor())
        return left

    def factor(self) -> j.JExpr:
        tok = self.peek()
        if tok is None:
            raise self.fail("expression")
        if tok == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        if tok == "-":
            self.advance()
            num = self.advance()
            if not num.isdigit():
                raise self.fail("integer literal")
            return NumLit(-int(num))
        if tok.isdigit():
            self.advance()
            return NumLit(int(tok))
        if tok.startswith('"'):
            self.advance()
            return StrLit(_unquote(tok))
        name = self.ident()
        if self.accept("("):
            args: list = []
            if not self.accept(")"):
                while True:
                    args.append(self.expr())
                    if not self.accept(","):
                        break
                self.expect(")")
            return j.JCall(name, tuple(args))
        return VarRef(name)

    def cond(self) -> Cond:
        left = self.and_cond()
        while self.accept("||"):
            left = OrCond(left, self.and_cond())
        return left

    def and_cond(self) -> Cond:
        left = self.primary_cond()
        while self.accept("&&"):
            left = AndCond(left, self.primary_cond())
        return left

    def primary_cond(self) -> Cond:
        if self.peek() == "!" and self.peek(1) == "(":
            self.advance()
            self.advance()
            inner = self.cond()
            self.expect(")")
            return NotCond(inner)
        if self.peek() == "(":
            # Ambiguous: a condition group or a parenthesized arithmetic
            # operand. Try the group reading first and backtrack on failure.
            mark = self.i
            try:
                self.advance()
                inner = self.cond()
                self.expect(")")
                return inner
            except ParseFailure:
                self.i = mark
        return self.comparison()

    def comparison(self) -> Comparison:
        left = self.expr()
        op = self.peek()
        if op not in _CMP_FROM_JAVA:
            raise self.fail("comparison operator")
        self.advance()
        return Comparison(_CMP_FROM_JAVA[op], left, self.expr())


def parse_java(text: str) -> j.JavaAst:
    """Parse emitted-subset Java source into a JavaAst.

    Raises ParseFailure on anything outside the subset.
    """
    return _JParser(text).parse_class()
