"""Deterministic Java source emission: 4-space indent, braces always.

The emitted file carries a main() wrapper plus a fixed runtime-support
block (in/num/fit/str) so the text is compilable-shaped; neither is part
of the JavaAst.
"""

from __future__ import annotations

from relicforge.transpile import jnodes as j

RUNTIME_SUPPORT = """\
    private static final java.util.Scanner STDIN = new java.util.Scanner(System.in);

    private static String in() {
        return STDIN.nextLine();
    }

    private static long num(String v) {
        return Long.parseLong(v.trim());
    }

    private static String fit(String v, int w) {
        if (v.length() > w) {
            return v.substring(0, w);
        }
        StringBuilder b = new StringBuilder(v);
        while (b.length() < w) {
            b.append(' ');
        }
        return b.toString();
    }

    private static String str(long v) {
        return String.valueOf(v);
    }

    private static String str(String v) {
        return v;
    }
"""


def _field_line(field: j.JField) -> str:
    if field.jtype == "long":
        return f"    private long {field.name} = {field.initial};"
    return f"    private String {field.name} = {j.java_quote(field.initial)};"


def _case_value(value) -> str:
    return j.jexpr_text(value)


def _emit_body(lines: list[str], body, depth: int) -> None:
    pad = "    " * depth
    for stmt in body:
        kind = stmt.kind
        if kind is j.JKind.ASSIGN:
            lines.append(f"{pad}{stmt.target} = {j.jexpr_text(stmt.expr)};")
        elif kind is j.JKind.EXPR_STMT:
            lines.append(f"{pad}{j.jexpr_text(stmt.expr)};")
        elif kind is j.JKind.METHOD_CALL:
            args = ", ".join(j.jexpr_text(a) for a in stmt.args)
            lines.append(f"{pad}{stmt.name}({args});")
        elif kind is j.JKind.PRINT:
            rendered = " + ".join(f"str({j.jexpr_text(a)})" for a in stmt.args)
            lines.append(f"{pad}System.out.println({rendered or j.java_quote('')});")
        elif kind is j.JKind.IF_ELSE:
            lines.append(f"{pad}if ({j.jcond_text(stmt.cond)}) {{")
            _emit_body(lines, stmt.then_body, depth + 1)
            if stmt.else_body:
                lines.append(f"{pad}}} else {{")
                _emit_body(lines, stmt.else_body, depth + 1)
            lines.append(f"{pad}}}")
        elif kind is j.JKind.WHILE:
            lines.append(f"{pad}while ({j.jcond_text(stmt.cond)}) {{")
            _emit_body(lines, stmt.body, depth + 1)
            lines.append(f"{pad}}}")
        elif kind is j.JKind.DO_WHILE:
            lines.append(f"{pad}do {{")
            _emit_body(lines, stmt.body, depth + 1)
            lines.append(f"{pad}}} while ({j.jcond_text(stmt.cond)});")
        elif kind is j.JKind.FOR:
            init = f"{stmt.init.target} = {j.jexpr_text(stmt.init.expr)}" if stmt.init else ""
            cond = j.jcond_text(stmt.cond) if stmt.cond else ""
            update = (
                f"{stmt.update.target} = {j.jexpr_text(stmt.update.expr)}"
                if stmt.update
                else ""
            )
            lines.append(f"{pad}for ({init}; {cond}; {update}) {{")
            _emit_body(lines, stmt.body, depth + 1)
            lines.append(f"{pad}}}")
        elif kind is j.JKind.SWITCH:
            lines.append(f"{pad}switch ({j.jexpr_text(stmt.subject)}) {{")
            for case in stmt.cases:
                lines.append(f"{pad}    case {_case_value(case.value)}: {{")
                _emit_body(lines, case.body, depth + 2)
                lines.append(f"{pad}        break;")
                lines.append(f"{pad}    }}")
            if stmt.default is not None:
                lines.append(f"{pad}    default: {{")
                _emit_body(lines, stmt.default, depth + 2)
                lines.append(f"{pad}        break;")
                lines.append(f"{pad}    }}")
            lines.append(f"{pad}}}")
        elif kind is j.JKind.RETURN:
            lines.append(f"{pad}return;")
        elif kind is j.JKind.BREAK:
            lines.append(f"{pad}break;")
        else:
            raise TypeError(f"unknown statement {stmt!r}")


def emit_java(jast: j.JavaAst) -> str:
    lines: list[str] = [f"public class {jast.class_name} {{"]
    for field in jast.fields:
        lines.append(_field_line(field))
    if jast.fields:
        lines.append("")
    lines.append("    public static void main(String[] args) {")
    lines.append(f"        new {jast.class_name}().run();")
    lines.append("    }")
    for method in jast.methods:
        lines.append("")
        visibility = "public" if method.name == "run" else "private"
        params = ", ".join(f"long {p}" for p in method.params)
        lines.append(f"    {visibility} void {method.name}({params}) {{")
        _emit_body(lines, method.body, 2)
        lines.append("    }")
    lines.append("")
    lines.append(RUNTIME_SUPPORT.rstrip("\n"))
    lines.append("}")
    return "\n".join(lines) + "\n"
