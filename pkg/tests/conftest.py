"""Shared corpus fixtures for pipeline and acceptance tests."""

from pathlib import Path

import pytest


def _program(program_id: str, statements: list[str], data: list[str] | None = None) -> str:
    lines = [
        "IDENTIFICATION DIVISION.",
        f"PROGRAM-ID. {program_id}.",
    ]
    if data:
        lines += ["DATA DIVISION.", "WORKING-STORAGE SECTION."] + data
    lines.append("PROCEDURE DIVISION.")
    lines.append("MAIN.")
    lines += [f"    {s}" for s in statements]
    return "\n".join(lines) + "\n"


def write_fixture_corpus(root: Path) -> dict[str, int]:
    """20 files: 9 clean, 3 repairable, 2 unrepairable, 4 duplicates, 2 trivial.

    Returns the expected status counts.
    """
    clean = {}
    for i in range(1, 10):
        clean[f"clean{i:02d}.cbl"] = _program(
            f"CLEAN{i}",
            [f"MOVE {i} TO N.", f"ADD {i + 1} TO N.", "DISPLAY N."],
            ["01 N PIC 9(4) VALUE 0."],
        )
    for name, text in clean.items():
        (root / name).write_text(text)

    # Repairable: missing END-IF, missing final period, unterminated string.
    (root / "fix1.cbl").write_text(
        "IDENTIFICATION DIVISION.\n"
        "PROGRAM-ID. FIXA.\n"
        "PROCEDURE DIVISION.\n"
        "MAIN.\n"
        "    MOVE 1 TO N.\n"
        "    IF N = 1\n"
        '        DISPLAY "ONE"\n'
        '    DISPLAY "DONE".\n'
    )
    (root / "fix2.cbl").write_text(
        "IDENTIFICATION DIVISION.\n"
        "PROGRAM-ID. FIXB.\n"
        "PROCEDURE DIVISION.\n"
        "MAIN.\n"
        "    MOVE 1 TO N.\n"
        "    MOVE 2 TO M.\n"
        "    DISPLAY N\n"
    )
    (root / "fix3.cbl").write_text(
        "IDENTIFICATION DIVISION.\n"
        "PROGRAM-ID. FIXC.\n"
        "PROCEDURE DIVISION.\n"
        "MAIN.\n"
        "    MOVE 1 TO N.\n"
        "    ADD 1 TO N.\n"
        '    DISPLAY "HELLO.\n'
    )

    # Unrepairable: free-form garbage and an unresolved PERFORM target.
    (root / "bad1.cbl").write_text("THIS IS NOT A PROGRAM AT ALL\nJUST SOME WORDS\n")
    (root / "bad2.cbl").write_text(
        "IDENTIFICATION DIVISION.\n"
        "PROGRAM-ID. BADB.\n"
        "PROCEDURE DIVISION.\n"
        "MAIN.\n"
        "    PERFORM NOPARA.\n"
    )

    # Duplicates of clean files; zdup2 differs only by CRLF + trailing blanks.
    (root / "zdup1.cbl").write_text(clean["clean01.cbl"])
    (root / "zdup2.cbl").write_bytes(
        clean["clean02.cbl"].replace("\n", "  \r\n").encode("utf-8")
    )
    (root / "zdup3.cbl").write_text(clean["clean03.cbl"])
    (root / "zdup4.cbl").write_text(clean["clean01.cbl"])

    # Trivial: under the statement threshold, and all-DISPLAY.
    (root / "triv1.cbl").write_text(
        _program("TRIVA", ["MOVE 1 TO N.", "DISPLAY N."], ["01 N PIC 9(2) VALUE 0."])
    )
    (root / "triv2.cbl").write_text(
        _program("TRIVB", ['DISPLAY "A".', 'DISPLAY "B".', 'DISPLAY "C".'])
    )
    return {"clean": 9, "repaired": 3, "rejected": 2, "duplicate": 4, "trivial": 2}


@pytest.fixture
def fixture_corpus(tmp_path):
    expected = write_fixture_corpus(tmp_path)
    return tmp_path, expected
