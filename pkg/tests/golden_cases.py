"""Golden CLI reports: inputs in tests/golden/*.arr, expected output next to them.

Run ``python tests/golden_cases.py`` to regenerate the expected files after
an intended change of report format; review the diff before committing.
"""

from __future__ import annotations

import contextlib
import io
import sys
from pathlib import Path

from arrh.cli import main

GOLDEN = Path(__file__).parent / "golden"

# (input stem, command, extra arguments)
CASES = [
    ("arrt_3_-1", "freeness", []),
    ("braid", "freeness", []),
    ("char2_pencil", "freeness", []),
    ("cycle_chord", "freeness", []),
    ("generic4", "freeness", []),
    ("path_triangles", "freeness", []),
    ("seven_lines", "freeness", []),
    ("seven_lines_not_free", "freeness", []),
    ("two_pencils_free", "freeness", []),
    ("two_pencils_not_free", "freeness", []),
    ("x3_t-1_n2", "freeness", []),
    ("x3_t2_simple", "freeness", []),
    ("ziegler_conic", "freeness", []),
    ("ziegler_generic", "freeness", []),
    ("x3_t2_simple", "lattice", []),
    ("x3_t2_simple", "formality", []),
    ("ziegler_conic", "formality", []),
    ("ziegler_generic", "formality", []),
    ("ziegler_generic", "homology", ["--dmax", "6"]),
    ("seven_lines", "tf2", ["--dmax", "4"]),
    ("braid", "terao3", ["--dmax", "5"]),
]


def expected_path(stem: str, command: str) -> Path:
    return GOLDEN / f"{stem}.{command}.json"


def run_case(stem: str, command: str, extra) -> tuple[int, str]:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main([command, "--file", str(GOLDEN / f"{stem}.arr"), "--json", *extra])
    return code, buf.getvalue()


def regenerate() -> None:
    for stem, command, extra in CASES:
        code, out = run_case(stem, command, extra)
        if code not in (0, 2):
            raise SystemExit(f"{stem} {command}: exit code {code}")
        expected_path(stem, command).write_text(out)
        print(f"wrote {expected_path(stem, command).name}", file=sys.stderr)


if __name__ == "__main__":
    regenerate()
