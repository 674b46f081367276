"""Plain-text matrix format.

::

    # optional comment lines
    dim 4
    0.25 0 0 0
    0 0.25+0j 0 0
    ...

Entries are complex literals ``re<sign>imj`` (a bare real is allowed).
Parsing never consults the locale.
"""

from __future__ import annotations

import cmath
import re
from pathlib import Path

import numpy as np

from .errors import MatrixParseError

_TOKEN = re.compile(r"\S+")


def _entry(tok: str, line: int, col: int) -> complex:
    if "_" in tok or "," in tok:
        raise MatrixParseError(f"malformed number {tok!r}", line, col)
    try:
        z = complex(tok)
    except ValueError:
        raise MatrixParseError(f"malformed number {tok!r}", line, col) from None
    if not cmath.isfinite(z):
        raise MatrixParseError(f"non-finite entry {tok!r}", line, col)
    return z


def parse_matrix(text: str) -> np.ndarray:
    """Parse the text format into a complex square array.

    Raises:
        MatrixParseError: with 1-based line and column of the offending token.
    """
    dim = None
    rows: list[list[complex]] = []
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(raw)]
        if dim is None:
            if tokens[0][0] != "dim" or len(tokens) != 2:
                raise MatrixParseError("expected header 'dim <d>'", lineno, tokens[0][1])
            tok, col = tokens[1]
            if not tok.isdigit() or int(tok) < 1:
                raise MatrixParseError(f"bad dimension {tok!r}", lineno, col)
            dim = int(tok)
            continue
        if len(rows) == dim:
            raise MatrixParseError(f"more than {dim} matrix rows", lineno, tokens[0][1])
        if len(tokens) != dim:
            col = tokens[dim][1] if len(tokens) > dim else len(raw) + 1
            raise MatrixParseError(f"expected {dim} entries, found {len(tokens)}", lineno, col)
        rows.append([_entry(tok, lineno, col) for tok, col in tokens])
    if dim is None:
        raise MatrixParseError("missing 'dim <d>' header", max(last_line, 1), 1)
    if len(rows) != dim:
        raise MatrixParseError(f"expected {dim} rows, found {len(rows)}", last_line + 1, 1)
    return np.array(rows, dtype=complex)


def load_matrix(path: str | Path) -> np.ndarray:
    return parse_matrix(Path(path).read_text(encoding="utf-8"))


def _fmt(z: complex) -> str:
    re_, im = float(z.real) + 0.0, float(z.imag) + 0.0
    return f"{re_!r}{'+' if im >= 0 else '-'}{abs(im)!r}j"


def format_matrix(m) -> str:
    m = np.asarray(m, dtype=complex)
    lines = [f"dim {m.shape[0]}"]
    lines += [" ".join(_fmt(z) for z in row) for row in m]
    return "\n".join(lines) + "\n"
