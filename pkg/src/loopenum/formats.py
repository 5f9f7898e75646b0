"""Text formats for Cayley tables, cocycles and GF(p) bases.

All files are ASCII with LF line endings, no trailing whitespace, and end
with a final newline. Writers are canonical so that read/write round trips
are byte-exact.

* loop/quandle:  "loop n" or "quandle n", then n lines of n indices
* cocycle:       "cocycle n p", then n lines of n values
* basis:         "gfbasis p ncols", then one line per basis row
"""

from __future__ import annotations

import numpy as np

from .tables import LoopTable, QuandleTable


def _render(kind, args, rows):
    lines = [kind + " " + " ".join(str(a) for a in args)]
    for row in rows:
        lines.append(" ".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def _parse(text, expected_kinds):
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    else:
        raise ValueError("file does not end with a newline")
    if not lines:
        raise ValueError("empty file")
    for ln in lines:
        if ln != ln.rstrip():
            raise ValueError("trailing whitespace")
    head = lines[0].split(" ")
    kind = head[0]
    if kind not in expected_kinds:
        raise ValueError(f"unexpected header {kind!r}, "
                         f"wanted one of {sorted(expected_kinds)}")
    try:
        args = [int(a) for a in head[1:]]
    except ValueError:
        raise ValueError(f"malformed header line {lines[0]!r}") from None
    rows = []
    for ln in lines[1:]:
        try:
            rows.append([int(v) for v in ln.split(" ")])
        except ValueError:
            raise ValueError(f"malformed row {ln!r}") from None
    return kind, args, rows


def dumps_table(q):
    kind = "quandle" if isinstance(q, QuandleTable) else "loop"
    return _render(kind, [q.n], q.table)


def loads_table(text):
    """Parse a loop or quandle file; returns LoopTable or QuandleTable."""
    kind, args, rows = _parse(text, {"loop", "quandle"})
    if len(args) != 1:
        raise ValueError("table header must be '<kind> <n>'")
    n = args[0]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"expected {n} rows of {n} entries")
    arr = np.array(rows)
    return QuandleTable(arr) if kind == "quandle" else LoopTable(arr)


def write_table(path, q):
    with open(path, "w", newline="\n") as fh:
        fh.write(dumps_table(q))


def read_table(path):
    with open(path, encoding="ascii") as fh:
        return loads_table(fh.read())


def dumps_cocycle(theta):
    return _render("cocycle", [theta.n, theta.p], theta.entries)


def loads_cocycle(text):
    from .cocycles import Cocycle
    _, args, rows = _parse(text, {"cocycle"})
    if len(args) != 2:
        raise ValueError("cocycle header must be 'cocycle n p'")
    n, p = args
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"expected {n} rows of {n} entries")
    return Cocycle(np.array(rows), p)


def write_cocycle(path, theta):
    with open(path, "w", newline="\n") as fh:
        fh.write(dumps_cocycle(theta))


def read_cocycle(path):
    with open(path, encoding="ascii") as fh:
        return loads_cocycle(fh.read())


def dumps_basis(basis):
    return _render("gfbasis", [basis.p, basis.ncols], basis.rows)


def loads_basis(text):
    from .gf import RREFBasis
    _, args, rows = _parse(text, {"gfbasis"})
    if len(args) != 2:
        raise ValueError("basis header must be 'gfbasis p ncols'")
    p, ncols = args
    if any(len(r) != ncols for r in rows):
        raise ValueError(f"expected rows of {ncols} entries")
    arr = np.array(rows, dtype=np.uint8).reshape(len(rows), ncols)
    return RREFBasis.from_rref_rows(arr, p, ncols)


def write_basis(path, basis):
    with open(path, "w", newline="\n") as fh:
        fh.write(dumps_basis(basis))


def read_basis(path):
    with open(path, encoding="ascii") as fh:
        return loads_basis(fh.read())
