"""Human-readable bordered tables for two-dimensional joints.

Layout: rows are bins of the first variable, columns bins of the second;
the right border holds the first marginal and the bottom border the second.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .joint import JointPmf, marginal_sums

MAX_DENOMINATOR = 256
FRACTION_TOL = 1e-12


def format_prob(x: float) -> str:
    """``1/8`` style for values within 1e-12 of a fraction with denominator <= 256."""
    x = float(x)
    fr = Fraction(x).limit_denominator(MAX_DENOMINATOR)
    if abs(float(fr) - x) <= FRACTION_TOL:
        if fr.denominator == 1:
            return str(fr.numerator)
        return f"{fr.numerator}/{fr.denominator}"
    return format(x, ".12g")


def parse_prob(text: str) -> float:
    text = text.strip()
    if "/" in text:
        num, den = text.split("/")
        return int(num) / int(den)
    return float(text)


def _grid(rows, header, row_names, footer, right_label):
    cells = [[header[0]] + header[1:] + [right_label]]
    cells += [[name] + row for name, row in zip(row_names, rows)]
    cells.append(footer)
    ncol = max(len(r) for r in cells)
    for r in cells:
        r += [""] * (ncol - len(r))
    widths = [max(len(r[c]) for r in cells) for c in range(ncol)]

    def line(r):
        inner = "  ".join(v.rjust(w) for v, w in zip(r[1:-1], widths[1:-1]))
        return f"{r[0].rjust(widths[0])} | {inner} | {r[-1]}".rstrip()

    inner_width = sum(widths[1:-1]) + 2 * (ncol - 3)
    rule = "-" * (widths[0] + 1) + "+" + "-" * (inner_width + 2) + "+" + "-" * (widths[-1] + 1)
    out = [line(cells[0]), rule]
    out += [line(r) for r in cells[1:-1]]
    out += [rule, line(cells[-1])]
    return "\n".join(out)


def render_table(jp: JointPmf, labels=("p1", "p2")) -> str:
    """Bordered table of a 1-D or 2-D joint (marginals in the border)."""
    if jp.n == 1:
        return _one_dim(jp, labels[0])
    if jp.n != 2:
        raise ValueError("bordered tables are only drawn for 1- or 2-dimensional joints")
    m = jp.mass
    row_m = marginal_sums(jp, 1)
    col_m = marginal_sums(jp, 2)
    rows = [[format_prob(v) for v in m[r]] + [format_prob(row_m[r])] for r in range(m.shape[0])]
    header = [""] + [str(c) for c in range(1, m.shape[1] + 1)]
    footer = [labels[1]] + [format_prob(v) for v in col_m] + [""]
    return _grid(rows, header, [str(r) for r in range(1, m.shape[0] + 1)], footer, labels[0])


def _one_dim(jp, label):
    vals = [format_prob(v) for v in jp.mass]
    names = [str(s) for s in range(1, len(vals) + 1)]
    w0 = max(len(n) for n in names)
    w1 = max([len(v) for v in vals] + [len(label)])
    out = [f"{'':>{w0}} | {label:>{w1}}", "-" * (w0 + 1) + "+" + "-" * (w1 + 1)]
    out += [f"{n:>{w0}} | {v:>{w1}}" for n, v in zip(names, vals)]
    return "\n".join(out)


def render_slices(jp: JointPmf) -> str:
    """One bordered table per fixed value of dimensions 3..n."""
    if jp.n <= 2:
        return render_table(jp)
    parts = []
    for idx in np.ndindex(*jp.shape[2:]):
        sl = jp.mass[(slice(None), slice(None)) + idx]
        title = ", ".join(f"s{d + 3}={v + 1}" for d, v in enumerate(idx))
        total = float(sl.sum())
        body = _slice_table(sl)
        parts.append(f"[{title}]  slice mass {format_prob(total)}\n{body}")
    return "\n\n".join(parts)


def _slice_table(sl):
    rows = [[format_prob(v) for v in sl[r]] + [format_prob(sl[r].sum())] for r in range(sl.shape[0])]
    header = [""] + [str(c) for c in range(1, sl.shape[1] + 1)]
    footer = ["sum"] + [format_prob(v) for v in sl.sum(axis=0)] + [""]
    return _grid(rows, header, [str(r) for r in range(1, sl.shape[0] + 1)], footer, "sum")


def parse_table(text: str):
    """Read back a 2-D table: returns ``(cells, row_marginal, col_marginal)``."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not set(ln.strip()) <= set("-+")]
    body = lines[1:-1]
    cells, row_m = [], []
    for ln in body:
        _, mid, right = ln.split("|")
        cells.append([parse_prob(v) for v in mid.split()])
        row_m.append(parse_prob(right))
    _, mid, _ = (lines[-1] + "|").split("|")[:3]
    col_m = [parse_prob(v) for v in mid.split()]
    return np.array(cells), np.array(row_m), np.array(col_m)
