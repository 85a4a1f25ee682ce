"""Line-oriented reports: ``key = value`` header lines, then whitespace-delimited tables.

Floats are written with 17 significant digits so a report pins down every
double it mentions; nothing time- or host-dependent is ever included.
"""
from __future__ import annotations

import math

import numpy as np

FORMAT_TAG = "mfix-report 1"


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    if value is None:
        return "none"
    return str(value)


class Report:
    def __init__(self, command: str):
        self.header: list[tuple[str, str]] = [("command", command)]
        self.tables: list[tuple[str, list[str], list[list[str]]]] = []

    def set(self, key: str, value) -> None:
        self.header.append((key, fmt(value)))

    def table(self, name: str, columns: list[str], rows) -> None:
        self.tables.append((name, columns, [[fmt(v) for v in row] for row in rows]))

    def render(self) -> str:
        lines = [FORMAT_TAG]
        lines += [f"{k} = {v}" for k, v in self.header]
        for name, columns, rows in self.tables:
            lines.append(f"--- {name}")
            lines.append(" ".join(columns))
            lines += [" ".join(r) for r in rows]
        return "\n".join(lines) + "\n"


def parse_report(text: str) -> tuple[dict[str, str], dict[str, list[dict[str, str]]]]:
    """Inverse of :meth:`Report.render`, returning strings."""
    lines = text.splitlines()
    if not lines or lines[0] != FORMAT_TAG:
        raise ValueError("not an mfix report")
    header: dict[str, str] = {}
    tables: dict[str, list[dict[str, str]]] = {}
    k = 1
    while k < len(lines) and not lines[k].startswith("--- "):
        key, _, value = lines[k].partition(" = ")
        header[key] = value
        k += 1
    while k < len(lines):
        name = lines[k][4:]
        columns = lines[k + 1].split()
        k += 2
        rows = []
        while k < len(lines) and not lines[k].startswith("--- "):
            rows.append(dict(zip(columns, lines[k].split())))
            k += 1
        tables[name] = rows
    return header, tables
