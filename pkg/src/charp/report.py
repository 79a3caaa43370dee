"""Deterministic report serialization: TSV tables and a JSON document.

The TSV is byte-identical across runs of the same job (the determinism
contract); the JSON additionally carries wall-clock time, which is the one
field excluded from that guarantee.
"""

from __future__ import annotations

import json

TSV_COLUMNS = ("task", "component", "point", "e", "q", "lambda", "norm",
               "a_e", "s_e", "norm_dec", "s_e_dec")


def _cell(value) -> str:
    if value is None:
        return "-"
    return str(value)


def report_to_tsv(report: dict) -> str:
    lines = ["\t".join(TSV_COLUMNS)]
    for task in report["tasks"]:
        for row in task.get("rows", []):
            norm = row.get("norm")
            s_e = row.get("s_e")
            lines.append("\t".join([
                _cell(row["task"]),
                _cell(row["component"]),
                _cell(row["point"]),
                _cell(row["e"]),
                _cell(row["q"]),
                _cell(row["lambda"]),
                _cell(norm["fraction"] if norm else None),
                _cell(row["a_e"]),
                _cell(s_e["fraction"] if s_e else None),
                _cell(norm["decimal"] if norm else None),
                _cell(s_e["decimal"] if s_e else None),
            ]))
    return "\n".join(lines) + "\n"


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
