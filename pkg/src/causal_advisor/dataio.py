"""CSV ingestion/export and JSON (de)serialization of project artifacts.

File formats are documented in FORMATS.md at the repository root. CSV is
comma-separated, header row first, numeric cells only, no quoting. Values
are printed with 17 significant digits so a save/load round trip is
lossless for float64.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    DataValidationError,
    DuplicateHeaderError,
    EmptyFileError,
    IoError,
    ParseError,
    UnknownColumnError,
)
from .graphs import BackgroundKnowledge, MixedGraph
from .scm import LinearScm, NodeEquation
from .stats import Dataset, NormalizationRecord

__all__ = [
    "load_csv",
    "save_csv",
    "load_graph",
    "save_graph",
    "graph_to_dict",
    "graph_from_dict",
    "load_knowledge",
    "knowledge_from_dict",
    "load_scm",
    "save_scm",
    "scm_to_dict",
    "scm_from_dict",
    "load_normalization",
    "save_normalization",
]


def _read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def _write_text(path: str | Path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def _read_json(path: str | Path) -> object:
    text = _read_text(path)
    if not text.strip():
        raise EmptyFileError(f"{path} is empty")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def load_csv(path: str | Path) -> Dataset:
    """Load a numeric CSV with a header row into a Dataset.

    Parse failures report the 1-based data row and column of the offending
    cell; structural problems (empty file, duplicate header names) raise
    their own error types.
    """
    text = _read_text(path)
    lines = text.splitlines()
    if not lines or not any(line.strip() for line in lines):
        raise EmptyFileError(f"{path} is empty")
    header = [h.strip() for h in lines[0].split(",")]
    if len(set(header)) != len(header):
        raise DuplicateHeaderError(f"{path} repeats a column name in its header")
    data_lines = [(i, line) for i, line in enumerate(lines[1:], start=1) if line.strip()]
    if not data_lines:
        raise EmptyFileError(f"{path} has a header but no data rows")
    rows = np.empty((len(data_lines), len(header)))
    for out_row, (row_no, line) in enumerate(data_lines):
        cells = line.split(",")
        if len(cells) != len(header):
            raise ParseError(
                f"{path}: {len(cells)} cells where {len(header)} were expected",
                row=row_no,
            )
        for col_no, cell in enumerate(cells, start=1):
            try:
                rows[out_row, col_no - 1] = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: cannot parse cell {cell.strip()!r}",
                    row=row_no,
                    column=col_no,
                ) from None
    return Dataset(header, rows)


def save_csv(d: Dataset, path: str | Path) -> None:
    """Write a Dataset as CSV with 17-significant-digit values."""
    lines = [",".join(d.column_names)]
    for row in d.values:
        lines.append(",".join(f"{v:.17g}" for v in row))
    _write_text(path, "\n".join(lines) + "\n")


def graph_to_dict(g: MixedGraph) -> dict:
    return {
        "nodes": list(g.node_labels),
        "directed": sorted([a, b] for a, b in g.directed),
        "undirected": sorted([a, b] for a, b in g.undirected),
    }


def graph_from_dict(obj: object) -> MixedGraph:
    if not isinstance(obj, dict) or "nodes" not in obj:
        raise ParseError("graph JSON must be an object with a 'nodes' list")
    nodes = obj["nodes"]
    if not isinstance(nodes, list) or not all(isinstance(s, str) for s in nodes):
        raise ParseError("graph 'nodes' must be a list of strings")

    def edge_list(key: str) -> list[tuple[int, int]]:
        raw = obj.get(key, [])
        if not isinstance(raw, list):
            raise ParseError(f"graph {key!r} must be a list of [i, j] pairs")
        pairs = []
        for item in raw:
            if (
                not isinstance(item, list)
                or len(item) != 2
                or not all(isinstance(v, int) for v in item)
            ):
                raise ParseError(f"graph {key!r} entries must be [i, j] index pairs")
            pairs.append((item[0], item[1]))
        return pairs

    return MixedGraph(nodes, directed=edge_list("directed"), undirected=edge_list("undirected"))


def graph_to_dot(g: MixedGraph) -> str:
    lines = ["digraph G {"]
    for v in g.node_labels:
        lines.append(f'  "{v}";')
    for a, b in sorted(g.directed):
        lines.append(f'  "{g.node_labels[a]}" -> "{g.node_labels[b]}";')
    for a, b in sorted(g.undirected):
        lines.append(f'  "{g.node_labels[a]}" -> "{g.node_labels[b]}" [dir=none];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def save_graph(g: MixedGraph, fmt: str, path: str | Path) -> None:
    """Write a graph as JSON (round-trippable) or DOT (export only)."""
    if fmt == "json":
        _write_text(path, json.dumps(graph_to_dict(g), indent=2) + "\n")
    elif fmt == "dot":
        _write_text(path, graph_to_dot(g))
    else:
        raise DataValidationError(f"unknown graph format {fmt!r}; use 'json' or 'dot'")


def load_graph(path: str | Path) -> MixedGraph:
    return graph_from_dict(_read_json(path))


def _resolve_names(names: object, columns: Sequence[str], what: str) -> list[int]:
    if not isinstance(names, list) or not all(isinstance(s, str) for s in names):
        raise ParseError(f"{what} must be a list of column names")
    out = []
    for name in names:
        try:
            out.append(list(columns).index(name))
        except ValueError:
            raise UnknownColumnError(f"{what} names unknown column {name!r}") from None
    return out


def knowledge_from_dict(obj: object, columns: Sequence[str]) -> BackgroundKnowledge:
    """Resolve a knowledge JSON object against dataset column names."""
    if not isinstance(obj, dict):
        raise ParseError("knowledge JSON must be an object")
    unknown = set(obj) - {"tiers", "forbidden", "required"}
    if unknown:
        raise ParseError(f"knowledge JSON has unknown keys {sorted(unknown)!r}")
    tiers_raw = obj.get("tiers", [])
    if not isinstance(tiers_raw, list):
        raise ParseError("'tiers' must be a list of lists of column names")
    tiers = [tuple(_resolve_names(t, columns, "tier")) for t in tiers_raw]

    def pair_list(key: str) -> list[tuple[int, int]]:
        raw = obj.get(key, [])
        if not isinstance(raw, list):
            raise ParseError(f"{key!r} must be a list of [from, to] name pairs")
        pairs = []
        for item in raw:
            if not isinstance(item, list) or len(item) != 2:
                raise ParseError(f"{key!r} entries must be [from, to] name pairs")
            a, b = _resolve_names(item, columns, key)
            pairs.append((a, b))
        return pairs

    return BackgroundKnowledge(
        node_count=len(columns),
        tiers=tiers,
        forbidden=pair_list("forbidden"),
        required=pair_list("required"),
    )


def load_knowledge(path: str | Path, columns: Sequence[str]) -> BackgroundKnowledge:
    return knowledge_from_dict(_read_json(path), columns)


def scm_to_dict(scm: LinearScm) -> dict:
    labels = scm.node_labels
    equations = {}
    for v, eq in enumerate(scm.equations):
        equations[labels[v]] = {
            "parents": [labels[p] for p in eq.parents],
            "coefficients": list(eq.coefficients),
            "intercept": eq.intercept,
            "noise_variance": eq.noise_variance,
        }
    return {"nodes": list(labels), "equations": equations}


def scm_from_dict(obj: object) -> LinearScm:
    if not isinstance(obj, dict) or "nodes" not in obj or "equations" not in obj:
        raise ParseError("SCM JSON must be an object with 'nodes' and 'equations'")
    nodes = obj["nodes"]
    if not isinstance(nodes, list) or not all(isinstance(s, str) for s in nodes):
        raise ParseError("SCM 'nodes' must be a list of strings")
    eq_map = obj["equations"]
    if not isinstance(eq_map, dict) or set(eq_map) != set(nodes):
        raise ParseError("SCM 'equations' must hold exactly one entry per node")
    edges: list[tuple[int, int]] = []
    equations: list[NodeEquation] = []
    for v, name in enumerate(nodes):
        entry = eq_map[name]
        if not isinstance(entry, dict):
            raise ParseError(f"equation for {name!r} must be an object")
        missing = {"parents", "coefficients", "intercept", "noise_variance"} - set(entry)
        if missing:
            raise ParseError(f"equation for {name!r} lacks {sorted(missing)!r}")
        parents = _resolve_names(entry["parents"], nodes, f"parents of {name!r}")
        coefficients = entry["coefficients"]
        if not isinstance(coefficients, list) or not all(
            isinstance(c, (int, float)) for c in coefficients
        ):
            raise ParseError(f"coefficients for {name!r} must be a list of numbers")
        if not isinstance(entry["intercept"], (int, float)) or not isinstance(
            entry["noise_variance"], (int, float)
        ):
            raise ParseError(f"intercept/noise_variance for {name!r} must be numbers")
        edges.extend((p, v) for p in parents)
        equations.append(
            NodeEquation(
                parents=tuple(parents),
                coefficients=tuple(float(c) for c in coefficients),
                intercept=float(entry["intercept"]),
                noise_variance=float(entry["noise_variance"]),
            )
        )
    graph = MixedGraph(nodes, directed=edges)
    return LinearScm(graph=graph, equations=tuple(equations))


def save_scm(scm: LinearScm, path: str | Path) -> None:
    _write_text(path, json.dumps(scm_to_dict(scm), indent=2) + "\n")


def load_scm(path: str | Path) -> LinearScm:
    return scm_from_dict(_read_json(path))


def save_normalization(rec: NormalizationRecord, path: str | Path) -> None:
    obj = {
        "columns": list(rec.column_names),
        "means": list(rec.means),
        "stds": list(rec.stds),
    }
    _write_text(path, json.dumps(obj, indent=2) + "\n")


def load_normalization(path: str | Path) -> NormalizationRecord:
    obj = _read_json(path)
    if not isinstance(obj, dict) or {"columns", "means", "stds"} - set(obj):
        raise ParseError("normalization JSON needs 'columns', 'means' and 'stds'")
    columns = obj["columns"]
    means = obj["means"]
    stds = obj["stds"]
    if not (
        isinstance(columns, list)
        and isinstance(means, list)
        and isinstance(stds, list)
        and len(columns) == len(means) == len(stds)
    ):
        raise ParseError("normalization lists must have matching lengths")
    if any(not isinstance(s, (int, float)) or s <= 0 for s in stds):
        raise DataValidationError("normalization stds must be positive numbers")
    return NormalizationRecord(
        column_names=tuple(columns),
        means=tuple(float(m) for m in means),
        stds=tuple(float(s) for s in stds),
    )
