"""JSON and CSV formats used by the command line.

Graph files are ``{"n": 5, "edges": [[1, 2], ...]}`` with vertices ``1..n``.
Scripts are lists such as ``[{"op": "my", "a": 3}]`` and noise specs are
``{"channels": [...]}``.
"""

from __future__ import annotations

import csv
import json
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import IO, Any

from .engine import Operation, parse_script
from .errors import GraphFormatError
from .fidelity import DiagonalEnsemble, fidelity
from .graph import Graph
from .noise import ChannelSpec, NoiseMap, parse_noise_spec

__all__ = [
    "graph_from_json",
    "graph_to_json",
    "script_to_json",
    "result_to_json",
    "load_json",
    "load_graph",
    "load_script",
    "load_noise",
    "format_float",
    "write_csv",
]


def graph_from_json(obj: Mapping) -> Graph:
    """Build a graph on ``1..n`` from its JSON form, rejecting loops and repeats.

    >>> graph_from_json({"n": 3, "edges": [[1, 2], [2, 3]]}).edge_list()
    [(1, 2), (2, 3)]
    """
    if not isinstance(obj, Mapping) or "n" not in obj:
        raise GraphFormatError('graph JSON needs an "n" field')
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise GraphFormatError(f"n must be a non-negative integer, got {n!r}")
    edges = obj.get("edges", [])
    if not isinstance(edges, Sequence):
        raise GraphFormatError('"edges" must be a list of vertex pairs')
    g = Graph(range(1, n + 1))
    seen: set[frozenset[int]] = set()
    for e in edges:
        if not isinstance(e, Sequence) or len(e) != 2:
            raise GraphFormatError(f"edge {e!r} is not a pair")
        u, v = e
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in (u, v)):
            raise GraphFormatError(f"edge {e!r} has non-integer endpoints")
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphFormatError(f"edge {e!r} leaves the vertex range 1..{n}")
        if u == v:
            raise GraphFormatError(f"self-loop at vertex {u}")
        key = frozenset((u, v))
        if key in seen:
            raise GraphFormatError(f"repeated edge {sorted(key)}")
        seen.add(key)
        g.add_edge(u, v)
    return g


def graph_to_json(g: Graph) -> dict:
    """Live vertices and edges of ``g``; labels are kept as they are."""
    return {"vertices": sorted(g.vertices), "edges": [list(e) for e in g.edge_list()]}


def script_to_json(script: Iterable[Operation]) -> list[dict]:
    return [op.to_json() for op in script]


def result_to_json(ens: DiagonalEnsemble, graph: Graph, maps: Sequence[NoiseMap]) -> dict:
    return {
        "targets": list(ens.targets),
        "fidelity": fidelity(ens),
        "populations": ens.populations(),
        "graph": graph_to_json(graph),
        "maps": [m.to_json() for m in maps],
    }


def load_json(path: str | Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"{path}: invalid JSON ({exc})") from exc


def load_graph(path: str | Path) -> Graph:
    return graph_from_json(load_json(path))


def load_script(path: str | Path) -> list[Operation]:
    items = load_json(path)
    if not isinstance(items, list):
        raise GraphFormatError(f"{path}: a script must be a JSON list")
    return parse_script(items)


def load_noise(path: str | Path, g: Graph) -> list[ChannelSpec]:
    return parse_noise_spec(load_json(path), g)


def format_float(x: float) -> str:
    """Plain decimal with 17 significant digits."""
    return format(float(x), ".17g")


def write_csv(rows: Iterable[Mapping], columns: Sequence[str], out: IO[str]) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_float(row[c]) if isinstance(row[c], float) else row[c] for c in columns])
