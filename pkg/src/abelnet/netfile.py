"""JSON network files.

A file holds one network. ``kind`` is ``"builtin"`` (a family name, a digraph
and family parameters) or ``"explicit"`` (the digraph plus full per-vertex
transition and emission tables). JSON arrays inside states and letters are
read back as tuples, so every built-in family survives export and import.

Explicit processors look like::

    {"vertex": 0, "letters": [0], "states": [0, 1],
     "next": [[0, 0, 1], [1, 0, 0]],
     "emit": [[0, 0, []], [1, 0, [[1, 1], [2, 1]]]]}

where ``next`` rows are ``[state, letter, new state]`` and ``emit`` rows are
``[state, letter, [[letter, count], ...]]``.
"""

from __future__ import annotations

import json
from typing import Any

from .core import Digraph, Network, Processor
from .errors import InvalidSpec
from .zoo import FAMILIES, NetworkSpec, build


class NetworkFileError(InvalidSpec):
    """A network file that cannot be parsed, with the offending location."""


def _freeze(v):
    if isinstance(v, list):
        return tuple(_freeze(x) for x in v)
    return v


def _thaw(v):
    if isinstance(v, tuple):
        return [_thaw(x) for x in v]
    return v


def _field(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise NetworkFileError(f"{where}: expected an object")
    if key not in obj:
        raise NetworkFileError(f"{where}: missing field {key!r}")
    return obj[key]


def _digraph(doc: dict) -> Digraph:
    d = _field(doc, "digraph", "top level")
    vertices = [_freeze(v) for v in _field(d, "vertices", "digraph")]
    edges = _field(d, "edges", "digraph")
    if not isinstance(edges, list):
        raise NetworkFileError("digraph.edges: expected a list")
    pairs = []
    for i, e in enumerate(edges):
        if not isinstance(e, list) or len(e) != 2:
            raise NetworkFileError(f"digraph.edges[{i}]: expected [source, target]")
        pairs.append((_freeze(e[0]), _freeze(e[1])))
    try:
        return Digraph.from_edge_list(vertices, pairs)
    except InvalidSpec as exc:
        raise NetworkFileError(f"digraph: {exc}") from None


def _processor(p: dict, where: str) -> Processor:
    vertex = _freeze(_field(p, "vertex", where))
    letters = [_freeze(a) for a in _field(p, "letters", where)]
    states = [_freeze(s) for s in _field(p, "states", where)]
    nxt, emit = {}, {}
    for j, row in enumerate(_field(p, "next", where)):
        if not isinstance(row, list) or len(row) != 3:
            raise NetworkFileError(f"{where}.next[{j}]: expected [state, letter, new state]")
        nxt[(_freeze(row[0]), _freeze(row[1]))] = _freeze(row[2])
    for j, row in enumerate(_field(p, "emit", where)):
        if not isinstance(row, list) or len(row) != 3 or not isinstance(row[2], list):
            raise NetworkFileError(f"{where}.emit[{j}]: expected [state, letter, [[letter, count], ...]]")
        vec: dict = {}
        for k, item in enumerate(row[2]):
            if not isinstance(item, list) or len(item) != 2 or not isinstance(item[1], int):
                raise NetworkFileError(f"{where}.emit[{j}][2][{k}]: expected [letter, count]")
            b = _freeze(item[0])
            vec[b] = vec.get(b, 0) + item[1]
        emit[(_freeze(row[0]), _freeze(row[1]))] = vec
    try:
        return Processor(vertex, letters, states, nxt, emit)
    except InvalidSpec as exc:
        raise NetworkFileError(f"{where}: {exc}") from None


def spec_from_document(doc: Any) -> NetworkSpec:
    if not isinstance(doc, dict):
        raise NetworkFileError("top level: expected an object")
    kind = _field(doc, "kind", "top level")
    g = _digraph(doc)
    if kind == "builtin":
        family = _field(doc, "family", "top level")
        if family not in FAMILIES or family == "explicit":
            raise NetworkFileError(f"family: unknown family {family!r}")
        params = doc.get("params", {})
        if not isinstance(params, dict):
            raise NetworkFileError("params: expected an object")
        return NetworkSpec(family, g, {k: _freeze(v) if k in ("sinks",) else v for k, v in params.items()})
    if kind == "explicit":
        procs = _field(doc, "processors", "top level")
        if not isinstance(procs, list):
            raise NetworkFileError("processors: expected a list")
        return NetworkSpec("explicit", g, {"processors": [_processor(p, f"processors[{i}]") for i, p in enumerate(procs)]})
    raise NetworkFileError(f"kind: expected 'builtin' or 'explicit', got {kind!r}")


def loads(text: str) -> Network:
    """Parse a network file and build the network."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFileError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    spec = spec_from_document(doc)
    try:
        return build(spec)
    except NetworkFileError:
        raise
    except (InvalidSpec, TypeError, ValueError, KeyError) as exc:
        raise NetworkFileError(f"{spec.family}: {exc}") from None


def load(path: str) -> Network:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise NetworkFileError(f"{path}: {exc.strerror}") from None
    return loads(text)


def _digraph_doc(g: Digraph) -> dict:
    return {"vertices": [_thaw(v) for v in g.vertices],
            "edges": [[_thaw(s), _thaw(t)] for _, s, t in g.edges()]}


def to_document(net: Network, explicit: bool = False) -> dict:
    """Document for ``net``; builder-made networks stay builtin unless ``explicit``."""
    if not explicit and net.family in FAMILIES and net.family != "explicit":
        return {"kind": "builtin", "family": net.family, "digraph": _digraph_doc(net.digraph),
                "params": json.loads(json.dumps(net.params, default=_thaw))}
    procs = []
    for p in net.processors:
        procs.append({
            "vertex": _thaw(p.vertex),
            "letters": [_thaw(a) for a in p.letters],
            "states": [_thaw(s) for s in p.states],
            "next": [[_thaw(s), _thaw(a), _thaw(p.next[(s, a)])] for s in p.states for a in p.letters],
            "emit": [[_thaw(s), _thaw(a), [[_thaw(b), c] for b, c in p.emit[(s, a)].items()]]
                     for s in p.states for a in p.letters],
        })
    return {"kind": "explicit", "digraph": _digraph_doc(net.digraph), "processors": procs}


def dumps(net: Network, explicit: bool = False) -> str:
    """Pretty form: one top-level field per line, one processor per line."""
    doc = to_document(net, explicit)
    lines = []
    for key, value in doc.items():
        if key == "processors":
            body = ",\n".join("  " + json.dumps(p) for p in value)
            lines.append(f' "processors": [\n{body}\n ]')
        else:
            lines.append(f" {json.dumps(key)}: {json.dumps(value)}")
    return "{\n" + ",\n".join(lines) + "\n}\n"
