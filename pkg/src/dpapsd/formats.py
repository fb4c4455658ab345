"""Line-oriented text codecs for graphs and tree decompositions.

Graph files:  `p wgr <n> <m>` header, then `e <u> <v> <w>` lines (1-based).
Decomposition files: `s td <bags> <max_bag_size> <n>` header, `b <id> <v...>`
bag lines, then `<i> <j>` bag-tree edges (all 1-based). Lines starting with
`c` are comments; blank lines are ignored. Serialization is canonical, so
parse/serialize round-trips are byte-identical.
"""

from __future__ import annotations

from .graphs import WeightedGraph
from .treedec import TreeDecomposition


class ParseError(ValueError):
    """Malformed input; carries the 1-based line number."""

    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


def _content_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        yield lineno, line.split()


def parse_graph(text):
    """Parse a weighted graph file; raises ParseError with a line number."""
    n = m = None
    weights = {}
    header_line = 0
    for lineno, parts in _content_lines(text):
        if parts[0] == "p":
            if n is not None:
                raise ParseError(lineno, "duplicate 'p' header")
            if len(parts) != 4 or parts[1] != "wgr":
                raise ParseError(lineno, "expected 'p wgr <n> <m>'")
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(lineno, "non-integer counts in 'p' header") from None
            if n < 0 or m < 0:
                raise ParseError(lineno, "counts must be non-negative")
            header_line = lineno
        elif parts[0] == "e":
            if n is None:
                raise ParseError(lineno, "edge line before 'p wgr' header")
            if len(parts) != 4:
                raise ParseError(lineno, "expected 'e <u> <v> <w>'")
            try:
                u, v = int(parts[1]), int(parts[2])
                w = float(parts[3])
            except ValueError:
                raise ParseError(lineno, "malformed edge line") from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(lineno, f"vertex index out of range 1..{n}")
            if u == v:
                raise ParseError(lineno, f"self-loop on vertex {u}")
            if w != w or w in (float("inf"), float("-inf")):
                raise ParseError(lineno, "weight must be finite")
            if w < 0:
                raise ParseError(lineno, f"negative weight {w}")
            key = (min(u, v) - 1, max(u, v) - 1)
            if key in weights:
                raise ParseError(lineno, f"duplicate edge ({u}, {v})")
            weights[key] = w
        else:
            raise ParseError(lineno, f"unrecognized line {' '.join(parts)!r}")
    if n is None:
        raise ParseError(0, "missing 'p wgr' header")
    if len(weights) != m:
        raise ParseError(
            header_line, f"header declares {m} edges but file has {len(weights)}"
        )
    return WeightedGraph(n, weights)


def serialize_graph(g):
    """Canonical text form: header, then edges in ascending order."""
    lines = [f"p wgr {g.n} {g.edge_count}"]
    for (u, v), w in sorted(g.weights.items()):
        lines.append(f"e {u + 1} {v + 1} {repr(float(w))}")
    return "\n".join(lines) + "\n"


def parse_decomposition(text):
    """Parse a .td-style decomposition file; raises ParseError on defects."""
    declared = None
    header_line = 0
    bags = {}
    edges = []
    for lineno, parts in _content_lines(text):
        if parts[0] == "s":
            if declared is not None:
                raise ParseError(lineno, "duplicate 's td' header")
            if len(parts) != 5 or parts[1] != "td":
                raise ParseError(lineno, "expected 's td <bags> <max_bag_size> <n>'")
            try:
                declared = tuple(int(x) for x in parts[2:])
            except ValueError:
                raise ParseError(lineno, "non-integer counts in 's td' header") from None
            if any(x < 0 for x in declared):
                raise ParseError(lineno, "counts must be non-negative")
            header_line = lineno
        elif parts[0] == "b":
            if declared is None:
                raise ParseError(lineno, "bag line before 's td' header")
            if len(parts) < 2:
                raise ParseError(lineno, "expected 'b <id> <v...>'")
            try:
                bag_id = int(parts[1])
                verts = [int(x) for x in parts[2:]]
            except ValueError:
                raise ParseError(lineno, "malformed bag line") from None
            nbags, _, nverts = declared
            if not 1 <= bag_id <= nbags:
                raise ParseError(lineno, f"bag id {bag_id} out of range 1..{nbags}")
            if bag_id in bags:
                raise ParseError(lineno, f"duplicate bag id {bag_id}")
            for v in verts:
                if not 1 <= v <= nverts:
                    raise ParseError(lineno, f"vertex {v} out of range 1..{nverts}")
            bags[bag_id] = frozenset(v - 1 for v in verts)
        else:
            if declared is None:
                raise ParseError(lineno, "tree edge before 's td' header")
            if len(parts) != 2:
                raise ParseError(lineno, "expected '<bag> <bag>' tree edge")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(lineno, "malformed tree edge line") from None
            nbags = declared[0]
            if not (1 <= i <= nbags and 1 <= j <= nbags):
                raise ParseError(lineno, f"bag id out of range 1..{nbags}")
            if i == j:
                raise ParseError(lineno, "tree edge joins a bag to itself")
            key = (min(i, j) - 1, max(i, j) - 1)
            if key in edges:
                raise ParseError(lineno, f"duplicate tree edge ({i}, {j})")
            edges.append(key)
    if declared is None:
        raise ParseError(0, "missing 's td' header")
    nbags, max_bag, _ = declared
    missing = [i for i in range(1, nbags + 1) if i not in bags]
    if missing:
        raise ParseError(header_line, f"bag {missing[0]} declared but not defined")
    actual_max = max((len(b) for b in bags.values()), default=0)
    if actual_max != max_bag:
        raise ParseError(
            header_line,
            f"header declares max bag size {max_bag} but largest bag has {actual_max}",
        )
    ordered = tuple(bags[i] for i in range(1, nbags + 1))
    return TreeDecomposition(bags=ordered, tree_edges=tuple(edges))


def serialize_decomposition(t, n_vertices=None):
    """Canonical text form; vertex universe defaults to the covered range."""
    if n_vertices is None:
        n_vertices = 1 + max((max(b) for b in t.bags if b), default=-1)
    max_bag = max((len(b) for b in t.bags), default=0)
    lines = [f"s td {t.bag_count} {max_bag} {n_vertices}"]
    for i, bag in enumerate(t.bags):
        verts = " ".join(str(v + 1) for v in sorted(bag))
        lines.append(f"b {i + 1} {verts}".rstrip())
    for i, j in t.tree_edges:
        lines.append(f"{i + 1} {j + 1}")
    return "\n".join(lines) + "\n"
