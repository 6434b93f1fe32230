from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Optional, Tuple, Self, FrozenSet, Generator

import numpy as np

from twinproof.annotations import color, pure, seeded
from twinproof.config import limits
from twinproof.errors import (
    GraphFormatError, SelfLoopError, ColoringError, SizeCapError,
    GraphParameterError
)
from twinproof.logging import Logger, logger_or_silent


__all__ = (
    "Graph",
    "Coloring",
    "parse_graph",
    "serialize_graph",
    "is_valid_coloring",
    "find_3coloring",
    "exhaustive_3colorings",
    "complete",
    "cycle",
    "wheel",
    "petersen",
    "gnp",
    "complement",
    "generate",
    "random_corpus",
)


Edge = Tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """
    Simple undirected graph on nodes `0..n-1`.

    Edges are stored as ordered pairs `(u, v)` with `u < v`; self-loops are
    rejected.
    """

    n: int
    edges: FrozenSet[Edge] = frozenset()

    def __post_init__(self) -> None:
        if self.n < 1:
            raise GraphParameterError(f"graph must have at least one node, got {self.n}")

        normalized = set()

        for u, v in self.edges:
            if u == v:
                raise SelfLoopError(f"self-loop on node {u}")

            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphFormatError(f"edge ({u}, {v}) leaves nodes 0..{self.n - 1}")

            normalized.add((min(u, v), max(u, v)))

        object.__setattr__(self, "edges", frozenset(normalized))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.sorted_edges})"

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def sorted_edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def neighbors_of(self, node: int) -> Tuple[int, ...]:
        return tuple(sorted(
            v if u == node else u
            for u, v in self.edges
            if node in (u, v)
        ))


@dataclass(frozen=True)
class Coloring:
    """Assignment `C: V -> {0, 1, 2}` stored as a tuple indexed by node."""

    colors: Tuple[color, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))

        if any(c not in (0, 1, 2) for c in self.colors):
            raise ColoringError(f"colors {self.colors} must lie in 0, 1, 2")

    def __len__(self) -> int:
        return len(self.colors)

    def __getitem__(self, node: int) -> int:
        return self.colors[node]

    def __iter__(self):
        return iter(self.colors)


def _ints_of(tokens: Iterable[str], line_number: int) -> Tuple[int, ...]:
    try:
        return tuple(int(token) for token in tokens)
    except ValueError:
        raise GraphFormatError(f"line {line_number}: expected integers") from None


def parse_graph(text: str, *, logger: Optional[Logger] = None) -> Graph:
    """
    Function to read a graph from DIMACS edge format.

    Accepts `c` comment lines, one `p edge <n> <m>` line and `m` lines
    `e <u> <v>` with 1-based nodes. Duplicate edges are dropped with a
    warning.
    """

    logger = logger_or_silent(logger)
    node_count: Optional[int] = None
    declared_edges = 0
    edge_lines = 0
    edges = set()

    for line_number, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()

        if not tokens or tokens[0] == 'c':
            continue

        if tokens[0] == 'p':
            if node_count is not None:
                raise GraphFormatError(f"line {line_number}: second problem line")

            if len(tokens) != 4 or tokens[1] != "edge":
                raise GraphFormatError(f"line {line_number}: expected 'p edge <n> <m>'")

            node_count, declared_edges = _ints_of(tokens[2:], line_number)

            if node_count < 1 or declared_edges < 0:
                raise GraphFormatError(f"line {line_number}: bad problem sizes")

        elif tokens[0] == 'e':
            if len(tokens) != 3:
                raise GraphFormatError(f"line {line_number}: expected 'e <u> <v>'")

            u, v = _ints_of(tokens[1:], line_number)

            if u == v:
                raise SelfLoopError(f"line {line_number}: self-loop on node {u}")

            if node_count is None:
                raise GraphFormatError(f"line {line_number}: edge before problem line")

            if not (1 <= u <= node_count and 1 <= v <= node_count):
                raise GraphFormatError(
                    f"line {line_number}: node outside 1..{node_count}"
                )

            edge_lines += 1
            edge = (min(u, v) - 1, max(u, v) - 1)

            if edge in edges:
                logger.warning(f"line {line_number}: duplicate edge {u} {v} dropped")

            edges.add(edge)

        else:
            raise GraphFormatError(f"line {line_number}: unknown line kind '{tokens[0]}'")

    if node_count is None:
        raise GraphFormatError("missing 'p edge' problem line")

    if edge_lines != declared_edges:
        raise GraphFormatError(
            f"problem line declares {declared_edges} edges, found {edge_lines}"
        )

    return Graph(node_count, frozenset(edges))


@pure
def serialize_graph(graph: Graph) -> str:
    """Function to write a graph in canonical DIMACS edge format."""

    return "".join((
        f"p edge {graph.n} {graph.m}\n",
        *(f"e {u + 1} {v + 1}\n" for u, v in graph.sorted_edges),
    ))


@pure
def is_valid_coloring(graph: Graph, coloring: Coloring) -> bool:
    if len(coloring) != graph.n:
        raise ColoringError(f"coloring of {len(coloring)} nodes for {graph.n} nodes")

    return all(coloring[u] != coloring[v] for u, v in graph.edges)


@pure
def find_3coloring(graph: Graph, *, cap: int = limits.oracle_node_cap) -> Optional[Coloring]:
    """
    Function to get the lexicographically first valid 3-coloring by
    backtracking in node order, or `None` when there is none.
    """

    if graph.n > cap:
        raise SizeCapError(f"coloring oracle is capped at {cap} nodes, got {graph.n}")

    earlier_neighbors = tuple(
        tuple(v for v in graph.neighbors_of(node) if v < node)
        for node in range(graph.n)
    )
    colors = [0] * graph.n
    node = 0
    next_color = [0] * graph.n

    while 0 <= node < graph.n:
        for candidate in range(next_color[node], 3):
            if all(colors[v] != candidate for v in earlier_neighbors[node]):
                colors[node] = candidate
                next_color[node] = candidate + 1
                node += 1
                break
        else:
            next_color[node] = 0
            node -= 1

    return Coloring(tuple(colors)) if node == graph.n else None


def exhaustive_3colorings(
    graph: Graph,
    *,
    cap: int = limits.exhaustive_scan_node_cap,
) -> Generator[Coloring, None, None]:
    """Function to scan all `3^n` colorings and yield the valid ones in order."""

    if graph.n > cap:
        raise SizeCapError(f"exhaustive scan is capped at {cap} nodes, got {graph.n}")

    for colors in product(range(3), repeat=graph.n):
        if all(colors[u] != colors[v] for u, v in graph.edges):
            yield Coloring(colors)


def complete(k: int) -> Graph:
    if k < 1:
        raise GraphParameterError(f"complete graph needs k >= 1, got {k}")

    return Graph(k, frozenset(combinations(range(k), 2)))


def cycle(k: int) -> Graph:
    if k < 3:
        raise GraphParameterError(f"cycle needs k >= 3, got {k}")

    return Graph(k, frozenset((i, (i + 1) % k) for i in range(k)))


def wheel(k: int) -> Graph:
    """Function to get the wheel of a `k`-cycle rim and a hub on node `k`."""

    rim = cycle(k)

    return Graph(k + 1, rim.edges | frozenset((i, k) for i in range(k)))


def petersen() -> Graph:
    outer = ((i, (i + 1) % 5) for i in range(5))
    spokes = ((i, i + 5) for i in range(5))
    inner = ((5 + i, 5 + (i + 2) % 5) for i in range(5))

    return Graph(10, frozenset((*outer, *spokes, *inner)))


@seeded
def gnp(n: int, p: float, seed: int) -> Graph:
    """
    Function to draw an Erdős–Rényi graph `G(n, p)`, each pair `u < v` in
    lexicographic order kept when its uniform draw falls below `p`.
    """

    if n < 1 or not 0 <= p <= 1:
        raise GraphParameterError(f"G(n, p) needs n >= 1 and p in [0, 1], got {n}, {p}")

    rng = np.random.default_rng(seed)
    pairs = tuple(combinations(range(n), 2))
    draws = rng.random(len(pairs))

    return Graph(n, frozenset(pair for pair, draw in zip(pairs, draws) if draw < p))


@pure
def complement(graph: Graph) -> Graph:
    return Graph(graph.n, frozenset(combinations(range(graph.n), 2)) - graph.edges)


def generate(description: str) -> Graph:
    """
    Function to build a canonical instance from a description such as
    `"complete 4"`, `"cycle 5"`, `"wheel 5"`, `"petersen"` or
    `"gnp 8 0.5 42"`.
    """

    kind, *arguments = description.split()

    try:
        match kind, arguments:
            case "complete", [k]:
                return complete(int(k))
            case "cycle", [k]:
                return cycle(int(k))
            case "wheel", [k]:
                return wheel(int(k))
            case "petersen", []:
                return petersen()
            case "gnp", [n, p, seed]:
                return gnp(int(n), float(p), int(seed))
    except ValueError as error:
        if isinstance(error, GraphParameterError):
            raise

        raise GraphParameterError(f"bad parameters in '{description}'") from None

    raise GraphParameterError(f"unknown graph description '{description}'")


@seeded
def random_corpus(
    count: int,
    *,
    colorable: bool,
    node_counts: Iterable[int] = range(4, 11),
    p: float = 0.5,
    seed: int = 0,
) -> Tuple[Graph, ...]:
    """
    Function to collect `count` random `G(n, p)` instances that the oracle
    classifies as 3-colorable (or not, with `colorable=False`).

    Cycles through `node_counts` and consecutive seeds, so equal arguments
    give the same corpus.
    """

    node_counts = tuple(node_counts)
    graphs = list()
    attempt = 0

    while len(graphs) < count:
        n = node_counts[attempt % len(node_counts)]
        graph = gnp(n, p, seed + attempt)
        attempt += 1

        if (find_3coloring(graph) is not None) == colorable and graph not in graphs:
            graphs.append(graph)

        if attempt > 1000 * count:
            raise GraphParameterError("corpus parameters rarely give the wanted class")

    return tuple(graphs)
