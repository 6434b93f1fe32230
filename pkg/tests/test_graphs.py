from pytest import mark, raises

from twinproof.errors import (
    GraphFormatError, SelfLoopError, ColoringError, SizeCapError, GraphParameterError
)
from twinproof.graphs import *
from twinproof.logging import Logger
from twinproof.testing import case_of
from tests.mocks import TRIANGLE_TEXT, K4_TEXT, PETERSEN_TEXT, triangle, k4, c5, w5


test_parsing = case_of(
    (lambda: parse_graph(TRIANGLE_TEXT), complete(3)),
    (lambda: parse_graph(K4_TEXT), complete(4)),
    (lambda: parse_graph(PETERSEN_TEXT), petersen()),
    (lambda: parse_graph("p edge 2 0\n"), Graph(2)),
)


@mark.parametrize(
    "text, error_type",
    [
        ("e 1 2\n", GraphFormatError),
        ("p edge 2 1\n", GraphFormatError),
        ("p edge 2 1\ne 1 3\n", GraphFormatError),
        ("p edge 2 1\ne 1 1\n", SelfLoopError),
        ("p edge 2 1\ne 1 x\n", GraphFormatError),
        ("p col 2 1\ne 1 2\n", GraphFormatError),
        ("p edge 2 0\np edge 2 0\n", GraphFormatError),
        ("q\n", GraphFormatError),
        (str(), GraphFormatError),
    ],
)
def test_parsing_errors(text: str, error_type: type):
    with raises(error_type):
        parse_graph(text)


def test_duplicate_edges_are_logged():
    logger = Logger()

    graph = parse_graph("p edge 2 2\ne 1 2\ne 2 1\n", logger=logger)

    assert graph.m == 1
    assert len(logger.logs) == 1
    assert logger.logs[0].startswith("warning")


@mark.parametrize("graph", [triangle, k4, c5, w5, petersen(), Graph(1)])
def test_serialization_is_canonical(graph: Graph):
    text = serialize_graph(graph)

    assert parse_graph(text) == graph
    assert serialize_graph(parse_graph(text)) == text


def test_graph_validation():
    with raises(SelfLoopError):
        Graph(2, frozenset({(1, 1)}))

    with raises(GraphFormatError):
        Graph(2, frozenset({(0, 2)}))

    with raises(GraphParameterError):
        Graph(0)

    assert Graph(3, frozenset({(2, 0)})).edges == frozenset({(0, 2)})


test_graph_queries = case_of(
    (lambda: triangle.m, 3),
    (lambda: k4.neighbors_of(2), (0, 1, 3)),
    (lambda: c5.has_edge(4, 0), True),
    (lambda: c5.has_edge(0, 2), False),
    (lambda: w5.n, 6),
    (lambda: w5.m, 10),
    (lambda: petersen().m, 15),
    (lambda: complement(k4), Graph(4)),
)


test_oracle = case_of(
    (lambda: find_3coloring(triangle), Coloring((0, 1, 2))),
    (lambda: find_3coloring(k4), None),
    (lambda: find_3coloring(w5), None),
    (lambda: find_3coloring(Graph(3)), Coloring((0, 0, 0))),
    (lambda: is_valid_coloring(petersen(), find_3coloring(petersen())), True),
    (lambda: is_valid_coloring(c5, find_3coloring(c5)), True),
    (lambda: len(tuple(exhaustive_3colorings(triangle))), 6),
    (lambda: len(tuple(exhaustive_3colorings(k4))), 0),
    (lambda: len(tuple(exhaustive_3colorings(c5))), 30),
)


@mark.parametrize("graph", [triangle, k4, c5, w5, Graph(4, frozenset({(0, 1), (2, 3)}))])
def test_oracle_agrees_with_exhaustive_scan(graph: Graph):
    colorings = tuple(exhaustive_3colorings(graph))
    found = find_3coloring(graph)

    assert (found is None) == (len(colorings) == 0)

    if found is not None:
        assert found == colorings[0]


def test_coloring_errors():
    with raises(ColoringError):
        Coloring((0, 3))

    with raises(ColoringError):
        is_valid_coloring(triangle, Coloring((0, 1)))


def test_caps():
    with raises(SizeCapError):
        find_3coloring(Graph(31))

    with raises(SizeCapError):
        tuple(exhaustive_3colorings(Graph(9)))


test_generation = case_of(
    (lambda: generate("complete 4"), k4),
    (lambda: generate("cycle 5"), c5),
    (lambda: generate("wheel 5"), w5),
    (lambda: generate("petersen"), petersen()),
    (lambda: generate("gnp 6 0.5 3"), gnp(6, 0.5, 3)),
    (lambda: gnp(5, 1, 0), complete(5)),
    (lambda: gnp(5, 0, 0), Graph(5)),
)


@mark.parametrize("description", ["complete", "cycle 2", "torus 3", "gnp 4 2 0", "complete x"])
def test_generation_errors(description: str):
    with raises(GraphParameterError):
        generate(description)


@mark.parametrize("colorable", [True, False])
def test_random_corpus(colorable: bool):
    corpus = random_corpus(4, colorable=colorable, node_counts=range(5, 8), seed=1)

    assert len(corpus) == 4
    assert len(set(corpus)) == 4
    assert all((find_3coloring(graph) is not None) == colorable for graph in corpus)
    assert random_corpus(4, colorable=colorable, node_counts=range(5, 8), seed=1) == corpus
