from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given

from conftest import PROPERTY_SETTINGS, bipartite_graphs
from errors import GraphFormatError
from graph_io import checksum, format_graph, parse_graph, read_graph, read_json, write_graph, write_json
from graphs import DenseBipartiteGraph


@PROPERTY_SETTINGS
@given(bipartite_graphs())
def test_formatting_is_stable_through_a_parse(G):
    text = format_graph(G, manifest_ref="g.manifest.json")
    parsed, ref = parse_graph(text)
    assert ref == "g.manifest.json"
    assert parsed.same_edges(G)
    assert format_graph(parsed, ref) == text


def test_files_are_byte_identical_after_a_round_trip(tmp_path, lps_5_13):
    first = tmp_path / "a.txt"
    second = tmp_path / "b.txt"
    digest = write_graph(lps_5_13, str(first), manifest_ref="a.manifest.json")
    G, ref = read_graph(str(first))
    assert G.name == "a"
    assert checksum(G) == digest
    write_graph(G, str(second), manifest_ref=ref)
    assert first.read_bytes() == second.read_bytes()


def test_parallel_edges_survive():
    G = DenseBipartiteGraph(2, 1, [(1, 0), (0, 0), (1, 0)])
    parsed, _ = parse_graph(format_graph(G))
    assert parsed.n_edges == 3
    assert parsed.edges.tolist() == [[0, 0], [1, 0], [1, 0]]


def test_checksum_ignores_manifest_line_and_comments():
    G = DenseBipartiteGraph(2, 2, [(0, 0), (1, 1)])
    text = "# produced by hand\nBIPARTITE 2 2 2\n0 0\n\n1 1\n# manifest x.json\n"
    parsed, ref = parse_graph(text)
    assert ref == "x.json"
    assert checksum(parsed) == checksum(G)
    assert checksum(G) != checksum(DenseBipartiteGraph(2, 2, [(0, 1), (1, 1)]))


@pytest.mark.parametrize("text", [
    "",
    "GRAPH 2 2 1\n0 0\n",
    "BIPARTITE 2 2\n0 0\n",
    "BIPARTITE 2 2 x\n0 0\n",
    "BIPARTITE 2 2 2\n0 0\n",
    "BIPARTITE 2 2 1\n0 2\n",
    "BIPARTITE 2 2 1\n-1 0\n",
    "BIPARTITE 2 2 1\n0 a\n",
    "BIPARTITE 2 2 1\n0 0 1\n",
])
def test_malformed_files_are_rejected(text):
    with pytest.raises(GraphFormatError):
        parse_graph(text)


def test_missing_file(tmp_path):
    with pytest.raises(GraphFormatError):
        read_graph(str(tmp_path / "absent.txt"))


def test_json_accepts_numpy_values(tmp_path):
    path = tmp_path / "nested" / "r.json"
    write_json(str(path), {"n": np.int64(3), "x": np.float64(0.5), "v": np.arange(3)})
    assert read_json(str(path)) == {"n": 3, "x": 0.5, "v": [0, 1, 2]}
