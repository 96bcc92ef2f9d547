"""File formats: graph parser, problem documents, CSV writers."""

import io
import json

import numpy as np
import pytest

from oscim.errors import GraphFormatError
from oscim.formats import (
    document_bytes,
    format_graph_file,
    ising_to_document,
    parse_graph_file,
    problem_from_document,
    qubo_to_document,
    write_sweep_csv,
    write_trace_csv,
)
from oscim.harness import SweepPoint
from oscim.problems import IsingProblem, Qubo, energy, qubo_value


class TestParseGraphFile:
    def test_single_edge(self):
        g = parse_graph_file("n 2\n1 2 1.0\n")
        assert g.n == 2
        assert g.edges == ((1, 2, 1.0),)

    def test_triangle_with_comments(self):
        text = "# a triangle\nn 3\n1 2 1\n2 3 1\n\n# last edge\n1 3 1\n"
        g = parse_graph_file(text)
        assert g.n == 3
        assert len(g.edges) == 3

    def test_self_loop_rejected_with_line(self):
        with pytest.raises(GraphFormatError, match="line 2.*self-loop"):
            parse_graph_file("n 2\n1 1 1.0\n")

    def test_duplicate_edge_rejected(self):
        with pytest.raises(GraphFormatError, match="duplicate"):
            parse_graph_file("n 2\n1 2 1.0\n2 1 2.0\n")

    def test_vertex_out_of_range(self):
        with pytest.raises(GraphFormatError, match="outside"):
            parse_graph_file("n 2\n1 3 1.0\n")

    def test_malformed_line_number(self):
        with pytest.raises(GraphFormatError, match="line 3"):
            parse_graph_file("# c\nn 2\n1 2\n")

    def test_missing_header(self):
        with pytest.raises(GraphFormatError, match="header"):
            parse_graph_file("1 2 1.0\n")

    def test_round_trip(self):
        g = parse_graph_file("n 3\n1 2 0.25\n2 3 1.5\n")
        assert parse_graph_file(format_graph_file(g)) == g


class TestProblemDocuments:
    def test_ising_round_trip(self):
        p = IsingProblem(n=2, J=[[0.0, -1.0], [-1.0, 0.0]], h=[0.5, -0.5], offset=0.25)
        doc = json.loads(document_bytes(ising_to_document(p)))
        p2 = problem_from_document(doc)
        for s in ([1, 1], [1, -1], [-1, 1], [-1, -1]):
            assert energy(p2, s) == energy(p, s)

    def test_qubo_round_trip(self):
        q = Qubo(n=2, Q=[[1.0, -0.5], [0.0, 2.0]], offset=0.1)
        doc = json.loads(document_bytes(qubo_to_document(q)))
        q2 = problem_from_document(doc)
        for x in ([0, 0], [0, 1], [1, 0], [1, 1]):
            assert qubo_value(q2, x) == qubo_value(q, x)

    def test_kind_detection_without_tag(self):
        doc = {"n": 1, "Q": [[1.0]], "offset": 0.0}
        assert isinstance(problem_from_document(doc), Qubo)
        doc = {"n": 1, "J": [[0.0]], "h": [0.5], "offset": 0.0}
        assert isinstance(problem_from_document(doc), IsingProblem)

    def test_malformed_document(self):
        with pytest.raises(GraphFormatError):
            problem_from_document({"n": 2})
        with pytest.raises(GraphFormatError):
            problem_from_document({"n": 2, "Q": [[1.0]]})  # shape mismatch


class TestCsvWriters:
    def test_trace_header_and_rows(self):
        buf = io.StringIO()
        times = np.array([0.0, 0.5, 1.0])
        values = np.array([[0.1, 0.2], [0.3, 0.4], [0.5, 0.6]])
        write_trace_csv(buf, times, values, [0, 1, 1])
        lines = buf.getvalue().strip().split("\n")
        assert lines[0] == "t_periods,osc1,osc2,sync"
        assert lines[1].startswith("0.0,0.1,0.2,0")
        assert len(lines) == 4

    def test_sweep_rows(self):
        buf = io.StringIO()
        rows = [
            SweepPoint(scale=0.1, success_rate=0.9, mean_lock_period=4.5,
                       locked_fraction=1.0, unresolved_rate=0.0),
            SweepPoint(scale=0.2, success_rate=1.0, mean_lock_period=None,
                       locked_fraction=0.0, unresolved_rate=1.0),
        ]
        write_sweep_csv(buf, rows)
        lines = buf.getvalue().strip().split("\n")
        assert lines[0] == "scale,success_rate,mean_lock_period"
        assert lines[1] == "0.1,0.9,4.5"
        assert lines[2] == "0.2,1.0,"
