import gzip
import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from npagraph import (EmptyInput, Graph, InsufficientTail, MalformedLine,
                      empirical_edd, empirical_vdd, load_edge_list,
                      parse_edge_list, smooth_vdd, summarize, write_edge_list)
from npagraph.models import DegreeDistribution


class TestParseEdgeList:
    def test_comments_skipped(self):
        g = parse_edge_list(["# comment", "0 1", "1 2"])
        assert g.vertex_count == 3
        assert g.edge_count == 2

    def test_duplicates_and_reversals_collapse(self):
        g, stats = parse_edge_list(["0 1", "1 0", "0 1"], return_stats=True)
        assert g.vertex_count == 2
        assert g.edge_count == 1
        assert stats.duplicates_collapsed == 2

    def test_self_loops_dropped_counted(self):
        g, stats = parse_edge_list(["0 0", "0 1"], return_stats=True)
        assert g.edge_count == 1
        assert stats.self_loops_dropped == 1

    def test_malformed_line_number(self):
        with pytest.raises(MalformedLine) as err:
            parse_edge_list(["0 1", "zero one", "2 3"])
        assert err.value.line_no == 2

    def test_three_tokens_malformed(self):
        with pytest.raises(MalformedLine):
            parse_edge_list(["0 1 7"])

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            parse_edge_list(["# nothing here"])

    def test_sparse_ids_remapped_with_labels(self):
        g = parse_edge_list(["100 5", "5 9"])
        assert g.vertex_count == 3
        assert list(g.labels) == [5, 9, 100]
        # Edge endpoints refer to dense ids consistent with the labels.
        back = {(g.labels[a], g.labels[b]) for a, b in g.pairs}
        assert back == {(5, 100), (5, 9)}

    def test_gzip_file(self, tmp_path):
        path = tmp_path / "net.txt.gz"
        with gzip.open(path, "wt") as fh:
            fh.write("# demo\n0 1\n1 2\n")
        g = load_edge_list(path)
        assert g.edge_count == 2

    @given(st.lists(st.tuples(st.integers(0, 30), st.integers(0, 30)),
                    min_size=1, max_size=60))
    @settings(max_examples=50, deadline=None)
    def test_parse_export_parse_degree_multiset(self, raw_pairs):
        lines = [f"{a} {b}" for a, b in raw_pairs]
        try:
            g1 = parse_edge_list(lines)
        except EmptyInput:
            return  # all self-loops
        buf = io.StringIO()
        write_edge_list(g1, buf)
        g2 = parse_edge_list(buf.getvalue().splitlines())
        assert sorted(g1.degrees()[g1.degrees() > 0]) == sorted(
            g2.degrees()[g2.degrees() > 0])


class TestSummarize:
    def test_triangle(self):
        s = summarize(Graph(3, [(0, 1), (1, 2), (2, 0)]))
        assert s.mean_degree == pytest.approx(2.0)
        assert s.derived_m == pytest.approx(1.0)

    def test_single_edge(self):
        s = summarize(Graph(2, [(0, 1)]))
        assert s.mean_degree == pytest.approx(1.0)

    def test_consistent_with_vdd_mean(self):
        g = parse_edge_list(["0 1", "1 2", "2 3", "3 0", "0 2"])
        s = summarize(g)
        assert s.mean_degree == pytest.approx(empirical_vdd(g).mean(), abs=1e-12)

    def test_edd_mass_complete(self):
        g = parse_edge_list(["0 1", "1 2", "2 3", "0 2"])
        theta = empirical_edd(g, 2)
        assert theta.stored_mass() + theta.truncation_mass == pytest.approx(
            1.0, abs=1e-12)


class TestSmoothVdd:
    def _power_law(self, beta=2.5, kmax=200):
        ks = np.arange(1, kmax + 1, dtype=float)
        p = ks ** -beta
        p /= p.sum()
        return DegreeDistribution(min_degree=1, probs=p)

    def test_none_is_identity(self):
        q = self._power_law()
        assert smooth_vdd(q, "none") is q

    def test_tail_powerlaw_self_consistency(self):
        q = self._power_law()
        out = smooth_vdd(q, "tail-powerlaw", cut=10)
        assert np.abs(out.probs - q.probs).max() < 1e-6

    def test_tail_powerlaw_fills_gaps(self):
        q = self._power_law()
        probs = np.array(q.probs)
        probs[50] = 0.0  # a noisy empirical zero inside the tail
        noisy = DegreeDistribution(1, probs / probs.sum())
        out = smooth_vdd(noisy, "tail-powerlaw", cut=10)
        assert out.prob(51) > 0.0

    def test_mass_preserved(self):
        q = self._power_law()
        for method, kw in (("log-bin", {}), ("tail-powerlaw", {"cut": 10})):
            out = smooth_vdd(q, method, **kw)
            assert out.stored_mass() == pytest.approx(q.stored_mass(), abs=1e-9)

    def test_log_bin_levels(self):
        q = DegreeDistribution(1, np.array([0.4, 0.3, 0.2, 0.1]))
        out = smooth_vdd(q, "log-bin", base=2.0)
        # Bins at base 2 from degree 1: {1}, {2, 3}, {4}.
        assert out.prob(1) == pytest.approx(0.4)
        assert out.prob(2) == pytest.approx(0.25)
        assert out.prob(3) == pytest.approx(0.25)
        assert out.prob(4) == pytest.approx(0.1)

    def test_insufficient_tail(self):
        q = DegreeDistribution(1, np.array([0.7, 0.1, 0.1, 0.05, 0.05]))
        with pytest.raises(InsufficientTail):
            smooth_vdd(q, "tail-powerlaw", cut=3)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            smooth_vdd(self._power_law(), "boxcar")
