import io

import numpy as np
import pytest

from npagraph import (AerModelSpec, BaTreeSpec, CompositeSpec, Graph,
                      IncrementDistribution, NpaModelSpec, RngStream,
                      WeightFunction, ZeroTotalWeight, grow_aer,
                      grow_aer_unpruned, grow_aer_with_stats, grow_ba_tree,
                      grow_composite, grow_npa, measure_arc_dd, measure_edd,
                      measure_vdd, read_edge_list, write_edge_list)
from npagraph.errors import EmptyGraph, NoEdges


def _components(graph: Graph) -> list[set[int]]:
    parent = list(range(graph.vertex_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in graph.pairs:
        ra, rb = find(int(a)), find(int(b))
        if ra != rb:
            parent[rb] = ra
    groups: dict[int, set[int]] = {}
    for v in range(graph.vertex_count):
        groups.setdefault(find(v), set()).add(v)
    return list(groups.values())


# ---------------------------------------------------------------------------
# Preferential-attachment growth
# ---------------------------------------------------------------------------

class TestGrowNpa:
    def test_reproducible_bit_identical(self):
        a = grow_ba_tree(500, RngStream(123, 4)).final_graph
        b = grow_ba_tree(500, RngStream(123, 4)).final_graph
        assert np.array_equal(a.pairs, b.pairs)

    def test_different_stream_differs(self):
        a = grow_ba_tree(500, RngStream(123, 0)).final_graph
        b = grow_ba_tree(123, RngStream(123, 1)).final_graph
        assert not np.array_equal(a.pairs[:100], b.pairs[:100])

    def test_tree_minimal(self):
        g = grow_ba_tree(2, RngStream(1)).final_graph
        assert g.vertex_count == 2
        assert g.edge_count == 1

    def test_tree_edge_count_and_acyclic(self):
        g = grow_ba_tree(1000, RngStream(5)).final_graph
        assert g.edge_count == g.vertex_count - 1
        comps = _components(g)
        assert len(comps) == 1  # connected with n - 1 edges: a tree

    def test_trace_conservation(self):
        model = NpaModelSpec(
            weights=WeightFunction.linear(g=1),
            increments=IncrementDistribution(min_arcs=1, probs=(0.5, 0.5)))
        trace = grow_npa(model, 2000, RngStream(9))
        g = trace.final_graph
        assert g.vertex_count == 2 + trace.steps  # two-vertex seed
        seed_edges = 1
        assert g.edge_count == seed_edges + trace.arc_count
        assert g.degrees().sum() == 2 * g.edge_count

    def test_no_self_loops(self):
        # Arc ends are drawn from the degrees before the increment, so a new
        # vertex can never receive its own arcs.
        model = NpaModelSpec(
            weights=WeightFunction.linear(g=1),
            increments=IncrementDistribution(min_arcs=1, probs=(0.2, 0.8)))
        g = grow_npa(model, 3000, RngStream(14)).final_graph
        assert (g.pairs[:, 0] != g.pairs[:, 1]).all()

    def test_degree_cap_respected(self):
        model = NpaModelSpec(
            weights=WeightFunction.linear(g=1, M=5),
            increments=IncrementDistribution(min_arcs=1, probs=(1.0,)))
        g = grow_npa(model, 3000, RngStream(17)).final_graph
        # Saturated vertices can be hit once at degree M but never beyond M+1.
        assert g.degrees().max() <= 6

    def test_ba_degree_distribution_close(self):
        g = grow_ba_tree(100000, RngStream(21)).final_graph
        vdd = measure_vdd(g)
        assert vdd.prob(1) == pytest.approx(2.0 / 3.0, abs=0.01)

    def test_zero_total_weight(self):
        # Arrivals with two arcs start saturated (degree 2 > M = 1), so the
        # pool of attachable degree-1 vertices only shrinks and runs dry.
        # Deliberately unvalidated: this exercises the dynamic growth error.
        model = NpaModelSpec(
            weights=WeightFunction.linear(g=1, M=1),
            increments=IncrementDistribution(min_arcs=2, probs=(1.0,)))
        with pytest.raises(ZeroTotalWeight):
            grow_npa(model, 50, RngStream(3))

    def test_n_below_seed_rejected(self):
        with pytest.raises(ValueError):
            grow_ba_tree(1, RngStream(0))


# ---------------------------------------------------------------------------
# Measurement
# ---------------------------------------------------------------------------

class TestMeasure:
    def test_triangle_vdd(self):
        tri = Graph(3, [(0, 1), (1, 2), (2, 0)])
        q = measure_vdd(tri)
        assert q.prob(2) == 1.0

    def test_path_vdd(self):
        path = Graph(3, [(0, 1), (1, 2)])
        q = measure_vdd(path)
        assert q.prob(1) == pytest.approx(2.0 / 3.0)
        assert q.prob(2) == pytest.approx(1.0 / 3.0)

    def test_star_vdd(self):
        star = Graph(5, [(0, i) for i in range(1, 5)])
        q = measure_vdd(star)
        assert q.prob(1) == pytest.approx(0.8)
        assert q.prob(4) == pytest.approx(0.2)

    def test_empty_graph_rejected(self):
        with pytest.raises(EmptyGraph):
            measure_vdd(Graph(0, []))

    def test_path_edd(self):
        path = Graph(3, [(0, 1), (1, 2)])
        theta = measure_edd(path, 5)
        assert theta.entries[0, 1] == pytest.approx(0.5)
        assert theta.entries[1, 0] == pytest.approx(0.5)
        assert theta.is_symmetric()

    def test_triangle_edd(self):
        tri = Graph(3, [(0, 1), (1, 2), (2, 0)])
        theta = measure_edd(tri, 4)
        assert theta.entries[1, 1] == pytest.approx(1.0)

    def test_regular_graph_edd(self):
        cycle = Graph(6, [(i, (i + 1) % 6) for i in range(6)])
        theta = measure_edd(cycle, 3)
        assert theta.entries[1, 1] == pytest.approx(1.0)

    def test_edd_truncation(self):
        star = Graph(5, [(0, i) for i in range(1, 5)])
        theta = measure_edd(star, 3)  # hub degree 4 exceeds the extent
        assert theta.stored_mass() == 0.0
        assert theta.truncation_mass == pytest.approx(1.0)

    def test_edd_mass_accounting(self):
        g = grow_ba_tree(2000, RngStream(2)).final_graph
        theta = measure_edd(g, 10)
        assert theta.stored_mass() + theta.truncation_mass == pytest.approx(
            1.0, abs=1e-12)

    def test_no_edges_rejected(self):
        with pytest.raises(NoEdges):
            measure_edd(Graph(3, []), 5)

    def test_arc_dd_directed(self):
        g = Graph(3, [(1, 0), (2, 0)], directed=True)
        arc = measure_arc_dd(g, 3)
        # Both arcs go from degree-1 tails into the degree-2 head.
        assert arc.entries[0, 1] == pytest.approx(1.0)
        assert arc.kind == "arc"


# ---------------------------------------------------------------------------
# Autocorrelated graphs
# ---------------------------------------------------------------------------

class TestGrowAer:
    def test_reproducible(self):
        spec = AerModelSpec(n1=2000, a=2.5)
        a = grow_aer(spec, RngStream(31))
        b = grow_aer(spec, RngStream(31))
        assert np.array_equal(a.pairs, b.pairs)

    def test_slot_accounting(self):
        spec = AerModelSpec(n1=100, a=2.0)
        _, stats = grow_aer_with_stats(spec, RngStream(1))
        assert stats.slot_count == 100 * 99 // 2
        assert stats.pair_count == stats.slot_count - 99

    def test_mean_degree_near_target(self):
        spec = AerModelSpec(n1=20000, a=2.75)
        degs = []
        for rep in range(3):
            _, stats = grow_aer_with_stats(spec, RngStream(77, rep))
            degs.append(stats.pre_prune_mean_degree)
        assert np.mean(degs) == pytest.approx(2.75, rel=0.03)

    def test_positive_autocorrelation(self):
        spec = AerModelSpec(n1=20000, a=2.75)
        _, stats = grow_aer_with_stats(spec, RngStream(78))
        assert stats.lag1_autocorrelation > 0.3
        assert stats.lag1_null_z > 10.0

    def test_pruning_removes_only_small_components(self):
        spec = AerModelSpec(n1=1500, a=2.2)
        full, _ = grow_aer_unpruned(spec, RngStream(41))
        pruned, stats = grow_aer_with_stats(spec, RngStream(41))
        sizes_before = sorted(len(c) for c in _components(full))
        sizes_after = sorted(len(c) for c in _components(pruned))
        assert all(s >= 3 for s in sizes_after)
        # Multiset of large components is untouched.
        assert [s for s in sizes_before if s >= 3] == sizes_after
        assert stats.removed_isolated == sum(1 for s in sizes_before if s == 1)
        assert stats.removed_pair_vertices == sum(
            s for s in sizes_before if s == 2)

    def test_no_self_loops_or_duplicates(self):
        spec = AerModelSpec(n1=3000, a=2.75)
        full, _ = grow_aer_unpruned(spec, RngStream(55))
        assert (full.pairs[:, 0] < full.pairs[:, 1]).all()
        packed = full.pairs[:, 0] * 3000 + full.pairs[:, 1]
        assert len(np.unique(packed)) == len(packed)

    def test_carry_convention_close_but_distinct_law(self):
        spec = AerModelSpec(n1=5000, a=2.75)
        _, a = grow_aer_with_stats(spec, RngStream(66))
        _, b = grow_aer_with_stats(spec, RngStream(66), carry_z_across_rows=True)
        assert b.pre_prune_mean_degree == pytest.approx(
            a.pre_prune_mean_degree, rel=0.25)

    def test_first_draw_uses_half_base_probability(self):
        # A two-vertex graph has exactly one slot, always a row start, so the
        # edge frequency across seeds estimates p_a / 2.
        spec = AerModelSpec(n1=2, a=0.8)  # p_a = 0.8, first draw at 0.4
        hits = sum(
            grow_aer_unpruned(spec, RngStream(900, rep))[0].edge_count
            for rep in range(4000))
        assert hits / 4000 == pytest.approx(0.4, abs=0.03)


# ---------------------------------------------------------------------------
# Composite growth
# ---------------------------------------------------------------------------

class TestGrowComposite:
    def _spec(self, total=4000):
        complement = NpaModelSpec(
            weights=WeightFunction.linear(g=1),
            increments=IncrementDistribution(min_arcs=1, probs=(0.5, 0.5)))
        return CompositeSpec(components=((BaTreeSpec(), 0.35),
                                         (complement, 0.65)),
                             total_n=total)

    def test_budgets_partition(self):
        spec = self._spec(100000)
        assert spec.budgets() == [35000, 65000]

    def test_disjoint_union_structure(self):
        spec = self._spec(4000)
        g = grow_composite(spec, RngStream(8))
        assert g.vertex_count == 4000
        comp_sizes = sorted(len(c) for c in _components(g))
        # Tree component is connected; complement is connected as well
        # (every increment attaches); expect exactly two components.
        assert len(comp_sizes) == 2
        assert comp_sizes == [1400, 2600]

    def test_edge_counts_sum(self):
        spec = self._spec(3000)
        g = grow_composite(spec, RngStream(9))
        tree = grow_npa(BaTreeSpec().to_npa(), 1050, RngStream(9).substream(0))
        comp = grow_npa(spec.components[1][0], 1950, RngStream(9).substream(1))
        assert g.edge_count == tree.final_graph.edge_count + comp.final_graph.edge_count

    def test_single_component_matches_direct_growth(self):
        model = NpaModelSpec(
            weights=WeightFunction.linear(g=1),
            increments=IncrementDistribution(min_arcs=1, probs=(1.0,)))
        spec = CompositeSpec(components=((model, 1.0),), total_n=500)
        g = grow_composite(spec, RngStream(10))
        direct = grow_npa(model, 500, RngStream(10).substream(0)).final_graph
        assert np.array_equal(g.pairs, direct.pairs)

    def test_bridge_edges(self):
        spec = self._spec(1000)
        g0 = grow_composite(spec, RngStream(11))
        g3 = grow_composite(spec, RngStream(11), bridge_edges=3)
        assert g3.edge_count == g0.edge_count + 3
        assert len(_components(g3)) == 1

    def test_aer_component_budget_override(self):
        spec = CompositeSpec(
            components=((AerModelSpec(n1=999, a=2.0), 0.5),
                        (BaTreeSpec(), 0.5)),
            total_n=1000)
        g = grow_composite(spec, RngStream(12))
        # AER pruning removes vertices, so the union is smaller than total_n.
        assert g.vertex_count <= 1000


# ---------------------------------------------------------------------------
# Edge-list interchange
# ---------------------------------------------------------------------------

class TestEdgeListIo:
    def test_round_trip_exact(self):
        g = grow_ba_tree(200, RngStream(3)).final_graph
        buf = io.StringIO()
        write_edge_list(g, buf)
        back = read_edge_list(io.StringIO(buf.getvalue()))
        assert back.vertex_count == g.vertex_count
        assert back.directed == g.directed
        assert np.array_equal(back.pairs, g.pairs)

    def test_isolated_vertices_preserved(self):
        g = Graph(10, [(0, 1)])
        buf = io.StringIO()
        write_edge_list(g, buf)
        back = read_edge_list(io.StringIO(buf.getvalue()))
        assert back.vertex_count == 10

    def test_malformed_line(self):
        from npagraph import MalformedLine
        with pytest.raises(MalformedLine) as err:
            read_edge_list(io.StringIO("0 1\n0 x y\n"))
        assert err.value.line_no == 2
