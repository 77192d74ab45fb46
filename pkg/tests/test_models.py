import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from npagraph import (AerModelSpec, BaTreeSpec, CompositeSpec, DegreeDistribution,
                      EdgeDegreeMatrix, Graph, IncrementDistribution, NpaModelSpec,
                      SeedGraphSpec, ValidationError, WeightFunction, dump_model,
                      load_model, mean_increment, validate_model)

GOWALLA_M = 7.376292489902686  # frozen: mean of the normalized preset table


# ---------------------------------------------------------------------------
# WeightFunction
# ---------------------------------------------------------------------------

class TestWeightFunction:
    def test_linear_support(self):
        w = WeightFunction.linear(g=1)
        assert w.weight(0) == 0.0
        assert w.weight(1) == 1.0
        assert w.weight(7) == 7.0

    def test_finite_m_zero_outside(self):
        w = WeightFunction.linear(g=2, M=5)
        assert w.weight(1) == 0.0
        assert w.weight(2) == 2.0
        assert w.weight(5) == 5.0
        assert w.weight(6) == 0.0

    def test_power_and_constant(self):
        assert WeightFunction.power(0.8).weight(4) == pytest.approx(4 ** 0.8)
        assert WeightFunction.constant(3.5).weight(9) == 3.5

    def test_table_overrides_then_rule(self):
        w = WeightFunction.from_table(g=1, values=[10.0, 20.0], rule="linear")
        assert w.weight(1) == 10.0
        assert w.weight(2) == 20.0
        assert w.weight(3) == 3.0  # beyond the table the rule applies

    def test_weights_upto_matches_scalar(self):
        w = WeightFunction.from_table(g=2, values=[5.0], M=10, rule="power",
                                      alpha=1.2)
        arr = w.weights_upto(12)
        for k in range(13):
            assert arr[k] == pytest.approx(w.weight(k))

    def test_zero_inside_support_is_violation(self):
        w = WeightFunction.from_table(g=1, values=[1.0, 2.0, 0.0], M=10,
                                      rule="linear")
        codes = [v.code for v in w.violations()]
        assert "WeightSignViolation" in codes

    def test_pure_table_needs_finite_m(self):
        w = WeightFunction(g=1, M=None, rule=None, table=(1.0, 2.0))
        assert any(v.code == "EmptySupport" for v in w.violations())

    def test_asymptote(self):
        assert WeightFunction.linear().asymptote() == ("linear", 1.0)
        assert WeightFunction.power(1.0).asymptote() == ("linear", 1.0)
        assert WeightFunction.power(0.8).asymptote() == ("power", 0.8)
        assert WeightFunction.constant(2.0).asymptote() == ("constant", 2.0)
        assert WeightFunction.linear(M=50).asymptote() == ("finite", 50)


# ---------------------------------------------------------------------------
# IncrementDistribution
# ---------------------------------------------------------------------------

class TestIncrementDistribution:
    def test_point_mass_mean(self):
        d = IncrementDistribution(min_arcs=1, probs=(1.0,))
        assert mean_increment(d) == 1.0

    def test_two_point_mean(self):
        d = IncrementDistribution(min_arcs=1, probs=(0.5, 0.5))
        assert mean_increment(d) == 1.5

    def test_gowalla_table_mean_frozen(self):
        from npagraph import gowalla_increments
        inc, _raw = gowalla_increments()
        assert mean_increment(inc) == pytest.approx(GOWALLA_M, abs=1e-12)

    def test_non_normalized(self):
        d = IncrementDistribution(min_arcs=1, probs=(0.5, 0.4))
        assert any(v.code == "NonNormalized" for v in d.violations())

    def test_prob_outside_support(self):
        d = IncrementDistribution(min_arcs=2, probs=(1.0,))
        assert d.prob(1) == 0.0
        assert d.prob(2) == 1.0
        assert d.prob(3) == 0.0

    @given(st.lists(st.floats(min_value=1e-6, max_value=1.0), min_size=1,
                    max_size=12),
           st.integers(min_value=0, max_value=4))
    def test_serialization_keeps_mean_bitwise(self, raw, g):
        total = math.fsum(raw)
        probs = tuple(x / total for x in raw)
        d = IncrementDistribution(min_arcs=g, probs=probs)
        back = IncrementDistribution.from_dict(json.loads(json.dumps(d.to_dict())))
        assert mean_increment(back) == mean_increment(d)


# ---------------------------------------------------------------------------
# validate_model
# ---------------------------------------------------------------------------

class TestValidateModel:
    def test_ba_tree_valid_and_idempotent(self):
        spec = BaTreeSpec().to_npa()
        assert validate_model(spec) is spec
        assert validate_model(validate_model(spec)) is spec

    def test_reports_all_violations(self):
        spec = NpaModelSpec(
            weights=WeightFunction.from_table(g=1, values=[1.0, 0.0], M=5,
                                              rule="linear"),
            increments=IncrementDistribution(min_arcs=1, probs=(0.5, 0.4)))
        with pytest.raises(ValidationError) as err:
            validate_model(spec)
        assert "NonNormalized" in err.value.codes()
        assert "WeightSignViolation" in err.value.codes()

    def test_support_mismatch(self):
        spec = NpaModelSpec(weights=WeightFunction.linear(g=1),
                            increments=IncrementDistribution(min_arcs=2,
                                                             probs=(1.0,)))
        with pytest.raises(ValidationError) as err:
            validate_model(spec)
        assert "SupportMismatch" in err.value.codes()

    def test_seed_weight_zero(self):
        spec = NpaModelSpec(
            weights=WeightFunction.linear(g=1),
            increments=IncrementDistribution(min_arcs=1, probs=(1.0,)),
            seed_graph=SeedGraphSpec(name=None, vertices=2, edges=()))
        with pytest.raises(ValidationError) as err:
            validate_model(spec)
        assert "SeedWeightZero" in err.value.codes()

    def test_degenerate_empty_seed(self):
        spec = NpaModelSpec(
            weights=WeightFunction.linear(g=1),
            increments=IncrementDistribution(min_arcs=1, probs=(1.0,)),
            seed_graph=SeedGraphSpec(name=None, vertices=None, edges=()))
        with pytest.raises(ValidationError) as err:
            validate_model(spec)
        assert "SeedWeightZero" in err.value.codes()

    def test_aer_spec(self):
        spec = AerModelSpec(n1=35000, a=2.75)
        assert validate_model(spec) is spec
        assert spec.p_a == pytest.approx(2.75 / 34999)
        with pytest.raises(ValidationError):
            validate_model(AerModelSpec(n1=3, a=10.0))  # p_a > 1

    def test_composite_fraction_sum(self):
        ba = BaTreeSpec()
        bad = CompositeSpec(components=((ba, 0.5), (ba, 0.4)), total_n=1000)
        with pytest.raises(ValidationError) as err:
            validate_model(bad)
        assert "NonNormalized" in err.value.codes()

    def test_composite_small_budget(self):
        ba = BaTreeSpec()
        tiny = CompositeSpec(components=((ba, 0.999), (ba, 0.001)), total_n=100)
        with pytest.raises(ValidationError):
            validate_model(tiny)

    def test_composite_budgets(self):
        spec = CompositeSpec(components=((BaTreeSpec(), 0.35),
                                         (BaTreeSpec(), 0.65)),
                             total_n=100000)
        assert spec.budgets() == [35000, 65000]


# ---------------------------------------------------------------------------
# Distributions and matrices
# ---------------------------------------------------------------------------

class TestDegreeDistribution:
    def test_mass_accounting(self):
        q = DegreeDistribution(min_degree=1, probs=np.array([0.5, 0.3]),
                               truncation_mass=0.2)
        assert not q.violations()
        assert q.mean() == pytest.approx(0.5 + 0.6)

    def test_negative_truncation_flagged(self):
        q = DegreeDistribution(min_degree=1, probs=np.array([0.6, 0.6]),
                               truncation_mass=-0.2)
        assert q.violations()

    def test_tv_distance(self):
        a = DegreeDistribution(1, np.array([1.0, 0.0]))
        b = DegreeDistribution(1, np.array([0.0, 1.0]))
        assert a.tv_distance(b) == 1.0
        assert a.tv_distance(a) == 0.0

    def test_tv_distance_align_offsets(self):
        a = DegreeDistribution(1, np.array([0.5, 0.5]))
        b = DegreeDistribution(2, np.array([0.5, 0.5]))
        assert a.tv_distance(b) == 0.5

    def test_probs_read_only(self):
        q = DegreeDistribution(1, np.array([1.0]))
        with pytest.raises(ValueError):
            q.probs[0] = 2.0


class TestEdgeDegreeMatrix:
    def test_window(self):
        m = EdgeDegreeMatrix(min_degree=1, entries=np.eye(4) / 4.0, kind="edge")
        w = m.window(2, 3)
        assert w.shape == (2, 2)
        assert w[0, 0] == 0.25

    def test_window_out_of_range(self):
        from npagraph import WindowExceedsMatrix
        m = EdgeDegreeMatrix(min_degree=2, entries=np.eye(3) / 3.0, kind="edge")
        with pytest.raises(WindowExceedsMatrix):
            m.window(1, 3)

    def test_asymmetric_edge_matrix_flagged(self):
        e = np.array([[0.5, 0.5], [0.0, 0.0]])
        m = EdgeDegreeMatrix(min_degree=1, entries=e, kind="edge")
        assert m.violations()
        assert not EdgeDegreeMatrix(min_degree=1, entries=e, kind="arc").violations()


# ---------------------------------------------------------------------------
# Graph
# ---------------------------------------------------------------------------

class TestGraph:
    def test_degrees_and_adjacency(self):
        g = Graph(3, [(0, 1), (1, 2)])
        assert list(g.degrees()) == [1, 2, 1]
        assert g.adjacency[1] == [0, 2]
        assert g.edge_count == 2

    def test_degree_sum_is_twice_edges(self):
        g = Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
        assert g.degrees().sum() == 2 * g.edge_count

    def test_disjoint_union(self):
        a = Graph(2, [(0, 1)])
        b = Graph(3, [(0, 1), (1, 2)])
        u = Graph.disjoint_union([a, b])
        assert u.vertex_count == 5
        assert u.edge_count == 3
        assert (u.pairs[1:] >= 2).all()

    def test_induced(self):
        g = Graph(4, [(0, 1), (1, 2), (2, 3)])
        sub = g.induced(np.array([True, True, True, False]))
        assert sub.vertex_count == 3
        assert sub.edge_count == 2

    def test_collapse_parallel(self):
        g = Graph(2, [(0, 1), (1, 0), (0, 1)], directed=True)
        und = g.to_undirected(collapse_parallel=True)
        assert und.edge_count == 1


# ---------------------------------------------------------------------------
# Spec serialization
# ---------------------------------------------------------------------------

class TestSerialization:
    def test_npa_round_trip(self):
        spec = NpaModelSpec(
            weights=WeightFunction.power(0.8, g=1, M=100),
            increments=IncrementDistribution(min_arcs=1, probs=(0.6, 0.4)))
        back = load_model(dump_model(spec))
        assert back == spec

    def test_composite_round_trip(self):
        spec = CompositeSpec(
            components=((BaTreeSpec(), 0.225),
                        (NpaModelSpec(weights=WeightFunction.linear(),
                                      increments=IncrementDistribution(
                                          min_arcs=1, probs=(1.0,))), 0.775)),
            total_n=50000, metadata={"name": "demo"})
        back = load_model(dump_model(spec))
        assert back == spec

    def test_aer_round_trip(self):
        spec = AerModelSpec(n1=35000, a=2.75)
        assert load_model(dump_model(spec)) == spec

    def test_unknown_type_rejected(self):
        with pytest.raises(ValidationError):
            load_model('{"type": "mystery"}')
