"""Monte-Carlo growth of attachment graphs and measurement of grown graphs.

A single growth run is strictly sequential; replications are independent given
distinct RngStream ids and can be fanned out by the caller. Identical spec and
stream reproduce a bit-identical graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, TextIO

import numpy as np

from .errors import EmptyGraph, MalformedLine, NoEdges, ZeroTotalWeight
from .models import (AerModelSpec, BaTreeSpec, CompositeSpec, DegreeDistribution,
                     EdgeDegreeMatrix, Graph, NpaModelSpec)


@dataclass(frozen=True)
class RngStream:
    """Reproducible random source: (seed, stream_id) fixes the whole sequence."""

    seed: int
    stream_id: int = 0
    subpath: tuple[int, ...] = ()

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.seed,
                                     spawn_key=(self.stream_id, *self.subpath))
        return np.random.Generator(np.random.PCG64(seq))

    def substream(self, index: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id, self.subpath + (index,))


@dataclass(frozen=True)
class GrowthTrace:
    """Result of one growth run: the graph, increments applied, arcs added."""

    final_graph: Graph
    steps: int
    arc_count: int


# ---------------------------------------------------------------------------
# Degree-bucketed weighted sampling
# ---------------------------------------------------------------------------

class _DegreeBuckets:
    """Vertices grouped by degree for weight-proportional sampling.

    A bucket's weight is count * f_degree; a draw picks a bucket proportional
    to bucket weight, then a uniform member. Degree updates move one vertex
    between buckets in O(1); a draw costs one cumulative sum over the distinct
    degree range.
    """

    def __init__(self, weights, capacity_hint: int = 64):
        self._wf = weights
        self._cap = max(capacity_hint, 8)
        self._f = weights.weights_upto(self._cap)
        self.bucket_weight = np.zeros(self._cap + 1, dtype=np.float64)
        self.members: list[list[int]] = [[] for _ in range(self._cap + 1)]
        self.degree: list[int] = []
        self.slot: list[int] = []
        self.max_degree = 0

    def _ensure(self, d: int) -> None:
        if d <= self._cap:
            return
        new_cap = max(d, self._cap * 2)
        self._f = self._wf.weights_upto(new_cap)
        bw = np.zeros(new_cap + 1, dtype=np.float64)
        bw[:len(self.bucket_weight)] = self.bucket_weight
        self.bucket_weight = bw
        self.members.extend([] for _ in range(new_cap + 1 - len(self.members)))
        self._cap = new_cap

    def add_vertex(self, degree: int) -> int:
        self._ensure(degree)
        v = len(self.degree)
        self.degree.append(degree)
        bucket = self.members[degree]
        self.slot.append(len(bucket))
        bucket.append(v)
        self.bucket_weight[degree] += self._f[degree]
        if degree > self.max_degree:
            self.max_degree = degree
        return v

    def promote(self, v: int) -> None:
        d = self.degree[v]
        self._ensure(d + 1)
        bucket = self.members[d]
        s = self.slot[v]
        last = bucket[-1]
        bucket[s] = last
        self.slot[last] = s
        bucket.pop()
        nxt = self.members[d + 1]
        self.slot[v] = len(nxt)
        nxt.append(v)
        self.degree[v] = d + 1
        self.bucket_weight[d] -= self._f[d]
        self.bucket_weight[d + 1] += self._f[d + 1]
        if d + 1 > self.max_degree:
            self.max_degree = d + 1

    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.bucket_weight[:self.max_degree + 1])

    def sample(self, gen: np.random.Generator, cum: np.ndarray) -> int:
        total = cum[-1]
        d = int(np.searchsorted(cum, gen.random() * total, side="right"))
        # searchsorted cannot land on a zero-weight bucket except through the
        # float edge where the draw rounds up to the total; walk down to the
        # nearest weighted bucket then.
        if d >= len(cum):
            d = len(cum) - 1
        while d > 0 and (not self.members[d] or self.bucket_weight[d] <= 0.0):
            d -= 1
        bucket = self.members[d]
        return bucket[int(gen.integers(len(bucket)))]


# ---------------------------------------------------------------------------
# Preferential-attachment growth
# ---------------------------------------------------------------------------

def grow_npa(spec: NpaModelSpec, n: int, rng: RngStream) -> GrowthTrace:
    """Grow a graph to n vertices by repeated increments.

    Each increment adds one vertex with x ~ {r_k} outgoing arcs; every arc end
    picks an existing vertex with probability proportional to its degree
    weight, all x ends sampled with replacement against the degrees as they
    were before the increment. Duplicate targets yield parallel arcs.
    """
    gen = rng.generator()
    seed = spec.seed_graph.build(spec.weights.g)
    if n < seed.vertex_count:
        raise ValueError(f"n = {n} is below the seed size {seed.vertex_count}")
    buckets = _DegreeBuckets(spec.weights, capacity_hint=64)
    for d in seed.degrees():
        buckets.add_vertex(int(d))
    edges: list[tuple[int, int]] = [(int(a), int(b)) for a, b in seed.pairs]

    r_cum = np.cumsum(spec.increments.prob_array())
    r_min = spec.increments.min_arcs
    arc_count = 0
    steps = n - seed.vertex_count
    for _ in range(steps):
        x = r_min + int(np.searchsorted(r_cum, gen.random(), side="right"))
        if x > 0:
            cum = buckets.cumulative()
            if not cum[-1] > 0.0:
                raise ZeroTotalWeight(
                    "every existing vertex is outside the positive-weight degree "
                    "range; no attachment target available")
            targets = [buckets.sample(gen, cum) for _ in range(x)]
        else:
            targets = []
        new_v = buckets.add_vertex(x)
        for t in targets:
            edges.append((new_v, t))
            buckets.promote(t)
        arc_count += x
    graph = Graph(len(buckets.degree), edges, directed=True)
    return GrowthTrace(final_graph=graph, steps=steps, arc_count=arc_count)


def grow_ba_tree(n: int, rng: RngStream) -> GrowthTrace:
    """Grow the fixed single-arc linear-weight tree model to n vertices."""
    return grow_npa(BaTreeSpec().to_npa(), n, rng)


# ---------------------------------------------------------------------------
# Autocorrelated random graph
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AerRunStats:
    """Diagnostics from one autocorrelated-graph construction."""

    pre_prune_edge_count: int
    pre_prune_mean_degree: float
    slot_count: int
    pair_count: int
    adjacent_success_count: int
    lag1_autocorrelation: float
    lag1_null_z: float
    removed_isolated: int = 0
    removed_pair_vertices: int = 0


def grow_aer(spec: AerModelSpec, rng: RngStream,
             carry_z_across_rows: bool = False) -> Graph:
    """Build the autocorrelated random graph and prune trivial components.

    Scans vertex pairs row by row; each draw succeeds with probability
    (p_a + z)/2 where z indicates whether the immediately preceding target in
    the same row received an edge. z starts at 0 for each row's first target
    (the first draw uses p_a / 2) unless carry_z_across_rows is set, in which
    case the final indicator of the previous row carries over. After the scan,
    isolated vertices and two-vertex components joined by a single edge are
    removed.
    """
    graph, _ = grow_aer_with_stats(spec, rng, carry_z_across_rows)
    return graph


def grow_aer_with_stats(spec: AerModelSpec, rng: RngStream,
                        carry_z_across_rows: bool = False
                        ) -> tuple[Graph, AerRunStats]:
    full, stats = grow_aer_unpruned(spec, rng, carry_z_across_rows)
    keep, removed_isolated, removed_pairs = _prune_small_components(full)
    pruned = full.induced(keep)
    stats = replace(stats, removed_isolated=removed_isolated,
                    removed_pair_vertices=removed_pairs)
    return pruned, stats


def grow_aer_unpruned(spec: AerModelSpec, rng: RngStream,
                      carry_z_across_rows: bool = False
                      ) -> tuple[Graph, AerRunStats]:
    """The raw pair-scan graph before any pruning, with scan diagnostics.

    Each slot in the flattened row-by-row scan succeeds with probability
    p_a / 2 after a failure and (p_a + 1) / 2 after a success, so successes
    arrive as isolated starters followed by geometric runs. The scan jumps
    between starters with geometric gaps instead of drawing every slot, which
    is the same two-state chain sampled sparsely.
    """
    gen = rng.generator()
    n1 = spec.n1
    p_half = spec.p_a / 2.0
    c_half = (spec.p_a + 1.0) / 2.0

    # Row r (0-based source i = r) covers flat slots [row_start[r], row_end[r]);
    # slot s in row r is the pair (r, r + 1 + s - row_start[r]).
    lengths = np.arange(n1 - 1, 0, -1, dtype=np.int64)
    row_end = np.cumsum(lengths)
    row_start = row_end - lengths
    total_slots = int(row_end[-1])

    edge_slots: list[int] = []
    adjacent_total = 0
    pos = 0  # next undetermined slot, chain state 0
    while pos < total_slots:
        gap = int(gen.geometric(p_half))
        start = pos + gap - 1
        if start >= total_slots:
            break
        row = int(np.searchsorted(row_end, start, side="right"))
        boundary = total_slots if carry_z_across_rows else int(row_end[row])
        j = start
        run_in_row = 0
        while True:
            edge_slots.append(j)
            run_in_row += 1
            j += 1
            if j >= boundary:
                adjacent_total += run_in_row - 1
                pos = j  # at a row boundary the chain restarts in state 0
                break
            if carry_z_across_rows and j == row_end[row]:
                # Run crosses into the next row; the pair straddling the
                # boundary is not a within-row adjacency.
                adjacent_total += run_in_row - 1
                row = int(np.searchsorted(row_end, j, side="right"))
                run_in_row = 0
            if gen.random() >= c_half:
                adjacent_total += max(run_in_row - 1, 0)
                pos = j + 1  # the failed slot itself is determined: no edge
                break

    edge_total = len(edge_slots)
    slot_total = total_slots
    pair_total = int(total_slots - (n1 - 1))
    if edge_total:
        slots = np.asarray(edge_slots, dtype=np.int64)
        rows = np.searchsorted(row_end, slots, side="right")
        targets = rows + 1 + (slots - row_start[rows])
        pairs = np.column_stack([rows, targets])
    else:
        pairs = np.empty((0, 2), dtype=np.int64)
    full = Graph(n1, pairs, directed=False)

    p_hat = edge_total / slot_total if slot_total else 0.0
    p11 = adjacent_total / pair_total if pair_total else 0.0
    denom = p_hat * (1.0 - p_hat)
    r1 = (p11 - p_hat * p_hat) / denom if denom > 0.0 else 0.0
    z = r1 * math.sqrt(pair_total) if pair_total else 0.0
    stats = AerRunStats(
        pre_prune_edge_count=edge_total,
        pre_prune_mean_degree=2.0 * edge_total / n1,
        slot_count=slot_total,
        pair_count=pair_total,
        adjacent_success_count=adjacent_total,
        lag1_autocorrelation=r1,
        lag1_null_z=z,
        removed_isolated=0,
        removed_pair_vertices=0,
    )
    return full, stats


def _prune_small_components(graph: Graph) -> tuple[np.ndarray, int, int]:
    """Mask of vertices in components of size >= 3, plus removal counts."""
    parent = np.arange(graph.vertex_count, dtype=np.int64)

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for a, b in graph.pairs:
        ra, rb = find(int(a)), find(int(b))
        if ra != rb:
            parent[rb] = ra

    roots = np.array([find(int(v)) for v in range(graph.vertex_count)])
    sizes = np.bincount(roots, minlength=graph.vertex_count)
    comp_size = sizes[roots]
    keep = comp_size >= 3
    removed_isolated = int(np.count_nonzero(comp_size == 1))
    removed_pairs = int(np.count_nonzero(comp_size == 2))
    return keep, removed_isolated, removed_pairs


# ---------------------------------------------------------------------------
# Composite growth
# ---------------------------------------------------------------------------

def grow_composite(spec: CompositeSpec, rng: RngStream,
                   bridge_edges: int = 0) -> Graph:
    """Grow each component at its vertex budget and take the disjoint union.

    With bridge_edges > 0, that many extra edges are added, each joining
    uniformly chosen vertices of two distinct components, making the
    composition loosely connected instead of isolated.
    """
    budgets = spec.budgets()
    parts: list[Graph] = []
    for idx, ((model, _rho), budget) in enumerate(zip(spec.components, budgets)):
        sub = rng.substream(idx)
        if isinstance(model, BaTreeSpec):
            parts.append(grow_npa(model.to_npa(), budget, sub).final_graph)
        elif isinstance(model, NpaModelSpec):
            parts.append(grow_npa(model, budget, sub).final_graph)
        elif isinstance(model, AerModelSpec):
            aer = model if model.n1 == budget else AerModelSpec(n1=budget, a=model.a)
            parts.append(grow_aer(aer, sub))
        else:
            raise TypeError(f"cannot grow component of type {type(model).__name__}")
    union = Graph.disjoint_union(parts, directed=False)
    if bridge_edges > 0 and len(parts) >= 2:
        gen = rng.substream(len(parts)).generator()
        offsets = np.cumsum([0] + [p.vertex_count for p in parts])
        extra = []
        for _ in range(bridge_edges):
            ca, cb = gen.choice(len(parts), size=2, replace=False)
            va = offsets[ca] + int(gen.integers(parts[ca].vertex_count))
            vb = offsets[cb] + int(gen.integers(parts[cb].vertex_count))
            extra.append((va, vb))
        union = Graph(union.vertex_count,
                      np.concatenate([union.pairs, np.array(extra, dtype=np.int64)]),
                      directed=False)
    return union


# ---------------------------------------------------------------------------
# Measurement
# ---------------------------------------------------------------------------

def measure_vdd(graph: Graph) -> DegreeDistribution:
    """Histogram of degrees normalized by the vertex count."""
    if graph.vertex_count == 0:
        raise EmptyGraph("cannot measure an empty graph")
    counts = np.bincount(graph.degrees(), minlength=1)
    lo = int(np.flatnonzero(counts)[0]) if counts.any() else 0
    probs = counts[lo:] / graph.vertex_count
    return DegreeDistribution(min_degree=lo, probs=probs, truncation_mass=0.0)


def measure_edd(graph: Graph, u: int) -> EdgeDegreeMatrix:
    """Symmetric endpoint-degree mass of the edges, truncated beyond degree u.

    Every edge puts 1/(2 E) at (d1, d2) and 1/(2 E) at (d2, d1); edges with an
    endpoint above u go to truncation_mass.
    """
    if graph.edge_count == 0:
        raise NoEdges("graph has no edges to measure")
    deg = graph.degrees()
    d1 = deg[graph.pairs[:, 0]]
    d2 = deg[graph.pairs[:, 1]]
    inside = (d1 <= u) & (d2 <= u)
    w = 1.0 / (2.0 * graph.edge_count)
    entries = np.zeros((u, u), dtype=np.float64)
    np.add.at(entries, (d1[inside] - 1, d2[inside] - 1), w)
    np.add.at(entries, (d2[inside] - 1, d1[inside] - 1), w)
    trunc = float(np.count_nonzero(~inside)) / graph.edge_count
    return EdgeDegreeMatrix(min_degree=1, entries=entries, kind="edge",
                            truncation_mass=trunc)


def measure_arc_dd(graph: Graph, u: int) -> EdgeDegreeMatrix:
    """Directed (tail degree, head degree) mass of the arcs, 1/E per arc."""
    if graph.edge_count == 0:
        raise NoEdges("graph has no arcs to measure")
    deg = graph.degrees()
    dl = deg[graph.pairs[:, 0]]
    dk = deg[graph.pairs[:, 1]]
    inside = (dl <= u) & (dk <= u)
    entries = np.zeros((u, u), dtype=np.float64)
    np.add.at(entries, (dl[inside] - 1, dk[inside] - 1), 1.0 / graph.edge_count)
    trunc = float(np.count_nonzero(~inside)) / graph.edge_count
    return EdgeDegreeMatrix(min_degree=1, entries=entries, kind="arc",
                            truncation_mass=trunc)


# ---------------------------------------------------------------------------
# Edge-list text interchange
# ---------------------------------------------------------------------------

def write_edge_list(graph: Graph, out: TextIO) -> None:
    out.write(f"# Nodes: {graph.vertex_count} Edges: {graph.edge_count}\n")
    out.write(f"# Directed: {'true' if graph.directed else 'false'}\n")
    for a, b in graph.pairs:
        out.write(f"{a} {b}\n")


def read_edge_list(lines: Iterable[str]) -> Graph:
    """Exact inverse of write_edge_list; keeps duplicates and vertex count."""
    n_header = None
    directed = False
    pairs: list[tuple[int, int]] = []
    max_id = -1
    for ln_no, raw in enumerate(lines, 1):
        s = raw.strip()
        if not s:
            continue
        if s.startswith("#"):
            if "Nodes:" in s:
                try:
                    n_header = int(s.split("Nodes:")[1].split()[0])
                except (ValueError, IndexError):
                    pass
            if "Directed:" in s:
                directed = "true" in s.split("Directed:")[1].lower()
            continue
        parts = s.split()
        if len(parts) != 2:
            raise MalformedLine(ln_no, raw.rstrip("\n"))
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedLine(ln_no, raw.rstrip("\n")) from None
        pairs.append((a, b))
        max_id = max(max_id, a, b)
    n = n_header if n_header is not None else max_id + 1
    return Graph(max(n, max_id + 1), pairs, directed=directed)
