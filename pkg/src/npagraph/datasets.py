"""Ingestion of real network edge lists and empirical distribution targets.

Datasets are treated as undirected simple graphs: duplicate and reversed pairs
collapse to one edge, self-loops are dropped with a counted warning, and node
ids are remapped to a dense range with the original ids retained on the graph.
"""

from __future__ import annotations

import gzip
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .errors import EmptyGraph, EmptyInput, InsufficientTail, MalformedLine
from .growth import measure_edd, measure_vdd
from .models import DegreeDistribution, Graph

log = logging.getLogger(__name__)

# Shared implementations: the empirical distributions of an ingested network
# are measured exactly like those of a grown graph.
empirical_vdd = measure_vdd
empirical_edd = measure_edd


@dataclass(frozen=True)
class DatasetSummary:
    """Headline statistics of an ingested network."""

    node_count: int
    edge_count: int
    mean_degree: float
    derived_m: float

    def to_dict(self) -> dict:
        return {"node_count": self.node_count, "edge_count": self.edge_count,
                "mean_degree": self.mean_degree, "derived_m": self.derived_m}


@dataclass
class ParseStats:
    lines_read: int = 0
    comment_lines: int = 0
    self_loops_dropped: int = 0
    duplicates_collapsed: int = 0


def parse_edge_list(lines: Iterable[str], return_stats: bool = False
                    ) -> Union[Graph, tuple[Graph, ParseStats]]:
    """Parse whitespace-separated node-id pairs into an undirected simple graph.

    Comment lines start with '#' (or '%'). A line that is not two integers
    raises MalformedLine with its line number.
    """
    stats = ParseStats()
    us: list[int] = []
    vs: list[int] = []
    for ln_no, raw in enumerate(lines, 1):
        stats.lines_read += 1
        s = raw.strip()
        if not s:
            continue
        if s[0] in "#%":
            stats.comment_lines += 1
            continue
        parts = s.split()
        if len(parts) != 2:
            raise MalformedLine(ln_no, raw.rstrip("\n"))
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedLine(ln_no, raw.rstrip("\n")) from None
        if a == b:
            stats.self_loops_dropped += 1
            continue
        us.append(a)
        vs.append(b)
    if not us:
        raise EmptyInput("edge list holds no usable edges")
    if stats.self_loops_dropped:
        log.warning("dropped %d self-loop(s)", stats.self_loops_dropped)

    u = np.asarray(us, dtype=np.int64)
    v = np.asarray(vs, dtype=np.int64)
    ids = np.unique(np.concatenate([u, v]))
    iu = np.searchsorted(ids, u)
    iv = np.searchsorted(ids, v)
    lo = np.minimum(iu, iv)
    hi = np.maximum(iu, iv)
    packed = lo * np.int64(len(ids)) + hi
    uniq = np.unique(packed)
    stats.duplicates_collapsed = len(packed) - len(uniq)
    pairs = np.column_stack([uniq // len(ids), uniq % len(ids)])
    graph = Graph(len(ids), pairs, directed=False, labels=ids)
    if return_stats:
        return graph, stats
    return graph


def load_edge_list(path: Union[str, Path], return_stats: bool = False):
    """Read an edge-list file, transparently handling gzip compression."""
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rt") as fh:
        return parse_edge_list(fh, return_stats=return_stats)


def summarize(graph: Graph) -> DatasetSummary:
    """Node/edge counts, mean degree, and the implied mean edges per node."""
    if graph.vertex_count == 0:
        raise EmptyGraph("cannot summarize an empty graph")
    mean_degree = 2.0 * graph.edge_count / graph.vertex_count
    return DatasetSummary(node_count=graph.vertex_count,
                          edge_count=graph.edge_count,
                          mean_degree=mean_degree,
                          derived_m=mean_degree / 2.0)


def vdd_counts_csv(graph: Graph, smoothed: DegreeDistribution) -> str:
    """degree,count,probability rows: raw histogram counts next to the
    (possibly smoothed) probabilities used downstream."""
    counts = np.bincount(graph.degrees(),
                         minlength=smoothed.max_degree + 1)
    lines = ["degree,count,probability"]
    for k, p in smoothed.to_rows():
        lines.append(f"{k},{int(counts[k]) if k < len(counts) else 0},{p!r}")
    return "\n".join(lines) + "\n"


def id_map_csv(graph: Graph) -> str:
    """dense_id,original_id mapping retained from parsing."""
    lines = ["dense_id,original_id"]
    if graph.labels is not None:
        lines.extend(f"{i},{int(orig)}" for i, orig in enumerate(graph.labels))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Smoothing
# ---------------------------------------------------------------------------

def smooth_vdd(q: DegreeDistribution, method: str = "none",
               base: float = 2.0, cut: int = 20) -> DegreeDistribution:
    """Optional smoothing of an empirical degree distribution.

    "none" returns the input unchanged. "log-bin" spreads each geometric
    bin's mass uniformly over the degrees inside it. "tail-powerlaw" fits
    C * k**(-beta) by least squares on log-log to the nonzero tail at k >= cut
    and replaces the tail, rescaled so its mass is preserved exactly.
    """
    if method == "none":
        return q
    if method == "log-bin":
        return _smooth_log_bin(q, base)
    if method == "tail-powerlaw":
        return _smooth_tail_powerlaw(q, cut)
    raise ValueError(f"unknown smoothing method {method!r}")


def _smooth_log_bin(q: DegreeDistribution, base: float) -> DegreeDistribution:
    if base <= 1.0:
        raise ValueError("log-bin base must exceed 1")
    probs = np.array(q.probs)
    out = np.empty_like(probs)
    start = q.min_degree
    edge = max(start, 1)
    while start <= q.max_degree:
        nxt = max(edge + 1, int(math.ceil(edge * base)))
        a = start - q.min_degree
        b = min(nxt - 1, q.max_degree) - q.min_degree
        width = b - a + 1
        out[a:b + 1] = probs[a:b + 1].sum() / width
        start = start + width
        edge = nxt
    return DegreeDistribution(min_degree=q.min_degree, probs=out,
                              truncation_mass=q.truncation_mass)


def _smooth_tail_powerlaw(q: DegreeDistribution, cut: int) -> DegreeDistribution:
    degrees = q.degrees()
    probs = np.array(q.probs)
    tail = degrees >= cut
    fit_points = tail & (probs > 0.0)
    if np.count_nonzero(fit_points) < 5:
        raise InsufficientTail(
            f"only {np.count_nonzero(fit_points)} nonzero points beyond degree "
            f"{cut}; need at least 5")
    slope, intercept = np.polyfit(np.log(degrees[fit_points].astype(float)),
                                  np.log(probs[fit_points]), 1)
    fitted = np.exp(intercept) * np.power(degrees[tail].astype(float), slope)
    original_mass = probs[tail].sum()
    fitted *= original_mass / fitted.sum()
    out = probs.copy()
    out[tail] = fitted
    return DegreeDistribution(min_degree=q.min_degree, probs=out,
                              truncation_mass=q.truncation_mass)
