"""Domain types for growing-graph models.

Degree-indexed sequences always carry an explicit minimum degree instead of
assuming index 0 means degree 0; models with minimum degree 0 and 1 both occur.
All spec types are immutable after validation and safe to share across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import ValidationError, Violation

NORMALIZATION_TOL = 1e-12
EDD_NORMALIZATION_TOL = 1e-9


# ---------------------------------------------------------------------------
# Weight function
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightFunction:
    """Attachment weight f_k per vertex degree k.

    Weights are positive exactly on [g, M] and zero outside; M may be None
    (unbounded). The sequence is given by a named rule ("linear" for f_k = k,
    "power" for f_k = k**alpha, "constant" for f_k = value), optionally with a
    table of explicit overrides starting at degree g. Degrees beyond the table
    follow the rule; a pure table requires finite M inside the tabulated range.
    """

    g: int
    M: int | None = None
    rule: str | None = "linear"
    alpha: float = 1.0
    value: float = 1.0
    table: tuple[float, ...] = ()

    @classmethod
    def linear(cls, g: int = 1, M: int | None = None) -> "WeightFunction":
        return cls(g=g, M=M, rule="linear")

    @classmethod
    def power(cls, alpha: float, g: int = 1, M: int | None = None) -> "WeightFunction":
        return cls(g=g, M=M, rule="power", alpha=alpha)

    @classmethod
    def constant(cls, value: float = 1.0, g: int = 1, M: int | None = None) -> "WeightFunction":
        return cls(g=g, M=M, rule="constant", value=value)

    @classmethod
    def from_table(cls, g: int, values: Sequence[float], M: int | None = None,
                   rule: str | None = None, alpha: float = 1.0,
                   value: float = 1.0) -> "WeightFunction":
        if M is None and rule is None:
            M = g + len(values) - 1
        return cls(g=g, M=M, rule=rule, alpha=alpha, value=value,
                   table=tuple(float(v) for v in values))

    def _rule_value(self, k: int) -> float:
        if self.rule == "linear":
            return float(k)
        if self.rule == "power":
            return float(k) ** self.alpha
        if self.rule == "constant":
            return self.value
        raise ValueError(f"no rule to evaluate weight at degree {k}")

    def weight(self, k: int) -> float:
        """f_k; zero outside [g, M]."""
        if k < self.g or (self.M is not None and k > self.M):
            return 0.0
        idx = k - self.g
        if 0 <= idx < len(self.table):
            return self.table[idx]
        return self._rule_value(k)

    def weights_upto(self, k_top: int) -> np.ndarray:
        """Vector of f_k for k = 0 .. k_top (index equals degree)."""
        f = np.zeros(k_top + 1, dtype=np.float64)
        hi = k_top if self.M is None else min(self.M, k_top)
        if hi < self.g:
            return f
        ks = np.arange(self.g, hi + 1)
        if self.rule == "linear":
            f[self.g:hi + 1] = ks
        elif self.rule == "power":
            f[self.g:hi + 1] = np.power(ks, self.alpha, dtype=np.float64)
        elif self.rule == "constant":
            f[self.g:hi + 1] = self.value
        if self.table:
            t_hi = min(self.g + len(self.table) - 1, hi)
            if t_hi >= self.g:
                f[self.g:t_hi + 1] = self.table[:t_hi - self.g + 1]
        return f

    def asymptote(self) -> tuple:
        """Tail behaviour of f beyond any finite table.

        Returns ("finite", M), ("linear", coeff), ("constant", value) or
        ("power", alpha). Used by the solver to pick a tail-summation strategy.
        """
        if self.M is not None:
            return ("finite", self.M)
        if self.rule == "linear" or (self.rule == "power" and self.alpha == 1.0):
            return ("linear", 1.0)
        if self.rule == "constant":
            return ("constant", self.value)
        if self.rule == "power":
            return ("power", self.alpha)
        return ("finite", self.g + len(self.table) - 1)

    def table_end(self) -> int:
        """Last degree covered by explicit table values (g - 1 when no table)."""
        return self.g + len(self.table) - 1

    def violations(self) -> list[Violation]:
        out = []
        if self.g < 0:
            out.append(Violation("EmptySupport", f"minimum degree g = {self.g} is negative"))
        if self.M is not None and self.M < self.g:
            out.append(Violation("EmptySupport", f"M = {self.M} < g = {self.g}"))
        if self.rule is None and (self.M is None or self.M > self.table_end()):
            out.append(Violation(
                "EmptySupport",
                "tabulated weights without a rule require finite M within the table"))
        if self.rule not in (None, "linear", "power", "constant"):
            out.append(Violation("EmptySupport", f"unknown weight rule {self.rule!r}"))
            return out
        # Probe inside the support: table entries plus rule values at the edges.
        hi = self.M if self.M is not None else max(self.g + 3, self.table_end() + 2)
        probes = set(range(self.g, min(self.g + len(self.table), hi) + 1))
        probes.update((self.g, hi))
        for k in sorted(probes):
            if k < self.g or (self.M is not None and k > self.M):
                continue
            try:
                w = self.weight(k)
            except ValueError:
                continue
            if not (w > 0.0) or not math.isfinite(w):
                out.append(Violation(
                    "WeightSignViolation",
                    f"f_{k} = {w} is not positive inside [g, M]"))
        return out

    def to_dict(self) -> dict:
        return {"g": self.g, "M": self.M, "rule": self.rule, "alpha": self.alpha,
                "value": self.value, "table": list(self.table)}

    @classmethod
    def from_dict(cls, d: Mapping) -> "WeightFunction":
        return cls(g=int(d["g"]), M=None if d.get("M") is None else int(d["M"]),
                   rule=d.get("rule"), alpha=float(d.get("alpha", 1.0)),
                   value=float(d.get("value", 1.0)),
                   table=tuple(float(v) for v in d.get("table", ())))


# ---------------------------------------------------------------------------
# Increment distribution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IncrementDistribution:
    """Distribution {r_k} of the number of arcs a new vertex arrives with.

    Support is the contiguous integer range [min_arcs, min_arcs + len(probs) - 1].
    """

    min_arcs: int
    probs: tuple[float, ...]

    @classmethod
    def from_dict_probs(cls, probs: Mapping[int, float]) -> "IncrementDistribution":
        if not probs:
            return cls(min_arcs=0, probs=())
        lo, hi = min(probs), max(probs)
        return cls(min_arcs=lo, probs=tuple(float(probs.get(k, 0.0)) for k in range(lo, hi + 1)))

    @property
    def max_arcs(self) -> int:
        return self.min_arcs + len(self.probs) - 1

    @property
    def mean(self) -> float:
        return float(sum((self.min_arcs + i) * p for i, p in enumerate(self.probs)))

    def prob(self, k: int) -> float:
        idx = k - self.min_arcs
        if 0 <= idx < len(self.probs):
            return self.probs[idx]
        return 0.0

    def prob_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=np.float64)

    def violations(self) -> list[Violation]:
        out = []
        if not self.probs or sum(self.probs) == 0.0:
            out.append(Violation("EmptySupport", "increment distribution has no mass"))
            return out
        if self.min_arcs < 0:
            out.append(Violation("EmptySupport", f"negative minimum arc count {self.min_arcs}"))
        for i, p in enumerate(self.probs):
            if p < 0.0 or not math.isfinite(p):
                out.append(Violation(
                    "NonNormalized", f"r_{self.min_arcs + i} = {p} is not a probability"))
        total = math.fsum(self.probs)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            out.append(Violation("NonNormalized", f"probabilities sum to {total!r}, not 1"))
        return out

    def to_dict(self) -> dict:
        return {"min_arcs": self.min_arcs, "probs": list(self.probs)}

    @classmethod
    def from_dict(cls, d: Mapping) -> "IncrementDistribution":
        return cls(min_arcs=int(d["min_arcs"]), probs=tuple(float(p) for p in d["probs"]))


def mean_increment(d: IncrementDistribution) -> float:
    """Mean number of arcs per increment, recomputed from the probabilities."""
    return d.mean


# ---------------------------------------------------------------------------
# Degree distribution
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DegreeDistribution:
    """Probabilities Q_k over vertex degrees k = min_degree .. min_degree + len - 1.

    truncation_mass is the probability mass beyond the stored range; it is
    tracked explicitly and never silently renormalized away.
    """

    min_degree: int
    probs: np.ndarray
    truncation_mass: float = 0.0

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.probs, dtype=np.float64))
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)
        object.__setattr__(self, "truncation_mass", float(self.truncation_mass))

    @property
    def max_degree(self) -> int:
        return self.min_degree + len(self.probs) - 1

    def prob(self, k: int) -> float:
        idx = k - self.min_degree
        if 0 <= idx < len(self.probs):
            return float(self.probs[idx])
        return 0.0

    def degrees(self) -> np.ndarray:
        return np.arange(self.min_degree, self.max_degree + 1)

    def stored_mass(self) -> float:
        return float(self.probs.sum())

    def mean(self) -> float:
        """Mean degree over the stored range (excludes truncated mass)."""
        return float((self.degrees() * self.probs).sum())

    def aligned(self, lo: int, hi: int) -> np.ndarray:
        """Probabilities re-indexed onto degrees lo..hi, zero-padded."""
        out = np.zeros(hi - lo + 1, dtype=np.float64)
        a = max(lo, self.min_degree)
        b = min(hi, self.max_degree)
        if a <= b:
            out[a - lo:b - lo + 1] = self.probs[a - self.min_degree:b - self.min_degree + 1]
        return out

    def tv_distance(self, other: "DegreeDistribution") -> float:
        """Total-variation distance, with truncated masses compared as one bucket."""
        lo = min(self.min_degree, other.min_degree)
        hi = max(self.max_degree, other.max_degree)
        diff = np.abs(self.aligned(lo, hi) - other.aligned(lo, hi)).sum()
        diff += abs(self.truncation_mass - other.truncation_mass)
        return 0.5 * float(diff)

    def violations(self) -> list[Violation]:
        out = []
        if len(self.probs) == 0:
            out.append(Violation("EmptySupport", "degree distribution stores no probabilities"))
            return out
        if np.any(self.probs < 0.0) or not np.all(np.isfinite(self.probs)):
            bad = int(np.argmin(self.probs))
            out.append(Violation(
                "NonNormalized",
                f"Q_{self.min_degree + bad} = {self.probs[bad]} is not a probability"))
        if self.truncation_mass < -NORMALIZATION_TOL:
            out.append(Violation(
                "NonNormalized", f"negative truncation mass {self.truncation_mass!r}"))
        total = float(self.probs.sum()) + self.truncation_mass
        if abs(total - 1.0) > NORMALIZATION_TOL * max(1.0, len(self.probs) ** 0.5):
            out.append(Violation("NonNormalized", f"total mass {total!r} differs from 1"))
        return out

    def to_rows(self) -> Iterable[tuple[int, float]]:
        for i, p in enumerate(self.probs):
            yield self.min_degree + i, float(p)

    def to_dict(self) -> dict:
        return {"min_degree": self.min_degree, "probs": self.probs.tolist(),
                "truncation_mass": self.truncation_mass}

    @classmethod
    def from_dict(cls, d: Mapping) -> "DegreeDistribution":
        return cls(min_degree=int(d["min_degree"]),
                   probs=np.asarray(d["probs"], dtype=np.float64),
                   truncation_mass=float(d.get("truncation_mass", 0.0)))


# ---------------------------------------------------------------------------
# Edge / arc degree matrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EdgeDegreeMatrix:
    """Joint degree probabilities of arc or edge endpoints.

    entries[i, j] is the probability for endpoint degrees
    (min_degree + i, min_degree + j). kind is "arc" for the directed
    (tail, head) law and "edge" for the symmetrized undirected law.
    truncation_mass is whatever falls outside the stored square; for the
    directed recurrence it may be negative when the recurrence variant does
    not conserve mass, which is reported rather than hidden.
    """

    min_degree: int
    entries: np.ndarray
    kind: str = "edge"
    truncation_mass: float = 0.0

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.entries, dtype=np.float64))
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("entries must be a square matrix")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "truncation_mass", float(self.truncation_mass))
        if self.kind not in ("arc", "edge"):
            raise ValueError(f"kind must be 'arc' or 'edge', got {self.kind!r}")

    @property
    def max_degree(self) -> int:
        return self.min_degree + self.entries.shape[0] - 1

    def stored_mass(self) -> float:
        return float(self.entries.sum())

    def window(self, g: int, u: int) -> np.ndarray:
        """Submatrix over degrees [g, u] in both axes."""
        from .errors import WindowExceedsMatrix
        if g < self.min_degree or u > self.max_degree or u < g:
            raise WindowExceedsMatrix(
                f"window [{g}, {u}] not covered by matrix over "
                f"[{self.min_degree}, {self.max_degree}]")
        a = g - self.min_degree
        b = u - self.min_degree + 1
        return self.entries[a:b, a:b]

    def aligned(self, lo: int, hi: int) -> np.ndarray:
        out = np.zeros((hi - lo + 1, hi - lo + 1), dtype=np.float64)
        a = max(lo, self.min_degree)
        b = min(hi, self.max_degree)
        if a <= b:
            sa = a - self.min_degree
            sb = b - self.min_degree + 1
            out[a - lo:b - lo + 1, a - lo:b - lo + 1] = self.entries[sa:sb, sa:sb]
        return out

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.entries, self.entries.T))

    def violations(self) -> list[Violation]:
        out = []
        if np.any(self.entries < 0.0) or not np.all(np.isfinite(self.entries)):
            out.append(Violation("NonNormalized", "matrix holds a negative or non-finite entry"))
        total = self.stored_mass() + self.truncation_mass
        if abs(total - 1.0) > EDD_NORMALIZATION_TOL:
            out.append(Violation("NonNormalized", f"total mass {total!r} differs from 1"))
        if self.kind == "edge" and not self.is_symmetric():
            out.append(Violation("NonNormalized", "edge matrix is not symmetric"))
        return out

    def to_rows(self) -> Iterable[tuple[int, int, float]]:
        n = self.entries.shape[0]
        for i in range(n):
            for j in range(n):
                yield self.min_degree + i, self.min_degree + j, float(self.entries[i, j])

    def to_dict(self) -> dict:
        return {"min_degree": self.min_degree, "kind": self.kind,
                "entries": self.entries.tolist(),
                "truncation_mass": self.truncation_mass}

    @classmethod
    def from_dict(cls, d: Mapping) -> "EdgeDegreeMatrix":
        return cls(min_degree=int(d["min_degree"]),
                   entries=np.asarray(d["entries"], dtype=np.float64),
                   kind=d.get("kind", "edge"),
                   truncation_mass=float(d.get("truncation_mass", 0.0)))


# ---------------------------------------------------------------------------
# Graph
# ---------------------------------------------------------------------------

class Graph:
    """A grown or ingested graph: vertex count plus an array of endpoint pairs.

    Degrees count every incident arc or edge end, so for directed graphs the
    degree of a vertex is its in-degree plus out-degree, matching the degree
    notion the growth model uses. Parallel edges are allowed; self-loops are
    not created by any grower.
    """

    __slots__ = ("vertex_count", "pairs", "directed", "labels")

    def __init__(self, vertex_count: int, pairs, directed: bool = False, labels=None):
        self.vertex_count = int(vertex_count)
        arr = np.asarray(pairs, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("pairs must be an (E, 2) array")
        self.pairs = arr
        self.directed = bool(directed)
        self.labels = labels

    @property
    def edge_count(self) -> int:
        return self.pairs.shape[0]

    def degrees(self) -> np.ndarray:
        d = np.bincount(self.pairs.reshape(-1), minlength=self.vertex_count)
        return d[:self.vertex_count]

    @property
    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in self.pairs:
            adj[u].append(int(v))
            adj[v].append(int(u))
        return adj

    def to_undirected(self, collapse_parallel: bool = False) -> "Graph":
        if not self.directed and not collapse_parallel:
            return self
        pairs = self.pairs
        if collapse_parallel and len(pairs):
            lo = np.minimum(pairs[:, 0], pairs[:, 1])
            hi = np.maximum(pairs[:, 0], pairs[:, 1])
            packed = np.unique(lo * np.int64(self.vertex_count) + hi)
            pairs = np.column_stack([packed // self.vertex_count,
                                     packed % self.vertex_count])
        return Graph(self.vertex_count, pairs, directed=False, labels=self.labels)

    def induced(self, keep: np.ndarray) -> "Graph":
        """Subgraph on the vertices flagged in the boolean mask, relabeled densely."""
        new_id = np.full(self.vertex_count, -1, dtype=np.int64)
        kept = np.flatnonzero(keep)
        new_id[kept] = np.arange(len(kept))
        if len(self.pairs):
            mask = keep[self.pairs[:, 0]] & keep[self.pairs[:, 1]]
            pairs = new_id[self.pairs[mask]]
        else:
            pairs = self.pairs
        labels = None
        if self.labels is not None:
            labels = np.asarray(self.labels)[kept]
        return Graph(len(kept), pairs, directed=self.directed, labels=labels)

    @staticmethod
    def disjoint_union(graphs: Sequence["Graph"], directed: bool = False) -> "Graph":
        offset = 0
        parts = []
        for gr in graphs:
            if len(gr.pairs):
                parts.append(gr.pairs + offset)
            offset += gr.vertex_count
        pairs = np.concatenate(parts) if parts else np.empty((0, 2), dtype=np.int64)
        return Graph(offset, pairs, directed=directed)


# ---------------------------------------------------------------------------
# Model specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeedGraphSpec:
    """Starting graph for growth: a named default or an explicit edge list.

    The default is a complete undirected graph on max(g, 1) + 1 vertices, so
    every seed vertex has degree >= g and positive attachment weight; the
    stationary distributions do not depend on the seed.
    """

    name: str | None = "default"
    vertices: int | None = None
    edges: tuple[tuple[int, int], ...] | None = None

    def build(self, g: int) -> Graph:
        if self.edges is not None:
            if self.vertices is not None:
                n = self.vertices
            elif self.edges:
                n = 1 + max(max(e) for e in self.edges)
            else:
                n = 0
            return Graph(n, list(self.edges), directed=True)
        n = max(g, 1) + 1
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        return Graph(n, pairs, directed=True)

    def to_dict(self) -> dict:
        if self.edges is not None:
            return {"vertices": self.vertices, "edges": [list(e) for e in self.edges]}
        return {"name": self.name}

    @classmethod
    def from_dict(cls, d: Mapping) -> "SeedGraphSpec":
        if "edges" in d and d["edges"] is not None:
            return cls(name=None,
                       vertices=None if d.get("vertices") is None else int(d["vertices"]),
                       edges=tuple((int(a), int(b)) for a, b in d["edges"]))
        return cls(name=d.get("name", "default"))


@dataclass(frozen=True)
class NpaModelSpec:
    """A growing-graph model: attachment weights plus the increment-arc law."""

    weights: WeightFunction
    increments: IncrementDistribution
    seed_graph: SeedGraphSpec = SeedGraphSpec()

    @property
    def g(self) -> int:
        return self.weights.g

    def violations(self) -> list[Violation]:
        out = self.weights.violations() + self.increments.violations()
        if self.increments.min_arcs != self.weights.g:
            out.append(Violation(
                "SupportMismatch",
                f"increment support starts at {self.increments.min_arcs} but the "
                f"weight support starts at g = {self.weights.g}; the model uses a "
                "single minimum degree for both"))
        seed = self.seed_graph.build(self.weights.g)
        total = sum(self.weights.weight(int(k)) for k in seed.degrees())
        if not total > 0.0:
            out.append(Violation(
                "SeedWeightZero",
                "seed graph has zero total attachment weight; the attachment rule "
                "is undefined at the first step"))
        return out

    def to_dict(self) -> dict:
        return {"type": "npa", "weights": self.weights.to_dict(),
                "increments": self.increments.to_dict(),
                "seed_graph": self.seed_graph.to_dict()}


@dataclass(frozen=True)
class BaTreeSpec:
    """Fixed special case: every increment brings one arc and weights are linear."""

    def to_npa(self) -> NpaModelSpec:
        return NpaModelSpec(weights=WeightFunction.linear(g=1),
                            increments=IncrementDistribution(min_arcs=1, probs=(1.0,)))

    def violations(self) -> list[Violation]:
        return []

    def to_dict(self) -> dict:
        return {"type": "ba_tree"}


@dataclass(frozen=True)
class AerModelSpec:
    """Autocorrelated random-pairing graph: n1 vertices scanned row by row.

    Each potential edge is drawn with probability (p_a + z)/2 where z is 1
    when the immediately preceding target in the row received an edge.
    """

    n1: int
    a: float

    @property
    def p_a(self) -> float:
        return self.a / (self.n1 - 1)

    def violations(self) -> list[Violation]:
        out = []
        if self.n1 < 2:
            out.append(Violation("EmptySupport", f"n1 = {self.n1} leaves no vertex pairs"))
            return out
        if not (0.0 < self.p_a <= 1.0):
            out.append(Violation(
                "NonNormalized", f"base probability p_a = {self.p_a!r} outside (0, 1]"))
        if (self.p_a + 1.0) / 2.0 > 1.0:
            out.append(Violation(
                "NonNormalized", f"conditional probability (p_a + 1)/2 exceeds 1"))
        return out

    def to_dict(self) -> dict:
        return {"type": "aer", "n1": self.n1, "a": self.a}


ComponentModel = Union[NpaModelSpec, AerModelSpec, BaTreeSpec]


@dataclass(frozen=True)
class CompositeSpec:
    """Weighted combination of component models with vertex fractions rho_i."""

    components: tuple[tuple[ComponentModel, float], ...]
    total_n: int
    metadata: dict = field(default_factory=dict)

    def budgets(self) -> list[int]:
        """Vertex budget per component: rho_i * total_n rounded to nearest."""
        return [int(round(rho * self.total_n)) for _, rho in self.components]

    def violations(self) -> list[Violation]:
        out = []
        if not self.components:
            out.append(Violation("EmptySupport", "composite has no components"))
            return out
        for model, _rho in self.components:
            out.extend(model.violations())
        total = math.fsum(rho for _, rho in self.components)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            out.append(Violation(
                "NonNormalized", f"vertex fractions sum to {total!r}, not 1"))
        for i, budget in enumerate(self.budgets()):
            if budget < 2:
                out.append(Violation(
                    "EmptySupport",
                    f"component {i} budget rounds to {budget} < 2 vertices"))
        return out

    def to_dict(self) -> dict:
        return {"type": "composite", "total_n": self.total_n,
                "components": [{"rho": rho, "model": model.to_dict()}
                               for model, rho in self.components],
                "metadata": self.metadata}


ModelSpec = Union[NpaModelSpec, AerModelSpec, BaTreeSpec, CompositeSpec]


def validate_model(spec: ModelSpec) -> ModelSpec:
    """Return the spec unchanged if every invariant holds.

    Raises ValidationError listing all violated invariants otherwise.
    Idempotent: validating a validated spec returns the same object.
    """
    violations = spec.violations()
    if violations:
        raise ValidationError(violations)
    return spec


# ---------------------------------------------------------------------------
# Spec (de)serialization
# ---------------------------------------------------------------------------

def model_to_dict(spec: ModelSpec) -> dict:
    return spec.to_dict()


def model_from_dict(d: Mapping) -> ModelSpec:
    kind = d.get("type")
    if kind == "npa":
        return NpaModelSpec(
            weights=WeightFunction.from_dict(d["weights"]),
            increments=IncrementDistribution.from_dict(d["increments"]),
            seed_graph=SeedGraphSpec.from_dict(d.get("seed_graph", {"name": "default"})))
    if kind == "ba_tree":
        return BaTreeSpec()
    if kind == "aer":
        return AerModelSpec(n1=int(d["n1"]), a=float(d["a"]))
    if kind == "composite":
        comps = tuple((model_from_dict(c["model"]), float(c["rho"]))
                      for c in d["components"])
        return CompositeSpec(components=comps, total_n=int(d["total_n"]),
                             metadata=dict(d.get("metadata", {})))
    raise ValidationError([Violation("EmptySupport", f"unknown model type {kind!r}")])


def dump_model(spec: ModelSpec) -> str:
    return json.dumps(model_to_dict(spec), indent=2, sort_keys=True)


def load_model(text: str) -> ModelSpec:
    return model_from_dict(json.loads(text))
