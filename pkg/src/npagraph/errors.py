"""Exception types shared across the toolkit."""

from __future__ import annotations

from dataclasses import dataclass


class NpaGraphError(Exception):
    """Base class for all toolkit errors."""


@dataclass(frozen=True)
class Violation:
    """One violated invariant found during model validation."""

    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


class ValidationError(NpaGraphError):
    """A model spec violates one or more invariants.

    Carries the full list of violations, not just the first one found.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))

    def codes(self):
        return [v.code for v in self.violations]


class SolverFailure(NpaGraphError):
    """Base class for analytic-solver errors."""


class NoConvergence(SolverFailure):
    """The mean-weight fixed point could not be bracketed or iterated to tolerance."""


class TruncationTooSevere(SolverFailure):
    """Probability mass beyond the truncation bound is too large; raise the cutoff."""


class ZeroTotalWeight(NpaGraphError):
    """Every existing vertex has zero attachment weight; growth cannot proceed."""


class EmptyGraph(NpaGraphError):
    """Operation requires a graph with at least one vertex."""


class NoEdges(NpaGraphError):
    """Operation requires a graph with at least one edge."""


class MalformedLine(NpaGraphError):
    """An edge-list line could not be parsed as two integer node ids."""

    def __init__(self, line_no: int, content: str):
        self.line_no = line_no
        self.content = content
        super().__init__(f"line {line_no}: cannot parse {content!r} as an edge")


class EmptyInput(NpaGraphError):
    """The edge-list input contained no edges."""


class WindowExceedsMatrix(NpaGraphError):
    """Requested degree window is not covered by the matrix extent."""


class WeightsNotConvex(NpaGraphError):
    """Mixture weights are negative or do not sum to one."""


class GammaNotConvex(NpaGraphError):
    """Edge-share weights do not sum to one; the supplied total mean is inconsistent."""


class InfeasibleComplement(NpaGraphError):
    """The complement distribution would be negative; the assumed fraction is too large."""


class NonPositiveResult(NpaGraphError):
    """The complement mean is not positive; the assumed fraction is infeasible."""


class InsufficientTail(NpaGraphError):
    """Too few nonzero tail points to fit a power law."""


class AllRhoInfeasible(NpaGraphError):
    """No candidate vertex fraction admitted a feasible complement."""
