"""Stationary degree-distribution solver and mixture algebra.

The vertex degree recurrence
    Q_k = (r_k * phi + m * f_{k-1} * Q_{k-1}) / (phi + m * f_k)
is solved for the mean weight phi as a fixed point of
    phi -> sum_k f_k * Q_k(phi);
the control quantity mean_degree = sum_k k * Q_k must then equal twice the
mean increment arc count, and the residual is always reported.

Moments include closed-form or numeric tail corrections beyond the stored
truncation point, otherwise power-law tails would bias the fixed point and
the control residual far above the advertised tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (GammaNotConvex, InfeasibleComplement, NoConvergence,
                     NonPositiveResult, TruncationTooSevere, WeightsNotConvex)
from .models import DegreeDistribution, EdgeDegreeMatrix, NpaModelSpec

COMPLEMENT_CLAMP_TOL = 1e-6
GAMMA_TOL = 1e-9


@dataclass(frozen=True)
class SolverOptions:
    """Truncation extents and fixed-point controls.

    edd_variant selects the directed-recurrence form. "printed" is the
    denominator m*(l*f_l + m*f_k + m*f_l); the registered alternative
    "mean-weight" replaces the l*f_l term with the mean weight, which makes
    the recurrence conserve probability mass. The printed form is the default
    and any systematic discrepancy is surfaced by the simulation cross-check
    rather than silently corrected.
    """

    k_max: int = 10000
    u_max: int = 300
    fp_tolerance: float = 1e-10
    fp_max_iter: int = 10000
    edd_variant: str = "printed"
    edd_mass_tolerance: float = 1e-3
    vdd_truncation_limit: float = 1e-6

    def check(self, g: int) -> None:
        if not (self.k_max >= self.u_max >= g):
            raise ValueError(
                f"need k_max >= u_max >= g, got {self.k_max}, {self.u_max}, {g}")
        if self.fp_tolerance <= 0 or self.fp_max_iter <= 0:
            raise ValueError("tolerances and iteration caps must be positive")


@dataclass(frozen=True, eq=False)
class VddSolution:
    """Solved vertex degree distribution with its consistency diagnostics.

    mean_degree and mean_weight include the tail beyond the stored range;
    control_residual = |mean_degree - 2 m| is reported, never dropped.
    """

    q: DegreeDistribution
    mean_weight: float
    mean_degree: float
    control_residual: float
    tail_mass: float = 0.0
    tail_degree_mass: float = 0.0


# ---------------------------------------------------------------------------
# Affine scan: Q_i = a_i + b_i * Q_{i-1}
# ---------------------------------------------------------------------------

def _affine_scan(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorized first-order linear recurrence with Q_{-1} = 0.

    Computed segment-wise between zeros of b via cumulative products, which
    keeps the scan exact where a plain cumprod would collapse to zero.
    """
    n = len(a)
    out = np.empty(n, dtype=np.float64)
    boundaries = [0] + [int(i) for i in np.flatnonzero(b == 0.0) if i > 0] + [n]
    for s, e in zip(boundaries, boundaries[1:]):
        if s >= e:
            continue
        q0 = a[s] + (b[s] * out[s - 1] if s > 0 and b[s] != 0.0 else 0.0)
        out[s] = q0
        if e - s > 1:
            prod = np.cumprod(b[s + 1:e])
            seg = a[s + 1:e]
            with np.errstate(divide="ignore", invalid="ignore"):
                terms = np.where(seg != 0.0, seg / np.where(prod > 0.0, prod, 1.0), 0.0)
            out[s + 1:e] = prod * (q0 + np.cumsum(terms))
    return out


# ---------------------------------------------------------------------------
# Tail sums beyond the stored truncation point
# ---------------------------------------------------------------------------

def _tail_sums(asym: tuple, phi: float, m: float, q_top: float,
               k_top: int) -> tuple[float, float, float]:
    """(sum Q_k, sum k Q_k, sum f_k Q_k) over k > k_top.

    Assumes r_k = 0 beyond k_top, so the recurrence there is the pure ratio
    Q_k = Q_{k-1} * m f_{k-1} / (phi + m f_k). Linear and constant weights
    telescope in closed form; other powers are continued numerically.
    Returns infinities when the tail mean diverges, which the fixed-point
    bracketing interprets as "phi too small".
    """
    kind = asym[0]
    if kind == "finite" or q_top <= 0.0:
        return 0.0, 0.0, 0.0
    if kind == "linear":
        coeff = asym[1]
        c = phi / (m * coeff)
        if c <= 1.0 + 1e-12:
            return math.inf, math.inf, math.inf
        t_mass = q_top * k_top / c
        t_kmass = q_top * k_top * (k_top + 1) / (c - 1.0)
        return t_mass, t_kmass, coeff * t_kmass
    if kind == "constant":
        v = asym[1]
        ratio = m * v / (phi + m * v)
        t_mass = q_top * ratio / (1.0 - ratio)
        t_kmass = q_top * (k_top * ratio / (1.0 - ratio) + ratio / (1.0 - ratio) ** 2)
        return t_mass, t_kmass, v * t_mass
    # General power tail, Q_k = Q_{k-1} * m (k-1)^a / (phi + m k^a).
    alpha = asym[1]
    if alpha > 1.0:
        # Uncapped superlinear weights: Q_k ~ k**(-alpha), so the weighted
        # sum of f_k Q_k ~ sum of 1 diverges and no fixed point exists.
        # Such models need a finite maximum degree.
        return math.inf, math.inf, math.inf
    # A few exact chunks settle fast-decaying tails and expose divergence;
    # the surviving slow remainder closes in one incomplete-gamma step.
    sums = _chunked_power_tail(alpha, phi, m, q_top, k_top, max_chunks=8)
    if sums is not None:
        return sums
    return _chunked_power_tail(alpha, phi, m, q_top, k_top, max_chunks=2048,
                               force=True)


def _chunked_power_tail(alpha: float, phi: float, m: float, q_top: float,
                        k_top: int, max_chunks: int, force: bool = False):
    chunk = 4096
    t_mass = t_kmass = t_fmass = 0.0
    q_prev = q_top
    k = k_top
    prev_sk = None
    ratio = 1.0
    s_k = 0.0
    for _ in range(max_chunks):
        ks = np.arange(k + 1, k + 1 + chunk, dtype=np.float64)
        f_now = np.power(ks, alpha)
        f_prev = np.power(ks - 1.0, alpha)
        qs = q_prev * np.cumprod(m * f_prev / (phi + m * f_now))
        s_k = float((ks * qs).sum())
        t_mass += float(qs.sum())
        t_kmass += s_k
        t_fmass += float((f_now * qs).sum())
        q_prev = float(qs[-1])
        k = int(ks[-1])
        if q_prev == 0.0 or s_k == 0.0:
            return t_mass, t_kmass, t_fmass
        if prev_sk is not None:
            if s_k >= prev_sk:
                # Contributions are not shrinking: the tail diverges (this is
                # how a too-small phi presents during bracketing).
                return math.inf, math.inf, math.inf
            ratio = s_k / prev_sk
            if s_k * ratio / (1.0 - ratio) < 1e-13:
                return t_mass, t_kmass, t_fmass
        prev_sk = s_k
    rate = phi / m
    remainders = [_stretched_tail_moment(p, alpha, rate, k, q_prev)
                  for p in (0.0, 1.0, alpha)]
    if all(r is not None for r in remainders):
        return (t_mass + remainders[0], t_kmass + remainders[1],
                t_fmass + remainders[2])
    if not force:
        return None  # incomplete gamma underflowed; retry with long chunking
    scale = ratio / (1.0 - ratio) if ratio < 1.0 else math.inf
    return (t_mass + float(qs.sum()) * scale,
            t_kmass + s_k * scale,
            t_fmass + float((f_now * qs).sum()) * scale)


def _stretched_tail_moment(p: float, alpha: float, rate: float, k0: int,
                           q0: float):
    """sum_{k > k0} k^p Q_k for Q_k ~ q0 (k0/k)^alpha exp(-rate (k^b - k0^b)/b).

    The continuous form telescopes to an upper incomplete gamma function;
    relative accuracy is O(1/k0). When the regularized gamma underflows, the
    exp(t0) prefactor cancels it symbolically and the value follows from the
    log-space continued fraction instead. Returns None only when neither
    route applies (the caller then falls back to direct summation).
    """
    from scipy.special import gammaincc, gammaln
    if q0 <= 0.0:
        return 0.0
    b = 1.0 - alpha
    cb = rate / b
    s = (p - alpha + 1.0) / b
    t0 = cb * k0 ** b
    reg = float(gammaincc(s, t0))
    if reg > 0.0:
        ln = (math.log(q0) + alpha * math.log(k0) + t0 - math.log(b)
              - s * math.log(cb) + float(gammaln(s)) + math.log(reg))
    else:
        ln_h = _ln_upper_gamma_cf(s, t0)
        if ln_h is None:
            return None
        ln = math.log(q0) + (p + 1.0) * math.log(k0) - math.log(b) + ln_h
    if ln > 700.0:
        return math.inf
    return math.exp(ln)


def _ln_upper_gamma_cf(s: float, x: float):
    """log of the continued-fraction factor h in Gamma(s, x) = x^s e^-x h.

    Lentz evaluation; converges for x well above s, which is exactly the
    regime where the regularized gamma underflows.
    """
    if x < s + 2.0:
        return None
    tiny = 1e-300
    b = x + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 400):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return math.log(h)
    return None


# ---------------------------------------------------------------------------
# Vertex degree distribution
# ---------------------------------------------------------------------------

class _VddEngine:
    """Caches the degree-indexed vectors for repeated evaluations at many phi."""

    def __init__(self, model: NpaModelSpec, opts: SolverOptions):
        w = model.weights
        inc = model.increments
        self.g = w.g
        self.m = inc.mean
        if self.m <= 0.0 and len(inc.probs) > 1:
            raise NoConvergence("mean increment arc count is zero")
        # The stored range is k_max; the computation range additionally covers
        # the increment support, the weight table, and the saturation degree
        # M + 1 so tail formulas start in pure-rule territory.
        k_need = max(opts.k_max, inc.max_arcs + 1, w.table_end() + 2)
        if w.M is not None:
            k_need = max(k_need, w.M + 1)
        self.k_top = k_need
        self.k_store = opts.k_max
        f_all = w.weights_upto(self.k_top)
        self.f = f_all[self.g:self.k_top + 1]
        fprev = np.zeros_like(self.f)
        fprev[1:] = f_all[self.g:self.k_top]
        self.fprev = fprev
        self.r = np.zeros_like(self.f)
        r_arr = inc.prob_array()
        self.r[inc.min_arcs - self.g:inc.min_arcs - self.g + len(r_arr)] = r_arr
        self.ks = np.arange(self.g, self.k_top + 1, dtype=np.float64)
        self.asym = w.asymptote()

    def distribution(self, phi: float) -> np.ndarray:
        den = phi + self.m * self.f
        return _affine_scan(self.r * phi / den, self.m * self.fprev / den)

    def tails(self, phi: float, q: np.ndarray) -> tuple[float, float, float]:
        return _tail_sums(self.asym, phi, self.m, float(q[-1]), self.k_top)

    def weighted_sum(self, phi: float) -> float:
        q = self.distribution(phi)
        _, _, t_f = self.tails(phi, q)
        s = float((self.f * q).sum())
        return s + t_f


def _fixed_point(engine: _VddEngine, opts: SolverOptions) -> float:
    """Solve phi = sum f_k Q_k(phi) by bracketing and bisection.

    Falls back to damped direct iteration when no sign change is found on a
    geometric grid, which only happens for degenerate weight setups.
    """
    def residual(phi: float) -> float:
        s = engine.weighted_sum(phi)
        return math.inf if math.isinf(s) else s - phi

    lo = 1e-9
    hi = 1.0
    r_lo = residual(lo)
    if r_lo <= 0.0:
        # Hunt downward for a positive residual.
        while lo > 1e-300 and r_lo <= 0.0:
            hi, lo = lo, lo * 1e-3
            r_lo = residual(lo)
        if r_lo <= 0.0:
            raise NoConvergence("no positive residual at any phi; cannot bracket")
    r_hi = residual(hi)
    doublings = 0
    while r_hi > 0.0:
        lo = hi
        hi *= 2.0
        doublings += 1
        if doublings > 200:
            return _damped_iteration(engine, opts)
        r_hi = residual(hi)
    for _ in range(opts.fp_max_iter):
        mid = 0.5 * (lo + hi)
        if residual(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= opts.fp_tolerance * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def _damped_iteration(engine: _VddEngine, opts: SolverOptions) -> float:
    phi = max(engine.f[engine.f > 0].min(), 1e-6) if np.any(engine.f > 0) else 1.0
    for _ in range(opts.fp_max_iter):
        if phi > 1e300:
            raise NoConvergence("mean weight diverges; no stationary regime")
        s = engine.weighted_sum(phi)
        if math.isinf(s):
            phi *= 2.0
            continue
        nxt = 0.5 * (phi + s)
        if abs(nxt - phi) <= opts.fp_tolerance * max(1.0, abs(nxt)):
            return nxt
        phi = nxt
    raise NoConvergence("damped iteration hit the cap without converging")


def solve_vdd(model: NpaModelSpec, opts: SolverOptions = SolverOptions()) -> VddSolution:
    """Solve the stationary vertex degree distribution of a growth model.

    Returns the distribution up to opts.k_max, the mean weight, the mean
    degree (tail-corrected; for finite M the summation naturally extends to
    the saturation degree M + 1), and the control residual against twice the
    mean increment arc count.
    """
    opts.check(model.g)
    engine = _VddEngine(model, opts)
    if engine.asym[0] == "power" and engine.asym[1] > 1.0:
        raise NoConvergence(
            "superlinear weights without a degree cap concentrate attachment "
            "on one vertex; no stationary distribution exists")
    phi = _fixed_point(engine, opts)
    q_full = engine.distribution(phi)
    t_mass, t_kmass, _ = engine.tails(phi, q_full)
    if math.isinf(t_mass):
        raise NoConvergence("tail diverges at the solved fixed point")

    stored = q_full[:engine.k_store - engine.g + 1]
    beyond = q_full[engine.k_store - engine.g + 1:]
    tail_mass = t_mass + float(beyond.sum())
    tail_kmass = t_kmass + float((engine.ks[engine.k_store - engine.g + 1:] * beyond).sum())

    truncation = 1.0 - float(stored.sum())
    if truncation < 0.0 and truncation > -1e-9:
        truncation = 0.0
    if truncation < 0.0:
        raise NoConvergence(f"stored mass exceeds 1 by {-truncation!r}")
    if truncation > opts.vdd_truncation_limit:
        raise TruncationTooSevere(
            f"truncated vertex mass {truncation:.3e} exceeds "
            f"{opts.vdd_truncation_limit:.1e}; raise k_max")

    mean_degree = float((engine.ks[:len(stored)] * stored).sum()) + tail_kmass
    q = DegreeDistribution(min_degree=engine.g, probs=stored,
                           truncation_mass=truncation)
    return VddSolution(q=q, mean_weight=phi, mean_degree=mean_degree,
                       control_residual=abs(mean_degree - 2.0 * engine.m),
                       tail_mass=tail_mass, tail_degree_mass=tail_kmass)


# ---------------------------------------------------------------------------
# Directed (arc) degree matrix
# ---------------------------------------------------------------------------

def _denominator_printed(l_deg: float, f_l: float, f_k: np.ndarray, m: float,
                         phi: float) -> np.ndarray:
    return m * (l_deg * f_l + m * f_k + m * f_l)


def _denominator_mean_weight(l_deg: float, f_l: float, f_k: np.ndarray, m: float,
                             phi: float) -> np.ndarray:
    return m * (phi + m * f_k + m * f_l)


# name -> (denominator, conserves_mass). The printed form does not conserve
# probability mass, so truncation cannot be told apart from its imbalance and
# the strict mass check only applies to conserving variants.
EDD_VARIANTS: dict[str, tuple[Callable, bool]] = {
    "printed": (_denominator_printed, False),
    "mean-weight": (_denominator_mean_weight, True),
}


def register_edd_variant(name: str, denominator: Callable,
                         conserves_mass: bool = True) -> None:
    """Register an alternative recurrence denominator for research comparison.

    denominator(l, f_l, f_k_vector, m, mean_weight) -> vector over k.
    """
    EDD_VARIANTS[name] = (denominator, conserves_mass)


def solve_arc_dd(model: NpaModelSpec, vdd: VddSolution,
                 opts: SolverOptions = SolverOptions()) -> EdgeDegreeMatrix:
    """Joint (tail degree, head degree) arc probabilities, row by row.

    Row l depends on row l - 1 and, within the row, on the previous column,
    so the computation runs with l ascending and k scanned as a first-order
    recurrence. Any term that refers to degree g - 1 contributes zero.
    Deterministic: equal inputs give bit-identical matrices.
    """
    opts.check(model.g)
    try:
        denom, conserves_mass = EDD_VARIANTS[opts.edd_variant]
    except KeyError:
        raise ValueError(f"unknown recurrence variant {opts.edd_variant!r}") from None
    g = model.g
    u = opts.u_max
    m = model.increments.mean
    phi = vdd.mean_weight
    n = u - g + 1

    f_all = model.weights.weights_upto(u + 1)
    f = f_all[g:u + 1]
    f_prev = np.zeros(n)
    f_prev[1:] = f_all[g:u]
    q_vdd = vdd.q.aligned(g, u)
    q_vdd_prev = np.zeros(n)
    q_vdd_prev[1:] = q_vdd[:-1]
    r = np.array([model.increments.prob(g + i) for i in range(n)])

    mat = np.zeros((n, n), dtype=np.float64)
    m2 = m * m
    for li in range(n):
        l_deg = g + li
        below = mat[li - 1] if li > 0 else np.zeros(n)
        den = denom(float(l_deg), float(f[li]), f, m, phi)
        # Guard cells where the variant's denominator vanishes (saturated
        # degrees under the printed form); their stationary share is set to 0.
        safe = np.where(den > 0.0, den, 1.0)
        const = (f_prev * l_deg * r[li] * q_vdd_prev + f_prev[li] * m2 * below) / safe
        carry = (f_prev * m2) / safe
        const[den <= 0.0] = 0.0
        carry[den <= 0.0] = 0.0
        mat[li] = _affine_scan(const, carry)

    total = float(mat.sum())
    deficit = 1.0 - total
    if conserves_mass:
        bound = _arc_truncation_bound(model, vdd, u)
        if deficit - bound > opts.edd_mass_tolerance:
            raise TruncationTooSevere(
                f"arc matrix misses {deficit:.3e} of mass at u_max = {u} but at "
                f"most {bound:.3e} is attributable to truncation; raise u_max")
    return EdgeDegreeMatrix(min_degree=g, entries=mat, kind="arc",
                            truncation_mass=deficit)


def _arc_truncation_bound(model: NpaModelSpec, vdd: VddSolution, u: int) -> float:
    """Upper bound on arc mass outside [g, u]^2 from the vertex distribution.

    A vertex of degree j carries at most j incoming and min(j, h) outgoing
    arc ends, so the truncated arc mass is at most
    sum_{j > u} (j + min(j, h)) Q_j / m.
    """
    m = model.increments.mean
    h = model.increments.max_arcs
    q = vdd.q
    if u < q.max_degree:
        ks = np.arange(u + 1, q.max_degree + 1, dtype=np.float64)
        probs = q.probs[u + 1 - q.min_degree:]
        stored = float(((ks + np.minimum(ks, h)) * probs).sum())
    else:
        stored = 0.0
    beyond = vdd.tail_degree_mass + h * vdd.tail_mass
    return (stored + beyond) / m


def symmetrize(q: EdgeDegreeMatrix) -> EdgeDegreeMatrix:
    """Edge matrix from an arc matrix: half the sum with its transpose."""
    if q.kind != "arc":
        raise ValueError("symmetrize expects an arc matrix")
    theta = 0.5 * (q.entries + q.entries.T)
    return EdgeDegreeMatrix(min_degree=q.min_degree, entries=theta, kind="edge",
                            truncation_mass=q.truncation_mass)


# ---------------------------------------------------------------------------
# Mixtures and complements
# ---------------------------------------------------------------------------

def mix_vdd(parts: Sequence[tuple[DegreeDistribution, float]]) -> DegreeDistribution:
    """Pointwise convex combination of degree distributions."""
    weights = [rho for _, rho in parts]
    if any(rho < 0.0 for rho in weights) or abs(math.fsum(weights) - 1.0) > 1e-12:
        raise WeightsNotConvex(f"fractions {weights} are not a convex combination")
    lo = min(q.min_degree for q, _ in parts)
    hi = max(q.max_degree for q, _ in parts)
    probs = np.zeros(hi - lo + 1, dtype=np.float64)
    trunc = 0.0
    for q, rho in parts:
        probs += rho * q.aligned(lo, hi)
        trunc += rho * q.truncation_mass
    return DegreeDistribution(min_degree=lo, probs=probs, truncation_mass=trunc)


def complement_vdd(q_total: DegreeDistribution, q_first: DegreeDistribution,
                   rho: float) -> DegreeDistribution:
    """Second component implied by a two-part mixture: (Q - rho Q') / (1 - rho).

    Small negative values (each within 1e-6) are clamped to zero and the
    result renormalized; larger negativity means the assumed rho is too big.
    """
    if not (0.0 < rho < 1.0):
        raise ValueError(f"rho = {rho!r} must lie strictly inside (0, 1)")
    lo = min(q_total.min_degree, q_first.min_degree)
    hi = max(q_total.max_degree, q_first.max_degree)
    vals = (q_total.aligned(lo, hi) - rho * q_first.aligned(lo, hi)) / (1.0 - rho)
    trunc = (q_total.truncation_mass - rho * q_first.truncation_mass) / (1.0 - rho)
    worst = float(min(vals.min(initial=0.0), trunc))
    if worst < -COMPLEMENT_CLAMP_TOL:
        raise InfeasibleComplement(
            f"complement probability {worst!r} is negative beyond tolerance; "
            f"rho = {rho} is too large")
    clamped = bool(np.any(vals < 0.0) or trunc < 0.0)
    if clamped:
        vals = np.maximum(vals, 0.0)
        trunc = max(trunc, 0.0)
        total = float(vals.sum()) + trunc
        if total <= 0.0:
            raise InfeasibleComplement("complement has no mass after clamping")
        vals = vals / total
        trunc = trunc / total
    return DegreeDistribution(min_degree=lo, probs=vals, truncation_mass=trunc)


def complement_mean(m: float, m_first: float, rho: float) -> float:
    """Mean increment count of the complement: (m - rho m') / (1 - rho)."""
    if not (0.0 < rho < 1.0):
        raise ValueError(f"rho = {rho!r} must lie strictly inside (0, 1)")
    result = (m - rho * m_first) / (1.0 - rho)
    if result <= 0.0:
        raise NonPositiveResult(
            f"complement mean {result!r} is not positive; rho = {rho} infeasible")
    return result


def edge_share(m_i: float, rho_i: float, m_total: float) -> float:
    """Fraction of all edges contributed by a component: m_i rho_i / m."""
    return m_i * rho_i / m_total


def mix_edd(parts: Sequence[tuple[EdgeDegreeMatrix, float, float]],
            m_total: float) -> EdgeDegreeMatrix:
    """Combine component edge matrices with edge-share weights.

    parts holds (matrix, m_i, rho_i); the weight of each component is
    gamma_i = m_i rho_i / m_total. The shares must sum to one, otherwise the
    supplied total mean is inconsistent with the components.
    """
    gammas = [edge_share(m_i, rho_i, m_total) for _, m_i, rho_i in parts]
    if abs(math.fsum(gammas) - 1.0) > GAMMA_TOL:
        raise GammaNotConvex(
            f"edge shares sum to {math.fsum(gammas)!r}; "
            f"m_total = {m_total} is inconsistent with the components")
    for matrix, _, _ in parts:
        if matrix.kind != "edge":
            raise ValueError("mix_edd expects edge matrices; symmetrize arcs first")
    lo = min(mx.min_degree for mx, _, _ in parts)
    hi = max(mx.max_degree for mx, _, _ in parts)
    size = hi - lo + 1
    entries = np.zeros((size, size), dtype=np.float64)
    trunc = 0.0
    for (mx, _, _), gamma in zip(parts, gammas):
        entries += gamma * mx.aligned(lo, hi)
        trunc += gamma * mx.truncation_mass
    return EdgeDegreeMatrix(min_degree=lo, entries=entries, kind="edge",
                            truncation_mass=trunc)


# ---------------------------------------------------------------------------
# CSV interchange
# ---------------------------------------------------------------------------

def vdd_to_csv(q: DegreeDistribution) -> str:
    lines = ["degree,probability"]
    lines.extend(f"{k},{p!r}" for k, p in q.to_rows())
    return "\n".join(lines) + "\n"


def vdd_from_csv(text: str) -> DegreeDistribution:
    """Read degree,probability rows; a middle count column is accepted too."""
    rows = [ln for ln in text.splitlines() if ln and not ln.startswith("degree")]
    degrees = []
    probs = []
    for ln in rows:
        parts = ln.split(",")
        degrees.append(int(parts[0]))
        probs.append(float(parts[-1]))
    lo = min(degrees)
    arr = np.zeros(max(degrees) - lo + 1)
    for k, p in zip(degrees, probs):
        arr[k - lo] = p
    return DegreeDistribution(min_degree=lo, probs=arr,
                              truncation_mass=max(0.0, 1.0 - float(arr.sum())))


def edd_to_csv(mx: EdgeDegreeMatrix) -> str:
    lines = ["l,k,probability"]
    lines.extend(f"{l},{k},{p!r}" for l, k, p in mx.to_rows())
    return "\n".join(lines) + "\n"


def edd_from_csv(text: str, kind: str = "edge") -> EdgeDegreeMatrix:
    rows = [ln for ln in text.splitlines() if ln and not ln.startswith("l,")]
    triplets = []
    for ln in rows:
        l_s, k_s, p_s = ln.split(",")
        triplets.append((int(l_s), int(k_s), float(p_s)))
    lo = min(min(l, k) for l, k, _ in triplets)
    hi = max(max(l, k) for l, k, _ in triplets)
    entries = np.zeros((hi - lo + 1, hi - lo + 1))
    for l, k, p in triplets:
        entries[l - lo, k - lo] = p
    return EdgeDegreeMatrix(min_degree=lo, entries=entries, kind=kind,
                            truncation_mass=1.0 - float(entries.sum()))
