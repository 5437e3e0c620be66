"""Primal-dual driver: the per-candidate multiplicative-weights loop, the
two-sided run over the designated vertex, and the binary search that yields
a cut plus (when iteration budgets allow) a certified lower bound.

A run certifies "optimum >= alpha / 2" only when it completed the full
theoretical iteration count with every step producing a verified dual
certificate; truncated runs may return cuts but never certify.  The step
size follows the algorithm's sqrt(ln n / T) with T the run's horizon, which
coincides with the theoretical assignment exactly when no truncation
happened (the only case in which certification is claimed).

Note on the iteration count: the certified-run analysis leans on the
weighted complete-graph Laplacian K, whose nonzero eigenvalues are at least
total^2 / (kappa n); this gives T = ceil(16 kappa^2 rho^2 n^2 ln n /
(alpha^2 total^4)).  An alternative analysis through a trace bound
(-I . X >= -Theta(kappa n^2 / total^2)) would instead need
T = Theta(kappa^2 rho^2 n^4 ln n / (alpha^2 total^4)), an extra n^2 factor,
because the identity penalizes the all-ones direction that K ignores.  It
is documented here for comparison and deliberately not implemented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hypergraph import (
    Cut,
    DirectedHypergraph,
    evaluate_cut,
    out_closure,
    reduce_to_digraph,
    reverse,
)
from .oracle import DualCertificate, OracleConfig, OracleFailure, run_oracle
from .sdpcore import GramState, Side, mat_K, min_eigenvalue, spectral_norm

__all__ = [
    "SolverConfig",
    "IterationRecord",
    "AlgorithmRun",
    "ProbeResult",
    "SolveResult",
    "theoretical_iterations",
    "run_algorithm1",
    "run_both_sides",
    "binary_search",
]


@dataclass(frozen=True)
class SolverConfig:
    """Binary-search geometry, iteration caps, and oracle constants."""

    t_cap: int = 5000
    eta_override: float | None = None
    alpha_lo: float | None = None
    alpha_hi: float | None = None
    search_ratio: float = 1.5
    side_policy: str = "both"  # both | in | out
    max_probes: int = 48
    oracle: OracleConfig = field(default_factory=OracleConfig)

    def __post_init__(self):
        if self.search_ratio <= 1.0:
            raise ValueError("search_ratio must exceed 1")
        if self.alpha_lo is not None and self.alpha_hi is not None:
            if self.alpha_lo > self.alpha_hi:
                raise ValueError("alpha_lo must not exceed alpha_hi")
        if self.side_policy not in ("both", "in", "out"):
            raise ValueError("side_policy must be both, in, or out")
        if self.t_cap < 1:
            raise ValueError("t_cap must be positive")

    def sides(self) -> tuple[str, ...]:
        if self.side_policy == "both":
            return ("in", "out")
        return (self.side_policy,)


@dataclass(frozen=True)
class IterationRecord:
    t: int
    case: str
    width: float
    m_norm: float
    log_k_dot_w: float


@dataclass
class AlgorithmRun:
    """Transcript of one multiplicative-weights run at a fixed alpha."""

    alpha: float
    side: str
    outcome: str  # cut | certified | aborted
    t_theory: int
    t_horizon: int
    iterations: int
    eta: float
    rho: float
    records: list[IterationRecord] = field(default_factory=list)
    certificates: list[DualCertificate] = field(default_factory=list)
    cut: Cut | None = None
    reason: str = ""
    mw_check: float | None = None  # lambda_min(Z + (alpha/2) K) when certified

    @property
    def lower_bound(self) -> float | None:
        return self.alpha / 2.0 if self.outcome == "certified" else None


def theoretical_iterations(alpha: float, h: DirectedHypergraph, cfg: OracleConfig) -> int:
    """T = ceil(16 kappa^2 rho^2 n^2 ln n / (alpha^2 w^4))."""
    rho = cfg.rho(alpha, h)
    n = h.n
    w4 = float(h.total_weight) ** 4
    return math.ceil(
        16.0 * h.kappa**2 * rho**2 * n**2 * math.log(n) / (alpha**2 * w4)
    )


def mw_state(
    m_sum: np.ndarray, eta: float, k: np.ndarray, vertex_weights
) -> tuple[GramState, float]:
    """Primal iterate X = exp(-eta sum M) / (K . exp(-eta sum M)).

    The embedding is centered before use: every consumed quantity is
    translation-invariant, and centering keeps the numerically huge
    all-ones component of W out of the floating-point evaluations.
    Returns the state and log(K . W).
    """
    lam, u = np.linalg.eigh(-eta * m_sum)
    shift = float(lam[-1])
    w_lam = np.exp(lam - shift)
    # K . W summed in the eigenbasis as nonnegative variance terms:
    # u_k^T K u_k = total^2 * Var_delta(u_k), immune to the cancellation
    # that the entrywise product suffers once the spread collapses
    w = np.asarray(vertex_weights, dtype=float)
    total = w.sum()
    delta = w / total
    mu = delta @ u
    quad = total * total * (delta @ (u - mu) ** 2)
    kdw_scaled = float(quad @ w_lam)
    if not kdw_scaled > 0.0:
        raise ArithmeticError("K . W underflowed to zero; state degenerate")
    vectors = u * np.sqrt(w_lam / kdw_scaled)
    vectors = vectors - vectors.mean(axis=0)
    state = GramState(vectors @ vectors.T, vectors, Side.ZERO_IN)
    kv = state.k_dot(vertex_weights)
    vectors = vectors / math.sqrt(kv)
    state = GramState(vectors @ vectors.T, vectors, Side.ZERO_IN)
    return state, shift + math.log(kdw_scaled)


def run_algorithm1(
    h: DirectedHypergraph,
    alpha: float,
    side: str | Side,
    cfg: SolverConfig | None = None,
    rng: np.random.Generator | None = None,
) -> AlgorithmRun:
    """One primal-dual run at candidate value alpha on one side of vertex 0."""
    cfg = cfg or SolverConfig()
    side_val = side.value if isinstance(side, Side) else side
    if side_val not in ("in", "out"):
        raise ValueError("side must be 'in' or 'out'")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if h.n < 2:
        raise ValueError("solver needs at least two vertices")
    if rng is None:
        rng = np.random.default_rng(cfg.oracle.rng_seed)

    h_run = h if side_val == "in" else reverse(h)
    rd = reduce_to_digraph(h_run)
    n = h.n
    k = mat_K(h.vertex_weights)
    rho = cfg.oracle.rho(alpha, h)
    t_theory = theoretical_iterations(alpha, h, cfg.oracle)
    t_horizon = min(t_theory, cfg.t_cap)
    eta = cfg.eta_override or math.sqrt(math.log(n) / t_horizon)

    run = AlgorithmRun(
        alpha=alpha,
        side=side_val,
        outcome="aborted",
        t_theory=t_theory,
        t_horizon=t_horizon,
        iterations=0,
        eta=eta,
        rho=rho,
    )

    m_sum = np.zeros((n, n))
    for t in range(1, t_horizon + 1):
        state, log_kdw = mw_state(m_sum, eta, k, h.vertex_weights)

        try:
            outcome = run_oracle(alpha, state, h_run, cfg.oracle, rng, rd)
        except OracleFailure as exc:
            run.iterations = t - 1
            run.reason = f"oracle: {exc}"
            return run

        if outcome.kind == "cut":
            assert outcome.cut is not None
            subset = outcome.cut.subset
            if side_val == "out":
                subset = frozenset(range(n)) - subset
            run.cut = evaluate_cut(h, subset)
            run.records.append(IterationRecord(t, outcome.case, 0.0, 0.0, log_kdw))
            run.iterations = t
            run.outcome = "cut"
            return run

        cert = outcome.dual
        assert cert is not None
        m_t = -(1.0 / rho) * cert.residual_matrix(k)
        m_norm = spectral_norm(m_t)
        run.records.append(
            IterationRecord(t, outcome.case, cert.width, m_norm, log_kdw)
        )
        run.certificates.append(cert)
        run.iterations = t
        if m_norm > 1.0 + 1e-6:
            run.reason = f"update norm {m_norm:.6g} exceeds 1 (width {cert.width:.6g} vs rho {rho:.6g})"
            return run
        m_sum += m_t

    if t_horizon < t_theory:
        run.reason = f"t_cap truncated run at {t_horizon} < {t_theory}"
        return run

    z_bar = (rho / t_theory) * m_sum
    check = min_eigenvalue(z_bar + (alpha / 2.0) * k)
    run.mw_check = check
    if check < -1e-6 * max(1.0, rho):
        run.reason = f"regret check failed: lambda_min {check:.3e}"
        return run
    run.outcome = "certified"
    return run


@dataclass
class ProbeResult:
    alpha: float
    runs: dict[str, AlgorithmRun]

    @property
    def best_cut(self) -> Cut | None:
        cuts = [r.cut for r in self.runs.values() if r.cut is not None]
        if not cuts:
            return None
        return min(cuts, key=lambda c: c.sparsity)

    @property
    def certified(self) -> bool:
        return all(r.outcome == "certified" for r in self.runs.values())

    @property
    def found_cut(self) -> bool:
        return any(r.outcome == "cut" for r in self.runs.values())


def run_both_sides(
    h: DirectedHypergraph,
    alpha: float,
    cfg: SolverConfig | None = None,
    rng: np.random.Generator | None = None,
) -> ProbeResult:
    """Run every side of the side policy at one alpha; a lower bound needs
    all sides to certify, a cut from any side counts."""
    cfg = cfg or SolverConfig()
    if rng is None:
        rng = np.random.default_rng(cfg.oracle.rng_seed)
    runs = {}
    for side in cfg.sides():
        runs[side] = run_algorithm1(h, alpha, side, cfg, rng)
    return ProbeResult(alpha, runs)


@dataclass
class SolveResult:
    best_cut: Cut | None
    lower_bound: float | None
    probes: list[ProbeResult]
    alpha_lo: float
    alpha_hi: float
    baseline_cut: Cut | None = None

    @property
    def ratio(self) -> float | None:
        if self.best_cut is None or not self.lower_bound:
            return None
        return float(self.best_cut.sparsity) / self.lower_bound


def _singleton_baseline(h: DirectedHypergraph) -> Cut:
    """Best of the singleton cuts and zero-cut closures.

    A zero out-cut exists iff some vertex's out-closure is proper; checking
    those up front means a sparsity-0 cut is never missed by the bracketed
    search (whose floor assumes positive sparsity).
    """
    best: Cut | None = None
    for v in range(h.n):
        candidates = [{v}, set(range(h.n)) - {v}, out_closure(h, {v})]
        for subset in candidates:
            if not subset or len(subset) == h.n:
                continue
            cut = evaluate_cut(h, subset)
            if best is None or cut.sparsity < best.sparsity:
                best = cut
    assert best is not None
    return best


def binary_search(
    h: DirectedHypergraph,
    cfg: SolverConfig | None = None,
    rng: np.random.Generator | None = None,
) -> SolveResult:
    """Geometric search over alpha, keeping the best cut seen and the
    largest certified lower bound.

    Probes that find a cut move the upper end down; fully certified probes
    move the lower end up and raise the certified bound; aborted probes move
    the lower end up without certifying anything.
    """
    cfg = cfg or SolverConfig()
    if h.n < 2:
        raise ValueError("solver needs at least two vertices")
    if rng is None:
        rng = np.random.default_rng(cfg.oracle.rng_seed)

    baseline = _singleton_baseline(h)
    best_cut = baseline
    probes: list[ProbeResult] = []
    lower_bound: float | None = None

    positive_w = [float(e.weight) for e in h.edges if e.weight > 0]
    total = float(h.total_weight)
    if cfg.alpha_hi is not None:
        hi = cfg.alpha_hi
    else:
        hi = 4.0 * float(baseline.sparsity)
    if cfg.alpha_lo is not None:
        lo = cfg.alpha_lo
    else:
        lo = 2.0 * min(positive_w) / total**2 if positive_w else 0.0

    if best_cut.sparsity == 0 or hi <= 0 or not positive_w:
        return SolveResult(best_cut, None, [], max(lo, 0.0), max(hi, 0.0), baseline)
    lo = min(lo, hi / cfg.search_ratio**2)

    while hi > lo * cfg.search_ratio and len(probes) < cfg.max_probes:
        alpha = math.sqrt(lo * hi)
        probe = run_both_sides(h, alpha, cfg, rng)
        probes.append(probe)
        if probe.found_cut:
            cut = probe.best_cut
            assert cut is not None
            if cut.sparsity < best_cut.sparsity:
                best_cut = cut
            hi = alpha
            if best_cut.sparsity == 0:
                break
        else:
            if probe.certified and cfg.side_policy == "both":
                lower_bound = max(lower_bound or 0.0, alpha / 2.0)
            lo = alpha

    return SolveResult(best_cut, lower_bound, probes, lo, hi, baseline)
