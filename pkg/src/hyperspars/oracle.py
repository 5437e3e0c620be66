"""The per-candidate oracle of the primal-dual loop.

Given a normalized Gram state and a candidate value alpha, return either a
sparse cut or a dual certificate (z, triangle weights, flow matrix) of
bounded width.  Dispatch: if some ball of radius 1/sqrt(8 w) holds a quarter
of the vertex weight the vectors are concentrated (Case 1, pure max-flow);
otherwise they are well spread (Case 2: direction sampling, median split,
max-flow, and a violated-path fallback).

Cut sparsities and certificate bullets are re-verified numerically on every
run; a breach raises instead of returning a silently wrong outcome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import flownet
from .flownet import FlowAssignment, build_flow_instance, decompose, lift_flow, max_flow
from .hypergraph import (
    Cut,
    DirectedHypergraph,
    ReducedDigraph,
    evaluate_cut,
    reduce_to_digraph,
    reverse,
)
from .sdpcore import (
    GramState,
    Side,
    TriangleId,
    mat_K,
    spectral_norm,
)

__all__ = [
    "OracleConfig",
    "OracleFailure",
    "OracleInvariantError",
    "InconsistentStateError",
    "DualCertificate",
    "OracleOutcome",
    "run_oracle",
    "ball",
    "case1",
    "preprocess_wellspread",
    "direction_split",
    "case2",
    "find_violated_path",
    "certificate_check",
    "certificate_hypergraph",
    "log2_skew",
    "log2_weight",
]


class OracleFailure(RuntimeError):
    """Case 2 exhausted its retry budget; carries diagnostics."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class OracleInvariantError(OracleFailure):
    """An outcome failed its own guarantee (cut ratio or certificate)."""


class InconsistentStateError(ValueError):
    """Input state contradicts the K . X = 1 normalization."""


def log2_skew(h: DirectedHypergraph) -> float:
    """log2(kappa * n) floored at 1; the log factor of the ratio bounds."""
    return max(1.0, math.log2(h.kappa * h.n))


def log2_weight(h: DirectedHypergraph) -> float:
    """log2(total weight) floored at 1; the log factor of Case-2 capacities."""
    return max(1.0, math.log2(h.total_weight))


@dataclass(frozen=True)
class OracleConfig:
    """Explicit values for every constant the analysis leaves inside O(.).

    beta is derived (32 c_path / (9 mu s_viol c_frac)) so the Case-2 capacity
    coefficient stays consistent with the violated-path parameters.
    """

    c_ball: float = 0.25
    cap_c1: float = 8.0
    c_A: float = 64.0
    c_A2: float | None = None  # default: the provable 4 * beta
    c_rho: float = 16.0
    c_D: float = flownet.DEFAULT_DEMAND_NORM_CONST
    sigma: float = 1.0 / 48.0
    c_frac: float = 1.0 / 128.0
    s_viol: float = 0.25
    c_path: float = 4.0
    mu: float = 1.0
    c_T: float = 6.0
    dual_scale: float = 1.25
    n_dirs: int | None = None
    rng_seed: int = 0
    tol_norm: float = 1e-6

    @property
    def beta(self) -> float:
        return 32.0 * self.c_path / (9.0 * self.mu * self.s_viol * self.c_frac)

    @property
    def eta_stretch(self) -> float:
        # equals mu * s_viol / (4 c_path) by the choice of beta
        return 8.0 / (9.0 * self.c_frac * self.beta)

    @property
    def c_A2_effective(self) -> float:
        # the well-spread flow case guarantees sparsity below
        # 4 beta sqrt(log) alpha; a fixed override tightens the assert
        return self.c_A2 if self.c_A2 is not None else 4.0 * self.beta

    def n_dirs_for(self, n: int) -> int:
        if self.n_dirs is not None:
            return self.n_dirs
        return 8 * math.ceil(math.log2(max(n, 2)))

    def rho(self, alpha: float, h: DirectedHypergraph) -> float:
        """Width bound fed to the multiplicative-weights loop."""
        return self.c_rho * alpha * h.total_weight**2 * math.sqrt(log2_skew(h))

    def ratio_bound(self, alpha: float, h: DirectedHypergraph, case: str) -> float:
        if case.startswith("1"):
            return self.c_A * alpha
        return self.c_A2_effective * math.sqrt(log2_skew(h)) * alpha

    def path_cap(self, h: DirectedHypergraph) -> int:
        return math.ceil((2.0 * self.c_path / self.mu) * math.sqrt(log2_weight(h)))


@dataclass(frozen=True)
class DualCertificate:
    """Dual variables (z, f_p) plus the flow matrix, as checkable data.

    ``flow`` is the capacity-respecting hypergraph flow backing F, or None
    when F = 0 (violated-path case).  ``width`` is the observed spectral
    norm of sum f_p T_p + z K - F.
    """

    z: float
    triangle_weights: dict[TriangleId, float]
    flow: FlowAssignment | None
    width: float

    def flow_matrix_dense(self, n: int, zero: int = 0) -> np.ndarray:
        if self.flow is None:
            return np.zeros((n, n))
        return flownet.flow_matrix(self.flow, n, Side.ZERO_IN, zero)

    def residual_matrix(self, k: np.ndarray, zero: int = 0) -> np.ndarray:
        n = k.shape[0]
        m = flownet.triangle_matrix_sum(self.triangle_weights, n)
        m += self.z * k
        m -= self.flow_matrix_dense(n, zero)
        return m


@dataclass(frozen=True)
class OracleOutcome:
    """Tagged union: a Cut or a DualCertificate, plus run diagnostics."""

    kind: str  # "cut" | "dual"
    cut: Cut | None = None
    dual: DualCertificate | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def case(self) -> str:
        return self.diagnostics.get("case", "?")


def ball(state: GramState, i: int, radius: float) -> frozenset[int]:
    """Vertices within squared distance radius^2 of vertex i."""
    d2 = state.pairwise_dist2()
    return frozenset(int(j) for j in np.flatnonzero(d2[i] <= radius * radius))


def _ball_weights(d2: np.ndarray, omega: np.ndarray, radius2: float) -> np.ndarray:
    return (d2 <= radius2) @ omega


def run_oracle(
    alpha: float,
    state: GramState,
    h: DirectedHypergraph,
    cfg: OracleConfig | None = None,
    rng: np.random.Generator | None = None,
    rd: ReducedDigraph | None = None,
) -> OracleOutcome:
    """Dispatch on vector concentration and run the matching case.

    Raises OracleFailure when Case 2 exhausts its retries, and
    OracleInvariantError when an outcome fails its own guarantee.
    """
    cfg = cfg or OracleConfig()
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)

    if state.side is Side.ZERO_OUT:
        inner = GramState(state.x, state.vectors, Side.ZERO_IN)
        outcome = run_oracle(alpha, inner, reverse(h), cfg, rng, rd=None)
        if outcome.kind == "cut":
            assert outcome.cut is not None
            flipped = frozenset(range(h.n)) - outcome.cut.subset
            cut = evaluate_cut(h, flipped)
            diag = dict(outcome.diagnostics, side="out")
            return OracleOutcome("cut", cut=cut, diagnostics=diag)
        diag = dict(outcome.diagnostics, side="out")
        return OracleOutcome("dual", dual=outcome.dual, diagnostics=diag)

    omega = np.array(h.vertex_weights, dtype=float)
    total = float(h.total_weight)
    kdot = state.k_dot(h.vertex_weights)
    if abs(kdot - 1.0) > cfg.tol_norm:
        raise ValueError(f"state not normalized: K.X = {kdot:.9g}")

    if rd is None:
        rd = reduce_to_digraph(h)

    d2 = state.pairwise_dist2()
    radius2 = 1.0 / (8.0 * total * total)
    ball_w = _ball_weights(d2, omega, radius2)
    i0 = int(np.argmax(ball_w))
    if ball_w[i0] >= cfg.c_ball * total:
        return case1(alpha, state, h, cfg, i0=i0, rd=rd)
    return case2(alpha, state, h, cfg, rng=rng, rd=rd)


def _cut_outcome(
    alpha: float,
    h: DirectedHypergraph,
    subset: Iterable[int],
    cfg: OracleConfig,
    case: str,
    extra: dict,
) -> OracleOutcome:
    members = frozenset(subset)
    if not members or len(members) == h.n:
        raise OracleInvariantError(
            f"case {case} produced an improper cut ({len(members)} of {h.n})",
            dict(extra, case=case),
        )
    cut = evaluate_cut(h, members)
    bound = cfg.ratio_bound(alpha, h, case)
    diag = dict(extra, case=case, side="in", ratio_bound=bound)
    if float(cut.sparsity) > bound * (1 + 1e-9):
        raise OracleInvariantError(
            f"case {case} cut sparsity {float(cut.sparsity):.6g} exceeds "
            f"ratio bound {bound:.6g}",
            dict(diag, sparsity=float(cut.sparsity)),
        )
    return OracleOutcome("cut", cut=cut, diagnostics=diag)


def _dual_outcome(
    alpha: float,
    state: GramState,
    h: DirectedHypergraph,
    cfg: OracleConfig,
    triangles: dict[TriangleId, float],
    flow: FlowAssignment | None,
    case: str,
    extra: dict,
) -> OracleOutcome:
    k = mat_K(h.vertex_weights)
    cert = DualCertificate(alpha, triangles, flow, 0.0)
    width = spectral_norm(cert.residual_matrix(k))
    cert = DualCertificate(alpha, triangles, flow, width)
    rho = cfg.rho(alpha, h)
    diag = dict(extra, case=case, side="in", rho=rho)
    ok, report = certificate_check(cert, alpha, state, h, rho)
    if not ok:
        if report["first_failure"] == "width_bound":
            # the dual data itself is valid, it is just too wide for the
            # configured loop width; no progress at this alpha
            raise OracleFailure(
                f"case {case} certificate width {width:.6g} exceeds rho {rho:.6g}",
                dict(diag, report=report),
            )
        raise OracleInvariantError(
            f"case {case} certificate failed: {report['first_failure']}",
            dict(diag, report=report),
        )
    return OracleOutcome("dual", dual=cert, diagnostics=dict(diag, report=report))


def _scaled_flow_dual(
    alpha: float,
    state: GramState,
    h: DirectedHypergraph,
    cfg: OracleConfig,
    fa: FlowAssignment,
    dec,
    case: str,
    extra: dict,
) -> OracleOutcome:
    """Dual outcome from a saturating flow, scaled down to what the demand
    bound needs: D . X barely above alpha keeps the certificate width small
    without touching any other bullet (scaling preserves them all)."""
    d_dot_x = sum(f * state.ddist(i, j) for (i, j), f in dec.demand.items())
    extra = dict(extra, d_dot_x=d_dot_x)
    scale = 1.0
    if d_dot_x > alpha:
        scale = min(1.0, cfg.dual_scale * alpha / d_dot_x)
    if scale < 1.0:
        fa = FlowAssignment(tuple((e, i, j, f * scale) for e, i, j, f in fa))
        triangles = {tri: f * scale for tri, f in dec.triangle_weights.items()}
    else:
        triangles = dict(dec.triangle_weights)
    extra["flow_scale"] = scale
    return _dual_outcome(alpha, state, h, cfg, triangles, fa, case, extra)


def case1(
    alpha: float,
    state: GramState,
    h: DirectedHypergraph,
    cfg: OracleConfig,
    i0: int | None = None,
    rd: ReducedDigraph | None = None,
) -> OracleOutcome:
    """Concentrated-vectors case: one max-flow decides cut versus dual."""
    omega = np.array(h.vertex_weights, dtype=float)
    total = float(h.total_weight)
    d2 = state.pairwise_dist2()
    radius2 = 1.0 / (8.0 * total * total)
    if i0 is None:
        i0 = int(np.argmax(_ball_weights(d2, omega, radius2)))
    in_ball = d2[i0] <= radius2
    if _ball_weights(d2, omega, radius2)[i0] < cfg.c_ball * total:
        raise ValueError("case1 precondition: no concentrated ball")
    left = [int(v) for v in np.flatnonzero(in_ball)]
    right = [int(v) for v in np.flatnonzero(~in_ball)]
    if not right:
        raise InconsistentStateError("ball covers all weight despite K.X = 1")
    w_l = float(omega[left].sum())
    w_r = float(omega[right].sum())
    gamma = w_r / w_l

    h0 = np.einsum("ij,ij->i", state.vectors - state.vectors[0], state.vectors - state.vectors[0])
    q_l = gamma * float(omega[left] @ h0[left])
    q_r = float(omega[right] @ h0[right])
    forward = q_l <= q_r

    c = cfg.cap_c1 * total * alpha
    left_caps = {i: c * gamma * omega[i] for i in left}
    right_caps = {j: c * omega[j] for j in right}
    if forward:
        sources, sinks = left_caps, right_caps
    else:
        sources, sinks = right_caps, left_caps

    rd = rd or reduce_to_digraph(h)
    inst = build_flow_instance(rd, sources, sinks)
    res = max_flow(inst)
    total_cap = inst.total_source_cap
    extra = {
        "i0": i0,
        "gamma": gamma,
        "forward": forward,
        "flow_value": res.value,
        "source_cap": total_cap,
    }

    if res.value < total_cap * (1.0 - 1e-9):
        subset = [v for v in range(h.n) if res.reachable[v]]
        return _cut_outcome(alpha, h, subset, cfg, "1A", extra)

    fa = lift_flow(res, inst)
    dec = decompose(fa, sources.keys(), sinks.keys())
    extra["dropped_cycle_mass"] = dec.dropped_cycle_mass
    return _scaled_flow_dual(alpha, state, h, cfg, fa, dec, "1B", extra)


def preprocess_wellspread(
    state: GramState, h: DirectedHypergraph, cfg: OracleConfig | None = None
) -> tuple[frozenset[int], int]:
    """Locate the heavy medium-radius ball S = B(i0, 3/w) of the spread case.

    Guarantees (checked): weight(S) >= w/2, all of S within squared distance
    9/w^2 of i0, and pairwise spread over S at least 1/128.
    """
    cfg = cfg or OracleConfig()
    omega = np.array(h.vertex_weights, dtype=float)
    total = float(h.total_weight)
    d2 = state.pairwise_dist2()
    small2 = 1.0 / (8.0 * total * total)
    if _ball_weights(d2, omega, small2).max() >= cfg.c_ball * total:
        raise ValueError("preprocess requires the well-spread case")
    radius2 = 9.0 / (total * total)
    ball_w = _ball_weights(d2, omega, radius2)
    i0 = int(np.argmax(ball_w))
    if ball_w[i0] < total / 2.0:
        raise InconsistentStateError(
            "no heavy medium ball; state violates K.X = 1"
        )
    members = np.flatnonzero(d2[i0] <= radius2)
    s = frozenset(int(v) for v in members)
    sub = d2[np.ix_(members, members)]
    spread = 0.5 * float(omega[members] @ sub @ omega[members])
    if spread < 1.0 / 128.0 - 1e-9:
        raise InconsistentStateError(f"spread {spread:.6g} below guaranteed 1/128")
    return s, i0


def _rescaled(state: GramState, total: float, i0: int) -> np.ndarray:
    return (total / 3.0) * (state.vectors - state.vectors[i0])


def _weighted_median(values: np.ndarray, weights: np.ndarray) -> float:
    order = np.argsort(values, kind="stable")
    cum = np.cumsum(weights[order])
    half = cum[-1] / 2.0
    idx = int(np.searchsorted(cum, half))
    return float(values[order[min(idx, len(order) - 1)]])


def _direction_split_once(
    vhat: np.ndarray,
    omega: np.ndarray,
    members: np.ndarray,
    u: np.ndarray,
    cfg: OracleConfig,
    total: float,
) -> tuple[np.ndarray, list[int], list[int]] | None:
    """One direction attempt: sweep for stretched L0/R0, then median split."""
    proj = vhat[members] @ u
    order = np.argsort(proj, kind="stable")
    sorted_members = members[order]
    sorted_proj = proj[order]
    w_sorted = omega[sorted_members]
    target = cfg.c_frac * total
    stretch = cfg.sigma / math.sqrt(total)

    cum = np.cumsum(w_sorted)
    k_lo = int(np.searchsorted(cum, target))
    if k_lo >= len(sorted_members):
        return None
    cum_rev = np.cumsum(w_sorted[::-1])
    k_hi = int(np.searchsorted(cum_rev, target))
    if k_hi >= len(sorted_members):
        return None
    l0 = sorted_members[: k_lo + 1]
    r0 = sorted_members[len(sorted_members) - k_hi - 1 :]
    if sorted_proj[len(sorted_members) - k_hi - 1] - sorted_proj[k_lo] < stretch:
        return None

    dist0 = np.sqrt(
        np.einsum("ij,ij->i", vhat - vhat[0], vhat - vhat[0])
    )
    r_med = _weighted_median(dist0[l0], omega[l0])
    l0_minus = l0[dist0[l0] <= r_med]
    l0_plus = l0[dist0[l0] >= r_med]
    r0_minus = r0[dist0[r0] <= r_med]
    r0_plus = r0[dist0[r0] >= r_med]
    w_r0_plus = omega[r0_plus].sum()
    w_r0_minus = omega[r0_minus].sum()
    if w_r0_plus >= w_r0_minus and len(r0_plus) and len(l0_minus):
        left, right, u_eff = l0_minus, r0_plus, u
    elif len(r0_minus) and len(l0_plus):
        left, right, u_eff = r0_minus, l0_plus, -u
    else:
        return None
    return u_eff, [int(v) for v in left], [int(v) for v in right]


def direction_split(
    state: GramState,
    h: DirectedHypergraph,
    s: frozenset[int],
    i0: int,
    cfg: OracleConfig,
    rng: np.random.Generator,
) -> tuple[np.ndarray, list[int], list[int]]:
    """Sample directions until a stretched, median-split (L, R) appears.

    Every (i, j) in L x R satisfies the projection stretch along the
    returned direction and d(i, j) >= |v_i - v_j|^2.
    """
    omega = np.array(h.vertex_weights, dtype=float)
    total = float(h.total_weight)
    vhat = _rescaled(state, total, i0)
    members = np.array(sorted(s), dtype=int)
    for _ in range(cfg.n_dirs_for(h.n)):
        u = _random_direction(rng, vhat.shape[1])
        got = _direction_split_once(vhat, omega, members, u, cfg, total)
        if got is not None:
            return got
    raise OracleFailure(
        "no stretched direction found", {"n_dirs": cfg.n_dirs_for(h.n)}
    )


def _random_direction(rng: np.random.Generator, dim: int) -> np.ndarray:
    while True:
        u = rng.standard_normal(dim)
        norm = float(np.linalg.norm(u))
        if norm > 1e-12:
            return u / norm


def case2(
    alpha: float,
    state: GramState,
    h: DirectedHypergraph,
    cfg: OracleConfig,
    rng: np.random.Generator | None = None,
    rd: ReducedDigraph | None = None,
) -> OracleOutcome:
    """Well-spread case: sampled direction, flow, then cut / dual / path."""
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    omega = np.array(h.vertex_weights, dtype=float)
    total = float(h.total_weight)
    s, i0 = preprocess_wellspread(state, h, cfg)
    vhat = _rescaled(state, total, i0)
    members = np.array(sorted(s), dtype=int)
    rd = rd or reduce_to_digraph(h)

    sqlog = math.sqrt(log2_weight(h))
    cap_coeff = cfg.beta * total * sqlog * alpha
    threshold = (cfg.c_frac * cfg.beta / 4.0) * total * total * sqlog * alpha

    attempts = cfg.n_dirs_for(h.n)
    last_reason = "no stretched direction found"
    best_cut: OracleOutcome | None = None
    for _ in range(attempts):
        u = _random_direction(rng, vhat.shape[1])
        got = _direction_split_once(vhat, omega, members, u, cfg, total)
        if got is None:
            continue
        u_eff, left, right = got
        sources = {i: cap_coeff * omega[i] for i in left}
        sinks = {j: cap_coeff * omega[j] for j in right}
        inst = build_flow_instance(rd, sources, sinks)
        res = max_flow(inst)
        extra = {
            "i0": i0,
            "flow_value": res.value,
            "threshold": threshold,
            "left_size": len(left),
            "right_size": len(right),
        }

        if res.value < threshold:
            # keep scanning directions for the sparsest Case-A cut; any
            # single one already satisfies the contract
            subset = [v for v in range(h.n) if res.reachable[v]]
            inside = float(omega[subset].sum())
            extra["side_weights"] = (inside, total - inside)
            outcome = _cut_outcome(alpha, h, subset, cfg, "2A", extra)
            if best_cut is None or outcome.cut.sparsity < best_cut.cut.sparsity:
                best_cut = outcome
            continue

        if best_cut is not None:
            return best_cut

        fa = lift_flow(res, inst)
        dec = decompose(fa, sources.keys(), sinks.keys())
        d_dot_x = sum(f * state.ddist(i, j) for (i, j), f in dec.demand.items())
        extra["d_dot_x"] = d_dot_x
        extra["dropped_cycle_mass"] = dec.dropped_cycle_mass
        if d_dot_x >= alpha * (1 - 1e-9):
            return _scaled_flow_dual(alpha, state, h, cfg, fa, dec, "2B", extra)

        # at least half the flow sits on short rescaled pairs (Markov over
        # the demand given d_dot_x < alpha and flow >= threshold), which is
        # exactly the stretched-pair supply the path search feeds on
        eta_cut = cfg.eta_stretch / math.sqrt(log2_weight(h))
        filtered = sum(
            f
            for (i, j), f in dec.demand.items()
            if float((vhat[i] - vhat[j]) @ (vhat[i] - vhat[j])) <= eta_cut * (1 + 1e-9)
        )
        extra["markov_filtered_fraction"] = filtered / max(dec.total_demand(), 1e-300)
        if filtered < dec.total_demand() * 0.5 * (1 - 1e-9):
            raise OracleInvariantError(
                "short-pair flow mass below half despite small demand value",
                dict(extra, case="2C"),
            )

        path = find_violated_path(vhat, omega, dec.demand, u_eff, cfg, h)
        if path is None:
            last_reason = "no violated path for this direction"
            continue
        triangles = path_triangles(path)
        f_val = total * total * alpha / (9.0 * cfg.s_viol)
        weights = {tri: f_val for tri in triangles}
        extra["path"] = path
        return _dual_outcome(alpha, state, h, cfg, weights, None, "2C", extra)

    if best_cut is not None:
        return best_cut
    raise OracleFailure(last_reason, {"attempts": attempts, "alpha": alpha})


def path_triangles(path: list[int]) -> list[TriangleId]:
    """Triangles anchored at the path start: tri({i0, i_{j+1}}; mid i_j)."""
    return [
        TriangleId.make(path[0], path[a + 1], path[a]) for a in range(1, len(path) - 1)
    ]


def path_violation(vhat: np.ndarray, path: list[int]) -> float:
    """sum of hop distances minus endpoint distance, in rescaled units."""
    hops = 0.0
    for a in range(len(path) - 1):
        d = vhat[path[a]] - vhat[path[a + 1]]
        hops += float(d @ d)
    d = vhat[path[0]] - vhat[path[-1]]
    return hops - float(d @ d)


def find_violated_path(
    vhat: np.ndarray,
    omega: np.ndarray,
    demand: Mapping[tuple[int, int], float],
    u_eff: np.ndarray,
    cfg: OracleConfig,
    h: DirectedHypergraph,
) -> list[int] | None:
    """Search for a short path whose l2^2 path inequality fails by s_viol.

    A direct triple scan runs first; then chains of stretched hops (small
    rescaled distance, positive projection step along u_eff) are grown with
    a bounded-hop shortest-path pass.  Any candidate is accepted only after
    direct evaluation of its violation.
    """
    n = vhat.shape[0]
    s_target = cfg.s_viol
    sq = np.einsum("ij,ij->i", vhat, vhat)
    q = sq[:, None] + sq[None, :] - 2.0 * (vhat @ vhat.T)
    np.fill_diagonal(q, 0.0)
    q = np.maximum(q, 0.0)

    # 1) triple scan
    best = (0.0, None)
    for mid in range(n):
        slack = q[:, mid][:, None] + q[mid, :][None, :] - q
        slack[mid, :] = np.inf
        slack[:, mid] = np.inf
        np.fill_diagonal(slack, np.inf)
        a, b = np.unravel_index(int(np.argmin(slack)), slack.shape)
        val = float(slack[a, b])
        if val < best[0]:
            best = (val, [int(a), mid, int(b)])
    if best[1] is not None and best[0] <= -s_target:
        path = best[1]
        if path_violation(vhat, path) <= -s_target:
            return path

    # 2) chained stretched hops (demand support first, then all pairs)
    total = float(omega.sum())
    stretch = cfg.sigma / math.sqrt(total)
    eta_cut = cfg.eta_stretch / math.sqrt(log2_weight(h))
    proj = vhat @ u_eff
    cap = max(2, cfg.path_cap(h))

    def hop_arcs(restrict_to_demand: bool) -> list[tuple[int, int]]:
        arcs = []
        if restrict_to_demand:
            pairs = [(i, j) for (i, j), f in demand.items() if f > 0]
        else:
            pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
        for i, j in pairs:
            if q[i, j] <= eta_cut and proj[j] - proj[i] >= stretch * (1 - 1e-12):
                arcs.append((i, j))
        return arcs

    for restrict in (True, False):
        arcs = hop_arcs(restrict)
        if not arcs:
            continue
        path = _best_chain(q, arcs, proj, cap, s_target)
        if path is not None and path_violation(vhat, path) <= -s_target:
            return path
    return None


def _best_chain(
    q: np.ndarray,
    arcs: list[tuple[int, int]],
    proj: np.ndarray,
    cap: int,
    s_target: float,
) -> list[int] | None:
    """Hop-capped shortest hop-sums on the stretched-hop DAG.

    Arcs strictly increase the projection, so processing vertices in
    projection order gives exact single-pass shortest paths per start; a
    violated path shows up as hop-sum minus endpoint distance <= -s_target
    within the hop cap.
    """
    adj: dict[int, list[int]] = {}
    for i, j in arcs:
        adj.setdefault(i, []).append(j)
    order = sorted({v for arc in arcs for v in arc}, key=lambda v: (proj[v], v))
    starts = sorted(adj)
    best_viol = -s_target
    best_path: list[int] | None = None
    for start in starts:
        dist = {start: 0.0}
        hops = {start: 0}
        parent: dict[int, int] = {}
        for u in order:
            if u not in dist or u not in adj:
                continue
            du = dist[u]
            hu = hops[u]
            if hu >= cap:
                continue
            for v in adj[u]:
                nd = du + q[u, v]
                if nd < dist.get(v, math.inf) - 1e-18:
                    dist[v] = nd
                    hops[v] = hu + 1
                    parent[v] = u
        for v, d in dist.items():
            if v == start or hops[v] < 2 or hops[v] > cap:
                continue
            viol = d - q[start, v]
            if viol <= best_viol:
                path = [v]
                while path[-1] != start:
                    path.append(parent[path[-1]])
                path.reverse()
                best_viol = viol
                best_path = path
    return best_path


def certificate_check(
    cert: DualCertificate | OracleOutcome,
    alpha: float,
    state: GramState,
    h: DirectedHypergraph,
    rho: float,
) -> tuple[bool, dict]:
    """Numerically verify every certificate bullet; returns (ok, report).

    Bullets: z >= alpha; (sum f_p T_p + z K) . X <= F . X + 1e-7; f_p >= 0;
    F annihilates the ones vector; F is zero or backed by a capacity-
    respecting flow; the residual width is at most rho.
    """
    if isinstance(cert, OracleOutcome):
        if cert.kind != "dual" or cert.dual is None:
            raise ValueError("certificate_check needs a dual outcome")
        cert = cert.dual
    n = h.n
    k = mat_K(h.vertex_weights)
    report: dict = {"first_failure": None}

    def fail(name: str) -> tuple[bool, dict]:
        report["first_failure"] = name
        return False, report

    report["z"] = cert.z
    if cert.z < alpha * (1 - 1e-12):
        return fail("z_below_alpha")

    if any(f < 0 for f in cert.triangle_weights.values()):
        return fail("negative_triangle_weight")

    f_mat = cert.flow_matrix_dense(n)
    t_mat = flownet.triangle_matrix_sum(cert.triangle_weights, n)
    lhs = float(np.tensordot(t_mat, state.x)) + cert.z * float(
        np.tensordot(k, state.x)
    )
    rhs = float(np.tensordot(f_mat, state.x))
    report["lhs_dot"] = lhs
    report["rhs_dot"] = rhs
    if lhs > rhs + 1e-7:
        return fail("dual_dot_bound")

    ones_gap = float(np.max(np.abs(f_mat.sum(axis=1))))
    report["ones_gap"] = ones_gap
    if ones_gap > 1e-9 * max(1.0, float(np.max(np.abs(f_mat)))):
        return fail("flow_ones_kernel")

    if cert.flow is not None:
        totals = cert.flow.per_edge_totals()
        for e_idx, tot in totals.items():
            cap = float(h.edges[e_idx].weight) / 2.0
            if tot > cap * (1 + 1e-9) + 1e-12:
                report["edge_over_capacity"] = (e_idx, tot, cap)
                return fail("flow_capacity")
        if any(f < 0 for _, _, _, f in cert.flow):
            return fail("negative_flow")

    width = spectral_norm(t_mat + cert.z * k - f_mat)
    report["width"] = width
    report["rho"] = rho
    if width > rho * (1 + 1e-6):
        return fail("width_bound")

    return True, report


def certificate_hypergraph(h: DirectedHypergraph, side: Side | str) -> DirectedHypergraph:
    """Hypergraph a certificate's flow refers to: reversed for ZERO_OUT."""
    side_val = side.value if isinstance(side, Side) else side
    return reverse(h) if side_val == "out" else h
