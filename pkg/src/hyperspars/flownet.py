"""Max-flow on the reduced digraph, lifting flows back to hypergraph flows,
and decomposing them into triangle terms plus an endpoint demand matrix.

Flows are floating point with a 1e-9 conservation tolerance; the exact
rational layer stops at the hypergraph module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ._core import max_flow_arrays
from .hypergraph import DirectedHypergraph, ReducedDigraph
from .sdpcore import GramState, Side, TriangleId

__all__ = [
    "FlowInstance",
    "MaxFlowResult",
    "FlowAssignment",
    "FlowDecomposition",
    "build_flow_instance",
    "max_flow",
    "lift_flow",
    "flow_matrix",
    "pair_flow",
    "decompose",
    "demand_matrix",
    "demand_norm_bound",
    "capacity_duality_check",
    "DEFAULT_DEMAND_NORM_CONST",
]

CONSERVATION_TOL = 1e-9
DEFAULT_DEMAND_NORM_CONST = 8.0


@dataclass(frozen=True)
class FlowInstance:
    """s-t max-flow instance over a reduced digraph.

    Arc layout: the reduced digraph's arcs first (hyperedge arcs carry
    capacity w_e / 2, gadget arcs carry the big weight), then one source arc
    per entry of ``source_caps``, then one sink arc per ``sink_caps`` entry.
    """

    rd: ReducedDigraph
    arc_from: tuple[int, ...]
    arc_to: tuple[int, ...]
    cap: tuple[float, ...]
    source_caps: tuple[tuple[int, float], ...]
    sink_caps: tuple[tuple[int, float], ...]

    @property
    def s(self) -> int:
        return self.rd.num_vertices

    @property
    def t(self) -> int:
        return self.rd.num_vertices + 1

    @property
    def num_nodes(self) -> int:
        return self.rd.num_vertices + 2

    @property
    def total_source_cap(self) -> float:
        return sum(c for _, c in self.source_caps)

    @property
    def total_sink_cap(self) -> float:
        return sum(c for _, c in self.sink_caps)


@dataclass(frozen=True)
class MaxFlowResult:
    value: float
    arc_flow: tuple[float, ...]
    reachable: tuple[bool, ...]


def build_flow_instance(
    rd: ReducedDigraph,
    source_caps: Mapping[int, float],
    sink_caps: Mapping[int, float],
) -> FlowInstance:
    """Attach a source over ``source_caps`` and a sink over ``sink_caps``."""
    n_nodes = rd.num_vertices
    big = float(rd.big_weight)
    edge_arc = set(rd.edge_arc_index)
    arc_from: list[int] = []
    arc_to: list[int] = []
    cap: list[float] = []
    for k, (u, v, w) in enumerate(rd.arcs):
        arc_from.append(u)
        arc_to.append(v)
        cap.append(float(w) / 2.0 if k in edge_arc else big)
    src = tuple(sorted((int(i), float(c)) for i, c in source_caps.items()))
    snk = tuple(sorted((int(j), float(c)) for j, c in sink_caps.items()))
    for i, c in src:
        arc_from.append(n_nodes)
        arc_to.append(i)
        cap.append(c)
    for j, c in snk:
        arc_from.append(j)
        arc_to.append(n_nodes + 1)
        cap.append(c)
    return FlowInstance(rd, tuple(arc_from), tuple(arc_to), tuple(cap), src, snk)


def max_flow(instance: FlowInstance) -> MaxFlowResult:
    """Maximum s-t flow; the reachability mask induces a minimum cut."""
    scale = max(instance.cap, default=0.0)
    eps = 1e-12 * max(scale, 1.0)
    value, flow, reach = max_flow_arrays(
        instance.num_nodes,
        instance.arc_from,
        instance.arc_to,
        instance.cap,
        instance.s,
        instance.t,
        eps,
    )
    return MaxFlowResult(float(value), tuple(flow), tuple(bool(r) for r in reach))


@dataclass(frozen=True)
class FlowAssignment:
    """Per-hyperedge pairwise flow values f[e, i, j] >= 0 (sparse)."""

    values: tuple[tuple[int, int, int, float], ...]

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def total(self) -> float:
        return sum(f for _, _, _, f in self.values)

    def per_edge_totals(self) -> dict[int, float]:
        totals: dict[int, float] = {}
        for e, _, _, f in self.values:
            totals[e] = totals.get(e, 0.0) + f
        return totals


def lift_flow(result: MaxFlowResult, instance: FlowInstance) -> FlowAssignment:
    """Hypergraph flow induced by a digraph flow, gadget arcs dropped.

    Inflow at the tail gadget node is paired with outflow at the head node
    proportionally (inflow share times outflow share), which conserves all
    marginals and is order-independent.
    """
    rd = instance.rd
    h = rd.base
    values: list[tuple[int, int, int, float]] = []
    for e_idx, e in enumerate(h.edges):
        k = rd.edge_arc_index[e_idx]
        mid = result.arc_flow[k]
        tails = sorted(e.tail)
        heads = sorted(e.head)
        in_flows = [result.arc_flow[k + 1 + a] for a in range(len(tails))]
        out_flows = [result.arc_flow[k + 1 + len(tails) + b] for b in range(len(heads))]
        tol = CONSERVATION_TOL * max(1.0, abs(mid))
        if abs(sum(in_flows) - mid) > tol or abs(sum(out_flows) - mid) > tol:
            raise ArithmeticError(
                f"gadget conservation violated at edge {e_idx}: "
                f"in={sum(in_flows):.12g} mid={mid:.12g} out={sum(out_flows):.12g}"
            )
        if mid <= tol:
            continue
        for i, fi in zip(tails, in_flows):
            if fi <= 0.0:
                continue
            for j, fj in zip(heads, out_flows):
                if fj <= 0.0:
                    continue
                values.append((e_idx, i, j, fi * fj / mid))
    return FlowAssignment(tuple(values))


def flow_matrix(fa: FlowAssignment, n: int, side: Side = Side.ZERO_IN, zero: int = 0) -> np.ndarray:
    """F = sum over (e, i, j) of f * mat_A(i, j); annihilates the ones vector."""
    m = np.zeros((n, n))
    for _, i, j, f in fa:
        _accumulate_a(m, i, j, f, side, zero)
    return m


def _accumulate_a(m: np.ndarray, i: int, j: int, coeff: float, side: Side, zero: int) -> None:
    if side is Side.ZERO_OUT:
        i, j = j, i
    for p, q, c in ((i, j, coeff), (i, zero, -coeff), (j, zero, coeff)):
        if p == q:
            continue
        m[p, p] += c
        m[q, q] += c
        m[p, q] -= c
        m[q, p] -= c


def pair_flow(fa: FlowAssignment) -> dict[tuple[int, int], float]:
    """Collapse a hypergraph flow to pairwise totals g[i, j]."""
    g: dict[tuple[int, int], float] = {}
    for _, i, j, f in fa:
        if i != j:
            g[(i, j)] = g.get((i, j), 0.0) + f
    return g


@dataclass(frozen=True)
class FlowDecomposition:
    """Path decomposition of a flow: triangle weights plus endpoint demands.

    ``dropped_pairs`` holds the pairwise mass removed as cycles, so tests can
    reconstruct the exact matrix identity
    F(cycle-free) = sum f_p T_p + D.
    """

    triangle_weights: dict[TriangleId, float]
    demand: dict[tuple[int, int], float]
    dropped_cycle_mass: float
    dropped_pairs: dict[tuple[int, int], float] = field(default_factory=dict)

    def total_demand(self) -> float:
        return sum(self.demand.values())


def decompose(
    fa: FlowAssignment,
    sources,
    sinks,
    side: Side = Side.ZERO_IN,
) -> FlowDecomposition:
    """Path/cycle decomposition of the pairwise flow graph.

    Each source-to-sink path (i_0, ..., i_k) contributes its flow to the
    demand on (i_0, i_k) and to the k-1 triangles anchored at i_0; cycles
    are dropped (their pairwise mass is recorded).
    """
    del side  # the combinatorial structure is side-independent
    g = pair_flow(fa)
    sources = set(sources)
    sinks = set(sinks)
    balance: dict[int, float] = {}
    for (i, j), f in g.items():
        balance[i] = balance.get(i, 0.0) + f
        balance[j] = balance.get(j, 0.0) - f
    scale = max([abs(f) for f in g.values()] + [1.0])
    eps = 1e-12 * scale

    for v, b in balance.items():
        if b > eps and v not in sources:
            raise ArithmeticError(f"unexpected flow source at vertex {v}")
        if b < -eps and v not in sinks:
            raise ArithmeticError(f"unexpected flow sink at vertex {v}")

    out_adj: dict[int, set[int]] = {}
    for i, j in g:
        out_adj.setdefault(i, set()).add(j)

    def take(i, j, amount):
        rest = g[(i, j)] - amount
        if rest <= eps:
            del g[(i, j)]
            out_adj[i].discard(j)
        else:
            g[(i, j)] = rest

    triangles: dict[TriangleId, float] = {}
    demand: dict[tuple[int, int], float] = {}
    dropped = 0.0

    for start in sorted(v for v, b in balance.items() if b > eps):
        while balance.get(start, 0.0) > eps:
            # trace one path from `start`, peeling off cycles as they appear
            path = [start]
            pos = {start: 0}
            end = None
            while True:
                u = path[-1]
                succ = out_adj.get(u)
                if not succ:
                    break
                v = max(succ, key=lambda x: (g[(u, x)], -x))
                if v in pos:
                    # cycle: remove its minimum and restart from v
                    cyc = path[pos[v] :] + [v]
                    f = min(g[(cyc[a], cyc[a + 1])] for a in range(len(cyc) - 1))
                    for a in range(len(cyc) - 1):
                        dropped += f
                        take(cyc[a], cyc[a + 1], f)
                    for w in path[pos[v] + 1 :]:
                        del pos[w]
                    del path[pos[v] + 1 :]
                    continue
                path.append(v)
                pos[v] = len(path) - 1
                if balance.get(v, 0.0) < -eps:
                    end = v
                    break
            if end is None:
                break  # numerical dust: no completable path remains
            f = min(
                balance[start],
                -balance[end],
                min(g[(path[a], path[a + 1])] for a in range(len(path) - 1)),
            )
            balance[start] -= f
            balance[end] += f
            for a in range(len(path) - 1):
                take(path[a], path[a + 1], f)
            key = (path[0], path[-1])
            demand[key] = demand.get(key, 0.0) + f
            for a in range(1, len(path) - 1):
                tri = TriangleId.make(path[0], path[a + 1], path[a])
                triangles[tri] = triangles.get(tri, 0.0) + f

    dropped_pairs: dict[tuple[int, int], float] = {}
    for (i, j), f in g.items():
        dropped += f
        dropped_pairs[(i, j)] = dropped_pairs.get((i, j), 0.0) + f

    return FlowDecomposition(triangles, demand, dropped, dropped_pairs)


def demand_matrix(
    demand: Mapping[tuple[int, int], float],
    n: int,
    side: Side = Side.ZERO_IN,
    zero: int = 0,
) -> np.ndarray:
    """D = sum of d_ij * mat_A(i, j)."""
    m = np.zeros((n, n))
    for (i, j), f in demand.items():
        _accumulate_a(m, i, j, f, side, zero)
    return m


def demand_norm_bound(
    demand: Mapping[tuple[int, int], float],
    norm_const: float = DEFAULT_DEMAND_NORM_CONST,
) -> float:
    """Upper bound norm_const * sum(d_ij) on the demand matrix spectral norm."""
    return norm_const * sum(demand.values())


def capacity_duality_check(
    fa: FlowAssignment,
    state: GramState,
    h: DirectedHypergraph,
    zero: int = 0,
    tol: float = 1e-9,
) -> bool:
    """Weak duality predicate: F . X <= sum_e c_e d_e with c_e = w_e / 2.

    Holds for every capacity-respecting flow; exposed as a test predicate.
    """
    f_dot_x = sum(f * state.ddist(i, j, zero) for _, i, j, f in fa)
    bound = 0.0
    for e in h.edges:
        d_e = max(
            [0.0]
            + [state.ddist(i, j, zero) for i in sorted(e.tail) for j in sorted(e.head)]
        )
        bound += float(e.weight) / 2.0 * d_e
    scale = max(abs(f_dot_x), abs(bound), 1.0)
    return f_dot_x <= bound + tol * scale


def triangle_matrix_sum(
    triangles: Mapping[TriangleId, float], n: int
) -> np.ndarray:
    """sum of f_p * mat_T(p) accumulated densely."""
    m = np.zeros((n, n))
    for tri, f in triangles.items():
        for p, q, c in (
            (tri.a, tri.mid, f),
            (tri.mid, tri.b, f),
            (tri.a, tri.b, -f),
        ):
            m[p, p] += c
            m[q, q] += c
            m[p, q] -= c
            m[q, p] -= c
    return m


def decomposition_matrix_identity_gap(
    fa: FlowAssignment,
    dec: FlowDecomposition,
    n: int,
    side: Side = Side.ZERO_IN,
    zero: int = 0,
) -> float:
    """Max-abs gap of F(cycle-free) - (sum f_p T_p + D); should be ~0."""
    full = flow_matrix(fa, n, side, zero)
    cyc = demand_matrix(dec.dropped_pairs, n, side, zero)
    lhs = full - cyc
    rhs = triangle_matrix_sum(dec.triangle_weights, n) + demand_matrix(
        dec.demand, n, side, zero
    )
    return float(np.max(np.abs(lhs - rhs)))
