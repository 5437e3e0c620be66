# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython Dinic max-flow kernel (hot path of the solver's oracle loop).

Mirrors ``_maxflow_py.max_flow_arrays`` exactly; the dispatching package
selects whichever of the two imported cleanly.
"""

from libc.stdlib cimport free, malloc


def max_flow_arrays(int n_nodes, arc_from, arc_to, cap, int s, int t, double eps=1e-12):
    """Maximum s-t flow via Dinic with capacity scaling (see _maxflow_py)."""
    cdef int na = len(arc_from)
    cdef int ne = 2 * na if na > 0 else 1
    cdef int nn = n_nodes if n_nodes > 0 else 1
    cdef int *to = <int *> malloc(ne * sizeof(int))
    cdef double *res = <double *> malloc(ne * sizeof(double))
    cdef int *deg = <int *> malloc(nn * sizeof(int))
    cdef int *start = <int *> malloc((nn + 1) * sizeof(int))
    cdef int *adj = <int *> malloc(ne * sizeof(int))
    cdef int *fill = <int *> malloc(nn * sizeof(int))
    cdef int *level = <int *> malloc(nn * sizeof(int))
    cdef int *it = <int *> malloc(nn * sizeof(int))
    cdef int *queue = <int *> malloc(nn * sizeof(int))
    cdef int *path = <int *> malloc(ne * sizeof(int))
    if (to == NULL or res == NULL or deg == NULL or start == NULL or
            adj == NULL or fill == NULL or level == NULL or it == NULL or
            queue == NULL or path == NULL):
        free(to); free(res); free(deg); free(start); free(adj)
        free(fill); free(level); free(it); free(queue); free(path)
        raise MemoryError()

    cdef int a, u, v, k, e
    cdef double c, maxcap = 0.0
    for k in range(n_nodes):
        deg[k] = 0
    for a in range(na):
        u = arc_from[a]
        v = arc_to[a]
        c = cap[a]
        to[2 * a] = v
        to[2 * a + 1] = u
        res[2 * a] = c
        res[2 * a + 1] = 0.0
        deg[u] += 1
        deg[v] += 1
        if c > maxcap:
            maxcap = c
    start[0] = 0
    for k in range(n_nodes):
        start[k + 1] = start[k] + deg[k]
        fill[k] = start[k]
    for a in range(na):
        u = arc_from[a]
        v = arc_to[a]
        adj[fill[u]] = 2 * a
        fill[u] += 1
        adj[fill[v]] = 2 * a + 1
        fill[v] += 1

    cdef double value = 0.0
    cdef double delta, pushed, limit, src_out, snk_in, delta0
    cdef int qh, qt, plen, advanced

    if maxcap > eps and s != t:
        # no augmenting path carries more than the terminal capacities,
        # so scaling can start there instead of at the largest arc
        src_out = 0.0
        snk_in = 0.0
        for a in range(na):
            if arc_from[a] == s:
                src_out += cap[a]
            if arc_to[a] == t:
                snk_in += cap[a]
        delta0 = maxcap
        if src_out < delta0:
            delta0 = src_out
        if snk_in < delta0:
            delta0 = snk_in
        if delta0 < eps:
            delta0 = eps
        delta = 1.0
        while delta * 2.0 <= delta0:
            delta *= 2.0
        while delta > delta0:
            delta /= 2.0
        while True:
            while True:
                # BFS level graph on residual >= delta
                for k in range(n_nodes):
                    level[k] = -1
                level[s] = 0
                queue[0] = s
                qh = 0
                qt = 1
                while qh < qt:
                    u = queue[qh]
                    qh += 1
                    for k in range(start[u], start[u + 1]):
                        e = adj[k]
                        v = to[e]
                        if level[v] < 0 and res[e] >= delta:
                            level[v] = level[u] + 1
                            queue[qt] = v
                            qt += 1
                if level[t] < 0:
                    break
                for k in range(n_nodes):
                    it[k] = start[k]
                # blocking flow: iterative DFS with arc cursors
                while True:
                    plen = 0
                    u = s
                    pushed = 0.0
                    while True:
                        if u == t:
                            limit = res[path[0]]
                            for k in range(1, plen):
                                if res[path[k]] < limit:
                                    limit = res[path[k]]
                            for k in range(plen):
                                e = path[k]
                                res[e] -= limit
                                res[e ^ 1] += limit
                            pushed = limit
                            break
                        advanced = 0
                        while it[u] < start[u + 1]:
                            e = adj[it[u]]
                            v = to[e]
                            if res[e] >= delta and level[v] == level[u] + 1:
                                path[plen] = e
                                plen += 1
                                u = v
                                advanced = 1
                                break
                            it[u] += 1
                        if advanced:
                            continue
                        level[u] = -1
                        if plen == 0:
                            break
                        plen -= 1
                        u = to[path[plen] ^ 1]
                        it[u] += 1
                    if pushed <= 0.0:
                        break
                    value += pushed
            if delta <= eps:
                break
            delta /= 2.0
            if delta < eps:
                delta = eps

    flow = [0.0] * na
    for a in range(na):
        flow[a] = res[2 * a + 1]

    reach = [False] * n_nodes
    reach[s] = True
    queue[0] = s
    qh = 0
    qt = 1
    while qh < qt:
        u = queue[qh]
        qh += 1
        for k in range(start[u], start[u + 1]):
            e = adj[k]
            v = to[e]
            if not reach[v] and res[e] > eps:
                reach[v] = True
                queue[qt] = v
                qt += 1

    free(to); free(res); free(deg); free(start); free(adj)
    free(fill); free(level); free(it); free(queue); free(path)
    return value, flow, reach
