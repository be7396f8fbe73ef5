"""Pure-Python successive-shortest-path kernel (fallback for ``_ssp``).

Residual edge ``2a`` is the forward copy of arc ``a``, ``2a + 1`` the
backward copy. Dijkstra runs on reduced costs with a dense O(n^2) scan
(ties go to the lowest node id; a label only moves on strict improvement,
so the lowest-index edge keeps the predecessor slot). Potentials are
raised by ``min(dist, dist[sink])`` after each search, which keeps every
reduced cost non-negative whether or not a node was settled.
"""

RESIDUAL_EPS = 1e-12
FLOW_TOL = 1e-9

OPTIMAL = 0
INFEASIBLE = 1

INF = float("inf")


def ssp_solve(n, source, sink, to, adj_start, adj_edge, cap, cost, required, flow, pot, reached):
    """Send ``required`` units from ``source`` to ``sink`` at minimum cost.

    ``flow``, ``pot`` and ``reached`` are filled in place. Returns
    ``(status, sent)``; on infeasibility ``reached`` marks the nodes the
    last search could reach.
    """
    dist = [INF] * n
    pred = [-1] * n
    done = [False] * n
    sent = 0.0
    while required - sent > FLOW_TOL:
        for i in range(n):
            dist[i] = INF
            pred[i] = -1
            done[i] = False
        dist[source] = 0.0
        D = INF
        while True:
            u = -1
            best = INF
            for i in range(n):
                if not done[i] and dist[i] < best:
                    best = dist[i]
                    u = i
            if u < 0:
                break
            done[u] = True
            if u == sink:
                D = best
                break
            du = dist[u]
            pu = pot[u]
            for k in range(adj_start[u], adj_start[u + 1]):
                e = adj_edge[k]
                a = e >> 1
                if e & 1:
                    r = flow[a]
                    c = -cost[a]
                else:
                    r = cap[a] - flow[a]
                    c = cost[a]
                if r <= RESIDUAL_EPS:
                    continue
                v = to[e]
                if done[v]:
                    continue
                nd = du + (c + pu - pot[v])
                if nd < dist[v]:
                    dist[v] = nd
                    pred[v] = e
        if D == INF:
            for i in range(n):
                reached[i] = done[i]
            return INFEASIBLE, sent

        delta = required - sent
        v = sink
        while v != source:
            e = pred[v]
            a = e >> 1
            r = flow[a] if e & 1 else cap[a] - flow[a]
            if r < delta:
                delta = r
            v = to[e ^ 1]
        v = sink
        while v != source:
            e = pred[v]
            a = e >> 1
            if e & 1:
                flow[a] -= delta
            else:
                flow[a] += delta
            v = to[e ^ 1]
        sent += delta
        for i in range(n):
            if done[i]:
                pot[i] += dist[i]
            else:
                pot[i] += D
    return OPTIMAL, sent
