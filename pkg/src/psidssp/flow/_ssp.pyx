# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled successive-shortest-path kernel.

Mirrors ``_ssp_py.ssp_solve`` statement for statement; both must produce
bit-identical flows and potentials for the same input.
"""

from libc.math cimport INFINITY
from libc.stdlib cimport free, malloc

cdef double RESIDUAL_EPS = 1e-12
cdef double FLOW_TOL = 1e-9

OPTIMAL = 0
INFEASIBLE = 1


def ssp_solve(
    Py_ssize_t n,
    Py_ssize_t source,
    Py_ssize_t sink,
    const long long[::1] to,
    const long long[::1] adj_start,
    const long long[::1] adj_edge,
    const double[::1] cap,
    const double[::1] cost,
    double required,
    double[::1] flow,
    double[::1] pot,
    unsigned char[::1] reached,
):
    cdef double *dist = <double *> malloc(n * sizeof(double))
    cdef long long *pred = <long long *> malloc(n * sizeof(long long))
    cdef unsigned char *done = <unsigned char *> malloc(n * sizeof(unsigned char))
    if dist == NULL or pred == NULL or done == NULL:
        free(dist); free(pred); free(done)
        raise MemoryError()

    cdef double sent = 0.0
    cdef double D, best, du, pu, r, c, nd, delta
    cdef Py_ssize_t i, u, v, k
    cdef long long e, a
    cdef int status = OPTIMAL
    try:
        while required - sent > FLOW_TOL:
            for i in range(n):
                dist[i] = INFINITY
                pred[i] = -1
                done[i] = 0
            dist[source] = 0.0
            D = INFINITY
            while True:
                u = -1
                best = INFINITY
                for i in range(n):
                    if not done[i] and dist[i] < best:
                        best = dist[i]
                        u = i
                if u < 0:
                    break
                done[u] = 1
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
            if D == INFINITY:
                for i in range(n):
                    reached[i] = done[i]
                status = INFEASIBLE
                break

            delta = required - sent
            v = sink
            while v != source:
                e = pred[v]
                a = e >> 1
                if e & 1:
                    r = flow[a]
                else:
                    r = cap[a] - flow[a]
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
    finally:
        free(dist)
        free(pred)
        free(done)
    return status, sent
