# services/transport.py
"""Exact Earth Mover's Distance between weighted point sets.

Marginals are rounded onto an integer grid and the transportation problem is
solved as a min-cost flow by successive shortest paths (Dijkstra with node
potentials on the bipartite residual network, stopped at the first sink with
demand). The smaller side plays the sinks; when it is small the search runs
over the sinks alone. The final potentials are a dual solution that
certifies optimality.
"""

import logging
import math
from typing import Optional

import numpy as np
from numba import njit
from scipy.spatial.distance import cdist

from ..constants import FEASIBILITY_TOL, TRANSPORT_GRID
from ..exceptions import DimensionError, InfeasibleTransportError, NumericalError, PreconditionError
from ..schemas.embedding import NodeEmbeddings
from ..schemas.transport import TransportPlan, TransportProblem

logger = logging.getLogger(__name__)


# Sink sides up to this size use the sink-only search below; larger ones the dense search.
FEW_SINKS = 64


@njit(cache=True)
def _dense_shortest_paths(cost, supply, demand):
    n_src, n_snk = cost.shape
    n_nodes = n_src + n_snk
    flow = np.zeros((n_src, n_snk), dtype=np.int64)
    potential = np.zeros(n_nodes)
    supply = supply.copy()
    demand = demand.copy()
    remaining = supply.sum()

    dist = np.empty(n_nodes)
    prev = np.empty(n_nodes, dtype=np.int64)
    done = np.empty(n_nodes, dtype=np.bool_)

    while remaining > 0:
        dist[:] = np.inf
        prev[:] = -1
        done[:] = False
        for i in range(n_src):
            if supply[i] > 0:
                dist[i] = 0.0

        # Dense Dijkstra on reduced costs, stopped at the first sink with demand.
        sink = -1
        reach = np.inf
        for _ in range(n_nodes):
            u = -1
            best = np.inf
            for v in range(n_nodes):
                if not done[v] and dist[v] < best:
                    best = dist[v]
                    u = v
            if u == -1:
                break
            done[u] = True
            if u < n_src:
                for j in range(n_snk):
                    v = n_src + j
                    if done[v]:
                        continue
                    rc = cost[u, j] + potential[u] - potential[v]
                    if rc < 0.0:
                        rc = 0.0
                    if best + rc < dist[v]:
                        dist[v] = best + rc
                        prev[v] = u
            else:
                j = u - n_src
                if demand[j] > 0:
                    sink = u
                    reach = best
                    break
                for i in range(n_src):
                    if done[i] or flow[i, j] == 0:
                        continue
                    rc = potential[u] - potential[i] - cost[i, j]
                    if rc < 0.0:
                        rc = 0.0
                    if best + rc < dist[i]:
                        dist[i] = best + rc
                        prev[i] = u
        if sink == -1:
            return flow, potential[n_src:].copy(), False

        delta = demand[sink - n_src]
        v = sink
        while prev[v] != -1:
            u = prev[v]
            if u >= n_src and flow[v, u - n_src] < delta:
                delta = flow[v, u - n_src]
            v = u
        source = v
        if supply[source] < delta:
            delta = supply[source]

        v = sink
        while prev[v] != -1:
            u = prev[v]
            if u < n_src:
                flow[u, v - n_src] += delta
            else:
                flow[v, u - n_src] -= delta
            v = u
        supply[source] -= delta
        demand[sink - n_src] -= delta
        remaining -= delta

        for v in range(n_nodes):
            potential[v] += min(dist[v], reach)

    return flow, potential[n_src:].copy(), True


@njit(cache=True)
def _heap_push(values, items, size, q, value, item):
    pos = size[q]
    size[q] = pos + 1
    while pos > 0:
        parent = (pos - 1) // 2
        if values[q, parent] <= value:
            break
        values[q, pos] = values[q, parent]
        items[q, pos] = items[q, parent]
        pos = parent
    values[q, pos] = value
    items[q, pos] = item


@njit(cache=True)
def _heap_pop(values, items, size, q):
    last = size[q] - 1
    size[q] = last
    if last == 0:
        return
    value = values[q, last]
    item = items[q, last]
    pos = 0
    while True:
        child = 2 * pos + 1
        if child >= last:
            break
        if child + 1 < last and values[q, child + 1] < values[q, child]:
            child += 1
        if values[q, child] >= value:
            break
        values[q, pos] = values[q, child]
        items[q, pos] = items[q, child]
        pos = child
    values[q, pos] = value
    items[q, pos] = item


@njit(cache=True)
def _grow(values, items):
    rows, cap = values.shape
    new_values = np.empty((rows, 2 * cap))
    new_items = np.empty((rows, 2 * cap), dtype=np.int64)
    new_values[:, :cap] = values
    new_items[:, :cap] = items
    return new_values, new_items


@njit(cache=True)
def _sink_shortest_paths(cost, supply, demand):
    """Successive shortest paths searched over the sinks alone.

    Sources with supply left always sit at potential 0, so the first hop into
    sink k is the cheapest such source (a sorted order per sink, scanned by a
    forward-only pointer). A detour from sink j through a source i on j's
    support into sink k has reduced cost p[j] - p[k] + c[i, k] - c[i, j]; the
    source potential cancels and the minimum over i comes from a lazy heap
    per sink pair. An augmentation costs O(k^2 + k log n) for k sinks.
    """
    n_src, n_snk = cost.shape
    flow = np.zeros((n_src, n_snk), dtype=np.int64)
    potential = np.zeros(n_snk)
    supply = supply.copy()
    demand = demand.copy()
    remaining = supply.sum()

    order = np.empty((n_snk, n_src), dtype=np.int64)
    for k in range(n_snk):
        order[k] = np.argsort(cost[:, k], kind="mergesort")
    head = np.zeros(n_snk, dtype=np.int64)

    pairs = n_snk * n_snk
    cap = max(4, 2 * (n_src // n_snk + 1))
    values = np.empty((pairs, cap))
    items = np.empty((pairs, cap), dtype=np.int64)
    size = np.zeros(pairs, dtype=np.int64)

    dist = np.empty(n_snk)
    prev = np.empty(n_snk, dtype=np.int64)
    via = np.empty(n_snk, dtype=np.int64)
    done = np.empty(n_snk, dtype=np.bool_)

    while remaining > 0:
        for k in range(n_snk):
            while supply[order[k, head[k]]] == 0:
                head[k] += 1
            i = order[k, head[k]]
            dist[k] = max(cost[i, k] - potential[k], 0.0)
            prev[k] = -1
            via[k] = i
            done[k] = False

        sink = -1
        reach = np.inf
        for _ in range(n_snk):
            j = -1
            best = np.inf
            for k in range(n_snk):
                if not done[k] and dist[k] < best:
                    best = dist[k]
                    j = k
            if j == -1:
                break
            done[j] = True
            if demand[j] > 0:
                sink = j
                reach = best
                break
            for k in range(n_snk):
                if done[k]:
                    continue
                q = j * n_snk + k
                while size[q] > 0 and flow[items[q, 0], j] == 0:
                    _heap_pop(values, items, size, q)
                if size[q] == 0:
                    continue
                rc = potential[j] - potential[k] + values[q, 0]
                if rc < 0.0:
                    rc = 0.0
                if best + rc < dist[k]:
                    dist[k] = best + rc
                    prev[k] = j
                    via[k] = items[q, 0]
        if sink == -1:
            return flow, potential, False

        delta = demand[sink]
        k = sink
        while prev[k] != -1:
            if flow[via[k], prev[k]] < delta:
                delta = flow[via[k], prev[k]]
            k = prev[k]
        source = via[k]
        if supply[source] < delta:
            delta = supply[source]

        k = sink
        while True:
            i = via[k]
            if flow[i, k] == 0:
                # i joins k's support: offer it as a detour from k to every other sink.
                if size[k * n_snk : (k + 1) * n_snk].max() >= values.shape[1]:
                    values, items = _grow(values, items)
                for m in range(n_snk):
                    if m != k:
                        _heap_push(values, items, size, k * n_snk + m, cost[i, m] - cost[i, k], i)
            flow[i, k] += delta
            if prev[k] == -1:
                break
            flow[i, prev[k]] -= delta
            k = prev[k]
        supply[source] -= delta
        demand[sink] -= delta
        remaining -= delta

        for k in range(n_snk):
            potential[k] += min(dist[k], reach)

    return flow, potential, True


@njit(cache=True)
def _block_objectives(cost, supply, offsets):
    """Grid-unit objective against each uniform-mass column block of `cost`."""
    blocks = offsets.size - 1
    out = np.empty(blocks)
    for j in range(blocks):
        lo, hi = offsets[j], offsets[j + 1]
        size = hi - lo
        demand = np.full(size, (TRANSPORT_GRID + size // 2) // size, dtype=np.int64)
        demand[0] += TRANSPORT_GRID - demand.sum()
        block = np.ascontiguousarray(cost[:, lo:hi])
        if size <= FEW_SINKS:
            flow, _, ok = _sink_shortest_paths(block, supply, demand)
            total = np.sum(flow * block)
        elif block.shape[0] <= FEW_SINKS:
            block_t = np.ascontiguousarray(block.T)
            flow, _, ok = _sink_shortest_paths(block_t, demand, supply)
            total = np.sum(flow * block_t)
        else:
            flow, _, ok = _dense_shortest_paths(block, supply, demand)
            total = np.sum(flow * block)
        out[j] = total if ok else np.nan
    return out


def _min_cost_flow(cost: np.ndarray, supply: np.ndarray, demand: np.ndarray):
    """Integer flow and sink potentials; sinks should be the smaller side."""
    if cost.shape[1] <= FEW_SINKS:
        return _sink_shortest_paths(cost, supply, demand)
    return _dense_shortest_paths(cost, supply, demand)


def _to_grid(weights: np.ndarray) -> np.ndarray:
    """Integer masses summing exactly to TRANSPORT_GRID."""
    units = np.floor(weights / weights.sum() * TRANSPORT_GRID + 0.5).astype(np.int64)
    units[np.argmax(units)] += TRANSPORT_GRID - units.sum()
    return units


def _solve(source_weights: np.ndarray, sink_weights: np.ndarray, cost: np.ndarray, duals: bool):
    """Flow matrix, plus dual potentials (u, v) when `duals` is set."""
    source_mass, sink_mass = source_weights.sum(), sink_weights.sum()
    if abs(source_mass - sink_mass) > FEASIBILITY_TOL:
        raise InfeasibleTransportError(
            f"Source mass {source_mass!r} differs from sink mass {sink_mass!r}"
        )
    if source_mass <= 0:
        raise InfeasibleTransportError("Transport problem carries no mass")

    supply, demand = _to_grid(source_weights), _to_grid(sink_weights)
    rows, cols = np.flatnonzero(supply), np.flatnonzero(demand)
    kept = np.ascontiguousarray(cost[np.ix_(rows, cols)], dtype=np.float64)
    # The smaller side plays the sinks.
    transposed = rows.size < cols.size
    if transposed:
        grid_flow, potential, ok = _min_cost_flow(
            np.ascontiguousarray(kept.T), demand[cols], supply[rows]
        )
        grid_flow = grid_flow.T
    else:
        grid_flow, potential, ok = _min_cost_flow(kept, supply[rows], demand[cols])
    if not ok:
        raise NumericalError("Shortest-path search failed to reach a sink with demand")

    flow = np.zeros(cost.shape)
    flow[np.ix_(rows, cols)] = grid_flow * (source_mass / TRANSPORT_GRID)
    if not duals:
        return flow, None, None

    # Sink potentials fix one side; the other is the tightest value c - p allows.
    u = np.empty(cost.shape[0])
    v = np.empty(cost.shape[1])
    if transposed:
        u[rows] = potential
        v[cols] = (kept - potential[:, None]).min(axis=0)
    else:
        v[cols] = potential
        u[rows] = (kept - potential[None, :]).min(axis=1)
    dropped_rows = np.setdiff1d(np.arange(cost.shape[0]), rows)
    if dropped_rows.size:
        u[dropped_rows] = (cost[np.ix_(dropped_rows, cols)] - v[cols]).min(axis=1)
    dropped_cols = np.setdiff1d(np.arange(cost.shape[1]), cols)
    if dropped_cols.size:
        v[dropped_cols] = (cost[:, dropped_cols] - u[:, None]).min(axis=0)
    return flow, u, v


def emd_objective(source_weights: np.ndarray, sink_weights: np.ndarray, cost: np.ndarray) -> float:
    """Optimal transport cost without duals or schema objects."""
    flow, _, _ = _solve(source_weights, sink_weights, cost, duals=False)
    return float(np.sum(flow * cost))


def emd(problem: TransportProblem) -> TransportPlan:
    """Global optimum of the transportation LP."""
    flow, u, v = _solve(problem.source_weights, problem.sink_weights, problem.cost, duals=True)
    return TransportPlan(
        flow=flow,
        objective=float(np.sum(flow * problem.cost)),
        source_potentials=u,
        sink_potentials=v,
    )


def _check_labels(label_a, label_b) -> bool:
    """True when both sides are labeled; mixed labeled/unlabeled is rejected."""
    if (label_a is None) != (label_b is None):
        raise PreconditionError("Cannot compare a labeled node with an unlabeled one")
    return label_a is not None


def ground_distance(a, b, label_a: Optional[int], label_b: Optional[int], d: int) -> float:
    """Euclidean distance, or sqrt(d) when both nodes are labeled and labels differ."""
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if a.shape != (d,) or b.shape != (d,):
        raise DimensionError(f"Rows of width {a.shape} and {b.shape}, expected ({d},)")
    if _check_labels(label_a, label_b) and label_a != label_b:
        return math.sqrt(d)
    return float(np.linalg.norm(a - b))


def cost_matrix(
    x_vectors: np.ndarray,
    y_vectors: np.ndarray,
    x_labels: Optional[np.ndarray],
    y_labels: Optional[np.ndarray],
    d: int,
) -> np.ndarray:
    """All-pairs ground distances between two node sets."""
    if x_vectors.shape[1] != d or y_vectors.shape[1] != d:
        raise DimensionError(
            f"Embeddings of width {x_vectors.shape[1]} and {y_vectors.shape[1]}, expected {d}"
        )
    cost = cdist(x_vectors, y_vectors, metric="euclidean")
    if _check_labels(x_labels, y_labels):
        cost[np.asarray(x_labels)[:, None] != np.asarray(y_labels)[None, :]] = math.sqrt(d)
    return cost


def emd_between_graphs(x: NodeEmbeddings, y: NodeEmbeddings, d: int) -> float:
    """EMD between two embedded graphs under the (label-aware) ground distance."""
    if x.d != d or y.d != d:
        raise DimensionError(f"Embeddings built with d={x.d} and d={y.d}, expected {d}")
    cost = cost_matrix(x.vectors, y.vectors, x.labels, y.labels, d)
    return emd_objective(x.weights, y.weights, cost)


def emd_to_blocks(
    source: NodeEmbeddings,
    sink_vectors: np.ndarray,
    sink_labels: Optional[np.ndarray],
    offsets: np.ndarray,
    d: int,
) -> np.ndarray:
    """EMD from one embedded graph to each block of sink rows.

    Block j is rows offsets[j]:offsets[j + 1] of `sink_vectors`, with uniform
    mass. One numba call covers every block.
    """
    if source.d != d:
        raise DimensionError(f"Embeddings built with d={source.d}, expected {d}")
    cost = cost_matrix(source.vectors, sink_vectors, source.labels, sink_labels, d)
    supply = _to_grid(source.weights)
    rows = np.flatnonzero(supply)
    grid = _block_objectives(
        np.ascontiguousarray(cost[rows]), supply[rows], np.asarray(offsets, dtype=np.int64)
    )
    if np.isnan(grid).any():
        raise NumericalError("Shortest-path search failed to reach a sink with demand")
    return grid * (source.weights.sum() / TRANSPORT_GRID)


def format_transport_debug(problem: TransportProblem, plan: TransportPlan) -> str:
    """Text dump of cost, flow and objective."""
    def _rows(matrix: np.ndarray) -> str:
        return "\n".join(" ".join(f"{x:.17g}" for x in row) for row in matrix)

    return (
        f"cost {problem.cost.shape[0]} {problem.cost.shape[1]}\n{_rows(problem.cost)}\n"
        f"flow\n{_rows(plan.flow)}\nobjective {plan.objective:.17g}\n"
    )
