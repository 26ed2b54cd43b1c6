"""All-pairs shortest paths over the free cells of a wall grid.

Two independent routes to the same answer: ``seidel_apsp`` uses Seidel's
recursive-squaring algorithm (matrix multiplications only), ``bfs_apsp``
runs simultaneous breadth-first frontier expansion from every source.
Both use 4-connectivity, return exact unweighted distances in row-major
free-cell order, and mark unreachable pairs with ``inf``.
"""

from __future__ import annotations

import numpy as np

# 4-neighborhood offsets
_NEIGHBOR_OFFSETS = ((-1, 0), (1, 0), (0, -1), (0, 1))


def free_cells(walls: np.ndarray) -> np.ndarray:
    """Coordinates of non-wall cells in row-major order, shape [n, 2]."""
    return np.argwhere(~np.asarray(walls, dtype=bool))


def adjacency_matrix(walls: np.ndarray) -> np.ndarray:
    """0/1 adjacency of the free-cell graph under 4-connectivity."""
    walls = np.asarray(walls, dtype=bool)
    h, w = walls.shape
    cells = free_cells(walls)
    n = len(cells)
    index = -np.ones((h, w), dtype=np.int64)
    index[cells[:, 0], cells[:, 1]] = np.arange(n)
    a = np.zeros((n, n), dtype=np.int64)
    for dr, dc in _NEIGHBOR_OFFSETS:
        r, c = cells[:, 0] + dr, cells[:, 1] + dc
        ok = (0 <= r) & (r < h) & (0 <= c) & (c < w)
        ok[ok] &= ~walls[r[ok], c[ok]]
        a[np.arange(n)[ok], index[r[ok], c[ok]]] = 1
    return a


def connected_components(walls: np.ndarray) -> np.ndarray:
    """Component label per free cell (row-major order), by label propagation.

    Labels are the row-major index of each component's smallest cell. Wall
    cells carry a sentinel larger than any real label, so min-propagation
    never crosses them.
    """
    walls = np.asarray(walls, dtype=bool)
    free = ~walls
    sentinel = np.iinfo(np.int64).max
    labels = np.where(free, np.arange(walls.size, dtype=np.int64).reshape(walls.shape), sentinel)
    while True:
        pulled = labels.copy()
        pulled[1:, :] = np.minimum(pulled[1:, :], labels[:-1, :])
        pulled[:-1, :] = np.minimum(pulled[:-1, :], labels[1:, :])
        pulled[:, 1:] = np.minimum(pulled[:, 1:], labels[:, :-1])
        pulled[:, :-1] = np.minimum(pulled[:, :-1], labels[:, 1:])
        pulled = np.where(free, pulled, sentinel)
        if np.array_equal(pulled, labels):
            break
        labels = pulled
    return labels[free]


def _seidel_connected(a: np.ndarray) -> np.ndarray:
    """Seidel's APD on the adjacency matrix of a connected graph."""
    n = a.shape[0]
    if n == 1:
        return np.zeros((1, 1), dtype=np.int64)
    z = a @ a
    b = ((a == 1) | (z > 0)).astype(np.int64)
    np.fill_diagonal(b, 0)
    if b.sum() == n * (n - 1):  # squared graph is complete: distances are 1 or 2
        return 2 * b - a
    t = _seidel_connected(b)
    x = t @ a
    degrees = a.sum(axis=0)
    # parity fix: odd distance exactly when x[i,j] < t[i,j] * deg(j)
    return 2 * t - (x < t * degrees[None, :]).astype(np.int64)


def seidel_apsp(walls: np.ndarray) -> np.ndarray:
    """Exact APSP distances between free cells via Seidel's algorithm.

    The recursion assumes a connected graph, so it runs once per
    connected component; cross-component entries are ``inf``.
    """
    walls = np.asarray(walls, dtype=bool)
    a = adjacency_matrix(walls)
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    labels = connected_components(walls)
    dist = np.full((n, n), np.inf)
    for label in np.unique(labels):
        idx = np.flatnonzero(labels == label)
        sub = a[np.ix_(idx, idx)]
        dist[np.ix_(idx, idx)] = _seidel_connected(sub)
    return dist


def bfs_apsp(walls: np.ndarray) -> np.ndarray:
    """Exact APSP distances by breadth-first search from every free cell."""
    a = adjacency_matrix(np.asarray(walls, dtype=bool)) > 0
    n = a.shape[0]
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    frontier = np.eye(n, dtype=bool)
    d = 0
    while frontier.any():
        d += 1
        frontier = (frontier @ a) & np.isinf(dist)
        dist[frontier] = d
    return dist


def grid_distances_from(walls: np.ndarray, source: tuple[int, int]) -> np.ndarray:
    """Single-source BFS over the grid; ``inf`` on walls and unreachable cells."""
    walls = np.asarray(walls, dtype=bool)
    dist = np.full(walls.shape, np.inf)
    if walls[source]:
        return dist
    dist[source] = 0.0
    frontier = np.zeros_like(walls)
    frontier[source] = True
    d = 0
    while frontier.any():
        d += 1
        grown = np.zeros_like(frontier)
        grown[1:, :] |= frontier[:-1, :]
        grown[:-1, :] |= frontier[1:, :]
        grown[:, 1:] |= frontier[:, :-1]
        grown[:, :-1] |= frontier[:, 1:]
        frontier = grown & ~walls & np.isinf(dist)
        dist[frontier] = d
    return dist
