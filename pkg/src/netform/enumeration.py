"""Vectorized evaluation of every graph on a small node set.

Graphs are integer bitmasks in the canonical pair encoding of
:func:`netform.graph.pair_bit`. The hop-distance structure of every graph is
computed with bit-parallel breadth-first expansion over whole blocks of masks
and cached per node count, since it does not depend on benefits or costs.
Utilities then reduce to small dot products. Results never depend on how the
mask range is split into blocks or on the number of worker threads.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Callable, Iterator, TypeVar

import numpy as np

from .graph import all_pairs

CHUNK = 1 << 16
# largest n whose per-node layer counts are kept in memory (2^21 * 7 * 6 bytes)
CACHE_MAX_N = 7

T = TypeVar("T")


class EnumerationCapError(ValueError):
    """Raised when exhaustive enumeration is requested above the node cap."""


def check_cap(n: int, cap: int, what: str) -> None:
    if n > cap:
        edges = n * (n - 1) // 2
        raise EnumerationCapError(
            f"{what} enumerates 2^{edges} graphs for n={n}; the cap is n <= {cap}"
        )


def default_threads() -> int:
    env = os.environ.get("NETFORM_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def graph_count(n: int) -> int:
    return 1 << (n * (n - 1) // 2)


def mask_chunks(n: int, chunk: int = CHUNK) -> Iterator[np.ndarray]:
    total = graph_count(n)
    for start in range(0, total, chunk):
        yield np.arange(start, min(start + chunk, total), dtype=np.int64)


def map_chunks(fn: Callable[[np.ndarray], T], n: int, threads: int = 1, chunk: int = CHUNK) -> list[T]:
    """Apply ``fn`` to every block of masks, returning results in mask order."""
    chunks = mask_chunks(n, chunk)
    if threads <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))


def neighbor_masks(masks: np.ndarray, n: int) -> np.ndarray:
    """``out[g, i]`` has bit ``j`` set iff edge {i, j} is in graph ``masks[g]``."""
    nbr = np.zeros((len(masks), n), dtype=np.int64)
    for b, (i, j) in enumerate(all_pairs(n)):
        has = (masks >> b) & 1
        nbr[:, i] |= has << j
        nbr[:, j] |= has << i
    return nbr


def layer_counts(masks: np.ndarray, n: int) -> np.ndarray:
    """``out[g, i, k-1]`` = number of nodes at hop distance ``k`` from ``i`` in ``masks[g]``."""
    out = np.zeros((len(masks), n, max(n - 1, 0)), dtype=np.uint8)
    if n == 1:
        return out
    nbr = neighbor_masks(masks, n)
    out[:, :, 0] = np.bitwise_count(nbr)
    reach = nbr | (np.int64(1) << np.arange(n, dtype=np.int64))
    for k in range(2, n):
        grown = reach.copy()
        for v in range(n):
            inside = ((reach >> v) & 1).astype(bool)
            grown |= np.where(inside, nbr[:, v][:, None], 0)
        layer = grown & ~reach
        if not layer.any():
            break
        out[:, :, k - 1] = np.bitwise_count(layer)
        reach = grown
    return out


@lru_cache(maxsize=None)
def _cached_layers(n: int) -> np.ndarray:
    parts = [layer_counts(m, n) for m in mask_chunks(n)]
    table = np.concatenate(parts, axis=0)
    table.setflags(write=False)
    return table


def layers_for(masks: np.ndarray, n: int) -> np.ndarray:
    if n <= CACHE_MAX_N:
        return _cached_layers(n)[masks]
    return layer_counts(masks, n)


@lru_cache(maxsize=None)
def _cached_total_layers(n: int) -> np.ndarray:
    table = _cached_layers(n).sum(axis=1, dtype=np.uint16)
    table.setflags(write=False)
    return table


def _byte_tables(n: int, per_edge: np.ndarray) -> list[np.ndarray]:
    """Split the edge bits into bytes; table ``t[g][v]`` sums ``per_edge`` rows
    over the edges whose bits are set in byte value ``v`` of byte group ``g``."""
    n_edges = len(per_edge)
    tables = []
    for start in range(0, n_edges, 8):
        width = min(8, n_edges - start)
        values = np.arange(1 << width)
        bits = ((values[:, None] >> np.arange(width)) & 1).astype(float)
        tables.append(bits @ per_edge[start : start + width])
    return tables


def _lookup(masks: np.ndarray, tables: list[np.ndarray]) -> np.ndarray:
    out = None
    for g, table in enumerate(tables):
        part = table[(masks >> (8 * g)) & 0xFF]
        out = part if out is None else out + part
    return out


def link_costs(masks: np.ndarray, n: int, cost: np.ndarray) -> np.ndarray:
    """``out[g, i]`` = total cost ``i`` pays for its links in ``masks[g]``."""
    pairs = all_pairs(n)
    if not pairs:
        return np.zeros((len(masks), n))
    per_edge = np.zeros((len(pairs), n))
    for b, (i, j) in enumerate(pairs):
        per_edge[b, i] = cost[i, j]
        per_edge[b, j] = cost[j, i]
    return _lookup(masks, _byte_tables(n, per_edge))


def node_utilities(masks: np.ndarray, n: int, b_values: np.ndarray, cost: np.ndarray) -> np.ndarray:
    """Per-node utilities for each graph in ``masks``, shape ``(len(masks), n)``.

    ``b_values[k-1]`` is the benefit at hop distance ``k``; ``cost[i, j]`` is
    what ``i`` pays for a link to ``j``.
    """
    layers = layers_for(masks, n)
    out = -link_costs(masks, n, cost)
    for k in range(n - 1):
        out += layers[:, :, k] * float(b_values[k])
    return out


def total_utilities(masks: np.ndarray, n: int, b_values: np.ndarray, cost: np.ndarray) -> np.ndarray:
    """Total utility of each graph in ``masks``.

    Agrees with ``node_utilities(...).sum(axis=1)`` up to floating-point
    reassociation.
    """
    if n <= CACHE_MAX_N:
        layers = _cached_total_layers(n)[masks]
    else:
        layers = layer_counts(masks, n).sum(axis=1, dtype=np.uint16)
    pairs = all_pairs(n)
    per_edge = np.array([[cost[i, j] + cost[j, i]] for i, j in pairs]).reshape(len(pairs), 1)
    out = -_lookup(masks, _byte_tables(n, per_edge))[:, 0] if pairs else np.zeros(len(masks))
    for k in range(n - 1):
        out += layers[:, k] * float(b_values[k])
    return out


def utility_table(n: int, b_values: np.ndarray, cost: np.ndarray, threads: int = 1) -> np.ndarray:
    """Per-node utilities of every graph on ``n`` nodes, indexed by mask."""
    parts = map_chunks(lambda m: node_utilities(m, n, b_values, cost), n, threads)
    return np.concatenate(parts, axis=0)
