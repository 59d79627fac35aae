"""Exact optimum-by-subset tables and expectations over random subsets.

Used by the omniscient enumerators and the subadditivity checks. Works on
instances small enough to index every subset by a bitmask.
"""

from __future__ import annotations

import numpy as np

from stochmatch.errors import InstanceTooLargeError

EXACT_MASK_CAP = 20


def matching_opt_by_mask(g) -> np.ndarray:
    """Maximum-matching size for every subset of edges of g."""
    m = g.m
    if m > EXACT_MASK_CAP:
        raise InstanceTooLargeError(f"exact enumeration capped at {EXACT_MASK_CAP} edges, got {m}")
    eu, ev = g.endpoint_lists
    conflict = []
    for i in range(m):
        mask = 1 << i
        for j in range(m):
            if j != i and len({eu[i], ev[i], eu[j], ev[j]}) < 4:
                mask |= 1 << j
        conflict.append(mask)
    return _opt_table(m, conflict)


def kset_opt_by_mask(sets) -> np.ndarray:
    """Maximum-packing size for every sub-collection of the given sets."""
    m = len(sets)
    if m > EXACT_MASK_CAP:
        raise InstanceTooLargeError(f"exact enumeration capped at {EXACT_MASK_CAP} sets, got {m}")
    elems = [frozenset(s) for s in sets]
    conflict = []
    for i in range(m):
        mask = 1 << i
        for j in range(m):
            if j != i and elems[i] & elems[j]:
                mask |= 1 << j
        conflict.append(mask)
    return _opt_table(m, conflict)


def _opt_table(m: int, conflict: list[int]) -> np.ndarray:
    """DP over subsets: take or skip the lowest member of each mask."""
    opt = [0] * (1 << m)
    low = [0] * (1 << m)
    for i in range(m):
        low[1 << i] = i
    for mask in range(1, 1 << m):
        i = low[mask & -mask]
        skip = opt[mask & (mask - 1)]
        take = 1 + opt[mask & ~conflict[i]]
        opt[mask] = take if take > skip else skip
    return np.asarray(opt, dtype=np.int32)


def expected_by_subset(opt: np.ndarray, probs) -> np.ndarray:
    """E[opt(random sub-subset of S)] for every S, members independent.

    opt[t] is the objective of deterministic subset t; probs[i] is the
    inclusion probability of member i. Weighted subset-sum transform,
    O(m 2^m) vectorized.
    """
    probs = np.asarray(probs, dtype=np.float64)
    m = len(probs)
    if (1 << m) != len(opt):
        raise ValueError("table size does not match probability vector")
    acc = opt.astype(np.float64)
    for i in range(m):
        v = acc.reshape(-1, 2, 1 << i)
        v[:, 1, :] *= probs[i]
    for i in range(m):
        v = acc.reshape(-1, 2, 1 << i)
        v[:, 1, :] += v[:, 0, :] * (1.0 - probs[i])
    return acc
