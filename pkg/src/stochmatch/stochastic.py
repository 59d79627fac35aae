"""Existence-probability models, realization sampling, and query oracles.

Randomness is managed through explicit 64-bit seeds; trial t of an
experiment uses ``trial_seed(base_seed, t) = base_seed ^ t`` so trials are
reproducible and independent workers can run them in any order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from stochmatch.errors import WrongModelVariantError
from stochmatch.graph import Graph

UNIFORM = "uniform"
PER_EDGE = "peredge"
VERTEX_PARAMS = "vertexparams"

_MASK64 = (1 << 64) - 1


def trial_seed(base_seed: int, t: int) -> int:
    return (base_seed ^ t) & _MASK64


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


@dataclass(frozen=True)
class ProbModel:
    """Edge (or set) existence probabilities.

    Variants: uniform p for every index, one probability per index, or a
    probability parameter per vertex with edge probability p_i * p_j.
    """

    variant: str
    p: float = 0.0
    values: np.ndarray | None = None

    @staticmethod
    def uniform(p: float) -> "ProbModel":
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability out of [0,1]: {p}")
        return ProbModel(UNIFORM, p=p)

    @staticmethod
    def per_edge(values) -> "ProbModel":
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 1 or ((arr < 0) | (arr > 1)).any():
            raise ValueError("per-edge probabilities must be a 1-d vector in [0,1]")
        return ProbModel(PER_EDGE, values=arr)

    @staticmethod
    def vertex_params(values) -> "ProbModel":
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 1 or ((arr < 0) | (arr > 1)).any():
            raise ValueError("vertex parameters must be a 1-d vector in [0,1]")
        return ProbModel(VERTEX_PARAMS, values=arr)

    def probs_for(self, g: Graph) -> np.ndarray:
        """Existence probability vector over the edges of g."""
        if self.variant == UNIFORM:
            return np.full(g.m, self.p)
        if self.variant == PER_EDGE:
            if len(self.values) != g.m:
                raise ValueError(
                    f"per-edge vector has {len(self.values)} entries, graph has {g.m} edges"
                )
            return self.values
        if self.variant == VERTEX_PARAMS:
            if len(self.values) != g.n:
                raise ValueError(
                    f"vertex-parameter vector has {len(self.values)} entries, graph has {g.n} vertices"
                )
            return self.values[g.edge_u] * self.values[g.edge_v]
        raise ValueError(f"unknown model variant {self.variant!r}")

    def min_prob(self, g: Graph) -> float:
        probs = self.probs_for(g)
        return float(probs.min()) if len(probs) else 1.0

    def describe(self) -> str:
        if self.variant == UNIFORM:
            return f"uniform:{self.p:g}"
        return self.variant


def edge_prob(model: ProbModel, e: int, g: Graph) -> float:
    """Existence probability of edge index e under the model."""
    if not 0 <= e < g.m:
        raise IndexError(f"edge index {e} out of range for m={g.m}")
    if model.variant == UNIFORM:
        return model.p
    if model.variant == PER_EDGE:
        if len(model.values) != g.m:
            raise ValueError("per-edge vector length does not match graph")
        return float(model.values[e])
    if model.variant == VERTEX_PARAMS:
        u, v = g.edge(e)
        return float(model.values[u] * model.values[v])
    raise ValueError(f"unknown model variant {model.variant!r}")


def f_delta(model: ProbModel, delta: float) -> int:
    """Number of vertices whose parameter is below delta."""
    if model.variant != VERTEX_PARAMS:
        raise WrongModelVariantError("f_delta needs a vertex-parameter model")
    return int((model.values < delta).sum())


def sample_vertex_params(n: int, dist, seed: int) -> ProbModel:
    """Draw n vertex parameters from a named distribution.

    dist: "uniform01" | ("constant", c) | ("twopoint", lo, hi, frac_lo)
    """
    if n < 1:
        raise ValueError("need at least one vertex")
    rng = _rng(seed)
    if dist == "uniform01":
        vals = rng.random(n)
    elif isinstance(dist, tuple) and dist[0] == "constant":
        c = float(dist[1])
        if not 0 <= c <= 1:
            raise ValueError("constant parameter out of [0,1]")
        vals = np.full(n, c)
    elif isinstance(dist, tuple) and dist[0] == "twopoint":
        _, lo, hi, frac_lo = dist
        if not (0 <= lo <= 1 and 0 <= hi <= 1 and 0 <= frac_lo <= 1):
            raise ValueError("two-point parameters out of range")
        vals = np.where(rng.random(n) < frac_lo, lo, hi)
    else:
        raise ValueError(f"unknown parameter distribution {dist!r}")
    return ProbModel.vertex_params(vals)


@dataclass(frozen=True)
class Realization:
    """Which edges (or sets) of an instance actually exist."""

    bits: np.ndarray  # bool vector over indices

    def exists(self, idx: int) -> bool:
        return bool(self.bits[idx])

    @property
    def count(self) -> int:
        return int(self.bits.sum())

    def existing_ids(self) -> np.ndarray:
        return np.flatnonzero(self.bits)


def sample_realization(model: ProbModel, g: Graph, seed: int) -> Realization:
    """Include each edge independently with its model probability."""
    probs = model.probs_for(g)
    bits = _rng(seed).random(g.m) < probs
    return Realization(bits)


def sample_set_realization(probs, seed: int) -> Realization:
    """Include each set independently with its probability."""
    probs = np.asarray(probs, dtype=np.float64)
    bits = _rng(seed).random(len(probs)) < probs
    return Realization(bits)


class EdgeOracle:
    """Hides a realization and answers per-edge existence queries.

    Re-querying an edge returns the recorded answer without touching the
    budget counters; counters track distinct queried edges per vertex.
    """

    def __init__(self, g: Graph, realization: Realization):
        if len(realization.bits) != g.m:
            raise ValueError("realization length does not match edge count")
        self.g = g
        self._bits = realization.bits
        self.queried = bytearray(g.m)
        self.vertex_counts = [0] * g.n
        self.log: list[int] = []

    def query(self, eid: int) -> bool:
        if not self.queried[eid]:
            self.queried[eid] = 1
            u, v = self.g.edge(eid)
            self.vertex_counts[u] += 1
            self.vertex_counts[v] += 1
            self.log.append(eid)
        return bool(self._bits[eid])

    def query_many(self, eids) -> list[bool]:
        q = self.query
        return [q(e) for e in eids]

    def known(self, eid: int) -> bool | None:
        """Recorded answer, or None if the edge was never queried."""
        if not self.queried[eid]:
            return None
        return bool(self._bits[eid])

    @property
    def queries_issued(self) -> int:
        return len(self.log)

    @property
    def max_vertex_queries(self) -> int:
        return max(self.vertex_counts) if self.vertex_counts else 0


class SetOracle:
    """Per-set existence oracle with per-element budget accounting."""

    def __init__(self, sets: list[tuple[int, ...]], n_elements: int, realization: Realization):
        if len(realization.bits) != len(sets):
            raise ValueError("realization length does not match set count")
        self.sets = sets
        self._bits = realization.bits
        self.queried = bytearray(len(sets))
        self.element_counts = [0] * n_elements
        self.log: list[int] = []

    def query(self, sid: int) -> bool:
        if not self.queried[sid]:
            self.queried[sid] = 1
            for x in self.sets[sid]:
                self.element_counts[x] += 1
            self.log.append(sid)
        return bool(self._bits[sid])

    def known(self, sid: int) -> bool | None:
        if not self.queried[sid]:
            return None
        return bool(self._bits[sid])

    @property
    def queries_issued(self) -> int:
        return len(self.log)

    @property
    def max_element_queries(self) -> int:
        return max(self.element_counts) if self.element_counts else 0


def parse_model_text(text: str, n: int, m: int) -> ProbModel:
    """Parse the model file format.

    Header line `uniform p`, or `peredge` followed by m probability lines,
    or `vertexparams` followed by n probability lines.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty model section")
    head = lines[0].split()
    if head[0] == UNIFORM:
        if len(head) != 2:
            raise ValueError("uniform model needs a probability")
        return ProbModel.uniform(float(head[1]))
    if head[0] == PER_EDGE:
        if len(lines) < 1 + m:
            raise ValueError(f"peredge model needs {m} probability lines")
        return ProbModel.per_edge([float(x) for x in lines[1 : 1 + m]])
    if head[0] == VERTEX_PARAMS:
        if len(lines) < 1 + n:
            raise ValueError(f"vertexparams model needs {n} probability lines")
        return ProbModel.vertex_params([float(x) for x in lines[1 : 1 + n]])
    raise ValueError(f"unknown model header {head[0]!r}")


def format_model(model: ProbModel) -> str:
    if model.variant == UNIFORM:
        return f"uniform {model.p:g}\n"
    header = model.variant
    body = "\n".join(f"{x:.17g}" for x in model.values)
    return f"{header}\n{body}\n"
