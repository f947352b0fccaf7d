"""Directed feedback graphs and their structural quantities.

Vertices are 1-indexed at every public boundary (``V = {1, ..., K}``); the
boolean adjacency matrix and the bitmasks used by the enumerators are
0-indexed.  Edge ``(i, j)`` means that playing ``i`` reveals the loss of
``j``.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .errors import (
    BadParameterError,
    InvalidDominatingSetError,
    TooLargeError,
    UncoverableTargetError,
)

DEFAULT_DELTA_CAP = 16
DEFAULT_ALPHA_CAP = 20


@dataclass(frozen=True)
class FeedbackGraph:
    """Directed graph over ``num_arms`` vertices.

    Parameters
    ----------
    num_arms : int
        Number of vertices ``K`` (at least 2).
    edges : iterable of (int, int)
        Ordered pairs ``(i, j)`` with 1-indexed endpoints.
    """

    num_arms: int
    edges: frozenset
    adjacency: np.ndarray = field(init=False, repr=False, compare=False)
    _in: tuple = field(init=False, repr=False, compare=False)
    _out: tuple = field(init=False, repr=False, compare=False)

    def __init__(self, num_arms: int, edges: Iterable):
        k = int(num_arms)
        if k < 2:
            raise BadParameterError(f"a feedback graph needs at least 2 vertices, got {num_arms}")
        edge_set = frozenset((int(i), int(j)) for i, j in edges)
        for i, j in edge_set:
            if not (1 <= i <= k and 1 <= j <= k):
                raise BadParameterError(f"edge ({i}, {j}) has an endpoint outside 1..{k}")
        adj = np.zeros((k, k), dtype=bool)
        for i, j in edge_set:
            adj[i - 1, j - 1] = True
        adj.setflags(write=False)
        object.__setattr__(self, "num_arms", k)
        object.__setattr__(self, "edges", edge_set)
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(
            self, "_out", tuple(frozenset(int(j) + 1 for j in np.flatnonzero(adj[i])) for i in range(k))
        )
        object.__setattr__(
            self, "_in", tuple(frozenset(int(j) + 1 for j in np.flatnonzero(adj[:, i])) for i in range(k))
        )

    @classmethod
    def from_adjacency(cls, adjacency) -> "FeedbackGraph":
        adj = np.asarray(adjacency, dtype=bool)
        rows, cols = np.nonzero(adj)
        return cls(adj.shape[0], zip((rows + 1).tolist(), (cols + 1).tolist()))

    @property
    def vertices(self) -> range:
        return range(1, self.num_arms + 1)

    def in_neighbors(self, i: int) -> frozenset:
        """``N_in(i) = {j | (j, i) in E}``."""
        return self._in[i - 1]

    def out_neighbors(self, i: int) -> frozenset:
        """``N_out(i) = {j | (i, j) in E}``."""
        return self._out[i - 1]

    def has_self_loop(self, i: int) -> bool:
        return bool(self.adjacency[i - 1, i - 1])

    def out_masks(self) -> list:
        """Out-neighbourhoods as integer bitmasks (bit ``j-1`` set for ``j``)."""
        return [sum(1 << int(j) for j in np.flatnonzero(row)) for row in self.adjacency]

    def relabel(self, permutation) -> "FeedbackGraph":
        """Graph with vertex ``i`` renamed to ``permutation[i-1]``."""
        perm = [int(v) for v in permutation]
        if sorted(perm) != list(self.vertices):
            raise BadParameterError("permutation must be a rearrangement of 1..K")
        return FeedbackGraph(self.num_arms, ((perm[i - 1], perm[j - 1]) for i, j in self.edges))

    def induced_subgraph(self, vertices: Iterable[int]) -> "FeedbackGraph":
        """Subgraph on ``vertices``, relabelled to ``1..len(vertices)`` in sorted order."""
        keep = sorted(set(vertices))
        index = {v: n + 1 for n, v in enumerate(keep)}
        return FeedbackGraph(
            len(keep), ((index[i], index[j]) for i, j in self.edges if i in index and j in index)
        )

    def to_json(self) -> dict:
        return {"k": self.num_arms, "edges": [list(e) for e in sorted(self.edges)]}

    @classmethod
    def from_json(cls, obj: dict) -> "FeedbackGraph":
        try:
            return cls(obj["k"], (tuple(e) for e in obj["edges"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, BadParameterError):
                raise
            raise BadParameterError(f"malformed graph document: {exc}") from exc


# ---------------------------------------------------------------------------
# Observability


class Observability(str, enum.Enum):
    STRONGLY_OBSERVABLE = "strongly_observable"
    WEAKLY_OBSERVABLE = "weakly_observable"
    UNOBSERVABLE = "unobservable"


@dataclass(frozen=True)
class ObservabilityClass:
    tag: Observability
    has_self_loop: tuple
    observed_by_all_others: tuple
    weakly_observable_vertex: tuple
    unobserved: tuple

    @property
    def weakly_observable_vertices(self) -> frozenset:
        """The set ``W`` of vertices that are observable but not strongly so."""
        return frozenset(i + 1 for i, flag in enumerate(self.weakly_observable_vertex) if flag)

    @property
    def unobserved_vertices(self) -> frozenset:
        """Vertices no arm observes."""
        return frozenset(i + 1 for i, flag in enumerate(self.unobserved) if flag)

    @property
    def is_observable(self) -> bool:
        return self.tag is not Observability.UNOBSERVABLE


def classify_observability(g: FeedbackGraph) -> ObservabilityClass:
    adj = g.adjacency
    k = g.num_arms
    self_loop = np.diag(adj).copy()
    in_deg_others = adj.sum(axis=0) - self_loop
    by_all = in_deg_others == k - 1
    unobserved = adj.sum(axis=0) == 0
    weak = ~self_loop & ~by_all & ~unobserved
    if unobserved.any():
        tag = Observability.UNOBSERVABLE
    elif (self_loop | by_all).all():
        tag = Observability.STRONGLY_OBSERVABLE
    else:
        tag = Observability.WEAKLY_OBSERVABLE
    as_tuple = lambda a: tuple(bool(x) for x in a)  # noqa: E731
    return ObservabilityClass(tag, as_tuple(self_loop), as_tuple(by_all), as_tuple(weak), as_tuple(unobserved))


# ---------------------------------------------------------------------------
# Weak domination


class DominationDefinition(str, enum.Enum):
    """Which vertices a weakly dominating set must cover.

    ``NO_SELF_LOOP`` targets every vertex without a self-loop;
    ``WEAKLY_OBSERVABLE`` targets only the weakly observable vertices.
    """

    NO_SELF_LOOP = "no_self_loop"
    WEAKLY_OBSERVABLE = "weakly_observable"


def _definition(definition) -> DominationDefinition:
    try:
        return DominationDefinition(definition)
    except ValueError:
        raise BadParameterError(f"unknown domination definition {definition!r}") from None


def domination_targets(g: FeedbackGraph, definition=DominationDefinition.NO_SELF_LOOP) -> frozenset:
    definition = _definition(definition)
    if definition is DominationDefinition.NO_SELF_LOOP:
        return frozenset(i for i in g.vertices if not g.has_self_loop(i))
    return classify_observability(g).weakly_observable_vertices


def _check_coverable(g: FeedbackGraph, targets) -> None:
    bad = sorted(i for i in targets if not g.in_neighbors(i))
    if bad:
        raise UncoverableTargetError(f"vertices {bad} have no in-neighbours")


def _mask(vertices) -> int:
    m = 0
    for v in vertices:
        m |= 1 << (v - 1)
    return m


def weakly_dominating_set_greedy(g: FeedbackGraph, definition=DominationDefinition.NO_SELF_LOOP) -> frozenset:
    """Greedy set cover of the domination targets.

    Each step takes the vertex whose out-neighbourhood covers the most
    still-uncovered targets; ties go to the lowest index.
    """
    targets = domination_targets(g, definition)
    _check_coverable(g, targets)
    uncovered = _mask(targets)
    masks = g.out_masks()
    chosen = set()
    while uncovered:
        gains = [bin(m & uncovered).count("1") for m in masks]
        best = int(np.argmax(gains))
        chosen.add(best + 1)
        uncovered &= ~masks[best]
    return frozenset(chosen)


def weakly_dominating_set_exact(
    g: FeedbackGraph, definition=DominationDefinition.NO_SELF_LOOP, max_k: int = DEFAULT_DELTA_CAP
) -> frozenset:
    """Minimum-cardinality weakly dominating set.

    Subsets are enumerated by increasing size in lexicographic order, so the
    result is the lexicographically smallest among all minimum covers.
    """
    if g.num_arms > max_k:
        raise TooLargeError(f"K={g.num_arms} exceeds the exact-domination cap {max_k}")
    targets = domination_targets(g, definition)
    _check_coverable(g, targets)
    target_mask = _mask(targets)
    if not target_mask:
        return frozenset()
    masks = g.out_masks()
    for size in range(1, g.num_arms + 1):
        for combo in itertools.combinations(range(g.num_arms), size):
            covered = 0
            for v in combo:
                covered |= masks[v]
            if covered & target_mask == target_mask:
                return frozenset(v + 1 for v in combo)
    raise AssertionError("unreachable: every target has an in-neighbour")


def covers_targets(g: FeedbackGraph, d: Iterable[int], definition=DominationDefinition.NO_SELF_LOOP) -> bool:
    covered = set()
    for i in d:
        covered |= g.out_neighbors(i)
    return domination_targets(g, definition) <= covered


# ---------------------------------------------------------------------------
# Independence number


def _conflict_masks(g: FeedbackGraph) -> list:
    """Undirected conflict graph: u ~ v iff an edge joins them in either direction."""
    sym = g.adjacency | g.adjacency.T
    np.fill_diagonal(sym, False)
    return [_mask(int(j) + 1 for j in np.flatnonzero(row)) for row in sym]


def _max_independent_set_size(nbr: list) -> int:
    best = 0

    def popcount(x: int) -> int:
        return bin(x).count("1")

    def expand(cand: int, size: int) -> None:
        nonlocal best
        # vertices with no neighbour among the candidates are always taken
        while cand:
            isolated = 0
            c = cand
            while c:
                low = c & -c
                v = low.bit_length() - 1
                if not (nbr[v] & cand):
                    isolated |= low
                c ^= low
            if not isolated:
                break
            size += popcount(isolated)
            cand &= ~isolated
        if size + popcount(cand) <= best:
            return
        if not cand:
            best = size
            return
        # branch on the candidate with the most conflicts
        c, pivot, pivot_deg = cand, -1, -1
        while c:
            low = c & -c
            v = low.bit_length() - 1
            deg = popcount(nbr[v] & cand)
            if deg > pivot_deg:
                pivot, pivot_deg = v, deg
            c ^= low
        expand(cand & ~(1 << pivot) & ~nbr[pivot], size + 1)
        expand(cand & ~(1 << pivot), size)

    expand((1 << len(nbr)) - 1, 0)
    return best


def greedy_independent_set(g: FeedbackGraph) -> frozenset:
    """Minimum-residual-degree greedy independent set (ties to lowest index)."""
    nbr = _conflict_masks(g)
    remaining = (1 << g.num_arms) - 1
    chosen = []
    while remaining:
        best_v, best_deg = -1, None
        for v in range(g.num_arms):
            if remaining >> v & 1:
                deg = bin(nbr[v] & remaining).count("1")
                if best_deg is None or deg < best_deg:
                    best_v, best_deg = v, deg
        chosen.append(best_v + 1)
        remaining &= ~(1 << best_v) & ~nbr[best_v]
    return frozenset(chosen)


def independence_number(g: FeedbackGraph, mode: str = "exact", max_k: int = DEFAULT_ALPHA_CAP) -> tuple:
    """Bounds ``(alpha_lower, alpha_upper)`` on the independence number.

    ``mode="exact"`` runs branch-and-bound and returns ``(alpha, alpha)``;
    ``mode="greedy"`` returns the greedy size and the trivial bound ``K``.
    Self-loops never exclude a vertex; an edge in either direction excludes
    the pair.
    """
    if mode == "exact":
        if g.num_arms > max_k:
            raise TooLargeError(f"K={g.num_arms} exceeds the exact-alpha cap {max_k}")
        alpha = _max_independent_set_size(_conflict_masks(g))
        return alpha, alpha
    if mode == "greedy":
        return len(greedy_independent_set(g)), g.num_arms
    raise BadParameterError(f"unknown independence-number mode {mode!r}")


# ---------------------------------------------------------------------------
# V1 / V2 split and the bundled analysis


def partition_v1_v2(g: FeedbackGraph, d: Iterable[int], definition=DominationDefinition.NO_SELF_LOOP) -> tuple:
    """Split ``V`` into ``V1`` (union of out-neighbourhoods of ``d``) and ``V2``.

    Under the no-self-loop definition every ``V2`` vertex must carry a
    self-loop; :class:`InvalidDominatingSetError` is raised otherwise.
    """
    d = frozenset(d)
    if not d <= set(g.vertices):
        raise BadParameterError(f"dominating set {sorted(d)} is not a subset of 1..{g.num_arms}")
    v1 = frozenset().union(*(g.out_neighbors(i) for i in d)) if d else frozenset()
    v2 = frozenset(g.vertices) - v1
    if _definition(definition) is DominationDefinition.NO_SELF_LOOP:
        loopless = sorted(i for i in v2 if not g.has_self_loop(i))
        if loopless:
            raise InvalidDominatingSetError(
                f"vertices {loopless} are left in V2 without a self-loop; D={sorted(d)} does not dominate them"
            )
    return v1, v2


@dataclass(frozen=True)
class GraphAnalysis:
    observability: ObservabilityClass
    dominating_set: frozenset
    v1: frozenset
    v2: frozenset
    alpha_lower: int
    alpha_upper: int
    alpha_exact: Optional[int] = None
    alpha2: Optional[int] = None
    definition: DominationDefinition = DominationDefinition.NO_SELF_LOOP

    @property
    def delta_used(self) -> int:
        return len(self.dominating_set)

    @property
    def k_prime(self) -> int:
        return len(self.v2)


def analyze_graph(
    g: FeedbackGraph,
    dominating_set="auto",
    definition=DominationDefinition.NO_SELF_LOOP,
    delta_cap: int = DEFAULT_DELTA_CAP,
    alpha_cap: int = DEFAULT_ALPHA_CAP,
) -> GraphAnalysis:
    """Compute observability, a weakly dominating set, the V1/V2 split and alpha bounds.

    With ``dominating_set="auto"`` the exact minimum is used when ``K`` is at
    most ``delta_cap`` and the greedy cover otherwise.  Strongly observable
    graphs get an empty dominating set.
    """
    definition = _definition(definition)
    obs = classify_observability(g)
    if isinstance(dominating_set, str):
        if dominating_set != "auto":
            raise BadParameterError(f"dominating_set must be 'auto' or a vertex list, got {dominating_set!r}")
        if obs.tag is Observability.WEAKLY_OBSERVABLE:
            if g.num_arms <= delta_cap:
                d = weakly_dominating_set_exact(g, definition, max_k=delta_cap)
            else:
                d = weakly_dominating_set_greedy(g, definition)
        else:
            d = frozenset()
    else:
        d = frozenset(int(v) for v in dominating_set)
        if not covers_targets(g, d, definition):
            raise InvalidDominatingSetError(f"{sorted(d)} does not cover the {definition.value} targets")
    if obs.tag is Observability.WEAKLY_OBSERVABLE or d:
        v1, v2 = partition_v1_v2(g, d, definition)
    else:
        v1, v2 = frozenset(), frozenset(g.vertices)

    if g.num_arms <= alpha_cap:
        lo, hi = independence_number(g, "exact", max_k=alpha_cap)
        exact = lo
    else:
        lo, hi = independence_number(g, "greedy")
        exact = None

    alpha2 = None
    if obs.tag is Observability.WEAKLY_OBSERVABLE and v2:
        sub = g.induced_subgraph(v2) if len(v2) >= 2 else None
        if sub is None:
            alpha2 = 1
        elif sub.num_arms <= alpha_cap:
            alpha2 = independence_number(sub, "exact", max_k=alpha_cap)[0]
        else:
            alpha2 = independence_number(sub, "greedy")[0]
    return GraphAnalysis(obs, d, v1, v2, lo, hi, exact, alpha2, definition)


# ---------------------------------------------------------------------------
# Catalogue and I/O


def bandit(k: int) -> FeedbackGraph:
    return FeedbackGraph(k, ((i, i) for i in range(1, k + 1)))


def full_feedback(k: int) -> FeedbackGraph:
    return FeedbackGraph(k, itertools.product(range(1, k + 1), repeat=2))


def loopless_clique(k: int) -> FeedbackGraph:
    return FeedbackGraph(k, ((i, j) for i, j in itertools.product(range(1, k + 1), repeat=2) if i != j))


def revealing_action(k: int) -> FeedbackGraph:
    """Vertex 1 reveals every loss (its own included); vertices 2..K reveal nothing."""
    return FeedbackGraph(k, ((1, j) for j in range(1, k + 1)))


def total_order(k: int) -> FeedbackGraph:
    return FeedbackGraph(k, ((i, j) for i, j in itertools.product(range(1, k + 1), repeat=2) if i >= j))


def random_graph(k: int, p: float, seed: int) -> FeedbackGraph:
    """Each ordered pair kept with probability ``p``; self-loops always present."""
    if not 0.0 <= p <= 1.0:
        raise BadParameterError(f"edge probability must lie in [0, 1], got {p}")
    if k < 2:
        raise BadParameterError(f"K must be at least 2, got {k}")
    adj = np.random.default_rng(seed).random((k, k)) < p
    np.fill_diagonal(adj, True)
    return FeedbackGraph.from_adjacency(adj)


_FAMILIES = {
    "bandit": bandit,
    "full_feedback": full_feedback,
    "loopless_clique": loopless_clique,
    "revealing_action": revealing_action,
    "total_order": total_order,
}


def graph_catalog(name: str, k: int, p: float = 0.5, seed: int = 0) -> FeedbackGraph:
    if name == "random":
        return random_graph(k, p, seed)
    try:
        family = _FAMILIES[name]
    except KeyError:
        raise BadParameterError(f"unknown graph family {name!r}") from None
    if k < 2:
        raise BadParameterError(f"K must be at least 2, got {k}")
    return family(k)


def parse_graph_spec(spec: str) -> FeedbackGraph:
    """Build a catalogue graph from ``"family:K"`` or ``"random:K:p:seed"``."""
    parts = spec.strip().split(":")
    try:
        if parts[0] == "random":
            if len(parts) != 4:
                raise ValueError("expected random:K:p:seed")
            return random_graph(int(parts[1]), float(parts[2]), int(parts[3]))
        if len(parts) != 2:
            raise ValueError("expected family:K")
        return graph_catalog(parts[0], int(parts[1]))
    except ValueError as exc:
        if isinstance(exc, BadParameterError):
            raise
        raise BadParameterError(f"cannot parse graph spec {spec!r}: {exc}") from exc


def load_graph(source) -> FeedbackGraph:
    """Graph from a catalogue spec string, a JSON dict, or a path to a JSON file."""
    if isinstance(source, FeedbackGraph):
        return source
    if isinstance(source, dict):
        return FeedbackGraph.from_json(source)
    text = str(source)
    if text.endswith(".json") or Path(text).is_file():
        try:
            obj = json.loads(Path(text).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise BadParameterError(f"cannot read graph file {text}: {exc}") from exc
        return FeedbackGraph.from_json(obj)
    return parse_graph_spec(text)
