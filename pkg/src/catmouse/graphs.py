"""Immutable graphs, shortest-path metric, ball covers, thin levels and generators.

Vertices are always the integers 0..n-1.  All graphs are simple, undirected
and connected; the constructor enforces this so every other module can rely
on it.  Distances come from a caching BFS oracle; a full all-pairs matrix is
built lazily for graphs small enough to afford n BFS runs.
"""

from __future__ import annotations

import math
import random
import re
import threading
from collections import OrderedDict, deque
from dataclasses import dataclass

import numpy as np


class GraphError(ValueError):
    """Invalid graph structure or graph operation input."""


class ParseError(GraphError):
    """Malformed edge-list text; the message names the offending line."""


def ceil_sqrt(x: int) -> int:
    """Smallest integer >= sqrt(x), computed exactly."""
    if x < 0:
        raise ValueError("ceil_sqrt of negative number")
    r = math.isqrt(x)
    return r if r * r == x else r + 1


class Graph:
    """Simple undirected connected graph over vertex ids 0..n-1.

    Adjacency lists are sorted ascending so iteration order is deterministic.
    Instances are immutable once constructed and safe to share across threads.
    """

    __slots__ = ("n", "adjacency", "edge_count", "_csr")

    def __init__(self, n: int, edges) -> None:
        if n < 1:
            raise GraphError(f"graph needs at least one vertex, got n={n}")
        seen: set[tuple[int, int]] = set()
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge ({u},{v})")
            seen.add(key)
            adj[u].append(v)
            adj[v].append(u)
        self.adjacency: tuple[tuple[int, ...], ...] = tuple(
            tuple(sorted(nbrs)) for nbrs in adj
        )
        self.n = n
        self.edge_count = len(seen)
        self._csr = None
        self._check_connected()

    def _check_connected(self) -> None:
        seen = bytearray(self.n)
        seen[0] = 1
        queue = deque([0])
        count = 1
        while queue:
            u = queue.popleft()
            for v in self.adjacency[u]:
                if not seen[v]:
                    seen[v] = 1
                    count += 1
                    queue.append(v)
        if count != self.n:
            raise GraphError(f"graph is disconnected ({count} of {self.n} reachable)")

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def closed_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR layout of closed neighborhoods N[v] = {v} ∪ N(v), for kernels."""
        if self._csr is None:
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            chunks = []
            for v in range(self.n):
                closed = sorted((v, *self.adjacency[v]))
                chunks.append(closed)
                indptr[v + 1] = indptr[v] + len(closed)
            indices = np.fromiter(
                (u for chunk in chunks for u in chunk), dtype=np.int64
            )
            indptr.flags.writeable = False
            indices.flags.writeable = False
            self._csr = (indptr, indices)
        return self._csr

    def edges(self) -> list[tuple[int, int]]:
        """All edges as (min, max) pairs, sorted."""
        out = []
        for u in range(self.n):
            for v in self.adjacency[u]:
                if u < v:
                    out.append((u, v))
        return sorted(out)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.adjacency == other.adjacency
        )

    def __hash__(self) -> int:
        return hash((self.n, self.adjacency))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count})"


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Distances from source to every vertex, as an int32 array.

    Entry `source` is 0; all entries are finite because the graph is
    connected.
    """
    if not (0 <= source < g.n):
        raise GraphError(f"source {source} out of range for n={g.n}")
    dist = [-1] * g.n
    dist[source] = 0
    queue = deque([source])
    adjacency = g.adjacency
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for v in adjacency[u]:
            if dist[v] < 0:
                dist[v] = du
                queue.append(v)
    row = np.array(dist, dtype=np.int32)
    row.flags.writeable = False
    return row


class DistanceOracle:
    """Caching distance oracle over a fixed graph.

    Single-source rows are cached with an LRU budget.  When the graph has at
    most `full_matrix_threshold` vertices, the full all-pairs matrix may be
    materialized (lazily, on first request) and rows are then served as views
    into it.  Cache fills are lock-protected so concurrent readers always
    observe correct distances.
    """

    def __init__(
        self,
        g: Graph,
        *,
        full_matrix_threshold: int = 4096,
        row_cache_size: int = 4096,
    ) -> None:
        self.graph = g
        self.full_matrix_threshold = full_matrix_threshold
        self.row_cache_size = row_cache_size
        self._rows: OrderedDict[int, np.ndarray] = OrderedDict()
        self._matrix: np.ndarray | None = None
        self._diameter: int | None = None
        self._lock = threading.Lock()
        self._thin_levels: dict[int, np.ndarray] = {}

    def row(self, v: int) -> np.ndarray:
        """Distance row from v (read-only)."""
        mat = self._matrix
        if mat is not None:
            return mat[v]
        with self._lock:
            cached = self._rows.get(v)
            if cached is not None:
                self._rows.move_to_end(v)
                return cached
        computed = bfs_distances(self.graph, v)
        with self._lock:
            self._rows[v] = computed
            self._rows.move_to_end(v)
            while len(self._rows) > self.row_cache_size:
                self._rows.popitem(last=False)
        return computed

    def distance(self, u: int, v: int) -> int:
        return int(self.row(u)[v])

    def full_matrix(self) -> np.ndarray:
        """All-pairs distance matrix (read-only), n x n int32."""
        if self._matrix is None:
            n = self.graph.n
            if n > self.full_matrix_threshold:
                raise GraphError(
                    f"full matrix refused: n={n} exceeds threshold "
                    f"{self.full_matrix_threshold}"
                )
            with self._lock:
                if self._matrix is None:
                    mat = np.empty((n, n), dtype=np.int32)
                    for v in range(n):
                        row = self._rows.get(v)
                        mat[v] = row if row is not None else bfs_distances(
                            self.graph, v
                        )
                    mat.flags.writeable = False
                    self._matrix = mat
                    self._rows.clear()
        return self._matrix

    def eccentricity(self, v: int) -> int:
        return int(self.row(v).max())

    def diameter(self) -> int:
        if self._diameter is None:
            self._diameter = max(
                self.eccentricity(v) for v in range(self.graph.n)
            )
        return self._diameter

    def thin_levels(self, K: int) -> np.ndarray:
        """Per-vertex smallest qualifying sphere level below K (-1 if none).

        Cached per K; used by the sphere-walk cat which needs the whole table.
        """
        table = self._thin_levels.get(K)
        if table is None:
            n = self.graph.n
            table = np.full(n, -1, dtype=np.int32)
            for v in range(n):
                lvl = thin_level(self.graph, v, K, oracle=self)
                if lvl is not None:
                    table[v] = lvl
            table.flags.writeable = False
            self._thin_levels[K] = table
        return table


def set_radius(g: Graph, members, oracle: DistanceOracle | None = None) -> tuple[int, int]:
    """Radius of a vertex set W and the vertex attaining it.

    Returns (radius, center) where radius = min over v in V of
    max over w in W of d(v, w).  The minimizing v ranges over ALL vertices,
    not just W; ties break to the lowest vertex id.
    """
    W = sorted(set(members))
    if not W:
        raise GraphError("set_radius of empty vertex set")
    if not (0 <= W[0] and W[-1] < g.n):
        raise GraphError("set_radius members out of range")
    if len(W) == 1:
        return 0, W[0]
    oracle = oracle or DistanceOracle(g)
    # max over w of d(v, w) for every v, via symmetric rows d(w, .)
    if len(W) <= 8 and g.n > oracle.full_matrix_threshold:
        worst = oracle.row(W[0]).copy()
        for w in W[1:]:
            np.maximum(worst, oracle.row(w), out=worst)
    else:
        worst = oracle.full_matrix().take(W, axis=1).max(axis=1)
    center = int(worst.argmin())
    return int(worst[center]), center


def diameter(g: Graph, oracle: DistanceOracle | None = None) -> int:
    """Largest distance between any pair of vertices, by n BFS runs."""
    oracle = oracle or DistanceOracle(g)
    return oracle.diameter()


def sphere(g: Graph, v: int, level: int, oracle: DistanceOracle | None = None) -> tuple[int, ...]:
    """Vertices at distance exactly `level` from v, ascending ids.

    Empty beyond the eccentricity of v; level 0 yields (v,).
    """
    if level < 0:
        raise GraphError(f"sphere level must be >= 0, got {level}")
    oracle = oracle or DistanceOracle(g)
    row = oracle.row(v)
    return tuple(int(w) for w in np.flatnonzero(row == level))


def thin_level(g: Graph, v: int, K: int, oracle: DistanceOracle | None = None) -> int | None:
    """Smallest level l with 1 <= l < K whose sphere around v has size < l/4.

    The comparison is the exact integer test 4*|sphere| < l.  Returns None
    when no such level exists below K (the caller must raise K).
    """
    if K < 1:
        raise GraphError(f"K must be >= 1, got {K}")
    oracle = oracle or DistanceOracle(g)
    row = oracle.row(v)
    counts = np.bincount(row, minlength=K)
    for level in range(1, K):
        if 4 * int(counts[level]) < level:
            return level
    return None


@dataclass(frozen=True)
class BallCover:
    """Centers u_1..u_L with a radius k such that the k-balls cover V."""

    centers: tuple[int, ...]
    radius_k: int

    @property
    def count(self) -> int:
        return len(self.centers)

    def validate(self, g: Graph, oracle: DistanceOracle | None = None) -> None:
        """Raise unless every vertex lies within radius_k of some center."""
        if not self.centers:
            raise GraphError("ball cover has no centers")
        oracle = oracle or DistanceOracle(g)
        nearest = oracle.row(self.centers[0]).copy()
        for c in self.centers[1:]:
            np.minimum(nearest, oracle.row(c), out=nearest)
        far = int(nearest.max())
        if far > self.radius_k:
            bad = int(nearest.argmax())
            raise GraphError(
                f"vertex {bad} at distance {far} > radius {self.radius_k} "
                "from every center"
            )


def scattered_cover(g: Graph, separation: int, oracle: DistanceOracle | None = None) -> BallCover:
    """Greedy maximal scattered set, returned as a ball cover.

    Scans vertices in ascending id and keeps v when it is at distance >=
    separation from every center chosen so far.  Maximality puts every vertex
    within separation - 1 of some center, so radius_k = separation - 1.
    """
    if separation < 1:
        raise GraphError(f"separation must be >= 1, got {separation}")
    oracle = oracle or DistanceOracle(g)
    nearest = np.full(g.n, np.iinfo(np.int32).max, dtype=np.int32)
    centers = []
    for v in range(g.n):
        if nearest[v] >= separation:
            centers.append(v)
            np.minimum(nearest, oracle.row(v), out=nearest)
    return BallCover(centers=tuple(centers), radius_k=separation - 1)


@dataclass(frozen=True)
class SpiderSpec:
    """Spider tree parameters: t branches of t vertices each, plus an
    optional padding branch of `extra` vertices."""

    t: int
    extra: int = 0

    def __post_init__(self) -> None:
        if self.t < 1:
            raise GraphError(f"spider needs t >= 1, got {self.t}")
        if self.extra < 0:
            raise GraphError(f"spider extra must be >= 0, got {self.extra}")

    @property
    def n(self) -> int:
        return self.t * self.t + 1 + self.extra

    def branch_of(self, v: int) -> int | None:
        """Branch id of vertex v: 1..t for main branches, t+1 for the padding
        branch, None for the center."""
        if v == 0:
            return None
        if v <= self.t * self.t:
            return (v - 1) // self.t + 1
        return self.t + 1

    def depth_of(self, v: int) -> int:
        """Distance from the center under the fixed id layout."""
        if v == 0:
            return 0
        if v <= self.t * self.t:
            return (v - 1) % self.t + 1
        return v - self.t * self.t

    def vertex_at(self, branch: int, depth: int) -> int:
        """Vertex id at the given depth (1-based) of a main branch; depth 0 is
        the center regardless of branch."""
        if depth == 0:
            return 0
        if not (1 <= branch <= self.t and 1 <= depth <= self.t):
            raise GraphError(f"no spider vertex at branch {branch}, depth {depth}")
        return 1 + (branch - 1) * self.t + (depth - 1)

    def spec_string(self) -> str:
        return f"spider:t={self.t},extra={self.extra}"


def gen_spider(spec: SpiderSpec) -> Graph:
    """Spider tree: center 0 with t branches of t vertices laid out
    contiguously, then the padding branch."""
    t, extra = spec.t, spec.extra
    edges = []
    for b in range(t):
        first = 1 + b * t
        edges.append((0, first))
        for k in range(t - 1):
            edges.append((first + k, first + k + 1))
    base = t * t
    if extra > 0:
        edges.append((0, base + 1))
        for k in range(extra - 1):
            edges.append((base + 1 + k, base + 2 + k))
    return Graph(spec.n, edges)


def gen_path(n: int) -> Graph:
    if n < 2:
        raise GraphError(f"path needs n >= 2, got {n}")
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def gen_cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError(f"cycle needs n >= 3, got {n}")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def gen_grid(rows: int, cols: int) -> Graph:
    """Grid graph in row-major vertex order."""
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise GraphError(f"grid needs rows,cols >= 1 and n >= 2, got {rows}x{cols}")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph(rows * cols, edges)


def gen_random_tree(n: int, seed: int) -> Graph:
    """Uniform random attachment tree: vertex v attaches to a uniformly
    chosen earlier vertex under the seeded generator."""
    if n < 2:
        raise GraphError(f"random tree needs n >= 2, got {n}")
    rng = random.Random(seed)
    return Graph(n, [(rng.randrange(v), v) for v in range(1, n)])


def gen_family(kind: str, params: dict, seed: int | None = None) -> Graph:
    """Dispatch generator for the benchmark families."""
    if kind == "path":
        return gen_path(int(params["n"]))
    if kind == "cycle":
        return gen_cycle(int(params["n"]))
    if kind == "grid":
        return gen_grid(int(params["rows"]), int(params["cols"]))
    if kind == "random_tree":
        if seed is None:
            seed = int(params["seed"])
        return gen_random_tree(int(params["n"]), seed)
    raise GraphError(f"unknown graph family {kind!r}")


_GRID_RE = re.compile(r"^(\d+)x(\d+)$")


def parse_graph_spec(spec: str) -> tuple[Graph, str]:
    """Build a graph from a compact spec string.

    Supported forms: "path:5" / "path:n=5", "cycle:10", "grid:3x4",
    "rt:n=100,seed=7", "spider:t=12,extra=0", "file:PATH".
    Returns (graph, canonical spec string).
    """
    kind, _, rest = spec.partition(":")
    kind = kind.strip()
    rest = rest.strip()

    def kv(defaults: dict[str, int]) -> dict[str, int]:
        out = dict(defaults)
        if rest:
            for part in rest.split(","):
                key, sep, val = part.partition("=")
                key = key.strip()
                if sep == "" or key not in out:
                    raise GraphError(f"bad graph spec field {part!r} in {spec!r}")
                try:
                    out[key] = int(val)
                except ValueError:
                    raise GraphError(
                        f"bad graph spec value {part!r} in {spec!r}"
                    ) from None
        return out

    if kind in ("path", "cycle"):
        raw = rest
        if "=" in rest:
            key, _, raw = rest.partition("=")
            if key.strip() != "n":
                raise GraphError(f"bad graph spec field {rest!r} in {spec!r}")
        try:
            n = int(raw)
        except ValueError:
            raise GraphError(f"bad vertex count {raw!r} in {spec!r}") from None
        g = gen_path(n) if kind == "path" else gen_cycle(n)
        return g, f"{kind}:n={n}"
    if kind == "grid":
        m = _GRID_RE.match(rest)
        if not m:
            raise GraphError(f"grid spec must look like grid:RxC, got {spec!r}")
        rows, cols = int(m.group(1)), int(m.group(2))
        return gen_grid(rows, cols), f"grid:{rows}x{cols}"
    if kind == "rt":
        params = kv({"n": 0, "seed": 0})
        g = gen_random_tree(params["n"], params["seed"])
        return g, f"rt:n={params['n']},seed={params['seed']}"
    if kind == "spider":
        params = kv({"t": 0, "extra": 0})
        sp = SpiderSpec(params["t"], params["extra"])
        return gen_spider(sp), sp.spec_string()
    if kind == "file":
        with open(rest, "r", encoding="utf-8") as fh:
            return parse_graph(fh.read()), spec
    raise GraphError(f"unknown graph spec kind {kind!r} in {spec!r}")


def parse_graph(text: str) -> Graph:
    """Parse the edge-list text format: header "n m", then m lines "u v".

    Lines starting with '#' are ignored.  Rejects self-loops, duplicate
    edges, disconnected graphs and malformed lines, naming the line.
    """
    lines = text.splitlines()
    header = None
    edges = []
    header_line = 0
    for idx, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {idx}: expected two integers, got {raw!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"line {idx}: expected two integers, got {raw!r}") from None
        if header is None:
            header = (a, b)
            header_line = idx
        else:
            edges.append((idx, a, b))
    if header is None:
        raise ParseError("line 1: missing header 'n m'")
    n, m = header
    if n < 1 or m < 0:
        raise ParseError(f"line {header_line}: invalid header n={n} m={m}")
    if len(edges) != m:
        raise ParseError(
            f"line {header_line}: header declares {m} edges, found {len(edges)}"
        )
    seen = set()
    pairs = []
    for idx, u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"line {idx}: edge ({u},{v}) out of range for n={n}")
        if u == v:
            raise ParseError(f"line {idx}: self-loop {u}-{v}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(f"line {idx}: duplicate edge {u}-{v}")
        seen.add(key)
        pairs.append((u, v))
    try:
        return Graph(n, pairs)
    except GraphError as exc:
        raise ParseError(f"line {header_line}: {exc}") from None


def write_graph(g: Graph) -> str:
    """Edge-list text for g; round-trips through parse_graph.

    Edges are emitted sorted by (min endpoint, max endpoint).
    """
    out = [f"{g.n} {g.edge_count}"]
    out.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(out) + "\n"
