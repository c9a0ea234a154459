"""Independent oracles: brute-force belief tracking and an exhaustive
belief-state game solver for tiny instances.

Both are deliberately written against their own BFS and their own set-based
update so that agreement with the engine's incremental numpy kernel is a
meaningful check rather than a tautology.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .engine import BeliefSet, CatStrategy, IllegalFeedbackError
from .graphs import Graph, GraphError


class SizeGuardError(GraphError):
    """The requested instance exceeds the oracle's exhaustive-search guard."""


def _bfs_map(g: Graph, source: int) -> list[int]:
    dist = [-1] * g.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


class _DistCache:
    def __init__(self, g: Graph) -> None:
        self.g = g
        self.rows: dict[int, list[int]] = {}

    def row(self, v: int) -> list[int]:
        row = self.rows.get(v)
        if row is None:
            row = _bfs_map(self.g, v)
            self.rows[v] = row
        return row


def _step_sets(g: Graph, dists: _DistCache, members: set, c_prev: int, c_cur: int, bit: int) -> set:
    """One layered-reachability step over consistent lazy walks."""
    row_prev = dists.row(c_prev)
    row_cur = dists.row(c_cur)
    want = bit == 1
    out = set()
    for u in members:
        du = row_prev[u]
        for v in (u, *g.adjacency[u]):
            if v not in out and (row_cur[v] <= du) == want:
                out.add(v)
    return out


def brute_force_beliefs(g: Graph, queries, bits) -> list[BeliefSet]:
    """Exact belief sequence from a query/bit record, by forward reachability
    over the layered graph of (step, vertex) states.

    `queries` lists c_1..c_h; `bits` lists b_2..b_h.  Returns the 1-based
    belief list [None, M_1, ..., M_h].  Guarded against instances too large
    to enumerate.
    """
    h = len(queries)
    if len(bits) != h - 1:
        raise GraphError(
            f"need one bit per step after the first: got {len(bits)} bits "
            f"for {h} queries"
        )
    if g.n * h > 2_000_000:
        raise SizeGuardError(f"brute force refused: n*h = {g.n * h} too large")
    dists = _DistCache(g)
    members = set(range(g.n))
    out: list = [None, BeliefSet.of(g.n, members, step=1)]
    for j in range(1, h):
        members = _step_sets(g, dists, members, queries[j - 1], queries[j], bits[j - 1])
        if not members:
            raise IllegalFeedbackError(f"brute force: belief emptied at step {j + 1}")
        out.append(BeliefSet.of(g.n, members, step=j + 1))
    return out


def consistent_trajectory(g: Graph, queries, bits, endpoint: int | None = None) -> list[int]:
    """A lazy walk m_1..m_h consistent with every bit, ending at `endpoint`
    (default: the lowest vertex in the final belief set)."""
    h = len(queries)
    dists = _DistCache(g)
    layers = [set(range(g.n))]
    parents: list[dict[int, int]] = [{}]
    members = layers[0]
    for j in range(1, h):
        row_prev = dists.row(queries[j - 1])
        row_cur = dists.row(queries[j])
        want = bits[j - 1] == 1
        nxt: set[int] = set()
        par: dict[int, int] = {}
        for u in members:
            du = row_prev[u]
            for v in (u, *g.adjacency[u]):
                if v not in par and (row_cur[v] <= du) == want:
                    par[v] = u
                    nxt.add(v)
        if not nxt:
            raise IllegalFeedbackError(f"no consistent trajectory through step {j + 1}")
        layers.append(nxt)
        parents.append(par)
        members = nxt
    if endpoint is None:
        endpoint = min(members)
    elif endpoint not in members:
        raise GraphError(f"vertex {endpoint} is not consistent with the record")
    path = [endpoint]
    for j in range(h - 1, 0, -1):
        path.append(parents[j][path[-1]])
    path.reverse()
    return path


def _radius_of(g: Graph, dists: _DistCache, members) -> int:
    best = None
    for v in range(g.n):
        row = dists.row(v)
        worst = max(row[w] for w in members)
        if best is None or worst < best:
            best = worst
    return best


@dataclass
class SolverResult:
    """Outcome of the exhaustive belief-state search."""

    winner: str  # "cat_wins" | "mouse_wins"
    d: int
    horizon: int
    root_query: int | None
    policy: dict = field(default_factory=dict)
    _ctx: "GameSolver | None" = None

    def extract_cat(self) -> "SolverCat":
        if self.winner != "cat_wins":
            raise GraphError("no cat strategy to extract: the mouse wins")
        return SolverCat(self._ctx, self)


class GameSolver:
    """Memoized alternating search over (belief set, previous query) states.

    The cat picks the next query; the adversary answers with any feedback
    bit whose update is non-empty (each such bit is realized by an actual
    lazy walk, so legal bits and real mice quantify over the same set).
    The cat wins when it can force the belief radius down to d within the
    horizon.
    """

    MAX_N = 10
    MAX_HORIZON = 8

    def __init__(self, g: Graph, d: int, horizon: int) -> None:
        if g.n > self.MAX_N or horizon > self.MAX_HORIZON:
            raise SizeGuardError(
                f"exhaustive solver refused: n={g.n} (max {self.MAX_N}), "
                f"horizon={horizon} (max {self.MAX_HORIZON})"
            )
        if horizon < 1:
            raise GraphError(f"horizon must be >= 1, got {horizon}")
        self.g = g
        self.d = d
        self.horizon = horizon
        self.dists = _DistCache(g)
        self.nbhd_masks = [
            (1 << v) | sum(1 << u for u in g.adjacency[v]) for v in range(g.n)
        ]
        self.full_mask = (1 << g.n) - 1
        self._rad: dict[int, int] = {}
        self._win: dict[tuple[int, int, int], bool] = {}
        self.policy: dict[tuple[int, int, int], int] = {}

    def members(self, mask: int) -> list[int]:
        return [v for v in range(self.g.n) if (mask >> v) & 1]

    def radius(self, mask: int) -> int:
        r = self._rad.get(mask)
        if r is None:
            r = _radius_of(self.g, self.dists, self.members(mask))
            self._rad[mask] = r
        return r

    def update(self, mask: int, c_prev: int, c_cur: int, bit: int) -> int:
        row_prev = self.dists.row(c_prev)
        row_cur = self.dists.row(c_cur)
        want = bit == 1
        out = 0
        for u in self.members(mask):
            du = row_prev[u]
            cand = self.nbhd_masks[u] & ~out
            while cand:
                low = cand & -cand
                v = low.bit_length() - 1
                if (row_cur[v] <= du) == want:
                    out |= low
                cand ^= low
        return out

    def win(self, mask: int, prev: int, used: int) -> bool:
        """Can the cat force success at some step in (used, horizon]?"""
        if used >= self.horizon:
            return False
        key = (mask, prev, used)
        cached = self._win.get(key)
        if cached is not None:
            return cached
        result = False
        for cur in range(self.g.n):
            any_legal = False
            all_good = True
            for bit in (0, 1):
                nm = self.update(mask, prev, cur, bit)
                if nm == 0:
                    continue
                any_legal = True
                if self.radius(nm) <= self.d:
                    continue
                if not self.win(nm, cur, used + 1):
                    all_good = False
                    break
            if any_legal and all_good:
                self.policy[key] = cur
                result = True
                break
        self._win[key] = result
        return result

    def refuting_bit(self, mask: int, prev: int, used: int, cur: int) -> tuple[int, int]:
        """A legal bit that keeps the mouse winning against query `cur`."""
        for bit in (0, 1):
            nm = self.update(mask, prev, cur, bit)
            if nm == 0:
                continue
            if self.radius(nm) <= self.d:
                continue
            if not self.win(nm, cur, used + 1):
                return bit, nm
        raise AssertionError("no refuting bit from a mouse-winning state")

    def solve(self) -> SolverResult:
        if self.radius(self.full_mask) <= self.d:
            # Localized before any information: success at step 1.
            return SolverResult("cat_wins", self.d, self.horizon, None, {}, self)
        for c1 in range(self.g.n):
            if self.win(self.full_mask, c1, 1):
                return SolverResult(
                    "cat_wins", self.d, self.horizon, c1, dict(self.policy), self
                )
        return SolverResult("mouse_wins", self.d, self.horizon, None, {}, self)


def exhaustive_game_value(g: Graph, horizon: int, d: int) -> SolverResult:
    """Value of the localization game on a tiny instance; see GameSolver."""
    return GameSolver(g, d, horizon).solve()


class SolverCat(CatStrategy):
    """Replays a winning policy extracted from the exhaustive solver."""

    def __init__(self, solver: GameSolver, result: SolverResult) -> None:
        self.solver = solver
        self.result = result
        self.spec = "solver"
        self._mask = solver.full_mask
        self._prev = 0
        self._used = 0
        self._last = 0

    def first_query(self) -> int:
        q = self.result.root_query if self.result.root_query is not None else 0
        self._mask = self.solver.full_mask
        self._prev = q
        self._used = 1
        self._last = q
        return q

    def next_query(self, bit: int | None) -> int:
        if bit is not None:
            nm = self.solver.update(self._mask, self._prev, self._last, bit)
            if nm:
                self._mask = nm
            self._used += 1
            self._prev = self._last
        if self.solver.radius(self._mask) <= self.solver.d:
            q = self._prev  # already localized; hold
        else:
            q = self.result.policy.get((self._mask, self._prev, self._used), self._prev)
        self._last = q
        return q

    def snapshot(self) -> tuple:
        return (self._mask, self._prev, self._used, self._last)

    def restore(self, state: tuple) -> None:
        self._mask, self._prev, self._used, self._last = state


def winning_bit_paths(result: SolverResult) -> list[tuple[list[int], list[int]]]:
    """All (queries, bits) records that can occur when the winning cat plays
    its policy, one per leaf of the won subtree (success reached)."""
    solver = result._ctx
    if result.winner != "cat_wins":
        raise GraphError("the cat does not win this instance")
    if result.root_query is None:
        return [([0], [])]  # localized at step 1; any single query does
    out: list[tuple[list[int], list[int]]] = []

    def walk(mask: int, prev: int, used: int, queries: list[int], bits: list[int]) -> None:
        cur = result.policy[(mask, prev, used)]
        for bit in (0, 1):
            nm = solver.update(mask, prev, cur, bit)
            if nm == 0:
                continue
            q2, b2 = queries + [cur], bits + [bit]
            if solver.radius(nm) <= solver.d:
                out.append((q2, b2))
            else:
                walk(nm, cur, used + 1, q2, b2)

    walk(solver.full_mask, result.root_query, 1, [result.root_query], [])
    return out


def adversarial_record(result: SolverResult, cat: CatStrategy, horizon: int) -> tuple[list[int], list[int]]:
    """Queries and bits produced when the given cat plays against the
    solver's bit adversary from a mouse-winning root."""
    solver = result._ctx
    if result.winner != "mouse_wins":
        raise GraphError("the mouse does not win this instance")
    clone = cat.clone()
    queries = [clone.first_query()]
    bits: list[int] = []
    mask, prev, used = solver.full_mask, queries[0], 1
    for step in range(2, horizon + 1):
        cur = clone.next_query(bits[-1] if step >= 3 else None)
        bit, mask = solver.refuting_bit(mask, prev, used, cur)
        queries.append(cur)
        bits.append(bit)
        prev = cur
        used += 1
    return queries, bits
