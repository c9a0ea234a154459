"""Cat strategies: ball-cover elimination, sphere-walk descent, their sqrt-n
composition, and deterministic baselines.

Both core strategies query in pairs (odd step, even step) and make their
decision from the bit that compares the pair's two queries; the cross-pair
bit delivered before an even query carries no information for them and is
ignored.
"""

from __future__ import annotations

import hashlib
import math

from .engine import CatStrategy
from .graphs import (
    BallCover,
    DistanceOracle,
    Graph,
    GraphError,
    ceil_sqrt,
    scattered_cover,
    sphere,
)


class BallCoverCat(CatStrategy):
    """Pairwise elimination over the centers of a ball cover.

    Round i (steps 2i-1, 2i) queries the current champion, then center i+1.
    A bit of 1 after the pair promotes the challenger.  After round L-1 the
    final champion is queried forever, which keeps the belief radius bounded
    on longer horizons.  For every legal mouse the champion ends within
    4L + k of the mouse's position at step 2L-1.
    """

    def __init__(self, g: Graph, cover: BallCover, oracle: DistanceOracle | None = None) -> None:
        if not cover.centers:
            raise GraphError("ball-cover cat needs at least one center")
        cover.validate(g, oracle)
        self.graph = g
        self.cover = cover
        self.centers = cover.centers
        self.L = cover.count
        self.k = cover.radius_k
        self.spec = f"fat:L={self.L},k={self.k}"
        self._emitted = 0
        self._champ = 1  # 1-based index into centers

    @property
    def champion_vertex(self) -> int:
        return self.centers[self._champ - 1]

    @property
    def guarantee(self) -> int:
        """Distance bound the final champion satisfies: 4L + k."""
        return 4 * self.L + self.k

    def _query_at(self, t: int) -> int:
        if t % 2 == 0:
            i = t // 2
            if i <= self.L - 1:
                return self.centers[i]  # challenger u_{i+1} of round i
        return self.centers[self._champ - 1]

    def first_query(self) -> int:
        self._emitted = 1
        return self._query_at(1)

    def next_query(self, bit: int | None) -> int:
        t = self._emitted + 1
        # The bit arriving before an odd query decided round t//2.
        if bit is not None and t % 2 == 1:
            i = (t - 1) // 2
            if i <= self.L - 1 and bit == 1:
                self._champ = i + 1
        self._emitted = t
        return self._query_at(t)

    def snapshot(self) -> tuple:
        return (self._emitted, self._champ)

    def restore(self, state: tuple) -> None:
        self._emitted, self._champ = state


class SphereWalkCat(CatStrategy):
    """Anchor descent through thin sphere levels.

    Each phase fixes an anchor v, enumerates the sphere at its thin level in
    ascending id order, and runs champion elimination against it; the phase's
    winner becomes the next anchor.  Phases stop once ceil(D/2) pairs have
    been played (or a sphere comes up empty, which certifies that everything
    is within the thin level already) and the anchor is then held forever.
    """

    RUN, HOLD = 0, 1

    def __init__(self, g: Graph, K: int, oracle: DistanceOracle | None = None) -> None:
        if K < 1:
            raise GraphError(f"sphere-walk cat needs K >= 1, got {K}")
        self.graph = g
        self.oracle = oracle or DistanceOracle(g)
        self.K = K
        levels = self.oracle.thin_levels(K)
        missing = [v for v in range(g.n) if levels[v] < 0]
        if missing:
            raise GraphError(
                f"vertex {missing[0]} has no sphere of size < l/4 below K={K}; "
                "raise K"
            )
        self.levels = levels
        self.D = self.oracle.diameter()
        self.stop_pairs = (self.D + 1) // 2
        self.spec = f"thin:K={K}"

        self._emitted = 0
        self._pairs = 0
        self._anchor = 0
        self._champ = 0
        self._mode = self.RUN
        self._U: tuple[int, ...] = ()
        self._u_pos = 0
        self._pending: int | None = None  # candidate of the open pair
        self._phase_log: list[tuple[int, int]] = [(0, 0)]
        self._open_phase(0)

    @property
    def phase_log(self) -> tuple[tuple[int, int], ...]:
        """Boundaries as (pairs played, anchor) tuples, first entry (0, v1)."""
        return tuple(self._phase_log)

    def _open_phase(self, anchor: int) -> None:
        self._anchor = anchor
        self._champ = anchor
        level = int(self.levels[anchor])
        self._U = sphere(self.graph, anchor, level, oracle=self.oracle)
        self._u_pos = 0
        if not self._U:
            # Empty sphere at the thin level: every vertex is closer than the
            # level, so holding the anchor already localizes.
            self._mode = self.HOLD

    def _close_phase_if_done(self) -> None:
        if self._u_pos >= len(self._U):
            self._phase_log.append((self._pairs, self._champ))
            if self._pairs >= self.stop_pairs:
                self._anchor = self._champ
                self._mode = self.HOLD
            else:
                self._open_phase(self._champ)

    def first_query(self) -> int:
        self._emitted = 1
        if self._mode == self.HOLD:
            return self._anchor
        return self._champ

    def next_query(self, bit: int | None) -> int:
        t = self._emitted + 1
        self._emitted = t
        if self._mode == self.HOLD:
            return self._anchor
        if t % 2 == 0:
            # Second query of pair t//2: the next sphere candidate.
            self._pending = self._U[self._u_pos]
            self._u_pos += 1
            self._pairs += 1
            return self._pending
        # Odd query: first apply the decisive bit of the pair just finished.
        if self._pending is not None:
            if bit == 1:
                self._champ = self._pending
            self._pending = None
            self._close_phase_if_done()
            if self._mode == self.HOLD:
                return self._anchor
        return self._champ

    def snapshot(self) -> tuple:
        return (
            self._emitted,
            self._pairs,
            self._anchor,
            self._champ,
            self._mode,
            self._U,
            self._u_pos,
            self._pending,
            tuple(self._phase_log),
        )

    def restore(self, state: tuple) -> None:
        (
            self._emitted,
            self._pairs,
            self._anchor,
            self._champ,
            self._mode,
            self._U,
            self._u_pos,
            self._pending,
            log,
        ) = state
        self._phase_log = list(log)


class SweepCat(CatStrategy):
    """Queries 0, 1, ..., n-1 cyclically, ignoring all bits."""

    def __init__(self, g: Graph) -> None:
        self.n = g.n
        self.spec = "sweep"
        self._emitted = 0

    def first_query(self) -> int:
        self._emitted = 1
        return 0

    def next_query(self, bit: int | None) -> int:
        self._emitted += 1
        return (self._emitted - 1) % self.n

    def snapshot(self) -> tuple:
        return (self._emitted,)

    def restore(self, state: tuple) -> None:
        (self._emitted,) = state


class StayCat(CatStrategy):
    """Queries vertex 0 forever."""

    def __init__(self, g: Graph) -> None:
        self.spec = "stay"

    def first_query(self) -> int:
        return 0

    def next_query(self, bit: int | None) -> int:
        return 0

    def snapshot(self) -> tuple:
        return ()

    def restore(self, state: tuple) -> None:
        pass


class SeededRandomCat(CatStrategy):
    """Pseudo-random queries derived from a seed and the bit history.

    Every query is a pure function of (seed, bits so far), which keeps the
    strategy inside the deterministic-strategy rule while looking random.
    """

    def __init__(self, g: Graph, seed: int) -> None:
        self.n = g.n
        self.seed = seed
        self.spec = f"rand:seed={seed}"
        self._emitted = 0
        self._bits: tuple[int, ...] = ()

    def _derive(self, t: int) -> int:
        payload = f"{self.seed}|{t}|{''.join(map(str, self._bits))}"
        digest = hashlib.sha256(payload.encode()).digest()
        return int.from_bytes(digest[:8], "big") % self.n

    def first_query(self) -> int:
        self._emitted = 1
        return self._derive(1)

    def next_query(self, bit: int | None) -> int:
        if bit is not None:
            self._bits = self._bits + (bit,)
        self._emitted += 1
        return self._derive(self._emitted)

    def snapshot(self) -> tuple:
        return (self._emitted, self._bits)

    def restore(self, state: tuple) -> None:
        self._emitted, self._bits = state


class ScriptedCat(CatStrategy):
    """Plays a fixed query list, repeating the last entry when exhausted."""

    def __init__(self, queries) -> None:
        self.queries = tuple(queries)
        if not self.queries:
            raise GraphError("scripted cat needs at least one query")
        self.spec = "scripted"
        self._emitted = 0

    def _query_at(self, t: int) -> int:
        return self.queries[min(t - 1, len(self.queries) - 1)]

    def first_query(self) -> int:
        self._emitted = 1
        return self._query_at(1)

    def next_query(self, bit: int | None) -> int:
        self._emitted += 1
        return self._query_at(self._emitted)

    def snapshot(self) -> tuple:
        return (self._emitted,)

    def restore(self, state: tuple) -> None:
        (self._emitted,) = state


def fat_cat(g: Graph, cover: BallCover, oracle: DistanceOracle | None = None) -> BallCoverCat:
    """Ball-cover elimination cat over an explicit cover."""
    return BallCoverCat(g, cover, oracle)


def auto_thin_K(g: Graph, oracle: DistanceOracle | None = None) -> int:
    """Smallest K of the form max(ceil(3*sqrt(n)), minimal valid) so the
    sphere-walk cat is always constructible."""
    oracle = oracle or DistanceOracle(g)
    K = ceil_sqrt(9 * g.n)
    cap = g.n + 2
    levels = oracle.thin_levels(cap)
    needed = int(levels.max()) + 1
    return max(K, needed)


def thin_cat(g: Graph, K: int, oracle: DistanceOracle | None = None) -> SphereWalkCat:
    """Sphere-walk cat; K must admit a thin level for every vertex."""
    return SphereWalkCat(g, K, oracle)


def sqrt_cat(g: Graph, oracle: DistanceOracle | None = None) -> BallCoverCat:
    """Composed strategy: scattered cover at separation ceil(sqrt(8n)), then
    ball-cover elimination.

    Localizes to distance at most ceil(sqrt(32n)) within ceil(sqrt(2n))
    steps on any connected graph.
    """
    if g.n < 2:
        raise GraphError("sqrt cat needs n >= 2")
    oracle = oracle or DistanceOracle(g)
    cover = scattered_cover(g, ceil_sqrt(8 * g.n), oracle)
    cat = BallCoverCat(g, cover, oracle)
    cat.spec = "sqrt"
    return cat


def baseline_cat(kind: str, g: Graph, seed: int = 0) -> CatStrategy:
    if kind == "sweep":
        return SweepCat(g)
    if kind == "stay":
        return StayCat(g)
    if kind == "fixed_seed_random":
        return SeededRandomCat(g, seed)
    raise GraphError(f"unknown baseline cat {kind!r}")


def parse_cat_spec(
    spec: str,
    g: Graph,
    oracle: DistanceOracle | None = None,
    default_seed: int = 0,
) -> CatStrategy:
    """Build a cat from its CLI spec string.

    Forms: "sqrt", "sweep", "stay", "rand:seed=7", "fat:c=2.83",
    "thin:K=auto" / "thin:K=12".
    """
    oracle = oracle or DistanceOracle(g)
    kind, _, rest = spec.partition(":")
    kind = kind.strip()
    rest = rest.strip()
    if kind == "sqrt":
        return sqrt_cat(g, oracle)
    if kind == "sweep":
        return SweepCat(g)
    if kind == "stay":
        return StayCat(g)
    if kind == "rand":
        seed = default_seed
        if rest:
            key, _, val = rest.partition("=")
            if key.strip() != "seed":
                raise GraphError(f"bad cat spec {spec!r}")
            seed = int(val)
        cat = SeededRandomCat(g, seed)
        return cat
    if kind == "fat":
        key, _, val = rest.partition("=")
        if key.strip() != "c" or not val:
            raise GraphError(f"fat cat spec needs c=<float>, got {spec!r}")
        c = float(val)
        if c <= 0:
            raise GraphError(f"fat cat needs c > 0, got {c}")
        separation = max(1, math.ceil(c * math.sqrt(g.n)))
        cat = BallCoverCat(g, scattered_cover(g, separation, oracle), oracle)
        cat.spec = f"fat:c={val}"
        return cat
    if kind == "thin":
        key, _, val = rest.partition("=")
        if key.strip() != "K" or not val:
            raise GraphError(f"thin cat spec needs K=auto or K=<int>, got {spec!r}")
        K = auto_thin_K(g, oracle) if val == "auto" else int(val)
        cat = SphereWalkCat(g, K, oracle)
        cat.spec = f"thin:K={val}"
        return cat
    raise GraphError(f"unknown cat spec {spec!r}")
