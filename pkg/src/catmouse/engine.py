"""Game engine: turn order, feedback bits, exact belief tracking, transcripts.

Time is 1-based.  A step consists of the mouse moving first, then the cat
querying a vertex.  At the end of step i >= 2 the bit b_i is computed; it is
delivered to the cat at the start of its next query (so the cat's first two
queries are made with no information).  The belief set M_i is the exact set
of vertices consistent with the observed bits; M_1 is all of V.
"""

from __future__ import annotations

import copy
import json
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from .graphs import DistanceOracle, Graph


TRANSCRIPT_VERSION = "1"


class GameError(Exception):
    """Base class for engine failures."""


class RuleViolationError(GameError):
    """A strategy broke the movement or query rules; names the step."""


class IllegalFeedbackError(GameError):
    """A belief update emptied out, which only a corrupted transcript or a
    non-lazy-walk mouse can cause."""


def feedback_bit(d_prev: int, d_cur: int) -> int:
    """1 when the cat's distance to the mouse did not increase, else 0."""
    return 1 if d_cur <= d_prev else 0


@dataclass(frozen=True)
class BeliefSet:
    """Possible mouse positions at a step, stored as a vertex bitmask."""

    step: int
    n: int
    mask: int

    @classmethod
    def full(cls, n: int, step: int = 1) -> "BeliefSet":
        return cls(step=step, n=n, mask=(1 << n) - 1)

    @classmethod
    def of(cls, n: int, members, step: int = 0) -> "BeliefSet":
        mask = 0
        for v in members:
            mask |= 1 << v
        return cls(step=step, n=n, mask=mask)

    def __contains__(self, v: int) -> bool:
        return bool((self.mask >> v) & 1)

    def members(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.n) if (self.mask >> v) & 1)

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    def to_bool_array(self) -> np.ndarray:
        nbytes = (self.n + 7) // 8
        raw = np.frombuffer(
            self.mask.to_bytes(nbytes, "little"), dtype=np.uint8
        )
        return np.unpackbits(raw, bitorder="little")[: self.n].astype(bool)


def _mask_from_bool(arr: np.ndarray) -> int:
    return int.from_bytes(np.packbits(arr, bitorder="little").tobytes(), "little")


class BeliefKernel:
    """Incremental one-step belief update over closed neighborhoods.

    v survives a bit-1 update iff some believed u in N[v] has
    d(c_prev, u) >= d(c_cur, v); a bit-0 update flips the comparison to
    strict less-than.  The update touches only closed neighborhoods, so a
    step costs O(sum of degrees over the believed set).
    """

    _NONE_MAX = np.int32(-1)
    _NONE_MIN = np.int32(2**30)

    def __init__(self, g: Graph, oracle: DistanceOracle) -> None:
        self.graph = g
        self.oracle = oracle
        indptr, indices = g.closed_csr()
        self._starts = indptr[:-1]
        self._indices = indices

    def update_bool(
        self, members: np.ndarray, c_prev: int, c_cur: int, bit: int
    ) -> np.ndarray:
        row_prev = self.oracle.row(c_prev)
        row_cur = self.oracle.row(c_cur)
        gathered = row_prev[self._indices]
        member_at = members[self._indices]
        if bit == 1:
            vals = np.where(member_at, gathered, self._NONE_MAX)
            best = np.maximum.reduceat(vals, self._starts)
            return best >= row_cur
        vals = np.where(member_at, gathered, self._NONE_MIN)
        best = np.minimum.reduceat(vals, self._starts)
        return best < row_cur


def belief_update(
    g: Graph,
    m_prev: BeliefSet,
    c_prev: int,
    c_cur: int,
    bit: int,
    oracle: DistanceOracle | None = None,
) -> BeliefSet:
    """One exact belief-update step; raises IllegalFeedbackError on empty."""
    if m_prev.mask == 0:
        raise IllegalFeedbackError(f"belief set already empty at step {m_prev.step}")
    oracle = oracle or DistanceOracle(g)
    kernel = BeliefKernel(g, oracle)
    out = kernel.update_bool(m_prev.to_bool_array(), c_prev, c_cur, bit)
    mask = _mask_from_bool(out)
    if mask == 0:
        raise IllegalFeedbackError(
            f"belief update emptied at step {m_prev.step + 1} "
            f"(c_prev={c_prev}, c_cur={c_cur}, bit={bit})"
        )
    return BeliefSet(step=m_prev.step + 1, n=g.n, mask=mask)


class CatStrategy(ABC):
    """Deterministic cat decision interface.

    A cat sees only the feedback bits.  `next_query` receives the freshest
    bit, or None exactly once (before the second query, which is made with
    no information).  Identical bit histories must yield identical query
    sequences; seeded baselines derive every choice from their seed.
    """

    spec = "cat"

    @abstractmethod
    def first_query(self) -> int: ...

    @abstractmethod
    def next_query(self, bit: int | None) -> int: ...

    @abstractmethod
    def snapshot(self) -> tuple: ...

    @abstractmethod
    def restore(self, state: tuple) -> None: ...

    def clone(self) -> "CatStrategy":
        dup = copy.copy(self)
        dup.restore(self.snapshot())
        return dup


class MouseStrategy(ABC):
    """Mouse decision interface.

    The mouse sees everything: the graph, the full history so far, and a
    simulatable copy of the cat (via GameView.clone_cat).  Every returned
    move must be the current vertex or one of its neighbors.
    """

    spec = "mouse"

    @abstractmethod
    def first_position(self, view: "GameView") -> int: ...

    @abstractmethod
    def next_move(self, view: "GameView") -> int: ...


class GameView:
    """What the mouse is allowed to look at while deciding a move."""

    __slots__ = ("graph", "oracle", "step", "c", "m", "b", "_cat")

    def __init__(self, graph: Graph, oracle: DistanceOracle, cat: CatStrategy) -> None:
        self.graph = graph
        self.oracle = oracle
        self.step = 1
        self.c: list[int | None] = [None]
        self.m: list[int | None] = [None]
        self.b: list[int | None] = [None, None]
        self._cat = cat

    def clone_cat(self) -> CatStrategy:
        """Independent copy of the cat at its current state; simulating on it
        never affects the live game."""
        return self._cat.clone()


@dataclass
class Transcript:
    """Full game record.  All sequences are 1-based with a None sentinel at
    index 0; bits exist for steps >= 2."""

    graph_spec: str
    n: int
    horizon: int
    c: list
    m: list
    b: list
    beliefs: list | None = None
    belief_radius: list | None = None
    belief_center: list | None = None
    meta: dict = field(default_factory=dict)

    def belief_set(self, i: int) -> BeliefSet:
        if self.beliefs is None:
            raise GameError("transcript did not track beliefs")
        return BeliefSet(step=i, n=self.n, mask=self.beliefs[i])

    def to_dict(self) -> dict:
        return {
            "graph_spec": self.graph_spec,
            "n": self.n,
            "horizon": self.horizon,
            "c": self.c,
            "m": self.m,
            "b": self.b,
            "belief_radius": self.belief_radius,
            "belief_center": self.belief_center,
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def mask_radius(oracle: DistanceOracle, members: np.ndarray) -> tuple[int, int]:
    """Exact radius and lowest-id center of a believed set given as a bool
    array; needs the full distance matrix."""
    cols = np.flatnonzero(members)
    sub = oracle.full_matrix().take(cols, axis=1)
    worst = sub.max(axis=1)
    center = int(worst.argmin())
    return int(worst[center]), center


def run_game(
    g: Graph,
    cat: CatStrategy,
    mouse: MouseStrategy,
    horizon: int,
    *,
    track_belief: bool = False,
    track_radius: bool | None = None,
    oracle: DistanceOracle | None = None,
    graph_spec: str | None = None,
    meta: dict | None = None,
) -> Transcript:
    """Run one game for `horizon` steps and record the transcript.

    The mouse moves first each step and may simulate the cat through the
    view.  With track_belief the exact belief mask is recorded per step
    (M_1 = V); track_radius (default: same as track_belief) additionally
    records rad_G(M_i) and its center, which requires the full distance
    matrix.
    """
    if horizon < 1:
        raise GameError(f"horizon must be >= 1, got {horizon}")
    if track_radius is None:
        track_radius = track_belief
    oracle = oracle or DistanceOracle(g)
    view = GameView(g, oracle, cat)

    kernel = BeliefKernel(g, oracle) if track_belief else None
    members: np.ndarray | None = None
    beliefs: list | None = [None] if track_belief else None
    radii: list | None = [None] if track_belief and track_radius else None
    centers: list | None = [None] if track_belief and track_radius else None

    c = view.c
    m = view.m
    b = view.b

    m1 = mouse.first_position(view)
    if not (0 <= m1 < g.n):
        raise RuleViolationError(f"step 1: mouse start {m1} out of range")
    m.append(m1)
    c1 = cat.first_query()
    if not (0 <= c1 < g.n):
        raise RuleViolationError(f"step 1: cat query {c1} out of range")
    c.append(c1)

    if track_belief:
        members = np.ones(g.n, dtype=bool)
        beliefs.append(_mask_from_bool(members))
        if track_radius:
            r, ctr = mask_radius(oracle, members)
            radii.append(r)
            centers.append(ctr)

    for i in range(2, horizon + 1):
        view.step = i
        mi = mouse.next_move(view)
        prev_m = m[i - 1]
        if mi != prev_m and mi not in g.adjacency[prev_m]:
            raise RuleViolationError(
                f"step {i}: mouse moved {prev_m} -> {mi}, not in closed neighborhood"
            )
        m.append(mi)
        ci = cat.next_query(b[i - 1] if i >= 3 else None)
        if not (0 <= ci < g.n):
            raise RuleViolationError(f"step {i}: cat query {ci} out of range")
        c.append(ci)
        bit = feedback_bit(
            oracle.distance(c[i - 1], prev_m), oracle.distance(ci, mi)
        )
        b.append(bit)

        if track_belief:
            members = kernel.update_bool(members, c[i - 1], ci, bit)
            if not members.any():
                raise IllegalFeedbackError(f"belief set emptied at step {i}")
            if not members[mi]:
                raise GameError(
                    f"step {i}: true mouse position {mi} fell out of the belief set"
                )
            beliefs.append(_mask_from_bool(members))
            if track_radius:
                r, ctr = mask_radius(oracle, members)
                radii.append(r)
                centers.append(ctr)

    full_meta = dict(meta or {})
    full_meta.setdefault("version", TRANSCRIPT_VERSION)
    return Transcript(
        graph_spec=graph_spec or f"custom:n={g.n}",
        n=g.n,
        horizon=horizon,
        c=c,
        m=m,
        b=b[: horizon + 1],
        beliefs=beliefs,
        belief_radius=radii,
        belief_center=centers,
        meta=full_meta,
    )


@dataclass(frozen=True)
class LocalizationReport:
    first_success_step: int | None
    min_radius: int
    argmin_step: int


def localization_report(tr: Transcript, d: int) -> LocalizationReport:
    """First step whose belief radius is <= d, plus the overall minimum.

    Requires a transcript with tracked belief radii.
    """
    if tr.belief_radius is None:
        raise GameError("localization_report needs a transcript with tracked beliefs")
    first = None
    best = None
    best_step = None
    for i in range(1, tr.horizon + 1):
        r = tr.belief_radius[i]
        if first is None and r <= d:
            first = i
        if best is None or r < best:
            best = r
            best_step = i
    return LocalizationReport(first, best, best_step)


def recompute_bits(tr: Transcript, g: Graph, oracle: DistanceOracle | None = None) -> list:
    """Re-derive the bit sequence from the recorded positions and queries."""
    oracle = oracle or DistanceOracle(g)
    bits: list = [None, None]
    for i in range(2, tr.horizon + 1):
        bits.append(
            feedback_bit(
                oracle.distance(tr.c[i - 1], tr.m[i - 1]),
                oracle.distance(tr.c[i], tr.m[i]),
            )
        )
    return bits
