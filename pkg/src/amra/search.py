"""Anytime multi-resolution, multi-heuristic best-first search.

The planner runs one admissible "anchor" queue over the union action space
plus any number of resolution-tagged queues driven by further (possibly
inadmissible) heuristics. Queue i may expand only while its minimum key
stays within a factor w2 of the anchor minimum; keys are g + w1 * h_i. Each
outer iteration therefore produces a solution no worse than w1 * w2 times
the optimum on the union graph. Between iterations the weights shrink,
states whose cost-to-come improved after anchor expansion (the INCONS set)
are fed back into the anchor queue, and the closed sets reset; the final
iteration at (1, 1) is an admissible search, so the last solution is
optimal on the union graph.

Per iteration a state is expanded at most once per resolution plus once
from the anchor (N + 1 total): an expansion at resolution r removes the
state from every resolution-r queue and bars re-insertion via CLOSED_r.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .domain import DomainModel, HeuristicSpec, ProblemInstance, SingleResolutionView, State
from .queues import QueueSet

INF = math.inf

# improve_path outcomes
SOLVED = "solved"
EXHAUSTED = "exhausted"
TIMEOUT = "timeout"


class SearchNode:
    """Per-state bookkeeping: cost-to-come, backpointer, closed bits.

    ``closed_mask`` bit r is the CLOSED_r flag; masks and expansion counters
    are stamped with the iteration number instead of being bulk-cleared.
    """

    __slots__ = ("g", "parent", "parent_action", "closed_mask", "closed_stamp",
                 "exp_count", "exp_stamp")

    def __init__(self) -> None:
        self.g: float = INF
        self.parent: Optional[State] = None
        self.parent_action: Optional[int] = None
        self.closed_mask: int = 0
        self.closed_stamp: int = -1
        self.exp_count: int = 0
        self.exp_stamp: int = -1


def update_weights(w1: float, w2: float, decay: float = 0.5,
                   eps: float = 1e-9) -> tuple[float, float]:
    """Default geometric weight schedule.

    Each weight is multiplied by ``decay`` and clamped below at 1; a value
    within ``eps`` of 1 snaps to exactly 1 so the (1, 1) termination test
    fires on float arithmetic.
    """
    def step(w: float) -> float:
        w = max(1.0, w * decay)
        return 1.0 if w <= 1.0 + eps else w

    return step(w1), step(w2)


@dataclass
class PlannerConfig:
    """Weights, schedule and policy knobs for one planner run."""

    w1_init: float = 3.0
    w2_init: float = 2.0
    decay: float = 0.5
    anytime: bool = True                      # False: single iteration at the initial weights
    time_budget_s: Optional[float] = None
    schedule: Optional[Callable[[float, float], tuple[float, float]]] = None
    queue_policy: str = "round_robin"
    tie_break: str = "h_then_lifo"
    validate: bool = True                     # sample-check anchor consistency up front
    audit: bool = False                       # assert queue invariants after every expansion

    def __post_init__(self) -> None:
        if self.w1_init < 1.0 or self.w2_init < 1.0:
            raise ValueError("weights must be >= 1")
        if not 0.0 < self.decay < 1.0:
            raise ValueError("decay must be in (0, 1)")
        if self.queue_policy != "round_robin":
            raise ValueError(f"unsupported queue policy {self.queue_policy!r}")
        if self.tie_break != "h_then_lifo":
            raise ValueError(f"unsupported tie rule {self.tie_break!r}")

    def next_weights(self, w1: float, w2: float) -> tuple[float, float]:
        if self.schedule is not None:
            nw1, nw2 = self.schedule(w1, w2)
            if nw1 > w1 or nw2 > w2 or nw1 < 1.0 or nw2 < 1.0:
                raise ValueError("schedule must be non-increasing with weights >= 1")
            return nw1, nw2
        return update_weights(w1, w2, self.decay)


@dataclass
class IterationStats:
    """Counters for one improve-path call."""

    iteration: int
    w1: float
    w2: float
    expansions_total: int = 0
    expansions_per_queue: list[int] = field(default_factory=list)
    expansions_per_resolution: list[int] = field(default_factory=list)
    max_expansions_of_any_state: int = 0
    time_to_publish_s: Optional[float] = None
    open_sizes: list[int] = field(default_factory=list)
    outcome: str = ""


@dataclass
class SolutionRecord:
    """A published solution: waypoints, exact cost and its quality bound."""

    path: list[tuple[State, Optional[int]]]   # (state, action taken to reach it)
    cost: float
    bound: float
    iteration: int
    expansions: int                            # cumulative over the run at publication
    time_s: float

    def states(self) -> list[State]:
        return [s for s, _ in self.path]


@dataclass
class PlanResult:
    """Everything a planner run produced."""

    solutions: list[SolutionRecord] = field(default_factory=list)
    iterations: list[IterationStats] = field(default_factory=list)
    failed: bool = False
    timed_out: bool = False
    expansions_total: int = 0

    @property
    def final(self) -> Optional[SolutionRecord]:
        return self.solutions[-1] if self.solutions else None


class Planner:
    """One single-threaded search over a problem instance.

    ``heuristics[0]`` must be the anchor (res 0, consistent); the remaining
    entries drive one queue each and must either cover every resolution of
    the domain or be absent entirely (anchor-only mode, the classic
    single-queue weighted-A*/anytime-repair configuration).
    """

    def __init__(self, problem: ProblemInstance, heuristics: Sequence[HeuristicSpec],
                 config: Optional[PlannerConfig] = None) -> None:
        self.problem = problem
        self.domain = problem.domain
        self.config = config or PlannerConfig()
        self.heuristics = list(heuristics)
        self._validate_setup()

        self.queues = QueueSet([h.res for h in self.heuristics])
        self.nodes: dict[State, SearchNode] = {}
        self._hcache: list[dict[State, float]] = [{} for _ in self.heuristics]
        self._rr_next = 1
        self._iteration = 0
        self.w1 = self.config.w1_init
        self.w2 = self.config.w2_init
        self._goal_state: Optional[State] = None
        self._expansions_run = 0

    # -- setup ---------------------------------------------------------------

    def _validate_setup(self) -> None:
        n = self.domain.num_resolutions
        if n < 1:
            raise ValueError("domain must have at least one resolution")
        if n > 62:
            raise ValueError("too many resolutions for the closed bitmask")
        if not self.heuristics or self.heuristics[0].res != 0:
            raise ValueError("heuristics[0] must be the anchor (res 0)")
        covered = {h.res for h in self.heuristics[1:]}
        if any(r < 1 or r > n for r in covered):
            raise ValueError(f"non-anchor heuristic resolutions must be in 1..{n}")
        if covered and covered != set(range(1, n + 1)):
            missing = sorted(set(range(1, n + 1)) - covered)
            raise ValueError(f"resolutions {missing} have no heuristic queue")
        self.problem.validate()
        if self.config.validate if self.config is not None else True:
            self._sample_anchor_consistency()

    def _sample_anchor_consistency(self, limit: int = 256) -> None:
        """Spot-check the anchor heuristic on edges near the start."""
        h0 = self.heuristics[0].fn
        seen = {self.problem.start}
        frontier = [self.problem.start]
        checked = 0
        while frontier and checked < limit:
            x = frontier.pop()
            hx = h0(x)
            if hx < 0:
                raise ValueError(f"anchor heuristic negative at {x!r}")
            if self.problem.is_goal(x) and hx != 0.0:
                raise ValueError(f"anchor heuristic nonzero ({hx}) at goal state {x!r}")
            for y, c, _a in self.domain.successors(x, 0):
                checked += 1
                if hx > h0(y) + c + 1e-9:
                    raise ValueError(
                        f"anchor heuristic inconsistent on edge {x!r}->{y!r}: "
                        f"{hx} > {h0(y)} + {c}"
                    )
                if y not in seen and len(seen) < limit:
                    seen.add(y)
                    frontier.append(y)
                if checked >= limit:
                    break

    # -- node / key helpers ----------------------------------------------------

    def _node(self, state: State) -> SearchNode:
        node = self.nodes.get(state)
        if node is None:
            node = SearchNode()
            self.nodes[state] = node
        return node

    def _h(self, i: int, state: State) -> float:
        cache = self._hcache[i]
        v = cache.get(state)
        if v is None:
            v = float(self.heuristics[i].fn(state))
            cache[state] = v
        return v

    def key(self, state: State, i: int) -> float:
        """Queue priority g + w1 * h_i; the state must be discovered."""
        node = self.nodes.get(state)
        if node is None or node.g == INF:
            raise ValueError(f"key() on undiscovered state {state!r}")
        return node.g + self.w1 * self._h(i, state)

    def _closed(self, node: SearchNode, resolution: int) -> bool:
        return node.closed_stamp == self._iteration and bool(node.closed_mask & (1 << resolution))

    def _set_closed(self, node: SearchNode, resolution: int) -> None:
        if node.closed_stamp != self._iteration:
            node.closed_stamp = self._iteration
            node.closed_mask = 0
        node.closed_mask |= 1 << resolution

    # -- expansion --------------------------------------------------------------

    def expand(self, state: State, i: int) -> None:
        """Relax all successors of ``state`` using queue i's action space.

        For a non-anchor queue the state is first removed from every other
        queue at the same resolution. Improved successors that are already
        anchor-closed go to INCONS; the rest are (re-)inserted into the
        anchor queue and every eligible same-lattice queue whose key passes
        the w2 bound against the anchor key.
        """
        queues = self.queues.queues
        res_of = self.queues.res_of
        r = res_of[i]
        if i != 0:
            for j in self.queues.siblings(r):
                if j != i:
                    queues[j].remove(state)
        node = self.nodes[state]
        gx = node.g
        w1 = self.w1
        w2 = self.w2
        domain = self.domain
        for succ, cost, action in domain.successors(state, r):
            new_g = gx + cost
            snode = self._node(succ)
            if snode.g <= new_g:
                continue
            snode.g = new_g
            snode.parent = state
            snode.parent_action = action
            if self._closed(snode, 0):
                self.queues.incons.add(succ)
                continue
            h0 = self._h(0, succ)
            k0 = new_g + w1 * h0
            queues[0].push(succ, k0, h0)
            if len(queues) == 1:
                continue
            sres = domain.resolutions_of(succ)
            for j in range(1, len(queues)):
                jres = res_of[j]
                if jres not in sres:
                    continue
                if self._closed(snode, jres):
                    continue
                hj = self._h(j, succ)
                kj = new_g + w1 * hj
                if kj <= w2 * k0:
                    queues[j].push(succ, kj, hj)

    def choose_queue(self) -> Optional[int]:
        """Round-robin over non-empty non-anchor queues; None if all empty."""
        queues = self.queues.queues
        m = len(queues) - 1
        if m == 0:
            return None
        start = self._rr_next
        for off in range(m):
            j = (start - 1 + off) % m + 1
            if len(queues[j]):
                self._rr_next = j % m + 1
                return j
        return None

    def improve_path(self, stats: IterationStats,
                     deadline: Optional[float] = None) -> str:
        """Expand until a goal state pops or the anchor queue drains.

        Every loop step expands exactly one state: from the scheduled
        non-anchor queue while its minimum key is within w2 of the anchor
        minimum, otherwise from the anchor. The goal test runs on expansion.
        """
        queues = self.queues.queues
        res_of = self.queues.res_of
        anchor = queues[0]
        is_goal = self.problem.is_goal
        stats.expansions_per_queue = [0] * len(queues)
        nres = self.domain.num_resolutions
        stats.expansions_per_resolution = [0] * (nres + 1)
        while len(anchor):
            if deadline is not None and time.monotonic() > deadline:
                stats.outcome = TIMEOUT
                stats.open_sizes = [len(q) for q in queues]
                return TIMEOUT
            i = self.choose_queue()
            if i is not None and queues[i].min_key() <= self.w2 * anchor.min_key():
                state, _ = queues[i].pop()
            else:
                i = 0
                state, _ = anchor.pop()
            r = res_of[i]
            self.expand(state, i)
            node = self.nodes[state]
            self._set_closed(node, r)
            if node.exp_stamp != self._iteration:
                node.exp_stamp = self._iteration
                node.exp_count = 0
            node.exp_count += 1
            stats.expansions_total += 1
            stats.expansions_per_queue[i] += 1
            stats.expansions_per_resolution[r] += 1
            if node.exp_count > stats.max_expansions_of_any_state:
                stats.max_expansions_of_any_state = node.exp_count
            self._expansions_run += 1
            if self.config.audit:
                self.check_invariants()
            if is_goal(state):
                self._goal_state = state
                stats.outcome = SOLVED
                stats.open_sizes = [len(q) for q in queues]
                return SOLVED
        stats.outcome = EXHAUSTED
        stats.open_sizes = [len(q) for q in queues]
        return EXHAUSTED

    # -- anytime outer loop ------------------------------------------------------

    def _start_iteration(self) -> None:
        """Merge INCONS into the anchor, re-key everything at the new weights,
        reset the closed sets and rebuild the non-anchor queues."""
        self._iteration += 1
        queues = self.queues.queues
        res_of = self.queues.res_of
        anchor = queues[0]
        members = list(anchor.members())
        pending = set(members)
        for s in self.queues.incons:
            if s not in pending:
                members.append(s)
        self.queues.incons.clear()
        anchor.clear()
        for j in range(1, len(queues)):
            queues[j].clear()
        w1 = self.w1
        w2 = self.w2
        domain = self.domain
        for s in members:
            g = self.nodes[s].g
            h0 = self._h(0, s)
            k0 = g + w1 * h0
            anchor.push(s, k0, h0)
            sres = domain.resolutions_of(s)
            for j in range(1, len(queues)):
                if res_of[j] not in sres:
                    continue
                hj = self._h(j, s)
                kj = g + w1 * hj
                if kj <= w2 * k0:
                    queues[j].push(s, kj, hj)

    def _extract_solution(self, t0: float) -> SolutionRecord:
        """Trace backpointers from the goal and recompute the exact cost."""
        assert self._goal_state is not None
        chain: list[tuple[State, Optional[int]]] = []
        cur: Optional[State] = self._goal_state
        guard = len(self.nodes) + 1
        while cur is not None:
            node = self.nodes[cur]
            chain.append((cur, node.parent_action))
            cur = node.parent
            guard -= 1
            if guard < 0:
                raise RuntimeError("backpointer cycle detected")
        chain.reverse()
        cost = 0.0
        for (a, _), (b, action) in zip(chain, chain[1:]):
            edge = self._edge_cost(a, b, action)
            cost += edge
        return SolutionRecord(
            path=chain,
            cost=cost,
            bound=self.w1 * self.w2,
            iteration=self._iteration,
            expansions=self._expansions_run,
            time_s=time.monotonic() - t0,
        )

    def _edge_cost(self, a: State, b: State, action: Optional[int]) -> float:
        for succ, cost, act in self.domain.successors(a, 0):
            if succ == b and (action is None or act == action):
                return cost
        raise RuntimeError(f"published path uses invalid edge {a!r}->{b!r}")

    def plan(self, on_solution: Optional[Callable[[SolutionRecord], None]] = None) -> PlanResult:
        """Run the anytime loop; returns every published solution and stats.

        Failure (no solution at all) means the goal is unreachable in the
        union graph: the first iteration drains the anchor queue, which
        relaxes every edge out of every reachable state.
        """
        t0 = time.monotonic()
        deadline = t0 + self.config.time_budget_s if self.config.time_budget_s else None
        result = PlanResult()
        start = self.problem.start
        snode = self._node(start)
        snode.g = 0.0
        snode.parent = None
        snode.parent_action = None
        self.queues.clear_all()
        self.queues.incons.add(start)
        best_cost = INF
        while self.w1 >= 1.0 and self.w2 >= 1.0:
            self._start_iteration()
            if not len(self.queues.queues[0]):
                break  # nothing inconsistent remains; no further improvement possible
            stats = IterationStats(self._iteration, self.w1, self.w2)
            outcome = self.improve_path(stats, deadline)
            result.iterations.append(stats)
            if outcome == SOLVED:
                record = self._extract_solution(t0)
                if record.cost < best_cost:
                    best_cost = record.cost
                    stats.time_to_publish_s = record.time_s
                    result.solutions.append(record)
                    if on_solution is not None:
                        on_solution(record)
            elif outcome == TIMEOUT:
                result.timed_out = True
                break
            else:  # exhausted
                if not result.solutions:
                    result.failed = True
                    break
            if not self.config.anytime:
                break
            if self.w1 == 1.0 and self.w2 == 1.0:
                break
            self.w1, self.w2 = self.config.next_weights(self.w1, self.w2)
        result.expansions_total = self._expansions_run
        return result

    # -- diagnostics ---------------------------------------------------------------

    def check_invariants(self) -> None:
        """Assert queue-membership hygiene; used by tests via config.audit."""
        queues = self.queues.queues
        res_of = self.queues.res_of
        for j, q in enumerate(queues):
            for s in q.members():
                node = self.nodes.get(s)
                assert node is not None and node.g < INF, f"queue {j} holds undiscovered {s!r}"
                assert not self._closed(node, res_of[j]), \
                    f"queue {j} (res {res_of[j]}) holds closed state {s!r}"
                if j > 0:
                    assert res_of[j] in self.domain.resolutions_of(s), \
                        f"queue {j} holds off-lattice state {s!r}"
        for s in self.queues.incons:
            node = self.nodes.get(s)
            assert node is not None and self._closed(node, 0), \
                f"INCONS holds non-anchor-closed state {s!r}"


# -- presets -------------------------------------------------------------------

PRESET_KINDS = ("wastar", "ara", "mha", "amha", "mra", "amra")


@dataclass(frozen=True)
class Preset:
    """How to devolve the general planner into a named special case.

    ``single_resolution``: restrict the domain to one level (via
    SingleResolutionView). ``anchor_only``: drop all non-anchor queues.
    ``one_heuristic_per_resolution``: keep only the first heuristic offered
    for each resolution. ``anytime``: run the full weight schedule instead
    of a single iteration.
    """

    kind: str
    anytime: bool
    single_resolution: bool
    anchor_only: bool
    one_heuristic_per_resolution: bool

    def make_config(self, **overrides) -> PlannerConfig:
        overrides.setdefault("anytime", self.anytime)
        return PlannerConfig(**overrides)

    def wrap_domain(self, domain: DomainModel, resolution: int = 1) -> DomainModel:
        if self.single_resolution and domain.num_resolutions > 1:
            return SingleResolutionView(domain, resolution)
        return domain

    def select_heuristics(self, heuristics: Sequence[HeuristicSpec]) -> list[HeuristicSpec]:
        """Filter a full heuristic list down to this preset's shape.

        The input must start with the anchor. When the domain was wrapped to
        a single resolution the caller is responsible for re-tagging the
        surviving non-anchor specs to res 1.
        """
        if not heuristics or heuristics[0].res != 0:
            raise ValueError("heuristics[0] must be the anchor")
        if self.anchor_only:
            return [heuristics[0]]
        if not self.one_heuristic_per_resolution:
            return list(heuristics)
        out = [heuristics[0]]
        seen: set[int] = set()
        for h in heuristics[1:]:
            if h.res not in seen:
                seen.add(h.res)
                out.append(h)
        return out


_PRESETS = {
    "wastar": Preset("wastar", anytime=False, single_resolution=True,
                     anchor_only=True, one_heuristic_per_resolution=True),
    "ara":    Preset("ara", anytime=True, single_resolution=True,
                     anchor_only=True, one_heuristic_per_resolution=True),
    "mha":    Preset("mha", anytime=False, single_resolution=True,
                     anchor_only=False, one_heuristic_per_resolution=False),
    "amha":   Preset("amha", anytime=True, single_resolution=True,
                     anchor_only=False, one_heuristic_per_resolution=False),
    "mra":    Preset("mra", anytime=False, single_resolution=False,
                     anchor_only=False, one_heuristic_per_resolution=True),
    "amra":   Preset("amra", anytime=True, single_resolution=False,
                     anchor_only=False, one_heuristic_per_resolution=False),
}


def preset(kind: str) -> Preset:
    """Named planner configurations: wastar, ara, mha, amha, mra, amra."""
    try:
        return _PRESETS[kind]
    except KeyError:
        raise ValueError(f"unknown preset {kind!r}; expected one of {PRESET_KINDS}") from None


# -- solution serialization -------------------------------------------------------

def format_solution(record: SolutionRecord, domain: DomainModel) -> str:
    """Line-oriented text form: a header then one ``state<TAB>g`` per waypoint."""
    lines = [
        f"cost={record.cost!r} bound={record.bound!r} "
        f"iter={record.iteration} expansions={record.expansions}"
    ]
    g = 0.0
    prev: Optional[State] = None
    for state, action in record.path:
        if prev is not None:
            for succ, cost, act in domain.successors(prev, 0):
                if succ == state and act == action:
                    g += cost
                    break
            else:
                raise ValueError("record path is not connected in the domain")
        lines.append(f"{domain.state_repr(state)}\t{g!r}")
        prev = state
    return "\n".join(lines) + "\n"
