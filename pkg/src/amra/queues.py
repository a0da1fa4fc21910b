"""Priority queues for multi-queue best-first search.

Binary heaps with lazy deletion: the authoritative contents of a queue live
in a dict (state -> current entry) while the heap may hold stale tuples that
are skipped at pop/peek time. This gives decrease-key and remove without
sift-up plumbing; the observable pop order is identical to an in-place
decrease-key heap under the tie rule below.

Tie rule for equal keys: smaller heuristic value first, then most recently
inserted first (LIFO). An update counts as a fresh insertion for the LIFO
rank. All queues of one planner share a single insertion counter so traces
are deterministic.
"""
from __future__ import annotations

import heapq
import itertools
from typing import Hashable, Iterable, Iterator, Optional

State = Hashable


class OpenQueue:
    """One min-ordered open list with lazy deletion."""

    __slots__ = ("_heap", "_live", "_counter")

    def __init__(self, counter: Optional[itertools.count] = None) -> None:
        self._heap: list[tuple[float, float, int, State]] = []
        self._live: dict[State, tuple[float, float, int]] = {}
        self._counter = counter if counter is not None else itertools.count()

    def __len__(self) -> int:
        return len(self._live)

    def __contains__(self, state: State) -> bool:
        return state in self._live

    def push(self, state: State, key: float, h: float) -> None:
        """Insert state or re-key it; the new entry supersedes any old one."""
        seq = next(self._counter)
        self._live[state] = (key, h, seq)
        heapq.heappush(self._heap, (key, h, -seq, state))

    def remove(self, state: State) -> None:
        self._live.pop(state, None)

    def clear(self) -> None:
        self._heap.clear()
        self._live.clear()

    def _skim(self) -> None:
        # Drop heap entries that no longer match the live dict.
        heap = self._heap
        live = self._live
        while heap:
            key, h, negseq, state = heap[0]
            entry = live.get(state)
            if entry is not None and entry[0] == key and entry[1] == h and entry[2] == -negseq:
                return
            heapq.heappop(heap)

    def min_key(self) -> float:
        """Smallest current key; raises IndexError when empty."""
        if not self._live:
            raise IndexError("min_key on empty queue")
        self._skim()
        return self._heap[0][0]

    def pop(self) -> tuple[State, float]:
        """Remove and return (state, key) with the smallest key."""
        if not self._live:
            raise IndexError("pop from empty queue")
        self._skim()
        key, _h, _negseq, state = heapq.heappop(self._heap)
        del self._live[state]
        return state, key

    def key_of(self, state: State) -> Optional[float]:
        entry = self._live.get(state)
        return entry[0] if entry is not None else None

    def members(self) -> Iterator[State]:
        """Iterate current members in insertion order (deterministic)."""
        return iter(self._live)


class QueueSet:
    """The anchor queue plus M resolution-tagged queues and the INCONS set.

    ``res_of[i]`` maps queue index to the resolution it searches; index 0 is
    the anchor over the union action space (resolution 0).
    """

    def __init__(self, res_of: Iterable[int]) -> None:
        self.res_of: tuple[int, ...] = tuple(res_of)
        if not self.res_of or self.res_of[0] != 0:
            raise ValueError("queue 0 must be the anchor (resolution 0)")
        if any(r < 1 for r in self.res_of[1:]):
            raise ValueError("non-anchor queues must have resolution >= 1")
        counter = itertools.count()
        self.queues: list[OpenQueue] = [OpenQueue(counter) for _ in self.res_of]
        self.incons: set[State] = set()

    @property
    def num_inadmissible(self) -> int:
        return len(self.queues) - 1

    def siblings(self, resolution: int) -> list[int]:
        """Indices of non-anchor queues searching ``resolution``."""
        return [j for j in range(1, len(self.queues)) if self.res_of[j] == resolution]

    def clear_all(self) -> None:
        for q in self.queues:
            q.clear()
        self.incons.clear()
