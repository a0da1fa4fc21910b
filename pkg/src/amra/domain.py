"""Abstract planning domains: implicit graphs over multiple resolutions.

A domain exposes N discretisation levels, indexed 1 (finest) to N
(coarsest). Level 0 is reserved for the union ("anchor") space whose action
space is the concatenation of every level's actions; the planner's
completeness and optimality guarantees are stated against that union graph.

State handles must be hashable and totally ordered (tuples of ints work).
Domains must be read-only after construction so a single instance can serve
many planners concurrently.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Hashable, Optional, Sequence

State = Hashable
Successor = tuple  # (state, edge_cost, action_id)


class DomainModel(ABC):
    """Implicit-graph interface consumed by the planner."""

    @property
    @abstractmethod
    def num_resolutions(self) -> int:
        """Number of non-anchor resolutions N (>= 1)."""

    @abstractmethod
    def successors_at(self, state: State, resolution: int) -> list[Successor]:
        """Valid successors of ``state`` at one resolution in 1..N.

        Returns (successor, edge_cost, action_id) triples. Edge costs are
        finite and >= 0; only collision-free successors are returned. Every
        successor returned at resolution r must itself lie on resolution r.
        """

    @abstractmethod
    def resolutions_of(self, state: State) -> tuple[int, ...]:
        """Sorted subset of {1..N} of lattices this state lies on."""

    @abstractmethod
    def is_goal(self, state: State) -> bool:
        """Goal-set membership test."""

    def successors(self, state: State, resolution: int) -> list[Successor]:
        """Successors at one resolution, or the union space for 0."""
        if resolution == 0:
            out: list[Successor] = []
            for r in self.resolutions_of(state):
                out.extend(self.successors_at(state, r))
            return out
        return self.successors_at(state, resolution)

    def state_repr(self, state: State) -> str:
        """Compact single-token text form used in solution files."""
        if isinstance(state, tuple):
            return ",".join(str(v) for v in state)
        return str(state)


class SingleResolutionView(DomainModel):
    """Restrict a domain to one of its resolutions (N becomes 1).

    Used by the single-resolution planner presets: the wrapped graph is
    exactly the chosen level's vertex/edge set, so a coarse-only search can
    legitimately fail where the full union graph has a solution.
    """

    def __init__(self, base: DomainModel, resolution: int) -> None:
        if not 1 <= resolution <= base.num_resolutions:
            raise ValueError(f"resolution {resolution} out of range 1..{base.num_resolutions}")
        self.base = base
        self.resolution = resolution

    @property
    def num_resolutions(self) -> int:
        return 1

    def successors_at(self, state: State, resolution: int) -> list[Successor]:
        if resolution != 1:
            raise ValueError("single-resolution view only has resolution 1")
        return self.base.successors_at(state, self.resolution)

    def resolutions_of(self, state: State) -> tuple[int, ...]:
        return (1,) if self.resolution in self.base.resolutions_of(state) else ()

    def is_goal(self, state: State) -> bool:
        return self.base.is_goal(state)

    def state_repr(self, state: State) -> str:
        return self.base.state_repr(state)


@dataclass(frozen=True)
class HeuristicSpec:
    """One heuristic and the resolution whose queue it drives.

    ``res`` 0 marks the anchor heuristic, which must be consistent (checked
    by edge sampling when a planner is built). Non-anchor heuristics may be
    arbitrarily inadmissible.
    """

    res: int
    fn: Callable[[State], float]
    name: str = ""

    def evaluate(self, state: State) -> float:
        return self.fn(state)


@dataclass
class ProblemInstance:
    """A start state, a goal predicate and the domain they live in."""

    start: State
    domain: DomainModel
    goal_fn: Optional[Callable[[State], bool]] = None

    def is_goal(self, state: State) -> bool:
        if self.goal_fn is not None:
            return self.goal_fn(state)
        return self.domain.is_goal(state)

    def validate(self) -> None:
        """Check the start lies on every lattice (starts are sampled coarse)."""
        res = self.domain.resolutions_of(self.start)
        expected = tuple(range(1, self.domain.num_resolutions + 1))
        if tuple(res) != expected:
            raise ValueError(
                f"start {self.start!r} lies on resolutions {tuple(res)}, expected all of {expected}"
            )
