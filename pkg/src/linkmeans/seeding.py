"""Derive k and the initial centroid groups from in-result hyperlinks.

Every page keeps a reach list of result pages it is connected to. Pages
repeatedly absorb the list of their *promising* neighbour (the neighbour with
the longest list) until no list changes. Pages whose lists overlap are then
merged into one group; each group of two or more pages seeds a centroid.

Links are treated as undirected throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .corpus import LinkAdjacency
from .preprocess import SparseVector, l2_normalize, sum_vectors

__all__ = [
    "AgentState",
    "SeedGroups",
    "DisjointSet",
    "init_agents",
    "select_promising",
    "expand_to_fixpoint",
    "merge_groups",
    "build_seed_centroids",
    "seed_groups",
]


@dataclass
class AgentState:
    page: int
    promising: int
    reach_list: set[int] = field(default_factory=set)


@dataclass(frozen=True)
class SeedGroups:
    groups: tuple[tuple[int, ...], ...]
    unseeded: frozenset[int]
    rounds: int = 0

    @property
    def k(self) -> int:
        return len(self.groups)

    def to_json(self) -> dict:
        return {"k": self.k, "groups": [list(g) for g in self.groups], "unseeded": sorted(self.unseeded)}


class DisjointSet:
    """Union-find over ``0..n-1`` with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def sets(self) -> list[tuple[int, ...]]:
        """Members of every set, sorted, ordered by smallest member."""
        out: dict[int, list[int]] = {}
        for x in range(len(self.parent)):
            out.setdefault(self.find(x), []).append(x)
        return sorted((tuple(m) for m in out.values()), key=lambda m: m[0])


def init_agents(adj: LinkAdjacency) -> list[AgentState]:
    return [AgentState(page=i, promising=i, reach_list=nbrs) for i, nbrs in enumerate(adj.neighbors())]


def _rank(agents, j):
    return (-len(agents[j].reach_list), j)


def select_promising(agent: AgentState, all_agents: Sequence[AgentState]) -> int:
    """The page in ``agent``'s reach list whose own list is longest.

    Ties go to the lowest doc id; an empty list yields the agent's own page.
    """
    if not agent.reach_list:
        return agent.page
    return min(agent.reach_list, key=lambda j: _rank(all_agents, j))


def expand_to_fixpoint(agents: list[AgentState]) -> list[AgentState]:
    """Grow reach lists in place until a full round changes nothing.

    Agents are visited in doc id order and see updates made earlier in the
    same round. When the promising page has nothing new to offer, the next
    candidate by list length that does is absorbed instead; without this the
    search can stall short of the connected component.

    At the fixpoint every non-empty list is the page's connected component
    minus the page itself.
    """
    _expand(agents)
    return agents


def _expand(agents):
    changed_rounds = 0
    while True:
        changed = False
        for agent in agents:
            if not agent.reach_list:
                continue
            agent.promising = select_promising(agent, agents)
            own = agent.reach_list
            for cand in sorted(own, key=lambda j: _rank(agents, j)):
                extra = agents[cand].reach_list - own
                extra.discard(agent.page)
                if extra:
                    agent.promising = cand
                    own |= extra
                    changed = True
                    break
        if not changed:
            return changed_rounds
        changed_rounds += 1


def merge_groups(agents: Sequence[AgentState]) -> SeedGroups:
    """Merge pages whose reach lists share a page or contain each other.

    Uniting every page with each member of its reach list yields the same
    partition as testing all pairs: pages ``i`` and ``i'`` sharing ``x`` are
    both joined to ``x``.
    """
    dsu = DisjointSet(len(agents))
    for agent in agents:
        for j in agent.reach_list:
            dsu.union(agent.page, j)
    groups, unseeded = [], set()
    for members in dsu.sets():
        if len(members) >= 2:
            groups.append(members)
        else:
            unseeded.update(members)
    return SeedGroups(tuple(groups), frozenset(unseeded))


def seed_groups(adj: LinkAdjacency) -> SeedGroups:
    """Initialize, expand, and merge in one call."""
    agents = init_agents(adj)
    rounds = _expand(agents)
    seeds = merge_groups(agents)
    return SeedGroups(seeds.groups, seeds.unseeded, rounds)


def build_seed_centroids(
    seeds: SeedGroups, vectors: Sequence[SparseVector]
) -> tuple[SeedGroups, list[SparseVector]]:
    """Unit-normalized sum of each group's non-empty member vectors.

    A group with no usable text is dissolved into ``unseeded``; the returned
    groups line up with the returned centroids.
    """
    kept, centroids, unseeded = [], [], set(seeds.unseeded)
    for group in seeds.groups:
        members = [vectors[d] for d in group if not vectors[d].is_empty]
        if not members:
            unseeded.update(group)
            continue
        kept.append(group)
        centroids.append(l2_normalize(sum_vectors(members)))
    return SeedGroups(tuple(kept), frozenset(unseeded), seeds.rounds), centroids
