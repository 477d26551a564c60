"""Independent network decomposition and subnetwork merging.

A decomposition (partition of the reaction set) is independent when the
subnetwork stoichiometric ranks sum to the whole network's rank; the
positive equilibria of the whole network are then exactly the intersection
of the subnetworks' equilibria. The finest such partition is found with a
coordinate graph: pick a maximal independent set of reaction vectors
greedily, expand every remaining vector in that basis, and connect each
dependent reaction to the basis reactions appearing in its expansion.
"""

from __future__ import annotations

from dataclasses import dataclass

from .network import ReactionNetwork, Reaction, stoichiometric_matrix
from .ratlinalg import Inconsistency, RationalMatrix, solve_consistent


@dataclass(frozen=True)
class Decomposition:
    """Partition of reaction indices with per-block and total ranks."""

    blocks: tuple[tuple[int, ...], ...]
    block_ranks: tuple[int, ...]
    total_rank: int
    independent: bool

    @property
    def is_trivial(self) -> bool:
        return len(self.blocks) == 1

    def block_labels(self, net: ReactionNetwork) -> list[list[str]]:
        return [[net.reactions[i].label for i in block] for block in self.blocks]


def _block_rank(net: ReactionNetwork, block: tuple[int, ...]) -> int:
    n = stoichiometric_matrix(net)
    sub = RationalMatrix.from_columns([n.column(i) for i in block])
    return sub.rank()


def finest_independent_decomposition(net: ReactionNetwork) -> Decomposition:
    """Finest independent decomposition via the coordinate graph.

    Steps: (1) greedy maximal independent set of reaction vectors in
    increasing reaction index; (2) expand each dependent vector in that
    basis; (3) link each dependent reaction to every basis reaction with a
    nonzero coefficient (basis reactions co-occurring in an expansion end
    up connected through it); (4) blocks are the connected components.
    Rank additivity of the result is verified before returning.
    """
    n = stoichiometric_matrix(net)
    r = len(net.reactions)
    columns = n.columns()

    basis: list[int] = []
    current_rank = 0
    for k in range(r):
        candidate = RationalMatrix.from_columns([columns[i] for i in basis] + [columns[k]])
        if candidate.rank() > current_rank:
            basis.append(k)
            current_rank += 1

    parent = list(range(r))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    basis_matrix = RationalMatrix.from_columns([columns[i] for i in basis])
    for k in range(r):
        if k in basis:
            continue
        coeffs = solve_consistent(basis_matrix, columns[k])
        assert not isinstance(coeffs, Inconsistency)  # basis is maximal
        support = [basis[j] for j, c in enumerate(coeffs) if c != 0]
        for b in support:
            union(k, b)

    groups: dict[int, list[int]] = {}
    for k in range(r):
        groups.setdefault(find(k), []).append(k)
    blocks = tuple(tuple(sorted(g)) for g in sorted(groups.values(), key=min))
    return verify_independence(net, [list(b) for b in blocks])


def verify_independence(net: ReactionNetwork, blocks: list[list[int]]) -> Decomposition:
    """Fill ranks and the independence flag for a given partition.

    Raises ValueError if ``blocks`` is not a partition of the reaction set.
    """
    r = len(net.reactions)
    seen: set[int] = set()
    for block in blocks:
        for i in block:
            if not 0 <= i < r:
                raise ValueError(f"reaction index {i} out of range")
            if i in seen:
                raise ValueError(f"reaction index {i} appears in two blocks")
            seen.add(i)
    if len(seen) != r:
        raise ValueError("partition does not cover all reactions")
    ordered = tuple(tuple(sorted(b)) for b in sorted((list(b) for b in blocks), key=min))
    ranks = tuple(_block_rank(net, b) for b in ordered)
    total = stoichiometric_matrix(net).rank()
    return Decomposition(ordered, ranks, total, independent=sum(ranks) == total)


def merge_subnetworks(parts: list[ReactionNetwork]) -> ReactionNetwork:
    """Union of reactions over a shared species universe.

    Parts must carry the identical species tuple. Reaction order is
    preserved part by part; complexes are re-deduplicated over the union.
    A rate symbol bound to reactions in two parts is an error.
    """
    if not parts:
        raise ValueError("nothing to merge")
    species = parts[0].species
    for p in parts[1:]:
        if p.species != species:
            raise ValueError("parts do not share one species universe")

    complexes: list[tuple[int, ...]] = []
    index: dict[tuple[int, ...], int] = {}
    reactions: list[Reaction] = []
    rate_owner: dict[str, str] = {}
    for part in parts:
        for rx in part.reactions:
            if rx.rate_symbol in rate_owner:
                raise ValueError(
                    f"rate symbol {rx.rate_symbol!r} bound to both {rate_owner[rx.rate_symbol]} and {rx.label}"
                )
            rate_owner[rx.rate_symbol] = rx.label
            src = part.complexes[rx.source]
            prod = part.complexes[rx.product]
            for vec in (src, prod):
                if vec not in index:
                    index[vec] = len(complexes)
                    complexes.append(vec)
            reactions.append(Reaction(rx.label, index[src], index[prod], rx.rate_symbol, rx.phantom))
    return ReactionNetwork(species, tuple(complexes), tuple(reactions))
