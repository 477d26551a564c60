"""Network translation to weakly reversible, deficiency-zero form.

The route: enumerate flux modes, pick a reaction-to-reaction graph whose
minimal directed cycles are exactly the mode supports (EM-compatible)
while reactions sharing a source complex receive identical in-edge bundles
(CS-compatible), then propagate translation complexes along the graph so
that product complexes line up with successor source complexes. Adding
the translation complex to both sides of a reaction changes the graph
structure but not the reaction vector, so the dynamics are untouched.

The graph choice is a small binary optimization (minimize the number of
edges, one directed Hamiltonian cycle per mode support). It is solved by
deterministic enumeration: per-mode cycles are generated starting from the
lowest reaction visiting larger indices first, complete assignments are
ranked by (edge count, discovery order), and a posteriori checks (EM
compatibility, solvability of the translation-complex system) reject a
candidate before the next one is tried. This reproduces the published
graphs for the bundled networks; instances at this scale are tiny.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .efm import FluxModeSet
from .network import (
    ComplexVec,
    Reaction,
    ReactionNetwork,
    ode_rhs,
    structural_summary,
    _strongly_connected_components,
    _weak_components,
)
from .ratlinalg import RationalMatrix


class TranslationError(Exception):
    """No weakly reversible, deficiency-zero translation was found."""


@dataclass(frozen=True)
class ReactionGraph:
    """Directed graph on reaction indices (no self-loops)."""

    num_reactions: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for i, j in self.edges:
            if i == j:
                raise ValueError("reaction graph has a self-loop")

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def labelled_edges(self, net: ReactionNetwork) -> list[tuple[str, str]]:
        return [(net.reactions[i].label, net.reactions[j].label) for i, j in self.edges]


@dataclass(frozen=True)
class CompatibilityReport:
    cs_violations: tuple[str, ...]
    em_missing: tuple[tuple[int, ...], ...]  # mode supports with no minimal cycle
    em_extra: tuple[tuple[int, ...], ...]  # minimal cycle vertex sets that are not supports
    ps_edge_mismatches: tuple[tuple[int, int], ...]
    ps_missing_edges: tuple[tuple[int, int], ...]

    @property
    def cs_ok(self) -> bool:
        return not self.cs_violations

    @property
    def em_ok(self) -> bool:
        return not self.em_missing and not self.em_extra

    @property
    def ps_ok(self) -> bool:
        return not self.ps_edge_mismatches and not self.ps_missing_edges


def _same_source_groups(net: ReactionNetwork) -> dict[int, list[int]]:
    groups: dict[int, list[int]] = {}
    for k, rx in enumerate(net.reactions):
        groups.setdefault(rx.source, []).append(k)
    return {src: ks for src, ks in groups.items() if len(ks) > 1}


def _forbidden_pairs(net: ReactionNetwork) -> set[tuple[int, int]]:
    # An edge between two reactions with a common source would force a
    # self-loop through the all-or-none in-edge rule, so it is banned.
    banned: set[tuple[int, int]] = set()
    for ks in _same_source_groups(net).values():
        for i in ks:
            for j in ks:
                if i != j:
                    banned.add((i, j))
    return banned


def _hamiltonian_cycles(support: list[int], forbidden: set[tuple[int, int]]) -> list[tuple[tuple[int, int], ...]]:
    """Directed Hamiltonian cycles on ``support`` avoiding forbidden arcs.

    Cycles start at the smallest reaction index and extend by trying larger
    indices first; the resulting order fixes every downstream tie-break.
    """
    if len(support) == 2:
        a, b = support
        if (a, b) in forbidden or (b, a) in forbidden:
            return []
        return [((a, b), (b, a))]
    start = support[0]
    rest = support[1:]
    out: list[tuple[tuple[int, int], ...]] = []

    def extend(path: list[int], remaining: set[int]) -> None:
        if not remaining:
            if (path[-1], start) not in forbidden:
                cycle = tuple((path[i], path[i + 1]) for i in range(len(path) - 1)) + ((path[-1], start),)
                out.append(cycle)
            return
        for nxt in sorted(remaining, reverse=True):
            if (path[-1], nxt) in forbidden:
                continue
            path.append(nxt)
            remaining.remove(nxt)
            extend(path, remaining)
            remaining.add(nxt)
            path.pop()

    extend([start], set(rest))
    return out


def _cs_closure(
    edges: set[tuple[int, int]], same_source: dict[int, list[int]], forbidden: set[tuple[int, int]]
) -> set[tuple[int, int]] | None:
    """Close an edge set under the common-source all-or-none rule.

    Returns None when the closure would require a forbidden arc.
    """
    closed = set(edges)
    frontier = list(edges)
    while frontier:
        k, i = frontier.pop()
        for ks in same_source.values():
            if i in ks:
                for j in ks:
                    if j == i or j == k:
                        continue
                    arc = (k, j)
                    if arc in closed:
                        continue
                    if arc in forbidden or k == j:
                        return None
                    closed.add(arc)
                    frontier.append(arc)
    return closed


def _simple_cycle_vertex_sets(num: int, edges: frozenset[tuple[int, int]]) -> set[frozenset[int]]:
    adjacency: list[list[int]] = [[] for _ in range(num)]
    for i, j in sorted(edges):
        adjacency[i].append(j)
    found: set[frozenset[int]] = set()

    # Enumerate simple cycles whose smallest vertex is the start vertex.
    def dfs(start: int, v: int, path: list[int], on_path: set[int]) -> None:
        for w in adjacency[v]:
            if w == start:
                found.add(frozenset(path))
            elif w > start and w not in on_path:
                path.append(w)
                on_path.add(w)
                dfs(start, w, path, on_path)
                on_path.remove(w)
                path.pop()

    for start in range(num):
        dfs(start, start, [start], {start})
    return found


def minimal_cycle_vertex_sets(graph: ReactionGraph) -> set[frozenset[int]]:
    """Vertex sets of directed cycles containing no smaller directed cycle."""
    all_sets = _simple_cycle_vertex_sets(graph.num_reactions, graph.edge_set())
    return {s for s in all_sets if not any(t < s for t in all_sets)}


def compatibility_check(net: ReactionNetwork, graph: ReactionGraph, modes: FluxModeSet) -> CompatibilityReport:
    """Report CS, EM and PS compatibility violations (empty report = pass).

    PS compatibility (edges exactly where the product complex equals the
    next source complex) is only expected of already-translated networks;
    for raw inputs the PS section simply reports how far the graph is from
    that property. Singleton mode supports (phantom-edge columns) are
    exempt from the EM check.
    """
    edges = graph.edge_set()
    cs: list[str] = []
    for ks in _same_source_groups(net).values():
        for a in range(len(ks)):
            for b in range(a + 1, len(ks)):
                i, j = ks[a], ks[b]
                for k in range(graph.num_reactions):
                    has_i = (k, i) in edges and k != i
                    has_j = (k, j) in edges and k != j
                    if has_i != has_j:
                        cs.append(
                            f"reactions {net.reactions[i].label},{net.reactions[j].label} share a source but "
                            f"in-edge from {net.reactions[k].label} covers only one"
                        )

    supports = {frozenset(s) for s in (set(sup) for sup in (r.support for r in modes.modes)) if len(s) >= 2}
    minimal = minimal_cycle_vertex_sets(graph)
    em_missing = tuple(tuple(sorted(s)) for s in sorted(supports - minimal, key=sorted))
    em_extra = tuple(tuple(sorted(s)) for s in sorted(minimal - supports, key=sorted))

    ps_bad_edges: list[tuple[int, int]] = []
    ps_missing: list[tuple[int, int]] = []
    for i, ri in enumerate(net.reactions):
        for j, rj in enumerate(net.reactions):
            if i == j:
                continue
            equal = net.complexes[ri.product] == net.complexes[rj.source]
            if (i, j) in edges and not equal:
                ps_bad_edges.append((i, j))
            if (i, j) not in edges and equal:
                ps_missing.append((i, j))

    return CompatibilityReport(tuple(cs), em_missing, em_extra, tuple(ps_bad_edges), tuple(ps_missing))


def build_reaction_graph(net: ReactionNetwork, modes: FluxModeSet, budget: int = 10**6) -> ReactionGraph:
    """CS- and EM-compatible reaction-to-reaction graph with fewest edges.

    Requires a unitary, covering mode set. Candidates are enumerated as
    one Hamiltonian cycle per mode support, closed under the common-source
    rule, ranked by (edge count, discovery order); a candidate failing the
    exhaustive EM check or the translation-complex consistency check is
    discarded and the next one tried. Raises :class:`TranslationError`
    when no candidate survives within the node budget.
    """
    if not modes.unitary or not modes.covers:
        raise TranslationError(
            f"mode set must be unitary and cover all reactions (unitary={modes.unitary}, covers={modes.covers})"
        )
    supports = [sorted(ray.support) for ray in modes.modes if len(ray.support) >= 2]
    forbidden = _forbidden_pairs(net)
    same_source = _same_source_groups(net)

    cycle_choices = []
    for support in supports:
        cycles = _hamiltonian_cycles(support, forbidden)
        if not cycles:
            raise TranslationError(f"no admissible cycle for mode support {support}")
        cycle_choices.append(cycles)

    candidates: dict[frozenset[tuple[int, int]], int] = {}
    nodes = 0

    def assign(idx: int, edges: set[tuple[int, int]]) -> None:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise TranslationError(f"search budget of {budget} nodes exhausted")
        if idx == len(cycle_choices):
            closed = _cs_closure(edges, same_source, forbidden)
            if closed is not None:
                candidates.setdefault(frozenset(closed), len(candidates))
            return
        for cycle in cycle_choices[idx]:
            assign(idx + 1, edges | set(cycle))

    assign(0, set())
    if not candidates:
        raise TranslationError("no CS-compatible cycle assignment exists")

    ranked = sorted(candidates.items(), key=lambda item: (len(item[0]), item[1]))
    for edge_set, _ in ranked:
        graph = ReactionGraph(len(net.reactions), tuple(sorted(edge_set)))
        report = compatibility_check(net, graph, modes)
        if not (report.cs_ok and report.em_ok):
            continue
        try:
            translation_complexes(net, graph)
        except TranslationError:
            continue
        return graph
    raise TranslationError("every candidate reaction-to-reaction graph failed the compatibility checks")


def translation_complexes(net: ReactionNetwork, graph: ReactionGraph) -> list[ComplexVec]:
    """Translation complexes solving alpha_i - alpha_j = y_s(j) - y_p(i) on edges.

    Seeds alpha = 0 at the lowest-index unprocessed reaction of each weakly
    connected graph component and propagates along the edges, then shifts
    every linkage class of the translated network so all complexes are
    componentwise nonnegative. Raises :class:`TranslationError` with the
    rank evidence when the system is inconsistent.
    """
    m = len(net.species)
    r = len(net.reactions)

    def src(k: int) -> ComplexVec:
        return net.complexes[net.reactions[k].source]

    def prod(k: int) -> ComplexVec:
        return net.complexes[net.reactions[k].product]

    def rhs(i: int, j: int) -> tuple[int, ...]:
        return tuple(src(j)[c] - prod(i)[c] for c in range(m))

    incident: list[list[tuple[int, int]]] = [[] for _ in range(r)]
    for i, j in graph.edges:
        incident[i].append((i, j))
        incident[j].append((i, j))
    for lst in incident:
        lst.sort()

    alpha: list[tuple[int, ...] | None] = [None] * r
    for seed in range(r):
        if alpha[seed] is not None:
            continue
        alpha[seed] = (0,) * m
        queue = [seed]
        while queue:
            v = queue.pop(0)
            av = alpha[v]
            for i, j in incident[v]:
                d = rhs(i, j)
                if v == i and alpha[j] is None:
                    alpha[j] = tuple(av[c] - d[c] for c in range(m))
                    queue.append(j)
                elif v == j and alpha[i] is None:
                    alpha[i] = tuple(av[c] + d[c] for c in range(m))
                    queue.append(i)

    for i, j in graph.edges:
        d = rhs(i, j)
        if tuple(alpha[i][c] - alpha[j][c] for c in range(m)) != d:
            a_mat = RationalMatrix([[0] * r for _ in graph.edges])
            for row, (ei, ej) in enumerate(graph.edges):
                a_mat.data[row][ei] = Fraction(1)
                a_mat.data[row][ej] = Fraction(-1)
            rank_a = a_mat.rank()
            rank_aug = rank_a
            for c in range(m):
                aug = RationalMatrix(
                    [a_mat.data[row][:] + [Fraction(rhs(ei, ej)[c])] for row, (ei, ej) in enumerate(graph.edges)]
                )
                rank_aug = max(rank_aug, aug.rank())
            raise TranslationError(
                f"no valid translation exists for this graph: rank(A)={rank_a}, rank([A|b])={rank_aug}"
            )

    # Nonnegativity shift, uniform per linkage class of the translated network.
    translated: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    for k in range(r):
        ts = tuple(src(k)[c] + alpha[k][c] for c in range(m))
        tp = tuple(prod(k)[c] + alpha[k][c] for c in range(m))
        translated.append((ts, tp))
    complexes: list[tuple[int, ...]] = []
    cindex: dict[tuple[int, ...], int] = {}
    for ts, tp in translated:
        for vec in (ts, tp):
            if vec not in cindex:
                cindex[vec] = len(complexes)
                complexes.append(vec)
    comps = _weak_components(len(complexes), [(cindex[ts], cindex[tp]) for ts, tp in translated])
    shift_of_class: list[tuple[int, ...]] = []
    for comp in comps:
        mins = [min(complexes[ci][c] for ci in comp) for c in range(m)]
        shift_of_class.append(tuple(max(0, -mn) for mn in mins))
    class_of_complex = {}
    for cls, comp in enumerate(comps):
        for ci in comp:
            class_of_complex[ci] = cls
    result: list[ComplexVec] = []
    for k in range(r):
        shift = shift_of_class[class_of_complex[cindex[translated[k][0]]]]
        result.append(tuple(alpha[k][c] + shift[c] for c in range(m)))
    return result


# -- Generalized network assembly ---------------------------------------


@dataclass(frozen=True)
class GcrnVertex:
    index: int
    stoich: ComplexVec
    kinetic: ComplexVec


@dataclass(frozen=True)
class GcrnEdge:
    tail: int
    head: int
    rate_symbol: str
    reaction: int | None = None  # original reaction index; None for phantom edges

    @property
    def phantom(self) -> bool:
        return self.reaction is None


@dataclass(frozen=True)
class Gcrn:
    """Generalized network: graph vertices carrying a stoichiometric and a
    kinetic complex, effective edges from the translated reactions, and
    phantom edges (zero reaction vector, fresh σ rate symbol) separating
    vertices that share a stoichiometric complex."""

    species: tuple[str, ...]
    vertices: tuple[GcrnVertex, ...]
    edges: tuple[GcrnEdge, ...]
    alpha: tuple[ComplexVec, ...]
    sigma_symbols: tuple[str, ...]
    source_labels: tuple[str, ...]  # original reaction labels, by reaction index

    @property
    def phantom_edges(self) -> tuple[GcrnEdge, ...]:
        return tuple(e for e in self.edges if e.phantom)

    def kinetic_assignment(self) -> dict[int, ComplexVec]:
        return {v.index: v.kinetic for v in self.vertices}

    def stoich_network(self) -> ReactionNetwork:
        """Translated network over the effective edges (a plain CRN)."""
        complexes: list[ComplexVec] = []
        index: dict[ComplexVec, int] = {}

        def intern(vec: ComplexVec) -> int:
            if vec not in index:
                index[vec] = len(complexes)
                complexes.append(vec)
            return index[vec]

        reactions = []
        for e in self.edges:
            if e.phantom:
                continue
            s = intern(self.vertices[e.tail].stoich)
            p = intern(self.vertices[e.head].stoich)
            reactions.append(
                Reaction(self.source_labels[e.reaction], s, p, e.rate_symbol, phantom=s == p)
            )
        return ReactionNetwork(self.species, tuple(complexes), tuple(reactions))

    def ode_rhs(self, rates: dict[str, float], conc: list[float]) -> list[float]:
        """Mass-action derivatives driven by the kinetic complexes.

        Phantom edges contribute nothing (zero stoichiometric vector), so
        the result matches the original network's derivatives exactly.
        """
        out = [0.0] * len(self.species)
        for e in self.edges:
            if e.phantom:
                continue
            flux = rates[e.rate_symbol]
            for coeff, x in zip(self.vertices[e.tail].kinetic, conc):
                if coeff:
                    flux *= x**coeff
            stoich_t = self.vertices[e.tail].stoich
            stoich_h = self.vertices[e.head].stoich
            for j in range(len(out)):
                d = stoich_h[j] - stoich_t[j]
                if d:
                    out[j] += flux * d
        return out

    def kinetic_text(self) -> str:
        lines = []
        from .network import format_complex

        for e in self.edges:
            label = "phantom" if e.phantom else self.source_labels[e.reaction]
            lines.append(
                f"{label}: {format_complex(self.vertices[e.tail].kinetic, self.species)} -> "
                f"{format_complex(self.vertices[e.head].kinetic, self.species)} ; {e.rate_symbol}"
            )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class GcrnSummary:
    effective_deficiency: int
    kinetic_deficiency: int
    stoich_weakly_reversible: bool
    kinetic_weakly_reversible: bool

    @property
    def both_weakly_reversible(self) -> bool:
        return self.stoich_weakly_reversible and self.kinetic_weakly_reversible


def _fresh_sigma_symbols(net: ReactionNetwork):
    used = {rx.rate_symbol for rx in net.reactions}
    i = 1
    while True:
        name = f"σ{i}"
        if name not in used:
            yield name
        i += 1


def build_gcrn(net: ReactionNetwork, alpha: list[ComplexVec]) -> Gcrn:
    """Assemble the generalized network for translation complexes ``alpha``.

    Each translated reaction runs y_s(k)+alpha_k -> y_p(k)+alpha_k with its
    original rate symbol, and the tail vertex's kinetic complex is the
    original source y_s(k), which preserves the mass-action dynamics. When
    the reactions leaving one translated complex carry two or more distinct
    original sources, the vertex is split into one vertex per kinetic
    complex (ordered by lowest original reaction index) joined by a chain
    of phantom edges from lower to higher index; incoming edges land on the
    first vertex of the chain, which keeps every phantom edge on a directed
    cycle whenever the translated network is weakly reversible.
    """
    m = len(net.species)
    r = len(net.reactions)
    if len(alpha) != r:
        raise ValueError("alpha length must equal the reaction count")
    for k, vec in enumerate(alpha):
        if len(vec) != m or any(c < 0 for c in vec):
            raise ValueError(f"alpha[{k}] must be a nonnegative species vector")

    ts = [tuple(net.complexes[net.reactions[k].source][c] + alpha[k][c] for c in range(m)) for k in range(r)]
    tp = [tuple(net.complexes[net.reactions[k].product][c] + alpha[k][c] for c in range(m)) for k in range(r)]

    stoich_complexes: list[ComplexVec] = []
    cindex: dict[ComplexVec, int] = {}
    for k in range(r):
        for vec in (ts[k], tp[k]):
            if vec not in cindex:
                cindex[vec] = len(stoich_complexes)
                stoich_complexes.append(vec)

    vertices: list[GcrnVertex] = []
    edges: list[GcrnEdge] = []
    sigma_gen = _fresh_sigma_symbols(net)
    sigmas: list[str] = []
    tail_vertex: dict[int, int] = {}  # reaction -> its source vertex
    receiver: dict[int, int] = {}  # stoich complex id -> vertex taking in-edges

    for cid, cvec in enumerate(stoich_complexes):
        out_reactions = [k for k in range(r) if ts[k] == cvec]
        groups: dict[ComplexVec, list[int]] = {}
        for k in out_reactions:
            groups.setdefault(net.complexes[net.reactions[k].source], []).append(k)
        ordered = sorted(groups.items(), key=lambda item: min(item[1]))
        if not ordered:
            v = GcrnVertex(len(vertices), cvec, cvec)
            vertices.append(v)
            receiver[cid] = v.index
            continue
        chain: list[int] = []
        for kinetic, members in ordered:
            v = GcrnVertex(len(vertices), cvec, kinetic)
            vertices.append(v)
            chain.append(v.index)
            for k in members:
                tail_vertex[k] = v.index
        receiver[cid] = chain[0]
        for a, b in zip(chain, chain[1:]):
            sym = next(sigma_gen)
            sigmas.append(sym)
            edges.append(GcrnEdge(a, b, sym, None))

    phantom_chain = edges
    edges = [GcrnEdge(tail_vertex[k], receiver[cindex[tp[k]]], net.reactions[k].rate_symbol, k) for k in range(r)]
    edges.extend(phantom_chain)

    return Gcrn(
        species=net.species,
        vertices=tuple(vertices),
        edges=tuple(edges),
        alpha=tuple(tuple(v) for v in alpha),
        sigma_symbols=tuple(sigmas),
        source_labels=tuple(rx.label for rx in net.reactions),
    )


def kinetic_components(g: Gcrn) -> list[list[int]]:
    """Weakly connected components of the generalized network's graph."""
    return _weak_components(len(g.vertices), [(e.tail, e.head) for e in g.edges])


def kinetic_weakly_reversible(g: Gcrn) -> bool:
    adjacency: list[list[int]] = [[] for _ in g.vertices]
    for e in g.edges:
        adjacency[e.tail].append(e.head)
    adjacency = [sorted(set(a)) for a in adjacency]
    sccs = _strongly_connected_components(len(g.vertices), adjacency)
    return len(sccs) == len(kinetic_components(g))


def kinetic_difference_rank(g: Gcrn) -> int:
    rows = []
    for e in g.edges:
        head = g.vertices[e.head].kinetic
        tail = g.vertices[e.tail].kinetic
        rows.append([head[c] - tail[c] for c in range(len(g.species))])
    if not rows:
        return 0
    return RationalMatrix(rows).rank()


def gcrn_summary(g: Gcrn) -> GcrnSummary:
    """Effective deficiency (translated network, deduplicated complexes)
    and kinetic deficiency (vertex graph with phantom edges included,
    complexes read from the kinetic labels)."""
    stoich = structural_summary(g.stoich_network())
    comps = kinetic_components(g)
    s_kin = kinetic_difference_rank(g)
    delta_kin = (len(g.vertices) - len(comps)) - s_kin
    return GcrnSummary(
        effective_deficiency=stoich.delta,
        kinetic_deficiency=delta_kin,
        stoich_weakly_reversible=stoich.weakly_reversible,
        kinetic_weakly_reversible=kinetic_weakly_reversible(g),
    )


def identity_gcrn(net: ReactionNetwork) -> Gcrn:
    """The network viewed as its own generalized network (alpha = 0)."""
    zero = (0,) * len(net.species)
    return build_gcrn(net, [zero] * len(net.reactions))


def dynamics_match(net: ReactionNetwork, g: Gcrn, rates: dict[str, float], conc: list[float], rel_tol: float = 1e-12) -> bool:
    """Check original vs generalized derivatives at one sample point."""
    a = ode_rhs(net, rates, conc)
    b = g.ode_rhs(rates, conc)
    scale = max(max(abs(x) for x in a), max(abs(x) for x in b), 1e-300)
    return all(abs(x - y) <= rel_tol * scale for x, y in zip(a, b))
