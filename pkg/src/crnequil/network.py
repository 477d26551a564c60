"""Reaction network data model: parsing, stoichiometry, graph structure.

Network text format (UTF-8, one statement per line):

    # comment (ignored to end of line)
    R1: A + B -> C + B ; k1
    R2,R3: A <-> B ; k2,k3
    R4: C -> 0 ; k4

A complex is ``0`` (the zero complex, representing the external
environment; it is not a species) or a ``+``-separated list of terms
``c*S`` / ``c S`` / ``S`` with positive integer coefficient ``c``
(default 1) and species names matching ``[A-Za-z_][A-Za-z0-9_]*``.
Reversible arrows expand into two reactions in written order. Reaction
labels and rate symbols must each be unique. A self-loop (source equal to
product) is accepted only with a rate symbol starting with ``σ`` and is
flagged as a phantom edge, so generalized networks emitted by the
translation stage round-trip through this parser.

Species order is first-appearance order; complexes are deduplicated by
coefficient vector. All values are immutable after construction and every
operation here is a pure function, so networks are safe to share across
threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .ratlinalg import Inconsistency, RationalMatrix, solve_consistent

ComplexVec = tuple[int, ...]

_NAME = r"[A-Za-zσ_][A-Za-z0-9σ_]*"
_TERM_RE = re.compile(r"^(?:(\d+)\s*\*?\s*)?([A-Za-z_][A-Za-z0-9_]*)$")
_LINE_RE = re.compile(
    rf"^(?P<labels>{_NAME}(?:\s*,\s*{_NAME})?)\s*:\s*"
    r"(?P<lhs>[^;]*?)\s*(?P<arrow><->|->)\s*(?P<rhs>[^;]*?)\s*;\s*"
    rf"(?P<rates>{_NAME}(?:\s*,\s*{_NAME})?)\s*$"
)


class NetworkSyntaxError(ValueError):
    """Malformed network text; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class Species:
    name: str
    index: int


@dataclass(frozen=True)
class Reaction:
    """Directed reaction between complex indices with a symbolic rate."""

    label: str
    source: int
    product: int
    rate_symbol: str
    phantom: bool = False


@dataclass(frozen=True)
class StructuralSummary:
    """Counts and indices characterizing a network's graph structure."""

    r: int
    m: int
    n: int
    s: int
    l: int
    sl: int
    delta: int
    weakly_reversible: bool


@dataclass(frozen=True)
class ReactionNetwork:
    species: tuple[str, ...]
    complexes: tuple[ComplexVec, ...]
    reactions: tuple[Reaction, ...]
    _complex_index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_complex_index", {c: i for i, c in enumerate(self.complexes)})
        if len(set(self.species)) != len(self.species):
            raise ValueError("duplicate species name")
        if len(self._complex_index) != len(self.complexes):
            raise ValueError("complex list not deduplicated")
        for rx in self.reactions:
            if not (0 <= rx.source < len(self.complexes) and 0 <= rx.product < len(self.complexes)):
                raise ValueError(f"{rx.label}: complex index out of range")
            if rx.source == rx.product and not rx.phantom:
                raise ValueError(f"{rx.label}: source equals product but reaction is not a phantom edge")

    @property
    def species_objects(self) -> tuple[Species, ...]:
        return tuple(Species(name, i) for i, name in enumerate(self.species))

    def species_index(self, name: str) -> int:
        return self.species.index(name)

    def complex_str(self, vec: ComplexVec) -> str:
        return format_complex(vec, self.species)

    def reaction_str(self, rx: Reaction) -> str:
        return (
            f"{rx.label}: {self.complex_str(self.complexes[rx.source])} -> "
            f"{self.complex_str(self.complexes[rx.product])} ; {rx.rate_symbol}"
        )

    def subnetwork(self, reaction_indices: list[int]) -> "ReactionNetwork":
        """Network induced by a subset of reactions (same species universe).

        Reactions keep their labels and rate symbols; complexes are
        re-deduplicated in first-use order.
        """
        complexes: list[ComplexVec] = []
        index: dict[ComplexVec, int] = {}

        def intern(vec: ComplexVec) -> int:
            if vec not in index:
                index[vec] = len(complexes)
                complexes.append(vec)
            return index[vec]

        reactions = []
        for i in sorted(reaction_indices):
            rx = self.reactions[i]
            reactions.append(
                Reaction(
                    label=rx.label,
                    source=intern(self.complexes[rx.source]),
                    product=intern(self.complexes[rx.product]),
                    rate_symbol=rx.rate_symbol,
                    phantom=rx.phantom,
                )
            )
        return ReactionNetwork(self.species, tuple(complexes), tuple(reactions))


def format_complex(vec: ComplexVec, species: tuple[str, ...]) -> str:
    parts = []
    for coeff, name in zip(vec, species):
        if coeff == 0:
            continue
        parts.append(name if coeff == 1 else f"{coeff}*{name}")
    return " + ".join(parts) if parts else "0"


def _parse_complex(text: str, line_no: int, species: list[str], seen: dict[str, int]) -> dict[str, int]:
    text = text.strip()
    if not text:
        raise NetworkSyntaxError(line_no, "empty complex")
    if text == "0":
        return {}
    coeffs: dict[str, int] = {}
    for term in text.split("+"):
        term = term.strip()
        m = _TERM_RE.match(term)
        if not m:
            raise NetworkSyntaxError(line_no, f"bad complex term {term!r}")
        coeff = int(m.group(1)) if m.group(1) else 1
        if coeff <= 0:
            raise NetworkSyntaxError(line_no, f"non-positive coefficient in {term!r}")
        name = m.group(2)
        if name not in seen:
            seen[name] = len(species)
            species.append(name)
        coeffs[name] = coeffs.get(name, 0) + coeff
    return coeffs


def parse_network(text: str) -> ReactionNetwork:
    """Parse the text format described in the module docstring.

    Raises :class:`NetworkSyntaxError` on malformed lines, duplicate
    reaction labels, or a rate symbol bound to two different reactions.
    """
    species: list[str] = []
    seen: dict[str, int] = {}
    raw: list[tuple[int, str, dict[str, int], dict[str, int], str]] = []
    labels_used: set[str] = set()
    rates_used: set[str] = set()

    for line_no, line in enumerate(text.splitlines(), start=1):
        stmt = line.split("#", 1)[0].strip()
        if not stmt:
            continue
        m = _LINE_RE.match(stmt)
        if not m:
            raise NetworkSyntaxError(line_no, f"cannot parse statement {stmt!r}")
        labels = [s.strip() for s in m.group("labels").split(",")]
        rates = [s.strip() for s in m.group("rates").split(",")]
        reversible = m.group("arrow") == "<->"
        expected = 2 if reversible else 1
        if len(labels) != expected or len(rates) != expected:
            raise NetworkSyntaxError(
                line_no, f"{'reversible' if reversible else 'irreversible'} statement needs {expected} label(s) and rate(s)"
            )
        lhs = _parse_complex(m.group("lhs"), line_no, species, seen)
        rhs = _parse_complex(m.group("rhs"), line_no, species, seen)
        pairs = [(labels[0], lhs, rhs, rates[0])]
        if reversible:
            pairs.append((labels[1], rhs, lhs, rates[1]))
        for label, src, prod, rate in pairs:
            if label in labels_used:
                raise NetworkSyntaxError(line_no, f"duplicate reaction label {label!r}")
            if rate in rates_used:
                raise NetworkSyntaxError(line_no, f"rate symbol {rate!r} already bound to another reaction")
            labels_used.add(label)
            rates_used.add(rate)
            raw.append((line_no, label, src, prod, rate))

    if not raw:
        raise NetworkSyntaxError(1, "no reactions")

    def to_vec(coeffs: dict[str, int]) -> ComplexVec:
        return tuple(coeffs.get(name, 0) for name in species)

    complexes: list[ComplexVec] = []
    index: dict[ComplexVec, int] = {}
    reactions: list[Reaction] = []
    for line_no, label, src, prod, rate in raw:
        sv, pv = to_vec(src), to_vec(prod)
        for vec in (sv, pv):
            if vec not in index:
                index[vec] = len(complexes)
                complexes.append(vec)
        if sv == pv and not rate.startswith("σ"):
            raise NetworkSyntaxError(line_no, f"{label}: source equals product (only σ-rate phantom edges may)")
        reactions.append(Reaction(label, index[sv], index[pv], rate, phantom=sv == pv))
    return ReactionNetwork(tuple(species), tuple(complexes), tuple(reactions))


def serialize_network(net: ReactionNetwork) -> str:
    """Canonical text form: one irreversible statement per reaction.

    ``parse_network(serialize_network(net)) == net`` provided species
    first-appearance order matches the stored order (true for any network
    produced by :func:`parse_network` or the pipeline).
    """
    return "\n".join(net.reaction_str(rx) for rx in net.reactions) + "\n"


def stoichiometric_matrix(net: ReactionNetwork) -> RationalMatrix:
    """Species x reactions matrix; column k is product minus source of reaction k.

    Phantom edges contribute all-zero columns.
    """
    m = len(net.species)
    cols = []
    for rx in net.reactions:
        src = net.complexes[rx.source]
        prod = net.complexes[rx.product]
        cols.append([prod[i] - src[i] for i in range(m)])
    if not cols:
        return RationalMatrix.zeros(m, 0)
    return RationalMatrix.from_columns(cols)


def _strongly_connected_components(n: int, adjacency: list[list[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative to be safe on deep graphs.

    Components are returned sorted by their lowest contained node index.
    """
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, ei = work[-1]
            if ei == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            while ei < len(adjacency[v]):
                w = adjacency[v][ei]
                ei += 1
                if index[w] == -1:
                    work[-1] = (v, ei)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    comps.sort(key=min)
    return comps


def _weak_components(n: int, edges: list[tuple[int, int]]) -> list[list[int]]:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for v in range(n):
        groups.setdefault(find(v), []).append(v)
    return [sorted(g) for g in sorted(groups.values(), key=min)]


def linkage_classes(net: ReactionNetwork) -> list[list[int]]:
    """Weakly connected components of the complex graph (complex indices)."""
    edges = [(rx.source, rx.product) for rx in net.reactions]
    return _weak_components(len(net.complexes), edges)


def strong_linkage_classes(net: ReactionNetwork) -> list[list[int]]:
    adjacency: list[list[int]] = [[] for _ in net.complexes]
    for rx in net.reactions:
        if rx.source != rx.product:
            adjacency[rx.source].append(rx.product)
    adjacency = [sorted(set(a)) for a in adjacency]
    return _strongly_connected_components(len(net.complexes), adjacency)


def structural_summary(net: ReactionNetwork) -> StructuralSummary:
    """Reaction/species/complex counts, rank, linkage classes, deficiency.

    Deficiency is n - l - s. Weak reversibility holds exactly when linkage
    classes and strong linkage classes coincide, i.e. every reaction lies
    on a directed cycle.
    """
    s = stoichiometric_matrix(net).rank()
    l = len(linkage_classes(net))
    sl = len(strong_linkage_classes(net))
    n = len(net.complexes)
    return StructuralSummary(
        r=len(net.reactions),
        m=len(net.species),
        n=n,
        s=s,
        l=l,
        sl=sl,
        delta=n - l - s,
        weakly_reversible=l == sl,
    )


def mass_action_fluxes(net: ReactionNetwork, rates: dict[str, float], conc: list[float]) -> list[float]:
    """Per-reaction mass-action flux rate_k * prod_j x_j^(source coefficient).

    Phantom edges get flux 0 and need no rate entry.
    """
    if len(conc) != len(net.species):
        raise ValueError("concentration vector length mismatch")
    fluxes = []
    for rx in net.reactions:
        if rx.phantom:
            fluxes.append(0.0)
            continue
        if rx.rate_symbol not in rates:
            raise KeyError(f"missing rate symbol {rx.rate_symbol!r}")
        flux = rates[rx.rate_symbol]
        for coeff, x in zip(net.complexes[rx.source], conc):
            if coeff:
                flux *= x**coeff
        fluxes.append(flux)
    return fluxes


def ode_rhs(net: ReactionNetwork, rates: dict[str, float], conc: list[float]) -> list[float]:
    """Mass-action time derivatives N v(x) as plain floats."""
    fluxes = mass_action_fluxes(net, rates, conc)
    out = [0.0] * len(net.species)
    for rx, flux in zip(net.reactions, fluxes):
        if flux == 0.0:
            continue
        src = net.complexes[rx.source]
        prod = net.complexes[rx.product]
        for j in range(len(out)):
            d = prod[j] - src[j]
            if d:
                out[j] += flux * d
    return out


def conservation_laws(net: ReactionNetwork) -> RationalMatrix:
    """Columns spanning ker(N^T); each column w satisfies w^T N = 0.

    Along trajectories d(w . x)/dt = 0, so these are the network's linear
    conserved quantities.
    """
    return stoichiometric_matrix(net).cokernel_basis()


def in_cokernel_span(net: ReactionNetwork, vector: list) -> bool:
    """Exact membership test of ``vector`` in the conservation-law space."""
    basis = conservation_laws(net)
    if basis.cols == 0:
        return all(x == 0 for x in vector)
    return not isinstance(solve_consistent(basis, vector), Inconsistency)
