"""Symbolic positive-equilibrium parametrization of a generalized network.

For a weakly reversible kinetic-order graph, complex balancing holds
exactly when x^(kinetic complex of v) is proportional, per connected
component, to the tree constant K_v (sum over spanning arborescences
toward v of the products of edge rate symbols). Writing the per-edge
ratios kappa_e = K_head/K_tail over a spanning forest F gives the log-
linear system M log x = log kappa with M the forest's kinetic difference
matrix, solved by x = kappa^(H^T) ∘ tau^(B^T) with H a generalized inverse
of M and B a kernel basis; when M's rows are dependent (positive kinetic
deficiency), each cokernel vector adds one side condition kappa^c = 1
tying the rate and phantom-edge symbols together. Exponents stay exact
rationals, so square roots in closed forms are represented as rational
exponents rather than floating-point radicals. When the effective
deficiency is zero the parametrized set is exactly the positive
equilibrium set of the original network; otherwise it may be a proper
subset and is flagged as such.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd

from .poly import Polynomial
from .ratlinalg import RationalMatrix
from .translate import Gcrn, GcrnEdge, gcrn_summary, kinetic_components, kinetic_weakly_reversible


class ParametrizationError(Exception):
    pass


@dataclass(frozen=True)
class SpanningForest:
    """One spanning tree per weakly connected component of the graph."""

    edges: tuple[GcrnEdge, ...]

    def __len__(self) -> int:
        return len(self.edges)


def spanning_forest(g: Gcrn, reverse_scan: bool = False) -> SpanningForest:
    """Deterministic forest: edges scanned in (tail, head, symbol) order,
    kept whenever they join two vertices not yet connected (undirected).

    ``reverse_scan`` scans the edges in the opposite order; any forest is
    equally valid, and the alternative is useful for checking that the
    parametrized equilibrium set does not depend on the choice.
    """
    parent = list(range(len(g.vertices)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen = []
    for e in sorted(g.edges, key=lambda e: (e.tail, e.head, e.rate_symbol), reverse=reverse_scan):
        ra, rb = find(e.tail), find(e.head)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
            chosen.append(e)
    expected = len(g.vertices) - len(kinetic_components(g))
    assert len(chosen) == expected
    return SpanningForest(tuple(chosen))


def kinetic_difference_matrix(g: Gcrn, forest: SpanningForest) -> RationalMatrix:
    """Row per forest edge: head kinetic complex minus tail kinetic complex."""
    rows = []
    for e in forest.edges:
        head = g.vertices[e.head].kinetic
        tail = g.vertices[e.tail].kinetic
        rows.append([head[c] - tail[c] for c in range(len(g.species))])
    if not rows:
        return RationalMatrix.zeros(0, len(g.species))
    return RationalMatrix(rows)


def tree_constants(g: Gcrn) -> list[Polynomial]:
    """Tree constant K_v for every vertex, component by component.

    K_v sums, over all spanning arborescences of v's component oriented
    toward v, the product of the edge rate symbols. Enumeration assigns
    each non-root vertex one out-edge and prunes as soon as the partial
    assignment closes a cycle.
    """
    constants: list[Polynomial] = [Polynomial.zero() for _ in g.vertices]
    for comp in kinetic_components(g):
        comp_set = set(comp)
        out_edges: dict[int, list[GcrnEdge]] = {v: [] for v in comp}
        for e in g.edges:
            if e.tail in comp_set:
                out_edges[e.tail].append(e)
        for v in comp:
            out_edges[v].sort(key=lambda e: (e.head, e.rate_symbol))
        for root in comp:
            others = [v for v in comp if v != root]
            total = Polynomial.zero()
            chosen: dict[int, int] = {}  # vertex -> chosen head

            def creates_cycle(v: int, head: int) -> bool:
                cur = head
                while cur in chosen:
                    cur = chosen[cur]
                    if cur == v:
                        return True
                return False

            def recurse(idx: int, symbols: list[str]) -> None:
                nonlocal total
                if idx == len(others):
                    total = total + Polynomial.monomial(symbols)
                    return
                v = others[idx]
                for e in out_edges[v]:
                    if e.head == v or creates_cycle(v, e.head):
                        continue
                    chosen[v] = e.head
                    symbols.append(e.rate_symbol)
                    recurse(idx + 1, symbols)
                    symbols.pop()
                    del chosen[v]

            recurse(0, [])
            constants[root] = total
    return constants


# -- Symbolic expressions ------------------------------------------------


@dataclass(frozen=True)
class PowerFactor:
    numerator: Polynomial
    denominator: Polynomial
    exponent: Fraction

    def symbols(self) -> set[str]:
        return self.numerator.symbols() | self.denominator.symbols()

    def __str__(self) -> str:
        if self.denominator.is_one():
            base = f"({self.numerator})"
        else:
            base = f"(({self.numerator})/({self.denominator}))"
        if self.exponent == 1:
            return base
        return f"{base}^({self.exponent})"


@dataclass(frozen=True)
class SymbolicPowerProduct:
    """Product of polynomial-ratio powers times free-parameter powers."""

    factors: tuple[PowerFactor, ...]
    tau_exponents: tuple[Fraction, ...]

    def symbols(self) -> set[str]:
        out: set[str] = set()
        for f in self.factors:
            if f.exponent != 0:
                out |= f.symbols()
        return out

    def evaluate(self, values: dict[str, float], tau_symbols: tuple[str, ...]) -> float:
        x = 1.0
        for f in self.factors:
            if f.exponent == 0:
                continue
            num = f.numerator.evaluate(values)
            den = f.denominator.evaluate(values)
            x *= (num / den) ** float(f.exponent)
        for sym, exp in zip(tau_symbols, self.tau_exponents):
            if exp != 0:
                x *= values[sym] ** float(exp)
        return x

    def __str__(self) -> str:
        parts = [str(f) for f in self.factors if f.exponent != 0]
        parts += [f"τ{i + 1}^({e})" for i, e in enumerate(self.tau_exponents) if e != 0]
        return " * ".join(parts) if parts else "1"


def _normalized_factors(raw: list[PowerFactor]) -> tuple[PowerFactor, ...]:
    # Canonical orientation (smaller polynomial key as numerator), merge
    # repeats by adding exponents, drop exponent 0 and num == den factors.
    merged: dict[tuple, tuple[Polynomial, Polynomial, Fraction]] = {}
    order: list[tuple] = []
    for f in raw:
        if f.exponent == 0 or f.numerator == f.denominator:
            continue
        num, den, exp = f.numerator, f.denominator, f.exponent
        if den.canonical_key() < num.canonical_key():
            num, den, exp = den, num, -exp
        key = (num.canonical_key(), den.canonical_key())
        if key in merged:
            n, d, e = merged[key]
            merged[key] = (n, d, e + exp)
        else:
            merged[key] = (num, den, exp)
            order.append(key)
    out = []
    for key in order:
        n, d, e = merged[key]
        if e != 0:
            out.append(PowerFactor(n, d, e))
    return tuple(out)


@dataclass(frozen=True)
class SideCondition:
    """One dependent forest row: prod_e kappa_e^c_e = 1, cleared to a
    polynomial identity numerator - denominator = 0."""

    exponents: tuple[int, ...]
    polynomial: Polynomial
    display: str
    designated: str  # symbol this condition is solved for during sampling

    def __str__(self) -> str:
        return self.display


@dataclass(frozen=True)
class EquilibriumParametrization:
    species: tuple[str, ...]
    per_species: dict[str, SymbolicPowerProduct] = field(compare=False)
    tau_symbols: tuple[str, ...] = ()
    sigma_symbols: tuple[str, ...] = ()
    side_conditions: tuple[SideCondition, ...] = ()
    kinetic_deficiency: int = 0
    effective_deficiency: int = 0
    exact_cover: bool = True
    rate_symbols: tuple[str, ...] = ()
    substituted_species: tuple[str, ...] | None = None
    substitution_failed: bool = False

    @property
    def free_parameters(self) -> tuple[str, ...]:
        if self.substituted_species is not None:
            return self.substituted_species + self.sigma_symbols
        return self.tau_symbols + self.sigma_symbols

    @property
    def pinned_symbols(self) -> tuple[str, ...]:
        return tuple(c.designated for c in self.side_conditions)

    @property
    def unpinned_free_parameters(self) -> tuple[str, ...]:
        pinned = set(self.pinned_symbols)
        return tuple(p for p in self.free_parameters if p not in pinned)

    @property
    def degrees_of_freedom(self) -> int:
        """Dimension of the parametrized set: free symbols minus conditions."""
        return len(self.free_parameters) - len(self.side_conditions)

    def evaluate(self, values: dict[str, float]) -> dict[str, float]:
        """Per-species values; ``values`` must bind rate symbols, sigma
        symbols and the free parameters (tau or substituted species)."""
        tau = self.tau_symbols if self.substituted_species is None else ()
        return {name: self.per_species[name].evaluate(values, tau) for name in self.species}

    def expression_symbols(self, name: str) -> set[str]:
        expr = self.per_species[name]
        syms = expr.symbols()
        if self.substituted_species is None:
            for sym, exp in zip(self.tau_symbols, expr.tau_exponents):
                if exp != 0:
                    syms.add(sym)
        return syms


def _fresh_symbols(prefix: str, used: set[str]):
    i = 1
    while True:
        name = f"{prefix}{i}"
        if name not in used:
            yield name
        i += 1


def _primitive_int_column(col: list[Fraction]) -> list[int]:
    scale = 1
    for x in col:
        scale = scale * x.denominator // gcd(scale, x.denominator)
    ints = [int(x * scale) for x in col]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return ints


def parametrize_equilibria(g: Gcrn, forest: SpanningForest | None = None) -> EquilibriumParametrization:
    """Build the closed-form positive equilibrium parametrization.

    Raises :class:`ParametrizationError` if the kinetic-order graph is not
    weakly reversible. A nonzero effective deficiency only clears the
    ``exact_cover`` flag (the parametrized states are still equilibria).
    """
    if not kinetic_weakly_reversible(g):
        raise ParametrizationError("kinetic-order network is not weakly reversible")
    summary = gcrn_summary(g)
    if forest is None:
        forest = spanning_forest(g)
    M = kinetic_difference_matrix(g, forest)
    H = M.generalized_inverse()  # m x |F|
    B = M.kernel_basis()  # m x (m - rank)
    C = M.cokernel_basis()  # |F| x deficiency
    K = tree_constants(g)

    kappa = [(K[e.head], K[e.tail]) for e in forest.edges]

    rate_syms = tuple(
        dict.fromkeys(e.rate_symbol for e in g.edges if not e.phantom)
    )
    used = set(rate_syms) | set(g.sigma_symbols)
    tau_gen = _fresh_symbols("τ", used)
    tau_symbols = tuple(next(tau_gen) for _ in range(B.cols))

    per_species: dict[str, SymbolicPowerProduct] = {}
    for j, name in enumerate(g.species):
        raw = [PowerFactor(num, den, H.data[j][e]) for e, (num, den) in enumerate(kappa)]
        per_species[name] = SymbolicPowerProduct(
            factors=_normalized_factors(raw),
            tau_exponents=tuple(B.data[j]) if B.cols else (),
        )

    conditions: list[SideCondition] = []
    designated_taken: set[str] = set()
    for t in range(C.cols):
        col = _primitive_int_column(C.column(t))
        num = Polynomial.constant(1)
        den = Polynomial.constant(1)
        for e, c in enumerate(col):
            kh, kt = kappa[e]
            if c > 0:
                num = num * kh**c
                den = den * kt**c
            elif c < 0:
                num = num * kt ** (-c)
                den = den * kh ** (-c)
        poly = num - den
        shown = " * ".join(
            f"κ[{forest.edges[e].rate_symbol}]^{c}" for e, c in enumerate(col) if c != 0
        )
        symbols_in = poly.symbols()
        designated = ""
        for s in g.sigma_symbols:
            if s in symbols_in and s not in designated_taken:
                designated = s
                break
        if not designated:
            for s in rate_syms:
                if s in symbols_in and s not in designated_taken:
                    designated = s
                    break
        if designated:
            designated_taken.add(designated)
        conditions.append(SideCondition(tuple(col), poly, f"{shown} = 1", designated))

    return EquilibriumParametrization(
        species=g.species,
        per_species=per_species,
        tau_symbols=tau_symbols,
        sigma_symbols=g.sigma_symbols,
        side_conditions=tuple(conditions),
        kinetic_deficiency=summary.kinetic_deficiency,
        effective_deficiency=summary.effective_deficiency,
        exact_cover=summary.effective_deficiency == 0,
        rate_symbols=rate_syms,
    )


def express_in_species(p: EquilibriumParametrization, g: Gcrn) -> EquilibriumParametrization:
    """Rewrite the tau parameters as selected species concentrations.

    Chooses the lexicographically-first (by species index) set of species
    whose tau-exponent rows form an invertible matrix, inverts it exactly,
    and substitutes. With no tau parameters this is the identity. If no
    invertible selection exists the input is returned with
    ``substitution_failed`` set.
    """
    t = len(p.tau_symbols)
    if t == 0 or p.substituted_species is not None:
        return p

    rows = {name: list(p.per_species[name].tau_exponents) for name in p.species}
    chosen: list[str] = []
    current: list[list[Fraction]] = []
    for name in p.species:
        if len(chosen) == t:
            break
        trial = current + [rows[name]]
        if RationalMatrix(trial).rank() == len(trial):
            chosen.append(name)
            current = trial
    if len(chosen) != t:
        return replace(p, substitution_failed=True)

    W = RationalMatrix(current).inverse()  # t x t ; log tau = W (log x_sel - log kappa-part_sel)

    kappa_parts = {name: p.per_species[name].factors for name in p.species}
    per_species: dict[str, SymbolicPowerProduct] = {}
    for name in p.species:
        if name in chosen:
            per_species[name] = SymbolicPowerProduct(
                factors=(PowerFactor(Polynomial.symbol(name), Polynomial.constant(1), Fraction(1)),),
                tau_exponents=(),
            )
            continue
        coeffs = RationalMatrix([rows[name]]) @ W  # 1 x t, exponents over chosen species
        raw = list(kappa_parts[name])
        for c_idx, cname in enumerate(chosen):
            e = coeffs.data[0][c_idx]
            if e == 0:
                continue
            raw.append(PowerFactor(Polynomial.symbol(cname), Polynomial.constant(1), e))
            for f in kappa_parts[cname]:
                raw.append(PowerFactor(f.numerator, f.denominator, -e * f.exponent))
        per_species[name] = SymbolicPowerProduct(factors=_normalized_factors(raw), tau_exponents=())

    return replace(
        p,
        per_species=per_species,
        substituted_species=tuple(chosen),
    )
