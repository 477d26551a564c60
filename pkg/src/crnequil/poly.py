"""Sparse multivariate polynomials with exact rational coefficients.

Symbols are plain strings (rate constants ``k1``, phantom-edge parameters
``σ1``, species names after substitution). A monomial is a sorted tuple of
``(symbol, exponent)`` pairs with positive integer exponents; the empty
tuple is the constant monomial.
"""

from __future__ import annotations

from fractions import Fraction

Monomial = tuple[tuple[str, int], ...]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    merged: dict[str, int] = dict(a)
    for sym, exp in b:
        merged[sym] = merged.get(sym, 0) + exp
    return tuple(sorted(merged.items()))


class Polynomial:
    """Immutable polynomial; arithmetic returns new instances."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Monomial, Fraction] | None = None):
        clean = {}
        if terms:
            for mono, coeff in terms.items():
                c = Fraction(coeff)
                if c != 0:
                    clean[mono] = c
        self.terms: dict[Monomial, Fraction] = clean

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls()

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls({(): Fraction(c)})

    @classmethod
    def symbol(cls, name: str) -> "Polynomial":
        return cls({((name, 1),): Fraction(1)})

    @classmethod
    def monomial(cls, symbols: list[str], coeff=1) -> "Polynomial":
        mono: dict[str, int] = {}
        for s in symbols:
            mono[s] = mono.get(s, 0) + 1
        return cls({tuple(sorted(mono.items())): Fraction(coeff)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {(): Fraction(1)}

    def symbols(self) -> set[str]:
        out: set[str] = set()
        for mono in self.terms:
            for sym, _ in mono:
                out.add(sym)
        return out

    def total_degrees(self) -> set[int]:
        """Set of total degrees over all monomials (empty for the zero polynomial)."""
        return {sum(e for _, e in mono) for mono in self.terms}

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            terms[mono] = terms.get(mono, Fraction(0)) + coeff
        return Polynomial(terms)

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __mul__(self, other) -> "Polynomial":
        other = self._coerce(other)
        terms: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono_mul(m1, m2)
                terms[mono] = terms.get(mono, Fraction(0)) + c1 * c2
        return Polynomial(terms)

    __rmul__ = __mul__
    __radd__ = __add__

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        out = Polynomial.constant(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.canonical_key())

    def canonical_key(self) -> tuple:
        return tuple(sorted(self.terms.items()))

    @staticmethod
    def _coerce(value) -> "Polynomial":
        if isinstance(value, Polynomial):
            return value
        return Polynomial.constant(value)

    def evaluate(self, values: dict[str, float]) -> float:
        """Numeric value with every symbol bound in ``values``."""
        total = 0.0
        for mono, coeff in self.terms.items():
            term = float(coeff)
            for sym, exp in mono:
                term *= values[sym] ** exp
            total += term
        return total

    def substitute(self, values: dict[str, Fraction]) -> "Polynomial":
        """Exact partial substitution; unbound symbols stay symbolic."""
        out = Polynomial.zero()
        for mono, coeff in self.terms.items():
            c = coeff
            rest: list[tuple[str, int]] = []
            for sym, exp in mono:
                if sym in values:
                    c *= Fraction(values[sym]) ** exp
                else:
                    rest.append((sym, exp))
            out = out + Polynomial({tuple(rest): c})
        return out

    def univariate_coeffs(self, symbol: str) -> list[Fraction]:
        """Coefficients [c0, c1, ...] of a polynomial in ``symbol`` alone.

        Raises ValueError if any other symbol is still present.
        """
        coeffs: dict[int, Fraction] = {}
        for mono, coeff in self.terms.items():
            deg = 0
            for sym, exp in mono:
                if sym != symbol:
                    raise ValueError(f"polynomial still contains symbol {sym!r}")
                deg = exp
            coeffs[deg] = coeffs.get(deg, Fraction(0)) + coeff
        if not coeffs:
            return [Fraction(0)]
        top = max(coeffs)
        return [coeffs.get(d, Fraction(0)) for d in range(top + 1)]

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, coeff in sorted(self.terms.items()):
            factors = []
            if coeff != 1 or not mono:
                factors.append(str(coeff))
            for sym, exp in mono:
                factors.append(sym if exp == 1 else f"{sym}^{exp}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({self})"
