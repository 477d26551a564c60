"""Elementary flux mode enumeration via double description.

The admissible steady-state fluxes {v >= 0 : N v = 0} form a polyhedral
cone whose extreme rays are the elementary flux modes; for such kernel
cones the extreme rays are exactly the support-minimal nonnegative kernel
vectors, which is what the extremeness test below uses. The canonical
basis variant starts from the identity (the nonnegative orthant's rays)
and intersects with one equality v . row = 0 at a time.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .ratlinalg import RationalMatrix


@dataclass(frozen=True)
class Ray:
    """Nonnegative kernel ray, scaled so the first nonzero coordinate is 1."""

    coordinates: tuple[Fraction, ...]
    support: frozenset[int]

    @classmethod
    def from_coordinates(cls, coords: list[Fraction]) -> "Ray":
        support = frozenset(i for i, x in enumerate(coords) if x != 0)
        if support:
            lead = coords[min(support)]
            coords = [x / lead for x in coords]
        return cls(tuple(coords), support)

    def integer_coordinates(self) -> tuple[int, ...]:
        """Smallest nonnegative integer multiple (cleared denominators / gcd)."""
        scale = 1
        for x in self.coordinates:
            scale = scale * x.denominator // gcd(scale, x.denominator)
        ints = [int(x * scale) for x in self.coordinates]
        g = 0
        for v in ints:
            g = gcd(g, abs(v))
        if g > 1:
            ints = [v // g for v in ints]
        return tuple(ints)

    def sort_key(self) -> tuple:
        return tuple(sorted(self.support))


@dataclass(frozen=True)
class FluxModeSet:
    """Elementary flux modes plus the unitary / covering flags."""

    modes: tuple[Ray, ...]
    unitary: bool
    covers: bool

    @property
    def supports(self) -> list[frozenset[int]]:
        return [ray.support for ray in self.modes]


def _support_minimal(rays: list[Ray]) -> list[Ray]:
    # Dedupe equal supports (equal support => proportional for kernel cones),
    # then drop any ray whose support strictly contains another's.
    by_support: dict[frozenset[int], Ray] = {}
    for ray in rays:
        by_support.setdefault(ray.support, ray)
    unique = list(by_support.values())
    keep = []
    for ray in unique:
        if any(other.support < ray.support for other in unique):
            continue
        keep.append(ray)
    return keep


def compute_efms(n: RationalMatrix) -> FluxModeSet:
    """Extreme rays of ker(n) intersected with the nonnegative orthant.

    Output is deduplicated and sorted by support lexicographically; the
    result does not depend on the order candidate pairs are combined in.
    An all-zero column (phantom edge) yields the unit ray on that reaction.
    """
    r = n.cols
    rays: list[Ray] = [
        Ray.from_coordinates([Fraction(1) if i == j else Fraction(0) for i in range(r)]) for j in range(r)
    ]
    for row_idx in range(n.rows):
        row = n.data[row_idx]
        if all(x == 0 for x in row):
            continue

        def dot(ray: Ray) -> Fraction:
            return sum((row[i] * ray.coordinates[i] for i in ray.support), Fraction(0))

        dots = [(ray, dot(ray)) for ray in rays]
        plus = [(ray, d) for ray, d in dots if d > 0]
        zero = [ray for ray, d in dots if d == 0]
        minus = [(ray, d) for ray, d in dots if d < 0]
        if not plus and not minus:
            continue
        candidates: list[Ray] = []
        for rp, dp in plus:
            for rm, dm in minus:
                coords = [dp * rm.coordinates[i] - dm * rp.coordinates[i] for i in range(r)]
                candidates.append(Ray.from_coordinates(coords))
        # Rays violating the new equality in either direction are dropped;
        # extremeness = support minimality within retained + candidates.
        rays = _support_minimal(zero + candidates)

    rays.sort(key=Ray.sort_key)
    return efm_properties(FluxModeSet(tuple(rays), unitary=False, covers=False), r)


def efm_properties(modes: FluxModeSet, r: int) -> FluxModeSet:
    """Recompute the unitary and covering flags for a mode set.

    Unitary: every integer-scaled coordinate is 0 or 1. Covers: the
    componentwise sum of the modes is strictly positive, i.e. every
    reaction appears in some support (for nonnegative modes this is
    equivalent to the mode cone meeting the strictly positive orthant).
    """
    unitary = all(set(ray.integer_coordinates()) <= {0, 1} for ray in modes.modes)
    covered: set[int] = set()
    for ray in modes.modes:
        covered |= ray.support
    covers = covered == set(range(r))
    return FluxModeSet(modes.modes, unitary=unitary, covers=covers)
