"""Numeric verification of parametrized equilibria and robustness checks.

Sampling is seeded and log-uniform over [1e-2, 1e2] so failures reproduce.
Side conditions (positive kinetic deficiency) are resolved per sample by
solving each condition's polynomial for its designated symbol; a sample
with no admissible root is skipped and counted. Residuals are measured
relative to the largest mass-action flux at the sample point, since rate
constants span four decades.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .network import ReactionNetwork, mass_action_fluxes, ode_rhs
from .parametrize import EquilibriumParametrization
from .poly import Polynomial


@dataclass(frozen=True)
class VerificationReport:
    samples: int
    evaluated: int
    skipped: int
    max_residual: float
    per_sample_residuals: tuple[float, ...]
    tolerance: float
    seed: int

    @property
    def passed(self) -> bool:
        return self.evaluated > 0 and self.max_residual <= self.tolerance


@dataclass(frozen=True)
class AcrReport:
    species: str
    is_acr: bool
    symbolic_verdict: bool
    numeric_verdict: bool
    numeric_spread: float
    witness: str | None
    seed: int


def _univariate_float_coeffs(poly: Polynomial, symbol: str, values: dict[str, float]) -> list[float]:
    coeffs: dict[int, float] = {}
    for mono, c in poly.terms.items():
        deg = 0
        val = float(c)
        for sym, exp in mono:
            if sym == symbol:
                deg = exp
            else:
                val *= values[sym] ** exp
        coeffs[deg] = coeffs.get(deg, 0.0) + val
    top = max(coeffs) if coeffs else 0
    return [coeffs.get(d, 0.0) for d in range(top + 1)]


def _solve_univariate_positive(coeffs: list[float]) -> float | None:
    """Smallest positive real root of sum_d coeffs[d] x^d, Newton-polished."""
    arr = np.array(coeffs, dtype=float)
    if not np.any(arr[1:]):
        return None
    roots = np.roots(arr[::-1])
    real = [float(r.real) for r in roots if abs(r.imag) <= 1e-9 * max(1.0, abs(r.real)) and r.real > 0]
    if not real:
        return None
    x = min(real)
    deriv = np.polynomial.polynomial.polyder(arr)
    for _ in range(8):
        f = float(np.polynomial.polynomial.polyval(x, arr))
        fp = float(np.polynomial.polynomial.polyval(x, deriv))
        if fp == 0.0:
            break
        step = f / fp
        if not np.isfinite(step):
            break
        x -= step
        if x <= 0:
            return None
    return x


def resolve_side_conditions(param: EquilibriumParametrization, values: dict[str, float]) -> dict[str, float] | None:
    """Solve each side condition for its designated symbol, in order.

    Conditions are swept repeatedly so a triangular dependence among them
    resolves regardless of order; returns None when some condition cannot
    be satisfied with a positive value.
    """
    if not param.side_conditions:
        return {}
    solved: dict[str, float] = {}
    pending = list(param.side_conditions)
    for _ in range(len(pending) + 1):
        progressed = False
        remaining = []
        for cond in pending:
            if cond.polynomial.is_zero():
                progressed = True
                continue
            known = dict(values)
            known.update(solved)
            missing = [s for s in cond.polynomial.symbols() if s not in known and s != cond.designated]
            if missing or not cond.designated:
                remaining.append(cond)
                continue
            coeffs = _univariate_float_coeffs(cond.polynomial, cond.designated, known)
            root = _solve_univariate_positive(coeffs)
            if root is None:
                return None
            solved[cond.designated] = root
            progressed = True
        pending = remaining
        if not pending:
            return solved
        if not progressed:
            return None
    return solved if not pending else None


def _log_uniform(rng: np.random.Generator) -> float:
    return float(10.0 ** rng.uniform(-2.0, 2.0))


def _draw_values(
    param: EquilibriumParametrization, net: ReactionNetwork, rng: np.random.Generator
) -> dict[str, float] | None:
    values: dict[str, float] = {}
    for rx in net.reactions:
        if not rx.phantom and rx.rate_symbol not in values:
            values[rx.rate_symbol] = _log_uniform(rng)
    for sym in param.unpinned_free_parameters:
        values[sym] = _log_uniform(rng)
    pinned = resolve_side_conditions(param, values)
    if pinned is None:
        return None
    values.update(pinned)
    return values


def relative_residual(net: ReactionNetwork, rates: dict[str, float], conc: list[float]) -> float:
    rhs = ode_rhs(net, rates, conc)
    fluxes = mass_action_fluxes(net, rates, conc)
    scale = max((abs(f) for f in fluxes), default=0.0)
    if scale == 0.0:
        return max((abs(x) for x in rhs), default=0.0)
    return max((abs(x) for x in rhs), default=0.0) / scale


def verify_equilibrium(
    net: ReactionNetwork,
    param: EquilibriumParametrization,
    samples: int = 100,
    tol: float = 1e-9,
    seed: int = 42,
) -> VerificationReport:
    """Evaluate the parametrization at random positive samples and measure
    how far the original network's time derivatives are from zero."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    rng = np.random.default_rng(seed)
    residuals: list[float] = []
    skipped = 0
    for _ in range(samples):
        values = _draw_values(param, net, rng)
        if values is None:
            skipped += 1
            continue
        conc_map = param.evaluate(values)
        conc = [conc_map[name] for name in net.species]
        if any(not np.isfinite(x) or x <= 0 for x in conc):
            skipped += 1
            continue
        residuals.append(relative_residual(net, values, conc))
    return VerificationReport(
        samples=samples,
        evaluated=len(residuals),
        skipped=skipped,
        max_residual=max(residuals) if residuals else float("inf"),
        per_sample_residuals=tuple(residuals),
        tolerance=tol,
        seed=seed,
    )


def detect_acr(
    param: EquilibriumParametrization,
    species: str,
    net: ReactionNetwork | None = None,
    draws: int = 50,
    seed: int = 42,
    spread_tol: float = 1e-9,
) -> AcrReport:
    """Absolute concentration robustness test for one species.

    Symbolic verdict: the expression involves no unpinned free parameter
    (symbols fixed by side conditions are functions of the rate constants,
    so they do not break robustness). Numeric cross-check: at fixed random
    rates, the evaluated concentration over ``draws`` random free-parameter
    draws must have relative spread within ``spread_tol``.
    """
    if species not in param.per_species:
        raise KeyError(f"unknown species {species!r}")
    unpinned = set(param.unpinned_free_parameters)
    symbolic = not (param.expression_symbols(species) & unpinned)

    rng = np.random.default_rng(seed)
    rates: dict[str, float] = {}
    if net is not None:
        for rx in net.reactions:
            if not rx.phantom and rx.rate_symbol not in rates:
                rates[rx.rate_symbol] = _log_uniform(rng)
    else:
        for sym in param.rate_symbols:
            rates[sym] = _log_uniform(rng)

    seen: list[float] = []
    for _ in range(draws):
        values = dict(rates)
        for sym in param.unpinned_free_parameters:
            values[sym] = _log_uniform(rng)
        pinned = resolve_side_conditions(param, values)
        if pinned is None:
            continue
        values.update(pinned)
        seen.append(param.evaluate(values)[species])
    if seen:
        hi, lo = max(seen), min(seen)
        spread = (hi - lo) / max(abs(hi), 1e-300)
    else:
        spread = float("inf")
    numeric = bool(seen) and spread <= spread_tol
    is_acr = symbolic and numeric
    return AcrReport(
        species=species,
        is_acr=is_acr,
        symbolic_verdict=symbolic,
        numeric_verdict=numeric,
        numeric_spread=spread,
        witness=str(param.per_species[species]) if is_acr else None,
        seed=seed,
    )


@dataclass(frozen=True)
class TimingReport:
    stages: tuple[tuple[str, float], ...]

    @property
    def total(self) -> float:
        return sum(t for _, t in self.stages)

    def as_dict(self) -> dict:
        return {"stages": [{"stage": n, "seconds": t} for n, t in self.stages], "total": self.total}

    def table(self) -> str:
        if not self.stages:
            return "(no stages)"
        width = max(len(n) for n, _ in self.stages)
        lines = [f"{n:<{width}}  {t:10.4f} s" for n, t in self.stages]
        lines.append(f"{'total':<{width}}  {self.total:10.4f} s")
        return "\n".join(lines)


def timing_report(stages: list[tuple[str, float]]) -> TimingReport:
    return TimingReport(tuple(stages))


class StageTimer:
    """Wall-clock accumulator for pipeline stages."""

    def __init__(self):
        self.stages: list[tuple[str, float]] = []

    def run(self, name: str, fn):
        t0 = time.perf_counter()
        out = fn()
        self.stages.append((name, time.perf_counter() - t0))
        return out

    def report(self) -> TimingReport:
        return timing_report(self.stages)
