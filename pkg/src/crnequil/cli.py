"""Command-line pipeline: decompose, translate per block, merge, parametrize, verify.

Exit codes: 0 verified success, 1 input error, 2 no valid translation,
3 verification failure. One JSON document collects every stage's output;
with a fixed seed the report is byte-identical across runs apart from the
timing section.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import analysis, decompose, efm, network, parametrize, translate

STAGES = ("parse", "decompose", "efm", "translate", "parametrize", "verify", "acr", "all")


@dataclass
class PipelineConfig:
    input_path: str
    output_path: str | None = None
    seed: int = 42
    tolerance: float = 1e-9
    max_blp_nodes: int = 10**6
    samples: int = 100
    stage: str = "all"

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_blp_nodes <= 0:
            raise ValueError("search budget must be positive")
        if self.stage not in STAGES:
            raise ValueError(f"unknown stage {self.stage!r}")


def _wants(cfg: PipelineConfig, stage: str) -> bool:
    return cfg.stage == "all" or _STAGE_ORDER[stage] <= _STAGE_ORDER[cfg.stage]


def _network_json(net: network.ReactionNetwork) -> dict:
    return {
        "species": list(net.species),
        "reactions": [
            {
                "label": rx.label,
                "source": net.complex_str(net.complexes[rx.source]),
                "product": net.complex_str(net.complexes[rx.product]),
                "rate": rx.rate_symbol,
                "phantom": rx.phantom,
            }
            for rx in net.reactions
        ],
        "text": network.serialize_network(net),
    }


def _summary_json(s: network.StructuralSummary) -> dict:
    return {
        "reactions": s.r,
        "species": s.m,
        "complexes": s.n,
        "rank": s.s,
        "linkage_classes": s.l,
        "strong_linkage_classes": s.sl,
        "deficiency": s.delta,
        "weakly_reversible": s.weakly_reversible,
    }


def _poly_json(p) -> dict:
    return {
        "op": "poly",
        "text": str(p),
        "terms": [
            {"coeff": str(c), "monomial": {sym: e for sym, e in mono}}
            for mono, c in sorted(p.terms.items())
        ],
    }


def _expression_json(expr: parametrize.SymbolicPowerProduct, tau_symbols: tuple[str, ...]) -> dict:
    args = []
    for f in expr.factors:
        if f.exponent == 0:
            continue
        args.append(
            {
                "op": "pow",
                "exponent": str(f.exponent),
                "base": {
                    "op": "div",
                    "numerator": _poly_json(f.numerator),
                    "denominator": _poly_json(f.denominator),
                },
            }
        )
    for sym, exp in zip(tau_symbols, expr.tau_exponents):
        if exp != 0:
            args.append({"op": "pow", "exponent": str(exp), "base": {"op": "symbol", "name": sym}})
    return {"op": "mul", "args": args, "text": str(expr)}


def _param_json(p: parametrize.EquilibriumParametrization) -> dict:
    tau = p.tau_symbols if p.substituted_species is None else ()
    return {
        "free_parameters": list(p.free_parameters),
        "degrees_of_freedom": p.degrees_of_freedom,
        "kinetic_deficiency": p.kinetic_deficiency,
        "effective_deficiency": p.effective_deficiency,
        "exact_cover": p.exact_cover,
        "side_conditions": [
            {"display": c.display, "polynomial": str(c.polynomial), "solved_for": c.designated}
            for c in p.side_conditions
        ],
        "per_species": {name: _expression_json(p.per_species[name], tau) for name in p.species},
    }


def _error(report: dict, stage: str, message: str, code: int) -> tuple[int, dict]:
    report["error"] = {"stage": stage, "message": message}
    return code, report


def run_pipeline(cfg: PipelineConfig) -> tuple[int, dict]:
    """Run the pipeline through ``cfg.stage`` and return (exit code, report)."""
    report: dict = {
        "schema_version": 1,
        "input": cfg.input_path,
        "stage": cfg.stage,
        "seed": cfg.seed,
        "tolerance": cfg.tolerance,
        "samples": cfg.samples,
    }
    timer = analysis.StageTimer()

    try:
        with open(cfg.input_path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        return _error(report, "parse", f"cannot read input: {exc}", 1)
    try:
        net = timer.run("parse", lambda: network.parse_network(text))
    except network.NetworkSyntaxError as exc:
        return _error(report, "parse", str(exc), 1)

    report["network"] = _network_json(net)
    summary = network.structural_summary(net)
    report["summary"] = _summary_json(summary)
    cons = network.conservation_laws(net)
    report["summary"]["conservation_laws"] = [
        " + ".join(
            f"{c}*{name}" if c != 1 else name
            for name, c in zip(net.species, cons.column(j))
            if c != 0
        )
        for j in range(cons.cols)
    ]
    if cfg.stage == "parse":
        report["timing"] = timer.report().as_dict()
        return 0, report

    dec = timer.run("decompose", lambda: decompose.finest_independent_decomposition(net))
    report["decomposition"] = {
        "blocks": dec.block_labels(net),
        "block_ranks": list(dec.block_ranks),
        "total_rank": dec.total_rank,
        "independent": dec.independent,
    }
    if cfg.stage == "decompose":
        report["timing"] = timer.report().as_dict()
        return 0, report

    blocks_json: list[dict] = []
    block_data = []
    for block in dec.blocks:
        sub = net.subnetwork(list(block))
        sub_summary = network.structural_summary(sub)
        needs = not (sub_summary.weakly_reversible and sub_summary.delta == 0)
        modes = timer.run("efm", lambda s=sub: efm.compute_efms(network.stoichiometric_matrix(s)))
        entry = {
            "reactions": [net.reactions[i].label for i in block],
            "weakly_reversible": sub_summary.weakly_reversible,
            "deficiency": sub_summary.delta,
            "needs_translation": needs,
            "efms": {
                "modes": [[sub.reactions[i].label for i in sorted(ray.support)] for ray in modes.modes],
                "unitary": modes.unitary,
                "covers": modes.covers,
            },
        }
        blocks_json.append(entry)
        block_data.append((block, sub, needs, modes, entry))
    report["translation"] = {"blocks": blocks_json}
    if cfg.stage == "efm":
        report["timing"] = timer.report().as_dict()
        return 0, report

    m = len(net.species)
    alpha_full: list[tuple[int, ...]] = [(0,) * m] * len(net.reactions)
    for block, sub, needs, modes, entry in block_data:
        if not needs:
            entry["graph_edges"] = []
            entry["alpha"] = {net.reactions[i].label: "0" for i in block}
            continue
        try:
            graph = timer.run(
                "translate", lambda s=sub, mo=modes: translate.build_reaction_graph(s, mo, cfg.max_blp_nodes)
            )
            alpha_local = translate.translation_complexes(sub, graph)
        except translate.TranslationError as exc:
            return _error(report, "translate", str(exc), 2)
        block_gcrn = translate.build_gcrn(sub, alpha_local)
        block_stoich = network.structural_summary(block_gcrn.stoich_network())
        if not (block_stoich.weakly_reversible and block_stoich.delta == 0):
            return _error(
                report,
                "translate",
                f"translated block {entry['reactions']} is not weakly reversible deficiency zero",
                2,
            )
        entry["graph_edges"] = graph.labelled_edges(sub)
        entry["alpha"] = {
            sub.reactions[k].label: network.format_complex(alpha_local[k], net.species)
            for k in range(len(sub.reactions))
        }
        for k, i in enumerate(sorted(block)):
            alpha_full[i] = alpha_local[k]

    gcrn = timer.run("merge", lambda: translate.build_gcrn(net, alpha_full))
    gsum = translate.gcrn_summary(gcrn)
    report["translation"].update(
        {
            "alpha": {
                net.reactions[k].label: network.format_complex(alpha_full[k], net.species)
                for k in range(len(net.reactions))
            },
            "stoichiometric_crn": network.serialize_network(gcrn.stoich_network()),
            "kinetic_crn": gcrn.kinetic_text(),
            "phantom_edges": [
                {"symbol": e.rate_symbol, "tail": e.tail, "head": e.head} for e in gcrn.phantom_edges
            ],
            "effective_deficiency": gsum.effective_deficiency,
            "kinetic_deficiency": gsum.kinetic_deficiency,
            "stoich_weakly_reversible": gsum.stoich_weakly_reversible,
            "kinetic_weakly_reversible": gsum.kinetic_weakly_reversible,
        }
    )
    if cfg.stage == "translate":
        report["timing"] = timer.report().as_dict()
        return 0, report

    try:
        param = timer.run("parametrize", lambda: parametrize.parametrize_equilibria(gcrn))
    except parametrize.ParametrizationError as exc:
        return _error(report, "parametrize", str(exc), 2)
    report["parametrization"] = _param_json(param)
    substituted = parametrize.express_in_species(param, gcrn)
    report["parametrization"]["in_species"] = _param_json(substituted)
    if cfg.stage == "parametrize":
        report["timing"] = timer.report().as_dict()
        return 0, report

    verification = timer.run(
        "verify", lambda: analysis.verify_equilibrium(net, param, cfg.samples, cfg.tolerance, cfg.seed)
    )
    report["verification"] = {
        "seed": verification.seed,
        "samples": verification.samples,
        "evaluated": verification.evaluated,
        "skipped": verification.skipped,
        "tolerance": verification.tolerance,
        "max_residual": verification.max_residual,
        "passed": verification.passed,
        "residuals": list(verification.per_sample_residuals),
    }
    if not verification.passed:
        code, report = _error(report, "verify", "equilibrium residuals exceed tolerance", 3)
        report["timing"] = timer.report().as_dict()
        return code, report
    if cfg.stage == "verify":
        report["timing"] = timer.report().as_dict()
        return 0, report

    acr_json = {}
    for name in net.species:
        acr = timer.run("acr", lambda n=name: analysis.detect_acr(param, n, net, seed=cfg.seed))
        acr_json[name] = {
            "is_acr": acr.is_acr,
            "symbolic": acr.symbolic_verdict,
            "numeric": acr.numeric_verdict,
            "numeric_spread": acr.numeric_spread,
            "witness": acr.witness,
        }
    report["acr"] = acr_json
    report["timing"] = timer.report().as_dict()
    return 0, report


def emit(report: dict, output_path: str | None) -> None:
    text = json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    if output_path:
        with open(output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="crnequil",
        description="Parametrize positive equilibria of a mass-action reaction network.",
    )
    parser.add_argument("--input", required=True, help="network file (see package docs for the grammar)")
    parser.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--tol", type=float, default=1e-9, help="verification tolerance")
    parser.add_argument("--stage", choices=STAGES, default="all", help="run the pipeline through this stage")
    parser.add_argument("--blp-budget", type=int, default=10**6, help="search node budget for the graph search")
    parser.add_argument("--samples", type=int, default=100, help="verification sample count")
    args = parser.parse_args(argv)

    try:
        cfg = PipelineConfig(
            input_path=args.input,
            output_path=args.out,
            seed=args.seed,
            tolerance=args.tol,
            max_blp_nodes=args.blp_budget,
            samples=args.samples,
            stage=args.stage,
        )
    except ValueError as exc:
        parser.error(str(exc))
        return 1

    code, report = run_pipeline(cfg)
    emit(report, cfg.output_path)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
