import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from crnequil import (
    build_gcrn,
    build_reaction_graph,
    compute_efms,
    finest_independent_decomposition,
    parametrize_equilibria,
    parse_network,
    stoichiometric_matrix,
    structural_summary,
    translation_complexes,
)
from crnequil.models import load_text

_CACHE: dict[str, object] = {}


def model(name: str):
    key = f"net:{name}"
    if key not in _CACHE:
        _CACHE[key] = parse_network(load_text(name))
    return _CACHE[key]


def translated(name: str):
    """(network, decomposition, per-block data, merged gcrn) for a bundled model.

    Runs the same decompose -> translate-per-block -> merge path as the CLI.
    """
    key = f"gcrn:{name}"
    if key not in _CACHE:
        net = model(name)
        dec = finest_independent_decomposition(net)
        m = len(net.species)
        alpha_full = [(0,) * m] * len(net.reactions)
        blocks = []
        for block in dec.blocks:
            sub = net.subnetwork(list(block))
            summary = structural_summary(sub)
            needs = not (summary.weakly_reversible and summary.delta == 0)
            modes = compute_efms(stoichiometric_matrix(sub))
            graph = None
            alpha_local = None
            if needs:
                graph = build_reaction_graph(sub, modes)
                alpha_local = translation_complexes(sub, graph)
                for k, i in enumerate(sorted(block)):
                    alpha_full[i] = alpha_local[k]
            blocks.append({"block": block, "sub": sub, "needs": needs, "modes": modes, "graph": graph, "alpha": alpha_local})
        gcrn = build_gcrn(net, alpha_full)
        _CACHE[key] = (net, dec, blocks, gcrn)
    return _CACHE[key]


def parametrized(name: str):
    key = f"param:{name}"
    if key not in _CACHE:
        _, _, _, gcrn = translated(name)
        _CACHE[key] = parametrize_equilibria(gcrn)
    return _CACHE[key]


@pytest.fixture
def toy():
    return model("toy")


@pytest.fixture
def histidine():
    return model("histidine_kinase")


@pytest.fixture
def two_protein():
    return model("two_protein")


@pytest.fixture
def envz():
    return model("envz_ompr")
