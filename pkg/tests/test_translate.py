import random

import pytest

from crnequil import (
    build_gcrn,
    build_reaction_graph,
    compatibility_check,
    compute_efms,
    gcrn_summary,
    parse_network,
    serialize_network,
    stoichiometric_matrix,
    structural_summary,
    translation_complexes,
)
from crnequil.network import ode_rhs
from crnequil.translate import ReactionGraph, TranslationError, identity_gcrn


def graph_for(net):
    modes = compute_efms(stoichiometric_matrix(net))
    return build_reaction_graph(net, modes), modes


class TestReactionGraph:
    def test_histidine_matches_published_graph(self, histidine):
        graph, _ = graph_for(histidine)
        # R2->R1, R4->R2, R1->R4, R2->R3, R3->R2 (0-based)
        assert set(graph.edges) == {(1, 0), (3, 1), (0, 3), (1, 2), (2, 1)}

    def test_toy_matches_published_graph(self, toy):
        graph, _ = graph_for(toy)
        # 3-cycle R1->R5->R4->R1 plus the 2-cycle {R2, R3}
        assert set(graph.edges) == {(0, 4), (4, 3), (3, 0), (1, 2), (2, 1)}

    def test_reversible_pair(self):
        net = parse_network("R1,R2: A <-> B ; k1,k2")
        graph, _ = graph_for(net)
        assert set(graph.edges) == {(0, 1), (1, 0)}

    def test_requires_unitary_covering_modes(self):
        net = parse_network("R1: A -> B ; k1")
        modes = compute_efms(stoichiometric_matrix(net))
        assert not modes.covers
        with pytest.raises(TranslationError, match="unitary"):
            build_reaction_graph(net, modes)

    def test_budget_exhaustion(self, histidine):
        modes = compute_efms(stoichiometric_matrix(histidine))
        with pytest.raises(TranslationError, match="budget"):
            build_reaction_graph(histidine, modes, budget=1)

    def test_determinism(self, envz):
        dec_block = envz.subnetwork(list(range(2, 14)))
        modes = compute_efms(stoichiometric_matrix(dec_block))
        g1 = build_reaction_graph(dec_block, modes)
        g2 = build_reaction_graph(dec_block, modes)
        assert g1.edges == g2.edges

    def test_no_self_loops_allowed(self):
        with pytest.raises(ValueError):
            ReactionGraph(2, ((0, 0),))


class TestCompatibility:
    def test_toy_printed_graph_cs_em_ok_ps_fails(self, toy):
        graph, modes = graph_for(toy)
        report = compatibility_check(toy, graph, modes)
        assert report.cs_ok
        assert report.em_ok
        assert not report.ps_ok
        assert (0, 4) in report.ps_edge_mismatches  # R1 -> R5: product C+B, source 0

    def test_histidine_graph_cs_em_ok(self, histidine):
        graph, modes = graph_for(histidine)
        report = compatibility_check(histidine, graph, modes)
        assert report.cs_ok and report.em_ok

    def test_translated_network_is_ps_compatible(self, histidine):
        graph, _ = graph_for(histidine)
        alpha = translation_complexes(histidine, graph)
        g = build_gcrn(histidine, alpha)
        translated = g.stoich_network()
        modes = compute_efms(stoichiometric_matrix(translated))
        report = compatibility_check(translated, graph, modes)
        assert report.ps_ok

    def test_empty_graph_reports_em_violation(self):
        net = parse_network("R1,R2: A <-> B ; k1,k2")
        modes = compute_efms(stoichiometric_matrix(net))
        report = compatibility_check(net, ReactionGraph(2, ()), modes)
        assert not report.em_ok
        assert (0, 1) in report.em_missing


class TestTranslationComplexes:
    def test_histidine_published_alpha(self, histidine):
        graph, _ = graph_for(histidine)
        alpha = translation_complexes(histidine, graph)
        # (Y_p, 0, 0, X_p) in species order (X, X_p, Y, Y_p)
        assert alpha == [(0, 0, 0, 1), (0, 0, 0, 0), (0, 0, 0, 0), (0, 1, 0, 0)]

    def test_alternative_alpha_is_also_valid(self, histidine):
        # A different graph orientation yields (Y, 0, 0, X); it is an equally
        # valid weakly reversible deficiency-zero translation.
        alt = [(0, 0, 1, 0), (0, 0, 0, 0), (0, 0, 0, 0), (1, 0, 0, 0)]
        summary = structural_summary(build_gcrn(histidine, alt).stoich_network())
        assert summary.weakly_reversible and summary.delta == 0

    def test_toy_published_alpha(self, toy):
        graph, _ = graph_for(toy)
        alpha = translation_complexes(toy, graph)
        assert alpha == [(0, 0, 0), (0, 0, 0), (0, 0, 0), (1, 1, 0), (0, 1, 1)]

    def test_two_cycle_alpha_zero(self):
        net = parse_network("R1,R2: A <-> B ; k1,k2")
        graph, _ = graph_for(net)
        assert translation_complexes(net, graph) == [(0, 0), (0, 0)]

    def test_edge_residuals_hold_exactly(self, toy, histidine):
        for net in (toy, histidine):
            graph, _ = graph_for(net)
            alpha = translation_complexes(net, graph)
            for i, j in graph.edges:
                ri, rj = net.reactions[i], net.reactions[j]
                lhs = tuple(alpha[i][c] - alpha[j][c] for c in range(len(net.species)))
                rhs = tuple(
                    net.complexes[rj.source][c] - net.complexes[ri.product][c] for c in range(len(net.species))
                )
                assert lhs == rhs

    def test_inconsistent_graph_rejected(self, toy):
        # R1 -> R2 demands alpha_1 - alpha_2 = A - (C+B); combined with the
        # 2-cycle on {R2, R3} it forces an inconsistency.
        bad = ReactionGraph(5, ((0, 1), (1, 0), (1, 2), (2, 1)))
        with pytest.raises(TranslationError, match="no valid translation"):
            translation_complexes(toy, bad)


class TestGcrn:
    def test_histidine_translated_network(self, histidine):
        graph, _ = graph_for(histidine)
        alpha = translation_complexes(histidine, graph)
        g = build_gcrn(histidine, alpha)
        text = serialize_network(g.stoich_network())
        assert "R1: X + Y_p -> X_p + Y_p ; k1" in text
        assert "R2: X_p + Y -> X + Y_p ; k2" in text
        assert "R3: X + Y_p -> X_p + Y ; k3" in text
        assert "R4: X_p + Y_p -> X_p + Y ; k4" in text
        summary = gcrn_summary(g)
        assert summary.effective_deficiency == 0
        assert summary.kinetic_deficiency == 0
        assert summary.both_weakly_reversible
        assert len(g.sigma_symbols) == 1  # two kinetic complexes share one node

    def test_toy_gcrn_kinetics_preserve_dynamics(self, toy):
        graph, _ = graph_for(toy)
        alpha = translation_complexes(toy, graph)
        g = build_gcrn(toy, alpha)
        kinetic = {v.stoich: v.kinetic for v in g.vertices}
        # 3-cycle vertices keep the original source complexes as kinetics:
        # A+B stays A+B, B+C gets the zero complex, A+B+C gets C.
        assert kinetic[(1, 1, 0)] == (1, 1, 0)
        assert kinetic[(0, 1, 1)] == (0, 0, 0)
        assert kinetic[(1, 1, 1)] == (0, 0, 1)
        summary = gcrn_summary(g)
        assert summary.effective_deficiency == 0
        assert summary.kinetic_deficiency == 0
        assert g.sigma_symbols == ()

    def test_phantom_edges_have_zero_stoichiometric_vector(self, histidine):
        from conftest import translated

        gcrns = []
        graph, _ = graph_for(histidine)
        gcrns.append(build_gcrn(histidine, translation_complexes(histidine, graph)))
        gcrns.append(translated("envz_ompr")[3])
        for g in gcrns:
            assert g.phantom_edges  # both networks need a vertex split
            for e in g.phantom_edges:
                assert g.vertices[e.tail].stoich == g.vertices[e.head].stoich

    def test_identity_gcrn_on_wr_dz_network(self):
        net = parse_network("R1,R2: A <-> B ; k1,k2")
        g = identity_gcrn(net)
        assert g.sigma_symbols == ()
        summary = gcrn_summary(g)
        assert summary.effective_deficiency == 0
        assert summary.kinetic_deficiency == 0
        assert serialize_network(g.stoich_network()) == serialize_network(net)

    def test_untranslated_histidine_as_gcrn_has_deficiency_one(self, histidine):
        summary = gcrn_summary(identity_gcrn(histidine))
        assert summary.effective_deficiency == 1

    def test_dynamics_preserved_on_random_samples(self, toy, histidine):
        rng = random.Random(23)
        for net in (toy, histidine):
            graph, _ = graph_for(net)
            alpha = translation_complexes(net, graph)
            g = build_gcrn(net, alpha)
            for _ in range(50):
                rates = {rx.rate_symbol: 10 ** rng.uniform(-2, 2) for rx in net.reactions}
                conc = [10 ** rng.uniform(-2, 2) for _ in net.species]
                a = ode_rhs(net, rates, conc)
                b = g.ode_rhs(rates, conc)
                scale = max(max(abs(x) for x in a), 1e-300)
                assert all(abs(x - y) <= 1e-12 * scale for x, y in zip(a, b))

    def test_alpha_validation(self, histidine):
        with pytest.raises(ValueError):
            build_gcrn(histidine, [(0, 0, 0, -1)] * 4)
        with pytest.raises(ValueError):
            build_gcrn(histidine, [(0, 0, 0, 0)] * 3)
