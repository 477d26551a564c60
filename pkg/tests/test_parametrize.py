import math
import random
from fractions import Fraction

import numpy as np
import pytest

from crnequil import (
    express_in_species,
    kinetic_difference_matrix,
    parametrize_equilibria,
    parse_network,
    spanning_forest,
    tree_constants,
)
from crnequil.analysis import relative_residual, resolve_side_conditions
from crnequil.parametrize import ParametrizationError
from crnequil.poly import Polynomial
from crnequil.translate import identity_gcrn, kinetic_components

from conftest import parametrized, translated
from oracles import brute_tree_constant


def draw_values(param, rng):
    values = {sym: 10 ** rng.uniform(-2, 2) for sym in param.rate_symbols}
    for sym in param.unpinned_free_parameters:
        values[sym] = 10 ** rng.uniform(-2, 2)
    pinned = resolve_side_conditions(param, values)
    assert pinned is not None
    values.update(pinned)
    return values


class TestSpanningForest:
    def test_toy_forest_size(self):
        _, _, _, g = translated("toy")
        assert len(spanning_forest(g)) == len(g.vertices) - len(kinetic_components(g))
        assert len(spanning_forest(g)) == 3  # 5 vertices, 2 components

    def test_two_cycle_single_edge(self):
        g = identity_gcrn(parse_network("R1,R2: A <-> B ; k1,k2"))
        assert len(spanning_forest(g)) == 1

    def test_merged_two_protein_forest_acyclic(self):
        _, _, _, g = translated("two_protein")
        forest = spanning_forest(g)
        assert len(forest) == len(g.vertices) - len(kinetic_components(g))
        seen = set()
        for e in forest.edges:
            seen.add((e.tail, e.head))
        assert len(seen) == len(forest.edges)


class TestKineticDifferenceMatrix:
    def test_two_cycle_row(self):
        g = identity_gcrn(parse_network("R1,R2: A <-> B ; k1,k2"))
        m = kinetic_difference_matrix(g, spanning_forest(g))
        assert m.data == [[Fraction(-1), Fraction(1)]]

    def test_toy_rows_use_kinetic_complexes(self):
        _, _, _, g = translated("toy")
        forest = spanning_forest(g)
        m = kinetic_difference_matrix(g, forest)
        for row, e in zip(m.data, forest.edges):
            head = g.vertices[e.head].kinetic
            tail = g.vertices[e.tail].kinetic
            assert [int(x) for x in row] == [h - t for h, t in zip(head, tail)]
        # the edge out of the A+B vertex runs to the zero kinetic complex
        ab_edges = [
            (i, e) for i, e in enumerate(forest.edges) if g.vertices[e.tail].kinetic == (1, 1, 0)
        ]
        assert ab_edges
        idx, _ = ab_edges[0]
        assert [int(x) for x in m.data[idx]] == [-1, -1, 0]

    def test_phantom_forest_edge_keeps_kinetic_difference(self):
        _, _, _, g = translated("envz_ompr")
        forest = spanning_forest(g)
        phantom_rows = [
            (row, e) for row, e in zip(kinetic_difference_matrix(g, forest).data, forest.edges) if e.phantom
        ]
        assert phantom_rows
        for row, e in phantom_rows:
            head = g.vertices[e.head].kinetic
            tail = g.vertices[e.tail].kinetic
            assert head != tail
            assert [int(x) for x in row] == [h - t for h, t in zip(head, tail)]


class TestTreeConstants:
    def test_two_cycle(self):
        g = identity_gcrn(parse_network("R1,R2: A <-> B ; k1,k2"))
        k = tree_constants(g)
        assert k[0] == Polynomial.symbol("k2")  # toward A: edge B -> A
        assert k[1] == Polynomial.symbol("k1")

    def test_toy_three_cycle(self):
        _, _, _, g = translated("toy")
        k = tree_constants(g)
        by_stoich = {g.vertices[i].stoich: k[i] for i in range(len(g.vertices))}
        assert by_stoich[(1, 1, 0)] == Polynomial.monomial(["k5", "k4"])
        assert by_stoich[(0, 1, 1)] == Polynomial.monomial(["k4", "k1"])
        assert by_stoich[(1, 1, 1)] == Polynomial.monomial(["k1", "k5"])

    def test_histidine_monomial_degrees(self, histidine):
        _, _, _, g = translated("histidine_kinase")
        k = tree_constants(g)
        for comp in kinetic_components(g):
            for v in comp:
                assert not k[v].is_zero()
                assert k[v].total_degrees() == {len(comp) - 1}

    def test_matches_brute_force_enumeration(self):
        for name in ("toy", "histidine_kinase", "two_protein", "envz_ompr"):
            _, _, _, g = translated(name)
            k = tree_constants(g)
            edges = [(e.tail, e.head, e.rate_symbol) for e in g.edges]
            for comp in kinetic_components(g):
                if len(comp) > 6:
                    continue
                for root in comp:
                    assert k[root] == brute_tree_constant(edges, comp, root)


class TestParametrization:
    def test_toy_closed_form(self):
        param = parametrized("toy")
        assert param.degrees_of_freedom == 0
        rng = random.Random(4)
        for _ in range(25):
            k = {f"k{i}": 10 ** rng.uniform(-2, 2) for i in range(1, 6)}
            vals = param.evaluate(k)
            assert vals["A"] == pytest.approx(math.sqrt(k["k3"] * k["k5"] / (k["k1"] * k["k2"])), rel=1e-12)
            assert vals["B"] == pytest.approx(math.sqrt(k["k2"] * k["k5"] / (k["k1"] * k["k3"])), rel=1e-12)
            assert vals["C"] == pytest.approx(k["k5"] / k["k4"], rel=1e-12)

    def test_single_reversible_pair_ratio(self):
        g = identity_gcrn(parse_network("R1,R2: A <-> B ; k1,k2"))
        param = parametrize_equilibria(g)
        assert len(param.tau_symbols) == 1
        rng = random.Random(8)
        for _ in range(10):
            values = {"k1": 10 ** rng.uniform(-2, 2), "k2": 10 ** rng.uniform(-2, 2), "τ1": 10 ** rng.uniform(-2, 2)}
            vals = param.evaluate(values)
            assert vals["B"] / vals["A"] == pytest.approx(values["k1"] / values["k2"], rel=1e-12)

    def test_matrix_identities_exact(self):
        for name in ("toy", "histidine_kinase", "two_protein", "envz_ompr"):
            _, _, _, g = translated(name)
            forest = spanning_forest(g)
            m = kinetic_difference_matrix(g, forest)
            h = m.generalized_inverse()
            b = m.kernel_basis()
            c = m.cokernel_basis()
            assert m @ h @ m == m
            if b.cols:
                assert (m @ b).is_zero()
            if c.cols:
                assert (m.transpose() @ c).is_zero()

    def test_side_condition_count_is_kinetic_deficiency(self):
        for name in ("toy", "histidine_kinase", "two_protein", "envz_ompr"):
            param = parametrized(name)
            assert len(param.side_conditions) == param.kinetic_deficiency

    def test_envz_has_one_condition_pinning_sigma(self):
        param = parametrized("envz_ompr")
        assert param.kinetic_deficiency == 1
        assert param.pinned_symbols == ("σ1",)
        assert param.degrees_of_freedom == 2

    def test_positivity(self):
        rng = random.Random(31)
        for name in ("toy", "histidine_kinase", "two_protein", "envz_ompr"):
            param = parametrized(name)
            for _ in range(10):
                values = draw_values(param, rng)
                for value in param.evaluate(values).values():
                    assert value > 0 and math.isfinite(value)

    def test_forest_choice_does_not_change_equilibria(self):
        rng = random.Random(12)
        for name in ("histidine_kinase", "envz_ompr"):
            net, _, _, g = translated(name)
            alt_forest = spanning_forest(g, reverse_scan=True)
            default_forest = spanning_forest(g)
            assert alt_forest.edges != default_forest.edges
            param = parametrize_equilibria(g, forest=alt_forest)
            for _ in range(10):
                values = draw_values(param, rng)
                conc_map = param.evaluate(values)
                conc = [conc_map[s] for s in net.species]
                assert relative_residual(net, values, conc) <= 1e-9

    def test_rejects_non_weakly_reversible(self):
        net = parse_network("R1: A -> B ; k1")
        with pytest.raises(ParametrizationError):
            parametrize_equilibria(identity_gcrn(net))

    def test_nonzero_effective_deficiency_is_flagged_not_fatal(self):
        param = parametrize_equilibria(identity_gcrn(parse_network("R1,R2: A <-> B ; k1,k2")))
        assert param.exact_cover
        # A weakly reversible deficiency-one cycle still parametrizes, but
        # the exact-cover flag is cleared and one side condition appears.
        wr_d1 = parse_network("R1: A -> B ; k1\nR2: B -> A + B ; k2\nR3: A + B -> 0 ; k3\nR4: 0 -> A ; k4")
        from crnequil import structural_summary

        s = structural_summary(wr_d1)
        assert s.weakly_reversible and s.delta == 1
        flagged = parametrize_equilibria(identity_gcrn(wr_d1))
        assert not flagged.exact_cover
        assert len(flagged.side_conditions) == 1
        assert flagged.pinned_symbols[0].startswith("k")


class TestExpressInSpecies:
    def test_toy_identity_when_no_tau(self):
        _, _, _, g = translated("toy")
        param = parametrized("toy")
        assert express_in_species(param, g) is param

    def test_envz_substitution_matches_original(self):
        net, _, _, g = translated("envz_ompr")
        param = parametrized("envz_ompr")
        sub = express_in_species(param, g)
        assert sub.substituted_species == ("XD", "X_p")  # greedy lowest species index
        assert sub.degrees_of_freedom == param.degrees_of_freedom
        rng = random.Random(9)
        for _ in range(10):
            values = draw_values(param, rng)
            original = param.evaluate(values)
            values_sub = {k: v for k, v in values.items() if k not in param.tau_symbols}
            values_sub.update({name: original[name] for name in sub.substituted_species})
            rewritten = sub.evaluate(values_sub)
            for name in net.species:
                assert rewritten[name] == pytest.approx(original[name], rel=1e-10)

    def test_chosen_species_map_to_themselves(self):
        _, _, _, g = translated("envz_ompr")
        sub = express_in_species(parametrized("envz_ompr"), g)
        values = {sym: 1.7 for sym in sub.rate_symbols}
        values.update({"σ1": 2.2, "XD": 3.5, "X_p": 0.4})
        out = sub.evaluate(values)
        assert out["XD"] == pytest.approx(3.5)
        assert out["X_p"] == pytest.approx(0.4)
