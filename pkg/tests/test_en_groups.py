import math
from fractions import Fraction

import numpy as np
import pytest

from cubic_arboreal.errors import CapabilityError, UsageError
from cubic_arboreal import en_groups as eg
from cubic_arboreal import tree_core as tc


class TestOrders:
    def test_small_values(self):
        assert eg.order("E", 1) == 6
        assert eg.order("E", 2) == 648
        assert eg.order("AUT", 2) == 1296
        assert eg.order("H", 2) == 81
        assert eg.order("AUT", 1) == 6
        assert eg.order("H", 1) == 3

    def test_recursion(self):
        for n in range(1, 11):
            assert eg.order("E", n + 1) == 3 * eg.order("E", n) ** 3

    def test_enumeration_matches_order(self):
        for kind in ("E", "H", "AUT"):
            for n in (1, 2):
                assert len(list(eg.enumerate_group(kind, n))) == eg.order(kind, n)

    def test_bad_kind(self):
        with pytest.raises(UsageError):
            eg.order("G", 2)


class TestMembership:
    def test_identity_in_everything(self):
        g = tc.identity(4)
        assert eg.is_in_E(g) and eg.is_in_H(g)

    def test_bottom_swap_outside_E(self):
        for n in (2, 3, 4):
            nu = eg.bottom_swap(n)
            assert tc.sign_leaves(nu) == -1
            assert not eg.is_in_E(nu)

    def test_conjugated_rotation_outside_E(self):
        # bottom_swap(3) conjugates ((1,1,1),(123)) to ((s,1,s),(123)), s the
        # depth-2 bottom swap; the conjugate leaves E_3
        nu3 = eg.bottom_swap(3)
        a = tc.wreath_build(tc.identity(2), tc.identity(2), tc.identity(2), 4)
        conj = tc.compose(tc.compose(nu3, a), tc.inverse(nu3))
        nu2 = eg.bottom_swap(2)
        assert conj == tc.wreath_build(nu2, tc.identity(2), nu2, 4)
        assert not eg.is_in_E(conj)

    def test_rotation_in_H(self):
        for n in (2, 3, 4):
            a = tc.wreath_build(*([tc.identity(n - 1)] * 3), 4)
            assert eg.is_in_H(a)

    def test_nested_swap_in_E_not_H(self):
        for n in (1, 2, 3, 4):
            tau = eg.nested_swap(n)
            assert eg.is_in_E(tau)
            assert not eg.is_in_H(tau)

    def test_conjugated_rotation_outside_H(self):
        tau3 = eg.nested_swap(3)
        a = tc.wreath_build(tc.identity(2), tc.identity(2), tc.identity(2), 4)
        conj = tc.compose(tc.compose(tau3, a), tc.inverse(tau3))
        tau2 = eg.nested_swap(2)
        expected = tc.wreath_build(tc.identity(2), tc.inverse(tau2), tau2, 5)
        assert conj == expected
        assert not eg.is_in_H(conj)

    def test_H_subset_E_enumerated(self):
        for g in eg.enumerate_group("H", 2):
            assert eg.is_in_E(g)

    def test_H_subset_E_sampled(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            assert eg.is_in_E(eg.sample_portrait("H", 4, rng))


class TestEnumeration:
    def test_E2_is_even_half_of_aut2(self):
        aut = [tc.Portrait(2, bytes(int(v) for v in row))
               for row in eg.enumerate_labels("AUT", 2)]
        evens = {g.labels for g in aut if tc.sign_leaves(g) == 1}
        e2 = {g.labels for g in eg.enumerate_E(2)}
        assert len(aut) == 1296
        assert len(e2) == 648  # also checks distinctness
        assert e2 == evens

    def test_H2_within_E2(self):
        e2 = {g.labels for g in eg.enumerate_E(2)}
        h2 = {g.labels for g in eg.enumerate_group("H", 2)}
        assert len(h2) == 81
        assert h2 <= e2

    def test_capability_cutoff(self):
        with pytest.raises(CapabilityError):
            list(eg.enumerate_E(3))


class TestSampling:
    def test_soundness(self):
        rng = np.random.default_rng(11)
        for n in (1, 2, 3, 4):
            for _ in range(50):
                assert eg.is_in_E(eg.sample_E_uniform(n, rng))

    def test_depth1_chi_square(self):
        rng = np.random.default_rng(5)
        draws = eg.sample_group_labels("E", 1, 60_000, rng)[:, 0]
        counts = np.bincount(draws, minlength=6)
        expected = 10_000
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        assert chi2 < 25  # df = 5

    def test_depth2_uniform_within_5_sigma(self):
        rng = np.random.default_rng(6)
        n_draws = 648_000
        labels = eg.sample_group_labels("E", 2, n_draws, rng).astype(np.int64)
        codes = labels[:, 0] * 216 + labels[:, 1] * 36 + labels[:, 2] * 6 + labels[:, 3]
        counts = np.bincount(codes, minlength=1296)
        legal = {row[0] * 216 + row[1] * 36 + row[2] * 6 + row[3]
                 for row in eg.enumerate_labels("E", 2).astype(np.int64)}
        assert set(np.flatnonzero(counts)) <= legal
        assert len(legal) == 648
        sigma = math.sqrt(n_draws * (1 / 648) * (1 - 1 / 648))
        occupied = counts[sorted(legal)]
        assert np.abs(occupied - n_draws / 648).max() < 5 * sigma

    def test_rejection_sampler_agrees(self):
        rng = np.random.default_rng(12)
        n_draws = 64_800
        counts = np.zeros(1296, dtype=np.int64)
        for _ in range(n_draws):
            g = eg.sample_E_rejection(2, rng)
            assert eg.is_in_E(g)
            lab = g.labels
            counts[lab[0] * 216 + lab[1] * 36 + lab[2] * 6 + lab[3]] += 1
        occupied = counts[counts > 0]
        assert occupied.size == 648
        expected = n_draws / 648
        chi2 = float(((occupied - expected) ** 2 / expected).sum())
        # df = 647: mean 647, sd ~ 36; generous 5-sigma band
        assert chi2 < 647 + 5 * math.sqrt(2 * 647)

    def test_closure_under_compose_and_inverse(self):
        rng = np.random.default_rng(13)
        trials = {2: 400, 3: 200, 4: 100, 5: 40, 6: 20}
        for depth, count in trials.items():
            for _ in range(count):
                g = eg.sample_E_uniform(depth, rng)
                h = eg.sample_E_uniform(depth, rng)
                assert eg.is_in_E(tc.compose(g, h))
                assert eg.is_in_E(tc.inverse(g))

    def test_restriction_lands_in_E_and_covers_E2(self):
        rng = np.random.default_rng(14)
        seen = set()
        for _ in range(10_000):
            g = eg.sample_E_uniform(3, rng)
            r = tc.restrict(g, 2)
            assert eg.is_in_E(r)
            seen.add(r.labels)
        assert len(seen) == 648


class TestSpecialElements:
    def test_bottom_swap_is_involution(self):
        for n in (1, 2, 3):
            nu = eg.bottom_swap(n)
            assert tc.inverse(nu) == nu
            assert tc.cycle_type(nu).count(2) == 1

    def test_nested_swap_membership_at_depth4(self):
        tau = eg.nested_swap(4)
        assert eg.is_in_E(tau)
        assert not eg.is_in_H(tau)

    def test_special_even_block_identity(self):
        g = eg.special_even_block(3, [("e", "e", "e")] * 3)
        assert g == tc.identity(3)

    def test_special_even_block_two_two_cycles(self):
        g = eg.special_even_block(2, [("(12)", "(12)", "e")])
        assert eg.is_in_E(g)
        assert tc.cycle_type(g) == (2, 2, 1, 1, 1, 1, 1)

    def test_special_even_block_depth3(self):
        g = eg.special_even_block(3, [("(123)", "e", "e"), ("e",) * 3, ("e",) * 3])
        assert eg.is_in_E(g)
        assert tc.restrict(g, 2).is_identity()

    def test_special_even_block_rejects_odd_triple(self):
        with pytest.raises(UsageError):
            eg.special_even_block(2, [("(12)", "e", "e")])


class TestNormality:
    def test_E_in_aut_normal_small(self):
        assert eg.normality_witness("E-in-AUT", 1) is None
        assert eg.normality_witness("E-in-AUT", 2) is None

    def test_E_in_aut_witness_depth3(self):
        conjugator, element, conj = eg.normality_witness("E-in-AUT", 3)
        assert conjugator == eg.bottom_swap(3)
        assert eg.is_in_E(element)
        assert not eg.is_in_E(conj)
        nu2 = eg.bottom_swap(2)
        assert conj == tc.wreath_build(nu2, tc.identity(2), nu2, 4)

    def test_H_in_E_normal_depth1(self):
        assert eg.normality_witness("H-in-E", 1) is None

    def test_H_in_E_witness_depth2(self):
        conjugator, element, conj = eg.normality_witness("H-in-E", 2)
        assert conjugator == eg.nested_swap(2)
        assert eg.is_in_H(element) and eg.is_in_E(conj)
        assert not eg.is_in_H(conj)

    def test_exhaustive_capability(self):
        with pytest.raises(CapabilityError):
            eg.normality_witness("E-in-AUT", 3, exhaustive=True)

    def test_bad_mode(self):
        with pytest.raises(UsageError):
            eg.normality_witness("X-in-Y", 2)


class TestHausdorff:
    def test_limits_closed_form(self):
        assert eg.hausdorff_limit("E") == 1.0 - math.log(2) / (3 * math.log(6))
        assert eg.hausdorff_limit("H") == math.log(3) / math.log(6)
        assert eg.hausdorff_limit("AUT") == 1.0
        # independent form of the E limit: ((2/3)log2 + log3) / log6
        alt = ((2 / 3) * math.log(2) + math.log(3)) / math.log(6)
        assert abs(eg.hausdorff_limit("E") - alt) < 1e-15

    def test_ratio_matches_log_of_exact_orders(self):
        for kind in ("E", "H", "AUT"):
            for n in (1, 2, 3, 4, 5):
                direct = math.log(eg.order(kind, n)) / math.log(eg.order("AUT", n))
                assert abs(eg.hausdorff_ratio(kind, n) - direct) < 1e-12

    def test_E_ratio_decreases_to_limit(self):
        ratios = [eg.hausdorff_ratio("E", n) for n in range(1, 7)]
        assert all(a > b for a, b in zip(ratios, ratios[1:]))
        assert all(r > eg.hausdorff_limit("E") for r in ratios)

    def test_H_ratio_is_constant(self):
        for n in (1, 3, 6):
            assert abs(eg.hausdorff_ratio("H", n) - eg.hausdorff_limit("H")) < 1e-12


class TestDistributions:
    def test_E1_exact(self):
        dist = eg.cycle_type_distribution("E", 1, "exact")
        assert dist == {(1, 1, 1): Fraction(1, 6), (2, 1): Fraction(1, 2),
                        (3,): Fraction(1, 3)}

    def test_E2_exact_frozen_entries(self):
        dist = eg.cycle_type_distribution("E", 2, "exact")
        assert sum(dist.values()) == 1
        assert dist[(9,)] == Fraction(2, 9)
        assert dist[(4, 3, 2)] == Fraction(1, 6)
        assert dist[(3, 3, 3)] == Fraction(10, 81)
        assert dist[(1,) * 9] == Fraction(1, 648)
        fixer_mass = sum(p for t, p in dist.items() if 1 in t)
        assert fixer_mass == Fraction(316, 648)

    def test_H2_fixed_mass(self):
        dist = eg.cycle_type_distribution("H", 2, "exact")
        assert sum(p for t, p in dist.items() if 1 in t) == Fraction(19, 81)

    def test_monte_carlo_close_to_exact(self):
        from cubic_arboreal.experiments import tv_distance

        exact = {t: float(v) for t, v in
                 eg.cycle_type_distribution("E", 2, "exact").items()}
        mc = eg.cycle_type_distribution("E", 2, "monte_carlo",
                                        samples=200_000, seed=21)
        assert tv_distance(exact, mc) < 0.01

    def test_exact_capability(self):
        with pytest.raises(CapabilityError):
            eg.cycle_type_distribution("E", 3, "exact")

    def test_mc_needs_samples_and_seed(self):
        with pytest.raises(UsageError):
            eg.cycle_type_distribution("E", 2, "monte_carlo")

    def test_fixed_leaf_fraction_mc_depth2(self):
        frac = eg.fixed_leaf_fraction_mc("E", 2, 200_000, seed=31)
        assert abs(frac - 316 / 648) < 0.006

    def test_fixed_leaf_count_exact(self):
        assert eg.fixed_leaf_count_exact("E", 2) == 316
        assert eg.fixed_leaf_count_exact("H", 2) == 19
        assert eg.fixed_leaf_count_exact("E", 1) == 4
