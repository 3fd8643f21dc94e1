import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cubic_arboreal.errors import CapabilityError, UsageError
from cubic_arboreal import tree_core as tc


def word_to_leaf(word, depth):
    # 1-based letters, most significant first
    leaf = 0
    for ell in word:
        leaf = 3 * leaf + (ell - 1)
    return leaf


def portraits(max_depth=4):
    @st.composite
    def build(draw):
        depth = draw(st.integers(1, max_depth))
        labels = draw(st.lists(st.integers(0, 5), min_size=tc.tree_size(depth),
                               max_size=tc.tree_size(depth)))
        return tc.Portrait(depth, bytes(labels))

    return build()


def pair_same_depth(max_depth=4):
    @st.composite
    def build(draw):
        depth = draw(st.integers(1, max_depth))
        size = tc.tree_size(depth)
        mk = lambda: bytes(draw(st.lists(st.integers(0, 5), min_size=size, max_size=size)))
        return tc.Portrait(depth, mk()), tc.Portrait(depth, mk())

    return build()


class TestS3Tables:
    def test_six_distinct_elements(self):
        assert len(set(tc.S3_IMAGES)) == 6

    def test_signs(self):
        assert tc.S3_SIGN == (1, -1, -1, -1, 1, 1)
        for a in range(6):
            for b in range(6):
                assert tc.S3_SIGN[tc.S3_MUL[a][b]] == tc.S3_SIGN[a] * tc.S3_SIGN[b]

    def test_inverses_and_associativity(self):
        for a in range(6):
            assert tc.S3_MUL[a][tc.S3_INV[a]] == 0
        for a in range(6):
            for b in range(6):
                for c in range(6):
                    assert (tc.S3_MUL[tc.S3_MUL[a][b]][c]
                            == tc.S3_MUL[a][tc.S3_MUL[b][c]])


class TestAct:
    def test_identity_fixes_all_leaves(self):
        g = tc.identity(3)
        assert [tc.act(g, leaf) for leaf in range(27)] == list(range(27))

    def test_depth1_transposition(self):
        g = tc.Portrait(1, bytes([1]))  # (12)
        assert tc.act(g, word_to_leaf((1,), 1)) == word_to_leaf((2,), 1)

    def test_depth2_rotation_example(self):
        # ((1,1,1),(123)) sends the leaf with word (3,2) to (1,2)
        g = tc.wreath_build(tc.identity(1), tc.identity(1), tc.identity(1), 4)
        assert tc.act(g, word_to_leaf((3, 2), 2)) == word_to_leaf((1, 2), 2)

    def test_depth2_rotation_full_table(self):
        # brute-force cross-check: (x, i) -> (x, i+1 mod 3) as words
        g = tc.wreath_build(tc.identity(1), tc.identity(1), tc.identity(1), 4)
        for i in range(3):
            for x in range(3):
                leaf = 3 * i + x
                assert tc.act(g, leaf) == 3 * ((i + 1) % 3) + x

    def test_act_is_bijection(self):
        g = tc.Portrait(2, bytes([4, 1, 3, 2]))
        images = {tc.act(g, leaf) for leaf in range(9)}
        assert images == set(range(9))

    def test_leaf_out_of_range(self):
        with pytest.raises(UsageError):
            tc.act(tc.identity(2), 9)


class TestCompose:
    def test_identity_neutral(self):
        g = tc.Portrait(2, bytes([5, 1, 0, 3]))
        assert tc.compose(tc.identity(2), g) == g
        assert tc.compose(g, tc.identity(2)) == g

    def test_s3_table(self):
        # (12) o (123), applying (123) first, equals (23)
        a = tc.Portrait(1, bytes([1]))
        b = tc.Portrait(1, bytes([4]))
        assert tc.compose(a, b) == tc.Portrait(1, bytes([3]))

    def test_depth_mismatch(self):
        with pytest.raises(UsageError):
            tc.compose(tc.identity(2), tc.identity(3))

    @settings(max_examples=60, deadline=None)
    @given(pair_same_depth())
    def test_action_homomorphism(self, pair):
        g, h = pair
        gh = tc.compose(g, h)
        for leaf in range(g.leaf_count):
            assert tc.act(gh, leaf) == tc.act(g, tc.act(h, leaf))

    @settings(max_examples=40, deadline=None)
    @given(portraits())
    def test_inverse_property(self, g):
        assert tc.compose(g, tc.inverse(g)) == tc.identity(g.depth)
        assert tc.compose(tc.inverse(g), g) == tc.identity(g.depth)

    def test_inverse_examples(self):
        assert tc.inverse(tc.identity(3)) == tc.identity(3)
        # the nested transposition at depth 2: ((t,1,1),(12))^-1 = ((1,t^-1,1),(12))
        tau2 = tc.parse_portrait("(((12),e,e),(12))")
        assert tc.inverse(tau2) == tc.parse_portrait("((e,(12),e),(12))")


class TestRestrict:
    def test_full_depth_is_identity_map(self):
        g = tc.Portrait(3, bytes(range(6)) + bytes([0] * 7))
        assert tc.restrict(g, 3) == g

    def test_prefix_semantics(self):
        g = tc.Portrait(3, bytes([2]) + bytes([1, 3, 5]) + bytes([0] * 9))
        assert tc.restrict(g, 1) == tc.Portrait(1, bytes([2]))
        assert tc.restrict(g, 2) == tc.Portrait(2, bytes([2, 1, 3, 5]))

    def test_out_of_range(self):
        with pytest.raises(UsageError):
            tc.restrict(tc.identity(2), 3)
        with pytest.raises(UsageError):
            tc.restrict(tc.identity(2), 0)

    @settings(max_examples=40, deadline=None)
    @given(pair_same_depth(max_depth=3))
    def test_restrict_commutes_with_compose(self, pair):
        g, h = pair
        for m in range(1, g.depth + 1):
            assert (tc.restrict(tc.compose(g, h), m)
                    == tc.compose(tc.restrict(g, m), tc.restrict(h, m)))


class TestSigns:
    def test_identity(self):
        assert tc.sign_leaves(tc.identity(3)) == 1
        assert tc.sign_recursive(tc.identity(3)) == 1

    def test_top_transposition_depth2(self):
        g = tc.wreath_build(tc.identity(1), tc.identity(1), tc.identity(1), 1)
        assert tc.sign_leaves(g) == -1  # three disjoint 2-cycles
        assert tc.sign_recursive(g) == -1

    def test_top_rotation_depth2(self):
        g = tc.wreath_build(tc.identity(1), tc.identity(1), tc.identity(1), 4)
        assert tc.sign_leaves(g) == 1  # three disjoint 3-cycles

    def test_nested_swap_depth2_positive(self):
        tau2 = tc.parse_portrait("(((12),e,e),(12))")
        assert tc.sign_recursive(tau2) == 1
        assert tc.sign_leaves(tau2) == 1

    def test_exhaustive_depth2_equality(self):
        from cubic_arboreal.en_groups import enumerate_labels

        for row in enumerate_labels("AUT", 2):
            g = tc.Portrait(2, bytes(int(v) for v in row))
            assert tc.sign_leaves(g) == tc.sign_recursive(g)

    @settings(max_examples=50, deadline=None)
    @given(portraits(max_depth=5))
    def test_random_equality(self, g):
        assert tc.sign_leaves(g) == tc.sign_recursive(g)

    @settings(max_examples=40, deadline=None)
    @given(pair_same_depth())
    def test_level_sign_multiplicative(self, pair):
        g, h = pair
        for m in range(1, g.depth + 1):
            assert (tc.sign_at_level(tc.compose(g, h), m)
                    == tc.sign_at_level(g, m) * tc.sign_at_level(h, m))

    def test_level_sign_examples(self):
        from cubic_arboreal.en_groups import bottom_swap, nested_swap

        assert tc.sign_at_level(bottom_swap(2), 2) == -1
        for n in (2, 3, 4):
            assert tc.sign_at_level(nested_swap(n), 2) == 1
        g = tc.Portrait(3, bytes([0] * 4 + [4] * 9))  # trivial above level 2
        assert tc.sign_at_level(g, 2) == 1

    def test_level_sign_range_error(self):
        with pytest.raises(UsageError):
            tc.sign_at_level(tc.identity(2), 3)


class TestCycleTypes:
    def test_identity(self):
        assert tc.cycle_type(tc.identity(2)) == (1,) * 9

    def test_top_rotation(self):
        g = tc.wreath_build(tc.identity(1), tc.identity(1), tc.identity(1), 4)
        assert tc.cycle_type(g) == (3, 3, 3)

    def test_top_transposition(self):
        g = tc.wreath_build(tc.identity(1), tc.identity(1), tc.identity(1), 1)
        assert tc.cycle_type(g) == (2, 2, 2, 1, 1, 1)

    @settings(max_examples=40, deadline=None)
    @given(portraits())
    def test_parts_sum_and_sign_relation(self, g):
        parts = tc.cycle_type(g)
        assert sum(parts) == g.leaf_count
        expected = 1 if (g.leaf_count - len(parts)) % 2 == 0 else -1
        assert tc.sign_leaves(g) == expected

    def test_cycle_type_str(self):
        assert tc.cycle_type_str((3, 3, 3)) == "3+3+3"
        assert tc.cycle_type_str((1, 2, 2)) == "2+2+1"


class TestWreath:
    def test_round_trip(self):
        a1 = tc.Portrait(2, bytes([1, 2, 3, 4]))
        a2 = tc.Portrait(2, bytes([5, 0, 1, 2]))
        a3 = tc.Portrait(2, bytes([0, 0, 4, 0]))
        g = tc.wreath_build(a1, a2, a3, 3)
        assert tc.wreath_split(g) == (a1, a2, a3, 3)

    def test_bottom_swap_recursion(self):
        from cubic_arboreal.en_groups import bottom_swap

        for n in (2, 3, 4):
            assert bottom_swap(n) == tc.wreath_build(
                bottom_swap(n - 1), tc.identity(n - 1), tc.identity(n - 1), 0)

    def test_split_depth1_fails(self):
        with pytest.raises(UsageError):
            tc.wreath_split(tc.identity(1))

    def test_depth_mismatch(self):
        with pytest.raises(UsageError):
            tc.wreath_build(tc.identity(1), tc.identity(2), tc.identity(1), 0)


class TestBulkHelpers:
    def test_leaf_permutation_bulk_matches_act(self):
        rng = np.random.default_rng(7)
        depth = 3
        labels = rng.integers(0, 6, size=(20, tc.tree_size(depth))).astype(np.int8)
        perms = tc.leaf_permutation_bulk(labels, depth)
        for row, perm in zip(labels, perms):
            g = tc.Portrait(depth, bytes(int(v) for v in row))
            assert [tc.act(g, leaf) for leaf in range(27)] == perm.tolist()

    def test_cycle_types_bulk_matches_scalar(self):
        rng = np.random.default_rng(8)
        depth = 3
        labels = rng.integers(0, 6, size=(15, tc.tree_size(depth))).astype(np.int8)
        perms = tc.leaf_permutation_bulk(labels, depth)
        types = tc.cycle_types_bulk(perms)
        for row, t in zip(labels, types):
            g = tc.Portrait(depth, bytes(int(v) for v in row))
            assert tc.cycle_type(g) == t

    def test_signs_bulk(self):
        rng = np.random.default_rng(9)
        labels = rng.integers(0, 6, size=(50, tc.tree_size(2))).astype(np.int8)
        signs = tc.signs_bulk(labels)
        for row, s in zip(labels, signs):
            g = tc.Portrait(2, bytes(int(v) for v in row))
            assert tc.sign_recursive(g) == s


class TestTextFormat:
    def test_examples(self):
        assert tc.format_portrait(tc.Portrait(1, bytes([1]))) == "(12)"
        tau2 = tc.parse_portrait("(((12),e,e),(12))")
        assert tau2.labels == bytes([1, 1, 0, 0])

    def test_whitespace_tolerated(self):
        g = tc.parse_portrait(" (( (12) , e , (123) ), (13) ) ")
        assert g.labels == bytes([2, 1, 0, 4])

    @settings(max_examples=50, deadline=None)
    @given(portraits())
    def test_round_trip(self, g):
        assert tc.parse_portrait(tc.format_portrait(g)) == g

    def test_parse_errors(self):
        for bad in ("", "(12", "((e,e),e)", "((e,e,e),(12)) junk", "(14)"):
            with pytest.raises(UsageError):
                tc.parse_portrait(bad)


class TestValidation:
    def test_label_length(self):
        with pytest.raises(UsageError):
            tc.Portrait(2, bytes([0, 0, 0]))

    def test_bad_labels(self):
        with pytest.raises(UsageError):
            tc.Portrait(1, bytes([6]))

    def test_depth_bounds(self):
        with pytest.raises(UsageError):
            tc.Portrait(0, b"")
        with pytest.raises(CapabilityError):
            tc.identity(tc.MAX_DEPTH + 1)
