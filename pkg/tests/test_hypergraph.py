"""Data model, text I/O, cut evaluation, and the digraph reduction."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperspars.hypergraph import (
    DhgParseError,
    DirectedHypergraph,
    Hyperedge,
    digraph_cut_weight,
    expansion,
    out_cut,
    parse_dhg,
    reduce_to_digraph,
    restrict_subset,
    reverse,
    serialize_dhg,
    sparsity,
    transform_subset,
    weighted_degrees,
)

from conftest import make_h, random_hypergraph

TOY = "dhg 2 1\nv 1 1\nv 2 1\ne 3 T 1 H 2\n"


class TestParse:
    def test_toy_roundtrip_fields(self):
        h = parse_dhg(TOY)
        assert (h.n, h.m, h.r, h.total_weight) == (2, 1, 2, 2)
        assert h.edges[0].weight == 3

    def test_bytes_input(self):
        assert parse_dhg(TOY.encode()).n == 2

    def test_comments_and_blank_lines(self):
        text = "# header comment\n\ndhg 2 1\nv a 1  # vertex\nv b 1\ne 1/2 T a H b\n"
        h = parse_dhg(text)
        assert h.edges[0].weight == Fraction(1, 2)

    def test_decimal_weights(self):
        h = parse_dhg("dhg 2 1\nv a 1\nv b 1\ne 0.25 T a H b\n")
        assert h.edges[0].weight == Fraction(1, 4)
        assert "e 1/4 T a H b" in serialize_dhg(h)

    def test_empty_head_rejected(self):
        with pytest.raises(DhgParseError) as exc:
            parse_dhg("dhg 2 1\nv a 1\nv b 1\ne 1 T a H\n")
        assert exc.value.lineno == 4

    def test_skewness_above_n_rejected(self):
        with pytest.raises(DhgParseError):
            parse_dhg("dhg 2 1\nv a 3\nv b 1\ne 1 T a H b\n")

    def test_zero_weight_vertex_rejected(self):
        with pytest.raises(DhgParseError):
            parse_dhg("dhg 2 1\nv a 0\nv b 1\ne 1 T a H b\n")

    def test_unknown_vertex_rejected(self):
        with pytest.raises(DhgParseError):
            parse_dhg("dhg 2 1\nv a 1\nv b 1\ne 1 T a H c\n")

    def test_bad_header(self):
        with pytest.raises(DhgParseError):
            parse_dhg("dig 2 1\n")

    def test_serialize_sorts_vertices(self):
        h = parse_dhg("dhg 2 1\nv z 1\nv a 1\ne 1 T z H a\n")
        text = serialize_dhg(h)
        lines = text.splitlines()
        assert lines[1] == "v a 1"
        assert lines[2] == "v z 1"

    def test_parse_serialize_identity_on_canonical(self, rng):
        for _ in range(25):
            h = random_hypergraph(rng)
            canon = serialize_dhg(h)
            assert serialize_dhg(parse_dhg(canon)) == canon

    @given(st.integers(2, 6), st.integers(0, 4), st.integers(0, 10**6))
    @settings(max_examples=40, deadline=None, derandomize=True)
    def test_roundtrip_property(self, n, m, seed):
        rng = np.random.default_rng(seed)
        h = random_hypergraph(rng, n=n, m=max(m, 1))
        canon = serialize_dhg(h)
        again = parse_dhg(canon)
        assert serialize_dhg(again) == canon
        assert again.total_weight == h.total_weight


class TestSparsity:
    def test_single_edge_tail_side(self):
        h = parse_dhg(TOY)
        assert sparsity(h, {0}) == 3

    def test_single_edge_head_side(self):
        h = parse_dhg(TOY)
        assert sparsity(h, {1}) == 0

    def test_two_tail_example_against_enumeration(self):
        # e = ({a, b}, {c}), w = 2: check S = {a} against a direct
        # re-evaluation of the definition over all six proper subsets
        h = make_h(3, [({0, 1}, {2}, 2)])
        assert sparsity(h, {0}) == 1

        def brute(subset):
            inside = set(subset)
            cut = Fraction(0)
            for e in h.edges:
                if e.tail & inside and (e.head - inside):
                    cut += e.weight
            ws = sum(h.vertex_weights[i] for i in inside)
            return cut / (ws * (h.total_weight - ws))

        for mask in range(1, 7):
            s = {v for v in range(3) if mask >> v & 1}
            assert sparsity(h, s) == brute(s)

    def test_improper_subset_rejected(self):
        h = parse_dhg(TOY)
        with pytest.raises(ValueError):
            sparsity(h, set())
        with pytest.raises(ValueError):
            sparsity(h, {0, 1})

    def test_scale_covariance(self, rng):
        for _ in range(15):
            h = random_hypergraph(rng, n=5)
            lam = Fraction(int(rng.integers(1, 7)), int(rng.integers(1, 5)))
            scaled = DirectedHypergraph(
                h.names,
                h.vertex_weights,
                tuple(Hyperedge(e.tail, e.head, e.weight * lam) for e in h.edges),
            )
            for mask in range(1, 2**5 - 1):
                s = {v for v in range(5) if mask >> v & 1}
                assert sparsity(scaled, s) == lam * sparsity(h, s)


class TestExpansion:
    def test_single_edge_both_sides(self):
        h = parse_dhg(TOY)
        assert expansion(h, {0}) == (1, 0, 0)
        assert expansion(h, {1}) == (0, 1, 0)

    def test_two_tail_head_side(self):
        h = make_h(3, [({0, 1}, {2}, 2)])
        assert expansion(h, {2}) == (0, 1, 0)

    def test_ignores_file_weights(self):
        light = make_h(2, [({0}, {1}, 3)], weights=[1, 1])
        heavy = make_h(2, [({0}, {1}, 3)], weights=[1, 2])
        assert expansion(light, {0}) == expansion(heavy, {0})

    def test_zero_degree_subset_rejected(self):
        h = make_h(3, [({0}, {1}, 1)])
        with pytest.raises(ValueError):
            expansion(h, {2})


class TestReduction:
    def test_single_hyperedge_counts(self):
        h = make_h(3, [({0, 1}, {2}, 2)])
        rd = reduce_to_digraph(h)
        assert rd.num_vertices == 5
        assert len(rd.arcs) == 4
        assert rd.big_weight == 6

    def test_no_edges(self):
        h = make_h(3, [])
        rd = reduce_to_digraph(h)
        assert rd.num_vertices == 3
        assert rd.arcs == ()

    def test_shared_tail_arc_count(self):
        h = make_h(3, [({0}, {1}, 1), ({0}, {2}, 2)])
        rd = reduce_to_digraph(h)
        assert rd.num_vertices == 3 + 4
        assert len(rd.arcs) == 2 + sum(len(e.tail) + len(e.head) for e in h.edges)
        assert rd.big_weight == 3 * 3

    def test_gadget_vertices_weightless(self):
        h = make_h(3, [({0, 1}, {2}, 2)])
        rd = reduce_to_digraph(h)
        assert rd.vertex_weight(rd.tail_node(0)) == 0
        assert rd.back_map(rd.head_node(0)) is None
        assert rd.back_map(1) == 1


class TestTransformRestrict:
    def test_transform_example(self):
        h = make_h(3, [({0, 1}, {2}, 2)])
        rd = reduce_to_digraph(h)
        lifted = transform_subset(rd, {0})
        assert lifted == {0, rd.tail_node(0)}
        assert digraph_cut_weight(rd, lifted) == 2

    def test_transform_trivial_sets(self):
        h = make_h(3, [({0, 1}, {2}, 2)])
        rd = reduce_to_digraph(h)
        assert transform_subset(rd, set()) == frozenset()
        full = transform_subset(rd, {0, 1, 2})
        assert full == frozenset(range(5))
        assert digraph_cut_weight(rd, full) == 0

    def test_restrict_preserving(self):
        h = make_h(3, [({0, 1}, {2}, 2)])
        rd = reduce_to_digraph(h)
        lifted = transform_subset(rd, {0})
        subset, flag = restrict_subset(rd, lifted)
        assert subset == {0}
        assert flag

    def test_restrict_orphan_tail_not_preserving(self):
        # the tail gadget alone keeps its edge arc in the digraph cut but
        # restricts to the empty set; preservation fails and the flag says so
        h = make_h(3, [({0, 1}, {2}, 2)])
        rd = reduce_to_digraph(h)
        subset, flag = restrict_subset(rd, {rd.tail_node(0)})
        assert subset == frozenset()
        assert not flag

    def test_restrict_empty(self):
        h = make_h(3, [({0, 1}, {2}, 2)])
        rd = reduce_to_digraph(h)
        subset, flag = restrict_subset(rd, set())
        assert subset == frozenset()
        assert flag


def hypergraph_cut_weight(h, subset):
    return sum((h.edges[k].weight for k in out_cut(h, subset)), Fraction(0))


class TestFact11Properties:
    def test_transform_preserves_weight_and_cut_exhaustive(self, rng):
        for _ in range(40):
            h = random_hypergraph(rng, max_n=6, max_m=4)
            rd = reduce_to_digraph(h)
            for mask in range(2**h.n):
                s = {v for v in range(h.n) if mask >> v & 1}
                lifted = transform_subset(rd, s)
                assert h.weight_of(s) == sum(rd.vertex_weight(v) for v in lifted)
                assert hypergraph_cut_weight(h, s) == digraph_cut_weight(rd, lifted)

    def test_restriction_never_exceeds_and_flag_is_exact(self, rng):
        # below the gadget weight, the restricted cut never exceeds the
        # digraph cut, and the flag reports exactly the equality cases
        for _ in range(12):
            h = random_hypergraph(rng, max_n=4, max_m=2)
            rd = reduce_to_digraph(h)
            if rd.num_vertices > 12:
                continue
            for mask in range(2**rd.num_vertices):
                t = {v for v in range(rd.num_vertices) if mask >> v & 1}
                dig = digraph_cut_weight(rd, t)
                if dig >= rd.big_weight:
                    continue
                restricted, flag = restrict_subset(rd, t)
                hyp = hypergraph_cut_weight(h, restricted)
                assert hyp <= dig
                assert flag == (hyp == dig)

    def test_gadget_closed_subsets_preserve_exactly(self, rng):
        # equality holds whenever the subset is gadget-closed: no orphan
        # tail node, and the head node present whenever the head is inside
        for _ in range(12):
            h = random_hypergraph(rng, max_n=4, max_m=2)
            rd = reduce_to_digraph(h)
            if rd.num_vertices > 12:
                continue
            for mask in range(2**rd.num_vertices):
                t = {v for v in range(rd.num_vertices) if mask >> v & 1}
                if digraph_cut_weight(rd, t) >= rd.big_weight:
                    continue
                closed = True
                for k, e in enumerate(h.edges):
                    if rd.tail_node(k) in t and not (e.tail & t):
                        closed = False
                    if rd.head_node(k) not in t and e.head <= t:
                        closed = False
                if not closed:
                    continue
                restricted, flag = restrict_subset(rd, t)
                assert flag
                assert hypergraph_cut_weight(h, restricted) == digraph_cut_weight(rd, t)


class TestReverse:
    def test_reverse_swaps_cut_direction(self, rng):
        for _ in range(20):
            h = random_hypergraph(rng, max_n=6)
            hr = reverse(h)
            for mask in range(1, 2**h.n - 1):
                s = {v for v in range(h.n) if mask >> v & 1}
                comp = set(range(h.n)) - s
                assert sparsity(hr, s) == sparsity(h, comp)

    def test_weighted_degrees_invariant(self, rng):
        h = random_hypergraph(rng)
        assert weighted_degrees(h) == weighted_degrees(reverse(h))
