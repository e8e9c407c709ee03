"""Subnetwork and quotient quivers, graph fibrations, induced tuples."""

import itertools
from fractions import Fraction

import pytest

from helpers import (feedforward_pair_network, feedforward_chain_network, two_type_network,
                     random_response_family)
from quiverdyn.builders import (build_quoq, build_subq, enumerate_fibrations,
                                enumerate_quotients, enumerate_subnetworks,
                                induce_on_quotients, induce_on_subnetworks,
                                quotient_network, subnetwork_network)
from quiverdyn.quiver import validate_representation
from quiverdyn.tuples import bracket_tuple, check_equivariance, compose_tuple


def brute_force_in_closed_subsets(N):
    """Oracle: filter all nonempty node subsets for in-closure."""
    ids = N.node_ids()
    out = []
    for r in range(1, len(ids) + 1):
        for subset in itertools.combinations(ids, r):
            sset = set(subset)
            if all(s in sset
                   for n in subset for _, s, _, _ in N.in_edges(n)):
                out.append(tuple(subset))
    return sorted(out, key=lambda s: (len(s), s))


@pytest.mark.parametrize("makenet", [feedforward_pair_network, feedforward_chain_network,
                                     two_type_network])
def test_subnetworks_match_brute_force_oracle(makenet):
    N = makenet()
    got = sorted((tuple(s) for s in enumerate_subnetworks(N).subsets),
                 key=lambda s: (len(s), s))
    assert got == brute_force_in_closed_subsets(N)


def test_chain_subq_shape():
    N = feedforward_chain_network()
    quiver, rep, subsets = build_subq(N)
    assert len(quiver.vertices) == 5
    # chain under inclusion: one arrow per ordered containment pair
    assert len(quiver.arrows) == 15
    assert validate_representation(rep) == []
    # every matrix is an exact 0/1 selection
    for a, _, _ in quiver.arrows:
        M = rep.arrow_matrix[a]
        assert all(x in (Fraction(0), Fraction(1)) for row in M for x in row)
        assert all(sum(row) == 1 for row in M)


def test_subnetwork_network_keeps_induced_edges_only():
    N = feedforward_chain_network()
    sub = subnetwork_network(N, ("1", "2"))
    assert sub.node_ids() == ["1", "2"]
    assert {e for e, *_ in sub.edges} == {"s1", "s2", "e1"}


def test_two_type_quotients_partitions():
    N = two_type_network()
    catalog = enumerate_quotients(N)
    partitions = set()
    for witness in catalog.witnesses:
        classes = {}
        for node, cls in witness.items():
            classes.setdefault(cls, set()).add(node)
        partitions.add(frozenset(frozenset(c) for c in classes.values()))

    def P(*groups):
        merged = set()
        singles = {"1", "2", "3", "4", "5"}
        for g in groups:
            merged.add(frozenset(g))
            singles -= set(g)
        merged |= {frozenset({n}) for n in singles}
        return frozenset(merged)

    assert partitions == {
        P(),                          # trivial quotient (the network itself)
        P({"1", "3"}),
        P({"1", "2"}),
        P({"1", "2", "3"}),
        P({"1", "3"}, {"4", "5"}),
        P({"1", "2", "3"}, {"4", "5"}),
    }


def test_quotient_network_is_colour_consistent():
    from quiverdyn.network import validate_coloured_network
    N = two_type_network()
    catalog = enumerate_quotients(N)
    for Q in catalog.quotients:
        assert validate_coloured_network(Q) == []


def brute_force_fibrations(N_src, N_dst):
    """Oracle: try every node map and every edge map, filter morphisms."""
    src_nodes = N_src.node_ids()
    dst_nodes = N_dst.node_ids()
    count = 0
    src_edges = list(N_src.edges)
    for images in itertools.product(dst_nodes, repeat=len(src_nodes)):
        nm = dict(zip(src_nodes, images))
        if any(N_src.node_colour[n] != N_dst.node_colour[nm[n]]
               for n in src_nodes):
            continue
        # per-node input bijection: edges into n -> edges into nm[n]
        per_node_choices = []
        ok = True
        for n in src_nodes:
            ins = N_src.in_edges(n)
            outs = N_dst.in_edges(nm[n])
            if len(ins) != len(outs):
                ok = False
                break
            choices = []
            for perm in itertools.permutations(outs):
                if all(ec == pec and nm[s] == ps
                       for (_, s, _, ec), (_, ps, _, pec) in zip(ins, perm)):
                    choices.append(perm)
            if not choices:
                ok = False
                break
            per_node_choices.append(choices)
        if ok:
            count += len(list(itertools.product(*per_node_choices)))
    return count


def test_fibration_enumeration_matches_brute_force():
    N2 = feedforward_pair_network()
    N5 = two_type_network()
    assert len(enumerate_fibrations(N2, N2)) == brute_force_fibrations(N2, N2)
    assert len(enumerate_fibrations(N5, N5)) == brute_force_fibrations(N5, N5)
    catalog = enumerate_quotients(N5)
    small = catalog.quotients[-1]
    assert len(enumerate_fibrations(N5, small)) == \
        brute_force_fibrations(N5, small)


def test_fibrations_verify_structurally():
    N = two_type_network()
    for f in enumerate_fibrations(N, N):
        assert f.verify() == []


def test_two_type_quoq_shape():
    N = two_type_network()
    quiver, rep, catalog, arrow_fibs = build_quoq(N)
    assert len(quiver.vertices) == 6
    assert validate_representation(rep) == []
    for a, s, t in quiver.arrows:
        fib = arrow_fibs[a]
        assert fib.is_surjective()
        assert fib.verify() == []


def test_induced_tuples_are_exactly_equivariant():
    for makenet in (feedforward_pair_network, feedforward_chain_network, two_type_network):
        N = makenet()
        fam = random_response_family(N, seed=17, max_degree=2)
        for induce in (induce_on_subnetworks, induce_on_quotients):
            F = induce(N, fam)
            assert check_equivariance(F, mode="exact").passed


def test_composition_and_bracket_of_induced_tuples():
    N = feedforward_pair_network()
    F = induce_on_subnetworks(N, random_response_family(N, 1, max_degree=2))
    G = induce_on_subnetworks(N, random_response_family(N, 2, max_degree=2))
    assert check_equivariance(compose_tuple(F, G), mode="exact").passed
    assert check_equivariance(bracket_tuple(F, G), mode="exact").passed
