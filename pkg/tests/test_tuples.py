"""Equivariant polynomial tuples: checks, composition, bracket, restriction."""

import random
from fractions import Fraction

import pytest

from helpers import random_poly
from quiverdyn.errors import DegreeOverflow, ModeUnavailable
from quiverdyn.polynomial import Poly
from quiverdyn.quiver import Quiver, QuiverRepresentation, Subrepresentation
from quiverdyn.tuples import (PolyMap, PolyMapTuple, bracket_tuple,
                              check_equivariance, compose_tuple,
                              equivariance_defect, identity_tuple,
                              linear_part, linear_tuple, restrict_to_subrep)


def feedforward_rep():
    q = Quiver(["big", "small"], [("p", "big", "small")])
    return QuiverRepresentation(
        q, {"big": 2, "small": 1}, {"p": [[Fraction(1), Fraction(0)]]},
        mode="exact")


def feedforward_tuple(f_terms, g_terms):
    """big: (f(x), g(x, y)); small: f(X) -- equivariant by construction."""
    rep = feedforward_rep()
    f1 = Poly(1, f_terms)
    fb = PolyMap([f1.embed(2, [0]), Poly(2, g_terms)])
    fs = PolyMap([f1])
    return PolyMapTuple(rep, {"big": fb, "small": fs})


def test_feedforward_tuple_is_equivariant():
    F = feedforward_tuple({(1,): 2, (2,): -1}, {(0, 1): -1, (1, 1): 3})
    report = check_equivariance(F, mode="exact")
    assert report.passed and report.max_residual() == 0


def test_non_feedforward_tuple_fails():
    rep = feedforward_rep()
    # big first component depends on y: the projection no longer intertwines
    fb = PolyMap([Poly(2, {(1, 0): 1, (0, 1): 1}), Poly(2, {(0, 1): 1})])
    fs = PolyMap([Poly(1, {(1,): 1})])
    F = PolyMapTuple(rep, {"big": fb, "small": fs})
    report = check_equivariance(F, mode="exact")
    assert not report.passed
    assert report.per_arrow["p"] == Fraction(1)


def test_sampled_mode_agrees_with_exact_mode():
    F = feedforward_tuple({(1,): 1, (3,): -2}, {(0, 1): -1, (2, 0): 1})
    exact = check_equivariance(F, mode="exact")
    sampled = check_equivariance(F, mode="sampled")
    assert exact.passed and sampled.passed
    assert sampled.max_residual() <= 1e-9


def test_exact_mode_requires_rational_data():
    rep = feedforward_rep()
    fb = PolyMap([Poly(2, {(1, 0): 0.5}), Poly(2, {(0, 1): 1})])
    fs = PolyMap([Poly(1, {(1,): 0.5})])
    F = PolyMapTuple(rep, {"big": fb, "small": fs})
    with pytest.raises(ModeUnavailable):
        check_equivariance(F, mode="exact")


def test_composition_and_bracket_preserve_equivariance():
    rng = random.Random(7)
    for _ in range(10):
        f1 = random_poly(rng, 1, max_degree=2)
        f2 = random_poly(rng, 1, max_degree=2)
        F = feedforward_tuple(f1.terms, random_poly(rng, 2, 2).terms)
        G = feedforward_tuple(f2.terms, random_poly(rng, 2, 2).terms)
        assert check_equivariance(compose_tuple(F, G), mode="exact").passed
        assert check_equivariance(bracket_tuple(F, G), mode="exact").passed


def test_bracket_antisymmetry():
    rng = random.Random(11)
    F = feedforward_tuple(random_poly(rng, 1, 2).terms,
                          random_poly(rng, 2, 2).terms)
    G = feedforward_tuple(random_poly(rng, 1, 2).terms,
                          random_poly(rng, 2, 2).terms)
    FG = bracket_tuple(F, G)
    GF = bracket_tuple(G, F)
    for v in ("big", "small"):
        for p, q in zip(FG.components[v].outputs, GF.components[v].outputs):
            assert (p + q).terms == {}


def test_identity_is_composition_unit():
    F = feedforward_tuple({(2,): 1}, {(0, 1): -1})
    I = identity_tuple(F.representation)
    assert compose_tuple(F, I) == F
    assert compose_tuple(I, F) == F


def test_degree_cap_enforced():
    F = feedforward_tuple({(3,): 1}, {(0, 1): 1})
    with pytest.raises(DegreeOverflow):
        compose_tuple(F, F)  # degree 9 > cap 8
    truncated = compose_tuple(F, F, allow_truncation=True)
    assert truncated.degree() <= truncated.max_degree


def test_linear_tuple_and_linear_part_roundtrip():
    rep = feedforward_rep()
    mats = {"big": [[Fraction(1), Fraction(0)], [Fraction(2), Fraction(-1)]],
            "small": [[Fraction(1)]]}
    L = linear_tuple(rep, mats)
    assert check_equivariance(L, mode="exact").passed
    back = linear_part(L)
    assert back["big"] == tuple(tuple(r) for r in mats["big"])


def test_restrict_to_subrep_conjugates_dynamics():
    # one vertex, identity arrow; invariant axis of a diagonal system
    q = Quiver(["v"], [("id", "v", "v")])
    eye = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
    rep = QuiverRepresentation(q, {"v": 2}, {"id": eye}, mode="exact")
    # x' = x^2, y' = y (axis x is invariant)
    F = PolyMapTuple(rep, {"v": PolyMap([Poly(2, {(2, 0): 1}),
                                         Poly(2, {(0, 1): 1})])})
    basis = {"v": ((Fraction(1),), (Fraction(0),))}
    S = Subrepresentation.from_bases(rep, basis)
    red = restrict_to_subrep(F, S)
    assert red.components["v"].outputs[0].terms == {(2,): Fraction(1)}


def test_equivariance_defect_is_zero_map_for_equivariant_input():
    F = feedforward_tuple({(1,): -1, (2,): 1}, {(0, 1): -2, (1, 0): 1})
    defect = equivariance_defect(F, "p")
    assert all(p.terms == {} for p in defect.outputs)
