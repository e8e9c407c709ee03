"""Center-manifold Taylor jets: exact coefficients and flow consistency."""

from fractions import Fraction

import pytest

from helpers import cm_coupled_tuple, cm_feedforward_tuple
from quiverdyn.centermanifold import (check_cm_equivariance, cm_taylor,
                                      flow_consistency)
from quiverdyn.errors import NotEquilibrium
from quiverdyn.polynomial import Poly
from quiverdyn.tuples import PolyMap, PolyMapTuple


def test_feedforward_graph_map_coefficients():
    # x' = x^2, y' = -y + x^2: invariance gives phi'(x) x^2 = -phi + x^2,
    # whose Taylor solution is phi = x^2 - 2 x^3 + 6 x^4 - ...
    F = cm_feedforward_tuple()
    exp = cm_taylor(F, 4)
    phi = exp.vertices["big"].phi
    assert len(phi) == 1
    assert phi[0].terms == {(2,): Fraction(1), (3,): Fraction(-2),
                            (4,): Fraction(6)}


def test_feedforward_reduced_field_is_center_equation():
    F = cm_feedforward_tuple()
    exp = cm_taylor(F, 4)
    assert exp.vertices["big"].reduced[0].terms == {(2,): Fraction(1)}
    assert exp.vertices["small"].reduced[0].terms == {(2,): Fraction(1)}


def test_cm_equivariance_exact():
    F = cm_feedforward_tuple()
    exp = cm_taylor(F, 4)
    report = check_cm_equivariance(exp)
    assert report.passed and report.max_residual() == 0


def test_coupled_fixture_jet_solves_invariance_equation():
    # x' = x*y, y' = -y + x^2: matching -phi + x^2 = phi' * (x phi) degree
    # by degree gives phi = x^2 - 2 x^4 + O(x^6)
    F = cm_coupled_tuple()
    exp = cm_taylor(F, 5)
    vd = exp.vertices["v"]
    assert vd.phi[0].terms == {(2,): Fraction(1), (4,): Fraction(-2)}
    # reduced field u' = u * phi(u) = u^3 - 2 u^5
    assert vd.reduced[0].terms == {(3,): Fraction(1), (5,): Fraction(-2)}


def test_flow_consistency_error_scales_with_jet_order():
    # phi = x^2 - 2 x^4 + ... has only even-degree terms, so the defect of
    # the degree-2 jet is O(r^3) (ratio 2^3) while the degree-3 jet gains an
    # extra order because its first neglected term is even (ratio 2^5).
    F = cm_coupled_tuple()
    for degree, expected in ((2, 8.0), (3, 32.0)):
        exp = cm_taylor(F, degree)
        err1, err2, ratio = flow_consistency(F, exp, "v", radius=5e-2)
        assert err2 < err1
        assert ratio == pytest.approx(expected, rel=0.25)


def test_requires_equilibrium():
    F = cm_coupled_tuple()
    rep = F.representation
    bad = PolyMapTuple(rep, {"v": PolyMap([
        Poly(2, {(0, 0): 1, (1, 1): 1}),
        Poly(2, {(0, 1): -1})])})
    with pytest.raises(NotEquilibrium):
        cm_taylor(bad, 3)
