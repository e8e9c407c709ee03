"""Lyapunov-Schmidt reduction on hand-solvable bifurcation problems."""

from fractions import Fraction

import numpy as np
import pytest

from helpers import single_vertex_tuple
from quiverdyn.errors import NotEquilibrium
from quiverdyn.lsreduction import (check_reduced_equivariance,
                                   find_branches_1param, ls_reduce,
                                   reduced_cross_derivative)
from quiverdyn.polynomial import Poly
from quiverdyn.quiver import Quiver, QuiverRepresentation
from quiverdyn.tuples import PolyMap, PolyMapTuple


def one_param_tuple(polys, n):
    """Single-vertex tuple with one trailing parameter variable."""
    quiver = Quiver(["v"], [("id", "v", "v")])
    eye = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    rep = QuiverRepresentation(quiver, {"v": n}, {"id": eye}, mode="exact")
    return PolyMapTuple(rep, {"v": PolyMap(polys)}, param_dim=1)


def transcritical_with_slave():
    """x' = lam*x - x^2 + y^2,  y' = -y + x^2 (vars x, y, lam).

    The linearization at the origin is diag(0, -1), so the kernel is the
    x-axis and the image the y-axis. The slave equation -w + u^2 = 0 gives
    phi(u) = u^2 exactly, and the reduced equation is
    f(u, lam) = lam*u - u^2 + u^4.
    """
    p1 = Poly(3, {(1, 0, 1): 1, (2, 0, 0): -1, (0, 2, 0): 1})
    p2 = Poly(3, {(0, 1, 0): -1, (2, 0, 0): 1})
    return one_param_tuple([p1, p2], 2)


def test_requires_equilibrium():
    p = Poly(2, {(0, 0): 1, (1, 0): 1})  # constant term, F(0) != 0
    with pytest.raises(NotEquilibrium):
        ls_reduce(one_param_tuple([p], 1))


def test_kernel_dimension_and_phi_solves_image_equation():
    F = transcritical_with_slave()
    red = ls_reduce(F)
    assert red.kernel_dim("v") == 1
    # phi solves the image-component equation: full F at the lifted point
    # has zero image component; here the kernel is the x-axis and the image
    # the y-axis, so F_y(u, phi(u)) = 0, i.e. phi = u^2 exactly.
    for u in (0.05, -0.03, 0.002):
        w = red.phi("v", np.array([u]), [0.001])
        assert w[0] == pytest.approx(u * u, abs=1e-10)


def test_reduced_equation_matches_hand_elimination():
    F = transcritical_with_slave()
    red = ls_reduce(F)
    # eliminating y = x^2: f(u, lam) = lam*u - u^2 + u^4
    for u, lam in [(0.01, 0.005), (-0.02, 0.003), (0.04, -0.001)]:
        got = red.reduced_eval("v", np.array([u]), [lam])
        assert got[0] == pytest.approx(lam * u - u ** 2 + u ** 4, abs=1e-9)


def test_reduced_equivariance_on_trivial_arrow():
    F = transcritical_with_slave()
    red = ls_reduce(F)
    report = check_reduced_equivariance(red, samples=20)
    assert report.passed


def test_cross_derivative_of_decoupled_system():
    # two independent transcritical problems stacked diagonally
    p1 = Poly(3, {(1, 0, 1): 1, (2, 0, 0): -1})
    p2 = Poly(3, {(0, 1, 1): 1, (0, 2, 0): -1})
    red = ls_reduce(one_param_tuple([p1, p2], 2))
    assert red.kernel_dim("v") == 2
    assert abs(reduced_cross_derivative(red, "v", 0, 1)) <= 1e-8
    assert abs(reduced_cross_derivative(red, "v", 1, 0)) <= 1e-8


def test_transcritical_branches():
    p = Poly(2, {(1, 1): 1, (2, 0): -1})  # x' = lam*x - x^2
    red = ls_reduce(one_param_tuple([p], 1))
    branches = find_branches_1param(red, "v")
    exps = sorted(tuple(b.exponents) for b in branches)
    assert len(branches) == 2
    assert exps == [(0,), (1,)]
    nontrivial = [b for b in branches if b.exponents == [1]
                  or tuple(b.exponents) == (1,)][0]
    assert nontrivial.coefficients[0] == pytest.approx(1.0, rel=1e-3)
    assert nontrivial.r_squared >= 0.999


def test_pitchfork_branches_have_square_root_exponent():
    p = Poly(2, {(1, 1): 1, (3, 0): -1})  # x' = lam*x - x^3
    red = ls_reduce(one_param_tuple([p], 1))
    branches = find_branches_1param(red, "v")
    exps = sorted(tuple(b.exponents) for b in branches)
    assert exps == [(0,), (0.5,), (0.5,)]
    for b in branches:
        if tuple(b.exponents) == (0.5,):
            assert abs(b.coefficients[0]) == pytest.approx(1.0, rel=1e-3)
            assert b.classified


def test_lift_reconstructs_full_state():
    F = transcritical_with_slave()
    red = ls_reduce(F)
    x = red.lift("v", np.array([0.02]), [0.001])
    assert x[0] == pytest.approx(0.02, abs=1e-12)
    assert x[1] == pytest.approx(0.0004, abs=1e-10)
