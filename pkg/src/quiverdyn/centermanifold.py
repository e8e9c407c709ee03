"""Taylor jets of center manifolds and the reduced dynamics on them.

For a polynomial tuple F with F(0) = 0 whose linearization splits every
vertex space into a center and a hyperbolic part, the local center manifold
at each vertex is the graph of a map phi_v from center to hyperbolic
coordinates. This module computes the Taylor jet of phi_v to a requested
degree by solving the invariance equation

    D phi(u) . f(u, phi(u)) = g(u, phi(u))

degree by degree (f and g are the center and hyperbolic components of the
field in split coordinates), together with the reduced field
F^c_v(u) = f(u, phi(u)). For an equivariant tuple, the per-vertex jets are
intertwined by the arrow matrices, which check_cm_equivariance verifies at
the coefficient level.

Only the polynomial jet is computed; no existence or uniqueness statement
about an actual invariant manifold is certified.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exactlin
from .errors import (DegreeOverflow, IllConditioned, NotEquilibrium,
                     ResonantBlock, SolveFailed)
from .polynomial import Poly, monomial_exponents
from .quiver import Subrepresentation, as_float_matrix
from .spectral import EndomorphismTuple, center_hyperbolic_split
from .tuples import DEGREE_CAP

SPECTRAL_GAP_MIN = 1e-6


@dataclass
class VertexExpansion:
    """Center-manifold jet at one vertex, in split coordinates."""
    center_dim: int
    hyperbolic_dim: int
    phi: list        # hyperbolic_dim Polys in center_dim variables, deg 2..k
    reduced: list    # center_dim Polys in center_dim variables, deg <= k
    basis: object    # [B_c | B_h] change of coordinates (columns)


@dataclass
class CMExpansion:
    """Per-vertex center-manifold Taylor data over a representation."""
    representation: object
    degree: int
    center: object          # Subrepresentation
    hyperbolic: object      # Subrepresentation
    projectors: dict
    vertices: dict          # vertex -> VertexExpansion


def _change_coords(polys, M, Minv, exact):
    """Express a vector field in the coordinates z with x = M z."""
    d = len(polys)
    nvars = polys[0].nvars if polys else 0
    subs = []
    for i in range(d):
        terms = {}
        for j in range(d):
            c = M[i][j] if exact else float(M[i, j])
            if c != 0:
                e = [0] * nvars
                e[j] = 1
                terms[tuple(e)] = c
        subs.append(Poly(nvars, terms))
    composed = [p.compose(subs) for p in polys]
    out = []
    for i in range(d):
        acc = Poly.zero(nvars)
        for j in range(d):
            c = Minv[i][j] if exact else float(Minv[i, j])
            if c != 0:
                acc = acc + composed[j].scale(c)
        out.append(acc)
    return out


def _spectral_gap(L, center_sub, hyper_sub):
    """Minimal |Re| distance between center and hyperbolic eigenvalues."""
    gaps = []
    for v in L.representation.quiver.vertices:
        if hyper_sub.subdim[v] == 0 or L.representation.dim[v] == 0:
            continue
        A = as_float_matrix(L.matrices[v])
        eigs = np.linalg.eigvals(A)
        center_re = [w.real for w in eigs if abs(w.real) < 1e-7]
        hyper_re = [w.real for w in eigs if abs(w.real) >= 1e-7]
        for h in hyper_re:
            gaps.append(abs(h) - max((abs(c) for c in center_re), default=0.0))
    return min(gaps, default=np.inf)


def cm_taylor(F, degree):
    """Compute the center-manifold jet and reduced field to `degree`.

    Requires F(0) = 0 and a clean center/hyperbolic split of the
    linearization. Exact input yields exact coefficients.
    """
    if degree > DEGREE_CAP:
        raise DegreeOverflow(f"requested degree {degree} > cap {DEGREE_CAP}")
    if F.param_dim != 0:
        raise ValueError("center-manifold jets are parameter-free here")
    rep = F.representation
    L = EndomorphismTuple.from_linearization(F)
    for v in rep.quiver.vertices:
        zero = (0,) * rep.dim[v]
        for p in F.components[v].outputs:
            if p.terms.get(zero, 0) != 0:
                raise NotEquilibrium(f"vertex {v!r}: F(0) != 0")
    center_sub, hyper_sub, projectors = center_hyperbolic_split(rep, L)
    rep = center_sub.rep  # may have been demoted to float by the split
    gap = _spectral_gap(L, center_sub, hyper_sub)
    if gap < SPECTRAL_GAP_MIN:
        raise IllConditioned(
            f"center/hyperbolic spectral gap {gap:.2e} below "
            f"{SPECTRAL_GAP_MIN:.0e}")
    exact = rep.mode == "exact" and F.is_exact()

    vertices = {}
    for v in rep.quiver.vertices:
        d = rep.dim[v]
        nc = center_sub.subdim[v]
        nh = hyper_sub.subdim[v]
        Bc, Bh = center_sub.basis[v], hyper_sub.basis[v]
        if exact:
            M = [[Bc[i][j] for j in range(nc)]
                 + [Bh[i][j] for j in range(nh)] for i in range(d)]
            Minv = exactlin.inverse(M) if d else []
        else:
            M = np.hstack([as_float_matrix(Bc).reshape(d, -1),
                           as_float_matrix(Bh).reshape(d, -1)])
            Minv = np.linalg.inv(M) if d else M
        field = _change_coords(list(F.components[v].outputs), M, Minv, exact)
        fc = field[:nc]       # center components f(u, w)
        fh = field[nc:]       # hyperbolic components g(u, w)
        # linear blocks
        zero = [0] * d

        def lin_entry(p, j):
            e = [0] * d
            e[j] = 1
            return p.terms.get(tuple(e), Fraction(0) if exact else 0.0)

        Ac = [[lin_entry(fc[i], j) for j in range(nc)] for i in range(nc)]
        Ah = [[lin_entry(fh[i], j) for j in range(nc, d)] for i in range(nh)]

        phi = [Poly.zero(nc) for _ in range(nh)]
        for dd in range(2, degree + 1):
            phi = _add_phi_degree(fc, fh, Ac, Ah, phi, nc, nh, dd, exact)
        # reduced field: f(u, phi(u)) truncated at `degree`
        subs = [Poly.variable(nc, j) for j in range(nc)] + list(phi)
        reduced = [p.compose(subs).truncate(degree) for p in fc]
        vertices[v] = VertexExpansion(nc, nh, phi, reduced, M)
    return CMExpansion(rep, degree, center_sub, hyper_sub, projectors,
                       vertices)


def _add_phi_degree(fc, fh, Ac, Ah, phi, nc, nh, dd, exact):
    """Solve the degree-dd coefficient equations for phi and append them."""
    if nh == 0 or nc == 0:
        return phi
    d = nc + nh
    subs = [Poly.variable(nc, j) for j in range(nc)] + list(phi)
    # current residual of the invariance equation
    f_at = [p.compose(subs) for p in fc]
    g_at = [p.compose(subs) for p in fh]
    resid = []
    for i in range(nh):
        acc = g_at[i]
        for j in range(nc):
            acc = acc - phi[i].diff(j) * f_at[j]
        resid.append(acc.homogeneous_part(dd))
    if all(p.is_zero() for p in resid):
        return phi
    monos = monomial_exponents(nc, dd)
    unknowns = [(i, m) for i in range(nh) for m in monos]
    N = len(unknowns)
    # linear operator on a degree-dd correction psi:
    #   T(psi) = Ah psi - D psi . (Ac u)
    cols = []
    for (i, m) in unknowns:
        psi = [Poly.zero(nc) for _ in range(nh)]
        psi[i] = Poly.monomial(nc, m)
        img = []
        for r in range(nh):
            acc = Poly.zero(nc)
            for j in range(nh):
                c = Ah[r][j]
                if c != 0:
                    acc = acc + psi[j].scale(c)
            img.append(acc)
        for r in range(nh):
            dpsi = psi[r]
            acc = img[r]
            for j in range(nc):
                lin = Poly.zero(nc)
                for l in range(nc):
                    c = Ac[j][l]
                    if c != 0:
                        lin = lin + Poly.variable(nc, l).scale(c)
                acc = acc - dpsi.diff(j) * lin
            img[r] = acc
        col = []
        for (r, mm) in unknowns:
            col.append(img[r].terms.get(mm, Fraction(0) if exact else 0.0))
        cols.append(col)
    rhs = [-resid[r].terms.get(mm, Fraction(0) if exact else 0.0)
           for (r, mm) in unknowns]
    if exact:
        T = exactlin.transpose([[Fraction(c) for c in col] for col in cols])
        try:
            sol = exactlin.solve(T, [Fraction(c) for c in rhs])
        except SolveFailed:
            raise ResonantBlock(
                f"degree-{dd} invariance operator is singular")
        if exactlin.matvec(T, sol) != [Fraction(c) for c in rhs]:
            raise ResonantBlock(
                f"degree-{dd} invariance operator is singular")
    else:
        T = np.array(cols, dtype=float).T
        try:
            sol = np.linalg.solve(T, np.array(rhs, dtype=float))
        except np.linalg.LinAlgError:
            raise ResonantBlock(f"degree-{dd} invariance operator is singular")
    new_phi = []
    for i in range(nh):
        extra = {}
        for idx, (r, m) in enumerate(unknowns):
            if r == i:
                c = sol[idx]
                c = c if exact else float(c)
                if c != 0:
                    extra[m] = c
        new_phi.append(phi[i] + Poly(nc, extra))
    return new_phi


def check_cm_equivariance(exp, tol=1e-10):
    """Coefficient-level intertwining of the jets across every arrow.

    Verifies R^h_a phi_s(u) = phi_t(R^c_a u) and
    R^c_a F^c_s(u) = F^c_t(R^c_a u), where R^c_a, R^h_a are the coordinate
    matrices of R_a on the center and hyperbolic subspaces.
    """
    rep = exp.representation
    exact = rep.mode == "exact"
    per_arrow = {}
    for a, s, t in rep.quiver.arrows:
        Cc = exp.center.coords[a]
        Ch = exp.hyperbolic.coords[a]
        vs, vt = exp.vertices[s], exp.vertices[t]
        ncs, nct = vs.center_dim, vt.center_dim
        # substitutions u_t = Cc u_s
        subs = []
        for i in range(nct):
            terms = {}
            for j in range(ncs):
                c = Cc[i][j] if exact else float(as_float_matrix(Cc)[i, j])
                if c != 0:
                    e = [0] * ncs
                    e[j] = 1
                    terms[tuple(e)] = c
            subs.append(Poly(ncs, terms))
        worst = Fraction(0) if exact else 0.0
        # hyperbolic intertwining of phi
        for i in range(vt.hyperbolic_dim):
            lhs = Poly.zero(ncs)
            for j in range(vs.hyperbolic_dim):
                c = Ch[i][j] if exact else float(as_float_matrix(Ch)[i, j])
                if c != 0:
                    lhs = lhs + vs.phi[j].scale(c)
            rhs = vt.phi[i].compose(subs)
            worst = max(worst, (lhs - rhs).max_abs_coeff())
        # center intertwining of the reduced field
        for i in range(nct):
            lhs = Poly.zero(ncs)
            for j in range(ncs):
                c = Cc[i][j] if exact else float(as_float_matrix(Cc)[i, j])
                if c != 0:
                    lhs = lhs + vs.reduced[j].scale(c)
            rhs = vt.reduced[i].compose(subs)
            worst = max(worst, (lhs - rhs).max_abs_coeff())
        per_arrow[a] = worst
    if exact:
        passed = all(w == 0 for w in per_arrow.values())
    else:
        passed = all(float(w) <= tol for w in per_arrow.values())
    from .tuples import EquivarianceReport
    return EquivarianceReport(per_arrow, passed,
                              "exact" if exact else "float", tol)


def flow_consistency(F, exp, vertex, radius=1e-2, time=1.0):
    """Compare full and reduced flows started on the jet graph.

    Integrates the full field from M (u0, phi(u0)) and the reduced field
    from u0 for `time`, measures the center-coordinate discrepancy at
    radius and radius/2, and returns (err1, err2, ratio). For a degree-k
    jet the ratio should be about 2^(k+1).
    """
    import scipy.integrate

    vd = exp.vertices[vertex]
    nc, nh = vd.center_dim, vd.hyperbolic_dim
    d = nc + nh
    M = as_float_matrix(vd.basis) if not isinstance(vd.basis, np.ndarray) \
        else vd.basis
    Minv = np.linalg.inv(M)
    full = [p.to_float() for p in F.components[vertex].outputs]
    red = [p.to_float() for p in vd.reduced]
    phi = [p.to_float() for p in vd.phi]

    def run(r):
        u0 = np.full(nc, r / np.sqrt(max(nc, 1)))
        w0 = np.array([p.eval(list(u0)) for p in phi])
        x0 = M @ np.concatenate([u0, w0])

        def f_full(_, x):
            return [p.eval(list(x)) for p in full]

        def f_red(_, u):
            return [p.eval(list(u)) for p in red]

        solf = scipy.integrate.solve_ivp(f_full, (0, time), x0,
                                         rtol=1e-12, atol=1e-14,
                                         dense_output=False)
        solr = scipy.integrate.solve_ivp(f_red, (0, time), u0,
                                         rtol=1e-12, atol=1e-14)
        uc_full = (Minv @ solf.y[:, -1])[:nc]
        return float(np.max(np.abs(uc_full - solr.y[:, -1]), initial=0.0))

    e1 = run(radius)
    e2 = run(radius / 2)
    ratio = e1 / e2 if e2 > 0 else np.inf
    return e1, e2, ratio
