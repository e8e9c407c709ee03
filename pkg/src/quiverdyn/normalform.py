"""Normal forms of equivariant polynomial tuples via Lie transforms.

Grade by grade (grade k = polynomial degree k+1), the homological equation
ad_L(G) = proj(F^k) is solved per vertex with the unique generator inside
im ad_{L^S}, and the time-1 Lie transform exp(ad_G) is applied. The
surviving grade-k terms lie in ker ad_{L^S}, i.e. they commute with the
semisimple part of the linearization. Because the generator choice is the
canonical one, equivariant input yields equivariant generators and an
equivariant normal form; verify_normal_form checks this together with the
commutation property and a numeric conjugacy spot-check.

Parameter-dependent fields are out of scope: param_dim must be zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exactlin, polyfield
from .errors import DegreeOverflow, NotEquilibrium
from .polynomial import Poly
from .quiver import as_float_matrix
from .spectral import EndomorphismTuple, sn_decomposition
from .tuples import (DEGREE_CAP, PolyMap, PolyMapTuple, bracket_polys,
                     check_equivariance)


@dataclass
class NormalFormResult:
    """Transformed tuple, per-grade generators, and residual diagnostics."""
    representation: object
    grade: int
    L: EndomorphismTuple
    LS: EndomorphismTuple
    LN: EndomorphismTuple
    transformed: PolyMapTuple            # L x + sum of normalized grades
    generators: dict                     # k -> PolyMapTuple (grade-k fields)
    kernel_residuals: dict               # k -> max residual of F_bar^k in ker

    def transformed_grade(self, k):
        """The grade-k homogeneous part of the transformed tuple."""
        comps = {}
        for v, pm in self.transformed.components.items():
            comps[v] = PolyMap([p.homogeneous_part(k + 1) for p in pm.outputs],
                               nvars=pm.nvars)
        return PolyMapTuple(self.representation, comps, 0,
                            self.transformed.max_degree)


def normal_form(F, r):
    """Normalize F through grade r (polynomial degree r+1).

    Requires F(0) = 0 and param_dim = 0. Returns the transformed tuple, the
    generators G^1..G^r, and per-grade residuals of the surviving terms
    against ker ad_{L^S}.
    """
    if F.param_dim != 0:
        raise ValueError("normal forms are computed for parameter-free tuples")
    if r + 1 > DEGREE_CAP:
        raise DegreeOverflow(f"grade {r} needs degree {r + 1} > cap")
    rep = F.representation
    for v in rep.quiver.vertices:
        zero = (0,) * rep.dim[v]
        for p in F.components[v].outputs:
            if p.terms.get(zero, 0) != 0:
                raise NotEquilibrium(f"vertex {v!r}: F(0) != 0")
    L = EndomorphismTuple.from_linearization(F)
    LS, LN = sn_decomposition(L)
    exact = F.is_exact()

    current = {v: [p.truncate(r + 1) for p in F.components[v].outputs]
               for v in rep.quiver.vertices}
    generators = {}
    kernel_residuals = {}
    for k in range(1, r + 1):
        gen_comps = {}
        worst = Fraction(0) if exact else 0.0
        for v in rep.quiver.vertices:
            d = rep.dim[v]
            if d == 0:
                gen_comps[v] = PolyMap([], nvars=0)
                continue
            Lv = [list(row) for row in L.matrices[v]] if exact else \
                np.asarray(L.matrices[v], dtype=float)
            LSv = [list(row) for row in LS.matrices[v]] if exact else \
                np.asarray(LS.matrices[v], dtype=float)
            Fk = polyfield.grade_part(current[v], k)
            G, rem = polyfield.solve_homological(Lv, LSv, Fk, k)
            gen_comps[v] = PolyMap(G, nvars=d)
            current[v] = polyfield.lie_transform(current[v], G, k, r)
            # residual of the surviving grade against ker ad_{L^S}
            adS = polyfield.ad_operator_matrix(LSv, k)
            coords = adS.basis.coords(polyfield.grade_part(current[v], k))
            if exact:
                img = exactlin.matvec(adS.matrix,
                                      [Fraction(c) for c in coords]) \
                    if adS.basis.size else []
                res = max((abs(x) for x in img), default=Fraction(0))
            else:
                img = np.asarray(adS.matrix, dtype=float) @ np.array(
                    [float(c) for c in coords])
                res = float(np.max(np.abs(img))) if img.size else 0.0
            worst = max(worst, res)
        generators[k] = PolyMapTuple(
            rep, gen_comps, 0, F.max_degree)
        kernel_residuals[k] = worst
    transformed = PolyMapTuple(
        rep, {v: PolyMap(polys, nvars=rep.dim[v] if not polys else None)
              for v, polys in current.items()}, 0, F.max_degree)
    return NormalFormResult(rep, r, L, LS, LN, transformed, generators,
                            kernel_residuals)


def verify_normal_form(res, samples=1, radius=1e-2, time=1.0,
                       conjugacy_tol=1e-6, F_original=None):
    """Check the defining properties of a computed normal form.

    Returns a dict with: per-grade [L^S, F_bar^k] residuals, equivariance
    reports for the transformed grades and the generators, and (when the
    original tuple is supplied) the numeric conjugacy error between the
    original and normalized flows through the composed generator flows.
    """
    rep = res.representation
    exact = res.transformed.is_exact()
    report = {"commutator": {}, "equivariance": {}, "conjugacy": None}
    for k in range(1, res.grade + 1):
        worst = Fraction(0) if exact else 0.0
        for v in rep.quiver.vertices:
            d = rep.dim[v]
            if d == 0:
                continue
            LSv = res.LS.matrices[v]
            LS_field = polyfield._linear_field(
                [list(row) for row in LSv] if exact else
                np.asarray(LSv, dtype=float), d)
            Fk = [p.homogeneous_part(k + 1)
                  for p in res.transformed.components[v].outputs]
            br = bracket_polys(LS_field, Fk, d, d)
            r = max((p.max_abs_coeff() for p in br),
                    default=Fraction(0) if exact else 0.0)
            worst = max(worst, r)
        report["commutator"][k] = worst
    mode = "exact" if exact else "sampled"
    for k in range(1, res.grade + 1):
        gk = check_equivariance(res.generators[k], mode=mode)
        fk = check_equivariance(res.transformed_grade(k), mode=mode)
        report["equivariance"][k] = {
            "generator": gk, "transformed_grade": fk}
    full = check_equivariance(res.transformed, mode=mode)
    report["equivariance"]["full"] = full
    if F_original is not None:
        report["conjugacy"] = _conjugacy_error(res, F_original, radius, time)
    return report


def _conjugacy_error(res, F, radius, time):
    """Numeric spot-check that the composed generator flows conjugate the
    original field to the normal form, per vertex."""
    import scipy.integrate

    rep = res.representation
    errors = {}
    for v in rep.quiver.vertices:
        d = rep.dim[v]
        if d == 0:
            errors[v] = 0.0
            continue
        orig = [p.to_float() for p in F.components[v].outputs]
        norm = [p.to_float() for p in res.transformed.components[v].outputs]
        gens = [[p.to_float() for p in res.generators[k].components[v].outputs]
                for k in range(1, res.grade + 1)]

        def flow(field, x0, t=1.0):
            def rhs(_, x):
                return [p.eval(list(x)) for p in field]
            sol = scipy.integrate.solve_ivp(rhs, (0, t), x0,
                                            rtol=1e-12, atol=1e-14)
            return sol.y[:, -1]

        def psi(x):
            y = np.asarray(x, dtype=float)
            for g in gens:
                y = flow(g, y, 1.0)
            return y

        x0 = np.full(d, radius / np.sqrt(d))
        x1 = flow(orig, x0, time)
        y0 = psi(x0)
        y1 = flow(norm, y0, time)
        errors[v] = float(np.max(np.abs(psi(x1) - y1), initial=0.0))
    return errors
