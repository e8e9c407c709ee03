"""Polynomial map tuples over a quiver representation.

A PolyMapTuple attaches to every vertex v a polynomial map
E_v x Lambda -> E_v, stored as one Poly per output component in the
variables (x_1 .. x_{dim v}, lambda_1 .. lambda_p). Equivariance of such a
tuple means R_a o F_{s(a)} = F_{t(a)} o (R_a x id) for every arrow a; this
module checks that identity exactly (coefficient expansion) or at sampled
points, and implements the operations that preserve it: composition, Lie
bracket, and restriction to an invariant family of subspaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exactlin
from .errors import DegreeOverflow, ModeUnavailable, NotInvariant, SolveFailed
from .polynomial import Poly
from .quiver import (QuiverRepresentation, Subrepresentation, as_float_matrix,
                     matrix_shape)

DEGREE_CAP = 8
SAMPLED_DEFAULTS = {"samples": 64, "seed": 0, "tol": 1e-9}


class PolyMap:
    """A polynomial map R^{n+p} -> R^m as a tuple of Polys."""

    def __init__(self, outputs, nvars=None):
        outputs = tuple(outputs)
        if outputs:
            nvars = outputs[0].nvars
            for p in outputs:
                if p.nvars != nvars:
                    raise ValueError("output components disagree on nvars")
        elif nvars is None:
            raise ValueError("empty PolyMap needs explicit nvars")
        self.outputs = outputs
        self.nvars = nvars
        self.dim_out = len(outputs)

    def is_exact(self):
        return all(p.is_exact() for p in self.outputs)

    def degree(self):
        return max((p.degree() for p in self.outputs), default=-1)

    def eval(self, point):
        return [p.eval(point) for p in self.outputs]

    def __eq__(self, other):
        return (isinstance(other, PolyMap) and self.nvars == other.nvars
                and self.outputs == other.outputs)

    def __repr__(self):
        return f"PolyMap({self.dim_out} outputs in {self.nvars} vars)"


class PolyMapTuple:
    """One polynomial map per vertex of a quiver representation."""

    def __init__(self, representation, components, param_dim=0,
                 max_degree=DEGREE_CAP):
        self.representation = representation
        self.param_dim = int(param_dim)
        self.max_degree = int(max_degree)
        comps = {}
        for v in representation.quiver.vertices:
            pm = components[v]
            want_vars = representation.dim[v] + self.param_dim
            if pm.nvars != want_vars or pm.dim_out != representation.dim[v]:
                raise ValueError(
                    f"component at {v!r}: expected {representation.dim[v]} "
                    f"outputs in {want_vars} vars, got {pm.dim_out} in {pm.nvars}")
            comps[v] = pm
        self.components = comps

    def is_exact(self):
        return (self.representation.mode == "exact"
                and all(pm.is_exact() for pm in self.components.values()))

    def degree(self):
        return max((pm.degree() for pm in self.components.values()), default=-1)

    def map_components(self, fn):
        """Apply fn to every component Poly; returns a new tuple."""
        comps = {v: PolyMap([fn(p) for p in pm.outputs], nvars=pm.nvars)
                 for v, pm in self.components.items()}
        return PolyMapTuple(self.representation, comps, self.param_dim,
                            self.max_degree)

    def __eq__(self, other):
        return (isinstance(other, PolyMapTuple)
                and self.param_dim == other.param_dim
                and self.components == other.components)


@dataclass
class EquivarianceReport:
    per_arrow: dict
    passed: bool
    mode: str
    tol: float

    def max_residual(self):
        return max(self.per_arrow.values(), default=0)


def identity_tuple(rep, param_dim=0, max_degree=DEGREE_CAP):
    comps = {}
    for v in rep.quiver.vertices:
        n = rep.dim[v] + param_dim
        comps[v] = PolyMap([Poly.variable(n, i) for i in range(rep.dim[v])],
                           nvars=n)
    return PolyMapTuple(rep, comps, param_dim, max_degree)


def linear_tuple(rep, matrices, param_dim=0, max_degree=DEGREE_CAP):
    """The tuple x |-> L_v x from per-vertex square matrices."""
    comps = {}
    for v in rep.quiver.vertices:
        d = rep.dim[v]
        n = d + param_dim
        L = matrices[v]
        rows = []
        for i in range(d):
            terms = {}
            for j in range(d):
                e = [0] * n
                e[j] = 1
                entry = L[i][j] if not isinstance(L, np.ndarray) else float(L[i, j])
                terms[tuple(e)] = entry
            rows.append(Poly(n, terms))
        comps[v] = PolyMap(rows, nvars=n)
    return PolyMapTuple(rep, comps, param_dim, max_degree)


def _linear_substitutions(R, n_src, param_dim):
    """Polys realizing x_k := sum_j R[k][j] x_j, params passed through.

    Returns one Poly per target-side variable, each in n_src + param_dim
    variables.
    """
    nt = matrix_shape(R)[0]
    n = n_src + param_dim
    subs = []
    for k in range(nt):
        terms = {}
        for j in range(n_src):
            entry = R[k][j] if not isinstance(R, np.ndarray) else float(R[k, j])
            if entry != 0:
                e = [0] * n
                e[j] = 1
                terms[tuple(e)] = entry
        subs.append(Poly(n, terms))
    for l in range(param_dim):
        subs.append(Poly.variable(n, n_src + l))
    return subs


def equivariance_defect(F, arrow):
    """R_a o F_s - F_t o (R_a x id) as a PolyMap on the source variables."""
    rep = F.representation
    q = rep.quiver
    a = arrow
    s, t = q.source[a], q.target[a]
    R = rep.arrow_matrix[a]
    Fs, Ft = F.components[s], F.components[t]
    ns, nt = rep.dim[s], rep.dim[t]
    p = F.param_dim
    subs = _linear_substitutions(R, ns, p)
    lhs = []
    for i in range(nt):
        acc = Poly.zero(ns + p)
        for j in range(ns):
            entry = R[i][j] if not isinstance(R, np.ndarray) else float(R[i, j])
            if entry != 0:
                acc = acc + Fs.outputs[j].scale(entry)
        lhs.append(acc)
    rhs = [Ft.outputs[i].compose(subs) for i in range(nt)]
    return PolyMap([l - r for l, r in zip(lhs, rhs)], nvars=ns + p)


def check_equivariance(F, mode="exact", tol=SAMPLED_DEFAULTS["tol"],
                       samples=SAMPLED_DEFAULTS["samples"],
                       seed=SAMPLED_DEFAULTS["seed"]):
    """Verify R_a o F_s = F_t o R_a for every arrow.

    Exact mode compares polynomial coefficients and requires rational data.
    Sampled mode evaluates the defect at `samples` points drawn uniformly
    from [-1,1]^n with the given seed and reports the max residual.
    """
    if mode not in ("exact", "sampled"):
        raise ValueError("mode must be 'exact' or 'sampled'")
    rep = F.representation
    per_arrow = {}
    if mode == "exact":
        if not F.is_exact():
            raise ModeUnavailable("exact equivariance check needs rational data")
        for a, _, _ in rep.quiver.arrows:
            defect = equivariance_defect(F, a)
            per_arrow[a] = max((p.max_abs_coeff() for p in defect.outputs),
                               default=Fraction(0))
        passed = all(r == 0 for r in per_arrow.values())
        return EquivarianceReport(per_arrow, passed, "exact", 0.0)
    rng = np.random.default_rng(seed)
    for a, s, _ in rep.quiver.arrows:
        defect = equivariance_defect(F, a)
        n = rep.dim[s] + F.param_dim
        worst = 0.0
        for _ in range(samples):
            x = rng.uniform(-1.0, 1.0, size=n)
            vals = defect.eval([float(xx) for xx in x])
            if vals:
                worst = max(worst, max(abs(float(v)) for v in vals))
        per_arrow[a] = worst
    passed = all(r <= tol for r in per_arrow.values())
    return EquivarianceReport(per_arrow, passed, "sampled", tol)


def _cap_check(poly_map_degree, cap, allow_truncation, what):
    if poly_map_degree > cap and not allow_truncation:
        raise DegreeOverflow(
            f"{what} has degree {poly_map_degree} > cap {cap}; "
            "pass allow_truncation=True to truncate")


def compose_tuple(F, G, allow_truncation=False):
    """Vertex-wise composition F_v o G_v (parameters passed through)."""
    if F.representation is not G.representation and \
            F.representation.quiver != G.representation.quiver:
        raise ValueError("tuples live on different representations")
    if F.param_dim != G.param_dim:
        raise ValueError("parameter dimensions differ")
    p = F.param_dim
    cap = min(F.max_degree, G.max_degree)
    comps = {}
    for v, Fv in F.components.items():
        Gv = G.components[v]
        d = Fv.dim_out
        n = Fv.nvars
        subs = list(Gv.outputs) + [Poly.variable(n, d + l) for l in range(p)]
        outs = [Fv.outputs[i].compose(subs) for i in range(d)]
        deg = max((o.degree() for o in outs), default=-1)
        _cap_check(deg, cap, allow_truncation, f"composition at vertex {v!r}")
        comps[v] = PolyMap([o.truncate(cap) for o in outs], nvars=n)
    return PolyMapTuple(F.representation, comps, p, cap)


def bracket_polys(F_outputs, G_outputs, nvars, state_dim):
    """[F,G] = DF.G - DG.F componentwise; derivatives in state variables only."""
    out = []
    for i in range(state_dim):
        acc = Poly.zero(nvars)
        for j in range(state_dim):
            acc = acc + F_outputs[i].diff(j) * G_outputs[j]
            acc = acc - G_outputs[i].diff(j) * F_outputs[j]
        out.append(acc)
    return out


def bracket_tuple(F, G, allow_truncation=False):
    """Vertex-wise Lie bracket DF_v . G_v - DG_v . F_v."""
    if F.param_dim != G.param_dim:
        raise ValueError("parameter dimensions differ")
    cap = min(F.max_degree, G.max_degree)
    comps = {}
    for v, Fv in F.components.items():
        Gv = G.components[v]
        d = Fv.dim_out
        outs = bracket_polys(Fv.outputs, Gv.outputs, Fv.nvars, d)
        deg = max((o.degree() for o in outs), default=-1)
        _cap_check(deg, cap, allow_truncation, f"bracket at vertex {v!r}")
        comps[v] = PolyMap([o.truncate(cap) for o in outs], nvars=Fv.nvars)
    return PolyMapTuple(F.representation, comps, F.param_dim, cap)


def restrict_to_subrep(F, S, tol=1e-9):
    """Express F in the coordinates of an invariant family of subspaces.

    For each vertex, writes F_v(B_v u; lambda) = B_v \\tilde F_v(u; lambda)
    and returns the tuple of the \\tilde F_v over the coordinate
    representation of S. Raises NotInvariant when F_v's image leaves the
    subspace (coefficient-wise in exact mode, beyond tol in float mode).
    """
    rep = F.representation
    sub_rep = S.as_representation()
    p = F.param_dim
    exact = F.is_exact()
    comps = {}
    for v in rep.quiver.vertices:
        B = S.basis[v]
        d = rep.dim[v]
        k = S.subdim[v]
        n_new = k + p
        # substitute x = B u into F_v
        subs = []
        for i in range(d):
            terms = {}
            for j in range(k):
                entry = B[i][j] if not isinstance(B, np.ndarray) else float(B[i, j])
                if entry != 0:
                    e = [0] * n_new
                    e[j] = 1
                    terms[tuple(e)] = entry
            subs.append(Poly(n_new, terms))
        for l in range(p):
            subs.append(Poly.variable(n_new, k + l))
        composed = [F.components[v].outputs[i].compose(subs) for i in range(d)]
        # solve B * out = composed, monomial by monomial
        monos = sorted({e for poly in composed for e in poly.terms},
                       key=lambda e: (sum(e), e))
        outs = [dict() for _ in range(k)]
        if exact:
            Bl = [list(row) for row in B]
            for e in monos:
                rhs = [poly.terms.get(e, Fraction(0)) for poly in composed]
                try:
                    y = exactlin.solve(Bl, rhs)
                except SolveFailed:
                    raise NotInvariant(
                        f"image of component at {v!r} leaves the subspace")
                if exactlin.matvec(Bl, y) != [Fraction(c) for c in rhs]:
                    raise NotInvariant(
                        f"image of component at {v!r} leaves the subspace")
                for j in range(k):
                    if y[j] != 0:
                        outs[j][e] = y[j]
        else:
            Bn = as_float_matrix(B)
            for e in monos:
                rhs = np.array([float(poly.terms.get(e, 0)) for poly in composed])
                y, *_ = np.linalg.lstsq(Bn, rhs, rcond=None)
                resid = Bn @ y - rhs
                if resid.size and np.max(np.abs(resid)) > tol:
                    raise NotInvariant(
                        f"image of component at {v!r} leaves the subspace")
                for j in range(k):
                    if y[j] != 0.0:
                        outs[j][e] = float(y[j])
        comps[v] = PolyMap([Poly(n_new, t) for t in outs], nvars=n_new)
    return PolyMapTuple(sub_rep, comps, p, F.max_degree)


def linear_part(F):
    """D_x F_v(0;0) per vertex, in the representation's matrix mode."""
    rep = F.representation
    out = {}
    for v, pm in F.components.items():
        d = rep.dim[v]
        if rep.mode == "exact":
            L = [[Fraction(0)] * d for _ in range(d)]
        else:
            L = np.zeros((d, d))
        for i, poly in enumerate(pm.outputs):
            for j in range(d):
                e = [0] * pm.nvars
                e[j] = 1
                c = poly.terms.get(tuple(e), 0)
                if rep.mode == "exact":
                    L[i][j] = Fraction(c)
                else:
                    L[i, j] = float(c)
        out[v] = tuple(tuple(row) for row in L) if rep.mode == "exact" else L
    return out


def constant_part(F):
    """F_v(0;0) per vertex."""
    out = {}
    for v, pm in F.components.items():
        zero = (0,) * pm.nvars
        out[v] = [p.terms.get(zero, 0) for p in pm.outputs]
    return out
