"""Endomorphisms of quiver representations and their spectral splittings.

An endomorphism tuple is a square matrix per vertex commuting with every
arrow matrix. Its per-vertex spectra are pooled into joint clusters; each
cluster carries a generalized eigenspace at every vertex, and these families
of subspaces are invariant under all arrows, i.e. subrepresentations. On top
of that sit the two complementary splittings used by the reductions
(generalized kernel vs. reduced image, and center vs. hyperbolic) and the
semisimple/nilpotent (Jordan-Chevalley) decomposition.

Exact mode factors characteristic polynomials over the rationals (linear
factors from rational roots, quadratic factors reconstructed from numeric
roots and verified by exact division); anything left unfactored stays a
single cluster, and operations that would need to separate its roots fall
back to float with a warning.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg

from . import exactlin
from .errors import (AxisAmbiguous, ClusterSplit, IllConditioned,
                     ShapeMismatch)
from .quiver import (Subrepresentation, as_float_matrix, matrix_shape)

EPS_EIG = 1e-8
EPS_AXIS = 1e-8


def _as_lists(M):
    if isinstance(M, np.ndarray):
        raise TypeError("expected exact matrix")
    return [list(row) for row in M]


class EndomorphismTuple:
    """A square matrix per vertex, intended to commute with all arrows."""

    def __init__(self, representation, matrices):
        self.representation = representation
        self.mode = representation.mode
        mats = {}
        for v in representation.quiver.vertices:
            M = matrices[v]
            d = representation.dim[v]
            if matrix_shape(M) != (d, d) and d > 0:
                raise ShapeMismatch(
                    f"vertex {v!r}: matrix shape {matrix_shape(M)} != ({d},{d})")
            if self.mode == "exact":
                mats[v] = tuple(tuple(Fraction(x) for x in row) for row in M)
            else:
                mats[v] = np.array(as_float_matrix(M), dtype=float)
        self.matrices = mats

    def matrix(self, v):
        return self.matrices[v]

    @staticmethod
    def identity(rep):
        if rep.mode == "exact":
            mats = {v: exactlin.identity(rep.dim[v]) for v in rep.quiver.vertices}
        else:
            mats = {v: np.eye(rep.dim[v]) for v in rep.quiver.vertices}
        return EndomorphismTuple(rep, mats)

    @staticmethod
    def from_linearization(F):
        """D_x F_v(0;0) per vertex (an endomorphism whenever F is
        equivariant and fixes the origin)."""
        from .tuples import linear_part
        return EndomorphismTuple(F.representation, linear_part(F))


@dataclass
class EndomorphismReport:
    per_arrow: dict
    passed: bool
    mode: str
    tol: float

    def max_residual(self):
        return max(self.per_arrow.values(), default=0)


def check_endomorphism(rep, L, tol=EPS_EIG):
    """Verify R_a L_s = L_t R_a for every arrow; per-arrow max residuals."""
    per_arrow = {}
    exact = rep.mode == "exact" and L.mode == "exact"
    for a, s, t in rep.quiver.arrows:
        R = rep.arrow_matrix[a]
        if exact:
            lhs = exactlin.matmul(_as_lists(R), _as_lists(L.matrices[s]))
            rhs = exactlin.matmul(_as_lists(L.matrices[t]), _as_lists(R))
            D = exactlin.msub(lhs, rhs)
            per_arrow[a] = max((abs(x) for row in D for x in row),
                               default=Fraction(0))
        else:
            Rn = as_float_matrix(R)
            Ls = as_float_matrix(L.matrices[s])
            Lt = as_float_matrix(L.matrices[t])
            D = Rn @ Ls - Lt @ Rn
            per_arrow[a] = float(np.max(np.abs(D))) if D.size else 0.0
    if exact:
        passed = all(r == 0 for r in per_arrow.values())
        return EndomorphismReport(per_arrow, passed, "exact", 0.0)
    passed = all(r <= tol for r in per_arrow.values())
    return EndomorphismReport(per_arrow, passed, "float", tol)


@dataclass
class SpectralCluster:
    """One joint eigenvalue cluster with per-vertex algebraic multiplicities.

    In exact mode `factor` is the monic rational factor of the
    characteristic polynomials whose roots form the cluster (coefficient
    list in increasing degree); `value` is a numeric representative
    (conjugate pairs stored once, with nonnegative imaginary part).
    Multiplicities count the factor, so a conjugate pair of multiplicity m
    spans a real subspace of dimension (deg factor) * m.
    """
    value: object
    multiplicity: dict          # vertex -> int
    is_pair: bool = False
    factor: object = None       # exact monic factor, or None in float mode
    roots: tuple = ()           # numeric roots of the factor

    def real_dim(self, v):
        deg = len(self.factor) - 1 if self.factor is not None else (
            2 if self.is_pair else 1)
        return deg * self.multiplicity.get(v, 0)


def _extract_quadratic_factors(g):
    """Split a monic rational polynomial with no rational roots into
    verified monic quadratic rational factors plus a leftover factor.

    Quadratic candidates are reconstructed from numeric root pairs and
    accepted only when exact division leaves remainder zero. The numeric
    roots are taken from the exact squarefree part, where every root is
    simple, so repeated quadratic factors do not degrade root accuracy.
    """
    factors = []
    g = exactlin.poly_trim(list(g))
    while exactlin.poly_degree(g) >= 2:
        if exactlin.poly_degree(g) == 2:
            factors.append([c / g[-1] for c in g])
            return factors, []
        sf = exactlin.poly_squarefree_part(g)
        target = sf if exactlin.poly_degree(sf) >= 2 else g
        roots = np.roots([float(c) for c in reversed(target)])
        found = False
        for mu in roots:
            p = Fraction(float(-2 * mu.real)).limit_denominator(10 ** 12)
            q = Fraction(float(abs(mu) ** 2)).limit_denominator(10 ** 12)
            cand = [q, p, Fraction(1)]
            quo, rem = exactlin.poly_divmod(g, cand)
            if not rem:
                factors.append(cand)
                g = quo
                found = True
                break
        if not found:
            break
    leftover = exactlin.poly_trim(g)
    if exactlin.poly_degree(leftover) <= 0:
        leftover = []
    return factors, [leftover] if leftover else []


def _exact_factors(L):
    """Per-vertex charpolys factored over Q into a shared factor list.

    Returns (factors, mults) where factors is a list of monic coefficient
    lists and mults[i][v] is the multiplicity of factors[i] in charpoly(L_v).
    """
    rep = L.representation
    factor_key = {}
    factors = []
    charpolys = {}
    for v in rep.quiver.vertices:
        if rep.dim[v] == 0:
            charpolys[v] = [Fraction(1)]
            continue
        p = exactlin.charpoly(_as_lists(L.matrices[v]))
        charpolys[v] = p
        roots, cofactor = exactlin.rational_roots(p)
        pieces = [[-r, Fraction(1)] for r, _ in roots]
        if exactlin.poly_degree(cofactor) >= 1:
            quads, leftovers = _extract_quadratic_factors(cofactor)
            pieces.extend(quads)
            pieces.extend(leftovers)
        for f in pieces:
            key = tuple(f)
            if key not in factor_key:
                factor_key[key] = len(factors)
                factors.append(f)
    mults = [dict() for _ in factors]
    for v in rep.quiver.vertices:
        p = charpolys.get(v, [Fraction(1)])
        for i, f in enumerate(factors):
            m = 0
            while exactlin.poly_degree(p) >= exactlin.poly_degree(f):
                quo, rem = exactlin.poly_divmod(p, f)
                if rem:
                    break
                p = quo
                m += 1
            mults[i][v] = m
    return factors, mults


def _factor_representative(f):
    """Numeric representative and root list of a monic rational factor."""
    roots = np.roots([float(c) for c in reversed(f)])
    roots = tuple(sorted((complex(r) for r in roots),
                         key=lambda z: (z.real, z.imag)))
    if len(f) == 2:  # linear: exact rational root
        return -f[0], roots, False
    rep = max(roots, key=lambda z: z.imag)
    is_pair = len(f) == 3 and (f[1] * f[1] - 4 * f[0]) < 0
    return rep, roots, is_pair


def joint_spectrum(L, tol=EPS_EIG):
    """Pool the eigenvalues of all L_v into clusters with per-vertex
    multiplicities (0 where a vertex misses the eigenvalue)."""
    rep = L.representation
    if L.mode == "exact":
        factors, mults = _exact_factors(L)
        clusters = []
        for f, m in zip(factors, mults):
            value, roots, is_pair = _factor_representative(f)
            clusters.append(SpectralCluster(value, m, is_pair, f, roots))
        clusters.sort(key=lambda c: (complex(c.value).real,
                                     complex(c.value).imag))
        return clusters
    # float mode: numeric eigenvalues, greedy clustering
    pooled = []
    for v in rep.quiver.vertices:
        if rep.dim[v] == 0:
            continue
        for w in np.linalg.eigvals(L.matrices[v]):
            w = complex(w)
            if abs(w.imag) <= tol * max(1.0, abs(w)):
                w = complex(w.real, 0.0)
            if w.imag < 0:
                continue  # conjugate pairs stored once
            pooled.append((w, v))
    pooled.sort(key=lambda t: (t[0].real, t[0].imag))
    clusters = []
    for w, v in pooled:
        placed = False
        for c in clusters:
            if abs(w - c.value) <= tol * max(1.0, abs(c.value)):
                c.multiplicity[v] = c.multiplicity.get(v, 0) + 1
                placed = True
                break
        if not placed:
            mult = {u: 0 for u in rep.quiver.vertices}
            mult[v] = 1
            clusters.append(SpectralCluster(w, mult, w.imag > 0, None, (w,)))
    for c in clusters:
        for u in rep.quiver.vertices:
            c.multiplicity.setdefault(u, 0)
    return clusters


def generalized_eigenspace_subrep(rep, L, cluster, tol=EPS_EIG):
    """The generalized eigenspace of a joint cluster at every vertex,
    packaged as a subrepresentation."""
    if L.mode == "exact" and cluster.factor is not None:
        basis = {}
        for v in rep.quiver.vertices:
            d = rep.dim[v]
            m = cluster.multiplicity.get(v, 0)
            if d == 0 or m == 0:
                basis[v] = tuple(tuple() for _ in range(d))
                continue
            fpow = [Fraction(1)]
            for _ in range(m):
                fpow = exactlin.poly_mul(fpow, cluster.factor)
            M = exactlin.eval_matrix_poly(fpow, _as_lists(L.matrices[v]))
            kern = exactlin.nullspace(M)
            want = len(cluster.factor[:-1]) * m  # deg(factor) * mult
            if len(kern) != want:
                raise ClusterSplit(
                    f"vertex {v!r}: generalized eigenspace dimension "
                    f"{len(kern)} != expected {want}")
            basis[v] = tuple(tuple(vec[i] for vec in kern) for i in range(d))
        return Subrepresentation.from_bases(rep, basis, tol)
    # float path: ordered real Schur per vertex
    rv = complex(cluster.value)

    def in_cluster(re, im):
        return abs(complex(re, abs(im)) - rv) <= 10 * tol * max(1.0, abs(rv)) \
            or abs(complex(re, -abs(im)) - rv) <= 10 * tol * max(1.0, abs(rv))

    basis = {}
    for v in rep.quiver.vertices:
        A = as_float_matrix(L.matrices[v])
        d = A.shape[0]
        if d == 0:
            basis[v] = np.zeros((0, 0))
            continue
        eigs = np.linalg.eigvals(A)
        sel = [in_cluster(w.real, w.imag) for w in eigs]
        for w, s in zip(eigs, sel):
            dist = min(abs(w - rv), abs(np.conj(w) - rv))
            if not s and dist <= 100 * tol * max(1.0, abs(rv)):
                raise ClusterSplit(
                    f"vertex {v!r}: eigenvalue {w} too close to cluster "
                    f"{rv} to separate reliably")
        T, Z, sdim = scipy.linalg.schur(A, output="real", sort=in_cluster)
        basis[v] = Z[:, :sdim]
    return Subrepresentation.from_bases(rep, basis, tol)


def _classify_clusters(L, clusters, predicate, eps, what):
    """Partition clusters by a predicate on eigenvalues; every root of a
    cluster must classify the same way, with a float-mode safety margin."""
    yes, no = [], []
    for c in clusters:
        votes = []
        for z in c.roots:
            z = complex(z)
            for w in (z, np.conj(z)):
                if c.factor is not None:
                    votes.append(predicate(w, exact_zero=_root_exact(c, w)))
                else:
                    votes.append(predicate(w, exact_zero=None))
        if all(votes):
            yes.append(c)
        elif not any(votes):
            no.append(c)
        else:
            raise AxisAmbiguous(
                f"cluster at {c.value} has roots on both sides of the "
                f"{what} split")
    return yes, no


def _root_exact(cluster, w):
    """Exact predicates about a root of an exactly known factor."""
    f = cluster.factor
    if len(f) == 2:                       # linear: root is rational
        return {"is_zero": f[0] == 0, "re_zero": f[0] == 0}
    if len(f) == 3:                       # quadratic t^2 + p t + q
        return {"is_zero": False, "re_zero": f[1] == 0}
    return None


def _split_clusters(rep, L, clusters, predicate, eps, what, tol):
    """Complementary subrepresentations and block-inverse projectors."""
    sel, rest = _classify_clusters(L, clusters, predicate, eps, what)
    sub_sel = _union_subrep(rep, L, sel, tol)
    sub_rest = _union_subrep(rep, L, rest, tol)
    projectors = {}
    exact = rep.mode == "exact" and L.mode == "exact"
    for v in rep.quiver.vertices:
        d = rep.dim[v]
        Bs, Bh = sub_sel.basis[v], sub_rest.basis[v]
        k = sub_sel.subdim[v]
        if sub_sel.subdim[v] + sub_rest.subdim[v] != d:
            raise AxisAmbiguous(
                f"vertex {v!r}: split dimensions do not add up to {d}")
        if exact:
            M = [[Bs[i][j] for j in range(k)]
                 + [Bh[i][j] for j in range(d - k)] for i in range(d)]
            Minv = exactlin.inverse(M) if d else []
            Pc = exactlin.matmul([list(r) for r in Bs],
                                 Minv[:k]) if k else exactlin.zeros(d, d)
            Ph = exactlin.msub(exactlin.identity(d), Pc)
            projectors[v] = (tuple(tuple(r) for r in Pc),
                             tuple(tuple(r) for r in Ph))
        else:
            Bs = as_float_matrix(Bs)
            Bh = as_float_matrix(Bh)
            M = np.hstack([Bs, Bh]) if d else np.zeros((0, 0))
            Minv = np.linalg.inv(M) if d else M
            Pc = Bs @ Minv[:k] if k else np.zeros((d, d))
            projectors[v] = (Pc, np.eye(d) - Pc)
    return sub_sel, sub_rest, projectors


def _union_subrep(rep, L, clusters, tol):
    """Direct sum of the generalized eigenspaces of several clusters."""
    exact = rep.mode == "exact" and L.mode == "exact"
    parts = [generalized_eigenspace_subrep(rep, L, c, tol) for c in clusters]
    basis = {}
    for v in rep.quiver.vertices:
        d = rep.dim[v]
        if exact:
            cols = []
            for S in parts:
                B = S.basis[v]
                for j in range(S.subdim[v]):
                    cols.append([B[i][j] for i in range(d)])
            basis[v] = tuple(tuple(col[i] for col in cols) for i in range(d))
        else:
            blocks = [as_float_matrix(S.basis[v]) for S in parts]
            basis[v] = np.hstack(blocks) if blocks else np.zeros((d, 0))
    return Subrepresentation.from_bases(rep, basis, tol)


def _maybe_float(L):
    """Fall back to a float endomorphism when exact factoring is partial."""
    rep = L.representation
    from .quiver import QuiverRepresentation
    frep = QuiverRepresentation(
        rep.quiver, rep.dim,
        {a: as_float_matrix(rep.arrow_matrix[a]) for a, _, _ in rep.quiver.arrows},
        mode="float")
    fl = EndomorphismTuple(
        frep, {v: as_float_matrix(L.matrices[v]) for v in rep.quiver.vertices})
    return frep, fl


def _spectrum_with_fallback(rep, L, tol):
    clusters = joint_spectrum(L, tol)
    if L.mode == "exact" and any(
            c.factor is not None and len(c.factor) > 3 for c in clusters):
        warnings.warn("characteristic polynomial did not factor over Q; "
                      "falling back to float arithmetic")
        rep, L = _maybe_float(L)
        clusters = joint_spectrum(L, tol)
    return rep, L, clusters


def center_hyperbolic_split(rep, L, eps_axis=EPS_AXIS, tol=EPS_EIG):
    """Split into the center (eigenvalues on the imaginary axis) and
    hyperbolic subrepresentations, with intertwining projectors."""
    rep, L, clusters = _spectrum_with_fallback(rep, L, tol)

    def on_axis(w, exact_zero=None):
        if exact_zero is not None:
            return exact_zero["re_zero"]
        if eps_axis <= abs(w.real) < 100 * eps_axis:
            raise AxisAmbiguous(
                f"eigenvalue {w} within the ambiguity band of the "
                "imaginary axis")
        return abs(w.real) < eps_axis

    return _split_clusters(rep, L, clusters, on_axis, eps_axis, "center", tol)


def kernel_image_split(rep, L, eps_axis=EPS_AXIS, tol=EPS_EIG):
    """Split into the generalized kernel (eigenvalue 0) and the reduced
    image, with intertwining projectors."""
    rep, L, clusters = _spectrum_with_fallback(rep, L, tol)

    def at_zero(w, exact_zero=None):
        if exact_zero is not None:
            return exact_zero["is_zero"]
        if eps_axis <= abs(w) < 100 * eps_axis:
            raise AxisAmbiguous(
                f"eigenvalue {w} within the ambiguity band of zero")
        return abs(w) < eps_axis

    return _split_clusters(rep, L, clusters, at_zero, eps_axis, "kernel", tol)


def sn_decomposition(L, tol=EPS_EIG, max_iter=50):
    """Jordan-Chevalley decomposition L = L^S + L^N per vertex.

    Exact mode runs Newton iteration on the squarefree part of the
    characteristic polynomial (quadratic convergence; terminates exactly).
    Float mode diagonalizes numerically, snaps clustered eigenvalues to
    their mean, and raises IllConditioned when the eigenbasis is too ill
    conditioned to trust.
    """
    rep = L.representation
    S_mats, N_mats = {}, {}
    for v in rep.quiver.vertices:
        d = rep.dim[v]
        if d == 0:
            S_mats[v] = L.matrices[v]
            N_mats[v] = L.matrices[v]
            continue
        if L.mode == "exact":
            A = _as_lists(L.matrices[v])
            q = exactlin.poly_squarefree_part(exactlin.charpoly(A))
            dq = exactlin.poly_deriv(q)
            S = [row[:] for row in A]
            for _ in range(max_iter):
                qS = exactlin.eval_matrix_poly(q, S)
                if exactlin.is_zero_matrix(qS):
                    break
                dqS = exactlin.eval_matrix_poly(dq, S)
                step = exactlin.solve_matrix(dqS, qS)
                S = exactlin.msub(S, step)
            else:
                raise IllConditioned(
                    f"vertex {v!r}: Newton iteration for the semisimple "
                    "part did not terminate")
            S_mats[v] = S
            N_mats[v] = exactlin.msub(A, S)
        else:
            A = as_float_matrix(L.matrices[v])
            w, V = np.linalg.eig(A)
            cond = np.linalg.cond(V)
            if cond > 1.0 / tol:
                raise IllConditioned(
                    f"vertex {v!r}: eigenbasis condition number {cond:.2e}")
            # snap clustered eigenvalues to the cluster mean
            snapped = np.array(w, dtype=complex)
            idx = sorted(range(d), key=lambda i: (w[i].real, w[i].imag))
            groups = []
            for i in idx:
                if groups and abs(w[i] - w[groups[-1][0]]) <= \
                        tol ** 0.5 * max(1.0, abs(w[i])):
                    groups[-1].append(i)
                else:
                    groups.append([i])
            for g in groups:
                mean = np.mean([w[i] for i in g])
                for i in g:
                    snapped[i] = mean
            S = V @ np.diag(snapped) @ np.linalg.inv(V)
            S = S.real
            S_mats[v] = S
            N_mats[v] = A - S
    return (EndomorphismTuple(rep, S_mats), EndomorphismTuple(rep, N_mats))
