"""Graded spaces of homogeneous polynomial vector fields on R^n.

Grade k holds the vector fields whose components are homogeneous of
polynomial degree k+1 (so grade 0 is linear). The module provides the
canonical monomial basis of each grade, the matrix of the adjoint operator
G |-> [L x, G] in that basis, the image/kernel splitting of ad_{L^S} used by
the normal-form homological equation, its solver, and the truncated
Lie-transform pushforward exp(ad_G).

Everything operates on a single vector space; the per-vertex assembly into
quiver tuples happens in the normal-form module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exactlin
from .errors import RankAmbiguous, SizeOverflow, SolveFailed
from .polynomial import Poly, monomial_exponents
from .tuples import bracket_polys

SIZE_CAP = 20000
RANK_THRESHOLD = 1e-10


@dataclass(frozen=True)
class HomBasis:
    """Canonical basis of the grade-k homogeneous vector fields on R^n.

    Elements are monomial-times-unit-vector fields x^m e_j, ordered first by
    output index j, then by exponent tuple in graded lexicographic order.
    """
    n: int
    k: int
    elements: tuple  # of (output index, exponent tuple)

    @property
    def size(self):
        return len(self.elements)

    def field(self, index):
        """The basis vector field at `index` as a list of Polys."""
        j, m = self.elements[index]
        polys = [Poly.zero(self.n) for _ in range(self.n)]
        polys[j] = Poly.monomial(self.n, m)
        return polys

    def coords(self, polys, strict=True):
        """Coefficient vector of a vector field in this basis.

        With strict=True, raises ValueError if the field has terms outside
        the grade (wrong degree or extra variables).
        """
        index = {elem: i for i, elem in enumerate(self.elements)}
        exact = all(p.is_exact() for p in polys)
        vec = [Fraction(0) if exact else 0.0] * self.size
        for j, p in enumerate(polys):
            for e, c in p.terms.items():
                key = (j, tuple(e))
                if key not in index:
                    if strict:
                        raise ValueError(
                            f"term {e} in output {j} is not grade {self.k}")
                    continue
                vec[index[key]] = c
        return vec

    def from_coords(self, vec):
        """The vector field with the given coefficient vector."""
        polys = [dict() for _ in range(self.n)]
        for (j, m), c in zip(self.elements, vec):
            c = c if isinstance(c, Fraction) else float(c)
            if c != 0:
                polys[j][m] = c
        return [Poly(self.n, terms) for terms in polys]


def hom_basis(n, k):
    """The canonical grade-k basis; size n * C(n+k, k+1)."""
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    monos = monomial_exponents(n, k + 1)
    if n * len(monos) > SIZE_CAP:
        raise SizeOverflow(
            f"grade-{k} basis on R^{n} has {n * len(monos)} elements "
            f"(> cap {SIZE_CAP})")
    elements = tuple((j, m) for j in range(n) for m in monos)
    return HomBasis(n, k, elements)


@dataclass
class AdMatrix:
    """Matrix of G |-> [L x, G] on a grade, in HomBasis coordinates."""
    basis: HomBasis
    matrix: object  # exact list-of-rows or numpy array
    L: object

    def is_exact(self):
        return not isinstance(self.matrix, np.ndarray)


def _matrix_key(L):
    if isinstance(L, np.ndarray):
        return ("float", L.shape, L.tobytes())
    return ("exact", tuple(tuple(Fraction(x) for x in row) for row in L))


_AD_CACHE = {}


def _linear_field(L, n):
    """The vector field x |-> L x as a list of Polys."""
    exact = not isinstance(L, np.ndarray)
    polys = []
    for i in range(n):
        terms = {}
        for j in range(n):
            c = L[i][j] if exact else float(L[i, j])
            if c != 0:
                e = [0] * n
                e[j] = 1
                terms[tuple(e)] = c
        polys.append(Poly(n, terms))
    return polys


def ad_operator_matrix(L, k):
    """The matrix of ad_{L x} restricted to grade k (columns = images of
    basis fields). Cached by matrix content."""
    exact = not isinstance(L, np.ndarray)
    n = len(L) if exact else L.shape[0]
    key = (_matrix_key(L), k)
    if key in _AD_CACHE:
        return _AD_CACHE[key]
    basis = hom_basis(n, k)
    Lx = _linear_field(L, n)
    cols = []
    for idx in range(basis.size):
        G = basis.field(idx)
        img = bracket_polys(Lx, G, n, n)
        cols.append(basis.coords(img))
    if exact:
        M = exactlin.transpose([[Fraction(c) for c in col] for col in cols])
        if not M:
            M = [[] for _ in range(basis.size)]
    else:
        M = np.array(cols, dtype=float).T if cols else np.zeros((0, 0))
    out = AdMatrix(basis, M, L)
    _AD_CACHE[key] = out
    return out


@dataclass
class ImKerSplit:
    """Complementary image/kernel pair of ad_{L^S} on one grade."""
    basis: HomBasis
    im_vectors: list    # coefficient vectors spanning im ad_{L^S}
    ker_vectors: list   # coefficient vectors spanning ker ad_{L^S}
    proj_im: object     # projector onto im along ker, in basis coords


def im_ker_split_adLS(LS, k, tol=RANK_THRESHOLD):
    """im/ker of ad_{L^S} on grade k, with the oblique projector onto im.

    Requires L^S semisimple, so that the two subspaces are complementary;
    complementarity is verified and a failure raises RankAmbiguous.
    """
    ad = ad_operator_matrix(LS, k)
    N = ad.basis.size
    if ad.is_exact():
        A = ad.matrix
        im = exactlin.column_space_basis(A)
        ker = exactlin.nullspace(A)
        if len(im) + len(ker) != N:
            raise RankAmbiguous(
                "image and kernel of ad_{L^S} are not complementary; "
                "is L^S semisimple?")
        cols = [list(v) for v in im] + [list(v) for v in ker]
        M = exactlin.transpose(cols) if cols else []
        Minv = exactlin.inverse(M) if N else []
        r = len(im)
        if r:
            Bim = exactlin.transpose([list(v) for v in im])
            P = exactlin.matmul(Bim, Minv[:r])
        else:
            P = exactlin.zeros(N, N)
        return ImKerSplit(ad.basis, im, ker, P)
    A = ad.matrix
    if N == 0:
        return ImKerSplit(ad.basis, [], [], np.zeros((0, 0)))
    U, s, Vt = np.linalg.svd(A)
    smax = s[0] if s.size else 0.0
    thr = tol * max(smax, 1.0)
    near = [x for x in s if 0.1 * thr < x < 10 * thr]
    if near:
        raise RankAmbiguous(
            f"singular values {near} near the rank threshold {thr:.2e}")
    r = int(np.sum(s > thr))
    im = [U[:, i].copy() for i in range(r)]
    ker = [Vt[i, :].copy() for i in range(r, N)]
    M = np.column_stack(im + ker) if (im or ker) else np.zeros((N, 0))
    Minv = np.linalg.inv(M)
    P = (np.column_stack(im) @ Minv[:r]) if r else np.zeros((N, N))
    return ImKerSplit(ad.basis, im, ker, P)


def solve_homological(L, LS, Fk, k, tol=RANK_THRESHOLD):
    """Solve ad_L(G) = proj_im(F) for the unique G in im ad_{L^S}.

    Fk is a vector field (list of Polys) homogeneous of grade k. Returns
    (G, remainder) with remainder = Fk - ad_L(G) lying in ker ad_{L^S}.
    """
    split = im_ker_split_adLS(LS, k, tol)
    basis = split.basis
    f = basis.coords(Fk)
    adL = ad_operator_matrix(L, k)
    r = len(split.im_vectors)
    if adL.is_exact():
        fi = exactlin.matvec(split.proj_im, [Fraction(c) for c in f]) \
            if basis.size else []
        if r == 0:
            g = [Fraction(0)] * basis.size
        else:
            Bim = exactlin.transpose([list(v) for v in split.im_vectors])
            ABim = exactlin.matmul(adL.matrix, Bim)
            y = exactlin.solve(ABim, fi)
            if exactlin.matvec(ABim, y) != fi:
                raise SolveFailed(
                    "restricted homological system is inconsistent")
            g = exactlin.matvec(Bim, y)
        Ag = exactlin.matvec(adL.matrix, g) if basis.size else []
        rem = [a - b for a, b in zip([Fraction(c) for c in f], Ag)]
    else:
        fvec = np.array([float(c) for c in f])
        fi = split.proj_im @ fvec
        if r == 0:
            g = np.zeros(basis.size)
        else:
            Bim = np.column_stack(split.im_vectors)
            ABim = np.asarray(adL.matrix, dtype=float) @ Bim
            y, *_ = np.linalg.lstsq(ABim, fi, rcond=None)
            resid = ABim @ y - fi
            scale = max(1.0, float(np.max(np.abs(fi))) if fi.size else 1.0)
            if resid.size and np.max(np.abs(resid)) > 1e-10 * scale:
                raise SolveFailed(
                    f"restricted homological solve residual "
                    f"{np.max(np.abs(resid)):.2e}")
            g = Bim @ y
        rem = fvec - np.asarray(adL.matrix, dtype=float) @ g
    G = basis.from_coords(list(g))
    R = basis.from_coords(list(rem))
    return G, R


def lie_transform(F, G, k, r):
    """Truncated pushforward exp(ad_G) F of a vector field.

    F is a list of Polys (mixed degrees up to r+1); G is homogeneous of
    grade k >= 1. The series terminates within the truncation because each
    bracket with G raises the grade by k; output is truncated at polynomial
    degree r+1.
    """
    if k < 1:
        raise ValueError("generator grade must be >= 1")
    n = len(F)
    maxdeg = r + 1
    exact = all(p.is_exact() for p in F) and all(p.is_exact() for p in G)
    total = [p.truncate(maxdeg) for p in F]
    term = list(F)
    i = 0
    while True:
        i += 1
        if i * k > r:
            break
        term = bracket_polys(G, term, n, n)
        term = [p.truncate(maxdeg) for p in term]
        if all(p.is_zero() for p in term):
            break
        fact = Fraction(1)
        for j in range(1, i + 1):
            fact *= j
        coeff = Fraction(1, 1) / fact if exact else 1.0 / float(fact)
        total = [t + p.scale(coeff) for t, p in zip(total, term)]
    return total


def grade_part(polys, k):
    """The grade-k (degree k+1) homogeneous part of a vector field."""
    return [p.homogeneous_part(k + 1) for p in polys]
