"""Quivers, their representations, and invariant families of subspaces.

A quiver is a finite directed multigraph. A representation attaches a
vector-space dimension to every vertex and a matrix of the right shape to
every arrow. Matrices come in two modes: "exact" (nested tuples of Fraction)
and "float" (numpy arrays); the mode is fixed per representation and every
comparison in float mode carries a tolerance.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import exactlin
from .errors import DanglingArrow, NotInvariant, ShapeMismatch, SolveFailed

DEFAULT_TOL = 1e-9


def _freeze_exact(matrix):
    return tuple(tuple(Fraction(x) for x in row) for row in matrix)


def as_float_matrix(matrix):
    """Convert an exact or float matrix to a numpy array."""
    if isinstance(matrix, np.ndarray):
        return matrix
    return np.array([[float(x) for x in row] for row in matrix], dtype=float)


def matrix_shape(matrix):
    if isinstance(matrix, np.ndarray):
        return matrix.shape
    return (len(matrix), len(matrix[0]) if len(matrix) else 0)


class Quiver:
    """Finite directed multigraph with string vertex and arrow ids."""

    def __init__(self, vertices, arrows):
        vertices = tuple(sorted(str(v) for v in vertices))
        arrows = tuple(sorted((str(a), str(s), str(t)) for a, s, t in arrows))
        if len(set(vertices)) != len(vertices):
            raise ValueError("duplicate vertex ids")
        if len({a for a, _, _ in arrows}) != len(arrows):
            raise ValueError("duplicate arrow ids")
        vset = set(vertices)
        for a, s, t in arrows:
            if s not in vset or t not in vset:
                raise DanglingArrow(f"arrow {a!r}: {s!r} -> {t!r} not in vertices")
        self.vertices = vertices
        self.arrows = arrows
        self.source = {a: s for a, s, t in arrows}
        self.target = {a: t for a, s, t in arrows}

    def arrow_ids(self):
        return [a for a, _, _ in self.arrows]

    def __eq__(self, other):
        return (isinstance(other, Quiver) and self.vertices == other.vertices
                and self.arrows == other.arrows)

    def __repr__(self):
        return f"Quiver({len(self.vertices)} vertices, {len(self.arrows)} arrows)"


class QuiverRepresentation:
    """Per-vertex dimensions and per-arrow matrices over a quiver."""

    def __init__(self, quiver, dim, arrow_matrix, mode="exact"):
        if mode not in ("exact", "float"):
            raise ValueError("mode must be 'exact' or 'float'")
        self.quiver = quiver
        self.dim = {str(v): int(d) for v, d in dim.items()}
        self.mode = mode
        mats = {}
        for a, m in arrow_matrix.items():
            if mode == "exact":
                mats[str(a)] = _freeze_exact(m)
            else:
                mats[str(a)] = np.array(as_float_matrix(m), dtype=float)
        self.arrow_matrix = mats

    def matrix(self, arrow_id):
        return self.arrow_matrix[arrow_id]

    def __repr__(self):
        return (f"QuiverRepresentation({self.quiver!r}, mode={self.mode!r})")


def validate_representation(rep):
    """Check shape and id invariants; returns a list of error strings.

    Raises nothing: an empty list means the representation is valid. Use
    this for report generation; constructors already raise on dangling
    arrows.
    """
    errors = []
    q = rep.quiver
    for v in q.vertices:
        if v not in rep.dim:
            errors.append(f"missing dimension for vertex {v!r}")
        elif rep.dim[v] < 0:
            errors.append(f"negative dimension at vertex {v!r}")
    for a, s, t in q.arrows:
        if a not in rep.arrow_matrix:
            errors.append(f"missing matrix for arrow {a!r}")
            continue
        got = matrix_shape(rep.arrow_matrix[a])
        want = (rep.dim.get(t, -1), rep.dim.get(s, -1))
        if want[0] == 0 and got[0] == 0:
            continue  # zero-row matrices carry no column information
        if got != want:
            errors.append(
                f"arrow {a!r}: matrix shape {got} != dim(t) x dim(s) = {want}")
    return errors


def require_valid(rep):
    errors = validate_representation(rep)
    if errors:
        raise ShapeMismatch("; ".join(errors))


class Subrepresentation:
    """A family of subspaces (one per vertex) invariant under all arrows.

    basis[v] is a dim(v) x k_v matrix whose columns span the subspace at v;
    coords[a] is the k_t x k_s matrix with R_a B_s = B_t C_a.
    """

    def __init__(self, rep, basis, coords):
        self.rep = rep
        self.basis = basis
        self.coords = coords
        self.subdim = {v: matrix_shape(b)[1] for v, b in basis.items()}

    @staticmethod
    def from_bases(rep, basis, tol=DEFAULT_TOL):
        """Build coordinate matrices from per-vertex bases.

        Exact mode solves B_t C = R_a B_s exactly and raises NotInvariant on
        inconsistency; float mode uses least squares and checks the residual
        against tol.
        """
        coords = {}
        for a, s, t in rep.quiver.arrows:
            R = rep.arrow_matrix[a]
            Bs, Bt = basis[s], basis[t]
            ks = matrix_shape(Bs)[1]
            kt = matrix_shape(Bt)[1]
            if ks == 0:
                if rep.mode == "exact":
                    coords[a] = tuple(tuple() for _ in range(kt))
                else:
                    coords[a] = np.zeros((kt, 0))
                continue
            if rep.mode == "exact":
                RBs = exactlin.matmul([list(r) for r in R],
                                      [list(r) for r in Bs])
                if kt == 0:
                    if any(x != 0 for row in RBs for x in row):
                        raise NotInvariant(f"arrow {a!r} leaves the subspace")
                    coords[a] = tuple()  # 0 x ks
                    continue
                try:
                    C = exactlin.solve_matrix([list(r) for r in Bt], RBs)
                except SolveFailed:
                    raise NotInvariant(f"arrow {a!r} leaves the subspace")
                # solve_matrix zero-fills free variables; verify exactly
                if exactlin.matmul([list(r) for r in Bt], C) != RBs:
                    raise NotInvariant(f"arrow {a!r} leaves the subspace")
                coords[a] = _freeze_exact(C)
            else:
                Rn = as_float_matrix(R)
                Bsn = as_float_matrix(Bs)
                Btn = as_float_matrix(Bt)
                RBs = Rn @ Bsn
                if kt == 0:
                    if RBs.size and np.max(np.abs(RBs)) > tol:
                        raise NotInvariant(f"arrow {a!r} leaves the subspace")
                    coords[a] = np.zeros((0, ks))
                    continue
                C, *_ = np.linalg.lstsq(Btn, RBs, rcond=None)
                resid = Btn @ C - RBs
                if resid.size and np.max(np.abs(resid)) > tol:
                    raise NotInvariant(
                        f"arrow {a!r} leaves the subspace "
                        f"(residual {np.max(np.abs(resid)):.2e})")
                coords[a] = C
        return Subrepresentation(rep, dict(basis), coords)

    def as_representation(self):
        """The subspaces with their coordinate matrices as a representation."""
        return QuiverRepresentation(self.rep.quiver, self.subdim, self.coords,
                                    mode=self.rep.mode)

    @staticmethod
    def full(rep):
        """The whole representation as a subrepresentation (identity bases)."""
        if rep.mode == "exact":
            basis = {v: _freeze_exact(exactlin.identity(rep.dim[v]))
                     for v in rep.quiver.vertices}
            coords = dict(rep.arrow_matrix)
        else:
            basis = {v: np.eye(rep.dim[v]) for v in rep.quiver.vertices}
            coords = dict(rep.arrow_matrix)
        return Subrepresentation(rep, basis, coords)

    @staticmethod
    def zero(rep):
        """The zero subspace at every vertex."""
        if rep.mode == "exact":
            basis = {v: tuple(tuple() for _ in range(rep.dim[v]))
                     for v in rep.quiver.vertices}
            coords = {a: tuple() for a, _, _ in rep.quiver.arrows}
        else:
            basis = {v: np.zeros((rep.dim[v], 0)) for v in rep.quiver.vertices}
            coords = {a: np.zeros((0, 0)) for a, _, _ in rep.quiver.arrows}
        return Subrepresentation(rep, basis, coords)
