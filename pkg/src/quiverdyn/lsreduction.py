"""Lyapunov-Schmidt reduction of equivariant steady-state problems.

Given a parameterized polynomial tuple F with F(base; lam0) = 0, the
linearization splits every vertex space into the generalized kernel and the
reduced image of L = D_x F(base; lam0), and the image-block equation is
solved by damped Newton iteration to produce the implicit graph map
phi_v(u; lam). Substituting back yields the reduced bifurcation map f_v on
the kernel coordinates; when F is quiver-equivariant, the reduced tuple is
again equivariant, which check_reduced_equivariance verifies by sampling.

Branches of a one-parameter reduced equation are traced on a logarithmic
parameter window and classified by leading exponent (lam or sqrt(lam)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (DomainTooSmall, NewtonDiverged, NotEquilibrium,
                     SingularImageBlock)
from .polynomial import Poly
from .quiver import as_float_matrix
from .spectral import EndomorphismTuple, kernel_image_split

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50
EQUILIBRIUM_TOL = 1e-10
FD_STEP = 1e-5
BRANCH_WINDOW = (1e-4, 1e-2)
BRANCH_POINTS = 20
FIT_R2_MIN = 0.999


def _float_polys(polys):
    return [p.to_float() for p in polys]


@dataclass
class VertexReduction:
    """Per-vertex data of a Lyapunov-Schmidt reduction (float arithmetic)."""
    dim: int
    ker_dim: int
    basis: np.ndarray          # [B_ker | B_im], dim x dim
    basis_inv: np.ndarray
    coord_field: list          # Polys of z |-> M^{-1} F(M z + base; lam0 + lam)
    jacobian: list             # list of lists of Polys, d(coord_field)/dz
    radius: float


@dataclass
class LSReduction:
    """Evaluator-backed reduction onto the generalized kernel coordinates."""
    representation: object
    param_dim: int
    kernel: object             # Subrepresentation
    image: object              # Subrepresentation
    projectors: dict
    vertex_data: dict          # vertex -> VertexReduction
    newton_tol: float = NEWTON_TOL
    newton_max_iter: int = NEWTON_MAX_ITER

    def kernel_dim(self, v):
        return self.vertex_data[v].ker_dim

    def phi(self, v, u, lam):
        """Image-block coordinates w solving the eliminated equations."""
        vd = self.vertex_data[v]
        m = vd.ker_dim
        h = vd.dim - m
        u = np.asarray(u, dtype=float)
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        w = np.zeros(h)
        for _ in range(self.newton_max_iter):
            z = np.concatenate([u, w, lam])
            gvals = np.array([p.eval(list(z)) for p in vd.coord_field])
            res = gvals[m:]
            if np.max(np.abs(res), initial=0.0) <= self.newton_tol:
                return w
            J = np.array([[vd.jacobian[i][j].eval(list(z))
                           for j in range(m, vd.dim)]
                          for i in range(m, vd.dim)])
            try:
                step = np.linalg.solve(J, res)
            except np.linalg.LinAlgError:
                raise NewtonDiverged(
                    f"vertex {v!r}: singular image-block Jacobian at "
                    f"u={u.tolist()}, lam={lam.tolist()}")
            # damped step, clamped to the neighbourhood radius
            alpha = 1.0
            norm0 = np.max(np.abs(res))
            while alpha > 1e-4:
                cand = w - alpha * step
                if np.max(np.abs(cand), initial=0.0) > vd.radius:
                    alpha *= 0.5
                    continue
                z2 = np.concatenate([u, cand, lam])
                res2 = np.array([p.eval(list(z2))
                                 for p in vd.coord_field])[m:]
                if np.max(np.abs(res2), initial=0.0) < norm0 or \
                        np.max(np.abs(res2), initial=0.0) <= self.newton_tol:
                    w = cand
                    break
                alpha *= 0.5
            else:
                raise NewtonDiverged(
                    f"vertex {v!r}: damping failed at u={u.tolist()}")
        raise NewtonDiverged(
            f"vertex {v!r}: no convergence in {self.newton_max_iter} steps")

    def reduced_eval(self, v, u, lam):
        """The reduced bifurcation map f_v(u; lam) on kernel coordinates."""
        vd = self.vertex_data[v]
        m = vd.ker_dim
        u = np.asarray(u, dtype=float)
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        w = self.phi(v, u, lam)
        z = np.concatenate([u, w, lam])
        return np.array([p.eval(list(z)) for p in vd.coord_field[:m]])

    def lift(self, v, u, lam):
        """The full-space point x = base-shifted M (u, phi(u; lam))."""
        vd = self.vertex_data[v]
        w = self.phi(v, u, lam)
        return vd.basis @ np.concatenate([np.asarray(u, dtype=float), w])

    def kernel_matrix(self, a):
        """Float coordinate matrix of arrow a on the kernel subspaces."""
        q = self.representation.quiver
        mt = self.kernel_dim(q.target[a])
        ms = self.kernel_dim(q.source[a])
        return as_float_matrix(self.kernel.coords[a]).reshape(mt, ms)


def ls_reduce(F, base=None, lam0=None, radius=None):
    """Build the Lyapunov-Schmidt reduction of F at an equilibrium.

    base is a per-vertex point (default 0), lam0 the parameter value
    (default 0). Requires F(base; lam0) = 0 within 1e-10 at every vertex.
    """
    rep = F.representation
    p = F.param_dim
    if base is None:
        base = {v: np.zeros(rep.dim[v]) for v in rep.quiver.vertices}
    if lam0 is None:
        lam0 = np.zeros(p)
    lam0 = np.atleast_1d(np.asarray(lam0, dtype=float))

    # equilibrium check and linearization at (base; lam0)
    L_mats = {}
    for v in rep.quiver.vertices:
        d = rep.dim[v]
        bx = np.asarray(base[v], dtype=float)
        pt = list(np.concatenate([bx, lam0]))
        polys = _float_polys(F.components[v].outputs)
        vals = np.array([q.eval(pt) for q in polys])
        if vals.size and np.max(np.abs(vals)) > EQUILIBRIUM_TOL:
            raise NotEquilibrium(
                f"vertex {v!r}: |F(base; lam0)| = {np.max(np.abs(vals)):.2e}")
        L_mats[v] = np.array([[polys[i].diff(j).eval(pt) for j in range(d)]
                              for i in range(d)])

    shifted_exact = all(float(x) == 0.0 for v in rep.quiver.vertices
                        for x in np.atleast_1d(base[v])) and \
        all(float(x) == 0.0 for x in lam0)
    if rep.mode == "exact" and shifted_exact:
        L = EndomorphismTuple(rep, {v: [[x for x in row] for row in M]
                                    for v, M in L_mats.items()})
    else:
        from .quiver import QuiverRepresentation
        rep_f = QuiverRepresentation(
            rep.quiver, rep.dim,
            {a: as_float_matrix(rep.arrow_matrix[a])
             for a, _, _ in rep.quiver.arrows}, mode="float")
        L = EndomorphismTuple(rep_f, L_mats)
        rep = rep_f
    ker_sub, im_sub, projectors = kernel_image_split(rep, L)

    vertex_data = {}
    for v in rep.quiver.vertices:
        d = rep.dim[v]
        m = ker_sub.subdim[v]
        Bk = as_float_matrix(ker_sub.basis[v])
        Bi = as_float_matrix(im_sub.basis[v])
        M = np.hstack([Bk.reshape(d, -1), Bi.reshape(d, -1)]) if d else \
            np.zeros((0, 0))
        Minv = np.linalg.inv(M) if d else M
        # field in split coordinates, shifted to the equilibrium
        polys = _float_polys(F.components[v].outputs)
        nvars = d + p
        shift = []
        bx = np.asarray(base[v], dtype=float)
        for i in range(d):
            terms = {}
            for j in range(d):
                if M[i, j] != 0.0:
                    e = [0] * nvars
                    e[j] = 1
                    terms[tuple(e)] = float(M[i, j])
            if bx[i] != 0.0:
                terms[(0,) * nvars] = float(bx[i])
            shift.append(Poly(nvars, terms))
        for l in range(p):
            terms = {tuple(int(t == d + l) for t in range(nvars)): 1.0}
            if lam0[l] != 0.0:
                terms[(0,) * nvars] = float(lam0[l])
            shift.append(Poly(nvars, terms))
        composed = [q.compose(shift) for q in polys]
        coord_field = []
        for i in range(d):
            acc = Poly.zero(nvars)
            for j in range(d):
                if Minv[i, j] != 0.0:
                    acc = acc + composed[j].scale(float(Minv[i, j]))
            coord_field.append(acc)
        jac = [[coord_field[i].diff(j) for j in range(d)] for i in range(d)]
        # image block of the linearization must be invertible
        z0 = [0.0] * nvars
        if d - m:
            Jw = np.array([[jac[i][j].eval(z0) for j in range(m, d)]
                           for i in range(m, d)])
            sv = np.linalg.svd(Jw, compute_uv=False)
            if sv[-1] <= 1e-12 * max(1.0, sv[0]):
                raise SingularImageBlock(
                    f"vertex {v!r}: image-block Jacobian is singular")
            r_v = radius if radius is not None else \
                0.1 / max(1.0, np.linalg.norm(np.linalg.inv(Jw)))
        else:
            r_v = radius if radius is not None else 0.1
        vertex_data[v] = VertexReduction(d, m, M, Minv, coord_field, jac, r_v)
    return LSReduction(rep, p, ker_sub, im_sub, projectors, vertex_data)


def check_reduced_equivariance(red, samples=100, tol=1e-8, radius=None,
                               seed=0):
    """Sample R_a f_s(u; lam) - f_t(R_a u; lam) over a common ball.

    Halves the sampling radius on Newton failures; raises DomainTooSmall
    below 1e-6.
    """
    rep = red.representation
    rng = np.random.default_rng(seed)
    if radius is None:
        radius = 0.1 * min(vd.radius for vd in red.vertex_data.values())
    per_arrow = {}
    for a, s, t in rep.quiver.arrows:
        C = red.kernel_matrix(a)
        m_s = red.kernel_dim(s)
        worst = 0.0
        r = radius
        done = 0
        while done < samples:
            u = rng.uniform(-r, r, size=m_s)
            lam = rng.uniform(-r, r, size=red.param_dim)
            try:
                lhs = C @ red.reduced_eval(s, u, lam) if m_s else \
                    np.zeros(red.kernel_dim(t))
                rhs = red.reduced_eval(t, C @ u, lam)
            except NewtonDiverged:
                r *= 0.5
                if r < 1e-6:
                    raise DomainTooSmall(
                        f"arrow {a!r}: no common neighbourhood above 1e-6")
                continue
            if lhs.size:
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
            done += 1
        per_arrow[a] = worst
    passed = all(w <= tol for w in per_arrow.values())
    from .tuples import EquivarianceReport
    return EquivarianceReport(per_arrow, passed, "sampled", tol)


def reduced_cross_derivative(red, v, i, j, h=FD_STEP):
    """Central finite-difference d f_i / d u_j of the reduced map at 0."""
    m = red.kernel_dim(v)
    lam = np.zeros(red.param_dim)
    e = np.zeros(m)
    e[j] = h
    fp = red.reduced_eval(v, e, lam)
    fm = red.reduced_eval(v, -e, lam)
    return float((fp[i] - fm[i]) / (2 * h))


@dataclass
class Branch:
    """One solution branch of a reduced 1-parameter bifurcation problem."""
    points: list               # of (lam, root array)
    exponents: list = field(default_factory=list)   # per coordinate: 1, 0.5, 0, or None
    coefficients: list = field(default_factory=list)
    r_squared: float = 1.0
    classified: bool = True


def _roots_at(red, v, lam, seeds_per_axis=9, scale=None, tol=1e-9):
    """Distinct zeros of f_v(.; lam) found by Newton from a seed grid."""
    m = red.kernel_dim(v)
    if scale is None:
        scale = 5.0 * math.sqrt(abs(lam))
    axes = [np.linspace(-scale, scale, seeds_per_axis)] * m
    roots = []
    for seed in np.array(np.meshgrid(*axes)).reshape(m, -1).T if m else []:
        u = np.array(seed, dtype=float)
        ok = False
        for _ in range(NEWTON_MAX_ITER):
            try:
                fval = red.reduced_eval(v, u, [lam])
            except NewtonDiverged:
                break
            if np.max(np.abs(fval), initial=0.0) <= 1e-12:
                ok = True
                break
            J = np.zeros((m, m))
            h = 1e-7 * max(1.0, np.max(np.abs(u)))
            for j in range(m):
                e = np.zeros(m)
                e[j] = h
                try:
                    J[:, j] = (red.reduced_eval(v, u + e, [lam])
                               - red.reduced_eval(v, u - e, [lam])) / (2 * h)
                except NewtonDiverged:
                    break
            try:
                step = np.linalg.solve(J, fval)
            except np.linalg.LinAlgError:
                break
            if np.max(np.abs(step)) > 10 * scale:
                break
            u = u - step
        if not ok or np.max(np.abs(u), initial=0.0) > 2 * scale:
            continue
        if all(np.max(np.abs(u - r), initial=0.0) > tol + 1e-6 * scale
               for r in roots):
            roots.append(u)
    roots.sort(key=lambda r: tuple(np.round(r / max(scale, 1e-12), 6)))
    return roots


def find_branches_1param(red, vertex, lam_range=BRANCH_WINDOW,
                         grid=BRANCH_POINTS):
    """Trace and classify branches of the reduced equation at one vertex.

    Zeros are found on `grid` log-spaced parameter values in lam_range,
    linked by continuation from large to small lam, and classified per
    coordinate by a log-log fit with exponents restricted to {1, 1/2};
    coordinates below noise level are reported as identically zero.
    """
    if red.param_dim != 1:
        raise ValueError("branch tracing requires exactly one parameter")
    m = red.kernel_dim(vertex)
    if m > 3:
        raise ValueError("branch tracing supports kernel dimension <= 3")
    lams = np.geomspace(lam_range[0], lam_range[1], grid)[::-1]
    branches = []
    for li, lam in enumerate(lams):
        roots = _roots_at(red, vertex, float(lam))
        used = [False] * len(roots)
        if li == 0:
            for r in roots:
                branches.append(Branch(points=[(float(lam), r)]))
            continue
        for b in branches:
            lam_prev, r_prev = b.points[-1]
            ratio = lam / lam_prev
            preds = [r_prev * ratio, r_prev * math.sqrt(ratio)]
            best, best_d = None, np.inf
            for idx, r in enumerate(roots):
                if used[idx]:
                    continue
                d = min(np.max(np.abs(r - pr), initial=0.0) for pr in preds)
                if d < best_d:
                    best, best_d = idx, d
            if best is not None and best_d <= 0.5 * math.sqrt(lam) + 1e-9:
                b.points.append((float(lam), roots[best]))
                used[best] = True
        for idx, r in enumerate(roots):
            if not used[idx]:
                branches.append(Branch(points=[(float(lam), r)]))
    # classify
    out = []
    for b in branches:
        if len(b.points) < grid // 2:
            continue
        ls = np.array([p[0] for p in b.points])
        xs = np.array([p[1] for p in b.points])
        exps, coefs, worst_r2 = [], [], 1.0
        for j in range(m):
            col = np.abs(xs[:, j])
            if np.max(col, initial=0.0) <= 1e-7:
                exps.append(0)
                coefs.append(0.0)
                continue
            mask = col > 1e-12
            if np.sum(mask) < 3:
                exps.append(None)
                coefs.append(None)
                worst_r2 = 0.0
                continue
            lx, ly = np.log(ls[mask]), np.log(col[mask])
            q, c = np.polyfit(lx, ly, 1)
            resid = ly - (q * lx + c)
            ss_tot = np.sum((ly - np.mean(ly)) ** 2)
            r2 = 1.0 - np.sum(resid ** 2) / ss_tot if ss_tot > 0 else 1.0
            worst_r2 = min(worst_r2, r2)
            if abs(q - 1.0) < 0.1:
                exps.append(1)
                coefs.append(float(np.mean(xs[mask, j] / ls[mask])))
            elif abs(q - 0.5) < 0.1:
                exps.append(0.5)
                coefs.append(float(np.mean(xs[mask, j] / np.sqrt(ls[mask]))))
            else:
                exps.append(None)
                coefs.append(float(math.exp(c)))
        b.exponents = exps
        b.coefficients = coefs
        b.r_squared = worst_r2
        b.classified = worst_r2 >= FIT_R2_MIN and all(
            e is not None for e in exps)
        out.append(b)
    out.sort(key=lambda b: tuple(
        (e if e is not None else 9, round(c, 6) if c is not None else 0.0)
        for e, c in zip(b.exponents, b.coefficients)))
    return out
