"""Riemannian geometry of alpha and covariant calculus of beta at a chart point.

Everything here is exact differentiation: the metric components are
evaluated as order-2 jets in the chart coordinates, so first and second
partials of a_ij and b_i carry no finite-difference noise.  From those the
bundle holds, as plain ndarrays,

* ``gamma[i, j, k]``  = Gamma^i_jk (Christoffel symbols),
* ``dgamma[i, j, k, l]`` = d Gamma^i_jk / dx^l,
* ``riem4[i, j, k, l]`` = R^i_jkl = d_k Gamma^i_jl - d_l Gamma^i_jk
  + Gamma^i_km Gamma^m_jl - Gamma^i_lm Gamma^m_jk,
* ``Db[i, j]`` = b_i|j,  ``D2b[i, j, k]`` = b_i|j|k,
* the symmetric/antisymmetric split r/s of Db and all its b- and
  index-raised contractions,

plus order-2 jet lifts of the x-dependent fields (Christoffels, r, s, ...)
in a 2n-direction space (x directions 0..n-1, y directions n..2n-1) so the
deformed spray can be assembled and differentiated jet-wise.  Those lifted
field jets carry exact values and exact first x-derivatives; their pure
x-x second derivatives would need third derivatives of the metric and are
deliberately zero.  No curvature formula reads them: the Riemann operator
needs at most one x-derivative of the spray.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .dsl import MetricSpec
from .jets import Jet, JetError

__all__ = [
    "GeometryError",
    "AlphaBetaBundle",
    "build_bundle",
    "covariant_b",
    "bianchi_check",
    "horizontal_derivative",
    "alpha_spray_jets",
    "christoffels_fd",
    "det_jet",
]


class GeometryError(ValueError):
    """Point outside the domain box, singular or non-positive-definite a(x)."""


def _field_jet(value: float, xgrad: np.ndarray, n: int) -> Jet:
    # Lift an x-dependent scalar field into the 2n-direction jet space from
    # its value and exact first x-derivatives.  y-derivatives are truly zero;
    # the x-x Hessian is truncated (see module docstring).
    d = 2 * n
    g = np.zeros(d)
    g[:n] = xgrad
    return Jet(value, g, np.zeros(d * (d + 1) // 2))


@dataclass
class AlphaBetaBundle:
    """All alpha-side geometry at one chart point."""

    spec: MetricSpec
    x: np.ndarray
    n: int
    # metric data and raw partials
    a: np.ndarray
    a_inv: np.ndarray
    dA: np.ndarray
    d2A: np.ndarray
    b: np.ndarray
    db: np.ndarray
    d2b: np.ndarray
    # connection and curvature of alpha
    gamma: np.ndarray
    dgamma: np.ndarray
    riem4: np.ndarray
    rbar4: np.ndarray  # rbar4[j,s,k,l] = a_sd R^d_jkl  (index-lowered)
    ricci_tensor: np.ndarray
    # 1-form calculus
    bup: np.ndarray
    bsq: float
    Db: np.ndarray
    dDb: np.ndarray
    D2b: np.ndarray
    r: np.ndarray
    s: np.ndarray
    r_up: np.ndarray
    s_up: np.ndarray
    rvec: np.ndarray
    svec: np.ndarray
    rupvec: np.ndarray
    supvec: np.ndarray
    r_scalar: float
    Dr: np.ndarray
    Ds: np.ndarray
    Drvec: np.ndarray
    Dsvec: np.ndarray
    # order-2 jet lifts in the 2n-direction space
    aJ: list = dc_field(repr=False, default=None)
    bJ: list = dc_field(repr=False, default=None)
    ainvJ: list = dc_field(repr=False, default=None)
    bupJ: list = dc_field(repr=False, default=None)
    bsqJ: Jet = dc_field(repr=False, default=None)
    gammaJ: list = dc_field(repr=False, default=None)
    rJ: list = dc_field(repr=False, default=None)
    supJ: list = dc_field(repr=False, default=None)
    svecJ: list = dc_field(repr=False, default=None)

    # -- y-dependent alpha quantities (closed forms in y) --------------------

    def y_jets(self, y) -> list[Jet]:
        n = self.n
        return [Jet.variable(float(y[j]), n + j, 2 * n) for j in range(n)]

    def alpha2(self, y) -> float:
        y = np.asarray(y, dtype=float)
        return float(y @ self.a @ y)

    def alpha(self, y) -> float:
        return float(np.sqrt(self.alpha2(y)))

    def beta(self, y) -> float:
        return float(self.b @ np.asarray(y, dtype=float))

    def gbar(self, y) -> np.ndarray:
        """Geodesic coefficients of alpha: Gbar^i = (1/2) Gamma^i_jk y^j y^k."""
        y = np.asarray(y, dtype=float)
        return 0.5 * np.einsum("ijk,j,k->i", self.gamma, y, y)

    def nonlinear_connection(self, y) -> np.ndarray:
        """N^i_j = d Gbar^i / d y^j = Gamma^i_jk y^k."""
        y = np.asarray(y, dtype=float)
        return np.einsum("ijk,k->ij", self.gamma, y)

    def rbar(self, y) -> np.ndarray:
        """Curvature operator of alpha, Rbar^i_k = R^i_jkl y^j y^l (classical route)."""
        y = np.asarray(y, dtype=float)
        return np.einsum("ijkl,j,l->ik", self.riem4, y, y)

    def ricbar(self, y) -> float:
        y = np.asarray(y, dtype=float)
        return float(y @ self.ricci_tensor @ y)


def build_bundle(spec: MetricSpec, x) -> AlphaBetaBundle:
    """Evaluate all alpha/beta geometry of ``spec`` at the chart point ``x``."""
    x = np.asarray(x, dtype=float)
    n = spec.dim
    if x.shape != (n,):
        raise GeometryError(f"point has {x.shape} coordinates, metric has dim {n}")
    for k, (lo, hi) in enumerate(spec.domain):
        if not lo <= x[k] <= hi:
            raise GeometryError(f"x{k + 1} = {x[k]} outside domain [{lo}, {hi}]")

    env = spec.chart_jets(x, total_dirs=2 * n)
    try:
        aJrows = spec.eval_a_jets(env)
        bJ = spec.eval_b_jets(env)
    except JetError as exc:
        raise GeometryError(f"metric evaluation failed at x={x}: {exc}") from exc

    # raw tensors from the jets
    a = np.empty((n, n))
    dA = np.empty((n, n, n))
    d2A = np.empty((n, n, n, n))
    for i in range(n):
        for j in range(n):
            jet = aJrows[i][j]
            a[i, j] = jet.val
            dA[i, j] = jet.grad[:n]
            d2A[i, j] = jet.hess_matrix()[:n, :n]
    b = np.array([jet.val for jet in bJ])
    db = np.array([jet.grad[:n] for jet in bJ])
    d2b = np.array([jet.hess_matrix()[:n, :n] for jet in bJ])

    try:
        np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise GeometryError(f"a(x) not positive definite at x={x}") from None
    a_inv = np.linalg.inv(a)

    # Christoffels and their exact first derivatives:
    # gamma[i,j,k] = 1/2 a^il (d_k a_lj + d_j a_lk - d_l a_jk)
    lower = np.empty((n, n, n))
    for l in range(n):
        for j in range(n):
            for k in range(n):
                lower[l, j, k] = 0.5 * (dA[l, j, k] + dA[l, k, j] - dA[j, k, l])
    gamma = np.einsum("il,ljk->ijk", a_inv, lower)

    d_ainv = -np.einsum("ip,pqm,qj->ijm", a_inv, dA, a_inv)
    dlower = np.empty((n, n, n, n))
    for l in range(n):
        for j in range(n):
            for k in range(n):
                dlower[l, j, k] = 0.5 * (d2A[l, j, k] + d2A[l, k, j] - d2A[j, k, l])
    # dlower[l,j,k,m] = d_m lower[l,j,k]   (d2A[i,j,k,l] = d^2 a_ij / dx^k dx^l)
    dgamma = np.einsum("ilm,ljk->ijkm", d_ainv, lower) + np.einsum(
        "il,ljkm->ijkm", a_inv, dlower
    )

    riem4 = (
        dgamma.transpose(0, 1, 3, 2)  # d_k Gamma^i_jl : dgamma[i,j,l,k]
        - dgamma  # d_l Gamma^i_jk : dgamma[i,j,k,l]
        + np.einsum("ikm,mjl->ijkl", gamma, gamma)
        - np.einsum("ilm,mjk->ijkl", gamma, gamma)
    )
    rbar4 = np.einsum("sd,djkl->jskl", a, riem4)
    ricci_tensor = np.einsum("kjkl->jl", riem4)

    # covariant calculus of b
    bup = a_inv @ b
    bsq = float(bup @ b)
    Db = db - np.einsum("mij,m->ij", gamma, b)
    dDb = d2b - np.einsum("mijk,m->ijk", dgamma, b) - np.einsum("mij,mk->ijk", gamma, db)
    D2b = (
        dDb
        - np.einsum("mik,mj->ijk", gamma, Db)
        - np.einsum("mjk,im->ijk", gamma, Db)
    )
    # r symmetric and s antisymmetric bit-exactly (both are symmetrized sums,
    # which IEEE arithmetic keeps structurally (anti)symmetric); Db is then
    # re-assembled as r + s so the decomposition reconstructs it bit-exactly.
    r = 0.5 * (Db + Db.T)
    s = 0.5 * (Db - Db.T)
    Db = r + s
    dr = 0.5 * (dDb + dDb.transpose(1, 0, 2))
    ds = 0.5 * (dDb - dDb.transpose(1, 0, 2))
    Dr = dr - np.einsum("mik,mj->ijk", gamma, r) - np.einsum("mjk,im->ijk", gamma, r)
    Ds = ds - np.einsum("mik,mj->ijk", gamma, s) - np.einsum("mjk,im->ijk", gamma, s)

    r_up = a_inv @ r
    s_up = a_inv @ s
    rvec = bup @ r  # r_j = b^i r_ij
    svec = bup @ s
    rupvec = a_inv @ rvec
    supvec = a_inv @ svec
    r_scalar = float(rvec @ bup)
    # covariant derivatives of the contracted vectors:
    # r_i|j = (b^m)|j r_mi + b^m r_mi|j,   (b^m)|j = r^m_j + s^m_j
    bup_cov = r_up + s_up
    Drvec = np.einsum("mj,mi->ij", bup_cov, r) + np.einsum("m,mij->ij", bup, Dr)
    Dsvec = np.einsum("mj,mi->ij", bup_cov, s) + np.einsum("m,mij->ij", bup, Ds)

    # jet lifts of the x-dependent fields for the spray layer
    d_bup = np.einsum("imk,m->ik", d_ainv, b) + a_inv @ db
    d_bsq = np.einsum("ijk,i,j->k", d_ainv, b, b) + 2.0 * np.einsum("ij,ik,j->k", a_inv, db, b)
    d_s_up = np.einsum("imk,mj->ijk", d_ainv, s) + np.einsum("im,mjk->ijk", a_inv, ds)
    d_svec = np.einsum("mk,mj->jk", d_bup, s) + np.einsum("m,mjk->jk", bup, ds)

    ainvJ = [[_field_jet(a_inv[i, j], d_ainv[i, j], n) for j in range(n)] for i in range(n)]
    bupJ = [_field_jet(bup[i], d_bup[i], n) for i in range(n)]
    bsqJ = _field_jet(bsq, d_bsq, n)
    gammaJ = [
        [[_field_jet(gamma[i, j, k], dgamma[i, j, k], n) for k in range(n)] for j in range(n)]
        for i in range(n)
    ]
    rJ = [[_field_jet(r[i, j], dr[i, j], n) for j in range(n)] for i in range(n)]
    supJ = [[_field_jet(s_up[i, j], d_s_up[i, j], n) for j in range(n)] for i in range(n)]
    svecJ = [_field_jet(svec[j], d_svec[j], n) for j in range(n)]

    return AlphaBetaBundle(
        spec=spec,
        x=x,
        n=n,
        a=a,
        a_inv=a_inv,
        dA=dA,
        d2A=d2A,
        b=b,
        db=db,
        d2b=d2b,
        gamma=gamma,
        dgamma=dgamma,
        riem4=riem4,
        rbar4=rbar4,
        ricci_tensor=ricci_tensor,
        bup=bup,
        bsq=bsq,
        Db=Db,
        dDb=dDb,
        D2b=D2b,
        r=r,
        s=s,
        r_up=r_up,
        s_up=s_up,
        rvec=rvec,
        svec=svec,
        rupvec=rupvec,
        supvec=supvec,
        r_scalar=r_scalar,
        Dr=Dr,
        Ds=Ds,
        Drvec=Drvec,
        Dsvec=Dsvec,
        aJ=aJrows,
        bJ=bJ,
        ainvJ=ainvJ,
        bupJ=bupJ,
        bsqJ=bsqJ,
        gammaJ=gammaJ,
        rJ=rJ,
        supJ=supJ,
        svecJ=svecJ,
    )


def covariant_b(bundle: AlphaBetaBundle):
    """The covariant-derivative record of beta: (Db, r, s, contractions).

    Returned as a dict so callers can spell out exactly which contraction
    they want; all entries are views of the bundle fields.
    """
    return {
        "Db": bundle.Db,
        "r": bundle.r,
        "s": bundle.s,
        "r_up": bundle.r_up,
        "s_up": bundle.s_up,
        "r_vec": bundle.rvec,
        "s_vec": bundle.svec,
        "r_vec_up": bundle.rupvec,
        "s_vec_up": bundle.supvec,
        "r_scalar": bundle.r_scalar,
        "bsq": bundle.bsq,
    }


def bianchi_check(bundle: AlphaBetaBundle) -> float:
    """Max residual of the Ricci identity b_j|k|l - b_j|l|k = b^s Rbar_jskl.

    Holds for any smooth metric and 1-form, so a nonzero residual certifies
    a bug in the derivative plumbing rather than a property of the data.
    """
    comm = bundle.D2b - bundle.D2b.transpose(0, 2, 1)
    rhs = np.einsum("s,jskl->jkl", bundle.bup, bundle.rbar4)
    return float(np.max(np.abs(comm - rhs)))


def horizontal_derivative(field_jets: list[Jet], bundle: AlphaBetaBundle, y):
    """Horizontal and vertical covariant derivatives of a y-dependent vector field.

    ``field_jets[k]`` must be the k-th component of the field as a jet in the
    bundle's 2n-direction space at the point (x, y).  Returns (Tcov, Tdot) with

        Tcov[k, j] = T^k_|j = dT^k/dx^j - N^m_j dT^k/dy^m + T^m Gamma^k_mj
        Tdot[k, j] = T^k_.j = dT^k/dy^j
    """
    n = bundle.n
    y = np.asarray(y, dtype=float)
    tval = np.array([t.val for t in field_jets])
    tx = np.array([t.grad[:n] for t in field_jets])
    ty = np.array([t.grad[n:] for t in field_jets])
    nconn = bundle.nonlinear_connection(y)
    tcov = tx - np.einsum("mj,km->kj", nconn, ty) + np.einsum("m,kmj->kj", tval, bundle.gamma)
    return tcov, ty


def alpha_spray_jets(bundle: AlphaBetaBundle, y_jets: list[Jet]) -> list[Jet]:
    """Gbar^i = (1/2) Gamma^i_jk y^j y^k as jets in the 2n-direction space."""
    n = bundle.n
    out = []
    for i in range(n):
        acc = None
        for j in range(n):
            for k in range(j, n):
                term = bundle.gammaJ[i][j][k] * (y_jets[j] * y_jets[k])
                if k != j:
                    term = 2.0 * term
                acc = term if acc is None else acc + term
        out.append(0.5 * acc)
    return out


def det_jet(mat: list[list[Jet]]) -> Jet:
    """Determinant of a matrix of jets via Gaussian elimination with pivoting."""
    m = [row[:] for row in mat]
    n = len(m)
    d = m[0][0].d
    det = Jet.constant(1.0, d)
    sign = 1.0
    for c in range(n):
        piv = max(range(c, n), key=lambda rr: abs(m[rr][c].val))
        if abs(m[piv][c].val) < 1e-300:
            raise GeometryError("singular matrix in jet determinant")
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        det = det * m[c][c]
        for rr in range(c + 1, n):
            factor = m[rr][c] / m[c][c]
            for cc in range(c + 1, n):
                m[rr][cc] = m[rr][cc] - factor * m[c][cc]
    return sign * det


def christoffels_fd(spec: MetricSpec, x, h: float = 1e-5) -> np.ndarray:
    """Christoffel symbols from central finite differences of a_ij.

    Test oracle for the jet-based ``gamma``; intentionally shares no
    differentiation code with the bundle.
    """
    x = np.asarray(x, dtype=float)
    n = spec.dim
    a = spec.a_values(x)
    a_inv = np.linalg.inv(a)
    dA = np.empty((n, n, n))
    for k in range(n):
        xp, xm = x.copy(), x.copy()
        xp[k] += h
        xm[k] -= h
        dA[:, :, k] = (spec.a_values(xp) - spec.a_values(xm)) / (2 * h)
    lower = np.empty((n, n, n))
    for l in range(n):
        for j in range(n):
            for k in range(n):
                lower[l, j, k] = 0.5 * (dA[l, j, k] + dA[l, k, j] - dA[j, k, l])
    return np.einsum("il,ljk->ijk", a_inv, lower)
