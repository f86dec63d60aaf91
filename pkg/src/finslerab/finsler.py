"""The deformed (slope-type) metric layer: F = alpha^2 / (alpha - beta).

Builds the spray coefficients G^i at a point (x, y) as order-2 jets over
the 2n chart+fiber directions, by two independent formulas:

* ``mode="general"``   -- the generic (alpha, beta) spray with the Q, Psi,
  Theta coefficients computed from phi(s) = 1/(1 - s) and its derivatives;
* ``mode="matsumoto"`` -- the closed rational form specific to this phi.

From the spray jets the Riemann curvature operator, its trace, the
Einstein residual, the deformation field T^i = G^i - Gbar^i and its
horizontal/vertical derivatives, and constant-scalar fits (lambda, c,
sigma, flag curvature K) all follow.  The curvature is also computed a
second way, through the deformation-field identity relating Ric to the
Ricci curvature of alpha; agreement of the two routes is the engine's
strongest self-check and is asserted in the test suite rather than here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .jets import Jet, jsqrt
from .riemann import AlphaBetaBundle, alpha_spray_jets

__all__ = [
    "PhiData",
    "FinslerEval",
    "ScalarFit",
    "phi_data",
    "spray",
    "riemann_curvature",
    "ricci_via_T",
    "einstein_residual",
    "finsler_eval",
    "fundamental_tensor",
    "extract_scalars",
    "flag_curvature_fit",
    "unit_alpha_vectors",
]

MODES = ("matsumoto", "general")


@dataclass
class PhiData:
    """phi(s) = 1/(1-s) data at one (s, b^2): derivatives and the spray scalars."""

    s: float
    bsq: float
    phi: float
    dphi: float
    d2phi: float
    Q: float
    Psi: float
    Theta: float
    Delta: float


def phi_data(s: float, bsq: float, mode: str = "matsumoto") -> PhiData:
    """Spray scalars Q, Psi, Theta and the convexity factor Delta.

    ``general`` evaluates the generic (alpha, beta) formulas with
    phi = 1/(1-s); ``matsumoto`` uses the simplified closed forms.  Both
    require |s| <= b < 1/2, which keeps every denominator away from zero.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    b = math.sqrt(max(bsq, 0.0))
    if b >= 0.5:
        raise ValueError(f"validity violated: |beta|_alpha = {b} >= 1/2")
    if abs(s) > b + 1e-12:
        raise ValueError(f"|s| = {abs(s)} exceeds b = {b}")
    u = 1.0 - s
    phi = 1.0 / u
    dphi = phi * phi
    d2phi = 2.0 * phi**3
    if mode == "general":
        edge = phi - s * dphi
        delta = edge + (bsq - s * s) * d2phi
        q = dphi / edge
        psi = d2phi / (2.0 * delta)
        theta = (phi * dphi - s * (phi * d2phi + dphi * dphi)) / (2.0 * phi * delta)
    else:
        q = 1.0 / (1.0 - 2.0 * s)
        psi = 1.0 / (1.0 + 2.0 * bsq - 3.0 * s)
        theta = (1.0 - 4.0 * s) / (2.0 * (1.0 + 2.0 * bsq - 3.0 * s))
        delta = (1.0 - 3.0 * s + 2.0 * bsq) / u**3
    return PhiData(s=s, bsq=bsq, phi=phi, dphi=dphi, d2phi=d2phi, Q=q, Psi=psi, Theta=theta, Delta=delta)


# -- spray --------------------------------------------------------------------


def _sym_quadratic(coefJ, yJ):
    """Sum_ij coefJ[i][j] y^i y^j for a symmetric jet matrix."""
    n = len(yJ)
    acc = None
    for i in range(n):
        for j in range(i, n):
            term = coefJ[i][j] * (yJ[i] * yJ[j])
            if j != i:
                term = 2.0 * term
            acc = term if acc is None else acc + term
    return acc


def _dot(vecJ, yJ):
    acc = None
    for v, y in zip(vecJ, yJ):
        term = v * y
        acc = term if acc is None else acc + term
    return acc


def spray(bundle: AlphaBetaBundle, y, mode: str = "matsumoto"):
    """Spray coefficients G^i at (x, y) as jets; also returns shared scalars.

    Returns ``(G, aux)`` where ``aux`` carries the alpha/beta/r00/s0 jets the
    caller usually needs next.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise ValueError("y must be nonzero")
    n = bundle.n
    yJ = bundle.y_jets(y)

    alpha2 = _sym_quadratic(bundle.aJ, yJ)
    alpha = jsqrt(alpha2)
    beta = _dot(bundle.bJ, yJ)
    r00 = _sym_quadratic(bundle.rJ, yJ)
    s0 = _dot(bundle.svecJ, yJ)
    si0 = [_dot(bundle.supJ[i], yJ) for i in range(n)]
    gbar = alpha_spray_jets(bundle, yJ)
    sj = beta / alpha
    bsq = bundle.bsqJ

    if mode == "matsumoto":
        den1 = 2.0 * sj - 1.0
        den2 = 3.0 * sj - 2.0 * bsq - 1.0
        common = (2.0 * alpha / den1) * s0 + r00
        lead = -(alpha / den1)
        coef_b = -(common / den2)
        coef_y = ((4.0 * sj - 1.0) / (2.0 * den2)) * common / alpha
    else:
        one = Jet.constant(1.0, 2 * n)
        phi = one / (one - sj)
        dphi = phi * phi
        d2phi = 2.0 * phi * dphi
        edge = phi - sj * dphi
        delta = edge + (bsq - sj * sj) * d2phi
        q = dphi / edge
        psi = d2phi / (2.0 * delta)
        theta = (phi * dphi - sj * (phi * d2phi + dphi * dphi)) / ((2.0 * phi) * delta)
        common = r00 - (2.0 * alpha * q) * s0
        lead = alpha * q
        coef_b = psi * common
        coef_y = (theta * common) / alpha

    G = [gbar[i] + lead * si0[i] + coef_b * bundle.bupJ[i] + coef_y * yJ[i] for i in range(n)]
    aux = {
        "alpha": alpha,
        "alpha2": alpha2,
        "beta": beta,
        "r00": r00,
        "s0": s0,
        "si0": si0,
        "gbar": gbar,
        "yJ": yJ,
        "s": sj,
    }
    return G, aux


def _spray_blocks(G: list[Jet], n: int):
    """Extract the derivative blocks of the spray jets used by the curvature."""
    gval = np.array([g.val for g in G])
    gx = np.array([g.grad[:n] for g in G])
    gy = np.array([g.grad[n:] for g in G])
    hxy = np.empty((n, n, n))
    hyy = np.empty((n, n, n))
    for i, g in enumerate(G):
        h = g.hess_matrix()
        hxy[i] = h[:n, n:]
        hyy[i] = h[n:, n:]
    return gval, gx, gy, hxy, hyy


def riemann_curvature(bundle: AlphaBetaBundle, y, mode: str = "matsumoto", G=None):
    """Riemann curvature operator R^i_k of F and its trace Ric at (x, y).

    R^i_k = 2 dG^i/dx^k - y^j d2G^i/dx^j dy^k + 2 G^j d2G^i/dy^j dy^k
            - dG^i/dy^j dG^j/dy^k.
    """
    y = np.asarray(y, dtype=float)
    if G is None:
        G, _ = spray(bundle, y, mode=mode)
    n = bundle.n
    gval, gx, gy, hxy, hyy = _spray_blocks(G, n)
    R = 2.0 * gx - np.einsum("j,ijk->ik", y, hxy) + 2.0 * np.einsum("j,ijk->ik", gval, hyy) - gy @ gy
    ric = float(np.trace(R))
    return R, ric


def ricci_via_T(bundle: AlphaBetaBundle, y, mode: str = "matsumoto", G=None, aux=None) -> float:
    """Ricci curvature through the deformation field T^i = G^i - Gbar^i.

    Ric = Ricbar + 2 T^k_|k - y^j T^k_.k|j + 2 T^j T^k_.j.k - T^k_.j T^j_.k,
    with | and . the horizontal/vertical derivatives of alpha.  Entirely
    different bookkeeping from the direct curvature trace, hence a strong
    cross-check on both.
    """
    y = np.asarray(y, dtype=float)
    n = bundle.n
    if G is None:
        G, aux = spray(bundle, y, mode=mode)
    gbar = aux["gbar"] if aux else alpha_spray_jets(bundle, bundle.y_jets(y))
    T = [G[i] - gbar[i] for i in range(n)]
    tval, tx, ty, txy, tyy = _spray_blocks(T, n)

    nconn = bundle.nonlinear_connection(y)
    gamma = bundle.gamma
    # T^k_|k = dT^k/dx^k - N^m_k dT^k/dy^m + T^m Gamma^k_mk
    t_div = (
        float(np.trace(tx))
        - float(np.einsum("mk,km->", nconn, ty))
        + float(np.einsum("m,kmk->", tval, gamma))
    )
    # f = T^k_.k is a scalar on the slit tangent bundle: f_|j = df/dx^j - N^m_j df/dy^m
    f_x = np.einsum("kjk->j", txy)
    f_y = np.einsum("kmk->m", tyy)
    t_trace_cov = float(y @ (f_x - nconn.T @ f_y))
    term3 = 2.0 * float(np.einsum("j,kjk->", tval, tyy))
    term4 = float(np.einsum("kj,jk->", ty, ty))
    return bundle.ricbar(y) + 2.0 * t_div - t_trace_cov + term3 - term4


def metric_value(bundle: AlphaBetaBundle, y) -> float:
    """F(x, y) = alpha^2 / (alpha - beta)."""
    al = bundle.alpha(y)
    return al * al / (al - bundle.beta(y))


def einstein_residual(bundle: AlphaBetaBundle, y, sigma: float, mode: str = "matsumoto") -> float:
    """Ric - sigma F^2 at (x, y)."""
    _, ric = riemann_curvature(bundle, y, mode=mode)
    F = metric_value(bundle, y)
    return ric - sigma * F * F


def fundamental_tensor(bundle: AlphaBetaBundle, y, G=None, aux=None) -> np.ndarray:
    """g_ij = 1/2 [F^2]_{y^i y^j}, from the exact fiber Hessian of the F^2 jet."""
    n = bundle.n
    if aux is None:
        yJ = bundle.y_jets(y)
        alpha2 = _sym_quadratic(bundle.aJ, yJ)
        alpha = jsqrt(alpha2)
        beta = _dot(bundle.bJ, yJ)
    else:
        alpha2, alpha, beta = aux["alpha2"], aux["alpha"], aux["beta"]
    F = alpha2 / (alpha - beta)
    F2 = F * F
    h = F2.hess_matrix()
    return 0.5 * h[n:, n:]


@dataclass
class FinslerEval:
    """Per-(x, y) record of the deformed metric's pointwise data."""

    x: np.ndarray
    y: np.ndarray
    F: float
    G: np.ndarray
    T: np.ndarray
    T_jets: list
    g: np.ndarray
    R: np.ndarray
    Ric: float
    sigma: float
    residual: float


def finsler_eval(bundle: AlphaBetaBundle, y, sigma: float = 0.0, mode: str = "matsumoto") -> FinslerEval:
    y = np.asarray(y, dtype=float)
    G, aux = spray(bundle, y, mode=mode)
    R, ric = riemann_curvature(bundle, y, mode=mode, G=G)
    gbar = aux["gbar"]
    T = [G[i] - gbar[i] for i in range(bundle.n)]
    F = metric_value(bundle, y)
    g = fundamental_tensor(bundle, y, G=G, aux=aux)
    return FinslerEval(
        x=bundle.x.copy(),
        y=y.copy(),
        F=F,
        G=np.array([j.val for j in G]),
        T=np.array([j.val for j in T]),
        T_jets=T,
        g=g,
        R=R,
        Ric=ric,
        sigma=sigma,
        residual=ric - sigma * F * F,
    )


# -- scalar extraction --------------------------------------------------------


def unit_alpha_vectors(bundle: AlphaBetaBundle, count: int, rng) -> np.ndarray:
    """Random y-samples normalized to alpha(x, y) = 1."""
    out = np.empty((count, bundle.n))
    for i in range(count):
        v = rng.standard_normal(bundle.n)
        while np.linalg.norm(v) < 1e-8:
            v = rng.standard_normal(bundle.n)
        out[i] = v / bundle.alpha(v)
    return out


def _design_vectors(bundle: AlphaBetaBundle, rng) -> np.ndarray:
    """Fit design: the 2n signed axis directions plus 2n random ones, alpha-normalized."""
    n = bundle.n
    axes = []
    for i in range(n):
        for sgn in (1.0, -1.0):
            e = np.zeros(n)
            e[i] = sgn
            axes.append(e / bundle.alpha(e))
    rand = unit_alpha_vectors(bundle, 2 * n, rng)
    return np.vstack([np.array(axes), rand])


@dataclass
class ScalarFit:
    """Least-squares fits of the pointwise Einstein/conformal scalars."""

    lam: float
    c: float
    sigma: float
    resid_lambda: float
    resid_c: float
    resid_sigma: float
    ys: np.ndarray


def extract_scalars(bundle: AlphaBetaBundle, rng=None, ys=None, mode: str = "matsumoto") -> ScalarFit:
    """Fit Ricbar = lambda alpha^2, r00 = c alpha^2, Ric = sigma F^2 over y-samples.

    Samples are alpha-normalized so the alpha^2 design column is 1 and the
    lambda/c fits reduce to means; the sigma fit is least squares against
    F^2 which genuinely varies over the fiber.  Residuals are max absolute
    deviations of the fitted relation over the sample set.
    """
    if ys is None:
        if rng is None:
            rng = np.random.default_rng(0)
        ys = _design_vectors(bundle, rng)
    ys = np.asarray(ys, dtype=float)
    if ys.shape[0] < 8:
        raise ValueError("need at least 8 y-samples to fit fiber-constant scalars")

    ricbars = np.array([bundle.ricbar(y) for y in ys])
    r00s = np.array([float(y @ bundle.r @ y) for y in ys])
    alphas2 = np.array([bundle.alpha2(y) for y in ys])
    rics = np.empty(len(ys))
    F2 = np.empty(len(ys))
    for i, y in enumerate(ys):
        _, rics[i] = riemann_curvature(bundle, y, mode=mode)
        F2[i] = metric_value(bundle, y) ** 2

    lam = float(ricbars @ alphas2 / (alphas2 @ alphas2))
    c = float(r00s @ alphas2 / (alphas2 @ alphas2))
    sig = float(rics @ F2 / (F2 @ F2))
    return ScalarFit(
        lam=lam,
        c=c,
        sigma=sig,
        resid_lambda=float(np.max(np.abs(ricbars - lam * alphas2))),
        resid_c=float(np.max(np.abs(r00s - c * alphas2))),
        resid_sigma=float(np.max(np.abs(rics - sig * F2))),
        ys=ys,
    )


def flag_curvature_fit(bundle: AlphaBetaBundle, y, mode: str = "matsumoto", G=None, aux=None):
    """Least-squares K in R^i_k = K (F^2 delta^i_k - y^i y_k), y_k = g_kj y^j.

    Returns (K, residual) with residual the max-entry deviation of the fit.
    """
    y = np.asarray(y, dtype=float)
    if G is None:
        G, aux = spray(bundle, y, mode=mode)
    R, _ = riemann_curvature(bundle, y, mode=mode, G=G)
    g = fundamental_tensor(bundle, y, G=G, aux=aux)
    F = metric_value(bundle, y)
    ylow = g @ y
    M = F * F * np.eye(bundle.n) - np.outer(y, ylow)
    denom = float(np.sum(M * M))
    if denom < 1e-300:
        raise ValueError("degenerate flag tensor (y = 0?)")
    K = float(np.sum(R * M) / denom)
    resid = float(np.max(np.abs(R - K * M)))
    return K, resid
