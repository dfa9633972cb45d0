"""Vectorized numpy evaluation of the Green tensor and its derivatives.

All functions take difference vectors ``z = x - y`` of shape (n, 3) and
return stacked tensors.  Index conventions: ``grad[n, k, i, j] = d_k E_ij``
and ``hess[n, c, k, i, j] = d_c d_k E_ij`` with derivatives in ``x``.
"""

from __future__ import annotations

import numpy as np

from ._profiles import FULL, SHEAR_FREE, profiles

_I3 = np.eye(3)


def _geometry(z, s, c_s):
    r = np.sqrt(np.einsum("ni,ni->n", z, z))
    zh = z / r[:, None]
    zeta = s * r / c_s
    return r, zh, zeta


def green(z, s, lam, mu, rho, mode=FULL):
    c_s = np.sqrt(mu / rho)
    beta = c_s / np.sqrt((lam + 2.0 * mu) / rho)
    r, zh, zeta = _geometry(z, s, c_s)
    P, Q = profiles(zeta, beta, mode, nder=0)
    pref = 1.0 / (4.0 * np.pi * mu * r)
    out = (pref * Q[0])[:, None, None] * zh[:, :, None] * zh[:, None, :]
    out += (pref * P[0])[:, None, None] * _I3
    return out


def green_grad(z, s, lam, mu, rho, mode=FULL):
    c_s = np.sqrt(mu / rho)
    beta = c_s / np.sqrt((lam + 2.0 * mu) / rho)
    r, zh, zeta = _geometry(z, s, c_s)
    P, Q = profiles(zeta, beta, mode, nder=1)
    pref = 1.0 / (4.0 * np.pi * mu * r * r)
    a = pref * (P[1] - P[0])
    b = pref * (Q[1] - 3.0 * Q[0])
    q = pref * Q[0]
    g = (a[:, None, None, None] * zh[:, :, None, None] * _I3[None, None])
    g += b[:, None, None, None] * np.einsum("nk,ni,nj->nkij", zh, zh, zh)
    g += q[:, None, None, None] * (_I3[None, :, :, None] * zh[:, None, None, :]
                                   + _I3[None, :, None, :] * zh[:, None, :, None])
    return g


def green_hess(z, s, lam, mu, rho, mode=FULL):
    c_s = np.sqrt(mu / rho)
    beta = c_s / np.sqrt((lam + 2.0 * mu) / rho)
    r, zh, zeta = _geometry(z, s, c_s)
    P, Q = profiles(zeta, beta, mode, nder=2)
    pref = 1.0 / (4.0 * np.pi * mu * r ** 3)
    a2 = pref * (P[2] - 3.0 * P[1] + 3.0 * P[0])
    a1 = pref * (P[1] - P[0])
    b2 = pref * (Q[2] - 7.0 * Q[1] + 15.0 * Q[0])
    b1 = pref * (Q[1] - 3.0 * Q[0])
    q = pref * Q[0]
    d = _I3
    zz = np.einsum("nc,nk->nck", zh, zh)
    h = a2[:, None, None, None, None] * zz[:, :, :, None, None] * d[None, None, None]
    h += a1[:, None, None, None, None] * (d[:, :, None, None] * d[None, None])[None]
    h += b2[:, None, None, None, None] * np.einsum("nc,nk,ni,nj->nckij", zh, zh, zh, zh)
    t = (np.einsum("ck,ni,nj->nckij", d, zh, zh)
         + np.einsum("nk,ci,nj->nckij", zh, d, zh)
         + np.einsum("nk,ni,cj->nckij", zh, zh, d)
         + np.einsum("nc,ki,nj->nckij", zh, d, zh)
         + np.einsum("nc,kj,ni->nckij", zh, d, zh))
    h += b1[:, None, None, None, None] * t
    h += q[:, None, None, None, None] * (np.einsum("ki,jc->ckij", d, d)
                                         + np.einsum("kj,ic->ckij", d, d))[None]
    return h


def traction_y(grad, ny, lam, mu):
    """Traction in ``y`` of the rows of E, transposed to columns.

    Returns ``T[n, j, i]``: component ``j`` of the traction at ``y`` (normal
    ``ny``) of the displacement field ``y -> E[i, :](x - y)``.
    """
    div = np.einsum("nkik->ni", grad)
    t = lam * np.einsum("nj,ni->nji", ny, div)
    t += mu * np.einsum("nk,nkij->nji", ny, grad)
    t += mu * np.einsum("nl,njil->nji", ny, grad)
    return -t


def traction_x(grad, nx, lam, mu):
    """Traction in ``x`` of the columns of E: ``T[n, m, l]`` for column ``l``."""
    div = np.einsum("nkkl->nl", grad)
    t = lam * np.einsum("nm,nl->nml", nx, div)
    t += mu * np.einsum("nk,nkml->nml", nx, grad)
    t += mu * np.einsum("nk,nmkl->nml", nx, grad)
    return t


def double_traction(z, nx, ny, s, lam, mu, rho, mode=FULL):
    """``R[n, m, j] = A^x_{mcd} A^y_{jkl} d_c d_k E_dl`` (x-derivatives)."""
    h = green_hess(z, s, lam, mu, rho, mode)
    # contract the k, l pair with the y-traction operator
    tr = np.einsum("nckdk->ncd", h)
    b = lam * np.einsum("nj,ncd->ncdj", ny, tr)
    b += mu * np.einsum("nk,nckdj->ncdj", ny, h)
    b += mu * np.einsum("nl,ncjdl->ncdj", ny, h)
    trc = np.einsum("nccj->nj", b)
    out = lam * np.einsum("nm,nj->nmj", nx, trc)
    out += mu * np.einsum("nc,ncmj->nmj", nx, b)
    out += mu * np.einsum("nd,nmdj->nmj", nx, b)
    return out


def shear_free_parts(z, s, lam, mu, rho):
    """Scalar and tensor pieces used by the regularized double-layer form.

    Returns ``(gs, dgs, gp, S, dh)``: ``G_s``, the radial factor of
    ``grad_z G_s`` (so that ``grad_z G_s = dgs * zhat``), ``G_p``,
    the Hessian ``S`` of ``h = (G_p - G_s) / (rho s^2)`` and
    ``rho s^2 grad_z h`` as a vector.
    """
    c_s = np.sqrt(mu / rho)
    beta = c_s / np.sqrt((lam + 2.0 * mu) / rho)
    r, zh, zeta = _geometry(z, s, c_s)
    P, Q = profiles(zeta, beta, SHEAR_FREE, nder=0)
    e1 = np.exp(-zeta)
    four_pi_r = 4.0 * np.pi * r
    gs = e1 / four_pi_r
    dgs = -e1 * (1.0 + zeta) / (four_pi_r * r)
    gp = np.exp(-beta * zeta) / four_pi_r
    pref = 1.0 / (mu * four_pi_r)
    S = (pref * Q[0])[:, None, None] * zh[:, :, None] * zh[:, None, :]
    S += (pref * P[0])[:, None, None] * _I3
    dh = (zeta * zeta * P[0] / (four_pi_r * r))[:, None] * zh
    return gs, dgs, gp, S, dh


def pair_blocks(x, y, w, hx, hy, nx, ny, gy, s, lam, mu, rho,
                want_v=True, want_k=True, want_w=True):
    """Local Galerkin blocks of V, K and the dynamic part of W for panel pairs.

    Returns ``V[m, i, j]``, ``K[m, i, a, j]`` and ``W[m, a, i, b, j]``; see
    the compiled twin for the index conventions.
    """
    m, nq = w.shape
    z = (x - y).reshape(-1, 3)
    V = np.zeros((m, 3, 3), dtype=complex)
    K = np.zeros((m, 3, 3, 3), dtype=complex)
    W = np.zeros((m, 3, 3, 3, 3), dtype=complex)
    if want_v:
        E = green(z, s, lam, mu, rho).reshape(m, nq, 9)
        V = np.matmul(w[:, None, :], E).reshape(m, 3, 3)
    if want_k:
        _, dgs, gp, S, dh = shear_free_parts(z, s, lam, mu, rho)
        r = np.sqrt(np.einsum("ni,ni->n", z, z))
        zn = np.einsum("mqd,md->mq", z.reshape(m, nq, 3), ny) / r.reshape(m, nq)
        dn = -dgs.reshape(m, nq) * zn
        a1 = np.einsum("mq,mqa->ma", w * dn, hy)
        a2 = np.matmul(np.swapaxes(hy * w[..., None], 1, 2), dh.reshape(m, nq, 3))
        a3 = np.einsum("mq,mq->m", w, gp.reshape(m, nq))
        a4 = np.matmul(w[:, None, :], S.reshape(m, nq, 9)).reshape(m, 3, 3)
        g_t = np.swapaxes(gy, 1, 2)                       # g_t[m, i, a] = g_a[i]
        sn = np.einsum("mij,mj->mi", a4, ny)
        sg = np.einsum("mij,maj->mai", a4, gy)
        K = a1[:, None, :, None] * _I3[None, :, None, :]
        K = K - ny[:, :, None, None] * a2[:, None, :, :]
        K = K - (lam / (lam + 2.0 * mu)) * a3[:, None, None, None] * (
            ny[:, None, None, :] * g_t[:, :, :, None] - ny[:, :, None, None] * gy[:, None, :, :])
        K = K - 2.0 * mu * (g_t[:, :, :, None] * sn[:, None, None, :]
                            - ny[:, :, None, None] * sg[:, None, :, :])
    if want_w:
        nxq = np.repeat(nx, nq, axis=0)
        nyq = np.repeat(ny, nq, axis=0)
        R = double_traction(z, nxq, nyq, s, lam, mu, rho, 1).reshape(m, nq, 3, 3)
        hh = (w[..., None, None] * hx[..., :, None] * hy[..., None, :]).reshape(m, nq, 9)
        W = np.matmul(np.swapaxes(hh, 1, 2), R.reshape(m, nq, 9))      # [m, ab, ij]
        W = W.reshape(m, 3, 3, 3, 3).transpose(0, 1, 3, 2, 4)
    return V, K, W
