# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_numpy_backend``: same signatures, same index layout."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, M_PI

from ._profiles import SERIES_THRESHOLD, series_coefficients, static_limits

cnp.import_array()

cdef enum:
    FULL = 0
    STATIC_SUBTRACTED = 1
    SHEAR_FREE = 2

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double cabs(double complex)


cdef struct Params:
    double lam
    double mu
    double rho
    double c_s
    double beta
    double thr
    double p0
    double q0
    int mode
    int terms


cdef Params _params(double lam, double mu, double rho, int mode):
    cdef Params p
    p.lam = lam
    p.mu = mu
    p.rho = rho
    p.c_s = sqrt(mu / rho)
    p.beta = p.c_s / sqrt((lam + 2.0 * mu) / rho)
    p.thr = SERIES_THRESHOLD
    p0, q0 = static_limits(p.beta)
    p.p0 = p0
    p.q0 = q0
    p.mode = mode
    return p


cdef inline double complex _horner(const double[::1] c, int terms, double complex z) noexcept nogil:
    cdef double complex out = c[terms - 1]
    cdef int k
    for k in range(terms - 2, -1, -1):
        out = out * z + c[k]
    return out


cdef void _profiles(double complex z, Params* p, int nder,
                    const double[:, ::1] pc, const double[:, ::1] qc,
                    double complex* P, double complex* Q) noexcept nogil:
    cdef int k
    cdef double complex e1, e2, bz, u, z2, N, O, N1, O1, N2, O2
    cdef double b2
    if cabs(z) < p.thr:
        for k in range(nder + 1):
            P[k] = _horner(pc[k], pc.shape[1], z)
            Q[k] = _horner(qc[k], qc.shape[1], z)
        return
    e1 = cexp(-z)
    e2 = cexp(-p.beta * z)
    bz = p.beta * z
    b2 = p.beta * p.beta
    z2 = z * z
    u = 1.0 / z2
    N = e1 * (1.0 + z) - e2 * (1.0 + bz)
    O = e2 * (3.0 + 3.0 * bz + bz * bz) - e1 * (3.0 + 3.0 * z + z2)
    P[0] = u * N
    Q[0] = u * O
    if nder >= 1:
        N1 = z2 * (b2 * e2 - e1)
        O1 = z2 * ((1.0 + z) * e1 - b2 * (1.0 + bz) * e2)
        P[1] = u * (N1 - 2.0 * N)
        Q[1] = u * (O1 - 2.0 * O)
    if nder >= 2:
        N2 = z2 * ((z - 1.0) * e1 - b2 * (bz - 1.0) * e2)
        O2 = z2 * (b2 * (bz * bz - bz - 1.0) * e2 - (z2 - z - 1.0) * e1)
        P[2] = u * (N2 - 4.0 * N1 + 6.0 * N)
        Q[2] = u * (O2 - 4.0 * O1 + 6.0 * O)
    if p.mode != SHEAR_FREE:
        P[0] = P[0] + e1
        if nder >= 1:
            P[1] = P[1] - z * e1
        if nder >= 2:
            P[2] = P[2] + z2 * e1
    if p.mode == STATIC_SUBTRACTED:
        P[0] = P[0] - p.p0
        Q[0] = Q[0] - p.q0


def green(const double[:, ::1] z, double complex s, double lam, double mu, double rho,
          int mode=FULL):
    cdef Params p = _params(lam, mu, rho, mode)
    pc_np, qc_np = series_coefficients(p.beta, mode)
    cdef const double[:, ::1] pc = np.ascontiguousarray(pc_np)
    cdef const double[:, ::1] qc = np.ascontiguousarray(qc_np)
    cdef Py_ssize_t n = z.shape[0], a
    out_np = np.empty((n, 3, 3), dtype=np.complex128)
    cdef double complex[:, :, ::1] out = out_np
    cdef double complex P[3]
    cdef double complex Q[3]
    cdef double r, pref
    cdef double zh[3]
    cdef int i, j
    with nogil:
        for a in range(n):
            r = sqrt(z[a, 0] * z[a, 0] + z[a, 1] * z[a, 1] + z[a, 2] * z[a, 2])
            for i in range(3):
                zh[i] = z[a, i] / r
            _profiles(s * r / p.c_s, &p, 0, pc, qc, P, Q)
            pref = 1.0 / (4.0 * M_PI * mu * r)
            for i in range(3):
                for j in range(3):
                    out[a, i, j] = pref * Q[0] * zh[i] * zh[j]
                out[a, i, i] = out[a, i, i] + pref * P[0]
    return out_np


cdef inline double _d(int i, int j) noexcept nogil:
    return 1.0 if i == j else 0.0


def green_grad(const double[:, ::1] z, double complex s, double lam, double mu, double rho,
               int mode=FULL):
    cdef Params p = _params(lam, mu, rho, mode)
    pc_np, qc_np = series_coefficients(p.beta, mode)
    cdef const double[:, ::1] pc = np.ascontiguousarray(pc_np)
    cdef const double[:, ::1] qc = np.ascontiguousarray(qc_np)
    cdef Py_ssize_t n = z.shape[0], a
    out_np = np.empty((n, 3, 3, 3), dtype=np.complex128)
    cdef double complex[:, :, :, ::1] out = out_np
    cdef double complex P[3]
    cdef double complex Q[3]
    cdef double complex ca, cb, cq
    cdef double r, pref
    cdef double zh[3]
    cdef int i, j, k
    with nogil:
        for a in range(n):
            r = sqrt(z[a, 0] * z[a, 0] + z[a, 1] * z[a, 1] + z[a, 2] * z[a, 2])
            for i in range(3):
                zh[i] = z[a, i] / r
            _profiles(s * r / p.c_s, &p, 1, pc, qc, P, Q)
            pref = 1.0 / (4.0 * M_PI * mu * r * r)
            ca = pref * (P[1] - P[0])
            cb = pref * (Q[1] - 3.0 * Q[0])
            cq = pref * Q[0]
            for k in range(3):
                for i in range(3):
                    for j in range(3):
                        out[a, k, i, j] = (ca * zh[k] * _d(i, j) + cb * zh[k] * zh[i] * zh[j]
                                           + cq * (_d(i, k) * zh[j] + _d(j, k) * zh[i]))
    return out_np


cdef void _hessian(double* zh, double complex* P, double complex* Q, double pref,
                   double complex* h) noexcept nogil:
    """Fill h[((c*3 + k)*3 + i)*3 + j] = d_c d_k E_ij."""
    cdef double complex a2 = pref * (P[2] - 3.0 * P[1] + 3.0 * P[0])
    cdef double complex a1 = pref * (P[1] - P[0])
    cdef double complex b2 = pref * (Q[2] - 7.0 * Q[1] + 15.0 * Q[0])
    cdef double complex b1 = pref * (Q[1] - 3.0 * Q[0])
    cdef double complex q = pref * Q[0]
    cdef int c, k, i, j
    for c in range(3):
        for k in range(3):
            for i in range(3):
                for j in range(3):
                    h[((c * 3 + k) * 3 + i) * 3 + j] = (
                        a2 * zh[c] * zh[k] * _d(i, j)
                        + a1 * _d(c, k) * _d(i, j)
                        + b2 * zh[c] * zh[k] * zh[i] * zh[j]
                        + b1 * (_d(c, k) * zh[i] * zh[j] + zh[k] * _d(c, i) * zh[j]
                                + zh[k] * zh[i] * _d(c, j) + zh[c] * _d(k, i) * zh[j]
                                + zh[c] * _d(k, j) * zh[i])
                        + q * (_d(k, i) * _d(j, c) + _d(k, j) * _d(i, c)))


def green_hess(const double[:, ::1] z, double complex s, double lam, double mu, double rho,
               int mode=FULL):
    cdef Params p = _params(lam, mu, rho, mode)
    pc_np, qc_np = series_coefficients(p.beta, mode)
    cdef const double[:, ::1] pc = np.ascontiguousarray(pc_np)
    cdef const double[:, ::1] qc = np.ascontiguousarray(qc_np)
    cdef Py_ssize_t n = z.shape[0], a
    out_np = np.empty((n, 3, 3, 3, 3), dtype=np.complex128)
    cdef double complex[:, :, :, :, ::1] out = out_np
    cdef double complex P[3]
    cdef double complex Q[3]
    cdef double complex h[81]
    cdef double r
    cdef double zh[3]
    cdef int i, c, k, j
    with nogil:
        for a in range(n):
            r = sqrt(z[a, 0] * z[a, 0] + z[a, 1] * z[a, 1] + z[a, 2] * z[a, 2])
            for i in range(3):
                zh[i] = z[a, i] / r
            _profiles(s * r / p.c_s, &p, 2, pc, qc, P, Q)
            _hessian(zh, P, Q, 1.0 / (4.0 * M_PI * mu * r * r * r), h)
            for c in range(3):
                for k in range(3):
                    for i in range(3):
                        for j in range(3):
                            out[a, c, k, i, j] = h[((c * 3 + k) * 3 + i) * 3 + j]
    return out_np


def shear_free_parts(const double[:, ::1] z, double complex s, double lam, double mu, double rho):
    cdef Params p = _params(lam, mu, rho, SHEAR_FREE)
    pc_np, qc_np = series_coefficients(p.beta, SHEAR_FREE)
    cdef const double[:, ::1] pc = np.ascontiguousarray(pc_np)
    cdef const double[:, ::1] qc = np.ascontiguousarray(qc_np)
    cdef Py_ssize_t n = z.shape[0], a
    gs_np = np.empty(n, dtype=np.complex128)
    dgs_np = np.empty(n, dtype=np.complex128)
    gp_np = np.empty(n, dtype=np.complex128)
    S_np = np.empty((n, 3, 3), dtype=np.complex128)
    dh_np = np.empty((n, 3), dtype=np.complex128)
    cdef double complex[::1] gs = gs_np
    cdef double complex[::1] dgs = dgs_np
    cdef double complex[::1] gp = gp_np
    cdef double complex[:, :, ::1] S = S_np
    cdef double complex[:, ::1] dh = dh_np
    cdef double complex P[3]
    cdef double complex Q[3]
    cdef double complex zeta, e1, pref
    cdef double r, fpr
    cdef double zh[3]
    cdef int i, j
    with nogil:
        for a in range(n):
            r = sqrt(z[a, 0] * z[a, 0] + z[a, 1] * z[a, 1] + z[a, 2] * z[a, 2])
            for i in range(3):
                zh[i] = z[a, i] / r
            zeta = s * r / p.c_s
            _profiles(zeta, &p, 0, pc, qc, P, Q)
            e1 = cexp(-zeta)
            fpr = 4.0 * M_PI * r
            gs[a] = e1 / fpr
            dgs[a] = -e1 * (1.0 + zeta) / (fpr * r)
            gp[a] = cexp(-p.beta * zeta) / fpr
            pref = 1.0 / (mu * fpr)
            for i in range(3):
                for j in range(3):
                    S[a, i, j] = pref * Q[0] * zh[i] * zh[j]
                S[a, i, i] = S[a, i, i] + pref * P[0]
                dh[a, i] = zeta * zeta * P[0] / (fpr * r) * zh[i]
    return gs_np, dgs_np, gp_np, S_np, dh_np


cdef inline void _remainder_traction(double* zh, const double* nx, const double* ny,
                                     double complex a2, double complex a1, double complex b2,
                                     double complex b1, double complex q, double lam, double mu,
                                     double complex* R) noexcept nogil:
    """Closed-form double traction from the Hessian coefficients."""
    cdef double a = zh[0] * nx[0] + zh[1] * nx[1] + zh[2] * nx[2]
    cdef double b = zh[0] * ny[0] + zh[1] * ny[1] + zh[2] * ny[2]
    cdef double c = nx[0] * ny[0] + nx[1] * ny[1] + nx[2] * ny[2]
    cdef double complex t = a2 + 3.0 * b1
    cdef double complex u = a2 + b2 + 6.0 * b1
    cdef double complex cxy = (lam * lam * (a2 + 3.0 * a1 + b2 + 9.0 * b1 + 12.0 * q)
                               + 2.0 * lam * mu * (2.0 * a1 + 2.0 * b1 + 8.0 * q) + 4.0 * mu * mu * q)
    cdef double complex cxz = 2.0 * lam * mu * b * u + 4.0 * mu * mu * b * b1
    cdef double complex czy = 2.0 * lam * mu * a * u + 4.0 * mu * mu * a * b1
    cdef double complex cd = mu * mu * (a * b * t + 2.0 * c * (a1 + q))
    cdef double complex czz = mu * mu * (c * t + 4.0 * a * b * b2)
    cdef double complex czx = mu * mu * b * t
    cdef double complex cyz = mu * mu * a * t
    cdef double complex cyx = 2.0 * mu * mu * (a1 + q)
    cdef int m, j
    for m in range(3):
        for j in range(3):
            R[m * 3 + j] = (cxy * nx[m] * ny[j] + cxz * nx[m] * zh[j] + czy * zh[m] * ny[j]
                            + czz * zh[m] * zh[j] + czx * zh[m] * nx[j] + cyz * ny[m] * zh[j]
                            + cyx * ny[m] * nx[j])
        R[m * 4] = R[m * 4] + cd


def double_traction(const double[:, ::1] z, const double[:, ::1] nx, const double[:, ::1] ny,
                           double complex s, double lam, double mu, double rho, int mode=FULL):
    """``R[n, m, j]``: x-traction of the y-traction of E, in closed form."""
    cdef Params p = _params(lam, mu, rho, mode)
    pc_np, qc_np = series_coefficients(p.beta, mode)
    cdef const double[:, ::1] pc = np.ascontiguousarray(pc_np)
    cdef const double[:, ::1] qc = np.ascontiguousarray(qc_np)
    cdef Py_ssize_t n = z.shape[0], a
    out_np = np.empty((n, 3, 3), dtype=np.complex128)
    cdef double complex[:, :, ::1] out = out_np
    cdef double complex P[3]
    cdef double complex Q[3]
    cdef double complex R[9]
    cdef double r, pref
    cdef double zh[3]
    cdef double vx[3]
    cdef double vy[3]
    cdef int i, j
    with nogil:
        for a in range(n):
            r = sqrt(z[a, 0] * z[a, 0] + z[a, 1] * z[a, 1] + z[a, 2] * z[a, 2])
            for i in range(3):
                zh[i] = z[a, i] / r
                vx[i] = nx[a, i]
                vy[i] = ny[a, i]
            _profiles(s * r / p.c_s, &p, 2, pc, qc, P, Q)
            pref = 1.0 / (4.0 * M_PI * mu * r * r * r)
            _remainder_traction(zh, vx, vy, pref * (P[2] - 3.0 * P[1] + 3.0 * P[0]),
                                pref * (P[1] - P[0]), pref * (Q[2] - 7.0 * Q[1] + 15.0 * Q[0]),
                                pref * (Q[1] - 3.0 * Q[0]), pref * Q[0], lam, mu, R)
            for i in range(3):
                for j in range(3):
                    out[a, i, j] = R[i * 3 + j]
    return out_np


cdef inline void _profiles_pair(double complex z, double complex e1, double complex e2, Params* p,
                                int nder, bint want_static, const double[:, ::1] pcf,
                                const double[:, ::1] qcf, const double[:, ::1] pcs,
                                const double[:, ::1] qcs, double complex* P, double complex* Q,
                                double complex* Ps, double complex* Qs) noexcept nogil:
    """Full profiles and, optionally, the statically subtracted values of P and Q."""
    cdef int k
    cdef double complex bz, u, z2, N, O, N1, O1, N2, O2
    cdef double b2
    if cabs(z) < p.thr:
        for k in range(nder + 1):
            P[k] = _horner(pcf[k], pcf.shape[1], z)
            Q[k] = _horner(qcf[k], qcf.shape[1], z)
        if want_static:
            Ps[0] = _horner(pcs[0], pcs.shape[1], z)
            Qs[0] = _horner(qcs[0], qcs.shape[1], z)
        return
    bz = p.beta * z
    b2 = p.beta * p.beta
    z2 = z * z
    u = 1.0 / z2
    N = e1 * (1.0 + z) - e2 * (1.0 + bz)
    O = e2 * (3.0 + 3.0 * bz + bz * bz) - e1 * (3.0 + 3.0 * z + z2)
    P[0] = u * N + e1
    Q[0] = u * O
    if nder >= 1:
        N1 = z2 * (b2 * e2 - e1)
        O1 = z2 * ((1.0 + z) * e1 - b2 * (1.0 + bz) * e2)
        P[1] = u * (N1 - 2.0 * N) - z * e1
        Q[1] = u * (O1 - 2.0 * O)
    if nder >= 2:
        N2 = z2 * ((z - 1.0) * e1 - b2 * (bz - 1.0) * e2)
        O2 = z2 * (b2 * (bz * bz - bz - 1.0) * e2 - (z2 - z - 1.0) * e1)
        P[2] = u * (N2 - 4.0 * N1 + 6.0 * N) + z2 * e1
        Q[2] = u * (O2 - 4.0 * O1 + 6.0 * O)
    if want_static:
        Ps[0] = P[0] - p.p0
        Qs[0] = Q[0] - p.q0


def pair_blocks(const double[:, :, ::1] x, const double[:, :, ::1] y, const double[:, ::1] w,
                const double[:, :, ::1] hx, const double[:, :, ::1] hy,
                const double[:, ::1] nx, const double[:, ::1] ny, const double[:, :, ::1] gy,
                double complex s, double lam, double mu, double rho,
                bint want_v=True, bint want_k=True, bint want_w=True):
    """Local Galerkin blocks of V, K and the dynamic part of W for many panel pairs.

    Returns ``V[m, i, j]``, ``K[m, i, a, j]`` (P0 test component ``i``, trial
    vertex ``a``, component ``j``) and ``W[m, a, i, b, j]``.
    """
    cdef Params pf = _params(lam, mu, rho, FULL)
    pcf_np, qcf_np = series_coefficients(pf.beta, FULL)
    pcs_np, qcs_np = series_coefficients(pf.beta, STATIC_SUBTRACTED)
    cdef const double[:, ::1] pcf = np.ascontiguousarray(pcf_np)
    cdef const double[:, ::1] qcf = np.ascontiguousarray(qcf_np)
    cdef const double[:, ::1] pcs = np.ascontiguousarray(pcs_np)
    cdef const double[:, ::1] qcs = np.ascontiguousarray(qcs_np)
    cdef Py_ssize_t m = x.shape[0], nq = x.shape[1], k, qi
    V_np = np.zeros((m, 3, 3), dtype=np.complex128)
    K_np = np.zeros((m, 3, 3, 3), dtype=np.complex128)
    W_np = np.zeros((m, 3, 3, 3, 3), dtype=np.complex128)
    cdef double complex[:, :, ::1] Vo = V_np
    cdef double complex[:, :, :, ::1] Ko = K_np
    cdef double complex[:, :, :, :, ::1] Wo = W_np
    cdef double complex P[3]
    cdef double complex Q[3]
    cdef double complex Ps[3]
    cdef double complex Qs[3]
    cdef double complex R[9]
    cdef double complex Wl[81]
    cdef double complex vp, vq[9], A1[3], A2[9], A3, A4[9]
    cdef double complex zeta, e1, e2, pt, dn, coef
    cdef double wr
    cdef double r, wq, p1, p3, fpr, zn, cl = lam / (lam + 2.0 * mu)
    cdef double zh[3]
    cdef double vx[3]
    cdef double vy[3]
    cdef double complex sn[3]
    cdef double complex sg[9]
    cdef int i, j, a, b, nder = 2 if want_w else 0
    with nogil:
        for k in range(m):
            vp = 0.0
            A3 = 0.0
            for i in range(9):
                vq[i] = 0.0
                A2[i] = 0.0
                A4[i] = 0.0
            for i in range(81):
                Wl[i] = 0.0
            for i in range(3):
                A1[i] = 0.0
                vx[i] = nx[k, i]
                vy[i] = ny[k, i]
            for qi in range(nq):
                r = 0.0
                for i in range(3):
                    zh[i] = x[k, qi, i] - y[k, qi, i]
                    r = r + zh[i] * zh[i]
                r = sqrt(r)
                for i in range(3):
                    zh[i] = zh[i] / r
                wq = w[k, qi]
                zeta = s * r / pf.c_s
                e1 = cexp(-zeta)
                e2 = cexp(-pf.beta * zeta)
                _profiles_pair(zeta, e1, e2, &pf, nder, want_w, pcf, qcf, pcs, qcs, P, Q, Ps, Qs)
                fpr = 4.0 * M_PI * r
                p1 = 1.0 / (mu * fpr)
                if want_v:
                    vp = vp + wq * p1 * P[0]
                    for i in range(3):
                        for j in range(3):
                            vq[i * 3 + j] = vq[i * 3 + j] + wq * p1 * Q[0] * zh[i] * zh[j]
                if want_k:
                    pt = P[0] - e1
                    zn = zh[0] * vy[0] + zh[1] * vy[1] + zh[2] * vy[2]
                    dn = e1 * (1.0 + zeta) / (fpr * r) * zn
                    coef = zeta * zeta * pt / (fpr * r)
                    for a in range(3):
                        A1[a] = A1[a] + wq * hy[k, qi, a] * dn
                        for j in range(3):
                            A2[a * 3 + j] = A2[a * 3 + j] + wq * hy[k, qi, a] * coef * zh[j]
                    A3 = A3 + wq * e2 / fpr
                    for i in range(3):
                        for j in range(3):
                            A4[i * 3 + j] = A4[i * 3 + j] + wq * p1 * Q[0] * zh[i] * zh[j]
                        A4[i * 4] = A4[i * 4] + wq * p1 * pt
                if want_w:
                    p3 = 1.0 / (4.0 * M_PI * mu * r * r * r)
                    _remainder_traction(zh, vx, vy, p3 * (P[2] - 3.0 * P[1] + 3.0 * Ps[0]),
                                        p3 * (P[1] - Ps[0]), p3 * (Q[2] - 7.0 * Q[1] + 15.0 * Qs[0]),
                                        p3 * (Q[1] - 3.0 * Qs[0]), p3 * Qs[0], lam, mu, R)
                    for a in range(3):
                        for b in range(3):
                            wr = wq * hx[k, qi, a] * hy[k, qi, b]
                            for i in range(3):
                                for j in range(3):
                                    Wl[((a * 3 + i) * 3 + b) * 3 + j] += wr * R[i * 3 + j]
            if want_w:
                for a in range(3):
                    for i in range(3):
                        for b in range(3):
                            for j in range(3):
                                Wo[k, a, i, b, j] = Wl[((a * 3 + i) * 3 + b) * 3 + j]
            if want_v:
                for i in range(3):
                    for j in range(3):
                        Vo[k, i, j] = vq[i * 3 + j]
                    Vo[k, i, i] = Vo[k, i, i] + vp
            if want_k:
                for i in range(3):
                    sn[i] = A4[i * 3] * vy[0] + A4[i * 3 + 1] * vy[1] + A4[i * 3 + 2] * vy[2]
                for a in range(3):
                    for i in range(3):
                        sg[a * 3 + i] = (A4[i * 3] * gy[k, a, 0] + A4[i * 3 + 1] * gy[k, a, 1]
                                         + A4[i * 3 + 2] * gy[k, a, 2])
                for i in range(3):
                    for a in range(3):
                        for j in range(3):
                            coef = -vy[i] * A2[a * 3 + j]
                            coef = coef - cl * A3 * (vy[j] * gy[k, a, i] - vy[i] * gy[k, a, j])
                            coef = coef - 2.0 * mu * (gy[k, a, i] * sn[j] - vy[i] * sg[a * 3 + j])
                            if i == j:
                                coef = coef + A1[a]
                            Ko[k, i, a, j] = coef
    return V_np, K_np, W_np
