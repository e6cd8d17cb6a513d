# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels; same API and arithmetic as ``_pykernels``."""

from libc.math cimport ceil, fabs, floor, hypot, rint, INFINITY

import numpy as np

cimport numpy as cnp

from ._pykernels import _combo_table

cnp.import_array()

BACKEND = "compiled"


cdef inline double _qlevel(double u, int m) nogil:
    cdef double lv = 2.0 * floor(u / 2.0) + 1.0
    cdef double hi = m - 1.0
    if lv > hi:
        return hi
    if lv < -hi:
        return -hi
    return lv


cdef _sorted_events(double[::1] mags, int M, double lam_max):
    """Boundary events nu = b/|y_t| below lam_max, sorted by (nu, t)."""
    cdef Py_ssize_t n = mags.shape[0]
    cdef list bs = [float(v) for v in range(2, M - 1, 2)]
    cdef Py_ssize_t nb = len(bs)
    nu_l = []
    t_l = []
    b_l = []
    cdef Py_ssize_t t
    cdef double m, b, nu
    for t in range(n):
        m = mags[t]
        if m <= 0.0:
            continue
        for b in bs:
            nu = b / m
            if nu < lam_max:
                nu_l.append(nu)
                t_l.append(t)
                b_l.append(b)
    if not nu_l:
        e = np.empty(0)
        return e, e.astype(np.int64), e
    nu_a = np.array(nu_l)
    t_a = np.array(t_l, dtype=np.int64)
    b_a = np.array(b_l)
    order = np.lexsort((t_a, nu_a))
    return nu_a[order], t_a[order], b_a[order]


def line_search_real(object yf_in, int M):
    cdef cnp.ndarray[double, ndim=1] yf = np.ascontiguousarray(yf_in, dtype=np.float64)
    cdef Py_ssize_t T = yf.shape[0]
    cdef double ymax = yf.max()
    cdef double lam_max = (M + T - 2) / ymax
    cdef double alpha = 0.0
    cdef double beta = T
    cdef Py_ssize_t k
    for k in range(T):
        alpha += yf[k]
    cdef double best = alpha * alpha / beta
    cdef long n_eval = 1

    nu_a, t_a, b_a = _sorted_events(yf, M, lam_max)
    cdef double[::1] nu = nu_a
    cdef long[::1] ti = t_a
    cdef double[::1] bb = b_a
    cdef Py_ssize_t n = nu.shape[0]
    cdef double lam
    if n == 0:
        return 0.5 * lam_max, best, n_eval
    lam = 0.5 * nu[0]
    cdef double met, upper
    for k in range(n):
        alpha += 2.0 * yf[ti[k]]
        beta += 4.0 * bb[k]
        if k + 1 < n and nu[k + 1] == nu[k]:
            continue
        n_eval += 1
        met = alpha * alpha / beta
        if met > best:
            best = met
            upper = nu[k + 1] if k + 1 < n else lam_max
            lam = 0.5 * (nu[k] + upper)
    return lam, best, n_eval


def line_search_complex(object y_in, int M, double lam_max):
    cdef cnp.ndarray[double complex, ndim=1] y = np.ascontiguousarray(y_in, dtype=np.complex128)
    cdef Py_ssize_t T = y.shape[0]
    cdef cnp.ndarray[double, ndim=1] yd = np.empty(2 * T)
    cdef cnp.ndarray[double, ndim=1] mags = np.empty(2 * T)
    cdef cnp.ndarray[double, ndim=1] s = np.empty(2 * T)
    cdef Py_ssize_t t
    for t in range(T):
        yd[2 * t] = y[t].real
        yd[2 * t + 1] = y[t].imag
    for t in range(2 * T):
        s[t] = 1.0 if yd[t] >= 0.0 else -1.0
        mags[t] = fabs(yd[t])

    cdef double complex alpha = 0.0
    cdef double beta = 2 * T
    for t in range(T):
        alpha += (s[2 * t] - 1j * s[2 * t + 1]) * y[t]
    cdef double best = (alpha.real * alpha.real + alpha.imag * alpha.imag) / beta
    cdef long n_eval = 1

    nu_a, t_a, b_a = _sorted_events(mags, M, lam_max)
    cdef double[::1] nu = nu_a
    cdef long[::1] ti = t_a
    cdef double[::1] bb = b_a
    cdef Py_ssize_t n = nu.shape[0]
    cdef double lam
    if n == 0:
        return 0.5 * lam_max, best, n_eval
    lam = 0.5 * nu[0]
    cdef double met, upper
    cdef Py_ssize_t k, tc
    for k in range(n):
        tc = ti[k]
        if tc % 2 == 0:
            alpha += 2.0 * s[tc] * y[tc // 2]
        else:
            alpha -= 2.0j * s[tc] * y[tc // 2]
        beta += 4.0 * bb[k]
        if k + 1 < n and nu[k + 1] == nu[k]:
            continue
        n_eval += 1
        met = (alpha.real * alpha.real + alpha.imag * alpha.imag) / beta
        if met > best:
            best = met
            upper = nu[k + 1] if k + 1 < n else lam_max
            lam = 0.5 * (nu[k] + upper)
    return lam, best, n_eval


def plane_candidates(object y_rot_in, object y_orig_in, long m_idx, double lam_max,
                     double bmax, int M, bint pam, bint exact, double eps):
    cdef cnp.ndarray[double complex, ndim=1] y_rot = np.ascontiguousarray(y_rot_in, dtype=np.complex128)
    cdef Py_ssize_t T = y_rot.shape[0]
    cdef Py_ssize_t n2 = 2 * T
    cdef cnp.ndarray[double, ndim=1] yd = np.empty(n2)
    cdef cnp.ndarray[double, ndim=1] ydi = np.empty(n2)
    cdef Py_ssize_t t
    for t in range(T):
        yd[2 * t] = y_rot[t].real
        yd[2 * t + 1] = y_rot[t].imag
        ydi[2 * t] = -y_rot[t].imag
        ydi[2 * t + 1] = y_rot[t].real

    t1_a, t2_a, b1_a, b2_a = _combo_table(T, M, m_idx, pam)
    cdef long[::1] t1 = t1_a
    cdef long[::1] t2 = t2_a
    cdef double[::1] b1 = b1_a
    cdef double[::1] b2 = b2_a
    cdef Py_ssize_t nc = t1.shape[0]

    # vertices inside the (slack-padded) search region
    cdef cnp.ndarray[double, ndim=2] V = np.empty((nc + 2, 2))
    cdef Py_ssize_t nv = 0
    cdef double sl = 1e-12 * lam_max
    cdef double g1x, g1y, g2x, g2y, det, v1, v2
    cdef Py_ssize_t i
    for i in range(nc):
        g1x = yd[t1[i]]
        g1y = ydi[t1[i]]
        g2x = yd[t2[i]]
        g2y = ydi[t2[i]]
        det = g1x * g2y - g1y * g2x
        if fabs(det) <= 1e-12 * hypot(g1x, g1y) * hypot(g2x, g2y):
            continue
        v1 = (g2y * b1[i] - g1y * b2[i]) / det
        v2 = (g1x * b2[i] - g2x * b1[i]) / det
        if v1 < -sl or v1 > lam_max + sl:
            continue
        if not pam and (v2 < -sl or v2 > lam_max + sl):
            continue
        V[nv, 0] = v1
        V[nv, 1] = v2
        nv += 1
    if not pam:
        V[nv, 0] = 0.0
        V[nv, 1] = 0.0
        nv += 1
        V[nv, 0] = lam_max
        V[nv, 1] = lam_max
        nv += 1

    cdef Py_ssize_t width = T if pam else n2
    cdef Py_ssize_t step = 2 if pam else 1
    cdef cnp.ndarray[long, ndim=2] codes = np.empty((2 * nv + 1, width), dtype=np.int64)
    cdef Py_ssize_t nrows = 0
    cdef double u, q, kb, nxt, r, dist, gam, p1, p2, sgn
    cdef Py_ssize_t j, c
    cdef double[::1] ubuf = np.empty(n2)
    cdef double[::1] dbuf = np.empty(n2)

    if exact:
        y_orig = np.ascontiguousarray(y_orig_in, dtype=np.complex128)
        for t in range(T):
            dbuf[2 * t] = y_orig[t].real
            dbuf[2 * t + 1] = y_orig[t].imag
        for i in range(nv):
            for j in range(n2):
                ubuf[j] = V[i, 0] * yd[j] + V[i, 1] * ydi[j]
            for c in range(2):
                sgn = 1.0 if c == 0 else -1.0
                gam = INFINITY
                for j in range(0, n2, step):
                    r = sgn * dbuf[j]
                    if r == 0.0:
                        continue
                    u = ubuf[j]
                    q = u / 2.0
                    kb = rint(q)
                    if fabs(u - 2.0 * kb) < 1e-9:
                        nxt = 2.0 * kb + 2.0 if r > 0.0 else 2.0 * kb - 2.0
                    else:
                        nxt = 2.0 * floor(q) + 2.0 if r > 0.0 else 2.0 * ceil(q) - 2.0
                    dist = (nxt - u) / r
                    if dist < gam:
                        gam = dist
                if gam == INFINITY:
                    continue
                for j in range(width):
                    u = ubuf[j * step] + 0.5 * sgn * gam * dbuf[j * step]
                    codes[nrows, j] = <long> _qlevel(u, M)
                nrows += 1
    else:
        for i in range(nv):
            for c in range(2):
                sgn = 1.0 if c == 0 else -1.0
                p1 = V[i, 0] + sgn * eps
                p2 = V[i, 1] + sgn * eps
                if p1 <= 0.0 or p1 >= lam_max:
                    continue
                if not pam and (p2 < 0.0 or p2 >= lam_max):
                    continue
                for j in range(width):
                    u = p1 * yd[j * step] + p2 * ydi[j * step]
                    codes[nrows, j] = <long> _qlevel(u, M)
                nrows += 1

    # near-origin seed
    for j in range(width):
        u = eps * (yd[j * step] + ydi[j * step])
        codes[nrows, j] = <long> _qlevel(u, M)
    nrows += 1
    return np.asarray(codes[:nrows])
