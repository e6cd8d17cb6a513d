"""Numpy implementations of the search kernels.

Same API as the compiled extension ``noncoh._kernels``; ``noncoh.backend``
picks whichever is available (or whichever the caller asks for).  The three
entry points are the amplitude line sweep, the rotated line sweep used by
the multi-line detector, and the cell-candidate generator for the plane
searches.  The per-cell geometry avoids order-dependent reductions so the
compiled twin can reproduce candidate sets bit for bit.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

BACKEND = "python"


def _quantize(u: np.ndarray, m: int) -> np.ndarray:
    lv = 2.0 * np.floor(np.asarray(u) / 2.0) + 1.0
    return np.clip(lv, -(m - 1), m - 1).astype(np.int64)


def _embed(y: np.ndarray) -> np.ndarray:
    out = np.empty(2 * y.size, dtype=np.float64)
    out[0::2] = y.real
    out[1::2] = y.imag
    return out


# ---------------------------------------------------------------------------
# amplitude line sweep (real PAM)
# ---------------------------------------------------------------------------

def _real_events(yf: np.ndarray, M: int, lam_max: float):
    """Sorted cell-boundary events nu = b/y_t below lam_max.

    Returns (nu, t, b) ascending in nu with index t as tie order.  Crossing
    boundary b bumps the codeword energy by 4b, which is all the sweep needs
    to maintain beta.
    """
    T = yf.size
    bs = np.arange(2.0, M - 1.0, 2.0)
    if bs.size == 0:
        e = np.empty(0)
        return e, e.astype(np.int64), e
    with np.errstate(divide="ignore"):
        nu = (bs[None, :] / yf[:, None]).ravel()
    t = np.repeat(np.arange(T, dtype=np.int64), bs.size)
    b = np.tile(bs, T)
    keep = nu < lam_max
    nu, t, b = nu[keep], t[keep], b[keep]
    order = np.lexsort((t, nu))
    return nu[order], t[order], b[order]


def line_search_real(yf: np.ndarray, M: int):
    """Sweep the positive half-line against sign-folded observations yf >= 0.

    Returns (lam_hat, best_metric, n_evaluations); lam_hat is a point in the
    interior of the best cell, so the caller reconstructs the codeword by
    componentwise quantization of lam_hat * yf.  Events at identical nu are
    applied together and scored once.
    """
    yf = np.asarray(yf, dtype=np.float64)
    T = yf.size
    lam_max = (M + T - 2) / yf.max()
    alpha0 = float(yf.sum())
    beta0 = float(T)
    m0 = alpha0 * alpha0 / beta0
    nu, t, b = _real_events(yf, M, lam_max)
    if nu.size == 0:
        return 0.5 * lam_max, m0, 1
    alphas = alpha0 + 2.0 * np.cumsum(yf[t])
    betas = beta0 + 4.0 * np.cumsum(b)
    ends = np.append(np.flatnonzero(np.diff(nu) > 0.0), nu.size - 1)
    uppers = np.append(nu[ends[:-1] + 1], lam_max)
    lams = np.concatenate([[0.5 * nu[0]], 0.5 * (nu[ends] + uppers)])
    mets = np.concatenate([[m0], alphas[ends] ** 2 / betas[ends]])
    i = int(np.argmax(mets))
    return float(lams[i]), float(mets[i]), 1 + ends.size


def line_search_real_trace(yf: np.ndarray, M: int) -> dict:
    """Debug variant exposing the sweep state after every event (tests only)."""
    yf = np.asarray(yf, dtype=np.float64)
    T = yf.size
    lam_max = (M + T - 2) / yf.max()
    nu, t, b = _real_events(yf, M, lam_max)
    alphas = float(yf.sum()) + 2.0 * np.cumsum(yf[t])
    betas = float(T) + 4.0 * np.cumsum(b)
    ends = (
        np.append(np.flatnonzero(np.diff(nu) > 0.0), nu.size - 1)
        if nu.size
        else np.empty(0, dtype=np.int64)
    )
    return {
        "lam_max": lam_max,
        "nu": nu,
        "t": t,
        "b": b,
        "alphas": alphas,
        "betas": betas,
        "group_ends": ends,
    }


# ---------------------------------------------------------------------------
# rotated line sweep (one line of the multi-line QAM detector)
# ---------------------------------------------------------------------------

def line_search_complex(y: np.ndarray, M: int, lam_max: float):
    """Best cell along {lam * y : 0 < lam < lam_max} in the QAM lattice.

    The sweep runs on the interleaved embedding: coordinate 2k is Re y_k and
    bumps alpha by 2 s y_k when it crosses a boundary, coordinate 2k+1 is
    Im y_k and bumps alpha by -2i s y_k, with s the coordinate's sign fold.
    Returns (lam_hat, best_metric, n_evaluations).
    """
    y = np.asarray(y, dtype=np.complex128)
    T = y.size
    yd = _embed(y)
    s = np.where(yd >= 0.0, 1.0, -1.0)
    a = np.abs(yd)
    x0 = s[0::2] + 1j * s[1::2]
    alpha0 = complex(np.vdot(x0, y))
    beta0 = float(2 * T)
    m0 = abs(alpha0) ** 2 / beta0

    bs = np.arange(2.0, M - 1.0, 2.0)
    if bs.size:
        with np.errstate(divide="ignore"):
            nu = (bs[None, :] / a[:, None]).ravel()
        t = np.repeat(np.arange(2 * T, dtype=np.int64), bs.size)
        b = np.tile(bs, 2 * T)
        keep = nu < lam_max
        nu, t, b = nu[keep], t[keep], b[keep]
        order = np.lexsort((t, nu))
        nu, t, b = nu[order], t[order], b[order]
    else:
        nu = np.empty(0)
    if nu.size == 0:
        return 0.5 * lam_max, m0, 1

    sy = s[t]
    dalpha = np.where(t % 2 == 0, 2.0 * sy * y[t // 2], -2.0j * sy * y[t // 2])
    alphas = alpha0 + np.cumsum(dalpha)
    betas = beta0 + 4.0 * np.cumsum(b)
    ends = np.append(np.flatnonzero(np.diff(nu) > 0.0), nu.size - 1)
    uppers = np.append(nu[ends[:-1] + 1], lam_max)
    lams = np.concatenate([[0.5 * nu[0]], 0.5 * (nu[ends] + uppers)])
    mets = np.concatenate([[m0], np.abs(alphas[ends]) ** 2 / betas[ends]])
    i = int(np.argmax(mets))
    return float(lams[i]), float(mets[i]), 1 + ends.size


# ---------------------------------------------------------------------------
# plane candidate generator (QAM and complex-channel PAM)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=512)
def _combo_table(T: int, M: int, m_idx: int, pam: bool):
    """Index arrays (t, t', b, b') for every boundary-line pair to intersect.

    Depends only on the shape of the problem, so it is cached; ``m_idx`` is
    the reference coordinate whose boundary set is augmented with the outer
    search-region edge.
    """
    dims = list(range(0, 2 * T, 2)) if pam else list(range(2 * T))
    core = [0.0]
    core += [float(v) for v in range(2, M - 1, 2)]
    core += [float(-v) for v in range(2, M - 1, 2)]
    if pam:
        extra = {2 * m_idx: [float(M + T - 2)]}
    else:
        bm = float(M + 2 * T - 2)
        extra = {2 * m_idx: [bm, -bm], 2 * m_idx + 1: [bm, -bm]}
    bset = {t: core + extra.get(t, []) for t in dims}
    t1, t2, b1, b2 = [], [], [], []
    for i, ta in enumerate(dims):
        for tb in dims[i + 1 :]:
            for ba in bset[ta]:
                for bb in bset[tb]:
                    t1.append(ta)
                    t2.append(tb)
                    b1.append(ba)
                    b2.append(bb)
    return (
        np.array(t1, dtype=np.int64),
        np.array(t2, dtype=np.int64),
        np.array(b1, dtype=np.float64),
        np.array(b2, dtype=np.float64),
    )


def _exact_points(V, yd, ydi, d, pam):
    """Half-step interior points left and right of each vertex.

    Works on physical embedding coordinates: from the vertex image u, walk
    along +/- d (the embedding of the unrotated observation) to the first
    quantization-boundary crossing among the constrained coordinates and
    stop halfway.  Coordinates sitting on a boundary (within snap) are
    treated as exactly on it so the walk targets the next cell over.
    """
    n2 = yd.size
    U = V[:, 0:1] * yd[None, :] + V[:, 1:2] * ydi[None, :]
    cidx = np.arange(0, n2, 2) if pam else np.arange(n2)
    Uc = U[:, cidx]
    dc = d[cidx]
    q = Uc / 2.0
    kb = np.rint(q)
    onb = np.abs(Uc - 2.0 * kb) < 1e-9
    out = []
    for sign in (1.0, -1.0):
        r = sign * dc
        nxt = np.where(
            r > 0.0,
            np.where(onb, 2.0 * kb + 2.0, 2.0 * np.floor(q) + 2.0),
            np.where(onb, 2.0 * kb - 2.0, 2.0 * np.ceil(q) - 2.0),
        )
        with np.errstate(divide="ignore", invalid="ignore"):
            dist = np.where(r == 0.0, np.inf, (nxt - Uc) / r)
        gam = dist.min(axis=1) if dist.shape[1] else np.full(dist.shape[0], np.inf)
        good = np.isfinite(gam)
        out.append(U[good] + (0.5 * sign * gam[good])[:, None] * d[None, :])
    return np.vstack(out)


def plane_candidates(y_rot, y_orig, m_idx, lam_max, bmax, M, pam, exact, eps):
    """Raw candidate codewords for the two-dimensional cell search.

    ``y_rot`` is the observation rotated so its largest entry is real
    positive, ``y_orig`` the unrotated one (used for the exact interior
    walk).  Returns an int64 array of quantized candidates, duplicates
    included; the caller dedups and scores.  Rows have 2T columns for QAM
    (interleaved) and T for PAM.
    """
    y_rot = np.asarray(y_rot, dtype=np.complex128)
    T = y_rot.size
    yd = _embed(y_rot)
    ydi = _embed(1j * y_rot)
    t1, t2, b1, b2 = _combo_table(T, M, int(m_idx), bool(pam))

    if t1.size:
        g1x, g1y = yd[t1], ydi[t1]
        g2x, g2y = yd[t2], ydi[t2]
        det = g1x * g2y - g1y * g2x
        ok = np.abs(det) > 1e-12 * np.hypot(g1x, g1y) * np.hypot(g2x, g2y)
        with np.errstate(divide="ignore", invalid="ignore"):
            v1 = (g2y * b1 - g1y * b2) / det
            v2 = (g1x * b2 - g2x * b1) / det
        sl = 1e-12 * lam_max
        inside = ok & (v1 >= -sl) & (v1 <= lam_max + sl)
        if not pam:
            inside &= (v2 >= -sl) & (v2 <= lam_max + sl)
        V = np.stack([v1[inside], v2[inside]], axis=1)
    else:
        V = np.empty((0, 2))
    if not pam:
        V = np.vstack([V, [[0.0, 0.0], [lam_max, lam_max]]])

    if exact:
        d = _embed(np.asarray(y_orig, dtype=np.complex128))
        U = _exact_points(V, yd, ydi, d, pam)
    else:
        P = np.vstack([V + eps, V - eps])
        keep = (P[:, 0] > 0.0) & (P[:, 0] < lam_max)
        if not pam:
            keep &= (P[:, 1] >= 0.0) & (P[:, 1] < lam_max)
        P = P[keep]
        U = P[:, 0:1] * yd[None, :] + P[:, 1:2] * ydi[None, :]

    seed = (eps * (yd + ydi))[None, :]
    U = np.vstack([U, seed])
    if pam:
        U = U[:, 0::2]
    return _quantize(U, M)
