"""Optimal noncoherent detection over complex channels via a planar cell search.

The gain hypothesis (a + bi) sweeps a real plane; each cell of the
quantization-boundary arrangement maps to one candidate codeword.  The GLRT
winner's cell intersects a bounded region (a square for QAM, a strip for
PAM), so the detector enumerates the region's cell-boundary intersections,
drops one candidate point into each adjacent cell, and scores the distinct
codewords, O(T^3) of them in the worst case.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import get_backend
from .constellation import (
    Constellation,
    canonical_key,
    canonicalize_phase,
    to_real,
)
from .glrt import DecodeResult, TIE_RTOL, channel_estimate, glrt_metric

#: Relative boundary slack applied when filtering vertices to the region.
VERTEX_SLACK = 1e-12

#: Default interior offset, relative to lambda_max.
EPS_REL = 1e-9


def lambda_max_complex(y: np.ndarray, c: Constellation) -> float:
    """Search-region extent: (M + 2T - 2)/max|y_t| for QAM, (M + T - 2) for PAM."""
    y = np.asarray(y, dtype=np.complex128)
    m = float(np.max(np.abs(y)))
    if m == 0.0:
        raise ValueError("degenerate observation: all coordinates zero")
    span = c.m + 2 * y.size - 2 if c.is_complex else c.m + y.size - 2
    return span / m


def candidate_count_bound(c: Constellation, block_length: int) -> int:
    """Worst-case distinct codewords the plane search may score."""
    M, T = c.m, block_length
    peak = (M - 1) ** 2
    if c.is_complex:
        return T * (2 * T - 1) * (peak - 1) // 2 + (2 * T - 2) * peak + 2
    return T * (T - 1) * (peak - 1) // 2 + (T - 1) * (M - 1) + 1


def rotate_reference(y: np.ndarray) -> tuple[np.ndarray, complex, int]:
    """Rotate y so its largest-magnitude entry is real positive.

    Returns (rotated vector, unit rotation rho, reference index).  Ties on
    the magnitude go to the lowest index; an already-compliant vector gets
    rho = 1 exactly.
    """
    y = np.asarray(y, dtype=np.complex128)
    mags = np.abs(y)
    m_idx = int(np.argmax(mags))
    if mags[m_idx] == 0.0:
        raise ValueError("degenerate observation: all coordinates zero")
    rho = complex(np.conj(y[m_idx]) / mags[m_idx])
    return rho * y, rho, m_idx


@dataclass(frozen=True)
class SearchRegion:
    """Gain-plane region guaranteed to contain one rotation of the winner.

    ``strip`` regions bound only the first coordinate (PAM over a complex
    channel); square regions bound both (QAM).
    """

    lam_max: float
    strip: bool

    def contains(self, lam1: float, lam2: float, slack: float = 0.0) -> bool:
        if not (-slack <= lam1 <= self.lam_max + slack):
            return False
        if self.strip:
            return True
        return -slack <= lam2 <= self.lam_max + slack


def search_region(y: np.ndarray, c: Constellation) -> SearchRegion:
    return SearchRegion(lambda_max_complex(y, c), strip=not c.is_complex)


@dataclass(frozen=True)
class PlaneVertex:
    """Intersection of two quantization boundary lines, in rotated gain coords.

    ``crossing`` holds the two (coordinate index, boundary level) pairs that
    meet here; coordinate indices address the interleaved embedding.
    """

    lam: tuple[float, float]
    crossing: tuple[tuple[int, float], tuple[int, float]]


def _boundary_levels(c: Constellation, block_length: int, m_idx: int) -> dict[int, list[float]]:
    """Boundary set per embedding coordinate, outer region edges included."""
    M, T = c.m, block_length
    dims = range(0, 2 * T, 2) if not c.is_complex else range(2 * T)
    core = [0.0]
    core += [float(v) for v in range(2, M - 1, 2)]
    core += [float(-v) for v in range(2, M - 1, 2)]
    out = {t: list(core) for t in dims}
    if c.is_complex:
        bm = float(M + 2 * T - 2)
        out[2 * m_idx] += [bm, -bm]
        out[2 * m_idx + 1] += [bm, -bm]
    else:
        out[2 * m_idx].append(float(M + T - 2))
    return out


def enumerate_vertices(
    y_rot: np.ndarray,
    c: Constellation,
    m_idx: int,
    region: SearchRegion,
    full_square: bool = False,
) -> list[PlaneVertex]:
    """Reference vertex enumeration (the kernels fuse this with quantization).

    Solves every 2x2 boundary-line pair, skipping near-parallel pairs, and
    keeps solutions inside the region up to the slack.  ``full_square``
    widens the filter to the symmetric square [-lam_max, lam_max]^2, which
    the rotation-symmetry diagnostics use.
    """
    y_rot = np.asarray(y_rot, dtype=np.complex128)
    yd = to_real(y_rot)
    ydi = to_real(1j * y_rot)
    bset = _boundary_levels(c, y_rot.size, m_idx)
    dims = sorted(bset)
    lam_max = region.lam_max
    sl = VERTEX_SLACK * lam_max
    lo = -lam_max - sl if full_square else -sl
    out: list[PlaneVertex] = []
    for i, t in enumerate(dims):
        for tp in dims[i + 1 :]:
            g1 = (yd[t], ydi[t])
            g2 = (yd[tp], ydi[tp])
            det = g1[0] * g2[1] - g1[1] * g2[0]
            if abs(det) <= 1e-12 * np.hypot(*g1) * np.hypot(*g2):
                continue
            for b in bset[t]:
                for bp in bset[tp]:
                    v1 = (g2[1] * b - g1[1] * bp) / det
                    v2 = (g1[0] * bp - g2[0] * b) / det
                    if not (lo <= v1 <= lam_max + sl):
                        continue
                    if not region.strip and not (lo <= v2 <= lam_max + sl):
                        continue
                    out.append(PlaneVertex((v1, v2), ((t, b), (tp, bp))))
    return out


def interior_points_epsilon(
    vertex: PlaneVertex | tuple[float, float],
    eps: float,
    region: SearchRegion,
) -> list[tuple[float, float]]:
    """Diagonal offsets v +/- eps(1,1), kept only if they stay in the region.

    The region test here is strict on the open edges (lam1 in (0, lam_max),
    lam2 in [0, lam_max) for squares) so every surviving point lies in a
    scoreable cell.
    """
    lam = vertex.lam if isinstance(vertex, PlaneVertex) else vertex
    out = []
    for sgn in (1.0, -1.0):
        p1, p2 = lam[0] + sgn * eps, lam[1] + sgn * eps
        if not (0.0 < p1 < region.lam_max):
            continue
        if not region.strip and not (0.0 <= p2 < region.lam_max):
            continue
        out.append((p1, p2))
    return out


def interior_points_exact(
    vertex: PlaneVertex | tuple[float, float],
    y: np.ndarray,
    rho: complex,
    c: Constellation,
) -> list[tuple[float, float]]:
    """Cell-interior points flanking a vertex, no tuning parameter.

    From the vertex, walk the gain plane along the first coordinate axis of
    the unrotated frame (where boundary lines are generically never
    parallel to the walk) until the first quantization boundary among the
    constrained embedding coordinates, and stop halfway.  Points return in
    the same rotated coords the vertex uses.
    """
    lam = vertex.lam if isinstance(vertex, PlaneVertex) else vertex
    y = np.asarray(y, dtype=np.complex128)
    d = to_real(y)
    lam_orig = complex(lam[0], lam[1]) * rho
    u = to_real(lam_orig * y)
    step = 1 if c.is_complex else 2
    out = []
    for sgn in (1.0, -1.0):
        gam = np.inf
        for j in range(0, u.size, step):
            r = sgn * d[j]
            if r == 0.0:
                continue
            q = u[j] / 2.0
            kb = np.rint(q)
            if abs(u[j] - 2.0 * kb) < 1e-9:
                nxt = 2.0 * kb + 2.0 if r > 0.0 else 2.0 * kb - 2.0
            else:
                nxt = 2.0 * np.floor(q) + 2.0 if r > 0.0 else 2.0 * np.ceil(q) - 2.0
            gam = min(gam, (nxt - u[j]) / r)
        if not np.isfinite(gam):
            continue
        lam_new = lam_orig + 0.5 * sgn * gam
        back = lam_new * np.conj(rho)
        out.append((back.real, back.imag))
    return out


def _pick_best(metrics: np.ndarray, keys: list[tuple]) -> tuple[int, bool]:
    """Index of the winner under canonical tie-breaking.

    Near-ties (within the metric tolerance) resolve to the smallest
    canonical key, independent of candidate order; a tie across distinct
    keys flags a divisor ambiguity.
    """
    best = float(metrics.max())
    tied = np.flatnonzero(metrics >= best * (1.0 - TIE_RTOL))
    win = min(tied, key=lambda i: keys[i])
    distinct = {keys[i] for i in tied}
    return int(win), len(distinct) > 1


def plane_candidate_codewords(
    y: np.ndarray,
    c: Constellation,
    interior: str = "epsilon",
    eps: float | None = None,
    backend: str | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Distinct candidate codewords and their GLRT metrics for observation y.

    Returns (X, metrics): X is (K, T) complex for QAM or (K, T) integer for
    PAM, sorted by embedding for determinism.  This is the stream the
    optimal decoders and the parity-coded decoder both consume.
    """
    y = np.asarray(y, dtype=np.complex128)
    if y.ndim != 1 or y.size == 0:
        raise ValueError("observation must be a nonempty vector")
    if interior not in ("epsilon", "exact"):
        raise ValueError(f"unknown interior mode {interior!r}")
    T = y.size
    y_rot, rho, m_idx = rotate_reference(y)
    lam_max = lambda_max_complex(y, c)
    bmax = float(c.m + 2 * T - 2) if c.is_complex else float(c.m + T - 2)
    if eps is None:
        eps = EPS_REL * lam_max
    kern = get_backend(backend)
    raw = kern.plane_candidates(
        y_rot, y, m_idx, lam_max, bmax, c.m,
        not c.is_complex, interior == "exact", eps,
    )
    codes = np.unique(raw, axis=0)
    if c.is_complex:
        X = codes[:, 0::2] + 1j * codes[:, 1::2].astype(np.float64)
        num = np.abs(X.conj() @ y) ** 2
    else:
        X = codes
        num = np.abs(codes @ y) ** 2
    den = np.sum(codes.astype(np.float64) ** 2, axis=1)
    return X, num / den


def _decode_plane(y, c, interior, eps, backend) -> DecodeResult:
    y = np.asarray(y, dtype=np.complex128)
    X, metrics = plane_candidate_codewords(y, c, interior, eps, backend)
    keys = [canonical_key(X[i], c) for i in range(X.shape[0])]
    win, ambiguous = _pick_best(metrics, keys)
    est = canonicalize_phase(X[win], c)
    return DecodeResult(
        estimate=est,
        metric=glrt_metric(est, y),
        channel_estimate=channel_estimate(est, y),
        codewords_examined=X.shape[0],
        ambiguous=ambiguous,
    )


def decode_qam(
    y: np.ndarray,
    c: Constellation,
    interior: str = "epsilon",
    eps: float | None = None,
    backend: str | None = None,
) -> DecodeResult:
    """GLRT-optimal square-QAM detection over an unknown complex gain."""
    if not c.is_complex:
        raise ValueError("decode_qam expects a QAM constellation")
    return _decode_plane(y, c, interior, eps, backend)


def decode_pam_complex(
    y: np.ndarray,
    c: Constellation,
    interior: str = "epsilon",
    eps: float | None = None,
    backend: str | None = None,
) -> DecodeResult:
    """GLRT-optimal PAM detection over an unknown complex gain.

    Only the real embedding coordinates carry boundaries here, so the
    region is a strip and the vertex set is O(T^2) pairs of odd coordinates.
    """
    if c.is_complex:
        raise ValueError("decode_pam_complex expects a PAM constellation")
    return _decode_plane(y, c, interior, eps, backend)
