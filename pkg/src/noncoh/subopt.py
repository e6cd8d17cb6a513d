"""Reduced-complexity noncoherent detectors.

Both trade the plane search for one or a few line sweeps: PAM first
estimates the channel phase from the squared observations, then runs the
real line search; QAM sweeps a small fan of lines through the gain plane.
"""

from __future__ import annotations

import numpy as np

from .backend import get_backend
from .constellation import Constellation, canonicalize_phase, quantize_axis, to_real
from .glrt import DecodeResult, channel_estimate, glrt_metric
from .line_search import decode_pam_real
from .plane_search import lambda_max_complex, rotate_reference


def power_law_phase(y: np.ndarray) -> float:
    """Phase estimate arg(sum y_t^2)/2, folded into [0, pi).

    Squaring strips the +/-1 sign modulation of PAM symbols, so the sum
    points at twice the channel phase.  Raises on an exactly zero sum,
    where the estimate is undefined.
    """
    y = np.asarray(y, dtype=np.complex128)
    s = complex(np.sum(y * y))
    if s == 0.0:
        raise ValueError("degenerate observation: zero squared sum")
    return float((np.angle(s) / 2.0) % np.pi)


def decode_pam_complex_subopt(
    y: np.ndarray,
    c: Constellation,
    backend: str | None = None,
) -> DecodeResult:
    """PAM over a complex gain: derotate by the power-law phase, then line-search.

    The reported metric is the true complex-channel GLRT value of the
    estimate, not the derotated real one, so it is directly comparable with
    the optimal detector's.
    """
    if c.is_complex:
        raise ValueError("decode_pam_complex_subopt expects a PAM constellation")
    y = np.asarray(y, dtype=np.complex128)
    try:
        phi = power_law_phase(y)
    except ValueError:
        phi = 0.0
    yr = np.real(np.exp(-1j * phi) * y)
    if not np.any(yr):
        raise ValueError("degenerate observation: derotated vector is zero")
    inner = decode_pam_real(yr, c, backend=backend)
    est = inner.estimate
    return DecodeResult(
        estimate=est,
        metric=glrt_metric(est, y),
        channel_estimate=channel_estimate(est, y),
        codewords_examined=inner.codewords_examined,
    )


def default_line_count(block_length: int) -> int:
    """Fan size for the multi-line QAM detector (4 lines at T = 7)."""
    return block_length // 2 + 1


def multiline_count_bound(c: Constellation, block_length: int, lines: int) -> int:
    """Segment budget: lines * (2T (M/2 - 1) + 1)."""
    return lines * (2 * block_length * (c.m // 2 - 1) + 1)


def decode_qam_multiline(
    y: np.ndarray,
    c: Constellation,
    lines: int | None = None,
    backend: str | None = None,
) -> DecodeResult:
    """Suboptimal square-QAM detection along L equally spaced gain-plane lines.

    Line l sits at angle (l-1) pi / (2L); each gets the incremental sweep
    of the line detector with its own clipped extent, and the best
    (segment, line) pair wins.  Counts sum per-line segments without
    cross-line dedup.
    """
    if not c.is_complex:
        raise ValueError("decode_qam_multiline expects a QAM constellation")
    y = np.asarray(y, dtype=np.complex128)
    if y.ndim != 1 or y.size == 0:
        raise ValueError("observation must be a nonempty vector")
    T = y.size
    L = default_line_count(T) if lines is None else int(lines)
    if L < 1:
        raise ValueError("need at least one line")
    y_rot, _, _ = rotate_reference(y)
    lam_max0 = lambda_max_complex(y, c)
    kern = get_backend(backend)

    best_met = -np.inf
    best_lam = 0.0
    best_phi = 0.0
    total = 0
    for ell in range(L):
        phi = ell * np.pi / (2.0 * L)
        y_line = np.exp(1j * phi) * y_rot
        lam_max = lam_max0 / max(np.cos(phi), np.sin(phi))
        lam, met, n_eval = kern.line_search_complex(y_line, c.m, lam_max)
        total += int(n_eval)
        if met > best_met:
            best_met, best_lam, best_phi = met, lam, phi

    u = to_real(best_lam * np.exp(1j * best_phi) * y_rot)
    levels = quantize_axis(u, c.m)
    est = canonicalize_phase(levels[0::2] + 1j * levels[1::2].astype(np.float64), c)
    return DecodeResult(
        estimate=est,
        metric=glrt_metric(est, y),
        channel_estimate=channel_estimate(est, y),
        codewords_examined=total,
    )
