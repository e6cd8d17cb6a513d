"""Comparison detectors: channel-estimate grid, best-ray quantization, pilot.

None of these is GLRT-optimal; they exist so simulations can reproduce the
reference curves.  All of them score hypotheses with the same GLRT metric
as the optimal detectors, which keeps the comparison honest.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import ceil

import numpy as np

from .constellation import Constellation, canonicalize_phase, nearest_codeword
from .glrt import CapExceededError, DecodeResult, channel_estimate, glrt_metric
from .plane_search import candidate_count_bound

DEFAULT_QBR_CAP = 10**6


def _phase_fan(count: int) -> tuple[float, ...]:
    return tuple(ell * np.pi / (2.0 * count) for ell in range(count))


@dataclass(frozen=True)
class GridSpec:
    """Hypothesis grid for the estimate-and-detect baseline.

    ``amplitudes`` are |h| guesses at the Rayleigh quantiles k/(1+K);
    ``phases`` the phase guesses.  One coherent detection runs per pair.
    """

    phases: tuple[float, ...]
    amplitudes: tuple[float, ...]


def default_grid(c: Constellation, block_length: int) -> GridSpec:
    """Grid sized to the optimal search's worst case: K = ceil(bound / L)."""
    L = 4 if c.is_complex else 2
    K = ceil(candidate_count_bound(c, block_length) / L)
    amps = tuple(
        float(np.sqrt(-np.log1p(-k / (1.0 + K)))) for k in range(1, K + 1)
    )
    return GridSpec(phases=_phase_fan(L), amplitudes=amps)


def grid_search_decode(
    y: np.ndarray,
    c: Constellation,
    grid: GridSpec | None = None,
) -> DecodeResult:
    """Coherent detection under each gridded channel guess, best metric wins."""
    y = np.asarray(y, dtype=np.complex128)
    if grid is None:
        grid = default_grid(c, y.size)
    best = None
    best_met = -np.inf
    for amp in grid.amplitudes:
        for phi in grid.phases:
            h = amp * np.exp(1j * phi)
            x = nearest_codeword(y / h, c)
            met = glrt_metric(x, y)
            if met > best_met:
                best, best_met = x, met
    est = canonicalize_phase(best, c)
    return DecodeResult(
        estimate=est,
        metric=glrt_metric(est, y),
        channel_estimate=channel_estimate(est, y),
        codewords_examined=len(grid.amplitudes) * len(grid.phases),
    )


def _magnitude_rings(c: Constellation) -> list[np.ndarray]:
    """Constellation points grouped by squared magnitude, ascending."""
    pts = np.asarray(c.points(), dtype=np.complex128)
    e = np.round(np.abs(pts) ** 2).astype(np.int64)
    return [pts[e == v] for v in sorted(set(e.tolist()))]


def qbr_decode(
    y: np.ndarray,
    c: Constellation,
    phases: tuple[float, ...] | None = None,
    cap: int = DEFAULT_QBR_CAP,
) -> DecodeResult:
    """Quantized-best-ray baseline.

    Enumerates every per-symbol magnitude-ring sequence (M/2 rings for PAM,
    one per distinct |x| for QAM); under each phase guess the symbol inside
    its hypothesized ring is picked coherently, and the resulting codeword
    is scored noncoherently.  Hypothesis count = rings^T * len(phases).
    """
    y = np.asarray(y, dtype=np.complex128)
    T = y.size
    if phases is None:
        phases = _phase_fan(4 if c.is_complex else 2)
    rings = _magnitude_rings(c)
    R = len(rings)
    n_hyp = R**T * len(phases)
    if R**T > cap:
        raise CapExceededError(f"cap exceeded: {R}^{T} ring sequences > cap {cap}")

    best = None
    best_met = -np.inf
    seqs = np.array(list(itertools.product(range(R), repeat=T)), dtype=np.int64)
    for phi in phases:
        z = np.exp(-1j * phi) * y
        # rep[t, r]: best point of ring r for symbol t under this phase guess
        rep = np.empty((T, R), dtype=np.complex128)
        for r, ring in enumerate(rings):
            score = np.real(np.conj(ring)[None, :] * z[:, None])
            rep[:, r] = ring[np.argmax(score, axis=1)]
        X = rep[np.arange(T)[None, :], seqs]
        num = np.abs(X.conj() @ y) ** 2
        den = np.sum(np.abs(X) ** 2, axis=1)
        mets = num / den
        i = int(np.argmax(mets))
        if mets[i] > best_met:
            best, best_met = X[i], float(mets[i])
    est = canonicalize_phase(best if c.is_complex else best.real, c)
    return DecodeResult(
        estimate=est,
        metric=glrt_metric(est, y),
        channel_estimate=channel_estimate(est, y),
        codewords_examined=n_hyp,
    )


def default_pilot(c: Constellation) -> complex:
    """Average-energy pilot: sqrt(E) e^{i pi/4} for QAM, sqrt(E) for PAM."""
    e = np.sqrt(c.average_energy())
    return complex(e * np.exp(1j * np.pi / 4)) if c.is_complex else complex(e)


def pat_decode(
    y: np.ndarray,
    c: Constellation,
    pilot: complex | None = None,
) -> DecodeResult:
    """Pilot-assisted transmission: estimate the channel off symbol 1, detect 2..T.

    ``estimate`` holds the T-1 data symbols only (the pilot is known and
    not generally a constellation point); the metric is computed on the
    pilot-prefixed block.  No phase folding: detection here is coherent.
    """
    y = np.asarray(y, dtype=np.complex128)
    if y.size < 2:
        raise ValueError("pilot-assisted detection needs at least two symbols")
    if pilot is None:
        pilot = default_pilot(c)
    h = np.conj(pilot) * y[0] / abs(pilot) ** 2
    if h == 0.0:
        h = 1.0
    data = nearest_codeword(y[1:] / h, c)
    full = np.concatenate([[pilot], np.asarray(data, dtype=np.complex128)])
    return DecodeResult(
        estimate=data,
        metric=glrt_metric(full, y),
        channel_estimate=complex(h),
        codewords_examined=1,
    )
