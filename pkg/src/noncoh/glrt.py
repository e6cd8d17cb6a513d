"""GLRT metric, joint channel estimate, and the exhaustive reference detector.

For an observation y = h x + n with h unknown, the concentrated likelihood
ratio of hypothesis x is L(x) = |x^H y|^2 / ||x||^2, maximized jointly with
the scalar channel estimate h_hat(x) = x^H y / ||x||^2.  The exhaustive
search below is the ground-truth oracle for every fast detector in this
package; it deliberately shares no code with the search kernels.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .constellation import (
    Constellation,
    canonical_key,
    canonicalize_phase,
)

#: Largest codebook the exhaustive oracle will enumerate.
DEFAULT_ORACLE_CAP = 10**7

#: Relative tolerance under which two metric values count as tied.
TIE_RTOL = 1e-12


class CapExceededError(RuntimeError):
    """Raised when an exhaustive enumeration would exceed the configured cap."""


@dataclass
class DecodeResult:
    """Output of any block detector.

    ``estimate`` is the decoded codeword (canonical phase representative for
    noncoherent detectors), ``metric`` the GLRT value of that estimate
    against the observation, ``channel_estimate`` the implied scalar channel
    for the returned representative, and ``codewords_examined`` the number
    of distinct metric evaluations the search performed.  ``ambiguous`` is
    set when the detector saw a cross-class metric tie (a divisor
    ambiguity), in which case the canonical order picked the winner.
    """

    estimate: np.ndarray
    metric: float
    channel_estimate: complex
    codewords_examined: int
    ambiguous: bool = False


def glrt_metric(x: np.ndarray, y: np.ndarray) -> float:
    """L(x) = |x^H y|^2 / ||x||^2 (scale- and global-phase-invariant in x)."""
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    e = np.vdot(x, x).real
    if e == 0.0:
        raise ValueError("GLRT metric undefined for the zero hypothesis")
    return float(abs(np.vdot(x, y)) ** 2 / e)


def channel_estimate(x: np.ndarray, y: np.ndarray) -> complex:
    """Joint ML channel estimate x^H y / ||x||^2 for hypothesis x."""
    x = np.asarray(x, dtype=np.complex128)
    e = np.vdot(x, x).real
    if e == 0.0:
        raise ValueError("channel estimate undefined for the zero hypothesis")
    return complex(np.vdot(x, y) / e)


def cos2_angle(x: np.ndarray, y: np.ndarray) -> float:
    """Squared cosine of the angle between x and y; L(x) = cos^2 * ||y||^2."""
    y = np.asarray(y, dtype=np.complex128)
    n2 = np.vdot(y, y).real
    if n2 == 0.0:
        raise ValueError("angle undefined for the zero observation")
    return glrt_metric(x, y) / n2


def nn_interval_membership(x: np.ndarray, y: np.ndarray, lam: complex, c: Constellation) -> bool:
    """Whether x is the componentwise nearest codeword to lam * y."""
    from .constellation import nearest_codeword

    q = nearest_codeword(lam * np.asarray(y, dtype=np.complex128), c)
    return bool(np.array_equal(np.asarray(q), np.asarray(x)))


@lru_cache(maxsize=32)
def _codebook(kind: str, m: int, block_length: int) -> np.ndarray:
    """All codewords as a (size^T, T) matrix; cached per shape."""
    c = Constellation(kind, m)
    pts = c.points()
    grids = np.meshgrid(*([pts] * block_length), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def enumerate_codebook(c: Constellation, block_length: int, cap: int = DEFAULT_ORACLE_CAP) -> np.ndarray:
    n = c.size**block_length
    if n > cap:
        raise CapExceededError(
            f"cap exceeded: {c.size}^{block_length} = {n} codewords > cap {cap}"
        )
    return _codebook(c.kind, c.m, block_length)


def exhaustive_glrt(
    y: np.ndarray,
    c: Constellation,
    cap: int = DEFAULT_ORACLE_CAP,
) -> DecodeResult:
    """Brute-force GLRT maximization over the full codebook.

    Metric ties within one phase-ambiguity class collapse under
    canonicalization; ties across classes are genuine divisor ambiguities
    and set ``ambiguous``.  Among tied classes the lexicographically
    smallest canonical representative is returned, so the result does not
    depend on enumeration order.
    """
    y = np.asarray(y, dtype=np.complex128)
    book = enumerate_codebook(c, y.size, cap)
    num = np.abs(book.conj() @ y) ** 2
    den = np.sum(np.abs(book) ** 2, axis=1)
    metrics = num / den
    best = float(metrics.max())
    tied = np.flatnonzero(metrics >= best * (1.0 - TIE_RTOL))

    classes: dict[tuple, np.ndarray] = {}
    for idx in tied:
        cand = book[idx] if c.is_complex else book[idx].real
        classes.setdefault(canonical_key(cand, c), cand)
    win_key = min(classes)
    winner = canonicalize_phase(classes[win_key], c)
    return DecodeResult(
        estimate=winner,
        metric=glrt_metric(winner, y),
        channel_estimate=channel_estimate(winner, y),
        codewords_examined=book.shape[0],
        ambiguous=len(classes) > 1,
    )
