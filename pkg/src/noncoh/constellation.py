"""PAM and square-QAM alphabets, lattice quantization, and phase folding.

Symbols live on the odd-integer grid: M-ary PAM uses levels
{-(M-1), ..., -1, +1, ..., M-1}; M^2-ary square QAM uses the same levels
independently on the real and imaginary axes.  Everything downstream
(detectors, baselines, simulation) speaks in terms of these objects.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PAM = "pam"
QAM = "qam"


@dataclass(frozen=True)
class Constellation:
    """Symbol alphabet: ``kind`` is "pam" or "qam", ``m`` the per-axis order.

    PAM has ``m`` levels; square QAM has ``m**2`` points whose real and
    imaginary parts are both drawn from the m-ary level set.  ``m`` must be
    even so the levels are symmetric odd integers.
    """

    kind: str
    m: int

    def __post_init__(self) -> None:
        if self.kind not in (PAM, QAM):
            raise ValueError(f"unknown constellation kind {self.kind!r}")
        if self.m < 2 or self.m % 2:
            raise ValueError(f"per-axis order must be even and >= 2, got {self.m}")

    @property
    def is_complex(self) -> bool:
        return self.kind == QAM

    @property
    def size(self) -> int:
        """Number of constellation points (M for PAM, M^2 for QAM)."""
        return self.m if self.kind == PAM else self.m * self.m

    @property
    def bits_per_symbol(self) -> int:
        return self.size.bit_length() - 1

    def levels(self) -> np.ndarray:
        """Per-axis odd levels, ascending."""
        return np.arange(-(self.m - 1), self.m, 2, dtype=np.int64)

    def points(self) -> np.ndarray:
        """All constellation points (float64 for PAM, complex128 for QAM)."""
        lv = self.levels().astype(np.float64)
        if self.kind == PAM:
            return lv
        re, im = np.meshgrid(lv, lv, indexing="ij")
        return (re + 1j * im).ravel()

    def average_energy(self) -> float:
        """Mean squared magnitude over the alphabet (e.g. 21 for 8-PAM, 10 for 16-QAM)."""
        p = self.points()
        return float(np.mean(np.abs(p) ** 2))


def pam(m: int) -> Constellation:
    return Constellation(PAM, m)


def qam(order: int) -> Constellation:
    """Square QAM by total order (16 -> 4 levels per axis)."""
    m = int(round(np.sqrt(order)))
    if m * m != order:
        raise ValueError(f"square QAM order must be a perfect square, got {order}")
    return Constellation(QAM, m)


def quantize_axis(v, m: int):
    """Nearest odd level to ``v``, clamped to [-(m-1), m-1].

    On an even-integer boundary (equidistant neighbours) the upper level
    wins: the map is 2*floor(v/2)+1 before clamping, so -2.0 -> -1 and
    0.0 -> +1.  Accepts scalars or arrays; returns int64.
    """
    lv = 2.0 * np.floor(np.asarray(v, dtype=np.float64) / 2.0) + 1.0
    out = np.clip(lv, -(m - 1), m - 1).astype(np.int64)
    return out if out.ndim else int(out)


def nearest_codeword(point: np.ndarray, c: Constellation) -> np.ndarray:
    """Componentwise nearest constellation point to an arbitrary vector.

    For PAM the input is real and the result is an int64 level vector; for
    QAM the input is complex and real/imaginary parts quantize separately
    (the lattice is a product, so the joint minimum splits per axis).
    """
    point = np.asarray(point)
    if c.is_complex:
        re = quantize_axis(point.real, c.m)
        im = quantize_axis(point.imag, c.m)
        return re + 1j * im.astype(np.float64)
    return quantize_axis(point.real, c.m)


def to_real(x: np.ndarray) -> np.ndarray:
    """Interleaved real embedding (Re x_1, Im x_1, ..., Re x_T, Im x_T)."""
    x = np.asarray(x, dtype=np.complex128)
    out = np.empty(2 * x.size, dtype=np.float64)
    out[0::2] = x.real
    out[1::2] = x.imag
    return out


def to_complex(u: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_real`."""
    u = np.asarray(u, dtype=np.float64)
    if u.size % 2:
        raise ValueError("real embedding must have even length")
    return u[0::2] + 1j * u[1::2]


@dataclass(frozen=True)
class PlaneBasis:
    """Orthogonal basis of the real plane {(a+bi) y : a, b real} inside R^{2T}.

    ``columns`` is (2T, 2): column 0 is the embedding of y, column 1 the
    embedding of iy.  The columns are exactly orthogonal and both have
    squared norm ||y||^2, and columns @ (a, b) embeds (a+bi) y.
    """

    columns: np.ndarray

    @property
    def block_length(self) -> int:
        return self.columns.shape[0] // 2


def build_plane_basis(y: np.ndarray) -> PlaneBasis:
    y = np.asarray(y, dtype=np.complex128)
    if not np.any(y):
        raise ValueError("plane basis undefined for the zero observation")
    cols = np.empty((2 * y.size, 2), dtype=np.float64)
    cols[:, 0] = to_real(y)
    cols[:, 1] = to_real(1j * y)
    return PlaneBasis(cols)


def _phase_rotations(x: np.ndarray, c: Constellation) -> list[np.ndarray]:
    if c.is_complex:
        return [x, 1j * x, -x, -1j * x]
    return [x, -x]


def _lex_key(x: np.ndarray, c: Constellation) -> tuple:
    if c.is_complex:
        k = np.empty(2 * x.size, dtype=np.int64)
        k[0::2] = np.rint(np.asarray(x).real).astype(np.int64)
        k[1::2] = np.rint(np.asarray(x).imag).astype(np.int64)
    else:
        k = np.rint(np.asarray(x).real).astype(np.int64)
    return tuple(k.tolist())


def canonicalize_phase(x: np.ndarray, c: Constellation) -> np.ndarray:
    """Canonical representative of x under the phase-rotation ambiguity group.

    QAM folds over {1, i, -1, -i}, PAM over {1, -1}; the representative is
    the rotation whose interleaved (Re, Im) integer string is
    lexicographically smallest, which makes the map idempotent and
    class-constant.
    """
    x = np.asarray(x)
    best = None
    best_key = None
    for cand in _phase_rotations(x, c):
        key = _lex_key(cand, c)
        if best_key is None or key < best_key:
            best, best_key = cand, key
    if c.is_complex:
        return np.asarray(best, dtype=np.complex128)
    return np.rint(np.asarray(best).real).astype(np.int64)


def canonical_key(x: np.ndarray, c: Constellation) -> tuple:
    """Hashable canonical identifier of the phase-ambiguity class of x."""
    return _lex_key(canonicalize_phase(x, c), c)
