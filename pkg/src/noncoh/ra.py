"""Parity-anchored 16-QAM block code that removes noncoherent ambiguities.

A block of T symbols carries 4(T-1) data bits on symbols 2..T under a
per-axis Gray map; symbol 1 is a first-quadrant pilot chosen by two parity
bits of the data.  Any nontrivial rotation moves the pilot out of the first
quadrant and any divisor partner breaks a parity, so a valid codeword pins
both the phase and the scale class.  Decoding filters the optimal plane
search's candidate stream down to parity-valid rotations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .constellation import qam
from .glrt import DecodeResult, channel_estimate, glrt_metric
from .plane_search import plane_candidate_codewords

#: Per-axis Gray map for data symbols, bit pair -> level.
AXIS_MAP = {(0, 0): -3, (0, 1): -1, (1, 1): 1, (1, 0): 3}
AXIS_DEMAP = {v: k for k, v in AXIS_MAP.items()}

#: Pilot choice by parity pair (p1, p2).
PILOT_MAP = {(0, 0): 1 + 1j, (0, 1): 1 + 3j, (1, 1): 3 + 3j, (1, 0): 3 + 1j}

#: Generators of the four scale classes of 16-QAM (x = unit * generator).
ASSOCIATE_GENERATORS = (1 + 1j, 1 + 3j, 3 + 3j, 3 + 1j)


def data_bit_count(block_length: int) -> int:
    return 4 * (block_length - 1)


def ra_parities(bits: np.ndarray) -> tuple[int, int]:
    """(p1, p2): odd overall parity and odd parity of the even-position bits."""
    bits = np.asarray(bits, dtype=np.int64)
    p1 = (1 + int(bits.sum())) % 2
    p2 = (1 + int(bits[1::2].sum())) % 2
    return p1, p2


def ra_encode(bits: np.ndarray, block_length: int) -> np.ndarray:
    """Data bits -> length-T codeword: parity pilot, then Gray-mapped symbols.

    Bits 4l-3..4l (1-based) drive data symbol l+1: the first pair sets the
    real axis, the second the imaginary axis.
    """
    bits = np.asarray(bits, dtype=np.int64)
    if bits.size != data_bit_count(block_length):
        raise ValueError(
            f"need {data_bit_count(block_length)} bits for T={block_length}, got {bits.size}"
        )
    if bits.size and not np.isin(bits, (0, 1)).all():
        raise ValueError("bits must be 0/1")
    out = np.empty(block_length, dtype=np.complex128)
    out[0] = PILOT_MAP[ra_parities(bits)]
    q = bits.reshape(-1, 4)
    for i, (b0, b1, b2, b3) in enumerate(q):
        out[i + 1] = AXIS_MAP[(b0, b1)] + 1j * AXIS_MAP[(b2, b3)]
    return out


def ra_bits(x: np.ndarray) -> np.ndarray:
    """Demap data symbols 2..T back to bits (inverse of the encoder's tail)."""
    x = np.asarray(x, dtype=np.complex128)
    out = np.empty(4 * (x.size - 1), dtype=np.int64)
    for i, sym in enumerate(x[1:]):
        re = int(round(sym.real))
        im = int(round(sym.imag))
        if re not in AXIS_DEMAP or im not in AXIS_DEMAP:
            raise ValueError(f"symbol {sym} is not a 16-QAM point")
        out[4 * i : 4 * i + 2] = AXIS_DEMAP[re]
        out[4 * i + 2 : 4 * i + 4] = AXIS_DEMAP[im]
    return out


def ra_check(x: np.ndarray) -> bool:
    """Whether x is a valid codeword: first-quadrant pilot matching the parities."""
    x = np.asarray(x, dtype=np.complex128)
    if x.size < 2:
        return False
    p = x[0]
    if p.real <= 0 or p.imag <= 0:
        return False
    try:
        bits = ra_bits(x)
    except ValueError:
        return False
    want = PILOT_MAP[ra_parities(bits)]
    return complex(p) == want


def _first_quadrant_rotation(x: np.ndarray) -> np.ndarray:
    """The unique i^k x whose first symbol has positive real and imaginary parts."""
    for _ in range(4):
        if x[0].real > 0 and x[0].imag > 0:
            return x
        x = 1j * x
    raise ValueError("no rotation lands in the open first quadrant")


@dataclass
class RaDecodeResult:
    """Parity-filtered decode: recovered bits plus the inner search result.

    ``parity_ok`` is False when no candidate satisfied the code, in which
    case ``bits`` come from the best unconstrained candidate's quadrant
    anchor as a deterministic fallback.
    """

    bits: np.ndarray
    result: DecodeResult
    parity_ok: bool


def ra_decode(
    y: np.ndarray,
    interior: str = "epsilon",
    backend: str | None = None,
) -> RaDecodeResult:
    """Best parity-valid codeword among the plane search's candidates.

    Rotations cost nothing: the metric is rotation-invariant and exactly
    one rotation of each candidate has a first-quadrant anchor, so each
    candidate yields one parity test.
    """
    y = np.asarray(y, dtype=np.complex128)
    c = qam(16)
    X, metrics = plane_candidate_codewords(y, c, interior=interior, backend=backend)
    order = np.argsort(-metrics, kind="stable")
    chosen = None
    ok = False
    for i in order:
        cand = _first_quadrant_rotation(X[i])
        if ra_check(cand):
            chosen, ok = cand, True
            break
    if chosen is None:
        chosen = _first_quadrant_rotation(X[int(order[0])])
    result = DecodeResult(
        estimate=chosen,
        metric=glrt_metric(chosen, y),
        channel_estimate=channel_estimate(chosen, y),
        codewords_examined=X.shape[0],
        ambiguous=False,
    )
    return RaDecodeResult(bits=ra_bits(chosen), result=result, parity_ok=ok)


# ---------------------------------------------------------------------------
# ambiguity audit
# ---------------------------------------------------------------------------

def _ray_key(x: np.ndarray) -> tuple:
    """Exact invariant of the complex line through x: x ~ cx share a key."""
    x0 = complex(x[0])
    d = int(round(abs(x0) ** 2))
    key = []
    for sym in x:
        u = complex(sym) * x0.conjugate()
        key.append(
            (Fraction(int(round(u.real)), d), Fraction(int(round(u.imag)), d))
        )
    return tuple(key)


def _pure_class(x: np.ndarray) -> complex | None:
    """The generator g if every symbol of x is a unit multiple of g, else None."""
    for g in ASSOCIATE_GENERATORS:
        ok = True
        for sym in x:
            r = complex(sym) / g
            if round(r.real) ** 2 + round(r.imag) ** 2 != 1 or abs(r - complex(round(r.real), round(r.imag))) > 1e-9:
                ok = False
                break
        if ok:
            return g
    return None


@dataclass
class AuditReport:
    """Ambiguity scan over the valid-codeword set at one block length."""

    block_length: int
    mode: str
    valid_count: int
    violations: list[dict] = field(default_factory=list)
    pure_class_counts: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> str:
        return json.dumps(
            {
                "block_length": self.block_length,
                "mode": self.mode,
                "valid_count": self.valid_count,
                "ok": self.ok,
                "violations": self.violations,
                "pure_class_counts": self.pure_class_counts,
            },
            indent=2,
            sort_keys=True,
        )


def _iter_valid_exhaustive(block_length: int):
    nbits = data_bit_count(block_length)
    for v in range(1 << nbits):
        bits = np.array([(v >> k) & 1 for k in range(nbits)], dtype=np.int64)
        yield ra_encode(bits, block_length)


def _iter_valid_associates(block_length: int):
    """Valid codewords whose symbols all sit in one scale class.

    A scale ambiguity needs both partners inside (distinct) pure classes,
    so for T beyond exhaustive reach the scan restricts to these.
    """
    units = (1, 1j, -1, -1j)
    for g in ASSOCIATE_GENERATORS:
        for v in range(4**block_length):
            x = np.empty(block_length, dtype=np.complex128)
            w = v
            for t in range(block_length):
                x[t] = units[w & 3] * g
                w >>= 2
            if ra_check(x):
                yield x


def ambiguity_audit(block_length: int, mode: str | None = None) -> AuditReport:
    """Scan valid codewords for residual scale or rotation ambiguities.

    Exhaustive up to T = 4 (the valid set is the encoder image, 16^(T-1)
    words); T = 5, 6 fall back to the pure-scale-class subsets that any
    ambiguity pair must occupy.  Two valid codewords on the same complex
    ray constitute a violation; rotation ambiguities are a special case
    (unit ray ratio) and are classified separately.
    """
    if block_length < 2:
        raise ValueError("audit needs block length >= 2")
    if mode is None:
        mode = "exhaustive" if block_length <= 4 else "associates"
    if mode == "exhaustive":
        if block_length > 4:
            raise ValueError("exhaustive audit supported only for T <= 4")
        words = _iter_valid_exhaustive(block_length)
    elif mode == "associates":
        if block_length > 6:
            raise ValueError("associate-class audit supported only for T <= 6")
        words = _iter_valid_associates(block_length)
    else:
        raise ValueError(f"unknown audit mode {mode!r}")

    rays: dict[tuple, list[np.ndarray]] = {}
    pure_counts = {str(g): 0 for g in ASSOCIATE_GENERATORS}
    n_valid = 0
    for x in words:
        n_valid += 1
        g = _pure_class(x)
        if g is not None:
            pure_counts[str(g)] += 1
        rays.setdefault(_ray_key(x), []).append(x.copy())

    violations = []
    for members in rays.values():
        if len(members) < 2:
            continue
        a = members[0]
        for b in members[1:]:
            ratio = complex(b[0]) / complex(a[0])
            kind = "rotation" if abs(abs(ratio) - 1.0) < 1e-12 else "scale"
            violations.append(
                {
                    "kind": kind,
                    "first": [str(v) for v in a],
                    "second": [str(v) for v in b],
                    "ratio": str(ratio),
                }
            )
    return AuditReport(
        block_length=block_length,
        mode=mode,
        valid_count=n_valid,
        violations=violations,
        pure_class_counts=pure_counts,
    )
