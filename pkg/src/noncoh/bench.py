"""Wall-time and work benchmarks for the decoders, per kernel backend."""

from __future__ import annotations

import time
from statistics import median

import numpy as np

from .backend import available_backends, default_backend_name
from .constellation import Constellation
from .glrt import exhaustive_glrt
from .line_search import decode_pam_real
from .plane_search import decode_pam_complex, decode_qam
from .subopt import decode_pam_complex_subopt, decode_qam_multiline

BENCH_DECODERS = (
    "pam-real",
    "pam-complex",
    "pam-subopt",
    "qam-optimal",
    "qam-multiline",
    "exhaustive",
)


def _instance(decoder: str, c: Constellation, T: int, rep: int, seed: int, snr_db: float):
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=(T, rep)))
    )
    pts = np.asarray(c.points(), dtype=np.complex128)
    x = pts[rng.integers(0, pts.size, T)]
    sigma2 = c.average_energy() / (10.0 ** (snr_db / 10.0))
    if decoder == "pam-real":
        h = float(rng.standard_normal())
        return np.real(h * x) + np.sqrt(sigma2) * rng.standard_normal(T)
    re, im = rng.standard_normal(2)
    h = complex(re, im) / np.sqrt(2.0)
    n = rng.standard_normal(2 * T)
    return h * x + np.sqrt(sigma2 / 2.0) * (n[0::2] + 1j * n[1::2])


def _call(decoder: str, y, c: Constellation, backend: str | None):
    if decoder == "pam-real":
        return decode_pam_real(y, c, backend=backend)
    if decoder == "pam-complex":
        return decode_pam_complex(y, c, backend=backend)
    if decoder == "pam-subopt":
        return decode_pam_complex_subopt(y, c, backend=backend)
    if decoder == "qam-optimal":
        return decode_qam(y, c, backend=backend)
    if decoder == "qam-multiline":
        return decode_qam_multiline(y, c, backend=backend)
    if decoder == "exhaustive":
        return exhaustive_glrt(y, c)
    raise ValueError(f"unknown bench decoder {decoder!r}")


def bench_decoder(
    decoder: str,
    c: Constellation,
    block_lengths: list[int],
    reps: int = 5,
    seed: int = 0,
    snr_db: float = 30.0,
    backend: str | None = None,
) -> list[dict]:
    """Median wall time and mean work per block length for one decoder.

    Each rep decodes a fresh seeded instance; the first call per size warms
    caches and is excluded from timing.
    """
    name = backend or default_backend_name()
    rows = []
    for T in block_lengths:
        times = []
        counts = []
        _call(decoder, _instance(decoder, c, T, 0, seed, snr_db), c, backend)
        for rep in range(reps):
            y = _instance(decoder, c, T, rep + 1, seed, snr_db)
            t0 = time.perf_counter()
            r = _call(decoder, y, c, backend)
            times.append(time.perf_counter() - t0)
            counts.append(r.codewords_examined)
        rows.append(
            {
                "decoder": decoder,
                "backend": name if decoder != "exhaustive" else "numpy",
                "m": c.m,
                "block_length": T,
                "median_seconds": median(times),
                "mean_examined": sum(counts) / len(counts),
                "reps": reps,
            }
        )
    return rows


def bench_backends(
    decoder: str,
    c: Constellation,
    block_lengths: list[int],
    reps: int = 5,
    seed: int = 0,
) -> list[dict]:
    """Same benchmark on every available backend, for side-by-side comparison."""
    rows = []
    for name in available_backends():
        rows += bench_decoder(
            decoder, c, block_lengths, reps=reps, seed=seed, backend=name
        )
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    cols = ("decoder", "backend", "m", "block_length", "median_seconds",
            "mean_examined", "reps")
    out = [",".join(cols)]
    for row in rows:
        cells = []
        for k in cols:
            v = row[k]
            cells.append(f"{v:.6g}" if isinstance(v, float) else str(v))
        out.append(",".join(cells))
    return "\n".join(out) + "\n"
