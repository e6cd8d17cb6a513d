"""Seeded Monte Carlo sweeps over SNR for every detector in the package.

Each (SNR index, trial index) pair owns a counter-based RNG substream, so
results are independent of worker count and chunking: rerunning a sweep
with the same seed reproduces the output byte for byte.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import baselines, ra
from .backend import default_backend_name
from .constellation import PAM, QAM, Constellation, canonicalize_phase
from .glrt import exhaustive_glrt
from .line_search import decode_pam_real
from .plane_search import decode_pam_complex, decode_qam
from .subopt import decode_pam_complex_subopt, decode_qam_multiline

CHANNELS = ("real-gaussian", "rayleigh", "phase")
DECODERS = ("optimal", "subopt", "exhaustive", "grid", "qbr", "pat", "ra")
ERROR_MODES = ("ambiguity_class", "exact")


def count_error(est: np.ndarray, truth: np.ndarray, c: Constellation, mode: str) -> bool:
    """Block-error indicator.

    ``ambiguity_class`` compares canonical phase representatives (a decoder
    cannot be charged for an unresolvable rotation); ``exact`` compares
    symbols directly, which is the right notion once a pilot or parity
    anchor resolves the rotation.
    """
    if mode == "exact":
        return not np.array_equal(np.asarray(est), np.asarray(truth))
    if mode != "ambiguity_class":
        raise ValueError(f"unknown error mode {mode!r}")
    a = canonicalize_phase(est, c)
    b = canonicalize_phase(truth, c)
    return not np.array_equal(a, b)


def _gray_bits(level: int, m: int) -> list[int]:
    i = (level + m - 1) >> 1
    g = i ^ (i >> 1)
    w = m.bit_length() - 1
    return [(g >> (w - 1 - k)) & 1 for k in range(w)]


def _gray_level(bits: tuple[int, ...], m: int) -> int:
    g = 0
    for b in bits:
        g = (g << 1) | int(b)
    i = g
    s = i >> 1
    while s:
        i ^= s
        s >>= 1
    return 2 * i - (m - 1)


def symbols_to_bits(x: np.ndarray, c: Constellation) -> np.ndarray:
    """Reflected-Gray demap, per axis for QAM (real bits first)."""
    out: list[int] = []
    for sym in np.asarray(x):
        if c.is_complex:
            out += _gray_bits(int(round(sym.real)), c.m)
            out += _gray_bits(int(round(sym.imag)), c.m)
        else:
            out += _gray_bits(int(round(float(np.real(sym)))), c.m)
    return np.array(out, dtype=np.int64)


def bits_to_symbols(bits: np.ndarray, c: Constellation) -> np.ndarray:
    """Inverse of :func:`symbols_to_bits`."""
    bits = np.asarray(bits, dtype=np.int64)
    w = c.m.bit_length() - 1
    per = 2 * w if c.is_complex else w
    if bits.size % per:
        raise ValueError(f"bit count {bits.size} not a multiple of {per}")
    g = bits.reshape(-1, per)
    if c.is_complex:
        re = [_gray_level(tuple(row[:w]), c.m) for row in g]
        im = [_gray_level(tuple(row[w:]), c.m) for row in g]
        return np.array(re, dtype=np.float64) + 1j * np.array(im, dtype=np.float64)
    return np.array([_gray_level(tuple(row), c.m) for row in g], dtype=np.int64)


def count_bit_errors(est: np.ndarray, truth: np.ndarray, c: Constellation) -> int:
    """Hamming distance between the Gray demaps of two symbol vectors."""
    return int(np.sum(symbols_to_bits(est, c) != symbols_to_bits(truth, c)))


@dataclass(frozen=True)
class SweepConfig:
    """One sweep: fixed shape and decoder, a list of SNR points, shared seed.

    ``m`` follows the Constellation convention: the per-axis order, so 8-PAM
    is (kind="pam", m=8) and 16-QAM is (kind="qam", m=4).  Invalid
    combinations raise at construction.
    """

    kind: str
    m: int
    block_length: int
    decoder: str
    channel: str
    snr_db: tuple[float, ...]
    trials: int
    seed: int
    error_mode: str = "ambiguity_class"
    lines: int | None = None
    interior: str = "epsilon"
    backend: str | None = None

    def __post_init__(self) -> None:
        self.validate()

    def constellation(self) -> Constellation:
        return Constellation(self.kind, self.m)

    def validate(self) -> None:
        if self.decoder not in DECODERS:
            raise ValueError(f"unknown decoder {self.decoder!r}")
        if self.channel not in CHANNELS:
            raise ValueError(f"unknown channel {self.channel!r}")
        if self.error_mode not in ERROR_MODES:
            raise ValueError(f"unknown error mode {self.error_mode!r}")
        if self.channel == "real-gaussian" and self.kind != PAM:
            raise ValueError("real-gaussian channel models a real PAM link")
        if self.decoder == "ra" and (self.kind, self.m) != (QAM, 4):
            raise ValueError("parity-coded decoding is defined for 16-QAM")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        self.constellation()


def _trial_rng(seed: int, snr_idx: int, trial: int) -> np.random.Generator:
    seq = np.random.SeedSequence(seed, spawn_key=(snr_idx, trial))
    return np.random.Generator(np.random.Philox(seq))


def _draw_channel(rng: np.random.Generator, channel: str) -> complex:
    if channel == "real-gaussian":
        return float(rng.standard_normal())
    if channel == "rayleigh":
        re, im = rng.standard_normal(2)
        return complex(re, im) / np.sqrt(2.0)
    theta = rng.uniform(0.0, 2.0 * np.pi)
    return complex(np.exp(1j * theta))


def _run_trial(cfg: SweepConfig, snr_idx: int, trial: int) -> tuple[int, int, int, int, int]:
    """Returns (block_err, bit_err, bit_total, examined, ambiguous)."""
    c = cfg.constellation()
    rng = _trial_rng(cfg.seed, snr_idx, trial)
    pilot_scheme = cfg.decoder in ("pat", "ra")
    if pilot_scheme:
        bits = rng.integers(0, 2, 4 * (cfg.block_length - 1) if cfg.decoder == "ra"
                            else (cfg.block_length - 1) * (c.bits_per_symbol))
        if cfg.decoder == "ra":
            x = ra.ra_encode(bits, cfg.block_length)
        else:
            data = bits_to_symbols(bits, c)
            x = np.concatenate([[baselines.default_pilot(c)], np.asarray(data, dtype=np.complex128)])
    else:
        pts = c.points()
        x = pts[rng.integers(0, pts.size, cfg.block_length)]

    h = _draw_channel(rng, cfg.channel)
    es = c.average_energy()
    sigma2 = es / (10.0 ** (cfg.snr_db[snr_idx] / 10.0))
    if cfg.channel == "real-gaussian":
        y = np.real(h * x) + np.sqrt(sigma2) * rng.standard_normal(cfg.block_length)
    else:
        n = rng.standard_normal(2 * cfg.block_length)
        noise = np.sqrt(sigma2 / 2.0) * (n[0::2] + 1j * n[1::2])
        y = h * x + noise

    name = cfg.decoder
    if name == "optimal":
        if c.is_complex:
            r = decode_qam(y, c, interior=cfg.interior, backend=cfg.backend)
        elif cfg.channel == "real-gaussian":
            r = decode_pam_real(y, c, backend=cfg.backend)
        else:
            r = decode_pam_complex(y, c, interior=cfg.interior, backend=cfg.backend)
    elif name == "subopt":
        if c.is_complex:
            r = decode_qam_multiline(y, c, lines=cfg.lines, backend=cfg.backend)
        else:
            r = decode_pam_complex_subopt(y, c, backend=cfg.backend)
    elif name == "exhaustive":
        r = exhaustive_glrt(y, c)
    elif name == "grid":
        r = baselines.grid_search_decode(y, c)
    elif name == "qbr":
        r = baselines.qbr_decode(y, c)
    elif name == "pat":
        r = baselines.pat_decode(y, c)
    else:
        rr = ra.ra_decode(y, interior=cfg.interior, backend=cfg.backend)
        err = int(not np.array_equal(rr.bits, bits))
        bit_err = int(np.sum(rr.bits != bits))
        return err, bit_err, bits.size, rr.result.codewords_examined, 0

    if name == "pat":
        truth = x[1:]
        err = int(count_error(r.estimate, truth, c, "exact"))
        bit_err = count_bit_errors(r.estimate, truth, c)
        return err, bit_err, bits.size, r.codewords_examined, 0

    err = int(count_error(r.estimate, x, c, cfg.error_mode))
    est_c = canonicalize_phase(r.estimate, c)
    truth_c = canonicalize_phase(x, c)
    bit_err = count_bit_errors(est_c, truth_c, c)
    bit_total = c.bits_per_symbol * cfg.block_length
    return err, bit_err, bit_total, r.codewords_examined, int(r.ambiguous)


def _run_chunk(cfg: SweepConfig, snr_idx: int, lo: int, hi: int) -> tuple[int, int, int, int, int]:
    sums = (0, 0, 0, 0, 0)
    for j in range(lo, hi):
        out = _run_trial(cfg, snr_idx, j)
        sums = tuple(a + b for a, b in zip(sums, out))
    return sums


@dataclass
class SweepResult:
    """Per-SNR error rates plus the configuration that produced them."""

    config: dict
    rows: list[dict] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps({"config": self.config, "rows": self.rows},
                          indent=2, sort_keys=True)

    def to_csv(self) -> str:
        cols = ("snr_db", "trials", "errors", "cer", "bit_errors", "ber",
                "mean_examined", "ambiguous")
        lines = [",".join(cols)]
        for row in self.rows:
            cells = []
            for k in cols:
                v = row[k]
                cells.append(f"{v:.6g}" if isinstance(v, float) else str(v))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def run_sweep(cfg: SweepConfig, workers: int = 1) -> SweepResult:
    """Run every SNR point of a sweep; worker count never changes the numbers."""
    cfg.validate()
    resolved = replace(cfg, backend=cfg.backend or default_backend_name())
    result = SweepResult(config=asdict(resolved) | {"snr_db": list(cfg.snr_db)})
    chunk = max(64, cfg.trials // (max(1, workers) * 8) + 1)
    bounds = [(lo, min(lo + chunk, cfg.trials)) for lo in range(0, cfg.trials, chunk)]
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for i, snr in enumerate(cfg.snr_db):
            if pool is None:
                parts = [_run_chunk(resolved, i, lo, hi) for lo, hi in bounds]
            else:
                parts = list(pool.map(_run_chunk, *zip(*[(resolved, i, lo, hi) for lo, hi in bounds])))
            err, bit_err, bit_total, examined, amb = (sum(p[k] for p in parts) for k in range(5))
            result.rows.append({
                "snr_db": float(snr),
                "trials": cfg.trials,
                "errors": err,
                "cer": err / cfg.trials,
                "bit_errors": bit_err,
                "ber": bit_err / bit_total if bit_total else 0.0,
                "mean_examined": examined / cfg.trials,
                "ambiguous": amb,
            })
    finally:
        if pool is not None:
            pool.shutdown()
    return result
