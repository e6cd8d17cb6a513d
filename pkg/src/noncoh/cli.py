"""Command line front end: decode, sweep, audit, bench.

Exit codes: 0 success, 1 usage or input error, 2 runtime error (caps,
degenerate inputs), 3 audit violation.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

import numpy as np

from . import baselines, bench, ra, sim
from .backend import available_backends
from .constellation import Constellation, pam, qam
from .glrt import CapExceededError, exhaustive_glrt
from .line_search import decode_pam_real
from .plane_search import decode_pam_complex, decode_qam
from .subopt import decode_pam_complex_subopt, decode_qam_multiline


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; usage errors are 1 here
        raise UsageError(message)


_NUM = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def parse_complex(tok: str) -> complex:
    """Parse 'a+bi' style tokens; bare reals and 'j' suffixes also accepted."""
    t = tok.strip().replace("i", "j")
    if not t:
        raise UsageError("empty number")
    try:
        z = complex(t)
    except ValueError as exc:
        raise UsageError(f"malformed complex number {tok!r}") from exc
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise UsageError(f"non-finite value {tok!r}")
    return z


def read_observation(path: str | None, inline: str | None) -> np.ndarray:
    """Observation vector from --input (file or '-') or inline tokens.

    Files hold whitespace-separated 'a+bi' tokens, or two comma-separated
    real columns (Re, Im) per line.
    """
    if inline is not None:
        toks = inline.split()
    elif path is not None:
        text = sys.stdin.read() if path == "-" else open(path).read()
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if lines and "," in lines[0]:
            vals = []
            for ln in lines:
                parts = [p.strip() for p in ln.split(",")]
                if len(parts) != 2:
                    raise UsageError(f"expected two columns, got {ln!r}")
                for p in parts:
                    if not _NUM.match(p):
                        raise UsageError(f"malformed number {p!r}")
                vals.append(complex(float(parts[0]), float(parts[1])))
            return np.array(vals, dtype=np.complex128)
        toks = " ".join(lines).split()
    else:
        raise UsageError("provide --input FILE or --y \"...\"")
    if not toks:
        raise UsageError("empty observation")
    return np.array([parse_complex(t) for t in toks], dtype=np.complex128)


def _constellation(args) -> Constellation:
    try:
        return qam(args.order) if args.constellation == "qam" else pam(args.order)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("NONCOH_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"bad NONCOH_SEED {env!r}") from exc
    return 0


def parse_snr_grid(spec: str) -> tuple[float, ...]:
    """start:step:stop (inclusive), or a comma list of dB values."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise UsageError(f"bad SNR grid {spec!r}, want start:step:stop")
        try:
            start, step, stop = (float(p) for p in parts)
        except ValueError as exc:
            raise UsageError(f"bad SNR grid {spec!r}") from exc
        if step <= 0 or stop < start:
            raise UsageError(f"bad SNR grid {spec!r}")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + k * step for k in range(n))
    try:
        return tuple(float(p) for p in spec.split(","))
    except ValueError as exc:
        raise UsageError(f"bad SNR grid {spec!r}") from exc


DECODE_CHOICES = (
    "exhaustive", "pam-real", "pam-complex", "pam-subopt",
    "qam-optimal", "qam-multiline", "grid", "qbr", "pat", "ra",
)


def _cmd_decode(args) -> int:
    c = _constellation(args)
    y = read_observation(args.input, args.y)
    name = args.decoder
    extra: dict = {}
    if name == "exhaustive":
        r = exhaustive_glrt(y, c, cap=args.cap)
    elif name == "pam-real":
        r = decode_pam_real(np.real(y), c, backend=args.backend)
    elif name == "pam-complex":
        r = decode_pam_complex(y, c, interior=args.interior, backend=args.backend)
    elif name == "pam-subopt":
        r = decode_pam_complex_subopt(y, c, backend=args.backend)
    elif name == "qam-optimal":
        r = decode_qam(y, c, interior=args.interior, backend=args.backend)
    elif name == "qam-multiline":
        r = decode_qam_multiline(y, c, lines=args.lines, backend=args.backend)
    elif name == "grid":
        r = baselines.grid_search_decode(y, c)
    elif name == "qbr":
        r = baselines.qbr_decode(y, c)
    elif name == "pat":
        r = baselines.pat_decode(y, c)
    else:
        rr = ra.ra_decode(y, interior=args.interior, backend=args.backend)
        r = rr.result
        extra = {"bits": rr.bits.tolist(), "parity_ok": rr.parity_ok}

    est = np.asarray(r.estimate)
    out = {
        "decoder": name,
        "estimate": [str(v) for v in est.tolist()],
        "metric": r.metric,
        "channel_estimate": str(complex(r.channel_estimate)),
        "codewords_examined": r.codewords_examined,
        "ambiguous": r.ambiguous,
    } | extra
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _cmd_sweep(args) -> int:
    seed = _seed(args)
    outputs = []
    for decoder in args.decoder:
        cfg = sim.SweepConfig(
            kind=args.constellation,
            m=_constellation(args).m,
            block_length=args.block_length,
            decoder=decoder,
            channel=args.channel,
            snr_db=parse_snr_grid(args.snr),
            trials=args.trials,
            seed=seed,
            error_mode=args.error_mode,
            lines=args.lines,
            interior=args.interior,
            backend=args.backend,
        )
        res = sim.run_sweep(cfg, workers=args.workers)
        text = res.to_json() if args.format == "json" else res.to_csv()
        if args.output:
            path = args.output
            if len(args.decoder) > 1:
                root, dot, suffix = path.rpartition(".")
                path = f"{root}.{decoder}.{suffix}" if dot else f"{path}.{decoder}"
            with open(path, "w") as fh:
                fh.write(text)
            outputs.append(path)
        else:
            sys.stdout.write(text)
    if outputs:
        print("\n".join(outputs))
    return 0


def _cmd_audit(args) -> int:
    report = ra.ambiguity_audit(args.block_length, mode=args.mode)
    text = report.to_json()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if report.ok else 3


def _cmd_bench(args) -> int:
    c = _constellation(args)
    sizes = [int(t) for t in args.block_lengths.split(",")]
    if args.backend == "both":
        rows = bench.bench_backends(args.decoder, c, sizes, reps=args.reps,
                                    seed=_seed(args))
    else:
        rows = bench.bench_decoder(args.decoder, c, sizes, reps=args.reps,
                                   seed=_seed(args), backend=args.backend)
    sys.stdout.write(bench.rows_to_csv(rows))
    return 0


def build_parser() -> _Parser:
    p = _Parser(prog="noncoh", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, backend_extra=()):
        sp.add_argument("--constellation", choices=("pam", "qam"), required=True)
        sp.add_argument("--order", type=int, required=True,
                        help="total modulation order (8 for 8-PAM, 16 for 16-QAM)")
        sp.add_argument("--backend",
                        choices=(*available_backends(), "auto", *backend_extra),
                        default=None)

    d = sub.add_parser("decode", help="decode one observation vector")
    common(d)
    d.add_argument("--decoder", choices=DECODE_CHOICES, required=True)
    d.add_argument("--input", help="file of 'a+bi' tokens or Re,Im columns ('-' = stdin)")
    d.add_argument("--y", help="inline whitespace-separated 'a+bi' tokens")
    d.add_argument("--interior", choices=("epsilon", "exact"), default="epsilon")
    d.add_argument("--lines", type=int, default=None)
    d.add_argument("--cap", type=int, default=10**7)
    d.set_defaults(func=_cmd_decode)

    s = sub.add_parser("sweep", help="Monte Carlo error-rate sweep over SNR")
    common(s)
    s.add_argument("--decoder", action="append", required=True, choices=sim.DECODERS,
                   help="repeatable; runs share the seed for paired trials")
    s.add_argument("--block-length", type=int, required=True)
    s.add_argument("--channel", choices=sim.CHANNELS, required=True)
    s.add_argument("--snr", required=True, help="start:step:stop dB, or comma list")
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--seed", type=int, default=None,
                   help="fallback: NONCOH_SEED, then 0")
    s.add_argument("--error-mode", choices=sim.ERROR_MODES, default="ambiguity_class")
    s.add_argument("--lines", type=int, default=None)
    s.add_argument("--interior", choices=("epsilon", "exact"), default="epsilon")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--output", help="file path; multi-decoder runs insert the name")
    s.set_defaults(func=_cmd_sweep)

    a = sub.add_parser("audit", help="scan the parity code for ambiguities")
    a.add_argument("--block-length", type=int, required=True)
    a.add_argument("--mode", choices=("exhaustive", "associates"), default=None)
    a.add_argument("--output")
    a.set_defaults(func=_cmd_audit)

    b = sub.add_parser("bench", help="time decoders across block lengths")
    common(b, backend_extra=("both",))
    b.add_argument("--decoder", choices=bench.BENCH_DECODERS, required=True)
    b.add_argument("--block-lengths", required=True, help="comma list, e.g. 64,128,256")
    b.add_argument("--reps", type=int, default=5)
    b.add_argument("--seed", type=int, default=None)
    b.set_defaults(func=_cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
