"""Noncoherent GLRT block detection for PAM and square QAM.

Detect a block of symbols sent through an unknown complex gain without
pilots: optimal detectors run a line or plane search over the gain
hypothesis, suboptimal and baseline detectors trade accuracy for work, and
a parity-anchored 16-QAM code removes the residual rotation and scale
ambiguities.  Hot kernels run from a compiled extension when available; a
numpy fallback is selected automatically otherwise.
"""

from .backend import available_backends, default_backend_name
from .baselines import grid_search_decode, pat_decode, qbr_decode
from .constellation import (
    Constellation,
    PlaneBasis,
    build_plane_basis,
    canonicalize_phase,
    nearest_codeword,
    pam,
    qam,
    quantize_axis,
    to_complex,
    to_real,
)
from .glrt import (
    CapExceededError,
    DecodeResult,
    channel_estimate,
    cos2_angle,
    exhaustive_glrt,
    glrt_metric,
)
from .line_search import decode_pam_real, lambda_max_real
from .plane_search import (
    decode_pam_complex,
    decode_qam,
    lambda_max_complex,
    rotate_reference,
)
from .ra import RaDecodeResult, ambiguity_audit, ra_check, ra_decode, ra_encode
from .sim import SweepConfig, SweepResult, run_sweep
from .subopt import (
    decode_pam_complex_subopt,
    decode_qam_multiline,
    power_law_phase,
)

__version__ = "0.1.0"

__all__ = [
    "CapExceededError",
    "Constellation",
    "DecodeResult",
    "PlaneBasis",
    "RaDecodeResult",
    "SweepConfig",
    "SweepResult",
    "ambiguity_audit",
    "available_backends",
    "build_plane_basis",
    "canonicalize_phase",
    "channel_estimate",
    "cos2_angle",
    "decode_pam_complex",
    "decode_pam_complex_subopt",
    "decode_pam_real",
    "decode_qam",
    "decode_qam_multiline",
    "default_backend_name",
    "exhaustive_glrt",
    "glrt_metric",
    "grid_search_decode",
    "lambda_max_complex",
    "lambda_max_real",
    "nearest_codeword",
    "pam",
    "pat_decode",
    "power_law_phase",
    "qam",
    "qbr_decode",
    "quantize_axis",
    "ra_check",
    "ra_decode",
    "ra_encode",
    "rotate_reference",
    "run_sweep",
    "to_complex",
    "to_real",
]
