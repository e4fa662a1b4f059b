"""Verification engine for paraquaternionic Kähler geometry with torsion.

Structures are polynomial (or rational) on a chart of R^{4n}; every identity
is checked pointwise through exact truncated Taylor jets.
"""

__version__ = "0.1.0"

from .catalog import (  # noqa: E402
    conformal_model,
    diffeo_pushforward_model,
    flat_model,
    frame_deformed_model,
    model_from_spec,
    preset,
    sample_points,
    sp1_rotation_model,
)
from .conformal import conformal_identities, rescale, round_trip_residual, transport_pqkt  # noqa: E402
from .connections import (  # noqa: E402
    integrability_residual,
    levi_civita,
    pqkt_connection,
    pqkt_linear_solve,
    torsion_forms,
)
from .curvature import curvature, parallel_torsion_checks, verify_curvature_identities  # noqa: E402
from .errors import *  # noqa: E402,F401,F403
from .forms import classify, lee_data  # noqa: E402
from .geometry import local_geometry  # noqa: E402
from .model import ParaHermitianStructure  # noqa: E402
from .structures import kahler_forms, nijenhuis, verify_algebra  # noqa: E402
from .suites import run_suites  # noqa: E402

__all__ = [
    "ParaHermitianStructure", "classify", "conformal_identities", "conformal_model", "curvature",
    "diffeo_pushforward_model", "flat_model", "frame_deformed_model", "integrability_residual",
    "kahler_forms", "lee_data", "levi_civita", "local_geometry", "model_from_spec", "nijenhuis",
    "parallel_torsion_checks", "pqkt_connection", "pqkt_linear_solve", "preset", "rescale",
    "round_trip_residual", "run_suites", "sample_points", "sp1_rotation_model", "torsion_forms",
    "transport_pqkt", "verify_algebra", "verify_curvature_identities",
]
