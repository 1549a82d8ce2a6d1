"""Frames of subspaces (fusion frames) on finite-dimensional Hilbert spaces."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    FusionFrameError,
    InvalidInputError,
    PreconditionError,
    SingularOperatorError,
)
from .fusion import (  # noqa: E402
    BoundsReport,
    WeightedFamily,
    analysis,
    dual,
    frame_bounds,
    frame_operator,
    is_bessel,
    project_onto_span,
    reconstruct,
    synthesis,
    verify_equivalence,
)
from .subspace import Subspace, from_spanning  # noqa: E402

__all__ = [
    "__version__",
    "FusionFrameError",
    "InvalidInputError",
    "PreconditionError",
    "SingularOperatorError",
    "BoundsReport",
    "WeightedFamily",
    "Subspace",
    "from_spanning",
    "analysis",
    "dual",
    "frame_bounds",
    "frame_operator",
    "is_bessel",
    "project_onto_span",
    "reconstruct",
    "synthesis",
    "verify_equivalence",
]
