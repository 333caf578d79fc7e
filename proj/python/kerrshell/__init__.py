"""Kerr geodesics, zero-velocity curves and Vlasov shell matter (M = 1 units)."""

from ._kerrshell import (
    ConservedSet,
    KerrParams,
    NumericalError,
    __version__,
    classify_orbit,
    integrate,
    matter_at,
    periods,
    radial_roots,
    special_orbits,
    trace_zvc,
)

__all__ = [
    "ConservedSet",
    "KerrParams",
    "NumericalError",
    "__version__",
    "classify_orbit",
    "integrate",
    "matter_at",
    "periods",
    "radial_roots",
    "special_orbits",
    "trace_zvc",
]
