"""Moving Neel walls: profiles, spectra and dynamics."""

from ._neelwall import (
    FormatError,
    Profile,
    S_func,
    SolverError,
    appendix_check,
    damped_mode,
    energy,
    load_profile,
    mobility,
    orbital,
    pencil_roots,
    solve_static,
    solve_traveling,
    spectrum,
    store_profile,
)

__all__ = [
    "FormatError",
    "Profile",
    "S_func",
    "SolverError",
    "appendix_check",
    "damped_mode",
    "energy",
    "load_profile",
    "mobility",
    "orbital",
    "pencil_roots",
    "solve_static",
    "solve_traveling",
    "spectrum",
    "store_profile",
]
