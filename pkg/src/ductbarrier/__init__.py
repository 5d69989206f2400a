"""Wave scattering across two identical thick barriers in a duct.

Mode-matching solution of reflection/transmission in the single-mode band,
resonance location, and an independent finite-difference oracle.
"""

from .basis import (ModalBasis, build_basis, duct_modes, hole_modes,
                    overlap_matrix, overlap_matrix_quadrature)
from .fdfd import (GridSpec, GridSnapError, InvalidSliceError, OracleResult,
                   extract_coefficients, fdfd_half_solve, fdfd_solve, fit_wave_pair)
from .fields import FieldExpansion, field_map
from .geometry import Geometry, InvalidGeometryError
from .resonance import (BandError, FrequencyBand, ResonanceResult, SweepRow,
                        find_resonances, resonance_function, resonance_width, sweep)
from .solver import (AxialSpectrum, BandViolationError, ModeMatchSolver,
                     NearSingularError, OperatorSet, ScatteringResult,
                     TraceSolution, assemble_operators, axial_spectrum,
                     band_limits, reflection_half, reflection_half_quotient,
                     scattering, solve_traces)

__version__ = "0.1.0"

__all__ = [
    "AxialSpectrum", "BandError", "BandViolationError", "FieldExpansion",
    "FrequencyBand", "Geometry", "GridSnapError", "GridSpec",
    "InvalidGeometryError", "InvalidSliceError", "ModalBasis",
    "ModeMatchSolver", "NearSingularError", "OperatorSet", "OracleResult",
    "ResonanceResult", "ScatteringResult", "SweepRow", "TraceSolution",
    "assemble_operators", "axial_spectrum", "band_limits", "build_basis",
    "duct_modes", "extract_coefficients", "fdfd_half_solve", "fdfd_solve",
    "field_map", "find_resonances", "fit_wave_pair", "hole_modes",
    "overlap_matrix", "overlap_matrix_quadrature", "reflection_half",
    "reflection_half_quotient", "resonance_function", "resonance_width",
    "scattering", "solve_traces", "sweep",
]
