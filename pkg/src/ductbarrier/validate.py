"""Built-in validation suites, runnable from the CLI and from tests."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .basis import build_basis, overlap_matrix_quadrature
from .config import RunConfig
from .resonance import FrequencyBand
from .solver import ModeMatchSolver, NearSingularError, reflection_half

UNIMODULARITY_TOL = 1e-10
ENERGY_TOL = 1e-8
DUAL_PATH_TOL = 1e-10
DUAL_PATH_COND_LIMIT = 1e8
CONVERGENCE_TOL = 1e-4   # truncation-doubling drift of r1 at the configured (N, M)
OVERLAP_TOL = 1e-10
SWEEP_CHECK_POINTS = 100


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed),
                "value": float(self.value), "threshold": float(self.threshold),
                "detail": self.detail}


def _check_grid(band: FrequencyBand, points: int) -> np.ndarray:
    return np.linspace(band.kmin, band.kmax, points)


def check_unimodularity(solver: ModeMatchSolver, band: FrequencyBand,
                        points: int = SWEEP_CHECK_POINTS) -> CheckResult:
    worst = 0.0
    for k in _check_grid(band, points):
        for variant in ("D", "N"):
            r = reflection_half(solver.traces(float(k), variant))
            worst = max(worst, abs(abs(r) - 1.0))
    return CheckResult("unimodularity", worst <= UNIMODULARITY_TOL, worst,
                       UNIMODULARITY_TOL, "max | |r1 half| - 1 | over the sweep")


def check_energy(solver: ModeMatchSolver, band: FrequencyBand,
                 points: int = SWEEP_CHECK_POINTS) -> CheckResult:
    worst = 0.0
    for k in _check_grid(band, points):
        worst = max(worst, solver.scattering(float(k)).energy_defect)
    return CheckResult("energy", worst <= ENERGY_TOL, worst, ENERGY_TOL,
                       "max |1 - |r1|^2 - |t1|^2| over the sweep")


def check_dual_path(solver: ModeMatchSolver, band: FrequencyBand,
                    points: int = SWEEP_CHECK_POINTS) -> CheckResult:
    worst = 0.0
    for k in _check_grid(band, points):
        try:
            for variant in ("D", "N"):
                tr = solver.traces(float(k), variant)
                if tr.cond_2x2 >= DUAL_PATH_COND_LIMIT:
                    continue
                scale = max(abs(tr.u0_psi1), abs(tr.u1_psi1), 1e-30)
                worst = max(worst,
                            abs(tr.u0_psi1 - tr.u0_psi1_reduced) / scale,
                            abs(tr.u1_psi1 - tr.u1_psi1_reduced) / scale)
        except NearSingularError:
            continue
    return CheckResult("dual_path", worst <= DUAL_PATH_TOL, worst, DUAL_PATH_TOL,
                       "max relative block-vs-reduced trace disagreement")


def check_spd(solver: ModeMatchSolver, band: FrequencyBand,
              points: int = SWEEP_CHECK_POINTS) -> CheckResult:
    smallest = np.inf
    for k in _check_grid(band, points):
        ops = solver.operators(float(k))
        for mat in (ops.A0, ops.A1D, ops.A1N):
            smallest = min(smallest, float(eigh(mat, eigvals_only=True,
                                                subset_by_index=(0, 0))[0]))
    return CheckResult("spd", smallest > 0.0, smallest, 0.0,
                       "smallest eigenvalue of A0/A1D/A1N over the sweep")


def check_convergence(solver: ModeMatchSolver, band: FrequencyBand) -> CheckResult:
    doubled = ModeMatchSolver(solver.geometry, 2 * solver.N, 2 * solver.M)
    worst = 0.0
    for frac in (0.15, 0.5, 0.85):
        k = band.kmin + frac * (band.kmax - band.kmin)
        worst = max(worst, abs(solver.scattering(k).r1 - doubled.scattering(k).r1))
    return CheckResult("convergence", worst <= CONVERGENCE_TOL, worst, CONVERGENCE_TOL,
                       f"|r1({solver.N},{solver.M}) - r1({2*solver.N},{2*solver.M})| at 3 band points")


def check_overlap_quadrature(solver: ModeMatchSolver) -> CheckResult:
    basis = build_basis(solver.geometry, min(solver.N, 50), min(solver.M, 10))
    quad = overlap_matrix_quadrature(basis.duct, basis.hole, panels=128)
    worst = float(np.max(np.abs(basis.P - quad)))
    return CheckResult("overlap_quadrature", worst <= OVERLAP_TOL, worst, OVERLAP_TOL,
                       "max |closed form - 128-panel Gauss| overlap entry")


def run_all(config: RunConfig) -> list[CheckResult]:
    """Run every suite on the configured geometry / truncation / band."""
    solver = ModeMatchSolver(config.geometry, config.N, config.M)
    band = config.band
    return [
        check_unimodularity(solver, band),
        check_energy(solver, band),
        check_dual_path(solver, band),
        check_spd(solver, band),
        check_convergence(solver, band),
        check_overlap_quadrature(solver),
    ]
