"""Resonance location and band sweeps.

The Dirichlet-end half problem reflects with coefficient +1 exactly where
1 + d(k) ctan(gamma_1 ell) = 0.  Root finding uses the multiplied form
h(k) = sin(gamma_1 ell) + d(k) cos(gamma_1 ell), which shares the roots
but has no poles, so plain sign-change bracketing is reliable.  The
Neumann analogue is h(k) = cos(gamma_1 ell) - d(k) sin(gamma_1 ell).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .solver import ModeMatchSolver, NearSingularError, Variant, reflection_half

SCAN_POINTS = 400        # default coarse-scan density
BISECT_MAX_ITER = 200


class BandError(ValueError):
    """Requested band is not inside the admissible single-mode band."""


@dataclass(frozen=True)
class FrequencyBand:
    """Sweep window inside the single-mode band."""

    kmin: float
    kmax: float
    points: int

    def __post_init__(self) -> None:
        if not (0.0 < self.kmin < self.kmax):
            raise BandError(f"need 0 < kmin < kmax, got ({self.kmin}, {self.kmax})")
        if self.points < 0:
            raise BandError(f"points must be nonnegative, got {self.points}")

    def grid(self) -> np.ndarray:
        return np.linspace(self.kmin, self.kmax, self.points)


BAND_EDGE_MARGIN = 1e-6  # relative clearance demanded from each spectral edge


def validate_band(band: FrequencyBand, solver: ModeMatchSolver) -> None:
    """Check the band sits strictly inside the solver's single-mode band."""
    lo, hi = solver.band()
    if not (band.kmin >= lo * (1.0 + BAND_EDGE_MARGIN)
            and band.kmax <= hi * (1.0 - BAND_EDGE_MARGIN)):
        raise BandError(
            f"band ({band.kmin}, {band.kmax}) must lie inside ({lo:.9g}, {hi:.9g}) "
            f"with relative margin {BAND_EDGE_MARGIN}")


@dataclass(frozen=True)
class ResonanceResult:
    """A located resonance wavenumber and the scattering state there."""

    k_res: float
    kind: Variant
    residual: float
    r1_at_res: complex
    t1_at_res: complex
    bracket: tuple[float, float]
    closed_cavity_prediction: float


@dataclass(frozen=True)
class SweepRow:
    k: float
    r1: complex
    t1: complex
    R: float
    T: float
    energy_defect: float
    h_res: float
    error: str | None = None


def resonance_function(solver: ModeMatchSolver, k: float, kind: Variant = "D") -> float:
    """Pole-free resonance indicator; its zeros are the resonance wavenumbers."""
    traces = solver.traces(k, kind)
    d = traces.d.real
    s, c = np.sin(traces.gl), np.cos(traces.gl)
    return float(s + d * c) if kind == "D" else float(c - d * s)


def _cavity_references(solver: ModeMatchSolver, kind: Variant,
                       lo: float, hi: float) -> list[float]:
    """Closed-cavity wavenumbers sqrt(lam_1 + (q pi / ell)^2) inside (lo, hi).

    q runs over integers for the Dirichlet kind and half-integers for the
    Neumann kind (the d -> 0 limits of the two resonance conditions).
    """
    lam1 = float(solver.basis.lam[0])
    ell = solver.geometry.ell
    refs = []
    q = 0.5 if kind == "N" else 1.0
    while True:
        kref = float(np.sqrt(lam1 + (q * np.pi / ell) ** 2))
        if kref >= hi:
            break
        if kref > lo:
            refs.append(kref)
        q += 1.0
    return refs


def _bisect(fun, lo: float, hi: float, flo: float) -> tuple[float, float, float]:
    """Bisect to floating-point collapse; return (k, |f(k)|, width) at the best end."""
    fhi = fun(hi)
    for _ in range(BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = fun(mid)
        if fm == 0.0:
            return mid, 0.0, hi - lo
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    if abs(flo) <= abs(fhi):
        return lo, abs(flo), hi - lo
    return hi, abs(fhi), hi - lo


def find_resonances(solver: ModeMatchSolver, band: FrequencyBand,
                    kind: Variant = "D") -> list[ResonanceResult]:
    """Locate resonance wavenumbers by coarse scan plus bisection.

    Returns an empty list when no sign change exists (possible for large
    holes or narrow bands); roots are never fabricated.  A secondary pass
    scans finely around the closed-cavity reference values in case the
    coarse scan stepped over a narrow crossing.
    """
    validate_band(band, solver)
    fun = lambda k: resonance_function(solver, k, kind)
    points = band.points if band.points >= 2 else SCAN_POINTS
    ks = np.linspace(band.kmin, band.kmax, points)
    hv = np.array([fun(k) for k in ks])
    brackets = [(ks[i], ks[i + 1], hv[i]) for i in np.nonzero(np.diff(np.sign(hv)) != 0)[0]]

    refs = _cavity_references(solver, kind, band.kmin, band.kmax)
    for kref in refs:
        near = any(lo <= kref + 0.2 and kref - 0.2 <= hi for lo, hi, _ in brackets)
        if near:
            continue
        # the root sits slightly below the reference; refine locally
        fine = np.linspace(max(band.kmin, kref - 0.2), min(band.kmax, kref + 0.01), 2001)
        fv = np.array([fun(k) for k in fine])
        for i in np.nonzero(np.diff(np.sign(fv)) != 0)[0]:
            brackets.append((fine[i], fine[i + 1], fv[i]))

    results = []
    for lo, hi, flo in sorted(brackets):
        k_res, residual, _ = _bisect(fun, lo, hi, flo)
        try:
            sc = solver.scattering(k_res)
        except NearSingularError:
            continue
        ref = min(refs, key=lambda r: abs(r - k_res)) if refs else float("nan")
        results.append(ResonanceResult(
            k_res=k_res, kind=kind, residual=residual,
            r1_at_res=sc.r1, t1_at_res=sc.t1,
            bracket=(lo, hi), closed_cavity_prediction=ref))
    return results


def resonance_width(solver: ModeMatchSolver, res: ResonanceResult) -> float:
    """Full width of the transmission peak at half maximum, from the
    half-problem coefficients: the reflection swings through the unit
    circle where |h(k)| crosses |hx(k)|, giving width 2 |hx| / |h'|."""
    k = res.k_res
    traces = solver.traces(k, res.kind)
    A, B, C, D = traces.a.imag, traces.b.real, traces.c.imag, traces.d.real
    s, c = np.sin(traces.gl), np.cos(traces.gl)
    if res.kind == "D":
        hx = A * s + (A * D - B * C) * c
    else:
        hx = A * c - (A * D - B * C) * s
    dk = 1e-6 * k
    slope = (resonance_function(solver, k + dk, res.kind)
             - resonance_function(solver, k - dk, res.kind)) / (2.0 * dk)
    return 2.0 * abs(hx) / abs(slope)


def sweep(solver: ModeMatchSolver, band: FrequencyBand) -> list[SweepRow]:
    """Scattering table over the band; per-point failures are recorded in-row."""
    validate_band(band, solver)
    rows = []
    for k in band.grid():
        try:
            sc = solver.scattering(float(k))
            h = resonance_function(solver, float(k), "D")
            rows.append(SweepRow(k=float(k), r1=sc.r1, t1=sc.t1,
                                 R=abs(sc.r1) ** 2, T=abs(sc.t1) ** 2,
                                 energy_defect=sc.energy_defect, h_res=h))
        except (NearSingularError, FloatingPointError) as exc:
            nan = float("nan")
            rows.append(SweepRow(k=float(k), r1=complex(nan, nan), t1=complex(nan, nan),
                                 R=nan, T=nan, energy_defect=nan, h_res=nan,
                                 error=str(exc)))
    return rows
