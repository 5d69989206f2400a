"""Region-wise field reconstruction from trace solutions.

Each half solution is evaluated from its series on z <= z0 and extended by
mirror symmetry (odd for the Dirichlet-end half, even for the Neumann-end
half); the full field is their average.  Axial profiles are arranged as
pairs of decaying exponentials referenced to the nearest region boundary,
so arbitrarily large decay rates stay finite.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .geometry import Geometry, InvalidGeometryError
from .solver import ScatteringResult, TraceSolution, Variant, axial_spectrum


@dataclass(frozen=True)
class HalfFieldExpansion:
    """Series coefficients of one half problem on z <= z0."""

    variant: Variant
    r1: complex
    rn: np.ndarray        # inlet evanescent coefficients, n >= 2
    e1m: np.ndarray       # hole-channel pair, coefficient of sinh(beta (z - w))
    e2m: np.ndarray       # hole-channel pair, coefficient of sinh(beta z)
    e1: complex           # cavity coefficient of the propagating profile
    en: np.ndarray        # cavity evanescent coefficients, n >= 2


@dataclass(frozen=True)
class FieldExpansion:
    """Coefficient sets of both halves; the full field is their half sum."""

    k: float
    D: HalfFieldExpansion
    N: HalfFieldExpansion


def _half_expansion(traces: TraceSolution, spec, Q: np.ndarray,
                    w: float, ell: float) -> HalfFieldExpansion:
    rn = Q @ traces.u0_hat
    u1_psi = Q @ traces.u1_hat
    # large decay rates: the pair coefficients underflow to 0, which is the
    # correct limit of the bounded profile ratios used for evaluation
    sh = np.sinh(np.minimum(spec.beta * w, 700.0))
    e1m = -traces.u0_hat / sh
    e2m = traces.u1_hat / sh
    gle = spec.gamma * ell
    if traces.variant == "D":
        e1 = -traces.u1_psi1 / np.sin(traces.gl)
        en = -u1_psi / np.sinh(np.minimum(gle, 700.0))
    else:
        e1 = traces.u1_psi1 / np.cos(traces.gl)
        en = u1_psi / np.cosh(np.minimum(gle, 700.0))
    return HalfFieldExpansion(variant=traces.variant, r1=complex(traces.u0_psi1 - 1.0),
                              rn=rn, e1m=e1m, e2m=e2m, e1=complex(e1), en=en)


def _eval_half(geometry: Geometry, spec, basis, traces: TraceSolution,
               x: np.ndarray, z: np.ndarray, dz: bool = False) -> np.ndarray:
    """Evaluate one half solution at points with z <= z0 (mirroring done by caller).

    With ``dz`` the axial derivative is evaluated instead (each profile
    term picks up its own exponent factor).
    """

    def series(xp, zp, kx, xoff, amp, c1, e1, zr1, c2, e2, zr2):
        if dz:
            c1, c2 = c1 * e1, -c2 * e2
        return kernels.modal_series(xp, zp, kx, xoff, amp, c1, e1, zr1, c2, e2, zr2)

    duct = basis.duct
    hole = basis.hole
    g1 = spec.gamma1
    w, z0, ell = geometry.w, geometry.z0, geometry.ell
    out = np.zeros(x.shape[0], dtype=np.complex128)
    r1 = traces.u0_psi1 - 1.0
    rn = basis.P[1:, :] @ traces.u0_hat
    u1_psi1 = traces.u1_psi1
    u1_psin = basis.P[1:, :] @ traces.u1_hat

    inlet = z < 0.0
    if inlet.any():
        nm = basis.N
        kx = duct.wavenumbers
        amp = np.full(nm, duct.amplitude)
        xoff = np.zeros(nm)
        c1 = np.empty(nm, dtype=np.complex128)
        e1 = np.empty(nm, dtype=np.complex128)
        c2 = np.zeros(nm, dtype=np.complex128)
        e2 = np.zeros(nm, dtype=np.complex128)
        c1[0], e1[0] = 1.0, 1j * g1           # incident e^{i g1 z}
        c2[0], e2[0] = r1, 1j * g1            # reflected e^{-i g1 z}
        c1[1:], e1[1:] = rn, spec.gamma       # r_n e^{gamma_n z}, z < 0
        zr = np.zeros(nm)
        out[inlet] = series(x[inlet], z[inlet], kx, xoff, amp,
                            c1, e1, zr, c2, e2, zr)

    band = (z >= 0.0) & (z <= w)
    in_hole = (x > geometry.x0) & (x < geometry.x0 + geometry.delta)
    ch = band & in_hole
    if ch.any():
        m = basis.M
        E = np.exp(-spec.beta * w)
        den = 1.0 - E * E
        kx = np.concatenate([hole.wavenumbers, hole.wavenumbers])
        amp = np.full(2 * m, hole.amplitude)
        xoff = np.full(2 * m, hole.offset)
        # sinh(beta (w - z)) / sinh(beta w) = (e^{-beta z} - E e^{-beta (w-z)}) / (1 - E^2)
        # sinh(beta z) / sinh(beta w)       = (e^{-beta (w-z)} - E e^{-beta z}) / (1 - E^2)
        c1 = np.concatenate([traces.u0_hat / den, -traces.u1_hat * E / den])
        e1 = np.concatenate([-spec.beta, -spec.beta]).astype(np.complex128)
        zr1 = np.zeros(2 * m)
        c2 = np.concatenate([-traces.u0_hat * E / den, traces.u1_hat / den])
        e2 = e1.copy()
        zr2 = np.full(2 * m, w)
        out[ch] = series(x[ch], z[ch], kx, xoff, amp, c1, e1, zr1, c2, e2, zr2)
    # band points outside the open hole are barrier material: exactly 0

    cav = (z > w)
    if cav.any():
        nm = basis.N
        kx = duct.wavenumbers
        amp = np.full(nm, duct.amplitude)
        xoff = np.zeros(nm)
        c1 = np.empty(nm, dtype=np.complex128)
        e1 = np.empty(nm, dtype=np.complex128)
        c2 = np.empty(nm, dtype=np.complex128)
        e2 = np.empty(nm, dtype=np.complex128)
        zr1 = np.empty(nm)
        zr2 = np.full(nm, z0)
        F = np.exp(-spec.gamma * ell)
        if traces.variant == "D":
            # sin(g1 (z0 - z)) / sin(g1 ell); sinh(gam (z0 - z)) / sinh(gam ell)
            s = np.sin(traces.gl)
            c1[0] = -u1_psi1 / (2j * s)
            c2[0] = u1_psi1 / (2j * s)
            den = 1.0 - F * F
            c1[1:] = u1_psin / den
            c2[1:] = -u1_psin * F / den
        else:
            # cos(g1 (z0 - z)) / cos(g1 ell); cosh(gam (z0 - z)) / cosh(gam ell)
            co = np.cos(traces.gl)
            c1[0] = u1_psi1 / (2.0 * co)
            c2[0] = u1_psi1 / (2.0 * co)
            den = 1.0 + F * F
            c1[1:] = u1_psin / den
            c2[1:] = u1_psin * F / den
        e1[0] = 1j * g1
        e2[0] = 1j * g1
        zr1[0] = z0
        e1[1:] = -spec.gamma
        e2[1:] = -spec.gamma
        zr1[1:] = w
        out[cav] = series(x[cav], z[cav], kx, xoff, amp, c1, e1, zr1, c2, e2, zr2)
    return out


def field_map(geometry: Geometry, result: ScatteringResult, basis,
              x: np.ndarray, z: np.ndarray,
              part: str = "full", dz: bool = False) -> tuple[np.ndarray, FieldExpansion]:
    """Sample the reconstructed field on the tensor grid x cross z.

    Returns the complex field of shape (len(x), len(z)) and the coefficient
    sets of both half solutions.  ``part`` selects "full", "D" or "N";
    ``dz`` samples the axial derivative instead of the field.  Points
    inside barrier material (closed set, faces included) evaluate to
    exactly 0 by convention.
    """
    if geometry.is_rectangular:
        raise InvalidGeometryError(
            "field sampling on an (x, z) grid needs an interval cross-section")
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    spec = axial_spectrum(result.k, basis, geometry)
    X, Z = np.meshgrid(x, z, indexing="ij")
    xs, zs = X.ravel(), Z.ravel()
    z0 = geometry.z0
    mirror = zs > z0
    zs_eval = np.where(mirror, 2.0 * z0 - zs, zs)

    field = np.zeros(xs.shape[0], dtype=np.complex128)
    parts = {"full": ("D", "N"), "D": ("D",), "N": ("N",)}[part]
    for variant in parts:
        traces = result.traces_D if variant == "D" else result.traces_N
        vals = _eval_half(geometry, spec, basis, traces, xs, zs_eval, dz=dz)
        msign = -1.0 if variant == "D" else 1.0
        if dz:
            msign = -msign  # mirroring flips the axial derivative sign
        field += np.where(mirror, msign, 1.0) * vals
    if part == "full":
        field *= 0.5

    expansion = FieldExpansion(
        k=result.k,
        D=_half_expansion(result.traces_D, spec, basis.P[1:, :], geometry.w, geometry.ell),
        N=_half_expansion(result.traces_N, spec, basis.P[1:, :], geometry.w, geometry.ell),
    )
    return field.reshape(x.shape[0], z.shape[0]), expansion
