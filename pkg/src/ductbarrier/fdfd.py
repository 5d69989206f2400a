"""Brute-force finite-difference frequency-domain oracle.

Second-order 5-point discretisation of the scattering problem on a
truncated 2D domain, closed by modal Dirichlet-to-Neumann relations at the
two truncation planes.  The DtN and the coefficient extraction use the
grid-exact transverse sine eigenvectors and the discrete axial dispersion
relation, so the lead discretisation is absorbed exactly and the incident
mode injects cleanly; geometry is snapped to the grid rather than
stair-cased, keeping the comparison free of geometry error.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from . import kernels
from .geometry import Geometry, InvalidGeometryError
from .solver import BAND_MARGIN, BandViolationError

RETRY_RESIDUAL = 1e-8   # relative solve residual triggering a perturbed-Z retry


class GridSnapError(ValueError):
    """Geometry lengths are not integer multiples of the grid spacing."""


class InvalidSliceError(ValueError):
    """Requested extraction slice lies inside barrier material."""


@dataclass(frozen=True)
class GridSpec:
    """Grid spacing, lead length before/after the barriers, DtN mode count."""

    h: float
    Z: float
    Nb: int

    def __post_init__(self) -> None:
        if not (self.h > 0.0):
            raise GridSnapError(f"grid spacing must be positive, got h={self.h}")
        if not (self.Z > 0.0):
            raise GridSnapError(f"lead length must be positive, got Z={self.Z}")
        if self.Nb < 5:
            raise GridSnapError(f"need at least 5 boundary modes, got Nb={self.Nb}")


@dataclass(frozen=True)
class OracleResult:
    """Extracted coefficients and metadata of one oracle solve."""

    k: float
    r1: complex
    t1: complex | None
    rn: np.ndarray            # evanescent reflections, n = 2..Nb
    tn: np.ndarray | None     # evanescent transmissions (z = 0 reference), n = 2..Nb
    residual: float
    grid: GridSpec
    unknowns: int
    retried: bool
    x: np.ndarray | None = None        # interior transverse nodes (keep_field)
    z_nodes: np.ndarray | None = None  # axial nodes (keep_field)
    field: np.ndarray | None = None    # (len(x), len(z_nodes)) complex (keep_field)
    barrier_spans: tuple = ()


def _snap(value: float, h: float, what: str) -> int:
    q = value / h
    n = round(q)
    if abs(q - n) > 1e-12 * max(1.0, abs(q)):
        raise GridSnapError(f"{what}={value} is not a multiple of h={h}")
    return int(n)


def _check_band(geometry: Geometry, k: float) -> None:
    lam1 = (np.pi / geometry.H) ** 2
    lam2 = (2.0 * np.pi / geometry.H) ** 2
    if geometry.is_rectangular:
        raise InvalidGeometryError("the finite-difference oracle is 2D (interval cross-section)")
    k2 = k * k
    if not (k2 >= lam1 * (1.0 + BAND_MARGIN) and k2 <= lam2 * (1.0 - BAND_MARGIN)):
        raise BandViolationError(
            f"k={k} outside the duct single-mode band ({np.sqrt(lam1):.9g}, {np.sqrt(lam2):.9g})")


def _dispersion(k: float, h: float, H: float, Nb: int):
    """Discrete transverse eigenvalues, per-step DtN factors and mode-1 wavenumber."""
    n = np.arange(1, Nb + 1)
    lam = (2.0 - 2.0 * np.cos(n * np.pi * h / H)) / h**2
    c = 1.0 - 0.5 * h * h * (k * k - lam)
    tau = np.empty(Nb, dtype=np.complex128)
    prop = np.abs(c) < 1.0
    tau[prop] = np.exp(1j * np.arccos(c[prop]))
    tau[~prop] = c[~prop] - np.sqrt(c[~prop] ** 2 - 1.0)
    gammas = np.empty(Nb)
    gammas[prop] = np.arccos(c[prop]) / h
    gammas[~prop] = np.arccosh(c[~prop]) / h
    return tau, gammas


def _solve_grid(geometry: Geometry, k: float, grid: GridSpec, half: str | None,
                closed: bool, Z: float):
    """Assemble and factor the discrete system for one lead length Z."""
    h, Nb = grid.h, grid.Nb
    H, w, L = geometry.H, geometry.w, geometry.L
    nxi = _snap(H, h, "H") - 1
    if Nb > nxi:
        raise GridSnapError(f"Nb={Nb} exceeds the {nxi} transverse grid modes")
    _snap(Z, h, "Z")
    _snap(w, h, "w")
    _snap(L, h, "L")
    _snap(geometry.x0, h, "x0")
    _snap(geometry.delta, h, "delta")
    zlen = (Z + geometry.z0) if half else (2.0 * Z + L + w)
    nz = _snap(zlen, h, "domain length")
    xs = np.arange(1, nxi + 1) * h
    jz = lambda z: round((z + Z) / h)

    xa, xb = geometry.x0, geometry.x0 + geometry.delta
    if closed:
        blocked_x = np.ones(nxi, dtype=bool)
    else:
        blocked_x = ~((xs > xa + 1e-12 * h) & (xs < xb - 1e-12 * h))
    spans = [(jz(0.0), jz(w))]
    if not half:
        spans.append((jz(L), jz(L + w)))
    free = np.ones((nxi, nz + 1), dtype=bool)
    for ja, jb in spans:
        free[np.ix_(blocked_x, range(ja, jb + 1))] = False
    if half == "D":
        free[:, nz] = False
    idxmap = -np.ones((nxi, nz + 1), dtype=np.int64)
    idxmap[free] = np.arange(int(free.sum()))
    nun = int(free.sum())

    j_hi = nz if half == "N" else nz - 1
    fold = nz if half == "N" else -1
    rows, cols, vals = kernels.stencil_triplets(idxmap, (k * h) ** 2, 1, j_hi, fold)
    rows_l = [rows]
    cols_l = [cols]
    vals_l = [vals.astype(np.complex128)]
    rhs = np.zeros(nun, dtype=np.complex128)

    tau, gammas = _dispersion(k, h, H, Nb)
    gt1 = gammas[0]
    psi = np.sqrt(2.0 / H) * np.sin(np.outer(np.arange(1, Nb + 1) * np.pi / H, xs))

    def add_dtn(jb: int, jn: int, inject: bool) -> None:
        blk = (psi.T * tau) @ (psi * h)          # (nxi, nxi) coupling to plane jn
        me = idxmap[:, jb]
        nb = idxmap[:, jn]
        rows_l.append(me)
        cols_l.append(me)
        vals_l.append(np.ones(nxi, dtype=np.complex128))
        rr, cc = np.meshgrid(me, nb, indexing="ij")
        rows_l.append(rr.ravel())
        cols_l.append(cc.ravel())
        vals_l.append(-blk.ravel())
        if inject:
            rhs[me] = np.exp(-1j * gt1 * Z) * (1.0 - np.exp(2j * gt1 * h)) * psi[0]

    add_dtn(0, 1, True)
    if not half:
        add_dtn(nz, nz - 1, False)

    A = sp.csr_matrix((np.concatenate(vals_l),
                       (np.concatenate(rows_l), np.concatenate(cols_l))),
                      shape=(nun, nun))
    lu = splu(A.tocsc())
    u = lu.solve(rhs)
    resid = float(np.linalg.norm(A @ u - rhs) / np.linalg.norm(rhs))
    field = np.zeros((nxi, nz + 1), dtype=np.complex128)
    field[free] = u
    zn = -Z + np.arange(nz + 1) * h
    return field, resid, nun, xs, zn, tau, gammas, psi


def _project(psi: np.ndarray, h: float, field: np.ndarray, j: int) -> np.ndarray:
    # trapezoid weights with zero wall values reduce to a plain rectangle sum
    return h * (psi @ field[:, j])


def fit_wave_pair(zs: np.ndarray, values: np.ndarray, rate: complex) -> tuple[complex, complex]:
    """Resolve forward/backward amplitudes from slice coefficients.

    Fits values_j = a_plus exp(rate z_j) + a_minus exp(-rate z_j) in the
    least-squares sense; two slices make the fit exact.  Columns are
    normalised before the solve so one strongly decaying direction cannot
    push the other below the rank cutoff.
    """
    zs = np.asarray(zs, dtype=float)
    basis = np.column_stack([np.exp(rate * zs), np.exp(-rate * zs)])
    scale = np.linalg.norm(basis, axis=0)
    sol, *_ = np.linalg.lstsq(basis / scale, np.asarray(values), rcond=None)
    sol = sol / scale
    return complex(sol[0]), complex(sol[1])


def _window(zn: np.ndarray, lo: float, hi: float) -> np.ndarray:
    jj = np.nonzero((zn >= lo) & (zn <= hi))[0]
    if jj.size < 2:
        raise InvalidSliceError("extraction window holds fewer than two planes")
    return jj


def _extract(field, xs, zn, h, psi, gammas, Z, right_edge, Nb):
    """Fit lead-window slices to incident/reflected (and transmitted) waves."""
    gt1 = gammas[0]
    jwin = _window(zn, -0.85 * Z, -0.15 * Z)
    coefs = np.stack([_project(psi, h, field, j) for j in jwin])  # (nwin, Nb)
    inc, refl = fit_wave_pair(zn[jwin], coefs[:, 0], 1j * gt1)
    r1 = refl / inc
    rn = np.empty(Nb - 1, dtype=np.complex128)
    for n in range(2, Nb + 1):
        # reflected evanescent content grows toward the barrier as e^{gamma z}
        fwd, _ = fit_wave_pair(zn[jwin], coefs[:, n - 1], gammas[n - 1])
        rn[n - 2] = fwd / inc
    t1 = None
    tn = None
    if right_edge is not None:
        jwin2 = _window(zn, right_edge + 0.15 * Z, right_edge + 0.85 * Z)
        coefs2 = np.stack([_project(psi, h, field, j) for j in jwin2])
        t1f, _ = fit_wave_pair(zn[jwin2], coefs2[:, 0], 1j * gt1)
        t1 = t1f / inc
        tn = np.empty(Nb - 1, dtype=np.complex128)
        for n in range(2, Nb + 1):
            _, bwd = fit_wave_pair(zn[jwin2] - right_edge, coefs2[:, n - 1], gammas[n - 1])
            with np.errstate(over="ignore"):
                # z = 0 reference of the transmitted decay, like the modal convention
                tn[n - 2] = bwd * np.exp(gammas[n - 1] * right_edge) / inc
    return r1, t1, rn, tn


def fdfd_solve(geometry: Geometry, k: float, grid: GridSpec, *,
               closed_barriers: bool = False, keep_field: bool = False) -> OracleResult:
    """Solve the full two-barrier problem on the grid and extract coefficients.

    ``closed_barriers`` blocks the hole cells entirely (the delta -> 0
    limit, which Geometry itself cannot represent).  A singular factor or
    an abnormal residual triggers one retry with a longer lead.
    """
    _check_band(geometry, k)
    _require_lead(geometry, k, grid.Z)
    Z = grid.Z
    retried = False
    for attempt in range(2):
        try:
            field, resid, nun, xs, zn, tau, gammas, psi = _solve_grid(
                geometry, k, grid, None, closed_barriers, Z)
            if resid <= RETRY_RESIDUAL:
                break
        except RuntimeError:
            if attempt:
                raise
        # lead perturbed by whole cells, so snapping is preserved
        Z = grid.Z + max(4, round(0.1 * grid.Z / grid.h)) * grid.h
        retried = True
    right_edge = geometry.L + geometry.w
    r1, t1, rn, tn = _extract(field, xs, zn, grid.h, psi, gammas, Z, right_edge, grid.Nb)
    spans = ((0.0, geometry.w), (geometry.L, geometry.L + geometry.w))
    return OracleResult(k=k, r1=r1, t1=t1, rn=rn, tn=tn, residual=resid,
                        grid=grid, unknowns=nun, retried=retried,
                        x=xs if keep_field else None,
                        z_nodes=zn if keep_field else None,
                        field=field if keep_field else None,
                        barrier_spans=spans)


def fdfd_half_solve(geometry: Geometry, k: float, grid: GridSpec,
                    end: str = "D", *, closed_barriers: bool = False) -> complex:
    """Reflection coefficient of the half problem closed at z0 by ``end``."""
    if end not in ("D", "N"):
        raise ValueError(f"end must be 'D' or 'N', got {end!r}")
    _check_band(geometry, k)
    _require_lead(geometry, k, grid.Z)
    Z = grid.Z
    retried = False
    for attempt in range(2):
        try:
            field, resid, nun, xs, zn, tau, gammas, psi = _solve_grid(
                geometry, k, grid, end, closed_barriers, Z)
            if resid <= RETRY_RESIDUAL:
                break
        except RuntimeError:
            if attempt:
                raise
        Z = grid.Z + max(4, round(0.1 * grid.Z / grid.h)) * grid.h
        retried = True
    r1, _, _, _ = _extract(field, xs, zn, grid.h, psi, gammas, Z, None, grid.Nb)
    return r1


def _require_lead(geometry: Geometry, k: float, Z: float) -> None:
    # lead must cover three decay lengths of the slowest evanescent duct mode
    gamma2 = np.sqrt((2.0 * np.pi / geometry.H) ** 2 - k * k)
    if Z * gamma2 < 3.0:
        raise GridSnapError(
            f"lead Z={Z} shorter than three decay lengths 3/gamma_2={3.0 / gamma2:.3f} at k={k}")


def extract_coefficients(result: OracleResult, z: float,
                         n_modes: int | None = None) -> np.ndarray:
    """Project the stored field slice at axial position ``z`` onto the duct modes.

    Discrete L2 projection with trapezoidal weights.  The slice must not
    lie inside a barrier span; direction separation needs two slices (see
    :func:`fit_wave_pair`).
    """
    if result.field is None:
        raise InvalidSliceError("oracle result was computed without keep_field=True")
    for zlo, zhi in result.barrier_spans:
        if zlo <= z <= zhi:
            raise InvalidSliceError(f"slice z={z} lies inside the barrier span ({zlo}, {zhi})")
    zn = result.z_nodes
    if not (zn[0] <= z <= zn[-1]):
        raise InvalidSliceError(f"slice z={z} outside the grid ({zn[0]}, {zn[-1]})")
    j = int(round((z - zn[0]) / result.grid.h))
    nm = n_modes or result.grid.Nb
    xs = result.x
    H = (xs.shape[0] + 1) * result.grid.h
    psi = np.sqrt(2.0 / H) * np.sin(np.outer(np.arange(1, nm + 1) * np.pi / H, xs))
    return _project(psi, result.grid.h, result.field, j)
