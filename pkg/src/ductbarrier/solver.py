"""Mode-matching solution of the two-barrier scattering problem.

The full problem splits into two half-guide problems closed at the
symmetry plane z0, one with a Dirichlet end and one with a Neumann end.
Each half problem reduces to a pair of functional equations for the
aperture traces u0 = u|_{z=0} and u1 = u|_{z=w}, discretised here in the
hole eigenbasis.  Two independent solution paths are kept: a dense block
solve for the full trace vectors, and a reduction to four scalar
coefficients a, b, c, d followed by a 2x2 solve.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve

from .basis import ModalBasis, build_basis
from .geometry import Geometry

Variant = Literal["D", "N"]


class BandViolationError(ValueError):
    """Wavenumber outside the single-mode band."""


class NearSingularError(RuntimeError):
    """Reduced 2x2 system is numerically singular at this wavenumber."""

    def __init__(self, message: str, cond: float):
        super().__init__(message)
        self.cond = cond


def _ctanh(x: np.ndarray) -> np.ndarray:
    # (1 + e^{-2x}) / (1 - e^{-2x}); safe for arbitrarily large x > 0
    e = np.exp(-2.0 * x)
    return (1.0 + e) / (1.0 - e)


def _x_over_sinh(x: np.ndarray) -> np.ndarray:
    # x / sinh(x) = 2 x e^{-x} / (1 - e^{-2x}); underflows cleanly to 0
    e = np.exp(-x)
    out = 2.0 * x * e / (1.0 - e * e)
    return np.where(out < 1e-300, 0.0, out)


BAND_MARGIN = 1e-9  # relative clearance demanded from each band endpoint


def band_limits(basis: ModalBasis) -> tuple[float, float]:
    """Admissible (kmin, kmax) of the single-mode band for this basis."""
    lo = float(basis.lam[0])
    hi = float(min(basis.mu[0], basis.lam[1]))
    return np.sqrt(lo), np.sqrt(hi)


@dataclass(frozen=True)
class AxialSpectrum:
    """Axial wavenumbers at a given k: one propagating duct mode, the rest decaying."""

    k: float
    gamma1: float            # propagating axial wavenumber sqrt(k^2 - lam_1)
    gamma: np.ndarray        # decay rates sqrt(lam_n - k^2), n >= 2
    beta: np.ndarray         # hole-channel decay rates sqrt(mu_m - k^2)
    beta_hat: np.ndarray     # beta_m ctanh(beta_m w)
    b_over_sinh: np.ndarray  # beta_m / sinh(beta_m w)


def axial_spectrum(k: float, basis: ModalBasis, geometry: Geometry) -> AxialSpectrum:
    """Axial wavenumbers at ``k``; rejects k outside the single-mode band."""
    k2 = k * k
    lo = float(basis.lam[0])
    hi = float(min(basis.mu[0], basis.lam[1]))
    if not (k2 >= lo * (1.0 + BAND_MARGIN) and k2 <= hi * (1.0 - BAND_MARGIN)):
        kmin, kmax = np.sqrt(lo), np.sqrt(hi)
        raise BandViolationError(
            f"k={k} outside the single-mode band ({kmin:.9g}, {kmax:.9g})"
        )
    gamma1 = float(np.sqrt(k2 - basis.lam[0]))
    gamma = np.sqrt(basis.lam[1:] - k2)
    beta = np.sqrt(basis.mu - k2)
    bw = beta * geometry.w
    return AxialSpectrum(
        k=k,
        gamma1=gamma1,
        gamma=gamma,
        beta=beta,
        beta_hat=beta * _ctanh(bw),
        b_over_sinh=_x_over_sinh(bw) / geometry.w,
    )


@dataclass(frozen=True)
class OperatorSet:
    """Truncated aperture operators in the hole basis.

    A0 and the two cavity variants A1D / A1N are symmetric positive
    definite M x M matrices; the barrier-coupling operator is diagonal
    with entries Bdiag = -beta_m / sinh(beta_m w) (it couples the two
    faces of one barrier and is identical on both faces).
    """

    A0: np.ndarray
    A1D: np.ndarray
    A1N: np.ndarray
    Bdiag: np.ndarray
    p: np.ndarray        # projections of the propagating duct mode onto the hole basis
    Q: np.ndarray        # rows n >= 2 of the overlap matrix, (N-1) x M
    ell: float
    gamma1: float


def assemble_operators(spectrum: AxialSpectrum, basis: ModalBasis,
                       geometry: Geometry) -> OperatorSet:
    """Assemble A0, A1 (both end variants) and the barrier coupling at one k."""
    Q = basis.P[1:, :]
    p = basis.P[0, :]
    g = spectrum.gamma
    gl = g * geometry.ell
    diag = np.diag(spectrum.beta_hat)
    A0 = Q.T @ (g[:, None] * Q) + diag
    A1D = Q.T @ ((g * _ctanh(gl))[:, None] * Q) + diag
    A1N = Q.T @ ((g * np.tanh(gl))[:, None] * Q) + diag
    return OperatorSet(A0=A0, A1D=A1D, A1N=A1N, Bdiag=-spectrum.b_over_sinh,
                       p=p, Q=Q, ell=geometry.ell, gamma1=spectrum.gamma1)


@dataclass(frozen=True)
class TraceSolution:
    """Aperture traces of one half problem, from both solution paths.

    ``u0_hat`` / ``u1_hat`` come from the 2M x 2M block solve; the scalar
    coefficients a, b, c, d and the projections ``*_reduced`` come from
    the four-solve reduction and the 2x2 system.  a and c are purely
    imaginary and b, d purely real by construction (real operators, the
    -i gamma_1 / +i gamma_1 prefactors).
    """

    variant: Variant
    k: float
    gl: float                    # gamma_1 * ell
    T: float                     # ctan(gl) for "D", -tan(gl) for "N"
    u0_hat: np.ndarray
    u1_hat: np.ndarray
    a: complex
    b: complex
    c: complex
    d: complex
    u0_psi1: complex             # block-path projection (u0, psi_1)
    u1_psi1: complex
    u0_psi1_reduced: complex     # 2x2-path projection
    u1_psi1_reduced: complex
    cond_2x2: float


def solve_traces(ops: OperatorSet, spectrum: AxialSpectrum,
                 variant: Variant = "D") -> TraceSolution:
    """Solve the matched-derivative system for the traces, both paths."""
    g1 = spectrum.gamma1
    gl = g1 * ops.ell
    s, co = np.sin(gl), np.cos(gl)
    if variant == "D":
        A1 = ops.A1D
        if s == 0.0:
            raise NearSingularError(f"cavity term has a pole at k={spectrum.k}", np.inf)
        T = co / s
    else:
        A1 = ops.A1N
        if co == 0.0:
            raise NearSingularError(f"cavity term has a pole at k={spectrum.k}", np.inf)
        T = -s / co
    p, Bd = ops.p, ops.Bdiag
    M = p.shape[0]

    # reduced path: four linear solves realising R1 A0^{-1}, R2 A1^{-1}
    c0 = cho_factor(ops.A0)
    c1 = cho_factor(A1)
    v0 = cho_solve(c0, p)
    v1 = cho_solve(c1, p)
    K1 = cho_solve(c0, Bd[:, None] * cho_solve(c1, np.diag(Bd)))
    K2 = cho_solve(c1, Bd[:, None] * cho_solve(c0, np.diag(Bd)))
    eye = np.eye(M)
    Qa = p @ solve(eye - K1, v0)
    Qb = p @ solve(eye - K1, cho_solve(c0, Bd * v1))
    Qc = p @ solve(eye - K2, cho_solve(c1, Bd * v0))
    Qd = p @ solve(eye - K2, v1)
    a = -1j * g1 * Qa
    b = complex(-g1 * Qb)
    c = 1j * g1 * Qc
    d = complex(g1 * Qd)

    mat = np.array([[1.0 + a, b * T], [c, 1.0 + d * T]])
    det = mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0]
    cond = float(np.linalg.cond(mat))
    if det == 0.0 or not np.isfinite(cond):
        raise NearSingularError(
            f"reduced 2x2 system singular at k={spectrum.k} (cond={cond:.3e})", cond)
    rhs = np.array([2.0 * a, 2.0 * c])
    u0r = (rhs[0] * mat[1, 1] - mat[0, 1] * rhs[1]) / det
    u1r = (mat[0, 0] * rhs[1] - rhs[0] * mat[1, 0]) / det

    # block path: full 2M x 2M complex system in hole coordinates
    Bm = np.diag(Bd)
    sys = np.block([[ops.A0 - 1j * g1 * np.outer(p, p), Bm],
                    [Bm, A1 + g1 * T * np.outer(p, p)]])
    rhs2 = np.concatenate([-2j * g1 * p, np.zeros(M)])
    u = solve(sys, rhs2)
    u0_hat, u1_hat = u[:M], u[M:]

    return TraceSolution(variant=variant, k=spectrum.k, gl=gl, T=T,
                         u0_hat=u0_hat, u1_hat=u1_hat, a=a, b=b, c=c, d=d,
                         u0_psi1=complex(p @ u0_hat), u1_psi1=complex(p @ u1_hat),
                         u0_psi1_reduced=complex(u0r), u1_psi1_reduced=complex(u1r),
                         cond_2x2=cond)


def reflection_half(traces: TraceSolution) -> complex:
    """Reflection coefficient of one half problem, exactly unimodular form.

    With a = iA, c = iC and x = A sin + (A d - b C) cos (Dirichlet; the
    Neumann variant swaps sin and cos with a sign), the coefficient is
    (-(sin + d cos) + i x) / ((sin + d cos) + i x): numerator and
    denominator have equal modulus, and the pole of ctan/tan is cleared.
    """
    A = traces.a.imag
    B = traces.b.real
    C = traces.c.imag
    D = traces.d.real
    s, co = np.sin(traces.gl), np.cos(traces.gl)
    if traces.variant == "D":
        hs = s + D * co
        hx = A * s + (A * D - B * C) * co
    else:
        hs = co - D * s
        hx = A * co - (A * D - B * C) * s
    return complex(-hs, hx) / complex(hs, hx)


def reflection_half_quotient(traces: TraceSolution) -> complex:
    """Raw quotient form (a-1+(ad-bc-d)T) / (a+1+(ad-bc+d)T), kept as a cross-check."""
    a, b, c, d, T = traces.a, traces.b, traces.c, traces.d, traces.T
    adbc = a * d - b * c
    return (a - 1.0 + (adbc - d) * T) / (a + 1.0 + (adbc + d) * T)


@dataclass(frozen=True)
class ScatteringResult:
    """Reflection/transmission data of the full two-barrier problem at one k."""

    k: float
    r1D: complex
    r1N: complex
    r1: complex
    t1: complex
    rn: np.ndarray           # evanescent reflection coefficients, n = 2..N
    tn: np.ndarray           # evanescent transmission coefficients (z = 0 reference)
    energy_defect: float
    truncation: tuple[int, int]
    converged: bool | None
    traces_D: TraceSolution
    traces_N: TraceSolution


class ModeMatchSolver:
    """Mode-matching solver bound to one geometry and truncation.

    Instances are immutable after construction; evaluations at distinct
    wavenumbers share no mutable state and may run concurrently.
    """

    def __init__(self, geometry: Geometry, N: int = 200, M: int = 30,
                 basis: ModalBasis | None = None):
        self.geometry = geometry
        self.N = N
        self.M = M
        self.basis = basis if basis is not None else build_basis(geometry, N, M)

    def band(self) -> tuple[float, float]:
        return band_limits(self.basis)

    def spectrum(self, k: float) -> AxialSpectrum:
        return axial_spectrum(k, self.basis, self.geometry)

    def operators(self, k: float) -> OperatorSet:
        return assemble_operators(self.spectrum(k), self.basis, self.geometry)

    def traces(self, k: float, variant: Variant) -> TraceSolution:
        spec = self.spectrum(k)
        return solve_traces(assemble_operators(spec, self.basis, self.geometry),
                            spec, variant)

    def scattering(self, k: float, check_convergence: bool = False) -> ScatteringResult:
        spec = self.spectrum(k)
        ops = assemble_operators(spec, self.basis, self.geometry)
        trD = solve_traces(ops, spec, "D")
        trN = solve_traces(ops, spec, "N")
        r1D = reflection_half(trD)
        r1N = reflection_half(trN)
        z0 = self.geometry.z0
        g1 = spec.gamma1
        r1 = 0.5 * (r1N + r1D)
        t1 = 0.5 * (r1N - r1D) * np.exp(-2j * g1 * z0)
        rnD = ops.Q @ trD.u0_hat
        rnN = ops.Q @ trN.u0_hat
        rn = 0.5 * (rnN + rnD)
        # the z = 0 reference carries e^{2 gamma_n z0}, which overflows for
        # large n; those entries are reported as nan rather than inf * 0
        expo = 2.0 * spec.gamma * z0
        tn = np.full(expo.shape, complex("nan"), dtype=np.complex128)
        ok = expo <= 709.0
        tn[ok] = 0.5 * (rnN[ok] - rnD[ok]) * np.exp(expo[ok])
        defect = abs(1.0 - abs(r1) ** 2 - abs(t1) ** 2)
        converged = None
        if check_convergence:
            doubled = ModeMatchSolver(self.geometry, self.N, 2 * self.M)
            r1_dbl = doubled.scattering(k).r1
            converged = bool(abs(abs(r1_dbl) - abs(r1)) <= 1e-6)
        return ScatteringResult(k=k, r1D=r1D, r1N=r1N, r1=r1, t1=t1, rn=rn, tn=tn,
                                energy_defect=defect, truncation=(self.N, self.M),
                                converged=converged, traces_D=trD, traces_N=trN)


def scattering(geometry: Geometry, k: float, truncation: tuple[int, int] = (200, 30),
               check_convergence: bool = False) -> ScatteringResult:
    """One-shot scattering solve; prefer :class:`ModeMatchSolver` for sweeps."""
    solver = ModeMatchSolver(geometry, *truncation)
    return solver.scattering(k, check_convergence=check_convergence)
