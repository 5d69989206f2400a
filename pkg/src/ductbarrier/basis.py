"""Transverse eigenbases of the duct and of the hole, and their coupling.

Separable cross-sections only (interval or rectangle), so eigenpairs and
cross-basis overlap integrals are exact closed forms; series truncation is
then the only numerical error in the mode-matching solver.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .geometry import Geometry, InvalidGeometryError


@dataclass(frozen=True)
class SineModes:
    """Dirichlet eigenmodes of an interval (offset, offset + length).

    Mode n is sqrt(2/length) sin(n pi (x - offset) / length) with
    eigenvalue (n pi / length)^2, n = 1..count.
    """

    offset: float
    length: float
    count: int
    wavenumbers: np.ndarray = field(init=False, repr=False)
    eigenvalues: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        kx = np.arange(1, self.count + 1) * np.pi / self.length
        object.__setattr__(self, "wavenumbers", kx)
        object.__setattr__(self, "eigenvalues", kx * kx)

    @property
    def amplitude(self) -> float:
        return np.sqrt(2.0 / self.length)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Mode values at points ``x``, shape (count, len(x))."""
        x = np.asarray(x, dtype=float)
        return self.amplitude * np.sin(np.outer(self.wavenumbers, x - self.offset))


@dataclass(frozen=True)
class ProductModes:
    """Tensor-product Dirichlet modes of a rectangle, sorted by eigenvalue.

    Ties are broken by the lexicographic order of the 1-indexed pair
    (n1, n2), so orderings are reproducible.
    """

    modes1: SineModes
    modes2: SineModes
    pairs: np.ndarray          # (count, 2), 1-indexed into each factor
    eigenvalues: np.ndarray    # (count,)

    @property
    def count(self) -> int:
        return self.pairs.shape[0]

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Mode values at transverse points of shape (npts, 2)."""
        points = np.asarray(points, dtype=float)
        v1 = self.modes1.evaluate(points[:, 0])
        v2 = self.modes2.evaluate(points[:, 1])
        return v1[self.pairs[:, 0] - 1] * v2[self.pairs[:, 1] - 1]


ModeSet = SineModes | ProductModes


def _product_modes(len1: float, off1: float, len2: float, off2: float, count: int) -> ProductModes:
    # n1, n2 <= count always covers the `count` smallest tensor eigenvalues
    n = np.arange(1, count + 1)
    lam1 = (n * np.pi / len1) ** 2
    lam2 = (n * np.pi / len2) ** 2
    lam = lam1[:, None] + lam2[None, :]
    flat = [(lam[i, j], i + 1, j + 1) for i in range(count) for j in range(count)]
    flat.sort()
    pairs = np.array([(n1, n2) for _, n1, n2 in flat[:count]], dtype=int)
    eig = np.array([v for v, _, _ in flat[:count]])
    return ProductModes(SineModes(off1, len1, count), SineModes(off2, len2, count), pairs, eig)


def duct_modes(geometry: Geometry, N: int) -> ModeSet:
    """First N Dirichlet eigenmodes of the duct cross-section."""
    if N < 2:
        raise InvalidGeometryError(f"need at least two duct modes, got N={N}")
    if geometry.is_rectangular:
        return _product_modes(geometry.H, 0.0, geometry.H2, 0.0, N)
    return SineModes(0.0, geometry.H, N)


def hole_modes(geometry: Geometry, M: int) -> ModeSet:
    """First M Dirichlet eigenmodes of the hole cross-section."""
    if M < 1:
        raise InvalidGeometryError(f"need at least one hole mode, got M={M}")
    if geometry.is_rectangular:
        return _product_modes(geometry.delta, geometry.x0, geometry.delta_2, geometry.x0_2, M)
    return SineModes(geometry.x0, geometry.delta, M)


def _overlap_1d(duct: SineModes, hole: SineModes) -> np.ndarray:
    """Exact integrals of duct-mode x hole-mode products over the hole.

    With alpha = n pi / H and beta = m pi / delta, the product-of-sines
    antiderivative reduces to

        delta * cos(alpha x0 + (alpha - beta) delta / 2)
              * sinc((alpha - beta) delta / 2) * beta / (alpha + beta),

    which is well defined through the degenerate case alpha = beta.
    """
    alpha = duct.wavenumbers[:, None]
    beta = hole.wavenumbers[None, :]
    half = 0.5 * (alpha - beta) * hole.length
    core = hole.length * np.cos(alpha * hole.offset + half) * np.sinc(half / np.pi) \
        * beta / (alpha + beta)
    return duct.amplitude * hole.amplitude * core


def overlap_matrix(duct: ModeSet, hole: ModeSet) -> np.ndarray:
    """N x M matrix of scalar products (duct mode, hole mode) over the hole."""
    if isinstance(duct, SineModes) != isinstance(hole, SineModes):
        raise InvalidGeometryError("duct and hole bases must share the cross-section type")
    if isinstance(duct, SineModes):
        return _overlap_1d(duct, hole)
    P1 = _overlap_1d(duct.modes1, hole.modes1)
    P2 = _overlap_1d(duct.modes2, hole.modes2)
    return (P1[np.ix_(duct.pairs[:, 0] - 1, hole.pairs[:, 0] - 1)]
            * P2[np.ix_(duct.pairs[:, 1] - 1, hole.pairs[:, 1] - 1)])


def _overlap_quadrature_1d(duct: SineModes, hole: SineModes, panels: int) -> np.ndarray:
    xg, wg = leggauss(12)
    edges = np.linspace(hole.offset, hole.offset + hole.length, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    halfw = 0.5 * np.diff(edges)
    pts = (mid[:, None] + halfw[:, None] * xg[None, :]).ravel()
    wts = (halfw[:, None] * wg[None, :]).ravel()
    vd = duct.evaluate(pts)
    vh = hole.evaluate(pts)
    return (vd * wts) @ vh.T


def overlap_matrix_quadrature(duct: ModeSet, hole: ModeSet, panels: int = 64) -> np.ndarray:
    """Composite-Gauss cross-check of :func:`overlap_matrix` (not the default path)."""
    if panels < 64:
        raise ValueError(f"need at least 64 panels, got {panels}")
    if isinstance(duct, SineModes):
        return _overlap_quadrature_1d(duct, hole, panels)
    P1 = _overlap_quadrature_1d(duct.modes1, hole.modes1, panels)
    P2 = _overlap_quadrature_1d(duct.modes2, hole.modes2, panels)
    return (P1[np.ix_(duct.pairs[:, 0] - 1, hole.pairs[:, 0] - 1)]
            * P2[np.ix_(duct.pairs[:, 1] - 1, hole.pairs[:, 1] - 1)])


@dataclass(frozen=True)
class ModalBasis:
    """Duct and hole eigenbases plus their overlap matrix.

    Immutable after construction; safe to share across concurrent solves.
    """

    duct: ModeSet
    hole: ModeSet
    P: np.ndarray

    @property
    def lam(self) -> np.ndarray:
        """Duct eigenvalues, ascending."""
        return self.duct.eigenvalues

    @property
    def mu(self) -> np.ndarray:
        """Hole eigenvalues, ascending."""
        return self.hole.eigenvalues

    @property
    def N(self) -> int:
        return self.P.shape[0]

    @property
    def M(self) -> int:
        return self.P.shape[1]


def build_basis(geometry: Geometry, N: int, M: int) -> ModalBasis:
    """Construct both mode sets and their overlap for a geometry."""
    duct = duct_modes(geometry, N)
    hole = hole_modes(geometry, M)
    return ModalBasis(duct, hole, overlap_matrix(duct, hole))
