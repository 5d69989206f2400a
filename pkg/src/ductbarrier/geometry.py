"""Duct geometry: cross-section, hole placement, barrier thickness and spacing."""
from __future__ import annotations

from dataclasses import dataclass


class InvalidGeometryError(ValueError):
    """Raised when geometric parameters are inconsistent."""


@dataclass(frozen=True)
class Geometry:
    """Two identical barriers of thickness ``w`` across a duct.

    The duct cross-section is the interval (0, H), or the rectangle
    (0, H) x (0, H2) when ``H2`` is given.  Each barrier is pierced by the
    same hole, the interval (x0, x0 + delta) (times (x0_2, x0_2 + delta_2)
    for a rectangle).  The first barrier occupies z in (0, w), the second
    z in (L, L + w), so the cavity between them is z in (w, L).
    """

    H: float
    x0: float
    delta: float
    w: float
    L: float
    H2: float | None = None
    x0_2: float | None = None
    delta_2: float | None = None

    def __post_init__(self) -> None:
        if not (self.H > 0.0):
            raise InvalidGeometryError(f"duct height must be positive, got H={self.H}")
        if not (self.delta > 0.0):
            raise InvalidGeometryError(f"hole width must be positive, got delta={self.delta}")
        if not (0.0 <= self.x0 and self.x0 + self.delta <= self.H):
            raise InvalidGeometryError(
                f"hole ({self.x0}, {self.x0 + self.delta}) not contained in (0, {self.H})"
            )
        if not (self.w > 0.0):
            raise InvalidGeometryError(f"barrier thickness must be positive, got w={self.w}")
        if not (self.L > self.w):
            raise InvalidGeometryError(
                f"barrier separation requires L > w, got L={self.L}, w={self.w}"
            )
        if self.H2 is not None:
            if not (self.H2 > 0.0):
                raise InvalidGeometryError(f"second duct dimension must be positive, got H2={self.H2}")
            if self.x0_2 is None or self.delta_2 is None:
                raise InvalidGeometryError("rectangular cross-section needs x0_2 and delta_2")
            if not (self.delta_2 > 0.0):
                raise InvalidGeometryError(f"hole width must be positive, got delta_2={self.delta_2}")
            if not (0.0 <= self.x0_2 and self.x0_2 + self.delta_2 <= self.H2):
                raise InvalidGeometryError(
                    f"hole ({self.x0_2}, {self.x0_2 + self.delta_2}) not contained in (0, {self.H2})"
                )
        elif self.x0_2 is not None or self.delta_2 is not None:
            raise InvalidGeometryError("x0_2/delta_2 given without H2")

    @property
    def is_rectangular(self) -> bool:
        return self.H2 is not None

    @property
    def ell(self) -> float:
        """Half-length of the cavity between the barriers, (L - w) / 2."""
        return 0.5 * (self.L - self.w)

    @property
    def z0(self) -> float:
        """Symmetry plane of the two-barrier arrangement, (L + w) / 2."""
        return 0.5 * (self.L + self.w)
