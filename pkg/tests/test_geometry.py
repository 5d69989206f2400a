import pytest

from ductbarrier import Geometry, InvalidGeometryError


def test_derived_lengths(desk_geometry):
    assert desk_geometry.ell == pytest.approx(0.85, abs=0)
    assert desk_geometry.z0 == pytest.approx(1.15, abs=0)
    assert not desk_geometry.is_rectangular


def test_full_height_hole_allowed():
    g = Geometry(H=1.0, x0=0.0, delta=1.0, w=0.3, L=2.0)
    assert g.delta == 1.0


@pytest.mark.parametrize("bad", [
    dict(H=-1.0, x0=0.1, delta=0.1, w=0.3, L=2.0),
    dict(H=1.0, x0=0.1, delta=0.0, w=0.3, L=2.0),
    dict(H=1.0, x0=0.95, delta=0.1, w=0.3, L=2.0),
    dict(H=1.0, x0=-0.1, delta=0.2, w=0.3, L=2.0),
    dict(H=1.0, x0=0.45, delta=0.1, w=0.0, L=2.0),
    dict(H=1.0, x0=0.45, delta=0.1, w=0.3, L=0.3),
])
def test_invalid_parameters(bad):
    with pytest.raises(InvalidGeometryError):
        Geometry(**bad)


def test_rectangle_needs_full_hole_spec():
    with pytest.raises(InvalidGeometryError):
        Geometry(H=1.0, x0=0.45, delta=0.1, w=0.3, L=2.0, H2=2.0)
    with pytest.raises(InvalidGeometryError):
        Geometry(H=1.0, x0=0.45, delta=0.1, w=0.3, L=2.0, x0_2=0.3)
    g = Geometry(H=1.0, x0=0.45, delta=0.1, w=0.3, L=2.0,
                 H2=2.0, x0_2=0.9, delta_2=0.2)
    assert g.is_rectangular


def test_rectangle_hole_containment():
    with pytest.raises(InvalidGeometryError):
        Geometry(H=1.0, x0=0.45, delta=0.1, w=0.3, L=2.0,
                 H2=2.0, x0_2=1.95, delta_2=0.2)
