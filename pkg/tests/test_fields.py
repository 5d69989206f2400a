import numpy as np
import pytest

from ductbarrier import (FrequencyBand, Geometry, InvalidGeometryError,
                         ModeMatchSolver, field_map, find_resonances)


def _interface_residual(solver, geometry, k, face, side, dz):
    """L2(hole) mismatch between the channel series at a barrier face and
    the duct-side series evaluated just outside it."""
    xg = np.linspace(geometry.x0, geometry.x0 + geometry.delta, 803)[1:-1]
    wq = xg[1] - xg[0]
    sc = solver.scattering(k)
    on, _ = field_map(geometry, sc, solver.basis, xg, np.array([face]), dz=dz)
    off, _ = field_map(geometry, sc, solver.basis, xg,
                       np.array([face + side * 1e-12]), dz=dz)
    return float(np.sqrt(np.sum(wq * np.abs(on[:, 0] - off[:, 0]) ** 2)))


class TestFieldMap:
    def test_barrier_material_is_exactly_zero(self, desk_solver, desk_geometry):
        sc = desk_solver.scattering(4.0)
        x = np.linspace(0.0, 1.0, 41)
        z = np.linspace(-0.5, 2.8, 67)
        f, _ = field_map(desk_geometry, sc, desk_solver.basis, x, z)
        blocked_x = (x <= 0.45) | (x >= 0.55)
        for zlo, zhi in ((0.0, 0.3), (2.0, 2.3)):
            band = (z >= zlo) & (z <= zhi)
            assert np.max(np.abs(f[np.ix_(blocked_x, band)])) == 0.0

    def test_centered_hole_field_is_symmetric(self, desk_solver, desk_geometry):
        sc = desk_solver.scattering(4.6)
        x = np.linspace(0.0, 1.0, 81)
        z = np.linspace(-1.0, 3.3, 64)
        f, _ = field_map(desk_geometry, sc, desk_solver.basis, x, z)
        assert np.max(np.abs(np.abs(f) - np.abs(f[::-1, :]))) < 1e-10

    def test_half_field_vanishes_at_symmetry_plane(self, desk_solver, desk_geometry):
        sc = desk_solver.scattering(4.6)
        x = np.linspace(0.3, 0.7, 21)
        f, _ = field_map(desk_geometry, sc, desk_solver.basis, x,
                         np.array([desk_geometry.z0]), part="D")
        assert np.max(np.abs(f)) < 1e-12

    def test_mirror_continuity_across_symmetry_plane(self, desk_solver, desk_geometry):
        sc = desk_solver.scattering(4.6)
        x = np.linspace(0.1, 0.9, 17)
        z0 = desk_geometry.z0
        f, _ = field_map(desk_geometry, sc, desk_solver.basis, x,
                         np.array([z0 - 1e-9, z0 + 1e-9]))
        assert np.max(np.abs(f[:, 0] - f[:, 1])) < 1e-6

    def test_incident_limit_far_upstream(self, desk_solver, desk_geometry):
        # far left the field is the incident plus the reflected propagating mode
        sc = desk_solver.scattering(4.0)
        g1 = desk_solver.spectrum(4.0).gamma1
        x = np.array([0.3])
        z = np.array([-7.0])
        f, _ = field_map(desk_geometry, sc, desk_solver.basis, x, z)
        psi = np.sqrt(2.0) * np.sin(np.pi * x[0])
        expect = (np.exp(1j * g1 * z[0]) + sc.r1 * np.exp(-1j * g1 * z[0])) * psi
        assert abs(f[0, 0] - expect) < 1e-9

    def test_expansion_coefficients(self, desk_solver, desk_geometry):
        sc = desk_solver.scattering(4.0)
        x = np.array([0.5])
        _, exp = field_map(desk_geometry, sc, desk_solver.basis, x, np.array([0.1]))
        assert exp.D.r1 == pytest.approx(sc.traces_D.u0_psi1 - 1.0)
        assert exp.D.rn.shape == (199,)
        assert np.all(np.isfinite(exp.D.e1m))
        assert np.isfinite(exp.N.e1)

    def test_rectangle_grid_sampling_rejected(self):
        g = Geometry(H=1.0, x0=0.45, delta=0.1, w=0.2, L=1.4,
                     H2=2.0, x0_2=0.8, delta_2=0.4)
        solver = ModeMatchSolver(g, 60, 12)
        k = 0.5 * sum(solver.band())
        sc = solver.scattering(k)
        with pytest.raises(InvalidGeometryError):
            field_map(g, sc, solver.basis, np.array([0.5]), np.array([0.1]))


class TestInterfaceContinuity:
    def test_mismatch_decreases_with_resolution(self, desk_geometry):
        # N tracks M to keep the mode coverage mu_M ~ lam_N balanced
        data = {(0.0, -1): [], (0.3, +1): []}
        for N, M in ((100, 10), (200, 20), (400, 40)):
            solver = ModeMatchSolver(desk_geometry, N, M)
            for (face, side), acc in data.items():
                acc.append((_interface_residual(solver, desk_geometry, 4.0, face, side, False),
                            _interface_residual(solver, desk_geometry, 4.0, face, side, True)))
        for acc in data.values():
            arr = np.array(acc)
            assert np.all(np.diff(arr, axis=0) < 0.0), arr

    def test_barrier_face_values_decrease_with_resolution(self, desk_geometry):
        xd = np.linspace(0.0, 0.45, 301)
        worst = []
        for N, M in ((100, 10), (200, 20), (400, 40)):
            solver = ModeMatchSolver(desk_geometry, N, M)
            sc = solver.scattering(4.0)
            f, _ = field_map(desk_geometry, sc, solver.basis, xd, np.array([-1e-12]))
            worst.append(float(np.max(np.abs(f))))
        assert np.all(np.diff(worst) < 0.0), worst


class TestEnhancement:
    def test_cavity_enhancement_at_resonance(self, desk_solver, desk_geometry, desk_band):
        res = find_resonances(desk_solver, desk_band, "D")[0]
        sc = desk_solver.scattering(res.k_res)
        x = np.linspace(0.0, 1.0, 61)
        z_cav = np.linspace(0.35, 1.95, 65)
        z_in = np.linspace(-1.6, -0.05, 65)
        f_cav, _ = field_map(desk_geometry, sc, desk_solver.basis, x, z_cav)
        f_in, _ = field_map(desk_geometry, sc, desk_solver.basis, x, z_in)
        ratio = np.sqrt(np.mean(np.abs(f_cav) ** 2) / np.mean(np.abs(f_in) ** 2))
        assert ratio > 5.0
