import math

import numpy as np
import pytest

from src.geometry.space_forms import (
    ball_volume,
    c_kappa,
    geodesic_radius,
    model_volume,
    s_kappa,
    schwarz_radius,
    sphere_area,
    stereographic_radius,
    unit_sphere_area,
    volume_element,
)
from src.models.entities import AnnulusSpec, SpaceForm
from src.utils.validators import ParameterError


class TestTrigFunctions:
    def test_flat_is_identity(self):
        assert s_kappa(0.0, 0.7) == pytest.approx(0.7, rel=1e-15)
        assert c_kappa(0.0, 0.7) == 1.0

    def test_sphere_and_hyperbolic(self):
        assert s_kappa(1.0, math.pi / 2) == pytest.approx(1.0, rel=1e-14)
        assert s_kappa(4.0, 0.3) == pytest.approx(math.sin(0.6) / 2.0, rel=1e-14)
        assert s_kappa(-1.0, 0.5) == pytest.approx(math.sinh(0.5), rel=1e-14)
        assert c_kappa(-1.0, 0.5) == pytest.approx(math.cosh(0.5), rel=1e-14)

    def test_series_branch_matches_flat_limit(self):
        # |kappa| t^2 below the series threshold
        t = 0.5
        for kappa in (1e-10, -1e-10):
            assert s_kappa(kappa, t) == pytest.approx(t * (1.0 - kappa * t * t / 6.0), rel=1e-15)

    def test_continuous_across_zero_curvature(self):
        values = [s_kappa(k, 1.0) for k in (-1e-7, -1e-9, 0.0, 1e-9, 1e-7)]
        assert np.all(np.abs(np.diff(values)) < 1e-7)

    def test_array_input(self):
        t = np.linspace(0.0, 1.0, 5)
        np.testing.assert_allclose(s_kappa(-1.0, t), np.sinh(t), rtol=1e-14)
        np.testing.assert_allclose(c_kappa(1.0, t), np.cos(t), rtol=1e-14)

    def test_pythagorean_identity(self):
        t = np.linspace(0.1, 2.0, 7)
        for kappa in (-2.0, 0.5):
            np.testing.assert_allclose(c_kappa(kappa, t) ** 2 + kappa * s_kappa(kappa, t) ** 2, 1.0, rtol=1e-12)

    def test_flat_limit_uniform_on_compact_range(self):
        t = np.linspace(0.0, 10.0, 201)
        for kappa in (1e-12, -1e-12):
            assert np.max(np.abs(s_kappa(kappa, t) - t)) <= 1e-9
            assert np.max(np.abs(c_kappa(kappa, t) - 1.0)) <= 1e-9

    @pytest.mark.parametrize("kappa", [-1.0, 0.0, 0.5, 2.0])
    def test_derivatives_by_central_difference(self, kappa):
        step = 1e-5
        t = np.linspace(0.1, 1.5, 8)
        ds = (s_kappa(kappa, t + step) - s_kappa(kappa, t - step)) / (2.0 * step)
        dc = (c_kappa(kappa, t + step) - c_kappa(kappa, t - step)) / (2.0 * step)
        np.testing.assert_allclose(ds, c_kappa(kappa, t), atol=1e-6)
        np.testing.assert_allclose(dc, -kappa * s_kappa(kappa, t), atol=1e-6)

    def test_radius_beyond_antipode_rejected(self):
        with pytest.raises(ParameterError):
            s_kappa(1.0, 3.5)
        with pytest.raises(ParameterError):
            s_kappa(0.0, -0.1)


class TestVolumes:
    def test_unit_sphere_areas(self):
        assert unit_sphere_area(1) == pytest.approx(2.0)
        assert unit_sphere_area(2) == pytest.approx(2.0 * math.pi)
        assert unit_sphere_area(3) == pytest.approx(4.0 * math.pi)

    def test_flat_ball_volume(self):
        assert ball_volume(SpaceForm(2), 1.0) == pytest.approx(math.pi, rel=1e-14)
        assert ball_volume(SpaceForm(3), 2.0) == pytest.approx(32.0 * math.pi / 3.0, rel=1e-14)

    def test_spherical_cap_area(self):
        # cap of geodesic radius theta on S^2 has area 2 pi (1 - cos theta)
        for theta in (0.4, 1.2, math.pi / 2):
            assert ball_volume(SpaceForm(2, 1.0), theta) == pytest.approx(
                2.0 * math.pi * (1.0 - math.cos(theta)), rel=1e-10
            )

    def test_hyperbolic_disk(self):
        # H^2: 2 pi (cosh r - 1)
        assert ball_volume(SpaceForm(2, -1.0), 1.5) == pytest.approx(2.0 * math.pi * (math.cosh(1.5) - 1.0), rel=1e-10)

    @pytest.mark.parametrize("n, kappa", [(2, -1.0), (2, 0.0), (2, 1.0), (3, 0.5)])
    def test_ball_volume_strictly_increasing(self, n, kappa):
        sf = SpaceForm(n, kappa)
        radii = np.linspace(0.05, min(3.0, 0.99 * sf.diameter), 25)
        volumes = [ball_volume(sf, r) for r in radii]
        assert all(a < b for a, b in zip(volumes, volumes[1:]))

    def test_model_volume(self):
        assert model_volume(SpaceForm(2, 1.0)) == pytest.approx(4.0 * math.pi, rel=1e-10)
        assert model_volume(SpaceForm(3, 0.0)) == math.inf

    def test_sphere_area(self):
        assert sphere_area(SpaceForm(3), 2.0) == pytest.approx(16.0 * math.pi)

    def test_volume_element_dimension_one(self):
        assert volume_element(SpaceForm(1), 0.4) == 1.0

    @pytest.mark.parametrize("kappa", [-1.0, 0.0, 0.5, 1.0])
    def test_schwarz_radius_inverts_volume(self, kappa):
        sf = SpaceForm(2, kappa)
        for r in (0.1, 0.8, 1.7):
            assert schwarz_radius(sf, ball_volume(sf, r)) == pytest.approx(r, rel=1e-10)

    def test_schwarz_radius_edges(self):
        assert schwarz_radius(SpaceForm(2, 1.0), 0.0) == 0.0
        assert schwarz_radius(SpaceForm(2, 1.0), 4.0 * math.pi) == pytest.approx(math.pi)
        with pytest.raises(ParameterError):
            schwarz_radius(SpaceForm(2, 1.0), 13.0)
        with pytest.raises(ParameterError):
            schwarz_radius(SpaceForm(2), -1.0)


class TestStereographic:
    def test_round_trip(self):
        for theta in (0.2, 1.0, 2.5):
            assert geodesic_radius(stereographic_radius(theta)) == pytest.approx(theta, rel=1e-14)

    def test_equator(self):
        assert stereographic_radius(math.pi / 2) == pytest.approx(1.0)

    def test_rejects_antipode(self):
        with pytest.raises(ParameterError):
            stereographic_radius(math.pi)


class TestSpaceFormEntities:
    def test_diameter(self):
        assert SpaceForm(2, 4.0).diameter == pytest.approx(math.pi / 2.0)
        assert SpaceForm(3, -1.0).diameter == math.inf

    def test_annulus_must_fit(self):
        with pytest.raises(ParameterError):
            AnnulusSpec(0.5, 3.5).check_fits(SpaceForm(2, 1.0))

    def test_annulus_ordering(self):
        with pytest.raises(ParameterError):
            AnnulusSpec(1.0, 0.5)
