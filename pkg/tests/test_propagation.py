import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xcalplan.propagation import (J2, MU_EARTH, OrbitalElements, R_EARTH_KM,
                                  SSO_NODE_RATE_DEG_PER_DAY, elements_to_state,
                                  j2_secular_rates, propagate,
                                  propagate_arrays, propagate_elements,
                                  solve_kepler, sso_inclination)
from conftest import EPOCH_2019


def circular(alt_km, inc_deg, raan=0.0, anom=0.0):
    return OrbitalElements.circular(alt_km, inc_deg, raan, anom, EPOCH_2019)


def raan_rate_oracle(alt_km, inc_deg):
    """Independent evaluation of the nodal precession formula, deg/day."""
    a = R_EARTH_KM + alt_km
    n = math.sqrt(MU_EARTH / a ** 3)
    rate_rad_s = -1.5 * n * J2 * (R_EARTH_KM / a) ** 2 \
        * math.cos(math.radians(inc_deg))
    return math.degrees(rate_rad_s) * 86400.0


class TestElementsToState:
    def test_circular_equatorial(self):
        state = elements_to_state(circular(450.0, 0.0))
        np.testing.assert_allclose(state.position_km,
                                   [6828.137, 0.0, 0.0], atol=1e-6)
        speed = np.linalg.norm(state.velocity_km_s)
        assert speed == pytest.approx(math.sqrt(MU_EARTH / 6828.137),
                                      rel=1e-12)
        assert speed == pytest.approx(7.641, abs=1e-3)

    def test_polar_quarter_orbit_on_z_axis(self):
        state = elements_to_state(circular(450.0, 90.0, raan=0.0, anom=90.0))
        assert state.position_km[2] == pytest.approx(6828.137, abs=1e-6)
        np.testing.assert_allclose(state.position_km[:2], 0.0, atol=1e-6)

    @given(st.floats(300, 1500), st.floats(0, 180), st.floats(0, 360),
           st.floats(0, 360))
    @settings(max_examples=100)
    def test_circular_radius_equals_sma(self, alt, inc, raan, anom):
        elements = circular(alt, inc, raan, anom)
        state = elements_to_state(elements)
        assert np.linalg.norm(state.position_km) == pytest.approx(
            elements.semimajor_axis_km, rel=1e-12)

    def test_hyperbolic_rejected(self):
        with pytest.raises(ValueError):
            OrbitalElements(8000.0, 1.0, 45.0, 0.0, 0.0, 0.0, EPOCH_2019)

    def test_subsurface_perigee_rejected(self):
        with pytest.raises(ValueError):
            OrbitalElements(6400.0, 0.0, 45.0, 0.0, 0.0, 0.0, EPOCH_2019)


class TestJ2Rates:
    def test_polar_orbit_has_zero_raan_rate(self):
        assert j2_secular_rates(circular(500.0, 90.0)).raan_rate == \
            pytest.approx(0.0, abs=1e-12)

    def test_sso_landsat_altitude(self):
        rate = j2_secular_rates(circular(710.0, 98.19)).raan_rate
        assert rate == pytest.approx(0.986, abs=0.01)
        assert rate == pytest.approx(raan_rate_oracle(710.0, 98.19),
                                     rel=1e-12)

    def test_reference_constellation_orbit(self):
        rate = j2_secular_rates(circular(450.0, 45.0)).raan_rate
        assert rate == pytest.approx(-5.55, abs=0.05)
        assert rate == pytest.approx(raan_rate_oracle(450.0, 45.0),
                                     rel=1e-12)

    @given(st.floats(250, 1900), st.floats(0.5, 179.5))
    @settings(max_examples=150)
    def test_raan_rate_sign_opposes_cos_inclination(self, alt, inc):
        rate = j2_secular_rates(circular(alt, inc)).raan_rate
        cos_i = math.cos(math.radians(inc))
        if abs(cos_i) < 1e-12:
            assert rate == pytest.approx(0.0, abs=1e-9)
        else:
            assert math.copysign(1.0, rate) == -math.copysign(1.0, cos_i)


class TestKeplerSolver:
    @given(st.floats(0, 2 * math.pi), st.floats(0.0, 0.95))
    @settings(max_examples=300)
    def test_residual_below_tolerance(self, mean_anom, ecc):
        ecc_anom = solve_kepler(mean_anom, ecc)
        assert abs(ecc_anom - ecc * math.sin(ecc_anom) - mean_anom) <= 1e-10

    def test_vectorized(self):
        m = np.linspace(0, 2 * math.pi, 1000)
        e = solve_kepler(m, 0.3)
        np.testing.assert_allclose(e - 0.3 * np.sin(e), m, atol=1e-10)


class TestPropagate:
    def test_zero_offset_matches_elements_to_state(self):
        elements = circular(710.0, 98.2, raan=40.0, anom=123.0)
        direct = elements_to_state(elements)
        propped = propagate(elements, 0.0)
        np.testing.assert_allclose(propped.position_km, direct.position_km,
                                   atol=1e-9)
        np.testing.assert_allclose(propped.velocity_km_s,
                                   direct.velocity_km_s, atol=1e-12)

    @pytest.mark.parametrize("ecc", [0.0, 0.05])
    def test_two_body_periodicity(self, ecc):
        elements = OrbitalElements(7000.0, ecc, 51.6, 30.0, 10.0, 77.0,
                                   EPOCH_2019)
        state = propagate(elements, elements.period_s, include_j2=False)
        start = elements_to_state(elements)
        err_km = np.linalg.norm(state.position_km - start.position_km)
        assert err_km <= 1e-3  # 1 m

    def test_j2_raan_drift_after_one_day(self):
        elements = circular(450.0, 45.0, raan=100.0)
        rates = j2_secular_rates(elements)
        after = propagate_elements(elements, 86400.0)
        drift = (after.raan_deg - elements.raan_deg + 540.0) % 360.0 - 180.0
        assert drift == pytest.approx(-5.55, abs=0.05)
        assert drift == pytest.approx(rates.raan_rate, rel=1e-9)

    def test_raan_linear_in_time(self):
        elements = circular(600.0, 60.0, raan=10.0)
        t1, t3 = 3600.0, 7 * 3600.0
        t2 = 0.5 * (t1 + t3)
        raans = [propagate_elements(elements, t).raan_deg
                 for t in (t1, t2, t3)]
        resid = (raans[0] + raans[2] - 2 * raans[1]) % 360.0
        assert min(resid, 360.0 - resid) <= 1e-9

    def test_two_body_invariants_over_48h(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            elements = OrbitalElements(
                float(rng.uniform(6800, 7800)), float(rng.uniform(0, 0.03)),
                float(rng.uniform(0, 180)), float(rng.uniform(0, 360)),
                float(rng.uniform(0, 360)), float(rng.uniform(0, 360)),
                EPOCH_2019)
            ts = np.linspace(0, 48 * 3600.0, 60)
            pos, vel = propagate_arrays(elements, ts, include_j2=False)
            r = np.linalg.norm(pos, axis=1)
            v = np.linalg.norm(vel, axis=1)
            energy = 0.5 * v ** 2 - MU_EARTH / r
            energy_ref = -MU_EARTH / (2.0 * elements.semimajor_axis_km)
            np.testing.assert_allclose(energy, energy_ref, rtol=1e-9)
            h = np.linalg.norm(np.cross(pos, vel), axis=1)
            h_ref = math.sqrt(MU_EARTH * elements.semimajor_axis_km
                              * (1 - elements.eccentricity ** 2))
            np.testing.assert_allclose(h, h_ref, rtol=1e-9)

    def test_circular_radius_invariant_under_j2(self):
        elements = circular(450.0, 45.0)
        ts = np.linspace(0, 48 * 3600.0, 200)
        pos, _ = propagate_arrays(elements, ts)
        r = np.linalg.norm(pos, axis=1)
        np.testing.assert_allclose(r, elements.semimajor_axis_km, rtol=1e-6)

    def test_ground_track_revolutions_per_day(self):
        # Count ascending equator crossings over 24 h, interpolating the
        # first and last crossing times for a fractional revolution rate.
        elements = circular(450.0, 45.0)
        ts = np.arange(0, 86400.0 + 10.0, 10.0)
        pos, _ = propagate_arrays(elements, ts)
        z = pos[:, 2]
        asc = np.nonzero((z[:-1] < 0) & (z[1:] >= 0))[0]
        assert asc.size >= 14
        t_cross = ts[asc] - z[asc] * 10.0 / (z[asc + 1] - z[asc])
        revs_per_day = (asc.size - 1) / (t_cross[-1] - t_cross[0]) * 86400.0
        assert revs_per_day == pytest.approx(15.38, abs=0.05)

    def test_eccentric_radius_bounds(self):
        elements = OrbitalElements(7200.0, 0.05, 60.0, 0.0, 45.0, 0.0,
                                   EPOCH_2019)
        pos, _ = propagate_arrays(elements, np.linspace(0, 86400, 500))
        r = np.linalg.norm(pos, axis=1)
        assert np.all(r >= 7200.0 * 0.95 - 1e-6)
        assert np.all(r <= 7200.0 * 1.05 + 1e-6)


class TestSsoInclination:
    @pytest.mark.parametrize("alt,expected", [(710.0, 98.2), (788.0, 98.6),
                                              (802.0, 98.6)])
    def test_known_altitudes(self, alt, expected):
        assert sso_inclination(alt) == pytest.approx(expected, abs=0.1)

    @given(st.floats(250, 1950))
    @settings(max_examples=60)
    def test_inverse_of_raan_rate(self, alt):
        inc = sso_inclination(alt)
        assert raan_rate_oracle(alt, inc) == pytest.approx(
            SSO_NODE_RATE_DEG_PER_DAY, abs=1e-9)

    @pytest.mark.parametrize("alt", [150.0, 2500.0])
    def test_altitude_bounds(self, alt):
        with pytest.raises(ValueError):
            sso_inclination(alt)
