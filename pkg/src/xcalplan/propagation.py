"""Two-body Keplerian propagation with first-order J2 secular rates.

The force model is deliberately minimal: point-mass gravity plus the secular
J2 drift of RAAN, argument of perigee, and mean anomaly. Short-periodic J2
terms, drag, and higher harmonics are out of scope; opportunity statistics at
hour scales over <= 48 h do not need them, while the differential plane
precession (which the pairing results do depend on) is retained.

Constants are WGS-84-consistent:
    mu = 398600.4418 km^3/s^2, J2 = 1.08263e-3, Re = 6378.137 km.

Circular orbits are entered with e = 0 exactly; the argument of perigee is
then defined as 0 and the anomaly is measured from the ascending node.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .timebase import EARTH_RADIUS_KM, Epoch

MU_EARTH = 398600.4418   # km^3/s^2
J2 = 1.08263e-3
R_EARTH_KM = EARTH_RADIUS_KM

SSO_NODE_RATE_DEG_PER_DAY = 360.0 / 365.2422

_KEPLER_TOL_RAD = 1e-12
_KEPLER_MAX_ITER = 60


@dataclass(frozen=True)
class OrbitalElements:
    """Keplerian state of one satellite at an epoch (angles in degrees)."""
    semimajor_axis_km: float
    eccentricity: float
    inclination_deg: float
    raan_deg: float
    arg_perigee_deg: float
    true_anomaly_deg: float
    epoch: Epoch

    def __post_init__(self):
        if not 0.0 <= self.eccentricity < 1.0:
            raise ValueError(f"eccentricity {self.eccentricity} outside [0, 1)")
        if not 0.0 <= self.inclination_deg <= 180.0:
            raise ValueError(
                f"inclination {self.inclination_deg} outside [0, 180]")
        perigee_alt = (self.semimajor_axis_km * (1.0 - self.eccentricity)
                       - R_EARTH_KM)
        if perigee_alt <= 100.0:
            raise ValueError(
                f"perigee altitude {perigee_alt:.1f} km too low (must exceed "
                "100 km)")
        for name in ("raan_deg", "arg_perigee_deg", "true_anomaly_deg"):
            object.__setattr__(self, name, getattr(self, name) % 360.0)

    @classmethod
    def circular(cls, altitude_km: float, inclination_deg: float,
                 raan_deg: float, arg_latitude_deg: float,
                 epoch: Epoch) -> "OrbitalElements":
        """Circular orbit; the anomaly is the argument of latitude."""
        return cls(R_EARTH_KM + altitude_km, 0.0, inclination_deg, raan_deg,
                   0.0, arg_latitude_deg, epoch)

    @property
    def period_s(self) -> float:
        return 2.0 * math.pi * math.sqrt(self.semimajor_axis_km ** 3 / MU_EARTH)

    @property
    def mean_motion_rad_s(self) -> float:
        return math.sqrt(MU_EARTH / self.semimajor_axis_km ** 3)


@dataclass(frozen=True)
class EciState:
    """Inertial position (km) and velocity (km/s) at an epoch."""
    position_km: np.ndarray
    velocity_km_s: np.ndarray
    epoch: Epoch

    def __post_init__(self):
        pos = np.asarray(self.position_km, dtype=float)
        vel = np.asarray(self.velocity_km_s, dtype=float)
        if np.linalg.norm(pos) <= R_EARTH_KM:
            raise ValueError("state position is at or below the Earth surface")
        object.__setattr__(self, "position_km", pos)
        object.__setattr__(self, "velocity_km_s", vel)


@dataclass(frozen=True)
class J2Rates:
    """Secular drift rates, deg/day."""
    raan_rate: float
    arg_perigee_rate: float
    mean_anomaly_correction: float


def true_to_mean_anomaly_deg(true_anomaly_deg: float, ecc: float) -> float:
    nu = math.radians(true_anomaly_deg)
    ecc_anom = 2.0 * math.atan2(math.sqrt(1.0 - ecc) * math.sin(nu / 2.0),
                                math.sqrt(1.0 + ecc) * math.cos(nu / 2.0))
    return math.degrees(ecc_anom - ecc * math.sin(ecc_anom)) % 360.0


def solve_kepler(mean_anomaly_rad, ecc: float):
    """Solve Kepler's equation E - e sin E = M by Newton iteration.

    Accepts scalar or array mean anomaly; converges to <= 1e-12 rad for any
    e < 1. Raises RuntimeError if the iteration cap is hit (cannot happen for
    valid eccentricities; guarded anyway).
    """
    m = np.asarray(mean_anomaly_rad, dtype=float)
    ecc_anom = m + ecc * np.sin(m)
    for _ in range(_KEPLER_MAX_ITER):
        delta = (ecc_anom - ecc * np.sin(ecc_anom) - m) / \
            (1.0 - ecc * np.cos(ecc_anom))
        ecc_anom = ecc_anom - delta
        if np.max(np.abs(delta)) < _KEPLER_TOL_RAD:
            break
    else:
        raise RuntimeError("Kepler solver failed to converge")
    if np.ndim(mean_anomaly_rad) == 0:
        return float(ecc_anom)
    return ecc_anom


def j2_secular_rates(elements: OrbitalElements) -> J2Rates:
    """First-order J2 secular rates on RAAN, arg perigee, and mean anomaly."""
    n = elements.mean_motion_rad_s
    p = elements.semimajor_axis_km * (1.0 - elements.eccentricity ** 2)
    k = 1.5 * n * J2 * (R_EARTH_KM / p) ** 2
    inc = math.radians(elements.inclination_deg)
    cos_i = math.cos(inc)
    sin2_i = math.sin(inc) ** 2
    to_deg_day = 86400.0 * 180.0 / math.pi
    raan_rate = -k * cos_i * to_deg_day
    argp_rate = 0.5 * k * (5.0 * cos_i ** 2 - 1.0) * to_deg_day
    mean_corr = (0.5 * k * math.sqrt(1.0 - elements.eccentricity ** 2)
                 * (3.0 * cos_i ** 2 - 1.0) * to_deg_day)
    return J2Rates(raan_rate, argp_rate, mean_corr)


def _perifocal_to_eci(raan_deg, argp_deg, inc_deg, r_pf, v_pf):
    """Rotate perifocal vectors into ECI; all inputs broadcastable arrays."""
    raan = np.radians(raan_deg)
    argp = np.radians(argp_deg)
    inc = np.radians(inc_deg)
    co, so = np.cos(raan), np.sin(raan)
    cw, sw = np.cos(argp), np.sin(argp)
    ci, si = np.cos(inc), np.sin(inc)
    # Rows of R3(-raan) R1(-inc) R3(-argp)
    r11 = co * cw - so * sw * ci
    r12 = -co * sw - so * cw * ci
    r21 = so * cw + co * sw * ci
    r22 = -so * sw + co * cw * ci
    r31 = sw * si
    r32 = cw * si
    px, py = r_pf
    vx, vy = v_pf
    pos = np.stack([r11 * px + r12 * py,
                    r21 * px + r22 * py,
                    r31 * px + r32 * py], axis=-1)
    vel = np.stack([r11 * vx + r12 * vy,
                    r21 * vx + r22 * vy,
                    r31 * vx + r32 * vy], axis=-1)
    return pos, vel


def elements_to_state(elements: OrbitalElements) -> EciState:
    """Perifocal-to-ECI conversion of one element set."""
    pos, vel = _state_arrays(elements,
                             np.array([elements.raan_deg]),
                             np.array([elements.arg_perigee_deg]),
                             np.array([math.radians(
                                 true_to_mean_anomaly_deg(
                                     elements.true_anomaly_deg,
                                     elements.eccentricity))]))
    return EciState(pos[0], vel[0], elements.epoch)


def _state_arrays(elements, raan_deg, argp_deg, mean_anom_rad):
    """Vectorized states for arrays of (raan, argp, M) sharing a, e, i."""
    ecc = elements.eccentricity
    a = elements.semimajor_axis_km
    ecc_anom = solve_kepler(np.asarray(mean_anom_rad), ecc)
    ecc_anom = np.atleast_1d(ecc_anom)
    cos_e, sin_e = np.cos(ecc_anom), np.sin(ecc_anom)
    r = a * (1.0 - ecc * cos_e)
    sqrt_1me2 = math.sqrt(1.0 - ecc * ecc)
    # Perifocal position/velocity from the eccentric anomaly.
    px = a * (cos_e - ecc)
    py = a * sqrt_1me2 * sin_e
    scale = math.sqrt(MU_EARTH * a) / r
    vx = -scale * sin_e
    vy = scale * sqrt_1me2 * cos_e
    return _perifocal_to_eci(np.atleast_1d(raan_deg), np.atleast_1d(argp_deg),
                             elements.inclination_deg, (px, py), (vx, vy))


def propagate_elements(elements: OrbitalElements, t_offset_s: float,
                       include_j2: bool = True) -> OrbitalElements:
    """Element set advanced by t_offset_s (secular angles only)."""
    days = t_offset_s / 86400.0
    if include_j2:
        rates = j2_secular_rates(elements)
    else:
        rates = J2Rates(0.0, 0.0, 0.0)
    n_deg_day = math.degrees(elements.mean_motion_rad_s) * 86400.0
    mean0 = true_to_mean_anomaly_deg(elements.true_anomaly_deg,
                                     elements.eccentricity)
    mean = (mean0 + (n_deg_day + rates.mean_anomaly_correction) * days) % 360.0
    ecc_anom = solve_kepler(math.radians(mean), elements.eccentricity)
    nu = 2.0 * math.atan2(
        math.sqrt(1.0 + elements.eccentricity) * math.sin(ecc_anom / 2.0),
        math.sqrt(1.0 - elements.eccentricity) * math.cos(ecc_anom / 2.0))
    return replace(
        elements,
        raan_deg=(elements.raan_deg + rates.raan_rate * days) % 360.0,
        arg_perigee_deg=(elements.arg_perigee_deg
                         + rates.arg_perigee_rate * days) % 360.0,
        true_anomaly_deg=math.degrees(nu) % 360.0,
        epoch=elements.epoch.plus_seconds(t_offset_s))


def propagate(elements: OrbitalElements, t_offset_s: float,
              include_j2: bool = True) -> EciState:
    """ECI state at elements.epoch + t_offset_s."""
    pos, vel = propagate_arrays(elements, np.array([t_offset_s]), include_j2)
    return EciState(pos[0], vel[0], elements.epoch.plus_seconds(t_offset_s))


def propagate_arrays(elements: OrbitalElements, t_offsets_s,
                     include_j2: bool = True):
    """Vectorized propagation.

    Args:
        t_offsets_s: array of offsets (seconds) from elements.epoch.

    Returns:
        (positions, velocities) with shape (N, 3), km and km/s.
    """
    t = np.asarray(t_offsets_s, dtype=float)
    days = t / 86400.0
    if include_j2:
        rates = j2_secular_rates(elements)
    else:
        rates = J2Rates(0.0, 0.0, 0.0)
    n_deg_day = math.degrees(elements.mean_motion_rad_s) * 86400.0
    mean0 = true_to_mean_anomaly_deg(elements.true_anomaly_deg,
                                     elements.eccentricity)
    mean = np.radians(mean0 + (n_deg_day + rates.mean_anomaly_correction) * days)
    raan = elements.raan_deg + rates.raan_rate * days
    argp = elements.arg_perigee_deg + rates.arg_perigee_rate * days
    return _state_arrays(elements, raan, argp, mean)


def sso_inclination(altitude_km: float) -> float:
    """Inclination giving sun-synchronous nodal precession for a circular orbit.

    Solves raan_rate(i) = +360/365.2422 deg/day at the given altitude.

    Raises:
        ValueError: altitude outside [200, 2000] km, or no solution in
            [90, 110] deg.
    """
    if not 200.0 <= altitude_km <= 2000.0:
        raise ValueError(
            f"altitude {altitude_km} km outside supported range [200, 2000]")
    a = R_EARTH_KM + altitude_km
    n = math.sqrt(MU_EARTH / a ** 3)
    target_rad_s = math.radians(SSO_NODE_RATE_DEG_PER_DAY) / 86400.0
    cos_i = -target_rad_s / (1.5 * n * J2 * (R_EARTH_KM / a) ** 2)
    if not -1.0 <= cos_i <= 1.0:
        raise ValueError(f"no sun-synchronous inclination at {altitude_km} km")
    inc = math.degrees(math.acos(cos_i))
    if not 90.0 <= inc <= 110.0:
        raise ValueError(
            f"sun-synchronous inclination {inc:.2f} deg outside [90, 110]")
    return inc
