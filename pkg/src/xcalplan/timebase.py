"""Time scale, Earth rotation, solar ephemeris, and geodetic coordinates.

Everything downstream (orbit propagation, look geometry, access sweeps) is
built on the primitives here: a continuous Julian-date epoch, a GMST-based
ECI<->ECEF rotation, a low-precision analytic Sun, and spherical-Earth
geodetic conversions.

Conventions:
    - A single continuous UT-like time scale; leap seconds are ignored.
    - ECI is the mean-equator/equinox inertial frame; ECEF rotates about +z
      by the Greenwich mean sidereal time.
    - The Earth is a sphere of radius 6378.137 km for all geodetic math.

All functions are pure and accept numpy arrays where it matters for speed
(GMST, sun position, frame rotations).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

import numpy as np

EARTH_RADIUS_KM = 6378.137
AU_KM = 149_597_870.7

JD_J2000 = 2451545.0
JD_UNIX_EPOCH = 2440587.5

_DT_UNIX_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


def jd_from_calendar(year: int, month: int, day: int,
                     hour: int = 0, minute: int = 0,
                     second: float = 0.0) -> float:
    """Continuous Julian Date for a Gregorian calendar instant (UTC).

    Args:
        year: calendar year, >= 1901.
        second: may carry a fractional part.

    Raises:
        ValueError: for an invalid calendar date or a year before 1901.
    """
    if year < 1901:
        raise ValueError(f"year {year} not supported (must be >= 1901)")
    whole = int(second)
    micros = int(round((second - whole) * 1e6))
    try:
        dt = datetime(year, month, day, hour, minute, whole, micros,
                      tzinfo=timezone.utc)
    except ValueError as exc:
        raise ValueError(
            f"invalid calendar date {year:04d}-{month:02d}-{day:02d} "
            f"{hour:02d}:{minute:02d}:{second:06.3f}: {exc}") from exc
    return JD_UNIX_EPOCH + (dt - _DT_UNIX_EPOCH).total_seconds() / 86400.0


def calendar_from_jd(jd: float) -> datetime:
    """Inverse of jd_from_calendar; microseconds rounded."""
    return _DT_UNIX_EPOCH + timedelta(seconds=(jd - JD_UNIX_EPOCH) * 86400.0)


@dataclass(frozen=True, order=True)
class Epoch:
    """An instant on the continuous Julian-date time scale."""
    jd: float

    @classmethod
    def from_calendar(cls, year: int, month: int, day: int,
                      hour: int = 0, minute: int = 0,
                      second: float = 0.0) -> "Epoch":
        return cls(jd_from_calendar(year, month, day, hour, minute, second))

    @classmethod
    def from_iso(cls, text: str) -> "Epoch":
        """Parse `YYYY-MM-DDThh:mm:ssZ` (trailing Z or explicit offset)."""
        cleaned = text.strip()
        if cleaned.endswith(("Z", "z")):
            cleaned = cleaned[:-1] + "+00:00"
        try:
            dt = datetime.fromisoformat(cleaned)
        except ValueError as exc:
            raise ValueError(f"invalid ISO-8601 epoch {text!r}: {exc}") from exc
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return cls.from_datetime(dt)

    @classmethod
    def from_datetime(cls, dt: datetime) -> "Epoch":
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        if dt.year < 1901:
            raise ValueError(f"year {dt.year} not supported (must be >= 1901)")
        return cls(JD_UNIX_EPOCH + (dt - _DT_UNIX_EPOCH).total_seconds() / 86400.0)

    def to_datetime(self) -> datetime:
        return calendar_from_jd(self.jd)

    def iso(self) -> str:
        """Millisecond-resolution ISO-8601 string, always UTC-suffixed."""
        dt = self.to_datetime()
        ms = round(dt.microsecond / 1000.0)
        if ms == 1000:
            dt += timedelta(seconds=1)
            ms = 0
        return f"{dt:%Y-%m-%dT%H:%M:%S}.{ms:03d}Z"

    def plus_seconds(self, seconds: float) -> "Epoch":
        return Epoch(self.jd + seconds / 86400.0)

    def seconds_since(self, other: "Epoch") -> float:
        return (self.jd - other.jd) * 86400.0


def gmst_deg(jd):
    """Greenwich mean sidereal time in [0, 360) degrees.

    IAU-82-style polynomial in days/centuries since J2000. Accepts a scalar
    or array Julian date.
    """
    d = np.asarray(jd, dtype=float) - JD_J2000
    t = d / 36525.0
    theta = (280.46061837 + 360.98564736629 * d
             + 0.000387933 * t * t - t * t * t / 38710000.0)
    theta = np.mod(theta, 360.0)
    if np.ndim(jd) == 0:
        return float(theta)
    return theta


def sun_position_eci(jd):
    """Low-precision analytic Sun position (mean-element formulation).

    Good to ~0.01 deg over 1950-2050, far better than the 0.1 deg needed for
    zenith-angle filtering.

    Args:
        jd: scalar or array Julian date.

    Returns:
        (unit, distance_km): unit vector(s) to the Sun in ECI with shape
        (..., 3), and the Earth-Sun distance in km.
    """
    t = (np.asarray(jd, dtype=float) - JD_J2000) / 36525.0

    mean_anom = np.radians(np.mod(357.5291092 + 35999.05034 * t, 360.0))
    mean_lon = np.mod(280.460 + 36000.771 * t, 360.0)
    ecl_lon = np.radians(np.mod(
        mean_lon + 1.914666471 * np.sin(mean_anom)
        + 0.019994643 * np.sin(2.0 * mean_anom), 360.0))
    obliquity = np.radians(23.439291 - 0.0130042 * t)

    dist_au = (1.000140612 - 0.016708617 * np.cos(mean_anom)
               - 0.000139589 * np.cos(2.0 * mean_anom))

    x = np.cos(ecl_lon)
    y = np.cos(obliquity) * np.sin(ecl_lon)
    z = np.sin(obliquity) * np.sin(ecl_lon)
    unit = np.stack([x, y, z], axis=-1)
    if np.ndim(jd) == 0:
        return unit.reshape(3), float(dist_au * AU_KM)
    return unit, dist_au * AU_KM


def rotate_about_z(vec, angle_deg):
    """Rotate vector(s) about +z by angle_deg (right-handed).

    vec has shape (..., 3); angle broadcasts against the leading dims.
    """
    v = np.asarray(vec, dtype=float)
    a = np.radians(np.asarray(angle_deg, dtype=float))
    c, s = np.cos(a), np.sin(a)
    x = c * v[..., 0] - s * v[..., 1]
    y = s * v[..., 0] + c * v[..., 1]
    return np.stack([x, y, np.broadcast_to(v[..., 2], x.shape)], axis=-1)


def eci_to_ecef(vec, epoch):
    """Rotate ECI vector(s) into the Earth-fixed frame at the given epoch.

    `epoch` may be an Epoch, a scalar jd, or an array of jd broadcastable
    against vec's leading dimensions.
    """
    jd = epoch.jd if isinstance(epoch, Epoch) else epoch
    return rotate_about_z(vec, -np.asarray(gmst_deg(jd)))


def ecef_to_eci(vec, epoch):
    jd = epoch.jd if isinstance(epoch, Epoch) else epoch
    return rotate_about_z(vec, np.asarray(gmst_deg(jd)))


@dataclass(frozen=True)
class GeodeticPoint:
    """Latitude/longitude/altitude on the spherical Earth model.

    Longitude is normalized into (-180, 180]; altitude is km above the
    reference sphere.
    """
    latitude_deg: float
    longitude_deg: float
    altitude_km: float = 0.0

    def __post_init__(self):
        if not -90.0 <= self.latitude_deg <= 90.0:
            raise ValueError(f"latitude {self.latitude_deg} outside [-90, 90]")
        lon = (self.longitude_deg + 180.0) % 360.0 - 180.0
        if lon == -180.0:
            lon = 180.0
        object.__setattr__(self, "longitude_deg", lon)


def ecef_from_latlon(lat_deg, lon_deg, alt_km=0.0):
    """Vectorized geodetic -> ECEF on the spherical Earth (km)."""
    lat = np.radians(np.asarray(lat_deg, dtype=float))
    lon = np.radians(np.asarray(lon_deg, dtype=float))
    r = EARTH_RADIUS_KM + np.asarray(alt_km, dtype=float)
    x, y, z = np.broadcast_arrays(r * np.cos(lat) * np.cos(lon),
                                  r * np.cos(lat) * np.sin(lon),
                                  r * np.sin(lat))
    return np.stack([x, y, z], axis=-1)


def geodetic_to_ecef(point: GeodeticPoint) -> np.ndarray:
    return ecef_from_latlon(point.latitude_deg, point.longitude_deg,
                            point.altitude_km)


def ecef_to_geodetic(pos) -> GeodeticPoint:
    """ECEF position (km) -> GeodeticPoint. Rejects the zero vector."""
    p = np.asarray(pos, dtype=float)
    r = float(np.linalg.norm(p))
    if r == 0.0:
        raise ValueError("cannot convert zero-magnitude position to geodetic")
    lat = math.degrees(math.asin(p[2] / r))
    lon = math.degrees(math.atan2(p[1], p[0]))
    return GeodeticPoint(lat, lon, r - EARTH_RADIUS_KM)
