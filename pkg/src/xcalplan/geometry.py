"""Instrument pointing modes, access tests, and per-sample look geometry.

Angles of interest for every (satellite, target, time) sample:

    off-nadir  angle at the satellite between nadir and the target
    VZA        view zenith angle at the target (zenith vs. satellite)
    SZA        solar zenith angle at the target (zenith vs. Sun)

The satellite-local frame used to decompose a look direction:

    +z  nadir (toward the geocenter)
    +x  along inertial velocity, projected perpendicular to the radial
    +y  z cross x, i.e. to the right of the direction of flight

Cross-track boresight tilt and roll angles are signed in the +y sense.

Pointing-mode access semantics (see in_access):
    NADIR_FIXED       target inside the rectangular FOV footprint of the
                      (possibly statically tilted) boresight.
    CROSS_TRACK_AGILE boresight may roll about the velocity axis; the target
                      must lie within the field-of-regard cone and its
                      residual along-track miss (after the optimal roll)
                      within the along-track half-FOV.
    CONICAL_3DOF      target within the field-of-regard cone, full stop.

With a shared FOR half-angle and FOV, the three modes accept nested sets:
NADIR_FIXED subset of CROSS_TRACK_AGILE subset of CONICAL_3DOF. The cone
bound is applied to the target direction (not the boresight) so the nesting
is exact; the difference from boresight-only reach is under half the
along-track FOV, negligible against the 27.5 deg regard cones in use.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .timebase import (EARTH_RADIUS_KM, Epoch, GeodeticPoint, ecef_to_eci,
                       ecef_to_geodetic, eci_to_ecef, geodetic_to_ecef,
                       sun_position_eci)
from .propagation import EciState


class PointingMode(enum.Enum):
    NADIR_FIXED = "NADIR_FIXED"
    CROSS_TRACK_AGILE = "CROSS_TRACK_AGILE"
    CONICAL_3DOF = "CONICAL_3DOF"


@dataclass(frozen=True)
class SensorSpec:
    """Field of view, field of regard, and pointing mode of one instrument."""
    fov_cross_track_deg: float
    fov_along_track_deg: float
    pointing_mode: PointingMode = PointingMode.NADIR_FIXED
    for_half_angle_deg: float = 0.0
    boresight_tilt_deg: float = 0.0  # static cross-track tilt, +y sense

    def __post_init__(self):
        for name in ("fov_cross_track_deg", "fov_along_track_deg"):
            value = getattr(self, name)
            if not 0.0 < value < 180.0:
                raise ValueError(f"{name} {value} outside (0, 180)")
        if not 0.0 <= self.for_half_angle_deg < 70.0:
            raise ValueError(
                f"for_half_angle_deg {self.for_half_angle_deg} outside [0, 70)")

    def max_boresight_reach_deg(self) -> float:
        """Conservative off-nadir half-angle bounding everything the sensor
        can see; used for coarse access pruning."""
        if self.pointing_mode is PointingMode.NADIR_FIXED:
            return (abs(self.boresight_tilt_deg)
                    + 0.5 * math.hypot(self.fov_cross_track_deg,
                                       self.fov_along_track_deg))
        return self.for_half_angle_deg + 0.5 * self.fov_along_track_deg


@dataclass(frozen=True)
class LookGeometry:
    """One satellite-to-surface-target look, all angles in degrees."""
    off_nadir_deg: float
    vza_deg: float
    sza_deg: float
    slant_range_km: float
    cross_track_deg: float   # signed roll-plane angle of the target
    along_track_deg: float   # signed residual elevation out of the roll plane
    visible: bool            # False when cut off by the Earth limb


def look_components(sat_pos, sat_vel, target_pos, sun_pos):
    """Vectorized look-angle computation from raw position vectors.

    All inputs are km vectors in one common frame (any orthonormal frame;
    the result is rotation-invariant). Shapes broadcast as
    sat (T, 3) x target (G, 3) -> (T, G) outputs.

    Returns a dict of arrays: off_nadir, vza, sza, slant, cross, along,
    visible.
    """
    sat = np.atleast_2d(np.asarray(sat_pos, dtype=float))
    vel = np.atleast_2d(np.asarray(sat_vel, dtype=float))
    tgt = np.atleast_2d(np.asarray(target_pos, dtype=float))
    sun = np.atleast_2d(np.asarray(sun_pos, dtype=float))

    r_norm = np.linalg.norm(sat, axis=-1, keepdims=True)
    r_hat = sat / r_norm
    z_hat = -r_hat
    v_rad = np.sum(vel * r_hat, axis=-1, keepdims=True)
    x_dir = vel - v_rad * r_hat
    x_hat = x_dir / np.linalg.norm(x_dir, axis=-1, keepdims=True)
    y_hat = np.cross(z_hat, x_hat)

    d = tgt[None, :, :] - sat[:, None, :]          # (T, G, 3)
    slant = np.linalg.norm(d, axis=-1)
    d_hat = d / slant[..., None]

    dz = np.einsum("tgi,ti->tg", d_hat, z_hat)
    dx = np.einsum("tgi,ti->tg", d_hat, x_hat)
    dy = np.einsum("tgi,ti->tg", d_hat, y_hat)

    off_nadir = np.degrees(np.arccos(np.clip(dz, -1.0, 1.0)))
    cross = np.degrees(np.arctan2(dy, dz))
    along = np.degrees(np.arcsin(np.clip(dx, -1.0, 1.0)))

    tgt_hat = tgt / np.linalg.norm(tgt, axis=-1, keepdims=True)
    cos_vza = -np.einsum("tgi,gi->tg", d_hat, tgt_hat)
    vza = np.degrees(np.arccos(np.clip(cos_vza, -1.0, 1.0)))

    to_sun = sun[:, None, :] - tgt[None, :, :]
    to_sun_hat = to_sun / np.linalg.norm(to_sun, axis=-1, keepdims=True)
    cos_sza = np.einsum("tgi,gi->tg", to_sun_hat, tgt_hat)
    sza = np.degrees(np.arccos(np.clip(cos_sza, -1.0, 1.0)))

    return {
        "off_nadir": off_nadir,
        "vza": vza,
        "sza": sza,
        "slant": slant,
        "cross": cross,
        "along": along,
        "visible": vza <= 90.0,
    }


def access_mask(ncomp: dict, sensor: SensorSpec) -> np.ndarray:
    """Vectorized in_access over look_components output."""
    mode = sensor.pointing_mode
    half_along = 0.5 * sensor.fov_along_track_deg
    if mode is PointingMode.CONICAL_3DOF:
        return ncomp["off_nadir"] <= sensor.for_half_angle_deg
    if mode is PointingMode.CROSS_TRACK_AGILE:
        return ((ncomp["off_nadir"] <= sensor.for_half_angle_deg)
                & (np.abs(ncomp["along"]) <= half_along))
    # NADIR_FIXED: containment in the tilted rectangular footprint. Rebuild
    # the direction components in the tilted frame from (cross, along,
    # off_nadir): dz' = dz cos(tilt) + dy sin(tilt).
    tilt = math.radians(sensor.boresight_tilt_deg)
    dz = np.cos(np.radians(ncomp["off_nadir"]))
    dx = np.sin(np.radians(ncomp["along"]))
    dy = np.tan(np.radians(ncomp["cross"])) * dz
    dz_t = dz * math.cos(tilt) + dy * math.sin(tilt)
    dy_t = dy * math.cos(tilt) - dz * math.sin(tilt)
    cross_t = np.degrees(np.arctan2(dy_t, dz_t))
    along_t = np.degrees(np.arctan2(dx, dz_t))
    return ((np.abs(cross_t) <= 0.5 * sensor.fov_cross_track_deg)
            & (np.abs(along_t) <= half_along)
            & (dz_t > 0.0))


def in_access(look: LookGeometry, sensor: SensorSpec) -> bool:
    """Whether a (visible) look lies inside the sensor's reachable footprint."""
    comp = {
        "off_nadir": np.array([[look.off_nadir_deg]]),
        "along": np.array([[look.along_track_deg]]),
        "cross": np.array([[look.cross_track_deg]]),
    }
    return bool(access_mask(comp, sensor)[0, 0])


def look_geometry(sat_state: EciState, target: GeodeticPoint,
                  epoch: Epoch | None = None) -> LookGeometry:
    """Full look geometry from an ECI state to a surface target.

    The target is fixed in ECEF; it is rotated into ECI at the state epoch
    (or an explicit override) before the angle computation. Targets beyond
    the Earth limb come back with visible=False.
    """
    ep = epoch if epoch is not None else sat_state.epoch
    tgt_eci = ecef_to_eci(geodetic_to_ecef(target), ep)
    sun_unit, sun_dist = sun_position_eci(ep.jd)
    comp = look_components(sat_state.position_km, sat_state.velocity_km_s,
                           tgt_eci, sun_unit * sun_dist)
    return LookGeometry(
        off_nadir_deg=float(comp["off_nadir"][0, 0]),
        vza_deg=float(comp["vza"][0, 0]),
        sza_deg=float(comp["sza"][0, 0]),
        slant_range_km=float(comp["slant"][0, 0]),
        cross_track_deg=float(comp["cross"][0, 0]),
        along_track_deg=float(comp["along"][0, 0]),
        visible=bool(comp["visible"][0, 0]))


def nadir_point(state: EciState) -> GeodeticPoint:
    """Sub-satellite surface point on the spherical Earth."""
    pos_ecef = eci_to_ecef(state.position_km, state.epoch)
    unit = pos_ecef / np.linalg.norm(pos_ecef)
    point = ecef_to_geodetic(unit * EARTH_RADIUS_KM)
    return GeodeticPoint(point.latitude_deg, point.longitude_deg, 0.0)


def vza_from_off_nadir(altitude_km: float, off_nadir_deg: float) -> float:
    """Spherical law of sines: sin(vza) = ((Re+h)/Re) sin(eta)."""
    ratio = (EARTH_RADIUS_KM + altitude_km) / EARTH_RADIUS_KM
    s = ratio * math.sin(math.radians(off_nadir_deg))
    if s > 1.0:
        raise ValueError(
            f"off-nadir angle {off_nadir_deg} deg looks past the Earth limb "
            f"at {altitude_km} km altitude")
    return math.degrees(math.asin(s))


def swath_half_width(altitude_km: float, half_angle_deg: float) -> float:
    """Ground arc distance (km) from nadir to the footprint edge.

    Central angle lambda = vza - eta from the spherical triangle; the arc is
    Re * lambda. Raises ValueError when the half-angle reaches past the limb.
    """
    if half_angle_deg < 0.0:
        raise ValueError("half angle must be non-negative")
    vza = vza_from_off_nadir(altitude_km, half_angle_deg)
    return EARTH_RADIUS_KM * math.radians(vza - half_angle_deg)


def ground_reach_angle_deg(altitude_km: float, sensor: SensorSpec) -> float:
    """Earth central angle from nadir bounding the sensor's ground reach,
    clamped below the limb; conservative input to coarse pruning."""
    limb = math.degrees(math.asin(
        EARTH_RADIUS_KM / (EARTH_RADIUS_KM + altitude_km)))
    eta = min(sensor.max_boresight_reach_deg(), limb - 1e-6)
    return vza_from_off_nadir(altitude_km, eta) - eta
