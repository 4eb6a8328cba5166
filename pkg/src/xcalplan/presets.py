"""Built-in satellite fleets and reference-constellation architectures.

Flagship reference sensors (all sun-synchronous, nadir-fixed pushbrooms):

    Landsat-7 / Landsat-8      710 km, 15 deg cross-track FOV
    Sentinel-2A / Sentinel-2B  788 km, 20.6 deg cross-track FOV
    Sentinel-3A / Sentinel-3B  802 km, 68.6 deg FOV, boresight tilted
                               12.6 deg cross-track (anti-sun side of the
                               morning descending track)

Test satellites: three frame-camera cubesats with 2 x 3 deg FOV — one
ISS-deployed (410 km / 51.6 deg) and two sun-synchronous units trailing
Landsat-8 and Landsat-7 in their planes.

Reference-calibrator architectures are circular 450 km / 45 deg
constellations of small transfer radiometers (2 x 3 deg FOV, agile within a
27.5 deg half-angle regard cone), arranged per the six plane/satellite
topologies below. Plane RAANs are placed by a 1-degree grid search
maximizing the minimum angular separation from the flagship planes.

Orbit phasing details the source missions do not pin down (local node
times, in-plane phases, the 5 deg trailing offset) are documented defaults
here and overridable in scenario configuration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .access import Satellite
from .geometry import PointingMode, SensorSpec
from .propagation import OrbitalElements, sso_inclination
from .timebase import Epoch, sun_position_eci

# Local solar time of the descending node, hours.
LTDN_LANDSAT = 10.0
LTDN_SENTINEL2 = 10.5
LTDN_SENTINEL3 = 10.0

DOVE_TRAIL_DEG = 5.0          # mean-anomaly lag behind the host Landsat
ISS_ALTITUDE_KM = 410.0
ISS_INCLINATION_DEG = 51.6

TR_ALTITUDE_KM = 450.0
TR_INCLINATION_DEG = 45.0
TR_FOR_HALF_ANGLE_DEG = 27.5

# Along-track FOV stand-in for pushbroom imagers (deg): wide enough that a
# 1 s sweep sample always lands inside the footprint at >= 700 km altitude.
PUSHBROOM_ALONG_FOV_DEG = 1.0

ARCHITECTURES = {
    1: (1, 1),
    2: (2, 1),
    3: (3, 1),
    4: (4, 2),
    5: (6, 2),
    6: (6, 3),
}


def raan_for_ltdn(epoch: Epoch, ltdn_hours: float) -> float:
    """RAAN placing the descending node at the given local solar time.

    The descending node sits at inertial right ascension RAAN + 180 deg;
    local solar time there is 12 h + (RA - RA_sun) / 15.
    """
    sun_unit, _ = sun_position_eci(epoch.jd)
    sun_ra = math.degrees(math.atan2(sun_unit[1], sun_unit[0]))
    return (sun_ra + 15.0 * (ltdn_hours - 12.0) - 180.0) % 360.0


def _sso_sat(sat_id, altitude_km, ltdn_hours, phase_deg, sensor, epoch):
    elements = OrbitalElements.circular(
        altitude_km, sso_inclination(altitude_km),
        raan_for_ltdn(epoch, ltdn_hours), phase_deg, epoch)
    return Satellite(sat_id, elements, sensor)


def flagship_presets(epoch: Epoch) -> list[Satellite]:
    """The six flagship reference satellites at the given epoch."""
    oli = SensorSpec(15.0, PUSHBROOM_ALONG_FOV_DEG, PointingMode.NADIR_FIXED)
    msi = SensorSpec(20.6, PUSHBROOM_ALONG_FOV_DEG, PointingMode.NADIR_FIXED)
    olci = SensorSpec(68.6, PUSHBROOM_ALONG_FOV_DEG, PointingMode.NADIR_FIXED,
                      boresight_tilt_deg=12.6)
    return [
        _sso_sat("Landsat-8", 710.0, LTDN_LANDSAT, 0.0, oli, epoch),
        _sso_sat("Landsat-7", 710.0, LTDN_LANDSAT, 180.0, oli, epoch),
        _sso_sat("Sentinel-2A", 788.0, LTDN_SENTINEL2, 0.0, msi, epoch),
        _sso_sat("Sentinel-2B", 788.0, LTDN_SENTINEL2, 180.0, msi, epoch),
        _sso_sat("Sentinel-3A", 802.0, LTDN_SENTINEL3, 0.0, olci, epoch),
        _sso_sat("Sentinel-3B", 802.0, LTDN_SENTINEL3, 180.0, olci, epoch),
    ]


def dove_sensor(pointing_mode: PointingMode = PointingMode.CROSS_TRACK_AGILE,
                for_half_angle_deg: float = TR_FOR_HALF_ANGLE_DEG
                ) -> SensorSpec:
    return SensorSpec(2.0, 3.0, pointing_mode, for_half_angle_deg)


def testsat_presets(
        epoch: Epoch,
        pointing_mode: PointingMode = PointingMode.CROSS_TRACK_AGILE,
        for_half_angle_deg: float = TR_FOR_HALF_ANGLE_DEG
        ) -> list[Satellite]:
    """Three cubesat test satellites: ISS-deployed plus two SSO trailers."""
    sensor = dove_sensor(pointing_mode, for_half_angle_deg)
    iss = Satellite("Dove-ISS", OrbitalElements.circular(
        ISS_ALTITUDE_KM, ISS_INCLINATION_DEG, 0.0, 0.0, epoch), sensor)
    sso_1 = _sso_sat("Dove-SSO-1", 710.0, LTDN_LANDSAT,
                     0.0 - DOVE_TRAIL_DEG, sensor, epoch)
    sso_2 = _sso_sat("Dove-SSO-2", 710.0, LTDN_LANDSAT,
                     180.0 - DOVE_TRAIL_DEG, sensor, epoch)
    return [iss, sso_1, sso_2]


def tr_sensor() -> SensorSpec:
    """Transfer-radiometer instrument: narrow frame FOV, 3-DOF agile."""
    return SensorSpec(2.0, 3.0, PointingMode.CONICAL_3DOF,
                      TR_FOR_HALF_ANGLE_DEG)


def _circular_distance_deg(a: float, b: float) -> float:
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


def select_plane_raans(n_planes: int, reference_raans) -> list[float]:
    """Evenly spaced plane RAANs placed at maximum separation from the
    reference planes: 1-degree grid search on the common offset, maximizing
    the minimum plane-to-reference angular distance; ties break toward the
    smallest offset."""
    reference_raans = [r % 360.0 for r in reference_raans]
    spacing = 360.0 / n_planes
    best_offset, best_score = 0.0, -1.0
    for offset in range(360):
        planes = [(offset + k * spacing) % 360.0 for k in range(n_planes)]
        if reference_raans:
            score = min(_circular_distance_deg(p, r)
                        for p in planes for r in reference_raans)
        else:
            score = 0.0
        if score > best_score:
            best_offset, best_score = float(offset), score
    return sorted((best_offset + k * spacing) % 360.0
                  for k in range(n_planes))


def build_architecture(arch_id: int, epoch: Epoch,
                       reference_planes_raan) -> list[Satellite]:
    """Table of reference-calibrator constellations, architectures 1-6.

    Args:
        reference_planes_raan: RAANs (deg) of the flagship planes the new
            planes must stay angularly clear of.

    Returns:
        Satellites named TR-1..TR-n, plane-major, evenly phased in anomaly
        within each plane.
    """
    if arch_id not in ARCHITECTURES:
        raise ValueError(f"unknown architecture id {arch_id} (must be 1-6)")
    n_sats, n_planes = ARCHITECTURES[arch_id]
    per_plane = n_sats // n_planes
    raans = select_plane_raans(n_planes, reference_planes_raan)
    sensor = tr_sensor()
    sats = []
    for p, raan in enumerate(raans):
        for j in range(per_plane):
            sat_id = f"TR-{p * per_plane + j + 1}"
            elements = OrbitalElements.circular(
                TR_ALTITUDE_KM, TR_INCLINATION_DEG, raan,
                j * 360.0 / per_plane, epoch)
            sats.append(Satellite(sat_id, elements, sensor))
    return sats


def flagship_plane_raans(epoch: Epoch) -> list[float]:
    """Distinct flagship plane RAANs at the epoch (one per mission pair)."""
    seen = []
    for sat in flagship_presets(epoch):
        raan = sat.elements.raan_deg
        if all(_circular_distance_deg(raan, r) > 1e-9 for r in seen):
            seen.append(raan)
    return seen
