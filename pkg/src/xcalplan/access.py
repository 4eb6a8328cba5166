"""Time-window sweep producing per-grid-point access events.

Two-phase sampling per (satellite, site): a coarse pass (default 10 s) keeps
only the stretches where the sub-satellite point is conservatively within
sensor ground reach of the site (reach + site half-diagonal + one coarse
step of relative motion), then a fine pass (default 1 s) evaluates the full
look geometry and pointing-mode access test against all 200 grid points.

A 450 km satellite moves ~7.6 km/s over ground, so the 1 s fine step
resolves access boundaries to under 8 km against the 250 km region scale.
Events are emitted regardless of darkness; absolute-SZA enforcement is a
planner-side filter.

Evaluation is independent per (satellite, site) pair and may be fanned out
over worker threads; the canonical output ordering — (epoch, sat_id,
site_id, grid_index) — makes the result identical for any worker count.
"""
from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import (SensorSpec, access_mask, ground_reach_angle_deg,
                       look_components)
from .propagation import OrbitalElements, R_EARTH_KM, propagate_arrays
from .sites import CalSite, grid_latlon_arrays
from .timebase import (Epoch, ecef_from_latlon, gmst_deg, rotate_about_z,
                       sun_position_eci)

# Bound on relative ground speed (satellite ground track + Earth rotation),
# used to pad the coarse prune so no fine-step access can slip between
# coarse samples.
_MAX_GROUND_SPEED_KM_S = 8.5


@dataclass(frozen=True)
class Satellite:
    """One satellite with its instrument."""
    sat_id: str
    elements: OrbitalElements
    sensor: SensorSpec


@dataclass(frozen=True)
class ScenarioWindow:
    """Simulation time window with the two sweep resolutions."""
    start: Epoch
    duration_hours: float
    coarse_step_s: float = 10.0
    fine_step_s: float = 1.0

    def __post_init__(self):
        if self.duration_hours < 0.0:
            raise ValueError("duration must be non-negative")
        if self.fine_step_s <= 0.0 or self.coarse_step_s <= 0.0:
            raise ValueError("steps must be positive")
        if self.fine_step_s > self.coarse_step_s:
            raise ValueError("fine step must not exceed the coarse step")

    @property
    def duration_s(self) -> float:
        return self.duration_hours * 3600.0

    def fine_offsets(self) -> np.ndarray:
        """Half-open sample grid [0, duration) at the fine step."""
        return np.arange(0.0, self.duration_s, self.fine_step_s)

    def coarse_offsets(self) -> np.ndarray:
        return np.arange(0.0, self.duration_s, self.coarse_step_s)


@dataclass(frozen=True, slots=True)
class AccessEvent:
    """One (satellite, grid point, time) sample that passes the access test."""
    sat_id: str
    site_id: str
    grid_index: int
    epoch: Epoch
    off_nadir_deg: float
    vza_deg: float
    sza_deg: float
    slant_range_km: float


@dataclass(frozen=True)
class AccessInterval:
    """A contiguous run of fine-step events for one (sat, grid point)."""
    sat_id: str
    site_id: str
    grid_index: int
    start: Epoch
    end: Epoch
    best: AccessEvent  # minimum off-nadir sample of the run


class _SiteContext:
    """Per-site precomputation shared across satellites."""

    def __init__(self, site: CalSite):
        self.site = site
        lat, lon = grid_latlon_arrays(site)
        self.target_ecef = ecef_from_latlon(lat, lon)
        center = ecef_from_latlon(site.center.latitude_deg,
                                  site.center.longitude_deg)
        self.center_unit = center / np.linalg.norm(center)
        # Half-diagonal of the square region, as an Earth central angle.
        self.half_diag_rad = (site.extent_km * 0.5 * np.sqrt(2.0)
                              / R_EARTH_KM)


def _sort_key(event: AccessEvent):
    return (event.epoch.jd, event.sat_id, event.site_id, event.grid_index)


def compute_accesses(satellites, sites, window: ScenarioWindow,
                     threads: int = 1) -> list[AccessEvent]:
    """Sweep the window and emit every in-access fine sample.

    Args:
        satellites: iterable of Satellite.
        sites: iterable of CalSite.
        threads: worker threads for the (satellite, site) fan-out; the
            result is independent of this value.

    Returns:
        AccessEvents sorted by (epoch, sat_id, site_id, grid_index).
    """
    satellites = list(satellites)
    sites = list(sites)
    if not satellites or not sites:
        raise ValueError("need at least one satellite and one site")
    if window.duration_s == 0.0:
        return []

    contexts = [_SiteContext(site) for site in sites]
    coarse = window.coarse_offsets()
    tasks = []
    for sat in satellites:
        sub_unit = _subsatellite_units(sat, window, coarse)
        for ctx in contexts:
            tasks.append((sat, ctx, sub_unit))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(
                lambda args: _sweep_pair(*args, window=window), tasks))
    else:
        chunks = [_sweep_pair(*task, window=window) for task in tasks]

    events = [event for chunk in chunks for event in chunk]
    events.sort(key=_sort_key)
    return events


def _subsatellite_units(sat: Satellite, window: ScenarioWindow,
                        coarse: np.ndarray) -> np.ndarray:
    """Unit ECEF vectors of the sub-satellite point on the coarse grid."""
    dt0 = window.start.seconds_since(sat.elements.epoch)
    pos_eci, _ = propagate_arrays(sat.elements, coarse + dt0)
    theta = gmst_deg(window.start.jd + coarse / 86400.0)
    pos_ecef = rotate_about_z(pos_eci, -theta)
    return pos_ecef / np.linalg.norm(pos_ecef, axis=-1, keepdims=True)


def _candidate_ranges(sat: Satellite, ctx: _SiteContext,
                      sub_unit: np.ndarray, window: ScenarioWindow):
    """Merged fine-index ranges worth evaluating for one (sat, site)."""
    altitude = sat.elements.semimajor_axis_km - R_EARTH_KM
    reach_rad = np.radians(ground_reach_angle_deg(altitude, sat.sensor))
    pad_rad = (_MAX_GROUND_SPEED_KM_S * window.coarse_step_s) / R_EARTH_KM
    threshold = np.cos(min(reach_rad + ctx.half_diag_rad + pad_rad, np.pi))
    hits = np.nonzero(sub_unit @ ctx.center_unit >= threshold)[0]
    if hits.size == 0:
        return []
    n_fine = int(np.ceil(window.duration_s / window.fine_step_s))
    per_coarse = window.coarse_step_s / window.fine_step_s
    ranges = []
    for k in hits:
        lo = int(max(0, np.floor((k - 1) * per_coarse)))
        hi = int(min(n_fine, np.ceil((k + 2) * per_coarse)))
        if ranges and lo <= ranges[-1][1]:
            ranges[-1][1] = max(ranges[-1][1], hi)
        else:
            ranges.append([lo, hi])
    return ranges


def _sweep_pair(sat: Satellite, ctx: _SiteContext, sub_unit: np.ndarray,
                window: ScenarioWindow) -> list[AccessEvent]:
    ranges = _candidate_ranges(sat, ctx, sub_unit, window)
    if not ranges:
        return []
    events: list[AccessEvent] = []
    dt0 = window.start.seconds_since(sat.elements.epoch)
    for lo, hi in ranges:
        offs = np.arange(lo, hi) * window.fine_step_s
        pos_eci, vel_eci = propagate_arrays(sat.elements, offs + dt0)
        jd = window.start.jd + offs / 86400.0
        theta = gmst_deg(jd)
        pos_ecef = rotate_about_z(pos_eci, -theta)
        vel_ecef = rotate_about_z(vel_eci, -theta)
        sun_unit, sun_dist = sun_position_eci(jd)
        sun_ecef = rotate_about_z(sun_unit, -theta) * sun_dist[:, None]

        comp = look_components(pos_ecef, vel_ecef, ctx.target_ecef, sun_ecef)
        mask = access_mask(comp, sat.sensor) & comp["visible"]
        t_idx, g_idx = np.nonzero(mask)
        if t_idx.size == 0:
            continue
        off_nadir = comp["off_nadir"][t_idx, g_idx].tolist()
        vza = comp["vza"][t_idx, g_idx].tolist()
        sza = comp["sza"][t_idx, g_idx].tolist()
        slant = comp["slant"][t_idx, g_idx].tolist()
        jd_hits = jd[t_idx].tolist()
        site_id = ctx.site.site_id
        for i, grid_index in enumerate(g_idx.tolist()):
            events.append(AccessEvent(
                sat.sat_id, site_id, grid_index, Epoch(jd_hits[i]),
                off_nadir[i], vza[i], sza[i], slant[i]))
    return events


def accesses_to_intervals(events, fine_step_s: float) -> list[AccessInterval]:
    """Merge contiguous fine-step runs per (sat, site, grid point).

    Events must be sorted (compute_accesses order). Runs break when the gap
    between consecutive samples exceeds 1.5 fine steps; the representative
    sample of a run is its minimum-off-nadir event.
    """
    by_track: dict[tuple, list[AccessEvent]] = {}
    for event in events:
        key = (event.sat_id, event.site_id, event.grid_index)
        by_track.setdefault(key, []).append(event)

    gap_days = 1.5 * fine_step_s / 86400.0
    intervals = []
    for key in sorted(by_track):
        run: list[AccessEvent] = []
        for event in by_track[key]:
            if run and event.epoch.jd - run[-1].epoch.jd > gap_days:
                intervals.append(_close_run(run))
                run = []
            run.append(event)
        if run:
            intervals.append(_close_run(run))
    intervals.sort(key=lambda iv: (iv.start.jd, iv.sat_id, iv.site_id,
                                   iv.grid_index))
    return intervals


def _close_run(run: list[AccessEvent]) -> AccessInterval:
    best = min(run, key=lambda e: (e.off_nadir_deg, e.epoch.jd))
    return AccessInterval(run[0].sat_id, run[0].site_id, run[0].grid_index,
                          run[0].epoch, run[-1].epoch, best)


EVENT_CSV_HEADER = ("epoch_iso", "sat_id", "site_id", "grid_index",
                    "off_nadir_deg", "vza_deg", "sza_deg", "slant_range_km")


def write_events_csv(events, path) -> None:
    with Path(path).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(EVENT_CSV_HEADER)
        for e in events:
            writer.writerow((e.epoch.iso(), e.sat_id, e.site_id,
                             e.grid_index, f"{e.off_nadir_deg:.6f}",
                             f"{e.vza_deg:.6f}", f"{e.sza_deg:.6f}",
                             f"{e.slant_range_km:.6f}"))
