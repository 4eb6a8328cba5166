"""Cross-calibration opportunity pairing, crossover detection, and counting.

Two flavors of opportunity:

    VICARIOUS  a reference event and a test event over the same calibration
               grid point, within the allowed time gap, solar/view geometry
               deltas, absolute-angle caps, and planning horizon.
    TOA        a ground-track crossover: the reference satellite's nadir
               point falls inside the test satellite's field-of-regard
               ground reach within the allowed time gap, anywhere on Earth.

Vicarious pairing runs a per-grid-point time-sorted sliding window, O(n +
matches) rather than all-pairs; randomized tests hold it equal to a brute
force oracle. Grid-level matches from one (site, ref pass, test pass) are
collapsed by dedupe_to_passes into a single region opportunity carrying up
to 200 per-grid image options, which is the unit the summary count curves
report.

TOA detection is split into two stages so a scenario can sweep criteria
variants cheaply: toa_crossover_detections samples both ground tracks once
under the loosest bounds, and detections_to_opportunities re-filters,
clusters, and dedupes per variant. Filtering a loose detection set with
tighter bounds is exactly equivalent to detecting under those bounds.

dt is kept signed (test minus reference, hours) and filtered on magnitude;
downstream schedulers need to know who imaged first.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .access import AccessEvent, Satellite, ScenarioWindow
from .geometry import (PointingMode, ground_reach_angle_deg,
                       vza_from_off_nadir)
from .propagation import R_EARTH_KM, propagate_arrays
from .timebase import (Epoch, GeodeticPoint, gmst_deg, rotate_about_z,
                       sun_position_eci)

KIND_VICARIOUS = "VICARIOUS"
KIND_TOA = "TOA"


@dataclass(frozen=True)
class FilterCriteria:
    """Pairing thresholds; absolute caps default to off (infinity)."""
    dt_site_max_hours: float
    dsza_max_deg: float
    dvza_max_deg: float
    sza_abs_max_deg: float = math.inf
    vza_abs_max_deg: float = math.inf
    dt_stab_horizon_hours: float = math.inf

    def __post_init__(self):
        for name in ("dt_site_max_hours", "dsza_max_deg", "dvza_max_deg",
                     "sza_abs_max_deg", "vza_abs_max_deg",
                     "dt_stab_horizon_hours"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")
        if self.dt_site_max_hours > self.dt_stab_horizon_hours:
            raise ValueError(
                "dt_site_max_hours cannot exceed dt_stab_horizon_hours")


@dataclass(frozen=True)
class XcalOpportunity:
    """One matched (reference event, test event) pair."""
    kind: str
    ref_event: AccessEvent
    test_event: AccessEvent
    dt_hours: float      # signed: test - reference
    dsza_deg: float
    dvza_deg: float
    location: GeodeticPoint | None = None

    @property
    def ref_sat(self) -> str:
        return self.ref_event.sat_id

    @property
    def test_sat(self) -> str:
        return self.test_event.sat_id

    @property
    def site_id(self) -> str:
        return self.ref_event.site_id

    @property
    def grid_index(self) -> int:
        return self.ref_event.grid_index

    @property
    def t_latest_jd(self) -> float:
        return max(self.ref_event.epoch.jd, self.test_event.epoch.jd)


@dataclass(frozen=True)
class RegionOpportunity:
    """All grid-level matches of one (site, ref pass, test pass) group."""
    site_id: str
    ref_sat: str
    test_sat: str
    ref_pass_start: Epoch
    ref_pass_end: Epoch
    test_pass_start: Epoch
    test_pass_end: Epoch
    image_options: tuple[XcalOpportunity, ...]  # best pair per grid point

    @property
    def best(self) -> XcalOpportunity:
        return min(self.image_options,
                   key=lambda o: (abs(o.dt_hours), o.dsza_deg, o.dvza_deg,
                                  o.ref_event.epoch.jd))

    @property
    def dt_hours(self) -> float:
        return self.best.dt_hours

    @property
    def t_latest_jd(self) -> float:
        return self.best.t_latest_jd

    @property
    def grid_index(self) -> int:
        return self.best.grid_index


def _opportunity_sort_key(op: XcalOpportunity):
    return (op.dt_hours, op.ref_event.epoch.jd, op.site_id, op.grid_index,
            op.ref_sat, op.test_sat, op.test_event.epoch.jd)


def _passes_caps(event: AccessEvent, criteria: FilterCriteria) -> bool:
    return (event.sza_deg <= criteria.sza_abs_max_deg
            and event.vza_deg <= criteria.vza_abs_max_deg)


def pair_vicarious(ref_events, test_events, criteria: FilterCriteria,
                   start: Epoch) -> list[XcalOpportunity]:
    """Match reference and test events per grid point under all filters.

    Args:
        ref_events, test_events: AccessEvents sorted by epoch (the
            compute_accesses order satisfies this).
        start: scenario start; anchors the dt_stab planning horizon.

    Returns:
        Opportunities in canonical (dt, epoch, site, ...) order.
    """
    horizon_jd = start.jd + criteria.dt_stab_horizon_hours / 24.0
    dt_max_days = criteria.dt_site_max_hours / 24.0

    ref_by_grid: dict[tuple, list[AccessEvent]] = {}
    for ev in ref_events:
        if ev.epoch.jd <= horizon_jd and _passes_caps(ev, criteria):
            ref_by_grid.setdefault((ev.site_id, ev.grid_index), []).append(ev)
    test_by_grid: dict[tuple, list[AccessEvent]] = {}
    for ev in test_events:
        if ev.epoch.jd <= horizon_jd and _passes_caps(ev, criteria):
            test_by_grid.setdefault((ev.site_id, ev.grid_index), []).append(ev)

    out: list[XcalOpportunity] = []
    for key, tests in test_by_grid.items():
        refs = ref_by_grid.get(key)
        if not refs:
            continue
        lo = 0
        for test_ev in tests:
            t_jd = test_ev.epoch.jd
            while lo < len(refs) and refs[lo].epoch.jd < t_jd - dt_max_days:
                lo += 1
            idx = lo
            while idx < len(refs) and refs[idx].epoch.jd <= t_jd + dt_max_days:
                ref_ev = refs[idx]
                idx += 1
                dsza = abs(test_ev.sza_deg - ref_ev.sza_deg)
                if dsza > criteria.dsza_max_deg:
                    continue
                dvza = abs(test_ev.vza_deg - ref_ev.vza_deg)
                if dvza > criteria.dvza_max_deg:
                    continue
                dt_hours = (t_jd - ref_ev.epoch.jd) * 24.0
                out.append(XcalOpportunity(KIND_VICARIOUS, ref_ev, test_ev,
                                           dt_hours, dsza, dvza))
    out.sort(key=_opportunity_sort_key)
    return out


def _pass_ids(epochs_jd: list[float], gap_s: float) -> dict[float, int]:
    """Cluster sorted epochs into passes split at gaps above gap_s."""
    ids: dict[float, int] = {}
    current = -1
    prev = None
    gap_days = gap_s / 86400.0
    for jd in sorted(set(epochs_jd)):
        if prev is None or jd - prev > gap_days:
            current += 1
        ids[jd] = current
        prev = jd
    return ids


def dedupe_to_passes(opportunities, pass_gap_s: float = 300.0
                     ) -> list[RegionOpportunity]:
    """Collapse grid-level matches to (site, ref pass, test pass) groups.

    Passes are maximal runs of one satellite's event epochs over one site
    with gaps at most pass_gap_s. Within a group, each grid point
    contributes its best pair (minimum |dt|, then dsza, dvza) as one image
    option.
    """
    ref_tracks: dict[tuple, list[float]] = {}
    test_tracks: dict[tuple, list[float]] = {}
    for op in opportunities:
        ref_tracks.setdefault((op.ref_sat, op.site_id), []).append(
            op.ref_event.epoch.jd)
        test_tracks.setdefault((op.test_sat, op.site_id), []).append(
            op.test_event.epoch.jd)
    ref_ids = {key: _pass_ids(jds, pass_gap_s)
               for key, jds in ref_tracks.items()}
    test_ids = {key: _pass_ids(jds, pass_gap_s)
                for key, jds in test_tracks.items()}

    groups: dict[tuple, list[XcalOpportunity]] = {}
    for op in opportunities:
        rp = ref_ids[(op.ref_sat, op.site_id)][op.ref_event.epoch.jd]
        tp = test_ids[(op.test_sat, op.site_id)][op.test_event.epoch.jd]
        groups.setdefault(
            (op.site_id, op.ref_sat, op.test_sat, rp, tp), []).append(op)

    regions = []
    for key in sorted(groups):
        members = groups[key]
        per_grid: dict[int, XcalOpportunity] = {}
        for op in members:
            cur = per_grid.get(op.grid_index)
            rank = (abs(op.dt_hours), op.dsza_deg, op.dvza_deg,
                    op.ref_event.epoch.jd, op.test_event.epoch.jd)
            if cur is None or rank < (abs(cur.dt_hours), cur.dsza_deg,
                                      cur.dvza_deg, cur.ref_event.epoch.jd,
                                      cur.test_event.epoch.jd):
                per_grid[op.grid_index] = op
        options = tuple(per_grid[g] for g in sorted(per_grid))
        regions.append(RegionOpportunity(
            site_id=key[0], ref_sat=key[1], test_sat=key[2],
            ref_pass_start=Epoch(min(o.ref_event.epoch.jd for o in members)),
            ref_pass_end=Epoch(max(o.ref_event.epoch.jd for o in members)),
            test_pass_start=Epoch(min(o.test_event.epoch.jd for o in members)),
            test_pass_end=Epoch(max(o.test_event.epoch.jd for o in members)),
            image_options=options))
    regions.sort(key=lambda r: (r.dt_hours, r.ref_pass_start.jd, r.site_id,
                                r.ref_sat, r.test_sat))
    return regions


# --- TOA crossover detection -------------------------------------------------


@dataclass(frozen=True)
class ToaDetections:
    """Raw fine-step crossover detections for one (reference, test) pair.

    Parallel arrays over detections; the filters recorded here let tighter
    criteria be applied as a pure subset without re-sampling the tracks.
    """
    ref_sat_id: str
    test_sat_id: str
    vza_ref_deg: float       # reference nadir-FOV edge bound
    ref_slant_km: float
    t_ref_s: np.ndarray      # seconds from window start
    t_test_s: np.ndarray
    ground_dist_km: np.ndarray
    sza_ref_deg: np.ndarray
    sza_test_deg: np.ndarray
    vza_test_deg: np.ndarray
    off_nadir_test_deg: np.ndarray
    slant_test_km: np.ndarray
    lat_deg: np.ndarray      # crossover point = ref nadir at t_ref
    lon_deg: np.ndarray


def _test_reach_rad(test_sat: Satellite) -> float:
    """Test satellite's field-of-regard ground reach as a central angle."""
    altitude = test_sat.elements.semimajor_axis_km - R_EARTH_KM
    if test_sat.sensor.pointing_mode is PointingMode.NADIR_FIXED:
        return math.radians(ground_reach_angle_deg(altitude, test_sat.sensor))
    eta = test_sat.sensor.for_half_angle_deg
    return math.radians(vza_from_off_nadir(altitude, eta) - eta)


def _fine_tracks(sat: Satellite, window: ScenarioWindow, offs: np.ndarray):
    """ECEF positions and sub-satellite unit vectors on the fine grid."""
    dt0 = window.start.seconds_since(sat.elements.epoch)
    pos_eci, _ = propagate_arrays(sat.elements, offs + dt0)
    theta = gmst_deg(window.start.jd + offs / 86400.0)
    pos_ecef = rotate_about_z(pos_eci, -theta)
    unit = pos_ecef / np.linalg.norm(pos_ecef, axis=-1, keepdims=True)
    return pos_ecef, unit


def _coarse_candidates(ref_unit_c, test_unit_c, window, criteria, reach_rad):
    """Coarse (i_ref, j_test) index pairs worth refining."""
    step = window.coarse_step_s
    pad_rad = 2.0 * 8.5 * step / R_EARTH_KM  # both tracks move <= 8.5 km/s
    cos_thresh = math.cos(min(reach_rad + pad_rad, math.pi))
    k_max = int(math.ceil(criteria.dt_site_max_hours * 3600.0 / step)) + 1
    n = ref_unit_c.shape[0]
    hits_i: list[np.ndarray] = []
    hits_j: list[np.ndarray] = []
    for k in range(-k_max, k_max + 1):
        i0, i1 = max(0, -k), min(n, n - k)
        if i0 >= i1:
            continue
        dots = np.einsum("ij,ij->i", ref_unit_c[i0:i1],
                         test_unit_c[i0 + k:i1 + k])
        idx = np.nonzero(dots >= cos_thresh)[0]
        if idx.size:
            hits_i.append(idx + i0)
            hits_j.append(idx + i0 + k)
    if not hits_i:
        return np.empty(0, dtype=int), np.empty(0, dtype=int)
    return np.concatenate(hits_i), np.concatenate(hits_j)


def toa_crossover_detections(ref_sats, test_sat: Satellite,
                             window: ScenarioWindow,
                             criteria: FilterCriteria
                             ) -> list[ToaDetections]:
    """Fine-step crossover detections against every reference satellite.

    References are treated as nadir-pointed (their normal-operations mode
    for crossover work); the test satellite contributes its field-of-regard
    ground reach. Detections already satisfy `criteria`; pass the loosest
    variant here and tighten via detections_to_opportunities.
    """
    horizon_s = min(window.duration_s,
                    criteria.dt_stab_horizon_hours * 3600.0)
    if horizon_s <= 0.0:
        return []
    fine = np.arange(0.0, horizon_s, window.fine_step_s)
    if fine.size == 0:
        return []

    test_pos, test_unit = _fine_tracks(test_sat, window, fine)
    jd = window.start.jd + fine / 86400.0
    sun_unit, sun_dist = sun_position_eci(jd)
    sun_ecef = rotate_about_z(sun_unit, -gmst_deg(jd)) \
        * np.asarray(sun_dist)[:, None]
    reach_rad = _test_reach_rad(test_sat)

    out = []
    for ref in ref_sats:
        det = _detect_one_pair(ref, test_sat, window, criteria, fine,
                               test_pos, test_unit, sun_ecef, reach_rad)
        if det is not None:
            out.append(det)
    return out


def _detect_one_pair(ref, test_sat, window, criteria, fine, test_pos,
                     test_unit, sun_ecef, reach_rad):
    ref_pos, ref_unit = _fine_tracks(ref, window, fine)
    pc = max(1, int(round(window.coarse_step_s / window.fine_step_s)))
    n_fine = fine.size

    ci, cj = _coarse_candidates(ref_unit[::pc], test_unit[::pc], window,
                                criteria, reach_rad)
    if ci.size == 0:
        return None

    # Expand each coarse candidate into a (3-coarse-step)^2 fine block and
    # dedupe overlaps; then keep fine pairs within reach and time window.
    block = np.arange(-pc, 2 * pc)
    fi = np.clip(ci[:, None] * pc + block[None, :], 0, n_fine - 1)
    fj = np.clip(cj[:, None] * pc + block[None, :], 0, n_fine - 1)
    dt_max_s = criteria.dt_site_max_hours * 3600.0
    cos_reach = math.cos(reach_rad)
    keys = []
    chunk = 2048
    for c0 in range(0, ci.size, chunk):
        fi_c = fi[c0:c0 + chunk]
        fj_c = fj[c0:c0 + chunk]
        dots = np.einsum("cak,cbk->cab", ref_unit[fi_c], test_unit[fj_c])
        tdiff = np.abs(fine[fj_c][:, None, :] - fine[fi_c][:, :, None])
        c_idx, a_idx, b_idx = np.nonzero((dots >= cos_reach)
                                         & (tdiff <= dt_max_s))
        if c_idx.size:
            keys.append(fi_c[c_idx, a_idx].astype(np.int64) * n_fine
                        + fj_c[c_idx, b_idx])
    if not keys:
        return None
    uniq = np.unique(np.concatenate(keys))
    ai = (uniq // n_fine).astype(int)
    aj = (uniq % n_fine).astype(int)

    point_unit = ref_unit[ai]
    point = point_unit * R_EARTH_KM
    dist_km = R_EARTH_KM * np.arccos(np.clip(
        np.einsum("ij,ij->i", point_unit, test_unit[aj]), -1.0, 1.0))

    def sza_at(idx_time):
        to_sun = sun_ecef[idx_time] - point
        to_sun /= np.linalg.norm(to_sun, axis=-1, keepdims=True)
        cosz = np.einsum("ij,ij->i", to_sun, point_unit)
        return np.degrees(np.arccos(np.clip(cosz, -1.0, 1.0)))

    sza_ref = sza_at(ai)
    sza_test = sza_at(aj)
    d = point - test_pos[aj]                 # test satellite -> point
    slant_test = np.linalg.norm(d, axis=-1)
    cos_vza = np.einsum("ij,ij->i", -d, point_unit) / slant_test
    vza_test = np.degrees(np.arccos(np.clip(cos_vza, -1.0, 1.0)))
    test_r = np.linalg.norm(test_pos[aj], axis=-1)
    cos_off = np.einsum("ij,ij->i", d, -test_pos[aj]) / (slant_test * test_r)
    off_test = np.degrees(np.arccos(np.clip(cos_off, -1.0, 1.0)))

    ref_alt = ref.elements.semimajor_axis_km - R_EARTH_KM
    eta_edge = (0.5 * ref.sensor.fov_cross_track_deg
                + abs(ref.sensor.boresight_tilt_deg))
    vza_ref = vza_from_off_nadir(ref_alt, eta_edge)
    dsza = np.abs(sza_test - sza_ref)
    dvza = np.abs(vza_test - vza_ref)

    keep = ((sza_ref <= criteria.sza_abs_max_deg)
            & (sza_test <= criteria.sza_abs_max_deg)
            & (vza_test <= criteria.vza_abs_max_deg)
            & (vza_ref <= criteria.vza_abs_max_deg)
            & (dsza <= criteria.dsza_max_deg)
            & (dvza <= criteria.dvza_max_deg))
    if not np.any(keep):
        return None
    lat = np.degrees(np.arcsin(np.clip(point_unit[keep, 2], -1.0, 1.0)))
    lon = np.degrees(np.arctan2(point_unit[keep, 1], point_unit[keep, 0]))
    return ToaDetections(
        ref_sat_id=ref.sat_id, test_sat_id=test_sat.sat_id,
        vza_ref_deg=vza_ref,
        ref_slant_km=ref_alt / math.cos(math.radians(eta_edge)),
        t_ref_s=fine[ai[keep]], t_test_s=fine[aj[keep]],
        ground_dist_km=dist_km[keep], sza_ref_deg=sza_ref[keep],
        sza_test_deg=sza_test[keep], vza_test_deg=vza_test[keep],
        off_nadir_test_deg=off_test[keep], slant_test_km=slant_test[keep],
        lat_deg=lat, lon_deg=lon)


def detections_to_opportunities(detections, window: ScenarioWindow,
                                criteria: FilterCriteria,
                                dedupe_window_s: float = 300.0
                                ) -> list[XcalOpportunity]:
    """Filter raw detections by (possibly tighter) criteria, cluster
    contiguous runs, and emit one opportunity per cluster at minimum ground
    distance."""
    horizon_s = criteria.dt_stab_horizon_hours * 3600.0
    dt_max_s = criteria.dt_site_max_hours * 3600.0
    out: list[XcalOpportunity] = []
    for det in detections:
        keep = ((det.sza_ref_deg <= criteria.sza_abs_max_deg)
                & (det.sza_test_deg <= criteria.sza_abs_max_deg)
                & (det.vza_test_deg <= criteria.vza_abs_max_deg)
                & (det.vza_ref_deg <= criteria.vza_abs_max_deg)
                & (np.abs(det.sza_test_deg - det.sza_ref_deg)
                   <= criteria.dsza_max_deg)
                & (np.abs(det.vza_test_deg - det.vza_ref_deg)
                   <= criteria.dvza_max_deg)
                & (np.abs(det.t_test_s - det.t_ref_s) <= dt_max_s)
                & (det.t_ref_s <= horizon_s) & (det.t_test_s <= horizon_s))
        if not np.any(keep):
            continue
        rows = sorted(zip(
            det.t_ref_s[keep].tolist(), det.t_test_s[keep].tolist(),
            det.ground_dist_km[keep].tolist(), det.sza_ref_deg[keep].tolist(),
            det.sza_test_deg[keep].tolist(), det.vza_test_deg[keep].tolist(),
            det.off_nadir_test_deg[keep].tolist(),
            det.slant_test_km[keep].tolist(), det.lat_deg[keep].tolist(),
            det.lon_deg[keep].tolist()))
        for members in _cluster_detections(rows, dedupe_window_s):
            (t_ref, t_test, _dist, s_ref, s_test, v_test, off_t, slant,
             lat, lon) = min(members, key=lambda m: (m[2], m[0], m[1]))
            ref_ev = AccessEvent(det.ref_sat_id, "TOA", -1,
                                 window.start.plus_seconds(t_ref), 0.0,
                                 det.vza_ref_deg, s_ref, det.ref_slant_km)
            test_ev = AccessEvent(det.test_sat_id, "TOA", -1,
                                  window.start.plus_seconds(t_test), off_t,
                                  v_test, s_test, slant)
            out.append(XcalOpportunity(
                KIND_TOA, ref_ev, test_ev, (t_test - t_ref) / 3600.0,
                abs(s_test - s_ref), abs(v_test - det.vza_ref_deg),
                GeodeticPoint(lat, lon, 0.0)))
    out.sort(key=_opportunity_sort_key)
    return out


def toa_crossovers(ref_sats, test_sat: Satellite, window: ScenarioWindow,
                   criteria: FilterCriteria,
                   dedupe_window_s: float = 300.0) -> list[XcalOpportunity]:
    """Detect ground-track crossovers between nadir-pointed references and
    one test satellite.

    A detection at fine-sampled times (t_ref, t_test) requires the reference
    nadir point at t_ref to lie within the test satellite's field-of-regard
    ground reach of the test nadir point at t_test, with |t_test - t_ref| <=
    dt_site_max and both times inside the planning horizon. Contiguous
    detections (within dedupe_window_s along both time axes) collapse to the
    single minimum-ground-distance sample. Solar-zenith filters apply at the
    crossover point for both epochs; the reference view zenith is its
    nadir-FOV edge bound and the test view zenith is evaluated at the
    matched geometry.
    """
    detections = toa_crossover_detections(ref_sats, test_sat, window,
                                          criteria)
    return detections_to_opportunities(detections, window, criteria,
                                       dedupe_window_s)


def _cluster_detections(detections, window_s: float):
    """Two-stage contiguity clustering: split on t_ref gaps, then t_test."""
    clusters = []
    group: list = []
    for det in detections:
        if group and det[0] - group[-1][0] > window_s:
            clusters.extend(_split_by_test_time(group, window_s))
            group = []
        group.append(det)
    if group:
        clusters.extend(_split_by_test_time(group, window_s))
    return clusters


def _split_by_test_time(group, window_s: float):
    group = sorted(group, key=lambda m: (m[1], m[0]))
    split = []
    sub: list = []
    for det in group:
        if sub and det[1] - sub[-1][1] > window_s:
            split.append(sub)
            sub = []
        sub.append(det)
    if sub:
        split.append(sub)
    return split


# --- counting and output ------------------------------------------------------


def count_curve(opportunities, dt_grid_hours, group_keys=("test_sat",),
                expected_groups=None):
    """Cumulative counts of |dt| <= threshold per group.

    Works on anything exposing dt_hours plus the group-key attributes
    (raw opportunities or region opportunities alike). `expected_groups`
    lists group-key tuples that must appear even with zero opportunities,
    so empty results still produce all-zero curves.

    Returns:
        List of row dicts {**group, "dt_threshold_hours": thr, "count": n},
        sorted by group then threshold.
    """
    groups: dict[tuple, list[float]] = {}
    for key in expected_groups or ():
        groups.setdefault(tuple(key), [])
    for op in opportunities:
        key = tuple(getattr(op, k) for k in group_keys)
        groups.setdefault(key, []).append(abs(op.dt_hours))
    rows = []
    for key in sorted(groups):
        dts = np.sort(np.array(groups[key]))
        for thr in dt_grid_hours:
            rows.append({**dict(zip(group_keys, key)),
                         "dt_threshold_hours": float(thr),
                         "count": int(np.searchsorted(dts, thr, "right"))})
    return rows


def horizon_sweep(opportunities, horizons_hours, start: Epoch,
                  group_keys=("test_sat",)):
    """Counts restricted to opportunities completing within each horizon."""
    rows = []
    ops = list(opportunities)
    for horizon in horizons_hours:
        limit = start.jd + horizon / 24.0
        groups: dict[tuple, int] = {}
        for op in ops:
            if op.t_latest_jd <= limit:
                key = tuple(getattr(op, k) for k in group_keys)
                groups[key] = groups.get(key, 0) + 1
        for key in sorted(groups):
            rows.append({**dict(zip(group_keys, key)),
                         "horizon_hours": float(horizon),
                         "count": groups[key]})
    return rows


OPPORTUNITY_CSV_HEADER = (
    "kind", "ref_sat", "test_sat", "site_id", "lat_deg", "lon_deg",
    "grid_index", "t_ref_iso", "t_test_iso", "dt_hours", "dsza_deg",
    "dvza_deg", "sza_ref_deg", "sza_test_deg", "vza_ref_deg", "vza_test_deg")


def write_opportunities_csv(rows, path, locator=None) -> None:
    """Write opportunity rows (XcalOpportunity or RegionOpportunity).

    Region opportunities are written as their best image option. `locator`
    maps (site_id, grid_index) to a GeodeticPoint for rows without an
    explicit crossover location.
    """
    with Path(path).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(OPPORTUNITY_CSV_HEADER)
        for row in rows:
            op = row.best if isinstance(row, RegionOpportunity) else row
            loc = op.location
            if loc is None and locator is not None:
                loc = locator((op.site_id, op.grid_index))
            lat = f"{loc.latitude_deg:.6f}" if loc else ""
            lon = f"{loc.longitude_deg:.6f}" if loc else ""
            writer.writerow((
                op.kind, op.ref_sat, op.test_sat, op.site_id, lat, lon,
                op.grid_index, op.ref_event.epoch.iso(),
                op.test_event.epoch.iso(), f"{op.dt_hours:.6f}",
                f"{op.dsza_deg:.4f}", f"{op.dvza_deg:.4f}",
                f"{op.ref_event.sza_deg:.4f}", f"{op.test_event.sza_deg:.4f}",
                f"{op.ref_event.vza_deg:.4f}", f"{op.test_event.vza_deg:.4f}"))


COUNTS_CSV_HEADER = ("test_sat", "criteria_label", "dt_threshold_hours",
                     "horizon_hours", "count")


def write_counts_csv(rows, path) -> None:
    """Rows: dicts with the COUNTS_CSV_HEADER keys."""
    with Path(path).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(COUNTS_CSV_HEADER)
        for row in rows:
            writer.writerow((row["test_sat"], row["criteria_label"],
                             f"{row['dt_threshold_hours']:.3f}",
                             f"{row['horizon_hours']:.3f}", row["count"]))


CROSSOVER_CSV_HEADER = ("lat_deg", "lon_deg", "t_ref_iso", "t_test_iso",
                        "dt_hours")


def write_crossover_map_csv(toa_opportunities, path) -> None:
    """Geographic distribution of TOA crossover opportunities."""
    with Path(path).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CROSSOVER_CSV_HEADER)
        for op in toa_opportunities:
            writer.writerow((f"{op.location.latitude_deg:.6f}",
                             f"{op.location.longitude_deg:.6f}",
                             op.ref_event.epoch.iso(),
                             op.test_event.epoch.iso(),
                             f"{op.dt_hours:.6f}"))
