"""Scenario assembly, configuration parsing, and run orchestration.

A scenario configuration is a JSON file:

    {
      "epoch": "2019-03-20T00:00:00Z",
      "mode": "VICARIOUS" | "TOA" | "BOTH",
      "window": {"duration_hours": 48, "coarse_step_s": 10, "fine_step_s": 1},
      "reference_sats": "flagships" | {"architecture": 4} | [<sat>, ...],
      "test_sats": "doves" | {"preset": "doves", "pointing_mode": "..."}
                   | [<sat>, ...],
      "sites": "PICS" | "<path.csv>" | [{"site_id": ..., "name": ...,
                "lat_deg": ..., "lon_deg": ..., "extent_km": 250}, ...],
      "criteria": {
        "dt_site_max_hours": 48,
        "dt_grid_hours": [1, 2, ..., 48],
        "dsza_max_deg": [25],          # one curve family per value
        "dvza_max_deg": [15],
        "sza_abs_max_deg": 85,         # null/omitted = no cap
        "vza_abs_max_deg": null,
        "dt_stab_horizon_hours": [48],
        "toa_dedupe_window_s": 300,
        "pass_gap_s": 300
      },
      "outputs": {"access_events": false}
    }

    <sat> = {"sat_id": ..., "orbit": {"altitude_km" | "semimajor_axis_km",
             "eccentricity", "inclination_deg", "raan_deg",
             "arg_perigee_deg", "true_anomaly_deg"},
             "sensor": {"fov_cross_track_deg", "fov_along_track_deg",
             "pointing_mode", "for_half_angle_deg", "boresight_tilt_deg"}}

run_scenario executes propagate -> access -> pair/crossover -> counts and
writes manifest.json, opportunities.csv, counts.csv, crossover_map.csv and
optionally access_events.csv into the output directory. Outputs are
plot-ready delimited text; a replay of the same configuration produces
byte-identical files regardless of the worker-thread count. Partial outputs
are removed if a run fails.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .access import (AccessEvent, Satellite, ScenarioWindow, compute_accesses,
                     write_events_csv)
from .geometry import PointingMode, SensorSpec
from .planner import (FilterCriteria, KIND_TOA, dedupe_to_passes,
                      pair_vicarious, toa_crossover_detections,
                      detections_to_opportunities, count_curve,
                      write_counts_csv, write_crossover_map_csv,
                      write_opportunities_csv)
from .presets import (build_architecture, flagship_plane_raans,
                      flagship_presets, testsat_presets)
from .propagation import (J2, MU_EARTH, OrbitalElements, R_EARTH_KM,
                          propagate_arrays)
from .sites import CalSite, bundled_catalog_path, grid_region, load_sites
from .timebase import Epoch, GeodeticPoint

MODES = ("VICARIOUS", "TOA", "BOTH")


class ConfigError(ValueError):
    """Invalid scenario configuration; the message names the key path."""


@dataclass(frozen=True)
class CriteriaConfig:
    dt_site_max_hours: float
    dt_grid_hours: tuple[float, ...]
    dsza_max_deg: tuple[float, ...]
    dvza_max_deg: tuple[float, ...]
    sza_abs_max_deg: float
    vza_abs_max_deg: float
    dt_stab_horizon_hours: tuple[float, ...]
    toa_dedupe_window_s: float
    pass_gap_s: float

    def variants(self):
        """(label-less) criteria per (dsza, dvza) combination, loosest horizon."""
        for dsza in self.dsza_max_deg:
            for dvza in self.dvza_max_deg:
                yield dsza, dvza, FilterCriteria(
                    self.dt_site_max_hours, dsza, dvza, self.sza_abs_max_deg,
                    self.vza_abs_max_deg, max(self.dt_stab_horizon_hours))

    def loosest(self) -> FilterCriteria:
        return FilterCriteria(
            self.dt_site_max_hours, max(self.dsza_max_deg),
            max(self.dvza_max_deg), self.sza_abs_max_deg,
            self.vza_abs_max_deg, max(self.dt_stab_horizon_hours))


@dataclass(frozen=True)
class Scenario:
    epoch: Epoch
    window: ScenarioWindow
    mode: str
    reference_sats: tuple[Satellite, ...]
    test_sats: tuple[Satellite, ...]
    sites: tuple[CalSite, ...]
    criteria: CriteriaConfig
    dump_access_events: bool
    config_echo: dict


def _require(mapping, key, path):
    if key not in mapping:
        raise ConfigError(f"{path}.{key}: missing required key")
    return mapping[key]


def _number(value, path, minimum=None):
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{path}: must be >= {minimum}, got {value}")
    return float(value)


def _number_list(value, path, minimum=None):
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{path}: expected a non-empty list of numbers")
    return tuple(_number(v, f"{path}[{i}]", minimum)
                 for i, v in enumerate(value))


def _parse_orbit(block, epoch, path) -> OrbitalElements:
    if not isinstance(block, dict):
        raise ConfigError(f"{path}: expected an object")
    if "altitude_km" in block:
        sma = R_EARTH_KM + _number(block["altitude_km"], f"{path}.altitude_km")
    elif "semimajor_axis_km" in block:
        sma = _number(block["semimajor_axis_km"],
                      f"{path}.semimajor_axis_km")
    else:
        raise ConfigError(
            f"{path}: needs altitude_km or semimajor_axis_km")
    try:
        return OrbitalElements(
            sma,
            _number(block.get("eccentricity", 0.0), f"{path}.eccentricity"),
            _number(block.get("inclination_deg", 0.0),
                    f"{path}.inclination_deg"),
            _number(block.get("raan_deg", 0.0), f"{path}.raan_deg"),
            _number(block.get("arg_perigee_deg", 0.0),
                    f"{path}.arg_perigee_deg"),
            _number(block.get("true_anomaly_deg", 0.0),
                    f"{path}.true_anomaly_deg"),
            epoch)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_pointing_mode(value, path) -> PointingMode:
    try:
        return PointingMode[value]
    except (KeyError, TypeError):
        raise ConfigError(
            f"{path}: unknown pointing_mode {value!r} (expected one of "
            f"{[m.name for m in PointingMode]})") from None


def _parse_sensor(block, path) -> SensorSpec:
    if not isinstance(block, dict):
        raise ConfigError(f"{path}: expected an object")
    try:
        return SensorSpec(
            _number(_require(block, "fov_cross_track_deg", path),
                    f"{path}.fov_cross_track_deg"),
            _number(_require(block, "fov_along_track_deg", path),
                    f"{path}.fov_along_track_deg"),
            _parse_pointing_mode(block.get("pointing_mode", "NADIR_FIXED"),
                                 f"{path}.pointing_mode"),
            _number(block.get("for_half_angle_deg", 0.0),
                    f"{path}.for_half_angle_deg"),
            _number(block.get("boresight_tilt_deg", 0.0),
                    f"{path}.boresight_tilt_deg"))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_sat(block, epoch, path) -> Satellite:
    if not isinstance(block, dict):
        raise ConfigError(f"{path}: expected an object")
    sat_id = _require(block, "sat_id", path)
    if not isinstance(sat_id, str) or not sat_id:
        raise ConfigError(f"{path}.sat_id: expected a non-empty string")
    return Satellite(sat_id,
                     _parse_orbit(_require(block, "orbit", path), epoch,
                                  f"{path}.orbit"),
                     _parse_sensor(_require(block, "sensor", path),
                                   f"{path}.sensor"))


def _parse_reference_sats(value, epoch, path) -> tuple[Satellite, ...]:
    if value == "flagships":
        return tuple(flagship_presets(epoch))
    if isinstance(value, dict) and "architecture" in value:
        arch = value["architecture"]
        if not isinstance(arch, int) or isinstance(arch, bool):
            raise ConfigError(f"{path}.architecture: expected an integer")
        try:
            return tuple(build_architecture(
                arch, epoch, flagship_plane_raans(epoch)))
        except ValueError as exc:
            raise ConfigError(f"{path}.architecture: {exc}") from exc
    if isinstance(value, list):
        sats = tuple(_parse_sat(b, epoch, f"{path}[{i}]")
                     for i, b in enumerate(value))
        if not sats:
            raise ConfigError(f"{path}: at least one satellite required")
        return sats
    raise ConfigError(
        f"{path}: expected 'flagships', an architecture object, or a list")


def _parse_test_sats(value, epoch, path) -> tuple[Satellite, ...]:
    if value == "doves":
        return tuple(testsat_presets(epoch))
    if isinstance(value, dict) and value.get("preset") == "doves":
        mode = _parse_pointing_mode(
            value.get("pointing_mode", "CROSS_TRACK_AGILE"),
            f"{path}.pointing_mode")
        for_half = _number(value.get("for_half_angle_deg", 27.5),
                           f"{path}.for_half_angle_deg")
        return tuple(testsat_presets(epoch, mode, for_half))
    if isinstance(value, list):
        sats = tuple(_parse_sat(b, epoch, f"{path}[{i}]")
                     for i, b in enumerate(value))
        if not sats:
            raise ConfigError(f"{path}: at least one test satellite required")
        return sats
    raise ConfigError(
        f"{path}: expected 'doves', a doves-preset object, or a list")


def _parse_sites(value, path) -> tuple[CalSite, ...]:
    if value == "PICS":
        return tuple(load_sites(bundled_catalog_path()))
    if isinstance(value, str):
        try:
            return tuple(load_sites(value))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    if isinstance(value, list):
        sites = []
        for i, block in enumerate(value):
            if not isinstance(block, dict):
                raise ConfigError(f"{path}[{i}]: expected an object")
            try:
                sites.append(CalSite(
                    _require(block, "site_id", f"{path}[{i}]"),
                    block.get("name", block.get("site_id", "")),
                    GeodeticPoint(
                        _number(_require(block, "lat_deg", f"{path}[{i}]"),
                                f"{path}[{i}].lat_deg"),
                        _number(_require(block, "lon_deg", f"{path}[{i}]"),
                                f"{path}[{i}].lon_deg")),
                    _number(block.get("extent_km", 250.0),
                            f"{path}[{i}].extent_km")))
            except ValueError as exc:
                raise ConfigError(f"{path}[{i}]: {exc}") from exc
        return tuple(sites)
    raise ConfigError(f"{path}: expected 'PICS', a file path, or a list")


def _parse_criteria(block, path) -> CriteriaConfig:
    if not isinstance(block, dict):
        raise ConfigError(f"{path}: expected an object")
    dt_site = _number(_require(block, "dt_site_max_hours", path),
                      f"{path}.dt_site_max_hours", 0.0)
    grid = _number_list(block.get("dt_grid_hours", [dt_site]),
                        f"{path}.dt_grid_hours", 0.0)
    horizons = _number_list(block.get("dt_stab_horizon_hours", [dt_site]),
                            f"{path}.dt_stab_horizon_hours", 0.0)
    sza_cap = block.get("sza_abs_max_deg")
    vza_cap = block.get("vza_abs_max_deg")
    crit = CriteriaConfig(
        dt_site,
        grid,
        _number_list(block.get("dsza_max_deg", [180.0]),
                     f"{path}.dsza_max_deg", 0.0),
        _number_list(block.get("dvza_max_deg", [180.0]),
                     f"{path}.dvza_max_deg", 0.0),
        math.inf if sza_cap is None else _number(
            sza_cap, f"{path}.sza_abs_max_deg", 0.0),
        math.inf if vza_cap is None else _number(
            vza_cap, f"{path}.vza_abs_max_deg", 0.0),
        horizons,
        _number(block.get("toa_dedupe_window_s", 300.0),
                f"{path}.toa_dedupe_window_s", 0.0),
        _number(block.get("pass_gap_s", 300.0), f"{path}.pass_gap_s", 0.0))
    if dt_site > max(horizons):
        raise ConfigError(
            f"{path}.dt_site_max_hours: exceeds every planning horizon")
    return crit


def parse_config(config: dict) -> Scenario:
    if not isinstance(config, dict):
        raise ConfigError("config: expected a JSON object")
    try:
        epoch = Epoch.from_iso(_require(config, "epoch", "config"))
    except ValueError as exc:
        raise ConfigError(f"config.epoch: {exc}") from exc
    window_block = _require(config, "window", "config")
    if not isinstance(window_block, dict):
        raise ConfigError("config.window: expected an object")
    try:
        window = ScenarioWindow(
            epoch,
            _number(_require(window_block, "duration_hours", "config.window"),
                    "config.window.duration_hours", 0.0),
            _number(window_block.get("coarse_step_s", 10.0),
                    "config.window.coarse_step_s"),
            _number(window_block.get("fine_step_s", 1.0),
                    "config.window.fine_step_s"))
    except ValueError as exc:
        raise ConfigError(f"config.window: {exc}") from exc
    mode = config.get("mode", "VICARIOUS")
    if mode not in MODES:
        raise ConfigError(f"config.mode: {mode!r} not one of {MODES}")
    reference = _parse_reference_sats(
        _require(config, "reference_sats", "config"), epoch,
        "config.reference_sats")
    test = _parse_test_sats(_require(config, "test_sats", "config"), epoch,
                            "config.test_sats")
    ids = [s.sat_id for s in reference + test]
    if len(set(ids)) != len(ids):
        raise ConfigError("config: duplicate sat_id across the fleet")
    sites: tuple[CalSite, ...] = ()
    if mode in ("VICARIOUS", "BOTH"):
        sites = _parse_sites(_require(config, "sites", "config"),
                             "config.sites")
        if not sites:
            raise ConfigError("config.sites: at least one site required")
    elif "sites" in config:
        sites = _parse_sites(config["sites"], "config.sites")
    criteria = _parse_criteria(_require(config, "criteria", "config"),
                               "config.criteria")
    outputs = config.get("outputs", {})
    if not isinstance(outputs, dict):
        raise ConfigError("config.outputs: expected an object")
    return Scenario(epoch, window, mode, reference, test, sites, criteria,
                    bool(outputs.get("access_events", False)), config)


def load_config(path) -> Scenario:
    path = Path(path)
    try:
        with path.open() as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc}") from exc
    return parse_config(raw)


def _criteria_label(prefix: str, dsza: float, dvza: float) -> str:
    return f"{prefix}_dsza{dsza:g}_dvza{dvza:g}"


def _grid_locator(sites):
    table = {}
    for site in sites:
        for point in grid_region(site):
            table[(site.site_id, point.index)] = point.location
    return table.get


def _write_manifest(scenario: Scenario, out_dir: Path, seed) -> Path:
    manifest = {
        "package": "xcalplan",
        "version": __version__,
        "config": scenario.config_echo,
        "seed": seed,
        "constants": {
            "mu_earth_km3_s2": MU_EARTH,
            "j2": J2,
            "earth_radius_km": R_EARTH_KM,
        },
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def run_scenario(scenario: Scenario, out_dir, threads: int = 1,
                 seed: int | None = None) -> dict:
    """Execute the full pipeline and write output files.

    Returns a summary dict with opportunity totals per mode. On any failure
    the partially written outputs are removed and the error re-raised.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        return _run_scenario_inner(scenario, out_dir, threads, seed, written)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise


def _run_scenario_inner(scenario, out_dir, threads, seed, written):
    crit = scenario.criteria
    start = scenario.window.start
    written.append(_write_manifest(scenario, out_dir, seed))

    counts_rows: list[dict] = []
    opportunity_rows: list = []
    toa_ops_loose: list = []
    summary = {"mode": scenario.mode, "vicarious_regions": 0,
               "toa_opportunities": 0}
    locator = None

    if scenario.mode in ("VICARIOUS", "BOTH"):
        events = compute_accesses(
            list(scenario.reference_sats) + list(scenario.test_sats),
            scenario.sites, scenario.window, threads=threads)
        if scenario.dump_access_events:
            path = out_dir / "access_events.csv"
            write_events_csv(events, path)
            written.append(path)
        ref_ids = {s.sat_id for s in scenario.reference_sats}
        ref_events = [e for e in events if e.sat_id in ref_ids]
        test_events = [e for e in events if e.sat_id not in ref_ids]
        locator = _grid_locator(scenario.sites)

        loose_regions = None
        for dsza, dvza, variant in crit.variants():
            pairs = pair_vicarious(ref_events, test_events, variant, start)
            label = _criteria_label("vic", dsza, dvza)
            for horizon in crit.dt_stab_horizon_hours:
                limit = start.jd + horizon / 24.0
                subset = [p for p in pairs if p.t_latest_jd <= limit]
                regions = dedupe_to_passes(subset, crit.pass_gap_s)
                for row in count_curve(regions, crit.dt_grid_hours):
                    counts_rows.append({**row, "criteria_label": label,
                                        "horizon_hours": horizon})
                if (dsza == max(crit.dsza_max_deg)
                        and dvza == max(crit.dvza_max_deg)
                        and horizon == max(crit.dt_stab_horizon_hours)):
                    loose_regions = regions
        if loose_regions is not None:
            opportunity_rows.extend(loose_regions)
            summary["vicarious_regions"] = len(loose_regions)

    if scenario.mode in ("TOA", "BOTH"):
        loosest = crit.loosest()
        for test_sat in scenario.test_sats:
            detections = toa_crossover_detections(
                scenario.reference_sats, test_sat, scenario.window, loosest)
            for dsza, dvza, variant in crit.variants():
                label = _criteria_label("toa", dsza, dvza)
                for horizon in crit.dt_stab_horizon_hours:
                    ops = detections_to_opportunities(
                        detections, scenario.window,
                        FilterCriteria(crit.dt_site_max_hours, dsza, dvza,
                                       crit.sza_abs_max_deg,
                                       crit.vza_abs_max_deg, horizon),
                        crit.toa_dedupe_window_s)
                    for row in count_curve(ops, crit.dt_grid_hours):
                        counts_rows.append({**row, "criteria_label": label,
                                            "horizon_hours": horizon})
                    if (dsza == max(crit.dsza_max_deg)
                            and dvza == max(crit.dvza_max_deg)
                            and horizon == max(crit.dt_stab_horizon_hours)):
                        toa_ops_loose.extend(ops)
        toa_ops_loose.sort(key=lambda op: (op.dt_hours,
                                           op.ref_event.epoch.jd,
                                           op.ref_sat, op.test_sat))
        opportunity_rows.extend(toa_ops_loose)
        summary["toa_opportunities"] = len(toa_ops_loose)

    counts_rows.sort(key=lambda r: (r["test_sat"], r["criteria_label"],
                                    r["horizon_hours"],
                                    r["dt_threshold_hours"]))
    path = out_dir / "counts.csv"
    write_counts_csv(counts_rows, path)
    written.append(path)

    path = out_dir / "opportunities.csv"
    write_opportunities_csv(opportunity_rows, path, locator)
    written.append(path)

    path = out_dir / "crossover_map.csv"
    write_crossover_map_csv(
        [op for op in toa_ops_loose if op.kind == KIND_TOA], path)
    written.append(path)
    return summary


def evaluate_architectures(scenario: Scenario, out_dir, threads: int = 1,
                           seed: int | None = None) -> dict:
    """Sweep the six reference-calibrator architectures against the
    scenario's test satellites.

    For each architecture k, writes arch_<k>/counts.csv plus the test-side
    access event file; test-satellite access computations are performed once
    and shared across architectures.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        return _evaluate_architectures_inner(scenario, out_dir, threads,
                                             seed, written)
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise


def _evaluate_architectures_inner(scenario, out_dir, threads, seed, written):
    crit = scenario.criteria
    start = scenario.window.start
    written.append(_write_manifest(scenario, out_dir, seed))
    arch_refs = {
        arch: build_architecture(arch, scenario.epoch,
                                 flagship_plane_raans(scenario.epoch))
        for arch in range(1, 7)}

    test_events = None
    if scenario.mode in ("VICARIOUS", "BOTH"):
        test_events = compute_accesses(scenario.test_sats, scenario.sites,
                                       scenario.window, threads=threads)

    summary = {"architectures": {}}
    for arch, refs in arch_refs.items():
        arch_dir = out_dir / f"arch_{arch}"
        arch_dir.mkdir(parents=True, exist_ok=True)
        counts_rows: list[dict] = []
        arch_summary = {}

        if scenario.mode in ("VICARIOUS", "BOTH"):
            ref_events = compute_accesses(refs, scenario.sites,
                                          scenario.window, threads=threads)
            path = arch_dir / "test_events.csv"
            write_events_csv(test_events, path)
            written.append(path)
            for dsza, dvza, variant in crit.variants():
                pairs = pair_vicarious(ref_events, test_events, variant,
                                       start)
                label = _criteria_label("vic", dsza, dvza)
                for horizon in crit.dt_stab_horizon_hours:
                    limit = start.jd + horizon / 24.0
                    subset = [p for p in pairs if p.t_latest_jd <= limit]
                    regions = dedupe_to_passes(subset, crit.pass_gap_s)
                    for row in count_curve(regions, crit.dt_grid_hours):
                        counts_rows.append({**row, "criteria_label": label,
                                            "horizon_hours": horizon})
            arch_summary["vicarious_total"] = sum(
                1 for r in counts_rows
                if r["criteria_label"].startswith("vic")
                and r["dt_threshold_hours"] == max(crit.dt_grid_hours)
                and r["horizon_hours"] == max(crit.dt_stab_horizon_hours))

        if scenario.mode in ("TOA", "BOTH"):
            loosest = crit.loosest()
            for test_sat in scenario.test_sats:
                detections = toa_crossover_detections(
                    refs, test_sat, scenario.window, loosest)
                for dsza, dvza, variant in crit.variants():
                    label = _criteria_label("toa", dsza, dvza)
                    for horizon in crit.dt_stab_horizon_hours:
                        ops = detections_to_opportunities(
                            detections, scenario.window,
                            FilterCriteria(crit.dt_site_max_hours, dsza,
                                           dvza, crit.sza_abs_max_deg,
                                           crit.vza_abs_max_deg, horizon),
                            crit.toa_dedupe_window_s)
                        for row in count_curve(ops, crit.dt_grid_hours):
                            counts_rows.append(
                                {**row, "criteria_label": label,
                                 "horizon_hours": horizon})

        counts_rows.sort(key=lambda r: (r["test_sat"], r["criteria_label"],
                                        r["horizon_hours"],
                                        r["dt_threshold_hours"]))
        path = arch_dir / "counts.csv"
        write_counts_csv(counts_rows, path)
        written.append(path)
        arch_summary["counts_rows"] = len(counts_rows)
        summary["architectures"][arch] = arch_summary
    return summary


def dump_states(scenario: Scenario, out_dir) -> Path:
    """states.csv: coarse-step ECI states for every satellite in the fleet."""
    import csv as _csv

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "states.csv"
    offs = scenario.window.coarse_offsets()
    with path.open("w", newline="") as handle:
        writer = _csv.writer(handle)
        writer.writerow(("epoch_iso", "sat_id", "x_km", "y_km", "z_km",
                         "vx_km_s", "vy_km_s", "vz_km_s"))
        for sat in tuple(scenario.reference_sats) + tuple(scenario.test_sats):
            dt0 = scenario.window.start.seconds_since(sat.elements.epoch)
            pos, vel = propagate_arrays(sat.elements, offs + dt0)
            for i, off in enumerate(offs):
                epoch = scenario.window.start.plus_seconds(float(off))
                writer.writerow((
                    epoch.iso(), sat.sat_id,
                    f"{pos[i, 0]:.6f}", f"{pos[i, 1]:.6f}",
                    f"{pos[i, 2]:.6f}", f"{vel[i, 0]:.9f}",
                    f"{vel[i, 1]:.9f}", f"{vel[i, 2]:.9f}"))
    return path
