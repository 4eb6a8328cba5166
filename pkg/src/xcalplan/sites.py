"""Vicarious calibration site catalog and evaluation-grid construction.

Sites are square regions (default 250 km x 250 km) gridded into exactly 200
evaluation points: a 20 (east-west) x 10 (north-south) lattice of cell
centers on the local tangent plane, mapped back to geodetic coordinates with
an equirectangular scaling at the site latitude. At 250 km extent the
projection error is far below the grid spacing.

The shipped catalog (data/pics_sites.csv) lists 48 pseudo-invariant
calibration sites with approximate public coordinates; it is replaceable
input data, not code truth.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .timebase import EARTH_RADIUS_KM, GeodeticPoint

DEFAULT_EXTENT_KM = 250.0
GRID_COLS = 20   # east-west
GRID_ROWS = 10   # north-south

_KM_PER_DEG = EARTH_RADIUS_KM * math.pi / 180.0

_HEADER = ("site_id", "name", "lat_deg", "lon_deg")


class CatalogError(ValueError):
    """Malformed site catalog input."""


@dataclass(frozen=True)
class CalSite:
    """One square calibration region."""
    site_id: str
    name: str
    center: GeodeticPoint
    extent_km: float = DEFAULT_EXTENT_KM

    def __post_init__(self):
        if not self.site_id:
            raise CatalogError("site_id must be non-empty")
        if abs(self.center.latitude_deg) > 80.0:
            raise CatalogError(
                f"site {self.site_id}: |latitude| > 80 deg; grid construction "
                "degenerates near the poles")
        if self.extent_km <= 0.0:
            raise CatalogError(f"site {self.site_id}: extent must be positive")


@dataclass(frozen=True)
class GridPoint:
    site_id: str
    index: int
    location: GeodeticPoint


def load_sites(path) -> list[CalSite]:
    """Parse a delimited site catalog.

    Expected header: `site_id,name,lat_deg,lon_deg[,extent_km]`. Lines
    beginning with `#` are ignored. Duplicate site_ids, malformed rows, and
    out-of-range coordinates raise CatalogError naming the line number.
    """
    path = Path(path)
    sites: list[CalSite] = []
    seen: set[str] = set()
    with path.open(newline="") as handle:
        numbered = ((lineno, line) for lineno, line in enumerate(handle, 1)
                    if line.strip() and not line.lstrip().startswith("#"))
        lines = list(numbered)
    if not lines:
        raise CatalogError(f"{path}: empty catalog (missing header)")
    header_no, header_line = lines[0]
    header = next(csv.reader([header_line]))
    if tuple(h.strip() for h in header[:4]) != _HEADER:
        raise CatalogError(
            f"{path} line {header_no}: expected header "
            f"'site_id,name,lat_deg,lon_deg[,extent_km]', got {header_line.strip()!r}")
    for lineno, line in lines[1:]:
        row = next(csv.reader([line]))
        if len(row) not in (4, 5):
            raise CatalogError(
                f"{path} line {lineno}: expected 4 or 5 fields, got {len(row)}")
        site_id = row[0].strip()
        name = row[1].strip()
        try:
            lat = float(row[2])
            lon = float(row[3])
            extent = float(row[4]) if len(row) == 5 and row[4].strip() \
                else DEFAULT_EXTENT_KM
        except ValueError as exc:
            raise CatalogError(f"{path} line {lineno}: {exc}") from exc
        if not -90.0 <= lat <= 90.0:
            raise CatalogError(
                f"{path} line {lineno}: latitude {lat} outside [-90, 90]")
        if not -360.0 <= lon <= 360.0:
            raise CatalogError(
                f"{path} line {lineno}: longitude {lon} outside [-360, 360]")
        if site_id in seen:
            raise CatalogError(
                f"{path} line {lineno}: duplicate site_id {site_id!r}")
        seen.add(site_id)
        try:
            sites.append(CalSite(site_id, name, GeodeticPoint(lat, lon),
                                 extent))
        except (CatalogError, ValueError) as exc:
            raise CatalogError(f"{path} line {lineno}: {exc}") from exc
    return sites


def bundled_catalog_path() -> Path:
    """Path of the packaged 48-site catalog."""
    return Path(resources.files("xcalplan").joinpath("data/pics_sites.csv"))


def _axis_offsets_km(extent_km: float, n: int) -> np.ndarray:
    """Cell-centered offsets spanning [-extent/2, extent/2]."""
    k = np.arange(n, dtype=float)
    return 0.5 * extent_km * ((2.0 * k + 1.0) / n - 1.0)


def grid_region(site: CalSite) -> list[GridPoint]:
    """The site's 200 evaluation points, row-major south-to-north.

    Index i = row * 20 + col with rows running south to north and columns
    west to east; rebuilding the grid from the same site is bit-identical.
    """
    east = _axis_offsets_km(site.extent_km, GRID_COLS)
    north = _axis_offsets_km(site.extent_km, GRID_ROWS)
    lat0 = site.center.latitude_deg
    lon0 = site.center.longitude_deg
    cos_lat = math.cos(math.radians(lat0))
    points = []
    for row, dn in enumerate(north):
        lat = lat0 + dn / _KM_PER_DEG
        for col, de in enumerate(east):
            lon = lon0 + de / (_KM_PER_DEG * cos_lat)
            points.append(GridPoint(site.site_id, row * GRID_COLS + col,
                                    GeodeticPoint(lat, lon, 0.0)))
    return points


def grid_latlon_arrays(site: CalSite):
    """(lat, lon) arrays of the 200 grid points, in index order."""
    pts = grid_region(site)
    lat = np.array([p.location.latitude_deg for p in pts])
    lon = np.array([p.location.longitude_deg for p in pts])
    return lat, lon
