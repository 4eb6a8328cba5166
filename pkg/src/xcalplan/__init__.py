"""Cross-calibration opportunity planner for Earth-observing sensors.

Propagates reference and test satellite orbits (two-body + J2 secular),
computes access events over calibration site grids, and pairs them into
vicarious or top-of-atmosphere cross-calibration opportunities under
user-defined time and solar/view geometry filters.
"""

__version__ = "0.1.0"

from .access import (AccessEvent, AccessInterval, Satellite, ScenarioWindow,
                     accesses_to_intervals, compute_accesses)
from .geometry import (LookGeometry, PointingMode, SensorSpec, in_access,
                       look_geometry, nadir_point, swath_half_width)
from .planner import (FilterCriteria, RegionOpportunity, XcalOpportunity,
                      count_curve, dedupe_to_passes, horizon_sweep,
                      pair_vicarious, toa_crossovers)
from .propagation import (EciState, J2Rates, OrbitalElements,
                          elements_to_state, j2_secular_rates, propagate,
                          propagate_elements, sso_inclination)
from .sites import CalSite, GridPoint, grid_region, load_sites
from .timebase import (Epoch, GeodeticPoint, ecef_to_geodetic, eci_to_ecef,
                       geodetic_to_ecef, gmst_deg, jd_from_calendar,
                       sun_position_eci)

__all__ = [
    "AccessEvent", "AccessInterval", "CalSite", "EciState", "Epoch",
    "FilterCriteria", "GeodeticPoint", "GridPoint", "J2Rates",
    "LookGeometry", "OrbitalElements", "PointingMode", "RegionOpportunity",
    "Satellite", "ScenarioWindow", "SensorSpec", "XcalOpportunity",
    "accesses_to_intervals", "compute_accesses", "count_curve",
    "dedupe_to_passes", "ecef_to_geodetic", "eci_to_ecef",
    "elements_to_state", "geodetic_to_ecef", "gmst_deg", "grid_region",
    "horizon_sweep", "in_access", "j2_secular_rates", "jd_from_calendar",
    "load_sites", "look_geometry", "nadir_point", "pair_vicarious",
    "propagate", "propagate_elements", "sso_inclination",
    "sun_position_eci", "swath_half_width", "toa_crossovers",
]
