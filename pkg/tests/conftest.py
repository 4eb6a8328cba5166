import numpy as np
import pytest

from xcalplan.access import AccessEvent
from xcalplan.timebase import Epoch

EPOCH_2019 = Epoch.from_calendar(2019, 3, 20)


@pytest.fixture
def epoch():
    return EPOCH_2019


def synthetic_event(sat_id, site_id, grid_index, epoch_jd, sza=30.0,
                    vza=10.0, off_nadir=8.0, slant=500.0) -> AccessEvent:
    """Event with hand-set geometry, for pairing-logic tests."""
    return AccessEvent(sat_id, site_id, grid_index, Epoch(epoch_jd),
                       off_nadir, vza, sza, slant)


def random_event_lists(rng: np.random.Generator, n_events: int,
                       n_grids: int = 5, span_hours: float = 48.0,
                       site_id: str = "S1"):
    """Synthetic sorted ref/test event lists over shared grid points."""
    def make(count, sat_ids):
        events = []
        jds = EPOCH_2019.jd + rng.uniform(0, span_hours / 24.0, count)
        for jd in np.sort(jds):
            events.append(AccessEvent(
                str(rng.choice(sat_ids)), site_id,
                int(rng.integers(0, n_grids)), Epoch(float(jd)),
                float(rng.uniform(0, 30)), float(rng.uniform(0, 60)),
                float(rng.uniform(0, 110)), float(rng.uniform(400, 900))))
        return events

    half = n_events // 2
    return (make(half, ["REF-A", "REF-B"]),
            make(n_events - half, ["TEST-A", "TEST-B"]))
