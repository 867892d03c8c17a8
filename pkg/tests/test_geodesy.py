import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pyproj import Geod

from whonet.errors import ConvergenceError, InvalidInputError
from whonet.geodesy import (
    gnss_displacement,
    haversine,
    label_error,
    ned_to_fix,
    project,
    vincenty_inverse,
)
from whonet.models import GnssFix

GEOD = Geod(ellps='WGS84')

lats = st.floats(min_value=-80.0, max_value=80.0, allow_nan=False)
lons = st.floats(min_value=-179.0, max_value=179.0, allow_nan=False)
fixes = st.builds(GnssFix, lat=lats, lon=lons)


def reference(a: GnssFix, b: GnssFix) -> float:
    return GEOD.inv(a.lon, a.lat, b.lon, b.lat)[2]


def test_classic_flinders_peak_to_buninyong():
    a = GnssFix(-37.951033416666664, 144.42486788888888)
    b = GnssFix(-37.65282113888889, 143.92649552777777)
    assert vincenty_inverse(a, b) == pytest.approx(54972.271, abs=1e-3)


def test_agrees_with_pyproj_on_random_pairs():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        lat, lon = rng.uniform(-80, 80), rng.uniform(-170, 170)
        a = GnssFix(lat, lon)
        b = GnssFix(float(np.clip(lat + rng.uniform(-20, 20), -89, 89)), lon + rng.uniform(-10, 10))
        assert vincenty_inverse(a, b) == pytest.approx(reference(a, b), abs=1e-3)


def test_agrees_with_pyproj_at_one_second_scale():
    rng = np.random.default_rng(8)
    for _ in range(200):
        a = GnssFix(rng.uniform(-70, 70), rng.uniform(-170, 170))
        b = project(a, rng.uniform(-math.pi, math.pi), rng.uniform(0.0, 40.0))
        assert vincenty_inverse(a, b) == pytest.approx(reference(a, b), abs=1e-6)


@given(fixes, fixes)
def test_symmetric_bit_for_bit(a, b):
    try:
        forward = vincenty_inverse(a, b)
    except ConvergenceError:
        return
    assert vincenty_inverse(b, a) == forward


@given(fixes)
def test_zero_for_identical_fixes(a):
    assert vincenty_inverse(a, a) == 0.0


def test_equatorial_line():
    a, b = GnssFix(0.0, 0.0), GnssFix(0.0, 1.0)
    assert vincenty_inverse(a, b) == pytest.approx(reference(a, b), abs=1e-6)


def test_meridian_arc():
    a, b = GnssFix(10.0, 5.0), GnssFix(11.0, 5.0)
    assert vincenty_inverse(a, b) == pytest.approx(reference(a, b), abs=1e-6)


def test_near_antipodal_fails_to_converge():
    with pytest.raises(ConvergenceError):
        vincenty_inverse(GnssFix(0.0, 0.0), GnssFix(0.5, 179.7))


@given(fixes, st.floats(min_value=-math.pi, max_value=math.pi), st.floats(min_value=0.1, max_value=50.0))
def test_haversine_close_at_small_separation(a, azimuth, distance):
    b = project(a, azimuth, distance)
    assert haversine(a, b) == pytest.approx(vincenty_inverse(a, b), rel=1e-2)


def test_label_sign_positive_when_odometry_overestimates():
    assert label_error(10.5, 10.0).epsilon == pytest.approx(0.5)
    assert label_error(9.0, 10.0).epsilon == pytest.approx(-1.0)


def test_label_rejects_nan():
    with pytest.raises(InvalidInputError):
        label_error(float('nan'), 1.0)


def test_gnss_displacement_of_projected_fix():
    a = GnssFix(52.4068, -1.5197)
    b = project(a, 0.3, 25.0)
    assert gnss_displacement(a, b) == pytest.approx(25.0, abs=1e-6)


def test_ned_to_fix_places_offset():
    origin = GnssFix(52.0, -1.0)
    fix = ned_to_fix(origin, 30.0, 40.0)
    assert vincenty_inverse(origin, fix) == pytest.approx(50.0, abs=1e-6)
    north_only = ned_to_fix(origin, 100.0, 0.0)
    assert north_only.lon == pytest.approx(origin.lon, abs=1e-12)
    assert north_only.lat > origin.lat
    assert ned_to_fix(origin, 0.0, 0.0) == origin


@pytest.mark.parametrize('lat, lon', [(91.0, 0.0), (0.0, 181.0), (float('nan'), 0.0)])
def test_fix_range_checked(lat, lon):
    with pytest.raises(InvalidInputError):
        GnssFix(lat, lon)
