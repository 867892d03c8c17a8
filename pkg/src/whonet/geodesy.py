"""Ground-truth displacement from GNSS fixes.

Vincenty's inverse formula on the WGS-84 ellipsoid gives the geodesic distance
between consecutive fixes; the difference to the wheel-derived displacement is
the error label the network learns.
"""
from __future__ import annotations

import math
from typing import Tuple

from pyproj import Geod

from .errors import ConvergenceError, InvalidInputError
from .models import ErrorLabel, GnssFix

# WGS-84
WGS84_A = 6378137.0
WGS84_F = 1 / 298.257223563
WGS84_B = (1 - WGS84_F) * WGS84_A
MEAN_EARTH_RADIUS = 6371008.8

LAMBDA_TOLERANCE = 1e-12
MAX_ITERATIONS = 200
GNSS_ACCURACY_M = 3.0  # receiver accuracy; metadata only

_GEOD = Geod(ellps='WGS84')


def _canonical(a: GnssFix, b: GnssFix) -> Tuple[GnssFix, GnssFix]:
    # fixed argument order makes d(a, b) == d(b, a) bit for bit
    return (a, b) if (a.lat, a.lon) <= (b.lat, b.lon) else (b, a)


def vincenty_inverse(a: GnssFix, b: GnssFix) -> float:
    """Geodesic distance in meters between two fixes."""
    if a == b:
        return 0.0
    a, b = _canonical(a, b)
    f = WGS84_F
    U1 = math.atan((1 - f) * math.tan(math.radians(a.lat)))
    U2 = math.atan((1 - f) * math.tan(math.radians(b.lat)))
    L = math.radians(b.lon - a.lon)
    sin_U1, cos_U1 = math.sin(U1), math.cos(U1)
    sin_U2, cos_U2 = math.sin(U2), math.cos(U2)

    lam = L
    for _ in range(MAX_ITERATIONS):
        sin_lam, cos_lam = math.sin(lam), math.cos(lam)
        sin_sigma = math.hypot(cos_U2 * sin_lam, cos_U1 * sin_U2 - sin_U1 * cos_U2 * cos_lam)
        if sin_sigma == 0.0:
            return 0.0  # coincident after rounding
        cos_sigma = sin_U1 * sin_U2 + cos_U1 * cos_U2 * cos_lam
        sigma = math.atan2(sin_sigma, cos_sigma)
        sin_alpha = cos_U1 * cos_U2 * sin_lam / sin_sigma
        cos2_alpha = 1 - sin_alpha * sin_alpha
        # equatorial line: cos2_alpha == 0
        cos_2sigma_m = cos_sigma - 2 * sin_U1 * sin_U2 / cos2_alpha if cos2_alpha != 0.0 else 0.0
        C = f / 16 * cos2_alpha * (4 + f * (4 - 3 * cos2_alpha))
        lam_prev = lam
        lam = L + (1 - C) * f * sin_alpha * (
            sigma + C * sin_sigma * (cos_2sigma_m + C * cos_sigma * (-1 + 2 * cos_2sigma_m ** 2)))
        if abs(lam - lam_prev) < LAMBDA_TOLERANCE:
            break
    else:
        raise ConvergenceError(
            f'Vincenty inverse did not converge after {MAX_ITERATIONS} iterations '
            f'for ({a.lat}, {a.lon}) -> ({b.lat}, {b.lon})')

    u2 = cos2_alpha * (WGS84_A ** 2 - WGS84_B ** 2) / WGS84_B ** 2
    A = 1 + u2 / 16384 * (4096 + u2 * (-768 + u2 * (320 - 175 * u2)))
    B = u2 / 1024 * (256 + u2 * (-128 + u2 * (74 - 47 * u2)))
    delta_sigma = B * sin_sigma * (cos_2sigma_m + B / 4 * (
        cos_sigma * (-1 + 2 * cos_2sigma_m ** 2)
        - B / 6 * cos_2sigma_m * (-3 + 4 * sin_sigma ** 2) * (-3 + 4 * cos_2sigma_m ** 2)))
    return WGS84_B * A * (sigma - delta_sigma)


def gnss_displacement(prev: GnssFix, curr: GnssFix) -> float:
    """True one-second displacement; accurate to about GNSS_ACCURACY_M."""
    return vincenty_inverse(prev, curr)


def label_error(x_whr: float, x_gnss: float) -> ErrorLabel:
    if not (math.isfinite(x_whr) and math.isfinite(x_gnss)):
        raise InvalidInputError(f'displacements must be finite: {x_whr!r}, {x_gnss!r}')
    return ErrorLabel(epsilon=x_whr - x_gnss)


def haversine(a: GnssFix, b: GnssFix) -> float:
    phi1, phi2 = math.radians(a.lat), math.radians(b.lat)
    dphi = phi2 - phi1
    dlam = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2) ** 2
    return 2 * MEAN_EARTH_RADIUS * math.asin(min(1.0, math.sqrt(h)))


def project(origin: GnssFix, azimuth: float, distance: float) -> GnssFix:
    """Fix reached from ``origin`` along ``azimuth`` (radians from north) after ``distance`` m."""
    if distance == 0.0:
        return origin
    lon, lat, _ = _GEOD.fwd(origin.lon, origin.lat, math.degrees(azimuth), distance)
    return GnssFix(lat=lat, lon=lon)


def ned_to_fix(origin: GnssFix, north: float, east: float) -> GnssFix:
    """Place a local north/east offset from ``origin`` on the ellipsoid."""
    return project(origin, math.atan2(east, north), math.hypot(north, east))
