"""Closed-form hypersurface immersions used by the catalog and the tests.

Each factory returns a HypersurfaceImmersion with an analytic jet provider,
so downstream finite differencing only ever happens one level up (on lifts),
never on chains of numerically differentiated maps.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .core import Chart, Jet2
from .hypersurface import HypersurfaceImmersion, SpaceForm

__all__ = [
    "sphere_chart",
    "sphere_chart_jet",
    "torus",
    "round_sphere",
    "ellipsoid",
    "catenoid",
    "clifford_torus",
    "geodesic_sphere_s3",
    "geodesic_tube_h3",
    "equidistant_h3",
]

TWO_PI = 2.0 * math.pi


def _jet(value, d1, d2):
    return Jet2(value=np.asarray(value, float), d1=np.asarray(d1, float),
                d2=np.asarray(d2, float))


# ------------------------------------------------------------ S^2 charts

def sphere_chart(x):
    """Angular chart of S^2: (x, y) -> (sin x cos y, sin y, cos x cos y)."""
    sx, cx = math.sin(x[0]), math.cos(x[0])
    sy, cy = math.sin(x[1]), math.cos(x[1])
    return np.array([sx * cy, sy, cx * cy])


def sphere_chart_jet(x):
    sx, cx = math.sin(x[0]), math.cos(x[0])
    sy, cy = math.sin(x[1]), math.cos(x[1])
    value = [sx * cy, sy, cx * cy]
    d1 = [[cx * cy, 0.0, -sx * cy],
          [-sx * sy, cy, -cx * sy]]
    d2 = [[[-sx * cy, 0.0, -cx * cy], [-cx * sy, 0.0, sx * sy]],
          [[-cx * sy, 0.0, sx * sy], [-sx * cy, -sy, -cx * cy]]]
    return _jet(value, d1, d2)


def _sphere_chart_swapped(x):
    # axis order chosen so the oriented frame rule picks the inward normal
    return sphere_chart(np.array([x[1], x[0]]))


def _sphere_chart_swapped_jet(x):
    base = sphere_chart_jet(np.array([x[1], x[0]]))
    d1 = base.d1[::-1].copy()
    d2 = base.d2[::-1, ::-1].copy()
    return Jet2(value=base.value, d1=d1, d2=d2)


# ------------------------------------------------------------ E^3 shapes

def torus(rad_major: float = 2.0, rad_minor: float = 1.0,
          chart: Optional[Chart] = None) -> HypersurfaceImmersion:
    """Revolution torus in E^3; the default chart stays on the outer band
    where both principal curvatures are bounded away from zero."""
    if chart is None:
        chart = Chart(2, [-1.2, 0.0], [1.2, TWO_PI], (33, 33))
    big, small = float(rad_major), float(rad_minor)

    def fn(x):
        cu, su = math.cos(x[0]), math.sin(x[0])
        cv, sv = math.cos(x[1]), math.sin(x[1])
        w = big + small * cu
        return np.array([w * cv, w * sv, small * su])

    def jets(x):
        cu, su = math.cos(x[0]), math.sin(x[0])
        cv, sv = math.cos(x[1]), math.sin(x[1])
        w = big + small * cu
        value = [w * cv, w * sv, small * su]
        d1 = [[-small * su * cv, -small * su * sv, small * cu],
              [-w * sv, w * cv, 0.0]]
        d2 = [[[-small * cu * cv, -small * cu * sv, -small * su],
               [small * su * sv, -small * su * cv, 0.0]],
              [[small * su * sv, -small * su * cv, 0.0],
               [-w * cv, -w * sv, 0.0]]]
        return _jet(value, d1, d2)

    return HypersurfaceImmersion(SpaceForm.euclidean(3), chart, fn, jets,
                                 name="torus")


def round_sphere(radius: float = 1.0,
                 chart: Optional[Chart] = None) -> HypersurfaceImmersion:
    if chart is None:
        chart = Chart(2, [-1.0, -1.0], [1.0, 1.0], (17, 17))
    rho = float(radius)

    def fn(x):
        return rho * _sphere_chart_swapped(x)

    def jets(x):
        base = _sphere_chart_swapped_jet(x)
        return Jet2(value=rho * base.value, d1=rho * base.d1, d2=rho * base.d2)

    return HypersurfaceImmersion(SpaceForm.euclidean(3), chart, fn, jets,
                                 name="sphere")


def ellipsoid(ax: float = 1.5, ay: float = 1.0, az: float = 0.8,
              chart: Optional[Chart] = None) -> HypersurfaceImmersion:
    """Triaxial ellipsoid patch; the default chart keeps the second angle away
    from zero, i.e. away from the umbilic plane of the extreme axes."""
    if chart is None:
        chart = Chart(2, [-1.0, 0.25], [1.0, 0.95], (17, 17))
    m = np.array([float(ax), float(ay), float(az)])

    def fn(x):
        return m * sphere_chart(x)

    def jets(x):
        base = sphere_chart_jet(x)
        return Jet2(value=m * base.value, d1=m * base.d1, d2=m * base.d2)

    return HypersurfaceImmersion(SpaceForm.euclidean(3), chart, fn, jets,
                                 name="ellipsoid")


def catenoid(chart: Optional[Chart] = None) -> HypersurfaceImmersion:
    if chart is None:
        chart = Chart(2, [-1.0, 0.0], [1.0, TWO_PI], (17, 33))

    def fn(x):
        ch, sh = math.cosh(x[0]), math.sinh(x[0])
        cv, sv = math.cos(x[1]), math.sin(x[1])
        return np.array([ch * cv, ch * sv, x[0]])

    def jets(x):
        ch, sh = math.cosh(x[0]), math.sinh(x[0])
        cv, sv = math.cos(x[1]), math.sin(x[1])
        value = [ch * cv, ch * sv, x[0]]
        d1 = [[sh * cv, sh * sv, 1.0], [-ch * sv, ch * cv, 0.0]]
        d2 = [[[ch * cv, ch * sv, 0.0], [-sh * sv, sh * cv, 0.0]],
              [[-sh * sv, sh * cv, 0.0], [-ch * cv, -ch * sv, 0.0]]]
        return _jet(value, d1, d2)

    return HypersurfaceImmersion(SpaceForm.euclidean(3), chart, fn, jets,
                                 name="catenoid")


# ------------------------------------------------------------ S^3 shapes

def clifford_torus(alpha: float = math.pi / 4,
                   chart: Optional[Chart] = None) -> HypersurfaceImmersion:
    """Flat product torus in S^3; alpha = pi/4 is the minimal (Clifford) one."""
    if chart is None:
        chart = Chart(2, [0.0, 0.0], [TWO_PI, TWO_PI], (33, 33))
    ca, sa = math.cos(float(alpha)), math.sin(float(alpha))

    def fn(x):
        cu, su = math.cos(x[0]), math.sin(x[0])
        cv, sv = math.cos(x[1]), math.sin(x[1])
        return np.array([ca * cu, ca * su, sa * cv, sa * sv])

    def jets(x):
        cu, su = math.cos(x[0]), math.sin(x[0])
        cv, sv = math.cos(x[1]), math.sin(x[1])
        value = [ca * cu, ca * su, sa * cv, sa * sv]
        d1 = [[-ca * su, ca * cu, 0.0, 0.0], [0.0, 0.0, -sa * sv, sa * cv]]
        zero = [0.0, 0.0, 0.0, 0.0]
        d2 = [[[-ca * cu, -ca * su, 0.0, 0.0], zero],
              [zero, [0.0, 0.0, -sa * cv, -sa * sv]]]
        return _jet(value, d1, d2)

    return HypersurfaceImmersion(SpaceForm.sphere(3), chart, fn, jets,
                                 name="clifford-torus")


def geodesic_sphere_s3(rho: float = math.pi / 6,
                       chart: Optional[Chart] = None) -> HypersurfaceImmersion:
    """Umbilic distance sphere in S^3 (the 'small sphere')."""
    if chart is None:
        chart = Chart(2, [-1.0, -1.0], [1.0, 1.0], (17, 17))
    sr, cr = math.sin(float(rho)), math.cos(float(rho))

    def fn(x):
        return np.append(sr * sphere_chart(x), cr)

    def jets(x):
        base = sphere_chart_jet(x)
        value = np.append(sr * base.value, cr)
        d1 = np.concatenate([sr * base.d1, np.zeros((2, 1))], axis=1)
        d2 = np.concatenate([sr * base.d2, np.zeros((2, 2, 1))], axis=2)
        return Jet2(value=value, d1=d1, d2=d2)

    return HypersurfaceImmersion(SpaceForm.sphere(3), chart, fn, jets,
                                 name="small-sphere")


# ------------------------------------------------------------ H^3 shapes

def geodesic_tube_h3(radius: float = 0.8,
                     chart: Optional[Chart] = None) -> HypersurfaceImmersion:
    """Equidistant tube around a geodesic of H^3; curvatures coth r and tanh r."""
    if chart is None:
        chart = Chart(2, [0.0, -1.0], [TWO_PI, 1.0], (33, 17))
    shb, chb = math.sinh(float(radius)), math.cosh(float(radius))

    def fn(x):
        cu, su = math.cos(x[0]), math.sin(x[0])
        chv, shv = math.cosh(x[1]), math.sinh(x[1])
        return np.array([shb * cu, shb * su, chb * shv, chb * chv])

    def jets(x):
        cu, su = math.cos(x[0]), math.sin(x[0])
        chv, shv = math.cosh(x[1]), math.sinh(x[1])
        value = [shb * cu, shb * su, chb * shv, chb * chv]
        d1 = [[-shb * su, shb * cu, 0.0, 0.0], [0.0, 0.0, chb * chv, chb * shv]]
        zero = [0.0, 0.0, 0.0, 0.0]
        d2 = [[[-shb * cu, -shb * su, 0.0, 0.0], zero],
              [zero, [0.0, 0.0, chb * shv, chb * chv]]]
        return _jet(value, d1, d2)

    return HypersurfaceImmersion(SpaceForm.hyperbolic(3), chart, fn, jets,
                                 name="hyperbolic-tube")


def equidistant_h3(dist: float = 0.8,
                   chart: Optional[Chart] = None) -> HypersurfaceImmersion:
    """Umbilic surface at distance `dist` from a totally geodesic plane of H^3.

    Its curvature tanh(dist) lies in (0, 1), which is exactly the regime where
    the hyperbolic product construction keeps one root.
    """
    if chart is None:
        chart = Chart(2, [0.3, 0.0], [1.3, TWO_PI], (17, 33))
    shb, chb = math.sinh(float(dist)), math.cosh(float(dist))

    def fn(x):
        shu, chu = math.sinh(x[0]), math.cosh(x[0])
        cv, sv = math.cos(x[1]), math.sin(x[1])
        return np.array([chb * shu * cv, chb * shu * sv, shb, chb * chu])

    def jets(x):
        shu, chu = math.sinh(x[0]), math.cosh(x[0])
        cv, sv = math.cos(x[1]), math.sin(x[1])
        value = [chb * shu * cv, chb * shu * sv, shb, chb * chu]
        d1 = [[chb * chu * cv, chb * chu * sv, 0.0, chb * shu],
              [-chb * shu * sv, chb * shu * cv, 0.0, 0.0]]
        d2 = [[[chb * shu * cv, chb * shu * sv, 0.0, chb * chu],
               [-chb * chu * sv, chb * chu * cv, 0.0, 0.0]],
              [[-chb * chu * sv, chb * chu * cv, 0.0, 0.0],
               [-chb * shu * cv, -chb * shu * sv, 0.0, 0.0]]]
        return _jet(value, d1, d2)

    return HypersurfaceImmersion(SpaceForm.hyperbolic(3), chart, fn, jets,
                                 name="equidistant")
