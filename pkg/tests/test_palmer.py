import math

import numpy as np
import pytest

from marlift.catalog import catalog_lookup
from marlift.constructor import (
    SupportFunction,
    lift_palmer,
    support_route_lift,
)
from marlift.core import Chart
from marlift.verifier import assemble_report


def chart():
    return Chart(2, [-0.8, 0.25], [0.8, 0.9], (7, 7))


def test_finite_difference_gradient_matches_analytic():
    # f = u3 is a first spherical harmonic: grad = e3 - u3 u, lap = -2 u3
    sf_fd = SupportFunction(chart(), lambda u: u[2], name="fd")
    e3 = np.array([0.0, 0.0, 1.0])
    for x in chart().grid(margin=0.01)[::7]:
        u = sf_fd.point(x)
        grad = sf_fd.gradient(x)
        assert np.allclose(grad, e3 - u[2] * u, atol=1e-7)
        assert sf_fd.laplacian(x) == pytest.approx(-2.0 * u[2], abs=1e-6)


def test_quadric_support_reconstructs_ellipsoid():
    _, sf = catalog_lookup("palmer-sphere")   # quadric preset, axes 1.3/1.0/0.8
    rec = sf.reconstruction()
    inv_sq = 1.0 / np.array([1.3, 1.0, 0.8]) ** 2
    for x in chart().grid(margin=0.01)[::9]:
        p = rec(x)
        assert float(p ** 2 @ inv_sq) == pytest.approx(1.0, abs=1e-7)


def test_routes_agree_on_convex_support():
    _, sf = catalog_lookup("palmer-sphere")
    direct = lift_palmer(sf)
    route = support_route_lift(sf)
    gap = max(np.max(np.abs(direct(x) - route(x)))
              for x in sf.chart.grid(margin=0.01)[::5])
    assert gap <= 1e-6


def test_both_routes_verify_trapped_on_convex_support():
    _, sf = catalog_lookup("palmer-sphere")
    rep1 = assemble_report(lift_palmer(sf), resolution=(5, 5))
    rep2 = assemble_report(support_route_lift(sf), resolution=(5, 5),
                           cross_checks=False)
    assert rep1.verdict == "marginally_trapped"
    assert rep2.verdict == "marginally_trapped"


def test_offset_support_is_a_translated_sphere():
    # first-harmonic perturbations only translate the front: the
    # reconstruction is a round unit sphere centered at eps * e3
    _, sf = catalog_lookup("palmer-sphere",
                           {"preset": "offset", "c": 1.0, "eps": 0.1})
    rec = sf.reconstruction()
    center = np.array([0.0, 0.0, 0.1])
    for x in sf.chart.grid(margin=0.01)[::9]:
        assert np.linalg.norm(rec(x) - center) == pytest.approx(1.0, abs=1e-9)


def test_offset_support_lift_degenerates_to_focal_point():
    # umbilic front: the height equals the curvature radius everywhere, the
    # induced metric collapses, and the image is the single focal point
    _, sf = catalog_lookup("palmer-sphere",
                           {"preset": "offset", "c": 1.0, "eps": 0.1})
    lift = lift_palmer(sf)
    vals = np.array([lift(x) for x in sf.chart.grid(margin=0.01)[::5]])
    assert np.max(vals.max(axis=0) - vals.min(axis=0)) <= 1e-12
    assert np.allclose(vals[0], [0.0, 0.0, 0.1, -1.0], atol=1e-12)
    rep = assemble_report(lift, resolution=(5, 5), cross_checks=False)
    assert rep.verdict == "inconclusive"
    assert rep.excluded_count == rep.total


def test_route_height_matches_support_formula():
    # tau = H/K of the front equals -(f + lap f / 2)
    _, sf = catalog_lookup("palmer-sphere")
    route = support_route_lift(sf)
    for x in sf.chart.grid(margin=0.01)[::9]:
        tau_route = route(x)[-1]
        tau_support = -sf.value(x) - 0.5 * sf.laplacian(x)
        assert tau_route == pytest.approx(tau_support, abs=1e-6)


def test_constant_support_route_height():
    # f = c: the curvature-pipeline height is -c (the focal distance)
    _, sf = catalog_lookup("palmer-sphere", {"preset": "round", "c": 2.0})
    route = support_route_lift(sf)
    val = route(np.array([0.2, 0.5]))
    assert val[-1] == pytest.approx(-2.0, abs=1e-7)
    assert np.allclose(val[:3], 0.0, atol=1e-7)
