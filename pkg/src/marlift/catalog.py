"""Named example corpus: classical surfaces and the published example families.

Entries come in three kinds. Hypersurface entries feed the lift constructors
(an ambient is chosen at run time); lift entries are explicit maps into one
fixed Lorentzian ambient, including two deliberate negative controls; the
support entry carries a scalar field on the 2-sphere and builds its lift
through the support-function route.

Function-valued parameters (the height profiles of the chen families, the
support field) are given as expressions in x over a restricted math
namespace, e.g. ``f="x**2"`` or ``f="2+sin(x)"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import shapes
from .constructor import (
    AmbientKind,
    LiftedImmersion,
    LorentzAmbient,
    Provenance,
    SupportFunction,
    flat_slice,
    null_lift,
    spherical_slice,
)
from .core import Chart, GeometryError

__all__ = [
    "CatalogEntry",
    "CATALOG",
    "catalog_lookup",
    "catalog_names",
    "UnknownEntryError",
    "ParameterError",
]


class UnknownEntryError(GeometryError):
    pass


class ParameterError(GeometryError):
    pass


_EXPR_NAMES = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan,
    "sinh": math.sinh, "cosh": math.cosh, "tanh": math.tanh,
    "exp": math.exp, "log": math.log, "sqrt": math.sqrt,
    "abs": abs, "pi": math.pi, "e": math.e,
}


def scalar_expr(expr: str, var: str = "x") -> Callable[[float], float]:
    """Compile a one-variable math expression with a restricted namespace."""
    try:
        code = compile(str(expr), "<param>", "eval")
    except SyntaxError as exc:
        raise ParameterError(f"cannot parse expression {expr!r}: {exc}")
    for name in code.co_names:
        if name != var and name not in _EXPR_NAMES:
            raise ParameterError(f"name {name!r} not allowed in expression {expr!r}")

    def fn(value: float) -> float:
        return float(eval(code, {"__builtins__": {}}, {**_EXPR_NAMES, var: value}))

    return fn


def _second_derivative(fn, t, h=1e-5):
    return (fn(t + h) - 2.0 * fn(t) + fn(t - h)) / h ** 2


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    kind: str                      # hypersurface | lift | support
    builder: Callable[[dict], object]
    citation: str
    params_doc: str = ""
    defaults: tuple = ()
    expected_verdict: Optional[str] = None

    def build(self, params: Optional[dict] = None):
        merged = dict(self.defaults)
        params = dict(params or {})
        for key in params:
            if key not in merged:
                raise ParameterError(
                    f"entry {self.name!r} accepts {sorted(merged)}, got {key!r}")
        merged.update(params)
        return self.builder(merged)


# -------------------------------------------------------------- chen family

def _build_chen_l1(p):
    f = scalar_expr(p["f"])
    chart = Chart(2, [-1.0, -1.0], [1.0, 1.0], (17, 17))
    for t in np.linspace(chart.lower[0], chart.upper[0], 15):
        if abs(_second_derivative(f, t)) <= 1e-8:
            raise ParameterError(
                f"chen-l1 needs f'' nowhere zero; fails near x={t:.3f}")
    lift = null_lift(flat_slice(chart), lambda x: f(x[0]), name="chen-l1")
    return lift


def _build_chen_l2(p):
    # q(x) = sin x, r(x) = 1: the plane is reparametrized in polar-like
    # coordinates around (-1, 0) and the height is (1+y) sin x
    chart = Chart(2, [-1.0, -0.4], [1.0, 0.4], (17, 17))

    def eval_fn(x):
        c, s = math.cos(x[0]), math.sin(x[0])
        tau = (1.0 + x[1]) * s
        return np.array([(x[1] + 1.0) * c - 1.0, (x[1] + 1.0) * s, tau, tau])

    nu_bar = np.array([0.0, 0.0, 1.0, 1.0])
    prov = Provenance(family="null-second-form", source_name="chen-l2",
                      detail="height graph over a reparametrized plane")
    return LiftedImmersion(LorentzAmbient.for_kind(AmbientKind.MINKOWSKI, 2),
                           chart, eval_fn, lambda x: nu_bar.copy(), None, prov,
                           name="chen-l2")


def _build_chen_l3(p):
    f = scalar_expr(p["f"])
    chart = Chart(2, [-1.0, -0.9], [1.0, 0.9], (17, 17))
    for t in np.linspace(chart.lower[0], chart.upper[0], 15):
        if abs(_second_derivative(f, t) + f(t)) <= 1e-8:
            raise ParameterError(
                f"chen-l3 needs f'' + f nowhere zero; fails near x={t:.3f}")
    return null_lift(spherical_slice(chart),
                     lambda x: f(x[0]) * math.cos(x[1]), name="chen-l3")


def _build_chen_l4(p):
    chart = Chart(2, [-1.0, -0.8], [1.0, 0.8], (17, 17))

    def eval_fn(x):
        ey, emy = math.exp(x[1]), math.exp(-x[1])
        xsq = x[0] * x[0]
        return np.array([emy, x[0] * ey, (xsq - 0.5) * ey,
                         0.5 * ey + emy, xsq * ey])

    nu_bar = np.array([-1.0, 0.0, 1.0, -1.0, 1.0])
    prov = Provenance(family="null-second-form", source_name="chen-l4",
                      detail="constant null normal; the null projection is "
                             "totally geodesic in hyperbolic space")
    return LiftedImmersion(LorentzAmbient.for_kind(AmbientKind.ANTI_DE_SITTER, 2),
                           chart, eval_fn, lambda x: nu_bar.copy(), None, prov,
                           name="chen-l4")


# --------------------------------------------------------- negative controls

def _build_l1_perturbed(p):
    f = scalar_expr(p["f"])
    eps = float(p["eps"])
    chart = Chart(2, [-1.0, -1.0], [1.0, 1.0], (17, 17))

    def eval_fn(x):
        v = f(x[0])
        return np.array([x[0], x[1], v + eps * x[1] ** 2, v])

    prov = Provenance(family="control", source_name="l1-perturbed",
                      detail="third coordinate perturbed off the null direction")
    return LiftedImmersion(LorentzAmbient.for_kind(AmbientKind.MINKOWSKI, 2),
                           chart, eval_fn, None, None, prov, name="l1-perturbed")


def _build_spacelike_graph(p):
    amp = float(p["amplitude"])
    chart = Chart(2, [-1.0, -1.0], [1.0, 1.0], (17, 17))

    def eval_fn(x):
        return np.array([x[0], x[1], amp * math.sin(x[0]) * math.sin(x[1]), 0.0])

    prov = Provenance(family="control", source_name="spacelike-graph",
                      detail="generic spatial graph, not marginally trapped")
    return LiftedImmersion(LorentzAmbient.for_kind(AmbientKind.MINKOWSKI, 2),
                           chart, eval_fn, None, None, prov,
                           name="spacelike-graph")


# ------------------------------------------------------------ support entry

def _quadric_support(ax, ay, az):
    m2 = np.array([ax, ay, az], dtype=float) ** 2

    def f(u):
        return math.sqrt(float(u @ (m2 * u)))

    def grad(u):
        fv = f(u)
        return m2 * u / fv - fv * u

    def lap(u):
        fv = f(u)
        m2u = m2 * u
        return float(np.sum(m2)) / fv - float(m2u @ m2u) / fv ** 3 - 2.0 * fv

    return f, grad, lap


def _build_palmer_sphere(p):
    preset = str(p["preset"])
    chart = Chart(2, [-0.8, 0.25], [0.8, 0.9], (17, 17))
    if preset == "round":
        c = float(p["c"])
        return SupportFunction(chart, lambda u: c, lambda u: np.zeros(3),
                               lambda u: 0.0, name="palmer-round")
    if preset == "offset":
        c, eps = float(p["c"]), float(p["eps"])
        e3 = np.array([0.0, 0.0, 1.0])
        return SupportFunction(
            chart, lambda u: c + eps * u[2],
            lambda u: eps * (e3 - u[2] * u),
            lambda u: -2.0 * eps * u[2], name="palmer-offset")
    if preset == "quadric":
        f, grad, lap = _quadric_support(float(p["ax"]), float(p["ay"]),
                                        float(p["az"]))
        return SupportFunction(chart, f, grad, lap, name="palmer-quadric")
    if preset == "expr":
        f = scalar_expr(p["f"], var="u3")
        return SupportFunction(chart, lambda u: f(u[2]), None, None,
                               name="palmer-expr")
    raise ParameterError(f"unknown palmer preset {preset!r}")


# ------------------------------------------------------------------ registry

def _hyp(name, factory, citation, params_doc="", defaults=()):
    def builder(p):
        return factory(**p)

    return CatalogEntry(name=name, kind="hypersurface", builder=builder,
                        citation=citation, params_doc=params_doc,
                        defaults=defaults)


CATALOG = {e.name: e for e in [
    _hyp("torus", lambda rad_major, rad_minor: shapes.torus(rad_major, rad_minor),
         "revolution torus band in Euclidean 3-space, both curvatures nonzero",
         "rad_major, rad_minor", (("rad_major", 2.0), ("rad_minor", 1.0))),
    _hyp("sphere", lambda radius: shapes.round_sphere(radius),
         "round sphere, umbilic (no flat-family lifts)",
         "radius", (("radius", 1.0),)),
    _hyp("ellipsoid", lambda ax, ay, az: shapes.ellipsoid(ax, ay, az),
         "triaxial ellipsoid patch away from its umbilics",
         "ax, ay, az", (("ax", 1.5), ("ay", 1.0), ("az", 0.8))),
    _hyp("catenoid", lambda: shapes.catenoid(),
         "minimal surface of revolution; its lift sits at height zero"),
    _hyp("clifford-torus", lambda: shapes.clifford_torus(),
         "minimal flat torus in the 3-sphere"),
    _hyp("sphere-torus", lambda alpha: shapes.clifford_torus(alpha),
         "flat product torus in the 3-sphere, non-minimal for alpha != pi/4",
         "alpha", (("alpha", 1.0),)),
    _hyp("small-sphere", lambda rho: shapes.geodesic_sphere_s3(rho),
         "umbilic distance sphere in the 3-sphere",
         "rho", (("rho", math.pi / 6),)),
    _hyp("hyperbolic-tube", lambda radius: shapes.geodesic_tube_h3(radius),
         "equidistant tube around a geodesic of hyperbolic 3-space",
         "radius", (("radius", 0.8),)),
    _hyp("equidistant", lambda dist: shapes.equidistant_h3(dist),
         "umbilic equidistant surface of hyperbolic 3-space",
         "dist", (("dist", 0.8),)),
    CatalogEntry("chen-l1", "lift", _build_chen_l1,
                 "Chen-Van der Veken planar family: (x, y, f(x), f(x))",
                 "f (expression in x, f'' nowhere zero)", (("f", "x**2"),),
                 expected_verdict="marginally_trapped"),
    CatalogEntry("chen-l2", "lift", _build_chen_l2,
                 "Chen-Van der Veken rotational family with q = sin x, r = 1",
                 expected_verdict="marginally_trapped"),
    CatalogEntry("chen-l3", "lift", _build_chen_l3,
                 "de Sitter family over the equatorial 2-sphere",
                 "f (expression in x, f'' + f nowhere zero)",
                 (("f", "2+sin(x)"),),
                 expected_verdict="marginally_trapped"),
    CatalogEntry("chen-l4", "lift", _build_chen_l4,
                 "anti-de Sitter example with constant null normal "
                 "(-1, 0, 1, -1, 1)",
                 expected_verdict="marginally_trapped"),
    CatalogEntry("palmer-sphere", "support", _build_palmer_sphere,
                 "support-function route on a chart of the 2-sphere",
                 "preset (round|offset|quadric|expr) with c, eps, ax, ay, az, f",
                 (("preset", "quadric"), ("c", 1.0), ("eps", 0.1),
                  ("ax", 1.3), ("ay", 1.0), ("az", 0.8), ("f", "1.0")),
                 expected_verdict="marginally_trapped"),
    CatalogEntry("l1-perturbed", "lift", _build_l1_perturbed,
                 "negative control: planar family with a non-null perturbation",
                 "f, eps", (("f", "x**2"), ("eps", 0.01)),
                 expected_verdict="not_marginal"),
    CatalogEntry("spacelike-graph", "lift", _build_spacelike_graph,
                 "negative control: generic spatial graph in a time slice",
                 "amplitude", (("amplitude", 0.1),),
                 expected_verdict="not_marginal"),
]}


def catalog_names():
    return list(CATALOG)


def catalog_lookup(name: str, params: Optional[dict] = None):
    """Build a catalog entry instance; raises on unknown names or bad params."""
    if name not in CATALOG:
        raise UnknownEntryError(
            f"unknown catalog entry {name!r}; known: {', '.join(CATALOG)}")
    entry = CATALOG[name]
    return entry, entry.build(params)
