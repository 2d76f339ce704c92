"""Differential geometry of immersed hypersurfaces of Riemannian space forms.

A hypersurface is an evaluatable map from a chart into Euclidean space, the
round sphere (unit hyperquadric of the flat Euclidean container) or hyperbolic
space (unit timelike hyperquadric of a Lorentzian container). This module
produces the data the lift constructors consume: the unit normal with a
deterministic orientation, the induced metric, the second fundamental form,
and the clustered principal curvature spectrum.

Sign conventions. The shape operator is A = -d(normal), so the second
fundamental form in chart indices is b_ij = <d2 phi_ij, normal> taken with the
flat container form; for the hyperquadrics this equals the intrinsic second
form because the normal is orthogonal to the position vector.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import (
    DEFAULTS,
    Chart,
    DimensionMismatchError,
    GeometryError,
    Jet2,
    Signature,
    _det3,
    bilinear,
    generalized_cross,
    generalized_shape_eigen,
    jet2_of,
)

__all__ = [
    "SpaceFormKind",
    "SpaceForm",
    "HypersurfaceImmersion",
    "PointFrame",
    "ShapeSpectrum",
    "frame_at",
    "spectrum_at",
    "mean_gauss_at",
    "legendrian_residual",
    "ImmersionError",
    "QuadricConstraintError",
]


class ImmersionError(GeometryError):
    pass


class QuadricConstraintError(GeometryError):
    pass


class SpaceFormKind(enum.Enum):
    EUCLIDEAN = "euclidean"
    SPHERE = "sphere"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class SpaceForm:
    """Riemannian space form in its flat container.

    dim is the space form dimension n+1; the container is R^{n+1} for the
    Euclidean case and R^{n+2} (flat or Lorentzian) for the hyperquadrics.
    """

    kind: SpaceFormKind
    dim: int

    @property
    def container_dim(self) -> int:
        return self.dim if self.kind is SpaceFormKind.EUCLIDEAN else self.dim + 1

    @property
    def signature(self) -> Signature:
        if self.kind is SpaceFormKind.HYPERBOLIC:
            return Signature.of(self.dim, 1)
        return Signature.of(self.container_dim, 0)

    @property
    def quadric_constant(self) -> Optional[float]:
        if self.kind is SpaceFormKind.SPHERE:
            return 1.0
        if self.kind is SpaceFormKind.HYPERBOLIC:
            return -1.0
        return None

    def constraint_residual(self, point: np.ndarray) -> float:
        c = self.quadric_constant
        if c is None:
            return 0.0
        return abs(bilinear(self.signature, point, point) - c)

    @staticmethod
    def euclidean(dim: int) -> "SpaceForm":
        return SpaceForm(SpaceFormKind.EUCLIDEAN, dim)

    @staticmethod
    def sphere(dim: int) -> "SpaceForm":
        return SpaceForm(SpaceFormKind.SPHERE, dim)

    @staticmethod
    def hyperbolic(dim: int) -> "SpaceForm":
        return SpaceForm(SpaceFormKind.HYPERBOLIC, dim)


@dataclass(frozen=True)
class HypersurfaceImmersion:
    """Evaluatable immersion of a chart into a space form.

    `jets`, when given, must return the analytic Jet2 of `eval_fn`; otherwise
    derivatives fall back to central differences with the shared step.
    """

    space: SpaceForm
    chart: Chart
    eval_fn: Callable[[np.ndarray], np.ndarray]
    jets: Optional[Callable[[np.ndarray], Jet2]] = None
    name: str = ""

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.eval_fn(np.asarray(x, dtype=float)), dtype=float)

    def jet(self, x, h: Optional[float] = None) -> Jet2:
        x = np.asarray(x, dtype=float)
        if self.jets is not None:
            return self.jets(x)
        return jet2_of(self.eval_fn, x, h=h if h is not None else DEFAULTS.step_h,
                       chart=self.chart)


@dataclass(frozen=True)
class PointFrame:
    """First and second order data of a hypersurface at one chart point."""

    space: SpaceForm
    x: np.ndarray
    point: np.ndarray
    tangent: np.ndarray      # shape (n, container_dim)
    normal: np.ndarray       # unit, orthogonal to tangent (and position on quadrics)
    metric: np.ndarray       # g_ij, positive definite
    second_form: np.ndarray  # b_ij with respect to `normal`

    @property
    def n(self) -> int:
        return self.tangent.shape[0]


@dataclass(frozen=True)
class ShapeSpectrum:
    """Clustered principal curvatures: distinct values with multiplicities."""

    kappas: tuple
    mults: tuple
    raw: tuple
    cluster_tol: float

    def __post_init__(self):
        if len(self.kappas) != len(self.mults):
            raise DimensionMismatchError("kappas and mults must align")
        if sum(self.mults) != len(self.raw):
            raise DimensionMismatchError("multiplicities must sum to the raw count")
        if any(m <= 0 for m in self.mults):
            raise DimensionMismatchError("multiplicities must be positive")

    @property
    def p(self) -> int:
        return len(self.kappas)

    @property
    def n(self) -> int:
        return len(self.raw)

    @property
    def pattern(self) -> tuple:
        return (self.p, self.mults)


def frame_at(imm: HypersurfaceImmersion, x, h: Optional[float] = None,
             flip: bool = False, tol_pd: Optional[float] = None) -> PointFrame:
    """Tangent frame, oriented unit normal, induced metric and second form.

    The normal is fixed by requiring (d phi_1, ..., d phi_n, normal) to be a
    positively oriented container basis, with the position vector appended for
    the hyperquadrics. Pass flip=True to select the opposite normal.
    """
    x = np.asarray(x, dtype=float)
    space = imm.space
    jet = imm.jet(x, h=h)
    point = jet.value
    tangent = jet.d1
    sig = space.signature
    if tol_pd is None:
        tol_pd = DEFAULTS.tol_pd

    res = space.constraint_residual(point)
    if res > DEFAULTS.tol_quadric * (1.0 + float(np.max(np.abs(point)))):
        raise QuadricConstraintError(
            f"point leaves the space form by {res:.3e} at chart {x}")

    gsigns = sig.signs
    rows = tangent * gsigns  # row i = G @ tangent_i
    g = rows @ tangent.T
    n = tangent.shape[0]
    if n == 2:
        pd_ok = (g[0, 0] > tol_pd
                 and g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
                 > tol_pd * max(g[0, 0], g[1, 1]))
    else:
        try:
            np.linalg.cholesky(g - tol_pd * np.eye(n))
            pd_ok = True
        except np.linalg.LinAlgError:
            pd_ok = False
    if not pd_ok:
        raise ImmersionError(
            f"rank-deficient differential at chart {x} (metric not positive "
            f"definite beyond {tol_pd:g})")

    if space.quadric_constant is not None:
        rows = np.vstack([rows, point * gsigns])
    normal = generalized_cross(rows)
    p = sig.plus
    nn = float(np.dot(normal[:p], normal[:p]) - np.dot(normal[p:], normal[p:]))
    if nn <= 0.0:
        raise ImmersionError(f"could not extract a spacelike unit normal at chart {x}")
    normal = normal / math.sqrt(nn)

    frame_rows = [tangent[i] for i in range(n)] + [normal]
    if space.quadric_constant is not None:
        frame_rows.append(point)
    mat = np.stack(frame_rows)
    det = _det3(mat) if mat.shape[0] == 3 else np.linalg.det(mat)
    if det < 0:
        normal = -normal
    if flip:
        normal = -normal

    gnormal = gsigns * normal
    b = jet.d2 @ gnormal
    defect = float(np.max(np.abs(b - b.T)))
    if defect > DEFAULTS.tol_sym * (1.0 + float(np.max(np.abs(b)))):
        warnings.warn(f"second-derivative asymmetry {defect:.3e} at chart {x}; "
                      "check the analytic jet provider", RuntimeWarning)
    b = 0.5 * (b + b.T)
    return PointFrame(space=space, x=x, point=point, tangent=tangent,
                      normal=normal, metric=g, second_form=b)


def spectrum_at(frame: PointFrame, cluster_tol: Optional[float] = None) -> ShapeSpectrum:
    """Principal curvatures of the frame, merged by single linkage.

    Raw eigenvalues closer than cluster_tol are one principal curvature with
    summed multiplicity; the stored value is the cluster mean.
    """
    if cluster_tol is None:
        cluster_tol = DEFAULTS.tol_cluster
    raw = generalized_shape_eigen(frame.metric, frame.second_form)
    kappas = []
    mults = []
    start = 0
    for i in range(1, len(raw) + 1):
        if i == len(raw) or raw[i] - raw[i - 1] > cluster_tol:
            kappas.append(float(sum(raw[start:i])) / (i - start))
            mults.append(i - start)
            start = i
    return ShapeSpectrum(kappas=tuple(kappas), mults=tuple(mults),
                         raw=tuple(float(r) for r in raw), cluster_tol=cluster_tol)


def mean_gauss_at(frame: PointFrame):
    """Mean curvature H = (k1+k2)/2 and Gauss curvature K = k1 k2; surfaces only."""
    if frame.n != 2:
        raise DimensionMismatchError("mean/Gauss curvature requires a 2-dimensional chart")
    raw = generalized_shape_eigen(frame.metric, frame.second_form)
    h = 0.5 * float(raw[0] + raw[1])
    k = float(raw[0] * raw[1])
    return h, k


def legendrian_residual(imm: HypersurfaceImmersion, x, nu=None,
                        h: Optional[float] = None) -> float:
    """Max over chart directions of |<d phi_i, nu>|.

    Vanishes for any valid frame; a deliberately perturbed normal is detected.
    """
    frame = frame_at(imm, x, h=h)
    if nu is None:
        nu = frame.normal
    nu = np.asarray(nu, dtype=float)
    gsigns = imm.space.signature.signs
    return float(np.max(np.abs(frame.tangent @ (gsigns * nu))))


def pattern_sweep(imm: HypersurfaceImmersion, points,
                  cluster_tol: Optional[float] = None,
                  h: Optional[float] = None):
    """Multiplicity pattern (p, mults) per sample, warning on changes.

    The lift constructions assume one pattern across the chart; a change
    marks umbilic crossings or clustering-threshold effects.
    """
    patterns = []
    seen = set()
    for x in points:
        if imm.chart.excluded is not None and imm.chart.excluded(np.asarray(x)):
            patterns.append(None)
            continue
        sp = spectrum_at(frame_at(imm, x, h=h), cluster_tol=cluster_tol)
        patterns.append(sp.pattern)
        seen.add(sp.pattern)
    if len(seen) > 1:
        warnings.warn(
            f"multiplicity pattern changes across the chart: {sorted(seen)}",
            RuntimeWarning)
    return patterns
