"""Weight functions, model domains, and the geometric data attached to them.

A weight f defines the measure e^{-f} dv; everything downstream (operator
assembly, constants in the gap bounds) consumes the analytic derivatives
provided here, never a silent numerical differentiation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "WeightFunction",
    "Domain",
    "GeometrySpec",
    "DriftData",
    "eval_potential",
    "drift_quantities",
    "schrodinger_potential",
    "weighted_mean_of_f",
]


@dataclass(frozen=True, eq=False)
class _Table:
    """Caller-supplied samples of f, grad f and lap f on a tensor grid."""

    axes: Tuple[Tuple[float, ...], ...]
    values: np.ndarray  # (N,)   row-major over axes
    grads: np.ndarray   # (N, d)
    laps: np.ndarray    # (N,)

    def __post_init__(self):
        n = int(np.prod([len(a) for a in self.axes]))
        if self.values.shape != (n,) or self.laps.shape != (n,):
            raise ValueError("tabulated value/laplacian arrays do not cover the grid")
        if self.grads.shape != (n, len(self.axes)):
            raise ValueError("tabulated gradient array does not cover the grid")
        for arr in (self.values, self.grads, self.laps):
            if not np.all(np.isfinite(arr)):
                raise ValueError("tabulated samples must be finite")

    def locate(self, pts: np.ndarray) -> np.ndarray:
        """Map points to flat grid indices; raise if any point is off-grid."""
        idx = np.zeros(len(pts), dtype=np.int64)
        for a, coords in enumerate(self.axes):
            coords = np.asarray(coords)
            h = coords[1] - coords[0] if len(coords) > 1 else 1.0
            j = np.rint((pts[:, a] - coords[0]) / h).astype(np.int64)
            ok = (j >= 0) & (j < len(coords))
            if not np.all(ok):
                raise ValueError("point outside tabulated grid")
            if not np.allclose(pts[:, a], coords[j], rtol=0.0, atol=1e-9 * max(abs(h), 1.0)):
                raise ValueError("point outside tabulated grid")
            idx = idx * len(coords) + j
        return idx


@dataclass(frozen=True, eq=False)
class WeightFunction:
    """Potential f on the Euclidean factor, with exact derivatives.

    Supported kinds: ``constant`` (value), ``quadratic`` (coeff * |x|^2),
    ``affine_quadratic`` (coeff * |x|^2 + <linear, x> + offset) and
    ``tabulated`` (caller-supplied derivative tables).  Weights on the
    sphere factor of a product space are restricted to constants, so the
    dimension here is always the ambient dimension of the Euclidean factor.
    """

    kind: str
    dimension: int
    value: float = 0.0
    coeff: float = 0.0
    linear: Tuple[float, ...] = ()
    offset: float = 0.0
    table: Optional[_Table] = None

    _KINDS = ("constant", "quadratic", "affine_quadratic", "tabulated")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.dimension < 1:
            raise ValueError("weight dimension must be positive")
        if self.kind == "affine_quadratic" and len(self.linear) != self.dimension:
            raise ValueError("linear term length must equal the dimension")

    @classmethod
    def constant(cls, value: float, dimension: int) -> "WeightFunction":
        return cls(kind="constant", dimension=dimension, value=float(value))

    @classmethod
    def quadratic(cls, coeff: float, dimension: int) -> "WeightFunction":
        """f(x) = coeff * |x|^2, e.g. coeff=1/4 for the Gaussian shrinker weight."""
        return cls(kind="quadratic", dimension=dimension, coeff=float(coeff))

    @classmethod
    def affine_quadratic(cls, coeff: float, linear: Sequence[float], offset: float = 0.0) -> "WeightFunction":
        linear = tuple(float(v) for v in linear)
        return cls(kind="affine_quadratic", dimension=len(linear), coeff=float(coeff),
                   linear=linear, offset=float(offset))

    @classmethod
    def tabulated(cls, axes, values, grads, laps) -> "WeightFunction":
        axes = tuple(tuple(float(v) for v in a) for a in axes)
        table = _Table(axes=axes,
                       values=np.asarray(values, dtype=float).ravel(),
                       grads=np.asarray(grads, dtype=float).reshape(-1, len(axes)),
                       laps=np.asarray(laps, dtype=float).ravel())
        return cls(kind="tabulated", dimension=len(axes), table=table)

    def is_constant(self) -> bool:
        return self.kind == "constant" or (
            self.kind == "quadratic" and self.coeff == 0.0
        ) or (
            self.kind == "affine_quadratic" and self.coeff == 0.0
            and all(v == 0.0 for v in self.linear)
        )

    # Vectorized evaluation over pts of shape (N, d).

    def potential_at(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.kind == "constant":
            return np.full(len(pts), self.value)
        if self.kind == "quadratic":
            return self.coeff * np.sum(pts * pts, axis=1)
        if self.kind == "affine_quadratic":
            return (self.coeff * np.sum(pts * pts, axis=1)
                    + pts @ np.asarray(self.linear) + self.offset)
        idx = self.table.locate(pts)
        return self.table.values[idx]

    def gradient_at(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.kind == "constant":
            return np.zeros_like(pts)
        if self.kind == "quadratic":
            return 2.0 * self.coeff * pts
        if self.kind == "affine_quadratic":
            return 2.0 * self.coeff * pts + np.asarray(self.linear)
        idx = self.table.locate(pts)
        return self.table.grads[idx]

    def laplacian_at(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.kind in ("quadratic", "affine_quadratic"):
            return np.full(len(pts), 2.0 * self.coeff * self.dimension)
        if self.kind == "constant":
            return np.zeros(len(pts))
        idx = self.table.locate(pts)
        return self.table.laps[idx]

    def spec(self) -> dict:
        """JSON-friendly description (used for cache keys and reports)."""
        d = {"kind": self.kind, "dimension": self.dimension}
        if self.kind == "constant":
            d["value"] = self.value
        elif self.kind == "quadratic":
            d["coeff"] = self.coeff
        elif self.kind == "affine_quadratic":
            d.update(coeff=self.coeff, linear=list(self.linear), offset=self.offset)
        else:
            d["table_checksum"] = float(np.sum(self.table.values) + np.sum(self.table.laps))
        return d


@dataclass(frozen=True)
class Domain:
    """A model space: interval, box, flat torus, or product with a round sphere.

    Unbounded factors are always represented by an explicit truncation to an
    interval/box with Dirichlet walls; the truncation length is chosen by the
    caller, never defaulted.
    """

    shape: str
    lo: Tuple[float, ...] = ()
    hi: Tuple[float, ...] = ()
    periods: Tuple[float, ...] = ()
    boundary: str = "dirichlet"
    sphere_dim: int = 0
    sphere_radius: float = 0.0
    euclidean_part: Optional["Domain"] = None

    @classmethod
    def interval(cls, a: float, b: float) -> "Domain":
        if not a < b:
            raise ValueError("interval requires a < b")
        return cls(shape="interval", lo=(float(a),), hi=(float(b),), boundary="dirichlet")

    @classmethod
    def box(cls, lo: Sequence[float], hi: Sequence[float]) -> "Domain":
        lo = tuple(float(v) for v in lo)
        hi = tuple(float(v) for v in hi)
        if len(lo) != len(hi) or not all(a < b for a, b in zip(lo, hi)):
            raise ValueError("box requires lo < hi componentwise")
        return cls(shape="box", lo=lo, hi=hi, boundary="dirichlet")

    @classmethod
    def flat_torus(cls, periods: Sequence[float]) -> "Domain":
        periods = tuple(float(p) for p in periods)
        if not all(p > 0 for p in periods):
            raise ValueError("torus periods must be positive")
        return cls(shape="flat_torus", lo=tuple(0.0 for _ in periods),
                   hi=periods, periods=periods, boundary="periodic")

    @classmethod
    def product_with_sphere(cls, euclidean_part: "Domain", sphere_dim: int,
                            sphere_radius: float) -> "Domain":
        if euclidean_part.shape not in ("interval", "box", "flat_torus"):
            raise ValueError("euclidean factor must be an interval/box/torus")
        if sphere_dim < 1 or sphere_radius <= 0:
            raise ValueError("need sphere_dim >= 1 and sphere_radius > 0")
        return cls(shape="product_with_sphere", boundary="closed_product",
                   sphere_dim=int(sphere_dim), sphere_radius=float(sphere_radius),
                   euclidean_part=euclidean_part)

    @property
    def euclidean_dimension(self) -> int:
        if self.shape == "product_with_sphere":
            return self.euclidean_part.euclidean_dimension
        return len(self.lo)

    @property
    def dimension(self) -> int:
        if self.shape == "product_with_sphere":
            return self.euclidean_part.dimension + self.sphere_dim
        return len(self.lo)

    @property
    def extents(self) -> Tuple[float, ...]:
        return tuple(b - a for a, b in zip(self.lo, self.hi))

    def spec(self) -> dict:
        if self.shape == "product_with_sphere":
            return {"shape": self.shape, "euclidean_part": self.euclidean_part.spec(),
                    "sphere_dim": self.sphere_dim, "sphere_radius": self.sphere_radius}
        return {"shape": self.shape, "lo": list(self.lo), "hi": list(self.hi),
                "boundary": self.boundary}

    def min_position_sq(self) -> float:
        """Exact min of |x|^2 over the closure (used by the Gaussian gap bound)."""
        if self.shape == "product_with_sphere":
            raise ValueError("min |x|^2 is only defined for flat domains here")
        total = 0.0
        for a, b in zip(self.lo, self.hi):
            if a <= 0.0 <= b:
                continue
            total += min(a * a, b * b)
        return total


@dataclass(frozen=True)
class GeometrySpec:
    """Geometric constants of the reference isometric immersion.

    For a flat domain under the identity embedding everything is zero except
    the dimensions.  Curved catalog members (spheres, tori seen as products
    of circles) carry their curvature data explicitly.
    """

    n: int
    p: int = 0
    mean_curv_sq_max: float = 0.0            # max of n^2 H^2
    pos_vec_sq_range: Tuple[float, float] = (0.0, 0.0)
    scalar_curv_min: float = 0.0
    soliton_rho: float = 0.0

    def __post_init__(self):
        if self.mean_curv_sq_max < 0:
            raise ValueError("mean_curv_sq_max must be >= 0")
        lo, hi = self.pos_vec_sq_range
        if lo < 0 or lo > hi:
            raise ValueError("pos_vec_sq_range must satisfy 0 <= min <= max")

    @classmethod
    def flat(cls, n: int) -> "GeometrySpec":
        return cls(n=n)


@dataclass(frozen=True)
class DriftData:
    grad_f: Tuple[float, ...]
    lap_f: float
    grad_f_sq: float
    drift_lap_f: float


def _point(x) -> np.ndarray:
    pt = np.atleast_1d(np.asarray(x, dtype=float))
    return pt.reshape(1, -1)


def eval_potential(f: WeightFunction, x) -> float:
    """Value of the potential f at a point."""
    return float(f.potential_at(_point(x))[0])


def drift_quantities(f: WeightFunction, x) -> DriftData:
    """Gradient, Laplacian, |grad f|^2 and the drift Laplacian of f itself.

    The drift Laplacian of f is lap_f - grad_f_sq exactly, since
    Delta_f u = Delta u - <grad f, grad u>.
    """
    pt = _point(x)
    grad = f.gradient_at(pt)[0]
    lap = float(f.laplacian_at(pt)[0])
    gsq = float(np.dot(grad, grad))
    return DriftData(grad_f=tuple(grad), lap_f=lap, grad_f_sq=gsq,
                     drift_lap_f=lap - gsq)


def schrodinger_potential(f: WeightFunction, x) -> float:
    """Potential V of the unitarily equivalent Schrodinger operator.

    Conjugating -Delta_f by e^{-f/2} gives -Delta + V with
    V = |grad f|^2 / 4 - (Delta f) / 2.
    """
    d = drift_quantities(f, x)
    return 0.25 * d.grad_f_sq - 0.5 * d.lap_f


def schrodinger_potential_at(f: WeightFunction, pts: np.ndarray) -> np.ndarray:
    """Vectorized form of :func:`schrodinger_potential` over (N, d) points."""
    grad = f.gradient_at(pts)
    gsq = np.sum(grad * grad, axis=1)
    return 0.25 * gsq - 0.5 * f.laplacian_at(pts)


def _quadrature_points(domain: Domain, resolution) -> Tuple[np.ndarray, float]:
    dim = len(domain.lo)
    if np.isscalar(resolution):
        resolution = (int(resolution),) * dim
    resolution = tuple(int(r) for r in resolution)
    if len(resolution) != dim:
        raise ValueError("quadrature resolution does not match the dimension")
    if any(r < 8 for r in resolution):
        raise ValueError("quadrature needs at least 8 points per axis")
    axes = []
    cell = 1.0
    for a, (lo, hi, r) in enumerate(zip(domain.lo, domain.hi, resolution)):
        h = (hi - lo) / r
        axes.append(lo + h * (np.arange(r) + 0.5))
        cell *= h
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    return pts, cell


def weighted_mean_of_f(domain: Domain, f: WeightFunction, resolution=256) -> float:
    """Mean of f against the measure e^{-f} dv, by midpoint quadrature.

    Midpoint rule on a uniform grid is second order, which is enough for a
    constant that only enters inequalities with slack.  For a product with a
    sphere the weight is constant on the sphere factor, so the sphere volume
    cancels and the mean reduces to the Euclidean factor.
    """
    if domain.shape == "product_with_sphere":
        return weighted_mean_of_f(domain.euclidean_part, f, resolution)
    if domain.shape not in ("interval", "box", "flat_torus"):
        raise ValueError(f"unsupported domain for quadrature: {domain.shape}")
    pts, _cell = _quadrature_points(domain, resolution)
    fv = f.potential_at(pts)
    # Stabilize the exponential; the shift cancels in the ratio.
    w = np.exp(-(fv - np.min(fv)))
    return float(np.sum(fv * w) / np.sum(w))
