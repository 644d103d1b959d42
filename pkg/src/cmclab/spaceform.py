"""Simply connected 3-dimensional space forms in their standard embeddings.

Points of the flat model are 3-vectors. For ``c > 0`` a point lives on the
sphere of radius ``1/sqrt(c)`` in R^4, for ``c < 0`` on the upper sheet of the
hyperboloid ``<x, x> = -1/|c|`` in Minkowski space R^{1,3}.  Tangent vectors
are plain arrays whose base point is implied by context.

All functions broadcast over leading axes; the last axis holds coordinates.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import AntipodalPoints, DegenerateBase, OutOfDomain

EUCLIDEAN = "euclidean"
SPHERE = "sphere"
HYPERBOLIC = "hyperbolic"

MODEL_TOL = 1e-12


@dataclass(frozen=True)
class SpaceForm:
    """Ambient model of constant sectional curvature ``c``."""

    c: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "c", float(self.c))

    @property
    def model(self):
        if self.c > 0:
            return SPHERE
        if self.c < 0:
            return HYPERBOLIC
        return EUCLIDEAN

    @property
    def k(self):
        return math.sqrt(abs(self.c))

    @property
    def dim(self):
        return 3 if self.c == 0 else 4

    @property
    def metric(self):
        if self.c < 0:
            return np.array([-1.0, 1.0, 1.0, 1.0])
        return np.ones(self.dim)

    @property
    def origin(self):
        """Base point used as ball centre: the origin, or the pole ``e0/k``."""
        p = np.zeros(self.dim)
        if self.c != 0:
            p[0] = 1.0 / self.k
        return p

    @property
    def r_max(self):
        """Upper bound on distances where the comparison function is defined."""
        return math.pi / (2.0 * self.k) if self.c > 0 else math.inf

    # generalized trigonometry: sn'' = -c sn, cs = sn'
    def sn(self, t):
        if self.c > 0:
            return np.sin(self.k * t) / self.k
        if self.c < 0:
            return np.sinh(self.k * t) / self.k
        return t * 1.0

    def cs(self, t):
        if self.c > 0:
            return np.cos(self.k * t)
        if self.c < 0:
            return np.cosh(self.k * t)
        return np.ones_like(t) * 1.0

    def ct(self, t):
        return self.cs(t) / self.sn(t)

    def inner(self, a, b):
        return np.sum(self.metric * np.asarray(a) * np.asarray(b), axis=-1)

    def norm(self, v):
        return np.sqrt(np.maximum(self.inner(v, v), 0.0))

    def constraint_error(self, x):
        """Deviation of ``x`` from the model (0 for the flat model)."""
        x = np.asarray(x, dtype=float)
        if self.c == 0:
            return np.zeros(x.shape[:-1])
        return np.abs(self.inner(x, x) - 1.0 / self.c)

    def contains(self, x, tol=MODEL_TOL):
        x = np.asarray(x, dtype=float)
        ok = np.all(self.constraint_error(x) <= tol * max(1.0, 1.0 / abs(self.c or 1.0)))
        if self.c < 0:
            ok = ok and bool(np.all(x[..., 0] > 0))
        return bool(ok)

    def project(self, x):
        """Renormalize ``x`` onto the model."""
        x = np.asarray(x, dtype=float)
        if self.c == 0:
            return x
        if self.c > 0:
            return x / (self.k * np.linalg.norm(x, axis=-1, keepdims=True))
        q = -self.inner(x, x)[..., None]
        y = x / (self.k * np.sqrt(q))
        return y * np.sign(y[..., :1])

    def tangent_part(self, x, v):
        """Component of the ambient vector ``v`` tangent to the model at ``x``."""
        v = np.asarray(v, dtype=float)
        if self.c == 0:
            return v
        x = np.asarray(x, dtype=float)
        return v - (self.inner(v, x) * self.c)[..., None] * x


def distance(sf, p, q):
    """Geodesic distance between points of ``sf``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    d = q - p
    if sf.c == 0:
        return np.linalg.norm(d, axis=-1)
    k = sf.k
    if sf.c > 0:
        if np.any(np.linalg.norm(p + q, axis=-1) * k < 1e-12):
            raise AntipodalPoints("antipodal points on the sphere")
        chord = np.linalg.norm(d, axis=-1)
        return 2.0 / k * np.arcsin(np.minimum(1.0, 0.5 * k * chord))
    m = np.maximum(sf.inner(d, d), 0.0)
    return 2.0 / k * np.arcsinh(0.5 * k * np.sqrt(m))


def _grad_r_raw(sf, p, x):
    if sf.c == 0:
        return np.asarray(x, dtype=float) - np.asarray(p, dtype=float)
    return -sf.tangent_part(x, p)


def grad_r(sf, p, x):
    """Unit gradient at ``x`` of the distance from ``p``."""
    p = np.asarray(p, dtype=float)
    x = np.asarray(x, dtype=float)
    if sf.c > 0 and np.any(np.linalg.norm(p + x, axis=-1) * sf.k < 1e-12):
        raise AntipodalPoints("gradient of r is undefined at the antipode")
    w = _grad_r_raw(sf, p, x)
    n = sf.norm(w)
    scale = 1.0 if sf.c == 0 else 1.0 / sf.k
    if np.any(n <= 1e-14 * scale):
        raise DegenerateBase("x coincides with the base point")
    return w / n[..., None]


def f_eval(sf, r):
    """Comparison function ``f(r)`` and its first two derivatives."""
    r = np.asarray(r, dtype=float)
    if sf.c == 0:
        return 0.5 * r * r, r * 1.0, np.ones_like(r)
    k = sf.k
    if sf.c < 0:
        ch = np.cosh(k * r)
        return ch, k * np.sinh(k * r), k * k * ch
    if np.any(r >= sf.r_max):
        raise OutOfDomain(f"r must stay below pi/(2 sqrt(c)) = {sf.r_max:.6g}")
    co = np.cos(k * r)
    return co, -k * np.sin(k * r), -k * k * co


def geodesic(sf, base, direction, t):
    """Point and velocity at time ``t`` of the unit-speed geodesic."""
    base = np.asarray(base, dtype=float)
    direction = np.asarray(direction, dtype=float)
    if sf.c == 0:
        return base + t * direction, direction.copy()
    k = sf.k
    if sf.c > 0:
        co, si = math.cos(k * t), math.sin(k * t)
        point = co * base + (si / k) * direction
        vel = -k * si * base + co * direction
    else:
        co, si = math.cosh(k * t), math.sinh(k * t)
        point = co * base + (si / k) * direction
        vel = k * si * base + co * direction
    point = sf.project(point)
    vel = sf.tangent_part(point, vel)
    return point, vel / sf.norm(vel)


def exp_map(sf, base, direction, t=1.0):
    """``exp_base(t * direction)`` for a unit ``direction``."""
    return geodesic(sf, base, direction, t)[0]
