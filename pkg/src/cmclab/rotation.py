"""Rotation surfaces in space forms.

A rotation surface is generated by a meridian lying in the totally geodesic
half-plane ``theta = 0`` that contains the rotation axis.  Inside that plane
we use geodesic polar-type coordinates ``(rho, h)``: ``rho`` is the signed
distance to the axis and ``h`` the arclength of the foot point along the axis,
measured from the centre ``p = sf.origin``.  The plane ``h = 0`` is the
totally geodesic plane P through ``p`` orthogonal to the axis.

The meridian is unit speed with turning angle ``phi`` measured from the
``rho`` direction::

    rho' = cos(phi)
    h'   = sin(phi) / cs(rho)
    phi' = mu(s) + c * tn(rho) * sin(phi)

and the surface normal is ``nu = -sin(phi) e_rho + cos(phi) e_h``.  With this
normal the parallel circles have principal curvature
``lambda = ct(rho) * sin(phi)`` and the meridian has principal curvature ``mu``.
"""

from dataclasses import dataclass, field
import csv
import math

import numpy as np
from scipy import linalg

from .errors import (
    AxisCollision,
    DegenerateMetric,
    DomainViolation,
    InconsistentMeanCurvature,
    NonPositiveU,
    OutOfDomain,
)
from .spaceform import SpaceForm, _grad_r_raw, distance, f_eval

# --------------------------------------------------------------------------
# pointwise curvature algebra


def principal_from_u(u, a, H):
    """Principal curvatures ``(lambda, mu)`` from ``u = |lambda - H|^-1``."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise NonPositiveU("u must be positive")
    lam = H + a / u
    return lam, 2.0 * H - lam


def phi_norm_sq(lambda1, lambda2, H):
    """Squared norm of the traceless second fundamental form of a surface."""
    lambda1 = np.asarray(lambda1, dtype=float)
    lambda2 = np.asarray(lambda2, dtype=float)
    scale = np.maximum(1.0, np.maximum(np.abs(lambda1), np.abs(lambda2)))
    if np.any(np.abs(0.5 * (lambda1 + lambda2) - H) > 1e-10 * scale):
        raise InconsistentMeanCurvature("H differs from the mean of the principal curvatures")
    return (lambda1 - H) ** 2 + (lambda2 - H) ** 2


def gauss_product(H, phi_sq):
    """``lambda1 * lambda2`` recovered from ``H`` and ``|Phi|^2``."""
    return H * H - 0.5 * phi_sq


# --------------------------------------------------------------------------
# embedding of the (rho, h, theta) coordinates


def embed(sf, rho, h, theta):
    """Ambient coordinates of the point with coordinates ``(rho, h, theta)``."""
    rho, h, theta = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (rho, h, theta)))
    ct, st = np.cos(theta), np.sin(theta)
    if sf.c == 0:
        return np.stack([rho * ct, rho * st, h], axis=-1)
    k = sf.k
    if sf.c > 0:
        a, b = np.cos(k * rho), np.sin(k * rho)
        ch, sh = np.cos(k * h), np.sin(k * h)
    else:
        a, b = np.cosh(k * rho), np.sinh(k * rho)
        ch, sh = np.cosh(k * h), np.sinh(k * h)
    return np.stack([a * ch, b * ct, b * st, a * sh], axis=-1) / k


def frame(sf, rho, h, theta):
    """Orthonormal ambient vectors ``(e_rho, e_h, e_theta)`` at a point."""
    rho, h, theta = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (rho, h, theta)))
    ct, st = np.cos(theta), np.sin(theta)
    zero = np.zeros_like(rho)
    one = np.ones_like(rho)
    if sf.c == 0:
        e_rho = np.stack([ct, st, zero], axis=-1)
        e_h = np.stack([zero, zero, one], axis=-1)
        e_theta = np.stack([-st, ct, zero], axis=-1)
        return e_rho, e_h, e_theta
    k = sf.k
    if sf.c > 0:
        a, b = np.cos(k * rho), np.sin(k * rho)
        ch, sh = np.cos(k * h), np.sin(k * h)
        e_rho = np.stack([-b * ch, a * ct, a * st, -b * sh], axis=-1)
        e_h = np.stack([-sh, zero, zero, ch], axis=-1)
    else:
        a, b = np.cosh(k * rho), np.sinh(k * rho)
        ch, sh = np.cosh(k * h), np.sinh(k * h)
        e_rho = np.stack([b * ch, a * ct, a * st, b * sh], axis=-1)
        e_h = np.stack([sh, zero, zero, ch], axis=-1)
    e_theta = np.stack([zero, -st, ct, zero], axis=-1)
    return e_rho, e_h, e_theta


def unit_normal(sf, rho, h, phi, theta):
    e_rho, e_h, _ = frame(sf, rho, h, theta)
    phi = np.asarray(phi, dtype=float)[..., None]
    return -np.sin(phi) * e_rho + np.cos(phi) * e_h


def axis_distance_for_curvature(sf, lam):
    """Signed ``rho`` of a parallel circle with curvature ``lam`` where the
    meridian is orthogonal to P, i.e. the solution of ``ct(rho) = lam``."""
    if sf.c > 0:
        if lam == 0:
            raise OutOfDomain("lambda = 0 puts the circle on the polar great circle")
        return math.atan2(1.0, lam / sf.k) / sf.k if lam > 0 else -math.atan2(1.0, -lam / sf.k) / sf.k
    if lam == 0 or (sf.c < 0 and abs(lam) <= sf.k):
        raise OutOfDomain(f"no geodesic circle has curvature {lam:.6g} in c={sf.c:g}")
    if sf.c == 0:
        return 1.0 / lam
    return math.copysign(math.atanh(sf.k / abs(lam)) / sf.k, lam)


def radial_from_origin(sf, rho, h, phi):
    """Distance from the centre ``p = axis ∩ P`` and ``<nu, grad r>``,
    computed in ``(rho, h)`` coordinates.

    Avoids the cancellation of ambient Minkowski products far from ``p``;
    ``<nu, grad r>`` is 0 where ``r = 0``.
    """
    rho, h, phi = (np.asarray(x, dtype=float) for x in (rho, h, phi))
    if sf.c == 0:
        r = np.hypot(rho, h)
    else:
        k = sf.k
        if sf.c < 0:
            half = np.sinh(0.5 * k * rho) ** 2 * np.cosh(k * h) + np.sinh(0.5 * k * h) ** 2
            r = 2.0 / k * np.arcsinh(np.sqrt(half))
        else:
            half = np.sin(0.5 * k * rho) ** 2 * np.cos(k * h) + np.sin(0.5 * k * h) ** 2
            r = 2.0 / k * np.arcsin(np.sqrt(np.clip(half, 0.0, 1.0)))
    num = -np.sin(phi) * sf.sn(rho) * sf.cs(h) + np.cos(phi) * sf.sn(h)
    den = sf.sn(r)
    safe = den > 0
    return r, np.where(safe, num / np.where(safe, den, 1.0), 0.0)


# --------------------------------------------------------------------------
# meridian reconstruction


@dataclass(frozen=True)
class MeridianStart:
    """Initial point and heading of a meridian."""

    rho: float
    h: float = 0.0
    phi: float = math.pi / 2


def _rhs_factory(sf):
    c, k = sf.c, sf.k
    if c > 0:
        def rhs(rho, phi, mu):
            sp = math.sin(phi)
            return math.cos(phi), sp / math.cos(k * rho), mu + k * math.tan(k * rho) * sp
    elif c < 0:
        def rhs(rho, phi, mu):
            sp = math.sin(phi)
            return math.cos(phi), sp / math.cosh(k * rho), mu - k * math.tanh(k * rho) * sp
    else:
        def rhs(rho, phi, mu):
            return math.cos(phi), math.sin(phi), mu
    return rhs


def _rk4_step(rhs, mu, s, rho, h, phi, d):
    m1 = mu(s)
    m2 = mu(s + 0.5 * d)
    m4 = mu(s + d)
    a1, b1, c1 = rhs(rho, phi, m1)
    a2, b2, c2 = rhs(rho + 0.5 * d * a1, phi + 0.5 * d * c1, m2)
    a3, b3, c3 = rhs(rho + 0.5 * d * a2, phi + 0.5 * d * c2, m2)
    a4, b4, c4 = rhs(rho + d * a3, phi + d * c3, m4)
    w = d / 6.0
    return (
        rho + w * (a1 + 2 * a2 + 2 * a3 + a4),
        h + w * (b1 + 2 * b2 + 2 * b3 + b4),
        phi + w * (c1 + 2 * c2 + 2 * c3 + c4),
    )


def _integrate(sf, mu, start, ds, n, monitor=None, chunk=256):
    """Fixed-step RK4 over ``n`` steps; ``monitor`` may stop it early."""
    rhs = _rhs_factory(sf)
    half_pi = math.pi / 2
    kk = sf.k
    s_arr = [0.0]
    rho_arr = [start.rho]
    h_arr = [start.h]
    phi_arr = [start.phi]
    on_axis = abs(start.rho) < 1e-14
    side = 0.0 if on_axis else math.copysign(1.0, start.rho)
    rho, h, phi = start.rho, start.h, start.phi
    for i in range(1, n + 1):
        s = (i - 1) * ds
        rho, h, phi = _rk4_step(rhs, mu, s, rho, h, phi, ds)
        if not math.isfinite(rho + h + phi):
            raise OutOfDomain(f"meridian integration diverged at s={i * ds:.6g}")
        if side == 0.0:
            side = math.copysign(1.0, rho)
        elif rho * side <= 0:
            raise AxisCollision(f"meridian reached the rotation axis at s={i * ds:.6g}")
        if sf.c > 0 and abs(kk * rho) >= half_pi:
            raise OutOfDomain(f"meridian left the hemisphere chart at s={i * ds:.6g}")
        s_arr.append(i * ds)
        rho_arr.append(rho)
        h_arr.append(h)
        phi_arr.append(phi)
        if monitor is not None and (i % chunk == 0 or i == n):
            lo = max(0, len(s_arr) - chunk - 1)
            if monitor(np.array(s_arr[lo:]), np.array(rho_arr[lo:]), np.array(h_arr[lo:]), np.array(phi_arr[lo:])):
                break
    return np.array(s_arr), np.array(rho_arr), np.array(h_arr), np.array(phi_arr)


@dataclass(frozen=True, eq=False)
class MeridianProfile:
    """Arclength-sampled meridian with its principal curvatures.

    ``lam`` is the principal curvature along the parallels and ``mu`` along
    the meridian, both with respect to the normal described in the module
    docstring.  Profiles built by :func:`reconstruct_meridian` start at
    ``s = 0``; :meth:`mirror` extends them by reflection through P.
    """

    sf: SpaceForm
    s: np.ndarray
    rho: np.ndarray
    h: np.ndarray
    phi: np.ndarray
    lam: np.ndarray
    mu: np.ndarray
    H: float
    lam_fn: object = field(repr=False)
    mu_fn: object = field(repr=False)
    ds: float = 1e-3
    mirrored: bool = False

    @property
    def s_min(self):
        return float(self.s[0])

    @property
    def s_max(self):
        return float(self.s[-1])

    @property
    def starts_on_axis(self):
        i0 = int(np.argmin(np.abs(self.s)))
        return abs(self.rho[i0]) < 1e-12

    def _base_index(self):
        return int(np.argmin(np.abs(self.s)))

    def state_at(self, s):
        """``(rho, h, phi)`` at arbitrary ``s`` in the profile's range."""
        s = float(s)
        if self.mirrored and s < 0:
            rho, h, phi = self.state_at(-s)
            return rho, -h, math.pi - phi
        i0 = self._base_index()
        i = i0 + int(round(s / self.ds))
        i = min(max(i, i0), len(self.s) - 1)
        d = s - float(self.s[i])
        if d == 0.0:
            return float(self.rho[i]), float(self.h[i]), float(self.phi[i])
        return _rk4_step(_rhs_factory(self.sf), self.mu_fn, float(self.s[i]),
                         float(self.rho[i]), float(self.h[i]), float(self.phi[i]), d)

    def states(self, s_values):
        out = np.array([self.state_at(s) for s in np.asarray(s_values, dtype=float).ravel()])
        return out[:, 0], out[:, 1], out[:, 2]

    def curvatures_at(self, s_values):
        s_values = np.asarray(s_values, dtype=float)
        lam = np.array([self.lam_fn(abs(x) if self.mirrored else x) for x in s_values.ravel()])
        mu = np.array([self.mu_fn(abs(x) if self.mirrored else x) for x in s_values.ravel()])
        return lam.reshape(s_values.shape), mu.reshape(s_values.shape)

    def lambda_from_frame(self):
        """Parallel curvature recomputed from the frame: ``ct(rho) sin(phi)``."""
        with np.errstate(divide="ignore", invalid="ignore"):
            lam = self.sf.ct(self.rho) * np.sin(self.phi)
        return np.where(np.abs(self.rho) < 1e-12, np.nan, lam)

    def mu_from_frame(self):
        """Meridian curvature from second-order differences of ``phi``."""
        dphi = np.gradient(self.phi, self.s, edge_order=2)
        if self.sf.c == 0:
            return dphi
        tn = self.sf.sn(self.rho) / self.sf.cs(self.rho)
        return dphi - self.sf.c * tn * np.sin(self.phi)

    def mirror(self):
        """Symmetric extension to ``[-s_max, s_max]`` by reflection through P."""
        if self.mirrored or self.s[0] != 0.0:
            raise ValueError("only profiles starting at s = 0 can be mirrored")
        lam_fn, mu_fn = self.lam_fn, self.mu_fn
        r = slice(None, 0, -1)
        return MeridianProfile(
            sf=self.sf,
            s=np.concatenate([-self.s[r], self.s]),
            rho=np.concatenate([self.rho[r], self.rho]),
            h=np.concatenate([-self.h[r], self.h]),
            phi=np.concatenate([math.pi - self.phi[r], self.phi]),
            lam=np.concatenate([self.lam[r], self.lam]),
            mu=np.concatenate([self.mu[r], self.mu]),
            H=self.H,
            lam_fn=lam_fn,
            mu_fn=mu_fn,
            ds=self.ds,
            mirrored=True,
        )

    def resample(self, n):
        """Same meridian on a uniform grid of ``n`` intervals per half."""
        base_max = self.s_max
        fresh = reconstruct_meridian(
            self.sf, self.lam_fn, self.mu_fn, base_max, base_max / n,
            start=MeridianStart(*self.state_at(0.0)),
        )
        return fresh.mirror() if self.mirrored else fresh


def reconstruct_meridian(sf, lam, mu, s_max, ds=1e-3, start=None, monitor=None):
    """Integrate the meridian whose rotation surface has principal curvatures
    ``lam(s)`` (parallels) and ``mu(s)`` (meridian).

    By default the meridian starts on P, orthogonal to it, at the axis
    distance whose parallel curvature is ``lam(0)``.  ``monitor`` receives
    chunks ``(s, rho, h, phi)`` and stops the integration by returning True.
    """
    if s_max <= 0 or ds <= 0:
        raise ValueError("s_max and ds must be positive")
    H = 0.5 * (lam(0.0) + mu(0.0))
    if start is None:
        start = MeridianStart(axis_distance_for_curvature(sf, lam(0.0)))
    n = max(1, int(math.ceil(s_max / ds - 1e-9)))
    step = s_max / n
    s, rho, h, phi = _integrate(sf, mu, start, step, n, monitor=monitor)
    lam_arr = np.array([lam(x) for x in s])
    mu_arr = np.array([mu(x) for x in s])
    scale = np.maximum(1.0, np.abs(lam_arr))
    if np.any(np.abs(lam_arr + mu_arr - 2 * H) > 1e-8 * scale):
        raise InconsistentMeanCurvature("lam + mu is not constant")
    return MeridianProfile(sf, s, rho, h, phi, lam_arr, mu_arr, H, lam, mu, ds=step)


# --------------------------------------------------------------------------
# surfaces, samples, meshes


@dataclass(frozen=True, eq=False)
class RotationSurface:
    profile: MeridianProfile

    @property
    def sf(self):
        return self.profile.sf

    @property
    def axis(self):
        """Base point and unit direction of the rotation axis."""
        d = np.zeros(self.sf.dim)
        d[-1] = 1.0
        return self.sf.origin, d

    def patch(self, s, theta):
        rho, h, _ = self.profile.state_at(s)
        return embed(self.sf, rho, h, theta)

    def normal_at(self, s, theta):
        rho, h, phi = self.profile.state_at(s)
        return unit_normal(self.sf, rho, h, phi, theta)

    def parallel_radius(self, s):
        rho, _, _ = self.profile.state_at(s)
        return abs(float(self.sf.sn(rho)))

    def grid(self, n_s, n_theta):
        s = np.linspace(self.profile.s_min, self.profile.s_max, n_s)
        theta = np.arange(n_theta) * (2 * math.pi / n_theta)
        rho, h, phi = self.profile.states(s)
        return s, theta, rho, h, phi


@dataclass(frozen=True, eq=False)
class SurfaceSample:
    s: float
    theta: float
    pos: np.ndarray
    nu: np.ndarray
    r: float
    grad_nu_f: float
    lambda1: float
    lambda2: float
    H: float
    phi_sq: float
    K: float
    index: tuple = (0, 0)


def sample(surface, center=None, n_s=101, n_theta=32, strict=True, s_values=None, theta_values=None):
    """Grid of fully populated samples, row-major in ``(s, theta)``.

    ``s_values`` / ``theta_values`` replace the uniform grid in that
    direction (the matching count is then ignored).

    For ``c > 0`` every sample must satisfy ``r < pi/(2 sqrt(c))``; with
    ``strict`` a violation raises :class:`DomainViolation`, otherwise
    ``grad_nu_f`` is NaN there.
    """
    sf = surface.sf
    center = sf.origin if center is None else np.asarray(center, dtype=float)
    s, theta, rho, h, phi = surface.grid(n_s, n_theta)
    if s_values is not None:
        s = np.asarray(s_values, dtype=float)
        rho, h, phi = surface.profile.states(s)
    if theta_values is not None:
        theta = np.asarray(theta_values, dtype=float)
    n_s, n_theta = len(s), len(theta)
    lam, mu = surface.profile.curvatures_at(s)
    S, T = np.meshgrid(np.arange(n_s), np.arange(n_theta), indexing="ij")
    pos = embed(sf, rho[S], h[S], theta[T])
    nu = unit_normal(sf, rho[S], h[S], phi[S], theta[T])
    on_axis_centre = np.array_equal(center, sf.origin)
    if on_axis_centre:
        r_row, cos_row = radial_from_origin(sf, rho, h, phi)
        r = np.repeat(r_row[:, None], n_theta, axis=1)
    else:
        r = distance(sf, center, pos)
    inside = r < sf.r_max
    if strict and not np.all(inside):
        i, j = np.argwhere(~inside)[0]
        raise DomainViolation(
            f"sample at s={s[i]:.6g} has r={r[i, j]:.6g} >= {sf.r_max:.6g}",
            sample=(float(s[i]), float(theta[j]), float(r[i, j])),
        )
    if on_axis_centre:
        cos_angle = np.repeat(cos_row[:, None], n_theta, axis=1)
    else:
        w = _grad_r_raw(sf, center, pos)
        wn = sf.norm(w)
        safe = wn > 1e-14
        cos_angle = np.where(safe, sf.inner(nu, w) / np.where(safe, wn, 1.0), 0.0)
    _, fp, _ = f_eval(sf, np.where(inside, r, 0.0))
    g = np.where(inside, fp * cos_angle, np.nan)
    H = surface.profile.H
    out = []
    for i in range(n_s):
        l1, l2 = float(lam[i]), float(mu[i])
        psq = float(phi_norm_sq(l1, l2, H))
        K = sf.c + l1 * l2
        for j in range(n_theta):
            out.append(SurfaceSample(
                s=float(s[i]), theta=float(theta[j]), pos=pos[i, j], nu=nu[i, j],
                r=float(r[i, j]), grad_nu_f=float(g[i, j]), lambda1=l1, lambda2=l2,
                H=H, phi_sq=psq, K=K, index=(i, j),
            ))
    return out


SAMPLE_HEADER = ["s", "theta", "r", "lambda1", "lambda2", "H", "phi_sq", "K", "grad_nu_f"]


def fmt(x):
    return format(float(x), ".17g")


def write_samples_csv(samples, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SAMPLE_HEADER)
        for p in samples:
            w.writerow([fmt(getattr(p, name)) for name in SAMPLE_HEADER])


@dataclass(eq=False)
class TriMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    normals: np.ndarray = None
    fields: dict = field(default_factory=dict)
    sf: SpaceForm = field(default_factory=SpaceForm)

    def triangle_areas(self):
        v = self.vertices[self.triangles]
        a = v[:, 1] - v[:, 0]
        b = v[:, 2] - v[:, 0]
        aa = np.sum(a * a, axis=1)
        bb = np.sum(b * b, axis=1)
        ab = np.sum(a * b, axis=1)
        return 0.5 * np.sqrt(np.maximum(aa * bb - ab * ab, 0.0))

    def area(self):
        return float(np.sum(self.triangle_areas()))

    def to_obj(self, path, chart="auto"):
        xyz = chart_coords(self.sf, self.vertices, chart)
        with open(path, "w") as fh:
            fh.write(f"# cmclab mesh c={self.sf.c!r} chart={chart}\n")
            for p in xyz:
                fh.write("v {} {} {}\n".format(*(fmt(x) for x in p)))
            has_normals = self.normals is not None and self.sf.c == 0
            if has_normals:
                for n in self.normals:
                    fh.write("vn {} {} {}\n".format(*(fmt(x) for x in n)))
            for t in self.triangles + 1:
                if has_normals:
                    fh.write("f {0}//{0} {1}//{1} {2}//{2}\n".format(*t))
                else:
                    fh.write("f {} {} {}\n".format(*t))


def chart_coords(sf, x, chart="auto"):
    """3-D coordinates for export: identity, gnomonic (c>0) or Klein (c<0).

    Both curved charts are scaled by ``1/k`` so they agree with the ambient
    geometry to first order at the centre.
    """
    x = np.asarray(x, dtype=float)
    if sf.c == 0:
        if chart not in ("auto", "identity"):
            raise ValueError(f"chart {chart!r} does not apply to the flat model")
        return x
    expected = "gnomonic" if sf.c > 0 else "klein"
    if chart not in ("auto", expected):
        raise ValueError(f"chart {chart!r} does not apply to c={sf.c:g}; use {expected!r}")
    if sf.c > 0 and np.any(x[:, 0] <= 0):
        raise OutOfDomain("gnomonic chart needs points in the open hemisphere around the centre")
    return x[:, 1:] / (sf.k * x[:, :1])


def mesh(surface, n_s, n_theta):
    """Triangulate ``n_s`` parallels of ``n_theta`` vertices each.

    Vertex ``i * n_theta + j`` sits on parallel ``i`` at angle ``j``; the
    angular seam is closed by index wrap-around.  Zero-area triangles (at a
    pole on the axis) are dropped.
    """
    if n_s < 2 or n_theta < 3:
        raise ValueError("need n_s >= 2 and n_theta >= 3")
    sf = surface.sf
    s, theta, rho, h, phi = surface.grid(n_s, n_theta)
    S, T = np.meshgrid(np.arange(n_s), np.arange(n_theta), indexing="ij")
    verts = embed(sf, rho[S], h[S], theta[T]).reshape(-1, sf.dim)
    normals = unit_normal(sf, rho[S], h[S], phi[S], theta[T]).reshape(-1, sf.dim)
    i, j = np.meshgrid(np.arange(n_s - 1), np.arange(n_theta), indexing="ij")
    v00 = (i * n_theta + j).ravel()
    v01 = (i * n_theta + (j + 1) % n_theta).ravel()
    v10 = v00 + n_theta
    v11 = v01 + n_theta
    tris = np.concatenate([np.stack([v00, v10, v11], 1), np.stack([v00, v11, v01], 1)])
    m = TriMesh(verts, tris, normals, sf=sf)
    m.triangles = tris[m.triangle_areas() > 1e-14]
    m.fields["s"] = np.repeat(s, n_theta)
    return m


# --------------------------------------------------------------------------
# finite-difference oracle


def _normal_4d(sf, x, xu, xv):
    m = np.stack([x, xu, xv])
    n = np.array([(-1) ** i * np.linalg.det(np.delete(m, i, axis=1)) for i in range(4)])
    return sf.metric * n


def second_fundamental_form_fd(sf, patch, u, v, h=1e-5, h2=1e-4, orient=None):
    """Principal curvatures of ``patch(u, v)`` from central differences.

    First derivatives use step ``h``, second derivatives ``h2``.  ``orient``
    is an ambient vector; the normal is flipped to have positive inner
    product with it.  Returns ``(lambda1, lambda2, H, phi_sq)`` with
    ``lambda1 >= lambda2``.
    """
    X = lambda a, b: np.asarray(patch(a, b), dtype=float)
    x0 = X(u, v)
    xu = (X(u + h, v) - X(u - h, v)) / (2 * h)
    xv = (X(u, v + h) - X(u, v - h)) / (2 * h)
    xuu = (X(u + h2, v) - 2 * x0 + X(u - h2, v)) / h2**2
    xvv = (X(u, v + h2) - 2 * x0 + X(u, v - h2)) / h2**2
    xuv = (X(u + h2, v + h2) - X(u + h2, v - h2) - X(u - h2, v + h2) + X(u - h2, v - h2)) / (4 * h2**2)
    I = np.array([[sf.inner(xu, xu), sf.inner(xu, xv)], [sf.inner(xu, xv), sf.inner(xv, xv)]])
    if np.linalg.det(I) < 1e-12:
        raise DegenerateMetric("first fundamental form is degenerate")
    if sf.c == 0:
        n = np.cross(xu, xv)
    else:
        n = _normal_4d(sf, x0, xu, xv)
    n = n / sf.norm(n)
    if orient is not None and sf.inner(n, orient) < 0:
        n = -n
    II = np.array([[sf.inner(xuu, n), sf.inner(xuv, n)], [sf.inner(xuv, n), sf.inner(xvv, n)]])
    lam = linalg.eigh(II, I, eigvals_only=True)
    l1, l2 = float(lam[1]), float(lam[0])
    H = 0.5 * (l1 + l2)
    return l1, l2, H, (l1 - H) ** 2 + (l2 - H) ** 2
