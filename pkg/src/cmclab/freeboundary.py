"""Free boundary pieces in geodesic balls.

Delaunay pieces are shot from the symmetry circle on P and stopped where the
surface normal becomes orthogonal to the radial direction from the ball
centre ``p = axis ∩ P``.  Spherical caps are built in closed form from the
orthogonal-spheres relation of each model.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import brentq

from .delaunay import Branch, make_params, u_numeric
from .errors import (
    CmcError,
    DomainViolation,
    InvalidGeometry,
    NoBracket,
    NoContact,
    NoSuchCap,
    OutOfDomain,
)
from .rotation import (
    MeridianProfile,
    MeridianStart,
    RotationSurface,
    axis_distance_for_curvature,
    embed,
    radial_from_origin,
    reconstruct_meridian,
)
from .spaceform import SpaceForm, distance

DISK = "disk"
ANNULUS = "annulus"


@dataclass(frozen=True)
class ContactStart:
    sf: SpaceForm
    params: object
    lam0: float
    start: MeridianStart


def contact_start(c, H, u0, a=1):
    """Initial data of the meridian meeting P orthogonally on the circle where
    ``u = u0``."""
    params = make_params(c, H, u0, a)
    sf = SpaceForm(c)
    lam0 = H + a / u0
    try:
        rho0 = axis_distance_for_curvature(sf, lam0)
    except OutOfDomain as exc:
        raise InvalidGeometry(str(exc)) from exc
    return ContactStart(sf, params, lam0, MeridianStart(rho0, 0.0, math.pi / 2))


def curvature_functions(params, source="closed", s_max=None, ds_u=1e-4):
    """Scalar callables ``lam(s), mu(s)`` of the meridian described by ``params``.

    ``source="closed"`` uses the closed-form ``u``; ``"numeric"`` integrates
    the governing ODE up to ``s_max`` and interpolates.
    """
    H, a = params.H, params.a
    if source == "numeric":
        if s_max is None:
            raise ValueError("numeric curvatures need s_max")
        spline = u_numeric(params, s_max, ds_u).interpolant()
        u = lambda s: float(spline(s))
    elif source == "closed":
        kappa, u0 = params.kappa, params.u0
        growth = (1.0 - kappa * u0 * u0) / u0
        if params.branch is Branch.PARABOLIC:
            u = lambda s: u0 + growth * s * s
        elif params.branch is Branch.OSCILLATORY:
            k = math.sqrt(kappa)
            u = lambda s: u0 + growth * (math.sin(k * s) / k) ** 2
        else:
            k = math.sqrt(-kappa)
            u = lambda s: u0 + growth * (math.sinh(k * s) / k) ** 2
    else:
        raise ValueError(f"unknown source {source!r}")
    lam = lambda s: H + a / u(s)
    mu = lambda s: H - a / u(s)
    return lam, mu


@dataclass(frozen=True, eq=False)
class FreeBoundaryPiece:
    surface: RotationSurface
    center: np.ndarray
    R: float
    s_star: float
    residuals: tuple
    kind: str
    H: float
    params: object = None
    contacts: tuple = field(default=())

    @property
    def sf(self):
        return self.surface.sf

    @property
    def chi(self):
        return 1 if self.kind == DISK else 0

    def boundary(self):
        """``(s, sign)`` per boundary circle; ``sign * T`` is the outward conormal."""
        if self.kind == DISK:
            return [(self.s_star, 1)]
        return [(-self.s_star, -1), (self.s_star, 1)]

    def to_dict(self):
        d = {
            "c": self.sf.c,
            "H": self.H,
            "u0": None if self.params is None else self.params.u0,
            "a": None if self.params is None else self.params.a,
            "kind": self.kind,
            "R": self.R,
            "s_star": self.s_star,
            "residuals": list(self.residuals),
        }
        if self.contacts:
            d["contacts"] = list(self.contacts)
        return d


def _orthogonality(sf, center, rho, h, phi):
    # the ball centre is always axis ∩ P, where exact intrinsic formulas apply
    r, g = radial_from_origin(sf, rho, h, phi)
    return g, r


def boundary_residuals(sf, center, R, state):
    g, r = _orthogonality(sf, center, *(np.array(x) for x in state))
    return float(r) - R, float(g)


def shoot(c, H, u0, a=1, ds=1e-3, s_max=20.0, r_max=None, source="closed", all_contacts=False):
    """Free boundary Delaunay annulus through the symmetry circle ``u = u0``.

    Integrates the meridian from P, finds the first ``s_star > 0`` where
    ``<nu, grad r> = 0`` while ``r`` increases to a new maximum (so the
    piece lies in ``B_R`` with ``R = r(s_star)``) and mirrors it through P.  With
    ``all_contacts`` every sign change up to ``s_max`` is recorded in
    ``piece.contacts``; the piece still ends at the first.
    """
    cs = contact_start(c, H, u0, a)
    sf, params = cs.sf, cs.params
    center = sf.origin
    r_lim = min(sf.r_max, math.inf if r_max is None else float(r_max))
    if sf.c > 0 and r_max is not None and r_max >= sf.r_max:
        raise DomainViolation(f"R_max={r_max:g} is outside r < pi/(2 sqrt(c)) = {sf.r_max:.6g}")
    lam, mu = curvature_functions(params, source, s_max=s_max + ds)
    brackets = []
    violation = []
    peak = [0.0]

    def monitor(s, rho, h, phi):
        g, r = _orthogonality(sf, center, rho, h, phi)
        for j in range(1, len(s)):
            if r[j] >= r_lim and not violation and (all_contacts or not brackets):
                violation.append((float(s[j]), float(r[j])))
            if violation:
                return True
            # only outward crossings bound a piece inside the ball; inward ones meet the sphere from outside
            outward = r[j] > r[j - 1] and r[j - 1] >= peak[0]
            peak[0] = max(peak[0], float(r[j - 1]))
            if s[j] > 0 and outward and g[j - 1] * g[j] <= 0 and g[j - 1] != 0:
                if not brackets or s[j - 1] > brackets[-1][1] - 1e-15:
                    brackets.append((float(s[j - 1]), float(s[j])))
                if not all_contacts:
                    return True
        return False

    try:
        profile = reconstruct_meridian(sf, lam, mu, s_max, ds, start=cs.start, monitor=monitor)
    except CmcError:
        if not brackets:
            raise
        profile = None
    if violation and not brackets:
        s_v, r_v = violation[0]
        raise DomainViolation(f"meridian reached r={r_v:.6g} >= {r_lim:.6g} at s={s_v:.6g} before contact")
    if not brackets:
        raise NoContact(f"no orthogonal contact for s <= {s_max:g}")

    if profile is None:
        profile = reconstruct_meridian(sf, lam, mu, brackets[0][1], ds, start=cs.start)

    def g_of(s):
        return _orthogonality(sf, center, *(np.array(x) for x in profile.state_at(s)))[0]

    roots = []
    for lo, hi in brackets:
        lo0, hi0 = lo, hi
        g_lo = g_of(lo)
        while hi - lo > 1e-12:
            mid = 0.5 * (lo + hi)
            g_mid = g_of(mid)
            if g_mid == 0:
                lo = hi = mid
                break
            if g_lo * g_mid < 0:
                hi = mid
            else:
                lo, g_lo = mid, g_mid
        root = 0.5 * (lo + hi)
        if abs(g_of(root)) > 1e-6:
            raise NoContact(f"<nu, grad r> jumps without vanishing on [{lo0:.6g}, {hi0:.6g}]")
        roots.append(root)
    s_star = roots[0]
    R = float(_orthogonality(sf, center, *(np.array(x) for x in profile.state_at(s_star)))[1])
    final = reconstruct_meridian(sf, lam, mu, s_star, ds, start=cs.start)
    state = (final.rho[-1], final.h[-1], final.phi[-1])
    res = boundary_residuals(sf, center, R, state)
    return FreeBoundaryPiece(
        RotationSurface(final.mirror()), center, R, s_star, res, ANNULUS, H, params,
        contacts=tuple(roots) if all_contacts else (),
    )


def find_contacts(c, H, u0, **kw):
    """All orthogonal-contact parameters ``s`` up to ``s_max``."""
    return list(shoot(c, H, u0, all_contacts=True, **kw).contacts)


@dataclass
class RootResult:
    u0: float
    R: float
    piece: FreeBoundaryPiece
    scan: list


def _scan_R(args):
    c, H, u0, a, ds, s_max = args
    try:
        return shoot(c, H, u0, a=a, ds=ds, s_max=s_max).R
    except CmcError:
        return math.nan


def solve_for_R(c, H, R_target, a=1, u_lo=0.05, u_hi=20.0, n_scan=40, ds=1e-3, s_max=20.0, jobs=1):
    """``u0`` whose shot piece has ball radius ``R_target``.

    Scans a geometric ``u0`` grid for the first sign change of
    ``R(u0) - R_target`` and refines it with Brent's method.  The scan is
    returned alongside the root.
    """
    sf = SpaceForm(c)
    if not 0 < R_target < sf.r_max:
        raise DomainViolation(f"R_target={R_target:g} outside (0, {sf.r_max:.6g})")
    grid = np.geomspace(u_lo, u_hi, n_scan)
    args = [(c, H, float(u), a, ds, s_max) for u in grid]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            Rs = list(ex.map(_scan_R, args))
    else:
        Rs = [_scan_R(x) for x in args]
    scan = list(zip(grid.tolist(), Rs))
    for (u1, R1), (u2, R2) in zip(scan, scan[1:]):
        if math.isfinite(R1) and math.isfinite(R2) and (R1 - R_target) * (R2 - R_target) <= 0:
            break
    else:
        raise NoBracket(f"R(u0) - {R_target:g} has no sign change on [{u_lo:g}, {u_hi:g}]")
    fn = lambda u: shoot(c, H, u, a=a, ds=ds, s_max=s_max).R - R_target
    u0 = brentq(fn, u1, u2, xtol=1e-13, rtol=4 * np.finfo(float).eps)
    piece = shoot(c, H, u0, a=a, ds=ds, s_max=s_max)
    return RootResult(u0, piece.R, piece, scan)


def cap_geometry(c, H, R):
    """``(rho_s, d, s_star)`` of the cap of mean curvature ``H`` orthogonal to
    the sphere of radius ``R``: sphere radius, centre distance from ``p`` and
    meridian arclength from apex to boundary."""
    sf = SpaceForm(c)
    k = sf.k
    aH = abs(H)
    if c == 0:
        rho_s = 1.0 / aH
        d = math.hypot(R, rho_s)
        angle = math.acos(rho_s / d)
    elif c > 0:
        rho_s = math.atan2(k, aH) / k
        d = math.acos(math.cos(k * R) * math.cos(k * rho_s)) / k
        angle = math.acos(min(1.0, math.tan(k * rho_s) / math.tan(k * d)))
    else:
        if aH <= k:
            raise NoSuchCap(f"|H|={aH:g} <= sqrt(-c)={k:g}: no geodesic sphere has this mean curvature")
        rho_s = math.atanh(k / aH) / k
        d = math.acosh(math.cosh(k * R) * math.cosh(k * rho_s)) / k
        angle = math.acos(min(1.0, math.tanh(k * rho_s) / math.tanh(k * d)))
    return rho_s, d, float(sf.sn(rho_s)) * angle


def spherical_cap(c, H, R, n=2000):
    """Totally umbilical free boundary disk in ``B_R(p)``.

    ``H = 0`` gives the totally geodesic disk in P; otherwise a cap of the
    geodesic sphere of mean curvature ``|H|`` whose centre lies on the axis.
    """
    sf = SpaceForm(c)
    if not R > 0:
        raise OutOfDomain("R must be positive")
    if R >= sf.r_max:
        raise DomainViolation(f"R={R:g} must be below pi/(2 sqrt(c)) = {sf.r_max:.6g}")
    center = sf.origin
    const = lambda s: H
    if H == 0:
        # the meridian is a geodesic ray of P; built exactly so the boundary lands on r = R
        s_grid = np.linspace(0.0, R, n + 1)
        zero = np.zeros_like(s_grid)
        profile = MeridianProfile(sf, s_grid, s_grid.copy(), zero, zero, zero, zero, 0.0, const, const, R / n)
        s_star = R
    else:
        rho_s, d, s_star = cap_geometry(c, H, R)
        start = MeridianStart(0.0, d - rho_s, 0.0 if H > 0 else math.pi)
        profile = reconstruct_meridian(sf, const, const, s_star, s_star / n, start=start)
    state = (profile.rho[-1], profile.h[-1], profile.phi[-1])
    res = boundary_residuals(sf, center, R, state)
    return FreeBoundaryPiece(RotationSurface(profile), center, R, s_star, res, DISK, H)


@dataclass
class BoundaryCurvature:
    s: list
    analytic: np.ndarray
    fd: np.ndarray
    length: np.ndarray


def boundary_geodesic_curvature(piece, h=1e-4):
    """Geodesic curvature of each boundary circle w.r.t. the inward conormal,
    analytically (``ct(rho) cos(phi)``) and by finite differences of the
    embedded boundary curve."""
    sf = piece.sf
    surf = piece.surface
    analytic, fd, length = [], [], []
    for s_b, sign in piece.boundary():
        rho, hh, phi = surf.profile.state_at(s_b)
        analytic.append(sign * float(sf.ct(rho)) * math.cos(phi))
        length.append(2 * math.pi * abs(float(sf.sn(rho))))
        theta = 0.3
        a0 = surf.patch(s_b, theta)
        a_p = surf.patch(s_b, theta + h)
        a_m = surf.patch(s_b, theta - h)
        vel = (a_p - a_m) / (2 * h)
        acc = sf.tangent_part(a0, (a_p - 2 * a0 + a_m) / h**2)
        kvec = acc / sf.inner(vel, vel)
        T = (surf.patch(s_b + h, theta) - surf.patch(s_b - h, theta)) / (2 * h)
        T = sf.tangent_part(a0, T)
        eta = -sign * T / sf.norm(T)
        fd.append(float(sf.inner(kvec, eta)))
    return BoundaryCurvature([s for s, _ in piece.boundary()], np.array(analytic), np.array(fd), np.array(length))


@dataclass
class GaussBonnetAudit:
    interior: float
    boundary: float
    chi: int
    defect: float
    n_s: int

    def to_dict(self):
        return {"interior": self.interior, "boundary": self.boundary, "chi": self.chi,
                "defect": self.defect, "n_s": self.n_s}


def gauss_bonnet_audit(piece, chi=None, n_s=None):
    """``int K dA + int kappa_g ds - 2 pi chi`` by the trapezoid rule in ``s``.

    Rotational symmetry reduces the area integral to
    ``2 pi int K(s) |sn(rho(s))| ds``.  ``n_s`` resamples the meridian with
    that many intervals before integrating.
    """
    chi = piece.chi if chi is None else chi
    profile = piece.surface.profile
    if n_s is not None:
        half = n_s // 2 if profile.mirrored else n_s
        profile = profile.resample(half)
    sf = piece.sf
    K = sf.c + profile.lam * profile.mu
    dens = K * np.abs(sf.sn(profile.rho))
    interior = 2 * math.pi * float(trapezoid(dens, profile.s))
    kg = boundary_geodesic_curvature(piece)
    boundary = float(np.sum(kg.analytic * kg.length))
    return GaussBonnetAudit(interior, boundary, chi, interior + boundary - 2 * math.pi * chi, len(profile.s) - 1)


def uniqueness_crosscheck(c, H, u0, a=1, s_max=None, ds=1e-3, ds_u=1e-4, n_theta=8):
    """Sup geodesic distance between the meridian surfaces built from the
    closed-form and the numerically integrated ``u``."""
    cs = contact_start(c, H, u0, a)
    params = cs.params
    if s_max is None:
        s_max = min(3.0, params.period)
    lam_c, mu_c = curvature_functions(params, "closed")
    lam_n, mu_n = curvature_functions(params, "numeric", s_max=s_max, ds_u=ds_u)
    p1 = reconstruct_meridian(cs.sf, lam_c, mu_c, s_max, ds, start=cs.start)
    p2 = reconstruct_meridian(cs.sf, lam_n, mu_n, s_max, ds, start=cs.start)
    theta = np.arange(n_theta) * (2 * math.pi / n_theta)
    x1 = embed(cs.sf, p1.rho[:, None], p1.h[:, None], theta[None, :])
    x2 = embed(cs.sf, p2.rho[:, None], p2.h[:, None], theta[None, :])
    return float(np.max(distance(cs.sf, x1, x2)))
