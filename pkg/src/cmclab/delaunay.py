"""Governing ODE of rotation CMC surfaces and its closed-form solutions.

Along a meridian of a non-umbilic rotation cmc-H surface put
``w = |lambda - H|^(-1/2)`` and ``u = w^2``.  Then ``u`` satisfies the first
order equation

    (u')^2 / 4 + (c + H^2) u^2 - (C - 2H) u + 1 = 0

with ``u(0) = u0`` and ``u'(0) = 0`` on the symmetry circle.  The sign of
``kappa = c + H^2`` selects the solution branch.
"""

from dataclasses import dataclass, asdict
from enum import Enum
import csv
import math

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import BranchMismatch, Breakdown, NonPositiveU0, NonPositiveW
from .rotation import fmt, principal_from_u

U_FLOOR = 1e-10


class Branch(str, Enum):
    OSCILLATORY = "oscillatory"
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"


def branch_of(kappa):
    if kappa > 0:
        return Branch.OSCILLATORY
    if kappa < 0:
        return Branch.HYPERBOLIC
    return Branch.PARABOLIC


@dataclass(frozen=True)
class DelaunayParams:
    c: float
    H: float
    u0: float
    C: float
    branch: Branch
    a: int = 1
    n: int = 2
    D: float = None

    @property
    def kappa(self):
        return self.c + self.H * self.H

    @property
    def discriminant(self):
        return self.C * self.C - 4 * self.H * self.C - 4 * self.c

    @property
    def period(self):
        """Period of ``u`` in ``s`` (infinite off the oscillatory branch)."""
        if self.branch is Branch.OSCILLATORY:
            return math.pi / math.sqrt(self.kappa)
        return math.inf

    def to_dict(self):
        d = asdict(self)
        d["branch"] = self.branch.value
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["branch"] = Branch(d["branch"])
        return cls(**d)


def make_params(c, H, u0, a=1):
    """Parameter record of the meridian through ``u(0) = u0``, ``u'(0) = 0``."""
    if not u0 > 0:
        raise NonPositiveU0(f"u0 must be positive, got {u0!r}")
    if a not in (1, -1):
        raise ValueError("a must be +1 or -1")
    c, H, u0 = float(c), float(H), float(u0)
    kappa = c + H * H
    C = 2 * H + (kappa * u0 * u0 + 1.0) / u0
    branch = branch_of(kappa)
    D = None
    if branch is Branch.OSCILLATORY:
        # u0 is the maximum when kappa u0^2 >= 1, the minimum otherwise
        D = -math.pi / 2 if kappa * u0 * u0 >= 1.0 else math.pi / 2
    p = DelaunayParams(c, H, u0, C, branch, a=a, D=D)
    if p.discriminant < -1e-12 * max(1.0, C * C):
        raise ValueError("negative discriminant")
    return p


def _check_branch(params):
    if branch_of(params.kappa) is not params.branch:
        raise BranchMismatch(f"{params.branch.value} branch does not match c + H^2 = {params.kappa:g}")


def _growth(params):
    # u = u0 + growth * S(s)^2 with S the kappa-sine; no cancellation as kappa -> 0
    return (1.0 - params.kappa * params.u0 * params.u0) / params.u0


def u_closed(params, s):
    """Closed-form ``u(s)`` on the parameter's branch.

    Evaluated as ``u0 + (1 - kappa u0^2) / u0 * S(s)^2`` with
    ``S = sin(sqrt(kappa) s) / sqrt(kappa)``, ``s`` or
    ``sinh(sqrt(-kappa) s) / sqrt(-kappa)``, which equals the
    centre-plus-amplitude form of each branch.
    """
    _check_branch(params)
    s = np.asarray(s, dtype=float)
    kappa = params.kappa
    if params.branch is Branch.PARABOLIC:
        S = s
    elif params.branch is Branch.OSCILLATORY:
        S = np.sin(math.sqrt(kappa) * s) / math.sqrt(kappa)
    else:
        S = np.sinh(math.sqrt(-kappa) * s) / math.sqrt(-kappa)
    return params.u0 + _growth(params) * S * S


def uprime_closed(params, s):
    _check_branch(params)
    s = np.asarray(s, dtype=float)
    kappa = params.kappa
    # d/ds S^2 = sin(2 sqrt(kappa) s) / sqrt(kappa) and its analogues
    if params.branch is Branch.PARABOLIC:
        dS2 = 2 * s
    elif params.branch is Branch.OSCILLATORY:
        dS2 = np.sin(2 * math.sqrt(kappa) * s) / math.sqrt(kappa)
    else:
        dS2 = np.sinh(2 * math.sqrt(-kappa) * s) / math.sqrt(-kappa)
    return _growth(params) * dS2


def u_range(params):
    """``(u_min, u_max)``; ``u_max`` is ``inf`` off the oscillatory branch."""
    if params.branch is Branch.OSCILLATORY:
        other = 1.0 / (params.kappa * params.u0)
        return min(params.u0, other), max(params.u0, other)
    return params.u0, math.inf


def first_integral_residual(u, uprime, params):
    B = params.C - 2 * params.H
    return 0.25 * uprime * uprime + params.kappa * u * u - B * u + 1.0


def ode_residual_general_n(w, wpp, c, H, n=2, a=1):
    """Residual of ``w'' + w (c + H^2 + a(2-n) H w^-n + (1-n) w^-2n)``."""
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0):
        raise NonPositiveW("w must be positive")
    return wpp + w * (c + H * H + a * (2 - n) * H * w**-n + (1 - n) * w ** (-2 * n))


def constant_w(c, H, n=2, a=1):
    """Positive constant solutions of the general-n governing ODE."""
    # with x = w^-n: (n-1) x^2 - a(2-n) H x - (c + H^2) = 0
    qa, qb, qc = n - 1.0, -a * (2 - n) * H, -(c + H * H)
    disc = qb * qb - 4 * qa * qc
    if disc < 0:
        return []
    roots = {(-qb + sgn * math.sqrt(disc)) / (2 * qa) for sgn in (1, -1)}
    return sorted(x ** (-1.0 / n) for x in roots if x > 0)


def _w_accel(w, kappa):
    # n = 2 form of the governing ODE: w'' = -w (kappa - w^-4)
    return w**-3 - kappa * w


@dataclass(frozen=True, eq=False)
class USolution:
    params: DelaunayParams
    s: np.ndarray
    u: np.ndarray
    uprime: np.ndarray
    source: str = "numeric"

    def curvatures(self):
        return principal_from_u(self.u, self.params.a, self.params.H)

    def residual(self):
        return first_integral_residual(self.u, self.uprime, self.params)

    def interpolant(self):
        """C^1 piecewise-cubic ``u(s)`` through the samples."""
        return CubicHermiteSpline(self.s, self.u, self.uprime)

    def to_dict(self):
        return {
            "params": self.params.to_dict(),
            "source": self.source,
            "s": self.s.tolist(),
            "u": self.u.tolist(),
            "uprime": self.uprime.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            DelaunayParams.from_dict(d["params"]),
            np.array(d["s"], dtype=float),
            np.array(d["u"], dtype=float),
            np.array(d["uprime"], dtype=float),
            d.get("source", "numeric"),
        )

    def to_csv(self, path):
        lam, mu = self.curvatures()
        res = self.residual()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["s", "u", "uprime", "lambda", "mu", "residual"])
            for row in zip(self.s, self.u, self.uprime, lam, mu, res):
                w.writerow([fmt(x) for x in row])


def u_closed_solution(params, s_max, ds):
    n = max(1, int(round(s_max / ds)))
    s = np.arange(n + 1) * (s_max / n)
    return USolution(params, s, u_closed(params, s), uprime_closed(params, s), "closed")


def u_numeric(params, s_max, ds=1e-4):
    """Integrate the governing ODE in ``w`` with fixed-step RK4.

    Raises :class:`Breakdown` (carrying the partial solution) if ``u`` drops
    below ``U_FLOOR``.
    """
    if ds <= 0:
        raise ValueError("ds must be positive")
    if not params.u0 > 0:
        raise NonPositiveU0("u0 must be positive")
    n = max(1, int(round(s_max / ds)))
    d = s_max / n
    kappa = params.kappa
    w, v = math.sqrt(params.u0), 0.0
    ws = [w]
    vs = [v]
    half, sixth = 0.5 * d, d / 6.0
    for i in range(n):
        a1 = w**-3 - kappa * w
        w2 = w + half * v
        v2 = v + half * a1
        a2 = w2**-3 - kappa * w2
        w3 = w + half * v2
        v3 = v + half * a2
        a3 = w3**-3 - kappa * w3
        w4 = w + d * v3
        v4 = v + d * a3
        a4 = w4**-3 - kappa * w4
        w += sixth * (v + 2 * v2 + 2 * v3 + v4)
        v += sixth * (a1 + 2 * a2 + 2 * a3 + a4)
        if not w * w > U_FLOOR:
            s = np.arange(len(ws)) * d
            W, V = np.array(ws), np.array(vs)
            partial = USolution(params, s, W * W, 2 * W * V)
            raise Breakdown((i + 1) * d, partial)
        ws.append(w)
        vs.append(v)
    W, V = np.array(ws), np.array(vs)
    s = np.arange(n + 1) * d
    return USolution(params, s, W * W, 2 * W * V)
