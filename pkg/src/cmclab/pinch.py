"""Pointwise pinching quantities, the bilinear form ``L = Hess f + ...`` and
classification verdicts for sampled free boundary surfaces.

With ``g = <nu, grad f>`` the pinching margin is
``(f'' + H g)^2 - |Phi|^2 g^2 / 2`` and the diagonal of ``L`` in the
principal frame is ``f'' + lambda_i g``.  Principal direction 1 is the
parallel circle, direction 2 the meridian.
"""

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
import csv

import numpy as np

from .rotation import fmt, sample as sample_surface
from .spaceform import f_eval

TOL_EQ = 1e-6
TOL_UMB = 1e-8
TOL_R = 1e-8


class Verdict(str, Enum):
    SPHERICAL_CAP = "SphericalCapConsistent"
    DELAUNAY = "DelaunayConsistent"
    VIOLATED = "HypothesisViolated"
    INCONCLUSIVE = "Inconclusive"


class SignPattern(str, Enum):
    NONPOSITIVE = "AllNonpositive"
    NONNEGATIVE = "AllNonnegative"
    MIXED = "Mixed"


class Topology(str, Enum):
    DISK = "Disk"
    ANNULUS = "Annulus"


class Umbilic(str, Enum):
    NONE = "none"
    ISOLATED = "isolated"
    TOTAL = "total"


def pinch_quantities(fpp, g, lambda1, lambda2, H, phi_sq):
    """Array form of the pointwise quantities; returns a dict of arrays."""
    fpp, g = np.asarray(fpp, dtype=float), np.asarray(g, dtype=float)
    trace_half = fpp + H * g
    lhs = 0.5 * phi_sq * g * g
    rhs = trace_half * trace_half
    h1 = fpp + lambda1 * g
    h2 = fpp + lambda2 * g
    return {
        "lhs": lhs, "rhs": rhs, "margin": rhs - lhs, "detL": h1 * h2,
        "trL": h1 + h2, "trace_half": trace_half, "hess1": h1, "hess2": h2,
    }


@dataclass(frozen=True, eq=False)
class PinchSample:
    base: object
    lhs: float
    rhs: float
    margin: float
    detL: float
    trL: float
    trace_half: float
    hess_sigma_diag: tuple


def pinch_values(s, sf):
    """Pinching quantities at one :class:`SurfaceSample`."""
    _, _, fpp = f_eval(sf, s.r)
    q = pinch_quantities(float(fpp), s.grad_nu_f, s.lambda1, s.lambda2, s.H, s.phi_sq)
    q = {k: float(v) for k, v in q.items()}
    return PinchSample(s, q["lhs"], q["rhs"], q["margin"], q["detL"], q["trL"],
                       q["trace_half"], (q["hess1"], q["hess2"]))


def hess_sigma_f(s, sf, direction):
    """``Hess_Sigma f(e_i, e_i) = f'' + lambda_i <nu, grad f>`` in a space form."""
    if direction not in (1, 2):
        raise ValueError("direction must be 1 or 2")
    _, _, fpp = f_eval(sf, s.r)
    lam = s.lambda1 if direction == 1 else s.lambda2
    return float(fpp) + lam * s.grad_nu_f


def _components(indices, n_theta):
    """Connected components of grid cells ``(i, j)``, periodic in ``j``."""
    todo = set(indices)
    comps = []
    while todo:
        seed = todo.pop()
        comp, queue = [seed], deque([seed])
        while queue:
            i, j = queue.popleft()
            for nb in ((i + 1, j), (i - 1, j), (i, (j + 1) % n_theta), (i, (j - 1) % n_theta)):
                if nb in todo:
                    todo.remove(nb)
                    comp.append(nb)
                    queue.append(nb)
        comps.append(sorted(comp))
    return sorted(comps)


def _n_theta(samples):
    return 1 + max(p.index[1] for p in samples)


@dataclass
class Locus:
    samples: list
    kind: str
    n_components: int
    r_min: float


def min_r_locus(samples, tol_r=TOL_R):
    """Samples with ``r <= min r + tol_r`` and the shape of that set.

    ``kind`` is ``"point"`` when all of them coincide in space (e.g. an apex
    sampled at every angle), ``"ring"`` when a single component wraps all
    the way round in ``theta``, ``"cluster"`` otherwise.
    """
    r_min = min(p.r for p in samples)
    chosen = [p for p in samples if p.r <= r_min + tol_r]
    n_theta = _n_theta(samples)
    comps = _components([p.index for p in chosen], n_theta)
    pos = np.array([p.pos for p in chosen])
    if np.max(np.ptp(pos, axis=0)) <= 1e-9:
        kind = "point"
    elif len(comps) == 1 and len({j for _, j in comps[0]}) == n_theta:
        kind = "ring"
    else:
        kind = "cluster"
    return Locus(chosen, kind, len(comps), r_min)


@dataclass
class UmbilicResult:
    status: Umbilic
    clusters: list


def umbilic_detect(samples, tol_umb=TOL_UMB):
    """Grid clusters of samples with ``|Phi|^2 <= tol_umb``."""
    hits = [p for p in samples if p.phi_sq <= tol_umb]
    if hits and len(hits) == len(samples):
        return UmbilicResult(Umbilic.TOTAL, [])
    by_index = {p.index: p for p in hits}
    comps = _components(list(by_index), _n_theta(samples)) if hits else []
    clusters = [[(by_index[ix].s, by_index[ix].theta) for ix in comp] for comp in comps]
    return UmbilicResult(Umbilic.ISOLATED if clusters else Umbilic.NONE, clusters)


@dataclass
class PinchReport:
    samples: list
    topology: Topology
    params: dict = field(default_factory=dict)
    tol_eq: float = TOL_EQ
    tol_umb: float = TOL_UMB
    tol_r: float = TOL_R

    def __post_init__(self):
        m = np.array([p.margin for p in self.samples])
        i = int(np.argmin(m))
        self.min_margin = float(m[i])
        self.argmin = self.samples[i].base
        self.equality_points = [p for p in self.samples if abs(p.margin) <= self.tol_eq]
        bases = [p.base for p in self.samples]
        self.umbilic = umbilic_detect(bases, self.tol_umb)
        self.locus = min_r_locus(bases, self.tol_r)
        self.verdict = classify(self, self.topology)

    def to_dict(self):
        return {
            "params": self.params,
            "n_samples": len(self.samples),
            "min_margin": self.min_margin,
            "argmin": {"s": self.argmin.s, "theta": self.argmin.theta},
            "equality_points": [
                {"s": p.base.s, "theta": p.base.theta, "margin": p.margin} for p in self.equality_points
            ],
            "umbilic": self.umbilic.status.value,
            "verdict": self.verdict.value,
            "topology": self.topology.value,
            "sign_pattern": sign_analysis(self, self.params.get("c", 0.0)).value,
            "min_r_locus": {"kind": self.locus.kind, "n_samples": len(self.locus.samples),
                            "r_min": self.locus.r_min},
            "tolerances": {"eq": self.tol_eq, "umb": self.tol_umb, "r": self.tol_r},
        }

    def to_csv(self, path):
        header = ["s", "theta", "r", "lambda1", "lambda2", "H", "phi_sq", "grad_nu_f",
                  "lhs", "rhs", "margin", "detL", "trL", "trace_half", "hess1", "hess2"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for p in self.samples:
                b = p.base
                w.writerow([fmt(x) for x in (
                    b.s, b.theta, b.r, b.lambda1, b.lambda2, b.H, b.phi_sq, b.grad_nu_f,
                    p.lhs, p.rhs, p.margin, p.detL, p.trL, p.trace_half, *p.hess_sigma_diag)])


def classify(report, topology, tol_eq=None):
    """Verdict for ``report`` read as a free boundary surface of ``topology``.

    A disk needs every sample umbilical to be called a cap; an annulus
    needs at least one pinching equality point to be called Delaunay.
    """
    tol_eq = report.tol_eq if tol_eq is None else tol_eq
    if report.min_margin < -tol_eq:
        return Verdict.VIOLATED
    if Topology(topology) is Topology.DISK:
        if report.umbilic.status is Umbilic.TOTAL:
            return Verdict.SPHERICAL_CAP
        return Verdict.INCONCLUSIVE
    if any(abs(p.margin) <= tol_eq for p in report.samples):
        return Verdict.DELAUNAY
    return Verdict.INCONCLUSIVE


def sign_analysis(report, c, tol=1e-10):
    """Common sign of both diagonal entries of ``L`` over all samples.

    Entries within ``tol`` of zero count for either sign; ties go to the
    sign expected for the curvature ``c``.
    """
    vals = np.array([p.hess_sigma_diag for p in report.samples]).ravel()
    nonpos = bool(np.all(vals <= tol))
    nonneg = bool(np.all(vals >= -tol))
    if c > 0 and nonpos:
        return SignPattern.NONPOSITIVE
    if nonneg:
        return SignPattern.NONNEGATIVE
    if nonpos:
        return SignPattern.NONPOSITIVE
    return SignPattern.MIXED


def pinch_report(piece_or_surface, topology=None, center=None, n_s=101, n_theta=32,
                 tol_eq=TOL_EQ, tol_umb=TOL_UMB, tol_r=TOL_R, params=None):
    """Sample a surface (or free boundary piece) and evaluate the pinching report."""
    surface = getattr(piece_or_surface, "surface", piece_or_surface)
    if center is None:
        center = getattr(piece_or_surface, "center", None)
    if topology is None:
        kind = getattr(piece_or_surface, "kind", "annulus")
        topology = Topology.DISK if kind == "disk" else Topology.ANNULUS
    sf = surface.sf
    pts = sample_surface(surface, center, n_s=n_s, n_theta=n_theta)
    samples = [pinch_values(p, sf) for p in pts]
    params = {"c": sf.c, "H": surface.profile.H, **(params or {})}
    return PinchReport(samples, Topology(topology), params, tol_eq, tol_umb, tol_r)
