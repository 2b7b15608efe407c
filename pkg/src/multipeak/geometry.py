"""Model manifolds with computable curvature, and the concentration functional.

Provides constant-curvature spheres, warped metrics dt^2 + f(t)^2 g_(S^(n-1))
with closed-form curvature from the warp profile, tabulated curvature charts,
and flat space.  On these the functional

  phi = (1/(120(n+2))) (-c8 lap_s + c6 ric2 - 3 c1 riem2) + c7 s^2 + c9 s

is evaluated and scanned for isolated interior critical points.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.optimize import minimize_scalar

from .constants import DimensionalConstants


class PoleSingularity(ValueError):
    """Curvature requested too close to a warp pole, where 1/f is unstable."""


class AntipodalPair(ValueError):
    """The log map is undefined for antipodal points."""


class NoInteriorCritical(RuntimeError):
    """Scan found no isolated critical point away from the boundary.

    The computed scan is attached as the `scan` attribute so callers can
    still inspect or write the profile.
    """

    def __init__(self, message, scan=None):
        super().__init__(message)
        self.scan = scan


@dataclass
class CurvaturePoint:
    s: float
    lap_s: float
    ric2: float
    riem2: float


def curvature_round_sphere(n: int, radius: float) -> CurvaturePoint:
    """Constant-curvature closed forms for the round n-sphere."""
    if n < 2 or radius <= 0:
        raise ValueError("round sphere needs n >= 2 and radius > 0")
    r2 = radius * radius
    return CurvaturePoint(
        s=n * (n - 1) / r2,
        lap_s=0.0,
        ric2=n * (n - 1) ** 2 / (r2 * r2),
        riem2=2.0 * n * (n - 1) / (r2 * r2),
    )


@dataclass
class Geodesic:
    distance: float
    log: np.ndarray


@dataclass
class RoundSphere:
    """Round n-sphere of given radius; points are unit vectors in R^(n+1)."""

    n: int
    radius: float = 1.0

    def __post_init__(self):
        if self.n < 2 or self.radius <= 0:
            raise ValueError("round sphere needs n >= 2 and radius > 0")

    @property
    def injectivity_radius(self) -> float:
        return np.pi * self.radius

    @property
    def parameter_range(self):
        # polar angle along a meridian, scaled to arclength
        return (0.0, np.pi * self.radius)

    @property
    def pole_tol(self) -> float:
        return 0.0

    def point(self, angle: float = 0.0) -> np.ndarray:
        """Point at polar angle from the reference pole, in the 12-plane."""
        x = np.zeros(self.n + 1)
        x[0], x[1] = np.cos(angle), np.sin(angle)
        return x

    def curvature_at(self, xi=None) -> CurvaturePoint:
        return curvature_round_sphere(self.n, self.radius)

    def distance(self, xi1, xi2) -> float:
        a = np.asarray(xi1, dtype=float)
        b = np.asarray(xi2, dtype=float)
        a = a / np.linalg.norm(a)
        b = b / np.linalg.norm(b)
        ang = float(np.arccos(np.clip(np.dot(a, b), -1.0, 1.0)))
        return self.radius * ang


def sphere_geodesics(model: RoundSphere, xi1, xi2) -> Geodesic:
    """Great-circle distance and the inverse exponential map at xi1."""
    a = np.asarray(xi1, dtype=float) / np.linalg.norm(xi1)
    b = np.asarray(xi2, dtype=float) / np.linalg.norm(xi2)
    theta = float(np.arccos(np.clip(np.dot(a, b), -1.0, 1.0)))
    if np.pi - theta < 1e-9:
        raise AntipodalPair("log map undefined within 1e-9 of the antipode")
    d = model.radius * theta
    tangent = b - np.cos(theta) * a
    norm = np.linalg.norm(tangent)
    log = np.zeros_like(a) if norm < 1e-15 else (d / norm) * tangent
    return Geodesic(distance=d, log=log)


@dataclass
class FlatSpace:
    """R^n with the Euclidean metric; the zero-curvature control model."""

    n: int

    @property
    def injectivity_radius(self) -> float:
        return np.inf

    def curvature_at(self, xi=None) -> CurvaturePoint:
        return CurvaturePoint(0.0, 0.0, 0.0, 0.0)

    def distance(self, xi1, xi2) -> float:
        return float(np.linalg.norm(np.asarray(xi1, float) - np.asarray(xi2, float)))


class WarpedSphere:
    """Rotationally symmetric metric dt^2 + f(t)^2 g_(S^(n-1)) on [0, L].

    The warp must close smoothly at both poles: f(0)=f(L)=0, f'(0)=1,
    f'(L)=-1.  Curvature reduces to the radial sectional curvature
    a = -f''/f and the spherical one b = (1 - f'^2)/f^2:

      s     = 2(n-1) a + (n-1)(n-2) b
      ric2  = ((n-1) a)^2 + (n-1)(a + (n-2) b)^2
      riem2 = 4(n-1) a^2 + 2(n-1)(n-2) b^2
      lap_s = s'' + (n-1)(f'/f) s'

    with s', s'' expanded analytically in f and its first four derivatives,
    all read off one interpolating spline of the profile.  The default
    sample spacing balances interpolation error against roundoff in the
    fourth derivative; much finer grids make lap_s noisier, not better.
    Evaluation is refused within pole_tol of either pole, where the
    1 - f'^2 cancellation loses accuracy.
    """

    def __init__(self, n: int, f=None, L: float = np.pi, samples: int = 161,
                 pole_tol: float = None, t=None, f_vals=None):
        if n < 2:
            raise ValueError("warped sphere needs n >= 2")
        self.n = int(n)
        if t is not None:
            t = np.asarray(t, dtype=float)
            vals = np.asarray(f_vals, dtype=float)
            if t.size < 9 or t.size != vals.size:
                raise ValueError("need at least 9 matched (t, f) samples")
            if abs(t[0]) > 1e-12:
                raise ValueError("samples must start at t = 0")
            self.L = float(t[-1])
        else:
            if L <= 0:
                raise ValueError("warped sphere needs L > 0")
            self.L = float(L)
            t = np.linspace(0.0, self.L, samples)
            try:
                vals = np.asarray(f(t), dtype=float)
                if vals.shape != t.shape:
                    raise TypeError
            except Exception:
                vals = np.array([f(x) for x in t], dtype=float)
        self.pole_tol = float(pole_tol) if pole_tol is not None else 1e-3 * self.L
        self._f = make_interp_spline(t, vals, k=7)
        self._df = [self._f.derivative(k) for k in range(1, 5)]
        scale = float(np.max(np.abs(vals)))
        if (abs(vals[0]) > 1e-9 * scale or abs(vals[-1]) > 1e-9 * scale
                or abs(float(self._df[0](0.0)) - 1.0) > 1e-6
                or abs(float(self._df[0](self.L)) + 1.0) > 1e-6):
            raise ValueError("warp must close: f(0)=f(L)=0, f'(0)=1, f'(L)=-1")

    @classmethod
    def from_samples(cls, n: int, t, f_vals, **kw) -> "WarpedSphere":
        return cls(n, t=t, f_vals=f_vals, **kw)

    @property
    def injectivity_radius(self) -> float:
        # peaks are placed on one meridian; the t-lines are geodesics
        return self.L

    @property
    def parameter_range(self):
        return (0.0, self.L)

    def warp(self, t):
        return self._f(t)

    def _check_interior(self, t: float):
        if not (self.pole_tol <= t <= self.L - self.pole_tol):
            raise PoleSingularity(
                f"t={t!r} within {self.pole_tol!r} of a pole of the warp"
            )

    def curvature_at(self, t: float) -> CurvaturePoint:
        t = float(t)
        self._check_interior(t)
        n = self.n
        F = float(self._f(t))
        P, Q, C, D = (float(d(t)) for d in self._df)
        a = -Q / F
        b = (1.0 - P * P) / (F * F)
        da = -C / F + Q * P / F ** 2
        db = -2.0 * P * Q / F ** 2 - 2.0 * P * (1.0 - P * P) / F ** 3
        d2a = -D / F + (2.0 * C * P + Q * Q) / F ** 2 - 2.0 * Q * P * P / F ** 3
        d2b = (-2.0 * (Q * Q + P * C) / F ** 2 + 4.0 * P * P * Q / F ** 3
               - 2.0 * Q * (1.0 - 3.0 * P * P) / F ** 3
               + 6.0 * P * P * (1.0 - P * P) / F ** 4)
        k1 = 2.0 * (n - 1)
        k2 = float((n - 1) * (n - 2))
        s = k1 * a + k2 * b
        ds = k1 * da + k2 * db
        d2s = k1 * d2a + k2 * d2b
        return CurvaturePoint(
            s=s,
            lap_s=d2s + (n - 1) * (P / F) * ds,
            ric2=((n - 1) * a) ** 2 + (n - 1) * (a + (n - 2) * b) ** 2,
            riem2=4.0 * (n - 1) * a ** 2 + 2.0 * (n - 1) * (n - 2) * b ** 2,
        )

    def distance(self, t1: float, t2: float) -> float:
        # meridian placement: geodesic distance along the t-line is |dt|
        return abs(float(t1) - float(t2))


def curvature_warped_sphere(model: WarpedSphere, t: float) -> CurvaturePoint:
    """Closed-form curvature of the warped metric at parameter t."""
    return model.curvature_at(t)


@dataclass
class TabulatedCurvature:
    """Chart given by sampled curvature fields along one parameter."""

    t: np.ndarray
    s: np.ndarray
    lap_s: np.ndarray
    ric2: np.ndarray
    riem2: np.ndarray

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        k = 3 if self.t.size >= 4 else 1
        self._sp = {
            name: make_interp_spline(self.t, np.asarray(getattr(self, name), float), k=k)
            for name in ("s", "lap_s", "ric2", "riem2")
        }

    @property
    def parameter_range(self):
        return (float(self.t[0]), float(self.t[-1]))

    @property
    def pole_tol(self) -> float:
        return 0.0

    def curvature_at(self, t: float) -> CurvaturePoint:
        if not (self.t[0] <= t <= self.t[-1]):
            raise ValueError(f"t={t!r} outside the tabulated range")
        return CurvaturePoint(*(float(self._sp[k](t)) for k in ("s", "lap_s", "ric2", "riem2")))


def phi(cp: CurvaturePoint, dc: DimensionalConstants) -> float:
    """The concentration functional at one point from its curvature data."""
    n = dc.n
    lead = (-dc.c8 * cp.lap_s + dc.c6 * cp.ric2 - 3.0 * dc.c1 * cp.riem2) / (120.0 * (n + 2.0))
    return lead + dc.c7 * cp.s ** 2 + dc.c9 * cp.s


@dataclass
class CriticalPoint:
    t: float
    phi: float
    kind: str  # "min" | "max" | "degenerate"


@dataclass
class PhiScan:
    t: np.ndarray
    phi: np.ndarray
    points: list = field(default_factory=list)


def scan_phi(model, dc: DimensionalConstants, resolution: int = 2001,
             bounds=None, require_critical: bool = True) -> PhiScan:
    """Profile of phi along the model's parameter with classified extrema.

    Interior extrema are located by sign changes of the first differences,
    then refined by golden-section well below 1e-8 in the parameter.
    Raises NoInteriorCritical (scan attached) when the profile is constant
    or no interior extremum exists.
    """
    n_model = getattr(model, "n", dc.n)
    if n_model != dc.n:
        raise ValueError(f"model dimension {n_model} != constants dimension {dc.n}")
    lo_full, hi_full = model.parameter_range
    span = hi_full - lo_full
    margin = max(2.0 * model.pole_tol, 0.02 * span)
    lo, hi = bounds if bounds is not None else (lo_full + margin, hi_full - margin)
    ts = np.linspace(lo, hi, resolution)
    pv = np.array([phi(model.curvature_at(t), dc) for t in ts])
    scan = PhiScan(t=ts, phi=pv, points=[])

    spread = float(pv.max() - pv.min())
    if spread < 1e-12 * max(1.0, float(np.abs(pv).max())):
        if require_critical:
            raise NoInteriorCritical("phi is constant along the scan", scan)
        return scan

    func = lambda t: phi(model.curvature_at(t), dc)
    d = np.diff(pv)
    h = (hi - lo) / (resolution - 1)
    for i in range(1, resolution - 1):
        if d[i - 1] > 0.0 and d[i] < 0.0:
            kind = "max"
            res = minimize_scalar(lambda t: -func(t), method="golden",
                                  bracket=(ts[i - 1], ts[i], ts[i + 1]),
                                  options={"xtol": 1e-11})
        elif d[i - 1] < 0.0 and d[i] > 0.0:
            kind = "min"
            res = minimize_scalar(func, method="golden",
                                  bracket=(ts[i - 1], ts[i], ts[i + 1]),
                                  options={"xtol": 1e-11})
        else:
            continue
        t_star = float(res.x)
        curv = (func(t_star + h) - 2.0 * func(t_star) + func(t_star - h)) / h ** 2
        if abs(curv) * span ** 2 < 1e-6 * spread:
            kind = "degenerate"
        scan.points.append(CriticalPoint(t=t_star, phi=float(func(t_star)), kind=kind))

    if require_critical and not scan.points:
        raise NoInteriorCritical("no interior extremum on the scan range", scan)
    return scan
