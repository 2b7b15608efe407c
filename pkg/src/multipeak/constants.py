"""Dimensional constants of the two-scale concentration expansion.

For a product dimension N = n + m the exponent is p = 2N/(N-2) and the
conformal factor constant is c_bold = (N-2)/(4(N-1)).  All constants reduce
to weighted radial integrals of the ground state U, its derivative, and the
correction profiles psi and v2base:

  alpha = I1/2 + I2/2 - Ip/p
  beta  = c_bold I2 - (1/(n(n+2))) int |grad U|^2 |z|^2
  c1    = (1/6)  int (U'/|z|)^2 z1^4
  c2    =        int U^2 z1^2
  c3    = (1/54) int psi (U'/|z|) z1^4
  c4    = -(c_bold/6) int U psi z1^2
  c5    = (c_bold/6)  int (U'^2/2 - U U' / ((2-p)|z|)) z1^2
  c6    = 8 c1 - 120 (n+2) c3
  c7    = -c3 - c4 - c5 - c2 c_bold / 12 + c1 / (24 (n+2))
  c8    = 18 c1 + 30 c_bold c2 (n+2)
  c9    = (c_bold/2) int U v2base
  gamma = int U^(p-1) e^<b, z>  for a unit vector b

plus the interaction constant gamma.  Moment weights are reduced to radial
integrals through the even-moment identities handled by moment_reduce.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln

from .correction import CorrectionProfiles
from .groundstate import GroundState
from .radial import (
    Quadrature,
    RadialGrid,
    TailModel,
    moment_reduce,
    surface_area,
    tail_power_integral,
)


class ExponentMismatch(ValueError):
    """gs.p is not the product exponent 2N/(N-2) for the requested m."""


class NotUnit(ValueError):
    """The direction vector must have unit length."""


def product_exponent(n: int, m: int) -> float:
    """p = 2N/(N-2) for N = n + m."""
    N = n + m
    return 2.0 * N / (N - 2.0)


def conformal_constant(N: int) -> float:
    """c_bold = (N-2)/(4(N-1))."""
    return (N - 2.0) / (4.0 * (N - 1.0))


CSV_COLUMNS = [
    "n", "m", "N", "p", "alpha", "beta",
    "c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8", "c9",
]


@dataclass
class DimensionalConstants:
    n: int
    m: int
    N: int
    p: float
    c_bold: float
    alpha: float
    beta: float
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    c6: float
    c7: float
    c8: float
    c9: float
    raw: dict = field(default_factory=dict)

    def row(self) -> dict:
        return {k: getattr(self, k) for k in CSV_COLUMNS}


@dataclass
class GammaValue:
    b: np.ndarray
    value: float


def compute_constants(gs: GroundState, cp: CorrectionProfiles, m: int) -> DimensionalConstants:
    """All expansion constants for the product dimension pair (gs.n, m)."""
    n, p = gs.n, gs.p
    N = n + m
    p_N = product_exponent(n, m)
    if abs(p - p_N) > 1e-12:
        raise ExponentMismatch(
            f"ground state has p={p!r} but (n={n}, m={m}) needs p={p_N!r}"
        )
    cc = conformal_constant(N)

    quad = Quadrature(gs.grid)
    U = gs.profile
    psi = cp.psi
    v2 = cp.v2base

    def du(r):
        return U.deriv1(r)

    tail_u2 = U.tail.powered(2.0) if U.tail is not None else None
    # (U'/r)^2 tail: same amplitude and rate as U^2, power shifted by -2
    tail_sl2 = (
        TailModel(tail_u2.c, tail_u2.a - 2.0, tail_u2.b) if tail_u2 is not None else None
    )

    grad_z2 = moment_reduce(lambda r: du(r) ** 2, "|z|^2", n, quad=quad, tail=tail_u2)
    M4 = moment_reduce(lambda r: (du(r) / r) ** 2, "z1^4", n, quad=quad, tail=tail_sl2)
    M2 = moment_reduce(lambda r: U(r) ** 2, "z1^2", n, quad=quad, tail=tail_u2)

    alpha = 0.5 * gs.I1 + 0.5 * gs.I2 - gs.Ip / p
    beta = cc * gs.I2 - grad_z2 / (n * (n + 2.0))
    c1 = M4 / 6.0
    c2 = M2
    psi_slope_z14 = moment_reduce(
        lambda r: psi(r) * du(r) / r, "z1^4", n, quad=quad
    )
    c3 = psi_slope_z14 / 54.0
    U_psi_z12 = moment_reduce(lambda r: U(r) * psi(r), "z1^2", n, quad=quad)
    c4 = -(cc / 6.0) * U_psi_z12
    c5_core = moment_reduce(
        lambda r: 0.5 * du(r) ** 2 - U(r) * du(r) / ((2.0 - p) * r),
        "z1^2", n, quad=quad,
    )
    c5 = (cc / 6.0) * c5_core
    c6 = 8.0 * c1 - 120.0 * (n + 2.0) * c3
    c7 = -c3 - c4 - c5 - c2 * cc / 12.0 + c1 / (24.0 * (n + 2.0))
    c8 = 18.0 * c1 + 30.0 * cc * c2 * (n + 2.0)
    U_v2base = moment_reduce(lambda r: U(r) * v2(r), "1", n, quad=quad)
    c9 = 0.5 * cc * U_v2base

    raw = {
        "I1": gs.I1,
        "I2": gs.I2,
        "Ip": gs.Ip,
        "M2": M2,
        "M4": M4,
        "grad_z2": grad_z2,
        "psi_slope_z14": psi_slope_z14,
        "U_psi_z12": U_psi_z12,
        "c5_core": c5_core,
        "U_v2base": U_v2base,
    }
    return DimensionalConstants(
        n=n, m=m, N=N, p=p, c_bold=cc, alpha=alpha, beta=beta,
        c1=c1, c2=c2, c3=c3, c4=c4, c5=c5, c6=c6, c7=c7, c8=c8, c9=c9,
        raw=raw,
    )


def _angular_factor(r: np.ndarray, n: int, rel_tol: float = 1e-10) -> np.ndarray:
    """A(r) = int_0^pi exp(r cos t) sin^(n-2) t dt, panel-doubled Gauss.

    Vectorized over r; panels double until the pointwise relative change is
    below rel_tol (the integrand sharpens near t=0 as r grows).
    """
    gl_x, gl_w = leggauss(10)
    prev = None
    for panels in (16, 32, 64, 128, 256):
        edges = np.linspace(0.0, np.pi, panels + 1)
        half = 0.5 * (edges[1:] - edges[:-1])
        mid = 0.5 * (edges[1:] + edges[:-1])
        t = (mid[:, None] + half[:, None] * gl_x[None, :]).ravel()
        w = (half[:, None] * gl_w[None, :]).ravel()
        ws = w * np.sin(t) ** (n - 2)
        cur = np.exp(np.outer(r, np.cos(t))) @ ws
        if prev is not None and np.max(np.abs(cur - prev) / np.abs(cur)) < rel_tol:
            return cur
        prev = cur
    return prev


def gamma(gs: GroundState, b, rel_tol: float = 1e-10) -> GammaValue:
    """Interaction constant int U^(p-1) exp(<b, z>) dz for a unit vector b.

    Reduced to a radial-angular product; the angular factor is adaptive and
    the radial tail beyond the grid is completed with the asymptotic forms
    of both factors.
    """
    b = np.asarray(b, dtype=float)
    if b.ndim != 1 or b.size != gs.n:
        raise NotUnit(f"direction must be a vector in R^{gs.n}")
    if abs(float(np.linalg.norm(b)) - 1.0) > 1e-12:
        raise NotUnit("direction must have unit length within 1e-12")
    n, p = gs.n, gs.p
    R = gs.r_max
    grid = RadialGrid(np.linspace(0.0, R, 448 + 1))
    quad = Quadrature(grid, order=8)
    r = quad.points
    vals = np.abs(gs.profile(r)) ** (p - 1.0) * r ** (n - 1.0) * _angular_factor(r, n, rel_tol)
    core = quad.integrate(vals)
    # asymptotics: U^(p-1) ~ c^(p-1) r^(-(p-1)nu) e^(-(p-1)r) and
    # A(r) ~ Gamma((n-1)/2) 2^((n-3)/2) r^(-(n-1)/2) e^r
    nu = (n - 1.0) / 2.0
    c_ang = np.exp(gammaln((n - 1.0) / 2.0)) * 2.0 ** ((n - 3.0) / 2.0)
    tail = tail_power_integral(
        gs.decay_c ** (p - 1.0) * c_ang, nu * (2.0 - p), p - 2.0, R
    )
    value = surface_area(n - 1) * (core + tail)
    return GammaValue(b=b, value=value)


def base_interaction(gs: GroundState) -> float:
    """int U^(p-1) dz by the same radial quadrature gamma uses (b = 0)."""
    n, p = gs.n, gs.p
    R = gs.r_max
    grid = RadialGrid(np.linspace(0.0, R, 448 + 1))
    quad = Quadrature(grid, order=8)
    r = quad.points
    core = quad.integrate(np.abs(gs.profile(r)) ** (p - 1.0) * r ** (n - 1.0))
    nu = (n - 1.0) / 2.0
    tail = tail_power_integral(gs.decay_c ** (p - 1.0), n - 1.0 - (p - 1.0) * nu, p - 1.0, R)
    return surface_area(n) * (core + tail)


@functools.lru_cache(maxsize=None)
def _pair_constants(n: int, m: int) -> DimensionalConstants:
    from .groundstate import solve_ground_state
    from .correction import correction_profiles

    gs = solve_ground_state(n, product_exponent(n, m))
    cp = correction_profiles(gs)
    return compute_constants(gs, cp, m)


def beta_table(pairs=None, max_N: int = 9):
    """DimensionalConstants rows for each (n, m) pair.

    Default pairs: every n, m >= 3 with n + m <= max_N, ordered by (n, m).
    Rows are memoized, so repeated tables are cheap and bit-identical.
    """
    if pairs is None:
        pairs = [
            (n, m)
            for n in range(3, max_N - 2)
            for m in range(3, max_N - 2)
            if n + m <= max_N
        ]
    rows = []
    for (n, m) in pairs:
        if n < 3 or m < 3 or int(n) != n or int(m) != m:
            raise ValueError(f"pairs need integer n, m >= 3, got ({n}, {m})")
        rows.append(_pair_constants(int(n), int(m)))
    return rows


def table_csv(rows, provenance: dict | None = None) -> str:
    """Deterministic CSV: '#' provenance comments, exact header, repr floats."""
    lines = []
    if provenance:
        for key in sorted(provenance):
            lines.append(f"# {key}: {provenance[key]}")
    lines.append(",".join(CSV_COLUMNS))
    for row in rows:
        d = row.row()
        cells = []
        for k in CSV_COLUMNS:
            v = d[k]
            cells.append(str(v) if isinstance(v, int) else repr(float(v)))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def table_json(rows) -> str:
    """JSON array of row objects, key order fixed by the CSV column order."""
    return json.dumps([row.row() for row in rows], indent=2) + "\n"
