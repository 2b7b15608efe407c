"""Second-order correction profiles attached to a ground state.

Two profiles feed the curvature corrections of a concentrating bump:

* psi: the radial factor of the quadratic-harmonic correction, solving

      -psi'' - (n+3)/r psi' + psi - (p-1) U^(p-2) psi = U'/r,
      psi'(0) = 0,  psi -> 0 at infinity,

  which is the radial reduction of L0(psi(|z|) z_k z_l) = (U'/|z|) z_k z_l
  for k != l, where L0 v = -Lap v + v - (p-1) U^(p-2) v;

* v2base(r) = U'(r) r / 2 - U(r) / (2 - p), the explicit radial profile with
  L0 v2base = -U.

The module also provides independent verification helpers: operator
identities recomputed from node data through separate code paths, a
full-dimension finite-difference check of the psi equation, and the
odd-moment kernel orthogonality integral.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.linalg import solve_banded

from .groundstate import GroundState
from .radial import Quadrature, RadialFunction, TailModel, moment_reduce


class SingularSystem(RuntimeError):
    """The discretized correction operator could not be solved."""


@dataclass
class CorrectionProfiles:
    gs: GroundState
    psi: RadialFunction
    v2base: RadialFunction
    discrete_residual: float
    tail_exponent: float

    def to_dict(self) -> dict:
        return {
            "n": self.gs.n,
            "p": self.gs.p,
            "grid": self.psi.grid.nodes.tolist(),
            "psi_values": self.psi.values.tolist(),
            "v2base_values": self.v2base.values.tolist(),
            "discrete_residual": self.discrete_residual,
            "tail_exponent": self.tail_exponent,
        }


def _tridiag_solve(lower, diag, upper, rhs):
    """Banded tridiagonal solve; raises SingularSystem on failure."""
    m = diag.size
    ab = np.zeros((3, m))
    ab[0, 1:] = upper
    ab[1, :] = diag
    ab[2, :-1] = lower
    try:
        x = solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare path
        raise SingularSystem(str(exc)) from exc
    except ValueError as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystem("tridiagonal solve produced non-finite values")
    return x


def _assemble_and_solve(r, U, dU, n, p):
    """Tridiagonal FD solve of the psi equation on nodes r; returns
    (psi values, max discrete residual)."""
    m = r.size
    pot = 1.0 - (p - 1.0) * np.abs(U) ** (p - 2.0)
    lower = np.zeros(m - 1)
    diag = np.zeros(m)
    upper = np.zeros(m - 1)
    rhs = np.zeros(m)

    # r = 0 row: psi even, operator limit -2(n+4) psi_2 + pot psi_0 = U''(0)
    h1 = r[1] - r[0]
    u2pp0 = (U[0] - np.abs(U[0]) ** (p - 1.0)) / n  # U''(0) from the ODE
    diag[0] = 2.0 * (n + 4.0) / h1 ** 2 + pot[0]
    upper[0] = -2.0 * (n + 4.0) / h1 ** 2
    rhs[0] = u2pp0

    hm = r[1:-1] - r[:-2]
    hp = r[2:] - r[1:-1]
    den = hm * hp * (hm + hp)
    # second derivative weights
    w2_prev = 2.0 * hp / den
    w2_mid = -2.0 * (hm + hp) / den
    w2_next = 2.0 * hm / den
    # first derivative weights
    w1_prev = -(hp ** 2) / den
    w1_mid = (hp ** 2 - hm ** 2) / den
    w1_next = hm ** 2 / den
    coef1 = (n + 3.0) / r[1:-1]
    lower[:-1] = -w2_prev - coef1 * w1_prev
    diag[1:-1] = -w2_mid - coef1 * w1_mid + pot[1:-1]
    upper[1:] = -w2_next - coef1 * w1_next
    rhs[1:-1] = dU[1:-1] / r[1:-1]

    diag[-1] = 1.0
    lower[-1] = 0.0
    rhs[-1] = 0.0

    psi_vals = _tridiag_solve(lower, diag, upper, rhs)

    res = diag * psi_vals
    res[:-1] += upper * psi_vals[1:]
    res[1:] += lower * psi_vals[:-1]
    res -= rhs
    return psi_vals, float(np.max(np.abs(res)))


def _solve_psi_core(gs: GroundState, residual_tol: float):
    """(psi RadialFunction, discrete residual, fitted tail log-slope).

    Second-order centered differences (three-point nonuniform stencils), a
    regularized even-symmetry row at r = 0 and a Dirichlet zero at r_max,
    solved on the grid and on its midpoint refinement, then Richardson-
    extrapolated at the nodes.
    """
    n, p = gs.n, gs.p
    r = gs.grid.nodes
    psi_c, res_c = _assemble_and_solve(r, gs.profile.values, gs.profile.d1, n, p)

    r_fine = np.sort(np.concatenate([r, 0.5 * (r[1:] + r[:-1])]))
    psi_f, res_f = _assemble_and_solve(
        r_fine, gs.profile(r_fine), gs.profile.deriv1(r_fine), n, p
    )
    # cell-split refinement quarters the h^2 error pointwise
    psi_vals = (4.0 * psi_f[::2] - psi_c) / 3.0

    discrete_residual = max(res_c, res_f)
    if discrete_residual > residual_tol:
        raise SingularSystem(
            f"discrete residual {discrete_residual:.2e} exceeds {residual_tol:.2e}"
        )

    # tail exponent from a mid-tail window, clear of the Dirichlet cap
    r_max = gs.r_max
    win = (r > 0.45 * r_max) & (r < 0.65 * r_max) & (np.abs(psi_vals) > 0)
    slope = np.nan
    if win.sum() >= 10:
        A = np.stack([np.ones(win.sum()), r[win]], axis=1)
        slope = float(np.linalg.lstsq(A, np.log(np.abs(psi_vals[win])), rcond=None)[0][1])

    # derivative data: quintic-spline first derivative (FD jitter in d1 would
    # put C2 kinks in the interpolant), second derivative from the ODE
    U = gs.profile.values
    dU = gs.profile.d1
    pot = 1.0 - (p - 1.0) * np.abs(U) ** (p - 2.0)
    u2pp0 = (U[0] - np.abs(U[0]) ** (p - 1.0)) / n
    d1 = make_interp_spline(r, psi_vals, k=5).derivative(1)(r)
    d1[0] = 0.0
    d2 = np.empty(r.size)
    d2[1:] = -(n + 3.0) * d1[1:] / r[1:] + pot[1:] * psi_vals[1:] - dU[1:] / r[1:]
    d2[0] = (pot[0] * psi_vals[0] - u2pp0) / (n + 4.0)

    # amplitude of the exp(-r) r^(-(n-1)/2) far field, for tail completion
    nu = (n - 1.0) / 2.0
    fitwin = (r > 0.5 * r_max) & (r < 0.7 * r_max)
    shape = r[fitwin] ** (-nu) * np.exp(-r[fitwin])
    c_psi = float(np.dot(shape, psi_vals[fitwin]) / np.dot(shape, shape))
    psi_fn = RadialFunction(gs.grid, psi_vals, d1, d2, tail=TailModel(c_psi, -nu, 1.0))
    return psi_fn, discrete_residual, slope


def solve_psi(gs: GroundState, residual_tol: float = 1e-8) -> RadialFunction:
    """The radial correction factor psi on the ground-state grid."""
    return _solve_psi_core(gs, residual_tol)[0]


def correction_profiles(gs: GroundState, residual_tol: float = 1e-8) -> CorrectionProfiles:
    """Solve psi, build v2base, and bundle both with diagnostics."""
    psi_fn, resid, slope = _solve_psi_core(gs, residual_tol)
    return CorrectionProfiles(
        gs=gs,
        psi=psi_fn,
        v2base=build_v2base(gs),
        discrete_residual=resid,
        tail_exponent=slope,
    )


def build_v2base(gs: GroundState) -> RadialFunction:
    """v2base = U' r / 2 - U / (2 - p); satisfies L0 v2base = -U."""
    n, p = gs.n, gs.p
    r = gs.grid.nodes
    U, dU, d2U = gs.profile.values, gs.profile.d1, gs.profile.d2
    d3U = np.empty_like(U)
    d3U[1:] = np.asarray(gs.deriv3(r[1:]))
    d3U[0] = 0.0  # odd derivative of an even profile
    q = 1.0 / (2.0 - p)
    vals = 0.5 * dU * r - q * U
    d1 = 0.5 * (d2U * r + dU) - q * dU
    d2 = 0.5 * (d3U * r + 2.0 * d2U) - q * d2U
    nu = (n - 1.0) / 2.0
    # far field: v2base ~ -U * (r/2 + 1/(2-p) + ...), keep the leading power
    tail = TailModel(-0.5 * gs.decay_c, 1.0 - nu, 1.0) if np.isfinite(gs.decay_c) else None
    return RadialFunction(gs.grid, vals, d1, d2, tail=tail)


_TEST_WIDTHS = (0.8, 1.5, 3.0)


def _weak_residuals(gs: GroundState):
    """Weak-form relative residuals of the two first-order identities.

    Third-order differentiation of tabulated values amplifies the solver's
    ~1e-10 value noise past 1e-4, so identities involving U''' are paired
    against analytic Gaussian test profiles instead: L0 and Lap are
    self-adjoint in the radial volume measure and boundary terms decay, so
    every derivative lands on the test function and only (U, U') node data
    enter.  Returns (e1, e3) maximized over test widths, where

      e1: L0(U' r) = -2 Lap U
      e3: L0(v2base) = -U
    """
    n, p = gs.n, gs.p
    quad = Quadrature(gs.grid)
    r = quad.points
    U, dU = gs.profile(r), gs.profile.deriv1(r)
    Upm2 = np.abs(U) ** (p - 2.0)
    q = 1.0 / (2.0 - p)
    e1 = 0.0
    e3 = 0.0
    for sig in _TEST_WIDTHS:
        phi = np.exp(-(r ** 2) / (2.0 * sig ** 2))
        dphi = -r / sig ** 2 * phi
        d2phi = (r ** 2 / sig ** 2 - 1.0) / sig ** 2 * phi
        lap_phi = d2phi + (n - 1.0) * dphi / r
        L0phi = -lap_phi + phi - (p - 1.0) * Upm2 * phi
        vol = r ** (n - 1.0)
        rhs1 = quad.integrate(-2.0 * U * lap_phi * vol)
        lhs1 = quad.integrate(dU * r * L0phi * vol)
        e1 = max(e1, abs(lhs1 - rhs1) / abs(rhs1))
        rhs3 = quad.integrate(-U * phi * vol)
        lhs3 = quad.integrate((0.5 * dU * r - q * U) * L0phi * vol)
        e3 = max(e3, abs(lhs3 - rhs3) / abs(rhs3))
    return e1, e3


def verify_L0_identities(gs: GroundState) -> dict:
    """Relative residuals of two exact operator identities.

    e1 checks L0(U' r) = -2 Lap U in weak form (see _weak_residuals).
    e2 checks L0(U) = (2-p) U^(p-1) in strong form, with U' and U'' taken
    from a fresh quintic spline through the stored node values only, and is
    reported as a weighted-L2 relative residual over the grid interior.
    """
    n, p = gs.n, gs.p
    # every 3rd node: differentiation amplifies value noise by 1/h^2, and the
    # wider spacing buys a 9x noise cut at negligible truncation cost
    r_all = gs.grid.nodes[::3]
    spline = make_interp_spline(r_all, gs.profile.values[::3], k=5)
    rb = r_all[-1] * 0.75  # keep clear of spline boundary artifacts
    rs = r_all[(r_all > 0) & (r_all < rb)]
    Us = spline(rs)
    dUs = spline.derivative(1)(rs)
    d2Us = spline.derivative(2)(rs)
    Upm2 = np.abs(Us) ** (p - 2.0)
    wgt = rs ** ((n - 1.0) / 2.0)
    strong = -(d2Us + (n - 1.0) * dUs / rs) + Us - (p - 1.0) * Upm2 * Us
    scale = (2.0 - p) * Upm2 * Us
    e2 = float(np.linalg.norm((strong - scale) * wgt) / np.linalg.norm(scale * wgt))
    e1, _ = _weak_residuals(gs)
    return {"e1": e1, "e2": e2}


def v2base_identity_residual(gs: GroundState) -> float:
    """Relative residual of L0(v2base) = -U, in the same weak form as e1."""
    return _weak_residuals(gs)[1]


def psi_equation_residual(gs: GroundState, psi: RadialFunction) -> float:
    """Continuous-equation residual of psi at cell midpoints (consistency)."""
    n, p = gs.n, gs.p
    nodes = gs.grid.nodes
    r = 0.5 * (nodes[1:] + nodes[:-1])
    vals, dvals, d2vals = psi(r), psi.deriv1(r), psi.deriv2(r)
    U, dU = gs.profile(r), gs.profile.deriv1(r)
    res = -d2vals - (n + 3.0) * dvals / r + vals - (p - 1.0) * np.abs(U) ** (p - 2.0) * vals - dU / r
    return float(np.max(np.abs(res)))


def operator_identity_check(
    gs: GroundState,
    psi: RadialFunction,
    n_samples: int = 4000,
    h: float = 0.005,
    seed: int = 7,
) -> float:
    """Full-dimension check of L0(psi(|z|) z1 z2) = (U'/|z|) z1 z2.

    Applies a (2n+1)-point second-order finite-difference Laplacian in all n
    coordinates at scattered sample points (no radial reduction anywhere),
    and returns the maximum relative deviation over samples where the target
    is not vanishingly small.
    """
    n, p = gs.n, gs.p
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(n_samples, n))
    radii = rng.uniform(0.4, 4.0, size=n_samples)
    pts *= (radii / np.linalg.norm(pts, axis=1))[:, None]

    def field(z):
        rr = np.linalg.norm(z, axis=-1)
        return psi(rr) * z[..., 0] * z[..., 1]

    lap = -2.0 * n * field(pts) / h ** 2
    for k in range(n):
        shift = np.zeros(n)
        shift[k] = h
        lap += (field(pts + shift) + field(pts - shift)) / h ** 2

    r = np.linalg.norm(pts, axis=1)
    U = gs.profile(r)
    F = field(pts)
    lhs = -lap + F - (p - 1.0) * np.abs(U) ** (p - 2.0) * F
    target = gs.profile.deriv1(r) / r * pts[:, 0] * pts[:, 1]
    floor = 1e-2 * np.max(np.abs(target))
    mask = np.abs(target) > floor
    return float(np.max(np.abs(lhs[mask] - target[mask]) / np.abs(target[mask])))


def kernel_orthogonality(gs: GroundState) -> float:
    """Pairing of the representative quadratic-harmonic source with a
    translation mode: int (U'/|z|) z1 z2 * d_1 U dz.

    The integrand is (U'/|z|)^2 z1^2 z2, odd in z2, so the moment reduction
    returns exactly zero; kept as an explicit operation for the ledger.
    """
    quad = Quadrature(gs.grid)

    def profile(r):
        return (gs.profile.deriv1(r) / r) ** 2

    return moment_reduce(profile, "z1^2*z2", gs.n, quad=quad)
