"""Curvature of warped spheres and the concentration functional phi.

A warped sphere dt^2 + f(t)^2 g_(S^(n-1)) has closed-form curvature in f
and its derivatives.  phi combines s, lap s, |Ric|^2 and |Riem|^2 with
the dimensional constants; its interior critical points are where peaks
can sit.  On the round sphere phi is constant, so the scan reports a
warning instead of a critical point.
"""

import numpy as np

from multipeak import (
    NoInteriorCritical,
    RoundSphere,
    WarpedSphere,
    compute_constants,
    correction_profiles,
    phi,
    scan_phi,
    solve_ground_state,
)

gs = solve_ground_state(3, 3.0)
dc = compute_constants(gs, correction_profiles(gs), 3)

# a bumpy but smoothly closing warp: f ~ t at 0, ~ (pi - t) at pi
f = lambda t: np.sin(t) * (1.0 + 0.15 * np.sin(t) ** 2)
M = WarpedSphere(3, f)

print("curvature along the warped meridian")
print("      t        s        lap_s      |Ric|^2   |Riem|^2     phi")
for t in np.linspace(0.4, np.pi - 0.4, 7):
    c = M.curvature_at(t)
    print(f"  {t:7.4f} {c.s:9.5f} {c.lap_s:10.5f} {c.ric2:9.5f} "
          f"{c.riem2:9.5f} {phi(c, dc):10.4f}")

scan = scan_phi(M, dc)
print("\ncritical points of phi")
for c in scan.points:
    print(f"  t = {c.t:.8f}  phi = {c.phi:.6f}  ({c.kind})")
mid = min(scan.points, key=lambda c: abs(c.t - np.pi / 2))
print(f"symmetric point sits at the equator: |t - pi/2| = "
      f"{abs(mid.t - np.pi / 2):.2e}")

# the round sphere has constant phi: no interior critical point to find
try:
    scan_phi(RoundSphere(3, 1.0), dc)
except NoInteriorCritical as e:
    print(f"\nround sphere: {e} "
          f"(phi = {e.scan.phi[0]:.6f} everywhere)")
