#!/usr/bin/env python3
"""Inverse mean curvature flow on exact round shapes.

A sphere flowing with speed 1/H stays a sphere and expands like e^{t/n}:
the run below checks the radius law, the exact exponential area growth,
first-order convergence in the time step, and the two candidate decay
rates for the mean curvature (the sphere rate -1/n against the unit rate
-1; the two disagree for n = 2 and the fit settles the question).
"""

import numpy as np

from imcflab import (
    FlowConfig,
    IMCF,
    Sphere,
    build_atlas,
    embed,
    fit_H_decay,
    rescale_snapshot,
    run,
)

print("=" * 72)
print("SPHERE FLOW EXACTNESS".center(72))
print("=" * 72)

atlas = build_atlas("icosphere", 3)
sphere = embed(atlas, Sphere(1.0))

# --- radius law r(t) = e^{t/2} --------------------------------------------
trace = run(sphere, IMCF, FlowConfig(t_end=1.0, dt=1e-3, sample_interval=0.1))
r_final = trace.column("r_mean")[-1]
print(f"\nmean radius at t=1: {r_final:.6f}  (exact e^0.5 = {np.e**0.5:.6f},"
      f" rel err {abs(r_final - np.e**0.5)/np.e**0.5:.2e})")

# --- area law A(t) = A(0) e^t ----------------------------------------------
dev = np.abs(np.log(trace.column("area") / trace.column("area")[0])
             - trace.times)
print(f"max |log(A(t)/A(0)) - t| = {dev.max():.2e}")

# --- the rescaled flow fixes the sphere ------------------------------------
tilde = rescale_snapshot(trace.snapshots[-1])
print(f"rescaled radii at t=1: max |r~ - 1| = "
      f"{np.max(np.abs(tilde.radii - 1.0)):.2e}")

# --- first-order convergence in dt ------------------------------------------
errs = {}
for dt in (2e-3, 1e-3, 5e-4):
    tr = run(sphere, IMCF, FlowConfig(t_end=1.0, dt=dt, sample_interval=1.0))
    errs[dt] = abs(tr.column("r_mean")[-1] - np.e**0.5)
print("\ntime-step refinement of the t=1 radius error:")
for dt, e in errs.items():
    print(f"  dt={dt:g}: error {e:.3e}")
print(f"  ratios: {errs[2e-3]/errs[1e-3]:.2f}, {errs[1e-3]/errs[5e-4]:.2f} "
      f"(first order: ~2)")

# --- H decay: the dual rate comparison --------------------------------------
trace2 = run(sphere, IMCF, FlowConfig(t_end=2.0, dt=1e-3, sample_interval=0.1))
fit = fit_H_decay(trace2)
print(f"\nlog H_max fit slope: {fit.slope:.4f}")
print(f"  deviation from the sphere rate -1/n = -0.5 : "
      f"{fit.deviation_from_sphere_rate:.2e}")
print(f"  deviation from a unit e^-t rate            : "
      f"{fit.deviation_from_unit_rate:.2f}")
print("  -> the measurement matches -1/n; the unit-rate comparison is kept")
print("     visible because the two normalizations circulate side by side.")
