#!/usr/bin/env python3
"""First nonzero Laplace and p-Laplace eigenvalues.

The Laplace value comes from a deflated sparse generalized eigenproblem;
the p-Laplace value from constrained minimization of the p-Rayleigh
quotient.  Both are cross-validated: against closed forms on spheres and
circles, against each other at p = 2, and against a self-contained 1-D
brute-force oracle on the circle for p != 2.
"""

import numpy as np

from imcflab import (
    Ellipsoid,
    PLaplaceConfig,
    Sphere,
    assemble,
    build_atlas,
    circle_plaplace_oracle,
    compute_tensors,
    embed,
    lambda1_laplace,
    lambda1_plaplace,
)

print("=" * 72)
print("FIRST NONZERO EIGENVALUES".center(72))
print("=" * 72)

# --- Laplace against closed forms -------------------------------------------
print("\nLaplace eigenvalues vs closed forms:")
atlas = build_atlas("icosphere", 4)
s = embed(atlas, Sphere(1.0))
res = lambda1_laplace(assemble(s, compute_tensors(s)))
print(f"  unit sphere level 4 : {res.eigenvalue:.8f}   (exact 2;"
      f" cluster width {res.cluster_width:.1e})")

catlas = build_atlas("circle", 512)
c = embed(catlas, Sphere(1.0))
resc = lambda1_laplace(assemble(c, compute_tensors(c)))
print(f"  unit circle N=512   : {resc.eigenvalue:.8f}   (exact 1)")

s2 = embed(build_atlas("icosphere", 3), Sphere(2.0))
res2 = lambda1_laplace(assemble(s2, compute_tensors(s2)))
print(f"  sphere radius 2     : {res2.eigenvalue:.8f}   (exact 0.5)")

# --- p = 2 cross-validation of the two solvers -------------------------------
print("\np = 2: minimization against the eigensolver:")
for shape, label in ((Sphere(1.0), "sphere"), (Ellipsoid(1.5, 1, 1), "ellipsoid")):
    surf = embed(build_atlas("icosphere", 3), shape)
    tens = compute_tensors(surf)
    lam = lambda1_laplace(assemble(surf, tens)).eigenvalue
    lam_p = lambda1_plaplace(surf, tens, PLaplaceConfig(p=2.0)).eigenvalue
    print(f"  {label:>9}: eigensolver {lam:.8f}  minimizer {lam_p:.8f}")

# --- p != 2 against the independent circle oracle ----------------------------
print("\np != 2 on the circle, production solver vs brute-force oracle:")
ctens = compute_tensors(c)
for p in (1.5, 3.0):
    ora = circle_plaplace_oracle(2 * np.pi, p, 512, detail=True)
    lam_p = lambda1_plaplace(c, ctens, PLaplaceConfig(p=p)).eigenvalue
    print(f"  p={p:g}: solver {lam_p:.9f}  oracle {ora.value:.9f}"
          f"  (restart spread {ora.dispersion:.1e})")

# --- dilation: the quotient is p-homogeneous of degree -p ---------------------
print("\ndilation scaling on the sphere, p = 3:")
surf = embed(build_atlas("icosphere", 3), Sphere(1.0))
tens = compute_tensors(surf)
cfg = PLaplaceConfig(p=3.0, max_iter=800)
lam = lambda1_plaplace(surf, tens, cfg).eigenvalue
big = surf.with_radii(2 * surf.radii)
lam_big = lambda1_plaplace(big, compute_tensors(big), cfg).eigenvalue
print(f"  lambda(R)  = {lam:.6f}")
print(f"  lambda(2R) = {lam_big:.6f}   ratio * 2^p = {lam_big * 8 / lam:.6f}"
      f" (exact 1)")
