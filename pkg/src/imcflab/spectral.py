"""First nonzero eigenvalues of the Laplace and p-Laplace operators.

The Laplace case is a sparse generalized symmetric eigenproblem
K u = lambda M u (linear-element stiffness, lumped mass equal to the
geometry dual areas), solved by shift-invert Lanczos with the constant
kernel mode identified and discarded.  The p != 2 case minimizes the
p-Rayleigh quotient by projected gradient descent with restarts; the
returned value is an upper bound on the discrete minimum.

A brute-force 1-D oracle for uniform circles lives at the bottom of the
module and shares no code with the production minimizer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import minimize as sp_minimize

from .errors import DegenerateSpectrumError, SolverFailureError
from .geometry import (
    GeometryTensors,
    StarSurface,
    cotangent_weights,
    curve_segment_lengths,
)

__all__ = [
    "DiscreteOperator",
    "EigenResult",
    "PLaplaceConfig",
    "assemble",
    "lambda1_laplace",
    "rayleigh_p",
    "lambda1_plaplace",
    "circle_plaplace_oracle",
    "write_eigenfunction_csv",
]

_V0_SEED = 2654435761  # deterministic Lanczos start, fixed for reproducibility


@dataclass(frozen=True)
class DiscreteOperator:
    """Stiffness/lumped-mass pair for the surface Laplacian."""

    stiffness: sp.csr_matrix
    mass: np.ndarray
    n: int

    @property
    def count(self) -> int:
        return self.mass.shape[0]


@dataclass
class EigenResult:
    """One converged first-eigenvalue computation with diagnostics."""

    eigenvalue: float
    eigenfunction: np.ndarray
    p: float
    residual: float
    iterations: int
    restarts: int = 0
    cluster_width: float = 0.0
    normalization_defect: float = 0.0
    orthogonality_defect: float = 0.0

    def to_json(self) -> str:
        payload = {
            "eigenvalue": self.eigenvalue,
            "p": self.p,
            "residual": self.residual,
            "iterations": self.iterations,
            "restarts": self.restarts,
            "cluster_width": self.cluster_width,
            "constraint_violations": {
                "normalization": self.normalization_defect,
                "orthogonality": self.orthogonality_defect,
            },
        }
        return json.dumps(payload, indent=2, sort_keys=True)


@dataclass(frozen=True)
class PLaplaceConfig:
    """Settings for the projected-gradient p-Laplace minimizer."""

    p: float
    max_iter: int = 2000
    grad_tol: float = 1e-9
    restarts: int = 4
    step0: float = 0.25
    ls_shrink: float = 0.5
    ls_grow: float = 1.3
    ls_max: int = 40
    armijo: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.p <= 1:
            raise ValueError("p must exceed 1")
        if self.restarts < 3:
            raise ValueError("at least 3 restarts are required")


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------


def assemble(surface: StarSurface, tensors: GeometryTensors) -> DiscreteOperator:
    """Assemble the stiffness matrix and lumped mass for the surface."""
    N = surface.atlas.count
    mass = tensors.dual_areas
    if surface.atlas.n == 1:
        seg = curve_segment_lengths(surface)
        nxt = surface.atlas.successors
        i = np.arange(N)
        inv = 1.0 / seg
        rows = np.concatenate([i, nxt, i, nxt])
        cols = np.concatenate([nxt, i, i, nxt])
        vals = np.concatenate([-inv, -inv, inv, inv])
        K = sp.coo_matrix((vals, (rows, cols)), shape=(N, N)).tocsr()
    else:
        tri = surface.atlas.triangles
        cots, _ = cotangent_weights(surface.positions, tri)
        rows, cols, vals = [], [], []
        for k in range(3):
            j, l = (k + 1) % 3, (k + 2) % 3
            wjl = 0.5 * cots[:, k]  # edge (j, l) is opposite corner k
            rows += [tri[:, j], tri[:, l], tri[:, j], tri[:, l]]
            cols += [tri[:, l], tri[:, j], tri[:, j], tri[:, l]]
            vals += [-wjl, -wjl, wjl, wjl]
        K = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(N, N),
        ).tocsr()
    K = 0.5 * (K + K.T)  # exact symmetry regardless of accumulation order
    return DiscreteOperator(stiffness=K.tocsr(), mass=mass, n=surface.atlas.n)


# ---------------------------------------------------------------------------
# Laplace (p = 2)
# ---------------------------------------------------------------------------


def lambda1_laplace(op: DiscreteOperator, tol: float = 1e-9,
                    n_eigs: int = 6) -> EigenResult:
    """Smallest nonzero eigenvalue of K u = lambda M u, constants deflated.

    Shift-invert Lanczos on the diagonally shifted pencil (K + delta M, M),
    whose spectrum is the Laplace spectrum translated by delta; the kernel
    mode lands at delta and is discarded.  A near-triple cluster on round
    meshes is reported via ``cluster_width``.
    """
    N = op.count
    K = op.stiffness
    M = sp.diags(op.mass)

    # scale-aware shift from a deterministic probe vector
    rng = np.random.default_rng(_V0_SEED)
    probe = rng.standard_normal(N)
    probe -= np.sum(op.mass * probe) / np.sum(op.mass)
    rho = float(probe @ (K @ probe)) / float(np.sum(op.mass * probe**2))
    if rho <= 0.0:
        raise DegenerateSpectrumError(
            "stiffness has no energy above the constant mode")
    delta = 1e-3 * rho

    k = min(n_eigs, N - 2)
    shifted = (K + delta * M).tocsc()
    lu = spla.splu(shifted)
    count = {"n": 0}

    def solve(x):
        count["n"] += 1
        return lu.solve(x)

    opinv = spla.LinearOperator((N, N), matvec=solve)
    v0 = rng.standard_normal(N)
    mu, vecs = spla.eigsh(K + delta * M, k=k, M=M, sigma=0.0, OPinv=opinv,
                          v0=v0, which="LM")
    lams = mu - delta
    order = np.argsort(lams)
    lams, vecs = lams[order], vecs[:, order]

    nonzero = lams > max(1e-8 * abs(rho), 1e-14)
    if not np.any(nonzero):
        raise DegenerateSpectrumError("no eigenvalue above the constant mode")
    first = int(np.argmax(nonzero))
    lam = float(lams[first])
    cluster = lams[nonzero & (lams <= 1.1 * lam)]
    width = float(cluster.max() - cluster.min()) if len(cluster) > 1 else 0.0

    u = vecs[:, first]
    u = u - np.sum(op.mass * u) / np.sum(op.mass)
    u = u / np.sqrt(np.sum(op.mass * u**2))
    if u[int(np.argmax(np.abs(u)))] < 0:
        u = -u

    residual = float(np.linalg.norm(K @ u - lam * op.mass * u))
    denom = float(np.linalg.norm(op.mass * u))
    if residual > tol * denom:
        raise SolverFailureError(
            f"eigenvalue residual {residual:.3e} exceeds {tol:.1e} * ||Mu||",
            residual=residual,
        )
    area = float(np.sum(op.mass))
    return EigenResult(
        eigenvalue=lam,
        eigenfunction=u,
        p=2.0,
        residual=residual,
        iterations=count["n"],
        restarts=0,
        cluster_width=width,
        normalization_defect=abs(float(np.sum(op.mass * u**2)) - 1.0),
        orthogonality_defect=abs(float(np.sum(op.mass * u)))
        / (np.linalg.norm(u) * np.sqrt(area)),
    )


# ---------------------------------------------------------------------------
# p-Rayleigh quotient machinery
# ---------------------------------------------------------------------------


def _element_data(surface: StarSurface):
    """Per-element quantities for gradient quadrature.

    n=1: (segment_lengths, successor_index)
    n=2: (triangle_areas, hat_gradients (T,3,3))
    """
    if surface.atlas.n == 1:
        return curve_segment_lengths(surface), surface.atlas.successors
    X = surface.positions
    tri = surface.atlas.triangles
    p0, p1, p2 = X[tri[:, 0]], X[tri[:, 1]], X[tri[:, 2]]
    cross = np.cross(p1 - p0, p2 - p0)
    double_area = np.linalg.norm(cross, axis=1)
    nrm = cross / double_area[:, None]
    areas = 0.5 * double_area
    grads = np.empty((len(tri), 3, 3))
    grads[:, 0] = np.cross(nrm, p2 - p1) / double_area[:, None]
    grads[:, 1] = np.cross(nrm, p0 - p2) / double_area[:, None]
    grads[:, 2] = np.cross(nrm, p1 - p0) / double_area[:, None]
    return areas, grads


def element_gradients(surface: StarSurface, u: np.ndarray) -> np.ndarray:
    """Gradient of the linear interpolant of u on each element.

    Scalar per segment for n=1, tangent 3-vector per triangle for n=2.
    """
    if surface.atlas.n == 1:
        seg, nxt = _element_data(surface)
        return (u[nxt] - u) / seg
    _, grads = _element_data(surface)
    tri = surface.atlas.triangles
    return np.einsum("tkj,tk->tj", grads, u[tri])


def rayleigh_p(surface: StarSurface, tensors: GeometryTensors,
               u: np.ndarray, p: float) -> float:
    """p-Rayleigh quotient with elementwise gradients, dual-area quadrature."""
    den = float(np.sum(tensors.dual_areas * np.abs(u) ** p))
    if den == 0.0:
        raise ValueError("u must not vanish in the p-norm")
    if surface.atlas.n == 1:
        seg, nxt = _element_data(surface)
        num = float(np.sum(seg * np.abs((u[nxt] - u) / seg) ** p))
    else:
        areas, _ = _element_data(surface)
        g = element_gradients(surface, u)
        num = float(np.sum(areas * np.sum(g * g, axis=1) ** (p / 2.0)))
    return num / den


def _signed_power(d: np.ndarray, q: float) -> np.ndarray:
    return np.abs(d) ** q * np.sign(d)


def _p_mean_shift(u: np.ndarray, w: np.ndarray, p: float) -> float:
    """Root s of sum(w |u-s|^{p-2} (u-s)) = 0 (the weighted p-mean of u).

    Safeguarded secant on a strictly decreasing function, warm-started at 0
    since iterates arrive nearly projected.  Falls back to bisection whenever
    the secant step leaves the bracket.
    """
    lo, hi = float(u.min()), float(u.max())
    if lo == hi:
        raise ValueError("cannot project a constant vector")

    def moment(s):
        return float(np.sum(w * _signed_power(u - s, p - 1.0)))

    flo, fhi = moment(lo), moment(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    scale = float(np.sum(w * np.abs(u) ** (p - 1.0))) + 1e-300
    a, fa = lo, flo
    b, fb = hi, fhi
    s = min(max(0.0, lo), hi)
    fs = moment(s)
    for _ in range(200):
        if abs(fs) <= 1e-14 * scale:
            return s
        if fs > 0.0:
            a, fa = s, fs
        else:
            b, fb = s, fs
        if b - a <= 1e-16 * max(1.0, abs(a) + abs(b)):
            return 0.5 * (a + b)
        step = (b - a) * fa / (fa - fb) if fa != fb else 0.5 * (b - a)
        trial = a + step
        if not (a < trial < b):
            trial = 0.5 * (a + b)
        s, fs = trial, moment(trial)
    return s


def _subtract_p_mean(u: np.ndarray, w: np.ndarray, p: float) -> np.ndarray:
    """Shift u by the constant making sum(w |u|^{p-2} u) vanish exactly."""
    if p == 2.0:
        return u - np.sum(w * u) / np.sum(w)
    return u - _p_mean_shift(u, w, p)


class _PQuotient:
    """Value/gradient of the (optionally smoothed) p-Rayleigh quotient.

    ``eps`` rounds off the kinks of |.|^p, which is needed for usable descent
    when p < 2; eps = 0 is the exact quotient.
    """

    def __init__(self, surface: StarSurface, tensors: GeometryTensors, p: float):
        self.p = p
        self.eps = 0.0
        self.w = tensors.dual_areas
        self.n = surface.atlas.n
        self.count = surface.atlas.count
        if self.n == 1:
            self.seg, self.nxt = _element_data(surface)
        else:
            self.areas, self.grads = _element_data(surface)
            self.tri = surface.atlas.triangles

    def project(self, u):
        u = _subtract_p_mean(u, self.w, self.p)
        nrm = np.sum(self.w * np.abs(u) ** self.p) ** (1.0 / self.p)
        if nrm == 0.0:
            raise ValueError("projection collapsed to zero")
        return u / nrm

    def num_and_grad(self, u):
        p, e2 = self.p, self.eps**2
        if self.n == 1:
            d = (u[self.nxt] - u) / self.seg
            sq = d * d + e2
            num = float(np.sum(self.seg * sq ** (p / 2.0)))
            gseg = p * sq ** (p / 2.0 - 1.0) * d
            grad = np.zeros_like(u)
            np.add.at(grad, self.nxt, gseg)
            np.subtract.at(grad, np.arange(self.count), gseg)
            return num, grad
        g = np.einsum("tkj,tk->tj", self.grads, u[self.tri])
        sq = np.sum(g * g, axis=1) + e2
        num = float(np.sum(self.areas * sq ** (p / 2.0)))
        with np.errstate(divide="ignore"):
            coef = np.where(sq > 0, sq ** (p / 2.0 - 1.0), 0.0)
        gt = (p * self.areas * coef)[:, None] * g
        contrib = np.einsum("tkj,tj->tk", self.grads, gt)
        grad = np.zeros_like(u)
        np.add.at(grad, self.tri.ravel(), contrib.ravel())
        return num, grad

    def den_and_grad(self, u):
        p, e2 = self.p, self.eps**2
        sq = u * u + e2
        den = float(np.sum(self.w * sq ** (p / 2.0)))
        grad = p * self.w * sq ** (p / 2.0 - 1.0) * u
        return den, grad

    def value(self, u):
        num, _ = self.num_and_grad(u)
        den, _ = self.den_and_grad(u)
        return num / den

    def value_and_grad(self, u):
        num, gn = self.num_and_grad(u)
        den, gd = self.den_and_grad(u)
        val = num / den
        return val, (gn - val * gd) / den

    def tangential_norm(self, u, grad):
        """Gradient norm with the constraint directions removed."""
        d1 = self.den_and_grad(u)[1]
        d2 = (self.p - 1) * self.w * (u * u + self.eps**2) ** (self.p / 2.0 - 1.0)
        g = grad.copy()
        for d in (d1, d2):
            nn = float(d @ d)
            if nn > 0:
                g -= (g @ d) / nn * d
        return float(np.linalg.norm(g)) / np.sqrt(self.count)

    def penalized(self, u, rho=10.0):
        """Smoothed quotient plus a scale-invariant moment penalty.

        The penalty vanishes (with vanishing gradient) on the constraint set,
        so it does not bias the minimum; it only blocks the collapse of
        unconstrained descent onto constants.
        """
        p, e2 = self.p, self.eps**2
        num, gn = self.num_and_grad(u)
        den, gd = self.den_and_grad(u)
        val = num / den
        gval = (gn - val * gd) / den
        sq = u * u + e2
        mom = float(np.sum(self.w * sq ** (p / 2.0 - 1.0) * u))
        if e2 == 0.0:
            gmom = self.w * (p - 1.0) * np.abs(u) ** (p - 2.0)
        else:
            gmom = self.w * sq ** (p / 2.0 - 2.0) * ((p - 1.0) * u * u + e2)
        dpow = den ** (2.0 * (p - 1.0) / p)
        pen = rho * mom * mom / dpow
        gpen = rho * (
            2.0 * mom * gmom / dpow
            - mom * mom * (2.0 * (p - 1.0) / p) * gd / (dpow * den)
        )
        return val + pen, gval + gpen


def _smooth_field(surface: StarSurface, rng) -> np.ndarray:
    """Random smooth start for the p-minimizer: linear plus a little quadratic
    in the (radius-normalized) position, so it overlaps the fundamental branch
    instead of parking on higher oscillatory critical points."""
    X = surface.positions / np.mean(surface.radii)
    dim = X.shape[1]
    lin = rng.standard_normal(dim)
    quad = rng.standard_normal((dim, dim))
    return X @ lin + 0.3 * np.einsum("ni,ij,nj->n", X, quad, X)


def lambda1_plaplace(surface: StarSurface, tensors: GeometryTensors,
                     cfg: PLaplaceConfig,
                     extra_starts: tuple = ()) -> EigenResult:
    """Upper bound on the first nonzero p-Laplace eigenvalue.

    Projected gradient descent (Barzilai-Borwein steps, nonmonotone
    backtracking) on the p-Rayleigh quotient subject to unit p-norm and
    vanishing |u|^{p-2} u moment, re-projected every iterate; p < 2 runs a
    smoothed quasi-Newton continuation instead (kinked functional).  Best
    value over cfg.restarts starts; the first start is warm from the p = 2
    eigenfunction, and callers may inject further warm starts (e.g. the
    solution on the previous flow snapshot).
    """
    q = _PQuotient(surface, tensors, cfg.p)
    warm = lambda1_laplace(assemble(surface, tensors)).eigenfunction
    rand_count = max(1, cfg.restarts - 1 - len(extra_starts))
    seeds = np.random.SeedSequence(cfg.seed).spawn(rand_count)
    starts = [warm] + [np.asarray(u, dtype=float) for u in extra_starts] + [
        _smooth_field(surface, np.random.default_rng(s))
        for s in seeds
    ]

    def descend(u, max_iter, gtol):
        nonlocal total_iters, any_step
        val, grad = q.value_and_grad(u)
        eta = cfg.step0 / max(1.0, val)
        u_prev = grad_prev = None
        window = [val]
        for _ in range(max_iter):
            total_iters += 1
            res = q.tangential_norm(u, grad)
            if res <= gtol * max(1.0, val):
                break
            if u_prev is not None:
                du = u - u_prev
                dg = grad - grad_prev
                bb = float(du @ dg)
                if bb > 0:
                    eta = float(du @ du) / bb
            eta = min(max(eta, 1e-18), 1e6)
            ceiling = max(window)
            stepped = False
            for _ls in range(cfg.ls_max):
                try:
                    trial = q.project(u - eta * grad)
                except ValueError:
                    eta *= cfg.ls_shrink
                    continue
                tval = q.value(trial)
                if tval <= ceiling - cfg.armijo * eta * float(grad @ grad):
                    u_prev, grad_prev = u, grad
                    u, val = trial, tval
                    _, grad = q.value_and_grad(u)
                    window.append(val)
                    if len(window) > 10:
                        window.pop(0)
                    eta *= cfg.ls_grow
                    stepped = True
                    any_step = True
                    break
                eta *= cfg.ls_shrink
            if not stepped:
                break
        return u

    best_val = np.inf
    best_u = None
    best_res = np.inf
    total_iters = 0
    any_step = False
    for u0 in starts:
        try:
            u = q.project(u0.astype(float))
        except ValueError:
            continue
        if cfg.p >= 2.0:
            q.eps = 0.0
            u = descend(u, cfg.max_iter, cfg.grad_tol)
        else:
            # p < 2: kinked functional; anneal the smoothing to zero under
            # quasi-Newton steps, with the feasibility drift blocked by the
            # moment penalty, then re-project exactly
            scale_u = float(np.max(np.abs(u)))
            for eps in (1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-13):
                q.eps = eps * scale_u
                res = sp_minimize(
                    q.penalized, u, jac=True, method="L-BFGS-B",
                    options=dict(maxiter=cfg.max_iter, ftol=1e-18, gtol=1e-12),
                )
                u = res.x
                total_iters += int(res.nit)
                any_step = any_step or res.nit > 0
            u = q.project(u)
        q.eps = 0.0
        val = q.value(u)
        if val < best_val:
            best_val = val
            best_u = u
            best_res = q.tangential_norm(u, q.value_and_grad(u)[1])

    if best_u is None or (not any_step and not np.isfinite(best_val)):
        raise SolverFailureError("all p-Laplace restarts failed")
    if best_u[int(np.argmax(np.abs(best_u)))] < 0:
        best_u = -best_u
    den = float(np.sum(tensors.dual_areas * np.abs(best_u) ** cfg.p))
    mom = float(np.sum(tensors.dual_areas
                       * np.abs(best_u) ** (cfg.p - 1) * np.sign(best_u)))
    return EigenResult(
        eigenvalue=float(best_val),
        eigenfunction=best_u,
        p=cfg.p,
        residual=best_res,
        iterations=total_iters,
        restarts=cfg.restarts,
        normalization_defect=abs(den - 1.0),
        orthogonality_defect=abs(mom),
    )


# ---------------------------------------------------------------------------
# independent 1-D oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    value: float
    dispersion: float
    restarts: int

    def __float__(self):
        return self.value


def circle_plaplace_oracle(L: float, p: float, N: int, seed: int = 12345,
                           detail: bool = False):
    """Brute-force first p-Laplace eigenvalue of a uniform N-point circle.

    Deliberately self-contained: its own quotient, gradient, projection and
    annealed descent, so it can serve as ground truth for the mesh-based
    minimizer.  Deterministic for a given seed.  Returns the best value over
    a sinusoid start plus random restarts; with detail=True also reports the
    relative spread of the converged restart values.
    """
    if L <= 0:
        raise ValueError("circumference must be positive")
    if p <= 1:
        raise ValueError("p must exceed 1")
    if N < 64:
        raise ValueError("oracle needs at least 64 points")

    h = L / N
    s_nodes = h * np.arange(N)
    rng = np.random.default_rng(seed)

    def quotient(u, eps=0.0):
        d = (np.roll(u, -1) - u) / h
        num = h * np.sum((d * d + eps * eps) ** (p / 2.0))
        den = h * np.sum((u * u + eps * eps) ** (p / 2.0))
        return num / den

    def grad_quotient(u, eps=0.0):
        d = (np.roll(u, -1) - u) / h
        a = (d * d + eps * eps) ** (p / 2.0 - 1.0) * d
        gnum = p * (np.roll(a, 1) - a)  # d/du_i of h * sum |d_j|^p
        num = h * np.sum((d * d + eps * eps) ** (p / 2.0))
        den = h * np.sum((u * u + eps * eps) ** (p / 2.0))
        gden = p * h * (u * u + eps * eps) ** (p / 2.0 - 1.0) * u
        val = num / den
        return val, (gnum - val * gden) / den

    def project(u):
        # weighted p-mean via bracketed secant, then unit p-norm
        lo, hi = float(u.min()), float(u.max())
        if lo == hi:
            raise ValueError("constant vector")

        def moment(c):
            d = u - c
            return float(np.sum(np.abs(d) ** (p - 1) * np.sign(d)))

        a, b = lo, hi
        fa, fb = moment(a), moment(b)
        c = min(max(0.0, a), b)
        fc = moment(c)
        scale = float(np.sum(np.abs(u) ** (p - 1))) + 1e-300
        for _ in range(200):
            if abs(fc) <= 1e-14 * scale or b - a <= 1e-16 * (1.0 + abs(a) + abs(b)):
                break
            if fc > 0.0:
                a, fa = c, fc
            else:
                b, fb = c, fc
            t = a + (b - a) * fa / (fa - fb) if fa != fb else 0.5 * (a + b)
            if not (a < t < b):
                t = 0.5 * (a + b)
            c, fc = t, moment(t)
        u = u - c
        return u / (h * np.sum(np.abs(u) ** p)) ** (1.0 / p)

    rho = 10.0

    def penalized(u, eps):
        # smoothed quotient plus scale-invariant moment penalty; the penalty
        # is zero with zero gradient on the constraint set
        e2 = eps * eps
        val, gval = grad_quotient(u, eps)
        den = h * np.sum((u * u + e2) ** (p / 2.0))
        gden = p * h * (u * u + e2) ** (p / 2.0 - 1.0) * u
        mom = h * np.sum((u * u + e2) ** (p / 2.0 - 1.0) * u)
        if e2 == 0.0:
            gmom = h * (p - 1.0) * np.abs(u) ** (p - 2.0)
        else:
            gmom = h * (u * u + e2) ** (p / 2.0 - 2.0) * ((p - 1.0) * u * u + e2)
        dpow = den ** (2.0 * (p - 1.0) / p)
        pen = rho * mom * mom / dpow
        gpen = rho * (2.0 * mom * gmom / dpow
                      - mom * mom * (2.0 * (p - 1.0) / p) * gden / (dpow * den))
        return val + pen, gval + gpen

    def lbfgs(u, stages, maxiter=3000):
        for eps in stages:
            res = sp_minimize(penalized, u, args=(eps,), jac=True,
                              method="L-BFGS-B",
                              options=dict(maxiter=maxiter, ftol=1e-18,
                                           gtol=1e-12))
            u = res.x
        return u

    jiggle_rng = np.random.default_rng(seed + 1)

    def minimize(u0):
        # anneal the smoothing parameter to zero under quasi-Newton steps;
        # p >= 2 is C^1 so a single unsmoothed stage suffices
        if p < 2.0:
            u = lbfgs(project(u0), (1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-13))
        else:
            u = lbfgs(project(u0), (0.0,), maxiter=20000)
        u = project(u)
        best = quotient(u)
        if p < 2.0:
            # the kinked functional pins the translation phase to the grid;
            # small seeded kicks plus re-descent hop out of pinned saddles
            for _ in range(3):
                kick = 1e-5 * np.max(np.abs(u)) * jiggle_rng.standard_normal(N)
                u2 = project(lbfgs(u + kick, (1e-8, 1e-13)))
                v2 = quotient(u2)
                if v2 < best:
                    u, best = u2, v2
        return best, u

    # restart pool: exact sinusoid plus random smooth low-frequency fields,
    # which explore the constraint set without parking on higher modes
    starts = [np.sin(2.0 * np.pi * s_nodes / L)]
    for _ in range(8):
        u0 = np.zeros(N)
        for mode in range(1, 5):
            amp_c, amp_s = rng.standard_normal(2) / mode
            u0 += amp_c * np.cos(2.0 * np.pi * mode * s_nodes / L)
            u0 += amp_s * np.sin(2.0 * np.pi * mode * s_nodes / L)
        starts.append(u0)

    results = [minimize(u0)[0] for u0 in starts]
    best = min(results)
    dispersion = (max(results) - best) / best
    if detail:
        return OracleResult(value=best, dispersion=dispersion,
                            restarts=len(results))
    return best


def write_eigenfunction_csv(u: np.ndarray, path) -> None:
    """Per-vertex scalar values, one row per atlas vertex, in atlas order."""
    with open(path, "w") as fh:
        fh.write("u\n")
        for x in u:
            fh.write(f"{float(x)!r}\n")
