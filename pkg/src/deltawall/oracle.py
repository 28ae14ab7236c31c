"""Truncated-basis diagonalization of H(g, X) in the unperturbed sine basis.

In the basis |m> of the bare well the wall is a rank-one perturbation,

    H_mn = E_m delta_mn + g phi_m(X) phi_n(X),   phi_m(X) = sqrt(2/L) sin(m pi X / L).

The eigenvalues of the N x N block are Rayleigh-Ritz upper bounds that do not
increase as N grows.  Two decompositions of the same matrix are provided:
``"dense"`` calls LAPACK's symmetric eigensolver on the assembled matrix, and
``"rank_one"`` solves the secular equation of the diagonal-plus-rank-one
structure directly (the merge step of divide-and-conquer), which is O(N) per
eigenvalue instead of O(N**3) overall.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import brentq

from .errors import BranchError, DomainError
from .model import DEFAULT_CONFIG, EVANESCENT, OSCILLATORY, Level, Spectrum, WallState, WellConfig

DEFLATION_TOL = 1e-13


@dataclass(frozen=True)
class BasisMatrix:
    diagonal: np.ndarray  # unperturbed energies E_1..E_N
    vector: np.ndarray  # phi_m(X)
    g: float

    @property
    def size(self) -> int:
        return self.diagonal.size

    def dense(self) -> np.ndarray:
        h = self.g * np.outer(self.vector, self.vector)
        h[np.diag_indices_from(h)] += self.diagonal
        return h


def build_matrix(wall: WallState, N: int, cfg: WellConfig = DEFAULT_CONFIG) -> BasisMatrix:
    if not wall.is_finite:
        raise BranchError("the truncated basis needs a finite strength")
    wall.check_inside(cfg)
    if N < 1:
        raise DomainError("basis size must be >= 1")
    L = cfg.length
    m = np.arange(1, N + 1)
    diagonal = (cfg.hbar * math.pi * m / L) ** 2 / (2.0 * cfg.mass)
    vector = math.sqrt(2.0 / L) * np.sin(m * math.pi * wall.x / L)
    return BasisMatrix(diagonal, vector, float(wall.g))


def _interval_root(f, lo, hi, lo_pole, hi_pole):
    # step off the poles until f changes sign, then refine
    span = hi - lo
    eps = span * 1e-15
    while eps < 0.25 * span:
        a = lo + eps if lo_pole else lo
        b = hi - eps if hi_pole else hi
        if f(a) * f(b) < 0:
            return brentq(f, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
        eps *= 16
    raise RuntimeError("secular equation root not bracketed")


def _secular_roots(d, z, rho, count):
    """Lowest ``count`` eigenvalues of diag(d) + rho z z^T, d ascending."""
    znorm = np.linalg.norm(z)
    if rho == 0.0 or znorm == 0.0:
        return d[:count].copy()
    live = np.abs(z) > DEFLATION_TOL * znorm
    deflated = d[~live]
    dl, zl2 = d[live], z[live] ** 2
    n_live = dl.size
    outer = rho * zl2.sum()

    roots = []
    # in coordinates shifted by d_i, root i lies in (0, d_{i+1} - d_i) for
    # rho > 0 and in (d_{i-1} - d_i, 0) for rho < 0
    for i in range(min(count, n_live)):
        shifted = dl - dl[i]

        def secular(mu, shifted=shifted):
            return 1.0 + rho * np.sum(zl2 / (shifted - mu))

        if rho > 0:
            top = i + 1 < n_live
            mu = _interval_root(secular, 0.0, shifted[i + 1] if top else outer, True, top)
        else:
            bottom = i > 0
            mu = _interval_root(secular, shifted[i - 1] if bottom else outer, 0.0, bottom, True)
        roots.append(dl[i] + mu)
    return np.sort(np.concatenate([np.asarray(roots), deflated]))[:count]


def oracle_eigenvalues(wall: WallState, n_max: int, N: int, cfg: WellConfig = DEFAULT_CONFIG, method: str = "dense") -> np.ndarray:
    """Lowest ``n_max`` eigenvalues of the N x N truncated matrix, ascending."""
    if n_max > N:
        raise DomainError(f"cannot extract {n_max} levels from a basis of size {N}")
    bm = build_matrix(wall, N, cfg)
    if method == "dense":
        return scipy.linalg.eigh(bm.dense(), eigvals_only=True, subset_by_index=[0, n_max - 1], driver="evr")
    if method == "rank_one":
        return _secular_roots(bm.diagonal, bm.vector, bm.g, n_max)
    raise DomainError(f"unknown method {method!r}")


def oracle_eigenpairs(wall: WallState, n_max: int, N: int, cfg: WellConfig = DEFAULT_CONFIG):
    """Lowest eigenpairs from the dense route: (values, vectors as columns)."""
    if n_max > N:
        raise DomainError(f"cannot extract {n_max} levels from a basis of size {N}")
    bm = build_matrix(wall, N, cfg)
    return scipy.linalg.eigh(bm.dense(), subset_by_index=[0, n_max - 1], driver="evr")


def oracle_spectrum(wall: WallState, n_max: int, N: int, cfg: WellConfig = DEFAULT_CONFIG, method: str = "dense") -> Spectrum:
    values = oracle_eigenvalues(wall, n_max, N, cfg, method)
    levels = []
    for n, e in enumerate(values, start=1):
        if e < 0:
            levels.append(Level(n, float(e), EVANESCENT, cfg.k_from_energy(-e)))
        else:
            levels.append(Level(n, float(e), OSCILLATORY, cfg.k_from_energy(e)))
    return Spectrum(wall=wall, levels=tuple(levels))
