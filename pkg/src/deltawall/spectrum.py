"""Exact spectrum of the infinite square well with a delta wall.

The Hamiltonian is H(g, X) = p**2/2m + g delta(x - X) on [0, L] with Dirichlet
ends.  Writing psi = A sin(kx) left of the wall and B sin(k(L - x)) right of
it, continuity plus the derivative jump psi'(X+) - psi'(X-) = (2mg/hbar**2)
psi(X) give the characteristic function

    F(k) = k sin(kL) + c sin(kX) sin(k(L - X)),    c = 2mg/hbar**2,

whose positive zeros are the oscillatory eigen-wavenumbers.  The substitution
k -> i kappa gives the evanescent branch

    G(kappa) = kappa sinh(kappa L) + c sinh(kappa X) sinh(kappa (L - X)).

See docs/characteristic_equation.md for the derivation.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import BranchError, DomainError, UnsupportedEndpointError
from .model import (
    DEFAULT_CONFIG,
    EVANESCENT,
    INF,
    OSCILLATORY,
    Level,
    SideLabel,
    Spectrum,
    WallState,
    WellConfig,
)

NODE_TOLERANCE = 1e-9
K_RTOL = 1e-14
TIE_RTOL = 1e-12

__all__ = [
    "NODE_TOLERANCE",
    "PiecewiseEigenfunction",
    "characteristic_value",
    "characteristic_value_negative",
    "eigenfunction",
    "exceptional_levels",
    "ground_negative_threshold",
    "separated_spectrum",
    "solve_spectrum",
    "unperturbed_energy",
]


def unperturbed_energy(n: int, cfg: WellConfig = DEFAULT_CONFIG) -> float:
    """Energy (hbar pi n / L)**2 / 2m of the n-th level of the bare well."""
    if n < 1:
        raise DomainError(f"level index must be >= 1, got {n}")
    return cfg.energy_from_k(n * math.pi / cfg.length)


def _finite_coupling(wall: WallState, cfg: WellConfig) -> float:
    if not wall.is_finite:
        raise BranchError(
            f"strength g={wall.g!r} is symbolic; use separated_spectrum for the impermeable limit"
        )
    return cfg.coupling(wall.g)


def characteristic_value(k, wall: WallState, cfg: WellConfig = DEFAULT_CONFIG):
    """F(k) = k sin(kL) + (2mg/hbar**2) sin(kX) sin(k(L-X)); accepts arrays."""
    c = _finite_coupling(wall, cfg)
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0):
        raise DomainError("wavenumber must be positive")
    L, X = cfg.length, wall.x
    out = k * np.sin(k * L) + c * np.sin(k * X) * np.sin(k * (L - X))
    return out if out.ndim else float(out)


def characteristic_value_negative(kappa, wall: WallState, cfg: WellConfig = DEFAULT_CONFIG):
    """G(kappa) = kappa sinh(kappa L) + (2mg/hbar**2) sinh(kappa X) sinh(kappa (L-X))."""
    c = _finite_coupling(wall, cfg)
    kappa = np.asarray(kappa, dtype=float)
    if np.any(kappa <= 0):
        raise DomainError("decay rate must be positive")
    L, X = cfg.length, wall.x
    out = kappa * np.sinh(kappa * L) + c * np.sinh(kappa * X) * np.sinh(kappa * (L - X))
    return out if out.ndim else float(out)


def _sinc(u):
    return math.sin(u) / u if u != 0.0 else 1.0


def _decay(u):
    # (1 - exp(-2u)) / u, finite at u = 0
    return -math.expm1(-2.0 * u) / u if u != 0.0 else 2.0


def _scaled_f(k, c, L, X):
    # F(k) / k**2, regular at k = 0
    return L * _sinc(k * L) + c * X * (L - X) * _sinc(k * X) * _sinc(k * (L - X))


def _scaled_g(kappa, c, L, X):
    # 2 exp(-kappa L) G(kappa) / kappa**2; no overflow for large kappa
    return L * _decay(kappa * L) + 0.5 * c * X * (L - X) * _decay(kappa * X) * _decay(kappa * (L - X))


def ground_negative_threshold(x: float, cfg: WellConfig = DEFAULT_CONFIG) -> float:
    """Strength below which the ground level has negative energy.

    From F(k)/k**2 -> L + c X (L - X) as k -> 0: g_th = -hbar**2 L / (2m X (L-X)).
    """
    L = cfg.length
    if not 0.0 < x < L:
        raise DomainError(f"wall position X={x!r} must lie strictly inside (0, {L!r})")
    return -(cfg.hbar**2) * L / (2.0 * cfg.mass * x * (L - x))


def exceptional_levels(x: float, n_max: int, cfg: WellConfig = DEFAULT_CONFIG) -> frozenset[int]:
    """Indices n <= n_max whose unperturbed eigenfunction has a node at X."""
    L = cfg.length
    if not 0.0 < x < L:
        raise DomainError(f"wall position X={x!r} must lie strictly inside (0, {L!r})")
    return frozenset(n for n in range(1, n_max + 1) if abs(math.sin(n * math.pi * x / L)) < NODE_TOLERANCE)


def _label_order(a: tuple[float, SideLabel], b: tuple[float, SideLabel], x: float, L: float) -> int:
    (_, la), (_, lb) = a, b
    if la.side == lb.side:
        return (la.m > lb.m) - (la.m < lb.m)
    # k_L(m) < k_R(m') iff m (L - X) < m' X; compare without dividing
    left, right = (la, lb) if la.side == "L" else (lb, la)
    lhs, rhs = left.m * (L - x), right.m * x
    if abs(lhs - rhs) <= TIE_RTOL * max(lhs, rhs):
        result = -1  # exact tie: Left first
    else:
        result = -1 if lhs < rhs else 1
    return result if la.side == "L" else -result


def separated_wavenumbers(x: float, count: int, cfg: WellConfig = DEFAULT_CONFIG) -> list[tuple[float, SideLabel]]:
    """Lowest ``count`` wavenumbers of the two boxes split by an impermeable wall at X."""
    L = cfg.length
    if not 0.0 < x < L:
        raise DomainError(f"wall position X={x!r} must lie strictly inside (0, {L!r})")
    cands = [(m * math.pi / x, SideLabel("L", m)) for m in range(1, count + 1)]
    cands += [(m * math.pi / (L - x), SideLabel("R", m)) for m in range(1, count + 1)]
    cands.sort(key=functools.cmp_to_key(lambda a, b: _label_order(a, b, x, L)))
    return cands[:count]


def separated_spectrum(x: float, n_max: int, cfg: WellConfig = DEFAULT_CONFIG) -> Spectrum:
    """Spectrum at g = +inf: merged left/right box levels with side labels."""
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    levels = tuple(
        Level(n=i, energy=cfg.energy_from_k(k), branch=OSCILLATORY, rate=k, side=label)
        for i, (k, label) in enumerate(separated_wavenumbers(x, n_max, cfg), start=1)
    )
    return Spectrum(wall=WallState(INF, x), levels=levels, exceptional=frozenset())


def _find_sign_change(f, a, b):
    """Return (lo, hi) inside [a, b] with f(lo) f(hi) <= 0.

    Tries the endpoints first, then subdivides: uniform interior points plus
    geometric sequences approaching each endpoint, which catches roots pushed
    against a bracket edge by near-coincidences.
    """
    fa, fb = f(a), f(b)
    if fa * fb < 0:
        return a, b
    ts = set(np.linspace(0.0, 1.0, 65)[1:-1].tolist())
    ts |= {2.0**-j for j in range(1, 53)} | {1.0 - 2.0**-j for j in range(1, 53)}
    xs = sorted({a + t * (b - a) for t in ts if 0.0 < t < 1.0} - {a, b})
    xs = [a] + xs + [b]
    vals = [fa] + [f(x) for x in xs[1:-1]] + [fb]
    for i in range(1, len(xs) - 1):
        if vals[i] == 0.0:
            return xs[i], xs[i]
    for i in range(len(xs) - 1):
        if vals[i] * vals[i + 1] < 0:
            return xs[i], xs[i + 1]
    raise RuntimeError(f"no sign change found on [{a!r}, {b!r}]")


def _root(f, a, b):
    lo, hi = _find_sign_change(f, a, b)
    if lo == hi:
        return lo
    return brentq(f, lo, hi, xtol=1e-300, rtol=K_RTOL, maxiter=500)


def solve_spectrum(wall: WallState, n_max: int, cfg: WellConfig = DEFAULT_CONFIG) -> Spectrum:
    """Lowest ``n_max`` eigenvalues of H(g, X), in increasing order.

    Non-exceptional oscillatory roots are bracketed by the interlacing bounds
    E_n(0) < E_n(g) < E_n(+inf) for g > 0 and E_{n-1}(+inf) < E_n(g) < E_n(0)
    for g < 0.  Levels with a node at X keep their unperturbed energy exactly.
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    if wall.g == INF:
        return separated_spectrum(wall.x, n_max, cfg)
    if wall.g == -INF:
        raise UnsupportedEndpointError("g = -inf is only meaningful as a limit along a path")
    wall.check_inside(cfg)

    L, X, g = cfg.length, wall.x, wall.g
    c = cfg.coupling(g)
    exc = exceptional_levels(X, n_max, cfg)
    k_inf = [k for k, _ in separated_wavenumbers(X, n_max, cfg)]
    f = functools.partial(_scaled_f, c=c, L=L, X=X)

    levels = []
    for n in range(1, n_max + 1):
        k0 = n * math.pi / L
        if n in exc or g == 0.0:
            levels.append(Level(n, unperturbed_energy(n, cfg), OSCILLATORY, k0, exceptional=n in exc))
            continue
        if g > 0:
            k = _root(f, k0, k_inf[n - 1])
        elif n > 1:
            k = _root(f, k_inf[n - 2], k0)
        else:
            levels.append(_ground_attractive(c, L, X, cfg))
            continue
        levels.append(Level(n, cfg.energy_from_k(k), OSCILLATORY, k))
    return Spectrum(wall=wall, levels=tuple(levels), exceptional=exc)


def _ground_attractive(c, L, X, cfg):
    f0 = _scaled_f(0.0, c, L, X)
    if f0 > 0:
        k = _root(functools.partial(_scaled_f, c=c, L=L, X=X), 0.0, math.pi / L)
        return Level(1, cfg.energy_from_k(k), OSCILLATORY, k)
    if f0 == 0:
        return Level(1, 0.0, OSCILLATORY, 0.0)
    kappa_ub = abs(c) + 1.0 / L
    kappa = _root(functools.partial(_scaled_g, c=c, L=L, X=X), 0.0, kappa_ub)
    return Level(1, -cfg.energy_from_k(kappa), EVANESCENT, kappa)


@dataclass(frozen=True)
class PiecewiseEigenfunction:
    """psi(x) = A s(rate x) on [0, X] and B s(rate (L - x)) on [X, L].

    ``s`` is sin on the oscillatory branch and sinh on the evanescent one.
    Amplitudes already include normalization.
    """

    branch: str
    rate: float
    x: float
    left_amp: float
    right_amp: float
    length: float

    def _s(self, u):
        return np.sin(u) if self.branch == OSCILLATORY else np.sinh(u)

    def _ds(self, u):
        return np.cos(u) if self.branch == OSCILLATORY else np.cosh(u)

    def __call__(self, xs):
        xs = np.asarray(xs, dtype=float)
        q, X, L = self.rate, self.x, self.length
        left = self.left_amp * self._s(q * np.clip(xs, 0.0, X))
        right = self.right_amp * self._s(q * np.clip(L - xs, 0.0, L - X))
        out = np.where(xs <= X, left, right)
        out = np.where((xs < 0) | (xs > L), 0.0, out)
        return out if out.ndim else float(out)

    def slope_left(self) -> float:
        """psi'(X-)."""
        q = self.rate
        return float(self.left_amp * q * self._ds(q * self.x))

    def slope_right(self) -> float:
        """psi'(X+)."""
        q = self.rate
        return float(-self.right_amp * q * self._ds(q * (self.length - self.x)))

    def value_left(self) -> float:
        return float(self.left_amp * self._s(self.rate * self.x))

    def value_right(self) -> float:
        return float(self.right_amp * self._s(self.rate * (self.length - self.x)))

    def jump(self) -> float:
        return self.slope_right() - self.slope_left()


def _sq_integral(branch, q, a):
    # integral of s(q t)**2 over [0, a]
    if q == 0.0:
        return 0.0
    if branch == OSCILLATORY:
        return a / 2.0 - math.sin(2.0 * q * a) / (4.0 * q)
    return math.sinh(2.0 * q * a) / (4.0 * q) - a / 2.0


def eigenfunction(level: Level, wall: WallState, cfg: WellConfig = DEFAULT_CONFIG) -> PiecewiseEigenfunction:
    """Normalized eigenfunction of ``level``, with positive slope where its support begins."""
    L, X = cfg.length, wall.x
    wall.check_inside(cfg)
    if wall.g == -INF:
        raise UnsupportedEndpointError("no eigenfunctions at g = -inf")

    if level.side is not None:
        m, side = level.side.m, level.side.side
        if side == "L":
            return PiecewiseEigenfunction(OSCILLATORY, m * math.pi / X, X, math.sqrt(2.0 / X), 0.0, L)
        amp = (-1) ** (m + 1) * math.sqrt(2.0 / (L - X))
        return PiecewiseEigenfunction(OSCILLATORY, m * math.pi / (L - X), X, 0.0, amp, L)

    if level.exceptional or wall.g == 0.0:
        n = level.n
        a = math.sqrt(2.0 / L)
        return PiecewiseEigenfunction(OSCILLATORY, n * math.pi / L, X, a, (-1) ** (n + 1) * a, L)

    q, branch = level.rate, level.branch
    if q == 0.0:
        # zero-energy threshold state: piecewise linear
        raise DomainError("eigenfunction at exactly zero energy is not represented")
    if branch == EVANESCENT and q * L > 300.0:
        raise DomainError("decay rate too large for direct evaluation")
    s = math.sin if branch == OSCILLATORY else math.sinh
    a, b = s(q * (L - X)), s(q * X)
    if a < 0:
        a, b = -a, -b
    norm2 = a * a * _sq_integral(branch, q, X) + b * b * _sq_integral(branch, q, L - X)
    scale = 1.0 / math.sqrt(norm2)
    return PiecewiseEigenfunction(branch, q, X, a * scale, b * scale, L)
