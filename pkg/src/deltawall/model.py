"""Value types shared across the package.

Units follow ``WellConfig``: with the defaults (L = hbar = mass = 1) energies
are in units where the unperturbed ground energy is pi**2 / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError

INF = math.inf

OSCILLATORY = "oscillatory"
EVANESCENT = "evanescent"


@dataclass(frozen=True)
class WellConfig:
    """Infinite square well on [0, length] with physical constants."""

    length: float = 1.0
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        for name in ("length", "hbar", "mass"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")

    @property
    def e_star(self) -> float:
        """Unperturbed ground energy, (hbar pi / L)**2 / (2 m)."""
        return (self.hbar * math.pi / self.length) ** 2 / (2.0 * self.mass)

    @property
    def g_star(self) -> float:
        """Reference wall strength pi hbar**2 / (2 L)."""
        return math.pi * self.hbar**2 / (2.0 * self.length)

    def coupling(self, g: float) -> float:
        """Derivative jump per unit amplitude, 2 m g / hbar**2."""
        return 2.0 * self.mass * g / self.hbar**2

    def energy_from_k(self, k: float) -> float:
        return (self.hbar * k) ** 2 / (2.0 * self.mass)

    def k_from_energy(self, energy: float) -> float:
        return math.sqrt(2.0 * self.mass * energy) / self.hbar


DEFAULT_CONFIG = WellConfig()


@dataclass(frozen=True)
class WallState:
    """Point (g, X) in the adiabatic parameter space.

    ``g`` may be ``math.inf`` or ``-math.inf``; these are treated as the
    symbolic impermeable/infinitely attractive limits and are never replaced by
    large finite numbers.
    """

    g: float
    x: float

    def __post_init__(self):
        if math.isnan(self.g):
            raise DomainError("wall strength is NaN")
        if not math.isfinite(self.x):
            raise DomainError(f"wall position must be finite, got {self.x!r}")

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.g)

    @property
    def is_impermeable(self) -> bool:
        return self.g == INF

    def check_inside(self, cfg: WellConfig) -> None:
        if not 0.0 < self.x < cfg.length:
            raise DomainError(f"wall position X={self.x!r} must lie strictly inside (0, {cfg.length!r})")


@dataclass(frozen=True, order=True)
class SideLabel:
    """Quantum number of a particle confined to one side of an impermeable wall."""

    side: str  # "L" or "R"
    m: int

    def __str__(self):
        return f"{self.side}{self.m}"

    @classmethod
    def parse(cls, text: str) -> "SideLabel":
        side, m = text[0].upper(), int(text[1:])
        if side not in ("L", "R") or m < 1:
            raise DomainError(f"bad side label {text!r}")
        return cls(side, m)


@dataclass(frozen=True)
class Level:
    """One eigenvalue with its branch data.

    For the oscillatory branch ``rate`` is the wavenumber k and
    E = hbar**2 k**2 / 2m; for the evanescent branch it is the decay rate
    kappa and E = -hbar**2 kappa**2 / 2m.
    """

    n: int
    energy: float
    branch: str = OSCILLATORY
    rate: float = 0.0
    side: SideLabel | None = None
    exceptional: bool = False

    @property
    def k(self) -> float:
        if self.branch != OSCILLATORY:
            raise AttributeError("evanescent level has no real wavenumber")
        return self.rate

    @property
    def kappa(self) -> float:
        if self.branch != EVANESCENT:
            raise AttributeError("oscillatory level has no decay rate")
        return self.rate


@dataclass(frozen=True)
class Spectrum:
    wall: WallState
    levels: tuple[Level, ...]
    exceptional: frozenset[int] = field(default_factory=frozenset)

    @property
    def energies(self):
        import numpy as np

        return np.array([lv.energy for lv in self.levels])

    def __len__(self):
        return len(self.levels)

    def __getitem__(self, n: int) -> Level:
        """Level by its 1-based index."""
        if n < 1:
            raise IndexError("levels are indexed from 1")
        return self.levels[n - 1]

    def labels(self) -> list[SideLabel | None]:
        return [lv.side for lv in self.levels]
