"""Parameter containers and the internal unit system.

All angular frequencies and rates are stored in rad/ns and times in ns,
so a linear frequency of 1 GHz corresponds to 2*pi rad/ns.  Configuration
files and CLI flags use linear GHz; conversion happens at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi

#: Cutoff wavenumber default, 2*pi x 20 GHz.
DEFAULT_CUTOFF = TWO_PI * 20.0

CHANNEL_IDS = ("1e", "1i", "3e", "3i", "q")

#: Which quadrature operator each dissipation channel couples to.
CHANNEL_OPERATOR = {"1e": "x", "1i": "x", "3e": "y", "3i": "y", "q": "z"}


def ghz(value: float) -> float:
    """Convert a linear frequency in GHz to rad/ns."""
    return TWO_PI * value


def to_ghz(value: float) -> float:
    """Convert an angular frequency in rad/ns to linear GHz."""
    return value / TWO_PI


@dataclass(frozen=True)
class SystemParams:
    """Bare frequencies, couplings and Fock truncations of the closed system.

    Frequencies and couplings are angular (rad/ns).  The Hilbert space is
    qubit (2) x mode 1 (n1_max+1) x mode 3 (n3_max+1).
    """

    omega_q: float
    omega_1: float
    omega_3: float
    g_1: float
    g_3: float
    n1_max: int = 6
    n3_max: int = 2

    def __post_init__(self):
        for name in ("omega_q", "omega_1", "omega_3", "g_1", "g_3"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.n1_max < 1 or self.n3_max < 1:
            raise ValueError("n1_max and n3_max must be >= 1")

    @property
    def dim(self) -> int:
        """Total Hilbert-space dimension 2*(n1_max+1)*(n3_max+1)."""
        return 2 * (self.n1_max + 1) * (self.n3_max + 1)

    @classmethod
    def from_ghz(cls, omega_q: float, omega_1: float, omega_3: float,
                 g_1: float, g_3: float, n1_max: int = 6, n3_max: int = 2
                 ) -> "SystemParams":
        """Build from linear-GHz frequencies."""
        return cls(ghz(omega_q), ghz(omega_1), ghz(omega_3),
                   ghz(g_1), ghz(g_3), n1_max, n3_max)

    def replace_omega_q(self, omega_q: float) -> "SystemParams":
        return SystemParams(omega_q, self.omega_1, self.omega_3,
                            self.g_1, self.g_3, self.n1_max, self.n3_max)


@dataclass(frozen=True)
class BareState:
    """Product-basis label |q m n>: qubit level, mode-1 and mode-3 photons."""

    qubit: int
    n1: int
    n3: int
    index: int

    @property
    def label(self) -> str:
        return f"|{'ge'[self.qubit]}{self.n1}{self.n3}>"


@dataclass(frozen=True)
class BathChannel:
    """One dissipation channel with a box coupling spectrum.

    ``channel_id`` is one of 1e, 1i, 3e, 3i, q.  ``rate`` is the flat decay
    rate inside the band (rad/ns); ``cutoff`` is the hard upper edge of the
    coupling spectrum.
    """

    channel_id: str
    rate: float
    cutoff: float = DEFAULT_CUTOFF

    def __post_init__(self):
        if self.channel_id not in CHANNEL_IDS:
            raise ValueError(f"unknown channel id {self.channel_id!r}")
        if self.rate < 0:
            raise ValueError("rate must be >= 0")
        if self.cutoff <= 0:
            raise ValueError("cutoff must be > 0")

    @property
    def operator(self) -> str:
        """Coupling operator key: 'x', 'y' or 'z'."""
        return CHANNEL_OPERATOR[self.channel_id]


def standard_channels(kappa_e: float, kappa_i: float = 0.0,
                      gamma: float = 0.0,
                      cutoff: float = DEFAULT_CUTOFF) -> list[BathChannel]:
    """The five-channel set with kappa_1e = kappa_3e and kappa_1i = kappa_3i."""
    return [
        BathChannel("1e", kappa_e, cutoff),
        BathChannel("1i", kappa_i, cutoff),
        BathChannel("3e", kappa_e, cutoff),
        BathChannel("3i", kappa_i, cutoff),
        BathChannel("q", gamma, cutoff),
    ]


@dataclass(frozen=True)
class DriveField:
    """Monochromatic coherent drive near the third-mode resonance.

    ``amplitude`` has units (photons/ns)^(1/2); the input photon flux is
    |amplitude|^2.  ``omega`` is the drive frequency in rad/ns.
    """

    amplitude: complex
    omega: float

    @property
    def flux(self) -> float:
        """Input photon flux F_in = |E_in|^2 (photons/ns)."""
        return abs(self.amplitude) ** 2
