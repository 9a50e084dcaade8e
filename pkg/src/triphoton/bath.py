"""Bath coupling spectra and complex self-energies.

Each channel couples through a box spectrum xi_k = sqrt(rate/2pi) on
(0, cutoff), for which the self-energy has the closed form

    h(eps) = (rate/2) theta(eps) theta(cutoff - eps)
             - i (rate/2pi) log(|cutoff - eps| / |eps|)

The real part is half the decay rate (down transitions only); the
imaginary part is the cutoff-dependent level shift.  At eps = 0 and
eps = cutoff the log diverges; within ``LOG_FLOOR`` of those points the
imaginary part is set to zero.  Only parity-forbidden or far-off-shell
pairs land there, but the regularization is a choice, not physics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import TWO_PI, BathChannel
from .spectrum import Eigensystem

#: Regularization window around the log singularities, 2*pi x 1 kHz.
LOG_FLOOR = TWO_PI * 1e-6


def coupling_xi(channel: BathChannel, k) -> np.ndarray | float:
    """Coupling density xi_k: box spectrum with 2*pi*xi^2 = rate in band."""
    k = np.asarray(k, dtype=float)
    val = np.where((k > 0) & (k < channel.cutoff),
                   np.sqrt(channel.rate / TWO_PI), 0.0)
    return val if val.ndim else float(val)


def self_energy(rate: float, cutoff: float, eps,
                floor: float = LOG_FLOOR) -> np.ndarray | complex:
    """Closed-form self-energy h(eps) of the box spectrum (rad/ns)."""
    eps = np.asarray(eps, dtype=float)
    re = np.where((eps > 0) & (eps < cutoff), rate / 2.0, 0.0)
    im = np.zeros_like(eps)
    ok = (np.abs(eps) > floor) & (np.abs(cutoff - eps) > floor)
    im[ok] = -(rate / TWO_PI) * np.log(np.abs(cutoff - eps[ok]) / np.abs(eps[ok]))
    val = re + 1j * im
    return val if val.ndim else complex(val)


@dataclass(frozen=True)
class SelfEnergyTable:
    """Per-channel self-energies over all eigenstate pairs.

    ``tables[channel_id][a, b]`` holds h(eps_a - eps_b).  The index
    convention matches the equation-of-motion subscripts: h_ji is
    ``tables[c][j, i]``.
    """

    tables: dict[str, np.ndarray]
    channels: tuple[BathChannel, ...]

    def combined(self, operator: str) -> np.ndarray:
        """Sum of the tables of all channels coupling via the given operator.

        h^(1) = h^(1e) + h^(1i) for 'x', h^(3) = h^(3e) + h^(3i) for 'y',
        h^(q) for 'z'.
        """
        total = None
        for ch in self.channels:
            if ch.operator != operator:
                continue
            t = self.tables[ch.channel_id]
            total = t.copy() if total is None else total + t
        if total is None:
            raise KeyError(f"no channel couples via {operator!r}")
        return total


def build_self_energy_table(es: Eigensystem,
                            channels: list[BathChannel],
                            floor: float = LOG_FLOOR) -> SelfEnergyTable:
    """Evaluate every channel's h at every transition energy eps_a - eps_b."""
    de = es.transition_energies()
    tables = {}
    for ch in channels:
        if ch.channel_id in tables:
            raise ValueError(f"duplicate channel {ch.channel_id!r}")
        tables[ch.channel_id] = self_energy(ch.rate, ch.cutoff, de, floor)
    return SelfEnergyTable(tables=tables, channels=tuple(channels))
