"""Two-cavity frequency combs: FSR, Airy transmission and co-resonance search."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .threshold import C_LIGHT


@dataclass(frozen=True)
class CavityGeometry:
    air_path: float
    crystal_len: float = 0.0
    crystal_index: float = 1.0
    r1: float = 0.0
    r2: float = 0.0

    def __post_init__(self):
        if self.air_path < 0 or self.crystal_len < 0 or self.crystal_index <= 0:
            raise DomainError("path lengths must be >= 0 and the index > 0")
        if not self.optical_path > 0:
            raise DomainError("optical path length must be > 0")
        for name in ("r1", "r2"):
            if not (0.0 <= getattr(self, name) < 1.0):
                raise DomainError(f"{name} must lie in [0, 1), got {getattr(self, name)!r}")

    @property
    def optical_path(self):
        return self.air_path + self.crystal_index * self.crystal_len

    @classmethod
    def from_losses(cls, air_path, crystal_len, crystal_index, t_coupler, l_roundtrip):
        """Output coupler of transmissivity T; remaining round-trip loss lumped into mirror 2."""
        return cls(
            air_path,
            crystal_len,
            crystal_index,
            r1=math.sqrt(1.0 - t_coupler),
            r2=math.sqrt(1.0 - l_roundtrip),
        )


@dataclass(frozen=True)
class CombEntry:
    mode_index: int
    offset_hz: float
    detuning_hz: float
    co_resonant: bool


@dataclass(frozen=True)
class CombReport:
    fsr1: float
    fsr2: float
    bandwidth: float
    tol: float
    entries: tuple

    def co_resonant_modes(self):
        return [e.mode_index for e in self.entries if e.co_resonant]


def fsr(geom):
    return C_LIGHT / (2.0 * geom.optical_path)


def transmission(nu, fsr_hz, r1, r2):
    """Normalized Airy intensity transmission at offset ``nu`` (array friendly)."""
    if not fsr_hz > 0:
        raise DomainError(f"FSR must be > 0, got {fsr_hz!r}")
    phase = np.pi * np.asarray(nu, dtype=float) / fsr_hz
    amp = np.sqrt((1.0 - r1**2) * (1.0 - r2**2)) * np.exp(1j * phase)
    t = np.abs(amp / (1.0 - r1 * r2 * np.exp(2j * phase))) ** 2
    return float(t) if np.ndim(t) == 0 else t


def linewidth_fwhm(geom):
    """Full width at half maximum of the Airy resonance, Hz."""
    rr = geom.r1 * geom.r2
    if rr <= 0.0:
        raise DomainError("a resonance linewidth needs non-zero mirror reflectivities")
    arg = (1.0 - rr) / (2.0 * math.sqrt(rr))
    if arg >= 1.0:
        raise DomainError("cavity finesse too low for a half-maximum to exist")
    return fsr(geom) / math.pi * 2.0 * math.asin(arg)


def default_tolerance(geom1, geom2):
    """Half the narrower cavity linewidth."""
    return 0.5 * min(linewidth_fwhm(geom1), linewidth_fwhm(geom2))


def fold_detuning(offset, period):
    """Signed distance from ``offset`` to the nearest multiple of ``period``, in (-p/2, p/2]."""
    rem = math.fmod(offset, period)
    half = 0.5 * period
    if rem > half:
        rem -= period
    elif rem <= -half:
        rem += period
    return rem


def comb_detunings(fsr1, fsr2, bandwidth, tol=0.0):
    """Detuning of each cavity-2 comb line from the nearest cavity-1 line.

    Both combs share mode 0 at the carrier; mode ``k`` of cavity 2 sits at
    ``k * fsr2`` and is kept while it lies inside +/- bandwidth/2.
    """
    if not (fsr1 > 0 and fsr2 > 0 and bandwidth > 0):
        raise DomainError("FSRs and bandwidth must be > 0")
    if tol < 0:
        raise DomainError(f"tolerance must be >= 0, got {tol!r}")
    k_max = int(math.floor(0.5 * bandwidth / fsr2))
    entries = []
    for k in range(-k_max, k_max + 1):
        offset = k * fsr2
        det = fold_detuning(offset, fsr1)
        entries.append(CombEntry(k, offset, det, k == 0 or abs(det) <= tol))
    return CombReport(fsr1, fsr2, bandwidth, tol, tuple(entries))


def co_resonances(fsr1, fsr2, bandwidth, tol):
    return comb_detunings(fsr1, fsr2, bandwidth, tol).co_resonant_modes()
