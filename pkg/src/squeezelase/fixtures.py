"""Synthetic frequency-noise traces used as regression anchors.

The shipped traces are not measurements. Each is a flicker plateau plus a
servo bump near 10 kHz, rolled off above a knee, so the beta line is crossed
near 10 kHz. The amplitude is scaled until the estimated linewidth hits its
target. Regenerate with ``python -m squeezelase.fixtures [out_dir]``.
"""

from __future__ import annotations

import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .linewidth import DBM_RAW, FREQ_NOISE, PsdTrace, estimate_linewidth, format_trace

# linewidth targets (Hz) keyed by injected squeezing parameter
TABLE_LINEWIDTHS = {0.80: 30e3, 0.89: 27.8e3, 0.94: 23e3, 0.97: 18.7e3, 0.99: 15e3}

F_START, F_STOP, N_POINTS = 10.0, 1e6, 1500
RBW = 100.0
K0 = 1e-4  # V/Hz
Z0 = 50.0
FLICKER_CORNER = 50.0
PLATEAU = 0.5  # plateau height relative to the bump peak
BUMP_CENTER = 10e3
BUMP_WIDTH = 3e3
KNEE = 20e3
FLOOR = 5.0  # Hz^2/Hz


def fixture_name(r):
    return f"table_r{round(r * 100):03d}.csv"


def shape(f):
    f = np.asarray(f, dtype=float)
    plateau = PLATEAU * (1.0 + FLICKER_CORNER / f)
    bump = 1.0 / (1.0 + ((f - BUMP_CENTER) / BUMP_WIDTH) ** 2)
    return (plateau + bump) / (1.0 + (f / KNEE) ** 4)


def _gamma(f, amplitude):
    s = amplitude * shape(f) + FLOOR
    return estimate_linewidth(PsdTrace(f, s, FREQ_NOISE, f_min=F_START)).gamma


def calibrate_amplitude(target, f, rtol=1e-12):
    """Bisection on the plateau amplitude; the linewidth is monotone in it."""
    lo, hi = 0.0, 1.0
    while _gamma(f, hi) < target:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _gamma(f, mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rtol * hi:
            break
    return 0.5 * (lo + hi)


def to_dbm(s, k0=K0, z0=Z0, rbw=RBW):
    """Inverse of the analyzer calibration: Hz^2/Hz -> dBm."""
    return 10.0 * np.log10(np.asarray(s) * (k0**2 / z0) * rbw * 1000.0)


def synthesize_trace(target_gamma, n_points=N_POINTS):
    f = np.geomspace(F_START, F_STOP, n_points)
    amplitude = calibrate_amplitude(target_gamma, f)
    s = amplitude * shape(f) + FLOOR
    return PsdTrace(f, to_dbm(s), DBM_RAW, rbw=RBW, slope_k0=K0, z0=Z0, f_min=F_START)


def white_trace(h0=1e4, f_min=10.0, f_stop=1e6, n_points=10_000):
    f = np.geomspace(f_min, f_stop, n_points)
    return PsdTrace(f, np.full_like(f, h0), FREQ_NOISE, f_min=f_min)


def below_line_trace(n_points=200):
    f = np.geomspace(10.0, 1e6, n_points)
    return PsdTrace(f, 0.5 * 8.0 * math.log(2.0) / math.pi**2 * f, FREQ_NOISE, f_min=10.0)


def build_all():
    """Map of file name -> (trace, comment)."""
    out = {}
    for r, gamma in TABLE_LINEWIDTHS.items():
        out[fixture_name(r)] = (
            synthesize_trace(gamma),
            f"synthetic anchor r={r} target_gamma_hz={gamma!r}",
        )
    out["white_h1e4.csv"] = (white_trace(), "white frequency noise h0=1e4 Hz^2/Hz")
    out["below_line.csv"] = (below_line_trace(), "PSD at half the beta line everywhere")
    return out


def write_all(out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, (trace, comment) in build_all().items():
        (out_dir / name).write_text(format_trace(trace, comment), encoding="utf-8")
    return sorted(out_dir.iterdir())


def shipped_trace_path(name):
    return resources.files("squeezelase") / "data" / "traces" / name


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent / "data" / "traces"
    for path in write_all(target):
        print(path)
