"""Data behind the mode-sweep and spectrum figures, plus peak analysis.

Every ``figN_*`` function takes a base :class:`SystemParams` and varies one
quantity across the curves; gains are given in units of the cavity decay
rate, powers in W, phases in rad.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks, peak_widths

from .modes import sweep_modes
from .params import SystemParams
from .spectra import omega_grid, spectrum_series

R_GRID = np.linspace(-0.9, 0.9, 181)


def _curves_modes(base, overrides, r_grid):
    return {label: sweep_modes(base.with_(**kw), "bs_reflectivity", r_grid) for label, kw in overrides}


def fig2_modes(base: SystemParams, gains=(0.0, 0.5, 1.1), r_grid=R_GRID):
    """Normal modes vs beam-splitter reflectivity for several OPA gains."""
    k = base.cavity_decay
    return _curves_modes(base, [(f"G={g:g}kappa", {"opa_gain": g * k}) for g in gains], r_grid)


def fig3_modes(base: SystemParams, powers=(2e-3, 4e-3, 6.9e-3), r_grid=R_GRID):
    return _curves_modes(
        base, [(f"P_in={p * 1e3:g}mW", {"input_power": p, "opa_gain": 0.0}) for p in powers], r_grid
    )


def fig4_modes(base: SystemParams, phases=(math.pi / 4, 0.0, -math.pi / 4), gain=0.5, r_grid=R_GRID):
    k = base.cavity_decay
    return _curves_modes(
        base,
        [(f"theta={th / math.pi:g}pi", {"opa_phase": th, "opa_gain": gain * k}) for th in phases],
        r_grid,
    )


def _spectra(base, overrides, grid, thermal):
    out = {}
    for label, kw in overrides:
        p = base.with_(**kw)
        out[label] = {
            "S_Q": spectrum_series("S_Q", p, grid, thermal=thermal, scale_by_gamma=True),
            "S_aout": spectrum_series("S_aout", p, grid, thermal=thermal),
        }
    return out


def fig5_spectra(base: SystemParams, reflectivities=(0.0, 0.3, 0.5, 0.7), gain=0.5, grid=None,
                 thermal="coth"):
    """``S_Q * gamma_m`` and ``S_aout`` for several reflectivities at fixed gain."""
    grid = omega_grid(base) if grid is None else grid
    k = base.cavity_decay
    return _spectra(base, [(f"r={r:g}", {"bs_reflectivity": r, "opa_gain": gain * k}) for r in reflectivities],
                    grid, thermal)


def fig6_spectra(base: SystemParams, gains=(0.0, 0.5, 1.1), r=0.5, grid=None, thermal="coth"):
    grid = omega_grid(base) if grid is None else grid
    k = base.cavity_decay
    return _spectra(base, [(f"G={g:g}kappa", {"opa_gain": g * k, "bs_reflectivity": r}) for g in gains],
                    grid, thermal)


@dataclass(frozen=True)
class PeakSummary:
    positions: np.ndarray  # of the (up to) two tallest peaks, ascending
    heights: np.ndarray
    max_height: float
    fwhm: float  # of the tallest peak, same units as the grid
    separation: float  # 0 for a single peak


def spectral_peaks(grid, values) -> PeakSummary:
    """Locate the two tallest local maxima and the width of the tallest one."""
    x = np.asarray(grid, dtype=float)
    y = np.asarray(values, dtype=float)
    idx, _ = find_peaks(y)
    if idx.size == 0:
        raise ValueError("no local maximum inside the grid")
    top = idx[np.argsort(y[idx])[::-1][:2]]
    tallest = top[0]
    width = peak_widths(y, [tallest], rel_height=0.5)[0][0] * (x[1] - x[0])
    top = np.sort(top)
    sep = float(x[top[-1]] - x[top[0]]) if top.size == 2 else 0.0
    return PeakSummary(positions=x[top], heights=y[top], max_height=float(y[tallest]),
                       fwhm=float(width), separation=sep)
