"""Symmetrized mirror-position spectrum and output-field spectra.

Noise inputs are the optical vacuum, ``<da_in(w) da_in^dag(W)> = 2 pi delta(w + W)``,
and the Brownian force with

    <xi(w) xi(W)> = 4 pi (gm/wm) w [1 + coth(hbar w / 2 kB T)] delta(w + W).

The thermal correlator is not symmetric in its arguments.  The output
spectra need it with the arguments swapped, ``<xi(-w) xi(w)>``, which
evaluates to ``2 pi * 2 (gm/wm) w [coth(hbar w / 2 kB T) - 1]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import constants

from .dynamics import stability
from .errors import InstabilityError, NumericalError
from .modes import d_polynomial
from .params import DerivedParams, SystemParams
from .response import a_coeffs_closed_form, d_coeffs_closed_form
from .steadystate import SteadyState, operating_point

KINDS = ("S_Q", "S_aout", "S_xout", "S_yout")
IMAG_TOL = 1e-10


@dataclass(frozen=True)
class ThermalFactor:
    """``coth(hbar w / 2 kB T)`` either exactly or in the high-temperature limit."""

    temperature: float
    mode: str = "coth"

    def __post_init__(self):
        if self.mode not in ("coth", "high_t"):
            raise ValueError("mode must be 'coth' or 'high_t'")

    def _x(self, w):
        return constants.hbar * np.asarray(w, dtype=float) / (2.0 * constants.k * self.temperature)

    def value(self, w):
        x = self._x(w)
        with np.errstate(divide="ignore"):
            return 1.0 / np.tanh(x) if self.mode == "coth" else 1.0 / x

    def omega_coth(self, w):
        """``w * coth(hbar w / 2 kB T)``, finite (and even) through ``w = 0``."""
        x = self._x(w)
        scale = 2.0 * constants.k * self.temperature / constants.hbar
        if self.mode == "high_t":
            return scale * np.ones_like(x)
        small = np.abs(x) < 1e-8
        safe = np.where(small, 1.0, x)
        return scale * np.where(small, 1.0 + x * x / 3.0, safe / np.tanh(safe))


def thermal_correlator(w, d: DerivedParams, tf: ThermalFactor):
    """Weight of ``2 pi delta(w + W)`` in ``<xi(w) xi(W)>`` at first argument ``w``."""
    w = np.asarray(w, dtype=float)
    return 2.0 * d.mech_damping / d.omega_m * (w + tf.omega_coth(w))


def _default_tf(d: DerivedParams, tf):
    return ThermalFactor(d.temperature) if tf is None else tf


def _require_stable(ss, d, detuning):
    rep = stability(ss, d, detuning)
    if not rep.eigen_stable:
        raise InstabilityError("spectra are undefined for an unstable operating point")


def _real_part(z, scale, what):
    z = np.asarray(z)
    bad = np.abs(z.imag) > IMAG_TOL * np.maximum(np.abs(scale), np.finfo(float).tiny)
    if np.any(bad):
        raise NumericalError(f"{what} has a non-negligible imaginary residue")
    return z.real


def s_q(omega, ss: SteadyState, d: DerivedParams, detuning: float, tf: ThermalFactor | None = None,
        check_stability: bool = True):
    """Symmetrized position spectrum assembled from the ``A`` coefficients."""
    tf = _default_tf(d, tf)
    if check_stability:
        _require_stable(ss, d, detuning)
    w = np.asarray(omega, dtype=float)
    A1, A2, A3 = a_coeffs_closed_form(w, ss, d, detuning)
    B1, B2, B3 = a_coeffs_closed_form(-w, ss, d, detuning)
    optical = 0.5 * A1 * B2 + 0.5 * A2 * B1
    thermal = 2.0 * d.mech_damping / d.omega_m * tf.omega_coth(w) * A3 * B3
    total = optical + thermal
    return _real_part(total, np.abs(optical) + np.abs(thermal), "S_Q")


def s_q_closed_form(omega, ss: SteadyState, d: DerivedParams, detuning: float,
                    tf: ThermalFactor | None = None, prefactor: str = "corrected"):
    """Expanded closed form of the position spectrum.

    ``prefactor="corrected"`` uses ``8 kappa t^2 g0^2 / (1+r)^2`` (the square of
    the ``A1``/``A2`` prefactor); ``"printed"`` uses ``8 [(1-r) t]^2 g0^2 kappa``.
    """
    tf = _default_tf(d, tf)
    w = np.asarray(omega, dtype=float)
    a = ss.a_s
    ac = a.conjugate()
    ke, G, wm, g0, r, t = d.eff_decay, d.gain, d.omega_m, d.coupling_const, d.r, d.t
    e = np.exp(1j * d.phase)
    if prefactor == "corrected":
        pre = 8.0 * d.kappa * t**2 * g0**2 / (1.0 + r) ** 2
    elif prefactor == "printed":
        pre = 8.0 * ((1.0 - r) * t) ** 2 * g0**2 * d.kappa
    else:
        raise ValueError("prefactor must be 'corrected' or 'printed'")
    dw = np.abs(d_polynomial(ss, d, detuning)(w)) ** 2
    optical = pre * (
        (ke**2 + w**2 + detuning**2 + 4 * G**2) * abs(a) ** 2
        + 2 * G * e * ac**2 * (ke - 1j * detuning)
        + 2 * G / e * a**2 * (ke + 1j * detuning)
    )
    thermal = (2 * d.mech_damping / wm * tf.omega_coth(w)
               * ((detuning**2 + ke**2 - w**2 - 4 * G**2) ** 2 + 4 * ke**2 * w**2))
    total = wm**2 / dw * (optical + thermal)
    return _real_part(total, wm**2 / dw * (np.abs(optical) + np.abs(thermal)), "S_Q closed form")


def thermal_lorentzian(omega, d: DerivedParams, tf: ThermalFactor | None = None):
    """Position spectrum of the bare mirror (no optomechanical coupling)."""
    tf = _default_tf(d, tf)
    w = np.asarray(omega, dtype=float)
    wm, gm = d.omega_m, d.mech_damping
    return 2 * gm / wm * tf.omega_coth(w) * wm**2 / ((w**2 - wm**2) ** 2 + gm**2 * w**2)


def output_spectra(omega, ss: SteadyState, d: DerivedParams, detuning: float,
                   tf: ThermalFactor | None = None, check_stability: bool = True,
                   bracket: str = "coth_minus_one"):
    """``(S_aout, S_xout, S_yout)`` of the field leaving the beam splitter.

    ``bracket`` selects the thermal factor multiplying ``2 (gm/wm) w``:
    ``"coth_minus_one"`` is ``coth(x) - 1`` (derived from the correlator),
    ``"literal"`` is ``coth(-1 + x)``, kept to show that it gives negative spectra.
    """
    tf = _default_tf(d, tf)
    if check_stability:
        _require_stable(ss, d, detuning)
    w = np.asarray(omega, dtype=float)
    D1, D2, D3 = d_coeffs_closed_form(w, ss, d, detuning)
    M1, M2, M3 = d_coeffs_closed_form(-w, ss, d, detuning)  # at -w
    if bracket == "coth_minus_one":
        th = thermal_correlator(-w, d, tf)
    elif bracket == "literal":
        x = constants.hbar * w / (2 * constants.k * d.temperature)
        th = 2 * d.mech_damping / d.omega_m * w / np.tanh(-1.0 + x)
    else:
        raise ValueError("bracket must be 'coth_minus_one' or 'literal'")

    s_a = np.abs(D2) ** 2 + np.abs(D3) ** 2 * th

    xv = (M1 + D2.conj()) * (D2 + M1.conj())
    xt = (M3 + D3.conj()) * (D3 + M3.conj()) * th
    s_x = _real_part(xv + xt, np.abs(xv) + np.abs(xt), "S_xout")

    yv = -(D2.conj() - M1) * (M1.conj() - D2)
    yt = -(D3.conj() - M3) * (M3.conj() - D3) * th
    s_y = _real_part(yv + yt, np.abs(yv) + np.abs(yt), "S_yout")
    return s_a, s_x, s_y


@dataclass(frozen=True)
class SpectrumSeries:
    grid: np.ndarray
    values: np.ndarray
    kind: str
    params_snapshot: dict = field(default_factory=dict)
    scaled_by_gamma: bool = False
    thermal_mode: str = "coth"

    @property
    def omega_over_omega_m(self) -> np.ndarray:
        if "mech_freq" not in self.params_snapshot:
            raise ValueError("params_snapshot has no mech_freq; normalize the grid explicitly")
        return self.grid / self.params_snapshot["mech_freq"]


def omega_grid(p: SystemParams, start: float = 0.5, stop: float = 1.5, num: int = 2001) -> np.ndarray:
    """Frequencies (rad/s) from ``start*omega_m`` to ``stop*omega_m``."""
    return np.linspace(start, stop, num) * p.mech_freq


def check_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0 or not np.all(np.isfinite(g)) or np.any(np.diff(g) <= 0):
        raise ValueError("grid must be non-empty ascending")
    return g


def spectrum_series(kind: str, params: SystemParams, grid, thermal: str = "coth",
                    scale_by_gamma: bool = False) -> SpectrumSeries:
    """Sample one spectrum over ``grid`` (rad/s).

    ``scale_by_gamma`` multiplies ``S_Q`` by the mechanical damping, the usual
    way of plotting it.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    g = check_grid(grid)
    op = operating_point(params)
    ss, d, delta = op.unpack()
    tf = ThermalFactor(d.temperature, thermal)
    if kind == "S_Q":
        vals = s_q(g, ss, d, delta, tf)
        if scale_by_gamma:
            vals = vals * d.mech_damping
    else:
        vals = output_spectra(g, ss, d, delta, tf)[KINDS.index(kind) - 1]
    if np.any(vals < 0) or not np.all(np.isfinite(vals)):
        raise NumericalError(f"{kind} produced negative or non-finite samples")
    return SpectrumSeries(
        grid=g,
        values=np.asarray(vals, dtype=float),
        kind=kind,
        params_snapshot=params.to_dict(),
        scaled_by_gamma=bool(scale_by_gamma and kind == "S_Q"),
        thermal_mode=thermal,
    )
