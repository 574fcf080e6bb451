"""Fourier-domain transfer coefficients of the linearized fluctuations.

Convention: ``f(w) = int f(t) exp(i w t) dt``, so ``d/dt -> -i w``.  Each
fluctuation is written as

    X(w) = X1(w) da_in(w) + X2(w) da_in^dag(w) + X3(w) xi(w)

where ``da_in^dag(w)`` denotes the transform of ``da_in^dag(t)``.  ``A`` is
for the mirror position, ``B`` the intracavity field, ``C`` the field
leaving the cavity and ``D`` the field leaving the beam splitter.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .modes import d_polynomial
from .params import DerivedParams
from .steadystate import SteadyState

_COND_LIMIT = 1e14


@dataclass(frozen=True)
class ResponseCoeffs:
    """Arrays of shape ``(3,) + omega.shape``; index 0, 1, 2 = coefficient 1, 2, 3."""

    omega: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray


def _cavity_denominator(w, d: DerivedParams, detuning):
    return (d.eff_decay - 1j * w) ** 2 + detuning**2 - 4.0 * d.gain**2


def output_from_intracavity(B, d: DerivedParams):
    """``C`` and ``D`` from ``B`` via the feedback input-output and beam-splitter relations."""
    r, t = d.r, d.t
    k = np.sqrt(2.0 * d.kappa) / (1.0 + r)
    C = k * np.asarray(B, dtype=complex)
    C[0] = C[0] - t / (1.0 + r)
    D = t * C
    D[0] = D[0] - r
    return C, D


def solve_response(omega, ss: SteadyState, d: DerivedParams, detuning: float) -> ResponseCoeffs:
    """Solve the transformed linear equations for ``(dQ, dP, da, da^dag)``.

    Raises :class:`NumericalError` when the 4x4 system is numerically
    singular (evaluation on an undamped resonance).
    """
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    a = ss.a_s
    ac = a.conjugate()
    g0, wm, gm, ke = d.coupling_const, d.omega_m, d.mech_damping, d.eff_decay
    G = d.gain
    e = cmath.exp(1j * d.phase)
    s = d.noise_amplitude
    iw = 1j * w

    sysm = np.zeros(w.shape + (4, 4), dtype=complex)
    # -i w dQ = wm dP
    sysm[..., 0, 0] = -iw
    sysm[..., 0, 1] = -wm
    # -i w dP = 2 g0 (a* da + a da^dag) - wm dQ - gm dP + xi
    sysm[..., 1, 0] = wm
    sysm[..., 1, 1] = gm - iw
    sysm[..., 1, 2] = -2.0 * g0 * ac
    sysm[..., 1, 3] = -2.0 * g0 * a
    # -i w da = -(ke + i D) da + i g0 a dQ + 2 G e^{i th} da^dag + s da_in
    sysm[..., 2, 0] = -1j * g0 * a
    sysm[..., 2, 2] = ke + 1j * detuning - iw
    sysm[..., 2, 3] = -2.0 * G * e
    # conjugate equation for da^dag
    sysm[..., 3, 0] = 1j * g0 * ac
    sysm[..., 3, 2] = -2.0 * G / e
    sysm[..., 3, 3] = ke - 1j * detuning - iw

    rhs = np.zeros((4, 3), dtype=complex)
    rhs[1, 2] = 1.0
    rhs[2, 0] = s
    rhs[3, 1] = s

    cond = np.linalg.cond(sysm)
    if np.any(~np.isfinite(cond)) or np.any(cond > _COND_LIMIT):
        raise NumericalError("singular response system (evaluation on an undamped resonance)")
    try:
        x = np.linalg.solve(sysm, np.broadcast_to(rhs, w.shape + (4, 3)))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular response system: {exc}") from exc
    A = np.moveaxis(x[..., 0, :], -1, 0)
    B = np.moveaxis(x[..., 2, :], -1, 0)
    C, D = output_from_intracavity(B, d)
    return ResponseCoeffs(omega=w, A=A, B=B, C=C, D=D)


def a_coeffs_closed_form(omega, ss: SteadyState, d: DerivedParams, detuning: float):
    """Closed-form ``(A1, A2, A3)`` of the mirror position."""
    w = np.asarray(omega, dtype=float)
    a = ss.a_s
    ac = a.conjugate()
    ke, G, wm = d.eff_decay, d.gain, d.omega_m
    e = cmath.exp(1j * d.phase)
    dw = d_polynomial(ss, d, detuning)(w)
    pre = -wm / dw * 2.0 * np.sqrt(2.0 * d.kappa) / (d.r + 1.0) * d.t * d.coupling_const
    A1 = pre * ((ke - 1j * (detuning + w)) * ac + 2.0 * G / e * a)
    A2 = pre * ((ke + 1j * (detuning - w)) * a + 2.0 * G * e * ac)
    A3 = -wm / dw * _cavity_denominator(w, d, detuning)
    return A1, A2, A3


def d_coeffs_closed_form(omega, ss: SteadyState, d: DerivedParams, detuning: float):
    """Closed-form ``(D1, D2, D3)`` of the field leaving the beam splitter.

    The common prefactor is ``2 kappa t^2 / ((1+r)^2 [(ke - i w)^2 + D^2 - 4G^2])``.
    """
    w = np.asarray(omega, dtype=float)
    a = ss.a_s
    ac = a.conjugate()
    ke, G, wm, g0 = d.eff_decay, d.gain, d.omega_m, d.coupling_const
    r, t = d.r, d.t
    e = cmath.exp(1j * d.phase)
    dw = d_polynomial(ss, d, detuning)(w)
    pre = 2.0 * d.kappa * t**2 / ((1.0 + r) ** 2 * _cavity_denominator(w, d, detuning))
    u = (ke - 1j * (detuning + w)) * a - 2.0 * G * e * ac
    mech = -2.0 * wm * g0**2 / dw * 1j * u
    D1 = pre * (mech * ((ke - 1j * (detuning + w)) * ac + 2.0 * G / e * a) + ke - 1j * (detuning + w))
    D1 = D1 - t**2 / (1.0 + r) - r
    D2 = pre * (mech * ((ke - 1j * (w - detuning)) * a + 2.0 * G * e * ac) + 2.0 * G * e)
    D3 = -np.sqrt(2.0 * d.kappa) * wm * g0 * t / ((1.0 + r) * dw) * 1j * u
    return D1, D2, D3
