"""Linearized drift matrix and two independent stability tests.

State ordering is ``(dQ, dP, dx, dy)``: row 0 is ``d(dQ)/dt = omega_m dP`` and
the thermal force enters row 1.  With that ordering the matrix entries are

    [[ 0,                 omega_m,  0,                  0                 ],
     [-omega_m,          -gamma_m,  g0 (a + a*),       -i g0 (a - a*)     ],
     [ i g0 (a - a*),     0,        2G cos(th) - ke,    2G sin(th) + D    ],
     [ g0 (a + a*),       0,        2G sin(th) - D,    -(2G cos(th) + ke) ]]

which is what the linearization of ``2 g0 a^dag a`` gives for the
radiation-pressure force.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .params import DerivedParams
from .steadystate import SteadyState

BASIS = ("dQ", "dP", "dx", "dy")


@dataclass(frozen=True)
class DriftMatrix:
    matrix: np.ndarray
    basis: tuple = BASIS

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True)
class StabilityReport:
    eigenvalues: np.ndarray
    eigen_stable: bool
    rh_values: tuple
    rh_stable: bool

    @property
    def stable(self) -> bool:
        return self.eigen_stable

    @property
    def agree(self) -> bool:
        return self.eigen_stable == self.rh_stable


def drift_matrix(ss: SteadyState, d: DerivedParams, detuning: float) -> DriftMatrix:
    a = ss.a_s
    g0 = d.coupling_const
    wm, gm, ke = d.omega_m, d.mech_damping, d.eff_decay
    G, th = d.gain, d.phase
    re2 = g0 * 2.0 * a.real  # g0 (a + a*)
    im2 = -2.0 * g0 * a.imag  # i g0 (a - a*)
    m = np.array(
        [
            [0.0, wm, 0.0, 0.0],
            [-wm, -gm, re2, -im2],
            [im2, 0.0, 2 * G * math.cos(th) - ke, 2 * G * math.sin(th) + detuning],
            [re2, 0.0, 2 * G * math.sin(th) - detuning, -(2 * G * math.cos(th) + ke)],
        ]
    )
    return DriftMatrix(m)


def stability_eigen(M) -> tuple[np.ndarray, bool]:
    """Eigenvalues of the drift matrix and the verdict "all real parts < 0"."""
    m = np.asarray(M, dtype=float)
    try:
        ev = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue solver did not converge: {exc}") from exc
    if not np.all(np.isfinite(ev)):
        raise NumericalError("eigenvalue solver returned non-finite values")
    return ev, bool(np.all(ev.real < 0))


def characteristic_coefficients(M, scale: float | None = None) -> np.ndarray:
    """Coefficients ``[1, a1, a2, a3, a4]`` of ``det(lambda I - M)``.

    Faddeev-LeVerrier recursion on ``M/scale`` (traces of matrix products
    only, no eigen-decomposition), rescaled afterwards.
    """
    m = np.asarray(M, dtype=float)
    n = m.shape[0]
    if scale is None:
        scale = float(np.max(np.abs(m))) or 1.0
    a = m / scale
    coeffs = [1.0]
    mk = np.zeros_like(a)
    c = 1.0
    for k in range(1, n + 1):
        mk = a @ mk + c * np.eye(n)
        c = -np.trace(a @ mk) / k
        coeffs.append(c)
    return np.array(coeffs) * scale ** np.arange(n + 1)


def characteristic_closed_form(ss: SteadyState, d: DerivedParams, detuning: float) -> np.ndarray:
    """The same coefficients expanded by hand from the model parameters."""
    ke, gm, wm, G = d.eff_decay, d.mech_damping, d.omega_m, d.gain
    e = detuning**2 - 4.0 * G**2
    a1 = 2 * ke + gm
    a2 = ke**2 + e + 2 * ke * gm + wm**2
    a3 = gm * (ke**2 + e) + 2 * ke * wm**2
    a4 = wm**2 * (ke**2 + e) - coupling_offset(ss, d, detuning).real
    return np.array([1.0, a1, a2, a3, a4])


def coupling_offset(ss: SteadyState, d: DerivedParams, detuning: float) -> complex:
    """``4 omega_m g0^2 [D |a|^2 + i G (a^2 e^{-i th} - a*^2 e^{i th})]`` (real by construction)."""
    a = ss.a_s
    e = cmath.exp(1j * d.phase)
    bracket = detuning * abs(a) ** 2 + 1j * d.gain * (a * a / e - (a.conjugate() ** 2) * e)
    return 4.0 * d.omega_m * d.coupling_const**2 * bracket


def hurwitz_values(coeffs, omega_m: float) -> tuple[float, float, float, float]:
    """Routh-Hurwitz combinations for a monic quartic.

    ``b1 = a1``, ``b2 = a1 a2 - a3``, ``b3 = a3 b2 - a1^2 a4`` and
    ``b4 = a4 / omega_m``; the last normalization only rescales and keeps the
    same units as the conventional closed form.
    """
    _, a1, a2, a3, a4 = (float(c) for c in coeffs)
    b2 = a1 * a2 - a3
    b3 = a3 * b2 - a1 * a1 * a4
    return a1, b2, b3, a4 / omega_m


def routh_hurwitz(ss: SteadyState, d: DerivedParams, detuning: float):
    """``(b1, b2, b3, b4, rh_stable)`` from the characteristic polynomial of M."""
    m = drift_matrix(ss, d, detuning).matrix
    b = hurwitz_values(characteristic_coefficients(m, scale=d.omega_m), d.omega_m)
    return (*b, all(v > 0 for v in b))


def printed_b3(ss: SteadyState, d: DerivedParams, detuning: float, reading: str = "literal") -> complex:
    """The third stability combination exactly as it is commonly printed.

    ``reading="literal"`` uses ``e^{-i th}`` in both phase factors;
    ``reading="conjugate"`` uses ``e^{+i th}`` on the ``a*^2`` term as in
    the fourth condition.  Kept only to document that neither reading
    reproduces the Hurwitz determinant (see tests).
    """
    if reading not in ("literal", "conjugate"):
        raise ValueError("reading must be 'literal' or 'conjugate'")
    a = ss.a_s
    ke, gm, wm, G, g0 = d.eff_decay, d.mech_damping, d.omega_m, d.gain, d.coupling_const
    e = cmath.exp(1j * d.phase)
    second = 1 / e if reading == "literal" else e
    e2 = ke**2 - 4 * G**2 + detuning**2
    bracket = (
        4 * g0**2 * detuning * abs(a) ** 2
        - 4 * g0**2 * 1j * G * (a * a / e - a.conjugate() ** 2 * second)
        + wm * e2
    )
    return (
        wm * bracket * (2 * ke + gm) ** 2
        + (2 * ke**2 * wm**2 + e2 * gm) * (2 * ke * e2 + (4 * ke**2 + wm**2) * gm + 2 * ke * gm)
    )


def stability(ss: SteadyState, d: DerivedParams, detuning: float) -> StabilityReport:
    m = drift_matrix(ss, d, detuning)
    ev, ok = stability_eigen(m)
    *b, rh_ok = routh_hurwitz(ss, d, detuning)
    return StabilityReport(eigenvalues=ev, eigen_stable=ok, rh_values=tuple(b), rh_stable=rh_ok)
