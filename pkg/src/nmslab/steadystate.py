"""Classical operating point of the cavity-mirror-OPA-feedback system."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import ThresholdError
from .params import DEGENERATE, DerivedParams, SystemParams, derive_constants


@dataclass(frozen=True)
class SteadyState:
    """Mean values about which the fluctuations are linearized.

    ``enhanced_coupling`` is the magnitude ``2*g0*|a_s|``; the complex
    amplitude ``a_s`` is kept for every downstream formula.
    """

    a_s: complex
    Q_s: float
    P_s: float
    photon_number: float
    enhanced_coupling: float
    detuning: float


def degenerate_detuning(omega_m: float, gain: float) -> float:
    """Detuning that makes the two uncoupled mode frequencies coincide."""
    return math.sqrt(omega_m**2 + 4.0 * gain**2)


def resolve_detuning(p: SystemParams) -> float:
    if isinstance(p.detuning, str) and p.detuning == DEGENERATE:
        return degenerate_detuning(p.mech_freq, p.opa_gain)
    return float(p.detuning)


def steady_state(d: DerivedParams, detuning: float) -> SteadyState:
    """Solve the time-independent equations at a prescribed effective detuning.

    Raises
    ------
    ThresholdError
        If ``4 G**2 >= kappa_eff**2 + detuning**2``.
    """
    ke, G, theta = d.eff_decay, d.gain, d.phase
    denom = ke**2 + detuning**2 - 4.0 * G**2
    if not denom > 0:
        raise ThresholdError(
            f"above OPA threshold: 4G^2={4 * G**2:.6g} >= kappa_eff^2 + Delta^2={ke**2 + detuning**2:.6g}"
        )
    drive = d.t * d.drive_amplitude / (1.0 + d.r)
    a_s = (ke - 1j * detuning + 2.0 * G * cmath.exp(1j * theta)) / denom * drive
    n = abs(a_s) ** 2
    g0 = d.coupling_const
    return SteadyState(
        a_s=complex(a_s),
        Q_s=2.0 * g0 / d.omega_m * n,
        P_s=0.0,
        photon_number=n,
        enhanced_coupling=2.0 * g0 * abs(a_s),
        detuning=float(detuning),
    )


@dataclass(frozen=True)
class OperatingPoint:
    """Bundle of derived constants, resolved detuning and steady state."""

    derived: DerivedParams
    detuning: float
    steady: SteadyState

    @property
    def params(self) -> SystemParams:
        return self.derived.system

    def unpack(self):
        """``(steady, derived, detuning)`` in the order the model functions take them."""
        return self.steady, self.derived, self.detuning


def operating_point(p: SystemParams) -> OperatingPoint:
    d = derive_constants(p)
    delta = resolve_detuning(p)
    return OperatingPoint(derived=d, detuning=delta, steady=steady_state(d, delta))
