"""Static field-chain model of the coherent-feedback cavity.

Four relations couple the field entering the cavity through the fixed
mirror (``a_in'``), the field leaving it (``a_out'``) and the two
intracavity waves ``a1``, ``a2``::

    a_in'  = i t a_in + i r a_out'
    a_out' = i r_d a_in' - i t_d a2
    a1     = -t_d a_in' - r_d a2
    a2     = -r' a1

The path phases are fixed at ``exp(i k L1) = i`` and ``exp(i k L2) = -1``
(in-phase feedback, resonant cavity) and ``a2`` plays the role of the
intracavity amplitude.  Only the zero-frequency (static) chain is modelled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import NumericalError
from .params import SystemParams, derive_constants
from .steadystate import steady_state


@dataclass(frozen=True)
class FeedbackChain:
    r: float
    t: float
    r_d: float
    t_d: float
    tau: float
    kappa: float
    r_prime: float = 1.0

    @property
    def loss(self) -> float:
        return self.kappa * self.tau

    @classmethod
    def from_loss(cls, r: float, kappa: float, loss: float) -> "FeedbackChain":
        """Lossless fixed mirror with ``t_d = sqrt(2 loss)`` and ``r_d = sqrt(1 - t_d^2)``.

        ``r_d`` then equals ``1 - loss`` to first order; ``tau = loss / kappa``.
        """
        if not 0 < loss < 0.5:
            raise ValueError("loss must lie in (0, 0.5)")
        t_d = math.sqrt(2.0 * loss)
        return cls(r=r, t=math.sqrt(1.0 - r * r), r_d=math.sqrt(1.0 - t_d**2), t_d=t_d,
                   tau=loss / kappa, kappa=kappa)


@dataclass(frozen=True)
class ChainFields:
    a_in_prime: complex
    a_out_prime: complex
    a1: complex
    a2: complex

    @property
    def a(self) -> complex:
        return self.a2


def chain_solve(fc: FeedbackChain, a_in: complex = 1.0) -> ChainFields:
    if abs(1.0 + fc.r * fc.r_d) < 1e-14 or abs(1.0 + fc.r * fc.r_d - fc.r - fc.r_d) < 1e-14:
        raise NumericalError("singular feedback chain (lossless resonant trap)")
    # unknowns: a_in', a_out', a1, a2
    m = np.array(
        [
            [1.0, -1j * fc.r, 0.0, 0.0],
            [-1j * fc.r_d, 1.0, 0.0, 1j * fc.t_d],
            [fc.t_d, 0.0, 1.0, fc.r_d],
            [0.0, 0.0, fc.r_prime, 1.0],
        ],
        dtype=complex,
    )
    rhs = np.array([1j * fc.t * a_in, 0.0, 0.0, 0.0], dtype=complex)
    try:
        x = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular feedback chain: {exc}") from exc
    return ChainFields(*(complex(v) for v in x))


def chain_output(fc: FeedbackChain, fields: ChainFields, a_in: complex = 1.0) -> complex:
    """Field leaving the beam splitter towards the detector.

    Uses the same beam-splitter matrix and path phase as the returning
    feedback arm; unit modulus for unit input when the network is lossless.
    """
    return 1j * (fc.t * fields.a_out_prime - fc.r * a_in)


def a_out_prime_relation(fc: FeedbackChain, a: complex, a_in: complex = 1.0) -> complex:
    """``a_out' = -i t_d a / (1 + r r_d) - r_d t a_in / (1 + r r_d)``."""
    den = 1.0 + fc.r * fc.r_d
    return -1j * fc.t_d / den * a - fc.r_d / den * fc.t * a_in


def small_loss_amplitude(fc: FeedbackChain, a_in: complex = 1.0) -> complex:
    """Leading small-loss form ``i sqrt(2 kappa) t / ((1-r) kappa) * a_in / sqrt(tau)``."""
    return 1j * math.sqrt(2.0 * fc.kappa) * fc.t / ((1.0 - fc.r) * fc.kappa) * a_in / math.sqrt(fc.tau)


@dataclass(frozen=True)
class FeedbackCheck:
    loss: float
    chain_amplitude: complex
    steady_amplitude: complex
    relative_deviation: float


def feedback_check(p: SystemParams, loss: float, a_in: float = 1.0) -> FeedbackCheck:
    """Compare the chain's intracavity amplitude with the steady-state formula.

    The steady state is evaluated at zero detuning and zero OPA gain with
    the drive ``eps_l = sqrt(2 kappa) a_in / sqrt(tau)``.  Amplitudes are
    compared in modulus; the chain carries an extra factor ``i`` from its
    path-phase convention.
    """
    p = p.with_(opa_gain=0.0, detuning=0.0)
    d = derive_constants(p)
    fc = FeedbackChain.from_loss(d.r, d.kappa, loss)
    a_chain = chain_solve(fc, a_in).a
    d_equiv = replace(d, drive_amplitude=math.sqrt(2.0 * d.kappa) * a_in / math.sqrt(fc.tau))
    a_main = steady_state(d_equiv, 0.0).a_s
    dev = abs(abs(a_chain) - abs(a_main)) / abs(a_main)
    return FeedbackCheck(loss=loss, chain_amplitude=a_chain, steady_amplitude=a_main, relative_deviation=dev)
