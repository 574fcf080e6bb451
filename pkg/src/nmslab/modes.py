"""Normal modes as the complex zeros of the quartic d(omega).

    d(w) = (w^2 - wm^2 + i gm w) [(ke - i w)^2 + D^2 - 4 G^2]
           + 4 wm g0^2 [D |a|^2 + i G (a^2 e^{-i th} - a*^2 e^{i th})]

The zeros coincide with the eigenvalues of ``i M``.  Real parts are mode
frequencies, ``|Im|`` their linewidths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .dynamics import coupling_offset, stability
from .errors import NoOnsetError, NumericalError, NMSLabError
from .params import DerivedParams, SystemParams
from .steadystate import SteadyState, operating_point

RESIDUAL_BOUND = 1e-9


@dataclass(frozen=True)
class Quartic:
    """``d(w) = sum_k coeffs[k] w**k`` (ascending order)."""

    coeffs: np.ndarray
    omega_m: float

    def __call__(self, w):
        return P.polyval(w, self.coeffs)

    def derivative(self, w):
        return P.polyval(w, P.polyder(self.coeffs))


@dataclass(frozen=True)
class ModeSet:
    roots: np.ndarray
    positive_re_roots: np.ndarray
    split: bool
    separation: float
    linewidths: np.ndarray
    tolerance: float

    @property
    def frequencies(self) -> np.ndarray:
        return self.positive_re_roots.real


def d_polynomial(ss: SteadyState, d: DerivedParams, detuning: float) -> Quartic:
    wm, gm, ke, G = d.omega_m, d.mech_damping, d.eff_decay, d.gain
    mech = np.array([-(wm**2), 1j * gm, 1.0], dtype=complex)
    opt = np.array([ke**2 + detuning**2 - 4 * G**2, -2j * ke, -1.0], dtype=complex)
    c = P.polymul(mech, opt)
    c[0] += coupling_offset(ss, d, detuning)
    return Quartic(coeffs=np.asarray(c, dtype=complex), omega_m=wm)


def quartic_roots(q: Quartic) -> np.ndarray:
    """All four zeros via eigenvalues of the companion matrix of the scaled monic polynomial."""
    c = np.asarray(q.coeffs, dtype=complex)
    if c[-1] == 0:
        raise NumericalError("leading coefficient vanishes")
    n = len(c) - 1
    monic = c / c[-1]
    s = max(abs(monic[0]) ** (1.0 / n), 1e-300)
    scaled = monic * s ** (-(n - np.arange(n + 1)))  # polynomial in z = w/s
    comp = np.zeros((n, n), dtype=complex)
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -scaled[:-1]
    try:
        z = np.linalg.eigvals(comp)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"root finder did not converge: {exc}") from exc
    w = z * s
    # one Newton step on the unscaled polynomial removes the eigen-solver's rounding
    dw = q(w) / q.derivative(w)
    polished = w - np.where(np.isfinite(dw), dw, 0)
    better = np.abs(q(polished)) < np.abs(q(w))
    w = np.where(better, polished, w)
    resid = np.abs(q(w)) / np.max(np.abs(c))
    if not np.all(resid < RESIDUAL_BOUND):
        raise NumericalError(f"root residual {resid.max():.3g} exceeds {RESIDUAL_BOUND}")
    return w


def splitting_tolerance(omega_m: float, linewidths) -> float:
    return max(1e-6 * omega_m, 1e-3 * float(np.mean(np.abs(linewidths))))


def normal_modes(q: Quartic, previous: Optional[ModeSet] = None) -> ModeSet:
    """Classify the zeros of ``q`` into the two positive-frequency normal modes.

    Roots whose real part is within the splitting tolerance of zero are
    ambiguous; they are assigned by nearest match to ``previous`` when
    given (sweeps), otherwise by largest real part.
    """
    roots = quartic_roots(q)
    order = np.argsort(-roots.real)
    by_re = roots[order]
    tol0 = splitting_tolerance(q.omega_m, by_re[:2].imag)
    ambiguous = not (by_re[1].real > tol0 and by_re[2].real < -tol0)
    if ambiguous and previous is not None:
        pairs = [(i, j) for i in range(4) for j in range(i + 1, 4)]
        ref = np.sort_complex(previous.positive_re_roots)

        def cost(ij):
            cand = roots[list(ij)]
            cand = cand[np.argsort(cand.real)]
            return np.sum(np.abs(cand - ref))

        pos = roots[list(min(pairs, key=cost))]
    else:
        pos = by_re[:2]
    pos = pos[np.argsort(pos.real)]
    linewidths = np.abs(pos.imag)
    tol = splitting_tolerance(q.omega_m, linewidths)
    gap = float(pos[1].real - pos[0].real)
    split = gap > tol
    return ModeSet(
        roots=roots[np.argsort(roots.real)],
        positive_re_roots=pos,
        split=split,
        separation=gap if split else 0.0,
        linewidths=linewidths,
        tolerance=tol,
    )


def modes_for(p: SystemParams, previous: Optional[ModeSet] = None) -> ModeSet:
    ss, d, delta = operating_point(p).unpack()
    return normal_modes(d_polynomial(ss, d, delta), previous)


@dataclass(frozen=True)
class SweepPoint:
    value: float
    stable: bool
    modes: Optional[ModeSet] = None
    error: Optional[str] = None
    eigenvalues: Optional[np.ndarray] = field(default=None, repr=False)


def sweep_modes(base: SystemParams, variable: str, values: Sequence[float]) -> list[SweepPoint]:
    """Normal modes along a one-parameter grid.

    Points that are unstable, above threshold or otherwise invalid are kept
    in the output with ``stable=False`` and ``modes=None``; the grid order is
    preserved.
    """
    if variable not in SystemParams.__dataclass_fields__:
        raise ValueError(f"unknown sweep variable {variable!r}")
    out = []
    previous = None
    for v in values:
        v = float(v)
        try:
            op = operating_point(base.with_(**{variable: v}))
            ss, d, delta = op.unpack()
            rep = stability(ss, d, delta)
        except NMSLabError as exc:
            out.append(SweepPoint(value=v, stable=False, error=str(exc)))
            previous = None
            continue
        if not rep.eigen_stable:
            out.append(SweepPoint(value=v, stable=False, error="unstable", eigenvalues=rep.eigenvalues))
            previous = None
            continue
        try:
            ms = normal_modes(d_polynomial(ss, d, delta), previous)
        except NumericalError as exc:
            out.append(SweepPoint(value=v, stable=True, error=str(exc), eigenvalues=rep.eigenvalues))
            previous = None
            continue
        out.append(SweepPoint(value=v, stable=True, modes=ms, eigenvalues=rep.eigenvalues))
        previous = ms
    return out


def _split_at(base: SystemParams, variable: str, value: float) -> bool:
    return modes_for(base.with_(**{variable: float(value)})).split


def nms_onset(
    base: SystemParams,
    variable: str,
    lo: float,
    hi: float,
    n_scan: int = 181,
    tol: float = 1e-3,
) -> float:
    """Value of ``variable`` in ``[lo, hi]`` at which the two modes start (or stop) splitting.

    The range is scanned on ``n_scan`` points; the first change of the
    split flag is then bracketed by bisection to ``tol``.
    """
    grid = np.linspace(lo, hi, n_scan)
    states = [_split_at(base, variable, v) for v in grid]
    for i in range(len(grid) - 1):
        if states[i] != states[i + 1]:
            a, b, sa = grid[i], grid[i + 1], states[i]
            break
    else:
        raise NoOnsetError(f"no onset in range [{lo}, {hi}] for {variable} (split={states[0]})")
    while b - a > tol:
        mid = 0.5 * (a + b)
        if _split_at(base, variable, mid) == sa:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def splitting_region(points: Sequence[SweepPoint]) -> list[float]:
    """Grid values at which the modes are split (stable points only)."""
    return [pt.value for pt in points if pt.modes is not None and pt.modes.split]
