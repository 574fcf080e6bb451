"""Time-domain oracle: exact sampling of the linear stochastic dynamics.

The fluctuations obey ``d mu = M mu dt + dW`` with ``<dW dW^T> = N dt``.
Quantum vacuum noise is replaced by classical white noise with the same
symmetrized strength, so simulated spectra reproduce *symmetrized*
spectra only; the thermal force uses its high-temperature strength.

Each step of length ``h`` is drawn from its exact law,
``mu_{k+1} = Phi mu_k + w_k`` with ``Phi = expm(M h)`` and
``w_k ~ N(0, Q_h)``, ``Q_h`` computed by Van Loan's block exponential, so
there is no discretization bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import constants, linalg, signal

from .dynamics import BASIS
from .errors import InstabilityError, NumericalError
from .params import DerivedParams
from .spectra import SpectrumSeries


@dataclass(frozen=True)
class NoiseModel:
    """Diffusion matrix plus the time scales needed to check a step size."""

    diffusion: np.ndarray
    omega_m: float
    eff_decay: float
    mech_damping: float


def noise_model(d: DerivedParams, optical: bool = True, thermal: bool = True) -> NoiseModel:
    """Diffusion matrix in the ``(dQ, dP, dx, dy)`` basis.

    Optical quadrature noise enters with amplitude ``sqrt(2 kappa) t/(1+r)``
    and unit symmetrized strength; the thermal force enters ``dP`` with
    strength ``4 gamma_m kB T / (hbar omega_m)``.
    """
    n = np.zeros((4, 4))
    if thermal:
        n[1, 1] = 4.0 * d.mech_damping * constants.k * d.temperature / (constants.hbar * d.omega_m)
    if optical:
        n[2, 2] = n[3, 3] = d.noise_amplitude**2
    return NoiseModel(diffusion=n, omega_m=d.omega_m, eff_decay=d.eff_decay, mech_damping=d.mech_damping)


@dataclass(frozen=True)
class SimConfig:
    dt: float
    n_steps: int
    n_trajectories: int = 1
    seed: int = 0
    stride: int = 1
    burn_in: Optional[float] = None  # seconds; default 10 / gamma_m

    def check(self, noise: NoiseModel) -> None:
        period = 2.0 * math.pi / noise.omega_m
        limit = 0.05 * min(period, 1.0 / noise.eff_decay)
        if not self.dt < limit:
            raise ValueError(f"dt={self.dt:g} must be below {limit:g} s")
        if self.n_steps * self.dt < 50.0 * period:
            raise ValueError("n_steps*dt must cover at least 50 mechanical periods")
        if self.n_trajectories < 1 or self.stride < 1 or self.n_steps < self.stride:
            raise ValueError("n_trajectories and stride must be positive, n_steps >= stride")


@dataclass(frozen=True)
class Trajectory:
    """Samples of shape ``(n_trajectories, n_samples, 4)`` every ``sample_dt`` seconds."""

    samples: np.ndarray
    sample_dt: float
    seed: int
    basis: tuple = BASIS

    def channel(self, name: str) -> np.ndarray:
        return self.samples[..., self.basis.index(name)]

    def stationarity(self, name: str = "dQ") -> tuple[float, float, float]:
        """First-half variance, second-half variance and the standard error of their difference."""
        x = self.channel(name)
        half = x.shape[1] // 2
        v1 = np.var(x[:, :half], axis=1)
        v2 = np.var(x[:, half : 2 * half], axis=1)
        diff = v1 - v2
        se = np.std(diff, ddof=1) / math.sqrt(len(diff)) if len(diff) > 1 else float("nan")
        return float(v1.mean()), float(v2.mean()), float(se)


def discretize(M, N, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Exact one-step propagator and noise covariance (Van Loan)."""
    m = np.asarray(M, dtype=float)
    n = m.shape[0]
    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = -m
    block[:n, n:] = N
    block[n:, n:] = m.T
    f = linalg.expm(block * h)
    phi = f[n:, n:].T
    q = phi @ f[:n, n:]
    return phi, 0.5 * (q + q.T)


def _compose(phi, q, k: int):
    """Propagator and covariance for ``2**k`` consecutive steps (repeated doubling)."""
    for _ in range(k):
        q = phi @ q @ phi.T + q
        phi = phi @ phi
    return phi, 0.5 * (q + q.T)


def _sqrt_psd(q):
    lam, v = np.linalg.eigh(q)
    return v * np.sqrt(np.clip(lam, 0.0, None))


def _propagate(phi, x0, w):
    """``x_k = phi x_{k-1} + w_k`` for a batch: ``x0`` (b, n), ``w`` (b, steps, n)."""
    lam, v = np.linalg.eig(phi)
    if np.linalg.cond(v) < 1e6 and np.all(np.abs(lam) < 1):
        vinv = np.linalg.inv(v)
        u = w @ vinv.T
        z0 = x0 @ vinv.T
        z = np.empty_like(u)
        for j, lj in enumerate(lam):
            for b in range(u.shape[0]):
                z[b, :, j], _ = signal.lfilter([1.0], [1.0, -lj], u[b, :, j], zi=[lj * z0[b, j]])
        return (z @ v.T).real
    out = np.empty_like(w)
    x = x0
    for k in range(w.shape[1]):
        x = x @ phi.T + w[:, k]
        out[:, k] = x
    return out


def simulate(M, noise: NoiseModel, cfg: SimConfig) -> Trajectory:
    """Sample stationary trajectories of the linearized dynamics.

    Every trajectory has its own generator spawned from ``cfg.seed``; the
    result is bit-identical for a repeated seed.  Propagation over the
    ``stride`` steps between recorded samples is done in one exact step.
    """
    m = np.asarray(M, dtype=float)
    if not np.all(np.linalg.eigvals(m).real < 0):
        raise InstabilityError("refusing to simulate an unstable drift matrix")
    cfg.check(noise)
    h = cfg.dt * cfg.stride
    n_samples = cfg.n_steps // cfg.stride
    phi, q = discretize(m, noise.diffusion, h)

    burn = cfg.burn_in if cfg.burn_in is not None else 10.0 / noise.mech_damping
    k = max(0, math.ceil(math.log2(max(burn / h, 1.0))))
    phi_b, q_b = _compose(phi, q, k)

    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.n_trajectories)
    rngs = [np.random.default_rng(s) for s in seeds]
    lq, lqb = _sqrt_psd(q), _sqrt_psd(q_b)
    x0 = np.stack([lqb @ rng.standard_normal(4) for rng in rngs])
    w = np.stack([rng.standard_normal((n_samples, 4)) @ lq.T for rng in rngs])
    out = _propagate(phi, x0, w)
    if not np.all(np.isfinite(out)):
        raise NumericalError("trajectory diverged")
    return Trajectory(samples=out, sample_dt=h, seed=cfg.seed)


def stationary_covariance(M, N) -> np.ndarray:
    """Solution of ``M S + S M^T + N = 0``."""
    return linalg.solve_continuous_lyapunov(np.asarray(M, dtype=float), -np.asarray(N, dtype=float))


def empirical_covariance(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Mean over trajectories of the per-trajectory covariance, and its standard error."""
    x = traj.samples
    per = np.einsum("bti,btj->bij", x, x) / x.shape[1]
    mean = per.mean(axis=0)
    if x.shape[0] < 2:
        return mean, np.full_like(mean, np.nan)
    return mean, per.std(axis=0, ddof=1) / math.sqrt(x.shape[0])


@dataclass(frozen=True)
class PSDEstimate:
    series: SpectrumSeries
    stderr: np.ndarray
    n_segments: int
    nperseg: int = field(default=0)


def psd_estimate(traj: Trajectory, channel: str = "dQ", nperseg: Optional[int] = None,
                 resolution: Optional[float] = None) -> PSDEstimate:
    """Averaged (Welch, Hann, 50% overlap) periodogram in the two-sided angular convention.

    Normalization: ``S(w) = P_onesided(f) / 2`` at ``w = 2 pi f``, so that
    ``(1/2pi) int_{-inf}^{inf} S(w) dw`` is the variance, the same
    convention as the analytic spectra.  ``resolution`` (rad/s) sets the
    segment length when ``nperseg`` is not given.
    """
    x = traj.channel(channel)
    n = x.shape[1]
    fs = 1.0 / traj.sample_dt
    if nperseg is None:
        if resolution is None:
            raise ValueError("give nperseg or resolution")
        nperseg = int(math.ceil(2.0 * math.pi * fs / resolution))
    if nperseg > n or nperseg < 8:
        raise ValueError(f"segment too short for requested resolution ({n} samples, need {nperseg})")
    f, _, sxx = signal.spectrogram(x, fs=fs, window="hann", nperseg=nperseg, noverlap=nperseg // 2,
                                   detrend=False, scaling="density", mode="psd", axis=-1)
    # sxx: (n_traj, n_freq, n_seg)
    per_traj = sxx.mean(axis=-1) / 2.0
    psd = per_traj.mean(axis=0)
    if per_traj.shape[0] > 1:
        se = per_traj.std(axis=0, ddof=1) / math.sqrt(per_traj.shape[0])
    else:
        seg = sxx[0] / 2.0
        se = seg.std(axis=-1, ddof=1) / math.sqrt(seg.shape[-1])
    # DC and (for even nperseg) Nyquist bins are not doubled in the one-sided density
    keep = slice(1, -1) if nperseg % 2 == 0 else slice(1, None)
    kind = "S_Q" if channel == "dQ" else f"S_{channel}"
    series = SpectrumSeries(grid=2.0 * math.pi * f[keep], values=psd[keep], kind=kind,
                            params_snapshot={"sample_dt": traj.sample_dt, "seed": traj.seed})
    return PSDEstimate(series=series, stderr=se[keep], n_segments=int(sxx.shape[0] * sxx.shape[-1]),
                       nperseg=nperseg)
