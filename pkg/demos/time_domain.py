# Check the analytic position spectrum against simulated trajectories.
#
# The linear Langevin equations are sampled exactly (matrix exponential plus
# the exact per-step noise covariance).  Vacuum noise is replaced by classical
# white noise of the same symmetrized strength, so only the thermally
# dominated S_Q is expected to agree.
import math

import numpy as np

from nmslab import drift_matrix, operating_point, paper_parameters
from nmslab.spectra import ThermalFactor, s_q
from nmslab.timesim import SimConfig, empirical_covariance, noise_model, psd_estimate, simulate, stationary_covariance

p = paper_parameters(opa_gain=0.5 * 2 * math.pi * 215e3, bs_reflectivity=0.5)
ss, d, delta = operating_point(p).unpack()
m = drift_matrix(ss, d, delta).matrix
noise = noise_model(d)

cfg = SimConfig(dt=0.04 * 2 * math.pi / d.omega_m, n_steps=4 * 131072, n_trajectories=32, seed=1, stride=4)
traj = simulate(m, noise, cfg)
est = psd_estimate(traj, "dQ", nperseg=2048)

w = est.series.grid
band = (w > 0.7 * d.omega_m) & (w < 1.3 * d.omega_m)
ref = s_q(w[band], ss, d, delta, ThermalFactor(d.temperature, "high_t"))
err = np.abs(est.series.values[band] / ref - 1)
print(f"{est.n_segments} averaged segments")
print(f"max relative PSD error in [0.7, 1.3] wm: {err.max():.3f} (median {np.median(err):.3f})")

cov, se = empirical_covariance(traj)
z = (cov - stationary_covariance(m, noise.diffusion)) / se
print("covariance z-scores:")
print(np.array2string(z, precision=2, suppress_small=True))
print("first/second half variance of dQ: %.3f %.3f (se of difference %.3f)" % traj.stationarity("dQ"))
