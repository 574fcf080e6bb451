# Normal modes of the mirror + cavity system versus feedback strength.
#
# The beam-splitter reflectivity r sets the effective cavity linewidth,
# kappa_eff = kappa (1 - r) / (1 + r), and the intracavity amplitude.  The two
# positive-frequency zeros of d(w) merge below an onset value of r and split
# above it; the OPA gain moves that onset.
import math
import sys
from pathlib import Path

import numpy as np

from nmslab import nms_onset, operating_point, paper_parameters, stability, sweep_modes
from nmslab.figures import R_GRID
from nmslab.plotting import Curve, Panel, emit_plot

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

base = paper_parameters()  # 2 mW, theta = -pi/4, degenerate detuning
kappa, wm = base.cavity_decay, base.mech_freq

# one operating point first
op = operating_point(base.with_(opa_gain=0.5 * kappa, bs_reflectivity=0.5))
rep = stability(*op.unpack())
print(f"photons in cavity: {op.steady.photon_number:.3e}")
print(f"enhanced coupling g/wm: {op.steady.enhanced_coupling / wm:.4f}")
print(f"stable: {rep.eigen_stable} (Routh-Hurwitz agrees: {rep.agree})")

# where does the splitting start?
for g in (0.0, 0.5, 1.1):
    r_star = nms_onset(base.with_(opa_gain=g * kappa), "bs_reflectivity", -0.9, 0.9)
    print(f"G = {g:3.1f} kappa: splitting starts at r = {r_star:+.3f}")

# full sweep, plotted as frequencies and linewidths
re_curves, im_curves = [], []
for g in (0.0, 0.5, 1.1):
    pts = sweep_modes(base.with_(opa_gain=g * kappa), "bs_reflectivity", R_GRID)
    x = [pt.value for pt in pts if pt.modes]
    roots = np.array([pt.modes.positive_re_roots for pt in pts if pt.modes]) / wm
    for k in (0, 1):
        label = f"G={g}kappa" if k == 0 else ""
        re_curves.append(Curve(x, roots[:, k].real, label))
        im_curves.append(Curve(x, roots[:, k].imag, label))

svg = emit_plot([
    Panel(re_curves, xlabel="r", ylabel="Re(w)/wm"),
    Panel(im_curves, xlabel="r", ylabel="Im(w)/wm"),
])
(out / "normal_modes.svg").write_text(svg)
print("wrote", out / "normal_modes.svg")
