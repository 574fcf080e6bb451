# Position and output-field spectra with feedback and parametric gain.
#
# At fixed OPA gain the feedback sharpens the two normal-mode peaks.  Peak
# positions are compared with the real parts of the zeros of d(w).
import sys
from pathlib import Path

import numpy as np

from nmslab import modes_for, paper_parameters, spectrum_series
from nmslab.figures import spectral_peaks
from nmslab.plotting import Curve, Panel, emit_plot

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out.mkdir(exist_ok=True)

base = paper_parameters(opa_gain=0.5 * 2 * np.pi * 215e3)
wm = base.mech_freq
grid = np.linspace(0.5, 1.5, 4001) * wm

panels = {"S_Q": [], "S_aout": []}
print(" r    kind     separation  height      fwhm")
for r in (0.0, 0.3, 0.5, 0.7):
    p = base.with_(bs_reflectivity=r)
    for kind in panels:
        s = spectrum_series(kind, p, grid, scale_by_gamma=(kind == "S_Q"))
        pk = spectral_peaks(s.omega_over_omega_m, s.values)
        print(f"{r:3.1f}  {kind:7s}  {pk.separation:9.4f}  {pk.max_height:10.4g}  {pk.fwhm:.4f}")
        panels[kind].append(Curve(s.omega_over_omega_m, s.values, f"r={r}"))

# peaks against mode frequencies at r = 0.5
p = base.with_(bs_reflectivity=0.5)
s = spectrum_series("S_Q", p, grid)
pk = spectral_peaks(s.omega_over_omega_m, s.values)
roots = modes_for(p).positive_re_roots / wm
print("S_Q peaks at", np.round(pk.positions, 4), "mode frequencies", np.round(roots.real, 4),
      "half linewidth", np.round(abs(roots.imag) / 2, 4))

svg = emit_plot([Panel(panels["S_Q"], xlabel="w/wm", ylabel="S_Q * gamma_m"),
                 Panel(panels["S_aout"], xlabel="w/wm", ylabel="S_aout")])
(out / "spectra.svg").write_text(svg)
print("wrote", out / "spectra.svg")
