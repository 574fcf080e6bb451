"""Command-line front end: ``nmslab <subcommand> [flags]``.

Every run writes its data files plus a JSON manifest into the output
directory.  Data files start with ``# manifest <hash>`` so each one can be
traced back to the resolved parameters and flags that produced it.  Output
contains no timestamps; reruns with the same config and seed are
byte-identical.

Exit status: 0 success, 2 configuration or usage error, 3 unstable or
above-threshold operating point, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import drift_matrix, stability
from .errors import ConfigError, InstabilityError, NumericalError, ThresholdError
from .feedback import feedback_check
from .figures import R_GRID
from .modes import d_polynomial, normal_modes, sweep_modes
from .params import SystemParams, load_config
from .plotting import Curve, Panel, emit_plot
from .spectra import KINDS, spectrum_series
from .steadystate import operating_point
from .timesim import SimConfig, noise_model, psd_estimate, simulate

EXIT_OK, EXIT_CONFIG, EXIT_UNSTABLE, EXIT_NUMERICAL = 0, 2, 3, 4

SWEEP_COLUMNS = ("swept_var", "re_root_1", "re_root_2", "im_root_1", "im_root_2", "split", "stable")
SPECTRUM_COLUMNS = ("omega_rad_s", "omega_over_omega_m", "value")
THERMAL = {"coth": "coth", "hight": "high_t"}


# --------------------------------------------------------------------------
# manifest and writers


@dataclass
class RunManifest:
    subcommand: str
    params: dict
    grids: dict
    outputs: list
    config_sha256: str
    flags: dict = field(default_factory=dict)
    tool_version: str = __version__

    def digest(self) -> str:
        return hashlib.sha256(_canonical(asdict(self)).encode()).hexdigest()

    def to_json(self) -> str:
        return _canonical({**asdict(self), "manifest_sha256": self.digest()}, indent=2) + "\n"


def _canonical(obj, indent=None) -> str:
    return json.dumps(obj, sort_keys=True, indent=indent, allow_nan=True)


def _num(v) -> str:
    return f"{float(v):.16e}"


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, str):
        return v
    return _num(v)


def csv_text(columns, rows, manifest_hash: str) -> str:
    lines = [f"# manifest {manifest_hash}", ",".join(columns)]
    lines += [",".join(_cell(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    return x


class Run:
    """Collects the files of one invocation and writes them with a shared manifest."""

    def __init__(self, args, params: SystemParams, config_hash: str):
        self.args = args
        self.params = params
        self.config_hash = config_hash
        self.files: dict[str, object] = {}
        self.grids: dict = {}
        self.flags: dict = {}

    def add(self, name, content):
        self.files[name] = content

    def finish(self) -> str:
        out = Path(os.environ.get("NMSLAB_OUT") or self.args.out)
        out.mkdir(parents=True, exist_ok=True)
        stem = self.args.command
        manifest = RunManifest(
            subcommand=stem,
            params=_jsonable(self.params.to_dict()),
            grids=_jsonable(self.grids),
            outputs=sorted(self.files) + [f"{stem}.manifest.json"],
            config_sha256=self.config_hash,
            flags=_jsonable(self.flags),
        )
        h = manifest.digest()
        for name, content in self.files.items():
            path = out / name
            if callable(content):
                content = content(h)
            if isinstance(content, bytes):
                path.write_bytes(content)
            else:
                path.write_text(content, encoding="utf-8", newline="\n")
        (out / f"{stem}.manifest.json").write_text(manifest.to_json(), encoding="utf-8", newline="\n")
        return h


# --------------------------------------------------------------------------
# config and flag parsing


def bundled_config(name: str) -> Path:
    return Path(str(resources.files("nmslab") / "configs" / name))


def resolve_config(arg: str | None, command: str) -> Path:
    if arg is None:
        if command.startswith("fig"):
            return bundled_config(f"paper_{command}.cfg")
        raise ConfigError("--config is required for this subcommand")
    p = Path(arg)
    if not p.exists() and bundled_config(p.name).exists() and p.name == arg:
        return bundled_config(arg)
    return p


def parse_grid(spec: str) -> np.ndarray:
    """``start:stop:num`` to an inclusive linspace."""
    try:
        start, stop, num = spec.split(":")
        start, stop, num = float(start), float(stop), int(num)
    except ValueError as exc:
        raise ConfigError(f"grid spec must be start:stop:num (got {spec!r})") from exc
    if num < 1 or not (math.isfinite(start) and math.isfinite(stop)) or (num > 1 and stop <= start):
        raise ConfigError(f"grid must be non-empty ascending (got {spec!r})")
    return np.linspace(start, stop, num)


# --------------------------------------------------------------------------
# shared row builders (the figure commands reuse these)


def sweep_rows(base: SystemParams, variable: str, grid, wm: float, curve: str | None = None):
    rows = []
    for pt in sweep_modes(base, variable, grid):
        if pt.modes is not None:
            r1, r2 = pt.modes.positive_re_roots / wm
            vals = [r1.real, r2.real, r1.imag, r2.imag, pt.modes.split]
        else:
            vals = [math.nan] * 4 + [False]
        row = [pt.value, *vals, pt.stable]
        rows.append(row if curve is None else [curve, *row])
    return rows


def sweep_panels(rows, xlabel: str):
    """Two panels (real and imaginary parts) with one curve pair per label."""
    by_curve: dict[str, list] = {}
    for row in rows:
        by_curve.setdefault(row[0], []).append(row[1:])
    re_curves, im_curves = [], []
    for label, data in by_curve.items():
        good = [d for d in data if not math.isnan(d[1])]
        if not good:
            continue
        x = [d[0] for d in good]
        for k in (0, 1):
            re_curves.append(Curve(x, [d[1 + k] for d in good], label if k == 0 else ""))
            im_curves.append(Curve(x, [d[3 + k] for d in good], label if k == 0 else ""))
    return [
        Panel(re_curves, xlabel=xlabel, ylabel="Re(omega)/omega_m", title="Normal-mode frequencies"),
        Panel(im_curves, xlabel=xlabel, ylabel="Im(omega)/omega_m", title="Normal-mode linewidths"),
    ]


def spectrum_rows(series, curve: str | None = None):
    wm = series.params_snapshot["mech_freq"]
    rows = []
    for w, v in zip(series.grid, series.values):
        row = [w, w / wm, v]
        rows.append(row if curve is None else [curve, series.kind, *row])
    return rows


def _spectrum_sidecar(series) -> str:
    return _canonical(_jsonable({
        "kind": series.kind,
        "scaled_by_gamma": series.scaled_by_gamma,
        "thermal_mode": series.thermal_mode,
        "params": series.params_snapshot,
        "n_points": len(series.grid),
    }), indent=2) + "\n"


# --------------------------------------------------------------------------
# subcommands


def _print_json(obj):
    print(_canonical(_jsonable(obj), indent=2))


def cmd_steady(run: Run):
    ss = operating_point(run.params).steady
    data = _jsonable(asdict(ss))
    _print_json(data)
    run.add("steady.json", _canonical(data, indent=2) + "\n")


def cmd_stability(run: Run):
    ss, d, delta = operating_point(run.params).unpack()
    rep = stability(ss, d, delta)
    data = _jsonable({
        "eigenvalues": rep.eigenvalues,
        "b1": rep.rh_values[0], "b2": rep.rh_values[1], "b3": rep.rh_values[2], "b4": rep.rh_values[3],
        "eigen_stable": rep.eigen_stable,
        "rh_stable": rep.rh_stable,
        "drift_matrix": drift_matrix(ss, d, delta).matrix,
    })
    _print_json(data)
    run.add("stability.json", _canonical(data, indent=2) + "\n")


def cmd_modes(run: Run):
    p = run.params
    ss, d, delta = operating_point(p).unpack()
    rep = stability(ss, d, delta)
    if not rep.eigen_stable:
        raise InstabilityError("operating point is unstable; use `sweep` to map unstable regions")
    ms = normal_modes(d_polynomial(ss, d, delta))
    r1, r2 = ms.positive_re_roots / d.omega_m
    row = [p.bs_reflectivity, r1.real, r2.real, r1.imag, r2.imag, ms.split, True]
    _print_json({"roots_over_omega_m": ms.roots / d.omega_m, "split": ms.split,
                 "separation_over_omega_m": ms.separation / d.omega_m})
    run.add("modes.csv", lambda h: csv_text(SWEEP_COLUMNS, [row], h))


def cmd_sweep(run: Run):
    a = run.args
    if a.var not in SystemParams.__dataclass_fields__ or a.var == "detuning":
        raise ConfigError(f"cannot sweep {a.var!r}")
    grid = parse_grid(a.grid) if a.grid else R_GRID
    run.grids = {"variable": a.var, "spec": a.grid or "-0.9:0.9:181"}
    rows = sweep_rows(run.params, a.var, grid, run.params.mech_freq)
    run.add("sweep.csv", lambda h: csv_text(SWEEP_COLUMNS, rows, h))
    if a.svg:
        panels = sweep_panels([["sweep", *r] for r in rows], a.var)
        run.add("sweep.svg", emit_plot(panels))


def _spectrum_grid(run: Run, default="0.5:1.5:2001"):
    spec = run.args.grid or default
    run.grids = {"omega_over_omega_m": spec}
    return parse_grid(spec) * run.params.mech_freq


def cmd_spectra(run: Run):
    a = run.args
    grid = _spectrum_grid(run)
    run.flags = {"kind": a.kind, "thermal": a.thermal, "scale_by_gamma": a.scale_by_gamma}
    s = spectrum_series(a.kind, run.params, grid, thermal=THERMAL[a.thermal],
                        scale_by_gamma=a.scale_by_gamma)
    rows = spectrum_rows(s)
    run.add(f"spectra_{a.kind}.csv", lambda h: csv_text(SPECTRUM_COLUMNS, rows, h))
    run.add(f"spectra_{a.kind}.json", _spectrum_sidecar(s))
    if a.svg:
        run.add(f"spectra_{a.kind}.svg", emit_plot(Panel(
            [Curve(s.omega_over_omega_m, s.values, a.kind)], xlabel="omega/omega_m", ylabel=a.kind)))


def cmd_simulate(run: Run):
    a = run.args
    p = run.params
    ss, d, delta = operating_point(p).unpack()
    m = drift_matrix(ss, d, delta).matrix
    noise = noise_model(d)
    dt = a.dt if a.dt is not None else 0.04 * min(2 * math.pi / d.omega_m, 1 / d.eff_decay)
    cfg = SimConfig(dt=dt, n_steps=a.n_steps, n_trajectories=a.trajectories, seed=a.seed, stride=a.stride)
    run.flags = {"dt": dt, "n_steps": a.n_steps, "trajectories": a.trajectories, "seed": a.seed,
                 "stride": a.stride, "nperseg": a.nperseg, "dump": a.dump}
    try:
        cfg.check(noise)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    traj = simulate(m, noise, cfg)
    est = psd_estimate(traj, "dQ", nperseg=a.nperseg)
    wm = d.omega_m
    rows = [[w, w / wm, v] for w, v in zip(est.series.grid, est.series.values)]
    run.add("psd_dQ.csv", lambda h: csv_text(SPECTRUM_COLUMNS, rows, h))
    if a.dump == "npy":
        import io

        buf = io.BytesIO()
        np.save(buf, traj.samples, allow_pickle=False)
        run.add("trajectory.npy", buf.getvalue())
    elif a.dump == "csv":
        cols = ("trajectory", "t_s", "dQ", "dP", "dx", "dy")
        rows_t = [[float(b), k * traj.sample_dt, *traj.samples[b, k]]
                  for b in range(traj.samples.shape[0]) for k in range(traj.samples.shape[1])]
        run.add("trajectory.csv", lambda h: csv_text(cols, rows_t, h))
    print(f"{est.n_segments} segments, nperseg {est.nperseg}, sample dt {traj.sample_dt:.6e} s")


def cmd_feedback_check(run: Run):
    chk = feedback_check(run.params, run.args.loss)
    data = _jsonable(asdict(chk))
    _print_json(data)
    run.add("feedback_check.json", _canonical(data, indent=2) + "\n")


def _fig_sweep(run: Run, curves, xlabel="bs_reflectivity"):
    """``curves``: list of (label, overrides); every curve is a sweep over r."""
    grid = parse_grid(run.args.grid) if run.args.grid else R_GRID
    run.grids = {"variable": "bs_reflectivity", "spec": run.args.grid or "-0.9:0.9:181",
                 "curves": [c[0] for c in curves]}
    wm = run.params.mech_freq
    rows = []
    for label, kw in curves:
        rows += sweep_rows(run.params.with_(**kw), "bs_reflectivity", grid, wm, curve=label)
    name = run.args.command
    run.add(f"{name}.csv", lambda h: csv_text(("curve",) + SWEEP_COLUMNS, rows, h))
    if run.args.svg:
        run.add(f"{name}.svg", emit_plot(sweep_panels(rows, xlabel)))


def _fig_spectra(run: Run, curves):
    grid = _spectrum_grid(run)
    th = THERMAL[run.args.thermal]
    run.grids["curves"] = [c[0] for c in curves]
    rows, panels = [], {"S_Q": [], "S_aout": []}
    for label, kw in curves:
        p = run.params.with_(**kw)
        for kind in ("S_Q", "S_aout"):
            s = spectrum_series(kind, p, grid, thermal=th, scale_by_gamma=(kind == "S_Q"))
            rows += spectrum_rows(s, curve=label)
            panels[kind].append(Curve(s.omega_over_omega_m, s.values, label))
    name = run.args.command
    run.add(f"{name}.csv", lambda h: csv_text(("curve", "series") + SPECTRUM_COLUMNS, rows, h))
    if run.args.svg:
        run.add(f"{name}.svg", emit_plot([
            Panel(panels["S_Q"], xlabel="omega/omega_m", ylabel="S_Q * gamma_m", title="Mirror position"),
            Panel(panels["S_aout"], xlabel="omega/omega_m", ylabel="S_aout", title="Output field"),
        ]))


def cmd_fig2(run: Run):
    k = run.params.cavity_decay
    _fig_sweep(run, [(f"G={g:g}kappa", {"opa_gain": g * k}) for g in (0.0, 0.5, 1.1)])


def cmd_fig3(run: Run):
    _fig_sweep(run, [(f"P_in={p * 1e3:g}mW", {"input_power": p, "opa_gain": 0.0})
                     for p in (2e-3, 4e-3, 6.9e-3)])


def cmd_fig4(run: Run):
    k = run.params.cavity_decay
    _fig_sweep(run, [(f"theta={th:g}pi", {"opa_phase": th * math.pi, "opa_gain": 0.5 * k})
                     for th in (0.25, 0.0, -0.25)])


def cmd_fig5(run: Run):
    k = run.params.cavity_decay
    _fig_spectra(run, [(f"r={r:g}", {"bs_reflectivity": r, "opa_gain": 0.5 * k}) for r in (0.0, 0.3, 0.5, 0.7)])


def cmd_fig6(run: Run):
    k = run.params.cavity_decay
    _fig_spectra(run, [(f"G={g:g}kappa", {"opa_gain": g * k, "bs_reflectivity": 0.5}) for g in (0.0, 0.5, 1.1)])


COMMANDS = {
    "steady": cmd_steady,
    "stability": cmd_stability,
    "modes": cmd_modes,
    "sweep": cmd_sweep,
    "spectra": cmd_spectra,
    "simulate": cmd_simulate,
    "feedback-check": cmd_feedback_check,
    "fig2": cmd_fig2,
    "fig3": cmd_fig3,
    "fig4": cmd_fig4,
    "fig5": cmd_fig5,
    "fig6": cmd_fig6,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="config file, or the name of a bundled one (paper_fig2.cfg ...)")
    common.add_argument("--out", default=".", help="output directory (NMSLAB_OUT overrides)")
    common.add_argument("--grid", help="start:stop:num; sweep variable units, or omega/omega_m for spectra")
    common.add_argument("--thermal", choices=sorted(THERMAL), default="coth")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--svg", action="store_true", help="also write an SVG plot")

    parser = argparse.ArgumentParser(prog="nmslab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"nmslab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "sweep":
            sp.add_argument("--var", default="bs_reflectivity", help="SystemParams field to sweep")
        elif name == "spectra":
            sp.add_argument("--kind", choices=KINDS, default="S_Q")
            sp.add_argument("--scale-by-gamma", action="store_true", help="multiply S_Q by gamma_m")
        elif name == "simulate":
            sp.add_argument("--dt", type=float, help="step in s (default 0.04 of the fastest time scale)")
            sp.add_argument("--n-steps", type=int, default=4 * 131072)
            sp.add_argument("--trajectories", type=int, default=32)
            sp.add_argument("--stride", type=int, default=4)
            sp.add_argument("--nperseg", type=int, default=2048)
            sp.add_argument("--dump", choices=("none", "npy", "csv"), default="none")
        elif name == "feedback-check":
            sp.add_argument("--loss", type=float, default=1e-3, help="round-trip loss kappa*tau")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        path = resolve_config(args.config, args.command)
        try:
            raw = path.read_bytes()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        params = load_config(path)
        r = Run(args, params, hashlib.sha256(raw).hexdigest())
        COMMANDS[args.command](r)
        r.finish()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InstabilityError, ThresholdError) as exc:
        print(f"unstable: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def main() -> None:
    sys.exit(run())
