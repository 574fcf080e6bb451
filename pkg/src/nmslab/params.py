"""Physical parameters of the cavity, mirror, OPA and feedback loop.

All quantities are stored in SI base units and every frequency is angular
(rad/s).  Configuration files may give frequencies in Hz; the conversion by
2*pi happens once, in :func:`params_from_mapping`.
"""

from __future__ import annotations

import ast
import configparser
import math
import operator
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Mapping, Union

from scipy import constants

from .errors import ConfigError, ParameterError

DEGENERATE = "degenerate"

Detuning = Union[float, str]


@dataclass(frozen=True)
class SystemParams:
    """Inputs of the model.

    ``detuning`` is the effective cavity detuning (already including the
    radiation-pressure shift), or the string ``"degenerate"`` to request
    ``sqrt(mech_freq**2 + 4*opa_gain**2)``.
    """

    wavelength: float
    cavity_length: float
    mirror_mass: float
    cavity_decay: float
    mech_freq: float
    quality: float
    temperature: float
    input_power: float
    opa_gain: float
    opa_phase: float
    bs_reflectivity: float
    detuning: Detuning = DEGENERATE

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DerivedParams:
    """Quantities computed from :class:`SystemParams`.

    The cavity frequency is taken equal to the laser frequency when computing
    the single-photon coupling; only the wavelength is specified, and the
    relative error of this near-resonant approximation is of order
    detuning/laser_freq (~1e-9 here).
    """

    system: SystemParams
    drive_amplitude: float
    coupling_const: float
    mech_damping: float
    eff_decay: float
    bs_transmissivity: float
    laser_freq: float
    cavity_freq: float

    # shorthands used throughout the model code
    @property
    def kappa(self) -> float:
        return self.system.cavity_decay

    @property
    def omega_m(self) -> float:
        return self.system.mech_freq

    @property
    def gain(self) -> float:
        return self.system.opa_gain

    @property
    def phase(self) -> float:
        return self.system.opa_phase

    @property
    def r(self) -> float:
        return self.system.bs_reflectivity

    @property
    def t(self) -> float:
        return self.bs_transmissivity

    @property
    def temperature(self) -> float:
        return self.system.temperature

    @property
    def noise_amplitude(self) -> float:
        """Optical input-noise amplitude ``sqrt(2 kappa) t / (1 + r)``.

        Its square equals ``2 * eff_decay``.
        """
        return math.sqrt(2.0 * self.kappa) * self.t / (1.0 + self.r)


_POSITIVE = (
    "wavelength",
    "cavity_length",
    "mirror_mass",
    "cavity_decay",
    "mech_freq",
    "quality",
    "temperature",
    "input_power",
)


def validate(p: SystemParams) -> SystemParams:
    """Return ``p`` unchanged if every invariant holds, else raise :class:`ParameterError`.

    All violations are collected and reported together.
    """
    violations = []
    for name in _POSITIVE:
        value = getattr(p, name)
        if not _is_finite_number(value) or value <= 0:
            violations.append((name, f"{name} must be positive (got {value!r})"))
    r = p.bs_reflectivity
    if not _is_finite_number(r) or not -1.0 < r < 1.0:
        violations.append(
            ("bs_reflectivity", f"bs_reflectivity out of open interval (-1, 1) (got {r!r})")
        )
    if not _is_finite_number(p.opa_gain) or p.opa_gain < 0:
        violations.append(("opa_gain", f"opa_gain must be non-negative (got {p.opa_gain!r})"))
    if not _is_finite_number(p.opa_phase):
        violations.append(("opa_phase", f"opa_phase must be finite (got {p.opa_phase!r})"))
    if isinstance(p.detuning, str):
        if p.detuning != DEGENERATE:
            violations.append(
                ("detuning", f"detuning must be a number or {DEGENERATE!r} (got {p.detuning!r})")
            )
    elif not _is_finite_number(p.detuning):
        violations.append(("detuning", f"detuning must be finite (got {p.detuning!r})"))
    if violations:
        raise ParameterError(violations)
    return p


def _is_finite_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def derive_constants(p: SystemParams) -> DerivedParams:
    validate(p)
    r = p.bs_reflectivity
    omega_l = 2.0 * math.pi * constants.c / p.wavelength
    omega_c = omega_l
    eps = math.sqrt(2.0 * p.cavity_decay * p.input_power / (constants.hbar * omega_l))
    g0 = omega_c / p.cavity_length * math.sqrt(constants.hbar / (2.0 * p.mirror_mass * p.mech_freq))
    return DerivedParams(
        system=p,
        drive_amplitude=eps,
        coupling_const=g0,
        mech_damping=p.mech_freq / p.quality,
        eff_decay=p.cavity_decay * (1.0 - r) / (1.0 + r),
        bs_transmissivity=math.sqrt(1.0 - r * r),
        laser_freq=omega_l,
        cavity_freq=omega_c,
    )


def paper_parameters(**overrides) -> SystemParams:
    """Parameter set of the reference experiment (1064 nm, 25 mm cavity, 145 ng mirror).

    Defaults: 2 mW input, no OPA gain, OPA phase -pi/4, no feedback,
    degenerate detuning.  Any field can be overridden by keyword.
    """
    values = dict(
        wavelength=1064e-9,
        cavity_length=25e-3,
        mirror_mass=145e-12,
        cavity_decay=2 * math.pi * 215e3,
        mech_freq=2 * math.pi * 947e3,
        quality=6700.0,
        temperature=0.3,
        input_power=2e-3,
        opa_gain=0.0,
        opa_phase=-math.pi / 4,
        bs_reflectivity=0.0,
        detuning=DEGENERATE,
    )
    unknown = set(overrides) - set(values)
    if unknown:
        raise TypeError(f"unknown parameter(s): {sorted(unknown)}")
    values.update(overrides)
    return SystemParams(**values)


# --------------------------------------------------------------------------
# configuration files

_PLAIN_KEYS = (
    "wavelength",
    "cavity_length",
    "mirror_mass",
    "quality",
    "temperature",
    "input_power",
    "opa_phase",
    "bs_reflectivity",
)
_FREQ_KEYS = ("cavity_decay", "mech_freq", "opa_gain", "detuning")
_OPTIONAL = {"detuning": DEGENERATE}

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def parse_number(text: str) -> float:
    """Parse a float or a small arithmetic expression such as ``-pi/4`` or ``2*pi*215e3``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(f"unsupported expression: {text!r}")

    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse number {text!r}") from exc


def params_from_mapping(entries: Mapping[str, str]) -> SystemParams:
    """Build :class:`SystemParams` from string key/value pairs.

    Frequency-like fields must be given as ``<field>_hz`` or ``<field>_rad_s``;
    ``detuning = degenerate`` is also accepted.  Unknown keys are rejected.
    """
    entries = {k.strip().lower(): v.strip() for k, v in entries.items()}
    allowed = set(_PLAIN_KEYS) | {"detuning"}
    for key in _FREQ_KEYS:
        allowed |= {f"{key}_hz", f"{key}_rad_s"}
    unknown = sorted(set(entries) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}")

    values: dict = {}
    for key in _PLAIN_KEYS:
        if key not in entries:
            raise ConfigError(f"missing mandatory key: {key}")
        values[key] = parse_number(entries[key])
    for key in _FREQ_KEYS:
        given = [k for k in (key, f"{key}_hz", f"{key}_rad_s") if k in entries]
        if len(given) > 1:
            raise ConfigError(f"{key} given more than once: {', '.join(given)}")
        if not given:
            if key in _OPTIONAL:
                values[key] = _OPTIONAL[key]
                continue
            raise ConfigError(f"missing mandatory key: {key}_hz or {key}_rad_s")
        k = given[0]
        raw = entries[k]
        if k == "detuning":
            if raw.lower() != DEGENERATE:
                raise ConfigError("detuning without unit suffix must be 'degenerate'")
            values[key] = DEGENERATE
        elif k.endswith("_hz"):
            values[key] = 2.0 * math.pi * parse_number(raw)
        else:
            values[key] = parse_number(raw)
    p = SystemParams(**values)
    try:
        return validate(p)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> SystemParams:
    """Read a ``.cfg`` file with a single ``[system]`` section."""
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    extra = [s for s in parser.sections() if s != "system"]
    if extra:
        raise ConfigError(f"unknown section(s): {', '.join(extra)}")
    if not parser.has_section("system"):
        raise ConfigError("config must contain a [system] section")
    return params_from_mapping(dict(parser.items("system")))
