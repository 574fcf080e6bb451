import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import constants

from nmslab.errors import ConfigError, ParameterError
from nmslab.params import (
    derive_constants,
    load_config,
    paper_parameters,
    params_from_mapping,
    parse_number,
    validate,
)

from conftest import KAPPA

CFG_KEYS = {
    "wavelength": "1064e-9",
    "cavity_length": "25e-3",
    "mirror_mass": "145e-12",
    "cavity_decay_hz": "215e3",
    "mech_freq_hz": "947e3",
    "quality": "6700",
    "temperature": "0.3",
    "input_power": "2e-3",
    "opa_gain_hz": "0",
    "opa_phase": "-pi/4",
    "bs_reflectivity": "0",
}


def test_reference_set_validates():
    p = paper_parameters()
    assert validate(p) is p


def test_effective_decay_special_values():
    d0 = derive_constants(paper_parameters())
    assert d0.eff_decay == KAPPA
    d5 = derive_constants(paper_parameters(bs_reflectivity=0.5))
    assert d5.eff_decay == pytest.approx(KAPPA / 3, rel=1e-15)
    assert d5.t == pytest.approx(math.sqrt(0.75), rel=1e-15)


def test_drive_and_coupling_by_hand():
    # independent evaluation from the definitions with CODATA constants
    d = derive_constants(paper_parameters())
    omega_l = 2 * math.pi * 299792458.0 / 1064e-9
    hbar = 6.62607015e-34 / (2 * math.pi)
    eps = math.sqrt(2 * KAPPA * 2e-3 / (hbar * omega_l))
    g0 = omega_l / 25e-3 * math.sqrt(hbar / (2 * 145e-12 * 2 * math.pi * 947e3))
    assert d.drive_amplitude == pytest.approx(eps, rel=1e-14)
    assert d.coupling_const == pytest.approx(g0, rel=1e-14)
    # dimensional sanity: eps^2 is a photon flux times a rate, ~1.7e11 s^-1
    assert d.drive_amplitude == pytest.approx(1.7013e11, rel=1e-4)
    assert d.coupling_const == pytest.approx(17.506, rel=1e-4)
    assert d.mech_damping == pytest.approx(2 * math.pi * 947e3 / 6700)


def test_noise_amplitude_squares_to_twice_effective_decay():
    for r in (-0.7, 0.0, 0.4, 0.9):
        d = derive_constants(paper_parameters(bs_reflectivity=r))
        assert d.noise_amplitude**2 == pytest.approx(2 * d.eff_decay, rel=1e-13)


@pytest.mark.parametrize("r", [1.0, -1.0, 1.5, float("nan")])
def test_reflectivity_outside_open_interval(r):
    with pytest.raises(ParameterError, match="bs_reflectivity out of open interval"):
        validate(paper_parameters(bs_reflectivity=r))


def test_zero_mass_rejected():
    with pytest.raises(ParameterError, match="mirror_mass must be positive"):
        derive_constants(paper_parameters(mirror_mass=0))


def test_all_violations_reported_together():
    with pytest.raises(ParameterError) as exc:
        validate(paper_parameters(mirror_mass=-1.0, temperature=0.0, opa_gain=-1.0, bs_reflectivity=2.0))
    fields = [f for f, _ in exc.value.violations]
    assert fields == ["mirror_mass", "temperature", "bs_reflectivity", "opa_gain"]
    assert "(got -1.0)" in str(exc.value)


def test_derive_is_deterministic():
    p = paper_parameters(opa_gain=0.3 * KAPPA, bs_reflectivity=-0.2)
    assert derive_constants(p) == derive_constants(p)


@given(st.floats(min_value=-0.999999, max_value=0.999999))
def test_power_balance_and_decay_monotone(r):
    d = derive_constants(paper_parameters(bs_reflectivity=r))
    assert d.t >= 0
    assert d.t**2 + r**2 == pytest.approx(1.0, abs=4e-16)
    assert d.eff_decay > 0
    d2 = derive_constants(paper_parameters(bs_reflectivity=min(r + 1e-6, 0.9999995)))
    assert d2.eff_decay < d.eff_decay


def test_parse_number_expressions():
    assert parse_number("-pi/4") == -math.pi / 4
    assert parse_number("0.5*215e3") == 107500.0
    assert parse_number("2**3") == 8.0
    with pytest.raises(ConfigError):
        parse_number("__import__('os')")
    with pytest.raises(ConfigError):
        parse_number("1 +")


def test_mapping_hz_conversion_and_default_detuning():
    p = params_from_mapping(CFG_KEYS)
    assert p == paper_parameters()
    alt = dict(CFG_KEYS)
    del alt["mech_freq_hz"]
    alt["mech_freq_rad_s"] = str(2 * math.pi * 947e3)
    assert params_from_mapping(alt).mech_freq == pytest.approx(p.mech_freq, rel=1e-15)


def test_mapping_errors():
    with pytest.raises(ConfigError, match="unknown key"):
        params_from_mapping({**CFG_KEYS, "colour": "blue"})
    missing = dict(CFG_KEYS)
    del missing["mirror_mass"]
    with pytest.raises(ConfigError, match="missing mandatory key: mirror_mass"):
        params_from_mapping(missing)
    with pytest.raises(ConfigError, match="more than once"):
        params_from_mapping({**CFG_KEYS, "opa_gain_rad_s": "1"})
    with pytest.raises(ConfigError, match="out of open interval"):
        params_from_mapping({**CFG_KEYS, "bs_reflectivity": "1"})


def test_load_config(tmp_path):
    f = tmp_path / "a.cfg"
    f.write_text("[system]\n" + "\n".join(f"{k} = {v}" for k, v in CFG_KEYS.items()) + "\ndetuning_hz = 1e6\n")
    p = load_config(f)
    assert p.detuning == pytest.approx(2 * math.pi * 1e6)
    g = tmp_path / "b.cfg"
    g.write_text("[other]\nx = 1\n")
    with pytest.raises(ConfigError, match="unknown section"):
        load_config(g)
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.cfg")


def test_cavity_frequency_approximation_is_small():
    d = derive_constants(paper_parameters())
    assert d.cavity_freq == d.laser_freq
    assert 6.1e6 / d.laser_freq < 1e-8
    assert constants.c == 299792458.0
