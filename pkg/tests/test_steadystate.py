import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nmslab.errors import ThresholdError
from nmslab.params import derive_constants, paper_parameters
from nmslab.steadystate import degenerate_detuning, operating_point, steady_state

from conftest import KAPPA, OMEGA_M


def test_degenerate_detuning_values():
    assert degenerate_detuning(OMEGA_M, 0.0) == OMEGA_M
    assert degenerate_detuning(OMEGA_M, 0.5 * KAPPA) == pytest.approx(math.hypot(OMEGA_M, KAPPA), rel=1e-15)
    assert degenerate_detuning(OMEGA_M, 1.1 * KAPPA) == pytest.approx(
        math.sqrt(OMEGA_M**2 + 4.84 * KAPPA**2), rel=1e-15)


def test_resonant_no_feedback():
    d = derive_constants(paper_parameters())
    ss = steady_state(d, 0.0)
    assert ss.a_s.imag == 0
    assert ss.a_s.real == pytest.approx(d.drive_amplitude / KAPPA, rel=1e-15)


@pytest.mark.parametrize("r", [-0.6, 0.0, 0.3, 0.8])
def test_resonant_with_feedback(r):
    d = derive_constants(paper_parameters(bs_reflectivity=r))
    ss = steady_state(d, 0.0)
    assert ss.a_s.imag == 0
    assert ss.a_s.real == pytest.approx(d.t * d.drive_amplitude / (KAPPA * (1 - r)), rel=1e-14)


def _fixed_point(d, delta, n_iter=400):
    # relax -(ke + i D) a + 2 G e^{i th} a* + t eps/(1+r) = 0 by damped iteration
    drive = d.t * d.drive_amplitude / (1 + d.r)
    z = 2 * d.gain * cmath.exp(1j * d.phase)
    a = 0j
    for _ in range(n_iter):
        a = 0.5 * a + 0.5 * (z * a.conjugate() + drive) / (d.eff_decay + 1j * delta)
    return a


def test_reference_point_against_fixed_point_iteration():
    p = paper_parameters(opa_gain=0.5 * KAPPA, bs_reflectivity=0.5)
    op = operating_point(p)
    a = _fixed_point(op.derived, op.detuning)
    assert abs(op.steady.a_s - a) < 1e-10 * abs(a)
    ss = op.steady
    assert ss.P_s == 0.0
    assert ss.Q_s == 2 * op.derived.coupling_const / OMEGA_M * abs(ss.a_s) ** 2
    assert ss.enhanced_coupling == pytest.approx(2 * op.derived.coupling_const * abs(ss.a_s))
    assert ss.photon_number == pytest.approx(3.9396e8, rel=1e-4)


def test_threshold():
    d = derive_constants(paper_parameters(opa_gain=2.0 * KAPPA))
    with pytest.raises(ThresholdError, match="above OPA threshold"):
        steady_state(d, 0.5 * KAPPA)
    # exactly at threshold is rejected too
    d = derive_constants(paper_parameters(opa_gain=0.5 * KAPPA))
    with pytest.raises(ThresholdError):
        steady_state(d, 0.0)


@given(st.floats(-0.95, 0.95), st.floats(0, 1.0), st.floats(-math.pi, math.pi))
@settings(max_examples=60, deadline=None)
def test_phase_periodicity_and_power_scaling(r, g, th):
    p = paper_parameters(bs_reflectivity=r, opa_gain=g * KAPPA, opa_phase=th)
    a = operating_point(p).steady.a_s
    b = operating_point(p.with_(opa_phase=th + 2 * math.pi)).steady.a_s
    assert abs(a) ** 2 == pytest.approx(abs(b) ** 2, rel=1e-12)
    c = operating_point(p.with_(input_power=4 * p.input_power)).steady
    assert c.a_s == pytest.approx(2 * a, rel=1e-12)
    assert c.photon_number == pytest.approx(4 * abs(a) ** 2, rel=1e-12)


def test_amplitude_continuous_in_reflectivity():
    rs = np.linspace(-0.99, 0.99, 2001)
    amp = np.array([abs(operating_point(paper_parameters(bs_reflectivity=r)).steady.a_s) for r in rs])
    assert np.all(np.isfinite(amp))
    assert np.max(np.abs(np.diff(amp))) < 0.02 * amp.max()
