import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nmslab.errors import NumericalError
from nmslab.params import derive_constants, paper_parameters
from nmslab.response import a_coeffs_closed_form, d_coeffs_closed_form, output_from_intracavity, solve_response
from nmslab.steadystate import operating_point, resolve_detuning, steady_state

from conftest import KAPPA, OMEGA_M, draw_params

W = np.linspace(0.3, 1.7, 301) * OMEGA_M


def _decoupled(**kw):
    p = paper_parameters(**kw)
    d = replace(derive_constants(p), coupling_const=0.0)
    delta = resolve_detuning(p) if "detuning" not in kw else kw["detuning"]
    return steady_state(d, delta), d, delta


def test_decoupled_mirror_response():
    ss, d, delta = _decoupled(opa_gain=0.4 * KAPPA, bs_reflectivity=0.3)
    res = solve_response(W, ss, d, delta)
    assert np.all(res.A[0] == 0) and np.all(res.A[1] == 0)
    np.testing.assert_allclose(res.A[2], -OMEGA_M / (W**2 - OMEGA_M**2 + 1j * d.mech_damping * W), rtol=1e-12)
    A1, A2, _ = a_coeffs_closed_form(W, ss, d, delta)
    assert np.all(A1 == 0) and np.all(A2 == 0)
    assert np.all(d_coeffs_closed_form(W, ss, d, delta)[2] == 0)


@pytest.mark.parametrize("r", [-0.5, 0.0, 0.5, 0.8])
def test_passive_cavity_is_all_pass(r):
    ss, d, delta = _decoupled(bs_reflectivity=r)
    D1, D2, D3 = solve_response(W, ss, d, delta).D
    np.testing.assert_allclose(np.abs(D1), 1.0, atol=1e-12)
    assert np.all(D2 == 0) and np.all(D3 == 0)


@pytest.mark.parametrize("r", [-0.5, 0.0, 0.5])
def test_passive_resonant_dc_value(r):
    ss, d, delta = _decoupled(bs_reflectivity=r, detuning=0.0)
    D1 = d_coeffs_closed_form(np.array([0.0]), ss, d, delta)[0]
    assert D1[0] == pytest.approx(1.0, abs=1e-13)


def test_reference_point_closed_forms():
    ss, d, delta = operating_point(paper_parameters(opa_gain=0.5 * KAPPA, bs_reflectivity=0.5)).unpack()
    res = solve_response(W, ss, d, delta)
    np.testing.assert_allclose(np.array(a_coeffs_closed_form(W, ss, d, delta)), res.A, rtol=1e-10)
    np.testing.assert_allclose(np.array(d_coeffs_closed_form(W, ss, d, delta)), res.D, rtol=1e-10)


def test_output_relations():
    ss, d, delta = operating_point(paper_parameters(opa_gain=0.2 * KAPPA, bs_reflectivity=-0.3)).unpack()
    res = solve_response(W, ss, d, delta)
    k = math.sqrt(2 * KAPPA) / (1 + d.r)
    np.testing.assert_allclose(res.C[0], k * res.B[0] - d.t / (1 + d.r), rtol=1e-14)
    np.testing.assert_allclose(res.C[1:], k * res.B[1:], rtol=1e-14)
    np.testing.assert_allclose(res.D[0], d.t * res.C[0] - d.r, rtol=1e-14)
    np.testing.assert_allclose(res.D[1:], d.t * res.C[1:], rtol=1e-14)
    C, D = output_from_intracavity(res.B, d)
    np.testing.assert_array_equal(C, res.C)


def test_phase_irrelevant_without_gain():
    base = paper_parameters(bs_reflectivity=0.4)
    a = operating_point(base).unpack()
    b = operating_point(base.with_(opa_phase=1.0)).unpack()
    np.testing.assert_array_equal(np.array(a_coeffs_closed_form(W, *a)), np.array(a_coeffs_closed_form(W, *b)))


def test_singular_system_reported():
    ss, d, _ = _decoupled(bs_reflectivity=0.0)
    d = replace(d, mech_damping=0.0)
    with pytest.raises(NumericalError, match="singular"):
        solve_response(np.array([OMEGA_M]), ss, d, 0.3 * OMEGA_M)


@given(st.integers(0, 2**31), st.floats(0.05, 2.5))
@settings(max_examples=150, deadline=None)
def test_closed_forms_match_solve(seed, x):
    _, op = draw_params(np.random.default_rng(seed))
    ss, d, delta = op.unpack()
    w = np.array([x * OMEGA_M])
    res = solve_response(w, ss, d, delta)
    A = np.array(a_coeffs_closed_form(w, ss, d, delta))
    D = np.array(d_coeffs_closed_form(w, ss, d, delta))
    assert np.all(np.abs(A - res.A) <= 1e-10 * np.abs(res.A))
    assert np.all(np.abs(D - res.D) <= 1e-10 * np.abs(res.D))
