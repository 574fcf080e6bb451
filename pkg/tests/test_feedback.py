import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nmslab.errors import NumericalError
from nmslab.feedback import (
    FeedbackChain,
    a_out_prime_relation,
    chain_output,
    chain_solve,
    feedback_check,
    small_loss_amplitude,
)
from nmslab.params import paper_parameters

from conftest import KAPPA


def test_lossless_mirror_relations():
    fc = FeedbackChain.from_loss(0.3, KAPPA, 1e-3)
    assert fc.r_d**2 + fc.t_d**2 == pytest.approx(1.0, abs=1e-15)
    assert fc.r_d == pytest.approx(1 - 1e-3, abs=1e-6)
    assert fc.loss == pytest.approx(1e-3)
    assert fc.r_prime == 1.0
    with pytest.raises(ValueError):
        FeedbackChain.from_loss(0.3, KAPPA, 0.7)


def test_closed_form_amplitude():
    # exact lossless result: a = i t_d t a_in / ((1 - r)(1 - r_d))
    for r in (-0.4, 0.0, 0.6):
        fc = FeedbackChain.from_loss(r, KAPPA, 1e-2)
        a = chain_solve(fc, 1.0).a
        assert a == pytest.approx(1j * fc.t_d * fc.t / ((1 - r) * (1 - fc.r_d)), rel=1e-12)


def test_without_feedback_the_chain_is_a_single_cavity():
    fc = FeedbackChain.from_loss(0.0, KAPPA, 1e-2)
    f = chain_solve(fc, 1.0)
    assert f.a_in_prime == pytest.approx(1j)
    # single-sided cavity on resonance reflects the input with unit modulus
    assert abs(f.a_out_prime) == pytest.approx(1.0, rel=1e-12)


@given(st.floats(-0.9, 0.9), st.floats(1e-5, 0.2))
@settings(max_examples=100, deadline=None)
def test_unitarity_and_output_relation(r, loss):
    fc = FeedbackChain.from_loss(r, KAPPA, loss)
    f = chain_solve(fc, 1.0)
    assert abs(chain_output(fc, f, 1.0)) == pytest.approx(1.0, rel=1e-10)
    assert f.a_out_prime == pytest.approx(a_out_prime_relation(fc, f.a, 1.0), rel=1e-10, abs=1e-12)


def test_small_loss_form_and_sign():
    fc = FeedbackChain.from_loss(0.3, KAPPA, 1e-5)
    a = chain_solve(fc, 1.0).a
    lead = small_loss_amplitude(fc)
    assert abs(a / lead - 1) < 1e-4
    assert lead.real == 0 and lead.imag > 0


def test_convergence_is_first_order():
    p = paper_parameters(bs_reflectivity=-0.2)
    dev = [feedback_check(p, g).relative_deviation for g in (1e-2, 1e-3, 1e-4)]
    for a, b in zip(dev, dev[1:]):
        assert math.log10(a / b) == pytest.approx(1.0, abs=0.05)
    assert dev[-1] == pytest.approx(0.5e-4, rel=1e-2)


def test_singular_chain():
    fc = FeedbackChain(r=0.5, t=math.sqrt(0.75), r_d=1.0, t_d=0.0, tau=1.0, kappa=KAPPA)
    with pytest.raises(NumericalError, match="singular"):
        chain_solve(fc)
