import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fishbone.errors import ConfigError
from fishbone.projection import (ProjectionKernel, epsilon_jk, f_j, f_tilde, g_jk,
                                 limit_h, limit_s, mmk_H, p_factor, psi_1, psi_2, q_factor)
from fishbone.slackening import MMK, Exponential, PiecewiseLinear, SqrtSmooth

from conftest import M, R0
import oracle_values as ov


def brute_p(j, k):
    return sum((-1) ** n * math.sin(2 * k * n * math.pi / j) for n in range(1, j + 1))


def brute_q(j, k):
    return sum(math.cos(2 * k * n * math.pi / j) for n in range(1, j + 1))


@pytest.mark.parametrize("j", range(1, 9))
@pytest.mark.parametrize("k", range(1, 9))
def test_finite_sums(j, k):
    assert p_factor(j, k) == pytest.approx(brute_p(j, k), abs=1e-12)
    assert q_factor(j, k) == pytest.approx(brute_q(j, k), abs=1e-12)


def test_p31_oracle():
    assert p_factor(3, 1) == pytest.approx(ov.P31, abs=1e-14)


def test_f_tilde_oracle(mmk):
    got = f_tilde(mmk, -2 * R0, engine="closed_form")
    assert got == pytest.approx(ov.F_TILDE_MINUS_2R0, abs=1e-13)
    assert f_tilde(mmk, -2 * R0) == pytest.approx(ov.F_TILDE_MINUS_2R0, abs=1e-10)


@pytest.mark.parametrize("engine", ["closed_form", "quadrature"])
def test_f3_oracle(mmk, engine):
    assert f_j(mmk, 3, 1.0, engine=engine) == pytest.approx(ov.F3_AT_1, abs=1e-10)


@pytest.mark.parametrize("engine", ["closed_form", "quadrature"])
def test_g32_oracle(mmk, engine):
    assert g_jk(mmk, 3, 2, 2 * R0, engine=engine) == pytest.approx(ov.G32_AT_2R0, abs=1e-10)


def test_H32_oracle():
    assert mmk_H(3, 2, R0, 5 * R0) == pytest.approx(ov.H32_AT_5R0, abs=1e-13)


def test_s32_oracle():
    assert limit_s(3, 2, 1.0, -1.0) == pytest.approx(ov.S32_AT_MINUS1, abs=1e-13)


@pytest.mark.parametrize("j,k", [(1, 1), (2, 1), (2, 3), (3, 2), (4, 4), (5, 3), (6, 2), (7, 7)])
def test_closed_form_matches_quadrature(mmk, j, k):
    r = np.linspace(-3, 3, 61)
    assert np.max(np.abs(f_j(mmk, j, r, engine="closed_form") - f_j(mmk, j, r))) < 1e-9
    assert np.max(np.abs(g_jk(mmk, j, k, r, engine="closed_form") - g_jk(mmk, j, k, r))) < 1e-9


@pytest.mark.parametrize("model", [MMK(M, R0), SqrtSmooth(1.0, 0.5), Exponential(1.0, 0.7),
                                   PiecewiseLinear(((-2, -1), (-1, -0.9), (-0.5, -0.5), (1, 1), (3, 5)))],
                         ids=lambda m: m.name)
@pytest.mark.parametrize("j", [1, 2, 3, 4])
def test_parity_route_agrees(model, j):
    r = np.linspace(-2.5, 2.5, 21)
    direct = f_j(model, j, r)
    parity = f_j(model, j, r, route="parity")
    assert np.max(np.abs(direct - parity)) < 1e-9


def test_even_j_is_odd_function(mmk):
    r = np.linspace(0.1, 3, 15)
    assert np.allclose(f_j(mmk, 2, r, engine="closed_form"), -f_j(mmk, 2, -r, engine="closed_form"),
                       atol=1e-14)


@pytest.mark.parametrize("j", range(1, 16))
def test_g_positive(mmk, j):
    r = np.linspace(-50, 50, 201)
    for k in range(1, 16):
        assert np.all(g_jk(mmk, j, k, r, engine="closed_form") > 0)


def test_small_r_linear(mmk):
    # inside the linear range the law is m r, so f_j = m r and g_jk = m
    r = np.linspace(-0.9 * R0, 0.9 * R0, 11)
    assert np.allclose(f_j(mmk, 3, r, engine="closed_form"), M * r, atol=1e-14)
    assert np.allclose(g_jk(mmk, 3, 5, r, engine="closed_form"), M, atol=1e-14)


@pytest.mark.parametrize("j,k", [(1, 1), (2, 1), (3, 2), (5, 4)])
def test_vanishing_r0_gives_limit(j, k):
    tiny = MMK(2.0, 1e-9)
    r = np.array([-2.0, -0.5, 0.5, 2.0])
    assert np.allclose(g_jk(tiny, j, k, r, engine="closed_form"), limit_s(j, k, 2.0, r), atol=1e-8)
    assert np.allclose(f_j(tiny, j, r, engine="closed_form"), limit_h(j, 2.0, r), atol=1e-8)


def test_large_r_approaches_limit(mmk):
    r = np.array([-1e6, 1e6])
    assert np.allclose(g_jk(mmk, 3, 2, r, engine="closed_form"), limit_s(3, 2, M, r), rtol=1e-5)


def test_epsilon_values():
    assert epsilon_jk(1, 1) == pytest.approx(1.0)
    assert epsilon_jk(3, 2) == pytest.approx(1 / 3 + math.sqrt(3) / (2 * math.pi))


@settings(max_examples=20, deadline=None)
@given(y=st.floats(-2, 2), j=st.integers(1, 4), k=st.integers(1, 4))
def test_psi_identities(y, j, k):
    model = MMK(M, R0)
    assert psi_1(model, j, k, y, 0.0) == pytest.approx(2 * f_j(model, j, y, engine="closed_form"),
                                                      abs=1e-9)
    assert psi_2(model, j, k, y, 0.0) == 0.0


def test_psi_2_small_z_is_twice_g(mmk):
    y, z = 0.7, 1e-6
    assert psi_2(mmk, 3, 2, y, z) / z == pytest.approx(2 * g_jk(mmk, 3, 2, y, engine="closed_form"),
                                                     rel=1e-5)


def test_kernel_guards(mmk):
    with pytest.raises(ConfigError):
        ProjectionKernel(SqrtSmooth(1, 1), 1, 1, engine="closed_form")
    with pytest.raises(ConfigError):
        ProjectionKernel(mmk, 1, 1, engine="spectral")
    k = ProjectionKernel(mmk, 1, 1, engine="closed_form")
    assert k.breakpoints == (-R0, R0)


def test_kernel_potential_derivative(mmk):
    k = ProjectionKernel(mmk, 3, 3, engine="closed_form")
    r = np.array([-1.5, -0.2, 0.4, 2.0])
    h = 1e-5
    fd = (k.Fj(r + h) - k.Fj(r - h)) / (2 * h)
    assert np.allclose(fd, k.fj(r), atol=1e-8)
    assert k.Fj(0.0) == 0.0
