import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from tauberlab import (build_gamma, build_rho_from_zeta, certify, eval_kernel,
                       load_testfunction, moment, solve_zeta)
from tauberlab.mollifier import _GammaFamily, rayleigh_polynomial_bound
from tauberlab.quadrature import panel_rule

SQRT_2PI = math.sqrt(2.0 * math.pi)


def beam_root():
    # smallest positive root of cos(x) cosh(x) = 1, the clamped-clamped
    # frequency equation; fourth power gives the m = 2 eigenvalue
    return brentq(lambda x: math.cos(x) * math.cosh(x) - 1.0, 4.0, 5.0,
                  xtol=1e-13)


class TestGammaConstruction:
    def test_rejects_l_zero(self):
        with pytest.raises(ValueError):
            build_gamma(0)

    def test_even_by_construction(self, gamma_l2):
        assert gamma_l2.rho(3.0) == gamma_l2.rho(-3.0)
        tau = np.linspace(0.0, 40.0, 101)
        assert np.array_equal(gamma_l2.rho(tau), gamma_l2.rho(-tau))

    def test_two_sided_envelope(self, gamma_l2):
        # gamma is pinched between positive multiples of <tau>^-2l
        tau = np.linspace(0.0, 50.0, 2001)
        vals = gamma_l2.rho(tau) * (1.0 + tau ** 2) ** 2
        assert vals.min() > 0.0
        assert np.isfinite(vals.max())
        assert vals.max() / vals.min() < 50.0

    def test_unit_mass_after_normalization(self, gamma_l1, gamma_l2, gamma_l3):
        for rho in (gamma_l1, gamma_l2, gamma_l3):
            assert abs(rho.c0 - 1.0) <= 1e-10

    def test_raw_mass_matches_closed_form(self):
        # int over R of (sin u / u)^(2l) du = pi * {1, 2/3, 11/20} for l = 1..3,
        # and the window average scales it by 2*l*pi
        for l, a in ((1, 1.0), (2, 2.0 / 3.0), (3, 11.0 / 20.0)):
            fam = _GammaFamily(l)
            edges = np.unique(np.concatenate(
                [np.arange(0.0, 3.0, 0.075), np.arange(3.0, 200.0, 0.3), [200.0]]))
            nodes, w = panel_rule(edges, 12)
            mass = 2.0 * (np.dot(fam.value(nodes), w) + fam.power_tail(0, 200.0))
            assert mass == pytest.approx(2 * l * math.pi ** 2 * a, rel=1e-12)

    def test_exact_tails_consistent_across_ranges(self):
        fam = _GammaFamily(2)
        nodes, w = panel_rule(np.linspace(50.0, 200.0, 601), 12)
        for j in (0, 1, 2):
            quad = float(np.dot(nodes ** j * fam.value(nodes), w))
            assert quad + fam.power_tail(j, 200.0) == pytest.approx(
                float(fam.power_tail(j, 50.0)), rel=1e-11)

    def test_band_limit_certificate_against_dense_transform(self, gamma_l2):
        # oracle: dense cosine-transform quadrature on [0, 200] under the
        # (2 pi)^(-1/2) convention; truncation past 200 is ~7e-9 relative
        rho = gamma_l2
        nodes, w = panel_rule(np.linspace(0.0, 200.0, 801), 10)
        vals = w * rho.rho(nodes)
        t_grid = np.linspace(1.001, 4.0, 120)
        hat = (2.0 / SQRT_2PI) * (np.cos(np.outer(t_grid, nodes)) @ vals)
        hat0 = rho.c0 / SQRT_2PI
        assert np.max(np.abs(hat)) <= 1e-6 * hat0
        cert = rho.band_limit()
        assert cert.value <= 1e-6 * cert.hat_zero


class TestZetaSolve:
    def test_m1_analytic(self):
        z = solve_zeta(1)
        assert z.nu_tilde == pytest.approx(math.pi ** 2, abs=1e-10)
        assert z.nu == pytest.approx(math.pi, abs=1e-10)
        t = np.linspace(-0.5, 0.5, 41)
        assert np.max(np.abs(z(t) - math.sqrt(2.0) * np.cos(math.pi * t))) < 1e-9

    def test_m2_beam_oracle(self):
        z = solve_zeta(2)
        mu = beam_root()
        assert z.nu == pytest.approx(mu, abs=1e-9)
        assert z.nu_tilde == pytest.approx(mu ** 4, rel=1e-9)

    def test_m2_rayleigh_bound(self):
        # the polynomial trial mode caps the eigenvalue at 9! (2!)^2 / (5! 4!)
        assert rayleigh_polynomial_bound(2) == 504.0
        assert solve_zeta(2).nu_tilde <= 504.0

    def test_crude_cap(self):
        for m in (2, 3, 4):
            assert solve_zeta(m).nu <= 2 * m * 3.0 ** (1.0 / (2 * m))

    def test_normalization_and_parity(self):
        for m in (1, 2, 3):
            z = solve_zeta(m)
            assert z.deriv_norms[0] == pytest.approx(1.0, abs=1e-12)
            t = np.linspace(0.0, 0.5, 33)
            assert np.array_equal(z(t), z(-t))
            assert z(0.6) == 0.0  # extended by zero

    def test_endpoint_flatness(self):
        # derivatives below the clamping order vanish at the endpoints
        z = solve_zeta(3)
        h = 1e-5
        for k in range(3):
            vals = [z(0.5 - i * h) for i in range(6)]
            deriv = np.diff(vals, k) / h ** k if k else np.array(vals)
            assert abs(deriv[0]) < 1e-4

    def test_range_validation(self):
        with pytest.raises(ValueError):
            solve_zeta(0)
        with pytest.raises(ValueError):
            solve_zeta(7)


class TestRhoFromZeta:
    def test_unit_mass(self, rho_m1, rho_m2, rho_m3):
        for rho in (rho_m1, rho_m2, rho_m3):
            assert abs(rho.c0 - 1.0) <= 1e-10

    def test_even_moments_match_derivative_norms(self, rho_m1, rho_m2, rho_m3):
        for rho in (rho_m1, rho_m2, rho_m3):
            for k in range(rho.decay_order + 1):
                exact = rho.zeta.deriv_norms[k]
                budget = rho.moment_budgets[float(2 * k)]
                tol = budget + 1e-11 * max(1.0, exact)
                assert abs(rho.moment(2 * k) - exact) <= tol

    def test_m1_second_moment_is_pi_squared(self, rho_m1):
        assert rho_m1.moment(2) == pytest.approx(math.pi ** 2, rel=1e-10)

    def test_first_moment_window(self, rho_m1):
        # uncertainty floor pi/2 below, top-moment root above
        assert math.pi / 2 <= rho_m1.c1 <= math.pi

    def test_top_moment_equals_eigenvalue(self, rho_m2):
        assert rho_m2.moment(4) == pytest.approx(beam_root() ** 4, rel=1e-8)

    def test_moment_caps_by_root(self, rho_m2):
        # c_kappa <= nu^kappa below the top order
        nu = rho_m2.zeta.nu
        for kappa in (0.5, 1.0, 2.0, 3.0):
            assert rho_m2.moment(kappa) <= nu ** kappa * (1 + 1e-9)


class TestMoments:
    def test_zeroth_moment_is_one(self, rho_m1, gamma_l2):
        assert moment(rho_m1, 0.0) == pytest.approx(1.0, abs=1e-10)
        assert moment(gamma_l2, 0.0) == pytest.approx(1.0, abs=1e-10)

    def test_jensen_pair(self, rho_m1):
        assert moment(rho_m1, 1.0) ** 2 <= moment(rho_m1, 2.0) * (1 + 1e-12)

    def test_window_rejection(self, rho_m1, gamma_l1):
        with pytest.raises(ValueError):
            moment(rho_m1, 3.5)   # m = 1 window is (-1, 3)
        with pytest.raises(ValueError):
            moment(rho_m1, -1.0)
        with pytest.raises(ValueError):
            moment(gamma_l1, 1.0)  # m = 0 window is (-1, 1)

    @settings(max_examples=40, deadline=None)
    @given(r=st.floats(0.1, 1.4), extra=st.floats(0.05, 1.4))
    def test_jensen_random_pairs(self, rho_m2, r, extra):
        kappa = r + extra
        lhs = moment(rho_m2, r) ** kappa
        rhs = moment(rho_m2, kappa) ** r
        assert lhs <= rhs * (1 + 1e-9)


class TestKernels:
    def test_signed_tail_limits(self, rho_m1):
        assert eval_kernel(rho_m1, 1.0, 1, 0.0) == 0.0
        assert eval_kernel(rho_m1, 1.0, 1, 1e-13) == pytest.approx(0.5, abs=1e-9)
        assert eval_kernel(rho_m1, 1.0, 1, -1e-13) == pytest.approx(-0.5, abs=1e-9)

    def test_first_moment_kernel_at_zero(self, rho_m1):
        # scaled value delta * c1 / 2 at the origin
        assert eval_kernel(rho_m1, 3.0, 0, 0.0) == pytest.approx(
            3.0 * rho_m1.c1 / 2.0, rel=1e-12)
        assert eval_kernel(rho_m1, 1.0, 2, 0.0) == pytest.approx(
            rho_m1.c1 / 2.0, rel=1e-12)

    def test_iterated_tail_identity_against_double_integral(self, rho_m1):
        # oracle: integrate the signed-tail kernel out to the table end and
        # complete with the closed-form tail of the first-moment kernel
        rho = rho_m1
        taus = np.linspace(0.0, 20.0, 41)
        hi = rho.tau_max
        for tau in taus:
            nodes, w = panel_rule(np.linspace(tau, hi, 1200), 10)
            quad = float(np.dot(rho.kernel(1, nodes), w))
            # int_A^inf rho_{1,1} = rho_{1,2}(A) with A at the table end:
            # bound the completion by the k=0 kernel value there
            completion = rho.kernel(2, hi)
            oracle = quad + completion
            assert abs(rho.kernel(2, tau) - oracle) <= 1e-8

    def test_scaled_kernel_relation(self, rho_m1):
        delta, tau = 2.5, 1.3
        for k in (0, 1, 2):
            assert eval_kernel(rho_m1, delta, k, tau) == pytest.approx(
                delta ** (1 - k) * rho_m1.kernel(k, delta * tau), rel=1e-13)
        assert eval_kernel(rho_m1, delta, "density", tau) == pytest.approx(
            delta * rho_m1.rho(delta * tau), rel=1e-13)

    def test_rejects_low_decay_orders(self, gamma_l1):
        for k in (0, 2):
            with pytest.raises(ValueError):
                eval_kernel(gamma_l1, 1.0, k, 1.0)

    def test_rejects_bad_arguments(self, rho_m1):
        with pytest.raises(ValueError):
            eval_kernel(rho_m1, 0.0, 1, 1.0)
        with pytest.raises(ValueError):
            eval_kernel(rho_m1, 1.0, 3, 1.0)

    @settings(max_examples=30, deadline=None)
    @given(tau=st.floats(-30.0, 30.0), delta=st.floats(0.2, 5.0))
    def test_parity(self, rho_m2, tau, delta):
        k1 = eval_kernel(rho_m2, delta, 1, tau)
        assert k1 == -eval_kernel(rho_m2, delta, 1, -tau)
        for k in (0, 2):
            assert eval_kernel(rho_m2, delta, k, tau) == eval_kernel(
                rho_m2, delta, k, -tau)


class TestKernelInequalities:
    def test_monotone_and_ordered(self, rho_m1, rho_m2, gamma_l2):
        tau = np.linspace(0.0, 25.0, 501)
        for rho in (rho_m1, rho_m2, gamma_l2):
            k0 = rho.kernel(0, tau)
            k1 = rho.kernel(1, tau)
            k2 = rho.kernel(2, tau)
            for arr in (k0, k1, k2):
                assert np.all(np.diff(arr) <= 1e-10)
                assert arr.min() >= -1e-10
            assert np.all(k2 <= k0 + 1e-10)

    def test_signed_kernel_domination(self, rho_m1):
        # |rho_{T,1}| <= rho_{delta,0} / (c1 delta) for T >= delta
        tau = np.linspace(-30.0, 30.0, 241)
        for delta in (1.0, 2.0):
            bound = eval_kernel(rho_m1, delta, 0, tau) / (rho_m1.c1 * delta)
            for mult in (1.0, 2.0, 5.0):
                lhs = np.abs(eval_kernel(rho_m1, mult * delta, 1, tau))
                assert np.all(lhs <= bound + 1e-10)

    def test_scaling_chain(self, rho_m2):
        # T rho_{T,2} <= rho_{T,0} / T <= rho_{delta,0} / delta for T >= delta
        tau = np.linspace(-15.0, 15.0, 121)
        delta = 1.0
        base = eval_kernel(rho_m2, delta, 0, tau) / delta
        for T in (1.0, 2.0, 5.0):
            middle = eval_kernel(rho_m2, T, 0, tau) / T
            assert np.all(T * eval_kernel(rho_m2, T, 2, tau) <= middle + 1e-10)
            assert np.all(middle <= base + 1e-10)

    def test_derivative_transform_certificate(self, rho_m1, rho_m2):
        # transform of the k=0 kernel vanishes beyond the band for every
        # delta; certified through the derivative of the density transform
        for rho in (rho_m1, rho_m2):
            cert = rho.band_limit_derivative()
            assert cert.value <= 1e-6 * cert.hat_zero


class TestCertification:
    def test_all_axioms_pass(self, rho_m1, rho_m2, rho_m3, gamma_l1, gamma_l2,
                             gamma_l3):
        for rho in (rho_m1, rho_m2, rho_m3, gamma_l1, gamma_l2, gamma_l3):
            failed = [c for c in certify(rho) if not c.ok]
            assert not failed, failed

    def test_decay_slopes(self, rho_m1, rho_m2, gamma_l1):
        assert rho_m1.decay_slope() <= -4 + 0.3
        assert rho_m2.decay_slope() <= -6 + 0.3
        assert gamma_l1.decay_slope() <= -2 + 0.3

    def test_unnormalized_gamma_reports_mass(self):
        raw = build_gamma(2, normalize=False)
        checks = {c.name: c for c in certify(raw)}
        assert checks["unit_mass"].ok  # reported, not enforced
        assert checks["unit_mass"].value == pytest.approx(
            8 * math.pi ** 2 / 3, rel=1e-9)


class TestSerialization:
    def test_round_trip(self, tmp_path, rho_m2):
        path = tmp_path / "tf.json"
        rho_m2.save(path)
        again = load_testfunction(path)
        tau = np.linspace(-12.0, 12.0, 41)
        assert np.allclose(again.rho(tau), rho_m2.rho(tau), rtol=0, atol=1e-14)
        assert np.allclose(again.kernel(0, tau), rho_m2.kernel(0, tau),
                           rtol=0, atol=1e-14)
        assert again.moments == pytest.approx(rho_m2.moments)
        data = json.loads(path.read_text())
        assert data["format_version"] == 1
        assert data["band_limit"]["value"] <= 1e-6 * data["band_limit"]["hat_zero"]

    def test_version_check(self, tmp_path, gamma_l2):
        path = tmp_path / "tf.json"
        gamma_l2.save(path)
        data = json.loads(path.read_text())
        data["format_version"] = 99
        path.write_text(json.dumps(data))
        with pytest.raises(ValueError):
            load_testfunction(path)
