"""Transformation-parameter solvers: both routes, 1D and planar."""

import math

import numpy as np
import pytest

from liegate import oracle, paramflow
from liegate.coeffs import (
    CoefficientSet1D,
    Derived,
    Exponential,
    FieldProfile2D,
    Sinusoid,
)
from liegate.errors import DomainError
from liegate.paramflow import (
    caustic_window,
    solve_2d,
    solve_linear_translation,
    solve_path1,
    solve_path2,
)
from liegate.verify import random_smooth_coeffs


def sho():
    return CoefficientSet1D.build(a=1.0, c=1.0)


def kanai(omega0=0.25, tau=1.0, m=1.0):
    return CoefficientSet1D.build(
        a=Exponential(1.0 / m, -1.0 / tau),
        c=Exponential(m * omega0 * omega0, 1.0 / tau),
    )


class TestLinearTranslation:
    def test_forced_free_particle(self):
        # force f = 1 means e = -1; antiderivatives give Pi = -t, lam = t^2/2
        lp = CoefficientSet1D.build(a=1.0, e=-1.0)
        lt = solve_linear_translation(lp, 2.0, tol=1e-12)
        _, lam, pi = lt.at(2.0)
        assert lam == pytest.approx(2.0, abs=1e-10)
        assert pi == pytest.approx(-2.0, abs=1e-10)

    def test_zero_drive_stays_at_origin(self):
        cs = CoefficientSet1D.build(a=1.0, b=0.1, c=0.7)
        lt = solve_linear_translation(cs, 3.0, tol=1e-12)
        assert np.max(np.abs(lt.S)) == 0.0
        assert np.max(np.abs(lt.lam)) == 0.0
        assert np.max(np.abs(lt.Pi)) == 0.0

    def test_sinusoidal_drive_matches_classical_flow(self):
        cs = CoefficientSet1D.build(a=1.0, e=Sinusoid(1.0, 1.0))
        lt = solve_linear_translation(cs, math.pi, tol=1e-12)
        flow = oracle.classical_flow(
            cs, oracle.ClassicalState(np.zeros(2), 0.0), math.pi, tol=1e-12
        )
        for t in np.linspace(0.2, math.pi, 9):
            _, lam, pi = lt.at(float(t))
            assert np.max(np.abs(flow.at(float(t)) - [lam, -pi])) < 1e-8


class TestPathOne:
    def test_free_particle(self):
        tr = solve_path1(CoefficientSet1D.build(a=1.0), 2.0, tol=1e-12)
        s = tr.sample(1.3)
        assert s.gamma == 0.0
        assert s.alpha == pytest.approx(0.0, abs=1e-12)
        assert s.phi == pytest.approx(0.0, abs=1e-12)
        assert s.beta == pytest.approx(1.3, abs=1e-11)
        assert tr.valid_to == math.inf

    def test_oscillator_at_eighth_period(self):
        tr = solve_path1(sho(), 1.0, tol=1e-12)
        s = tr.sample(math.pi / 4)
        assert s.alpha == pytest.approx(1.0, abs=1e-10)
        assert s.phi == pytest.approx(math.log(math.sqrt(2.0) / 2.0), abs=1e-10)
        assert s.beta == pytest.approx(1.0, abs=1e-10)

    def test_damped_oscillator_beta(self):
        # closed form: beta(t) = 2 tau sinh(Om t)/(sinh(Om t) + 2 tau Om cosh(Om t))
        tau, om0 = 1.0, 0.25
        big = math.sqrt(1.0 - 4.0 * tau**2 * om0**2) / (2.0 * tau)
        t = 1.0
        sh, ch = math.sinh(big * t), math.cosh(big * t)
        beta_exact = 2.0 * tau * sh / (sh + 2.0 * tau * big * ch)
        tr = solve_path1(kanai(), 1.5, tol=1e-12)
        assert tr.sample(t).beta == pytest.approx(beta_exact, abs=1e-6)
        assert beta_exact == pytest.approx(0.6404, abs=2e-4)

    def test_dilation_constraint_holds_pointwise(self):
        cs = random_smooth_coeffs(np.random.default_rng(1))
        tr = solve_path1(cs, 2.0, tol=1e-11)
        for t in np.linspace(0.0, 2.0, 33):
            a = float(cs.a(t))
            gamma = tr.sample(float(t)).gamma
            assert abs(math.exp(2 * gamma) - a * tr.Delta) <= 1e-9 * a * tr.Delta

    def test_riccati_consistency(self):
        cs = random_smooth_coeffs(np.random.default_rng(2))
        tr = solve_path1(cs, 2.0, tol=1e-11)
        hi = min(2.0, 0.95 * tr.valid_to)
        for t in np.linspace(0.01, hi, 17):
            s = tr.sample(float(t))
            if s.u != 0.0:
                resid = abs(s.alpha * s.u + s.udot)
                assert resid <= 1e-8 * (abs(s.alpha * s.u) + abs(s.udot) + 1e-300)

    def test_classical_identification(self):
        cs = random_smooth_coeffs(np.random.default_rng(3))
        tr = solve_path1(cs, 2.0, tol=1e-12)
        flow = oracle.classical_flow(
            cs, oracle.ClassicalState(np.zeros(2), 0.0), 2.0, tol=1e-12
        )
        worst = 0.0
        for t in np.linspace(0.1, 2.0, 11):
            s = tr.sample(float(t))
            worst = max(worst, float(np.max(np.abs(flow.at(float(t)) - [s.lam, -s.Pi]))))
        assert worst < 1e-7

    def test_action_refinement(self):
        cs = random_smooth_coeffs(np.random.default_rng(4))
        tol = 1e-8
        s_coarse = solve_path1(cs, 2.0, tol=tol).sample(2.0).S
        s_fine = solve_path1(cs, 2.0, tol=tol / 2).sample(2.0).S
        assert abs(s_coarse - s_fine) < 10.0 * tol

    def test_parameters_masked_past_focal_time(self):
        tr = solve_path1(sho(), 3.0, tol=1e-12)
        assert tr.valid_to == pytest.approx(math.pi / 2, rel=1e-10)
        late = tr.sample(2.0)
        assert math.isnan(late.alpha) and math.isnan(late.phi) and math.isnan(late.beta)
        assert late.u == pytest.approx(math.cos(2.0), abs=1e-10)
        assert late.udot == pytest.approx(-math.sin(2.0), abs=1e-10)

    def test_requires_positive_a(self):
        cs = CoefficientSet1D.build(a=Sinusoid(2.0, 1.0, 0.0, 0.5))
        with pytest.raises(DomainError, match="positive"):
            solve_path1(cs, 5.0)

    def test_tabulated_profiles_drive_the_solver(self):
        # spline-backed a(t) supplies its own derivative to the damping term
        from liegate import maps as maps_mod
        from liegate.coeffs import Tabulated

        ts = np.linspace(0.0, 2.2, 121)
        cs = CoefficientSet1D.build(
            a=Tabulated(tuple(ts), tuple(1.0 + 0.3 * np.sin(1.3 * ts))),
            c=Tabulated(tuple(ts), tuple(0.8 + 0.4 * np.cos(0.9 * ts))),
            e=0.25,
        )
        tr = solve_path1(cs, 2.0, tol=1e-11)
        fm = oracle.fundamental_matrix(cs, 2.0, tol=1e-11)
        hi = min(2.0, 0.95 * tr.valid_to)
        for t in np.linspace(0.1, hi, 9):
            diff = np.max(np.abs(maps_mod.assemble_path1(tr, float(t)).M
                                 - fm.at(float(t))))
            assert diff < 1e-7

    def test_singular_coefficient_reports_last_good_time(self):
        from liegate.errors import IntegrationError

        sing = Derived(
            fn=lambda t: 1.0 / (1.02 - t) ** 2,
            dfn=lambda t: 2.0 / (1.02 - t) ** 3,
            label="singular stiffness",
        )
        cs = CoefficientSet1D.build(a=1.0, c=sing)
        with pytest.raises(IntegrationError) as err:
            solve_path1(cs, 1.2, tol=1e-10)
        assert err.value.last_time == pytest.approx(1.02, abs=1e-3)


class TestPathTwo:
    def test_constant_radial_oscillator(self):
        # a = 1/m, c = m Omega^2 / 4 yields gamma = 0, phi = Omega t / 2 and
        # the short-circuit alpha = vphi = beta = 0
        m, om = 2.0, 1.6
        cs = CoefficientSet1D.build(a=1.0 / m, c=m * om * om / 4.0)
        tr = solve_path2(cs, 3.0, tol=1e-12)
        assert tr.shortcut
        s = tr.sample(2.0)
        assert s.gamma == pytest.approx(0.0, abs=1e-14)
        assert s.phi == pytest.approx(om * 2.0 / 2.0, abs=1e-10)
        assert s.alpha == 0.0 and s.vphi == 0.0 and s.beta == 0.0
        assert tr.Delta == pytest.approx(m * om / 2.0, rel=1e-14)

    def test_oscillator_shortcut(self):
        tr = solve_path2(sho(), 2.0, tol=1e-12)
        assert tr.shortcut
        s = tr.sample(1.5)
        assert s.phi == pytest.approx(1.5, abs=1e-11)
        assert tr.Delta == 1.0

    def test_focal_time_is_sin_phi_zero(self):
        tr = solve_path2(sho(), 4.0, tol=1e-12)
        assert caustic_window(tr) == pytest.approx(math.pi, rel=1e-10)

    def test_rejects_nonpositive_c(self):
        cs = CoefficientSet1D.build(a=1.0, c=Sinusoid(1.0, 1.0, 0.0, 0.2))
        with pytest.raises(DomainError, match="route 1"):
            solve_path2(cs, 5.0)

    def test_dilation_constraint(self):
        cs = random_smooth_coeffs(np.random.default_rng(6), positive_c=True)
        tr = solve_path2(cs, 2.0, tol=1e-11)
        for t in np.linspace(0.0, 2.0, 17):
            a = float(cs.a(t))
            c = float(cs.c(t))
            target = tr.Delta * math.sqrt(a / c)
            gamma = tr.sample(float(t)).gamma
            assert abs(math.exp(2 * gamma) - target) <= 1e-9 * target

    def test_strong_cross_term_truncates_gracefully(self):
        # a large (xp+px) coefficient drives route 2's quadratic-phase
        # parameter to infinity before t_end; the trajectory window shrinks
        # and later samples are masked instead of failing
        cs = CoefficientSet1D.build(a=1.0, b=1.5, c=1.0)
        tr = solve_path2(cs, 3.0, tol=1e-10)
        assert 0.0 < tr.valid_to < 3.0
        inside = tr.sample(0.9 * tr.valid_to)
        assert math.isfinite(inside.alpha)
        late = tr.sample(min(3.0, tr.valid_to + 0.5))
        assert math.isnan(late.alpha)
        assert math.isfinite(late.lam) and math.isfinite(late.phi)


class TestPlanar:
    def test_no_field_no_translation(self):
        field = FieldProfile2D.build(m=1.0, B=Sinusoid(2.0, 3.0), K=0.0, charge=1.0)
        tr = solve_2d(field, 1.0, tol=1e-12, path="path1")
        rec = tr.sample(0.9)
        for key in ("lam_x", "lam_y", "Pi_x", "Pi_y", "S"):
            assert rec[key] == 0.0

    def test_rotation_angle_for_sin_field(self):
        m, b0, omega, q = 1.0, 2.0, 3.0, 1.0
        field = FieldProfile2D.build(m=m, B=Sinusoid(b0, omega), K=0.0, charge=q)
        tr = solve_2d(field, 1.5, tol=1e-12, path="path1")
        omega_c = q * b0 / m
        for t in np.linspace(0.1, 1.5, 7):
            expected = (omega_c / omega) * math.sin(omega * t / 2.0) ** 2
            assert tr.sample(float(t))["theta"] == pytest.approx(expected, abs=1e-9)

    def test_driven_translations_match_closed_form_via_flow(self):
        field = FieldProfile2D.build(
            m=1.0, B=2.0, K=0.5, Ex=0.3,
            Ey=Sinusoid(0.2, 1.3, math.pi / 2), charge=1.0,
        )
        tr = solve_2d(field, 2.0, tol=1e-12, path="path2")
        flow = oracle.classical_flow(
            field, oracle.ClassicalState(np.zeros(4), 0.0), 2.0, tol=1e-12
        )
        for t in np.linspace(0.25, 2.0, 8):
            rec = tr.sample(float(t))
            target = np.array([rec["lam_x"], rec["lam_y"], -rec["Pi_x"], -rec["Pi_y"]])
            assert np.max(np.abs(flow.at(float(t)) - target)) < 1e-7

    def test_theta_rate_is_half_cyclotron(self):
        field = FieldProfile2D.build(m=1.3, B=1.7, K=0.2, charge=-0.8)
        tr = solve_2d(field, 1.0, tol=1e-12, path="path2")
        expected_rate = -0.8 * 1.7 / (2 * 1.3)
        assert tr.sample(1.0)["theta"] == pytest.approx(expected_rate * 1.0, rel=1e-10)


class TestCausticWindow:
    def test_oscillator(self):
        tr = solve_path1(sho(), 3.0, tol=1e-12)
        assert caustic_window(tr) == pytest.approx(math.pi / 2, rel=1e-10)

    def test_free_particle(self):
        tr = solve_path1(CoefficientSet1D.build(a=1.0), 5.0, tol=1e-10)
        assert caustic_window(tr) == math.inf

    def test_strong_damping_never_focuses(self):
        tr = solve_path1(kanai(omega0=0.25), 6.0, tol=1e-10)
        assert caustic_window(tr) == math.inf
        ts = np.linspace(0.0, 6.0, 301)
        u = np.array([tr.sample(float(t)).u for t in ts])
        assert np.all(u > 0.0)


def test_csv_round_trip(tmp_path):
    tr = solve_path1(sho(), 1.0, tol=1e-10)
    path = tmp_path / "params.csv"
    paramflow.trajectory_to_csv(tr, str(path), n_samples=11)
    header = path.read_text().splitlines()[0]
    assert header == "t,S,lam,Pi,gamma,alpha,phi,vphi,beta,u,udot,v,vdot"
    data = np.genfromtxt(path, delimiter=",", names=True)
    assert data["t"].size == 11
    assert data["beta"][-1] == pytest.approx(math.tan(1.0), abs=1e-9)


def test_csv_2d(tmp_path):
    field = FieldProfile2D.build(m=1.0, B=Sinusoid(2.0, 3.0), K=0.0, charge=1.0)
    tr = solve_2d(field, 1.0, tol=1e-10, path="path1")
    path = tmp_path / "params2d.csv"
    paramflow.trajectory2d_to_csv(tr, str(path), n_samples=9)
    header = path.read_text().splitlines()[0]
    assert header == "t,S,gamma,alpha,phi,vphi,beta,u,udot,theta,lam_x,lam_y,Pi_x,Pi_y"
