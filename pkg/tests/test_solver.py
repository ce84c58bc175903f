import numpy as np
import pytest

from fraclap import (CoefficientSpec, DomainError, GridSpec,
                     NonConvergenceError, ProblemConfig, SpectralField,
                     duhamel_step, existence_budget, h1_dot_norm, h1_norm,
                     omega_initial_field, picard_solve,
                     random_nonneg_initial_field, semigroup_apply)

L1D = 16 * np.pi


def grid1(N=128):
    return GridSpec(1, L1D, N)


def zero_coeff(n=1, alpha=2.0, gamma=0.9):
    return CoefficientSpec(kind="dirac", C=0.0, n=n, alpha=alpha, gamma=gamma)


def bessel_coeff(C=1.0, rho=2.0, gamma=0.0, n=1, alpha=2.0):
    return CoefficientSpec(kind="bessel_symbol", C=C, rho=rho, n=n,
                           alpha=alpha, gamma=gamma)


def make_config(g=None, coeff=None, u0=None, alpha=2.0, gamma=0.9, T0=0.25,
                dt=1.0 / 128.0, **kw):
    g = g or grid1()
    return ProblemConfig(
        grid=g, alpha=alpha, gamma=gamma,
        coefficient=coeff or zero_coeff(alpha=alpha, gamma=gamma),
        u0=u0 if u0 is not None else random_nonneg_initial_field(g, 0.5, seed=0),
        T0=T0, dt=dt, **kw)


class TestInitialData:
    def test_omega_field_hat_values(self):
        g = grid1(512)
        f = omega_initial_field(g, 128.0)
        hat = f.hat_values().real
        xi = g.xi_axes[0]
        inside = np.abs(xi - 1.5) < 0.5
        assert np.all(hat[inside] == pytest.approx(128.0))
        assert f.is_real and f.check_hermitian()
        # one-sided variant dominates from below
        one = omega_initial_field(g, 128.0, symmetrize=False)
        assert np.all(hat >= one.hat_values().real - 1e-12)

    def test_random_field_nonneg_hermitian(self):
        f = random_nonneg_initial_field(grid1(), 0.7, seed=5)
        assert f.coeffs.real.min() >= 0
        assert f.check_hermitian()
        assert h1_norm(f) == pytest.approx(0.7, rel=1e-12)

    def test_config_validation(self):
        g = grid1()
        with pytest.raises(DomainError):
            make_config(T0=-1.0)
        with pytest.raises(DomainError):
            make_config(dt=1.0)  # dt > T0
        c = np.zeros(g.shape, dtype=complex)
        c[1] = 1.0  # not Hermitian
        with pytest.raises(DomainError):
            make_config(u0=SpectralField(g, c, is_real=False))


class TestDuhamelStep:
    def test_zero_coefficient_is_pure_semigroup(self):
        cfg = make_config()
        traj = picard_solve(cfg)
        out = duhamel_step(traj, 0.125, cfg)
        exact = semigroup_apply(cfg.u0, 0.125, cfg.alpha)
        assert np.abs(out.coeffs - exact.coeffs).max() <= 1e-12

    def test_zero_history_gives_semigroup_term(self):
        cfg = make_config(coeff=bessel_coeff(), gamma=0.0)
        traj = picard_solve(make_config())  # b = 0 run, then zero its fields
        for f in traj.fields:
            f.coeffs[:] = 0.0
        out = duhamel_step(traj, 0.125, cfg)
        exact = semigroup_apply(cfg.u0, 0.125, cfg.alpha)
        assert np.abs(out.coeffs - exact.coeffs).max() <= 1e-12

    def test_zero_datum_stays_zero(self):
        g = grid1()
        cfg = make_config(g=g, u0=SpectralField.zero(g), coeff=bessel_coeff(),
                          gamma=0.0)
        traj = picard_solve(cfg)
        out = duhamel_step(traj, 0.25, cfg)
        assert np.abs(out.coeffs).max() == 0.0

    def test_off_lattice_time_rejected(self):
        cfg = make_config()
        traj = picard_solve(cfg)
        with pytest.raises(DomainError):
            duhamel_step(traj, 0.0001, cfg)

    def test_history_gap_rejected(self):
        cfg = make_config()
        traj = picard_solve(cfg)
        short = type(traj)(times=traj.times[:3], fields=traj.fields[:3],
                           h1_norms=traj.h1_norms[:3],
                           h1_dot_norms=traj.h1_dot_norms[:3],
                           overflow_at=None, picard_residuals=[])
        with pytest.raises(DomainError):
            duhamel_step(short, 0.25, cfg)

    def test_matches_solver_recurrence(self):
        # the trajectory is one Picard application behind duhamel_step, so
        # compare at a tight fixed-point tolerance
        cfg = make_config(coeff=bessel_coeff(C=5.0), gamma=0.0, T0=0.125,
                          dt=1.0 / 256.0, picard_tol=1e-13)
        traj = picard_solve(cfg)
        for t in (cfg.dt * 8, 0.0625, 0.125):
            i = int(round(t / cfg.dt))
            direct = duhamel_step(traj, t, cfg)
            scale = np.abs(traj.fields[i].coeffs).max()
            assert np.abs(direct.coeffs - traj.fields[i].coeffs).max() <= 1e-9 * scale


class TestPicard:
    def test_linear_case_exact(self):
        cfg = make_config(alpha=1.3, gamma=0.2)
        traj = picard_solve(cfg)
        assert traj.iterations == 1 and traj.converged
        for i, t in enumerate(traj.times):
            exact = semigroup_apply(cfg.u0, t, cfg.alpha)
            assert np.abs(traj.fields[i].coeffs - exact.coeffs).max() <= 1e-10

    def test_positivity_preserved(self):
        cfg = make_config(coeff=bessel_coeff(C=2.0), gamma=0.0,
                          u0=random_nonneg_initial_field(grid1(), 0.3, seed=7))
        traj = picard_solve(cfg)
        min_re, max_re, _ = traj.iterate_extrema
        assert min_re >= -1e-12 * max_re

    def test_contraction_ratio_within_budget(self):
        g = grid1()
        coeff = bessel_coeff(C=1.0)
        u0 = random_nonneg_initial_field(g, 0.02, seed=3)
        cfg = make_config(g=g, coeff=coeff, u0=u0, gamma=0.0, T0=0.25,
                          picard_tol=1e-14, dt=1.0 / 256.0)
        budget = existence_budget(cfg)
        assert budget.contraction_ok
        traj = picard_solve(cfg)
        res = np.array(traj.picard_residuals)
        res = res[res > 1e-13 * h1_norm(cfg.u0)]
        ratios = res[1:] / res[:-1]
        assert np.all(np.diff(res) < 0)
        assert ratios.max() <= 4 * budget.C_B * budget.delta + 0.1

    def test_timestep_convergence_first_order(self):
        finals = {}
        for dt in (1.0 / 64, 1.0 / 128, 1.0 / 256):
            cfg = make_config(coeff=bessel_coeff(C=20.0), gamma=0.0, T0=0.125,
                              dt=dt, picard_tol=1e-12,
                              u0=random_nonneg_initial_field(grid1(), 0.2, seed=9))
            finals[dt] = picard_solve(cfg).h1_norms[-1]
        d1 = abs(finals[1.0 / 64] - finals[1.0 / 128])
        d2 = abs(finals[1.0 / 128] - finals[1.0 / 256])
        assert d2 <= 0.75 * d1          # at least first order
        assert d2 <= finals[1.0 / 256] * 1e-3

    def test_overflow_diagnostic(self):
        # tiny threshold turns growth into an immediate overflow report
        g = grid1(256)
        coeff = CoefficientSpec(kind="dirac", C=2048.0, n=1, alpha=2.0, gamma=0.9)
        cfg = ProblemConfig(grid=g, alpha=2.0, gamma=0.9, coefficient=coeff,
                            u0=omega_initial_field(g, 128.0), T0=1e-6, dt=5e-9,
                            picard_max_iter=120, overflow_threshold=1e6)
        traj = picard_solve(cfg)
        assert traj.overflow_at is not None
        assert traj.fields[-1].overflowed
        assert traj.h1_norms[-1] > 1e6
        assert np.all(traj.h1_norms[:-1] <= 1e6)
        fin = traj.h1_dot_norms[np.isfinite(traj.h1_dot_norms)]
        assert np.all(np.diff(fin) >= 0)

    def test_overflow_propagates_through_duhamel_step(self):
        g = grid1(256)
        coeff = CoefficientSpec(kind="dirac", C=2048.0, n=1, alpha=2.0, gamma=0.9)
        cfg = ProblemConfig(grid=g, alpha=2.0, gamma=0.9, coefficient=coeff,
                            u0=omega_initial_field(g, 128.0), T0=1e-6, dt=5e-9,
                            picard_max_iter=120, overflow_threshold=1e6)
        traj = picard_solve(cfg)
        out = duhamel_step(traj, traj.overflow_at, cfg)
        assert out.overflowed

    def test_snapshots(self, tmp_path):
        cfg = make_config()
        traj = picard_solve(cfg)
        paths = traj.write_snapshots(tmp_path, [0.0, 0.125])
        assert all(tmp_path.joinpath(p.split("/")[-1]).exists() for p in paths)
        with pytest.raises(DomainError):
            traj.field_at(0.0001)

    def test_nonconvergence_error_carries_residuals(self):
        # needs several sweeps to converge but is capped at two, without
        # ever reaching the overflow threshold
        g = grid1()
        coeff = bessel_coeff(C=20.0)
        cfg = make_config(g=g, coeff=coeff, gamma=0.0,
                          u0=random_nonneg_initial_field(g, 0.2, seed=1),
                          picard_tol=1e-12, picard_max_iter=2)
        with pytest.raises(NonConvergenceError) as exc:
            picard_solve(cfg)
        assert len(exc.value.residuals) == 2


class TestBudget:
    def test_zero_datum(self):
        g = grid1()
        cfg = make_config(g=g, u0=SpectralField.zero(g), coeff=bessel_coeff(),
                          gamma=0.0)
        b = existence_budget(cfg)
        assert b.delta == 0.0 and b.contraction_ok and b.T0_max == np.inf

    def test_case_one_exponent(self):
        # alpha=2, gamma=0: C_B proportional to sqrt(T0)
        b1 = existence_budget(make_config(coeff=bessel_coeff(), gamma=0.0, T0=0.1))
        b2 = existence_budget(make_config(coeff=bessel_coeff(), gamma=0.0, T0=0.4))
        assert b2.C_B / b1.C_B == pytest.approx(2.0, rel=1e-12)
        assert b1.exponent == pytest.approx(0.5)

    def test_doubling_b_rescales_horizon(self):
        cfg1 = make_config(coeff=bessel_coeff(C=1.0), gamma=0.0)
        cfg2 = make_config(coeff=bessel_coeff(C=2.0), gamma=0.0)
        b1 = existence_budget(cfg1)
        b2 = existence_budget(cfg2)
        e = b1.exponent
        assert b2.T0_max / b1.T0_max == pytest.approx(2.0 ** (-1.0 / e), rel=1e-12)

    def test_case_two_uses_positive_order(self):
        coeff = bessel_coeff(C=1.0, rho=2.0, gamma=0.5, alpha=0.8)
        cfg = make_config(coeff=coeff, alpha=0.8, gamma=0.5)
        b = existence_budget(cfg)
        assert b.case == 2
        assert b.exponent == pytest.approx(1.0 - 0.5 / 0.8)

    def test_gamma_out_of_both_cases(self):
        # rejected at config construction, quoting the inequality
        with pytest.raises(DomainError, match="gamma < alpha - 1"):
            make_config(gamma=1.5)
        with pytest.raises(DomainError, match="1 - alpha < gamma"):
            make_config(alpha=0.8, gamma=0.1,
                        coeff=bessel_coeff(alpha=0.8, gamma=0.1))
