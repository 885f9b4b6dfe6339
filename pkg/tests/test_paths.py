import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nadphase.paths import (
    GaugeSingularityError,
    PrecessingPath,
    SampledPath,
    berry_phase,
    coupling_at,
    instantaneous_eigensystem,
    load_path_csv,
    make_kernel,
)


def wobble_path(t_max=3.0, n=601):
    ts = np.linspace(0.0, t_max, n)
    return SampledPath(ts, np.pi / 2 + 0.1 * np.sin(ts), ts.copy(), np.ones_like(ts))


class TestEigensystem:
    def test_north_pole(self):
        E_plus, E_minus, v_plus, v_minus = instantaneous_eigensystem(0.0, 0.0, 1.0)
        assert E_plus == 1.0 and E_minus == -1.0
        np.testing.assert_allclose(v_plus, [1.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(v_minus, [0.0, -1.0], atol=1e-15)

    def test_equator(self):
        _, _, v_plus, v_minus = instantaneous_eigensystem(math.pi / 2, 0.0, 1.0)
        r = 1 / math.sqrt(2)
        np.testing.assert_allclose(v_plus, [r, r], atol=1e-15)
        np.testing.assert_allclose(v_minus, [r, -r], atol=1e-15)

    @pytest.mark.parametrize("phi", [0.0, 0.7, 2.0, 5.5])
    def test_orthonormal_60deg(self, phi):
        _, _, v_plus, v_minus = instantaneous_eigensystem(math.radians(60), phi, 1.0)
        assert abs(np.linalg.norm(v_plus) - 1) <= 1e-12
        assert abs(np.linalg.norm(v_minus) - 1) <= 1e-12
        assert abs(v_plus.conj() @ v_minus) <= 1e-12

    @given(theta=st.floats(0.0, math.pi), phi=st.floats(0.0, 2 * math.pi))
    def test_orthonormality_and_gauge(self, theta, phi):
        _, _, v_plus, v_minus = instantaneous_eigensystem(theta, phi)
        assert abs(np.linalg.norm(v_plus) - 1) <= 1e-12
        assert abs(np.linalg.norm(v_minus) - 1) <= 1e-12
        assert abs(v_plus.conj() @ v_minus) <= 1e-12
        # gauge: first components real and non-negative
        assert v_plus[0].imag == 0 and v_plus[0].real >= 0
        assert v_minus[0].imag == 0 and v_minus[0].real >= 0

    def test_rejects_bad_theta(self):
        with pytest.raises(ValueError):
            instantaneous_eigensystem(-0.1, 0.0)


class TestCoupling:
    def test_precessing_reference(self):
        frame = coupling_at(PrecessingPath(R=1.0, theta=math.radians(60), omega=1.0), 0.3)
        assert abs(frame.Gamma_minus.real) <= 1e-15
        assert abs(frame.Gamma_minus.imag + 0.43301270189221932) <= 1e-12
        assert abs(frame.delta - 1.5) <= 1e-12

    def test_degenerate_axis(self):
        frame = coupling_at(PrecessingPath(R=1.0, theta=0.0, omega=0.7), 1.0)
        assert frame.Gamma_minus == 0
        assert abs(frame.delta - (2.0 - 0.7)) <= 1e-15

    def test_gamma_plus_identity(self):
        for path in (PrecessingPath(R=1.0, theta=1.1, omega=0.4), wobble_path()):
            for t in (0.3, 1.2, 2.4):
                frame = coupling_at(path, t)
                assert abs(frame.Gamma_plus + np.conj(frame.Gamma_minus)) <= 1e-15

    def test_detuning_consistency(self):
        for path in (PrecessingPath(R=1.3, theta=0.9, omega=0.5), wobble_path()):
            for t in (0.2, 1.0, 2.5):
                frame = coupling_at(path, t)
                other = (frame.E_plus - frame.E_minus) - (frame.gamma_rate_plus
                                                          - frame.gamma_rate_minus)
                assert abs(frame.delta - other) <= 1e-12

    def _fd_frame(self, path, t, h):
        def vecs(u):
            th, ph = path.angles(u)
            _, _, vp, vm = instantaneous_eigensystem(th, ph)
            return vp, vm

        vp_p, vm_p = vecs(t + h)
        vp_m, vm_m = vecs(t - h)
        vp, vm = vecs(t)
        return {
            "Gamma_minus": vp.conj() @ ((vm_p - vm_m) / (2 * h)),
            "gamma_rate_minus": -np.imag(vm.conj() @ ((vm_p - vm_m) / (2 * h))),
            "gamma_rate_plus": -np.imag(vp.conj() @ ((vp_p - vp_m) / (2 * h))),
        }

    def test_sampled_fd_oracle(self):
        path = wobble_path()
        for t in (0.0, 0.8, 2.0):
            frame = coupling_at(path, t)
            fd = self._fd_frame(path, t, 1e-5)
            assert abs(fd["Gamma_minus"] - frame.Gamma_minus) <= 1e-6
            assert abs(fd["gamma_rate_minus"] - frame.gamma_rate_minus) <= 1e-6
            assert abs(fd["gamma_rate_plus"] - frame.gamma_rate_plus) <= 1e-6

    def test_gamma_plus_identity_fd_path(self):
        # Gamma_+ = -Gamma_-^* holds for the finite-difference route too
        path = wobble_path()
        h = 1e-5
        for t in (0.5, 1.7):
            th_p, ph_p = path.angles(t + h)
            th_m, ph_m = path.angles(t - h)
            _, _, vp_p, vm_p = instantaneous_eigensystem(th_p, ph_p)
            _, _, vp_m, vm_m = instantaneous_eigensystem(th_m, ph_m)
            th, ph = path.angles(t)
            _, _, vp, vm = instantaneous_eigensystem(th, ph)
            Gamma_minus_fd = vp.conj() @ ((vm_p - vm_m) / (2 * h))
            Gamma_plus_fd = vm.conj() @ ((vp_p - vp_m) / (2 * h))
            assert abs(Gamma_plus_fd + np.conj(Gamma_minus_fd)) <= 1e-8

    def test_fd_error_is_second_order(self):
        path = wobble_path()
        t = 1.0
        frame = coupling_at(path, t)
        err = [abs(self._fd_frame(path, t, h)["Gamma_minus"] - frame.Gamma_minus)
               for h in (1e-3, 5e-4)]
        assert 3.5 <= err[0] / err[1] <= 4.5


class TestBerryPhase:
    def test_zero_time(self):
        assert berry_phase(PrecessingPath(R=1.0, theta=0.8, omega=0.3), -1, 0.0) == 0.0

    def test_full_cycle_minus(self):
        path = PrecessingPath(R=1.0, theta=math.radians(60), omega=1.0)
        val = berry_phase(path, -1, 2 * math.pi)
        assert abs(val - (-3 * math.pi / 2)) <= 1e-12

    def test_full_cycle_plus_equator(self):
        path = PrecessingPath(R=1.0, theta=math.radians(90), omega=1.0)
        assert abs(berry_phase(path, +1, 2 * math.pi) - (-math.pi)) <= 1e-12

    def test_sampled_matches_closed_form(self):
        ts = np.linspace(0.0, 4.0, 401)
        theta0 = 1.0
        path = SampledPath(ts, np.full_like(ts, theta0), 0.5 * ts, np.ones_like(ts))
        ref = PrecessingPath(R=1.0, theta=theta0, omega=0.5)
        for level in (+1, -1):
            assert abs(berry_phase(path, level, 3.0)
                       - berry_phase(ref, level, 3.0)) <= 1e-9

    def test_bad_level(self):
        with pytest.raises(ValueError):
            berry_phase(PrecessingPath(R=1.0, theta=0.8, omega=0.3), 0, 1.0)


class TestKernel:
    def test_static_environment(self):
        kernel = make_kernel(PrecessingPath(R=1.0, theta=1.0, omega=0.0, duration=10.0))
        assert kernel.F(0.0) == 0 and kernel.F(3.7) == 0

    def test_magnitude_reference(self):
        kernel = make_kernel(PrecessingPath(R=1.0, theta=math.radians(60), omega=0.6))
        for t in (0.0, 1.3, 7.7):
            assert abs(abs(kernel.F(t)) - 0.25980762113533158) <= 1e-12

    def test_phase_advance(self):
        kernel = make_kernel(PrecessingPath(R=1.0, theta=math.radians(60), omega=0.6))
        adv = np.angle(kernel.F(1.0)) - np.angle(kernel.F(0.0))
        assert abs(adv - 1.7) <= 1e-12

    def test_magnitude_identity_sampled(self):
        kernel = make_kernel(wobble_path())
        for t in (0.1, 1.1, 2.3):
            assert abs(abs(kernel.F(t)) - abs(kernel.Gamma_minus(t))) <= 1e-12

    def test_delta_integral_consistency(self):
        kernel = make_kernel(wobble_path())
        # d/dt of the accumulated phase equals delta
        h = 1e-5
        for t in (0.5, 1.5):
            deriv = (kernel.delta_integral(t + h) - kernel.delta_integral(t - h)) / (2 * h)
            assert abs(deriv - kernel.delta(t)) <= 1e-6


class TestPathValidation:
    def test_precessing_invariants(self):
        with pytest.raises(ValueError):
            PrecessingPath(R=0.0, theta=1.0, omega=1.0)
        with pytest.raises(ValueError):
            PrecessingPath(R=1.0, theta=3.5, omega=1.0)
        PrecessingPath(R=1.0, theta=0.0, omega=1.0)  # degenerate coupling allowed

    def test_sampled_rejects_gauge_violations(self):
        ts = np.linspace(0.0, 1.0, 10)
        with pytest.raises(GaugeSingularityError):
            SampledPath(ts, np.linspace(-0.1, 1.0, 10), ts, np.ones_like(ts))
        with pytest.raises(ValueError):
            SampledPath(ts, np.full_like(ts, 1.0), ts, np.zeros_like(ts))
        with pytest.raises(ValueError):
            SampledPath(ts[::-1], np.full_like(ts, 1.0), ts, np.ones_like(ts))

    def test_csv_roundtrip(self, tmp_path):
        f = tmp_path / "path.csv"
        ts = np.linspace(0.0, 2.0, 21)
        rows = "\n".join(f"{t},{1.2},{0.4 * t},{1.0}" for t in ts)
        f.write_text("t,theta,phi,R\n" + rows + "\n")
        path = load_path_csv(f)
        assert path.duration == pytest.approx(2.0)
        theta, phi = path.angles(1.0)
        assert theta == pytest.approx(1.2)
        assert phi == pytest.approx(0.4)

    def test_csv_rejects_bad_header(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("time,theta,phi,R\n0,1,0,1\n")
        with pytest.raises(ValueError):
            load_path_csv(f)
