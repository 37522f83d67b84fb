import numpy as np
import pytest

from isospec import kernels

needs_numba = pytest.mark.skipif(not kernels.numba_available(), reason="numba not importable")


class TestBackendSelection:
    @pytest.mark.parametrize("value", ["0", "off", "false", "numpy"])
    def test_env_forces_numpy(self, monkeypatch, value):
        monkeypatch.setenv("ISOSPEC_NUMBA", value)
        assert kernels.active_backend() == "numpy"

    @needs_numba
    @pytest.mark.parametrize("value", ["1", "on", "numba"])
    def test_env_forces_numba(self, monkeypatch, value):
        monkeypatch.setenv("ISOSPEC_NUMBA", value)
        assert kernels.active_backend() == "numba"

    def test_auto_resolves(self, monkeypatch):
        monkeypatch.delenv("ISOSPEC_NUMBA", raising=False)
        expected = "numba" if kernels.numba_available() else "numpy"
        assert kernels.active_backend() == expected
        monkeypatch.setenv("ISOSPEC_NUMBA", "auto")
        assert kernels.active_backend() == expected

    def test_override_beats_env(self, monkeypatch):
        monkeypatch.setenv("ISOSPEC_NUMBA", "1")
        assert kernels.active_backend("numpy") == "numpy"

    def test_garbage_selector_rejected(self, monkeypatch):
        monkeypatch.setenv("ISOSPEC_NUMBA", "fast-please")
        with pytest.raises(ValueError, match="unrecognized"):
            kernels.active_backend()


@needs_numba
class TestBackendEquivalence:
    def test_oscillator_matrix_bitwise(self):
        h = 0.006
        x = -12.0 + h * np.arange(4001)
        d = 1.0 / h**2 + 0.5 * x * x
        e = np.full(4000, -0.5 / h**2)
        a = kernels.sturm_lowest(d, e, 8, backend="numba")
        b = kernels.sturm_lowest(d, e, 8, backend="numpy")
        assert np.array_equal(a, b)

    def test_random_matrices_bitwise(self):
        rng = np.random.default_rng(123)
        for _ in range(25):
            n = int(rng.integers(1, 40))
            d = rng.uniform(-10, 10, n)
            e = rng.uniform(-10, 10, max(n - 1, 0))
            k = int(rng.integers(1, n + 1))
            a = kernels.sturm_lowest(d, e, k, backend="numba")
            b = kernels.sturm_lowest(d, e, k, backend="numpy")
            assert np.array_equal(a, b)

    def test_env_flag_controls_default_path(self, monkeypatch):
        d = np.array([2.0, -1.0, 0.5])
        e = np.array([0.3, -0.2])
        monkeypatch.setenv("ISOSPEC_NUMBA", "0")
        a = kernels.sturm_lowest(d, e, 3)
        monkeypatch.setenv("ISOSPEC_NUMBA", "1")
        b = kernels.sturm_lowest(d, e, 3)
        assert np.array_equal(a, b)


class TestSingleElementMatrix:
    def test_one_by_one(self):
        got = kernels.sturm_lowest(np.array([4.25]), np.zeros(0), 1)
        assert abs(got[0] - 4.25) < 1e-10
