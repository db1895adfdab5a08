import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from fdensity import kernels

BACKENDS = [kernels.python_backend]
if kernels.compiled_backend is not None:
    BACKENDS.append(kernels.compiled_backend)


def cantor_oracle(x, digits=80):
    """Exact ternary scan on the rational value of a float."""
    x = Fraction(x)
    if x == 1:
        return Fraction(1)
    out, w = Fraction(0), Fraction(1, 2)
    for _ in range(digits):
        x *= 3
        d = int(x)
        x -= d
        if d == 1:
            return out + w
        out += w * (d // 2)
        w /= 2
    return out


def test_compiled_backend_is_active():
    assert kernels.BACKEND == "cython"


def test_env_forces_python_backend():
    env = dict(os.environ, FDENSITY_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import fdensity.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.__name__)
class TestCantorKernel:
    def test_special_points(self, backend):
        x = np.array([0.0, 2 / 3, 0.25, 0.75, 1.0])
        np.testing.assert_allclose(backend.cantor_many(x), [0, 0.5, 1 / 3, 2 / 3, 1],
                                   rtol=0, atol=1e-15)

    def test_matches_exact_oracle(self, backend):
        x = np.random.default_rng(1).random(300)
        want = np.array([float(cantor_oracle(v)) for v in x])
        np.testing.assert_allclose(backend.cantor_many(x), want, rtol=0, atol=1e-15)


def test_cantor_backends_bit_identical():
    if kernels.compiled_backend is None:
        pytest.skip("extension not built")
    x = np.random.default_rng(2).random(20_000)
    a = kernels.compiled_backend.cantor_many(x)
    b = kernels.python_backend.cantor_many(x)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.__name__)
def test_oscillation_by_lag_matches_pair_scan(backend):
    g = np.random.default_rng(3).random(60)
    want = [max(abs(g[i + L] - g[i]) for i in range(len(g) - L)) for L in range(len(g))]
    np.testing.assert_allclose(backend.oscillation_by_lag(g), want, rtol=0, atol=0)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.__name__)
class TestScanDeviations:
    def test_matches_direct_sums(self, backend):
        rng = np.random.default_rng(4)
        dev = np.abs(rng.standard_normal(500))
        fdev = np.log1p(dev)
        eps = np.array([1.0, 0.1])
        grid = np.array([10, 50, 500], dtype=np.int64)
        counts, sums, fsums, maxes = backend.scan_deviations(dev, fdev, eps, grid)
        for j, n in enumerate(grid):
            for i, e in enumerate(eps):
                assert counts[i, j] == np.count_nonzero(dev[:n] >= e)
            np.testing.assert_allclose(sums[j], dev[:n].sum(), rtol=1e-13)
            np.testing.assert_allclose(fsums[j], fdev[:n].sum(), rtol=1e-13)
            assert maxes[j] == dev[:n].max()

    def test_grid_beyond_data_rejected(self, backend):
        with pytest.raises(ValueError):
            backend.scan_deviations(np.ones(5), np.ones(5), np.array([0.5]),
                                    np.array([10], dtype=np.int64))
