"""Backend equivalence: the JIT and numpy paths must agree bit for bit."""

from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from qcpd import kernels

needs_numba = pytest.mark.skipif(
    not kernels.HAVE_NUMBA, reason="numba not importable"
)


def _random_case(rng, n_max=40):
    n = int(rng.integers(2, n_max))
    c = float(rng.uniform(0.0, 0.98))
    lo = c if c > 0 else 0.05
    hi = min(1.0 / c, 3.0) if c > 0 else 3.0
    xs = rng.uniform(lo, hi, size=n - 1)
    return c, xs


class TestMixer:
    def test_scalar_and_array_mixers_agree(self):
        rng = np.random.default_rng(3)
        raw = rng.integers(0, 2**64, size=256, dtype=np.uint64)
        array_out = kernels._mix64(raw.copy())
        for value, mixed in zip(raw.tolist(), array_out.tolist()):
            assert kernels.mix64_int(value) == mixed

    def test_seed_root_accepts_any_integer(self):
        # seeds wrap modulo 2^64, so negative and huge seeds are fine
        assert 0 <= kernels.seed_root(-1) < 2**64
        assert kernels.seed_root(5) == kernels.seed_root(5 + 2**64)
        assert kernels.seed_root(0) != kernels.seed_root(1)


class TestProfileBackends:
    @needs_numba
    def test_bit_identical_profiles(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            c, xs = _random_case(rng)
            a = kernels.detection_profile_numpy(c, xs)
            b = kernels.detection_profile_numba(c, xs)
            assert np.array_equal(a, b)

    def test_profile_values_are_probabilities(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            c, xs = _random_case(rng)
            prof = kernels.detection_profile_numpy(c, xs)
            assert np.all(prof >= -1e-15) and np.all(prof <= 1.0 + 1e-15)


class TestSimulationBackends:
    @needs_numba
    @pytest.mark.parametrize(
        "trials",
        [1, 1000, kernels._CHUNK - 1, kernels._CHUNK, kernels._CHUNK + 1, 200_000],
    )
    def test_bit_identical_counts(self, trials):
        rng = np.random.default_rng(trials)
        c, xs = _random_case(rng, n_max=12)
        a_counts, a_wrong = kernels.simulate_counts_numpy(c, xs, trials, seed=9)
        b_counts, b_wrong = kernels.simulate_counts_numba(c, xs, trials, seed=9)
        assert np.array_equal(a_counts, b_counts)
        assert a_wrong == b_wrong == 0

    def test_seed_changes_counts(self):
        xs = np.array([1.2, 1.1, 1.3])
        a, _ = kernels.simulate_counts(0.4, xs, 20_000, seed=1)
        b, _ = kernels.simulate_counts(0.4, xs, 20_000, seed=2)
        assert not np.array_equal(a, b)


class TestBackendSelection:
    def _active_in_subprocess(self, env_value):
        env = dict(os.environ)
        if env_value is None:
            env.pop("QCPD_BACKEND", None)
        else:
            env["QCPD_BACKEND"] = env_value
        return subprocess.run(
            [sys.executable, "-c", "import qcpd; print(qcpd.active_backend())"],
            capture_output=True,
            text=True,
            env=env,
        )

    def test_numpy_fallback_is_selectable(self):
        result = self._active_in_subprocess("numpy")
        assert result.returncode == 0
        assert result.stdout.strip() == "numpy"

    @needs_numba
    def test_numba_is_the_default(self):
        result = self._active_in_subprocess(None)
        assert result.stdout.strip() == "numba"
        result = self._active_in_subprocess("numba")
        assert result.stdout.strip() == "numba"

    def test_unknown_backend_is_rejected(self):
        result = self._active_in_subprocess("gpu")
        assert result.returncode != 0
        assert "QCPD_BACKEND" in result.stderr

    def test_numpy_backend_simulation_matches_default(self):
        # same counts through the env-selected fallback in a subprocess
        code = (
            "import numpy as np\n"
            "from qcpd import kernels\n"
            "counts, wrong = kernels.simulate_counts(0.4, np.array([1.2, 1.4, 1.0]), 30000, 77)\n"
            "print(counts.tolist(), wrong)\n"
        )
        env = dict(os.environ)
        env["QCPD_BACKEND"] = "numpy"
        result = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True, env=env
        )
        assert result.returncode == 0, result.stderr
        counts, wrong = kernels.simulate_counts(
            0.4, np.array([1.2, 1.4, 1.0]), 30_000, 77
        )
        assert result.stdout.strip() == f"{counts.tolist()} {wrong}"
