"""Network forward/backward tests, including the kernel backend contract."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from greenhouse_rl import _kernels, nn
from greenhouse_rl._kernels import pure


def seeded_mlp(seed: int, d_in=6, d_hidden=5, d_out=3) -> nn.MLPWeights:
    rng = np.random.default_rng(seed)
    return nn.MLPWeights(
        w1=rng.normal(size=(d_in, d_hidden)),
        b1=rng.normal(size=d_hidden),
        w2=rng.normal(size=(d_hidden, d_out)),
        b2=rng.normal(size=d_out),
    )


class TestForward:
    def test_zero_weights_zero_output(self):
        w = nn.zeros_mlp(4, 8, 4)
        y = nn.forward_one(w, np.ones(4))
        assert np.all(y == 0.0)

    def test_bias_path(self):
        w = nn.zeros_mlp(4, 8, 4)
        w.b2[:] = [1.0, -2.0, 0.5, 3.0]
        y = nn.forward_one(w, np.full(4, 7.0))
        assert np.array_equal(y, [1.0, -2.0, 0.5, 3.0])

    def test_matches_straight_line_reimplementation(self):
        # Literal loop-based recomputation of the same arithmetic.
        w = seeded_mlp(11)
        rng = np.random.default_rng(12)
        x = rng.normal(size=6)
        y = nn.forward_one(w, x)

        hidden = []
        for j in range(5):
            acc = w.b1[j]
            for k in range(6):
                acc += x[k] * w.w1[k, j]
            hidden.append(math.tanh(acc))
        expected = []
        for j in range(3):
            acc = w.b2[j]
            for k in range(5):
                acc += hidden[k] * w.w2[k, j]
            expected.append(acc)
        np.testing.assert_allclose(y, expected, rtol=1e-12)

    def test_dimension_mismatch(self):
        w = nn.zeros_mlp(4, 8, 4)
        with pytest.raises(ValueError, match="dimension"):
            nn.forward(w, np.ones(5))


class TestLossMse:
    def test_equal_is_zero(self):
        assert nn.loss_mse(np.ones(4), np.ones(4)) == 0.0

    def test_unit_differences(self):
        assert nn.loss_mse(np.ones(4), np.zeros(4)) == 1.0

    def test_single_component(self):
        assert nn.loss_mse(np.array([1.0, 0, 0, 0]), np.zeros(4)) == 0.25

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            nn.loss_mse(np.ones(4), np.ones(3))


class TestGradients:
    def test_zero_at_minimum(self):
        w = nn.zeros_mlp(4, 8, 4)
        w.b2[:] = 2.0
        x = np.random.default_rng(0).normal(size=(6, 4))
        t = np.full((6, 4), 2.0)  # predictions equal targets exactly
        loss, grads = nn.mse_grads(w, x, t)
        assert loss == 0.0
        for g in grads:
            assert np.all(g == 0.0)

    def test_linear_case_bias_gradient(self):
        # At all-zero weights the output is zero, so the output-bias
        # gradient has the closed form -2/(n*k) * sum(targets); scaling the
        # targets scales it exactly.
        rng = np.random.default_rng(5)
        x = rng.normal(size=(7, 6))
        t = rng.normal(size=(7, 3))
        w = nn.zeros_mlp(6, 5, 3)
        _, grads = nn.mse_grads(w, x, t)
        expected_db2 = -2.0 / (7 * 3) * t.sum(axis=0)
        np.testing.assert_allclose(grads[3], expected_db2, rtol=1e-12)
        _, grads2 = nn.mse_grads(w, x, 2.0 * t)
        np.testing.assert_allclose(grads2[3], 2.0 * expected_db2, rtol=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_finite_difference_check(self, seed):
        w = seeded_mlp(seed)
        rng = np.random.default_rng(100 + seed)
        x = rng.normal(size=(8, 6))
        t = rng.normal(size=(8, 3))
        _, analytic = nn.mse_grads(w, x, t)
        numeric = nn.finite_difference_grads(lambda m: nn.mse_grads(m, x, t)[0], w)
        assert nn.max_relative_grad_error(analytic, numeric) <= 1e-4


class TestKernelBackends:
    def test_pure_and_compiled_agree(self):
        try:
            from greenhouse_rl._kernels import _fast
        except ImportError:
            pytest.skip("compiled backend not built")
        rng = np.random.default_rng(2)
        x = rng.normal(size=(9, 6))
        w = seeded_mlp(3)
        y_c, h_c = _fast.mlp_forward(x, w.w1, w.b1, w.w2, w.b2)
        y_p, h_p = pure.mlp_forward(x, w.w1, w.b1, w.w2, w.b2)
        np.testing.assert_allclose(y_c, y_p, rtol=1e-12, atol=1e-14)
        dy = rng.normal(size=(9, 3))
        g_c = _fast.mlp_backward(x, np.asarray(h_c), dy, w.w2)
        g_p = pure.mlp_backward(x, h_p, dy, w.w2)
        for a, b in zip(g_c, g_p):
            np.testing.assert_allclose(np.asarray(a), b, rtol=1e-12, atol=1e-14)

    def test_backend_reports_identity(self):
        assert _kernels.BACKEND in ("hybrid", "compiled", "python")

    def test_hybrid_dispatch_matches_pure(self):
        if _kernels.BACKEND != "hybrid":
            pytest.skip("compiled backend not built")
        w = seeded_mlp(4)
        rng = np.random.default_rng(5)
        for n in (1, 2, 33):  # crosses the single-sample dispatch boundary
            x = rng.normal(size=(n, 6))
            y_sel, _ = _kernels.mlp_forward(x, w.w1, w.b1, w.w2, w.b2)
            y_ref, _ = pure.mlp_forward(x, w.w1, w.b1, w.w2, w.b2)
            np.testing.assert_allclose(np.asarray(y_sel), y_ref, rtol=1e-12, atol=1e-14)

    def test_backend_override_env_var(self):
        env = dict(os.environ, GREENHOUSE_RL_KERNELS="python")
        out = subprocess.run(
            [sys.executable, "-c",
             "import greenhouse_rl._kernels as k; print(k.BACKEND)"],
            env=env, capture_output=True, text=True,
        )
        assert out.returncode == 0
        assert out.stdout.strip() == "python"


class TestPersistence:
    def test_doc_round_trip(self):
        w = seeded_mlp(9)
        w2 = nn.mlp_from_doc(nn.mlp_to_doc(w))
        for (_, a), (_, b) in zip(w.arrays(), w2.arrays()):
            assert np.array_equal(a, b)

    def test_file_round_trip(self, tmp_path):
        w = seeded_mlp(10)
        doc = {"format": nn.WEIGHTS_FORMAT, "kind": "q-network", **nn.mlp_to_doc(w)}
        path = tmp_path / "w.json"
        nn.save_weights_doc(path, doc)
        loaded = nn.load_weights_doc(path, expected_kind="q-network")
        w2 = nn.mlp_from_doc(loaded)
        x = np.random.default_rng(1).normal(size=6)
        np.testing.assert_array_equal(nn.forward_one(w, x), nn.forward_one(w2, x))

    def test_kind_mismatch(self, tmp_path):
        doc = {"format": nn.WEIGHTS_FORMAT, "kind": "q-network",
               **nn.mlp_to_doc(seeded_mlp(1))}
        path = tmp_path / "w.json"
        nn.save_weights_doc(path, doc)
        with pytest.raises(ValueError, match="kind"):
            nn.load_weights_doc(path, expected_kind="growth-surrogate")
