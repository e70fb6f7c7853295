import math

import numpy as np
import pytest

from layoutgraphs.errors import InputError, NumericError
from layoutgraphs.nn import (
    AdamState,
    GruLayer,
    GruStack,
    Linear,
    Mlp,
    adam_step,
    bce_loss,
    bce_loss_grad,
    gru_stack_forward,
    lr_schedule,
    sigmoid,
    zero_grads,
)


def fd_check(params, loss_fn, grads, h=1e-5, samples=8, seed=0, tol=1e-6):
    """Central finite differences against analytic grads on sampled entries."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for name, arr in params.items():
        flat = arr.reshape(-1)
        idx = rng.choice(flat.size, size=min(samples, flat.size), replace=False)
        for i in idx:
            old = flat[i]
            flat[i] = old + h
            lp = loss_fn()
            flat[i] = old - h
            lm = loss_fn()
            flat[i] = old
            fd = (lp - lm) / (2 * h)
            an = grads[name].reshape(-1)[i]
            worst = max(worst, abs(an - fd) / max(abs(an), abs(fd), tol))
    return worst


class TestSigmoid:
    def test_values(self):
        assert sigmoid(np.array([0.0]))[0] == 0.5
        assert sigmoid(np.array([50.0]))[0] == pytest.approx(1.0)
        assert sigmoid(np.array([-800.0]))[0] == 0.0  # no overflow

    def test_symmetry(self):
        x = np.linspace(-20, 20, 41)
        assert np.allclose(sigmoid(x) + sigmoid(-x), 1.0)


class TestGruCell:
    def test_zero_params_zero_hidden(self):
        layer = GruLayer(3, 4)
        h, _ = layer.step(np.ones((2, 3)), np.zeros((2, 4)))
        assert np.all(h == 0.0)

    def test_zero_params_halves_hidden(self, rng):
        layer = GruLayer(3, 4)
        h0 = rng.normal(size=(2, 4))
        h, _ = layer.step(np.zeros((2, 3)), h0)
        assert np.allclose(h, 0.5 * h0)

    def test_convex_combination_bound(self, rng):
        layer = GruLayer(3, 4, rng)
        h0 = rng.normal(size=(5, 4))
        h, _ = layer.step(rng.normal(size=(5, 3)), h0)
        assert np.all(np.abs(h) <= np.maximum(np.abs(h0), 1.0) + 1e-12)

    def test_gate_views_alias_fused_arrays(self):
        layer = GruLayer(2, 3)
        layer.w_r[:] = 1.0
        assert np.all(layer.w[:3] == 1.0) and np.all(layer.w[3:] == 0.0)
        assert layer.b_c.shape == (3,)

    def test_dimension_mismatch(self):
        layer = GruLayer(3, 4)
        with pytest.raises(InputError):
            layer.step(np.zeros((2, 5)), np.zeros((2, 4)))

    def test_gradients_match_finite_differences(self, rng):
        layer = GruLayer(3, 4, rng)
        x = rng.normal(size=(2, 3))
        h0 = rng.normal(size=(2, 4))
        target = rng.normal(size=(2, 4))
        params = dict(layer.named_params("cell"))

        def loss_fn():
            h, _ = layer.step(x, h0)
            return float(((h - target) ** 2).sum())

        h, cache = layer.step(x, h0)
        grads = zero_grads(params)
        layer.backward_step(cache, 2.0 * (h - target), grads, "cell")
        assert fd_check(params, loss_fn, grads) < 1e-4


class TestGruStack:
    def test_empty_sequence(self, rng):
        stack = GruStack(2, 3, 4, rng)
        h0 = [rng.normal(size=(2, 4)) for _ in range(2)]
        out, hs = gru_stack_forward(stack, np.zeros((0, 2, 3)), h0)
        assert out.shape == (0, 2, 4)
        assert all(np.array_equal(a, b) for a, b in zip(hs, h0))

    def test_single_layer_matches_cell(self, rng):
        stack = GruStack(1, 3, 4, rng)
        xs = rng.normal(size=(5, 2, 3))
        out, _ = gru_stack_forward(stack, xs)
        h = np.zeros((2, 4))
        for t in range(5):
            h, _ = stack.layers[0].step(xs[t], h)
            assert np.allclose(out[t], h)

    def test_zero_params_zero_outputs(self, rng):
        stack = GruStack(3, 2, 4)
        out, _ = gru_stack_forward(stack, rng.normal(size=(6, 2, 2)))
        assert np.all(out == 0.0)

    def test_bptt_gradients(self, rng):
        stack = GruStack(2, 3, 4, rng)
        xs = rng.normal(size=(4, 2, 3))
        target = rng.normal(size=(4, 2, 4))
        params = dict(stack.named_params("stack"))

        def forward():
            hs = stack.zero_state(2)
            caches = []
            outs = []
            for t in range(4):
                hs, cache = stack.step(xs[t], hs)
                caches.append(cache)
                outs.append(hs[-1])
            return np.stack(outs), caches

        def loss_fn():
            outs, _ = forward()
            return float(((outs - target) ** 2).sum())

        outs, caches = forward()
        grads = zero_grads(params)
        carries = [np.zeros((2, 4)) for _ in range(2)]
        for t in reversed(range(4)):
            d_hs = carries
            d_hs[-1] = d_hs[-1] + 2.0 * (outs[t] - target[t])
            _, carries = stack.backward_step(caches[t], d_hs, grads, "stack")
        assert fd_check(params, loss_fn, grads) < 1e-4


class TestMlp:
    def test_zero_params_sigmoid_head(self):
        mlp = Mlp([3, 2, 1], ["relu", "sigmoid"])
        y, _ = mlp.forward(np.ones((4, 3)))
        assert np.all(y == 0.5)

    def test_relu_clamps_negatives(self):
        mlp = Mlp([2, 2], ["relu"])
        mlp.weights[0][:] = -1.0
        y, _ = mlp.forward(np.ones((1, 2)))
        assert np.all(y == 0.0)

    def test_identity_layer_is_affine(self, rng):
        mlp = Mlp([3, 2], ["identity"], rng)
        x = rng.normal(size=(5, 3))
        y, _ = mlp.forward(x)
        assert np.allclose(y, x @ mlp.weights[0].T + mlp.biases[0])

    def test_gradients(self, rng):
        mlp = Mlp([3, 4, 2], ["relu", "sigmoid"], rng)
        x = rng.normal(size=(5, 3))
        target = rng.uniform(size=(5, 2))
        params = dict(mlp.named_params("mlp"))

        def loss_fn():
            y, _ = mlp.forward(x)
            return float(((y - target) ** 2).sum())

        y, cache = mlp.forward(x)
        grads = zero_grads(params)
        mlp.backward(cache, 2.0 * (y - target), grads, "mlp")
        assert fd_check(params, loss_fn, grads) < 1e-4


class TestBce:
    def test_half_probability(self):
        assert bce_loss(np.array([0.5]), np.array([1.0]), np.array([True])) == pytest.approx(
            math.log(2), abs=1e-15
        )

    def test_confident_correct_is_near_zero(self):
        loss = bce_loss(np.array([1.0 - 1e-7]), np.array([1.0]), np.array([True]))
        assert 0.0 <= loss < 1e-6

    def test_symmetric_pair(self):
        loss = bce_loss(np.array([0.5, 0.5]), np.array([1.0, 0.0]), np.array([True, True]))
        assert loss == pytest.approx(math.log(2), abs=1e-15)

    def test_mask_excludes_slots(self):
        p = np.array([0.5, 0.99])
        y = np.array([1.0, 0.0])
        loss = bce_loss(p, y, np.array([True, False]))
        assert loss == pytest.approx(math.log(2), abs=1e-15)

    def test_empty_mask_rejected(self):
        with pytest.raises(InputError):
            bce_loss(np.array([0.5]), np.array([1.0]), np.array([False]))

    def test_loss_nonnegative(self, rng):
        p = rng.uniform(size=100)
        y = (rng.uniform(size=100) < 0.5).astype(float)
        assert bce_loss(p, y, np.ones(100, dtype=bool)) >= 0.0

    def test_sigmoid_composition_gradient(self, rng):
        # d loss / d a for p = sigmoid(a) equals (p - y) / count
        a = rng.normal(size=7)
        y = (rng.uniform(size=7) < 0.5).astype(float)
        mask = np.ones(7, dtype=bool)
        p = sigmoid(a)
        _, dp = bce_loss_grad(p, y, mask)
        da = dp * p * (1.0 - p)
        assert np.allclose(da, (p - y) / 7, atol=1e-12)


class TestAdam:
    def test_zero_gradient_keeps_params(self):
        params = {"w": np.ones((2, 2))}
        state = AdamState(params)
        adam_step(params, {"w": np.zeros((2, 2))}, state, 0.001)
        assert np.all(params["w"] == 1.0)

    def test_first_step_magnitude(self):
        params = {"w": np.zeros(1)}
        state = AdamState(params)
        adam_step(params, {"w": np.array([2.0])}, state, 0.001)
        assert params["w"][0] == pytest.approx(-0.001, rel=1e-6)

    def test_opposite_steps_do_not_cancel(self):
        params = {"w": np.zeros(1)}
        state = AdamState(params)
        adam_step(params, {"w": np.array([1.0])}, state, 0.01)
        adam_step(params, {"w": np.array([-1.0])}, state, 0.01)
        assert params["w"][0] != 0.0

    def test_non_finite_gradient_raises(self):
        params = {"w": np.zeros(1)}
        state = AdamState(params)
        with pytest.raises(NumericError):
            adam_step(params, {"w": np.array([np.nan])}, state, 0.001)

    def test_deterministic(self):
        def run():
            params = {"w": np.linspace(0, 1, 5)}
            state = AdamState(params)
            for i in range(10):
                adam_step(params, {"w": np.sin(np.arange(5) + i)}, state, 0.01)
            return params["w"]

        assert np.array_equal(run(), run())


class TestLrSchedule:
    def test_epoch_zero(self):
        assert lr_schedule(0.001, 0) == 0.001

    def test_first_decay(self):
        assert lr_schedule(0.001, 100) == pytest.approx(0.0002)

    def test_epoch_250(self):
        assert lr_schedule(0.001, 250) == pytest.approx(0.00004)

    def test_piecewise_constant(self):
        assert lr_schedule(0.001, 99) == 0.001
        assert lr_schedule(0.001, 199) == pytest.approx(0.0002)
