import struct
import zlib
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from regen_turboshaft.dataset import COLUMNS, NormRecord
from regen_turboshaft.errors import FormatError, TrainingDivergedError
from regen_turboshaft.surrogate import (
    MAGIC,
    AdamState,
    MlpModel,
    TrainConfig,
    adam_step,
    backward,
    build_network,
    dumps_model,
    forward,
    load_model,
    loads_model,
    mse_loss,
    param_count,
    predict,
    relu,
    save_model,
    sigmoid,
    train,
)


def norm9():
    return NormRecord(np.arange(9.0), np.arange(9.0) + 2.0)


def test_activations():
    assert relu(-3.0) == 0.0 and relu(2.5) == 2.5
    assert sigmoid(0.0) == 0.5
    for x in (1.0, 5.0, 20.0):
        assert sigmoid(-x) + sigmoid(x) == pytest.approx(1.0, abs=1e-12)
    big = sigmoid(np.array([-800.0, 800.0]))
    assert np.isfinite(big).all() and big[0] == 0.0 and big[1] == 1.0


def test_parameter_counts():
    assert build_network([7, 625, 625, 2]).n_params == 397_502
    assert param_count([7, 625, 625, 2]) == 397_502
    assert build_network([2, 3, 1]).n_params == 13


@given(st.lists(st.integers(1, 12), min_size=2, max_size=5))
def test_parameter_count_matches_enumeration(sizes):
    m = build_network(sizes)
    counted = sum(1 for W in m.weights for _ in np.nditer(W)) + sum(len(b) for b in m.biases)
    assert m.n_params == counted == param_count(sizes)


def test_ten_random_geometries():
    rng = np.random.default_rng(42)
    for _ in range(10):
        sizes = list(rng.integers(1, 40, size=rng.integers(2, 6)))
        assert build_network(sizes).n_params == sum(a * b + b for a, b in zip(sizes, sizes[1:]))


def test_invalid_geometry():
    for sizes in ([7], [7, 0, 2], [7, 2.5, 1]):
        with pytest.raises(ValueError):
            build_network(sizes)
    with pytest.raises(ValueError):
        build_network([2, 2], hidden_init="lecun")


def test_initialization():
    a, b = build_network([7, 50, 50, 2], seed=4), build_network([7, 50, 50, 2], seed=4)
    assert all(np.array_equal(x, y) for x, y in zip(a.weights, b.weights))
    assert not np.array_equal(a.weights[0], build_network([7, 50, 50, 2], seed=5).weights[0])
    assert a.activations == ("relu", "relu", "sigmoid")
    assert all(not b.any() for b in a.biases)
    assert np.abs(a.weights[0]).max() <= np.sqrt(6 / 57)
    he = build_network([7, 50, 50, 2], seed=4, hidden_init="he")
    assert np.abs(he.weights[0]).max() > np.sqrt(6 / 57)
    assert np.abs(he.weights[0]).max() <= np.sqrt(6 / 7)
    assert np.abs(he.weights[2]).max() <= np.sqrt(6 / 52)


def test_hand_forward_pass():
    W0 = np.array([[0.5, -1.0], [0.25, 2.0]])
    b0 = np.array([0.1, -0.2])
    W1 = np.array([[1.5], [-0.5]])
    b1 = np.array([0.3])
    m = MlpModel((2, 2, 1), [W0, W1], [b0, b1], ("relu", "sigmoid"))
    x = np.array([0.4, 0.6])
    # hidden: 0.2 + 0.15 + 0.1 = 0.45 ; -0.4 + 1.2 - 0.2 = 0.6
    z = 1.5 * 0.45 - 0.5 * 0.6 + 0.3
    assert forward(m, x)[0] == pytest.approx(1 / (1 + np.exp(-z)), abs=1e-12)
    x = np.array([0.0, 0.0])
    # hidden: relu(0.1)=0.1, relu(-0.2)=0
    assert forward(m, x)[0] == pytest.approx(1 / (1 + np.exp(-(0.15 + 0.3))), abs=1e-12)


def test_zero_network_outputs_half():
    m = build_network([7, 5, 5, 2])
    for W, b in zip(m.weights, m.biases):
        W[:] = 0.0
        b[:] = 0.0
    assert np.array_equal(forward(m, np.random.default_rng(0).uniform(size=(3, 7))), np.full((3, 2), 0.5))


def test_outputs_bounded():
    m = build_network([7, 64, 64, 2], seed=1)
    out = forward(m, np.random.default_rng(1).uniform(size=(1000, 7)))
    assert out.shape == (1000, 2) and np.all((out > 0) & (out < 1))


def test_nan_input_raises():
    with pytest.raises(FloatingPointError):
        forward(build_network([2, 3, 1]), np.array([np.nan, 0.0]))
    with pytest.raises(ValueError):
        forward(build_network([2, 3, 1]), np.zeros(3))


def _numeric_grads(m, X, Y, h=1e-5):
    out = []
    for W, b in zip(m.weights, m.biases):
        pair = []
        for p in (W, b):
            g = np.zeros_like(p)
            for idx in np.ndindex(p.shape):
                keep = p[idx]
                p[idx] = keep + h
                up = mse_loss(forward(m, X), Y)
                p[idx] = keep - h
                down = mse_loss(forward(m, X), Y)
                p[idx] = keep
                g[idx] = (up - down) / (2 * h)
            pair.append(g)
        out.append(pair)
    return out


@pytest.mark.parametrize("sizes,acts", [
    ((3, 4, 2), ("relu", "sigmoid")),
    ((3, 5, 4, 2), ("relu", "relu", "sigmoid")),
    ((3, 4, 2), ("sigmoid", "sigmoid")),
    ((3, 4, 2), ("relu", "relu")),
])
def test_gradient_matches_central_differences(sizes, acts):
    rng = np.random.default_rng(7)
    m = build_network(sizes, seed=7)
    m = MlpModel(m.layer_sizes, m.weights, [rng.normal(0, 0.3, b.shape) for b in m.biases], acts)
    X, Y = rng.uniform(size=(6, sizes[0])), rng.uniform(size=(6, sizes[-1]))
    _, grads = backward(m, X, Y)
    num = _numeric_grads(m, X, Y)
    analytic = np.concatenate([np.concatenate([g.ravel() for g in pair]) for pair in grads])
    numeric = np.concatenate([np.concatenate([g.ravel() for g in pair]) for pair in num])
    scale = np.maximum(np.abs(numeric), 1e-6)
    assert np.max(np.abs(analytic - numeric) / scale) < 1e-6


def test_perfect_prediction_has_zero_gradient():
    m = build_network([3, 4, 2], seed=0)
    X = np.random.default_rng(0).uniform(size=(5, 3))
    loss, grads = backward(m, X, forward(m, X))
    assert loss == 0.0
    assert all(not dW.any() and not db.any() for dW, db in grads)


def test_mse_loss():
    assert mse_loss([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert mse_loss([1.0, 1.0], [0.0, 0.0]) == 1.0
    with pytest.raises(ValueError):
        mse_loss([1.0], [1.0, 2.0])


def test_first_adam_step_is_signed_lr():
    m = build_network([3, 4, 2], seed=0)
    before = m.copy()
    rng = np.random.default_rng(1)
    grads = [(rng.normal(size=W.shape), rng.normal(size=b.shape)) for W, b in zip(m.weights, m.biases)]
    cfg = TrainConfig(lr=1e-3)
    adam_step(m, grads, AdamState.zeros(m), cfg)
    for (W, b), (W0, b0), (gW, gb) in zip(zip(m.weights, m.biases), zip(before.weights, before.biases), grads):
        np.testing.assert_allclose(W - W0, -1e-3 * np.sign(gW), rtol=1e-4)
        np.testing.assert_allclose(b - b0, -1e-3 * np.sign(gb), rtol=1e-4)


def test_adam_shape_check():
    m = build_network([3, 4, 2])
    with pytest.raises(ValueError):
        adam_step(m, [(np.zeros((4, 3)), np.zeros(4)), (np.zeros((4, 2)), np.zeros(2))], AdamState.zeros(m))
    with pytest.raises(ValueError):
        adam_step(m, [], AdamState.zeros(m))


def test_train_config_validation():
    for bad in (dict(lr=-1.0), dict(beta1=1.0), dict(beta2=0.0), dict(eps=0.0), dict(epochs=0), dict(loss="mae")):
        with pytest.raises(ValueError):
            TrainConfig(**bad)


def linear_fixture(n=200, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.uniform(size=(n, 2))
    return X, (0.2 + 0.3 * X[:, 0] + 0.4 * X[:, 1])[:, None]


def test_lr_zero_leaves_weights_unchanged():
    X, Y = linear_fixture()
    m = build_network([2, 8, 1], seed=0)
    before = m.flat()
    _, hist = train(m, (X, Y), (X, Y), TrainConfig(lr=0.0, epochs=5, patience=0))
    assert np.array_equal(m.flat(), before)
    assert len(set(hist.val_loss)) == 1


def test_learns_linear_fixture():
    X, Y = linear_fixture()
    Xv, Yv = linear_fixture(50, seed=1)
    m = build_network([2, 16, 1], seed=0)
    _, hist = train(m, (X, Y), (Xv, Yv), TrainConfig(epochs=500, patience=0))
    assert hist.train_loss[-1] < 1e-3 and hist.val_loss[-1] < 1e-3


def test_full_batch_loss_non_increasing():
    # 32-row batches jitter by tens of percent once the loss reaches ~1e-4;
    # with the whole set in one batch the epoch mean must not rise beyond 2%
    X, Y = linear_fixture()
    m = build_network([2, 16, 1], seed=0)
    _, hist = train(m, (X, Y), (X, Y), TrainConfig(epochs=500, batch_size=len(X), patience=0))
    tl = np.array(hist.train_loss)
    assert np.all(tl[1:] <= tl[:-1] * 1.02)
    assert tl[-1] < 0.05 * tl[0]


def test_training_is_deterministic():
    X, Y = linear_fixture()
    runs = []
    for _ in range(2):
        m = build_network([2, 8, 1], seed=3)
        runs.append(train(m, (X, Y), (X, Y), TrainConfig(epochs=20, seed=3)))
    (m1, h1), (m2, h2) = runs
    assert h1.train_loss == h2.train_loss and h1.val_loss == h2.val_loss
    assert np.array_equal(m1.flat(), m2.flat())


def test_early_stopping():
    X, Y = linear_fixture(40)
    m = build_network([2, 4, 1], seed=0)
    _, hist = train(m, (X, Y), (X + 5.0, 1 - Y), TrainConfig(epochs=400, patience=3, lr=1e-2))
    assert hist.stopped_early and len(hist.train_loss) == hist.best_epoch + 3
    assert hist.to_csv().splitlines()[0].startswith("epoch")


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_reports_epoch():
    X, Y = linear_fixture(40)
    m = build_network([2, 4, 1], seed=0)
    m.weights[0][:] = np.inf
    with pytest.raises(TrainingDivergedError) as exc:
        train(m, (X, Y), (X, Y), TrainConfig(epochs=3))
    assert exc.value.epoch == 1


def test_train_rejects_empty_sets():
    with pytest.raises(ValueError):
        train(build_network([2, 2, 1]), (np.zeros((0, 2)), np.zeros((0, 1))), linear_fixture(4))


def test_model_roundtrip(tmp_path):
    m = build_network([7, 20, 20, 2], seed=11)
    path = tmp_path / "m.rtmlp"
    save_model(m, norm9(), path)
    m2, n2 = load_model(path)
    X = np.random.default_rng(0).uniform(size=(100, 7))
    assert np.array_equal(forward(m, X), forward(m2, X))
    assert n2 == norm9() and m2.activations == m.activations
    assert path.read_bytes()[: len(MAGIC)] == MAGIC


def test_model_file_layout():
    m = build_network([7, 3, 2], seed=0)
    blob = dumps_model(m, norm9())
    version, n = struct.unpack_from("<II", blob, len(MAGIC))
    assert (version, n) == (1, 3)
    assert struct.unpack_from("<3I", blob, len(MAGIC) + 8) == (7, 3, 2)
    assert blob[len(MAGIC) + 20 : len(MAGIC) + 22] == bytes([0, 1])
    off = len(MAGIC) + 8 + 12 + 2
    W0 = np.frombuffer(blob, "<f8", 21, off).reshape(7, 3)
    assert np.array_equal(W0, m.weights[0])
    assert struct.unpack("<I", blob[-4:])[0] == zlib.crc32(blob[:-4])


@pytest.mark.parametrize("cut", [5, 30, -20, -1])
def test_truncated_model_rejected(cut):
    blob = dumps_model(build_network([7, 3, 2]), norm9())
    with pytest.raises(FormatError):
        loads_model(blob[:cut])


def test_corrupted_or_padded_model_rejected():
    blob = bytearray(dumps_model(build_network([7, 3, 2]), norm9()))
    with pytest.raises(FormatError):
        loads_model(bytes(blob) + b"\0")
    blob[40] ^= 0xFF
    with pytest.raises(FormatError):
        loads_model(bytes(blob))
    with pytest.raises(FormatError):
        loads_model(b"NOTAMODEL" + bytes(blob[9:]))


def test_mismatched_norm_columns():
    short = NormRecord(np.zeros(3), np.ones(3), ("a", "b", "c"))
    with pytest.raises((FormatError, ValueError)):
        dumps_model(build_network([7, 4, 2]), short)


def test_predict_in_target_units():
    m = build_network([7, 4, 2], seed=0)
    norm = norm9()
    X = np.full((1, 7), 1.0) + np.arange(7.0)
    out = predict(m, norm, X)
    raw = forward(m, norm.scale_features(X))
    np.testing.assert_allclose(out, raw * 2.0 + np.array([7.0, 8.0]))


def test_columns_are_dataset_columns():
    assert norm9().columns == COLUMNS
    assert replace(TrainConfig(), seed=3).seed == 3
