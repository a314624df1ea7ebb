import zipfile

import numpy as np
import pytest

from skycast.errors import CheckpointError, ConfigError, DataError
from skycast.network import (
    EarlyStopping,
    NoiseChannel,
    OptimizerState,
    TrainingData,
    analytic_gradients,
    fit,
    forward,
    grad_check,
    init_network,
    load,
    mae_grad,
    mae_loss,
    parameter_count,
    predict,
    save,
    train_step,
)
from skycast.network.layers import dropout_mask
from skycast.schema.network import NetworkConfig, NoiseMode, TrainingConfig


def _deterministic_config(**changes):
    base = dict(input_features=5, seq_len=3, noise_width=0, dropout_rate=0.0,
                conv_filters=6, conv_kernel=3, lstm_hidden=5, dense_hidden=7, output_len=12)
    base.update(changes)
    return NetworkConfig(**base)


def test_parameter_count_formula():
    config = NetworkConfig(input_features=10, seq_len=1, noise_width=4, conv_filters=8, conv_kernel=1,
                           lstm_hidden=16, dense_hidden=32, output_len=12)
    assert parameter_count(config) == 2660
    assert init_network(config).parameter_count == 2660


def test_invalid_sizes_rejected():
    with pytest.raises(ConfigError):
        NetworkConfig(input_features=3, conv_kernel=2)
    with pytest.raises(ConfigError):
        NetworkConfig(input_features=0)
    with pytest.raises(ConfigError):
        NetworkConfig(input_features=3, dropout_rate=1.0)


def test_init_is_seeded(tiny_net_config):
    a, b = init_network(tiny_net_config, seed=11), init_network(tiny_net_config, seed=11)
    c = init_network(tiny_net_config, seed=12)
    assert all(np.array_equal(a.params[n], b.params[n]) for n in a.params)
    assert any(not np.array_equal(a.params[n], c.params[n]) for n in a.params)


def test_forward_is_pure_without_noise_or_dropout(rng):
    net = init_network(_deterministic_config(), seed=1)
    x = rng.normal(size=(4, 3, 5))
    first, _ = forward(net, x, training=True)
    second, _ = forward(net, x, training=True)
    assert first.shape == (4, 12)
    assert np.array_equal(first, second)


def test_dropout_mask_keep_rate_and_scale():
    mask = dropout_mask((100_000,), 0.3, np.random.default_rng(0))
    kept = mask[mask > 0.0]
    assert abs(kept.size / mask.size - 0.7) < 0.01
    assert np.allclose(kept, 1.0 / 0.7, rtol=0.0, atol=1e-12)
    assert np.all(dropout_mask((3, 4), 0.0, np.random.default_rng(0)) == 1.0)


def test_dropout_only_active_in_training(rng):
    net = init_network(_deterministic_config(dropout_rate=0.3), seed=1)
    plain = init_network(_deterministic_config(), seed=1)
    x = rng.normal(size=(4, 3, 5))
    evaluated, _ = forward(net, x, training=False)
    assert np.array_equal(evaluated, forward(plain, x)[0])
    assert np.array_equal(evaluated, forward(net, x)[0])
    trained, _ = forward(net, x, training=True)
    assert not np.array_equal(trained, evaluated)


def test_duplicated_row_gives_duplicated_output(tiny_net_config, rng):
    net = init_network(tiny_net_config, seed=2)
    x = rng.normal(size=(3, 2, 3))
    batch = np.concatenate([x, x[1:2]], axis=0)
    out = predict(net, batch, NoiseChannel.zeroed(tiny_net_config.noise_width))
    assert np.array_equal(out[1], out[3])


def test_single_step_input_is_finite(rng):
    config = NetworkConfig(input_features=4, seq_len=1, noise_width=3, conv_filters=5, conv_kernel=3,
                           lstm_hidden=4, dense_hidden=6)
    assert config.kernel_eff == 1
    net = init_network(config, seed=0)
    out, _ = forward(net, rng.normal(size=(2, 1, 4)), NoiseChannel(3, seed=0), training=True)
    assert np.isfinite(out).all()


def test_forward_rejects_bad_blocks(tiny_net_config):
    net = init_network(tiny_net_config)
    with pytest.raises(DataError):
        forward(net, np.zeros((1, 5, 3)))
    bad = np.zeros((1, 2, 3))
    bad[0, 1, 2] = np.nan
    with pytest.raises(DataError):
        forward(net, bad)


def test_noise_channel_statistics():
    block = NoiseChannel(8, seed=4).sample(12_500, 10)
    assert block.shape == (12_500, 10, 8)
    assert block.size == 1_000_000
    assert abs(block.mean()) < 0.01 and abs(block.var() - 1.0) < 0.02
    assert np.all(NoiseChannel.zeroed(8).sample(2, 3) == 0.0)
    held = NoiseChannel(2, seed=4, per_step=False).sample(5, 4)
    assert np.array_equal(held[:, 0], held[:, 3])


def test_noise_changes_output(tiny_net_config, rng):
    net = init_network(tiny_net_config, seed=5)
    x = rng.normal(size=(2, 2, 3))
    quiet, _ = forward(net, x, None)
    noisy, _ = forward(net, x, NoiseChannel(tiny_net_config.noise_width, seed=9, mode=NoiseMode.SAMPLED))
    assert not np.array_equal(quiet, noisy)


def test_mae_loss(rng):
    p = rng.normal(size=12)
    assert mae_loss(p, p) == 0.0
    assert mae_loss(p, p + 0.75) == pytest.approx(0.75)
    q = rng.normal(size=12)
    assert mae_loss(p, q) == pytest.approx(sum(abs(a - b) for a, b in zip(p, q)) / 12, rel=1e-12)
    assert np.all(mae_grad(p, p) == 0.0)
    with pytest.raises(ConfigError):
        mae_loss(np.zeros(3), np.zeros(4))


def test_zero_learning_rate_leaves_parameters(tiny_net_config, rng):
    net = init_network(tiny_net_config, seed=3)
    before = net.copy_params()
    opt = OptimizerState(net, learning_rate=0.0)
    result = train_step(net, opt, rng.normal(size=(8, 2, 3)), rng.normal(size=(8, 3)),
                        NoiseChannel(tiny_net_config.noise_width, seed=1))
    assert result.accepted and np.isfinite(result.loss)
    assert all(np.array_equal(before[n], net.params[n]) for n in before)


def test_empty_batch_rejected(tiny_net_config):
    net = init_network(tiny_net_config)
    with pytest.raises(ConfigError):
        train_step(net, OptimizerState(net), np.zeros((0, 2, 3)), np.zeros((0, 3)))


def test_single_sample_overfit(rng):
    net = init_network(_deterministic_config(), seed=0)
    x = rng.normal(size=(1, 3, 5))
    y = rng.uniform(1.0, 2.0, size=(1, 12))
    initial = mae_loss(forward(net, x)[0], y)
    opt = OptimizerState(net, learning_rate=5e-3)
    for _ in range(500):
        train_step(net, opt, x, y)
    assert mae_loss(forward(net, x)[0], y) < 0.01 * initial


def test_fixed_batch_loss_decreases_across_seeds(rng):
    x = rng.normal(size=(16, 3, 5))
    y = rng.normal(size=(16, 12))
    improved = 0
    for seed in range(10):
        net = init_network(_deterministic_config(), seed=seed)
        initial = mae_loss(forward(net, x)[0], y)
        opt = OptimizerState(net, learning_rate=1e-3)
        for _ in range(50):
            train_step(net, opt, x, y)
        improved += mae_loss(forward(net, x)[0], y) < initial
    assert improved >= 9


@pytest.mark.parametrize("config", [
    NetworkConfig(input_features=3, seq_len=2, noise_width=2, dropout_rate=0.0, conv_filters=4,
                  conv_kernel=3, lstm_hidden=4, dense_hidden=4, output_len=3),
    NetworkConfig(input_features=3, seq_len=4, noise_width=0, dropout_rate=0.0, conv_filters=3,
                  conv_kernel=3, lstm_hidden=4, dense_hidden=4, output_len=2),
    NetworkConfig(input_features=2, seq_len=1, noise_width=1, dropout_rate=0.0, conv_filters=3,
                  conv_kernel=3, lstm_hidden=3, dense_hidden=4, output_len=4),
])
def test_grad_check_passes(config, rng):
    net = init_network(config, seed=21)
    x = rng.normal(size=(2, config.seq_len, config.input_features))
    y = rng.normal(size=(2, config.output_len))
    report = grad_check(net, x, y)
    assert report.passed, report.errors
    assert report.max_error < 1e-4
    assert grad_check(net, x, y).errors == report.errors


def test_grad_check_flags_corrupted_tensor(tiny_net_config, rng):
    net = init_network(tiny_net_config, seed=8)
    x = rng.normal(size=(2, 2, 3))
    y = rng.normal(size=(2, 3))

    def corrupted(n, inputs, target):
        grads = analytic_gradients(n, inputs, target)
        grads["lstm_U"] = grads["lstm_U"] + 0.5
        return grads

    report = grad_check(net, x, y, gradient_fn=corrupted)
    assert report.failing == ["lstm_U"]
    with pytest.raises(Exception, match="lstm_U"):
        report.raise_for_failure()


def test_grad_check_floor_bounds_the_denominator(tiny_net_config, rng):
    net = init_network(tiny_net_config, seed=8)
    x = rng.normal(size=(2, 2, 3))
    y = rng.normal(size=(2, 3))

    def scaled(n, inputs, target):
        grads = analytic_gradients(n, inputs, target)
        grads["dense2_b"] = grads["dense2_b"] * 1.01
        return grads

    loose = grad_check(net, x, y, gradient_fn=scaled)
    strict = grad_check(net, x, y, gradient_fn=scaled, floor=1e-8)
    assert loose.floor == 1e-3 and strict.floor == 1e-8
    assert "dense2_b" in strict.failing
    assert all(strict.errors[n] >= loose.errors[n] for n in loose.errors)


def test_checkpoint_round_trip(tmp_path, tiny_net_config, rng):
    net = init_network(tiny_net_config, seed=13)
    net.feature_names = ["ghi", "ghi_cs", "tod"]
    net.representation = "DELTA_CSI"
    path = save(net, str(tmp_path / "model.npz"))
    loaded = load(path, expected=tiny_net_config)
    x = rng.normal(size=(4, 2, 3))
    assert np.array_equal(forward(net, x)[0], forward(loaded, x)[0])
    assert loaded.feature_names == net.feature_names and loaded.representation == "DELTA_CSI"


def test_checkpoint_bytes_are_reproducible(tmp_path, tiny_net_config):
    net = init_network(tiny_net_config, seed=13)
    first = save(net, str(tmp_path / "a.npz"))
    second = save(net, str(tmp_path / "b.npz"))
    with open(first, "rb") as a, open(second, "rb") as b:
        assert a.read() == b.read()
    with zipfile.ZipFile(first) as zf:
        assert {info.date_time for info in zf.infolist()} == {(1980, 1, 1, 0, 0, 0)}


def test_truncated_checkpoint_rejected(tmp_path, tiny_net_config):
    path = save(init_network(tiny_net_config), str(tmp_path / "model.npz"))
    with open(path, "rb") as f:
        data = f.read()
    with open(path, "wb") as f:
        f.write(data[:len(data) // 2])
    with pytest.raises(CheckpointError):
        load(path)


def test_checkpoint_config_mismatch(tmp_path, tiny_net_config):
    path = save(init_network(tiny_net_config), str(tmp_path / "model.npz"))
    with pytest.raises(CheckpointError, match="does not match"):
        load(path, expected=tiny_net_config.replace(lstm_hidden=5))
    with pytest.raises(CheckpointError, match="not found"):
        load(str(tmp_path / "missing.npz"))


def test_early_stopping():
    stopper = EarlyStopping(patience=2, min_delta=0.01)
    assert stopper(1.0, 1)
    assert stopper(0.95, 2)
    assert not stopper(0.945, 3)
    assert not stopper.early_stop
    assert not stopper(0.96, 4)
    assert stopper.early_stop and stopper.best_epoch == 2


def test_fit_restores_best_weights_and_logs(tmp_path, rng):
    config = _deterministic_config(noise_width=2, dropout_rate=0.1)
    net = init_network(config, seed=4)
    train = TrainingData(rng.normal(size=(64, 3, 5)), rng.normal(size=(64, 12)))
    validate = TrainingData(rng.normal(size=(16, 3, 5)), rng.normal(size=(16, 12)))
    training = TrainingConfig(batch_size=16, max_epochs=6, fast_epochs=3, patience=2)
    log = tmp_path / "epochs.csv"

    history = fit(net, train, validate, training, log_path=str(log), fast=True)
    assert 1 <= history.epochs_run <= 3
    assert log.exists() and len(history.to_frame()) == history.epochs_run
    val = np.mean(np.abs(predict(net, validate.inputs) - validate.targets))
    assert val == pytest.approx(history.best_val_mae)


def test_fit_is_reproducible(rng):
    config = _deterministic_config(noise_width=2, dropout_rate=0.2)
    train = TrainingData(rng.normal(size=(32, 3, 5)), rng.normal(size=(32, 12)))
    training = TrainingConfig(batch_size=8, max_epochs=2)
    a, b = init_network(config, seed=6), init_network(config, seed=6)
    fit(a, train, None, training)
    fit(b, train, None, training)
    assert all(np.array_equal(a.params[n], b.params[n]) for n in a.params)
