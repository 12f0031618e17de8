import numpy as np
import pytest

from qganmark.errors import QganmarkError
from qganmark.qgan import (
    GanTrainConfig,
    GeneratorModel,
    bce_loss,
    discriminator_forward,
    generator_forward,
    generator_gradient,
    init_discriminator,
    init_generator,
    train_qgan,
)
from qganmark.sim import CircuitSpec, ry, run_circuit


def tiny_reals(count=8, seed=0):
    return np.random.default_rng(seed).random((count, 64)) * 0.5


# --- loss ---------------------------------------------------------------------

def test_bce_at_half_is_ln2():
    assert bce_loss(0.5, 1) == pytest.approx(np.log(2), abs=1e-12)
    assert bce_loss(0.5, 0) == pytest.approx(np.log(2), abs=1e-12)


def test_bce_consistent_extremes_near_zero():
    assert bce_loss(1.0, 1) == pytest.approx(0.0, abs=1e-6)
    assert bce_loss(0.0, 0) == pytest.approx(0.0, abs=1e-6)


def test_bce_gradient_matches_finite_difference():
    h = 1e-7
    for pred in (0.2, 0.5, 0.9):
        for label in (0, 1):
            fd = (bce_loss(pred + h, label) - bce_loss(pred - h, label)) / (2 * h)
            analytic = (pred - label) / (pred * (1 - pred))
            assert fd == pytest.approx(analytic, rel=1e-4)


# --- parameter-shift rule -------------------------------------------------------

def test_single_ry_shift_rule_analytic():
    # P0 = cos^2(theta/2): dP0/dtheta at pi/2 is -1/2, and the shift rule
    # reproduces it exactly
    theta = np.pi / 2

    def p0(t):
        return run_circuit(CircuitSpec(1, [ry(0, t)]))[0]

    shift = (p0(theta + np.pi / 2) - p0(theta - np.pi / 2)) / 2.0
    assert shift == pytest.approx(-0.5, abs=1e-12)


def test_zero_discriminator_gives_zero_gradient():
    model = init_generator(seed=1)
    disc = init_discriminator(seed=1)
    for name, tensor in disc.tensors().items():
        setattr(disc, name, np.zeros_like(tensor))
    grad = generator_gradient(model, np.full(5, 0.3), None, disc)
    assert np.array_equal(grad, np.zeros_like(model.theta))


def test_generator_gradient_matches_finite_differences():
    rng = np.random.default_rng(6)
    model = GeneratorModel(2, 6, 1, 1, rng.uniform(0, np.pi, (2, 1, 6)))
    disc = init_discriminator(seed=2)
    z = rng.uniform(0, np.pi / 2, 6)

    grad = generator_gradient(model, z, None, disc)

    def loss_of(theta):
        img = generator_forward(GeneratorModel(2, 6, 1, 1, theta), z)
        return bce_loss(discriminator_forward(disc, img), 1)

    h = 1e-4
    for idx in np.ndindex(model.theta.shape):
        tp = model.theta.copy()
        tp[idx] += h
        tm = model.theta.copy()
        tm[idx] -= h
        fd = (loss_of(tp) - loss_of(tm)) / (2 * h)
        assert grad[idx] == pytest.approx(fd, abs=1e-4)


# --- training loop ----------------------------------------------------------------

def test_zero_epochs_leaves_parameters(synth_profiles):
    cfg = GanTrainConfig(epochs=0, seed=9)
    gen, _ = train_qgan(tiny_reals(), [(synth_profiles["synth_a"], 0)], cfg)
    fresh, _ = train_qgan(tiny_reals(), [(synth_profiles["synth_a"], 0)], cfg)
    assert np.array_equal(gen.theta, fresh.theta)
    assert gen.schedule == [("synth_a", 0)]


def test_schedule_recorded_in_order(synth_profiles):
    cfg = GanTrainConfig(epochs=2, seed=3)
    schedule = [(synth_profiles["synth_a"], 1), (synth_profiles["synth_b"], 1)]
    gen, _ = train_qgan(tiny_reals(), schedule, cfg)
    assert gen.schedule == [("synth_a", 1), ("synth_b", 1)]
    assert gen.label() == "synth_a+synth_b"


def test_noiseless_training_bit_reproducible():
    cfg = GanTrainConfig(epochs=2, seed=17)
    a, da = train_qgan(tiny_reals(), [(None, 2)], cfg)
    b, db = train_qgan(tiny_reals(), [(None, 2)], cfg)
    assert np.array_equal(a.theta, b.theta)
    for name in da.tensors():
        assert np.array_equal(getattr(da, name), getattr(db, name))


def test_discriminator_loss_decreases_on_frozen_generator():
    # freeze the generator via a zero learning rate; over 20 epochs the
    # discriminator should separate the fixed fakes from the reals
    cfg = GanTrainConfig(epochs=20, lr_gen=0.0, lr_disc=0.05, batch_size=8, seed=5)
    losses = []
    train_qgan(
        tiny_reals(16),
        [(None, 20)],
        cfg,
        on_epoch=lambda name, epoch, d_loss, g_loss: losses.append(d_loss),
    )
    assert np.mean(losses[-3:]) < np.mean(losses[:3])


def test_profile_changes_updates(synth_profiles):
    cfg = GanTrainConfig(epochs=2, seed=23)
    gen_a, _ = train_qgan(tiny_reals(), [(synth_profiles["synth_a"], 2)], cfg)
    gen_b, _ = train_qgan(tiny_reals(), [(synth_profiles["synth_b"], 2)], cfg)
    # identical training except for the profile: parameters diverge
    assert not np.allclose(gen_a.theta, gen_b.theta)


def test_continue_training_from_existing_model(synth_profiles):
    cfg = GanTrainConfig(epochs=1, seed=2)
    gen, disc = train_qgan(tiny_reals(), [(synth_profiles["synth_a"], 1)], cfg)
    before = gen.theta.copy()
    gen2, _ = train_qgan(
        tiny_reals(), [(synth_profiles["synth_b"], 1)], cfg, generator=gen, discriminator=disc
    )
    assert np.array_equal(gen.theta, before)  # original untouched
    assert gen2.schedule == [("synth_a", 1), ("synth_b", 1)]


def test_empty_inputs_rejected(synth_profiles):
    cfg = GanTrainConfig(epochs=1)
    with pytest.raises(QganmarkError):
        train_qgan(np.empty((0, 64)), [(synth_profiles["synth_a"], 1)], cfg)
    with pytest.raises(QganmarkError):
        train_qgan(tiny_reals(), [], cfg)


def test_config_validation():
    with pytest.raises(QganmarkError):
        GanTrainConfig(epochs=-1)
    with pytest.raises(QganmarkError):
        GanTrainConfig(batch_size=0)
