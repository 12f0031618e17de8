import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qganmark.errors import QganmarkError
from qganmark.qgan import DiscriminatorModel, discriminator_forward, init_discriminator
from qganmark.qgan.discriminator import backward_batch, forward_batch


def zero_discriminator() -> DiscriminatorModel:
    return DiscriminatorModel(
        w1=np.zeros((64, 64)), b1=np.zeros(64),
        w2=np.zeros((16, 64)), b2=np.zeros(16),
        w3=np.zeros((1, 16)), b3=np.zeros(1),
    )


def test_zero_weights_give_half():
    img = np.random.default_rng(0).random((8, 8))
    assert discriminator_forward(zero_discriminator(), img) == 0.5


@settings(max_examples=30)
@given(st.integers(0, 2 ** 31 - 1))
def test_output_strictly_inside_unit_interval(seed):
    rng = np.random.default_rng(seed)
    model = init_discriminator(seed=seed)
    pred = discriminator_forward(model, rng.random((8, 8)))
    assert 0.0 < pred < 1.0


def test_matches_hand_rolled_matrix_oracle():
    model = init_discriminator(seed=42)
    x = np.linspace(0, 1, 64)

    h1 = np.maximum(model.w1 @ x + model.b1, 0.0)
    h2 = np.maximum(model.w2 @ h1 + model.b2, 0.0)
    logit = float(model.w3 @ h2 + model.b3)
    expected = 1.0 / (1.0 + np.exp(-logit))

    assert discriminator_forward(model, x.reshape(8, 8)) == pytest.approx(expected, abs=1e-14)


def test_backward_matches_finite_differences():
    rng = np.random.default_rng(7)
    model = init_discriminator(seed=7)
    x = rng.random((3, 64))
    dlogits = rng.standard_normal(3)

    grads, dx = backward_batch(model, forward_batch(model, x)[1], dlogits)

    def objective(m: DiscriminatorModel) -> float:
        xx = x
        a1 = xx @ m.w1.T + m.b1
        h1 = np.maximum(a1, 0)
        h2 = np.maximum(h1 @ m.w2.T + m.b2, 0)
        logits = (h2 @ m.w3.T + m.b3)[:, 0]
        return float(dlogits @ logits)

    h = 1e-6
    for name in ("w1", "b1", "w2", "b2", "w3", "b3"):
        arr = getattr(model, name)
        for fi in (0, arr.size // 2, arr.size - 1):
            idx = np.unravel_index(fi, arr.shape)
            m_plus = model.copy()
            getattr(m_plus, name)[idx] += h
            m_minus = model.copy()
            getattr(m_minus, name)[idx] -= h
            fd = (objective(m_plus) - objective(m_minus)) / (2 * h)
            assert grads[name][idx] == pytest.approx(fd, abs=1e-5)

    # input gradient, checked against perturbed forward passes
    def logits_of(xx):
        h1 = np.maximum(xx @ model.w1.T + model.b1, 0)
        h2 = np.maximum(h1 @ model.w2.T + model.b2, 0)
        return (h2 @ model.w3.T + model.b3)[:, 0]

    for i in (0, 2):
        for j in (0, 40):
            xp, xm = x.copy(), x.copy()
            xp[i, j] += h
            xm[i, j] -= h
            fd = float(dlogits @ (logits_of(xp) - logits_of(xm))) / (2 * h)
            assert dx[i, j] == pytest.approx(fd, abs=1e-5)


def test_shape_validation():
    with pytest.raises(QganmarkError):
        DiscriminatorModel(
            w1=np.zeros((32, 64)), b1=np.zeros(64),
            w2=np.zeros((16, 64)), b2=np.zeros(16),
            w3=np.zeros((1, 16)), b3=np.zeros(1),
        )
