import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qganmark.errors import ChannelError, ProfileError
from qganmark.sim import (
    KrausChannel,
    apply_kraus,
    apply_readout_error,
    apply_unitary,
    bit_flip_channel,
    build_density,
    readout_confusion,
    ry,
    thermal_relaxation_channel,
)

COMPLETENESS_TOL = 1e-12


def completeness_defect(ch: KrausChannel) -> float:
    total = sum(k.conj().T @ k for k in ch.operators)
    return float(np.max(np.abs(total - np.eye(2))))


def test_bit_flip_zero_is_identity():
    ch = bit_flip_channel(0.0)
    assert len(ch.operators) == 1
    assert np.allclose(ch.operators[0], np.eye(2))


def test_bit_flip_one_flips():
    rho = apply_kraus(build_density(1), bit_flip_channel(1.0))
    assert np.allclose(np.diag(rho.data).real, [0.0, 1.0])


def test_bit_flip_athens_rate(athens):
    # Pauli-X rate of the athens calibration applied to the ground state
    p = athens.paulix_err
    assert p == 4.82e-04
    rho = apply_kraus(build_density(1), bit_flip_channel(p))
    assert np.allclose(np.diag(rho.data).real, [1 - p, p], atol=1e-15)


def test_bit_flip_rejects_bad_probability():
    with pytest.raises(ChannelError):
        bit_flip_channel(-0.1)
    with pytest.raises(ChannelError):
        bit_flip_channel(1.1)


@given(st.floats(0.0, 1.0))
def test_bit_flip_completeness(p):
    assert completeness_defect(bit_flip_channel(p)) < COMPLETENESS_TOL


def test_thermal_zero_duration_is_identity():
    ch = thermal_relaxation_channel(50.0, 70.0, 0.0)
    rho0 = apply_unitary(build_density(1), ry(0, 1.1))
    rho1 = apply_kraus(rho0, ch)
    assert np.allclose(rho1.data, rho0.data)


def test_thermal_half_life_decay():
    # t = T1 ln 2 halves the excited population
    t1 = 10.0
    duration_ns = t1 * np.log(2) * 1e3
    ch = thermal_relaxation_channel(t1, t1, duration_ns)
    excited = apply_unitary(build_density(1), ry(0, np.pi))
    rho = apply_kraus(excited, ch)
    assert np.allclose(np.diag(rho.data).real, [0.5, 0.5], atol=1e-12)


def test_thermal_off_diagonal_decays_with_t2():
    t1, t2, dur_ns = 30.0, 17.0, 4200.0
    ch = thermal_relaxation_channel(t1, t2, dur_ns)
    plus = apply_unitary(build_density(1), ry(0, np.pi / 2))
    rho = apply_kraus(plus, ch)
    expected = 0.5 * np.exp(-(dur_ns * 1e-3) / t2)
    assert rho.data[0, 1].real == pytest.approx(expected, abs=1e-12)


def test_thermal_rejects_invalid_profile():
    with pytest.raises(ProfileError):
        thermal_relaxation_channel(10.0, 21.0, 5.0)
    with pytest.raises(ProfileError):
        thermal_relaxation_channel(10.0, 10.0, -1.0)


@settings(max_examples=60)
@given(
    st.floats(1.0, 500.0),
    st.floats(0.01, 2.0),
    st.floats(0.0, 5000.0),
)
def test_thermal_completeness(t1, t2_ratio, dur):
    ch = thermal_relaxation_channel(t1, t1 * t2_ratio, dur)
    assert completeness_defect(ch) < COMPLETENESS_TOL


def test_kraus_channel_rejects_incomplete_operators():
    with pytest.raises(ChannelError):
        KrausChannel((np.eye(2) * 0.5,))


def test_readout_zero_identity():
    p = np.array([0.3, 0.2, 0.4, 0.1])

    class P:
        readout_err = 0.0

    assert np.array_equal(apply_readout_error(p, P()), p)


def test_readout_single_qubit():
    class P:
        readout_err = 0.1

    assert np.allclose(apply_readout_error(np.array([1.0, 0.0]), P()), [0.9, 0.1])


def test_readout_athens_two_qubit_product(athens):
    r = athens.readout_err
    assert r == 0.017
    e0 = np.array([1.0, 0.0, 0.0, 0.0])
    got = apply_readout_error(e0, athens)
    expected = [(1 - r) ** 2, (1 - r) * r, r * (1 - r), r ** 2]
    assert np.allclose(got, expected, atol=1e-15)


@settings(max_examples=40)
@given(st.floats(0.0, 0.5), st.integers(1, 4), st.integers(0, 2 ** 31 - 1))
def test_readout_preserves_normalization(r, n, seed):
    rng = np.random.default_rng(seed)
    p = rng.random(2 ** n)
    p /= p.sum()

    class P:
        readout_err = r

    q = apply_readout_error(p, P())
    assert abs(q.sum() - 1.0) < 1e-10
    assert q.min() >= 0


def test_readout_confusion_rejects_bad_rate():
    with pytest.raises(ChannelError):
        readout_confusion(1.5)
