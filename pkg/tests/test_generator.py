import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qganmark.errors import DegenerateStateError, QganmarkError
from qganmark.qgan import (
    GeneratorModel,
    assemble_image,
    disassemble_image,
    embed_latent,
    generate_image_batch,
    generate_images,
    generator_forward,
    init_generator,
    normalize_patch,
    postselect_ancilla,
    subgen_circuit,
    subgenerator_forward,
)
from qganmark.sim import CircuitSpec, gate_unitary, run_circuit

from conftest import random_ry_cz_circuit


def statevector(circuit: CircuitSpec) -> np.ndarray:
    psi = np.zeros(2 ** circuit.n_qubits, dtype=complex)
    psi[0] = 1.0
    for gate in circuit.ops:
        psi = gate_unitary(gate, circuit.n_qubits) @ psi
    return psi


# --- embedding -------------------------------------------------------------

def test_embed_zero_vector_is_identity_prefix():
    p = run_circuit(embed_latent(np.zeros(4)))
    assert p[0] == 1.0


def test_embed_half_pi_gives_uniform_superposition():
    p = run_circuit(embed_latent(np.full(3, np.pi / 2)))
    assert np.allclose(p, np.full(8, 1 / 8), atol=1e-14)


def test_embed_rejects_bad_latents():
    with pytest.raises(QganmarkError):
        embed_latent(np.array([[0.1, 0.2]]))
    with pytest.raises(QganmarkError):
        embed_latent(np.array([0.1, np.nan]))


def test_zero_parameter_layers_keep_embedding_distribution():
    # CZ is diagonal and RY(0) is the identity, so a zero-parameter stack
    # cannot move the noiseless distribution away from the embedding's
    z = np.array([0.3, 1.1, 0.7, 0.2, 1.4])
    embed_only = run_circuit(embed_latent(z))
    stacked = subgenerator_forward(np.zeros((3, 5)), z)
    assert np.max(np.abs(stacked - embed_only)) < 1e-12


# --- sub-generator parameter budget -----------------------------------------

def test_subgen_circuit_gate_count():
    z = np.zeros(5)
    circuit = subgen_circuit(np.zeros((5, 5)), z)
    ry_gates = [g for g in circuit.ops if g.name == "ry"]
    cz_gates = [g for g in circuit.ops if g.name == "cz"]
    assert len(ry_gates) == 5 + 25  # embedding + 5 layers of 5 parameters
    assert len(cz_gates) == 5 * 4


def test_default_model_has_hundred_parameters():
    model = init_generator()
    assert model.n_params == 100
    assert model.theta.shape == (4, 5, 5)


def test_depth_zero_forward_is_embedding_only():
    z = np.array([0.4, 0.9, 0.1, 1.3, 0.6])
    assert np.allclose(subgenerator_forward(np.zeros((0, 5)), z), run_circuit(embed_latent(z)))


# --- post-selection ----------------------------------------------------------

def test_postselect_unentangled_ancilla_keeps_marginal():
    # data qubit rotated, ancilla left in |0>: marginal must be unchanged
    z = np.array([1.2, 0.0])
    p = run_circuit(embed_latent(z))
    g = postselect_ancilla(p, 1)
    expected = run_circuit(embed_latent(np.array([1.2])))
    assert np.allclose(g, expected, atol=1e-14)


def test_postselect_uniform_two_qubits():
    g = postselect_ancilla(np.full(4, 0.25), 1)
    assert np.allclose(g, [0.5, 0.5])


def test_postselect_matches_projector_oracle():
    rng = np.random.default_rng(99)
    for n in (3, 4, 5):
        for _ in range(8):
            circuit = CircuitSpec(n, random_ry_cz_circuit(rng, n, 3))
            psi = statevector(circuit)
            rho = np.outer(psi, psi.conj())
            # projector |0><0| on the ancilla (last tensor factor)
            proj = np.kron(np.eye(2 ** (n - 1)), np.diag([1.0, 0.0]))
            projected = proj @ rho @ proj
            denom = np.real(np.trace(proj @ rho))
            # partial trace over the ancilla, then the diagonal
            dim = 2 ** (n - 1)
            reduced = projected.reshape(dim, 2, dim, 2)
            rho_data = reduced[:, 0, :, 0] + reduced[:, 1, :, 1]
            oracle = np.real(np.diag(rho_data)) / denom

            got = postselect_ancilla(np.abs(psi) ** 2, 1)
            assert np.max(np.abs(got - oracle)) < 1e-12


def test_postselect_degenerate_branch():
    p = np.array([0.0, 1.0])
    with pytest.raises(DegenerateStateError):
        postselect_ancilla(p, 1)


# --- patch normalization ------------------------------------------------------

def test_normalize_patch_example():
    assert np.allclose(normalize_patch([0.2, 0.4, 0.1, 0.3]), [0.5, 1.0, 0.25, 0.75])


def test_normalize_uniform_gives_all_ones():
    assert np.array_equal(normalize_patch(np.full(8, 0.125)), np.ones(8))


@settings(max_examples=50)
@given(st.integers(0, 2 ** 31 - 1))
def test_normalize_matches_elementwise_division(seed):
    g = np.random.default_rng(seed).random(16) + 1e-6
    got = normalize_patch(g)
    peak = max(range(16), key=lambda i: g[i])
    for j in range(16):
        assert got[j] == g[j] / g[peak]
    assert got.max() == 1.0


def test_normalize_rejects_zero_patch():
    with pytest.raises(DegenerateStateError):
        normalize_patch(np.zeros(4))


# --- assembly -----------------------------------------------------------------

def test_assemble_four_patches():
    patches = [np.full(16, i / 4) for i in range(1, 5)]
    img = assemble_image(patches)
    assert img.shape == (8, 8)
    # patch i fills rows 2i and 2i+1
    for i in range(4):
        assert np.all(img[2 * i : 2 * i + 2] == (i + 1) / 4)


def test_assemble_all_ones():
    assert np.array_equal(assemble_image([np.ones(32), np.ones(32)]), np.ones((8, 8)))


def test_disassemble_round_trip():
    rng = np.random.default_rng(1)
    patches = [rng.random(16) for _ in range(4)]
    back = disassemble_image(assemble_image(patches), 4)
    for a, b in zip(patches, back):
        assert np.array_equal(a, b)


def test_assemble_size_mismatch():
    with pytest.raises(QganmarkError):
        assemble_image([np.ones(16)] * 3)


# --- full forward ---------------------------------------------------------------

def test_generator_forward_deterministic(suite):
    model = init_generator(seed=4)
    z = np.linspace(0.1, 1.2, 5)
    a = generator_forward(model, z, suite["ibm_athens"])
    b = generator_forward(model, z, suite["ibm_athens"])
    assert np.array_equal(a, b)
    assert a.shape == (8, 8)
    assert a.min() >= 0.0 and a.max() <= 1.0


def test_generator_forward_zero_depth():
    model = GeneratorModel(4, 5, 1, 0, np.zeros((4, 0, 5)))
    img = generator_forward(model, np.full(5, 0.8))
    assert img.shape == (8, 8)
    # all sub-generators share the latent, so all bands repeat
    assert np.allclose(img[0:2], img[2:4])


def test_generator_batch_agrees_with_single(suite):
    model = init_generator(seed=10)
    rng = np.random.default_rng(2)
    latents = rng.uniform(0, np.pi / 2, (3, 5))
    batch = generate_image_batch(model, latents, suite["ibm_kolkata"])
    for i in range(3):
        single = generator_forward(model, latents[i], suite["ibm_kolkata"])
        assert np.max(np.abs(batch[i].reshape(8, 8) - single)) < 1e-12


def test_model_invariants():
    with pytest.raises(QganmarkError):
        GeneratorModel(3, 5, 1, 5, np.zeros((3, 5, 5)))  # 3 * 16 != 64
    with pytest.raises(QganmarkError):
        GeneratorModel(4, 5, 1, 5, np.full((4, 5, 5), np.inf))


# --- labeled generation -----------------------------------------------------------

def test_generate_images_reproducible(suite):
    model = init_generator(seed=3)
    a = generate_images(model, suite["ibm_athens"], 1, seed=5)
    b = generate_images(model, suite["ibm_athens"], 1, seed=5)
    assert np.array_equal(a.pixels, b.pixels)
    assert a.infer_labels == ["ibm_athens"]
    assert a.seeds == [5]


def test_generate_images_distinct_seeds_distinct_latents():
    model = init_generator(seed=3)
    a = generate_images(model, None, 2, seed=1)
    b = generate_images(model, None, 2, seed=2)
    assert not np.array_equal(a.pixels, b.pixels)


def test_generate_images_labels_record_schedule():
    model = init_generator(seed=0)
    model.schedule = [("ibm_athens", 100), ("ibm_jakarta", 50)]
    out = generate_images(model, None, 3, seed=0)
    assert out.train_labels == ["ibm_athens+ibm_jakarta"] * 3
    assert out.infer_labels == ["noiseless"] * 3
