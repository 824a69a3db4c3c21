"""Unit tests for channel algebra and the named channels."""
import numpy as np
import pytest

from quantum.channels import (
    ChannelEnsemble,
    EnsembleEntry,
    QuantumChannel,
    action_deviation,
    apply,
    choi_of,
    compose,
    dad,
    dephasing,
    dephrasure,
    embed_output,
    erasure,
    erasure_flag,
    from_choi,
    identity,
    mixture,
    pipeline,
    replacer0,
    tensor_channels,
)
from quantum.opcore import DensityMatrix, DimensionMismatch, bell_state, max_norm, partial_trace


def test_identity_choi_is_bell_state():
    np.testing.assert_allclose(choi_of(identity(2)).mat, bell_state(2).mat, atol=1e-15)


@pytest.mark.parametrize("q", [0.0, 0.1, 0.5])
def test_dephasing_choi(q):
    choi = dephasing(q).choi.mat
    assert choi[0, 3] == pytest.approx((1 - 2 * q) / 2)
    assert np.trace(choi).real == pytest.approx(1.0)


def test_choi_kraus_round_trip(random_ensemble):
    ch = mixture(random_ensemble(3))
    rebuilt = from_choi(ch.choi)
    assert action_deviation(ch, rebuilt) < 1e-12
    assert len(rebuilt.kraus) <= 4


def test_non_trace_preserving_kraus_rejected():
    with pytest.raises(ValueError, match="trace preserving"):
        QuantumChannel([0.5 * np.eye(2)], 2, 2)


def test_kraus_shape_checked():
    with pytest.raises(DimensionMismatch):
        QuantumChannel([np.eye(3)], 2, 2)


def test_apply_dimension_mismatch(random_state):
    with pytest.raises(DimensionMismatch):
        apply(identity(2), random_state(3))


def test_mixture_is_linear(random_ensemble, random_state):
    ens = random_ensemble(4)
    rho = random_state(2)
    mixed = apply(mixture(ens), rho).mat
    expected = sum(p * apply(ch, rho).mat for p, ch in zip(ens.probabilities, ens.channels))
    np.testing.assert_allclose(mixed, expected, atol=1e-10)


def test_mixture_choi_is_average_of_chois(random_ensemble):
    ens = random_ensemble(3)
    expected = sum(p * ch.choi.mat for p, ch in zip(ens.probabilities, ens.channels))
    assert max_norm(mixture(ens).choi.mat - expected) <= 1e-12


def test_mixture_of_single_channel():
    ch = dephasing(0.3)
    assert action_deviation(mixture(ChannelEnsemble([EnsembleEntry(1.0, ch)])), ch) < 1e-15


def test_equal_mixture_of_identity_and_full_dephasing():
    ens = ChannelEnsemble([EnsembleEntry(0.5, identity(2)), EnsembleEntry(0.5, dephasing(0.5))])
    assert action_deviation(mixture(ens), dephasing(0.25)) < 1e-12


def test_empty_mixture_rejected():
    with pytest.raises(ValueError):
        mixture(ChannelEnsemble())


def test_ensemble_probabilities_validated():
    with pytest.raises(ValueError, match="sum"):
        ChannelEnsemble([EnsembleEntry(0.5, identity(2)), EnsembleEntry(0.4, dephasing(0.1))])
    with pytest.raises(DimensionMismatch):
        ChannelEnsemble([EnsembleEntry(0.5, identity(2)), EnsembleEntry(0.5, identity(3))])


@pytest.mark.parametrize("p", [0.0, 0.3, 1.0])
@pytest.mark.parametrize("q", [0.0, 0.2, 0.5])
def test_dephrasure_is_erasure_after_dephasing(p, q):
    assert action_deviation(dephrasure(p, q), compose(erasure(2, p), dephasing(q))) < 1e-14
    assert action_deviation(dephrasure(p, q), pipeline(dephasing(q), p)) < 1e-14


def test_dephrasure_choi_entries():
    p, q = 0.2, 0.1
    choi = dephrasure(p, q).choi.mat
    assert choi[0, 4] == pytest.approx((1 - p) * (1 - 2 * q) / 2)
    assert choi[2, 2] == pytest.approx(p / 2)
    assert choi[5, 5] == pytest.approx(p / 2)


@pytest.mark.parametrize("p", [0.0, 0.3, 1.0])
def test_dad_action(p):
    rho = np.diag([0.0, 1.0])
    out = apply(dad(p), DensityMatrix.from_matrix(rho)).mat
    np.testing.assert_allclose(out, np.diag([p, 1 - p]), atol=1e-15)


def test_replacer0_and_erasure_flag(random_state):
    rho = random_state(2)
    np.testing.assert_allclose(apply(replacer0(), rho).mat, np.diag([1.0, 0.0]), atol=1e-14)
    np.testing.assert_allclose(apply(erasure_flag(2), rho).mat, np.diag([0.0, 0.0, 1.0]), atol=1e-14)


def test_embed_output_pads_with_zeros(random_state):
    rho = random_state(2)
    out = apply(embed_output(dephasing(0.2), 3), rho).mat
    np.testing.assert_allclose(out[:2, :2], apply(dephasing(0.2), rho).mat, atol=1e-14)
    assert np.all(out[2] == 0)


def test_compose_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        compose(identity(2), erasure(2, 0.1))


def test_tensor_channels_cptp():
    ch = tensor_channels(dephasing(0.1), erasure(2, 0.3))
    assert (ch.d_in, ch.d_out) == (4, 6)
    assert np.linalg.eigvalsh(ch.choi.mat)[0] >= -1e-12
    np.testing.assert_allclose(partial_trace(ch.choi, {"A"}).mat, np.eye(4) / 4, atol=1e-12)


def test_probability_checked():
    with pytest.raises(ValueError):
        dephasing(1.5)
