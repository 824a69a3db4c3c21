"""Teleportation, Weyl corrections and covariance search."""
import numpy as np
import pytest

from quantum.channels import (
    ChannelEnsemble,
    EnsembleEntry,
    QuantumChannel,
    apply_map,
    dephasing,
    erasure,
    erasure_flag,
    identity,
    mixture,
    operator_basis,
    pauli,
    replacer0,
)
from quantum.condsim import dad_ensemble, dephrasure_ensemble, pauli_ensemble, pipeline_ensemble
from quantum.opcore import DimensionMismatch, bell_state, max_norm
from quantum.telecov import (
    CorrectionTable,
    MissingCorrection,
    NotCovariant,
    WeylGroup,
    covariance_table,
    joint_covariance,
    shared_correction_table,
    standard_table,
    teleport,
    teleport_map,
)


def _teleport_deviation(ch, table):
    return max(max_norm(teleport_map(ch.choi.mat, e, table) - apply_map(ch, e)) for e in operator_basis(ch.d_in))


@pytest.mark.parametrize("d", [2, 3])
def test_weyl_operators_are_unitary_and_complete(d):
    group = WeylGroup(d)
    assert len(group) == d * d
    for u in group.operators.values():
        np.testing.assert_allclose(u @ u.conj().T, np.eye(d), atol=1e-14)
    # Hilbert-Schmidt orthogonality
    gram = np.array([[np.trace(a.conj().T @ b) for b in group.operators.values()] for a in group.operators.values()])
    np.testing.assert_allclose(gram, d * np.eye(d * d), atol=1e-12)


def test_qubit_weyl_order():
    ops = list(WeylGroup(2).operators.values())
    np.testing.assert_allclose(ops[0], np.eye(2))
    np.testing.assert_allclose(ops[1], np.diag([1, -1]), atol=1e-15)
    np.testing.assert_allclose(ops[2], [[0, 1], [1, 0]])


@pytest.mark.parametrize("d", [2, 3])
def test_ideal_teleportation_is_identity(d, random_state):
    rho = random_state(d)
    out = teleport(bell_state(d), rho, standard_table(WeylGroup(d)))
    np.testing.assert_allclose(out.mat, rho.mat, atol=1e-12)


def test_teleport_dimension_mismatch(random_state):
    with pytest.raises(DimensionMismatch):
        teleport(bell_state(2), random_state(3), standard_table(WeylGroup(2)))


def test_missing_correction():
    table = CorrectionTable({(0, 0): np.eye(2)}, 2, 2)
    with pytest.raises(MissingCorrection):
        table[(1, 1)]
    with pytest.raises(MissingCorrection):
        teleport_map(bell_state(2).mat, np.eye(2) / 2, table)


def test_correction_table_rejects_non_unitary():
    with pytest.raises(ValueError):
        CorrectionTable({(0, 0): 2 * np.eye(2)}, 2, 2)


@pytest.mark.parametrize(
    "ch",
    [identity(2), dephasing(0.0), dephasing(0.1), dephasing(0.5), replacer0(), erasure_flag(2), erasure(2, 0.3)],
    ids=lambda ch: ch.name,
)
def test_covariant_channels_teleport_over_choi(ch):
    table = covariance_table(ch, WeylGroup(2))
    assert isinstance(table, CorrectionTable)
    assert _teleport_deviation(ch, table) <= 1e-9


def test_dephasing_table_is_standard():
    table = covariance_table(dephasing(0.2), WeylGroup(2))
    assert table.agrees_with(standard_table(WeylGroup(2)))


def test_amplitude_damping_is_not_covariant():
    gamma = 0.3
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]])
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]])
    result = covariance_table(QuantumChannel([k0, k1], 2, 2, "amplitude-damping"), WeylGroup(2))
    assert isinstance(result, NotCovariant)


def test_covariance_table_dimension_check():
    with pytest.raises(DimensionMismatch):
        covariance_table(identity(3), WeylGroup(2))


def _averaged_deviation(ens, table):
    program = sum(p * ch.choi.mat for p, ch in zip(ens.probabilities, ens.channels))
    average = mixture(ens)
    return max(max_norm(teleport_map(program, e, table) - apply_map(average, e)) for e in operator_basis(ens.d_in))


def test_dad_is_not_jointly_covariant():
    group = WeylGroup(2)
    assert not joint_covariance(dad_ensemble(0.3), group)
    result = shared_correction_table(dad_ensemble(0.3), group)
    assert isinstance(result, NotCovariant)
    assert result.index == (1, 0)


def test_identical_components_are_jointly_covariant():
    ens = ChannelEnsemble((EnsembleEntry(0.5, identity(2)), EnsembleEntry(0.5, identity(2))))
    assert joint_covariance(ens, WeylGroup(2))


def test_replacer_and_depolarizing_share_a_table():
    ens = ChannelEnsemble((EnsembleEntry(0.4, replacer0()), EnsembleEntry(0.6, pauli(0.25, 0.25, 0.25, 0.25))))
    table = shared_correction_table(ens, WeylGroup(2))
    assert isinstance(table, CorrectionTable)
    np.testing.assert_allclose(table[(1, 0)], np.eye(2), atol=1e-12)
    for ch in ens.channels:
        assert _teleport_deviation(ch, table) <= 1e-9
    assert _averaged_deviation(ens, table) <= 1e-9


@pytest.mark.parametrize(
    "ens",
    [dephrasure_ensemble(0.2, 0.1), pipeline_ensemble(identity(2), 0.3)],
    ids=["dephrasure", "pipeline"],
)
def test_flagged_ensembles_share_the_flag_identity_table(ens):
    group = WeylGroup(2)
    table = shared_correction_table(ens, group)
    assert joint_covariance(ens, group)
    for index, u in group.operators.items():
        overlap = abs(np.trace(table[index][:2, :2].conj().T @ u))
        assert overlap == pytest.approx(2, abs=1e-9)
        assert abs(table[index][2, 2]) == pytest.approx(1, abs=1e-12)
    assert _averaged_deviation(ens, table) <= 1e-9


def test_shared_table_dimension_check():
    with pytest.raises(DimensionMismatch):
        shared_correction_table(dad_ensemble(0.3), WeylGroup(3))


def test_jointly_covariant_pauli_ensemble_needs_one_teleportation():
    ens = pauli_ensemble([0.3, 0.7], [[0.9, 0.1, 0.0, 0.0], [0.6, 0.0, 0.2, 0.2]])
    group = WeylGroup(2)
    assert joint_covariance(ens, group)
    average = mixture(ens)
    program = sum(p * ch.choi.mat for p, ch in zip(ens.probabilities, ens.channels))
    table = standard_table(group)
    deviation = max(max_norm(teleport_map(program, e, table) - apply_map(average, e)) for e in operator_basis(2))
    assert deviation <= 1e-9


def test_pauli_channel_teleports_with_standard_table():
    ch = pauli(0.7, 0.1, 0.1, 0.1)
    assert _teleport_deviation(ch, standard_table(WeylGroup(2))) <= 1e-12
