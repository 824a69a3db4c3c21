"""Conditional simulation, REE chain, finite-size and memory bounds."""
import numpy as np
import pytest

from quantum.channels import (
    ChannelEnsemble,
    EnsembleEntry,
    action_deviation,
    apply,
    dad,
    dephasing,
    dephrasure,
    identity,
    mixture,
    operator_basis,
)
from quantum.condsim import (
    ChainViolation,
    FiniteSizeParams,
    MissingDescriptor,
    SimulationDescriptor,
    asymptotic_bound,
    build_control_program,
    build_memory_control_program,
    conditional_apply,
    conditional_channel,
    conditional_map,
    dad_ensemble,
    dephrasure_ensemble,
    descriptor_deviation,
    discard_program_map,
    finite_size_bound,
    joint_descriptor,
    memory_ree_bound,
    pipeline_ensemble,
    random_pauli_ensemble,
    ree_chain_bound,
    verify_simulation,
)
from quantum.entro import h2, ree_ppt
from quantum.opcore import DensityMatrix, DimensionMismatch, bell_state, max_norm, partial_trace


def _descriptors(ens):
    return [e.sim for e in ens.entries]


def test_dad_simulation_on_excited_state():
    ens = dad_ensemble(0.3)
    theta = build_control_program(ens)
    rho = DensityMatrix.from_matrix(np.diag([0.0, 1.0]))
    out = conditional_apply(theta, _descriptors(ens), rho)
    np.testing.assert_allclose(out.mat, np.diag([0.3, 0.7]), atol=1e-12)


@pytest.mark.parametrize("p", np.linspace(0, 1, 6))
def test_dad_conditional_channel_matches_mixture(p):
    ens = dad_ensemble(p)
    simulated = conditional_channel(build_control_program(ens), _descriptors(ens))
    assert max_norm(simulated.choi.mat - dad(p).choi.mat) <= 1e-9


@pytest.mark.parametrize("p", [0.0, 0.2, 0.7, 1.0])
@pytest.mark.parametrize("q", [0.0, 0.1, 0.5])
def test_dephrasure_simulation_matches_channel(p, q):
    ens = dephrasure_ensemble(p, q)
    assert verify_simulation(ens) <= 1e-9
    assert action_deviation(mixture(ens), dephrasure(p, q)) <= 1e-12


def test_pipeline_ensemble_simulation():
    assert verify_simulation(pipeline_ensemble(dephasing(0.15), 0.4)) <= 1e-9


def test_random_pauli_ensemble_simulation(random_ensemble):
    assert verify_simulation(random_ensemble(5)) <= 1e-9


def test_control_program_blocks_are_orthogonal():
    ens = dephrasure_ensemble(0.2, 0.1)
    theta = build_control_program(ens)
    d = theta.program_dim
    mat = theta.realized.mat
    assert theta.realized.sig.labels[0] == "C"
    assert theta.realized.sig.dims[0] == 2
    assert max_norm(mat[:d, d:]) == 0.0
    for i, (p, program) in enumerate(theta.blocks):
        np.testing.assert_allclose(theta.block(i), p * program.mat, atol=1e-15)


def test_tracing_out_control_gives_average_program():
    ens = dad_ensemble(0.4)
    theta = build_control_program(ens)
    reduced = partial_trace(theta.realized, {"A", "B"})
    expected = sum(e.p * e.sim.program.mat for e in ens.entries)
    np.testing.assert_allclose(reduced.mat, expected, atol=1e-12)


def test_missing_descriptor():
    ens = ChannelEnsemble([EnsembleEntry(0.5, identity(2)), EnsembleEntry(0.5, dephasing(0.2))])
    with pytest.raises(MissingDescriptor):
        build_control_program(ens)
    with pytest.raises(MissingDescriptor):
        verify_simulation(ens)


def test_single_component_control_is_trivial():
    ens = dad_ensemble(1.0)
    theta = build_control_program(ens)
    assert len(theta.blocks) == 2
    assert max_norm(theta.block(1)) == 0.0
    ens = ChannelEnsemble([EnsembleEntry(1.0, identity(2), dad_ensemble(0.0).entries[1].sim)])
    theta = build_control_program(ens)
    assert theta.realized.sig.dims[0] == 1
    np.testing.assert_allclose(theta.realized.mat, bell_state(2).mat, atol=1e-15)


def test_descriptor_count_checked():
    ens = dad_ensemble(0.5)
    with pytest.raises(ValueError):
        conditional_map(build_control_program(ens), _descriptors(ens)[:1], np.eye(2))


def test_conditional_apply_dimension_check(random_state):
    ens = dad_ensemble(0.5)
    with pytest.raises(DimensionMismatch):
        conditional_apply(build_control_program(ens), _descriptors(ens), random_state(3))


def test_discard_program_map_is_generic_simulation(random_state):
    ch = dephasing(0.3)
    program = random_state(2)
    descriptor = SimulationDescriptor(program, discard_program_map(2, ch))
    assert descriptor_deviation(ch, descriptor) <= 1e-12
    rho = random_state(2)
    np.testing.assert_allclose(descriptor.simulate(rho.mat), apply(ch, rho).mat, atol=1e-12)


def test_generic_and_teleportation_descriptors_mix():
    ens = dad_ensemble(0.25)
    generic = SimulationDescriptor(bell_state(2), discard_program_map(4, identity(2)))
    mixed = ChannelEnsemble(
        [EnsembleEntry(0.25, ens.entries[0].channel, ens.entries[0].sim), EnsembleEntry(0.75, identity(2), generic)]
    )
    assert verify_simulation(mixed) <= 1e-12
    assert all(max_norm(generic.simulate(e) - e) <= 1e-12 for e in operator_basis(2))


@pytest.mark.parametrize("p", [0.0, 0.3, 0.8])
def test_dad_chain_bound(p):
    bound = ree_chain_bound(build_control_program(dad_ensemble(p)))
    assert bound.sum_bound == pytest.approx(1 - p, abs=1e-6)
    assert bound.e_theta <= bound.sum_bound + 1e-6
    assert bound.e_theta == pytest.approx(1 - p, abs=1e-5)


def test_dephrasure_chain_bound():
    p, q = 0.2, 0.1
    bound = ree_chain_bound(build_control_program(dephrasure_ensemble(p, q)))
    assert bound.sum_bound == pytest.approx((1 - p) * (1 - h2(q)), abs=1e-5)
    assert bound.e_theta <= bound.sum_bound + 1e-4


def test_chain_violation_raised():
    theta = build_control_program(dad_ensemble(0.5))
    calls = iter([5.0, 0.0, 0.0])
    with pytest.raises(ChainViolation):
        ree_chain_bound(theta, ree_oracle=lambda rho: next(calls))


def test_chain_violation_carries_both_sides():
    theta = build_control_program(dad_ensemble(0.5))
    calls = iter([5.0, 0.0, 0.0])
    with pytest.raises(ChainViolation) as err:
        ree_chain_bound(theta, ree_oracle=lambda rho: next(calls))
    assert err.value.e_theta == 5.0
    assert err.value.sum_bound == 0.0


def test_chain_holds_on_random_pauli_ensembles():
    rng = np.random.default_rng(7)
    for _ in range(20):
        theta = build_control_program(random_pauli_ensemble(2, rng))
        bound = ree_chain_bound(theta, lambda rho: ree_ppt(rho, tol=1e-4).value, tol=1e-3)
        assert bound.e_theta <= bound.sum_bound + 1e-3


def test_joint_descriptor_reproduces_dephrasure():
    ens = dephrasure_ensemble(0.2, 0.1)
    assert descriptor_deviation(mixture(ens), joint_descriptor(ens)) <= 1e-9


def test_joint_descriptor_rejects_dad():
    with pytest.raises(ValueError, match="jointly"):
        joint_descriptor(dad_ensemble(0.3))


class TestFiniteSize:
    def test_worked_example(self):
        params = FiniteSizeParams(n=1000, eps=0.01)
        expected = 0.7 / 0.96 + 2 * h2(0.01) / (0.96 * 1000)
        assert finite_size_bound(params, 0.7) == pytest.approx(expected, rel=1e-12)
        assert finite_size_bound(params, 0.7) == pytest.approx(0.7293, abs=1e-3)

    def test_monotone_in_n(self):
        values = [finite_size_bound(FiniteSizeParams(n=10 ** k, eps=0.01), 0.7) for k in range(2, 7)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_converges_to_asymptotic_bound(self):
        params = FiniteSizeParams(n=10 ** 9, eps=0.01)
        assert abs(finite_size_bound(params, 0.7) - asymptotic_bound(params, 0.7)) <= 1e-6

    def test_alpha_scales_denominator(self):
        params = FiniteSizeParams(n=10 ** 9, eps=0.01, alpha=2.0)
        assert asymptotic_bound(params, 0.7) == pytest.approx(0.7 / 0.92)

    @pytest.mark.parametrize(
        "kwargs",
        [dict(n=0, eps=0.01), dict(n=10, eps=0.0), dict(n=10, eps=0.25), dict(n=10, eps=0.2, alpha=2.0), dict(n=10, eps=0.01, alpha=0.5)],
    )
    def test_invalid_parameters(self, kwargs):
        with pytest.raises(ValueError):
            FiniteSizeParams(**kwargs)


class TestMemory:
    def test_correlated_dad_pair(self):
        mem = [dad_ensemble(0.5), dad_ensemble(0.5)]
        joint = np.array([[0.5, 0.0], [0.0, 0.5]])
        assert memory_ree_bound(mem, joint, component_rees=[[0.0, 1.0]] * 2) == 1.0

    def test_product_distribution_is_sum_of_marginals(self):
        p1, p2 = 0.3, 0.6
        mem = [dad_ensemble(p1), dad_ensemble(p2)]
        joint = np.outer([p1, 1 - p1], [p2, 1 - p2])
        bound = memory_ree_bound(mem, joint, component_rees=[[0.0, 1.0]] * 2)
        assert abs(bound - ((1 - p1) + (1 - p2))) <= 1e-12

    def test_default_oracle_on_components(self):
        mem = [dad_ensemble(0.5), dad_ensemble(0.5)]
        joint = np.array([[0.5, 0.0], [0.0, 0.5]])
        assert memory_ree_bound(mem, joint) == pytest.approx(1.0, abs=1e-6)

    def test_control_program_layout(self):
        mem = [dad_ensemble(0.5), dad_ensemble(0.2)]
        joint = np.array([[0.1, 0.2], [0.3, 0.4]])
        theta = build_memory_control_program(mem, joint)
        assert theta.realized.sig.dims[0] == 4
        assert theta.program_dim == 16
        first = np.kron(mem[0].entries[1].sim.program.mat, mem[1].entries[0].sim.program.mat)
        np.testing.assert_allclose(theta.block(2), 0.3 * first, atol=1e-15)

    def test_joint_table_checked(self):
        mem = [dad_ensemble(0.5), dad_ensemble(0.5)]
        with pytest.raises(DimensionMismatch):
            memory_ree_bound(mem, np.full(4, 0.25))
        with pytest.raises(ValueError):
            build_memory_control_program(mem, np.array([[0.5, 0.5], [0.5, 0.0]]))
