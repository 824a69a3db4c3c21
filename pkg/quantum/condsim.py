import itertools
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
import scipy.linalg
from loguru import logger

from .channels import (
    ChannelEnsemble,
    EnsembleEntry,
    QuantumChannel,
    apply_map,
    check_probability,
    dephasing,
    embed_output,
    erasure_flag,
    from_choi,
    identity,
    mixture,
    operator_basis,
    pauli,
    replacer0,
)
from .entro import h2, ree_ppt
from .opcore import (
    DensityMatrix,
    DimensionMismatch,
    SubsystemSignature,
    basis_vector,
    bipartition,
    max_norm,
    tensor_all,
)
from .telecov import (
    CorrectionTable,
    NotCovariant,
    WeylGroup,
    covariance_table,
    shared_correction_table,
    teleport_map,
)


class MissingDescriptor(ValueError):
    pass


class ChainViolation(RuntimeError):
    def __init__(self, e_theta, sum_bound):
        super().__init__("E_R(theta) = {:.6f} exceeds the component sum {:.6f}".format(e_theta, sum_bound))
        self.e_theta = e_theta
        self.sum_bound = sum_bound


@dataclass(frozen=True)
class Teleportation:
    table: CorrectionTable


@dataclass(frozen=True)
class GenericMap:
    """Arbitrary channel on program ⊗ target -> target."""

    channel: QuantumChannel


@dataclass(frozen=True, eq=False)
class SimulationDescriptor:
    """
    Program state plus the operation L with E(ρ) = L(σ_P ⊗ ρ).
    """

    program: DensityMatrix
    locc: Union[Teleportation, GenericMap]

    def simulate(self, x, program=None):
        """
        Apply the simulation to an operator on the target.

        Args:
            x (np.ndarray): Target operator.
            program (np.ndarray, optional): Program matrix, possibly sub-normalized;
                defaults to the descriptor's own program.

        Returns:
            np.ndarray: Simulated channel output.
        """
        program = self.program.mat if program is None else program
        if isinstance(self.locc, Teleportation):
            return teleport_map(program, x, self.locc.table)
        return apply_map(self.locc.channel, np.kron(program, x))


def discard_program_map(program_dim, ch):
    """Generic map that traces out the program and applies ``ch`` to the target."""
    kraus = [
        np.kron(basis_vector(program_dim, j).conj()[None, :], k)
        for j in range(program_dim)
        for k in ch.kraus
    ]
    return GenericMap(QuantumChannel(kraus, program_dim * ch.d_in, ch.d_out, "discard⊗" + ch.name))


def descriptor_deviation(ch, descriptor):
    """Max-norm error of a descriptor against its channel on all matrix units."""
    return max(
        max_norm(descriptor.simulate(e) - apply_map(ch, e)) for e in operator_basis(ch.d_in)
    )


def covariant_descriptor(ch):
    """
    Teleportation over the Choi state of a teleportation-covariant channel.

    Raises:
        ValueError: If no correction table exists in the search set.
    """
    table = covariance_table(ch, WeylGroup(ch.d_in))
    if isinstance(table, NotCovariant):
        raise ValueError("{} is not teleportation covariant (index {})".format(ch.name, table.index))
    return SimulationDescriptor(ch.choi, Teleportation(table))


def joint_descriptor(ens):
    """
    Single teleportation over the averaged Choi state of a jointly covariant ensemble.

    Raises:
        ValueError: If no correction table is shared by all components.
    """
    table = shared_correction_table(ens, WeylGroup(ens.d_in))
    if isinstance(table, NotCovariant):
        raise ValueError("ensemble is not jointly teleportation covariant (index {})".format(table.index))
    program = sum(p * ch.choi.mat for p, ch in zip(ens.probabilities, ens.channels))
    return SimulationDescriptor(DensityMatrix(program, ens.channels[0].choi.sig), Teleportation(table))


def _ensemble(weighted_channels):
    return ChannelEnsemble(
        tuple(EnsembleEntry(p, ch, covariant_descriptor(ch)) for p, ch in weighted_channels)
    )


# Ensembles of the named channels, each component with its own simulation.


def dad_ensemble(p):
    p = check_probability("p", p)
    return _ensemble([(p, replacer0()), (1 - p, identity(2))])


def dephrasure_ensemble(p, q):
    p = check_probability("p", p)
    return _ensemble([(1 - p, embed_output(dephasing(q), 3)), (p, erasure_flag(2))])


def pipeline_ensemble(inner, p):
    p = check_probability("p", p)
    d = inner.d_out
    return _ensemble([(1 - p, embed_output(inner, d + 1)), (p, erasure_flag(d))])


def pauli_ensemble(probs, weights):
    """
    Ensemble of Pauli channels, all simulated by the standard teleportation table.

    Args:
        probs (Sequence[float]): Ensemble probabilities.
        weights (Sequence[Sequence[float]]): (p_I, p_X, p_Y, p_Z) per component.
    """
    return _ensemble([(p, pauli(*w)) for p, w in zip(probs, weights)])


def random_pauli_ensemble(n, rng):
    probs = rng.dirichlet(np.ones(n))
    probs[-1] = 1.0 - probs[:-1].sum()
    weights = []
    for _ in range(n):
        w = rng.dirichlet(np.ones(4))
        w[-1] = 1.0 - w[:-1].sum()
        weights.append(w)
    return pauli_ensemble(probs, weights)


@dataclass(frozen=True, eq=False)
class ControlProgramState:
    """
    Block-diagonal control-program state Σ_i p_i |i><i|_C ⊗ σ_P^i.

    Attributes:
        blocks (tuple): (p_i, σ_P^i) pairs in control-basis order.
        realized (DensityMatrix): The assembled state, control system first.
    """

    blocks: tuple
    realized: DensityMatrix

    @property
    def program_dim(self):
        return self.blocks[0][1].dim

    def block(self, i):
        """Flag readout C_i applied to θ: the sub-normalized block p_i σ_P^i."""
        d = self.program_dim
        return self.realized.mat[i * d : (i + 1) * d, i * d : (i + 1) * d]


def _assemble(blocks):
    sigs = {program.sig for _, program in blocks}
    if len(sigs) != 1:
        raise DimensionMismatch("program states disagree on signature: {}".format(sigs))
    sig = SubsystemSignature.single(len(blocks), "C").concat(sigs.pop())
    mat = scipy.linalg.block_diag(*[p * program.mat for p, program in blocks])
    return ControlProgramState(tuple(blocks), DensityMatrix(mat, sig))


def build_control_program(ens):
    """
    Assemble θ_CP from the program states of an ensemble.

    Raises:
        MissingDescriptor: If an entry has no simulation descriptor.
    """
    missing = [e.channel.name for e in ens.entries if e.sim is None]
    if missing:
        raise MissingDescriptor("no simulation descriptor for {}".format(missing))
    return _assemble([(e.p, e.sim.program) for e in ens.entries])


def conditional_map(theta, descriptors, x):
    """Σ_i L_i(C_i(θ) ⊗ x) on an arbitrary target operator, block by block."""
    if len(descriptors) != len(theta.blocks):
        raise ValueError(
            "{} descriptors for {} control blocks".format(len(descriptors), len(theta.blocks))
        )
    out = None
    for i, descriptor in enumerate(descriptors):
        term = descriptor.simulate(x, program=theta.block(i))
        out = term if out is None else out + term
    return out


def conditional_apply(theta, descriptors, rho):
    """
    Control-program-target simulation of the average channel on a state.

    Args:
        theta (ControlProgramState): Control-program state.
        descriptors (Sequence[SimulationDescriptor]): One per control block.
        rho (DensityMatrix): Target state.

    Returns:
        DensityMatrix: Σ_i p_i L_i(σ_P^i ⊗ ρ).
    """
    d_in = operator_basis_dim(descriptors)
    if rho.dim != d_in:
        raise DimensionMismatch("target of dimension {} but simulations take {}".format(rho.dim, d_in))
    out = conditional_map(theta, descriptors, rho.mat)
    return DensityMatrix(out, SubsystemSignature.single(out.shape[0], "B"))


def operator_basis_dim(descriptors):
    locc = descriptors[0].locc
    if isinstance(locc, Teleportation):
        return locc.table.d_in
    return locc.channel.d_in // descriptors[0].program.dim


def conditional_channel(theta, descriptors):
    """The simulated channel, rebuilt from its Choi matrix."""
    d_in = operator_basis_dim(descriptors)
    images = [conditional_map(theta, descriptors, e) / d_in for e in operator_basis(d_in)]
    d_out = images[0].shape[0]
    choi = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for k, image in enumerate(images):
        i, j = divmod(k, d_in)
        choi[i * d_out : (i + 1) * d_out, j * d_out : (j + 1) * d_out] = image
    return from_choi(DensityMatrix(choi, SubsystemSignature((d_in, d_out), ("A", "B"))), "conditional")


def verify_simulation(ens):
    """
    Largest deviation between the conditional simulation and the mixture.

    Returns:
        float: Max-norm deviation over the matrix units of the input space.
    """
    theta = build_control_program(ens)
    descriptors = [e.sim for e in ens.entries]
    target = mixture(ens)
    deviation = max(
        max_norm(conditional_map(theta, descriptors, e) - apply_map(target, e))
        for e in operator_basis(ens.d_in)
    )
    logger.debug("conditional simulation of {} deviates by {:.3e}", target.name, deviation)
    return deviation


class ChainBound(NamedTuple):
    e_theta: float
    sum_bound: float


def default_ree_oracle(rho):
    return ree_ppt(rho).value


def ree_chain_bound(theta, ree_oracle=default_ree_oracle, tol=1e-4):
    """
    REE of θ_CP with the control on Alice's side against the weighted component sum.

    Args:
        theta (ControlProgramState): Control-program state.
        ree_oracle (Callable[[DensityMatrix], float]): REE of a bipartite state.
        tol (float): Optimizer slack allowed in the chain inequality.

    Returns:
        ChainBound: (E_R(θ_CP) on CA|B, Σ_i p_i E_R(σ_P^i)).

    Raises:
        ChainViolation: If E_R(θ_CP) exceeds the sum by more than ``tol``.
    """
    e_theta = ree_oracle(bipartition(theta.realized, {"C", "A"}))
    sum_bound = sum(
        p * ree_oracle(bipartition(program, {"A"})) for p, program in theta.blocks if p > 0
    )
    if e_theta > sum_bound + tol:
        raise ChainViolation(e_theta, sum_bound)
    return ChainBound(e_theta, sum_bound)


@dataclass(frozen=True)
class FiniteSizeParams:
    n: int
    eps: float
    alpha: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("number of channel uses must be positive, got {}".format(self.n))
        if self.alpha < 1:
            raise ValueError("alpha must be at least 1, got {}".format(self.alpha))
        if self.eps <= 0 or 1 - 4 * self.eps * self.alpha <= 0:
            raise ValueError(
                "eps must lie in (0, 1/(4 alpha)), got eps={} alpha={}".format(self.eps, self.alpha)
            )


def finite_size_bound(params, sum_ree):
    """sum_ree/(1-4εα) + 2H₂(ε)/((1-4εα)n)."""
    scale = 1 - 4 * params.eps * params.alpha
    return sum_ree / scale + 2 * h2(params.eps) / (scale * params.n)


def asymptotic_bound(params, sum_ree):
    """Limit of ``finite_size_bound`` for n -> ∞ at fixed ε."""
    return sum_ree / (1 - 4 * params.eps * params.alpha)


# Memory channels: correlated use of M ensembles.


def _check_joint(mem, joint_p):
    joint_p = np.asarray(joint_p, dtype=float)
    shape = tuple(len(ens) for ens in mem)
    if joint_p.shape != shape:
        raise DimensionMismatch("joint table of shape {} for ensembles of sizes {}".format(joint_p.shape, shape))
    if np.any(joint_p < 0) or abs(joint_p.sum() - 1.0) > 1e-12:
        raise ValueError("joint probabilities must be non-negative and sum to 1")
    return joint_p


def build_memory_control_program(mem, joint_p):
    """
    θ_CP = Σ_i p_i |i><i|_C ⊗ (⊗_k σ_P^{k,i_k}) over index tuples in row-major order.

    Args:
        mem (Sequence[ChannelEnsemble]): One ensemble per channel use.
        joint_p (np.ndarray): Probability table of shape (len(mem[0]), ..., len(mem[-1])).

    Returns:
        ControlProgramState: Control dimension equals the number of index tuples.
    """
    joint_p = _check_joint(mem, joint_p)
    for ens in mem:
        if any(e.sim is None for e in ens.entries):
            raise MissingDescriptor("memory ensemble entry without a simulation descriptor")
    blocks = []
    for index in itertools.product(*[range(len(ens)) for ens in mem]):
        programs = [ens.entries[i].sim.program for ens, i in zip(mem, index)]
        blocks.append((float(joint_p[index]), tensor_all(programs)))
    return _assemble(blocks)


def memory_ree_bound(mem, joint_p, component_rees=None, ree_oracle=default_ree_oracle):
    """
    Σ_i p_i Σ_k E_R(σ^{k,i_k}) for a memory channel.

    Args:
        mem (Sequence[ChannelEnsemble]): One ensemble per channel use.
        joint_p (np.ndarray): Joint probability table.
        component_rees (Sequence[Sequence[float]], optional): E_R per ensemble
            component; computed with ``ree_oracle`` when omitted.
    """
    joint_p = _check_joint(mem, joint_p)
    if component_rees is None:
        component_rees = [[ree_oracle(e.sim.program) for e in ens.entries] for ens in mem]
    total = 0.0
    for index in itertools.product(*[range(len(ens)) for ens in mem]):
        p = joint_p[index]
        if p > 0:
            total += p * sum(rees[i] for rees, i in zip(component_rees, index))
    return float(total)
