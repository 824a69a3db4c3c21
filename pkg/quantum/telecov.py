from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg
from loguru import logger

from .channels import apply_map, operator_basis
from .opcore import POLICY, DensityMatrix, DimensionMismatch, SubsystemSignature, max_norm


class MissingCorrection(KeyError):
    pass


@dataclass(frozen=True)
class WeylGroup:
    """
    Generalized Pauli group {X^a Z^b} on a d-dimensional system.

    X|j> = |j+1 mod d>, Z|j> = ω^j|j> with ω = exp(2πi/d). Elements are
    indexed by (a, b) in row-major order, so for d = 2 the order is
    I, Z, X, XZ.
    """

    d: int

    @cached_property
    def operators(self):
        shift = np.roll(np.eye(self.d), 1, axis=0)
        clock = np.diag(np.exp(2j * np.pi * np.arange(self.d) / self.d))
        return {
            (a, b): np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
            for a in range(self.d)
            for b in range(self.d)
        }

    def indices(self):
        return list(self.operators)

    def __getitem__(self, index):
        return self.operators[index]

    def __len__(self):
        return self.d**2


def _is_unitary(u):
    return max_norm(u.conj().T @ u - np.eye(u.shape[0])) <= POLICY.hermiticity


@dataclass(frozen=True, eq=False)
class CorrectionTable:
    """
    Output unitary V_U for each Weyl index, with E(U ρ U†) = V_U E(ρ) V_U†.

    Teleportation applies V_U† after the Bell outcome labelled by U.
    """

    corrections: dict
    d_in: int
    d_out: int

    def __post_init__(self):
        for index, v in self.corrections.items():
            if v.shape != (self.d_out, self.d_out) or not _is_unitary(v):
                raise ValueError("correction {} is not a {}-dim unitary".format(index, self.d_out))

    def __getitem__(self, index):
        try:
            return self.corrections[index]
        except KeyError:
            raise MissingCorrection("no correction stored for outcome {}".format(index)) from None

    def agrees_with(self, other):
        """Same V for every index, up to a global phase."""
        if set(self.corrections) != set(other.corrections):
            return False
        for index, v in self.corrections.items():
            overlap = abs(np.trace(v.conj().T @ other.corrections[index]))
            if abs(overlap - self.d_out) > 1e-9:
                return False
        return True


@dataclass(frozen=True)
class NotCovariant:
    channel: str
    index: tuple


def standard_table(group):
    """Corrections of ideal teleportation, V_U = U."""
    return CorrectionTable(dict(group.operators), group.d, group.d)


def teleport_outcomes(program, x, group):
    """
    Unnormalized target states for each Bell outcome on systems A,T.

    Args:
        program (np.ndarray): Program matrix on A⊗B with dim(A) = group.d.
        x (np.ndarray): Operator on the target T.
        group (WeylGroup): Labels the Bell projectors (I ⊗ U†)|Φ>.

    Returns:
        dict: Weyl index -> operator on B, before correction.
    """
    d = group.d
    d_b = program.shape[0] // d
    sigma = program.reshape(d, d_b, d, d_b)
    outcomes = {}
    for index, u in group.operators.items():
        phi = u.conj() / np.sqrt(d)
        outcomes[index] = np.einsum("at,abcd,tu,cu->bd", phi.conj(), sigma, x, phi)
    return outcomes


def teleport_map(program, x, corrections):
    group = WeylGroup(corrections.d_in)
    out = np.zeros((corrections.d_out, corrections.d_out), dtype=complex)
    for index, omega in teleport_outcomes(program, x, group).items():
        v = corrections[index]
        out += v.conj().T @ omega @ v
    return out


def teleport(program, rho, corrections):
    """
    Teleport ``rho`` through a program state and apply the correction table.

    Args:
        program (DensityMatrix): Resource state on A⊗B, A of dimension d.
        rho (DensityMatrix): Input state of dimension d.
        corrections (CorrectionTable): Output unitaries per Bell outcome.

    Returns:
        DensityMatrix: Outcome-averaged output on B.

    Raises:
        DimensionMismatch: If the program, input and table disagree on dimensions.
        MissingCorrection: If an outcome has no correction.
    """
    d_a, d_b = program.sig.dims
    if rho.dim != d_a or corrections.d_in != d_a or corrections.d_out != d_b:
        raise DimensionMismatch(
            "program {}, input {} and table {}->{} disagree".format(
                program.sig.dims, rho.dim, corrections.d_in, corrections.d_out
            )
        )
    out = teleport_map(program.mat, rho.mat, corrections)
    return DensityMatrix(out, SubsystemSignature.single(d_b, "B"))


def _candidates(index, group, d_out):
    d_in = group.d
    if d_out == d_in:
        return [group[index]] + list(group.operators.values())
    out_group = list(WeylGroup(d_out).operators.values())
    if d_out == d_in + 1:
        return out_group + [scipy.linalg.block_diag(w, 1.0) for w in group.operators.values()]
    return out_group


def _search(channels, group, name):
    """First candidate per Weyl index that satisfies the covariance relation of every channel."""
    basis = operator_basis(group.d)
    images = [[apply_map(ch, e) for e in basis] for ch in channels]
    table = {}
    for index, u in group.operators.items():
        rotated = [[apply_map(ch, u @ e @ u.conj().T) for e in basis] for ch in channels]
        for v in _candidates(index, group, channels[0].d_out):
            if all(
                max_norm(r - v @ img @ v.conj().T) <= POLICY.simulation
                for rot, imgs in zip(rotated, images)
                for r, img in zip(rot, imgs)
            ):
                table[index] = v
                break
        else:
            logger.debug("{} has no correction for Weyl index {}", name, index)
            return NotCovariant(name, index)
    return CorrectionTable(table, group.d, channels[0].d_out)


def covariance_table(ch, group):
    """
    Search the output correction for every input Weyl unitary.

    The relation E(UXU†) = V E(X) V† is tested on all matrix units, so global
    phases of V drop out. Candidates are the same-index unitary (equal
    dimensions), then the output Weyl group, then Weyl unitaries acting as
    the identity on an erasure flag.

    Args:
        ch (QuantumChannel): Channel to analyse.
        group (WeylGroup): Input group, ``group.d == ch.d_in``.

    Returns:
        CorrectionTable or NotCovariant: The first matching table, or the first
        index without a valid correction.
    """
    if ch.d_in != group.d:
        raise DimensionMismatch("group dimension {} != channel input {}".format(group.d, ch.d_in))
    return _search([ch], group, ch.name)


def shared_correction_table(ens, group):
    """
    One correction table valid for every component of an ensemble.

    Every Weyl index is resolved independently: the first candidate that
    satisfies the covariance relation of all components at once is kept.
    With such a table, a single teleportation over the averaged Choi state
    simulates the mixture.

    Returns:
        CorrectionTable or NotCovariant: The shared table, or the first index
        where no candidate fits all components.
    """
    if ens.d_in != group.d:
        raise DimensionMismatch("group dimension {} != ensemble input {}".format(group.d, ens.d_in))
    return _search(list(ens.channels), group, "ensemble")


def joint_covariance(ens, group):
    """True iff one correction table works for every component simultaneously."""
    return not isinstance(shared_correction_table(ens, group), NotCovariant)
