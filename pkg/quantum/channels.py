from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Optional

import numpy as np

from .opcore import (
    POLICY,
    DensityMatrix,
    DimensionMismatch,
    SubsystemSignature,
    basis_vector,
    eig_hermitian,
    matrix_unit,
    max_norm,
)


# Channel algebra: Kraus <-> Choi, application, composition and mixtures.


def check_probability(name, value):
    if not 0.0 <= value <= 1.0:
        raise ValueError("{} must lie in [0, 1], got {}".format(name, value))
    return float(value)


def kraus_to_choi(kraus, d_in):
    """
    Unit-trace Choi matrix (I ⊗ E)(Φ) of a Kraus list, input system first.

    Args:
        kraus (Sequence[np.ndarray]): Kraus operators of shape (d_out, d_in).
        d_in (int): Input dimension.

    Returns:
        np.ndarray: Choi matrix of dimension d_in * d_out.
    """
    vecs = np.array([k.T.reshape(-1) for k in kraus]) / np.sqrt(d_in)
    return vecs.T @ vecs.conj()


def choi_to_kraus(choi, d_in, d_out, cutoff=None):
    """
    Minimal Kraus list from a unit-trace Choi matrix.

    Eigenvalues below ``cutoff`` (the support threshold by default) are dropped.
    """
    cutoff = POLICY.support if cutoff is None else cutoff
    w, v = eig_hermitian(choi)
    kraus = []
    for lam, vec in zip(w, v.T):
        if lam > cutoff:
            kraus.append(np.sqrt(d_in * lam) * vec.reshape(d_in, d_out).T)
    return kraus


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """
    Completely positive trace-preserving map held as a Kraus list.

    The Choi state is derived on first access.

    Raises:
        DimensionMismatch: If a Kraus operator does not have shape (d_out, d_in).
        ValueError: If the Kraus list is not trace preserving.
    """

    kraus: tuple
    d_in: int
    d_out: int
    name: str = "channel"

    def __post_init__(self):
        kraus = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        if not kraus:
            raise ValueError("a channel needs at least one Kraus operator")
        for k in kraus:
            if k.shape != (self.d_out, self.d_in):
                raise DimensionMismatch(
                    "Kraus operator of shape {} in a {}->{} channel".format(
                        k.shape, self.d_in, self.d_out
                    )
                )
        completeness = sum(k.conj().T @ k for k in kraus)
        deviation = max_norm(completeness - np.eye(self.d_in))
        if deviation > POLICY.trace:
            raise ValueError(
                "channel {} is not trace preserving (deviation {:.3e})".format(self.name, deviation)
            )
        object.__setattr__(self, "kraus", kraus)

    @cached_property
    def choi(self):
        sig = SubsystemSignature((self.d_in, self.d_out), ("A", "B"))
        return DensityMatrix(kraus_to_choi(self.kraus, self.d_in), sig)

    def renamed(self, name):
        return QuantumChannel(self.kraus, self.d_in, self.d_out, name)


def from_choi(choi, name="channel"):
    d_in, d_out = choi.sig.dims
    return QuantumChannel(choi_to_kraus(choi.mat, d_in, d_out), d_in, d_out, name)


def apply_map(ch, x):
    """Action of ``ch`` on an arbitrary (not necessarily positive) operator."""
    x = np.asarray(x)
    if x.shape != (ch.d_in, ch.d_in):
        raise DimensionMismatch(
            "operator of shape {} fed to a {}-dimensional input".format(x.shape, ch.d_in)
        )
    return sum(k @ x @ k.conj().T for k in ch.kraus)


def apply(ch, rho):
    """
    Send a state through a channel.

    Args:
        ch (QuantumChannel): The channel.
        rho (DensityMatrix): Input state of dimension ``ch.d_in``.

    Returns:
        DensityMatrix: Output state labelled B.
    """
    if rho.dim != ch.d_in:
        raise DimensionMismatch(
            "state of dimension {} fed to {} with input dimension {}".format(
                rho.dim, ch.name, ch.d_in
            )
        )
    return DensityMatrix(apply_map(ch, rho.mat), SubsystemSignature.single(ch.d_out, "B"))


def choi_of(ch):
    return ch.choi


def operator_basis(d):
    """Matrix units |i><j| in row-major order."""
    return [matrix_unit(d, i, j) for i in range(d) for j in range(d)]


def action_deviation(f, g):
    """Largest max-norm difference between two maps on a complete operator basis."""
    if (f.d_in, f.d_out) != (g.d_in, g.d_out):
        raise DimensionMismatch("cannot compare {} and {}".format(f.name, g.name))
    return max(max_norm(apply_map(f, e) - apply_map(g, e)) for e in operator_basis(f.d_in))


def compose(g, f):
    """The channel g∘f (apply f first)."""
    if g.d_in != f.d_out:
        raise DimensionMismatch(
            "cannot compose {} (input {}) after {} (output {})".format(
                g.name, g.d_in, f.name, f.d_out
            )
        )
    kraus = [b @ a for b in g.kraus for a in f.kraus]
    return QuantumChannel(kraus, f.d_in, g.d_out, "{}∘{}".format(g.name, f.name))


def tensor_channels(f, g):
    kraus = [np.kron(a, b) for a in f.kraus for b in g.kraus]
    return QuantumChannel(kraus, f.d_in * g.d_in, f.d_out * g.d_out, "{}⊗{}".format(f.name, g.name))


def embed_output(ch, d_out):
    """Regard the output of ``ch`` as the first ``ch.d_out`` levels of a larger space."""
    if d_out < ch.d_out:
        raise DimensionMismatch("cannot embed a {}-dim output into {}".format(ch.d_out, d_out))
    pad = np.zeros((d_out - ch.d_out, ch.d_in))
    kraus = [np.vstack([k, pad]) for k in ch.kraus]
    return QuantumChannel(kraus, ch.d_in, d_out, ch.name)


@dataclass(frozen=True, eq=False)
class EnsembleEntry:
    p: float
    channel: QuantumChannel
    sim: Optional[Any] = None


@dataclass(frozen=True, eq=False)
class ChannelEnsemble:
    """
    Probability-weighted list of channels sharing input and output spaces.

    Each entry may carry the simulation descriptor of its channel.
    """

    entries: tuple = field(default_factory=tuple)

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            return
        probs = np.array([e.p for e in entries], dtype=float)
        if np.any(probs < 0):
            raise ValueError("ensemble probabilities must be non-negative, got {}".format(probs))
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("ensemble probabilities sum to {}, not 1".format(probs.sum()))
        shapes = {(e.channel.d_in, e.channel.d_out) for e in entries}
        if len(shapes) != 1:
            raise DimensionMismatch("ensemble channels disagree on dimensions: {}".format(sorted(shapes)))

    def __len__(self):
        return len(self.entries)

    @property
    def probabilities(self):
        return np.array([e.p for e in self.entries])

    @property
    def channels(self):
        return [e.channel for e in self.entries]

    @property
    def d_in(self):
        return self.entries[0].channel.d_in

    @property
    def d_out(self):
        return self.entries[0].channel.d_out


def mixture(ens):
    """
    Average channel Σ_i p_i E_i as the flattened Kraus list {√p_i K}.

    Raises:
        ValueError: If the ensemble is empty.
    """
    if not len(ens):
        raise ValueError("mixture of an empty ensemble")
    kraus = [np.sqrt(e.p) * k for e in ens.entries if e.p > 0 for k in e.channel.kraus]
    name = " + ".join("{:g}·{}".format(e.p, e.channel.name) for e in ens.entries)
    return QuantumChannel(kraus, ens.d_in, ens.d_out, name)


# Named channels.


def identity(d=2):
    return QuantumChannel([np.eye(d)], d, d, "identity")


def dephasing(q):
    q = check_probability("q", q)
    z = np.diag([1.0, -1.0])
    return QuantumChannel([np.sqrt(1 - q) * np.eye(2), np.sqrt(q) * z], 2, 2, "dephasing")


def pauli(p_i, p_x, p_y, p_z):
    probs = np.array([p_i, p_x, p_y, p_z], dtype=float)
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
        raise ValueError("Pauli weights must be a probability vector, got {}".format(probs))
    ops = [
        np.eye(2),
        np.array([[0, 1], [1, 0]]),
        np.array([[0, -1j], [1j, 0]]),
        np.diag([1.0, -1.0]),
    ]
    return QuantumChannel([np.sqrt(w) * op for w, op in zip(probs, ops)], 2, 2, "pauli")


def erasure(d, p):
    """
    Erasure channel with output dimension d+1; the flag |e> is basis index d.
    """
    p = check_probability("p", p)
    keep = np.vstack([np.eye(d), np.zeros((1, d))])
    kraus = [np.sqrt(1 - p) * keep]
    kraus += [np.sqrt(p) * np.outer(basis_vector(d + 1, d), basis_vector(d, i)) for i in range(d)]
    return QuantumChannel(kraus, d, d + 1, "erasure")


def replacer(state, d_in):
    """Channel that discards its input and prepares ``state``."""
    w, v = eig_hermitian(state.mat)
    kraus = [
        np.sqrt(lam) * np.outer(vec, basis_vector(d_in, i))
        for lam, vec in zip(w, v.T)
        if lam > POLICY.support
        for i in range(d_in)
    ]
    return QuantumChannel(kraus, d_in, state.dim, "replacer")


def replacer0():
    """E_0(ρ) = Tr(ρ)|0><0| on a qubit."""
    zero = DensityMatrix.pure(basis_vector(2, 0))
    return replacer(zero, 2).renamed("replacer0")


def erasure_flag(d=2):
    """E_e(ρ) = Tr(ρ)|e><e| with |e> the extra level of a d+1 output."""
    return erasure(d, 1.0).renamed("erasure-replacer")


def dephrasure(p, q):
    """Dephasing with probability q followed by erasure with probability p, from its four Kraus operators."""
    p = check_probability("p", p)
    q = check_probability("q", q)
    e0 = np.sqrt((1 - p) * (1 - q)) * np.array([[1, 0], [0, 1], [0, 0]])
    e1 = np.sqrt((1 - p) * q) * np.array([[1, 0], [0, -1], [0, 0]])
    e2 = np.sqrt(p) * np.array([[0, 0], [0, 0], [1, 0]])
    e3 = np.sqrt(p) * np.array([[0, 0], [0, 0], [0, 1]])
    return QuantumChannel([e0, e1, e2, e3], 2, 3, "dephrasure")


def dad(p):
    """Diagonal amplitude damping p·E_0 + (1-p)·identity."""
    p = check_probability("p", p)
    kraus = [np.sqrt(1 - p) * np.eye(2)] + [np.sqrt(p) * k for k in replacer0().kraus]
    return QuantumChannel(kraus, 2, 2, "dad")


def pipeline(inner, p):
    """Erasure pipeline: ``inner`` followed by a d-dimensional erasure channel."""
    return compose(erasure(inner.d_out, p), inner).renamed("pipeline")
