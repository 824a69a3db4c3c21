from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.linalg
from scipy.stats import unitary_group

# Dense complex-matrix substrate shared by every finite-dimensional module.

LABELS = frozenset("CABTE")


@dataclass(frozen=True)
class NumericPolicy:
    """
    Single home of every numerical tolerance used by the library.

    Attributes:
        hermiticity (float): Max absolute deviation of a matrix from its adjoint.
        psd_slack (float): Eigenvalues down to -psd_slack count as non-negative.
        trace (float): Allowed deviation of a state's trace from 1.
        state_equality (float): Max-norm distance under which two states are equal.
        simulation (float): Max-norm deviation allowed for simulated channels.
        ppt (float): Slack on partial-transpose eigenvalues.
        support (float): Eigenvalue threshold defining the support of a state.
        smoothing (float): Identity weight added to the second argument of the
            relative entropy inside optimizers.
    """

    hermiticity: float = 1e-12
    psd_slack: float = 1e-10
    trace: float = 1e-10
    state_equality: float = 1e-10
    simulation: float = 1e-9
    ppt: float = 1e-8
    support: float = 1e-10
    smoothing: float = 1e-12


POLICY = NumericPolicy()


class DimensionMismatch(ValueError):
    pass


class UnknownLabel(ValueError):
    pass


@dataclass(frozen=True)
class SubsystemSignature:
    """
    Ordered local dimensions and party labels of a composite system.

    Labels may repeat, e.g. a memory program carries (C, A, B, A, B).
    """

    dims: tuple
    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.dims) != len(self.labels):
            raise ValueError(
                "signature has {} dims but {} labels".format(
                    len(self.dims), len(self.labels)
                )
            )
        if any(d < 1 for d in self.dims):
            raise ValueError("local dimensions must be positive, got {}".format(self.dims))
        unknown = set(self.labels) - LABELS
        if unknown:
            raise UnknownLabel("unknown party labels {}".format(sorted(unknown)))

    @classmethod
    def single(cls, d, label="A"):
        return cls((d,), (label,))

    @property
    def dim(self):
        return int(np.prod(self.dims))

    def concat(self, other):
        return SubsystemSignature(self.dims + other.dims, self.labels + other.labels)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    Hermitian, positive semi-definite, unit-trace matrix with a subsystem signature.

    The stored matrix is the hermitized, read-only copy of the input.

    Raises:
        DimensionMismatch: If the matrix shape disagrees with the signature.
        ValueError: If Hermiticity, positivity or normalization fail the policy.
    """

    mat: np.ndarray
    sig: SubsystemSignature

    def __post_init__(self):
        mat = np.array(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatch("density matrix must be square, got {}".format(mat.shape))
        if mat.shape[0] != self.sig.dim:
            raise DimensionMismatch(
                "matrix dimension {} does not match signature {}".format(
                    mat.shape[0], self.sig.dims
                )
            )
        herm_dev = max_norm(mat - mat.conj().T)
        if herm_dev > POLICY.hermiticity:
            raise ValueError("matrix is not Hermitian (deviation {:.3e})".format(herm_dev))
        mat = (mat + mat.conj().T) / 2
        trace_dev = abs(np.trace(mat).real - 1.0)
        if trace_dev > POLICY.trace:
            raise ValueError("trace deviates from 1 by {:.3e}".format(trace_dev))
        try:
            np.linalg.cholesky(mat + POLICY.psd_slack * np.eye(mat.shape[0]))
        except np.linalg.LinAlgError:
            lowest = scipy.linalg.eigvalsh(mat)[0]
            raise ValueError("matrix is not positive semi-definite (lowest eigenvalue {:.3e})".format(lowest))
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @classmethod
    def from_matrix(cls, mat, dims=None, labels=None):
        mat = np.asarray(mat)
        dims = (mat.shape[0],) if dims is None else tuple(dims)
        if labels is None:
            labels = ("A", "B")[: len(dims)] if len(dims) <= 2 else ("A",) * len(dims)
        return cls(mat, SubsystemSignature(dims, labels))

    @classmethod
    def pure(cls, vec, dims=None, labels=None):
        vec = np.asarray(vec, dtype=complex)
        vec = vec / np.linalg.norm(vec)
        return cls.from_matrix(np.outer(vec, vec.conj()), dims, labels)

    @property
    def dim(self):
        return self.mat.shape[0]

    def relabel(self, labels):
        return DensityMatrix(self.mat, SubsystemSignature(self.sig.dims, labels))


def max_norm(a):
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def tensor(a, b):
    """
    Kronecker product of two states or two raw matrices.

    Args:
        a (DensityMatrix or np.ndarray): First factor.
        b (DensityMatrix or np.ndarray): Second factor, same kind as ``a``.

    Returns:
        DensityMatrix or np.ndarray: The product; signatures concatenate.
    """
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.mat, b.mat), a.sig.concat(b.sig))
    return np.kron(np.asarray(a), np.asarray(b))


def tensor_all(states):
    return reduce(tensor, states)


def _keep_indices(sig, keep):
    keep = set(keep)
    unknown = keep - set(sig.labels)
    if unknown:
        raise UnknownLabel("labels {} not in signature {}".format(sorted(unknown), sig.labels))
    indices = [i for i, label in enumerate(sig.labels) if label in keep]
    if not indices:
        raise ValueError("partial trace must keep at least one subsystem")
    return indices


def trace_out(mat, dims, keep_indices):
    """
    Partial trace of a raw matrix by subsystem position.

    Args:
        mat (np.ndarray): Square matrix on the composite system.
        dims (tuple): Local dimensions.
        keep_indices (list): Positions of the subsystems that survive.

    Returns:
        np.ndarray: Reduced matrix ordered as ``keep_indices``.
    """
    n = len(dims)
    rows = list(range(n))
    cols = list(range(n, 2 * n))
    for i in range(n):
        if i not in keep_indices:
            cols[i] = rows[i]
    out = [rows[i] for i in keep_indices] + [cols[i] for i in keep_indices]
    reduced = np.einsum(np.asarray(mat).reshape(tuple(dims) * 2), rows + cols, out)
    d_keep = int(np.prod([dims[i] for i in keep_indices]))
    return reduced.reshape(d_keep, d_keep)


def partial_trace(rho, keep):
    """
    Reduce a state to the subsystems whose label is in ``keep``.

    Args:
        rho (DensityMatrix): Composite state.
        keep (Iterable[str]): Labels to keep; every subsystem carrying one of
            them survives, in signature order.

    Returns:
        DensityMatrix: The reduced state.

    Raises:
        UnknownLabel: If a label in ``keep`` is not part of the signature.
    """
    indices = _keep_indices(rho.sig, keep)
    reduced = trace_out(rho.mat, rho.sig.dims, indices)
    sig = SubsystemSignature(
        [rho.sig.dims[i] for i in indices], [rho.sig.labels[i] for i in indices]
    )
    return DensityMatrix(reduced, sig)


def permute(rho, order):
    """Reorder the subsystems of ``rho`` so that position k holds old subsystem ``order[k]``."""
    dims = rho.sig.dims
    n = len(dims)
    t = rho.mat.reshape(dims * 2)
    t = t.transpose(list(order) + [n + i for i in order])
    sig = SubsystemSignature([dims[i] for i in order], [rho.sig.labels[i] for i in order])
    return DensityMatrix(t.reshape(rho.dim, rho.dim), sig)


def bipartition(rho, alice):
    """
    Group subsystems into a two-party state Alice|Bob.

    Args:
        rho (DensityMatrix): Composite state.
        alice (Iterable[str]): Labels owned by Alice; all other subsystems go to Bob.

    Returns:
        DensityMatrix: State with signature (A: prod of Alice dims, B: prod of Bob dims).
    """
    alice = set(alice)
    unknown = alice - set(rho.sig.labels)
    if unknown:
        raise UnknownLabel("labels {} not in signature {}".format(sorted(unknown), rho.sig.labels))
    first = [i for i, label in enumerate(rho.sig.labels) if label in alice]
    rest = [i for i, label in enumerate(rho.sig.labels) if label not in alice]
    if not first or not rest:
        raise ValueError("both sides of a bipartition must be non-empty")
    ordered = permute(rho, first + rest)
    d_a = int(np.prod([rho.sig.dims[i] for i in first]))
    return DensityMatrix(ordered.mat, SubsystemSignature((d_a, rho.dim // d_a), ("A", "B")))


def partial_transpose(mat, dims):
    """Partial transpose on the second factor of a bipartite matrix with ``dims = (dA, dB)``."""
    d_a, d_b = dims
    t = np.asarray(mat).reshape(d_a, d_b, d_a, d_b)
    return t.transpose(0, 3, 2, 1).reshape(d_a * d_b, d_a * d_b)


def is_ppt(rho, tol=None):
    tol = POLICY.ppt if tol is None else tol
    if len(rho.sig.dims) != 2:
        raise ValueError("PPT test needs a bipartite signature, got {}".format(rho.sig.dims))
    return scipy.linalg.eigvalsh(partial_transpose(rho.mat, rho.sig.dims))[0] >= -tol


def eig_hermitian(m):
    """
    Eigendecomposition of a Hermitian matrix with eigenvalues in descending order.

    Args:
        m (np.ndarray): Hermitian matrix.

    Returns:
        tuple: (eigenvalues descending, unitary whose columns are the eigenvectors).

    Raises:
        ValueError: If ``m`` is not Hermitian within the policy tolerance.
    """
    m = np.asarray(m)
    deviation = max_norm(m - m.conj().T)
    if deviation > POLICY.hermiticity:
        raise ValueError("matrix is not Hermitian (deviation {:.3e})".format(deviation))
    w, v = scipy.linalg.eigh((m + m.conj().T) / 2)
    return w[::-1], v[:, ::-1]


def basis_vector(d, i):
    e = np.zeros(d, dtype=complex)
    e[i] = 1.0
    return e


def matrix_unit(d, i, j):
    e = np.zeros((d, d), dtype=complex)
    e[i, j] = 1.0
    return e


def maximally_mixed(d, label="A"):
    return DensityMatrix(np.eye(d) / d, SubsystemSignature.single(d, label))


def bell_vector(d=2):
    return np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)


def bell_state(d=2):
    return DensityMatrix.pure(bell_vector(d), (d, d), ("A", "B"))


def bell_basis():
    """Two-qubit Bell vectors ordered (Phi+, Phi-, Psi+, Psi-) as matrix columns."""
    s = 1 / np.sqrt(2)
    return np.array(
        [[s, s, 0, 0], [0, 0, s, s], [0, 0, s, -s], [s, -s, 0, 0]], dtype=complex
    )


def bell_diagonal_state(weights):
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (4,) or np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
        raise ValueError("Bell-diagonal weights must be 4 probabilities, got {}".format(weights))
    b = bell_basis()
    return DensityMatrix.from_matrix((b * weights) @ b.conj().T, (2, 2), ("A", "B"))


def random_density_matrix(d, rng, rank=None, dims=None, labels=None):
    """
    Draw a density matrix from the induced (Ginibre) measure.

    Args:
        d (int): Dimension.
        rng (np.random.Generator): Source of randomness.
        rank (int, optional): Rank of the state; full rank when omitted.
        dims (tuple, optional): Signature dims, defaults to a single system.
        labels (tuple, optional): Signature labels.

    Returns:
        DensityMatrix: The random state.
    """
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return DensityMatrix.from_matrix(rho / np.trace(rho).real, dims or (d,), labels)


def random_unitary(d, rng):
    return unitary_group.rvs(d, random_state=rng)
