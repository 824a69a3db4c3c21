import functools
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg
import scipy.optimize
from loguru import logger
from scipy import stats

from .opcore import (
    POLICY,
    DensityMatrix,
    DimensionMismatch,
    bell_basis,
    bell_diagonal_state,
    is_ppt,
    partial_trace,
)

LN2 = np.log(2.0)


# Entropic functionals, all in bits.


def h2(x):
    """
    Binary entropy in bits.

    Args:
        x (float): Probability in [0, 1].

    Returns:
        float: H₂(x); 0 at both endpoints.

    Raises:
        ValueError: If ``x`` lies outside [0, 1].
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError("binary entropy needs x in [0, 1], got {}".format(x))
    return float(stats.entropy([x, 1.0 - x], base=2))


def shannon(probs):
    probs = np.asarray(probs, dtype=float)
    if np.any(probs < 0):
        raise ValueError("probabilities must be non-negative, got {}".format(probs))
    return float(stats.entropy(probs, base=2))


def _spectrum(mat):
    return np.clip(scipy.linalg.eigvalsh(mat), 0.0, None)


def vn_entropy(rho):
    """von Neumann entropy with eigenvalues below the PSD slack clamped to 0."""
    return float(stats.entropy(_spectrum(rho.mat), base=2))


def rel_entropy(rho, sigma):
    """
    Quantum relative entropy S(ρ‖σ) in bits.

    Returns ``inf`` when the support of ρ is not contained in the support of σ.

    Raises:
        DimensionMismatch: If the two states have different dimensions.
    """
    if rho.dim != sigma.dim:
        raise DimensionMismatch("relative entropy of {}- and {}-dim states".format(rho.dim, sigma.dim))
    w, v = scipy.linalg.eigh(sigma.mat)
    weights = np.real(np.einsum("ji,jk,ki->i", v.conj(), rho.mat, v))
    support = w > POLICY.support
    if weights[~support].sum() > POLICY.support:
        return float("inf")
    cross = float(np.dot(weights[support], np.log2(w[support])))
    return -vn_entropy(rho) - cross


def mutual_information(rho, alice, bob):
    return (
        vn_entropy(partial_trace(rho, alice))
        + vn_entropy(partial_trace(rho, bob))
        - vn_entropy(rho)
    )


def coherent_info(ch):
    """I_C = S(B) - S(AB) of the Choi state."""
    choi = ch.choi
    return vn_entropy(partial_trace(choi, {"B"})) - vn_entropy(choi)


def reverse_coherent_info(ch):
    """I_RC = S(A) - S(AB) of the Choi state."""
    choi = ch.choi
    return vn_entropy(partial_trace(choi, {"A"})) - vn_entropy(choi)


# Relative entropy of entanglement.


class ReeMethod(str, Enum):
    CLOSED_FORM = "ClosedForm"
    CANDIDATE = "CandidateState"
    FRANK_WOLFE = "FrankWolfePPT"


@dataclass(frozen=True, eq=False)
class ReeResult:
    """
    REE value with its closest PPT (separable) state.

    Attributes:
        value (float): REE in bits, never negative.
        witness (DensityMatrix): State attaining ``value``.
        method (ReeMethod): How the value was obtained.
        gap_estimate (float): Frank-Wolfe duality gap, 0 for closed forms.
        iterations (int): Outer iterations used by the optimizer.
    """

    value: float
    witness: DensityMatrix
    method: ReeMethod
    gap_estimate: float = 0.0
    iterations: int = 0

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("REE must be non-negative, got {}".format(self.value))
        if not is_ppt(self.witness):
            raise ValueError("REE witness is not PPT")


def ree_upper(rho, candidate):
    """
    Upper bound on the REE from a PPT candidate state.

    Raises:
        ValueError: If ``candidate`` is not PPT.
    """
    if not is_ppt(candidate):
        raise ValueError("candidate state is not PPT")
    return rel_entropy(rho, candidate)


def ree_bell_diagonal(weights):
    """
    Closed-form REE of a two-qubit Bell-diagonal state, max(0, 1 - H₂(λ_max)).

    The witness keeps weight 1/2 on the dominant Bell state and rescales the rest.
    """
    weights = np.asarray(weights, dtype=float)
    rho = bell_diagonal_state(weights)
    top = int(np.argmax(weights))
    lam = weights[top]
    if lam <= 0.5:
        return ReeResult(0.0, rho, ReeMethod.CLOSED_FORM)
    closest = weights * 0.5 / (1.0 - lam)
    closest[top] = 0.5
    return ReeResult(max(0.0, 1.0 - h2(lam)), bell_diagonal_state(closest), ReeMethod.CLOSED_FORM)


def _log_derivative(w, v, x):
    """Fréchet derivative of the natural matrix log at V diag(w) V† in direction x."""
    xt = v.conj().T @ x @ v
    wi, wj = np.meshgrid(w, w, indexing="ij")
    diff = wi - wj
    close = np.abs(diff) <= 1e-10 * np.maximum(wi, wj)
    safe = np.where(close, 1.0, diff)
    divided = np.where(close, 2.0 / (wi + wj), (np.log(wi) - np.log(wj)) / safe)
    return v @ (xt * divided) @ v.conj().T


class _Objective:
    """S(ρ‖σ) in bits and its gradient in σ, with σ smoothed by the policy."""

    def __init__(self, rho):
        self.rho = rho.mat
        self.entropy = vn_entropy(rho)

    def __call__(self, sigma):
        w, v = scipy.linalg.eigh(sigma)
        w = np.clip(w, 0.0, None) + POLICY.smoothing
        weights = np.real(np.einsum("ji,jk,ki->i", v.conj(), self.rho, v))
        value = -self.entropy - float(np.dot(weights, np.log2(w)))
        grad = -_log_derivative(w, v, self.rho) / LN2
        return value, (grad + grad.conj().T) / 2


def _dedupe(vectors):
    kept = []
    for vec in vectors:
        vec = vec / np.linalg.norm(vec)
        if all(abs(np.vdot(u, vec)) < 1 - 1e-9 for u in kept):
            kept.append(vec)
    return kept


def _local_frame(d, marginal):
    """
    Reference vectors of one party: marginal eigenvectors first, then the
    computational and Fourier bases, the qubit Y basis, and flag ⊗ qubit bases
    for even dimensions.
    """
    _, eigvecs = scipy.linalg.eigh(marginal)
    vectors = list(eigvecs.T)
    vectors += list(np.eye(d, dtype=complex))
    vectors += list(np.fft.fft(np.eye(d)) / np.sqrt(d))
    qubit = [np.array([1, s]) / np.sqrt(2) for s in (1, -1, 1j, -1j)]
    if d == 2:
        vectors += qubit
    elif d % 2 == 0:
        vectors += [np.kron(np.eye(d // 2)[i], q) for i in range(d // 2) for q in qubit]
    return _dedupe(vectors)


@functools.lru_cache(maxsize=None)
def _bloch_grid(n_theta=41, n_phi=80):
    theta, phi = np.meshgrid(
        np.linspace(0, np.pi, n_theta), np.linspace(0, 2 * np.pi, n_phi, endpoint=False)
    )
    theta, phi = theta.ravel(), phi.ravel()
    grid = np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=1)
    grid.setflags(write=False)
    return grid


def _min_eigvec(m):
    w, v = scipy.linalg.eigh(m)
    return w[0], v[:, 0]


def _seesaw(g4, a, iterations=100):
    """Alternate optimal b given a and optimal a given b for min <ab|G|ab>."""
    value = np.inf
    for _ in range(iterations):
        _, b = _min_eigvec(np.einsum("ajck,a,c->jk", g4, a.conj(), a))
        new_value, a = _min_eigvec(np.einsum("ajck,j,k->ac", g4, b.conj(), b))
        if value - new_value < 1e-14:
            value = min(value, new_value)
            break
        value = new_value
    return value, np.kron(a, b)


def _product_lmo(grad, dims, starts, n_polish=3):
    """
    Minimize <ab|G|ab> over product unit vectors.

    With a qubit party the other party is minimized exactly on every point of
    a Bloch grid and the best points are polished by alternating eigenvector
    updates. Without one, the supplied starts are polished instead.
    """
    d_a, d_b = dims
    g4 = grad.reshape(d_a, d_b, d_a, d_b)
    if d_b == 2:
        grid = _bloch_grid()
        w, v = np.linalg.eigh(np.einsum("ajck,nj,nk->nac", g4, grid.conj(), grid))
        candidates = [v[i][:, 0] for i in np.argsort(w[:, 0])[:n_polish]]
    elif d_a == 2:
        grid = _bloch_grid()
        w = np.linalg.eigvalsh(np.einsum("ajck,na,nc->njk", g4, grid.conj(), grid))
        candidates = [grid[i] for i in np.argsort(w[:, 0])[:n_polish]]
    else:
        candidates = list(starts)
    best = (np.inf, None)
    for a in candidates:
        value, vec = _seesaw(g4, a)
        if value < best[0]:
            best = (value, vec)
    return best


def _mix(atoms, w):
    return (atoms.T * w) @ atoms.conj()


def _reweight(atoms, w0, objective, tol, pairwise_steps=50):
    """
    Fully corrective step: optimal weights of the active product states.

    A warm-started SLSQP solve is polished by pairwise steps that move weight
    from the steepest active atom to the flattest one until their slopes
    agree within ``tol``.
    """

    def fun(w):
        value, grad = objective(_mix(atoms, w))
        slopes = np.real(np.einsum("kd,de,ke->k", atoms.conj(), grad, atoms))
        return value, slopes

    start = fun(w0)[0]
    res = scipy.optimize.minimize(
        fun,
        w0,
        jac=True,
        method="SLSQP",
        bounds=[(0.0, 1.0)] * len(w0),
        constraints=[{"type": "eq", "fun": lambda w: w.sum() - 1.0, "jac": lambda w: np.ones_like(w)}],
        options={"ftol": 1e-12, "maxiter": 100},
    )
    w = np.clip(res.x, 0.0, None)
    w /= w.sum()
    if fun(w)[0] > start:
        w = w0

    for _ in range(pairwise_steps):
        _, slopes = fun(w)
        active = np.flatnonzero(w > 0)
        away = active[np.argmax(slopes[active])]
        toward = int(np.argmin(slopes))
        if slopes[away] - slopes[toward] <= tol:
            break
        step = np.zeros_like(w)
        step[toward], step[away] = 1.0, -1.0
        line = scipy.optimize.minimize_scalar(
            lambda t: fun(w + t * step)[0], bounds=(0.0, w[away]), method="bounded", options={"xatol": 1e-14}
        )
        w = w + line.x * step
        w[away] = max(w[away], 0.0)
    return w


def _reduce(atoms, w, threshold=1e-13):
    """
    Carathéodory reduction: drop atoms while Σ_k w_k |a_k><a_k| stays fixed.

    Weights move along a null direction of the projector map until one of
    them reaches zero, so at most (dim)² atoms survive.
    """
    keep = w > threshold
    atoms, w = atoms[keep], w[keep] / w[keep].sum()
    while True:
        proj = np.einsum("ki,kj->kij", atoms, atoms.conj()).reshape(len(w), -1)
        null = scipy.linalg.null_space(np.vstack([proj.real.T, proj.imag.T]))
        if null.shape[1] == 0:
            return atoms, w
        z = null[:, 0]
        if not np.any(z > 1e-12):
            z = -z
        pos = np.flatnonzero(z > 1e-12)
        ratios = w[pos] / z[pos]
        w = np.clip(w - ratios.min() * z, 0.0, None)
        w[pos[np.argmin(ratios)]] = 0.0
        keep = w > threshold
        atoms, w = atoms[keep], w[keep] / w[keep].sum()


def ree_ppt(rho, max_iter=100, tol=1e-6, seed=0):
    """
    Relative entropy of entanglement by Frank-Wolfe iteration over PPT states.

    The linear subproblem over the PPT set is solved on its extreme points,
    the product pure states, which is exact in 2⊗2 and 2⊗3. The active set
    starts from products of local reference bases weighted to ρ_A ⊗ ρ_B.
    Every iteration re-optimizes all weights and reduces the active set to
    affinely independent atoms. Larger dimensions return the same
    construction as a separable candidate (no exactness claim).

    Args:
        rho (DensityMatrix): Bipartite state with a two-subsystem signature.
        max_iter (int): Outer iteration budget.
        tol (float): Target duality gap in bits.
        seed (int): Seed for the random starts of the product search.

    Returns:
        ReeResult: Value, witness and the final duality gap.

    Raises:
        ValueError: If ``rho`` is not bipartite.
    """
    if len(rho.sig.dims) != 2:
        raise ValueError("ree_ppt needs a bipartite signature, got {}".format(rho.sig.labels))
    dims = rho.sig.dims
    d_a, d_b = dims
    rng = np.random.default_rng(seed)
    rho_a = partial_trace(rho, {rho.sig.labels[0]}).mat
    rho_b = partial_trace(rho, {rho.sig.labels[1]}).mat
    frame_a = _local_frame(d_a, rho_a)
    frame_b = _local_frame(d_b, rho_b)
    atoms = np.array([np.kron(a, b) for a in frame_a for b in frame_b])
    w = np.zeros(len(atoms))
    lam_a = np.clip(scipy.linalg.eigvalsh(rho_a), 0.0, None)
    lam_b = np.clip(scipy.linalg.eigvalsh(rho_b), 0.0, None)
    for i in range(d_a):
        w[i * len(frame_b) : i * len(frame_b) + d_b] = lam_a[i] * lam_b
    w /= w.sum()
    starts = list(frame_a) + [
        v / np.linalg.norm(v) for v in rng.normal(size=(8, d_a)) + 1j * rng.normal(size=(8, d_a))
    ]

    objective = _Objective(rho)
    gap = np.inf
    iteration = 0
    for iteration in range(1, max_iter + 1):
        w = _reweight(atoms, w, objective, tol)
        atoms, w = _reduce(atoms, w)
        sigma = _mix(atoms, w)
        value, grad = objective(sigma)
        lmo_value, vertex = _product_lmo(grad, dims, starts)
        gap = float(np.real(np.trace(grad @ sigma)) - lmo_value)
        logger.debug(
            "ree_ppt iteration {}: value {:.10f} gap {:.3e} atoms {}", iteration, value, gap, len(atoms)
        )
        if gap <= tol:
            break
        atoms = np.vstack([atoms, vertex])
        w = np.append(w, 0.0)
    else:
        logger.warning("ree_ppt stopped after {} iterations with gap {:.3e}", max_iter, gap)

    exact = min(dims) <= 2 and d_a * d_b <= 6
    sigma = (sigma + sigma.conj().T) / 2
    witness = DensityMatrix(sigma / np.trace(sigma).real, rho.sig)
    method = ReeMethod.FRANK_WOLFE if exact else ReeMethod.CANDIDATE
    return ReeResult(max(0.0, value), witness, method, max(gap, 0.0), iteration)


def bell_diagonal_weights(rho):
    """Weights of a two-qubit state on the Bell basis (Phi+, Phi-, Psi+, Psi-)."""
    b = bell_basis()
    return np.real(np.einsum("ji,jk,ki->i", b.conj(), rho.mat, b))

