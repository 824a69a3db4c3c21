from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg
import scipy.optimize
from loguru import logger
from scipy.special import xlogy

# Gaussian states in the quadrature ordering (x1, p1, x2, p2, ...) with
# vacuum covariance equal to the identity.

LN2 = np.log(2.0)
PT = np.diag([1.0, 1.0, 1.0, -1.0])


class IllConditionedState(ValueError):
    pass


def symplectic_form(m):
    return np.kron(np.eye(m), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _mode_slice(mode):
    return slice(2 * mode, 2 * mode + 2)


@dataclass(frozen=True, eq=False)
class GaussianState:
    """
    First and second moments of an m-mode Gaussian state.

    Attributes:
        mean (np.ndarray): Mean quadratures of length 2m.
        cov (np.ndarray): Symmetric 2m x 2m covariance matrix, vacuum = I.

    Raises:
        ValueError: If the covariance is not symmetric or violates V + iΩ ⪰ 0.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        cov = np.array(self.cov, dtype=float)
        mean = np.array(self.mean, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ValueError("covariance must be 2m x 2m, got {}".format(cov.shape))
        if mean.shape != (cov.shape[0],):
            raise ValueError("mean of shape {} for a {}-dim covariance".format(mean.shape, cov.shape[0]))
        if np.max(np.abs(cov - cov.T)) > 1e-12 * max(1.0, np.max(np.abs(cov))):
            raise ValueError("covariance matrix is not symmetric")
        cov = (cov + cov.T) / 2
        lowest = scipy.linalg.eigvalsh(cov + 1j * symplectic_form(cov.shape[0] // 2))[0]
        if lowest < -1e-9 * max(1.0, np.max(np.abs(cov))):
            raise ValueError("covariance violates the uncertainty principle (lowest eigenvalue {:.3e})".format(lowest))
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "mean", mean)

    @property
    def n_modes(self):
        return self.cov.shape[0] // 2

    def reduced(self, modes):
        """Marginal state of the listed modes, in the given order."""
        idx = np.concatenate([np.arange(2 * k, 2 * k + 2) for k in modes])
        return GaussianState(self.mean[idx], self.cov[np.ix_(idx, idx)])

    def centered(self):
        return GaussianState(np.zeros_like(self.mean), self.cov)


@dataclass(frozen=True)
class LossyChannel:
    """
    Beam splitter of transmissivity ``eta`` with a vacuum environment,
    followed by an output displacement (complex amplitude).
    """

    eta: float
    displacement: complex = 0j

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("transmissivity must lie in [0, 1], got {}".format(self.eta))

    @classmethod
    def classical_environment(cls, eta, gamma):
        """Lossy channel whose environment is the coherent state |γ>."""
        return cls(eta, complex(gamma) * np.sqrt(1 - eta))


def vacuum(m=1):
    return GaussianState(np.zeros(2 * m), np.eye(2 * m))


def thermal(nu):
    if nu < 1:
        raise ValueError("thermal variance must be at least 1, got {}".format(nu))
    return GaussianState(np.zeros(2), nu * np.eye(2))


def coherent(alpha):
    return GaussianState([2 * np.real(alpha), 2 * np.imag(alpha)], np.eye(2))


def tmsv(mu):
    """
    Two-mode squeezed vacuum with local variance ``mu``.

    Raises:
        ValueError: If ``mu < 1``.
    """
    if mu < 1:
        raise ValueError("TMSV variance must be at least 1, got {}".format(mu))
    c = np.sqrt(mu**2 - 1)
    z = np.diag([1.0, -1.0])
    cov = np.block([[mu * np.eye(2), c * z], [c * z, mu * np.eye(2)]])
    return GaussianState(np.zeros(4), cov)


def product_state(*states):
    return GaussianState(
        np.concatenate([g.mean for g in states]),
        scipy.linalg.block_diag(*[g.cov for g in states]),
    )


def apply_lossy(ch, g, mode):
    """
    Send one mode of ``g`` through a lossy channel.

    Args:
        ch (LossyChannel): The channel.
        g (GaussianState): Input state.
        mode (int): Index of the mode acted on.

    Returns:
        GaussianState: V -> X V Xᵀ + Y on the mode block, X = √η I, Y = (1-η) I;
        the mean is scaled by √η and shifted by the output displacement.
    """
    if not 0 <= mode < g.n_modes:
        raise IndexError("mode {} of a {}-mode state".format(mode, g.n_modes))
    x = np.eye(2 * g.n_modes)
    y = np.zeros_like(x)
    block = _mode_slice(mode)
    x[block, block] *= np.sqrt(ch.eta)
    y[block, block] = (1 - ch.eta) * np.eye(2)
    mean = x @ g.mean
    mean[block] += 2 * np.array([ch.displacement.real, ch.displacement.imag])
    return GaussianState(mean, x @ g.cov @ x.T + y)


def quasi_choi(eta, mu):
    """TMSV(μ) with its second mode sent through the lossy channel."""
    return apply_lossy(LossyChannel(eta), tmsv(mu), 1)


def symplectic_eigenvalues(cov):
    """Ascending symplectic eigenvalues, the paired moduli of eig(iΩV)."""
    omega = symplectic_form(cov.shape[0] // 2)
    moduli = np.sort(np.abs(np.linalg.eigvals(1j * omega @ cov)))
    return moduli[::2]


def entropy_h(nu):
    """
    Entropy in bits of a thermal mode with symplectic eigenvalue ``nu``.

    h(ν) = ((ν+1)/2) log₂((ν+1)/2) - ((ν-1)/2) log₂((ν-1)/2), with h(1) = 0.
    """
    nu = np.maximum(np.asarray(nu, dtype=float), 1.0)
    plus, minus = (nu + 1) / 2, (nu - 1) / 2
    return (xlogy(plus, plus) - xlogy(minus, minus)) / LN2


def symplectic_entropy(g):
    return float(np.sum(entropy_h(symplectic_eigenvalues(g.cov))))


def reverse_coherent_info(g):
    """S(A) - S(AB) of a two-mode state with mode 0 as A."""
    return symplectic_entropy(g.reduced([0])) - symplectic_entropy(g)


def gaussian_rci(eta, mu):
    """
    Reverse coherent information of the pure-loss quasi-Choi state.

    The joint state of A and B is purified by the environment mode, which is
    thermal with variance (1-η)μ + η, so I(A>B) = h(μ) - h((1-η)μ + η).
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("transmissivity must lie in [0, 1], got {}".format(eta))
    if mu < 1:
        raise ValueError("TMSV variance must be at least 1, got {}".format(mu))
    return float(entropy_h(mu) - entropy_h((1 - eta) * mu + eta))


def mutual_information(g, alice, bob):
    return (
        symplectic_entropy(g.reduced(alice))
        + symplectic_entropy(g.reduced(bob))
        - symplectic_entropy(g)
    )


def gibbs_exponent(cov):
    """
    Matrix H with ρ ∝ exp(-¼ xᵀ H x) for a zero-mean state of covariance ``cov``.

    Raises:
        IllConditionedState: If a symplectic eigenvalue is within 1e-9 of 1,
            where the state is not full rank.
    """
    omega = symplectic_form(cov.shape[0] // 2)
    evals, evecs = np.linalg.eig(1j * cov @ omega)
    margin = np.min(np.abs(evals)) - 1.0
    if margin <= 1e-9:
        raise IllConditionedState(
            "state has a symplectic eigenvalue {:.3e} from 1, its Gibbs exponent diverges".format(margin)
        )
    f = evecs @ np.diag(np.arctanh(1.0 / evals)) @ np.linalg.inv(evecs)
    h = (2j * omega @ f).real
    return (h + h.T) / 2


def gaussian_rel_entropy(g1, g2):
    """
    Relative entropy S(ρ₁‖ρ₂) in bits from moments.

    -Tr ρ₁ ln ρ₂ = Σ_k [ln((ν_k+1)/2) - β_k/2] + ¼ [Tr(H V₁) + δᵀ H δ], where ν_k
    are the symplectic eigenvalues of ρ₂, β_k = ln((ν_k+1)/(ν_k-1)), H its Gibbs
    exponent and δ the mean difference.

    Args:
        g1 (GaussianState): First argument.
        g2 (GaussianState): Full-rank second argument.

    Returns:
        float: The relative entropy in bits.

    Raises:
        ValueError: If the mode counts differ.
        IllConditionedState: If ``g2`` is not full rank.
    """
    if g1.n_modes != g2.n_modes:
        raise ValueError("relative entropy of {}- and {}-mode states".format(g1.n_modes, g2.n_modes))
    h = gibbs_exponent(g2.cov)
    nu = symplectic_eigenvalues(g2.cov)
    beta = np.log((nu + 1) / (nu - 1))
    delta = g1.mean - g2.mean
    cross = np.sum(np.log((nu + 1) / 2) - beta / 2) + 0.25 * (np.trace(h @ g1.cov) + delta @ h @ delta)
    return float(cross / LN2 - symplectic_entropy(g1))


def min_pt_eigenvalue(cov):
    """Smallest symplectic eigenvalue of the partial transpose of a two-mode covariance."""
    return float(symplectic_eigenvalues(PT @ cov @ PT)[0])


def separable_candidate(g):
    """
    Separable two-mode state obtained by shrinking the A-B correlation block.

    The correlation block is scaled by t in [0, 1] until the smallest partially
    transposed symplectic eigenvalue equals 1. Every such state is a convex
    combination of ``g`` and the product of its marginals, hence physical; a
    PPT two-mode Gaussian state is separable.

    Args:
        g (GaussianState): Two-mode state.

    Returns:
        GaussianState: ``g`` itself when it is already PPT, otherwise the
        candidate on the PPT boundary.
    """
    if g.n_modes != 2:
        raise ValueError("separable candidate needs a two-mode state, got {}".format(g.n_modes))

    def scaled(t):
        cov = g.cov.copy()
        cov[:2, 2:] *= t
        cov[2:, :2] *= t
        return cov

    if min_pt_eigenvalue(g.cov) >= 1.0:
        return g
    t = scipy.optimize.brentq(lambda t: min_pt_eigenvalue(scaled(t)) - 1.0, 0.0, 1.0, xtol=1e-14)
    logger.debug("separable candidate at correlation scale {:.6f}", t)
    return GaussianState(g.mean, scaled(t))


def candidate_ree(g):
    """Upper bound on the REE of ``g`` from its separable candidate."""
    return gaussian_rel_entropy(g, separable_candidate(g))


class AsymptoticReeSequence(NamedTuple):
    mus: tuple
    values: tuple
    limit: float


def asymptotic_ree_sequence(eta, mus):
    """
    Candidate REE of the quasi-Choi state along a μ grid, with the analytic
    liminf -log₂(1-η) of the lossy channel.
    """
    values = tuple(candidate_ree(quasi_choi(eta, mu)) for mu in mus)
    limit = float(-np.log1p(-eta) / LN2) if eta < 1 else float("inf")
    return AsymptoticReeSequence(tuple(mus), values, limit)
