from typing import NamedTuple

import numpy as np
import scipy.integrate
from loguru import logger

from quantum.channels import check_probability
from quantum.entro import shannon

from .gaussian import LossyChannel, apply_lossy, coherent

LN2 = np.log(2.0)


def plob_bound(eta):
    """
    Secret-key capacity -log₂(1-η) of the pure-loss channel.

    Returns ``inf`` (with a warning) at η = 1.
    """
    eta = check_probability("eta", eta)
    if eta == 1.0:
        logger.warning("PLOB bound of a lossless channel is infinite")
        return float("inf")
    return float(-np.log1p(-eta) / LN2)


def _check_mixture(probs, etas):
    probs = np.asarray(probs, dtype=float)
    etas = np.asarray(etas, dtype=float)
    if probs.shape != etas.shape or probs.ndim != 1 or not len(probs):
        raise ValueError("need matching non-empty probability and transmissivity lists")
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
        raise ValueError("mixture probabilities must be non-negative and sum to 1, got {}".format(probs))
    for eta in etas:
        check_probability("eta", eta)
    return probs, etas


def lossy_mixture_bounds(probs, etas):
    """
    Sandwich for a finite mixture of lossy channels.

    Args:
        probs (Sequence[float]): Mixture probabilities.
        etas (Sequence[float]): Transmissivities in [0, 1].

    Returns:
        tuple: (lower, upper) with upper = Σ_i p_i PLOB(η_i) and
        lower = upper - H(p).
    """
    probs, etas = _check_mixture(probs, etas)
    upper = sum(p * plob_bound(eta) for p, eta in zip(probs, etas) if p > 0)
    return upper - shannon(probs), upper


class QuadratureResult(NamedTuple):
    value: float
    abs_error: float


def uniform_density(lo, hi):
    if not 0.0 <= lo < hi < 1.0:
        raise ValueError("uniform density needs 0 <= lo < hi < 1, got [{}, {}]".format(lo, hi))
    width = hi - lo

    def density(eta):
        return 1.0 / width if lo <= eta <= hi else 0.0

    return density


def continuous_mixture_upper(density, eta_max, eta_min=0.0, epsabs=1e-8):
    """
    Upper bound -∫ p(η) log₂(1-η) dη for a continuous lossy mixture.

    Args:
        density (Callable[[float], float]): Probability density on [eta_min, eta_max].
        eta_max (float): Upper end of the support, below 1.
        eta_min (float): Lower end of the support.
        epsabs (float): Absolute tolerance of the adaptive quadrature.

    Returns:
        QuadratureResult: Integral value and its error estimate.

    Raises:
        ValueError: If eta_max >= 1 or the density does not integrate to 1.
    """
    if not 0.0 <= eta_min < eta_max < 1.0:
        raise ValueError("support must satisfy 0 <= eta_min < eta_max < 1, got [{}, {}]".format(eta_min, eta_max))
    norm, _ = scipy.integrate.quad(density, eta_min, eta_max, epsabs=epsabs)
    if abs(norm - 1.0) > 1e-6:
        raise ValueError("density integrates to {:.8f}, not 1".format(norm))
    value, error = scipy.integrate.quad(
        lambda eta: density(eta) * plob_bound(eta), eta_min, eta_max, epsabs=epsabs
    )
    logger.debug("continuous mixture bound {:.10f} (quadrature error {:.1e})", value, error)
    return QuadratureResult(float(value), float(error))


def classical_env_covariance_check(eta, samples, tol=1e-10):
    """
    Moment-level covariance of the lossy channel with a coherent environment.

    For every (γ, z) sample, a displacement z of the input must move the output
    mean by √η·z whatever γ is, and the γ channel must differ from the vacuum
    environment only by the output displacement γ√(1-η).

    Args:
        eta (float): Transmissivity.
        samples (Iterable[tuple]): (γ, z) pairs of complex amplitudes.
        tol (float): Allowed deviation of the first and second moments.

    Returns:
        bool: True when every sample passes.
    """
    eta = check_probability("eta", eta)
    plain = LossyChannel(eta)
    for gamma, z in samples:
        ch = LossyChannel.classical_environment(eta, gamma)
        base = apply_lossy(ch, coherent(0), 0)
        shifted = apply_lossy(ch, coherent(z), 0)
        reference = apply_lossy(plain, coherent(z), 0)
        input_shift = 2 * np.array([np.real(z), np.imag(z)])
        env_shift = 2 * np.array([ch.displacement.real, ch.displacement.imag])
        checks = [
            np.max(np.abs(shifted.mean - base.mean - np.sqrt(eta) * input_shift)),
            np.max(np.abs(shifted.mean - reference.mean - env_shift)),
            np.max(np.abs(shifted.cov - reference.cov)),
        ]
        if max(checks) > tol:
            logger.debug("covariance check failed for gamma={} z={}: {}", gamma, z, checks)
            return False
    return True


def classical_env_plob(eta, samples):
    """
    PLOB bound of the lossy channel with a classical environment.

    Raises:
        ValueError: If the channel fails the covariance check on ``samples``.
    """
    if not classical_env_covariance_check(eta, samples):
        raise ValueError("channel with eta={} is not covariant on the given samples".format(eta))
    return plob_bound(eta)
