import numpy as np
from loguru import logger
from scipy.special import comb

from quantum.entro import rel_entropy, shannon, vn_entropy
from quantum.opcore import DensityMatrix, SubsystemSignature, partial_trace, tensor

# Truncated Fock-basis oracle for the zero-mean one- and two-mode states
# produced by this package.

MIN_CUTOFF = 10
MAX_DEFICIT = 1e-6
STRUCTURE_TOL = 1e-9


class CutoffTooSmall(ValueError):
    pass


def _check_cutoff(cutoff):
    if cutoff < MIN_CUTOFF:
        raise ValueError("Fock cutoff must be at least {}, got {}".format(MIN_CUTOFF, cutoff))


def _check_deficit(deficit, cutoff):
    logger.debug("Fock truncation at {} leaves trace deficit {:.3e}", cutoff, deficit)
    if deficit > MAX_DEFICIT:
        raise CutoffTooSmall(
            "cutoff {} loses {:.3e} of the trace (allowed {:.0e})".format(cutoff, deficit, MAX_DEFICIT)
        )


def thermal_populations(nu, cutoff):
    """Photon-number distribution (1-x) x^n, x = (ν-1)/(ν+1), truncated."""
    x = (nu - 1) / (nu + 1)
    return (1 - x) * x ** np.arange(cutoff)


def fock_thermal(nu, cutoff, label="A"):
    """
    Thermal state of variance ``nu`` on the first ``cutoff`` Fock levels.

    Raises:
        CutoffTooSmall: If the discarded population exceeds 1e-6.
    """
    _check_cutoff(cutoff)
    probs = thermal_populations(nu, cutoff)
    _check_deficit(1.0 - probs.sum(), cutoff)
    return DensityMatrix(np.diag(probs / probs.sum()), SubsystemSignature.single(cutoff, label))


def lossy_tmsv_vectors(mu, eta, cutoff, sign=1.0):
    """
    Unnormalized pure components of the lossy TMSV.

    Row k is the branch where k photons leak to the environment:
    Σ_n c_n √C(n,k) η^((n-k)/2) (1-η)^(k/2) s^n |n>|n-k>, with
    c_n = √(1-λ²) λ^n and λ² = (μ-1)/(μ+1).
    """
    lam = np.sqrt((mu - 1) / (mu + 1))
    n = np.arange(cutoff)
    c = np.sqrt(1 - lam**2) * lam**n * sign**n
    vecs = np.zeros((cutoff, cutoff, cutoff))
    for k in range(cutoff):
        m = n[k:] - k
        amp = np.sqrt(comb(n[k:], k)) * eta ** (m / 2) * (1 - eta) ** (k / 2)
        vecs[k, n[k:], m] = c[k:] * amp
    return vecs.reshape(cutoff, cutoff * cutoff)


def fock_lossy_tmsv(mu, eta, cutoff, sign=1.0):
    """
    TMSV(μ) with mode B through a pure-loss channel, in the truncated Fock basis.

    Args:
        mu (float): TMSV variance.
        eta (float): Transmissivity.
        cutoff (int): Levels kept per mode.
        sign (float): Sign of the A-B correlation.

    Returns:
        DensityMatrix: Renormalized state with signature (A: cutoff, B: cutoff).

    Raises:
        CutoffTooSmall: If the discarded population exceeds 1e-6.
    """
    _check_cutoff(cutoff)
    vecs = lossy_tmsv_vectors(mu, eta, cutoff, sign)
    rho = vecs.T @ vecs.conj()
    trace = np.trace(rho).real
    _check_deficit(1.0 - trace, cutoff)
    return DensityMatrix(rho / trace, SubsystemSignature((cutoff, cutoff), ("A", "B")))


def fock_tmsv(mu, cutoff):
    return fock_lossy_tmsv(mu, 1.0, cutoff)


def _scalar_block(block):
    """Value a with block = a·I, or None."""
    a = block[0, 0]
    if np.max(np.abs(block - a * np.eye(2))) <= STRUCTURE_TOL * max(1.0, abs(a)):
        return a
    return None


def fock_oracle(g, cutoff):
    """
    Truncated Fock representation of a recognized zero-mean Gaussian state.

    Recognized states are single-mode thermal states, products of two thermal
    modes and pure-loss quasi-Choi states (a TMSV with loss on mode B).

    Args:
        g (GaussianState): One- or two-mode state with zero mean.
        cutoff (int): Levels kept per mode, at least 10.

    Returns:
        DensityMatrix: The truncated, renormalized state.

    Raises:
        ValueError: For a displaced or unrecognized state.
        CutoffTooSmall: If the truncation loses more than 1e-6 of the trace.
    """
    _check_cutoff(cutoff)
    if np.max(np.abs(g.mean)) > STRUCTURE_TOL:
        raise ValueError("Fock oracle handles zero-mean states only")
    if g.n_modes == 1:
        nu = _scalar_block(g.cov)
        if nu is None:
            raise ValueError("single-mode state is not thermal")
        return fock_thermal(nu, cutoff)
    if g.n_modes != 2:
        raise ValueError("Fock oracle handles at most two modes, got {}".format(g.n_modes))
    a = _scalar_block(g.cov[:2, :2])
    b = _scalar_block(g.cov[2:, 2:])
    cross = g.cov[:2, 2:]
    c = cross[0, 0]
    if a is None or b is None or np.max(np.abs(cross - c * np.diag([1.0, -1.0]))) > STRUCTURE_TOL * max(1.0, a):
        raise ValueError("two-mode state is not in the recognized standard form")
    if abs(c) <= STRUCTURE_TOL:
        return tensor(fock_thermal(a, cutoff, "A"), fock_thermal(b, cutoff, "B"))
    eta = c**2 / (a**2 - 1)
    if abs(b - (eta * a + 1 - eta)) > 1e-8 * max(1.0, a):
        raise ValueError("two-mode state is not a pure-loss quasi-Choi state")
    return fock_lossy_tmsv(a, eta, cutoff, np.sign(c))


def fock_trace_deficit(g, cutoff):
    """Population lost by truncating ``g`` at ``cutoff``, before renormalization."""
    if g.n_modes == 1:
        return 1.0 - thermal_populations(g.cov[0, 0], cutoff).sum()
    c = g.cov[0, 2]
    a = g.cov[0, 0]
    if abs(c) <= STRUCTURE_TOL:
        return 1.0 - thermal_populations(a, cutoff).sum() * thermal_populations(g.cov[2, 2], cutoff).sum()
    vecs = lossy_tmsv_vectors(a, c**2 / (a**2 - 1), cutoff)
    return 1.0 - float(np.sum(np.abs(vecs) ** 2))


def fock_oracle_rel_entropy(g1, g2, cutoff):
    """Relative entropy in bits of the two truncated states."""
    return rel_entropy(fock_oracle(g1, cutoff), fock_oracle(g2, cutoff))


def _rci(rho):
    return vn_entropy(partial_trace(rho, {"A"})) - vn_entropy(rho)


def fock_rci(eta, mu, cutoff):
    """Reverse coherent information of the truncated quasi-Choi state."""
    return _rci(fock_lossy_tmsv(mu, eta, cutoff))


def fock_mixture_rci(probs, etas, mu, cutoff):
    """
    Reverse coherent information of Σ_i p_i ρ^μ_{η_i} and its concavity floor.

    Returns:
        tuple: (RCI of the mixed state, Σ_i p_i RCI_i - H(p)).
    """
    probs = np.asarray(probs, dtype=float)
    states = [fock_lossy_tmsv(mu, eta, cutoff) for eta in etas]
    mixed = DensityMatrix(sum(p * s.mat for p, s in zip(probs, states)), states[0].sig)
    floor = sum(p * _rci(s) for p, s in zip(probs, states)) - shannon(probs)
    return _rci(mixed), floor
