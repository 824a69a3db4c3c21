from dataclasses import dataclass

import numpy as np
from loguru import logger
from tqdm import tqdm

from bosonic.fock import fock_oracle_rel_entropy, fock_rci
from bosonic.gaussian import gaussian_rci, gaussian_rel_entropy, mutual_information, product_state, quasi_choi, thermal
from bosonic.mixtures import continuous_mixture_upper, lossy_mixture_bounds, plob_bound, uniform_density
from quantum.channels import dephasing, erasure_flag, identity, mixture, replacer0, tensor_channels
from quantum.condsim import (
    ChainViolation,
    build_control_program,
    conditional_channel,
    covariant_descriptor,
    dad_ensemble,
    dephrasure_ensemble,
    descriptor_deviation,
    joint_descriptor,
    random_pauli_ensemble,
    ree_chain_bound,
    verify_simulation,
)
from quantum.entro import h2, ree_bell_diagonal, ree_ppt, ree_upper
from quantum.opcore import (
    DensityMatrix,
    bell_diagonal_state,
    bell_state,
    bipartition,
    max_norm,
    random_density_matrix,
    random_unitary,
    tensor,
)
from quantum.telecov import WeylGroup, joint_covariance


@dataclass(frozen=True)
class Check:
    name: str
    deviation: float
    threshold: float

    @property
    def passed(self):
        return self.deviation <= self.threshold

    def line(self):
        return "{:<6} {:<48} deviation {:.3e} threshold {:.1e}".format(
            "PASS" if self.passed else "FAIL", self.name, self.deviation, self.threshold
        )


def _flag(name, value, expected):
    return Check(name, 0.0 if value == expected else 1.0, 0.0)


def _choi_check(name, ens, tol):
    theta = build_control_program(ens)
    simulated = conditional_channel(theta, [e.sim for e in ens.entries])
    return Check(name, max_norm(simulated.choi.mat - mixture(ens).choi.mat), tol)


def condsim_checks(opt):
    """Conditional simulation against the average channel."""
    tol = opt.policy.simulation
    checks = []
    for p in np.linspace(0, 1, 11):
        checks.append(_choi_check("condsim dad p={:.1f}".format(p), dad_ensemble(p), tol))
    for p in np.linspace(0, 1, 5):
        for q in np.linspace(0, 1, 5):
            ens = dephrasure_ensemble(p, q)
            checks.append(_choi_check("condsim dephrasure p={:.2f} q={:.2f}".format(p, q), ens, tol))
    ens = random_pauli_ensemble(5, opt.rng)
    checks.append(_choi_check("condsim random pauli ensemble", ens, tol))
    checks.append(Check("operator-basis deviation pauli ensemble", verify_simulation(ens), tol))
    return checks


def teleport_checks(opt):
    """Teleportation over the Choi state of covariant channels."""
    tol = opt.policy.simulation
    channels = [identity(2), replacer0(), erasure_flag(2)]
    channels += [dephasing(q).renamed("dephasing q={}".format(q)) for q in (0.0, 0.1, 0.5)]
    checks = [
        Check("teleport " + ch.name, descriptor_deviation(ch, covariant_descriptor(ch)), tol)
        for ch in channels
    ]
    group = WeylGroup(2)
    checks.append(_flag("joint covariance dad is false", joint_covariance(dad_ensemble(0.3), group), False))
    flagged = dephrasure_ensemble(0.2, 0.1)
    checks.append(_flag("joint covariance dephrasure via flag identity", joint_covariance(flagged, group), True))
    checks.append(
        Check("single teleportation of dephrasure mixture", descriptor_deviation(mixture(flagged), joint_descriptor(flagged)), tol)
    )
    pauli = random_pauli_ensemble(3, opt.rng)
    checks.append(_flag("joint covariance pauli is true", joint_covariance(pauli, group), True))
    average = mixture(pauli)
    checks.append(
        Check("single teleportation of pauli mixture", descriptor_deviation(average, joint_descriptor(pauli)), tol)
    )
    return checks


def chain_check(name, theta, ree_oracle, tol=1e-3):
    """Chain inequality as a check; a violation is recorded with its excess."""
    try:
        bound = ree_chain_bound(theta, ree_oracle, tol=tol)
    except ChainViolation as err:
        return Check(name, err.e_theta - err.sum_bound, tol)
    return Check(name, max(0.0, bound.e_theta - bound.sum_bound), tol)


def ree_checks(opt):
    """Frank-Wolfe REE against closed forms and the chain inequality."""
    tol = opt.ree_tol
    checks = [Check("ree bell state", abs(ree_ppt(bell_state(2), tol=tol).value - 1.0), 1e-3)]
    for k in range(3):
        a = random_density_matrix(2, opt.rng, labels=("A",))
        b = random_density_matrix(2, opt.rng, labels=("B",))
        checks.append(Check("ree product state {}".format(k), ree_ppt(tensor(a, b), tol=tol).value, 1e-6))
    for q in (0.05, 0.1, 0.25):
        value = ree_ppt(dephasing(q).choi, tol=tol).value
        checks.append(Check("ree dephasing choi q={}".format(q), abs(value - (1 - h2(q))), 1e-3))
    for lam in (0.6, 0.7, 0.9):
        weights = [lam] + [(1 - lam) / 3] * 3
        value = ree_ppt(bell_diagonal_state(weights), tol=tol).value
        checks.append(
            Check("ree bell-diagonal lambda={}".format(lam), abs(value - ree_bell_diagonal(weights).value), 1e-3)
        )
    weights = [0.7, 0.1, 0.1, 0.1]
    local = np.kron(random_unitary(2, opt.rng), random_unitary(2, opt.rng))
    rotated = DensityMatrix(local @ bell_diagonal_state(weights).mat @ local.conj().T, bell_state(2).sig)
    deviation = abs(ree_ppt(rotated, tol=tol).value - ree_bell_diagonal(weights).value)
    checks.append(Check("ree local unitary invariance", deviation, 1e-3))
    single = ree_ppt(dephasing(0.1).choi, tol=tol)
    two_use = tensor_channels(dephasing(0.1), dephasing(0.1)).choi
    upper = ree_upper(two_use, bipartition(tensor(single.witness, single.witness), {"A"}))
    checks.append(Check("ree two-use within twice single-use", max(0.0, upper - 2 * single.value), 1e-9))

    def oracle(rho):
        return ree_ppt(rho, tol=tol).value

    for k in range(20):
        theta = build_control_program(random_pauli_ensemble(2, opt.rng))
        checks.append(chain_check("ree chain ensemble {}".format(k), theta, oracle))
    return checks


def gaussian_checks(opt):
    """Moment calculus against limits, closed forms and the Fock oracle."""
    checks = []
    for eta in (0.1, 0.5, 0.7, 0.9):
        mu = 1e5 if eta == 0.9 else 1e4
        gap = abs(gaussian_rci(eta, mu) - plob_bound(eta))
        checks.append(Check("rci limit eta={} mu={:.0e}".format(eta, mu), gap, 1e-3))
    checks.append(Check("rci moments vs fock", abs(gaussian_rci(0.5, 1.5) - fock_rci(0.5, 1.5, 40)), 1e-6))
    g = quasi_choi(0.5, 1.5)
    marginals = product_state(g.reduced([0]), g.reduced([1]))
    checks.append(
        Check(
            "mutual information moments vs fock",
            abs(mutual_information(g, [0], [1]) - fock_oracle_rel_entropy(g, marginals, 40)),
            1e-6,
        )
    )
    checks.append(
        Check(
            "thermal relative entropy moments vs fock",
            abs(gaussian_rel_entropy(thermal(1.2), thermal(3.0)) - fock_oracle_rel_entropy(thermal(1.2), thermal(3.0), 40)),
            1e-6,
        )
    )
    lower, upper = lossy_mixture_bounds([0.5, 0.5], [0.5, 0.8])
    checks.append(Check("lossy mixture upper", abs(upper - (0.5 + 0.5 * np.log2(5))), 1e-9))
    checks.append(Check("lossy mixture lower", abs(lower - (0.5 * np.log2(5) - 0.5)), 1e-9))
    uniform = continuous_mixture_upper(uniform_density(0.0, 0.5), 0.5)
    checks.append(Check("uniform continuous mixture", abs(uniform.value - (1 / np.log(2) - 1)), 1e-6))
    return checks


SUITES = {
    "condsim": condsim_checks,
    "teleport": teleport_checks,
    "ree": ree_checks,
    "gaussian": gaussian_checks,
}


def run_suites(opt):
    """
    Run the selected verification suite (or all of them) and print a summary.

    Returns:
        list: Every Check that was evaluated.
    """
    names = list(SUITES) if opt.suite == "all" else [opt.suite]
    checks = []
    for name in names:
        logger.info("Running {} checks", name)
        suite = SUITES[name](opt)
        for check in tqdm(suite, desc=name):
            tqdm.write(check.line())
        checks += suite
    failed = [c for c in checks if not c.passed]
    if failed:
        logger.error("{} of {} checks failed", len(failed), len(checks))
    else:
        logger.info("All {} checks passed", len(checks))
    return checks
