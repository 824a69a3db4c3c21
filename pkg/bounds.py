from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from loguru import logger

from bosonic.mixtures import (
    classical_env_plob,
    continuous_mixture_upper,
    lossy_mixture_bounds,
    uniform_density,
)
from quantum.channels import check_probability, dephasing, mixture
from quantum.condsim import (
    FiniteSizeParams,
    asymptotic_bound,
    dad_ensemble,
    finite_size_bound,
    memory_ree_bound,
)
from quantum.entro import h2, ree_ppt, reverse_coherent_info
from quantum.opcore import bipartition

CHAIN_ORDER = ("D2", "Q2", "P2", "K")


@dataclass
class CapacityReport:
    """
    One capacity statement with its provenance.

    Attributes:
        channel_id (str): Channel family, e.g. ``dephrasure``.
        params (dict): Parameter name -> value.
        upper (float): Upper bound on the secret-key capacity K.
        lower (float, optional): Achievable rate, None where no achievability
            argument is available.
        exact (bool): Whether lower and upper coincide by a capacity theorem.
        method_notes (list): (quantity, method) pairs.
        capacity_chain (dict): Known values of D2, Q2, P2 and K.
    """

    channel_id: str
    params: dict
    upper: float
    lower: Optional[float] = None
    exact: bool = False
    method_notes: list = field(default_factory=list)
    capacity_chain: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lower is not None and self.lower > self.upper + 1e-9:
            raise ValueError(
                "{}: lower bound {} exceeds upper bound {}".format(self.channel_id, self.lower, self.upper)
            )
        if self.exact and (self.lower is None or abs(self.lower - self.upper) > 1e-12):
            raise ValueError("{}: exact report needs lower == upper".format(self.channel_id))
        chain = self.capacity_chain
        if "D2" in chain and "Q2" in chain and abs(chain["D2"] - chain["Q2"]) > 1e-12:
            raise ValueError("{}: D2 and Q2 must coincide".format(self.channel_id))
        if "P2" in chain and "K" in chain and abs(chain["P2"] - chain["K"]) > 1e-12:
            raise ValueError("{}: P2 and K must coincide".format(self.channel_id))
        if "Q2" in chain and "P2" in chain and chain["Q2"] > chain["P2"] + 1e-12:
            raise ValueError("{}: Q2 exceeds P2".format(self.channel_id))

    @property
    def method(self):
        return ";".join("{}={}".format(q, m) for q, m in self.method_notes)

    def to_dict(self):
        out = asdict(self)
        out["method_notes"] = [list(note) for note in self.method_notes]
        return out


def pipeline_bound(inner_ree, p):
    """(1-p)·E_R of the inner channel's program state."""
    p = check_probability("p", p)
    if inner_ree < 0:
        raise ValueError("REE must be non-negative, got {}".format(inner_ree))
    return (1 - p) * inner_ree


def dephrasure_capacities(p, q):
    """
    Two-way capacities of the dephrasure channel, (1-p)(1-H₂(q)) for all four.

    The upper bound is the erasure pipeline over the dephasing Choi state;
    erasure post-selection followed by hashing on the dephasing Choi state
    achieves it.
    """
    p = check_probability("p", p)
    q = check_probability("q", q)
    upper = pipeline_bound(1 - h2(q), p)
    lower = (1 - p) * (1 - h2(q))
    return CapacityReport(
        "dephrasure",
        {"p": p, "q": q},
        upper,
        lower,
        exact=True,
        method_notes=[
            ("upper", "erasure-pipeline REE of the dephasing Choi state"),
            ("lower", "erasure post-selection with dephasing hashing"),
        ],
        capacity_chain={key: upper for key in CHAIN_ORDER},
    )


def dephrasure_rci(p, q):
    """Hashing rate (1-p)(1-H₂(q)) - H₂(p), always below the capacity."""
    return (1 - check_probability("p", p)) * (1 - h2(check_probability("q", q))) - h2(p)


def ensemble_bound(ens, ree_per_component=None, channel_id="ensemble", params=None, with_rci=False):
    """
    Upper bound Σ_i p_i E_R(σ_P^i) for a channel ensemble.

    Args:
        ens (ChannelEnsemble): Ensemble whose entries carry simulation descriptors.
        ree_per_component (Sequence[float], optional): E_R of each program
            state; computed with ``ree_ppt`` when omitted.
        channel_id (str): Name for the report.
        params (dict, optional): Parameters for the report.
        with_rci (bool): Report max(0, RCI of the mixture) as the lower bound.

    Returns:
        CapacityReport: Non-exact report.
    """
    if ree_per_component is None:
        ree_per_component = [ree_ppt(bipartition(e.sim.program, {"A"})).value for e in ens.entries]
    if len(ree_per_component) != len(ens):
        raise ValueError("{} REE values for {} components".format(len(ree_per_component), len(ens)))
    upper = float(np.dot(ens.probabilities, ree_per_component))
    notes = [("upper", "weighted component REE")]
    lower = None
    if with_rci:
        lower = max(0.0, reverse_coherent_info(mixture(ens)))
        notes.append(("lower", "reverse coherent information of the mixture"))
    return CapacityReport(channel_id, dict(params or {}), upper, lower, method_notes=notes)


def dad_bound(p):
    """K ≤ 1-p from component REEs 0 (replacer) and 1 (identity)."""
    p = check_probability("p", p)
    report = ensemble_bound(dad_ensemble(p), [0.0, 1.0], "dad", {"p": p})
    report.method_notes.append(("components", "E_R(replacer0)=0, E_R(identity)=1"))
    return report


def pipeline_report(inner_ree, p):
    return CapacityReport(
        "pipeline",
        {"inner_ree": inner_ree, "p": p},
        pipeline_bound(inner_ree, p),
        method_notes=[("upper", "erasure pipeline over the inner program state")],
    )


def lossy_mixture_report(probs, etas):
    lower, upper = lossy_mixture_bounds(probs, etas)
    return CapacityReport(
        "lossy-mixture",
        {"probs": list(probs), "etas": list(etas)},
        upper,
        max(0.0, lower),
        method_notes=[("upper", "weighted PLOB"), ("lower", "RCI concavity sandwich")],
    )


def continuous_mixture_report(eta_min, eta_max):
    """Uniform density on [eta_min, eta_max]."""
    result = continuous_mixture_upper(uniform_density(eta_min, eta_max), eta_max, eta_min)
    return CapacityReport(
        "lossy-continuous",
        {"eta_min": eta_min, "eta_max": eta_max},
        result.value,
        method_notes=[("upper", "adaptive quadrature of PLOB, error {:.1e}".format(result.abs_error))],
    )


def classical_env_report(eta, gammas, shifts):
    samples = [(g, z) for g in gammas for z in shifts]
    upper = classical_env_plob(eta, samples)
    return CapacityReport(
        "lossy-classical-env",
        {"eta": eta},
        upper,
        method_notes=[("upper", "PLOB after covariance check on {} samples".format(len(samples)))],
    )


def memory_report(joint_p):
    """
    Memory bound for M correlated uses of DAD channels.

    Axis k of ``joint_p`` indexes the k-th use: 0 for the replacer component
    (E_R = 0) and 1 for the identity (E_R = 1).
    """
    joint_p = np.asarray(joint_p, dtype=float)
    if joint_p.shape != (2,) * joint_p.ndim:
        raise ValueError("DAD memory table must have shape (2, ..., 2), got {}".format(joint_p.shape))
    mem = []
    for k in range(joint_p.ndim):
        others = tuple(a for a in range(joint_p.ndim) if a != k)
        marginal = joint_p.sum(axis=others) if others else joint_p
        mem.append(dad_ensemble(float(np.clip(marginal[0], 0.0, 1.0))))
    upper = memory_ree_bound(mem, joint_p, component_rees=[[0.0, 1.0]] * joint_p.ndim)
    logger.debug("memory bound over {} uses: {}", joint_p.ndim, upper)
    return CapacityReport(
        "memory",
        {"uses": joint_p.ndim, "joint_p": joint_p.ravel().tolist()},
        upper,
        method_notes=[("upper", "joint-distribution weighted sum of component REEs")],
    )


def finite_size_report(sum_ree, n, eps, alpha=1.0):
    params = FiniteSizeParams(int(n), eps, alpha)
    return CapacityReport(
        "finite-size",
        {"sum_ree": sum_ree, "n": int(n), "eps": eps, "alpha": alpha},
        finite_size_bound(params, sum_ree),
        method_notes=[
            ("upper", "finite-size correction of the weighted REE"),
            ("asymptotic", "{:.12g}".format(asymptotic_bound(params, sum_ree))),
        ],
    )


def _pipeline_from_params(params):
    inner_ree = params.get("inner_ree")
    if inner_ree is None:
        inner_ree = ree_ppt(dephasing(params["q"]).choi).value
    return pipeline_report(inner_ree, params["p"])


def report_for(channel, params):
    """
    Dispatch a channel name and its parameters to the matching report.

    Args:
        channel (str): One of the channel names accepted by the CLI.
        params (dict): Parameters keyed by argparse destination.

    Returns:
        CapacityReport: The report.
    """
    if channel == "dephrasure":
        return dephrasure_capacities(params["p"], params["q"])
    if channel == "dad":
        return dad_bound(params["p"])
    if channel == "pipeline":
        return _pipeline_from_params(params)
    if channel == "lossy-mixture":
        return lossy_mixture_report(params["probs"], params["etas"])
    if channel == "lossy-continuous":
        return continuous_mixture_report(params.get("eta_min", 0.0), params["eta_max"])
    if channel == "memory":
        joint = np.asarray(params["joint"], dtype=float)
        uses = int(round(np.log2(joint.size)))
        return memory_report(joint.reshape((2,) * uses))
    if channel == "lossy-classical-env":
        return classical_env_report(params["eta"], params.get("gammas", [0.0]), params.get("shifts", [0j, 1 + 1j]))
    if channel == "finite-size":
        return finite_size_report(params["sum_ree"], params["n"], params["eps"], params.get("alpha", 1.0))
    raise ValueError("unknown channel {!r}".format(channel))
