import argparse
import os
from dataclasses import replace

import numpy as np

from quantum.opcore import POLICY
from utils import make_rng, parse_floats, parse_grid, set_seed

BOUND_CHANNELS = (
    "dephrasure",
    "dad",
    "pipeline",
    "lossy-mixture",
    "lossy-continuous",
    "memory",
    "lossy-classical-env",
    "finite-size",
)
SWEEP_CHANNELS = ("dephrasure", "dad", "pipeline", "finite-size")
SUITES = ("condsim", "teleport", "ree", "gaussian", "all")

# Parameters each channel needs, by argparse destination.
REQUIRED = {
    "dephrasure": ("p", "q"),
    "dad": ("p",),
    "pipeline": ("p",),
    "lossy-mixture": ("probs", "etas"),
    "lossy-continuous": ("eta_max",),
    "memory": ("joint",),
    "lossy-classical-env": ("eta",),
    "finite-size": ("sum_ree", "n", "eps"),
}
MAX_SWEPT = 2


def _common_parser():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--seed", type=int, default=42, help="seed for randomized checks")
    parser.add_argument("--out", default=None, help="output file (default output/<command>-<name>.<format>)")
    parser.add_argument("--format", choices=("csv", "json"), default=None, help="report format")
    parser.add_argument(
        "--sim-tol", type=float, default=POLICY.simulation, help="max-norm tolerance for simulated channels"
    )
    parser.add_argument("--ree-tol", type=float, default=1e-6, help="Frank-Wolfe duality gap target")
    return parser


def _channel_parser():
    parser = argparse.ArgumentParser(add_help=False)
    # discrete-variable channels:
    parser.add_argument("--p", type=float, help="erasure / replacer probability")
    parser.add_argument("--q", type=float, help="dephasing probability")
    parser.add_argument("--inner-ree", type=float, help="REE of the inner channel of a pipeline")
    # bosonic channels:
    parser.add_argument("--probs", type=parse_floats, help="mixture probabilities, comma separated")
    parser.add_argument("--etas", type=parse_floats, help="transmissivities, comma separated")
    parser.add_argument("--eta", type=float, help="transmissivity")
    parser.add_argument("--eta-min", type=float, default=0.0, help="lower end of a uniform density")
    parser.add_argument("--eta-max", type=float, help="upper end of a uniform density")
    parser.add_argument(
        "--gammas", type=parse_floats, default=[0.0, 0.5, 1.0], help="environment amplitudes to check"
    )
    # memory and finite-size:
    parser.add_argument("--joint", type=parse_floats, help="joint DAD table, 2^M entries in row-major order")
    parser.add_argument("--sum-ree", type=float, help="weighted component REE")
    parser.add_argument("--n", type=float, help="number of channel uses")
    parser.add_argument("--eps", type=float, help="security parameter")
    parser.add_argument("--alpha", type=float, default=1.0, help="dimension constant")
    return parser


def get_arguments():
    """
    Parses and returns command-line arguments for reports, sweeps and checks.

    Returns:
        argparse.ArgumentParser: A parser with the sub-commands bounds, sweep,
        verify and oracle.
    """
    common = _common_parser()
    channel = _channel_parser()
    parser = argparse.ArgumentParser(
        description="Capacity bounds of channel mixtures via conditional simulation."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    bounds = sub.add_parser("bounds", parents=[common, channel], help="one capacity report")
    bounds.add_argument("channel", choices=BOUND_CHANNELS)

    sweep = sub.add_parser("sweep", parents=[common, channel], help="capacity bounds over a grid")
    sweep.add_argument("channel", choices=SWEEP_CHANNELS)
    sweep.add_argument(
        "--grid",
        action="append",
        default=[],
        help="swept parameter NAME:START:STOP:STEPS[:log], at most two",
    )
    sweep.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    sweep.add_argument("--wandb", action="store_true", help="log the sweep table to Weights & Biases")
    sweep.add_argument("--project", default="channel-mixtures", help="wandb project")

    verify = sub.add_parser("verify", parents=[common], help="run verification suites")
    verify.add_argument("suite", choices=SUITES)

    oracle = sub.add_parser("oracle", parents=[common], help="moments against the Fock oracle")
    oracle.add_argument("--eta", type=float, default=0.5, help="transmissivity")
    oracle.add_argument("--mu", type=float, default=1.5, help="TMSV variance")
    oracle.add_argument("--cutoff", type=int, default=40, help="Fock levels per mode")

    return parser


def _channel_params(opt, swept=()):
    missing = [
        "--" + name.replace("_", "-")
        for name in REQUIRED[opt.channel]
        if name not in swept and getattr(opt, name) is None
    ]
    if opt.channel == "pipeline" and opt.inner_ree is None and opt.q is None and "inner_ree" not in swept:
        missing.append("--inner-ree or --q")
    if missing:
        raise ValueError("{} needs {}".format(opt.channel, ", ".join(missing)))
    params = {
        name: getattr(opt, name)
        for name in ("p", "q", "inner_ree", "probs", "etas", "eta", "eta_min", "eta_max",
                     "gammas", "joint", "sum_ree", "n", "eps", "alpha")
        if getattr(opt, name) is not None
    }
    if opt.channel == "lossy-classical-env":
        shifts = opt.rng.normal(size=(4, 2))
        params["shifts"] = [complex(a, b) for a, b in shifts]
    return params


def post_config(opt):
    """
    Initializes and adjusts various configuration parameters after parsing.

    Args:
        opt (argparse.Namespace): The parsed command-line arguments.

    Returns:
        argparse.Namespace: The updated configuration with initialized values.

    Raises:
        ValueError: On missing channel parameters or an invalid grid.
    """
    set_seed(opt.seed)
    opt.rng = make_rng(opt.seed)
    if opt.sim_tol <= 0 or opt.ree_tol <= 0:
        raise ValueError("tolerances must be positive")
    opt.policy = replace(POLICY, simulation=opt.sim_tol)

    name = getattr(opt, "channel", None) or getattr(opt, "suite", None) or opt.command
    if opt.format is None:
        opt.format = "csv" if opt.command == "sweep" else "json"
    if opt.out is None:
        opt.out = os.path.join("output", "{}-{}.{}".format(opt.command, name, opt.format))

    opt.grid = [parse_grid(spec) for spec in getattr(opt, "grid", [])]
    if opt.command == "sweep":
        if not 1 <= len(opt.grid) <= MAX_SWEPT:
            raise ValueError("sweep needs 1 to {} grid axes, got {}".format(MAX_SWEPT, len(opt.grid)))
        names = [axis.name for axis in opt.grid]
        if len(set(names)) != len(names):
            raise ValueError("grid axes must be distinct, got {}".format(names))
        allowed = set(REQUIRED[opt.channel]) | {"alpha", "q", "inner_ree"}
        unknown = [n for n in names if n not in allowed]
        if unknown:
            raise ValueError("{} cannot sweep {}".format(opt.channel, unknown))
        opt.params = _channel_params(opt, names)
    elif opt.command == "bounds":
        opt.params = _channel_params(opt)
        if opt.channel == "memory":
            uses = np.log2(len(opt.params["joint"]))
            if uses < 1 or uses != int(uses):
                raise ValueError("--joint needs 2^M entries, got {}".format(len(opt.params["joint"])))
    return opt
