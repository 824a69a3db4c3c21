import sys

from loguru import logger

from bosonic.fock import fock_oracle_rel_entropy, fock_rci, fock_trace_deficit
from bosonic.gaussian import gaussian_rci, mutual_information, product_state, quasi_choi
from bounds import report_for
from config import get_arguments, post_config
from sweep import run_sweep, write_json, write_report
from verify import run_suites


def cmd_bounds(opt):
    report = report_for(opt.channel, opt.params)
    logger.info("{}: lower {} upper {:.12g}", report.channel_id, report.lower, report.upper)
    write_report(report, opt)
    return 0


def cmd_sweep(opt):
    run_sweep(opt)
    return 0


def cmd_verify(opt):
    checks = run_suites(opt)
    return 0 if all(c.passed for c in checks) else 1


def cmd_oracle(opt):
    """
    Compare moment-based quantities of a quasi-Choi state with the Fock oracle.
    """
    g = quasi_choi(opt.eta, opt.mu)
    marginals = product_state(g.reduced([0]), g.reduced([1]))
    rows = {
        "eta": opt.eta,
        "mu": opt.mu,
        "cutoff": opt.cutoff,
        "trace_deficit": fock_trace_deficit(g, opt.cutoff),
        "rci_moments": gaussian_rci(opt.eta, opt.mu),
        "rci_fock": fock_rci(opt.eta, opt.mu, opt.cutoff),
        "mutual_information_moments": mutual_information(g, [0], [1]),
        "mutual_information_fock": fock_oracle_rel_entropy(g, marginals, opt.cutoff),
        "seed": opt.seed,
    }
    for key, value in rows.items():
        logger.info("{}: {}", key, value)
    write_json(opt.out, rows)
    return 0


COMMANDS = {
    "bounds": cmd_bounds,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
}


def main(argv=None):
    """
    Command-line entry point.

    - Initializes the logger.
    - Parses and post-processes the arguments; parameter errors exit with 2.
    - Dispatches to the sub-command.

    Returns:
        int: 0 on success, 1 when a verification check fails, 2 on a
        parameter error.
    """
    # Logger init
    logger.remove()
    logger.add(
        sys.stdout,
        colorize=True,
        format="<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | "
        + "<level>{level}</level> | "
        + "<light-black>{file.path}:{line}</light-black> | "
        + "{message}",
    )

    # Parse and configure arguments
    parser = get_arguments()
    opt = parser.parse_args(argv)
    try:
        opt = post_config(opt)
    except ValueError as e:
        parser.error(str(e))

    try:
        return COMMANDS[opt.command](opt)
    except ValueError as e:
        logger.error("{}", e)
        return 2


if __name__ == "__main__":
    sys.exit(main())
