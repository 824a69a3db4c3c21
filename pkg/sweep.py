import csv
import itertools
import json
import multiprocessing as mp
import os
from functools import partial

import wandb
from loguru import logger
from tqdm import tqdm

from bounds import report_for
from utils import format_float

REPORT_COLUMNS = ["lower", "upper", "exact", "method"]


def grid_points(grid):
    """Every combination of the axis values, first axis slowest."""
    names = [axis.name for axis in grid]
    return [dict(zip(names, values)) for values in itertools.product(*[axis.values() for axis in grid])]


def compute_row(point, channel, params):
    """
    Report values for one grid point.

    Args:
        point (dict): Swept parameter values.
        channel (str): Channel name.
        params (dict): Fixed parameters.

    Returns:
        list: Swept values followed by lower, upper, exact and method.
    """
    merged = dict(params)
    merged.update(point)
    if "n" in merged:
        merged["n"] = int(round(merged["n"]))
    report = report_for(channel, merged)
    return list(point.values()) + [report.lower, report.upper, report.exact, report.method]


def _cell(value):
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float) or value is None:
        return format_float(value)
    if isinstance(value, (list, tuple)):
        return ";".join(_cell(v) for v in value)
    return str(value)


def write_csv(path, header, rows):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    logger.info("Wrote {} rows to {}", len(rows), path)


def write_json(path, payload):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info("Wrote report to {}", path)


def write_report(report, opt):
    """Serialize one CapacityReport in the configured format."""
    if opt.format == "json":
        payload = report.to_dict()
        payload["seed"] = opt.seed
        write_json(opt.out, payload)
    else:
        header = list(report.params) + REPORT_COLUMNS
        row = list(report.params.values()) + [report.lower, report.upper, report.exact, report.method]
        write_csv(opt.out, header, [row])


def run_sweep(opt):
    """
    Evaluate the channel report on every grid point, in grid order.

    Rows are computed by a process pool when ``opt.workers > 1``; the ordered
    map keeps the output deterministic.

    Args:
        opt (argparse.Namespace): Configuration from ``post_config``.

    Returns:
        tuple: (header, rows).
    """
    points = grid_points(opt.grid)
    header = [axis.name for axis in opt.grid] + REPORT_COLUMNS
    logger.info("Sweeping {} over {} points", opt.channel, len(points))
    work = partial(compute_row, channel=opt.channel, params=opt.params)
    if opt.workers > 1:
        with mp.Pool(opt.workers) as pool:
            rows = list(tqdm(pool.imap(work, points), total=len(points)))
    else:
        rows = [work(point) for point in tqdm(points)]

    if opt.format == "json":
        write_json(opt.out, {"seed": opt.seed, "channel": opt.channel, "columns": header, "rows": rows})
    else:
        write_csv(opt.out, header, rows)

    if opt.wandb:
        wandb.init(project=opt.project, config={"channel": opt.channel, "seed": opt.seed, **opt.params})
        table = wandb.Table(columns=header)
        for row in rows:
            table.add_data(*[_cell(v) for v in row])
        wandb.log({"sweep": table})
        wandb.finish()
    return header, rows
