import random
from typing import NamedTuple

import numpy as np


def set_seed(seed=0):
    """
    Set all random number generators to a fixed seed for reproducibility.

    This seeds NumPy's legacy global generator and Python's built-in random
    module; code that draws random numbers should use the Generator returned
    by ``make_rng`` instead.

    Args:
        seed (int): The seed value. Default is 0.
    """
    np.random.seed(seed)
    random.seed(seed)


def make_rng(seed):
    return np.random.default_rng(seed)


class GridAxis(NamedTuple):
    """One swept parameter: ``steps`` points from ``start`` to ``stop``."""

    name: str
    start: float
    stop: float
    steps: int
    log: bool = False

    def values(self):
        if self.steps == 1:
            return np.array([self.start])
        if self.log:
            return np.geomspace(self.start, self.stop, self.steps)
        return np.linspace(self.start, self.stop, self.steps)


def parse_grid(spec):
    """
    Parse ``NAME:START:STOP:STEPS[:log]``.

    Raises:
        ValueError: On a malformed spec, steps < 1, start > stop, or a log
            axis that does not start above 0.
    """
    parts = spec.split(":")
    if len(parts) not in (4, 5) or (len(parts) == 5 and parts[4] != "log"):
        raise ValueError("grid spec must be NAME:START:STOP:STEPS[:log], got {!r}".format(spec))
    name, start, stop, steps = parts[0], float(parts[1]), float(parts[2]), int(parts[3])
    axis = GridAxis(name, start, stop, steps, len(parts) == 5)
    if steps < 1:
        raise ValueError("grid {} needs at least one step, got {}".format(name, steps))
    if start > stop:
        raise ValueError("grid {} has start {} above stop {}".format(name, start, stop))
    if axis.log and start <= 0:
        raise ValueError("log grid {} must start above 0".format(name))
    return axis


def parse_floats(text):
    """Comma-separated floats, e.g. ``0.5,0.8``."""
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValueError("expected comma-separated numbers, got {!r}".format(text)) from None


def format_float(x):
    """12 significant digits; None becomes an empty field."""
    if x is None:
        return ""
    return "{:.12g}".format(x)
