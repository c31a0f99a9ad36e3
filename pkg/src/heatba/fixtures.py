"""Named driving functions used by ``verify``, the tests and the shipped CSVs.

Line fixtures live on ``[-16, 16]`` with 4097 nodes (step 1/128); periodic
ones on ``[-8 pi, 8 pi]`` (four periods of ``sin``) with 4097 nodes; circle
fixtures on ``[0, 1]`` with 1025 nodes.
"""
from __future__ import annotations

import math

import numpy as np

from .funcspace import SampledFunction

LINE = (-16.0, 16.0, 4097)
PERIODIC = (-8.0 * math.pi, 8.0 * math.pi, 4097)
CIRCLE = (0.0, 1.0, 1025)


def constant(c, window=LINE):
    lo, hi, n = window
    return SampledFunction(np.full(n, c), lo, hi, "constant-extend", lambda x: np.full(np.shape(x), c))


def sine(a, window=PERIODIC):
    lo, hi, n = window
    return SampledFunction.from_callable(lambda x: a * np.sin(x), lo, hi, n, "periodic")


def gaussian(s, window=LINE):
    lo, hi, n = window
    return SampledFunction.from_callable(lambda x: s * np.exp(-x * x), lo, hi, n)


def mixed(window=LINE):
    """``0.1 sin + 0.05 i e^{-x^2}`` held constant outside the window."""
    lo, hi, n = window
    return SampledFunction.from_callable(
        lambda x: 0.1 * np.sin(x) + 0.05j * np.exp(-x * x), lo, hi, n)


def step(height=1.0, window=LINE):
    """``height * 1_{[0, inf)}`` sampled without a handle (one-cell ramp)."""
    lo, hi, n = window
    x = np.linspace(lo, hi, n)
    return SampledFunction(np.where(x >= 0, height, 0.0), lo, hi, "constant-extend")


def circle_cosine(a, window=CIRCLE):
    lo, hi, n = window
    return SampledFunction.from_callable(lambda x: a * np.cos(2 * math.pi * x), lo, hi, n, "periodic")


def circle_step(window=CIRCLE):
    lo, hi, n = window
    x = np.linspace(lo, hi, n)
    vals = np.where(np.mod(x, 1.0) < 0.5, 1.0, 0.0)
    vals[-1] = vals[0]
    return SampledFunction(vals, lo, hi, "periodic")


REGISTRY = {
    "zero": lambda: constant(0.0),
    "const": lambda: constant(0.7),
    "const_complex": lambda: constant(0.5 + 0.3j),
    "sin01": lambda: sine(0.1),
    "sin02": lambda: sine(0.2),
    "gauss01": lambda: gaussian(0.1),
    "gauss02": lambda: gaussian(0.2),
    "gauss05": lambda: gaussian(0.5),
    "mixed": mixed,
    "step": step,
    "circle_cos01": lambda: circle_cosine(0.1),
    "circle_step": circle_step,
}


def get(name) -> SampledFunction:
    try:
        return REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(sorted(REGISTRY))}") from None
