"""Richardson extrapolation for sequences sampled on geometric schedules."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def richardson(values, ratio: float = 2.0, max_order: int = 4) -> float:
    """Accelerate y_j = L + c1/x_j + c2/x_j^2 + ... with x_j = x_0*ratio^j.

    Builds the Neville-style table eliminating one inverse power per level.
    Levels are capped because noise amplifies beyond a few eliminations.
    """
    y = [float(v) for v in values]
    if len(y) == 1:
        return y[0]
    level = y
    for m in range(1, min(len(y), max_order + 1)):
        factor = ratio**m
        level = [(factor * level[i + 1] - level[i]) / (factor - 1.0) for i in range(len(level) - 1)]
    return level[-1]


@dataclass
class SequenceLimit:
    value: float
    converged: bool
    residuals: list = field(default_factory=list)
    detail: str = ""


def sequence_limit(values, ratio: float = 2.0) -> SequenceLimit:
    """Extrapolated limit plus residual-decay evidence.

    converged means successive differences decay (no increase beyond noise)
    and the final difference is below a tenth of the first, or the sequence is
    flat to machine precision.
    """
    y = np.asarray([float(v) for v in values], dtype=float)
    if y.size < 2:
        return SequenceLimit(float(y[-1]), True, [], "short sequence")
    res = np.abs(np.diff(y))
    scale = max(float(np.max(np.abs(y))), 1e-300)
    if float(np.max(res)) <= 1e-12 * scale:
        return SequenceLimit(float(y[-1]), True, res.tolist(), "constant sequence")
    tol = 1e-14 * scale
    decaying = bool(np.all(res[1:] <= res[:-1] * 1.05 + tol))
    shrunk = res[-1] <= res[0] / 10.0 + tol
    value = richardson(y, ratio=ratio)
    return SequenceLimit(float(value), decaying and shrunk, res.tolist(),
                         "" if decaying and shrunk else "residuals do not decay")
