"""Pathwise local time from the Tanaka formula.

Independent of the rank recursion in :mod:`.estimates`; used to check it on
simulated paths.
"""

import numpy as np

__all__ = ["tanaka_local_time", "tanaka_path"]


def tanaka_path(z) -> np.ndarray:
    """Cumulative local time at zero of a discretely sampled path z.

    Lambda(t) = (|z(t)| - |z(0)| - sum_{s<t} sgn(z(s)) (z(s+1) - z(s))) / 2,
    with sgn(0) = +1.
    """
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or not np.isfinite(z).all():
        raise ValueError("z must be a finite 1-d series")
    sgn = np.where(z[:-1] >= 0, 1.0, -1.0)
    stoch = np.concatenate([[0.0], np.cumsum(sgn * np.diff(z))])
    return 0.5 * (np.abs(z) - abs(z[0]) - stoch)


def tanaka_local_time(z) -> float:
    return float(tanaka_path(z)[-1])
