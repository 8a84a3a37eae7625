"""Scan-and-bisect root bracketing for stabilization thresholds."""

from __future__ import annotations


def first_threshold(g, upper: float, scan_step: float = 0.01, tol: float = 1e-4) -> float:
    """Smallest x in (0, upper] with g(x) >= 0, g starting negative.

    Scans with step scan_step to bracket the first sign change, then bisects
    the bracket down to tol.
    """
    x = scan_step
    prev = g(x)
    if prev >= 0.0:
        return x  # satisfied from the start of the scan
    while x < upper:
        x_next = min(x + scan_step, upper)
        cur = g(x_next)
        if cur >= 0.0:
            lo, hi = x, x_next
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if g(mid) >= 0.0:
                    hi = mid
                else:
                    lo = mid
            return 0.5 * (lo + hi)
        x, prev = x_next, cur
    raise ValueError(f"no threshold found below {upper}")
