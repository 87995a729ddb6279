"""Deterministic 1-d golden-section minimization.

Hand-rolled on purpose: the searches in this package are part of documented,
reproducible result certificates, so we want a fixed iteration schedule with
no convergence heuristics that could change between library versions.
"""

import math

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0  # 1/phi^2


def golden_min(f, a: float, b: float, xtol: float = 1e-10, max_iter: int = 200):
    """Minimize f over [a, b]; returns (x_min, f_min).

    Assumes f is unimodal on the bracket; with a multi-modal f it converges
    to a local minimum inside the bracket, which callers handle by splitting
    the bracket (multi-start).
    """
    if b < a:
        a, b = b, a
    h = b - a
    if h <= xtol:
        x = 0.5 * (a + b)
        return x, f(x)
    c = a + _INVPHI2 * h
    d = a + _INVPHI * h
    yc = f(c)
    yd = f(d)
    for _ in range(max_iter):
        if h <= xtol:
            break
        if yc < yd:
            b, d, yd = d, c, yc
            h = b - a
            c = a + _INVPHI2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h = b - a
            d = a + _INVPHI * h
            yd = f(d)
    if yc < yd:
        return c, yc
    return d, yd


def golden_min_multistart(f, a: float, b: float, starts: int = 8, xtol: float = 1e-10):
    """Split [a, b] into ``starts`` sub-brackets, golden-search each, keep the best.

    Guards against kinks / multiple local minima (piecewise norms have a kink
    where the dominating power changes).
    """
    edges = [a + (b - a) * i / starts for i in range(starts + 1)]
    best = None
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, y = golden_min(f, lo, hi, xtol=xtol)
        if best is None or y < best[1]:
            best = (x, y)
    return best
