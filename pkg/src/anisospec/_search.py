"""One-dimensional bracketing searches used on periodic profiles."""

import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(f, lo, hi, iters=80):
    """Return ``(x, f(x))`` for the best point found in ``[lo, hi]``.

    The bracket shrinks by the golden ratio each step; the best evaluation
    seen (including both ends) is returned so kinks and one-sided jumps
    never lose the incumbent.
    """
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    best = max((f(a), a), (f(b), b), (fc, c), (fd, d))
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
            best = max(best, (fc, c))
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
            best = max(best, (fd, d))
        if b - a <= 1e-15 * max(1.0, abs(a)):
            break
    return best[1], best[0]


def golden_min(f, lo, hi, iters=80):
    x, v = golden_max(lambda t: -f(t), lo, hi, iters)
    return x, -v
