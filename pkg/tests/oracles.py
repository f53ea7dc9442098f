"""Independent reference computations used by the test-suite.

Nothing here imports the package's numerical code: each formula is written
out directly, element by element, with mpmath at 50 significant digits.
"""

import mpmath as mp

mp.mp.dps = 50


def _norm(v):
    return mp.sqrt(mp.fsum(a * a for a in v))


def kernels(x, center, sigma, gamma):
    x = [mp.mpf(float(v)) for v in x]
    c = [mp.mpf(float(v)) for v in center]
    cos = mp.fsum(a * b for a, b in zip(x, c)) / (_norm(x) * _norm(c) + mp.mpf(gamma))
    gau = mp.exp(-mp.fsum((a - b) ** 2 for a, b in zip(x, c)) / mp.mpf(sigma) ** 2)
    return cos, gau


def train_step(centers, weights, bias, a1, a2, x, d, eta, sigma, gamma, freeze=False):
    """One online update, transcribed term by term.

    Returns ``(e, weights, bias, a1, a2)`` as mpmath numbers.
    """
    eta = mp.mpf(eta)
    a1 = mp.mpf(a1)
    a2 = mp.mpf(a2)
    w = [mp.mpf(float(v)) for v in weights]
    b = mp.mpf(bias)
    phi1, phi2 = zip(*(kernels(x, c, sigma, gamma) for c in centers))
    S = abs(a1) + abs(a2)
    fused = [(abs(a1) * p1 + abs(a2) * p2) / S for p1, p2 in zip(phi1, phi2)]
    y = mp.fsum(wi * fi for wi, fi in zip(w, fused)) + b
    e = mp.mpf(d) - y
    if freeze:
        a1n, a2n = a1, a2
    else:
        a1n = a1 + eta * e * mp.fsum(
            wi * (abs(a1) * abs(a2)) / (a1 * S**2) * (p1 - p2)
            for wi, p1, p2 in zip(w, phi1, phi2))
        a2n = a2 + eta * e * mp.fsum(
            wi * (abs(a1) * abs(a2)) / (a2 * S**2) * (p2 - p1)
            for wi, p1, p2 in zip(w, phi1, phi2))
    wn = [wi + eta * e * fi for wi, fi in zip(w, fused)]
    bn = b + eta * e
    return e, wn, bn, a1n, a2n


def rel_err(approx, exact):
    approx = mp.mpf(float(approx))
    if exact == 0:
        return float(abs(approx))
    return float(abs(approx - exact) / abs(exact))
