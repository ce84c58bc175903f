"""Independent oracles used by the test suite.

Everything here is deliberately naive (nested loops, adaptive quadrature,
closed forms) and shares no code with the library paths it checks.
"""

import numpy as np


def brute_mode_autoconv(coeffs, modes):
    """Autoconvolution of FFT-layout coefficients on the unbounded mode
    lattice, reported only at resolvable modes. O(N^2) loops, 1D."""
    N = len(coeffs)
    pos = {int(m): i for i, m in enumerate(modes)}
    out = np.zeros(N, dtype=complex)
    for m_out in modes:
        acc = 0.0 + 0.0j
        for m1 in modes:
            m2 = int(m_out) - int(m1)
            if m2 in pos:
                acc += coeffs[pos[int(m1)]] * coeffs[pos[m2]]
        out[pos[int(m_out)]] = acc
    return out


def brute_window_conv(a, b, h):
    """Direct lattice convolution of two window arrays, weight h^ndim."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim == 1:
        na, nb = len(a), len(b)
        out = np.zeros(na + nb - 1)
        for i in range(na):
            for j in range(nb):
                out[i + j] += a[i] * b[j]
        return out * h
    na, ma = a.shape
    nb, mb = b.shape
    out = np.zeros((na + nb - 1, ma + mb - 1))
    for i in range(na):
        for k in range(ma):
            if a[i, k] == 0.0:
                continue
            out[i:i + nb, k:k + mb] += a[i, k] * b
    return out * h ** 2


def periodized_gaussian(x, t, L, images=6):
    """Closed-form heat kernel wrapped onto the periodic box."""
    acc = np.zeros_like(np.asarray(x, dtype=float))
    for m in range(-images, images + 1):
        y = x + m * L
        acc += np.exp(-y * y / (4.0 * t)) / np.sqrt(4.0 * np.pi * t)
    return acc


def gaussian_riesz1_l1(t):
    """L1 norm of the |xi|-smoothed heat kernel by adaptive quadrature.

    g(x) = (1/pi) int_0^inf xi exp(-t xi^2) cos(x xi) dxi evaluated pointwise
    by quadrature, then int |g| dx, exploiting that g is even, positive near
    the origin and negative past its single sign change.
    """
    from scipy.integrate import quad
    from scipy.optimize import brentq

    def g(x):
        val, _ = quad(lambda xi: xi * np.exp(-t * xi * xi) * np.cos(x * xi),
                      0.0, np.inf, limit=400)
        return val / np.pi

    # g(0) > 0, g -> -c/x^2 from below; bracket the sign change
    hi = np.sqrt(t)
    while g(hi) > 0:
        hi *= 2.0
    x0 = brentq(g, hi / 2.0 if g(hi / 2.0) > 0 else 1e-12, hi, xtol=1e-12)
    pos, _ = quad(g, 0.0, x0, limit=400)
    neg, _ = quad(g, x0, 60.0 * np.sqrt(t), limit=800)
    # |x|^-2 tail beyond the quadrature window, from the kink asymptotics
    tail = (1.0 / np.pi) / (60.0 * np.sqrt(t))
    return 2.0 * (pos - neg + tail)


def bessel_symbol_l2(rho, order=0.0):
    """( int (1+xi^2)^order (1+xi^2)^(-rho) dxi )^(1/2) on the line."""
    from scipy.integrate import quad
    val, _ = quad(lambda xi: (1.0 + xi * xi) ** (order - rho), -np.inf, np.inf)
    return np.sqrt(val)
