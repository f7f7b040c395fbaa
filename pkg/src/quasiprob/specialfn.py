"""Hermite and associated Laguerre polynomials, Hermite functions.

Hermite polynomials use the physicists' convention, generated by
exp(-t**2 + 2*t*x) = sum_k H_k(x) t**k / k!.  H_1(x) = 2x, not x.
"""

import math
from fractions import Fraction

import numpy as np

from . import oracle
from .errors import QuadratureError, RangeError

HERMITE_MAX_ORDER = 200
HERMITE_MAX_ARG = 10.0
INTEGRAL_MAX_ORDER = 30
INTEGRAL_MAX_ARG = 5.0
# exp(-t**2) < 1e-35 outside this window
INTEGRAL_WINDOW = 9.0
LAGUERRE_MAX_ORDER = 200


def _check_order(n, limit, what):
    if int(n) != n or n < 0:
        raise RangeError(f"{what} order must be a nonnegative integer, got {n}")
    if n > limit:
        raise RangeError(f"{what} order {n} exceeds the supported maximum {limit}")


def hermite(n, x):
    """Physicists' Hermite polynomial H_n(x) by three-term recurrence."""
    _check_order(n, HERMITE_MAX_ORDER, "Hermite")
    if not abs(x) <= HERMITE_MAX_ARG:
        raise RangeError(f"|x| = {abs(x)} outside the envelope |x| <= {HERMITE_MAX_ARG}")
    return float(hermite_table(int(n), np.asarray(x, dtype=float))[-1])


def hermite_table(nmax, x):
    """Rows H_0(x) .. H_nmax(x) for an array ``x`` (no range checks)."""
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 2.0 * x
    for k in range(1, nmax):
        out[k + 1] = 2.0 * x * out[k] - 2.0 * k * out[k - 1]
    return out


def hermite_integral(n, x):
    """H_n(x) from the integral (2**n / sqrt(pi)) * int (x + i t)**n exp(-t**2) dt.

    Independent of the recurrence; used to cross-check it.
    """
    _check_order(n, INTEGRAL_MAX_ORDER, "Hermite integral")
    if not abs(x) <= INTEGRAL_MAX_ARG:
        raise RangeError(f"|x| = {abs(x)} outside the envelope |x| <= {INTEGRAL_MAX_ARG}")

    def integrand(t):
        return (x + 1j * t) ** n * np.exp(-t * t)

    def magnitude(t):
        return np.abs(x + 1j * t) ** n * np.exp(-t * t)

    scale = oracle.integrate_1d(magnitude, -INTEGRAL_WINDOW, INTEGRAL_WINDOW, tol=1e-10).value.real
    # absolute 1e-13 is out of reach once the integrand grows like |x + i t|^n
    tol = 1e-13 * max(scale, 1.0)
    res = oracle.integrate_1d(integrand, -INTEGRAL_WINDOW, INTEGRAL_WINDOW, tol=tol)
    value = 2.0**n / math.sqrt(math.pi) * res.value
    # odd powers of t cancel; what is left is rounding, judged against the integrand size
    if abs(res.value.imag) > 1e-10 * max(scale, 1.0):
        raise QuadratureError(
            f"imaginary residue {res.value.imag:.3e} for H_{n}({x}) (scale {scale:.3e})"
        )
    return float(value.real)


def hermite_function(n, x):
    """Normalised oscillator eigenfunction psi_n(x) = exp(-x^2/2) H_n(x) / sqrt(2^n sqrt(pi) n!)."""
    _check_order(n, HERMITE_MAX_ORDER, "Hermite function")
    if not abs(x) <= HERMITE_MAX_ARG:
        raise RangeError(f"|x| = {abs(x)} outside the envelope |x| <= {HERMITE_MAX_ARG}")
    return float(hermite_functions(int(n), np.asarray(x, dtype=float))[-1])


def hermite_functions(nmax, x):
    """Rows psi_0(x) .. psi_nmax(x) for an array ``x``.

    Uses the normalised recurrence
    psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1},
    which never forms factorials.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = math.pi**-0.25 * np.exp(-0.5 * x * x)
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, nmax):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def generating_partial(t, x, K):
    """Partial sum sum_{k=0}^{K} H_k(x) t**k / k! of the Hermite generating function."""
    if int(K) != K or K < 1 or K > HERMITE_MAX_ORDER:
        raise RangeError(f"K must be an integer in [1, {HERMITE_MAX_ORDER}], got {K}")
    if abs(t) > 1.0 or abs(x) > 5.0:
        raise RangeError("generating_partial envelope is |t| <= 1, |x| <= 5")
    return float(_generating_terms(t, x, int(K)).sum())


def _generating_terms(t, x, K, shift=0):
    """Terms H_{k+shift}(x) t**k / k! for k = 0..K."""
    h = hermite_table(K + shift, np.asarray(x, dtype=float))[shift:]
    terms = np.empty(K + 1)
    coeff = 1.0
    for k in range(K + 1):
        terms[k] = h[k] * coeff
        coeff *= t / (k + 1)
    return terms


def shifted_generating_partial(t, x, K, shift):
    """sum_{k=0}^{K} H_{k+shift}(x) t**k / k!."""
    return float(_generating_terms(t, x, int(K), int(shift)).sum())


def generating_partial_exact(t, x, K):
    """Exact rational value of the partial sum at binary64 inputs ``t`` and ``x``.

    Used where finite differences would otherwise drown in rounding error.
    """
    t = Fraction(t)
    x = Fraction(x)
    h_prev, h = Fraction(1), 2 * x
    total = Fraction(1)
    power = Fraction(1)
    for k in range(1, K + 1):
        if k > 1:
            h_prev, h = h, 2 * x * h - 2 * (k - 1) * h_prev
        power = power * t / k
        total += h * power
    return total


def generating_derivative(t, x, K, order, step=1e-3):
    """d^order/dt^order of the partial generating sum by central differences.

    Samples are exact rationals, so only the O(step^2) truncation remains;
    one Richardson step (step, step/2) removes it to O(step^4).
    """
    if int(order) != order or order < 1 or order % 2:
        raise RangeError(f"derivative order must be a positive even integer, got {order}")
    t0 = Fraction(t)

    def central(h):
        h = Fraction(h)
        total = Fraction(0)
        for j in range(order + 1):
            f = generating_partial_exact(t0 + (Fraction(order, 2) - j) * h, Fraction(x), K)
            total += (-1) ** j * math.comb(order, j) * f
        return total / h**order

    coarse = central(step)
    fine = central(Fraction(step) / 2)
    return float((4 * fine - coarse) / 3)


def laguerre(n, k, x):
    """Associated Laguerre polynomial L_n^k(x) by forward recurrence."""
    _check_order(n, LAGUERRE_MAX_ORDER, "Laguerre")
    if int(k) != k or k < -n:
        raise RangeError(f"Laguerre parameter k must be an integer >= -n, got {k}")
    if not x >= 0:
        raise RangeError(f"Laguerre argument must be nonnegative, got {x}")
    return float(laguerre_table(int(n), int(k), np.asarray(x, dtype=float))[-1])


def laguerre_table(nmax, k, x):
    """Rows L_0^k(x) .. L_nmax^k(x) for an array ``x``.

    (n+1) L_{n+1} = (2n + 1 + k - x) L_n - (n + k) L_{n-1}
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 1.0 + k - x
    for n in range(1, nmax):
        out[n + 1] = ((2 * n + 1 + k - x) * out[n] - (n + k) * out[n - 1]) / (n + 1)
    return out
