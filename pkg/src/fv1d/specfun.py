"""Confluent hypergeometric kernel used by the matching solvers.

Provides Kummer's M(a, b, z) for complex parameters by direct Taylor
summation, Tricomi's U(a, b, z) on the positive real axis, and the decaying
Whittaker function W built on U, together with the logarithmic derivatives
the matching conditions need.

U is evaluated by one of three routes:

* terminating polynomial when a is a non-positive integer,
* the connection formula through two M series for moderate z,
* the divergent large-z asymptotic series truncated at its smallest term.

The switchover sits at z = 30 by default.  Near-integer b is handled by
evaluating at b -+ 1e-6 and averaging, which regularises the logarithmic
limit without the full limiting formulas; the parameter combinations the
solvers produce keep b safely away from integers in the first place.
"""

from __future__ import annotations

import math
import warnings

import scipy.special as sc

from .errors import InvalidParameter, NonConvergence, PoleAtZero, PrecisionLossWarning

__all__ = [
    "kummer_m",
    "tricomi_u",
    "tricomi_u_logderiv",
    "whittaker_w",
    "whittaker_w_logderiv",
]

_INTEGER_TOL = 1e-12       # "is a a non-positive integer" detection
_B_REGULARISE = 1e-6       # half-width of the near-integer b exclusion zone
_CANCEL_FLAG = 1e-8        # connection-formula cancellation warning level


def _is_nonpositive_integer(v: complex, tol: float = _INTEGER_TOL) -> bool:
    re, im = v.real, v.imag
    return abs(im) < tol and re < 0.5 and abs(re - round(re)) < tol


def kummer_m(a, b, z, *, tol: float = 1e-14, max_terms: int = 10000,
             series_bound: float = 50.0) -> complex:
    """Kummer's confluent hypergeometric M(a, b, z) by Taylor summation.

    Parameters may be complex.  The series is summed until two consecutive
    terms fall below ``tol`` relative to the accumulated value (or below
    ``tol`` absolutely, whichever is larger), which is adequate for
    ``|z| <= series_bound``; larger arguments are refused rather than
    silently returned at reduced accuracy.
    """
    a = complex(a)
    b = complex(b)
    z = complex(z)
    if _is_nonpositive_integer(b):
        raise InvalidParameter(f"kummer_m: b={b} is a non-positive integer")
    if abs(z) > series_bound:
        raise InvalidParameter(
            f"kummer_m: |z|={abs(z):.3g} exceeds the series bound {series_bound}")
    s = 1.0 + 0.0j
    term = 1.0 + 0.0j
    quiet = 0
    for n in range(max_terms):
        term = term * (a + n) * z / ((b + n) * (n + 1))
        s += term
        if abs(term) <= tol * max(1.0, abs(s)):
            quiet += 1
            if quiet >= 2:
                return s
        else:
            quiet = 0
    raise NonConvergence(
        f"kummer_m({a}, {b}, {z}): no convergence in {max_terms} terms")


def _kummer_real(a: float, b: float, z: float, tol: float, max_terms: int) -> float:
    # Real-argument path used inside the U connection formula.  All series
    # arithmetic stays real, so taking .real is exact.
    return kummer_m(a, b, z, tol=tol, max_terms=max_terms,
                    series_bound=math.inf).real


def _u_polynomial(n: int, b: float, z: float) -> float:
    # U(-n, b, z) written as a division-free finite sum, valid for every b:
    # U(-n,b,z) = (-1)^n sum_k C(n,k) (b+k)_{n-k} (-z)^k
    total = 0.0
    for k in range(n + 1):
        poch = 1.0
        for j in range(n - k):
            poch *= b + k + j
        total += math.comb(n, k) * poch * (-z) ** k
    return (-1.0) ** n * total


def _u_connection(a: float, b: float, z: float, tol: float, max_terms: int) -> float:
    m1 = _kummer_real(a, b, z, tol, max_terms)
    m2 = _kummer_real(a - b + 1.0, 2.0 - b, z, tol, max_terms)
    t1 = float(sc.gamma(1.0 - b) * sc.rgamma(a - b + 1.0)) * m1
    t2 = float(sc.gamma(b - 1.0) * sc.rgamma(a)) * z ** (1.0 - b) * m2
    u = t1 + t2
    scale = max(abs(t1), abs(t2))
    if scale > 0.0 and abs(u) < _CANCEL_FLAG * scale:
        warnings.warn(
            f"tricomi_u({a}, {b}, {z}): connection formula lost "
            f"{math.log10(scale / max(abs(u), 1e-300)):.1f} digits to cancellation",
            PrecisionLossWarning, stacklevel=3)
    return u


def _u_asymptotic(a: float, b: float, z: float, max_terms: int) -> float:
    # z^-a * 2F0(a, a-b+1; -1/z), truncated at the smallest term.
    s = 1.0
    term = 1.0
    for n in range(max_terms):
        nxt = term * (a + n) * (a - b + 1.0 + n) / (-z * (n + 1.0))
        if abs(nxt) >= abs(term):
            break
        s += nxt
        term = nxt
        if abs(nxt) <= 1e-17 * abs(s):
            break
    return z ** (-a) * s


def tricomi_u(a: float, b: float, z: float, *, switchover: float = 30.0,
              tol: float = 1e-14, max_terms: int = 10000) -> float:
    """Tricomi's confluent hypergeometric U(a, b, z) for real parameters, z > 0."""
    if not z > 0.0:
        raise InvalidParameter(f"tricomi_u: z must be positive, got {z}")
    if _is_nonpositive_integer(complex(a)):
        return _u_polynomial(int(-round(a)), b, z)
    if z >= switchover:
        return _u_asymptotic(a, b, z, max_terms)
    rb = round(b)
    if abs(b - rb) < _B_REGULARISE:
        lo = _u_connection(a, rb - _B_REGULARISE, z, tol, max_terms)
        hi = _u_connection(a, rb + _B_REGULARISE, z, tol, max_terms)
        return 0.5 * (lo + hi)
    return _u_connection(a, b, z, tol, max_terms)


def tricomi_u_logderiv(a: float, b: float, z: float, *,
                       pole_eps: float = 0.0, **u_kwargs) -> float:
    """d/dz ln U(a, b, z), computed from dU/dz = -a U(a+1, b+1, z)."""
    if a == 0.0:
        return 0.0
    u0 = tricomi_u(a, b, z, **u_kwargs)
    if abs(u0) <= pole_eps or abs(u0) < 1e-280:
        raise PoleAtZero(f"tricomi_u_logderiv: U({a}, {b}, {z}) = {u0}")
    u1 = tricomi_u(a + 1.0, b + 1.0, z, **u_kwargs)
    return -a * u1 / u0


def whittaker_w(lam: float, mu: float, z: float, **u_kwargs) -> float:
    """Exponentially decaying Whittaker function W_{lam, mu}(z) for z > 0.

    Keyword arguments are forwarded to ``tricomi_u``, so callers sweeping z
    across the series/asymptotic boundary can pin ``switchover`` themselves.
    """
    b = 1.0 + 2.0 * mu
    if _is_nonpositive_integer(complex(b)):
        raise InvalidParameter(f"whittaker_w: 1+2*mu = {b} is a non-positive integer")
    return math.exp(-0.5 * z) * z ** (mu + 0.5) * tricomi_u(mu - lam + 0.5, b, z,
                                                            **u_kwargs)


def whittaker_w_logderiv(lam: float, mu: float, k: float, x: float) -> float:
    """d/dx ln W_{lam, mu}(2 k x) via the U-representation chain rule."""
    if not (k > 0.0 and x > 0.0):
        raise InvalidParameter("whittaker_w_logderiv: k and x must be positive")
    z = 2.0 * k * x
    a0 = mu - lam + 0.5
    b0 = 1.0 + 2.0 * mu
    return 2.0 * k * (-0.5 + (mu + 0.5) / z + tricomi_u_logderiv(a0, b0, z))
