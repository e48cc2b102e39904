"""Gamma-type special functions and the moment family alpha_{beta,m}(n).

    alpha_{beta,m}(n) = int_0^1 x^n (1-x)^beta log^m(1-x) dx,   beta > -1

The exact values come from the integration-by-parts recurrence in n and m;
an adaptive Gauss-Legendre quadrature of the defining integral is kept
alongside as an independent check.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, QuadratureError

MAX_LOG_POWER = 8
MAX_EXACT_DEGREE = 100_000
MAX_ASYMPTOTIC_DEGREE = 1_000_000


@dataclass(frozen=True)
class AlphaParams:
    beta: float
    m: int
    n: int

    def __post_init__(self):
        if not self.beta > -1:
            raise DomainError(f"beta must exceed -1, got {self.beta}")
        if int(self.m) != self.m or not 0 <= self.m <= MAX_LOG_POWER:
            raise DomainError(f"log power m must be an integer in [0, {MAX_LOG_POWER}], got {self.m}")
        if int(self.n) != self.n or self.n < 0:
            raise DomainError(f"degree n must be a non-negative integer, got {self.n}")


def log_gamma(x):
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    return math.lgamma(x)


# Bernoulli numbers B_2k / (2k (2k-1)) for the Stirling series of ln Gamma
_STIRLING = (1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188, -691 / 360360, 1 / 156, -3617 / 122400)
_STIRLING_MIN = 20.0


def _stirling_tail(x):
    inv = 1.0 / x
    inv2 = inv * inv
    acc = 0.0
    for coef in reversed(_STIRLING):
        acc = acc * inv2 + coef
    return acc * inv


def log_gamma_ratio(x, a):
    """ln Gamma(x) - ln Gamma(x + a) for x > 0, x + a > 0.

    For large x both terms are huge and nearly cancel; the Stirling series
    is differenced analytically through log1p so the result keeps full
    relative accuracy in exp(.).
    """
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape)
    small = np.minimum(x, x + a) < _STIRLING_MIN
    if small.any():
        xs = x[small]
        out[small] = gammaln(xs) - gammaln(xs + a)
    big = ~small
    if big.any():
        xb = x[big]
        out[big] = (-(xb - 0.5) * np.log1p(a / xb) - a * np.log(xb + a) + a
                    + _stirling_tail(xb) - _stirling_tail(xb + a))
    return float(out) if out.ndim == 0 else out


def gamma_sign(x):
    """Sign of Gamma(x) for real x that is not a non-positive integer."""
    if x > 0:
        return 1
    if x == math.floor(x):
        raise DomainError(f"Gamma has a pole at {x}")
    return -1 if math.floor(-x) % 2 == 0 else 1


def gen_binomial(a, b):
    """Falling-factorial binomial a(a-1)...(a-b+1)/b! for integer b >= 0."""
    if int(b) != b or b < 0:
        raise DomainError(f"gen_binomial needs integer b >= 0, got {b}")
    out = 1.0
    for j in range(int(b)):
        out *= (a - j) / (j + 1)
    return out


def gamma_binomial(a, b):
    """Gamma(a+1) / [Gamma(b+1) Gamma(a-b+1)] for real a, b.

    Evaluated in log space with the sign tracked separately, so large upper
    arguments do not overflow. Poles in the denominator give 0.
    """
    num = a + 1
    d1, d2 = b + 1, a - b + 1
    for x in (d1, d2):
        if x <= 0 and x == math.floor(x):
            return 0.0
    if num <= 0 and num == math.floor(num):
        raise DomainError(f"Gamma({num}) is infinite")
    sign = gamma_sign(num) * gamma_sign(d1) * gamma_sign(d2)
    return sign * math.exp(math.lgamma(num) - math.lgamma(d1) - math.lgamma(d2))


# beta -> list over m of 1-d arrays alpha_{beta,m}(0..N)
_alpha_tables: dict[float, list[np.ndarray]] = {}
_alpha_lock = threading.Lock()


def _beta_row(beta, n_max):
    n = np.arange(n_max + 1, dtype=float)
    return math.gamma(beta + 1) * np.exp(log_gamma_ratio(n + 1, beta + 1))


def _extend_row(beta, m, prev, n_max):
    """alpha_{beta,m}(0..n_max) from alpha_{beta,m-1} by the recurrence in n."""
    row = np.empty(n_max + 1)
    row[0] = (-1) ** m * math.factorial(m) / (beta + 1) ** (m + 1)
    for n in range(1, n_max + 1):
        row[n] = (n * row[n - 1] - m * prev[n]) / (n + beta + 1)
    return row


def _alpha_table(beta, m, n_max):
    with _alpha_lock:
        rows = _alpha_tables.get(beta)
        if rows is None or len(rows[0]) <= n_max:
            size = max(n_max, 64 if rows is None else 2 * len(rows[0]))
            size = min(size, MAX_EXACT_DEGREE)
            depth = 0 if rows is None else len(rows) - 1
            rows = [_beta_row(beta, size)]
            for k in range(1, depth + 1):
                rows.append(_extend_row(beta, k, rows[-1], size))
            _alpha_tables[beta] = rows
        while len(rows) <= m:
            rows.append(_extend_row(beta, len(rows), rows[-1], len(rows[0]) - 1))
        return rows[m]


def alpha(params: AlphaParams):
    """Exact alpha_{beta,m}(n) via the recurrence

        alpha_{b,m+1}(n) = [n alpha_{b,m+1}(n-1) - (m+1) alpha_{b,m}(n)] / (n+b+1)

    with alpha_{b,0}(n) = B(n+1, b+1) and alpha_{b,m}(0) = (-1)^m m!/(b+1)^(m+1).
    Both terms of the numerator carry the sign (-1)^(m+1), so the recurrence
    involves no cancellation. Tables are memoized per beta.
    """
    if params.n > MAX_EXACT_DEGREE:
        raise DomainError(f"exact alpha is capped at n = {MAX_EXACT_DEGREE}")
    return float(_alpha_table(float(params.beta), params.m, params.n)[params.n])


def alpha_asymptotic(params: AlphaParams):
    """Leading term Gamma(b+1) n! (-log n)^m / Gamma(n+b+2), no correction."""
    n, beta, m = params.n, params.beta, params.m
    if n < 2:
        raise DomainError("alpha_asymptotic needs n >= 2")
    if n > MAX_ASYMPTOTIC_DEGREE:
        raise DomainError(f"alpha_asymptotic is capped at n = {MAX_ASYMPTOTIC_DEGREE}")
    lead = math.gamma(beta + 1) * math.exp(log_gamma_ratio(n + 1.0, beta + 1))
    return lead * (-math.log(n)) ** m


def alpha_quadrature_oracle(params: AlphaParams, nodes=64, rtol=1e-12, max_panels=4096):
    """Independent value of alpha by adaptive Gauss-Legendre quadrature.

    Substituting x = 1 - exp(-t) gives

        int_0^inf (1 - e^-t)^n e^-(b+1)t (-t)^m dt,

    whose integrand is smooth at both ends. Panels of `nodes` points are
    bisected until each agrees with its two halves.
    """
    if nodes < 64:
        raise DomainError("quadrature oracle needs at least 64 nodes per panel")
    n, beta, m = params.n, params.beta, params.m
    x, w = np.polynomial.legendre.leggauss(nodes)

    def panel(a, b):
        h = 0.5 * (b - a)
        t = a + h * (x + 1)
        log_body = -(beta + 1) * t
        if n:
            log_body = log_body + n * np.log1p(-np.exp(-t))
        return h * np.dot(w, np.exp(log_body) * (-t) ** m)

    # integrand beyond T is below exp(-(b+1)T) T^m; pick T so this is ~1e-40
    tail = 92.0 + m * math.log(100.0 + m)
    t_end = max(tail / (beta + 1), 2 * math.log(n + 2) + 40)
    breaks = np.linspace(0.0, t_end, 17)
    stack = [(a, b, panel(a, b)) for a, b in zip(breaks[:-1], breaks[1:])]
    scale = abs(sum(p for _, _, p in stack))
    total = 0.0
    err = 0.0
    used = len(stack)
    while stack:
        a, b, whole = stack.pop()
        mid = 0.5 * (a + b)
        left, right = panel(a, mid), panel(mid, b)
        diff = abs(left + right - whole)
        if diff <= rtol * scale / len(breaks) or b - a < 1e-9:
            total += left + right
            err += diff
            continue
        used += 2
        if used > max_panels:
            raise QuadratureError("panel budget exhausted", diff / scale)
        stack.append((a, mid, left))
        stack.append((mid, b, right))
    achieved = err / abs(total) if total else err
    if achieved > 1e-9:
        raise QuadratureError("requested accuracy not reached", achieved)
    return float(total)
