"""Riemann/Hurwitz zeta (with s-derivative) and the chi-square survival function."""
import math

from scipy import special as _sp

from .errors import DomainError

# B_2j / (2j)! for j = 1..8
_BERNOULLI_OVER_FACT = tuple(
    b / math.factorial(2 * j)
    for j, b in enumerate(
        (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510),
        start=1,
    )
)


def _terms(s, q):
    if not (math.isfinite(s) and s > 1.0):
        raise DomainError(f"zeta requires finite s > 1, got {s}")
    if not (math.isfinite(q) and q > 0.0):
        raise DomainError(f"zeta requires finite q > 0, got {q}")
    # direct terms until (q + N) dominates the Bernoulli corrections' rising factorials
    n_direct = max(0, int(math.ceil(s)) + 16 - int(q))
    return n_direct


def hurwitz_zeta(s, q=1.0):
    """Hurwitz zeta  sum_{n>=0} (q+n)^-s  by Euler-Maclaurin summation."""
    return hurwitz_zeta_with_derivative(s, q)[0]


def hurwitz_zeta_with_derivative(s, q=1.0):
    """Return (zeta(s, q), d/ds zeta(s, q)).

    Direct summation over the first terms, then the integral tail, the half
    endpoint term and eight Bernoulli corrections evaluated at ``q + N``.
    """
    s = float(s)
    q = float(q)
    n_direct = _terms(s, q)

    val = 0.0
    dval = 0.0
    for n in range(n_direct):
        x = q + n
        t = x ** -s
        val += t
        dval -= math.log(x) * t

    a = q + n_direct
    log_a = math.log(a)
    a_pow = a ** -s
    # integral tail a^{1-s}/(s-1)
    tail = a * a_pow / (s - 1.0)
    val += tail
    dval += -log_a * tail - tail / (s - 1.0)
    # endpoint
    val += 0.5 * a_pow
    dval -= 0.5 * log_a * a_pow

    rising = s  # (s)_{2j-1}: s, s(s+1)(s+2), ...
    d_log_rising = 1.0 / s
    power = a_pow / a  # a^{-s-2j+1} at j=1
    for j, coef in enumerate(_BERNOULLI_OVER_FACT, start=1):
        term = coef * rising * power
        val += term
        dval += term * (d_log_rising - log_a)
        m = 2 * j - 1
        rising *= (s + m) * (s + m + 1)
        d_log_rising += 1.0 / (s + m) + 1.0 / (s + m + 1)
        power /= a * a
    return val, dval


def zeta(s):
    """Riemann zeta for real s > 1."""
    return hurwitz_zeta(s, 1.0)


def chi2_sf(x, dof):
    """Upper-tail chi-square probability Q(dof/2, x/2)."""
    x = float(x)
    if not x >= 0.0:
        raise DomainError(f"chi2_sf requires x >= 0, got {x}")
    if int(dof) != dof or dof < 1:
        raise DomainError(f"chi2_sf requires a positive integer dof, got {dof}")
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    return float(_sp.gammaincc(0.5 * dof, 0.5 * x))
