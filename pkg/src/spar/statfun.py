"""Chi-squared (df=1) quantiles, order-1/2 Marcum Q and the noise-variance MLE."""

import math

import numpy as np

DEFAULT_ALPHA = 0.999

# 1/sqrt(2) as an unevaluated double-double sum
_RSQRT2_HI = 0.7071067811865476
_RSQRT2_LO = -4.833646656726457e-17
_TWO_OVER_SQRTPI = 2.0 / math.sqrt(math.pi)


def check_alpha(alpha):
    alpha = float(alpha)
    if not (0.0 <= alpha < 1.0):
        raise ValueError(f"alpha must lie in [0, 1), got {alpha!r}")
    return alpha


def _split(a):
    c = 134217729.0 * a
    hi = c - (c - a)
    return hi, a - hi


def _scaled_arg(x):
    """``x / sqrt(2)`` as ``t + dt`` with ``dt`` holding the rounding error of ``t``."""
    t = x * _RSQRT2_HI
    xh, xl = _split(x)
    ch, cl = _split(_RSQRT2_HI)
    err = ((xh * ch - t) + xh * cl + xl * ch) + xl * cl
    return t, err + x * _RSQRT2_LO


def normal_tail(x):
    """Upper tail ``Pr(G > x)`` of a standard normal.

    The erfc argument is carried in double-double form and the rounding
    residual is applied as a first-order correction, which keeps the
    relative error near machine precision deep into the upper tail.
    """
    x = float(x)
    if math.isinf(x):
        return 0.0 if x > 0 else 1.0
    t, dt = _scaled_arg(x)
    return 0.5 * (math.erfc(t) - _TWO_OVER_SQRTPI * math.exp(-t * t) * dt)


def chi2_df1_cdf(t):
    if t <= 0.0:
        return 0.0
    return math.erf(math.sqrt(t / 2.0))


def chi2_df1_sf(t):
    if t <= 0.0:
        return 1.0
    return math.erfc(math.sqrt(t / 2.0))


def chi2_df1_inv_cdf(alpha):
    """Quantile of the chi-squared law with one degree of freedom.

    Solved by bisection on ``erf(sqrt(t/2)) = alpha``; above 0.5 the
    complementary form is used so the upper tail keeps full precision.
    """
    alpha = check_alpha(alpha)
    if alpha == 0.0:
        return 0.0
    upper = 1.0
    if alpha <= 0.5:
        while chi2_df1_cdf(upper) < alpha:
            upper *= 2.0
    else:
        while chi2_df1_sf(upper) > 1.0 - alpha:
            upper *= 2.0
    lower = 0.0
    # 200 halvings reach adjacent doubles for any bracket below 2**60
    for _ in range(200):
        mid = 0.5 * (lower + upper)
        if mid == lower or mid == upper:
            break
        if alpha <= 0.5:
            below = chi2_df1_cdf(mid) < alpha
        else:
            below = chi2_df1_sf(mid) > 1.0 - alpha
        if below:
            lower = mid
        else:
            upper = mid
    return 0.5 * (lower + upper)


def marcum_q_half(a, b):
    """Marcum Q function of order 1/2.

    Equals ``Pr(|G| > b)`` for ``G ~ N(a, 1)``, i.e. the upper tail of a
    noncentral chi-squared variable with one degree of freedom and
    noncentrality ``a**2`` evaluated at ``b**2``.
    """
    a = float(a)
    b = float(b)
    if a < 0.0 or b < 0.0 or math.isnan(a) or math.isnan(b):
        raise ValueError(f"marcum_q_half needs a, b >= 0, got a={a!r}, b={b!r}")
    if math.isinf(a):
        return 1.0
    q = normal_tail(b - a) + normal_tail(b + a)
    return min(1.0, q)


def inclusion_probability(bias, var, alpha=DEFAULT_ALPHA):
    """Probability that a target eigenvector lands in the SpAR selection.

    ``bias`` and ``var`` are the true bias and variance losses of the
    direction; the selection rule compares the estimated bias against
    ``chi2_df1_inv_cdf(alpha) * var``.
    """
    bias = float(bias)
    var = float(var)
    if not var > 0.0:
        raise ValueError(f"var must be positive, got {var!r}")
    if bias < 0.0:
        raise ValueError(f"bias must be nonnegative, got {bias!r}")
    threshold = chi2_df1_inv_cdf(alpha)
    return 1.0 - marcum_q_half(math.sqrt(bias / var), math.sqrt(threshold))


def mle_sigma2(x, y, w_hat):
    """Maximum-likelihood noise variance ``||y - x @ w_hat||^2 / N``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w_hat = np.asarray(w_hat, dtype=float)
    if x.ndim != 2 or y.shape != (x.shape[0],) or w_hat.shape != (x.shape[1],):
        raise ValueError(
            f"inconsistent shapes: x {x.shape}, y {y.shape}, w_hat {w_hat.shape}"
        )
    resid = y - x @ w_hat
    return float(resid @ resid) / x.shape[0]
