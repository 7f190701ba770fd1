"""Independent reference implementations used to check the fast paths.

These deliberately avoid the closed forms under test: the posterior oracle
integrates prior x likelihood on a dense grid, and the BH oracle checks
every k of the step-up definition directly.
"""

import math

import numpy as np
from scipy.integrate import simpson


def grid_posterior(mu0: float, tau2: float, sigma2: float, n: int, xbar: float,
                   points: int = 40001, width: float = 12.0):
    """Posterior mean/variance of the latent skill by grid integration.

    Integrand: N(skill; mu0, tau2) * prod_j N(x_j; skill, sigma2), which for
    a fixed sample mean reduces to N(skill; mu0, tau2) * N(xbar; skill,
    sigma2/n) up to a constant. Integrates on a grid centered at the
    closed-form answer's neighborhood but computed from first principles.
    """
    # center/scale the grid from the data alone (no closed form): span both
    # the prior and the likelihood comfortably
    lik_sd = math.sqrt(sigma2 / n)
    prior_sd = math.sqrt(tau2)
    lo = min(xbar - width * lik_sd, mu0 - width * prior_sd)
    hi = max(xbar + width * lik_sd, mu0 + width * prior_sd)
    grid = np.linspace(lo, hi, points)
    log_w = (
        -0.5 * (grid - mu0) ** 2 / tau2
        - 0.5 * n * (grid - xbar) ** 2 / sigma2
    )
    w = np.exp(log_w - log_w.max())
    z = simpson(w, x=grid)
    mean = simpson(grid * w, x=grid) / z
    var = simpson((grid - mean) ** 2 * w, x=grid) / z
    return float(mean), float(var)


def normal_cdf_quadrature(z: float, points: int = 200001) -> float:
    """Phi(z) by direct quadrature of the standard normal density."""
    lo = -40.0
    grid = np.linspace(lo, z, points)
    dens = np.exp(-0.5 * grid**2) / math.sqrt(2.0 * math.pi)
    return float(simpson(dens, x=grid))


def bh_brute(p_values, alpha: float) -> int:
    """Step-up reference: scan k from n down to 1, return the first k with
    p_(k) <= k*alpha/n."""
    p_sorted = sorted(p_values)
    n = len(p_sorted)
    for k in range(n, 0, -1):
        if p_sorted[k - 1] <= k * alpha / n:
            return k
    return 0


def quantile_linear(values, q: float) -> float:
    """Linear-interpolation quantile at index q*(n-1), zero-based."""
    xs = sorted(values)
    pos = q * (len(xs) - 1)
    lo = int(math.floor(pos))
    hi = min(lo + 1, len(xs) - 1)
    frac = pos - lo
    return xs[lo] * (1 - frac) + xs[hi] * frac
