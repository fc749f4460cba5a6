"""Pure-numpy implementations of the hot numeric kernels.

Reference semantics for the compiled extension in ``_core.pyx``; both
backends expose the same three functions and agree to floating-point
round-off (summation order may differ).
"""

import numpy as np

_LN2 = float(np.log(2.0))


def sinr_matrix(gains, p, noise):
    """SINR of every (UE, BS) link under transmit powers ``p``.

    Parameters
    ----------
    gains : ndarray, shape (N, K)
        Linear channel gains.
    p : ndarray, shape (K,)
        Transmit powers in Watts.
    noise : float
        Noise power in Watts.

    Returns
    -------
    ndarray, shape (N, K)
        gamma[n, k] = gains[n, k] * p[k] / (noise + sum_{j != k} gains[n, j] * p[j]).
    """
    s = gains * p
    tot = s.sum(axis=1)
    return s / (noise + tot[:, None] - s)


def rate_matrix(gains, p, noise, rate_scale):
    """Shannon rate of every link in Mbps.

    ``rate_scale`` is bandwidth / 1e6, so the result is
    rate_scale * log2(1 + gamma).
    """
    return rate_scale * np.log2(1.0 + sinr_matrix(gains, p, noise))


def surrogate_value(rho, gains, noise, aw, bw_sum, pow_cost):
    """Value of the concave log-power surrogate at ``rho`` = log(p).

    aw[n, k] collects the per-link weight times the lower-bound slope and
    the Mbps conversion; bw_sum is the constant offset term; pow_cost[k]
    is the coefficient of exp(rho[k]) in the power cost.
    """
    p = np.exp(rho)
    s = gains * p
    tot = s.sum(axis=1)
    interf = noise + tot[:, None] - s
    rate_part = float(np.sum(aw * (np.log(s) - np.log(interf))))
    return rate_part + bw_sum - float(pow_cost @ p)


def surrogate_value_grad(rho, gains, noise, aw, bw_sum, pow_cost):
    """Surrogate value and its gradient with respect to ``rho``.

    Returns
    -------
    (float, ndarray of shape (K,))
    """
    p = np.exp(rho)
    s = gains * p
    tot = s.sum(axis=1)
    interf = noise + tot[:, None] - s
    value = float(np.sum(aw * (np.log(s) - np.log(interf)))) + bw_sum - float(pow_cost @ p)
    ratio = aw / interf
    srow = ratio.sum(axis=1)
    cross = ((srow[:, None] - ratio) * gains).sum(axis=0) * p
    grad = aw.sum(axis=0) - cross - pow_cost * p
    return value, grad
