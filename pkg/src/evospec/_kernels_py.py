"""Pure-numpy fallback for the multitaper kernels (same contract as the Cython build)."""

import numpy as np


def multitaper_grid(x, centers, tapers, freqs):
    """Average of squared tapered transforms at every (block center, frequency).

    Returns an (I, J) array of (1/K) * sum_k |sum_v g_k(v) x(t+v) e^{-i w v}|^2
    with v the centered lag inside each block.
    """
    N = tapers.shape[1]
    half = (N - 1) // 2
    lags = np.arange(N) - half
    phases = np.exp(-1j * np.outer(lags, freqs))  # N x J
    out = np.empty((len(centers), len(freqs)))
    for i, t in enumerate(centers):
        block = x[t - half : t + half + 1]
        m = (tapers * block) @ phases  # K x J
        out[i] = (m.real**2 + m.imag**2).mean(axis=0)
    return out
