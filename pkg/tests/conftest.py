"""Shared oracles: dense-matrix eigensolve, series sums, brute-force ranks.

These stay independent of the library code paths they check.
"""

import numpy as np
import pytest

from evospec.tapers import TaperSet, TaperSpec, compute_dpss


def dense_dpss_oracle(N: int, W: float, K: int):
    """Top-K eigenpairs of the dense sinc concentration matrix (brute force)."""
    du = np.arange(N)[:, None] - np.arange(N)[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.sin(W * du) / (np.pi * du)
    s[np.diag_indices(N)] = W / np.pi
    vals, vecs = np.linalg.eigh(s)
    order = np.argsort(vals)[::-1][:K]
    return vals[order], vecs[:, order].T  # K x N, unit norm


def digamma_series(x: float, terms: int = 2_000_000) -> float:
    """psi(x) from the series -gamma + sum_n (1/n - 1/(n+x-1)), accelerated tail."""
    euler_gamma = 0.57721566490153286061
    n = np.arange(1, terms + 1, dtype=float)
    partial = np.sum(1.0 / n - 1.0 / (n + x - 1.0))
    # tail of sum is ~ (x-1)/n^2 summed from terms+1; integral correction
    tail = (x - 1.0) / (terms + 1)
    return -euler_gamma + partial + tail


def trigamma_series(x: float, terms: int = 2_000_000) -> float:
    """psi'(x) = sum_n 1/(n+x-1)^2 with an integral tail correction."""
    n = np.arange(0, terms, dtype=float)
    partial = np.sum(1.0 / (n + x) ** 2)
    return partial + 1.0 / (terms + x - 0.5)


def brute_force_ranks(column) -> np.ndarray:
    """Mean-tie ranks by pairwise comparison counting (independent of sorting)."""
    column = list(column)
    out = []
    for v in column:
        less = sum(1 for u in column if u < v)
        equal = sum(1 for u in column if u == v)
        out.append(less + (equal + 1) / 2.0)
    return np.array(out)


def brute_force_friedman(table) -> float:
    """Friedman statistic from brute-force ranks and the literal formula."""
    table = np.asarray(table, dtype=float)
    I, J = table.shape
    ranks = np.column_stack([brute_force_ranks(table[:, j]) for j in range(J)])
    row_means = ranks.mean(axis=1)
    grand = (I + 1) / 2.0
    ss_r = J * float(((row_means - grand) ** 2).sum())
    return ss_r / (I * (I + 1) / 12.0)


@pytest.fixture(scope="session")
def taper_set_57() -> TaperSet:
    return compute_dpss(TaperSpec(N=57, W=6 * np.pi / 57, K=5))
