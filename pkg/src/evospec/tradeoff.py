"""Taper-count/resolution tradeoff: MSE bound surrogates and optimal K search.

Two surrogates are evaluated with W coupled to K (W = K*pi/N by default, the
smallest resolution admitting K tapers; the (K+1)*pi/N pairing used by the
estimator defaults is available via ``coupling="k+1"``):

    with modulation:    (log N / K)^2 + W^4 + 1/K + B_g^(K)/B_FY
    stationary only:    (log N / K)^2 + W^4 + 1/K

Each big-O term enters with constant 1. The log is base 2 by default (the
reference convention; see README). K is minimized exhaustively over
{2, ..., N-1}; since B_g^(K)/B_FY >= 0 the stationary surrogate is a lower
bound, so candidates are scanned in ascending bound order and the scan stops
once the bound passes the best value found - the argmin is exact.
"""

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .tapers import TaperSpec, compute_dpss, width_Bg

__all__ = [
    "TradeoffPoint",
    "bump_width",
    "mse18",
    "mse19",
    "optimal_K",
    "penalized_K",
    "tradeoff_curve",
    "penalty_curve",
    "write_curve_csv",
]

DEFAULT_LOG_BASE = 2.0


@dataclass(frozen=True)
class TradeoffPoint:
    """One evaluated (N, K) pair with its surrogate values and term breakdown."""

    N: int
    K: int
    W: float
    mse18: Optional[float]
    mse19: float
    penalty: float
    terms: tuple  # (log term, W^4, 1/K, B_g/B_FY)


def bump_width(a: float) -> float:
    """Characteristic width a*sqrt(pi/2) of the Gaussian-bump modulated family."""
    if a <= 0:
        raise ValueError(f"envelope scale a must be positive, got {a}")
    return a * math.sqrt(math.pi / 2.0)


def _resolution(N: int, K: int, coupling: str) -> float:
    if coupling == "k":
        return K * math.pi / N
    if coupling == "k+1":
        return (K + 1) * math.pi / N
    raise ValueError(f"unknown K-W coupling {coupling!r}; expected 'k' or 'k+1'")


def _k_max(N: int, coupling: str) -> int:
    # W < pi requires K < N under 'k' and K < N-1 under 'k+1'
    return N - 1 if coupling == "k" else N - 2


def _check_nk(N: int, K: int, coupling: str) -> float:
    if N < 5:
        raise ValueError(f"window length N must be >= 5, got {N}")
    if not 2 <= K <= _k_max(N, coupling):
        raise ValueError(
            f"taper count K must lie in [2, {_k_max(N, coupling)}] for N={N}, got {K}"
        )
    return _resolution(N, K, coupling)


@lru_cache(maxsize=None)
def _cached_width(N: int, K: int, coupling: str) -> float:
    w = _resolution(N, K, coupling)
    return width_Bg(compute_dpss(TaperSpec(N=N, W=w, K=K)))


def _closed_terms(N: int, K: int, W: float, log_base: float) -> tuple[float, float, float]:
    log_n = math.log(N) / math.log(log_base)
    return (log_n / K) ** 2, W**4, 1.0 / K


def mse19(N: int, K: int, coupling: str = "k", log_base: float = DEFAULT_LOG_BASE) -> float:
    """Stationary-case MSE surrogate (log N / K)^2 + W^4 + 1/K."""
    w = _check_nk(N, K, coupling)
    return sum(_closed_terms(N, K, w, log_base))


def mse18(N: int, K: int, b_fy: float, taper_source=None, coupling: str = "k",
          log_base: float = DEFAULT_LOG_BASE) -> float:
    """Modulated-case MSE surrogate: mse19 plus the taper-width term B_g/B_FY.

    ``taper_source`` may supply a TaperSet factory (spec, cached, precomputed)
    taking (N, W, K); the default computes and caches tapers internally.
    """
    if b_fy <= 0:
        raise ValueError(f"characteristic width B_FY must be positive, got {b_fy}")
    w = _check_nk(N, K, coupling)
    if taper_source is None:
        bg = _cached_width(N, K, coupling)
    else:
        bg = width_Bg(taper_source(N, w, K))
    return sum(_closed_terms(N, K, w, log_base)) + bg / b_fy


def _point(N: int, K: int, b_fy: Optional[float], coupling: str, log_base: float,
           penalty_weight: float = 0.0) -> TradeoffPoint:
    w = _resolution(N, K, coupling)
    t1, t2, t3 = _closed_terms(N, K, w, log_base)
    if b_fy is None:
        t4 = 0.0
        m18 = None
    else:
        t4 = _cached_width(N, K, coupling) / b_fy
        m18 = t1 + t2 + t3 + t4
    return TradeoffPoint(
        N=N, K=K, W=w, mse18=m18, mse19=t1 + t2 + t3,
        penalty=penalty_weight * K, terms=(t1, t2, t3, t4),
    )


def _scan(N: int, b_fy: Optional[float], coupling: str, log_base: float,
          penalty_weight: float, k_cap: Optional[int] = None) -> TradeoffPoint:
    """Exact exhaustive minimization over K with lower-bound pruning.

    ``k_cap`` truncates the candidate range (useful at very large N where the
    taper-width term flattens the objective and the full scan gets expensive);
    with a cap the result is exhaustive only over [2, k_cap].
    """
    if N < 5:
        raise ValueError(f"window length N must be >= 5, got {N}")
    kmax = _k_max(N, coupling)
    if k_cap is not None:
        kmax = min(kmax, int(k_cap))
    if kmax < 2:
        raise ValueError(f"no feasible taper count for N={N}")

    def bound(K: int) -> float:
        w = _resolution(N, K, coupling)
        return sum(_closed_terms(N, K, w, log_base)) + penalty_weight * K

    candidates = sorted(range(2, kmax + 1), key=bound)
    best: Optional[TradeoffPoint] = None
    best_val = math.inf
    for K in candidates:
        if best is not None and bound(K) >= best_val:
            break
        pt = _point(N, K, b_fy, coupling, log_base, penalty_weight)
        val = (pt.mse19 if b_fy is None else pt.mse18) + penalty_weight * K
        if val < best_val or (val == best_val and best is not None and K < best.K):
            best, best_val = pt, val
    assert best is not None
    return best


def optimal_K(N: int, formula: int = 18, b_fy: Optional[float] = None,
              coupling: str = "k", log_base: float = DEFAULT_LOG_BASE,
              k_max: Optional[int] = None) -> TradeoffPoint:
    """Exhaustive minimizer of the chosen surrogate over K in {2, ..., N-1}.

    Formula 18 needs ``b_fy``; ties break toward smaller K. ``k_max`` bounds
    the scanned range (see ``_scan``).
    """
    if formula == 18:
        if b_fy is None:
            raise ValueError("formula 18 requires the characteristic width b_fy")
        return _scan(N, b_fy, coupling, log_base, penalty_weight=0.0, k_cap=k_max)
    if formula == 19:
        return _scan(N, None, coupling, log_base, penalty_weight=0.0, k_cap=k_max)
    raise ValueError(f"formula must be 18 or 19, got {formula}")


def penalized_K(N: int, b_fy: float, penalty_weight: float = 1.0,
                coupling: str = "k", log_base: float = DEFAULT_LOG_BASE) -> TradeoffPoint:
    """Minimizer of mse18 + penalty_weight*K (an increasing taper-count penalty)."""
    if b_fy is None or b_fy <= 0:
        raise ValueError("penalized selection requires a positive b_fy")
    if penalty_weight < 0:
        raise ValueError(f"penalty_weight must be >= 0, got {penalty_weight}")
    return _scan(N, b_fy, coupling, log_base, penalty_weight=penalty_weight)


def tradeoff_curve(Ns, formula: int = 18, b_fy: Optional[float] = None,
                   coupling: str = "k", log_base: float = DEFAULT_LOG_BASE,
                   k_max: Optional[int] = None) -> list:
    """Optimal-K points for each N; the plot data behind the MSE-vs-N curves."""
    return [optimal_K(int(n), formula, b_fy, coupling, log_base, k_max) for n in Ns]


def penalty_curve(N: int, b_fy: float, penalty_weight: float = 1.0, k_max: Optional[int] = None,
                  coupling: str = "k", log_base: float = DEFAULT_LOG_BASE) -> list:
    """Per-K points at fixed N (mse18 with and without the penalty term)."""
    kmax = min(k_max or _k_max(N, coupling), _k_max(N, coupling))
    return [_point(N, K, b_fy, coupling, log_base, penalty_weight)
            for K in range(2, kmax + 1)]


def write_curve_csv(points, path, value: str = "auto") -> None:
    """Curve export: columns N, K_opt, mse, term1..term4."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["N", "K_opt", "mse", "term1", "term2", "term3", "term4"])
        for pt in points:
            mse = pt.mse19 if (value == "19" or (value == "auto" and pt.mse18 is None)) \
                else pt.mse18
            writer.writerow([pt.N, pt.K, repr(float(mse))]
                            + [repr(float(t)) for t in pt.terms])
