"""Stationarity tests over the variance-stabilized log-spectra table.

The PSR test is a two-way ANOVA on W_ij = ln f_hat - psi(K) + ln K with
chi-square calibration through sigma^2 = psi'(K); the RS test is a Friedman
rank test over the same table, ranking within frequency columns. Both share
the three-way decomposition into between-times, between-frequencies and
interaction-plus-residual sums of squares.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import beta, rankdata

from . import specialfn
from .estimator import SpectralEstimate, build_grid, default_tapers, estimate_grid
from .simulate import ModelSpec, model_catalog, simulate

__all__ = [
    "LogSpectraTable",
    "PsrReport",
    "RsReport",
    "McSummary",
    "log_table",
    "psr_test",
    "rs_test",
    "column_ranks",
    "friedman_statistic",
    "mc_study",
]

NORMAL_APPROX_MIN_TAPERS = 5


@dataclass
class LogSpectraTable:
    """I x J table of variance-stabilized log spectral estimates."""

    W: np.ndarray
    K: int
    sigma2: float

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=float)
        if self.W.ndim != 2:
            raise ValueError("log-spectra table must be two-dimensional")
        if not np.all(np.isfinite(self.W)):
            raise ValueError("log-spectra table contains non-finite entries")

    @property
    def I(self) -> int:
        return self.W.shape[0]

    @property
    def J(self) -> int:
        return self.W.shape[1]


@dataclass
class PsrReport:
    """Two-way ANOVA statistics, thresholds and the staged decision."""

    S_T: float
    S_F: float
    S_IR: float
    df_T: int
    df_F: int
    df_IR: int
    threshold_T: float
    threshold_IR: float
    alpha: float
    decision: str
    um_flag: bool
    sigma2: float


@dataclass
class RsReport:
    """Friedman rank statistic, threshold and decision."""

    t_R: float
    df: int
    threshold: float
    alpha: float
    decision: str


@dataclass
class McSummary:
    """Rejection tallies for one model under the Monte Carlo protocol."""

    model: str
    M: int
    T: int
    alpha: float
    seed: int
    modulated: bool
    rejections: dict = field(default_factory=dict)
    empirical_rate: dict = field(default_factory=dict)
    interval95: dict = field(default_factory=dict)
    excluded: int = 0


def log_table(est: SpectralEstimate) -> LogSpectraTable:
    """W_ij = ln f_hat(t_i, w_j) - psi(K) + ln K, with sigma2 = psi'(K)."""
    values = est.values
    if np.any(values <= 0):
        i, j = np.argwhere(values <= 0)[0]
        raise ValueError(
            f"non-positive spectral estimate at block {i}, frequency {j}; log is undefined"
        )
    if est.K < NORMAL_APPROX_MIN_TAPERS:
        warnings.warn(
            f"normal approximation of the log estimate needs K >= "
            f"{NORMAL_APPROX_MIN_TAPERS}; got K={est.K}",
            stacklevel=2,
        )
    w = np.log(values) - specialfn.digamma(est.K) + math.log(est.K)
    return LogSpectraTable(W=w, K=est.K, sigma2=specialfn.trigamma(est.K))


def anova_decomposition(w: np.ndarray) -> tuple[float, float, float]:
    """Between-times, between-frequencies and interaction+residual sums of squares."""
    grand = w.mean()
    rows = w.mean(axis=1)
    cols = w.mean(axis=0)
    I, J = w.shape
    s_t = J * float(((rows - grand) ** 2).sum())
    s_f = I * float(((cols - grand) ** 2).sum())
    s_ir = float(((w - rows[:, None] - cols[None, :] + grand) ** 2).sum())
    return s_t, s_f, s_ir


def psr_test(table: LogSpectraTable, alpha: float = 0.05) -> PsrReport:
    """Staged two-way ANOVA test: interaction+residual first, then between-times.

    A significant interaction+residual term rejects stationarity outright;
    otherwise the process is treated as uniformly modulated and the
    between-times term decides. The between-frequencies term is reported but
    never gates the decision.
    """
    _check_table(table, min_J=2)
    _check_alpha(alpha)
    s_t, s_f, s_ir = anova_decomposition(table.W)
    df_t, df_f = table.I - 1, table.J - 1
    df_ir = df_t * df_f
    thr_ir = specialfn.chi2_quantile(1.0 - alpha, df_ir)
    thr_t = specialfn.chi2_quantile(1.0 - alpha, df_t)
    if s_ir / table.sigma2 > thr_ir:
        decision, um_flag = "non-stationary", False
    elif s_t / table.sigma2 > thr_t:
        decision, um_flag = "non-stationary", True
    else:
        decision, um_flag = "stationary", True
    return PsrReport(
        S_T=s_t, S_F=s_f, S_IR=s_ir,
        df_T=df_t, df_F=df_f, df_IR=df_ir,
        threshold_T=thr_t, threshold_IR=thr_ir,
        alpha=alpha, decision=decision, um_flag=um_flag, sigma2=table.sigma2,
    )


def column_ranks(w: np.ndarray) -> np.ndarray:
    """Rank each column over the rows, 1 = smallest; ties get the mean rank."""
    return rankdata(w, method="average", axis=0)


def friedman_statistic(w: np.ndarray) -> float:
    """Friedman statistic over column ranks: J * sum_i (Rbar_i - Rbar)^2 / (I(I+1)/12)."""
    I, J = w.shape
    ranks = column_ranks(w)
    row_means = ranks.mean(axis=1)
    ss_r = J * float(((row_means - (I + 1) / 2.0) ** 2).sum())
    return ss_r / (I * (I + 1) / 12.0)


def rs_test(table: LogSpectraTable, alpha: float = 0.05) -> RsReport:
    """Rank-based stationarity test: Friedman statistic against chi2_{I-1}."""
    _check_table(table, min_J=1)
    _check_alpha(alpha)
    t_r = friedman_statistic(table.W)
    df = table.I - 1
    thr = specialfn.chi2_quantile(1.0 - alpha, df)
    decision = "non-stationary" if t_r > thr else "stationary"
    return RsReport(t_R=t_r, df=df, threshold=thr, alpha=alpha, decision=decision)


def mc_study(model, M: int, T: int, alpha: float = 0.05, seed: int = 0,
             modulated: bool = False, K: int = 5, blocks: int | None = None,
             buffer_frac: float = 0.7) -> McSummary:
    """Empirical rejection rates of both tests over M simulated replicates.

    Replicate r uses seed ``seed ^ r``. Failed replicates (degenerate
    estimates) are counted as exclusions; more than 1% of M aborts the study.
    Clopper-Pearson 95% intervals accompany each rate.
    """
    if M < 1:
        raise ValueError(f"replicate count M must be >= 1, got {M}")
    if isinstance(model, ModelSpec):
        spec, name = model, "custom"
    else:
        spec, name = model_catalog(model, modulated=modulated), str(model)
    grid = build_grid(T, K, blocks=blocks, buffer_frac=buffer_frac)
    ts = default_tapers(grid.N, K)
    rej = {"psr": 0, "rs": 0}
    excluded = 0
    max_excluded = max(1, M // 100)
    for r in range(M):
        x = simulate(spec, T, seed ^ r)
        try:
            table = log_table(estimate_grid(x, grid, ts))
        except ValueError as exc:
            excluded += 1
            if excluded > max_excluded:
                raise RuntimeError(
                    f"more than 1% of replicates failed ({excluded}/{M}); last error: {exc}"
                ) from exc
            continue
        if psr_test(table, alpha).decision == "non-stationary":
            rej["psr"] += 1
        if rs_test(table, alpha).decision == "non-stationary":
            rej["rs"] += 1
    done = M - excluded
    rates = {k: v / done for k, v in rej.items()}
    intervals = {k: _clopper_pearson(v, done) for k, v in rej.items()}
    return McSummary(
        model=name, M=M, T=T, alpha=alpha, seed=seed, modulated=modulated,
        rejections=rej, empirical_rate=rates, interval95=intervals, excluded=excluded,
    )


def _clopper_pearson(successes: int, n: int, level: float = 0.95) -> tuple[float, float]:
    tail = (1.0 - level) / 2.0
    lo = 0.0 if successes == 0 else float(beta.ppf(tail, successes, n - successes + 1))
    hi = 1.0 if successes == n else float(beta.ppf(1.0 - tail, successes + 1, n - successes))
    return lo, hi


def _check_table(table: LogSpectraTable, min_J: int) -> None:
    if table.I < 2 or table.J < min_J:
        raise ValueError(
            f"degenerate table: need I >= 2 and J >= {min_J}, got I={table.I}, J={table.J}"
        )


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"significance level must lie in (0, 1), got {alpha}")
